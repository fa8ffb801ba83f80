# SPDX-License-Identifier: MIT
"""Package entry point: ``python -m biaslab``."""

import sys

from biaslab.cli import main

if __name__ == "__main__":
    sys.exit(main())
