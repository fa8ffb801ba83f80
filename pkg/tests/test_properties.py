# SPDX-License-Identifier: MIT
"""Property-based tests for the bias formulas and the matrix facts behind them.

Hypothesis draws dimensions and a seed; the matrices come from the same
well-conditioned generators the theory checks use.
"""

from __future__ import annotations

import os

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from biaslab.bias import (
    CoefficientVector,
    CUMEError,
    cume_blocks,
    meb_full,
    meb_Z,
    omega_and_decomposition,
    ovb,
)
from biaslab.config import substream_rng
from biaslab.linalg import cholesky_inverse, is_positive_definite, partial_correlation, schur_complement
from biaslab.theory.instances import (
    berkson_instance,
    general_instance,
    pairwise_partial_instance,
    random_spd,
    weak_partial_instance,
)

# CI runs 200 examples per property; BIASLAB_SLOW=1 for 2k.
_MAX_EXAMPLES = 2_000 if os.environ.get("BIASLAB_SLOW") else 200

_SEED = st.integers(min_value=0, max_value=2**32 - 1)
_DIM = st.integers(min_value=1, max_value=5)


def _rng(seed: int) -> np.random.Generator:
    return substream_rng(seed, 0)


@given(seed=_SEED, p=_DIM, d=_DIM)
@settings(max_examples=_MAX_EXAMPLES, deadline=None)
def test_berkson_error_never_biases(seed: int, p: int, d: int) -> None:
    blocks, beta = berkson_instance(p, d, _rng(seed))
    scale = 1.0 + float(np.abs(beta.beta_X).max())
    np.testing.assert_allclose(meb_full(blocks, beta), 0.0, atol=1e-9 * scale)


@given(seed=_SEED, p=_DIM, d=_DIM)
@settings(max_examples=_MAX_EXAMPLES, deadline=None)
def test_meb_z_is_leading_block_of_meb_full(seed: int, p: int, d: int) -> None:
    blocks, beta = general_instance(p, d, _rng(seed))
    np.testing.assert_allclose(meb_Z(blocks, beta), meb_full(blocks, beta)[:p], rtol=1e-8, atol=1e-9)


@given(seed=_SEED, p=_DIM, d=_DIM, data=st.data())
@settings(max_examples=_MAX_EXAMPLES, deadline=None)
def test_weak_partial_ovb_nonpositive(seed: int, p: int, d: int, data: st.DataObject) -> None:
    k = data.draw(st.integers(min_value=0, max_value=p - 1))
    a, b, d_mat, beta_x = weak_partial_instance(p, d, k, _rng(seed))
    beta = CoefficientVector(beta_Z=np.zeros(p), beta_X=beta_x)
    blocks = cume_blocks(a, b, d_mat, CUMEError(np.zeros(d)))
    assert ovb(blocks, beta)[k] <= 1e-10


@given(seed=_SEED, p=_DIM, d=st.integers(min_value=2, max_value=5))
@settings(max_examples=_MAX_EXAMPLES, deadline=None)
def test_decomposition_reproduces_x_block(seed: int, p: int, d: int) -> None:
    inst = pairwise_partial_instance(p, d, _rng(seed))
    _, attenuation, additive = omega_and_decomposition(inst.A, inst.B, inst.D, inst.err, inst.beta_X)
    blocks = cume_blocks(inst.A, inst.B, inst.D, inst.err)
    beta = CoefficientVector(beta_Z=np.zeros(p), beta_X=inst.beta_X)
    np.testing.assert_allclose(attenuation + additive, meb_full(blocks, beta)[p:], rtol=1e-8, atol=1e-10)
    assert np.all(attenuation >= -1e-12)
    assert np.all(additive <= 1e-12)


@given(seed=_SEED, n=st.integers(min_value=2, max_value=8), data=st.data())
@settings(max_examples=_MAX_EXAMPLES, deadline=None)
def test_schur_complement_of_spd_is_spd(seed: int, n: int, data: st.DataObject) -> None:
    split = data.draw(st.integers(min_value=1, max_value=n - 1))
    assert is_positive_definite(schur_complement(random_spd(n, _rng(seed)), split))


@given(seed=_SEED, n=st.integers(min_value=1, max_value=8))
@settings(max_examples=_MAX_EXAMPLES, deadline=None)
def test_m_matrix_inverse_is_nonnegative(seed: int, n: int) -> None:
    rng = _rng(seed)
    off = -rng.uniform(0.0, 1.0, size=(n, n))
    m = (off + off.T) / 2.0
    np.fill_diagonal(m, 0.0)
    np.fill_diagonal(m, np.abs(m).sum(axis=1) + rng.uniform(0.1, 1.0, size=n))
    assert np.all(cholesky_inverse(m) >= -1e-12)


@given(seed=_SEED, n=st.integers(min_value=2, max_value=8), data=st.data())
@settings(max_examples=_MAX_EXAMPLES, deadline=None)
def test_partial_correlation_symmetric(seed: int, n: int, data: st.DataObject) -> None:
    i = data.draw(st.integers(min_value=0, max_value=n - 1))
    j = data.draw(st.integers(min_value=0, max_value=n - 1).filter(lambda v: v != i))
    cov = random_spd(n, _rng(seed))
    value = partial_correlation(cov, i, j)
    assert value == partial_correlation(cov, j, i)
    assert -1.0 <= value <= 1.0


@given(seed=_SEED, n=st.integers(min_value=1, max_value=8))
@settings(max_examples=_MAX_EXAMPLES, deadline=None)
def test_cholesky_inverse_round_trip(seed: int, n: int) -> None:
    m = random_spd(n, _rng(seed))
    again = cholesky_inverse(cholesky_inverse(m))
    assert np.abs(again - m).max() < 1e-8 * np.abs(m).max()
