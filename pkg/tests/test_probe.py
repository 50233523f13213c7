import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crstates.bipartite import max_ent_projector, partial_transpose
from crstates.constructors import maxent, werner
from crstates.probe import probe, rank2_span_value
from crstates.state import DimensionError, ParameterError, PreconditionError, random_state

W_A = werner(3, 1, -0.9, 1)
W_B = werner(3, 1, -1, 1)


def test_probe_single_werner():
    rep = probe([W_A], trials=1000, seed=42)
    assert rep.violations == 0
    assert rep.min_value >= -1e-9
    assert rep.compressed_ppt_failures == 0 and rep.compressed_r_failures == 0
    assert rep.max_r_defect <= 1e-8
    assert len(rep.per_trial) == 10


def test_probe_pair_of_werners():
    rep = probe([W_B, W_A], trials=200, seed=42)
    assert rep.violations == 0 and rep.min_value >= -1e-9


def test_probe_is_reproducible():
    a = probe([W_A], trials=50, seed=7)
    b = probe([W_A], trials=50, seed=7)
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())
    c = probe([W_A], trials=60, seed=7)
    assert c.per_trial == a.per_trial


def test_probe_control_without_hypothesis():
    rep = probe([maxent(3)], trials=200, seed=1, require_invariant=False)
    assert rep.violations > 0 and rep.min_value < 0


def test_probe_rejects_bad_inputs():
    with pytest.raises(PreconditionError):
        probe([maxent(3)], trials=5)
    with pytest.raises(DimensionError):
        probe([random_state(2, 3, 6, 0)], trials=5)
    with pytest.raises(ParameterError):
        probe([W_A] * 5, trials=5)
    with pytest.raises(ParameterError):
        probe([W_A], trials=0)
    with pytest.raises(ParameterError):
        probe([], trials=5)


def test_summary_line():
    rep = probe([W_A], trials=5, seed=3)
    assert rep.summary_line().startswith("min=")
    assert rep.summary_line().endswith("violations=0 trials=5 seed=3")


def test_rank2_span_value_examples():
    e1, e2 = np.eye(2)
    assert rank2_span_value(np.eye(4), e1, e2, e2, e1) == pytest.approx(2.0)
    sigma = partial_transpose(max_ent_projector(2), 2)
    assert rank2_span_value(sigma, e1, e2, e2, -e1) == pytest.approx(-2.0)


def test_rank2_span_value_checks():
    e = np.eye(3)
    with pytest.raises(ParameterError):
        rank2_span_value(np.eye(9), e[0], e[1], e[2], e[0])
    with pytest.raises(ParameterError):
        rank2_span_value(np.eye(9), e[0], e[1], e[0], -e[1])
    with pytest.raises(DimensionError):
        rank2_span_value(np.eye(4), e[0], e[1], e[1], e[0])


def test_rank2_span_deterministic_points():
    sigma = partial_transpose(W_A)
    rng = np.random.default_rng(2024)
    for _ in range(50):
        basis = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        coeffs = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
        a, b, c, d = (basis @ x for x in coeffs)
        assert rank2_span_value(sigma, a, b, c, d) >= -1e-9


@given(st.integers(0, 2**32 - 1))
def test_rank2_values_on_invariant_werners(seed):
    sigma = partial_transpose(werner(3, 1, -0.5, 1))
    rng = np.random.default_rng(seed)
    basis = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
    a, b, c, d = (basis @ (rng.standard_normal(2) + 1j * rng.standard_normal(2)) for _ in range(4))
    assert rank2_span_value(sigma, a, b, c, d) >= -1e-9
