import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conequantile import (
    CompactTestSet,
    ConeCdf,
    ConfigurationError,
    ConvexCone,
    EmpiricalSample,
    GaussianModel,
    QuantileFn,
    SeededRng,
    capacity_exact,
    capacity_mc,
    draw,
    hits,
)

S4 = EmpiricalSample([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
ORTH = ConvexCone.orthant(2)
C4 = ConeCdf.build(S4, ORTH)
Q4 = QuantileFn(C4)


class FixedRng:
    seed = 0

    def __init__(self, u):
        self.u = u

    def uniform(self, size=None):
        return self.u


def test_draw_zero_is_whole():
    u, r = draw(Q4, FixedRng(0.0))
    assert u == 0.0 and r.variant == "whole"


def test_draw_reproducible():
    a = draw(Q4, SeededRng(42))
    b = draw(Q4, SeededRng(42))
    assert a[0] == b[0]
    assert np.array_equal(a[1].offsets, b[1].offsets)


def test_draw_half_contains_top_corner():
    _, r = draw(Q4, FixedRng(0.5))
    assert r.contains([1.0, 1.0])
    assert Q4.member(0.5, [1.0, 1.0])


def test_hits_examples():
    assert hits(Q4, 0.9, [[1.0, 1.0]])
    assert not hits(Q4, 0.5, [[0.0, 0.0]])
    assert hits(Q4, 0.0, [[-50.0, -50.0]])


def test_capacity_exact_examples():
    assert capacity_exact(C4, [[1.0, 1.0]]) == 1.0
    assert capacity_exact(C4, [[0.0, 0.0]]) == 0.25
    z = [0.3, 0.7]
    assert capacity_exact(C4, [z]) == C4.lower_cdf(z)


def test_capacity_mc_examples():
    est = capacity_mc(Q4, CompactTestSet([[0.0, 0.0]]), 20000, SeededRng(3))
    assert est.exact == 0.25
    assert est.within(3.0)
    assert est.std_error == pytest.approx(np.sqrt(est.mc_estimate * (1 - est.mc_estimate) / 20000))
    sure = capacity_mc(Q4, [[1.0, 1.0]], 1000, SeededRng(3))
    assert sure.mc_estimate == 1.0 and sure.std_error == 0.0
    again = capacity_mc(Q4, [[0.0, 0.0]], 20000, SeededRng(3))
    assert again == est


def test_capacity_mc_rejects_small_n():
    with pytest.raises(ConfigurationError):
        capacity_mc(Q4, [[0.0, 0.0]], 99, SeededRng(1))


def test_capacity_trace():
    est, (u, hit) = capacity_mc(Q4, [[0.5, 0.5]], 500, SeededRng(9), trace=True)
    assert len(u) == 500 and int(hit.sum()) == est.hits
    assert np.array_equal(hit, u <= est.exact)


def test_rng_validation_and_spawn():
    with pytest.raises(ConfigurationError):
        SeededRng(-1)
    with pytest.raises(ConfigurationError):
        SeededRng(2**64)
    kids = SeededRng(5).spawn(3)
    vals = [k.uniform() for k in kids]
    assert len(set(vals)) == 3
    assert [k.uniform() for k in SeededRng(5).spawn(3)] == vals


def test_compact_set_validation():
    with pytest.raises(ConfigurationError):
        CompactTestSet(np.zeros((0, 2)))
    with pytest.raises(ConfigurationError):
        CompactTestSet([[np.nan, 0.0]])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_hit_test_equivalence_and_union(seed):
    rng = np.random.default_rng(seed)
    model = S4 if seed % 2 else GaussianModel([0.0, 0.0], np.eye(2))
    c = ConeCdf.build(model, ORTH)
    q = QuantileFn(c)
    K1 = rng.uniform(-1, 2, size=(3, 2))
    K2 = rng.uniform(-1, 2, size=(2, 2))
    t1, t2 = capacity_exact(c, K1), capacity_exact(c, K2)
    assert capacity_exact(c, np.vstack([K1, K2])) == max(t1, t2)
    assert capacity_exact(c, K1[:1]) <= t1
    for u in rng.uniform(size=10):
        assert hits(q, float(u), K1) == (u <= t1 + 1e-12)
