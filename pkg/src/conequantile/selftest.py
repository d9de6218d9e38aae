"""Invariant battery on built-in fixtures, run by ``conequantile selftest``."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr

from . import galois, kernels
from .cones import ConvexCone
from .conecdf import ConeCdf, Comparison
from .distributions import EmpiricalSample, GaussianModel
from .probes import ProbeGrid
from .randomset import SeededRng, capacity_exact, capacity_mc
from .regions import QuantileFn

S4_POINTS = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
UNIVARIATE_POINTS = np.array([[1.0], [2.0], [3.0], [4.0]])


def fixtures():
    s4 = EmpiricalSample(S4_POINTS)
    uni = EmpiricalSample(UNIVARIATE_POINTS)
    gauss = GaussianModel(np.zeros(2), np.eye(2))
    return s4, uni, gauss


def _s4_values(s4, orth):
    c = ConeCdf.build(s4, orth)
    got = [c.lower_cdf(z) for z in ([0, 0], [0.5, 0.5], [1, 1], [10, 10])]
    return got == [0.25, 0.5, 1.0, 1.0], f"F_C = {got}"


def _univariate(uni):
    c = ConeCdf.build(uni, ConvexCone.orthant(1))
    q = QuantileFn(c)
    ok = True
    for k in range(1, 5):
        p = k / 4
        lo = q.lower_quantile(p)
        du = q.dual_quantile(p)
        ok &= float(lo.offsets.max()) == float(k) and float(du.offsets.max()) == float(k)
    return ok, "Q(k/4) = [k, inf) and matches the dual form"


def _gaussian(gauss, orth):
    c = ConeCdf.build(gauss, orth)
    a = c.lower_cdf([0.0, 0.0])
    cz = ConeCdf.build(gauss, ConvexCone.zero(2))
    b = cz.lower_cdf([1.0, 2.0])
    ok = abs(a - 0.5) < 1e-12 and abs(b - float(ndtr(-math.sqrt(5.0)))) < 1e-9
    return ok, f"F_C(0) = {a}, depth(1,2) = {b}"


def _nested_and_stable(s4, orth):
    q = QuantileFn(ConeCdf.build(s4, orth))
    Z = ProbeGrid.around(s4.points, per_axis=21).points()
    prev = np.ones(len(Z), dtype=bool)
    ok = True
    for p in np.linspace(0, 1, 21):
        m = q.member_many(p, Z)
        ok &= bool(np.all(prev | ~m))
        # C-stability along the cone generators
        for g in orth.generators:
            ok &= bool(np.all(q.member_many(p, Z[m] + 0.3 * g))) if m.any() else True
        # the region picture contains every exact member
        ok &= bool(np.all(q.lower_quantile(p).contains_many(Z[m]))) if m.any() else True
        prev = m
    return ok, "nested in p, stable under +C, hrep covers members"


def _galois(s4, orth, rng):
    q = QuantileFn(ConeCdf.build(s4, orth))
    probe = ProbeGrid.around(s4.points, per_axis=21)
    Z = probe.points()
    bad = 0
    for _ in range(20):
        G = rng.uniform((int(rng.integers(1, 4)), 2)) * 1.4 - 0.2
        D = galois.GenSet(G, orth)
        for p in np.linspace(0, 1, 21):
            lhs, rhs = galois.adjunction_check(q, p, D)
            bad += lhs != rhs
        inside = D.contains_many(Z)
        phi = galois.cl_phi(q.conecdf, D).contains_many(Z)
        psi = galois.psi_member_many(q, D, Z)
        bad += int(np.sum(inside & ~phi)) + int(np.sum(phi & ~psi))
    return bad == 0, f"{bad} adjunction or sandwich violations"


def _phi_identity(s4, gauss, orth):
    g = galois.phi_identity_check(ConeCdf.build(gauss, orth), 5, ProbeGrid.for_model(gauss, per_axis=21))
    e = galois.phi_identity_check(ConeCdf.build(s4, orth), 5, ProbeGrid.around(s4.points, per_axis=21))
    return g.violations == 0 and e.violations > 0, f"gaussian {g.violations}, empirical {e.violations}"


def _capacity(s4, orth):
    c = ConeCdf.build(s4, orth)
    q = QuantileFn(c)
    K = np.array([[0.0, 0.0], [0.5, 0.2]])
    t = capacity_exact(c, K)
    est = capacity_mc(q, K, 20000, SeededRng(7))
    single = capacity_exact(c, K[:1]) == c.lower_cdf(K[0])
    return est.within(3.0) and single, f"T(K) = {t}, mc = {est.mc_estimate} +- {est.std_error:.4f}"


def _rankings(s4, orth):
    c = ConeCdf.build(s4, orth)
    a = c.rank_phi([1.0, -1.0], [0.0, 1.0]) == Comparison.INCOMPARABLE
    b = galois.set_rank(c, galois.GenSet([[0, 0]], orth), galois.GenSet([[1, 1]], orth)) == Comparison.LESS_EQUAL
    return a and b, "phi-incomparable pair and psi order"


def _backends(s4):
    c = ConeCdf.build(s4, ConvexCone.zero(2))
    Z = SeededRng(3).uniform((50, 2)) * 2 - 0.5
    prev = kernels.set_backend("numpy")
    try:
        a = c.lower_cdf_many(Z)[0]
    finally:
        kernels.set_backend(prev)
    if not kernels.HAS_NUMBA:
        return True, "numba unavailable, numpy only"
    prev = kernels.set_backend("numba")
    try:
        b = c.lower_cdf_many(Z)[0]
    finally:
        kernels.set_backend(prev)
    return bool(np.array_equal(a, b)), "numba and numpy sweeps agree"


def run_selftest():
    """List of ``(name, passed, detail)``."""
    s4, uni, gauss = fixtures()
    orth = ConvexCone.orthant(2)
    rng = SeededRng(20240601)
    checks = [
        ("s4-lower-cdf", lambda: _s4_values(s4, orth)),
        ("univariate-quantiles", lambda: _univariate(uni)),
        ("gaussian-closed-forms", lambda: _gaussian(gauss, orth)),
        ("nested-stable-outer", lambda: _nested_and_stable(s4, orth)),
        ("adjunction-sandwich", lambda: _galois(s4, orth, rng)),
        ("phi-identity", lambda: _phi_identity(s4, gauss, orth)),
        ("capacity", lambda: _capacity(s4, orth)),
        ("rankings", lambda: _rankings(s4, orth)),
        ("backend-parity", lambda: _backends(s4)),
    ]
    out = []
    for name, fn in checks:
        try:
            ok, detail = fn()
        except Exception as e:  # report, do not abort the battery
            ok, detail = False, f"{type(e).__name__}: {e}"
        out.append((name, bool(ok), detail))
    return out
