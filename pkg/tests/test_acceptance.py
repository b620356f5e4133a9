"""Acceptance suite: one test per headline criterion, at its stated tolerance.

Simulation-heavy criteria share one cache of horizon-5e6 runs (single seed,
common random numbers across grid points).  Each test prints a PASS line with
the measured numbers; run with ``pytest tests/test_acceptance.py -v -s``.
"""

import math

import numpy as np
import pytest

from aoi_relay import chain, split
from aoi_relay.chain import ChainParams
from aoi_relay.cli import main
from aoi_relay.optimize import minimize_aoi_chain
from aoi_relay.sim import NetworkSpec, run, validate_burke
from aoi_relay.split import SplitParams

from oracles import quad_ewy_given_s

SEED = 20260809
HORIZON = 5e6

K_GRID = (1, 2, 5, 10)
RHO_GRID = (0.1, 0.5, 0.8, 0.9)

_CACHE: dict = {}


def _chain_run(k: int, rho: float):
    key = ("chain", k, rho)
    if key not in _CACHE:
        _CACHE[key] = run(NetworkSpec.chain(k, 1.0, rho), seed=SEED, horizon=HORIZON)
    return _CACHE[key]


def _split_run(rho: float, p: float):
    key = ("split", rho, p)
    if key not in _CACHE:
        _CACHE[key] = run(NetworkSpec.split(1.0, rho, p), seed=SEED, horizon=HORIZON)
    return _CACHE[key]


def test_k1_exactness():
    """Analytic K=1 age equals the M/M/1 closed form; simulation agrees to 2%."""
    analytic = chain.average_aoi(ChainParams(1, 1.0, 0.5))
    assert analytic == pytest.approx(3.5, rel=1e-10)
    res = _chain_run(1, 0.5)
    assert res.avg_aoi_system == pytest.approx(3.5, rel=0.02)
    print(f"\nACCEPTANCE PASS k1-exactness: analytic={analytic!r}, "
          f"simulated={res.avg_aoi_system:.4f} (within 2% of 3.5)")


def test_rho_star_anchors():
    """rho* ~ 0.53 at one hop, < 0.30 at ten, non-increasing in between."""
    stars = [minimize_aoi_chain(k, 1.0, tol=1e-3).rho_star for k in range(1, 11)]
    assert abs(stars[0] - 0.53) <= 0.01
    assert stars[9] < 0.30
    assert all(b <= a for a, b in zip(stars, stars[1:]))
    print(f"\nACCEPTANCE PASS rho-star: rho*(1)={stars[0]:.4f}, rho*(10)={stars[9]:.4f}, "
          f"non-increasing over K=1..10")


def test_network_delay_chain():
    """Simulated mean delay matches n/alpha within 2% across the grid."""
    worst = 0.0
    for k in K_GRID:
        for rho in (0.1, 0.5, 0.9):
            want = chain.network_delay(ChainParams(k, 1.0, rho))
            got = _chain_run(k, rho).avg_delay
            err = abs(got - want) / want
            worst = max(worst, err)
            assert err <= 0.02, f"K={k} rho={rho}: {got} vs {want}"
    print(f"\nACCEPTANCE PASS delay-chain: worst relative error {worst:.4%} (<= 2%)")


def test_network_delay_split():
    """Simulated split delay matches the p-weighted closed form within 2%."""
    worst = 0.0
    for rho in (0.5, 0.9):
        for p in (0.0, 0.5, 1.0):
            want = split.network_delay_split(SplitParams(1.0, rho, p))
            got = _split_run(rho, p).avg_delay
            err = abs(got - want) / want
            worst = max(worst, err)
            assert err <= 0.02, f"rho={rho} p={p}: {got} vs {want}"
    print(f"\nACCEPTANCE PASS delay-split: worst relative error {worst:.4%} (<= 2%)")


def test_bound_direction_and_tightness():
    """Analytic age stays below simulated per-source age + CI, gap <= 5% for rho <= 0.8."""
    worst_gap = 0.0
    for k in K_GRID:
        for rho in RHO_GRID:
            res = _chain_run(k, rho)
            bound = chain.average_aoi(ChainParams(k, 1.0, rho))
            simulated = res.avg_aoi_per_source[0]
            ci = res.ci95["aoi_mixture"]
            assert bound <= simulated + ci, f"K={k} rho={rho}: {bound} > {simulated}+{ci}"
            if rho <= 0.8:
                gap = abs(simulated - bound) / simulated
                worst_gap = max(worst_gap, gap)
                assert gap <= 0.05, f"K={k} rho={rho}: gap {gap:.3%}"
    print(f"\nACCEPTANCE PASS bound-tightness: no violations on {len(K_GRID) * len(RHO_GRID)} "
          f"grid points; worst gap {worst_gap:.4%} for rho <= 0.8")


def test_closed_forms_match_quadrature_at_mean_s():
    """Chain and split E[W*Y] closed forms match quadrature to 1e-6 relative."""
    worst = 0.0
    for k in K_GRID:
        for rho in (0.2, 0.5, 0.8):
            cp = ChainParams(k, 1.0, rho)
            oracle = quad_ewy_given_s(lambda y, s: chain.conditional_wait(cp, y, s), cp.lam, cp.s_bar)
            rel = abs(chain.ewy_bound(cp) - oracle) / oracle
            worst = max(worst, rel)
            assert rel <= 1e-6
    for p in (0.2, 0.5, 0.8, 0.999):
        for rho in (0.2, 0.5, 0.8):
            sp = SplitParams(1.0, rho, p)
            oracle = quad_ewy_given_s(lambda y, s: split.conditional_wait_2(sp, y, s), sp.lam, sp.s_bar)
            rel = abs(split.ewy_bound_2(sp) - oracle) / oracle
            worst = max(worst, rel)
            assert rel <= 1e-6
    print(f"\nACCEPTANCE PASS closed-form-vs-quadrature: worst relative deviation {worst:.3e} (<= 1e-6)")


def test_split_traffic_deltas():
    """Unloading node 1 from p=1 to p=0.8 cuts the mixture age ~10% (rho=.5) / ~35% (rho=.9)."""
    def mix(rho, p):
        return split.aoi_mixture(SplitParams(1.0, rho, p))

    red_05 = (mix(0.5, 1.0) - mix(0.5, 0.8)) / mix(0.5, 1.0)
    red_09 = (mix(0.9, 1.0) - mix(0.9, 0.8)) / mix(0.9, 1.0)
    low_gap = mix(0.05, 1.0) - mix(0.05, 0.0)
    assert abs(red_05 - 0.10) <= 0.05
    assert abs(red_09 - 0.35) <= 0.05
    assert abs(low_gap - 1.0) <= 0.1
    print(f"\nACCEPTANCE PASS split-deltas: reduction {red_05:.2%} at rho=0.5, "
          f"{red_09:.2%} at rho=0.9, low-load gap {low_gap:.4f}")


def test_burke_departures_exponential():
    """Interdepartures at node 1 of a 2-chain fit Exponential(lam) (1e5+ samples)."""
    rep = validate_burke(NetworkSpec.chain(2, 1.0, 0.5), seed=SEED, horizon=3e5)
    assert rep.n_samples >= 1e5
    assert abs(rep.mean - rep.expected_mean) / rep.expected_mean <= 0.02
    assert not rep.rejected_at_1pct
    print(f"\nACCEPTANCE PASS burke: n={rep.n_samples}, mean={rep.mean:.4f} "
          f"(expected {rep.expected_mean}), KS p={rep.p_value:.3f} (not rejected at 1%)")


def test_multiground_sweep_properties():
    """With every node loaded equally: age grows with K, its minimiser moves left."""
    rhos = [round(0.05 * i, 2) for i in range(1, 19)]  # 0.05 .. 0.90
    curves = {}
    for k in (2, 5, 10):
        curves[k] = [
            run(NetworkSpec.multi_ground(k, 1.0, rho), seed=SEED, horizon=1e6).avg_aoi_system
            for rho in rhos
        ]
    for i in range(len(rhos)):
        assert curves[2][i] < curves[5][i] < curves[10][i], f"rho={rhos[i]}"
    argmins = {k: rhos[int(np.argmin(curves[k]))] for k in curves}
    assert argmins[5] <= argmins[2]
    assert argmins[10] <= argmins[5]
    assert argmins[10] < argmins[2]
    print(f"\nACCEPTANCE PASS multi-ground: age increasing in K at every rho; "
          f"argmin rho = {argmins} (decreasing in K on the 0.05 grid)")


def test_csv_byte_determinism(tmp_path):
    """simulate and sweep rewrite byte-identical CSV under a fixed seed."""
    cases = [
        ["simulate", "--scenario", "chain", "--k-list", "1,2", "--rho-grid", "0.3,0.6",
         "--horizon", "2e4", "--seed", "11"],
        ["sweep", "--scenario", "split", "--p-list", "0,0.5,1", "--rho-grid", "0.4",
         "--horizon", "2e4", "--seed", "11"],
    ]
    for i, argv in enumerate(cases):
        a, b = tmp_path / f"{i}a.csv", tmp_path / f"{i}b.csv"
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()
    print("\nACCEPTANCE PASS determinism: simulate and sweep CSVs byte-identical across reruns")
