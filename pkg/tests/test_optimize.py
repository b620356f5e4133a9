import numpy as np
import pytest

from aoi_relay.chain import ChainParams, average_aoi
from aoi_relay.optimize import RHO_MAX, RHO_MIN, minimize_aoi_chain, minimize_aoi_split
from aoi_relay.split import SplitParams, aoi_mixture


def test_single_node_anchor():
    res = minimize_aoi_chain(1, 1.0, tol=1e-3)
    assert abs(res.rho_star - 0.53) <= 0.01


def test_ten_node_anchor():
    res = minimize_aoi_chain(10, 1.0, tol=1e-3)
    assert res.rho_star < 0.30


def test_intermediate_hop_count_between_anchors():
    r1 = minimize_aoi_chain(1, 1.0, tol=1e-3).rho_star
    r2 = minimize_aoi_chain(2, 1.0, tol=1e-3).rho_star
    r10 = minimize_aoi_chain(10, 1.0, tol=1e-3).rho_star
    assert r10 < r2 < r1


def test_rho_star_non_increasing_in_hop_count():
    values = [minimize_aoi_chain(k, 1.0, tol=1e-3).rho_star for k in range(1, 11)]
    assert all(b < a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("n_nodes", [1, 3, 10])
def test_result_invariants_and_certificate(n_nodes):
    tol = 1e-3
    res = minimize_aoi_chain(n_nodes, 1.0, tol=tol)
    lo, hi = res.bracket
    assert lo < res.rho_star < hi
    assert res.evaluations > 0

    def f(rho):
        return average_aoi(ChainParams(n_nodes, 1.0, rho))

    assert f(res.rho_star) == pytest.approx(res.aoi_star, rel=1e-12)
    assert res.aoi_star <= f(lo) and res.aoi_star <= f(hi)
    # local optimality certificate
    assert f(min(res.rho_star + 2 * tol, RHO_MAX)) >= res.aoi_star
    assert f(max(res.rho_star - 2 * tol, RHO_MIN)) >= res.aoi_star


@pytest.mark.parametrize("n_nodes", [1, 3, 10])
def test_matches_exhaustive_scan(n_nodes):
    tol = 1e-3
    res = minimize_aoi_chain(n_nodes, 1.0, tol=tol)
    grid = np.arange(RHO_MIN, RHO_MAX, 1e-4)
    values = [average_aoi(ChainParams(n_nodes, 1.0, float(r))) for r in grid]
    brute = float(grid[int(np.argmin(values))])
    assert abs(res.rho_star - brute) <= tol


def test_split_reduces_to_mm1_at_p_zero():
    res = minimize_aoi_split(1.0, 0.0, tol=1e-3)
    assert abs(res.rho_star - 0.53) <= 0.01


def test_split_boundary_matches_two_node_chain():
    a = minimize_aoi_split(1.0, 1.0, tol=1e-4)
    b = minimize_aoi_chain(2, 1.0, tol=1e-4)
    assert a.rho_star == pytest.approx(b.rho_star, abs=2e-4)
    assert a.aoi_star == pytest.approx(b.aoi_star, rel=1e-10)


def test_split_rho_star_decreases_slowly_in_p():
    tol = 1e-3
    r_low = minimize_aoi_split(1.0, 0.2, tol=tol).rho_star
    r_high = minimize_aoi_split(1.0, 0.8, tol=tol).rho_star
    assert r_high <= r_low + tol


def test_split_certificate():
    tol = 1e-3
    res = minimize_aoi_split(1.0, 0.5, tol=tol)

    def f(rho):
        return aoi_mixture(SplitParams(1.0, rho, 0.5))

    assert f(res.rho_star + 2 * tol) >= res.aoi_star
    assert f(res.rho_star - 2 * tol) >= res.aoi_star


def test_input_validation():
    with pytest.raises(ValueError):
        minimize_aoi_chain(0, 1.0)
    with pytest.raises(ValueError):
        minimize_aoi_chain(1, -1.0)
    with pytest.raises(ValueError):
        minimize_aoi_chain(1, 1.0, tol=0.5)
    with pytest.raises(ValueError):
        minimize_aoi_split(1.0, 1.5)
