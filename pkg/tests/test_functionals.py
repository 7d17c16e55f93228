import math

import numpy as np
import pytest

from rwhull.functionals import (F_QMAX, F_QMIN, F_SW, WANT_EXTREMES, WANT_HULL, WANT_SHAPE,
                                WANT_SW, default_checkpoints, exact_diameter_moments,
                                invariant_violations, resample_deltas, shape_distances,
                                simulate, spitzer_widom_mean, trace, trace_result)
from rwhull.geom2d import (DirectionGrid, convex_hull, hausdorff, regular_polygon,
                           scale_unit_diameter, support_values)
from rwhull.rng import RandomStream
from rwhull.walk import (DegenerateDiag, IsotropicGaussianShifted, LatticeSimple, Path,
                         constant, sample_path)

import oracles

GAUSS = IsotropicGaussianShifted((1.0, 0.0), 1.0)
ZERO_GAUSS = IsotropicGaussianShifted((0.0, 0.0), 1.0)


def _scratch(path, k):
    pts = path.positions[: k + 1]
    K = convex_hull(pts)
    return (oracles.polygon_perimeter(K.vertices), oracles.all_pairs_diameter(pts),
            oracles.inradius_by_lines(K.vertices))


def test_trace_hand_example():
    t = trace(Path.from_increments([(1, 1), (1, -1)]), [0, 1, 2])
    assert t.L.tolist() == [0.0, 2 * math.sqrt(2), 2 + 2 * math.sqrt(2)]
    assert t.D.tolist() == [0.0, math.sqrt(2), 2.0]
    assert t.r.tolist() == [0.0, 0.0, 0.0]
    assert t.witness[-1].tolist() == [0, 2]
    assert math.isnan(t.ratio[0])


@pytest.mark.parametrize("dist", [GAUSS, ZERO_GAUSS, LatticeSimple(), DegenerateDiag()])
def test_trace_matches_scratch(dist):
    path = sample_path(dist, 200, RandomStream(77, 1))
    t = trace(path, np.arange(201))
    for k in range(201):
        L, D, r = _scratch(path, k)
        assert t.L[k] == pytest.approx(L, rel=1e-9, abs=1e-12)
        assert t.D[k] == pytest.approx(D, rel=1e-9, abs=1e-12)
        assert t.r[k] == pytest.approx(r, rel=1e-9, abs=1e-12)
        i, j = t.witness[k]
        assert math.dist(path.positions[i], path.positions[j]) == pytest.approx(D, rel=1e-12, abs=0)
    assert t.check_invariants() == []


def test_trace_x_proj_and_norm():
    path = sample_path(GAUSS, 50, RandomStream(3, 0))
    t = trace(path, [10, 50], mu_hat=(1.0, 0.0))
    np.testing.assert_array_equal(t.x_proj, path.positions[[10, 50], 0])
    np.testing.assert_allclose(t.s_norm, np.hypot(*path.positions[[10, 50]].T), rtol=1e-15)
    assert trace(path, [10, 50]).x_proj is None


def test_default_checkpoints():
    cp = default_checkpoints(5000)
    assert cp[0] == 0 and cp[-1] == 5000 and np.all(np.diff(cp) > 0)
    assert np.array_equal(cp[:1025], np.arange(1025))
    assert default_checkpoints(3).tolist() == [0, 1, 2, 3]


@pytest.mark.parametrize("bad", [[], [3, 2], [0, 11], [-1, 2]])
def test_checkpoint_validation(bad):
    with pytest.raises(ValueError):
        simulate(GAUSS, 10, bad, 2, 0)


@pytest.mark.parametrize("dist", [GAUSS, LatticeSimple(), DegenerateDiag()])
def test_simulate_matches_trace(dist):
    cp = [0, 1, 5, 64, 65, 300]
    sim = simulate(dist, 300, cp, 4, 123, WANT_HULL | WANT_SW)
    for t in range(4):
        ref = trace(sample_path(dist, 300, RandomStream(123, t)), cp)
        got = trace_result(sim, t)
        for name in ("L", "D", "r", "s_norm"):
            np.testing.assert_array_equal(getattr(got, name), getattr(ref, name))


def test_simulate_split_invariant():
    cp = [10, 100, 1000]
    whole = simulate(LatticeSimple(), 1000, cp, 12, 5, WANT_HULL | WANT_SW, threads=1)
    parts = np.concatenate([
        simulate(LatticeSimple(), 1000, cp, 5, 5, WANT_HULL | WANT_SW, first_trial=0).data,
        simulate(LatticeSimple(), 1000, cp, 7, 5, WANT_HULL | WANT_SW, first_trial=5).data,
    ])
    np.testing.assert_array_equal(whole.data, parts)
    threaded = simulate(LatticeSimple(), 1000, cp, 12, 5, WANT_HULL | WANT_SW, threads=3)
    np.testing.assert_array_equal(whole.data, threaded.data)


def test_running_ratio_extremes_match_trace():
    n, n_start = 400, 10
    sim = simulate(LatticeSimple(), n, [50, n], 3, 9, WANT_EXTREMES, n_start=n_start)
    for t in range(3):
        tr = trace(sample_path(LatticeSimple(), n, RandomStream(9, t)), np.arange(n + 1))
        q = tr.ratio
        for c, k in enumerate((50, n)):
            window = q[n_start: k + 1]
            window = window[~np.isnan(window)]
            assert sim.data[t, c, F_QMIN] == pytest.approx(window.min(), rel=1e-12)
            assert sim.data[t, c, F_QMAX] == pytest.approx(window.max(), rel=1e-12)


def test_shape_distances_match_geometry():
    grid = DirectionGrid(256)
    targets = [convex_hull([(-0.5, 0), (0.5, 0)]), regular_polygon(64, 0.5)]
    tsup = np.array([support_values(K, grid) for K in targets])
    path = sample_path(LatticeSimple(), 300, RandomStream(2, 2))
    cp = [0, 7, 100, 300]
    hd = shape_distances(path, cp, tsup, grid)
    assert np.all(np.isnan(hd[0]))
    for c, k in enumerate(cp[1:], start=1):
        S = scale_unit_diameter(convex_hull(path.positions[: k + 1]))
        for j, K in enumerate(targets):
            assert hd[c, j] == pytest.approx(hausdorff(S, K, grid)[0], rel=1e-9, abs=1e-12)
    sim = simulate(LatticeSimple(), 300, cp, 3, 2, WANT_SHAPE, targets=tsup, grid=grid)
    np.testing.assert_array_equal(sim.shape[2], hd)


def test_invariant_violations_clean():
    sim = simulate(ZERO_GAUSS, 2000, default_checkpoints(2000), 5, 1)
    assert set(invariant_violations(sim).values()) == {0}


def test_invariant_violations_detects_corruption():
    sim = simulate(ZERO_GAUSS, 100, [10, 50, 100], 3, 1)
    sim.data[1, 2, 0] = 0.5 * sim.data[1, 1, 0]
    bad = invariant_violations(sim)
    assert bad["L_monotone"] == 1 and bad["ratio_bounds"] == 1


# --- Spitzer-Widom ---

def test_spitzer_widom_n1_diag_exact():
    (p,) = spitzer_widom_mean(DegenerateDiag(), 1, 50, 0, [1])
    assert p.estimate == 2 * math.sqrt(2) and p.se == 0.0
    assert p.direct == 2 * math.sqrt(2)


def test_spitzer_widom_n0_empty():
    assert spitzer_widom_mean(GAUSS, 0, 10, 0) == []


def test_spitzer_widom_constant():
    pts = spitzer_widom_mean(constant((1.0, 0.0)), 32, 3, 0, [1, 8, 32])
    assert [p.estimate for p in pts] == [2.0, 16.0, 64.0]
    assert [p.direct for p in pts] == [2.0, 16.0, 64.0]


def test_spitzer_widom_agrees_with_direct_n64():
    (p,) = spitzer_widom_mean(GAUSS, 64, 4000, 31, [64])
    combined = math.hypot(p.se, p.direct_se)
    assert abs(p.estimate - p.direct) <= 3 * combined


def test_spitzer_widom_running_sum_field():
    cp = np.arange(0, 11)
    sim = simulate(GAUSS, 10, cp, 2, 4, WANT_SW)
    pos = sample_path(GAUSS, 10, RandomStream(4, 0)).positions
    ref = np.concatenate([[0.0], 2 * np.cumsum(np.hypot(*pos[1:].T) / np.arange(1, 11))])
    np.testing.assert_allclose(sim.data[0, :, F_SW], ref, rtol=1e-13)


# --- exact enumeration and resampling ---

def test_exact_moments_hand_values():
    m, v = exact_diameter_moments(DegenerateDiag(), 1)
    assert m == pytest.approx(math.sqrt(2), rel=1e-15) and v == pytest.approx(0.0, abs=1e-15)
    m, v = exact_diameter_moments(DegenerateDiag(), 2)
    assert m == pytest.approx(1 + math.sqrt(2), rel=1e-15)
    assert v == pytest.approx(3 - 2 * math.sqrt(2), rel=1e-12)


def test_exact_moments_limits():
    with pytest.raises(ValueError):
        exact_diameter_moments(GAUSS, 3)
    with pytest.raises(ValueError):
        exact_diameter_moments(LatticeSimple(), 20, max_paths=1000)


def test_resample_constant_is_zero():
    rep = resample_deltas(constant((1.0, 0.0)), 8, 5, 4, 0)
    assert rep.var_direct == 0 and rep.var_identity == 0
    assert np.all(rep.delta_hat_sq == 0) and rep.bound_violations == 0
    assert rep.mean_D == 8.0


def test_resample_diag_matches_enumeration():
    n = 10
    _, exact = exact_diameter_moments(DegenerateDiag(), n)
    rep = resample_deltas(DegenerateDiag(), n, 2000, 16, 8)
    assert abs(rep.var_direct - exact) <= 4 * rep.var_direct_se
    assert abs(rep.var_identity - exact) <= 4 * rep.var_identity_se
    assert rep.bound_violations == 0 and rep.worst_bound_ratio <= 1.0


def test_resample_validation():
    with pytest.raises(ValueError):
        resample_deltas(GAUSS, 0, 5, 4, 0)
    with pytest.raises(ValueError):
        resample_deltas(GAUSS, 5, 5, 1, 0)
