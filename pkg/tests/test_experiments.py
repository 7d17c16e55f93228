import json
import math

import pytest

from rwhull import geom2d
from rwhull.experiments import (REGISTRY, ExperimentError, ExperimentSpec, TargetShape,
                                resolve_params, run_experiment, spec_from_config)
from rwhull.walk import DegenerateDiag, LatticeSimple

CONST = {"type": "finite", "atoms": [[1, 0, 1]]}
GAUSS = {"type": "gaussian", "mu": [1, 0], "sd": 1}
ZERO_GAUSS = {"type": "gaussian", "mu": [0, 0], "sd": 1}
DIAG = {"type": "degenerate_diag"}
LATTICE = {"type": "lattice"}


def run(name, dist, n_grid, trials=20, seed=1, **params):
    cfg = {"experiment": name, "dist": dist, "n_grid": n_grid, "trials": trials, "seed": seed,
           "params": params}
    return run_experiment(spec_from_config(cfg))


# --- constant increment: every functional is known exactly ---

def test_lln_constant():
    r = run("exp_lln", CONST, [10, 100])
    assert r.value("L_over_n", 100) == 2.0 and r.value("D_over_n", 100) == 1.0
    assert r.passed


def test_ratio_constant():
    r = run("exp_ratio_drift", CONST, [1, 10, 100])
    assert all(r.value("ratio_mean", n) == 2.0 for n in (1, 10, 100))


def test_mean_perimeter_constant():
    r = run("exp_mean_perimeter", CONST, [64, 256], sw_n=64, sw_trials=10)
    assert r.value("mean_L", 256) == 512.0
    assert r.value("perimeter_excess_over_log", 256) == 0.0
    assert r.value("spitzer_widom_L", 64) == 128.0


def test_norm_gap_constant():
    r = run("exp_mean_norm_gap", CONST, [10, 100])
    assert r.value("norm_gap", 10) == 0.0 and r.value("norm_gap", 100) == 0.0


def test_l2_recast_constant():
    r = run("exp_l2_recast", CONST, [10, 100])
    assert r.value("l2_perimeter", 100) == 0.0 and r.value("l2_diameter", 100) == 0.0


def test_inradius_constant():
    r = run("exp_inradius", CONST, [10, 100])
    assert r.value("max_r", 100) == 0.0


def test_variance_identity_constant():
    r = run("exp_variance_identity", CONST, [8], inner=4)
    assert r.value("var_direct") == 0.0 and r.value("var_identity") == 0.0
    assert r.passed


# --- small real runs ---

def test_lln_gaussian_small():
    r = run("exp_lln", GAUSS, [1000, 10000], tol_L=0.1, tol_D=0.06)
    assert r.passed, r.to_dict()["assertions"]
    assert r.metadata["reference"] == "Thm 1.1, Thm 1.2"


def test_lln_zero_drift_small():
    r = run("exp_lln", LATTICE, [1000, 10000, 100000], trials=10, zero_drift_max=0.05)
    assert r.passed
    assert r.value("L_over_n", 100000) < 0.05


def test_degenerate_small():
    r = run("exp_degenerate", DIAG, [256, 1024], trials=4000, mean_tol=0.1, var_tol=0.15,
            ks_max=0.05)
    assert r.passed, r.to_dict()["assertions"]
    assert r.assertion("max_D_minus_norm_nonincreasing").value == 0.0


def test_clt_small():
    r = run("exp_clt_diameter", GAUSS, [256, 1024], trials=2000, var_tol=0.2, ks_max=0.06)
    assert r.passed, r.to_dict()["assertions"]


def test_shape_small():
    r = run("exp_shape_zero_drift", LATTICE, [1000, 10000], trials=10)
    assert r.assertion("ratio_lower_bound").value >= 2 - 1e-9
    assert r.assertion("ratio_upper_bound").value <= math.pi + 1e-9
    assert r.assertion("trace_invariants").passed
    assert r.metadata["n_start"] == 10


def test_inradius_drift_bounded():
    r = run("exp_inradius", GAUSS, [100, 1000], trials=50)
    assert r.passed and r.value("max_r", 1000) < 3.0


def test_variance_identity_degenerate_small():
    r = run("exp_variance_identity", DIAG, [6], trials=500, inner=16)
    assert r.passed, r.to_dict()["assertions"]
    assert r.value("var_exact") > 0


def test_conjecture_reports_positive():
    r = run("exp_conjecture", DIAG, [64, 256])
    assert r.passed and r.value("var_L_over_log_n", 256) > 0
    assert r.value("trials", 256) == 20


# --- rejections ---

@pytest.mark.parametrize("name,dist", [
    ("exp_ratio_drift", LATTICE),
    ("exp_mean_perimeter", ZERO_GAUSS),
    ("exp_mean_norm_gap", LATTICE),
    ("exp_l2_recast", LATTICE),
    ("exp_clt_diameter", DIAG),
    ("exp_degenerate", GAUSS),
    ("exp_shape_zero_drift", GAUSS),
])
def test_precondition_rejections(name, dist):
    with pytest.raises(ExperimentError):
        run(name, dist, [10, 20])


@pytest.mark.parametrize("cfg", [
    {"experiment": "exp_nope", "dist": GAUSS, "n_grid": [10], "trials": 2, "seed": 0},
    {"experiment": "exp_lln", "dist": GAUSS, "n_grid": [10], "trials": 2},
    {"experiment": "exp_lln", "dist": GAUSS, "n_grid": [10], "trials": 2, "seed": 0, "extra": 1},
    {"experiment": "exp_lln", "dist": GAUSS, "n_grid": [10], "trials": 2.5, "seed": 0},
    {"experiment": "exp_lln", "dist": GAUSS, "n_grid": [10], "trials": 2, "seed": 0,
     "params": {"bogus": 1}},
])
def test_config_rejections(cfg):
    with pytest.raises(ExperimentError):
        spec_from_config(cfg)


@pytest.mark.parametrize("kw", [
    {"n_grid": []}, {"n_grid": [10, 10]}, {"n_grid": [20, 10]}, {"n_grid": [0, 10]},
    {"trials": 0}, {"seed": -1}, {"grids": {"hausdorff_m": 8}}, {"grids": {"other": 64}},
])
def test_spec_validation(kw):
    base = dict(name="exp_lln", dist=LatticeSimple(), n_grid=(10, 20), trials=2, seed=0)
    with pytest.raises(ExperimentError):
        ExperimentSpec(**{**base, **kw})


def test_resolve_params_defaults():
    assert resolve_params("exp_lln", {})["tol_L"] == 0.05
    assert resolve_params("exp_lln", {"tol_L": 0.2})["tol_L"] == 0.2
    with pytest.raises(ExperimentError):
        resolve_params("exp_lln", {"tol": 1})


def test_registry_complete():
    assert set(REGISTRY) == {
        "exp_lln", "exp_ratio_drift", "exp_shape_zero_drift", "exp_mean_perimeter",
        "exp_mean_norm_gap", "exp_l2_recast", "exp_clt_diameter", "exp_degenerate",
        "exp_inradius", "exp_variance_identity", "exp_conjecture"}


# --- outputs ---

def test_reproducible_and_serializable():
    a = run("exp_ratio_drift", GAUSS, [100, 1000], seed=7)
    b = run("exp_ratio_drift", GAUSS, [100, 1000], seed=7)
    assert a.to_dict() == b.to_dict()
    c = run("exp_ratio_drift", GAUSS, [100, 1000], seed=8)
    assert a.to_dict()["rows"] != c.to_dict()["rows"]
    doc = json.loads(json.dumps(a.to_dict()))
    assert doc["metadata"]["seed"] == 7 and "version" in doc["metadata"]
    for asrt in doc["assertions"]:
        assert {"lower", "upper", "value", "passed"} <= set(asrt)


def test_every_assertion_carries_tolerance():
    r = run("exp_lln", GAUSS, [100, 1000])
    for a in r.assertions:
        assert a.lower is not None or a.upper is not None


# --- target shapes ---

@pytest.mark.parametrize("t", [TargetShape("segment", 0.0), TargetShape("segment", 1.1),
                               TargetShape("disc"), TargetShape("square")])
def test_target_shape_invariants(t):
    K = t.polygon()
    d, _ = geom2d.diameter(K)
    assert abs(d - 1.0) <= max(2 * t.approximation_error, 1e-12)
    assert geom2d.point_polygon_distance((0.0, 0.0), K) == 0.0
    assert TargetShape.from_dict(t.to_dict()) == t


def test_disc_approximation_error():
    t = TargetShape("disc")
    v, b = geom2d.hausdorff(t.polygon(), geom2d.regular_polygon(4096, 0.5), 8192)
    assert v <= t.approximation_error + 1e-12
    assert t.approximation_error == pytest.approx(0.5 * (1 - math.cos(math.pi / 256)))


def test_target_shape_rejects():
    with pytest.raises(ExperimentError):
        TargetShape("triangle")
    with pytest.raises(ExperimentError):
        TargetShape.from_dict({"shape": "disc", "radius": 2})
