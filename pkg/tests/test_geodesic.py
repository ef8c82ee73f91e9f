import os

import numpy as np
import pytest
import sympy as sp

from hiddensym import catalog
from hiddensym.geodesic import (GeodesicState, IntegratorConfig, Trajectory,
                                energy_report, export_csv, integrate,
                                invariant_values, monitor_invariant)
from hiddensym.manifold import vector


@pytest.fixture(scope="module")
def sphere():
    return catalog.sphere2().manifold


@pytest.fixture(scope="module")
def flat3():
    return catalog.flat(3).manifold


class TestConfig:
    def test_bad_step_rejected(self):
        with pytest.raises(ValueError):
            IntegratorConfig(step=0.0)

    def test_bad_method_rejected(self):
        with pytest.raises(ValueError):
            IntegratorConfig(method="euler")


class TestFlatGeodesics:
    def test_straight_line(self, flat3):
        s0 = GeodesicState({"x1": 0.0, "x2": 0.0, "x3": 0.0},
                           {"x1": 0.1, "x2": 0.05, "x3": -0.02})
        cfg = IntegratorConfig(step=0.01, t_span=(0.0, 5.0), stride=50)
        traj = integrate(flat3, s0, cfg)
        for t, state in zip(traj.times, traj.states):
            assert abs(state.position["x1"] - 0.1 * t) < 1e-12
            assert abs(state.position["x2"] - 0.05 * t) < 1e-12

    def test_initial_point_outside_box_rejected(self, flat3):
        s0 = GeodesicState({"x1": 99.0, "x2": 0.0, "x3": 0.0},
                           {"x1": 1.0, "x2": 0.0, "x3": 0.0})
        with pytest.raises(ValueError):
            integrate(flat3, s0, IntegratorConfig())

    def test_domain_exit_flagged(self, flat3):
        s0 = GeodesicState({"x1": 1.9, "x2": 0.0, "x3": 0.0},
                           {"x1": 1.0, "x2": 0.0, "x3": 0.0})
        traj = integrate(flat3, s0, IntegratorConfig(step=0.01, t_span=(0, 5)))
        assert traj.exited_domain
        assert traj.states[-1].position["x1"] <= 2.0 + 1e-9


class TestSphereGeodesics:
    def _equator(self, sphere, step, t1=6.0):
        s0 = GeodesicState({"theta": np.pi / 2, "phi": 0.2},
                           {"theta": 0.0, "phi": 0.7})
        cfg = IntegratorConfig(step=step, t_span=(0.0, t1), stride=10)
        return integrate(sphere, s0, cfg)

    def test_equator_is_geodesic(self, sphere):
        traj = self._equator(sphere, 0.01)
        for state in traj.states:
            assert abs(state.position["theta"] - np.pi / 2) < 1e-10

    def test_energy_conserved(self, sphere):
        traj = self._equator(sphere, 0.01)
        rep = energy_report(traj, sphere, tol=1e-8)
        assert rep.passed

    def test_rk4_fourth_order_convergence(self, sphere):
        # tilted orbit so the energy error is not identically zero
        s0 = GeodesicState({"theta": 1.0, "phi": 0.2},
                           {"theta": 0.3, "phi": 0.7})
        drifts = []
        for step in (0.08, 0.04):
            cfg = IntegratorConfig(step=step, t_span=(0.0, 4.0), stride=1)
            traj = integrate(sphere, s0, cfg)
            drifts.append(energy_report(traj, sphere, tol=1.0).max_drift)
        assert drifts[0] / drifts[1] >= 8.0

    def test_rk45_matches_rk4(self, sphere):
        s0 = GeodesicState({"theta": 1.0, "phi": 0.2},
                           {"theta": 0.3, "phi": 0.7})
        end = []
        for method, step in (("rk4", 0.001), ("rk45", 0.001)):
            cfg = IntegratorConfig(method=method, step=step,
                                   t_span=(0.0, 2.0), stride=10**9)
            traj = integrate(sphere, s0, cfg)
            end.append([traj.states[-1].position[c] for c in ("theta", "phi")])
        assert np.allclose(end[0], end[1], atol=1e-7)


class TestInvariants:
    def test_killing_momentum_conserved(self, sphere):
        s0 = GeodesicState({"theta": 1.0, "phi": 0.2},
                           {"theta": 0.3, "phi": 0.7})
        cfg = IntegratorConfig(step=0.005, t_span=(0.0, 4.0), stride=10)
        traj = integrate(sphere, s0, cfg)
        # quadratic invariant from the metric itself
        rep = monitor_invariant(traj, sphere.metric_field(), sphere,
                                name="energy-sk", tol=1e-8)
        assert rep.passed

    def test_invariant_values_length(self, sphere):
        s0 = GeodesicState({"theta": 1.0, "phi": 0.2},
                           {"theta": 0.0, "phi": 0.5})
        traj = integrate(sphere, s0,
                         IntegratorConfig(step=0.01, t_span=(0, 1), stride=10))
        vals = invariant_values(traj, sphere.metric_field(), sphere)
        assert len(vals) == len(traj)


class TestExport:
    def test_csv_written(self, sphere, tmp_path):
        s0 = GeodesicState({"theta": 1.0, "phi": 0.2},
                           {"theta": 0.1, "phi": 0.5})
        traj = integrate(sphere, s0,
                         IntegratorConfig(step=0.01, t_span=(0, 1), stride=10))
        path = os.fspath(tmp_path / "traj.csv")
        export_csv(traj, sphere, path,
                   invariants={"energy": sphere.metric_field()})
        with open(path) as fh:
            header = fh.readline().strip().split(",")
        assert header[0] == "t"
        assert "theta" in header and "energy" in header
