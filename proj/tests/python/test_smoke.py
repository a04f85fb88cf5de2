import json
import math

import pytest

import monge_duality as md


def test_solve_tent_case():
    s = md.solve(md.tent_spec(), md.Params(epsilon=1e-3))
    assert abs(s.mass - 1.0) < 1e-10
    assert abs(s.support_endpoint - 3.0) < 0.05
    assert abs(s.expectation - 4.0) < 0.02
    assert s.density(2.0) == 0.0
    y = 4.2
    assert math.exp(s.log_lambda(y)) * s.slope(y) == pytest.approx(s.theta(y), abs=1e-12)


def test_duality_gap_and_energies():
    s = md.solve(md.tent_spec(2.0), md.Params(epsilon=0.01))
    r = md.duality_gap(s)
    assert r.relative_gap() < 1e-9
    assert md.primal_energy(s, md.EnergyConvention.FullTarget) >= r.primal


def test_maps_and_cost():
    s = md.solve(md.tent_spec(), md.Params(epsilon=0.01))
    inc = md.build_map(s, md.MapVariant.Increasing, 201)
    dec = md.build_map(s, md.MapVariant.Decreasing, 201)
    assert md.pushforward_residual(inc) < 1e-8
    assert inc.cost == pytest.approx(dec.cost, abs=1e-8)
    assert inc.cost == pytest.approx(md.source_mean(md.tent_spec()) - s.expectation, abs=1e-8)
    assert len(inc.x) == 201


def test_mirror_and_tent_oracle():
    spec = md.tent_spec()
    m = md.mirror_transform(spec)
    assert m.assumption == md.Assumption.II
    assert md.validate_spec(m) == []
    t = md.tent_limit_density(spec)
    assert t(4.0) == pytest.approx(1.0)
    g = md.discrete_expectation_optimizer(spec, 201)
    assert md.grid_violations(g) == []
    assert g.objective == pytest.approx(4.0, abs=1e-3)


def test_capacity_error_is_raised():
    spec = md.ProblemSpec(source=(2.0, 3.0), target=(0.0, 1.0))
    assert not md.check_capacity(spec, md.Params(epsilon=0.01))
    with pytest.raises(md.MongeError, match="CapacityError"):
        md.solve(spec, md.Params(epsilon=0.01))


def test_sweep_rows():
    rows = md.epsilon_sweep(md.tent_spec(), [0.1, 0.01, 1e-7], md.Params())
    assert [r.ok() for r in rows] == [True, True, False]
    assert rows[1].dist_tent < rows[0].dist_tent


def test_cli_round_trip(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "assumption": "I",
        "source": {"interval": [6, 8], "density": {"kind": "uniform"}},
        "target": [0, 5],
        "alpha": 1,
        "epsilons": [0.01],
    }))
    rc, out, err = md.run_cli(["solve", "--config", str(cfg), "--out", str(tmp_path / "out"), "--quiet"])
    assert rc == 0, err
    header = (tmp_path / "out" / "eps_0.01" / "density.csv").read_text().splitlines()[0]
    assert header == "y,u,theta,log_lambda,slope"
    rc, _, err = md.run_cli(["validate", "--config", str(tmp_path / "missing.json")])
    assert rc == 2
