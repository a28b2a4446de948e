"""Smoke tests for the python module: each main operation once, end to end."""

import math

import pytest

import trajexp


def test_version():
    assert trajexp.__version__


def test_semigroup_enumeration():
    sg = trajexp.Semigroup(["2", "5"], "1", 6)
    assert sg.elements() == ["2", "4", "5", "6", "7", "8"]
    assert sg.elements_float() == [2.0, 4.0, 5.0, 6.0, 7.0, 8.0]
    assert sg.s_index(3) == 2
    # n = 2: the bare term plus 2 + 2 = 4
    assert sg.decompositions(2) == [(2, []), (1, [1])]


def test_semigroup_rejects_bad_input():
    with pytest.raises(ValueError):
        trajexp.Semigroup([], "1", 5)
    with pytest.raises(ValueError):
        trajexp.Semigroup(["1"], "0", 5)


def test_resolvent_float_and_exact():
    # gamma = 2, p = t  ->  q = -t/2 - 1/4
    q = trajexp.resolvent_solve(2.0, [[0.0], [1.0]])
    assert q[0][0] == pytest.approx(-0.25)
    assert q[1][0] == pytest.approx(-0.5)
    assert trajexp.resolvent_solve_exact("2", [["0"], ["1"]]) == [["-1/4"], ["-1/2"]]


def test_expand_fixture_factorials():
    cfg = trajexp.fixture("decay-1d")
    cfg["order"] = 5
    expansion = trajexp.expand(cfg)
    coeffs = [z["poly"]["coeffs"][0][0] for z in expansion["zetas"]]
    assert coeffs == ["-1", "1/2", "-1/6", "1/24", "-1/120"]


def test_verify_fixture_passes():
    cfg = trajexp.fixture("decay-1d")
    cfg["order"] = 3
    result = trajexp.verify(cfg)
    assert result["passed"]
    orders = result["report"]["orders"]
    assert [o["N"] for o in orders] == [1, 2, 3]
    # constant coefficients: e_1 decays at mu_2 = 2
    assert orders[0]["fitted_slope"] == pytest.approx(2.0, rel=0.05)
    assert result["csv"].startswith("#")


def test_verify_catches_injected_fault():
    cfg = trajexp.fixture("decay-1d")
    cfg["order"] = 3
    cfg["inject_fault"] = {"n": 2, "delta": 1e-3}
    result = trajexp.verify(cfg)
    assert not result["passed"]
    assert not result["report"]["orders"][1]["pass"]


def test_integrate_trajectory_callback():
    samples = trajexp.integrate_trajectory(
        lambda x, t: [math.exp(-t) * (1.0 + x[0])],
        [math.exp(-1.0) - 1.0],
        0.0,
        10.0,
        1e-10,
        [1.0, 2.0, 5.0, 10.0],
    )
    for t, pos in zip(samples["times"], samples["positions"]):
        assert pos[0] == pytest.approx(math.exp(-math.exp(-t)) - 1.0, abs=1e-8)


def test_simulate_taylor_green_short():
    cfg = trajexp.fixture("taylor-green")
    cfg["simulation"]["t_end"] = 30.0
    cfg["horizon"] = 30.0
    result = trajexp.simulate(cfg, "")
    mu1 = result["extraction"]["mu1_hat"]
    assert mu1 == pytest.approx(0.2, rel=0.01)
    # the handoff config round-trips through expand
    expansion = trajexp.expand(result["handoff_config"])
    assert expansion["order"] == 1


def test_fixture_names_listed():
    names = trajexp.fixture_names()
    assert "decay-1d" in names and "taylor-green" in names
