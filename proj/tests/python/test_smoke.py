import math

import pytest

import pmlab


def test_cone_apex_zero_generator_reproduces_distance_to_boundary():
    # zero generator, h = s: the value at (0, x) is the exit time eps - |x|, so the apex is eps
    v = pmlab.cone_apex(lambda s, x: s, epsilon=0.5, L1=1.0, dx=0.01)
    assert abs(v - 0.5) < 1e-12


def test_cone_apex_constant_boundary():
    assert abs(pmlab.cone_apex(lambda s, x: 3.0, 0.5, 1.0, 0.02, generator="heat") - 3.0) < 1e-12


def test_hit_cone_on_flat_path_is_the_closing_time():
    t, kind, loc = pmlab.hit_cone([0.0, 1.0], [0.0, 0.0], 1, 0.0, [0.0], R=0.5, L1=2.0, T=1.0)
    assert t == pytest.approx(0.25)
    assert kind == "lateral"
    assert loc == [0.0]


def test_hit_cone_linear_path():
    # |s| + s = 0.5 at s = 0.25
    t, _, loc = pmlab.hit_cone([0.0, 1.0], [0.0, 1.0], 1, 0.0, [0.0], R=0.5, L1=1.0, T=1.0)
    assert t == pytest.approx(0.25)
    assert loc[0] == pytest.approx(0.25)


def test_hitting_sequence_flat_path():
    hits, terminal = pmlab.hitting_sequence([0.0, 1.0], [0.0, 0.0], 1, epsilon=0.25, L1=1.0)
    assert terminal
    assert hits == pytest.approx([0.25, 0.5, 0.75])


def test_markov_restart_on_dyadic_path():
    times = [k / 4 for k in range(5)]
    values = [0.0, 0.125, -0.0625, 0.25, 0.0]
    assert pmlab.markov_restart_check(times, values, 1, 0.0, [0.0], R=0.75, L1=1.0, T=1.0, tau=0.125)


def test_hjb_oracle_linear_terminal():
    # terminal x: sup over drift |b| <= L gives L T
    v = pmlab.hjb_oracle_1d(lambda x: x, L=1.0, T=0.5, nodes=201)
    assert v == pytest.approx(0.5, abs=0.05)


def test_isaacs_gap():
    assert pmlab.isaacs_gap([[3.0, 1.0], [4.0, 2.0]]) == 0.0
    assert pmlab.isaacs_gap([[1.0, -1.0], [-1.0, 1.0]]) == pytest.approx(2.0)


def test_run_small_pipelines_and_determinism():
    a = pmlab.run_json("shjb", seed=3, samples=200)
    b = pmlab.run_json("shjb", seed=3, samples=200)
    assert a == b
    res = pmlab.run("isaacs", seed=3, samples=8, stages=2)
    assert res["pure_saddle"]
    assert res["upper"] >= res["lower"]
    assert res["matching_pennies"]["isaacs_gap"] > 0
    cone = pmlab.run("cone_example", seed=1, dx=0.01)
    assert cone["pass"]


def test_configuration_errors():
    with pytest.raises(pmlab.ConfigurationError):
        pmlab.run("shjb", seed=1, bogus=1)
    with pytest.raises(pmlab.ConfigurationError):
        pmlab.run("shjb", seed=1, samples=-3)
    with pytest.raises(ValueError):
        pmlab.run("nope", seed=1)


def test_tails_monotone():
    res = pmlab.run("tails", seed=1, samples=200, n_max=8)
    for e in res["epsilons"]:
        ps = [r["P"] for r in e["rows"]]
        assert all(x >= y for x, y in zip(ps, ps[1:]))
        assert e["all_terminal"]
    assert math.isfinite(res["epsilons"][0]["mean_H1"])
