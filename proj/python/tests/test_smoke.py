import math

import pytest

import translocal as tl


def test_catalogue_has_tripling():
    assert "tripling" in [e[0] for e in tl.catalogue()]


def test_unknown_system_raises_config_error():
    with pytest.raises(tl.ConfigError, match="nosuch"):
        tl.make_system("nosuch")


def test_tripling_translocal_entropy():
    sys = tl.make_system("tripling")
    sched = tl.Schedule.make(6, 10, [0.05, 0.02])
    est = tl.translocal_entropy(sys, tl.PhasePoint.circle(0.3), 0.5, sched)
    assert est.upper.value == pytest.approx(math.log(3) - 0.5, rel=0.05)
    assert est.lower.value <= est.upper.value + 1e-9


def test_kraft_golden_mean():
    assert tl.kraft_entropy([1, 2]).h == pytest.approx(math.log((1 + 5**0.5) / 2), abs=1e-9)
    assert tl.kraft_entropy(tl.CodeWordFamily.parse("linear:1,0"), 1e-10).h < math.log(2)


def test_toral_formula():
    assert tl.toral_translocal([[2, 1], [1, 1]], 1.2) == 0.0


def test_brin_katok_bernoulli():
    word = [0, 1, 1, 0] * 100
    r = tl.brin_katok(
        tl.make_system("fullshift:2"),
        tl.Measure.bernoulli([0.5, 0.5]),
        tl.PhasePoint.word(word, 0, len(word)),
        tl.Schedule.make(4, 12, [0.05, 0.02]),
    )
    assert r.upper.value == pytest.approx(math.log(2), rel=0.05)


def test_bad_schedule_raises():
    with pytest.raises(tl.ContractViolation):
        tl.Schedule.make(5, 3, [0.05])
