import pytest

from floerkit.complex import almost_staircase_1, box, direct_sum, trefoil, unknot
from floerkit.errors import BadSample, NotCoprime, ParityFailure, WrongClass
from floerkit.surgery import (
    PegboardParams,
    Verdict,
    canonical_slope,
    detect,
    parse_slope,
    pegboard_params,
    stability_check,
    surgery_rank,
)


def test_pegboard_params_of_small_knots(t23, t2m3, fig8, t25):
    assert pegboard_params(t23) == PegboardParams(1, 1)
    assert pegboard_params(t2m3) == PegboardParams(-1, 1)
    assert pegboard_params(fig8) == PegboardParams(0, 2)
    assert pegboard_params(t25) == PegboardParams(3, 3)


def test_pegboard_params_of_almost_staircase():
    assert pegboard_params(almost_staircase_1(1)) == PegboardParams(3, 5)


def test_pegboard_params_reject_odd_excess():
    # the extra unknot summand adds one to every hook, so R+ = 3
    with pytest.raises(ParityFailure):
        pegboard_params(direct_sum(trefoil(), unknot()))


def test_trefoil_surgeries(t23):
    params = pegboard_params(t23)
    assert surgery_rank(params, 1, 1) == 1      # Poincare sphere
    assert surgery_rank(params, -1, 1) == 3
    assert surgery_rank(params, 5, 1) == 5
    assert surgery_rank(params, 3, -2) == surgery_rank(params, -3, 2)


def test_canonical_slope():
    assert canonical_slope(3, -2) == (-3, 2)
    assert canonical_slope(0, 1) == (0, 1)
    with pytest.raises(NotCoprime):
        canonical_slope(4, 2)
    with pytest.raises(NotCoprime):
        canonical_slope(1, 0)


def test_parse_slope():
    assert parse_slope("7/2") == (7, 2)
    assert parse_slope(" 5 ") == (5, 1)
    assert parse_slope("-3/2") == (-3, 2)
    with pytest.raises(NotCoprime):
        parse_slope("seven")


def test_detect_verdicts(t23, t2m3, fig8, t25, t25_plus_box):
    assert detect(t23).verdict is Verdict.LSPACE
    assert detect(t25).verdict is Verdict.LSPACE
    assert detect(t2m3).verdict is Verdict.ALMOST_LSPACE
    assert detect(fig8).verdict is Verdict.ALMOST_LSPACE
    assert detect(t25_plus_box).verdict is Verdict.ALMOST_LSPACE


def test_detect_neither_for_two_boxes(t25):
    c = direct_sum(direct_sum(t25, box(1, 1)), box(1, 1))
    detection = detect(c)
    assert detection.verdict is Verdict.NEITHER
    assert detection.witness.excess_at() == {0: 4}


def test_detect_reports_empty_hooks():
    detection = detect(box(1, 1))
    assert detection.verdict is Verdict.NEITHER
    assert detection.witness.excess_at() == {-1: -1, 0: 1, 1: -1}


def test_detection_text(fig8, t23):
    assert str(detect(fig8)) == "AlmostLSpace; hook profile {0:3, ±1:1}"
    assert str(detect(t23)) == "LSpace; hook profile {0:1, ±1:1}"
    assert detect(fig8).to_dict()["verdict"] == "AlmostLSpace"


def test_stability_for_almost_lspace_knots(fig8):
    report = stability_check(fig8, [(1, 1), (5, 2), (9, 4)])
    assert report.ok
    assert [r.expected for r in report.results] == [3, 9, 17]
    assert report.boundary is None

    report = stability_check(almost_staircase_1(1), [(3, 1), (7, 2), (4, 1)])
    assert report.ok


def test_stability_for_lspace_knot_checks_boundary(t25):
    report = stability_check(t25, [(3, 1), (7, 2), (10, 1)])
    assert report.ok
    assert report.boundary.p == 2
    assert report.boundary.actual == 4


def test_stability_rejects_out_of_range_samples(fig8, t25):
    with pytest.raises(BadSample):
        stability_check(fig8, [(0, 1)])
    with pytest.raises(BadSample):
        stability_check(t25, [(2, 1)])


def test_stability_rejects_neither(t25):
    c = direct_sum(direct_sum(t25, box(1, 1)), box(1, 1))
    with pytest.raises(WrongClass):
        stability_check(c, [(5, 1)])
