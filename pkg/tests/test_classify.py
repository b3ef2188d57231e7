import pytest

from floerkit import config
from floerkit.classify import (
    ComplexClass,
    almost_staircase_templates,
    classify,
    delta0_check,
    filtered_equivalent,
    literal_match,
    simplify,
    staircase_plus_box_templates,
    staircase_template,
)
from floerkit.complex import (
    Differential,
    KnotComplex,
    almost_staircase_1,
    almost_staircase_2,
    box,
    direct_sum,
    serialize,
    staircase,
    unknot,
    validate,
)
from floerkit.errors import NonTermination, TooLarge, WrongClass
from floerkit.invariants import HfkTable, hfk


@pytest.fixture
def scrambled_fig8(fig8):
    """Figure-eight after the filtered basis change x3 -> x3 + u"""
    work = Differential(fig8)
    work.add_to("x3", "u", 0)
    return work.to_complex()


# -----------------------------------------------------------------------------
# Equivalence
# -----------------------------------------------------------------------------

def test_equivalence_is_reflexive(t23, fig8):
    assert filtered_equivalent(t23, t23)
    assert filtered_equivalent(fig8, fig8)
    assert filtered_equivalent(unknot(), unknot())


def test_mirror_trefoil_is_not_equivalent(t23, t2m3):
    assert not filtered_equivalent(t23, t2m3)


def test_basis_change_preserves_equivalence(fig8, scrambled_fig8):
    assert len(scrambled_fig8.arrows) == 6
    assert filtered_equivalent(fig8, scrambled_fig8)
    assert literal_match(fig8, scrambled_fig8) is None


def test_same_gradings_different_homology(fig8):
    bare = KnotComplex(fig8.generators, ())
    assert not filtered_equivalent(fig8, bare)


def test_trefoil_square_is_staircase_plus_box(t23_t23, t25):
    assert filtered_equivalent(t23_t23, direct_sum(t25, box(1, -1)))
    assert not filtered_equivalent(t23_t23, direct_sum(t25, box(1, 1)))


def test_equivalence_refuses_large_inputs():
    big = staircase([1] * 14)
    with pytest.raises(TooLarge) as info:
        filtered_equivalent(big, big)
    assert info.value.size == 15


def test_equivalence_refuses_wide_blocks(monkeypatch, t23_t23, t25):
    monkeypatch.setattr(config, "EQUIVALENCE_BLOCK_BITS", 0)
    with pytest.raises(TooLarge) as info:
        filtered_equivalent(t23_t23, direct_sum(t25, box(1, -1)))
    assert info.value.cap == 0


def test_literal_match_finds_renaming(t23):
    renamed = t23.renamed({"y1": "a", "x1": "b", "y2": "c"})
    assert literal_match(t23, renamed) == {"y1": "a", "x1": "b", "y2": "c"}


# -----------------------------------------------------------------------------
# Simplification
# -----------------------------------------------------------------------------

def test_simplify_leaves_figure_eight_alone(fig8):
    result = simplify(fig8)
    assert result.complete
    assert result.log == []
    assert serialize(result.complex) == serialize(fig8)


def test_simplify_undoes_scrambling(fig8, scrambled_fig8):
    result = simplify(scrambled_fig8)
    assert result.complete
    assert result.log
    assert len(result.complex.arrows) <= len(fig8.arrows)
    assert filtered_equivalent(result.complex, fig8)


def test_simplify_with_fingerprint_checks(monkeypatch, scrambled_fig8):
    monkeypatch.setattr(config, "DEBUG_MODE", True)
    assert simplify(scrambled_fig8).complete


def _diagonal(c: KnotComplex):
    return [a for a in c.arrows
            if a.u_power and c.generator(a.dst).alexander - a.u_power != c.generator(a.src).alexander]


def test_simplify_reaches_literal_staircase_plus_box(t23_t23, t25):
    result = simplify(t23_t23)
    assert result.complete
    assert len(result.complex.arrows) == 8
    assert literal_match(result.complex, direct_sum(t25, box(1, -1))) is not None


def test_simplify_removes_diagonal_pair():
    boxes = direct_sum(box(1, 1), box(1, 3))
    work = Differential(boxes)
    work.add_to("x1", "x1_2", 1)
    tangled = work.to_complex()
    assert validate(tangled).ok
    assert len(_diagonal(tangled)) == 2

    result = simplify(tangled)
    assert result.complete
    assert _diagonal(result.complex) == []
    assert len(result.complex.arrows) == 8
    assert filtered_equivalent(result.complex, boxes)


def test_simplify_budget(monkeypatch, scrambled_fig8):
    monkeypatch.setattr(config, "SIMPLIFY_BUDGET_FACTOR", 0)
    assert not simplify(scrambled_fig8).complete
    with pytest.raises(NonTermination) as info:
        simplify(scrambled_fig8, strict=True)
    assert info.value.partial is not None


# -----------------------------------------------------------------------------
# Templates
# -----------------------------------------------------------------------------

def test_staircase_template(t25):
    assert serialize(staircase_template(hfk(t25))) == serialize(t25)
    assert serialize(staircase_template(hfk(unknot()))) == serialize(unknot())
    assert staircase_template(HfkTable({(1, 0): 1, (0, -1): 1})) is None


def test_box_templates_of_figure_eight(fig8):
    templates = staircase_plus_box_templates(hfk(fig8))
    assert [serialize(t) for t in templates] == [serialize(direct_sum(unknot(), box(1, 1)))]


def test_almost_staircase_templates():
    (kind, template), = almost_staircase_templates(hfk(almost_staircase_1(1)))
    assert kind is ComplexClass.ALMOST_STAIRCASE_1
    assert serialize(template) == serialize(almost_staircase_1(1))
    (kind, _), = almost_staircase_templates(hfk(almost_staircase_2(1)))
    assert kind is ComplexClass.ALMOST_STAIRCASE_2


# -----------------------------------------------------------------------------
# Classification
# -----------------------------------------------------------------------------

def test_classify_lspace_knots(t23, t25):
    result = classify(t23)
    assert result.verdict is ComplexClass.STAIRCASE
    assert result.literal
    assert classify(t25).verdict is ComplexClass.STAIRCASE
    assert result.to_dict()["verdict"] == "Staircase"


def test_classify_staircase_plus_box(fig8, t23_t23, t25_plus_box):
    for c in (fig8, t23_t23, t25_plus_box):
        result = classify(c)
        assert result.verdict is ComplexClass.STAIRCASE_PLUS_BOX
        assert not result.overlap


def test_classify_almost_staircases(t2m3):
    assert classify(t2m3).verdict is ComplexClass.ALMOST_STAIRCASE_1
    assert classify(almost_staircase_1(1)).verdict is ComplexClass.ALMOST_STAIRCASE_1
    assert classify(almost_staircase_2(1)).verdict is ComplexClass.ALMOST_STAIRCASE_2


def test_classify_two_boxes(t25):
    c = direct_sum(direct_sum(t25, box(1, 1)), box(1, 1))
    result = classify(c)
    assert result.verdict is ComplexClass.NOT_ALMOST_LSPACE
    assert result.witness is None


def test_delta0_check(fig8, t23_t23, t25_plus_box, t23):
    assert delta0_check(fig8)
    assert delta0_check(t23_t23)
    assert not delta0_check(t25_plus_box)
    with pytest.raises(WrongClass):
        delta0_check(t23)
