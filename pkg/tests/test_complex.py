import pytest

from floerkit.classify import filtered_equivalent
from floerkit.complex import (
    Differential,
    Generator,
    KnotComplex,
    ViolationKind,
    almost_staircase_1,
    almost_staircase_2,
    box,
    direct_sum,
    figure_eight,
    is_reduced,
    mirror,
    parse,
    reduce,
    render_grid,
    require_valid,
    serialize,
    staircase,
    tensor,
    trefoil,
    unknot,
    validate,
)
from floerkit.errors import BadSteps, InvalidComplex, ParseError

CONSTRUCTED = [
    unknot(),
    trefoil(),
    staircase([2, 1, 1, 2]),
    box(1, 1),
    figure_eight(),
    almost_staircase_1(0),
    almost_staircase_1(1),
    almost_staircase_1(2),
    almost_staircase_1(1, [2, 1]),
    almost_staircase_2(1),
    almost_staircase_2(2),
    tensor(trefoil(), trefoil()),
]


@pytest.mark.parametrize("c", CONSTRUCTED)
def test_constructor_outputs_are_valid(c):
    assert validate(c).ok


@pytest.mark.parametrize("c", CONSTRUCTED)
def test_text_format_round_trips(c):
    assert serialize(parse(serialize(c))) == serialize(c)


@pytest.mark.parametrize("name,build", [
    ("t23.cfk", trefoil),
    ("t2m3.cfk", lambda: almost_staircase_1(0)),
    ("t25.cfk", lambda: staircase([1, 1, 1, 1])),
    ("figure8.cfk", figure_eight),
    ("t23_t23.cfk", lambda: tensor(trefoil(), trefoil())),
])
def test_golden_files_are_byte_stable(golden, name, build):
    text = golden(name)
    assert serialize(build()) == text
    assert serialize(parse(text)) == text


def test_staircase_gradings(t23):
    assert [g.bigrading for g in t23.generators] == [(1, 0), (0, -1), (-1, -2)]
    assert sorted(str(a) for a in t23.arrows) == ["x1 -> U^0 y2", "x1 -> U^1 y1"]


def test_staircase_rejects_bad_steps():
    with pytest.raises(BadSteps):
        staircase([1])
    with pytest.raises(BadSteps):
        staircase([1, 0])
    with pytest.raises(BadSteps):
        staircase([])


def test_box_gradings():
    assert sorted(box(2, 3).bigraded_counts().items()) == [((0, 1), 1), ((1, 2), 2), ((2, 3), 1)]


def test_type_one_almost_staircase_gradings():
    c = almost_staircase_1(1)
    gradings = {g.name: g.bigrading for g in c.generators}
    assert gradings == {
        "x-2": (2, 0), "y-1": (1, -1), "x1": (1, 0), "z": (0, -1),
        "x-1": (-1, -2), "y1": (-1, -3), "x2": (-2, -4),
    }


def test_type_one_with_no_arms_is_mirror_trefoil(t2m3):
    c = almost_staircase_1(0)
    assert c.bigraded_counts() == t2m3.bigraded_counts()


def test_almost_staircase_step_counts():
    with pytest.raises(BadSteps):
        almost_staircase_1(1, [1])
    with pytest.raises(BadSteps):
        almost_staircase_2(0)
    assert len(almost_staircase_2(2, [1, 1, 1])) == 9


def test_mirror_negates_gradings_and_is_an_involution(t23):
    m = mirror(t23)
    assert sorted(g.bigrading for g in m.generators) == [(-1, 0), (0, 1), (1, 2)]
    assert validate(m).ok
    assert mirror(m) == t23


@pytest.mark.parametrize("c", CONSTRUCTED)
def test_mirror_twice_is_the_identity(c):
    twice = mirror(mirror(c))
    assert twice.generators == c.generators
    assert set(twice.arrows) == set(c.arrows)


def test_tensor_of_trefoils_is_reduced(t23_t23):
    assert len(t23_t23) == 9
    assert is_reduced(t23_t23)
    assert serialize(reduce(t23_t23)) == serialize(t23_t23)


def test_tensor_names_never_collide():
    a = KnotComplex([Generator("a", 0, 0), Generator("a.b", 0, 0)], [])
    b = KnotComplex([Generator("b.c", 0, 0), Generator("c", 0, 0)], [])
    c = tensor(a, b)
    assert c.names == ["a.b.c", "a.c", "a.b.b.c", "a.b.c_2"]
    assert validate(c).ok


def test_tensor_is_commutative(t23, t2m3):
    assert filtered_equivalent(tensor(t23, t2m3), tensor(t2m3, t23))
    assert filtered_equivalent(tensor(t23, t23), tensor(t23, t23))


def test_tensor_is_associative(t23, t2m3):
    left = tensor(tensor(t23, unknot()), t2m3)
    right = tensor(t23, tensor(unknot(), t2m3))
    assert filtered_equivalent(left, right)
    assert filtered_equivalent(tensor(tensor(t23, t23), unknot()), tensor(t23, tensor(t23, unknot())))


def test_direct_sum_renames_collisions(t23):
    c = direct_sum(t23, t23)
    assert c.names == ["y1", "x1", "y2", "y1_2", "x1_2", "y2_2"]
    assert validate(c).ok


def test_reduce_cancels_bidegree_preserving_pairs():
    c = parse("gen u A=0 M=0\ngen a A=0 M=1\ngen b A=0 M=0\nd a = b\n")
    assert not is_reduced(c)
    assert reduce(c).names == ["u"]


def test_reduce_keeps_arrows_through_cancelled_pair():
    # cancelling a -> b drops c -> b and leaves w -> c
    c = parse(
        "gen w A=1 M=2\ngen a A=0 M=1\ngen b A=0 M=0\ngen c A=0 M=1\n"
        "d w = a + c\nd a = b\nd c = b\n"
    )
    reduced = reduce(c)
    assert reduced.names == ["w", "c"]
    assert [str(a) for a in reduced.arrows] == ["w -> U^0 c"]


def test_validate_reports_maslov_violation():
    c = parse("gen a A=0 M=0\ngen b A=-1 M=0\nd a = b\n")
    assert validate(c).kinds() == {ViolationKind.MASLOV}
    with pytest.raises(InvalidComplex):
        require_valid(c)


def test_validate_reports_filtration_and_unknown_generators():
    c = parse("gen a A=0 M=0\ngen b A=1 M=-1\nd a = b + c\n")
    assert validate(c).kinds() == {ViolationKind.FILTRATION, ViolationKind.UNKNOWN_GENERATOR}


def test_validate_reports_nonzero_square():
    c = parse("gen a A=1 M=0\ngen b A=0 M=-1\ngen c A=-1 M=-2\nd a = b\nd b = c\n")
    assert validate(c).kinds() == {ViolationKind.D_SQUARED}


def test_validate_reports_duplicates():
    c = KnotComplex.from_dict({
        "generators": [{"name": "a", "alexander": 0, "maslov": 0}] * 2,
        "arrows": [],
    })
    assert validate(c).kinds() == {ViolationKind.DUPLICATE_GENERATOR}


def test_parse_reports_negative_power_position():
    with pytest.raises(ParseError) as info:
        parse("gen a A=0 M=0\ngen b A=0 M=-1\nd a = U^-1 b\n")
    assert info.value.line == 3
    assert info.value.column == 7


def test_parse_rejects_unknown_lines():
    with pytest.raises(ParseError) as info:
        parse("# comment\ngen a A=0 M=0\nedge a b\n")
    assert info.value.line == 3


def test_parse_accepts_comments_and_zero_differential():
    c = parse("gen a A=0 M=0   # lone generator\nd a = 0\n")
    assert c.names == ["a"]
    assert c.arrows == ()


def test_dict_round_trip(fig8):
    assert KnotComplex.from_dict(fig8.to_dict()) == fig8


def test_basis_change_is_an_involution(fig8):
    work = Differential(fig8)
    work.add_to("x3", "u", 0)
    work.add_to("x3", "u", 0)
    assert sorted(work.arrows()) == sorted(fig8.arrows)


def test_render_grid_lists_counts_and_arrows(fig8):
    grid = render_grid(fig8)
    assert grid.splitlines()[0].strip().startswith("A\\M")
    assert "x2 -> U^1 x1" in grid
