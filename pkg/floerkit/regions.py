"""
Floerkit - Regions Module

Subquotient complexes C(S) of the plane picture. A region is a union of
axis-aligned clauses; it is usable when it is the difference of two
downward-closed sets and meets every generator diagonal finitely. Both
conditions are decided on a compressed grid of cells cut at the clause
bounds.

Also verifies long exact sequences of region inclusions and the (i, j)
reflection symmetry of knot-like complexes.
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from floerkit.algebra import (
    BitMatrix,
    GradedHomology,
    HomologyBasis,
    f2_rank,
    graded_homology,
    homology_basis,
)
from floerkit.complex import KnotComplex, LatticePoint, reduce
from floerkit.errors import ExactnessFailure, Infinite, NotSubquotient, ParseError

logger = logging.getLogger(__name__)

Box = Tuple[Optional[int], Optional[int], Optional[int], Optional[int]]  # ilo, ihi, jlo, jhi


# =============================================================================
# REGION GRAMMAR
# =============================================================================

@dataclass(frozen=True)
class Constraint:
    axis: str   # "i" or "j"
    op: str     # "<=", "=", ">="
    value: int

    def holds(self, i: int, j: int) -> bool:
        x = i if self.axis == "i" else j
        if self.op == "<=":
            return x <= self.value
        if self.op == ">=":
            return x >= self.value
        return x == self.value

    def __str__(self) -> str:
        return f"{self.axis}{self.op}{self.value}"


CONSTRAINT = re.compile(r"^\s*([ij])\s*(<=|>=|==|=|<|>)\s*([+-]?\d+)\s*$")


@dataclass(frozen=True)
class Region:
    """Union of clauses; each clause is a conjunction of constraints"""

    clauses: Tuple[Tuple[Constraint, ...], ...] = ()

    @classmethod
    def of(cls, *clauses: Iterable[Constraint]) -> "Region":
        return cls(tuple(tuple(cl) for cl in clauses))

    @classmethod
    def parse(cls, text: str) -> "Region":
        """'i<=0,j=2 | i=0,j<=1'; strict inequalities become non-strict"""
        text = text.strip()
        if not text or text == "empty":
            return cls()
        clauses = []
        column = 1
        for chunk in text.split("|"):
            constraints = []
            for part in chunk.split(","):
                match = CONSTRAINT.match(part)
                if not match:
                    raise ParseError(f"bad region constraint {part.strip()!r}", 1, column)
                axis, op, value = match.group(1), match.group(2), int(match.group(3))
                if op == "<":
                    op, value = "<=", value - 1
                elif op == ">":
                    op, value = ">=", value + 1
                elif op == "==":
                    op = "="
                constraints.append(Constraint(axis, op, value))
                column += len(part) + 1
            clauses.append(tuple(constraints))
        return cls(tuple(clauses))

    def contains(self, i: int, j: int) -> bool:
        return any(all(c.holds(i, j) for c in clause) for clause in self.clauses)

    def boxes(self) -> List[Box]:
        """Nonempty clause boxes, None marking an unbounded side"""
        result = []
        for clause in self.clauses:
            bounds = {"i": [None, None], "j": [None, None]}
            for c in clause:
                lo, hi = bounds[c.axis]
                if c.op in (">=", "="):
                    lo = c.value if lo is None else max(lo, c.value)
                if c.op in ("<=", "="):
                    hi = c.value if hi is None else min(hi, c.value)
                bounds[c.axis] = [lo, hi]
            (ilo, ihi), (jlo, jhi) = bounds["i"], bounds["j"]
            if (ilo is not None and ihi is not None and ilo > ihi) or \
                    (jlo is not None and jhi is not None and jlo > jhi):
                continue
            result.append((ilo, ihi, jlo, jhi))
        return result

    def swap(self) -> "Region":
        """Image under (i, j) -> (j, i)"""
        flip = {"i": "j", "j": "i"}
        return Region(tuple(
            tuple(Constraint(flip[c.axis], c.op, c.value) for c in clause)
            for clause in self.clauses
        ))

    def __or__(self, other: "Region") -> "Region":
        return Region(self.clauses + other.clauses)

    def __str__(self) -> str:
        if not self.clauses:
            return "empty"
        return " | ".join(",".join(str(c) for c in clause) for clause in self.clauses)


def region_x(m: int) -> Region:
    return Region.parse(f"i<=0,j={m}")


def region_y(m: int) -> Region:
    return Region.parse(f"i=0,j<={m - 1}")


def region_ux(m: int) -> Region:
    return Region.parse(f"i<0,j={m - 1}")


def point_region(i: int, j: int) -> Region:
    return Region.parse(f"i={i},j={j}")


def column_region(i: int = 0) -> Region:
    return Region.parse(f"i={i}")


def row_region(j: int = 0) -> Region:
    return Region.parse(f"j={j}")


def hook_region(s: int) -> Region:
    """{max(i, j - s) = 0}: one lattice point per generator"""
    return Region.parse(f"i=0,j<={s} | i<=0,j={s}")


def sublevel_region(s: int) -> Region:
    return Region.parse(f"i=0,j<={s}")


# =============================================================================
# VALIDITY CHECKS
# =============================================================================

def _cuts(boxes: Sequence[Box], axis: int) -> List[int]:
    """Cut c splits the axis between c and c + 1"""
    cuts = set()
    for b in boxes:
        lo, hi = b[2 * axis], b[2 * axis + 1]
        if lo is not None:
            cuts.add(lo - 1)
        if hi is not None:
            cuts.add(hi)
    return sorted(cuts)


def _representatives(cuts: List[int]) -> List[int]:
    if not cuts:
        return [0]
    return [cuts[0]] + [c + 1 for c in cuts]


def _cell_masks(regions: Sequence[Region]) -> List[np.ndarray]:
    boxes = [b for r in regions for b in r.boxes()]
    i_reps = _representatives(_cuts(boxes, 0))
    j_reps = _representatives(_cuts(boxes, 1))
    return [
        np.array([[r.contains(i, j) for j in j_reps] for i in i_reps], dtype=bool)
        for r in regions
    ]


def _down_closure(mask: np.ndarray) -> np.ndarray:
    closed = np.flip(np.logical_or.accumulate(np.flip(mask, 0), axis=0), 0)
    return np.flip(np.logical_or.accumulate(np.flip(closed, 1), axis=1), 1)


def _up_closure(mask: np.ndarray) -> np.ndarray:
    closed = np.logical_or.accumulate(mask, axis=0)
    return np.logical_or.accumulate(closed, axis=1)


def check_region(r: Region):
    """Raises Infinite or NotSubquotient when r cannot carry a finite C(S)"""
    for ilo, ihi, jlo, jhi in r.boxes():
        if (ihi is None and jhi is None) or (ilo is None and jlo is None):
            raise Infinite(f"region {r} meets generator diagonals infinitely often")
    (mask,) = _cell_masks([r])
    if not np.array_equal(_down_closure(mask) & _up_closure(mask), mask):
        raise NotSubquotient(f"region {r} is not a difference of downward-closed sets")


def check_subcomplex(sub: Region, total: Region):
    """sub must lie in total and be downward closed inside it"""
    check_region(sub)
    check_region(total)
    s, t = _cell_masks([sub, total])
    if (s & ~t).any():
        raise NotSubquotient(f"{sub} is not contained in {total}")
    if (_down_closure(s) & t & ~s).any():
        raise NotSubquotient(f"{sub} is not a subcomplex of {total}")


# =============================================================================
# REGION COMPLEXES
# =============================================================================

@dataclass
class RegionComplex:
    points: List[LatticePoint]
    differential: BitMatrix   # rows are targets

    @property
    def maslov(self) -> List[int]:
        return [p.maslov for p in self.points]

    def homology(self) -> GradedHomology:
        return graded_homology(self.maslov, self.differential)


def _k_range(alexander: int, b: Box) -> Tuple[int, int]:
    ilo, ihi, jlo, jhi = b
    lows = [x for x in (None if ihi is None else -ihi, None if jhi is None else alexander - jhi) if x is not None]
    highs = [x for x in (None if ilo is None else -ilo, None if jlo is None else alexander - jlo) if x is not None]
    return max(lows), min(highs)


def region_complex(c: KnotComplex, r: Region) -> RegionComplex:
    check_region(r)
    boxes = r.boxes()
    points: List[LatticePoint] = []
    for gen in c.generators:
        ks = set()
        for b in boxes:
            lo, hi = _k_range(gen.alexander, b)
            ks.update(range(lo, hi + 1))
        points.extend(LatticePoint.of(gen, k) for k in sorted(ks))
    where = {(p.name, p.k): n for n, p in enumerate(points)}
    entries = []
    for a in c.arrows:
        for p in points:
            if p.name != a.src:
                continue
            target = where.get((a.dst, p.k + a.u_power))
            if target is not None:
                entries.append((target, where[(p.name, p.k)]))
    return RegionComplex(points, BitMatrix.from_entries(len(points), len(points), entries))


def region_homology(c: KnotComplex, r: Region) -> GradedHomology:
    return region_complex(c, r).homology()


# =============================================================================
# EXACT TRIANGLES
# =============================================================================

@dataclass
class _Graded:
    """Per-degree homology bases of a finite complex"""
    indices: Dict[int, List[int]]
    bases: Dict[int, HomologyBasis]

    def rank(self, d: int) -> int:
        return self.bases[d].rank if d in self.bases else 0

    def homology(self) -> GradedHomology:
        return GradedHomology({d: b.rank for d, b in self.bases.items()})


def _graded_bases(maslov: Sequence[int], dense: np.ndarray) -> _Graded:
    by_degree: Dict[int, List[int]] = {}
    for idx, d in enumerate(maslov):
        by_degree.setdefault(d, []).append(idx)

    def block(rows, cols):
        if not rows or not cols:
            return BitMatrix.zeros(len(rows), len(cols))
        return BitMatrix.from_dense(dense[np.ix_(rows, cols)])

    bases = {}
    for d, cols in by_degree.items():
        d_out = block(by_degree.get(d - 1, []), cols)
        d_in = block(cols, by_degree.get(d + 1, []))
        bases[d] = homology_basis(d_in, d_out)
    return _Graded(by_degree, bases)


def _mod2(matrix: np.ndarray) -> np.ndarray:
    return (matrix.astype(np.int64) & 1).astype(np.uint8)


def _compose(after: np.ndarray, before: np.ndarray) -> np.ndarray:
    if after.shape[1] == 0 or before.shape[0] == 0:
        return np.zeros((after.shape[0], before.shape[1]), dtype=np.uint8)
    return _mod2(after.astype(np.int64) @ before.astype(np.int64))


def _rank(matrix: np.ndarray) -> int:
    if matrix.size == 0:
        return 0
    return f2_rank(BitMatrix.from_dense(matrix))


@dataclass
class TriangleReport:
    sub: str
    total: str
    sub_homology: GradedHomology
    total_homology: GradedHomology
    quotient_homology: GradedHomology
    inclusion_ranks: Dict[int, int] = field(default_factory=dict)
    projection_ranks: Dict[int, int] = field(default_factory=dict)
    connecting_ranks: Dict[int, int] = field(default_factory=dict)
    maslov_ok: bool = True
    failures: List[str] = field(default_factory=list)
    connecting: Dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def exact(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict:
        return {
            "sub": self.sub,
            "total": self.total,
            "sub_homology": self.sub_homology.to_dict(),
            "total_homology": self.total_homology.to_dict(),
            "quotient_homology": self.quotient_homology.to_dict(),
            "inclusion_ranks": {str(d): r for d, r in sorted(self.inclusion_ranks.items())},
            "projection_ranks": {str(d): r for d, r in sorted(self.projection_ranks.items())},
            "connecting_ranks": {str(d): r for d, r in sorted(self.connecting_ranks.items())},
            "maslov_ok": self.maslov_ok,
            "exact": self.exact,
            "failures": list(self.failures),
        }


def exact_triangle(c: KnotComplex, sub: Region, total: Region) -> TriangleReport:
    """H(sub) -> H(total) -> H(total minus sub) -> H(sub)[-1], checked for exactness"""
    check_subcomplex(sub, total)
    whole = region_complex(c, total)
    inner = region_complex(c, sub)
    position = {(p.name, p.k): n for n, p in enumerate(whole.points)}
    sub_idx = [position[(p.name, p.k)] for p in inner.points]
    sub_set = set(sub_idx)
    quot_idx = [n for n in range(len(whole.points)) if n not in sub_set]

    dense = whole.differential.to_dense() if whole.points else np.zeros((0, 0), dtype=np.uint8)
    maslov = np.array(whole.maslov, dtype=np.int64)
    S = _graded_bases(maslov[sub_idx].tolist(), dense[np.ix_(sub_idx, sub_idx)])
    T = _graded_bases(maslov.tolist(), dense)
    Q = _graded_bases(maslov[quot_idx].tolist(), dense[np.ix_(quot_idx, quot_idx)])

    report = TriangleReport(str(sub), str(total), S.homology(), T.homology(), Q.homology())
    degrees = sorted(set(S.indices) | set(T.indices) | set(Q.indices))

    inclusion, projection = {}, {}
    for d in degrees:
        # inclusion H_d(sub) -> H_d(total)
        cols = []
        for rep in (S.bases[d].representatives if d in S.bases else []):
            vec = np.zeros(len(whole.points), dtype=np.uint8)
            vec[[sub_idx[k] for k in S.indices[d]]] = rep
            cols.append(T.bases[d].coordinates(vec[T.indices[d]]))
        inclusion[d] = np.array(cols, dtype=np.uint8).reshape(len(cols), T.rank(d)).T
        # projection H_d(total) -> H_d(quotient)
        cols = []
        for rep in (T.bases[d].representatives if d in T.bases else []):
            vec = np.zeros(len(whole.points), dtype=np.uint8)
            vec[T.indices[d]] = rep
            if d not in Q.bases:
                cols.append(np.zeros(0, dtype=np.uint8))
                continue
            cols.append(Q.bases[d].coordinates(vec[[quot_idx[k] for k in Q.indices[d]]]))
        projection[d] = np.array(cols, dtype=np.uint8).reshape(len(cols), Q.rank(d)).T
        # connecting H_d(quotient) -> H_{d-1}(sub), lifting by zero extension
        cols = []
        for rep in (Q.bases[d].representatives if d in Q.bases else []):
            vec = np.zeros(len(whole.points), dtype=np.uint8)
            vec[[quot_idx[k] for k in Q.indices[d]]] = rep
            image = _mod2(dense.astype(np.int64) @ vec.astype(np.int64))
            support = np.nonzero(image)[0]
            if any(maslov[n] != d - 1 for n in support):
                report.maslov_ok = False
            if any(n not in sub_set for n in support):
                report.failures.append(f"lift of a degree-{d} quotient cycle leaves the subcomplex")
                continue
            sub_positions = [sub_idx[k] for k in S.indices.get(d - 1, [])]
            cols.append(S.bases[d - 1].coordinates(image[sub_positions]) if S.rank(d - 1) else
                        np.zeros(0, dtype=np.uint8))
        report.connecting[d] = np.array(cols, dtype=np.uint8).reshape(len(cols), S.rank(d - 1)).T

    for d in degrees:
        i_d, p_d, delta_d = inclusion[d], projection[d], report.connecting[d]
        delta_up = report.connecting.get(d + 1, np.zeros((S.rank(d), 0), dtype=np.uint8))
        report.inclusion_ranks[d] = _rank(i_d)
        report.projection_ranks[d] = _rank(p_d)
        report.connecting_ranks[d] = _rank(delta_d)
        checks = [
            (_compose(p_d, i_d), report.inclusion_ranks[d] + report.projection_ranks[d], T.rank(d),
             f"H_{d}(total)"),
            (_compose(delta_d, p_d), report.projection_ranks[d] + report.connecting_ranks[d], Q.rank(d),
             f"H_{d}(quotient)"),
            (_compose(i_d, delta_up), _rank(delta_up) + report.inclusion_ranks[d], S.rank(d),
             f"H_{d}(sub)"),
        ]
        for composite, rank_sum, dimension, where in checks:
            if composite.any() or rank_sum != dimension:
                report.failures.append(f"not exact at {where}")

    if report.failures or not report.maslov_ok:
        raise ExactnessFailure(f"{sub} -> {total}: {'; '.join(report.failures) or 'Maslov shift'}")
    return report


@dataclass
class TriangleSuiteReport:
    m: int
    first: TriangleReport      # UX_m -> UX_m | Y_m -> Y_m
    second: TriangleReport     # Y_m -> X_m | Y_m -> X_m
    row: TriangleReport        # {i<0,j=m} -> {i<=0,j=m} -> {(0,m)}
    composite_zero: bool

    def to_dict(self) -> Dict:
        return {
            "m": self.m,
            "first": self.first.to_dict(),
            "second": self.second.to_dict(),
            "row": self.row.to_dict(),
            "composite_zero": self.composite_zero,
        }


def triangle_suite(c: KnotComplex, m: int) -> TriangleSuiteReport:
    """Both triangles of the X_m / Y_m / UX_m double triangle plus the row triangle"""
    first = exact_triangle(c, region_ux(m), region_ux(m) | region_y(m))
    second = exact_triangle(c, region_y(m), region_x(m) | region_y(m))
    row = exact_triangle(c, Region.parse(f"i<0,j={m}"), region_x(m))
    composite_zero = True
    for d, to_y in second.connecting.items():
        to_ux = first.connecting.get(d - 1)
        if to_ux is None or to_y.size == 0 or to_ux.size == 0:
            continue
        if _compose(to_ux, to_y).any():
            composite_zero = False
    return TriangleSuiteReport(m, first, second, row, composite_zero)


def lemma_bound_holds(c: KnotComplex, m: int) -> bool:
    """When H(X_m | Y_m) has rank 1 and H(UX_m | Y_m) rank 3, H(X_m) has rank 1 or 2"""
    if region_homology(c, region_x(m) | region_y(m)).total != 1:
        return True
    if region_homology(c, region_ux(m) | region_y(m)).total != 3:
        return True
    return 1 <= region_homology(c, region_x(m)).total <= 2


def parity_split_holds(c: KnotComplex) -> bool:
    """Exactly one of H(X_2), H(Y_2) is a single F_d with d even: Y_2 when the
    generator of least Alexander grading >= 2 has odd Maslov grading, X_2 when even.

    Read off the reduced complex; nothing at Alexander >= 2 passes trivially.
    """
    above = [g for g in reduce(c).generators if g.alexander >= 2]
    if not above:
        return True
    lowest = min(above, key=lambda g: g.alexander)
    occupied, empty = region_y(2), region_x(2)
    if lowest.maslov % 2 == 0:
        occupied, empty = empty, occupied
    if region_homology(c, empty).total:
        return False
    ranks = region_homology(c, occupied).ranks
    return len(ranks) == 1 and all(r == 1 and d % 2 == 0 for d, r in ranks.items())


# =============================================================================
# SYMMETRY
# =============================================================================

def suite_radius(c: KnotComplex) -> int:
    return max((abs(g.alexander) for g in c.generators), default=0)


def standard_suite(radius: int) -> List[Region]:
    """X_m, Y_m, hooks and off-diagonal single points out to the given radius"""
    regions: List[Region] = []
    bound = radius + 1
    for m in range(-bound, bound + 1):
        regions += [region_x(m), region_y(m), hook_region(m)]
    for i in range(-bound, bound + 1):
        for j in range(i + 1, bound + 1):
            regions.append(point_region(i, j))
    return regions


@dataclass
class SymmetryFailure:
    region: str
    swapped: str
    left: GradedHomology
    right: GradedHomology

    def to_dict(self) -> Dict:
        return {"region": self.region, "swapped": self.swapped,
                "left": self.left.to_dict(), "right": self.right.to_dict()}


@dataclass
class SymmetryReport:
    checked: int = 0
    failures: List[SymmetryFailure] = field(default_factory=list)

    @property
    def symmetric(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict:
        return {"checked": self.checked, "symmetric": self.symmetric,
                "failures": [f.to_dict() for f in self.failures]}


def symmetry_check(c: KnotComplex, radius: Optional[int] = None) -> SymmetryReport:
    """Compares graded homology of each suite region with its (i, j) reflection"""
    radius = suite_radius(c) if radius is None else radius
    report = SymmetryReport()
    for region in standard_suite(radius):
        swapped = region.swap()
        left, right = region_homology(c, region), region_homology(c, swapped)
        report.checked += 1
        if left != right:
            report.failures.append(SymmetryFailure(str(region), str(swapped), left, right))
    if report.failures:
        logger.debug(f"symmetry check: {len(report.failures)} of {report.checked} regions differ")
    return report


def fingerprint(c: KnotComplex, radius: int) -> Tuple[Tuple[str, Tuple], ...]:
    """Graded homology of every suite region and its reflection"""
    prints = []
    for region in standard_suite(radius):
        for r in (region, region.swap()):
            prints.append((str(r), tuple(sorted(region_homology(c, r).ranks.items()))))
    return tuple(prints)
