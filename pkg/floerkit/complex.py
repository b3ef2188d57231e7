"""
Floerkit - Complex Module

The CFK-infinity data model. A KnotComplex stores one generator per
F[U,U^-1]-basis element at U-power 0, with its Alexander and Maslov
gradings, plus the arrows of the differential. The translate U^k x sits
at plane position (i, j) = (-k, A(x) - k) with Maslov M(x) - 2k.

Also holds the template constructors (staircase, box, almost staircases),
mirror, tensor product, direct sum, filtered reduction and the text format.
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from floerkit.algebra import BitMatrix, graded_homology
from floerkit.errors import BadSteps, InvalidComplex, ParseError

logger = logging.getLogger(__name__)


# =============================================================================
# DATA MODEL
# =============================================================================

@dataclass(frozen=True)
class Generator:
    name: str
    alexander: int
    maslov: int

    @property
    def bigrading(self) -> Tuple[int, int]:
        return (self.alexander, self.maslov)


@dataclass(frozen=True, order=True)
class Arrow:
    """Component U^u_power * dst of the differential of src"""
    src: str
    dst: str
    u_power: int = 0

    def __str__(self) -> str:
        return f"{self.src} -> U^{self.u_power} {self.dst}"


@dataclass(frozen=True)
class LatticePoint:
    """U^k x placed in the (i, j) plane"""
    name: str
    k: int
    i: int
    j: int
    maslov: int

    @classmethod
    def of(cls, gen: Generator, k: int) -> "LatticePoint":
        return cls(gen.name, k, -k, gen.alexander - k, gen.maslov - 2 * k)


@dataclass(frozen=True)
class KnotComplex:
    generators: Tuple[Generator, ...] = ()
    arrows: Tuple[Arrow, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "arrows", tuple(self.arrows))

    @cached_property
    def index(self) -> Dict[str, int]:
        positions: Dict[str, int] = {}
        for pos, gen in enumerate(self.generators):
            positions.setdefault(gen.name, pos)
        return positions

    @property
    def names(self) -> List[str]:
        return [g.name for g in self.generators]

    def __len__(self) -> int:
        return len(self.generators)

    def generator(self, name: str) -> Generator:
        return self.generators[self.index[name]]

    def arrows_from(self, name: str) -> List[Arrow]:
        return [a for a in self.arrows if a.src == name]

    def bigraded_counts(self) -> Counter:
        return Counter(g.bigrading for g in self.generators)

    def alexander_span(self) -> Tuple[int, int]:
        if not self.generators:
            return (0, 0)
        values = [g.alexander for g in self.generators]
        return (min(values), max(values))

    def renamed(self, mapping: Dict[str, str]) -> "KnotComplex":
        gens = [Generator(mapping.get(g.name, g.name), g.alexander, g.maslov) for g in self.generators]
        arrows = [Arrow(mapping.get(a.src, a.src), mapping.get(a.dst, a.dst), a.u_power) for a in self.arrows]
        return KnotComplex(gens, arrows)

    def to_dict(self) -> Dict:
        return {
            "generators": [
                {"name": g.name, "alexander": g.alexander, "maslov": g.maslov}
                for g in self.generators
            ],
            "arrows": [
                {"src": a.src, "dst": a.dst, "u_power": a.u_power} for a in self.arrows
            ],
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "KnotComplex":
        gens = [Generator(g["name"], int(g["alexander"]), int(g["maslov"])) for g in data.get("generators", [])]
        arrows = [Arrow(a["src"], a["dst"], int(a.get("u_power", 0))) for a in data.get("arrows", [])]
        return cls(gens, arrows)


# =============================================================================
# VALIDATION
# =============================================================================

class ViolationKind(Enum):
    DUPLICATE_GENERATOR = "DuplicateGenerator"
    UNKNOWN_GENERATOR = "UnknownGenerator"
    NEGATIVE_POWER = "NegativePower"
    FILTRATION = "FiltrationViolation"
    MASLOV = "MaslovViolation"
    DUPLICATE_ARROW = "DuplicateArrow"
    D_SQUARED = "DSquaredNonzero"


@dataclass
class Violation:
    kind: ViolationKind
    message: str
    arrow: Optional[Arrow] = None
    pair: Optional[Tuple[str, str]] = None

    def __str__(self) -> str:
        return f"{self.kind.value}: {self.message}"

    def to_dict(self) -> Dict:
        data = {"kind": self.kind.value, "message": self.message}
        if self.arrow is not None:
            data["arrow"] = {"src": self.arrow.src, "dst": self.arrow.dst, "u_power": self.arrow.u_power}
        if self.pair is not None:
            data["pair"] = list(self.pair)
        return data


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> Set[ViolationKind]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> Dict:
        return {"valid": self.ok, "violations": [v.to_dict() for v in self.violations]}


def validate(c: KnotComplex) -> ValidationReport:
    """Checks every arrow invariant and d^2 = 0; never raises"""
    report = ValidationReport()
    seen: Set[str] = set()
    for g in c.generators:
        if g.name in seen:
            report.violations.append(Violation(
                ViolationKind.DUPLICATE_GENERATOR, f"generator {g.name} declared twice"))
        seen.add(g.name)

    counts = Counter(c.arrows)
    for arrow, n in sorted(counts.items()):
        if n > 1:
            report.violations.append(Violation(
                ViolationKind.DUPLICATE_ARROW, f"{arrow} appears {n} times", arrow=arrow))

    known: List[Arrow] = []
    for arrow in c.arrows:
        missing = [name for name in (arrow.src, arrow.dst) if name not in c.index]
        if missing:
            report.violations.append(Violation(
                ViolationKind.UNKNOWN_GENERATOR, f"{arrow} mentions unknown {', '.join(missing)}",
                arrow=arrow))
            continue
        known.append(arrow)
        src, dst = c.generator(arrow.src), c.generator(arrow.dst)
        a = arrow.u_power
        if a < 0:
            report.violations.append(Violation(
                ViolationKind.NEGATIVE_POWER, f"{arrow} has negative U power", arrow=arrow))
        if dst.alexander - a > src.alexander:
            report.violations.append(Violation(
                ViolationKind.FILTRATION,
                f"{arrow} raises the j-filtration ({dst.alexander - a} > {src.alexander})",
                arrow=arrow))
        if dst.maslov - 2 * a != src.maslov - 1:
            report.violations.append(Violation(
                ViolationKind.MASLOV,
                f"{arrow} lands in Maslov {dst.maslov - 2 * a}, expected {src.maslov - 1}",
                arrow=arrow))

    outgoing: Dict[str, List[Arrow]] = {}
    for arrow in known:
        outgoing.setdefault(arrow.src, []).append(arrow)
    for x in c.names:
        paths: Counter = Counter()
        for first in outgoing.get(x, []):
            for second in outgoing.get(first.dst, []):
                paths[(second.dst, first.u_power + second.u_power)] += 1
        for (z, t), n in sorted(paths.items()):
            if n % 2:
                report.violations.append(Violation(
                    ViolationKind.D_SQUARED,
                    f"d^2 {x} has coefficient U^{t} on {z} ({n} paths)", pair=(x, z)))
    return report


def require_valid(c: KnotComplex) -> KnotComplex:
    report = validate(c)
    if not report.ok:
        raise InvalidComplex(report)
    return c


# =============================================================================
# MUTABLE DIFFERENTIAL (used by reduction and basis changes)
# =============================================================================

class Differential:
    """Working copy of a complex's differential with F_2 toggling"""

    def __init__(self, c: KnotComplex):
        self.gens: Dict[str, Generator] = {g.name: g for g in c.generators}
        self.order: List[str] = [g.name for g in c.generators]
        self.out: Dict[str, Set[Tuple[str, int]]] = {name: set() for name in self.order}
        self.inc: Dict[str, Set[Tuple[str, int]]] = {name: set() for name in self.order}
        for a in c.arrows:
            self.toggle(a.src, a.dst, a.u_power)

    def toggle(self, src: str, dst: str, power: int):
        key = (dst, power)
        if key in self.out[src]:
            self.out[src].remove(key)
            self.inc[dst].remove((src, power))
        else:
            self.out[src].add(key)
            self.inc[dst].add((src, power))

    def remove(self, name: str):
        for dst, p in list(self.out[name]):
            self.toggle(name, dst, p)
        for src, p in list(self.inc[name]):
            self.toggle(src, name, p)
        del self.out[name], self.inc[name], self.gens[name]
        self.order.remove(name)

    def arrow_count(self) -> int:
        return sum(len(v) for v in self.out.values())

    def arrows(self) -> List[Arrow]:
        pos = {name: k for k, name in enumerate(self.order)}
        found = [Arrow(src, dst, p) for src in self.order for dst, p in self.out[src]]
        return sorted(found, key=lambda a: (pos[a.src], pos[a.dst], a.u_power))

    def cancel(self, x: str, y: str):
        """Gaussian elimination of the U^0 arrow x -> y"""
        preds = [(w, p) for w, p in self.inc[y] if w != x]
        succs = [(z, q) for z, q in self.out[x] if z != y]
        for w, p in preds:
            for z, q in succs:
                self.toggle(w, z, p + q)
        self.remove(x)
        self.remove(y)

    def add_to(self, target: str, source: str, power: int):
        """Filtered basis change target' = target + U^power source"""
        for dst, q in list(self.out[source]):
            self.toggle(target, dst, q + power)
        for w, p in list(self.inc[target]):
            self.toggle(w, source, p + power)

    def to_complex(self) -> KnotComplex:
        return KnotComplex([self.gens[n] for n in self.order], self.arrows())


# =============================================================================
# CONSTRUCTORS
# =============================================================================

def _normalize_maslov(gens: List[Generator], arrows: List[Arrow]) -> List[Generator]:
    """Shifts Maslov so the homology of the i=0 column sits in degree 0"""
    index = {g.name: k for k, g in enumerate(gens)}
    entries = [(index[a.dst], index[a.src]) for a in arrows if a.u_power == 0]
    column = BitMatrix.from_entries(len(gens), len(gens), entries)
    homology = graded_homology([g.maslov for g in gens], column)
    if homology.total != 1:
        logger.debug(f"column homology {homology} is not rank one; Maslov left unshifted")
        return gens
    (degree,) = homology.ranks
    return [Generator(g.name, g.alexander, g.maslov - degree) for g in gens]


def _from_lattice(points: Sequence[Tuple[str, int, int, int]],
                  edges: Iterable[Tuple[str, str]]) -> KnotComplex:
    """Builds a complex from generators drawn at plane points.

    points: (name, i, j, relative Maslov at that point); edges: (src, dst).
    """
    where = {name: (i, j, level) for name, i, j, level in points}
    gens = [Generator(name, j - i, level - 2 * i) for name, i, j, level in points]
    arrows = [Arrow(src, dst, where[src][0] - where[dst][0]) for src, dst in edges]
    return KnotComplex(_normalize_maslov(gens, arrows), arrows)


def _check_steps(steps: Sequence[int], length: int, what: str):
    if len(steps) != length:
        raise BadSteps(f"{what} needs {length} steps, got {len(steps)}")
    bad = [s for s in steps if int(s) != s or s <= 0]
    if bad:
        raise BadSteps(f"{what} steps must be positive integers, got {list(steps)}")


def staircase(steps: Sequence[int]) -> KnotComplex:
    """Staircase walking down from y1: horizontal h1, vertical v1, h2, v2, ..."""
    steps = list(steps)
    if not steps or len(steps) % 2:
        raise BadSteps(f"staircase needs a nonempty even-length step list, got {steps}")
    _check_steps(steps, len(steps), "staircase")
    horizontal, vertical = steps[0::2], steps[1::2]

    alexander, maslov = sum(vertical), 0
    gens = [Generator("y1", alexander, maslov)]
    arrows = []
    for k, (h, v) in enumerate(zip(horizontal, vertical), start=1):
        alexander, maslov = alexander - h, maslov - 2 * h + 1
        gens.append(Generator(f"x{k}", alexander, maslov))
        alexander, maslov = alexander - v, maslov - 1
        gens.append(Generator(f"y{k + 1}", alexander, maslov))
        arrows.append(Arrow(f"x{k}", f"y{k}", h))
        arrows.append(Arrow(f"x{k}", f"y{k + 1}", 0))
    return KnotComplex(gens, arrows)


def box(top_alexander: int, top_maslov: int) -> KnotComplex:
    """Unit box with its Alexander-top generator x1 at the given bigrading"""
    t, mu = top_alexander, top_maslov
    gens = [
        Generator("x1", t, mu),
        Generator("x2", t - 1, mu - 1),
        Generator("x3", t - 1, mu - 1),
        Generator("x4", t - 2, mu - 2),
    ]
    arrows = [
        Arrow("x1", "x3", 0),
        Arrow("x2", "x1", 1),
        Arrow("x2", "x4", 0),
        Arrow("x4", "x3", 1),
    ]
    return KnotComplex(gens, arrows)


def unknot() -> KnotComplex:
    return KnotComplex([Generator("u", 0, 0)], [])


def trefoil() -> KnotComplex:
    return staircase([1, 1])


def figure_eight() -> KnotComplex:
    return direct_sum(unknot(), box(1, 1))


def almost_staircase_1(n: int, steps: Optional[Sequence[int]] = None) -> KnotComplex:
    """Type-1 almost staircase with arms of N steps each.

    steps are the 2N Alexander gaps walking down from z along y1, x2, y2, ...;
    the negative arm is the (i, j) reflection. N = 0 gives T(2,-3).
    """
    if n < 0:
        raise BadSteps(f"type-1 almost staircase needs N >= 0, got {n}")
    steps = [1] * (2 * n) if steps is None else list(steps)
    _check_steps(steps, 2 * n, "type-1 almost staircase")

    # first gap is measured from z, the arm itself starts one unit further out
    horizontal = [steps[0] + 1] + steps[2::2] if n else []
    vertical = steps[1::2]

    points = [("z", 0, 0, 0), ("x1", 0, 1, 1), ("x-1", 1, 0, 1)]
    edges = [("x1", "z"), ("x-1", "z")]
    i, j = 0, 1
    for k in range(1, n + 1):
        i += horizontal[k - 1]
        points.append((f"y{k}", i, j, 2))
        points.append((f"y-{k}", j, i, 2))
        j -= vertical[k - 1]
        points.append((f"x{k + 1}", i, j, 1))
        points.append((f"x-{k + 1}", j, i, 1))
        edges += [
            (f"y{k}", f"x{k}"), (f"y{k}", f"x{k + 1}"),
            (f"y-{k}", f"x-{k}"), (f"y-{k}", f"x-{k + 1}"),
        ]
    if n:
        edges += [("y1", "x-1"), ("y-1", "x1")]
    return _order_by_alexander(_from_lattice(points, edges))


def almost_staircase_2(n: int, steps: Optional[Sequence[int]] = None) -> KnotComplex:
    """Type-2 almost staircase with arms of N generator pairs.

    steps are the 2N-1 Alexander gaps walking down from z along x1, y2, x2, ...
    """
    if n < 1:
        raise BadSteps(f"type-2 almost staircase needs N >= 1, got {n}")
    steps = [1] * (2 * n - 1) if steps is None else list(steps)
    _check_steps(steps, 2 * n - 1, "type-2 almost staircase")

    width = steps[0] + 1
    points = [
        ("z", 0, 0, 0),
        ("y1", -1, 0, -1), ("y-1", 0, -1, -1),
        ("x1", -1, -width, -2), ("x-1", -width, -1, -2),
    ]
    edges = [
        ("z", "y1"), ("z", "y-1"),
        ("y1", "x1"), ("y1", "x-1"), ("y-1", "x1"), ("y-1", "x-1"),
    ]
    i, j = -1, -width
    for k in range(2, n + 1):
        i += steps[2 * k - 3]
        points.append((f"y{k}", i, j, -1))
        points.append((f"y-{k}", j, i, -1))
        j -= steps[2 * k - 2]
        points.append((f"x{k}", i, j, -2))
        points.append((f"x-{k}", j, i, -2))
        edges += [
            (f"y{k}", f"x{k - 1}"), (f"y{k}", f"x{k}"),
            (f"y-{k}", f"x-{k - 1}"), (f"y-{k}", f"x-{k}"),
        ]
    return _order_by_alexander(_from_lattice(points, edges))


def _order_by_alexander(c: KnotComplex) -> KnotComplex:
    """Stable sort of generators by descending Alexander grading"""
    pos = {name: k for k, name in enumerate(c.names)}
    gens = sorted(c.generators, key=lambda g: (-g.alexander, pos[g.name]))
    order = {g.name: k for k, g in enumerate(gens)}
    arrows = sorted(c.arrows, key=lambda a: (order[a.src], order[a.dst], a.u_power))
    return KnotComplex(gens, arrows)


# =============================================================================
# OPERATIONS
# =============================================================================

def mirror(c: KnotComplex) -> KnotComplex:
    """Dual complex: gradings negated, arrows reversed with the same U power"""
    require_valid(c)
    gens = [Generator(g.name, -g.alexander, -g.maslov) for g in c.generators]
    flipped = {g.name: g for g in gens}
    arrows = []
    for a in c.arrows:
        src, dst = flipped[a.dst], flipped[a.src]
        power = (dst.maslov - src.maslov + 1) // 2
        arrows.append(Arrow(src.name, dst.name, power))
    return KnotComplex(gens, sorted(arrows, key=lambda a: (c.index[a.src], c.index[a.dst])))


def tensor(a: KnotComplex, b: KnotComplex) -> KnotComplex:
    """d(x.y) = dx.y + x.dy; generator x.y has summed gradings.

    Names containing dots can collide (a with b.c against a.b with c);
    later colliding products get a numeric suffix.
    """
    require_valid(a)
    require_valid(b)
    names: Dict[Tuple[str, str], str] = {}
    used: Set[str] = set()
    for x in a.names:
        for y in b.names:
            base = name = f"{x}.{y}"
            suffix = 2
            while name in used:
                name = f"{base}_{suffix}"
                suffix += 1
            used.add(name)
            names[(x, y)] = name
    gens = [
        Generator(names[(x.name, y.name)], x.alexander + y.alexander, x.maslov + y.maslov)
        for x in a.generators for y in b.generators
    ]
    arrows = []
    for x in a.names:
        for y in b.names:
            for arrow in a.arrows_from(x):
                arrows.append(Arrow(names[(x, y)], names[(arrow.dst, y)], arrow.u_power))
            for arrow in b.arrows_from(y):
                arrows.append(Arrow(names[(x, y)], names[(x, arrow.dst)], arrow.u_power))
    return KnotComplex(gens, arrows)


def direct_sum(a: KnotComplex, b: KnotComplex) -> KnotComplex:
    """Disjoint union; colliding names from b get a numeric suffix"""
    used = set(a.names)
    mapping = {}
    for name in b.names:
        new = name
        suffix = 2
        while new in used:
            new = f"{name}_{suffix}"
            suffix += 1
        used.add(new)
        mapping[name] = new
    renamed = b.renamed(mapping)
    return KnotComplex(a.generators + renamed.generators, a.arrows + renamed.arrows)


def reduce(c: KnotComplex) -> KnotComplex:
    """Cancels bidegree-preserving arrows until none remain"""
    require_valid(c)
    work = Differential(c)
    cancelled = 0
    while True:
        candidates = [
            (src, dst)
            for src in work.order
            for dst, p in work.out[src]
            if p == 0 and work.gens[src].alexander == work.gens[dst].alexander
        ]
        if not candidates:
            break
        src, dst = min(candidates)
        work.cancel(src, dst)
        cancelled += 1
    if cancelled:
        logger.debug(f"reduce cancelled {cancelled} pairs, {len(work.order)} generators left")
    return work.to_complex()


def is_reduced(c: KnotComplex) -> bool:
    return not any(
        a.u_power == 0 and c.generator(a.src).alexander == c.generator(a.dst).alexander
        for a in c.arrows
    )


# =============================================================================
# TEXT FORMAT
# =============================================================================

NAME = r"[A-Za-z_][A-Za-z0-9_.'\-]*"
GEN_LINE = re.compile(rf"^gen\s+({NAME})\s+A=([+-]?\d+)\s+M=([+-]?\d+)$")
D_LINE = re.compile(rf"^d\s+({NAME})\s*=\s*(.*)$")
TERM = re.compile(rf"^(?:U\^(\S+)\s+)?({NAME})$")


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


def _parse_terms(src: str, rhs: str, line_no: int, offset: int) -> List[Arrow]:
    if rhs.strip() == "0":
        return []
    arrows = []
    column = offset
    for raw in rhs.split("+"):
        term = raw.strip()
        term_col = column + (len(raw) - len(raw.lstrip())) + 1
        column += len(raw) + 1
        match = TERM.match(term)
        if not term or not match:
            raise ParseError(f"bad term {term!r}", line_no, term_col)
        power_text, dst = match.groups()
        power = 0
        if power_text is not None:
            if not re.fullmatch(r"[+-]?\d+", power_text):
                raise ParseError(f"bad U power {power_text!r}", line_no, term_col)
            power = int(power_text)
            if power < 0:
                raise ParseError(f"negative U power {power}", line_no, term_col)
        arrows.append(Arrow(src, dst, power))
    return arrows


def parse(text: str) -> KnotComplex:
    """Reads the line-based gen/d format; semantic checks are left to validate"""
    gens: List[Generator] = []
    arrows: List[Arrow] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        stripped = line.strip()
        if not stripped:
            continue
        indent = len(line) - len(line.lstrip())
        if stripped.startswith("gen"):
            match = GEN_LINE.match(stripped)
            if not match:
                raise ParseError("expected 'gen <name> A=<int> M=<int>'", line_no, indent + 1)
            name, a, m = match.groups()
            gens.append(Generator(name, int(a), int(m)))
        elif stripped.startswith("d"):
            match = D_LINE.match(stripped)
            if not match:
                raise ParseError("expected 'd <name> = <term> + ...'", line_no, indent + 1)
            src, rhs = match.groups()
            arrows.extend(_parse_terms(src, rhs, line_no, indent + match.start(2)))
        else:
            raise ParseError(f"unknown line {stripped.split()[0]!r}", line_no, indent + 1)
    return KnotComplex(gens, arrows)


def serialize(c: KnotComplex) -> str:
    lines = [f"gen {g.name} A={g.alexander} M={g.maslov}" for g in c.generators]
    by_src: Dict[str, List[Arrow]] = {}
    for a in c.arrows:
        by_src.setdefault(a.src, []).append(a)
    order = {name: k for k, name in enumerate(c.names)}
    for g in c.generators:
        terms = sorted(by_src.get(g.name, []), key=lambda a: (order.get(a.dst, len(order)), a.dst, a.u_power))
        if terms:
            rhs = " + ".join(a.dst if a.u_power == 0 else f"U^{a.u_power} {a.dst}" for a in terms)
            lines.append(f"d {g.name} = {rhs}")
    return "\n".join(lines) + ("\n" if lines else "")


def render_grid(c: KnotComplex) -> str:
    """Plain-text HFK-style grid: rows are Alexander, columns Maslov"""
    if not c.generators:
        return "(empty complex)\n"
    counts = c.bigraded_counts()
    a_lo, a_hi = c.alexander_span()
    maslovs = [g.maslov for g in c.generators]
    m_lo, m_hi = min(maslovs), max(maslovs)
    width = max(3, len(str(m_lo)) + 1)
    header = "A\\M".rjust(5) + "".join(str(m).rjust(width) for m in range(m_lo, m_hi + 1))
    rows = [header]
    for a in range(a_hi, a_lo - 1, -1):
        cells = "".join(
            (str(counts[(a, m)]) if counts[(a, m)] else ".").rjust(width)
            for m in range(m_lo, m_hi + 1)
        )
        rows.append(str(a).rjust(5) + cells)
    rows.append("")
    for a in c.arrows:
        rows.append(f"  {a}")
    return "\n".join(rows) + "\n"
