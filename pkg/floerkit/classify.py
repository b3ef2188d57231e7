"""
Floerkit - Classify Module

Puts almost L-space complexes into one of the known families: staircase
plus box, or one of the two almost staircase types. Candidate templates
are built from the HFK table, then confirmed with a filtered-isomorphism
search between reduced complexes. A filtered basis simplification search
produces a readable representative alongside the verdict.
"""

import heapq
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from floerkit import config
from floerkit.algebra import BitMatrix, f2_rank, image_basis, kernel_basis, solve
from floerkit.complex import (
    Differential,
    KnotComplex,
    almost_staircase_1,
    almost_staircase_2,
    box,
    direct_sum,
    reduce,
    require_valid,
    serialize,
    staircase,
    unknot,
)
from floerkit.errors import BadSteps, FloerError, NonTermination, TooLarge, WrongClass
from floerkit.invariants import HfkTable, hfk
from floerkit.regions import fingerprint, suite_radius
from floerkit.surgery import Verdict, detect

logger = logging.getLogger(__name__)


class ComplexClass(Enum):
    STAIRCASE = "Staircase"
    STAIRCASE_PLUS_BOX = "StaircasePlusBox"
    ALMOST_STAIRCASE_1 = "AlmostStaircase1"
    ALMOST_STAIRCASE_2 = "AlmostStaircase2"
    NOT_ALMOST_LSPACE = "NotAlmostLSpace"
    UNKNOWN = "Unknown"


# =============================================================================
# FILTERED EQUIVALENCE
# =============================================================================

def _map_variables(a: KnotComplex, b: KnotComplex) -> Dict[Tuple[str, str], int]:
    """Components x -> U^k y allowed in a grading-preserving filtered map"""
    variables = {}
    for x in a.generators:
        for y in b.generators:
            diff = y.maslov - x.maslov
            if diff < 0 or diff % 2:
                continue
            if y.alexander - diff // 2 <= x.alexander:
                variables[(x.name, y.name)] = len(variables)
    return variables


def _chain_map_equations(a: KnotComplex, b: KnotComplex,
                         variables: Dict[Tuple[str, str], int]) -> BitMatrix:
    """Rows are the (x, z) components of f d_a + d_b f"""
    targets: Dict[str, List[str]] = defaultdict(list)
    for x, y in variables:
        targets[x].append(y)
    terms: Dict[Tuple[str, str], Counter] = defaultdict(Counter)
    for arrow in a.arrows:
        for z in targets[arrow.dst]:
            terms[(arrow.src, z)][variables[(arrow.dst, z)]] += 1
    b_out = defaultdict(list)
    for arrow in b.arrows:
        b_out[arrow.src].append(arrow.dst)
    for x, y in variables:
        for z in b_out[y]:
            terms[(x, z)][variables[(x, y)]] += 1
    entries = []
    for row, counter in enumerate(terms.values()):
        entries += [(row, var) for var, count in counter.items() if count % 2]
    return BitMatrix.from_entries(len(terms), len(variables), entries)


def _blocks(a: KnotComplex, b: KnotComplex, variables) -> List[List[int]]:
    """Per bigrading, the variable indices of the square leading block, row-major"""
    blocks = []
    for bigrading in sorted(a.bigraded_counts()):
        xs = [g.name for g in a.generators if g.bigrading == bigrading]
        ys = [g.name for g in b.generators if g.bigrading == bigrading]
        blocks.append([variables[(x, y)] for x in xs for y in ys])
    return blocks


def _affine_solutions(rows: List[np.ndarray], rhs: List[int],
                      dim: int) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Coefficient vectors meeting the pinned values: (particular, kernel rows)"""
    if not rows:
        return np.zeros(dim, dtype=np.uint8), np.eye(dim, dtype=np.uint8)
    system = BitMatrix.from_dense(np.array(rows, dtype=np.uint8))
    particular = solve(system, rhs)
    if particular is None:
        return None
    return particular, kernel_basis(system).to_dense()


def _projection(particular: np.ndarray, kernel: np.ndarray,
                columns: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Affine image of the solution set on one block: (base, independent directions)"""
    base = ((particular.astype(np.int64) @ columns) & 1).astype(np.uint8)
    if kernel.shape[0] == 0:
        return base, np.zeros((0, columns.shape[1]), dtype=np.uint8)
    spread = (kernel.astype(np.int64) @ columns) & 1
    if not spread.any():
        return base, np.zeros((0, columns.shape[1]), dtype=np.uint8)
    return base, image_basis(BitMatrix.from_dense(spread.T.astype(np.uint8))).to_dense()


def _points(base: np.ndarray, directions: np.ndarray) -> Iterator[np.ndarray]:
    current = base.copy()
    yield current.copy()
    # Gray code walk: one direction toggled per step
    for step in range(1, 1 << directions.shape[0]):
        current ^= directions[(step & -step).bit_length() - 1]
        yield current.copy()


def _invertible(values: np.ndarray) -> bool:
    size = int(round(len(values) ** 0.5))
    return f2_rank(BitMatrix.from_dense(values.reshape(size, size))) == size


def _block_search(solutions: np.ndarray, blocks: List[List[int]],
                  rows: List[np.ndarray], rhs: List[int]) -> bool:
    """Pins leading blocks one at a time to invertible values the chain-map space allows"""
    space = _affine_solutions(rows, rhs, solutions.shape[0])
    if space is None:
        return False
    if not blocks:
        return True
    particular, kernel = space

    # the block with the fewest reachable values goes first
    best = None
    for index, block in enumerate(blocks):
        columns = solutions[:, block].astype(np.int64)
        base, directions = _projection(particular, kernel, columns)
        if best is None or directions.shape[0] < best[1].shape[0]:
            best = (index, directions, base, columns)
    index, directions, base, columns = best
    cap = config.EQUIVALENCE_BLOCK_BITS
    if directions.shape[0] > cap:
        raise TooLarge(directions.shape[0], cap, unit="free bits in one leading block")

    rest = blocks[:index] + blocks[index + 1:]
    pinned = [columns[:, k].astype(np.uint8) for k in range(columns.shape[1])]
    for values in _points(base, directions):
        if not _invertible(values):
            continue
        if _block_search(solutions, rest, rows + pinned, rhs + [int(v) for v in values]):
            return True
    return False


def filtered_equivalent(a: KnotComplex, b: KnotComplex) -> bool:
    """True iff the reduced forms are related by a filtered isomorphism over F_2.

    Chain maps preserving both gradings form a linear space; the search
    looks for one whose bigrading-preserving part is invertible.
    """
    a, b = reduce(a), reduce(b)
    cap = config.EQUIVALENCE_MAX_GENERATORS
    for c in (a, b):
        if len(c) > cap:
            raise TooLarge(len(c), cap)
    if a.bigraded_counts() != b.bigraded_counts():
        return False
    if not a.generators:
        return True

    variables = _map_variables(a, b)
    solutions = kernel_basis(_chain_map_equations(a, b, variables)).to_dense()
    if solutions.shape[0] == 0:
        return False
    return _block_search(solutions, _blocks(a, b, variables), [], [])


def literal_match(a: KnotComplex, b: KnotComplex) -> Optional[Dict[str, str]]:
    """Name bijection carrying a's generators and arrows exactly onto b's"""
    if len(a) != len(b) or len(a.arrows) != len(b.arrows):
        return None
    if a.bigraded_counts() != b.bigraded_counts():
        return None

    def powers(c: KnotComplex) -> Dict[Tuple[str, str], frozenset]:
        found = defaultdict(set)
        for arrow in c.arrows:
            found[(arrow.src, arrow.dst)].add(arrow.u_power)
        return {k: frozenset(v) for k, v in found.items()}

    pa, pb = powers(a), powers(b)
    empty = frozenset()
    order = [g.name for g in a.generators]
    mapping: Dict[str, str] = {}
    used = set()

    def consistent(x: str, y: str) -> bool:
        if pa.get((x, x), empty) != pb.get((y, y), empty):
            return False
        for u, v in mapping.items():
            if pa.get((x, u), empty) != pb.get((y, v), empty):
                return False
            if pa.get((u, x), empty) != pb.get((v, y), empty):
                return False
        return True

    def extend(pos: int) -> bool:
        if pos == len(order):
            return True
        x = order[pos]
        grading = a.generator(x).bigrading
        for g in b.generators:
            if g.name in used or g.bigrading != grading or not consistent(x, g.name):
                continue
            mapping[x] = g.name
            used.add(g.name)
            if extend(pos + 1):
                return True
            del mapping[x]
            used.discard(g.name)
        return False

    return dict(mapping) if extend(0) else None


# =============================================================================
# SIMPLIFICATION
# =============================================================================

@dataclass(frozen=True)
class BasisChange:
    """target' = target + U^u_power source"""
    target: str
    source: str
    u_power: int

    def __str__(self) -> str:
        return f"{self.target} += U^{self.u_power} {self.source}"

    def to_dict(self) -> Dict:
        return {"target": self.target, "source": self.source, "u_power": self.u_power}


@dataclass
class SimplifyResult:
    complex: KnotComplex
    log: List[BasisChange] = field(default_factory=list)
    complete: bool = True

    def to_dict(self) -> Dict:
        return {
            "complex": self.complex.to_dict(),
            "log": [m.to_dict() for m in self.log],
            "complete": self.complete,
        }


def _cost(work: Differential) -> Tuple[int, int, int]:
    """(vertical plus horizontal excess, diagonal arrows, arrows)"""
    v_out, v_in, h_out, h_in = Counter(), Counter(), Counter(), Counter()
    diagonal = total = 0
    for src, targets in work.out.items():
        a_src = work.gens[src].alexander
        for dst, power in targets:
            total += 1
            if power == 0:
                v_out[src] += 1
                v_in[dst] += 1
            elif work.gens[dst].alexander - power == a_src:
                h_out[src] += 1
                h_in[dst] += 1
            else:
                diagonal += 1

    def excess(counter: Counter) -> int:
        return sum(n - 1 for n in counter.values() if n > 1)

    return (sum(excess(k) for k in (v_out, v_in, h_out, h_in)), diagonal, total)


def _state(work: Differential) -> frozenset:
    return frozenset((src, dst, p) for src, targets in work.out.items() for dst, p in targets)


def _moves(work: Differential) -> List[BasisChange]:
    moves = []
    for target in work.order:
        t = work.gens[target]
        for source in work.order:
            if source == target or (not work.out[source] and not work.inc[target]):
                continue
            s = work.gens[source]
            diff = s.maslov - t.maslov
            if diff < 0 or diff % 2 or s.alexander - diff // 2 > t.alexander:
                continue
            moves.append(BasisChange(target, source, diff // 2))
    return moves


def _replay(c: KnotComplex, path: List[BasisChange]) -> Differential:
    work = Differential(c)
    for move in path:
        work.add_to(move.target, move.source, move.u_power)
    return work


def _search(c: KnotComplex, budget: int) -> Tuple[List[BasisChange], int, bool]:
    """Best-first search over filtered basis changes, cheapest state first.

    Stops at a state with no excess vertical or horizontal arrows that no
    single move improves. Intermediate states may carry more arrows than the
    start. Returns (path, expansions spent, finished).
    """
    start = Differential(c)
    cost = _cost(start)
    frontier = [(cost, 0, [])]
    seen = {_state(start)}
    best = (cost, [])
    spent = pushed = 0

    while frontier and spent < budget:
        cost, _, path = heapq.heappop(frontier)
        spent += 1
        work = _replay(c, path)
        settled = True
        for move in _moves(work):
            work.add_to(move.target, move.source, move.u_power)
            state, trial = _state(work), _cost(work)
            # applying a move twice undoes it
            work.add_to(move.target, move.source, move.u_power)
            if trial < cost:
                settled = False
            if state in seen:
                continue
            seen.add(state)
            pushed += 1
            heapq.heappush(frontier, (trial, pushed, path + [move]))
            if trial < best[0]:
                best = (trial, path + [move])
        if settled and cost[0] == 0:
            logger.debug(f"simplify: settled at cost {cost} after {spent} expansions")
            return path, spent, True

    return best[1], spent, not frontier


def simplify(c: KnotComplex, strict: bool = False) -> SimplifyResult:
    """Filtered basis changes toward a representative with no excess vertical or
    horizontal arrows and as few diagonal and surplus arrows as the search finds"""
    require_valid(c)
    budget = config.SIMPLIFY_BUDGET_FACTOR * max(1, len(c)) ** 2
    log, spent, complete = _search(c, budget)
    work = _replay(c, log)
    for move in log:
        logger.debug(f"simplify: {move}")

    if config.DEBUG_MODE:
        radius = suite_radius(c)
        reference = fingerprint(c, radius)
        for k, move in enumerate(log):
            if fingerprint(_replay(c, log[:k + 1]).to_complex(), radius) != reference:
                raise FloerError(f"basis change {move} altered region homology")

    result = SimplifyResult(work.to_complex(), log, complete=complete)
    if not result.complete:
        logger.warning(f"simplify stopped after {spent} expansions at cost {_cost(work)}")
        if strict:
            raise NonTermination(f"search budget {budget} exhausted", partial=result)
    return result


# =============================================================================
# TEMPLATES
# =============================================================================

def _gaps(values: List[int], start: int) -> List[int]:
    steps, previous = [], start
    for v in values:
        steps.append(previous - v)
        previous = v
    return steps


def staircase_template(table: HfkTable) -> Optional[KnotComplex]:
    if any(table.rank_at(s) != 1 for s in table.alexander_gradings):
        return None
    levels = table.alexander_gradings
    if len(levels) == 1:
        return unknot() if levels == [0] else None
    if len(levels) % 2 == 0:
        return None
    return staircase(_gaps(levels[1:], levels[0]))


def _without(table: HfkTable, slots: List[Tuple[int, int]]) -> Optional[HfkTable]:
    ranks = dict(table.ranks)
    for slot in slots:
        if ranks.get(slot, 0) < 1:
            return None
        ranks[slot] -= 1
    return HfkTable(ranks)


def staircase_plus_box_templates(table: HfkTable) -> List[KnotComplex]:
    found = []
    for t, mu in sorted(table.ranks, reverse=True):
        rest = _without(table, [(t, mu), (t - 1, mu - 1), (t - 1, mu - 1), (t - 2, mu - 2)])
        if rest is None:
            continue
        base = staircase_template(rest)
        if base is not None:
            found.append(direct_sum(base, box(t, mu)))
    return found


def _arm_steps(table: HfkTable) -> Optional[List[int]]:
    negatives = []
    for s in sorted((s for s in table.alexander_gradings if s < 0), reverse=True):
        negatives += [s] * table.rank_at(s)
    if -1 not in negatives:
        return None
    negatives.remove(-1)
    return _gaps(negatives, 0)


def almost_staircase_templates(table: HfkTable) -> List[Tuple[ComplexClass, KnotComplex]]:
    found = []
    size = table.total
    steps = _arm_steps(table)
    if steps is None:
        return found
    try:
        if size % 4 == 3:
            found.append((ComplexClass.ALMOST_STAIRCASE_1, almost_staircase_1((size - 3) // 4, steps)))
        elif size % 4 == 1 and size >= 5:
            found.append((ComplexClass.ALMOST_STAIRCASE_2, almost_staircase_2((size - 1) // 4, steps)))
    except BadSteps:
        pass
    return found


# =============================================================================
# CLASSIFICATION
# =============================================================================

@dataclass
class Classification:
    verdict: ComplexClass
    witness: Optional[KnotComplex] = None
    simplified: Optional[SimplifyResult] = None
    literal: bool = False
    overlap: bool = False

    def to_dict(self) -> Dict:
        return {
            "verdict": self.verdict.value,
            "overlap": self.overlap,
            "literal": self.literal,
            "witness": serialize(self.witness) if self.witness else None,
            "simplified": self.simplified.to_dict() if self.simplified else None,
        }


def _equivalent(a: KnotComplex, b: KnotComplex) -> bool:
    try:
        return filtered_equivalent(a, b)
    except TooLarge as e:
        logger.warning(f"classification skipped equivalence check: {e}")
        return False


def classify(c: KnotComplex) -> Classification:
    require_valid(c)
    detection = detect(c)
    if detection.verdict is Verdict.NEITHER:
        return Classification(ComplexClass.NOT_ALMOST_LSPACE)

    reduced = reduce(c)
    simplified = simplify(reduced)
    table = hfk(reduced)

    candidates: List[Tuple[ComplexClass, KnotComplex]] = []
    if detection.verdict is Verdict.LSPACE:
        template = staircase_template(table)
        if template is not None:
            candidates.append((ComplexClass.STAIRCASE, template))
    else:
        candidates += [(ComplexClass.STAIRCASE_PLUS_BOX, t) for t in staircase_plus_box_templates(table)]
        candidates += almost_staircase_templates(table)

    matches = [(kind, template) for kind, template in candidates if _equivalent(reduced, template)]
    if not matches:
        logger.info(f"no template matches {len(reduced)}-generator complex; verdict Unknown")
        return Classification(ComplexClass.UNKNOWN, simplified=simplified)

    kind, template = matches[0]
    result = Classification(
        kind,
        witness=template,
        simplified=simplified,
        literal=literal_match(simplified.complex, template) is not None,
        overlap=len({k for k, _ in matches}) > 1,
    )
    logger.debug(f"classified as {kind.value} (overlap={result.overlap}, literal={result.literal})")
    return result


def delta0_check(c: KnotComplex) -> bool:
    """Staircase-plus-box complexes: HFK at s = 0 sits in a single Maslov grading"""
    verdict = classify(c).verdict
    if verdict is not ComplexClass.STAIRCASE_PLUS_BOX:
        raise WrongClass(f"delta0 check applies to StaircasePlusBox, not {verdict.value}")
    return len(set(hfk(c).maslovs(0))) == 1
