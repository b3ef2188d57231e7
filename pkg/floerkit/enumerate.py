"""
Floerkit - Enumerate Module

Exhaustive search for small reduced complexes that look like almost
L-space knots, and the end-to-end check that every one of them lands in
a known family.

Outer loop: skew-symmetric HFK tables inside the rank bounds. Inner loop:
for each table, every vertically simplified differential, built source by
source with d^2 = 0 checked as soon as a source's targets are settled.
Tables are independent, so they are farmed out to a process pool.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, product
from multiprocessing import Pool
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from floerkit import config
from floerkit.classify import ComplexClass, classify, delta0_check, filtered_equivalent
from floerkit.complex import (
    Arrow,
    Generator,
    KnotComplex,
    almost_staircase_1,
    box,
    direct_sum,
    figure_eight,
    parse,
    serialize,
    staircase,
)
from floerkit.errors import FloerError
from floerkit.invariants import HfkTable, genus, grading_case, hfk, tau
from floerkit.regions import (
    lemma_bound_holds,
    parity_split_holds,
    region_homology,
    row_region,
    symmetry_check,
    triangle_suite,
)
from floerkit.surgery import Verdict, detect

logger = logging.getLogger(__name__)

Slot = Tuple[int, int]   # (alexander, maslov)


@dataclass(frozen=True)
class SearchSpec:
    genus: int
    max_step: int = config.DEFAULT_MAX_STEP
    maslov_range: Optional[int] = None      # |M| bound at s >= 0; default 2g + 1
    lspace: bool = False                    # look for L-space complexes instead
    max_generators: int = config.ENUMERATION_MAX_GENERATORS

    @property
    def target(self) -> Verdict:
        return Verdict.LSPACE if self.lspace else Verdict.ALMOST_LSPACE

    def to_dict(self) -> Dict:
        return {
            "genus": self.genus,
            "max_step": self.max_step,
            "maslov_range": self.maslov_range,
            "lspace": self.lspace,
            "max_generators": self.max_generators,
        }


# =============================================================================
# HFK TABLES
# =============================================================================

def _allowed_ranks(s: int, top: int) -> Tuple[int, ...]:
    if s == 0:
        return (1, 3)
    if s == 1:
        return (1, 2)
    if s == top:
        return (1,)
    return (0, 1)


def _matching(slots: Sequence[Slot], survivor_ok, joins) -> Iterator[Tuple[int, List[Tuple[int, int]]]]:
    """Perfect matchings of all slots but one survivor; pairs are (src, dst) indices.

    Slots with equal bigrading are interchangeable, so only the first unused
    one of each bigrading is tried as survivor or partner.
    """
    tried_survivors = set()
    for survivor, slot in enumerate(slots):
        if not survivor_ok(slot) or slot in tried_survivors:
            continue
        tried_survivors.add(slot)
        rest = [k for k in range(len(slots)) if k != survivor]
        for pairs in _pair_up(slots, rest, joins):
            yield survivor, pairs


def _pair_up(slots, remaining: List[int], joins) -> Iterator[List[Tuple[int, int]]]:
    if not remaining:
        yield []
        return
    first, others = remaining[0], remaining[1:]
    tried = set()
    for partner in others:
        if slots[partner] in tried:
            continue
        if joins(slots[first], slots[partner]):
            pair = (first, partner)
        elif joins(slots[partner], slots[first]):
            pair = (partner, first)
        else:
            continue
        tried.add(slots[partner])
        left = [k for k in others if k != partner]
        for pairs in _pair_up(slots, left, joins):
            yield [pair] + pairs


def _vertical_joins(max_step: int):
    def joins(src: Slot, dst: Slot) -> bool:
        return src[1] - dst[1] == 1 and 1 <= src[0] - dst[0] <= max_step
    return joins


def _horizontal_joins(max_step: int):
    def joins(src: Slot, dst: Slot) -> bool:
        power = dst[0] - src[0]
        return 1 <= power <= max_step and dst[1] - 2 * power == src[1] - 1
    return joins


def _slots(table: HfkTable) -> List[Slot]:
    slots = []
    for (s, d), r in sorted(table.ranks.items(), key=lambda item: (-item[0][0], -item[0][1])):
        slots += [(s, d)] * r
    return slots


def _passes_quick_checks(table: HfkTable, max_step: int) -> bool:
    slots = _slots(table)
    vertical = next(_matching(slots, lambda s: s[1] == 0, _vertical_joins(max_step)), None)
    if vertical is None:
        return False
    horizontal = next(_matching(slots, lambda s: s[1] - 2 * s[0] == 0, _horizontal_joins(max_step)), None)
    return horizontal is not None


def hfk_tables(spec: SearchSpec) -> Iterator[HfkTable]:
    """Skew-symmetric tables of Euler characteristic 1 within the rank bounds"""
    for top in range(1, spec.genus + 1):
        bound = spec.maslov_range if spec.maslov_range is not None else 2 * top + 1
        values = range(-bound, bound + 1)
        choices_per_s = []
        for s in range(top + 1):
            choices = []
            for rank in _allowed_ranks(s, top):
                choices += list(combinations_with_replacement(values, rank))
            choices_per_s.append(choices)
        for choice in product(*choices_per_s):
            # rank 3 at s = 0 comes from a staircase plus one box; both sit in one grading
            if len(choice[0]) == 3 and len(set(choice[0])) != 1:
                continue
            ranks: Counter = Counter()
            for s, maslovs in enumerate(choice):
                for d in maslovs:
                    ranks[(s, d)] += 1
                    if s:
                        ranks[(-s, d - 2 * s)] += 1
            if sum(ranks.values()) > spec.max_generators:
                continue
            if sum(r * (-1) ** (d % 2) for (_, d), r in ranks.items()) != 1:
                continue
            table = HfkTable(dict(ranks))
            if _passes_quick_checks(table, spec.max_step):
                yield table


# =============================================================================
# DIFFERENTIAL SEARCH
# =============================================================================

def _non_vertical_options(gens: List[Generator]) -> Dict[int, List[Tuple[int, int]]]:
    """Possible arrows src -> U^a dst with a >= 1, as (dst, a) per src"""
    options: Dict[int, List[Tuple[int, int]]] = {k: [] for k in range(len(gens))}
    for k, src in enumerate(gens):
        for m, dst in enumerate(gens):
            diff = dst.maslov - src.maslov + 1
            if k == m or diff % 2 or diff < 2:
                continue
            power = diff // 2
            if dst.alexander - power <= src.alexander:
                options[k].append((m, power))
    return options


def _squares_to_zero(out: Dict[int, Set[Tuple[int, int]]], src: int) -> bool:
    total: Counter = Counter()
    for mid, p in out[src]:
        for dst, q in out[mid]:
            total[(dst, p + q)] += 1
    return all(n % 2 == 0 for n in total.values())


def _differentials(gens: List[Generator], vertical: List[Tuple[int, int]]) -> Iterator[KnotComplex]:
    n = len(gens)
    options = _non_vertical_options(gens)
    # M - A never drops along an arrow, so targets come before their sources
    order = sorted(range(n), key=lambda k: (-(gens[k].maslov - gens[k].alexander), k))
    out: Dict[int, Set[Tuple[int, int]]] = {k: set() for k in range(n)}
    for src, dst in vertical:
        out[src].add((dst, 0))
    fixed = {k: set(v) for k, v in out.items()}
    settled: Set[int] = set()
    checked: Set[int] = set()

    def newly_checkable() -> List[int]:
        return [w for w in settled - checked if all(t in settled for t, _ in out[w])]

    def visit(pos: int) -> Iterator[KnotComplex]:
        if pos == n:
            arrows = [Arrow(gens[s].name, gens[d].name, p) for s in range(n) for d, p in sorted(out[s])]
            yield KnotComplex(gens, arrows)
            return
        src = order[pos]
        choices = options[src]
        for mask in range(1 << len(choices)):
            out[src] = fixed[src] | {choices[b] for b in range(len(choices)) if mask >> b & 1}
            settled.add(src)
            ready = newly_checkable()
            if all(_squares_to_zero(out, w) for w in ready):
                checked.update(ready)
                yield from visit(pos + 1)
                checked.difference_update(ready)
            settled.discard(src)
        out[src] = set(fixed[src])

    yield from visit(0)


def _table_generators(table: HfkTable) -> List[Generator]:
    return [Generator(f"g{k + 1}", s, d) for k, (s, d) in enumerate(_slots(table))]


def _search_table(args: Tuple[Dict, SearchSpec]) -> List[str]:
    """All inequivalent candidates for one HFK table, serialized"""
    table_dict, spec = args
    table = HfkTable.from_dict(table_dict)
    gens = _table_generators(table)
    slots = [g.bigrading for g in gens]
    kept: List[KnotComplex] = []
    examined = 0
    for _, vertical in _matching(slots, lambda s: s[1] == 0, _vertical_joins(spec.max_step)):
        for candidate in _differentials(gens, vertical):
            examined += 1
            if region_homology(candidate, row_region(0)).ranks != {0: 1}:
                continue
            try:
                if detect(candidate).verdict is not spec.target:
                    continue
            except FloerError:
                continue
            if not symmetry_check(candidate).symmetric:
                continue
            if not spec.lspace and not parity_split_holds(candidate):
                continue
            if any(filtered_equivalent(candidate, other) for other in kept):
                continue
            kept.append(candidate)
    logger.debug(f"table {table.alexander_gradings}: {examined} differentials, {len(kept)} kept")
    return [serialize(c) for c in kept]


def enumerate_candidates(spec: SearchSpec) -> Iterator[KnotComplex]:
    """Streams inequivalent candidates, table by table in a fixed order"""
    tables = [(t.to_dict(), spec) for t in hfk_tables(spec)]
    logger.info(f"enumerating {len(tables)} HFK tables up to genus {spec.genus}")
    threads = min(config.get_thread_count(), max(1, len(tables)))
    if threads == 1:
        batches = map(_search_table, tables)
        for batch in batches:
            for text in sorted(batch):
                yield parse(text)
        return
    with Pool(processes=threads) as pool:
        for batch in pool.imap(_search_table, tables, chunksize=1):
            for text in sorted(batch):
                yield parse(text)


# =============================================================================
# THEOREM CHECK
# =============================================================================

def genus_one_models() -> Dict[str, KnotComplex]:
    return {
        "T(2,-3)": almost_staircase_1(0),
        "figure-eight": figure_eight(),
        "m(5_2)": direct_sum(staircase([1, 1]), box(1, 0)),
    }


@dataclass
class TheoremReport:
    spec: SearchSpec
    candidates: int = 0
    counts: Dict[str, int] = field(default_factory=dict)
    violations: List[str] = field(default_factory=list)
    grading_cases: Dict[str, int] = field(default_factory=dict)
    uncovered_cases: List[str] = field(default_factory=list)
    delta0_passed: int = 0
    delta0_failed: List[str] = field(default_factory=list)
    lemma_failures: List[str] = field(default_factory=list)
    triangle_failures: List[str] = field(default_factory=list)
    tau_failures: List[str] = field(default_factory=list)
    genus_one_found: List[str] = field(default_factory=list)
    genus_one_unmatched: List[str] = field(default_factory=list)
    genus_one_missing: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.violations or self.uncovered_cases or self.lemma_failures
                    or self.triangle_failures or self.tau_failures or self.delta0_failed
                    or self.genus_one_unmatched or self.genus_one_missing)

    def to_dict(self) -> Dict:
        return {
            "spec": self.spec.to_dict(),
            "candidates": self.candidates,
            "counts": dict(sorted(self.counts.items())),
            "violations": self.violations,
            "grading_cases": dict(sorted(self.grading_cases.items())),
            "uncovered_cases": self.uncovered_cases,
            "delta0": {"passed": self.delta0_passed, "failed": self.delta0_failed},
            "lemma_failures": self.lemma_failures,
            "triangle_failures": self.triangle_failures,
            "tau_failures": self.tau_failures,
            "genus_one": {"found": self.genus_one_found, "unmatched": self.genus_one_unmatched,
                          "missing": self.genus_one_missing},
            "ok": self.ok,
        }


def _replay_regions(report: TheoremReport, c: KnotComplex, g: int, text: str):
    for m in range(-g - 1, g + 2):
        if not lemma_bound_holds(c, m):
            report.lemma_failures.append(f"m={m}\n{text}")
        try:
            suite = triangle_suite(c, m)
        except FloerError as e:
            report.triangle_failures.append(f"m={m}: {e}\n{text}")
            continue
        if not suite.composite_zero:
            report.triangle_failures.append(f"m={m}: connecting composite nonzero\n{text}")


def verify_theorem(spec: SearchSpec) -> TheoremReport:
    """Classifies every candidate and replays the supporting lemmas on it"""
    report = TheoremReport(spec)
    counts: Counter = Counter()
    cases: Counter = Counter()
    models = genus_one_models()
    found_models = set()

    for c in enumerate_candidates(spec):
        report.candidates += 1
        text = serialize(c)
        result = classify(c)
        counts[result.verdict.value] += 1
        if result.verdict in (ComplexClass.UNKNOWN, ComplexClass.NOT_ALMOST_LSPACE):
            report.violations.append(f"{result.verdict.value}\n{text}")

        g = genus(c)
        table = hfk(c)
        if g >= 2 and not spec.lspace:
            case = grading_case(table)
            if case is None:
                report.uncovered_cases.append(text)
            else:
                cases[case] += 1

        if result.verdict is ComplexClass.STAIRCASE_PLUS_BOX:
            if delta0_check(c):
                report.delta0_passed += 1
            else:
                report.delta0_failed.append(text)

        _replay_regions(report, c, g, text)

        if not spec.lspace:
            free_plus_box = result.verdict is ComplexClass.STAIRCASE_PLUS_BOX and len(c) == 5
            if (abs(tau(c)) < g) != free_plus_box:
                report.tau_failures.append(text)

        if g == 1 and not spec.lspace:
            matched = [name for name, model in models.items() if filtered_equivalent(c, model)]
            if matched:
                found_models.update(matched)
            else:
                report.genus_one_unmatched.append(text)

    report.counts = dict(counts)
    report.grading_cases = dict(cases)
    report.genus_one_found = sorted(found_models)
    # the models sit inside the default Maslov bound
    if not spec.lspace and spec.genus >= 1 and spec.maslov_range is None:
        report.genus_one_missing = sorted(set(models) - found_models)
    logger.info(f"verified {report.candidates} candidates: {report.counts}, "
                f"{len(report.violations)} violations")
    return report
