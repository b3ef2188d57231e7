"""
Floerkit - Invariants Module

Knot-level invariants read off a complex: HFK-hat with its bigrading,
genus, tau, the hook (large-surgery) homologies, large-surgery ranks with
their spin^c labels, and the grading-case table used for genus >= 2
almost L-space candidates.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from floerkit.complex import KnotComplex, reduce, require_valid
from floerkit.errors import EmptyComplex, NotKnotLike, NTooSmall
from floerkit.regions import (
    column_region,
    exact_triangle,
    hook_region,
    point_region,
    region_homology,
    sublevel_region,
)

logger = logging.getLogger(__name__)


# =============================================================================
# HFK-HAT
# =============================================================================

@dataclass
class HfkTable:
    """Ranks of HFK-hat keyed by (Alexander s, Maslov d)"""

    ranks: Dict[Tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        self.ranks = {(int(s), int(d)): int(r) for (s, d), r in sorted(self.ranks.items()) if r}

    def rank_at(self, s: int) -> int:
        return sum(r for (a, _), r in self.ranks.items() if a == s)

    def maslovs(self, s: int) -> List[int]:
        """Maslov gradings at Alexander grading s, with multiplicity, ascending"""
        found = []
        for (a, d), r in sorted(self.ranks.items()):
            if a == s:
                found += [d] * r
        return found

    @property
    def total(self) -> int:
        return sum(self.ranks.values())

    @property
    def alexander_gradings(self) -> List[int]:
        return sorted({s for s, _ in self.ranks}, reverse=True)

    def is_skew_symmetric(self) -> bool:
        return all(self.ranks.get((-s, d - 2 * s), 0) == r for (s, d), r in self.ranks.items())

    def euler_characteristic(self) -> int:
        """Alexander polynomial evaluated at t = 1"""
        return sum(r * (-1) ** (d % 2) for (_, d), r in self.ranks.items())

    def __str__(self) -> str:
        lines = []
        for s in self.alexander_gradings:
            cells = ", ".join(
                f"M={d}" + (f"^{r}" if r > 1 else "")
                for (a, d), r in sorted(self.ranks.items()) if a == s
            )
            lines.append(f"s={s}: {cells}")
        return "\n".join(lines) if lines else "0"

    def to_dict(self) -> Dict:
        return {
            "ranks": [
                {"alexander": s, "maslov": d, "rank": r} for (s, d), r in sorted(self.ranks.items())
            ]
        }

    @classmethod
    def from_dict(cls, data: Dict) -> "HfkTable":
        return cls({(e["alexander"], e["maslov"]): e["rank"] for e in data.get("ranks", [])})

    @classmethod
    def from_counts(cls, counts: Counter) -> "HfkTable":
        return cls(dict(counts))


def hfk(c: KnotComplex) -> HfkTable:
    """Homology of the associated graded, one point region per Alexander grading"""
    reduced = reduce(c)
    ranks: Dict[Tuple[int, int], int] = {}
    for s in sorted({g.alexander for g in reduced.generators}):
        for d, r in region_homology(reduced, point_region(0, s)).ranks.items():
            ranks[(s, d)] = r
    return HfkTable(ranks)


def genus(c: KnotComplex) -> int:
    if not c.generators:
        raise EmptyComplex("genus of a complex with no generators")
    table = hfk(c)
    if not table.ranks:
        raise EmptyComplex("associated graded homology vanishes")
    return max(table.alexander_gradings)


# =============================================================================
# TAU
# =============================================================================

def tau(c: KnotComplex) -> int:
    """Least s whose sublevel {i=0, j<=s} surjects onto H({i=0})"""
    require_valid(c)
    column = region_homology(c, column_region())
    if column.total != 1:
        raise NotKnotLike(f"column homology is {column}, expected a single F")
    low, high = c.alexander_span()
    for s in range(low - 1, high + 1):
        report = exact_triangle(c, sublevel_region(s), column_region())
        if sum(report.inclusion_ranks.values()) == 1:
            return s
    # the whole column is reached at s = high
    return high


# =============================================================================
# HOOKS AND LARGE SURGERY
# =============================================================================

@dataclass
class HookProfile:
    """rank H(A_s) for |s| <= genus; every further s has rank 1"""

    ranks: Dict[int, int] = field(default_factory=dict)

    def rank(self, s: int) -> int:
        return self.ranks.get(s, 1)

    @property
    def excess(self) -> int:
        return sum(r - 1 for r in self.ranks.values())

    def excess_at(self) -> Dict[int, int]:
        """Signed rank - 1 at every hook whose rank is not 1"""
        return {s: r - 1 for s, r in self.ranks.items() if r != 1}

    def __str__(self) -> str:
        parts = []
        for s in sorted({abs(s) for s in self.ranks}):
            if s == 0:
                parts.append(f"0:{self.rank(0)}")
            elif self.rank(s) == self.rank(-s):
                parts.append(f"±{s}:{self.rank(s)}")
            else:
                parts.append(f"{s}:{self.rank(s)}, {-s}:{self.rank(-s)}")
        return "{" + ", ".join(parts) + "}"

    def to_dict(self) -> Dict:
        return {str(s): r for s, r in sorted(self.ranks.items())}


def hook_profile(c: KnotComplex) -> HookProfile:
    require_valid(c)
    g = genus(c)
    ranks = {s: region_homology(c, hook_region(s)).total for s in range(-g, g + 1)}
    for s in (-g - 1, g + 1):
        beyond = region_homology(c, hook_region(s)).total
        if beyond != 1:
            logger.warning(f"hook rank {beyond} at s={s}, beyond genus {g}")
    return HookProfile(ranks)


def _check_large(n: int, g: int):
    threshold = max(2 * g - 1, 1)
    if n < threshold:
        raise NTooSmall(f"large surgery needs N >= {threshold} for genus {g}, got {n}")


def spinc_ranks(c: KnotComplex, n: int, profile: Optional[HookProfile] = None) -> Dict[int, int]:
    """HF-hat rank of N-surgery in each spin^c class, labelled by s mod N"""
    profile = profile or hook_profile(c)
    g = max((abs(s) for s in profile.ranks), default=0)
    _check_large(n, g)
    empty = sorted(s for s, r in profile.ranks.items() if r == 0)
    if empty:
        raise NotKnotLike(f"hooks at s={empty} have zero homology")
    ranks = {r: 1 for r in range(n)}
    for s, extra in profile.excess_at().items():
        ranks[s % n] += extra
    return ranks


def large_surgery_rank(c: KnotComplex, n: int) -> int:
    _check_large(n, genus(c))
    return sum(spinc_ranks(c, n).values())


# =============================================================================
# GRADING CASES
# =============================================================================

def grading_case(table: HfkTable) -> Optional[str]:
    """Which of the eight HFK(1)/HFK(0) grading patterns a genus >= 2 table shows.

    x is the generator of least Alexander grading above 1 and m its Maslov
    grading; returns None when there is no such unique x or no pattern fits.
    """
    above = [s for s in table.alexander_gradings if s > 1]
    if not above:
        return None
    a = min(above)
    if table.rank_at(a) != 1:
        return None
    (m,) = table.maslovs(a)
    h1, h0 = table.maslovs(1), table.maslovs(0)

    def other(values: List[int], known: int) -> Optional[int]:
        if len(values) != 2 or known not in values:
            return None
        rest = list(values)
        rest.remove(known)
        return rest[0]

    if m % 2:
        if h1 == [m + 1] and h0 == [m]:
            return "1ai"
        if len(h1) == 1 and h0 == sorted([m - 1, h1[0] - 1, h1[0] - 1]):
            return "1aii"
        if h1 == sorted([m - 1, m - 2]) and h0 == [m - 3]:
            return "1bi"
        x = other(h1, m - 1)
        if x is not None and h0 == sorted([x - 1, x - 1, m - 2]):
            return "1bii"
        return None

    if h1 == [m + 1 - 2 * a] and h0 == [m - 2 * a]:
        return "2ai"
    if len(h1) == 1 and h0 == sorted([m - 2 * a + 1, h1[0] - 1, h1[0] - 1]):
        return "2aii"
    b = other(h1, m - 2 * a + 3)
    if b is not None and h0 == [b - 1]:
        return "2bi"
    if b is not None and h0 == sorted([b - 1, b - 1, m - 2 * a + 2]):
        return "2bii"
    return None
