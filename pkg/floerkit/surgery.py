"""
Floerkit - Surgery Module

Rank of HF-hat for surgeries on a knot, computed from two integers (m, n)
read off the large-surgery ranks of the knot and its mirror. Also decides
whether a complex looks like an L-space knot, an almost L-space knot or
neither, and checks the p + 2q stability statement on sample slopes.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from floerkit.complex import KnotComplex, mirror, require_valid
from floerkit.errors import BadSample, NotCoprime, ParityFailure, WrongClass
from floerkit.invariants import HookProfile, genus, hook_profile, large_surgery_rank

logger = logging.getLogger(__name__)


# =============================================================================
# PEGBOARD PARAMETERS
# =============================================================================

@dataclass(frozen=True)
class PegboardParams:
    m: int   # slope of the non-vertical segment
    n: int   # vertical segments, with multiplicity

    def to_dict(self) -> Dict:
        return {"m": self.m, "n": self.n}


def pegboard_params(c: KnotComplex) -> PegboardParams:
    """(m, n) from R+ = n - m and R- = n + m, the large-surgery excesses of c and its mirror"""
    require_valid(c)
    reflected = mirror(c)
    large = max(2 * genus(c), 2 * genus(reflected)) + 1
    r_plus = large_surgery_rank(c, large) - large
    r_minus = large_surgery_rank(reflected, large) - large
    # n - m = R+ and n + m = R- are both even for a knot
    if r_plus % 2 or r_minus % 2:
        raise ParityFailure(f"R+ = {r_plus} and R- = {r_minus} are not both even")
    params = PegboardParams((r_minus - r_plus) // 2, (r_plus + r_minus) // 2)
    logger.debug(f"pegboard N={large} R+={r_plus} R-={r_minus} -> {params}")
    return params


def canonical_slope(p: int, q: int) -> Tuple[int, int]:
    """Moves the sign of p/q into p; rejects q = 0 and non-reduced fractions"""
    if q == 0:
        raise NotCoprime(f"slope {p}/{q} has zero denominator")
    if q < 0:
        p, q = -p, -q
    if gcd(p, q) != 1:
        raise NotCoprime(f"slope {p}/{q} is not in lowest terms")
    return p, q


def parse_slope(text: str) -> Tuple[int, int]:
    """'7/2' or '5' -> (p, q)"""
    head, _, tail = text.strip().partition("/")
    try:
        return int(head), int(tail) if tail else 1
    except ValueError:
        raise NotCoprime(f"cannot read slope {text!r}") from None


def surgery_rank(params: PegboardParams, p: int, q: int) -> int:
    p, q = canonical_slope(p, q)
    return abs(p - q * params.m) + params.n * q


# =============================================================================
# DETECTION
# =============================================================================

class Verdict(Enum):
    LSPACE = "LSpace"
    ALMOST_LSPACE = "AlmostLSpace"
    NEITHER = "Neither"


@dataclass
class Detection:
    verdict: Verdict
    witness: HookProfile

    def __str__(self) -> str:
        return f"{self.verdict.value}; hook profile {self.witness}"

    def to_dict(self) -> Dict:
        return {"verdict": self.verdict.value, "hook_profile": self.witness.to_dict()}


def detect(c: KnotComplex) -> Detection:
    profile = hook_profile(c)
    extra = profile.excess_at()
    if not extra:
        verdict = Verdict.LSPACE
    elif extra == {0: 2}:
        verdict = Verdict.ALMOST_LSPACE
    else:
        verdict = Verdict.NEITHER
    return Detection(verdict, profile)


# =============================================================================
# STABILITY
# =============================================================================

@dataclass
class SampleResult:
    p: int
    q: int
    expected: int
    actual: int

    @property
    def ok(self) -> bool:
        return self.expected == self.actual

    def to_dict(self) -> Dict:
        return {"p": self.p, "q": self.q, "expected": self.expected,
                "actual": self.actual, "ok": self.ok}


@dataclass
class StabilityReport:
    verdict: Verdict
    params: PegboardParams
    results: List[SampleResult] = field(default_factory=list)
    boundary: Optional[SampleResult] = None

    @property
    def failures(self) -> List[SampleResult]:
        checked = self.results + ([self.boundary] if self.boundary else [])
        return [r for r in checked if not r.ok]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict:
        return {
            "verdict": self.verdict.value,
            "params": self.params.to_dict(),
            "samples": [r.to_dict() for r in self.results],
            "boundary": self.boundary.to_dict() if self.boundary else None,
            "ok": self.ok,
        }


def stability_check(c: KnotComplex, samples: Sequence[Tuple[int, int]]) -> StabilityReport:
    """Checks rank = p + 2q (almost L-space) or rank = p (L-space) for p/q >= 2g - 1"""
    verdict = detect(c).verdict
    if verdict is Verdict.NEITHER:
        raise WrongClass("stability check needs an L-space or almost L-space complex")
    g = genus(c)
    for p, q in samples:
        if p <= 0 or q <= 0 or p < (2 * g - 1) * q:
            raise BadSample(f"sample {p}/{q} is outside p/q >= {2 * g - 1} with p, q > 0")

    params = pegboard_params(c)
    report = StabilityReport(verdict, params)
    for p, q in samples:
        expected = p + 2 * q if verdict is Verdict.ALMOST_LSPACE else p
        report.results.append(SampleResult(p, q, expected, surgery_rank(params, p, q)))

    # integer surgery just below the stable range; meaningless for g <= 1
    if verdict is Verdict.LSPACE and g >= 2:
        report.boundary = SampleResult(2 * g - 2, 1, 2 * g, surgery_rank(params, 2 * g - 2, 1))

    for failure in report.failures:
        logger.warning(f"stability failure at {failure.p}/{failure.q}: "
                       f"expected {failure.expected}, got {failure.actual}")
    return report
