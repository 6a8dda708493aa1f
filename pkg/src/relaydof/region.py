"""Membership and scaling of demand matrices in the achievable DoF region.

The region is a simple closed polytope over the per-message DoF values:
one total constraint and one share constraint per source and per
destination node, each share proportional to that node's antenna count.
For single-antenna endpoints the shares reduce to an even 1/|V| split.
All comparisons are exact; the boundary is feasible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .analysis import achievable_sum_dof
from .model import DemandError, DemandMatrix, ExtRational, NetworkTopology, validate_demand

__all__ = [
    "Violation",
    "RegionVerdict",
    "ScaleResult",
    "check_demand",
    "max_uniform_scale",
    "verdict_to_obj",
]


@dataclass(frozen=True)
class Violation:
    """One failed constraint: identifier plus both sides of the comparison."""

    constraint: str
    lhs: ExtRational
    rhs: ExtRational


@dataclass(frozen=True)
class RegionVerdict:
    feasible: bool
    violations: tuple[Violation, ...]
    binding: tuple[str, ...]


@dataclass(frozen=True)
class ScaleResult:
    """Largest feasible uniform scaling of a demand pattern."""

    t_star: ExtRational
    scaled: DemandMatrix
    verdict: RegionVerdict


def _constraints(t: NetworkTopology, d: DemandMatrix):
    """Yield (id, lhs, rhs) triples for every region constraint, exactly."""
    errors = validate_demand(t, d)
    if errors:
        raise DemandError("; ".join(errors))
    alpha = achievable_sum_dof(t.effective_sizes()).as_fraction()
    src_antennas = t.source_layer.antenna_profile()
    dst_antennas = t.destination_layer.antenna_profile()
    src_total = sum(src_antennas)
    dst_total = sum(dst_antennas)
    yield "total", d.total, alpha
    for i, a in enumerate(src_antennas):
        yield f"src:{i + 1}", d.row_sum(i), alpha * Fraction(a, src_total)
    for j, a in enumerate(dst_antennas):
        yield f"dst:{j + 1}", d.col_sum(j), alpha * Fraction(a, dst_total)


def check_demand(t: NetworkTopology, d: DemandMatrix) -> RegionVerdict:
    """Exact membership check; reports every violated and binding constraint."""
    violations = []
    binding = []
    for name, lhs, rhs in _constraints(t, d):
        if lhs > rhs:
            violations.append(Violation(name, ExtRational(lhs), ExtRational(rhs)))
        elif lhs == rhs:
            binding.append(name)
    return RegionVerdict(
        feasible=not violations,
        violations=tuple(violations),
        binding=tuple(binding),
    )


def max_uniform_scale(t: NetworkTopology, pattern: DemandMatrix) -> ScaleResult:
    """Scale a nonzero pattern to the region boundary.

    Returns the largest t* >= 0 with t* * pattern feasible; at least one
    constraint is binding at t*.
    """
    if pattern.is_zero:
        raise DemandError("cannot scale a zero demand pattern")
    t_star = None
    for name, lhs, rhs in _constraints(t, pattern):
        if lhs == 0:
            continue
        candidate = rhs / lhs
        if t_star is None or candidate < t_star:
            t_star = candidate
    scaled = pattern.scale(t_star)
    verdict = check_demand(t, scaled)
    return ScaleResult(t_star=ExtRational(t_star), scaled=scaled, verdict=verdict)


def verdict_to_obj(v: RegionVerdict) -> dict:
    return {
        "feasible": v.feasible,
        "violations": [
            {"constraint": x.constraint, "lhs": str(x.lhs), "rhs": str(x.rhs)}
            for x in v.violations
        ],
        "binding": list(v.binding),
    }
