"""Topology families and their sum-DoF scaling-law classification.

A family maps a size parameter n to a concrete finite topology.  Growing
every layer proportionally with a fixed hop count scales the sum DoF
linearly; pinning any layer caps it at a constant; keeping all layer sizes
fixed while the chain gets longer drives it down like 1/n.  The classifier
samples n over a doubling grid, fits log(alpha) against log(n) by least
squares, and snaps the slope to {1, 0, -1} within a fixed tolerance.

This is the only place floating point appears; the sampled alpha values
themselves stay exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .analysis import achievable_sum_dof
from .model import (
    DocumentError,
    ExtRational,
    NetworkTopology,
    LayerSpec,
    scale_antennas,
    topology_from_obj,
)

__all__ = [
    "FamilyError",
    "FamilySpec",
    "ScalingVerdict",
    "FAMILY_KINDS",
    "SAMPLE_GRID",
    "SLOPE_TOLERANCE",
    "parse_family",
    "evaluate_family",
    "classify",
    "antenna_scale_check",
    "sweep_rows",
]

FAMILY_KINDS = (
    "ProportionalFixedK",
    "PinnedLayerFixedK",
    "FixedSizesGrowingK",
    "AntennaScaled",
)

# Doubling grid 16..4096; the three canonical families are well separated
# by the top of this range.
SAMPLE_GRID = tuple(16 * 2**i for i in range(9))
SLOPE_TOLERANCE = 0.15

_TARGETS = (("Linear", 1.0), ("Constant", 0.0), ("Inverse", -1.0))


class FamilyError(DocumentError):
    """Invalid family document or degenerate instantiation."""


@dataclass(frozen=True)
class FamilySpec:
    """Parameterized topology family.

    ``base`` is the per-layer growth profile (proportional and pinned
    kinds) or the single fixed layer size (growing-depth kind);
    ``pinned`` maps 0-based layer indices to constant sizes;
    ``topology`` is the fixed base network of the antenna-scaled kind.
    """

    kind: str
    base: tuple[Fraction, ...] | None = None
    pinned: tuple[tuple[int, int], ...] | None = None
    topology: NetworkTopology | None = None

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise FamilyError(f"unknown family kind {self.kind!r}")
        if self.kind == "AntennaScaled":
            if self.topology is None:
                raise FamilyError("AntennaScaled needs a base topology")
            if not self.topology.is_finite:
                raise FamilyError("AntennaScaled base topology must be finite")
            return
        if self.base is None or len(self.base) == 0:
            raise FamilyError(f"{self.kind} needs a base profile")
        object.__setattr__(self, "base", tuple(Fraction(b) for b in self.base))
        if any(b <= 0 for b in self.base):
            raise FamilyError("base profile entries must be positive")
        if self.kind == "FixedSizesGrowingK":
            if len(self.base) != 1 or self.base[0].denominator != 1:
                raise FamilyError("FixedSizesGrowingK takes a single integer layer size")
        elif len(self.base) < 2:
            raise FamilyError(f"{self.kind} base profile needs at least 2 layers")
        if self.kind == "PinnedLayerFixedK":
            if not self.pinned:
                raise FamilyError("PinnedLayerFixedK needs at least one pinned layer")
            object.__setattr__(self, "pinned", tuple(sorted(self.pinned)))
            for idx, size in self.pinned:
                if not 0 <= idx < len(self.base):
                    raise FamilyError(f"pinned layer {idx} outside base profile")
                if size < 1:
                    raise FamilyError(f"pinned layer {idx}: size must be >= 1")
            if len(self.pinned) >= len(self.base):
                raise FamilyError("pinning every layer leaves nothing to grow")


@dataclass(frozen=True)
class ScalingVerdict:
    """Fitted slope and its class; ``classification`` is None when ambiguous."""

    classification: str | None
    slope_estimate: float
    samples: tuple[tuple[int, ExtRational], ...]


def parse_family(text: str) -> FamilySpec:
    """Parse a family document (UTF-8 JSON)."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FamilyError(f"family document is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "kind" not in obj:
        raise FamilyError("family document must be an object with a 'kind'")
    kind = obj["kind"]
    base = None
    if "base" in obj:
        if not isinstance(obj["base"], list):
            raise FamilyError("'base' must be a list of positive rationals")
        base = []
        for entry in obj["base"]:
            if isinstance(entry, str):
                value = ExtRational(entry)
                if not value.is_finite:
                    raise FamilyError("base profile entries must be finite")
                base.append(value.as_fraction())
            elif isinstance(entry, int) and not isinstance(entry, bool):
                base.append(Fraction(entry))
            else:
                raise FamilyError(f"bad base profile entry {entry!r}")
        base = tuple(base)
    pinned = None
    if "pinned" in obj:
        if not isinstance(obj["pinned"], dict):
            raise FamilyError("'pinned' must map layer indices to sizes")
        try:
            pinned = tuple((int(k), int(v)) for k, v in obj["pinned"].items())
        except (TypeError, ValueError) as exc:
            raise FamilyError("'pinned' must map layer indices to integer sizes") from exc
    topology = None
    if "topology" in obj:
        topology = topology_from_obj(obj["topology"])
    return FamilySpec(kind=kind, base=base, pinned=pinned, topology=topology)


def _round_half_up(q: Fraction) -> int:
    return (2 * q.numerator + q.denominator) // (2 * q.denominator)


def evaluate_family(f: FamilySpec, n: int) -> tuple[NetworkTopology, ExtRational]:
    """Instantiate the family at parameter n and compute its sum DoF."""
    if n < 1:
        raise FamilyError(f"family parameter must be positive, got {n}")
    if f.kind == "AntennaScaled":
        topology = scale_antennas(f.topology, n)
    elif f.kind == "FixedSizesGrowingK":
        size = int(f.base[0])
        layer_count = _round_half_up(Fraction(n, size))
        if layer_count < 2:
            raise FamilyError(f"degenerate instantiation at n={n}: fewer than 2 layers")
        topology = NetworkTopology(tuple(LayerSpec(nodes=size) for _ in range(layer_count)))
    else:
        pinned = dict(f.pinned) if f.pinned else {}
        budget = n - sum(pinned.values())
        if budget < 0:
            budget = 0
        growth_total = sum(b for k, b in enumerate(f.base) if k not in pinned)
        sizes = []
        for k, b in enumerate(f.base):
            if k in pinned:
                sizes.append(pinned[k])
            else:
                sizes.append(max(1, _round_half_up(b * budget / growth_total)))
        topology = NetworkTopology(tuple(LayerSpec(nodes=s) for s in sizes))
    return topology, achievable_sum_dof(topology.effective_sizes())


def classify(f: FamilySpec, grid: tuple[int, ...] = SAMPLE_GRID) -> ScalingVerdict:
    """Fit the log-log slope over the sample grid and snap it to a class."""
    samples = []
    for n in grid:
        _, alpha = evaluate_family(f, n)
        samples.append((n, alpha))
    slope, _ = np.polyfit(
        [math.log(n) for n, _ in samples],
        [math.log(float(alpha)) for _, alpha in samples],
        1,
    )
    slope = float(slope)
    classification = None
    for name, target in _TARGETS:
        if abs(slope - target) <= SLOPE_TOLERANCE:
            classification = name
            break
    return ScalingVerdict(classification=classification, slope_estimate=slope, samples=tuple(samples))


def antenna_scale_check(
    t: NetworkTopology, s: int
) -> tuple[ExtRational, ExtRational, ExtRational]:
    """Sum DoF before and after multiplying every antenna count by s.

    Returns (base value, scaled value, ratio).  The ratio approaches s from
    below as the network grows; it is reported, never asserted to equal s.
    """
    alpha_base = achievable_sum_dof(t.effective_sizes())
    alpha_scaled = achievable_sum_dof(scale_antennas(t, s).effective_sizes())
    return alpha_base, alpha_scaled, alpha_scaled / alpha_base


def sweep_rows(verdict: ScalingVerdict) -> list[tuple[int, int, int, float, float]]:
    """CSV rows (n, alpha_num, alpha_den, log_n, log_alpha) for a verdict."""
    return [
        (n, alpha.numerator, alpha.denominator, math.log(n), math.log(float(alpha)))
        for n, alpha in verdict.samples
    ]
