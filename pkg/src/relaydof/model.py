"""Topology and demand model with exact extended-rational arithmetic.

A layered relay network is described purely by its size profile: an ordered
chain of layers where layer 0 holds the sources, the last layer holds the
destinations, and every layer in between holds relays.  A layer is either a
node count (possibly the symbolic value ``inf``) or an explicit list of
per-node antenna counts.  Everything downstream works on exact numbers:
finite values are ``fractions.Fraction`` and the single infinite value is
symbolic, so identities can be asserted with ``==`` instead of tolerances.

All types are immutable after construction and all operations are pure
functions, safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Union

__all__ = [
    "Infinity",
    "INFINITY",
    "ExtCount",
    "ExtRational",
    "DocumentError",
    "TopologyError",
    "DemandError",
    "LayerSpec",
    "NetworkTopology",
    "DemandMatrix",
    "parse_topology",
    "serialize_topology",
    "topology_to_obj",
    "parse_demand",
    "serialize_demand",
    "demand_to_obj",
    "validate_demand",
    "virtual_node_map",
    "antenna_split",
    "scale_antennas",
]


class DocumentError(ValueError):
    """Bad input document or value that fails structural validation."""


class TopologyError(DocumentError):
    """Invalid topology document or topology-level precondition failure."""


class DemandError(DocumentError):
    """Invalid demand document, or a demand that an operation cannot accept."""


class Infinity:
    """Symbolic positive infinity for node counts and DoF values.

    Orders strictly above every int and Fraction, so ``min``/``max`` work on
    mixed sequences.  Use the module singleton ``INFINITY``.
    """

    __slots__ = ()

    def __repr__(self):
        return "inf"

    def __eq__(self, other):
        if isinstance(other, Infinity):
            return True
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __hash__(self):
        return hash(float("inf"))

    def __lt__(self, other):
        if isinstance(other, (int, Fraction, Infinity)):
            return False
        return NotImplemented

    def __le__(self, other):
        if isinstance(other, Infinity):
            return True
        if isinstance(other, (int, Fraction)):
            return False
        return NotImplemented

    def __gt__(self, other):
        if isinstance(other, Infinity):
            return False
        if isinstance(other, (int, Fraction)):
            return True
        return NotImplemented

    def __ge__(self, other):
        if isinstance(other, (int, Fraction, Infinity)):
            return True
        return NotImplemented


INFINITY = Infinity()

# A layer size: a positive integer or the symbolic infinity.
ExtCount = Union[int, Infinity]


class ExtRational:
    """An exact rational extended with symbolic positive infinity.

    Finite values are stored as ``Fraction`` (always in lowest terms), the
    infinite value as a marker.  Arithmetic follows the extended rules used
    throughout the analysis: ``x + inf == inf``, ``1/inf == 0``, and the
    reciprocal of 0 is ``inf``.  Indeterminate combinations (``inf - inf``,
    ``inf * 0``, ``inf / inf``) raise ``ArithmeticError`` rather than
    guessing.
    """

    __slots__ = ("_value",)

    def __init__(self, numerator=0, denominator=None):
        if isinstance(numerator, Infinity):
            if denominator is not None:
                raise TypeError("infinite value takes no denominator")
            object.__setattr__(self, "_value", None)
        elif isinstance(numerator, ExtRational):
            if denominator is not None:
                raise TypeError("copy construction takes no denominator")
            object.__setattr__(self, "_value", numerator._value)
        elif isinstance(numerator, str):
            if denominator is not None:
                raise TypeError("string construction takes no denominator")
            text = numerator.strip()
            if text == "inf":
                object.__setattr__(self, "_value", None)
            else:
                try:
                    object.__setattr__(self, "_value", Fraction(text))
                except (ValueError, ZeroDivisionError) as exc:
                    raise DocumentError(f"bad rational literal {numerator!r}") from exc
        else:
            object.__setattr__(
                self, "_value", Fraction(numerator, denominator if denominator is not None else 1)
            )

    # -- predicates and accessors ------------------------------------------

    @property
    def is_finite(self) -> bool:
        return self._value is not None

    def as_fraction(self) -> Fraction:
        if self._value is None:
            raise ArithmeticError("infinite value has no Fraction form")
        return self._value

    @property
    def numerator(self) -> int:
        return self.as_fraction().numerator

    @property
    def denominator(self) -> int:
        return self.as_fraction().denominator

    def reciprocal(self) -> "ExtRational":
        if self._value is None:
            return ExtRational(0)
        if self._value == 0:
            return ExtRational(INFINITY)
        return ExtRational(1 / self._value)

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _coerce(other):
        if isinstance(other, ExtRational):
            return other._value
        if isinstance(other, (int, Fraction)):
            return Fraction(other)
        if isinstance(other, Infinity):
            return None
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        if self._value is None or v is None:
            return ExtRational(INFINITY)
        return ExtRational(self._value + v)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        if self._value is None and v is None:
            raise ArithmeticError("inf - inf is undefined")
        if self._value is None:
            return ExtRational(INFINITY)
        if v is None:
            raise ArithmeticError("finite minus infinite leaves the domain")
        return ExtRational(self._value - v)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return ExtRational(v if v is not None else INFINITY) - self

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        if self._value is None or v is None:
            finite = v if self._value is None else self._value
            if finite is not None and finite == 0:
                raise ArithmeticError("inf * 0 is undefined")
            if finite is not None and finite < 0:
                raise ArithmeticError("inf times a negative leaves the domain")
            return ExtRational(INFINITY)
        return ExtRational(self._value * v)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        if v is None:
            if self._value is None:
                raise ArithmeticError("inf / inf is undefined")
            return ExtRational(0)
        if v == 0:
            if self._value is not None and self._value == 0:
                raise ArithmeticError("0 / 0 is undefined")
            return ExtRational(INFINITY)
        if self._value is None:
            if v < 0:
                raise ArithmeticError("inf over a negative leaves the domain")
            return ExtRational(INFINITY)
        return ExtRational(self._value / v)

    def __rtruediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return ExtRational(v if v is not None else INFINITY) / self

    # -- ordering -----------------------------------------------------------

    def __eq__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return self._value == v

    def __hash__(self):
        return hash(self._value) if self._value is not None else hash(float("inf"))

    def __lt__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        if self._value is None:
            return False
        if v is None:
            return True
        return self._value < v

    def __le__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        if v is None:
            return True
        if self._value is None:
            return False
        return self._value <= v

    def __gt__(self, other):
        result = self.__le__(other)
        return NotImplemented if result is NotImplemented else not result

    def __ge__(self, other):
        result = self.__lt__(other)
        return NotImplemented if result is NotImplemented else not result

    def __bool__(self):
        return self._value is None or self._value != 0

    def __float__(self):
        return float("inf") if self._value is None else float(self._value)

    def __str__(self):
        return "inf" if self._value is None else str(self._value)

    def __repr__(self):
        return f"ExtRational({str(self)!r})"


def _ext_count_to_obj(value: ExtCount):
    return "inf" if isinstance(value, Infinity) else value


@dataclass(frozen=True)
class LayerSpec:
    """One layer of the chain: a node count or a per-node antenna profile.

    Exactly one of ``nodes`` / ``antennas`` is set.  An antenna profile
    implies a finite layer with as many nodes as list entries; infinite
    layers are single-antenna by definition.
    """

    nodes: ExtCount | None = None
    antennas: tuple[int, ...] | None = None

    def __post_init__(self):
        if (self.nodes is None) == (self.antennas is None):
            raise TopologyError("layer needs exactly one of 'nodes' or 'antennas'")
        if self.antennas is not None:
            object.__setattr__(self, "antennas", tuple(self.antennas))
            if len(self.antennas) == 0:
                raise TopologyError("antenna list must be nonempty")
            for a in self.antennas:
                if not isinstance(a, int) or isinstance(a, bool) or a < 1:
                    raise TopologyError(f"antenna count must be a positive integer, got {a!r}")
        else:
            n = self.nodes
            if isinstance(n, Infinity):
                return
            if not isinstance(n, int) or isinstance(n, bool):
                raise TopologyError(f"node count must be a positive integer or 'inf', got {n!r}")
            if n == 0:
                raise TopologyError("zero nodes")
            if n < 0:
                raise TopologyError(f"node count must be positive, got {n}")

    @property
    def is_infinite(self) -> bool:
        return isinstance(self.nodes, Infinity)

    @property
    def node_count(self) -> ExtCount:
        return len(self.antennas) if self.antennas is not None else self.nodes

    @property
    def effective_size(self) -> ExtCount:
        """Antenna total for antenna layers, node count otherwise."""
        return sum(self.antennas) if self.antennas is not None else self.nodes

    def antenna_profile(self) -> tuple[int, ...]:
        """Per-node antenna counts; finite layers only."""
        if self.antennas is not None:
            return self.antennas
        if self.is_infinite:
            raise TopologyError("infinite layer has no antenna profile")
        return (1,) * self.nodes


@dataclass(frozen=True)
class NetworkTopology:
    """Ordered layer chain: sources, relay layers, destinations."""

    layers: tuple[LayerSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if len(self.layers) < 2:
            raise TopologyError("topology needs at least a source and a destination layer")

    @property
    def relay_count(self) -> int:
        """Number of relay layers (hop count minus one)."""
        return len(self.layers) - 2

    @property
    def is_finite(self) -> bool:
        return not any(layer.is_infinite for layer in self.layers)

    def effective_sizes(self) -> tuple[ExtCount, ...]:
        """Per-layer effective size: antennas summed, infinite kept symbolic."""
        return tuple(layer.effective_size for layer in self.layers)

    @property
    def source_layer(self) -> LayerSpec:
        return self.layers[0]

    @property
    def destination_layer(self) -> LayerSpec:
        return self.layers[-1]


@dataclass(frozen=True)
class DemandMatrix:
    """Per-message DoF values keyed by (destination, source), 0-based.

    Absent entries mean zero; explicit zeros are dropped at construction.
    Values are finite Fractions; sign and index bounds are checked against a
    topology by :func:`validate_demand`, not here.
    """

    entries: Mapping[tuple[int, int], Fraction]

    def __post_init__(self):
        cleaned = {}
        for key, value in self.entries.items():
            j, i = key
            if isinstance(value, ExtRational):
                if not value.is_finite:
                    raise DemandError(f"demand entry (dst {j + 1}, src {i + 1}) must be finite")
                value = value.as_fraction()
            elif isinstance(value, Infinity):
                raise DemandError(f"demand entry (dst {j + 1}, src {i + 1}) must be finite")
            else:
                value = Fraction(value)
            if value != 0:
                cleaned[(int(j), int(i))] = value
        object.__setattr__(self, "entries", MappingProxyType(cleaned))

    @property
    def total(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))

    def row_sum(self, source: int) -> Fraction:
        """Total DoF leaving one source (sum over destinations)."""
        return sum((v for (j, i), v in self.entries.items() if i == source), Fraction(0))

    def col_sum(self, destination: int) -> Fraction:
        """Total DoF entering one destination (sum over sources)."""
        return sum((v for (j, i), v in self.entries.items() if j == destination), Fraction(0))

    def scale(self, factor) -> "DemandMatrix":
        if isinstance(factor, ExtRational):
            factor = factor.as_fraction()
        factor = Fraction(factor)
        return DemandMatrix({k: v * factor for k, v in self.entries.items()})

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, DemandMatrix):
            return NotImplemented
        return dict(self.entries) == dict(other.entries)


# ---------------------------------------------------------------------------
# Document parsing and serialization
#
# Topology: {"layers":[{"nodes": <int|"inf">} | {"antennas":[<int>,...]}, ...]}
# Demand:   {"demands":[{"dst": j, "src": i, "dof": "p/q"}, ...]}, 1-based.
# ---------------------------------------------------------------------------


def _layer_from_obj(obj, index: int) -> LayerSpec:
    if not isinstance(obj, dict):
        raise TopologyError(f"layer {index}: expected an object, got {type(obj).__name__}")
    keys = set(obj)
    if keys == {"nodes"}:
        raw = obj["nodes"]
        if raw == "inf":
            return LayerSpec(nodes=INFINITY)
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise TopologyError(f"layer {index}: 'nodes' must be an integer or \"inf\"")
        if raw == 0:
            raise TopologyError(f"layer {index}: zero nodes")
        if raw < 0:
            raise TopologyError(f"layer {index}: node count must be positive")
        return LayerSpec(nodes=raw)
    if keys == {"antennas"}:
        raw = obj["antennas"]
        if not isinstance(raw, list) or not raw:
            raise TopologyError(f"layer {index}: 'antennas' must be a nonempty list")
        for a in raw:
            if a == "inf":
                raise TopologyError(f"layer {index}: infinite layer cannot carry an antenna list")
            if isinstance(a, bool) or not isinstance(a, int) or a < 1:
                raise TopologyError(f"layer {index}: antenna counts must be positive integers")
        return LayerSpec(antennas=tuple(raw))
    raise TopologyError(f"layer {index}: expected exactly one of 'nodes' or 'antennas'")


def topology_from_obj(obj) -> NetworkTopology:
    if not isinstance(obj, dict) or "layers" not in obj:
        raise TopologyError("topology document must be an object with a 'layers' list")
    layers = obj["layers"]
    if not isinstance(layers, list):
        raise TopologyError("'layers' must be a list")
    if len(layers) < 2:
        raise TopologyError("topology needs at least 2 layers")
    return NetworkTopology(tuple(_layer_from_obj(layer, k) for k, layer in enumerate(layers)))


def parse_topology(text: str) -> NetworkTopology:
    """Parse a topology document (UTF-8 JSON) into a validated topology."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TopologyError(f"topology document is not valid JSON: {exc}") from exc
    return topology_from_obj(obj)


def topology_to_obj(t: NetworkTopology) -> dict:
    layers = []
    for layer in t.layers:
        if layer.antennas is not None:
            layers.append({"antennas": list(layer.antennas)})
        else:
            layers.append({"nodes": _ext_count_to_obj(layer.nodes)})
    return {"layers": layers}


def serialize_topology(t: NetworkTopology) -> str:
    return json.dumps(topology_to_obj(t))


def demand_from_obj(obj) -> DemandMatrix:
    if not isinstance(obj, dict) or "demands" not in obj:
        raise DemandError("demand document must be an object with a 'demands' list")
    raw = obj["demands"]
    if not isinstance(raw, list):
        raise DemandError("'demands' must be a list")
    entries: dict[tuple[int, int], Fraction] = {}
    for pos, item in enumerate(raw):
        if not isinstance(item, dict) or set(item) != {"dst", "src", "dof"}:
            raise DemandError(f"demand entry {pos}: expected keys dst, src, dof")
        j, i, dof = item["dst"], item["src"], item["dof"]
        for name, idx in (("dst", j), ("src", i)):
            if isinstance(idx, bool) or not isinstance(idx, int) or idx < 1:
                raise DemandError(f"demand entry {pos}: '{name}' must be a 1-based integer index")
        if isinstance(dof, str):
            value = ExtRational(dof)
            if not value.is_finite:
                raise DemandError(f"demand entry {pos}: 'dof' must be finite")
            value = value.as_fraction()
        elif isinstance(dof, int) and not isinstance(dof, bool):
            value = Fraction(dof)
        else:
            raise DemandError(f"demand entry {pos}: 'dof' must be a rational string")
        key = (j - 1, i - 1)
        if key in entries:
            raise DemandError(f"demand entry {pos}: duplicate (dst {j}, src {i})")
        entries[key] = value
    return DemandMatrix(entries)


def parse_demand(text: str) -> DemandMatrix:
    """Parse a demand document (UTF-8 JSON, 1-based indices) into a matrix."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DemandError(f"demand document is not valid JSON: {exc}") from exc
    return demand_from_obj(obj)


def demand_to_obj(d: DemandMatrix) -> dict:
    demands = [
        {"dst": j + 1, "src": i + 1, "dof": str(v)}
        for (j, i), v in sorted(d.entries.items())
    ]
    return {"demands": demands}


def serialize_demand(d: DemandMatrix) -> str:
    return json.dumps(demand_to_obj(d))


def validate_demand(t: NetworkTopology, d: DemandMatrix) -> list[str]:
    """Index-bound and sign checks against a topology; [] means ok.

    Region membership is a separate question (see ``relaydof.region``).
    """
    errors = []
    if t.source_layer.is_infinite:
        errors.append("source layer is infinite; demands need finite endpoints")
    if t.destination_layer.is_infinite:
        errors.append("destination layer is infinite; demands need finite endpoints")
    if errors:
        return errors
    n_src = t.source_layer.node_count
    n_dst = t.destination_layer.node_count
    for (j, i), value in sorted(d.entries.items()):
        if not 0 <= j < n_dst:
            errors.append(f"demand (dst {j + 1}, src {i + 1}): destination index out of range 1..{n_dst}")
        if not 0 <= i < n_src:
            errors.append(f"demand (dst {j + 1}, src {i + 1}): source index out of range 1..{n_src}")
        if value < 0:
            errors.append(f"demand (dst {j + 1}, src {i + 1}): negative value {value}")
    return errors


def virtual_node_map(layer: LayerSpec) -> tuple[int, ...]:
    """Map each virtual (antenna-split) node index to its physical node."""
    return tuple(
        node for node, count in enumerate(layer.antenna_profile()) for _ in range(count)
    )


def antenna_split(t: NetworkTopology) -> NetworkTopology:
    """Reduce multi-antenna layers to virtual single-antenna node counts.

    Each antenna becomes one virtual node, so every analysis and schedule of
    a multi-antenna network is the single-antenna analysis of this network.
    """
    return NetworkTopology(
        tuple(LayerSpec(nodes=layer.effective_size) for layer in t.layers)
    )


def scale_antennas(t: NetworkTopology, s: int) -> NetworkTopology:
    """Multiply every node's antenna count by ``s`` (finite topologies only)."""
    if not isinstance(s, int) or s < 1:
        raise TopologyError(f"antenna scale factor must be a positive integer, got {s!r}")
    layers = []
    for k, layer in enumerate(t.layers):
        if layer.is_infinite:
            raise TopologyError(f"layer {k}: cannot antenna-scale an infinite layer")
        layers.append(LayerSpec(antennas=tuple(a * s for a in layer.antenna_profile())))
    return NetworkTopology(tuple(layers))
