"""Decode-and-forward phase schedules and message split/merge plans.

The scheme runs one phase per hop, strictly sequential (half duplex).  In
phase k the layer-k nodes act as an X network toward layer k+1: every
(transmitter, receiver) pair carries one message of exactly
T_k/(S_k + S_{k+1} - 1) symbols.  Relays never add information, which pins
the block-length ratios T_k/T_{k-1}; the smallest T_0 that makes every
block length and per-pair bit count integral gives the canonical schedule.

The split plan is the bit-accounting DAG behind those phases: each source
message is split evenly over the first relay layer, every relay merges its
inbound bits and re-splits them evenly toward the next layer, and the last
relay layer only reorganizes bits by destination.  Demands below capacity
are topped up with explicitly marked padding so the uniform structure (and
hence the X-network rate guarantee) is preserved.

Multi-antenna nodes are handled by antenna splitting: plans are built
entirely on the virtual single-antenna network, and
``relaydof.model.virtual_node_map`` recovers the physical node behind each
virtual endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .analysis import achievable_sum_dof
from .model import (
    DemandError,
    DemandMatrix,
    ExtRational,
    Infinity,
    NetworkTopology,
    TopologyError,
    demand_to_obj,
)
from .region import check_demand

__all__ = [
    "PhasePlan",
    "SourceMessage",
    "PaddingMessage",
    "PhaseMessage",
    "DestinationBin",
    "SplitEdge",
    "SplitPlan",
    "Schedule",
    "CheckResult",
    "VerificationReport",
    "phase_ratios",
    "recurrence_sum_dof",
    "integer_schedule",
    "splitting_plan",
    "verify_schedule",
    "schedule_to_obj",
    "plan_to_dot",
]


@dataclass(frozen=True, slots=True)
class PhasePlan:
    """One hop's X-network phase: who transmits, for how long, at what rate."""

    hop: int
    tx_count: int
    rx_count: int
    block_length: int
    per_pair_dof: Fraction
    per_pair_bits: Fraction


@dataclass(frozen=True, slots=True)
class SourceMessage:
    """Payload bits a source owes one destination (virtual indices, 0-based)."""

    dst: int
    src: int
    bits: Fraction


@dataclass(frozen=True, slots=True)
class PaddingMessage:
    """Dummy bits that top a source up to the uniform outbound budget."""

    src: int
    bits: Fraction


@dataclass(frozen=True, slots=True)
class PhaseMessage:
    """The phase-k X-network message from layer-k node tx to node rx."""

    phase: int
    tx: int
    rx: int
    bits: Fraction


@dataclass(frozen=True, slots=True)
class DestinationBin:
    """What one destination reassembles: real bits per source, plus padding."""

    dst: int
    received: tuple[tuple[int, Fraction], ...]
    padding_bits: Fraction

    @property
    def bits(self) -> Fraction:
        return sum((b for _, b in self.received), Fraction(0)) + self.padding_bits


@dataclass(frozen=True, slots=True)
class SplitEdge:
    head: str
    tail: str
    bits: Fraction


@dataclass(frozen=True)
class SplitPlan:
    """Layered split/merge DAG with exact bit shares on every node and edge.

    Everything lives on the virtual (antenna-split) network, so a
    multi-antenna topology and its expanded single-antenna form produce
    identical plans; :func:`relaydof.model.virtual_node_map` recovers the
    physical node behind each virtual endpoint.  ``bits_per_dof`` converts
    demand DoF values into bits (it equals the schedule's total delay).
    """

    sizes: tuple[int, ...]
    demand: DemandMatrix
    sources: tuple[SourceMessage, ...]
    paddings: tuple[PaddingMessage, ...]
    transfers: tuple[PhaseMessage, ...]
    sinks: tuple[DestinationBin, ...]
    edges: tuple[SplitEdge, ...]
    total_bits: int
    padding_bits: Fraction
    bits_per_dof: Fraction


@dataclass(frozen=True)
class Schedule:
    """Integer phase plan plus the split/merge plan that fills it."""

    phases: tuple[PhasePlan, ...]
    total_delay: int
    total_bits: int
    sum_dof: Fraction
    split_plan: SplitPlan


@dataclass(frozen=True, slots=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]


# -- node identifiers (1-based, matching the document conventions) ----------


def _msg_id(dst: int, src: int) -> str:
    return f"msg[{dst + 1},{src + 1}]"


def _pad_id(src: int) -> str:
    return f"pad[{src + 1}]"


def _phase_id(phase: int, tx: int, rx: int) -> str:
    return f"ph{phase}[{tx + 1}->{rx + 1}]"


def _sink_id(dst: int) -> str:
    return f"dst[{dst + 1}]"


# -- schedule construction ---------------------------------------------------


def _finite_sizes(t: NetworkTopology) -> list[int]:
    sizes = []
    for k, s in enumerate(t.effective_sizes()):
        if isinstance(s, Infinity):
            raise TopologyError(f"layer {k}: schedules are finite-network objects")
        sizes.append(s)
    if len(sizes) < 3:
        raise TopologyError("schedule synthesis needs at least one relay layer")
    return sizes


def phase_ratios(sizes: Sequence[int]) -> list[Fraction]:
    """Block-length ratios T_k/T_0, from the no-new-information recurrence.

    Built hop by hop: each relay layer must forward exactly the bits it
    decoded, so T_k * S_{k+1}/(S_k + S_{k+1} - 1) is constant across k.
    """
    sizes = list(sizes)
    if len(sizes) < 3:
        raise TopologyError("phase ratios need at least one relay layer")
    for k, s in enumerate(sizes):
        if isinstance(s, Infinity):
            raise TopologyError(f"layer {k}: schedules are finite-network objects")
        if not isinstance(s, int) or s < 1:
            raise TopologyError(f"layer {k}: sizes must be positive integers")
    ratios = [Fraction(1)]
    for k in range(1, len(sizes) - 1):
        step = Fraction(sizes[k - 1], sizes[k + 1]) * Fraction(
            sizes[k] + sizes[k + 1] - 1, sizes[k - 1] + sizes[k] - 1
        )
        ratios.append(ratios[-1] * step)
    return ratios


def recurrence_sum_dof(sizes: Sequence[int]) -> ExtRational:
    """Sum DoF by the schedule route: first-hop X DoF over the delay ratio sum.

    Deliberately avoids the harmonic closed form, so it can serve as an
    independent oracle for ``achievable_sum_dof``.
    """
    ratios = phase_ratios(sizes)
    first_hop = Fraction(sizes[0] * sizes[1], sizes[0] + sizes[1] - 1)
    return ExtRational(first_hop / sum(ratios))


def _integer_phases(sizes: list[int]) -> list[PhasePlan]:
    ratios = phase_ratios(sizes)
    pair_counts = [sizes[k] + sizes[k + 1] - 1 for k in range(len(sizes) - 1)]
    per_unit = [r / c for r, c in zip(ratios, pair_counts)]
    t0 = math.lcm(*(q.denominator for q in per_unit))
    phases = []
    for k, (r, c) in enumerate(zip(ratios, pair_counts)):
        block = r * t0
        assert block.denominator == 1
        phases.append(
            PhasePlan(
                hop=k,
                tx_count=sizes[k],
                rx_count=sizes[k + 1],
                block_length=int(block),
                per_pair_dof=Fraction(1, c),
                per_pair_bits=Fraction(int(block), c),
            )
        )
    return phases


def _virtualize_demand(t: NetworkTopology, demand: DemandMatrix) -> dict[tuple[int, int], Fraction]:
    """Spread each physical demand evenly over its endpoints' antennas."""
    src_antennas = t.source_layer.antenna_profile()
    dst_antennas = t.destination_layer.antenna_profile()
    src_offsets = [0]
    for a in src_antennas:
        src_offsets.append(src_offsets[-1] + a)
    dst_offsets = [0]
    for a in dst_antennas:
        dst_offsets.append(dst_offsets[-1] + a)
    entries: dict[tuple[int, int], Fraction] = {}
    for (j, i), value in demand.entries.items():
        share = value / (src_antennas[i] * dst_antennas[j])
        for jv in range(dst_offsets[j], dst_offsets[j + 1]):
            for iv in range(src_offsets[i], src_offsets[i + 1]):
                entries[(jv, iv)] = share
    return entries


def _build_plan(
    sizes: list[int],
    phases: list[PhasePlan],
    entries: dict[tuple[int, int], Fraction],
) -> SplitPlan:
    hops = len(sizes) - 1
    per_pair = [p.per_pair_bits for p in phases]
    total_bits = per_pair[0] * sizes[0] * sizes[1]
    assert total_bits.denominator == 1
    total_bits = int(total_bits)
    delay = Fraction(sum(p.block_length for p in phases))

    demand = DemandMatrix(entries)
    rows = [demand.row_sum(i) for i in range(sizes[0])]
    cols = [demand.col_sum(j) for j in range(sizes[-1])]

    sources = tuple(
        SourceMessage(dst=j, src=i, bits=v * delay)
        for (j, i), v in sorted(demand.entries.items())
    )
    source_budget = Fraction(total_bits, sizes[0])
    paddings = tuple(
        PaddingMessage(src=i, bits=source_budget - rows[i] * delay)
        for i in range(sizes[0])
        if source_budget - rows[i] * delay > 0
    )

    transfers = []
    for k in range(hops):
        for tx in range(sizes[k]):
            for rx in range(sizes[k + 1]):
                transfers.append(PhaseMessage(phase=k, tx=tx, rx=rx, bits=per_pair[k]))

    sink_budget = Fraction(total_bits, sizes[-1])
    sinks = tuple(
        DestinationBin(
            dst=j,
            received=tuple(
                (i, demand.entries[(j, i)] * delay)
                for i in range(sizes[0])
                if (j, i) in demand.entries
            ),
            padding_bits=sink_budget - cols[j] * delay,
        )
        for j in range(sizes[-1])
    )

    edges = []
    # phase 0: every source message and padding block splits evenly over
    # the first relay layer
    for msg in sources:
        share = msg.bits / sizes[1]
        for n in range(sizes[1]):
            edges.append(SplitEdge(_msg_id(msg.dst, msg.src), _phase_id(0, msg.src, n), share))
    for pad in paddings:
        share = pad.bits / sizes[1]
        for n in range(sizes[1]):
            edges.append(SplitEdge(_pad_id(pad.src), _phase_id(0, pad.src, n), share))
    # relay layers: merge everything inbound, re-split evenly outbound; the
    # last layer's "split" is the reorganization by destination
    for k in range(1, hops):
        share = per_pair[k] / sizes[k - 1]
        for n in range(sizes[k]):
            for tx_prev in range(sizes[k - 1]):
                for rx in range(sizes[k + 1]):
                    edges.append(
                        SplitEdge(_phase_id(k - 1, tx_prev, n), _phase_id(k, n, rx), share)
                    )
    # destination bins collect their full inbound messages
    for j in range(sizes[-1]):
        for n in range(sizes[-2]):
            edges.append(SplitEdge(_phase_id(hops - 1, n, j), _sink_id(j), per_pair[-1]))

    return SplitPlan(
        sizes=tuple(sizes),
        demand=demand,
        sources=sources,
        paddings=paddings,
        transfers=tuple(transfers),
        sinks=sinks,
        edges=tuple(edges),
        total_bits=total_bits,
        padding_bits=total_bits - demand.total * delay,
        bits_per_dof=delay,
    )


def integer_schedule(t: NetworkTopology, demand: DemandMatrix | None = None) -> Schedule:
    """Canonical integer schedule; smallest T_0 keeping all bit counts whole.

    Without a demand, the plan carries the uniform boundary demand (every
    virtual endpoint pair equal), which has no padding.  Plans are built on
    the antenna-split network, so a multi-antenna topology and its expanded
    single-antenna form yield identical schedules.
    """
    sizes = _finite_sizes(t)
    phases = _integer_phases(sizes)
    total_bits = int(phases[0].per_pair_bits * sizes[0] * sizes[1])
    total_delay = sum(p.block_length for p in phases)
    sum_dof = Fraction(total_bits, total_delay)

    if demand is None:
        share = sum_dof / (sizes[0] * sizes[-1])
        entries = {(j, i): share for j in range(sizes[-1]) for i in range(sizes[0])}
    else:
        verdict = check_demand(t, demand)
        if not verdict.feasible:
            failed = ", ".join(v.constraint for v in verdict.violations)
            raise DemandError(f"demand is outside the achievable region ({failed})")
        if demand.is_zero:
            raise DemandError("cannot build a split plan for a zero demand")
        entries = _virtualize_demand(t, demand)

    plan = _build_plan(sizes, phases, entries)
    return Schedule(
        phases=tuple(phases),
        total_delay=total_delay,
        total_bits=total_bits,
        sum_dof=sum_dof,
        split_plan=plan,
    )


def splitting_plan(t: NetworkTopology, demand: DemandMatrix) -> SplitPlan:
    """Split/merge DAG for a feasible demand (boundary allowed)."""
    return integer_schedule(t, demand).split_plan


# -- verification -------------------------------------------------------------


def verify_schedule(s: Schedule) -> VerificationReport:
    """Re-derive the schedule's defining identities and report each one.

    Failures are reported, never raised.
    """
    sizes = [p.tx_count for p in s.phases] + [s.phases[-1].rx_count]
    hops = len(s.phases)
    plan = s.split_plan
    checks = []

    # (1) forwarding recurrence between consecutive phases
    bad_hops = []
    for k in range(1, hops):
        lhs = Fraction(s.phases[k - 1].block_length * sizes[k - 1], sizes[k - 1] + sizes[k] - 1)
        rhs = Fraction(s.phases[k].block_length * sizes[k + 1], sizes[k] + sizes[k + 1] - 1)
        if lhs != rhs:
            bad_hops.append(k)
    checks.append(
        CheckResult(
            "phase-recurrence",
            not bad_hops,
            "" if not bad_hops else f"forwarding mismatch at hop(s) {bad_hops}",
        )
    )

    # (2) bit conservation: edge sums must reproduce every node total, each
    # relay node forwards exactly what it decoded, each phase carries the
    # same total
    inbound: dict[str, Fraction] = {}
    outbound: dict[str, Fraction] = {}
    for e in plan.edges:
        outbound[e.head] = outbound.get(e.head, Fraction(0)) + e.bits
        inbound[e.tail] = inbound.get(e.tail, Fraction(0)) + e.bits
    bad_nodes = []
    for msg in plan.sources:
        if outbound.get(_msg_id(msg.dst, msg.src), Fraction(0)) != msg.bits:
            bad_nodes.append(_msg_id(msg.dst, msg.src))
    for pad in plan.paddings:
        if outbound.get(_pad_id(pad.src), Fraction(0)) != pad.bits:
            bad_nodes.append(_pad_id(pad.src))
    for tr in plan.transfers:
        node = _phase_id(tr.phase, tr.tx, tr.rx)
        if inbound.get(node, Fraction(0)) != tr.bits:
            bad_nodes.append(node)
        if outbound.get(node, Fraction(0)) != tr.bits:
            bad_nodes.append(node)
    for sink in plan.sinks:
        if inbound.get(_sink_id(sink.dst), Fraction(0)) != sink.bits:
            bad_nodes.append(_sink_id(sink.dst))
    relay_totals: dict[tuple[int, int], list[Fraction]] = {}
    for tr in plan.transfers:
        if tr.phase >= 1:
            key = (tr.phase, tr.tx)
            relay_totals.setdefault(key, [Fraction(0), Fraction(0)])[1] += tr.bits
        if tr.phase <= hops - 2:
            key = (tr.phase + 1, tr.rx)
            relay_totals.setdefault(key, [Fraction(0), Fraction(0)])[0] += tr.bits
    bad_relays = [key for key, (got, sent) in relay_totals.items() if got != sent]
    phase_totals = {}
    for tr in plan.transfers:
        phase_totals[tr.phase] = phase_totals.get(tr.phase, Fraction(0)) + tr.bits
    uneven_phases = [k for k, total in phase_totals.items() if total != plan.total_bits]
    ok = not (bad_nodes or bad_relays or uneven_phases)
    detail = ""
    if not ok:
        parts = []
        if bad_nodes:
            parts.append(f"node imbalance at {bad_nodes[:4]}")
        if bad_relays:
            parts.append(f"relay (layer, node) imbalance at {bad_relays[:4]}")
        if uneven_phases:
            parts.append(f"phase totals off at {uneven_phases}")
        detail = "; ".join(parts)
    checks.append(CheckResult("bit-conservation", ok, detail))

    # (3) the realized rate equals the achievable sum DoF
    alpha = achievable_sum_dof(sizes)
    delay_ok = s.total_delay == sum(p.block_length for p in s.phases)
    rate_ok = (
        ExtRational(s.sum_dof) == alpha
        and s.sum_dof * s.total_delay == s.total_bits
        and delay_ok
    )
    checks.append(
        CheckResult(
            "sum-dof",
            rate_ok,
            "" if rate_ok else f"sum_dof {s.sum_dof} vs achievable {alpha}",
        )
    )

    # (4) destination bins and source messages match the demand exactly
    demand = plan.demand
    norm = plan.bits_per_dof
    problems = []
    for sink in plan.sinks:
        expected = {
            i: demand.entries[(sink.dst, i)] * norm
            for i in range(sizes[0])
            if (sink.dst, i) in demand.entries
        }
        if dict(sink.received) != expected:
            problems.append(f"dst {sink.dst + 1} reassembly")
        if sink.padding_bits != Fraction(plan.total_bits, sizes[-1]) - demand.col_sum(sink.dst) * norm:
            problems.append(f"dst {sink.dst + 1} padding")
    for msg in plan.sources:
        if msg.bits != demand.entries.get((msg.dst, msg.src), Fraction(0)) * norm:
            problems.append(f"message {_msg_id(msg.dst, msg.src)}")
    if plan.padding_bits != plan.total_bits - demand.total * norm:
        problems.append("total padding")
    checks.append(
        CheckResult(
            "demand-shares",
            not problems,
            "" if not problems else "; ".join(problems[:4]),
        )
    )

    return VerificationReport(tuple(checks))


# -- serialization ------------------------------------------------------------


def _plan_to_obj(plan: SplitPlan) -> dict:
    nodes = []
    for msg in plan.sources:
        nodes.append(
            {"id": _msg_id(msg.dst, msg.src), "kind": "source", "bits": str(msg.bits)}
        )
    for pad in plan.paddings:
        nodes.append({"id": _pad_id(pad.src), "kind": "padding", "bits": str(pad.bits)})
    for tr in plan.transfers:
        nodes.append(
            {
                "id": _phase_id(tr.phase, tr.tx, tr.rx),
                "kind": "transfer",
                "phase": tr.phase,
                "bits": str(tr.bits),
            }
        )
    for sink in plan.sinks:
        nodes.append(
            {
                "id": _sink_id(sink.dst),
                "kind": "destination",
                "bits": str(sink.bits),
                "received": [
                    {"src": i + 1, "bits": str(b)} for i, b in sink.received
                ],
                "padding_bits": str(sink.padding_bits),
            }
        )
    return {
        "demand": demand_to_obj(plan.demand),
        "total_bits": plan.total_bits,
        "padding_bits": str(plan.padding_bits),
        "bits_per_dof": str(plan.bits_per_dof),
        "padding_policy": "uniform-fill",
        "nodes": nodes,
        "edges": [
            {"from": e.head, "to": e.tail, "bits": str(e.bits)} for e in plan.edges
        ],
    }


def schedule_to_obj(s: Schedule) -> dict:
    return {
        "phases": [
            {
                "hop": p.hop,
                "tx_count": p.tx_count,
                "rx_count": p.rx_count,
                "block_length": p.block_length,
                "per_pair_dof": str(p.per_pair_dof),
                "per_pair_bits": str(p.per_pair_bits),
            }
            for p in s.phases
        ],
        "total_delay": s.total_delay,
        "total_bits": s.total_bits,
        "sum_dof": str(s.sum_dof),
        "split_plan": _plan_to_obj(s.split_plan),
    }


def plan_to_dot(plan: SplitPlan) -> str:
    """Graph-description text for the split DAG (external rendering)."""
    lines = ["digraph split_plan {", "  rankdir=LR;"]
    for msg in plan.sources:
        lines.append(f'  "{_msg_id(msg.dst, msg.src)}" [shape=box, label="{_msg_id(msg.dst, msg.src)}\\n{msg.bits} bits"];')
    for pad in plan.paddings:
        lines.append(f'  "{_pad_id(pad.src)}" [shape=box, style=dashed, label="{_pad_id(pad.src)}\\n{pad.bits} bits"];')
    for tr in plan.transfers:
        node = _phase_id(tr.phase, tr.tx, tr.rx)
        lines.append(f'  "{node}" [label="{node}\\n{tr.bits} bits"];')
    for sink in plan.sinks:
        lines.append(f'  "{_sink_id(sink.dst)}" [shape=doublecircle, label="{_sink_id(sink.dst)}\\n{sink.bits} bits"];')
    for e in plan.edges:
        lines.append(f'  "{e.head}" -> "{e.tail}" [label="{e.bits}"];')
    lines.append("}")
    return "\n".join(lines)
