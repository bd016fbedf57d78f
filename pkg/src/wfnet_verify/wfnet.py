"""Workflow nets: structural validation, closure construction, markings.

A workflow net has a unique source place (empty preset), a unique sink
place (empty postset), and every node on some path from source to sink.
A resource-augmented net (WFRNet) additionally declares resource places
whose tokens are borrowed by instances and must be restored at completion.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .petri import Marking, Net, NetError, UnknownNodeError

CLOSURE_TRANSITION = "t*"


@dataclass(frozen=True)
class Violation:
    condition: int  # 1 = unique source, 2 = unique sink, 3 = path condition
    detail: str


@dataclass(frozen=True)
class StructuralReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class WFNet:
    net: Net
    source: int  # place index
    sink: int  # place index

    @property
    def source_id(self) -> str:
        return self.net.places[self.source]

    @property
    def sink_id(self) -> str:
        return self.net.places[self.sink]


@dataclass(frozen=True)
class WFRNet:
    """A workflow net whose underlying net carries extra resource places."""

    wfnet: WFNet
    resources: tuple[tuple[int, int], ...]  # (place index, initial count), sorted

    @property
    def net(self) -> Net:
        return self.wfnet.net

    @property
    def resource_indices(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.resources)

    def resource_marking(self) -> Marking:
        m = [0] * len(self.net.places)
        for p, count in self.resources:
            m[p] = count
        return tuple(m)


def _successors(net: Net) -> dict[str, set[str]]:
    succ: dict[str, set[str]] = {n: set() for n in (*net.places, *net.transitions)}
    for src, tgt, _ in net.arcs:
        succ[src].add(tgt)
    return succ


def _reach(start: str, adjacency: dict[str, set[str]]) -> set[str]:
    seen = {start}
    queue = deque([start])
    while queue:
        n = queue.popleft()
        for m in adjacency[n]:
            if m not in seen:
                seen.add(m)
                queue.append(m)
    return seen


def validate_wfnet(
    net: Net,
    declared_source: str | None = None,
    declared_sink: str | None = None,
    resource_places: tuple[str, ...] = (),
) -> tuple[StructuralReport, WFNet | None]:
    """Check the three workflow-net conditions and build a WFNet on success.

    Resource places are exempt from all three conditions; they are checked
    separately by make_wfrnet. Violations name concrete witness nodes.
    """
    for pid in (declared_source, declared_sink, *resource_places):
        if pid is not None and pid not in net.place_index:
            raise UnknownNodeError(f"unknown place {pid!r}")
    resources = set(resource_places)
    violations: list[Violation] = []

    sources = [
        p for p in net.places if p not in resources and not net.preset(p)
    ]
    sinks = [
        p for p in net.places if p not in resources and not net.postset(p)
    ]

    source: str | None = None
    if declared_source is not None and net.preset(declared_source):
        violations.append(
            Violation(1, f"declared source {declared_source!r} has a nonempty preset")
        )
    elif len(sources) == 1:
        source = sources[0]
        if declared_source is not None and declared_source != source:
            violations.append(
                Violation(
                    1,
                    f"declared source {declared_source!r} differs from the unique "
                    f"source candidate {source!r}",
                )
            )
    elif not sources:
        violations.append(Violation(1, "no place with an empty preset"))
    else:
        violations.append(
            Violation(1, f"multiple source candidates: {', '.join(sources)}")
        )

    sink: str | None = None
    if declared_sink is not None and net.postset(declared_sink):
        violations.append(
            Violation(2, f"declared sink {declared_sink!r} has a nonempty postset")
        )
    elif len(sinks) == 1:
        sink = sinks[0]
        if declared_sink is not None and declared_sink != sink:
            violations.append(
                Violation(
                    2,
                    f"declared sink {declared_sink!r} differs from the unique "
                    f"sink candidate {sink!r}",
                )
            )
    elif not sinks:
        violations.append(Violation(2, "no place with an empty postset"))
    else:
        violations.append(
            Violation(2, f"multiple sink candidates: {', '.join(sinks)}")
        )

    if source is not None and sink is not None and source == sink:
        violations.append(Violation(1, f"source and sink coincide at {source!r}"))
        source = sink = None

    if source is not None and sink is not None:
        succ = _successors(net)
        pred: dict[str, set[str]] = {n: set() for n in succ}
        for n, targets in succ.items():
            for m in targets:
                pred[m].add(n)
        from_source = _reach(source, succ)
        to_sink = _reach(sink, pred)
        for node in (*net.places, *net.transitions):
            if node in resources:
                continue
            if node not in from_source:
                violations.append(Violation(3, f"no path from {source!r} to {node!r}"))
            elif node not in to_sink:
                violations.append(Violation(3, f"no path from {node!r} to {sink!r}"))

    report = StructuralReport(tuple(violations))
    if not report.valid or source is None or sink is None:
        return report, None
    return report, WFNet(net, net.place_index[source], net.place_index[sink])


def make_wfrnet(
    net: Net,
    resources: dict[str, int],
    declared_source: str | None = None,
    declared_sink: str | None = None,
) -> tuple[StructuralReport, WFRNet | None]:
    """Validate a resource-augmented workflow net.

    Resource places must be disjoint from source/sink, carry a non-negative
    initial count, and have at least one connected arc.
    """
    for pid, count in resources.items():
        if pid not in net.place_index:
            raise UnknownNodeError(f"unknown resource place {pid!r}")
        if count < 0:
            raise NetError(f"resource {pid!r}: count must be >= 0, got {count}")
        if not net.preset(pid) and not net.postset(pid):
            raise NetError(f"resource place {pid!r} has no connected arc")
    report, wf = validate_wfnet(
        net, declared_source, declared_sink, tuple(resources)
    )
    if wf is None:
        return report, None
    if wf.source_id in resources or wf.sink_id in resources:
        raise NetError("resource places must be disjoint from source and sink")
    pairs = tuple(
        sorted((net.place_index[pid], count) for pid, count in resources.items())
    )
    return report, WFRNet(wf, pairs)


def closure(wf: WFNet) -> Net:
    """The closure net: a fresh transition looping the sink back to the source.

    The loop transition is appended last; a name clash with an existing id
    is resolved deterministically (t*, t*1, t*2, ...).
    """
    name = CLOSURE_TRANSITION
    taken = set(wf.net.places) | set(wf.net.transitions)
    n = 0
    while name in taken:
        n += 1
        name = f"{CLOSURE_TRANSITION}{n}"
    return Net(
        wf.net.places,
        (*wf.net.transitions, name),
        (*wf.net.arcs, (wf.sink_id, name, 1), (name, wf.source_id, 1)),
    )


def initial_marking(wf: WFNet, k: int) -> Marking:
    """k tokens in the source place, zero elsewhere."""
    if k < 1:
        raise ValueError("k must be >= 1")
    m = [0] * len(wf.net.places)
    m[wf.source] = k
    return tuple(m)


def initial_marking_r(wfr: WFRNet, k: int) -> Marking:
    """k tokens in the source plus the initial resource counts."""
    if k < 1:
        raise ValueError("k must be >= 1")
    m = list(wfr.resource_marking())
    m[wfr.wfnet.source] += k
    return tuple(m)


def final_marking(wf: WFNet | WFRNet, k: int) -> Marking:
    """k tokens in the sink; resource places restored to their initial counts."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if isinstance(wf, WFRNet):
        m = list(wf.resource_marking())
        m[wf.wfnet.sink] += k
        return tuple(m)
    m = [0] * len(wf.net.places)
    m[wf.sink] = k
    return tuple(m)
