"""Weighted place/transition nets and the token game.

A net is immutable after construction; markings are plain tuples of
non-negative ints indexed like ``net.places``. All operations are pure,
so nets and markings can be shared freely between threads.
"""

from __future__ import annotations

from typing import Iterable, Sequence

Marking = tuple[int, ...]


class NetError(ValueError):
    """Malformed net structure (duplicate ids, bad arcs, ...)."""


class UnknownNodeError(NetError):
    """A node id that is neither a place nor a transition of the net."""


class MarkingSizeError(NetError):
    """Marking length does not match the number of places."""


class NotEnabledError(NetError):
    """Attempt to fire a transition that is not enabled."""


def _normalize_arc(arc) -> tuple[str, str, int]:
    if len(arc) == 2:
        src, tgt = arc
        weight = 1
    elif len(arc) == 3:
        src, tgt, weight = arc
    else:
        raise NetError(f"arc must be (source, target[, weight]), got {arc!r}")
    if not isinstance(weight, int) or weight < 1:
        raise NetError(f"arc {src}->{tgt}: weight must be a positive integer, got {weight!r}")
    return (src, tgt, weight)


class Net:
    """A place/transition net with weighted arcs.

    Places and transitions keep their declaration order; that order fixes
    the marking vector layout and the deterministic iteration order used
    by the state-space explorer.
    """

    def __init__(
        self,
        places: Sequence[str],
        transitions: Sequence[str],
        arcs: Iterable[tuple],
    ):
        self.places: tuple[str, ...] = tuple(places)
        self.transitions: tuple[str, ...] = tuple(transitions)

        if len(set(self.places)) != len(self.places):
            raise NetError("duplicate place identifiers")
        if len(set(self.transitions)) != len(self.transitions):
            raise NetError("duplicate transition identifiers")
        overlap = set(self.places) & set(self.transitions)
        if overlap:
            raise NetError(f"place and transition ids must be disjoint: {sorted(overlap)}")

        self.place_index: dict[str, int] = {p: i for i, p in enumerate(self.places)}
        self.transition_index: dict[str, int] = {t: i for i, t in enumerate(self.transitions)}

        arcs = [_normalize_arc(a) for a in arcs]
        seen: set[tuple[str, str]] = set()
        for src, tgt, _ in arcs:
            src_is_place = src in self.place_index
            tgt_is_place = tgt in self.place_index
            if src not in self.place_index and src not in self.transition_index:
                raise UnknownNodeError(f"arc source {src!r} is not a declared node")
            if tgt not in self.place_index and tgt not in self.transition_index:
                raise UnknownNodeError(f"arc target {tgt!r} is not a declared node")
            if src_is_place == tgt_is_place:
                raise NetError(f"arc {src}->{tgt} must connect a place and a transition")
            if (src, tgt) in seen:
                raise NetError(f"duplicate arc {src}->{tgt}")
            seen.add((src, tgt))
        self.arcs: tuple[tuple[str, str, int], ...] = tuple(arcs)

        # Per-transition input/output (place index, weight) vectors, sorted by
        # place index so enabledness and firing are O(degree) and deterministic.
        ins: list[list[tuple[int, int]]] = [[] for _ in self.transitions]
        outs: list[list[tuple[int, int]]] = [[] for _ in self.transitions]
        for src, tgt, w in self.arcs:
            if src in self.place_index:
                ins[self.transition_index[tgt]].append((self.place_index[src], w))
            else:
                outs[self.transition_index[src]].append((self.place_index[tgt], w))
        self._inputs: tuple[tuple[tuple[int, int], ...], ...] = tuple(
            tuple(sorted(v)) for v in ins
        )
        self._outputs: tuple[tuple[tuple[int, int], ...], ...] = tuple(
            tuple(sorted(v)) for v in outs
        )

    # -- structure -----------------------------------------------------

    def _require_node(self, node: str) -> None:
        if node not in self.place_index and node not in self.transition_index:
            raise UnknownNodeError(f"unknown node {node!r}")

    def preset(self, node: str) -> set[str]:
        """Sources of arcs targeting ``node``."""
        self._require_node(node)
        return {src for src, tgt, _ in self.arcs if tgt == node}

    def postset(self, node: str) -> set[str]:
        """Targets of arcs leaving ``node``."""
        self._require_node(node)
        return {tgt for src, tgt, _ in self.arcs if src == node}

    def arc_weight(self, source: str, target: str) -> int:
        """Weight of the arc, 0 if absent."""
        for src, tgt, w in self.arcs:
            if src == source and tgt == target:
                return w
        return 0

    def transition_inputs(self, t_index: int) -> tuple[tuple[int, int], ...]:
        return self._inputs[t_index]

    def transition_outputs(self, t_index: int) -> tuple[tuple[int, int], ...]:
        return self._outputs[t_index]

    # -- token game ----------------------------------------------------

    def _check_marking(self, m: Marking) -> None:
        if len(m) != len(self.places):
            raise MarkingSizeError(
                f"marking has {len(m)} entries, net has {len(self.places)} places"
            )

    def _transition_idx(self, t: str) -> int:
        try:
            return self.transition_index[t]
        except KeyError:
            raise UnknownNodeError(f"unknown transition {t!r}") from None

    def is_enabled(self, m: Marking, t: str) -> bool:
        """True iff every input place of ``t`` holds at least the arc weight."""
        self._check_marking(m)
        ti = self._transition_idx(t)
        return all(m[p] >= w for p, w in self._inputs[ti])

    def fire(self, m: Marking, t: str) -> Marking:
        """Fire ``t``: consume input weights, produce output weights.

        Raises NotEnabledError rather than silently underflowing.
        """
        self._check_marking(m)
        ti = self._transition_idx(t)
        if not all(m[p] >= w for p, w in self._inputs[ti]):
            raise NotEnabledError(f"transition {t!r} is not enabled")
        out = list(m)
        for p, w in self._inputs[ti]:
            out[p] -= w
        for p, w in self._outputs[ti]:
            out[p] += w
        return tuple(out)

    def fire_index(self, m: Marking, ti: int) -> Marking | None:
        """Index-based firing for the explorer: next marking or None if disabled."""
        if not all(m[p] >= w for p, w in self._inputs[ti]):
            return None
        out = list(m)
        for p, w in self._inputs[ti]:
            out[p] -= w
        for p, w in self._outputs[ti]:
            out[p] += w
        return tuple(out)

    def enabled_transitions(self, m: Marking) -> list[str]:
        """All enabled transitions, in declaration order."""
        self._check_marking(m)
        return [
            t
            for i, t in enumerate(self.transitions)
            if all(m[p] >= w for p, w in self._inputs[i])
        ]

    def zero_marking(self) -> Marking:
        return (0,) * len(self.places)

    def __repr__(self) -> str:  # pragma: no cover - debug aid
        return (
            f"Net(|P|={len(self.places)}, |T|={len(self.transitions)}, "
            f"|F|={len(self.arcs)})"
        )
