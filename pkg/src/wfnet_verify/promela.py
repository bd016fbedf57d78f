"""Promela model generation and a micro-interpreter over the emitted text.

The emitted model is a single init process whose do-loop carries one
atomic guarded branch per transition. Place markings live in the integer
array PL (source at index 0, sink at index |P|-1), firing counts in TR.
Token moves go through generated remove/add macros; weighted nets use the
removeW/addW family that consumes or produces several tokens at once.

Output is deterministic and byte-exact: identical inputs produce
identical text (LF line endings), which the golden-file tests pin down.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field

from .petri import Marking, Net
from .wfnet import WFNet, WFRNet, closure

PROPERTIES = ("termination", "proper", "no_dead")
_LTL_NAMES = {"termination": "termination", "proper": "proper", "no_dead": "nodead"}


class EmitOptionsError(ValueError):
    """Inconsistent emission options."""


@dataclass(frozen=True)
class EmitOptions:
    k: int = 1
    closure: bool = False
    weighted: bool = False
    properties: tuple[str, ...] = ("termination", "proper")


@dataclass(frozen=True)
class EmittedModel:
    text: str
    place_index_map: dict[str, int]
    transition_index_map: dict[str, int]
    property_names: tuple[str, ...]


def render_index_maps(
    wf: WFNet | WFRNet, with_closure: bool = False
) -> tuple[dict[str, int], dict[str, int]]:
    """PL/TR index maps: source -> 0, sink -> |P|-1, rest in declaration order."""
    base = wf.wfnet if isinstance(wf, WFRNet) else wf
    net = base.net
    interior = [
        p for p in net.places if p not in (base.source_id, base.sink_id)
    ]
    place_map = {base.source_id: 0}
    for i, p in enumerate(interior, start=1):
        place_map[p] = i
    place_map[base.sink_id] = len(net.places) - 1
    transitions = closure(base).transitions if with_closure else net.transitions
    transition_map = {t: j for j, t in enumerate(transitions)}
    return place_map, transition_map


def emit_macros(max_remove: int, max_add: int, weighted: bool) -> str:
    """The fire macro plus remove/add macros up to the needed arities."""
    if max_remove < 1 or max_add < 1:
        raise EmitOptionsError("macro arities must be >= 1")
    lines = ["#define fire(t) TR[t]++"]
    for a in range(1, max_remove + 1):
        ps = [f"p{i}" for i in range(1, a + 1)]
        if weighted:
            ns = [f"n{i}" for i in range(1, a + 1)]
            guard = " && ".join(f"PL[{p}] >= {n}" for p, n in zip(ps, ns))
            update = "; ".join(f"PL[{p}] = PL[{p}] - {n}" for p, n in zip(ps, ns))
            lines.append(
                f"#define removeW{a}({','.join(ps + ns)}) ({guard}) -> {update}"
            )
        else:
            guard = " && ".join(f"PL[{p}] > 0" for p in ps)
            update = "; ".join(f"PL[{p}]--" for p in ps)
            lines.append(f"#define remove{a}({','.join(ps)}) ({guard}) -> {update}")
    for a in range(1, max_add + 1):
        ps = [f"p{i}" for i in range(1, a + 1)]
        if weighted:
            ns = [f"n{i}" for i in range(1, a + 1)]
            update = "; ".join(f"PL[{p}] = PL[{p}] + {n}" for p, n in zip(ps, ns))
            lines.append(f"#define addW{a}({','.join(ps + ns)}) {update}")
        else:
            update = "; ".join(f"PL[{p}]++" for p in ps)
            lines.append(f"#define add{a}({','.join(ps)}) {update}")
    return "\n".join(lines)


def emit_property_defines(wf: WFNet | WFRNet, k: int) -> str:
    """The term/prop/live defines (kterm/kprop for k > 1).

    The sink is PL[|P|-1]; prop requires every other place empty except
    resource places, which must hold their initial counts again. live
    ranges over all transitions of the closure net, including the loop.
    """
    if k < 1:
        raise EmitOptionsError("k must be >= 1")
    base = wf.wfnet if isinstance(wf, WFRNet) else wf
    place_map, _ = render_index_maps(wf)
    n_places = len(base.net.places)
    sink = n_places - 1
    expected = [0] * n_places
    if isinstance(wf, WFRNet):
        for p, count in wf.resources:
            expected[place_map[wf.net.places[p]]] = count
    parts = [f"PL[{i}]=={expected[i]}" for i in range(n_places - 1)]
    parts.append(f"PL[{sink}]=={k}")
    conj = " && ".join(parts)
    live = " && ".join(
        f"TR[{j}]>=1" for j in range(len(base.net.transitions) + 1)
    )
    term_name, prop_name = ("term", "prop") if k == 1 else ("kterm", "kprop")
    return "\n".join(
        [
            f"#define {term_name} (PL[{sink}] >= {k})",
            f"#define {prop_name} ({conj})",
            f"#define live ({live})",
        ]
    )


def _branch(
    tr_idx: int,
    inputs: tuple[tuple[int, int], ...],
    outputs: tuple[tuple[int, int], ...],
    weighted: bool,
) -> str:
    if not inputs:
        guard = "true"
    elif weighted:
        args = [str(p) for p, _ in inputs] + [str(w) for _, w in inputs]
        guard = f"removeW{len(inputs)}({','.join(args)})"
    else:
        guard = f"remove{len(inputs)}({','.join(str(p) for p, _ in inputs)})"
    body = f"{guard} -> fire({tr_idx})"
    if outputs:
        if weighted:
            args = [str(p) for p, _ in outputs] + [str(w) for _, w in outputs]
            body += f"; addW{len(outputs)}({','.join(args)})"
        else:
            body += f"; add{len(outputs)}({','.join(str(p) for p, _ in outputs)})"
    return f"\t:: atomic {{ {body} }}"


def emit_model(wf: WFNet | WFRNet, opts: EmitOptions) -> EmittedModel:
    """Emit the complete model: macros, defines, arrays, init loop, ltl blocks."""
    if opts.k < 1:
        raise EmitOptionsError("k must be >= 1")
    unknown = [p for p in opts.properties if p not in PROPERTIES]
    if unknown:
        raise EmitOptionsError(f"unknown properties: {unknown}")
    if "no_dead" in opts.properties and not opts.closure:
        raise EmitOptionsError("the no_dead property requires the closure variant")

    base = wf.wfnet if isinstance(wf, WFRNet) else wf
    net = closure(base) if opts.closure else base.net
    if not opts.weighted and any(w > 1 for _, _, w in net.arcs):
        raise EmitOptionsError("net has arc weights > 1; weighted emission required")

    place_map, transition_map = render_index_maps(wf, with_closure=opts.closure)

    branches = []
    max_remove = max_add = 1
    for j, t in enumerate(net.transitions):
        inputs = tuple(
            sorted((place_map[net.places[p]], w) for p, w in net.transition_inputs(j))
        )
        outputs = tuple(
            sorted((place_map[net.places[p]], w) for p, w in net.transition_outputs(j))
        )
        max_remove = max(max_remove, len(inputs))
        max_add = max(max_add, len(outputs))
        branches.append(_branch(j, inputs, outputs, opts.weighted))

    requested = tuple(p for p in PROPERTIES if p in opts.properties)
    defines = emit_property_defines(wf, opts.k).split("\n")
    term_name = "term" if opts.k == 1 else "kterm"
    prop_name = "prop" if opts.k == 1 else "kprop"
    wanted_defines = []
    if "termination" in requested or "proper" in requested:
        wanted_defines.append(defines[0])
    if "proper" in requested:
        wanted_defines.append(defines[1])
    if "no_dead" in requested:
        wanted_defines.append(defines[2])

    init_lines = [f"\tPL[0] = {opts.k};"]
    if isinstance(wf, WFRNet):
        entries = sorted(
            (place_map[wf.net.places[p]], count) for p, count in wf.resources
        )
        init_lines += [f"\tPL[{i}] = {count};" for i, count in entries]

    ltl_blocks = []
    for p in requested:
        if p == "termination":
            ltl_blocks.append(f"ltl termination {{ <> {term_name} }}")
        elif p == "proper":
            ltl_blocks.append(f"ltl proper {{ [] ({term_name} -> {prop_name}) }}")
        else:
            ltl_blocks.append("ltl nodead { <> live }")

    sections = [emit_macros(max_remove, max_add, opts.weighted)]
    if wanted_defines:
        sections.append("\n".join(wanted_defines))
    sections.append(f"int PL[{len(net.places)}];\nint TR[{len(net.transitions)}];")
    sections.append(
        "init {\n"
        + "\n".join(init_lines)
        + "\n\tdo\n"
        + "\n".join(branches)
        + "\n\tod\n}"
    )
    if ltl_blocks:
        sections.append("\n".join(ltl_blocks))

    return EmittedModel(
        text="\n\n".join(sections) + "\n",
        place_index_map=place_map,
        transition_index_map=transition_map,
        property_names=tuple(_LTL_NAMES[p] for p in requested),
    )


# -- micro-interpreter over the emitted branch structure -----------------

_BRANCH_RE = re.compile(r":: atomic \{ (.+) \}")
_CALL_RE = re.compile(r"(remove|removeW|add|addW)(\d+)\(([\d,]*)\)")
_INIT_RE = re.compile(r"PL\[(\d+)\] = (\d+);")
_PL_DECL_RE = re.compile(r"int PL\[(\d+)\];")


@dataclass(frozen=True)
class InterpretedBranch:
    tr_index: int
    inputs: tuple[tuple[int, int], ...]  # (PL index, tokens consumed)
    outputs: tuple[tuple[int, int], ...]


@dataclass
class InterpretedModel:
    n_places: int
    initial: Marking
    branches: list[InterpretedBranch] = field(default_factory=list)

    def fire(self, m: Marking, b: InterpretedBranch) -> Marking | None:
        if not all(m[p] >= w for p, w in b.inputs):
            return None
        out = list(m)
        for p, w in b.inputs:
            out[p] -= w
        for p, w in b.outputs:
            out[p] += w
        return tuple(out)

    def explore(self, cap: int = 100_000) -> tuple[list[Marking], list[tuple[int, int, int]]]:
        """BFS over PL vectors, branches tried in emission order."""
        markings = [self.initial]
        index = {self.initial: 0}
        edges: list[tuple[int, int, int]] = []
        queue = deque([0])
        while queue:
            node = queue.popleft()
            for b in self.branches:
                m2 = self.fire(markings[node], b)
                if m2 is None:
                    continue
                if m2 not in index:
                    if len(markings) >= cap:
                        raise RuntimeError(f"interpreter cap of {cap} markings exceeded")
                    index[m2] = len(markings)
                    markings.append(m2)
                    queue.append(index[m2])
                edges.append((node, b.tr_index, index[m2]))
        return markings, edges


def _parse_call(call: str) -> tuple[tuple[int, int], ...]:
    m = _CALL_RE.fullmatch(call.strip())
    if m is None:
        raise ValueError(f"unrecognized macro call {call!r}")
    kind, arity, args = m.group(1), int(m.group(2)), m.group(3)
    values = [int(v) for v in args.split(",")] if args else []
    if kind.endswith("W"):
        if len(values) != 2 * arity:
            raise ValueError(f"weighted call {call!r} expects {2 * arity} arguments")
        return tuple(zip(values[:arity], values[arity:]))
    if len(values) != arity:
        raise ValueError(f"call {call!r} expects {arity} arguments")
    return tuple((p, 1) for p in values)


def interpret_model(text: str) -> InterpretedModel:
    """Rebuild the transition system encoded in an emitted model.

    Each do-branch is read back as guard + update; the semantics of the
    remove/add macro calls are applied directly, with TR treated as a pure
    trace counter (the state is the PL vector only).
    """
    decl = _PL_DECL_RE.search(text)
    if decl is None:
        raise ValueError("no PL declaration found")
    n_places = int(decl.group(1))
    init = [0] * n_places
    for idx, value in _INIT_RE.findall(text):
        init[int(idx)] = int(value)
    model = InterpretedModel(n_places, tuple(init))
    for body in _BRANCH_RE.findall(text):
        guard, _, rest = body.partition(" -> ")
        fire_part, _, add_part = rest.partition("; ")
        fire_m = re.fullmatch(r"fire\((\d+)\)", fire_part.strip())
        if fire_m is None:
            raise ValueError(f"branch without fire call: {body!r}")
        inputs = () if guard.strip() == "true" else _parse_call(guard)
        outputs = _parse_call(add_part) if add_part else ()
        model.branches.append(
            InterpretedBranch(int(fire_m.group(1)), inputs, outputs)
        )
    return model
