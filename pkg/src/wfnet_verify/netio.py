"""Net input formats (a line-oriented DSL and a PNML subset) and reports.

The ``.wfn`` DSL is deliberately flat: one declaration per line, no
nesting. PNML support covers the place/transition core subset; graphics
and tool-specific elements are ignored. Verdicts serialize to a fixed
JSON schema or to a human-readable text rendering.
"""

from __future__ import annotations

import json
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .petri import Net
from .statespace import Verdict
from .wfnet import StructuralReport

_IDENT_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}: {message}")
        self.message = message
        self.line = line
        self.column = column


@dataclass
class NetDocument:
    net: Net
    name: str | None = None
    declared_source: str | None = None
    declared_sink: str | None = None
    resources: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    path: str | None = None

    @property
    def has_resources(self) -> bool:
        return bool(self.resources)


def _check_ident(value: str, line: int, what: str) -> str:
    if not _IDENT_RE.match(value):
        raise ParseError(
            f"{what} {value!r} must use only ASCII letters, digits and '_'", line
        )
    return value


def parse_dsl(text: str) -> NetDocument:
    """Parse the .wfn grammar.

    Directives: net, place, transition, arc A -> B [* W], source, sink,
    resource P = N. '#' starts a comment; blank lines are ignored.
    """
    name: str | None = None
    places: list[str] = []
    transitions: list[str] = []
    arcs: list[tuple[str, str, int]] = []
    arc_keys: set[tuple[str, str]] = set()
    declared: set[str] = set()
    source: str | None = None
    sink: str | None = None
    resources: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        directive = tokens[0]

        if directive == "net":
            if len(tokens) != 2:
                raise ParseError("expected: net <name>", lineno)
            if name is not None:
                raise ParseError("duplicate net declaration", lineno)
            name = tokens[1]
        elif directive in ("place", "transition"):
            if len(tokens) != 2:
                raise ParseError(f"expected: {directive} <id>", lineno)
            ident = _check_ident(tokens[1], lineno, f"{directive} id")
            if ident in declared:
                raise ParseError(f"duplicate declaration of {ident!r}", lineno)
            declared.add(ident)
            (places if directive == "place" else transitions).append(ident)
        elif directive == "arc":
            weight = 1
            if len(tokens) == 6 and tokens[4] == "*":
                try:
                    weight = int(tokens[5])
                except ValueError:
                    raise ParseError(f"invalid arc weight {tokens[5]!r}", lineno) from None
                tokens = tokens[:4]
            if len(tokens) != 4 or tokens[2] != "->":
                raise ParseError("expected: arc <id> -> <id> [* <weight>]", lineno)
            src, tgt = tokens[1], tokens[3]
            for ident in (src, tgt):
                if ident not in declared:
                    raise ParseError(f"unknown identifier {ident!r} in arc", lineno)
            if weight < 1:
                raise ParseError(f"arc weight must be >= 1, got {weight}", lineno)
            if (src in places) == (tgt in places):
                raise ParseError("arc must connect place and transition", lineno)
            if (src, tgt) in arc_keys:
                raise ParseError(f"duplicate arc {src} -> {tgt}", lineno)
            arc_keys.add((src, tgt))
            arcs.append((src, tgt, weight))
        elif directive in ("source", "sink"):
            if len(tokens) != 2:
                raise ParseError(f"expected: {directive} <place-id>", lineno)
            if tokens[1] not in places:
                raise ParseError(f"unknown place {tokens[1]!r}", lineno)
            if directive == "source":
                if source is not None:
                    raise ParseError("duplicate source declaration", lineno)
                source = tokens[1]
            else:
                if sink is not None:
                    raise ParseError("duplicate sink declaration", lineno)
                sink = tokens[1]
        elif directive == "resource":
            if len(tokens) != 4 or tokens[2] != "=":
                raise ParseError("expected: resource <place-id> = <count>", lineno)
            if tokens[1] not in places:
                raise ParseError(f"unknown place {tokens[1]!r}", lineno)
            if tokens[1] in resources:
                raise ParseError(f"duplicate resource declaration for {tokens[1]!r}", lineno)
            try:
                count = int(tokens[3])
            except ValueError:
                raise ParseError(f"invalid resource count {tokens[3]!r}", lineno) from None
            if count < 0:
                raise ParseError("resource count must be >= 0", lineno)
            resources[tokens[1]] = count
        else:
            raise ParseError(f"unknown directive {directive!r}", lineno)

    if not places:
        raise ParseError("net declares no places", 1)
    return NetDocument(
        net=Net(places, transitions, arcs),
        name=name,
        declared_source=source,
        declared_sink=sink,
        resources=resources,
    )


def serialize_dsl(doc: NetDocument) -> str:
    """Inverse of parse_dsl for well-formed documents."""
    lines: list[str] = []
    if doc.name:
        lines.append(f"net {doc.name}")
    lines += [f"place {p}" for p in doc.net.places]
    lines += [f"transition {t}" for t in doc.net.transitions]
    for src, tgt, w in doc.net.arcs:
        lines.append(f"arc {src} -> {tgt}" + (f" * {w}" if w != 1 else ""))
    if doc.declared_source:
        lines.append(f"source {doc.declared_source}")
    if doc.declared_sink:
        lines.append(f"sink {doc.declared_sink}")
    for pid, count in doc.resources.items():
        lines.append(f"resource {pid} = {count}")
    return "\n".join(lines) + "\n"


def _strip_ns(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_pnml(text: str) -> NetDocument:
    """Parse the P/T core subset of PNML.

    initialMarking elements are ignored with a warning (the instance
    count k is a verification parameter, not a net property).
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line = exc.position[0] if exc.position else 1
        raise ParseError(f"malformed XML: {exc}", line) from None

    net_el = None
    for el in root.iter():
        if _strip_ns(el.tag) == "net":
            net_el = el
            break
    scope = net_el if net_el is not None else root
    name = None
    if net_el is not None:
        net_type = net_el.get("type", "")
        if net_type and not re.search(r"ptnet|PTNet", net_type):
            raise ParseError(f"unsupported net type {net_type!r}; expected a P/T net", 1)
        name = net_el.get("id")

    places: list[str] = []
    transitions: list[str] = []
    arcs: list[tuple[str, str, int]] = []
    warnings: list[str] = []

    def _text_of(el, child_tag: str) -> str | None:
        for child in el.iter():
            if _strip_ns(child.tag) == child_tag:
                for sub in child.iter():
                    if _strip_ns(sub.tag) == "text" and sub.text is not None:
                        return sub.text.strip()
        return None

    for el in scope.iter():
        tag = _strip_ns(el.tag)
        if tag == "place":
            pid = el.get("id")
            if pid is None:
                raise ParseError("place element without id", 1)
            places.append(pid)
            if _text_of(el, "initialMarking") is not None:
                warnings.append(
                    f"initialMarking on place {pid!r} ignored; pass k at check time"
                )
        elif tag == "transition":
            tid = el.get("id")
            if tid is None:
                raise ParseError("transition element without id", 1)
            transitions.append(tid)
        elif tag == "arc":
            src, tgt = el.get("source"), el.get("target")
            if src is None or tgt is None:
                raise ParseError("arc element without source/target", 1)
            weight = 1
            inscription = _text_of(el, "inscription")
            if inscription is not None:
                try:
                    weight = int(inscription)
                except ValueError:
                    raise ParseError(
                        f"arc {src}->{tgt}: non-integer inscription {inscription!r}", 1
                    ) from None
                if weight < 1:
                    raise ParseError(f"arc {src}->{tgt}: inscription must be >= 1", 1)
            arcs.append((src, tgt, weight))

    if not places:
        raise ParseError("PNML document declares no places", 1)
    return NetDocument(
        net=Net(places, transitions, arcs), name=name, warnings=warnings
    )


def load_document(path: str) -> NetDocument:
    """Load a net by extension: .pnml/.xml as PNML, anything else as DSL."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    lower = path.lower()
    parser = parse_pnml if lower.endswith((".pnml", ".xml")) else parse_dsl
    doc = parser(text)
    doc.path = path
    return doc


# -- reports --------------------------------------------------------------


def structural_report_to_dict(
    report: StructuralReport,
    source: str | None = None,
    sink: str | None = None,
) -> dict:
    return {
        "valid": report.valid,
        "violations": [
            {"condition": v.condition, "detail": v.detail} for v in report.violations
        ],
        "source": source,
        "sink": sink,
    }


def verdict_to_dict(v: Verdict) -> dict:
    """The fixed machine-readable report schema."""

    def cond(c, kind: str) -> dict:
        if c is None:
            return (
                {"pass": None, "dead": []}
                if kind == "no_dead"
                else {"pass": None, "counterexample": None}
            )
        if kind == "no_dead":
            return {"pass": c.passed, "dead": list(c.dead)}
        trace = (
            list(c.counterexample.transitions)
            if c.counterexample is not None
            else None
        )
        return {"pass": c.passed, "counterexample": trace}

    out = {
        "result": v.result,
        "conditions": {
            "termination": cond(v.termination, "termination"),
            "proper": cond(v.proper, "proper"),
            "no_dead": cond(v.no_dead, "no_dead"),
        },
        "stats": {
            "nodes": v.stats.nodes,
            "edges": v.stats.edges,
            "millis": round(v.stats.millis, 3),
        },
        "parameters": {
            "k": v.k,
            "resources": dict(v.resources) if v.resources is not None else None,
        },
    }
    if v.witness is not None:
        out["witness"] = {
            "ancestor": list(v.witness[0]),
            "descendant": list(v.witness[1]),
        }
    if v.cap is not None:
        out["cap"] = v.cap
    return out


def render_report_text(report: dict) -> str:
    """Human-readable rendering of a verdict report dict."""
    lines = [f"result: {report['result']}"]
    labels = {
        "termination": "option to complete",
        "proper": "proper completion",
        "no_dead": "no dead transitions",
    }
    for key, label in labels.items():
        c = report["conditions"][key]
        if c["pass"] is None:
            lines.append(f"  {label}: not evaluated")
            continue
        lines.append(f"  {label}: {'pass' if c['pass'] else 'FAIL'}")
        if key == "no_dead":
            if c["dead"]:
                lines.append(f"    dead transitions: {', '.join(c['dead'])}")
        elif c.get("counterexample") is not None:
            trace = " ".join(c["counterexample"]) or "(empty trace)"
            lines.append(f"    counterexample: {trace}")
    if "witness" in report:
        w = report["witness"]
        lines.append(f"  unbounded witness: {w['ancestor']} < {w['descendant']}")
    if "cap" in report:
        lines.append(f"  exploration cap reached: {report['cap']} markings")
    s = report["stats"]
    lines.append(
        f"explored {s['nodes']} markings, {s['edges']} edges in {s['millis']} ms"
    )
    p = report["parameters"]
    params = f"k={p['k']}"
    if p["resources"]:
        params += ", resources " + ", ".join(
            f"{pid}={n}" for pid, n in p["resources"].items()
        )
    lines.append(f"parameters: {params}")
    return "\n".join(lines) + "\n"


def serialize_report(v: Verdict, fmt: str = "text") -> str:
    report = verdict_to_dict(v)
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "text":
        return render_report_text(report)
    raise ValueError(f"unknown report format {fmt!r}")
