"""Optional cross-check against an external SPIN model checker.

The built-in checker is authoritative; SPIN is only invoked to compare
outcomes. The termination property is known to diverge on cyclic nets:
the LTL formula <>term quantifies over all runs, so an unfair infinite
loop refutes it even when completion stays reachable. Disagreements of
that shape are reported as a documented caveat, never hidden.
"""

from __future__ import annotations

import os
import re
import shutil
import subprocess
import tempfile
from dataclasses import dataclass

from .promela import EmitOptions, emit_model
from .statespace import Verdict
from .wfnet import WFNet, WFRNet

SPIN_ENV_VAR = "WFNET_SPIN"

TERMINATION_CAVEAT = (
    "known semantic divergence: the built-in checker decides option to "
    "complete (the final marking stays reachable), while SPIN's <>term "
    "quantifies over all runs and an unfair infinite loop refutes it"
)

_ERRORS_RE = re.compile(r"errors:\s*(\d+)")


class SpinNotFoundError(RuntimeError):
    pass


class SpinOutputError(RuntimeError):
    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


def find_spin(explicit: str | None = None) -> str | None:
    """Resolve the spin binary: explicit path, then $WFNET_SPIN, then PATH."""
    for candidate in (explicit, os.environ.get(SPIN_ENV_VAR)):
        if candidate:
            resolved = shutil.which(candidate)
            return resolved or (candidate if os.path.isfile(candidate) else None)
    return shutil.which("spin")


@dataclass(frozen=True)
class SpinRun:
    passed: bool
    errors: int
    raw: str


def run_spin(spin: str, model_text: str, ltl_name: str, timeout: float = 120.0) -> SpinRun:
    """Run one verification pass and parse the pass/fail outcome."""
    with tempfile.TemporaryDirectory(prefix="wfnet-spin-") as tmp:
        model_path = os.path.join(tmp, "model.pml")
        with open(model_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(model_text)
        try:
            proc = subprocess.run(
                [spin, "-search", "-ltl", ltl_name, model_path],
                cwd=tmp,
                capture_output=True,
                text=True,
                timeout=timeout,
            )
        except FileNotFoundError as exc:
            raise SpinNotFoundError(f"spin binary not found: {spin}") from exc
        raw = proc.stdout + proc.stderr
        match = _ERRORS_RE.search(raw)
        if match is None:
            raise SpinOutputError("could not find an 'errors: N' line in spin output", raw)
        errors = int(match.group(1))
        return SpinRun(passed=errors == 0, errors=errors, raw=raw)


def cross_check(
    wf: WFNet | WFRNet,
    verdict: Verdict,
    prop: str,
    k: int = 1,
    spin_path: str | None = None,
) -> dict:
    """Compare the built-in condition outcome with an external SPIN run."""
    spin = find_spin(spin_path)
    if spin is None:
        raise SpinNotFoundError(
            "no spin binary found; pass --spin PATH or set " + SPIN_ENV_VAR
        )

    condition = {
        "termination": verdict.termination,
        "proper": verdict.proper,
        "no_dead": verdict.no_dead,
    }[prop]
    if condition is None:
        raise ValueError(f"built-in verdict carries no {prop} outcome ({verdict.result})")

    opts = EmitOptions(
        k=k,
        closure=(prop == "no_dead"),
        weighted=any(w > 1 for _, _, w in (wf.net if isinstance(wf, WFRNet) else wf.net).arcs),
        properties=(prop,),
    )
    emitted = emit_model(wf, opts)
    ltl_name = emitted.property_names[0]
    run = run_spin(spin, emitted.text, ltl_name)

    agreement = run.passed == condition.passed
    caveat = None
    if not agreement and prop == "termination" and condition.passed and not run.passed:
        caveat = TERMINATION_CAVEAT
    return {
        "property": prop,
        "ltl": ltl_name,
        "builtin": {"pass": condition.passed},
        "spin": {"pass": run.passed, "errors": run.errors},
        "agreement": agreement,
        "caveat": caveat,
    }
