"""Command line interface: JSON job in, JSON report out.

A job is ``{"command": ..., "inputs": {...}, "params": {...}}``. The report
echoes the normalized job next to ``result``, ``meta`` and ``status``; feeding
the echoed job back in reproduces the same job.

Exit codes: 0 ok, 1 invalid input (message on stderr, no report),
2 horizon exhausted (report carries the partial certificate), 3 a checked
estimate was violated.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from . import __version__
from .analysis import (
    build_wlur_counterexample,
    check_lower_estimate,
    check_upper_estimate,
    classify_reflexivity,
    evaluate_wlur_witness,
    random_disjoint_family,
)
from .embeddings import DEFAULT_SEARCH_HORIZON, build_embedding, certify_distortion
from .errors import HorizonExceeded, SearchHorizonExceeded, VarLpError
from .exponents import ExponentSeq, as_exponent
from .norm import DEFAULT_HORIZON, DEFAULT_TOL, phi_norm, seminorms
from .vectors import SeqVector

COMMANDS = ("norm", "embed", "classify", "check", "probe")

EXIT_OK, EXIT_INVALID, EXIT_HORIZON, EXIT_VIOLATED = 0, 1, 2, 3

# defaults double as the list of accepted params per command
DEFAULTS = {
    "norm": {"tol": DEFAULT_TOL, "horizon": DEFAULT_HORIZON, "seminorms": 0},
    "embed": {"epsilon": 0.1, "horizon": DEFAULT_SEARCH_HORIZON, "length": None, "samples": 200, "seed": 0},
    "classify": {},
    "check": {"kind": "upper", "exponent": None, "samples": 100, "count": 4, "max_support": 6, "seed": 0},
    "probe": {"depth": 20},
}
REQUIRED_INPUTS = {
    "norm": ("exponents", "vector"),
    "embed": ("target", "host"),
    "classify": ("exponents",),
    "check": ("exponents",),
    "probe": ("budget",),
}
OPTIONAL_INPUTS = {"check": ("family",)}


class InvalidJob(ValueError):
    pass


# --------------------------------------------------------------------------
# JSON with stable float text
# --------------------------------------------------------------------------


def _float_text(x: float) -> str:
    if math.isinf(x):
        return json.dumps("inf" if x > 0 else "-inf")
    if math.isnan(x):
        raise ValueError("NaN in report")
    s = "%.17g" % x
    if not any(ch in s for ch in ".eEn"):
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: sorted keys, floats as %.17g, infinities as "inf"."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _float_text(obj)
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):  # numpy scalar
        return dumps(obj.item(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "tolist"):
        return dumps(obj.tolist(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _canonical(obj):
    return json.loads(dumps(obj))


# --------------------------------------------------------------------------
# jobs
# --------------------------------------------------------------------------


def _exponents(value) -> ExponentSeq:
    if isinstance(value, (int, float, str)) and not isinstance(value, bool):
        return ExponentSeq.constant(as_exponent(value))
    if isinstance(value, list):
        return ExponentSeq.finite(value)
    if isinstance(value, dict):
        return ExponentSeq.from_dict(value)
    raise InvalidJob(f"cannot read an exponent sequence from {value!r}")


def _vector(value) -> SeqVector:
    if isinstance(value, list):
        return SeqVector.from_dense(value)
    if isinstance(value, dict):
        return SeqVector.from_dict(value)
    raise InvalidJob(f"cannot read a vector from {value!r}")


@dataclass(frozen=True)
class JobSpec:
    command: str
    inputs: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    @classmethod
    def parse(cls, raw: dict, command: str = None) -> "JobSpec":
        if not isinstance(raw, dict):
            raise InvalidJob("job must be a JSON object")
        unknown = set(raw) - {"command", "inputs", "params"}
        if unknown:
            raise InvalidJob(f"unknown job keys: {sorted(unknown)}")
        cmd = raw.get("command", command)
        if command is not None and cmd != command:
            raise InvalidJob(f"job says {cmd!r} but {command!r} was requested")
        if cmd not in COMMANDS:
            raise InvalidJob(f"command must be one of {COMMANDS}, got {cmd!r}")
        inputs = dict(raw.get("inputs") or {})
        params = dict(raw.get("params") or {})

        allowed = set(REQUIRED_INPUTS[cmd]) | set(OPTIONAL_INPUTS.get(cmd, ()))
        if set(inputs) - allowed:
            raise InvalidJob(f"unknown inputs for {cmd}: {sorted(set(inputs) - allowed)}")
        missing = [k for k in REQUIRED_INPUTS[cmd] if k not in inputs]
        if missing:
            raise InvalidJob(f"missing inputs for {cmd}: {missing}")
        if set(params) - set(DEFAULTS[cmd]):
            raise InvalidJob(f"unknown params for {cmd}: {sorted(set(params) - set(DEFAULTS[cmd]))}")

        norm_inputs = {}
        for key, value in inputs.items():
            if key in ("exponents", "target", "host"):
                norm_inputs[key] = _exponents(value).to_dict()
            elif key == "vector":
                norm_inputs[key] = _vector(value).to_dict()
            elif key == "family":
                norm_inputs[key] = [_vector(v).to_dict() for v in value]
            elif key == "budget":
                norm_inputs[key] = float(value)
        return cls(cmd, _canonical(norm_inputs), _canonical({**DEFAULTS[cmd], **params}))

    def to_dict(self) -> dict:
        return {"command": self.command, "inputs": self.inputs, "params": self.params}


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


class _Partial(Exception):
    def __init__(self, result):
        self.result = result


def _run_norm(job):
    p = ExponentSeq.from_dict(job.inputs["exponents"])
    x = SeqVector.from_dict(job.inputs["vector"])
    prm = job.params
    try:
        enc = phi_norm(x, p, tol=float(prm["tol"]), horizon=int(prm["horizon"]), strict=True)
    except HorizonExceeded as exc:
        raise _Partial({"enclosure": exc.enclosure.to_dict() if exc.enclosure else None}) from exc
    result = {"enclosure": enc.to_dict()}
    if int(prm["seminorms"]) > 0:
        result["seminorms"] = list(seminorms(x, p, int(prm["seminorms"])))
    return result, EXIT_OK


def _run_embed(job):
    q = ExponentSeq.from_dict(job.inputs["target"])
    p = ExponentSeq.from_dict(job.inputs["host"])
    prm = job.params
    length = prm["length"]
    try:
        emb = build_embedding(
            q, p, float(prm["epsilon"]), horizon=int(prm["horizon"]), length=None if length is None else int(length)
        )
    except SearchHorizonExceeded as exc:
        raise _Partial({"selected": list(exc.selected), "failed_step": exc.step}) from exc
    result = emb.to_dict()
    if int(prm["samples"]) > 0:
        rep = certify_distortion(emb, samples=int(prm["samples"]), seed=int(prm["seed"]))
        result["distortion"] = {
            "max_ratio": rep.max_ratio,
            "min_ratio": rep.min_ratio,
            "respects_bounds": rep.respects_bounds,
        }
    return result, EXIT_OK


def _run_classify(job):
    p = ExponentSeq.from_dict(job.inputs["exponents"])
    return classify_reflexivity(p).to_dict(), EXIT_OK


def _run_check(job):
    p = ExponentSeq.from_dict(job.inputs["exponents"])
    prm = job.params
    kind = prm["kind"]
    if kind not in ("upper", "lower"):
        raise InvalidJob("kind must be 'upper' or 'lower'")
    r = prm["exponent"]
    if r is None:
        verdict = classify_reflexivity(p)
        if not verdict.superreflexive or verdict.k0 is None:
            raise InvalidJob("no exponent given and the sequence has no checkable (p0, q0)")
        r = verdict.p0 if kind == "upper" else verdict.q0
    r = as_exponent(r)
    check = check_upper_estimate if kind == "upper" else check_lower_estimate
    if "family" in job.inputs:
        families = [[SeqVector.from_dict(v) for v in job.inputs["family"]]]
    else:
        import numpy as np

        rng = np.random.default_rng(int(prm["seed"]))
        families = [
            random_disjoint_family(int(prm["count"]), int(prm["max_support"]), rng) for _ in range(int(prm["samples"]))
        ]
    results = [check(fam, p, r) for fam in families]
    worst = min(results, key=lambda c: c.margin)
    violations = sum(c.violated for c in results)
    result = {
        "kind": kind,
        "exponent": r,
        "families": len(results),
        "violations": violations,
        "worst": worst.to_dict(),
    }
    return result, EXIT_VIOLATED if violations else EXIT_OK


def _run_probe(job):
    depth = int(job.params["depth"])
    w = build_wlur_counterexample(job.inputs["budget"], depth=depth)
    rep = evaluate_wlur_witness(w, depth)
    return {"c": w.c, "exponents": w.exponents.to_dict(), **rep.to_dict()}, EXIT_OK


RUNNERS = {
    "norm": _run_norm,
    "embed": _run_embed,
    "classify": _run_classify,
    "check": _run_check,
    "probe": _run_probe,
}
STATUS = {EXIT_OK: "ok", EXIT_HORIZON: "horizon-exceeded", EXIT_VIOLATED: "violated"}


def run_job(job: JobSpec) -> tuple[dict, int]:
    """Execute a normalized job; returns (report, exit code)."""
    try:
        result, code = RUNNERS[job.command](job)
    except _Partial as partial:
        result, code = {"partial": partial.result, "error": str(partial.__cause__)}, EXIT_HORIZON
    report = {
        "job": job.to_dict(),
        "result": result,
        "meta": {"version": __version__, "seed": job.params.get("seed")},
        "status": STATUS[code],
    }
    return _canonical(report), code


# --------------------------------------------------------------------------
# entry point
# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="varlp", description="Norms, embeddings and diagnostics for l^{p(.)} spaces.")
    ap.add_argument("command", nargs="?", choices=COMMANDS, help="defaults to the job's own command")
    ap.add_argument("--input", "-i", help="job JSON file (default: stdin)")
    ap.add_argument("--output", "-o", help="report file (default: stdout)")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--tol", type=float)
    ap.add_argument("--epsilon", type=float)
    ap.add_argument("--horizon", type=int)
    ap.add_argument("--samples", type=int)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.input and args.input != "-":
            with open(args.input, encoding="utf-8") as fh:
                raw = json.load(fh)
        else:
            raw = json.load(sys.stdin)
        if isinstance(raw, dict):
            overrides = {
                k: getattr(args, k)
                for k in ("seed", "tol", "epsilon", "horizon", "samples")
                if getattr(args, k) is not None
            }
            if overrides:
                raw = {**raw, "params": {**(raw.get("params") or {}), **overrides}}
        job = JobSpec.parse(raw, args.command)
        report, code = run_job(job)
    except (InvalidJob, VarLpError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"varlp: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = dumps(report) + "\n"
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
