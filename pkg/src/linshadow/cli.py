"""Command-line front end: config-driven experiments and golden reproduction.

A config is a JSON document::

    {"command": "classify", "space": {...}, "operator": {...},
     "params": {...}, "seed": 0}

``space`` and ``operator`` use the same dictionaries as
``SequenceSpaceSpec.to_dict`` and ``OperatorDescriptor.to_dict``.  Every run
writes ``report.json`` (plus command-specific CSV or chain documents) into
the output directory.  Exit codes: 0 success, 2 validation error, 3 result
dominated by undecided verdicts, 4 resource budget exceeded; a failing
golden reproduction exits with 1.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .chain import (SERIES_BUDGET, CRStatus, build_chain_e_to_zero, build_chain_zero_to_e,
                    classify_chain_recurrence, transitivity_test, verify_chain)
from .chaos import block_recipe_vector, detect_distributionally_irregular
from .core import ConstructionError, DomainError, ResourceError
from .entire import entire_demo
from .invariance import run_invariance_suite
from .operators import OperatorDescriptor, as_weighted_shift, hyperbolic_splitting, operator_from_dict
from .serialize import chain_to_text, content_hash, format_vector, pseudotrajectory_to_text
from .shadowing import (ShadowRejection, classify_shadowing, finite_shadow_least_squares,
                        generate_pseudotrajectory, shadow_hyperbolic_split, verify_shadowing)
from .spaces import CoordinateVector, SequenceSpaceSpec

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_UNDECIDED, EXIT_BUDGET = 0, 1, 2, 3, 4
COMMANDS = ("classify", "chain", "shadow", "chaos", "invariance-suite", "demo-entire")
STOCHASTIC = ("shadow",)


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    command: str
    space: SequenceSpaceSpec | None
    operator: OperatorDescriptor | None
    params: dict
    seed: int | None
    raw: dict

    @property
    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.raw, sort_keys=True).encode()).hexdigest()


def parse_config(raw: dict, seed: int | None = None, k_max: int | None = None) -> ExperimentConfig:
    """Validate a config document; every error is a :class:`DomainError`."""
    if not isinstance(raw, dict):
        raise DomainError("config must be a JSON object")
    raw = json.loads(json.dumps(raw))
    command = raw.get("command")
    if command not in COMMANDS:
        raise DomainError(f"command must be one of {COMMANDS}, got {command!r}")
    if seed is not None:
        raw["seed"] = seed
    if k_max is not None and "space" in raw:
        raw["space"]["k_max"] = k_max
    space = SequenceSpaceSpec.from_dict(raw["space"]) if "space" in raw else None
    needs_operator = command not in ("invariance-suite", "demo-entire")
    if needs_operator and "operator" not in raw:
        raise DomainError(f"command {command!r} needs an operator")
    operator = operator_from_dict(raw["operator"], space) if "operator" in raw else None
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise DomainError("params must be an object")
    if command in STOCHASTIC and params.get("noise", 1.0) != 0 and "seed" not in raw:
        raise DomainError(f"command {command!r} is stochastic and needs a seed")
    return ExperimentConfig(command, space, operator, params, raw.get("seed"), raw)


def _vector(space, spec) -> CoordinateVector:
    if spec is None:
        return CoordinateVector.zero(space)
    if not isinstance(spec, dict):
        raise DomainError("vectors are given as {index: value} objects")
    return CoordinateVector.from_mapping(space, {int(k): complex(v) if isinstance(v, str) else v
                                                 for k, v in spec.items()})


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return obj.real if obj.imag == 0 else [obj.real, obj.imag]
    if hasattr(obj, "item") and callable(obj.item):
        return _jsonable(obj.item())
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enums
        return obj.value
    if isinstance(obj, float) and obj != obj:
        return "nan"
    return obj


# -----------------------------------------------------------------------------
# commands
# -----------------------------------------------------------------------------
def _cmd_classify(cfg: ExperimentConfig, budget: int) -> tuple[dict, dict, int]:
    T = cfg.operator
    cr = classify_chain_recurrence(T, budget=budget)
    report = {"chain_recurrence": cr.status.value, "cr_note": cr.note,
              "series_evidence": [dataclasses.asdict(e) for e in cr.evidence]}
    status = EXIT_UNDECIDED if cr.status is CRStatus.UNDECIDED else EXIT_OK
    if as_weighted_shift(T) is not None or hasattr(T, "child"):
        try:
            tr = transitivity_test(T, budget=budget)
            report["transitivity"] = tr.status.value
            report["transitivity_evidence"] = [list(e) for e in tr.evidence]
        except DomainError as exc:
            report["transitivity"] = f"n/a: {exc}"
    try:
        report["shadowing"] = classify_shadowing(T).summary()
    except DomainError as exc:
        report["shadowing"] = f"n/a: {exc}"
    return report, {}, status


def _cmd_chain(cfg: ExperimentConfig, budget: int) -> tuple[dict, dict, int]:
    T = cfg.operator
    p = cfg.params
    delta = float(p.get("delta", 0.1))
    index = int(p.get("index", 1))
    cr = classify_chain_recurrence(T, budget=budget)
    report = {"chain_recurrence": cr.status.value,
              "series_evidence": [dataclasses.asdict(e) for e in cr.evidence], "delta": delta, "index": index}
    files = {}
    if cr.status is CRStatus.CHAIN_RECURRENT and as_weighted_shift(T) is not None:
        up = build_chain_zero_to_e(None, T, index, delta, budget=budget)
        files["chain_zero_to_e.txt"] = chain_to_text(up)
        report["chain_zero_to_e"] = {"steps": up.steps, "max_error": up.max_error,
                                     "hash": content_hash(files["chain_zero_to_e.txt"])}
        try:
            down = build_chain_e_to_zero(None, T, index, delta, budget=budget)
            files["chain_e_to_zero.txt"] = chain_to_text(down)
            report["chain_e_to_zero"] = {"steps": down.steps, "max_error": down.max_error,
                                         "hash": content_hash(files["chain_e_to_zero.txt"])}
        except ConstructionError as exc:
            report["chain_e_to_zero"] = f"not built: {exc}"
    status = EXIT_UNDECIDED if cr.status is CRStatus.UNDECIDED else EXIT_OK
    return report, files, status


def _cmd_shadow(cfg: ExperimentConfig, budget: int) -> tuple[dict, dict, int]:
    T = cfg.operator
    p = cfg.params
    delta = float(p.get("delta", 1e-3))
    horizon = int(p.get("horizon", 50))
    eps = float(p.get("epsilon", 10 * delta))
    x0 = _vector(T.space, p.get("x0"))
    window = tuple(p["window"]) if "window" in p else None
    pt = generate_pseudotrajectory(T, x0, delta, horizon, seed=int(cfg.seed or 0), mode=p.get("mode", "noise"),
                                   noise=float(p.get("noise", 1.0)), window=window)
    report: dict = {"delta": delta, "epsilon": eps, "horizon": horizon, "max_defect": pt.max_defect}
    if float(p.get("noise", 1.0)) == 0 or pt.max_defect == 0:
        point, method = pt.points[0], "exact orbit"
    else:
        try:
            point = shadow_hyperbolic_split(T, hyperbolic_splitting(T), pt).point
            method = "hyperbolic splitting"
        except DomainError:
            method = "least squares"
            try:
                point = finite_shadow_least_squares(T, verify_chain(T, pt.points, delta), eps).point
            except ConstructionError as exc:
                report.update(method=method, verdict="not shadowed", details=exc.details)
                return report, {"pseudotrajectory.txt": pseudotrajectory_to_text(pt)}, EXIT_OK
    cert = verify_shadowing(T, pt, point, eps)
    report["method"] = method
    if isinstance(cert, ShadowRejection):
        report["verdict"] = "not shadowed"
        report["rejection"] = {"index": cert.index, "error": [cert.error.lo, cert.error.hi]}
        return report, {"pseudotrajectory.txt": pseudotrajectory_to_text(pt)}, EXIT_OK
    report["verdict"] = "shadowed"
    report["certificate"] = {"epsilon": cert.epsilon, "max_error": [cert.max_error.lo, cert.max_error.hi],
                             "point": format_vector(cert.point)}
    text = pseudotrajectory_to_text(pt, cert)
    report["certificate"]["hash"] = content_hash(text)
    return report, {"pseudotrajectory.txt": text}, EXIT_OK


def _cmd_chaos(cfg: ExperimentConfig, budget: int) -> tuple[dict, dict, int]:
    T = cfg.operator
    p = cfg.params
    horizon = int(p.get("horizon", 10_000))
    if "block_recipe" in p:
        br = p["block_recipe"]
        x = block_recipe_vector(T.space, float(br.get("lam", 2.0)), [tuple(b) for b in br["blocks"]])
    else:
        x = _vector(T.space, p.get("vector"))
    rep = detect_distributionally_irregular(T, x, horizon, sigma=float(p.get("sigma", 1e-3)),
                                            Lambda=float(p.get("Lambda", 1e3)), m=int(p.get("m", 1)))
    report = {"vector": format_vector(x), "horizon": horizon, "I_density": rep.I_density.running_max,
              "I_argmax": rep.I_density.argmax, "J_density": rep.J_density.running_max,
              "J_argmax": rep.J_density.argmax, "irregular": rep.irregular, "truncated_at": rep.truncated_at}
    files = {"orbit.csv": rep.csv()} if p.get("write_orbit", True) else {}
    return report, files, EXIT_OK


def _cmd_invariance(cfg: ExperimentConfig, budget: int) -> tuple[dict, dict, int]:
    rep = run_invariance_suite()
    report = {"comparisons": rep.comparisons, "violations": [dataclasses.asdict(v) for v in rep.violations]}
    return report, {"invariance.csv": rep.csv()}, EXIT_OK


def _cmd_entire(cfg: ExperimentConfig, budget: int) -> tuple[dict, dict, int]:
    p = cfg.params
    demo = entire_demo(complex(p.get("lam", 2.0)), ell=float(p.get("ell", 2.0)), delta=float(p.get("delta", 0.1)),
                       horizon=int(p.get("horizon", 10)), max_degree=int(p.get("max_degree", 12)),
                       table_horizons=tuple(p.get("table_horizons", (10, 20, 30))))
    report = {"steps": [dataclasses.asdict(s) for s in demo.steps], "table": [list(r) for r in demo.table]}
    return report, {"error_growth.csv": demo.csv()}, EXIT_OK


HANDLERS = {"classify": _cmd_classify, "chain": _cmd_chain, "shadow": _cmd_shadow, "chaos": _cmd_chaos,
            "invariance-suite": _cmd_invariance, "demo-entire": _cmd_entire}


def run(cfg: ExperimentConfig, out: Path, budget: int = SERIES_BUDGET) -> int:
    """Execute one experiment and write its report files; returns the exit status."""
    try:
        body, files, status = HANDLERS[cfg.command](cfg, budget)
    except ResourceError as exc:
        body, files, status = {"error": f"resource budget exceeded: {exc}"}, {}, EXIT_BUDGET
    except ConstructionError as exc:
        body, files, status = {"error": f"construction failed: {exc}",
                               "details": getattr(exc, "details", {})}, {}, EXIT_UNDECIDED
    report = {"version": __version__, "config_hash": cfg.digest, "command": cfg.command,
              "operator": cfg.operator.render() if cfg.operator is not None else None,
              "space": cfg.space.render() if cfg.space is not None else None, "seed": cfg.seed,
              "exit_status": status, "result": body}
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")
    for name, text in sorted(files.items()):
        (out / name).write_text(text)
    return status


def _golden(out: Path | None) -> int:
    from .golden import reproduce_golden, results_csv
    results = reproduce_golden()
    for r in results:
        print(r.line())
    csv = results_csv(results)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "golden.csv").write_text(csv)
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="linshadow", description=__doc__.split("\n")[0])
    ap.add_argument("command", nargs="?", choices=COMMANDS + ("reproduce-golden", "run"), default="run",
                    help="experiment to run (default: the command named in the config)")
    ap.add_argument("--config", type=Path, help="JSON experiment config")
    ap.add_argument("--out", type=Path, default=Path("linshadow-out"), help="output directory")
    ap.add_argument("--seed", type=int, help="override the config seed")
    ap.add_argument("--budget-terms", type=int, default=SERIES_BUDGET, help="series term budget")
    ap.add_argument("--k-max", type=int, help="override the seminorm cap of the space")
    ap.add_argument("--version", action="version", version=f"linshadow {__version__}")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "reproduce-golden":
        return _golden(args.out)
    if args.config is None:
        print("error: --config is required", file=sys.stderr)
        return EXIT_INVALID
    try:
        raw = json.loads(args.config.read_text())
        if args.command != "run":
            if raw.get("command", args.command) != args.command:
                raise DomainError(f"config command {raw.get('command')!r} differs from {args.command!r}")
            raw["command"] = args.command
        cfg = parse_config(raw, seed=args.seed, k_max=args.k_max)
    except (OSError, json.JSONDecodeError, DomainError, KeyError, TypeError, ValueError) as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.budget_terms < 1:
        print("error: --budget-terms must be positive", file=sys.stderr)
        return EXIT_INVALID
    status = run(cfg, args.out, args.budget_terms)
    print(f"{cfg.command}: exit {status}, report in {args.out / 'report.json'}")
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
