"""Command-line entry point: problem files in, exit-coded report files out.

Exit codes: 0 all checks pass, 1 a property is violated, 2 the verdict is
undetermined, 3 malformed input or a module-level error.  No report is
written on exit 3.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field

from . import serialize as sz
from .algebra import validate_action, validate_semigroup
from .dilation import bound_constant, build_kolmogorov, build_representation, verify_linearisation
from .errors import SchemaError, WpsdError
from .kernels import (
    STATUS_NOT_POSITIVE,
    STATUS_POSITIVE,
    hermitian_defect_kernel,
    is_hermitian,
    is_invariant,
    strong_positivity,
    weak_positivity,
)
from .lifts import lift_operator_kernel, lift_semigroup_map, verify_factorization
from .repkernel import build_rk, verify_reproducing

COMMANDS = (
    "validate",
    "check-positivity",
    "decompose",
    "represent",
    "bounds",
    "lift",
    "factorize",
    "all",
)

DEFAULT_TOLERANCES = {"structural": 1e-9, "rank": 1e-8, "report": 1e-8}


@dataclass
class Problem:
    space: object
    kernel: object = None
    semigroup: object = None
    action: object = None
    operator_module: object = None
    operator_table: object = None
    semigroup_map: object = None
    tasks: list = field(default_factory=list)
    options: dict = field(default_factory=dict)


def parse_problem(obj) -> Problem:
    if not isinstance(obj, dict):
        raise SchemaError("problem file must be a JSON object")
    space = sz.space_from_json(obj.get("space", {}))
    present = [key for key in ("kernel", "operator_kernel", "semigroup_map") if key in obj]
    if len(present) != 1:
        raise SchemaError(
            f"exactly one of kernel/operator_kernel/semigroup_map required, got {present}"
        )
    p = Problem(space=space)
    if "kernel" in obj:
        p.kernel = sz.kernel_from_json(obj["kernel"], space)
    if "operator_kernel" in obj:
        p.operator_module, p.operator_table = sz.operator_kernel_from_json(obj["operator_kernel"])
    if "semigroup_map" in obj:
        p.semigroup_map = sz.semigroup_map_from_json(obj["semigroup_map"])
    if "semigroup" in obj:
        p.semigroup = sz.semigroup_from_json(obj["semigroup"])
    if "action" in obj:
        p.action = sz.action_from_json(obj["action"])
    tasks = obj.get("tasks", [])
    if not isinstance(tasks, list):
        raise SchemaError("tasks must be a list")
    for t in tasks:
        if t not in COMMANDS or t == "all":
            raise SchemaError(f"unknown task {t!r}")
    p.tasks = tasks
    opts = obj.get("options", {})
    if not isinstance(opts, dict):
        raise SchemaError("options must be an object")
    p.options = opts
    return p


def _tolerances(p: Problem, override_tol=None) -> dict:
    tols = dict(DEFAULT_TOLERANCES)
    tols.update(p.options.get("tolerances", {}))
    if override_tol is not None:
        tols["report"] = override_tol
    return tols


def _effective_kernel_action(p: Problem):
    """The kernel a task operates on, lifting maps when needed."""
    if p.kernel is not None:
        return p.kernel, p.action, None
    if p.semigroup_map is not None:
        if p.semigroup is None:
            raise SchemaError("semigroup_map problems need a 'semigroup' section")
        lk = lift_semigroup_map(p.semigroup_map, p.semigroup)
        return lk.kernel, lk.action, lk
    lk = lift_operator_kernel(p.operator_module, p.operator_table, p.action)
    return lk.kernel, lk.action, lk


def task_validate(p: Problem, opts) -> tuple[dict, int]:
    tols = opts["tolerances"]
    out: dict = {"violations": []}
    if p.semigroup is not None:
        out["violations"] += validate_semigroup(p.semigroup)
    kernel, action, _ = _effective_kernel_action(p)
    if p.semigroup is not None and action is not None:
        out["violations"] += validate_action(p.semigroup, action, kernel.m)
    defect = hermitian_defect_kernel(kernel)
    out["hermitian_defect"] = defect
    if not is_hermitian(kernel):
        out["violations"].append(f"kernel not Hermitian: defect {defect:.3e}")
    if p.semigroup is not None and action is not None and not out["violations"]:
        inv = is_invariant(kernel, p.semigroup, action, tols["structural"])
        out["invariance_violations"] = [list(v) for v in inv[:16]]
        if inv:
            out["violations"].append(f"kernel not invariant ({len(inv)} triples)")
    return out, (0 if not out["violations"] else 1)


def task_check_positivity(p: Problem, opts) -> tuple[dict, int]:
    kernel, _, _ = _effective_kernel_action(p)
    verdict = weak_positivity(
        kernel, restarts=opts["restarts"], seed=opts["seed"], tol=opts["tolerances"]["structural"]
    )
    min_eig, psd = strong_positivity(kernel, opts["tolerances"]["structural"])
    out = {"weak": sz.verdict_to_json(verdict), "strong": {"min_eig": min_eig, "is_psd": psd}}
    if verdict.status == STATUS_POSITIVE:
        return out, 0
    if verdict.status == STATUS_NOT_POSITIVE:
        return out, 1
    return out, 2


def _decompose(p: Problem, opts):
    kernel, action, _ = _effective_kernel_action(p)
    dec = build_kolmogorov(kernel, opts["tolerances"]["rank"])
    defect = verify_linearisation(dec, kernel)
    return kernel, action, dec, defect


def task_decompose(p: Problem, opts) -> tuple[dict, int]:
    _, _, dec, defect = _decompose(p, opts)
    out = {"decomposition": sz.decomposition_to_json(dec), "linearisation_defect": defect}
    return out, (0 if defect <= opts["tolerances"]["report"] else 1)


def task_represent(p: Problem, opts) -> tuple[dict, int]:
    if p.semigroup is None:
        raise SchemaError("represent needs a 'semigroup' section")
    kernel, action, _ = _effective_kernel_action(p)
    if action is None:
        raise SchemaError("represent needs an 'action' section")
    dec = build_kolmogorov(kernel, opts["tolerances"]["rank"])
    rep = build_representation(dec, kernel, p.semigroup, action, opts["tolerances"]["rank"])
    rk = build_rk(dec)
    out = {
        "decomposition": sz.decomposition_to_json(dec),
        "representation": sz.representation_to_json(rep),
        "reproducing_defect": verify_reproducing(rk, kernel),
    }
    worst = max(rep.mult_defect, rep.star_defect, rep.intertwine_defect, out["reproducing_defect"])
    return out, (0 if worst <= opts["tolerances"]["report"] else 1)


def task_bounds(p: Problem, opts) -> tuple[dict, int]:
    if p.semigroup is None:
        raise SchemaError("bounds needs a 'semigroup' section")
    kernel, action, _ = _effective_kernel_action(p)
    if action is None:
        raise SchemaError("bounds needs an 'action' section")
    elements = p.options.get("elements", list(range(p.semigroup.size)))
    out = {"bounds": []}
    ok = True
    for a in elements:
        b = bound_constant(
            kernel, p.semigroup, action, int(a), restarts=opts["restarts"], seed=opts["seed"]
        )
        out["bounds"].append(sz.bound_to_json(b))
        ok = ok and b.lower <= b.upper + opts["tolerances"]["report"]
    return out, (0 if ok else 1)


def task_lift(p: Problem, opts) -> tuple[dict, int]:
    if p.semigroup_map is not None:
        if p.semigroup is None:
            raise SchemaError("semigroup_map problems need a 'semigroup' section")
        lk = lift_semigroup_map(p.semigroup_map, p.semigroup)
        inv = is_invariant(lk.kernel, p.semigroup, lk.action, opts["tolerances"]["structural"])
    elif p.operator_table is not None:
        lk = lift_operator_kernel(p.operator_module, p.operator_table, p.action)
        inv = []
        if p.semigroup is not None and lk.action is not None:
            inv = is_invariant(lk.kernel, p.semigroup, lk.action, opts["tolerances"]["structural"])
    else:
        raise SchemaError("lift needs an operator_kernel or semigroup_map section")
    out = {"lifted": sz.lifted_to_json(lk), "invariance_violations": [list(v) for v in inv[:16]]}
    return out, (0 if not inv else 1)


def task_factorize(p: Problem, opts) -> tuple[dict, int]:
    if p.semigroup_map is None:
        raise SchemaError("factorize needs a 'semigroup_map' section")
    if p.semigroup is None:
        raise SchemaError("factorize needs a 'semigroup' section")
    lk = lift_semigroup_map(p.semigroup_map, p.semigroup)
    dec = build_kolmogorov(lk.kernel, opts["tolerances"]["rank"])
    rep = build_representation(dec, lk.kernel, p.semigroup, lk.action, opts["tolerances"]["rank"])
    residual = verify_factorization(p.semigroup_map, p.semigroup, dec, rep)
    out = {
        "dimension": dec.n,
        "residual": residual,
        "decomposition": sz.decomposition_to_json(dec),
        "representation": sz.representation_to_json(rep),
    }
    return out, (0 if residual <= opts["tolerances"]["report"] else 1)


TASK_RUNNERS = {
    "validate": task_validate,
    "check-positivity": task_check_positivity,
    "decompose": task_decompose,
    "represent": task_represent,
    "bounds": task_bounds,
    "lift": task_lift,
    "factorize": task_factorize,
}

_STATUS_BY_CODE = {0: "pass", 1: "violation", 2: "undetermined"}
_SEVERITY = {0: 0, 2: 1, 1: 2}


def run_tasks(p: Problem, tasks, opts, with_timings: bool) -> tuple[dict, int]:
    report: dict = {"tasks": {}}
    worst = 0
    for name in tasks:
        started = time.perf_counter()
        payload, code = TASK_RUNNERS[name](p, opts)
        if with_timings:
            payload["elapsed_s"] = time.perf_counter() - started
        payload["exit"] = code
        report["tasks"][name] = payload
        if _SEVERITY[code] > _SEVERITY[worst]:
            worst = code
    report["status"] = _STATUS_BY_CODE[worst]
    return report, worst


def _atomic_write(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wpsd",
        description="Verify and decompose weakly positive semidefinite kernels.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("problem", help="path to a problem JSON file")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--restarts", type=int, default=None)
    parser.add_argument("--tol", type=float, default=None, help="report pass/fail tolerance")
    parser.add_argument(
        "--no-timestamp",
        action="store_true",
        help="omit timestamp and timings so identical inputs give identical bytes",
    )
    args = parser.parse_args(argv)

    try:
        with open(args.problem) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"wpsd: cannot read problem file: {exc}", file=sys.stderr)
        return 3

    try:
        problem = parse_problem(raw)
        opts = {
            "seed": args.seed if args.seed is not None else int(problem.options.get("seed", 0)),
            "restarts": args.restarts
            if args.restarts is not None
            else int(problem.options.get("restarts", 64)),
            "tolerances": _tolerances(problem, args.tol),
        }
        tasks = [args.command] if args.command != "all" else (problem.tasks or ["validate"])
        report, code = run_tasks(problem, tasks, opts, with_timings=not args.no_timestamp)
    except WpsdError as exc:
        print(f"wpsd: {exc}", file=sys.stderr)
        return 3

    if not args.no_timestamp:
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
