"""Command-line front end.

Exit status: 0 on success, 1 on a domain or validation error, 2 on a usage error.
Result files go to ``--out-dir``, defaulting to ``$SQUEEZEBOUND_OUT`` or the
current directory.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from . import records
from .discs import DiscSearchConfig
from .domain import DomainError, DomainSpec, builtin
from .experiment import decay_experiment, parse_delta_range
from .kobayashi import SearchFailure, indicatrix_radii, kobayashi_upper, lower_estimates
from .normal_form import NormalFormError, jet_from_domain, reduce_to_normal_form
from .specfile import load_spec
from .squeezing import squeezing_upper

OUT_ENV = "SQUEEZEBOUND_OUT"


@dataclass
class RunConfig:
    command: str
    domain: dict
    deltas: List[float] = field(default_factory=list)
    disc: dict = field(default_factory=dict)
    seed: int = 0
    mode: str = ""
    extra: dict = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def parse_point(text: str) -> np.ndarray:
    try:
        return np.array([complex(s.strip().replace("i", "j")) for s in text.split(",")], dtype=complex)
    except ValueError:
        raise DomainError(f"cannot parse point {text!r}") from None


def _add_domain_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("spec", nargs="?", help="domain spec file")
    p.add_argument("--builtin", help="model, herbort, convex-control or ball")
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--r", type=float)
    p.add_argument("--locality-radius", type=float)


def _add_disc_args(p: argparse.ArgumentParser) -> None:
    d = DiscSearchConfig()
    p.add_argument("--max-degree", type=int, default=d.max_degree)
    p.add_argument("--boundary-samples", type=int, default=d.boundary_samples)
    p.add_argument("--interior-rings", type=int, default=d.interior_rings)
    p.add_argument("--safety-margin", type=float, default=d.safety_margin)
    p.add_argument("--optimizer-budget", type=int, default=d.optimizer_budget)
    p.add_argument("--bisection-rel-tol", type=float, default=d.bisection_rel_tol)


def _add_output_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--name", default=None, help="basename of the result files")
    p.add_argument("--deterministic", action="store_true", help="omit the timestamp")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="squeezebound",
                                     description="Kobayashi metric and squeezing-function bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("normal-form", help="reduce the jet at q to normal form")
    _add_domain_args(p)
    p.add_argument("--truncation", type=int, default=24)
    _add_output_args(p)

    p = sub.add_parser("kobayashi", help="upper and lower estimates of K(p, zeta)")
    _add_domain_args(p)
    p.add_argument("--point", required=True)
    p.add_argument("--dir", required=True)
    _add_disc_args(p)
    _add_output_args(p)

    p = sub.add_parser("indicatrix", help="radius intervals of the indicatrix")
    _add_domain_args(p)
    p.add_argument("--point", required=True)
    p.add_argument("--dirs", required=True, help="directions separated by ';'")
    _add_disc_args(p)
    _add_output_args(p)

    p = sub.add_parser("squeeze-bound", help="squeezing-function upper bound at depth delta")
    _add_domain_args(p)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--mode", choices=("numeric", "closed-form"), default="numeric")
    _add_disc_args(p)
    _add_output_args(p)

    p = sub.add_parser("experiment", help="decay sweep over a delta grid")
    _add_domain_args(p)
    p.add_argument("--deltas", required=True, help="start:end:count or a comma list")
    p.add_argument("--mode", choices=("numeric", "closed-form"), default="closed-form")
    p.add_argument("--jobs", type=int, default=1)
    _add_disc_args(p)
    _add_output_args(p)

    p = sub.add_parser("verify", help="run the property checks and verify result files")
    p.add_argument("files", nargs="*")
    p.add_argument("--quick", action="store_true", help="skip the disc-search checks")
    return parser


def _domain(args) -> tuple:
    params = {k: getattr(args, k) for k in ("k", "m", "a", "b", "r", "locality_radius")
              if getattr(args, k) is not None}
    if args.builtin and args.spec:
        raise _Usage("give either a spec file or --builtin, not both")
    if args.builtin:
        dom = builtin(args.builtin, **dict(params))
        return dom, {"builtin": args.builtin, "params": params}
    if not args.spec:
        raise _Usage("a spec file or --builtin is required")
    if params:
        raise _Usage("family parameters only apply with --builtin")
    dom = load_spec(args.spec)
    with open(args.spec, encoding="utf-8") as fh:
        text = fh.read()
    return dom, {"spec": args.spec, "spec_text": text}


def _disc_cfg(args) -> DiscSearchConfig:
    return DiscSearchConfig(args.max_degree, args.boundary_samples, args.interior_rings,
                            args.safety_margin, args.optimizer_budget, args.bisection_rel_tol,
                            args.seed)


class _Usage(Exception):
    pass


def _emit(args, cfg: RunConfig, recs: List[dict], csv_text: Optional[str] = None) -> None:
    out_dir = args.out_dir or os.environ.get(OUT_ENV, ".")
    os.makedirs(out_dir, exist_ok=True)
    name = args.name or cfg.command
    path = os.path.join(out_dir, name + ".jsonl")
    cfg.outputs = [path]
    if csv_text is not None:
        csv_path = os.path.join(out_dir, name + ".csv")
        cfg.outputs.append(csv_path)
        cfg.extra["csv_sha256"] = records.text_digest(csv_text)
        with open(csv_path, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    records.write_results(path, cfg.to_dict(), recs, args.deterministic)
    for r in recs:
        print(json.dumps(r, sort_keys=True, allow_nan=False))
    if csv_text is not None:
        sys.stdout.write(csv_text)


def _cmd_normal_form(args):
    dom, src = _domain(args)
    res = reduce_to_normal_form(jet_from_domain(dom, args.truncation))
    cfg = RunConfig("normal-form", src, seed=args.seed, extra={"truncation": args.truncation})
    _emit(args, cfg, [records.normal_form_to_dict(res)])


def _cmd_kobayashi(args):
    dom, src = _domain(args)
    p, zeta = parse_point(args.point), parse_point(args.dir)
    dcfg = _disc_cfg(args)
    up = kobayashi_upper(dom, p, zeta, dcfg)
    recs = [records.estimate_to_dict(up, dom.family_tag)]
    recs += [records.estimate_to_dict(m, dom.family_tag) for m in lower_estimates(dom, p, zeta)]
    cfg = RunConfig("kobayashi", src, disc=dcfg.to_dict(), seed=args.seed,
                    extra={"point": args.point, "dir": args.dir})
    _emit(args, cfg, recs)


def _cmd_indicatrix(args):
    dom, src = _domain(args)
    p = parse_point(args.point)
    dirs = [parse_point(s) for s in args.dirs.split(";") if s.strip()]
    dcfg = _disc_cfg(args)
    data = indicatrix_radii(dom, p, dirs, dcfg)
    cfg = RunConfig("indicatrix", src, disc=dcfg.to_dict(), seed=args.seed,
                    extra={"point": args.point, "dirs": args.dirs})
    _emit(args, cfg, [records.indicatrix_to_dict(data, dom.family_tag)])


def _cmd_squeeze(args):
    dom, src = _domain(args)
    dcfg = _disc_cfg(args)
    mode = args.mode.replace("-", "_")
    b = squeezing_upper(dom, args.delta, dcfg, mode)
    cfg = RunConfig("squeeze-bound", src, [args.delta], dcfg.to_dict(), args.seed, mode)
    _emit(args, cfg, [records.squeezing_to_dict(b, dom.family_tag)])


def _cmd_experiment(args):
    dom, src = _domain(args)
    try:
        deltas = parse_delta_range(args.deltas)
    except ValueError as exc:
        raise _Usage(str(exc)) from None
    dcfg = _disc_cfg(args)
    mode = args.mode.replace("-", "_")
    table = decay_experiment(dom, deltas, dcfg, mode, jobs=max(1, args.jobs))
    cfg = RunConfig("experiment", src, deltas, dcfg.to_dict(), args.seed, mode)
    recs = [records.squeezing_to_dict(r, dom.family_tag) for r in table.rows]
    recs.append({"record": "summary", **table.summary()})
    _emit(args, cfg, recs, table.to_csv())


def _cmd_verify(args):
    from .checks import run_checks
    ok = True
    for path in args.files:
        good = records.verify_file(path)
        print(f"{'PASS' if good else 'FAIL'} config hash {path}")
        ok &= good
    ok &= run_checks(quick=args.quick, out=sys.stdout)
    return 0 if ok else 1


COMMANDS = {"normal-form": _cmd_normal_form, "kobayashi": _cmd_kobayashi,
            "indicatrix": _cmd_indicatrix, "squeeze-bound": _cmd_squeeze,
            "experiment": _cmd_experiment, "verify": _cmd_verify}


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        status = COMMANDS[args.command](args)
        return int(status or 0)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, NormalFormError, SearchFailure, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
