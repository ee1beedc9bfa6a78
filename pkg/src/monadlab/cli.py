"""Command-line entry point.

Exit codes: 0 all assertions pass, 1 a mathematical assertion failed,
2 invalid input, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from typing import Optional

import numpy as np

from . import acceptance
from .audit import NotCertified, TheoremViolation, audit, synth_unsmooth_pair, theorem_tracer
from .io import FormatError, RunReport, dumps, load_tensor, save_report, save_tensor
from .linalg import LinalgError
from .monads import NotFound, certify, generate_newton, generate_slice, h0_plane
from .pencils import WitnessError, classify_S, random_S_of_rank
from .planes import UnderdeterminedFit, quadric_fit, w_dimension_probe

EXIT_OK, EXIT_MATH, EXIT_INPUT, EXIT_NONCONVERGENCE = 0, 1, 2, 3

log = logging.getLogger("monadlab")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load(path: str, kind: str):
    tf = load_tensor(path)
    if tf.kind != kind:
        raise FormatError(f"{path}: expected {kind}, found {tf.kind}")
    return tf


def _backend(A, backend: str):
    if backend == "float":
        return A.to_complex()
    if not A.exact:
        raise CliError("exact backend requested for a complex-float tensor", EXIT_INPUT)
    return A


def _generate(kind: str, k: int, seed: int, max_iter: int = 50):
    if kind == "slice":
        return generate_slice(k, seed)
    return generate_newton(k, seed, max_iter=max_iter)


# -------------------------------------------------------------- commands

def cmd_gen(args, report: RunReport) -> int:
    t0 = time.perf_counter()
    sample = _generate(args.generator, args.k, args.seed, args.max_iter)
    report.timings["generate"] = time.perf_counter() - t0
    meta = {"seed": args.seed, "provenance": sample.provenance}
    if args.out:
        save_tensor(args.out, sample.A, meta)
    report.results = {"provenance": sample.provenance, "certificate": sample.certificate.summary(),
                      "out": args.out}
    return EXIT_OK


def cmd_gen_s(args, report: RunReport) -> int:
    S = random_S_of_rank(args.k, args.rank, args.seed, bias=args.bias)
    if args.out:
        save_tensor(args.out, S, {"seed": args.seed, "rank": args.rank, "bias": args.bias})
    report.results = {"k": args.k, "rank": args.rank, "bias": args.bias, "out": args.out}
    return EXIT_OK


def cmd_synth(args, report: RunReport) -> int:
    S = _load(args.s, "STensor").tensor
    A, diag = synth_unsmooth_pair(S, args.seed)
    if args.out:
        save_tensor(args.out, A, {"seed": args.seed, "provenance": "synthetic", "s_file": args.s})
    report.results = {"diagnostics": diag, "out": args.out}
    if diag["certified"]:
        report.fail("synthetic A certified as an instanton")
        return EXIT_MATH
    return EXIT_OK


def cmd_certify(args, report: RunReport) -> int:
    A = _load(args.input, "ATensor").tensor
    t0 = time.perf_counter()
    cert = certify(A, e1_samples=args.e1_samples, seed=args.seed)
    report.timings["certify"] = time.perf_counter() - t0
    report.results = {"certificate": cert.summary(), "internal_error": cert.internal_error}
    if not cert.is_instanton:
        report.fail("not an instanton")
        return EXIT_MATH
    return EXIT_OK


def cmd_audit(args, report: RunReport) -> int:
    if args.input:
        A = _load(args.input, "ATensor").tensor
    else:
        if args.k is None or args.seed is None:
            raise CliError("audit needs --in or both --k and --seed", EXIT_INPUT)
        A = _generate(args.generator, args.k, args.seed).A
    A = _backend(A, args.backend)
    rep = audit(A, probe_trials=args.probe_trials, seed=args.seed or 0)
    report.results = {"audit": rep.to_dict(), "riemann_roch_gap": rep.riemann_roch_gap}
    report.timings.update(rep.timings)
    k = A.k
    if rep.xi_corank > 0:
        report.fail(f"certified instanton with xi corank {rep.xi_corank}")
    if k >= 1 and rep.moduli_tangent_dim != 8 * k - 3:
        report.fail(f"moduli tangent dimension {rep.moduli_tangent_dim} != {8 * k - 3}")
    return EXIT_OK if report.passed else EXIT_MATH


def cmd_planes(args, report: RunReport) -> int:
    A = _load(args.input, "ATensor").tensor
    cert = certify(A, seed=args.seed)
    if not cert.is_instanton:
        raise NotCertified("plane checks need a certified instanton")
    rng = np.random.default_rng(args.seed)
    worst = 0
    for _ in range(args.planes):
        f = rng.integers(-30, 31, 4)
        if np.any(f):
            worst = max(worst, h0_plane(A, f if A.exact else f.astype(complex)))
    probe = w_dimension_probe(A, args.trials, args.seed)
    res = {"max_h0_random": worst, "probe": probe.summary(),
           "hits": [p.to_dict() for p in probe.hit_points]}
    if worst > 1:
        report.fail(f"h0 = {worst} on a random plane")
    if any(p.h0 != 1 for p in probe.hit_points):
        report.fail("a probe hit has h0 != 1")
    if probe.verdict == "dim>=2":
        try:
            q, resid = quadric_fit(probe.hit_points)
            res["quadric"] = {"coefficients": q, "residual": resid}
            if resid > 1e-8:
                report.fail(f"quadric residual {resid:.2e}")
        except UnderdeterminedFit as exc:
            report.fail(f"quadric fit: {exc}")
    report.results = res
    return EXIT_OK if report.passed else EXIT_MATH


def cmd_classify(args, report: RunReport) -> int:
    S = _load(args.input, "STensor").tensor
    cls = classify_S(S, seed=args.seed)
    report.results = {"classification": cls.summary()}
    return EXIT_OK


def cmd_trace(args, report: RunReport) -> int:
    A = _load(args.a, "ATensor").tensor
    S = _load(args.s, "STensor").tensor
    out = theorem_tracer(A, S, seed=args.seed)
    report.results = {"trace": out.to_dict()}
    return EXIT_OK


def _parse_range(text: str) -> tuple:
    try:
        if "-" in text:
            lo, hi = (int(t) for t in text.split("-", 1))
            return tuple(range(lo, hi + 1))
        return tuple(int(t) for t in text.split(","))
    except ValueError as exc:
        raise CliError(f"bad k range {text!r}", EXIT_INPUT) from exc


def cmd_suite(args, report: RunReport) -> int:
    ks = _parse_range(args.k_range)
    if not ks or any(not 1 <= k <= 5 for k in ks):
        raise CliError("k range must lie in 1..5", EXIT_INPUT)
    plan = acceptance.QUICK_PLAN if args.quick else acceptance.FULL_PLAN
    only = [int(x) for x in args.only.split(",")] if args.only else None
    echo = (lambda line: print(line, file=sys.stderr)) if not args.quiet else None
    results = acceptance.run_suite(plan, seed=args.seed, ks=ks, workers=args.workers,
                                   only=only, echo=echo)
    report.results = {"plan": plan.__dict__, "criteria": [r.to_dict() for r in results]}
    report.timings = {f"criterion_{r.number}": r.seconds for r in results}
    for r in results:
        if not r.passed:
            report.fail(f"criterion {r.number}: {r.failures[:3]}")
    return EXIT_OK if report.passed else EXIT_MATH


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="monadlab", description="Instanton monad verification lab.")
    p.add_argument("--report", help="write a JSON run report to this path")
    p.add_argument("--no-timings", action="store_true", help="omit wall-clock timings from the report")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a certified instanton sample")
    g.add_argument("generator", choices=["slice", "newton"])
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out")
    g.add_argument("--max-iter", type=int, default=50)
    g.set_defaults(func=cmd_gen)

    g = sub.add_parser("gen-s", help="generate an S tensor of given rank")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--rank", type=int, required=True)
    g.add_argument("--bias", choices=["a", "b", "c", "d"])
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_s)

    g = sub.add_parser("synth", help="plant A with xi(A, S) = 0 for a given S")
    g.add_argument("--s", required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out")
    g.set_defaults(func=cmd_synth)

    g = sub.add_parser("certify", help="check (E1), (E2), (E3)")
    g.add_argument("--in", dest="input", required=True)
    g.add_argument("--e1-samples", type=int, default=200)
    g.add_argument("--seed", type=int, required=True)
    g.set_defaults(func=cmd_certify)

    g = sub.add_parser("audit", help="tangent dimensions and xi corank")
    g.add_argument("--in", dest="input")
    g.add_argument("--k", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--generator", choices=["slice", "newton"], default="slice")
    g.add_argument("--backend", choices=["exact", "float"], default="exact")
    g.add_argument("--probe-trials", type=int, default=0)
    g.set_defaults(func=cmd_audit)

    g = sub.add_parser("planes", help="unstable plane checks")
    g.add_argument("--in", dest="input", required=True)
    g.add_argument("--trials", type=int, default=20)
    g.add_argument("--planes", type=int, default=1000)
    g.add_argument("--seed", type=int, required=True)
    g.set_defaults(func=cmd_planes)

    g = sub.add_parser("classify", help="classify an S tensor")
    g.add_argument("--in", dest="input", required=True)
    g.add_argument("--seed", type=int, required=True)
    g.set_defaults(func=cmd_classify)

    g = sub.add_parser("trace", help="case analysis on a pair with xi(A, S) = 0")
    g.add_argument("--a", required=True)
    g.add_argument("--s", required=True)
    g.add_argument("--seed", type=int, required=True)
    g.set_defaults(func=cmd_trace)

    g = sub.add_parser("suite", help="run the acceptance criteria")
    g.add_argument("--k-range", default="1-5")
    g.add_argument("--quick", action="store_true", help="small sample counts")
    g.add_argument("--workers", type=int, default=acceptance.default_workers())
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--only", help="comma-separated criterion numbers")
    g.add_argument("--quiet", action="store_true")
    g.set_defaults(func=cmd_suite)
    return p


def _config(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func",)}


def main(argv: Optional[list] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    report = RunReport(command=["monadlab", *argv], config=_config(args))
    try:
        code = args.func(args, report)
    except CliError as exc:
        report.fail(str(exc))
        code = exc.code
    except TheoremViolation as exc:
        report.fail(f"theorem violation: {exc}")
        code = EXIT_MATH
    except WitnessError as exc:
        report.fail(f"witness failed: {exc}")
        code = EXIT_MATH
    except NotFound as exc:
        report.fail(f"no convergence: {exc}")
        report.results["residual"] = exc.residual
        code = EXIT_NONCONVERGENCE
    except (FormatError, NotCertified, ValueError, LinalgError, FileNotFoundError) as exc:
        report.fail(f"invalid input: {exc}")
        code = EXIT_INPUT
    for msg in report.failures:
        print(f"monadlab: {msg}", file=sys.stderr)
    out = report.to_json(with_timings=not args.no_timings)
    out["exit_code"] = code
    sys.stdout.write(dumps(out))
    if args.report:
        save_report(args.report, report, with_timings=not args.no_timings)
    return code


if __name__ == "__main__":
    sys.exit(main())
