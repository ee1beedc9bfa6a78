"""The ten acceptance criteria as runnable checks.

Each ``criterion_N(state)`` returns a CriterionResult.  A SuiteState holds
the plan (sample counts), the base seed, the k-range and caches the
instanton samples and audits that several criteria share.
"""
from __future__ import annotations

import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .audit import TheoremViolation, audit, synth_unsmooth_pair, theorem_tracer
from .linalg import LinalgError, rank, to_complex_array, to_fraction_array
from .monads import (
    NotFound,
    certify,
    generate_newton,
    generate_slice,
    h0_plane,
    slice_degenerate,
)
from .pencils import (
    WITNESS_TOL,
    Cond1Witness,
    Cond2Witness,
    WitnessError,
    ZsProbe,
    classify_S,
    lemma21_solve,
    random_S_of_rank,
    verify_cond1,
    zs_residual,
)
from .planes import (
    UnderdeterminedFit,
    plane_intersection_dim,
    quadric_fit,
    unstable_plane_test,
    w_dimension_probe,
)
from .tensors import (
    ATensor,
    STensor,
    flattenings,
    gamma,
    pair_ac,
    random_atensor,
    random_stensor,
    rho,
    rho_matrix,
    s_dim,
    xi,
)

log = logging.getLogger(__name__)

AUDIT_SECONDS = 10.0
PENCIL_SECONDS = 1.0

# Failures of a single instance that count against a criterion without
# stopping the suite.  TheoremViolation is deliberately absent.
INSTANCE_ERRORS = (WitnessError, NotFound, LinalgError, UnderdeterminedFit, ValueError)


@dataclass(frozen=True)
class Plan:
    samples_per_k: int = 5        # criterion 1
    k1_samples: int = 10          # criterion 2
    adjoint_triples: int = 100    # criterion 3
    synthetic_audits: int = 2     # criterion 4, per k
    even_rank_S: int = 500        # criterion 5
    pencil_pairs: int = 500       # criterion 6
    classifier_instances: int = 100  # criterion 7, per case per k
    tracer_pairs: int = 50        # criterion 8
    h0_planes: int = 1000         # criterion 9
    agreement_planes: int = 500   # criterion 9
    probe_trials: int = 20        # criterion 9
    plane_samples_per_k: int = 2  # criterion 9
    degenerate_draws: int = 20    # criterion 10, per k


FULL_PLAN = Plan()
QUICK_PLAN = Plan(samples_per_k=2, k1_samples=3, adjoint_triples=10, synthetic_audits=1,
                  even_rank_S=30, pencil_pairs=30, classifier_instances=3, tracer_pairs=4,
                  h0_planes=50, agreement_planes=30, probe_trials=20, plane_samples_per_k=1,
                  degenerate_draws=3)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} {status}  {self.title}  ({self.seconds:.1f} s)"

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "details": self.details, "failures": self.failures, "seconds": self.seconds}


def default_workers() -> int:
    return os.cpu_count() or 1


def parallel_map(fn: Callable, items: list, workers: int = 1) -> list:
    """Order-preserving map; a process pool when workers > 1."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _seed(base: int, *parts: int) -> int:
    return int(np.random.SeedSequence([base, *parts]).generate_state(1)[0])


# ------------------------------------------------------------ shared state

def _sample_task(args):
    k, index, seed, count = args
    t0 = time.perf_counter()
    if index == count - 1 and count > 1 and k >= 2:
        sample = generate_newton(k, seed)
    else:
        sample = generate_slice(k, seed)
    return sample, time.perf_counter() - t0


def _audit_task(args):
    sample, = args
    A = sample.A
    rec = {"k": A.k, "provenance": sample.provenance, "exact": A.exact}
    t0 = time.perf_counter()
    main = audit(A, cert=sample.certificate)
    rec["audit_seconds"] = time.perf_counter() - t0
    if A.exact:
        other = audit(A.to_complex())
        rec["second_backend"] = "complex"
    else:
        # A float-only sample: the integer outputs must not depend on the tolerance.
        other = audit(A, tol=1e-6)
        rec["second_backend"] = "complex(tol=1e-6)"
    rec.update(main=main, other=other)
    return rec


class SuiteState:
    def __init__(self, plan: Plan = FULL_PLAN, seed: int = 0, ks=(2, 3, 4, 5), workers: int = 1):
        self.plan = plan
        self.seed = seed
        self.ks = tuple(k for k in ks if 2 <= k <= 5)
        self.workers = max(1, workers)
        self._samples: dict = {}
        self._audits: dict = {}
        self.extra_audits: list = []   # (label, AuditReport) from other criteria

    def samples(self, k: int) -> list:
        if k not in self._samples:
            n = self.plan.samples_per_k
            tasks = [(k, i, _seed(self.seed, 1, k, i), n) for i in range(n)]
            self._samples[k] = parallel_map(_sample_task, tasks, self.workers)
        return [s for s, _ in self._samples[k]]

    def audits(self, k: int) -> list:
        if k not in self._audits:
            self._audits[k] = parallel_map(_audit_task, [(s,) for s in self.samples(k)], self.workers)
        return self._audits[k]


def _timed(number: int, title: str, body: Callable[[CriterionResult], None]) -> CriterionResult:
    res = CriterionResult(number, title, True)
    t0 = time.perf_counter()
    body(res)
    res.seconds = time.perf_counter() - t0
    res.passed = not res.failures
    return res


# --------------------------------------------------------------- criteria

def criterion_1(state: SuiteState) -> CriterionResult:
    def body(res):
        for k in state.ks:
            target = 8 * k - 3
            rows = []
            seeds = {(s.provenance["kind"], s.provenance["seed"]) for s in state.samples(k)}
            if len(seeds) < len(state.samples(k)):
                res.failures.append(f"k={k}: repeated seeds")
            for rec in state.audits(k):
                m, o = rec["main"], rec["other"]
                rows.append({"provenance": rec["provenance"]["kind"], "seed": rec["provenance"]["seed"],
                             "moduli_tangent_dim": m.moduli_tangent_dim, "xi_corank": m.xi_corank,
                             "backend": m.backend, "agrees": (m.moduli_tangent_dim, m.xi_corank) ==
                             (o.moduli_tangent_dim, o.xi_corank), "seconds": round(rec["audit_seconds"], 3)})
                tag = f"k={k} seed={rec['provenance']['seed']}"
                if m.moduli_tangent_dim != target or m.xi_corank != 0:
                    res.failures.append(f"{tag}: moduli {m.moduli_tangent_dim}, corank {m.xi_corank}")
                if not rows[-1]["agrees"]:
                    res.failures.append(f"{tag}: {m.backend} and {rec['second_backend']} audits disagree")
                if rec["audit_seconds"] > AUDIT_SECONDS:
                    res.failures.append(f"{tag}: audit took {rec['audit_seconds']:.1f} s")
            if len(rows) < state.plan.samples_per_k:
                res.failures.append(f"k={k}: only {len(rows)} samples")
            res.details[f"k={k}"] = rows
    return _timed(1, "smoothness and dimension 8k-3 for k = 2..5", body)


def criterion_2(state: SuiteState) -> CriterionResult:
    def body(res):
        rng = np.random.default_rng(_seed(state.seed, 2))
        rows = []
        count = 0
        while count < state.plan.k1_samples:
            A = random_atensor(1, rng, size=5)
            if rank(A.flat()) < 4:
                continue
            count += 1
            rep = audit(A)
            state.extra_audits.append(("k=1 random", rep))
            rows.append({"moduli_tangent_dim": rep.moduli_tangent_dim, "xi_corank": rep.xi_corank})
            if rep.moduli_tangent_dim != 5 or rep.xi_corank != 0:
                res.failures.append(f"k=1 sample {count}: {rows[-1]}")
        if s_dim(1) != 0:
            res.failures.append(f"S-space for k=1 has dimension {s_dim(1)}")
        res.details = {"samples": rows, "s_dim": s_dim(1)}
    return _timed(2, "k = 1 sanity", body)


def criterion_3(state: SuiteState) -> CriterionResult:
    def body(res):
        for k in state.ks:
            rng = np.random.default_rng(_seed(state.seed, 3, k))
            const = None
            mismatches = 0
            for _ in range(state.plan.adjoint_triples):
                A, B, S = random_atensor(k, rng), random_atensor(k, rng), random_stensor(k, rng)
                # Independent of the dgamma matrix: polarise gamma directly.
                d = gamma(A + B) - gamma(A) - gamma(B)
                lhs = d @ S.vec()
                rhs = pair_ac(B, xi(A, S))
                if rhs == 0:
                    if lhs != 0:
                        mismatches += 1
                    continue
                ratio = Fraction(lhs) / Fraction(rhs)
                if const is None:
                    const = ratio
                elif ratio != const:
                    mismatches += 1
            ranks_equal = all(rec["main"].rank_dgamma == rec["main"].rank_xi for rec in state.audits(k))
            res.details[f"k={k}"] = {"c": None if const is None else str(const), "mismatches": mismatches,
                                     "rank_dgamma_equals_rank_xi": ranks_equal}
            if const is None or mismatches:
                res.failures.append(f"k={k}: constant {const}, {mismatches} mismatches")
            if not ranks_equal:
                res.failures.append(f"k={k}: rank d gamma != rank xi on an audited sample")
        extra = [rep for _, rep in state.extra_audits if rep.rank_dgamma != rep.rank_xi]
        if extra:
            res.failures.append(f"{len(extra)} further audits with rank d gamma != rank xi")
    return _timed(3, "adjointness of d gamma and xi", body)


def _synthetic_audit(args):
    k, seed, target = args
    S = random_S_of_rank(k, target, seed)
    A, diag = synth_unsmooth_pair(S, seed)
    return audit(A, require_certified=False), diag


def criterion_4(state: SuiteState) -> CriterionResult:
    def body(res):
        checked = 0
        for k in state.ks:
            for rec in state.audits(k):
                checked += 1
                if rec["main"].riemann_roch_gap != 0:
                    res.failures.append(f"k={k} sample {rec['provenance']['seed']}: gap {rec['main'].riemann_roch_gap}")
        for label, rep in state.extra_audits:
            checked += 1
            if rep.riemann_roch_gap != 0:
                res.failures.append(f"{label}: gap {rep.riemann_roch_gap}")
        tasks = [(k, _seed(state.seed, 4, k, i), 2 * (1 + i % (k - 1)))
                 for k in state.ks for i in range(state.plan.synthetic_audits)]
        rows = []
        for (k, _, target), (rep, diag) in zip(tasks, parallel_map(_synthetic_audit, tasks, state.workers)):
            checked += 1
            rows.append({"k": k, "rk_S": target, "moduli_tangent_dim": rep.moduli_tangent_dim,
                         "xi_corank": rep.xi_corank, "gap": rep.riemann_roch_gap})
            if rep.riemann_roch_gap != 0:
                res.failures.append(f"synthetic k={k}: gap {rep.riemann_roch_gap}")
            if rep.xi_corank < 1:
                res.failures.append(f"synthetic k={k}: planted S not seen in the xi kernel")
        res.details = {"audits_checked": checked, "synthetic": rows}
    return _timed(4, "moduli dim - xi corank = 8k-3 on every audit", body)


def _random_S_mix(k: int, i: int, rng) -> STensor:
    kind = i % 3
    if kind == 0:
        return random_stensor(k, rng, size=3)
    if kind == 1:
        # Sparse: a few monomials.
        S = STensor.zeros(k)
        for _ in range(int(rng.integers(1, 4))):
            l, p = rng.integers(0, 4, 2)
            a, b = rng.choice(k, 2, replace=False)
            S = S + STensor.monomial(k, int(l), int(p), int(a), int(b), int(rng.integers(1, 4)))
        return S
    target = 2 * int(rng.integers(0, 2 * k + 1))
    return random_S_of_rank(k, target, int(rng.integers(2**31)))


def criterion_5(state: SuiteState) -> CriterionResult:
    def body(res):
        for k in state.ks:
            rng = np.random.default_rng(_seed(state.seed, 5, k))
            hist = {}
            for i in range(state.plan.even_rank_S):
                S = _random_S_mix(k, i, rng)
                sig, sig_hat = flattenings(S)
                r_rho, r_sig, r_hat = rank(rho_matrix(S)), rank(sig), rank(sig_hat)
                hist[r_rho] = hist.get(r_rho, 0) + 1
                if r_rho % 2 or not r_rho == r_sig == r_hat:
                    res.failures.append(f"k={k} #{i}: ranks rho {r_rho}, sigma {r_sig}, sigma_hat {r_hat}")
            res.details[f"k={k}"] = {str(r): c for r, c in sorted(hist.items())}
    return _timed(5, "rk S is even and the three flattening ranks agree", body)


def _skew(rng, n, size=4):
    X = rng.integers(-size, size + 1, (n, n))
    return (X - X.T).astype(float)


def _with_kernel(rng, n, blocks):
    """Skew matrices T^T (X_t + 0) T sharing a kernel of dimension >= 1.

    For n = 2 the only singular skew matrix is 0, so the blocks vanish.
    """
    m = int(rng.integers(2, n)) if n > 2 else 0
    while True:
        T = rng.integers(-3, 4, (n, n)).astype(float)
        if abs(np.linalg.det(T)) > 0.5:
            break
    out = []
    for _ in range(blocks):
        X = np.zeros((n, n))
        X[:m, :m] = _skew(rng, m) if m else 0
        out.append(T.T @ X @ T)
    return out, m


def pencil_instance(k: int, i: int, rng):
    kind = ("random", "singular-R1", "identically-singular")[i % 3] if i % 5 else "random"
    n = k
    if n == 2 and kind == "identically-singular":
        # Every nonzero 2 x 2 skew pencil is regular.
        kind = "singular-R1"
    while True:
        if kind == "random":
            R1, R2 = _skew(rng, n), _skew(rng, n)
        elif kind == "singular-R1":
            (R1,), _ = _with_kernel(rng, n, 1)
            R2 = _skew(rng, n)
        else:
            (R1, R2), _ = _with_kernel(rng, n, 2)
        if np.linalg.norm(R1) or np.linalg.norm(R2):
            return kind, R1, R2


def check_pencil(R1, R2, w) -> tuple:
    """Independent recheck of R1 v0 = l1 u0, R2 v0 = l2 u0 with a nonzero image."""
    scale = max(np.linalg.norm(R1, 2), np.linalg.norm(R2, 2))
    v = w.v0 / np.linalg.norm(w.v0)
    u = w.u0 / np.linalg.norm(w.v0)
    res = max(np.linalg.norm(R1 @ v - w.lam[0] * u), np.linalg.norm(R2 @ v - w.lam[1] * u)) / scale
    image = np.linalg.norm(np.concatenate([R1 @ v, R2 @ v])) / scale
    return float(res), float(image)


def criterion_6(state: SuiteState) -> CriterionResult:
    def body(res):
        for k in state.ks:
            rng = np.random.default_rng(_seed(state.seed, 6, k))
            kinds = {}
            worst_res, worst_time = 0.0, 0.0
            for i in range(state.plan.pencil_pairs):
                kind, R1, R2 = pencil_instance(k, i, rng)
                kinds[kind] = kinds.get(kind, 0) + 1
                t0 = time.perf_counter()
                try:
                    w = lemma21_solve(R1, R2)
                except INSTANCE_ERRORS as exc:
                    res.failures.append(f"k={k} #{i} ({kind}): {exc}")
                    continue
                dt = time.perf_counter() - t0
                r, image = check_pencil(R1, R2, w)
                worst_res, worst_time = max(worst_res, r), max(worst_time, dt)
                if r > WITNESS_TOL or image <= 1e-9:
                    res.failures.append(f"k={k} #{i} ({kind}): residual {r:.2e}, image {image:.2e}")
                if dt > PENCIL_SECONDS:
                    res.failures.append(f"k={k} #{i}: {dt:.2f} s")
            res.details[f"k={k}"] = {"kinds": kinds, "max_residual": worst_res, "max_seconds": worst_time}
    return _timed(6, "pencil witness solver", body)


def classifier_groups(ks) -> list:
    """(k, expected case, bias, rk) for every reachable case."""
    groups = []
    for k in ks:
        groups.append((k, "cond1", "a", None))
        if k in (4, 5):
            groups.append((k, "cond2", "b", 6))
        if k == 5:
            groups.append((k, "cond3", "c", 8))
            groups.append((k, "cond3", "d", 8))
    return groups


def _classifier_task(args):
    k, expected, bias, rk, seed = args
    rng = np.random.default_rng(seed)
    if rk is None:
        rk = 2 * int(rng.integers(1, k))   # 2 .. 2k-2
    S = random_S_of_rank(k, rk, seed, bias=bias)
    t0 = time.perf_counter()
    try:
        cls = classify_S(S, seed=seed)
    except INSTANCE_ERRORS as exc:
        return {"ok": False, "error": f"{type(exc).__name__}: {exc}"}
    out = {"ok": True, "case": cls.case, "lemma_case": cls.lemma_case, "r": cls.r, "rk": cls.rkS,
           "seconds": time.perf_counter() - t0, "problems": []}
    if cls.case != expected:
        out["problems"].append(f"case {cls.case}, expected {expected}")
    w = cls.witness
    try:
        if isinstance(w, Cond1Witness):
            verify_cond1(S, w.Bstar)
        elif isinstance(w, Cond2Witness):
            f0 = w.fstar0
            worst = max(zs_residual(S, f0, np.eye(k, dtype=int)[j] if w.exact else np.eye(k)[j])
                        for j in range(k))
            if w.exact:
                bad = [j for j in range(k) if np.any(rho(S, np.outer(f0, to_fraction_array(np.eye(k, dtype=int)[j]))) != 0)]
                if bad:
                    out["problems"].append("cond2 witness fails exactly")
            if worst > WITNESS_TOL:
                out["problems"].append(f"cond2 residual {worst:.2e}")
        elif isinstance(w, ZsProbe):
            worst = max((zs_residual(S, p.fstar, p.bstar) for p in w.hit_points), default=np.inf)
            out["zs_points"] = len(w.hit_points)
            out["jacobian_rank"] = w.jacobian_rank
            if len(w.hit_points) < 20 or worst > WITNESS_TOL or w.jacobian_rank != 2:
                out["problems"].append(f"cond3: {len(w.hit_points)} points, residual {worst:.2e}, "
                                       f"jacobian rank {w.jacobian_rank}")
        else:
            out["problems"].append(f"unexpected witness {type(w).__name__}")
    except WitnessError as exc:
        out["problems"].append(str(exc))
    return out


def criterion_7(state: SuiteState) -> CriterionResult:
    def body(res):
        n = state.plan.classifier_instances
        groups = classifier_groups(state.ks)
        tasks = [(k, exp, bias, rk, _seed(state.seed, 7, k, ord(bias), i))
                 for k, exp, bias, rk in groups for i in range(n)]
        outs = parallel_map(_classifier_task, tasks, state.workers)
        for gi, (k, exp, bias, _) in enumerate(groups):
            chunk = outs[gi * n:(gi + 1) * n]
            good = 0
            for t, o in enumerate(chunk):
                if not o["ok"]:
                    res.failures.append(f"k={k} ({bias}) #{t}: {o['error']}")
                elif o["problems"]:
                    res.failures.append(f"k={k} ({bias}) #{t}: {'; '.join(o['problems'])}")
                else:
                    good += 1
            secs = [o["seconds"] for o in chunk if o["ok"]]
            res.details[f"k={k} case ({bias})"] = {
                "expected": exp, "instances": len(chunk), "verified": good,
                "max_seconds": max(secs, default=0.0),
                "min_zs_points": min((o.get("zs_points", 0) for o in chunk if o["ok"]), default=0)
                if exp == "cond3" else None,
            }
    return _timed(7, "classifier cases with verified witnesses", body)


def tracer_options(k: int) -> list:
    """(rk, bias) choices spanning the classifier cases with rk <= 2k-2."""
    opts = [(rk, "a") for rk in range(2, 2 * k - 1, 2)] + [(2 * k - 2, None)]
    if k >= 4:
        opts.append((6, "b"))
    if k == 5:
        opts += [(8, "c"), (8, "d")]
    return opts


def _tracer_task(args):
    k, i, seed = args
    opts = tracer_options(k)
    rk, bias = opts[i % len(opts)]
    S = random_S_of_rank(k, rk, seed, bias=bias)
    A, diag = synth_unsmooth_pair(S, seed)
    if diag["certified"]:
        raise TheoremViolation(f"synthetic A certified as an instanton (k={k}, seed={seed})")
    out = theorem_tracer(A, S, seed=seed)
    return {"case": out.case, "rk": rk, "bias": bias, "xi_zero": diag["xi_zero"]}


def criterion_8(state: SuiteState) -> CriterionResult:
    def body(res):
        for k in state.ks:
            tasks = [(k, i, _seed(state.seed, 8, k, i)) for i in range(state.plan.tracer_pairs)]
            outs = parallel_map(_tracer_task, tasks, state.workers)
            counts = {}
            for o in outs:
                counts[o["case"]] = counts.get(o["case"], 0) + 1
                if o["case"] not in ("I", "II", "III", "E3", "rank-bound"):
                    res.failures.append(f"k={k}: trace ended in {o['case']}")
                if not o["xi_zero"]:
                    res.failures.append(f"k={k}: planted pair has xi != 0")
            res.details[f"k={k}"] = counts
    return _timed(8, "case analysis terminates on synthetic pairs", body)


def _random_plane(rng, exact: bool):
    while True:
        f = rng.integers(-30, 31, 4)
        if np.any(f):
            return f if exact else f + 1j * rng.integers(-30, 31, 4) / 7


def _plane_tol(A: ATensor, f) -> Optional[float]:
    # Exact planes of exact samples are decided exactly; anything numeric
    # uses the verification tolerance of the line probe.
    if A.exact and np.asarray(f).dtype != complex:
        return None
    return 1e-7


def _plane_task(args):
    sample, seed, plan, c1_ok = args
    A = sample.A
    k = A.k
    rng = np.random.default_rng(seed)
    out = {"k": k, "provenance": sample.provenance["kind"], "problems": []}
    worst = 0
    for _ in range(plan.h0_planes):
        worst = max(worst, h0_plane(A, _random_plane(rng, A.exact)))
    out["max_h0_random"] = worst
    if worst > 1:
        out["problems"].append(f"h0 = {worst} on a random plane")
    probe = w_dimension_probe(A, plan.probe_trials, seed)
    out["probe"] = probe.summary()
    for p in probe.hit_points:
        tol = _plane_tol(A, p.fstar)
        h0 = h0_plane(A, p.fstar, tol=tol)
        dim = plane_intersection_dim(A, p.fstar, tol=tol)
        if h0 != 1 or dim != 1:
            out["problems"].append(f"probe hit with h0 {h0}, b* space of dimension {dim}")
    # Agreement on random planes plus planes known to be special.
    special = [p.fstar for p in probe.hit_points]
    if sample.provenance["kind"] == "slice-solve":
        special += [np.array([a, b, 0, 0]) for a, b in rng.integers(-9, 10, (10, 2)) if a or b]
    planes = special[: plan.agreement_planes // 5]
    planes += [_random_plane(rng, A.exact) for _ in range(plan.agreement_planes - len(planes))]
    unstable = 0
    for f in planes:
        tol = _plane_tol(A, f)
        h0 = h0_plane(A, f, tol=tol)
        hit, _ = unstable_plane_test(A, f, tol=tol)
        unstable += hit
        if hit != (h0 >= 1):
            out["problems"].append(f"unstable test {hit} but h0 {h0}")
    out["unstable_in_agreement_set"] = unstable
    if probe.verdict == "dim>=2":
        try:
            _, resid = quadric_fit(probe.hit_points)
            out["quadric_residual"] = resid
            if resid > 1e-8:
                out["problems"].append(f"quadric residual {resid:.2e}")
        except UnderdeterminedFit as exc:
            out["problems"].append(f"quadric fit: {exc}")
        if not c1_ok:
            out["problems"].append("probe says dim>=2 but the sample fails criterion 1")
    return out


def criterion_9(state: SuiteState) -> CriterionResult:
    def body(res):
        tasks = []
        for k in state.ks:
            audits = state.audits(k)
            picked = [0] + ([len(audits) - 1] if len(audits) > 1 else [])
            picked = picked[: state.plan.plane_samples_per_k]
            for i in picked:
                rec = audits[i]
                ok = rec["main"].moduli_tangent_dim == 8 * k - 3 and rec["main"].xi_corank == 0
                tasks.append((state.samples(k)[i], _seed(state.seed, 9, k, i), state.plan, ok))
        outs = parallel_map(_plane_task, tasks, state.workers)
        for o in outs:
            for p in o["problems"]:
                res.failures.append(f"k={o['k']} ({o['provenance']}): {p}")
        res.details = {"samples": [{key: v for key, v in o.items() if key != "problems"} for o in outs]}
    return _timed(9, "unstable planes", body)


def criterion_10(state: SuiteState) -> CriterionResult:
    def body(res):
        slices = newtons = 0
        for k in state.ks:
            for s in state.samples(k):
                A = s.A
                if s.provenance["kind"] == "slice-solve":
                    slices += 1
                    if not A.exact or any(x != 0 for x in gamma(A)):
                        res.failures.append(f"k={k}: slice sample with gamma != 0")
                else:
                    newtons += 1
                    rel = np.linalg.norm(gamma(A)) / np.linalg.norm(to_complex_array(A.a)) ** 2
                    if rel > 1e-10:
                        res.failures.append(f"k={k}: Newton sample with relative residual {rel:.2e}")
        rejected = 0
        rng = np.random.default_rng(_seed(state.seed, 10))
        for k in range(1, 6):
            for _ in range(state.plan.degenerate_draws):
                C = rng.integers(-3, 4, (k + 1, k + 1))
                cert = certify(slice_degenerate(k, C + C.T), e1_samples=20, seed=int(rng.integers(2**31)))
                if cert.is_instanton:
                    res.failures.append(f"k={k}: degenerate draw certified")
                else:
                    rejected += 1
        res.details = {"slice_samples": slices, "newton_samples": newtons, "degenerate_rejected": rejected}
    return _timed(10, "generator soundness", body)


CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10)


def run_suite(plan: Plan = FULL_PLAN, seed: int = 0, ks=(2, 3, 4, 5), workers: int = 1,
              only: Optional[list] = None, echo: Optional[Callable[[str], None]] = None) -> list:
    """Run the criteria in order.  TheoremViolation propagates and aborts the run."""
    state = SuiteState(plan, seed, ks, workers)
    results = []
    for number, fn in enumerate(CRITERIA, start=1):
        if only and number not in only:
            continue
        r = fn(state)
        results.append(r)
        if echo:
            echo(r.line())
    return results


def scaled_plan(plan: Plan, **changes) -> Plan:
    return replace(plan, **changes)
