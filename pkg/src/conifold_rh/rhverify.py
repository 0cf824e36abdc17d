"""Explicit solution of the conifold Riemann-Hilbert problem and its checks.

For (v, w) in M_PLUS the solution on V(0) = H(-1) u H(0) is

    B(v, w, t) = F*(v | w, -t),    D(v, w, t) = H*(v | w, -t),

with B_n, D_n obtained by v -> v + n w (and D_n picking up B_0(v + n w)^n).
H(n) is the open half-plane centred on the ray l_n = R_{>0} 2 pi i (v + n w).
Points of M_MINUS reduce to M_PLUS through B(-v) = 1/B(v), D(-v) = D(v);
points of M_ZERO with 0 < v/w < 1 use the same formulas with x1 on the unit
circle.

Every check returns a :class:`VerificationReport`; failures are reported,
never raised.
"""

from __future__ import annotations

import cmath
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bps import (Charge, ConifoldPoint, Region, TwistedSeries, check_z_action, commutator_defect,
                  sector_automorphism, sector_closed_form, sector_rays)
from .errors import ConifoldError, DomainError
from .msine import (SineArgs, eval_F_star, eval_H_dagger, eval_H_star, eval_tau,
                    macmahon_factor, theta_product, weighted_theta_product)
from .numlib import format_complex

TWO_PI_I = 2j * math.pi
EDGE_MARGIN = math.radians(5.0)


# ---------------------------------------------------------------- reports

@dataclass
class VerificationReport:
    suite: str
    tolerance: float
    samples: int
    max_residual: float
    passed: bool
    details: list[dict] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @staticmethod
    def from_residuals(suite: str, tolerance: float, details: list[dict],
                       extra_ok: bool = True, info: dict | None = None) -> "VerificationReport":
        res = [d["residual"] for d in details]
        mx = max(res) if res else 0.0
        if any(not math.isfinite(r) for r in res):
            mx = math.inf
        return VerificationReport(suite, tolerance, len(details), mx,
                                  bool(extra_ok and mx <= tolerance), details, info or {})

    def to_json(self) -> dict:
        def enc(x):
            if isinstance(x, complex):
                return format_complex(x)
            if isinstance(x, float) and not math.isfinite(x):
                return repr(x)
            if isinstance(x, dict):
                return {k: enc(v) for k, v in x.items()}
            if isinstance(x, (list, tuple)):
                return [enc(v) for v in x]
            return x

        return {"suite": self.suite, "tolerance": self.tolerance, "samples": self.samples,
                "max_residual": enc(self.max_residual), "passed": self.passed,
                "details": enc(self.details), "info": enc(self.info)}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def merge_reports(suite: str, reports: Sequence[VerificationReport]) -> VerificationReport:
    details = []
    for r in reports:
        for d in r.details:
            details.append({"sub_suite": r.suite, **d})
    mx = max((r.max_residual for r in reports), default=0.0)
    return VerificationReport(suite, max(r.tolerance for r in reports), len(details), mx,
                              all(r.passed for r in reports), details,
                              {"parts": {r.suite: r.passed for r in reports}})


def _pmap(fn: Callable, items: list, jobs: int) -> list:
    """Map preserving order; a process pool when jobs > 1."""
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


# ---------------------------------------------------------------- regions

def _plus_v(p: ConifoldPoint) -> complex:
    """The v used in ray labels: v on M_PLUS and M_ZERO, -v on M_MINUS."""
    return -p.v if p.region is Region.M_MINUS else p.v


def ray_vector(p: ConifoldPoint, n: int) -> complex:
    return TWO_PI_I * (_plus_v(p) + n * p.w)


def in_half_plane(p: ConifoldPoint, t: complex, n: int) -> bool:
    """t in H(n): Re(t / (2 pi i (v + n w))) > 0."""
    return (t / ray_vector(p, n)).real > 0


def in_V(p: ConifoldPoint, t: complex, n: int = 0) -> bool:
    if p.region is Region.M_ZERO:
        r = t / p.w
        return t != 0 and not (abs(r.imag) <= 1e-14 * abs(r) and r.real > 0)
    return in_half_plane(p, t, n - 1) or in_half_plane(p, t, n)


def sigma0_bisector(p: ConifoldPoint, n: int = 0) -> float:
    """Angle of the bisector of Sigma(n), the sector between l_{n-1} and l_n."""
    a = ray_vector(p, n - 1)
    b = ray_vector(p, n)
    u = a / abs(a) + b / abs(b)
    return cmath.phase(u)


def sample_half_plane(p: ConifoldPoint, n: int, count: int, rng: random.Random,
                      rmin: float = 0.15, rmax: float = 2.0) -> list[complex]:
    """Points of H(n) kept EDGE_MARGIN away from its boundary line, |t| in [rmin, rmax] |w|."""
    c = cmath.phase(ray_vector(p, n))
    half = math.pi / 2 - EDGE_MARGIN
    out = []
    for _ in range(count):
        ang = c + rng.uniform(-half, half)
        r = abs(p.w) * math.exp(rng.uniform(math.log(rmin), math.log(rmax)))
        out.append(r * cmath.exp(1j * ang))
    return out


def sample_sector(p: ConifoldPoint, count: int, rng: random.Random, rotate: complex = 1,
                  rmin: float = 0.15, rmax: float = 2.0) -> list[complex]:
    """Points of rotate * Sigma(0) with the angular margin applied on both sides."""
    a = cmath.phase(ray_vector(p, -1))
    b = cmath.phase(ray_vector(p, 0))
    # Sigma(0) runs counterclockwise from l_0 to l_{-1}
    width = (a - b) % (2 * math.pi)
    out = []
    for _ in range(count):
        ang = b + EDGE_MARGIN + rng.uniform(0, max(width - 2 * EDGE_MARGIN, 0.0))
        r = abs(p.w) * math.exp(rng.uniform(math.log(rmin), math.log(rmax)))
        out.append(rotate * r * cmath.exp(1j * ang))
    return out


# ---------------------------------------------------------------- the solution

def _check_region(p: ConifoldPoint, t: complex, n: int) -> None:
    if not in_V(p, t, n):
        raise DomainError(f"t = {t} is outside V({n}) for this point")


def _B_plus(v: complex, w: complex, t: complex, boundary: bool) -> complex:
    return eval_F_star(SineArgs(v, w, -t), allow_boundary=boundary).value


def _D_plus(v: complex, w: complex, t: complex, boundary: bool) -> complex:
    return eval_H_star(SineArgs(v, w, -t), allow_boundary=boundary).value


def solve_Bn(p: ConifoldPoint, t: complex, n: int = 0, check_region: bool = True) -> complex:
    t = complex(t)
    if check_region:
        _check_region(p, t, n)
    vp = _plus_v(p) + n * p.w
    b = _B_plus(vp, p.w, t, p.region is Region.M_ZERO)
    return 1 / b if p.region is Region.M_MINUS else b


def solve_Dn(p: ConifoldPoint, t: complex, n: int = 0, check_region: bool = True) -> complex:
    t = complex(t)
    if check_region:
        _check_region(p, t, n)
    vp = _plus_v(p) + n * p.w
    boundary = p.region is Region.M_ZERO
    d = _D_plus(vp, p.w, t, boundary)
    if n:
        d *= _B_plus(vp, p.w, t, boundary) ** n
    return d


def solve_B(p: ConifoldPoint, t: complex, check_region: bool = True) -> complex:
    return solve_Bn(p, t, 0, check_region)


def solve_D(p: ConifoldPoint, t: complex, check_region: bool = True) -> complex:
    return solve_Dn(p, t, 0, check_region)


@dataclass(frozen=True)
class SolutionSample:
    point: ConifoldPoint
    t: complex
    sector_index: int
    B: complex
    D: complex


def solve_sample(p: ConifoldPoint, t: complex, n: int = 0) -> SolutionSample:
    """B_n and D_n at t in V(n), bundled; raises if either is zero or not finite."""
    b = solve_Bn(p, t, n)
    d = solve_Dn(p, t, n)
    for val in (b, d):
        if val == 0 or not cmath.isfinite(val):
            raise DomainError(f"degenerate solution value {val} at t = {t}")
    return SolutionSample(p, complex(t), n, b, d)


def xq(p: ConifoldPoint, t: complex) -> tuple[complex, complex]:
    """x = exp(-2 pi i v/t), q = exp(-2 pi i w/t) with the labelling v of the ray diagram."""
    return cmath.exp(-TWO_PI_I * _plus_v(p) / t), cmath.exp(-TWO_PI_I * p.w / t)


def null_class_phi(p: ConifoldPoint, a: int, b: int, t: complex) -> complex:
    """Phi_gamma(t) = exp(-Z(gamma)/t) for gamma = a beta + b delta; Psi_gamma = 1 by construction."""
    return cmath.exp(-TWO_PI_I * (a * p.v + b * p.w) / t)


# ---------------------------------------------------------------- jump checks

def _rel(lhs: complex, rhs: complex) -> float:
    if not (cmath.isfinite(lhs) and cmath.isfinite(rhs)) or rhs == 0:
        return math.inf
    return abs(lhs / rhs - 1)


def _safe(fn: Callable[[], float]) -> tuple[float, str | None]:
    try:
        return fn(), None
    except ConifoldError as e:
        return math.inf, f"{type(e).__name__}: {e}"


def _iii_residuals(args) -> dict:
    v, w, t = args
    p = ConifoldPoint(v, w)
    x, _ = xq(p, t)
    p1 = ConifoldPoint(v + w, w)

    def rb():
        return _rel(solve_B(p1, t) / solve_B(p, t), 1 / (1 - x))

    def rd():
        return _rel(solve_D(p1, t) / solve_D(p, t), 1 / solve_B(p1, t))

    b, eb = _safe(rb)
    d, ed = _safe(rd)
    out = {"inputs": {"v": v, "w": w, "t": t}, "residual": max(b, d), "B": b, "D": d}
    if eb or ed:
        out["error"] = eb or ed
    return out


def _iv_residuals(args) -> dict:
    v, w, t, boundary = args
    p = ConifoldPoint(v, w)
    x, q = xq(p, t)

    def rb():
        lhs = solve_B(p, t, check_region=not boundary) * solve_B(p, -t, check_region=not boundary)
        return _rel(lhs, theta_product(x, q))

    def rd():
        lhs = solve_D(p, t, check_region=not boundary) * solve_D(p, -t, check_region=not boundary)
        return _rel(lhs, weighted_theta_product(x, q) * macmahon_factor(q))

    b, eb = _safe(rb)
    d, ed = _safe(rd)
    out = {"inputs": {"v": v, "w": w, "t": t}, "residual": max(b, d), "B": b, "D": d}
    if eb or ed:
        out["error"] = eb or ed
    return out


def _sector_residuals(args) -> dict:
    v, w, t, n = args
    p = ConifoldPoint(v, w)
    x, q = xq(p, t)
    f = 1 - x * q ** n

    def rb():
        return _rel(solve_Bn(p, t, n + 1) / solve_Bn(p, t, n), 1 / f)

    def rd():
        return _rel(solve_Dn(p, t, n + 1) / solve_Dn(p, t, n), f ** (-n))

    b, eb = _safe(rb)
    d, ed = _safe(rd)
    out = {"inputs": {"v": v, "w": w, "t": t, "n": n}, "residual": max(b, d), "B": b, "D": d}
    if eb or ed:
        out["error"] = eb or ed
    return out


def check_jump_suite(p: ConifoldPoint, samples: int = 64, tol: float = 1e-7,
                     seed: int = 12345, sectors: Sequence[int] = (-1, 0, 1),
                     jobs: int = 1) -> VerificationReport:
    """Jump relations across H(0), the reflection relations on -i Sigma(0), and the
    consecutive-sector relations across H(n).  On M_ZERO the reflection relations
    are checked on the half-plane centred on l = R_{>0} 2 pi i w."""
    rng = random.Random(seed)
    v, w = p.v, p.w
    parts = []
    if p.region is Region.M_ZERO:
        r = (v / w).real
        if not 0 < r < 1:
            raise DomainError("the M_ZERO variant needs 0 < v/w < 1")
        c = cmath.phase(TWO_PI_I * w)
        half = math.pi / 2 - EDGE_MARGIN
        ts = [abs(w) * math.exp(rng.uniform(math.log(0.15), math.log(2.0)))
              * cmath.exp(1j * (c + rng.uniform(-half, half))) for _ in range(samples)]
        det = _pmap(_iv_residuals, [(v, w, t, True) for t in ts], jobs)
        parts.append(VerificationReport.from_residuals("m0_reflection", tol, det))
        return merge_reports("jump", parts)
    if p.region is Region.M_MINUS:
        raise DomainError("check the M_PLUS point (-v, w); M_MINUS follows by the involution")
    ts = sample_half_plane(p, 0, samples, rng)
    det = _pmap(_iii_residuals, [(v, w, t) for t in ts], jobs)
    parts.append(VerificationReport.from_residuals("jump_H0", tol, det))
    ts = sample_sector(p, samples, rng, rotate=-1j)
    det = _pmap(_iv_residuals, [(v, w, t, False) for t in ts], jobs)
    parts.append(VerificationReport.from_residuals("reflection_minus_i_sigma0", tol, det))
    for n in sectors:
        ts = sample_half_plane(p, n, samples, rng)
        det = _pmap(_sector_residuals, [(v, w, t, n) for t in ts], jobs)
        parts.append(VerificationReport.from_residuals(f"sector_H{n}", tol, det))
    return merge_reports("jump", parts)


def check_minus_reflection(p: ConifoldPoint, samples: int = 16, tol: float = 1e-9,
                           seed: int = 7) -> VerificationReport:
    """solve_B at (-v, w) equals 1/solve_B at (v, w); D is unchanged."""
    if p.region is not Region.M_PLUS:
        raise DomainError("start from an M_PLUS point")
    rng = random.Random(seed)
    q = ConifoldPoint(-p.v, p.w)
    det = []
    for t in sample_sector(p, samples, rng):
        rb = abs(solve_B(q, t) * solve_B(p, t) - 1)
        rd = abs(solve_D(q, t) / solve_D(p, t) - 1)
        det.append({"inputs": {"t": t}, "residual": max(rb, rd)})
    return VerificationReport.from_residuals("minus_reflection", tol, det)


def check_regularity(p: ConifoldPoint, samples: int = 200, seed: int = 99,
                     jobs: int = 1) -> VerificationReport:
    """B and D are finite and nonzero at random points of V(0)."""
    rng = random.Random(seed)
    ts = sample_half_plane(p, -1, samples // 2, rng) + sample_half_plane(p, 0, samples - samples // 2, rng)
    det = _pmap(_regularity_one, [(p.v, p.w, t) for t in ts], jobs)
    return VerificationReport.from_residuals("regularity", 0.0, det)


def _regularity_one(args) -> dict:
    v, w, t = args
    p = ConifoldPoint(v, w)
    try:
        b, d = solve_B(p, t), solve_D(p, t)
        ok = all(cmath.isfinite(z) and z != 0 for z in (b, d))
    except ConifoldError:
        ok = False
    return {"inputs": {"t": t}, "residual": 0.0 if ok else 1.0}


# ---------------------------------------------------------------- limits

def limit0_t0(p: ConifoldPoint, direction: float, target: float = 1e-8, terms: int = 13) -> float:
    """|t0| such that the linear term predicts |log B|, |log D| < target at t0 2^{-(terms-1)}."""
    probe = 1e-3 * abs(p.w)
    t = probe * cmath.exp(1j * direction)
    c = max(abs(cmath.log(solve_B(p, t))), abs(cmath.log(solve_D(p, t)))) / probe
    return target / max(c, 1e-300) * 2 ** (terms - 1)


def check_limit0(p: ConifoldPoint, direction: float | None = None, t0: float | None = None,
                 terms: int = 13, tol: float = 1e-6) -> VerificationReport:
    """|B - 1| and |D - 1| along t_j = t0 2^{-j} e^{i direction}: monotone, final value < tol."""
    if direction is None:
        direction = sigma0_bisector(p)
    if t0 is None:
        t0 = limit0_t0(p, direction, terms=terms)
    det = []
    prev = (math.inf, math.inf)
    mono = True
    for j in range(terms):
        t = t0 * 2.0 ** (-j) * cmath.exp(1j * direction)
        b, d = abs(solve_B(p, t) - 1), abs(solve_D(p, t) - 1)
        mono = mono and b < prev[0] and d < prev[1]
        prev = (b, d)
        det.append({"inputs": {"t": t}, "residual": max(b, d), "B": b, "D": d})
    final = det[-1]["residual"]
    rep = VerificationReport("limit0", tol, terms, final, bool(mono and final < tol), det,
                             {"monotone": mono, "t0": t0, "direction": direction})
    return rep


def check_growth(p: ConifoldPoint, direction: float | None = None, rmin: float = 10.0,
                 rmax: float = 1e4, terms: int = 13, rel_tol: float = 0.10) -> VerificationReport:
    """Fit log|B| ~ k log|t| along a ray and compare |k| with |Re(v/w - 1/2)|.

    The report also checks that |B| and |D| stay inside |t|^{+-K} with K the
    larger fitted exponent plus 0.25.
    """
    if direction is None:
        direction = sigma0_bisector(p)
    rs = np.geomspace(rmin * abs(p.w), rmax * abs(p.w), terms)
    lb, ld = [], []
    det = []
    for r in rs:
        t = complex(r * cmath.exp(1j * direction))
        b, d = solve_B(p, t), solve_D(p, t)
        lb.append(math.log(abs(b)))
        ld.append(math.log(abs(d)))
        det.append({"inputs": {"t": t}, "B": b, "D": d})
    lr = np.log(rs)
    kb = float(np.polyfit(lr, lb, 1)[0])
    kd = float(np.polyfit(lr, ld, 1)[0])
    heuristic = abs((_plus_v(p) / p.w).real - 0.5)
    K = max(abs(kb), abs(kd)) + 0.25
    band = all(abs(x) < K * y for x, y in zip(lb + ld, list(lr) * 2))
    resid = abs(abs(kb) - heuristic) / heuristic if heuristic > 0 else abs(kb)
    for dd in det:
        dd["residual"] = resid
    ok = math.isfinite(kb) and math.isfinite(kd) and band and resid <= rel_tol
    return VerificationReport("growth", rel_tol, terms, resid, bool(ok), det,
                              {"k_B": kb, "k_D": kd, "heuristic": heuristic, "band_ok": band})


# ---------------------------------------------------------------- tau ODE

def _dlog(fn: Callable[[complex], complex], x: complex, h: complex) -> complex:
    """d/dx log fn at x: central differences of log ratios, one Richardson step."""
    def d(hh):
        return cmath.log(fn(x + hh) / fn(x - hh)) / (2 * hh)
    return (4 * d(h / 2) - d(h)) / 3


def tau_ode_residuals(v: complex, w: complex, t: complex, n: int, h: float = 1e-5) -> dict:
    """Residuals of
        d/dv log H-dagger(v+nw | t, w) = d/dt log F*(v+nw | w, t),
        d/dw log H-dagger(v+nw | t, w) = d/dt (log H*(v+nw | w, t) + n log F*(v+nw | w, t)).
    """
    v, w, t = complex(v), complex(w), complex(t)
    hv = h * max(abs(w), abs(t))
    hd = lambda vv, ww, tt: eval_H_dagger(vv + n * ww, tt, ww).value
    fs = lambda vv, ww, tt: eval_F_star(SineArgs(vv + n * ww, ww, tt)).value
    hs = lambda vv, ww, tt: eval_H_star(SineArgs(vv + n * ww, ww, tt)).value
    lhs1 = _dlog(lambda x: hd(x, w, t), v, hv)
    rhs1 = _dlog(lambda x: fs(v, w, x), t, hv)
    lhs2 = _dlog(lambda x: hd(v, x, t), w, hv)
    rhs2 = _dlog(lambda x: hs(v, w, x) * fs(v, w, x) ** n, t, hv)
    r1 = abs(lhs1 - rhs1) / max(1.0, abs(lhs1))
    r2 = abs(lhs2 - rhs2) / max(1.0, abs(lhs2))
    return {"dv": r1, "dw": r2, "lhs_dv": lhs1, "rhs_dv": rhs1, "lhs_dw": lhs2, "rhs_dw": rhs2}


def _tau_one(args) -> dict:
    v, w, t, n, h = args
    try:
        r = tau_ode_residuals(v, w, t, n, h)
        res = max(r["dv"], r["dw"])
    except ConifoldError as e:
        r, res = {"error": f"{type(e).__name__}: {e}"}, math.inf
    return {"inputs": {"v": v, "w": w, "t": t, "n": n}, "residual": res, **r}


def check_tau_ode(p: ConifoldPoint, points: Sequence[tuple[complex, int]] | None = None,
                  samples: int = 20, h: float = 1e-5, tol: float = 1e-6, seed: int = 2024,
                  jobs: int = 1) -> VerificationReport:
    """Finite-difference check of the two tau relations.

    Default sample points are t = r e^{i(theta0 + phi)} around the Sigma(0)
    bisector theta0, r in [0.2, 1] |w|, |phi| <= 20 degrees, n cycling
    through -1, 0, 1.
    """
    if points is None:
        rng = random.Random(seed)
        th = sigma0_bisector(p)
        points = []
        for i in range(samples):
            r = abs(p.w) * rng.uniform(0.2, 1.0)
            phi = math.radians(rng.uniform(-20, 20))
            points.append((r * cmath.exp(1j * (th + phi)), (-1, 0, 1)[i % 3]))
    det = _pmap(_tau_one, [(p.v, p.w, t, n, h) for t, n in points], jobs)
    return VerificationReport.from_residuals("tau_ode", tol, det)


def check_tau_homogeneity(v: complex, w: complex, t: complex, ns: Sequence[int] = (-1, 0, 1),
                          lams: Sequence[complex] = (2, 1.3 * cmath.exp(0.2j)),
                          tol: float = 1e-9) -> VerificationReport:
    det = []
    for n in ns:
        base = eval_tau(v, w, t, n=n, method="dagger").value
        for lam in lams:
            other = eval_tau(lam * v, lam * w, lam * t, n=n, method="dagger").value
            det.append({"inputs": {"n": n, "lambda": complex(lam)}, "residual": _rel(other, base)})
    return VerificationReport.from_residuals("tau_homogeneity", tol, det)


# ---------------------------------------------------------------- wall-crossing

WALLCROSS_CHARGES = ((0, 0, 1, 0), (0, 0, 0, 1), (0, 0, 1, 1), (0, 0, 1, 2),
                     (1, 0, 0, 0), (0, 1, 0, 0), (1, 2, 0, 0), (1, 1, 1, 0))


def check_wallcross(p: ConifoldPoint, truncation: int = 4,
                    charges: Sequence[tuple[int, int, int, int]] = WALLCROSS_CHARGES) -> VerificationReport:
    """Sector composition against the closed product, and pairwise commutativity.

    Residuals count mismatching monomials, so the tolerance is zero: the
    comparison is exact rational equality.
    """
    if p.region is not Region.M_PLUS:
        raise DomainError("the wall-crossing suite is set up for M_PLUS points")
    det = []
    apply = sector_automorphism(p, truncation)
    for c in charges:
        g = Charge(*c)
        lhs = apply(TwistedSeries.monomial(g, truncation))
        rhs = sector_closed_form(g, truncation)
        det.append({"inputs": {"charge": list(c), "check": "sector_product"},
                    "residual": float(len((lhs - rhs).terms))})
    rays = sector_rays(p, truncation)
    for i, r1 in enumerate(rays):
        for r2 in rays[i + 1:]:
            bad = 0
            for c in charges[:4]:
                s = TwistedSeries.monomial(Charge(*c), truncation)
                bad += len(commutator_defect(p, r1, r2, s).terms)
            det.append({"inputs": {"rays": [str(r1), str(r2)], "check": "commute"},
                        "residual": float(bad)})
    for m in (-1, 1, 2):
        ok = check_z_action(p, m, 6.0)
        det.append({"inputs": {"m": m, "check": "z_action"}, "residual": 0.0 if ok else 1.0})
    return VerificationReport.from_residuals("wallcross", 0.0, det, info={"truncation": truncation})
