"""The functions F, G, H, their decorated versions F*, H*, H-dagger, K and tau.

Notation: x1 = e^{2 pi i z/w1}, x2 = e^{2 pi i z/w2}, q1 = e^{2 pi i w2/w1},
q2 = e^{2 pi i w1/w2}.

Every evaluator returns an :class:`EvalResult` carrying the value, a
logarithm of it, an error estimate and the route used.  Integral routes pick
a rotation of the contour (all functions here are invariant under common
rescaling of their arguments) and, when no rotation suffices, shift z by the
difference relations, multiplying in the closed-form correction factors.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .contour import ContourSpec, IntegrandKind, Kernel, integrate
from .errors import DomainError, NoConvergence, NoRepresentation, PoleHit
from .numlib import ZETA2, ZETA3, polylog

TWO_PI_I = 2j * math.pi
MIN_MARGIN = 0.04
MIN_DECAY = 1e-3  # smallest usable Re(e^{i theta} z)/max|w|
MAX_SHIFT = 64
DEFAULT_TOL = 1e-13


class Method(str, Enum):
    INTEGRAL = "INTEGRAL"
    PRODUCT = "PRODUCT"
    SHIFTED_INTEGRAL = "SHIFTED_INTEGRAL"


@dataclass(frozen=True)
class SineArgs:
    z: complex
    w1: complex
    w2: complex

    def __post_init__(self):
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "w1", complex(self.w1))
        object.__setattr__(self, "w2", complex(self.w2))

    def scaled(self, lam: complex) -> "SineArgs":
        return SineArgs(lam * self.z, lam * self.w1, lam * self.w2)

    @property
    def x1(self) -> complex:
        return cmath.exp(TWO_PI_I * self.z / self.w1)

    @property
    def x2(self) -> complex:
        return cmath.exp(TWO_PI_I * self.z / self.w2)

    @property
    def q1(self) -> complex:
        return cmath.exp(TWO_PI_I * self.w2 / self.w1)

    @property
    def q2(self) -> complex:
        return cmath.exp(TWO_PI_I * self.w1 / self.w2)


@dataclass(frozen=True)
class EvalResult:
    value: complex
    error_estimate: float
    method: Method
    log_value: complex = field(default=complex("nan"))
    log_error: float = math.nan  # absolute error of log_value

    def to_dict(self) -> dict:
        return {"value": self.value, "error_estimate": self.error_estimate,
                "method": self.method.value}


def _from_log(lv: complex, log_err: float, method: Method) -> EvalResult:
    """Build a result from its logarithm; the value may under- or overflow to 0/inf."""
    if lv.real == -math.inf:
        return EvalResult(0j, 0.0, method, lv, 0.0)
    try:
        val = cmath.exp(lv)
    except OverflowError:
        val = complex(math.inf, 0)
    return EvalResult(val, abs(val) * log_err, method, lv, log_err)


# ---------------------------------------------------------------- validation

def check_periods(w1: complex, w2: complex) -> None:
    if w1 == 0 or w2 == 0:
        raise DomainError("periods must be nonzero")
    ratio = w2 / w1
    if ratio.real < 0 and abs(ratio.imag) <= 1e-14 * abs(ratio):
        raise DomainError("w2/w1 lies on the cut line (negative reals)")


def lattice_coords(z: complex, w1: complex, w2: complex) -> tuple[float, float] | None:
    """Real (a, b) with z = a w1 + b w2, or None if w1, w2 are R-dependent."""
    det = (w1.conjugate() * w2).imag
    if abs(det) <= 1e-14 * abs(w1) * abs(w2):
        return None
    a = (z.conjugate() * w2).imag / ((w1.conjugate() * w2).imag)
    b = (w1.conjugate() * z).imag / det
    return a, b


def _lattice_point(z, w1, w2, ulps=8):
    """(a, b) when z equals a w1 + b w2 up to the rounding of that sum, else None."""
    ab = lattice_coords(z, w1, w2)
    if ab is None:
        return None
    a, b = ab
    ia, ib = round(a), round(b)
    scale = abs(ia * w1) + abs(ib * w2) + abs(z)
    if abs(z - (ia * w1 + ib * w2)) <= ulps * 2.220446049250313e-16 * scale:
        return ia, ib
    return None


# ---------------------------------------------------------------- rotation

_ANGLES = np.linspace(-math.pi, math.pi, 1441)[:-1]
_ROT = np.exp(1j * _ANGLES)


def best_rotation(points) -> tuple[float, float]:
    """Angle maximizing min_j Re(e^{i theta} p_j)/|p_j|; returns (margin, theta)."""
    p = np.asarray([complex(x) for x in points])
    if np.any(p == 0):
        return -1.0, 0.0
    u = p / np.abs(p)
    m = np.min((_ROT[:, None] * u[None, :]).real, axis=1)
    i = int(np.argmax(m))
    return float(m[i]), float(_ANGLES[i])


def _strip_points(tag: Kernel, a: SineArgs) -> list[complex]:
    z, w1, w2 = a.z, a.w1, a.w2
    if tag is Kernel.F_KERNEL:
        return [w1, w2, z, w1 + w2 - z]
    return [w1, w2, z + w1, w1 + w2 - z]


def _integral_log(tag: Kernel, a: SineArgs, theta: float, tol: float):
    s = 1.0 / max(abs(a.w1), abs(a.w2))
    kind = IntegrandKind(tag, (a.z * s, a.w1 * s, a.w2 * s))
    q = integrate(kind, ContourSpec(rotation_angle=theta, tolerance=tol))
    return q.value, q.error


# ---------------------------------------------------------------- F

def one_minus_exp(y: complex, w: complex) -> complex:
    """1 - e^{2 pi i y/w}, accurate when y is close to a multiple of w."""
    t = y / w
    d = t - round(t.real)
    a, b = -2 * math.pi * d.imag, 2 * math.pi * d.real
    re = math.expm1(a) * math.cos(b) - 2 * math.sin(b / 2) ** 2
    return -complex(re, math.exp(a) * math.sin(b))


def _exact_sum(z: complex, c1: int, w1: complex, c2: int, w2: complex) -> complex:
    """z + c1 w1 + c2 w2 with a single rounding."""
    fr = lambda u, v, x: Fraction(u) + c1 * Fraction(v) + c2 * Fraction(x)
    return complex(float(fr(z.real, w1.real, w2.real)), float(fr(z.imag, w1.imag, w2.imag)))


def _reduced(z: complex, c: int, w_other: complex, w: complex) -> complex:
    """z + c w_other minus the nearest multiple of w (by real part), rounded once."""
    k = round(((z + c * w_other) / w).real)
    return _exact_sum(z, c, w_other, -k, w)


def lattice_factor(z: complex, c: int, w_other: complex, w: complex) -> complex:
    """1 - e^{2 pi i (z + c w_other)/w}, reduced exactly modulo w before exponentiating."""
    return one_minus_exp(_reduced(z, c, w_other, w), w)


def _shift_factor_F(z: complex, m1: int, m2: int, w1: complex, w2: complex) -> complex:
    """Factor c with F(z) = c F(z + m1 w1 + m2 w2), from the difference relations."""
    c = 1 + 0j
    j1 = j2 = 0
    f2 = lambda: lattice_factor(z, j1, w1, w2)
    f1 = lambda: lattice_factor(z, j2, w2, w1)
    for _ in range(m1):
        c *= f2()
        j1 += 1
    for _ in range(-m1):
        j1 -= 1
        c /= f2()
    for _ in range(m2):
        c *= f1()
        j2 += 1
    for _ in range(-m2):
        j2 -= 1
        c /= f1()
    return c


def _candidate_shifts(tag: Kernel, a: SineArgs, two_dim: bool):
    """Shifts (m1, m2) to try, nearest to the centre of the strip first."""
    centre = (a.w1 + a.w2) / 2 if tag is Kernel.F_KERNEL else a.w2 / 2
    ab = lattice_coords(a.z - centre, a.w1, a.w2)
    if ab is None:
        k = (a.z - centre) / a.w1
        base = (-round(k.real), 0)
    else:
        base = (-round(ab[0]), -round(ab[1]) if two_dim else 0)
    cands = {(0, 0)}
    r2 = (-1, 0, 1) if two_dim else (0,)
    for d1 in (-1, 0, 1):
        for d2 in r2:
            cands.add((base[0] + d1, base[1] + d2))
    cands = [c for c in cands if max(abs(c[0]), abs(c[1])) <= MAX_SHIFT]
    return sorted(cands, key=lambda c: (abs(c[0]) + abs(c[1]), c))


def _margin(tag: Kernel, a: SineArgs) -> tuple[float, float]:
    """Rotation margin, lowered to the absolute decay rate when that is tiny.

    A z-point close to 0 can have a good direction yet make the integrand
    decay so slowly that the tails are unusable; such points count as
    outside the strip so the router shifts them.
    """
    pts = _strip_points(tag, a)
    m, th = best_rotation(pts)
    if m <= 0:
        return m, th
    rot = cmath.exp(1j * th)
    scale = max(abs(a.w1), abs(a.w2))
    decay = min((rot * p).real for p in pts[2:]) / scale
    if decay < MIN_DECAY:
        m = min(m, decay)
    return m, th


def _clean_path(tag: Kernel, a: SineArgs, m: tuple[int, int]) -> bool:
    """False if the correction factors of shift m pass through an exact zero or pole."""
    z, w1, w2 = a.z, a.w1, a.w2
    j1 = j2 = 0

    def step1_bad():
        if tag is Kernel.F_KERNEL:
            return _reduced(z, j1, w1, w2) == 0
        return _f_singular(_exact_sum(z, j1 + 1, w1, j2, w2), w1, w2)

    for _ in range(max(m[0], 0)):
        if step1_bad():
            return False
        j1 += 1
    for _ in range(max(-m[0], 0)):
        j1 -= 1
        if step1_bad():
            return False
    for _ in range(max(m[1], 0)):
        if _reduced(z, j2, w2, w1) == 0:
            return False
        j2 += 1
    for _ in range(max(-m[1], 0)):
        j2 -= 1
        if _reduced(z, j2, w2, w1) == 0:
            return False
    return True


def _f_singular(z: complex, w1: complex, w2: complex) -> bool:
    lp = _lattice_point(z, w1, w2)
    return lp is not None and ((lp[0] <= 0 and lp[1] <= 0) or (lp[0] > 0 and lp[1] > 0))


def _route(tag: Kernel, a: SineArgs, allow_shift: bool, two_dim: bool):
    m0, th0 = _margin(tag, a)
    if m0 >= MIN_MARGIN or not allow_shift:
        if m0 <= 0:
            raise NoRepresentation("no rotation brings the arguments into the strip")
        return (0, 0), th0, m0
    best = ((0, 0), th0, m0)
    for m in _candidate_shifts(tag, a, two_dim):
        if m != (0, 0) and not _clean_path(tag, a, m):
            continue
        zz = a.z + m[0] * a.w1 + m[1] * a.w2
        mm, th = _margin(tag, SineArgs(zz, a.w1, a.w2))
        if mm > best[2] + 1e-9:
            best = (m, th, mm)
    if best[2] <= 0:
        raise NoRepresentation("no rotation or shift reaches the integral strip")
    return best


def product_log_F(a: SineArgs, tail_tol: float = 1e-13) -> tuple[complex, float]:
    """log F from the product expansion, valid for Im(w1/w2) > 0.

    F = prod_{k>=1} (1 - x1 q1^{-k})^{-1} * prod_{k>=0} (1 - x2 q2^k)
    """
    if (a.w1 / a.w2).imag <= 0:
        raise NoRepresentation("product form needs Im(w1/w2) > 0")
    qa = cmath.exp(-TWO_PI_I * a.w2 / a.w1)  # q1^{-1}
    qb = a.q2
    total = 0j
    tail = 0.0
    # factor k is 1 - exp(2 pi i (z +- k w_other)/w)
    parts = ((a.x1, qa, 1, -1, -1, a.w2, a.w1), (a.x2, qb, 0, 1, 1, a.w1, a.w2))
    for x, q, start, sign, sgn_step, other, w in parts:
        ax, aq = abs(x), abs(q)
        if aq >= 1:
            raise NoRepresentation("product does not converge")
        # smallest K with 2 |x| |q|^K / (1 - |q|) below tail_tol * 1e-3 and |x q^K| < 1e-16
        need = min(tail_tol * 1e-3 * (1 - aq) / (2 * max(ax, 1e-300)), 1e-16 / max(ax, 1e-300))
        K = start + max(0, int(math.ceil(math.log(need) / math.log(aq)))) if need < 1 else start + 1
        if K - start > 2_000_000:
            raise NoConvergence("product needs too many factors")
        k = np.arange(start, K + 1)
        u = x * q ** k
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.log1p(-u)  # entries near log(0) are recomputed below
        for i in np.flatnonzero(np.abs(1 - u) < 0.5):
            f = lattice_factor(a.z, int(k[i]) * sgn_step, other, w)
            terms[i] = cmath.log(f) if f != 0 else complex("nan")
        if not np.all(np.isfinite(terms)):
            raise PoleHit("product factor vanishes")
        total += sign * complex(math.fsum(terms.real) + 1j * math.fsum(terms.imag))
        tail += 2 * ax * aq ** (K + 1) / (1 - aq)
    return total, tail


def eval_F(args: SineArgs, method: str = "auto", tol: float = DEFAULT_TOL) -> EvalResult:
    """F(z | w1, w2) by the contour integral, the product, or automatic routing."""
    a = args if isinstance(args, SineArgs) else SineArgs(*args)
    check_periods(a.w1, a.w2)
    lp = _lattice_point(a.z, a.w1, a.w2)
    if lp is not None:
        if lp[0] <= 0 and lp[1] <= 0:
            return EvalResult(0j, 0.0, Method.INTEGRAL, complex("-inf"), 0.0)
        if lp[0] > 0 and lp[1] > 0:
            raise PoleHit(f"z is a pole of F (lattice point {lp})")
    if method == "product":
        if lp is not None:
            # a vanishing numerator factor cancels a vanishing denominator factor
            raise NoRepresentation(f"product form is 0/0 at the lattice point {lp}")
        if (a.w1 / a.w2).imag > 0:
            lv, err = product_log_F(a)
        else:
            lv, err = product_log_F(SineArgs(a.z, a.w2, a.w1))
        return _from_log(lv, err, Method.PRODUCT)
    if method not in ("auto", "integral"):
        raise ValueError(f"unknown method {method!r}")
    m, theta, _ = _route(Kernel.F_KERNEL, a, method == "auto", two_dim=True)
    zz = a.z + m[0] * a.w1 + m[1] * a.w2
    lv, err = _integral_log(Kernel.F_KERNEL, SineArgs(zz, a.w1, a.w2), theta, tol)
    if m == (0, 0):
        return _from_log(lv, err, Method.INTEGRAL)
    c = _shift_factor_F(a.z, m[0], m[1], a.w1, a.w2)
    if c == 0:
        return EvalResult(0j, 0.0, Method.SHIFTED_INTEGRAL, complex("-inf"), 0.0)
    if not cmath.isfinite(c):
        raise PoleHit("shift factor diverges")
    return _from_log(cmath.log(c) + lv, err, Method.SHIFTED_INTEGRAL)


# ---------------------------------------------------------------- G and H

def log_G_step2(y: complex, w1: complex) -> complex:
    """A logarithm of G(y + w2 | w1, w2)/G(y | w1, w2), which does not depend on w2.

    Equals Li_2(x1)/(2 pi i) + (y/w1) log(1 - x1); for |x1| > 1 the
    inversion formula with log(-x1) = 2 pi i (y/w1 - 1/2) continues it.
    """
    u = y / w1
    x = cmath.exp(TWO_PI_I * u)
    if abs(1 - x) < 1e-14:
        raise PoleHit("G step factor degenerates at a multiple of w1")
    if abs(x) <= 1:
        return polylog(2, x) / TWO_PI_I + u * cmath.log(1 - x)
    ix = 1 / x
    L = TWO_PI_I * (u - 0.5)
    return (-polylog(2, ix) - ZETA2 - 0.5 * L * L) / TWO_PI_I + u * (L + cmath.log(1 - ix))


def _shift_log_G(z: complex, m1: int, m2: int, w1: complex, w2: complex, tol: float):
    """(log c, error) with G(z) = c G(z + m1 w1 + m2 w2)."""
    lc, err = 0j, 0.0
    y = z
    for _ in range(m1):
        f = eval_F(SineArgs(y + w1, w1, w2), tol=tol)
        lc, err = lc + f.log_value, err + f.log_error
        y += w1
    for _ in range(-m1):
        f = eval_F(SineArgs(y, w1, w2), tol=tol)
        if f.value == 0:
            raise PoleHit("G shift hits a zero of F")
        lc, err = lc - f.log_value, err + f.log_error
        y -= w1
    for _ in range(m2):
        lc -= log_G_step2(y, w1)
        y += w2
    for _ in range(-m2):
        y -= w2
        lc += log_G_step2(y, w1)
    return lc, err


def g_vanishes(a: int, b: int) -> bool:
    """Zeros of G at z = a w1 + b w2: a < 0 and b <= 0, or a > 0 and b > 0.

    These are the zeros of the triple sine at z + w1; the lattice points with
    a > 0 and b = 0 are regular and nonzero (G(w1) = G(0)/F(w1)).
    """
    return (a < 0 and b <= 0) or (a > 0 and b > 0)


def eval_G(args: SineArgs, method: str = "auto", tol: float = DEFAULT_TOL) -> EvalResult:
    """G(z | w1, w2).  Out-of-strip z is shifted by w1 (G(y) = G(y + w1) F(y + w1))
    and by w2 (G(y + w2)/G(y) from :func:`log_G_step2`)."""
    a = args if isinstance(args, SineArgs) else SineArgs(*args)
    check_periods(a.w1, a.w2)
    if method not in ("auto", "integral"):
        raise ValueError(f"unknown method {method!r}")
    lp = _lattice_point(a.z, a.w1, a.w2)
    if lp is not None and g_vanishes(*lp):
        return EvalResult(0j, 0.0, Method.INTEGRAL, complex("-inf"), 0.0)
    m, theta, _ = _route(Kernel.G_KERNEL, a, method == "auto", two_dim=True)
    zz = a.z + m[0] * a.w1 + m[1] * a.w2
    lv, err = _integral_log(Kernel.G_KERNEL, SineArgs(zz, a.w1, a.w2), theta, tol)
    if m == (0, 0):
        return _from_log(lv, err, Method.INTEGRAL)
    lc, e2 = _shift_log_G(a.z, m[0], m[1], a.w1, a.w2, tol)
    return _from_log(lc + lv, err + e2, Method.SHIFTED_INTEGRAL)


def eval_H(args: SineArgs, method: str = "auto", tol: float = DEFAULT_TOL) -> EvalResult:
    """H(z | w1, w2) = G(z | w1, w2)/G(0 | w1, w2).

    ``method="kernel"`` uses the single combined integral
    log H(z | w1, w2) = -log K(z, w2, w1); the default divides two G values.
    """
    a = args if isinstance(args, SineArgs) else SineArgs(*args)
    if a.z == 0:
        return EvalResult(1 + 0j, 0.0, Method.INTEGRAL, 0j, 0.0)
    if method == "kernel":
        k = eval_K(a.z, a.w2, a.w1, tol=tol)
        return _from_log(-k.log_value, k.log_error, k.method)
    g = eval_G(a, tol=tol)
    g0 = eval_G(SineArgs(0, a.w1, a.w2), tol=tol)
    # G itself under- or overflows for small |w2|, so combine logarithms
    meth = Method.SHIFTED_INTEGRAL if Method.SHIFTED_INTEGRAL in (g.method, g0.method) else Method.INTEGRAL
    return _from_log(g.log_value - g0.log_value, g.log_error + g0.log_error, meth)


# ---------------------------------------------------------------- decorations

def _x1_checked(z: complex, w1: complex, allow_boundary: bool) -> complex:
    im = (z / w1).imag
    if im < 0 or (im == 0 and not allow_boundary):
        raise DomainError("need Im(z/w1) > 0")
    x1 = cmath.exp(TWO_PI_I * z / w1)
    if abs(x1 - 1) < 1e-14:
        raise DomainError("e^{2 pi i z/w1} = 1")
    return x1


def Q_F(z: complex, w1: complex, w2: complex, allow_boundary: bool = False) -> complex:
    x1 = _x1_checked(z, w1, allow_boundary)
    return (-(w1 / (TWO_PI_I * w2)) * polylog(2, x1) - 0.5 * cmath.log(1 - x1)
            + (math.pi * 1j / 12) * w2 / w1)


def Q_H(z: complex, w1: complex, w2: complex, allow_boundary: bool = False) -> complex:
    """The H-prefactor exponent, with the w1-derivative taken in closed form."""
    x1 = _x1_checked(z, w1, allow_boundary)
    li1 = -cmath.log(1 - x1)
    li2 = polylog(2, x1)
    li3 = polylog(3, x1)
    first = (2 * w1 / TWO_PI_I ** 2 * (ZETA3 - li3) + z * li2 / TWO_PI_I) / w2
    second = (li2 - ZETA2) / (2 * TWO_PI_I) - z * li1 / (2 * w1)
    return first + second - (math.pi * 1j / 12) * z * w2 / w1 ** 2


def R_dagger(z: complex, w2: complex, w1: complex) -> complex:
    """R(z | w2, w1) = (w1/(2 pi i w2))^2 (Li3(x1) - zeta(3)) + (i pi/12) z/w1."""
    x1 = _x1_checked(z, w1, False)
    return (w1 / (TWO_PI_I * w2)) ** 2 * (polylog(3, x1) - ZETA3) + (1j * math.pi / 12) * z / w1


def R_tau(v: complex, w: complex, t: complex) -> complex:
    """R(v, w, t) = (w/(2 pi i t))^2 (zeta(3) - Li3(e^{2 pi i v/w})) - (i pi/12) v/w."""
    x = _x1_checked(v, w, False)
    return (w / (TWO_PI_I * t)) ** 2 * (ZETA3 - polylog(3, x)) - (1j * math.pi / 12) * v / w


def _decorate(base: EvalResult, q: complex) -> EvalResult:
    return _from_log(base.log_value + q, base.log_error, base.method)


SUBTRACT_RATIO = 0.1


def _subtracted_log(tag: Kernel, a: SineArgs, tol: float):
    """Integral of the kernel with the Laurent part of 1/(e^{w2 s}-1) removed, or None."""
    if tag is Kernel.F_SUB_KERNEL:
        pts = [a.w1, a.w2, a.z, a.w1 - a.z]
    else:
        pts = [a.w1, a.w2, a.z + a.w1, a.w1 - a.z]
    margin, theta = best_rotation(pts)
    if margin < MIN_MARGIN:
        return None
    s = 1.0 / abs(a.w1)
    q = integrate(IntegrandKind(tag, (a.z * s, a.w1 * s, a.w2 * s)),
                  ContourSpec(rotation_angle=theta, tolerance=tol))
    return q.value, q.error


def _use_subtracted(method: str, a: SineArgs) -> bool:
    if method == "subtracted":
        return True
    return method == "auto" and abs(a.w2) <= SUBTRACT_RATIO * abs(a.w1)


def eval_F_star(args: SineArgs, method: str = "auto", tol: float = DEFAULT_TOL,
                allow_boundary: bool = False) -> EvalResult:
    """F* = F e^{Q_F}.  ``allow_boundary`` admits Im(z/w1) = 0 (x1 on the unit circle).

    For |w2| small against |w1| the pole terms of log F cancel against Q_F;
    the ``"subtracted"`` route (chosen automatically there) integrates the
    remainder directly, log F* = int_C e^{zs} rho(w2 s)/((e^{w1 s}-1) s) ds
    + i pi w2/(12 w1) with rho(u) = 1/(e^u-1) - 1/u + 1/2.
    """
    a = args if isinstance(args, SineArgs) else SineArgs(*args)
    q = Q_F(a.z, a.w1, a.w2, allow_boundary)
    if _use_subtracted(method, a):
        r = _subtracted_log(Kernel.F_SUB_KERNEL, a, tol)
        if r is not None:
            return _from_log(r[0] + (math.pi * 1j / 12) * a.w2 / a.w1, r[1], Method.INTEGRAL)
        if method == "subtracted":
            raise NoRepresentation("subtracted kernel strip not reachable by rotation")
        method = "auto"
    return _decorate(eval_F(a, method=method, tol=tol), q)


def eval_H_star(args: SineArgs, method: str = "auto", tol: float = DEFAULT_TOL,
                allow_boundary: bool = False) -> EvalResult:
    """H* = H e^{Q_H}; the ``"subtracted"`` route mirrors :func:`eval_F_star`,
    log H* = -int_C (e^{zs}-1) e^{w1 s} rho(w2 s)/((e^{w1 s}-1)^2 s) ds - i pi z w2/(12 w1^2).
    """
    a = args if isinstance(args, SineArgs) else SineArgs(*args)
    q = Q_H(a.z, a.w1, a.w2, allow_boundary)
    if a.z != 0 and _use_subtracted(method, a):
        r = _subtracted_log(Kernel.H_SUB_KERNEL, a, tol)
        if r is not None:
            extra = -(math.pi * 1j / 12) * a.z * a.w2 / a.w1 ** 2
            return _from_log(r[0] + extra, r[1], Method.INTEGRAL)
        if method == "subtracted":
            raise NoRepresentation("subtracted kernel strip not reachable by rotation")
        method = "auto"
    return _decorate(eval_H(a, method=method, tol=tol), q)


def eval_H_dagger(z: complex, w2: complex, w1: complex, method: str = "auto",
                  tol: float = DEFAULT_TOL) -> EvalResult:
    """H-dagger(z | w2, w1) = H(z | w2, w1) e^{R(z | w2, w1)}; note the argument order."""
    z, w1, w2 = complex(z), complex(w1), complex(w2)
    r = R_dagger(z, w2, w1)
    return _decorate(eval_H(SineArgs(z, w2, w1), method=method, tol=tol), r)


# ---------------------------------------------------------------- K and tau

def eval_K(v: complex, w: complex, t: complex, tol: float = DEFAULT_TOL) -> EvalResult:
    """K(v, w, t) = exp int_C (e^{vs}-1)/(e^{ws}-1) e^{ts}/(e^{ts}-1)^2 ds/s."""
    v, w, t = complex(v), complex(w), complex(t)
    if w == 0 or t == 0:
        raise DomainError("w and t must be nonzero")
    if v == 0:
        return EvalResult(1 + 0j, 0.0, Method.INTEGRAL, 0j, 0.0)
    margin, theta = best_rotation([w, t, v + t, w + t - v])
    if margin <= 0:
        raise NoRepresentation("no rotation puts (v, w, t) in the K strip")
    s = 1.0 / max(abs(w), abs(t))
    q = integrate(IntegrandKind(Kernel.K_KERNEL, (v * s, w * s, t * s)),
                  ContourSpec(rotation_angle=theta, tolerance=tol))
    return _from_log(q.value, q.error, Method.INTEGRAL)


def eval_tau(v: complex, w: complex, t: complex, n: int = 0, method: str = "kernel",
             tol: float = DEFAULT_TOL) -> EvalResult:
    """tau_n(v, w, t) with tau_n^{-1} = H-dagger(v + n w | t, w).

    ``method="kernel"`` evaluates e^{R(v', w, t)} K(v', w, t) with v' = v + n w;
    ``method="dagger"`` inverts H-dagger computed from two G integrals.
    """
    v, w, t = complex(v), complex(w), complex(t)
    vn = v + n * w
    if method == "kernel":
        k = eval_K(vn, w, t, tol=tol)
        r = R_tau(vn, w, t)
        return _decorate(k, r)
    if method == "dagger":
        h = eval_H_dagger(vn, t, w, tol=tol)
        return _from_log(-h.log_value, h.log_error, h.method)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------- q-products

def _log_prod(x: complex, q: complex, start: int, power: str, tail_tol: float) -> complex:
    """sum_{k>=start} e_k log(1 - x q^k), e_k = 1 or k."""
    aq, ax = abs(q), abs(x)
    if aq >= 1:
        raise DomainError("|q| must be < 1")
    K = start
    while True:
        kk = max(K, 1) if power == "k" else 1
        bound = 2 * ax * aq ** K * kk / (1 - aq) ** 2
        if bound < tail_tol * 1e-3 and ax * aq ** K < 1e-16:
            break
        K += max(1, K // 4)
        if K > 5_000_000:
            raise NoConvergence("q-product needs too many factors")
    k = np.arange(start, K + 1)
    terms = np.log1p(-x * q ** k)
    if power == "k":
        terms = terms * k
    return complex(math.fsum(terms.real) + 1j * math.fsum(terms.imag))


def theta_product(x: complex, q: complex, tail_tol: float = 1e-13) -> complex:
    """prod_{k>=0}(1 - x q^k) prod_{k>=1}(1 - x^{-1} q^k)^{-1}."""
    return cmath.exp(_log_prod(x, q, 0, "1", tail_tol) - _log_prod(1 / x, q, 1, "1", tail_tol))


def weighted_theta_product(x: complex, q: complex, tail_tol: float = 1e-13) -> complex:
    """prod_{k>=1}(1 - x q^k)^k (1 - x^{-1} q^k)^k."""
    return cmath.exp(_log_prod(x, q, 1, "k", tail_tol) + _log_prod(1 / x, q, 1, "k", tail_tol))


def macmahon_factor(q: complex, tail_tol: float = 1e-13) -> complex:
    """prod_{k>=1}(1 - q^k)^{-2k}."""
    return cmath.exp(-2 * _log_prod(1 + 0j, q, 1, "k", tail_tol))
