"""Adaptive quadrature along the contour C.

C runs along the real axis from -inf to +inf and passes the origin on a small
semicircle in the upper half-plane.  The integrals split into three pieces
(-R, -r), the arc of radius r, and (r, R).  Each piece is covered by
Gauss-Kronrod (7, 15) panels that are bisected until the summed error
estimate drops below the requested tolerance.  R comes from the exponential
decay rate of the integrand.

All five kernels are evaluated with their parameters rotated by e^{i theta};
for the kernels built on ds/s this is the same as rotating the contour.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, NoConvergence, PoleTooClose
from .numlib import polylog, regularized_zeta_factor

# Gauss-Kronrod 7/15 nodes on [-1, 1] (Kronrod nodes, odd ones are Gauss nodes)
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327])

NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[:-1][::-1]])
W_KRONROD = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[:-1][::-1]])
W_GAUSS = np.zeros(15)
W_GAUSS[1::2] = np.concatenate([_WG[:-1], [_WG[-1]], _WG[:-1][::-1]])

_ARC, _LEFT, _RIGHT = 0, 1, 2


class Kernel(str, Enum):
    F_KERNEL = "F_KERNEL"
    G_KERNEL = "G_KERNEL"
    K_KERNEL = "K_KERNEL"
    POLYLOG_KERNEL = "POLYLOG_KERNEL"
    ZETA_KERNEL = "ZETA_KERNEL"
    # log F* and log H* with the Laurent part of 1/(e^{w2 s}-1) removed
    F_SUB_KERNEL = "F_SUB_KERNEL"
    H_SUB_KERNEL = "H_SUB_KERNEL"


@dataclass(frozen=True)
class IntegrandKind:
    """Kernel tag plus parameters.

    Parameter layout per tag:
        F_KERNEL, G_KERNEL: (z, w1, w2)
        K_KERNEL: (v, w, t)
        POLYLOG_KERNEL: (d, z, w1)
        ZETA_KERNEL: (d, w1)
        F_SUB_KERNEL, H_SUB_KERNEL: (z, w1, w2)
    """

    tag: Kernel
    params: tuple


@dataclass(frozen=True)
class ContourSpec:
    detour_radius: float | None = None
    truncation_radius: float | None = None
    rotation_angle: float = 0.0
    tolerance: float = 1e-13
    max_subdivisions: int = 20000


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    l1_norm: float
    panels: int
    detour_radius: float
    truncation_radius: float


_RHO_SERIES = [1 / 12, -1 / 720, 1 / 30240, -1 / 1209600, 1 / 47900160]


def rho(u: np.ndarray) -> np.ndarray:
    """1/(e^u - 1) - 1/u + 1/2, accurate for small |u|."""
    u = np.asarray(u, dtype=complex)
    out = np.empty(u.shape, dtype=complex)
    small = np.abs(u) < 0.1
    us = u[small]
    u2 = us * us
    acc = np.zeros(us.shape, dtype=complex)
    for c in reversed(_RHO_SERIES):
        acc = acc * u2 + c
    out[small] = acc * us
    ub = u[~small]
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        pos = ub.real > 0
        inv = np.empty(ub.shape, dtype=complex)
        inv[pos] = -np.exp(-ub[pos]) / np.expm1(-ub[pos])
        inv[~pos] = 1 / np.expm1(ub[~pos])
    out[~small] = inv - 1 / ub + 0.5
    return out


def _split_eval(u: np.ndarray, pos_fn, neg_fn) -> np.ndarray:
    out = np.empty(u.shape, dtype=complex)
    pos = u.real >= 0
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        if pos.any():
            out[pos] = pos_fn(u[pos])
        if (~pos).any():
            out[~pos] = neg_fn(u[~pos])
    return out


class _Integrand:
    """Rotated kernel with decay data for the tail bound and pole scan."""

    def __init__(self, kind: IntegrandKind, lam: complex):
        tag = Kernel(kind.tag)
        p = kind.params
        self.tag = tag
        self.prefactor = 1.0 + 0j
        self.poly = 0  # polynomial growth exponent in |u|
        if tag in (Kernel.F_KERNEL, Kernel.G_KERNEL):
            z, a, b = (complex(x) * lam for x in p)
            self.periods = (a, b)
            self.c_plus = (a + b - z).real
            self.c_minus = z.real if tag is Kernel.F_KERNEL else (z + a).real
            self._need_positive = (a.real, b.real)
            if tag is Kernel.F_KERNEL:
                self.f = lambda u: _split_eval(
                    u,
                    lambda s: np.exp((z - a - b) * s) / (np.expm1(-a * s) * np.expm1(-b * s) * s),
                    lambda s: np.exp(z * s) / (np.expm1(a * s) * np.expm1(b * s) * s))
            else:
                self.f = lambda u: _split_eval(
                    u,
                    lambda s: np.exp((z - a - b) * s) / (np.expm1(-a * s) ** 2 * np.expm1(-b * s) * s),
                    lambda s: -np.exp((z + a) * s) / (np.expm1(a * s) ** 2 * np.expm1(b * s) * s))
        elif tag is Kernel.K_KERNEL:
            v, w, t = (complex(x) * lam for x in p)
            self.periods = (w, t)
            self.c_plus = (w + t).real - max(v.real, 0.0)
            self.c_minus = t.real + min(v.real, 0.0)
            self._need_positive = (w.real, t.real)

            def pos(s):
                vs = v * s
                num = np.where(vs.real < 30.0, np.expm1(vs) * np.exp(-(w + t) * s),
                               np.exp((v - w - t) * s) - np.exp(-(w + t) * s))
                return -num / (np.expm1(-w * s) * np.expm1(-t * s) ** 2 * s)

            def neg(s):
                vs = v * s
                num = np.where(vs.real > -30.0, np.expm1(vs) * np.exp(t * s),
                               np.exp((v + t) * s) - np.exp(t * s))
                return num / (np.expm1(w * s) * np.expm1(t * s) ** 2 * s)

            self.f = lambda u: _split_eval(u, pos, neg)
        elif tag in (Kernel.F_SUB_KERNEL, Kernel.H_SUB_KERNEL):
            z, a, b = (complex(x) * lam for x in p)
            self.periods = (a, b)
            self.c_plus = (a - z).real
            self.c_minus = z.real if tag is Kernel.F_SUB_KERNEL else (z + a).real
            self._need_positive = (a.real, b.real)
            if tag is Kernel.F_SUB_KERNEL:
                self.f = lambda u: _split_eval(
                    u,
                    lambda s: -np.exp((z - a) * s) * rho(b * s) / (np.expm1(-a * s) * s),
                    lambda s: np.exp(z * s) * rho(b * s) / (np.expm1(a * s) * s))
            else:
                def pos(s):
                    zs = z * s
                    num = np.where(zs.real < 30.0, np.expm1(zs) * np.exp(-a * s),
                                   np.exp((z - a) * s) - np.exp(-a * s))
                    return -num * rho(b * s) / (np.expm1(-a * s) ** 2 * s)

                def neg(s):
                    zs = z * s
                    num = np.where(zs.real > -30.0, np.expm1(zs) * np.exp(a * s),
                                   np.exp((z + a) * s) - np.exp(a * s))
                    return -num * rho(b * s) / (np.expm1(a * s) ** 2 * s)

                self.f = lambda u: _split_eval(u, pos, neg)
        elif tag is Kernel.POLYLOG_KERNEL:
            d = int(p[0])
            z, w1 = complex(p[1]) * lam, complex(p[2]) * lam
            self.periods = (w1,)
            self.c_plus = (w1 - z).real
            self.c_minus = z.real
            self._need_positive = (w1.real,)
            self.poly = max(-d, 0)
            self.prefactor = lam ** (1 - d)
            self.f = lambda u: _split_eval(
                u,
                lambda s: -np.exp((z - w1) * s) * s ** (-d) / np.expm1(-w1 * s),
                lambda s: np.exp(z * s) * s ** (-d) / np.expm1(w1 * s))
        elif tag is Kernel.ZETA_KERNEL:
            d = int(p[0])
            w1 = complex(p[1]) * lam
            self.periods = (w1,)
            self.c_plus = self.c_minus = w1.real
            self._need_positive = (w1.real,)
            self.poly = max(1 - d, 0)
            self.prefactor = lam ** (2 - d)
            self.f = lambda u: _split_eval(
                u,
                lambda s: -np.exp(-w1 * s) * s ** (1 - d) / np.expm1(-w1 * s) ** 2,
                lambda s: -np.exp(w1 * s) * s ** (1 - d) / np.expm1(w1 * s) ** 2)
        else:  # pragma: no cover
            raise ValueError(tag)
        if min(self._need_positive) <= 0 or self.c_plus <= 0 or self.c_minus <= 0:
            raise DomainError(
                f"{tag.value}: strip condition fails after rotation "
                f"(decay rates {self.c_plus:.3g}, {self.c_minus:.3g})")

    def default_radius(self) -> float:
        return min(0.5, 0.5 * min(2 * math.pi / abs(w) for w in self.periods))

    def tail_bound(self, R: float, side: int) -> float:
        c = self.c_plus if side == _RIGHT else self.c_minus
        sgn = 1.0 if side == _RIGHT else -1.0
        steps = np.arange(4) / (2 * c)
        u = sgn * (R + steps)
        vals = np.abs(self.f(u.astype(complex))) * np.exp(c * steps)
        growth = 1.0 + self.poly / (c * R)
        return float(np.max(vals)) / c * growth


def _min_pole_distance(periods, r: float, R: float) -> float:
    best = math.inf
    for w in periods:
        step = 2 * math.pi / abs(w)
        nmax = int(R / step) + 1
        n = np.arange(1, nmax + 1)
        base = 2j * math.pi / w
        poles = np.concatenate([n * base, -n * base])
        x, y = poles.real, poles.imag
        # distance to the two axis segments
        dx_right = np.where(x < r, r - x, np.where(x > R, x - R, 0.0))
        dx_left = np.where(x > -r, x + r, np.where(x < -R, -R - x, 0.0))
        d_seg = np.minimum(np.hypot(dx_right, y), np.hypot(dx_left, y))
        mod = np.abs(poles)
        d_arc = np.where(y >= 0, np.abs(mod - r),
                         np.minimum(np.abs(poles - r), np.abs(poles + r)))
        best = min(best, float(np.min(np.minimum(d_seg, d_arc))))
    return best


def _panel_nodes(a: np.ndarray, b: np.ndarray, piece: np.ndarray, r: float):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    t = mid[:, None] + half[:, None] * NODES[None, :]
    u = np.empty(t.shape, dtype=complex)
    jac = np.empty(t.shape, dtype=complex)
    arc = piece == _ARC
    # arc is traversed from angle pi down to 0, so the parameter phi = pi - t
    phi = math.pi - t[arc]
    u[arc] = r * np.exp(1j * phi)
    jac[arc] = -1j * r * np.exp(1j * phi) * half[arc, None]
    ax = ~arc
    u[ax] = t[ax]
    jac[ax] = half[ax, None]
    return u, jac


def _evaluate(integrand: _Integrand, a, b, piece, r):
    u, jac = _panel_nodes(a, b, piece, r)
    fv = integrand.f(u.ravel()).reshape(u.shape) * jac
    kron = fv @ W_KRONROD
    gauss = fv @ W_GAUSS
    l1 = np.abs(fv) @ W_KRONROD
    err = np.abs(kron - gauss)
    bad = ~np.isfinite(kron)
    if bad.any():
        err[bad] = np.inf
        kron[bad] = 0
        l1[bad] = 0
    return kron, err, l1


def _initial_panels(r: float, R: float, ratio: float = 1.5):
    edges = [r]
    while edges[-1] * ratio < R:
        edges.append(edges[-1] * ratio)
    edges.append(R)
    e = np.array(edges)
    arc_edges = np.linspace(0.0, math.pi, 5)
    a = [arc_edges[:-1], e[:-1], -e[1:]]
    b = [arc_edges[1:], e[1:], -e[:-1]]
    pieces = [np.full(4, _ARC), np.full(len(e) - 1, _RIGHT), np.full(len(e) - 1, _LEFT)]
    a_all = np.concatenate(a)
    b_all = np.concatenate(b)
    # left pieces are stored with a < b on the axis
    return a_all, b_all, np.concatenate(pieces)


MAX_R_PERIODS = 1e5  # truncation radius cap, in units of 2 pi/max|w|


def _choose_R(integrand: _Integrand, r: float, scale: float, tol: float) -> float:
    c = min(integrand.c_plus, integrand.c_minus)
    cap = MAX_R_PERIODS * 2 * math.pi / max(abs(w) for w in integrand.periods)
    if 30.0 / c > cap:
        raise NoConvergence(f"{integrand.tag.value}: integrand decays too slowly "
                            f"(rate {c:.3g}); shift the arguments into the strip interior")
    R = max(8 * r, 30.0 / c)
    for _ in range(200):
        tb = max(integrand.tail_bound(R, _RIGHT), integrand.tail_bound(R, _LEFT))
        if tb <= tol * scale / 10:
            return R
        R *= 1.25
        if R > cap:
            break
    raise NoConvergence("could not find a truncation radius for the tails")


def integrate(kind: IntegrandKind, spec: ContourSpec | None = None) -> QuadResult:
    """Integrate a kernel along the (rotated) contour C.

    Raises PoleTooClose if a pole of the integrand comes within a quarter of
    the detour radius of the contour, and NoConvergence if the panel budget
    runs out.
    """
    spec = spec or ContourSpec()
    lam = complex(math.cos(spec.rotation_angle), math.sin(spec.rotation_angle))
    integrand = _Integrand(kind, lam)
    r = spec.detour_radius if spec.detour_radius is not None else integrand.default_radius()
    # crude magnitude for the initial tail choice: |f| on the arc times its length
    probe = integrand.f(r * np.exp(1j * np.linspace(0.1, math.pi - 0.1, 7)))
    scale = float(np.max(np.abs(probe))) * r
    if not math.isfinite(scale) or scale == 0:
        scale = 1.0
    R = spec.truncation_radius or _choose_R(integrand, r, scale, spec.tolerance)
    if _min_pole_distance(integrand.periods, r, R) < 0.25 * r:
        raise PoleTooClose(f"{integrand.tag.value}: kernel pole within {0.25 * r:.3g} of the contour")

    a, b, piece = _initial_panels(r, R)
    kron, err, l1 = _evaluate(integrand, a, b, piece, r)
    splits = 0
    eps_floor = 64 * np.finfo(float).eps
    while True:
        l1_total = float(l1.sum())
        tol_abs = max(spec.tolerance, eps_floor) * max(l1_total, 1e-300)
        total_err = float(err.sum())
        if total_err <= tol_abs:
            break
        order = np.argsort(-err)
        remaining = total_err - np.cumsum(err[order])
        k = int(np.searchsorted(-remaining, -0.5 * tol_abs)) + 1
        chosen = order[:k]
        splits += len(chosen)
        if splits > spec.max_subdivisions:
            raise NoConvergence(
                f"{integrand.tag.value}: subdivision budget exhausted "
                f"(error {total_err:.3g} vs target {tol_abs:.3g})")
        keep = np.ones(len(a), dtype=bool)
        keep[chosen] = False
        ca, cb, cp = a[chosen], b[chosen], piece[chosen]
        cm = 0.5 * (ca + cb)
        na = np.concatenate([ca, cm])
        nb = np.concatenate([cm, cb])
        npc = np.concatenate([cp, cp])
        nk, ne, nl = _evaluate(integrand, na, nb, npc, r)
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        piece = np.concatenate([piece[keep], npc])
        kron = np.concatenate([kron[keep], nk])
        err = np.concatenate([err[keep], ne])
        l1 = np.concatenate([l1[keep], nl])

    # fixed summation order keeps results reproducible
    order = np.lexsort((a, piece))
    value = complex(math.fsum(kron.real[order]) + 1j * math.fsum(kron.imag[order]))
    tail = integrand.tail_bound(R, _RIGHT) + integrand.tail_bound(R, _LEFT)
    pre = integrand.prefactor
    return QuadResult(value=value * pre, error=(float(err.sum()) + tail) * abs(pre),
                      l1_norm=float(l1.sum()) * abs(pre), panels=len(a),
                      detour_radius=r, truncation_radius=R)


def polylog_via_contour(d: int, z: complex, w1: complex,
                        spec: ContourSpec | None = None) -> QuadResult:
    """Left side of the polylogarithm contour identity.

    Equals (w1/2 pi i)^(d-1) Li_d(e^{2 pi i z/w1}) when 0 < Re z < Re w1 and
    Im(z/w1) > 0.
    """
    z, w1 = complex(z), complex(w1)
    if not (0 < z.real < w1.real) or (z / w1).imag <= 0:
        raise DomainError("need 0 < Re z < Re w1 and Im(z/w1) > 0")
    return integrate(IntegrandKind(Kernel.POLYLOG_KERNEL, (d, z, w1)), spec)


def zeta_via_contour(d: int, w1: complex, spec: ContourSpec | None = None) -> QuadResult:
    """Left side of the zeta contour identity, -int_C e^{w1 s} s^{1-d}/(e^{w1 s}-1)^2 ds."""
    w1 = complex(w1)
    if w1.real <= 0:
        raise DomainError("need Re w1 > 0")
    return integrate(IntegrandKind(Kernel.ZETA_KERNEL, (d, w1)), spec)


def polylog_closed_form(d: int, z: complex, w1: complex) -> complex:
    return (w1 / (2j * math.pi)) ** (d - 1) * polylog(d, np.exp(2j * math.pi * z / w1))


def zeta_closed_form(d: int, w1: complex) -> complex:
    return regularized_zeta_factor(d) / (2j * math.pi) * (w1 / (2j * math.pi)) ** (d - 2)
