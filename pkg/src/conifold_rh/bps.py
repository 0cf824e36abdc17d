"""The doubled conifold BPS structure and its wall-crossing automorphisms.

Charges are gamma = a*beta + b*delta + c*beta_dual + d*delta_dual.  The form
vanishes on span(beta, delta) and pairs the dual classes canonically, so

    <g1, g2> = c1*a2 + d1*b2 - (c2*a1 + d2*b1).

Twisted characters multiply as x_{g1} x_{g2} = (-1)^{<g1,g2>} x_{g1+g2}.
Series are truncated by a linear grading on the (beta, delta) part, measured
relative to the monomial the series started from.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable

from .errors import DomainError, TruncationOverflow

TWO_PI_I = 2j * math.pi
INFINITY = math.inf
MAX_TERMS = 200_000


# ---------------------------------------------------------------- lattice

@dataclass(frozen=True, order=True)
class Charge:
    a: int = 0
    b: int = 0
    c: int = 0
    d: int = 0

    def __add__(self, o: "Charge") -> "Charge":
        return Charge(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    def __sub__(self, o: "Charge") -> "Charge":
        return self + (-o)

    def __neg__(self) -> "Charge":
        return Charge(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, k: int) -> "Charge":
        return Charge(k * self.a, k * self.b, k * self.c, k * self.d)

    __rmul__ = __mul__

    def low(self) -> "Charge":
        """Projection to span(beta, delta)."""
        return Charge(self.a, self.b, 0, 0)

    def norm(self) -> int:
        return abs(self.a) + abs(self.b) + abs(self.c) + abs(self.d)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)


BETA = Charge(1, 0, 0, 0)
DELTA = Charge(0, 1, 0, 0)
BETA_DUAL = Charge(0, 0, 1, 0)
DELTA_DUAL = Charge(0, 0, 0, 1)


def pairing(g1: Charge, g2: Charge) -> int:
    return g1.c * g2.a + g1.d * g2.b - (g2.c * g1.a + g2.d * g1.b)


def bps_invariant(g: Charge) -> int:
    """1 on +-beta + n delta, -2 on k delta (k != 0), 0 elsewhere."""
    if g.c or g.d:
        return 0
    if abs(g.a) == 1:
        return 1
    if g.a == 0 and g.b != 0:
        return -2
    return 0


def z_action(m: int, g: Charge) -> Charge:
    """Lattice map (beta, delta) -> (beta - m delta, delta), (beta^, delta^) -> (beta^, delta^ + m beta^)."""
    # a*beta + b*delta + c*beta^ + d*delta^  ->  a*(beta - m delta) + b*delta + c*beta^ + d*(delta^ + m beta^)
    return Charge(g.a, g.b - m * g.a, g.c + m * g.d, g.d)


# ---------------------------------------------------------------- points and rays

class Region(str, Enum):
    M_PLUS = "M_PLUS"
    M_ZERO = "M_ZERO"
    M_MINUS = "M_MINUS"


@dataclass(frozen=True)
class ConifoldPoint:
    v: complex
    w: complex
    region: Region = field(init=False)

    def __post_init__(self):
        v, w = complex(self.v), complex(self.w)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)
        if w == 0:
            raise DomainError("w must be nonzero")
        r = v / w
        thr = 1e-12
        if abs(r.imag) > thr:
            region = Region.M_PLUS if r.imag > 0 else Region.M_MINUS
        else:
            region = Region.M_ZERO
            # only the integers nearest -Re(v conj w)/|w|^2 can give v + n w = 0
            n0 = -(v * w.conjugate()).real / abs(w) ** 2
            for n in (math.floor(n0), math.ceil(n0)):
                if abs(v + n * w) <= thr * abs(w):
                    raise DomainError(f"v + n w vanishes for n = {n}")
        object.__setattr__(self, "region", region)

    @property
    def sign(self) -> int:
        """+1 on M_PLUS, -1 on M_MINUS (ray labels use -v there), +1 on M_ZERO."""
        return -1 if self.region is Region.M_MINUS else 1


def central_charge(p: ConifoldPoint, g: Charge) -> complex:
    return TWO_PI_I * (g.a * p.v + g.b * p.w)


@dataclass(frozen=True, order=True)
class RayLabel:
    index: float  # an integer, or INFINITY
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise DomainError("ray sign must be +1 or -1")
        if self.index != INFINITY and self.index != int(self.index):
            raise DomainError("ray index must be an integer or INFINITY")

    @property
    def is_infinite(self) -> bool:
        return self.index == INFINITY

    def __str__(self) -> str:
        s = "" if self.sign > 0 else "-"
        return f"{s}l_inf" if self.is_infinite else f"{s}l_{int(self.index)}"


def ray_direction(p: ConifoldPoint, ray: RayLabel) -> complex:
    if ray.is_infinite:
        z = TWO_PI_I * p.w
    else:
        z = TWO_PI_I * (p.sign * p.v + int(ray.index) * p.w)
    return ray.sign * z / abs(z)


def ray_generator(p: ConifoldPoint, ray: RayLabel) -> Charge:
    """Primitive active class on a finite ray (its only active class)."""
    if ray.is_infinite:
        return DELTA * ray.sign
    if p.region is Region.M_ZERO:
        raise DomainError("finite rays are not defined on M_ZERO")
    return (BETA * p.sign + DELTA * int(ray.index)) * ray.sign


def ray_classes(p: ConifoldPoint, ray: RayLabel, max_abs_z: float) -> list[Charge]:
    """Active classes on the ray with |Z| <= max_abs_z, ordered by |Z|."""
    out: list[Charge] = []
    if p.region is Region.M_ZERO:
        if not ray.is_infinite:
            raise DomainError("on M_ZERO the only rays are +-l (use INFINITY)")
        # every class +-beta + n delta and k delta has Z on the line R * 2 pi i w
        r = (p.v / p.w).real
        kmax = int(max_abs_z / (2 * math.pi * abs(p.w))) + 2
        for k in range(1, kmax + 1):
            out.append(DELTA * (k * ray.sign))
        for n in range(-kmax - 2, kmax + 3):
            for s in (1, -1):
                g = Charge(s, s * n, 0, 0)
                lam = s * (r + n)
                if lam * ray.sign > 0:
                    out.append(g)
    elif ray.is_infinite:
        kmax = int(max_abs_z / (2 * math.pi * abs(p.w))) + 1
        out = [DELTA * (k * ray.sign) for k in range(1, kmax + 1)]
    else:
        out = [ray_generator(p, ray)]
    out = [g for g in out if abs(central_charge(p, g)) <= max_abs_z * (1 + 1e-12)]
    return sorted(out, key=lambda g: (abs(central_charge(p, g)), g))


def active_rays(p: ConifoldPoint, height_cutoff: float) -> list[tuple[RayLabel, list[Charge]]]:
    """Active rays of height <= height_cutoff, each with its classes of |Z| <= cutoff."""
    if height_cutoff <= 0:
        raise DomainError("height cutoff must be positive")
    rays: list[RayLabel] = []
    if p.region is Region.M_ZERO:
        rays = [RayLabel(INFINITY, 1), RayLabel(INFINITY, -1)]
    else:
        if 2 * math.pi * abs(p.w) <= height_cutoff:
            rays += [RayLabel(INFINITY, 1), RayLabel(INFINITY, -1)]
        sv = p.sign * p.v
        n0 = -(sv * p.w.conjugate()).real / abs(p.w) ** 2
        span = height_cutoff / (2 * math.pi * abs(p.w)) + 1
        for n in range(math.floor(n0 - span), math.ceil(n0 + span) + 1):
            if 2 * math.pi * abs(sv + n * p.w) <= height_cutoff:
                rays += [RayLabel(n, 1), RayLabel(n, -1)]
    out = []
    for r in sorted(rays, key=lambda r: (r.index, -r.sign)):
        cls = ray_classes(p, r, height_cutoff)
        if cls:
            out.append((r, cls))
    return out


def support_constant(p: ConifoldPoint) -> float:
    """A C > 0 with |Z(g)| > C ||g|| for every active class, ||g|| = |a| + |b|."""
    v, w = p.v, p.w
    aw = abs(w)
    # |v + n w|/(1 + |n|) >= (|n| |w| - |v|)/(1 + |n|), which tends to |w|
    n_big = int(math.ceil(4 * (abs(v) + aw) / aw)) + 1
    vals = [aw]  # k delta
    for n in range(-n_big, n_big + 1):
        vals.append(abs(v + n * w) / (1 + abs(n)))
    vals.append((n_big * aw - abs(v)) / (1 + n_big))
    return 0.5 * 2 * math.pi * min(vals)


@dataclass(frozen=True)
class ConvergenceReport:
    partial_sums: list[float]
    tail_bound: float
    monotone: bool

    @property
    def value(self) -> float:
        return self.partial_sums[-1]


def convergence_sum(p: ConifoldPoint, R: float = 1.0, n_max: int | None = None,
                    tail_tol: float = 1e-12) -> ConvergenceReport:
    """Partial sums of sum_gamma |Omega(gamma)| e^{-R |Z(gamma)|}.

    The k-th partial sum collects the classes +-(beta + n delta), |n| <= k,
    and +-j delta, j <= k.  Summation stops once the geometric tail bound
    drops below ``tail_tol`` (or at ``n_max``).
    """
    v, w = p.v, p.w
    aw = abs(w)
    q = math.exp(-2 * math.pi * R * aw)
    partial = []
    acc = 0.0
    k = 0
    while True:
        if k == 0:
            terms = [2 * math.exp(-2 * math.pi * R * abs(v))]
        else:
            terms = [2 * math.exp(-2 * math.pi * R * abs(v + k * w)),
                     2 * math.exp(-2 * math.pi * R * abs(v - k * w)),
                     4 * math.exp(-2 * math.pi * R * k * aw)]
        acc = math.fsum([acc] + terms)
        partial.append(acc)
        # |v +- n w| >= n |w| - |v| beyond k
        tail = (4 * math.exp(2 * math.pi * R * abs(v)) + 4) * q ** (k + 1) / (1 - q)
        if tail < tail_tol or (n_max is not None and k >= n_max):
            break
        k += 1
    mono = all(b >= a for a, b in zip(partial, partial[1:]))
    return ConvergenceReport(partial, tail, mono)


# ---------------------------------------------------------------- twisted series

Weights = tuple[int, int]
DEFAULT_WEIGHTS: Weights = (1, 2)


def degree(g: Charge, weights: Weights = DEFAULT_WEIGHTS) -> int:
    return g.a * weights[0] + g.b * weights[1]


def _twist(g1: Charge, g2: Charge) -> int:
    return -1 if pairing(g1, g2) % 2 else 1


@dataclass(frozen=True)
class TwistedSeries:
    """Finite combination of twisted characters with exact rational coefficients.

    A term x_g is kept when degree(g) - offset <= truncation.
    """

    terms: tuple[tuple[Charge, Fraction], ...]
    truncation: int
    offset: int = 0
    weights: Weights = DEFAULT_WEIGHTS

    @staticmethod
    def build(terms: dict[Charge, Fraction] | Iterable, truncation: int, offset: int = 0,
              weights: Weights = DEFAULT_WEIGHTS) -> "TwistedSeries":
        items = terms.items() if isinstance(terms, dict) else terms
        keep = {}
        for g, c in items:
            c = Fraction(c)
            if c != 0 and degree(g, weights) - offset <= truncation:
                keep[g] = keep.get(g, Fraction(0)) + c
        return TwistedSeries(tuple(sorted((g, c) for g, c in keep.items() if c != 0)),
                             truncation, offset, weights)

    @staticmethod
    def monomial(g: Charge, truncation: int, coeff=1,
                 weights: Weights = DEFAULT_WEIGHTS) -> "TwistedSeries":
        return TwistedSeries.build({g: Fraction(coeff)}, truncation, degree(g, weights), weights)

    def as_dict(self) -> dict[Charge, Fraction]:
        return dict(self.terms)

    def _compatible(self, o: "TwistedSeries") -> None:
        if (self.truncation, self.offset, self.weights) != (o.truncation, o.offset, o.weights):
            raise DomainError("series have different truncation data")

    def __add__(self, o: "TwistedSeries") -> "TwistedSeries":
        self._compatible(o)
        acc = self.as_dict()
        for g, c in o.terms:
            acc[g] = acc.get(g, Fraction(0)) + c
        return TwistedSeries.build(acc, self.truncation, self.offset, self.weights)

    def __sub__(self, o: "TwistedSeries") -> "TwistedSeries":
        return self + o.scale(-1)

    def scale(self, k) -> "TwistedSeries":
        k = Fraction(k)
        return TwistedSeries.build({g: c * k for g, c in self.terms},
                                   self.truncation, self.offset, self.weights)

    def multiply(self, o: "TwistedSeries", offset: int | None = None) -> "TwistedSeries":
        """Twisted product.  The result keeps this series' truncation data unless ``offset`` is given."""
        off = self.offset if offset is None else offset
        acc: dict[Charge, Fraction] = {}
        for g1, c1 in self.terms:
            for g2, c2 in o.terms:
                g = g1 + g2
                if degree(g, self.weights) - off > self.truncation:
                    continue
                acc[g] = acc.get(g, Fraction(0)) + _twist(g1, g2) * c1 * c2
        if len(acc) > MAX_TERMS:
            raise TruncationOverflow("series exceeds the term budget")
        return TwistedSeries.build(acc, self.truncation, off, self.weights)

    def __mul__(self, o: "TwistedSeries") -> "TwistedSeries":
        self._compatible(o)
        return self.multiply(o)

    def __eq__(self, o) -> bool:
        if not isinstance(o, TwistedSeries):
            return NotImplemented
        return (self.terms, self.truncation, self.offset, self.weights) == \
               (o.terms, o.truncation, o.offset, o.weights)

    def __hash__(self) -> int:
        return hash((self.terms, self.truncation, self.offset, self.weights))

    def to_json(self) -> dict:
        return {"truncation": self.truncation, "offset": self.offset,
                "weights": list(self.weights),
                "terms": [[g.a, g.b, g.c, g.d, c.numerator, c.denominator]
                          for g, c in self.terms]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @staticmethod
    def from_json(obj: dict | str) -> "TwistedSeries":
        if isinstance(obj, str):
            obj = json.loads(obj)
        terms = {Charge(*t[:4]): Fraction(t[4], t[5]) for t in obj["terms"]}
        return TwistedSeries.build(terms, obj["truncation"], obj["offset"],
                                   tuple(obj["weights"]))


def _binomial_power(eta: Charge, e: int, budget: int, weights: Weights) -> list[tuple[Charge, Fraction]]:
    """(1 - x_eta)^e as sum_j binom(e, j) (-1)^j x_{j eta}, j up to the degree budget."""
    de = degree(eta, weights)
    if de <= 0:
        raise TruncationOverflow(f"class {eta.as_tuple()} has non-positive degree; cannot truncate")
    out = [(Charge(), Fraction(1))]
    coeff = Fraction(1)
    j = 0
    while (j + 1) * de <= budget:
        # binom(e, j+1) = binom(e, j) (e - j)/(j + 1)
        coeff = coeff * (e - j) / (j + 1)
        j += 1
        if coeff == 0:
            break
        out.append((eta * j, coeff * (-1) ** j))
    return out


def _factor_series(gamma: Charge, factors: list[tuple[Charge, int]], s: TwistedSeries) -> TwistedSeries:
    """x_gamma * prod (1 - x_eta)^{e}, truncated relative to s."""
    budget = s.truncation - (degree(gamma, s.weights) - s.offset)
    out = TwistedSeries.build({gamma: Fraction(1)}, s.truncation, s.offset, s.weights)
    if budget < 0:
        return out
    for eta, e in factors:
        if e == 0:
            continue
        fac = TwistedSeries.build(_binomial_power(eta, e, budget, s.weights),
                                  s.truncation, 0, s.weights)
        out = out.multiply(fac, offset=s.offset)
    return out


def _substitute(s: TwistedSeries, image: Callable[[Charge], TwistedSeries]) -> TwistedSeries:
    acc: dict[Charge, Fraction] = {}
    for g, c in s.terms:
        for h, d in image(g).terms:
            acc[h] = acc.get(h, Fraction(0)) + c * d
    return TwistedSeries.build(acc, s.truncation, s.offset, s.weights)


def _classes_for_budget(p: ConifoldPoint, ray: RayLabel, budget: int,
                        weights: Weights) -> list[Charge]:
    """Active classes on the ray with positive degree at most ``budget``."""
    if budget < 0:
        return []
    if not ray.is_infinite:
        g = ray_generator(p, ray)
        return [g] if 0 < degree(g, weights) <= budget or degree(g, weights) <= 0 else []
    gen = DELTA * ray.sign
    dg = degree(gen, weights)
    if dg <= 0:
        raise TruncationOverflow("ray l_inf has non-positive degree for these weights")
    out = [gen * k for k in range(1, budget // dg + 1)]
    if p.region is Region.M_ZERO:
        # +-beta + n delta classes also live on +-l at M_ZERO
        r = (p.v / p.w).real
        wb, wd = weights
        for s in (1, -1):
            nlo = -(budget + abs(wb)) // max(abs(wd), 1) - 2
            nhi = (budget + abs(wb)) // max(abs(wd), 1) + 2
            for n in range(nlo, nhi + 1):
                g = Charge(s, s * n, 0, 0)
                if s * (r + n) * ray.sign > 0 and 0 < degree(g, weights) <= budget:
                    out.append(g)
                elif s * (r + n) * ray.sign > 0 and degree(g, weights) <= 0:
                    raise TruncationOverflow("active class of non-positive degree on the ray")
    return out


def wall_cross(ray: RayLabel, s: TwistedSeries, p: ConifoldPoint) -> TwistedSeries:
    """Apply S(ray)^* : x_g -> x_g prod_{eta on ray} (1 - x_eta)^{Omega(eta) <g, eta>}."""

    def image(g: Charge) -> TwistedSeries:
        budget = s.truncation - (degree(g, s.weights) - s.offset)
        factors = [(eta, bps_invariant(eta) * pairing(g, eta))
                   for eta in _classes_for_budget(p, ray, budget, s.weights)]
        return _factor_series(g, factors, s)

    return _substitute(s, image)


def sigma(s: TwistedSeries) -> TwistedSeries:
    """The involution x_g <-> x_{-g}; the grading is negated along with it."""
    w = (-s.weights[0], -s.weights[1])
    return TwistedSeries.build({-g: c for g, c in s.terms}, s.truncation, s.offset, w)


def sector_rays(p: ConifoldPoint, truncation: int,
                weights: Weights = DEFAULT_WEIGHTS) -> list[RayLabel]:
    """Rays of the near-half-plane sector containing l_inf, l_n (n >= 0) and -l_n (n < 0),
    restricted to those carrying a class of degree <= truncation."""
    if p.region is not Region.M_PLUS:
        raise DomainError("the sector automorphism is built for M_PLUS points")
    wb, wd = weights
    if wb <= 0 or wd <= wb:
        raise DomainError("weights must satisfy 0 < w_beta < w_delta")
    rays = [RayLabel(INFINITY, 1)]
    n = 0
    while wb + n * wd <= truncation:
        rays.append(RayLabel(n, 1))
        n += 1
    n = 1
    while -wb + n * wd <= truncation:
        rays.append(RayLabel(-n, -1))
        n += 1
    # order by phase inside the sector so the composition is a genuine ordered product
    return sorted(rays, key=lambda r: cmath.phase(ray_direction(p, r) / (1j * p.w)))


def sector_automorphism(p: ConifoldPoint, truncation: int,
                        weights: Weights = DEFAULT_WEIGHTS) -> Callable[[TwistedSeries], TwistedSeries]:
    """Composition of wall_cross over the sector rays of height below the saturation bound."""
    rays = sector_rays(p, truncation, weights)

    def apply(s: TwistedSeries) -> TwistedSeries:
        if s.weights != tuple(weights):
            raise DomainError("series grading differs from the automorphism grading")
        for r in rays:
            s = wall_cross(r, s, p)
        return s

    return apply


def sector_closed_form(g: Charge, truncation: int,
                       weights: Weights = DEFAULT_WEIGHTS) -> TwistedSeries:
    """x_g prod_{n>=0}(1 - x_{beta+n delta})^{<g, beta+n delta>}
    prod_{n>=1}(1 - x_{-(beta - n delta)})^{-<g, beta - n delta>}
    prod_{k>=1}(1 - x_{k delta})^{-2k <g, delta>}, truncated."""
    s = TwistedSeries.monomial(g, truncation, weights=weights)
    wb, wd = weights
    factors = []
    n = 0
    while wb + n * wd <= truncation:
        eta = BETA + DELTA * n
        factors.append((eta, pairing(g, eta)))
        n += 1
    n = 1
    while -wb + n * wd <= truncation:
        factors.append((-(BETA - DELTA * n), -pairing(g, BETA - DELTA * n)))
        n += 1
    k = 1
    while k * wd <= truncation:
        factors.append((DELTA * k, -2 * k * pairing(g, DELTA)))
        k += 1
    return _factor_series(g, factors, s)


def commutator_defect(p: ConifoldPoint, r1: RayLabel, r2: RayLabel,
                      s: TwistedSeries) -> TwistedSeries:
    """S(r1) S(r2) s - S(r2) S(r1) s; zero when the automorphisms commute."""
    return wall_cross(r1, wall_cross(r2, s, p), p) - wall_cross(r2, wall_cross(r1, s, p), p)


def check_z_action(p: ConifoldPoint, m: int, height_cutoff: float) -> bool:
    """The lattice map m sends the ray data of (v, w) to that of (v + m w, w), index n -> n - m."""
    if p.region is not Region.M_PLUS:
        raise DomainError("Z-action check is set up for M_PLUS points")
    q = ConifoldPoint(p.v + m * p.w, p.w)
    src = dict(active_rays(p, height_cutoff))
    dst = dict(active_rays(q, height_cutoff))
    if len(src) != len(dst):
        return False
    for ray, cls in src.items():
        target = ray if ray.is_infinite else RayLabel(int(ray.index) - m, ray.sign)
        if target not in dst:
            return False
        mapped = sorted(z_action(m, g) for g in cls)
        if mapped != sorted(dst[target]):
            return False
        for g in cls:
            if abs(central_charge(q, z_action(m, g)) - central_charge(p, g)) > 1e-9 * (1 + abs(central_charge(p, g))):
                return False
    return True
