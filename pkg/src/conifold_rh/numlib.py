"""Exact and floating-point primitives.

Bernoulli numbers are exact :class:`fractions.Fraction` values (convention
B_1 = -1/2, read off from 1/(e^x - 1) = sum B_k x^(k-1)/k!).  Polylogarithms
of integer order and zeta values at integers are double precision.
"""

from __future__ import annotations

import cmath
import math
import threading
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, NoConvergence

TWO_PI_I = 2j * math.pi

_bern_lock = threading.Lock()
_bern_table: list[Fraction] = [Fraction(1)]


def bernoulli_number(k: int) -> Fraction:
    """Return the Bernoulli number B_k as an exact fraction (B_1 = -1/2)."""
    if k < 0:
        raise DomainError(f"Bernoulli index must be non-negative, got {k}")
    if k < len(_bern_table):
        return _bern_table[k]
    with _bern_lock:
        # sum_{j<=m} C(m+1, j) B_j = 0, solved for B_m
        for m in range(len(_bern_table), k + 1):
            acc = Fraction(0)
            for j in range(m):
                acc += math.comb(m + 1, j) * _bern_table[j]
            _bern_table.append(-acc / (m + 1))
    return _bern_table[k]


def bernoulli_float(k: int) -> float:
    return float(bernoulli_number(k))


@lru_cache(maxsize=None)
def bernoulli_polynomial_coeffs(n: int) -> tuple[Fraction, ...]:
    """Coefficients c_j of B_n(x) = sum_j c_j x^j, exact."""
    if n < 0:
        raise DomainError(f"degree must be non-negative, got {n}")
    coeffs = [Fraction(0)] * (n + 1)
    for k in range(n + 1):
        coeffs[n - k] = math.comb(n, k) * bernoulli_number(k)
    return tuple(coeffs)


def bernoulli_polynomial(n: int, x):
    """Evaluate B_n(x).  Exact for int/Fraction input, complex otherwise."""
    coeffs = bernoulli_polynomial_coeffs(n)
    if isinstance(x, (int, Fraction)):
        acc = Fraction(0)
        for c in reversed(coeffs):
            acc = acc * x + c
        return acc
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * x + float(c)
    return acc


def _nonzero(*ws) -> None:
    for w in ws:
        if w == 0:
            raise DomainError("period parameters must be nonzero")


def multiple_bernoulli_B22(z: complex, w1: complex, w2: complex) -> complex:
    """The quadratic multiple Bernoulli polynomial B_{2,2}(z | w1, w2)."""
    _nonzero(w1, w2)
    return (z * z / (w1 * w2) - (1 / w1 + 1 / w2) * z
            + (w2 / w1 + w1 / w2) / 6 + 0.5)


def multiple_bernoulli_B33(z: complex, w1: complex, w2: complex,
                           w3: complex) -> complex:
    """The cubic multiple Bernoulli polynomial B_{3,3}(z | w1, w2, w3)."""
    _nonzero(w1, w2, w3)
    p = w1 * w2 * w3
    e1 = w1 + w2 + w3
    e2 = w1 * w2 + w2 * w3 + w3 * w1
    sq = w1 * w1 + w2 * w2 + w3 * w3
    return (z ** 3 / p - 3 * e1 / (2 * p) * z ** 2
            + (sq + 3 * e2) / (2 * p) * z - e1 * e2 / (4 * p))


@lru_cache(maxsize=None)
def _stirling2_row(n: int) -> tuple[int, ...]:
    """Row n of Stirling numbers of the second kind, S(n, 0..n)."""
    if n == 0:
        return (1,)
    prev = _stirling2_row(n - 1)
    row = [0] * (n + 1)
    for j in range(1, n + 1):
        row[j] = j * (prev[j] if j < len(prev) else 0) + prev[j - 1]
    return tuple(row)


def _polylog_nonpositive(k: int, x: complex) -> complex:
    # Li_{-n}(x) = sum_j j! S(n+1, j+1) u^(j+1), u = x/(1-x)
    n = -k
    u = x / (1 - x)
    row = _stirling2_row(n + 1)
    acc = 0j
    for j in range(n, -1, -1):
        acc = acc * u + math.factorial(j) * row[j + 1]
    return acc * u


def _polylog_series(k: int, x: complex, rtol: float, max_terms: int) -> complex:
    r = abs(x)
    if r == 0:
        return 0j
    acc = 0j
    p = 1 + 0j
    for n in range(1, max_terms + 1):
        p *= x
        acc += p / n ** k
        tail = r ** (n + 1) / ((n + 1) ** k * (1 - r))
        if tail <= rtol * abs(acc):
            return acc
    raise NoConvergence(f"polylog series for k={k}, |x|={r} did not reach "
                        f"tolerance within {max_terms} terms")


def _polylog_log_series(k: int, x: complex, rtol: float) -> complex:
    # Li_k(e^mu) = mu^(k-1)/(k-1)! (H_{k-1} - log(-mu))
    #              + sum_{j != k-1} zeta(k-j) mu^j / j!,   |mu| < 2 pi
    mu = cmath.log(x)
    amu = abs(mu)
    if amu >= 2 * math.pi * 0.75:
        raise NoConvergence("log-series used outside its fast region")
    harmonic = sum(1.0 / j for j in range(1, k))
    acc = mu ** (k - 1) / math.factorial(k - 1) * (harmonic - cmath.log(-mu))
    term = 1 + 0j  # mu^j / j!
    rho = amu / (2 * math.pi)
    # |zeta(-n)| <= 4 n!/(2 pi)^(n+1), so terms past j are bounded geometrically
    scale = 4 * amu ** k / (2 * math.pi)
    for j in range(0, 400):
        if j > 0:
            term *= mu / j
        if j == k - 1:
            continue
        acc += zeta_int(k - j) * term
        if j > k and scale * rho ** (j + 1 - k) / (1 - rho) <= rtol * max(abs(acc), 1e-300):
            return acc
    raise NoConvergence("log-series for polylog did not converge")


def polylog(k: int, x: complex, *, method: str = "auto", rtol: float = 1e-16,
            max_terms: int = 1_000_000) -> complex:
    """Integer-order polylogarithm Li_k(x) on the closed unit disc.

    For k <= 0 the rational closed forms are used.  For k >= 1 the defining
    series is summed with the tail bound |x|^(N+1)/((1-|x|)(N+1)^k).  Close
    to the unit circle (|x| > 0.85, which includes |x| = 1, x != 1) the
    expansion in mu = log x with zeta-value coefficients is used instead;
    ``method="series"`` forces the plain series.
    """
    x = complex(x)
    r = abs(x)
    if r > 1.0 + 1e-15:
        raise DomainError(f"polylog needs |x| <= 1, got |x| = {r}")
    if k <= 0:
        if x == 1:
            raise DomainError("Li_k(1) diverges for k <= 0")
        return _polylog_nonpositive(k, x)
    if k == 1:
        if x == 1:
            raise DomainError("Li_1(1) diverges")
        return -cmath.log(1 - x)
    if x == 1:
        return complex(zeta_int(k))
    if method == "series" or (method == "auto" and r <= 0.85):
        if r >= 1.0:
            raise DomainError("plain series requires |x| < 1")
        return _polylog_series(k, x, rtol, max_terms)
    if method not in ("auto", "log"):
        raise ValueError(f"unknown polylog method {method!r}")
    return _polylog_log_series(k, x, rtol)


def _zeta3() -> float:
    # zeta(3) = 5/2 sum (-1)^(n+1) / (n^3 C(2n, n)); alternating, ratio < 1/4
    acc = 0.0
    for n in range(1, 60):
        t = 1.0 / (n ** 3 * math.comb(2 * n, n))
        acc += t if n % 2 else -t
        if t < 1e-18:
            break
    return 2.5 * acc


@lru_cache(maxsize=None)
def zeta_rational(d: int) -> Fraction:
    """zeta(d) for d <= 0 as an exact fraction, zeta(-n) = (-1)^n B_{n+1}/(n+1)."""
    if d > 0:
        raise DomainError("zeta_rational is defined for d <= 0 only")
    n = -d
    return (-1) ** n * bernoulli_number(n + 1) / (n + 1)


@lru_cache(maxsize=None)
def zeta_int(d: int) -> float:
    """Riemann zeta at an integer d != 1."""
    if d == 1:
        raise DomainError("zeta has a pole at 1")
    if d <= 0:
        return float(zeta_rational(d))
    if d % 2 == 0:
        m = d // 2
        return float((-1) ** (m + 1) * bernoulli_number(d) / (2 * math.factorial(d))) \
            * (2 * math.pi) ** d
    if d == 3:
        return _zeta3()
    # tail of sum n^-d beyond N is below N^(1-d)/(d-1)
    n_max = int(math.ceil((1e-17 * (d - 1)) ** (1.0 / (1 - d)))) + 1
    return math.fsum(1.0 / n ** d for n in range(n_max, 0, -1))


def regularized_zeta_factor(d: int) -> float:
    """(d-1) zeta(d), with the value 1 at d = 1."""
    if d == 1:
        return 1.0
    return (d - 1) * zeta_int(d)


ZETA2 = math.pi ** 2 / 6
ZETA3 = _zeta3()


def format_complex(z: complex) -> str:
    """'a+bi' with repr-precision parts, so parse_complex gives back the same bits."""
    z = complex(z)
    im = repr(z.imag)
    if not im.startswith("-"):
        im = "+" + im
    return f"{z.real!r}{im}i"


def parse_complex(s: str) -> complex:
    """Parse 'a+bi', 'a-bi', 'bi', 'a' (a trailing 'j' is accepted too)."""
    t = s.strip().replace(" ", "")
    if not t:
        raise ValueError("empty complex literal")
    if t[-1] in "iI" and not t.lower().endswith("inf"):
        t = t[:-1] + "j"
    elif t.lower().endswith("infi"):
        t = t[:-1] + "j"
    try:
        return complex(t)
    except ValueError:
        raise ValueError(f"cannot parse complex number {s!r}") from None
