import cmath
import math
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conifold_rh import numlib
from conifold_rh.errors import DomainError

finite = st.floats(min_value=-3, max_value=3, allow_nan=False)


@pytest.mark.parametrize("k", range(0, 31))
def test_bernoulli_numbers_match_sympy(k):
    want = sympy.bernoulli(k)
    if k == 1:
        want = sympy.Rational(-1, 2)  # sympy >= 1.12 uses +1/2
    assert numlib.bernoulli_number(k) == Fraction(int(want.p), int(want.q))


def test_bernoulli_small_values():
    assert numlib.bernoulli_number(2) == Fraction(1, 6)
    assert numlib.bernoulli_number(4) == Fraction(-1, 30)
    assert numlib.bernoulli_number(6) == Fraction(1, 42)
    with pytest.raises(DomainError):
        numlib.bernoulli_number(-1)


@pytest.mark.parametrize("n", range(0, 9))
def test_bernoulli_polynomial_matches_sympy(n):
    x = sympy.Symbol("x")
    poly = sympy.Poly(sympy.bernoulli(n, x), x)
    for j, c in enumerate(reversed(poly.all_coeffs())):
        assert numlib.bernoulli_polynomial_coeffs(n)[j] == Fraction(int(c.p), int(c.q))


@given(st.integers(0, 8), st.fractions(min_value=-3, max_value=3, max_denominator=50))
def test_bernoulli_polynomial_shift(n, x):
    # B_n(x + 1) - B_n(x) = n x^(n-1)
    lhs = numlib.bernoulli_polynomial(n, x + 1) - numlib.bernoulli_polynomial(n, x)
    assert lhs == (n * x ** (n - 1) if n else 0)


def test_bernoulli_polynomial_complex_agrees_with_exact():
    z = 0.3 + 0.7j
    exact = numlib.bernoulli_polynomial(5, Fraction(3, 10))
    assert abs(numlib.bernoulli_polynomial(5, 0.3) - float(exact)) < 1e-14
    assert abs(numlib.bernoulli_polynomial(3, z) - complex(mpmath.bernpoly(3, z))) < 1e-13


@given(finite, finite, finite, finite, finite)
def test_multiple_bernoulli_B22_symmetry(zr, zi, a, b, c):
    z = complex(zr, zi)
    w1 = complex(1 + abs(a), b)
    w2 = complex(0.5 + abs(c), -a)
    r = numlib.multiple_bernoulli_B22(z, w1, w2) - numlib.multiple_bernoulli_B22(z, w2, w1)
    assert abs(r) < 1e-12 * (1 + abs(numlib.multiple_bernoulli_B22(z, w1, w2)))


def test_multiple_bernoulli_reduce_for_unit_periods():
    # B_{2,2}(z|1,1) = z^2 - 2z + 5/6, B_{3,3}(z|1,1,1) = z^3 - 9z^2/2 + 6z - 9/4
    z = 0.37 - 0.2j
    assert abs(numlib.multiple_bernoulli_B22(z, 1, 1) - (z * z - 2 * z + 5 / 6)) < 1e-14
    want = z ** 3 - 4.5 * z ** 2 + 6 * z - 2.25
    assert abs(numlib.multiple_bernoulli_B33(z, 1, 1, 1) - want) < 1e-14
    with pytest.raises(DomainError):
        numlib.multiple_bernoulli_B22(z, 0, 1)


def test_B33_shift_identity():
    # B_{3,3}(z + w1) - B_{3,3}(z) = 3 B_{2,2}(z | w2, w3)
    z, w1, w2, w3 = 0.3 + 0.1j, 1.1 - 0.2j, 0.7 + 0.4j, 0.9
    lhs = numlib.multiple_bernoulli_B33(z + w1, w1, w2, w3) - numlib.multiple_bernoulli_B33(z, w1, w2, w3)
    assert abs(lhs - 3 * numlib.multiple_bernoulli_B22(z, w2, w3)) < 1e-13


@given(st.integers(-4, 5), st.floats(0, 0.999), st.floats(-math.pi, math.pi))
def test_polylog_matches_mpmath(k, r, th):
    x = r * cmath.exp(1j * th)
    if k <= 0 and abs(1 - x) < 1e-3:
        return
    got = numlib.polylog(k, x)
    want = complex(mpmath.polylog(k, x))
    assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


@pytest.mark.parametrize("k", [2, 3, 4, 5])
@pytest.mark.parametrize("th", [0.3, 1.5, -2.7])
def test_polylog_on_unit_circle(k, th):
    x = cmath.exp(1j * th)
    assert abs(numlib.polylog(k, x) - complex(mpmath.polylog(k, x))) < 1e-12


def test_polylog_special_points_and_errors():
    assert abs(numlib.polylog(2, 1) - math.pi ** 2 / 6) < 1e-15
    assert numlib.polylog(1, 0.5) == pytest.approx(math.log(2))
    assert numlib.polylog(0, 0.5) == pytest.approx(1.0)
    assert numlib.polylog(-1, 0.5) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        numlib.polylog(2, 1.5)
    with pytest.raises(DomainError):
        numlib.polylog(-1, 1)
    with pytest.raises(DomainError):
        numlib.polylog(1, 1)


def test_polylog_methods_agree():
    x = 0.8 * cmath.exp(0.4j)
    assert abs(numlib.polylog(3, x, method="series") - numlib.polylog(3, x, method="log")) < 1e-13


@pytest.mark.parametrize("d", [-7, -5, -3, -2, -1, 0, 2, 3, 4, 5, 6, 7, 11])
def test_zeta_int_matches_mpmath(d):
    assert numlib.zeta_int(d) == pytest.approx(float(mpmath.zeta(d)), rel=1e-14, abs=1e-300)


def test_zeta_negative_closed_form_and_pole():
    assert numlib.zeta_rational(-1) == Fraction(-1, 12)
    assert numlib.zeta_rational(0) == Fraction(-1, 2)
    assert numlib.zeta_rational(-2) == 0
    assert numlib.regularized_zeta_factor(1) == 1.0
    assert numlib.regularized_zeta_factor(0) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        numlib.zeta_int(1)


@given(st.complex_numbers(allow_nan=False, allow_infinity=False, max_magnitude=1e300))
def test_complex_format_round_trip(z):
    s = numlib.format_complex(z)
    back = numlib.parse_complex(s)
    assert back.real.hex() == complex(z).real.hex() and back.imag.hex() == complex(z).imag.hex()


@pytest.mark.parametrize("text,want", [("1+0i", 1), ("0.3-0.1i", 0.3 - 0.1j), ("2i", 2j),
                                       ("-1.5", -1.5), ("1e-3+2e2i", 1e-3 + 200j), ("1+2j", 1 + 2j)])
def test_parse_complex_forms(text, want):
    assert numlib.parse_complex(text) == want


def test_parse_complex_rejects_garbage():
    with pytest.raises(ValueError):
        numlib.parse_complex("1+")
    with pytest.raises(ValueError):
        numlib.parse_complex("")
