import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conifold_rh import bps
from conifold_rh.bps import (BETA, BETA_DUAL, DELTA, DELTA_DUAL, INFINITY, Charge, ConifoldPoint,
                             RayLabel, Region, TwistedSeries)
from conifold_rh.errors import DomainError, TruncationOverflow

P = ConifoldPoint(0.2 + 0.5j, 1.0)
small = st.integers(-3, 3)
charges = st.builds(Charge, small, small, small, small)

# symplectic form in the basis (beta, delta, beta^, delta^)
OMEGA = np.array([[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]])


@given(charges, charges)
def test_pairing_matches_matrix_form(g1, g2):
    assert bps.pairing(g1, g2) == np.array(g1.as_tuple()) @ OMEGA @ np.array(g2.as_tuple())
    assert bps.pairing(g1, g2) == -bps.pairing(g2, g1)


def test_pairing_basis_values():
    assert bps.pairing(BETA_DUAL, BETA) == 1
    assert bps.pairing(DELTA_DUAL, DELTA) == 1
    assert bps.pairing(BETA, DELTA) == 0


def test_bps_invariants():
    assert bps.bps_invariant(BETA + 5 * DELTA) == 1
    assert bps.bps_invariant(-BETA - 2 * DELTA) == 1
    assert bps.bps_invariant(3 * DELTA) == -2
    assert bps.bps_invariant(2 * BETA) == 0
    assert bps.bps_invariant(BETA_DUAL) == 0
    assert bps.bps_invariant(Charge()) == 0


def _series(draw_terms, trunc=6):
    return TwistedSeries.build({g: Fraction(c) for g, c in draw_terms}, trunc)


# truncation only respects products when every degree is non-negative
series = st.lists(st.tuples(st.builds(Charge, st.integers(0, 2), st.integers(0, 2),
                                      st.integers(-1, 1), st.integers(-1, 1)),
                            st.integers(-3, 3)), max_size=4).map(_series)


@given(series, series, series)
def test_twisted_product_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(charges, charges)
def test_twisted_product_of_monomials(g1, g2):
    a = TwistedSeries.build({g1: 1}, 100)
    b = TwistedSeries.build({g2: 1}, 100)
    want = (-1) ** (bps.pairing(g1, g2) % 2)
    assert (a * b).as_dict() == {g1 + g2: want}


def test_series_arithmetic_and_compatibility():
    a = TwistedSeries.build({BETA: 2, DELTA: Fraction(1, 3)}, 4)
    assert (a - a).terms == ()
    assert a.scale(3).as_dict() == {BETA: 6, DELTA: 1}
    with pytest.raises(DomainError):
        a + TwistedSeries.build({BETA: 1}, 5)
    # degree(3 delta) = 6 is above the truncation
    assert TwistedSeries.build({3 * DELTA: 1}, 4).terms == ()


@given(series)
def test_json_round_trip(s):
    assert TwistedSeries.from_json(s.dumps()) == s
    assert TwistedSeries.from_json(s.to_json()) == s


# ---------------------------------------------------------------- wall-crossing

def test_wall_cross_example():
    s = TwistedSeries.monomial(BETA_DUAL, 3)
    out = bps.wall_cross(RayLabel(0), s, P)
    assert out.to_json()["terms"] == [[0, 0, 1, 0, 1, 1], [1, 0, 1, 0, 1, 1]]


def test_wall_cross_fixes_low_classes():
    # classes with zero pairing against every active class are untouched
    s = TwistedSeries.monomial(BETA + DELTA, 5)
    for r in (RayLabel(0), RayLabel(-1, -1), RayLabel(INFINITY)):
        assert bps.wall_cross(r, s, P) == s


def test_wall_cross_on_l_inf():
    s = TwistedSeries.monomial(DELTA_DUAL, 4)
    out = bps.wall_cross(RayLabel(INFINITY), s, P).as_dict()
    # (1 - x_delta)^(-2) gives +2 x_delta, and the twist of <delta^, delta> = 1 flips it
    assert out[DELTA_DUAL] == 1
    assert out[DELTA_DUAL + DELTA] == -2
    assert set(g.b for g in out) == {0, 1, 2}


@pytest.mark.parametrize("g", [BETA_DUAL, DELTA_DUAL, BETA_DUAL + DELTA_DUAL, BETA_DUAL - DELTA_DUAL])
@pytest.mark.parametrize("trunc", [2, 5])
def test_sector_matches_closed_form(g, trunc):
    s = TwistedSeries.monomial(g, trunc)
    assert bps.sector_automorphism(P, trunc)(s) == bps.sector_closed_form(g, trunc)


def test_rays_in_sector_commute():
    s = TwistedSeries.monomial(BETA_DUAL + DELTA_DUAL, 5)
    rays = bps.sector_rays(P, 5)
    for r1 in rays:
        for r2 in rays:
            assert bps.commutator_defect(P, r1, r2, s).terms == ()


def test_sector_needs_m_plus_and_ordered_weights():
    with pytest.raises(DomainError):
        bps.sector_rays(ConifoldPoint(0.2 - 0.5j, 1.0), 3)
    with pytest.raises(DomainError):
        bps.sector_rays(P, 3, weights=(2, 1))


def test_non_positive_degree_overflows():
    s = TwistedSeries.build({BETA_DUAL: 1}, 3, weights=(1, 0))
    with pytest.raises(TruncationOverflow):
        bps.wall_cross(RayLabel(INFINITY), s, P)


def test_sigma_is_an_involution():
    s = TwistedSeries.build({BETA: 1, DELTA_DUAL - BETA: Fraction(2, 3)}, 4)
    assert bps.sigma(bps.sigma(s)) == s


# ---------------------------------------------------------------- points and rays

def test_regions():
    assert P.region is Region.M_PLUS and P.sign == 1
    q = ConifoldPoint(0.2 - 0.5j, 1.0)
    assert q.region is Region.M_MINUS and q.sign == -1
    assert ConifoldPoint(0.3, 1.0).region is Region.M_ZERO
    with pytest.raises(DomainError):
        ConifoldPoint(2.0, 1.0)
    with pytest.raises(DomainError):
        ConifoldPoint(0.3, 0)


def test_active_rays_and_central_charges():
    rays = dict(bps.active_rays(P, 12.0))
    for ray, classes in rays.items():
        d = bps.ray_direction(P, ray)
        for g in classes:
            z = bps.central_charge(P, g)
            assert abs(z / abs(z) - d) < 1e-12
            assert abs(z) <= 12.0 * (1 + 1e-12)
    assert RayLabel(0) in rays and RayLabel(0, -1) in rays
    assert rays[RayLabel(INFINITY)] == [DELTA]


def test_m_zero_rays():
    q = ConifoldPoint(0.3, 1.0)
    rays = dict(bps.active_rays(q, 15.0))
    assert set(rays) == {RayLabel(INFINITY, 1), RayLabel(INFINITY, -1)}
    assert BETA in rays[RayLabel(INFINITY, 1)]
    with pytest.raises(DomainError):
        bps.ray_generator(q, RayLabel(2))


@pytest.mark.parametrize("m", [-2, -1, 1, 3])
def test_z_action(m):
    assert bps.check_z_action(P, m, 20.0)
    g = Charge(1, 2, 3, 4)
    assert bps.pairing(bps.z_action(m, g), bps.z_action(m, BETA_DUAL)) == bps.pairing(g, BETA_DUAL)


def test_support_constant_bounds_active_classes():
    c = bps.support_constant(P)
    for _, classes in bps.active_rays(P, 40.0):
        for g in classes:
            assert abs(bps.central_charge(P, g)) > c * (abs(g.a) + abs(g.b))


def test_convergence_sum_monotone_and_finite():
    rep = bps.convergence_sum(P, R=1.0)
    assert rep.monotone
    assert rep.tail_bound < 1e-12
    assert math.isfinite(rep.value) and rep.value > 0
    short = bps.convergence_sum(P, R=1.0, n_max=2)
    assert len(short.partial_sums) == 3 and short.value <= rep.value


def test_ray_label_validation():
    assert str(RayLabel(3, -1)) == "-l_3"
    assert str(RayLabel(INFINITY)) == "l_inf"
    with pytest.raises(DomainError):
        RayLabel(1.5)
    with pytest.raises(DomainError):
        RayLabel(1, 0)
