import cmath
import json
import math
import random

import pytest

from conifold_rh import rhverify
from conifold_rh.bps import ConifoldPoint
from conifold_rh.errors import DomainError
from conifold_rh.rhverify import SolutionSample, VerificationReport

P = ConifoldPoint(0.2 + 0.5j, 1.0)
REPORT_KEYS = {"suite", "tolerance", "samples", "max_residual", "passed", "details"}


def t_in_sector(p=P, r=0.4):
    return r * cmath.exp(1j * rhverify.sigma0_bisector(p))


def test_bisector_lies_in_V():
    t = t_in_sector()
    assert rhverify.in_V(P, t)
    assert not rhverify.in_V(P, -t)


def test_solve_Bn_at_n0_is_solve_B():
    t = t_in_sector()
    assert rhverify.solve_Bn(P, t, 0) == rhverify.solve_B(P, t)
    assert rhverify.solve_Dn(P, t, 0) == rhverify.solve_D(P, t)


def test_solve_sample_bundles_values():
    t = t_in_sector()
    s = rhverify.solve_sample(P, t)
    assert isinstance(s, SolutionSample)
    assert s.sector_index == 0 and s.t == t
    assert s.B == rhverify.solve_B(P, t) and s.D == rhverify.solve_D(P, t)


def test_region_check():
    with pytest.raises(DomainError):
        rhverify.solve_B(P, -t_in_sector())
    with pytest.raises(DomainError):
        rhverify.solve_sample(P, -t_in_sector())


def test_null_class_phi_is_exponential_of_central_charge():
    t = 0.3 + 0.2j
    z = 2j * math.pi * (2 * P.v - 3 * P.w)
    assert abs(rhverify.null_class_phi(P, 2, -3, t) - cmath.exp(-z / t)) < 1e-12
    assert rhverify.null_class_phi(P, 0, 0, t) == 1


def test_minus_reflection():
    rep = rhverify.check_minus_reflection(P, samples=6)
    assert rep.passed and rep.samples == 6


def test_regularity_small_sample():
    rep = rhverify.check_regularity(P, samples=10)
    assert rep.passed and rep.max_residual == 0


def test_jump_suite_small_sample():
    rep = rhverify.check_jump_suite(P, samples=4, sectors=(0,))
    assert rep.passed and rep.max_residual < 1e-7
    assert set(rep.info["parts"]) == {"jump_H0", "reflection_minus_i_sigma0", "sector_H0"}


def test_jump_suite_on_m_zero():
    rep = rhverify.check_jump_suite(ConifoldPoint(0.3, 1.0), samples=4)
    assert rep.passed
    with pytest.raises(DomainError):
        rhverify.check_jump_suite(ConifoldPoint(0.2 - 0.5j, 1.0), samples=2)


def test_limit0():
    rep = rhverify.check_limit0(P, terms=8)
    assert rep.info["monotone"]
    assert rep.passed


def test_tau_homogeneity_report():
    t = 0.3 * cmath.exp(1j * math.radians(18))
    rep = rhverify.check_tau_homogeneity(0.2 + 0.5j, 1.0, t)
    assert rep.passed and rep.samples == 6


def test_sampling_respects_half_plane():
    rng = random.Random(3)
    for t in rhverify.sample_half_plane(P, 1, 20, rng):
        assert rhverify.in_half_plane(P, t, 1)


def test_report_json_shape():
    rep = rhverify.check_minus_reflection(P, samples=2)
    d = json.loads(rep.dumps())
    assert REPORT_KEYS <= set(d)
    assert isinstance(d["details"][0]["inputs"]["t"], str)


def test_report_non_finite_residual_fails():
    rep = VerificationReport.from_residuals("x", 1.0, [{"residual": 0.1}, {"residual": math.nan}])
    assert not rep.passed and rep.max_residual == math.inf
    assert json.loads(rep.dumps())["max_residual"] == "inf"


def test_merge_reports():
    a = VerificationReport.from_residuals("a", 1e-3, [{"residual": 1e-4}])
    b = VerificationReport.from_residuals("b", 1e-3, [{"residual": 1e-2}])
    m = rhverify.merge_reports("ab", [a, b])
    assert not m.passed and m.samples == 2 and m.info["parts"] == {"a": True, "b": False}
