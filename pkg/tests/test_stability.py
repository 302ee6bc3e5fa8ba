import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from beamdecay.errors import CertificateIneligible, DomainError, LambdaInadmissible, PreconditionViolation
from beamdecay.model import BoundaryControls, reference_beam
from beamdecay.stability import (REFERENCE_ROWS, REFERENCE_VALUES, LyapunovBounds, beta_bounds_constant,
                                 beta_bounds_general, bounds_for, certificate, certify, decay_envelope,
                                 lambda_range, poincare_check, random_spline_profile, round_half_even, table1,
                                 table_deviations, trace_check)

M_P, R_P, L_REF = 2.14e-3, 0.31e-3, 0.502  # printed line mass, rigidity, length


def r2(x):
    return round_half_even(x, 2)


# --- beta bounds ---------------------------------------------------------------------------------

def test_general_bounds_trivial_case():
    b = beta_bounds_general(3.0, 0.0, 3.0, math.sqrt(2.0))
    assert b.beta0 == pytest.approx(1.0, rel=1e-15)
    assert b.beta1 == pytest.approx(1.0, rel=1e-15)
    assert b.variant == "general"


def test_general_bounds_first_row():
    b = beta_bounds_general(M_P, 0.1 * M_P, R_P, L_REF)
    assert (r2(b.beta0), r2(b.beta1)) == (0.33, 0.35)


def test_general_damper_term_is_twice_the_constant_one():
    # oracle: the two damper terms are l*sum(ka)/r and l*sum(ka)/(2r); 0.502*0.02/(2*0.31e-3) by hand
    gap = 0.01004 / 0.00062
    for gamma in (0.1, 1.0, 5.0):
        g = beta_bounds_general(M_P, gamma * M_P, R_P, L_REF, 0.01, 0.01)
        c = beta_bounds_constant(M_P, gamma, R_P, L_REF, 0.01, 0.01)
        assert g.beta1 - c.beta1 == pytest.approx(gap, rel=1e-12)
        assert gap == pytest.approx(16.193548387096774, rel=1e-14)


@pytest.mark.parametrize("gamma,ka,expected", [(0.1, 0.0, (0.33, 0.35)), (0.1, 0.01, (0.33, 16.55)),
                                               (5.0, 0.01, (0.33, 17.62))])
def test_constant_bounds_match_table(gamma, ka, expected):
    b = beta_bounds_constant(M_P, gamma, R_P, L_REF, ka, ka)
    assert b.variant == "constant-coefficient"
    assert abs(b.beta0 - expected[0]) <= 0.005
    assert abs(b.beta1 - expected[1]) <= 0.005


@pytest.mark.parametrize("fn", [beta_bounds_general, beta_bounds_constant])
@pytest.mark.parametrize("bad", [(0.0, 0.1, 1.0, 1.0), (1.0, 0.1, -1.0, 1.0), (1.0, 0.1, 1.0, 0.0)])
def test_nonpositive_inputs_raise(fn, bad):
    with pytest.raises(DomainError):
        fn(*bad)


@settings(max_examples=200, deadline=None)
@given(m=st.floats(1e-4, 10), r=st.floats(1e-4, 10), length=st.floats(0.1, 5), gamma=st.floats(0, 10))
def test_general_and_constant_agree_without_dampers(m, r, length, gamma):
    g = beta_bounds_general(m, gamma * m, r, length)
    c = beta_bounds_constant(m, gamma, r, length)
    assert g.beta0 == pytest.approx(c.beta0, rel=1e-12)
    assert g.beta1 == pytest.approx(c.beta1, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(gamma=st.floats(0.01, 10), s1=st.floats(0, 0.05), s2=st.floats(0, 0.05), frac=st.floats(0.01, 0.99))
def test_damper_sum_raises_beta1_and_lowers_sigma(gamma, s1, s2, frac):
    assume(abs(s1 - s2) > 1e-6)
    lo, hi = sorted((s1, s2))
    b_lo = beta_bounds_constant(M_P, gamma, R_P, L_REF, lo / 2, lo / 2)
    b_hi = beta_bounds_constant(M_P, gamma, R_P, L_REF, hi / 2, hi / 2)
    assert b_hi.beta1 > b_lo.beta1
    # affine in the damper sum: slope l / (2 r)
    assert (b_hi.beta1 - b_lo.beta1) / (hi - lo) == pytest.approx(L_REF / (2 * R_P), rel=1e-8)
    lam = frac * lambda_range(b_lo.beta0, gamma, M_P, M_P)[1]
    assert certificate(b_hi, lam, gamma, M_P, M_P).sigma < certificate(b_lo, lam, gamma, M_P, M_P).sigma


def test_bounds_for_picks_variant():
    assert bounds_for(reference_beam(1.0), BoundaryControls()).variant == "constant-coefficient"
    from beamdecay.model import BeamSpec, CoefficientField
    spec = BeamSpec.proportional(1.0, CoefficientField.piecewise([0, 0.5, 1], [1.0, 2.0]), 1.0, 0.5)
    b = bounds_for(spec, BoundaryControls(ka_left=0.1))
    assert b.variant == "general"
    assert b == beta_bounds_general(2.0, 1.0, 1.0, 1.0, 0.1, 0.0)


# --- lambda range and certificate ----------------------------------------------------------------

def test_lambda_range_damping_branch():
    assert lambda_range(0.33, 0.1, 1.0, 1.0) == (0.0, pytest.approx(0.05))
    assert lambda_range(0.33, 5.0, 1.0, 1.0)[1] == pytest.approx(2.5)


def test_lambda_range_inverse_beta0_branch():
    assert lambda_range(2.0, 100.0, 1.0, 1.0)[1] == 0.5


@pytest.mark.parametrize("gamma", [0.0, -1.0])
def test_lambda_range_needs_positive_gamma(gamma):
    with pytest.raises(CertificateIneligible):
        lambda_range(0.33, gamma, 1.0, 1.0)


@pytest.mark.parametrize("b1,lam,M,sigma", [(0.35, 0.04, 1.03, 0.08), (17.62, 2.4, 208.12, 0.11),
                                            (16.75, 0.4, 8.87, 0.10)])
def test_certificate_table_cells(b1, lam, M, sigma):
    gamma = {0.04: 0.1, 0.4: 1.0, 2.4: 5.0}[lam]
    c = certificate(LyapunovBounds(0.33, b1, "constant-coefficient"), lam, gamma, 1.0, 1.0)
    assert abs(c.M - M) <= 0.005
    assert abs(c.sigma - sigma) <= 0.005


@pytest.mark.parametrize("lam,bound", [(0.0, "lower"), (-0.1, "lower"), (0.6, "inverse_beta0"),
                                       (0.5, "inverse_beta0"), (0.25, "damping")])
def test_inadmissible_lambda_names_the_bound(lam, bound):
    b = LyapunovBounds(2.0, 3.0, "constant-coefficient")
    gamma = 0.5 if bound == "damping" else 100.0
    with pytest.raises(LambdaInadmissible) as info:
        certificate(b, lam, gamma, 1.0, 1.0)
    assert info.value.details["bound"] == bound


def test_certify_default_penalty():
    spec = reference_beam(5.0)
    c = certify(spec, BoundaryControls())
    assert c.lam == pytest.approx(0.96 * c.lambda_max)
    assert c.lambda_max == pytest.approx(2.5)


@settings(max_examples=300, deadline=None)
@given(b0=st.floats(0.01, 10), extra=st.floats(0, 50), gamma=st.floats(0.01, 10),
       f1=st.floats(0.001, 0.999), f2=st.floats(0.001, 0.999))
def test_sigma_increases_with_lambda(b0, extra, gamma, f1, f2):
    assume(abs(f1 - f2) > 1e-6)
    b = LyapunovBounds(b0, b0 + extra, "constant-coefficient")
    top = lambda_range(b0, gamma, 1.0, 1.0)[1]
    lo, hi = sorted((f1, f2))
    assert certificate(b, lo * top, gamma, 1.0, 1.0).sigma < certificate(b, hi * top, gamma, 1.0, 1.0).sigma


@settings(max_examples=300, deadline=None)
@given(b0=st.floats(0.01, 10), extra=st.floats(0, 50), gamma=st.floats(0.01, 10), f=st.floats(0.001, 0.999),
       E0=st.floats(0, 1e6))
def test_envelope_at_zero_is_at_least_E0(b0, extra, gamma, f, E0):
    b = LyapunovBounds(b0, b0 + extra, "constant-coefficient")
    c = certificate(b, f * lambda_range(b0, gamma, 1.0, 1.0)[1], gamma, 1.0, 1.0)
    env0 = decay_envelope(c, E0, [0.0])[0]
    assert env0 == c.M * E0
    assert env0 >= E0


# --- envelope ------------------------------------------------------------------------------------

def _cert(M, sigma):
    from beamdecay.stability import DecayCertificate
    return DecayCertificate(0.1, M, sigma, 1.0, LyapunovBounds(1.0, 1.0, "constant-coefficient"))


def test_envelope_values():
    assert decay_envelope(_cert(1.0, 1.0), 1.0, [0.0])[0] == 1.0
    v1 = decay_envelope(_cert(1.03, 0.08), 1.0, [10.0])[0]
    assert v1 == pytest.approx(1.03 * math.exp(-0.8), rel=1e-14)
    assert v1 == pytest.approx(0.4628, abs=5e-5)
    v2 = decay_envelope(_cert(21.19, 1.09), 1.0, [10.0])[0]
    assert v2 == pytest.approx(21.19 * math.exp(-10.9), rel=1e-14)
    # 21.19 * 1.8458e-5 = 3.911e-4, i.e. 3.9e-4 at two significant figures
    assert v2 == pytest.approx(3.9e-4, abs=5e-6)


# --- reference table -----------------------------------------------------------------------------

def test_table_reproduces_every_cell():
    rows = table1()
    assert len(rows) == 6
    assert table_deviations(rows) == []
    for row, (gamma, kal, kar, lam) in zip(rows, REFERENCE_ROWS):
        assert (row.gamma, row.ka_left, row.ka_right, row.lam) == (gamma, kal, kar, lam)


@pytest.mark.parametrize("i", [2, 3, 4])
def test_table_rows(i):
    row = table1()[i]
    assert all(abs(a - b) <= 0.005 for a, b in zip(row.values(), REFERENCE_VALUES[i]))


def test_exact_precision_differs_from_the_hand_rounded_table():
    exact = table1(precision="exact")
    assert len(table_deviations(exact)) > 0
    # M for gamma = 5 is the most rounding-sensitive cell
    assert exact[4].M == pytest.approx(21.84, abs=0.01)


def test_auto_policy_uses_near_supremum_lambda():
    rows = table1(lambda_policy="auto", precision="exact")
    for row in rows:
        assert row.lam == pytest.approx(0.96 * min(1 / row.beta0, row.gamma / 2))


def test_unknown_table_options_raise():
    with pytest.raises(DomainError):
        table1(precision="sloppy")
    with pytest.raises(DomainError):
        table1(lambda_policy="random")


# --- functional inequalities ---------------------------------------------------------------------

X = np.linspace(0.0, 1.0, 2001)


def test_poincare_parabola():
    chk = poincare_check(X * (1 - X), 1.0)
    assert chk.lhs == pytest.approx(1 / 30, rel=1e-10)
    assert chk.rhs == pytest.approx(1.0, rel=1e-10)
    assert chk.holds


def test_poincare_zero():
    chk = poincare_check(np.zeros(11), 1.0)
    assert chk.lhs == chk.rhs == 0.0 and chk.holds


def test_poincare_sine():
    chk = poincare_check(np.sin(np.pi * X), 1.0)
    assert chk.lhs == pytest.approx(0.5, rel=1e-8)
    assert chk.rhs == pytest.approx(np.pi**4 / 8, rel=1e-5)
    assert chk.holds


def test_trace_parabola():
    chk = trace_check(X * (1 - X), 1.0)
    assert chk.left == pytest.approx(1.0, rel=1e-10)
    assert chk.right == pytest.approx(1.0, rel=1e-10)
    assert chk.rhs == pytest.approx(4.0, rel=1e-10)
    assert chk.holds


def test_trace_zero():
    chk = trace_check(np.zeros(11), 1.0)
    assert chk.left == chk.right == chk.rhs == 0.0 and chk.holds


def test_trace_sine():
    chk = trace_check(np.sin(np.pi * X), 1.0)
    assert chk.left == pytest.approx(np.pi**2, rel=1e-5)
    assert chk.rhs == pytest.approx(np.pi**4 / 2, rel=1e-5)
    assert chk.holds


@pytest.mark.parametrize("fn", [poincare_check, trace_check])
def test_nonzero_endpoint_raises(fn):
    with pytest.raises(PreconditionViolation):
        fn(X + 0.1, 1.0)


@settings(max_examples=1000, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), length=st.floats(0.2, 5.0))
def test_inequalities_hold_on_random_splines(seed, length):
    u = random_spline_profile(np.random.default_rng(seed), length)
    assert poincare_check(u, length).holds
    assert trace_check(u, length).holds
