import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kronsim.blockenc import BlockEncoding, dilate
from kronsim.errors import DegreeOverflow, InvalidFactor, NotHermitianBlock
from kronsim.ledger import ResourceLedger
from kronsim.linalg import expm_hermitian, op_norm
from kronsim.qsvt import ChebPoly, apply_poly, bessel_j, jacobi_anger
from oracles import half_exp_sup_oracle, random_hermitian

# mpmath besselj at 50 digits, frozen
BESSEL_CASES = [
    (0, 0.5, 0.9384698072408129),
    (1, 0.5, 0.2422684576748739),
    (0, 1.0, 0.7651976865579666),
    (1, 1.0, 0.4400505857449335),
    (5, 1.0, 0.00024975773021123444),
    (3, 4.0, 0.43017147387562193),
    (20, 11.5, 0.00012486857217967876),
    (0, 13.0, 0.20692610237706782),
    (7, 13.0, -0.24057094958616052),
    (40, 13.0, 1.418012962941359e-16),
    (0, 25.0, 0.09626678327595811),
    (12, 25.0, -0.07286782727986288),
    (60, 25.0, 5.72351548372227e-18),
    (2, 100.0, -0.021528757344505364),
]


@pytest.mark.parametrize("order,t,want", BESSEL_CASES)
def test_bessel_reference_values(order, t, want):
    got = bessel_j(order, t)
    assert got == pytest.approx(want, abs=1e-14, rel=1e-12)


def test_bessel_t_zero():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(3, 0.0) == 0.0


def test_bessel_rejects_negative_order():
    with pytest.raises(InvalidFactor):
        bessel_j(-1, 1.0)


def test_bessel_negative_argument_parity():
    # J_k(-t) = (-1)^k J_k(t), on both sides of the series/Miller split
    for t in (3.0, 20.0):
        for order in (0, 1, 2, 5):
            assert bessel_j(order, -t) == pytest.approx(
                (-1) ** order * bessel_j(order, t), rel=1e-12, abs=1e-15
            )


def test_bessel_recurrence_across_series_cutoff():
    # J_{k-1}(t) + J_{k+1}(t) = (2k/t) J_k(t) straddling the dispatch at |t|=12
    for t in (11.0, 13.0, 50.0):
        for k in (3, 10, 25):
            lhs = bessel_j(k - 1, t) + bessel_j(k + 1, t)
            assert lhs == pytest.approx(2 * k / t * bessel_j(k, t), rel=1e-9, abs=1e-12)


def test_cheb_poly_eval_matches_numpy(rng):
    coeffs = tuple(rng.normal(size=7))
    poly = ChebPoly(coeffs, 6, 0.0)
    xs = np.linspace(-1, 1, 31)
    want = np.polynomial.chebyshev.chebval(xs, coeffs)
    assert np.max(np.abs(poly.eval(xs) - want)) < 1e-13


def test_cheb_poly_degree_validation():
    with pytest.raises(InvalidFactor):
        ChebPoly((0.5, 0.0), 0, 0.0)


@pytest.mark.parametrize("t", [0.25, 1.0, 2.5, 7.0, 15.0])
def test_jacobi_anger_meets_budget(t):
    delta = 1e-8
    pr, pi = jacobi_anger(t, delta)
    combined = half_exp_sup_oracle(pr.coefficients, pi.coefficients, t)
    # half-amplitude pair carries half the caller-facing budget
    assert combined <= delta / 2
    assert pr.sup_err + pi.sup_err <= delta / 2
    # declared sup errors are measurements, not loose bounds
    assert combined <= pr.sup_err + pi.sup_err + 1e-15


def test_jacobi_anger_stays_capped():
    # both parts bounded by 1/2 on [-1, 1], the transformation premise
    pr, pi = jacobi_anger(5.0, 1e-10)
    assert pr.grid_max_abs() <= 0.5 + 1e-12
    assert pi.grid_max_abs() <= 0.5 + 1e-12


def test_jacobi_anger_parity():
    pr, pi = jacobi_anger(3.0, 1e-8)
    # cos part: even Chebyshev orders only; sin part: odd orders only
    cr = np.asarray(pr.coefficients)
    ci = np.asarray(pi.coefficients)
    assert np.all(cr[1::2] == 0.0)
    assert np.all(ci[0::2] == 0.0)
    assert pr.degree % 2 == 0
    assert pi.degree % 2 == 1


def test_jacobi_anger_degree_grows_with_t():
    degrees = [max(p.degree for p in jacobi_anger(t, 1e-6)) for t in (0.5, 2.0, 8.0, 32.0)]
    assert degrees == sorted(degrees)
    assert degrees[-1] > degrees[0]


def test_jacobi_anger_degree_minimal():
    # one degree less must violate the budget: bisection found the frontier
    t, delta = 4.0, 1e-9
    pr, pi = jacobi_anger(t, delta)
    p = max(pr.degree, pi.degree)
    shorter = jacobi_anger(t, delta * 0.999)  # same frontier, sanity anchor
    assert max(q.degree for q in shorter) >= p
    trunc_r = ChebPoly(pr.coefficients[: p], p - 1, 0.0)
    combined = half_exp_sup_oracle(
        trunc_r.coefficients,
        pi.coefficients[: min(len(pi.coefficients), p)],
        t,
    )
    assert combined > delta / 2


def test_jacobi_anger_rejects_bad_delta():
    with pytest.raises(InvalidFactor):
        jacobi_anger(1.0, 0.7)
    with pytest.raises(InvalidFactor):
        jacobi_anger(1.0, 0.0)


def test_jacobi_anger_degree_overflow():
    with pytest.raises(DegreeOverflow):
        jacobi_anger(12000.0, 1e-3)


def test_jacobi_anger_t_zero():
    pr, pi = jacobi_anger(0.0, 1e-9)
    assert pr.coefficients == (0.5,)
    assert pi.coefficients == (0.0,)
    assert pr.sup_err == 0.0 and pi.sup_err == 0.0


@settings(max_examples=10, deadline=None)
@given(
    t=st.floats(min_value=-6.0, max_value=6.0, allow_nan=False),
    exp10=st.integers(min_value=-10, max_value=-4),
)
def test_jacobi_anger_budget_property(t, exp10):
    delta = 10.0**exp10
    pr, pi = jacobi_anger(t, delta)
    assert half_exp_sup_oracle(pr.coefficients, pi.coefficients, t) <= delta / 2


def test_apply_poly_is_half_exponential(rng):
    h = random_hermitian(rng, 4, scale=0.45)
    enc = dilate(h, 1.0)
    t = 1.7
    pr, pi = jacobi_anger(t, 1e-10)
    led = ResourceLedger()
    out = apply_poly(enc, pr, pi, ledger=led)
    want = 0.5 * expm_hermitian(h, t)
    measured = op_norm(out.block() - want)
    assert measured < 1e-9
    assert out.scale == 1.0
    assert measured <= out.err + 1e-12
    p = max(pr.degree, pi.degree)
    assert led.counters["be_queries"] == p + 1
    assert led.counters["poly_degree"] == p
    # dilate ancilla is a single qubit: (1 + 1) * p two-qubit gates
    assert led.counters["two_qubit_gates"] == 2 * p
    assert led.counters["ancilla_dims"] == 4 * enc.ancilla_dim


def test_apply_poly_transforms_target(rng):
    h = random_hermitian(rng, 3, scale=0.4)
    enc = dilate(h, 1.0)
    t = 0.9
    out = apply_poly(enc, *jacobi_anger(t, 1e-11))
    assert out.target is not None
    assert op_norm(out.target - 0.5 * expm_hermitian(h, t)) < 1e-10


def test_apply_poly_err_formula(rng):
    h = random_hermitian(rng, 3, scale=0.4)
    enc = dilate(h, 1.0)
    enc = BlockEncoding(enc.unitary, 3, enc.ancilla_dim, 1.0, 1e-8, target=h)
    pr, pi = jacobi_anger(1.0, 1e-9)
    out = apply_poly(enc, pr, pi)
    p = max(pr.degree, pi.degree)
    floor = 4 * p * np.sqrt(1e-8 / 1.0)
    assert out.err >= floor
    assert out.err >= pr.sup_err + pi.sup_err


def test_apply_poly_rejects_non_hermitian(rng):
    a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    a = 0.4 * a / np.linalg.norm(a, 2)
    enc = dilate(a, 1.0)
    pr, pi = jacobi_anger(1.0, 1e-6)
    with pytest.raises(NotHermitianBlock):
        apply_poly(enc, pr, pi)


def test_apply_poly_identity_block():
    # H = c * I: result is the scalar phase (1/2) e^{-itc} times identity
    c = 0.3
    enc = dilate(np.eye(2) * c, 1.0)
    t = 2.0
    out = apply_poly(enc, *jacobi_anger(t, 1e-11))
    want = 0.5 * np.exp(-1j * t * c) * np.eye(2)
    assert op_norm(out.block() - want) < 1e-10
