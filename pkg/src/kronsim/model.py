"""Tensor-factor Hamiltonians: validation, spectra, subnormalizations.

A Hamiltonian is a sum of K terms, each a Kronecker product of M Hermitian
d x d factors, optionally with a time-dependent scalar coefficient per term.
Construction eagerly diagonalizes every factor and derives the bookkeeping
the pipelines run on: the set of non-identity factor slots, the
subnormalization gamma (product over factors of the absolute eigenvalue
sums), its reduced variant gamma_prime over the non-identity slots only, and
the term rank (product of factor ranks).

Conventions fixed here:
  - a factor is "trivial" iff it equals the identity entrywise to 1e-12
    (scaled identities are NOT trivial; that would silently change gamma);
  - empty nontrivial set means gamma_prime = 1 (empty product);
  - the norm premise ||term||_o <= 1/2 is enforced only when asked, because
    unit tests legitimately build unrescaled terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    CoefficientsMissing,
    DimensionMismatch,
    InvalidFactor,
    NormPremiseViolated,
)
from .linalg import (
    SpectralData,
    as_cmatrix,
    eig_hermitian,
    kron_all,
    max_entry_norm,
    op_norm,
    require_hermitian,
)

IDENTITY_TOL = 1e-12
NORM_PREMISE = 0.5
NORM_PREMISE_SLACK = 1e-9


def is_identity_factor(f: np.ndarray) -> bool:
    f = as_cmatrix(f)
    if f.shape[0] != f.shape[1]:
        return False
    return max_entry_norm(f - np.eye(f.shape[0])) < IDENTITY_TOL


@dataclass(frozen=True)
class TensorTerm:
    """One Kronecker-product term with its derived spectral bookkeeping."""

    factors: tuple[np.ndarray, ...]
    nontrivial_set: frozenset[int]
    spectral: tuple[SpectralData, ...]
    gamma: float
    gamma_prime: float
    term_rank: int

    @property
    def m(self) -> int:
        return len(self.factors)

    @property
    def d(self) -> int:
        return self.factors[0].shape[0]

    def dense(self) -> np.ndarray:
        return kron_all(self.factors)

    def norm_bound(self) -> float:
        """Exact operator norm: a Kronecker product's norm is the factor product."""
        return math.prod(float(np.max(np.abs(s.eigenvalues))) for s in self.spectral)


def _gamma_from_spectral(
    spectral: tuple[SpectralData, ...], nontrivial: frozenset[int]
) -> tuple[float, float]:
    gamma = 1.0
    gamma_prime = 1.0
    for j, s in enumerate(spectral):
        abs_sum = float(np.sum(np.abs(s.eigenvalues)))
        gamma *= abs_sum
        if j in nontrivial:
            gamma_prime *= abs_sum
    return gamma, gamma_prime


def make_term(factors, enforce_norm: bool = False, rank_tol: float = 1e-10) -> TensorTerm:
    """Validate factors and populate every derived field."""
    mats = tuple(require_hermitian(f) for f in factors)
    if not mats:
        raise DimensionMismatch("a term needs at least one factor")
    d = mats[0].shape[0]
    for j, f in enumerate(mats):
        if f.shape[0] != d:
            raise DimensionMismatch(
                f"factor {j} is {f.shape[0]}x{f.shape[0]}, expected {d}x{d}"
            )
    nontrivial = frozenset(j for j, f in enumerate(mats) if not is_identity_factor(f))
    spectral = tuple(eig_hermitian(f, rank_tol) for f in mats)
    gamma, gamma_prime = _gamma_from_spectral(spectral, nontrivial)
    rank = math.prod(s.rank for s in spectral)
    term = TensorTerm(
        factors=mats,
        nontrivial_set=nontrivial,
        spectral=spectral,
        gamma=gamma,
        gamma_prime=gamma_prime,
        term_rank=rank,
    )
    if enforce_norm and term.norm_bound() > NORM_PREMISE + NORM_PREMISE_SLACK:
        raise NormPremiseViolated(
            f"term operator norm {term.norm_bound():.6f} exceeds {NORM_PREMISE}"
        )
    return term


def compute_gamma(term: TensorTerm) -> tuple[float, float]:
    """Recompute (gamma, gamma_prime) from the stored spectra."""
    return _gamma_from_spectral(term.spectral, term.nontrivial_set)


COEFFICIENT_KINDS = ("constant", "polynomial", "cosine", "sine", "exponential-decay")


@dataclass(frozen=True)
class TimeCoefficient:
    """Scalar coefficient alpha(t) from a closed-form catalog.

    kinds and parameters:
      constant c            : alpha = c
      polynomial c0 .. cn   : alpha = sum c_k t^k
      cosine A w            : alpha = A cos(w t)
      sine A w              : alpha = A sin(w t)
      exponential-decay A r : alpha = A exp(-r t)
    Every kind has an analytic antiderivative, see integrate_coefficient.
    """

    kind: str
    parameters: tuple[float, ...]

    def __post_init__(self):
        if self.kind not in COEFFICIENT_KINDS:
            raise InvalidFactor(f"unknown coefficient kind {self.kind!r}")
        n = len(self.parameters)
        if self.kind == "polynomial":
            if n < 1:
                raise InvalidFactor("polynomial coefficient needs at least one parameter")
        elif self.kind == "constant":
            if n != 1:
                raise InvalidFactor("constant coefficient takes exactly one parameter")
        elif n != 2:
            raise InvalidFactor(f"{self.kind} coefficient takes exactly two parameters")


def evaluate_coefficient(c: TimeCoefficient, t: float) -> float:
    p = c.parameters
    if c.kind == "constant":
        return p[0]
    if c.kind == "polynomial":
        return float(sum(ck * t**k for k, ck in enumerate(p)))
    if c.kind == "cosine":
        return p[0] * math.cos(p[1] * t)
    if c.kind == "sine":
        return p[0] * math.sin(p[1] * t)
    return p[0] * math.exp(-p[1] * t)


def integrate_coefficient(c: TimeCoefficient, t: float) -> float:
    """Analytic beta(t) = integral of alpha from 0 to t."""
    p = c.parameters
    if c.kind == "constant":
        return p[0] * t
    if c.kind == "polynomial":
        return float(sum(ck * t ** (k + 1) / (k + 1) for k, ck in enumerate(p)))
    if c.kind == "cosine":
        a, w = p
        return a * t if w == 0.0 else a * math.sin(w * t) / w
    if c.kind == "sine":
        a, w = p
        return 0.0 if w == 0.0 else a * (1.0 - math.cos(w * t)) / w
    a, r = p
    return a * t if r == 0.0 else a * (1.0 - math.exp(-r * t)) / r


def coefficient_degree(c: TimeCoefficient, t: float) -> int:
    """Degree charged for transforming the time register into beta.

    Polynomial kinds have an exact degree; transcendental kinds get the
    minimal Chebyshev degree that interpolates beta on [0, max(1, t)] to
    1e-10 relative residual. Deterministic, used for accounting only.
    """
    if c.kind == "constant":
        return 1
    if c.kind == "polynomial":
        return len(c.parameters)
    from numpy.polynomial import chebyshev as cheb

    span = max(1.0, abs(t))

    def beta_on_unit(x):
        return np.array([integrate_coefficient(c, span * (xi + 1.0) / 2.0) for xi in x])

    grid = np.cos(np.linspace(0.0, np.pi, 257))
    target = beta_on_unit(grid)
    tol = 1e-10 * max(1.0, float(np.max(np.abs(target))))
    deg = 1
    while deg <= 512:
        coeffs = cheb.chebinterpolate(beta_on_unit, deg)
        if float(np.max(np.abs(cheb.chebval(grid, coeffs) - target))) <= tol:
            return deg
        deg *= 2
    return deg


@dataclass(frozen=True)
class TensorFactorHamiltonian:
    """K tensor-product terms over M factors of dimension d each."""

    k: int
    m: int
    d: int
    terms: tuple[TensorTerm, ...]
    coefficients: tuple[TimeCoefficient, ...] | None = None

    def __post_init__(self):
        if self.k < 1 or self.m < 1 or self.d < 2:
            raise DimensionMismatch(f"bad dims K={self.k} M={self.m} d={self.d}")
        if len(self.terms) != self.k:
            raise DimensionMismatch(f"expected {self.k} terms, got {len(self.terms)}")
        for i, term in enumerate(self.terms):
            if term.m != self.m or term.d != self.d:
                raise DimensionMismatch(f"term {i} has M={term.m}, d={term.d}")
        if self.coefficients is not None and len(self.coefficients) != self.k:
            raise CoefficientsMissing(
                f"expected {self.k} coefficients, got {len(self.coefficients)}"
            )

    @property
    def system_dim(self) -> int:
        return self.d**self.m

    def max_nontrivial(self) -> int:
        return max(len(t.nontrivial_set) for t in self.terms)


def make_hamiltonian(
    factor_lists,
    coefficients=None,
    enforce_norm: bool = False,
) -> TensorFactorHamiltonian:
    terms = tuple(make_term(fs, enforce_norm=enforce_norm) for fs in factor_lists)
    return TensorFactorHamiltonian(
        k=len(terms),
        m=terms[0].m,
        d=terms[0].d,
        terms=terms,
        coefficients=tuple(coefficients) if coefficients is not None else None,
    )


def assemble_dense(h: TensorFactorHamiltonian, t: float | None = None) -> np.ndarray:
    """Dense d^M matrix of H, or of H(t) = sum alpha_i(t) H_i when t is given."""
    if t is not None and h.coefficients is None:
        raise CoefficientsMissing("time requested but the Hamiltonian has no coefficients")
    n = h.system_dim
    out = np.zeros((n, n), dtype=np.complex128)
    for i, term in enumerate(h.terms):
        dense = term.dense()
        if t is not None:
            dense = dense * evaluate_coefficient(h.coefficients[i], t)
        out += dense
    return out


def assemble_weighted(h: TensorFactorHamiltonian, weights) -> np.ndarray:
    """Dense sum of w_i H_i for arbitrary scalar weights (oracle plumbing)."""
    n = h.system_dim
    out = np.zeros((n, n), dtype=np.complex128)
    for w, term in zip(weights, h.terms, strict=True):
        out += w * term.dense()
    return out


@dataclass(frozen=True)
class CommuteCheck:
    ok: bool
    pair: tuple[int, int] | None
    norm: float


def check_pairwise_commuting(h: TensorFactorHamiltonian, tol: float = 1e-9) -> CommuteCheck:
    """True iff every pair of terms commutes; on failure names the worst pair."""
    dense = [t.dense() for t in h.terms]
    worst = 0.0
    worst_pair = None
    for i in range(h.k):
        for j in range(i + 1, h.k):
            norm = op_norm(dense[i] @ dense[j] - dense[j] @ dense[i])
            if norm > worst:
                worst = norm
                worst_pair = (i, j)
    if worst > tol:
        return CommuteCheck(ok=False, pair=worst_pair, norm=worst)
    return CommuteCheck(ok=True, pair=None, norm=worst)
