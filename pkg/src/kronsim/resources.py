"""Reference evolutions, result comparison, and scaling sweeps.

The oracle is the densely assembled evolution operator; comparison is plain
operator-norm distance on the extracted block (no global-phase quotient, the
pipelines are phase-faithful by construction). Sweeps rerun a pipeline while
one knob moves, collect one ledger counter or measured error per point, fit
the expected law, and report a verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CoefficientsMissing, DimensionMismatch, InvalidFactor
from .linalg import expm_hermitian, op_norm
from .model import (
    TensorFactorHamiltonian,
    assemble_dense,
    assemble_weighted,
    integrate_coefficient,
    make_hamiltonian,
)
from .pipelines import PipelineConfig, PipelineResult, run_pipeline

SWEEP_PARAMS = ("K", "t", "delta", "samples", "sparsity")


def oracle_evolution(
    h: TensorFactorHamiltonian, t: float, time_dependent: bool = False
) -> np.ndarray:
    """exp(-i H t), or exp(-i sum_i beta_i(t) H_i) for commuting families."""
    if time_dependent:
        if h.coefficients is None:
            raise CoefficientsMissing("time-dependent oracle needs coefficients")
        betas = [integrate_coefficient(c, t) for c in h.coefficients]
        return expm_hermitian(assemble_weighted(h, betas), 1.0)
    return expm_hermitian(assemble_dense(h), t)


def compare(result: PipelineResult, oracle: np.ndarray) -> float:
    """Operator-norm distance of the pipeline block from the oracle; stored
    on the result as measured_err."""
    if result.evolution_block is None:
        raise InvalidFactor("result has no dense block (ledger-only run?)")
    if result.evolution_block.shape != oracle.shape:
        raise DimensionMismatch(
            f"block is {result.evolution_block.shape}, oracle {oracle.shape}"
        )
    dist = op_norm(result.evolution_block - oracle)
    result.measured_err = dist
    return dist


@dataclass(frozen=True)
class ScalingReport:
    param: str
    counter: str
    values: tuple[float, ...]
    measured: tuple[float, ...]
    expected_law: str
    fit_summary: str
    passed: bool

    def rows(self) -> list[dict]:
        return [
            {
                "param": self.param,
                "value": v,
                "counter": self.counter,
                "measured": m,
                "expected_law": self.expected_law,
                "fit": self.fit_summary,
            }
            for v, m in zip(self.values, self.measured)
        ]


def fit_power(xs, ys) -> tuple[float, float, float]:
    """Least-squares log-log fit; returns (exponent, r_squared, max_rel_residual)."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.asarray(ys, dtype=float))
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    rel = float(np.max(np.abs(np.exp(pred) - np.exp(ly)) / np.exp(ly)))
    return float(slope), r2, rel


def fit_affine(xs, ys) -> tuple[float, float, float, float]:
    """Least-squares y = a + b x; returns (a, b, r_squared, max_rel_residual)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    b, a = np.polyfit(x, y, 1)
    pred = a + b * x
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    denom = np.where(np.abs(y) > 0, np.abs(y), 1.0)
    rel = float(np.max(np.abs(pred - y) / denom))
    return float(a), float(b), r2, rel


def chain_coupling_family(k: int, d: int = 2) -> TensorFactorHamiltonian:
    """K two-slot coupling terms on a line of K+1 sites: term i acts with
    X/2 on slot i and X on slot i+1. Used for term-count scaling runs."""
    x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
    eye = np.eye(2, dtype=np.complex128)
    m = k + 1
    factor_lists = []
    for i in range(k):
        factors = [eye.copy() for _ in range(m)]
        factors[i] = x / 2.0
        factors[i + 1] = x.copy()
        factor_lists.append(factors)
    return make_hamiltonian(factor_lists)


def single_coupling_family() -> TensorFactorHamiltonian:
    """One X/2 (x) X term: the minimal instance for sample-count sweeps."""
    x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
    return make_hamiltonian([[x / 2.0, x.copy()]])


def _product_counter(result: PipelineResult) -> float:
    c = result.ledger.counters
    return float(c["lcu_terms"] * max(1, c["amplification_rounds"]))


def sweep_terms(values, delta: float = 1e-6, t: float = 1.0) -> ScalingReport:
    """lcu_terms x amplification_rounds against the term count K."""
    measured = []
    for k in values:
        cfg = PipelineConfig("a1", t, delta, ledger_only=True)
        measured.append(_product_counter(run_pipeline(chain_coupling_family(int(k)), cfg)))
    slope, r2, _ = fit_power(values, measured)
    passed = abs(slope - 2.0) <= 0.5
    return ScalingReport(
        "K", "lcu_terms*amplification_rounds", tuple(float(v) for v in values),
        tuple(measured), "K^2 * log(K)", f"exponent={slope:.3f} r2={r2:.3f}", passed,
    )


def sweep_time(h: TensorFactorHamiltonian, values, delta: float = 1e-6) -> ScalingReport:
    """Nominal polynomial degree against the evolution time."""
    measured = []
    for t in values:
        cfg = PipelineConfig("a1", float(t), delta, ledger_only=True)
        measured.append(float(run_pipeline(h, cfg).ledger.counters["poly_degree"]))
    a, b, r2, rel = fit_affine(values, measured)
    passed = rel <= 0.20
    return ScalingReport(
        "t", "poly_degree", tuple(float(v) for v in values), tuple(measured),
        "a + b*t", f"a={a:.3f} b={b:.3f} r2={r2:.3f} maxrel={rel:.3f}", passed,
    )


def sweep_precision(h: TensorFactorHamiltonian, values, t: float = 1.0) -> ScalingReport:
    """Nominal polynomial degree against log(1/delta)."""
    measured = []
    for delta in values:
        cfg = PipelineConfig("a1", t, float(delta), ledger_only=True)
        measured.append(float(run_pipeline(h, cfg).ledger.counters["poly_degree"]))
    logs = [math.log(1.0 / float(d)) for d in values]
    a, b, r2, rel = fit_affine(logs, measured)
    passed = r2 >= 0.95
    return ScalingReport(
        "delta", "poly_degree", tuple(float(v) for v in values), tuple(measured),
        "a + b*log(1/delta)", f"a={a:.3f} b={b:.3f} r2={r2:.3f} maxrel={rel:.3f}", passed,
    )


def sweep_samples(
    values, seeds, delta: float = 0.01, t: float = 1.0
) -> ScalingReport:
    """Mean Monte-Carlo term deviation against the sample count N.

    Dense runs on the minimal coupling instance, averaged over the given
    seeds; the law is the estimator's N^(-1/2) concentration."""
    h = single_coupling_family()
    measured = []
    for n in values:
        errs = []
        for seed in seeds:
            cfg = PipelineConfig("a2", t, delta, mc_samples=int(n), mc_seed=int(seed))
            res = run_pipeline(h, cfg)
            errs.append(float(np.mean(list(res.mc_term_errors.values()))))
        measured.append(float(np.mean(errs)))
    slope, r2, _ = fit_power(values, measured)
    passed = -0.6 <= slope <= -0.4
    return ScalingReport(
        "samples", "mean_mc_term_err", tuple(float(v) for v in values),
        tuple(measured), "N^(-1/2)", f"exponent={slope:.3f} r2={r2:.3f}", passed,
    )


def sweep_sparsity(v: np.ndarray, values, tail_groups: int = 8) -> ScalingReport:
    """Measured truncation distance against the sparsity budget s.

    No closed-form law is claimed; the verdict checks the curve is
    non-increasing in s (up to numerical dust)."""
    from .truncation import randomized_truncate

    measured = [
        float(randomized_truncate(v, int(s), tail_groups).measured_trace_dist)
        for s in values
    ]
    diffs = np.diff(measured)
    passed = bool(np.all(diffs <= 1e-9))
    return ScalingReport(
        "sparsity", "measured_trace_dist", tuple(float(s) for s in values),
        tuple(measured), "empirical (non-increasing)", "monotonicity check", passed,
    )
