"""End-to-end acceptance gate: ten numbered criteria, one verdict line each.

Run with `pytest tests/test_acceptance.py -s` to see the verdict lines; each
criterion is an independent test so a failure pinpoints its number.
"""

import functools
import math
import time

import numpy as np
import pytest

from kronsim.blockenc import (
    be_amplify,
    be_lcu,
    be_negate,
    be_product,
    be_rescale,
    be_tensor,
    dilate,
)
from kronsim.errors import NotCommuting
from kronsim.linalg import op_norm
from kronsim.model import TimeCoefficient, make_hamiltonian
from kronsim.pipelines import PipelineConfig, run_pipeline
from kronsim.qsvt import jacobi_anger
from kronsim.resources import compare, oracle_evolution, sweep_samples, sweep_terms, sweep_time
from kronsim.truncation import check_appendix_b, ensemble_prepare, randomized_truncate
from oracles import random_unit

SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)
I2 = np.eye(2, dtype=np.complex128)


def criterion(n):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                detail = fn(*args, **kwargs)
            except BaseException as exc:
                print(f"criterion {n:2d}: FAIL  {type(exc).__name__}: {exc}")
                raise
            print(f"criterion {n:2d}: PASS  {detail}")

        return wrapper

    return deco


def _psd_instance():
    i4 = np.eye(4, dtype=np.complex128)

    def rank2(vals, vecs):
        out = np.zeros((4, 4), dtype=np.complex128)
        for lam, v in zip(vals, vecs):
            out += lam * np.outer(v, v.conj())
        return out

    v_full = np.ones(4, dtype=np.complex128) / 2.0
    v_pair = np.array([1, -1, 0, 0], dtype=np.complex128) / math.sqrt(2)
    u_full = np.array([1, 1, -1, 1], dtype=np.complex128) / 2.0
    u_pair = np.array([0, 0, 1, 1], dtype=np.complex128) / math.sqrt(2)
    a = rank2((0.3, 0.2), (v_full, v_pair))
    b = rank2((0.25, 0.15), (u_full, u_pair))
    return make_hamiltonian([[a, i4], [i4, b]], enforce_norm=True)


@criterion(1)
def test_criterion_1_end_to_end_accuracy(tfim3):
    start = time.perf_counter()
    res = run_pipeline(tfim3, PipelineConfig("a1", 1.0, 1e-6))
    measured = compare(res, oracle_evolution(tfim3, 1.0))
    wall = time.perf_counter() - start
    assert measured <= 1e-5
    assert wall < 10.0
    return f"A1 on 3-site Ising: error {measured:.3e} <= 1e-05, wall {wall:.2f}s < 10s"


@criterion(2)
def test_criterion_2_simplification_equivalence(tfim3):
    on = run_pipeline(tfim3, PipelineConfig("a1", 1.0, 1e-6))
    off = run_pipeline(tfim3, PipelineConfig("a1", 1.0, 1e-6, use_simplification=False))
    gap = op_norm(on.evolution_block - off.evolution_block)
    assert gap <= 1e-9
    prep_on = on.ledger.counters["prep_unitary_queries"]
    prep_off = off.ledger.counters["prep_unitary_queries"]
    assert prep_on < prep_off
    for i, term in enumerate(tfim3.terms):
        for name, deltas in on.ledger.stages:
            if name == f"term{i}-embed":
                assert deltas.get("swap_ops", 0) <= len(term.nontrivial_set)
    return (
        f"blocks agree to {gap:.2e} <= 1e-09; prep queries {prep_on} < {prep_off}; "
        f"per-term swaps within |R_i|"
    )


@criterion(3)
def test_criterion_3_monte_carlo_convergence():
    report = sweep_samples([2**k for k in range(6, 13)], seeds=range(20))
    slope = float(report.fit_summary.split()[0].split("=")[1])
    assert -0.6 <= slope <= -0.4
    assert report.passed
    return f"A2 error slope {slope:.3f} in [-0.6, -0.4] over N=64..4096, 20 seeds"


@criterion(4)
def test_criterion_4_purified_path_and_truncation():
    h = _psd_instance()
    t, delta = 0.7, 1e-7
    a1 = run_pipeline(h, PipelineConfig("a1", t, delta))
    a3 = run_pipeline(h, PipelineConfig("a3", t, delta))
    gap = op_norm(a3.evolution_block - a1.evolution_block)
    assert gap <= 1e-9
    s = h.d // 2
    trunc = run_pipeline(h, PipelineConfig("a3", t, delta, truncation_sparsity=s))
    delta_rec = trunc.truncation_delta
    assert delta_rec is not None
    assert abs(delta_rec - max(trunc.factor_trace_dists.values())) <= 1e-10
    worst = max(trunc.term_trace_defects.values())
    assert worst <= delta_rec + 1e-12
    return (
        f"exact path matches A1 to {gap:.2e}; at s=d/2 term defects "
        f"{worst:.3e} <= recorded delta {delta_rec:.3e}"
    )


@criterion(5)
def test_criterion_5_residual_inequality_sweep():
    rng = np.random.default_rng(20240818)
    checked = 0
    for _ in range(100):
        d = int(rng.integers(2, 33))
        v = random_unit(rng, d)
        for s in range(1, d + 1):
            e = randomized_truncate(v, s)
            lhs, rhs, holds = check_appendix_b(v, e)
            assert holds and lhs <= rhs + 1e-9
            checked += 1
    return f"residual <= sqrt(eps) + 1e-9 on {checked} (vector, s) cases, d <= 32"


@criterion(6)
def test_criterion_6_preparation_success_probability():
    rng = np.random.default_rng(20240819)
    tested = 0
    for _ in range(20):
        d = int(rng.integers(4, 25))
        v = random_unit(rng, d)
        for s in (1, max(1, d // 3), d):
            e = randomized_truncate(v, s)
            _, success = ensemble_prepare(e)
            formula = sum(math.sqrt(m.prob) for m in e.members) ** -2
            assert abs(success - formula) <= 1e-10
            tested += 1
    return f"success prob equals (sum sqrt p)^-2 within 1e-10 on {tested} ensembles"


@criterion(7)
def test_criterion_7_transform_degree_law():
    start = time.perf_counter()
    rows, degrees = [], []
    for t in (1.0, 2.0, 4.0, 8.0, 16.0):
        for delta in (1e-2, 1e-4, 1e-6, 1e-8, 1e-10):
            pr, pi = jacobi_anger(t, delta)
            rows.append([1.0, t, math.log(1.0 / delta)])
            degrees.append(float(max(pr.degree, pi.degree)))
    a = np.asarray(rows)
    y = np.asarray(degrees)
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    pred = a @ coef
    r2 = 1.0 - float(np.sum((y - pred) ** 2)) / float(np.sum((y - y.mean()) ** 2))
    wall = time.perf_counter() - start
    assert r2 >= 0.95
    assert wall < 30.0
    return (
        f"degree ~ {coef[0]:.2f} + {coef[1]:.2f} t + {coef[2]:.2f} log(1/delta), "
        f"R^2 {r2:.4f} >= 0.95, wall {wall:.2f}s < 30s"
    )


@criterion(8)
def test_criterion_8_resource_scaling(tfim3):
    k_report = sweep_terms([2, 3, 4, 6, 8, 12])
    k_slope = float(k_report.fit_summary.split()[0].split("=")[1])
    assert k_report.passed and abs(k_slope - 2.0) <= 0.5
    t_report = sweep_time(tfim3, [0.5, 1.0, 2.0, 4.0, 6.0])
    rel = float(t_report.fit_summary.split()[-1].split("=")[1])
    assert t_report.passed and rel <= 0.20
    return f"K-sweep exponent {k_slope:.3f} within 2 +/- 0.5; t-sweep max deviation {rel:.1%} <= 20%"


@criterion(9)
def test_criterion_9_time_dependent_commuting(td_pair):
    t = math.pi / 2
    res = run_pipeline(td_pair, PipelineConfig("td", t, 1e-6))
    measured = compare(res, oracle_evolution(td_pair, t, time_dependent=True))
    assert measured <= 1e-5
    const = TimeCoefficient("constant", (1.0,))
    bad = make_hamiltonian(
        [[0.5 * SX, I2], [0.5 * SZ, I2]], coefficients=[const, const]
    )
    with pytest.raises(NotCommuting) as info:
        run_pipeline(bad, PipelineConfig("td", t, 1e-6))
    assert info.value.pair == (0, 1) and info.value.norm > 0
    return (
        f"TD error {measured:.3e} <= 1e-05 at t=pi/2; noncommuting input rejected "
        f"with witness pair {info.value.pair}, norm {info.value.norm:.3f}"
    )


@criterion(10)
def test_criterion_10_encoding_algebra_roundtrips():
    rng = np.random.default_rng(20240820)
    worst_claim, worst_unit = 0.0, 0.0

    def claim_gap(u):
        target = u.target
        assert target is not None
        return op_norm(u.scale * u.block() - target) - u.err

    for trial in range(200):
        n = int(rng.integers(2, 4))
        mats = []
        for _ in range(2):
            m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            mats.append(float(rng.uniform(0.3, 0.9)) * m / np.linalg.norm(m, 2))
        ua, ub = dilate(mats[0], 1.0), dilate(mats[1], 1.0)
        v = be_tensor([ua, ub])
        w = be_lcu([v, be_negate(v)], [0.7, 0.3])
        x = be_product(w, v)
        y = be_rescale(x, float(rng.uniform(1.5, 3.0)))
        chain = [v, w, x, y]
        bn = op_norm(y.block())
        if bn > 1e-6:
            gamma = min(2.5, 0.85 / bn)
            if gamma > 1.05:
                chain.append(be_amplify(y, gamma, 0.1, 1e-6))
        for enc in chain:
            worst_claim = max(worst_claim, claim_gap(enc))
            worst_unit = max(worst_unit, enc.unitarity_defect())
    assert worst_claim <= 1e-9
    assert worst_unit <= 1e-10
    return (
        f"200 combinator chains: worst claim slack {worst_claim:.2e} <= 1e-09, "
        f"worst unitarity defect {worst_unit:.2e} <= 1e-10"
    )
