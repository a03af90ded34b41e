"""Acceptance criteria 1-11.

Each test prints one ``PASS``/``FAIL`` line with the measured value and the
threshold, then asserts. Run with ``pytest tests/test_acceptance.py -s`` to
see the lines.
"""

import itertools
import time

import numpy as np
from scipy import stats

from mpabridge import bridge as br
from mpabridge import mixture as mx
from mpabridge import mpa
from mpabridge.models import harmonic, queue, ring, tasep, two_lines
from mpabridge.oracle import (all_words, empirical, enumerate_measure, enumerate_mixture, max_abs_diff,
                              random_mixture, random_spec, stationarity_residual, total_variation)
from mpabridge.spectral import perron
from mpabridge.verify import chi2_pvalue, sector_leak

SEED = 20240531


def report(number, title, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'}  criterion {number}: {title} [{detail}]", flush=True)
    assert ok, f"criterion {number}: {title} [{detail}]"


def fifty_specs():
    rng = np.random.default_rng(SEED)
    specs = []
    for _ in range(50):
        A, B, N = int(rng.integers(1, 4)), int(rng.integers(1, 5)), int(rng.integers(1, 6))
        specs.append(random_spec(rng, A, B, N))
    return specs


def test_criterion_01_round_trip():
    t0 = time.perf_counter()
    worst = 0.0
    for spec in fifty_specs():
        worst = max(worst, max_abs_diff(enumerate_measure(spec), enumerate_mixture(mx.decompose(spec))))
    elapsed = time.perf_counter() - t0
    report(1, "measure equals decomposed mixture on 50 random specs", worst < 1e-10 and elapsed < 30,
           f"max diff {worst:.2e} < 1e-10, {elapsed:.2f}s < 30s")


def test_criterion_02_normalizer_relation():
    worst = 0.0
    for spec in fifty_specs():
        mix = mx.decompose(spec)
        ZN = mpa.partition_function(spec)
        PN = np.linalg.matrix_power(mix.bridge.P, spec.N)
        lhs = mix.bridge.g @ PN @ mix.bridge.f
        target = ZN / mix.lam**spec.N
        worst = max(worst, abs(lhs - target) / target)
    report(2, "g^T P^N f equals Z_N / lambda^N", worst < 1e-10, f"max rel err {worst:.2e} < 1e-10")


def test_criterion_03_doob_and_perron():
    rows, resid = 0.0, 0.0
    for spec in fifty_specs():
        pair = perron(spec.M)
        resid = max(resid, float(np.abs(spec.M @ pair.evec - pair.lam * pair.evec).max() / pair.lam))
        rows = max(rows, float(np.abs(mx.decompose(spec).bridge.P.sum(axis=1) - 1).max()))
    size = 200
    M1 = tasep.case1_matrices(size).sum(axis=0)
    e1 = np.arange(1.0, size + 1)
    cf1 = float(np.abs(M1 @ e1 - 4 * e1)[:-1].max() / 4)
    cf2 = 0.0
    for beta in (0.3, 0.5, 0.8):
        Mg = tasep.general_matrices(beta, size).sum(axis=0)
        eg = beta ** np.arange(size, dtype=float)
        lam = 1 / (beta * (1 - beta))
        cf2 = max(cf2, float(np.abs(Mg @ eg - lam * eg)[: size // 2].max() / lam))
    ok = rows < 1e-12 and resid < 1e-12 and cf1 < 1e-9 and cf2 < 1e-9
    report(3, "stochastic P, Perron residual, closed-form eigenpairs", ok,
           f"rows {rows:.2e} < 1e-12, residual {resid:.2e} < 1e-12, "
           f"bidiagonal {cf1:.2e} < 1e-9, geometric {cf2:.2e} < 1e-9")


def test_criterion_04_open_tasep_stationarity():
    t0 = time.perf_counter()
    gen, bid, agree = 0.0, 0.0, 0.0
    for alpha, beta in ((0.7, 0.8), (0.3, 0.4)):
        for N in (3, 4):
            p = tasep.TasepParams(alpha, beta, N)
            L = tasep.tasep_generator(N, alpha, beta)
            dg = enumerate_measure(tasep.tasep_general_mpa(p))
            gen = max(gen, stationarity_residual(dg, L))
            if (alpha, beta) == (0.7, 0.8):
                d1 = enumerate_measure(tasep.tasep_case1_mpa(p))
                bid = max(bid, stationarity_residual(d1, L))
                agree = max(agree, max_abs_diff(d1, dg))
    elapsed = time.perf_counter() - t0
    ok = gen < 1e-8 and bid < 1e-8 and agree < 1e-9 and elapsed < 10
    report(4, "open TASEP measures are stationary", ok,
           f"general {gen:.2e} < 1e-8, bidiagonal {bid:.2e} < 1e-8, agreement {agree:.2e} < 1e-9, "
           f"{elapsed:.2f}s < 10s")


def test_criterion_05_ring_stationarity():
    L = ring.ring_generator(4)
    worst = 0.0
    for n1, n2 in ((1, 1), (2, 1)):
        worst = max(worst, stationarity_residual(ring.ring_canonical(ring.RingParams(4, n1, n2)), L))
    leak = sector_leak(L, 4)
    report(5, "two-class ring measure is stationary", worst < 1e-10 and leak == 0,
           f"residual {worst:.2e} < 1e-10, sector leak {leak:g} == 0")


def test_criterion_06_two_lines():
    marg, norm = 0.0, 0.0
    for N in range(1, 7):
        p = tasep.TasepParams(0.7, 0.8, N)
        marg = max(marg, max_abs_diff(two_lines.two_lines_enumerate(p), enumerate_measure(tasep.tasep_case1_mpa(p))))
        mix = tasep.tasep_case1_mixture(p)
        gPf = mix.bridge.g @ np.linalg.matrix_power(mix.bridge.P, N) @ mix.bridge.f
        predicted = gPf * (0.7 + 0.8 - 1) / (0.7 * 0.8)
        norm = max(norm, abs(two_lines.two_lines_partition(p) / predicted - 1))
    report(6, "two-lines marginal and normalizer", marg < 1e-10 and norm < 1e-10,
           f"marginal {marg:.2e} < 1e-10, normalizer {norm:.2e} < 1e-10")


def test_criterion_07_queue():
    p = ring.RingParams(5, 1, 2)
    target = ring.ring_canonical(p)
    exact = max_abs_diff(queue.queue_enumerate(p), target)
    w = queue.queue_sample(p, 100_000, np.random.default_rng(SEED))
    tv = total_variation(empirical(w, 5, 3), target)
    report(7, "queue construction gives the ring measure", exact < 1e-10 and tv < 0.02,
           f"enumeration {exact:.2e} < 1e-10, sampler TV {tv:.4f} < 0.02")


def test_criterion_08_correlations():
    rng = np.random.default_rng(SEED)
    worst = 0.0
    for _ in range(20):
        A, B, N = int(rng.integers(2, 4)), int(rng.integers(1, 5)), int(rng.integers(2, 5))
        mix = random_mixture(rng, A, B, N)
        d = enumerate_mixture(mix)
        words = d.words()
        for i, j in itertools.product(range(N), repeat=2):
            moment = float((d.table * words[:, i] * words[:, j]).sum())
            worst = max(worst, abs(mx.correlation(mix, i, j) - moment))
    report(8, "pair correlations from the hidden bridge", worst < 1e-10, f"max diff {worst:.2e} < 1e-10")


def test_criterion_09_harmonic():
    rng = np.random.default_rng(SEED)
    p1 = harmonic.HarmonicParams(0.5, 2.0, 1)
    closed = np.log(3.0 / 1.5) / 1.5
    q = abs(harmonic.harmonic_exact_small(p1, [0]) - closed)
    p2 = harmonic.HarmonicParams(0.5, 2.0, 2)
    tab = harmonic.harmonic_table(p2)
    K = tab.alphabet_size
    w = np.minimum(harmonic.harmonic_sample(p2, 100_000, rng), K - 1)
    tv = total_variation(empirical(w, 2, K), tab)
    za = harmonic.harmonic_bridge_sample(harmonic.HarmonicParams(0.5, 2.0, 3, 1.0), 100_000, rng, "exponential")
    zb = harmonic.harmonic_bridge_sample(harmonic.HarmonicParams(0.5, 2.0, 3, 5.0), 100_000, rng, "exponential")
    pv = min(stats.ks_2samp(za[:, k], zb[:, k]).pvalue for k in (1, 2, 3))
    report(9, "harmonic model", q < 1e-10 and tv < 0.02 and pv > 1e-3,
           f"one-site {q:.2e} < 1e-10, two-site TV {tv:.4f} < 0.02, KS p {pv:.3f} > 0.001")


def test_criterion_10_samplers():
    rng = np.random.default_rng(SEED)
    n = 100_000
    mix = random_mixture(rng, 2, 3, 3, zero_frac=0.0)
    words, paths = mx.sample_configurations(mix, n, rng)
    word_law = enumerate_mixture(mix).table
    path_law = np.array([br.path_probability(mix.bridge, z, mix.table) for z in all_words(4, 3)])
    p_words = chi2_pvalue(np.bincount(words @ [4, 2, 1], minlength=8), word_law)
    p_paths = chi2_pvalue(np.bincount(paths @ [27, 9, 3, 1], minlength=81), path_law)
    report(10, "bridge and mixture samplers", p_paths > 1e-3 and p_words > 1e-3,
           f"bridge chi2 p {p_paths:.3f} > 0.001, mixture chi2 p {p_words:.3f} > 0.001")


def test_criterion_11_special_cases():
    rng = np.random.default_rng(SEED)
    gap = 0.0
    for N in range(3, 6):
        q = rng.random(3) + 0.1
        probs = rng.random((3, 3, 2)) + 0.05
        probs /= probs.sum(axis=2, keepdims=True)
        spec = mx.one_dependent_spec(q, probs, N)
        d = enumerate_measure(spec)
        words = d.words()
        for j in range(1, N - 1):
            for left in itertools.product(range(2), repeat=j):
                for right in itertools.product(range(2), repeat=N - j - 1):
                    sel = np.all(words[:, :j] == left, axis=1) & np.all(words[:, j + 1:] == right, axis=1)
                    pl = d.table[np.all(words[:, :j] == left, axis=1)].sum()
                    pr = d.table[np.all(words[:, j + 1:] == right, axis=1)].sum()
                    gap = max(gap, abs(d.table[sel].sum() - pl * pr))
    spread = 0.0
    for _ in range(5):
        P = rng.random((3, 3)) + 0.05
        P /= P.sum(axis=1, keepdims=True)
        probs = rng.random((3, 3, 2)) + 0.05
        probs /= probs.sum(axis=2, keepdims=True)
        m = mx.MixtureSpec(mx.stationary_bridge(P, 6), mx.MarginalKernel(probs, np.ones((3, 3), bool)))
        d = enumerate_mixture(m)
        one_point = [d.site_marginal(i)[1] for i in range(m.N)]
        spread = max(spread, max(one_point) - min(one_point))
    report(11, "one-dependent and stationary special cases", gap < 1e-12 and spread < 1e-12,
           f"factorization {gap:.2e} < 1e-12, one-point spread {spread:.2e} < 1e-12")
