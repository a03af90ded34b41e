"""Named verification suites: each returns a list of checks with value, threshold and verdict.

Deterministic checks pass when ``value < threshold``; statistical checks
(p-values) pass when ``value > threshold``. A ``tol`` override replaces the
threshold of every deterministic check in a suite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats

from . import bridge as br
from . import mixture as mx
from . import mpa
from .models import exploration, harmonic, queue, ring, tasep, two_lines
from .oracle import (all_words, empirical, enumerate_measure, enumerate_mixture, max_abs_diff, random_mixture,
                     random_spec, stationarity_residual, total_variation)
from .spectral import perron

SEED = 20240531


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    below: bool = True

    @property
    def passed(self) -> bool:
        return self.value < self.threshold if self.below else self.value > self.threshold

    def line(self) -> str:
        rel = "<" if self.below else ">"
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.value:.3e} {rel} {self.threshold:.1e}"


def _tol(default: float, tol: float | None) -> float:
    return default if tol is None else tol


def random_specs(count: int = 50, seed: int = SEED):
    """Seeded specs with ``|A| <= 3``, ``|B| <= 4``, ``N <= 5``."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        A, B, N = (int(v) for v in (rng.integers(1, 4), rng.integers(1, 5), rng.integers(1, 6)))
        out.append(random_spec(rng, A, B, N))
    return out


def chi2_pvalue(counts, probs, min_expected: float = 5.0) -> float:
    """Pearson test with cells of small expected count pooled into one."""
    counts = np.asarray(counts, dtype=float)
    probs = np.asarray(probs, dtype=float)
    n = counts.sum()
    exp = n * probs
    big = exp >= min_expected
    obs = np.append(counts[big], counts[~big].sum())
    ex = np.append(exp[big], exp[~big].sum())
    keep = ex > 0
    obs, ex = obs[keep], ex[keep]
    ex *= obs.sum() / ex.sum()
    return float(stats.chisquare(obs, ex).pvalue)


def suite_roundtrip(tol=None):
    worst = max(max_abs_diff(enumerate_measure(s), enumerate_mixture(mx.decompose(s))) for s in random_specs())
    return [Check("measure vs decomposed mixture, 50 random specs", worst, _tol(1e-10, tol))]


def suite_znrelation(tol=None):
    worst = max(mx.znrelation_check(s, mx.decompose(s)) for s in random_specs())
    return [Check("g^T P^N f against Z_N / lambda^N, 50 random specs", worst, _tol(1e-10, tol))]


def suite_doob(tol=None):
    rows, resid = 0.0, 0.0
    for s in random_specs():
        pair = perron(s.M)
        resid = max(resid, float(np.abs(s.M @ pair.evec - pair.lam * pair.evec).max() / pair.lam))
        rows = max(rows, float(np.abs(mx.decompose(s).bridge.P.sum(axis=1) - 1).max()))
    cf = tasep.closed_form_residuals(0.7, 0.8)
    return [
        Check("row sums of P", rows, _tol(1e-12, tol)),
        Check("Perron residual |Me - lam e|/lam", resid, _tol(1e-12, tol)),
        Check("bidiagonal closed-form pair on interior rows", cf["case1"], _tol(1e-9, tol)),
        Check("geometric closed-form pair", cf["general"], _tol(1e-9, tol)),
    ]


def suite_stationarity(tol=None):
    out = []
    for a, b in ((0.7, 0.8), (0.3, 0.4)):
        for N in (3, 4):
            p = tasep.TasepParams(a, b, N)
            L = tasep.tasep_generator(N, a, b)
            dg = enumerate_measure(tasep.tasep_general_mpa(p))
            out.append(Check(f"open TASEP general a={a} b={b} N={N}", stationarity_residual(dg, L), _tol(1e-8, tol)))
            if (a, b) == (0.7, 0.8):
                d1 = enumerate_measure(tasep.tasep_case1_mpa(p))
                out.append(Check(f"open TASEP bidiagonal N={N}", stationarity_residual(d1, L), _tol(1e-8, tol)))
                out.append(Check(f"representations agree N={N}", max_abs_diff(d1, dg), _tol(1e-9, tol)))
    out += suite_ring(tol)
    return out


def sector_leak(L, N: int) -> float:
    """Largest rate between words with different particle numbers."""
    words = all_words(N, 3)
    key = (words == 1).sum(axis=1) * (N + 1) + (words == 2).sum(axis=1)
    coo = L.rates.tocoo()
    leak = key[coo.row] != key[coo.col]
    return float(np.abs(coo.data[leak]).max()) if leak.any() else 0.0


def suite_ring(tol=None):
    out = []
    L = ring.ring_generator(4)
    for n1, n2 in ((1, 1), (2, 1)):
        rp = ring.RingParams(4, n1, n2)
        c = ring.ring_canonical(rp)
        out.append(Check(f"ring N=4 n1={n1} n2={n2} stationarity", stationarity_residual(c, L), _tol(1e-10, tol)))
        out.append(Check(f"ring N=4 n1={n1} n2={n2} vs trace", max_abs_diff(c, ring.ring_trace_canonical(rp)),
                         _tol(1e-10, tol)))
    out.append(Check("ring generator sector leak", sector_leak(L, 4), _tol(1e-300, tol)))
    return out


def suite_two_lines(tol=None):
    out = []
    for N in range(1, 7):
        p = tasep.TasepParams(0.7, 0.8, N)
        d = max_abs_diff(two_lines.two_lines_enumerate(p), enumerate_measure(tasep.tasep_case1_mpa(p)))
        z = abs(two_lines.two_lines_partition(p) / two_lines.predicted_partition(p) - 1)
        out.append(Check(f"two-lines marginal N={N}", d, _tol(1e-10, tol)))
        out.append(Check(f"two-lines normalizer N={N}", z, _tol(1e-10, tol)))
    return out


def suite_queue(tol=None, n: int = 100_000, seed: int = SEED):
    rp = ring.RingParams(5, 1, 2)
    c = ring.ring_canonical(rp)
    w = queue.queue_sample(rp, n, np.random.default_rng(seed))
    return [
        Check("queue enumeration vs ring measure", max_abs_diff(queue.queue_enumerate(rp), c), _tol(1e-10, tol)),
        Check("queue sampler total variation", total_variation(empirical(w, 5, 3), c), 0.02),
    ]


def suite_correlation(tol=None, seed: int = SEED):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        A, B, N = int(rng.integers(2, 4)), int(rng.integers(1, 5)), int(rng.integers(2, 5))
        mix = random_mixture(rng, A, B, N)
        d = enumerate_mixture(mix)
        for i, j in itertools.product(range(N), repeat=2):
            worst = max(worst, abs(mx.correlation(mix, i, j) - d.moment(i, j)))
    return [Check("pair correlations vs enumeration, 20 random mixtures", worst, _tol(1e-10, tol))]


def suite_harmonic(tol=None, n: int = 100_000, seed: int = SEED):
    rng = np.random.default_rng(seed)
    p1 = harmonic.HarmonicParams(0.5, 2.0, 1)
    q = abs(harmonic.harmonic_exact_small(p1, [0]) - harmonic.one_site_empty_probability(p1))
    p2 = harmonic.HarmonicParams(0.5, 2.0, 2)
    tab = harmonic.harmonic_table(p2)
    K = tab.alphabet_size
    w = np.minimum(harmonic.harmonic_sample(p2, n, rng), K - 1)
    tv = total_variation(empirical(w, 2, K), tab)
    za = harmonic.harmonic_bridge_sample(harmonic.HarmonicParams(0.5, 2.0, 3, 1.0), n, rng, "exponential")
    zb = harmonic.harmonic_bridge_sample(harmonic.HarmonicParams(0.5, 2.0, 3, 5.0), n, rng, "exponential")
    pv = min(stats.ks_2samp(za[:, k], zb[:, k]).pvalue for k in range(1, 4))
    return [
        Check("one-site closed form vs quadrature", q, _tol(1e-10, tol)),
        Check("two-site sampler total variation", tv, 0.02),
        Check("bridge law independent of lambda (KS p)", pv, 1e-3, below=False),
    ]


def suite_samplers(tol=None, n: int = 100_000, seed: int = SEED):
    rng = np.random.default_rng(seed)
    mix = random_mixture(rng, 2, 3, 3, zero_frac=0.0)
    words, paths = mx.sample_configurations(mix, n, rng)
    word_p = chi2_pvalue(empirical(words, 3, 2).table * n, enumerate_mixture(mix).table)
    law = np.array([br.path_probability(mix.bridge, z, mix.table) for z in all_words(4, 3)])
    path_p = chi2_pvalue(empirical(paths, 4, 3).table * n, law)
    walk = exploration.exploration_walk(0.4, n, rng)
    counts = exploration.transition_counts(walk, 8)[:3]
    P = tasep.general_P(0.4, 40)[:3, :8]
    walk_p = min(chi2_pvalue(counts[b], P[b] / P[b].sum()) for b in range(3))
    return [
        Check("bridge sampler chi-square p", path_p, 1e-3, below=False),
        Check("mixture sampler chi-square p", word_p, 1e-3, below=False),
        Check("exploration walk chi-square p", walk_p, 1e-3, below=False),
    ]


def factorization_gap(spec) -> float:
    """Largest violation of ``P(left, right) = P(left) P(right)`` with one site between them."""
    N = spec.N
    d = enumerate_measure(spec)
    A = spec.alphabet_size
    words = all_words(N, A)
    worst = 0.0
    for j in range(1, N - 1):
        for w in words[words[:, j] == 0]:
            joint = sum(d.prob(np.concatenate([w[:j], [a], w[j + 1:]])) for a in range(A))
            left = mpa.cylinder_probability(spec, 0, w[:j])
            right = mpa.cylinder_probability(spec, j + 1, w[j + 1:])
            worst = max(worst, abs(joint - left * right))
    return worst


def suite_specials(tol=None, seed: int = SEED):
    rng = np.random.default_rng(seed)
    gap = 0.0
    for N in range(3, 6):
        q = rng.random(3) + 0.1
        probs = rng.random((3, 3, 2)) + 0.05
        probs /= probs.sum(axis=2, keepdims=True)
        gap = max(gap, factorization_gap(mx.one_dependent_spec(q, probs, N)))
    spread = 0.0
    for _ in range(5):
        P = rng.random((3, 3)) + 0.05
        P /= P.sum(axis=1, keepdims=True)
        bridge = mx.stationary_bridge(P, 6)
        probs = rng.random((3, 3, 2)) + 0.05
        probs /= probs.sum(axis=2, keepdims=True)
        m = mx.MixtureSpec(bridge, mx.MarginalKernel(probs, np.ones((3, 3), bool)))
        means = [mx.site_mean(m, i) for i in range(m.N)]
        spread = max(spread, max(means) - min(means))
    return [
        Check("one-dependent factorization", gap, _tol(1e-12, tol)),
        Check("stationary bridge one-point spread", spread, _tol(1e-12, tol)),
    ]


SUITES: dict[str, Callable] = {
    "roundtrip": suite_roundtrip,
    "znrelation": suite_znrelation,
    "doob": suite_doob,
    "stationarity": suite_stationarity,
    "ring": suite_ring,
    "two-lines": suite_two_lines,
    "queue": suite_queue,
    "correlation": suite_correlation,
    "harmonic": suite_harmonic,
    "samplers": suite_samplers,
    "specials": suite_specials,
}


def run(name: str, tol: float | None = None) -> list[Check]:
    if name == "all":
        return [c for fn in SUITES.values() for c in fn(tol)]
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](tol)
