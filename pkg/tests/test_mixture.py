import itertools

import numpy as np
import pytest

from mpabridge import bridge as br
from mpabridge import mixture as mx
from mpabridge import mpa
from mpabridge.errors import IndexOutOfRange, NotIrreducible
from mpabridge.oracle import all_words, enumerate_measure, enumerate_mixture, max_abs_diff, random_mixture, random_spec


def test_decompose_round_trip(rng):
    for _ in range(20):
        A, B, N = (int(v) for v in rng.integers(1, [4, 5, 6], endpoint=True))
        spec = random_spec(rng, A, B, N)
        mix = mx.decompose(spec)
        assert max_abs_diff(enumerate_measure(spec), enumerate_mixture(mix)) < 1e-10
        assert mx.znrelation_check(spec, mix) < 1e-10
        np.testing.assert_allclose(mix.bridge.P.sum(axis=1), 1, atol=1e-12)


def test_transfer_contraction_matches_path_sum(rng):
    mix = random_mixture(rng, 2, 3, 3)
    oracle = enumerate_mixture(mix)
    for w in all_words(3, 2):
        assert mx.mixture_probability(mix, w) == pytest.approx(oracle.prob(w), abs=1e-14)


def test_doob_entries():
    M = np.array([[2.0, 1.0], [1.0, 2.0]])
    spec = mpa.MpaSpec([M / 2, M / 2], 3, x=[1.0, 0.0], y=[0.0, 1.0])
    mix = mx.decompose(spec)
    assert mix.lam == pytest.approx(3, abs=1e-12)
    np.testing.assert_allclose(mix.bridge.P, M / 3, atol=1e-12)
    np.testing.assert_allclose(mix.bridge.f, [2.0, 0.0], atol=1e-10)
    np.testing.assert_allclose(mix.bridge.g, [0.0, 0.5], atol=1e-10)


def test_kernel_from_matrices():
    mats = np.array([[[1.0, 0.0], [2.0, 0.0]], [[1.0, 3.0], [0.0, 0.0]]])
    k = mx.kernel_from_matrices(mats)
    np.testing.assert_allclose(k.probs[0, 0], [0.5, 0.5])
    np.testing.assert_allclose(k.probs[0, 1], [0.0, 1.0])
    np.testing.assert_allclose(k.probs[1, 0], [1.0, 0.0])
    assert not k.reachable[1, 1]


def test_coupling_marginals(rng):
    mix = random_mixture(rng, 2, 2, 3, zero_frac=0.0)
    spec = mpa.from_mixture(mix)
    paths = list(itertools.product(range(2), repeat=4))
    tot = 0.0
    for w in all_words(3, 2):
        row = [mx.coupling_probability(mix, w, z) for z in paths]
        assert sum(row) == pytest.approx(mx.mixture_probability(mix, w), abs=1e-14)
        for z, v in zip(paths, row):
            assert v == pytest.approx(mpa.coupling_probability(spec, w, z), abs=1e-14)
        tot += sum(row)
    assert tot == pytest.approx(1.0, abs=1e-13)


def test_site_mean_and_correlation(rng):
    for _ in range(10):
        mix = random_mixture(rng, 3, 3, 4)
        d = enumerate_mixture(mix)
        for i in range(4):
            assert mx.site_mean(mix, i) == pytest.approx(d.site_marginal(i) @ np.arange(3), abs=1e-12)
            for j in range(4):
                assert mx.correlation(mix, i, j) == pytest.approx(d.moment(i, j), abs=1e-12)
    with pytest.raises(IndexOutOfRange):
        mx.site_mean(mix, 4)


def test_canonical_form_invariances(rng):
    spec = random_spec(rng, 2, 3, 4, zero_frac=0.0)
    base = mx.canonicalize(spec)
    scaled = mpa.MpaSpec(7 * spec.matrices, 4, x=3 * spec.x, y=spec.y)
    assert base.distance(mx.canonicalize(scaled)) < 1e-10
    D = np.diag([1.0, 2.5, 0.3])
    Di = np.linalg.inv(D)
    sim = mpa.MpaSpec(D @ spec.matrices @ Di, 4, x=D @ spec.x, y=Di @ spec.y)
    assert base.distance(mx.canonicalize(sim)) < 1e-10


def test_constant_word_spec_not_irreducible():
    with pytest.raises(NotIrreducible):
        mpa.MpaSpec([np.eye(3)], 4, x=np.ones(3), y=np.ones(3))


def test_stationary_bridge():
    P = np.array([[0.9, 0.1], [0.2, 0.8]])
    b = mx.stationary_bridge(P, 5)
    np.testing.assert_allclose(b.g, [2 / 3, 1 / 3], atol=1e-12)
    probs = np.array([[[1.0, 0.0], [0.5, 0.5]], [[0.2, 0.8], [0.0, 1.0]]])
    m = mx.MixtureSpec(b, mx.MarginalKernel(probs, np.ones((2, 2), bool)))
    means = [mx.site_mean(m, i) for i in range(m.N)]
    assert max(means) - min(means) < 1e-12


def test_one_dependent(rng):
    q = rng.random(3) + 0.1
    probs = rng.random((3, 3, 2)) + 0.05
    probs /= probs.sum(axis=2, keepdims=True)
    spec = mx.one_dependent_spec(q, probs, 4)
    d = enumerate_measure(spec)
    for a, b in itertools.product(range(2), repeat=2):
        joint = sum(d.prob([a, c, b, e]) for c in range(2) for e in range(2))
        left = mpa.cylinder_probability(spec, 0, [a])
        right = mpa.cylinder_probability(spec, 2, [b])
        assert joint == pytest.approx(left * right, abs=1e-13)


def test_mixture_json(tmp_path, rng):
    mix = random_mixture(rng, 2, 3, 3)
    mx.dump(mix, tmp_path / "m.json")
    back = mx.load(tmp_path / "m.json")
    assert max_abs_diff(enumerate_mixture(back), enumerate_mixture(mix)) == 0
    assert back.lam == mix.lam


def test_sampler_matches_enumeration(rng):
    mix = random_mixture(rng, 2, 3, 3, zero_frac=0.0)
    words, paths = mx.sample_configurations(mix, 50_000, rng)
    assert words.shape == (50_000, 3) and paths.shape == (50_000, 4)
    freq = np.bincount(words @ [4, 2, 1], minlength=8) / len(words)
    assert np.abs(freq - enumerate_mixture(mix).table).max() < 0.01


def test_canonical_form_separates_kernels(rng):
    spec = random_spec(rng, 2, 3, 4, zero_frac=0.0)
    mats = spec.matrices.copy()
    # move 0.1 of the letter mass on one hidden step from letter 0 to letter 1
    M01 = mats[:, 0, 1].sum()
    shift = min(0.1 * M01, mats[0, 0, 1])
    mats[0, 0, 1] -= shift
    mats[1, 0, 1] += shift
    other = mpa.MpaSpec(mats, 4, x=spec.x, y=spec.y)
    assert mx.canonicalize(spec).distance(mx.canonicalize(other)) > 1e-3


def test_one_dependent_rows_equal(rng):
    q = rng.random(3) + 0.1
    probs = rng.random((3, 3, 2)) + 0.05
    probs /= probs.sum(axis=2, keepdims=True)
    P = mx.canonicalize(mx.one_dependent_spec(q, probs, 4)).P
    np.testing.assert_allclose(P, np.tile(q / q.sum(), (3, 1)), atol=1e-12)


def test_distinct_mixtures_same_measure():
    # fair coins: one hidden state flipping a coin, or two i.i.d. hidden states each copied to the letter
    N = 4
    single = mx.MixtureSpec(br.BridgeSpec([[1.0]], [1.0], [1.0], N + 1),
                            mx.MarginalKernel(np.full((1, 1, 2), 0.5), np.ones((1, 1), bool)))
    probs = np.zeros((2, 2, 2))
    probs[:, 0, 0] = probs[:, 1, 1] = 1.0
    copied = mx.MixtureSpec(br.BridgeSpec(np.full((2, 2), 0.5), [1.0, 1.0], [0.5, 0.5], N + 1),
                            mx.MarginalKernel(probs, np.ones((2, 2), bool)))
    assert max_abs_diff(enumerate_mixture(single), enumerate_mixture(copied)) < 1e-15
    np.testing.assert_allclose(enumerate_mixture(single).table, np.full(2**N, 2.0**-N), atol=1e-15)
