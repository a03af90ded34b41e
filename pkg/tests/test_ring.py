import numpy as np
import pytest

from mpabridge.errors import TooLarge
from mpabridge.models import ring
from mpabridge.oracle import (empirical, enumerate_measure, max_abs_diff, solve_stationary, stationarity_residual,
                              total_variation, word_index)
from mpabridge.verify import sector_leak


def test_two_site_rates():
    L = ring.ring_generator(2)
    for a, b, rate in [((1, 0), (0, 1), 1.0), ((1, 2), (2, 1), 1.0), ((2, 0), (0, 2), 1.0),
                       ((0, 1), (1, 0), 1.0), ((2, 1), (1, 2), 1.0)]:
        assert L.rate(word_index(a, 3), word_index(b, 3)) == rate
    assert L.rate(word_index((1, 1), 3), word_index((1, 1), 3)) == 0.0


def test_walk_and_kernel_entries():
    P = ring.ring_P(8)
    assert P[0, 0] == 0.75 and P[0, 1] == 0.25
    assert P[4, 3] == 0.25 and P[4, 4] == 0.5 and P[4, 5] == 0.25
    k = ring.ring_anchor_mixture(6).kernel.probs
    np.testing.assert_allclose(k[0, 0], [1 / 3, 1 / 3, 1 / 3])
    np.testing.assert_allclose(k[2, 3], [0, 1, 0])
    np.testing.assert_allclose(k[2, 1], [1, 0, 0])
    np.testing.assert_allclose(k[2, 2], [0.5, 0.5, 0])


@pytest.mark.parametrize("N,n1,n2", [(4, 1, 1), (4, 2, 1), (5, 1, 2), (5, 2, 2), (6, 2, 1), (6, 0, 3)])
def test_canonical_measure_is_stationary(N, n1, n2):
    p = ring.RingParams(N, n1, n2)
    c = ring.ring_canonical(p)
    L = ring.ring_generator(N)
    assert stationarity_residual(c, L) < 1e-10
    assert max_abs_diff(c, ring.ring_trace_canonical(p)) < 1e-10
    support = ring.sector_mask(N, n1, n2)
    np.testing.assert_allclose(c.table[support], solve_stationary(L, support)[support], atol=1e-10)


def test_generator_preserves_particle_numbers():
    assert sector_leak(ring.ring_generator(5), 5) == 0.0


def test_grand_measure_rotation_invariant():
    g = ring.ring_grand(5)
    words = g.words()
    rolled = np.array([word_index(np.roll(w, 1), 3) for w in words])
    np.testing.assert_allclose(g.table[rolled], g.table, atol=1e-15)
    assert g.table.sum() == pytest.approx(1.0, abs=1e-12)


def test_constrained_measure_pins_site():
    for j in range(4):
        d = ring.ring_constrained(4, j)
        assert d.site_marginal(j)[2] == pytest.approx(1.0, abs=1e-14)
    # rotating the anchor rotates the measure
    d0, d1 = ring.ring_constrained(4, 0), ring.ring_constrained(4, 1)
    rolled = np.array([word_index(np.roll(w, 1), 3) for w in d0.words()])
    np.testing.assert_allclose(d1.table[rolled], d0.table, atol=1e-15)


def test_anchored_mixture_matches_trace():
    N = 5
    trace = enumerate_measure(ring.ring_trace_spec(N)).table
    words = ring.ring_grand(N).words()
    sel = words[:, -1] == 2
    d = ring.ring_constrained(N, N - 1)
    np.testing.assert_allclose(d.table[sel], trace[sel] / trace[sel].sum(), atol=1e-12)


def test_grand_sampler(rng):
    w, paths, shifts = ring.ring_sample_grand(5, 60_000, rng, return_hidden=True)
    assert total_variation(empirical(w, 5, 3), ring.ring_grand(5)) < 0.03
    assert paths.shape == (60_000, 5) and np.all(paths[:, 0] == 0) and np.all(paths[:, -1] == 0)
    assert np.all(w[np.arange(len(w)), (4 + shifts) % 5] == 2)


def test_sector_sampler(rng):
    p = ring.RingParams(5, 1, 2)
    w = ring.ring_sample(p, 30_000, rng)
    assert np.all((w == 1).sum(axis=1) == 1) and np.all((w == 2).sum(axis=1) == 2)
    assert total_variation(empirical(w, 5, 3), ring.ring_canonical(p)) < 0.03


def test_limits():
    with pytest.raises(ValueError):
        ring.RingParams(4, 3, 2)
    with pytest.raises(ValueError):
        ring.RingParams(4, 1, 0)
    with pytest.raises(TooLarge):
        ring.ring_generator(9)


def test_ring_generator_rows_sum_to_zero():
    L = ring.ring_generator(3)
    np.testing.assert_allclose(np.asarray(L.rates.sum(axis=1)).ravel(), 0, atol=1e-15)


def test_anchored_chain_decomposes_to_anchor_mixture():
    from mpabridge.oracle import enumerate_mixture

    mix = ring.ring_anchored_decompose(6)
    assert mix.lam == 4.0
    np.testing.assert_array_equal(mix.bridge.P, ring.ring_P(mix.bridge.states))
    ref = enumerate_mixture(ring.ring_anchor_mixture(6))
    assert max_abs_diff(enumerate_measure(ring.ring_anchored_spec(6)), ref) < 1e-12
    assert max_abs_diff(enumerate_mixture(mix), ref) < 1e-12
    assert ring.ring_closed_form_residual() == 0.0
