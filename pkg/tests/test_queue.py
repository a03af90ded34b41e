from itertools import combinations

import numpy as np
import pytest

from mpabridge.errors import InvalidCounts
from mpabridge.models import queue, ring
from mpabridge.oracle import empirical, max_abs_diff, total_variation


def all_instances(N, n1, n2):
    for S in combinations(range(N), n1 + n2):
        for A in combinations(range(N), n1):
            yield queue.QueueInstance(N, A, S)


def test_hand_instance():
    # the client at site 2 takes the service at site 1; site 0 stays unused
    inst = queue.QueueInstance(4, {2}, {0, 1})
    np.testing.assert_array_equal(queue.queue_word(inst), [2, 1, 0, 0])
    # a client on a service site serves itself
    inst = queue.QueueInstance(4, {1}, {1, 3})
    np.testing.assert_array_equal(queue.queue_word(inst), [0, 1, 0, 2])
    # wrapping around the ring: the client at 0 reaches back to site 3
    inst = queue.QueueInstance(4, {0}, {2, 3})
    np.testing.assert_array_equal(queue.queue_word(inst), [0, 0, 2, 1])


def test_lindley_profile_hand_value():
    A = np.array([0, 0, 1, 1, 0])
    S = np.array([1, 1, 0, 0, 1])
    np.testing.assert_array_equal(queue.lindley_queue(A, S), [0, 1, 2, 1, 0])


def test_matching_order_irrelevant(rng):
    for inst in all_instances(6, 2, 2):
        ref = queue.queue_word(inst)
        order = rng.permutation(sorted(inst.arrivals))
        np.testing.assert_array_equal(queue.queue_word(inst, order), ref)


@pytest.mark.parametrize("N,n1,n2", [(5, 1, 2), (6, 2, 1), (6, 0, 2), (7, 2, 2)])
def test_records_count_unused_services(N, n1, n2):
    for inst in all_instances(N, n1, n2):
        assert queue.record_sites(inst.A, inst.S).sum() == n2


@pytest.mark.parametrize("N,n1,n2", [(5, 1, 2), (6, 2, 2), (6, 3, 1)])
def test_queue_letters_match_greedy_matching(N, n1, n2):
    seen = 0
    for inst in all_instances(N, n1, n2):
        if queue.record_sites(inst.A, inst.S)[-1]:
            w, zeta = queue.anchored_word(inst)
            np.testing.assert_array_equal(w, queue.queue_word(inst))
            assert w[-1] == 2 and zeta[0] == 0
            seen += 1
    assert seen > 0


def test_anchor_must_be_record():
    inst = queue.QueueInstance(4, {2}, {0, 1})
    assert not queue.record_sites(inst.A, inst.S)[-1]
    with pytest.raises(InvalidCounts):
        queue.anchored_word(inst)


def test_no_first_class_gives_all_unused():
    for inst in all_instances(5, 0, 3):
        w = queue.queue_word(inst)
        np.testing.assert_array_equal(w, 2 * inst.S)


@pytest.mark.parametrize("N,n1,n2", [(4, 1, 1), (5, 1, 2), (5, 2, 1), (6, 2, 2), (7, 1, 3)])
def test_queue_enumeration_is_ring_measure(N, n1, n2):
    p = ring.RingParams(N, n1, n2)
    c = ring.ring_canonical(p)
    assert max_abs_diff(queue.queue_enumerate(p), c) < 1e-10
    anchored = c.condition(c.words()[:, -1] == 2)
    assert max_abs_diff(queue.queue_enumerate(p, anchored=True), anchored) < 1e-10


def test_iid_anchored_matches_constrained():
    for N in (4, 5):
        assert max_abs_diff(queue.iid_anchored_enumerate(N), ring.ring_constrained(N, N - 1)) < 1e-10


def test_batch_words_match_single(rng):
    N = 7
    A = np.zeros((200, N), np.int64)
    S = np.zeros((200, N), np.int64)
    for r in range(200):
        s = rng.choice(N, 4, replace=False)
        A[r, s[:2]] = 1
        S[r, rng.permutation(s)[:3]] = 1
    A *= 1 - (A.sum(axis=1, keepdims=True) >= S.sum(axis=1, keepdims=True))
    batch = queue.queue_words_batch(A, S)
    for r in range(200):
        inst = queue.QueueInstance(N, np.flatnonzero(A[r]), np.flatnonzero(S[r]))
        np.testing.assert_array_equal(batch[r], queue.queue_word(inst))


def test_sampler(rng):
    p = ring.RingParams(5, 1, 2)
    w = queue.queue_sample(p, 50_000, rng)
    assert total_variation(empirical(w, 5, 3), ring.ring_canonical(p)) < 0.02


def test_invalid_counts():
    with pytest.raises(InvalidCounts):
        queue.QueueInstance(4, {0, 1}, {2, 3})
    with pytest.raises(InvalidCounts):
        queue.QueueInstance(4, {5}, {2, 3})
