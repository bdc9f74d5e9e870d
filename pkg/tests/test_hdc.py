import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhdc import hdc
from qhdc.errors import InvalidArgumentError, InvalidDimensionError, UndefinedSimilarityError


def bipolar(dim):
    return st.lists(st.sampled_from([-1, 1]), min_size=dim, max_size=dim).map(np.array)


def test_random_hypervector_is_reproducible():
    assert np.array_equal(hdc.random_hypervector(4, 7), hdc.random_hypervector(4, 7))
    assert set(hdc.random_hypervector(2, 3)) <= {-1, 1}


def test_random_hypervector_rejects_small_dim():
    with pytest.raises(InvalidDimensionError):
        hdc.random_hypervector(1, 0)


def test_independent_seeds_are_quasi_orthogonal():
    worst = max(
        abs(hdc.cosine(hdc.random_hypervector(10_000, 2 * s), hdc.random_hypervector(10_000, 2 * s + 1)))
        for s in range(100)
    )
    assert worst < 0.05


def test_bind_examples():
    a = np.array([1, -1, 1, -1])
    assert list(hdc.bind(a, [1, 1, -1, -1])) == [1, -1, -1, 1]
    assert list(hdc.bind(a, a)) == [1, 1, 1, 1]
    assert list(hdc.bind(a, np.ones(4, dtype=int))) == list(a)
    with pytest.raises(InvalidArgumentError):
        hdc.bind(a, [1, 1])


def test_bind_exhaustive_small():
    vs = [np.array(v) for v in itertools.product([-1, 1], repeat=4)]
    for a, b in itertools.product(vs, vs):
        ab = hdc.bind(a, b)
        assert np.array_equal(hdc.bind(ab, b), a)
        assert np.array_equal(ab, hdc.bind(b, a))


def test_bundle_examples():
    v = np.array([1, -1, -1, 1])
    assert list(hdc.bundle([v])) == list(v)
    assert not hdc.bundle([v, -v]).any()
    assert list(hdc.bundle([[1, 1, 1, 1], [1, 1, -1, -1]])) == [2, 2, 0, 0]
    with pytest.raises(InvalidArgumentError):
        hdc.bundle([])


def test_sign_normalize_examples():
    assert list(hdc.sign_normalize([2, 2, 0, 0])) == [1, 1, 1, 1]
    assert list(hdc.sign_normalize([-3, 1, 0, -1])) == [-1, 1, 1, -1]
    assert list(hdc.sign_normalize([0, 0, 0, 0])) == [1, 1, 1, 1]


def test_permute_examples():
    v = np.array([10, 20, 30, 40])
    assert list(hdc.permute(v, 0)) == list(v)
    assert list(hdc.permute(v, 1)) == [40, 10, 20, 30]
    for s in range(5):
        assert np.array_equal(hdc.permute(hdc.permute(v, s), 4 - s), v)


def test_cosine_examples():
    v = hdc.random_hypervector(64, 1)
    assert hdc.cosine(v, v) == pytest.approx(1.0)
    assert hdc.cosine(v, -v) == pytest.approx(-1.0)
    assert hdc.cosine([1, 1, -1, -1], [1, -1, -1, 1]) == 0.0
    with pytest.raises(UndefinedSimilarityError):
        hdc.cosine([0, 0], [1, 1])


@settings(max_examples=60, deadline=None)
@given(bipolar(8), bipolar(8), bipolar(8))
def test_bind_distributes_over_bundle(a, b, c):
    assert np.array_equal(hdc.bind(a, hdc.bundle([b, c])), hdc.bundle([hdc.bind(a, b), hdc.bind(a, c)]))


@settings(max_examples=60, deadline=None)
@given(bipolar(8), st.integers(-20, 20))
def test_permute_places_entry_at_shifted_index(v, s):
    w = hdc.permute(v, s)
    for i in range(8):
        assert w[(i + s) % 8] == v[i]


@settings(max_examples=60, deadline=None)
@given(bipolar(16), bipolar(16), st.floats(0.1, 50.0))
def test_cosine_is_scale_invariant(a, b, k):
    assert hdc.cosine(k * a, b) == pytest.approx(hdc.cosine(a, b), abs=1e-12)


def test_retrain_unchanged_when_correct():
    P = np.array([[1, 1, 1, 1], [1, -1, 1, -1]])
    S = P.copy()
    out, errors = hdc.retrain_epoch(P, S, [0, 1])
    assert errors == 0 and np.array_equal(out, P)


def test_retrain_single_mistake_moves_two_prototypes():
    P = np.array([[1, 1, 1, 1], [1, -1, 1, -1]])
    s = np.array([1, 1, 1, -1])  # nearer prototype 0, labelled 1
    out, errors = hdc.retrain_epoch(P, s[None, :], [1])
    assert errors == 1
    assert np.array_equal(out[0], P[0] - s)
    assert np.array_equal(out[1], P[1] + s)


def test_retrain_reaches_zero_on_separable_toy_set():
    a = np.array([1, 1, 1, 1, 1, 1, 1, 1])
    b = np.array([1, -1, 1, -1, 1, -1, 1, -1])
    samples = np.array([a, b, a, b])
    labels = [0, 1, 0, 1]
    start = np.array([a + 2 * b, a + b])  # b starts nearer the wrong class
    P, history = hdc.retrain(start, samples, labels, epochs=10)
    assert history[0] > 0 and history[-1] == 0
    assert hdc.training_errors(P, samples, labels) == 0


def test_retrain_keep_best_never_worse_than_start():
    g = np.random.default_rng(3)
    samples = g.choice([-1, 1], size=(40, 32))
    labels = g.integers(0, 2, size=40)
    start = np.stack([samples[labels == k].sum(axis=0) for k in (0, 1)])
    before = hdc.training_errors(start, samples, labels)
    P, _ = hdc.retrain(start, samples, labels, epochs=6, keep_best=True)
    assert hdc.training_errors(P, samples, labels) <= before


def test_retrain_rejects_empty():
    with pytest.raises(InvalidArgumentError):
        hdc.retrain_epoch(np.ones((2, 4)), np.zeros((0, 4)), [])


def test_codebook_round_trip_and_prefix_stability():
    cb = hdc.Codebook.generate(["a", "b"], 32, 5)
    longer = hdc.Codebook.generate(["a", "b", "c"], 32, 5)
    assert np.array_equal(cb["b"], longer["b"])
    again = hdc.Codebook.from_dict(cb.to_dict())
    assert all(np.array_equal(cb[k], again[k]) for k in cb.names)
    with pytest.raises(InvalidArgumentError):
        hdc.Codebook.generate(["a", "a"], 8, 0)
