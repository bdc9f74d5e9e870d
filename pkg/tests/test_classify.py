import json

import numpy as np
import pytest

from qhdc import hdc, ops, schemas
from qhdc.cli import envelope
from qhdc.errors import DegenerateVectorError, FormatError, InsufficientDataError, InvalidArgumentError
from qhdc.tasks import classify as C
from qhdc.tasks import data


@pytest.fixture(scope="module")
def synth_xy():
    return data.preprocess(data.synthetic_dataset(0, 60), seed=0)


@pytest.fixture(scope="module")
def clean_xy():
    return data.preprocess(data.synthetic_dataset(0, 60, noise=0.0), seed=0)


def brute_auc(positive, scores):
    pos = [s for s, t in zip(scores, positive) if t]
    neg = [s for s, t in zip(scores, positive) if not t]
    wins = sum(1.0 if p > n else 0.5 if p == n else 0.0 for p in pos for n in neg)
    return wins / (len(pos) * len(neg))


def test_all_zero_features_encode_to_shifted_level0():
    levels = C.level_codebook(64, 3)
    enc = C.encode_sample(np.zeros(16, dtype=int), levels)
    assert np.array_equal(enc, sum(hdc.permute(levels[0], p) for p in range(16)))


def test_one_pixel_difference_is_linear():
    levels = C.level_codebook(64, 3)
    x = np.random.default_rng(0).integers(0, 2, 16)
    for p in range(16):
        y = x.copy()
        y[p] = 1 - y[p]
        diff = C.encode_sample(y, levels) - C.encode_sample(x, levels)
        step = hdc.permute(levels[1], p) - hdc.permute(levels[0], p)
        assert np.array_equal(diff, step if y[p] else -step)


def test_encode_rejects_non_binary():
    with pytest.raises(InvalidArgumentError):
        C.encode_samples(np.full((1, 16), 2), C.level_codebook(16, 0))


@pytest.mark.parametrize("dim", [16, 128])
def test_feature_circuits_decode_exhaustively(dim):
    levels = C.level_codebook(dim, 0)
    for b in (0, 1):
        base = ops.encode(levels[b])
        for p in range(16):
            amps = ops.permute_circuit(base, p).state().amplitudes * np.sqrt(dim)
            assert np.allclose(amps, hdc.permute(levels[b], p), atol=1e-10)


def test_one_sample_per_class_prototypes():
    X = np.array([[1] * 16, [0] * 8 + [1] * 8])
    levels = C.level_codebook(256, 0)
    m = C.train(X, [3, 6], C.TrainConfig(dim=256, retrain_epochs=0))
    assert np.array_equal(m.prototypes, C.encode_samples(X, levels))


def test_train_errors():
    X = np.ones((4, 16), dtype=int)
    with pytest.raises(InsufficientDataError):
        C.train(X, [3, 3, 3, 3])
    # identical samples in both classes: the first correction zeroes a prototype
    with pytest.raises(DegenerateVectorError):
        C.train(np.zeros((2, 16), dtype=int), [3, 6], C.TrainConfig(dim=64))


def test_clean_toy_data_needs_no_retraining(clean_xy):
    X, y = clean_xy
    m = C.train(X, y, C.TrainConfig(dim=2048))
    assert m.retrain_history[0] == 0


def test_prototype_query_and_tie_rule(synth_xy):
    X, y = synth_xy
    m = C.train(X, y, C.TrainConfig(dim=1024))
    for k, cls in enumerate(m.classes):
        pred = C.infer_encoded(m, m.prototypes[k])
        assert pred.label == cls
        assert (pred.score > 0) == (k == 0)
    # a query orthogonal to both prototypes' difference ties, and ties go to the first class
    sym = C.ClassifierModel(4, 0, (3, 6), m.levels[:, :4], np.array([[1, 1, 0, 0], [0, 0, 1, 1]]))
    assert C.infer_encoded(sym, np.array([1, 1, 1, 1])).label == 3


def test_degenerate_query():
    levels = C.level_codebook(16, 0)
    m = C.ClassifierModel(16, 0, (3, 6), levels, np.stack([levels[0], levels[1]]))
    with pytest.raises(DegenerateVectorError):
        C.infer_encoded(m, np.zeros(16))


@pytest.mark.parametrize("mode", ["classical", "quantum-exact"])
def test_cross_validation_is_deterministic(synth_xy, mode):
    X, y = synth_xy
    cfg = C.EvalConfig(dim=64, mode=mode, folds=3, train_size=40, test_size=20)
    a = C.cross_validate(X, y, cfg).to_dict(timings=False)
    b = C.cross_validate(X, y, cfg, workers=3).to_dict(timings=False)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_noiseless_synthetic_is_perfect(clean_xy):
    X, y = clean_xy
    rep = C.cross_validate(X, y, C.EvalConfig(dim=10_000, folds=3, train_size=40, test_size=20))
    assert rep.f1_mean == 1.0 and rep.auc == 1.0


def test_auc_matches_pairwise_count(synth_xy):
    X, y = synth_xy
    cfg = C.EvalConfig(dim=128, folds=3, train_size=40, test_size=20, seed=2)
    rep = C.cross_validate(X, y, cfg)
    scores, truth = [], []
    for f, (tr, te) in enumerate(C.fold_indices(y, cfg.folds, cfg.seed)):
        r = C._run_fold(X, y, cfg, f, tr, te)
        scores += [p.score for p in r.preds]
        truth += list(r.y_true == rep.classes[0])
    assert rep.auc == pytest.approx(brute_auc(truth, scores), abs=1e-12)


def test_folds_are_stratified(synth_xy):
    _, y = synth_xy
    for tr, te in C.fold_indices(y, 5, 0):
        share = np.mean(y == 3)
        assert abs(np.sum(y[te] == 3) - share * len(te)) <= 1
    with pytest.raises(InsufficientDataError):
        C.fold_indices(np.array([3, 3, 3, 6]), 2, 0)


def test_eval_config_validation():
    with pytest.raises(InvalidArgumentError):
        C.EvalConfig(mode="quantum-exact", dim=100)
    with pytest.raises(InvalidArgumentError):
        C.EvalConfig(mode="quantum-sampled", dim=64, shots=0)
    with pytest.raises(InvalidArgumentError):
        C.EvalConfig(folds=1)


def test_sampled_mode_reports_std_error(synth_xy):
    X, y = synth_xy
    rep = C.cross_validate(X, y, C.EvalConfig(dim=32, mode="quantum-sampled", shots=10_000, folds=2, train_size=30, test_size=10))
    assert 0 < rep.max_std_error <= 0.005


def test_model_persistence(synth_xy, tmp_path):
    X, y = synth_xy
    m = C.train(X, y, C.TrainConfig(dim=64, mode="hybrid"))
    schemas.validate("model", m.to_dict())
    back = C.ClassifierModel.loads(m.dumps())
    assert np.array_equal(back.prototypes, m.prototypes) and back.hybrid
    p1 = C.infer_many(m, X[:10], "quantum-exact")
    p2 = C.infer_many(back, X[:10], "quantum-exact")
    assert p1 == p2
    bad = m.to_dict() | {"format_version": 99}
    with pytest.raises(FormatError):
        C.ClassifierModel.from_dict(bad)
    short = m.to_dict() | {"D": 32}
    with pytest.raises(FormatError):
        C.ClassifierModel.from_dict(short)


def test_report_validates_against_schema(synth_xy):
    X, y = synth_xy
    rep = C.cross_validate(X, y, C.EvalConfig(dim=32, folds=2, train_size=30, test_size=10))
    config = {"data": "synthetic", **rep.config}
    schemas.validate("classify", envelope("classify", config, rep.to_dict()))


def test_small_dimension_sweep(synth_xy):
    X, y = synth_xy
    rows = C.dimensionality_sweep(X, y, dims=(16, 32, 64), train_size=40, test_size=20)
    assert [r.dim for r in rows] == [16, 32, 64]
    assert all(a.depth < b.depth for a, b in zip(rows, rows[1:]))
    assert C.sweep_csv(rows).splitlines()[0] == "dim,f1,depth,cnot_count,total_gates"
