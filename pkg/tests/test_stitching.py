import numpy as np
import pytest

from relsemcom.relrep import AnchorSet, encode_relative, select_anchors_uniform
from relsemcom.stitching import (
    RelativeDecoder,
    SyntheticEncoder,
    apply_encoder,
    apply_encoder_batch,
    build_accuracy_profile,
    encode_anchor_set,
    evaluate_accuracy,
    generate_dataset,
    random_orthogonal,
    stitching_accuracy,
    train_decoder,
)


def ridge_oracle(X, y, C, lam):
    """Augmented least squares with an unpenalised bias column, solved densely."""
    n, m = X.shape
    Xa = np.hstack([X, np.ones((n, 1))])
    T = np.eye(C)[y]
    P = np.diag([lam] * m + [0.0])
    sol = np.linalg.solve(Xa.T @ Xa + P, Xa.T @ T)
    return sol[:m].T, sol[m]


def test_random_orthogonal():
    q = random_orthogonal(12, seed=4)
    np.testing.assert_allclose(q.T @ q, np.eye(12), atol=1e-12)
    np.testing.assert_array_equal(q, random_orthogonal(12, seed=4))


def test_encoder_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        SyntheticEncoder("bad", np.array([[1.0, 0.0], [0.0, 2.0]]))


def test_generate_dataset_zero_spread_and_determinism():
    ds = generate_dataset(3, 4, 5, 0.0, seed=1)
    for c in range(3):
        pts = np.vstack([ds.train_x[ds.train_y == c], ds.val_x[ds.val_y == c]])
        np.testing.assert_array_equal(pts, np.repeat(pts[:1], len(pts), axis=0))
        assert np.linalg.norm(pts[0]) == pytest.approx(1.0)
    again = generate_dataset(3, 4, 5, 0.0, seed=1)
    np.testing.assert_array_equal(ds.train_x, again.train_x)
    np.testing.assert_array_equal(ds.val_y, again.val_y)


@pytest.mark.parametrize("args", [(1, 5, 4), (3, 1, 4), (3, 5, 1)])
def test_generate_dataset_preconditions(args):
    with pytest.raises(ValueError):
        generate_dataset(*args, spread=0.1, seed=0)


def test_generate_dataset_nearest_mean_separable():
    ds = generate_dataset(2, 50, 16, 0.05, seed=7)
    means = np.stack([ds.train_x[ds.train_y == c].mean(axis=0) for c in range(2)])
    dist = np.linalg.norm(ds.val_x[:, None, :] - means[None], axis=2)
    assert np.mean(np.argmin(dist, axis=1) == ds.val_y) == 1.0


def test_apply_encoder_identity_and_isometry():
    x = np.array([0.3, -1.2, 2.0])
    assert np.array_equal(apply_encoder(SyntheticEncoder.identity("id", 3), x, seed=0), x)
    enc = SyntheticEncoder.random("e", 3, seed=2, scale=2.5)
    assert np.linalg.norm(apply_encoder(enc, x, 0)) == pytest.approx(2.5 * np.linalg.norm(x), abs=1e-9)
    with pytest.raises(ValueError):
        apply_encoder(enc, np.ones(4), 0)


def test_apply_encoder_noise_is_keyed_by_sample():
    enc = SyntheticEncoder.random("e", 6, seed=2, noise_sigma=0.3)
    x = np.ones(6)
    assert np.array_equal(apply_encoder(enc, x, 5), apply_encoder(enc, x, 5))
    assert not np.array_equal(apply_encoder(enc, x, 5), apply_encoder(enc, x, 6))
    batch = apply_encoder_batch(enc, np.stack([x, 2 * x]), [5, 9])
    # same noise draw per sample; the matmul may round differently in batch form
    np.testing.assert_allclose(batch[0], apply_encoder(enc, x, 5), rtol=0, atol=1e-14)
    np.testing.assert_allclose(batch[1], apply_encoder(enc, 2 * x, 9), rtol=0, atol=1e-14)


def test_relreps_invariant_under_noiseless_encoder():
    rng = np.random.default_rng(0)
    enc = SyntheticEncoder.random("e", 8, seed=3, scale=0.7)
    x = rng.standard_normal(8)
    anchors = rng.standard_normal((5, 8))
    A = AnchorSet("a", anchors)
    moved = encode_relative(apply_encoder(enc, x, 0), encode_anchor_set(enc, A)).scores
    np.testing.assert_allclose(moved, encode_relative(x, A).scores, atol=1e-9)


def test_train_decoder_interpolates_two_points():
    dec = train_decoder(np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([0, 1]), ridge=0.0)
    np.testing.assert_array_equal(dec.predict(np.array([[1.0, 0.0], [0.0, 1.0]])), [0, 1])


def test_train_decoder_large_ridge_shrinks_weights():
    rng = np.random.default_rng(1)
    X, y = rng.uniform(-1, 1, (20, 4)), np.arange(20) % 3
    w_small = np.abs(train_decoder(X, y, 1e-3).weights).max()
    w_big = np.abs(train_decoder(X, y, 1e9).weights).max()
    assert w_big < 1e-8 < w_small


def test_train_decoder_matches_dense_oracle():
    rng = np.random.default_rng(5)
    X = rng.uniform(-1, 1, (6, 3))
    y = np.array([0, 1, 2, 0, 1, 2])
    for lam in (0.1, 1.0):
        dec = train_decoder(X, y, lam, num_classes=3)
        W, b = ridge_oracle(X, y, 3, lam)
        np.testing.assert_allclose(dec.weights, W, atol=1e-8)
        np.testing.assert_allclose(dec.bias, b, atol=1e-8)
    # lambda = 0 with full column rank: plain least squares
    dec = train_decoder(X, y, 0.0, num_classes=3)
    Xa = np.hstack([X, np.ones((6, 1))])
    sol = np.linalg.lstsq(Xa, np.eye(3)[y], rcond=None)[0]
    np.testing.assert_allclose(dec.weights, sol[:3].T, atol=1e-8)


def test_train_decoder_empty_class():
    with pytest.raises(ValueError):
        train_decoder(np.eye(2), np.array([0, 2]), 0.1, num_classes=3)


def _setup(noise=0.0, spread=0.05, C=4, n_anchors=20):
    ds = generate_dataset(C, 30, 16, spread, seed=3)
    A = select_anchors_uniform(ds.train_x, n_anchors, seed=0)
    enc_a = SyntheticEncoder.random("a", 16, seed=10, noise_sigma=noise)
    enc_b = SyntheticEncoder.random("b", 16, seed=11, scale=3.0, noise_sigma=noise)
    return ds, A, enc_a, enc_b


def test_evaluate_same_encoder_separable():
    ds, A, enc_a, _ = _setup()
    assert stitching_accuracy(ds, enc_a, enc_a, A, 1e-3) == 1.0


def test_constant_decoder_hits_chance():
    ds, A, enc_a, _ = _setup(C=5)
    dec = RelativeDecoder(A.id, np.zeros((5, A.size)), np.zeros(5))
    acc = evaluate_accuracy(dec, enc_a, encode_anchor_set(enc_a, A), ds.val_x, ds.val_y)
    assert acc == pytest.approx(1 / 5)


def test_zero_shot_equals_same_encoder():
    ds, A, enc_a, enc_b = _setup(spread=0.4, C=6)
    same = stitching_accuracy(ds, enc_a, enc_a, A, 1e-3)
    cross = stitching_accuracy(ds, enc_a, enc_b, A, 1e-3)
    assert cross == same
    assert same < 1.0  # not trivially saturated


def test_evaluate_checks_anchor_id_and_empty_split():
    ds, A, enc_a, _ = _setup()
    dec = RelativeDecoder("other", np.zeros((4, A.size)), np.zeros(4))
    with pytest.raises(ValueError):
        evaluate_accuracy(dec, enc_a, A, ds.val_x, ds.val_y)
    dec = RelativeDecoder(A.id, np.zeros((4, A.size)), np.zeros(4))
    with pytest.raises(ValueError):
        evaluate_accuracy(dec, enc_a, A, ds.val_x[:0], ds.val_y[:0])


def test_profile_single_cell_equals_evaluate():
    ds, _, enc_a, _ = _setup(noise=0.05, spread=0.3)
    table = build_accuracy_profile([enc_a], [10], ds, seeds=[4], ridge=1e-3)
    A = select_anchors_uniform(ds.train_x, 10, 4, "A10")
    assert table == {("a", 10): stitching_accuracy(ds, enc_a, enc_a, A, 1e-3)}


def test_profile_rises_with_anchor_count():
    ds = generate_dataset(10, 40, 32, 0.25, seed=0)
    enc = SyntheticEncoder.random("e", 32, seed=1, noise_sigma=0.05)
    sizes = [3, 10, 30, 100]
    table = build_accuracy_profile([enc], sizes, ds, seeds=[0, 1, 2], ridge=1e-2)
    accs = [table[("e", n)] for n in sizes]
    assert all(b >= a - 0.02 for a, b in zip(accs, accs[1:]))
    assert accs[-1] > accs[0] + 0.1


def test_profile_chance_level_under_heavy_noise():
    ds = generate_dataset(5, 80, 16, 0.1, seed=0)
    clean = SyntheticEncoder.random("clean", 16, seed=1)
    noisy = SyntheticEncoder.random("noisy", 16, seed=2, noise_sigma=3.0)
    table = build_accuracy_profile([noisy], [40], ds, seeds=[0, 1, 2], ridge=1e-2, train_encoder=clean)
    assert abs(table[("noisy", 40)] - 0.2) < 0.1


def test_profile_rejects_oversized_anchor_sets():
    ds, _, enc_a, _ = _setup()
    with pytest.raises(ValueError):
        build_accuracy_profile([enc_a], [10_000], ds, seeds=[0])


def test_profile_is_deterministic_and_seed_order_free():
    ds, _, enc_a, enc_b = _setup(noise=0.1, spread=0.3)
    t1 = build_accuracy_profile([enc_a, enc_b], [5, 15], ds, seeds=[0, 1, 2])
    t2 = build_accuracy_profile([enc_a, enc_b], [5, 15], ds, seeds=[2, 0, 1])
    assert t1 == t2


def test_interpolating_decoder_scores_one_on_train_split():
    ds = generate_dataset(4, 6, 32, 0.8, seed=2)
    n = ds.train_x.shape[0]
    A = select_anchors_uniform(ds.train_x, n, seed=0)  # as many anchors as training points
    enc = SyntheticEncoder.random("e", 32, seed=5)
    anchors = encode_anchor_set(enc, A)
    X = np.vstack([encode_relative(apply_encoder(enc, x, i), anchors).scores
                   for i, x in zip(ds.train_ids, ds.train_x)])
    dec = train_decoder(X, ds.train_y, 0.0, num_classes=4, anchor_set_id=A.id)
    assert evaluate_accuracy(dec, enc, anchors, ds.train_x, ds.train_y, val_ids=ds.train_ids) == 1.0
