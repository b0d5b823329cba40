import gzip

import numpy as np
import pytest

from qreservoir.data import (
    EncodedSample,
    IdxFormatError,
    ImageDataset,
    angles_from_projections,
    encode_angles,
    encode_angles_batch,
    fit_pca,
    load_idx_images,
    load_idx_labels,
    load_mnist_idx,
    prepare_state,
    project,
    stratified_subsample,
    write_idx_images,
    write_idx_labels,
)


class TestIdxFormat:
    def test_round_trip(self, tmp_path, small_train_dataset):
        imgs = tmp_path / "imgs"
        labs = tmp_path / "labs"
        write_idx_images(imgs, small_train_dataset.images)
        write_idx_labels(labs, small_train_dataset.labels)
        ds = load_mnist_idx(imgs, labs)
        assert np.array_equal(ds.images, small_train_dataset.images)
        assert np.array_equal(ds.labels, small_train_dataset.labels)

    def test_gzip_round_trip(self, tmp_path, small_train_dataset):
        imgs = tmp_path / "imgs"
        write_idx_images(imgs, small_train_dataset.images)
        gz = tmp_path / "imgs.gz"
        gz.write_bytes(gzip.compress(imgs.read_bytes()))
        assert np.array_equal(load_idx_images(gz), small_train_dataset.images)

    def test_label_magic_rejected_for_images(self, tmp_path):
        path = tmp_path / "labs"
        write_idx_labels(path, np.arange(10) % 10)
        with pytest.raises(IdxFormatError, match="bad magic 2049"):
            load_idx_images(path)

    def test_image_magic_rejected_for_labels(self, tmp_path):
        path = tmp_path / "imgs"
        write_idx_images(path, np.zeros((3, 784), dtype=np.uint8))
        with pytest.raises(IdxFormatError, match="bad magic 2051"):
            load_idx_labels(path)

    def test_truncated_file(self, tmp_path):
        path = tmp_path / "imgs"
        write_idx_images(path, np.zeros((4, 784), dtype=np.uint8))
        data = path.read_bytes()
        path.write_bytes(data[: len(data) - 100])
        with pytest.raises(IdxFormatError, match="truncated"):
            load_idx_images(path)

    def test_count_mismatch(self, tmp_path):
        imgs = tmp_path / "imgs"
        labs = tmp_path / "labs"
        write_idx_images(imgs, np.zeros((4, 784), dtype=np.uint8))
        write_idx_labels(labs, np.zeros(5, dtype=np.uint8))
        with pytest.raises(IdxFormatError, match="count mismatch"):
            load_mnist_idx(imgs, labs)

    def test_wrong_image_shape(self, tmp_path):
        import struct

        path = tmp_path / "odd"
        with open(path, "wb") as f:
            f.write(struct.pack(">iiii", 2051, 1, 16, 16))
            f.write(bytes(256))
        with pytest.raises(IdxFormatError, match="28x28"):
            load_idx_images(path)


class TestPca:
    def test_zero_variance_rejected(self):
        imgs = np.tile(np.arange(784, dtype=np.uint8), (20, 1))
        ds = ImageDataset(images=imgs, labels=np.zeros(20, dtype=np.int64))
        with pytest.raises(ValueError, match="rank"):
            fit_pca(ds, 2)

    def test_two_sample_toy(self):
        imgs = np.zeros((2, 784), dtype=np.uint8)
        imgs[0, 0] = 2  # centered values are +-1 along pixel 0
        ds = ImageDataset(images=imgs, labels=np.zeros(2, dtype=np.int64))
        pca = fit_pca(ds, 1)
        e1 = np.zeros(784)
        e1[0] = 1.0
        assert np.allclose(pca.basis[0], e1, atol=1e-12)
        assert pca.train_min[0] == pytest.approx(-1.0)
        assert pca.train_max[0] == pytest.approx(1.0)

    def test_covariance_oracle(self, small_train_dataset):
        pca = fit_pca(small_train_dataset, 2)
        x = small_train_dataset.images.astype(np.float64)
        xc = x - x.mean(axis=0)
        cov = xc.T @ xc
        w, v = np.linalg.eigh(cov)
        for comp in range(2):
            vec = v[:, -1 - comp]
            err = min(
                np.abs(pca.basis[comp] - vec).max(),
                np.abs(pca.basis[comp] + vec).max(),
            )
            assert err < 1e-6

    def test_orthonormal_and_monotone_variance(self, small_train_dataset):
        pca = fit_pca(small_train_dataset, 12)
        gram = pca.basis @ pca.basis.T
        assert np.abs(gram - np.eye(12)).max() < 1e-8
        proj = project(pca, small_train_dataset.images)
        variances = proj.var(axis=0)
        assert np.all(np.diff(variances) <= 1e-9)

    def test_projection_extrema_recorded(self, small_train_dataset):
        pca = fit_pca(small_train_dataset, 6)
        proj = project(pca, small_train_dataset.images)
        assert np.allclose(proj.min(axis=0), pca.train_min)
        assert np.allclose(proj.max(axis=0), pca.train_max)
        assert np.all(pca.train_min < pca.train_max)

    def test_deterministic_refit(self, small_train_dataset):
        a = fit_pca(small_train_dataset, 8)
        b = fit_pca(small_train_dataset, 8)
        assert np.array_equal(a.basis, b.basis)
        assert np.array_equal(a.mean, b.mean)
        assert np.array_equal(a.train_min, b.train_min)

    def test_too_many_components(self, small_train_dataset):
        with pytest.raises(ValueError):
            fit_pca(small_train_dataset, 785)


class TestAngleEncoding:
    def test_endpoints_and_midpoint(self, small_train_dataset):
        pca = fit_pca(small_train_dataset, 4)
        lo = angles_from_projections(pca, pca.train_min[None, :])[0]
        hi = angles_from_projections(pca, pca.train_max[None, :])[0]
        mid = angles_from_projections(
            pca, (0.5 * (pca.train_min + pca.train_max))[None, :]
        )[0]
        assert np.allclose(lo, 0.0, atol=1e-12)
        assert np.allclose(hi, np.pi, atol=1e-12)
        assert np.allclose(mid, np.pi / 2, atol=1e-12)

    def test_clamped_beyond_training_range(self, small_train_dataset):
        pca = fit_pca(small_train_dataset, 4)
        over = angles_from_projections(pca, (pca.train_max + 5.0)[None, :])[0]
        under = angles_from_projections(pca, (pca.train_min - 5.0)[None, :])[0]
        assert np.all(over == np.pi)
        assert np.all(under == 0.0)

    def test_monotone_in_coefficient(self, small_train_dataset):
        pca = fit_pca(small_train_dataset, 4)
        grid = np.linspace(pca.train_min[0] - 1, pca.train_max[0] + 1, 50)
        proj = np.tile(pca.train_min, (50, 1))
        proj[:, 0] = grid
        a = angles_from_projections(pca, proj)[:, 0]
        assert np.all(np.diff(a) >= 0)

    def test_split_into_theta_phi(self, small_train_dataset):
        pca = fit_pca(small_train_dataset, 8)
        enc = encode_angles(pca, small_train_dataset.images[0])
        assert enc.thetas.shape == (4,)
        assert enc.phis.shape == (4,)
        thetas, phis = encode_angles_batch(pca, small_train_dataset.images[:3])
        assert thetas.shape == (3, 4) and phis.shape == (3, 4)
        assert np.allclose(thetas[0], enc.thetas)
        assert np.allclose(phis[0], enc.phis)


class TestPrepareState:
    def test_all_zero_angles(self):
        enc = EncodedSample(thetas=np.zeros(3), phis=np.zeros(3))
        state = prepare_state(enc)
        assert state[0] == pytest.approx(1.0)
        assert np.abs(state[1:]).max() == 0

    def test_all_pi_angles(self):
        enc = EncodedSample(thetas=np.full(3, np.pi), phis=np.zeros(3))
        state = prepare_state(enc)
        assert abs(abs(state[-1]) - 1.0) < 1e-12
        assert np.abs(state[:-1]).max() < 1e-12

    def test_two_qubit_hand_example(self):
        # qubit 0 at (pi/2, pi/2), qubit 1 at (0, 0): bit 0 addresses qubit 0
        enc = EncodedSample(
            thetas=np.array([np.pi / 2, 0.0]), phis=np.array([np.pi / 2, 0.0])
        )
        state = prepare_state(enc)
        expected = np.array([1 / np.sqrt(2), 1j / np.sqrt(2), 0, 0])
        assert np.abs(state - expected).max() < 1e-12

    def test_normalized_for_random_angles(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            enc = EncodedSample(
                thetas=rng.uniform(0, np.pi, 6), phis=rng.uniform(0, np.pi, 6)
            )
            assert abs(np.linalg.norm(prepare_state(enc)) - 1) < 1e-12


class TestStratifiedSubsample:
    def test_balanced_quota(self):
        labels = np.repeat(np.arange(10), 100)
        idx = stratified_subsample(labels, 200, seed=0)
        assert len(idx) == 200
        _, counts = np.unique(labels[idx], return_counts=True)
        assert np.all(counts == 20)
        assert np.all(np.diff(idx) > 0)

    def test_deterministic(self):
        labels = np.repeat(np.arange(10), 50)
        a = stratified_subsample(labels, 120, seed=7)
        b = stratified_subsample(labels, 120, seed=7)
        assert np.array_equal(a, b)
        c = stratified_subsample(labels, 120, seed=8)
        assert not np.array_equal(a, c)

    def test_unbalanced_proportions(self):
        labels = np.array([0] * 90 + [1] * 10)
        idx = stratified_subsample(labels, 20, seed=1)
        counts = np.bincount(labels[idx], minlength=2)
        assert counts[0] == 18 and counts[1] == 2

    def test_size_too_large(self):
        with pytest.raises(ValueError):
            stratified_subsample(np.zeros(5, dtype=int), 6, seed=0)

    def test_full_size_identity(self):
        labels = np.arange(10) % 3
        assert np.array_equal(stratified_subsample(labels, 10, 0), np.arange(10))
