import copy
import itertools
import json
import math

import numpy as np
import pytest

from neurofuzzy.anfis import (AnfisEnsemble, AnfisModel, TrainingConfig,
                              anfis_forward, binary_decision, build_grid_model,
                              class_scores, decode_values,
                              ensemble_predict_classes, lse_consequents,
                              predict_class, predict_classes, predict_score,
                              premise_gradient_step, premise_gradients,
                              train_hybrid, train_oaa)
from neurofuzzy.anfis import _forward_batch
from neurofuzzy.data import EncodedSample
from neurofuzzy.errors import ModelFormatError
from neurofuzzy.fuzzy import sugeno_infer
from neurofuzzy.model_io import load_model, model_to_json, save_model


def random_model(rng, mf_shape="gbell", input_dim=3, mfs=2):
    """Grid model with jittered premises and random consequents."""
    model = build_grid_model(mf_shape, mfs_per_input=mfs, input_dim=input_dim,
                             input_range=(-1.0, 1.0))
    for j, row in enumerate(model.mf_bank):
        for m, mf in enumerate(row):
            p = mf.params()
            p = p * rng.uniform(0.7, 1.3, size=p.shape) \
                + rng.uniform(-0.1, 0.1, size=p.shape)
            model.mf_bank[j][m] = _repair(mf, p)
    model.consequents = rng.normal(size=model.consequents.shape)
    return model


def _repair(mf, p):
    # keep jittered parameters legal for the shape under test
    if mf.shape_name == "gbell":
        p[0] = max(abs(p[0]), 0.2)
        p[1] = max(abs(p[1]), 1.0)
    else:  # gauss2
        p[0] = max(abs(p[0]), 0.2)
        p[2] = max(abs(p[2]), 0.2)
        if p[1] > p[3]:
            p[1], p[3] = p[3], p[1]
    return mf.with_params(p)


def batch_loss(model, X, t):
    y, _, _, _, _ = _forward_batch(model, X)
    return float(np.mean((y - t) ** 2))


def constant_output_model(value, input_dim=2):
    model = build_grid_model("gbell", input_dim=input_dim)
    model.consequents[:, :] = 0.0
    model.consequents[:, 0] = value
    return model


def toy_samples(n, rng, input_dim=5):
    out = []
    for _ in range(n):
        feats = np.where(rng.uniform(size=input_dim) < 0.5, -1.0, 1.0)
        # class driven by two feature signs: a learnable rule structure
        c = (feats[0] > 0) * 2 + (feats[1] > 0)
        out.append(EncodedSample(features=feats, class_index=int(c)))
    return out


class TestBuildGridModel:
    def test_rule_count_five_inputs(self):
        model = build_grid_model("gbell")
        assert model.n_rules == 32
        assert model.antecedents.shape == (32, 5)
        assert model.consequents.shape == (32, 6)

    def test_rule_count_three_mfs(self):
        model = build_grid_model("gauss2", mfs_per_input=3, input_dim=2)
        assert model.n_rules == 9

    def test_every_grid_cell_once(self):
        model = build_grid_model("gbell", mfs_per_input=3, input_dim=2)
        cells = {tuple(row) for row in model.antecedents}
        assert cells == set(itertools.product(range(3), repeat=2))

    def test_centers_span_range(self):
        model = build_grid_model("gbell", mfs_per_input=3, input_dim=1,
                                 input_range=(0.0, 1.0))
        centers = [mf.c for mf in model.mf_bank[0]]
        assert centers == [0.0, 0.5, 1.0]

    def test_gauss2_plateau_collapsed(self):
        model = build_grid_model("gauss2", input_dim=1)
        for mf in model.mf_bank[0]:
            assert mf.c_left == mf.c_right

    def test_deterministic(self):
        a = build_grid_model("gbell", seed=3)
        b = build_grid_model("gbell", seed=3)
        assert model_to_json(a) == model_to_json(b)

    def test_single_mf_rejected(self):
        with pytest.raises(ValueError):
            build_grid_model("gbell", mfs_per_input=1)

    def test_zero_consequents(self):
        assert not build_grid_model("triangular").consequents.any()


class TestForward:
    def test_constant_intercepts_pass_through(self):
        model = constant_output_model(2.0)
        for x in ([0.3, -0.7], [0.0, 0.0], [1.0, 1.0]):
            assert anfis_forward(model, np.array(x)).y == pytest.approx(2.0)

    def test_normalized_layer_sums_to_one(self):
        rng = np.random.default_rng(0)
        model = random_model(rng)
        for _ in range(20):
            d = anfis_forward(model, rng.uniform(-1, 1, 3))
            assert math.isclose(d.normalized.sum(), 1.0, abs_tol=1e-9)
            assert not d.degenerate

    def test_own_grid_point_maximizes_rule(self):
        model = build_grid_model("gbell", input_dim=2)
        centers = [[mf.c for mf in row] for row in model.mf_bank]
        for r, ant in enumerate(model.antecedents):
            x = np.array([centers[j][m] for j, m in enumerate(ant)])
            d = anfis_forward(model, x)
            assert d.normalized[r] == pytest.approx(d.normalized.max())

    def test_contributions_sum_to_output(self):
        rng = np.random.default_rng(1)
        model = random_model(rng, mf_shape="gauss2")
        d = anfis_forward(model, rng.uniform(-1, 1, 3))
        assert d.y == pytest.approx(float(d.contributions.sum()))

    def test_agrees_with_rule_by_rule_reference(self):
        # vectorized path against the scalar rule-walking implementation
        rng = np.random.default_rng(2)
        for shape in ("gbell", "gauss2", "triangular"):
            model = random_model(rng, mf_shape=shape) if shape != "triangular" \
                else build_grid_model("triangular", input_dim=3)
            if shape == "triangular":
                model.consequents = rng.normal(size=model.consequents.shape)
            for _ in range(25):
                x = rng.uniform(-1, 1, 3)
                y_ref, wbar_ref = sugeno_infer(model.rules, model.mf_bank, x)
                d = anfis_forward(model, x)
                assert d.y == pytest.approx(y_ref, abs=1e-12)
                np.testing.assert_allclose(d.normalized, wbar_ref, atol=1e-12)

    def test_degenerate_input_falls_back_to_uniform(self):
        model = build_grid_model("triangular", input_dim=1, mfs_per_input=2)
        # all triangles are zero miles away from the grid
        d = anfis_forward(model, np.array([50.0]))
        assert d.degenerate
        np.testing.assert_allclose(d.normalized, [0.5, 0.5])


class TestLse:
    def test_constant_target_exact(self):
        model = build_grid_model("gbell", input_dim=2,
                                 consequent_order="constant")
        rng = np.random.default_rng(0)
        X = rng.uniform(-1, 1, size=(12, 2))
        residual = lse_consequents(model, X, np.full(12, 3.25), ridge=0.0)
        assert residual < 1e-12
        np.testing.assert_allclose(model.consequents[:, 0], 3.25)

    def test_representable_targets_recovered(self):
        rng = np.random.default_rng(1)
        for trial in range(10):
            model = random_model(rng, input_dim=2)
            truth = rng.normal(size=model.consequents.shape)
            keep = copy.deepcopy(model)
            keep.consequents = truth
            X = rng.uniform(-1, 1, size=(60, 2))
            t, _, _, _, _ = _forward_batch(keep, X)
            residual = lse_consequents(model, X, t, ridge=0.0)
            assert residual < 1e-8

    def test_matches_normal_equations(self):
        # independent oracle: build the regression matrix from scratch and
        # solve (Phi'Phi + ridge I) p = Phi' t directly
        rng = np.random.default_rng(2)
        ridge = 1e-8
        for trial in range(10):
            model = random_model(rng, input_dim=2)
            X = rng.uniform(-1, 1, size=(40, 2))
            t = rng.normal(size=40)
            _, _, Wbar, _, _ = _forward_batch(model, X)
            n, R = X.shape[0], model.n_rules
            Phi = np.zeros((n, R * 3))
            for i in range(R):
                Phi[:, i * 3] = Wbar[:, i]
                Phi[:, i * 3 + 1] = Wbar[:, i] * X[:, 0]
                Phi[:, i * 3 + 2] = Wbar[:, i] * X[:, 1]
            p = np.linalg.solve(Phi.T @ Phi + ridge * np.eye(R * 3), Phi.T @ t)
            want = float(np.sqrt(np.mean((Phi @ p - t) ** 2)))

            got = lse_consequents(model, X, t, ridge=ridge)
            assert math.isclose(got, want, abs_tol=1e-8)

    def test_no_perturbation_beats_solution(self):
        rng = np.random.default_rng(3)
        ridge = 1e-6
        model = random_model(rng, input_dim=2)
        X = rng.uniform(-1, 1, size=(30, 2))
        t = rng.normal(size=30)
        lse_consequents(model, X, t, ridge=ridge)
        p_star = model.consequents.ravel()
        _, _, Wbar, _, _ = _forward_batch(model, X)
        X1 = np.hstack([np.ones((30, 1)), X])
        Phi = (Wbar[:, :, None] * X1[:, None, :]).reshape(30, -1)

        def penalized(p):
            return float(np.sum((Phi @ p - t) ** 2) + ridge * np.sum(p**2))

        best = penalized(p_star)
        for _ in range(300):
            delta = rng.normal(scale=10.0 ** rng.uniform(-4, 0),
                               size=p_star.shape)
            assert penalized(p_star + delta) >= best

    def test_reduces_rmse(self):
        rng = np.random.default_rng(4)
        model = random_model(rng, input_dim=2)
        X = rng.uniform(-1, 1, size=(40, 2))
        t = rng.normal(size=40)
        before = math.sqrt(batch_loss(model, X, t))
        after = lse_consequents(model, X, t)
        assert after <= before + 1e-12

    def test_constant_order_zeroes_slopes(self):
        model = build_grid_model("gbell", input_dim=2,
                                 consequent_order="constant")
        rng = np.random.default_rng(5)
        X = rng.uniform(-1, 1, size=(20, 2))
        lse_consequents(model, X, rng.normal(size=20))
        assert not model.consequents[:, 1:].any()

    def test_empty_batch_rejected(self):
        model = build_grid_model("gbell", input_dim=2)
        with pytest.raises(ValueError):
            lse_consequents(model, np.zeros((0, 2)), np.zeros(0))


class TestPremiseGradients:
    @pytest.mark.parametrize("shape", ["gbell", "gauss2"])
    def test_matches_central_differences(self, shape):
        rng = np.random.default_rng(10)
        h = 1e-6
        checked = 0
        for trial in range(9):
            model = random_model(rng, mf_shape=shape, input_dim=2)
            X = rng.uniform(-0.9, 0.9, size=(15, 2))
            t = rng.normal(size=15)
            _, grads = premise_gradients(model, X, t)
            for j in range(2):
                for m, mf in enumerate(model.mf_bank[j]):
                    base = mf.params()
                    for k in range(base.size):
                        plus, minus = base.copy(), base.copy()
                        plus[k] += h
                        minus[k] -= h
                        lo = copy.deepcopy(model)
                        hi = copy.deepcopy(model)
                        hi.mf_bank[j][m] = mf.with_params(plus)
                        lo.mf_bank[j][m] = mf.with_params(minus)
                        fd = (batch_loss(hi, X, t)
                              - batch_loss(lo, X, t)) / (2 * h)
                        got = grads[j][m][k]
                        denom = max(abs(fd), abs(got), 1e-8)
                        assert abs(got - fd) / denom < 1e-4, \
                            f"{shape} input {j} mf {m} param {k}"
                        checked += 1
        assert checked >= 100

    def test_zero_learn_rate_is_identity(self):
        rng = np.random.default_rng(11)
        model = random_model(rng, input_dim=2)
        before = model_to_json(model)
        X = rng.uniform(-1, 1, size=(10, 2))
        premise_gradient_step(model, X, rng.normal(size=10), learn_rate=0.0)
        assert model_to_json(model) == before

    def test_small_step_does_not_increase_loss(self):
        rng = np.random.default_rng(12)
        for trial in range(5):
            model = random_model(rng, input_dim=2)
            X = rng.uniform(-0.9, 0.9, size=(20, 2))
            t = rng.normal(size=20)
            before = batch_loss(model, X, t)
            premise_gradient_step(model, X, t, learn_rate=1e-5)
            assert batch_loss(model, X, t) <= before + 1e-12

    def test_frozen_shape_has_zero_gradients(self):
        model = build_grid_model("triangular", input_dim=2)
        rng = np.random.default_rng(13)
        X = rng.uniform(-1, 1, size=(10, 2))
        _, grads = premise_gradients(model, X, rng.normal(size=10))
        for per_input in grads:
            assert not np.asarray(per_input).any()

    def test_step_keeps_widths_positive(self):
        rng = np.random.default_rng(14)
        model = random_model(rng, mf_shape="gauss2", input_dim=2)
        X = rng.uniform(-1, 1, size=(10, 2))
        t = rng.normal(size=10)
        for _ in range(50):   # absurd rate to slam into the clamps
            premise_gradient_step(model, X, t, learn_rate=5.0)
        for row in model.mf_bank:
            for mf in row:
                assert mf.sigma_left >= 1e-6 and mf.sigma_right >= 1e-6
                assert mf.c_left <= mf.c_right


class TestTrainHybrid:
    def test_one_epoch_equals_manual_steps(self):
        rng = np.random.default_rng(20)
        samples = toy_samples(24, rng, input_dim=3)
        model = build_grid_model("gbell", input_dim=3)
        config = TrainingConfig(epochs=1, learn_rate=0.05, ridge=1e-8, seed=0)
        trained, trace = train_hybrid(model, samples, [], config)

        manual = copy.deepcopy(model)
        X = np.array([s.features for s in samples])
        t = np.array([s.class_value for s in samples])
        lse_consequents(manual, X, t, ridge=1e-8)
        premise_gradient_step(manual, X, t, learn_rate=0.05)
        np.testing.assert_array_equal(trained.consequents, manual.consequents)
        for j in range(3):
            for m in range(2):
                np.testing.assert_array_equal(
                    trained.mf_bank[j][m].params(), manual.mf_bank[j][m].params())
        assert trace.epochs_run == 1 and len(trace.train_rmse) == 1

    def test_original_model_untouched(self):
        rng = np.random.default_rng(21)
        samples = toy_samples(20, rng, input_dim=3)
        model = build_grid_model("gbell", input_dim=3)
        before = model_to_json(model)
        train_hybrid(model, samples, [], TrainingConfig(epochs=3))
        assert model_to_json(model) == before

    def test_learns_feature_driven_labels(self):
        rng = np.random.default_rng(22)
        samples = toy_samples(48, rng, input_dim=2)
        model = build_grid_model("gbell", input_dim=2)
        trained, trace = train_hybrid(
            model, samples, [], TrainingConfig(epochs=50, learn_rate=0.01))
        assert trace.train_rmse[-1] < 0.1
        right = sum(predict_class(trained, s.features) == s.class_index
                    for s in samples)
        assert right == len(samples)

    def test_deterministic(self):
        rng = np.random.default_rng(23)
        samples = toy_samples(30, rng, input_dim=3)
        config = TrainingConfig(epochs=5, learn_rate=0.02)
        a, ta = train_hybrid(build_grid_model("gauss2", input_dim=3),
                             samples, samples[:8], config)
        b, tb = train_hybrid(build_grid_model("gauss2", input_dim=3),
                             samples, samples[:8], config)
        assert model_to_json(a) == model_to_json(b)
        assert ta.train_rmse == tb.train_rmse
        assert ta.test_rmse == tb.test_rmse

    def test_early_stop(self):
        rng = np.random.default_rng(24)
        samples = toy_samples(30, rng, input_dim=2)
        trained, trace = train_hybrid(
            build_grid_model("gbell", input_dim=2), samples, [],
            TrainingConfig(epochs=100, learn_rate=0.01, early_stop_rmse=0.5))
        assert trace.epochs_run < 100
        assert trace.train_rmse[-1] <= 0.5

    def test_empty_train_rejected(self):
        with pytest.raises(ValueError):
            train_hybrid(build_grid_model("gbell"), [], [], TrainingConfig())

    def test_config_bounds(self):
        with pytest.raises(ValueError):
            TrainingConfig(epochs=0)
        with pytest.raises(ValueError):
            TrainingConfig(learn_rate=0.0)
        with pytest.raises(ValueError):
            TrainingConfig(ridge=-1.0)

    def test_oaa_members_cover_classes(self):
        rng = np.random.default_rng(25)
        samples = toy_samples(40, rng, input_dim=2)
        proto = build_grid_model("gbell", input_dim=2)
        ensemble, traces = train_oaa(proto, samples, samples[:10],
                                     TrainingConfig(epochs=3))
        assert [m.positive_class for m in ensemble.members] == [0, 1, 2, 3]
        assert all(m.output_mode == "binary" for m in ensemble.members)
        assert len(traces) == 4


class TestDecoding:
    @pytest.mark.parametrize("y,expect", [
        (1.3, 0), (4.7, 3), (0.2, 0), (9.0, 3),
        (1.49, 0), (1.5, 1), (2.5, 2), (3.5, 3), (2.49, 1),
    ])
    def test_rounding_and_clamping(self, y, expect):
        assert decode_values(np.array([y]))[0] == expect

    def test_vectorized(self):
        got = decode_values(np.array([0.9, 1.6, 2.2, 3.7, 5.0]))
        np.testing.assert_array_equal(got, [0, 1, 1, 3, 3])

    def test_predict_classes_matches_forward_decode(self):
        rng = np.random.default_rng(30)
        model = random_model(rng, input_dim=3)
        X = rng.uniform(-1, 1, size=(20, 3))
        y, _, _, _, _ = _forward_batch(model, X)
        np.testing.assert_array_equal(predict_classes(model, X),
                                      decode_values(y))

    def test_binary_decision_threshold(self):
        model = constant_output_model(0.5)
        assert binary_decision(model, np.zeros(2)) is True
        model = constant_output_model(0.4999)
        assert binary_decision(model, np.zeros(2)) is False

    def test_predict_score_is_raw_output(self):
        model = constant_output_model(0.73)
        assert predict_score(model, np.zeros(2)) == pytest.approx(0.73)

    def test_single_mode_scores_rank_by_distance(self):
        model = constant_output_model(2.9)
        scores = class_scores(model, np.zeros((3, 2)))
        assert scores.shape == (3, 4)
        np.testing.assert_allclose(scores[0],
                                   [-1.9, -0.9, -0.1, -1.1], atol=1e-12)
        assert int(np.argmax(scores[0])) == 2

    def test_ensemble_argmax_and_ties(self):
        members = []
        for value in (0.2, 0.7, 0.7, 0.1):
            m = constant_output_model(value)
            m.output_mode = "binary"
            m.positive_class = len(members)
            members.append(m)
        ensemble = AnfisEnsemble(members=members)
        X = np.zeros((4, 2))
        scores = class_scores(ensemble, X)
        np.testing.assert_allclose(scores[0], [0.2, 0.7, 0.7, 0.1])
        # tie between classes 1 and 2 breaks to the lower index
        np.testing.assert_array_equal(ensemble_predict_classes(ensemble, X),
                                      [1, 1, 1, 1])


class TestSerialization:
    def test_round_trip_byte_identical(self, tmp_path):
        rng = np.random.default_rng(40)
        for shape in ("gbell", "gauss2", "triangular"):
            model = build_grid_model(shape, input_dim=2, seed=1)
            model.consequents = rng.normal(size=model.consequents.shape)
            path = tmp_path / f"{shape[:6]}.json"
            save_model(model, path)
            text = path.read_text(encoding="utf-8")
            loaded = load_model(path)
            assert model_to_json(loaded) == text
            save_model(loaded, path)
            assert path.read_text(encoding="utf-8") == text

    def test_ensemble_round_trip(self, tmp_path):
        rng = np.random.default_rng(41)
        samples = toy_samples(20, rng, input_dim=2)
        ensemble, _ = train_oaa(build_grid_model("gbell", input_dim=2),
                                samples, [], TrainingConfig(epochs=2))
        path = tmp_path / "ensemble.json"
        save_model(ensemble, path)
        loaded = load_model(path)
        assert isinstance(loaded, AnfisEnsemble)
        assert model_to_json(loaded) == path.read_text(encoding="utf-8")

    def test_reload_preserves_outputs(self, tmp_path):
        rng = np.random.default_rng(42)
        model = random_model(rng, mf_shape="gauss2", input_dim=3)
        path = tmp_path / "m.json"
        save_model(model, path)
        loaded = load_model(path)
        for _ in range(10):
            x = rng.uniform(-1, 1, 3)
            assert anfis_forward(loaded, x).y == anfis_forward(model, x).y

    def test_bad_version_rejected(self, tmp_path):
        model = build_grid_model("gbell", input_dim=2)
        d = json.loads(model_to_json(model))
        d["format_version"] = 99
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(d), encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_unknown_kind_rejected(self, tmp_path):
        model = build_grid_model("gbell", input_dim=2)
        d = json.loads(model_to_json(model))
        d["kind"] = "svm"
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(d), encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_not_json_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{truncated", encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(path)

    def test_inconsistent_shapes_rejected(self, tmp_path):
        model = build_grid_model("gbell", input_dim=2)
        d = json.loads(model_to_json(model))
        d["consequents"] = [[0.0]]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(d), encoding="utf-8")
        with pytest.raises(ModelFormatError):
            load_model(path)
        with pytest.raises(ValueError):
            AnfisModel.from_dict(d)
