import numpy as np
import pytest
from scipy.stats import spearmanr

from cotscale.learner import (
    Memorizer,
    PowerLawRegression,
    fit_power_law,
    label,
    make_task,
    mean_errors,
    measure_error,
    predict,
    reference_curve_points,
    sweep,
    uniform_sphere,
    write_sweep_csv,
)
from cotscale.rng import stream


class TestVoronoiTask:
    def test_prototype_norms(self):
        task = make_task(5, 32, seed=0)
        np.testing.assert_allclose(np.linalg.norm(task.prototypes, axis=1), 1.0, atol=1e-9)

    def test_single_class(self):
        task = make_task(3, 1, seed=1)
        x = uniform_sphere(stream(0, "x"), 20, 3)
        assert np.all(task.labels(x) == 1)

    def test_self_match(self):
        task = make_task(4, 10, seed=2)
        for j in range(10):
            assert label(task, task.prototypes[j]) == j + 1

    def test_antipodal_pair(self):
        import cotscale.learner.voronoi as vor

        task = vor.VoronoiTask(prototypes=np.array([[1.0, 0.0], [-1.0, 0.0]]))
        assert task.label(np.array([-0.9, 0.1])) == 2
        assert task.label(np.array([0.9, 0.1])) == 1

    def test_argmax_dot_equals_argmin_distance(self):
        # chord distance between unit vectors is monotone in the dot product
        task = make_task(3, 8, seed=3)
        x = uniform_sphere(stream(1, "x"), 10_000, 3)
        by_dot = task.labels(x)
        dists = np.linalg.norm(x[:, None, :] - task.prototypes[None, :, :], axis=2)
        by_dist = np.argmin(dists, axis=1) + 1
        np.testing.assert_array_equal(by_dot, by_dist)

    def test_cells_nonempty(self):
        task = make_task(3, 8, seed=4)
        x = uniform_sphere(stream(2, "x"), 1_000_000, 3)
        assert set(np.unique(task.labels(x))) == set(range(1, 9))

    def test_domain(self):
        with pytest.raises(ValueError):
            make_task(1, 4, seed=0)
        with pytest.raises(ValueError):
            make_task(3, 0, seed=0)


class TestMemorizer:
    def test_interpolates_training_set(self):
        x = uniform_sphere(stream(3, "x"), 200, 4)
        y = make_task(4, 6, seed=5).labels(x)
        model = Memorizer().fit(x, y)
        np.testing.assert_array_equal(model.predict(x), y)

    def test_error_on_training_set_is_zero(self):
        x = uniform_sphere(stream(4, "x"), 100, 3)
        y = make_task(3, 4, seed=6).labels(x)
        model = Memorizer().fit(x, y)
        assert np.mean(model.predict(x) != y) == 0.0

    def test_small_bandwidth_converges_to_nearest_neighbor(self):
        rng = stream(5, "data")
        x = uniform_sphere(rng, 300, 3)
        y = make_task(3, 5, seed=7).labels(x)
        queries = uniform_sphere(rng, 1000, 3)
        nn = Memorizer().fit(x, y).predict(queries)
        kernel = Memorizer(bandwidth=1e-3).fit(x, y).predict(queries, decode="greedy")
        assert np.mean(nn != kernel) < 0.01

    def test_sampling_single_training_point(self):
        model = Memorizer(bandwidth=0.5).fit(np.array([[1.0, 0.0]]), np.array([3]))
        out = model.predict(np.array([[0.0, 1.0]]), decode="sample", rng=stream(0, "d"))
        assert out[0] == 3

    def test_sample_matches_posterior(self):
        x = np.array([[1.0, 0.0], [0.0, 1.0]])
        y = np.array([1, 2])
        model = Memorizer(bandwidth=1.0).fit(x, y)
        query = np.array([[1.0, 0.0]])
        p = model.predict_proba(query)[0]
        rng = stream(9, "draws")
        draws = np.concatenate(
            [model.predict(query, decode="sample", rng=rng) for _ in range(4000)]
        )
        assert np.mean(draws == 1) == pytest.approx(p[0], abs=0.03)

    def test_median_bandwidth_resolved_at_fit(self):
        x = uniform_sphere(stream(6, "x"), 50, 3)
        y = np.ones(50, dtype=int)
        model = Memorizer(bandwidth="median").fit(x, y)
        assert model.bandwidth_ > 0

    def test_fit_validation(self):
        with pytest.raises(ValueError):
            Memorizer().fit(np.zeros((0, 3)), np.zeros(0, dtype=int))
        with pytest.raises(ValueError):
            Memorizer(bandwidth=-1.0).fit(np.eye(2), np.array([1, 2]))

    def test_sklearn_params(self):
        model = Memorizer(bandwidth=0.3, decode="sample", random_state=1)
        params = model.get_params()
        assert params["bandwidth"] == 0.3
        clone = Memorizer(**params)
        assert clone.decode == "sample"

    def test_functional_wrapper(self):
        x = np.array([[1.0, 0.0], [0.0, 1.0]])
        model = Memorizer().fit(x, np.array([1, 2]))
        assert predict(model, [0.9, 0.1]) == 1

    def test_greedy_beats_sampling_on_average(self):
        # argmax of a posterior concentrated on the truth wins more often
        # than a draw from it; paired comparison over seeds
        greedy, sampled = [], []
        for seed in range(12):
            greedy.append(
                measure_error(3, 6, 256, 400, decode="greedy", seed=seed, bandwidth=0.3)
            )
            sampled.append(
                measure_error(3, 6, 256, 400, decode="sample", seed=seed, bandwidth=0.3)
            )
        assert np.mean(greedy) <= np.mean(sampled)


class TestMeasureError:
    def test_single_class_error_zero(self):
        assert measure_error(3, 1, 16, 200, seed=0) == 0.0

    def test_requires_sample_per_class(self):
        with pytest.raises(ValueError):
            measure_error(3, 10, 5, 100, seed=0)

    def test_error_decreases_with_data(self):
        errors = [
            np.mean([measure_error(3, 8, D, 500, seed=s) for s in range(5)])
            for D in (64, 256, 1024, 4096)
        ]
        rho = spearmanr(range(4), errors).statistic
        assert rho < 0

    def test_error_increases_with_classes(self):
        errors = [
            np.mean([measure_error(3, m, 2048, 500, seed=s) for s in range(5)])
            for m in (8, 16, 32, 64, 128, 256)
        ]
        rho = spearmanr(range(6), errors).statistic
        assert rho > 0.9

    def test_unbalanced_mode_runs(self):
        err = measure_error(3, 4, 64, 200, seed=1, balanced=False)
        assert 0.0 <= err <= 1.0


class TestSweep:
    def test_single_cell(self):
        rows = sweep([3], [4], [64], 1, seed=0, test_count=200)
        assert len(rows) == 1
        direct = measure_error(3, 4, 64, 200, seed=rows[0]["seed"])
        assert rows[0]["error"] == direct

    def test_row_count_factorial(self):
        rows = sweep([2, 3], [4, 8, 16], [64, 128], 2, seed=0, test_count=50)
        assert len(rows) == 2 * 3 * 2 * 2

    def test_csv_replay_byte_identical(self, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_sweep_csv(sweep([2], [4, 8], [64], 2, seed=9, test_count=100), p1)
        write_sweep_csv(sweep([2], [4, 8], [64], 2, seed=9, test_count=100), p2)
        assert p1.read_bytes() == p2.read_bytes()
        header = p1.read_text().splitlines()[0]
        assert header == "d,m,D,replicate,seed,decode,error"

    def test_resource_guard(self):
        with pytest.raises(ValueError):
            sweep([2], list(range(100)), [64], 100, seed=0, max_cells=50)

    def test_mean_errors_grouping(self):
        rows = [
            {"m": 2, "error": 0.1},
            {"m": 2, "error": 0.3},
            {"m": 4, "error": 0.5},
        ]
        assert mean_errors(rows, "m") == {2: pytest.approx(0.2), 4: 0.5}


class TestPowerLawFit:
    def test_reference_curve_free_fit(self):
        x, y = reference_curve_points()
        fit = fit_power_law(x, y)
        assert fit.a == pytest.approx(0.036, abs=1e-6)
        assert fit.b == pytest.approx(0.02, abs=1e-6)
        assert fit.exponent == pytest.approx(0.31, abs=1e-6)
        assert fit.d_estimate == pytest.approx(2 / 0.31, abs=1e-4)

    def test_quadratic_free_fit(self):
        x = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        fit = fit_power_law(x, 3 * x**2 + 1)
        assert fit.exponent == pytest.approx(2.0, abs=1e-6)
        assert fit.a == pytest.approx(3.0, abs=1e-6)
        assert fit.b == pytest.approx(1.0, abs=1e-6)

    def test_constant_data_fixed_mode(self):
        x = np.array([1.0, 2.0, 4.0, 8.0])
        fit = fit_power_law(x, np.full(4, 2.5), exponent=1.0)
        assert fit.a == pytest.approx(0.0, abs=1e-12)
        assert fit.b == pytest.approx(2.5)

    def test_fixed_mode_is_normal_equations(self):
        # residual vector orthogonal to the design columns
        rng = stream(7, "fit")
        x = rng.uniform(1, 50, 20)
        y = 0.7 * x**0.4 + 0.1 + rng.normal(0, 0.01, 20)
        fit = fit_power_law(x, y, exponent=0.4)
        resid = y - fit.predict(x)
        assert abs(np.dot(resid, x**0.4)) < 1e-10
        assert abs(resid.sum()) < 1e-10

    def test_points_argument_form(self):
        x, y = reference_curve_points()
        fit = fit_power_law(np.column_stack([x, y]))
        assert fit.exponent == pytest.approx(0.31, abs=1e-6)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            fit_power_law([1.0, 2.0], [1.0, 2.0])  # too few points
        with pytest.raises(ValueError):
            fit_power_law([0.0, 1.0, 2.0], [1.0, 2.0, 3.0])  # non-positive x
        with pytest.raises(ValueError):
            fit_power_law([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])  # singular design

    def test_estimator_wrapper(self):
        x, y = reference_curve_points()
        est = PowerLawRegression().fit(x, y)
        assert est.exponent_ == pytest.approx(0.31, abs=1e-6)
        assert est.d_estimate_ == pytest.approx(6.4516, abs=1e-3)
        np.testing.assert_allclose(est.predict(x), y, atol=1e-8)
        assert est.score(x, y) == pytest.approx(1.0)
        assert PowerLawRegression(exponent=0.31).fit(x, y).amplitude_ == pytest.approx(
            0.036, abs=1e-9
        )
