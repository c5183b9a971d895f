"""Acceptance gate: every criterion at its stated tolerance.

Run `pytest tests/test_acceptance.py -v -s` to get one pass/fail line per
criterion.  The replication studies here use the package defaults (20
replications, 500 test functions per draw) and are shared across criteria
through session fixtures.
"""

import math
import time

import numpy as np
import pytest

from conftest import independent_log_ratio, moderate_box_points
from fdnn import (
    Candidate,
    ExperimentConfig,
    HyperGrid,
    NetworkArchitecture,
    QDAModel,
    ScoreMatrix,
    TrainConfig,
    bayes_classify_many,
    draw_coefficients,
    eigendecompose,
    hinge_risk,
    inner_product,
    make_equispaced_grid,
    make_trapezoid_grid,
    oracle_log_ratio_many,
    predict_qda_many,
    read_results_csv,
    run_benchmark,
    run_replications,
    standard_spec,
    subgradient,
    train,
)
from fdnn.dnn import NetworkParams
from fdnn.grid import FunctionalObservation


def _verdict(num: int, description: str, check) -> None:
    try:
        check()
    except AssertionError as exc:
        print(f"criterion {num}: FAIL - {description} :: {exc}")
        raise
    print(f"criterion {num}: PASS - {description}")


def _bench(tmp_path_factory, dgp, sizes, replications, seed):
    out = tmp_path_factory.mktemp(f"dgp{dgp}") / "results.csv"
    cfg = ExperimentConfig(
        dgp=dgp,
        sizes=tuple(sizes),
        replications=replications,
        test_size=500,
        base_seed=seed,
        output=str(out),
        jobs=2,
        measure_runtime=False,
    )
    start = time.perf_counter()
    records = run_replications(cfg)
    elapsed = time.perf_counter() - start
    return records, elapsed


def _mean_rate(records, n, method):
    rates = [r.rate for r in records if r.n == n and r.method == method]
    return float(np.mean(rates))


def _paired_excess(records, n, method):
    """Mean and SE of (method rate - optimal-rule rate) over replications."""
    by_rep_method = {(r.replication, r.method): r.rate for r in records if r.n == n}
    reps = sorted({r.replication for r in records if r.n == n})
    diffs = np.array([by_rep_method[(rep, method)] - by_rep_method[(rep, "BAYES")] for rep in reps])
    se = float(diffs.std(ddof=1) / math.sqrt(diffs.size)) if diffs.size > 1 else 0.0
    return float(diffs.mean()), se


@pytest.fixture(scope="session")
def dgp1_study(tmp_path_factory):
    return _bench(tmp_path_factory, dgp=1, sizes=(40, 100, 200, 400), replications=20, seed=20_260_811)


@pytest.fixture(scope="session")
def dgp2_study(tmp_path_factory):
    return _bench(tmp_path_factory, dgp=2, sizes=(400,), replications=20, seed=20_260_812)


@pytest.fixture(scope="session")
def dgp3_study(tmp_path_factory):
    return _bench(tmp_path_factory, dgp=3, sizes=(40, 400), replications=20, seed=20_260_813)


@pytest.fixture(scope="session")
def dgp4_study(tmp_path_factory):
    return _bench(tmp_path_factory, dgp=4, sizes=(200,), replications=10, seed=20_260_814)


@pytest.fixture(scope="session")
def dgp5_study(tmp_path_factory):
    return _bench(tmp_path_factory, dgp=5, sizes=(200,), replications=10, seed=20_260_815)


class TestCriterion1:
    def test_dgp1_trend_and_band(self, dgp1_study):
        records, elapsed = dgp1_study

        def check():
            at_400 = _mean_rate(records, 400, "FDNN")
            at_40 = _mean_rate(records, 40, "FDNN")
            assert 0.07 <= at_400 <= 0.18, f"FDNN mean rate at n=400 is {at_400:.4f}, outside [0.07, 0.18]"
            assert at_400 < at_40, f"no improvement: {at_400:.4f} at n=400 vs {at_40:.4f} at n=40"
            assert elapsed <= 1800.0, f"benchmark took {elapsed:.0f}s, over the 30 minute budget"

        _verdict(1, "DGP1 rate band and large-n improvement within runtime budget", check)


class TestCriterion2:
    def test_dgp2_dominance(self, dgp2_study):
        records, _ = dgp2_study

        def check():
            fdnn = _mean_rate(records, 400, "FDNN")
            qd = _mean_rate(records, 400, "QD")
            nb = _mean_rate(records, 400, "NB")
            assert fdnn < qd, f"FDNN {fdnn:.4f} not below QD {qd:.4f}"
            assert fdnn < nb, f"FDNN {fdnn:.4f} not below NB {nb:.4f}"
            assert fdnn <= 0.22, f"FDNN mean rate {fdnn:.4f} above 0.22"

        _verdict(2, "DGP2 network beats both baselines and stays under 0.22", check)


class TestCriterion3:
    def test_dgp3_trend_and_band(self, dgp3_study):
        records, _ = dgp3_study

        def check():
            at_400 = _mean_rate(records, 400, "FDNN")
            at_40 = _mean_rate(records, 40, "FDNN")
            assert at_400 <= at_40 + 0.01, f"rate at n=400 ({at_400:.4f}) above rate at n=40 ({at_40:.4f}) + 0.01"
            assert 0.08 <= at_400 <= 0.20, f"FDNN mean rate at n=400 is {at_400:.4f}, outside [0.08, 0.20]"

        _verdict(3, "DGP3 large-n rate in band and no worse than small-n", check)


class TestCriterion4:
    def test_no_classifier_beats_the_optimal_rule(
        self, dgp1_study, dgp2_study, dgp3_study, dgp4_study, dgp5_study
    ):
        studies = {
            1: dgp1_study[0],
            2: dgp2_study[0],
            3: dgp3_study[0],
            4: dgp4_study[0],
            5: dgp5_study[0],
        }

        def check():
            for dgp_id, records in studies.items():
                for n in sorted({r.n for r in records}):
                    for method in ("FDNN", "QD", "NB"):
                        excess, se = _paired_excess(records, n, method)
                        assert excess >= -3.0 * se, (
                            f"DGP{dgp_id} n={n}: {method} paired excess {excess:.5f} "
                            f"below -3 SE ({-3 * se:.5f})"
                        )

        _verdict(4, "paired excess risk of every classifier on every process >= -3 SE", check)


class TestCriterion5:
    def test_dgp1_excess_risk_decreases_with_n(self, dgp1_study):
        records, _ = dgp1_study

        def check():
            sizes = (40, 100, 200, 400)
            stats = [_paired_excess(records, n, "FDNN") for n in sizes]
            means = [s[0] for s in stats]
            inversions = []
            for i in range(len(sizes) - 1):
                if means[i + 1] >= means[i]:
                    slack = math.sqrt(stats[i][1] ** 2 + stats[i + 1][1] ** 2)
                    inversions.append((sizes[i], sizes[i + 1], means[i + 1] - means[i], slack))
            detail = ", ".join(f"{n}:{m:.4f}" for n, m in zip(sizes, means))
            assert len(inversions) <= 1, f"more than one inversion in excess risks ({detail})"
            for n_lo, n_hi, gap, slack in inversions:
                assert gap <= slack, (
                    f"inversion {n_lo}->{n_hi} of {gap:.4f} exceeds 1 SE ({slack:.4f}); series {detail}"
                )

        _verdict(5, "DGP1 mean excess risk decreasing in n (one inversion within 1 SE allowed)", check)


class TestCriterion6:
    def test_oracle_equivalences(self):
        def check():
            rng = np.random.default_rng(20_260_806)
            for dgp_id in (1, 2, 3, 4, 5):
                spec = standard_spec(dgp_id)
                pts = moderate_box_points(spec, 10_000, rng)
                gap = np.max(np.abs(oracle_log_ratio_many(spec, pts) - independent_log_ratio(spec, pts)))
                assert gap <= 1e-10, f"DGP{dgp_id} log-ratio mismatch {gap:.2e} above 1e-10"
            spec = standard_spec(1)
            plugin = QDAModel(
                mean_pos=np.array([law.mean for law in spec.laws_pos]),
                var_pos=np.array([law.sd**2 for law in spec.laws_pos]),
                mean_neg=np.array([law.mean for law in spec.laws_neg]),
                var_neg=np.array([law.sd**2 for law in spec.laws_neg]),
                log_prior_pos=math.log(0.5),
                log_prior_neg=math.log(0.5),
            )
            _, xi = draw_coefficients(spec, 1_000_000, rng)
            agreement = float(np.mean(predict_qda_many(plugin, xi) == bayes_classify_many(spec, xi)))
            assert agreement >= 0.999, f"plug-in QDA agreement {agreement:.5f} below 0.999"

        _verdict(6, "log-ratio oracle matches independent densities; plug-in QDA matches its sign", check)


class TestCriterion7:
    def test_numerical_kernels(self):
        def check():
            # orthonormality and spectral trace on a nonuniform grid
            axis = np.concatenate([[0.0], np.sort(np.random.default_rng(1).uniform(0, 1, 23)), [1.0]])
            grid = make_trapezoid_grid([axis])
            rng = np.random.default_rng(2)
            r = rng.standard_normal((40, grid.size))
            cov = r.T @ r / 40.0
            eig = eigendecompose((cov + cov.T) / 2.0, grid, max_components=grid.size)
            gram = (eig.eigenfunctions * grid.weights) @ eig.eigenfunctions.T
            ortho_gap = np.max(np.abs(gram - np.eye(grid.size)))
            assert ortho_gap <= 1e-8, f"orthonormality gap {ortho_gap:.2e}"
            trace_gap = abs(eig.eigenvalues.sum() - float(np.sum(grid.weights * np.diag(cov))))
            assert trace_gap <= 1e-8, f"trace identity gap {trace_gap:.2e}"

            # rank-1 recovery
            g50 = make_equispaced_grid(1, [50])
            phi = np.cos(2 * np.pi * g50.points()[:, 0]) + 0.3
            eig1 = eigendecompose(np.outer(phi, phi), g50, max_components=3)
            f = FunctionalObservation(grid=g50, values=phi)
            unit = phi / math.sqrt(inner_product(f, f))
            lead = eig1.eigenfunctions[0]
            if lead[np.argmax(np.abs(lead))] * unit[np.argmax(np.abs(lead))] < 0:
                unit = -unit
            assert np.max(np.abs(lead - unit)) <= 1e-8, "rank-1 eigenfunction recovery failed"
            assert eig1.eigenvalues[1] <= 1e-10

            # backprop subgradients vs central differences, away from kinks
            from fdnn.dnn import _forward_arrays

            rng = np.random.default_rng(3)
            checked = 0
            while checked < 20:
                widths = tuple(rng.integers(2, 5, size=rng.integers(1, 3)))
                input_dim = int(rng.integers(1, 4))
                sizes = (input_dim, *widths, 1)
                weights = [rng.uniform(-0.7, 0.7, size=(sizes[l + 1], sizes[l])) for l in range(len(sizes) - 1)]
                shifts = [rng.uniform(-0.7, 0.7, size=sizes[l + 1]) for l in range(len(widths))]
                params = NetworkParams(weights=tuple(weights), shifts=tuple(shifts), bound=10.0)
                x = rng.uniform(-3, 3, size=(5, input_dim))
                y = rng.integers(0, 2, size=5) * 2 - 1
                _, pre, out = _forward_arrays(params.weights, params.shifts, x)
                if any(np.any(np.abs(z - v) < 1e-2) for z, v in zip(pre, params.shifts)):
                    continue
                if np.any(np.abs(np.abs(out) - 1.0) < 1e-2) or np.any(np.abs(out) < 1e-2):
                    continue
                batch = ScoreMatrix(scores=x, labels=y)
                grad = subgradient(params, batch)
                arrays = [np.array(a) for a in (*params.weights, *params.shifts)]
                grads = [*grad.weights, *grad.shifts]
                step = 1e-5
                for a_idx, arr in enumerate(arrays):
                    flat = arr.reshape(-1)
                    for i in range(flat.size):
                        plus = [a.copy() for a in arrays]
                        plus[a_idx].reshape(-1)[i] += step
                        minus = [a.copy() for a in arrays]
                        minus[a_idx].reshape(-1)[i] -= step
                        k = len(params.weights)
                        hi = hinge_risk(NetworkParams(tuple(plus[:k]), tuple(plus[k:]), 10.0), batch)
                        lo = hinge_risk(NetworkParams(tuple(minus[:k]), tuple(minus[k:]), 10.0), batch)
                        fd = (hi - lo) / (2 * step)
                        got = grads[a_idx].reshape(-1)[i]
                        # absolute floor covers finite-difference cancellation noise (~eps/step)
                        tol = max(1e-4 * max(abs(fd), abs(got)), 1e-7)
                        assert abs(got - fd) <= tol, f"gradient mismatch {got} vs {fd}"
                checked += 1

            # trained networks respect the bound exactly
            rngd = np.random.default_rng(4)
            data = ScoreMatrix(
                scores=rngd.standard_normal((60, 3)), labels=rngd.integers(0, 2, 60) * 2 - 1
            )
            for bound in (0.05, 0.5):
                arch = NetworkArchitecture(input_dim=3, depth=2, widths=(8, 8), bound=bound)
                params = train(data, arch, TrainConfig(epochs=10))
                largest = max(float(np.max(np.abs(a))) for a in (*params.weights, *params.shifts))
                assert largest <= bound, f"entry {largest} exceeds bound {bound}"

        _verdict(7, "eigenproblem, projection and backprop kernels within stated tolerances", check)


class TestCriterion8:
    def test_benchmark_determinism(self, tmp_path):
        def check():
            hyper = HyperGrid(candidates=(Candidate(1, 2, 8, 10.0), Candidate(1, 3, 8, 10.0)))
            trainer = TrainConfig(epochs=10, batch_size=32, learning_rate=0.1)

            def cfg(tag, jobs, measure):
                return ExperimentConfig(
                    dgp=1,
                    sizes=(40,),
                    replications=3,
                    test_size=80,
                    hyper=hyper,
                    train=trainer,
                    base_seed=99,
                    output=str(tmp_path / f"{tag}.csv"),
                    grid_axes=(30,),
                    jobs=jobs,
                    measure_runtime=measure,
                )

            run_benchmark(cfg("serial_a", 1, False))
            run_benchmark(cfg("serial_b", 1, False))
            run_benchmark(cfg("parallel", 2, False))
            a = (tmp_path / "serial_a.csv").read_bytes()
            assert a == (tmp_path / "serial_b.csv").read_bytes(), "serial rerun differs"
            assert a == (tmp_path / "parallel.csv").read_bytes(), "parallel run differs from serial"

            # with timing enabled the scientific columns still agree byte-for-byte
            run_benchmark(cfg("timed_a", 1, True))
            run_benchmark(cfg("timed_b", 2, True))
            rows_a = read_results_csv(tmp_path / "timed_a.csv")
            rows_b = read_results_csv(tmp_path / "timed_b.csv")
            stripped_a = [(r.dgp, r.n, r.method, r.rate, r.se) for r in rows_a]
            stripped_b = [(r.dgp, r.n, r.method, r.rate, r.se) for r in rows_b]
            assert stripped_a == stripped_b, "rates differ between timed serial and parallel runs"

        _verdict(8, "identical config and seed give bit-identical CSVs, serially and in parallel", check)
