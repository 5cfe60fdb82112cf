import csv
import io
import math

import numpy as np
import pytest

from bucketing.codes import (
    classical_code,
    code_success_exact,
    full_space_code,
    shell_analytics,
    shell_code,
)
from bucketing.errors import DimensionMismatch, DomainError
from bucketing.probmodel import bernoulli_matrix
from bucketing.rng import derive_rng
from bucketing.simharness import (
    CSV_FIELDS,
    baseline_exponents,
    cauchy_baseline,
    exponent_table,
    result_row,
    run_experiment,
    sparse_hash_experiment,
    write_csv,
)


class TestRunExperiment:
    def test_full_space_always_succeeds(self):
        res = run_experiment(
            full_space_code(4), bernoulli_matrix(0.8), 4, 3, 3, 50, seed=1
        )
        assert res.empirical_S == 1.0
        assert res.successes == res.trials == 50
        assert res.mean_comparisons == 9.0

    def test_deterministic(self):
        code = shell_code(8, 5, 3, seed=2)
        P = bernoulli_matrix(0.9)
        a = run_experiment(code, P, 8, 4, 4, 200, seed=5)
        b = run_experiment(code, P, 8, 4, 4, 200, seed=5)
        assert a == b

    def test_seed_changes_outcome(self):
        code = shell_code(8, 5, 3, seed=2)
        P = bernoulli_matrix(0.9)
        a = run_experiment(code, P, 8, 4, 4, 200, seed=5)
        b = run_experiment(code, P, 8, 4, 4, 200, seed=6)
        assert a != b

    def test_tracks_exact_success(self):
        code = shell_code(10, 6, 4, seed=3)
        P = bernoulli_matrix(0.9)
        exact = code_success_exact(code, P)
        res = run_experiment(code, P, 10, 3, 3, 2000, seed=9)
        sigma = math.sqrt(exact * (1 - exact) / 2000)
        assert abs(res.empirical_S - exact) < 3 * sigma
        assert res.predicted_S == pytest.approx(exact)

    def test_operation_accounting(self):
        code = shell_code(10, 6, 4, seed=3)
        P = bernoulli_matrix(0.9)
        n = 3
        res = run_experiment(code, P, 10, n, n, 1000, seed=4)
        budget = 2 * n + 3 * res.predicted_W
        ops = 2 * n + res.mean_lookups + res.mean_comparisons
        assert ops <= budget * 1.1  # loose; the tight 3-sigma check is below
        # expected lookups are exactly 2 n T p_star
        target = 2 * n * 4 * (
            (math.comb(10, 5) + math.comb(10, 6)) / 1024
        )
        sigma = 3 * math.sqrt(target / 1000)  # crude Poisson-scale band
        assert abs(res.mean_lookups - target) < sigma

    def test_validation(self):
        with pytest.raises(DomainError):
            run_experiment(full_space_code(4), bernoulli_matrix(0.8),
                           4, 2, 2, 0, seed=0)
        with pytest.raises(DimensionMismatch):
            run_experiment(full_space_code(4), bernoulli_matrix(0.8),
                           5, 2, 2, 5, seed=0)


class TestBaselines:
    def test_reference_values(self):
        rec = baseline_exponents(0.9)
        assert rec["classical"] == pytest.approx(1.15200309344505)
        assert rec["improved"] == pytest.approx(1 / 0.9)
        assert rec["indyk_motwani"] == pytest.approx(1.2)
        assert rec["mnp_lower"] == pytest.approx(2 / (1 + math.exp(-0.2)))

    def test_limits_coincide_near_half(self):
        rec = baseline_exponents(0.5 + 1e-9)
        assert rec["classical"] == pytest.approx(2.0, abs=1e-6)
        assert rec["improved"] == pytest.approx(2.0, abs=1e-6)

    def test_improvement_ordering(self):
        for p in (0.6, 0.75, 0.9):
            rec = baseline_exponents(p)
            assert rec["improved"] < rec["classical"]

    def test_validation(self):
        with pytest.raises(DomainError):
            baseline_exponents(0.5)
        with pytest.raises(DomainError):
            baseline_exponents(1.0)


class TestExponentTable:
    def test_row_shape_and_fields(self):
        rows = exponent_table(0.9, [40, 80], 0.1)
        assert [r.d for r in rows] == [40, 80]
        for r in rows:
            assert r.ratio > 0
            assert r.d0 == round((1 + 0.1) * r.d / 2)
            assert r.ln_n_over_d > 0 and r.ln_T_over_d > 0

    def test_ratio_trends_toward_limit(self):
        rows = exponent_table(0.9, [50, 100, 200, 400], 0.1)
        limit_ratio = rows[0].limit_ln_T_over_d / rows[0].limit_ln_n_over_d
        gaps = [abs(r.ratio - limit_ratio) for r in rows]
        assert gaps == sorted(gaps, reverse=True)

    def test_limit_values_match_rate_function(self):
        def rate(q):
            return q * math.log(2 * q) + (1 - q) * math.log(2 * (1 - q))

        rows = exponent_table(0.8, [60], 0.12)
        assert rows[0].limit_ln_n_over_d == pytest.approx(rate(0.56))
        assert rows[0].limit_ln_T_over_d == pytest.approx(
            0.8 * rate((1 + 0.15) / 2)
        )

    def test_validation(self):
        with pytest.raises(DomainError):
            exponent_table(0.9, [50], 0.95)
        with pytest.raises(DomainError):
            exponent_table(0.3, [50], 0.1)


class TestCauchy:
    def test_sign_agreement_near_two_thirds(self):
        freq = cauchy_baseline(4 * 10**4, seed=8)
        assert abs(freq - 2 / 3) < 0.01

    def test_independent_pairs_agree_half_the_time(self):
        # control: with no shared summand the signs are independent
        u = derive_rng(3, "control").uniform(size=(4 * 10**4, 4))
        c = np.tan(np.pi * (u - 0.5))
        freq = np.mean(
            np.sign(c[:, 0] + c[:, 1]) == np.sign(c[:, 2] + c[:, 3])
        )
        assert abs(freq - 0.5) < 0.01

    def test_sample_floor(self):
        with pytest.raises(DomainError):
            cauchy_baseline(100, seed=0)


class TestSparseHash:
    def test_report_structure(self):
        rep = sparse_hash_experiment(0.05, 2, 16, 40, seed=6)
        for method in ("first_k_ones", "cauchy"):
            assert 0.0 <= rep[method]["success"] <= 1.0
            assert rep[method]["mean_comparisons"] >= 0.0
        assert rep["predicted_exponents"]["cauchy"] == pytest.approx(
            math.log2(3)
        )
        assert rep["predicted_exponents"]["first_k_ones"] == pytest.approx(
            1 + math.log(3) / math.log(10.0)
        )

    def test_deterministic(self):
        a = sparse_hash_experiment(0.05, 2, 16, 20, seed=6)
        b = sparse_hash_experiment(0.05, 2, 16, 20, seed=6)
        assert a == b

    def test_first_ones_hash_catches_related_points(self):
        rep = sparse_hash_experiment(0.05, 1, 8, 250, seed=2)
        assert rep["first_k_ones"]["success"] > 0.05

    def test_validation(self):
        with pytest.raises(DomainError):
            sparse_hash_experiment(0.4, 2, 16, 10, seed=0)
        with pytest.raises(DomainError):
            sparse_hash_experiment(0.05, 0, 16, 10, seed=0)


class TestCsv:
    def test_schema_round_trip(self):
        code = classical_code(6, 2, 2, seed=1)
        P = bernoulli_matrix(0.9)
        res = run_experiment(code, P, 6, 4, 4, 50, seed=3)
        text = write_csv([result_row("exp-1", code, 0.9, 4, 4, res)])
        rows = list(csv.DictReader(io.StringIO(text)))
        assert len(rows) == 1
        assert list(rows[0].keys()) == CSV_FIELDS
        assert rows[0]["kind"] == "classical"
        assert float(rows[0]["empirical_S"]) == res.empirical_S
        assert int(rows[0]["T"]) == code.T
