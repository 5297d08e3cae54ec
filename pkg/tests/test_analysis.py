import json
import math

import pytest

from markovlab.analysis import (
    SweepAborted,
    SweepConfig,
    fit_exponent,
    format_factor_csv_rows,
    report_to_json,
    sweep_extremal,
    sweep_factor,
    sweep_schur,
    verify_all,
)
from markovlab.config import config_from_dict
from markovlab.domains import koornwinder, simplex_weighted
from markovlab.norms import NormSpec
from markovlab.spectral import FactorPoint


class TestFitExponent:
    def test_exact_power_law(self):
        pts = [(n, 3.0 * n**4) for n in range(2, 12)]
        fit = fit_exponent(pts)
        assert fit.slope == pytest.approx(4.0, abs=1e-12)
        assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-12)
        assert fit.max_abs_residual < 1e-12
        assert fit.n_range == (2, 11)

    def test_accepts_factor_points(self):
        pts = [FactorPoint(n, float(n * n), "eigen") for n in (2, 4, 8)]
        assert fit_exponent(pts).slope == pytest.approx(2.0, abs=1e-12)

    def test_needs_three_points(self):
        with pytest.raises(ValueError):
            fit_exponent([(1, 1.0), (2, 4.0)])

    def test_rejects_nonpositive_values(self):
        with pytest.raises(ValueError):
            fit_exponent([(1, 1.0), (2, 0.0), (3, 9.0)])

    def test_rejects_zero_abscissa(self):
        with pytest.raises(ValueError):
            fit_exponent([(0, 1.0), (2, 4.0), (3, 9.0)])


class TestSweepExtremal:
    def test_first_family_anchors(self):
        spec = NormSpec(math.inf, koornwinder())
        pts = sweep_extremal("pk", [1, 2, 3], spec)
        assert [p.n for p in pts] == [1, 6, 11]  # degrees 5k-4
        assert all(p.method == "extremal-sequence" for p in pts)
        assert pts[0].value == pytest.approx(0.25, rel=1e-12)

    def test_second_family_degree(self):
        spec = NormSpec(math.inf, koornwinder())
        pts = sweep_extremal("qk", [2], spec)
        assert pts[0].n == 7
        assert pts[0].value >= 16.0

    def test_wn_family(self):
        from markovlab.domains import delta_l

        spec = NormSpec(2.0, delta_l(3))
        pts = sweep_extremal("wn", [8, 9], spec, alpha=14.0)
        assert [p.n for p in pts] == [9, 10]
        assert pts[1].value > 0.0

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            sweep_extremal("zz", [1, 2, 3], NormSpec(2.0, koornwinder()))


class TestSweepFactor:
    def test_threads_do_not_change_values(self):
        ns = range(1, 6)
        seq = sweep_factor(koornwinder(), "y", ns, threads=1)
        par = sweep_factor(koornwinder(), "y", ns, threads=4)
        assert [p.n for p in seq] == [p.n for p in par]
        assert [p.value for p in seq] == [p.value for p in par]

    def test_csv_cells_byte_identical_across_threads(self):
        rows1 = format_factor_csv_rows(sweep_schur(range(2, 7), threads=1))
        rows8 = format_factor_csv_rows(sweep_schur(range(2, 7), threads=8))
        assert rows1 == rows8

    def test_abort_carries_prefix(self):
        with pytest.raises(SweepAborted) as exc:
            sweep_factor(koornwinder(), "y", range(1, 9), cond_limit=100.0)
        err = exc.value
        assert err.failed_n == 6
        assert [p.n for p in err.partial] == [1, 2, 3, 4, 5]

    def test_abort_in_parallel(self):
        with pytest.raises(SweepAborted) as exc:
            sweep_factor(koornwinder(), "y", range(1, 9), threads=4, cond_limit=100.0)
        assert exc.value.failed_n == 6
        assert [p.n for p in exc.value.partial] == [1, 2, 3, 4, 5]

    def test_sweep_config_validation(self):
        with pytest.raises(ValueError):
            SweepConfig(simplex_weighted(), "x", 2.0, (3, 3), "eigen")


@pytest.fixture(scope="module")
def quick_cfg():
    return config_from_dict(
        {
            "acceptance": {
                "criteria": [1, 2, 9, 10],
                "pullback_samples": 5,
                "identity_samples": 10,
                "oracle_max_degree": 2,
            }
        }
    )


class TestVerifyAll:
    def test_reduced_run_passes(self, quick_cfg):
        report = verify_all(quick_cfg)
        assert report.all_passed
        assert [r.cid for r in report.results] == [1, 2, 9, 10]
        assert all(r.details for r in report.results)

    def test_report_json_stable(self, quick_cfg):
        a = report_to_json(verify_all(quick_cfg, threads=1))
        b = report_to_json(verify_all(quick_cfg, threads=2))
        assert a == b
        doc = json.loads(a)
        assert doc["all_passed"] is True
        assert len(doc["criteria"]) == 4

    def test_durations_not_serialized(self, quick_cfg):
        report = verify_all(quick_cfg)
        assert report.durations  # measured in-process
        assert "durations" not in json.loads(report_to_json(report))

    def test_empty_criteria_list(self):
        cfg = config_from_dict({"acceptance": {"criteria": []}})
        report = verify_all(cfg)
        assert report.all_passed
        assert report.results == []

    def test_failure_is_report_entry_not_exception(self):
        # shrink the extremal window so criterion 4 must miss it
        cfg = config_from_dict(
            {
                "acceptance": {
                    "criteria": [4],
                    "extremal_index_range": [4, 8],
                    "extremal_slope_window": [0.1, 0.2],
                }
            }
        )
        report = verify_all(cfg)
        assert not report.all_passed
        assert report.results[0].passed is False
        assert "OUTSIDE window" in report.results[0].details


class TestFitStability:
    def test_drop_first_point(self):
        """The fitted exponent should not hinge on the smallest degree."""
        pts = sweep_factor(koornwinder(), "y", range(4, 15))
        full = fit_exponent(pts).slope
        trimmed = fit_exponent(pts[1:]).slope
        assert abs(full - trimmed) < 0.15
