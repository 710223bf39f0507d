#!/usr/bin/env python3
"""
Test the inequality checks and the verification suite runner
"""

import math
import sys
from dataclasses import replace

import numpy as np
import pytest

from berwald import MomentProfile, phi_gamma
from functionals import CovariogramFn
from numerics import direction_grid
from presets import Presets, SuiteDefaults
from verify import (CheckReport, CheckStatus, SuiteConfig, VerificationSuite, run_suite,
                    suite_names, suite_passed, verify_affine_invariance, verify_classical_berwald,
                    verify_final_inclusion, verify_holder_mean, verify_lemma21, verify_lemma31,
                    verify_lemma33, verify_rearrangement, verify_remark1, verify_remark2,
                    verify_remark3, verify_thm11, verify_zhang_consistency,
                    verify_zhang_functional, verify_zhang_petty_body)


def circle(count=360):
    return direction_grid(2, count)


# --- individual checks -----------------------------------------------------

def test_lemma21_power_profile():
    report = verify_lemma21(Presets.profile("power:0.5"))
    assert report.passed
    assert report.lhs > report.rhs
    assert report.name == "lemma21:power:0.5"


def test_lemma21_linear_profile_is_constant():
    report = verify_lemma21(Presets.profile("linear:3"))
    assert report.passed
    assert "numerically constant=True" in report.details
    assert report.lhs == pytest.approx(3.0, rel=1e-7)


def test_lemma21_all_diverged_is_skipped():
    vanishing = MomentProfile.sampled([0.0, 1.0, 2.0, 3.0], [0.0, 0.0, 1.0, 2.0])
    report = verify_lemma21(vanishing, p_grid=(-0.9, -0.5))
    assert report.status is CheckStatus.SKIPPED_DIVERGED
    assert suite_passed([report])


def test_thm11_unit_interval():
    f = Presets.function("indicator:interval01")
    report = verify_thm11(f, Presets.witness("affine:x", 1))
    assert report.passed
    assert report.margin >= 0


def test_thm11_chord_witness_on_simplex():
    f = Presets.function("expnorm:simplex2")
    report = verify_thm11(f, Presets.witness("chord", 2))
    assert report.passed
    assert "level route" in report.details


def test_zhang_petty_body_bounds():
    simplex = verify_zhang_petty_body(Presets.body("simplex2"), circle(720))
    assert simplex.passed
    assert simplex.lhs == pytest.approx(1.5, rel=1e-3)
    disk = verify_zhang_petty_body(Presets.body("disk"), circle(720))
    assert disk.passed
    assert disk.lhs == pytest.approx(math.pi ** 2 / 4.0, rel=1e-6)


def test_zhang_functional_square_indicator():
    f = Presets.function("indicator:square")
    report = verify_zhang_functional(f, circle(), mc_samples=20_000, seed=1)
    assert report.passed
    assert report.lhs == pytest.approx(16.0, rel=1e-3)
    assert report.rhs == pytest.approx(64.0, rel=1e-3)
    assert report.margin == pytest.approx(-0.75, abs=1e-3)


def test_zhang_functional_simplex_equality():
    f = Presets.function("expnorm:simplex2")
    report = verify_zhang_functional(f, circle(720), mc_samples=50_000, seed=2,
                                     expect_equality=True)
    assert report.passed
    assert report.margin == pytest.approx(0.0, abs=1e-2)
    assert "equality_like=True" in report.details


def test_zhang_functional_is_strict_off_simplices():
    reports = {descriptor: verify_zhang_functional(Presets.function(descriptor), circle(720),
                                                   mc_samples=20_000, seed=3)
               for descriptor in ("expnorm:disk", "gaussian:2")}
    for report in reports.values():
        assert report.passed
        assert report.lhs / report.rhs < 1.0
    # 1.5 / (pi^2 / 4) for the disk
    assert reports["expnorm:disk"].margin == pytest.approx(6.0 / math.pi ** 2 - 1.0, rel=1e-3)


def test_zhang_consistency_square():
    report = verify_zhang_consistency(Presets.body("square"), circle())
    assert report.passed
    # binom(4,2)/2^2 / |K| |Pi*K| = 1.5 / 2
    assert report.rhs == pytest.approx(0.75, rel=1e-3)


def test_rearrangement_reproduces_functional():
    f = Presets.function("indicator:interval01")
    report = verify_rearrangement(f, Presets.witness("affine:x", 1), p_values=(1.0,),
                                  tolerance=2e-3)
    assert report.passed
    assert report.rhs == pytest.approx(0.5, rel=1e-6)


def test_lemma31_identities():
    assert verify_lemma31(Presets.function("expnorm:square"), circle()).passed
    assert verify_lemma31(Presets.function("expnorm:simplex2"), circle(720)).passed
    one_dim = verify_lemma31(Presets.function("expnorm:interval"), direction_grid(1, 2))
    assert one_dim.passed
    assert one_dim.rhs == pytest.approx(2.0)
    covariogram = verify_lemma31(CovariogramFn(Presets.function("gaussian:2")), circle(72))
    assert covariogram.passed


def test_lemma33_interval():
    report = verify_lemma33(Presets.function("expnorm:interval"), [1.0], 1.0)
    assert report.passed
    assert report.lhs == pytest.approx(2.0, rel=1e-6)
    assert report.rhs == pytest.approx(2.0, rel=1e-6)


def test_lemma33_square_direction():
    u = np.array([1.0, 1.0]) / math.sqrt(2.0)
    assert verify_lemma33(Presets.function("expnorm:square"), u, 2.0).passed


def test_remark2_inclusions():
    report = verify_remark2(Presets.function("expnorm:square"), 1.0, 2.0, circle(72))
    assert report.passed
    assert report.rhs == pytest.approx(1.0 / math.sqrt(2.0))
    with pytest.raises(ValueError):
        verify_remark2(Presets.function("expnorm:square"), 2.0, 1.0, circle(72))


def test_remark2_gaussian_sandwich():
    gauss = Presets.function("gaussian:2")
    report = verify_remark2(gauss, 1.0, 2.0, circle(72))
    assert report.passed
    # rho_1 = sqrt(pi/2), rho_2 = sqrt(2)
    assert report.lhs == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-6)
    assert verify_remark2(gauss, 0.5, 3.0, circle(72)).passed


def test_final_inclusion():
    assert verify_final_inclusion(Presets.function("indicator:square"), circle(72)).passed


def test_affine_invariance():
    shear = np.array([[1.0, 1.0], [0.0, 1.0]])
    report = verify_affine_invariance(Presets.body("square"), shear, [0.5, 0.0], circle())
    assert report.passed
    assert report.rhs == pytest.approx(2.0, rel=1e-4)


def test_remark3_limit():
    report = verify_remark3(Presets.function("expnorm:square"), [1.0, 0.0])
    assert report.passed
    assert report.rhs == pytest.approx(0.25)
    assert report.lhs == pytest.approx(0.254262, rel=1e-4)


def test_classical_berwald_and_holder():
    interval = Presets.body("interval01")
    descending = Presets.concave_function("affine:-1,1", interval)
    report = verify_classical_berwald(interval, descending, "affine:-1,1")
    assert report.passed
    assert report.lhs == pytest.approx(1.0, rel=1e-7)
    rising = Presets.concave_function("affine:1,0", interval)
    assert verify_holder_mean(interval, rising, "affine:1,0").passed


def test_remark1_limit():
    gamma = Presets.profile("power:0.5")
    report = verify_remark1("power:0.5", lambda p: phi_gamma(gamma, p))
    assert report.passed
    assert report.lhs == pytest.approx(1.33457, rel=1e-5)


def test_report_serialisation():
    report = CheckReport("x", CheckStatus.SKIPPED_DIVERGED, math.nan, math.inf, 0.5, 1e-3)
    record = report.to_dict()
    assert record["status"] == "skipped-diverged"
    assert record["lhs"] is None and record["rhs"] is None
    assert record["margin"] == 0.5
    assert not report.passed


# --- suite runner ----------------------------------------------------------

def test_suite_config_validation():
    with pytest.raises(ValueError):
        SuiteConfig(suites=("nonsense",))
    with pytest.raises(ValueError):
        SuiteConfig(dim=4)
    with pytest.raises(ValueError):
        SuiteConfig(tolerance=0.0)
    assert suite_names("all") == SuiteDefaults.SUITES
    assert suite_names("zhang, affine") == ("zhang", "affine")


def test_suite_config_from_options():
    config = SuiteConfig.from_options({"suites": "zhang", "grid_size": "90", "seed": "7",
                                       "tolerance": "1e-2", "presets": "square, disk",
                                       "timings": "yes"})
    assert config.suites == ("zhang",)
    assert config.grid_size == 90
    assert config.seed == 7
    assert config.tolerance == 1e-2
    assert config.presets == ("square", "disk")
    assert config.timings


def test_case_selection_by_presets():
    config = SuiteConfig(suites=("zhang",), presets=("simplex2",), grid_size=90)
    names = [case.suite for case in VerificationSuite(config).cases()]
    assert names == ["zhang", "zhang", "zhang"]
    assert VerificationSuite(replace(config, presets=())).cases() == []


def test_empty_suite_passes():
    reports = run_suite(SuiteConfig(presets=()))
    assert reports == []
    assert suite_passed(reports)


def test_suite_is_deterministic():
    config = SuiteConfig(suites=("lemma21",), grid_size=90)
    first = [report.to_dict() for report in run_suite(config)]
    second = [report.to_dict() for report in run_suite(config)]
    assert first == second
    assert len(first) == 3
    assert all(record["runtime_ms"] == 0.0 for record in first)
    assert all(record["status"] == "pass" for record in first)


def test_timings_are_opt_in():
    config = SuiteConfig(suites=("lemma21",), presets=("linear:3",), grid_size=90, timings=True)
    reports = run_suite(config)
    assert len(reports) == 1
    assert reports[0].runtime_ms > 0.0


def test_tolerance_override_can_fail_the_suite():
    config = SuiteConfig(suites=("zhang",), presets=("simplex2",), grid_size=360,
                         mc_samples=20_000, tolerance=1e-12)
    reports = run_suite(config)
    assert len(reports) == 3
    assert not suite_passed(reports)
    assert all(report.tolerance == 1e-12 for report in reports)


if __name__ == "__main__":
    print("=== Testing the verification suite ===")
    sys.exit(pytest.main([__file__, "-q"]))
