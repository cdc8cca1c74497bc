import pytest

from src.errors import ParseError
from src.exact_arith import ExtReal
from src.reports import reports_frame, suite_summary
from src.spaces import ExplicitSemiring, FiniteSet, FiniteUniverse, MeasureSpace, materialized, validate_semiring
from src.suite import (
    DEFAULT_COUNTS,
    SUITES,
    SuiteConfig,
    flag_corruption,
    instance_seed,
    run_instance,
    run_suite,
    semiring_oracle,
)


def small(suites, n=2, **extra) -> SuiteConfig:
    return SuiteConfig.from_dict({"suites": list(suites), "counts": {s: n for s in suites}, **extra})


def test_defaults_cover_every_suite():
    config = SuiteConfig()
    assert config.suites == SUITES
    assert config.count("witness_soundness") == DEFAULT_COUNTS["witness_soundness"] == 1000


@pytest.mark.parametrize(
    "payload",
    [
        {"colour": "blue"},
        {"suites": ["semiring_axioms", "fuzzing"]},
        {"counts": {"outer_axioms": -1}},
        {"counts": ["outer_axioms"]},
        {"seed": True},
        {"include_corrupted": "yes"},
        ["semiring_axioms"],
    ],
)
def test_bad_configs_are_parse_errors(payload):
    with pytest.raises(ParseError):
        SuiteConfig.from_dict(payload)


def test_no_suites_means_no_reports():
    assert list(run_suite(SuiteConfig.from_dict({"suites": []}))) == []


def test_instance_seeds_differ_by_suite_and_index():
    seeds = {instance_seed(0, suite, i) for suite in SUITES for i in range(3)}
    assert len(seeds) == len(SUITES) * 3
    assert instance_seed(5, "certification", 1) == instance_seed(5, "certification", 1)


@pytest.mark.parametrize("suite", SUITES)
def test_each_suite_passes_on_a_few_instances(suite):
    reports = list(run_suite(small([suite])))
    assert [r.index for r in reports] == [0, 1]
    assert all(r.passed for r in reports), [r.verdicts for r in reports if not r.passed]


def test_negative_path_marks_expected_negatives():
    report = run_instance("negative_path", 0, small(["negative_path"]))
    assert report.expected_negative
    assert not report.verdicts["corrupted"].passed

    control_only = run_instance("negative_path", 0, small(["negative_path"], include_corrupted=False))
    assert not control_only.expected_negative
    assert "corrupted" not in control_only.verdicts


def test_runs_are_reproducible_without_timing():
    config = small(["semiring_axioms", "product_exactness", "witness_soundness"], seed=9)
    first = [r.to_json(include_timing=False) for r in run_suite(config)]
    second = [r.to_json(include_timing=False) for r in run_suite(config)]
    assert first == second
    assert "wall_time" not in first[0]


def test_oracle_agrees_on_small_families():
    chain = ExplicitSemiring(FiniteUniverse(2), (FiniteSet(), FiniteSet.of(0), FiniteSet.of(0, 1)))
    assert not semiring_oracle(chain)
    power = ExplicitSemiring(FiniteUniverse(2), tuple(FiniteUniverse(2).subsets()))
    assert semiring_oracle(power)
    assert validate_semiring(power).valid


def test_counting_measure_is_not_flagged(counting3):
    report = flag_corruption(counting3)
    assert report.passed
    assert report.details["splits"] > 0


def test_bumped_total_is_flagged(counting3):
    table = materialized(counting3)
    whole = FiniteSet.of(0, 1, 2)
    bumped = table.measure.with_value(table.semiring.index_of(whole), ExtReal(4))
    report = flag_corruption(MeasureSpace(table.universe, table.semiring, bumped))
    assert not report.passed
    additivity = [v for v in report.violations if v["detector"] == "finite_additivity"]
    assert additivity and all((v["lhs"], v["rhs"]) == (ExtReal(4), ExtReal(3)) for v in additivity)
    assert {v["half"] for v in report.violations if v["detector"] == "certification"} == {"exact"}


def test_reports_flatten_into_a_frame():
    reports = list(run_suite(small(["semiring_axioms", "outer_axioms"])))
    frame = reports_frame(reports)
    assert list(frame.columns) == ["suite", "index", "seed", "passed", "expected_negative", "wall_time"]
    assert len(frame) == 4
    summary = suite_summary(frame)
    assert summary.loc["semiring_axioms", "instances"] == 2
    assert summary["failed"].sum() == 0
