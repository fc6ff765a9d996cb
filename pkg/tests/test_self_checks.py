"""Tests for self_checks.py."""
from self_checks import run_checks


def test_every_check_passes() -> None:
    results = run_checks({})
    failed = [result.name for result in results if not result.passed]
    assert failed == []
    assert {'mm_per_mhz', 'full_span_mm', 'skin_depth_um', 'larmor_150mg_khz',
            'noiseless_fit'} <= {result.name for result in results}


def test_wrong_acoustic_speed_fails_the_steering_checks() -> None:
    results = {result.name: result for result in run_checks({'EMISCAN_ACOUSTIC_SPEED': '700'})}
    assert not results['mm_per_mhz'].passed
    assert not results['full_span_mm'].passed
    assert results['skin_depth_um'].passed


def test_results_serialise() -> None:
    for result in run_checks({}):
        document = result.to_dict()
        assert set(document) == {'name', 'passed', 'value', 'expected'}
