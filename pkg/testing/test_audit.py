import pytest

from src.audit import Auditor
from src.config import SessionConfig
from src.words import compute_h_partition
from testing.conftest import CORPUS_FILES, R1_PARTITION, load

BAND_SUITES = {"band_facts", "band_quotients", "bridge_antisymmetry"}


@pytest.fixture
def small_config():
    return SessionConfig(word_bound=3, samples=25, max_len=8, prefix_bound=1)


def test_r1_passes(r1, small_config):
    report = Auditor(r1, compute_h_partition(r1, R1_PARTITION), small_config).run()
    assert report.passed, [(s.name, s.failures) for s in report.suites if not s.passed]
    assert [s.name for s in report.suites] == sorted(s.name for s in report.suites)
    assert not any(s.skipped for s in report.suites)


def test_g23_skips_band_suites(g23, small_config):
    report = Auditor(g23, compute_h_partition(g23), small_config).run()
    skipped = {s.name for s in report.suites if s.skipped}
    assert skipped == BAND_SUITES
    assert all(s.reason == "non-domestic" for s in report.suites if s.skipped)


def test_report_is_deterministic(kronecker, small_config):
    H = compute_h_partition(kronecker)
    first = Auditor(kronecker, H, small_config).run()
    second = Auditor(kronecker, H, small_config).run()
    assert first.model_dump_json() == second.model_dump_json()
    assert first.seed == 42
    assert first.partition == {"1": {"a^-1": 1, "b^-1": -1}, "2": {"a": 1, "b": -1}}


def test_failures_are_logged_not_raised(r1, small_config, caplog):
    auditor = Auditor(r1, compute_h_partition(r1, R1_PARTITION), small_config)
    result = auditor._run("always_failing", [1, 2], lambda case: f"case {case} failed")
    assert not result.passed
    assert result.checked == 2
    assert result.failures == ["case 1 failed", "case 2 failed"]
    assert "always_failing" in caplog.text


@pytest.mark.slow
@pytest.mark.parametrize("name", CORPUS_FILES)
def test_word_suites_at_full_bounds(name):
    A = load(name)
    H = compute_h_partition(A, R1_PARTITION if name == "r1.alg" else None)
    auditor = Auditor(A, H, SessionConfig(word_bound=8, samples=1000))
    for suite in (auditor.word_order(), auditor.leftmost_word(), auditor.triangle_inequality(),
                  auditor.homogeneity(), auditor.division()):
        assert suite.passed, (suite.name, suite.failures[:5])
        assert suite.checked > 0
