from __future__ import annotations

import math

import numpy as np
import pytest

from model.global_constants import BAND_SPREAD, FS_TOTAL_FACTOR
from model.validation.run_report import RunReport
from src.collections.report_collection import ReportCollection, band_checks
from src.spms.core import sort


def make_report(**fields) -> RunReport:
    names = getattr(RunReport, 'model_fields', None) or RunReport.__fields__
    record = {key: 0 for key in names if key != 'schema_version'}
    record.update(n=1024, p=4, seed=1, c=6, M=64, B=4, b=8, s=16, tp_estimate=0.0, kernels=1)
    record.update(fields)
    return RunReport(**record)


def work_span_ratios(n: int):
    keys = np.random.default_rng(n).integers(0, 2 ** 40, size=n).tolist()
    dag = sort(keys, block_words=4).dag
    log_n = math.log2(n)
    return dag.work() / (n * log_n), dag.span() / (log_n * math.log2(log_n))


def test_work_and_span_stay_in_band_over_a_small_sweep() -> None:
    works, spans = zip(*(work_span_ratios(n) for n in (256, 1024, 2048)))
    assert max(works) <= BAND_SPREAD * min(works)
    assert max(spans) <= BAND_SPREAD * min(spans)


def test_clean_run_passes_every_band() -> None:
    report = make_report(steals=3, fs_delay=10, max_block_delay=4, span=200)
    assert all(passed for _, passed, _ in band_checks(report))


def test_fs_total_band_scales_with_steals() -> None:
    report = make_report(steals=1, fs_delay=FS_TOTAL_FACTOR * 4 + 1)
    failed = [suite for suite, passed, _ in band_checks(report) if not passed]
    assert failed == ['fs total']


@pytest.mark.parametrize('n, applies', [(8, False), (16, True), (64, True), (65, False)])
def test_small_input_bound_applies_between_b_squared_and_m(n: int, applies: bool) -> None:
    suites = [suite for suite, _, _ in band_checks(make_report(n=n))]
    assert ('small input misses' in suites) == applies


def test_band_failures_flag_a_work_outlier() -> None:
    collection = ReportCollection()
    for n in (256, 1024, 4096):
        log_n = math.log2(n)
        collection.add_report(make_report(n=n, work=int(5 * n * log_n), span=int(30 * log_n * math.log2(log_n)),
                                          q_seq=int(n * log_n / (4 * 6))))
    assert collection.band_failures() == []
    collection.add_report(make_report(n=8192, work=20 * 8192 * 13, span=int(30 * 13 * math.log2(13)),
                                      q_seq=int(8192 * 13 / 24)))
    failures = collection.band_failures()
    assert len(failures) == 1
    assert failures[0].startswith('work_ratio')


def test_band_failures_ignore_tiny_inputs() -> None:
    collection = ReportCollection()
    collection.add_report(make_report(n=2))
    assert collection.band_failures() == []
