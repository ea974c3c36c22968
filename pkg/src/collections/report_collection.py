import math
from pathlib import Path
from typing import Any, Dict, List, Tuple

import numpy as np
import pandas as pd

from model.global_constants import (
    BAND_SPREAD, BLOCK_DELAY_FACTOR, FS_TOTAL_FACTOR, MISS_BAND_FACTOR, MISS_CALIBRATION_N,
    SMALL_INPUT_MISS_FACTOR, STEAL_COUNT_FACTOR, STEAL_MISS_FACTOR
)
from model.validation.run_report import RunReport

ERROR_COLUMN = 'error'


def steal_scale(report: RunReport) -> float:
    """p (span + b/s B log n / log B), the steal count the band is measured against."""
    log_n = math.log2(max(report.n, 2))
    return report.p * (report.span + report.b / report.s * report.B * log_n / max(math.log2(report.B), 1))


def ratio_columns(report: RunReport) -> Dict[str, float]:
    """Normalized columns the acceptance bands are checked on; NaN where undefined."""
    log_n = math.log2(report.n) if report.n > 1 else np.nan
    log_log_n = math.log2(log_n) if report.n > 2 else np.nan
    steals = report.steals if report.steals else np.nan
    return {
        'work_ratio': report.work / (report.n * log_n),
        'span_ratio': report.span / (log_n * log_log_n),
        'miss_ratio': report.q_seq * report.B * math.log2(report.M) / (report.n * log_n),
        'steal_overhead_ratio': report.steal_overhead * report.B / (steals * report.M),
        'fs_ratio': report.fs_delay / (steals * report.B),
        'kernel_ratio': report.kernels / (2 * report.steals + 1),
        'steal_band': report.steals / steal_scale(report),
        'space_ratio': report.peak_live_words / report.n if report.n else np.nan,
    }


def band_checks(report: RunReport) -> List[Tuple[str, bool, str]]:
    """(suite, passed, detail) for every frozen band a single run must meet.

    The small-input miss bound only applies from B^2 keys up to M, where
    every array spans whole blocks and the run fits in cache.
    """
    steals, B, M = report.steals, report.B, report.M
    checks = [
        ('steal overhead', report.steal_overhead <= STEAL_MISS_FACTOR * steals * M / B,
         f'R(S)={report.steal_overhead} S={steals}'),
        ('fs total', report.fs_delay <= FS_TOTAL_FACTOR * steals * B, f'F={report.fs_delay} S={steals}'),
        ('max block delay', report.max_block_delay <= BLOCK_DELAY_FACTOR * B, f'{report.max_block_delay}'),
        ('steal count', steals <= STEAL_COUNT_FACTOR * steal_scale(report), f'S={steals}'),
    ]
    if B * B <= report.n <= M:
        checks.append(('small input misses', report.q_seq <= SMALL_INPUT_MISS_FACTOR * report.n / B,
                       f'Q_seq={report.q_seq}'))
    return checks


class ReportCollection:
    """No data shall be provided to initiate an instance of this class."""

    def __init__(self):
        self.__reports: List[RunReport] = list()
        self.__failures: List[Dict[str, Any]] = list()

    def add_report(self, report: RunReport) -> RunReport:
        """Adds the report of a successful run."""
        self.__reports.append(report)
        return report

    def add_failure(self, cell: Dict[str, Any], reason: str) -> None:
        """Records a failed sweep cell; the sweep goes on."""
        self.__failures.append({**cell, ERROR_COLUMN: reason})

    def get_reports(self) -> List[RunReport]:
        return self.__reports

    def get_failures(self) -> List[Dict[str, Any]]:
        return self.__failures

    def band_failures(self) -> List[str]:
        """Sweep-wide bands over the collected reports.

        Work and span ratios may spread by BAND_SPREAD across the sweep.
        The miss ratio stays within MISS_BAND_FACTOR of the calibration
        cell, the smallest n at or above MISS_CALIBRATION_N, else the
        smallest n collected.
        """
        reports = [report for report in self.__reports if report.n > 2]
        if not reports:
            return list()
        failures = list()
        frame = pd.DataFrame([ratio_columns(report) for report in reports])
        for column in ('work_ratio', 'span_ratio'):
            low, high = frame[column].min(), frame[column].max()
            if high > BAND_SPREAD * low:
                failures.append(f'{column} spreads from {low:.3f} to {high:.3f}')
        calibration = min(reports, key=lambda report: (report.n < MISS_CALIBRATION_N, report.n))
        reference = ratio_columns(calibration)['miss_ratio']
        for report, ratio in zip(reports, frame['miss_ratio']):
            if not reference / MISS_BAND_FACTOR <= ratio <= reference * MISS_BAND_FACTOR:
                failures.append(f'miss_ratio {ratio:.3f} at n={report.n} outside the band of {reference:.3f}')
        return failures

    def to_frame(self) -> pd.DataFrame:
        """One row per cell: every report field, the ratio columns and the error text."""
        rows = [{**report.to_record(), **ratio_columns(report), ERROR_COLUMN: ''} for report in self.__reports]
        rows.extend(self.__failures)
        return pd.DataFrame(rows)

    def export_csv(self, filepath: Path) -> None:
        self.to_frame().to_csv(filepath, index=False)

    @classmethod
    def import_csv(cls, filepath: Path) -> 'ReportCollection':
        """Parses a sweep table back; failed cells come back as failures."""
        collection = cls()
        frame = pd.read_csv(filepath, keep_default_na=False)
        for record in frame.to_dict(orient='records'):
            error = record.get(ERROR_COLUMN, '')
            if error:
                collection.add_failure({key: value for key, value in record.items()
                                        if key != ERROR_COLUMN and value != ''}, str(error))
            else:
                collection.add_report(RunReport.from_record(record))
        return collection

    def __len__(self):
        return len(self.__reports) + len(self.__failures)

    def __str__(self):
        print_ = ''
        for report in self.__reports:
            print_ += (f'n={report.n} p={report.p} seed={report.seed}: S={report.steals} '
                       f'Q_seq={report.q_seq} Q_par={report.q_par} F={report.fs_delay} '
                       f'T_p={report.tp_measured}\n')
        for failure in self.__failures:
            print_ += f'FAILED {failure}\n'
        return print_
