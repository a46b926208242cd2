"""
specnova - Evaluation
Amino asit ve peptide seviyesinde recall/precision raporu
"""

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from core.chem import DEFAULT_TABLE, Peptide, ResidueTable, Tolerance, as_peptide, residue_masses
from core.exceptions import RejectedInputError
from msio.psm_tsv import PathOrStream, read_sequences
from utils.helpers import format_float, format_percent, safe_ratio
from utils.logger import get_logger

logger = get_logger(__name__)

RESIDUE_MASS_EPSILON = 1e-4
DEFAULT_FRAGMENT_TOL = Tolerance.da(0.5)

EVAL_COLUMNS = [
    'scope',
    'n_pairs',
    'n_predicted',
    'aa_recall',
    'aa_precision',
    'peptide_recall',
    'peptide_precision',
]

MaybePeptide = Optional[Union[Peptide, str]]


def _as_optional_peptide(value: MaybePeptide) -> Optional[Peptide]:
    if value is None or (isinstance(value, str) and not value.strip()):
        return None
    return as_peptide(value)


def match_positions(
    target: Union[Peptide, str],
    predicted: MaybePeptide,
    fragment_tol: Tolerance = DEFAULT_FRAGMENT_TOL,
    table: ResidueTable = DEFAULT_TABLE
) -> int:
    """
    Doğru tahmin edilen target pozisyonu sayısı
    Eşleşme: residue kütleleri eşit (1e-4) ve önceki prefix kütleleri fragment_tol içinde
    """
    target = as_peptide(target)
    predicted = _as_optional_peptide(predicted)
    if predicted is None:
        return 0

    target_masses = residue_masses(target, table)
    predicted_masses = residue_masses(predicted, table)
    # Her pozisyondan önceki prefix kütlesi
    target_prefix = np.concatenate(([0.0], np.cumsum(target_masses)[:-1]))
    predicted_prefix = np.concatenate(([0.0], np.cumsum(predicted_masses)[:-1]))

    matched = 0
    i = j = 0
    while i < len(target_masses) and j < len(predicted_masses):
        difference = target_prefix[i] - predicted_prefix[j]
        if abs(difference) <= fragment_tol.width(max(target_prefix[i], predicted_prefix[j])):
            if abs(target_masses[i] - predicted_masses[j]) <= RESIDUE_MASS_EPSILON:
                matched += 1
            i += 1
            j += 1
        elif difference < 0:
            i += 1
        else:
            j += 1
    return matched


@dataclass(frozen=True)
class LengthBreakdown:
    n_pairs: int
    n_predicted: int
    aa_recall: float
    aa_precision: float
    peptide_recall: float
    peptide_precision: float


@dataclass(frozen=True)
class EvalReport:
    """Değerlendirme raporu - valid=False ise payda sıfır (boş girdi)"""
    aa_recall: float
    aa_precision: float
    peptide_recall: float
    peptide_precision: float
    n_spectra: int
    n_predicted: int
    per_length: Dict[int, LengthBreakdown] = field(default_factory=dict)
    valid: bool = True

    def summary(self) -> str:
        if not self.valid:
            return "⚠️ Değerlendirme geçersiz: boş girdi"
        return (
            f"📊 {self.n_spectra} spektrum, {self.n_predicted} tahmin | "
            f"AA recall {format_percent(self.aa_recall)}, "
            f"AA precision {format_percent(self.aa_precision)} | "
            f"peptide recall {format_percent(self.peptide_recall)}, "
            f"peptide precision {format_percent(self.peptide_precision)}"
        )


class _Counts:
    __slots__ = ('pairs', 'predicted', 'matched', 'target_length', 'predicted_length', 'exact')

    def __init__(self):
        self.pairs = self.predicted = self.matched = 0
        self.target_length = self.predicted_length = self.exact = 0

    def add(self, target_length: int, predicted_length: int, matched: int):
        self.pairs += 1
        self.target_length += target_length
        self.matched += matched
        if predicted_length:
            self.predicted += 1
            self.predicted_length += predicted_length
        if matched == target_length:
            self.exact += 1

    def rates(self) -> Tuple[float, float, float, float]:
        return (
            safe_ratio(self.matched, self.target_length),
            safe_ratio(self.matched, self.predicted_length),
            safe_ratio(self.exact, self.pairs),
            safe_ratio(self.exact, self.predicted),
        )


def evaluate(
    pairs: Sequence[Tuple[Union[Peptide, str], MaybePeptide]],
    fragment_tol: Tolerance = DEFAULT_FRAGMENT_TOL,
    table: ResidueTable = DEFAULT_TABLE
) -> EvalReport:
    """
    aa_recall = Σ eşleşen / Σ target uzunluğu, peptide_recall = #(eşleşen = target uzunluğu) / #çift
    Boş tahminler 0 eşleşme sayılır
    """
    if not pairs:
        logger.warning("⚠️ Değerlendirilecek çift yok")
        return EvalReport(0.0, 0.0, 0.0, 0.0, n_spectra=0, n_predicted=0, valid=False)

    overall = _Counts()
    by_length: Dict[int, _Counts] = defaultdict(_Counts)
    for target, predicted in pairs:
        target = as_peptide(target)
        predicted = _as_optional_peptide(predicted)
        matched = match_positions(target, predicted, fragment_tol, table)
        predicted_length = len(predicted) if predicted is not None else 0
        overall.add(len(target), predicted_length, matched)
        by_length[len(target)].add(len(target), predicted_length, matched)

    per_length = {
        length: LengthBreakdown(counts.pairs, counts.predicted, *counts.rates())
        for length, counts in sorted(by_length.items())
    }
    aa_recall, aa_precision, peptide_recall, peptide_precision = overall.rates()
    report = EvalReport(
        aa_recall=aa_recall,
        aa_precision=aa_precision,
        peptide_recall=peptide_recall,
        peptide_precision=peptide_precision,
        n_spectra=overall.pairs,
        n_predicted=overall.predicted,
        per_length=per_length,
        valid=overall.target_length > 0,
    )
    logger.info(report.summary())
    return report


def report_frame(report: EvalReport) -> pd.DataFrame:
    """Rapor tablosu: önce 'all', ardından target uzunluğuna göre satırlar"""
    rows = [{
        'scope': 'all',
        'n_pairs': str(report.n_spectra),
        'n_predicted': str(report.n_predicted),
        'aa_recall': format_float(report.aa_recall),
        'aa_precision': format_float(report.aa_precision),
        'peptide_recall': format_float(report.peptide_recall),
        'peptide_precision': format_float(report.peptide_precision),
    }]
    for length, breakdown in report.per_length.items():
        rows.append({
            'scope': f'length={length}',
            'n_pairs': str(breakdown.n_pairs),
            'n_predicted': str(breakdown.n_predicted),
            'aa_recall': format_float(breakdown.aa_recall),
            'aa_precision': format_float(breakdown.aa_precision),
            'peptide_recall': format_float(breakdown.peptide_recall),
            'peptide_precision': format_float(breakdown.peptide_precision),
        })
    return pd.DataFrame(rows, columns=EVAL_COLUMNS)


def write_eval_report(report: EvalReport, stream: PathOrStream) -> None:
    report_frame(report).to_csv(stream, sep='\t', index=False, lineterminator='\n')


def _rank_one_by_spectrum(frame: pd.DataFrame, column: str) -> Dict[str, str]:
    if 'rank' in frame.columns:
        frame = frame[frame['rank'] == '1']
    return dict(zip(frame['spectrum_id'], frame[column]))


def _sequence_column(frame: pd.DataFrame) -> Optional[str]:
    for name in ('sequence', 'peptide'):
        if name in frame.columns:
            return name
    return None


def load_eval_pairs(targets: PathOrStream, predictions: PathOrStream) -> List[Tuple[str, str]]:
    """
    İki tablodan (target, tahmin) çiftleri
    İkisi de spectrum_id içeriyorsa kimliğe göre eşlenir (tahminlerde sadece rank 1), değilse sırayla
    """
    target_frame = pd.read_csv(targets, sep='\t', dtype=str, keep_default_na=False) \
        if _looks_tabular(targets) else None
    prediction_frame = pd.read_csv(predictions, sep='\t', dtype=str, keep_default_na=False) \
        if _looks_tabular(predictions) else None

    if (
        target_frame is not None and prediction_frame is not None
        and 'spectrum_id' in target_frame.columns and 'spectrum_id' in prediction_frame.columns
        and _sequence_column(target_frame) and _sequence_column(prediction_frame)
    ):
        target_column = _sequence_column(target_frame)
        target_map = _rank_one_by_spectrum(target_frame, target_column)
        predicted_map = _rank_one_by_spectrum(prediction_frame, _sequence_column(prediction_frame))
        missing = sum(1 for spectrum_id in target_map if spectrum_id not in predicted_map)
        if missing:
            logger.info(f"🔍 {missing} spektrum için tahmin yok (boş sayıldı)")
        return [(sequence, predicted_map.get(spectrum_id, '')) for spectrum_id, sequence in target_map.items()]

    target_sequences = read_sequences(targets)
    predicted_sequences = read_sequences(predictions)
    if len(target_sequences) != len(predicted_sequences):
        raise RejectedInputError(
            f"Target ({len(target_sequences)}) ve tahmin ({len(predicted_sequences)}) sayıları eşit değil"
        )
    return list(zip(target_sequences, predicted_sequences))


def _looks_tabular(path: PathOrStream) -> bool:
    if not isinstance(path, str):
        return False
    with open(path, 'r', encoding='utf-8') as handle:
        first = handle.readline()
    return '\t' in first
