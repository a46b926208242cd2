"""
specnova - FDR
Target-decoy yarışması ile q-value tahmini
"""

from dataclasses import replace
from typing import Dict, List, Sequence, Tuple

import numpy as np

from msio.records import PsmRecord
from utils.logger import get_logger

logger = get_logger(__name__)


def _rank_one(psms: Sequence[PsmRecord]) -> List[PsmRecord]:
    rank_one = [psm for psm in psms if psm.rank == 1]
    if len(rank_one) < len(psms):
        logger.warning(f"⚠️ FDR sadece rank-1 PSM'lerle hesaplanır: {len(psms) - len(rank_one)} PSM atlandı")
    return rank_one


def fdr_curve(psms: Sequence[PsmRecord]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Skora göre azalan sırada (order, skor, FDR)
    FDR(t) = #decoy(≥ t) / max(1, #target(≥ t)); eşit skorlar aynı eşik sayılır
    """
    scores = np.array([psm.score for psm in psms], dtype=float)
    decoys = np.array([psm.is_decoy for psm in psms], dtype=bool)

    order = np.argsort(-scores, kind='mergesort')
    sorted_scores = scores[order]
    sorted_decoys = decoys[order]

    cum_decoys = np.cumsum(sorted_decoys)
    cum_targets = np.cumsum(~sorted_decoys)

    # Eşit skor grubunun son elemanı: o eşikteki tüm PSM'ler sayılır
    last = np.searchsorted(-sorted_scores, -sorted_scores, side='right') - 1
    fdr = cum_decoys[last] / np.maximum(1, cum_targets[last])
    return order, sorted_scores, fdr


def estimate_fdr(psms: Sequence[PsmRecord]) -> List[PsmRecord]:
    """
    q-value = skor ve altındaki eşiklerdeki en küçük FDR ([0, 1]'e kırpılır)
    Çıktı girdi sırasında, yalnızca rank-1 PSM'ler
    """
    psms = _rank_one(psms)
    if not psms:
        return []

    order, _, fdr = fdr_curve(psms)
    q_sorted = np.minimum(np.minimum.accumulate(fdr[::-1])[::-1], 1.0)

    q_values = np.empty(len(psms), dtype=float)
    q_values[order] = q_sorted

    return [replace(psm, q_value=float(q)) for psm, q in zip(psms, q_values)]


def filter_at_fdr(psms: Sequence[PsmRecord], threshold: float) -> List[PsmRecord]:
    """q_value ≤ eşik olan target PSM'ler - orijinal sıra korunur"""
    return [
        psm for psm in psms
        if not psm.is_decoy and psm.q_value is not None and psm.q_value <= threshold
    ]


def accepted_summary(psms: Sequence[PsmRecord], threshold: float) -> Dict[str, int]:
    """Kabul edilen/edilmeyen PSM sayıları"""
    accepted = filter_at_fdr(psms, threshold)
    n_targets = sum(1 for psm in psms if not psm.is_decoy)
    summary = {
        'n_psms': len(psms),
        'n_targets': n_targets,
        'n_decoys': len(psms) - n_targets,
        'n_accepted': len(accepted),
    }
    logger.info(
        f"📊 FDR {threshold:.2%}: {summary['n_accepted']}/{n_targets} target kabul edildi "
        f"({summary['n_decoys']} decoy)"
    )
    return summary
