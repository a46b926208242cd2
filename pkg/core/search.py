"""
specnova - Search
Veritabanı araması, knapsack budamalı de novo beam search ve hybrid karar
"""

from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.constants import Direction, HybridChoice, PsmSource
from core.chem import DEFAULT_TABLE, Peptide, ResidueToken, Tolerance, peptide_mass
from core.exceptions import RejectedInputError
from core.knapsack import DEFAULT_RESOLUTION, KnapsackTable
from core.massindex import MassIndex, query
from core.scorer import BaseScorer, bidirectional_score, combined_per_position
from msio.records import PsmRecord
from utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class SearchConfig:
    """Arama parametreleri"""
    precursor_tolerance: Tolerance = Tolerance.ppm(20.0)
    beam_width: int = 10
    max_length: int = 50
    knapsack_resolution: float = DEFAULT_RESOLUTION
    fdr_threshold: float = 0.01
    top_k: int = 2

    def __post_init__(self):
        if self.beam_width < 1:
            raise RejectedInputError(f"beam_width en az 1 olmalı: {self.beam_width}")
        if self.max_length < 1:
            raise RejectedInputError(f"max_length en az 1 olmalı: {self.max_length}")
        if self.top_k < 1:
            raise RejectedInputError(f"top_k en az 1 olmalı: {self.top_k}")


@dataclass(frozen=True)
class BeamState:
    """Beam search kısmi hipotezi - prefix arama yönündeki sırada"""
    prefix: Tuple[ResidueToken, ...]
    acc_logprob: float
    prefix_mass: float
    finished: bool = False

    @property
    def label_key(self) -> str:
        return "".join(token.label for token in self.prefix)


@dataclass(frozen=True)
class HybridDecision:
    """Hybrid karar: db ve de novo en iyileri, seçim ve skor farkı"""
    db_best: Optional[PsmRecord]
    denovo_best: Optional[PsmRecord]
    chosen: HybridChoice
    margin: Optional[float]

    @property
    def chosen_psm(self) -> Optional[PsmRecord]:
        """Seçilen PSM (source=hybrid)"""
        if self.chosen is HybridChoice.DB:
            return replace(self.db_best, source=PsmSource.HYBRID)
        if self.chosen is HybridChoice.DENOVO:
            return replace(self.denovo_best, source=PsmSource.HYBRID)
        return None


def _rank(
    spectrum,
    precursor_neutral_mass: float,
    scorer: BaseScorer,
    candidates: Sequence[Tuple[Peptide, bool]],
    source: PsmSource,
    limit: int
) -> List[PsmRecord]:
    """Adayları çift yönlü skorla, (-skor, sequence_key) ile sırala, rank ata"""
    scored = []
    for peptide, is_decoy in candidates:
        score = bidirectional_score(scorer, spectrum, precursor_neutral_mass, peptide)
        scored.append((score, peptide, is_decoy))
    scored.sort(key=lambda item: (-item[0].total, item[1].sequence_key))

    return [
        PsmRecord(
            spectrum_id=spectrum.id,
            peptide=peptide,
            score=score.total,
            rank=rank,
            source=source,
            is_decoy=is_decoy,
            per_position_scores=tuple(combined_per_position(score)),
        )
        for rank, (score, peptide, is_decoy) in enumerate(scored[:limit], start=1)
    ]


def db_search(
    spectrum,
    precursor_neutral_mass: float,
    index: MassIndex,
    scorer: BaseScorer,
    cfg: SearchConfig = SearchConfig()
) -> List[PsmRecord]:
    """Kütle penceresindeki adayları skorla - en iyi top_k PSM (source=db)"""
    entries = query(index, precursor_neutral_mass, cfg.precursor_tolerance)
    if not entries:
        logger.debug(f"🔍 Spektrum {spectrum.id}: kütle penceresi boş ({precursor_neutral_mass:.5f} Da)")
        return []
    candidates = [(entry.peptide, entry.is_decoy) for entry in entries]
    return _rank(spectrum, precursor_neutral_mass, scorer, candidates, PsmSource.DB, cfg.top_k)


def _beam_pass(
    spectrum,
    precursor_neutral_mass: float,
    scorer: BaseScorer,
    knapsack: KnapsackTable,
    cfg: SearchConfig,
    direction: Direction,
    tokens: Sequence[ResidueToken]
) -> Dict[str, Peptide]:
    """Tek yönlü beam geçişi - tamamlanan peptide'ler (N->C sırasında)"""
    table = scorer.table
    vocabulary = scorer.vocabulary
    token_indices = np.array([vocabulary.index_of(token) for token in tokens], dtype=np.intp)
    token_masses = np.array([table.mass(token) for token in tokens], dtype=float)

    tolerance = float(cfg.precursor_tolerance.width(precursor_neutral_mass))
    residue_target = precursor_neutral_mass - table.water_mass

    completed: Dict[str, Peptide] = {}
    live = [BeamState((), 0.0, 0.0)]

    for _ in range(cfg.max_length + 1):
        if not live:
            break
        candidates: List[BeamState] = []
        for state in live:
            distribution = scorer.step_from_mass(
                spectrum, precursor_neutral_mass, state.prefix_mass, direction, state.prefix
            )

            if state.prefix and abs(residue_target - state.prefix_mass) <= tolerance:
                tokens_in_order = state.prefix if direction is Direction.FORWARD else state.prefix[::-1]
                peptide = Peptide(tokens_in_order)
                completed.setdefault(peptide.sequence_key, peptide)
                continue

            if len(state.prefix) >= cfg.max_length:
                continue

            log_probs = distribution.log_probs[token_indices]
            remaining = residue_target - (state.prefix_mass + token_masses)
            for i in np.flatnonzero(remaining >= -tolerance):
                if not knapsack.is_feasible(float(remaining[i]), tolerance):
                    continue
                token = tokens[i]
                candidates.append(BeamState(
                    prefix=state.prefix + (token,),
                    acc_logprob=state.acc_logprob + float(log_probs[i]),
                    prefix_mass=state.prefix_mass + float(token_masses[i]),
                ))

        candidates.sort(key=lambda s: (-s.acc_logprob, s.label_key))
        live = candidates[:cfg.beam_width]

    return completed


def denovo_beam_search(
    spectrum,
    precursor_neutral_mass: float,
    scorer: BaseScorer,
    knapsack: KnapsackTable,
    cfg: SearchConfig = SearchConfig(),
    tokens: Optional[Sequence[ResidueToken]] = None
) -> List[PsmRecord]:
    """
    İleri ve geri beam geçişleri, tamamlananlar çift yönlü skorla yeniden sıralanır
    En fazla beam_width PSM (source=denovo); hiçbir aday tamamlanmazsa boş liste
    """
    if precursor_neutral_mass <= 0:
        logger.warning(f"⚠️ Spektrum {spectrum.id}: geçersiz precursor kütlesi ({precursor_neutral_mass}), de novo atlandı")
        return []
    if knapsack.max_mass < precursor_neutral_mass:
        logger.warning(
            f"⚠️ Knapsack tablosu ({knapsack.max_mass:.2f} Da) precursor kütlesinden ({precursor_neutral_mass:.2f} Da) küçük"
        )

    tokens = tuple(tokens) if tokens is not None else scorer.vocabulary.tokens

    completed: Dict[str, Peptide] = {}
    for direction in (Direction.FORWARD, Direction.BACKWARD):
        for key, peptide in _beam_pass(spectrum, precursor_neutral_mass, scorer, knapsack, cfg, direction, tokens).items():
            completed.setdefault(key, peptide)

    # Her sonuç precursor toleransı içinde olmalı
    in_tolerance = {
        key: peptide for key, peptide in completed.items()
        if peptide_within_tolerance(peptide, precursor_neutral_mass, cfg.precursor_tolerance, scorer.table)
    }
    if len(in_tolerance) < len(completed):
        logger.debug(
            f"🗑️ Spektrum {spectrum.id}: {len(completed) - len(in_tolerance)} aday precursor toleransı dışında"
        )

    if not in_tolerance:
        logger.info(f"🔍 Spektrum {spectrum.id}: de novo aday tamamlanmadı")
        return []

    candidates = [(in_tolerance[key], False) for key in sorted(in_tolerance)]
    return _rank(spectrum, precursor_neutral_mass, scorer, candidates, PsmSource.DENOVO, cfg.beam_width)


def hybrid_identify(
    spectrum,
    precursor_neutral_mass: float,
    index: MassIndex,
    scorer: BaseScorer,
    knapsack: KnapsackTable,
    cfg: SearchConfig = SearchConfig()
) -> HybridDecision:
    """De novo yalnızca db skorunu kesin olarak aşarsa seçilir, eşitlikte db kazanır"""
    db_results = db_search(spectrum, precursor_neutral_mass, index, scorer, cfg)
    denovo_results = denovo_beam_search(spectrum, precursor_neutral_mass, scorer, knapsack, cfg)

    db_best = db_results[0] if db_results else None
    denovo_best = denovo_results[0] if denovo_results else None

    if denovo_best is not None and (db_best is None or denovo_best.score > db_best.score):
        chosen = HybridChoice.DENOVO
    elif db_best is not None:
        chosen = HybridChoice.DB
    else:
        chosen = HybridChoice.NONE

    margin = denovo_best.score - db_best.score if db_best is not None and denovo_best is not None else None
    return HybridDecision(db_best=db_best, denovo_best=denovo_best, chosen=chosen, margin=margin)


def peptide_within_tolerance(peptide: Peptide, precursor_neutral_mass: float, tol: Tolerance, table=DEFAULT_TABLE) -> bool:
    """Peptide kütlesi precursor toleransı içinde mi"""
    return abs(peptide_mass(peptide, table) - precursor_neutral_mass) <= tol.width(precursor_neutral_mass)
