"""
specnova - Spectrum Searcher
Spektrumları batch'ler halinde thread havuzunda arayan sürücü (db / de novo / hybrid)
"""

import asyncio
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

from config.constants import HybridChoice, SearchMode
from core.exceptions import RejectedInputError
from core.fdr import accepted_summary, estimate_fdr
from core.knapsack import KnapsackTable, build_knapsack
from core.massindex import MassIndex
from core.scorer import BaseScorer
from core.search import SearchConfig, HybridDecision, db_search, denovo_beam_search, hybrid_identify
from msio.records import PsmRecord, SpectrumRecord
from utils.helpers import chunked, format_duration
from utils.logger import get_logger
from utils.performance import PerformanceMonitor

logger = get_logger(__name__)

# Knapsack üst sınırı: en büyük precursor kütlesinin üstüne eklenen pay (Da)
KNAPSACK_MARGIN = 50.0


@dataclass
class SpectrumOutcome:
    spectrum_id: str
    psms: List[PsmRecord] = field(default_factory=list)
    decision: Optional[HybridDecision] = None


@dataclass
class SearchResult:
    """Arama çıktısı - PSM'ler (spectrum_id, rank) sırasında"""
    mode: SearchMode
    psms: List[PsmRecord]
    decisions: Dict[str, HybridDecision]
    n_spectra: int
    failed: List[str] = field(default_factory=list)

    @property
    def n_errors(self) -> int:
        return len(self.failed)


class SpectrumSearcher:
    """Arama motoru - spektrumları batch'ler halinde paralel arar"""

    def __init__(
        self,
        mode: SearchMode,
        scorer: BaseScorer,
        cfg: SearchConfig = SearchConfig(),
        index: Optional[MassIndex] = None,
        knapsack: Optional[KnapsackTable] = None,
        threads: int = 1,
        batch_size: int = 64,
        monitor: Optional[PerformanceMonitor] = None
    ):
        if mode in (SearchMode.DB, SearchMode.HYBRID) and index is None:
            raise RejectedInputError(f"{mode.value} modu için mass index gerekli")
        if threads < 1:
            raise RejectedInputError(f"Thread sayısı en az 1 olmalı: {threads}")
        if batch_size < 1:
            raise RejectedInputError(f"Batch boyutu en az 1 olmalı: {batch_size}")

        self.mode = mode
        self.scorer = scorer
        self.cfg = cfg
        self.index = index
        self.knapsack = knapsack
        self.threads = threads
        self.batch_size = batch_size
        self.monitor = monitor or PerformanceMonitor()

    def _ensure_knapsack(self, spectra: Sequence[SpectrumRecord]):
        if self.mode is SearchMode.DB or not spectra:
            return
        max_mass = max(spectrum.neutral_mass for spectrum in spectra) + KNAPSACK_MARGIN
        if self.knapsack is not None and self.knapsack.max_mass >= max_mass - KNAPSACK_MARGIN:
            return
        self.knapsack = build_knapsack(
            self.scorer.vocabulary.masses.tolist(),
            max_mass,
            self.cfg.knapsack_resolution,
        )

    def search_spectrum(self, spectrum: SpectrumRecord) -> SpectrumOutcome:
        """Tek spektrum arama - thread havuzunda çalışır"""
        neutral_mass = spectrum.neutral_mass

        if self.mode is SearchMode.DB:
            psms = db_search(spectrum, neutral_mass, self.index, self.scorer, self.cfg)
            return SpectrumOutcome(spectrum.id, psms)

        if self.mode is SearchMode.DENOVO:
            psms = denovo_beam_search(spectrum, neutral_mass, self.scorer, self.knapsack, self.cfg)
            return SpectrumOutcome(spectrum.id, psms[:self.cfg.top_k])

        decision = hybrid_identify(spectrum, neutral_mass, self.index, self.scorer, self.knapsack, self.cfg)
        chosen = decision.chosen_psm
        return SpectrumOutcome(spectrum.id, [chosen] if chosen is not None else [], decision)

    async def search_all(self, spectra: Sequence[SpectrumRecord]) -> SearchResult:
        """Tüm spektrumları ara"""
        search_start = time.perf_counter()
        logger.info(
            f"🔍 {self.mode.value} araması başladı: {len(spectra)} spektrum, "
            f"{self.threads} thread, batch {self.batch_size}"
        )
        self._ensure_knapsack(spectra)

        loop = asyncio.get_running_loop()
        outcomes: List[SpectrumOutcome] = []
        failed: List[str] = []

        with ThreadPoolExecutor(max_workers=self.threads) as executor:
            for batch in chunked(list(spectra), self.batch_size):
                batch_start = time.perf_counter()
                batch_tasks = [
                    loop.run_in_executor(executor, self.search_spectrum, spectrum)
                    for spectrum in batch
                ]
                batch_results = await asyncio.gather(*batch_tasks, return_exceptions=True)

                n_psms = 0
                for spectrum, result in zip(batch, batch_results):
                    if isinstance(result, SpectrumOutcome):
                        outcomes.append(result)
                        n_psms += len(result.psms)
                    else:
                        logger.error(f"❌ Spektrum {spectrum.id} arama hatası: {result}")
                        self.monitor.record_error()
                        failed.append(spectrum.id)

                self.monitor.record_batch(time.perf_counter() - batch_start, len(batch), n_psms)

        psms = [psm for outcome in outcomes for psm in outcome.psms]
        psms.sort(key=lambda psm: (psm.spectrum_id, psm.rank))
        decisions = {outcome.spectrum_id: outcome.decision for outcome in outcomes if outcome.decision is not None}

        logger.info(
            f"✅ Arama tamamlandı: {len(spectra)} spektrum, {len(psms)} PSM, "
            f"{len(failed)} hata ({format_duration(time.perf_counter() - search_start)})"
        )
        return SearchResult(self.mode, psms, decisions, len(spectra), sorted(failed))

    def run(self, spectra: Sequence[SpectrumRecord]) -> SearchResult:
        """Senkron giriş noktası"""
        return asyncio.run(self.search_all(spectra))


def _with_q_values(psms: Sequence[PsmRecord], scored: Sequence[PsmRecord]) -> List[PsmRecord]:
    q_by_spectrum = {psm.spectrum_id: psm.q_value for psm in scored}
    return [
        replace(psm, q_value=q_by_spectrum.get(psm.spectrum_id)) if psm.rank == 1 else psm
        for psm in psms
    ]


def apply_fdr(result: SearchResult, threshold: float) -> List[PsmRecord]:
    """
    Target-decoy q-value'larını ata
    dbsearch: rank-1 PSM'ler; hybrid: db en iyileri üzerinden, yalnızca db seçilen PSM'lere
    de novo PSM'lerinde decoy rekabeti yok, q-value boş kalır
    """
    if result.mode is SearchMode.DENOVO:
        return list(result.psms)

    if result.mode is SearchMode.DB:
        scored = estimate_fdr([psm for psm in result.psms if psm.rank == 1])
        accepted_summary(scored, threshold)
        return _with_q_values(result.psms, scored)

    db_best = [decision.db_best for decision in result.decisions.values() if decision.db_best is not None]
    scored = estimate_fdr(db_best)
    accepted_summary(scored, threshold)
    db_chosen = {
        spectrum_id for spectrum_id, decision in result.decisions.items()
        if decision.chosen is HybridChoice.DB
    }
    return _with_q_values(
        result.psms,
        [psm for psm in scored if psm.spectrum_id in db_chosen],
    )
