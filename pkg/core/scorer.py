"""
specnova - Scorer
Adım-koşullu skor fonksiyonu: scorer kontratı, ion-evidence referans scorer'ı,
sekans ve çift yönlü skorlar
"""

import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Type

import numpy as np
from cachetools import LRUCache
from scipy.special import logsumexp

from config.constants import END_TOKEN, Direction
from core.chem import DEFAULT_TABLE, Peptide, ResidueTable, ResidueToken, Tolerance
from core.exceptions import RejectedInputError, ScorerError
from utils.logger import get_logger

logger = get_logger(__name__)

NORMALIZATION_TOLERANCE = 1e-6


class Vocabulary:
    """24 residue token + END - sabit sıralı (index'ler stabil)"""

    def __init__(self, table: ResidueTable = DEFAULT_TABLE):
        self.tokens: Tuple[ResidueToken, ...] = table.tokens
        self.masses = np.array([table.mass(token) for token in self.tokens], dtype=float)
        self.labels: Tuple[str, ...] = tuple(token.label for token in self.tokens) + (END_TOKEN,)
        self._index = {token: i for i, token in enumerate(self.tokens)}

    @property
    def size(self) -> int:
        return len(self.tokens) + 1

    @property
    def end_index(self) -> int:
        return len(self.tokens)

    def index_of(self, token) -> int:
        if token == END_TOKEN:
            return self.end_index
        try:
            return self._index[token]
        except KeyError:
            raise RejectedInputError(f"Vocabulary'de olmayan token: {token}") from None

    def __len__(self) -> int:
        return self.size


VOCABULARY = Vocabulary()


@dataclass(frozen=True, eq=False)
class StepDistribution:
    """Vocabulary + END üzerinde log-olasılık dağılımı"""
    log_probs: np.ndarray
    uniform: bool = False
    vocabulary: Vocabulary = field(default=VOCABULARY, compare=False, repr=False)

    def __post_init__(self):
        log_probs = np.asarray(self.log_probs, dtype=float)
        if log_probs.shape != (self.vocabulary.size,):
            raise ScorerError(f"Dağılım boyutu {log_probs.shape}, beklenen ({self.vocabulary.size},)")
        if not np.all(np.isfinite(log_probs)):
            raise ScorerError("Dağılımda sonlu olmayan değer var")
        total = float(np.exp(log_probs).sum())
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise ScorerError(f"Dağılım normalize değil: Σ = {total}")
        log_probs.setflags(write=False)
        object.__setattr__(self, 'log_probs', log_probs)

    @classmethod
    def uniform_over(cls, vocabulary: Vocabulary = VOCABULARY) -> 'StepDistribution':
        return cls(np.full(vocabulary.size, -np.log(vocabulary.size)), uniform=True, vocabulary=vocabulary)

    def log_prob(self, token) -> float:
        return float(self.log_probs[self.vocabulary.index_of(token)])

    @property
    def end_log_prob(self) -> float:
        return float(self.log_probs[self.vocabulary.end_index])

    @property
    def residue_log_probs(self) -> np.ndarray:
        return self.log_probs[:self.vocabulary.end_index]

    def argmax(self) -> str:
        return self.vocabulary.labels[int(np.argmax(self.log_probs))]

    def as_dict(self) -> Dict[str, float]:
        return {label: float(lp) for label, lp in zip(self.vocabulary.labels, self.log_probs)}


@dataclass(frozen=True)
class IonEvidenceParams:
    """Ion-evidence scorer parametreleri"""
    fragment_tolerance: Tolerance = Tolerance.da(0.5)
    smoothing_epsilon: float = 0.01
    b_weight: float = 1.0
    y_weight: float = 1.0
    end_mass_tolerance: Tolerance = Tolerance.ppm(20.0)

    def __post_init__(self):
        if self.smoothing_epsilon <= 0:
            raise RejectedInputError(f"Epsilon pozitif olmalı: {self.smoothing_epsilon}")
        if self.b_weight < 0 or self.y_weight < 0 or self.b_weight + self.y_weight == 0:
            raise RejectedInputError("b/y ağırlıkları negatif olamaz ve ikisi birden 0 olamaz")


def _normalized_peaks(spectrum) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """(mz, max-normalize intensity + 0 sentinel) - pik yoksa None"""
    mz = spectrum.mz_array
    intensity = spectrum.intensity_array
    if mz.size == 0:
        return None
    peak_max = intensity.max()
    if peak_max <= 0:
        return None
    # reduceat için sonda sentinel
    return mz, np.append(intensity / peak_max, 0.0)


def _window_max(mz: np.ndarray, padded: np.ndarray, targets: np.ndarray, tol: Tolerance) -> np.ndarray:
    """Her hedef m/z için tolerans penceresindeki en yüksek normalize intensity (yoksa 0)"""
    widths = tol.width(targets)
    lo = np.searchsorted(mz, targets - widths, side='left')
    hi = np.searchsorted(mz, targets + widths, side='right')
    result = np.zeros(targets.shape, dtype=float)
    hits = hi > lo
    if hits.any():
        bounds = np.empty(2 * int(hits.sum()), dtype=np.intp)
        bounds[0::2] = lo[hits]
        bounds[1::2] = hi[hits]
        result[hits] = np.maximum.reduceat(padded, bounds)[0::2]
    return result


def _prefix_mass(prefix: Sequence[ResidueToken], table: ResidueTable) -> float:
    return float(sum(table.mass(token) for token in prefix))


def evidence_step(
    peaks: Optional[Tuple[np.ndarray, np.ndarray]],
    precursor_neutral_mass: float,
    prefix_mass: float,
    direction: Direction,
    params: IonEvidenceParams,
    vocabulary: Vocabulary = VOCABULARY,
    table: ResidueTable = DEFAULT_TABLE
) -> StepDistribution:
    """Ön hesaplanmış pikler ve prefix kütlesi üzerinden adım dağılımı"""
    if peaks is None:
        return StepDistribution.uniform_over(vocabulary)

    mz, padded = peaks
    water, proton = table.water_mass, table.proton_mass
    residue_sums = prefix_mass + vocabulary.masses

    if direction is Direction.FORWARD:
        b_targets = residue_sums + proton
        y_targets = precursor_neutral_mass - residue_sums + proton
    else:
        # Geri yönde prefix C-terminalden büyür: b/y rolleri yer değiştirir
        y_targets = residue_sums + water + proton
        b_targets = precursor_neutral_mass - residue_sums - water + proton

    evidence = np.empty(vocabulary.size, dtype=float)
    evidence[:vocabulary.end_index] = (
        params.b_weight * _window_max(mz, padded, b_targets, params.fragment_tolerance)
        + params.y_weight * _window_max(mz, padded, y_targets, params.fragment_tolerance)
    )
    end_error = abs(prefix_mass + water - precursor_neutral_mass)
    evidence[vocabulary.end_index] = 1.0 if end_error <= params.end_mass_tolerance.width(precursor_neutral_mass) else 0.0

    log_weights = np.log(evidence + params.smoothing_epsilon)
    return StepDistribution(log_weights - logsumexp(log_weights), vocabulary=vocabulary)


def ion_evidence_step(
    spectrum,
    precursor_neutral_mass: float,
    prefix: Sequence[ResidueToken],
    direction: Direction,
    params: IonEvidenceParams = IonEvidenceParams(),
    table: ResidueTable = DEFAULT_TABLE
) -> StepDistribution:
    """
    Ion-evidence kuralı ile bir sonraki token dağılımı
    e(r) = b_weight·I_b + y_weight·I_y, e(END) = 1 kütle eşleşirse, P = (e + ε) / Σ(e + ε)
    """
    return evidence_step(
        _normalized_peaks(spectrum),
        precursor_neutral_mass,
        _prefix_mass(prefix, table),
        direction,
        params,
        table=table,
    )


class BaseScorer(ABC):
    """Scorer kontratı - deterministik ve yön duyarlı step()"""

    name: str = 'base'

    def __init__(self, vocabulary: Vocabulary = VOCABULARY, table: ResidueTable = DEFAULT_TABLE):
        self.vocabulary = vocabulary
        self.table = table

    @abstractmethod
    def step(
        self,
        spectrum,
        precursor_neutral_mass: float,
        prefix: Sequence[ResidueToken],
        direction: Direction
    ) -> StepDistribution:
        """Prefix verildiğinde bir sonraki token dağılımı"""
        pass

    def step_from_mass(self, spectrum, precursor_neutral_mass: float, prefix_mass: float, direction: Direction,
                       prefix: Sequence[ResidueToken] = ()) -> StepDistribution:
        """Prefix kütlesi bilinen durumlar için (beam search) - varsayılan olarak step()'e düşer"""
        return self.step(spectrum, precursor_neutral_mass, prefix, direction)


class UniformScorer(BaseScorer):
    """Her adımda vocabulary üzerinde uniform dağılım (test ve taban çizgisi)"""

    name = 'uniform'

    def __init__(self, params=None, cache_size: int = 0, **kwargs):
        super().__init__(**kwargs)
        self._distribution = StepDistribution.uniform_over(self.vocabulary)

    def step(self, spectrum, precursor_neutral_mass, prefix, direction) -> StepDistribution:
        return self._distribution


class IonEvidenceScorer(BaseScorer):
    """Ion-evidence referans scorer'ı - spektrum pikleri ve step dağılımları LRU cache'de"""

    name = 'ion_evidence'

    def __init__(self, params: Optional[IonEvidenceParams] = None, cache_size: int = 4096, **kwargs):
        super().__init__(**kwargs)
        self.params = params or IonEvidenceParams()
        self._peak_cache = LRUCache(maxsize=max(16, cache_size // 64))
        self._step_cache = LRUCache(maxsize=cache_size)
        self._lock = threading.Lock()

    def _peaks(self, spectrum):
        key = spectrum.fingerprint
        with self._lock:
            if key in self._peak_cache:
                return self._peak_cache[key]
        peaks = _normalized_peaks(spectrum)
        with self._lock:
            self._peak_cache[key] = peaks
        return peaks

    def step_from_mass(self, spectrum, precursor_neutral_mass, prefix_mass, direction, prefix=()):
        key = (spectrum.fingerprint, precursor_neutral_mass, round(prefix_mass, 9), direction)
        with self._lock:
            cached = self._step_cache.get(key)
        if cached is not None:
            return cached
        distribution = evidence_step(
            self._peaks(spectrum),
            precursor_neutral_mass,
            prefix_mass,
            direction,
            self.params,
            self.vocabulary,
            self.table,
        )
        with self._lock:
            self._step_cache[key] = distribution
        return distribution

    def step(self, spectrum, precursor_neutral_mass, prefix, direction) -> StepDistribution:
        return self.step_from_mass(spectrum, precursor_neutral_mass, _prefix_mass(prefix, self.table), direction, prefix)


SCORERS: Dict[str, Type[BaseScorer]] = {
    IonEvidenceScorer.name: IonEvidenceScorer,
    UniformScorer.name: UniformScorer,
}


def available_scorers() -> List[str]:
    return sorted(SCORERS)


def get_scorer(name: str, params: Optional[IonEvidenceParams] = None, **kwargs) -> BaseScorer:
    """İsimle scorer oluştur"""
    try:
        scorer_cls = SCORERS[name]
    except KeyError:
        raise RejectedInputError(f"Bilinmeyen scorer: {name} (mevcut: {', '.join(available_scorers())})") from None
    return scorer_cls(params, **kwargs)


class BidirectionalScore(NamedTuple):
    total: float
    forward_per_position: List[float]
    backward_per_position: List[float]


def sequence_score(
    scorer: BaseScorer,
    spectrum,
    precursor_neutral_mass: float,
    peptide: Peptide,
    direction: Direction = Direction.FORWARD
) -> Tuple[float, List[float]]:
    """
    Sekans skoru: her pozisyon için log P(token_i | token_<i, spektrum), ardından END adımı
    total = (Σ per_position + log P(END)) / uzunluk
    """
    if len(peptide) == 0:
        raise RejectedInputError("Boş peptide")

    per_position: List[float] = []
    prefix: List[ResidueToken] = []
    prefix_mass = 0.0
    for position, token in enumerate(list(peptide.tokens) + [END_TOKEN]):
        try:
            distribution = scorer.step_from_mass(spectrum, precursor_neutral_mass, prefix_mass, direction, tuple(prefix))
            log_prob = distribution.log_prob(token)
        except ScorerError as e:
            if e.position is not None:
                raise
            raise ScorerError(f"Scorer hatası ({scorer.name}): {e}", position=position) from e
        except Exception as e:
            raise ScorerError(f"Scorer hatası ({scorer.name}): {e}", position=position) from e
        if token == END_TOKEN:
            end_log_prob = log_prob
            break
        per_position.append(log_prob)
        prefix.append(token)
        prefix_mass += scorer.table.mass(token)

    total = (sum(per_position) + end_log_prob) / len(peptide)
    return total, per_position


def bidirectional_score(scorer: BaseScorer, spectrum, precursor_neutral_mass: float, peptide: Peptide) -> BidirectionalScore:
    """İleri yön skoru + ters çevrilmiş peptide'in geri yön skoru"""
    forward_total, forward = sequence_score(scorer, spectrum, precursor_neutral_mass, peptide, Direction.FORWARD)
    backward_total, backward = sequence_score(
        scorer, spectrum, precursor_neutral_mass, peptide.reversed(), Direction.BACKWARD
    )
    return BidirectionalScore(forward_total + backward_total, forward, backward)


def combined_per_position(score: BidirectionalScore) -> List[float]:
    """Pozisyon bazlı toplam: forward[i] + backward[n-1-i]"""
    backward = score.backward_per_position
    n = len(backward)
    return [f + backward[n - 1 - i] for i, f in enumerate(score.forward_per_position)]
