"""
specnova - Records
Spektrum, protein ve PSM kayıt tipleri
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np

from config.constants import STANDARD_RESIDUES, WILDCARD_RESIDUES, PsmSource
from core.chem import Peptide
from core.exceptions import ParseError, RejectedInputError

Peak = Tuple[float, float]

_PROTEIN_ALPHABET = frozenset(STANDARD_RESIDUES) | WILDCARD_RESIDUES


@dataclass(frozen=True)
class SpectrumRecord:
    """Tek MS/MS spektrumu - pikler m/z'ye göre kesin artan sırada"""
    id: str
    precursor_mz: float
    charge: int
    peaks: Tuple[Peak, ...] = ()
    retention_seconds: Optional[float] = None
    charge_defaulted: bool = False

    def __post_init__(self):
        if not math.isfinite(self.precursor_mz) or self.precursor_mz <= 0:
            raise RejectedInputError(f"precursor_mz pozitif ve sonlu olmalı: {self.precursor_mz}")
        if self.charge < 1:
            raise RejectedInputError(f"Charge en az 1 olmalı: {self.charge}")
        if self.retention_seconds is not None and not math.isfinite(self.retention_seconds):
            raise RejectedInputError(f"retention_seconds sonlu olmalı: {self.retention_seconds}")
        peaks = tuple((float(mz), float(intensity)) for mz, intensity in self.peaks)
        for i, (mz, intensity) in enumerate(peaks):
            if not (math.isfinite(mz) and math.isfinite(intensity)):
                raise RejectedInputError(f"Sonlu olmayan pik: ({mz}, {intensity}) (spektrum {self.id})")
            if intensity < 0:
                raise RejectedInputError(f"Negatif intensity: {intensity} (m/z {mz})")
            if i and mz <= peaks[i - 1][0]:
                raise RejectedInputError(f"Pikler kesin artan m/z sırasında olmalı (spektrum {self.id})")
        object.__setattr__(self, 'peaks', peaks)

    @cached_property
    def mz_array(self) -> np.ndarray:
        return np.array([mz for mz, _ in self.peaks], dtype=float)

    @cached_property
    def intensity_array(self) -> np.ndarray:
        return np.array([intensity for _, intensity in self.peaks], dtype=float)

    @cached_property
    def fingerprint(self) -> tuple:
        """Cache anahtarı - peak tuple'ı tekrar tekrar hash'lenmesin"""
        return (self.id, self.precursor_mz, self.charge, hash(self.peaks))

    @property
    def neutral_mass(self) -> float:
        from msio.mgf import precursor_neutral_mass
        return precursor_neutral_mass(self.precursor_mz, self.charge)


def normalize_peaks(peaks) -> Tuple[Peak, ...]:
    """Pikleri sırala, aynı m/z'deki tekrarları en yüksek intensity ile birleştir"""
    merged = {}
    for mz, intensity in peaks:
        mz = float(mz)
        intensity = float(intensity)
        if mz not in merged or intensity > merged[mz]:
            merged[mz] = intensity
    return tuple(sorted(merged.items()))


@dataclass(frozen=True)
class ProteinRecord:
    """FASTA protein kaydı"""
    accession: str
    description: str
    sequence: str

    def __post_init__(self):
        if not self.sequence:
            raise RejectedInputError(f"Boş protein sekansı: {self.accession}")
        illegal = set(self.sequence) - _PROTEIN_ALPHABET
        if illegal:
            raise RejectedInputError(
                f"Geçersiz residue karakter(ler)i {''.join(sorted(illegal))}: {self.accession}"
            )

    @property
    def has_wildcards(self) -> bool:
        return any(ch in WILDCARD_RESIDUES for ch in self.sequence)


@dataclass(frozen=True)
class PsmRecord:
    """Peptide-spectrum match"""
    spectrum_id: str
    peptide: Peptide
    score: float
    rank: int
    source: PsmSource
    is_decoy: bool = False
    q_value: Optional[float] = None
    per_position_scores: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise RejectedInputError(f"Rank en az 1 olmalı: {self.rank}")
        if self.q_value is not None and not 0 <= self.q_value <= 1:
            raise RejectedInputError(f"q_value [0, 1] aralığında olmalı: {self.q_value}")
        scores = tuple(float(s) for s in self.per_position_scores)
        if scores and len(scores) != len(self.peptide):
            raise RejectedInputError(
                f"per_position_scores uzunluğu ({len(scores)}) peptide uzunluğuna ({len(self.peptide)}) eşit olmalı"
            )
        object.__setattr__(self, 'per_position_scores', scores)

    @property
    def sequence(self) -> str:
        return self.peptide.sequence_key


@dataclass
class ParseSummary:
    """Parse özeti - hatalı bloklar/kayıtlar"""
    n_records: int = 0
    errors: List[ParseError] = field(default_factory=list)
    n_warnings: int = 0

    @property
    def n_errors(self) -> int:
        return len(self.errors)

    def add_error(self, error: ParseError):
        self.errors.append(error)

    def __str__(self) -> str:
        return f"{self.n_records} kayıt, {self.n_errors} hata, {self.n_warnings} uyarı"
