"""
specnova - Synthetic Spectra
Teorik fragmentlerden seed'li sentetik spektrum üretimi (test düzeneği)
"""

from typing import Callable, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from config.constants import IonType
from core.chem import DEFAULT_TABLE, FragmentIon, Peptide, ResidueTable, as_peptide, fragment_mzs, peptide_mass, precursor_mz
from core.exceptions import RejectedInputError
from msio.records import SpectrumRecord, normalize_peaks
from utils.logger import get_logger

logger = get_logger(__name__)

NOISE_MIN_MZ = 100.0

IntensityModel = Callable[[FragmentIon], float]


def constant_intensity(ion: FragmentIon) -> float:
    return 1.0


def _noise_peaks(n_peaks: int, seed: int, upper_mz: float) -> List[Tuple[float, float]]:
    if n_peaks <= 0:
        return []
    if upper_mz <= NOISE_MIN_MZ:
        logger.warning(f"⚠️ Precursor m/z ({upper_mz:.4f}) {NOISE_MIN_MZ}'ün altında, gürültü eklenmedi")
        return []
    rng = np.random.default_rng(seed)
    mzs = rng.uniform(NOISE_MIN_MZ, upper_mz, size=n_peaks)
    intensities = rng.uniform(0.05, 1.0, size=n_peaks)
    return list(zip(mzs.tolist(), intensities.tolist()))


def _drop(peaks: List[Tuple[float, float]], fraction: float, seed: int) -> List[Tuple[float, float]]:
    if not 0.0 <= fraction <= 1.0:
        raise RejectedInputError(f"Dropout oranı [0, 1] aralığında olmalı: {fraction}")
    n_drop = int(round(fraction * len(peaks)))
    if n_drop == 0:
        return peaks
    rng = np.random.default_rng(seed)
    dropped = set(rng.choice(len(peaks), size=n_drop, replace=False).tolist())
    return [peak for i, peak in enumerate(peaks) if i not in dropped]


def synth_spectrum(
    peptide: Union[Peptide, str],
    charge: int = 2,
    kinds: Iterable[IonType] = (IonType.B, IonType.Y),
    intensity_model: Optional[IntensityModel] = None,
    noise: Optional[Tuple[int, int]] = None,
    dropout: Optional[Tuple[float, int]] = None,
    spectrum_id: Optional[str] = None,
    table: ResidueTable = DEFAULT_TABLE
) -> SpectrumRecord:
    """
    Peptide için sentetik MS/MS spektrumu
    noise = (pik sayısı, seed): [100, precursor m/z] aralığında uniform gürültü
    dropout = (oran, seed): gerçek piklerin bu oranı rastgele silinir (1.0 -> hiç gerçek pik kalmaz)
    """
    peptide = as_peptide(peptide)
    model = intensity_model or constant_intensity

    neutral = peptide_mass(peptide, table)
    mz = precursor_mz(neutral, charge, table)

    true_peaks = [(ion.mz, float(model(ion))) for ion in fragment_mzs(peptide, kinds, table=table)]
    if dropout is not None:
        true_peaks = _drop(true_peaks, *dropout)
    noise_peaks = _noise_peaks(*noise, upper_mz=mz) if noise is not None else []

    return SpectrumRecord(
        id=spectrum_id or peptide.sequence_key,
        precursor_mz=mz,
        charge=charge,
        peaks=normalize_peaks(true_peaks + noise_peaks),
    )


def synth_spectra(
    peptides: Sequence[Union[Peptide, str]],
    charge: int = 2,
    kinds: Iterable[IonType] = (IonType.B, IonType.Y),
    noise_peaks: int = 0,
    dropout: float = 0.0,
    seed: int = 0,
    id_prefix: str = 'synth'
) -> List[SpectrumRecord]:
    """Peptide listesi için spektrumlar - her spektrumun seed'i (seed + sıra) ile türetilir"""
    kinds = tuple(kinds)
    records = []
    for number, peptide in enumerate(peptides, start=1):
        records.append(synth_spectrum(
            peptide,
            charge=charge,
            kinds=kinds,
            noise=(noise_peaks, seed + number) if noise_peaks else None,
            dropout=(dropout, seed + 7919 * number) if dropout else None,
            spectrum_id=f"{id_prefix}_{number}",
        ))
    logger.info(f"✅ {len(records)} sentetik spektrum üretildi (gürültü {noise_peaks}, dropout {dropout:.0%})")
    return records


def random_protein(length: int, rng: np.random.Generator, alphabet: str = "ACDEFGHKLMNPQRSTVWY") -> str:
    """Rastgele protein dizisi"""
    return "".join(rng.choice(list(alphabet), size=length).tolist())


def random_tryptic_peptides(
    n: int,
    seed: int = 0,
    min_length: int = 7,
    max_length: int = 20,
    alphabet: str = "ADEFGHLMNPQSTVWY"
) -> List[str]:
    """Sonu K/R ile biten, iç kısmında K/R olmayan tekil rastgele peptide'ler"""
    if min_length < 2 or max_length < min_length:
        raise RejectedInputError(f"Geçersiz uzunluk aralığı: {min_length}..{max_length}")
    rng = np.random.default_rng(seed)
    seen = set()
    peptides: List[str] = []
    while len(peptides) < n:
        length = int(rng.integers(min_length, max_length + 1))
        body = random_protein(length - 1, rng, alphabet)
        peptide = body + str(rng.choice(["K", "R"]))
        if peptide not in seen:
            seen.add(peptide)
            peptides.append(peptide)
    return peptides
