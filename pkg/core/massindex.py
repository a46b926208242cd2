"""
specnova - Mass Index
Kütleye göre sıralı peptide deposu - ppm pencere sorguları
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

import numpy as np

from core.chem import (
    DEFAULT_TABLE,
    ModSpec,
    Peptide,
    ResidueTable,
    Tolerance,
    expand_modifications,
    parse_mod_specs,
    parse_peptide,
    peptide_mass,
)
from core.digest import TRYPSIN, DigestConfig, EnzymeRule, decoy_peptide, digest_all
from utils.logger import get_logger

logger = get_logger(__name__)

Origin = Tuple[str, bool]


@dataclass(frozen=True)
class ModificationConfig:
    """Sabit + değişken modifikasyon ayarları"""
    fixed: Tuple[ModSpec, ...] = ()
    variable: Tuple[ModSpec, ...] = ()
    max_var: int = 2

    @classmethod
    def from_strings(cls, fixed: str, variable: str, max_var: int) -> 'ModificationConfig':
        return cls(tuple(parse_mod_specs(fixed)), tuple(parse_mod_specs(variable)), max_var)


NO_MODS = ModificationConfig()


@dataclass(frozen=True)
class PeptideEntry:
    """Index kaydı - modifikasyon açılmış peptide ve kökenleri"""
    peptide: Peptide
    neutral_mass: float
    origin: Tuple[Origin, ...]

    @property
    def sequence_key(self) -> str:
        return self.peptide.sequence_key

    @property
    def is_decoy(self) -> bool:
        return all(is_decoy for _, is_decoy in self.origin)


class IndexStats(NamedTuple):
    n_entries: int
    n_targets: int
    n_decoys: int
    min_mass: float
    max_mass: float


@dataclass(frozen=True)
class MassIndex:
    """Kütleye göre artan sıralı PeptideEntry listesi"""
    entries: Tuple[PeptideEntry, ...] = ()
    n_proteins: int = 0
    masses: np.ndarray = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'entries', tuple(self.entries))
        masses = np.array([entry.neutral_mass for entry in self.entries], dtype=np.float64)
        if masses.size > 1 and np.any(np.diff(masses) < 0):
            raise ValueError("Index kütleye göre sıralı olmalı")
        masses.setflags(write=False)
        object.__setattr__(self, 'masses', masses)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def n_targets(self) -> int:
        return sum(1 for entry in self.entries if not entry.is_decoy)

    @property
    def n_decoys(self) -> int:
        return sum(1 for entry in self.entries if entry.is_decoy)

    def query(self, neutral_mass: float, tol: Tolerance) -> List[PeptideEntry]:
        return query(self, neutral_mass, tol)


def _collect(
    accumulator: Dict[str, Tuple[Peptide, Set[Origin]]],
    sequence: str,
    accessions: Iterable[str],
    is_decoy: bool,
    mods: ModificationConfig,
    max_length: int
):
    base = parse_peptide(sequence, max_length=max_length)
    for variant in expand_modifications(base, mods.fixed, mods.variable, mods.max_var):
        key = variant.sequence_key
        if key in accumulator:
            peptide, origins = accumulator[key]
            if is_decoy and any(not decoy for _, decoy in origins):
                # Target ile çakışan decoy: target olarak kalır
                continue
            if not is_decoy:
                origins.difference_update({o for o in origins if o[1]})
        else:
            accumulator[key] = (variant, set())
        accumulator[key][1].update((accession, is_decoy) for accession in accessions)


def build_index(
    proteins: Sequence,
    rule: EnzymeRule = TRYPSIN,
    cfg: DigestConfig = DigestConfig(),
    mods: ModificationConfig = NO_MODS,
    with_decoys: bool = True,
    table: ResidueTable = DEFAULT_TABLE
) -> MassIndex:
    """
    digest -> decoy -> modifikasyon açılımı -> kütle -> dedupe -> sırala
    Aynı çıktı için deterministik
    """
    proteins = list(proteins)
    if not proteins:
        logger.warning("⚠️ Protein yok - boş index oluşturuldu")
        return MassIndex()

    targets: Dict[str, Set[str]] = {}
    for sequence, _, accession in digest_all(proteins, rule, cfg):
        targets.setdefault(sequence, set()).add(accession)

    accumulator: Dict[str, Tuple[Peptide, Set[Origin]]] = {}
    for sequence in sorted(targets):
        _collect(accumulator, sequence, targets[sequence], False, mods, cfg.max_length)

    if with_decoys:
        self_decoys = 0
        for sequence in sorted(targets):
            decoy = decoy_peptide(sequence)
            if decoy in targets:
                if decoy == sequence:
                    self_decoys += 1
                continue
            _collect(accumulator, decoy, targets[sequence], True, mods, cfg.max_length)
        if self_decoys:
            logger.debug(f"🔍 {self_decoys} self-decoy peptide dışlandı")

    entries = [
        PeptideEntry(peptide, peptide_mass(peptide, table), tuple(sorted(origins)))
        for peptide, origins in accumulator.values()
    ]
    entries.sort(key=lambda entry: (entry.neutral_mass, entry.sequence_key))

    n_proteins = len({protein.accession for protein in proteins})
    index = MassIndex(tuple(entries), n_proteins=n_proteins)
    stats = index_stats(index)
    logger.info(
        f"✅ Index oluşturuldu: {stats.n_entries} kayıt "
        f"({stats.n_targets} target, {stats.n_decoys} decoy, {n_proteins} protein)"
    )
    return index


def query(index: MassIndex, neutral_mass: float, tol: Tolerance) -> List[PeptideEntry]:
    """ppm penceresindeki tüm kayıtlar - iki sınırda binary search"""
    if neutral_mass <= 0 or not index.entries:
        return []
    width = tol.width(neutral_mass)
    lo = np.searchsorted(index.masses, neutral_mass - width, side='left')
    hi = np.searchsorted(index.masses, neutral_mass + width, side='right')
    return list(index.entries[lo:hi])


def index_stats(index: MassIndex) -> IndexStats:
    """(n_entries, n_targets, n_decoys, min_mass, max_mass)"""
    if not index.entries:
        return IndexStats(0, 0, 0, 0.0, 0.0)
    return IndexStats(
        n_entries=len(index.entries),
        n_targets=index.n_targets,
        n_decoys=index.n_decoys,
        min_mass=float(index.masses[0]),
        max_mass=float(index.masses[-1]),
    )


def index_from_sequences(
    sequences: Iterable[Tuple[str, bool]],
    accession: str = 'synthetic',
    table: ResidueTable = DEFAULT_TABLE
) -> MassIndex:
    """Hazır peptide listesinden index (digest olmadan) - (sekans, is_decoy)"""
    accumulator: Dict[str, Tuple[Peptide, Set[Origin]]] = {}
    ordered = sorted(sequences, key=lambda item: item[1])
    for sequence, is_decoy in ordered:
        _collect(accumulator, sequence, [accession], is_decoy, NO_MODS, max_length=None)
    entries = [
        PeptideEntry(peptide, peptide_mass(peptide, table), tuple(sorted(origins)))
        for peptide, origins in accumulator.values()
    ]
    entries.sort(key=lambda entry: (entry.neutral_mass, entry.sequence_key))
    return MassIndex(tuple(entries), n_proteins=1)
