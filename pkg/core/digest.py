"""
specnova - Digest
In silico enzimatik digestion (pyteomics.parser) ve decoy peptide üretimi
"""

from dataclasses import dataclass
from typing import Iterable, Iterator, List, Tuple

from pyteomics import parser

from config.constants import WILDCARD_RESIDUES
from core.exceptions import RejectedInputError
from utils.logger import get_logger

logger = get_logger(__name__)

DigestedPeptide = Tuple[str, int, str]


@dataclass(frozen=True)
class EnzymeRule:
    """Enzim kesim kuralı"""
    name: str
    cleave_after: frozenset
    proline_exception: bool = False

    def __post_init__(self):
        if not self.cleave_after:
            raise RejectedInputError(f"Enzim {self.name}: cleave_after boş olamaz")
        object.__setattr__(self, 'cleave_after', frozenset(self.cleave_after))

    @property
    def regex(self) -> str:
        """
        pyteomics kesim regex'i
        Lookahead son residue'den sonraki pozisyonu dışarıda bırakır
        """
        follow = '[^P]' if self.proline_exception else '.'
        return f"[{''.join(sorted(self.cleave_after))}](?={follow})"


@dataclass(frozen=True)
class DigestConfig:
    """Digestion parametreleri"""
    max_missed_cleavages: int = 2
    min_length: int = 6
    max_length: int = 50

    def __post_init__(self):
        if self.max_missed_cleavages < 0:
            raise RejectedInputError(f"max_missed_cleavages negatif olamaz: {self.max_missed_cleavages}")
        if self.min_length < 1 or self.min_length > self.max_length:
            raise RejectedInputError(f"Geçersiz uzunluk aralığı: {self.min_length}..{self.max_length}")


TRYPSIN = EnzymeRule('trypsin', frozenset('KR'))

ENZYMES = {
    'trypsin': TRYPSIN,
}


def get_enzyme(name: str, proline_exception: bool = False) -> EnzymeRule:
    """İsimle enzim kuralı al"""
    try:
        rule = ENZYMES[name.lower()]
    except KeyError:
        raise RejectedInputError(f"Bilinmeyen enzim: {name} (desteklenen: {', '.join(sorted(ENZYMES))})") from None
    return EnzymeRule(rule.name, rule.cleave_after, proline_exception)


def cleavage_sites(sequence: str, rule: EnzymeRule) -> List[int]:
    """
    Kesim pozisyonları (1-tabanlı, i ile i+1 arası)
    Son residue'den sonraki pozisyon dahil değil
    """
    starts = sorted(start for start, _ in parser.icleave(sequence, rule.regex, 0))
    return starts[1:]


def split_at_wildcards(sequence: str) -> List[Tuple[int, str]]:
    """Wildcard residue'lerde böl -> (offset, segment) listesi"""
    segments = []
    start = 0
    for i, residue in enumerate(sequence):
        if residue in WILDCARD_RESIDUES:
            if i > start:
                segments.append((start, sequence[start:i]))
            start = i + 1
    if start < len(sequence):
        segments.append((start, sequence[start:]))
    return segments


def _digest_segment(segment: str, rule: EnzymeRule, cfg: DigestConfig) -> Iterator[Tuple[int, int, int]]:
    fragments = parser.icleave(
        segment,
        rule.regex,
        cfg.max_missed_cleavages,
        min_length=cfg.min_length,
        max_length=cfg.max_length,
    )
    for start, peptide in fragments:
        yield start, start + len(peptide), parser.num_sites(peptide, rule.regex)


def digest(protein, rule: EnzymeRule = TRYPSIN, cfg: DigestConfig = DigestConfig()) -> List[DigestedPeptide]:
    """
    Proteini peptide'lere böl: (peptide, missed_cleavage_count, accession)
    Wildcard residue içeren fragmentler üretilmez, çıktı pozisyon sırasında
    """
    sequence = protein.sequence
    segments = split_at_wildcards(sequence)
    if len(segments) > 1 or (segments and len(segments[0][1]) != len(sequence)):
        logger.debug(f"🔍 {protein.accession}: wildcard nedeniyle {len(segments)} segmente bölündü")

    peptides: List[Tuple[int, int, DigestedPeptide]] = []
    for offset, segment in segments:
        for start, end, missed in _digest_segment(segment, rule, cfg):
            peptides.append((offset + start, offset + end, (segment[start:end], missed, protein.accession)))

    peptides.sort(key=lambda item: (item[0], item[1]))
    return [item[2] for item in peptides]


def digest_all(proteins: Iterable, rule: EnzymeRule = TRYPSIN, cfg: DigestConfig = DigestConfig()) -> List[DigestedPeptide]:
    """Tüm proteinleri digest et - (accession, pozisyon) sırasında birleştir"""
    results: List[DigestedPeptide] = []
    n_proteins = 0
    for protein in proteins:
        results.extend(digest(protein, rule, cfg))
        n_proteins += 1
    logger.info(f"✅ {n_proteins} protein digest edildi: {len(results)} peptide")
    return results


def decoy_peptide(peptide: str) -> str:
    """Pseudo-reverse: son residue sabit, kalanı ters çevrilir"""
    if not peptide:
        raise RejectedInputError("Boş peptide")
    return peptide[-2::-1] + peptide[-1]


def is_self_decoy(peptide: str) -> bool:
    """Decoy'u kendisiyle aynı olan peptide (ör. 'AK')"""
    return decoy_peptide(peptide) == peptide
