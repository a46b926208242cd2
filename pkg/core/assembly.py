"""
specnova - Assembly
Güven ağırlıklı de Bruijn grafı ile kabul edilen peptide'lerden protein contig'leri
"""

import math
import re
import sys
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from core.chem import Peptide
from core.exceptions import RejectedInputError
from utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_K = 6

_MOD_SUFFIX = re.compile(r"\([a-z]+\)")


def canonicalize(peptide: Union[str, Peptide]) -> str:
    """I -> L, modifikasyonlar ana residue harfine indirgenir"""
    text = peptide.plain_sequence if isinstance(peptide, Peptide) else _MOD_SUFFIX.sub("", peptide)
    return "".join(text.split()).upper().replace("I", "L")


def peptide_confidence(score: float) -> float:
    """Uzunluk-normalize skordan pozitif güven: exp(score), (0, 1] aralığına kırpılır"""
    if math.isnan(score):
        raise RejectedInputError("Skor NaN olamaz")
    if score >= 0:
        return 1.0
    return max(math.exp(score), sys.float_info.min)


@dataclass
class EdgeStats:
    weight: float = 0.0
    supporters: List[int] = field(default_factory=list)

    @property
    def support(self) -> int:
        return len(self.supporters)


@dataclass
class DBGraph:
    """Düğümler (k-1)-mer, kenarlar k-mer; ağırlık = destekleyen peptide güvenlerinin toplamı"""
    k: int
    nodes: Set[str] = field(default_factory=set)
    edges: Dict[str, EdgeStats] = field(default_factory=dict)
    peptide_ids: List[str] = field(default_factory=list)
    short_peptides: List[str] = field(default_factory=list)

    def add_peptide(self, sequence: str, confidence: float, peptide_id: str) -> bool:
        """Peptide k-mer'lerini ekle - k'dan kısaysa kaydedilir ama grafa girmez"""
        if len(sequence) < self.k:
            self.short_peptides.append(sequence)
            return False

        number = len(self.peptide_ids)
        self.peptide_ids.append(peptide_id)
        for start in range(len(sequence) - self.k + 1):
            kmer = sequence[start:start + self.k]
            stats = self.edges.setdefault(kmer, EdgeStats())
            stats.weight += confidence
            if not stats.supporters or stats.supporters[-1] != number:
                stats.supporters.append(number)
            self.nodes.add(kmer[:-1])
            self.nodes.add(kmer[1:])
        return True

    def edge_tuple(self, kmer: str) -> Tuple[float, int]:
        stats = self.edges[kmer]
        return stats.weight, stats.support

    @property
    def total_weight(self) -> float:
        return sum(stats.weight for stats in self.edges.values())


@dataclass(frozen=True)
class Contig:
    """Dallanmayan yol - sequence, katkı veren peptide id'leri, ortalama kenar ağırlığı"""
    sequence: str
    support: Tuple[str, ...]
    mean_weight: float
    is_cycle: bool = False


def build_graph(
    peptides: Iterable[Tuple[str, float]],
    k: int = DEFAULT_K,
    ids: Optional[Sequence[str]] = None
) -> DBGraph:
    """
    (sequence, confidence) listesinden de Bruijn grafı
    Her k-mer için weight += confidence, support += 1 (peptide başına)
    """
    if k < 3:
        raise RejectedInputError(f"k en az 3 olmalı: {k}")

    graph = DBGraph(k=k)
    skipped = 0
    for number, (sequence, confidence) in enumerate(peptides):
        peptide_id = ids[number] if ids is not None else str(number)
        if not confidence > 0:
            logger.warning(f"⚠️ Pozitif olmayan güven ({confidence}), peptide atlandı: {peptide_id}")
            skipped += 1
            continue
        graph.add_peptide(canonicalize(sequence), float(confidence), peptide_id)

    if graph.short_peptides:
        logger.warning(f"⚠️ {len(graph.short_peptides)} peptide k={k}'dan kısa, grafa eklenmedi")
    logger.info(
        f"📊 de Bruijn grafı: {len(graph.peptide_ids)} peptide, {len(graph.nodes)} düğüm, "
        f"{len(graph.edges)} kenar (k={k}, atlanan {skipped})"
    )
    return graph


def _make_contig(graph: DBGraph, path: List[str], is_cycle: bool) -> Contig:
    sequence = path[0] + "".join(node[-1] for node in path[1:])
    kmers = [a + b[-1] for a, b in zip(path, path[1:])]
    supporters = sorted({number for kmer in kmers for number in graph.edges[kmer].supporters})
    mean_weight = sum(graph.edges[kmer].weight for kmer in kmers) / len(kmers)
    return Contig(
        sequence=sequence,
        support=tuple(graph.peptide_ids[number] for number in supporters),
        mean_weight=mean_weight,
        is_cycle=is_cycle,
    )


def extract_contigs(graph: DBGraph, min_weight: float = 0.0) -> List[Contig]:
    """
    min_weight altındaki kenarlar atılır, ardından maksimal dallanmayan yollar (unitig)
    Döngüler bir kez, sözlükçe en küçük düğümden kesilerek is_cycle ile üretilir
    """
    successors: Dict[str, List[str]] = defaultdict(list)
    in_degree: Dict[str, int] = defaultdict(int)
    for kmer in sorted(graph.edges):
        if graph.edges[kmer].weight < min_weight:
            continue
        source, target = kmer[:-1], kmer[1:]
        successors[source].append(target)
        in_degree[target] += 1

    def one_in_one_out(node: str) -> bool:
        return in_degree[node] == 1 and len(successors[node]) == 1

    nodes = sorted(set(successors) | set(in_degree))
    used: Set[Tuple[str, str]] = set()
    contigs: List[Contig] = []

    for node in nodes:
        if one_in_one_out(node):
            continue
        for target in successors[node]:
            path = [node, target]
            used.add((node, target))
            while one_in_one_out(path[-1]):
                nxt = successors[path[-1]][0]
                used.add((path[-1], nxt))
                path.append(nxt)
            contigs.append(_make_contig(graph, path, is_cycle=False))

    # Kalan kenarlar yalnızca izole döngülerde
    for node in nodes:
        if not one_in_one_out(node) or (node, successors[node][0]) in used:
            continue
        path = [node]
        while True:
            nxt = successors[path[-1]][0]
            used.add((path[-1], nxt))
            path.append(nxt)
            if nxt == node:
                break
        contigs.append(_make_contig(graph, path, is_cycle=True))

    contigs.sort(key=lambda contig: contig.sequence)
    n_cycles = sum(1 for contig in contigs if contig.is_cycle)
    logger.info(f"✅ {len(contigs)} contig çıkarıldı ({n_cycles} döngü, min_weight={min_weight})")
    return contigs
