import math

import numpy as np
import pytest

from core.assembly import (
    DBGraph,
    build_graph,
    canonicalize,
    extract_contigs,
    peptide_confidence,
)
from core.chem import parse_peptide
from core.exceptions import RejectedInputError


def test_canonicalize():
    assert canonicalize("PEPTIDEK") == "PEPTLDEK"
    assert canonicalize("C(cam)M(ox)K") == "CMK"
    assert canonicalize(parse_peptide("IM(ox)N(deam)K")) == "LMNK"
    for text in ("PEPTIDEK", "LLIIK", "GASK"):
        assert canonicalize(canonicalize(text)) == canonicalize(text)


def test_overlapping_peptides_form_one_contig():
    graph = build_graph([("PEPTK", 1.0), ("PTKLR", 1.0)], k=3, ids=["a", "b"])
    assert set(graph.edges) == {"PEP", "EPT", "PTK", "TKL", "KLR"}
    assert graph.edge_tuple("PTK") == (2.0, 2)
    assert graph.edge_tuple("PEP") == (1.0, 1)

    contigs = extract_contigs(graph)
    assert len(contigs) == 1
    assert contigs[0].sequence == "PEPTKLR"
    assert contigs[0].support == ("a", "b")
    assert contigs[0].mean_weight == pytest.approx(6.0 / 5)
    assert not contigs[0].is_cycle


def test_duplicate_peptide_doubles_weights():
    single = build_graph([("PEPTK", 1.0)], k=3)
    double = build_graph([("PEPTK", 1.0), ("PEPTK", 1.0)], k=3)
    for kmer in single.edges:
        assert double.edge_tuple(kmer) == (2 * single.edge_tuple(kmer)[0], 2)


def test_branching_splits_contigs():
    graph = build_graph([("GASK", 1.0), ("GATK", 1.0)], k=3)
    assert [contig.sequence for contig in extract_contigs(graph)] == ["GASK", "GATK"]


def test_cycle_is_emitted_once():
    graph = build_graph([("GASGA", 1.0)], k=3)
    contigs = extract_contigs(graph)
    assert len(contigs) == 1
    assert contigs[0].sequence == "ASGAS"
    assert contigs[0].is_cycle
    assert contigs[0].mean_weight == pytest.approx(1.0)


def test_min_weight_prunes_edges():
    graph = build_graph([("PEPTK", 0.5), ("PTKLR", 0.5)], k=3)
    contigs = extract_contigs(graph, min_weight=0.75)
    assert [contig.sequence for contig in contigs] == ["PTK"]


def test_empty_graph():
    graph = build_graph([], k=4)
    assert isinstance(graph, DBGraph)
    assert extract_contigs(graph) == []


def test_short_peptides_are_recorded_not_added():
    graph = build_graph([("GA", 1.0), ("GASK", 1.0)], k=3)
    assert graph.short_peptides == ["GA"]
    assert set(graph.edges) == {"GAS", "ASK"}


def test_non_positive_confidence_is_skipped():
    graph = build_graph([("GASK", 0.0), ("PEPTK", 1.0)], k=3)
    assert "GAS" not in graph.edges
    assert graph.peptide_ids == ["1"]


def test_weight_conservation():
    rng = np.random.default_rng(8)
    peptides = []
    for _ in range(200):
        length = int(rng.integers(2, 15))
        peptides.append(("".join(rng.choice(list("ACDEFGHKLMNPQRSTVWY"), size=length).tolist()),
                         float(rng.uniform(0.1, 1.0))))
    k = 5
    graph = build_graph(peptides, k=k)
    expected = sum(conf * (len(seq) - k + 1) for seq, conf in peptides if len(seq) >= k)
    assert graph.total_weight == pytest.approx(expected)


def test_k_must_be_at_least_three():
    with pytest.raises(RejectedInputError):
        build_graph([("PEPTIDEK", 1.0)], k=2)


def test_peptide_confidence():
    assert peptide_confidence(0.0) == 1.0
    assert peptide_confidence(2.0) == 1.0
    assert peptide_confidence(-1.0) == pytest.approx(math.exp(-1.0))
    assert peptide_confidence(-1e6) > 0
    with pytest.raises(RejectedInputError):
        peptide_confidence(float('nan'))


def _has_repeated_kmer(sequence, size):
    kmers = [sequence[i:i + size] for i in range(len(sequence) - size + 1)]
    return len(kmers) != len(set(kmers))


def test_tiled_peptides_reassemble_protein():
    rng = np.random.default_rng(21)
    alphabet = list("ACDEFGHKLMNPQRSTVWY")
    recovered = 0
    proteins = 0
    while proteins < 50:
        protein = "".join(rng.choice(alphabet, size=100).tolist())
        if _has_repeated_kmer(protein, 5):
            continue
        proteins += 1
        peptides = [protein[start:start + 10] for start in range(0, 89, 4)] + [protein[90:]]
        graph = build_graph([(p, 1.0) for p in peptides], k=6)
        contigs = extract_contigs(graph)
        if len(contigs) == 1 and contigs[0].sequence == protein:
            recovered += 1
    assert recovered == 50
