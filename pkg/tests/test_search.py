import itertools

import numpy as np
import pytest

from config.constants import AMINO_ACID_MASSES, HybridChoice, PsmSource, SearchMode
from core.assembly import canonicalize
from core.chem import Tolerance, as_peptide, parse_peptide, peptide_mass
from core.digest import decoy_peptide
from core.exceptions import RejectedInputError
from core.fdr import filter_at_fdr
from core.knapsack import build_knapsack
from core.massindex import MassIndex, index_from_sequences
from core.scorer import UniformScorer, bidirectional_score
import core.search as search_module
from core.search import (
    SearchConfig,
    db_search,
    denovo_beam_search,
    hybrid_identify,
    peptide_within_tolerance,
)
from core.searcher import SpectrumSearcher, apply_fdr
from msio.records import SpectrumRecord
from reports.evaluation import evaluate
from utils.synthetic import random_tryptic_peptides, synth_spectra, synth_spectrum

CFG = SearchConfig()


def _mass(sequence):
    return peptide_mass(as_peptide(sequence))


def test_db_search_prefers_target_over_decoy(perfect_spectrum, fine_scorer):
    index = index_from_sequences([("PEPTIDEK", False), ("EDITPEPK", True)])
    spectrum = perfect_spectrum("PEPTIDEK")
    psms = db_search(spectrum, spectrum.neutral_mass, index, fine_scorer, CFG)
    assert [p.sequence for p in psms] == ["PEPTIDEK", "EDITPEPK"]
    assert psms[0].rank == 1 and not psms[0].is_decoy
    assert psms[1].rank == 2 and psms[1].is_decoy
    assert psms[0].score >= psms[1].score
    assert all(p.source is PsmSource.DB for p in psms)
    assert len(psms[0].per_position_scores) == 8


def test_db_search_empty_window(perfect_spectrum, fine_scorer):
    index = index_from_sequences([("GASK", False)])
    spectrum = perfect_spectrum("PEPTIDEK")
    assert db_search(spectrum, spectrum.neutral_mass, index, fine_scorer, CFG) == []


def test_db_search_tie_break_is_lexicographic():
    index = index_from_sequences([("GASAK", False), ("AGSAK", False), ("SAGAK", False)])
    spectrum = SpectrumRecord("t", 200.0, 2)
    psms = db_search(spectrum, _mass("GASAK"), index, UniformScorer(), SearchConfig(top_k=3))
    assert [p.sequence for p in psms] == ["AGSAK", "GASAK", "SAGAK"]
    assert [p.rank for p in psms] == [1, 2, 3]


def test_denovo_recovers_short_peptide(perfect_spectrum, fine_scorer):
    spectrum = perfect_spectrum("GAG", charge=1)
    knapsack = build_knapsack(fine_scorer.vocabulary.masses.tolist(), 500.0)
    psms = denovo_beam_search(spectrum, spectrum.neutral_mass, fine_scorer, knapsack, SearchConfig(beam_width=5))
    assert psms[0].sequence == "GAG"
    assert psms[0].source is PsmSource.DENOVO
    for psm in psms:
        assert peptide_within_tolerance(psm.peptide, spectrum.neutral_mass, CFG.precursor_tolerance)


def test_denovo_zero_mass_is_empty(fine_scorer):
    spectrum = SpectrumRecord("z", 100.0, 1)
    knapsack = build_knapsack([AMINO_ACID_MASSES["G"]], 100.0)
    assert denovo_beam_search(spectrum, 0.0, fine_scorer, knapsack) == []


def test_denovo_drops_candidates_outside_precursor_tolerance(monkeypatch, perfect_spectrum, fine_scorer):
    spectrum = perfect_spectrum("GAG", charge=1)
    knapsack = build_knapsack(fine_scorer.vocabulary.masses.tolist(), 500.0)

    def fake_pass(*args, **kwargs):
        return {"GAG": parse_peptide("GAG"), "GAA": parse_peptide("GAA")}

    monkeypatch.setattr(search_module, "_beam_pass", fake_pass)
    psms = denovo_beam_search(spectrum, spectrum.neutral_mass, fine_scorer, knapsack, CFG)
    assert [p.sequence for p in psms] == ["GAG"]

    monkeypatch.setattr(search_module, "_beam_pass", lambda *args, **kwargs: {"GAA": parse_peptide("GAA")})
    assert denovo_beam_search(spectrum, spectrum.neutral_mass, fine_scorer, knapsack, CFG) == []


def _exhaustive_best(spectrum, mass, scorer, alphabet, cfg):
    best = None
    for length in range(1, cfg.max_length + 1):
        for letters in itertools.product(alphabet, repeat=length):
            peptide = parse_peptide("".join(letters))
            if not peptide_within_tolerance(peptide, mass, cfg.precursor_tolerance):
                continue
            key = (-bidirectional_score(scorer, spectrum, mass, peptide).total, peptide.sequence_key)
            if best is None or key < best:
                best = key
    return best[1]


def test_beam_equals_exhaustive_on_tiny_instances(fine_scorer):
    alphabet = "GASV"
    tokens = parse_peptide(alphabet).tokens
    knapsack = build_knapsack([AMINO_ACID_MASSES[r] for r in alphabet], 400.0)
    cfg = SearchConfig(beam_width=64, max_length=3)
    rng = np.random.default_rng(17)

    agreements = 0
    for number in range(100):
        length = int(rng.integers(1, 4))
        sequence = "".join(rng.choice(list(alphabet), size=length).tolist())
        spectrum = synth_spectrum(sequence, charge=1, spectrum_id=f"tiny_{number}")
        mass = spectrum.neutral_mass
        psms = denovo_beam_search(spectrum, mass, fine_scorer, knapsack, cfg, tokens=tokens)
        if psms and psms[0].sequence == _exhaustive_best(spectrum, mass, fine_scorer, alphabet, cfg):
            agreements += 1
    assert agreements == 100


@pytest.fixture(scope="module")
def tryptic_peptides():
    return random_tryptic_peptides(100, seed=42)


@pytest.fixture(scope="module")
def tryptic_spectra(tryptic_peptides):
    return synth_spectra(tryptic_peptides, charge=2)


def test_db_self_identification(tryptic_peptides, tryptic_spectra, fine_scorer):
    index = index_from_sequences(
        [(p, False) for p in tryptic_peptides] + [(decoy_peptide(p), True) for p in tryptic_peptides]
    )
    searcher = SpectrumSearcher(SearchMode.DB, fine_scorer, CFG, index=index, threads=4, batch_size=16)
    result = searcher.run(tryptic_spectra)
    assert result.n_errors == 0

    top = {p.spectrum_id: p for p in result.psms if p.rank == 1}
    hits = sum(
        1 for spectrum, peptide in zip(tryptic_spectra, tryptic_peptides)
        if top[spectrum.id].sequence == peptide and not top[spectrum.id].is_decoy
    )
    assert hits == 100

    scored = apply_fdr(result, 0.01)
    accepted = filter_at_fdr([p for p in scored if p.rank == 1], 0.01)
    assert len(accepted) >= 99


def test_denovo_self_identification(tryptic_peptides, tryptic_spectra, fine_scorer, vocabulary_knapsack):
    recovered = 0
    for spectrum, peptide in zip(tryptic_spectra, tryptic_peptides):
        psms = denovo_beam_search(spectrum, spectrum.neutral_mass, fine_scorer, vocabulary_knapsack, CFG)
        for psm in psms:
            assert peptide_within_tolerance(psm.peptide, spectrum.neutral_mass, CFG.precursor_tolerance)
        if psms and canonicalize(psms[0].peptide) == canonicalize(peptide):
            recovered += 1
    assert recovered >= 95


def test_denovo_with_noise_and_dropout(tryptic_peptides, fine_scorer, vocabulary_knapsack):
    spectra = synth_spectra(tryptic_peptides, charge=2, noise_peaks=30, dropout=0.2, seed=9)
    pairs = []
    for spectrum, peptide in zip(spectra, tryptic_peptides):
        psms = denovo_beam_search(spectrum, spectrum.neutral_mass, fine_scorer, vocabulary_knapsack, CFG)
        pairs.append((peptide, psms[0].peptide if psms else None))
    report = evaluate(pairs, Tolerance.da(0.5))
    assert report.aa_recall >= 0.80


def _swap_homolog(sequence):
    for i in range(len(sequence) - 2):
        if sequence[i] != sequence[i + 1]:
            return sequence[:i] + sequence[i + 1] + sequence[i] + sequence[i + 2:]
    return None


def test_hybrid_prefers_db_for_indexed_peptides(tryptic_peptides, tryptic_spectra, fine_scorer, vocabulary_knapsack):
    index = index_from_sequences([(p, False) for p in tryptic_peptides[:20]])
    chosen_db = 0
    for spectrum, peptide in zip(tryptic_spectra[:20], tryptic_peptides[:20]):
        decision = hybrid_identify(spectrum, spectrum.neutral_mass, index, fine_scorer, vocabulary_knapsack, CFG)
        assert decision.db_best.sequence == peptide
        assert decision.chosen_psm.source is PsmSource.HYBRID
        if decision.chosen is HybridChoice.DB:
            chosen_db += 1
            assert decision.chosen_psm.sequence == peptide
            if decision.margin is not None:
                assert decision.margin <= 0
    assert chosen_db == 20


def test_hybrid_prefers_denovo_over_poor_homologs(tryptic_peptides, tryptic_spectra, fine_scorer, vocabulary_knapsack):
    peptides = tryptic_peptides[20:40]
    spectra = tryptic_spectra[20:40]
    homologs = [_swap_homolog(p) for p in peptides]
    index = index_from_sequences([(h, False) for h in homologs if h is not None])

    chosen_denovo = 0
    for spectrum in spectra:
        decision = hybrid_identify(spectrum, spectrum.neutral_mass, index, fine_scorer, vocabulary_knapsack, CFG)
        if decision.chosen is HybridChoice.DENOVO:
            chosen_denovo += 1
            if decision.db_best is not None:
                assert decision.margin > 0
        if decision.db_best is not None and decision.denovo_best is not None:
            assert decision.chosen_psm.score >= decision.db_best.score
    assert chosen_denovo >= 19


def test_hybrid_none_when_nothing_found(fine_scorer):
    spectrum = SpectrumRecord("none", 100.0, 1)
    knapsack = build_knapsack([AMINO_ACID_MASSES["W"]], 200.0)
    decision = hybrid_identify(spectrum, spectrum.neutral_mass, MassIndex(), fine_scorer, knapsack)
    assert decision.chosen is HybridChoice.NONE
    assert decision.chosen_psm is None
    assert decision.margin is None


def test_searcher_requires_index(fine_scorer):
    with pytest.raises(RejectedInputError):
        SpectrumSearcher(SearchMode.DB, fine_scorer)
    with pytest.raises(RejectedInputError):
        SpectrumSearcher(SearchMode.DENOVO, fine_scorer, threads=0)


def test_searcher_output_independent_of_threads(tryptic_peptides, tryptic_spectra, fine_scorer):
    index = index_from_sequences(
        [(p, False) for p in tryptic_peptides[:30]] + [(decoy_peptide(p), True) for p in tryptic_peptides[:30]]
    )
    serial = SpectrumSearcher(SearchMode.HYBRID, fine_scorer, CFG, index=index, threads=1, batch_size=7)
    parallel = SpectrumSearcher(SearchMode.HYBRID, fine_scorer, CFG, index=index, threads=4, batch_size=3)
    first = serial.run(tryptic_spectra[:30])
    second = parallel.run(tryptic_spectra[:30])
    assert first.psms == second.psms
    assert apply_fdr(first, 0.01) == apply_fdr(second, 0.01)
    assert all(p.source is PsmSource.HYBRID for p in first.psms)
