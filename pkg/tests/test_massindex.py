import struct

import numpy as np
import orjson
import pytest

from core.chem import (
    DEFAULT_TABLE,
    ResidueTable,
    ResidueToken,
    Tolerance,
    mass_table_hash,
    parse_peptide,
    peptide_mass,
)
from core.digest import TRYPSIN, DigestConfig
from core.exceptions import IndexFormatError
from core.massindex import (
    MassIndex,
    ModificationConfig,
    PeptideEntry,
    build_index,
    index_from_sequences,
    index_stats,
    query,
)
from database.index_store import FORMAT_VERSION, MAGIC, IndexStore
from msio.records import ProteinRecord

PROTEIN = ProteinRecord("P1", "", "MKRPEPTIDEKAR")
SMALL_DIGEST = DigestConfig(0, 2, 50)


def test_build_index_example():
    index = build_index([PROTEIN], TRYPSIN, SMALL_DIGEST, with_decoys=False)
    assert [entry.sequence_key for entry in index.entries] == ["AR", "MK", "PEPTIDEK"]
    assert list(index.masses) == sorted(index.masses)
    stats = index_stats(index)
    assert stats.n_entries == 3 and stats.n_targets == 3 and stats.n_decoys == 0
    assert index.entries[2].origin == (("P1", False),)


def test_build_index_with_decoys():
    index = build_index([PROTEIN], TRYPSIN, SMALL_DIGEST, with_decoys=True)
    targets = [e for e in index.entries if not e.is_decoy]
    decoys = [e for e in index.entries if e.is_decoy]
    assert len(index) <= 2 * len(targets)
    assert {e.sequence_key for e in decoys} == {"EDITPEPK"}
    target_masses = [e.neutral_mass for e in targets]
    for decoy in decoys:
        assert any(abs(decoy.neutral_mass - mass) < 1e-9 for mass in target_masses)
    assert index_stats(index).n_decoys <= index_stats(index).n_targets


def test_build_index_dedupes_duplicate_proteins():
    once = build_index([PROTEIN], TRYPSIN, SMALL_DIGEST)
    twice = build_index([PROTEIN, PROTEIN], TRYPSIN, SMALL_DIGEST)
    assert once.entries == twice.entries


def test_build_index_empty():
    index = build_index([], TRYPSIN, SMALL_DIGEST)
    assert len(index) == 0
    assert index_stats(index) == (0, 0, 0, 0.0, 0.0)
    assert query(index, 500.0, Tolerance.ppm(20)) == []


def test_modification_expansion_in_index():
    protein = ProteinRecord("P2", "", "GGCMGGK")
    mods = ModificationConfig.from_strings("cam:C", "ox:M", 1)
    index = build_index([protein], TRYPSIN, DigestConfig(0, 2, 50), mods, with_decoys=False)
    assert {e.sequence_key for e in index.entries} == {"GGC(cam)MGGK", "GGC(cam)M(ox)GGK"}


def test_target_wins_over_decoy_collision():
    index = index_from_sequences([("PEPTIDEK", False), ("PEPTIDEK", True), ("EDITPEPK", True)])
    by_key = {e.sequence_key: e for e in index.entries}
    assert not by_key["PEPTIDEK"].is_decoy
    assert by_key["EDITPEPK"].is_decoy


def test_query_window_example():
    index = index_from_sequences([("PEPTIDE", False), ("PEPTIDEK", False), ("GASK", False)])
    hits = query(index, 799.35995, Tolerance.ppm(20))
    assert [e.sequence_key for e in hits] == ["PEPTIDE"]
    assert query(index, 100.0, Tolerance.ppm(20)) == []


def test_query_zero_tolerance_exact_only():
    index = index_from_sequences([("PEPTIDE", False), ("GASK", False)])
    mass = peptide_mass(parse_peptide("PEPTIDE"))
    assert [e.sequence_key for e in query(index, mass, Tolerance.ppm(0))] == ["PEPTIDE"]
    assert query(index, mass + 1e-6, Tolerance.ppm(0)) == []


def test_query_matches_linear_scan():
    rng = np.random.default_rng(7)
    peptide = parse_peptide("GASK")
    masses = np.sort(rng.uniform(500.0, 3000.0, size=100_000))
    index = MassIndex(tuple(PeptideEntry(peptide, float(m), (("R", False),)) for m in masses))
    for _ in range(1000):
        mass = float(rng.uniform(450.0, 3050.0))
        tol = Tolerance.ppm(float(rng.uniform(0.0, 50.0))) if rng.random() < 0.5 \
            else Tolerance.da(float(rng.uniform(0.0, 0.5)))
        width = tol.width(mass)
        expected = np.flatnonzero((masses >= mass - width) & (masses <= mass + width))
        hits = index.query(mass, tol)
        assert len(hits) == len(expected)
        for entry in hits:
            assert abs(entry.neutral_mass - mass) <= width


def test_unsorted_index_rejected():
    peptide = parse_peptide("GASK")
    with pytest.raises(ValueError):
        MassIndex((PeptideEntry(peptide, 2.0, (("R", False),)), PeptideEntry(peptide, 1.0, (("R", False),))))


def test_index_store_round_trip(tmp_path):
    mods = ModificationConfig.from_strings("cam:C", "ox:M,deam:NQ", 2)
    proteins = [PROTEIN, ProteinRecord("P2", "", "GGCMGGNKLLQWR")]
    index = build_index(proteins, TRYPSIN, SMALL_DIGEST, mods)
    path = tmp_path / "index.spn"
    params = {"source": "test", "missed_cleavages": 0}
    IndexStore.save(index, str(path), params)

    loaded, loaded_params = IndexStore.load(str(path))
    assert loaded_params == params
    assert loaded.entries == index.entries
    assert loaded.n_proteins == 2
    assert path.read_bytes()[:len(MAGIC)] == MAGIC


def test_index_serialization_is_deterministic():
    first = IndexStore.to_bytes(build_index([PROTEIN], TRYPSIN, SMALL_DIGEST))
    second = IndexStore.to_bytes(build_index([PROTEIN], TRYPSIN, SMALL_DIGEST))
    assert first == second


def test_index_store_rejects_bad_magic():
    data = IndexStore.to_bytes(build_index([PROTEIN], TRYPSIN, SMALL_DIGEST))
    with pytest.raises(IndexFormatError):
        IndexStore.from_bytes(b"NOTANIDX" + data[len(MAGIC):])
    with pytest.raises(IndexFormatError):
        IndexStore.from_bytes(data[:-3])


def test_index_store_rejects_mass_table_drift():
    data = IndexStore.to_bytes(build_index([PROTEIN], TRYPSIN, SMALL_DIGEST))
    entries = dict(DEFAULT_TABLE.entries)
    entries[ResidueToken("G")] = 57.0
    with pytest.raises(IndexFormatError):
        IndexStore.from_bytes(data, table=ResidueTable(entries))


def _raw_index(header):
    header_bytes = orjson.dumps(header)
    return b"".join([
        MAGIC,
        struct.pack('<H', FORMAT_VERSION),
        mass_table_hash(),
        struct.pack('<Q', len(header_bytes)),
        header_bytes,
        struct.pack('<Q', 0),
    ])


@pytest.mark.parametrize("header", [
    {"n_proteins": 0, "params": {}},
    {"entries": [], "params": {}},
    {"entries": {}, "n_proteins": 0, "params": {}},
    [1, 2, 3],
])
def test_index_store_rejects_malformed_header(header):
    with pytest.raises(IndexFormatError):
        IndexStore.from_bytes(_raw_index(header))


def test_index_store_accepts_minimal_header():
    index, params = IndexStore.from_bytes(_raw_index({"entries": [], "n_proteins": 0, "params": {}}))
    assert len(index) == 0
    assert params == {}
