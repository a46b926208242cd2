import io
from datetime import date

import pytest

from config.constants import PsmSource, WildcardPolicy
from core.chem import parse_peptide
from core.exceptions import FetchError, ParseError, RejectedInputError
from msio.contig_fasta import write_contigs
from msio.fasta import parse_fasta
from msio.mgf import parse_mgf, precursor_neutral_mass, read_mgf, write_mgf
from msio.psm_tsv import read_psms, read_sequences, write_digest, write_psms
from msio.records import ParseSummary, PsmRecord, SpectrumRecord
from msio.uniprot_client import UniProtClient
from utils.cache import CacheManager

MGF_TEXT = """\
BEGIN IONS
TITLE=scan=1
PEPMASS=400.687 1234.5
CHARGE=2+
RTINSECONDS=12.5
300.1 10
200.2 30
100.3 20
END IONS
"""


def test_parse_mgf_block():
    summary = ParseSummary()
    records = list(parse_mgf(io.StringIO(MGF_TEXT), summary))
    assert len(records) == 1
    record = records[0]
    assert record.id == "scan=1"
    assert record.precursor_mz == 400.687
    assert record.charge == 2
    assert record.retention_seconds == 12.5
    assert [mz for mz, _ in record.peaks] == [100.3, 200.2, 300.1]
    assert summary.n_records == 1 and summary.n_errors == 0


def test_parse_mgf_empty_stream():
    summary = ParseSummary()
    assert list(parse_mgf(io.StringIO(""), summary)) == []
    assert summary.n_errors == 0


def test_parse_mgf_accepts_bytes():
    records = list(parse_mgf(io.BytesIO(MGF_TEXT.encode("utf-8"))))
    assert records[0].charge == 2


def test_parse_mgf_defaults_missing_charge():
    text = "BEGIN IONS\nTITLE=a\nPEPMASS=500.0\n100 1\nEND IONS\n"
    summary = ParseSummary()
    (record,) = parse_mgf(io.StringIO(text), summary)
    assert record.charge == 2
    assert record.charge_defaulted
    assert summary.n_warnings == 1


def test_parse_mgf_collects_block_errors():
    text = (
        "BEGIN IONS\nTITLE=bad\nPEPMASS=500.0\nCHARGE=2+\n100 abc\nEND IONS\n"
        "BEGIN IONS\nTITLE=nomass\nCHARGE=2+\n100 1\nEND IONS\n"
        "BEGIN IONS\nTITLE=good\nPEPMASS=500.0\nCHARGE=3\n100 1\nEND IONS\n"
        "BEGIN IONS\nTITLE=open\nPEPMASS=500.0\n"
    )
    summary = ParseSummary()
    records = list(parse_mgf(io.StringIO(text), summary))
    assert [r.id for r in records] == ["good"]
    assert summary.n_errors == 3
    first = summary.errors[0]
    assert isinstance(first, ParseError)
    assert first.line_number == 5
    assert first.record_id == "bad"


def test_parse_mgf_rejects_empty_block():
    text = "BEGIN IONS\nTITLE=empty\nPEPMASS=500.0\nCHARGE=2\nEND IONS\n"
    summary = ParseSummary()
    assert list(parse_mgf(io.StringIO(text), summary)) == []
    assert summary.n_errors == 1


def test_precursor_neutral_mass():
    assert precursor_neutral_mass(400.68725, 2) == pytest.approx(799.35995, abs=1e-4)
    assert precursor_neutral_mass(500.0 + 1.007276, 1) == pytest.approx(500.0)
    assert precursor_neutral_mass(100.0, 1) == pytest.approx(98.992724)
    with pytest.raises(RejectedInputError):
        precursor_neutral_mass(100.0, 0)


def test_write_mgf_then_parse():
    record = SpectrumRecord("x1", 512.25, 3, ((101.5, 2.0), (250.125, 7.5)), retention_seconds=30.0)
    buffer = io.StringIO()
    assert write_mgf([record], buffer) == 1
    (parsed,) = parse_mgf(io.StringIO(buffer.getvalue()))
    assert parsed == record


def test_spectrum_record_validation():
    with pytest.raises(RejectedInputError):
        SpectrumRecord("a", -1.0, 2)
    with pytest.raises(RejectedInputError):
        SpectrumRecord("a", 100.0, 0)
    with pytest.raises(RejectedInputError):
        SpectrumRecord("a", 100.0, 2, ((200.0, 1.0), (100.0, 1.0)))


def test_parse_fasta_concatenates_lines():
    (record,) = parse_fasta(io.StringIO(">P1 test\nMKRP\nEPTIDEKAR\n"))
    assert record.accession == "P1"
    assert record.description == "test"
    assert record.sequence == "MKRPEPTIDEKAR"


def test_parse_fasta_accession_first_token():
    (record,) = parse_fasta(io.StringIO(">sp|P12345|NAME desc text\nmkr*\n"))
    assert record.accession == "sp|P12345|NAME"
    assert record.sequence == "MKR"


def test_parse_fasta_empty_sequence_is_error():
    summary = ParseSummary()
    records = list(parse_fasta(io.StringIO(">A\n>B\nPEPTIDEK\n"), summary=summary))
    assert [r.accession for r in records] == ["B"]
    assert summary.n_errors == 1
    assert summary.errors[0].record_id == "A"


def test_parse_fasta_wildcard_policy():
    text = ">W1\nPEPXTIDEK\n"
    (record,) = parse_fasta(io.StringIO(text), WildcardPolicy.SPLIT)
    assert record.has_wildcards
    summary = ParseSummary()
    assert list(parse_fasta(io.StringIO(text), WildcardPolicy.SKIP, summary)) == []
    assert summary.n_errors == 1


def test_parse_fasta_illegal_character():
    summary = ParseSummary()
    assert list(parse_fasta(io.StringIO(">A\nPEP1TIDE\n"), summary=summary)) == []
    assert summary.n_errors == 1


def _psm(spectrum_id="s1", sequence="PEPTIDEK", rank=1, q_value=None):
    peptide = parse_peptide(sequence)
    return PsmRecord(
        spectrum_id=spectrum_id,
        peptide=peptide,
        score=-0.25,
        rank=rank,
        source=PsmSource.DB,
        is_decoy=False,
        q_value=q_value,
        per_position_scores=tuple(-0.5 for _ in range(len(peptide))),
    )


def test_write_psms_header_only():
    buffer = io.StringIO()
    assert write_psms([], buffer) == 0
    assert buffer.getvalue() == (
        "spectrum_id\tsequence\tscore\trank\tsource\tis_decoy\tq_value\tper_position_scores\n"
    )


def test_write_psms_single_row():
    buffer = io.StringIO()
    write_psms([_psm(q_value=0.0)], buffer)
    lines = buffer.getvalue().splitlines()
    assert len(lines) == 2
    assert lines[1].split("\t")[:7] == ["s1", "PEPTIDEK", "-0.250000", "1", "db", "false", "0.000000"]


def test_psm_round_trip():
    records = [_psm(), _psm("s2", "AC(cam)M(ox)K", rank=2, q_value=0.5)]
    buffer = io.StringIO()
    write_psms(records, buffer)
    assert read_psms(io.StringIO(buffer.getvalue())) == records


def test_read_psms_missing_columns():
    with pytest.raises(RejectedInputError):
        read_psms(io.StringIO("spectrum_id\tsequence\ns1\tPEPTIDEK\n"))


def test_psm_record_validation():
    with pytest.raises(RejectedInputError):
        _psm(rank=0)
    with pytest.raises(RejectedInputError):
        _psm(q_value=1.5)


def test_write_digest():
    buffer = io.StringIO()
    assert write_digest([("PEPTIDEK", 0, "P1")], buffer) == 1
    assert buffer.getvalue() == "peptide\tmissed_cleavages\taccession\nPEPTIDEK\t0\tP1\n"


def test_read_sequences_plain_and_tsv():
    assert read_sequences(io.StringIO("PEPTIDEK\n\nGASK\n")) == ["PEPTIDEK", "GASK"]
    assert read_sequences(io.StringIO("spectrum_id\tsequence\na\tGASK\nb\t\n")) == ["GASK", ""]


def test_write_contigs():
    class _Contig:
        sequence = "A" * 70
        mean_weight = 1.5
        support = ("s1", "s2")
        is_cycle = False

    buffer = io.StringIO()
    assert write_contigs([_Contig()], buffer) == 1
    lines = buffer.getvalue().splitlines()
    assert lines[0] == ">contig_1 len=70 mean_weight=1.500000 support=2"
    assert [len(line) for line in lines[1:]] == [60, 10]


class _FakeResponse:
    def __init__(self, status_code, text):
        self.status_code = status_code
        self.text = text


class _FakeSession:
    def __init__(self, status_code=200, text=">P1 protein\nMKRPEPTIDEKAR\n"):
        self.status_code = status_code
        self.text = text
        self.calls = []

    def get(self, url, params=None, timeout=None):
        self.calls.append(params)
        return _FakeResponse(self.status_code, self.text)

    def close(self):
        pass


def _client(session, tmp_path):
    cache = CacheManager(str(tmp_path / "cache"), ttl=60)
    return UniProtClient(session=session, cache=cache, today=lambda: date(2026, 1, 1))


def test_uniprot_fetch_and_cache(tmp_path):
    session = _FakeSession()
    client = _client(session, tmp_path)
    first = client.fetch_proteome(4932)
    assert [p.accession for p in first] == ["P1"]
    assert "taxonomy_id:4932" in session.calls[0]["query"]
    assert "reviewed:true" in session.calls[0]["query"]

    # Yeni client aynı disk cache'ini okur, ağ çağrısı yapılmaz
    second_session = _FakeSession(status_code=500)
    second = _client(second_session, tmp_path).fetch_proteome(4932)
    assert second == first
    assert second_session.calls == []


def test_uniprot_http_error(tmp_path):
    client = _client(_FakeSession(status_code=500), tmp_path)
    with pytest.raises(FetchError):
        client.fetch_proteome(4932)
    assert client.cache.get(client.cache_key(4932, True)) is None


def test_uniprot_empty_result(tmp_path):
    client = _client(_FakeSession(text=""), tmp_path)
    assert client.fetch_proteome(4932) == []
    assert client.cache.get(client.cache_key(4932, True)) is None


def test_uniprot_rejects_bad_taxonomy(tmp_path):
    with pytest.raises(RejectedInputError):
        _client(_FakeSession(), tmp_path).fetch_proteome(0)


def test_parse_mgf_bad_bytes_fail_only_their_block():
    data = (
        b"BEGIN IONS\nTITLE=good\nPEPMASS=500.0\nCHARGE=2+\n100 1\nEND IONS\n"
        b"BEGIN IONS\nTITLE=bad\xff\nPEPMASS=500.0\nCHARGE=2+\n100 1\nEND IONS\n"
        b"BEGIN IONS\nTITLE=after\nPEPMASS=600.0\nCHARGE=2+\n100 1\nEND IONS\n"
    )
    summary = ParseSummary()
    records = list(parse_mgf(io.BytesIO(data), summary))
    assert [r.id for r in records] == ["good", "after"]
    assert summary.n_errors == 1
    assert summary.errors[0].line_number == 8


def test_read_mgf_bad_bytes_from_file(tmp_path):
    path = tmp_path / "spectra.mgf"
    path.write_bytes(
        b"BEGIN IONS\nTITLE=a\nPEPMASS=500.0\n100 \xfe\xff\nEND IONS\n"
        b"BEGIN IONS\nTITLE=b\nPEPMASS=500.0\nCHARGE=3+\n100 1\nEND IONS\n"
    )
    records, summary = read_mgf(str(path))
    assert [r.id for r in records] == ["b"]
    assert summary.n_errors == 1


@pytest.mark.parametrize("peak_lines, bad_line", [
    ("100.0 nan\n200.0 5\n", 5),
    ("100.0 5\n200.0 inf\n", 6),
    ("-inf 5\n", 5),
])
def test_parse_mgf_rejects_non_finite_peaks(peak_lines, bad_line):
    text = f"BEGIN IONS\nTITLE=x\nPEPMASS=500.0\nCHARGE=2+\n{peak_lines}END IONS\n"
    summary = ParseSummary()
    assert list(parse_mgf(io.StringIO(text), summary)) == []
    assert summary.n_records == 0
    assert summary.n_errors == 1
    assert summary.errors[0].line_number == bad_line


def test_parse_mgf_rejects_non_finite_pepmass():
    text = "BEGIN IONS\nTITLE=x\nPEPMASS=nan\nCHARGE=2+\n100 1\nEND IONS\n"
    summary = ParseSummary()
    assert list(parse_mgf(io.StringIO(text), summary)) == []
    assert summary.errors[0].line_number == 3


def test_spectrum_record_rejects_non_finite_values():
    with pytest.raises(RejectedInputError):
        SpectrumRecord("a", float("nan"), 2)
    with pytest.raises(RejectedInputError):
        SpectrumRecord("a", float("inf"), 2)
    with pytest.raises(RejectedInputError):
        SpectrumRecord("a", 100.0, 2, ((100.0, float("nan")),))
    with pytest.raises(RejectedInputError):
        SpectrumRecord("a", 100.0, 2, ((float("inf"), 1.0),))
    with pytest.raises(RejectedInputError):
        SpectrumRecord("a", 100.0, 2, ((100.0, 1.0),), retention_seconds=float("nan"))


def test_parse_fasta_sequence_before_header():
    summary = ParseSummary()
    records = list(parse_fasta(io.StringIO("PEPTIDE\n>P1\nMKR\n"), summary=summary))
    assert [r.accession for r in records] == ["P1"]
    assert summary.n_errors == 1
    assert summary.errors[0].line_number == 1


def test_parse_fasta_bad_bytes_fail_only_their_record():
    data = b">P1\nMKR\n>P2\nPEP\xffTIDE\n>P3\nGASK\n"
    summary = ParseSummary()
    records = list(parse_fasta(io.BytesIO(data), summary=summary))
    assert [r.accession for r in records] == ["P1", "P3"]
    assert summary.n_errors == 1
    assert summary.errors[0].record_id == "P2"
    assert summary.errors[0].line_number == 3


def test_parse_fasta_comments_and_header_lines():
    text = ";yorum\n>sp|P1|A desc\nmkr\n\nPEP\n>P2\nGASK*\n"
    summary = ParseSummary()
    records = list(parse_fasta(io.StringIO(text), summary=summary))
    assert [(r.accession, r.sequence) for r in records] == [("sp|P1|A", "MKRPEP"), ("P2", "GASK")]
    assert summary.n_records == 2 and summary.n_errors == 0


def test_uniprot_unreadable_cache_is_refetched(tmp_path):
    session = _FakeSession()
    client = _client(session, tmp_path)
    key = client.cache_key(4932, True)
    client.cache.set(key, "bozuk payload\n")

    records = client.fetch_proteome(4932)
    assert [p.accession for p in records] == ["P1"]
    assert len(session.calls) == 1
    assert client.cache.get(key).startswith(">P1")
