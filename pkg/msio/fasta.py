"""
specnova - FASTA
FASTA protein okuma (pyteomics.fasta, wildcard politikası ile)
"""

import io
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from pyteomics import fasta

from config.constants import STANDARD_RESIDUES, WILDCARD_RESIDUES, WildcardPolicy
from core.exceptions import ParseError
from msio.mgf import Stream, iter_text_lines
from msio.records import ParseSummary, ProteinRecord
from utils.logger import get_logger

logger = get_logger(__name__)

_STANDARD = frozenset(STANDARD_RESIDUES)


@dataclass
class _Header:
    description: str
    line_number: int
    error: Optional[str] = None

    @property
    def accession(self) -> str:
        parts = self.description.split(None, 1)
        return parts[0] if parts else ''


def _reject(message: str, header: _Header, summary: ParseSummary):
    error = ParseError(message, line_number=header.line_number, record_id=header.accession or None)
    summary.add_error(error)
    logger.warning(f"⚠️ {error}")


def _prepare(stream: Stream, summary: ParseSummary) -> Tuple[str, List[_Header]]:
    """
    pyteomics'e verilecek metni hazırla
    Header satır numaraları ve decode hataları ayrıca tutulur
    """
    kept: List[str] = []
    headers: List[_Header] = []
    for line_number, (line, decode_error) in enumerate(iter_text_lines(stream), start=1):
        text = line.strip()
        if decode_error is None and (not text or text.startswith(';')):
            continue
        if text.startswith('>'):
            headers.append(_Header(text[1:].strip(), line_number, decode_error))
            kept.append(text)
            continue
        if not headers:
            error = ParseError(decode_error or "Header'dan önce sekans satırı", line_number=line_number)
            summary.add_error(error)
            logger.warning(f"⚠️ {error}")
            continue
        if decode_error is not None and headers[-1].error is None:
            headers[-1].error = f"Satır {line_number}: {decode_error}"
        kept.append(text)
    return "\n".join(kept) + "\n", headers


def parse_fasta(
    stream: Stream,
    policy: WildcardPolicy = WildcardPolicy.SPLIT,
    summary: Optional[ParseSummary] = None
) -> Iterator[ProteinRecord]:
    """
    FASTA akışını oku
    accession = '>' sonrası ilk token, çok satırlı sekanslar birleştirilir, küçük harfler büyütülür
    """
    summary = summary if summary is not None else ParseSummary()
    text, headers = _prepare(stream, summary)
    pending = iter(headers)

    if headers:
        with fasta.read(io.StringIO(text), use_index=False) as reader:
            for description, sequence in reader:
                # pyteomics boş sekanslı kayıtları atlayabilir - header'larla açıklamadan eşleştir
                header = next(pending, None)
                while header is not None and header.description != description.strip():
                    _reject("Boş sekans", header, summary)
                    header = next(pending, None)
                if header is None:
                    break
                record = _finish_record(header, sequence, policy, summary)
                if record is not None:
                    yield record

    for header in pending:
        _reject("Boş sekans", header, summary)

    if summary.n_errors:
        logger.warning(f"⚠️ FASTA parse özeti: {summary}")


def _finish_record(
    header: _Header,
    sequence: str,
    policy: WildcardPolicy,
    summary: ParseSummary
) -> Optional[ProteinRecord]:
    if header.error is not None:
        _reject(header.error, header, summary)
        return None

    sequence = "".join(sequence.split()).upper()
    if sequence.endswith('*'):
        sequence = sequence[:-1]

    if not header.accession:
        _reject("Boş accession", header, summary)
        return None
    if not sequence:
        _reject("Boş sekans", header, summary)
        return None

    illegal = set(sequence) - _STANDARD - WILDCARD_RESIDUES
    if illegal:
        _reject(f"Geçersiz residue karakter(ler)i: {''.join(sorted(illegal))}", header, summary)
        return None

    wildcards = set(sequence) & WILDCARD_RESIDUES
    if wildcards:
        if policy is WildcardPolicy.SKIP:
            _reject(f"Wildcard residue ({''.join(sorted(wildcards))}) - protein atlandı", header, summary)
            return None
        summary.n_warnings += 1
        logger.debug(f"🔍 {header.accession}: wildcard residue'ler digestion sırasında bölünecek")

    summary.n_records += 1
    description = header.description.split(None, 1)
    return ProteinRecord(
        accession=header.accession,
        description=description[1] if len(description) > 1 else '',
        sequence=sequence,
    )


def read_fasta(path: str, policy: WildcardPolicy = WildcardPolicy.SPLIT) -> Tuple[List[ProteinRecord], ParseSummary]:
    """FASTA dosyasını tamamen oku - binary modda, satır satır decode"""
    summary = ParseSummary()
    with open(path, 'rb') as handle:
        records = list(parse_fasta(handle, policy, summary))
    logger.info(f"✅ {path}: {summary}")
    return records, summary
