"""
specnova - PSM TSV
PSM ve peptide tablolarının TSV okuma/yazma işlemleri (pandas)
"""

from typing import IO, Iterable, List, Sequence, Tuple, Union

import pandas as pd

from config.constants import PSM_COLUMNS, PsmSource
from core.chem import parse_peptide
from core.exceptions import RejectedInputError
from msio.records import PsmRecord
from utils.helpers import format_float, format_float_list, parse_float_list
from utils.logger import get_logger

logger = get_logger(__name__)

DIGEST_COLUMNS = ['peptide', 'missed_cleavages', 'accession']

PathOrStream = Union[str, IO[str]]


def _write_frame(frame: pd.DataFrame, stream: PathOrStream) -> None:
    frame.to_csv(stream, sep='\t', index=False, lineterminator='\n')


def _read_frame(stream: PathOrStream) -> pd.DataFrame:
    return pd.read_csv(stream, sep='\t', dtype=str, keep_default_na=False)


def psm_row(record: PsmRecord) -> dict:
    return {
        'spectrum_id': record.spectrum_id,
        'sequence': record.peptide.sequence_key,
        'score': format_float(record.score),
        'rank': str(record.rank),
        'source': record.source.value,
        'is_decoy': 'true' if record.is_decoy else 'false',
        'q_value': format_float(record.q_value),
        'per_position_scores': format_float_list(record.per_position_scores),
    }


def write_psms(records: Iterable[PsmRecord], stream: PathOrStream) -> int:
    """PSM'leri TSV olarak yaz - satır sayısını döndür (header hariç)"""
    rows = [psm_row(record) for record in records]
    frame = pd.DataFrame(rows, columns=PSM_COLUMNS)
    _write_frame(frame, stream)
    return len(rows)


def read_psms(stream: PathOrStream) -> List[PsmRecord]:
    """PSM TSV dosyasını PsmRecord listesine çevir"""
    frame = _read_frame(stream)
    missing = [column for column in PSM_COLUMNS if column not in frame.columns]
    if missing:
        raise RejectedInputError(f"PSM TSV kolonları eksik: {missing}")

    records = []
    for row in frame.itertuples(index=False):
        q_value = float(row.q_value) if row.q_value != '' else None
        records.append(PsmRecord(
            spectrum_id=str(row.spectrum_id),
            peptide=parse_peptide(row.sequence),
            score=float(row.score),
            rank=int(row.rank),
            source=PsmSource(row.source),
            is_decoy=str(row.is_decoy).lower() == 'true',
            q_value=q_value,
            per_position_scores=tuple(parse_float_list(row.per_position_scores)),
        ))
    return records


def write_digest(rows: Iterable[Tuple[str, int, str]], stream: PathOrStream) -> int:
    """Digest çıktısı: peptide, missed_cleavages, accession"""
    frame = pd.DataFrame(list(rows), columns=DIGEST_COLUMNS)
    _write_frame(frame, stream)
    return len(frame)


def read_sequences(stream: PathOrStream, column: Sequence[str] = ('sequence', 'peptide')) -> List[str]:
    """
    Peptide listesi oku: TSV ise ilk eşleşen kolon, değilse satır başına bir peptide
    Boş değerler korunur (eval'de boş tahmin anlamına gelir)
    """
    if not isinstance(stream, str):
        text = stream.read()
    else:
        with open(stream, 'r', encoding='utf-8') as handle:
            text = handle.read()

    lines = text.splitlines()
    if not lines:
        return []
    header = lines[0].split('\t')
    for name in column:
        if name in header:
            index = header.index(name)
            values = []
            for line in lines[1:]:
                if not line.strip():
                    continue
                fields = line.split('\t')
                values.append(fields[index].strip() if index < len(fields) else '')
            return values
    return [line.strip() for line in lines if line.strip() and not line.startswith('#')]
