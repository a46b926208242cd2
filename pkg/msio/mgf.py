"""
specnova - MGF
MGF spektrum okuma/yazma (pyteomics.mgf, blok bazlı hata toplama)
"""

import io
import math
from typing import IO, Dict, Iterable, Iterator, List, Optional, Tuple, Union

import numpy as np
from pyteomics import mgf
from pyteomics.auxiliary import PyteomicsError

from config.constants import PROTON_MASS
from core.exceptions import ParseError, RejectedInputError
from msio.records import ParseSummary, SpectrumRecord, normalize_peaks
from utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_CHARGE = 2

Stream = Union[IO[str], IO[bytes], Iterable[Union[str, bytes]]]


def precursor_neutral_mass(precursor_mz: float, charge: int) -> float:
    """m/z ve charge'dan nötr precursor kütlesi"""
    if charge < 1:
        raise RejectedInputError(f"Charge en az 1 olmalı: {charge}")
    return precursor_mz * charge - charge * PROTON_MASS


def iter_text_lines(stream: Stream) -> Iterator[Tuple[str, Optional[str]]]:
    """
    (satır, decode hatası) çiftleri
    Byte satırlar tek tek çözülür - bozuk bir satır sadece kendi kaydını düşürür
    """
    for raw in stream:
        error = None
        if isinstance(raw, bytes):
            try:
                raw = raw.decode('utf-8')
            except UnicodeDecodeError as e:
                error = f"UTF-8 decode hatası (byte {e.start}): {e.reason}"
                raw = raw.decode('utf-8', errors='replace')
        yield raw.rstrip('\r\n'), error


class _Block:
    """Açık BEGIN IONS bloğunun satırları"""

    def __init__(self, ordinal: int, start_line: int):
        self.ordinal = ordinal
        self.start_line = start_line
        self.title: Optional[str] = None
        self.param_lines: Dict[str, int] = {}
        self.peak_lines: List[Tuple[int, str]] = []
        self.lines: List[str] = []
        self.error: Optional[ParseError] = None

    @property
    def record_id(self) -> str:
        return self.title if self.title else str(self.ordinal)

    def add(self, text: str, line_number: int):
        self.lines.append(text)
        if '=' in text:
            key, _, value = text.partition('=')
            key = key.strip().upper()
            self.param_lines.setdefault(key, line_number)
            if key == 'TITLE':
                self.title = value.strip()
        else:
            self.peak_lines.append((line_number, text))

    def fail(self, message: str, line_number: int):
        if self.error is None:
            self.error = ParseError(message, line_number=line_number, record_id=self.record_id)

    def bad_peak_line(self) -> int:
        """pyteomics'in okuyamadığı ilk pik satırı"""
        for line_number, text in self.peak_lines:
            fields = text.split()
            try:
                float(fields[0])
                float(fields[1])
            except (ValueError, IndexError):
                return line_number
        return self.start_line

    def to_text(self) -> str:
        return "\n".join(['BEGIN IONS', *self.lines, 'END IONS']) + "\n"


def _report(error: ParseError, summary: ParseSummary):
    summary.add_error(error)
    logger.warning(f"⚠️ {error}")


def parse_mgf(stream: Stream, summary: Optional[ParseSummary] = None) -> Iterator[SpectrumRecord]:
    """
    MGF akışını oku - her BEGIN IONS/END IONS bloğu bir SpectrumRecord
    Blok içeriği pyteomics.mgf ile okunur, hatalı bloklar summary'ye eklenir
    ve parser bir sonraki bloğa geçer
    """
    summary = summary if summary is not None else ParseSummary()
    block: Optional[_Block] = None
    ordinal = 0
    line_number = 0

    for line_number, (line, decode_error) in enumerate(iter_text_lines(stream), start=1):
        text = line.strip()
        if decode_error is not None:
            if block is not None:
                block.fail(decode_error, line_number)
            else:
                _report(ParseError(decode_error, line_number=line_number), summary)
            continue
        if not text:
            continue

        upper = text.upper()
        if upper == 'BEGIN IONS':
            if block is not None:
                block.fail("Kapanmamış blok (END IONS eksik)", line_number)
                _report(block.error, summary)
            ordinal += 1
            block = _Block(ordinal, line_number)
            continue

        if upper == 'END IONS':
            if block is None:
                _report(ParseError("BEGIN IONS olmadan END IONS", line_number=line_number), summary)
                continue
            record = _finish_block(block, line_number, summary)
            if record is not None:
                summary.n_records += 1
                yield record
            block = None
            continue

        # Blok dışı satırlar (yorum, global parametreler) yok sayılır
        if block is not None and block.error is None:
            block.add(text, line_number)

    if block is not None:
        block.fail("Dosya sonu: kapanmamış blok (END IONS eksik)", line_number)
        _report(block.error, summary)

    if summary.n_errors:
        logger.warning(f"⚠️ MGF parse özeti: {summary}")
    else:
        logger.debug(f"📊 MGF parse özeti: {summary}")


def _read_block(block: _Block) -> dict:
    with mgf.MGF(io.StringIO(block.to_text()), use_header=False, convert_arrays=1, read_charges=False) as reader:
        spectra = list(reader)
    if len(spectra) != 1:
        raise ValueError(f"Blokta {len(spectra)} spektrum okundu")
    return spectra[0]


def _finish_block(block: _Block, line_number: int, summary: ParseSummary) -> Optional[SpectrumRecord]:
    record = None
    if block.error is None:
        try:
            record = _block_record(block, line_number)
        except (PyteomicsError, ValueError, TypeError, IndexError) as e:
            block.fail(f"Blok okunamadı: {e}", block.bad_peak_line())

    if block.error is not None:
        _report(block.error, summary)
        return None

    if record.charge_defaulted:
        summary.n_warnings += 1
        logger.warning(f"⚠️ Spektrum {record.id}: CHARGE yok, varsayılan {DEFAULT_CHARGE} kullanıldı")
    return record


def _block_record(block: _Block, line_number: int) -> Optional[SpectrumRecord]:
    spectrum = _read_block(block)
    params = spectrum['params']
    pepmass_line = block.param_lines.get('PEPMASS', line_number)

    # İkinci alan (intensity) yok sayılır
    pepmass = params.get('pepmass')
    precursor_mz = pepmass[0] if pepmass else None
    if precursor_mz is None:
        block.fail("PEPMASS eksik", line_number)
        return None
    if not math.isfinite(precursor_mz) or precursor_mz <= 0:
        block.fail(f"PEPMASS pozitif ve sonlu olmalı: {precursor_mz}", pepmass_line)
        return None

    # "2+ and 3+" -> ilk değer
    charges = params.get('charge')
    charge_defaulted = charges is None
    if charge_defaulted:
        charge = DEFAULT_CHARGE
    else:
        values = list(charges) if isinstance(charges, (list, tuple)) else [charges]
        if not values or int(values[0]) < 1:
            block.fail(f"Geçersiz charge: {charges}", block.param_lines.get('CHARGE', line_number))
            return None
        charge = int(values[0])

    retention = params.get('rtinseconds')
    if retention is not None:
        retention = float(retention)
        if not math.isfinite(retention):
            block.fail(f"RTINSECONDS sonlu olmalı: {retention}", block.param_lines['RTINSECONDS'])
            return None

    mz = np.asarray(spectrum['m/z array'], dtype=float)
    intensity = np.asarray(spectrum['intensity array'], dtype=float)
    if mz.size == 0:
        block.fail("Blokta pik yok", line_number)
        return None
    bad = np.flatnonzero(~(np.isfinite(mz) & np.isfinite(intensity)))
    if bad.size:
        block.fail("Sonlu olmayan pik değeri (nan/inf)", block.peak_lines[int(bad[0])][0])
        return None
    negative = np.flatnonzero(intensity < 0)
    if negative.size:
        block.fail("Negatif intensity", block.peak_lines[int(negative[0])][0])
        return None

    return SpectrumRecord(
        id=block.record_id,
        precursor_mz=float(precursor_mz),
        charge=charge,
        peaks=normalize_peaks(zip(mz.tolist(), intensity.tolist())),
        retention_seconds=retention,
        charge_defaulted=charge_defaulted,
    )


def read_mgf(path: str) -> Tuple[List[SpectrumRecord], ParseSummary]:
    """MGF dosyasını tamamen oku - binary modda, satır satır decode"""
    summary = ParseSummary()
    with open(path, 'rb') as handle:
        records = list(parse_mgf(handle, summary))
    logger.info(f"✅ {path}: {summary}")
    return records, summary


def write_mgf(records: Iterable[SpectrumRecord], stream: IO[str]) -> int:
    """
    Spektrumları MGF olarak yaz - yazılan kayıt sayısı
    Piksiz spektrumlar okunabilir bir blok oluşturmaz, uyarı ile atlanır
    """
    count = 0
    skipped = []
    for record in records:
        if not record.peaks:
            skipped.append(record.id)
            continue
        lines = ['BEGIN IONS', f"TITLE={record.id}", f"PEPMASS={record.precursor_mz:.10g}", f"CHARGE={record.charge}+"]
        if record.retention_seconds is not None:
            lines.append(f"RTINSECONDS={record.retention_seconds:.10g}")
        lines.extend(f"{mz:.10g} {intensity:.10g}" for mz, intensity in record.peaks)
        lines.append('END IONS')
        stream.write("\n".join(lines) + "\n\n")
        count += 1
    if skipped:
        logger.warning(f"⚠️ {len(skipped)} piksiz spektrum MGF'e yazılmadı: {', '.join(skipped[:5])}")
    return count
