"""
specnova - Index Store
MassIndex disk cache'i

Dosya düzeni (little-endian):
    8 bayt   magic  b"SPNIDX\\x00\\x00"
    uint16   format versiyonu
    32 bayt  kütle tablosu SHA-256 özeti
    uint64   header uzunluğu (bayt)
    ...      orjson header (sıralı anahtarlar): kayıtlar, kökenler, build parametreleri
    uint64   kayıt sayısı
    float64  kütle dizisi
"""

import os
import struct
import tempfile
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np
import orjson

from config.constants import MASS_TABLE_VERSION
from core.chem import DEFAULT_TABLE, ResidueTable, mass_table_hash, parse_peptide
from core.exceptions import IndexFormatError
from core.massindex import MassIndex, PeptideEntry
from utils.logger import get_logger

logger = get_logger(__name__)

MAGIC = b"SPNIDX\x00\x00"
FORMAT_VERSION = 1

_VERSION = struct.Struct('<H')
_LENGTH = struct.Struct('<Q')
_HASH_SIZE = 32


class IndexStore:
    """Index cache okuma/yazma işlemleri"""

    @staticmethod
    def to_bytes(index: MassIndex, params: Optional[Dict[str, Any]] = None, table: ResidueTable = DEFAULT_TABLE) -> bytes:
        """Index'i deterministik bayt dizisine çevir"""
        header = {
            'format_version': FORMAT_VERSION,
            'mass_table_version': MASS_TABLE_VERSION,
            'n_proteins': index.n_proteins,
            'params': params or {},
            'entries': [
                [entry.sequence_key, [[accession, is_decoy] for accession, is_decoy in entry.origin]]
                for entry in index.entries
            ],
        }
        header_bytes = orjson.dumps(header, option=orjson.OPT_SORT_KEYS)
        masses = np.ascontiguousarray(index.masses, dtype='<f8')
        return b"".join([
            MAGIC,
            _VERSION.pack(FORMAT_VERSION),
            mass_table_hash(table),
            _LENGTH.pack(len(header_bytes)),
            header_bytes,
            _LENGTH.pack(len(index.entries)),
            masses.tobytes(),
        ])

    @staticmethod
    def from_bytes(data: bytes, table: ResidueTable = DEFAULT_TABLE) -> Tuple[MassIndex, Dict[str, Any]]:
        """Bayt dizisinden index - magic, versiyon veya tablo özeti uyuşmazsa IndexFormatError"""
        offset = 0

        def take(size: int) -> bytes:
            nonlocal offset
            if offset + size > len(data):
                raise IndexFormatError("Index dosyası kesik")
            chunk = data[offset:offset + size]
            offset += size
            return chunk

        if take(len(MAGIC)) != MAGIC:
            raise IndexFormatError("Geçersiz magic - specnova index dosyası değil")
        (version,) = _VERSION.unpack(take(_VERSION.size))
        if version != FORMAT_VERSION:
            raise IndexFormatError(f"Desteklenmeyen index format versiyonu: {version}")
        if take(_HASH_SIZE) != mass_table_hash(table):
            raise IndexFormatError("Kütle tablosu değişmiş - index yeniden oluşturulmalı")

        (header_length,) = _LENGTH.unpack(take(_LENGTH.size))
        try:
            header = orjson.loads(take(header_length))
        except orjson.JSONDecodeError as e:
            raise IndexFormatError(f"Index header okunamadı: {e}") from e
        if not isinstance(header, dict):
            raise IndexFormatError("Index header bir nesne değil")
        missing = [key for key in ('entries', 'n_proteins', 'params') if key not in header]
        if missing:
            raise IndexFormatError(f"Index header alan(lar)ı eksik: {', '.join(missing)}")
        if not isinstance(header['entries'], list):
            raise IndexFormatError("Index header 'entries' alanı liste değil")

        (n_entries,) = _LENGTH.unpack(take(_LENGTH.size))
        if n_entries != len(header['entries']):
            raise IndexFormatError("Kayıt sayısı header ile uyuşmuyor")
        masses = np.frombuffer(take(n_entries * 8), dtype='<f8')
        if offset != len(data):
            raise IndexFormatError("Index dosyasının sonunda fazladan veri var")

        entries = tuple(
            PeptideEntry(
                peptide=parse_peptide(key),
                neutral_mass=float(mass),
                origin=tuple((accession, bool(is_decoy)) for accession, is_decoy in origin),
            )
            for (key, origin), mass in zip(header['entries'], masses)
        )
        return MassIndex(entries, n_proteins=header['n_proteins']), header['params']

    @staticmethod
    def save(index: MassIndex, path: str, params: Optional[Dict[str, Any]] = None) -> int:
        """Atomik yazım (temp dosya + rename) - yazılan bayt sayısı"""
        payload = IndexStore.to_bytes(index, params)
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix='.tmp')
        try:
            with os.fdopen(fd, 'wb') as handle:
                handle.write(payload)
            os.replace(tmp_name, target)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        logger.info(f"💾 Index kaydedildi: {path} ({len(index)} kayıt, {len(payload)} bayt)")
        return len(payload)

    @staticmethod
    def load(path: str) -> Tuple[MassIndex, Dict[str, Any]]:
        """Index cache'i yükle"""
        with open(path, 'rb') as handle:
            data = handle.read()
        index, params = IndexStore.from_bytes(data)
        logger.info(f"✅ Index yüklendi: {path} ({len(index)} kayıt)")
        return index, params
