"""
specnova - Exceptions
Hata sınıfları
"""

from typing import Optional


class SpecnovaError(Exception):
    """Tüm specnova hatalarının temel sınıfı"""


class RejectedInputError(SpecnovaError, ValueError):
    """Geçersiz girdi (bilinmeyen residue, negatif kütle, charge 0 ...)"""


class ParseError(SpecnovaError):
    """MGF/FASTA parse hatası - satır numarası ile"""

    def __init__(self, message: str, line_number: Optional[int] = None, record_id: Optional[str] = None):
        self.message = message
        self.line_number = line_number
        self.record_id = record_id
        location = f"satır {line_number}" if line_number is not None else "satır ?"
        if record_id:
            location += f", kayıt {record_id}"
        super().__init__(f"{message} ({location})")


class FetchError(SpecnovaError):
    """UniProt indirme hatası"""

    def __init__(self, message: str, retry_hint: str = "Biraz bekleyip tekrar deneyin veya --fasta ile yerel dosya verin"):
        self.retry_hint = retry_hint
        super().__init__(f"{message} - {retry_hint}")


class ConfigError(SpecnovaError):
    """Konfigürasyon hatası - sorunlu key adını taşır"""

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        super().__init__(message)


class IndexFormatError(SpecnovaError):
    """Index cache dosyası okunamadı (magic, versiyon veya kütle tablosu hash uyuşmazlığı)"""


class ScorerError(SpecnovaError):
    """Scorer hatası - pozisyon bilgisi ile"""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        super().__init__(f"{message} (pozisyon {position})" if position is not None else message)
