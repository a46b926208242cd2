"""
specnova - Helper Functions
Yardımcı fonksiyonlar
"""

import math
from typing import Iterable, Iterator, List, Optional, Sequence, TypeVar

from config.constants import FLOAT_DECIMALS

T = TypeVar('T')


def format_float(value: Optional[float], decimals: int = FLOAT_DECIMALS) -> str:
    """Sayıyı sabit ondalıkla formatla (None -> boş)"""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ''
    text = f"{value:.{decimals}f}"
    # -0.000000 çıktısı deterministik olsun
    if text.startswith('-') and float(text) == 0:
        text = text[1:]
    return text


def format_float_list(values: Iterable[float], decimals: int = FLOAT_DECIMALS) -> str:
    """Virgülle birleştirilmiş skor listesi"""
    return ",".join(format_float(v, decimals) for v in values)


def parse_float_list(text: Optional[str]) -> List[float]:
    if text is None:
        return []
    text = str(text).strip()
    if not text:
        return []
    return [float(part) for part in text.split(',')]


def format_percent(value: float, decimals: int = 2) -> str:
    """Oranı yüzde olarak formatla"""
    return f"{value * 100:.{decimals}f}%"


def format_duration(seconds: float) -> str:
    """Süreyi okunabilir formata çevir"""
    if seconds < 1:
        return f"{seconds * 1000:.0f} ms"
    if seconds < 60:
        return f"{seconds:.2f} saniye"
    if seconds < 3600:
        return f"{seconds / 60:.1f} dakika"
    return f"{seconds / 3600:.1f} saat"


def chunked(items: Sequence[T], size: int) -> Iterator[Sequence[T]]:
    """Listeyi sabit boyutlu batch'lere böl"""
    if size < 1:
        raise ValueError(f"Batch boyutu en az 1 olmalı: {size}")
    for start in range(0, len(items), size):
        yield items[start:start + size]


def safe_ratio(numerator: float, denominator: float) -> float:
    """Sıfır paydada 0 döner"""
    if denominator == 0:
        return 0.0
    return numerator / denominator
