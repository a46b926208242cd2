"""
specnova - Performance Monitor
Batch süreleri ve arama metrikleri
"""

import threading
import time
from collections import deque
from typing import Any, Dict

from utils.helpers import format_duration
from utils.logger import get_logger

logger = get_logger(__name__)


class PerformanceMonitor:
    """Performans monitörü"""

    def __init__(self, window: int = 100):
        self.batch_durations = deque(maxlen=window)
        self.spectra_counts = deque(maxlen=window)
        self.psm_counts = deque(maxlen=window)

        self.total_batches = 0
        self.total_spectra = 0
        self.total_psms = 0
        self.total_errors = 0

        self.start_time = time.perf_counter()
        self._lock = threading.Lock()

    def record_batch(self, duration: float, spectra: int, psms: int):
        """Batch metriklerini kaydet"""
        with self._lock:
            self.batch_durations.append(duration)
            self.spectra_counts.append(spectra)
            self.psm_counts.append(psms)

            self.total_batches += 1
            self.total_spectra += spectra
            self.total_psms += psms

        logger.debug(f"📊 Batch: {duration:.3f}s, Spektrum: {spectra}, PSM: {psms}")

    def record_error(self):
        """Hata kaydet"""
        with self._lock:
            self.total_errors += 1

    def get_stats(self) -> Dict[str, Any]:
        """İstatistikleri al"""
        elapsed = time.perf_counter() - self.start_time
        with self._lock:
            avg_batch = sum(self.batch_durations) / len(self.batch_durations) if self.batch_durations else 0.0
            return {
                'elapsed_seconds': round(elapsed, 3),
                'total_batches': self.total_batches,
                'total_spectra': self.total_spectra,
                'total_psms': self.total_psms,
                'total_errors': self.total_errors,
                'avg_batch_duration': round(avg_batch, 4),
                'spectra_per_second': round(self.total_spectra / elapsed, 2) if elapsed > 0 else 0.0,
            }

    def get_health_status(self) -> str:
        """Çalışma sağlık durumu"""
        if self.total_errors == 0:
            return "🟢 EXCELLENT"

        error_rate = self.total_errors / max(self.total_spectra, 1)

        if error_rate < 0.01:
            return "🟢 GOOD"
        elif error_rate < 0.05:
            return "🟡 WARNING"
        else:
            return "🔴 CRITICAL"

    def log_summary(self):
        stats = self.get_stats()
        logger.info(
            f"📊 {stats['total_spectra']} spektrum, {stats['total_psms']} PSM, "
            f"{stats['total_errors']} hata - {format_duration(stats['elapsed_seconds'])} "
            f"({self.get_health_status()})"
        )
