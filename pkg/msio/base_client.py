"""
specnova - Base Proteome Client
Temel proteom client sınıfı
"""

import io
from abc import ABC, abstractmethod
from datetime import date
from typing import Callable, List, Optional

from config.constants import WildcardPolicy
from core.exceptions import RejectedInputError
from msio.fasta import parse_fasta
from msio.records import ParseSummary, ProteinRecord
from utils.cache import CacheManager
from utils.logger import get_logger

logger = get_logger(__name__)


class BaseProteomeClient(ABC):
    """Temel proteom client abstract sınıfı - ham FASTA indirir, cache'ler ve parse eder"""

    def __init__(
        self,
        source_id: str,
        cache: Optional[CacheManager] = None,
        today: Callable[[], date] = date.today
    ):
        self.source_id = source_id
        self.cache = cache
        self.today = today

    @abstractmethod
    def download_fasta(self, taxonomy_id: int, reviewed_only: bool) -> str:
        """Ham FASTA metnini indir"""
        pass

    def cache_key(self, taxonomy_id: int, reviewed_only: bool) -> str:
        scope = 'reviewed' if reviewed_only else 'all'
        return f"{self.source_id}_{taxonomy_id}_{scope}_{self.today():%Y%m%d}.fasta"

    def fetch_proteome(
        self,
        taxonomy_id: int,
        reviewed_only: bool = True,
        policy: WildcardPolicy = WildcardPolicy.SPLIT
    ) -> List[ProteinRecord]:
        """
        Proteomu getir - cache hit varsa ağ çağrısı yapılmaz
        Cache'teki payload'dan hiç kayıt çıkmazsa bozuk sayılır, silinip yeniden indirilir
        """
        if taxonomy_id <= 0:
            raise RejectedInputError(f"Taxonomy id pozitif olmalı: {taxonomy_id}")

        key = self.cache_key(taxonomy_id, reviewed_only)
        cached = self.cache.get(key) if self.cache else None
        if cached is not None:
            records = self._parse(cached, policy, taxonomy_id)
            if records:
                logger.info(f"💾 {self.source_id} cache kullanıldı: {key}")
                return records
            logger.warning(f"⚠️ Cache kaydı okunamadı, yeniden indirilecek: {key}")
            self.cache.delete(key)

        text = self.download_fasta(taxonomy_id, reviewed_only)
        if not text.strip():
            logger.warning(f"⚠️ Taxonomy {taxonomy_id} için kayıt bulunamadı (reviewed_only={reviewed_only})")
            return []

        records = self._parse(text, policy, taxonomy_id)
        if records and self.cache:
            self.cache.set(key, text)
        return records

    @staticmethod
    def _parse(text: str, policy: WildcardPolicy, taxonomy_id: int) -> List[ProteinRecord]:
        summary = ParseSummary()
        records = list(parse_fasta(io.StringIO(text), policy, summary))
        logger.info(f"✅ Taxonomy {taxonomy_id}: {summary}")
        return records

    def close(self):
        """Bağlantıyı kapat"""
        pass
