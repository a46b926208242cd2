"""
specnova - UniProt Client
UniProt REST API client (opsiyonel - tüm pipeline'lar yerel FASTA da kabul eder)
"""

from datetime import date
from typing import Callable, Optional

import requests

from core.exceptions import FetchError
from msio.base_client import BaseProteomeClient
from utils.cache import CacheManager
from utils.logger import get_logger

logger = get_logger(__name__)

DEFAULT_ENDPOINT = 'https://rest.uniprot.org/uniprotkb/stream'


class UniProtClient(BaseProteomeClient):
    """UniProt proteom client - transport (requests.Session) dışarıdan verilebilir"""

    def __init__(
        self,
        endpoint: str = DEFAULT_ENDPOINT,
        session: Optional[requests.Session] = None,
        cache: Optional[CacheManager] = None,
        timeout: int = 60,
        today: Callable[[], date] = date.today
    ):
        super().__init__(source_id='uniprot', cache=cache, today=today)
        self.endpoint = endpoint
        self.session = session if session is not None else requests.Session()
        self.timeout = timeout

    @staticmethod
    def build_query(taxonomy_id: int, reviewed_only: bool) -> str:
        query = f"(taxonomy_id:{taxonomy_id})"
        if reviewed_only:
            query += " AND (reviewed:true)"
        return query

    def download_fasta(self, taxonomy_id: int, reviewed_only: bool) -> str:
        """FASTA indir - hata durumunda kısmi kayıt dönmez"""
        params = {'query': self.build_query(taxonomy_id, reviewed_only), 'format': 'fasta'}
        logger.info(f"🔍 UniProt sorgusu: {params['query']}")
        try:
            response = self.session.get(self.endpoint, params=params, timeout=self.timeout)
        except requests.RequestException as e:
            raise FetchError(f"UniProt bağlantı hatası: {e}") from e

        if response.status_code != 200:
            raise FetchError(f"UniProt HTTP {response.status_code} döndü")

        return response.text

    def close(self):
        """Session'ı kapat"""
        self.session.close()
        logger.debug("✅ UniProt session kapatıldı")


def fetch_proteome(
    taxonomy_id: int,
    reviewed_only: bool = True,
    client: Optional[BaseProteomeClient] = None,
    **kwargs
):
    """UniProt'tan proteom getir (kolaylık fonksiyonu)"""
    owned = client is None
    client = client if client is not None else UniProtClient()
    try:
        return client.fetch_proteome(taxonomy_id, reviewed_only, **kwargs)
    finally:
        if owned:
            client.close()
