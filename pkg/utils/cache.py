"""
specnova - Cache Manager
İki seviyeli cache: bellek (TTLCache) + disk dizini
"""

import os
import tempfile
from pathlib import Path
from typing import Optional

from cachetools import TTLCache

from utils.logger import get_logger

logger = get_logger(__name__)


class CacheManager:
    """Cache yönetim sınıfı - ham metin payload'ları (ör. UniProt FASTA) saklar"""

    def __init__(self, cache_dir: str = '.specnova_cache', ttl: int = 3600, maxsize: int = 64, enabled: bool = True):
        self.enabled = enabled
        self.ttl = ttl
        self.cache_dir = Path(cache_dir)

        # In-memory cache
        self.memory_cache = TTLCache(maxsize=maxsize, ttl=ttl)

    def _path(self, key: str) -> Path:
        return self.cache_dir / key

    def get(self, key: str) -> Optional[str]:
        """Cache'den veri al"""
        if not self.enabled:
            return None

        if key in self.memory_cache:
            logger.debug(f"💾 Memory cache hit: {key}")
            return self.memory_cache[key]

        path = self._path(key)
        if path.is_file():
            try:
                value = path.read_text(encoding='utf-8')
            except OSError as e:
                logger.error(f"❌ Cache okuma hatası {path}: {e}")
                return None
            logger.debug(f"💾 Disk cache hit: {key}")
            self.memory_cache[key] = value
            return value

        logger.debug(f"❌ Cache miss: {key}")
        return None

    def set(self, key: str, value: str) -> bool:
        """Cache'e veri kaydet - disk yazımı atomik (temp dosya + rename)"""
        if not self.enabled:
            return False

        self.memory_cache[key] = value
        try:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            fd, tmp_name = tempfile.mkstemp(dir=self.cache_dir, prefix=f".{key}.", suffix='.tmp')
            try:
                with os.fdopen(fd, 'w', encoding='utf-8') as handle:
                    handle.write(value)
                os.replace(tmp_name, self._path(key))
            except BaseException:
                if os.path.exists(tmp_name):
                    os.unlink(tmp_name)
                raise
        except OSError as e:
            logger.error(f"❌ Cache set hatası: {e}")
            return False

        logger.debug(f"💾 Cache set: {key}")
        return True

    def delete(self, key: str) -> bool:
        """Cache'den sil"""
        self.memory_cache.pop(key, None)
        try:
            self._path(key).unlink(missing_ok=True)
        except OSError as e:
            logger.error(f"❌ Cache delete hatası: {e}")
            return False
        logger.debug(f"🗑️ Cache deleted: {key}")
        return True
