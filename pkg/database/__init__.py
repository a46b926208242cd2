"""
Database package initialization
"""

from database.index_store import IndexStore, MAGIC, FORMAT_VERSION

__all__ = [
    'IndexStore',
    'MAGIC',
    'FORMAT_VERSION'
]
