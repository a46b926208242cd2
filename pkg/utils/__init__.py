"""
Utils package initialization
"""

from utils.logger import setup_logger, get_logger
from utils.helpers import (
    format_float,
    format_float_list,
    parse_float_list,
    format_percent,
    format_duration,
    chunked,
    safe_ratio
)
from utils.cache import CacheManager
from utils.performance import PerformanceMonitor

__all__ = [
    'setup_logger',
    'get_logger',
    'format_float',
    'format_float_list',
    'parse_float_list',
    'format_percent',
    'format_duration',
    'chunked',
    'safe_ratio',
    'CacheManager',
    'PerformanceMonitor'
]
