"""
配置模块

包含环境变量驱动的搜索配置和日志配置
"""

from .settings import SearchSettings, AppConfig, get_search_settings, app_config
from .logging_config import setup_search_logging

__all__ = [
    'SearchSettings',
    'AppConfig',
    'get_search_settings',
    'app_config',
    'setup_search_logging'
]
