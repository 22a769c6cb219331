"""
核心模块
配置管理、异常体系、随机数与依赖注入
"""

from core.config import AppSettings, get_settings, setup_logging
from core.exceptions import MvCacheError

__all__ = ["AppSettings", "MvCacheError", "get_settings", "setup_logging"]
