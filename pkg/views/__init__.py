"""
视图目录与查询轨迹模块
"""

from views.catalog import HitEvent, QueryTrace, ViewCatalog
from views.trace_io import (
    TRACE_HEADER,
    format_vhm,
    parse_trace,
    serialize_trace,
    vhm_from_trace,
)

__all__ = [
    "HitEvent",
    "QueryTrace",
    "ViewCatalog",
    "TRACE_HEADER",
    "format_vhm",
    "parse_trace",
    "serialize_trace",
    "vhm_from_trace",
]
