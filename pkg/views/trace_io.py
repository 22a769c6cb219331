"""
查询轨迹CSV读写与视图命中矩阵(VHM)

轨迹格式:
    可选表头 `query_id,view_id`,之后每行 `<query_id>,<view_name>`,
    逗号分隔,无引号,LF换行,UTF-8编码。
"""

from __future__ import annotations

import io
import logging
from typing import BinaryIO, List, Optional, TextIO, Union

import numpy as np

from core.exceptions import (
    CatalogMismatch,
    DuplicateHeaderMismatch,
    MalformedLine,
    TraceFormatError,
)
from views.catalog import QueryTrace, ViewCatalog

logger = logging.getLogger(__name__)

TRACE_HEADER = "query_id,view_id"

TraceSource = Union[bytes, str, BinaryIO, TextIO]


def _read_text(source: TraceSource) -> str:
    """把字节流/文本流/字符串统一解码为文本"""
    if isinstance(source, bytes):
        data: Union[bytes, str] = source
    elif isinstance(source, str):
        return source
    else:
        data = source.read()
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise TraceFormatError(f"轨迹不是有效的UTF-8文本: {e}") from e
    return data


def _is_header(fields: List[str]) -> bool:
    return bool(fields) and fields[0].strip().lower() == "query_id"


def parse_trace(
    source: TraceSource, catalog: Optional[ViewCatalog] = None
) -> QueryTrace:
    """
    解析轨迹CSV

    Args:
        source: UTF-8字节流、文本流或字符串
        catalog: 目录文件给定的目录;None时按视图首次出现顺序构建

    Returns:
        事件按文件顺序排列的QueryTrace

    Raises:
        MalformedLine: 字段数不是2或视图名为空
        DuplicateHeaderMismatch: 第一行像表头但不等于 `query_id,view_id`
        CatalogMismatch: 给定目录时出现未知视图

    Example:
        >>> trace = parse_trace(b"Q1,V1\\nQ2,V1\\nQ3,V1\\nQ4,V2\\n")
        >>> trace.catalog.names, list(trace.views)
        (('V1', 'V2'), [0, 0, 0, 1])
    """
    text = _read_text(source)
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    query_ids: List[str] = []
    view_names: List[str] = []
    seen: dict[str, int] = {}

    for line_no, raw in enumerate(lines, start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        fields = line.split(",")
        if line_no == 1 and _is_header(fields):
            if line != TRACE_HEADER:
                raise DuplicateHeaderMismatch(line, TRACE_HEADER)
            continue
        if len(fields) != 2:
            raise MalformedLine(line_no, f"期望2个字段,实际 {len(fields)} 个")
        query_id, view_name = fields
        if not view_name:
            raise MalformedLine(line_no, "视图名为空")
        if catalog is not None and view_name not in catalog:
            raise CatalogMismatch(f"视图 '{view_name}' 不在共享目录中", line_no=line_no)
        seen.setdefault(view_name, len(seen))
        query_ids.append(query_id)
        view_names.append(view_name)

    if catalog is None:
        catalog = ViewCatalog(tuple(seen))

    trace = QueryTrace.from_view_names(view_names, catalog=catalog, query_ids=query_ids)
    logger.info(f"轨迹解析完成: {len(trace)} 个事件, {len(catalog)} 个视图")
    return trace


def serialize_trace(trace: QueryTrace, header: bool = True) -> str:
    """
    序列化轨迹为CSV文本

    数据行与parse_trace的输入逐字节一致,表头统一为 `query_id,view_id`。
    """
    buffer = io.StringIO()
    if header:
        buffer.write(f"{TRACE_HEADER}\n")
    names = trace.catalog.names
    for query_id, view in zip(trace.query_ids, trace.views):
        buffer.write(f"{query_id},{names[view]}\n")
    return buffer.getvalue()


def vhm_from_trace(trace: QueryTrace) -> np.ndarray:
    """
    构建 m×n 视图命中矩阵

    第q行仅在事件q命中的视图列为True。

    Args:
        trace: 查询轨迹

    Returns:
        dtype为bool、形状(m, n)的矩阵
    """
    m, n = len(trace), len(trace.catalog)
    vhm = np.zeros((m, n), dtype=bool)
    vhm[np.arange(m), trace.views] = True
    return vhm


def format_vhm(trace: QueryTrace) -> str:
    """以HIT/MISS表格形式输出VHM"""
    vhm = vhm_from_trace(trace)
    lines = [",".join(["query_id", *trace.catalog.names])]
    for query_id, row in zip(trace.query_ids, vhm):
        cells = ("HIT" if hit else "MISS" for hit in row)
        lines.append(",".join([query_id, *cells]))
    return "\n".join(lines) + "\n"
