"""
视图目录与查询轨迹
视图是不透明标识符,目录把视图名与稠密下标0..n-1一一对应
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Sequence, TextIO, Tuple

import numpy as np

from core.exceptions import CatalogMismatch, IndexOutOfCatalog

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ViewCatalog:
    """
    视图目录

    Attributes:
        names: 有序、互不相同的非空视图名

    Example:
        >>> catalog = ViewCatalog(("V1", "V2", "V3"))
        >>> catalog.index("V3")
        2
        >>> catalog.name(0)
        'V1'
    """

    names: Tuple[str, ...]
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        names = tuple(self.names)
        index: Dict[str, int] = {}
        for position, name in enumerate(names):
            if not isinstance(name, str) or not name:
                raise ValueError(f"视图名必须为非空字符串: {name!r}")
            if name in index:
                raise ValueError(f"视图名重复: {name}")
            index[name] = position
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", index)

    @classmethod
    def from_sidecar(cls, stream: TextIO) -> ViewCatalog:
        """从目录文件读取,每行一个视图名,行号即下标"""
        names = [line.rstrip("\r\n") for line in stream]
        while names and not names[-1]:
            names.pop()
        return cls(tuple(names))

    def to_sidecar(self) -> str:
        """序列化为目录文件内容"""
        return "".join(f"{name}\n" for name in self.names)

    def index(self, name: str) -> int:
        """视图名 -> 下标"""
        try:
            return self._index[name]
        except KeyError:
            raise CatalogMismatch(f"视图 '{name}' 不在目录中") from None

    def name(self, i: int) -> str:
        """下标 -> 视图名"""
        if not 0 <= i < len(self.names):
            raise IndexOutOfCatalog(i, len(self.names))
        return self.names[i]

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)


@dataclass(frozen=True)
class HitEvent:
    """一次查询命中一个视图"""

    seq: int
    query_id: str
    view: int


@dataclass(frozen=True, eq=False)
class QueryTrace:
    """
    查询命中轨迹

    事件按位置编号(seq = 0,1,2,...),视图下标以只读numpy数组保存。

    Attributes:
        catalog: 视图目录
        query_ids: 每个事件的查询标签
        views: 每个事件命中的视图下标
    """

    catalog: ViewCatalog
    query_ids: Tuple[str, ...]
    views: np.ndarray

    def __post_init__(self) -> None:
        views = np.asarray(self.views, dtype=np.int64).reshape(-1)
        query_ids = tuple(self.query_ids)
        if len(query_ids) != views.size:
            raise ValueError(
                f"query_ids长度 {len(query_ids)} 与事件数 {views.size} 不一致"
            )
        if views.size:
            low, high = int(views.min()), int(views.max())
            if low < 0:
                raise IndexOutOfCatalog(low, len(self.catalog))
            if high >= len(self.catalog):
                raise IndexOutOfCatalog(high, len(self.catalog))
        views = views.copy()
        views.flags.writeable = False
        object.__setattr__(self, "views", views)
        object.__setattr__(self, "query_ids", query_ids)

    @classmethod
    def from_view_names(
        cls,
        view_names: Sequence[str],
        catalog: ViewCatalog | None = None,
        query_ids: Sequence[str] | None = None,
    ) -> QueryTrace:
        """
        由视图名序列构造轨迹

        Args:
            view_names: 每个事件命中的视图名
            catalog: 目录,None时按首次出现顺序构建
            query_ids: 查询标签,None时使用Q1,Q2,...

        Returns:
            QueryTrace
        """
        if catalog is None:
            catalog = ViewCatalog(tuple(dict.fromkeys(view_names)))
        if query_ids is None:
            query_ids = [f"Q{i + 1}" for i in range(len(view_names))]
        views = np.fromiter(
            (catalog.index(name) for name in view_names),
            dtype=np.int64,
            count=len(view_names),
        )
        return cls(catalog=catalog, query_ids=tuple(query_ids), views=views)

    @property
    def events(self) -> List[HitEvent]:
        """按seq排列的事件列表"""
        return [
            HitEvent(seq=seq, query_id=query_id, view=int(view))
            for seq, (query_id, view) in enumerate(zip(self.query_ids, self.views))
        ]

    def view_names(self) -> List[str]:
        """事件命中的视图名序列"""
        return [self.catalog.names[v] for v in self.views]

    def subsequence(self, mask: Iterable[bool]) -> QueryTrace:
        """按布尔掩码选取事件,目录不变,seq按新位置重新编号"""
        mask_array = np.asarray(list(mask), dtype=bool).reshape(-1)
        if mask_array.size != len(self):
            raise ValueError(f"掩码长度 {mask_array.size} 与事件数 {len(self)} 不一致")
        query_ids = tuple(q for q, keep in zip(self.query_ids, mask_array) if keep)
        return QueryTrace(self.catalog, query_ids, self.views[mask_array])

    def __len__(self) -> int:
        return int(self.views.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QueryTrace):
            return NotImplemented
        return (
            self.catalog == other.catalog
            and self.query_ids == other.query_ids
            and np.array_equal(self.views, other.views)
        )

    def __hash__(self) -> int:
        return hash((self.catalog.names, self.query_ids, self.views.tobytes()))
