"""
替换策略注册中心
按名称管理和创建替换策略
"""

from __future__ import annotations

import logging
from typing import Any, Dict, List, Optional, Type

from policy.base import PolicyContext, ReplacementPolicy
from views.catalog import ViewCatalog

logger = logging.getLogger(__name__)


class PolicyRegistry:
    """
    替换策略注册中心

    Example:
        >>> from policy import PolicyRegistry
        >>> PolicyRegistry.list_policies()
        ['markov', 'lru', 'lfu', 'random']
        >>> policy = PolicyRegistry.create("lru", catalog)  # doctest: +SKIP
    """

    _policies: Dict[str, Type[ReplacementPolicy]] = {}

    @classmethod
    def register(cls, name: str, policy_class: Type[ReplacementPolicy]) -> None:
        """
        注册替换策略

        Args:
            name: 策略名称
            policy_class: 策略类,必须继承ReplacementPolicy

        Raises:
            TypeError: policy_class不是ReplacementPolicy的子类
        """
        if not (isinstance(policy_class, type) and issubclass(policy_class, ReplacementPolicy)):
            raise TypeError(f"{policy_class!r} 必须继承 ReplacementPolicy")

        if name in cls._policies:
            logger.warning(f"策略 '{name}' 已存在,将被覆盖")

        cls._policies[name] = policy_class
        logger.debug(f"已注册替换策略: {name} -> {policy_class.__name__}")

    @classmethod
    def unregister(cls, name: str) -> None:
        if name in cls._policies:
            del cls._policies[name]
            logger.info(f"已注销替换策略: {name}")

    @classmethod
    def create(
        cls,
        name: str,
        catalog: ViewCatalog,
        context: Optional[PolicyContext] = None,
    ) -> ReplacementPolicy:
        """
        创建策略实例

        每次调用都返回新实例,策略内部带有窗口状态,不做缓存。

        Raises:
            KeyError: 策略未注册
        """
        policy_class = cls.get_policy_class(name)
        instance = policy_class(catalog, context)
        logger.info(f"创建替换策略: {name} ({policy_class.__name__})")
        return instance

    @classmethod
    def get_policy_class(cls, name: str) -> Type[ReplacementPolicy]:
        if name not in cls._policies:
            available = ", ".join(cls._policies.keys())
            raise KeyError(f"替换策略 '{name}' 未注册. 可用策略: {available}")
        return cls._policies[name]

    @classmethod
    def list_policies(cls) -> List[str]:
        return list(cls._policies.keys())

    @classmethod
    def is_registered(cls, name: str) -> bool:
        return name in cls._policies

    @classmethod
    def get_policy_info(cls) -> Dict[str, Dict[str, Any]]:
        """所有策略的类名、模块与说明"""
        return {
            name: {
                "class_name": policy_class.__name__,
                "module": policy_class.__module__,
                "doc": policy_class.__doc__,
            }
            for name, policy_class in cls._policies.items()
        }
