"""
测试替换策略: 马氏策略与LRU / LFU / 随机对照策略
"""

import numpy as np
import pytest
from core.config import MarkovSettings
from hypothesis import given, settings
from hypothesis import strategies as st
from policy import (
    LfuPolicy,
    LruPolicy,
    MarkovPolicy,
    PolicyContext,
    RandomPolicy,
    Rationale,
    TierState,
)
from views.catalog import ViewCatalog


def feed(policy, views, tier):
    """按主存分区依次记录命中"""
    for seq, view in enumerate(views):
        policy.observe(seq, view, view in tier.primary)


class TestReplacementPolicyBase:
    """测试窗口管理"""

    pytestmark = pytest.mark.unit

    def test_window_trace(self, example_catalog):
        """测试窗口转换为轨迹并按命中过滤"""
        policy = LfuPolicy(example_catalog)
        policy.observe(0, 0, True)
        policy.observe(1, 2, False)
        policy.observe(2, 0, True)

        assert policy.window_trace().views.tolist() == [0, 2, 0]
        assert policy.window_trace(hit=True).query_ids == ("Q1", "Q3")
        assert policy.window_trace(hit=False).views.tolist() == [2]

    def test_reset_window(self, example_catalog):
        """测试清空窗口"""
        policy = LfuPolicy(example_catalog)
        policy.observe(0, 1, False)
        policy.reset_window()

        assert policy.window == []
        assert "window=0" in repr(policy)


class TestMarkovPolicy:
    """测试马氏策略"""

    pytestmark = pytest.mark.unit

    def test_promotes_highest_steady_state(self, example_catalog):
        """测试主存为空时提升辅存稳态概率最高的视图"""
        policy = MarkovPolicy(example_catalog, PolicyContext(markov=MarkovSettings(tol=1e-12)))
        tier = TierState.initial(example_catalog, capacity=1)
        # V3 连续段最长
        feed(policy, [0, 2, 2, 2, 2, 1, 2, 2, 2, 0, 2], tier)

        rec = policy.decide(tier)

        assert rec.promote == 2
        assert rec.rationale is Rationale.CAPACITY_FREE

    def test_no_episodes(self, example_catalog):
        """测试辅存轨迹没有完整episode时不做替换"""
        policy = MarkovPolicy(example_catalog)
        tier = TierState.initial(example_catalog, capacity=1)
        feed(policy, [1, 1, 1], tier)

        assert policy.decide(tier).rationale is Rationale.NO_ACTION

    def test_per_tier_swap(self, example_catalog):
        """测试主存已满时按主存轨迹的稳态概率淘汰"""
        policy = MarkovPolicy(example_catalog)
        tier = TierState.initial(example_catalog, capacity=1, primary=[0])
        feed(policy, [0, 1, 2, 2, 2, 1, 2, 2, 0, 1], tier)

        rec = policy.decide(tier)

        assert rec.rationale is Rationale.SWAP
        assert rec.evict == 0
        assert rec.promote == 2

    def test_keeps_best_view_in_primary(self, example_catalog):
        """测试主存只有窗口稳态概率最高的视图时不交换"""
        policy = MarkovPolicy(example_catalog)
        tier = TierState.initial(example_catalog, capacity=1, primary=[2])
        # 主存轨迹全是V3,没有episode;辅存轨迹有V1→V2
        feed(policy, [2, 2, 2, 0, 2, 2, 2, 1, 2, 2, 2, 0, 0, 2], tier)

        assert policy.decide(tier).rationale is Rationale.NO_ACTION

    def test_global_mode(self, example_catalog):
        """测试global模式使用整个窗口的稳态向量"""
        context = PolicyContext(tier_mode="global", require_gain=True)
        policy = MarkovPolicy(example_catalog, context)
        tier = TierState.initial(example_catalog, capacity=1, primary=[2])
        feed(policy, [2, 2, 2, 0, 2, 2, 2, 1, 2, 2, 0], tier)

        # V3 已在主存且概率最高,要求收益时不交换
        assert policy.decide(tier).rationale is Rationale.NO_ACTION


class TestLruPolicy:
    """测试LRU策略"""

    pytestmark = pytest.mark.unit

    def test_promote_most_recent(self, example_catalog):
        """测试提升最近引用的辅存视图"""
        policy = LruPolicy(example_catalog)
        tier = TierState.initial(example_catalog, capacity=1)
        feed(policy, [2, 0, 1], tier)

        assert policy.decide(tier).promote == 1

    def test_evict_least_recent(self, example_catalog):
        """测试淘汰最早引用的主存视图"""
        policy = LruPolicy(example_catalog)
        tier = TierState.initial(example_catalog, capacity=2, primary=[0, 1])
        feed(policy, [1, 0, 2], tier)

        rec = policy.decide(tier)
        assert (rec.promote, rec.evict) == (2, 1)

    def test_recency_spans_windows(self, example_catalog):
        """测试引用时间跨窗口保留"""
        policy = LruPolicy(example_catalog)
        policy.observe(0, 1, False)
        policy.reset_window()

        assert policy.recency().tolist() == [-1, 0, -1]

    def test_no_candidates(self, example_catalog):
        """测试窗口内没有引用辅存视图"""
        policy = LruPolicy(example_catalog)
        tier = TierState.initial(example_catalog, capacity=1, primary=[0])
        feed(policy, [0, 0], tier)

        assert policy.decide(tier).rationale is Rationale.NO_ACTION


class TestLfuPolicy:
    """测试LFU策略"""

    pytestmark = pytest.mark.unit

    def test_counts(self, example_catalog):
        """测试窗口内引用计数"""
        policy = LfuPolicy(example_catalog)
        feed(policy, [0, 2, 2, 1, 2], TierState.initial(example_catalog, capacity=1))

        assert policy.counts().tolist() == [1.0, 1.0, 3.0]

    def test_swap(self, example_catalog):
        """测试提升最常用的辅存视图并淘汰最少用的主存视图"""
        policy = LfuPolicy(example_catalog)
        tier = TierState.initial(example_catalog, capacity=2, primary=[0, 1])
        feed(policy, [0, 0, 2, 2, 1, 2], tier)

        rec = policy.decide(tier)
        assert (rec.promote, rec.evict) == (2, 1)


class TestRandomPolicy:
    """测试随机策略"""

    pytestmark = pytest.mark.unit

    def test_seeded(self, example_catalog):
        """测试相同种子得到相同选择序列"""
        tier = TierState.initial(example_catalog, capacity=1, primary=[0])
        first = RandomPolicy(example_catalog, PolicyContext(seed=11))
        second = RandomPolicy(example_catalog, PolicyContext(seed=11))

        picks = [first.decide(tier) for _ in range(20)]
        assert picks == [second.decide(tier) for _ in range(20)]
        assert all(r.evict == 0 and r.promote in (1, 2) for r in picks)

    def test_capacity_free(self, example_catalog):
        """测试主存未满时只提升"""
        policy = RandomPolicy(example_catalog)
        rec = policy.decide(TierState.initial(example_catalog, capacity=2))

        assert rec.rationale is Rationale.CAPACITY_FREE
        assert rec.evict is None

    def test_nothing_to_promote(self, example_catalog):
        """测试辅存为空"""
        tier = TierState.initial(example_catalog, capacity=3, primary=[0, 1, 2])
        assert RandomPolicy(example_catalog).decide(tier).rationale is Rationale.NO_ACTION


def lru_oracle(views, tier):
    """逐事件暴力计算LRU的提升/淘汰"""
    last = {}
    for seq, view in enumerate(views):
        last[view] = seq
    candidates = [v for v in sorted(tier.secondary) if v in set(views)]
    promote = None
    for v in candidates:
        if promote is None or last[v] > last[promote]:
            promote = v
    evict = None
    if promote is not None and tier.is_full:
        for v in sorted(tier.primary):
            if evict is None or last.get(v, -1) < last.get(evict, -1):
                evict = v
    return promote, evict


def lfu_oracle(views, tier):
    """逐事件暴力计算LFU的提升/淘汰"""
    counts = {}
    for view in views:
        counts[view] = counts.get(view, 0) + 1
    promote = None
    for v in sorted(tier.secondary):
        if counts.get(v, 0) > 0 and (promote is None or counts[v] > counts[promote]):
            promote = v
    evict = None
    if promote is not None and tier.is_full:
        for v in sorted(tier.primary):
            if evict is None or counts.get(v, 0) < counts.get(evict, 0):
                evict = v
    return promote, evict


@st.composite
def traces_and_tiers(draw):
    """随机轨迹(不超过200个事件)与分区"""
    n = draw(st.integers(min_value=2, max_value=8))
    catalog = ViewCatalog(tuple(f"V{i + 1}" for i in range(n)))
    capacity = draw(st.integers(min_value=1, max_value=n))
    primary = draw(st.sets(st.integers(0, n - 1), max_size=capacity))
    views = draw(st.lists(st.integers(0, n - 1), max_size=200))
    return catalog, TierState.initial(catalog, capacity, primary), views


@pytest.mark.property
class TestBaselineOracles:
    """测试对照策略与暴力实现一致"""

    @settings(max_examples=300, deadline=None)
    @given(traces_and_tiers())
    def test_lru_matches_oracle(self, data):
        """测试LRU"""
        catalog, tier, views = data
        policy = LruPolicy(catalog)
        feed(policy, views, tier)
        rec = policy.decide(tier)

        assert (rec.promote, rec.evict) == lru_oracle(views, tier)

    @settings(max_examples=300, deadline=None)
    @given(traces_and_tiers())
    def test_lfu_matches_oracle(self, data):
        """测试LFU"""
        catalog, tier, views = data
        policy = LfuPolicy(catalog)
        feed(policy, views, tier)
        rec = policy.decide(tier)

        assert (rec.promote, rec.evict) == lfu_oracle(views, tier)
        assert np.isclose(policy.counts().sum(), len(views))
