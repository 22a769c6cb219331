"""Pytest configuration file"""

import sys
from pathlib import Path

import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_configure(config):
    """Register custom markers"""
    config.addinivalue_line("markers", "integration: Mark end-to-end tests across modules")
    config.addinivalue_line("markers", "slow: Mark slow statistical tests")
    config.addinivalue_line("markers", "unit: Mark unit tests")
    config.addinivalue_line("markers", "property: Mark hypothesis property tests")
    config.addinivalue_line("markers", "cli: Mark command-line tests")


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    """测试数据目录"""
    return FIXTURES


@pytest.fixture(scope="session")
def test_config():
    """测试配置"""
    from core.config import AppSettings, MarkovSettings, SimulationSettings

    return AppSettings(
        markov=MarkovSettings(tol=1e-10, max_iter=5000),
        simulation=SimulationSettings(policy="lru", capacity=2, seed=3),
    )


@pytest.fixture(scope="function")
def test_container(test_config):
    """测试容器"""
    from core.container import Container

    return Container(test_config)


@pytest.fixture
def example_catalog():
    """三视图目录 V1, V2, V3"""
    from views.catalog import ViewCatalog

    return ViewCatalog(("V1", "V2", "V3"))


@pytest.fixture
def example_trace(example_catalog):
    """两个快照拼接的轨迹: V1,V1,V1,V2 与 V1,V1,V3"""
    from views.catalog import QueryTrace

    return QueryTrace.from_view_names(
        ["V1", "V1", "V1", "V2", "V1", "V1", "V3"], catalog=example_catalog
    )


@pytest.fixture
def example_matrix():
    """三视图示例的完整转移矩阵"""
    from estimator.matrix import worked_example_matrix

    return worked_example_matrix()


@pytest.fixture
def example_supplied_rows():
    """V2、V3两行的给定值"""
    return {1: ("1/5", "7/10", "1/10"), 2: ("1/10", "1/10", "4/5")}


@pytest.fixture(autouse=True)
def restore_logging():
    """setup_logging会替换根日志处理器,测试结束后恢复"""
    import logging

    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
