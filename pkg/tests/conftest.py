"""
测试公共夹具
"""

import logging

import pytest

from app.services.dstream import build_search_config
from config.settings import SearchSettings


@pytest.fixture
def settings():
    """不读取 .env 的默认配置"""
    return SearchSettings(_env_file=None)


@pytest.fixture
def make_config(settings):
    """按 (k, B, 开关...) 构造 SearchConfig"""

    def _make(k, bound, **kwargs):
        return build_search_config(k, bound, settings=settings, **kwargs)

    return _make


@pytest.fixture
def checkpoint_path(tmp_path):
    return str(tmp_path / "run.ckpt")


@pytest.fixture(autouse=True)
def quiet_logging():
    logging.getLogger().setLevel(logging.WARNING)
    yield
