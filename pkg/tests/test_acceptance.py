"""
桌面规模验收：与暴力参考实现比对、过滤开关不变性、检查点恢复、近线性增长
"""

import warnings

import pytest

from app.services.dstream import build_search_config, enumerate_d
from app.services.oracle import box_search, delta_scan
from app.services.search_service import SearchService, full_search, reconstruct_xy, search_divisor_class, thue_scan
from app.utils.errors import ParityError
from models.search_models import DStats
from scripts.scaling_check import check_ratios, measure_scaling
from utils.modarith import is_perfect_square

pytestmark = pytest.mark.slow

SUPPORTED_K = [3, 6, 15, 21, 24, 30, 33, 42, 51, 60]


def _triples(solutions):
    return {s.triple for s in solutions}


@pytest.mark.parametrize("k", SUPPORTED_K)
def test_full_search_matches_box(make_config, k):
    found = {s.triple for s in full_search(make_config(k, 10 ** 4)) if s.max_abs <= 5000}
    assert found == set(box_search(k, 5000).solutions)


def test_k3_up_to_1e5(make_config):
    assert _triples(full_search(make_config(3, 10 ** 5))) == {(1, 1, 1), (-5, 4, 4)}


def test_k33_up_to_1e5_is_empty(make_config):
    assert full_search(make_config(33, 10 ** 5)) == set()


def test_thue_k33_up_to_1e6():
    assert thue_scan(33, 10 ** 6) == set()


@pytest.mark.parametrize("k", [3, 21, 33, 42])
def test_filter_toggles(make_config, k):
    variants = [
        {},
        {"enable_legendre_sieve": False},
        {"enable_two_adic": False},
        {"enable_mod18": False},
    ]
    results = [_triples(full_search(make_config(k, 10 ** 4, **toggles))) for toggles in variants]
    assert all(r == results[0] for r in results)


@pytest.mark.parametrize("k", [3, 6, 12, 15, 21, 24, 33, 42, 48, 60])
def test_square_hits_are_complete(make_config, k):
    config = make_config(k, 10 ** 4)
    stats = DStats()
    hits = []
    for divclass in enumerate_d(config):
        if divclass.d <= 300:
            search_divisor_class(divclass, config, stats, hits)
    fast = {(h.d, h.z) for h in hits}
    for record in delta_scan(k, 300, 10 ** 4):
        if not record.is_square:
            continue
        root = is_perfect_square(record.delta)
        if root % (3 * record.d):
            continue
        try:
            reconstruct_xy(record.z, record.d, k, root // (3 * record.d))
        except ParityError:
            continue
        assert (record.d, record.z) in fast


def test_resume_matches_uninterrupted(make_config, tmp_path):
    config = make_config(33, 10 ** 5)
    full_path = tmp_path / "full.ckpt"
    expected = SearchService(config, checkpoint_path=str(full_path)).run()

    lines = full_path.read_text(encoding="utf-8").splitlines()
    done_positions = [i for i, line in enumerate(lines) if line.startswith("done ")]
    cut = done_positions[len(done_positions) // 2] + 1
    partial = tmp_path / "partial.ckpt"
    partial.write_text("\n".join(lines[:cut]) + "\n", encoding="utf-8")

    resumed = SearchService(config, checkpoint_path=str(partial), resume=True, threads=2).run()
    assert _triples(resumed.solutions) == _triples(expected.solutions)


def test_threads_are_deterministic(make_config):
    config = make_config(21, 10 ** 5)
    single = SearchService(config, threads=1).run()
    multi = SearchService(config, threads=4).run()
    assert [s.triple for s in single.solutions] == [s.triple for s in multi.solutions]
    assert single.stats.as_dict() == multi.stats.as_dict()


def test_near_linear_growth():
    rows = measure_scaling(33, [10 ** 4, 10 ** 5, 10 ** 6])
    assert all(later['delta_tests'] > earlier['delta_tests'] for earlier, later in zip(rows, rows[1:]))
    for message in check_ratios(rows):
        warnings.warn(message)
