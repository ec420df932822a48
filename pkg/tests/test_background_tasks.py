import pytest

from app.services.background_tasks import ShardPool, ShardStatus
from app.services.search_service import plan_all_shards, run_shard
from models.search_models import ShardResult


def _echo_worker(config, shard):
    return ShardResult(shard_id=shard.shard_id, index=shard.index)


def _failing_worker(config, shard):
    if shard.shard_id == "thue":
        raise RuntimeError("分片出错")
    return ShardResult(shard_id=shard.shard_id, index=shard.index)


def _summary(results):
    return [(r.shard_id, sorted(s.triple for s in r.solutions), r.stats.as_dict()) for r in results]


class TestShardPool:

    def test_inline_order_and_progress(self, make_config):
        config = make_config(33, 10 ** 4)
        shards = plan_all_shards(config)
        calls = []
        recorded = []
        pool = ShardPool(config, _echo_worker, progress_callback=lambda c, t, m: calls.append((c, t)))
        results = pool.run(list(reversed(shards)), on_result=lambda r: recorded.append(r.shard_id))

        assert [r.index for r in results] == sorted(s.index for s in shards)
        assert recorded == [s.shard_id for s in reversed(shards)]
        assert calls[-1] == (len(shards), len(shards))
        assert pool.progress['percentage'] == 100
        assert all(info['status'] == ShardStatus.COMPLETED.value for info in pool.list_tasks())

    def test_skipped_shards_are_listed_not_run(self, make_config):
        config = make_config(33, 10 ** 4)
        shards = plan_all_shards(config)
        seen = []
        pool = ShardPool(config, lambda c, s: seen.append(s.shard_id) or _echo_worker(c, s))
        results = pool.run(shards[2:], skipped=shards[:2])

        assert seen == [s.shard_id for s in shards[2:]]
        assert [r.shard_id for r in results] == seen
        assert [info['shard_id'] for info in pool.list_tasks(ShardStatus.SKIPPED)] == ["basic", "thue"]
        assert pool.progress['total'] == len(shards) - 2

    def test_empty(self, make_config):
        assert ShardPool(make_config(33, 100), _echo_worker).run([]) == []

    def test_rejects_zero_threads(self, make_config):
        with pytest.raises(ValueError):
            ShardPool(make_config(33, 100), _echo_worker, threads=0)

    def test_failure_is_reported(self, make_config):
        config = make_config(33, 1000)
        pool = ShardPool(config, _failing_worker)
        with pytest.raises(RuntimeError):
            pool.run(plan_all_shards(config))
        failed = pool.list_tasks(ShardStatus.FAILED)
        assert [info['shard_id'] for info in failed] == ["thue"]
        assert failed[0]['error'] == "分片出错"

    def test_processes_match_inline(self, make_config):
        config = make_config(21, 3000)
        shards = plan_all_shards(config)
        inline = ShardPool(config, run_shard, threads=1).run(shards)
        parallel = ShardPool(config, run_shard, threads=2).run(shards)
        assert _summary(parallel) == _summary(inline)
