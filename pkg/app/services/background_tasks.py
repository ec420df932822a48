"""
分片工作池模块

使用多进程并行执行搜索分片，收集器按分片编号合并结果，支持进度回调
"""

import logging
import multiprocessing
from concurrent.futures import Executor, ProcessPoolExecutor, as_completed
from datetime import datetime
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence

from models.search_models import SearchConfig, ShardResult, ShardSpec

logger = logging.getLogger(__name__)


class ShardStatus(Enum):
    """分片状态枚举"""
    PENDING = "pending"      # 待执行
    RUNNING = "running"      # 运行中
    COMPLETED = "completed"  # 已完成
    FAILED = "failed"        # 失败
    SKIPPED = "skipped"      # 检查点中已完成，跳过


class ShardTask:
    """单个分片的执行记录"""

    def __init__(self, shard: ShardSpec):
        self.shard = shard
        self.status = ShardStatus.PENDING
        self.started_at: Optional[datetime] = None
        self.completed_at: Optional[datetime] = None
        self.error: Optional[str] = None

    def mark_running(self):
        self.status = ShardStatus.RUNNING
        self.started_at = datetime.now()

    def mark_finished(self, status: ShardStatus, error: Optional[str] = None):
        self.status = status
        self.error = error
        self.completed_at = datetime.now()

    def get_info(self) -> Dict[str, Any]:
        """获取分片信息"""
        duration = None
        if self.started_at and self.completed_at:
            duration = (self.completed_at - self.started_at).total_seconds()
        return {
            'shard_id': self.shard.shard_id,
            'status': self.status.value,
            'duration_seconds': round(duration, 2) if duration is not None else None,
            'error': self.error
        }


def _make_executor(threads: int) -> Executor:
    """Linux 上优先使用 fork 启动方式，避免重新导入主模块"""
    try:
        ctx = multiprocessing.get_context("fork")
    except ValueError:
        ctx = multiprocessing.get_context()
    return ProcessPoolExecutor(max_workers=threads, mp_context=ctx)


class ShardPool:
    """分片工作池

    threads = 1 时在当前进程内顺序执行；否则交给进程池。
    无论完成顺序如何，run() 返回的结果都按分片编号排序
    """

    def __init__(self,
                 config: SearchConfig,
                 worker: Callable[[SearchConfig, ShardSpec], ShardResult],
                 threads: int = 1,
                 progress_callback: Optional[Callable[[int, int, str], None]] = None):
        if threads < 1:
            raise ValueError(f"工作进程数必须 ≥ 1: {threads}")
        self.config = config
        self.worker = worker
        self.threads = threads
        self.progress_callback = progress_callback
        self.tasks: Dict[str, ShardTask] = {}
        self.progress = {
            'current': 0,
            'total': 0,
            'percentage': 0,
            'message': ''
        }

    def _update_progress(self, current: int, total: int, message: str = ''):
        """更新进度"""
        self.progress['current'] = current
        self.progress['total'] = total
        self.progress['percentage'] = round(current / total * 100, 2) if total > 0 else 0
        self.progress['message'] = message
        logger.info(f"📊 进度 {current}/{total} ({self.progress['percentage']}%) {message}")
        if self.progress_callback:
            self.progress_callback(current, total, message)

    def run(self,
            shards: List[ShardSpec],
            on_result: Optional[Callable[[ShardResult], None]] = None,
            skipped: Sequence[ShardSpec] = ()) -> List[ShardResult]:
        """
        执行全部分片

        Args:
            shards: 待执行分片
            on_result: 每个分片完成后在主进程中调用（用于写检查点）
            skipped: 检查点中已完成的分片，只登记为 SKIPPED，不执行

        Returns:
            List[ShardResult]: 按分片编号排序的结果

        Raises:
            Exception: 任一分片失败时，标记 FAILED 并重新抛出
        """
        self.tasks = {}
        for shard in skipped:
            self.tasks[shard.shard_id] = ShardTask(shard)
            self.tasks[shard.shard_id].mark_finished(ShardStatus.SKIPPED)
        self.tasks.update((shard.shard_id, ShardTask(shard)) for shard in shards)
        total = len(shards)
        results: List[ShardResult] = []
        if total == 0:
            return results

        if self.threads == 1:
            for shard in shards:
                results.append(self._run_inline(shard))
                self._finish(results[-1], len(results), total, on_result)
        else:
            with _make_executor(self.threads) as executor:
                futures = {}
                for shard in shards:
                    self.tasks[shard.shard_id].mark_running()
                    futures[executor.submit(self.worker, self.config, shard)] = shard
                for future in as_completed(futures):
                    shard = futures[future]
                    try:
                        result = future.result()
                    except Exception as e:
                        self.tasks[shard.shard_id].mark_finished(ShardStatus.FAILED, str(e))
                        logger.error(f"❌ 分片执行失败: {shard.shard_id}, 错误: {e}")
                        for pending in futures:
                            pending.cancel()
                        raise
                    results.append(result)
                    self._finish(result, len(results), total, on_result)

        results.sort(key=lambda r: r.index)
        return results

    def _run_inline(self, shard: ShardSpec) -> ShardResult:
        task = self.tasks[shard.shard_id]
        task.mark_running()
        try:
            return self.worker(self.config, shard)
        except Exception as e:
            task.mark_finished(ShardStatus.FAILED, str(e))
            logger.error(f"❌ 分片执行失败: {shard.shard_id}, 错误: {e}")
            raise

    def _finish(self, result: ShardResult, current: int, total: int,
                on_result: Optional[Callable[[ShardResult], None]]):
        self.tasks[result.shard_id].mark_finished(ShardStatus.COMPLETED)
        if on_result:
            on_result(result)
        self._update_progress(current, total, f"{result.shard_id} 完成，{len(result.solutions)} 个解")

    def list_tasks(self, status_filter: Optional[ShardStatus] = None) -> List[Dict[str, Any]]:
        """列出分片记录"""
        return [task.get_info() for task in self.tasks.values()
                if status_filter is None or task.status == status_filter]
