"""
检查点服务

只追加的文本文件：
    k=<k> B=<B> config=<摘要>
    sol <x> <y> <z> <d 或 -> <path>
    done <shard_id>
每个分片的解先写入，随后写 done 行并 fsync；恢复时只采信最后一个 done 行之前的内容
"""

import logging
import os
from pathlib import Path
from typing import List, Tuple

from app.utils.errors import CheckpointMismatch
from constants.search_constants import (
    CHECKPOINT_DONE_PREFIX,
    CHECKPOINT_HEADER_FORMAT,
    CHECKPOINT_NO_D,
    CHECKPOINT_SOLUTION_PREFIX,
    SolutionPath,
)
from models.search_models import CheckpointState, SearchConfig, ShardResult, Solution

logger = logging.getLogger(__name__)


def format_header(config: SearchConfig) -> str:
    return CHECKPOINT_HEADER_FORMAT.format(k=config.k, bound=config.bound, digest=config.digest())


def format_solution_line(solution: Solution) -> str:
    d = CHECKPOINT_NO_D if solution.d is None else str(solution.d)
    return f"{CHECKPOINT_SOLUTION_PREFIX} {solution.x} {solution.y} {solution.z} {d} {solution.path.value}"


def parse_header(line: str) -> Tuple[int, int, str]:
    """
    解析头部行

    Raises:
        CheckpointMismatch: 格式不正确
    """
    try:
        fields = dict(item.split('=', 1) for item in line.split())
        return int(fields['k']), int(fields['B']), fields['config']
    except (ValueError, KeyError):
        raise CheckpointMismatch(f"检查点头部格式错误: {line!r}")


def parse_solution_line(line: str) -> Solution:
    _, x, y, z, d, path = line.split()
    return Solution.create(int(x), int(y), int(z), SolutionPath(path),
                           d=None if d == CHECKPOINT_NO_D else int(d))


class CheckpointService:
    """检查点文件读写"""

    def __init__(self, path: str, config: SearchConfig):
        self.path = Path(path)
        self.config = config

    def initialize(self) -> None:
        """新建检查点文件（覆盖旧文件），写入头部"""
        if not self.path.parent.exists():
            self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, 'w', encoding='utf-8') as f:
            f.write(format_header(self.config) + "\n")
            f.flush()
            os.fsync(f.fileno())
        logger.info(f"📝 创建检查点: {self.path}")

    def record_shard(self, result: ShardResult) -> None:
        """追加一个已完成分片的解与 done 行，并 fsync"""
        lines = [format_solution_line(solution) for solution in result.solutions]
        lines.append(f"{CHECKPOINT_DONE_PREFIX} {result.shard_id}")
        with open(self.path, 'a', encoding='utf-8') as f:
            f.write("\n".join(lines) + "\n")
            f.flush()
            os.fsync(f.fileno())

    def load(self) -> CheckpointState:
        """
        读取检查点，并把文件截断到最后一个完整分片

        文件不存在时新建并返回空状态

        Raises:
            CheckpointMismatch: 头部的 k、B 或配置摘要与当前配置不一致
        """
        if not self.path.exists():
            logger.warning(f"⚠️ 检查点不存在，从头开始: {self.path}")
            self.initialize()
            return CheckpointState(k=self.config.k, bound=self.config.bound, digest=self.config.digest())

        with open(self.path, 'r', encoding='utf-8') as f:
            content = f.read()

        lines = content.split("\n")
        k, bound, digest = parse_header(lines[0])
        if (k, bound, digest) != (self.config.k, self.config.bound, self.config.digest()):
            raise CheckpointMismatch(
                f"检查点 (k={k}, B={bound}, config={digest}) 与当前配置 "
                f"(k={self.config.k}, B={self.config.bound}, config={self.config.digest()}) 不一致"
            )

        state = CheckpointState(k=k, bound=bound, digest=digest)
        if "\n" not in content:
            # 头部未写完整
            self.initialize()
            return state

        pending: List[Solution] = []
        valid_length = len(lines[0]) + 1
        offset = valid_length
        # 最后一个元素是最后一个换行之后的残余（正常情况下为空串）
        for line in lines[1:-1]:
            offset += len(line) + 1
            parts = line.split()
            if not parts:
                continue
            if parts[0] == CHECKPOINT_DONE_PREFIX and len(parts) == 2:
                state.done.append(parts[1])
                state.solutions.extend(pending)
                pending = []
                valid_length = offset
                continue
            try:
                if parts[0] != CHECKPOINT_SOLUTION_PREFIX or len(parts) != 6:
                    raise ValueError(line)
                pending.append(parse_solution_line(line))
            except ValueError:
                logger.warning(f"⚠️ 忽略无法解析的检查点行: {line!r}")
                break

        self._truncate(content[:valid_length])
        logger.info(f"♻️ 从检查点恢复: 已完成 {len(state.done)} 个分片, {len(state.solutions)} 个解")
        return state

    def _truncate(self, valid: str) -> None:
        size = len(valid.encode('utf-8'))
        if size < self.path.stat().st_size:
            with open(self.path, 'r+b') as f:
                f.truncate(size)
                f.flush()
                os.fsync(f.fileno())
            logger.info(f"✂️ 截断未完成的分片记录: {self.path}")
