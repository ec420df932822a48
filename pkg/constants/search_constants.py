"""
搜索常量定义

退出码、已知解、路径与筛选阶段名称
"""

from dataclasses import dataclass
from enum import Enum, IntEnum
from typing import Dict, List, Tuple


class ExitCode(IntEnum):
    """命令行退出码"""
    FOUND = 0           # 找到至少一个解
    NONE_FOUND = 1      # 搜索完成，无解
    IMPOSSIBLE_K = 2    # k ≡ ±4 (mod 9)
    CONFIG_ERROR = 3    # 参数或配置错误


class SolutionPath(str, Enum):
    """解的来源路径"""
    FAST = "fast"       # 除数类快速路径
    BASIC = "basic"     # 小 |z| 因数分解路径
    THUE = "thue"       # y = z 的 Thue 扫描
    ORACLE = "oracle"   # 暴力盒搜索（--mode oracle）


class FilterStage(str, Enum):
    """快速路径各阶段计数器名称（按流水线顺序）"""
    CANDIDATES = "candidates"                  # 进度/掩码之后的 |z| 候选
    SECONDARY_SURVIVORS = "secondary_survivors"  # 通过次级勒让德检验
    DELTA_TESTS = "delta_tests"                # 计算 Δ 并做平方检验
    SQUARES = "squares"                        # Δ 为完全平方数
    SOLUTIONS = "solutions"                    # 重建并验证成功


PIPELINE_STAGES: List[FilterStage] = [
    FilterStage.CANDIDATES,
    FilterStage.SECONDARY_SURVIVORS,
    FilterStage.DELTA_TESTS,
    FilterStage.SQUARES,
    FilterStage.SOLUTIONS,
]


@dataclass(frozen=True)
class KnownSolution:
    """已发表的解"""
    k: int
    x: int
    y: int
    z: int
    d: int
    notes: str


# k = 33 的首个已知解，d = |x + y|
K33_SOLUTION = KnownSolution(
    k=33,
    x=8866128975287528,
    y=-8778405442862239,
    z=-2736111468807040,
    d=87723532425289,
    notes="k=33 首个已知解，min |坐标| < 10^16"
)

# k = 3 的个位数解
K3_SOLUTIONS: List[Tuple[int, int, int]] = [(1, 1, 1), (4, 4, -5)]

KNOWN_SOLUTIONS: Dict[int, List[Tuple[int, int, int]]] = {
    3: K3_SOLUTIONS,
    33: [(K33_SOLUTION.x, K33_SOLUTION.y, K33_SOLUTION.z)],
}

# 检查点文件格式
CHECKPOINT_HEADER_FORMAT = "k={k} B={bound} config={digest}"
CHECKPOINT_DONE_PREFIX = "done"
CHECKPOINT_SOLUTION_PREFIX = "sol"
# 无 d 的解在检查点中写作 "-"
CHECKPOINT_NO_D = "-"
