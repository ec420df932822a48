"""
搜索数据模型

除数类、候选算术级数、勒让德筛、解、检查点等数据结构。
SearchConfig 使用 pydantic 校验，其余为不可变 dataclass
"""

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from constants.search_constants import PIPELINE_STAGES, SolutionPath


class SearchConfig(BaseModel):
    """单次搜索的完整配置（构造后不可修改，可在工作进程间共享）"""

    model_config = ConfigDict(frozen=True)

    k: int = Field(description="目标整数 k")
    bound: int = Field(gt=0, description="最小坐标上界 B")
    epsilon: int = Field(description="ε ∈ {±1}，k ≡ 3ε (mod 9)")
    d_max: int = Field(ge=0, description="floor(αB)，α = ∛2 − 1")
    sieve_prime_cutoff: int = Field(description="主筛素数上界 P")
    sieve_primes: Tuple[int, ...] = Field(description="主筛素数 5 ≤ p ≤ P")
    sieve_modulus: int = Field(description="M = ∏ sieve_primes")
    secondary_moduli: Tuple[int, ...] = Field(default=(), description="次级辅助模数 M′")
    enable_legendre_sieve: bool = Field(default=True, description="启用勒让德筛（主筛与次级筛）")
    enable_two_adic: bool = Field(default=True, description="启用 2-adic 赋值过滤")
    enable_mod18: bool = Field(default=True, description="启用 mod 18（k=3 时 mod 162）同余")
    excluded_d: Tuple[int, ...] = Field(default=(), description="外部已排除的 d")
    large_prime_shard_size: int = Field(default=512, ge=1, description="每个大素数分片的外层素数个数")

    @model_validator(mode='after')
    def _check_invariants(self) -> 'SearchConfig':
        if self.k % 9 not in (3, 6):
            raise ValueError(f"k={self.k} 不满足 k ≡ ±3 (mod 9)")
        if self.epsilon != (1 if self.k % 9 == 3 else -1):
            raise ValueError(f"ε={self.epsilon} 与 k mod 9 不符")
        modulus = 1
        for p in self.sieve_primes:
            modulus *= p
        if modulus != self.sieve_modulus or self.sieve_modulus % 2 == 0 or self.sieve_modulus % 3 == 0:
            raise ValueError("M 必须为奇数、无平方因子且与 3 互素")
        return self

    def digest(self) -> str:
        """配置摘要（检查点头部使用）"""
        payload = json.dumps(self.model_dump(), sort_keys=True, default=list)
        return hashlib.sha256(payload.encode('utf-8')).hexdigest()[:16]


@dataclass(frozen=True)
class RootList:
    """z³ ≡ k (mod q) 的全部根"""
    modulus: int
    roots: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.roots)


@dataclass(frozen=True)
class DivisorClass:
    """候选除数 d = |x + y| 及其立方根集合"""
    d: int
    factorization: Tuple[Tuple[int, int], ...]
    delta: int                    # (d/3) ∈ {±1}
    roots: Tuple[int, ...]        # z (mod d)，z³ ≡ k (mod d)


@dataclass
class DStats:
    """搜索统计计数器（只增不减）"""
    d_count: int = 0
    root_sum: int = 0
    progressions: int = 0
    masked_progressions: int = 0
    candidates: int = 0
    secondary_survivors: int = 0
    delta_tests: int = 0
    squares: int = 0
    solutions: int = 0

    def merge(self, other: 'DStats') -> None:
        """累加另一个分片的计数"""
        for name in self.as_dict():
            setattr(self, name, getattr(self, name) + getattr(other, name))

    def as_dict(self) -> Dict[str, int]:
        return {
            'd_count': self.d_count,
            'root_sum': self.root_sum,
            'progressions': self.progressions,
            'masked_progressions': self.masked_progressions,
            'candidates': self.candidates,
            'secondary_survivors': self.secondary_survivors,
            'delta_tests': self.delta_tests,
            'squares': self.squares,
            'solutions': self.solutions,
        }

    def stages_consistent(self) -> bool:
        """流水线各阶段计数应单调不增"""
        values = [getattr(self, stage.value) for stage in PIPELINE_STAGES]
        return all(later <= earlier for earlier, later in zip(values, values[1:]))


@dataclass(frozen=True)
class TwoAdicProfile:
    """2-adic 约束：s = ord₂(d)，允许的 t = ord₂(z³ − k)"""
    s: int
    allowed_t: Tuple[int, ...]


@dataclass(frozen=True)
class CandidateProgression:
    """|z| ≡ residue (mod modulus)，lower ≤ |z| ≤ upper 的候选算术级数"""
    residue: int
    modulus: int
    lower: int
    upper: int
    sign_of_z: int
    two_adic_t: Optional[int] = None

    def first(self) -> Optional[int]:
        """级数在区间内的第一个元素"""
        start = self.lower + (self.residue - self.lower) % self.modulus
        return start if start <= self.upper else None

    def count(self) -> int:
        start = self.first()
        if start is None:
            return 0
        return (self.upper - start) // self.modulus + 1


@dataclass(frozen=True, eq=False)
class LegendreSieve:
    """辅助模数 M 上的 |z| 可行剩余类掩码"""
    modulus: int
    c: int
    delta: int
    primes: Tuple[int, ...]
    symbol_3d: Dict[int, int]
    mask: np.ndarray

    @property
    def permissible_count(self) -> int:
        return int(self.mask.sum())

    @property
    def permissible_fraction(self) -> float:
        return self.permissible_count / self.modulus


def canonical_triple(x: int, y: int, z: int) -> Tuple[int, int, int]:
    """按绝对值降序排列，绝对值相同时按有符号值降序"""
    ordered = sorted((int(x), int(y), int(z)), key=lambda v: (-abs(v), -v))
    return ordered[0], ordered[1], ordered[2]


@dataclass(frozen=True)
class Solution:
    """x³ + y³ + z³ = k 的一个精确解（规范顺序 |x| ≥ |y| ≥ |z|）"""
    x: int
    y: int
    z: int
    path: SolutionPath
    d: Optional[int] = None

    @classmethod
    def create(cls, x: int, y: int, z: int, path: SolutionPath, d: Optional[int] = None) -> 'Solution':
        cx, cy, cz = canonical_triple(x, y, z)
        return cls(x=cx, y=cy, z=cz, path=path, d=d)

    @property
    def triple(self) -> Tuple[int, int, int]:
        return self.x, self.y, self.z

    @property
    def min_abs(self) -> int:
        return abs(self.z)

    @property
    def max_abs(self) -> int:
        return abs(self.x)

    def sort_key(self) -> Tuple[int, Tuple[int, int, int]]:
        """输出排序：|z| 升序，再按规范三元组"""
        return self.min_abs, self.triple


@dataclass(frozen=True)
class FamilyDescriptor:
    """k − z³ = 0 时的无穷解族 (t, −t, z)"""
    z: int


@dataclass(frozen=True)
class SquareHit:
    """Δ 为完全平方数的 (d, z) 候选"""
    d: int
    z: int
    delta: int
    sqrt_delta: int


@dataclass(frozen=True)
class MordellPoint:
    """Mordell 曲线 Y² = X³ + constant 上的整点"""
    X: int
    Y: int
    d: int
    constant: int

    def on_curve(self) -> bool:
        return self.Y * self.Y == self.X ** 3 + self.constant


@dataclass(frozen=True)
class ShardSpec:
    """工作分片描述

    kind: basic / thue / smooth / large
    smooth 分片用 (prime, exponent) 描述首个素数幂分支（prime=1 表示 d=1）；
    large 分片用外层素数闭区间 [lo, hi]
    """
    shard_id: str
    kind: str
    index: int
    prime: int = 0
    exponent: int = 0
    lo: int = 0
    hi: int = 0


@dataclass
class ShardResult:
    """单个分片的执行结果"""
    shard_id: str
    index: int
    solutions: List[Solution] = field(default_factory=list)
    stats: DStats = field(default_factory=DStats)
    square_hits: List[SquareHit] = field(default_factory=list)
    family: Optional[FamilyDescriptor] = None


@dataclass
class SearchResult:
    """完整搜索结果"""
    k: int
    bound: int
    solutions: List[Solution]
    stats: DStats
    square_hits: List[SquareHit] = field(default_factory=list)
    shard_ids: List[str] = field(default_factory=list)
    families: List[FamilyDescriptor] = field(default_factory=list)

    @property
    def triples(self) -> FrozenSet[Tuple[int, int, int]]:
        return frozenset(solution.triple for solution in self.solutions)


@dataclass
class CheckpointState:
    """从检查点文件读回的状态"""
    k: int
    bound: int
    digest: str
    done: List[str] = field(default_factory=list)
    solutions: List[Solution] = field(default_factory=list)


@dataclass
class RunReport:
    """命令行运行报告"""
    config: Dict[str, Any]
    solutions: List[Solution]
    stats: Dict[str, int]
    wall_time: float
    mordell_points: List[MordellPoint] = field(default_factory=list)
    families: List[FamilyDescriptor] = field(default_factory=list)

    def counters_consistent(self) -> bool:
        values = [self.stats.get(stage.value, 0) for stage in PIPELINE_STAGES]
        return all(later <= earlier for earlier, later in zip(values, values[1:]))


@dataclass(frozen=True)
class BoxResult:
    """暴力盒搜索结果"""
    k: int
    bound: int
    solutions: FrozenSet[Tuple[int, int, int]]


@dataclass(frozen=True)
class DeltaRecord:
    """穷举 Δ 扫描的一条记录"""
    d: int
    z: int
    delta: int
    is_square: bool
