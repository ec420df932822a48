"""
三立方和搜索服务

提供搜索的核心业务逻辑，包括：
1. 快速路径：枚举除数类 d，过滤候选 |z|，检验 Δ 是否为完全平方并重建 (x, y)
2. 基础路径：小 |z| 时对 |k − z³| 的全部因子逐一检验
3. Thue 扫描：y = z 的情形，检验 k − 2y³ 是否为完全立方
4. Mordell 曲线映射与解的精确验证
"""

import logging
import time
from math import isqrt
from typing import Callable, Dict, List, Optional, Set, Tuple

from sympy import divisors

from app.services import dstream, zfilter
from app.services.background_tasks import ShardPool
from app.services.checkpoint_service import CheckpointService
from app.utils.errors import CurveMismatch, ParityError
from constants.search_constants import SolutionPath
from models.search_models import (
    DivisorClass,
    DStats,
    FamilyDescriptor,
    MordellPoint,
    SearchConfig,
    SearchResult,
    ShardResult,
    ShardSpec,
    Solution,
    SquareHit,
)
from utils.modarith import is_perfect_cube, is_perfect_square

logger = logging.getLogger(__name__)

BASIC_SHARD = ShardSpec(shard_id="basic", kind="basic", index=0)
THUE_SHARD = ShardSpec(shard_id="thue", kind="thue", index=1)


def verify_solution(x: int, y: int, z: int, k: int) -> bool:
    """x³ + y³ + z³ = k 的精确检验"""
    return x ** 3 + y ** 3 + z ** 3 == k


def delta_of(z: int, d: int, k: int, epsilon: int) -> int:
    """
    Δ = 3d(4εδ(z³ − k) − d³)

    Args:
        z: 有符号 z
        d: 除数（3 ∤ d）
        k: 目标整数
        epsilon: ε

    Returns:
        int: 精确的 Δ（可能为负）
    """
    delta = zfilter.sign_delta(d)
    return 3 * d * (4 * epsilon * delta * (z ** 3 - k) - d ** 3)


def reconstruct_xy(z: int, d: int, k: int, sqrt_term: int) -> Tuple[int, int]:
    """
    由 d 与 sqrt_term = √((4|k − z³| − d³) / 3d) 重建 (x, y)

    {x, y} = ½·sgn(k − z³)·(d ± sqrt_term)

    Returns:
        tuple: (x, y)，x³ + y³ = k − z³

    Raises:
        ParityError: d 与 sqrt_term 奇偶性不同
        ValueError: sqrt_term 与 (z, d, k) 不相符
    """
    n = k - z ** 3
    if n == 0:
        raise ValueError(f"k − z³ = 0 时无法由 d 重建 (z={z})")
    if 3 * d * sqrt_term * sqrt_term != 4 * abs(n) - d ** 3:
        raise ValueError(f"sqrt_term={sqrt_term} 与 z={z}, d={d}, k={k} 不符")
    if (d + sqrt_term) % 2:
        raise ParityError(f"d={d} 与 sqrt_term={sqrt_term} 奇偶性不同")

    sign = 1 if n > 0 else -1
    x = sign * (d + sqrt_term) // 2
    y = sign * (d - sqrt_term) // 2
    return x, y


def mordell_constant(d: int, k: int, epsilon: int) -> int:
    """Mordell 曲线 Y² = X³ + C 的常数 C = −2(6d)³(d³ + 4εδk)"""
    return -2 * (6 * d) ** 3 * (d ** 3 + 4 * epsilon * zfilter.sign_delta(d) * k)


def mordell_point(z: int, d: int, k: int, epsilon: int, x: int, y: int) -> MordellPoint:
    """
    把解映射到曲线点 X = 12d|z|，Y = (6d)²|x − y|

    Raises:
        CurveMismatch: 点不在曲线上
    """
    constant = mordell_constant(d, k, epsilon)
    point = MordellPoint(X=12 * d * abs(z), Y=(6 * d) ** 2 * abs(x - y), d=d, constant=constant)
    if not point.on_curve():
        logger.error(f"❌ Mordell 曲线恒等式不成立: d={d}, (x,y,z)=({x},{y},{z})")
        raise CurveMismatch(f"({point.X}, {point.Y}) 不在 Y² = X³ + {constant} 上")
    return point


def solution_mordell_point(solution: Solution, k: int, epsilon: int) -> MordellPoint:
    """
    快速路径解对应的曲线点

    规范顺序下 z 的绝对值最小；若并列，取使 |x + y| = d 的那个坐标作 z

    Raises:
        ValueError: 解没有记录 d（basic/thue 路径）
    """
    if solution.d is None:
        raise ValueError("只有快速路径的解才带有 d")
    x, y, z = solution.triple
    for a, b, c in ((x, y, z), (x, z, y), (y, z, x)):
        if abs(a + b) == solution.d:
            return mordell_point(c, solution.d, k, epsilon, a, b)
    raise CurveMismatch(f"解 {solution.triple} 中没有和为 ±{solution.d} 的坐标对")


def cube_families(k: int, zmax: int) -> List[FamilyDescriptor]:
    """k − z³ = 0 的无穷解族 (t, −t, z)，|z| ≤ zmax"""
    z = is_perfect_cube(k)
    if z is None or abs(z) > zmax:
        return []
    return [FamilyDescriptor(z=z)]


def basic_search(k: int, zmax: int) -> Set[Solution]:
    """
    基础算法：对每个 |z| ≤ zmax，枚举 |k − z³| 的全部因子 d

    x + y = sgn(k − z³)·d，x² − xy + y² = |k − z³| / d，
    (x − y)² = (4|k − z³|/d − d²) / 3

    Returns:
        Set[Solution]: 规范化后的解（k − z³ = 0 的解族见 cube_families）
    """
    if zmax < 1:
        raise ValueError(f"zmax 必须 ≥ 1: {zmax}")

    solutions: Set[Solution] = set()
    for z in range(-zmax, zmax + 1):
        n = k - z ** 3
        if n == 0:
            logger.info(f"k − z³ = 0 (z={z})：存在无穷解族 (t, −t, {z})")
            continue
        sign = 1 if n > 0 else -1
        for d in divisors(abs(n)):
            w = 4 * (abs(n) // d) - d * d
            if w < 0 or w % 3:
                continue
            v = is_perfect_square(w // 3)
            if v is None or (d + v) % 2:
                continue
            x, y = sign * (d + v) // 2, sign * (d - v) // 2
            if verify_solution(x, y, z, k):
                solutions.add(Solution.create(x, y, z, SolutionPath.BASIC))
    return solutions


def thue_scan(k: int, ybound: int) -> Set[Solution]:
    """
    y = z 的有界扫描：x³ + 2y³ = k

    仅覆盖 |y| ≤ ybound，不证明更大范围无解
    """
    if ybound < 1:
        raise ValueError(f"ybound 必须 ≥ 1: {ybound}")

    solutions: Set[Solution] = set()
    for y in range(-ybound, ybound + 1):
        x = is_perfect_cube(k - 2 * y ** 3)
        if x is not None:
            solutions.add(Solution.create(x, y, y, SolutionPath.THUE))
    return solutions


def search_divisor_class(divclass: DivisorClass,
                         config: SearchConfig,
                         stats: DStats,
                         square_hits: Optional[List[SquareHit]] = None) -> List[Solution]:
    """
    单个除数类的快速路径流水线

    scan → 次级筛 → Δ → 平方检验 → 重建 → 验证
    """
    d, k, epsilon = divclass.d, config.k, config.epsilon
    sign = epsilon * divclass.delta
    tables = zfilter.secondary_tables(k, d, epsilon, config.secondary_moduli) if config.enable_legendre_sieve else []

    stats.d_count += 1
    stats.root_sum += len(divclass.roots)

    solutions = []
    for values in zfilter.scan_arrays(divclass, config, stats=stats):
        survivors = zfilter.apply_secondary(values, tables) if tables else values
        stats.secondary_survivors += int(survivors.size)

        for abs_z in survivors.tolist():
            z = sign * abs_z
            delta = delta_of(z, d, k, epsilon)
            stats.delta_tests += 1
            if delta < 0:
                continue
            root = is_perfect_square(delta)
            if root is None:
                continue
            stats.squares += 1
            if square_hits is not None:
                square_hits.append(SquareHit(d=d, z=z, delta=delta, sqrt_delta=root))

            if root % (3 * d):
                continue
            try:
                x, y = reconstruct_xy(z, d, k, root // (3 * d))
            except ParityError:
                continue
            if not verify_solution(x, y, z, k):
                logger.error(f"❌ 重建结果未通过验证: d={d}, (x,y,z)=({x},{y},{z})")
                continue

            stats.solutions += 1
            solution = Solution.create(x, y, z, SolutionPath.FAST, d=d)
            solutions.append(solution)
            logger.info(f"🎉 找到解: {k} = {x}³ + {y}³ + {z}³ (d={d})")
    return solutions


def run_shard(config: SearchConfig, shard: ShardSpec) -> ShardResult:
    """
    执行单个分片（工作进程入口，只依赖参数，无共享可变状态）

    Returns:
        ShardResult: 分片内的解、计数与平方命中
    """
    result = ShardResult(shard_id=shard.shard_id, index=shard.index)
    if shard.kind == "basic":
        zmax = isqrt(config.k) + 1
        result.solutions = sorted(basic_search(config.k, zmax), key=Solution.sort_key)
        families = cube_families(config.k, zmax)
        result.family = families[0] if families else None
    elif shard.kind == "thue":
        result.solutions = sorted(thue_scan(config.k, config.bound), key=Solution.sort_key)
    else:
        for divclass in dstream.shard_classes(config, shard):
            result.solutions.extend(search_divisor_class(divclass, config, result.stats, result.square_hits))
    return result


def plan_all_shards(config: SearchConfig, include_small: bool = True) -> List[ShardSpec]:
    """basic、thue、光滑分支、大素数块，按确定顺序编号"""
    shards = [BASIC_SHARD, THUE_SHARD] if include_small else []
    offset = len(shards)
    for shard in dstream.plan_shards(config):
        shards.append(ShardSpec(shard_id=shard.shard_id, kind=shard.kind, index=shard.index + offset,
                                prime=shard.prime, exponent=shard.exponent, lo=shard.lo, hi=shard.hi))
    return shards


def fast_search(config: SearchConfig) -> Set[Solution]:
    """
    快速路径（单线程）：|x| ≥ |y| ≥ |z| > √k、y ≠ z、|z| ≤ B 的全部解
    """
    solutions: Set[Solution] = set()
    for shard in dstream.plan_shards(config):
        solutions.update(run_shard(config, shard).solutions)
    return solutions


def full_search(config: SearchConfig) -> Set[Solution]:
    """
    完整搜索（单线程）：基础路径 ∪ Thue 扫描 ∪ 快速路径，按规范三元组去重

    Returns:
        Set[Solution]: 最小坐标绝对值 ≤ B 的全部解
    """
    return merge_solutions(
        sorted(basic_search(config.k, isqrt(config.k) + 1), key=Solution.sort_key)
        + sorted(thue_scan(config.k, config.bound), key=Solution.sort_key)
        + sorted(fast_search(config), key=Solution.sort_key)
    )


def merge_solutions(solutions: List[Solution]) -> Set[Solution]:
    """按规范三元组去重，保留先出现的路径"""
    seen: Dict[Tuple[int, int, int], Solution] = {}
    for solution in solutions:
        seen.setdefault(solution.triple, solution)
    return set(seen.values())


class SearchService:
    """搜索服务类

    把分片交给工作池执行，按分片顺序合并结果，并在每个分片完成后写检查点
    """

    def __init__(self,
                 config: SearchConfig,
                 threads: int = 1,
                 checkpoint_path: Optional[str] = None,
                 resume: bool = False,
                 include_small: bool = True,
                 progress_callback: Optional[Callable[[int, int, str], None]] = None):
        self.config = config
        self.threads = threads
        self.include_small = include_small
        self.progress_callback = progress_callback
        self.checkpoint = CheckpointService(checkpoint_path, config) if checkpoint_path else None
        self.resume = resume
        self.pool: Optional[ShardPool] = None

    def run(self) -> SearchResult:
        """
        执行搜索

        Returns:
            SearchResult: 排序后的解、合并计数与平方命中

        Raises:
            CheckpointMismatch: 恢复时检查点与当前配置不一致
        """
        start_time = time.time()
        shards = plan_all_shards(self.config, include_small=self.include_small)

        done: List[str] = []
        restored: List[Solution] = []
        if self.checkpoint:
            if self.resume:
                state = self.checkpoint.load()
                done, restored = state.done, state.solutions
            else:
                self.checkpoint.initialize()

        finished = set(done)
        pending = [shard for shard in shards if shard.shard_id not in finished]
        logger.info(f"🚀 开始搜索 k={self.config.k}, B={self.config.bound}, "
                    f"D_max={self.config.d_max}, M={self.config.sieve_modulus}, "
                    f"分片 {len(pending)}/{len(shards)}（已完成 {len(done)}）")

        self.pool = ShardPool(self.config, run_shard, threads=self.threads, progress_callback=self.progress_callback)
        skipped = [shard for shard in shards if shard.shard_id in finished]
        results = self.pool.run(pending, on_result=self._record, skipped=skipped)

        stats = DStats()
        square_hits: List[SquareHit] = []
        collected = list(restored)
        families: List[FamilyDescriptor] = []
        if BASIC_SHARD.shard_id in finished and self.include_small:
            families.extend(cube_families(self.config.k, isqrt(self.config.k) + 1))
        for result in results:
            stats.merge(result.stats)
            square_hits.extend(result.square_hits)
            collected.extend(result.solutions)
            if result.family is not None:
                families.append(result.family)

        solutions = sorted(merge_solutions(collected), key=Solution.sort_key)
        elapsed = time.time() - start_time
        logger.info(f"✅ 搜索完成: {len(solutions)} 个解, Δ 检验 {stats.delta_tests} 次, 耗时 {elapsed:.2f}s")

        return SearchResult(
            k=self.config.k,
            bound=self.config.bound,
            solutions=solutions,
            stats=stats,
            square_hits=square_hits,
            shard_ids=[shard.shard_id for shard in shards],
            families=families,
        )

    def _record(self, result: ShardResult) -> None:
        if self.checkpoint:
            self.checkpoint.record_shard(result)
