"""
除数类枚举服务

枚举所有 0 < d ≤ floor(αB)、3 ∤ d 的候选除数，按素因子分解递归构造，
用中国剩余定理合并 z³ ≡ k (mod d) 的根，并按 k 的素因子指数剪枝。
枚举按大素数流 / 光滑流切分为互不相交的分片，供工作池并行处理
"""

import logging
from functools import lru_cache
from itertools import chain
from math import isqrt
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from sympy import primerange

from app.services.zfilter import choose_sieve_params, default_secondary_moduli, sign_delta
from app.utils.errors import ConfigurationError, ImpossibleK, UnsupportedResidue
from config.settings import SearchSettings, get_search_settings
from models.search_models import DivisorClass, SearchConfig, ShardSpec
from utils.modarith import batch_inverse, crt_pair, integer_cube_root, lift_cube_roots, p_adic_order

logger = logging.getLogger(__name__)

# 候选 |z| 以 int64 数组处理
MAX_BOUND = 1 << 62


def epsilon_of_k(k: int) -> int:
    """
    k ≡ 3ε (mod 9) 中的 ε

    Raises:
        ImpossibleK: k ≡ ±4 (mod 9)，方程无解
        UnsupportedResidue: 其他 k ≢ ±3 (mod 9)，只能走基础搜索
    """
    residue = k % 9
    if residue == 3:
        return 1
    if residue == 6:
        return -1
    if residue in (4, 5):
        raise ImpossibleK(k)
    raise UnsupportedResidue(k)


def compute_d_max(bound: int) -> int:
    """floor(αB)，即满足 (d + B)³ ≤ 2B³ 的最大整数 d（纯整数运算）"""
    if bound <= 0:
        return 0
    return integer_cube_root(2 * bound ** 3) - bound


def load_excluded_d(path: str) -> Tuple[int, ...]:
    """
    读取外部排除的 d 列表（每行一个整数，# 开头为注释）

    Raises:
        ConfigurationError: 文件不存在或内容非法
    """
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigurationError(f"排除列表文件不存在: {path}", field='excluded_d')

    values = []
    with open(file_path, 'r', encoding='utf-8') as f:
        for line_no, line in enumerate(f, start=1):
            text = line.split('#', 1)[0].strip()
            if not text:
                continue
            try:
                value = int(text)
            except ValueError:
                raise ConfigurationError(f"{path}:{line_no} 不是整数: {text!r}", field='excluded_d')
            if value <= 0 or value % 3 == 0:
                raise ConfigurationError(f"{path}:{line_no} d 必须为正且与 3 互素: {value}", field='excluded_d')
            values.append(value)

    logger.info(f"加载排除的 d: {len(values)} 个")
    return tuple(sorted(set(values)))


def build_search_config(k: int,
                        bound: int,
                        settings: Optional[SearchSettings] = None,
                        enable_legendre_sieve: bool = True,
                        enable_two_adic: bool = True,
                        enable_mod18: bool = True,
                        secondary_moduli: Optional[Sequence[int]] = None,
                        excluded_d: Iterable[int] = ()) -> SearchConfig:
    """
    构造并校验单次搜索配置

    Args:
        k: 目标整数（要求 k ≡ ±3 mod 9）
        bound: 最小坐标上界 B
        settings: 环境配置，默认使用 get_search_settings()
        enable_legendre_sieve / enable_two_adic / enable_mod18: 过滤开关
        secondary_moduli: 次级辅助模数，None 表示取 P 之上的若干素数
        excluded_d: 外部已排除的 d

    Returns:
        SearchConfig: 不可变配置

    Raises:
        ImpossibleK / UnsupportedResidue: k 不适用快速路径
        ConfigurationError: 其他参数非法
    """
    settings = settings or get_search_settings()
    if bound < 1 or bound >= MAX_BOUND:
        raise ConfigurationError(f"上界必须在 [1, 2^62) 内: {bound}", field='bound')
    if k < 1:
        raise ConfigurationError(f"k 必须为正整数: {k}", field='k')

    epsilon = epsilon_of_k(k)
    cutoff, primes = choose_sieve_params(bound, settings)
    modulus = 1
    for p in primes:
        modulus *= p

    if secondary_moduli is None:
        secondary_moduli = default_secondary_moduli(cutoff, settings.secondary_count)
    for m in secondary_moduli:
        if m < 5 or m % 2 == 0 or m % 3 == 0:
            raise ConfigurationError(f"次级模数必须为 ≥5 的奇数且与 3 互素: {m}", field='secondary_moduli')

    return SearchConfig(
        k=k,
        bound=bound,
        epsilon=epsilon,
        d_max=compute_d_max(bound),
        sieve_prime_cutoff=cutoff,
        sieve_primes=tuple(primes),
        sieve_modulus=modulus,
        secondary_moduli=tuple(secondary_moduli),
        enable_legendre_sieve=enable_legendre_sieve,
        enable_two_adic=enable_two_adic,
        enable_mod18=enable_mod18,
        excluded_d=tuple(sorted(set(excluded_d))),
        large_prime_shard_size=settings.large_prime_shard_size,
    )


def exponent_allowed(k: int, p: int, e: int) -> bool:
    """素因子指数约束：若 ord_p(k) ∈ {1, 2}，则 ord_p(d) ∈ {0, ord_p(k)}"""
    if e == 0:
        return True
    order = p_adic_order(k, p) if k % p == 0 else 0
    if order in (1, 2):
        return e == order
    return True


@lru_cache(maxsize=65536)
def prime_power_roots(k: int, p: int, e: int) -> Tuple[int, ...]:
    """模 p^e 的立方根（缓存）"""
    return lift_cube_roots(k, p, e).roots


def _extend(roots: Tuple[int, ...], d: int, q_roots: Tuple[int, ...], q: int) -> Tuple[int, ...]:
    """把模 q 的根与模 d 的根用 CRT 合并为模 d·q 的根"""
    return tuple(sorted(crt_pair(r, d, s, q)[0] for r in roots for s in q_roots))


def _make_class(d: int, factorization: Tuple[Tuple[int, int], ...], roots: Tuple[int, ...]) -> DivisorClass:
    return DivisorClass(d=d, factorization=factorization, delta=sign_delta(d), roots=roots)


def _dfs(k: int,
         primes: Sequence[int],
         start: int,
         limit: int,
         d: int,
         factorization: Tuple[Tuple[int, int], ...],
         roots: Tuple[int, ...]) -> Iterator[DivisorClass]:
    """深度优先：在 d 上按递增顺序继续乘 primes[start:] 的素数幂（结果不含 d 本身）"""
    for index in range(start, len(primes)):
        p = primes[index]
        if d * p > limit:
            break
        q, e = p, 1
        while d * q <= limit:
            if exponent_allowed(k, p, e):
                q_roots = prime_power_roots(k, p, e)
                if q_roots:
                    new_roots = _extend(roots, d, q_roots, q)
                    new_factorization = factorization + ((p, e),)
                    yield _make_class(d * q, new_factorization, new_roots)
                    yield from _dfs(k, primes, index + 1, limit, d * q, new_factorization, new_roots)
                else:
                    # 模 p^e 无根则模 p^(e+1) 亦无根
                    break
            q *= p
            e += 1


def _admissible(config: SearchConfig, divclass: DivisorClass) -> bool:
    return divclass.d not in config.excluded_d


def _primes_upto(limit: int) -> List[int]:
    return [p for p in primerange(2, limit + 1) if p != 3]


def enumerate_d(config: SearchConfig) -> Iterator[DivisorClass]:
    """
    按素因子分解递归枚举全部可行除数类（单线程、确定性）

    依次输出 (0, D_max] 中所有 3 ∤ d、满足指数约束、
    不在排除列表中且根集非空的 d，每个恰好一次
    """
    primes = _primes_upto(config.d_max)
    root = _make_class(1, (), (0,))
    stream = chain([root], _dfs(config.k, primes, 0, config.d_max, 1, (), (0,)))
    for divclass in stream:
        if divclass.d <= config.d_max and _admissible(config, divclass):
            yield divclass


def smooth_limit(config: SearchConfig) -> int:
    """光滑界 floor(√D_max)"""
    return isqrt(config.d_max)


def plan_shards(config: SearchConfig) -> List[ShardSpec]:
    """
    规划光滑流与大素数流的分片（不含 basic/thue 分片）

    光滑流：d = 1 以及按最小素数幂 p^e 分支；大素数流：外层素数 p > √D_max 按块切分
    """
    shards: List[ShardSpec] = []
    if config.d_max < 1:
        return shards

    root_limit = smooth_limit(config)
    index = 0
    shards.append(ShardSpec(shard_id="S:1", kind="smooth", index=index, prime=1, exponent=0))

    branches: List[Tuple[int, int, int]] = []
    for p in _primes_upto(root_limit):
        q, e = p, 1
        while q <= config.d_max:
            branches.append((q, p, e))
            q *= p
            e += 1
    for q, p, e in sorted(branches):
        index += 1
        shards.append(ShardSpec(shard_id=f"S:{q}", kind="smooth", index=index, prime=p, exponent=e))

    outer = [p for p in primerange(root_limit + 1, config.d_max + 1) if p != 3]
    size = config.large_prime_shard_size
    for start in range(0, len(outer), size):
        chunk = outer[start:start + size]
        index += 1
        shards.append(ShardSpec(shard_id=f"L:{chunk[0]}-{chunk[-1]}", kind="large",
                                index=index, lo=chunk[0], hi=chunk[-1]))
    return shards


def _smooth_shard_classes(config: SearchConfig, shard: ShardSpec) -> Iterator[DivisorClass]:
    """光滑分片：d = p^e · (只含 (p, √D_max] 中素数的因子)"""
    if shard.prime == 1:
        yield _make_class(1, (), (0,))
        return

    p, e = shard.prime, shard.exponent
    if not exponent_allowed(config.k, p, e):
        return
    q_roots = prime_power_roots(config.k, p, e)
    if not q_roots:
        return
    q = p ** e
    factorization = ((p, e),)
    yield _make_class(q, factorization, q_roots)

    primes = [r for r in _primes_upto(smooth_limit(config)) if r > p]
    yield from _dfs(config.k, primes, 0, config.d_max, q, factorization, q_roots)


@lru_cache(maxsize=32)
def _cofactor_classes(config: SearchConfig, limit: int) -> Tuple[DivisorClass, ...]:
    """所有 c ≤ limit 的可行除数类（含 c = 1），按 c 升序"""
    primes = _primes_upto(limit)
    classes = [_make_class(1, (), (0,))]
    classes.extend(_dfs(config.k, primes, 0, limit, 1, (), (0,)))
    return tuple(sorted(classes, key=lambda c: c.d))


def _large_shard_classes(config: SearchConfig, shard: ShardSpec) -> Iterator[DivisorClass]:
    """大素数分片：d = p · c，外层素数 p ∈ [lo, hi]，c ≤ D_max / p

    c 的所有素因子都小于 p；c mod p 的逆用批量求逆一次算出
    """
    cofactors = _cofactor_classes(config, config.d_max // shard.lo)
    for p in primerange(shard.lo, shard.hi + 1):
        if p == 3 or not exponent_allowed(config.k, p, 1):
            continue
        p_roots = prime_power_roots(config.k, p, 1)
        if not p_roots:
            continue
        usable = [c for c in cofactors if c.d <= config.d_max // p]
        inverses = batch_inverse([c.d % p for c in usable], p)
        for cofactor, inv_c in zip(usable, inverses):
            c = cofactor.d
            # z ≡ b (mod c), z ≡ a (mod p)  =>  z = b + c·((a − b)·c⁻¹ mod p)
            roots = tuple(sorted(b + c * ((a - b) * inv_c % p) for a in p_roots for b in cofactor.roots))
            factorization = tuple(sorted(cofactor.factorization + ((p, 1),)))
            yield _make_class(p * c, factorization, roots)


def shard_classes(config: SearchConfig, shard: ShardSpec) -> Iterator[DivisorClass]:
    """某个分片的全部可行除数类"""
    if shard.kind == "smooth":
        stream = _smooth_shard_classes(config, shard)
    elif shard.kind == "large":
        stream = _large_shard_classes(config, shard)
    else:
        return
    for divclass in stream:
        if divclass.d <= config.d_max and _admissible(config, divclass):
            yield divclass


def split_streams(config: SearchConfig) -> Tuple[Iterator[DivisorClass], Iterator[DivisorClass]]:
    """
    将 enumerate_d 的输出划分为 (大素数流, 光滑流)

    Returns:
        tuple: 两个迭代器，合起来恰好覆盖每个可行 d 一次
    """
    shards = plan_shards(config)
    large = [s for s in shards if s.kind == "large"]
    smooth = [s for s in shards if s.kind == "smooth"]
    large_stream = chain.from_iterable(shard_classes(config, s) for s in large)
    smooth_stream = chain.from_iterable(shard_classes(config, s) for s in smooth)
    return large_stream, smooth_stream
