"""
候选 |z| 过滤服务

对固定的除数类 d 生成满足方程组必要条件的 |z| 算术级数：
符号规则、mod 18（k=3 时 mod 162）同余、2-adic 赋值约束，
以及辅助模数 M 上的勒让德筛与若干次级素数筛
"""

import logging
import math
from functools import lru_cache
from math import gcd, isqrt
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from sympy import nextprime, primefactors, primerange

from config.settings import SearchSettings, get_search_settings
from models.search_models import (
    CandidateProgression,
    DivisorClass,
    DStats,
    LegendreSieve,
    SearchConfig,
    TwoAdicProfile,
)
from utils.modarith import jacobi, lift_cube_roots

logger = logging.getLogger(__name__)

# 超过该模数的级数最多包含一个元素，直接用 Python 整数处理
_NUMPY_STEP_LIMIT = 1 << 62

# 勒让德筛掩码缓存条数
_SIEVE_CACHE_SIZE = 4096


def sign_delta(d: int) -> int:
    """
    δ = (d/3)

    Raises:
        ValueError: 3 | d
    """
    if d % 3 == 0:
        raise ValueError(f"d 必须与 3 互素: {d}")
    return 1 if d % 3 == 1 else -1


def _epsilon(k: int) -> int:
    return 1 if k % 9 == 3 else -1


def z_residue(k: int, d: int) -> Tuple[int, int]:
    """
    mod 18 同余：有符号 z 的剩余类

    Returns:
        tuple: (剩余, 模数)，模数为 18；k = 3 时为 162
    """
    if k == 3:
        return (4 * sign_delta(d) * d + 3 * (d * d - 1)) % 162, 162
    return ((4 * k // 3) * (2 - d * d) + 9 * (k + d)) % 18, 18


def min_abs_z(d: int, k: int) -> int:
    """满足 d < α|z| 与 |z| > √k 的最小 |z|

    d < α|z| 等价于 (d + |z|)³ < 2|z|³，用整数比较
    """
    n = max(1, int(d * 3.847322101863072) - 2)
    while (d + n) ** 3 >= 2 * n ** 3:
        n += 1
    while n > 1 and (d + n - 1) ** 3 < 2 * (n - 1) ** 3:
        n -= 1
    return max(n, isqrt(k) + 1)


def two_adic_profile(d: int) -> TwoAdicProfile:
    """由 s = ord₂(d) 得出允许的 t = ord₂(z³ − k)：t ∈ {s, s+2, ..., 3s}"""
    s = (d & -d).bit_length() - 1
    if s == 0:
        return TwoAdicProfile(s=0, allowed_t=(0,))
    return TwoAdicProfile(s=s, allowed_t=tuple(range(s, 3 * s + 1, 2)))


@lru_cache(maxsize=1024)
def two_adic_classes(k: int, t: int) -> Tuple[int, ...]:
    """模 2^(t+1) 下使 ord₂(z³ − k) 恰为 t 的 z 剩余类"""
    if t == 0:
        return tuple(z for z in (0, 1) if (z ** 3 - k) % 2 != 0)
    step = 1 << t
    modulus = step << 1
    classes = []
    for r in lift_cube_roots(k, 2, t).roots:
        for candidate in (r, r + step):
            if (candidate ** 3 - k) % modulus != 0:
                classes.append(candidate)
    return tuple(sorted(classes))


def _merge(r1: int, m1: int, r2: int, m2: int) -> Optional[Tuple[int, int]]:
    """合并两个同余式（模数可不互素），不相容时返回 None"""
    g = gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    lcm = m1 // g * m2
    reduced = m2 // g
    t = ((r2 - r1) // g * pow(m1 // g, -1, reduced)) % reduced if reduced > 1 else 0
    return (r1 + m1 * t) % lcm, lcm


def two_adic_filter(d: int, k: int, progression: CandidateProgression) -> List[CandidateProgression]:
    """
    按 2-adic 约束细分级数

    每个允许的 t 对应模 2^(t+1) 的若干类；与原级数合并后得到模数为
    lcm(m, 2^(t+1)) 的子级数，子级数中每个 |z| 都满足 ord₂(z³ − k) = t

    Args:
        d: 除数
        k: 目标整数
        progression: 已满足 z³ ≡ k (mod d) 的级数

    Returns:
        List[CandidateProgression]: 细分后的非空级数
    """
    sign = progression.sign_of_z
    signed_residue = (sign * progression.residue) % progression.modulus

    refined = []
    for t in two_adic_profile(d).allowed_t:
        for a in two_adic_classes(k, t):
            merged = _merge(signed_residue, progression.modulus, a, 1 << (t + 1))
            if merged is None:
                continue
            residue, modulus = merged
            child = CandidateProgression(
                residue=(sign * residue) % modulus,
                modulus=modulus,
                lower=progression.lower,
                upper=progression.upper,
                sign_of_z=sign,
                two_adic_t=t,
            )
            if child.count():
                refined.append(child)
    return refined


def build_progressions(divclass: DivisorClass, config: SearchConfig) -> List[CandidateProgression]:
    """
    除数类对应的全部候选 |z| 级数

    Returns:
        List[CandidateProgression]: 级数列表，区间为空时返回空列表
    """
    d = divclass.d
    sign = config.epsilon * divclass.delta
    lower, upper = min_abs_z(d, config.k), config.bound
    if lower > upper:
        return []

    classes: List[Tuple[int, int]] = [(r, d) for r in divclass.roots]
    if config.enable_mod18:
        zr, m18 = z_residue(config.k, d)
        classes = [merged for r, m in classes if (merged := _merge(r, m, zr, m18)) is not None]

    progressions = []
    for residue, modulus in classes:
        base = CandidateProgression(
            residue=(sign * residue) % modulus,
            modulus=modulus,
            lower=lower,
            upper=upper,
            sign_of_z=sign,
        )
        if config.enable_two_adic:
            progressions.extend(two_adic_filter(d, config.k, base))
        elif base.count():
            progressions.append(base)
    return progressions


def choose_sieve_params(bound: int, settings: Optional[SearchSettings] = None) -> Tuple[int, Tuple[int, ...]]:
    """
    主筛参数 P 与素数集合

    P = max(下限, round(c·lnln B·lnlnln B))，M = ∏_{5≤p≤P} p；
    若掩码超出内存预算，从最大的素数开始丢弃

    Returns:
        tuple: (P, 主筛素数)
    """
    settings = settings or get_search_settings()
    cutoff = settings.min_sieve_prime_cutoff
    if bound >= 100:
        lnln = math.log(math.log(bound))
        cutoff = max(cutoff, round(settings.sieve_constant * lnln * math.log(lnln)))

    primes = list(primerange(5, cutoff + 1))
    modulus = math.prod(primes)
    while primes and modulus > settings.mask_budget_bytes:
        dropped = primes.pop()
        modulus //= dropped
        logger.warning(f"⚠️ 主筛掩码超出内存预算 {settings.mem_mb}MB，移除素数 {dropped}")
    return cutoff, tuple(primes)


def default_secondary_moduli(cutoff: int, count: int) -> Tuple[int, ...]:
    """P 之上紧邻的 count 个素数"""
    moduli = []
    p = cutoff
    for _ in range(count):
        p = nextprime(p)
        moduli.append(int(p))
    return tuple(moduli)


@lru_cache(maxsize=65536)
def prime_condition_table(p: int, k_mod_p: int, d_mod_p: int, epsilon: int, delta: int) -> np.ndarray:
    """
    单个素数 p 上的可行表：ok[ρ] ⇔ (3d/p)·((ρ³ − c)/p) ∈ {0, 1}

    立方表 ρ³ mod p 与二次特征表都用 numpy 一次算出
    """
    symbol_3d = jacobi(3 * d_mod_p, p)
    if symbol_3d == 0:
        return np.ones(p, dtype=bool)
    c = (epsilon * delta * k_mod_p + d_mod_p ** 3 * pow(4, -1, p)) % p

    rho = np.arange(p, dtype=np.int64)
    cubes = rho * rho % p * rho % p
    character = np.full(p, -1, dtype=np.int8)
    character[rho * rho % p] = 1
    character[0] = 0
    return symbol_3d * character[(cubes - c) % p] >= 0


@lru_cache(maxsize=_SIEVE_CACHE_SIZE)
def _cached_sieve(k: int, d_mod_m: int, delta: int, epsilon: int, modulus: int) -> LegendreSieve:
    primes = tuple(int(p) for p in primefactors(modulus)) if modulus > 1 else ()
    c = (epsilon * delta * k + d_mod_m ** 3 * pow(4, -1, modulus)) % modulus if modulus > 1 else 0

    mask = np.ones(modulus, dtype=bool)
    rho = np.arange(modulus, dtype=np.int64)
    for p in primes:
        mask &= prime_condition_table(p, k % p, d_mod_m % p, epsilon, delta)[rho % p]
    symbols = {p: jacobi(3 * d_mod_m, p) for p in primes}
    return LegendreSieve(modulus=modulus, c=c, delta=delta, primes=primes, symbol_3d=symbols, mask=mask)


def build_legendre_sieve(k: int, d: int, epsilon: int, modulus: int) -> LegendreSieve:
    """
    构造 |z| mod M 的可行剩余掩码

    Δ = 12d(|z|³ − c)，c ≡ εδk + d³/4 (mod M)；掩码只依赖 d mod M 与 δ，
    相同的 (k, d mod M, δ) 共用同一张表

    Args:
        k: 目标整数
        d: 除数（3 ∤ d）
        epsilon: ε
        modulus: M，奇数、无平方因子且与 3 互素

    Returns:
        LegendreSieve: 只读的掩码表
    """
    return _cached_sieve(k, d % modulus, sign_delta(d), epsilon, modulus)


def sieve_applicable(d: int, config: SearchConfig) -> bool:
    """lcm(d, 18) ≤ αB / M 时才使用主筛"""
    if not config.enable_legendre_sieve or config.sieve_modulus <= 1:
        return False
    return d * 18 // gcd(d, 18) * config.sieve_modulus <= config.d_max


def secondary_tables(k: int, d: int, epsilon: int, moduli: Sequence[int]) -> List[Tuple[int, np.ndarray]]:
    """次级模数按素因子拆开后的可行表 [(p, ok)]"""
    delta = sign_delta(d)
    return [(p, prime_condition_table(p, k % p, d % p, epsilon, delta))
            for p in _moduli_primes(tuple(moduli))]


def secondary_sieve_test(abs_z: int, d: int, k: int, moduli: Sequence[int], epsilon: Optional[int] = None) -> bool:
    """
    次级勒让德检验

    Returns:
        bool: False 表示 Δ 在某个素数下是二次非剩余，必不是平方数
    """
    epsilon = epsilon if epsilon is not None else _epsilon(k)
    for p, ok in secondary_tables(k, d, epsilon, moduli):
        if not ok[abs_z % p]:
            return False
    return True


def apply_secondary(values: np.ndarray, tables: List[Tuple[int, np.ndarray]]) -> np.ndarray:
    """对 numpy 候选数组批量应用次级表"""
    keep = np.ones(values.shape[0], dtype=bool)
    for p, ok in tables:
        keep &= ok[values % p]
    return values[keep]


@lru_cache(maxsize=256)
def _moduli_primes(moduli: Tuple[int, ...]) -> Tuple[int, ...]:
    return tuple(int(p) for modulus in moduli for p in primefactors(modulus))


def _masked_values(progression: CandidateProgression, sieve: LegendreSieve) -> np.ndarray:
    """级数中落在掩码可行类里的全部 |z|（升序）"""
    first = progression.first()
    m, big_m = progression.modulus, sieve.modulus
    period = big_m // gcd(m, big_m)
    offsets = np.arange(period, dtype=np.int64)
    residues = (first % big_m + offsets * (m % big_m)) % big_m
    allowed = offsets[sieve.mask[residues]]
    allowed = allowed[allowed <= (progression.upper - first) // m]
    if allowed.size == 0:
        return np.empty(0, dtype=np.int64)

    step = m * period
    rows = (progression.upper - first) // step + 1
    if step >= _NUMPY_STEP_LIMIT:
        rows = 1
        step = 0
    grid = first + allowed[:, None] * m + np.arange(rows, dtype=np.int64)[None, :] * step
    values = grid[grid <= progression.upper]
    values.sort()
    return values


def _progression_values(progression: CandidateProgression, sieve: Optional[LegendreSieve]) -> np.ndarray:
    first = progression.first()
    if first is None:
        return np.empty(0, dtype=np.int64)
    if progression.modulus > progression.upper - first:
        # 只有一个元素
        if sieve is not None and not sieve.mask[first % sieve.modulus]:
            return np.empty(0, dtype=np.int64)
        return np.array([first], dtype=np.int64)
    if sieve is not None:
        return _masked_values(progression, sieve)
    return np.arange(first, progression.upper + 1, progression.modulus, dtype=np.int64)


def scan_arrays(divclass: DivisorClass,
                config: SearchConfig,
                sieve: Optional[LegendreSieve] = None,
                stats: Optional[DStats] = None) -> Iterator[np.ndarray]:
    """
    逐级数输出候选 |z| 的 numpy 数组

    sieve 为 None 时按尺寸规则自动决定是否使用主筛
    """
    if sieve is None and sieve_applicable(divclass.d, config):
        sieve = build_legendre_sieve(config.k, divclass.d, config.epsilon, config.sieve_modulus)

    for progression in build_progressions(divclass, config):
        values = _progression_values(progression, sieve)
        if stats is not None:
            stats.progressions += 1
            stats.masked_progressions += 1 if sieve is not None else 0
            stats.candidates += int(values.size)
        if values.size:
            yield values


def scan(divclass: DivisorClass,
         config: SearchConfig,
         sieve: Optional[LegendreSieve] = None) -> Iterator[int]:
    """
    候选 |z| 流

    输出 (max(d/α, √k), B] 内所有满足根类、mod 18 同余、2-adic 约束
    以及（适用时）主筛掩码的 |z|
    """
    for values in scan_arrays(divclass, config, sieve):
        for value in values.tolist():
            yield value
