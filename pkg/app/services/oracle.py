"""
暴力参考实现

盒搜索、直接同余扫描与 Δ 穷举，只用于测试。
不调用快速路径的任何模块（独立的立方表与模运算）
"""

import logging
from math import isqrt
from typing import List, Set, Tuple

import numpy as np

from models.search_models import BoxResult, DeltaRecord, canonical_triple

logger = logging.getLogger(__name__)

MAX_BOX = 10 ** 4
MAX_ROOT_SCAN = 10 ** 6
MAX_DELTA_WORK = 10 ** 8


def box_search(k: int, bound: int) -> BoxResult:
    """
    max{|x|, |y|, |z|} ≤ N 的全部解

    对每对 a ≤ b 检查 k − a³ − b³ 是否在立方表中，O(N²)，按 a 逐行向量化

    Raises:
        ValueError: N 超过 10⁴
    """
    if bound < 0 or bound > MAX_BOX:
        raise ValueError(f"盒搜索要求 0 ≤ N ≤ {MAX_BOX}: {bound}")

    values = np.arange(-bound, bound + 1, dtype=np.int64)
    cubes = values ** 3
    found: Set[Tuple[int, int, int]] = set()
    for i in range(values.size):
        targets = k - cubes[i] - cubes[i:]
        positions = np.searchsorted(cubes, targets)
        positions = np.minimum(positions, cubes.size - 1)
        hits = np.nonzero(cubes[positions] == targets)[0]
        for j in hits.tolist():
            a, b, c = int(values[i]), int(values[i + j]), int(values[positions[j]])
            if a ** 3 + b ** 3 + c ** 3 == k:
                found.add(canonical_triple(a, b, c))

    logger.debug(f"盒搜索 k={k}, N={bound}: {len(found)} 个解")
    return BoxResult(k=k, bound=bound, solutions=frozenset(found))


def root_scan(k: int, modulus: int) -> Tuple[int, ...]:
    """直接扫描 0..m−1，返回全部 r³ ≡ k (mod m)"""
    if modulus < 1 or modulus > MAX_ROOT_SCAN:
        raise ValueError(f"根扫描要求 1 ≤ m ≤ {MAX_ROOT_SCAN}: {modulus}")
    r = np.arange(modulus, dtype=np.int64)
    cubes = r * r % modulus * r % modulus
    return tuple(int(v) for v in r[cubes == k % modulus])


def delta_scan(k: int, d_max: int, z_max: int) -> List[DeltaRecord]:
    """
    按定义穷举 Δ = 3d(4εδ(z³ − k) − d³)

    覆盖 1 ≤ d ≤ d_max、3 ∤ d、|z| ≤ z_max 中满足
    sgn z = εδ、z³ ≡ k (mod d)、d < α|z|（即 (d + |z|)³ < 2|z|³）、|z| > √k 的全部 (d, z)

    Returns:
        List[DeltaRecord]: 按 (d, |z|) 排序
    """
    if k % 9 not in (3, 6):
        raise ValueError(f"Δ 扫描要求 k ≡ ±3 (mod 9): {k}")
    if d_max * z_max > MAX_DELTA_WORK:
        raise ValueError(f"Δ 扫描规模过大: d_max·z_max = {d_max * z_max}")

    epsilon = 1 if k % 9 == 3 else -1
    records = []
    for d in range(1, d_max + 1):
        if d % 3 == 0:
            continue
        delta_sign = 1 if d % 3 == 1 else -1
        sign = epsilon * delta_sign
        for abs_z in range(1, z_max + 1):
            if abs_z * abs_z <= k or (d + abs_z) ** 3 >= 2 * abs_z ** 3:
                continue
            z = sign * abs_z
            if (z ** 3 - k) % d:
                continue
            delta = 3 * d * (4 * epsilon * delta_sign * (z ** 3 - k) - d ** 3)
            is_square = delta >= 0 and isqrt(delta) ** 2 == delta
            records.append(DeltaRecord(d=d, z=z, delta=delta, is_square=is_square))
    return records
