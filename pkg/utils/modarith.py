"""
模运算与多精度整数内核

提供固定模数的快速乘法上下文、Jacobi 符号、批量求逆、
素数/素数幂模下的立方根、中国剩余定理以及完全平方/立方检测。
所有函数都是纯函数，ModContext 构造后不可变，可在工作进程间共享
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import List, Optional, Sequence, Tuple

import gmpy2

from app.utils.errors import NonCoprimeModuli, NonInvertibleValue
from models.search_models import RootList

logger = logging.getLogger(__name__)

WORD_BITS = 64
WORD_MASK = (1 << WORD_BITS) - 1
MAX_MODULUS = 1 << 63


@dataclass(frozen=True)
class ModContext:
    """固定模数 m 的模运算上下文

    奇数模数使用 R = 2^64 的 Montgomery 约简；偶数模数退化为普通取余。
    所有结果都约简到 [0, m)
    """
    modulus: int
    montgomery: bool = field(init=False)
    n_prime: int = field(init=False)
    r2: int = field(init=False)

    def __post_init__(self):
        if self.modulus < 1 or self.modulus >= MAX_MODULUS:
            raise ValueError(f"模数必须在 [1, 2^63) 内: {self.modulus}")
        odd = self.modulus % 2 == 1 and self.modulus > 1
        object.__setattr__(self, 'montgomery', odd)
        if odd:
            # n' = −m⁻¹ mod R, R² mod m
            object.__setattr__(self, 'n_prime', pow(-self.modulus, -1, 1 << WORD_BITS))
            object.__setattr__(self, 'r2', pow(1 << WORD_BITS, 2, self.modulus))
        else:
            object.__setattr__(self, 'n_prime', 0)
            object.__setattr__(self, 'r2', 0)

    def redc(self, t: int) -> int:
        """Montgomery 约简：返回 t·R⁻¹ mod m（要求 0 ≤ t < m·R）"""
        m = ((t & WORD_MASK) * self.n_prime) & WORD_MASK
        u = (t + m * self.modulus) >> WORD_BITS
        return u - self.modulus if u >= self.modulus else u

    def to_montgomery(self, a: int) -> int:
        return self.redc((a % self.modulus) * self.r2)

    def from_montgomery(self, a: int) -> int:
        return self.redc(a)

    def mont_mul(self, a: int, b: int) -> int:
        """Montgomery 域内乘法"""
        return self.redc(a * b)

    def mul(self, a: int, b: int) -> int:
        """标准表示下的 a·b mod m"""
        if not self.montgomery:
            return (a * b) % self.modulus
        return self.redc(self.redc((a % self.modulus) * (b % self.modulus)) * self.r2)

    def add(self, a: int, b: int) -> int:
        s = (a % self.modulus) + (b % self.modulus)
        return s - self.modulus if s >= self.modulus else s

    def sub(self, a: int, b: int) -> int:
        s = (a % self.modulus) - (b % self.modulus)
        return s + self.modulus if s < 0 else s

    def pow(self, base: int, exponent: int) -> int:
        """从右到左二进制快速幂"""
        if exponent < 0:
            return pow(self.inverse(base), -exponent, self.modulus)
        if self.modulus == 1:
            return 0
        if not self.montgomery:
            return pow(base, exponent, self.modulus)
        result = self.to_montgomery(1)
        square = self.to_montgomery(base)
        while exponent:
            if exponent & 1:
                result = self.mont_mul(result, square)
            square = self.mont_mul(square, square)
            exponent >>= 1
        return self.from_montgomery(result)

    def inverse(self, a: int) -> int:
        return pow(a % self.modulus, -1, self.modulus)


def jacobi(a: int, n: int) -> int:
    """
    Jacobi 符号 (a/n)

    Args:
        a: 任意整数
        n: 正奇数

    Returns:
        int: -1、0 或 1；n 为素数时等于 Legendre 符号

    Raises:
        ValueError: n 为偶数或非正数
    """
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi 符号要求 n 为正奇数: {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def batch_inverse(values: Sequence[int], modulus: int) -> List[int]:
    """
    Montgomery 批量求逆：一次模逆 + O(n) 次乘法

    Args:
        values: 与模数互素的整数列表
        modulus: 模数

    Returns:
        List[int]: 逐项逆元

    Raises:
        NonInvertibleValue: 第一个与模数不互素的值（带下标）
    """
    if not values:
        return []
    ctx = ModContext(modulus)

    prefix: List[int] = []
    acc = 1 % modulus
    for index, value in enumerate(values):
        if gcd(value, modulus) != 1:
            raise NonInvertibleValue(index, value, modulus)
        acc = ctx.mul(acc, value)
        prefix.append(acc)

    inv_acc = ctx.inverse(prefix[-1])
    inverses = [0] * len(values)
    for index in range(len(values) - 1, 0, -1):
        inverses[index] = ctx.mul(inv_acc, prefix[index - 1])
        inv_acc = ctx.mul(inv_acc, values[index])
    inverses[0] = inv_acc
    return inverses


@lru_cache(maxsize=4096)
def _cubic_non_residue(p: int) -> int:
    """顺序扫描 2, 3, 4, ... 找到 g^((p−1)/3) ≠ 1 的三次非剩余（p ≡ 1 mod 3）"""
    exponent = (p - 1) // 3
    g = 2
    while pow(g, exponent, p) == 1:
        g += 1
    return g


def primitive_cube_root_of_unity(p: int) -> int:
    """p ≡ 1 (mod 3) 时的本原三次单位根"""
    return pow(_cubic_non_residue(p), (p - 1) // 3, p)


def _cube_root_prime(a: int, p: int) -> int:
    """p ≡ 1 (mod 3) 且 a 为非零三次剩余时，求一个立方根

    Tonelli–Shanks 式：p − 1 = 3^s·t，先取 x = a^u（3u ≡ 1 mod t），
    再在 3-Sylow 子群内逐位修正 b = x³/a 直到 b = 1
    """
    s, t = 0, p - 1
    while t % 3 == 0:
        t //= 3
        s += 1

    z = pow(_cubic_non_residue(p), t, p)   # 3-Sylow 子群生成元，阶 3^s
    omega = pow(z, 3 ** (s - 1), p)

    u = (t + 1) // 3 if t % 3 == 2 else (2 * t + 1) // 3
    x = pow(a, u, p)
    b = x * x % p * x % p * pow(a, -1, p) % p

    while b != 1:
        order_exp, walk = 0, b
        while walk != 1:
            walk = pow(walk, 3, p)
            order_exp += 1
        marker = pow(b, 3 ** (order_exp - 1), p)
        i = 1 if marker == omega else 2
        y = pow(z, 3 ** (s - order_exp - 1), p)
        x = x * pow(y, -i, p) % p
        b = b * pow(y, -3 * i, p) % p
    return x


def cube_roots_mod_p(k: int, p: int) -> RootList:
    """
    z³ ≡ k (mod p) 的全部根

    Args:
        k: 目标整数
        p: 素数

    Returns:
        RootList: 升序、去重的根；可能为空
    """
    a = k % p
    if a == 0:
        return RootList(p, (0,))
    if p in (2, 3):
        # 模 2、模 3 时立方映射是恒等映射
        return RootList(p, (a,))
    if p % 3 == 2:
        return RootList(p, (pow(a, (2 * p - 1) // 3, p),))
    if pow(a, (p - 1) // 3, p) != 1:
        return RootList(p, ())
    root = _cube_root_prime(a, p)
    omega = primitive_cube_root_of_unity(p)
    roots = {root, root * omega % p, root * omega % p * omega % p}
    return RootList(p, tuple(sorted(roots)))


def lift_cube_roots(k: int, p: int, e: int) -> RootList:
    """
    将模 p 的立方根提升到模 p^e

    导数 3r² 为单位时用一步 Hensel 提升（p = 2 时奇数根总是如此）；
    否则（p | r 或 p = 3）对 p 个候选逐一检验，保证完整

    Args:
        k: 目标整数
        p: 素数
        e: 指数，e ≥ 1

    Returns:
        RootList: 模 p^e 的全部根
    """
    if e < 1:
        raise ValueError(f"指数必须 ≥ 1: {e}")

    modulus = p
    roots = list(cube_roots_mod_p(k, p).roots)
    for _ in range(2, e + 1):
        previous = modulus
        modulus *= p
        lifted = set()
        for r in roots:
            if p != 3 and r % p != 0:
                inv = pow(3 * r * r, -1, modulus)
                lifted.add((r - (r * r * r - k) * inv) % modulus)
            else:
                for j in range(p):
                    candidate = r + j * previous
                    if (candidate ** 3 - k) % modulus == 0:
                        lifted.add(candidate)
        roots = sorted(lifted)
        if not roots:
            break
    return RootList(modulus if roots else p ** e, tuple(sorted(roots)))


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> Tuple[int, int]:
    """
    合并 z ≡ r1 (mod m1) 与 z ≡ r2 (mod m2)

    Returns:
        tuple: (模 m1·m2 的唯一剩余, m1·m2)

    Raises:
        NonCoprimeModuli: gcd(m1, m2) ≠ 1
    """
    if gcd(m1, m2) != 1:
        raise NonCoprimeModuli(f"模数不互素: gcd({m1}, {m2}) = {gcd(m1, m2)}")
    modulus = m1 * m2
    t = ((r2 - r1) * pow(m1, -1, m2)) % m2 if m2 > 1 else 0
    return (r1 + m1 * t) % modulus, modulus


def crt_combine(residues: Sequence[Tuple[int, int]]) -> Tuple[int, int]:
    """依次合并多个 (剩余, 模数) 对"""
    residue, modulus = 0, 1
    for r, m in residues:
        residue, modulus = crt_pair(residue, modulus, r, m)
    return residue, modulus


def is_perfect_square(n: int) -> Optional[int]:
    """
    精确完全平方检测（整数平方根 + 比较）

    Returns:
        Optional[int]: 平方根，若不是完全平方数则为 None

    Raises:
        ValueError: n 为负数
    """
    if n < 0:
        raise ValueError(f"完全平方检测要求 n ≥ 0: {n}")
    root, remainder = gmpy2.isqrt_rem(gmpy2.mpz(n))
    return int(root) if remainder == 0 else None


def is_perfect_cube(n: int) -> Optional[int]:
    """精确完全立方检测，允许负数"""
    root, exact = gmpy2.iroot(gmpy2.mpz(abs(n)), 3)
    if not exact:
        return None
    return int(root) if n >= 0 else -int(root)


def integer_cube_root(n: int) -> int:
    """floor(∛n)，n ≥ 0"""
    return int(gmpy2.iroot(gmpy2.mpz(n), 3)[0])


def p_adic_order(n: int, p: int) -> int:
    """ord_p(n)，n ≠ 0"""
    if n == 0:
        raise ValueError("ord_p(0) 无定义")
    return int(gmpy2.remove(gmpy2.mpz(n), p)[1])
