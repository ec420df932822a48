"""
领域异常定义

所有异常都继承 ValueError，调用方可以按原有方式捕获参数错误
"""

from typing import Optional


class CubeSearchError(ValueError):
    """搜索引擎异常基类"""


class UnsupportedResidue(CubeSearchError):
    """k ≢ ±3 (mod 9)：快速路径不适用，只能使用基础搜索"""

    def __init__(self, k: int):
        self.k = k
        super().__init__(f"k={k} ≡ {k % 9} (mod 9)，快速路径要求 k ≡ ±3 (mod 9)")


class ImpossibleK(CubeSearchError):
    """k ≡ ±4 (mod 9)：方程无整数解"""

    def __init__(self, k: int):
        self.k = k
        super().__init__(f"k={k} ≡ ±4 (mod 9)，x³+y³+z³=k 无整数解")


class ParityError(CubeSearchError):
    """d 与 sqrt_term 奇偶性不同，候选无整数解"""


class CurveMismatch(CubeSearchError):
    """Mordell 曲线恒等式不成立（内部错误）"""


class NonCoprimeModuli(CubeSearchError):
    """中国剩余定理要求模数互素"""


class NonInvertibleValue(CubeSearchError):
    """批量求逆时某个值与模数不互素"""

    def __init__(self, index: int, value: int, modulus: int):
        self.index = index
        self.value = value
        self.modulus = modulus
        super().__init__(f"第 {index} 个值 {value} 与模数 {modulus} 不互素，无法求逆")


class CheckpointMismatch(CubeSearchError):
    """检查点头部与当前配置不一致"""


class ConfigurationError(CubeSearchError):
    """搜索配置非法"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(message)
