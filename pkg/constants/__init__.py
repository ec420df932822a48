"""
常量定义模块

包含退出码、已知解和检查点格式等常量
"""

from .search_constants import (
    ExitCode,
    SolutionPath,
    FilterStage,
    PIPELINE_STAGES,
    KnownSolution,
    K33_SOLUTION,
    K3_SOLUTIONS,
    KNOWN_SOLUTIONS
)

__all__ = [
    'ExitCode',
    'SolutionPath',
    'FilterStage',
    'PIPELINE_STAGES',
    'KnownSolution',
    'K33_SOLUTION',
    'K3_SOLUTIONS',
    'KNOWN_SOLUTIONS'
]
