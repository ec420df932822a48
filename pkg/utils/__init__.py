"""
工具模块

包含模运算与多精度整数内核
"""

from .modarith import (
    ModContext,
    jacobi,
    batch_inverse,
    cube_roots_mod_p,
    lift_cube_roots,
    crt_pair,
    crt_combine,
    is_perfect_square,
    is_perfect_cube,
    integer_cube_root,
    p_adic_order
)

__all__ = [
    'ModContext',
    'jacobi',
    'batch_inverse',
    'cube_roots_mod_p',
    'lift_cube_roots',
    'crt_pair',
    'crt_combine',
    'is_perfect_square',
    'is_perfect_cube',
    'integer_cube_root',
    'p_adic_order'
]
