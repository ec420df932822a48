"""
输出格式工具模块

解的 jsonl / 文本记录与运行报告的统一格式
"""

import json
from datetime import datetime
from typing import Any, Dict, List

from models.search_models import FamilyDescriptor, RunReport, Solution

OUTPUT_FORMATS = ("jsonl", "text")


def create_solution_record(solution: Solution, k: int) -> Dict[str, Any]:
    """
    解的记录（整数一律写成十进制字符串，避免 53 位截断）

    Args:
        solution: 已验证的解
        k: 目标整数

    Returns:
        Dict: 键 k, x, y, z, d, path
    """
    return {
        "k": str(k),
        "x": str(solution.x),
        "y": str(solution.y),
        "z": str(solution.z),
        "d": None if solution.d is None else str(solution.d),
        "path": solution.path.value,
    }


def emit(solution: Solution, k: int, fmt: str = "jsonl") -> str:
    """
    序列化单个解（不含换行）

    Raises:
        ValueError: 未知格式
    """
    if fmt == "jsonl":
        return json.dumps(create_solution_record(solution, k), ensure_ascii=False)
    if fmt == "text":
        return f"{k} = {solution.x}^3 + {solution.y}^3 + {solution.z}^3"
    raise ValueError(f"未知输出格式: {fmt}")


def emit_all(solutions: List[Solution], k: int, fmt: str = "jsonl") -> str:
    """按 |z| 升序、再按规范三元组输出全部解"""
    lines = [emit(solution, k, fmt) for solution in sorted(solutions, key=Solution.sort_key)]
    return "".join(line + "\n" for line in lines)


def create_family_record(family: FamilyDescriptor, k: int) -> Dict[str, Any]:
    """无穷解族 (t, −t, z) 的记录，与解记录用 family 键区分"""
    return {"k": str(k), "family": "t,-t,z", "z": str(family.z), "path": "basic"}


def emit_family(family: FamilyDescriptor, k: int, fmt: str = "jsonl") -> str:
    """
    序列化单个解族（不含换行）

    Raises:
        ValueError: 未知格式
    """
    if fmt == "jsonl":
        return json.dumps(create_family_record(family, k), ensure_ascii=False)
    if fmt == "text":
        return f"{k} = t^3 + (-t)^3 + {family.z}^3"
    raise ValueError(f"未知输出格式: {fmt}")


def _report_message(report: RunReport) -> str:
    if not report.solutions and not report.families:
        return "未找到解"
    message = f"找到 {len(report.solutions)} 个解"
    if report.families:
        message += f"，{len(report.families)} 个无穷解族"
    return message


def create_report(report: RunReport) -> Dict[str, Any]:
    """
    运行报告（--stats）

    Returns:
        Dict: code / message / timestamp / data 结构
    """
    data = {
        "config": report.config,
        "solutions": [create_solution_record(s, report.config["k"]) for s in report.solutions],
        "stats": report.stats,
        "counters_consistent": report.counters_consistent(),
        "wall_time_seconds": round(report.wall_time, 3),
        "mordell_points": [
            {"d": str(p.d), "X": str(p.X), "Y": str(p.Y), "constant": str(p.constant)}
            for p in report.mordell_points
        ],
        "families": [create_family_record(f, report.config["k"]) for f in report.families],
    }
    return {
        "code": 0 if report.solutions or report.families else 1,
        "message": _report_message(report),
        "timestamp": datetime.now().strftime('%Y-%m-%d %H:%M:%S'),
        "data": data,
    }


def render_report(report: RunReport) -> str:
    """报告的 JSON 文本（写到 stderr）"""
    return json.dumps(create_report(report), ensure_ascii=False, indent=2, default=str)
