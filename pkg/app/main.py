"""
命令行主入口

配置并运行搜索，输出 jsonl/text 结果，管理检查点并打印统计报告
"""

import argparse
import logging
import sys
import time
from contextlib import contextmanager
from typing import IO, Iterator, List, Optional, Sequence

from pydantic import ValidationError

from app.services import dstream
from app.services.oracle import box_search
from app.services.search_service import SearchService, basic_search, cube_families, solution_mordell_point
from app.utils.errors import CheckpointMismatch, ConfigurationError, ImpossibleK, UnsupportedResidue
from app.utils.responses import OUTPUT_FORMATS, emit_all, emit_family, render_report
from config.logging_config import setup_search_logging
from config.settings import SearchSettings, app_config
from constants.search_constants import KNOWN_SOLUTIONS, ExitCode, SolutionPath
from models.search_models import DStats, RunReport, Solution

logger = logging.getLogger(__name__)

MODES = ("fast", "basic", "full", "oracle")


class SearchArgumentParser(argparse.ArgumentParser):
    """参数错误抛出 ConfigurationError（退出码 3），而不是直接退出"""

    def error(self, message):
        raise ConfigurationError(f"参数错误: {message}")


def build_parser() -> SearchArgumentParser:
    parser = SearchArgumentParser(
        prog="search_cubes",
        description="x³ + y³ + z³ = k 整数解搜索（最小坐标 |z| ≤ B）",
    )
    parser.add_argument("--k", type=int, required=True, help="目标整数 k")
    parser.add_argument("--bound", type=int, required=True, help="最小坐标上界 B")
    parser.add_argument("--mode", choices=MODES, default="full", help="搜索模式（默认 full）")
    parser.add_argument("--threads", type=int, default=None, help="工作进程数（默认取 CUBESEARCH_THREADS 或 1）")
    parser.add_argument("--checkpoint", type=str, default=None, help="检查点文件路径")
    parser.add_argument("--resume", action="store_true", help="从检查点恢复")
    parser.add_argument("--no-sieve", action="store_true", help="关闭勒让德主筛与次级筛")
    parser.add_argument("--no-mod18", action="store_true", help="关闭 mod 18 同余过滤")
    parser.add_argument("--no-two-adic", action="store_true", help="关闭 2-adic 过滤")
    parser.add_argument("--secondary-moduli", type=str, default=None, help="次级模数，逗号分隔")
    parser.add_argument("--excluded-d", type=str, default=None, help="排除的 d 列表文件")
    parser.add_argument("--output", type=str, default=None, help="输出文件（默认标准输出）")
    parser.add_argument("--format", choices=OUTPUT_FORMATS, default="jsonl", help="输出格式")
    parser.add_argument("--stats", action="store_true", help="在标准错误输出打印运行报告")
    parser.add_argument("--log-level", type=str, default=None, help="日志级别")
    parser.add_argument("--no-log-file", action="store_true", help="只输出到标准错误，不写日志文件")
    return parser


def parse_moduli(text: Optional[str]) -> Optional[List[int]]:
    """
    解析 --secondary-moduli

    Raises:
        ConfigurationError: 含非整数项
    """
    if text is None:
        return None
    try:
        return [int(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise ConfigurationError(f"次级模数必须是逗号分隔的整数: {text!r}", field='secondary_moduli')


def validate_args(args: argparse.Namespace) -> None:
    """
    检查参数组合

    Raises:
        ConfigurationError: 非法组合
    """
    if args.bound < 1:
        raise ConfigurationError(f"--bound 必须为正整数: {args.bound}", field='bound')
    if args.threads is not None and args.threads < 1:
        raise ConfigurationError(f"--threads 必须 ≥ 1: {args.threads}", field='threads')
    if args.resume and not args.checkpoint:
        raise ConfigurationError("--resume 需要同时指定 --checkpoint", field='resume')
    if args.checkpoint and args.mode not in ("fast", "full"):
        raise ConfigurationError(f"--checkpoint 只适用于 fast/full 模式: {args.mode}", field='checkpoint')


@contextmanager
def open_output(path: Optional[str]) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
        return
    with open(path, 'w', encoding='utf-8') as f:
        yield f


def _progress(current: int, total: int, message: str) -> None:
    logger.debug(f"分片 {current}/{total}: {message}")


def run_fast_or_full(args: argparse.Namespace, settings: SearchSettings):
    """
    fast/full 模式

    full 模式下 k ≢ ±3 (mod 9) 时退回基础搜索（|z| ≤ B）

    Returns:
        tuple: (解列表, 统计, 配置回显, Mordell 点, 无穷解族)
    """
    excluded = dstream.load_excluded_d(args.excluded_d) if args.excluded_d else ()
    try:
        config = dstream.build_search_config(
            args.k,
            args.bound,
            settings=settings,
            enable_legendre_sieve=not args.no_sieve,
            enable_two_adic=not args.no_two_adic,
            enable_mod18=not args.no_mod18,
            secondary_moduli=parse_moduli(args.secondary_moduli),
            excluded_d=excluded,
        )
    except UnsupportedResidue:
        if args.mode == "fast":
            raise
        logger.warning(f"⚠️ k={args.k} 不满足 k ≡ ±3 (mod 9)，只运行基础搜索 |z| ≤ {args.bound}")
        solutions = sorted(basic_search(args.k, args.bound), key=Solution.sort_key)
        echo = {"k": args.k, "bound": args.bound, "mode": "basic"}
        return solutions, DStats(), echo, [], cube_families(args.k, args.bound)

    threads = args.threads or settings.threads
    service = SearchService(
        config,
        threads=threads,
        checkpoint_path=args.checkpoint,
        resume=args.resume,
        include_small=args.mode == "full",
        progress_callback=_progress,
    )
    result = service.run()

    points = [solution_mordell_point(s, config.k, config.epsilon)
              for s in result.solutions if s.path == SolutionPath.FAST]
    echo = config.model_dump()
    echo.update({"mode": args.mode, "threads": threads, "digest": config.digest()})
    return result.solutions, result.stats, echo, points, result.families


def run_basic(args: argparse.Namespace):
    if args.k % 9 in (4, 5):
        raise ImpossibleK(args.k)
    solutions = sorted(basic_search(args.k, args.bound), key=Solution.sort_key)
    echo = {"k": args.k, "bound": args.bound, "mode": "basic"}
    return solutions, DStats(), echo, [], cube_families(args.k, args.bound)


def run_oracle(args: argparse.Namespace):
    if args.k % 9 in (4, 5):
        raise ImpossibleK(args.k)
    try:
        box = box_search(args.k, args.bound)
    except ValueError as e:
        raise ConfigurationError(str(e), field='bound')
    solutions = sorted((Solution.create(x, y, z, SolutionPath.ORACLE) for x, y, z in box.solutions),
                       key=Solution.sort_key)
    return solutions, DStats(), {"k": args.k, "bound": args.bound, "mode": "oracle"}, [], []


def known_in_range(k: int, bound: int, solutions: Sequence[Solution]) -> List[dict]:
    """已发表的解中最小坐标 ≤ B 的那些，以及本次是否找到"""
    found = {s.triple for s in solutions}
    rows = []
    for triple in KNOWN_SOLUTIONS.get(k, []):
        canonical = Solution.create(*triple, SolutionPath.FAST).triple
        if abs(canonical[2]) <= bound:
            rows.append({"triple": [str(v) for v in canonical], "found": canonical in found})
    return rows


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    命令行入口

    Returns:
        int: 0 找到解或无穷解族；1 搜索完成但无解；2 k ≡ ±4 (mod 9)；3 配置错误
    """
    try:
        settings = SearchSettings()
    except ValidationError as e:
        print(f"❌ CUBESEARCH_* 环境变量配置错误: {e}", file=sys.stderr)
        return ExitCode.CONFIG_ERROR
    try:
        args = build_parser().parse_args(argv)
        validate_args(args)
    except ConfigurationError as e:
        print(f"❌ {e}", file=sys.stderr)
        return ExitCode.CONFIG_ERROR

    setup_search_logging(
        log_dir=settings.log_dir,
        level=args.log_level or settings.log_level,
        log_file=settings.log_file,
        to_file=not args.no_log_file,
    )
    logger.info(f"🚀 {app_config.app_name} {app_config.version}: k={args.k}, B={args.bound}, mode={args.mode}")

    start_time = time.time()
    try:
        if args.mode in ("fast", "full"):
            solutions, stats, echo, points, families = run_fast_or_full(args, settings)
        elif args.mode == "basic":
            solutions, stats, echo, points, families = run_basic(args)
        else:
            solutions, stats, echo, points, families = run_oracle(args)
    except ImpossibleK as e:
        logger.error(f"❌ {e}")
        print(f"❌ {e}", file=sys.stderr)
        return ExitCode.IMPOSSIBLE_K
    except (ConfigurationError, CheckpointMismatch, UnsupportedResidue) as e:
        logger.error(f"❌ 配置错误: {e}")
        print(f"❌ {e}", file=sys.stderr)
        return ExitCode.CONFIG_ERROR

    with open_output(args.output) as out:
        out.write(emit_all(solutions, args.k, args.format))
        for family in families:
            out.write(emit_family(family, args.k, args.format) + "\n")
        out.flush()

    if args.stats:
        echo["known_solutions"] = known_in_range(args.k, args.bound, solutions)
        report = RunReport(
            config=echo,
            solutions=solutions,
            stats=stats.as_dict(),
            wall_time=time.time() - start_time,
            mordell_points=points,
            families=families,
        )
        print(render_report(report), file=sys.stderr)

    return ExitCode.FOUND if solutions or families else ExitCode.NONE_FOUND


def main() -> None:
    sys.exit(int(run()))


if __name__ == "__main__":
    main()
