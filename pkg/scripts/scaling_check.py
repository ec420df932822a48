#!/usr/bin/env python3
"""
近线性增长检查脚本

对固定 k 在若干上界 B 下运行快速路径，比较每个数量级之间 Δ 检验次数与耗时的增长倍数
"""

import argparse
import os
import sys
import time
from datetime import datetime
from typing import Dict, List, Sequence

# 添加项目根目录到路径
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.services.dstream import build_search_config
from app.services.search_service import SearchService

# 每个数量级允许的最大增长倍数
MAX_COUNT_RATIO = 13.0
MAX_TIME_RATIO = 15.0


def measure_scaling(k: int, bounds: Sequence[int], threads: int = 1) -> List[Dict]:
    """
    逐个上界运行快速路径

    Args:
        k: 目标整数
        bounds: 递增的上界列表
        threads: 工作进程数

    Returns:
        List[Dict]: 每个上界的 Δ 检验次数、候选数与耗时
    """
    rows = []
    for bound in bounds:
        config = build_search_config(k, bound)
        start = time.time()
        result = SearchService(config, threads=threads, include_small=False).run()
        elapsed = time.time() - start
        rows.append({
            'bound': bound,
            'd_count': result.stats.d_count,
            'candidates': result.stats.candidates,
            'delta_tests': result.stats.delta_tests,
            'solutions': len(result.solutions),
            'seconds': elapsed,
        })
        print(f"   B={bound:>10}: d={result.stats.d_count:>8}  Δ检验={result.stats.delta_tests:>10}  "
              f"耗时={elapsed:8.2f}s")
    return rows


def check_ratios(rows: List[Dict],
                 max_count_ratio: float = MAX_COUNT_RATIO,
                 max_time_ratio: float = MAX_TIME_RATIO) -> List[str]:
    """
    相邻两行的增长倍数（按数量级归一）超出阈值时给出提示

    Returns:
        List[str]: 超限提示，空列表表示全部在容差内
    """
    warnings = []
    for previous, current in zip(rows, rows[1:]):
        decades = max(1.0, len(str(current['bound'])) - len(str(previous['bound'])))
        if previous['delta_tests'] > 0:
            ratio = (current['delta_tests'] / previous['delta_tests']) ** (1 / decades)
            if ratio > max_count_ratio:
                warnings.append(f"B={previous['bound']}→{current['bound']}: Δ检验增长 {ratio:.2f}× > {max_count_ratio}")
        if previous['seconds'] > 0:
            ratio = (current['seconds'] / previous['seconds']) ** (1 / decades)
            if ratio > max_time_ratio:
                warnings.append(f"B={previous['bound']}→{current['bound']}: 耗时增长 {ratio:.2f}× > {max_time_ratio}")
    return warnings


def main():
    """主函数"""
    parser = argparse.ArgumentParser(description='快速路径近线性增长检查')
    parser.add_argument('--k', type=int, default=33, help='目标整数 (默认: 33)')
    parser.add_argument('--bounds', default='10000,100000,1000000',
                        help='逗号分隔的上界 (默认: 10000,100000,1000000)')
    parser.add_argument('--threads', type=int, default=1, help='工作进程数 (默认: 1)')

    args = parser.parse_args()

    try:
        bounds = [int(item) for item in args.bounds.split(',')]
        print(f"🔄 开始增长检查 k={args.k}")
        print(f"时间: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        print("=" * 50)

        rows = measure_scaling(args.k, bounds, threads=args.threads)
        warnings = check_ratios(rows)

        print(f"\n📋 检查结果:")
        if warnings:
            for message in warnings:
                print(f"   ⚠️  {message}")
            print("   增长超出容差，建议复查过滤参数")
        else:
            print("   ✅ 各数量级增长均在容差内")

    except KeyboardInterrupt:
        print(f"\n\n⏹️  检查被用户中断")
        sys.exit(1)
    except Exception as e:
        print(f"\n❌ 检查失败: {e}")
        import traceback
        traceback.print_exc()
        sys.exit(1)


if __name__ == "__main__":
    main()
