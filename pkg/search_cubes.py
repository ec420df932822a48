#!/usr/bin/env python3
"""
三立方和搜索命令行启动脚本

示例:
    python search_cubes.py --k 21 --bound 100
    python search_cubes.py --k 33 --bound 100000 --threads 8 --checkpoint run.ckpt --stats

结果写到标准输出（或 --output），日志写到标准错误与 logs/cubesearch.log
"""

import sys
from pathlib import Path

# 添加项目根目录到Python路径
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from app.main import run


if __name__ == "__main__":
    sys.exit(int(run()))
