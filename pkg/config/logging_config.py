"""
搜索引擎日志配置

日志同时写入按天轮换的文件和标准错误输出；
标准输出保留给 jsonl/text 结果，便于管道处理
"""

import logging
import sys
from logging.handlers import TimedRotatingFileHandler
from pathlib import Path
from typing import Optional


def setup_search_logging(log_dir: str = 'logs',
                         level: str = 'INFO',
                         log_file: str = 'cubesearch.log',
                         to_file: bool = True) -> logging.Logger:
    """
    配置搜索进程的日志

    Args:
        log_dir: 日志文件目录
        level: 日志级别名称（INFO/DEBUG/...）
        log_file: 日志文件名
        to_file: 是否写入文件（测试时可关闭）

    Returns:
        配置好的根日志记录器
    """
    numeric_level = getattr(logging, level.upper(), logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(numeric_level)

    # 清除现有的handlers，避免重复日志
    root_logger.handlers.clear()

    detailed_formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    # 控制台处理器 - 输出到stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(numeric_level)
    console_handler.setFormatter(detailed_formatter)
    root_logger.addHandler(console_handler)

    log_path: Optional[Path] = None
    if to_file:
        log_path = Path(log_dir)
        log_path.mkdir(parents=True, exist_ok=True)

        # 文件处理器 - 按天轮换，保留30天
        file_handler = TimedRotatingFileHandler(
            log_path / log_file,
            when='midnight',
            interval=1,
            backupCount=30,
            encoding='utf-8',
            utc=False
        )
        file_handler.suffix = '%Y%m%d'
        file_handler.setLevel(numeric_level)
        file_handler.setFormatter(detailed_formatter)
        root_logger.addHandler(file_handler)

    logger = logging.getLogger(__name__)
    logger.debug("📝 日志系统已启动")
    if log_path is not None:
        logger.debug(f"📁 日志文件: {log_path / log_file}")

    return root_logger
