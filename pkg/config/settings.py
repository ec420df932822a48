from functools import lru_cache

from pydantic_settings import BaseSettings
from pydantic import Field


class SearchSettings(BaseSettings):
    """搜索引擎配置类

    所有字段都可以通过 CUBESEARCH_ 前缀的环境变量或 .env 文件覆盖，
    例如 CUBESEARCH_MEM_MB=128。
    """

    # 筛表内存上限
    mem_mb: int = Field(default=64, ge=1, description="主筛掩码表内存上限（MB）")

    # 筛参数 P = c·lnln B·lnlnln B
    sieve_constant: float = Field(default=3.0, gt=0, description="辅助模数 P 公式中的常数")
    min_sieve_prime_cutoff: int = Field(default=7, ge=5, description="P 的下限")
    secondary_count: int = Field(default=3, ge=0, description="P 之上的次级筛素数个数")

    # 分片与并行
    large_prime_shard_size: int = Field(default=512, ge=1, description="每个大素数分片包含的外层素数个数")
    threads: int = Field(default=1, ge=1, description="默认工作进程数")

    # 日志
    log_level: str = Field(default="INFO", description="日志级别")
    log_dir: str = Field(default="logs", description="日志目录")
    log_file: str = Field(default="cubesearch.log", description="日志文件名")

    @property
    def mask_budget_bytes(self) -> int:
        """主筛掩码允许占用的字节数（numpy 布尔数组每个剩余类 1 字节）"""
        return self.mem_mb * 1024 * 1024

    model_config = {
        "env_prefix": "CUBESEARCH_",
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "extra": "ignore"  # 忽略额外的环境变量
    }


class AppConfig(BaseSettings):
    """应用配置类"""

    app_name: str = Field(default="cubesearch", description="应用名称")
    version: str = Field(default="1.0.0", description="版本号")

    model_config = {
        "env_prefix": "CUBESEARCH_",
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "extra": "ignore"
    }


@lru_cache(maxsize=1)
def get_search_settings() -> SearchSettings:
    """全局搜索配置（首次使用时读取环境变量，格式错误时抛出 ValidationError）"""
    return SearchSettings()


# 全局配置实例
app_config = AppConfig()
