"""
数据模型模块

包含搜索引擎的全部数据结构定义
"""

from .search_models import (
    SearchConfig,
    RootList,
    DivisorClass,
    DStats,
    TwoAdicProfile,
    CandidateProgression,
    LegendreSieve,
    Solution,
    FamilyDescriptor,
    SquareHit,
    MordellPoint,
    ShardSpec,
    ShardResult,
    SearchResult,
    CheckpointState,
    RunReport,
    BoxResult,
    DeltaRecord,
    canonical_triple
)

__all__ = [
    'SearchConfig',
    'RootList',
    'DivisorClass',
    'DStats',
    'TwoAdicProfile',
    'CandidateProgression',
    'LegendreSieve',
    'Solution',
    'FamilyDescriptor',
    'SquareHit',
    'MordellPoint',
    'ShardSpec',
    'ShardResult',
    'SearchResult',
    'CheckpointState',
    'RunReport',
    'BoxResult',
    'DeltaRecord',
    'canonical_triple'
]
