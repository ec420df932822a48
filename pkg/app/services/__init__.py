"""
服务模块

除数类枚举、候选过滤、搜索编排、检查点、工作池与暴力参照
"""
