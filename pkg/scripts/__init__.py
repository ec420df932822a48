"""
脚本模块

运行规模检查等辅助脚本
"""
