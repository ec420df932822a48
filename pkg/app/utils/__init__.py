"""
工具模块

领域异常与结果输出格式
"""
