"""
三立方和搜索应用模块
"""
