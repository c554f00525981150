"""
服务模块包，包含配置读取、信号导入、流水线与结果导出服务。
"""
