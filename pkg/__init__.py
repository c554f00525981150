"""
TF Tomography - 信号的光学时频层析图与熵不确定关系计算工具。
"""
