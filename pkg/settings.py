# settings.py

import math
import os


# 项目根目录（使用绝对路径，避免因工作目录变化导致日志写到别处）
BASE_DIR = os.path.dirname(os.path.abspath(__file__))


# 日志配置
LOG_LEVEL = "INFO"  # 日志级别
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"  # 日志格式
LOG_DIR = os.path.join(BASE_DIR, "logs")  # 日志目录


# 默认时间网格：t ∈ [0, 200)，2048 个采样点
DEFAULT_T_START = 0.0
DEFAULT_T_SPAN = 200.0
DEFAULT_N = 2048


# 默认角度网格：θ_k = kπ/180，k = 0..180
DEFAULT_ANGLE_COUNT = 181

# 退化角阈值（弧度），|sinθ| 低于该值时改用边缘分布
DEGENERATE_ANGLE_EPS = 1e-3


# 频谱过采样倍数（时域补零），用于熵与层析图
SPECTRAL_OVERSAMPLING = 4

# 支撑区间的尾部质量阈值，用于确定默认 X 网格
SUPPORT_TAIL = 1e-10

# 默认 X 网格两侧留白比例
QUADRATURE_PADDING = 0.1
# 默认 X 网格的最大点数，超过时降低分辨率并给出警告
MAX_QUADRATURE_POINTS = 1 << 18


# Radon 投影：裁剪 W 时舍弃的尾部绝对质量比例
RADON_CROP_TAIL = 1e-6
# 网格边界上的绝对质量比例超过该值时给出 "truncated projection" 警告
RADON_EDGE_FRACTION = 1e-6
# 投影线上每步最多走过的网格单元数（索引空间）
RADON_STEP_CELLS = 0.5
# 单次插值的最大采样点数，超过后按 X 分块
RADON_CHUNK_POINTS = 2_000_000


# 数值容差
TOMOGRAM_NORMALIZATION_TOL = 1e-3    # 每个 θ 行 Σ𝒯·dX 与 1 的偏差
DENSITY_NORMALIZATION_TOL = 1e-2     # 微分熵输入密度的积分偏差
ENERGY_NORMALIZATION_TOL = 1e-9      # 解析信号能量归一化
WVD_NORMALIZATION_TOL = 1e-2         # (1/2π)∬W dt dω 与 1 的偏差
REALNESS_TOL = 1e-9                  # WVD 虚部残差（相对最大值）
NEGATIVITY_TOL = 1e-9                # 层析图非负性（相对最大值）
ENTROPY_SLACK = 0.02                 # 熵不等式允许的离散化松弛（nat）


# 熵的下界 ln(πe)
ENTROPY_BOUND = math.log(math.pi * math.e)


# 调制参数扫描默认值
DEFAULT_SWEEP_POINTS = 21
FM_MAX_DEVIATION_RATIO = 5.0  # ω_d 扫描上限为 Ω 的倍数


# 并发：<=1 时串行执行，0 表示自动（CPU 核数）
DEFAULT_WORKERS = 1
