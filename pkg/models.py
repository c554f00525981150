# models.py

import math
from typing import Any, List, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

import settings
from const import DistributionKind, ModulationFamily, OutputKind, SignalKind, TomogramSource
from core.logger import get_logger

logger = get_logger(__name__)

# Pydantic模型用于数据校验和结构化


def _frozen_array(value: Any, dtype) -> np.ndarray:
    """复制为只读 numpy 数组"""
    arr = np.array(value, dtype=dtype)
    arr.setflags(write=False)
    return arr


# ==================== 网格 ====================

class TimeGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    t_start: float = Field(0.0, allow_inf_nan=False)
    dt: float = Field(..., gt=0, allow_inf_nan=False)
    n: int = Field(..., ge=2)

    @classmethod
    def from_span(cls, t_start: float, span: float, n: int) -> "TimeGrid":
        """按区间长度构造网格，点为 t_start + k·span/n"""
        return cls(t_start=t_start, dt=span / n, n=n)

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n)


class FrequencyGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega_start: float = Field(0.0, allow_inf_nan=False)
    d_omega: float = Field(..., gt=0, allow_inf_nan=False)
    n_omega: int = Field(..., ge=2)

    @property
    def omegas(self) -> np.ndarray:
        return self.omega_start + self.d_omega * np.arange(self.n_omega)


class QuadratureGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    X_start: float = Field(..., allow_inf_nan=False)
    dX: float = Field(..., gt=0, allow_inf_nan=False)
    n_X: int = Field(..., ge=2)

    @property
    def values(self) -> np.ndarray:
        return self.X_start + self.dX * np.arange(self.n_X)

    @property
    def edges(self) -> np.ndarray:
        """每个 X 单元的边界，长度 n_X + 1"""
        return self.X_start + self.dX * (np.arange(self.n_X + 1) - 0.5)

    def refined(self, factor: int = 2) -> "QuadratureGrid":
        """把每个单元等分为 factor 份，单元边界保持嵌套"""
        if factor < 1:
            raise ValueError(f"细分倍数 {factor} 必须 ≥ 1")
        dX = self.dX / factor
        return QuadratureGrid(X_start=self.X_start - 0.5 * self.dX + 0.5 * dX, dX=dX, n_X=self.n_X * factor)


class AngleGrid(BaseModel):
    """角度网格，0 与 π/2 始终包含在内"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray

    @field_validator("values", mode="before")
    @classmethod
    def _with_marginal_angles(cls, v):
        arr = np.asarray(v, dtype=float).ravel()
        if not np.all(np.isfinite(arr)):
            raise ValueError("角度必须为有限值")
        # 贴近 0、π/2、π 的角度对齐到精确值，避免重复
        for special in (0.0, math.pi / 2, math.pi):
            arr[np.abs(arr - special) <= 1e-12] = special
        arr = np.unique(np.concatenate([arr, [0.0, math.pi / 2]]))
        if arr[0] < 0.0 or arr[-1] > math.pi:
            raise ValueError("角度必须位于 [0, π] 内")
        return _frozen_array(arr, float)

    def __len__(self) -> int:
        return int(self.values.size)

    def index_of(self, theta: float, atol: float = 1e-12) -> Optional[int]:
        hits = np.flatnonzero(np.abs(self.values - theta) <= atol)
        return int(hits[0]) if hits.size else None


# ==================== 信号参数 ====================

class ChirpParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    A: float = Field(..., allow_inf_nan=False)
    phi0: float = 0.0
    alpha: float = Field(..., ge=0, allow_inf_nan=False)
    t0: float = 0.0
    omega: float = Field(..., allow_inf_nan=False)


class AMParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega: float = Field(..., allow_inf_nan=False)
    phi0: float = 0.0
    m: float = Field(..., allow_inf_nan=False)
    Omega: float = Field(..., gt=0, allow_inf_nan=False)

    @model_validator(mode="after")
    def _warn_overmodulation(self):
        if abs(self.m) > 1:
            logger.warning(f"调制系数 |m|={abs(self.m)} 大于 1，包络将过零（过调制）")
        return self


class FMParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    A: float = Field(1.0, allow_inf_nan=False)
    omega0: float = Field(..., allow_inf_nan=False)
    omega_d: float = Field(..., ge=0, allow_inf_nan=False)
    phi0: float = 0.0
    Omega: float = Field(..., gt=0, allow_inf_nan=False)


class GaussianParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    t0: float = Field(..., allow_inf_nan=False)
    sigma: float = Field(..., gt=0, allow_inf_nan=False)
    omega: float = Field(0.0, allow_inf_nan=False)  # 载频，0 表示基带脉冲


SignalParams = Union[ChirpParams, AMParams, FMParams, GaussianParams]

PARAMS_BY_KIND = {
    SignalKind.CHIRP: ChirpParams,
    SignalKind.AM: AMParams,
    SignalKind.FM: FMParams,
    SignalKind.GAUSSIAN: GaussianParams,
}


class SignalConfig(BaseModel):
    """信号配置：{"kind": ..., "params": {...}, "grid": {...}}"""
    model_config = ConfigDict(frozen=True)

    kind: SignalKind
    params: SignalParams
    grid: TimeGrid

    @model_validator(mode="before")
    @classmethod
    def _typed_params(cls, data):
        if isinstance(data, dict) and "kind" in data and isinstance(data.get("params"), dict):
            params_cls = PARAMS_BY_KIND[SignalKind(data["kind"])]
            data = {**data, "params": params_cls.model_validate(data["params"])}
        return data


# ==================== 信号与分布 ====================

class SampledSignal(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: TimeGrid
    samples: np.ndarray

    @field_validator("samples", mode="before")
    @classmethod
    def _real_samples(cls, v):
        arr = np.asarray(v)
        if np.iscomplexobj(arr):
            raise ValueError("SampledSignal 只接受实数采样")
        arr = _frozen_array(arr, float).ravel()
        if not np.all(np.isfinite(arr)):
            raise ValueError("采样值必须为有限值")
        return arr

    @model_validator(mode="after")
    def _length_matches_grid(self):
        if self.samples.size != self.grid.n:
            raise ValueError(f"采样长度 {self.samples.size} 与网格点数 {self.grid.n} 不一致")
        return self


class AnalyticSignal(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: TimeGrid
    samples: np.ndarray
    normalized: bool = False

    @field_validator("samples", mode="before")
    @classmethod
    def _complex_samples(cls, v):
        arr = _frozen_array(v, complex).ravel()
        if not np.all(np.isfinite(arr)):
            raise ValueError("采样值必须为有限值")
        return arr

    @model_validator(mode="after")
    def _length_matches_grid(self):
        if self.samples.size != self.grid.n:
            raise ValueError(f"采样长度 {self.samples.size} 与网格点数 {self.grid.n} 不一致")
        return self

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2) * self.grid.dt)


class Window(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    M: int = Field(..., ge=1)
    taps: np.ndarray

    @field_validator("taps", mode="before")
    @classmethod
    def _taps(cls, v):
        return _frozen_array(v, float).ravel()

    @model_validator(mode="after")
    def _symmetric_odd(self):
        if self.M % 2 == 0 or self.taps.size != self.M:
            raise ValueError("窗长必须为奇数且与抽头数一致")
        if not np.allclose(self.taps, self.taps[::-1], rtol=0, atol=1e-15):
            raise ValueError("窗函数必须对称")
        if np.max(self.taps) > 1 + 1e-12:
            raise ValueError("窗函数最大值不能超过 1")
        return self

    @property
    def id(self) -> str:
        return f"{self.name}-{self.M}"


class TFDistribution(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    time_grid: TimeGrid
    freq_grid: FrequencyGrid
    values: np.ndarray
    kind: DistributionKind
    window: Optional[str] = None

    @field_validator("values", mode="before")
    @classmethod
    def _values(cls, v):
        arr = _frozen_array(v, float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("分布值必须为有限实数")
        return arr

    @model_validator(mode="after")
    def _shape(self):
        if self.values.shape != (self.time_grid.n, self.freq_grid.n_omega):
            raise ValueError(f"分布矩阵形状 {self.values.shape} 与网格不一致")
        return self

    def total(self) -> float:
        """(1/2π)·ΣΣ W·dt·dω"""
        return float(self.values.sum() * self.time_grid.dt * self.freq_grid.d_omega / (2 * math.pi))


class Tomogram(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    angles: AngleGrid
    quadrature: QuadratureGrid
    values: np.ndarray
    source: TomogramSource
    window: Optional[str] = None

    @field_validator("values", mode="before")
    @classmethod
    def _values(cls, v):
        arr = _frozen_array(v, float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("层析图必须为有限实数")
        return arr

    @model_validator(mode="after")
    def _shape(self):
        if self.values.shape != (len(self.angles), self.quadrature.n_X):
            raise ValueError(f"层析图矩阵形状 {self.values.shape} 与网格不一致")
        return self

    @property
    def id(self) -> str:
        return self.source.value if self.window is None else f"{self.source.value}({self.window})"

    def row_masses(self) -> np.ndarray:
        return self.values.sum(axis=1) * self.quadrature.dX


# ==================== 熵 ====================

class EntropyProfile(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    angles: AngleGrid
    values: np.ndarray
    source: str

    @field_validator("values", mode="before")
    @classmethod
    def _values(cls, v):
        arr = _frozen_array(v, float).ravel()
        if not np.all(np.isfinite(arr)):
            raise ValueError("熵值必须为有限值")
        return arr

    @model_validator(mode="after")
    def _length(self):
        if self.values.size != len(self.angles):
            raise ValueError("熵剖面长度与角度网格不一致")
        return self


class EntropyPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    S_t: float
    S_omega: float

    @property
    def total(self) -> float:
        return self.S_t + self.S_omega

    @property
    def slack(self) -> float:
        return self.total - settings.ENTROPY_BOUND


class EntropySurface(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    angles: AngleGrid
    parameters: np.ndarray
    values: np.ndarray
    family: ModulationFamily
    parameter_name: str

    @field_validator("parameters", "values", mode="before")
    @classmethod
    def _arrays(cls, v):
        arr = _frozen_array(v, float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("熵曲面必须为有限值")
        return arr

    @model_validator(mode="after")
    def _shape(self):
        if self.values.shape != (self.parameters.size, len(self.angles)):
            raise ValueError("熵曲面形状与参数/角度网格不一致")
        return self


# ==================== 流水线配置 ====================

class WindowSpec(BaseModel):
    kind: str = "hamming"  # hamming | none
    M: Optional[int] = None

    @model_validator(mode="after")
    def _check(self):
        if self.kind not in ("hamming", "none"):
            raise ValueError(f"未知窗函数类型 '{self.kind}'")
        if self.kind == "none" and self.M is not None:
            raise ValueError("kind=none 时不能指定 M")
        return self


class AngleGridSpec(BaseModel):
    count: Optional[int] = Field(None, ge=2)
    values: Optional[List[float]] = None

    @model_validator(mode="after")
    def _one_of(self):
        if self.count is not None and self.values is not None:
            raise ValueError("count 与 values 只能指定一个")
        return self


class SurfaceSpec(BaseModel):
    family: ModulationFamily
    values: Optional[List[float]] = None
    points: int = Field(21, ge=1)


class PipelineConfig(BaseModel):
    signal: Optional[SignalConfig] = None
    signal_csv: Optional[str] = None
    window: WindowSpec = WindowSpec()
    angles: AngleGridSpec = AngleGridSpec()
    quadrature: Optional[QuadratureGrid] = None
    outputs: List[OutputKind]
    output_dir: str = "out"
    surface: Optional[SurfaceSpec] = None

    @model_validator(mode="after")
    def _check(self):
        if not self.outputs:
            raise ValueError("至少需要请求一个输出")
        if self.window.kind == "none" and OutputKind.PWVD in self.outputs:
            raise ValueError("请求 pwvd 输出时窗函数不能为 none")
        if (self.signal is None) == (self.signal_csv is None):
            raise ValueError("signal 与 signal_csv 必须且只能指定一个")
        if OutputKind.SURFACE in self.outputs:
            if self.surface is None:
                raise ValueError("请求 surface 输出时必须提供 surface 配置")
            expected = SignalKind.AM if self.surface.family == ModulationFamily.AM else SignalKind.FM
            if self.signal is None or self.signal.kind != expected:
                raise ValueError(f"{self.surface.family.value} 曲面需要 kind='{expected.value}' 的基准信号")
        return self
