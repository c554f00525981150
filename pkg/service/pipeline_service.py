"""
流水线服务模块：按配置依次执行 信号 → 解析信号 → 时频分布 → 层析图 → 熵，
写出请求的矩阵文件、摘要与清单。
"""

import math
import os
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

import settings
from const import ModulationFamily, OutputKind, SignalKind
from core.logger import get_logger
from exceptions import ConfigurationError, InvariantViolationError
from models import (
    AnalyticSignal,
    AngleGrid,
    EntropyPair,
    PipelineConfig,
    QuadratureGrid,
    SampledSignal,
    Tomogram,
    Window,
)
from processor import analytic, entropy, signal_gen, tfdist, tomography
from service import export_service
from service.import_service import export_signal, import_signal

logger = get_logger(__name__)

TF_CORNER = "t\\omega"
TOMO_CORNER = "theta\\X"


# ==================== 配置解析 ====================

def load_signal(cfg: PipelineConfig) -> SampledSignal:
    if cfg.signal is not None:
        return signal_gen.generate(cfg.signal)
    return import_signal(cfg.signal_csv)


def resolve_window(cfg: PipelineConfig, n: int) -> Optional[Window]:
    if cfg.window.kind == "none":
        return None
    if cfg.window.M is None:
        return tfdist.default_window(n)
    return tfdist.hamming_window(cfg.window.M)


def resolve_angles(cfg: PipelineConfig) -> AngleGrid:
    if cfg.angles.values is not None:
        return AngleGrid(values=cfg.angles.values)
    return tomography.default_angle_grid(cfg.angles.count)


def prepare(cfg: PipelineConfig) -> Tuple[AnalyticSignal, Optional[Window], AngleGrid, QuadratureGrid]:
    """生成或导入信号并归一化，解析窗、角度网格与 X 网格"""
    a = analytic.normalize_energy(analytic.to_analytic(load_signal(cfg)))
    window = resolve_window(cfg, a.grid.n)
    ag = resolve_angles(cfg)
    qg = cfg.quadrature or tomography.default_quadrature_grid(a, ag)
    return a, window, ag, qg


# ==================== 不变量报告 ====================

def _row_errors(T: Tomogram) -> Dict[str, float]:
    errors = np.abs(T.row_masses() - 1.0)
    return {"max_row_normalization_error": float(errors.max())}


def _moments(x: np.ndarray, density: np.ndarray, step: float) -> Tuple[float, float]:
    mean = float(np.sum(x * density) * step)
    return mean, math.sqrt(float(np.sum((x - mean) ** 2 * density) * step))


def _marginal_errors(T: Tomogram, a: AnalyticSignal, pair: EntropyPair) -> Dict[str, float]:
    """θ=0 与 θ=π/2 行相对原生时间网格与过采样频谱网格上密度的熵、均值与标准差误差"""
    qg = T.quadrature
    times, density_t = analytic.time_density(a)
    omegas, density_w = analytic.frequency_density(a, settings.SPECTRAL_OVERSAMPLING)
    marginals = [
        ("time", 0.0, times, density_t, a.grid.dt, pair.S_t),
        ("frequency", math.pi / 2, omegas, density_w, float(omegas[1] - omegas[0]), pair.S_omega),
    ]
    report = {}
    for name, theta, x, density, step, S in marginals:
        row = T.values[T.angles.index_of(theta)]
        row_mean, row_std = _moments(qg.values, row, qg.dX)
        mean, std = _moments(x, density, step)
        report[f"{name}_marginal_entropy_error"] = abs(entropy.differential_entropy(row, qg.dX) - S)
        report[f"{name}_marginal_mean_error"] = abs(row_mean - mean)
        report[f"{name}_marginal_std_error"] = abs(row_std - std)
    return report


# ==================== 主流程 ====================

def run_pipeline(cfg: PipelineConfig, workers: int = 1, output_dir: Optional[str] = None) -> Dict[str, Any]:
    """执行完整流水线，返回写入 summary.json 的摘要"""
    out_dir = output_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    outputs = set(cfg.outputs)
    logger.info(f"流水线开始，输出目录 {out_dir}")

    a, window, ag, qg = prepare(cfg)
    pair = entropy.entropy_pair(a)
    entries: List[Dict[str, Any]] = []
    report: Dict[str, Any] = {"grid": a.grid.model_dump(), "quadrature": qg.model_dump(),
                              "angles": len(ag), "window": window.id if window else None}

    def write_matrix(name: str, kind: OutputKind, rows, cols, values, corner):
        entry = export_service.write_matrix_csv(os.path.join(out_dir, name), rows, cols, values, corner)
        entries.append({**entry, "kind": kind.value})

    need_diff = OutputKind.DIFF in outputs
    need_direct = outputs & {OutputKind.TOMOGRAM_DIRECT, OutputKind.ENTROPY} or need_diff
    need_radon = OutputKind.TOMOGRAM_RADON in outputs or need_diff
    need_pwvd = window is not None and (OutputKind.PWVD in outputs or need_radon or need_diff)
    need_wvd = OutputKind.WVD in outputs or need_diff or (need_radon and window is None)

    W = Wp = T_direct = T_radon = None
    if need_wvd:
        W = tfdist.wvd(a, workers=workers)
        report["wvd_normalization"] = W.total()
        if OutputKind.WVD in outputs:
            write_matrix("wvd.csv", OutputKind.WVD, W.time_grid.times, W.freq_grid.omegas, W.values, TF_CORNER)
    if need_pwvd:
        Wp = tfdist.pseudo_wvd(a, window, workers=workers)
        report["pwvd_normalization"] = Wp.total()
        if OutputKind.PWVD in outputs:
            write_matrix("pwvd.csv", OutputKind.PWVD, Wp.time_grid.times, Wp.freq_grid.omegas, Wp.values,
                         TF_CORNER)

    if need_direct:
        T_direct = tomography.tomogram_direct(a, ag, qg, workers=workers)
        report["direct"] = {**_row_errors(T_direct), **_marginal_errors(T_direct, a, pair)}
        if OutputKind.TOMOGRAM_DIRECT in outputs:
            write_matrix("tomo_direct.csv", OutputKind.TOMOGRAM_DIRECT, ag.values, qg.values, T_direct.values,
                         TOMO_CORNER)
    if need_radon:
        T_radon = tomography.tomogram_from_tfd(Wp if Wp is not None else W, ag, qg, workers=workers)
        report[T_radon.source.value] = {**_row_errors(T_radon), **_marginal_errors(T_radon, a, pair)}
        if OutputKind.TOMOGRAM_RADON in outputs:
            name = "tomo_pseudo.csv" if Wp is not None else "tomo_radon.csv"
            write_matrix(name, OutputKind.TOMOGRAM_RADON, ag.values, qg.values, T_radon.values, TOMO_CORNER)

    if need_diff:
        if W is not None and Wp is not None:
            D = tfdist.distribution_difference(W, Wp)
            report["diff_tf_max_ratio"] = float(D.values.max() / np.abs(W.values).max())
            write_matrix("diff_tf.csv", OutputKind.DIFF, D.time_grid.times, D.freq_grid.omegas, D.values,
                         TF_CORNER)
        D_tomo = tomography.tomogram_difference(T_direct, T_radon)
        report["diff_tomo_max_ratio"] = float(D_tomo.values.max() / T_direct.values.max())
        write_matrix("diff_tomo.csv", OutputKind.DIFF, ag.values, qg.values, D_tomo.values, TOMO_CORNER)

    if OutputKind.ENTROPY in outputs:
        report["entropy"] = _entropy_outputs(pair, T_direct, T_radon, out_dir, entries)

    if OutputKind.SURFACE in outputs:
        surface_entry, surface_report = _surface_outputs(cfg, ag, out_dir, workers)
        entries.append(surface_entry)
        report["surface"] = surface_report

    entries.append({**export_service.write_json(os.path.join(out_dir, "summary.json"), report), "kind": "summary"})
    export_service.write_manifest(out_dir, entries, report)
    logger.info("流水线完成")
    return report


def _entropy_outputs(pair: EntropyPair, T_direct: Tomogram, T_radon: Optional[Tomogram], out_dir: str,
                     entries: List[Dict[str, Any]]) -> Dict[str, Any]:
    profile = entropy.tomographic_entropy(T_direct)
    direct_report = entropy.uncertainty_report(profile)
    result: Dict[str, Any] = {
        "S_t": pair.S_t,
        "S_omega": pair.S_omega,
        "slack": pair.slack,
        "bound": settings.ENTROPY_BOUND,
        "direct": direct_report,
    }
    if pair.slack < -settings.ENTROPY_SLACK:
        raise InvariantViolationError("entropic-bound", f"S_t + S_ω 余量 {pair.slack:.4f} 低于 −{settings.ENTROPY_SLACK}")
    if direct_report.get("pairs") and direct_report["min_slack"] < -settings.ENTROPY_SLACK:
        raise InvariantViolationError(
            "tomographic-entropic-bound",
            f"θ={direct_report['worst_theta']:.6g} 处 S(θ)+S(θ+π/2) 余量 {direct_report['min_slack']:.4f}",
        )

    columns = {"theta": profile.angles.values, "S_direct": profile.values}
    if T_radon is not None:
        radon_profile = entropy.tomographic_entropy(T_radon)
        # 伪分布路线只报告，不作断言
        result[T_radon.source.value] = entropy.uncertainty_report(radon_profile)
        columns[f"S_{T_radon.source.value.replace('-', '_')}"] = radon_profile.values
    entry = export_service.write_table_csv(os.path.join(out_dir, "entropy.csv"), columns)
    entries.append({**entry, "kind": OutputKind.ENTROPY.value})
    return result


def _surface_outputs(cfg: PipelineConfig, ag: AngleGrid, out_dir: str,
                     workers: int) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    family = cfg.surface.family
    expected = SignalKind.AM if family == ModulationFamily.AM else SignalKind.FM
    if cfg.signal is None or cfg.signal.kind != expected:
        raise ConfigurationError(f"{family.value} 曲面需要 kind='{expected.value}' 的基准信号")
    base = cfg.signal.params
    if cfg.surface.values is not None:
        parameters = np.asarray(cfg.surface.values, dtype=float)
    else:
        parameters = signal_gen.default_sweep(family, base, cfg.surface.points)
    window = resolve_window(cfg, cfg.signal.grid.n) or tfdist.default_window(cfg.signal.grid.n)

    surface = entropy.entropy_surface(family, base, parameters, ag, qg=cfg.quadrature, grid=cfg.signal.grid,
                                      window=window, workers=workers)
    name = f"surface_{family.value}.csv"
    corner = f"{surface.parameter_name}\\theta"
    entry = export_service.write_matrix_csv(os.path.join(out_dir, name), surface.parameters, ag.values,
                                            surface.values, corner)

    pairs = entropy.complement_pairs(ag)
    min_slack = None
    if pairs:
        sums = np.array([[row[i] + row[j] for i, j in pairs] for row in surface.values])
        min_slack = float(sums.min() - settings.ENTROPY_BOUND)
    jumps = np.abs(np.diff(surface.values, axis=0))
    report = {
        "family": family.value,
        "parameters": int(parameters.size),
        "min_slack": min_slack,
        "max_row_jump": float(jumps.max()) if jumps.size else 0.0,
    }
    return {**entry, "kind": OutputKind.SURFACE.value}, report


def run_surface(cfg: PipelineConfig, workers: int = 1, output_dir: Optional[str] = None) -> Dict[str, Any]:
    """只计算熵曲面（entropy-surface 子命令）"""
    if cfg.surface is None:
        raise ConfigurationError("配置中缺少 surface 部分")
    out_dir = output_dir or cfg.output_dir
    os.makedirs(out_dir, exist_ok=True)
    ag = resolve_angles(cfg)
    entry, report = _surface_outputs(cfg, ag, out_dir, workers)
    export_service.write_manifest(out_dir, [entry], {"surface": report})
    return report


def run_gen(cfg_signal, output_dir: str) -> str:
    """生成信号并写出 signal.csv（gen 子命令）"""
    os.makedirs(output_dir, exist_ok=True)
    signal = signal_gen.generate(cfg_signal)
    path = os.path.join(output_dir, "signal.csv")
    export_signal(signal, path)
    export_service.write_manifest(output_dir, [{"name": "signal.csv", "kind": "signal", "rows": signal.grid.n,
                                                "cols": 2}])
    return path
