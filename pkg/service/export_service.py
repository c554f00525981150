"""
导出服务模块，负责把矩阵结果写成 CSV，并生成带校验和的清单文件。

矩阵 CSV 布局：第一行是列轴网格（ω 或 X），第一列是行轴网格（t 或 θ），
左上角单元格写轴名，例如 "t\\omega"、"theta\\X"。
"""

import hashlib
import json
import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from core.logger import get_logger
from exceptions import InvariantViolationError

logger = get_logger(__name__)

MANIFEST_NAME = "manifest.json"


def sha256_of(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def write_matrix_csv(path: str, row_axis: Sequence[float], col_axis: Sequence[float],
                     values: np.ndarray, corner: str) -> Dict[str, Any]:
    """写出带轴网格的矩阵 CSV，返回清单条目（不含 kind）"""
    values = np.asarray(values, dtype=float)
    df = pd.DataFrame(values, index=pd.Index(np.asarray(row_axis, dtype=float), name=corner),
                      columns=np.asarray(col_axis, dtype=float))
    df.to_csv(path, lineterminator="\n")
    logger.info(f"已写出 {os.path.basename(path)}（{values.shape[0]}×{values.shape[1]}）")
    return {"name": os.path.basename(path), "rows": int(values.shape[0]), "cols": int(values.shape[1])}


def read_matrix_csv(path: str) -> pd.DataFrame:
    """读回矩阵 CSV，索引为行轴，列标签为列轴"""
    df = pd.read_csv(path, index_col=0, float_precision="round_trip")
    df.columns = df.columns.astype(float)
    return df


def write_table_csv(path: str, columns: Dict[str, Sequence[float]]) -> Dict[str, Any]:
    df = pd.DataFrame(columns)
    df.to_csv(path, index=False, lineterminator="\n")
    logger.info(f"已写出 {os.path.basename(path)}（{len(df)} 行）")
    return {"name": os.path.basename(path), "rows": int(len(df)), "cols": int(len(df.columns))}


def write_json(path: str, payload: Dict[str, Any]) -> Dict[str, Any]:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    return {"name": os.path.basename(path), "rows": None, "cols": None}


def write_manifest(out_dir: str, entries: List[Dict[str, Any]],
                   invariant_report: Optional[Dict[str, Any]] = None) -> str:
    """为每个已写出的文件补上 sha256 并写出 manifest.json"""
    files = []
    for entry in entries:
        files.append({**entry, "sha256": sha256_of(os.path.join(out_dir, entry["name"]))})
    path = os.path.join(out_dir, MANIFEST_NAME)
    with open(path, "w", encoding="utf-8") as f:
        json.dump({"files": files, "invariant_report": invariant_report or {}}, f,
                  ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"清单已写出到 {path}，共 {len(files)} 个文件")
    return path


def verify_manifest(out_dir: str) -> List[str]:
    """重新计算校验和；有不一致时抛出 InvariantViolationError，否则返回已校验的文件名"""
    with open(os.path.join(out_dir, MANIFEST_NAME), "r", encoding="utf-8") as f:
        manifest = json.load(f)

    checked, mismatched = [], []
    for entry in manifest.get("files", []):
        actual = sha256_of(os.path.join(out_dir, entry["name"]))
        if actual != entry["sha256"]:
            mismatched.append(entry["name"])
        checked.append(entry["name"])

    if mismatched:
        raise InvariantViolationError("manifest-checksum", f"校验和不一致: {', '.join(mismatched)}")
    logger.info(f"清单校验通过，共 {len(checked)} 个文件")
    return checked
