"""
CSV and manifest output for scenario runs
"""

import json
import platform
from pathlib import Path
from typing import Any, Dict

import numpy as np
import pandas as pd
import pydantic
import scipy

from config.enums import SYSTEM_CONSTANTS
from config.logging_config import get_logger

logger = get_logger(__name__)


def write_table(frame: pd.DataFrame, path: Path) -> Path:
    """Write a table with 17 significant digits and fixed line endings"""
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(
        path,
        index=False,
        float_format=SYSTEM_CONSTANTS["CSV_FLOAT_FORMAT"],
        lineterminator="\n",
        na_rep="",
    )
    logger.debug(f"Wrote {len(frame)} rows to {path}")
    return path


def package_versions() -> Dict[str, str]:
    return {
        "mtlc": SYSTEM_CONSTANTS["VERSION"],
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "pydantic": pydantic.VERSION,
    }


def _json_default(value: Any):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def write_manifest(manifest: Dict[str, Any], out_dir: Path) -> Path:
    """Resolved config plus provenance; accepted again by the runner"""
    path = out_dir / SYSTEM_CONSTANTS["MANIFEST_NAME"]
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True, default=_json_default)
        handle.write("\n")
    return path
