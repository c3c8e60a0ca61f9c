# invlab/utils/reports.py

import json
import logging
from pathlib import Path
from typing import Iterable, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from invlab import __version__
from invlab.schemas.scenario import CheckOut, RunSummaryOut

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12g"


def metadata_line(config_hash: str) -> str:
    return f"# invlab {__version__} config={config_hash}"


def _plain(value):
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return f"{value.real:.12g}{value.imag:+.12g}j"
    if isinstance(value, (tuple, list, np.ndarray)):
        return " ".join(f"{float(v):.12g}" for v in np.ravel(value))
    return value


def write_csv(path: Path, rows: Iterable[Mapping], config_hash: str,
              columns: Optional[Sequence[str]] = None) -> Path:
    """Header row, one line per record, then the metadata trailer."""
    records = [{k: _plain(v) for k, v in row.items()} for row in rows]
    frame = pd.DataFrame.from_records(records, columns=list(columns) if columns else None)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    path.write_text(body + metadata_line(config_hash) + "\n")
    logger.debug("Wrote %d rows to %s", len(records), path)
    return path


def read_csv(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def write_summary(path: Path, scenario: str, seed: int, config_hash: str, checks: List[CheckOut],
                  extra: Optional[dict] = None) -> RunSummaryOut:
    summary = RunSummaryOut(
        version=__version__,
        config_hash=config_hash,
        scenario=scenario,
        seed=seed,
        status="PASS" if all(c.passed for c in checks) else "FAIL",
        checks=checks,
        extra=json.loads(json.dumps(extra or {}, default=_plain)),
    )
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(summary.model_dump_json(indent=2) + "\n")
    return summary


def status_line(check: CheckOut) -> str:
    mark = "✅ PASS" if check.passed else "❌ FAIL"
    return f"{mark} {check.name}" + (f" ({check.detail})" if check.detail else "")
