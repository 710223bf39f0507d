"""
JSON and CSV emission for suite reports, sweeps, radial tables and covariogram grids.
"""

import json
import logging
import math
import sys
from typing import Any, Dict, List, Optional

import pandas as pd

logger = logging.getLogger(__name__)

REPORT_FIELDS = ["name", "status", "lhs", "rhs", "margin", "tolerance", "runtime_ms", "details"]
FLOAT_FORMAT = "%.12g"


def _clean(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def write_json_report(records: List[Dict[str, Any]], path: Optional[str] = None) -> None:
    """Write report records as a JSON array; non-finite numbers become null."""
    payload = [{field: _clean(record.get(field)) for field in REPORT_FIELDS} for record in records]
    text = json.dumps(payload, indent=2, allow_nan=False) + "\n"
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
    logger.info("wrote %d report records to %s", len(records), path)


def reports_to_frame(records: List[Dict[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame(records, columns=REPORT_FIELDS)


def write_table(frame: pd.DataFrame, path: Optional[str] = None) -> None:
    """CSV with '.' decimals and 12 significant digits; standard output when path is None."""
    if path is None:
        frame.to_csv(sys.stdout, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("wrote %d rows to %s", len(frame), path)
