"""
Utilities Module
================

File formats of the package.

Functions
---------
write_covariance(path, V, t):
    Write a covariance matrix in the plain-text matrix format.
read_covariance(path):
    Read it back.
write_table(table, path, fmt):
    Write a result table as CSV, JSON lines or an SQLite table.

Result tables carry the schema version of their column layout.

The plain-text matrix format is a header line ``dim t`` followed by one
row per line, entries separated by single spaces, every number printed
with 17 significant digits.
"""

import json
import os
import sys
from typing import Optional, Tuple

import numpy as np
import pandas as pd
import sqlalchemy

from chain_equilibrium.config import (
    FLOAT_FORMAT,
    SCHEMA_COLUMN,
    SCHEMA_VERSION,
)
from chain_equilibrium.exceptions import ParameterError
from chain_equilibrium.logger_config import logger


def _format(value: float) -> str:
    return FLOAT_FORMAT % value


def write_covariance(path: str, V: np.ndarray, t: float = 0.0) -> None:
    """
    Write a covariance matrix in the plain-text matrix format.

    Parameters
    ----------
    path : str
        Destination file.
    V : np.ndarray
        Square matrix.
    t : float
        Time stamp written in the header.
    """
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise ParameterError(f"expected a square matrix, got {V.shape}")
    lines = [f"{V.shape[0]} {_format(t)}"]
    lines.extend(" ".join(_format(x) for x in row) for row in V)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def read_covariance(path: str) -> Tuple[np.ndarray, float]:
    """
    Read a matrix written by :func:`write_covariance`.

    Returns
    -------
    tuple
        (matrix, t).

    Raises
    ------
    ParameterError
        If the header and the body disagree.
    """
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().split()
        body = np.loadtxt(handle, ndmin=2)
    if len(header) != 2:
        raise ParameterError(f"malformed header in {path}")
    dim, t = int(header[0]), float(header[1])
    if body.shape != (dim, dim):
        raise ParameterError(
            f"{path}: header says {dim}x{dim}, body is {body.shape}"
        )
    return body, t


def _json_value(value):
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        # json has no inf/nan literals
        return value if np.isfinite(value) else repr(value)
    return value


def write_table(
    table: pd.DataFrame, path: Optional[str] = None, fmt: str = "csv"
) -> None:
    """
    Write a result table.

    Parameters
    ----------
    table : pd.DataFrame
        The result table; column order is preserved.
    path : str, optional
        Destination; standard output when empty (csv and json only).
    fmt : str
        "csv" (17 significant digits), "json" (one object per line) or
        "sqlite" (table ``results`` plus a ``schema`` row with the schema
        version, both replaced on rewrite). csv and json rows end with a
        ``schema_version`` column.
    """
    if fmt in ("csv", "json"):
        table = table.assign(**{SCHEMA_COLUMN: SCHEMA_VERSION})
    if fmt == "csv":
        text = table.to_csv(index=False, float_format=FLOAT_FORMAT)
    elif fmt == "json":
        records = table.to_dict(orient="records")
        text = "".join(
            json.dumps({k: _json_value(v) for k, v in record.items()})
            + "\n"
            for record in records
        )
    elif fmt == "sqlite":
        if not path:
            raise ParameterError("sqlite output needs a file path")
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        engine = sqlalchemy.create_engine(f"sqlite:///{path}")
        table.to_sql("results", engine, if_exists="replace", index=False)
        pd.DataFrame({"schema_version": [SCHEMA_VERSION]}).to_sql(
            "schema", engine, if_exists="replace", index=False
        )
        engine.dispose()
        logger.info(f"Wrote {len(table)} rows to {path}")
        return
    else:
        raise ParameterError(f"unknown output format {fmt!r}")

    if path:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        logger.info(f"Wrote {len(table)} rows to {path}")
    else:
        sys.stdout.write(text)
