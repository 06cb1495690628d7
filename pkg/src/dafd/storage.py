"""Persistence: decomposition files, CSV tables, and signal ingestion.

Decompositions are stored as JSON with coefficients split into real and
imaginary parts; floats survive the round trip bit-exactly because the
encoder emits shortest round-trip representations.  CSV numbers are
written with 17 significant digits so repeated runs produce identical
bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .engine import Decomposition, DecompositionTerm, EngineConfig
from .errors import ContractError, SchemaError

SCHEMA_VERSION = 1

_GRID_UNIFORMITY_REL = 1e-9


def fmt(value: float) -> str:
    """Fixed 17-significant-digit decimal form used in all CSV output."""
    return f"{float(value):.17g}"


def decomposition_to_dict(d: Decomposition, source: dict | None = None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "mode": d.mode,
        "n_samples": d.config.n_samples,
        "r_max": d.config.r_max,
        "source": source or {},
        "source_norm2": d.source_norm2,
        "terms": [
            {
                "re_a": t.a.real,
                "im_a": t.a.imag,
                "re_c": t.c.real,
                "im_c": t.c.imag,
                "residual_energy_after": t.residual_energy_after,
                "leakage": t.leakage,
            }
            for t in d.terms
        ],
        "diagnostics": [
            str(x) for t in d.terms for x in t.diagnostics
        ] + [str(x) for x in d.diagnostics],
    }


def decomposition_from_dict(data: dict) -> tuple[Decomposition, dict]:
    if not isinstance(data, dict) or data.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(
            f"unsupported decomposition schema: {data.get('schema_version')!r} "
            f"(expected {SCHEMA_VERSION})"
        )
    config = EngineConfig(n_samples=int(data["n_samples"]), r_max=float(data["r_max"]))
    terms = [
        DecompositionTerm(
            a=complex(t["re_a"], t["im_a"]),
            c=complex(t["re_c"], t["im_c"]),
            residual_energy_after=float(t["residual_energy_after"]),
            leakage=float(t["leakage"]),
        )
        for t in data["terms"]
    ]
    d = Decomposition(
        mode=str(data["mode"]),
        terms=terms,
        source_norm2=float(data["source_norm2"]),
        config=config,
        diagnostics=list(data.get("diagnostics", [])),
    )
    return d, data.get("source", {})


def save_decomposition(path, d: Decomposition, source: dict | None = None):
    payload = decomposition_to_dict(d, source)
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def load_decomposition(path) -> tuple[Decomposition, dict]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not a decomposition file: {exc}") from exc
    return decomposition_from_dict(data)


def write_csv(path, header, rows):
    """Write rows of floats/ints/strings with fixed float formatting."""
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, (int, np.integer)):
                cells.append(str(int(cell)))
            elif isinstance(cell, (float, np.floating)):
                cells.append(fmt(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def read_signal_csv(path) -> np.ndarray:
    """Load one- or two-column CSV samples on a uniform grid.

    Two columns are read as (t, value); the t spacing must be uniform to
    within 1e-9 relative.  A header row is skipped if present.
    """
    text = Path(path).read_text()
    rows = []
    for line_no, line in enumerate(text.splitlines()):
        line = line.strip()
        if not line:
            continue
        cells = line.split(",")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            if line_no == 0:
                continue  # header row
            raise ContractError(f"cannot parse CSV line {line_no + 1}: {line!r}")
    if not rows:
        raise ContractError("empty input CSV")
    widths = {len(r) for r in rows}
    if widths not in ({1}, {2}):
        raise ContractError("input CSV must have one or two columns")
    data = np.asarray(rows, dtype=np.float64)
    if data.shape[1] == 2:
        t = data[:, 0]
        spacing = np.diff(t)
        if spacing.size == 0 or np.any(spacing <= 0):
            raise ContractError("time column must be strictly increasing")
        h = spacing.mean()
        if np.max(np.abs(spacing - h)) > _GRID_UNIFORMITY_REL * abs(h):
            raise ContractError("time column is not a uniform grid")
        values = data[:, 1]
    else:
        values = data[:, 0]
    return values
