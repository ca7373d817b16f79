"""JSON/CSV serialization with full round-trip precision.

All floats are emitted with repr-level precision (17 significant digits in
CSV), so re-parsing reproduces them bit for bit.  Output ordering is fully
deterministic: catalogues are sorted by perimeter, sweeps by (branch id at
the start parameter, parameter value).
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .continuation import SweepResult
from .geometry import ShapeClass, VertexEvent, VertexKind
from .solver import CriticalCatalogue, CriticalPoint


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# catalogue JSON


def point_to_dict(pt: CriticalPoint) -> dict:
    return {
        "angles": [float(a) for a in pt.config],
        "perimeter": float(pt.perimeter),
        "index": int(pt.morse_index),
        "degenerate": bool(pt.degenerate),
        "shape": pt.shape.value,
        "tangential_radius": float(pt.tangential_radius),
        "vertex_events": [
            {"kind": ev.kind.value, "residual": float(ev.residual)}
            for ev in pt.vertex_events
        ],
        "mirror_of": pt.mirror_of,
    }


def point_from_dict(d: dict) -> CriticalPoint:
    return CriticalPoint(
        config=np.asarray(d["angles"], dtype=float),
        perimeter=float(d["perimeter"]),
        gradient_norm=0.0,
        morse_index=int(d["index"]),
        degenerate=bool(d["degenerate"]),
        shape=ShapeClass(d["shape"]),
        tangential_radius=float(d["tangential_radius"]),
        vertex_events=[
            VertexEvent(VertexKind(ev["kind"]), float(ev["residual"]))
            for ev in d["vertex_events"]
        ],
        mirror_of=d.get("mirror_of"),
    )


def catalogue_to_dict(cat: CriticalCatalogue) -> dict:
    return {
        "radii": [float(r) for r in cat.radii],
        "points": [point_to_dict(p) for p in cat.points],
        "euler_sum": int(cat.euler_sum),
        "warnings": list(cat.warnings),
    }


def catalogue_from_dict(d: dict) -> CriticalCatalogue:
    points = [point_from_dict(p) for p in d["points"]]
    return CriticalCatalogue(
        radii=np.asarray(d["radii"], dtype=float),
        points=points,
        mirror_pairs=[],
        morse_counts={},
        euler_sum=int(d["euler_sum"]),
        warnings=list(d["warnings"]),
    )


# ---------------------------------------------------------------------------
# sweep CSV + events JSON

SWEEP_FIXED_COLUMNS = [
    "param", "branch_id", "perimeter", "index", "shape",
    "det_hessian", "tangential_radius",
]


def sweep_csv_header(n: int) -> list[str]:
    return SWEEP_FIXED_COLUMNS + [f"angle_{j}" for j in range(1, n)]


def sweep_to_csv(result: SweepResult) -> str:
    n = result.plan.radii.size
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(sweep_csv_header(n))
    for br in result.branches:
        for s in br.samples:
            pt = s.point
            writer.writerow(
                [_fmt(s.param), br.branch_id, _fmt(pt.perimeter), pt.morse_index,
                 pt.shape.value, _fmt(pt.hessian_det), _fmt(pt.tangential_radius)]
                + [_fmt(a) for a in pt.config]
            )
    return buf.getvalue()


@dataclass
class SweepSample:
    param: float
    branch_id: int
    perimeter: float
    index: int
    shape: str
    det_hessian: float
    tangential_radius: float
    angles: np.ndarray


def sweep_from_csv(text: str) -> dict[int, list[SweepSample]]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    n_angles = len(header) - len(SWEEP_FIXED_COLUMNS)
    branches: dict[int, list[SweepSample]] = {}
    for row in reader:
        sample = SweepSample(
            param=float(row[0]),
            branch_id=int(row[1]),
            perimeter=float(row[2]),
            index=int(row[3]),
            shape=row[4],
            det_hessian=float(row[5]),
            tangential_radius=float(row[6]),
            angles=np.array([float(v) for v in row[7:7 + n_angles]]),
        )
        branches.setdefault(sample.branch_id, []).append(sample)
    return branches


def events_to_dict(result: SweepResult) -> dict:
    return {
        "vary_index": result.plan.vary_index,
        "start": float(result.plan.start),
        "stop": float(result.plan.stop),
        "events": [
            {
                "kind": ev.kind.value,
                "param": float(ev.param),
                "branches": list(ev.branches),
                "hessian_min_eig": float(ev.hessian_min_eig),
                "detail": ev.detail,
            }
            for ev in result.events
        ],
    }


# ---------------------------------------------------------------------------
# run records


def run_record(inputs: dict, output: dict, started: float | None = None) -> dict:
    """Self-describing record of one run; round-trips losslessly through JSON."""
    return {
        "tool_version": __version__,
        "inputs": inputs,
        "output": output,
        "timing_seconds": (time.monotonic() - started) if started is not None else None,
    }
