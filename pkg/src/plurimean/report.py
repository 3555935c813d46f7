"""Report rendering: a structured key-value tree with stable key
ordering, CSV export of theta-sweep residuals, and triangle-mesh export
of integrated family members.
"""

import csv
import io
from typing import Dict, List, Sequence

import numpy as np

from .family import FamilyMember
from .pipeline import Report


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if not np.isfinite(v):
            return "inf" if v > 0 else "-inf"
        if v == 0.0:
            return "0"
        if v == int(v) and abs(v) < 1e6:
            return str(int(v))
        return f"{v:.6e}"
    return str(v)


def render_tree(tree: dict, indent: int = 0) -> str:
    """Key-value tree as indented text; insertion order is preserved so
    callers control the (stable) ordering."""
    out = []
    pad = "  " * indent
    for key, val in tree.items():
        if isinstance(val, dict):
            out.append(f"{pad}{key}:")
            out.append(render_tree(val, indent + 1))
        else:
            out.append(f"{pad}{key}: {_fmt(val)}")
    return "\n".join(out)


def report_tree(report: Report) -> dict:
    """Stable-ordered tree: run metadata, then fixtures in run order,
    then checks in pipeline order, then a summary block."""
    cfg = report.config
    tree: dict = {
        "run": {
            "version": report.version,
            "fixtures": ", ".join(cfg.fixtures),
            "grid": cfg.grid,
            "h": cfg.h,
            "tol_tier1": cfg.tol_tier1,
            "tol_tier2": cfg.tol_tier2,
            "tol_tier3": cfg.tol_tier3,
            "seed": cfg.seed,
        }
    }
    fixtures: dict = {}
    for r in report.results:
        node = fixtures.setdefault(r.fixture, {})
        entry = {"status": r.status}
        if r.residual is not None:
            entry["residual"] = r.residual
            entry["threshold"] = r.threshold
        if r.expected is not None:
            entry["expected"] = r.expected
            entry["matches_expectation"] = not r.mismatch
        for k in sorted(r.extras):
            entry[k] = r.extras[k]
        if r.message:
            entry["note"] = r.message
        node[r.check] = entry
    tree["fixtures"] = fixtures

    counts = {"PASS": 0, "FAIL": 0, "INCONCLUSIVE": 0,
              "SKIPPED": 0, "ERROR": 0}
    for r in report.results:
        counts[r.status] = counts.get(r.status, 0) + 1
    tree["summary"] = {
        "checks_run": len(report.results),
        **{k.lower(): v for k, v in counts.items()},
        "expectation_mismatches": len(report.mismatches),
    }
    return tree


def render_report(report: Report) -> str:
    return render_tree(report_tree(report)) + "\n"


def sweep_rows(fixture: str, thetas: Sequence[float],
               residuals: List[Dict[str, float]]) -> List[dict]:
    """Rows for the theta-sweep CSV: one row per theta."""
    rows = []
    for th, res in zip(thetas, residuals):
        row = {"fixture": fixture, "theta": th}
        row.update(res)
        rows.append(row)
    return rows


def write_sweep_csv(path, rows: List[dict]) -> None:
    if not rows:
        raise ValueError("no sweep rows to write")
    fields = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(v) if isinstance(v, float) else v
                        for k, v in row.items()})


def mesh_text(member: FamilyMember) -> str:
    """Triangle mesh of an integrated family member.

    Vertices as `v x y z` (first three coordinates); when the ambient
    dimension exceeds 3 every full coordinate vector is emitted first as
    a `# coords ...` comment line.  Faces as 1-based `f i j k`, two
    triangles per grid quad.
    """
    V = member.values
    n = V.shape[1]
    rows, cols = member.shape
    buf = io.StringIO()
    if n > 3:
        for p in V:
            buf.write("# coords " + " ".join(f"{x:.12g}" for x in p) + "\n")
    for p in V:
        xyz = p[:3] if n >= 3 else np.pad(p, (0, 3 - n))
        buf.write(f"v {xyz[0]:.12g} {xyz[1]:.12g} {xyz[2]:.12g}\n")
    for i in range(rows - 1):
        for j in range(cols - 1):
            a = i * cols + j + 1
            b = a + 1
            c = a + cols
            d = c + 1
            buf.write(f"f {a} {b} {d}\n")
            buf.write(f"f {a} {d} {c}\n")
    return buf.getvalue()


def write_mesh(path, member: FamilyMember) -> None:
    with open(path, "w") as fh:
        fh.write(mesh_text(member))
