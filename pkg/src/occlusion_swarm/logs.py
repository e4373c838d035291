"""Trial logs (metadata JSON + CSV tables) and static SVG rendering."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from .config import ScenarioConfig, from_dict
from .harness import ROBOT_COLUMNS, SERIES_COLUMNS, TrialResult

META_FILE = "meta.json"
SERIES_FILE = "series.csv"
ROBOTS_FILE = "robots.csv"
# metadata fields that legitimately differ between identical runs
VOLATILE_KEYS = ("created_utc",)

LED_COLORS = {"Off": "#9e9e9e", "Red": "#d62728", "Blue": "#1f77b4"}


def atomic_write(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def trial_metadata(result: TrialResult, cfg: ScenarioConfig) -> dict:
    return {
        "config": cfg.to_dict(),
        "outcome": result.outcome,
        "summary": result.summary(),
        "final_object_pose": list(result.final_object_pose),
        "attach_events": [list(e) for e in result.attach_events],
        "push_entries": [list(e) for e in result.push_entries],
        "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def write_trial_logs(result: TrialResult, cfg: ScenarioConfig, out_dir: str | os.PathLike) -> Path:
    out = Path(out_dir)
    atomic_write(out / SERIES_FILE, _csv(SERIES_COLUMNS, result.series))
    atomic_write(out / ROBOTS_FILE, _csv(ROBOT_COLUMNS, result.robot_rows))
    # metadata last: its presence marks a complete log directory
    atomic_write(out / META_FILE, json.dumps(trial_metadata(result, cfg), indent=2, sort_keys=True) + "\n")
    return out


def _parse(v: str):
    if v == "":
        return None
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        return v


def read_table(path: str | os.PathLike) -> tuple[list[str], list[list]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty table")
    return rows[0], [[_parse(v) for v in r] for r in rows[1:]]


def load_log(log_dir: str | os.PathLike) -> dict:
    d = Path(log_dir)
    meta_path = d / META_FILE
    if not meta_path.exists():
        raise FileNotFoundError(f"no {META_FILE} in {d}")
    meta = json.loads(meta_path.read_text())
    s_cols, series = read_table(d / SERIES_FILE)
    r_cols, robots = read_table(d / ROBOTS_FILE)
    return {"meta": meta, "series_columns": s_cols, "series": series,
            "robot_columns": r_cols, "robots": robots}


def comparable_metadata(meta: dict) -> dict:
    return {k: v for k, v in meta.items() if k not in VOLATILE_KEYS}


def render_svg(log_dir: str | os.PathLike, out_path: Optional[str | os.PathLike] = None) -> Path:
    """Arena, final object pose, robots coloured by LED, light, centroid path."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Circle, Polygon, Rectangle

    from .geometry import Pose2
    from .scenarios import build_shape

    log = load_log(log_dir)
    meta = log["meta"]
    cfg = from_dict(meta["config"])
    xmin, xmax, ymin, ymax = cfg.bounds()

    fig, ax = plt.subplots(figsize=(6, 6 * (ymax - ymin) / (xmax - xmin)))
    ax.add_patch(Rectangle((xmin, ymin), xmax - xmin, ymax - ymin, fill=False, lw=1.5, ec="black"))

    shape = build_shape(cfg.shape).with_pose(Pose2(*meta["final_object_pose"]))
    for part in shape.world_parts:
        ax.add_patch(Polygon([(v.x, v.y) for v in part.vertices], closed=True,
                             fc="#c8b48c", ec="#5a4a2a", lw=0.8))

    cols = log["series_columns"]
    ix, iy = cols.index("obj_x"), cols.index("obj_y")
    xs = [row[ix] for row in log["series"]]
    ys = [row[iy] for row in log["series"]]
    if xs:
        ax.plot(xs, ys, color="#2ca02c", lw=1.0, label="object centroid")

    rcols = log["robot_columns"]
    if log["robots"]:
        last = max(row[0] for row in log["robots"])
        for row in log["robots"]:
            if row[0] != last:
                continue
            rec = dict(zip(rcols, row))
            x, y, th = rec["x"], rec["y"], rec["theta"]
            r = cfg.dynamics.robot_radius
            ax.add_patch(Circle((x, y), r, fc=LED_COLORS.get(rec["led"], "#9e9e9e"), ec="black", lw=0.4))
            ax.plot([x, x + r * math.cos(th)], [y, y + r * math.sin(th)], color="black", lw=0.5)

    lx, ly = cfg.light_position()
    ax.plot([lx], [ly], marker="*", ms=14, color="#ffbf00", mec="black", ls="none", label="light")
    ax.set_xlim(xmin - 0.1, xmax + 0.1)
    ax.set_ylim(ymin - 0.1, ymax + 0.1)
    ax.set_aspect("equal")
    ax.set_title(f"{cfg.name}: {meta['outcome']} after {meta['summary']['steps_used']} steps")
    ax.legend(loc="upper right", fontsize=8)

    out = Path(out_path) if out_path else Path(log_dir) / "trial.svg"
    buf = io.StringIO()
    # a fixed hash salt keeps the SVG byte-stable across runs
    matplotlib.rcParams["svg.hashsalt"] = "occlusion-swarm"
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    atomic_write(out, buf.getvalue())
    return out
