"""Run drivers: diagnostics CSV, snapshots, manifest and the output-directory lock."""
import csv
import os
import platform
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from .. import __version__, diagnostics
from ..dynamics import run
from .snapshot import read_snapshot, write_snapshot

CSV_SCHEMA_VERSION = 1
LOCK_NAME = ".lock"


class DirectoryLocked(RuntimeError):
    pass


@contextmanager
def output_lock(directory):
    """Exclusive ownership of ``directory`` for the duration of a run."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    lock = d / LOCK_NAME
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise DirectoryLocked(f"output directory {d} is in use (remove {lock} if stale)") from None
    with os.fdopen(fd, "w") as fh:
        fh.write(f"{os.getpid()}\n")
    try:
        yield d
    finally:
        try:
            lock.unlink()
        except FileNotFoundError:
            pass


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


class CsvLog:
    """Append-friendly CSV with a one-line schema comment."""

    def __init__(self, path, columns, append=False):
        self.path = Path(path)
        self.columns = list(columns)
        fresh = not (append and self.path.exists() and self.path.stat().st_size > 0)
        self.fh = open(self.path, "w" if fresh else "a", newline="")
        self.writer = csv.writer(self.fh)
        if fresh:
            self.fh.write(f"# schema_version={CSV_SCHEMA_VERSION}\n")
            self.writer.writerow(self.columns)

    def write(self, row):
        self.writer.writerow([_fmt(v) for v in row])
        self.fh.flush()

    def close(self):
        self.fh.close()


def read_csv(path):
    """Rows of a CSV written by :class:`CsvLog` as dicts of strings."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def last_time(path):
    rows = read_csv(path) if Path(path).exists() else []
    return float(rows[-1]["t"]) if rows else None


def write_manifest(directory, argv, config_text=None, wall_time=None, status=None, extra=None):
    """Plain-text record of the command, config, versions and timing."""
    import scipy

    lines = [
        f"command: {' '.join(argv)}",
        f"package_version: {__version__}",
        f"python: {platform.python_version()}",
        f"numpy: {np.__version__}",
        f"scipy: {scipy.__version__}",
        f"platform: {platform.platform()}",
        f"csv_schema_version: {CSV_SCHEMA_VERSION}",
    ]
    if wall_time is not None:
        lines.append(f"wall_time_s: {wall_time:.3f}")
    if status is not None:
        lines.append(f"exit_status: {status}")
    for k, v in (extra or {}).items():
        lines.append(f"{k}: {v}")
    lines.append("--- config ---")
    lines.append(config_text.rstrip("\n") if config_text else "(none)")
    path = Path(directory) / "manifest.txt"
    path.write_text("\n".join(lines) + "\n")
    return path


def _is_multiple(t, cadence, tol=1e-9):
    q = t / cadence
    return abs(q - round(q)) < tol * max(1.0, abs(q))


def simulate(cfg, u0, outdir, t0=0.0, step_count=0, dt_next=None, append=False, log=None):
    """Integrate a configured run, writing diagnostics and snapshots to ``outdir``.

    Hooks fire on the diagnostics cadence; snapshots are written at those
    points that are multiples of the snapshot cadence and at the end.
    Returns the final :class:`SimState`.
    """
    outdir = Path(outdir)
    p = cfg.model
    csv_path = outdir / "diagnostics.csv"
    skip_t = last_time(csv_path) if append else None
    out = CsvLog(csv_path, diagnostics.CSV_COLUMNS, append=append)
    snap_cad = cfg.output.snapshot_cadence
    digest = cfg.digest

    def hook(s):
        if skip_t is None or s.t > skip_t:
            out.write(diagnostics.record(s.t, s.u, p).row())
        if s.t > t0 and (_is_multiple(s.t, snap_cad) or s.t >= cfg.t_end):
            write_snapshot(s, outdir / f"snap_{int(round(s.t / snap_cad)):06d}.bin", digest)
        if log:
            log(f"t={s.t:.6g} steps={s.step_count}")

    try:
        traj = run(u0, p, cfg.stepper, cfg.t_end, hooks=[hook], cadence=cfg.output.diagnostics_cadence,
                   t0=t0, step_count=step_count, dt_next=dt_next)
    finally:
        out.close()
    write_snapshot(traj.final, outdir / "final.bin", digest)
    return traj.final


def resume(cfg, snapshot_path, outdir, log=None):
    """Continue a run from a snapshot written under the same configuration."""
    s = read_snapshot(snapshot_path, expected_digest=cfg.digest)
    s.params = cfg.model
    if s.t >= cfg.t_end:
        return s
    return simulate(cfg, s.u, outdir, t0=s.t, step_count=s.step_count, dt_next=s.dt_next,
                    append=True, log=log)


def timed(fn, *a, **kw):
    t0 = time.perf_counter()
    r = fn(*a, **kw)
    return r, time.perf_counter() - t0


def stderr(msg):
    print(msg, file=sys.stderr)
