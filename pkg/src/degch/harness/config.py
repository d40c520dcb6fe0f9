"""INI-style run configuration with aggregated validation.

Example::

    [grid]
    n = 64

    [model]
    potential = quartic
    theta = 0.1

    [initial]
    type = constant
    value = 0.2

Sections and keys are listed in ``SCHEMA``; anything else is reported as an
error.  All problems are collected and raised together as a
:class:`ValidationError`; malformed lines raise :class:`ParseError`.
"""
import configparser
import hashlib
import os
import re
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from ..climb import ClimbParams
from ..dynamics import StepperConfig
from ..errors import ParseError, ValidationError
from ..model import ModelParams, Potential
from ..spectral import PeriodicGrid

OUTPUT_ROOT_ENV = "DEGCH_OUTPUT_ROOT"
IC_TYPES = ("constant", "tanh_circle", "tanh_loops", "mode_perturbed_circle", "file", "random")


def _bool(s):
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _floats(s):
    return [float(x) for x in re.split(r"[,\s]+", s.strip()) if x]


def _points(s):
    """'x1 y1; x2 y2' -> [(x1, y1), (x2, y2)]."""
    out = []
    for part in s.split(";"):
        v = _floats(part)
        if not v:
            continue
        if len(v) != 2:
            raise ValueError(f"expected 'x y' pairs, got {part.strip()!r}")
        out.append(tuple(v))
    return out


def _opt_float(s):
    return None if s.strip().lower() in ("", "none", "auto") else float(s)


SCHEMA = {
    "grid": {"n": int, "dim": int},
    "model": {"epsilon": float, "m": float, "M0": float, "theta": float,
              "potential": str, "scaled_form": _bool, "floor": float},
    "climb": {"enabled": _bool, "coefficient": float, "f_app": float},
    "stepper": {"scheme": str, "dt_init": float, "dt_min": float, "dt_max": float,
                "rel_tol": float, "stabilization": str, "stabilization_A": _opt_float,
                "dealias": _bool, "fixed_step": _bool, "max_rejects": int,
                "growth_limit": float, "linear_rtol": float, "linear_restart": int,
                "linear_maxiter": int},
    "initial": {"type": str, "value": float, "center": _floats, "radius": float,
                "centers": _points, "radii": _floats, "k": int, "delta": float,
                "path": str, "amplitude": float, "mean": float, "width": _opt_float},
    "run": {"t_end": float, "seed": int},
    "output": {"directory": str, "snapshot_cadence": float, "diagnostics_cadence": float},
}


@dataclass
class InitialCondition:
    type: str = "constant"
    value: float = 0.0
    center: tuple = (np.pi, np.pi)
    radius: float = 1.0
    centers: list = field(default_factory=list)
    radii: list = field(default_factory=list)
    k: int = 2
    delta: float = 0.05
    path: Optional[str] = None
    amplitude: float = 0.05
    mean: float = 0.0
    width: Optional[float] = None


@dataclass
class OutputConfig:
    directory: str = "run"
    snapshot_cadence: Optional[float] = None
    diagnostics_cadence: Optional[float] = None

    def resolved_directory(self, base=None):
        """Directory under the output root (env override, then ``base``)."""
        d = Path(self.directory)
        if d.is_absolute():
            return d
        root = os.environ.get(OUTPUT_ROOT_ENV) or base or "."
        return Path(root) / d


@dataclass
class RunConfig:
    model: ModelParams
    stepper: StepperConfig
    grid: PeriodicGrid
    initial_condition: InitialCondition
    t_end: float = 1.0
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0
    source_text: str = ""
    source_path: Optional[str] = None

    @property
    def digest(self):
        return params_digest(self.model, self.grid)


def params_digest(p, grid):
    """SHA-256 over the model parameters and the grid, as raw 32 bytes."""
    items = [("dim", str(grid.dim)), ("n", str(grid.n))]
    for f in fields(p):
        if f.name in ("potential", "climb"):
            continue
        items.append((f.name, repr(getattr(p, f.name))))
    items.append(("potential", p.potential.kind))
    if p.climb is not None:
        items.extend(p.climb.digest_items())
    text = "\n".join(f"{k}={v}" for k, v in sorted(items))
    return hashlib.sha256(text.encode()).digest()


def _line_index(text):
    """(section, key) -> line number for error reporting."""
    idx, sec = {}, None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[([^\]]+)\]", s)
        if m:
            sec = m.group(1).strip()
            idx.setdefault((sec, None), i)
            continue
        m = re.match(r"([^=:#;\s][^=:]*?)\s*[=:]", s)
        if m and sec is not None:
            idx.setdefault((sec, m.group(1).strip()), i)
    return idx


def parse_config_text(text, path=None):
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text, source=str(path or "<string>"))
    except configparser.MissingSectionHeaderError as e:
        raise ParseError("key outside of any section", line=e.lineno) from None
    except configparser.DuplicateOptionError as e:
        raise ParseError("duplicate key", line=e.lineno, field=f"{e.section}.{e.option}") from None
    except configparser.DuplicateSectionError as e:
        raise ParseError("duplicate section", line=e.lineno, field=e.section) from None
    except configparser.ParsingError as e:
        ln = e.errors[0][0] if e.errors else None
        raise ParseError("malformed line", line=ln) from None

    lines = _line_index(text)
    errors, values = [], {}
    for sec in cp.sections():
        if sec not in SCHEMA:
            errors.append(f"line {lines.get((sec, None))}: unknown section [{sec}]")
            continue
        for key, raw in cp.items(sec):
            where = f"line {lines.get((sec, key))}: {sec}.{key}"
            conv = SCHEMA[sec].get(key)
            if conv is None:
                errors.append(f"{where}: unknown key")
                continue
            try:
                values[(sec, key)] = conv(raw)
            except ValueError as e:
                errors.append(f"{where}: cannot parse {raw!r} ({e})")

    def sect(name):
        return {k: v for (s, k), v in values.items() if s == name}

    # grid
    g = sect("grid")
    grid = None
    if "n" not in g:
        errors.append("grid.n is required")
    else:
        try:
            grid = PeriodicGrid(g.get("dim", 2), g["n"])
        except ValueError as e:
            errors.append(f"grid: {e}")

    # model
    mv = sect("model")
    climb = None
    cv = sect("climb")
    if cv.get("enabled", bool(cv)):
        try:
            climb = ClimbParams(coefficient=cv.get("coefficient", 1.0), f_app=cv.get("f_app", 0.0))
        except ValueError as e:
            errors.append(f"climb: {e}")
    pot = None
    try:
        pot = Potential(mv.pop("potential", "quartic"))
    except ValueError as e:
        errors.append(f"model.potential: {e}")
    model = None
    probe = ModelParams.__new__(ModelParams)
    defaults = {f.name: f.default for f in fields(ModelParams) if f.name not in ("potential", "climb")}
    for k, v in {**defaults, **mv}.items():
        object.__setattr__(probe, k, v)
    errors.extend(f"model: {e}" for e in ModelParams.problems(probe))
    if pot is not None and not any(e.startswith("model:") for e in errors):
        model = ModelParams(potential=pot, climb=climb, **mv)
    if climb is not None and grid is not None and grid.dim != 2:
        errors.append("climb: the climb model needs a 2D grid")

    # stepper
    sv = sect("stepper")
    stepper = None
    probe = StepperConfig.__new__(StepperConfig)
    for f in fields(StepperConfig):
        object.__setattr__(probe, f.name, sv.get(f.name, f.default))
    probs = StepperConfig.problems(probe)
    errors.extend(f"stepper: {e}" for e in probs)
    if not probs:
        stepper = StepperConfig(**sv)

    # run and output
    rv = sect("run")
    t_end = rv.get("t_end", 1.0)
    if not t_end > 0:
        errors.append("run.t_end must be > 0")
    ov = sect("output")
    out = OutputConfig(**ov)
    if out.diagnostics_cadence is None:
        out.diagnostics_cadence = t_end / 100.0
    if out.snapshot_cadence is None:
        out.snapshot_cadence = t_end / 10.0
    for name in ("diagnostics_cadence", "snapshot_cadence"):
        if not getattr(out, name) > 0:
            errors.append(f"output.{name} must be > 0")

    # initial condition
    iv = sect("initial")
    ic = InitialCondition(**iv)
    base = Path(path).parent if path else Path(".")
    if ic.type not in IC_TYPES:
        errors.append(f"initial.type must be one of {IC_TYPES}")
    elif ic.type in ("tanh_circle", "mode_perturbed_circle") and not ic.radius > 0:
        errors.append("initial.radius must be > 0")
    elif ic.type == "tanh_loops":
        if not ic.centers or len(ic.centers) != len(ic.radii):
            errors.append("initial.centers and initial.radii must be non-empty and of equal length")
    elif ic.type == "file":
        if not ic.path:
            errors.append("initial.path is required for type = file")
        else:
            p = Path(ic.path)
            if not p.is_absolute():
                p = base / p
            if not p.exists():
                errors.append(f"initial.path does not exist: {p}")
            ic.path = str(p)
    if ic.type in ("mode_perturbed_circle",) and ic.k < 1:
        errors.append("initial.k must be >= 1")
    if len(ic.center) != 2:
        errors.append("initial.center needs two coordinates")
    ic.center = tuple(ic.center)
    if ic.type == "constant" and not (-1.0 <= ic.value <= 1.0):
        errors.append("initial.value must lie in [-1, 1]")

    if errors:
        raise ValidationError(errors)
    return RunConfig(model=model, stepper=stepper, grid=grid, initial_condition=ic,
                     t_end=float(t_end), output=out, seed=rv.get("seed", 0),
                     source_text=text, source_path=str(path) if path else None)


def parse_config(path):
    """Read and validate a configuration file."""
    p = Path(path)
    if not p.is_file():
        raise ValidationError([f"config file not found: {p}"])
    return parse_config_text(p.read_text(), path=p)
