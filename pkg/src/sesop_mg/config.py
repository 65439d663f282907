"""Experiment configuration.

YAML files are read by :class:`Config` and turned into the typed
:class:`ExperimentConfig` tree. Every problem found while converting is
collected and raised once as a :class:`~sesop_mg.exceptions.ConfigError`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from enum import Enum
import math
from pathlib import Path
import re
from typing import Any

from typing_extensions import Self
import yaml

from .analysis.lfa import CoarseMode
from .exceptions import ConfigError
from .relaxation import OmegaMode, PreconditionerKind, RelaxationKind
from .sesop.cycles import CoarsestSolver
from .transfer import ProlongationKind


class Config:
    """Raw YAML mapping with dot-notation lookup.

    ``config.get("solver.history")`` walks nested mappings;
    ``config.solver`` returns a top-level section.
    """

    def __init__(self, config_path: str | Path | None = None, *, data: dict | None = None):
        if data is not None:
            self.config = data
        elif config_path is not None:
            with open(config_path) as config_file:
                self.config = yaml.safe_load(config_file) or {}
        else:
            self.config = {}
        if not isinstance(self.config, dict):
            raise ConfigError([f"top level must be a mapping, got {type(self.config).__name__}"])

    def __getattr__(self, name):
        if name == "config":
            raise AttributeError(name)
        if name in self.config:
            return self.config[name]
        raise AttributeError(f"Configuration key '{name}' not found")

    def get(self, name: str, default=None):
        value = self.config
        for key in name.split("."):
            if not isinstance(value, dict) or key not in value:
                return default
            value = value[key]
        return value


class ProblemKind(str, Enum):
    ANISOTROPIC = "anisotropic"
    EXPONENTIAL = "exp"
    P_LAPLACIAN = "plaplace"


class SolverKind(str, Enum):
    SESOP = "sesop"
    FIXED = "fixed"
    CLASSICAL_TG = "classical_tg"
    CLASSICAL_MG = "classical_mg"
    CG = "cg"
    PCG_MG = "pcg_mg"
    SD = "sd"
    NESTEROV = "nesterov"
    LBFGS = "lbfgs"


class CoefficientMode(str, Enum):
    SUBSPACE = "subspace"
    FIXED_ORDINARY = "fixed_ordinary"
    FIXED_OPTIMIZED = "fixed_optimized"


_ANGLE = re.compile(r"^\s*(?P<num>[-+]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+(?:\.\d+)?))?\s*$")


def parse_angle(value: Any) -> float:
    """Radians from a number or a string such as ``"pi/4"`` or ``"3*pi / 8"``."""
    if isinstance(value, bool):
        raise ValueError(f"not an angle: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip().lower()
        match = _ANGLE.match(text)
        if match:
            num = match.group("num")
            factor = 1.0 if num in ("", "+") else -1.0 if num == "-" else float(num)
            den = float(match.group("den") or 1.0)
            return factor * math.pi / den
        try:
            return float(text)
        except ValueError:
            pass
    raise ValueError(f"not an angle: {value!r}")


@dataclass(frozen=True)
class ProblemSpec:
    kind: ProblemKind = ProblemKind.ANISOTROPIC
    epsilon: float = 1.0
    phi: float = 0.0
    p: float = 1.3
    xi: float = 1e-4
    gamma: float = 10.0


@dataclass(frozen=True)
class GridSpec:
    fine_n: int = 63
    coarsest_n: int = 31


@dataclass(frozen=True)
class SolverSpec:
    kind: SolverKind = SolverKind.SESOP
    history: int = 1
    cycle_type: int = 1
    v1: int = 0
    v2: int = 0
    coarse_v1: int = 2
    coarse_v2: int = 1
    relaxation: RelaxationKind = RelaxationKind.DAMPED_JACOBI
    preconditioner: PreconditionerKind = PreconditionerKind.JACOBI
    prolongation: ProlongationKind = ProlongationKind.BILINEAR
    coarse_mode: CoarseMode = CoarseMode.REDISCRETIZE
    omega_mode: OmegaMode = OmegaMode.FREQUENCY
    coarsest_solver: CoarsestSolver = CoarsestSolver.DIRECT
    coarsest_max_iter: int = 10
    newton_iters: int = 10
    lbfgs_memory: int = 10
    use_coarse_correction: bool = True
    multilevel_correction: bool = False


@dataclass(frozen=True)
class StopSpec:
    tol: float = 1e-8
    gap_tol: float = 1e-10
    max_iter: int = 500
    max_seconds: float | None = None


@dataclass(frozen=True)
class LoggingSpec:
    level: str = "INFO"
    modules: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "experiment"
    problem: ProblemSpec = field(default_factory=ProblemSpec)
    grid: GridSpec = field(default_factory=GridSpec)
    solver: SolverSpec = field(default_factory=SolverSpec)
    coefficient_mode: CoefficientMode = CoefficientMode.SUBSPACE
    analysis_n: int = 64
    stop: StopSpec = field(default_factory=StopSpec)
    seed: int = 0
    output: str | None = None
    logging: LoggingSpec = field(default_factory=LoggingSpec)

    @classmethod
    def from_dict(cls, data: dict | None) -> Self:
        errors: list[str] = []
        cfg = _build(cls, data or {}, "", errors)
        if cfg is not None:
            errors.extend(_semantic_errors(cfg))
        if errors:
            raise ConfigError(errors)
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> Self:
        try:
            raw = Config(path).config
        except FileNotFoundError as exc:
            raise ConfigError([f"{path}: file not found"]) from exc
        except yaml.YAMLError as exc:
            raise ConfigError([f"{path}: invalid YAML ({exc})"]) from exc
        return cls.from_dict(raw)

    def as_dict(self) -> dict:
        return _plain(asdict(self))

    def with_overrides(self, overrides: dict) -> Self:
        return type(self).from_dict(merge_dicts(self.as_dict(), overrides))


_SECTIONS = {
    "problem": ProblemSpec,
    "grid": GridSpec,
    "solver": SolverSpec,
    "stop": StopSpec,
    "logging": LoggingSpec,
}


def _plain(value):
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def merge_dicts(base: dict, overrides: dict) -> dict:
    """Recursive merge; ``overrides`` wins on leaves."""
    out = dict(base)
    for key, value in (overrides or {}).items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge_dicts(out[key], value)
        else:
            out[key] = value
    return out


def _coerce(name: str, annotation: str, value: Any, path: str, errors: list[str]):
    enum_types = {
        "ProblemKind": ProblemKind,
        "SolverKind": SolverKind,
        "CoefficientMode": CoefficientMode,
        "RelaxationKind": RelaxationKind,
        "PreconditionerKind": PreconditionerKind,
        "ProlongationKind": ProlongationKind,
        "CoarseMode": CoarseMode,
        "OmegaMode": OmegaMode,
        "CoarsestSolver": CoarsestSolver,
    }
    try:
        if annotation in enum_types:
            enum = enum_types[annotation]
            try:
                return enum(value)
            except ValueError:
                allowed = ", ".join(e.value for e in enum)
                raise ValueError(f"must be one of {allowed}, got {value!r}") from None
        if name == "phi":
            return parse_angle(value)
        if annotation == "bool":
            if not isinstance(value, bool):
                raise ValueError(f"must be true or false, got {value!r}")
            return value
        if annotation == "int":
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"must be an integer, got {value!r}")
            return value
        if annotation.startswith("float"):
            if value is None and "None" in annotation:
                return None
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValueError(f"must be a number, got {value!r}")
            return float(value)
        if annotation.startswith("str"):
            if value is None and "None" in annotation:
                return None
            if not isinstance(value, str):
                raise ValueError(f"must be a string, got {value!r}")
            return value
        if annotation.startswith("dict"):
            if not isinstance(value, dict):
                raise ValueError(f"must be a mapping, got {value!r}")
            return {str(k): str(v) for k, v in value.items()}
    except ValueError as exc:
        errors.append(f"{path}: {exc}")
        return None
    return value


def _build(cls, data: Any, prefix: str, errors: list[str]):
    if not isinstance(data, dict):
        errors.append(f"{prefix or '<root>'}: must be a mapping, got {type(data).__name__}")
        return None
    known = {f.name: f for f in fields(cls)}
    for key in data:
        if key not in known:
            errors.append(f"{prefix}{key}: unknown key")
    kwargs = {}
    for name, f in known.items():
        if name not in data:
            continue
        path = f"{prefix}{name}"
        value = data[name]
        if cls is ExperimentConfig and name in _SECTIONS:
            built = _build(_SECTIONS[name], value, f"{path}.", errors)
        else:
            built = _coerce(name, str(f.type), value, path, errors)
        if built is not None or value is None:
            kwargs[name] = built
    if any(e.startswith(prefix) for e in errors) and prefix:
        return None
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        errors.append(f"{prefix or '<root>'}: {exc}")
        return None


def _semantic_errors(cfg: ExperimentConfig) -> list[str]:
    errors: list[str] = []
    p, g, s, st = cfg.problem, cfg.grid, cfg.solver, cfg.stop
    if p.epsilon <= 0.0:
        errors.append(f"problem.epsilon: must be positive, got {p.epsilon}")
    if not 1.0 < p.p <= 2.0:
        errors.append(f"problem.p: must lie in (1, 2], got {p.p}")
    if p.xi <= 0.0:
        errors.append(f"problem.xi: must be positive, got {p.xi}")
    if g.coarsest_n < 1 or g.fine_n < g.coarsest_n:
        errors.append(f"grid: need 1 <= coarsest_n <= fine_n, got {g.coarsest_n} and {g.fine_n}")
    else:
        n = g.fine_n
        while n > g.coarsest_n and n % 2 == 1:
            n = (n - 1) // 2
        if n != g.coarsest_n:
            errors.append(f"grid: coarsening {g.fine_n} by factor 2 never reaches {g.coarsest_n}")
    if s.history < 0:
        errors.append(f"solver.history: must be nonnegative, got {s.history}")
    if s.cycle_type not in (1, 2):
        errors.append(f"solver.cycle_type: must be 1 (V) or 2 (W), got {s.cycle_type}")
    for name in ("v1", "v2", "coarse_v1", "coarse_v2"):
        if getattr(s, name) < 0:
            errors.append(f"solver.{name}: must be nonnegative, got {getattr(s, name)}")
    for name in ("coarsest_max_iter", "newton_iters", "lbfgs_memory"):
        if getattr(s, name) < 1:
            errors.append(f"solver.{name}: must be positive, got {getattr(s, name)}")
    linear = p.kind is ProblemKind.ANISOTROPIC
    if s.kind in (SolverKind.FIXED, SolverKind.CLASSICAL_TG, SolverKind.CG, SolverKind.PCG_MG) and not linear:
        errors.append(f"solver.kind: {s.kind.value} needs the anisotropic (linear) problem")
    if s.kind is SolverKind.FIXED and cfg.coefficient_mode is CoefficientMode.SUBSPACE:
        errors.append("coefficient_mode: the fixed solver needs fixed_ordinary or fixed_optimized")
    if s.kind is SolverKind.FIXED and s.history > 1:
        errors.append(f"solver.history: fixed stepsizes support at most one history step, got {s.history}")
    if s.kind is SolverKind.CLASSICAL_TG and g.fine_n != 2 * g.coarsest_n + 1:
        errors.append("grid: classical_tg needs exactly two levels (fine_n = 2 coarsest_n + 1)")
    if cfg.coefficient_mode is not CoefficientMode.SUBSPACE and not linear:
        errors.append("coefficient_mode: fixed stepsizes need the anisotropic (linear) problem")
    if s.kind in (SolverKind.CLASSICAL_TG, SolverKind.CLASSICAL_MG) and s.v1 + s.v2 < 1:
        errors.append("solver: classical multigrid needs at least one relaxation sweep (v1 + v2 >= 1)")
    if not linear and s.coarse_mode is CoarseMode.GALERKIN:
        errors.append("solver.coarse_mode: galerkin coarsening needs the anisotropic problem")
    if cfg.analysis_n < 4 or cfg.analysis_n % 4:
        errors.append(f"analysis_n: must be a positive multiple of 4, got {cfg.analysis_n}")
    if st.tol <= 0.0 or st.gap_tol <= 0.0:
        errors.append("stop: tolerances must be positive")
    if st.max_iter < 0:
        errors.append(f"stop.max_iter: must be nonnegative, got {st.max_iter}")
    if cfg.logging.level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        errors.append(f"logging.level: unknown level {cfg.logging.level!r}")
    return errors
