"""Parameter sweeps over steady-state observables, plus figure presets.

A sweep is a one- or two-axis grid over `SystemParams` fields. Axis names
are plain field names plus two linked aliases: "delta" sets both detunings
and "kappa" sets both decay rates. Constraint strings like "delta = g_ms/2"
re-derive dependent fields at every grid point.

Grid points are independent; failures at individual points are recorded and
never abort the grid. Results are bit-reproducible: each cell is written at
its own index regardless of execution order.
"""

from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .analytic import analytic_g2
from .core import Space, projector
from .errors import NumericalError, ParameterError
from .lindblad import build_liouvillian, evolve, fock_populations, g2_zero, steady_state
from .model import SWEEPABLE_FIELDS, SystemParams

THREADS_ENV_VAR = "MBL_THREADS"

AXIS_ALIASES: dict[str, tuple[str, ...]] = {
    "delta": ("delta_m", "delta_s"),
    "kappa": ("kappa_m", "kappa_s"),
}

QUANTITIES = ("g2_numeric", "g2_analytic", "both_g2", "populations")

# populations tracked as sweep/evolution outputs
N_POPULATION_COLUMNS = 4

_CONSTRAINT_RE = re.compile(
    r"^\s*(?P<target>[a-z_][a-z0-9_]*)\s*=\s*"
    r"(?:(?P<source>[a-z_][a-z0-9_]*)\s*(?:(?P<op>[*/])\s*(?P<factor>[-+0-9.eE]+))?"
    r"|(?P<literal>[-+0-9.eE]+))\s*$"
)


def _expand_param_name(name: str) -> tuple[str, ...]:
    if name in AXIS_ALIASES:
        return AXIS_ALIASES[name]
    if name in SWEEPABLE_FIELDS:
        return (name,)
    raise ParameterError(
        f"unknown sweep parameter {name!r}; expected one of {SWEEPABLE_FIELDS + tuple(AXIS_ALIASES)}"
    )


@dataclass(frozen=True)
class SweepAxis:
    """One grid axis: a parameter name and the values it takes."""

    name: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        _expand_param_name(self.name)
        if len(self.values) < 1:
            raise ParameterError(f"axis {self.name!r} needs at least one value")
        vals = []
        for v in self.values:
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise ParameterError(f"axis {self.name!r} has a non-finite value {v!r}")
            vals.append(float(v))
        object.__setattr__(self, "values", tuple(vals))

    @classmethod
    def linspace(cls, name: str, lo: float, hi: float, count: int) -> "SweepAxis":
        if not isinstance(count, int) or isinstance(count, bool) or count < 2:
            raise ParameterError(f"axis {name!r}: count must be an integer >= 2, got {count!r}")
        if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
            raise ParameterError(f"axis {name!r}: need finite lo < hi, got [{lo!r}, {hi!r}]")
        return cls(name, tuple(np.linspace(lo, hi, count)))

    @classmethod
    def explicit(cls, name: str, values: Iterable[float]) -> "SweepAxis":
        return cls(name, tuple(values))

    @property
    def count(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class Constraint:
    """Parsed linkage rule: target = source [*/ factor] or target = literal."""

    target: str
    source: str | None
    scale: float
    offset_literal: float | None

    @classmethod
    def parse(cls, rule: str) -> "Constraint":
        match = _CONSTRAINT_RE.match(rule)
        if match is None:
            raise ParameterError(f"cannot parse constraint {rule!r}; expected 'name = name[*k|/k]' or 'name = value'")
        target = match.group("target")
        _expand_param_name(target)
        if match.group("literal") is not None:
            return cls(target=target, source=None, scale=1.0, offset_literal=float(match.group("literal")))
        source = match.group("source")
        if source not in SWEEPABLE_FIELDS:
            raise ParameterError(f"constraint {rule!r}: source must be one of {SWEEPABLE_FIELDS}")
        scale = 1.0
        if match.group("op") is not None:
            factor = float(match.group("factor"))
            if match.group("op") == "/":
                if factor == 0.0:
                    raise ParameterError(f"constraint {rule!r}: division by zero")
                scale = 1.0 / factor
            else:
                scale = factor
        return cls(target=target, source=source, scale=scale, offset_literal=None)

    def apply(self, fields: dict[str, float]) -> None:
        value = self.offset_literal if self.source is None else fields[self.source] * self.scale
        for name in _expand_param_name(self.target):
            fields[name] = value


@dataclass(frozen=True)
class SweepSpec:
    """Declarative description of a sweep grid."""

    base: SystemParams
    axis1: SweepAxis
    axis2: SweepAxis | None = None
    quantity: str = "g2_numeric"
    constraints: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.quantity not in QUANTITIES:
            raise ParameterError(f"quantity must be one of {QUANTITIES}, got {self.quantity!r}")
        if isinstance(self.constraints, str):
            object.__setattr__(self, "constraints", (self.constraints,))
        else:
            object.__setattr__(self, "constraints", tuple(self.constraints))
        for rule in self.constraints:
            Constraint.parse(rule)
        if self.axis2 is not None:
            overlap = set(_expand_param_name(self.axis1.name)) & set(_expand_param_name(self.axis2.name))
            if overlap:
                raise ParameterError(f"axes {self.axis1.name!r} and {self.axis2.name!r} set the same field(s) {sorted(overlap)}")
        if self.quantity in ("g2_analytic", "both_g2") and self.base.scenario != "A":
            raise ParameterError(f"quantity {self.quantity!r} needs the closed-form route, which is scenario A only")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.axis1.count, self.axis2.count if self.axis2 is not None else 1)

    def column_names(self) -> tuple[str, ...]:
        if self.quantity == "both_g2":
            return ("g2_numeric", "g2_analytic")
        if self.quantity == "populations":
            return tuple(f"p{k}" for k in range(N_POPULATION_COLUMNS))
        return (self.quantity,)

    def params_at(self, i: int, j: int = 0) -> SystemParams:
        """Parameters at grid index (i, j) with constraints applied."""
        fields = {name: getattr(self.base, name) for name in SWEEPABLE_FIELDS}
        for name in _expand_param_name(self.axis1.name):
            fields[name] = self.axis1.values[i]
        if self.axis2 is not None:
            for name in _expand_param_name(self.axis2.name):
                fields[name] = self.axis2.values[j]
        for rule in self.constraints:
            Constraint.parse(rule).apply(fields)
        return self.base.replace(**fields)


class GridMinimum(NamedTuple):
    index: tuple[int, int]
    coords: tuple[float, float | None]
    value: float


@dataclass
class ResultGrid:
    """Raw sweep output: one matrix per quantity column, plus failures.

    Matrices have shape (axis1.count, axis2.count or 1) and hold raw values
    (g² is not log-scaled here; serialization applies log10). Cells listed
    in `failures` are NaN.
    """

    spec: SweepSpec
    planes: dict[str, np.ndarray]
    failures: list[tuple[tuple[int, int], str]] = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        return self.planes[self.spec.column_names()[0]]


def evaluate_point(params: SystemParams, quantity: str) -> dict[str, float]:
    """Compute the requested quantity columns for one parameter point."""
    out: dict[str, float] = {}
    if quantity in ("g2_numeric", "both_g2", "populations"):
        space = params.space()
        rho = steady_state(build_liouvillian(params, space))
        if quantity == "populations":
            pops = fock_populations(rho, space)
            for k in range(N_POPULATION_COLUMNS):
                value = float(pops[k]) if k < pops.size else 0.0
                if not math.isfinite(value):
                    raise NumericalError(f"population p{k} is not finite")
                out[f"p{k}"] = value
            return out
        out["g2_numeric"] = g2_zero(rho, space)
    if quantity in ("g2_analytic", "both_g2"):
        out["g2_analytic"] = analytic_g2(params)
    for name, value in out.items():
        if not math.isfinite(value) or value <= 0.0:
            raise NumericalError(f"{name} = {value!r} is not a positive finite correlation")
    return out


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit argument, else MBL_THREADS, else CPU count."""
    if threads is None:
        env = os.environ.get(THREADS_ENV_VAR)
        if env is not None:
            try:
                threads = int(env)
            except ValueError as exc:
                raise ParameterError(f"{THREADS_ENV_VAR} must be an integer, got {env!r}") from exc
        else:
            threads = os.cpu_count() or 1
    if threads < 1:
        raise ParameterError(f"thread count must be >= 1, got {threads}")
    return threads


def run_sweep(spec: SweepSpec, threads: int | None = None) -> ResultGrid:
    """Evaluate the grid. Point failures are recorded, not raised."""
    n1, n2 = spec.shape
    columns = spec.column_names()
    planes = {name: np.full((n1, n2), np.nan) for name in columns}
    failures: list[tuple[tuple[int, int], str]] = []

    def job(idx: tuple[int, int]) -> tuple[tuple[int, int], dict[str, float] | None, str | None]:
        try:
            params = spec.params_at(*idx)
            return idx, evaluate_point(params, spec.quantity), None
        except (ParameterError, NumericalError, np.linalg.LinAlgError) as exc:
            return idx, None, f"{type(exc).__name__}: {str(exc)[:160]}"

    indices = [(i, j) for i in range(n1) for j in range(n2)]
    workers = resolve_threads(threads)
    if workers == 1 or len(indices) < 2:
        results = map(job, indices)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, indices, chunksize=32))
    for idx, values, tag in results:
        if tag is not None:
            failures.append((idx, tag))
            continue
        assert values is not None
        for name in columns:
            planes[name][idx] = values[name]
    failures.sort(key=lambda item: item[0])
    return ResultGrid(spec=spec, planes=planes, failures=failures)


def find_minimum(grid: ResultGrid, column: str | None = None) -> GridMinimum:
    """Smallest finite cell; ties break to the smallest axis1 then axis2 index."""
    name = column if column is not None else grid.spec.column_names()[0]
    if name not in grid.planes:
        raise ParameterError(f"no column {name!r} in this grid; have {tuple(grid.planes)}")
    plane = grid.planes[name]
    if not np.any(np.isfinite(plane)):
        raise NumericalError("grid has no finite cells to minimize over")
    flat = np.nanargmin(plane)  # C order: first hit has the smallest (i, j)
    i, j = np.unravel_index(flat, plane.shape)
    x1 = grid.spec.axis1.values[i]
    x2 = grid.spec.axis2.values[j] if grid.spec.axis2 is not None else None
    return GridMinimum(index=(int(i), int(j)), coords=(x1, x2), value=float(plane[i, j]))


@dataclass(frozen=True)
class EvolutionJob:
    """Fixed-time-grid master-equation run from the ground product state."""

    base: SystemParams
    t_end: float
    num: int

    def __post_init__(self) -> None:
        if not math.isfinite(self.t_end) or self.t_end <= 0:
            raise ParameterError(f"t_end must be positive, got {self.t_end!r}")
        if not isinstance(self.num, int) or isinstance(self.num, bool) or self.num < 2:
            raise ParameterError(f"num must be an integer >= 2, got {self.num!r}")

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.num)


@dataclass
class TimeSeries:
    """Evolution output: populations p0..p3 and g2 (NaN where undefined)."""

    times: np.ndarray
    planes: dict[str, np.ndarray]


def run_evolution(job: EvolutionJob) -> TimeSeries:
    """Integrate from |lower, 0⟩⟨lower, 0| and track populations and g²(0)."""
    space = job.base.space()
    liouv = build_liouvillian(job.base, space)
    times = job.times()
    rhos = evolve(liouv, projector(space, 0, 0), times)
    planes = {f"p{k}": np.empty(times.size) for k in range(N_POPULATION_COLUMNS)}
    planes["g2"] = np.empty(times.size)
    for t_idx in range(times.size):
        rho = rhos[t_idx]
        pops = fock_populations(rho, space)
        for k in range(N_POPULATION_COLUMNS):
            planes[f"p{k}"][t_idx] = pops[k] if k < pops.size else 0.0
        try:
            planes["g2"][t_idx] = g2_zero(rho, space)
        except NumericalError:
            planes["g2"][t_idx] = np.nan
    return TimeSeries(times=times, planes=planes)


def _fig_common_a(**overrides) -> SystemParams:
    defaults = dict(scenario="A", fock_dim=6, n_th=0.0)
    defaults.update(overrides)
    return SystemParams(**defaults)


def _fig_common_b(**overrides) -> SystemParams:
    defaults = dict(scenario="B", fock_dim=6, n_th=0.0, omega_s=0.0)
    defaults.update(overrides)
    return SystemParams(**defaults)


_DELTA_AXIS = ("delta", -20.0, 20.0, 201)
_KAPPA_VALUES = (0.15, 0.3, 0.45, 1.0)


def _presets() -> dict[str, SweepSpec | EvolutionJob]:
    line = SweepAxis.linspace
    pick = SweepAxis.explicit
    return {
        "fig3a": SweepSpec(
            base=_fig_common_a(omega_s=0.06, omega_d=0.01, kappa_m=1.0, kappa_s=1.0),
            axis1=line(*_DELTA_AXIS),
            axis2=line("g_ms", 0.0, 30.0, 121),
            quantity="g2_numeric",
        ),
        "fig3b": SweepSpec(
            base=_fig_common_a(delta_m=9.8, delta_s=9.8, g_ms=19.6, kappa_m=1.0, kappa_s=1.0),
            axis1=line("omega_s", 0.0, 0.2, 101),
            axis2=line("omega_d", 0.0, 0.05, 101),
            quantity="g2_numeric",
        ),
        "fig4a": SweepSpec(
            base=_fig_common_a(omega_s=0.06, omega_d=0.01),
            axis1=line("g_ms", 0.0, 30.0, 121),
            axis2=line("kappa", 0.05, 1.5, 59),
            quantity="g2_numeric",
            constraints=("delta = g_ms/2",),
        ),
        "fig4b": SweepSpec(
            base=_fig_common_a(delta_m=9.8, delta_s=9.8, g_ms=19.6, omega_d=0.01),
            axis1=line("omega_s", 0.0, 0.2, 101),
            axis2=line("kappa", 0.05, 1.5, 59),
            quantity="g2_numeric",
        ),
        "fig5a": SweepSpec(
            base=_fig_common_a(g_ms=19.6, omega_s=0.06, kappa_m=0.15, kappa_s=0.15),
            axis1=line(*_DELTA_AXIS),
            axis2=pick("omega_d", (0.004, 0.01, 0.012)),
            quantity="both_g2",
        ),
        "fig5b": SweepSpec(
            base=_fig_common_a(g_ms=19.6, omega_d=0.01, kappa_m=0.15, kappa_s=0.15),
            axis1=line(*_DELTA_AXIS),
            axis2=pick("omega_s", (0.001, 0.05, 0.09)),
            quantity="both_g2",
        ),
        "fig6a": SweepSpec(
            base=_fig_common_a(delta_m=9.8, delta_s=9.8, g_ms=19.6, omega_d=0.01),
            axis1=line("omega_s", 0.0, 0.2, 101),
            axis2=pick("kappa", _KAPPA_VALUES),
            quantity="g2_numeric",
        ),
        "fig6b": SweepSpec(
            base=_fig_common_a(delta_m=9.8, delta_s=9.8, g_ms=19.6, omega_s=0.06),
            axis1=line("omega_d", 0.0, 0.05, 101),
            axis2=pick("kappa", _KAPPA_VALUES),
            quantity="g2_numeric",
        ),
        "fig7": EvolutionJob(
            base=_fig_common_a(
                delta_m=9.8, delta_s=9.8, g_ms=19.6, omega_s=0.06, omega_d=0.01, kappa_m=0.15, kappa_s=0.15
            ),
            t_end=100.0,
            num=1001,
        ),
        "fig8": SweepSpec(
            base=_fig_common_b(omega_d=0.01, kappa_m=1.0, kappa_s=1.0),
            axis1=line("delta", -40.0, 40.0, 201),
            axis2=line("g_ms_tilde", 0.0, 60.0, 121),
            quantity="g2_numeric",
        ),
        "fig9a": SweepSpec(
            base=_fig_common_b(omega_d=0.01),
            axis1=line("g_ms_tilde", 0.0, 60.0, 121),
            axis2=line("kappa", 0.05, 1.5, 59),
            quantity="g2_numeric",
            constraints=("delta = g_ms_tilde/2",),
        ),
        "fig9b": SweepSpec(
            base=_fig_common_b(g_ms_tilde=50.1, delta_m=25.05, delta_s=25.05),
            axis1=pick("omega_d", tuple(np.geomspace(0.001, 0.6, 57))),
            axis2=line("kappa", 0.05, 1.5, 59),
            quantity="g2_numeric",
        ),
    }


FIGURE_NAMES = tuple(sorted(_presets()))


def figure_preset(name: str) -> SweepSpec | EvolutionJob:
    """Sweep (or evolution) behind one of the bundled figure presets."""
    presets = _presets()
    if name not in presets:
        raise ParameterError(f"unknown figure {name!r}; available: {', '.join(FIGURE_NAMES)}")
    return presets[name]
