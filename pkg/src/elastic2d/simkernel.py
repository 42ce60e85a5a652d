"""Finite-difference integration of the truncated elastic wave system.

The system is solved as a first-order method-of-lines ODE (u_t = v,
v_t = RHS(u)) on a doubly periodic N x N grid with 4th-order central
differences in space and the classical RK4 scheme in time.

Two structural choices matter more than the formal order:

* the Laplacian in the linear part is assembled through the discrete Hodge
  identity c1^2 grad(div u) + c2^2 perp-grad(perp-div u), which holds to
  round-off because the shift stencils commute;
* every nonlinear term is a discrete divergence of pointwise fluxes.  The
  fluxes are the partial derivatives of the field-form energy density with
  respect to the gradient entries, so the grid sum of the right-hand side
  telescopes to round-off (exact discrete momentum conservation) and the
  semi-discrete flow conserves the discrete energy exactly (the only energy
  drift comes from the RK4 stepping).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .material import DerivedCoefficients, MaterialModel, derived_coefficients


@dataclass(frozen=True)
class Grid:
    """Doubly periodic square grid: N points per axis (power of two), period L."""

    N: int
    L: float

    def __post_init__(self) -> None:
        if self.N < 16 or self.N & (self.N - 1):
            raise ValueError("N must be a power of two, at least 16")
        if self.L <= 0:
            raise ValueError("L must be positive")

    @property
    def h(self) -> float:
        return self.L / self.N

    def axes(self) -> np.ndarray:
        """Coordinates (-L/2 .. L/2 - h) so the origin is a grid point."""
        return (np.arange(self.N) - self.N // 2) * self.h

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        x = self.axes()
        return np.meshgrid(x, x, indexing="ij")


@dataclass(frozen=True)
class NumericMaterial:
    """Double-precision material constants plus nonlinearity switches."""

    c1sq: float
    c2sq: float
    d1: float = 0.0
    d2: float = 0.0
    d3: float = 0.0
    e1: float = 0.0
    e2: float = 0.0
    e3: float = 0.0
    e4: float = 0.0
    e5: float = 0.0
    e6: float = 0.0
    include_n2: bool = True
    include_n3: bool = True

    def __post_init__(self) -> None:
        if not (self.c1sq > self.c2sq > 0):
            raise ValueError("need c1^2 > c2^2 > 0")

    @property
    def c1(self) -> float:
        return math.sqrt(self.c1sq)

    @property
    def c2(self) -> float:
        return math.sqrt(self.c2sq)

    @classmethod
    def from_coefficients(cls, dc: DerivedCoefficients,
                          include_n2: bool = True, include_n3: bool = True) -> "NumericMaterial":
        d = {k: float(v) for k, v in dc.as_dict().items()}
        return cls(include_n2=include_n2, include_n3=include_n3, **d)

    @classmethod
    def from_material(cls, M: MaterialModel,
                      include_n2: bool = True, include_n3: bool = True) -> "NumericMaterial":
        return cls.from_coefficients(derived_coefficients(M), include_n2, include_n3)


# ---------------------------------------------------------------------------
# difference operators
# ---------------------------------------------------------------------------

def _d4(f: np.ndarray, h: float, axis: int) -> np.ndarray:
    """4th-order central difference (-f2 + 8 f1 - 8 f-1 + f-2) / (12 h).

    Grouped as antisymmetric pair differences so constants are annihilated
    exactly, not just to round-off.
    """
    return (8.0 * (np.roll(f, -1, axis) - np.roll(f, 1, axis))
            - (np.roll(f, -2, axis) - np.roll(f, 2, axis))) / (12.0 * h)


def dx(f: np.ndarray, h: float) -> np.ndarray:
    return _d4(f, h, axis=-2)


def dy(f: np.ndarray, h: float) -> np.ndarray:
    return _d4(f, h, axis=-1)


def stencil_wavenumber(k: float, h: float) -> float:
    """Modified wavenumber of the stencil: exact eigenvalue on a Fourier mode."""
    return (8.0 * math.sin(k * h) - math.sin(2.0 * k * h)) / (6.0 * h)


def gradient_fields(u: np.ndarray, h: float) -> tuple[np.ndarray, ...]:
    """G_il = d u^i / d x^l for a (2, N, N) displacement array."""
    g11 = dx(u[0], h)
    g12 = dy(u[0], h)
    g21 = dx(u[1], h)
    g22 = dy(u[1], h)
    return g11, g12, g21, g22


# ---------------------------------------------------------------------------
# right-hand sides
# ---------------------------------------------------------------------------

def linear_rhs(u: np.ndarray, m: NumericMaterial, h: float) -> np.ndarray:
    """c2^2 Lap u + (c1^2 - c2^2) grad div u, assembled via the Hodge split."""
    g11, g12, g21, g22 = gradient_fields(u, h)
    div = g11 + g22
    rot = g12 - g21
    return np.stack([m.c1sq * dx(div, h) + m.c2sq * dy(rot, h),
                     m.c1sq * dy(div, h) - m.c2sq * dx(rot, h)])


def _energy_gradients(div, rot, q, m: NumericMaterial):
    """Partial derivatives of the nonlinear energy density w.r.t. (D, R, Q)."""
    ld = np.zeros_like(div)
    lr = np.zeros_like(div)
    lq = np.zeros_like(div)
    if m.include_n2:
        ld += 3.0 * m.d1 * div ** 2 + m.d2 * rot ** 2 + m.d3 * q
        lr += 2.0 * m.d2 * div * rot
        lq += m.d3 * div
    if m.include_n3:
        ld += 4.0 * m.e1 * div ** 3 + 2.0 * m.e3 * div * rot ** 2 + 2.0 * m.e5 * div * q
        lr += 4.0 * m.e2 * rot ** 3 + 2.0 * m.e3 * div ** 2 * rot + 2.0 * m.e6 * rot * q
        lq += 2.0 * m.e4 * q + m.e5 * div ** 2 + m.e6 * rot ** 2
    return ld, lr, lq


def _nonlinear_fluxes(g11, g12, g21, g22, m: NumericMaterial):
    """Pointwise fluxes F_il = d(l3 + l4)/dG_il via the chain rule through D, R, Q."""
    div = g11 + g22
    rot = g12 - g21
    q = g11 * g22 - g12 * g21
    ld, lr, lq = _energy_gradients(div, rot, q, m)
    f11 = ld + lq * g22
    f12 = lr - lq * g21
    f21 = -lr - lq * g12
    f22 = ld + lq * g11
    return f11, f12, f21, f22


def nonlinear_rhs(u: np.ndarray, m: NumericMaterial, h: float) -> np.ndarray:
    """N2 + N3 in conservative form: outer derivatives of pointwise fluxes."""
    g11, g12, g21, g22 = gradient_fields(u, h)
    f11, f12, f21, f22 = _nonlinear_fluxes(g11, g12, g21, g22, m)
    return np.stack([dx(f11, h) + dy(f12, h),
                     dx(f21, h) + dy(f22, h)])


def full_rhs(u: np.ndarray, m: NumericMaterial, h: float) -> np.ndarray:
    """linear_rhs + nonlinear_rhs sharing one gradient evaluation."""
    g11, g12, g21, g22 = gradient_fields(u, h)
    div = g11 + g22
    rot = g12 - g21
    f11, f12, f21, f22 = _nonlinear_fluxes(g11, g12, g21, g22, m)
    return np.stack([
        dx(m.c1sq * div + f11, h) + dy(m.c2sq * rot + f12, h),
        dx(-m.c2sq * rot + f21, h) + dy(m.c1sq * div + f22, h)])


# ---------------------------------------------------------------------------
# state and stepping
# ---------------------------------------------------------------------------

@dataclass
class State:
    u: np.ndarray  # (2, N, N) displacement
    v: np.ndarray  # (2, N, N) velocity
    t: float

    @classmethod
    def zero(cls, grid: Grid) -> "State":
        shape = (2, grid.N, grid.N)
        return cls(np.zeros(shape), np.zeros(shape), 0.0)


def rk4_step(s: State, dt: float, m: NumericMaterial, h: float) -> State:
    """One classical RK4 step of (u_t, v_t) = (v, RHS(u))."""
    k1u, k1v = s.v, full_rhs(s.u, m, h)
    k2u = s.v + (0.5 * dt) * k1v
    k2v = full_rhs(s.u + (0.5 * dt) * k1u, m, h)
    k3u = s.v + (0.5 * dt) * k2v
    k3v = full_rhs(s.u + (0.5 * dt) * k2u, m, h)
    k4u = s.v + dt * k3v
    k4v = full_rhs(s.u + dt * k3u, m, h)
    u = s.u + (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
    v = s.v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
    return State(u, v, s.t + dt)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sample:
    t: float
    energy: float
    px: float
    py: float
    maxgrad: float
    maxcurl: float

    def finite(self) -> bool:
        return all(math.isfinite(x) for x in
                   (self.energy, self.px, self.py, self.maxgrad, self.maxcurl))


def potential_density(div, rot, q, m: NumericMaterial) -> np.ndarray:
    """l2 + l3 + l4 from the field-form coefficients (switches respected)."""
    pot = 0.5 * m.c1sq * div ** 2 + 0.5 * m.c2sq * rot ** 2 - 2.0 * m.c2sq * q
    if m.include_n2:
        pot += m.d1 * div ** 3 + m.d2 * div * rot ** 2 + m.d3 * div * q
    if m.include_n3:
        pot += (m.e1 * div ** 4 + m.e2 * rot ** 4 + m.e3 * div ** 2 * rot ** 2
                + m.e4 * q ** 2 + m.e5 * div ** 2 * q + m.e6 * rot ** 2 * q)
    return pot


def diagnostics(s: State, m: NumericMaterial, h: float) -> Sample:
    """Energy, momentum, max gradient and max curl of the current state."""
    g11, g12, g21, g22 = gradient_fields(s.u, h)
    div = g11 + g22
    rot = g12 - g21
    q = g11 * g22 - g12 * g21
    kinetic = 0.5 * (s.v[0] ** 2 + s.v[1] ** 2)
    cell = h * h
    energy = float(cell * (np.sum(kinetic) + np.sum(potential_density(div, rot, q, m))))
    px = float(cell * np.sum(s.v[0]))
    py = float(cell * np.sum(s.v[1]))
    maxgrad = float(np.sqrt(np.max(g11 ** 2 + g12 ** 2 + g21 ** 2 + g22 ** 2)))
    maxcurl = float(np.max(np.abs(rot)))
    return Sample(s.t, energy, px, py, maxgrad, maxcurl)


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------

def bump(t: np.ndarray, power: int) -> np.ndarray:
    """Compactly supported polynomial bump (1 - t^2)^power on |t| < 1."""
    inside = np.abs(t) < 1.0
    out = np.zeros_like(t)
    out[inside] = (1.0 - t[inside] ** 2) ** power
    return out


def bump_prime(t: np.ndarray, power: int) -> np.ndarray:
    """d/dt of the bump (still in the normalized argument)."""
    inside = np.abs(t) < 1.0
    out = np.zeros_like(t)
    out[inside] = -2.0 * power * t[inside] * (1.0 - t[inside] ** 2) ** (power - 1)
    return out


@dataclass(frozen=True)
class DataSpec:
    """Declarative initial-data descriptor; builders are looked up by kind."""

    kind: str
    eps: float = 0.0
    r0: float = 0.0
    width: float = 1.0
    power: int = 4
    x0: float = 0.0
    v_eps: float = 0.0
    v_r0: float | None = None
    v_width: float | None = None
    mode: str = "sample"  # radial only: "sample" | "potential"


#: kind -> builder(spec, grid, material) returning (u, v, support_radius).
DATA_BUILDERS: dict[str, Callable] = {}


def register_data_kind(kind: str, builder: Callable) -> None:
    DATA_BUILDERS[kind] = builder


def _build_zero(spec: DataSpec, grid: Grid, m: NumericMaterial):
    shape = (2, grid.N, grid.N)
    return np.zeros(shape), np.zeros(shape), None


def _build_pulse(spec: DataSpec, grid: Grid, m: NumericMaterial, shear: bool):
    """Right-moving plane pulse, exact solution of the linearized system."""
    X, _ = grid.mesh()
    t = (X - spec.x0) / spec.width
    psi = spec.eps * bump(t, spec.power)
    psi_prime = spec.eps * bump_prime(t, spec.power) / spec.width
    speed = m.c2 if shear else m.c1
    comp = 1 if shear else 0
    u = np.zeros((2, grid.N, grid.N))
    v = np.zeros((2, grid.N, grid.N))
    u[comp] = psi
    v[comp] = -speed * psi_prime
    support = abs(spec.x0) + spec.width
    return u, v, support


def _build_pressure_pulse(spec, grid, m):
    return _build_pulse(spec, grid, m, shear=False)


def _build_shear_pulse(spec, grid, m):
    return _build_pulse(spec, grid, m, shear=True)


register_data_kind("zero", _build_zero)
register_data_kind("pressure_pulse", _build_pressure_pulse)
register_data_kind("shear_pulse", _build_shear_pulse)


def build_initial_data(spec: DataSpec, grid: Grid, m: NumericMaterial):
    if spec.kind not in DATA_BUILDERS:
        # the radial builder registers on import of the lab module
        if spec.kind == "radial":
            from . import lab  # noqa: F401
        if spec.kind not in DATA_BUILDERS:
            raise ValueError(f"unknown initial-data kind {spec.kind!r}")
    u, v, support = DATA_BUILDERS[spec.kind](spec, grid, m)
    if support is not None and support >= grid.L / 2:
        raise ValueError("initial data support reaches the periodic boundary")
    return u, v, support


# ---------------------------------------------------------------------------
# the run loop
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SimConfig:
    grid: Grid
    material: NumericMaterial
    T: float
    cfl: float | None = 0.5
    dt: float | None = None
    data: DataSpec = field(default_factory=lambda: DataSpec("zero"))
    theta: float | None = None  # blow-up threshold; default 10 x initial
    stride: int | None = None  # sampling stride in steps

    def __post_init__(self) -> None:
        if self.dt is None:
            if self.cfl is None or not (0.0 < self.cfl <= 1.0):
                raise ValueError("CFL number must lie in (0, 1]")
        elif self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.T < 0:
            raise ValueError("end time must be nonnegative")

    def step_size(self) -> float:
        return self.dt if self.dt is not None else self.cfl * self.grid.h / self.material.c1


@dataclass
class RunReport:
    """Sampled time series plus the termination verdict of one simulation."""

    times: list[float]
    energy: list[float]
    px: list[float]
    py: list[float]
    maxgrad: list[float]
    maxcurl: list[float]
    termination: str  # "completed" | "blowup" | "nonfinite"
    t_star: float | None
    theta: float
    dt: float
    steps: int
    wrap_time: float | None

    def to_json_obj(self) -> dict:
        return {
            "termination": self.termination,
            "t_star": self.t_star,
            "theta": self.theta,
            "dt": self.dt,
            "steps": self.steps,
            "wrap_time": self.wrap_time,
            "series": {
                "t": self.times, "E": self.energy, "Px": self.px, "Py": self.py,
                "maxgrad": self.maxgrad, "maxcurl": self.maxcurl,
            },
        }

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "E", "Px", "Py", "maxgrad", "maxcurl"])
            for row in zip(self.times, self.energy, self.px, self.py,
                           self.maxgrad, self.maxcurl):
                writer.writerow([repr(x) for x in row])


def run(cfg: SimConfig) -> RunReport:
    """Integrate to T or until the gradient threshold / non-finite stop fires.

    Samples are recorded every ``stride`` steps; the blow-up time is the first
    offending sample time.  The time step is shrunk slightly so an integer
    number of steps lands exactly on T.
    """
    grid, m = cfg.grid, cfg.material
    u, v, support = build_initial_data(cfg.data, grid, m)
    state = State(u, v, 0.0)
    wrap_time = None if support is None else (grid.L / 2 - support) / m.c1

    dt_nominal = cfg.step_size()
    n_steps = max(1, math.ceil(cfg.T / dt_nominal - 1e-12)) if cfg.T > 0 else 0
    dt = cfg.T / n_steps if n_steps else dt_nominal
    stride = cfg.stride if cfg.stride is not None else max(1, n_steps // 400)

    first = diagnostics(state, m, grid.h)
    theta = cfg.theta if cfg.theta is not None else max(1.0, 10.0 * first.maxgrad)

    samples = [first]
    termination = "completed"
    t_star = None

    def offending(s: Sample) -> str | None:
        if not s.finite() or not np.all(np.isfinite(state.u)):
            return "nonfinite"
        if s.maxgrad >= theta:
            return "blowup"
        return None

    verdict = offending(first)
    if verdict:
        termination, t_star = verdict, 0.0
        n_steps = 0

    step = 0
    with np.errstate(all="ignore"):
        while step < n_steps:
            state = rk4_step(state, dt, m, grid.h)
            step += 1
            if step % stride == 0 or step == n_steps:
                s = diagnostics(state, m, grid.h)
                samples.append(s)
                verdict = offending(s)
                if verdict:
                    termination, t_star = verdict, s.t
                    break

    return RunReport(
        times=[s.t for s in samples],
        energy=[s.energy for s in samples],
        px=[s.px for s in samples],
        py=[s.py for s in samples],
        maxgrad=[s.maxgrad for s in samples],
        maxcurl=[s.maxcurl for s in samples],
        termination=termination,
        t_star=t_star,
        theta=theta,
        dt=dt,
        steps=step,
        wrap_time=wrap_time)
