"""Open-system dynamics: Liouvillian construction, steady state, evolution.

Density matrices are vectorized by column stacking, so vec(A ρ B) =
(Bᵀ ⊗ A) vec(ρ) and the master equation becomes d vec(ρ)/dt = L vec(ρ)
with L a dense total_dim² × total_dim² complex matrix. Decay channels enter
as (rate/2)(2 C ρ C† - C†C ρ - ρ C†C).

Scenario A couples the oscillator to a thermal bath (occupation n_th) and
damps the reduced two-level system; scenario B keeps only the two zero-
temperature channels.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .core import Space, annihilation, expectation, qubit_ops
from .errors import NumericalError, ParameterError
from .model import SystemParams, build_h_eff

STEADY_RESIDUAL_TOL = 1e-10
EVOLVE_RTOL = 1e-10
EVOLVE_ATOL = 1e-14


def vectorize(rho: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {rho.shape}")
    return rho.flatten(order="F")


def unvectorize(vec: np.ndarray, dim: int) -> np.ndarray:
    """Inverse of `vectorize`."""
    vec = np.asarray(vec)
    if vec.size != dim * dim:
        raise ValueError(f"vector of size {vec.size} does not fold into {dim}x{dim}")
    return vec.reshape((dim, dim), order="F")


def hamiltonian_superop(h: np.ndarray) -> np.ndarray:
    """Superoperator for -i[H, ρ]."""
    d = h.shape[0]
    eye = np.eye(d, dtype=complex)
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def dissipator_superop(c: np.ndarray) -> np.ndarray:
    """Superoperator for 2 C ρ C† - C†C ρ - ρ C†C (rate factored out)."""
    d = c.shape[0]
    eye = np.eye(d, dtype=complex)
    cdc = c.conj().T @ c
    return 2.0 * np.kron(c.conj(), c) - np.kron(eye, cdc) - np.kron(cdc.T, eye)


def build_liouvillian(params: SystemParams, space: Space | None = None) -> np.ndarray:
    """Dense generator of the master equation for the given parameters.

    Scenario A: oscillator loss at (kappa_m/2)(n_th + 1), oscillator thermal
    excitation at (kappa_m/2) n_th, two-level decay at kappa_s/2.
    Scenario B: the two loss channels only (n_th is not used).
    """
    if space is None:
        space = params.space()
    m = annihilation(space)
    sm, _, _, _ = qubit_ops(space)
    liouv = hamiltonian_superop(build_h_eff(params, space))
    if params.scenario == "A":
        liouv = liouv + 0.5 * params.kappa_m * (params.n_th + 1.0) * dissipator_superop(m)
        if params.n_th > 0.0:
            liouv = liouv + 0.5 * params.kappa_m * params.n_th * dissipator_superop(m.conj().T)
    else:
        liouv = liouv + 0.5 * params.kappa_m * dissipator_superop(m)
    liouv = liouv + 0.5 * params.kappa_s * dissipator_superop(sm)
    return liouv


def steady_state(liouv: np.ndarray) -> np.ndarray:
    """Null vector of the Liouvillian, normalized to unit trace.

    One row is traded for the trace constraint vec(I)ᵀ and the resulting
    system is LU-solved; the output is symmetrized. Requires both decay
    rates positive for uniqueness; a singular or ill-conditioned system
    raises NumericalError.
    """
    liouv = np.asarray(liouv)
    d2 = liouv.shape[0]
    d = math.isqrt(d2)
    if liouv.ndim != 2 or liouv.shape != (d2, d2) or d * d != d2:
        raise ValueError(f"Liouvillian shape {liouv.shape} is not a square of a square dimension")
    trace_row = np.zeros(d2, dtype=complex)
    trace_row[(d + 1) * np.arange(d)] = 1.0
    a = liouv.copy()
    a[0, :] = trace_row
    b = np.zeros(d2, dtype=complex)
    b[0] = 1.0
    try:
        with warnings.catch_warnings():
            # conditioning complaints are redundant: the residual is checked below
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            x = scipy.linalg.solve(a, b)
    except scipy.linalg.LinAlgError as exc:
        raise NumericalError(f"steady state is degenerate or undefined: {exc}") from exc
    if not np.all(np.isfinite(x.view(float))):
        raise NumericalError("steady-state solve produced non-finite entries")
    residual = np.max(np.abs(liouv @ x))
    if residual > STEADY_RESIDUAL_TOL:
        raise NumericalError(f"steady-state residual {residual:.3e} exceeds {STEADY_RESIDUAL_TOL:.0e}")
    rho = unvectorize(x, d)
    return 0.5 * (rho + rho.conj().T)


def evolve(liouv: np.ndarray, rho0: np.ndarray, times: np.ndarray) -> np.ndarray:
    """Integrate the master equation; returns snapshots stacked on axis 0.

    `times` must be increasing and start at the time where `rho0` holds.
    Uses adaptive 4th/5th-order Runge-Kutta (rtol 1e-10, atol 1e-14).
    """
    liouv = np.asarray(liouv)
    rho0 = np.asarray(rho0, dtype=complex)
    d2 = liouv.shape[0]
    d = math.isqrt(d2)
    if rho0.shape != (d, d):
        raise ValueError(f"rho0 shape {rho0.shape} does not match Liouvillian dimension {d}")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ParameterError("times must be a non-empty 1-d array")
    if times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ParameterError("times must be strictly increasing and start at >= 0")
    if times.size == 1:
        return rho0[np.newaxis].copy()
    sol = solve_ivp(
        lambda _t, y: liouv @ y,
        (times[0], times[-1]),
        vectorize(rho0),
        method="RK45",
        t_eval=times,
        rtol=EVOLVE_RTOL,
        atol=EVOLVE_ATOL,
    )
    if not sol.success:
        raise NumericalError(f"time integration failed: {sol.message}")
    return np.stack([unvectorize(sol.y[:, k], d) for k in range(times.size)])


def _real_trace(op: np.ndarray, rho: np.ndarray, what: str) -> float:
    value = expectation(op, rho)
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise NumericalError(f"{what} has a non-negligible imaginary part ({value.imag:.3e})")
    return value.real


def mean_occupation(rho: np.ndarray, space: Space) -> float:
    """⟨m†m⟩ for the oscillator mode."""
    m = annihilation(space)
    return _real_trace(m.conj().T @ m, rho, "mean occupation")


def g2_zero(rho: np.ndarray, space: Space) -> float:
    """Equal-time second-order correlation ⟨m†m†mm⟩ / ⟨m†m⟩².

    Raises NumericalError when the mode is unoccupied (undefined ratio).
    """
    m = annihilation(space)
    md = m.conj().T
    numerator = _real_trace(md @ md @ m @ m, rho, "two-quantum moment")
    occupation = _real_trace(md @ m, rho, "mean occupation")
    if occupation <= 0.0 or occupation * occupation < 1e-300:
        raise NumericalError("g2 is undefined: oscillator mode is unoccupied")
    return numerator / (occupation * occupation)


def fock_populations(rho: np.ndarray, space: Space) -> np.ndarray:
    """Oscillator-level populations P_n, traced over the two-level system."""
    rho = np.asarray(rho)
    if rho.shape != (space.total_dim, space.total_dim):
        raise ValueError(f"rho shape {rho.shape} does not match space dimension {space.total_dim}")
    diag = np.real(np.diagonal(rho))
    return diag[: space.fock_dim] + diag[space.fock_dim :]


def density_diagnostics(rho: np.ndarray) -> dict[str, float]:
    """Validity numbers for a density matrix: trace, Hermiticity, positivity."""
    rho = np.asarray(rho)
    herm_defect = float(np.max(np.abs(rho - rho.conj().T)))
    trace = complex(np.trace(rho))
    eigvals = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return {
        "trace_real": trace.real,
        "trace_imag": trace.imag,
        "hermiticity_defect": herm_defect,
        "min_eigenvalue": float(eigvals[0]),
        "max_eigenvalue": float(eigvals[-1]),
    }
