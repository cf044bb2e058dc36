"""Propagation through the quantum dynamical semigroup and its diagnostics.

States evolve by exact exponentiation of the generator matrix on
column-stacked states; there is no ODE stepper.  The checks collected here
probe the semigroup laws that a valid generator must satisfy: trace
preservation and complete positivity along the flow (through the Choi
matrix), the semigroup composition law, recovery of the generator from
short-time propagators, a resolvent-based growth-bound inequality, and the
energy-flow identity d<H>/dt = tr(rho D_H).  Positivity of the *inverse*
flow is the one property that may legitimately fail: its failure certifies
that the dynamics is not reversible in time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import gks, linalg
from .linalg import KERNEL_TOL, DensityMatrix, dagger, unvec, vec

#: Spectral weights at or below this are dropped from entropy sums.
ENTROPY_CUTOFF = 1e-14


@dataclass(frozen=True, eq=False)
class Propagator:
    """The channel exp(t L) as a matrix on column-stacked states, t >= 0."""

    dim: int
    t: float
    matrix: np.ndarray


def channel_matrix(liouvillian: gks.GKSLiouvillian, t: float) -> np.ndarray:
    """exp(t L) without the nonnegativity restriction; t < 0 probes backward."""
    return linalg.expm(liouvillian.superop, scale=t)


def propagator(liouvillian: gks.GKSLiouvillian, t: float) -> Propagator:
    if not (t >= 0.0):
        raise ValueError(f"propagation time must be nonnegative, got {t!r}")
    return Propagator(liouvillian.dim, float(t), channel_matrix(liouvillian, t))


def apply_propagator(prop: Propagator, sigma) -> np.ndarray:
    s = linalg.as_matrix(sigma)
    if s.shape != (prop.dim, prop.dim):
        raise ValueError(f"state shape {s.shape} does not match dimension {prop.dim}")
    return unvec(prop.matrix @ vec(s), prop.dim)


def _state_matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.matrix
    return DensityMatrix(rho).matrix


def propagate(liouvillian: gks.GKSLiouvillian, rho, t: float) -> DensityMatrix:
    """Evolve a state forward: rho(t) = exp(t L) rho."""
    m = _state_matrix(rho)
    out = apply_propagator(propagator(liouvillian, t), m)
    return DensityMatrix(out)


def semigroup_residual(liouvillian: gks.GKSLiouvillian, t1: float, t2: float) -> float:
    """|| exp((t1+t2) L) - exp(t2 L) exp(t1 L) ||_F."""
    if t1 < 0 or t2 < 0:
        raise ValueError("semigroup times must be nonnegative")
    m = liouvillian.superop
    whole = linalg.expm(m, scale=t1 + t2)
    stepped = linalg.expm(m, scale=t2) @ linalg.expm(m, scale=t1)
    return linalg.frobenius(whole - stepped)


def _choi_of_matrix(matrix: np.ndarray, n: int) -> np.ndarray:
    c = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        for j in range(n):
            e = np.zeros((n, n), dtype=complex)
            e[i, j] = 1.0
            c += np.kron(e, unvec(matrix @ vec(e), n))
    return c


def choi_matrix(prop: Propagator) -> np.ndarray:
    """C = sum_ij E_ij (x) channel(E_ij); PSD iff the channel is CP."""
    return _choi_of_matrix(prop.matrix, prop.dim)


@dataclass(frozen=True)
class CptpReport:
    trace_residual: float
    hermiticity_residual: float
    choi_min_eigenvalue: float


def cptp_report(prop: Propagator) -> CptpReport:
    """Trace preservation and complete positivity of a propagator.

    trace_residual is max_ij |tr channel(E_ij) - delta_ij|, equivalently the
    deviation of the Choi partial trace from the identity.
    """
    n = prop.dim
    c = choi_matrix(prop)
    tr2 = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            tr2[i, j] = np.trace(c[i * n:(i + 1) * n, j * n:(j + 1) * n])
    trace_residual = float(np.abs(tr2 - np.eye(n)).max())
    herm_residual = linalg.hermiticity_defect(c)
    w, _ = linalg.hermitian_eigen(0.5 * (c + dagger(c)), tol=1.0)
    return CptpReport(trace_residual, herm_residual, float(w[0]))


def generator_recovery_residual(liouvillian: gks.GKSLiouvillian, eps: float) -> float:
    """|| (exp(eps L) - I)/eps - L ||_F; decays linearly in eps."""
    if not (eps > 0.0):
        raise ValueError("eps must be positive")
    m = liouvillian.superop
    eye = np.eye(m.shape[0], dtype=complex)
    return linalg.frobenius((linalg.expm(m, scale=eps) - eye) / eps - m)


def hille_yosida_probe(liouvillian: gks.GKSLiouvillian, growth_bound: float,
                       bound_constant: float, zeta_grid, max_power: int = 4) -> float:
    """Largest value of ||(zeta I - L)^-m|| (zeta - gamma)^m / C over the probe set.

    Values at or below 1 are consistent with the semigroup bound
    ||exp(t L)|| <= C exp(gamma t); the norm is the matrix 2-norm on
    column-stacked states.  Grid points must exceed the growth bound and stay
    clear of the spectrum of L.
    """
    if bound_constant <= 0:
        raise ValueError("bound constant must be positive")
    if max_power < 1:
        raise ValueError("max_power must be at least 1")
    m = liouvillian.superop
    eye = np.eye(m.shape[0], dtype=complex)
    worst = 0.0
    for zeta in zeta_grid:
        zeta = float(zeta)
        if zeta <= growth_bound:
            raise ValueError(f"probe point {zeta} does not exceed the growth bound "
                             f"{growth_bound}")
        shifted = zeta * eye - m
        smallest = float(linalg.singular_values(shifted)[-1])
        if smallest <= 1e-8:
            raise ValueError(f"probe point {zeta} is within 1e-8 of the spectrum")
        resolvent = np.linalg.solve(shifted, eye)
        power = eye
        for k in range(1, max_power + 1):
            power = power @ resolvent
            value = linalg.operator_norm(power) * (zeta - growth_bound) ** k / bound_constant
            worst = max(worst, value)
    return worst


@dataclass(frozen=True, eq=False)
class StationaryFamily:
    """Null space of the generator plus density matrices sampled from it."""

    kernel: tuple
    density_matrices: tuple


def stationary_states(liouvillian: gks.GKSLiouvillian, tol: float = KERNEL_TOL,
                      samples: int = 64, seed: int = 0) -> StationaryFamily:
    """Stationary subspace of the flow and example stationary states.

    The kernel of the generator matrix is returned as matrices.  Because the
    generator commutes with the adjoint, the kernel is spanned by Hermitian
    elements; random real combinations of those with nonzero trace are
    normalized and kept when they pass the density-matrix checks.
    """
    n = liouvillian.dim
    null = linalg.kernel_basis(liouvillian.superop, tol)
    mats = tuple(unvec(null[:, k], n) for k in range(null.shape[1]))
    hermitian_parts = []
    for m in mats:
        hermitian_parts.append(0.5 * (m + dagger(m)))
        hermitian_parts.append((m - dagger(m)) / 2j)
    hermitian_parts = [h for h in hermitian_parts if linalg.frobenius(h) > 1e-12]
    found = []
    if hermitian_parts and samples > 0:
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            coeffs = rng.standard_normal(len(hermitian_parts))
            cand = sum(c * h for c, h in zip(coeffs, hermitian_parts))
            tr = cand.trace().real
            if abs(tr) < 1e-8:
                continue
            cand = cand / tr
            try:
                found.append(DensityMatrix(cand))
            except ValueError:
                continue
    return StationaryFamily(mats, tuple(found))


def von_neumann_entropy(rho, cutoff: float = ENTROPY_CUTOFF) -> float:
    """-sum p ln p over the spectrum, dropping weights at or below cutoff."""
    m = _state_matrix(rho)
    w, _ = linalg.hermitian_eigen(m)
    total = 0.0
    for p in w:
        if p > cutoff:
            total -= p * math.log(p)
    return total


def energy_flow_residual(liouvillian: gks.GKSLiouvillian, rho,
                         dt: Optional[float] = None) -> float:
    """Gap between the finite-difference d<H>/dt and tr(rho D_H).

    The derivative is a central difference of tr(H rho(t)) at t = 0; the
    default step is 1e-3 scaled down for stiff generators.
    """
    m = _state_matrix(rho)
    if dt is None:
        norm = linalg.frobenius(liouvillian.superop)
        dt = 1e-3 * min(1.0, 1.0 / norm) if norm > 0 else 1e-3
    if not (dt > 0.0):
        raise ValueError("dt must be positive")
    h = liouvillian.hamiltonian
    forward = unvec(channel_matrix(liouvillian, dt) @ vec(m), liouvillian.dim)
    backward = unvec(channel_matrix(liouvillian, -dt) @ vec(m), liouvillian.dim)
    fd = (np.trace(h @ forward) - np.trace(h @ backward)).real / (2.0 * dt)
    exact = np.trace(m @ gks.dissipation_operator(liouvillian)).real
    return abs(fd - exact)


class TimeReversalWitness(NamedTuple):
    t: float
    choi_min_eigenvalue: float


def time_reversal_witness(liouvillian: gks.GKSLiouvillian, t_grid,
                          tol: float = 1e-9) -> Optional[TimeReversalWitness]:
    """Search for a time where the inverse flow stops being positive.

    For each t in the grid the Choi matrix of exp(-t L) is examined; a
    minimum eigenvalue below -tol certifies that exp(t L) has no completely
    positive inverse, hence the dynamics is not reversible.  Returns the
    worst violation, or None if every probe stays positive.  This is a
    sufficient certificate only: a reversible-looking grid proves nothing
    beyond the points probed.
    """
    n = liouvillian.dim
    worst: Optional[TimeReversalWitness] = None
    for t in t_grid:
        t = float(t)
        if t < 0:
            raise ValueError("probe times must be nonnegative")
        c = _choi_of_matrix(channel_matrix(liouvillian, -t), n)
        w, _ = linalg.hermitian_eigen(0.5 * (c + dagger(c)), tol=1.0)
        low = float(w[0])
        if low < -tol and (worst is None or low < worst.choi_min_eigenvalue):
            worst = TimeReversalWitness(t, low)
    return worst
