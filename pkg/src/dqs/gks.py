"""GKS (Lindblad) generators in standard form and dissipation diagnostics.

A generator acts on density matrices as

    L(sigma) = -i [H, sigma]
               + sum_{i,j < N^2} a_ij (F_i sigma F_j^+ -
                                       (F_j^+ F_i sigma + sigma F_j^+ F_i) / 2)

where H is Hermitian, (a_ij) is the Hermitian positive-semidefinite
Kossakowski matrix, and F_1 .. F_{N^2} is a trace-orthonormal operator basis
whose last element is I/sqrt(N) and whose other elements are traceless.  The
Kossakowski entries are always coordinates with respect to that orthonormal
basis.

The central diagnostic is the dissipation operator

    D_H = sum_{i,j} a_ij (F_j^+ H F_i - (F_j^+ F_i H + H F_j^+ F_i) / 2),

the Hermitian observable whose expectation value in the current state gives
d<H>/dt.  A model is *dispersive* when D_H vanishes: its dissipator is
active (the dynamics is not unitary, and generally not time-reversible) yet
energy is conserved exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import linalg
from .linalg import HERMITICITY_TOL, KERNEL_TOL, PSD_TOL, dagger


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    """Trace-orthonormal operator basis with the scaled identity last.

    Elements need not be Hermitian; any unitary mixing of the traceless part
    of the canonical basis is accepted.
    """

    dim: int
    elements: tuple

    def __post_init__(self):
        n = self.dim
        if n < 2:
            raise ValueError("basis needs dimension >= 2")
        if len(self.elements) != n * n:
            raise ValueError(f"expected {n * n} basis elements, got {len(self.elements)}")
        mats = []
        for k, e in enumerate(self.elements):
            m = linalg.as_matrix(e)
            if m.shape != (n, n):
                raise ValueError(f"basis element {k} has shape {m.shape}, expected {(n, n)}")
            m = m.copy()
            m.flags.writeable = False
            mats.append(m)
        for k in range(n * n - 1):
            if abs(mats[k].trace()) > 1e-12:
                raise ValueError(f"basis element {k} is not traceless")
        if np.abs(mats[-1] - np.eye(n) / math.sqrt(n)).max() > 1e-12:
            raise ValueError("last basis element must be I/sqrt(N)")
        gram = np.array([[np.trace(dagger(x) @ y) for y in mats] for x in mats])
        if np.abs(gram - np.eye(n * n)).max() > 1e-12:
            raise ValueError("basis is not orthonormal under the trace inner product")
        object.__setattr__(self, "elements", tuple(mats))

    @property
    def traceless(self) -> tuple:
        """The N^2 - 1 elements spanning the traceless subspace."""
        return self.elements[:-1]


@lru_cache(maxsize=None)
def gell_mann_basis(dim: int) -> OperatorBasis:
    """Generalized Gell-Mann basis for the given dimension.

    Ordering: symmetric off-diagonal elements (pairs (j,k), j<k, in
    lexicographic order), then the antisymmetric off-diagonal elements in the
    same pair order, then the diagonal elements, then I/sqrt(N).  For N = 2
    this is exactly (sx, sy, sz, I) / sqrt(2).
    """
    if dim < 2:
        raise ValueError("dimension must be >= 2")
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    elems = []
    for j in range(dim):
        for k in range(j + 1, dim):
            m = np.zeros((dim, dim), dtype=complex)
            m[j, k] = m[k, j] = inv_sqrt2
            elems.append(m)
    for j in range(dim):
        for k in range(j + 1, dim):
            m = np.zeros((dim, dim), dtype=complex)
            m[j, k] = -1j * inv_sqrt2
            m[k, j] = 1j * inv_sqrt2
            elems.append(m)
    for level in range(1, dim):
        m = np.zeros((dim, dim), dtype=complex)
        norm = 1.0 / math.sqrt(level * (level + 1))
        for i in range(level):
            m[i, i] = norm
        m[level, level] = -level * norm
        elems.append(m)
    elems.append(np.eye(dim, dtype=complex) / math.sqrt(dim))
    return OperatorBasis(dim, tuple(elems))


@dataclass(frozen=True, eq=False)
class KossakowskiMatrix:
    """Hermitian PSD coefficient matrix of a dissipator, shape (N^2-1)^2."""

    dim: int
    matrix: np.ndarray

    def __post_init__(self):
        k = self.dim * self.dim - 1
        m = linalg.as_matrix(self.matrix)
        if m.shape != (k, k):
            raise ValueError(f"Kossakowski matrix must be {k} x {k} for dimension "
                             f"{self.dim}, got {m.shape}")
        linalg.require_hermitian(m, 1e-12)
        if not linalg.is_psd(m, PSD_TOL):
            w, _ = linalg.hermitian_eigen(m)
            raise ValueError(f"Kossakowski matrix is not PSD: min eigenvalue {w[0]:.3e}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def _kossakowski_array(a, basis: OperatorBasis) -> np.ndarray:
    arr = a.matrix if isinstance(a, KossakowskiMatrix) else linalg.as_matrix(a)
    k = basis.dim * basis.dim - 1
    if arr.shape != (k, k):
        raise ValueError(f"coefficient matrix must be {k} x {k}, got {arr.shape}")
    return arr


def _column_mixed(a_arr: np.ndarray, f_stack: np.ndarray) -> np.ndarray:
    # G_j = sum_i a_ij F_i, so that sum_ij a_ij F_i . F_j^+ = sum_j G_j . F_j^+
    return np.einsum("ij,ikl->jkl", a_arr, f_stack)


def dissipator_apply(a, basis: OperatorBasis, sigma) -> np.ndarray:
    """Apply the dissipator with coefficients a to the matrix sigma."""
    arr = _kossakowski_array(a, basis)
    s = linalg.as_matrix(sigma)
    if s.shape != (basis.dim, basis.dim):
        raise ValueError(f"state has shape {s.shape}, expected square of dim {basis.dim}")
    f = np.stack(basis.traceless)
    g = _column_mixed(arr, f)
    p = np.einsum("jlk,jlm->km", f.conj(), g)
    out = np.zeros_like(s)
    for j in range(f.shape[0]):
        out += g[j] @ s @ dagger(f[j])
    return out - 0.5 * (p @ s + s @ p)


@dataclass(frozen=True, eq=False)
class GKSLiouvillian:
    """A GKS generator; caches its matrix on vectorized states at build time."""

    hamiltonian: np.ndarray
    kossakowski: KossakowskiMatrix
    basis: OperatorBasis
    superop: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        h = linalg.as_matrix(self.hamiltonian)
        n = self.basis.dim
        if h.shape != (n, n):
            raise ValueError(f"Hamiltonian shape {h.shape} does not match basis dimension {n}")
        linalg.require_hermitian(h, HERMITICITY_TOL)
        if self.kossakowski.dim != n:
            raise ValueError("Kossakowski dimension does not match basis dimension")
        h = h.copy()
        h.flags.writeable = False
        object.__setattr__(self, "hamiltonian", h)

        f = np.stack(self.basis.traceless)
        a_arr = self.kossakowski.matrix
        g = _column_mixed(a_arr, f)
        p = np.einsum("jlk,jlm->km", f.conj(), g)
        eye = np.eye(n, dtype=complex)
        m = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
        for j in range(f.shape[0]):
            m += np.kron(f[j].conj(), g[j])
        m -= 0.5 * (np.kron(eye, p) + np.kron(p.T, eye))
        m.flags.writeable = False
        object.__setattr__(self, "superop", m)

    @property
    def dim(self) -> int:
        return self.basis.dim


def liouvillian_apply(liouvillian: GKSLiouvillian, sigma) -> np.ndarray:
    """L(sigma), evaluated directly from the standard form."""
    s = linalg.as_matrix(sigma)
    h = liouvillian.hamiltonian
    return (-1j * (h @ s - s @ h)
            + dissipator_apply(liouvillian.kossakowski, liouvillian.basis, s))


def liouvillian_matrix(liouvillian: GKSLiouvillian) -> np.ndarray:
    """The generator as an N^2 x N^2 matrix on column-stacked states."""
    return liouvillian.superop


def dissipation_from_parts(a, basis: OperatorBasis, hamiltonian) -> np.ndarray:
    """Dissipation operator D_H for explicit coefficients (PSD not required).

    The sign-indefinite version is what the kernel solver needs; validated
    generators should go through dissipation_operator instead.
    """
    arr = _kossakowski_array(a, basis)
    h = linalg.as_matrix(hamiltonian)
    f = np.stack(basis.traceless)
    g = _column_mixed(arr, f)
    p = np.einsum("jlk,jlm->km", f.conj(), g)
    out = np.zeros_like(h)
    for j in range(f.shape[0]):
        out += dagger(f[j]) @ h @ g[j]
    return out - 0.5 * (p @ h + h @ p)


def dissipation_operator(liouvillian: GKSLiouvillian) -> np.ndarray:
    """The Hermitian observable D_H with d<H>/dt = tr(rho D_H)."""
    return dissipation_from_parts(liouvillian.kossakowski, liouvillian.basis,
                                  liouvillian.hamiltonian)


class DispersiveVerdict(NamedTuple):
    dispersive: bool
    residual: float


def is_dispersive(liouvillian: GKSLiouvillian, tol: float = KERNEL_TOL) -> DispersiveVerdict:
    """Whether D_H vanishes, i.e. the model conserves energy exactly.

    The residual is the Frobenius norm of D_H; the verdict compares it to
    tol * max(1, ||H||_F).
    """
    residual = linalg.frobenius(dissipation_operator(liouvillian))
    bound = tol * max(1.0, linalg.frobenius(liouvillian.hamiltonian))
    return DispersiveVerdict(residual <= bound, residual)


# ------------------------------------------------------------------
# Real coordinates for Hermitian matrices: diagonal entries first, then
# (real, imag) of each upper-triangle entry in row-major order.

def hermitian_coords(m) -> np.ndarray:
    a = linalg.as_matrix(m)
    linalg.require_square(a)
    a = 0.5 * (a + dagger(a))
    n = a.shape[0]
    out = [a[i, i].real for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            out.append(a[i, j].real)
            out.append(a[i, j].imag)
    return np.array(out)


def coords_to_hermitian(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (n * n,):
        raise ValueError(f"expected {n * n} coordinates, got shape {x.shape}")
    a = np.zeros((n, n), dtype=complex)
    for i in range(n):
        a[i, i] = x[i]
    pos = n
    for i in range(n):
        for j in range(i + 1, n):
            a[i, j] = x[pos] + 1j * x[pos + 1]
            a[j, i] = x[pos] - 1j * x[pos + 1]
            pos += 2
    return a


class KernelSample(NamedTuple):
    coefficients: np.ndarray
    matrix: np.ndarray
    psd: bool


@dataclass(frozen=True, eq=False)
class DispersionKernel:
    """Null space of a |-> D_H(a) over Hermitian coefficient matrices.

    kernel holds Hermitian matrices whose coordinate vectors are orthonormal;
    element_psd flags each of them (and its negation) as PSD or not, and
    samples records random combinations drawn inside the kernel together
    with their PSD verdicts.  map_matrix is the real matrix of the
    constraint map, size N^2 x (N^2-1)^2.
    """

    kernel: tuple
    element_psd: tuple
    negation_psd: tuple
    samples: tuple
    map_matrix: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.kernel)


def dispersive_kossakowski_kernel(hamiltonian, basis: OperatorBasis,
                                  tol: float = KERNEL_TOL,
                                  psd_tol: float = 1e-8,
                                  samples: int = 200,
                                  seed: int = 0) -> DispersionKernel:
    """All Hermitian coefficient matrices making the given H dispersive.

    Builds the real-linear map a |-> D_H(a) column by column over the real
    coordinates of Hermitian (N^2-1) x (N^2-1) matrices and extracts its
    null space.  Valid dissipators in the kernel are its PSD elements; since
    PSD-ness is not a linear condition, it is reported by inspection: each
    kernel basis element (and its negation) is flagged, and `samples` random
    unit-norm combinations (half signed Gaussian, half with nonnegative
    coefficients) are drawn from a generator seeded by `seed` and flagged
    likewise.
    """
    h = linalg.as_matrix(hamiltonian)
    n = basis.dim
    if h.shape != (n, n):
        raise ValueError(f"Hamiltonian shape {h.shape} does not match basis dimension {n}")
    linalg.require_hermitian(h, HERMITICITY_TOL)
    k = n * n - 1
    cols = []
    for idx in range(k * k):
        x = np.zeros(k * k)
        x[idx] = 1.0
        dh = dissipation_from_parts(coords_to_hermitian(x, k), basis, h)
        cols.append(hermitian_coords(dh))
    phi = np.array(cols).T
    null = linalg.kernel_basis(phi, tol)
    if null.size and np.abs(null.imag).max() > 1e-12:
        raise ArithmeticError("kernel of a real map came out complex")
    mats = tuple(coords_to_hermitian(null[:, c].real, k) for c in range(null.shape[1]))
    element_psd = tuple(linalg.is_psd(m, psd_tol) for m in mats)
    negation_psd = tuple(linalg.is_psd(-m, psd_tol) for m in mats)

    drawn = []
    dim = len(mats)
    if dim and samples > 0:
        rng = np.random.default_rng(seed)
        coeffs = rng.standard_normal((samples, dim))
        coeffs[samples // 2:] = np.abs(coeffs[samples // 2:])
        for c in coeffs:
            norm = np.linalg.norm(c)
            if norm == 0.0:
                continue
            c = c / norm
            m = sum(ci * mi for ci, mi in zip(c, mats))
            drawn.append(KernelSample(c, m, linalg.is_psd(m, psd_tol)))
    return DispersionKernel(mats, element_psd, negation_psd, tuple(drawn), phi)


def lindblad_operators(a, basis: OperatorBasis) -> list:
    """Jump operators V_k with dissipator sum_k (V_k . V_k^+ - {V_k^+ V_k, .}/2).

    Diagonalizes the coefficient matrix, keeps the strictly positive part of
    the spectrum and absorbs each eigenvalue into the operator scale, so no
    prefactor remains in front of the sum.
    """
    arr = _kossakowski_array(a, basis)
    linalg.require_hermitian(arr, 1e-12)
    if arr.shape[0] == 0:
        return []
    w, u = linalg.hermitian_eigen(arr)
    wmax = float(np.abs(w).max()) if w.size else 0.0
    if w.size and w[0] < -PSD_TOL * max(1.0, wmax):
        raise ValueError(f"coefficient matrix is not PSD: min eigenvalue {w[0]:.3e}")
    f = np.stack(basis.traceless)
    ops = []
    threshold = PSD_TOL * max(1.0, wmax)
    for k in range(w.size - 1, -1, -1):
        if w[k] <= threshold:
            break
        v = math.sqrt(w[k]) * np.einsum("i,ikl->kl", u[:, k], f)
        ops.append(v)
    return ops


def qubit_liouvillian(e0: float, e1: float, lam: float, axis: int = 3) -> GKSLiouvillian:
    """Two-level model: H = diag(E1, E0) and one damping rate on a Pauli axis.

    Basis order puts the higher level first.  With axis=3 the dissipator
    commutes with H (coherences decay at rate lam, populations freeze): the
    dispersive model.  axis=1 or 2 moves the damping onto another Pauli
    direction, which trades energy with the environment.
    """
    if lam < 0:
        raise ValueError("damping rate must be nonnegative")
    if axis not in (1, 2, 3):
        raise ValueError("axis must be 1, 2, or 3")
    basis = gell_mann_basis(2)
    a = np.zeros((3, 3))
    a[axis - 1, axis - 1] = lam
    h = np.diag([complex(e1), complex(e0)])
    return GKSLiouvillian(h, KossakowskiMatrix(2, a), basis)
