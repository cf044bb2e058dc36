"""Dense complex linear algebra for small matrices.

Everything in this package works on plain numpy arrays of complex128.  The
matrices of interest are tiny (system dimension N <= 8, superoperators up to
64 x 64), so the routines here favour robustness and transparency over
asymptotic speed: Hermitian eigenproblems are solved with cyclic Jacobi
rotations, the matrix exponential uses a [6/6] diagonal Pade approximant with
scaling and squaring, and singular values come from the Gram matrix.  numpy
supplies array arithmetic and the linear solve inside the Pade step; the
decompositions themselves live here so their behaviour is pinned by the test
suite rather than by a library version.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

#: Relative tolerance (with floor 1) for accepting a matrix as Hermitian.
HERMITICITY_TOL = 1e-10
#: Eigenvalues above -PSD_TOL (scaled) count as nonnegative.
PSD_TOL = 1e-10
#: Singular values below KERNEL_TOL times the largest count as zero.
KERNEL_TOL = 1e-9
#: Allowed deviation of a density-matrix trace from one.
TRACE_TOL = 1e-12

_JACOBI_OFF_TARGET = 1e-14
_MAX_JACOBI_SWEEPS = 64


def as_matrix(a) -> np.ndarray:
    """Coerce to a 2-d complex128 array, rejecting non-finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if m.size and not np.isfinite(m).all():
        raise ValueError("matrix has non-finite entries")
    return m


def require_square(m: np.ndarray) -> None:
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def hermiticity_defect(m: np.ndarray) -> float:
    """Largest entrywise deviation of m from its own adjoint."""
    if m.size == 0:
        return 0.0
    return float(np.abs(m - dagger(m)).max())


def require_hermitian(m: np.ndarray, tol: float = HERMITICITY_TOL) -> None:
    require_square(m)
    defect = hermiticity_defect(m)
    scale = max(1.0, float(np.abs(m).max()) if m.size else 0.0)
    if defect > tol * scale:
        raise ValueError(f"matrix is not Hermitian: defect {defect:.3e} exceeds "
                         f"{tol:.1e} * {scale:.3e}")


def frobenius(m: np.ndarray) -> float:
    return float(np.linalg.norm(m))


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization, so vec(A X B) = (B^T (x) A) vec(X)."""
    return np.asarray(m, dtype=complex).reshape(-1, order="F")


def unvec(v, n: int) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape((n, n), order="F")


def _offdiag_norm(b: np.ndarray) -> float:
    d = b.copy()
    np.fill_diagonal(d, 0.0)
    return float(np.linalg.norm(d))


def hermitian_eigen(a, tol: float = HERMITICITY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix via cyclic Jacobi rotations.

    Returns (w, v) with eigenvalues w ascending and unitary v whose columns
    are the matching eigenvectors, so a == v @ diag(w) @ v^dagger up to
    round-off.  Sweeps run until the off-diagonal Frobenius mass falls below
    1e-14 times the Frobenius norm of the input.
    """
    m = as_matrix(a)
    require_hermitian(m, tol)
    n = m.shape[0]
    v = np.eye(n, dtype=complex)
    b = 0.5 * (m + dagger(m))
    scale = frobenius(b)
    if n < 2 or scale == 0.0:
        return np.diag(b).real.copy(), v
    target = _JACOBI_OFF_TARGET * scale
    skip = target / (2.0 * n)
    for _ in range(_MAX_JACOBI_SWEEPS):
        if _offdiag_norm(b) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                beta = b[p, q]
                ab = abs(beta)
                if ab <= skip:
                    continue
                phase = beta / ab
                tau = (b[q, q].real - b[p, p].real) / (2.0 * ab)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(tau, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # Unitary G differs from the identity only at (p, q):
                #   G[p,p]=c, G[p,q]=s, G[q,p]=-s*conj(phase), G[q,q]=c*conj(phase)
                # and b <- G^dagger b G zeroes the (p, q) pair.
                row_p = b[p, :].copy()
                row_q = b[q, :].copy()
                b[p, :] = c * row_p - s * phase * row_q
                b[q, :] = s * row_p + c * phase * row_q
                col_p = b[:, p].copy()
                col_q = b[:, q].copy()
                b[:, p] = c * col_p - s * np.conj(phase) * col_q
                b[:, q] = s * col_p + c * np.conj(phase) * col_q
                b[p, q] = 0.0
                b[q, p] = 0.0
                b[p, p] = b[p, p].real
                b[q, q] = b[q, q].real
                vcol_p = v[:, p].copy()
                vcol_q = v[:, q].copy()
                v[:, p] = c * vcol_p - s * np.conj(phase) * vcol_q
                v[:, q] = s * vcol_p + c * np.conj(phase) * vcol_q
    else:
        raise ArithmeticError("Jacobi iteration did not converge in "
                              f"{_MAX_JACOBI_SWEEPS} sweeps")
    w = np.diag(b).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


# [6/6] diagonal Pade coefficients for exp(x): numerator sum c_j x^j,
# denominator the same series in -x.
_PADE6 = (1.0, 1.0 / 2.0, 5.0 / 44.0, 1.0 / 66.0,
          1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0)


def expm(a, scale: float = 1.0) -> np.ndarray:
    """Matrix exponential exp(scale * a) by Pade approximation with squaring.

    The argument is halved until its 1-norm is at most 0.5, the [6/6]
    diagonal Pade approximant is evaluated there, and the result is squared
    back up.
    """
    m = as_matrix(a)
    require_square(m)
    if not np.isfinite(scale):
        raise ValueError("scale must be finite")
    n = m.shape[0]
    if n == 0:
        return m.copy()
    b = scale * m
    norm = float(np.abs(b).sum(axis=0).max())
    squarings = 0
    if norm > 0.5:
        squarings = max(0, int(math.ceil(math.log2(norm / 0.5))))
        b = b / (2.0 ** squarings)
    eye = np.eye(n, dtype=complex)
    b2 = b @ b
    b4 = b2 @ b2
    b6 = b2 @ b4
    c = _PADE6
    even = c[0] * eye + c[2] * b2 + c[4] * b4 + c[6] * b6
    odd = b @ (c[1] * eye + c[3] * b2 + c[5] * b4)
    r = np.linalg.solve(even - odd, even + odd)
    for _ in range(squarings):
        r = r @ r
    return r


def singular_values(a) -> np.ndarray:
    """Singular values in descending order, from the Gram matrix a^dagger a."""
    m = as_matrix(a)
    if m.size == 0:
        return np.zeros(0)
    w, _ = hermitian_eigen(dagger(m) @ m, tol=1e-8)
    return np.sqrt(np.clip(w, 0.0, None))[::-1]


def operator_norm(a) -> float:
    s = singular_values(a)
    return float(s[0]) if s.size else 0.0


def trace_norm(a) -> float:
    """Sum of singular values of a square matrix."""
    m = as_matrix(a)
    require_square(m)
    return float(singular_values(m).sum())


def kernel_basis(m, tol: float = KERNEL_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical null space of m.

    A direction v counts as null when ||m v|| <= tol * ||m|| * ||v|| with
    ||m|| the largest singular value; the basis comes from the small-singular-
    value eigenvectors of the Gram matrix.  A zero map returns a basis of the
    whole domain.
    """
    a = as_matrix(m)
    n = a.shape[1]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    w, v = hermitian_eigen(dagger(a) @ a, tol=1e-8)
    s = np.sqrt(np.clip(w, 0.0, None))
    smax = float(s.max())
    if smax == 0.0:
        return v
    return v[:, s <= tol * smax]


def is_psd(a, tol: float = PSD_TOL) -> bool:
    """Whether a Hermitian matrix is positive semidefinite within tolerance."""
    m = as_matrix(a)
    require_hermitian(m)
    if m.shape[0] == 0:
        return True
    w, _ = hermitian_eigen(m)
    bound = tol * max(1.0, float(np.abs(w).max()))
    return bool(w[0] >= -bound)


def min_eigenvalue(a, tol: float = HERMITICITY_TOL) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    w, _ = hermitian_eigen(a, tol)
    return float(w[0])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A quantum state: Hermitian, unit trace, positive semidefinite.

    Validation happens at construction; the stored array is read-only.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        require_hermitian(m, HERMITICITY_TOL)
        tr = complex(m.trace())
        if abs(tr - 1.0) > TRACE_TOL * max(1.0, abs(tr)):
            raise ValueError(f"density matrix trace deviates from 1 by {abs(tr - 1.0):.3e}")
        w, _ = hermitian_eigen(m)
        if w[0] < -PSD_TOL:
            raise ValueError(f"density matrix is not PSD: min eigenvalue {w[0]:.3e}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]
