"""Small dense linear-algebra helpers shared across modules."""

from __future__ import annotations

import numpy as np


def dagger(x: np.ndarray) -> np.ndarray:
    return x.conj().T


def frob(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


def opnorm(x: np.ndarray) -> float:
    """Operator norm (largest singular value)."""
    if x.size == 0:
        return 0.0
    return float(np.linalg.norm(x, 2))


def herm_defect(x: np.ndarray) -> float:
    return float(np.max(np.abs(x - x.conj().T))) if x.size else 0.0


def is_hermitian(x: np.ndarray, tol: float) -> bool:
    return herm_defect(x) <= tol


def min_eig(x: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part of x."""
    h = 0.5 * (x + x.conj().T)
    return float(np.linalg.eigvalsh(h)[0])


def principal_sqrt(q: np.ndarray) -> np.ndarray:
    """Principal square root of a Hermitian positive definite matrix."""
    evals, vecs = np.linalg.eigh(0.5 * (q + q.conj().T))
    if evals[0] <= 0.0:
        raise np.linalg.LinAlgError(
            f"matrix not positive definite (lambda_min {evals[0]:.3g})"
        )
    return (vecs * np.sqrt(evals)) @ vecs.conj().T


def cond_hermitian(q: np.ndarray) -> float:
    evals = np.linalg.eigvalsh(0.5 * (q + q.conj().T))
    if evals[0] <= 0.0:
        return float("inf")
    return float(evals[-1] / evals[0])


def real_vec(x: np.ndarray) -> np.ndarray:
    """Flatten a complex matrix into a real vector (re parts then im parts)."""
    return np.concatenate([x.real.ravel(), x.imag.ravel()])


def real_unvec(v: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    half = v.size // 2
    return (v[:half] + 1j * v[half:]).reshape(shape)


def random_complex(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussian array (unit total variance per entry)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def orthonormalize_rows(rows: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (as rows) of the row span, rank decided at rtol."""
    if rows.size == 0:
        return rows.reshape(0, rows.shape[-1] if rows.ndim == 2 else 0)
    _, s, vt = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((0, rows.shape[1]))
    rank = int(np.sum(s > rtol * s[0]))
    return vt[:rank]


def nullspace(mat: np.ndarray, rtol: float = 1e-10, atol: float = 0.0) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of a real or complex matrix.

    atol guards against all-noise matrices, where a purely relative cutoff
    would report full rank.
    """
    if mat.size == 0:
        return np.eye(mat.shape[1])
    # Right singular vectors are complete whenever rows >= cols.
    _, s, vt = np.linalg.svd(mat, full_matrices=mat.shape[0] < mat.shape[1])
    cutoff = max(rtol * (s[0] if s.size else 1.0), atol)
    rank = int(np.sum(s > cutoff))
    return vt[rank:].conj().T


def project_coeffs(basis_rows: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Coefficients of v against orthonormal rows (real inner product)."""
    return basis_rows @ v


def project_residual(basis_rows: np.ndarray, v: np.ndarray) -> float:
    if basis_rows.shape[0] == 0:
        return float(np.linalg.norm(v))
    coeffs = basis_rows @ v
    return float(np.linalg.norm(v - basis_rows.T @ coeffs))


def hermitian_matrix_basis(n: int) -> np.ndarray:
    """Real-orthonormal basis of Hermitian n x n matrices (n^2 elements)."""
    out = []
    for k in range(n):
        e = np.zeros((n, n), dtype=complex)
        e[k, k] = 1.0
        out.append(e)
    for k in range(n):
        for l in range(k + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[k, l] = e[l, k] = 1.0 / np.sqrt(2.0)
            out.append(e)
            f = np.zeros((n, n), dtype=complex)
            f[k, l] = 1j / np.sqrt(2.0)
            f[l, k] = -1j / np.sqrt(2.0)
            out.append(f)
    return np.stack(out)
