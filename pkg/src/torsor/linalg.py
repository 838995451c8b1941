"""Dense linear algebra with explicit inner products.

Every space carries a Hermitian positive definite Gram matrix ``G`` so that
``<x, y> = y^H G x``.  Internally maps are moved to orthonormal coordinates
through the Cholesky factor ``G = L L^H`` (``x' = L^H x``); all results are
mapped back before they are returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

EPS = np.finfo(float).eps
HERMITIAN_TOL = 1e-10


class GramError(ValueError):
    """Raised for a Gram matrix that is not Hermitian positive definite."""


def as_matrix(a, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1 and rows is not None and cols is not None:
        m = m.reshape(rows, cols)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    if rows is not None and m.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {m.shape[1]}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def gram_or_identity(gram, n: int) -> np.ndarray:
    if gram is None:
        return np.eye(n, dtype=complex)
    return as_matrix(gram, n, n)


def gram_factor(gram: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor of a Gram matrix, validating it on the way."""
    n = gram.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    scale = max(1.0, np.abs(gram).max())
    if np.abs(gram - gram.conj().T).max() > HERMITIAN_TOL * scale:
        raise GramError("Gram matrix is not Hermitian")
    try:
        return np.linalg.cholesky((gram + gram.conj().T) / 2)
    except np.linalg.LinAlgError as exc:
        raise GramError("Gram matrix is not positive definite") from exc


def _to_orthonormal(a, source_gram, target_gram):
    """Return (a', L_src, L_tgt) with a' the matrix of ``a`` in orthonormal coordinates."""
    a = as_matrix(a)
    ls = gram_factor(gram_or_identity(source_gram, a.shape[1]))
    lt = gram_factor(gram_or_identity(target_gram, a.shape[0]))
    if a.size == 0:
        return a, ls, lt
    # a' = L_t^H a L_s^{-H}
    right = sla.solve_triangular(ls, a.conj().T @ lt, lower=True).conj().T
    return right, ls, lt


def _from_orthonormal(basis: np.ndarray, factor: np.ndarray) -> np.ndarray:
    """Columns given in orthonormal coordinates -> original coordinates (L^{-H} x)."""
    if basis.size == 0:
        return np.zeros(basis.shape, dtype=complex)
    return sla.solve_triangular(factor.conj().T, basis, lower=False)


def adjoint(a, source_gram=None, target_gram=None) -> np.ndarray:
    """Adjoint ``G_src^{-1} a^H G_tgt`` of ``a`` between the given inner product spaces."""
    a = as_matrix(a)
    gs = gram_or_identity(source_gram, a.shape[1])
    gt = gram_or_identity(target_gram, a.shape[0])
    if a.size == 0:
        return np.zeros((a.shape[1], a.shape[0]), dtype=complex)
    return np.linalg.solve(gs, a.conj().T @ gt)


def default_tol(shape) -> float:
    return max(shape[0], shape[1], 1) * EPS


def hermitian_eig(a, gram=None, tol: float = HERMITIAN_TOL):
    """Eigen-decomposition of an operator self-adjoint w.r.t. ``gram``.

    Returns ascending real eigenvalues and a matrix of ``gram``-orthonormal
    eigenvectors.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"hermitian_eig needs a square matrix, got {a.shape}")
    n = a.shape[0]
    g = gram_or_identity(gram, n)
    if n == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    ga = g @ a
    scale = max(1.0, np.abs(ga).max())
    if np.abs(ga - ga.conj().T).max() > tol * scale:
        raise ValueError("operator is not self-adjoint in the given inner product")
    gram_factor(g)
    ga = (ga + ga.conj().T) / 2
    if gram is None:
        w, v = np.linalg.eigh(ga)
    else:
        w, v = sla.eigh(ga, (g + g.conj().T) / 2)
    return w, v


@dataclass(frozen=True)
class RankSplit:
    """Singular value split of a map between inner product spaces.

    Bases are orthonormal in the Gram of the space they live in.
    ``coimage_basis`` spans the orthogonal complement of the kernel.
    """

    rank: int
    kernel_basis: np.ndarray
    coimage_basis: np.ndarray
    range_basis: np.ndarray
    cokernel_basis: np.ndarray
    singular_values: np.ndarray


def rank_split(
    a, source_gram=None, target_gram=None, tol: float | None = None, atol: float = 0.0
) -> RankSplit:
    """Numerical rank counts singular values above ``max(tol * sigma_max, atol)``."""
    a_on, ls, lt = _to_orthonormal(a, source_gram, target_gram)
    m, n = a_on.shape
    if a_on.size == 0:
        sv = np.zeros(0)
        u = np.eye(m, dtype=complex)
        vh = np.eye(n, dtype=complex)
    else:
        u, sv, vh = np.linalg.svd(a_on)
    if tol is None:
        tol = default_tol(a_on.shape)
    smax = sv[0] if sv.size else 0.0
    rank = int(np.count_nonzero(sv > max(tol * smax, atol))) if smax > 0 else 0
    v = vh.conj().T
    return RankSplit(
        rank=rank,
        kernel_basis=_from_orthonormal(v[:, rank:], ls),
        coimage_basis=_from_orthonormal(v[:, :rank], ls),
        range_basis=_from_orthonormal(u[:, :rank], lt),
        cokernel_basis=_from_orthonormal(u[:, rank:], lt),
        singular_values=sv,
    )


def numerical_rank(a, source_gram=None, target_gram=None, tol=None, atol=0.0) -> int:
    return rank_split(a, source_gram, target_gram, tol, atol).rank


def kernel_basis(a, source_gram=None, target_gram=None, tol=None) -> np.ndarray:
    return rank_split(a, source_gram, target_gram, tol).kernel_basis


def singular_values(a, source_gram=None, target_gram=None) -> np.ndarray:
    a_on, _, _ = _to_orthonormal(a, source_gram, target_gram)
    if a_on.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a_on, compute_uv=False)


def log_det_map(t, source_gram=None, target_gram=None) -> float:
    """``log Det(t) = 1/2 log det(t^* t)``; ``-inf`` when ``t^* t`` is singular."""
    t = as_matrix(t)
    n = t.shape[1]
    if n == 0:
        return 0.0
    if t.shape[0] < n:
        return -np.inf
    sv = singular_values(t, source_gram, target_gram)
    if sv[0] == 0 or sv[-1] <= default_tol(t.shape) * sv[0]:
        return -np.inf
    return float(np.sum(np.log(sv)))


def det_map(t, source_gram=None, target_gram=None) -> float:
    return float(np.exp(log_det_map(t, source_gram, target_gram)))


def pseudo_inverse(a, source_gram=None, target_gram=None, tol=None) -> np.ndarray:
    """Moore-Penrose inverse w.r.t. the given inner products (maps target -> source)."""
    a_on, ls, lt = _to_orthonormal(a, source_gram, target_gram)
    m, n = a_on.shape
    if a_on.size == 0:
        return np.zeros((n, m), dtype=complex)
    u, sv, vh = np.linalg.svd(a_on, full_matrices=False)
    if tol is None:
        tol = default_tol(a_on.shape)
    keep = sv > tol * sv[0] if sv[0] > 0 else np.zeros(sv.shape, bool)
    inv_on = (vh[keep].conj().T / sv[keep]) @ u[:, keep].conj().T
    # A^+ = L_s^{-H} A'^+ L_t^H
    return _from_orthonormal(inv_on @ lt.conj().T, ls)


def orthonormalize(basis: np.ndarray, gram=None, tol=None) -> np.ndarray:
    """Gram-orthonormal basis of the column span of ``basis``."""
    basis = as_matrix(basis)
    n = basis.shape[0]
    if basis.shape[1] == 0:
        return np.zeros((n, 0), dtype=complex)
    # range of basis as a map C^k -> (C^n, gram)
    return rank_split(basis, None, gram, tol).range_basis


def inner(x: np.ndarray, y: np.ndarray, gram=None) -> np.ndarray:
    """Matrix of inner products ``y^H G x`` between column collections."""
    if gram is None:
        return y.conj().T @ x
    return y.conj().T @ gram @ x
