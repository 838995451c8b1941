"""Chain maps, short exact sequences and their long exact cohomology sequences."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from . import linalg as la
from .complex import (
    RANK_TOL,
    ComplexError,
    HilbertComplex,
    harmonic_basis,
    laplacian_spectrum,
    log_torsion_det,
    nonzero_eigenvalues,
    random_complex,
    random_gram,
)

CHAIN_TOL = 1e-10
EXACT_TOL = 1e-9
# smallest nonzero Laplacian eigenvalue below this triggers a conditioning warning
CONDITIONING_FLOOR = 1e-6
LES_RANK_TOL = 1e-7


class ConditioningWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ChainMap:
    source: HilbertComplex
    target: HilbertComplex
    maps: tuple[np.ndarray, ...]

    @classmethod
    def build(cls, source, target, maps) -> "ChainMap":
        n = max(len(source.dims), len(target.dims))
        out = []
        for j in range(n):
            m = np.asarray(maps[j], dtype=complex) if j < len(maps) else np.zeros((0, 0), complex)
            out.append(m.reshape(target.dim(j), source.dim(j)))
        return cls(source, target, tuple(out))

    def __getitem__(self, j: int) -> np.ndarray:
        if 0 <= j < len(self.maps):
            return self.maps[j]
        return np.zeros((self.target.dim(j), self.source.dim(j)), dtype=complex)

    def __len__(self):
        return len(self.maps)

    def residuals(self) -> list[float]:
        out = []
        for j in range(len(self.maps) - 1):
            lhs = self[j + 1] @ self.source.d(j)
            rhs = self.target.d(j) @ self[j]
            if lhs.size == 0:
                out.append(0.0)
                continue
            scale = max(np.linalg.norm(lhs), np.linalg.norm(rhs), 1e-300)
            out.append(float(np.linalg.norm(lhs - rhs) / max(scale, 1.0)))
        return out

    def validate(self, tol: float = CHAIN_TOL) -> None:
        for j, r in enumerate(self.residuals()):
            if r > tol:
                raise ComplexError(f"f_{j + 1} d_{j} != d_{j} f_{j} (relative residual {r:.3e})")

    def compose(self, other: "ChainMap") -> "ChainMap":
        """``self ∘ other``."""
        maps = [self[j] @ other[j] for j in range(len(self.maps))]
        return ChainMap(other.source, self.target, tuple(maps))


def identity_map(c: HilbertComplex) -> ChainMap:
    return ChainMap(c, c, tuple(np.eye(n, dtype=complex) for n in c.dims))


def induced_cohomology_map(f: ChainMap, j: int, tol: float = RANK_TOL, check: bool = True) -> np.ndarray:
    """Matrix of ``H^j(f)`` in the orthonormal harmonic bases of source and target."""
    if check:
        f.validate()
    hs = harmonic_basis(f.source, j, tol)
    ht = harmonic_basis(f.target, j, tol)
    return la.inner(f[j] @ hs, ht, f.target.gram(j))


@dataclass(frozen=True)
class ShortExactSequence:
    """``0 -> A --alpha--> C --beta--> B -> 0``."""

    A: HilbertComplex
    C: HilbertComplex
    B: HilbertComplex
    alpha: ChainMap
    beta: ChainMap

    @property
    def length(self) -> int:
        return self.C.length

    def validate(self, tol: float = EXACT_TOL) -> None:
        self.alpha.validate()
        self.beta.validate()
        for j in self.C.degrees():
            a, b = self.alpha[j], self.beta[j]
            ra = la.numerical_rank(a, self.A.gram(j), self.C.gram(j), RANK_TOL) if a.size else 0
            rb = la.numerical_rank(b, self.C.gram(j), self.B.gram(j), RANK_TOL) if b.size else 0
            if ra != self.A.dim(j):
                raise ComplexError(f"alpha_{j} is not injective")
            if rb != self.B.dim(j):
                raise ComplexError(f"beta_{j} is not surjective")
            if ra + rb != self.C.dim(j):
                raise ComplexError(f"degree {j}: dim A + dim B != dim C")
            comp = b @ a
            if comp.size and np.linalg.norm(comp) > tol * max(1.0, np.linalg.norm(a) * np.linalg.norm(b)):
                raise ComplexError(f"beta_{j} alpha_{j} != 0")


def connecting_homomorphism(
    s: ShortExactSequence, k: int, tol: float = RANK_TOL, rng: np.random.Generator | None = None,
    check_tol: float = EXACT_TOL,
) -> np.ndarray:
    """``delta_k : H^k(B) -> H^{k+1}(A)`` in harmonic bases, by the zigzag.

    Lift through beta with the pseudo-inverse, apply ``d_C``, pull back through
    alpha and project onto the harmonic space of ``A``.  The result is
    recomputed from a second lift shifted by a random element of ``ker beta``;
    both must agree.
    """
    hb = harmonic_basis(s.B, k, tol)
    ha = harmonic_basis(s.A, k + 1, tol)
    if hb.shape[1] == 0 or ha.shape[1] == 0:
        return np.zeros((ha.shape[1], hb.shape[1]), dtype=complex)
    beta_pinv = la.pseudo_inverse(s.beta[k], s.C.gram(k), s.B.gram(k))
    alpha_pinv = la.pseudo_inverse(s.alpha[k + 1], s.A.gram(k + 1), s.C.gram(k + 1))

    def zigzag(lift):
        y = s.C.d(k) @ lift
        a = alpha_pinv @ y
        miss = np.linalg.norm(s.alpha[k + 1] @ a - y)
        if miss > check_tol * max(1.0, np.linalg.norm(y)):
            raise ComplexError(f"exactness violated in the zigzag at degree {k} (residual {miss:.3e})")
        return la.inner(a, ha, s.A.gram(k + 1))

    lift = beta_pinv @ hb
    delta = zigzag(lift)
    if rng is None:
        rng = np.random.default_rng(0)
    ker = s.alpha[k]
    if ker.shape[1]:
        shift = ker @ rng.standard_normal((ker.shape[1], hb.shape[1]))
        other = zigzag(lift + shift)
        if np.linalg.norm(other - delta) > check_tol * max(1.0, np.linalg.norm(delta)):
            raise ComplexError(f"connecting homomorphism depends on the lift at degree {k}")
    return delta


def build_les(s: ShortExactSequence, tol: float = RANK_TOL, check_tol: float = EXACT_TOL) -> HilbertComplex:
    """Long exact cohomology sequence as an acyclic complex.

    Degree ``3k`` is ``H^k(A)``, ``3k+1`` is ``H^k(C)`` and ``3k+2`` is
    ``H^k(B)``, each in harmonic (orthonormal) coordinates.
    """
    n = len(s.C.dims)
    if n == 0:
        return HilbertComplex.build(dims=())
    diffs = []
    for k in range(n):
        diffs.append(induced_cohomology_map(s.alpha, k, tol, check=False))
        diffs.append(induced_cohomology_map(s.beta, k, tol, check=False))
        if k + 1 < n:
            diffs.append(connecting_homomorphism(s, k, tol, check_tol=check_tol))
    dims = [diffs[0].shape[1]] + [d.shape[0] for d in diffs]
    les = HilbertComplex.build(diffs, None, dims)
    floor = LES_RANK_TOL * max([1.0] + [np.linalg.norm(d, 2) for d in diffs if d.size])
    ranks = [la.numerical_rank(d, tol=LES_RANK_TOL, atol=floor) if d.size else 0 for d in diffs]
    for j, dim in enumerate(dims):
        betti = dim - (ranks[j] if j < len(ranks) else 0) - (ranks[j - 1] if j else 0)
        if betti != 0:
            raise ComplexError(f"long exact sequence is not exact at position {j}")
    return les


def length2_torsion(alpha, beta, grams: Sequence | None = None) -> float:
    """``log tau(0 -> A^j -> C^j -> B^j -> 0) = 1/2 log Det(a^* a) - 1/2 log Det(b b^*)``.

    ``grams`` is ``(G_A, G_C, G_B)``; identities if omitted.
    """
    alpha = la.as_matrix(alpha)
    beta = la.as_matrix(beta)
    ga, gc, gb = grams if grams is not None else (None, None, None)
    ga = la.gram_or_identity(ga, alpha.shape[1])
    gc = la.gram_or_identity(gc, alpha.shape[0])
    gb = la.gram_or_identity(gb, beta.shape[0])
    if beta.shape[1] != alpha.shape[0]:
        raise ComplexError("alpha and beta are not composable")
    ra = la.numerical_rank(alpha, ga, gc, RANK_TOL) if alpha.size else 0
    rb = la.numerical_rank(beta, gc, gb, RANK_TOL) if beta.size else 0
    if ra != alpha.shape[1] or rb != beta.shape[0] or ra + rb != alpha.shape[0]:
        raise ComplexError("0 -> A -> C -> B -> 0 is not exact")
    if (beta @ alpha).size and np.linalg.norm(beta @ alpha) > EXACT_TOL * max(1.0, np.linalg.norm(alpha) * np.linalg.norm(beta)):
        raise ComplexError("beta alpha != 0")
    a_star_a = la.adjoint(alpha, ga, gc) @ alpha
    b_b_star = beta @ la.adjoint(beta, gc, gb)
    return 0.5 * la.log_det_map(a_star_a, ga, ga) - 0.5 * la.log_det_map(b_b_star, gb, gb)


def _smallest_gap(c: HilbertComplex) -> float:
    gaps = [nonzero_eigenvalues(laplacian_spectrum(c, j), scale=c.scale**2) for j in c.degrees()]
    vals = [g.min() for g in gaps if g.size]
    return float(min(vals)) if vals else np.inf


def milnor_terms(s: ShortExactSequence, tol: float = RANK_TOL) -> dict:
    les = build_les(s, tol)
    local = [
        length2_torsion(s.alpha[j], s.beta[j], (s.A.gram(j), s.C.gram(j), s.B.gram(j)))
        for j in s.C.degrees()
    ]
    return {
        "C": log_torsion_det(s.C, tol),
        "A": log_torsion_det(s.A, tol),
        "B": log_torsion_det(s.B, tol),
        "les": log_torsion_det(les, tol),
        "local": float(sum((-1) ** j * v for j, v in enumerate(local))),
    }


def milnor_residual(s: ShortExactSequence, tol: float = RANK_TOL) -> float:
    """``|log tau(C) - log tau(A) - log tau(B) - log tau(H) + sum (-1)^j log tau(local_j)|``."""
    gap = min(_smallest_gap(x) for x in (s.A, s.C, s.B))
    if gap < CONDITIONING_FLOOR:
        warnings.warn(f"near-zero Laplacian eigenvalue {gap:.2e}; torsion is ill-conditioned", ConditioningWarning)
    t = milnor_terms(s, tol)
    return abs(t["C"] - t["A"] - t["B"] - t["les"] + t["local"])


def chain_iso_transfer(f: ChainMap, tol: float = RANK_TOL) -> float:
    """Residual of the change-of-metric identity for a chain isomorphism ``f : C1 -> C2``.

    ``log tau(C1) = log tau(C2) + sum (-1)^j log Det(f_j) - sum (-1)^j log Det(H^j(f))``.
    """
    f.validate()
    src, tgt = f.source, f.target
    if src.dims != tgt.dims:
        raise ComplexError("a chain isomorphism needs equal dimensions")
    total_f = 0.0
    total_h = 0.0
    for j in src.degrees():
        ld = la.log_det_map(f[j], src.gram(j), tgt.gram(j))
        if not np.isfinite(ld):
            raise ComplexError(f"f_{j} is singular")
        total_f += (-1) ** j * ld
        h = induced_cohomology_map(f, j, tol, check=False)
        total_h += (-1) ** j * (la.log_det_map(h) if h.size else 0.0)
    return abs(log_torsion_det(src, tol) - log_torsion_det(tgt, tol) - total_f + total_h)


# ------------------------------------------------------------ random sequences


def _solve_coupling(da, db, dims_a, dims_b, rng) -> list[np.ndarray]:
    """Random ``m_j : B^j -> A^{j+1}`` with ``d_A m_j + m_{j+1} d_B = 0``."""
    n = len(dims_a)
    shapes = [(dims_a[j + 1], dims_b[j]) for j in range(n - 1)]
    sizes = [p * q for p, q in shapes]
    offs = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    total = int(offs[-1])
    if total == 0:
        return [np.zeros(s, dtype=complex) for s in shapes]
    rows = []
    for j in range(n - 2):
        # row-major vec: vec(X Y Z) = (X ⊗ Z^T) vec(Y)
        blk = np.zeros((dims_a[j + 2] * dims_b[j], total), dtype=complex)
        blk[:, offs[j]:offs[j + 1]] = np.kron(da[j + 1], np.eye(dims_b[j]))
        blk[:, offs[j + 1]:offs[j + 2]] = np.kron(np.eye(dims_a[j + 2]), db[j].T)
        rows.append(blk)
    system = np.vstack(rows) if rows else np.zeros((0, total), dtype=complex)
    null = sla.null_space(system) if system.shape[0] else np.eye(total, dtype=complex)
    coeff = rng.standard_normal(null.shape[1]) + 1j * rng.standard_normal(null.shape[1])
    vec = null @ coeff
    if np.linalg.norm(vec) > 0:
        vec = vec * np.sqrt(total) / np.linalg.norm(vec)
    return [vec[offs[j]:offs[j + 1]].reshape(shapes[j]) for j in range(n - 1)]


def twisted_sum(a: HilbertComplex, b: HilbertComplex, coupling, gram_c=None) -> HilbertComplex:
    """``C = A ⊕ B`` with differential ``[[d_A, m], [0, d_B]]``."""
    n = len(a.dims)
    dims = [a.dims[j] + b.dims[j] for j in range(n)]
    diffs = []
    for j in range(n - 1):
        d = np.zeros((dims[j + 1], dims[j]), dtype=complex)
        na0, na1 = a.dims[j], a.dims[j + 1]
        d[:na1, :na0] = a.diffs[j]
        d[:na1, na0:] = coupling[j]
        d[na1:, na0:] = b.diffs[j]
        diffs.append(d)
    if gram_c is None:
        gram_c = [sla.block_diag(a.grams[j], b.grams[j]).reshape(dims[j], dims[j]) for j in range(n)]
    return HilbertComplex.build(diffs, gram_c, dims)


def split_ses(a, b, coupling=None, gram_c=None, alpha_scale=1.0, beta_scale=1.0) -> ShortExactSequence:
    """SES with ``alpha`` the (scaled) inclusion of A and ``beta`` the (scaled) projection onto B."""
    if len(a.dims) != len(b.dims):
        raise ComplexError("A and B must have the same length")
    n = len(a.dims)
    if coupling is None:
        coupling = [np.zeros((a.dims[j + 1], b.dims[j]), dtype=complex) for j in range(n - 1)]
    c = twisted_sum(a, b, coupling, gram_c)
    alpha = [alpha_scale * np.vstack([np.eye(a.dims[j]), np.zeros((b.dims[j], a.dims[j]))]) for j in range(n)]
    beta = [beta_scale * np.hstack([np.zeros((b.dims[j], a.dims[j])), np.eye(b.dims[j])]) for j in range(n)]
    return ShortExactSequence(a, c, b, ChainMap.build(a, c, alpha), ChainMap.build(c, b, beta))


def random_ses(
    dims_a: Sequence[int],
    dims_b: Sequence[int],
    seed: int = 0,
    coupled: bool = True,
    random_grams: bool = False,
    alpha_scale: float = 1.0,
    beta_scale: float = 1.0,
    spectral_floor: float = 0.1,
) -> ShortExactSequence:
    """Random ``0 -> A -> A ⊕_m B -> B -> 0`` reproducible from ``seed``.

    With ``random_grams`` the middle complex gets a Gram matrix that does not
    respect the splitting, so alpha is no isometry and beta no coisometry.
    """
    if len(dims_a) != len(dims_b):
        raise ComplexError("dims_a and dims_b must have the same length")
    rng = np.random.default_rng(seed)
    sub = rng.integers(0, 2**63 - 1, size=2)
    a = random_complex(dims_a, int(sub[0]), spectral_floor=spectral_floor, random_grams=random_grams)
    b = random_complex(dims_b, int(sub[1]), spectral_floor=spectral_floor, random_grams=random_grams)
    n = len(dims_a)
    if coupled:
        m = _solve_coupling(a.diffs, b.diffs, list(a.dims), list(b.dims), rng)
    else:
        m = None
    gram_c = None
    if random_grams:
        gram_c = [random_gram(a.dims[j] + b.dims[j], rng) for j in range(n)]
    return split_ses(a, b, m, gram_c, alpha_scale, beta_scale)
