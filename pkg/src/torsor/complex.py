"""Finite-dimensional Hilbert complexes: Hodge theory, heat traces and torsion."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from . import linalg as la

# Relative cutoff separating zero from nonzero singular values / eigenvalues.
# Laplacians are formed as products, so the bare eps-level default of
# ``linalg.rank_split`` is too tight here.
RANK_TOL = 1e-10
D2_TOL = 1e-12


class ComplexError(ValueError):
    """A complex (or map between complexes) violates its structural contract."""


@dataclass(frozen=True)
class HilbertComplex:
    """``0 -> C^0 -> C^1 -> ... -> C^N -> 0`` with Gram matrices on every degree.

    ``diffs[j]`` is the ``dims[j+1] x dims[j]`` matrix of ``d_j``.  Degrees of
    dimension zero are allowed.  ``ref_scale`` is a lower bound for
    :attr:`scale`; subcomplexes carry their ambient's scale so that roundoff
    in a restricted differential is not mistaken for rank.
    """

    dims: tuple[int, ...]
    diffs: tuple[np.ndarray, ...]
    grams: tuple[np.ndarray, ...]
    ref_scale: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if len(self.grams) != len(self.dims):
            raise ComplexError(f"{len(self.dims)} degrees but {len(self.grams)} Gram matrices")
        if len(self.diffs) != max(len(self.dims) - 1, 0):
            raise ComplexError(f"{len(self.dims)} degrees need {len(self.dims) - 1} differentials, got {len(self.diffs)}")
        for j, d in enumerate(self.diffs):
            if d.shape != (self.dims[j + 1], self.dims[j]):
                raise ComplexError(
                    f"d_{j} has shape {d.shape}, expected {(self.dims[j + 1], self.dims[j])}"
                )
        for j, g in enumerate(self.grams):
            if g.shape != (self.dims[j], self.dims[j]):
                raise ComplexError(f"G_{j} has shape {g.shape}, expected {(self.dims[j],) * 2}")

    @classmethod
    def build(cls, diffs=(), grams=None, dims=None, ref_scale: float = 0.0) -> "HilbertComplex":
        """Assemble a complex, inferring ``dims`` from the differentials when possible."""
        diffs = [np.asarray(d, dtype=complex) for d in diffs]
        if dims is None:
            if not diffs:
                raise ComplexError("dims are required for a complex without differentials")
            dims = [diffs[0].shape[1]] + [d.shape[0] for d in diffs]
        dims = tuple(int(n) for n in dims)
        if any(n < 0 for n in dims):
            raise ComplexError(f"negative dimension in {dims}")
        if len(dims) > 0 and not diffs:
            diffs = [np.zeros((dims[j + 1], dims[j]), dtype=complex) for j in range(len(dims) - 1)]
        diffs = tuple(
            la.as_matrix(d.reshape(dims[j + 1], dims[j]) if d.size == 0 else d)
            for j, d in enumerate(diffs)
        )
        if grams is None:
            grams = [None] * len(dims)
        grams = tuple(la.gram_or_identity(g, n) for g, n in zip(grams, dims))
        return cls(dims, diffs, grams, float(ref_scale))

    @classmethod
    def zero(cls, dims) -> "HilbertComplex":
        return cls.build(dims=dims)

    @property
    def length(self) -> int:
        return len(self.dims) - 1

    def d(self, j: int) -> np.ndarray:
        """``d_j`` with the convention that out-of-range differentials are zero maps."""
        if 0 <= j < len(self.diffs):
            return self.diffs[j]
        src = self.dims[j] if 0 <= j < len(self.dims) else 0
        tgt = self.dims[j + 1] if 0 <= j + 1 < len(self.dims) else 0
        return np.zeros((tgt, src), dtype=complex)

    def gram(self, j: int) -> np.ndarray:
        if 0 <= j < len(self.dims):
            return self.grams[j]
        return np.zeros((0, 0), dtype=complex)

    def dim(self, j: int) -> int:
        return self.dims[j] if 0 <= j < len(self.dims) else 0

    def d_adjoint(self, j: int) -> np.ndarray:
        return la.adjoint(self.d(j), self.gram(j), self.gram(j + 1))

    def degrees(self):
        return range(len(self.dims))

    @cached_property
    def scale(self) -> float:
        """Largest singular value over all differentials (orthonormal coordinates), at least ``ref_scale``."""
        top = [la.singular_values(self.d(j), self.gram(j), self.gram(j + 1)) for j in range(len(self.diffs))]
        return float(max([self.ref_scale] + [t[0] for t in top if t.size]))


@dataclass(frozen=True)
class Diagnostics:
    d2_residuals: tuple[float, ...]
    gram_min_eigs: tuple[float, ...]

    @property
    def worst_d2(self) -> float:
        return max(self.d2_residuals, default=0.0)


def validate(c: HilbertComplex, tol: float = D2_TOL) -> Diagnostics:
    """Check ``d_{j+1} d_j = 0`` (relative to ``|d_{j+1}||d_j|``) and Gram positivity."""
    mins = []
    for j, g in enumerate(c.grams):
        try:
            la.gram_factor(g)
        except la.GramError as exc:
            raise ComplexError(f"G_{j}: {exc}") from exc
        mins.append(float(np.linalg.eigvalsh((g + g.conj().T) / 2).min()) if g.size else np.inf)
    res = []
    for j in range(len(c.diffs) - 1):
        prod = c.diffs[j + 1] @ c.diffs[j]
        scale = np.linalg.norm(c.diffs[j + 1], 2) * np.linalg.norm(c.diffs[j], 2) if prod.size else 0.0
        r = float(np.linalg.norm(prod, 2) / scale) if scale > 0 else 0.0
        res.append(r)
        if r > tol:
            raise ComplexError(f"d_{j + 1} d_{j} != 0 (relative residual {r:.3e})")
    return Diagnostics(tuple(res), tuple(mins))


# ---------------------------------------------------------------- Hodge theory


def diff_split(c: HilbertComplex, j: int, tol: float = RANK_TOL) -> la.RankSplit:
    return la.rank_split(c.d(j), c.gram(j), c.gram(j + 1), tol, atol=tol * c.scale)


def ranks(c: HilbertComplex, tol: float = RANK_TOL) -> list[int]:
    return [diff_split(c, j, tol).rank for j in range(len(c.diffs))]


def betti_numbers(c: HilbertComplex, tol: float = RANK_TOL) -> list[int]:
    r = ranks(c, tol)
    r_at = lambda j: r[j] if 0 <= j < len(r) else 0  # noqa: E731
    return [c.dims[j] - r_at(j) - r_at(j - 1) for j in c.degrees()]


def euler_characteristic(c: HilbertComplex, tol: float = RANK_TOL) -> int:
    return int(sum((-1) ** j * b for j, b in enumerate(betti_numbers(c, tol))))


def laplacian(c: HilbertComplex, j: int) -> np.ndarray:
    """``Delta_j = d_j^* d_j + d_{j-1} d_{j-1}^*`` as a matrix on ``C^j``."""
    up = c.d_adjoint(j) @ c.d(j)
    down = c.d(j - 1) @ c.d_adjoint(j - 1)
    return up + down


def laplacians(c: HilbertComplex) -> list[np.ndarray]:
    return [laplacian(c, j) for j in c.degrees()]


def laplacian_spectrum(c: HilbertComplex, j: int) -> np.ndarray:
    w, _ = la.hermitian_eig(laplacian(c, j), c.gram(j))
    return w


def _restricted_spectrum(op: np.ndarray, basis: np.ndarray, gram: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``op`` compressed to the span of a ``gram``-orthonormal basis."""
    if basis.shape[1] == 0:
        return np.zeros(0)
    m = la.inner(op @ basis, basis, gram)
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


def closed_spectrum(c: HilbertComplex, j: int, tol: float = RANK_TOL) -> np.ndarray:
    """Spectrum of the Laplacian restricted to ``ran d_{j-1}``."""
    basis = diff_split(c, j - 1, tol).range_basis if j > 0 else np.zeros((c.dim(j), 0))
    return _restricted_spectrum(laplacian(c, j), basis, c.gram(j))


def coclosed_spectrum(c: HilbertComplex, j: int, tol: float = RANK_TOL) -> np.ndarray:
    """Spectrum of the Laplacian restricted to ``ran d_j^*``."""
    basis = diff_split(c, j, tol).coimage_basis if j < c.length else np.zeros((c.dim(j), 0))
    return _restricted_spectrum(laplacian(c, j), basis, c.gram(j))


@dataclass(frozen=True)
class DegreeHodge:
    harmonic_basis: np.ndarray
    exact_basis: np.ndarray
    coexact_basis: np.ndarray
    laplacian_spectrum: np.ndarray

    @property
    def betti(self) -> int:
        return self.harmonic_basis.shape[1]


@dataclass(frozen=True)
class HodgeData:
    degrees: tuple[DegreeHodge, ...]

    @property
    def betti_numbers(self) -> list[int]:
        return [h.betti for h in self.degrees]

    def __getitem__(self, j: int) -> DegreeHodge:
        return self.degrees[j]


def harmonic_basis(c: HilbertComplex, j: int, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of ``ker d_j  ∩  ker d_{j-1}^*``."""
    stacked = np.vstack([c.d(j), c.d_adjoint(j - 1)])
    target_gram = sla.block_diag(c.gram(j + 1), c.gram(j - 1))
    return la.rank_split(stacked, c.gram(j), target_gram, tol, atol=tol * c.scale).kernel_basis


def hodge(c: HilbertComplex, tol: float = RANK_TOL) -> HodgeData:
    out = []
    for j in c.degrees():
        out.append(
            DegreeHodge(
                harmonic_basis=harmonic_basis(c, j, tol),
                exact_basis=diff_split(c, j - 1, tol).range_basis if j > 0 else np.zeros((c.dims[j], 0), complex),
                coexact_basis=diff_split(c, j, tol).coimage_basis if j < c.length else np.zeros((c.dims[j], 0), complex),
                laplacian_spectrum=laplacian_spectrum(c, j),
            )
        )
    return HodgeData(tuple(out))


# ------------------------------------------------------------ heat and torsion


@dataclass(frozen=True)
class HeatInvariants:
    t: float
    traces: tuple[float, ...]
    alternating_sum: float
    euler_characteristic: int


def heat_invariants(c: HilbertComplex, t: float) -> HeatInvariants:
    if not t > 0:
        raise ValueError(f"heat time must be positive, got {t}")
    traces = tuple(float(np.sum(np.exp(-t * laplacian_spectrum(c, j)))) for j in c.degrees())
    alt = float(sum((-1) ** j * tr for j, tr in enumerate(traces)))
    return HeatInvariants(t, traces, alt, euler_characteristic(c))


def nonzero_eigenvalues(spectrum: np.ndarray, tol: float = RANK_TOL, scale: float = 0.0) -> np.ndarray:
    """Eigenvalues above ``tol * max(lambda_max, scale)``."""
    if spectrum.size == 0:
        return spectrum
    top = max(np.abs(spectrum).max(), scale)
    return spectrum[spectrum > tol * top] if top > 0 else spectrum[:0]


def zeta_prime_zero(spectrum: np.ndarray, tol: float = RANK_TOL, scale: float = 0.0) -> float:
    """``zeta'(0) = -sum log(lambda)`` over the nonzero eigenvalues (entire case)."""
    return float(-np.sum(np.log(nonzero_eigenvalues(spectrum, tol, scale))))


@dataclass(frozen=True)
class TorsionReport:
    log_torsion_det: float | None
    log_torsion_zeta: float | None
    per_degree_log_dets: tuple[float, ...]
    euler_characteristic: int
    betti_numbers: tuple[int, ...]

    @property
    def value(self) -> float:
        return self.log_torsion_det if self.log_torsion_det is not None else self.log_torsion_zeta

    @property
    def residual(self) -> float:
        if self.log_torsion_det is None or self.log_torsion_zeta is None:
            return 0.0
        return abs(self.log_torsion_det - self.log_torsion_zeta)


def restricted_log_det(c: HilbertComplex, p: int, tol: float = RANK_TOL) -> float:
    """``log Det(d_p : (ker d_p)^perp -> im d_p)``: sum of logs of nonzero singular values."""
    sv = la.singular_values(c.d(p), c.gram(p), c.gram(p + 1))
    if sv.size == 0 or sv[0] == 0:
        return 0.0
    return float(np.sum(np.log(sv[sv > tol * max(sv[0], c.scale)])))


def log_torsion_det(c: HilbertComplex, tol: float = RANK_TOL) -> float:
    return float(sum((-1) ** p * restricted_log_det(c, p, tol) for p in range(len(c.diffs))))


def log_torsion_zeta(c: HilbertComplex, tol: float = RANK_TOL) -> float:
    lam = c.scale**2
    return float(
        0.5 * sum((-1) ** j * j * zeta_prime_zero(laplacian_spectrum(c, j), tol, lam) for j in c.degrees())
    )


def log_torsion(c: HilbertComplex, method: str = "both", tol: float = RANK_TOL) -> TorsionReport:
    if method not in ("det", "zeta", "both"):
        raise ValueError(f"unknown torsion method {method!r}")
    per = tuple(restricted_log_det(c, p, tol) for p in range(len(c.diffs)))
    det = float(sum((-1) ** p * v for p, v in enumerate(per))) if method != "zeta" else None
    zeta = log_torsion_zeta(c, tol) if method != "det" else None
    betti = tuple(betti_numbers(c, tol))
    chi = int(sum((-1) ** j * b for j, b in enumerate(betti)))
    return TorsionReport(det, zeta, per, chi, betti)


def tau(c: HilbertComplex, tol: float = RANK_TOL) -> float:
    """Shorthand for the log torsion (determinant formula)."""
    return log_torsion_det(c, tol)


# ------------------------------------------------------------ constructions


def direct_sum(c1: HilbertComplex, c2: HilbertComplex) -> HilbertComplex:
    n = max(len(c1.dims), len(c2.dims))
    dims = [c1.dim(j) + c2.dim(j) for j in range(n)]
    diffs = [sla.block_diag(c1.d(j), c2.d(j)) for j in range(n - 1)]
    diffs = [d.reshape(dims[j + 1], dims[j]) for j, d in enumerate(diffs)]
    grams = [sla.block_diag(c1.gram(j), c2.gram(j)).reshape(dims[j], dims[j]) for j in range(n)]
    return HilbertComplex.build(diffs, grams, dims, ref_scale=max(c1.ref_scale, c2.ref_scale))


def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(a, b).reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])


def tensor_product(c1: HilbertComplex, c2: HilbertComplex) -> HilbertComplex:
    """Tensor product with the Koszul differential ``d'⊗1 + (-1)^i 1⊗d''``.

    Degree ``k`` is ``⊕_{i+j=k} C'^i ⊗ C''^j`` ordered by increasing ``i``.
    """
    if not c1.dims or not c2.dims:
        return HilbertComplex.build(dims=())
    n1, n2 = c1.length, c2.length
    blocks = [[(i, k - i) for i in range(n1 + 1) if 0 <= k - i <= n2] for k in range(n1 + n2 + 1)]

    def offsets(k):
        off, out = 0, {}
        for i, j in blocks[k]:
            out[(i, j)] = off
            off += c1.dims[i] * c2.dims[j]
        return out, off

    layout = [offsets(k) for k in range(len(blocks))]
    dims = [size for _, size in layout]
    grams = [
        sla.block_diag(*[_kron(c1.grams[i], c2.grams[j]) for i, j in blocks[k]]).reshape(dims[k], dims[k])
        for k in range(len(blocks))
    ]
    diffs = []
    for k in range(len(blocks) - 1):
        d = np.zeros((dims[k + 1], dims[k]), dtype=complex)
        src, tgt = layout[k][0], layout[k + 1][0]
        for i, j in blocks[k]:
            s0 = src[(i, j)]
            s1 = s0 + c1.dims[i] * c2.dims[j]
            if (i + 1, j) in tgt:
                t0 = tgt[(i + 1, j)]
                blk = _kron(c1.d(i), np.eye(c2.dims[j]))
                d[t0:t0 + blk.shape[0], s0:s1] += blk
            if (i, j + 1) in tgt:
                t0 = tgt[(i, j + 1)]
                blk = (-1) ** i * _kron(np.eye(c1.dims[i]), c2.d(j))
                d[t0:t0 + blk.shape[0], s0:s1] += blk
        diffs.append(d)
    return HilbertComplex.build(diffs, grams, dims)


# ------------------------------------------------------------ random complexes


def random_unitary(n: int, rng: np.random.Generator, complex_entries: bool = True) -> np.ndarray:
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    z = rng.standard_normal((n, n))
    if complex_entries:
        z = z + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return (q * ph).astype(complex)


def random_gram(n: int, rng: np.random.Generator, complex_entries: bool = True, spread: float = 0.5) -> np.ndarray:
    """Well-conditioned random Hermitian positive definite matrix."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    z = rng.standard_normal((n, n))
    if complex_entries:
        z = z + 1j * rng.standard_normal((n, n))
    z = spread * z / np.sqrt(n)
    return np.eye(n) + z.conj().T @ z


def random_invertible(n: int, rng: np.random.Generator, complex_entries: bool = True, low=0.5, high=2.0) -> np.ndarray:
    u = random_unitary(n, rng, complex_entries)
    v = random_unitary(n, rng, complex_entries)
    return (u * rng.uniform(low, high, n)) @ v


def _pick_ranks(dims, rng, acyclic):
    if acyclic:
        ranks, prev = [], 0
        for n in dims[:-1]:
            r = n - prev
            if r < 0:
                raise ComplexError(f"no acyclic complex with dims {tuple(dims)}")
            ranks.append(r)
            prev = r
        if dims and dims[-1] != prev:
            raise ComplexError(f"no acyclic complex with dims {tuple(dims)}")
        for j, r in enumerate(ranks):
            if r > dims[j + 1]:
                raise ComplexError(f"no acyclic complex with dims {tuple(dims)}")
        return ranks
    ranks, prev = [], 0
    for j in range(len(dims) - 1):
        hi = min(dims[j] - prev, dims[j + 1])
        r = int(rng.integers(0, hi + 1))
        ranks.append(r)
        prev = r
    return ranks


def random_complex(
    dims: Sequence[int],
    seed: int = 0,
    spectral_floor: float = 0.1,
    spectral_ceiling: float = 4.0,
    acyclic: bool = False,
    ranks: Sequence[int] | None = None,
    random_grams: bool = False,
    complex_entries: bool = True,
) -> HilbertComplex:
    """Random complex with ``d^2 = 0`` by construction.

    Every degree is split as ``im d_{j-1} ⊕ harmonic ⊕ complement`` in a random
    orthonormal frame and ``d_j`` maps the complement of degree ``j`` onto the
    image block of degree ``j+1``.  The nonzero Laplacian eigenvalues lie in
    ``[spectral_floor, spectral_ceiling]``.
    """
    dims = [int(n) for n in dims]
    if any(n < 0 for n in dims):
        raise ComplexError(f"negative dimension in {dims}")
    rng = np.random.default_rng(seed)
    if ranks is None:
        ranks = _pick_ranks(dims, rng, acyclic)
    ranks = list(ranks)
    for j, r in enumerate(ranks):
        if r < 0 or r > dims[j + 1] or r + (ranks[j - 1] if j else 0) > dims[j]:
            raise ComplexError(f"infeasible ranks {ranks} for dims {dims}")
    frames = [random_unitary(n, rng, complex_entries) for n in dims]
    diffs = []
    for j, r in enumerate(ranks):
        prev = ranks[j - 1] if j else 0
        core = np.zeros((dims[j + 1], dims[j]), dtype=complex)
        if r:
            s = np.sqrt(rng.uniform(spectral_floor, spectral_ceiling, r))
            u = random_unitary(r, rng, complex_entries)
            v = random_unitary(r, rng, complex_entries)
            # complement block of degree j = last r coordinates; image block of j+1 = first r
            core[:r, dims[j] - r:] = (u * s) @ v.conj().T
        assert dims[j] - r >= prev
        diffs.append(frames[j + 1] @ core @ frames[j].conj().T)
    if not random_grams:
        return HilbertComplex.build(diffs, None, dims)
    grams, factors = [], []
    for n in dims:
        g = random_gram(n, rng, complex_entries)
        grams.append(g)
        factors.append(la.gram_factor(g) if n else np.zeros((0, 0), complex))
    # whitened differential equals the orthonormal construction: d = L_{j+1}^{-H} d' L_j^H
    out = []
    for j, d in enumerate(diffs):
        if d.size == 0:
            out.append(d)
            continue
        lt = factors[j + 1]
        out.append(sla.solve_triangular(lt.conj().T, d @ factors[j].conj().T, lower=False))
    return HilbertComplex.build(out, grams, dims)


def conjugate(c: HilbertComplex, frames: Sequence[np.ndarray]) -> HilbertComplex:
    """Pull ``c`` back along invertible ``S_j``: ``G_j -> S_j^H G_j S_j``, ``d_j -> S_{j+1}^{-1} d_j S_j``."""
    diffs = [np.linalg.solve(frames[j + 1], c.diffs[j] @ frames[j]) if c.diffs[j].size else c.diffs[j]
             for j in range(len(c.diffs))]
    grams = [s.conj().T @ g @ s for s, g in zip(frames, c.grams)]
    return HilbertComplex.build(diffs, grams, c.dims)
