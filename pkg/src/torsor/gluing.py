"""The angle-parametrized gluing complex ``C1 ⊕_θ C2`` and its variation formulas.

Given surjective chain maps ``r_i : C_i -> B`` the glued complex in degree
``j`` is ``{(x1, x2) : cos θ r1 x1 = sin θ r2 x2}``, a subcomplex of
``C1 ⊕ C2``.  ``θ = 0`` separates the two pieces (``ker r1 ⊕ C2``), ``θ = π/4``
glues them along ``B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import linalg as la
from .complex import (
    RANK_TOL,
    ComplexError,
    HilbertComplex,
    betti_numbers,
    direct_sum,
    euler_characteristic,
    harmonic_basis,
    laplacian,
    laplacian_spectrum,
    log_torsion_det,
    random_complex,
    random_gram,
)
from .sequences import (
    ChainMap,
    ShortExactSequence,
    _solve_coupling,
    build_les,
    chain_iso_transfer,
    length2_torsion,
    twisted_sum,
)

ISOMETRY_TOL = 1e-10
DEFAULT_GUARD = 1e-3
DEFAULT_STEP = 1e-4


class PreconditionError(ValueError):
    """An operation was called outside its stated hypotheses."""


@dataclass(frozen=True)
class GluingData:
    C1: HilbertComplex
    C2: HilbertComplex
    B: HilbertComplex
    r1: ChainMap
    r2: ChainMap
    partial_isometry: bool = False

    def validate(self) -> None:
        for name, r, c in (("r1", self.r1, self.C1), ("r2", self.r2, self.C2)):
            r.validate()
            if len(c.dims) != len(self.B.dims):
                raise ComplexError(f"{name}: source and B have different lengths")
            for j in self.B.degrees():
                if self.B.dims[j] and la.numerical_rank(r[j], c.gram(j), self.B.gram(j), RANK_TOL) != self.B.dims[j]:
                    raise ComplexError(f"{name} is not surjective in degree {j}")
        if self.partial_isometry:
            worst = max(isometry_defects(self), default=0.0)
            if worst > ISOMETRY_TOL:
                raise PreconditionError(f"partial isometry flag set but |r r^* - 1| = {worst:.3e}")

    def kernel(self, i: int) -> tuple[HilbertComplex, ChainMap]:
        c, r = (self.C1, self.r1) if i == 1 else (self.C2, self.r2)
        return kernel_subcomplex(c, r)


def isometry_defects(g: GluingData) -> list[float]:
    """``max |r_i r_i^* - 1|`` per degree, over both restriction maps."""
    out = []
    for r, c in ((g.r1, g.C1), (g.r2, g.C2)):
        for j in g.B.degrees():
            if g.B.dims[j] == 0:
                out.append(0.0)
                continue
            rr = r[j] @ la.adjoint(r[j], c.gram(j), g.B.gram(j))
            out.append(float(np.abs(rr - np.eye(g.B.dims[j])).max()))
    return out


def compress(c: HilbertComplex, bases: Sequence[np.ndarray], check: float = 1e-9) -> HilbertComplex:
    """Restrict ``c`` to the subcomplex spanned by Gram-orthonormal column bases."""
    diffs = []
    for j in range(len(c.diffs)):
        q0, q1 = bases[j], bases[j + 1]
        image = c.diffs[j] @ q0
        coeff = la.inner(image, q1, c.gram(j + 1))
        miss = np.linalg.norm(image - q1 @ coeff) if image.size else 0.0
        if miss > check * max(1.0, np.linalg.norm(image)):
            raise ComplexError(f"subspace is not invariant under d_{j} (residual {miss:.3e})")
        diffs.append(coeff)
    return HilbertComplex.build(diffs, None, [b.shape[1] for b in bases], ref_scale=c.scale)


def full_basis(gram: np.ndarray) -> np.ndarray:
    """Gram-orthonormal basis of the whole space, ``L^{-H}`` for ``G = L L^H``."""
    n = gram.shape[0]
    return np.linalg.inv(la.gram_factor(gram)).conj().T if n else np.zeros((0, 0), dtype=complex)


def kernel_subcomplex(c: HilbertComplex, r: ChainMap) -> tuple[HilbertComplex, ChainMap]:
    """``ker r`` as a complex in orthonormal coordinates, with its inclusion."""
    bases = [la.kernel_basis(r[j], c.gram(j), r.target.gram(j), RANK_TOL) if r[j].size
             else full_basis(c.gram(j)) for j in c.degrees()]
    sub = compress(c, bases)
    return sub, ChainMap(sub, c, tuple(bases))


@dataclass(frozen=True)
class ThetaComplex:
    theta: float
    ambient: HilbertComplex
    split: tuple[int, ...]  # dim C1^j: first block of every ambient degree
    bases: tuple[np.ndarray, ...]
    compressed: HilbertComplex

    def second(self, x: np.ndarray, j: int) -> np.ndarray:
        return x[self.split[j]:]

    def first(self, x: np.ndarray, j: int) -> np.ndarray:
        return x[: self.split[j]]


def theta_complex(g: GluingData, theta: float) -> ThetaComplex:
    ambient = direct_sum(g.C1, g.C2)
    c, s = math.cos(theta), math.sin(theta)
    bases = []
    for j in ambient.degrees():
        b = g.B.dim(j)
        if b == 0:
            bases.append(full_basis(ambient.gram(j)))
            continue
        constraint = np.hstack([c * g.r1[j], -s * g.r2[j]])
        split = la.rank_split(constraint, ambient.gram(j), g.B.gram(j), RANK_TOL)
        if split.rank != b:
            raise ComplexError(f"gluing constraint is rank deficient in degree {j}; r_i must be surjective")
        bases.append(split.kernel_basis)
    return ThetaComplex(theta, ambient, tuple(g.C1.dims), tuple(bases), compress(ambient, bases))


def _embed(t: ThetaComplex, j: int, vectors: np.ndarray) -> np.ndarray:
    """Coordinates in the compressed complex of ambient vectors lying in ``C^θ``."""
    return la.inner(vectors, t.bases[j], t.ambient.gram(j))


def exact_sequences(g: GluingData, theta: float, t: ThetaComplex | None = None) -> dict[str, ShortExactSequence]:
    """The sequences ``0 -> C_{i,r} -> C_i -> B -> 0`` (``ha3_1``, ``ha3_2``), ``ha4`` and ``ha5``."""
    if t is None:
        t = theta_complex(g, theta)
    c1r, g1 = g.kernel(1)
    c2r, g2 = g.kernel(2)
    out = {
        "ha3_1": ShortExactSequence(c1r, g.C1, g.B, g1, g.r1),
        "ha3_2": ShortExactSequence(c2r, g.C2, g.B, g2, g.r2),
    }
    ct = t.compressed
    n = len(ct.dims)
    alpha4, beta4, alpha5, beta5 = [], [], [], []
    s, c = math.sin(theta), math.cos(theta)
    for j in range(n):
        n1, n2 = g.C1.dims[j], g.C2.dims[j]
        q = t.bases[j]
        incl1 = np.vstack([g1[j], np.zeros((n2, g1[j].shape[1]))])
        incl2 = np.vstack([np.zeros((n1, g2[j].shape[1])), g2[j]])
        alpha4.append(_embed(t, j, incl1))
        beta4.append(q[n1:])
        alpha5.append(_embed(t, j, np.hstack([incl1, incl2])))
        beta5.append((s * g.r1[j] @ q[:n1] + c * g.r2[j] @ q[n1:]).reshape(g.B.dim(j), q.shape[1]))
    a5 = direct_sum(c1r, c2r)
    out["ha4"] = ShortExactSequence(c1r, ct, g.C2, ChainMap.build(c1r, ct, alpha4), ChainMap.build(ct, g.C2, beta4))
    out["ha5"] = ShortExactSequence(a5, ct, g.B, ChainMap.build(a5, ct, alpha5), ChainMap.build(ct, g.B, beta5))
    return out


# ----------------------------------------------------------- trace functionals


def _projected_trace(t: ThetaComplex, j: int, basis: np.ndarray) -> float:
    """``sum_i <P2 e_i, e_i>`` over ambient-orthonormal columns ``e_i``."""
    if basis.shape[1] == 0:
        return 0.0
    n1 = t.split[j]
    second = basis[n1:]
    g2 = t.ambient.gram(j)[n1:, n1:]
    return float(np.real(np.trace(second.conj().T @ g2 @ second)))


def trace_projection(t: ThetaComplex, j: int, on: str = "cohomology") -> float:
    """Trace of the projection onto the ``C2`` summand over harmonics or cochains of ``C^θ``."""
    if on == "cochain":
        return _projected_trace(t, j, t.bases[j])
    if on == "cohomology":
        h = harmonic_basis(t.compressed, j)
        return _projected_trace(t, j, t.bases[j] @ h)
    raise ValueError(f"unknown trace domain {on!r}")


def alternating_trace(t: ThetaComplex, on: str) -> float:
    return float(sum((-1) ** j * trace_projection(t, j, on) for j in t.compressed.degrees()))


def _check_guard(theta: float, guard: float) -> None:
    if not guard <= theta <= math.pi / 2 - guard:
        raise PreconditionError(f"theta={theta} outside the guard band [{guard}, pi/2-{guard}]")


def dlog_tau_analytic(g: GluingData, theta: float, which: str = "ha7", guard: float = DEFAULT_GUARD,
                      t: ThetaComplex | None = None) -> float:
    """Closed-form θ-derivatives of ``log τ(C^θ)`` (ha7) and of the two LES torsions (ha8, ha9)."""
    _check_guard(theta, guard)
    if t is None:
        t = theta_complex(g, theta)
    factor = 2.0 / math.sin(2 * theta)
    tr_h = alternating_trace(t, "cohomology")
    which = which.lower()
    if which == "ha7":
        return factor * (-tr_h + alternating_trace(t, "cochain"))
    ha8 = factor * (-tr_h + euler_characteristic(g.C2))
    if which == "ha8":
        return ha8
    if which == "ha9":
        return ha8 - math.tan(theta) * euler_characteristic(g.B)
    raise ValueError(f"unknown formula {which!r}")


def torsion_profile(g: GluingData, theta: float) -> dict[str, float]:
    """``log τ`` of the glued complex and of the long exact sequences of ha4/ha5 at one angle."""
    t = theta_complex(g, theta)
    seqs = exact_sequences(g, theta, t)
    return {
        "log_tau": log_torsion_det(t.compressed),
        "les_ha4": log_torsion_det(build_les(seqs["ha4"])),
        "les_ha5": log_torsion_det(build_les(seqs["ha5"])),
        "betti": tuple(betti_numbers(t.compressed)),
    }


@dataclass(frozen=True)
class FDCheck:
    theta: float
    h: float
    fd: dict
    analytic: dict
    residuals: dict
    tol: float

    @property
    def worst(self) -> float:
        return max(self.residuals.values())

    @property
    def ok(self) -> bool:
        return self.worst <= self.tol


def fd_tolerance(h: float, c: float = 10.0) -> float:
    return max(1e-6, c * h * h)


def local_step(theta: float, h: float = DEFAULT_STEP, ratio: float = 4e-3) -> float:
    """``min(h, ratio * dist(theta, {0, pi/2}))``: keeps truncation error bounded near the endpoints."""
    return min(h, ratio * min(theta, math.pi / 2 - theta))


def finite_difference_check(g: GluingData, theta: float, h: float = DEFAULT_STEP,
                            guard: float = DEFAULT_GUARD, extrapolate: bool = False) -> FDCheck:
    """Compare the three closed forms with central differences of the torsions they differentiate.

    With ``extrapolate`` the differences at ``h`` and ``h/2`` are combined by
    Richardson extrapolation (fourth order).
    """
    _check_guard(theta, guard)
    if not (0.0 < theta - h and theta + h < math.pi / 2):
        raise PreconditionError("finite-difference stencil leaves (0, pi/2)")
    t = theta_complex(g, theta)
    lo, hi = torsion_profile(g, theta - h), torsion_profile(g, theta + h)
    mid_betti = tuple(betti_numbers(t.compressed))
    if lo["betti"] != mid_betti or hi["betti"] != mid_betti:
        raise ComplexError(f"cohomology dimension jumps near theta={theta}")
    keys = {"ha7": "log_tau", "ha8": "les_ha4", "ha9": "les_ha5"}
    fd = {k: (hi[v] - lo[v]) / (2 * h) for k, v in keys.items()}
    if extrapolate:
        lo2, hi2 = torsion_profile(g, theta - h / 2), torsion_profile(g, theta + h / 2)
        fd = {k: (4 * (hi2[v] - lo2[v]) / h - fd[k]) / 3 for k, v in keys.items()}
    analytic = {k: dlog_tau_analytic(g, theta, k, guard, t) for k in fd}
    res = {k: abs(fd[k] - analytic[k]) for k in fd}
    return FDCheck(theta, h, fd, analytic, res, fd_tolerance(h))


def one_sided_quotients(g: GluingData, thetas: Iterable[float], les: str = "ha4") -> list[float]:
    """``[f(θ) - f(0)] / θ`` for ``f = log τ(C^θ) - log τ(H_θ)``."""
    key = {"ha4": "les_ha4", "ha5": "les_ha5"}[les]
    p0 = torsion_profile(g, 0.0)
    f0 = p0["log_tau"] - p0[key]
    out = []
    for th in thetas:
        p = torsion_profile(g, th)
        out.append((p["log_tau"] - p[key] - f0) / th)
    return out


# ----------------------------------------------------------- gluing identities


@dataclass(frozen=True)
class GluingResiduals:
    theta: float
    residuals: dict
    terms: dict = field(default_factory=dict)


def gluing_residuals(g: GluingData, theta: float = math.pi / 4,
                     checks: Sequence[str] = ("ha11", "ha12", "ha13")) -> GluingResiduals:
    """Residuals of the three gluing identities at ``theta``.

    ``ha11`` is the Milnor identity of ``0 -> ker r1 -> C1 -> B -> 0``; its
    local term ``1/2 sum (-1)^j log Det(r1 r1^*)`` vanishes for partial
    isometries and is kept so the identity holds for any surjective ``r1``.
    ``ha12``/``ha13`` need the partial isometry flag. ``ha12`` omits
    ``log τ(B)``, which is exact only when ``B`` has trivial torsion;
    ``ha12_milnor`` is the same identity with that term restored.
    """
    checks = [c.lower() for c in checks]
    if any(c.startswith(("ha12", "ha13")) for c in checks) and not g.partial_isometry:
        raise PreconditionError("ha12/ha13 need restriction maps flagged as partial isometries")
    g.validate()
    t = theta_complex(g, theta)
    seqs = exact_sequences(g, theta, t)
    c1r, c2r = seqs["ha3_1"].A, seqs["ha3_2"].A
    terms = {
        "log_tau_theta": log_torsion_det(t.compressed),
        "log_tau_C1": log_torsion_det(g.C1),
        "log_tau_C2": log_torsion_det(g.C2),
        "log_tau_B": log_torsion_det(g.B),
        "log_tau_C1r": log_torsion_det(c1r),
        "log_tau_C2r": log_torsion_det(c2r),
        "chi_B": euler_characteristic(g.B),
    }
    res = {}
    if "ha11" in checks:
        s = seqs["ha3_1"]
        les = log_torsion_det(build_les(s))
        local = sum((-1) ** j * length2_torsion(s.alpha[j], s.beta[j], (s.A.gram(j), s.C.gram(j), s.B.gram(j)))
                    for j in s.C.degrees())
        terms["les_ha3"] = les
        terms["ha3_local"] = local
        res["ha11"] = abs(terms["log_tau_C1"] - terms["log_tau_C1r"] - terms["log_tau_B"] - les + local)
    if "ha12" in checks or "ha12_milnor" in checks:
        les5 = log_torsion_det(build_les(seqs["ha5"]))
        terms["les_ha5"] = les5
        literal = terms["log_tau_theta"] - terms["log_tau_C1r"] - terms["log_tau_C2r"] - les5
        if "ha12" in checks:
            res["ha12"] = abs(literal)
        if "ha12_milnor" in checks:
            res["ha12_milnor"] = abs(literal - terms["log_tau_B"])
    if "ha13" in checks:
        les4 = log_torsion_det(build_les(seqs["ha4"]))
        corr = math.log(math.cos(theta)) * terms["chi_B"]
        terms["les_ha4"] = les4
        terms["ha13_correction"] = corr
        res["ha13"] = abs(terms["log_tau_theta"] - terms["log_tau_C1r"] - terms["log_tau_C2"] - les4 - corr)
    return GluingResiduals(theta, res, terms)


# ----------------------------------------------------------- structural checks


def phi_map(g: GluingData, theta: float, theta2: float,
            t1: ThetaComplex | None = None, t2: ThetaComplex | None = None) -> ChainMap:
    """``(x1, x2) -> (x1, tan θ / tan θ' x2)`` from ``C^θ`` to ``C^θ'`` in compressed coordinates."""
    t1 = t1 or theta_complex(g, theta)
    t2 = t2 or theta_complex(g, theta2)
    ratio = math.tan(theta) / math.tan(theta2)
    maps = []
    for j in t1.compressed.degrees():
        n1 = t1.split[j]
        x = t1.bases[j].copy()
        x[n1:] *= ratio
        maps.append(_embed(t2, j, x))
    return ChainMap(t1.compressed, t2.compressed, tuple(maps))


def _log_det_phi(g, theta, theta2, t1=None):
    f = phi_map(g, theta, theta2, t1)
    src, tgt = f.source, f.target
    cochain = [la.log_det_map(f[j], src.gram(j), tgt.gram(j)) for j in src.degrees()]
    coh = []
    for j in src.degrees():
        hs = harmonic_basis(src, j)
        ht = harmonic_basis(tgt, j)
        m = la.inner(f[j] @ hs, ht, tgt.gram(j))
        coh.append(la.log_det_map(m) if m.size else 0.0)
    return f, cochain, coh


def structural_checks(g: GluingData, theta: float, h: float = DEFAULT_STEP, guard: float = DEFAULT_GUARD) -> dict:
    """Identities used in the proof of the variation formulas, each with its residual."""
    _check_guard(theta, guard)
    t = theta_complex(g, theta)
    seqs = exact_sequences(g, theta, t)
    ct = t.compressed
    report: dict = {}
    report["dimension_defect"] = max(
        abs(ct.dims[j] - (g.C1.dims[j] + g.C2.dims[j] - g.B.dims[j])) for j in ct.degrees()
    )
    for name, s in seqs.items():
        s.validate()
    if g.partial_isometry:
        r5 = seqs["ha5"].beta
        worst = 0.0
        for j in g.B.degrees():
            if g.B.dims[j] == 0:
                continue
            rr = r5[j] @ la.adjoint(r5[j], ct.gram(j), g.B.gram(j))
            worst = max(worst, float(np.abs(rr - np.eye(g.B.dims[j])).max()))
        report["r_theta_coisometry"] = worst
        b4 = seqs["ha4"].beta
        defect = 0.0
        for j in ct.degrees():
            bb = b4[j] @ la.adjoint(b4[j], ct.gram(j), g.C2.gram(j))
            got = la.log_det_map(bb, g.C2.gram(j), g.C2.gram(j))
            want = -g.B.dims[j] * math.log(1 + math.tan(theta) ** 2)
            defect = max(defect, abs(got - want))
        report["beta_det_defect"] = defect
    factor = 2.0 / math.sin(2 * theta)
    f_hi, coch_hi, coh_hi = _log_det_phi(g, theta, theta + h, t)
    _, coch_lo, coh_lo = _log_det_phi(g, theta, theta - h, t)
    report["phi_chain_residual"] = max(f_hi.residuals(), default=0.0)
    report["phi_transfer_residual"] = chain_iso_transfer(f_hi)
    coch_err, coh_err, tilde_err = 0.0, 0.0, 0.0
    hc2 = betti_numbers(g.C2)
    for j in ct.degrees():
        d_coch = (coch_hi[j] - coch_lo[j]) / (2 * h)
        d_coh = (coh_hi[j] - coh_lo[j]) / (2 * h)
        coch_err = max(coch_err, abs(d_coch + factor * trace_projection(t, j, "cochain")))
        # d/dθ' log Det(φ_*)^2 = -2 (2 / sin 2θ) Tr(P2 on harmonics)
        coh_err = max(coh_err, abs(2 * d_coh + 2 * factor * trace_projection(t, j, "cohomology")))
        # φ~ = (tan θ / tan θ') id on H^j(C2)
        d_tilde = hc2[j] * (math.log(math.tan(theta) / math.tan(theta + h))
                            - math.log(math.tan(theta) / math.tan(theta - h))) / (2 * h)
        tilde_err = max(tilde_err, abs(d_tilde + factor * hc2[j]))
    report["phi_cochain_derivative"] = coch_err
    report["phi_cohomology_derivative"] = coh_err
    report["phi_tilde_derivative"] = tilde_err
    return report


# ----------------------------------------------------------- random data


def random_gluing(
    dims_b: Sequence[int],
    dims_k1: Sequence[int],
    dims_k2: Sequence[int],
    seed: int = 0,
    isometric: bool = True,
    coupled: bool = True,
    spectral_floor: float = 0.2,
) -> GluingData:
    """``C_i = K_i ⊕_m B`` with ``r_i`` the coordinate projection onto ``B``.

    With ``isometric=False`` each ``C_i`` gets a Gram matrix mixing ``K_i``
    and ``B``, so ``r_i`` is surjective but not a partial isometry.
    """
    if not len(dims_b) == len(dims_k1) == len(dims_k2):
        raise ComplexError("all dimension lists must have the same length")
    rng = np.random.default_rng(seed)
    seeds = [int(x) for x in rng.integers(0, 2**63 - 1, size=3)]
    b = random_complex(dims_b, seeds[0], spectral_floor=spectral_floor)
    pieces, maps = [], []
    for dims_k, sd in ((dims_k1, seeds[1]), (dims_k2, seeds[2])):
        k = random_complex(dims_k, sd, spectral_floor=spectral_floor)
        if coupled:
            m = _solve_coupling(k.diffs, b.diffs, list(k.dims), list(b.dims), rng)
        else:
            m = [np.zeros((k.dims[j + 1], b.dims[j]), dtype=complex) for j in range(len(k.dims) - 1)]
        gram = None if isometric else [random_gram(k.dims[j] + b.dims[j], rng) for j in range(len(k.dims))]
        c = twisted_sum(k, b, m, gram)
        r = [np.hstack([np.zeros((b.dims[j], k.dims[j])), np.eye(b.dims[j])]) for j in range(len(k.dims))]
        pieces.append(c)
        maps.append(ChainMap.build(c, b, r))
    return GluingData(pieces[0], pieces[1], b, maps[0], maps[1], partial_isometry=isometric)


def rescaled(g: GluingData, factor1: float = 1.0, factor2: float = 1.0, flag: bool | None = None) -> GluingData:
    """Same data with ``r_i`` multiplied by the given factors (keeps or overrides the flag)."""
    r1 = ChainMap(g.C1, g.B, tuple(factor1 * m for m in g.r1.maps))
    r2 = ChainMap(g.C2, g.B, tuple(factor2 * m for m in g.r2.maps))
    return GluingData(g.C1, g.C2, g.B, r1, r2, g.partial_isometry if flag is None else flag)


# ----------------------------------------------------------- θ sweeps


def theta_grid(start: float, stop: float, steps: int) -> np.ndarray:
    if steps < 1:
        raise ValueError("a sweep needs at least one point")
    if steps == 1:
        return np.array([start])
    return np.linspace(start, stop, steps)


def heat_variation_probe(g: GluingData, theta: float, t_heat: float = 1.0, h: float = DEFAULT_STEP) -> float:
    """Exploratory: heat-trace analogue of the variation formula (reported, never gated).

    Compares the θ-derivative of ``sum (-1)^j j Tr exp(-t Δ_j^θ)`` with
    ``-2 t d/dt [(2 / sin 2θ) sum (-1)^j Tr(P2 exp(-t Δ_j^θ))]``.
    """

    def weighted(th):
        c = theta_complex(g, th).compressed
        return sum((-1) ** j * j * np.sum(np.exp(-t_heat * laplacian_spectrum(c, j))) for j in c.degrees())

    def projected(th, tt):
        tc = theta_complex(g, th)
        c = tc.compressed
        total = 0.0
        for j in c.degrees():
            w, v = la.hermitian_eig(laplacian(c, j), c.gram(j))
            e = tc.bases[j] @ v
            n1 = tc.split[j]
            g2 = tc.ambient.gram(j)[n1:, n1:]
            diag = np.real(np.einsum("ij,ik,kj->j", e[n1:].conj(), g2, e[n1:]))
            total += (-1) ** j * float(np.sum(diag * np.exp(-tt * w)))
        return (2.0 / math.sin(2 * th)) * total

    lhs = (weighted(theta + h) - weighted(theta - h)) / (2 * h)
    dt = 1e-4 * t_heat
    rhs = -2 * t_heat * (projected(theta, t_heat + dt) - projected(theta, t_heat - dt)) / (2 * dt)
    return float(abs(lhs - rhs))


SWEEP_COLUMNS = ("theta", "log_tau", "dlog_tau_fd", "dlog_tau_ha7", "ha8", "ha9",
                 "res_ha7", "res_ha8", "res_ha9", "fd_step")


def sweep(g: GluingData, thetas: Iterable[float], h: float = DEFAULT_STEP, guard: float = DEFAULT_GUARD,
          explore_heat: bool = False) -> list[dict]:
    """One row per angle; derivatives by extrapolated central differences at :func:`local_step`."""
    rows = []
    for th in thetas:
        th = float(th)
        step = local_step(th, h)
        chk = finite_difference_check(g, th, step, guard, extrapolate=True)
        prof = torsion_profile(g, th)
        row = {
            "theta": th,
            "log_tau": prof["log_tau"],
            "dlog_tau_fd": chk.fd["ha7"],
            "dlog_tau_ha7": chk.analytic["ha7"],
            "ha8": chk.analytic["ha8"],
            "ha9": chk.analytic["ha9"],
            "res_ha7": chk.residuals["ha7"],
            "res_ha8": chk.residuals["ha8"],
            "res_ha9": chk.residuals["ha9"],
            "fd_step": step,
        }
        for j, b in enumerate(prof["betti"]):
            row[f"betti_{j}"] = b
        if explore_heat:
            row["heat_probe"] = heat_variation_probe(g, th, h=h)
        rows.append(row)
    return rows
