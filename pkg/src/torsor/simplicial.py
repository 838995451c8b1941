"""Twisted cochain complexes of finite simplicial complexes and their splittings."""

from __future__ import annotations

import cmath
import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.csgraph as csgraph
from scipy.sparse import coo_matrix

from .complex import ComplexError, HilbertComplex, validate
from .gluing import GluingData
from .sequences import ChainMap

FLAT_TOL = 1e-10


@dataclass(frozen=True)
class SimplicialComplex:
    """Simplices are sorted vertex tuples grouped by dimension; orientation is vertex order."""

    n_vertices: int
    simplices: tuple[tuple[tuple[int, ...], ...], ...]

    @classmethod
    def from_simplices(cls, simplices, n_vertices: int | None = None, close: bool = True) -> "SimplicialComplex":
        """Build from any collection of simplices; ``close`` adds all faces."""
        found: set[tuple[int, ...]] = set()
        for s in simplices:
            s = tuple(sorted(int(v) for v in s))
            if len(set(s)) != len(s) or not s:
                raise ComplexError(f"degenerate simplex {s}")
            if close:
                for k in range(1, len(s) + 1):
                    found.update(itertools.combinations(s, k))
            else:
                found.add(s)
        top = max((len(s) for s in found), default=0)
        by_dim = tuple(tuple(sorted(s for s in found if len(s) == k + 1)) for k in range(top))
        if n_vertices is None:
            n_vertices = 1 + max((v for s in found for v in s), default=-1)
        k = cls(int(n_vertices), by_dim)
        k.validate()
        return k

    @property
    def dimension(self) -> int:
        return len(self.simplices) - 1

    def validate(self) -> None:
        present = set(self.all())
        for s in present:
            if any(v < 0 or v >= self.n_vertices for v in s):
                raise ComplexError(f"simplex {s} uses a vertex outside 0..{self.n_vertices - 1}")
            if len(s) > 1:
                for face in itertools.combinations(s, len(s) - 1):
                    if face not in present:
                        raise ComplexError(f"face {face} of {s} is missing")
        for layer in self.simplices:
            if len(set(layer)) != len(layer):
                raise ComplexError("duplicate simplex")

    def all(self):
        return [s for layer in self.simplices for s in layer]

    def counts(self) -> list[int]:
        return [len(layer) for layer in self.simplices]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * n for k, n in enumerate(self.counts()))

    def index(self, k: int) -> dict[tuple[int, ...], int]:
        return {s: i for i, s in enumerate(self.simplices[k])} if k < len(self.simplices) else {}

    def contains(self, s) -> bool:
        s = tuple(s)
        k = len(s) - 1
        return k < len(self.simplices) and s in set(self.simplices[k])

    def subcomplex(self, simplices) -> "SimplicialComplex":
        chosen = {tuple(s) for s in simplices}
        layers = tuple(tuple(s for s in layer if s in chosen) for layer in self.simplices)
        while layers and not layers[-1]:
            layers = layers[:-1]
        sub = SimplicialComplex(self.n_vertices, layers)
        sub.validate()
        return sub


@dataclass(frozen=True)
class LocalSystem:
    """Flat coefficient data: ``edges[(a, b)]`` (``a < b``) transports the fiber at ``b`` to ``a``."""

    fiber: int = 1
    edges: dict = field(default_factory=dict)

    def transport(self, a: int, b: int) -> np.ndarray:
        m = self.edges.get((a, b))
        if m is None:
            return np.eye(self.fiber, dtype=complex)
        return np.asarray(m, dtype=complex).reshape(self.fiber, self.fiber)

    def flatness_defect(self, k: SimplicialComplex) -> float:
        worst = 0.0
        if k.dimension < 2:
            return worst
        for a, b, c in k.simplices[2]:
            lhs = self.transport(a, b) @ self.transport(b, c)
            worst = max(worst, float(np.abs(lhs - self.transport(a, c)).max()))
        return worst

    def validate(self, k: SimplicialComplex) -> None:
        for (a, b), m in self.edges.items():
            if not a < b or not k.contains((a, b)):
                raise ComplexError(f"local system names edge {(a, b)} not in the complex")
            m = np.asarray(m, dtype=complex).reshape(self.fiber, self.fiber)
            if abs(np.linalg.det(m)) < 1e-12:
                raise ComplexError(f"transport along {(a, b)} is singular")
        d = self.flatness_defect(k)
        if d > FLAT_TOL:
            raise ComplexError(f"local system is not flat (defect {d:.3e})")


TRIVIAL = LocalSystem()


def cochain_complex(k: SimplicialComplex, local: LocalSystem = TRIVIAL, check: bool = True) -> HilbertComplex:
    """Cochains with values in the fiber at each simplex's first vertex.

    ``(dφ)(σ) = Σ_i (-1)^i φ(∂_i σ)``, where the ``i = 0`` face is read at
    ``v_1`` and transported to ``v_0``.  Every simplex carries an orthonormal
    copy of the fiber.
    """
    if check:
        local.validate(k)
    f = local.fiber
    dims = [f * n for n in k.counts()]
    diffs = []
    for q in range(k.dimension):
        d = np.zeros((dims[q + 1], dims[q]), dtype=complex)
        faces = k.index(q)
        for row, s in enumerate(k.simplices[q + 1]):
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                col = faces[face]
                blk = (-1) ** i * (local.transport(s[0], s[1]) if i == 0 else np.eye(f))
                d[row * f:(row + 1) * f, col * f:(col + 1) * f] += blk
        diffs.append(d)
    c = HilbertComplex.build(diffs, None, dims if dims else [0])
    if check:
        validate(c)
    return c


def _restrict_local(local: LocalSystem, y: SimplicialComplex) -> LocalSystem:
    edges = {e: m for e, m in local.edges.items() if y.contains(e)}
    return LocalSystem(local.fiber, edges)


def restriction_map(k: SimplicialComplex, y: SimplicialComplex, local: LocalSystem = TRIVIAL) -> ChainMap:
    """Coordinate projection of cochains of ``k`` onto the simplices of the subcomplex ``y``."""
    for s in y.all():
        if not k.contains(s):
            raise ComplexError(f"{s} is not a simplex of the ambient complex")
    f = local.fiber
    ck = cochain_complex(k, local)
    cy = cochain_complex(y, _restrict_local(local, y)) if y.simplices else HilbertComplex.zero([0] * len(ck.dims))
    maps = []
    for q in range(len(ck.dims)):
        rows = len(y.simplices[q]) if q < len(y.simplices) else 0
        m = np.zeros((rows * f, ck.dims[q]), dtype=complex)
        idx = k.index(q)
        for r, s in enumerate(y.simplices[q] if q < len(y.simplices) else ()):
            c = idx[s]
            m[r * f:(r + 1) * f, c * f:(c + 1) * f] = np.eye(f)
        maps.append(m)
    cy = _pad(cy, len(ck.dims))
    return ChainMap.build(ck, cy, maps)


def _pad(c: HilbertComplex, n: int) -> HilbertComplex:
    """Extend by zero-dimensional degrees up to ``n`` degrees."""
    if len(c.dims) >= n:
        return c
    dims = list(c.dims) + [0] * (n - len(c.dims))
    diffs = [c.d(j) for j in range(n - 1)]
    grams = [c.gram(j) for j in range(n)]
    return HilbertComplex.build(diffs, grams, dims, ref_scale=c.ref_scale)


@dataclass(frozen=True)
class SplitData:
    ambient: SimplicialComplex
    interface: SimplicialComplex
    minus: SimplicialComplex
    plus: SimplicialComplex


def split_sides(k: SimplicialComplex, y: SimplicialComplex) -> SplitData:
    """Closed sides ``X-`` and ``X+`` with ``X- ∩ X+ = Y``.

    The complement of ``Y`` is split into components by the face relation;
    ``X-`` closes the component containing the first simplex (in dimension and
    lexicographic order), ``X+`` closes all the others.
    """
    ys = set(y.all())
    for s in ys:
        if not k.contains(s):
            raise ComplexError(f"{s} is not a simplex of the ambient complex")
    rest = [s for s in k.all() if s not in ys]
    pos = {s: i for i, s in enumerate(rest)}
    rows, cols = [], []
    for s in rest:
        for face in itertools.combinations(s, len(s) - 1) if len(s) > 1 else ():
            if face in pos:
                rows.append(pos[s])
                cols.append(pos[face])
    n = len(rest)
    graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
    ncomp, labels = csgraph.connected_components(graph, directed=False)
    if ncomp < 2:
        raise ComplexError("the interface does not separate the complex")

    def closure(members):
        out = set(ys)
        for s in members:
            for q in range(1, len(s) + 1):
                out.update(itertools.combinations(s, q))
        return out

    first = labels[0]
    minus = closure(s for s in rest if labels[pos[s]] == first)
    plus = closure(s for s in rest if labels[pos[s]] != first)
    if minus & plus != ys:
        raise ComplexError("sides overlap outside the interface")
    return SplitData(k, y, k.subcomplex(minus), k.subcomplex(plus))


def split(k: SimplicialComplex, y: SimplicialComplex, local: LocalSystem = TRIVIAL) -> GluingData:
    """Gluing data ``(C(X-), C(X+), C(Y), r-, r+)``; restrictions are partial isometries."""
    sides = split_sides(k, y)
    n = len(k.simplices)
    r1 = restriction_map(sides.minus, y, _restrict_local(local, sides.minus))
    r2 = restriction_map(sides.plus, y, _restrict_local(local, sides.plus))
    r1 = _pad_map(r1, n)
    r2 = _pad_map(r2, n)
    g = GluingData(r1.source, r2.source, r1.target, r1, r2, partial_isometry=True)
    g.validate()
    return g


def _pad_map(f: ChainMap, n: int) -> ChainMap:
    src, tgt = _pad(f.source, n), _pad(f.target, n)
    return ChainMap.build(src, tgt, [f[j] for j in range(n)])


def glue_cochains(k: SimplicialComplex, y: SimplicialComplex, local: LocalSystem = TRIVIAL):
    """Chain isomorphism ``C(K) -> C(X-) ⊕_{π/4} C(X+)``, ``φ -> (φ|X-, φ|X+)`` in ambient coordinates.

    Returns ``(gluing data, list of ambient matrices)``.
    """
    g = split(k, y, local)
    sides = split_sides(k, y)
    f = local.fiber
    mats = []
    for q in range(len(k.simplices)):
        idx = k.index(q)
        blocks = []
        for side in (sides.minus, sides.plus):
            layer = side.simplices[q] if q < len(side.simplices) else ()
            m = np.zeros((len(layer) * f, len(k.simplices[q]) * f), dtype=complex)
            for r, s in enumerate(layer):
                c = idx[s]
                m[r * f:(r + 1) * f, c * f:(c + 1) * f] = np.eye(f)
            blocks.append(m)
        mats.append(np.vstack(blocks))
    return g, mats


# ----------------------------------------------------------- builtins


def _unwrap_transport(columns: dict[int, int], period: int, alpha: float, edges) -> dict:
    """Edge phases of a flat U(1) system with holonomy ``exp(i alpha)`` around the ring."""
    out = {}
    for a, b in edges:
        step = columns[b] - columns[a]
        wrap = 0
        if step > period / 2:
            wrap = -1
        elif step < -period / 2:
            wrap = 1
        if wrap:
            out[(a, b)] = np.array([[cmath.exp(1j * alpha * wrap)]])
    return out


def interval(n: int = 2) -> SimplicialComplex:
    """Path on ``n`` vertices."""
    if n < 2:
        raise ComplexError("an interval needs at least two vertices")
    return SimplicialComplex.from_simplices([(i, i + 1) for i in range(n - 1)])


def circle(n: int = 3) -> SimplicialComplex:
    if n < 3:
        raise ComplexError("a circle needs at least three vertices")
    return SimplicialComplex.from_simplices([(i, (i + 1) % n) for i in range(n)])


def twisted_circle(alpha: float, n: int = 3) -> tuple[SimplicialComplex, LocalSystem]:
    k = circle(n)
    edges = _unwrap_transport({v: v for v in range(n)}, n, alpha, k.simplices[1])
    return k, LocalSystem(1, edges)


def disk() -> SimplicialComplex:
    return SimplicialComplex.from_simplices([(0, 1, 2)])


def sphere2() -> SimplicialComplex:
    return SimplicialComplex.from_simplices(itertools.combinations(range(4), 3))


def annulus(n: int = 3, alpha: float = 0.0) -> tuple[SimplicialComplex, LocalSystem]:
    """Triangulated ``S^1 x [0, 1]``; vertex ``i`` on the bottom ring, ``n + i`` on top."""
    if n < 3:
        raise ComplexError("an annulus needs at least three columns")
    tris = []
    for i in range(n):
        j = (i + 1) % n
        tris.append((i, j, n + i))
        tris.append((j, n + i, n + j))
    k = SimplicialComplex.from_simplices(tris)
    columns = {v: v % n for v in range(2 * n)}
    return k, LocalSystem(1, _unwrap_transport(columns, n, alpha, k.simplices[1]))


def builtin(name: str) -> tuple[SimplicialComplex, LocalSystem]:
    """Builtins by name; ``<n>`` counts vertices.

    ``interval_<n>``, ``circle_<n>``, ``twisted_circle_<alpha>[_<n>]``, ``annulus_<n>``, ``disk``, ``sphere2``."""
    head, _, arg = name.partition("_")
    try:
        if name.startswith("twisted_circle"):
            parts = name[len("twisted_circle"):].strip("_").split("_")
            alpha = float(parts[0]) if parts and parts[0] else np.pi
            n = int(parts[1]) if len(parts) > 1 else 3
            return twisted_circle(alpha, n)
        if head == "interval":
            return interval(int(arg or 2)), TRIVIAL
        if head == "circle":
            return circle(int(arg or 3)), TRIVIAL
        if head == "annulus":
            return annulus(int(arg or 3))
        if name == "disk":
            return disk(), TRIVIAL
        if name == "sphere2":
            return sphere2(), TRIVIAL
    except ValueError as exc:
        raise ComplexError(f"bad builtin {name!r}: {exc}") from exc
    raise ComplexError(f"unknown builtin triangulation {name!r}")
