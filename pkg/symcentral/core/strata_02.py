"""Orbit types, strata and Burnside types.

For a finite group G < O(d):

  isotropy_subgroup / orbit       - G_x and G.x for a point
  enumerate_isotropy_classes      - one OrbitType per conjugacy class of isotropy
                                    subgroups, found through the intersection
                                    lattice of the fixed subspaces Fix(g)
  topological_components          - connected components of V°(H)/N_G(H), from
                                    wall/chamber sign vectors inside V = Fix(H)
  burnside_type_of                - the integer combination of topological orbit
                                    types realised by a symmetric configuration
  random_representative           - a sample point in one component

Component labels: the component whose lexicographically greatest sign vector
is largest gets the unprimed name, the next one a single prime, and so on.
For a ray stratum this puts the positive side (first basis vector direction)
first. Non-conjugate classes sharing a structural name are told apart by
``^a``, ``^b`` suffixes in class order. See BURNSIDE_GRAMMAR.md.
"""
import logging
import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import null_space
from scipy.spatial.distance import cdist

from symcentral.config import get
from symcentral.core.groups_01 import (
    FiniteGroup, Subgroup, are_conjugate, normalizer, whole_group,
)
from symcentral.utils.errors import (
    EmptyStratum, InvalidInput, NotIsotropy, NotSymmetric, StratumViolation, UnknownName,
)
from symcentral.utils.linalg_utils import (
    canonical_basis, fixed_subspace, orient, restricted_fixed_subspace,
)

logger = logging.getLogger(__name__)

SignVector = Tuple[int, ...]


def _wall_tol() -> float:
    return float(get('strata.wall_tol', 1e-9))


# --- points --------------------------------------------------------------

def isotropy_subgroup(G: FiniteGroup, x) -> Subgroup:
    """G_x = {g : |gx - x| <= tol (1 + |x|)}."""
    x = np.asarray(x, dtype=float)
    if x.shape != (G.dim,):
        raise InvalidInput(f"Point of shape {x.shape} does not match dim {G.dim}")
    imgs = np.einsum('gij,j->gi', G.elements, x)
    tol = _wall_tol() * (1.0 + np.linalg.norm(x))
    members = np.nonzero(np.linalg.norm(imgs - x, axis=1) <= tol)[0]
    return Subgroup(G, tuple(int(i) for i in members))


def coset_representatives(G: FiniteGroup, H: Subgroup) -> List[int]:
    """First element of each left coset gH, in element order."""
    covered = set()
    reps = []
    for g in range(G.order):
        if g in covered:
            continue
        reps.append(g)
        covered.update(int(G.cayley[g, h]) for h in H.members)
    return reps


def orbit(G: FiniteGroup, x) -> np.ndarray:
    """The deduplicated orbit {gx}, shape (|G|/|G_x|, d)."""
    x = np.asarray(x, dtype=float)
    H = isotropy_subgroup(G, x)
    reps = coset_representatives(G, H)
    return np.einsum('gij,j->gi', G.elements[reps], x)


def pointwise_stabilizer(G: FiniteGroup, basis: np.ndarray) -> Subgroup:
    """Elements fixing every vector of span(basis)."""
    if basis.shape[1] == 0:
        return whole_group(G)
    eye = np.eye(G.dim)
    tol = 1e-8
    members = [i for i, g in enumerate(G.elements)
               if np.max(np.abs((g - eye) @ basis)) <= tol]
    return Subgroup(G, tuple(members))


# --- naming --------------------------------------------------------------

def _element_order(G: FiniteGroup, i: int) -> int:
    k, cur = 1, i
    while cur != 0:
        cur = int(G.cayley[cur, i])
        k += 1
    return k


def subgroup_name(H: Subgroup) -> str:
    """Structural name: 1, Z<n>, Z2xZ2, D<n>, or the group's own name for H = G."""
    G = H.parent
    n = H.order
    if n == 1:
        return '1'
    if n == G.order:
        return G.name
    orders = [_element_order(G, h) for h in H.members]
    if max(orders) == n:
        return f"Z{n}"
    if max(orders) == 2:
        return 'x'.join(['Z2'] * int(round(math.log2(n))))
    abelian = all(G.cayley[a, b] == G.cayley[b, a] for a in H.members for b in H.members)
    if not abelian and n % 2 == 0 and n // 2 in orders:
        return f"D{n // 2}"
    return f"H{n}"


# --- types ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class OrbitType:
    """Conjugacy class of an isotropy subgroup."""
    class_id: int
    name: str
    representative: Subgroup
    fixed_dim: int
    orbit_size: int
    basis: np.ndarray

    def __repr__(self) -> str:
        return (f"OrbitType({self.class_id}, {self.name!r}, |H|={self.representative.order}, "
                f"fixed_dim={self.fixed_dim}, orbit_size={self.orbit_size})")


@dataclass(frozen=True, eq=False)
class Chamber:
    sign: SignVector
    point: np.ndarray   # unit vector in V coordinates


@dataclass(frozen=True, eq=False)
class Stratum:
    """V(H) with its walls, chambers and the component each chamber belongs to."""
    subgroup: Subgroup
    basis: np.ndarray
    walls: np.ndarray              # (m, k) unit normals in V coordinates
    normalizer: Subgroup
    chambers: Tuple[Chamber, ...]
    component_of: Dict[SignVector, int]
    orbit_type: Optional[OrbitType] = None

    @property
    def fixed_dim(self) -> int:
        return self.basis.shape[1]

    @property
    def n_components(self) -> int:
        return len(set(self.component_of.values())) if self.component_of else 1

    def sign_vector(self, coords: np.ndarray) -> Tuple[SignVector, bool]:
        """Sign vector of V-coordinates and whether it lies strictly off every wall."""
        if self.walls.shape[0] == 0:
            return (), True
        vals = self.walls @ coords
        tol = _wall_tol() * (1.0 + np.linalg.norm(coords))
        clean = bool(np.all(np.abs(vals) > tol))
        return tuple(int(v) for v in np.sign(vals)), clean

    def component_index(self, coords: np.ndarray) -> int:
        sign, clean = self.sign_vector(coords)
        if not clean or sign not in self.component_of:
            raise StratumViolation(f"Point lies on a wall of V({subgroup_name(self.subgroup)})")
        return self.component_of[sign]


@dataclass(frozen=True, eq=False)
class TopoOrbitType:
    """An orbit type refined by a connected component of its stratum."""
    base: OrbitType
    stratum: Stratum
    index: int
    label: str
    representative_point: np.ndarray
    chambers: frozenset

    @property
    def fixed_dim(self) -> int:
        return self.base.fixed_dim

    @property
    def orbit_size(self) -> int:
        return self.base.orbit_size

    @property
    def subgroup(self) -> Subgroup:
        return self.base.representative

    @property
    def key(self) -> Tuple[int, int]:
        return self.base.class_id, self.index

    def __repr__(self) -> str:
        return f"TopoOrbitType({self.label!r}, orbit_size={self.orbit_size}, fixed_dim={self.fixed_dim})"


# --- chambers ------------------------------------------------------------

def _walls_of(G: FiniteGroup, H: Subgroup, basis: np.ndarray) -> np.ndarray:
    k = basis.shape[1]
    if k == 0:
        return np.zeros((0, 0))
    hs = set(H.members)
    normals: List[np.ndarray] = []
    for g in range(G.order):
        if g in hs:
            continue
        w = restricted_fixed_subspace(basis, G.elements[g])
        if w.shape[1] != k - 1:
            continue
        if k == 1:
            n = np.array([1.0])
        else:
            n = null_space((basis.T @ w).T)[:, 0]
            n = orient(n / np.linalg.norm(n))
        if not any(np.max(np.abs(n - m)) < 1e-8 for m in normals):
            normals.append(n)
    if not normals:
        return np.zeros((0, k))
    return np.array(normals)


def _chambers_plane(walls: np.ndarray) -> List[Tuple[SignVector, np.ndarray]]:
    angles = set()
    for n in walls:
        theta = math.atan2(n[0], -n[1]) % math.pi   # direction (-n1, n0)
        angles.add(round(theta, 12))
        angles.add(round(theta + math.pi, 12))
    bounds = sorted(angles)
    out = []
    for i, a in enumerate(bounds):
        b = bounds[i + 1] if i + 1 < len(bounds) else bounds[0] + 2 * math.pi
        mid = 0.5 * (a + b)
        p = np.array([math.cos(mid), math.sin(mid)])
        out.append((tuple(int(v) for v in np.sign(walls @ p)), p))
    return out


def _expected_regions_3d(walls: np.ndarray) -> int:
    lines: List[Tuple[np.ndarray, int]] = []
    m = len(walls)
    for i in range(m):
        for j in range(i + 1, m):
            v = np.cross(walls[i], walls[j])
            v = orient(v / np.linalg.norm(v))
            if any(np.max(np.abs(v - u)) < 1e-8 for u, _ in lines):
                continue
            t = int(np.sum(np.abs(walls @ v) < 1e-8))
            lines.append((v, t))
    return 2 + 2 * sum(t - 1 for _, t in lines)


def _chambers_space(walls: np.ndarray) -> List[Tuple[SignVector, np.ndarray]]:
    """Exact chambers of a central plane arrangement in R^3.

    Every chamber of a rank-3 arrangement is a pointed cone whose extreme rays
    are lines where two walls meet. Walking once around each such ray visits
    every chamber touching it, so the union over all rays is the full list.
    """
    rank = np.linalg.matrix_rank(walls, tol=1e-8)
    if rank == 1:
        n = walls[0]
        return [(tuple(int(v) for v in np.sign(walls @ s)), s) for s in (n, -n)]
    if rank == 2:
        # All walls share one line; chambers are wedges around it
        q = null_space(null_space(walls).T)
        out = []
        for s, p in _chambers_plane(_unit_rows(walls @ q)):
            x = q @ p
            out.append((tuple(int(v) for v in np.sign(walls @ x)), x / np.linalg.norm(x)))
        return out

    found: Dict[SignVector, Tuple[float, np.ndarray]] = {}
    m = len(walls)
    for i in range(m):
        for j in range(i + 1, m):
            v = np.cross(walls[i], walls[j])
            v /= np.linalg.norm(v)
            for r in (v, -v):
                vals = walls @ r
                through = np.abs(vals) < 1e-8
                # Directions around r live in the plane orthogonal to r
                q = null_space(r[None, :])
                local = _unit_rows(walls[through] @ q)
                eps = 0.5 * float(np.min(np.abs(vals[~through]))) if np.any(~through) else 0.5
                for _, d in _chambers_plane(local):
                    x = r + eps * (q @ d)
                    x /= np.linalg.norm(x)
                    sv = walls @ x
                    s = tuple(int(t) for t in np.sign(sv))
                    margin = float(np.min(np.abs(sv)))
                    if s not in found or margin > found[s][0]:
                        found[s] = (margin, x)
    expected = _expected_regions_3d(walls)
    if len(found) != expected:
        raise InvalidInput(
            f"Chamber enumeration found {len(found)} of {expected} regions; "
            f"check strata.wall_tol against the group tolerance"
        )
    return [(s, x) for s, (_, x) in found.items()]


def _unit_rows(a: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(a, axis=1)
    keep = []
    for row, nrm in zip(a, norms):
        u = orient(row / nrm)
        if not any(np.max(np.abs(u - w)) < 1e-8 for w in keep):
            keep.append(u)
    return np.array(keep)


def _chambers_sampled(walls: np.ndarray, k: int) -> List[Tuple[SignVector, np.ndarray]]:
    # Only reached for fixed spaces of dimension 4 and up
    logger.debug(f"Sampling chambers of {len(walls)} walls in dimension {k}")
    n_samples = int(get('strata.chamber_samples', 20000))
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(n_samples, k))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    vals = pts @ walls.T
    margin = np.min(np.abs(vals), axis=1)
    best: Dict[SignVector, Tuple[float, np.ndarray]] = {}
    for p, v, mg in zip(pts, vals, margin):
        if mg < 1e-9:
            continue
        s = tuple(int(x) for x in np.sign(v))
        if s not in best or mg > best[s][0]:
            best[s] = (mg, p)
    found = [(s, p) for s, (_, p) in best.items()]
    return found


def _chambers(walls: np.ndarray, k: int) -> List[Tuple[SignVector, np.ndarray]]:
    if k == 0:
        return [((), np.zeros(0))]
    if walls.shape[0] == 0:
        e = np.zeros(k)
        e[0] = 1.0
        return [((), e)]
    if k == 1:
        return [((1,), np.array([1.0])), ((-1,), np.array([-1.0]))]
    if k == 2:
        return _chambers_plane(walls)
    if k == 3:
        return _chambers_space(walls)
    return _chambers_sampled(walls, k)


def build_stratum(G: FiniteGroup, H: Subgroup, orbit_type: Optional[OrbitType] = None) -> Stratum:
    """Walls, chambers and N_G(H)-merged components of V(H).

    Raises:
        NotIsotropy: if H is not the pointwise stabilizer of its fixed space.
    """
    basis = fixed_subspace(list(H.matrices()), G.dim)
    if pointwise_stabilizer(G, basis) != H:
        raise NotIsotropy(f"{H} is not the isotropy subgroup of any point")
    k = basis.shape[1]
    walls = _walls_of(G, H, basis)
    N = normalizer(G, H)
    raw = _chambers(walls, k)
    sign_index = {s: i for i, (s, _) in enumerate(raw)}

    parent = list(range(len(raw)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    if k > 0 and walls.shape[0] > 0:
        for n in N.members:
            action = basis.T @ G.elements[n] @ basis
            for i, (_, p) in enumerate(raw):
                s = tuple(int(v) for v in np.sign(walls @ (action @ p)))
                j = sign_index.get(s)
                if j is not None:
                    parent[find(i)] = find(j)

    classes: Dict[int, List[int]] = {}
    for i in range(len(raw)):
        classes.setdefault(find(i), []).append(i)
    ordered = sorted(classes.values(), key=lambda idx: max(raw[i][0] for i in idx), reverse=True)
    component_of = {}
    for c, idx in enumerate(ordered):
        for i in idx:
            component_of[raw[i][0]] = c
    # Chambers listed component by component, greatest sign vector first
    chambers = []
    for idx in ordered:
        for i in sorted(idx, key=lambda i: raw[i][0], reverse=True):
            chambers.append(Chamber(raw[i][0], raw[i][1]))
    return Stratum(H, basis, walls, N, tuple(chambers), component_of, orbit_type)


# --- orbit type table ----------------------------------------------------

class OrbitTypeTable:
    """All orbit types and topological orbit types of a group, with lookups."""

    def __init__(self, G: FiniteGroup):
        self.group = G
        self.orbit_types: List[OrbitType] = []
        self.strata: Dict[int, Stratum] = {}
        self.topo_types: List[TopoOrbitType] = []
        self._build()

    def _flats(self) -> List[Tuple[np.ndarray, Subgroup]]:
        G = self.group
        d = G.dim
        seen: Dict[tuple, np.ndarray] = {}
        start = np.eye(d)
        queue = [start]
        seen[self._flat_key(start)] = start
        while queue:
            B = queue.pop(0)
            H = pointwise_stabilizer(G, B)
            if B.shape[1] == 0:
                continue
            for g in range(G.order):
                if g in H:
                    continue
                W = restricted_fixed_subspace(B, G.elements[g])
                key = self._flat_key(W)
                if key not in seen:
                    seen[key] = W
                    queue.append(W)
        return [(B, pointwise_stabilizer(G, B)) for B in seen.values()]

    @staticmethod
    def _flat_key(B: np.ndarray) -> tuple:
        P = B @ B.T
        return (B.shape[1],) + tuple((np.round(P, 6) + 0.0).ravel())

    def _build(self):
        G = self.group
        flats = self._flats()
        subgroups = {}
        for _, H in flats:
            subgroups[H.members] = H
        candidates = sorted(subgroups.values(), key=lambda H: (-H.order, H.members))

        reps: List[Subgroup] = []
        for H in candidates:
            fdim = fixed_subspace(list(H.matrices()), G.dim).shape[1]
            match = False
            for R in reps:
                if R.order != H.order:
                    continue
                if fixed_subspace(list(R.matrices()), G.dim).shape[1] != fdim:
                    continue
                if are_conjugate(G, H, R)[0]:
                    match = True
                    break
            if not match:
                reps.append(H)

        infos = []
        for H in reps:
            basis = fixed_subspace(list(H.matrices()), G.dim)
            infos.append((H, basis))
        infos.sort(key=lambda t: (-t[0].order, t[1].shape[1], t[0].members))

        names = [subgroup_name(H) for H, _ in infos]
        counts: Dict[str, int] = {}
        for n in names:
            counts[n] = counts.get(n, 0) + 1
        seen_names: Dict[str, int] = {}
        final_names = []
        for n in names:
            if counts[n] > 1:
                j = seen_names.get(n, 0)
                seen_names[n] = j + 1
                final_names.append(f"{n}^{chr(ord('a') + j)}")
            else:
                final_names.append(n)

        for cid, ((H, basis), name) in enumerate(zip(infos, final_names)):
            ot = OrbitType(cid, name, H, basis.shape[1], G.order // H.order, basis)
            self.orbit_types.append(ot)
            stratum = build_stratum(G, H, ot)
            self.strata[cid] = stratum
            n_comp = stratum.n_components
            for c in range(n_comp):
                chambers = [ch for ch in stratum.chambers if stratum.component_of.get(ch.sign, 0) == c]
                if not chambers:
                    chambers = list(stratum.chambers)
                rep = basis @ chambers[0].point if basis.shape[1] else np.zeros(G.dim)
                label = name + "'" * c
                self.topo_types.append(TopoOrbitType(
                    ot, stratum, c, label, rep, frozenset(ch.sign for ch in chambers),
                ))
        logger.debug(f"{G.name}: {len(self.orbit_types)} orbit types, "
                     f"{len(self.topo_types)} topological types")

    # lookups

    @property
    def labels(self) -> List[str]:
        return [t.label for t in self.topo_types]

    def find(self, label: str) -> TopoOrbitType:
        """Topological orbit type by label; 'G' names the whole-group class."""
        text = label.strip().replace('′', "'")
        primes = len(text) - len(text.rstrip("'"))
        name = text.rstrip("'").strip()
        if name.startswith('(') and name.endswith(')'):
            name = name[1:-1].strip()
        if name == 'G':
            name = self.orbit_types[0].name
        for t in self.topo_types:
            if t.base.name == name and t.index == primes:
                return t
        for t in self.topo_types:
            if t.base.name.replace('_', '') == name.replace('_', '') and t.index == primes:
                return t
        raise UnknownName(
            f"No orbit type {label!r} for {self.group.name}; known: {', '.join(self.labels)}"
        )

    def match_subgroup(self, H: Subgroup) -> Tuple[OrbitType, int]:
        """Orbit type of H and an element g with g H g^-1 equal to its representative."""
        for ot in self.orbit_types:
            if ot.representative.order != H.order:
                continue
            ok, g = are_conjugate(self.group, H, ot.representative)
            if ok:
                return ot, g
        raise NotIsotropy(f"{H} is not conjugate to any isotropy subgroup")

    def classify(self, x) -> TopoOrbitType:
        """Topological orbit type of the orbit through x."""
        x = np.asarray(x, dtype=float)
        H = isotropy_subgroup(self.group, x)
        ot, g = self.match_subgroup(H)
        stratum = self.strata[ot.class_id]
        y = self.group.elements[g] @ x
        comp = stratum.component_index(stratum.basis.T @ y) if ot.fixed_dim else 0
        for t in self.topo_types:
            if t.base is ot and t.index == comp:
                return t
        raise StratumViolation(f"Point {x} has no component in {ot.name}")


@lru_cache(maxsize=64)
def orbit_type_table(G: FiniteGroup) -> OrbitTypeTable:
    """Cached OrbitTypeTable for a group instance."""
    return OrbitTypeTable(G)


def enumerate_isotropy_classes(G: FiniteGroup) -> List[OrbitType]:
    """One OrbitType per conjugacy class of isotropy subgroups."""
    return list(orbit_type_table(G).orbit_types)


def topological_components(G: FiniteGroup, H: Subgroup) -> List[TopoOrbitType]:
    """Components of V°(H)/N_G(H), each with a representative point in V(H).

    Raises:
        NotIsotropy: if no point has isotropy exactly H.
    """
    table = orbit_type_table(G)
    stratum = build_stratum(G, H)
    ot, _ = table.match_subgroup(H)
    out = []
    for c in range(stratum.n_components):
        chambers = [ch for ch in stratum.chambers if stratum.component_of.get(ch.sign, 0) == c]
        if not chambers:
            chambers = list(stratum.chambers)
        point = stratum.basis @ chambers[0].point if stratum.fixed_dim else np.zeros(G.dim)
        ref = table.classify(point)
        out.append(TopoOrbitType(
            ot, stratum, ref.index, ref.label, point, frozenset(ch.sign for ch in chambers),
        ))
    out.sort(key=lambda t: t.index)
    return out


# --- sampling ------------------------------------------------------------

def random_representative(
    t: TopoOrbitType,
    radius_range: Optional[Sequence[float]] = None,
    rng_seed: Union[int, np.random.Generator, None] = None,
) -> np.ndarray:
    """A point of component ``t`` with norm in ``radius_range``.

    Raises:
        EmptyStratum: if no valid point was found.
    """
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    if radius_range is None:
        radius_range = get('strata.radius_range', [0.5, 2.0])
    lo, hi = float(radius_range[0]), float(radius_range[1])
    stratum = t.stratum
    basis = stratum.basis
    k = basis.shape[1]
    G = t.base.representative.parent
    if k == 0:
        return np.zeros(G.dim)

    tries = int(get('strata.representative_tries', 512))
    anchor = basis.T @ t.representative_point
    for attempt in range(tries):
        if attempt < tries // 2:
            y = rng.normal(size=k)
        else:
            y = anchor + 0.3 * rng.normal(size=k) / math.sqrt(k)
        norm = np.linalg.norm(y)
        if norm < 1e-6:
            continue
        y = y / norm
        sign, clean = stratum.sign_vector(y)
        if not clean or (stratum.walls.shape[0] and sign not in t.chambers):
            continue
        x = basis @ (y * rng.uniform(lo, hi))
        if isotropy_subgroup(G, x) == stratum.subgroup:
            return x
    raise EmptyStratum(f"Could not sample a point of type {t.label}")


# --- Burnside types ------------------------------------------------------

class BurnsideType:
    """Integer combination of topological orbit types of one group."""

    def __init__(self, table: OrbitTypeTable, counts: Dict[TopoOrbitType, int]):
        self.table = table
        self.counts = {t: int(counts.get(t, 0)) for t in table.topo_types if counts.get(t, 0)}
        for t, c in self.counts.items():
            if c < 0:
                raise InvalidInput(f"Negative count for {t.label}")
            if t.fixed_dim == 0 and c > 1:
                raise InvalidInput(f"At most one orbit of type {t.label} (the origin)")

    @property
    def group(self) -> FiniteGroup:
        return self.table.group

    @property
    def n_bodies(self) -> int:
        return sum(c * t.orbit_size for t, c in self.counts.items())

    def label_counts(self) -> Dict[str, int]:
        return {t.label: c for t, c in self.counts.items()}

    def to_text(self) -> str:
        if not self.counts:
            return '0'
        terms = []
        for t, c in self.counts.items():
            coeff = 'eps' if (t.fixed_dim == 0 and c == 1) else str(c)
            terms.append(f"{coeff}({t.base.name}){chr(39) * t.index}")
        return ' + '.join(terms)

    def __eq__(self, other) -> bool:
        return (isinstance(other, BurnsideType) and other.group is self.group
                and other.label_counts() == self.label_counts())

    def __hash__(self):
        return hash((id(self.group), tuple(sorted(self.label_counts().items()))))

    def __repr__(self) -> str:
        return f"BurnsideType({self.to_text()})"


_TERM_RE = re.compile(r"^\s*(eps|\d+)?\s*\(\s*([^()]+?)\s*\)\s*('*)\s*$")


def parse_burnside(text: str, table: OrbitTypeTable) -> BurnsideType:
    """Parse ``eps(G) + 2(Z2)' + 1(1)`` into a BurnsideType."""
    text = text.replace('′', "'").strip()
    if text == '0':
        return BurnsideType(table, {})
    counts: Dict[TopoOrbitType, int] = {}
    for term in text.split('+'):
        m = _TERM_RE.match(term)
        if not m:
            raise InvalidInput(f"Cannot parse Burnside term {term.strip()!r}")
        coeff, name, primes = m.groups()
        c = 1 if coeff in (None, 'eps') else int(coeff)
        t = table.find(name + primes)
        counts[t] = counts.get(t, 0) + c
    return BurnsideType(table, counts)


def burnside_type_of(G: FiniteGroup, C) -> BurnsideType:
    """Burnside type of a G-symmetric configuration.

    Raises:
        NotSymmetric: if some image point or mass does not match.
    """
    table = orbit_type_table(G)
    points = np.asarray(C.points, dtype=float)
    masses = np.asarray(C.masses, dtype=float)
    n = len(points)
    assigned = np.full(n, False)
    counts: Dict[TopoOrbitType, int] = {}
    for i in range(n):
        if assigned[i]:
            continue
        x = points[i]
        imgs = orbit(G, x)
        tol = _wall_tol() * 10 * (1.0 + np.linalg.norm(x))
        dist = cdist(imgs, points)
        for row in dist:
            j = int(np.argmin(row))
            if row[j] > max(tol, 1e-8 * (1.0 + np.linalg.norm(x))):
                raise NotSymmetric(f"Image of body {i} is not a body of the configuration")
            if abs(masses[j] - masses[i]) > 1e-9 * max(1.0, masses[i]):
                raise NotSymmetric(f"Bodies {i} and {j} share an orbit but not a mass")
            assigned[j] = True
        t = table.classify(x)
        counts[t] = counts.get(t, 0) + 1
    return BurnsideType(table, counts)
