"""Finite subgroups of O(d) as explicit orthogonal matrices.

A FiniteGroup stores its elements (element 0 is the identity), the full
multiplication table and the indices of its generators. Subgroups are sorted
index sets relative to that fixed enumeration, so conjugacy and normalizer
computations are pure index arithmetic.

Operations:
  generate_group        - closure of a list of generator matrices
  catalog_group         - C_k, D_k (planar); C_2h, D_nh, D_2rot, T_d, O_h, I_h (spatial)
  normalizer            - N_G(H)
  are_conjugate         - conjugacy test with witness element
  embed_group           - block embedding into O(e), optionally adjoining diag(I, -I)
  isotypic_decomposition, centralizer_rotations - commutant-based representation data
"""
import logging
import math
import re
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import null_space

from symcentral.config import get
from symcentral.utils.errors import (
    BadParameter, ClosureOverflow, InvalidInput, NotOrthogonal, UnknownName,
)
from symcentral.utils.io_utils import read_json, write_json
from symcentral.utils.linalg_utils import span_basis

logger = logging.getLogger(__name__)

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def as_orthogonal(matrix, tol: float = 1e-9) -> np.ndarray:
    """Validate and return a square orthogonal matrix as a float array.

    Raises:
        NotOrthogonal: if the matrix is not square, not orthogonal, or det is not +-1.
    """
    m = np.array(matrix, dtype=float)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotOrthogonal(f"Expected a square matrix, got shape {m.shape}")
    err = np.max(np.abs(m.T @ m - np.eye(m.shape[0])))
    if err > tol:
        raise NotOrthogonal(f"Matrix fails orthogonality by {err:.3e}")
    det = np.linalg.det(m)
    if abs(abs(det) - 1.0) > tol:
        raise NotOrthogonal(f"Determinant {det} is not +-1")
    return m


class _ElementIndex:
    """Matrix lookup: rounded-entry hash first, full-precision scan as fallback."""

    def __init__(self, dim: int, tol: float, decimals: int):
        self.dim = dim
        self.tol = tol
        self.decimals = decimals
        self.matrices: List[np.ndarray] = []
        self._table: Dict[tuple, int] = {}

    def _key(self, m: np.ndarray) -> tuple:
        return tuple((np.round(m, self.decimals) + 0.0).ravel())

    def find(self, m: np.ndarray) -> Optional[int]:
        idx = self._table.get(self._key(m))
        if idx is not None and np.max(np.abs(self.matrices[idx] - m)) < self.tol:
            return idx
        if not self.matrices:
            return None
        # Rounding can split neighbours across a grid boundary
        dists = np.max(np.abs(np.asarray(self.matrices) - m), axis=(1, 2))
        j = int(np.argmin(dists))
        return j if dists[j] < self.tol else None

    def add(self, m: np.ndarray) -> int:
        self.matrices.append(m)
        self._table[self._key(m)] = len(self.matrices) - 1
        return len(self.matrices) - 1


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite subgroup of O(d) with its Cayley table."""
    dim: int
    elements: np.ndarray
    cayley: np.ndarray
    generators: Tuple[int, ...]
    name: str = 'custom'
    inverses: np.ndarray = field(default=None, repr=False)
    _index: _ElementIndex = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def matrix(self, i: int) -> np.ndarray:
        return self.elements[i]

    def index_of(self, m) -> Optional[int]:
        """Index of the element equal to ``m`` within tolerance, or None."""
        return self._index.find(np.asarray(m, dtype=float))

    def product(self, i: int, j: int) -> int:
        return int(self.cayley[i, j])

    def inverse(self, i: int) -> int:
        return int(self.inverses[i])

    def conjugate(self, g: int, h: int) -> int:
        """Index of g h g^-1."""
        return int(self.cayley[self.cayley[g, h], self.inverses[g]])

    def generator_matrices(self) -> List[np.ndarray]:
        return [self.elements[i] for i in self.generators]

    def __repr__(self) -> str:
        return f"FiniteGroup(name={self.name!r}, dim={self.dim}, order={self.order})"


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup given by sorted element indices of a parent group."""
    parent: FiniteGroup
    members: Tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(int(i) for i in self.members)))
        object.__setattr__(self, 'members', members)
        G = self.parent
        if 0 not in members:
            raise InvalidInput("Subgroup must contain the identity")
        ms = set(members)
        for a in members:
            for b in members:
                if int(G.cayley[a, b]) not in ms:
                    raise InvalidInput(f"Index set {members} is not closed under multiplication")
        if G.order % len(members):
            raise InvalidInput("Subgroup order does not divide the group order")

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, i) -> bool:
        return int(i) in set(self.members)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Subgroup) and other.parent is self.parent
                and other.members == self.members)

    def __hash__(self) -> int:
        return hash((id(self.parent), self.members))

    def matrices(self) -> np.ndarray:
        return self.parent.elements[list(self.members)]

    def conjugate(self, g: int) -> 'Subgroup':
        """g H g^-1."""
        return Subgroup(self.parent, tuple(self.parent.conjugate(g, h) for h in self.members))

    def is_normal_in_parent(self) -> bool:
        return all(self.conjugate(g) == self for g in range(self.parent.order))

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, members={self.members})"


def subgroup_generated(G: FiniteGroup, indices: Sequence[int]) -> Subgroup:
    """Smallest subgroup of G containing ``indices``."""
    members = {0}
    frontier = [0]
    gens = [int(i) for i in indices]
    while frontier:
        a = frontier.pop()
        for g in gens:
            b = int(G.cayley[g, a])
            if b not in members:
                members.add(b)
                frontier.append(b)
    return Subgroup(G, tuple(members))


def trivial_subgroup(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, (0,))


def whole_group(G: FiniteGroup) -> Subgroup:
    return Subgroup(G, tuple(range(G.order)))


def generate_group(
    generators: Sequence,
    max_order: Optional[int] = None,
    name: str = 'custom',
    dim: Optional[int] = None,
) -> FiniteGroup:
    """Close a list of orthogonal generators into a finite group.

    Args:
        generators: Generator matrices, all of the same dimension.
        max_order: Closure size cap (default groups.max_order from config).
        name: Label stored on the group.
        dim: Needed only when ``generators`` is empty (trivial group).

    Returns:
        FiniteGroup with identity at index 0 and a full Cayley table.

    Raises:
        NotOrthogonal: if a generator is not orthogonal.
        ClosureOverflow: if the closure exceeds ``max_order``.
    """
    tol = float(get('groups.tol', 1e-9))
    decimals = int(get('groups.hash_decimals', 6))
    if max_order is None:
        max_order = int(get('groups.max_order', 1000))

    gens = [as_orthogonal(g, tol) for g in generators]
    if gens:
        dims = {g.shape[0] for g in gens}
        if len(dims) != 1:
            raise NotOrthogonal(f"Generators have mixed dimensions {sorted(dims)}")
        d = dims.pop()
        if dim is not None and dim != d:
            raise InvalidInput(f"Generators are {d}x{d} but dim={dim} was requested")
    elif dim is None:
        raise InvalidInput("dim is required for an empty generator list")
    else:
        d = int(dim)

    index = _ElementIndex(d, tol, decimals)
    index.add(np.eye(d))
    queue = [0]
    while queue:
        current = index.matrices[queue.pop(0)]
        for g in gens:
            m = g @ current
            if index.find(m) is None:
                if len(index.matrices) >= max_order:
                    raise ClosureOverflow(
                        f"Closure of {len(gens)} generators exceeds max_order={max_order}"
                    )
                queue.append(index.add(m))

    elements = np.asarray(index.matrices)
    n = len(elements)
    products = np.einsum('iab,jbc->ijac', elements, elements)
    cayley = np.empty((n, n), dtype=int)
    for i in range(n):
        for j in range(n):
            k = index.find(products[i, j])
            if k is None:
                raise ClosureOverflow(f"Product of elements {i},{j} left the closure")
            cayley[i, j] = k
    inverses = np.argmax(cayley == 0, axis=1)
    gen_idx = tuple(index.find(g) for g in gens)

    logger.debug(f"Generated group {name} of order {n} in O({d})")
    return FiniteGroup(d, elements, cayley, gen_idx, name, inverses, index)


# --- catalog -------------------------------------------------------------

def rotation_2d(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotation_z(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_about(axis, theta: float) -> np.ndarray:
    """Rodrigues rotation about ``axis`` by ``theta``."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return math.cos(theta) * np.eye(3) + math.sin(theta) * kx + (1 - math.cos(theta)) * np.outer(k, k)


_CYCLIC_PERM = np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
_SWAP_XY = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])

CATALOG_NAMES = ['C_k', 'D_k', 'C_2h', 'D_nh', 'D_2rot', 'T_d', 'O_h', 'I_h']

CATALOG_DESCRIPTIONS = {
    'C_k': 'cyclic rotations of the plane by 2*pi/k',
    'D_k': 'dihedral group of order 2k; reflection in the x-axis',
    'C_2h': 'tau(x,y,z)=(x,y,-z) and rotation by pi about z (order 4)',
    'D_nh': 'Z_2 x D_n with tau reflection in the (x,y)-plane (order 4n)',
    'D_2rot': 'identity plus pi-rotations about the three coordinate axes (order 4)',
    'T_d': 'full symmetry group of the tetrahedron (order 24)',
    'O_h': 'full symmetry group of the cube/octahedron (order 48)',
    'I_h': 'full symmetry group of the icosahedron/dodecahedron (order 120)',
}


def _parse_catalog_name(name: str, param: Optional[int]) -> Tuple[str, Optional[int]]:
    raw = name.strip().replace('_', '').replace(' ', '')
    low = raw.lower()
    if low in ('c2h',):
        return 'C_2h', None
    if low == 'd2rot':
        return 'D_2rot', None
    if low == 'td':
        return 'T_d', None
    if low == 'oh':
        return 'O_h', None
    if low == 'ih':
        return 'I_h', None
    m = re.fullmatch(r'([cd])(\d*|n|k)(h?)', low)
    if not m:
        raise UnknownName(f"Unknown catalog group {name!r}; known: {', '.join(CATALOG_NAMES)}")
    letter, digits, h = m.groups()
    k = int(digits) if digits.isdigit() else param
    if digits.isdigit() and param is not None and int(param) != k:
        raise BadParameter(f"{name!r} conflicts with parameter {param}")
    if k is None:
        raise BadParameter(f"{name!r} needs an integer parameter")
    if h:
        if letter != 'd':
            raise UnknownName(f"Unknown catalog group {name!r}")
        return 'D_nh', int(k)
    return ('C_k' if letter == 'c' else 'D_k'), int(k)


def catalog_group(name: str, param: Optional[int] = None) -> FiniteGroup:
    """Build a catalog group with the documented generator matrices.

    Accepted spellings include ``"D_3"``, ``"D3"``, ``("D", 3)``, ``"D_4h"``,
    ``("D_nh", 4)``, ``"C_2h"``, ``"D_2rot"``, ``"T_d"``, ``"O_h"`` and ``"I_h"``.

    Raises:
        UnknownName: for names outside the catalog.
        BadParameter: for k < 1 or a missing parameter.
    """
    kind, k = _parse_catalog_name(name, param)
    if k is not None and k < 1:
        raise BadParameter(f"Parameter must be >= 1, got {k}")

    if kind == 'C_k':
        gens = [] if k == 1 else [rotation_2d(2 * math.pi / k)]
        return generate_group(gens, name=f"C_{k}", dim=2)
    if kind == 'D_k':
        gens = [np.diag([1.0, -1.0])]
        if k > 1:
            gens.insert(0, rotation_2d(2 * math.pi / k))
        return generate_group(gens, name=f"D_{k}", dim=2)
    if kind == 'C_2h':
        return generate_group([np.diag([1.0, 1.0, -1.0]), rotation_z(math.pi)], name='C_2h')
    if kind == 'D_nh':
        gens = [np.diag([1.0, -1.0, 1.0]), np.diag([1.0, 1.0, -1.0])]
        if k > 1:
            gens.insert(0, rotation_z(2 * math.pi / k))
        return generate_group(gens, name=f"D_{k}h")
    if kind == 'D_2rot':
        return generate_group(
            [np.diag([1.0, -1.0, -1.0]), np.diag([-1.0, 1.0, -1.0])], name='D_2rot'
        )
    if kind == 'T_d':
        # Vertices (1,1,1),(1,-1,-1),(-1,1,-1),(-1,-1,1)
        return generate_group(
            [_CYCLIC_PERM, _SWAP_XY, np.diag([-1.0, -1.0, 1.0])], name='T_d'
        )
    if kind == 'O_h':
        return generate_group(
            [_CYCLIC_PERM, _SWAP_XY, np.diag([-1.0, 1.0, 1.0])], name='O_h'
        )
    if kind == 'I_h':
        # Icosahedron with vertices at cyclic permutations of (0, +-1, +-phi)
        five_fold = rotation_about([0.0, 1.0, GOLDEN], 2 * math.pi / 5)
        return generate_group(
            [_CYCLIC_PERM, np.diag([-1.0, -1.0, 1.0]), five_fold, -np.eye(3)], name='I_h'
        )
    raise UnknownName(f"Unknown catalog group {name!r}")


# --- subgroup relations --------------------------------------------------

def normalizer(G: FiniteGroup, H: Subgroup) -> Subgroup:
    """N_G(H) = {g : g H g^-1 = H}."""
    if H.parent is not G:
        raise InvalidInput("Subgroup belongs to a different group")
    hs = set(H.members)
    members = [g for g in range(G.order)
               if {G.conjugate(g, h) for h in H.members} == hs]
    return Subgroup(G, tuple(members))


def are_conjugate(G: FiniteGroup, H1: Subgroup, H2: Subgroup) -> Tuple[bool, Optional[int]]:
    """Return (True, g) with g H1 g^-1 = H2, or (False, None)."""
    if H1.order != H2.order:
        return False, None
    target = set(H2.members)
    for g in range(G.order):
        if {G.conjugate(g, h) for h in H1.members} == target:
            return True, g
    return False, None


def embed_group(G: FiniteGroup, e: int, adjoin_flip: bool = True) -> FiniteGroup:
    """Embed G < O(d) block-diagonally into O(e).

    With ``adjoin_flip`` the reflection diag(Id_d, -Id_{e-d}) is added, whose
    fixed space is R^d x {0}.
    """
    d = G.dim
    if e <= d:
        raise BadParameter(f"Embedding dimension {e} must exceed {d}")

    def block(m):
        out = np.eye(e)
        out[:d, :d] = m
        return out

    gens = [block(m) for m in G.generator_matrices()]
    suffix = ''
    if adjoin_flip:
        flip = np.eye(e)
        flip[d:, d:] = -np.eye(e - d)
        gens.append(flip)
        suffix = 'xZ2'
    return generate_group(gens, name=f"{G.name}{suffix}@R{e}", dim=e)


# --- representation data -------------------------------------------------

@dataclass(frozen=True, eq=False)
class IsotypicBlock:
    """One isotypic component E_j = W_j (x) R^{d_j}."""
    basis: np.ndarray
    irrep_dim: int
    multiplicity: int
    real_type: bool = True

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T


@dataclass(frozen=True, eq=False)
class IsotypicDecomposition:
    dim: int
    blocks: Tuple[IsotypicBlock, ...]

    def basis(self) -> np.ndarray:
        """Orthogonal matrix whose columns run through the blocks in order."""
        return np.hstack([b.basis for b in self.blocks])

    def to_dict(self) -> Dict:
        return {
            'dim': self.dim,
            'blocks': [
                {'dim': b.dim, 'irrep_dim': b.irrep_dim, 'multiplicity': b.multiplicity,
                 'real_type': b.real_type, 'basis': b.basis.T.tolist()}
                for b in self.blocks
            ],
        }


def commutant_basis(G: FiniteGroup) -> List[np.ndarray]:
    """Basis of all d x d matrices commuting with every element of G."""
    d = G.dim
    eye = np.eye(d)
    rows = [np.kron(g, eye) - np.kron(eye, g.T) for g in G.elements]
    ns = null_space(np.vstack(rows), rcond=1e-9)
    return [ns[:, i].reshape(d, d) for i in range(ns.shape[1])]


def isotypic_decomposition(G: FiniteGroup) -> IsotypicDecomposition:
    """Split R^d into isotypic blocks using the commutant of G.

    A generic symmetric commuting matrix has one eigenspace per irreducible
    copy; copies are grouped into one block when a commuting matrix links
    them. A block whose commutant is larger than Mat(d_j, R) holds
    irreducibles of complex or quaternionic type and is flagged.
    """
    d = G.dim
    comm = commutant_basis(G)
    sym = [0.5 * (x + x.T) for x in comm]
    rng = np.random.default_rng(20240611)
    generic = sum(c * s for c, s in zip(rng.normal(size=len(sym)), sym))
    generic = 0.5 * (generic + generic.T)
    vals, vecs = np.linalg.eigh(generic)
    scale = max(1.0, float(np.max(np.abs(vals))))

    spaces: List[np.ndarray] = []
    start = 0
    for i in range(1, d + 1):
        if i == d or abs(vals[i] - vals[start]) > 1e-8 * scale:
            spaces.append(vecs[:, start:i])
            start = i

    parent = list(range(len(spaces)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for x in comm:
        for a in range(len(spaces)):
            for b in range(a + 1, len(spaces)):
                if np.max(np.abs(spaces[a].T @ x @ spaces[b])) > 1e-8:
                    parent[find(a)] = find(b)

    groups: Dict[int, List[int]] = {}
    for a in range(len(spaces)):
        groups.setdefault(find(a), []).append(a)

    blocks = []
    for members in groups.values():
        stacked = np.hstack([spaces[a] for a in members])
        basis = span_basis(stacked)
        mult = len(members)
        irrep_dim = spaces[members[0]].shape[1]
        restricted = np.array([(basis.T @ x @ basis).ravel() for x in comm])
        end_dim = int(np.linalg.matrix_rank(restricted, tol=1e-8)) if len(comm) else 0
        blocks.append(IsotypicBlock(basis, irrep_dim, mult, end_dim == mult * mult))

    def first_axis(b: IsotypicBlock) -> int:
        diag = np.diag(b.projector)
        return int(np.argmax(diag > 1e-8))

    blocks.sort(key=lambda b: (first_axis(b), b.dim))
    return IsotypicDecomposition(d, tuple(blocks))


def centralizer_rotations(G: FiniteGroup) -> Optional[List[np.ndarray]]:
    """Rotations in SO(d) commuting with G, or None when there are infinitely many.

    The centralizer is finite exactly when every isotypic block is a single
    real-type irreducible; it then consists of +-1 on each block.
    """
    decomp = isotypic_decomposition(G)
    if any(b.multiplicity > 1 or not b.real_type for b in decomp.blocks):
        return None
    out = []
    for signs in product((1.0, -1.0), repeat=len(decomp.blocks)):
        m = sum(s * b.projector for s, b in zip(signs, decomp.blocks))
        if np.linalg.det(m) > 0:
            out.append(m)
    return out


# --- JSON ----------------------------------------------------------------

def group_to_dict(G: FiniteGroup) -> Dict:
    return {
        'name': G.name,
        'dim': G.dim,
        'order': G.order,
        'elements': [m.ravel().tolist() for m in G.elements],
        'generators': list(G.generators),
    }


def group_from_dict(data: Dict) -> FiniteGroup:
    """Rebuild a group from its exported generators and check the element count."""
    try:
        dim = int(data['dim'])
        elements = [np.array(e, dtype=float).reshape(dim, dim) for e in data['elements']]
        gens = [elements[i] for i in data.get('generators', [])]
    except (KeyError, ValueError, IndexError, TypeError) as e:
        raise InvalidInput(f"Malformed group JSON: {e}")
    G = generate_group(gens, name=data.get('name', 'custom'), dim=dim)
    if 'order' in data and int(data['order']) != G.order:
        raise InvalidInput(f"Group JSON lists order {data['order']} but generators close to {G.order}")
    return G


def save_group(G: FiniteGroup, path: Union[str, Path]) -> Path:
    return write_json(group_to_dict(G), path)


def load_group(path: Union[str, Path]) -> FiniteGroup:
    return group_from_dict(read_json(path))


def group_from_spec(spec) -> FiniteGroup:
    """Resolve a group description from a JSON document.

    Accepts a catalog name, ``{"name", "param"}``, ``{"name", "param", "embed", "flip"}``
    or an exported group with ``elements``.
    """
    if isinstance(spec, str):
        return catalog_group(spec)
    if isinstance(spec, (list, tuple)) and len(spec) == 2:
        return catalog_group(str(spec[0]), int(spec[1]))
    if isinstance(spec, dict):
        if 'elements' in spec:
            G = group_from_dict(spec)
        elif 'name' in spec:
            param = spec.get('param')
            G = catalog_group(spec['name'], int(param) if param is not None else None)
        else:
            raise InvalidInput("Group description needs 'name' or 'elements'")
        if spec.get('embed'):
            G = embed_group(G, int(spec['embed']), bool(spec.get('flip', True)))
        return G
    raise InvalidInput(f"Cannot interpret group description {spec!r}")
