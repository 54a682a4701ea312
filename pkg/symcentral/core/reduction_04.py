"""04 - Symmetry reduction: ansatz, lift and reduced functionals.

A SymmetricAnsatz fixes a group G and a list of slots, one per orbit. Slot s
has a topological orbit type with isotropy H_s, fixed space V(H_s) with
orthonormal basis B_s, and a per-particle mass. Its reduced coordinates c_s
are coordinates in B_s, and the orbit is {g B_s c_s : g in coset reps of H_s}.

The lift is linear, X = J P r, where J stacks the blocks g B_s and P removes
the barycenter (non-trivial only when Fix(G) != 0). The solver works in shape
coordinates y with r = Z y, Z an orthonormal basis of the centred
coordinates, so the lift there is X = L y with L = J Z.
"""
import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import null_space
from scipy.spatial.distance import pdist

from symcentral.core.groups_01 import (
    FiniteGroup, catalog_group, group_from_spec, group_to_dict,
)
from symcentral.core.nbody_03 import (
    Configuration, act, grad_inertia, grad_potential, hessian_potential, moment_of_inertia,
    potential,
)
from symcentral.core.strata_02 import (
    BurnsideType, OrbitTypeTable, TopoOrbitType, coset_representatives, isotropy_subgroup,
    orbit_type_table, random_representative,
)
from symcentral.utils.errors import (
    InvalidAnsatz, InvalidInput, NotIsotropy, OrbitCollision, StratumViolation,
    SymCentralError, ZeroInertia,
)
from symcentral.utils.io_utils import read_json, write_json

logger = logging.getLogger(__name__)

COLLISION_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class AnsatzSlot:
    """One orbit of the ansatz: a topological orbit type and a per-particle mass.

    ``at`` optionally holds a point of the slot's component in V(H) coordinates;
    it seeds the first solver start.
    """
    topo: TopoOrbitType
    mass: float
    at: Optional[np.ndarray] = None

    @property
    def fixed_dim(self) -> int:
        return self.topo.fixed_dim

    @property
    def orbit_size(self) -> int:
        return self.topo.orbit_size

    @property
    def basis(self) -> np.ndarray:
        return self.topo.stratum.basis


class SymmetricAnsatz:
    """Group, slots and exponent, with the precomputed linear lift.

    Args:
        group: The symmetry group G < O(d).
        slots: Orbit slots in order.
        exponent: Potential exponent a in U = sum m m / r^a.
        group_spec: Original group description, kept for JSON export.
        name: Free-form label.

    Raises:
        InvalidAnsatz: for empty slot lists, non-positive masses, slots from
            another group or two slots at the origin.
    """

    def __init__(self, group: FiniteGroup, slots: Sequence[AnsatzSlot], exponent: float = 1.0,
                 group_spec=None, name: Optional[str] = None):
        self.group = group
        self.table: OrbitTypeTable = orbit_type_table(group)
        self.slots: Tuple[AnsatzSlot, ...] = tuple(slots)
        self.exponent = float(exponent)
        self.group_spec = group_spec
        self.name = name
        self._validate()
        self._build_lift()

    def _validate(self):
        if not self.slots:
            raise InvalidAnsatz("Ansatz has no slots")
        if not self.exponent > 0:
            raise InvalidAnsatz(f"Exponent must be positive, got {self.exponent}")
        origin = 0
        for i, slot in enumerate(self.slots):
            if slot.topo.subgroup.parent is not self.group:
                raise InvalidAnsatz(f"Slot {i} belongs to a different group")
            if not slot.mass > 0 or not math.isfinite(slot.mass):
                raise InvalidAnsatz(f"Slot {i} has non-positive mass {slot.mass}")
            if slot.fixed_dim == 0:
                origin += 1
        if origin > 1:
            raise InvalidAnsatz("At most one slot may sit at the origin")

    def _build_lift(self):
        G = self.group
        d = G.dim
        blocks, masses, slot_of_body = [], [], []
        self.offsets: List[int] = []
        offset = 0
        for s, slot in enumerate(self.slots):
            reps = coset_representatives(G, slot.topo.subgroup)
            B = slot.basis
            k = B.shape[1]
            self.offsets.append(offset)
            block = np.zeros((len(reps) * d, k))
            for j, g in enumerate(reps):
                block[j * d:(j + 1) * d, :] = G.elements[g] @ B
            blocks.append((block, offset, k))
            masses.extend([slot.mass] * len(reps))
            slot_of_body.extend([s] * len(reps))
            offset += k
        self.coords_dim = offset
        self.masses = np.array(masses)
        self.slot_of_body = np.array(slot_of_body)
        n = len(masses)
        J = np.zeros((n * d, offset))
        row = 0
        for block, off, k in blocks:
            J[row:row + block.shape[0], off:off + k] = block
            row += block.shape[0]
        self.J = J

        # Barycenter b = K r; it lies in Fix(G), which every V(H_s) contains
        P_G = np.mean(G.elements, axis=0)
        total = float(np.sum(self.masses))
        K = np.zeros((d, offset))
        Bstack = np.zeros((d, offset))
        for s, slot in enumerate(self.slots):
            k = slot.fixed_dim
            if k == 0:
                continue
            off = self.offsets[s]
            K[:, off:off + k] = slot.mass * slot.orbit_size * (P_G @ slot.basis) / total
            Bstack[:, off:off + k] = slot.basis
        self.centering = K
        if np.max(np.abs(K), initial=0.0) < 1e-12:
            self.P = np.eye(offset)
            self.Z = np.eye(offset)
        else:
            self.P = np.eye(offset) - Bstack.T @ K
            self.Z = null_space(K, rcond=1e-9)
        self.L = self.J @ self.Z
        m_rep = np.repeat(self.masses, d)
        self.Q = self.L.T @ (m_rep[:, None] * self.L)

    # --- structure ---

    @property
    def dim(self) -> int:
        return self.group.dim

    @property
    def n_bodies(self) -> int:
        return len(self.masses)

    @property
    def shape_dim(self) -> int:
        return self.Z.shape[1]

    @property
    def slot_dims(self) -> List[int]:
        return [s.fixed_dim for s in self.slots]

    def burnside_type(self) -> BurnsideType:
        counts: Dict[TopoOrbitType, int] = {}
        for slot in self.slots:
            counts[slot.topo] = counts.get(slot.topo, 0) + 1
        return BurnsideType(self.table, counts)

    def split(self, r: np.ndarray) -> List[np.ndarray]:
        """Per-slot coordinate vectors of raw coordinates r."""
        return [r[off:off + slot.fixed_dim] for off, slot in zip(self.offsets, self.slots)]

    def shape_from_coords(self, r) -> np.ndarray:
        return self.Z.T @ (self.P @ np.asarray(r, dtype=float))

    def coords_from_shape(self, y) -> np.ndarray:
        return self.Z @ np.asarray(y, dtype=float)

    def with_mass(self, slot_index: int, mass: float) -> 'SymmetricAnsatz':
        """Copy with one slot's mass replaced."""
        if not 0 <= slot_index < len(self.slots):
            raise InvalidAnsatz(f"Slot index {slot_index} out of range 0..{len(self.slots) - 1}")
        slots = list(self.slots)
        slots[slot_index] = replace(slots[slot_index], mass=float(mass))
        return SymmetricAnsatz(self.group, slots, self.exponent, self.group_spec, self.name)

    def with_exponent(self, exponent: float) -> 'SymmetricAnsatz':
        return SymmetricAnsatz(self.group, self.slots, exponent, self.group_spec, self.name)

    # --- points ---

    def points_from_coords(self, r) -> np.ndarray:
        """Lifted (n, d) points without any validity checks."""
        r = np.asarray(r, dtype=float)
        if r.shape != (self.coords_dim,):
            raise InvalidInput(f"Expected {self.coords_dim} reduced coordinates, got {r.shape}")
        return (self.J @ (self.P @ r)).reshape(self.n_bodies, self.dim)

    def points_from_shape(self, y) -> np.ndarray:
        return (self.L @ np.asarray(y, dtype=float)).reshape(self.n_bodies, self.dim)

    def check_coords(self, r) -> None:
        """Raise StratumViolation unless every slot sits strictly inside its component."""
        for s, (slot, c) in enumerate(zip(self.slots, self.split(np.asarray(r, dtype=float)))):
            if slot.fixed_dim == 0:
                continue
            stratum = slot.topo.stratum
            norm = float(np.linalg.norm(c))
            if norm <= 1e-12:
                raise StratumViolation(f"Slot {s} representative collapsed to the origin")
            sign, clean = stratum.sign_vector(c)
            if not clean:
                raise StratumViolation(f"Slot {s} representative lies on a wall")
            if stratum.walls.shape[0] and sign not in slot.topo.chambers:
                raise StratumViolation(
                    f"Slot {s} left component {slot.topo.label} (sign vector {sign})"
                )

    def configuration_from_points(self, pts: np.ndarray) -> Configuration:
        """Validate lifted points for collisions and wrap them in a Configuration."""
        if self.n_bodies > 1:
            r = pdist(pts)
            scale = 1.0 + float(np.max(np.abs(pts)))
            bad = np.nonzero(r < COLLISION_TOL * scale)[0]
            if bad.size:
                i, j = _pair_from_condensed(int(bad[0]), self.n_bodies)
                if self.slot_of_body[i] == self.slot_of_body[j]:
                    raise StratumViolation(
                        f"Orbit of slot {self.slot_of_body[i]} degenerated (isotropy jumped)"
                    )
                raise OrbitCollision(
                    f"Orbits of slots {self.slot_of_body[i]} and {self.slot_of_body[j]} overlap"
                )
        return Configuration(pts, self.masses)

    def lift_shape(self, y) -> Configuration:
        r = self.coords_from_shape(y)
        self.check_coords(r)
        return self.configuration_from_points(self.points_from_shape(y))

    def initial_coords(self) -> Optional[np.ndarray]:
        """Raw coordinates assembled from the slots' ``at`` points, if all are given."""
        parts = []
        for slot in self.slots:
            if slot.fixed_dim == 0:
                continue
            if slot.at is None:
                return None
            parts.append(np.asarray(slot.at, dtype=float))
        return np.concatenate(parts) if parts else np.zeros(0)

    def random_coords(self, rng: np.random.Generator) -> np.ndarray:
        """Raw coordinates with every slot drawn from its component."""
        parts = []
        for slot in self.slots:
            if slot.fixed_dim == 0:
                continue
            x = random_representative(slot.topo, rng_seed=rng)
            parts.append(slot.basis.T @ x)
        return np.concatenate(parts) if parts else np.zeros(0)

    # --- JSON ---

    def to_dict(self) -> Dict:
        slots = []
        for slot in self.slots:
            entry = {'type': slot.topo.label, 'mass': slot.mass}
            if slot.at is not None:
                entry['at'] = (slot.basis @ slot.at).tolist()
            slots.append(entry)
        out = {
            'group': self.group_spec if self.group_spec is not None else group_to_dict(self.group),
            'slots': slots,
            'exponent': self.exponent,
        }
        if self.name:
            out['name'] = self.name
        return out

    @classmethod
    def from_dict(cls, data: Dict) -> 'SymmetricAnsatz':
        """Parse ``{group, slots: [{type|at, mass|masses, count}], exponent, name}``."""
        if not isinstance(data, dict) or 'group' not in data or 'slots' not in data:
            raise InvalidInput("Ansatz JSON needs 'group' and 'slots'")
        G = group_from_spec(data['group'])
        table = orbit_type_table(G)
        slots: List[AnsatzSlot] = []
        for i, entry in enumerate(data['slots']):
            slots.extend(_parse_slot(G, table, entry, i))
        return cls(G, slots, float(data.get('exponent', 1.0)), data['group'], data.get('name'))

    def __repr__(self) -> str:
        return (f"SymmetricAnsatz({self.group.name}, {self.burnside_type().to_text()}, "
                f"n={self.n_bodies}, shape_dim={self.shape_dim})")


def _pair_from_condensed(k: int, n: int) -> Tuple[int, int]:
    i = 0
    while k >= n - 1 - i:
        k -= n - 1 - i
        i += 1
    return i, i + 1 + k


def _locate(G: FiniteGroup, table: OrbitTypeTable, x: np.ndarray) -> Tuple[TopoOrbitType, np.ndarray]:
    """Topological type of x and x's coordinates in the representative's V(H)."""
    try:
        H = isotropy_subgroup(G, x)
        ot, g = table.match_subgroup(H)
        y = G.elements[g] @ x
        t = table.classify(y)
    except (NotIsotropy, StratumViolation) as e:
        raise InvalidAnsatz(f"Point {x.tolist()} does not pick a stratum component: {e}")
    return t, t.stratum.basis.T @ y


def _parse_slot(G: FiniteGroup, table: OrbitTypeTable, entry: Dict, index: int) -> List[AnsatzSlot]:
    if not isinstance(entry, dict):
        raise InvalidAnsatz(f"Slot {index} must be an object")
    count = int(entry.get('count', 1))
    if count < 1:
        raise InvalidAnsatz(f"Slot {index} has count {count}")

    ats: List[Optional[np.ndarray]] = [None] * count
    topo = None
    if 'at' in entry:
        arr = np.asarray(entry['at'], dtype=float)
        points = arr.reshape(1, -1) if arr.ndim == 1 else arr
        if points.shape != (count, G.dim):
            raise InvalidAnsatz(
                f"Slot {index}: 'at' needs {count} point(s) in R^{G.dim}, got shape {arr.shape}"
            )
        located = [_locate(G, table, p) for p in points]
        topo = located[0][0]
        if any(t is not topo for t, _ in located):
            raise InvalidAnsatz(f"Slot {index}: 'at' points lie in different components")
        ats = [c for _, c in located]
    if 'type' in entry:
        named = table.find(str(entry['type']))
        if topo is not None and named is not topo:
            raise InvalidAnsatz(
                f"Slot {index}: 'at' lies in {topo.label}, not in {named.label}"
            )
        topo = named
    if topo is None:
        raise InvalidAnsatz(f"Slot {index} needs 'type' or 'at'")

    if 'masses' in entry:
        masses = np.asarray(entry['masses'], dtype=float).ravel()
        if masses.size != topo.orbit_size:
            raise InvalidAnsatz(
                f"Slot {index}: {masses.size} masses for an orbit of {topo.orbit_size} points"
            )
        if np.max(masses) - np.min(masses) > 1e-12 * max(1.0, float(np.max(np.abs(masses)))):
            raise InvalidAnsatz(f"Slot {index}: masses vary along one orbit")
        mass = float(masses[0])
        if 'mass' in entry and abs(float(entry['mass']) - mass) > 1e-12 * max(1.0, mass):
            raise InvalidAnsatz(f"Slot {index}: 'mass' and 'masses' disagree")
    else:
        mass = float(entry.get('mass', 1.0))
    if topo.fixed_dim == 0 and count > 1:
        raise InvalidAnsatz(f"Slot {index}: only one orbit fits at the origin")
    return [AnsatzSlot(topo, mass, at) for at in ats]


# --- reduced functionals -------------------------------------------------

def lift(A: SymmetricAnsatz, r) -> Configuration:
    """Lift raw reduced coordinates to the full configuration.

    Raises:
        StratumViolation: if a representative left its component.
        OrbitCollision: if points of two orbits coincide.
    """
    r = np.asarray(r, dtype=float)
    pts = A.points_from_coords(r)
    A.check_coords(r)
    return A.configuration_from_points(pts)


def _lift_map(A: SymmetricAnsatz) -> np.ndarray:
    return A.J @ A.P


def reduced_U(A: SymmetricAnsatz, r, exponent: Optional[float] = None) -> float:
    return potential(lift(A, r), A.exponent if exponent is None else exponent)


def reduced_I(A: SymmetricAnsatz, r) -> float:
    return moment_of_inertia(lift(A, r))


def reduced_grad_U(A: SymmetricAnsatz, r, exponent: Optional[float] = None) -> np.ndarray:
    C = lift(A, r)
    g = grad_potential(C, A.exponent if exponent is None else exponent).ravel()
    return _lift_map(A).T @ g


def reduced_grad_I(A: SymmetricAnsatz, r) -> np.ndarray:
    return _lift_map(A).T @ grad_inertia(lift(A, r)).ravel()


class ReducedFunctional:
    """U and I of an ansatz as functions of the shape coordinates y."""

    def __init__(self, A: SymmetricAnsatz, exponent: Optional[float] = None):
        self.ansatz = A
        self.exponent = A.exponent if exponent is None else float(exponent)
        self.L = A.L
        self.Q = A.Q

    @property
    def n(self) -> int:
        return self.L.shape[1]

    def inertia(self, y: np.ndarray) -> float:
        return float(y @ self.Q @ y)

    def grad_inertia(self, y: np.ndarray) -> np.ndarray:
        return 2.0 * self.Q @ y

    def configuration(self, y: np.ndarray) -> Configuration:
        return self.ansatz.lift_shape(y)

    def value(self, y: np.ndarray) -> float:
        return potential(self.configuration(y), self.exponent)

    def value_and_grad(self, y: np.ndarray) -> Tuple[float, np.ndarray]:
        C = self.configuration(y)
        return (potential(C, self.exponent),
                self.L.T @ grad_potential(C, self.exponent).ravel())

    def hessians(self, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Hessians of U and I in shape coordinates."""
        C = self.configuration(y)
        HU = self.L.T @ hessian_potential(C, self.exponent) @ self.L
        return 0.5 * (HU + HU.T), 2.0 * self.Q

    def retract(self, y: np.ndarray) -> np.ndarray:
        """Scale y onto {I = 1}."""
        inertia = self.inertia(y)
        if inertia <= 0.0:
            raise ZeroInertia("All representatives sit at the origin")
        return y / math.sqrt(inertia)


def check_symmetric(G: FiniteGroup, C: Configuration) -> Tuple[bool, Optional[int]]:
    """(True, None) if every generator maps C to itself with masses, else (False, generator index)."""
    if C.dim != G.dim:
        raise InvalidInput(f"Group acts on R^{G.dim}, configuration lives in R^{C.dim}")
    for gi in G.generators:
        if not act(G.elements[gi], C).matches(C, tol=1e-8):
            return False, int(gi)
    return True, None


def project_to_sphere(A: SymmetricAnsatz, r) -> np.ndarray:
    """Rescale raw coordinates so that the lift has I = 1.

    Raises:
        ZeroInertia: if the lift has zero moment of inertia.
    """
    r = np.asarray(r, dtype=float)
    pts = A.points_from_coords(r)
    inertia = float(np.sum(A.masses * np.sum(pts ** 2, axis=1)))
    if inertia <= 0.0:
        raise ZeroInertia("All representatives sit at the origin")
    return r / math.sqrt(inertia)


def split_slot_masses(A: SymmetricAnsatz, slot_index: int, factor: float,
                      coords=None) -> Tuple[SymmetricAnsatz, np.ndarray, int]:
    """Re-express a planar D_k ansatz under C_k and rescale alternate particles of one slot.

    Every D_k orbit without a reflection in its isotropy splits into two C_k
    orbits {C_k x} and {C_k sigma x}; the second copy of ``slot_index`` gets
    mass ``factor`` times the original. Orbits fixed by a reflection stay whole.

    Args:
        A: Ansatz over a planar dihedral group.
        slot_index: Slot whose alternate particles change mass.
        factor: Mass ratio m'/m.
        coords: Raw coordinates of a point of A (default: the ``at`` points).

    Returns:
        (ansatz over C_k, raw coordinates of the same configuration in it,
        index of the slot holding the rescaled particles)

    Raises:
        InvalidAnsatz: if A's group is not a planar D_k, or the slot does not split.
    """
    G = A.group
    if G.dim != 2 or not G.name.startswith('D_'):
        raise InvalidAnsatz(f"Mass splitting needs a planar dihedral group, got {G.name}")
    if not 0 <= slot_index < len(A.slots):
        raise InvalidAnsatz(f"Slot index {slot_index} out of range")
    if not factor > 0:
        raise InvalidAnsatz(f"Mass factor must be positive, got {factor}")
    k = G.order // 2
    Ck = catalog_group('C', k)
    table = orbit_type_table(Ck)
    if coords is None:
        coords = A.initial_coords()
        if coords is None:
            raise InvalidAnsatz("Mass splitting needs coordinates or 'at' points on every slot")
    coords = np.asarray(coords, dtype=float)
    reflection = np.diag([1.0, -1.0])
    dets = np.linalg.det(G.elements)

    slots: List[AnsatzSlot] = []
    parts: List[np.ndarray] = []
    target = -1
    for s, (slot, c) in enumerate(zip(A.slots, A.split(coords))):
        x = slot.basis @ c if slot.fixed_dim else np.zeros(2)
        has_reflection = any(dets[h] < 0 for h in slot.topo.subgroup.members)
        images = [x] if (has_reflection or slot.fixed_dim == 0) else [x, reflection @ x]
        if s == slot_index and len(images) == 1:
            raise InvalidAnsatz(f"Slot {s} ({slot.topo.label}) is a single C_{k} orbit")
        for j, p in enumerate(images):
            t, local = _locate(Ck, table, p) if slot.fixed_dim else (table.find('G'), np.zeros(0))
            rescaled = s == slot_index and j == 1
            if rescaled:
                target = len(slots)
            mass = slot.mass * (factor if rescaled else 1.0)
            slots.append(AnsatzSlot(t, mass, local if slot.fixed_dim else None))
            parts.append(local)
    spec = {'name': 'C', 'param': k}
    B = SymmetricAnsatz(Ck, slots, A.exponent, spec, A.name)
    logger.debug(f"Split slot {slot_index} of {G.name} into {B!r}")
    return B, (np.concatenate(parts) if parts else np.zeros(0)), target


# --- files ---------------------------------------------------------------

def load_ansatz(path: Union[str, Path]) -> SymmetricAnsatz:
    return SymmetricAnsatz.from_dict(read_json(path))


def save_ansatz(A: SymmetricAnsatz, path: Union[str, Path]) -> Path:
    return write_json(A.to_dict(), path)
