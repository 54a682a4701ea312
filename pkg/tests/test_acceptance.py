"""Long-running regression runs over the packaged fixtures.

Deselect with ``pytest -m "not slow"``.
"""
import numpy as np
import pytest
from scipy.spatial.distance import pdist

from symcentral.core.balanced_06 import SpectrumTarget, balanced_residual, solve_balanced
from symcentral.core.dynamics_07 import homothetic_test, rotation_test
from symcentral.core.groups_01 import catalog_group
from symcentral.core.nbody_03 import central_residual, inertia_matrix, moment_of_inertia
from symcentral.core.reduction_04 import SymmetricAnsatz
from symcentral.core.solver_05 import SolveOptions, find_critical_points, minimize
from symcentral.core.strata_02 import orbit_type_table
from symcentral.fixtures import fixture_names

pytestmark = pytest.mark.slow

ANSATZ_FIXTURES = [n[:-5] for n in fixture_names()
                   if n.endswith('_ansatz.json') and not n.startswith('bad_')]


def _regular_tetrahedron(points):
    d = pdist(points)
    return np.ptp(d) <= 1e-6 * d.max()


def _square_in_a_coordinate_plane(points):
    d = np.sort(pdist(points))
    flat = (np.abs(points) <= 1e-6).all(axis=0).any()
    return flat and np.ptp(d[:4]) <= 1e-6 and d[4:] == pytest.approx([d[0] * 2 ** 0.5] * 2)


def test_truncated_tetrahedron(ansatz):
    A = ansatz('truncated_tetrahedron_ansatz')
    assert A.n_bodies == 12
    opts = SolveOptions.from_config(workers=2)
    cp = minimize(A, opts)
    assert cp.residual <= 1e-10
    assert 0.845 <= cp.edge_ratio <= 0.865
    assert cp.edge_ratio != pytest.approx(1.0, abs=1e-2)
    census = find_critical_points(A, SolveOptions.from_config(census_starts=64, workers=2))
    assert len(census.distinct) == 1


def test_d2_census_of_four_equal_masses(ansatz):
    A = ansatz('d2_census_ansatz')
    census = find_critical_points(A, SolveOptions.from_config(workers=2))
    assert len(census.distinct) == 5
    assert len(census.minima) == 2
    assert len(census.saddles) == 3
    for cp in census.minima:
        assert _regular_tetrahedron(cp.configuration.points)
    for cp in census.saddles:
        assert cp.morse_index >= 1
        assert _square_in_a_coordinate_plane(cp.configuration.points)


@pytest.mark.parametrize('name, n', [
    ('cuboctahedron_config', 12),
    ('icosidodecahedron_config', 30),
])
def test_edge_regular_solids_are_central(configuration, name, n):
    C = configuration(name)
    assert C.n == n
    _, residual = central_residual(C)
    assert residual <= 1e-10
    assert balanced_residual(C).is_central


@pytest.mark.parametrize('name', ANSATZ_FIXTURES)
@pytest.mark.parametrize('seed', [0, 1, 2, 3])
def test_reduced_solutions_are_central_in_full_space(ansatz, name, seed):
    A = ansatz(name)
    cp = minimize(A, SolveOptions.from_config(starts=8, workers=2, seed=seed))
    C = cp.configuration
    assert central_residual(C, A.exponent)[1] <= 1e-8
    assert moment_of_inertia(C) == pytest.approx(1.0, rel=1e-10)
    assert cp.lam == pytest.approx(-0.5 * A.exponent * cp.U, rel=1e-8)
    result = balanced_residual(C, A.exponent)
    assert result.residual <= 1e-8
    assert result.is_central


def test_unique_minimum_does_not_depend_on_the_seed(ansatz):
    A = ansatz('nested_triangles_ansatz')
    solutions = [minimize(A, SolveOptions.from_config(starts=8, workers=2, seed=s))
                 for s in range(4)]
    for cp in solutions[1:]:
        assert cp.U == pytest.approx(solutions[0].U, rel=1e-10)
        assert cp.configuration.points == pytest.approx(
            solutions[0].configuration.points, abs=1e-6)


def _random_ansatz(rng, group_names):
    while True:
        G = catalog_group(str(rng.choice(group_names)))
        table = orbit_type_table(G)
        types = [t for t in table.topo_types if t.orbit_size > 1]
        picks = [types[i] for i in rng.integers(0, len(types), size=int(rng.integers(1, 4)))]
        if sum(t.orbit_size for t in picks) > 30:
            continue
        slots = [{'type': t.label, 'mass': float(rng.uniform(0.5, 2.0))} for t in picks]
        return SymmetricAnsatz.from_dict({'group': G.name, 'slots': slots})


def test_random_burnside_types_have_collision_free_minima():
    rng = np.random.default_rng(2024)
    groups = ['C_3', 'C_5', 'D_3', 'D_4', 'D_6', 'C_2h', 'D_3h', 'D_2rot', 'T_d']
    for _ in range(20):
        A = _random_ansatz(rng, groups)
        assert A.n_bodies <= 30
        cp = minimize(A, SolveOptions.from_config(starts=16, workers=2, seed=7))
        assert cp.residual <= 1e-8, A.burnside_type().to_text()
        assert pdist(cp.configuration.points).min() > 1e-3


def test_isotropic_balanced_solve_is_the_central_minimum(ansatz):
    A = ansatz('truncated_tetrahedron_ansatz')
    opts = SolveOptions.from_config(starts=8, workers=2)
    result = solve_balanced(A, SpectrumTarget([1 / 3] * 3), opts)
    assert result.is_central
    assert result.residual <= 1e-8
    assert inertia_matrix(result.configuration).spectrum == pytest.approx([1 / 3] * 3, abs=1e-8)
    assert result.U == pytest.approx(minimize(A, opts).U, rel=1e-6)


def test_dynamical_certificates_of_solved_fixtures(ansatz, configuration):
    opts = SolveOptions.from_config(starts=8, workers=2)
    planar = minimize(ansatz('euler_equal_ansatz'), opts).configuration
    spatial = minimize(ansatz('truncated_tetrahedron_ansatz'), opts).configuration
    assert rotation_test(planar) <= 1e-6
    assert homothetic_test(planar) <= 1e-5
    assert homothetic_test(spatial) <= 1e-5
    for name in ('lagrange_triangle_config', 'lagrange_123_config'):
        C = configuration(name)
        assert rotation_test(C) <= 1e-6
        assert homothetic_test(C) <= 1e-5
    assert homothetic_test(configuration('cuboctahedron_config')) <= 1e-5
