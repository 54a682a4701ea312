"""Tests for module reduction_04."""
import numpy as np
import pytest

from symcentral.core.groups_01 import catalog_group
from symcentral.core.nbody_03 import (
    barycenter, configurations_match, grad_potential, moment_of_inertia, potential,
)
from symcentral.core.reduction_04 import (
    ReducedFunctional, SymmetricAnsatz, check_symmetric, lift, load_ansatz, project_to_sphere,
    reduced_grad_I, reduced_grad_U, reduced_I, reduced_U, save_ansatz, split_slot_masses,
)
from symcentral.fixtures import fixture_path
from symcentral.utils.errors import (
    InvalidAnsatz, InvalidInput, OrbitCollision, StratumViolation, ZeroInertia,
)


def _fd(f, x, h=1e-6):
    g = np.zeros_like(x)
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        g[k] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def test_d3_ansatz_structure(ansatz):
    A = ansatz('twelve_body_d3_ansatz')
    assert A.n_bodies == 12
    assert A.coords_dim == 4
    assert A.shape_dim == 4
    assert A.slot_dims == [1, 1, 2]
    assert A.burnside_type().to_text() == "1(Z2) + 1(Z2)' + 1(1)"
    assert A.J.shape == (24, 4)
    assert A.Q == pytest.approx(A.Q.T)


def test_lift_reproduces_the_orbit_configuration(ansatz, configuration):
    A = ansatz('twelve_body_d3_ansatz')
    C = lift(A, A.initial_coords())
    assert configurations_match(C, configuration('twelve_body_d3_config'))
    ok, bad = check_symmetric(A.group, C)
    assert ok and bad is None


def test_reduced_functionals_agree_with_the_lift(ansatz):
    A = ansatz('c2h_ansatz')
    assert A.n_bodies == 8
    assert A.coords_dim == 6
    r = A.initial_coords()
    C = lift(A, r)
    assert reduced_U(A, r) == pytest.approx(potential(C))
    assert reduced_I(A, r) == pytest.approx(moment_of_inertia(C))
    assert reduced_grad_U(A, r) == pytest.approx(_fd(lambda x: reduced_U(A, x), r), rel=1e-6, abs=1e-8)
    assert reduced_grad_I(A, r) == pytest.approx(_fd(lambda x: reduced_I(A, x), r), rel=1e-6, abs=1e-8)


def test_symmetric_gradient_is_tangent_to_the_fixed_space(ansatz):
    """grad U at a symmetric point lies in the range of the lift."""
    A = ansatz('twelve_body_d3_ansatz')
    r = A.initial_coords()
    C = lift(A, r)
    full = grad_potential(C).ravel()
    assert np.linalg.norm(full - A.J @ np.linalg.lstsq(A.J, full, rcond=None)[0]) < 1e-10


def test_reduced_functional_in_shape_coordinates(ansatz):
    A = ansatz('twelve_body_d3_ansatz')
    F = ReducedFunctional(A)
    y = A.shape_from_coords(A.initial_coords())
    assert F.n == A.shape_dim
    assert F.inertia(y) == pytest.approx(moment_of_inertia(F.configuration(y)))
    value, grad = F.value_and_grad(y)
    assert value == pytest.approx(F.value(y))
    assert grad == pytest.approx(_fd(F.value, y), rel=1e-6, abs=1e-8)
    HU, HI = F.hessians(y)
    assert HI == pytest.approx(2 * A.Q)
    h = 1e-6
    for k in range(F.n):
        e = np.zeros(F.n)
        e[k] = h
        column = (F.value_and_grad(y + e)[1] - F.value_and_grad(y - e)[1]) / (2 * h)
        assert HU[:, k] == pytest.approx(column, rel=1e-5, abs=1e-6)
    y1 = F.retract(y)
    assert F.inertia(y1) == pytest.approx(1.0)
    with pytest.raises(ZeroInertia):
        F.retract(np.zeros(F.n))


def test_fixed_vectors_are_centred(ansatz):
    A = ansatz('euler_collinear_ansatz')
    assert A.n_bodies == 3
    assert A.coords_dim == 3
    assert A.shape_dim == 2
    C = lift(A, A.initial_coords())
    assert barycenter(C) == pytest.approx(np.zeros(2), abs=1e-12)
    assert np.abs(C.points[:, 1]).max() <= 1e-12
    y = A.shape_from_coords(A.initial_coords())
    assert A.points_from_shape(y) == pytest.approx(C.points)


def test_project_to_sphere(ansatz):
    A = ansatz('nested_triangles_ansatz')
    r = project_to_sphere(A, [2.0, -3.0])
    assert reduced_I(A, r) == pytest.approx(1.0)
    assert r[0] / r[1] == pytest.approx(2.0 / -3.0)


def test_lift_errors():
    A = SymmetricAnsatz.from_dict({'group': 'D_3', 'slots': [{'type': 'Z2'}, {'type': 'Z2'}]})
    with pytest.raises(OrbitCollision):
        lift(A, [1.0, 1.0])
    with pytest.raises(StratumViolation):
        lift(A, [-1.0, 1.0])
    with pytest.raises(StratumViolation):
        lift(A, [0.0, 1.0])
    with pytest.raises(InvalidInput):
        lift(A, [1.0])


def test_generic_orbit_on_a_wall_is_rejected(ansatz):
    A = ansatz('twelve_body_d3_ansatz')
    r = A.initial_coords().copy()
    r[3] = 0.0
    with pytest.raises(StratumViolation):
        lift(A, r)


def test_slot_parsing():
    A = SymmetricAnsatz.from_dict({
        'group': 'D_3',
        'slots': [{'type': 'G'}, {'type': "Z2'", 'count': 2, 'masses': [2.0, 2.0, 2.0]}],
    })
    assert A.n_bodies == 7
    assert [s.mass for s in A.slots] == [1.0, 2.0, 2.0]
    assert A.burnside_type().to_text() == "eps(D_3) + 2(Z2)'"


@pytest.mark.parametrize('slots', [
    [],
    [{'type': 'Z2', 'at': [-1.0, 0.0]}],
    [{'type': 'G'}, {'type': 'G'}],
    [{'mass': 1.0}],
    [{'type': 'Z2', 'mass': -1.0}],
    [{'type': 'Z2', 'count': 0}],
    [{'type': 'Z2', 'masses': [1.0, 2.0, 1.0]}],
    [{'at': [[1.0, 0.0], [-1.0, 0.0]], 'count': 2}],
])
def test_invalid_slots(slots):
    with pytest.raises(InvalidAnsatz):
        SymmetricAnsatz.from_dict({'group': 'D_3', 'slots': slots})


def test_bad_masses_fixture():
    with pytest.raises(InvalidAnsatz):
        load_ansatz(fixture_path('bad_masses_ansatz'))


def test_with_mass_and_exponent(ansatz):
    A = ansatz('euler_collinear_ansatz')
    B = A.with_mass(1, 5.0)
    assert [s.mass for s in B.slots] == [1.0, 5.0, 3.0]
    assert [s.mass for s in A.slots] == [1.0, 2.0, 3.0]
    assert A.with_exponent(2.0).exponent == 2.0
    with pytest.raises(InvalidAnsatz):
        A.with_mass(3, 1.0)
    with pytest.raises(InvalidAnsatz):
        A.with_exponent(0.0)


def test_check_symmetric_reports_a_generator(configuration):
    C = configuration('twelve_body_d3_config')
    ok, gi = check_symmetric(catalog_group('D_4'), C)
    assert not ok
    assert gi is not None
    with pytest.raises(InvalidInput):
        check_symmetric(catalog_group('T_d'), C)


def test_split_slot_masses(ansatz):
    A = ansatz('twelve_body_d3_ansatz')
    B, coords, target = split_slot_masses(A, 2, 1.0)
    assert B.group.name == 'C_3'
    assert len(B.slots) == 4
    assert target == 3
    assert configurations_match(lift(B, coords), lift(A, A.initial_coords()))

    B2, coords2, target2 = split_slot_masses(A, 2, 2.0)
    assert sorted(B2.masses.tolist()) == [1.0] * 9 + [2.0] * 3
    assert B2.slots[target2].mass == 2.0
    assert lift(B2, coords2).points == pytest.approx(lift(B, coords).points)


def test_split_slot_masses_errors(ansatz):
    A = ansatz('twelve_body_d3_ansatz')
    with pytest.raises(InvalidAnsatz):
        split_slot_masses(A, 0, 2.0)
    with pytest.raises(InvalidAnsatz):
        split_slot_masses(A, 2, 0.0)
    with pytest.raises(InvalidAnsatz):
        split_slot_masses(ansatz('c2h_ansatz'), 2, 2.0)


def test_ansatz_json_round_trip(ansatz, tmp_path):
    A = ansatz('twelve_body_d3_ansatz')
    path = save_ansatz(A, tmp_path / 'ansatz.json')
    B = load_ansatz(path)
    assert B.burnside_type().to_text() == A.burnside_type().to_text()
    assert B.initial_coords() == pytest.approx(A.initial_coords())
    assert B.name == A.name
