"""Tests for module solver_05."""
import math

import numpy as np
import pytest

from symcentral.core import solver_05
from symcentral.core.groups_01 import centralizer_rotations
from symcentral.core.nbody_03 import central_residual, moment_of_inertia
from symcentral.core.reduction_04 import (
    SymmetricAnsatz, project_to_sphere, reduced_U,
)
from symcentral.core.solver_05 import (
    SolveOptions, dedup, find_critical_points, minimize, polish, solution_coords,
)
from symcentral.utils.errors import CollisionSingularity, NoConvergence, RigidShape


def _triangle():
    return SymmetricAnsatz.from_dict({'group': 'D_3', 'slots': [{'type': 'Z2'}]})


def test_options_from_config():
    opts = SolveOptions.from_config(workers=1)
    assert opts.tol_grad == 1e-10
    assert opts.starts == 64
    assert opts.census_starts == 256
    assert opts.workers == 1
    assert opts.seed == 0
    assert SolveOptions.from_config(starts=3, seed=None).starts == 3


def test_options_seed_from_environment(monkeypatch):
    monkeypatch.setenv('SYMCENTRAL_SEED', '42')
    assert SolveOptions.from_config().seed == 42
    assert SolveOptions.from_config(seed=7).seed == 7


def test_options_validation():
    with pytest.raises(TypeError):
        SolveOptions.from_config(tolerance=1e-3)
    with pytest.raises(ValueError):
        SolveOptions.from_config(tol_grad=0.0)
    with pytest.raises(ValueError):
        SolveOptions.from_config(armijo_shrink=1.5)
    with pytest.raises(ValueError):
        SolveOptions.from_config(starts=0)
    with pytest.raises(ValueError):
        SolveOptions.from_config(exponent=-1.0)
    with pytest.raises(ValueError):
        SolveOptions.from_config(collision_retries=-1)


def test_rigid_triangle(opts):
    cp = minimize(_triangle(), opts)
    assert cp.U == pytest.approx(3.0)
    assert cp.lam == pytest.approx(-1.5)
    assert cp.residual <= 1e-10
    assert cp.edge_ratio == pytest.approx(1.0)
    assert moment_of_inertia(cp.configuration) == pytest.approx(1.0)

    census = find_critical_points(_triangle(), opts)
    assert len(census.distinct) == 1
    assert census.starts_used == 2
    assert census.converged_count == 1
    assert census.failures == 1


def test_exponent_override(opts):
    opts.exponent = 2.0
    cp = minimize(_triangle(), opts)
    assert cp.U == pytest.approx(3.0)
    assert cp.lam == pytest.approx(-3.0)
    assert central_residual(cp.configuration, 2.0)[1] <= 1e-10


def test_origin_only_ansatz_is_rigid(opts):
    A = SymmetricAnsatz.from_dict({'group': 'D_3', 'slots': [{'type': 'G'}]})
    with pytest.raises(RigidShape):
        minimize(A, opts)


def test_euler_line_with_equal_masses(ansatz, opts):
    cp = minimize(ansatz('euler_equal_ansatz'), opts)
    assert cp.U == pytest.approx(2.5 * math.sqrt(2.0), rel=1e-9)
    assert cp.edge_ratio == pytest.approx(0.5, rel=1e-9)
    assert cp.morse_index == 0
    assert cp.kind == 'minimum'
    census = find_critical_points(ansatz('euler_equal_ansatz'), opts)
    assert len(census.distinct) == 1


def test_euler_census_with_unequal_masses(ansatz, opts):
    A = ansatz('euler_collinear_ansatz')
    census = find_critical_points(A, opts)
    assert len(census.distinct) == 3
    assert len(census.minima) == 3
    assert census.saddles == []
    assert census.converged_count + census.failures == census.starts_used
    for cp in census.distinct:
        assert cp.residual <= 1e-10
        assert np.abs(cp.configuration.points[:, 1]).max() <= 1e-12
    Us = [cp.U for cp in census.distinct]
    assert Us == sorted(Us)


def test_nested_triangles_match_a_direct_scan(ansatz, opts):
    A = ansatz('nested_triangles_ansatz')
    cp = minimize(A, opts)
    assert cp.residual <= 1e-10
    r = solution_coords(A, cp)
    ratio = -r[1] / r[0]

    ratios = np.logspace(-1.3, 1.3, 4001)
    values = [reduced_U(A, project_to_sphere(A, [1.0, -q])) for q in ratios]
    best = int(np.argmin(values))
    assert cp.U <= values[best] + 1e-9
    assert cp.U == pytest.approx(values[best], rel=1e-5)
    assert ratio == pytest.approx(ratios[best], rel=2e-3)


def test_results_do_not_depend_on_worker_count(ansatz):
    A = ansatz('nested_triangles_ansatz')
    serial = minimize(A, SolveOptions.from_config(starts=6, workers=1, seed=3))
    threaded = minimize(A, SolveOptions.from_config(starts=6, workers=4, seed=3))
    assert serial.U == threaded.U
    assert serial.start == threaded.start
    assert serial.configuration.points == pytest.approx(threaded.configuration.points, abs=0.0)


def test_polish_from_a_nearby_point(ansatz, opts):
    A = ansatz('euler_collinear_ansatz')
    cp = polish(A, A.initial_coords(), opts, descend=True)
    assert cp.residual <= 1e-10
    again = polish(A, solution_coords(A, cp), opts)
    assert again.U == pytest.approx(cp.U, rel=1e-12)


def test_dedup_removes_repeats(ansatz, opts):
    A = ansatz('euler_collinear_ansatz')
    census = find_critical_points(A, opts)
    rotations = centralizer_rotations(A.group)
    doubled = list(census.distinct) + list(reversed(census.distinct))
    assert len(dedup(doubled, rotations, opts.dedup_tol)) == len(census.distinct)
    # Without the centralizer, mirror-image orderings stay apart
    assert len(dedup(doubled, [np.eye(2)], opts.dedup_tol)) >= len(census.distinct)


def test_serialised_solution(opts):
    cp = minimize(_triangle(), opts)
    data = cp.to_dict()
    assert set(data) >= {'points', 'masses', 'U', 'lambda', 'residual', 'morse_index', 'kind',
                         'edge_ratio', 'inertia'}
    assert len(data['points']) == 3
    assert data['inertia'] == pytest.approx(1.0)


def test_start_that_hits_a_collision_is_redrawn(ansatz, monkeypatch):
    A = ansatz('nested_triangles_ansatz')
    real_descend = solver_05._descend
    shapes = []

    def collide_first_time(F, y, opts):
        shapes.append(y.copy())
        if len(shapes) == 1:
            raise CollisionSingularity('forced collision')
        return real_descend(F, y, opts)

    monkeypatch.setattr(solver_05, '_descend', collide_first_time)
    opts = SolveOptions.from_config(starts=2, workers=1, seed=0)
    cp = minimize(A, opts)
    assert cp.residual <= 1e-10
    assert len(shapes) == 3
    assert not np.allclose(shapes[0], shapes[1])


def test_collision_retry_budget_then_failure(ansatz, monkeypatch):
    A = ansatz('nested_triangles_ansatz')
    calls = []

    def always_collide(F, y, opts):
        calls.append(1)
        raise CollisionSingularity('forced collision')

    monkeypatch.setattr(solver_05, '_descend', always_collide)
    opts = SolveOptions.from_config(starts=3, census_starts=4, collision_retries=2,
                                    workers=1, seed=0)
    with pytest.raises(NoConvergence):
        minimize(A, opts)
    assert len(calls) == 3 * 3

    census = find_critical_points(A, opts)
    assert census.starts_used == 3 + 4
    assert census.failures >= 3
    assert census.converged_count + census.failures == census.starts_used
