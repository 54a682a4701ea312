"""Core processing modules."""

from symcentral.core.groups_01 import (
    FiniteGroup,
    Subgroup,
    generate_group,
    catalog_group,
    normalizer,
    are_conjugate,
    embed_group,
    isotypic_decomposition,
    group_from_spec,
)
from symcentral.core.strata_02 import (
    isotropy_subgroup,
    orbit,
    enumerate_isotropy_classes,
    topological_components,
    burnside_type_of,
    random_representative,
    orbit_type_table,
    parse_burnside,
)
from symcentral.core.nbody_03 import (
    Configuration,
    potential,
    moment_of_inertia,
    grad_potential,
    grad_inertia,
    barycenter,
    center,
    act,
    inertia_matrix,
    central_residual,
    fingerprint,
    config_distance,
    load_configuration,
)
from symcentral.core.reduction_04 import (
    SymmetricAnsatz,
    lift,
    reduced_U,
    reduced_I,
    check_symmetric,
    project_to_sphere,
    split_slot_masses,
    load_ansatz,
)
from symcentral.core.solver_05 import SolveOptions, CriticalPoint, Census, minimize, find_critical_points
from symcentral.core.balanced_06 import (
    SpectrumTarget,
    balanced_residual,
    solve_balanced,
    schur_check,
    isotypic_inertia,
)
from symcentral.core.dynamics_07 import integrate, homothetic_test, rotation_test

__all__ = [
    'FiniteGroup', 'Subgroup', 'generate_group', 'catalog_group', 'normalizer',
    'are_conjugate', 'embed_group', 'isotypic_decomposition', 'group_from_spec',
    'isotropy_subgroup', 'orbit', 'enumerate_isotropy_classes', 'topological_components',
    'burnside_type_of', 'random_representative', 'orbit_type_table', 'parse_burnside',
    'Configuration', 'potential', 'moment_of_inertia', 'grad_potential', 'grad_inertia',
    'barycenter', 'center', 'act', 'inertia_matrix', 'central_residual', 'fingerprint',
    'config_distance', 'load_configuration',
    'SymmetricAnsatz', 'lift', 'reduced_U', 'reduced_I', 'check_symmetric',
    'project_to_sphere', 'split_slot_masses', 'load_ansatz',
    'SolveOptions', 'CriticalPoint', 'Census', 'minimize', 'find_critical_points',
    'SpectrumTarget', 'balanced_residual', 'solve_balanced', 'schur_check', 'isotypic_inertia',
    'integrate', 'homothetic_test', 'rotation_test',
]
