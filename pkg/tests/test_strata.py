"""Tests for module strata_02."""
import numpy as np
import pytest

from symcentral.core.groups_01 import (
    catalog_group, generate_group, subgroup_generated, trivial_subgroup,
)
from symcentral.core.nbody_03 import Configuration
from symcentral.core.strata_02 import (
    BurnsideType, _chambers_space, build_stratum, burnside_type_of, enumerate_isotropy_classes,
    isotropy_subgroup, orbit, orbit_type_table, parse_burnside, random_representative,
    subgroup_name, topological_components,
)
from symcentral.utils.errors import (
    InvalidInput, NotIsotropy, NotSymmetric, StratumViolation, UnknownName,
)


def test_isotropy_and_orbit_in_d3(d3):
    assert isotropy_subgroup(d3, [0.0, 0.0]).order == 6
    assert isotropy_subgroup(d3, [0.7, 0.0]).order == 2
    assert isotropy_subgroup(d3, [0.7, 0.2]).order == 1
    assert orbit(d3, [0.7, 0.0]).shape == (3, 2)
    assert orbit(d3, [0.7, 0.2]).shape == (6, 2)
    assert orbit(d3, [0.0, 0.0]).shape == (1, 2)
    norms = np.linalg.norm(orbit(d3, [0.7, 0.2]), axis=1)
    assert norms == pytest.approx(np.full(6, np.hypot(0.7, 0.2)))


def test_isotropy_rejects_wrong_dimension(d3):
    with pytest.raises(InvalidInput):
        isotropy_subgroup(d3, [1.0, 0.0, 0.0])


@pytest.mark.parametrize('k, n_classes', [(3, 3), (5, 3), (4, 4), (6, 4)])
def test_dihedral_isotropy_classes(k, n_classes):
    G = catalog_group('D', k)
    classes = enumerate_isotropy_classes(G)
    assert len(classes) == n_classes
    assert len(orbit_type_table(G).topo_types) == 4


def test_d3_labels_and_components(d3):
    table = orbit_type_table(d3)
    assert table.labels == ['D_3', 'Z2', "Z2'", '1']
    assert table.find('G') is table.find('D_3')
    ray = table.find('Z2')
    assert ray.orbit_size == 3
    assert ray.stratum.n_components == 2
    assert ray.representative_point[0] > 0
    assert table.find("Z2'").representative_point[0] < 0
    generic = table.find('1')
    assert generic.stratum.n_components == 1
    assert generic.stratum.walls.shape == (3, 2)
    assert len(generic.stratum.chambers) == 6


def test_d4_reflection_classes_get_suffixes(d4):
    table = orbit_type_table(d4)
    names = [ot.name for ot in table.orbit_types]
    assert names[0] == 'D_4'
    assert sorted(names[1:3]) == ['Z2^a', 'Z2^b']
    assert names[3] == '1'
    # -I swaps the two ends of every mirror line
    for name in ('Z2^a', 'Z2^b'):
        assert table.find(name).stratum.n_components == 1
    with pytest.raises(UnknownName):
        table.find("Z2^a'")


def test_tetrahedral_orbit_types():
    G = catalog_group('T_d')
    table = orbit_type_table(G)
    sizes = sorted(ot.orbit_size for ot in table.orbit_types)
    assert sizes == [1, 4, 6, 12, 24]
    axis3 = [ot for ot in table.orbit_types if ot.orbit_size == 4][0]
    assert axis3.name == 'D3'
    assert axis3.fixed_dim == 1
    assert table.strata[axis3.class_id].n_components == 2
    axis2 = [ot for ot in table.orbit_types if ot.orbit_size == 6][0]
    assert axis2.name == 'Z2xZ2'
    assert table.strata[axis2.class_id].n_components == 1


def test_classify_vertex_and_face_directions():
    G = catalog_group('T_d')
    table = orbit_type_table(G)
    vertex = table.classify([1.0, 1.0, 1.0])
    face = table.classify([-1.0, -1.0, -1.0])
    assert vertex.base is face.base
    assert vertex.index != face.index


def test_classify_is_invariant_under_the_group(d3):
    table = orbit_type_table(d3)
    for x in ([0.77, 0.0], [-1.32, 0.0], [1.8, 0.36]):
        t = table.classify(x)
        for g in d3.elements:
            assert table.classify(g @ np.array(x)) is t


def test_subgroup_names(d3, d4):
    assert subgroup_name(subgroup_generated(d3, [])) == '1'
    assert subgroup_name(isotropy_subgroup(d3, [1.0, 0.0])) == 'Z2'
    rotations = subgroup_generated(d4, [d4.generators[0]])
    assert subgroup_name(rotations) == 'Z4'
    O_h = catalog_group('O_h')
    assert subgroup_name(isotropy_subgroup(O_h, [1.0, 1.0, 0.0])) == 'Z2xZ2'


def test_topological_components_of_a_ray(d3):
    H = isotropy_subgroup(d3, [1.0, 0.0])
    comps = topological_components(d3, H)
    assert [t.label for t in comps] == ['Z2', "Z2'"]


def test_topological_components_rejects_non_isotropy(d4):
    rotations = subgroup_generated(d4, [d4.generators[0]])
    with pytest.raises(NotIsotropy):
        topological_components(d4, rotations)


def test_random_representative_lands_in_its_component(d3):
    table = orbit_type_table(d3)
    for t in table.topo_types:
        for seed in range(5):
            x = random_representative(t, (0.5, 2.0), seed)
            assert table.classify(x) is t
            if t.fixed_dim:
                assert 0.5 <= np.linalg.norm(x) <= 2.0
    x1 = random_representative(table.find('1'), rng_seed=7)
    x2 = random_representative(table.find('1'), rng_seed=7)
    assert x1 == pytest.approx(x2)


def test_burnside_type_of_the_d3_fixture(d3, configuration):
    C = configuration('twelve_body_d3_config')
    assert C.n == 12
    B = burnside_type_of(d3, C)
    assert B.to_text() == "1(Z2) + 1(Z2)' + 1(1)"
    assert B.n_bodies == 12
    assert B.label_counts() == {'Z2': 1, "Z2'": 1, '1': 1}


def test_burnside_type_with_origin(d4, configuration):
    C = configuration('thirteen_body_d4_config')
    assert C.n == 13
    B = burnside_type_of(d4, C)
    assert B.n_bodies == 13
    table = orbit_type_table(d4)
    axis = table.classify([1.0, 0.0]).label
    diagonal = table.classify([1.0, 1.0]).label
    assert {axis, diagonal} == {'Z2^a', 'Z2^b'}
    expected = parse_burnside(f"eps(D_4) + 2({axis}) + 1({diagonal})", table)
    assert B == expected
    assert B.to_text() == expected.to_text()
    assert B.label_counts() == {'D_4': 1, axis: 2, diagonal: 1}


def test_parse_burnside_round_trip(d3):
    table = orbit_type_table(d3)
    text = "eps(D_3) + 2(Z2)' + 1(1)"
    B = parse_burnside(text, table)
    assert B.n_bodies == 1 + 6 + 6
    assert parse_burnside(B.to_text(), table) == B
    assert parse_burnside('0', table).n_bodies == 0
    assert parse_burnside("1(Z2)′", table) == parse_burnside("1(Z2)'", table)


def test_parse_burnside_errors(d3):
    table = orbit_type_table(d3)
    with pytest.raises(InvalidInput):
        parse_burnside('2(D_3)', table)
    with pytest.raises(InvalidInput):
        parse_burnside('Z2 +', table)
    with pytest.raises(UnknownName):
        parse_burnside('1(Z3)', table)


def test_burnside_type_rejects_asymmetric_configurations(d3):
    with pytest.raises(NotSymmetric):
        burnside_type_of(d3, Configuration([[1.0, 0.0], [0.0, 1.0]]))
    pts = orbit(d3, [1.0, 0.0])
    with pytest.raises(NotSymmetric):
        burnside_type_of(d3, Configuration(pts, [1.0, 1.0, 2.0]))


def test_component_index_rejects_wall_points(d3):
    generic = orbit_type_table(d3).find('1').stratum
    with pytest.raises(StratumViolation):
        generic.component_index(np.array([1.0, 0.0]))


def test_empty_burnside_type(d3):
    B = BurnsideType(orbit_type_table(d3), {})
    assert B.to_text() == '0'
    assert B.n_bodies == 0


@pytest.mark.parametrize('name, n_chambers', [('T_d', 24), ('O_h', 48), ('I_h', 120)])
def test_generic_chambers_of_reflection_groups(name, n_chambers):
    stratum = orbit_type_table(catalog_group(name)).find('1').stratum
    assert len(stratum.chambers) == n_chambers
    assert stratum.n_components == 1
    for ch in stratum.chambers:
        assert stratum.sign_vector(ch.point) == (ch.sign, True)


def test_thin_chambers_in_space_are_all_found():
    a = 1e-3
    walls = np.array([[0.0, 0.0, 1.0],
                      [np.sin(a), 0.0, np.cos(a)],
                      [0.0, np.sin(a), np.cos(a)]])
    chambers = _chambers_space(walls)
    assert len(chambers) == 8
    assert len({sign for sign, _ in chambers}) == 8
    for sign, p in chambers:
        vals = walls @ p
        assert tuple(int(v) for v in np.sign(vals)) == sign
        assert np.min(np.abs(vals)) > 0.0
        assert np.linalg.norm(p) == pytest.approx(1.0)


def test_chambers_around_a_common_line():
    angles = np.pi * np.arange(3) / 3
    walls = np.stack([np.sin(angles), -np.cos(angles), np.zeros(3)], axis=1)
    assert len(_chambers_space(walls)) == 6
    assert len(_chambers_space(walls[:1])) == 2


def test_chambers_of_a_four_dimensional_fixed_space():
    G = generate_group([np.diag(s) for s in np.eye(4) * -2 + 1], name='coordinate reflections')
    assert G.order == 16
    stratum = build_stratum(G, trivial_subgroup(G))
    assert len(stratum.chambers) == 16
    assert stratum.n_components == 1
