import numpy as np
import pytest

from medianlab.core import Morphism, hypercube, path, product, relabel
from medianlab.dynamics import GroupAction, induced_cube_action, parity_subgroup_action, tree_model, validate_action
from medianlab.errors import NotCube, NotEquivariant, NotFactorizable
from medianlab.factorization import classify_walls, cubical_factor, factor_through_cube, is_equivariant_decomposition
from medianlab.oracle import automorphisms
from medianlab.walls import enumerate_walls, is_transverse, wall_codes


def test_classify_walls_examples(p3, p3xc, cube3):
    W1, W2 = classify_walls(p3xc)
    # sign wall: points with b = 0, i.e. even indices
    assert [w.side for w in W1] == [0b010101]
    assert len(W2) == 2
    W1, W2 = classify_walls(cube3)
    assert len(W1) == 3 and W2 == ()
    W1, W2 = classify_walls(p3)
    assert W1 == () and len(W2) == 2


def test_partition_conditions(corpus3):
    for _, M in corpus3:
        W1, W2 = classify_walls(M)
        assert sorted(W1 + W2) == enumerate_walls(M)
        assert all(is_transverse(a, b) for a in W1 for b in W1 if a != b)
        assert all(is_transverse(a, b) for a in W1 for b in W2)


@pytest.mark.parametrize("make, dim, fiber", [
    (lambda: product(path(3), hypercube(1)), 1, 3),
    (lambda: hypercube(3), 3, 1),
    (lambda: path(3), 0, 3),
    (lambda: tree_model(1, with_sign=True), 1, 5),
    (lambda: product(path(3), hypercube(2)), 2, 3),
])
def test_cubical_factor_examples(make, dim, fiber):
    M = make()
    dec = cubical_factor(M)
    assert dec.dim == dim
    assert dec.m_prime.n == fiber
    assert M.n == dec.m_prime.n << dec.dim


def test_m_prime_of_p3_times_cube_is_p3(p3xc):
    dec = cubical_factor(p3xc)
    assert dec.fiber == (0, 2, 4)
    assert np.array_equal(dec.m_prime.table, path(3).table)


def check_decomposition(M):
    dec = cubical_factor(M)
    W1 = list(dec.W1)
    codes = wall_codes(M, W1)
    for x in range(M.n):
        a, c = dec.iso[x]
        assert dec.iso_inverse[a][c] == x
        assert c == codes[x]
        assert dec.fiber[a] in range(M.n)
    for a in range(dec.m_prime.n):
        for c in range(dec.cube.n):
            assert dec.iso[dec.iso_inverse[a][c]] == (a, c)
    a = np.array([dec.iso[x][0] for x in range(M.n)])
    c = np.array([dec.iso[x][1] for x in range(M.n)])
    T = M.table
    assert np.array_equal(a[T], dec.m_prime.table[np.ix_(a, a, a)])
    assert np.array_equal(c[T], dec.cube.table[np.ix_(c, c, c)])
    assert cubical_factor(dec.m_prime).dim == 0
    assert M.n == dec.m_prime.n * 2 ** dec.dim
    return dec


def test_round_trip_on_corpus(corpus3):
    for _, M in corpus3:
        check_decomposition(M)


def test_round_trip_on_tree_models():
    for d in range(3):
        for sign in (False, True):
            dec = check_decomposition(tree_model(d, with_sign=sign))
            assert dec.dim == (1 if sign else 0)


def test_classification_is_automorphism_invariant(corpus3):
    for _, M in corpus3:
        W1, _ = classify_walls(M)
        for g in automorphisms(M):
            assert {w.map(g) for w in W1} == set(W1)
    rng = np.random.default_rng(3)
    M = product(path(3), hypercube(1))
    W1, _ = classify_walls(M)
    for _ in range(5):
        perm = rng.permutation(M.n)
        R = relabel(M, perm)
        assert set(classify_walls(R)[0]) == {w.map(perm) for w in W1}


def test_factor_through_sign_projection(p3xc):
    phi = Morphism(p3xc, hypercube(1), tuple(x % 2 for x in range(6)))
    psi = factor_through_cube(p3xc, phi)
    # the side holding point 0 (b = 0) carries code 1, so psi reads the code flipped
    assert psi.map == (1, 0)
    dec = cubical_factor(p3xc)
    assert all(psi(dec.project(x)) == phi(x) for x in range(6))


def test_factor_constant_map(p3):
    phi = Morphism(p3, hypercube(0), (0, 0, 0))
    psi = factor_through_cube(p3, phi)
    assert psi.map == (0,)


def test_factor_coordinate_projection(square):
    phi = Morphism(square, hypercube(1), tuple(x & 1 for x in range(4)))
    psi = factor_through_cube(square, phi)
    assert psi.is_median_map()
    # psi depends on exactly one code bit
    dependent = [j for j in range(2) if any(psi(c) != psi(c ^ 1 << j) for c in range(4))]
    assert len(dependent) == 1
    dec = cubical_factor(square)
    assert all(psi(dec.project(x)) == phi(x) for x in range(4))


def test_factor_rejects_non_cube_target_and_non_surjective(p3):
    with pytest.raises(NotCube):
        factor_through_cube(p3, Morphism(p3, p3, (0, 1, 2)))
    with pytest.raises(NotFactorizable):
        factor_through_cube(p3, Morphism(p3, hypercube(1), (0, 0, 0)))


def test_factor_rejects_map_separating_a_fiber(p3):
    # P3 has no cube factor, so a surjection onto {0,1} cannot factor
    phi = Morphism(p3, hypercube(1), (0, 0, 1))
    with pytest.raises(NotFactorizable):
        factor_through_cube(p3, phi)


def test_equivariance_examples(cube3, p3):
    action, _ = parity_subgroup_action()
    assert is_equivariant_decomposition(cube3, action, cubical_factor(cube3))
    trivial = validate_action(p3, {"e": np.arange(3)})
    assert is_equivariant_decomposition(p3, trivial, cubical_factor(p3))
    PP = product(path(3), path(3))
    swap = [(x % 3) * 3 + x // 3 for x in range(9)]
    act = validate_action(PP, {"s": swap})
    dec = cubical_factor(PP)
    assert dec.dim == 0
    assert is_equivariant_decomposition(PP, act, dec)


def test_induced_action_on_parity_cube(cube3):
    action, _ = parity_subgroup_action()
    dec = cubical_factor(cube3)
    on_fiber, on_cube = induced_cube_action(action, dec)
    assert dec.m_prime.n == 1
    assert all(np.array_equal(g, [0]) for g in on_fiber.generators.values())
    for name, g in action.generators.items():
        h = on_cube.generators[name]
        for x in range(8):
            assert h[dec.project(x)] == dec.project(int(g[x]))


def test_induced_action_sign_swap(p3xc):
    swap = [x ^ 1 for x in range(6)]
    action = validate_action(p3xc, {"s": swap})
    on_fiber, on_cube = induced_cube_action(action, cubical_factor(p3xc))
    assert on_fiber.generators["s"].tolist() == [0, 1, 2]
    assert on_cube.generators["s"].tolist() == [1, 0]


def test_trivial_action_induces_trivial_actions(p3xc):
    action = validate_action(p3xc, {"e": np.arange(6)})
    on_fiber, on_cube = induced_cube_action(action, cubical_factor(p3xc))
    assert on_fiber.generators["e"].tolist() == [0, 1, 2]
    assert on_cube.generators["e"].tolist() == [0, 1]


def test_non_equivariant_input_is_rejected(p3xc):
    # bypass validation with a permutation that mixes the sign into the path
    bogus = GroupAction(p3xc, {"g": np.array([0, 2, 1, 3, 4, 5])})
    dec = cubical_factor(p3xc)
    assert not is_equivariant_decomposition(p3xc, bogus, dec)
    with pytest.raises(NotEquivariant):
        induced_cube_action(bogus, dec)
