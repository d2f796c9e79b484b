from fractions import Fraction

import numpy as np
import pytest

from latticedex import (
    Infeasible,
    InvalidArgument,
    build_index_code,
    build_oklattice_code,
    oklattice_min_distance,
    oklattice_side_info_gain,
    prime_ideals_above,
    quadratic_field,
)
from latticedex.numberfield.linalg import shortest_nonzero


@pytest.fixture(scope="module")
def zi_primes():
    field = quadratic_field(-1)
    return field, [prime_ideals_above(field, 5)[0], prime_ideals_above(field, 13)[0]]


@pytest.fixture(scope="module")
def zi_m2(zi_primes):
    field, primes = zi_primes
    return build_oklattice_code(field, primes[:1], [[1, 0], [0, 1]])


@pytest.fixture(scope="module")
def zi_m2k2(zi_primes):
    field, primes = zi_primes
    return build_oklattice_code(field, primes, [[1, 0], [0, 1]])


def test_m1_identity_matches_plain_code(zi_primes):
    field, primes = zi_primes
    plain = build_index_code(field, primes)
    stacked = build_oklattice_code(field, primes, [[1]])
    assert stacked.num_messages == plain.size
    assert np.array_equal(stacked.coords_matrix, plain.coords_matrix)
    for k in range(2):
        assert np.array_equal(stacked.residue_indices[k], plain.residue_indices[:, k])
    assert abs(stacked.gamma - plain.gamma) < 1e-15


def test_m2_shape_and_labels(zi_m2):
    code = zi_m2
    assert code.m == 2
    assert code.dimension == 4
    # one message per prime, covering both slots: 5^m cosets
    assert code.num_messages == 25
    assert code.coords_matrix.shape == (25, 4)
    assert code.embedded.shape == (25, 4)
    assert np.array_equal(np.sort(code.residue_indices[0]), np.arange(25))


def test_m2_subcode_and_fixed(zi_m2, zi_m2k2):
    # K=1: revealing the only message pins the point completely
    idx = zi_m2.subcode_indices((1,))
    assert idx.shape[0] == 1
    assert zi_m2.residue_indices[0][idx[0]] == 0
    idx3 = zi_m2.subcode_indices((1,), fixed=[3])
    assert idx3.shape[0] == 1
    assert zi_m2.residue_indices[0][idx3[0]] == 3
    # K=2: one reveal leaves the other message free
    code = zi_m2k2
    assert code.num_messages == 4225
    idx = code.subcode_indices((1,))
    assert idx.shape[0] == 169
    assert np.all(code.residue_indices[0][idx] == 0)
    idx3 = code.subcode_indices((1,), fixed=[3])
    assert idx3.shape[0] == 169
    assert np.all(code.residue_indices[0][idx3] == 3)
    assert code.subcode_indices((1, 2)).shape[0] == 1
    with pytest.raises(InvalidArgument):
        zi_m2.check_side_info((2,))
    with pytest.raises(InvalidArgument):
        zi_m2.check_side_info((0,))


def test_m2_finite_distance_matches_lattice(zi_m2, zi_m2k2):
    val0, _ = shortest_nonzero(zi_m2.gram2_big)
    assert oklattice_min_distance(zi_m2, ()) == Fraction(int(val0), 2)
    vals, _ = shortest_nonzero(zi_m2k2.side_sublattice_gram((1,)))
    assert oklattice_min_distance(zi_m2k2, (1,)) == Fraction(int(vals), 2)


def test_m2_min_distance_rejects_singleton(zi_m2):
    # fully revealed m=1 K=1 subcode has one point
    with pytest.raises(InvalidArgument):
        oklattice_min_distance(
            build_oklattice_code(zi_m2.field, zi_m2.primes, [[1]]), (1,))


def test_unit_column_scaling_preserves_gains(zi_primes):
    field, primes = zi_primes
    theta = field.theta  # i, a unit
    a = build_oklattice_code(field, primes[:1], [[1, 0], [0, 1]])
    b = build_oklattice_code(field, primes[:1], [[1, 0], [field.zero, theta]])
    ra = oklattice_side_info_gain(a, (1,))
    rb = oklattice_side_info_gain(b, (1,))
    assert ra.d0_sq == rb.d0_sq
    assert ra.ds_sq == rb.ds_sq
    assert ra.gamma_db == rb.gamma_db


def test_shear_changes_lattice_but_keeps_point_count(zi_primes):
    field, primes = zi_primes
    theta = field.theta
    shear = build_oklattice_code(field, primes[:1], [[1, 1 + theta], [0, 1]])
    assert shear.num_messages == 25
    r = oklattice_side_info_gain(shear, (1,))
    assert r.bounds_ok


def test_sublattice_gram_determinant_scaling(zi_m2):
    code = zi_m2
    _, ld0 = np.linalg.slogdet(code.gram2_big.astype(float))
    _, ld1 = np.linalg.slogdet(code.side_sublattice_gram((1,)).astype(float))
    # sublattice index is N(p)^m = 25, so the Gram determinant grows by 25^2
    want = ld0 + 2.0 * code.m * np.log(5.0)
    assert abs(ld1 - want) < 1e-8


def test_generator_validation(zi_primes):
    field, primes = zi_primes
    with pytest.raises(InvalidArgument):
        build_oklattice_code(field, primes[:1], [[1, 1], [1, 1]])  # singular
    with pytest.raises(InvalidArgument):
        build_oklattice_code(field, primes[:1], [[1, 0]])  # not square
    with pytest.raises(InvalidArgument):
        build_oklattice_code(field, primes[:1],
                             [[quadratic_field(5).one, 0], [0, 1]])  # wrong field
    with pytest.raises(InvalidArgument):
        build_oklattice_code(field, primes[:1], [[1, 0], [0, 1]],
                             energy_radius_factor=-1.0)
    with pytest.raises(Infeasible):
        build_oklattice_code(field, primes[:1], [[1, 0], [0, 1]],
                             enumeration_cap=24)
    with pytest.raises(InvalidArgument):
        build_oklattice_code(field, [primes[0], primes[0]], [[1]])  # duplicate


def test_totally_real_stack():
    field = quadratic_field(5)
    prime = prime_ideals_above(field, 5)[0]  # ramified, norm 5
    code = build_oklattice_code(field, [prime], [[1, 0], [0, 1]])
    assert code.num_messages == 25
    assert float(code.mean_energy) > 0
    r = oklattice_side_info_gain(code, (1,))
    assert r.lower_bound_db is None  # no exact-uniform claim off the PID fields
    assert r.gamma_db > 0
    assert float(r.ds_sq) <= r.minkowski_upper**2 * (1 + 1e-9)


def test_gain_rejects_empty_set(zi_m2):
    with pytest.raises(InvalidArgument):
        oklattice_side_info_gain(zi_m2, ())
