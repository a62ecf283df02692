import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eomq.errors import GuardBandError
from eomq.mode_space import (
    MAX_PHOTONS,
    ModeLattice,
    OnePhotonMatrix,
    TwoPortState,
    apply_one_photon_matrix,
    check_guard,
    inner_product,
    make_lattice,
    transform_creators,
)


def test_make_lattice_snaps_integer_ratio():
    lat = make_lattice(200e12, 25e9, 20)
    assert lat.carrier_index == 8000
    assert lat.frequency(8001) == pytest.approx(200e12 + 25e9)


def test_make_lattice_rounds_up():
    lat = make_lattice(10.5, 1.0, 3)
    assert lat.carrier_index == 11


def test_window_cannot_reach_zero_frequency():
    with pytest.raises(ValueError, match="non-positive|zero frequency"):
        make_lattice(5.0, 1.0, 5)


def test_lattice_validation():
    with pytest.raises(ValueError):
        ModeLattice(5, 1.0, 0, 10)
    with pytest.raises(ValueError):
        ModeLattice(20, 1.0, 1, 10)
    lat = ModeLattice.from_window(3, 9)
    assert lat.size == 7 and list(lat.modes) == list(range(3, 10))
    with pytest.raises(IndexError):
        lat.index(2)


def test_floor_is_not_a_truncated_edge():
    lat = ModeLattice.from_window(1, 20, 5)
    assert lat.edge_distance(1) == 19
    lat2 = ModeLattice.from_window(2, 20, 5)
    assert lat2.edge_distance(2) == 0


def test_state_canonical_keys_merge():
    s = TwoPortState({((2, 3, 1), (1, 4, 1)): 1.0, ((1, 4, 1), (2, 3, 1)): 1.0})
    assert len(s) == 1
    assert s.amplitude([(1, 4, 1), (2, 3, 1)]) == 2.0


def test_photon_cap():
    with pytest.raises(ValueError):
        TwoPortState.fock([(1, 3, MAX_PHOTONS + 1)])


def test_json_round_trip():
    s = TwoPortState({((1, 3, 2),): 0.6j, ((1, 2, 1), (2, 5, 1)): -0.8})
    back = TwoPortState.from_json(s.to_json())
    assert back.terms == s.terms


def test_inner_product_and_norm():
    a = TwoPortState({((1, 1, 1),): 0.6, ((2, 1, 1),): 0.8j})
    assert a.norm() == pytest.approx(1.0)
    assert inner_product(a, a) == pytest.approx(1.0)
    b = TwoPortState.single(2, 1)
    assert inner_product(a, b) == pytest.approx(-0.8j)
    assert inner_product(b, a) == pytest.approx(0.8j)


def test_transform_creators_bose_factor():
    # a+ -> (a+_1 + a+_2)/sqrt2 on |2> gives |2,0>/2 + |1,1>/sqrt2 + |0,2>/2
    s = TwoPortState.fock([(1, 1, 2)])
    out = transform_creators(s, lambda p, q: [((1, q), 1 / math.sqrt(2)), ((2, q), 1 / math.sqrt(2))])
    assert out.amplitude([(1, 1, 2)]) == pytest.approx(0.5)
    assert out.amplitude([(2, 1, 2)]) == pytest.approx(0.5)
    assert out.amplitude([(1, 1, 1), (2, 1, 1)]) == pytest.approx(1 / math.sqrt(2))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.floats(0, 2 * math.pi), st.floats(0, 1))
def test_unitary_substitution_preserves_norm(n, phase, k):
    c, s = math.sqrt(1 - k), math.sqrt(k)
    u = {1: [((1, 1), c), ((2, 1), s * np.exp(1j * phase))],
         2: [((1, 1), -s * np.exp(-1j * phase)), ((2, 1), c)]}
    state = TwoPortState.fock([(1, 1, n), (2, 1, 1)])
    out = transform_creators(state, lambda p, q: u[p])
    assert out.norm() == pytest.approx(1.0, abs=1e-12)


def test_pruning():
    s = TwoPortState({((1, 1, 1),): 1.0, ((1, 2, 1),): 1e-16})
    assert len(s.pruned()) == 1


def test_port_marginal():
    s = TwoPortState({((1, 1, 2),): 0.6, ((1, 1, 1), (2, 2, 1)): 0.8})
    assert s.port_marginal(1) == pytest.approx({2: 0.36, 1: 0.64})


def test_matrix_then_order():
    lat = ModeLattice.from_window(1, 3, 2)
    a = OnePhotonMatrix(lat, np.roll(np.eye(3), 1, axis=0).astype(complex))
    b = OnePhotonMatrix(lat, np.diag([1, 2, 3]).astype(complex))
    assert np.array_equal(a.then(b).data, b.data @ a.data)


def test_guard_checks():
    lat = ModeLattice.from_window(5, 30, 15)
    mat = OnePhotonMatrix(lat, np.eye(lat.size, dtype=complex), guard=4)
    check_guard(mat, [9, 26])
    with pytest.raises(GuardBandError):
        check_guard(mat, [8])
    with pytest.raises(GuardBandError):
        apply_one_photon_matrix(TwoPortState.single(1, 27), 1, mat)


def test_apply_matrix_leaves_other_port():
    lat = ModeLattice.from_window(1, 4, 2)
    perm = OnePhotonMatrix(lat, np.roll(np.eye(4), 1, axis=0).astype(complex))
    s = TwoPortState.fock([(1, 2, 1), (2, 2, 1)])
    out = apply_one_photon_matrix(s, 1, perm)
    assert out.amplitude([(1, 3, 1), (2, 2, 1)]) == pytest.approx(1.0)
