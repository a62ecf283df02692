import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eomq.amp_mod import EomConfig, default_window, preset
from eomq.errors import ContractViolation, GuardBandError
from eomq.mode_space import ModeLattice, TwoPortState
from eomq.phase_mod import ToneConfig
from eomq.quantum_channel import (
    OnePhotonDensity,
    apply_channel,
    block_decompose,
    channel_by_propagation,
    channel_output,
    completeness_defect,
    kraus_consistency,
    kraus_operators,
    reduced_density,
    vw_operators,
)
from eomq.splitters import make_splitter

from . import oracles

SPLITTERS = ["dc", "yb_split", "yb_combine"]

configs = st.builds(
    EomConfig,
    st.builds(make_splitter, st.sampled_from(SPLITTERS), st.floats(0, 1)),
    st.builds(make_splitter, st.sampled_from(SPLITTERS), st.floats(0, 1)),
    st.builds(ToneConfig, st.floats(0, 2), st.floats(-3, 3), st.floats(-3, 3)),
    st.builds(ToneConfig, st.floats(0, 2), st.floats(-3, 3), st.floats(-3, 3)),
    st.booleans(),
)


def extinction_config():
    # static Y-branch biased so that half the light reaches port 1
    return EomConfig(
        make_splitter("yb_split"),
        make_splitter("yb_combine"),
        ToneConfig(0.0, 0.0, 0.0),
        ToneConfig(0.0, 0.0, math.pi / 2),
    )


def carrier_density(lat, spread=0):
    rng = np.random.default_rng(spread)
    vecs = []
    for _ in range(3):
        v = np.zeros(lat.size, dtype=complex)
        for d in range(-spread, spread + 1):
            v[lat.index(lat.carrier_index + d)] = rng.normal() + 1j * rng.normal()
        vecs.append(v)
    return OnePhotonDensity.mixture(lat, [0.5, 0.3, 0.2], vecs)


def test_density_validation():
    lat = ModeLattice.from_window(10, 13)
    with pytest.raises(ValueError):
        OnePhotonDensity(lat, np.eye(3))
    with pytest.raises(ValueError):
        OnePhotonDensity(lat, np.eye(4))
    with pytest.raises(ValueError):
        OnePhotonDensity(lat, np.diag([1.5, -0.5, 0, 0]))
    bad = np.eye(4, dtype=complex) / 4
    bad[0, 1] = 0.1j
    with pytest.raises(ValueError):
        OnePhotonDensity(lat, bad)


@settings(max_examples=40, deadline=None)
@given(configs)
def test_channel_is_trace_preserving(cfg):
    lat = default_window(cfg)
    res = apply_channel(carrier_density(lat, spread=2), cfg)
    assert abs(res.p0 + res.p1 - 1.0) < 1e-10
    v, w = vw_operators(cfg, lat)
    assert completeness_defect(v, w) < 1e-10


@settings(max_examples=15, deadline=None)
@given(configs)
def test_kraus_form_matches_propagation(cfg):
    lat = default_window(cfg)
    rep = kraus_consistency(carrier_density(lat, spread=1), cfg)
    assert rep["reconstruction_error"] < 1e-10
    assert rep["completeness_error"] < 1e-10
    assert rep["vacuum_weight"] + rep["photon_weight"] == pytest.approx(1.0, abs=1e-10)


def test_conditional_state_is_normalized():
    cfg = preset("dsb_quadrature", 0.7)
    lat = default_window(cfg)
    res = apply_channel(carrier_density(lat, spread=1), cfg)
    assert res.has_photon
    assert np.trace(res.conditional.matrix).real == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(res.unnormalized / res.p1, res.conditional.matrix, atol=1e-12)


def test_full_extinction_gives_no_conditional_state():
    cfg = EomConfig(
        make_splitter("yb_split"),
        make_splitter("yb_combine"),
        ToneConfig(0.5, 0.0, 0.0),
        ToneConfig(0.5, 0.0, math.pi),
    )
    lat = default_window(cfg)
    res = apply_channel(carrier_density(lat), cfg)
    assert res.p1 < 1e-12
    assert res.conditional is None
    assert not res.has_photon


def test_edge_support_rejected():
    cfg = preset("dsb_quadrature", 1.0)
    lat = default_window(cfg)
    v = np.zeros(lat.size)
    v[1] = 1.0
    rho = OnePhotonDensity.pure(lat, v)
    with pytest.raises(GuardBandError):
        apply_channel(rho, cfg)
    with pytest.raises(GuardBandError):
        kraus_consistency(rho, cfg)


def test_kraus_operator_count():
    cfg = preset("ssb_lower_suppressed", 0.8)
    lat = default_window(cfg)
    v, rows = kraus_operators(cfg, lat)
    assert v.data.shape == (lat.size, lat.size)
    assert 0 < len(rows) <= lat.size
    # a static lossless pass has no radiative Kraus operators
    ident = EomConfig(make_splitter("yb_split"), make_splitter("yb_combine"), ToneConfig(0.0), ToneConfig(0.0))
    _, rows = kraus_operators(ident, default_window(ident))
    assert rows == []


def test_propagation_vacuum_weight():
    cfg = extinction_config()
    lat = default_window(cfg)
    vac, block = channel_by_propagation(carrier_density(lat), cfg)
    assert vac == pytest.approx(0.5, abs=1e-14)
    assert np.trace(block).real == pytest.approx(0.5, abs=1e-14)


def test_extinction_two_photon_blocks():
    cfg = extinction_config()
    lat = default_window(cfg)
    q0 = lat.carrier_index
    out = channel_output(cfg, TwoPortState.fock([(1, q0, 2)]), lat)
    dec = block_decompose(out, 1, 2)
    assert np.allclose(dec.weights, oracles.binomial_weights(2, 0.5), atol=1e-10, rtol=0)
    assert np.allclose(dec.weights, (0.25, 0.5, 0.25), atol=1e-10, rtol=0)
    assert dec.commutator < 1e-12
    s = dec.summary()
    assert s["blocks"]["0"]["dimension"] == 1


@settings(max_examples=15, deadline=None)
@given(configs)
def test_two_photon_blocks_are_binomial(cfg):
    lat = default_window(cfg)
    q0 = lat.carrier_index
    v, _ = vw_operators(cfg, lat)
    p = float(np.linalg.norm(v.data[:, lat.index(q0)]) ** 2)
    out = channel_output(cfg, TwoPortState.fock([(1, q0, 2)]), lat)
    dec = block_decompose(out, 1, 2)
    assert np.allclose(dec.weights, oracles.binomial_weights(2, p), atol=1e-10, rtol=0)
    for ev in dec.eigenvalues.values():
        assert min(ev, default=0.0) > -1e-10


def test_one_photon_blocks():
    cfg = preset("dsb_quadrature", 1.0)
    lat = default_window(cfg)
    out = channel_output(cfg, TwoPortState.single(1, lat.carrier_index), lat)
    dec = block_decompose(out, 1)
    v, _ = vw_operators(cfg, lat)
    p = float(np.linalg.norm(v.data[:, lat.index(lat.carrier_index)]) ** 2)
    assert dec.weights == pytest.approx((1 - p, p), abs=1e-12)


def test_coherence_between_numbers_is_rejected():
    # vacuum plus one photon on port 1 is coherent across photon numbers
    st_ = TwoPortState({((1, 5, 1),): 1.0, (): 1.0}).normalized()
    with pytest.raises(ContractViolation) as exc:
        block_decompose(st_, 1)
    assert exc.value.invariant == "number_commutation"


def test_block_limit():
    with pytest.raises(ValueError):
        block_decompose(TwoPortState.fock([(1, 5, 3)]), 1)


def test_reduced_density_of_product_state():
    st_ = TwoPortState.fock([(1, 5, 1), (2, 7, 1)])
    basis, rho = reduced_density(st_, 1)
    assert basis == [((1, 5, 1),)]
    assert rho[0, 0] == pytest.approx(1.0)
