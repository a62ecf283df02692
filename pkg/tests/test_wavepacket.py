import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eomq.amp_mod import EomConfig, classical_sideband, preset
from eomq.errors import ContractViolation
from eomq.phase_mod import ToneConfig
from eomq.splitters import make_splitter
from eomq.wavepacket import (
    DriveSignal,
    Wavepacket,
    check_grid_rule,
    frequency_convolve,
    g1_correlation,
    gaussian,
    hom_coincidences,
    hom_density_grids,
    modulate_wavepacket,
    phase_modulate_wavepacket,
)

from . import oracles

N = 128
OMEGA = 2 * np.pi * 4 / N  # four bins with dt = 1


def yb(arm1, arm2):
    return EomConfig(make_splitter("yb_split"), make_splitter("yb_combine"), arm1, arm2)


def test_packet_requires_power_of_two():
    with pytest.raises(ValueError):
        Wavepacket(np.ones(100), 0.0, 1.0)
    with pytest.raises(ValueError):
        Wavepacket(np.ones(8), 0.0, 0.0)


def test_gaussian_normalized():
    p = gaussian(N, 0.5, 3.0, chirp=0.1)
    assert p.norm_sq() == pytest.approx(1.0, abs=1e-12)
    assert p.is_normalized()


def test_spectrum_matches_direct_transform():
    p = gaussian(64, 0.7, 3.0, t0=-20.0, chirp=0.05)
    w, spectrum = p.spectrum()
    for k in (0, 3, 60):
        ref = np.sum(p.samples * np.exp(1j * w[k] * p.times)) * p.dt
        assert spectrum[k] == pytest.approx(ref, abs=1e-12)
    back = Wavepacket.from_dft(p.dft(), p.t0, p.dt)
    assert np.allclose(back.samples, p.samples)


def test_io_round_trips():
    p = gaussian(32, 0.25, 1.0, carrier=1e15)
    assert np.array_equal(Wavepacket.from_json(p.to_json()).samples, p.samples)
    q = Wavepacket.from_csv(p.to_csv())
    assert np.array_equal(q.samples, p.samples)
    assert q.t0 == p.t0 and q.dt == pytest.approx(p.dt, rel=1e-15)
    assert p.to_csv().splitlines()[0].startswith("t_s,")


def test_grid_rule():
    p = gaussian(N, 1.0, 5.0)
    assert check_grid_rule(p, OMEGA) == 4
    with pytest.raises(ValueError):
        check_grid_rule(p, OMEGA * 1.01)
    with pytest.raises(ValueError):
        modulate_wavepacket(preset("dsb_quadrature", 1.0), p, OMEGA * 1.01)


def test_drive_must_be_balanced():
    with pytest.raises(ValueError):
        DriveSignal(np.ones(8))
    d = DriveSignal.tone(gaussian(N, 1.0, 5.0), OMEGA, 0.3)
    assert abs(np.mean(d.samples)) < 1e-12


def test_drive_response_filter():
    p = gaussian(N, 1.0, 5.0)
    d = DriveSignal.tone(p, OMEGA)
    half = d.with_response(p.dt, lambda w: 0.5 * np.ones_like(w))
    assert np.allclose(half.samples, 0.5 * d.samples)
    delayed = d.with_response(p.dt, lambda w: np.exp(1j * w * 2.0))
    assert np.allclose(delayed.samples, np.cos(OMEGA * (p.times - 2.0)), atol=1e-12)
    with pytest.raises(ValueError):
        d.with_response(p.dt, lambda w: 1j * np.ones_like(w))


def test_identity_modulator():
    p = gaussian(N, 1.0, 5.0)
    out, rad = modulate_wavepacket(yb(ToneConfig(0.0), ToneConfig(0.0)), p)
    assert np.allclose(out.samples, p.samples)
    assert np.allclose(rad.samples, 0.0)


def test_extinction():
    p = gaussian(N, 1.0, 5.0)
    out, rad = modulate_wavepacket(yb(ToneConfig(0.0), ToneConfig(0.0, 0.0, math.pi)), p)
    assert np.max(np.abs(out.samples)) < 1e-15
    assert rad.norm_sq() == pytest.approx(1.0)


def test_requires_normalized_input():
    p = gaussian(N, 1.0, 5.0)
    with pytest.raises(ValueError):
        modulate_wavepacket(preset("dsb_quadrature", 1.0), p.with_samples(2 * p.samples), OMEGA)


def test_explicit_drives_match_tone():
    p = gaussian(N, 1.0, 5.0)
    cfg = yb(ToneConfig(0.9, 0.4, 0.3), ToneConfig(0.6, -0.2, -0.5))
    d1 = DriveSignal.tone(p, OMEGA, 0.4)
    d2 = DriveSignal.tone(p, OMEGA, -0.2)
    a, _ = modulate_wavepacket(cfg, p, OMEGA)
    b, _ = modulate_wavepacket(cfg, p, drive1=d1, drive2=d2)
    assert np.allclose(a.samples, b.samples, atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(
    st.floats(0, 3), st.floats(-3, 3), st.floats(-3, 3),
    st.floats(0, 3), st.floats(-3, 3), st.floats(-3, 3),
    st.floats(2.0, 12.0), st.floats(-0.05, 0.05), st.integers(1, 8),
)
def test_probability_split_and_time_frequency_agreement(m1, th1, pb1, m2, th2, pb2, width, chirp, bins):
    p = gaussian(N, 1.0, width, chirp=chirp)
    omega = 2 * np.pi * bins / N
    cfg = yb(ToneConfig(m1, th1, pb1), ToneConfig(m2, th2, pb2))
    out, rad = modulate_wavepacket(cfg, p, omega)
    assert out.norm_sq() + rad.norm_sq() == pytest.approx(1.0, abs=1e-10)
    conv = frequency_convolve(cfg, p, omega)
    assert np.max(np.abs(conv.samples - out.samples)) < 1e-8


def test_frequency_convolution_is_sum_of_shifted_spectra():
    p = gaussian(N, 1.0, 6.0, t0=-40.0)
    cfg = preset("ssb_lower_suppressed", 0.8)
    out, _ = modulate_wavepacket(cfg, p, OMEGA)
    w, spec_in = p.spectrum()
    _, spec_out = out.spectrum()
    for k in (0, 4, 8, 124):
        ref = sum(classical_sideband(cfg, 1, 1, s) * spec_in[(k - 4 * s) % N] for s in range(-12, 13))
        assert spec_out[k] == pytest.approx(ref, abs=1e-10)


def test_phase_modulation_trivial_drive():
    p = gaussian(N, 1.0, 5.0)
    out = phase_modulate_wavepacket(np.zeros(N), p, phi_b=0.7)
    assert np.allclose(out.samples, np.exp(0.7j) * p.samples)


def test_phase_step_negates_trailing_edge():
    p = gaussian(N, 1.0, 5.0)
    alpha = np.where(p.times < 0, 0.0, math.pi)
    drive, bias = DriveSignal.from_phase(alpha)
    out = phase_modulate_wavepacket(drive, p, phi_b=bias)
    lead = p.times < 0
    assert np.allclose(out.samples[lead], p.samples[lead], atol=1e-15)
    assert np.allclose(out.samples[~lead], -p.samples[~lead], atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 12), st.floats(-3, 3), st.floats(-3, 3))
def test_phase_modulation_preserves_modulus(m, theta, phi_b):
    p = gaussian(N, 1.0, 5.0)
    out = phase_modulate_wavepacket(ToneConfig(m, theta, phi_b), p, OMEGA)
    mod_in = np.abs(p.samples)
    assert np.all(np.abs(np.abs(out.samples) - mod_in) <= 4e-16 * mod_in)
    assert out.norm_sq() == pytest.approx(p.norm_sq(), abs=1e-14)


def test_phase_modulation_needs_omega_for_tone():
    with pytest.raises(ValueError):
        phase_modulate_wavepacket(ToneConfig(1.0), gaussian(N, 1.0, 5.0))


def test_hom_no_phase_full_coalescence():
    p = gaussian(32, 1.0, 3.0)
    t = p.times
    for t1, t2 in [(t[10], t[12]), (t[16], t[16]), (t[3], t[20])]:
        _, _, cross = hom_coincidences(p, np.zeros(32), t1, t2)
        assert cross == 0.0


def test_hom_step_gives_cross_port_only():
    p = gaussian(32, 1.0, 3.0)
    alpha = np.where(p.times < 0, 0.0, math.pi)
    s1, s2, cross = hom_coincidences(p, alpha, p.times[12], p.times[20])
    assert s1 < 1e-14 and s2 < 1e-14
    assert cross > 0


def test_hom_off_grid_rejected():
    p = gaussian(32, 1.0, 3.0)
    with pytest.raises(ValueError):
        hom_coincidences(p, np.zeros(32), p.times[3] + 0.5, p.times[4])


@pytest.mark.parametrize("kind", ["zero", "step", "random"])
def test_hom_matches_time_bin_oracle(kind):
    p = gaussian(16, 1.0, 2.5)
    alpha = {
        "zero": np.zeros(16),
        "step": np.where(p.times < 0, 0.0, math.pi),
        "random": np.random.default_rng(3).normal(size=16),
    }[kind]
    ref = oracles.hom_timebin_densities(p.samples, alpha, p.dt)
    got = hom_density_grids(p, alpha)
    for a, b in zip(got, ref):
        assert np.max(np.abs(a - b)) < 1e-14


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-4, 4), min_size=32, max_size=32), st.floats(1.5, 6.0))
def test_hom_totals_and_symmetry(alpha, width):
    p = gaussian(32, 1.0, width)
    alpha = np.array(alpha)
    p11, p22, p12 = hom_density_grids(p, alpha)
    total = (p11 + p22 + p12).sum() * p.dt**2
    assert total == pytest.approx(p.norm_sq() ** 2, abs=1e-8)
    assert np.allclose(p11, p11.T) and np.allclose(p12, p12.T)


def test_g1_self_coherence():
    p = gaussian(N, 1.0, 5.0, chirp=0.02)
    cfg = preset("dsb_quadrature", 0.7)
    t = p.times[70]
    assert g1_correlation(cfg, p, (1, 1), t, t, OMEGA) == pytest.approx(1.0)


def test_g1_phase_only_modulation():
    p = gaussian(N, 1.0, 8.0, chirp=0.03)
    tone = ToneConfig(1.3, 0.4, 0.5)
    cfg = yb(tone, tone)
    j, k = 60, 75
    t = p.times
    g = g1_correlation(cfg, p, (1, 1), t[j], t[k], OMEGA)
    x = np.cos(OMEGA * t + 0.4)
    phi = p.samples
    ref = np.exp(1.3j * (x[j] - x[k])) * (np.conj(phi[j]) * phi[k]) / abs(phi[j] * phi[k])
    assert g == pytest.approx(ref, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(20, 100), st.integers(20, 100), st.sampled_from([(1, 1), (1, 2), (2, 2)]))
def test_g1_unit_modulus(j, k, ports):
    p = gaussian(N, 1.0, 20.0)
    cfg = preset("ssb_lower_suppressed", 0.9)
    try:
        g = g1_correlation(cfg, p, ports, p.times[j], p.times[k], OMEGA)
    except ContractViolation:
        return
    assert abs(g) == pytest.approx(1.0, abs=1e-12)


def test_g1_undefined_at_zero_amplitude():
    p = gaussian(N, 1.0, 5.0)
    cfg = yb(ToneConfig(0.0), ToneConfig(0.0))
    with pytest.raises(ContractViolation):
        g1_correlation(cfg, p, (2, 1), p.times[10], p.times[11])
