import numpy as np
import pytest

from eomq import _backend, _kernels_py
from eomq.mode_space import ModeLattice
from eomq.numerics import bessel_j_sequence
from eomq.phase_mod import ToneConfig, exact_matrix


def test_pure_python_always_available():
    assert "python" in _backend.BACKENDS


def test_unknown_backend():
    with pytest.raises(ValueError):
        _backend.use("fortran")


@pytest.mark.skipif("cython" not in _backend.BACKENDS, reason="extension not built")
@pytest.mark.parametrize("x", [0.1, 0.3, 1.0, 5.0, 12.0, 40.0])
def test_backends_agree_on_bessel(x):
    c = _backend.BACKENDS["cython"].bessel_j_sequence(60, x)
    p = _kernels_py.bessel_j_sequence(60, x)
    np.testing.assert_allclose(c, p, rtol=1e-15, atol=1e-300)


@pytest.mark.skipif("cython" not in _backend.BACKENDS, reason="extension not built")
@pytest.mark.parametrize("step", [1, 2, 3])
def test_backends_agree_on_matrix(step):
    jv = np.ascontiguousarray(bessel_j_sequence(80, 2.3))
    c = _backend.BACKENDS["cython"].pm_matrix(jv, 3, 40, 0.7, -0.2, step)
    p = _kernels_py.pm_matrix(jv, 3, 40, 0.7, -0.2, step)
    np.testing.assert_allclose(c, p, rtol=0, atol=1e-15)


def test_matrix_independent_of_backend(backend):
    lat = ModeLattice.from_window(1, 50, 20)
    mat = exact_matrix(ToneConfig(1.5, 0.2, 0.1), lat)
    cols = [lat.index(q) for q in mat.interior_modes()]
    gram = mat.data[:, cols].conj().T @ mat.data[:, cols]
    assert np.max(np.abs(gram - np.eye(len(cols)))) < 1e-12
