import math

import numpy as np
import pytest

from spteleport.errors import DimensionLimitError, LayoutError
from spteleport.fock import Atom, BellKind, FockMode, HilbertLayout, make_bell, make_coherent, tensor
from spteleport.oracle import (
    OperatorMatrix,
    annihilation,
    build_jc_hamiltonian,
    build_kerr_hamiltonian,
    evolve_exact,
    excitation_number,
    expectation,
)

from conftest import ket, random_state


def test_annihilation_ladder():
    a = annihilation(5)
    for n in range(1, 5):
        assert a[n - 1, n] == pytest.approx(math.sqrt(n))


def test_jc_matrix_elements():
    layout = HilbertLayout([Atom(), FockMode(9)])
    h = build_jc_hamiltonian(layout, 0, 1, 0.7)
    assert h.element((1, 0), (0, 1)) == pytest.approx(0.7)
    for n in range(1, 9):
        # sqrt(n) from n!/(n-1)!
        expected = 0.7 * math.sqrt(math.factorial(n) / math.factorial(n - 1))
        assert h.element((1, n - 1), (0, n)) == pytest.approx(expected)
    assert h.hermiticity_error == 0


def test_jc_matrix_order_independent():
    h1 = build_jc_hamiltonian(HilbertLayout([FockMode(4), Atom()]), 1, 0, 1.0)
    assert h1.element((0, 1), (1, 0)) == pytest.approx(1.0)


def test_jc_type_mismatch():
    with pytest.raises(LayoutError):
        build_jc_hamiltonian(HilbertLayout([FockMode(3), FockMode(3)]), 0, 1, 1.0)


def test_kerr_matrix():
    layout = HilbertLayout([FockMode(2), FockMode(2), FockMode(4)])
    h = build_kerr_hamiltonian(layout, 0, 1, 2, 0.3)
    for nc in range(4):
        assert h.element((1, 0, nc), (1, 0, nc)) == pytest.approx(0.3 * nc)
        assert h.element((1, 1, nc), (1, 1, nc)) == pytest.approx(0.6 * nc)
    off = h.entries - np.diag(np.diag(h.entries))
    assert np.all(off == 0)


def test_evolve_identity_at_zero(rng):
    layout = HilbertLayout([Atom(), FockMode(6)])
    s = random_state(layout, rng)
    out = evolve_exact(build_jc_hamiltonian(layout, 0, 1, 1.0), 0.0, s)
    assert np.allclose(out.amplitudes, s.amplitudes, atol=1e-14)


def test_evolve_single_photon_swap():
    layout = HilbertLayout([Atom(), FockMode(4)])
    out = evolve_exact(build_jc_hamiltonian(layout, 0, 1, 2.0), math.pi / 4, ket(layout, 0, 1))
    assert abs(out.amplitude("e", 0) - (-1j)) < 1e-10
    assert abs(out.norm_sq - 1) < 1e-10


def test_evolve_kerr_flips_probe():
    probe, _ = make_coherent(5.0)
    s = tensor(make_bell(BellKind.PSI_PLUS), probe)
    out = evolve_exact(build_kerr_hamiltonian(s.layout, 0, 1, 2, 1.0), math.pi, s)
    minus, _ = make_coherent(-5.0)
    t = out.tensor()
    probe_part = t[0, 1] / np.linalg.norm(t[0, 1])
    assert abs(np.vdot(minus.amplitudes, probe_part)) ** 2 >= 1 - 1e-8


def test_excitation_number_conserved(rng):
    layout = HilbertLayout([Atom(), FockMode(8)])
    h = build_jc_hamiltonian(layout, 0, 1, 1.3)
    n_op = excitation_number(layout, 0, 1)
    s = random_state(layout, rng)
    before = expectation(n_op, s)
    for t in (0.1, 1.0, 7.3):
        assert abs(expectation(n_op, evolve_exact(h, t, s)) - before) < 1e-10


def test_non_hermitian_rejected(rng):
    layout = HilbertLayout([FockMode(3)])
    h = OperatorMatrix(layout, annihilation(3))
    with pytest.raises(ValueError):
        evolve_exact(h, 1.0, random_state(layout, rng))


def test_oracle_dimension_cap():
    with pytest.raises(DimensionLimitError):
        build_jc_hamiltonian(HilbertLayout([Atom(), FockMode(3000)]), 0, 1, 1.0)
