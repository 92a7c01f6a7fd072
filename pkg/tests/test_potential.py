import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hillgreen import Potential, load_builtin
from hillgreen.potential import BUILTIN_NAMES, ConstPiece, CosPiece, PolyPiece, TablePiece


def test_constant_eval():
    p = Potential.constant(2.5, 3.0)
    ts = np.linspace(0.0, 3.0, 17)
    assert np.all(p.eval(ts) == 2.5)
    assert p.eval(0.0) == 2.5
    assert p.domain_length == 3.0


def test_piecewise_constant_right_limit_convention():
    p = Potential.piecewise_constant([0.0, 1.0, 2.0], [0.0, 0.1])
    assert p.eval(0.5) == 0.0
    # at the jump the right-hand piece wins
    assert p.eval(1.0) == 0.1
    assert p.eval(1.5) == 0.1
    assert p.eval(2.0) == 0.1


def test_eval_rejects_outside_domain():
    p = Potential.constant(0.0, 1.0)
    with pytest.raises(ValueError):
        p.eval(-0.5)
    with pytest.raises(ValueError):
        p.eval(1.5)


def test_shifted_adds_constant():
    p = Potential.cosine(math.pi)
    q = p.shifted(0.75)
    ts = np.linspace(0.0, math.pi, 33)
    assert np.allclose(q.eval(ts), p.eval(ts) + 0.75, rtol=0, atol=1e-15)
    # shifts accumulate
    r = q.shifted(-0.75)
    assert np.allclose(r.eval(ts), p.eval(ts), rtol=0, atol=1e-15)


def test_even_extension_values():
    p = Potential.cosine(math.pi, c0=0.3, c1=1.0, omega=2.0)
    e = p.even_extension()
    assert e.domain_length == pytest.approx(2.0 * math.pi)
    ts = np.linspace(0.0, math.pi, 40, endpoint=False) + 1e-3
    assert np.allclose(e.eval(ts), p.eval(ts), atol=1e-14)
    assert np.allclose(e.eval(2.0 * math.pi - ts), p.eval(ts), atol=1e-13)
    assert e.is_even_about_midpoint()


def test_even_extension_of_step_is_symmetric():
    p = Potential.piecewise_constant([0.0, 1.0, 2.0], [0.0, 0.1])
    e = p.even_extension()
    # symmetric in the L1 sense even though jump points take right limits
    assert e.is_even_about_midpoint()
    assert e.eval(0.5) == 0.0
    assert e.eval(3.7) == 0.0
    assert e.eval(1.5) == 0.1
    assert e.eval(2.5) == 0.1


def test_double_even_extension():
    p = Potential.cosine(math.pi, omega=2.0)
    ee = p.even_extension().even_extension()
    assert ee.domain_length == pytest.approx(4.0 * math.pi)
    ts = np.linspace(0.0, math.pi, 25, endpoint=False) + 1e-3
    assert np.allclose(ee.eval(ts), p.eval(ts), atol=1e-13)
    assert np.allclose(ee.eval(2.0 * math.pi + ts), p.eval(ts), atol=1e-13)
    assert ee.is_even_about_midpoint()


def test_reflect_reverses_time():
    p = Potential.cosine(2.0, c0=0.1, c1=0.9, omega=1.3, phi=0.4)
    r = p.reflect()
    ts = np.linspace(0.0, 2.0, 41)
    assert np.allclose(r.eval(ts), p.eval(2.0 - ts), atol=1e-14)
    rr = r.reflect()
    assert np.allclose(rr.eval(ts), p.eval(ts), atol=1e-14)


def test_reflect_step():
    p = Potential.piecewise_constant([0.0, 1.0, 3.0], [2.0, -1.0])
    r = p.reflect()
    assert r.eval(0.5) == -1.0
    assert r.eval(2.5) == 2.0
    # interior breakpoint moves from 1 to 2
    interior = [b for b in r.breakpoints if 0.0 < b < 3.0]
    assert np.allclose(interior, [2.0])


def test_restrict():
    p = Potential.piecewise_constant([0.0, 1.0, 2.0], [0.0, 0.1])
    h = p.restrict(1.0)
    assert h.domain_length == 1.0
    assert np.all(h.eval(np.linspace(0, 1, 9)) == 0.0)
    mid = p.restrict(1.5)
    assert mid.eval(1.2) == 0.1
    with pytest.raises(ValueError):
        p.restrict(2.5)
    with pytest.raises(ValueError):
        p.restrict(0.0)


def test_descriptor_round_trip():
    for name in BUILTIN_NAMES:
        p = load_builtin(name)
        q = Potential.from_descriptor(p.descriptor())
        ts = np.linspace(0.0, p.domain_length, 101, endpoint=False) + 1e-4
        assert np.allclose(q.eval(ts), p.eval(ts), atol=1e-14)
        assert q.descriptor_hash() == p.descriptor_hash()


def test_json_round_trip_after_extension():
    p = load_builtin("ex2").even_extension()
    q = Potential.from_json(p.to_json())
    ts = np.linspace(0.0, p.domain_length, 101, endpoint=False) + 1e-4
    assert np.allclose(q.eval(ts), p.eval(ts), atol=1e-14)


def test_table_piece_round_trip():
    xs = (0.0, 0.5, 1.0, 1.5, 2.0)
    ys = (0.0, 0.2, -0.1, 0.3, 0.0)
    p = Potential(((0.0, 2.0, TablePiece(xs, ys)),), 2.0)
    q = Potential.from_descriptor(p.descriptor())
    ts = np.linspace(0.0, 2.0, 51)
    assert np.allclose(q.eval(ts), p.eval(ts), atol=1e-14)


def test_poly_piece_values():
    p = Potential(((0.0, 1.0, PolyPiece((1.0, -2.0, 3.0))),), 1.0)
    ts = np.linspace(0.0, 1.0, 11)
    assert np.allclose(p.eval(ts), 1.0 - 2.0 * ts + 3.0 * ts**2, atol=1e-14)


def test_invalid_descriptors():
    with pytest.raises(ValueError):
        Potential.from_descriptor({"T": 1.0, "pieces": [{"from": 0, "to": 1, "kind": "nope"}]})
    with pytest.raises(ValueError):
        Potential.from_descriptor(
            {"T": 1.0, "pieces": [{"from": 0, "to": 1, "kind": "poly", "coeffs": [1, 2, 3, 4, 5]}]})
    with pytest.raises(ValueError):
        Potential(((0.5, 1.0, ConstPiece(0.0)),), 1.0)  # does not start at 0
    with pytest.raises(ValueError):
        Potential(((0.0, 0.4, ConstPiece(0.0)), (0.5, 1.0, ConstPiece(1.0))), 1.0)  # gap


def test_builtin_names_load():
    for name in BUILTIN_NAMES:
        p = load_builtin(name)
        assert p.domain_length > 0
    with pytest.raises(ValueError):
        load_builtin("ex99")


def test_asymmetric_potential_detected():
    assert not load_builtin("ex3").is_even_about_midpoint()
    assert load_builtin("ex3").even_extension().is_even_about_midpoint()


def test_sample_bound_brackets_values():
    p = load_builtin("ex4")
    lo, hi = p.sample_bound()
    ts = np.linspace(0.0, p.domain_length, 257)
    vals = p.eval(ts)
    assert lo <= vals.min() + 1e-12
    assert hi >= vals.max() - 1e-12


# -- property tests ----------------------------------------------------

finite = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False)


@st.composite
def step_potentials(draw):
    k = draw(st.integers(min_value=1, max_value=4))
    widths = draw(st.lists(st.floats(min_value=0.1, max_value=1.5),
                           min_size=k, max_size=k))
    vals = draw(st.lists(finite, min_size=k, max_size=k))
    breaks = [0.0]
    for w in widths:
        breaks.append(breaks[-1] + w)
    return Potential.piecewise_constant(breaks, vals)


@settings(max_examples=25, deadline=None)
@given(step_potentials())
def test_even_extension_is_symmetric(p):
    assert p.even_extension().is_even_about_midpoint()


@settings(max_examples=25, deadline=None)
@given(step_potentials(), finite)
def test_shift_commutes_with_extension(p, d):
    a = p.shifted(d).even_extension()
    b = p.even_extension().shifted(d)
    ts = np.linspace(0.0, a.domain_length, 29, endpoint=False) + 1e-4
    assert np.allclose(a.eval(ts), b.eval(ts), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(step_potentials())
def test_descriptor_round_trip_property(p):
    q = Potential.from_json(p.to_json())
    ts = np.linspace(0.0, p.domain_length, 37, endpoint=False) + 1e-4
    assert np.allclose(q.eval(ts), p.eval(ts), atol=1e-14)


@settings(max_examples=20, deadline=None)
@given(step_potentials())
def test_restrict_of_extension_recovers(p):
    back = p.even_extension().restrict(p.domain_length)
    ts = np.linspace(0.0, p.domain_length, 23, endpoint=False) + 1e-4
    assert np.allclose(back.eval(ts), p.eval(ts), atol=1e-14)
