from fractions import Fraction

import gmpy2
import numpy as np
import pytest
from numpy.testing import assert_allclose

from rkcolloc import _mpf
from rkcolloc.errors import SingularMatrix


def test_workprec_restores_context():
    before = gmpy2.get_context().precision
    with _mpf.workprec(40):
        assert gmpy2.get_context().precision == _mpf.bits_for(40)
    assert gmpy2.get_context().precision == before


def test_frac_matrix_round_trip():
    rows = [[Fraction(1, 3), Fraction(2)], [Fraction(-7, 5), Fraction(0)]]
    obj = _mpf.frac_matrix_to_obj(rows, 30)
    assert_allclose(_mpf.to_float(obj), [[1 / 3, 2.0], [-1.4, 0.0]], rtol=1e-15)


def test_polyval2d_obj_matches_numpy():
    rng = np.random.default_rng(4)
    c = rng.standard_normal((5, 5))
    x, y = rng.random(20), rng.random(20)
    co = _mpf.to_obj(c, 40)
    with _mpf.workprec(40):
        got = _mpf.polyval2d_obj(_mpf.to_obj(x, 40), _mpf.to_obj(y, 40), co)
    ref = np.polynomial.polynomial.polyval2d(x, y, c)
    assert_allclose(_mpf.to_float(got), ref, rtol=1e-13)


def test_solve_obj_matches_numpy():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((8, 8)) + 8 * np.eye(8)
    b = rng.standard_normal(8)
    x = _mpf.solve_obj(_mpf.to_obj(a, 40), _mpf.to_obj(b, 40), 40)
    assert_allclose(_mpf.to_float(x), np.linalg.solve(a, b), rtol=1e-12)


def test_solve_obj_matrix_rhs_and_inverse():
    rng = np.random.default_rng(6)
    a = rng.standard_normal((5, 5)) + 5 * np.eye(5)
    inv = _mpf.inv_obj(_mpf.to_obj(a, 40), 40)
    assert_allclose(_mpf.to_float(inv), np.linalg.inv(a), rtol=1e-12)


def test_solve_obj_singular():
    a = _mpf.to_obj(np.array([[1.0, 2.0], [2.0, 4.0]]), 30)
    with pytest.raises(SingularMatrix):
        _mpf.solve_obj(a, _mpf.to_obj(np.ones(2), 30), 30)


def test_number_to_obj_fraction_exact():
    v = _mpf.number_to_obj(Fraction(1, 3), 50)
    with _mpf.workprec(50):
        err = abs(v * 3 - 1)
    assert float(err) < 1e-49
