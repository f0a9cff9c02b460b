import cmath
import math
from fractions import Fraction

import pytest

from slitdisc.geometry import ParamRT
from slitdisc.qcmap import (
    QCParams,
    apply,
    beltrami,
    counterexample_chain,
    feasibility_interval,
    qc_constant,
    transport_params,
)
from slitdisc.wiener import Classification

F = Fraction


def test_alpha_validation():
    with pytest.raises(ValueError):
        QCParams(F(1, 2))
    with pytest.raises(ValueError):
        QCParams(0.5)
    assert QCParams(F(2, 3)).exponent == F(1, 3)
    assert isinstance(QCParams(F(2, 3)).exponent, Fraction)
    assert QCParams(0.75).exponent == pytest.approx(0.5)


def test_apply_is_identity_at_alpha_one():
    one = QCParams(1)
    for z in (0.3 + 0.4j, -0.9j, 0.001 + 0j, -0.5 - 0.5j):
        assert apply(one, z) == z


def test_apply_radial_stretch():
    a = QCParams(F(2, 3))
    assert apply(a, 0j) == 0j
    # moduli move by the power 2 alpha - 1 = 1/3, arguments are untouched
    img = apply(a, 0.25 + 0j)
    assert img.imag == 0.0
    assert img.real == pytest.approx(0.25 ** (1.0 / 3.0), rel=1e-15)
    z = 0.3 * cmath.exp(1.1j)
    w = apply(a, z)
    assert abs(w) == pytest.approx(0.3 ** (1.0 / 3.0), rel=1e-14)
    assert cmath.phase(w) == pytest.approx(1.1, abs=1e-14)


def test_apply_inverse_exponent_round_trip():
    # (2a-1)(2a'-1) = 1: alpha = 2/3 pairs with alpha' = 2
    fwd = QCParams(F(2, 3))
    bwd = QCParams(2)
    for z in (0.25 + 0j, 0.3 + 0.4j, -0.7j):
        assert apply(bwd, apply(fwd, z)) == pytest.approx(z, rel=1e-14)


def test_beltrami_matches_central_differences():
    a = QCParams(F(2, 3))
    z = 0.3 + 0.4j
    h = 1e-6
    fx = (apply(a, z + h) - apply(a, z - h)) / (2.0 * h)
    fy = (apply(a, z + 1j * h) - apply(a, z - 1j * h)) / (2.0 * h)
    num_fz = 0.5 * (fx - 1j * fy)
    num_fzbar = 0.5 * (fx + 1j * fy)
    got = beltrami(a, z)
    assert abs(got.f_z - num_fz) <= 1e-6 * abs(num_fz)
    assert abs(got.f_zbar - num_fzbar) <= 1e-6 * abs(num_fzbar)
    assert abs(got.f_zbar) / abs(got.f_z) == pytest.approx(float(got.ratio), rel=1e-13)


def test_beltrami_ratio_exact_and_origin_rejected():
    got = beltrami(QCParams(F(2, 3)), 0.25 + 0j)
    assert got.ratio == F(1, 2) and isinstance(got.ratio, Fraction)
    assert got.f_z.imag == 0.0 and got.f_z.real > 0.0
    with pytest.raises(ValueError):
        beltrami(QCParams(F(2, 3)), 0j)


def test_qc_constant_values():
    assert qc_constant(QCParams(F(2, 3))) == 3 and isinstance(qc_constant(QCParams(F(2, 3))), Fraction)
    assert qc_constant(QCParams(1)) == 1
    assert qc_constant(QCParams(F(3, 4))) == 2
    assert qc_constant(QCParams(0.6)) == pytest.approx(5.0, rel=1e-12)


def test_transport_params_exact_root():
    src = ParamRT(F(1, 8), F(1, 32))
    img = transport_params(src, QCParams(F(2, 3)))
    assert img.r == F(1, 2) and isinstance(img.r, Fraction)
    assert img.t == F(1, 32)
    assert not img.in_stated_range and img.flags()
    # inverse map sends it back
    back = transport_params(img, QCParams(2))
    assert back.r == F(1, 8)


def test_feasibility_interval():
    assert feasibility_interval(QCParams(F(2, 3)), F(1, 8)) == (F(1, 64), F(1, 16))
    assert feasibility_interval(QCParams(F(4, 5)), F(1, 8)) is None
    # alpha = 3/4 collapses the interval to the single point r^2
    lo, hi = feasibility_interval(QCParams(F(3, 4)), F(1, 8))
    assert lo == hi == F(1, 64)


def test_counterexample_chain_canonical():
    chain = counterexample_chain(QCParams(F(2, 3)))
    assert chain.source == ParamRT(F(1, 8), F(1, 32))
    assert chain.image == ParamRT(F(1, 2), F(1, 32))
    assert chain.source_classification is Classification.EXHAUSTIVE_HENCE_COMPLETE
    assert chain.image_classification is Classification.NOT_COMPLETE
    assert chain.qc_constant == 3
    assert chain.beltrami_ratio == F(1, 2)
    assert chain.t_interval == (F(1, 64), F(1, 16))
    assert chain.succeeds


def test_counterexample_chain_custom_t():
    chain = counterexample_chain(QCParams(F(2, 3)), t=F(1, 20))
    assert chain.succeeds
    with pytest.raises(ValueError, match="outside the feasibility interval"):
        counterexample_chain(QCParams(F(2, 3)), t=F(1, 10))


def test_counterexample_chain_infeasible_alpha():
    with pytest.raises(ValueError, match="empty feasibility"):
        counterexample_chain(QCParams(F(4, 5)))
    with pytest.raises(ValueError, match="empty feasibility"):
        counterexample_chain(QCParams(1))


def test_counterexample_chain_float_alpha():
    chain = counterexample_chain(QCParams(0.6))
    assert chain.succeeds
    assert isinstance(chain.image.r, float)
    assert chain.image.r == pytest.approx(0.125**0.2, rel=1e-15)
    assert chain.qc_constant == pytest.approx(5.0, rel=1e-12)
