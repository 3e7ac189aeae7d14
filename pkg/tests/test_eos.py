import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgdmhd.eos import IdealGas, entropy_gradients, make_eos
from qgdmhd.errors import NonPhysicalStateError, ThermoDomainError

positive = st.floats(min_value=1e-2, max_value=1e2)


def test_ideal_gas_frozen_values():
    # p = rho R theta, eps = c_v theta at rho=1.2, theta=2.0
    eos = IdealGas(R=1.0, c_v=1.5)
    assert eos.pressure(1.2, 2.0) == pytest.approx(2.4, rel=1e-15)
    assert eos.energy(1.2, 2.0) == pytest.approx(3.0, rel=1e-15)
    assert eos.gamma == pytest.approx(5.0 / 3.0, rel=1e-15)


def test_derived_quantities_ideal():
    eos = IdealGas(R=1.0, c_v=1.5)
    th = eos.evaluate(np.array([1.0]), np.array([1.0]))
    # cs2 = gamma R theta and c_p = gamma c_v for an ideal gas
    assert th.cs2[0] == pytest.approx(5.0 / 3.0, rel=1e-14)
    assert th.c_p[0] == pytest.approx(2.5, rel=1e-14)
    assert th.s[0] == pytest.approx(0.0, abs=1e-15)


@given(rho=positive, theta=positive, R=st.floats(0.2, 5.0), c_v=st.floats(0.2, 5.0))
@settings(max_examples=50, deadline=None)
def test_maxwell_relation(rho, theta, R, c_v):
    eos = IdealGas(R=R, c_v=c_v)
    res = eos.maxwell_residual(rho, theta)
    scale = max(1.0, abs(float(eos.pressure(rho, theta))))
    assert abs(float(np.asarray(res).ravel()[0])) <= 1e-13 * scale


@given(rho=positive, theta=positive)
@settings(max_examples=50, deadline=None)
def test_entropy_gradients_match_finite_differences(rho, theta):
    eos = IdealGas(R=1.0, c_v=1.5)
    th = eos.evaluate(rho, theta)
    s_rho, s_theta = entropy_gradients(np.asarray(rho), np.asarray(theta), th)
    d = 1e-6
    fd_rho = (eos.entropy(rho * (1 + d), theta) - eos.entropy(rho * (1 - d), theta)) / (2 * rho * d)
    fd_theta = (eos.entropy(rho, theta * (1 + d)) - eos.entropy(rho, theta * (1 - d))) / (2 * theta * d)
    assert float(s_rho) == pytest.approx(float(fd_rho), rel=1e-6, abs=1e-9)
    assert float(s_theta) == pytest.approx(float(fd_theta), rel=1e-6, abs=1e-9)


@given(rho=positive, theta=positive)
@settings(max_examples=50, deadline=None)
def test_invert_temperature_roundtrip(rho, theta):
    eos = IdealGas(R=1.0, c_v=1.5)
    eps = eos.energy(rho, theta)
    back = eos.invert_temperature(rho, eps)
    assert float(back) == pytest.approx(theta, rel=1e-10)


def test_invert_temperature_vectorized_with_guess():
    eos = IdealGas(R=1.0, c_v=2.5)
    rho = np.array([0.5, 1.0, 3.0])
    theta = np.array([0.3, 2.0, 7.0])
    eps = eos.energy(rho, theta)
    back = eos.invert_temperature(rho, eps, theta_guess=theta * 1.3)
    assert np.allclose(back, theta, rtol=1e-10)


def test_invert_temperature_rejects_energy_below_floor():
    eos = IdealGas(R=1.0, c_v=1.5)
    with pytest.raises(NonPhysicalStateError):
        eos.invert_temperature(1.0, -0.1)


def test_domain_validation():
    eos = IdealGas()
    with pytest.raises(ThermoDomainError):
        eos.evaluate(-1.0, 1.0)
    with pytest.raises(ThermoDomainError):
        eos.evaluate(1.0, 0.0)
    with pytest.raises(ThermoDomainError):
        IdealGas(R=-1.0)
    with pytest.raises(ThermoDomainError):
        IdealGas(c_v=0.0)


def test_registry():
    eos = make_eos("ideal", R=2.0, c_v=3.0)
    assert isinstance(eos, IdealGas)
    assert eos.R == 2.0
    with pytest.raises(ThermoDomainError):
        make_eos("tabulated")
