import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chebpert.cheb_core import cheb_nodes
from chebpert.errors import InvalidArgumentError, NumericDomainError
from chebpert.weights import (
    KINDS,
    WeightSpec,
    const_weight,
    epsilon_n,
    exp_weight,
    get_kind,
    holder_weight,
    modulus_of_continuity,
    parse_weight,
    recip_poly_weight,
    v_abs,
)
from oracles import omega_bruteforce

BUILTINS = [
    "const:c=1",
    "const:c=2.5",
    "exp:alpha=1",
    "exp:alpha=-0.7",
    "recip-poly:c=1,0,0.5",
    "recip-poly:c=3,1,-0.5,0.2",
    "holder:c=2,beta=0.5,x0=0,m=3",
    "holder:c=1,beta=0.25,x0=0.3,m=4",
]


# --- kinds -------------------------------------------------------------------


def test_v_abs_examples():
    assert v_abs(1, 0.37) == 1
    assert v_abs(2, 0.0) == 1
    assert v_abs(3, -1.0) == 0


def test_kind_table():
    assert [KINDS[i].k for i in (1, 2, 3, 4)] == [0, 2, 1, 1]
    assert [KINDS[i].s_inf for i in (1, 2, 3, 4)] == [1, 2, math.sqrt(2), math.sqrt(2)]


def test_endpoint_zeros_are_exact():
    assert v_abs(2, 1.0) == 0 and v_abs(2, -1.0) == 0
    assert v_abs(4, 1.0) == 0 and v_abs(3, -1.0) == 0
    x = cheb_nodes(101)
    for i in (1, 2, 3, 4):
        assert np.all(v_abs(i, x) > 0)


def test_signed_v_matches_polynomials():
    x = np.linspace(-1, 1, 11)
    np.testing.assert_allclose(KINDS[2].v(x), x**2 - 1, atol=1e-15)
    np.testing.assert_allclose(KINDS[3].v(x), x + 1, atol=1e-15)
    np.testing.assert_allclose(KINDS[4].v(x), x - 1, atol=1e-15)


@pytest.mark.parametrize("bad", [0, 5, "x"])
def test_get_kind_rejects(bad):
    with pytest.raises(InvalidArgumentError):
        get_kind(bad)


# --- WeightSpec --------------------------------------------------------------


def test_positivity_enforced():
    with pytest.raises(InvalidArgumentError, match="strictly positive"):
        WeightSpec(rho=lambda x: x + 0.5, m=3)


def test_nonfinite_rho_rejected():
    with pytest.raises(NumericDomainError), np.errstate(divide="ignore"):
        WeightSpec(rho=lambda x: 1 / (x - cheb_nodes(4097)[100]), m=3)


@pytest.mark.parametrize("m", [2, 0, 3.5])
def test_m_at_least_three(m):
    with pytest.raises(InvalidArgumentError):
        WeightSpec(rho=lambda x: 1 + 0 * x, m=m)


def test_wrong_m_derivative_rejected():
    with pytest.raises(InvalidArgumentError, match="disagrees"):
        WeightSpec(rho=lambda x: np.exp(x), m=3, inv_rho_m_deriv=lambda x: np.exp(-x))


def test_correct_m_derivative_accepted():
    w = WeightSpec(rho=lambda x: np.exp(x), m=3, inv_rho_m_deriv=lambda x: -np.exp(-x))
    assert not w.m_deriv_is_fd


def test_user_density_gets_fd_derivative():
    # (1/rho)''' for rho = 2 + sin(3x), worked out by hand from the quotient rule
    w = WeightSpec(rho=lambda x: 2 + np.sin(3 * x), m=3)
    assert w.m_deriv_is_fd

    def exact(x):
        s, c = np.sin(3 * x), np.cos(3 * x)
        r = 2 + s
        r1, r2, r3 = 3 * c, -9 * s, -27 * c
        return -r3 / r**2 + 6 * r1 * r2 / r**3 - 6 * r1**3 / r**4

    x = np.linspace(-0.9, 0.9, 37)
    np.testing.assert_allclose(w.inv_rho_m_deriv(x), exact(x), rtol=1e-4, atol=1e-4)


@pytest.mark.parametrize("text", BUILTINS)
def test_rho_times_inverse_is_one(text):
    w = parse_weight(text)
    x = np.concatenate([cheb_nodes(257), [-1.0, 1.0]])
    np.testing.assert_allclose(w.rho(x) * w.inv_rho(x), 1.0, atol=1e-14)
    np.testing.assert_allclose(np.exp(w.log_rho(x)), w.rho(x), rtol=1e-14)


@pytest.mark.parametrize("text", [t for t in BUILTINS if not t.startswith("const")])
def test_builtin_m_derivative_matches_fd(text):
    w = parse_weight(text)
    fd = WeightSpec(rho=w.rho, m=w.m)  # forced finite-difference path
    x = np.linspace(-0.8, 0.8, 33) + 0.013
    ref = w.inv_rho_m_deriv(x)
    np.testing.assert_allclose(fd.inv_rho_m_deriv(x), ref, rtol=1e-3, atol=1e-3 * np.max(np.abs(ref)))


# --- DSL ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "text,label",
    [
        ("const:c=1", "const:c=1.0"),
        ("exp:alpha=2", "exp:alpha=2.0"),
        ("exp:alpha=2,m=5", "exp:alpha=2.0,m=5"),
        ("recip-poly:c=1,0,0.5", "recip-poly:c=1.0,0.0,0.5"),
        ("holder: c=2, beta=0.5, x0=0, m=3", "holder:c=2.0,beta=0.5,x0=0.0,m=3"),
    ],
)
def test_parse_labels(text, label):
    assert parse_weight(text).label == label


@pytest.mark.parametrize("text", BUILTINS)
def test_label_round_trip(text):
    w = parse_weight(text)
    w2 = parse_weight(w.label)
    assert w2.label == w.label
    x = np.linspace(-1, 1, 9)
    np.testing.assert_array_equal(w.rho(x), w2.rho(x))


@pytest.mark.parametrize(
    "text",
    [
        "",
        "gauss:s=1",
        "exp",
        "exp:beta=1",
        "exp:alpha=x",
        "const:c=1,2",
        "holder:c=2,beta=0.5,x0=0",  # m is mandatory for this family
        "holder:c=2,beta=1.5,x0=0,m=3",
        "recip-poly:c=1,0,-2",  # p vanishes inside [-1, 1]
        "const:c=-1",
        "exp:alpha=1,alpha=2",
    ],
)
def test_parse_rejects(text):
    with pytest.raises(InvalidArgumentError):
        parse_weight(text)


def test_recip_poly_reproduces_polynomial():
    w = recip_poly_weight([1, 0, 0.5])
    x = np.linspace(-1, 1, 5)
    np.testing.assert_allclose(w.inv_rho(x), 1 + 0.5 * x**2)


# --- modulus of continuity ---------------------------------------------------


def test_omega_identity():
    G = 8192
    assert abs(modulus_of_continuity(lambda x: x, 0.1, G) - 0.1) <= 4 / G


def test_omega_constant():
    assert modulus_of_continuity(lambda x: 3.0 + 0 * x, 0.5) == 0.0


def test_omega_sqrt_abs():
    # odd grid size puts a node on the cusp at 0
    f = lambda x: np.sqrt(np.abs(x))
    got = modulus_of_continuity(f, 0.01, 8193)
    assert got == pytest.approx(0.1, rel=0.02)
    assert got == pytest.approx(omega_bruteforce(f, 0.01, 8193), abs=1e-15)


@pytest.mark.parametrize("h", [0.0, -1.0, 2.5])
def test_omega_bad_h(h):
    with pytest.raises(InvalidArgumentError):
        modulus_of_continuity(np.sin, h)


def test_omega_small_grid_rejected():
    with pytest.raises(InvalidArgumentError):
        modulus_of_continuity(np.sin, 0.1, G=512)


def test_omega_nonfinite():
    with pytest.raises(NumericDomainError), np.errstate(divide="ignore"):
        modulus_of_continuity(lambda x: 1 / x, 0.1, G=1025)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 0.9), st.floats(0.3, 4.0), st.floats(-0.9, 0.9))
def test_omega_matches_bruteforce_and_is_monotone(h, a, x0):
    f = lambda x: np.abs(x - x0) ** 0.7 + np.sin(a * x)
    G = 1024
    w1 = modulus_of_continuity(f, h, G)
    assert w1 == pytest.approx(omega_bruteforce(f, h, G), abs=1e-14)
    assert modulus_of_continuity(f, min(2.0, 1.5 * h), G) >= w1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 400), st.floats(0.3, 4.0), st.floats(-0.9, 0.9))
def test_omega_subadditive_for_grid_steps(K, a, x0):
    # for h a whole number of grid steps, pairs 2h apart split through a node
    f = lambda x: np.abs(x - x0) ** 0.7 + np.sin(a * x)
    G = 1024
    h = K * 2.0 / (G - 1)
    assert modulus_of_continuity(f, 2 * h, G) <= 2 * modulus_of_continuity(f, h, G) + 1e-14


# --- eps_n -------------------------------------------------------------------


def test_eps_exp_example():
    # omega(e^{-x}; h) = e (1 - e^{-h}) exactly; the 8192-grid estimate sits
    # slightly below because 1/n is not a multiple of the grid spacing
    predicted = math.log(100) / 100**3 * math.e * (1 - math.exp(-0.01))
    got = epsilon_n(exp_weight(1.0), 100)
    assert got == pytest.approx(1.246e-7, rel=0.03)
    assert predicted * 0.97 <= got <= predicted


def test_eps_constant_is_zero():
    w = const_weight(1.0)
    assert all(epsilon_n(w, n) == 0 for n in (2, 10, 1000))


def test_eps_holder_ratio():
    w = holder_weight(2, 0.5, 0, 3)
    assert epsilon_n(w, 64) > 0
    ratio = epsilon_n(w, 128) / epsilon_n(w, 64)
    predicted = 2**-3.5 * math.log(128) / math.log(64)
    assert ratio == pytest.approx(predicted, rel=0.1)


def test_eps_zero_when_inverse_is_low_degree_polynomial():
    # 1/rho of degree <= m has a constant m-th derivative
    assert epsilon_n(parse_weight("recip-poly:c=3,1,-0.5,0.2"), 50) == 0


@pytest.mark.parametrize(
    "text",
    ["exp:alpha=1", "exp:alpha=-0.7", "recip-poly:c=3,1,-0.5,0.2,0.1"]
    + [t for t in BUILTINS if t.startswith("holder")],
)
def test_eps_strictly_decreasing(text):
    w = parse_weight(text)
    ns = [8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096]
    e = [epsilon_n(w, n) for n in ns]
    assert all(b < a for a, b in zip(e, e[1:]))


@pytest.mark.parametrize("n", [1, 0, 2.5])
def test_eps_bad_n(n):
    with pytest.raises(InvalidArgumentError):
        epsilon_n(exp_weight(), n)


def test_fd_spacing_keeps_noise_budget():
    from chebpert.weights import fd_spacing

    assert fd_spacing(3) == 2.0**-13
    for m in (3, 4, 5, 6):
        h = fd_spacing(m)
        assert np.finfo(float).eps / h**m <= 2**m * 1e-4
