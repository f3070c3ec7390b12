import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fastslow.analysis import ode_oracle
from fastslow.errors import BadSolverConfig, CFLViolation, NonFiniteState
from fastslow.initial_data import FieldTriple, Grid1D, gaussian, sample_initial_triple
from fastslow.solver import (
    Boundary,
    SolverConfig,
    relaxation_substep,
    solve_full,
    stable_dt,
    strang_step,
    transport_substep,
)

from conftest import make_params


def uniform(n, u, v, w, t=0.0):
    return FieldTriple(np.full(n, u), np.full(n, v), np.full(n, w), t)


def decoupled(**kw):
    base = dict(c1=0.0, c2=0.0, a3=0.0, b3=0.0, c3=0.0)
    base.update(kw)
    return make_params(**base)


def test_stable_dt_examples():
    assert stable_dt(make_params(k1=1, k2=2, k3=0.5), 0.01, 0.5) == pytest.approx(0.0025)
    assert stable_dt(make_params(k1=0, k2=0, k3=0), 0.1, 1.0) == pytest.approx(0.1)
    assert stable_dt(make_params(k1=1, k2=4, k3=-1), Grid1D(0, 1, 1024), 0.9) == pytest.approx(0.9 / (4 * 1024))


def test_relaxation_exact_two_mode_solution():
    vp = decoupled(a=1, b=1, epsilon=0.1)
    out = relaxation_substep(uniform(3, 1.0, 0.0, 0.0), vp, vp.epsilon**2)
    # q' = -2 q / eps^2 with s fixed
    np.testing.assert_allclose(out.u, (1 + math.exp(-2)) / 2, rtol=1e-14)
    np.testing.assert_allclose(out.v, (1 - math.exp(-2)) / 2, rtol=1e-14)


def test_relaxation_keeps_slow_manifold():
    vp = decoupled(a=1.5, b=0.5)
    u = np.linspace(-1, 1, 7)
    state = FieldTriple(u, (vp.a / vp.b) * u, np.ones(7))
    out = relaxation_substep(state, vp, 0.3)
    np.testing.assert_allclose(out.u, state.u, rtol=0, atol=1e-15)
    np.testing.assert_allclose(out.v, state.v, rtol=0, atol=1e-15)


def test_relaxation_tiny_dt_is_identity():
    vp = make_params()
    state = FieldTriple(np.array([0.3, -1.0]), np.array([2.0, 0.5]), np.array([1.0, 4.0]))
    out = relaxation_substep(state, vp, 1e-300)
    np.testing.assert_allclose(out.u, state.u, rtol=1e-15)
    np.testing.assert_allclose(out.v, state.v, rtol=1e-15)
    np.testing.assert_array_equal(out.w, state.w)


@settings(max_examples=200, deadline=None)
@given(
    u=st.floats(-10, 10), v=st.floats(-10, 10), w=st.floats(-10, 10),
    dt=st.floats(1e-8, 1e4), a=st.floats(0.1, 10), b=st.floats(0.1, 10),
)
def test_relaxation_never_amplifies_fast_mode(u, v, w, dt, a, b):
    vp = make_params(a=a, b=b)
    eps2 = vp.epsilon**2
    q0 = a * u - b * v
    q_inf = eps2 * (a * vp.c1 - b * vp.c2) * w / (a + b)
    out = relaxation_substep(uniform(1, u, v, w), vp, dt)
    q1 = a * out.u[0] - b * out.v[0]
    assert abs(q1) <= abs(q_inf) + abs(q0 - q_inf) + 1e-12 * (1 + abs(q0))


def test_transport_keeps_constants():
    vp = decoupled(k1=1.3, k2=-0.7, k3=0.4)
    g = Grid1D(0, 1, 16)
    state = uniform(16, 2.0, -1.0, 0.5)
    for bc in Boundary:
        out = transport_substep(state, vp, stable_dt(vp, g, 1.0), g, bc)
        np.testing.assert_allclose(out.u, 2.0, rtol=1e-15)
        np.testing.assert_allclose(out.v, -1.0, rtol=1e-15)
        np.testing.assert_allclose(out.w, 0.5, rtol=1e-15)


def test_transport_unit_courant_shift():
    vp = decoupled(k1=1.0, k2=1.0, k3=1.0)
    g = Grid1D(0, 4, 4)
    state = FieldTriple(np.array([1.0, 1, 0, 0]), np.zeros(4), np.zeros(4))
    out = transport_substep(state, vp, g.dx / vp.k1, g, "periodic")
    np.testing.assert_array_equal(out.u, [0.0, 1, 1, 0])


def test_transport_midpoint_source():
    vp = decoupled(c3=1.0, k1=0, k2=0, k3=0)
    g = Grid1D(0, 1, 5)
    out = transport_substep(uniform(5, 0, 0, 1.0), vp, 0.1, g)
    # two-stage explicit for w' = w: 1 + dt + dt^2/2
    np.testing.assert_allclose(out.w, 1.105, rtol=1e-14)


def test_transport_cfl_violation():
    vp = make_params(k1=1, k2=2, k3=0.5)
    g = Grid1D(0, 1, 10)
    with pytest.raises(CFLViolation):
        transport_substep(uniform(10, 1, 1, 1), vp, 1.01 * stable_dt(vp, g, 1.0), g)


def test_solve_full_initial_only():
    vp = make_params()
    g = Grid1D(-12, 12, 256)
    ic = sample_initial_triple(gaussian(1, 0, 1), gaussian(1, 0, 1), gaussian(1, 0, 1), g, 0.1)
    trace = solve_full(vp, g, ic, SolverConfig(output_times=(0.0,)))
    assert len(trace.snapshots) == 1
    np.testing.assert_array_equal(trace.snapshots[0].u, ic.u)
    assert trace.steps == 0


def test_solve_full_uniform_relaxation_matches_oracle():
    vp = decoupled(a=1, b=1, epsilon=0.1)
    g = Grid1D(0, 1, 8)
    t = vp.epsilon**2
    trace = solve_full(vp, g, uniform(8, 1, 0, 0), SolverConfig(output_times=(t,), boundary="periodic"))
    u_exact, v_exact, _ = ode_oracle(vp, (1, 0, 0), t)
    assert u_exact == pytest.approx((1 + math.exp(-2)) / 2, rel=1e-12)
    np.testing.assert_allclose(trace.snapshots[-1].u, u_exact, rtol=1e-12)
    np.testing.assert_allclose(trace.snapshots[-1].v, v_exact, rtol=1e-12)


def test_solve_full_self_convergence_first_order(smooth_ic):
    vp = make_params()
    diffs = []
    fields = []
    for n in (512, 1024, 2048):
        g = Grid1D(-12, 12, n)
        x0 = sample_initial_triple(smooth_ic.u, smooth_ic.v, smooth_ic.w, g, vp.epsilon)
        fields.append(solve_full(vp, g, x0, SolverConfig(output_times=(1.0,))).snapshots[-1].u)
    for coarse, fine in zip(fields, fields[1:]):
        diffs.append(np.max(np.abs(coarse - 0.5 * (fine[0::2] + fine[1::2]))))
    assert diffs[0] / diffs[1] == pytest.approx(2.0, rel=0.3)


def test_fused_kernel_matches_substeps(smooth_ic, rng):
    vp = make_params(k2=-2.0)
    g = Grid1D(-12, 12, 300)
    x0 = sample_initial_triple(smooth_ic.u, smooth_ic.v, smooth_ic.w, g, vp.epsilon)
    x0.v += 0.1 * rng.standard_normal(300) * x0.u
    for bc in Boundary:
        dt = stable_dt(vp, g, 0.8)
        ref = x0.copy()
        for _ in range(25):
            ref = strang_step(ref, vp, dt, g, bc)
        out = solve_full(vp, g, x0, SolverConfig(cfl=0.8, output_times=(25 * dt,), boundary=bc))
        assert out.steps == 25
        got = out.snapshots[-1]
        for name in "uvw":
            np.testing.assert_allclose(getattr(got, name), getattr(ref, name), rtol=1e-12, atol=1e-14)


def test_equilibrium_preserved_with_equal_speeds():
    vp = decoupled(k1=1.5, k2=1.5, a=1.0, b=3.0)
    g = Grid1D(-12, 12, 400)
    u = np.exp(-g.x**2)
    state = FieldTriple(u, (vp.a / vp.b) * u, np.zeros_like(u))
    dt = stable_dt(vp, g, 0.9)
    for _ in range(20):
        state = relaxation_substep(transport_substep(state, vp, dt, g), vp, dt)
    np.testing.assert_allclose(state.v, (vp.a / vp.b) * state.u, rtol=0, atol=1e-15)


def test_discrete_slow_balance_periodic(rng):
    vp = make_params(c1=0.7, c2=-0.2)
    g = Grid1D(0, 1, 64)
    state = FieldTriple(rng.random(64), rng.random(64), rng.random(64))
    dt = stable_dt(vp, g, 0.5)
    new = strang_step(state, vp, dt, g, Boundary.PERIODIC)
    d_mass = np.sum(new.u + new.v - state.u - state.v)
    # relaxation half-steps see w before and after transport
    expected = (vp.c1 + vp.c2) * 0.5 * dt * (state.w.sum() + new.w.sum())
    assert d_mass == pytest.approx(expected, abs=1e-12)
    # and agrees with dt (c1 + c2) sum(w) up to O(dt^2) per step
    assert abs(d_mass - dt * (vp.c1 + vp.c2) * state.w.sum()) < 10 * dt**2 * 64


def test_determinism(smooth_ic):
    vp = make_params()
    g = Grid1D(-12, 12, 256)
    x0 = sample_initial_triple(smooth_ic.u, smooth_ic.v, smooth_ic.w, g, vp.epsilon)
    cfg = SolverConfig(output_times=(0.005, 0.5, 1.0))
    a = solve_full(vp, g, x0, cfg)
    b = solve_full(vp, g, x0, cfg)
    for s1, s2 in zip(a.snapshots, b.snapshots):
        assert s1.u.tobytes() == s2.u.tobytes() and s1.w.tobytes() == s2.w.tobytes()
    assert a.times == [0.005, 0.5, 1.0]


def test_layer_resolution_caps_dt():
    vp = make_params(epsilon=0.1)
    g = Grid1D(-12, 12, 64)
    x0 = uniform(64, 1, 0, 0)
    early = solve_full(vp, g, x0, SolverConfig(output_times=(0.005, 0.1)))
    late = solve_full(vp, g, x0, SolverConfig(output_times=(0.1,)))
    assert early.dt == pytest.approx(vp.epsilon**2 / 10)
    assert late.dt == pytest.approx(stable_dt(vp, g, 0.9))


def test_non_finite_state_detected():
    vp = make_params()
    g = Grid1D(0, 1, 4)
    bad = uniform(4, 1, 0, 0)
    bad.u[1] = np.inf
    with pytest.raises(NonFiniteState):
        solve_full(vp, g, bad, SolverConfig(output_times=(0.1,)))


def test_config_validation():
    with pytest.raises(BadSolverConfig):
        SolverConfig(cfl=1.5)
    with pytest.raises(BadSolverConfig):
        SolverConfig(output_times=(0.5, 0.1))
    with pytest.raises(BadSolverConfig):
        solve_full(make_params(), Grid1D(0, 1, 4), uniform(4, 1, 0, 0), SolverConfig(output_times=(2.0,)))
