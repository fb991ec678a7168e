import dataclasses
import math

import numpy as np
import pytest

from salvosim.engagement import TargetModel
from salvosim.guidance import GRAV, GuidanceConfig
from salvosim.network import SwitchingSchedule, Topology
from salvosim.simulator import (
    Scenario,
    consensus_time_of,
    make_world,
    resolve_gains,
    run,
    step,
)

DEG = math.pi / 180.0
CYCLE5 = Topology.from_edge_list(5, [[1, 2], [2, 3], [3, 4], [4, 5], [5, 1]])
PAIR = Topology.from_edge_list(2, [[1, 2]])


def make_scenario(
    law="fixed_stationary",
    los=(60.0, 150.0, 30.0, -60.0, 45.0),
    heading=(30.0, 70.0, 90.0, -30.0, 45.0),
    v=200.0,
    target=None,
    graph=CYCLE5,
    t_max=70.0,
    dt=1e-3,
    **guidance_kw,
):
    n = len(los)
    target = target or TargetModel(kind="stationary")
    cfg = GuidanceConfig(law=law, **guidance_kw)
    network = SwitchingSchedule.fixed(graph)
    r0 = tuple([1e4] * n)
    speeds = tuple([v] * n)
    gains, _ = resolve_gains(
        cfg, network, np.array(r0), np.array(speeds), target.v_t
    )
    return Scenario(
        r0=r0,
        theta0=tuple(x * DEG for x in los),
        gamma0=tuple(x * DEG for x in heading),
        v=speeds,
        target=target,
        network=network,
        guidance=gains,
        t_max=t_max,
        dt=dt,
    )


class TestStep:
    def test_zero_command_closes_at_exact_speed(self):
        # on-course stationary geometry: the command is zero and the range
        # shrinks by exactly v dt each step
        sc = make_scenario(
            los=(10.0, 30.0), heading=(10.0, 30.0), graph=PAIR, t_s=1.0
        )
        world = make_world(sc)
        for k in range(10):
            world = step(world, k * sc.dt, sc.dt)
        assert np.allclose(world.r, 1e4 - 10 * sc.dt * 200.0, rtol=1e-14)
        assert np.allclose(world.out_a_cmd, 0.0)

    def test_speeds_never_change(self):
        sc = make_scenario()
        world = make_world(sc)
        v0 = world.v.copy()
        for k in range(50):
            world = step(world, k * sc.dt, sc.dt)
        assert np.array_equal(world.v, v0)

    def test_capture_time_interpolated_between_steps(self):
        sc = make_scenario(los=(0.0, 10.0), heading=(0.0, 10.0), graph=PAIR, t_s=1.0)
        sc = dataclasses.replace(sc, r0=(3.0, 3.0), t_max=0.1)
        log = run(sc)
        # closing at exactly 200 m/s from 3 m: crossing 1 m at t = 0.01 s
        assert log.capture_times == pytest.approx([0.01, 0.01], abs=1e-12)


class TestRun:
    def test_symmetric_pair_is_simultaneous(self):
        sc = make_scenario(
            los=(40.0, -40.0), heading=(70.0, -70.0), graph=PAIR, t_s=2.0
        )
        log = run(sc)
        assert log.all_captured
        assert log.capture_spread <= 1e-9
        assert np.allclose(log.r[:, 0], log.r[:, 1], rtol=1e-12)
        assert np.allclose(log.delta[:, 0], -log.delta[:, 1], atol=1e-12)

    def test_determinism_bit_identical(self):
        sc = make_scenario(t_max=2.0)
        a, b = run(sc), run(sc)
        assert np.array_equal(a.tgo, b.tgo)
        assert np.array_equal(a.a_cmd, b.a_cmd)
        assert np.array_equal(a.r, b.r)

    def test_log_is_frozen_after_capture(self):
        # near-zero consensus gain decouples the pair so the capture
        # instants genuinely differ
        sc = make_scenario(los=(0.0, 10.0), heading=(0.0, 10.0), graph=PAIR,
                           t_s=1.0, t_max=3.0, b_gain=(1e-12, 1e-12))
        sc = dataclasses.replace(sc, r0=(30.0, 500.0))
        log = run(sc)
        k_cap = np.searchsorted(log.t, log.capture_times[0]) + 1
        assert np.all(log.r[k_cap:, 0] == log.r[k_cap, 0])
        assert np.all(log.a_cmd[k_cap:, 0] == 0.0)
        assert np.all(np.diff(log.t) > 0.0)

    def test_divergence_aborts_with_diagnostic(self):
        from salvosim.simulator import SimulationDivergenceError

        poisoned = TargetModel(
            kind="maneuvering",
            v_t=200.0,
            gamma_t=2.0,
            accel_profile=lambda t: math.nan if t > 0.05 else 0.0,
        )
        sc = make_scenario(
            law="fixed_maneuvering",
            los=(10.0, 30.0),
            heading=(20.0, 45.0),
            graph=PAIR,
            v=400.0,
            target=poisoned,
            t_max=1.0,
        )
        with pytest.raises((SimulationDivergenceError, FloatingPointError)) as exc:
            run(sc)
        if isinstance(exc.value, SimulationDivergenceError):
            assert exc.value.t >= 0.05

    def test_step_halving_matches_capture_times(self):
        # short two-agent engagement: halving dt moves capture times < 1 ms
        sc1 = make_scenario(
            los=(40.0, -40.0), heading=(65.0, -65.0), graph=PAIR, t_s=2.0,
            t_max=60.0, dt=1e-3,
        )
        sc2 = dataclasses.replace(sc1, dt=5e-4)
        t1, t2 = run(sc1).capture_times, run(sc2).capture_times
        assert np.all(np.isfinite(t1)) and np.all(np.isfinite(t2))
        assert np.max(np.abs(t1 - t2)) < 1e-3


class TestConsensusTime:
    def test_already_agreed(self):
        t = np.arange(5) * 0.1
        spread = np.zeros(5)
        captures = np.array([np.nan, np.nan])
        assert consensus_time_of(t, spread, captures, 0.1) == 0.0

    def test_never_agreed(self):
        t = np.arange(5) * 0.1
        spread = np.array([5.0, 4.0, 3.0, 2.0, 1.0])
        captures = np.array([np.nan, np.nan])
        assert consensus_time_of(t, spread, captures, 0.1) is None

    def test_first_sustained_entry(self):
        t = np.arange(6) * 1.0
        spread = np.array([3.0, 0.05, 0.5, 0.08, 0.06, 0.04])
        captures = np.array([np.nan])
        assert consensus_time_of(t, spread, captures, 0.1) == 3.0

    def test_window_ends_at_first_capture(self):
        t = np.arange(6) * 1.0
        spread = np.array([3.0, 0.05, 0.05, 0.05, 9.0, 9.0])
        captures = np.array([3.0, 3.5])
        assert consensus_time_of(t, spread, captures, 0.1) == 1.0


class TestScenarioValidation:
    def test_interceptor_must_outrun_target(self):
        with pytest.raises(ValueError):
            make_scenario(
                law="fixed_constant",
                v=250.0,
                target=TargetModel(kind="constant_speed", v_t=300.0, gamma_t=1.0),
            )

    def test_needs_two_interceptors(self):
        with pytest.raises(ValueError):
            make_scenario(los=(10.0,), heading=(20.0,), graph=Topology(1, ()))

    def test_network_size_must_match(self):
        with pytest.raises(ValueError):
            make_scenario(los=(10.0, 20.0), heading=(15.0, 25.0), graph=CYCLE5)
