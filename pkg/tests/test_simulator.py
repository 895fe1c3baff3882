"""Kinematics, odometry noise, lidar simulation, and the tick loop."""

import math

import numpy as np
import pytest

from nav2d.core import (Pose2D, RobotParams, ScanConfig, Twist2D, WheelSpeeds,
                        pose_between)
from nav2d.simulator import (OdomNoise, SimState, Simulator, simulate_lidar,
                             step_kinematics, step_odometry, twist_to_wheels,
                             wheels_to_twist)

from conftest import make_grid, occupy_column

PARAMS = RobotParams()  # r = 0.04, d = 0.1


class TestWheelTwistMapping:
    def test_equal_wheels_drive_straight(self):
        t = wheels_to_twist(WheelSpeeds(7.5, 7.5), PARAMS)
        assert t.v == pytest.approx(0.04 * 7.5, rel=1e-15)
        assert t.w == 0.0

    def test_opposite_wheels_spin_in_place(self):
        t = wheels_to_twist(WheelSpeeds(4.0, -4.0), PARAMS)
        assert t.v == 0.0
        assert t.w == pytest.approx(0.04 * 8.0 / 0.1, rel=1e-15)

    def test_hand_case(self):
        # r=0.04, d=0.1, wR=10, wL=5: v = 0.04*15/2 = 0.3, w = 0.04*5/0.1 = 2
        t = wheels_to_twist(WheelSpeeds(10.0, 5.0), PARAMS)
        assert t.v == pytest.approx(0.3, abs=1e-15)
        assert t.w == pytest.approx(2.0, abs=1e-12)

    def test_inverse_hand_case(self):
        ws = twist_to_wheels(Twist2D(0.3, 2.0), PARAMS)
        assert ws.w_right == pytest.approx(10.0, abs=1e-12)
        assert ws.w_left == pytest.approx(5.0, abs=1e-12)

    def test_round_trip_100_random_twists(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            t = Twist2D(rng.uniform(-1.0, 1.0), rng.uniform(-2.0, 2.0))
            back = wheels_to_twist(twist_to_wheels(t, PARAMS), PARAMS)
            assert back.v == pytest.approx(t.v, rel=1e-12, abs=1e-15)
            assert back.w == pytest.approx(t.w, rel=1e-12, abs=1e-15)

    def test_linearity_50_random_pairs(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            a, b = rng.uniform(-3.0, 3.0, 2)
            w1 = WheelSpeeds(*rng.uniform(-20.0, 20.0, 2))
            w2 = WheelSpeeds(*rng.uniform(-20.0, 20.0, 2))
            combined = wheels_to_twist(
                WheelSpeeds(a * w1.w_right + b * w2.w_right,
                            a * w1.w_left + b * w2.w_left), PARAMS)
            t1 = wheels_to_twist(w1, PARAMS)
            t2 = wheels_to_twist(w2, PARAMS)
            assert combined.v == pytest.approx(a * t1.v + b * t2.v,
                                               rel=1e-12, abs=1e-12)
            assert combined.w == pytest.approx(a * t1.w + b * t2.w,
                                               rel=1e-12, abs=1e-12)

    def test_saturation_preserves_curvature(self):
        # both wheels over the limit scale down together
        t = Twist2D(5.0, 3.0)
        ws = twist_to_wheels(t, PARAMS)
        assert max(abs(ws.w_right), abs(ws.w_left)) == pytest.approx(
            PARAMS.max_wheel_speed)
        back = wheels_to_twist(ws, PARAMS)
        assert back.v * t.w == pytest.approx(back.w * t.v, rel=1e-9)

    def test_within_limits_not_scaled(self):
        ws = twist_to_wheels(Twist2D(0.5, 0.0), PARAMS)
        assert abs(ws.w_right) < PARAMS.max_wheel_speed


class TestStepKinematics:
    def test_straight_line(self):
        p = step_kinematics(Pose2D(), Twist2D(1.0, 0.0), 1.0)
        assert (p.x, p.y, p.theta) == (1.0, 0.0, 0.0)

    def test_pure_rotation(self):
        p = step_kinematics(Pose2D(), Twist2D(0.0, math.pi / 2), 1.0)
        assert (p.x, p.y) == (0.0, 0.0)
        assert p.theta == pytest.approx(math.pi / 2)

    @pytest.mark.parametrize("steps", [1, 7, 100, 12345])
    def test_unit_circle_closure_any_subdivision(self, steps):
        # v = w = 1 for total time 2 pi traces the unit circle exactly
        pose = Pose2D()
        dt = 2.0 * math.pi / steps
        for _ in range(steps):
            pose = step_kinematics(pose, Twist2D(1.0, 1.0), dt)
        assert math.hypot(pose.x, pose.y) < 1e-9
        assert abs(pose.theta) < 1e-9

    def test_quarter_arc_analytic(self):
        # radius 2 left turn through 90 degrees from the origin
        p = step_kinematics(Pose2D(), Twist2D(1.0, 0.5), math.pi)
        assert p.x == pytest.approx(2.0, abs=1e-12)
        assert p.y == pytest.approx(2.0, abs=1e-12)
        assert p.theta == pytest.approx(math.pi / 2, abs=1e-12)

    def test_rejects_non_positive_dt(self):
        with pytest.raises(ValueError):
            step_kinematics(Pose2D(), Twist2D(1.0, 0.0), 0.0)

    def test_no_side_slip_over_random_run(self):
        """The chord of every step lies exactly along the mid-step heading.

        A differential drive cannot displace sideways: expressing each
        per-step displacement in the frame headed theta + w dt / 2 must
        give a lateral component of zero to machine precision.
        """
        rng = np.random.default_rng(42)
        pose = Pose2D()
        worst = 0.0
        for _ in range(10_000):
            v = rng.uniform(-1.2, 1.2)
            w = rng.uniform(-math.pi, math.pi)
            dt = rng.uniform(1e-3, 0.2)
            new = step_kinematics(pose, Twist2D(v, w), dt)
            dx, dy = new.x - pose.x, new.y - pose.y
            mid = pose.theta + 0.5 * w * dt
            lateral = -math.sin(mid) * dx + math.cos(mid) * dy
            worst = max(worst, abs(lateral))
            pose = new
        assert worst <= 1e-12

    def test_pure_spin_never_translates(self):
        pose = Pose2D(0.3, -0.7, 0.2)
        t = wheels_to_twist(WheelSpeeds(6.0, -6.0), PARAMS)
        for _ in range(1000):
            pose = step_kinematics(pose, t, 0.05)
        assert abs(pose.x - 0.3) <= 1e-12
        assert abs(pose.y + 0.7) <= 1e-12


class TestStepOdometry:
    def test_zero_noise_tracks_truth(self):
        state = SimState(commanded=Twist2D(0.7, 0.3))
        noise = OdomNoise(0.0, 0.0, 0.0)
        rng = np.random.default_rng(0)
        for _ in range(200):
            state = step_odometry(state, noise, 0.1, rng)
        assert state.odom_pose.x == pytest.approx(state.true_pose.x, abs=1e-12)
        assert state.odom_pose.y == pytest.approx(state.true_pose.y, abs=1e-12)
        assert state.odom_pose.theta == pytest.approx(state.true_pose.theta,
                                                      abs=1e-12)
        assert state.time == pytest.approx(20.0)

    def test_same_seed_same_trajectory(self):
        def run(seed):
            state = SimState(commanded=Twist2D(0.5, 0.1))
            rng = np.random.default_rng(seed)
            for _ in range(50):
                state = step_odometry(state, OdomNoise(), 0.1, rng)
            return state.odom_pose

        a, b = run(9), run(9)
        assert (a.x, a.y, a.theta) == (b.x, b.y, b.theta)

    def test_per_step_error_variance(self):
        # default var_x = 1e-4; the sample variance over 1000 unit steps
        # must land within 30 percent
        state = SimState(commanded=Twist2D(1.0, 0.0))
        rng = np.random.default_rng(123)
        errors = []
        for _ in range(1000):
            new = step_odometry(state, OdomNoise(), 1.0, rng)
            true_step = pose_between(state.true_pose, new.true_pose)
            odom_step = pose_between(state.odom_pose, new.odom_pose)
            errors.append(odom_step.x - true_step.x)
            state = new
        var = float(np.var(errors))
        assert 0.7e-4 < var < 1.3e-4

    def test_variance_validation(self):
        with pytest.raises(ValueError):
            OdomNoise(var_x=-1.0)


class TestSimulateLidar:
    def test_empty_map_all_sentinel(self):
        g = make_grid(100, 100, 0.05)
        cfg = ScanConfig(noise_sigma=0.0)
        scan = simulate_lidar(Pose2D(2.5, 2.5, 0.0), g, cfg)
        assert np.all(scan.ranges == cfg.range_max)
        assert not scan.hits().any()

    def test_wall_ahead_distance(self):
        g = make_grid(200, 200, 0.05, origin=(-5.0, -5.0))
        occupy_column(g, 2.0)
        cfg = ScanConfig(noise_sigma=0.0)
        scan = simulate_lidar(Pose2D(0.0, 0.0, 0.0), g, cfg)
        forward = scan.ranges[np.argmin(np.abs(cfg.bearings()))]
        assert forward == pytest.approx(2.0, abs=g.resolution)

    def test_wall_behind_only(self):
        g = make_grid(200, 200, 0.05, origin=(-5.0, -5.0))
        occupy_column(g, -3.0)
        cfg = ScanConfig(noise_sigma=0.0)
        scan = simulate_lidar(Pose2D(0.0, 0.0, 0.0), g, cfg)
        bearings = cfg.bearings()
        forward = scan.ranges[np.argmin(np.abs(bearings))]
        rear = scan.ranges[np.argmin(np.abs(np.abs(bearings) - math.pi))]
        assert forward == cfg.range_max
        assert rear == pytest.approx(3.0, abs=2 * g.resolution)

    def test_ranges_always_valid(self):
        g = make_grid(100, 100, 0.05)
        g.cells[40:60, 40:60] = 6.0
        cfg = ScanConfig()  # noisy
        scan = simulate_lidar(Pose2D(1.0, 1.0, 0.3), g, cfg, seed=5)
        assert np.all((scan.ranges >= cfg.range_min)
                      & (scan.ranges <= cfg.range_max))

    def test_out_of_bounds_pose_rejected(self):
        g = make_grid(10, 10, 0.05)
        with pytest.raises(ValueError):
            simulate_lidar(Pose2D(99.0, 0.0, 0.0), g, ScanConfig())

    def test_range_min_hides_close_walls(self):
        g = make_grid(100, 100, 0.01, origin=(-0.5, -0.5))
        occupy_column(g, 0.05)  # 5 cm ahead, inside range_min
        cfg = ScanConfig(range_min=0.15, noise_sigma=0.0)
        scan = simulate_lidar(Pose2D(0.0, 0.0, 0.0), g, cfg)
        forward = scan.ranges[np.argmin(np.abs(cfg.bearings()))]
        assert forward == cfg.range_max


class TestSimulatorLoop:
    def test_determinism_same_seed(self):
        def run(seed):
            g = make_grid(100, 100, 0.05)
            sim = Simulator(g, start=Pose2D(2.5, 2.5, 0.0), seed=seed)
            log = []
            for i in range(100):
                st = sim.tick(Twist2D(0.3, 0.4 * math.sin(i / 7)))
                log.append((st.true_pose.x, st.true_pose.y, st.true_pose.theta,
                            st.odom_pose.x, st.odom_pose.y, st.odom_pose.theta))
            return log

        assert run(4) == run(4)
        assert run(4) != run(5)

    def test_command_saturated_through_wheels(self):
        g = make_grid(100, 100, 0.05)
        sim = Simulator(g, start=Pose2D(2.5, 2.5, 0.0), seed=0)
        st = sim.tick(Twist2D(99.0, 0.0))
        # 30 rad/s on 0.04 m wheels caps straight speed at 1.2 m/s
        assert st.commanded.v == pytest.approx(1.2, rel=1e-12)

    def test_collision_stops_at_wall(self):
        g = make_grid(200, 100, 0.05, origin=(0.0, 0.0))
        occupy_column(g, 5.0)
        sim = Simulator(g, start=Pose2D(1.0, 2.5, 0.0),
                        noise=OdomNoise(0, 0, 0), seed=0)
        for _ in range(200):
            sim.tick(Twist2D(1.0, 0.0))
        st = sim.state
        assert st.collision
        # stopped at the contact point, not inside the wall band
        assert st.true_pose.x < 5.0 - sim.robot_radius + g.resolution
        assert st.true_pose.x > 4.5

    def test_collision_flag_latches(self):
        g = make_grid(100, 100, 0.05, origin=(0.0, 0.0))
        occupy_column(g, 3.0)
        sim = Simulator(g, start=Pose2D(2.8, 2.5, 0.0), seed=1)
        for _ in range(50):
            sim.tick(Twist2D(1.0, 0.0))
        assert sim.state.collision
        sim.tick(Twist2D(-0.2, 0.0))
        assert sim.state.collision  # stays raised for the run

    def test_time_monotonic(self):
        g = make_grid(50, 50, 0.05)
        sim = Simulator(g, start=Pose2D(1.0, 1.0, 0.0))
        times = [sim.tick(Twist2D(0.0, 0.1)).time for _ in range(10)]
        assert times == pytest.approx([0.1 * (i + 1) for i in range(10)])
