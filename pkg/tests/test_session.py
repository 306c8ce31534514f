"""Fixed-clock teleop sessions: input buffering, mode switching, metrics,
and bit-exact trace replay."""

import numpy as np
import pytest

from latentarm import envs
from latentarm.errors import ContractViolation
from latentarm.kinematics import ee_tilt, forward_kinematics
from latentarm.latent import LatentPolicy
from latentarm.nn import Network
from latentarm.session import (
    TeleopSession,
    consistency,
    load_trace,
    metrics_from_trace,
    replay_session,
    save_trace,
    scene_description,
    session_report,
)


def make_policy(env, d=2, seed=0, a_mean=None):
    """Well-formed decoder without training; zero weights if a_mean is set,
    so decoding any nonzero stick input yields exactly a_mean."""
    obs, na = env.obs_dim, env.arm.n_joints
    enc = Network([obs + na, 8, d], ["tanh", "identity"], seed)
    dec = Network([d + obs, 8, na], ["tanh", "identity"], seed + 1)
    if a_mean is None:
        a_mean = np.zeros(na)
    else:
        for net in (enc, dec):
            for p in net.parameters():
                p *= 0.0
    return LatentPolicy(
        enc, dec, d, na, env.arm.max_joint_speed,
        s_mean=np.zeros(obs), s_scale=np.ones(obs),
        a_mean=np.asarray(a_mean, dtype=float), a_scale=np.ones(na),
        env_name=env.name,
    )


class TestConstruction:
    def test_parameter_validation(self, opening_env):
        with pytest.raises(ContractViolation):
            TeleopSession(opening_env, tick_rate=0.0)
        with pytest.raises(ContractViolation):
            TeleopSession(opening_env, deadzone=1.0)

    def test_decoder_env_must_match(self, opening_env, pushing_env):
        lp = make_policy(pushing_env)
        with pytest.raises(ContractViolation):
            TeleopSession(opening_env, [lp])

    def test_default_modes(self, opening_env):
        assert TeleopSession(opening_env).mode == "ee:linear"
        assert TeleopSession(opening_env, [make_policy(opening_env)]).mode == "latent:0"

    def test_mode_validation(self, opening_env):
        lp = make_policy(opening_env)
        with pytest.raises(ContractViolation):
            TeleopSession(opening_env, [lp], mode="latent:1")
        with pytest.raises(ContractViolation):
            TeleopSession(opening_env, [lp], mode="latent:x")
        with pytest.raises(ContractViolation):
            TeleopSession(opening_env, [lp], mode="warp")


class TestConsistency:
    def test_repeated_input_is_one(self):
        assert consistency([(1, 0), (1, 0)]) == 1.0

    def test_opposite_input_is_minus_one(self):
        assert consistency([(1, 0), (-1, 0)]) == -1.0

    def test_orthogonal_input_is_zero(self):
        assert consistency([(1, 0), (0, 1)]) == 0.0

    def test_under_two_nonzero_is_absent(self):
        assert consistency([]) is None
        assert consistency([(1, 0)]) is None
        assert consistency([(0, 0), (1, 0), (0, 0)]) is None

    def test_zero_inputs_are_skipped(self):
        # zeros between the two nonzero inputs do not contribute pairs
        assert consistency([(1, 0), (0, 0), (1, 0)]) == 1.0


class TestInput:
    def test_shape_and_finiteness(self, opening_env):
        sess = TeleopSession(opening_env)
        with pytest.raises(ContractViolation):
            sess.set_input([1.0])
        with pytest.raises(ContractViolation):
            sess.set_input([np.nan, 0.0])

    def test_clipping(self, opening_env):
        sess = TeleopSession(opening_env)
        sess.set_input([5.0, -5.0])
        rec = sess.tick()
        assert sess.trace[-1]["u"] == [1.0, -1.0]
        assert rec["tick"] == 1

    def test_latest_input_wins(self, opening_env):
        sess = TeleopSession(opening_env)
        sess.set_input([1.0, 0.0])
        sess.set_input([0.0, 1.0])
        sess.tick()
        assert sess.trace[-1]["u"] == [0.0, 1.0]

    def test_input_reused_when_none_pending(self, opening_env):
        sess = TeleopSession(opening_env)
        sess.set_input([0.5, 0.0])
        first = sess.tick()
        second = sess.tick()
        assert not first["flags"]["input_reused"]
        assert second["flags"]["input_reused"]
        assert sess.trace[-1]["u"] == [0.5, 0.0]

    def test_deadzone_holds_pose_and_time(self, opening_env):
        sess = TeleopSession(opening_env)
        joints0 = sess.state.s_r.copy()
        sess.set_input([0.03, 0.0])  # below the 0.05 deadzone
        snap = sess.tick()
        assert np.array_equal(sess.state.s_r, joints0)
        assert snap["metrics"]["control_time"] == 0.0
        assert snap["metrics"]["total_time"] == pytest.approx(1 / 20.0)


class TestModes:
    def test_toggle_cycles_ee_family(self, opening_env):
        sess = TeleopSession(opening_env)
        assert sess.toggle() == "ee:rotational"
        assert sess.toggle() == "ee:linear"
        assert sess.toggles == 2

    def test_toggle_cycles_latent_family(self, opening_env):
        pols = [make_policy(opening_env, seed=0), make_policy(opening_env, seed=1)]
        sess = TeleopSession(opening_env, pols)
        assert sess.toggle() == "latent:1"
        assert sess.toggle() == "latent:0"

    def test_toggle_event_lands_in_next_tick(self, opening_env):
        sess = TeleopSession(opening_env)
        sess.toggle()
        snap = sess.tick()
        assert snap["events"] == ["toggle"]
        assert sess.trace[-1]["events"] == ["toggle"]

    def test_set_mode_validates(self, opening_env):
        sess = TeleopSession(opening_env)
        with pytest.raises(ContractViolation):
            sess.set_mode("latent:0")  # no decoders loaded
        sess.set_mode("ee:rotational")
        assert sess.mode == "ee:rotational"

    def test_ee_linear_moves_along_command(self, opening_env):
        sess = TeleopSession(opening_env)
        ee0 = forward_kinematics(opening_env.arm, sess.state.s_r)
        sess.set_input([1.0, 0.0])
        for _ in range(10):
            sess.tick()
        ee1 = forward_kinematics(opening_env.arm, sess.state.s_r)
        moved = ee1 - ee0
        # commanded +x at 0.25 m/s for 10 ticks of 0.05 s -> about 0.125 m
        assert moved[0] > 0.08
        assert abs(moved[1]) < 0.4 * moved[0]

    def test_ee_rotational_changes_tilt(self, opening_env):
        sess = TeleopSession(opening_env, mode="ee:rotational")
        tilt0 = ee_tilt(sess.state.s_r)
        sess.set_input([1.0, 0.0])
        for _ in range(5):
            sess.tick()
        assert ee_tilt(sess.state.s_r) > tilt0 + 0.1

    def test_latent_mode_applies_decoded_action(self, opening_env):
        a_mean = np.array([0.1, -0.08, 0.06])
        lp = make_policy(opening_env, a_mean=a_mean)
        sess = TeleopSession(opening_env, [lp])
        joints0 = sess.state.s_r.copy()
        sess.set_input([1.0, 0.0])
        sess.tick()
        # zero-weight decoder always emits a_mean; one Euler step
        np.testing.assert_allclose(
            sess.state.s_r, joints0 + opening_env.arm.dt * a_mean, atol=1e-12)

    def test_mode_toggle_does_not_teleport(self, opening_env):
        pols = [make_policy(opening_env, seed=0), make_policy(opening_env, seed=1)]
        sess = TeleopSession(opening_env, pols)
        sess.set_input([0.7, 0.2])
        sess.tick()
        before = sess.state.s_r.copy()
        sess.toggle()
        assert np.array_equal(sess.state.s_r, before)


class TestMetrics:
    def test_no_input_gives_zero_control_time(self, opening_env):
        sess = TeleopSession(opening_env)
        for _ in range(10):
            sess.tick()
        rep = session_report(sess)
        assert rep["control_time"] == 0.0
        assert rep["total_time"] == pytest.approx(0.5)
        assert rep["consistency"] is None
        assert not rep["completed"]

    def test_hundred_driven_ticks_at_20hz(self, opening_env):
        sess = TeleopSession(opening_env)
        sess.set_input([0.0, 1.0])
        for _ in range(100):
            sess.tick()
        rep = session_report(sess)
        assert rep["control_time"] == 5.0
        assert rep["total_time"] == 5.0
        assert rep["consistency"] == 1.0

    def test_completion_latches_once(self, declutter_env):
        env = declutter_env
        sess = TeleopSession(env, seed=0)
        user, bin_rect = env.regions["user"], env.regions["bin"]
        arranged = {
            "clutter0": (-0.6, 0.0),
            "clutter1": (-0.6, 0.3),
            "bowl": ((user[0] + user[1]) / 2, (user[2] + user[3]) / 2),
            "container": ((bin_rect[0] + bin_rect[1]) / 2,
                          (bin_rect[2] + bin_rect[3]) / 2),
        }
        for obj, sl in zip(env.objects, env.object_slices):
            if obj.name in arranged:
                sess.state.s_o[sl.start:sl.start + 2] = arranged[obj.name]
        snap = sess.tick()
        assert "complete" in snap["events"]
        assert sess.completed_tick == 1
        snap2 = sess.tick()
        assert "complete" not in snap2["events"]
        assert sess.completed_tick == 1
        assert snap2["metrics"]["complete"]


class TestTraceReplay:
    def drive(self, env, policies, seed=3):
        """A session exercising inputs, reuse, deadzone, toggles and resets."""
        sess = TeleopSession(env, policies, seed=seed)
        rng = np.random.default_rng(7)
        for i in range(60):
            if i == 10 or i == 31:
                sess.toggle()
            if i == 20:
                sess.set_mode("ee:linear")
            if i == 25:
                sess.reset_world()
            if i % 3 != 2:  # every third tick reuses the previous input
                sess.set_input(rng.uniform(-1.2, 1.2, 2))
            sess.tick()
        return sess

    def test_trace_round_trip(self, opening_env, tmp_path):
        sess = self.drive(opening_env, [make_policy(opening_env, seed=0),
                                        make_policy(opening_env, seed=1)])
        path = tmp_path / "session.trace"
        save_trace(sess, str(path))
        header, records = load_trace(str(path))
        assert header["env"] == "opening"
        assert header["spaces"] == 2
        assert len(records) == 60
        assert records == sess.trace

    def test_metrics_from_trace_match_live_exactly(self, opening_env, tmp_path):
        sess = self.drive(opening_env, [make_policy(opening_env, seed=0),
                                        make_policy(opening_env, seed=1)])
        path = tmp_path / "session.trace"
        save_trace(sess, str(path))
        assert metrics_from_trace(str(path)) == session_report(sess)

    def test_replay_reproduces_states_bit_exactly(self, opening_env, tmp_path):
        pols = [make_policy(opening_env, seed=0), make_policy(opening_env, seed=1)]
        sess = self.drive(opening_env, pols)
        path = tmp_path / "session.trace"
        save_trace(sess, str(path))
        header, records = load_trace(str(path))
        replayed = replay_session(opening_env, pols, header, records)
        assert replayed.trace == sess.trace
        assert session_report(replayed) == session_report(sess)

    def test_replay_detects_tampering(self, opening_env, tmp_path):
        pols = [make_policy(opening_env, seed=0)]
        sess = self.drive(opening_env, pols)
        header, records = sess_header_records(sess, tmp_path)
        records[30]["objects"][0] += 0.5
        with pytest.raises(ContractViolation, match="diverged"):
            replay_session(opening_env, pols, header, records)

    def test_replay_rejects_wrong_env(self, opening_env, pushing_env, tmp_path):
        pols = [make_policy(opening_env, seed=0)]
        sess = self.drive(opening_env, pols)
        header, records = sess_header_records(sess, tmp_path)
        with pytest.raises(ContractViolation):
            replay_session(pushing_env, [], header, records)

    def test_load_trace_validation(self, tmp_path):
        empty = tmp_path / "empty.trace"
        empty.write_text("")
        with pytest.raises(ContractViolation):
            load_trace(str(empty))
        bad = tmp_path / "bad.trace"
        bad.write_text('{"format": "other", "version": 1}\n')
        with pytest.raises(ContractViolation):
            load_trace(str(bad))
        old = tmp_path / "old.trace"
        old.write_text('{"format": "latentarm-trace", "version": 99}\n')
        with pytest.raises(ContractViolation):
            load_trace(str(old))


def sess_header_records(sess, tmp_path):
    path = tmp_path / "t.trace"
    save_trace(sess, str(path))
    return load_trace(str(path))


class TestSceneDescription:
    def test_declutter_scene_is_plain_json(self, declutter_env):
        import json
        desc = scene_description(declutter_env)
        json.dumps(desc)  # everything converted to plain python types
        assert desc["env"] == "declutter"
        assert len(desc["links"]) == declutter_env.arm.n_joints
        assert {o["name"] for o in desc["objects"]} == {
            obj.name for obj in declutter_env.objects}
        assert "workspace" in desc["regions"]
