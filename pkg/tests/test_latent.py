"""Dataset plumbing, the state-conditioned autoencoder, and latent decoding.

The cheap oracles here are hand-built policies with zeroed weights (the
decoder then always predicts the stored action mean, so its error must equal
the constant-mean baseline) and brute-force geometry for nearest-object
partitioning.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latentarm import envs
from latentarm.errors import ContractViolation
from latentarm.latent import (
    AeParams,
    Dataset,
    LatentPolicy,
    collect,
    constant_mean_error,
    decode,
    decode_batch,
    decode_ex,
    encode,
    holdout_split,
    load_dataset,
    load_policy,
    nearest_object_index,
    partition_dataset,
    reconstruction_error,
    save_dataset,
    save_policy,
    subset,
    train_autoencoder,
)
from latentarm.nn import Network


def random_dataset(env, rows, seed=0, source="unsupervised"):
    rng = np.random.default_rng(seed)
    return Dataset(
        env.name,
        source,
        rng.normal(size=(rows, env.obs_dim)),
        rng.normal(size=(rows, env.n_actions)),
    )


def random_policy(env, d, seed=0):
    """Untrained but well-formed policy with nontrivial weights."""
    obs, na = env.obs_dim, env.n_actions
    h = 8
    enc = Network([obs + na, h, d], ["tanh", "identity"], seed)
    dec = Network([d + obs, h, na], ["tanh", "identity"], seed + 1)
    rng = np.random.default_rng(seed + 2)
    return LatentPolicy(
        enc, dec, d, na, env.arm.max_joint_speed,
        s_mean=rng.normal(size=obs), s_scale=np.full(obs, 1.5),
        a_mean=rng.normal(size=na) * 0.1, a_scale=np.full(na, 0.7),
        env_name=env.name,
    )


def zeroed_policy(env, data, d=1):
    """All-zero weights: the decoder output is exactly the action mean."""
    obs, na = env.obs_dim, env.n_actions
    enc = Network([obs + na, d], ["identity"], 0)
    dec = Network([d + obs, na], ["identity"], 1)
    for net in (enc, dec):
        for p in net.parameters():
            p *= 0.0
    return LatentPolicy(
        enc, dec, d, na, env.arm.max_joint_speed,
        s_mean=data.states.mean(axis=0),
        s_scale=np.maximum(data.states.std(axis=0), 1e-6),
        a_mean=data.actions.mean(axis=0),
        a_scale=np.maximum(data.actions.std(axis=0), 1e-6),
        env_name=env.name,
    )


class TestDataset:
    def test_unknown_source_rejected(self, opening_env):
        with pytest.raises(ContractViolation):
            random_dataset(opening_env, 5, source="scraped")

    def test_misaligned_rows_rejected(self):
        with pytest.raises(ContractViolation):
            Dataset("opening", "unsupervised", np.zeros((3, 4)), np.zeros((2, 3)))

    def test_flat_arrays_rejected(self):
        with pytest.raises(ContractViolation):
            Dataset("opening", "unsupervised", np.zeros(4), np.zeros(3))

    def test_len(self, opening_env):
        assert len(random_dataset(opening_env, 7)) == 7


class TestCollect:
    def scripted(self, env):
        def act(flat, rng):
            return rng.uniform(-1, 1, env.n_actions) * env.arm.max_joint_speed
        return act

    def test_row_count(self, opening_env):
        data = collect(self.scripted(opening_env), opening_env, episodes=2, seed=0)
        assert len(data) == 2 * opening_env.horizon
        assert data.states.shape == (len(data), opening_env.obs_dim)
        assert data.actions.shape == (len(data), opening_env.n_actions)

    def test_same_seed_same_data(self, opening_env):
        a = collect(self.scripted(opening_env), opening_env, episodes=2, seed=9)
        b = collect(self.scripted(opening_env), opening_env, episodes=2, seed=9)
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.actions, b.actions)

    def test_different_seed_differs(self, opening_env):
        a = collect(self.scripted(opening_env), opening_env, episodes=1, seed=0)
        b = collect(self.scripted(opening_env), opening_env, episodes=1, seed=1)
        assert not np.array_equal(a.actions, b.actions)

    def test_zero_episodes_rejected(self, opening_env):
        with pytest.raises(ContractViolation):
            collect(self.scripted(opening_env), opening_env, episodes=0, seed=0)


class TestDatasetIO:
    def test_round_trip_exact(self, opening_env, tmp_path):
        data = random_dataset(opening_env, 40, seed=3, source="teleop-demo")
        path = tmp_path / "d.jsonl"
        save_dataset(data, path)
        back = load_dataset(path)
        assert back.env_name == data.env_name
        assert back.source == data.source
        assert np.array_equal(back.states, data.states)
        assert np.array_equal(back.actions, data.actions)

    def test_foreign_file_rejected(self, tmp_path):
        path = tmp_path / "d.jsonl"
        path.write_text('{"format": "something-else", "version": 1}\n')
        with pytest.raises(ContractViolation):
            load_dataset(path)

    def test_truncated_file_rejected(self, opening_env, tmp_path):
        path = tmp_path / "d.jsonl"
        save_dataset(random_dataset(opening_env, 10), path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-2]) + "\n")
        with pytest.raises(ContractViolation):
            load_dataset(path)


class TestEncodeDecode:
    def test_encode_inside_unit_box(self, opening_env):
        lp = random_policy(opening_env, d=2)
        rng = np.random.default_rng(0)
        for _ in range(50):
            z = encode(lp, rng.normal(size=opening_env.obs_dim) * 3,
                       rng.normal(size=opening_env.n_actions) * 3)
            assert z.shape == (2,)
            assert np.all(np.abs(z) < 1.0)

    def test_decode_respects_action_bound(self, opening_env):
        lp = random_policy(opening_env, d=2, seed=4)
        rng = np.random.default_rng(1)
        for _ in range(50):
            a, _ = decode_ex(lp, rng.uniform(-1, 1, 2),
                             rng.normal(size=opening_env.obs_dim))
            assert np.all(np.abs(a) <= opening_env.arm.max_joint_speed + 1e-12)

    def test_out_of_range_latent_is_clipped_and_flagged(self, opening_env):
        lp = random_policy(opening_env, d=2)
        s = np.zeros(opening_env.obs_dim)
        a_big, clipped = decode_ex(lp, np.array([3.0, -7.0]), s)
        a_edge, edge_flag = decode_ex(lp, np.array([1.0, -1.0]), s)
        assert clipped and not edge_flag
        assert np.array_equal(a_big, a_edge)

    def test_wrong_latent_shape_rejected(self, opening_env):
        lp = random_policy(opening_env, d=2)
        with pytest.raises(ContractViolation):
            decode_ex(lp, np.zeros(3), np.zeros(opening_env.obs_dim))

    def test_decode_batch_matches_single(self, opening_env):
        lp = random_policy(opening_env, d=2, seed=7)
        rng = np.random.default_rng(2)
        zs = rng.uniform(-1, 1, size=(6, 2))
        s = rng.normal(size=opening_env.obs_dim)
        batch = decode_batch(lp, zs, s)
        # BLAS may pick a different kernel per batch shape, so compare to
        # tight tolerance rather than bitwise
        for i, z in enumerate(zs):
            np.testing.assert_allclose(batch[i], decode(lp, z, s),
                                       rtol=0, atol=1e-12)

    def test_world_state_and_flat_agree(self, opening_env):
        lp = random_policy(opening_env, d=2, seed=9)
        state = envs.reset(opening_env, 5)
        z = np.array([0.3, -0.4])
        assert np.array_equal(decode(lp, z, state), decode(lp, z, state.flat()))


class TestReconstructionError:
    def test_empty_dataset_rejected(self, opening_env):
        empty = Dataset("opening", "unsupervised",
                        np.zeros((0, opening_env.obs_dim)),
                        np.zeros((0, opening_env.n_actions)))
        with pytest.raises(ContractViolation):
            reconstruction_error(zeroed_policy(opening_env, random_dataset(opening_env, 5)), empty)

    def test_zero_weights_equal_constant_mean_baseline(self, opening_env):
        data = random_dataset(opening_env, 64, seed=11)
        lp = zeroed_policy(opening_env, data)
        # decoder emits a_mean for every row, which is the baseline predictor
        assert reconstruction_error(lp, data) == pytest.approx(
            constant_mean_error(data, data), rel=1e-12)

    def test_constant_mean_error_hand_example(self):
        train = Dataset("opening", "unsupervised", np.zeros((2, 1)),
                        np.array([[1.0, 0.0], [3.0, 0.0]]))
        held = Dataset("opening", "unsupervised", np.zeros((1, 1)),
                       np.array([[5.0, 1.0]]))
        # mean action (2, 0); error (3, 1) -> squared norm 10
        assert constant_mean_error(train, held) == pytest.approx(10.0)


class TestHoldoutSplit:
    def test_single_row_has_no_holdout(self):
        tr, ho = holdout_split(1, 0.5, seed=0)
        assert len(tr) == 1 and len(ho) == 0

    def test_deterministic(self):
        a = holdout_split(100, 0.1, seed=4)
        b = holdout_split(100, 0.1, seed=4)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    @given(n=st.integers(2, 400), fraction=st.floats(0.05, 0.5),
           seed=st.integers(0, 10))
    @settings(max_examples=40, deadline=None)
    def test_partition_properties(self, n, fraction, seed):
        tr, ho = holdout_split(n, fraction, seed)
        assert len(ho) == max(1, int(round(n * fraction)))
        assert len(tr) + len(ho) == n
        assert sorted(np.concatenate([tr, ho]).tolist()) == list(range(n))


class TestTrainAutoencoder:
    def test_latent_dim_bounds(self, opening_env, tiny_dataset):
        for bad in (0, opening_env.n_actions):
            with pytest.raises(ContractViolation):
                train_autoencoder(tiny_dataset, bad, opening_env, AeParams(epochs=1))

    def test_dimension_mismatch_rejected(self, opening_env, pushing_env, tiny_dataset):
        with pytest.raises(ContractViolation):
            train_autoencoder(tiny_dataset, 1, pushing_env, AeParams(epochs=1))

    def test_curve_shape(self, opening_env, tiny_dataset):
        lp, curve = train_autoencoder(tiny_dataset, 1, opening_env,
                                      AeParams(epochs=3))
        assert [rec["epoch"] for rec in curve] == [0, 1, 2]
        for rec in curve:
            assert rec["train_loss"] >= 0.0 and rec["holdout_loss"] >= 0.0
        assert lp.latent_dim == 1 and lp.env_name == "opening"

    def test_deterministic_training(self, opening_env, tiny_dataset):
        p = AeParams(epochs=4)
        lp1, c1 = train_autoencoder(tiny_dataset, 1, opening_env, p)
        lp2, c2 = train_autoencoder(tiny_dataset, 1, opening_env, p)
        assert c1 == c2
        for w1, w2 in zip(lp1.decoder.parameters(), lp2.decoder.parameters()):
            assert np.array_equal(w1, w2)

    def test_loss_improves_and_beats_mean_baseline(self, opening_env, tiny_dataset):
        lp, curve = train_autoencoder(tiny_dataset, 1, opening_env,
                                      AeParams(epochs=80))
        assert curve[-1]["holdout_loss"] < curve[0]["holdout_loss"]
        tr_idx, ho_idx = holdout_split(len(tiny_dataset), 0.1, 0)
        base = constant_mean_error(subset(tiny_dataset, tr_idx),
                                   subset(tiny_dataset, ho_idx))
        assert curve[-1]["holdout_loss"] < base


class TestPartition:
    def reset_flat(self, env, joints):
        # object coordinates at reset are zero, so interaction points sit at
        # the configured anchors
        return np.concatenate([joints, np.zeros(env.object_state_dim)])

    def joints_reaching_anchor(self, env, anchor, seed=0):
        """Random-search joints whose EE lands on the given anchor."""
        from latentarm.kinematics import forward_kinematics
        rng = np.random.default_rng(seed)
        lo = [l for l, _ in env.arm.joint_limits]
        hi = [h for _, h in env.arm.joint_limits]
        best, best_d = None, np.inf
        for _ in range(20000):
            q = rng.uniform(lo, hi)
            d = float(np.linalg.norm(forward_kinematics(env.arm, q) - anchor))
            if d < best_d:
                best, best_d = q, d
        assert best_d < 0.02
        return best

    def test_nearest_object_index_geometry(self, reaching_env):
        env = reaching_env
        for i, obj in enumerate(env.objects):
            q = self.joints_reaching_anchor(env, np.asarray(obj.anchor), seed=i)
            assert nearest_object_index(env, self.reset_flat(env, q)) == i

    def test_groups_must_cover_object_names(self, reaching_env, tiny_dataset):
        data = Dataset("reaching", "teleop-demo",
                       np.zeros((2, reaching_env.obs_dim)),
                       np.zeros((2, reaching_env.n_actions)))
        with pytest.raises(ContractViolation):
            partition_dataset(data, reaching_env, [["cup0"], ["cup1"]])
        with pytest.raises(ContractViolation):
            partition_dataset(data, reaching_env,
                              [["cup0", "cup0"], ["cup1"], ["cup2"]])

    def test_empty_partition_rejected(self, reaching_env):
        env = reaching_env
        q = self.joints_reaching_anchor(env, np.asarray(env.objects[0].anchor))
        flat = self.reset_flat(env, q)
        data = Dataset("reaching", "teleop-demo", np.stack([flat, flat]),
                       np.zeros((2, env.n_actions)))
        with pytest.raises(ContractViolation):
            partition_dataset(data, env, [["cup0"], ["cup1"], ["cup2"]])

    def test_partition_routes_rows_by_nearest_object(self, reaching_env):
        env = reaching_env
        rows, owners = [], []
        for i, obj in enumerate(env.objects):
            q = self.joints_reaching_anchor(env, np.asarray(obj.anchor), seed=i)
            for _ in range(2 + i):
                rows.append(self.reset_flat(env, q))
                owners.append(i)
        data = Dataset("reaching", "teleop-demo", np.stack(rows),
                       np.zeros((len(rows), env.n_actions)))
        parts = partition_dataset(data, env, [["cup0"], ["cup1"], ["cup2"]])
        assert [len(p) for p in parts] == [2, 3, 4]
        for gi, part in enumerate(parts):
            for flat in part.states:
                assert nearest_object_index(env, flat) == gi


class TestPolicyIO:
    def test_round_trip_decodes_identically(self, opening_env, tmp_path):
        lp = random_policy(opening_env, d=2, seed=13)
        save_policy(lp, tmp_path / "pol")
        back = load_policy(tmp_path / "pol")
        assert back.env_name == lp.env_name
        rng = np.random.default_rng(0)
        zs = rng.uniform(-1, 1, size=(5, 2))
        s = rng.normal(size=opening_env.obs_dim)
        assert np.array_equal(decode_batch(back, zs, s), decode_batch(lp, zs, s))

    def test_foreign_manifest_rejected(self, opening_env, tmp_path):
        lp = random_policy(opening_env, d=2)
        save_policy(lp, tmp_path / "pol")
        manifest = tmp_path / "pol" / "manifest.json"
        manifest.write_text(manifest.read_text().replace(
            "latentarm-latent", "other-format"))
        with pytest.raises(ContractViolation):
            load_policy(tmp_path / "pol")
