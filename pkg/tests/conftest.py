"""Shared fixtures. The trained artifacts are expensive (minutes of CPU), so
they are session-scoped and built lazily: only the tests that ask for them
pay for them, and within one run they are built once."""

import numpy as np
import pytest

from latentarm import envs, operator, sac
from latentarm.latent import AeParams, collect, train_autoencoder


@pytest.fixture(scope="session")
def opening_env():
    return envs.get_env("opening")


@pytest.fixture(scope="session")
def pushing_env():
    return envs.get_env("pushing")


@pytest.fixture(scope="session")
def reaching_env():
    return envs.get_env("reaching")


@pytest.fixture(scope="session")
def declutter_env():
    return envs.get_env("declutter")


@pytest.fixture(scope="session")
def opening_run(opening_env):
    """Desk-scale diverse pre-training run on the drawer env."""
    return sac.train(opening_env, sac.SacParams(episodes=60, seed=0))


@pytest.fixture(scope="session")
def opening_dataset(opening_run, opening_env):
    agent, _ = opening_run
    return collect(agent, opening_env, episodes=70, seed=0)


@pytest.fixture(scope="session")
def opening_policy(opening_dataset, opening_env):
    lp, _ = train_autoencoder(opening_dataset, opening_env.latent_dim,
                              opening_env, AeParams())
    return lp


@pytest.fixture(scope="session")
def pushing_run(pushing_env):
    return sac.train(pushing_env, sac.SacParams(episodes=60, seed=0))


@pytest.fixture(scope="session")
def pushing_dataset(pushing_run, pushing_env):
    agent, _ = pushing_run
    return collect(agent, pushing_env, episodes=70, seed=0)


@pytest.fixture(scope="session")
def pushing_policy(pushing_dataset, pushing_env):
    lp, _ = train_autoencoder(pushing_dataset, pushing_env.latent_dim,
                              pushing_env, AeParams())
    return lp


@pytest.fixture(scope="session")
def opening_teleop_demos(opening_env):
    goals = operator.default_goals(opening_env, 20, seed=1)
    return operator.synth_demos(opening_env, "teleop", goals, seed=5,
                                episodes=40)


@pytest.fixture(scope="session")
def declutter_policies(declutter_env):
    """Two d=2 decoders trained on a nearest-object partition of scripted
    declutter demonstrations; used by the live-session tests."""
    from latentarm.config import DEFAULT_GROUPS
    from latentarm.latent import partition_dataset

    goals = operator.default_goals(declutter_env, 4, seed=0)
    data = operator.synth_demos(declutter_env, "teleop", goals, seed=11,
                                episodes=40)
    parts = partition_dataset(data, declutter_env, DEFAULT_GROUPS["declutter"])
    out = []
    for i, part in enumerate(parts):
        lp, _ = train_autoencoder(part, 2, declutter_env, AeParams(seed=i))
        out.append(lp)
    return out


@pytest.fixture()
def tiny_dataset(opening_env):
    """Cheap scripted dataset for plumbing tests (no SAC training)."""
    goals = operator.default_goals(opening_env, 3, seed=2)
    return operator.synth_demos(opening_env, "teleop", goals, seed=3,
                                episodes=4)


def rollout_policy(env, agent, seed, stochastic=True):
    """Roll one episode; returns the list of visited states."""
    rng = np.random.default_rng(seed)
    state = envs.reset(env, seed)
    states = [state]
    for _ in range(env.horizon):
        if stochastic:
            a = agent.sample_action_with(state.flat(), rng)
        else:
            a = agent.sample_action(state.flat(), deterministic=True)
        state = envs.step(env, state, a)
        states.append(state)
    return states
