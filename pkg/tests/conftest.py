import numpy as np
import pytest

from pitchside.sim import SimConfig, initial_world
from pitchside.sim.state import PlayMode


@pytest.fixture
def cfg():
    return SimConfig()


def make_world(cfg=None, play_mode=PlayMode.PLAY_ON, ball=(0.0, 0.0)):
    """Full 22-agent world with the default spread lineup and the ball placed."""
    world = initial_world(cfg or SimConfig(), play_mode=play_mode)
    world.ball_x, world.ball_y = ball
    return world


def place(world, agent_id, x, y, heading=0.0, mode="stand", speed=0.0):
    agent = world.agent(agent_id)
    agent.x, agent.y = float(x), float(y)
    agent.heading = float(heading)
    agent.mode = mode
    agent.speed = float(speed)
    return agent


def rng(seed=0):
    return np.random.default_rng(seed)
