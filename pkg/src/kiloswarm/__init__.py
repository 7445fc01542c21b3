"""kiloswarm: a deterministic, tick-based simulator for Kilobot-style swarms."""
from .api import (
    Controller,
    RobotApi,
    controller_factory,
    go_forward,
    register_controller,
    registered_controllers,
    stop,
    turn_left,
    turn_right,
)
from .comms import ChannelParams, ChannelStats, Message, Reception, deliver_messages
from .config import ConfigError, SimConfig, from_dict, generate_layout, load_config
from .geometry import Pose, normalize_angle
from .neighbors import (
    BRUTE_FORCE_MAX_BOTS,
    NeighborIndex,
    brute_force_range,
    build_index,
    choose_strategy,
    query_range,
)
from .physics import (
    Environment,
    LegGeometry,
    MotionParams,
    MotorCommand,
    clip_to_environment,
    integrate,
    pivot_point,
    resolve_collisions,
    rotate_about_pivot,
    sample_light,
)
from .snapshots import BotRecord, Snapshot, read_snapshots, write_snapshots
from .world import (
    CommandError,
    ControllerError,
    RobotState,
    RunResult,
    SteeringCommand,
    World,
    run,
)
from . import controllers  # noqa: F401  (registers the bundled controllers)

__version__ = "0.1.0"
