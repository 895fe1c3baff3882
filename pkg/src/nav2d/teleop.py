"""Keyboard teleoperation.

The key table lives in keymap.json (shared verbatim with the web UI):
direction keys carry a (v, w) sign pattern, speed keys carry a pair of
multipliers for the stored linear/angular speeds. The emitted twist is
always sign pattern * stored speed * scale.

    i  forward            ,  backward
    j  spin left          l  spin right
    u  forward-arc left   o  forward-arc right
    m  backward-arc left  .  backward-arc right
    k  stop               space  stop
    q/z  both speeds x1.1 / x0.9
    w/x  linear only      e/c  angular only
"""

import json
from dataclasses import dataclass, replace
from importlib import resources

from .core import Twist2D

DEFAULT_SCALE_LINEAR = 5.0
DEFAULT_SCALE_ANGULAR = 5.0


def load_keymap() -> dict:
    """The key table as shipped (and as served to the web UI)."""
    with resources.files("nav2d").joinpath("keymap.json").open("rb") as f:
        return json.load(f)


_KEYMAP = load_keymap()
DIRECTION_KEYS = {k: tuple(v) for k, v in _KEYMAP["directions"].items()}
SPEED_KEYS = {k: tuple(v) for k, v in _KEYMAP["speeds"].items()}


@dataclass(frozen=True)
class TeleopState:
    """Stored speeds, their scale factors, and the active sign pattern."""

    linear_speed: float = 1.0
    angular_speed: float = 1.0
    scale_linear: float = DEFAULT_SCALE_LINEAR
    scale_angular: float = DEFAULT_SCALE_ANGULAR
    sign_v: int = 0
    sign_w: int = 0

    def twist(self) -> Twist2D:
        return Twist2D(self.sign_v * self.linear_speed * self.scale_linear,
                       self.sign_w * self.angular_speed * self.scale_angular)


def teleop_key_to_command(key: str, state: TeleopState):
    """Apply one keypress; returns (twist, new state).

    Unknown keys change nothing and re-emit the current twist.
    """
    if key in DIRECTION_KEYS:
        sv, sw = DIRECTION_KEYS[key]
        state = replace(state, sign_v=sv, sign_w=sw)
    elif key in SPEED_KEYS:
        ml, ma = SPEED_KEYS[key]
        state = replace(state, linear_speed=state.linear_speed * ml,
                        angular_speed=state.angular_speed * ma)
    return state.twist(), state
