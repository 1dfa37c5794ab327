"""Bundled example games and reference profiles.

* ``ebos`` - extended battle of the sexes: player 1 may upgrade before a
  coordination round; the bundled profile mixes the two coordinated
  no-upgrade outcomes evenly.
* ``lrr`` - a one-player two-level game; the bundled profile is the behavior
  strategy (0.9 L + 0.1 R, R').
* ``surj`` - chance splits between a matching-pennies round and a
  coordination round with a dominant exit; the bundled profile correlates
  player 2 with player 1 in the exit-shadowed subtree.
"""

from importlib import resources

from ..game import Game, parse_game
from ..strategy import MixtureOfProducts, parse_profile

GAMES = ("ebos", "lrr", "surj")

_PROFILE_FILES = {
    "ebos": "ebos.profile.json",
    "lrr": "lrr.behavior.json",
    "surj": "surj.profile.json",
}


def fixture_text(filename: str) -> str:
    return resources.files(__package__).joinpath(filename).read_text(encoding="utf-8")


def load_game(name: str) -> Game:
    if name not in GAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {GAMES}")
    return parse_game(fixture_text(f"{name}.game.json"))


def load_profile(game: Game, name: str,
                 behavior_mode: str = "expand") -> MixtureOfProducts:
    """The reference correlated profile bundled with fixture ``name``.

    The lrr profile ships in behavior form; by default it loads as the
    product distribution it denotes (behavior_mode="decompose" gives the
    small-support form instead).
    """
    if name not in _PROFILE_FILES:
        raise KeyError(f"no bundled profile for {name!r}")
    return parse_profile(game, fixture_text(_PROFILE_FILES[name]), behavior_mode)
