import os
import pathlib
import shutil
import sys

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
BUILD = pathlib.Path(os.environ.get("SWISS_MWM_BUILD_DIR", ROOT / "build"))

for path in (ROOT / "python", BUILD):
    if str(path) not in sys.path:
        sys.path.insert(0, str(path))


def example_tournament():
    players = [
        {"id": f"p{i}", "name": f"Player {i}", "elo": 2150 - 50 * (i - 1), "lotOrder": i}
        for i in range(1, 9)
    ]
    return {"name": "example", "system": "Dutch", "beta": 2, "players": players, "history": []}


# Winners per round of the eight-player worked example (no draws).
EXAMPLE_WINNERS = [
    {"p1", "p3", "p4", "p6"},
    {"p3", "p4", "p2", "p7"},
    {"p3", "p1", "p2", "p5"},
    {"p3", "p1", "p7", "p6"},
]
EXAMPLE_BOARDS = [
    {("p1", "p5"), ("p2", "p6"), ("p3", "p7"), ("p4", "p8")},
    {("p1", "p3"), ("p4", "p6"), ("p2", "p5"), ("p7", "p8")},
    {("p3", "p4"), ("p1", "p6"), ("p2", "p7"), ("p5", "p8")},
    {("p2", "p3"), ("p1", "p4"), ("p5", "p7"), ("p6", "p8")},
]
EXAMPLE_POINTS = {"p1": 3, "p2": 2, "p3": 4, "p4": 2, "p5": 1, "p6": 2, "p7": 2, "p8": 0}


def board_set(pairing):
    return {tuple(sorted((b["white"], b["black"]))) for b in pairing["boards"]}


def results_for(pairing, winners):
    out = []
    for b in pairing["boards"]:
        if b["white"] in winners:
            r = "1-0"
        elif b["black"] in winners:
            r = "0-1"
        else:
            r = "1/2"
        out.append({"board": b["board"], "result": r})
    return out


@pytest.fixture(scope="session")
def cli_binary():
    candidate = os.environ.get("SWISS_MWM_BIN") or str(BUILD / "swiss-mwm")
    if not os.path.exists(candidate):
        candidate = shutil.which("swiss-mwm")
    if not candidate:
        pytest.skip("swiss-mwm binary not built")
    return candidate
