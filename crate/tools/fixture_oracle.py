#!/usr/bin/env python3
"""Generate the bundled scenario fixtures and their golden correction traces.

The correction here is an independent NumPy implementation of the pipeline
(goal-mouth region, goal frame choice, direction classification, mirroring,
blocking joint, rigid translation, in-place quadratic sweeps outward
from the goal frame). Its output is frozen into crates/core/fixtures/golden/
and the Rust implementation is checked against it.

Usage: python3 tools/fixture_oracle.py
"""

import json
import math
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "crates" / "core" / "fixtures"

JOINTS = [
    "head", "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
    "left_wrist", "right_wrist", "left_hip", "right_hip", "left_knee",
    "right_knee", "left_ankle", "right_ankle",
]
COUNTERPART = [0, 2, 1, 4, 3, 6, 5, 8, 7, 10, 9, 12, 11]
N = 10

# keeper's left is image +x (keeper faces the camera)
READY = np.array([
    (0.00, -0.40), (0.09, -0.28), (-0.09, -0.28), (0.15, -0.16), (-0.15, -0.16),
    (0.17, -0.04), (-0.17, -0.04), (0.06, 0.02), (-0.06, 0.02), (0.08, 0.18),
    (-0.08, 0.18), (0.09, 0.34), (-0.09, 0.34),
])

BALL_Y = [0.85, 0.72, 0.58, 0.42, 0.12, -0.05, -0.12, -0.10, 0.00, 0.15]


def progress(f):
    u = min(max((f - 1) / 5.0, 0.0), 1.0)
    return u * u * (3 - 2 * u)


def pose(f, direction, reach, tilt):
    p = progress(f)
    hips = (READY[7] + READY[8]) / 2
    theta = direction * p * tilt
    c, s = math.cos(theta), math.sin(theta)
    rel = READY - hips
    rot = np.stack([rel[:, 0] * c - rel[:, 1] * s, rel[:, 0] * s + rel[:, 1] * c], axis=1)
    out = rot + hips + np.array([direction * p * reach, -0.04 * p])
    jitter = np.array([[0.002 * math.sin(1.7 * f + j), 0.002 * math.cos(1.3 * f + 2 * j)] for j in range(13)])
    return out + jitter


def fixture(source_id, ball_x, direction, reach, tilt):
    frames = []
    for f in range(N):
        sk = pose(f, direction, reach, tilt)
        frames.append({
            "index": f,
            "time": round(0.1 * f, 10),
            "joints": {name: {"x": float(sk[j, 0]), "y": float(sk[j, 1])} for j, name in enumerate(JOINTS)},
            "ball": {"x": ball_x[f], "y": BALL_Y[f]},
            "ball_radius": 0.015,
        })
    return {
        "schema_version": 1,
        "source_id": source_id,
        "label": "hit",
        "dims": {"width": 1280, "height": 720},
        "frames": frames,
    }


# ---------------------------------------------------------------- oracle


def track_of(doc):
    sk = np.array([[[fr["joints"][n]["x"], fr["joints"][n]["y"]] for n in JOINTS] for fr in doc["frames"]])
    ball = np.array([[fr["ball"]["x"], fr["ball"]["y"]] for fr in doc["frames"]])
    return sk, ball


def goal_region(first, side=0.35, above=0.15):
    ls, rs = first[1, 0], first[2, 0]
    return (min(ls, rs) - side, max(ls, rs) + side, first[0, 1] - above, max(first[11, 1], first[12, 1]))


def rect_distance(region, p):
    left, right, top, bottom = region
    dx = max(left - p[0], 0.0, p[0] - right)
    dy = max(top - p[1], 0.0, p[1] - bottom)
    return math.hypot(dx, dy)


def choose_goal(ball, region):
    for i in range(1, N):
        if rect_distance(region, ball[i]) == 0.0:
            return i
    return min(range(1, N), key=lambda i: (rect_distance(region, ball[i]), i))


def hipmid(s):
    return (s[7] + s[8]) / 2


def classify(sk, ball, g, eb=0.08, ek=0.05):
    bdx = ball[g, 0] - ball[0, 0]
    kdx = hipmid(sk[g])[0] - hipmid(sk[0])[0]
    if abs(bdx) < eb:
        return "minimal_movement"
    if (bdx > 0) == (kdx > 0) and abs(kdx) >= ek:
        return "same_direction"
    return "opposite_direction"


def mirror(s):
    h = s[0]
    d = hipmid(s) - h
    d = d / np.linalg.norm(d)
    # reflection matrix 2dd^T - I about the head
    R = 2 * np.outer(d, d) - np.eye(2)
    swapped = s[COUNTERPART]
    return (swapped - h) @ R.T + h


def neighbors(i, g):
    # brute force: nearest usable frames, same side of the goal first, then lower index
    pool = [k for k in range(N) if k not in (i, g)]
    pool.sort(key=lambda k: (abs(k - i), (k < g) != (i < g), k))
    rule = None
    if i == N - 1 or i + 1 == g:
        rule = (i - 2, i - 1)
    elif i - 1 == g:
        rule = (i + 1, i + 2)
    else:
        rule = (i - 1, i + 1)
    if all(0 <= k < N and k not in (i, g) for k in rule):
        return rule
    return tuple(sorted(pool[:2]))


def lagrange(ts, vs, t):
    # solve the Vandermonde system instead of using basis polynomials
    A = np.array([[1.0, x, x * x] for x in ts])
    c = np.linalg.solve(A, np.array(vs))
    return c[0] + c[1] * t + c[2] * t * t


def correct(doc, iterations=10, tol=1e-6):
    sk, ball = track_of(doc)
    region = goal_region(sk[0])
    g = choose_goal(ball, region)
    direction = classify(sk, ball, g)
    src = mirror(sk[g]) if direction == "opposite_direction" else sk[g].copy()
    dist = np.linalg.norm(src - ball[g], axis=1)
    bj = int(np.argmin(dist))
    goal = src + (ball[g] - src[bj])
    goal[bj] = ball[g]
    track = sk.copy()
    track[g] = goal
    trace = []
    for _ in range(iterations):
        moved = 0.0
        for f in sorted(range(1, N), key=lambda k: (abs(k - g), k)):
            if f == g:
                continue
            a, b = neighbors(f, g)
            for j in range(13):
                for ax in range(2):
                    new = lagrange([a, b, g], [track[a, j, ax], track[b, j, ax], goal[j, ax]], f)
                    moved = max(moved, abs(new - track[f, j, ax]))
                    track[f, j, ax] = new
        trace.append(moved)
        if moved < tol:
            break
    return {
        "goal_index": g,
        "direction": direction,
        "blocking_joint": JOINTS[bj],
        "mirrored": direction == "opposite_direction",
        "max_displacement": trace,
        "corrected": [[[float(v) for v in track[f, j]] for j in range(13)] for f in range(N)],
    }


def main():
    specs = {
        "same_direction": ([0.02, -0.06, -0.14, -0.22, -0.32, -0.36, -0.38, -0.39, -0.39, -0.39], -1, 0.18, 1.0),
        "opposite_direction": ([0.02, 0.08, 0.15, 0.23, 0.33, 0.37, 0.39, 0.40, 0.40, 0.40], -1, 0.18, 1.0),
        "minimal_movement": ([0.00, 0.01, 0.01, 0.02, 0.03, 0.03, 0.03, 0.03, 0.03, 0.03], 1, 0.12, 0.5),
    }
    (FIXTURES / "golden").mkdir(parents=True, exist_ok=True)
    for name, (ball_x, direction, reach, tilt) in specs.items():
        doc = fixture(name, ball_x, direction, reach, tilt)
        (FIXTURES / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")
        golden = correct(doc)
        assert golden["direction"] == name, (name, golden["direction"])
        (FIXTURES / "golden" / f"{name}.json").write_text(json.dumps(golden, indent=1) + "\n")
        print(name, golden["goal_index"], golden["blocking_joint"], ["%.3g" % d for d in golden["max_displacement"]])


if __name__ == "__main__":
    main()
