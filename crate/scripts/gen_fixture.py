"""Generate the synthetic three-user GeoLife corpus (two labeled) used by the CLI tests.

Layout mirrors the public dataset: Data/<user>/Trajectory/*.plt plus
Data/<user>/labels.txt. Each user gets a timeline of labeled segments with
mode-specific speed and turning behaviour, separated by unlabeled gaps.
Some segments are deliberately too short, some use modes outside the four
classes. The expected ingestion counts follow from the construction and are
written next to the data as expected.json.
"""

import datetime as dt
import json
import math
import pathlib
import random
import shutil

ROOT = pathlib.Path(__file__).resolve().parent.parent / "crates/cli/tests/fixtures/geolife"
EPOCH = dt.datetime(1899, 12, 30)
HEADER = "Geolife trajectory\nWGS 84\nAltitude is in Feet\nReserved 3\n0,2,255,My Track,0,0,2,8421376\n0\n"

# metres per second and heading noise (radians per step)
MODES = {
    "walk": (1.4, 0.6),
    "walking": (1.4, 0.6),
    "bike": (4.0, 0.25),
    "bus": (7.0, 0.08),
    "car": (12.0, 0.05),
    "taxi": (11.0, 0.05),
    "airplane": (200.0, 0.01),
    "train": (25.0, 0.02),
}
CANONICAL = {"walk": "walk", "walking": "walk", "bike": "bike", "bus": "bus", "car": "car_taxi", "taxi": "car_taxi"}
M_PER_DEG = 111_320.0


def segment(rng, mode, start, n, lat, lon):
    speed, turn = MODES[mode]
    heading = rng.uniform(0, 2 * math.pi)
    pts = []
    t = start
    for i in range(n):
        pts.append((lat, lon, t))
        v = speed * rng.uniform(0.6, 1.4)
        if mode == "bus" and rng.random() < 0.2:
            v = 0.0  # stop
        heading += rng.gauss(0, turn)
        step = v * 5.0 / M_PER_DEG
        lat += step * math.cos(heading)
        lon += step * math.sin(heading) / math.cos(math.radians(lat))
        t += dt.timedelta(seconds=5)
    return pts, lat, lon


def plt_line(p):
    lat, lon, t = p
    days = (t - EPOCH).total_seconds() / 86400.0
    return f"{lat:.6f},{lon:.6f},0,{random.randint(50, 500)},{days:.10f},{t:%Y-%m-%d},{t:%H:%M:%S}\n"


def build_user(user, seed, plan):
    rng = random.Random(seed)
    random.seed(seed)
    t = dt.datetime(2008, 4, 1, 8, 0, 0) + dt.timedelta(days=seed)
    lat, lon = 39.9 + rng.uniform(-0.05, 0.05), 116.3 + rng.uniform(-0.05, 0.05)
    points, labels = [], []
    counts = {"walk": 0, "bike": 0, "bus": 0, "car_taxi": 0}
    dropped_short, dropped_modes, unlabeled = {}, {}, 0
    for mode, n in plan:
        pts, lat, lon = segment(rng, mode, t, n, lat, lon)
        points += pts
        labels.append((pts[0][2], pts[-1][2], mode))
        canon = CANONICAL.get(mode)
        if canon is None:
            dropped_modes[mode] = dropped_modes.get(mode, 0) + 1
        elif n < 10:
            dropped_short[canon] = dropped_short.get(canon, 0) + 1
        else:
            counts[canon] += 1
        t = pts[-1][2] + dt.timedelta(seconds=60)
        # an unlabeled stretch between some segments
        if rng.random() < 0.3:
            k = rng.randint(1, 6)
            gap, lat, lon = segment(rng, "walk", t, k, lat, lon)
            points += gap
            unlabeled += k
            t = gap[-1][2] + dt.timedelta(seconds=60)
        t += dt.timedelta(minutes=rng.randint(1, 30))

    d = ROOT / "Data" / user
    (d / "Trajectory").mkdir(parents=True)
    # split into files by day-sized chunks, written in reverse name order so
    # that ingestion has to sort by time rather than trust file order
    chunks = [points[i : i + 400] for i in range(0, len(points), 400)]
    for i, chunk in enumerate(chunks):
        name = f"2008{seed:02}{len(chunks) - i:02}000000.plt"
        (d / "Trajectory" / name).write_text(HEADER + "".join(plt_line(p) for p in chunk))
    lines = ["Start Time\tEnd Time\tTransportation Mode\n"]
    lines += [f"{a:%Y/%m/%d %H:%M:%S}\t{b:%Y/%m/%d %H:%M:%S}\t{m}\n" for a, b, m in labels]
    (d / "labels.txt").write_text("".join(lines))
    return counts, dropped_short, dropped_modes, unlabeled


def plan_for(rng):
    plan = []
    for mode, k in [("walk", 6), ("walking", 3), ("bike", 8), ("bus", 8), ("car", 4), ("taxi", 4)]:
        plan += [(mode, rng.randint(20, 140)) for _ in range(k)]
    plan += [("bike", rng.randint(3, 9)), ("walk", 9), ("airplane", 30), ("train", 40)]
    rng.shuffle(plan)
    return plan


def main():
    if ROOT.exists():
        shutil.rmtree(ROOT)
    rng = random.Random(7)
    total = {"walk": 0, "bike": 0, "bus": 0, "car_taxi": 0}
    short, modes, unlabeled = {}, {}, 0
    for i, user in enumerate(["000", "001"]):
        c, s, m, u = build_user(user, i + 1, plan_for(rng))
        for k, v in c.items():
            total[k] += v
        for k, v in s.items():
            short[k] = short.get(k, 0) + v
        for k, v in m.items():
            modes[k] = modes.get(k, 0) + v
        unlabeled += u
    # a user without labels.txt is counted but contributes nothing
    nolabel = ROOT / "Data" / "002" / "Trajectory"
    nolabel.mkdir(parents=True)
    (nolabel / "20080101000000.plt").write_text(HEADER + "39.9,116.3,0,100,39448.0,2008-01-01,00:00:00\n")
    expected = {
        "users_total": 3,
        "users_labeled": 2,
        "trajectories": total,
        "total": sum(total.values()),
        "dropped_short": short,
        "dropped_modes": modes,
        "unlabeled_points": unlabeled,
    }
    (ROOT / "expected.json").write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n")
    print(json.dumps(expected))


if __name__ == "__main__":
    main()
