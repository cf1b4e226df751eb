#!/usr/bin/env python3
"""Writes the synthetic river-valley scenario into data/valley/.

A north-south river runs down DEM column 20; ground rises 0.45 m per column
away from it. At 13 ft (3.96 m) columns 16..24 flood, at 20 ft (6.10 m)
columns 11..29. A closed basin in the north-east sits below both levels but
is not connected to the river.
"""

import json
import pathlib
import sys

COLS, ROWS = 40, 30
X0, Y0, CELL = -79.03, 34.6, 0.001
RIVER_COL = 20
BASIN = [(c, r) for c in (37, 38) for r in (24, 25)]


def lonlat(u, v):
    """Cell-coordinate point -> [lon, lat], rounded to keep the files tidy."""
    return [round(X0 + u * CELL, 7), round(Y0 + v * CELL, 7)]


def elevation(c, r):
    if (c, r) in BASIN:
        return 3.0
    return round(2.0 + 0.45 * abs(c - RIVER_COL), 2)


def fmt(x):
    return repr(float(x)).removesuffix(".0") if float(x).is_integer() else repr(float(x))


def dem_text():
    lines = [f"ncols {COLS}", f"nrows {ROWS}", f"xllcorner {X0}", f"yllcorner {Y0}",
             f"cellsize {CELL}", "NODATA_value -9999"]
    for r in reversed(range(ROWS)):
        lines.append(" ".join(fmt(elevation(c, r)) for c in range(COLS)))
    return "\n".join(lines) + "\n"


def landcover_text():
    # Half-resolution frame over the same extent.
    cols, rows, cell = COLS // 2, ROWS // 2, CELL * 2
    codes = [[0] * cols for _ in range(rows)]
    codes[7][3] = 1  # standing water over DEM cols 6-7, rows 14-15
    codes[12][18] = 4  # substation footprint, clear of every road
    for r in range(rows):
        codes[r][10] = 1  # river channel as seen from above
    lines = [f"ncols {cols}", f"nrows {rows}", f"xllcorner {X0}", f"yllcorner {Y0}",
             f"cellsize {cell}", "NODATA_value -9999"]
    for r in reversed(range(rows)):
        lines.append(" ".join(str(v) for v in codes[r]))
    return "\n".join(lines) + "\n"


NODES = {
    "A": (33.5, 1.5),
    "P1": (26.5, 8.5),
    "M": (26.5, 15.5),
    "P2": (26.5, 22.5),
    "B": (33.5, 28.5),
    "C1": (36.5, 15.5),
    "W": (13.5, 15.5),
    "W2": (5.5, 15.5),
    "W3": (13.5, 25.5),
}

EDGES = [
    ("r1a", "A", "P1", [], 1.0, "River Road"),
    ("r1b", "P1", "M", [], 1.0, "River Road"),
    ("r1c", "M", "P2", [], 1.0, "River Road"),
    ("r1d", "P2", "B", [], 1.0, "River Road"),
    ("r2a", "A", "C1", [(35.5, 8.5)], 1.5, "Ridge Road"),
    ("r2b", "C1", "B", [(35.5, 22.5)], 1.5, "Ridge Road"),
    ("bridge", "M", "W", [(20.0, 15.5)], 1.0, "Low Bridge"),
    ("w1", "W", "W2", [], 1.0, "West Lane"),
    ("w2", "W", "W3", [], 1.0, "School Lane"),
]

POIS = [
    ("hotel_north", "lodging", (34.0, 28.0), "Northgate Motel"),
    ("hotel_river", "lodging", (22.5, 12.5), "Riverbank Lodge"),
    ("hotel_levee", "lodging", (27.5, 18.5), "Levee Street Hotel"),
    ("shelter_school", "shelter", (33.7, 28.3), "High School Shelter"),
    ("shelter_west", "shelter", (13.0, 25.0), "West Elementary"),
    ("store", "building", (34.0, 2.0), "Corner Grocery"),
]


def roadnet():
    nodes = [{"id": k, "lon": lonlat(*p)[0], "lat": lonlat(*p)[1]} for k, p in NODES.items()]
    edges = []
    for eid, a, b, via, strength, name in EDGES:
        poly = [lonlat(*NODES[a])] + [lonlat(*p) for p in via] + [lonlat(*NODES[b])]
        edges.append({"id": eid, "from": a, "to": b, "polyline": poly,
                      "strength": strength, "name": name})
    pois = [{"id": i, "kind": k, "lon": lonlat(*p)[0], "lat": lonlat(*p)[1], "name": n}
            for i, k, p, n in POIS]
    return {"nodes": nodes, "edges": edges, "pois": pois}


MANIFEST = {
    "name": "valley",
    "dem_path": "dem.asc",
    "class_grid_paths": [
        {"path": "landcover.asc", "legend_path": "landcover.legend.json", "water_class": "water"}
    ],
    "roadnet_path": "roadnet.json",
    "params": {"water_level_ft": 13, "seed_fraction": 0.025, "snap_radius_m": 500},
}

LEGEND = {"0": "other", "1": "water", "2": "building", "3": "road", "4": "infrastructure"}


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/valley")
    out.mkdir(parents=True, exist_ok=True)
    (out / "dem.asc").write_text(dem_text())
    (out / "landcover.asc").write_text(landcover_text())
    (out / "landcover.legend.json").write_text(json.dumps(LEGEND, indent=2) + "\n")
    (out / "roadnet.json").write_text(json.dumps(roadnet(), indent=2) + "\n")
    (out / "manifest.json").write_text(json.dumps(MANIFEST, indent=2) + "\n")


if __name__ == "__main__":
    main()
