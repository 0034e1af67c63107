"""Reader/writer for the EUC_2D subset of TSPLIB, plus JSON sidecar metadata."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from .core import DistanceMode, Instance
from .errors import InvalidInputError

log = logging.getLogger(__name__)


def parse_tsplib(text: str, *, group: str = "custom", metric: DistanceMode = DistanceMode.ROUNDED) -> Instance:
    header = {}
    coords = {}
    in_coords = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line == "EOF":
            break
        if in_coords:
            parts = line.split()
            if len(parts) != 3:
                raise InvalidInputError(f"line {lineno}: expected '<index> <x> <y>', got {line!r}")
            try:
                idx = int(parts[0])
                x, y = float(parts[1]), float(parts[2])
            except ValueError as e:
                raise InvalidInputError(f"line {lineno}: {e}") from None
            if idx in coords:
                raise InvalidInputError(f"line {lineno}: repeated node index {idx}")
            coords[idx] = (x, y)
            continue
        if line.startswith("NODE_COORD_SECTION"):
            in_coords = True
            continue
        if ":" not in line:
            raise InvalidInputError(f"line {lineno}: malformed header {line!r}")
        key, value = line.split(":", 1)
        header[key.strip().upper()] = value.strip()

    if header.get("TYPE", "TSP") != "TSP":
        raise InvalidInputError(f"unsupported TYPE {header['TYPE']!r}")
    if header.get("EDGE_WEIGHT_TYPE", "EUC_2D") != "EUC_2D":
        raise InvalidInputError(f"unsupported EDGE_WEIGHT_TYPE {header['EDGE_WEIGHT_TYPE']!r}")
    n = len(coords)
    if "DIMENSION" in header and int(header["DIMENSION"]) != n:
        raise InvalidInputError(f"DIMENSION {header['DIMENSION']} but {n} coordinates")
    if sorted(coords) != list(range(1, n + 1)):
        raise InvalidInputError("node indices must be exactly 1..n")
    arr = np.array([coords[i] for i in range(1, n + 1)], dtype=np.float64)
    inst = Instance(header.get("NAME", "unnamed"), arr, group, metric)
    if inst.has_duplicates():
        log.warning("instance %s contains duplicate points", inst.id)
    return inst


def read_tsplib(path, **kwargs) -> Instance:
    path = Path(path)
    inst = parse_tsplib(path.read_text(), **kwargs)
    side = sidecar_path(path)
    if side.exists():
        meta = json.loads(side.read_text())
        inst = Instance(meta.get("id", inst.id), inst.coords, meta.get("group", inst.group),
                        inst.metric, meta)
    return inst


def format_tsplib(inst: Instance, comment: str | None = None) -> str:
    lines = [f"NAME : {inst.id}"]
    if comment:
        lines.append(f"COMMENT : {comment}")
    lines += ["TYPE : TSP", f"DIMENSION : {inst.n}", "EDGE_WEIGHT_TYPE : EUC_2D", "NODE_COORD_SECTION"]
    ints = np.rint(inst.coords).astype(np.int64)
    lines += [f"{i} {x} {y}" for i, (x, y) in enumerate(ints.tolist(), 1)]
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def sidecar_path(path) -> Path:
    return Path(path).with_suffix(".json")


def write_tsplib(inst: Instance, path, *, sidecar: bool = True) -> Path:
    path = Path(path)
    path.write_text(format_tsplib(inst))
    if sidecar:
        meta = {"id": inst.id, "group": inst.group, **{k: v for k, v in inst.meta.items() if k not in ("id", "group")}}
        sidecar_path(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return path
