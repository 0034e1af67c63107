import json
import logging

import numpy as np
import pytest

from tspanytime.core import Instance
from tspanytime.errors import InvalidInputError
from tspanytime.generators import GeneratorConfig, gen_netgen
from tspanytime.tsplib import format_tsplib, parse_tsplib, read_tsplib, write_tsplib

TEXT = """NAME : tiny
COMMENT : hand written
TYPE : TSP
DIMENSION : 4
EDGE_WEIGHT_TYPE : EUC_2D
NODE_COORD_SECTION
1 0 0
2 0 10
3 10 10
4 10 0
EOF
"""


def test_parse():
    inst = parse_tsplib(TEXT)
    assert inst.id == "tiny" and inst.n == 4
    assert inst.coords[2].tolist() == [10.0, 10.0]


@pytest.mark.parametrize("bad", [
    TEXT.replace("DIMENSION : 4", "DIMENSION : 5"),
    TEXT.replace("EUC_2D", "GEO"),
    TEXT.replace("TYPE : TSP", "TYPE : ATSP"),
    TEXT.replace("4 10 0", "5 10 0"),
    TEXT.replace("4 10 0", "4 ten 0"),
    TEXT.replace("NAME : tiny", "NAME tiny"),
])
def test_parse_rejects(bad):
    with pytest.raises(InvalidInputError):
        parse_tsplib(bad)


def test_duplicate_points_warn(caplog):
    with caplog.at_level(logging.WARNING):
        inst = parse_tsplib(TEXT.replace("4 10 0", "4 0 0"))
    assert inst.has_duplicates()
    assert "duplicate" in caplog.text


def test_round_trip_with_sidecar(tmp_path):
    inst = gen_netgen(GeneratorConfig(4, 40))
    path = write_tsplib(inst, tmp_path / "x.tsp")
    back = read_tsplib(path)
    assert back.id == inst.id and back.group == "netgen"
    assert np.array_equal(back.coords, inst.coords)
    assert back.meta["cluster_sizes"] == inst.meta["cluster_sizes"]
    assert json.loads((tmp_path / "x.json").read_text())["seed"] == 4
    assert format_tsplib(back) == format_tsplib(inst)


def test_write_is_deterministic(tmp_path):
    inst = Instance("sq", [(0, 0), (0, 10), (10, 10), (10, 0)])
    a = write_tsplib(inst, tmp_path / "a.tsp").read_bytes()
    b = write_tsplib(inst, tmp_path / "b.tsp").read_bytes()
    assert a == b
