import csv
import json

import numpy as np
import pytest

from clifford_doubling import export as ex
from clifford_doubling.ambient import phi_map
from clifford_doubling.meshops import edge_topology
from clifford_doubling.models import flat_square


def test_stereographic_pole_and_equator():
    X = np.array([[0.0, 0.0, 1.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]])
    P = ex.stereographic(X)
    assert np.allclose(P, [[0, 0, 0], [1, 0, 0], [0, 0, 1]])
    with pytest.raises(ValueError):
        ex.stereographic(np.array([[0.0, 0.0, -1.0, 0.0]]))


def test_stereographic_is_conformal_inverse():
    # inverse map: P -> (2P, |P|^2 - 1) reordered, on the unit sphere
    rng = np.random.default_rng(0)
    X = phi_map(np.column_stack([rng.uniform(-1, 1, 30), rng.uniform(-1, 1, 30), rng.uniform(-0.5, 0.5, 30)]))
    P = ex.stereographic(X)
    s = np.sum(P ** 2, axis=1)
    Y = np.column_stack([2 * P[:, 0], 2 * P[:, 1], 1 - s, 2 * P[:, 2]]) / (1 + s)[:, None]
    assert np.allclose(Y, X, atol=1e-12)


def test_json_sorted_and_finite():
    txt = ex.dumps_report({"b": np.float64(np.nan), "a": np.arange(3), "c": np.bool_(True)})
    d = json.loads(txt)
    assert list(d) == ["a", "b", "c"]
    assert d["b"] == "nan" and d["a"] == [0, 1, 2] and d["c"] is True


def test_obj_cell(tmp_path, mesh6):
    path = ex.write_obj(mesh6, tmp_path / "cell.obj")
    lines = path.read_text().splitlines()
    assert sum(l.startswith("v ") for l in lines) == mesh6.n
    assert sum(l.startswith("f ") for l in lines) == len(mesh6.tri)


def test_obj_model_mesh(tmp_path):
    sq = flat_square(4)
    lines = ex.write_obj(sq, tmp_path / "sq.obj").read_text().splitlines()
    assert sum(l.startswith("v ") for l in lines) == sq.n
    with pytest.raises(ValueError):
        ex.write_obj(sq, tmp_path / "t.obj", tile=True)


def test_tiling_closes_surface(mesh6):
    X, T = ex.tile_cells(mesh6.X, mesh6.tri, 6, mesh6.params.d)
    _, count = edge_topology(T)
    assert count.min() == 2 and count.max() == 2
    assert len(X) - len(count) + len(T) == 2 - 2 * 37


def test_csv_tables(tmp_path, mesh6):
    rows = ex.mesh_rows(mesh6, np.zeros(mesh6.n))
    p = ex.write_csv(rows, tmp_path / "v.csv")
    with p.open() as fh:
        got = list(csv.DictReader(fh))
    assert len(got) == mesh6.n
    assert {"X0", "X3", "chart", "t_under", "phi"} <= set(got[0])
    h = ex.history_rows([{"residual_H": 1.0, "F": 0.1, "zeta": 0.0, "mu": 0.0}])
    assert h[0]["iteration"] == 0
    f = ex.force_rows({"pieces": {"0": -1.0}, "F_boundary": 2.0})
    assert [r["piece"] for r in f] == ["0", "F_boundary"]
