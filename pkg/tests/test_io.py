import struct

import numpy as np
import pytest

from fkdv.io import (HEADER, ConfigError, build_data, check_keys, config_hash, load_yaml, parse_grid,
                     parse_model, parse_stepper, read_snapshot, write_snapshot)
from fkdv.propagator import ModelParams
from fkdv.spectral import Field, make_grid

from conftest import random_field

BO = ModelParams.single(1.0, 2, 1)


@pytest.mark.parametrize("d,n", [(1, 64), (2, 16)])
def test_snapshot_round_trip(tmp_path, d, n):
    u = random_field(make_grid(d, n, 3.5), 7)
    path = tmp_path / "s.bin"
    write_snapshot(path, u, 0.75)
    back, a = read_snapshot(path)
    assert a == 0.75 and back.grid == u.grid
    assert np.array_equal(back.values, u.values)


def test_snapshot_layout(tmp_path):
    u = Field.from_values(make_grid(1, 8, 2.0), np.arange(8.0))
    path = tmp_path / "s.bin"
    write_snapshot(path, u, 1.0)
    raw = path.read_bytes()
    assert HEADER.size == 32 and len(raw) == 32 + 8 * 8
    assert raw[:4] == b"FKDV"
    assert struct.unpack_from("<III", raw, 4) == (1, 1, 8)
    assert struct.unpack_from("<dd", raw, 16) == (2.0, 1.0)
    assert struct.unpack_from("<d", raw, 32 + 8 * 3) == (3.0,)


def test_snapshot_corruption(tmp_path):
    u = Field.zeros(make_grid(1, 8, 1.0))
    path = tmp_path / "s.bin"
    write_snapshot(path, u, 1.0)
    raw = path.read_bytes()
    (tmp_path / "short.bin").write_bytes(raw[:-8])
    (tmp_path / "magic.bin").write_bytes(b"XXXX" + raw[4:])
    for name in ("short.bin", "magic.bin"):
        with pytest.raises(ValueError):
            read_snapshot(tmp_path / name)


def test_yaml_hash_is_of_the_bytes(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("model: {a: 1.0}\n")
    tree, digest = load_yaml(p)
    assert tree == {"model": {"a": 1.0}} and len(digest) == 64
    p.write_text("model: {a: 1.0}  # comment\n")
    assert load_yaml(p)[1] != digest


def test_yaml_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_yaml(tmp_path / "missing.yaml")
    (tmp_path / "list.yaml").write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_yaml(tmp_path / "list.yaml")


def test_config_hash_ignores_key_order():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": (1, 2), "a": 1})


def test_missing_key_is_named():
    with pytest.raises(ConfigError, match=r"model\.a"):
        parse_model({"nonlinearities": [[2, 1]]})


def test_unknown_key_is_named():
    with pytest.raises(ConfigError, match=r"grid\.nn"):
        parse_grid({"n": 64, "half_length": 1.0, "nn": 3}, 1)
    with pytest.raises(ConfigError):
        check_keys([1, 2], "x")


def test_model_forms():
    m = parse_model({"a": 0.5, "d": 2, "nonlinearities": [{"k": 2, "nu": 1}, [3, -1]]})
    assert m == ModelParams(0.5, ((2, 1), (3, -1)), 2)
    assert parse_model({"a": 1}, need_nonlinearity=False).nonlinearities == ((2, 1),)
    with pytest.raises(ConfigError, match="model"):
        parse_model({"a": 3.0, "nonlinearities": [[2, 1]]})


def test_stepper_accepts_numeric_strings():
    cfg = parse_stepper({"dt": "1e-3", "t_end": 1, "scheme": "ifrk4"})
    assert cfg.dt == 1e-3 and cfg.scheme == "ifrk4"
    with pytest.raises(ConfigError):
        parse_stepper({"dt": "fast", "t_end": 1})
    with pytest.raises(ConfigError):
        parse_stepper({"dt": -1, "t_end": 1})


class TestData:
    grid = make_grid(1, 256, 10.0)

    def test_gaussian(self):
        u = build_data({"kind": "gaussian", "center": 1.0, "width": 2.0, "amplitude": 3.0}, self.grid, BO)
        x = self.grid.x1d
        assert np.allclose(u.values, 3 * np.exp(-((x - 1) ** 2) / 4), rtol=0, atol=1e-15)

    def test_derivative_gaussian_has_zero_mean(self):
        u = build_data({"kind": "derivative_gaussian"}, self.grid, BO)
        assert abs(self.grid.integrate(u.values)) < 1e-14
        x = self.grid.x1d
        assert np.allclose(u.values, -2 * x * np.exp(-x**2), rtol=0, atol=1e-15)

    def test_two_dimensional_axis(self):
        g = make_grid(2, 32, 6.0)
        u = build_data({"kind": "derivative_gaussian", "axis": 1, "center": [0, 0]}, g,
                       ModelParams.single(1.0, d=2))
        x, y = g.coords
        assert np.allclose(u.values, -2 * y * np.exp(-x**2 - y**2), atol=1e-15)
        with pytest.raises(ConfigError):
            build_data({"kind": "gaussian", "center": [0]}, g, ModelParams.single(1.0, d=2))

    def test_groundstate(self):
        g = make_grid(1, 512, 40.0)
        u = build_data({"kind": "groundstate"}, g, ModelParams.single(2.0))
        assert np.max(np.abs(u.values - 3 / np.cosh(g.x1d / 2) ** 2)) < 1e-6

    def test_file(self, tmp_path):
        u = random_field(self.grid, 3)
        write_snapshot(tmp_path / "u.bin", u, 1.0)
        back = build_data({"kind": "file", "path": "u.bin"}, self.grid, BO, base_dir=tmp_path)
        assert np.array_equal(back.values, u.values)
        with pytest.raises(ConfigError, match="does not match"):
            build_data({"kind": "file", "path": "u.bin"}, make_grid(1, 128, 10.0), BO, base_dir=tmp_path)

    def test_zero_and_bad_kind(self):
        assert not build_data({"kind": "zero"}, self.grid, BO).values.any()
        with pytest.raises(ConfigError, match="kind"):
            build_data({"kind": "square"}, self.grid, BO)
        with pytest.raises(ConfigError, match="width"):
            build_data({"kind": "gaussian", "width": 0}, self.grid, BO)
