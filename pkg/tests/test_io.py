import json
import math

import numpy as np

from kgwave import io as kio


def test_fmt_round_trip():
    for v in (math.pi, 1e-300, -2.5e17, 0.1 + 0.2):
        assert float(kio.fmt(v)) == v
    assert kio.fmt(None) == "" and kio.fmt(True) == "true" and kio.fmt(3) == "3"
    assert kio.fmt(float("nan")) == "nan"


def test_json_handles_numpy():
    text = kio.json_text({"b": np.arange(3), "a": np.float64(0.5), "bad": float("inf")})
    data = json.loads(text)
    assert data == {"a": 0.5, "b": [0, 1, 2], "bad": None}
    assert text.index('"a"') < text.index('"b"')


def test_wave_round_trip(tmp_path, phi6_wave):
    kio.write_wave_csv(tmp_path / "w.csv", phi6_wave)
    kio.write_json(tmp_path / "w.json", kio.wave_json(phi6_wave))
    back = kio.read_wave(tmp_path / "w.csv", tmp_path / "w.json")
    assert back.params == phi6_wave.params
    for a, b in ((back.h, phi6_wave.h), (back.hprime, phi6_wave.hprime), (back.x, phi6_wave.x)):
        scale = np.max(np.abs(b))
        assert np.max(np.abs(a - b)) <= 1e-15 * scale
