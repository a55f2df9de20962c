import os
import pathlib

import pytest

import bansim

SRC = pathlib.Path(os.environ.get("BANSIM_SOURCE_DIR", pathlib.Path(__file__).resolve().parents[2]))


def test_rates():
    assert len(bansim.table_names()) == 21
    assert bansim.data_rate("402mhz-r1") == pytest.approx(303.57, abs=0.01)
    assert "2400mhz-971" in bansim.config_names()


def test_efficiency_curve_rises():
    curve = bansim.efficiency_curve("420mhz-r1")
    assert len(curve) == 255
    assert all(b > a for a, b in zip(curve, curve[1:]))
    assert curve[-1] == pytest.approx(bansim.efficiency("420mhz-r1", 255))


def test_frame_round_trip_and_corruption():
    bits = bansim.build_frame("hbc16", b"\x01\x02\x03")
    back = bansim.parse_frame("hbc16", bits)
    assert back["body"] == b"\x01\x02\x03"
    bits[len(bits) // 2] ^= 1
    with pytest.raises(bansim.BansimError):
        bansim.parse_frame("hbc16", bits)


def test_kasami_member():
    chips = bansim.kasami(3)
    assert len(chips) == 63
    assert set(chips) <= {-1, 1}


def test_simulate_is_deterministic():
    text = (SRC / "scenarios" / "contention_four_nodes.ini").read_text()
    a = bansim.simulate(text, seed=5)
    b = bansim.simulate(text, seed=5)
    assert a["stats_csv"] == b["stats_csv"]
    assert a["trace_csv"] == b["trace_csv"]
    assert a["aggregate"]["delivered"] == sum(n["delivered"] for n in a["nodes"])


def test_bad_scenario_raises():
    with pytest.raises(bansim.BansimError, match="line 2"):
        bansim.simulate("[phy]\nbogus = 1\n")


def test_cli():
    rc, out, err = bansim.cli(["efficiency", "--config", "420mhz-r1", "--payload", "255"])
    assert rc == 0
    assert out.splitlines()[1].startswith("420mhz,151.8,255,")
