import json
import math

import pytest

import tracelab


def test_disc_ratio_is_two_over_radius():
    r = tracelab.disc_mode(2.0, 3, 2)
    assert r.domain_kind == "disc"
    assert r.indices == [3, 2]
    assert r.ratio == pytest.approx(1.0, abs=1e-12)
    assert tracelab.trace_norm(r) / r.eigenvalue == pytest.approx(1.0, rel=1e-10)
    assert tracelab.rellich_residual(r) < 1e-10


def test_rectangle_ratio_between_bounds():
    for m in range(1, 6):
        for n in range(1, 6):
            r = tracelab.rectangle_mode(1.0, 2.0, m, n)
            assert 2.0 <= r.ratio <= 4.0


def test_record_json_round_trip():
    line = tracelab.hemisphere_mode(21).to_json("modes")
    doc = json.loads(line)
    assert doc["schema_version"] == tracelab.SCHEMA_VERSION == 1
    assert doc["kind"] == "eigenmode"
    assert tracelab.roundtrip_line(line) == line
    with pytest.raises(ValueError):
        tracelab.roundtrip_line(line.replace('"schema_version":1', '"schema_version":9'))


def test_bad_arguments_raise_value_error():
    with pytest.raises(ValueError):
        tracelab.disc_mode(-1.0, 0, 1)


def test_neumann_identity():
    out = tracelab.neumann_identity(4, 2)
    assert out["residual"] < 1e-8
    assert out["boundary_norm_sq"] >= 2.0


def test_fem_square_ground_state():
    pairs = tracelab.fem_eigs([(0, 0), (1, 0), (1, 1), (0, 1)], h=1 / 16, count=3)
    exact = 2 * math.pi**2
    assert pairs[0]["eigenvalue"] >= exact
    assert pairs[0]["eigenvalue"] == pytest.approx(exact, rel=0.02)
    assert pairs[0]["psi_norm_sq"] == pytest.approx(4 * exact, rel=0.05)
    assert [p["eigenvalue"] for p in pairs] == sorted(p["eigenvalue"] for p in pairs)


def test_band_and_profile():
    out = tracelab.band_scaling("spherical", 0.5, list(range(10, 20)))
    assert out["slope"] < 0
    prof = tracelab.collar_profile(tracelab.disc_mode(1.0, 0, 3), 0.5, 64)
    assert len(prof["r"]) == len(prof["E"]) == len(prof["L"]) == 64
    assert prof["E"][0] == pytest.approx(prof["psi_norm_sq"] / 2, rel=1e-6)


def test_cli_in_process():
    code, recs = tracelab.cli_records("modes", "--domain", "disc", "--n", "0..2", "--k", "1", "--no-timestamp")
    assert code == 0
    assert len(recs) == 3
    assert all(r["timestamp"] is None for r in recs)
    with pytest.raises(ValueError):
        tracelab.cli_records("modes", "--domain", "torus")
