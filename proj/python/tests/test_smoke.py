import math

import numpy as np
import pytest

import sgmod


def test_mse_g_endpoints():
    assert sgmod.mse_g(0.0) == pytest.approx(1.0, abs=1e-12)
    assert sgmod.mse_g(math.inf) == 0.0
    assert sgmod.mse_g(1.0) < sgmod.mse_g(0.5)


def test_negative_snr_raises():
    with pytest.raises(ValueError):
        sgmod.mse_g(-1.0)


def test_awgn_fixed_points():
    assert sgmod.awgn_capacity_fixed_point(1.0) == pytest.approx(0.5, abs=1e-9)
    assert sgmod.awgn_capacity_fixed_point(1.5) == pytest.approx(1.0, abs=1e-9)


def test_capacity_inverse_round_trip():
    gamma = sgmod.biawgn_capacity_inverse(0.5)
    assert sgmod.biawgn_capacity(gamma) == pytest.approx(0.5, abs=1e-9)


def test_first_iteration_sinr():
    out = sgmod.run_de(alpha=1.0, sigma2=1.0, max_iter=1, t_max=4.0, dt=1e-3)
    t = out["t"]
    z1 = out["z"][1][np.searchsorted(t, 0.0 - 1e-12)]
    assert z1 == pytest.approx(math.log(2.0), abs=1e-4)
    assert out["z"].shape == (2, t.size)


def test_sic_front_moves():
    out = sgmod.run_de(alpha=1.0, sigma2=1.0, mode="sic", theta=math.log(2) - 0.01, max_iter=10, t_max=10.0)
    front = out["front"]
    assert np.all(np.diff(front[1:]) > 0)


def test_sweep_rows():
    rows = sgmod.sweep([10.0, 100.0], [1.0, 3.0])
    assert len(rows) == 8
    eb = [r["ebn0_db"] for r in rows]
    assert eb == sorted(eb)
    for r in rows:
        if r["receiver"] == "modified-sic":
            assert r["spectral_efficiency"] == pytest.approx(sgmod.c_eff(r["alpha"], r["s"]))


def test_link_sim_small():
    out = sgmod.run_link_sim(n_dims=30, m_substreams=4, k_streams=15, w=1, l_bits=30, slots=6, iterations=2, seed=3)
    assert out["x_hat"].shape == (3, 6)
    again = sgmod.run_link_sim(n_dims=30, m_substreams=4, k_streams=15, w=1, l_bits=30, slots=6, iterations=2, seed=3)
    assert np.array_equal(out["x_hat"], again["x_hat"])


def test_link_sim_rejects_bad_config():
    with pytest.raises(ValueError):
        sgmod.run_link_sim(l_bits=7, w=1)
    with pytest.raises(ValueError):
        sgmod.run_link_sim(bogus=1)
