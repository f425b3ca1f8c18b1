import math

import numpy as np
import pytest

from qcldpc.density import (
    DeConfig,
    DegreeDistribution,
    LlrGrid,
    QuantizedDensity,
    awgn_initial_density,
    check_pair_table,
    cn_update,
    ensemble_dl100,
    rho_concentrated,
    run_de,
    threshold,
    vn_update,
    _check_pair,
    _conv_pair,
)

GRID = LlrGrid(30.0, 10)  # small grid keeps unit tests quick


def gaussian(sigma=1.0, grid=GRID):
    return awgn_initial_density(sigma, grid)


def test_grid_has_zero_bin():
    assert GRID.values()[GRID.center] == 0.0
    assert GRID.n_bins == 1024


def test_grid_validation():
    with pytest.raises(ValueError, match="bits"):
        LlrGrid(30.0, 7)
    with pytest.raises(ValueError, match="llr_max"):
        LlrGrid(-1.0, 12)


def test_initial_density_moments():
    f = gaussian(1.0)
    assert f.total_mass() == pytest.approx(1.0, abs=1e-12)
    assert f.mean() == pytest.approx(2.0, abs=0.02)
    assert f.variance() == pytest.approx(4.0, abs=0.05)


def test_initial_density_low_snr_limit():
    f = gaussian(10.0)
    pe = f.error_probability()
    assert 0.4 < pe < 0.5


def test_initial_density_symmetry():
    f = awgn_initial_density(1.0, LlrGrid(30.0, 12))
    v = f.grid.values()
    c = f.grid.center
    ks = np.arange(1, 500)
    dev = np.abs(np.log(f.mass[c + ks]) - np.log(f.mass[c - ks]) - v[c + ks])
    assert dev.max() < 0.01


def test_sigma_must_be_positive():
    with pytest.raises(ValueError, match="sigma"):
        awgn_initial_density(0.0, GRID)


def test_point_mass_convolution():
    a = QuantizedDensity.point_mass(GRID, 3.0)
    b = QuantizedDensity.point_mass(GRID, -1.25)
    out = _conv_pair(a.mass, b.mass, GRID)
    peak = GRID.values()[out.argmax()]
    assert abs(peak - 1.75) <= GRID.delta
    assert out.sum() == pytest.approx(1.0, abs=1e-9)


def test_neutral_message_convolution():
    f0 = gaussian(1.0)
    zero = QuantizedDensity.point_mass(GRID, 0.0)
    out = _conv_pair(f0.mass, zero.mass, GRID)
    assert np.allclose(out, f0.mass, atol=1e-12)


def test_degree2_check_is_identity():
    f = gaussian(0.9)
    out = cn_update(f, {2: 1.0})
    assert np.array_equal(out.mass, f.mass)


def test_saturated_point_mass_is_fixed_point():
    top = QuantizedDensity.point_mass(GRID, 1e9)
    for rho in ({6: 1.0}, {3: 0.25, 7: 0.75}):
        out = cn_update(top, rho)
        assert out.mass[-1] == pytest.approx(1.0)


def test_check_update_preserves_symmetry():
    f = awgn_initial_density(1.0, LlrGrid(30.0, 12))
    out = cn_update(f, {6: 1.0})
    v = f.grid.values()
    c = f.grid.center
    ks = np.arange(1, 300)
    good = out.mass[c + ks] > 1e-9
    dev = np.abs(
        np.log(out.mass[c + ks][good]) - np.log(out.mass[c - ks][good]) - v[c + ks][good]
    )
    assert dev.max() < 0.05


def test_updates_conserve_mass():
    f = gaussian(1.1)
    out_c = cn_update(f, {3: 0.5, 6: 0.5})
    assert out_c.total_mass() == pytest.approx(1.0, abs=1e-9)
    out_v = vn_update(out_c, f, {2: 0.4, 4: 0.6})
    assert out_v.total_mass() == pytest.approx(1.0, abs=1e-9)


def test_cn_update_rejects_unnormalized():
    bad = QuantizedDensity(GRID, np.full(GRID.n_bins, 0.5))
    with pytest.raises(ValueError, match="normalized"):
        cn_update(bad, {3: 1.0})


def test_vn_update_rejects_grid_mismatch():
    f = gaussian(1.0, LlrGrid(30.0, 10))
    g = gaussian(1.0, LlrGrid(30.0, 11))
    with pytest.raises(ValueError, match="grid"):
        vn_update(f, g, {2: 1.0})


def test_table_passthrough_against_saturation():
    tab = check_pair_table(GRID)
    c = GRID.center
    # zero magnitude annihilates, saturated magnitude passes through
    assert tab[0, 100] == 0 and tab[100, 0] == 0
    assert tab[c, 250] == 250 and tab[c - 1, 250] == 250
    # pairwise output magnitude never exceeds the smaller input
    i, j = 200, 410
    assert tab[i, j] <= min(i, j)


def test_check_pair_matches_direct_formula():
    # two point masses: output should land within a bin of the exact rule
    for x, y in ((4.0, 6.0), (2.5, 2.5), (-3.0, 5.0), (-2.0, -2.0)):
        a = QuantizedDensity.point_mass(GRID, x)
        b = QuantizedDensity.point_mass(GRID, y)
        out = _check_pair(a.mass, b.mass, GRID)
        exact = 2.0 * math.atanh(math.tanh(x / 2.0) * math.tanh(y / 2.0))
        peak = GRID.values()[out.argmax()]
        assert abs(peak - exact) <= GRID.delta
        assert out.sum() == pytest.approx(1.0, abs=1e-12)


def test_degree_distribution_validation():
    with pytest.raises(ValueError, match="sum"):
        DegreeDistribution({2: 0.5, 3: 0.4}, {6: 1.0})
    with pytest.raises(ValueError, match="degree below 2"):
        DegreeDistribution({1: 1.0}, {6: 1.0})
    with pytest.raises(ValueError, match="negative"):
        DegreeDistribution({2: 1.2, 3: -0.2}, {6: 1.0})
    with pytest.raises(ValueError, match="rate"):
        DegreeDistribution({6: 1.0}, {3: 1.0})  # rate would be negative


def test_design_rate_regular():
    d = DegreeDistribution.regular(3, 6)
    assert d.l_avg == pytest.approx(3.0)
    assert d.r_avg == pytest.approx(6.0)
    assert d.design_rate == pytest.approx(0.5)


def test_rho_concentrated():
    assert rho_concentrated(8.0) == {8: 1.0}
    mix = rho_concentrated(10.9375)
    assert set(mix) == {10, 11}
    assert sum(mix.values()) == pytest.approx(1.0, abs=1e-12)
    d = DegreeDistribution({2: 1.0}, mix)
    assert d.r_avg == pytest.approx(10.9375, abs=1e-12)


def test_dl100_table_is_rate_half():
    ens = ensemble_dl100()
    assert sum(ens.lam.values()) == pytest.approx(1.0, abs=1e-12)
    assert ens.design_rate == pytest.approx(0.5, abs=6e-4)
    assert ens.r_avg == pytest.approx(10.9375, abs=1e-9)


def test_run_de_well_below_threshold_converges_fast():
    cfg = DeConfig(bits=10, epsilon=1e-6)
    res = run_de(DegreeDistribution.regular(3, 6), 0.5, cfg)
    assert res.converged and res.iterations < 50


def test_run_de_far_above_threshold_fails():
    cfg = DeConfig(bits=10, epsilon=1e-6, max_iter=500)
    res = run_de(DegreeDistribution.regular(3, 6), 2.0, cfg)
    assert not res.converged
    assert res.final_pe > 0.1


def test_run_de_degenerate_epsilon():
    res = run_de(DegreeDistribution.regular(3, 6), 1.3, DeConfig(bits=10, epsilon=0.5))
    assert res.converged and res.iterations == 0


def test_run_de_trace_tail_monotone():
    cfg = DeConfig(bits=10, epsilon=1e-9)
    res = run_de(DegreeDistribution.regular(3, 6), 0.7, cfg)
    tail = res.p_trace[-10:]
    assert (np.diff(tail) <= 1e-15).all()


def test_threshold_36_regular_small_grid():
    # value only loosely pinned at 9 bits; the bracket contract is exact
    cfg = DeConfig(bits=9, epsilon=1e-6, sigma_lo=0.8, sigma_hi=0.95, sigma_tol=2e-3, max_iter=800)
    res = threshold(DegreeDistribution.regular(3, 6), cfg)
    assert 0.85 < res.sigma_star < 0.91
    assert res.bracket[1] - res.bracket[0] <= 2e-3
    sigmas = {round(p.sigma, 9): p.converged for p in res.probes}
    assert sigmas[0.8] and not sigmas[0.95]


def test_threshold_widens_bad_bracket():
    cfg = DeConfig(bits=9, epsilon=1e-6, sigma_lo=0.3, sigma_hi=0.5, sigma_tol=5e-3, max_iter=400)
    res = threshold(DegreeDistribution.regular(3, 6), cfg)  # both ends converge
    assert res.sigma_star > 0.5  # bracket was widened upward and recorded
    assert any(p.sigma > 0.5 for p in res.probes)


def test_config_validation():
    with pytest.raises(ValueError, match="epsilon"):
        DeConfig(epsilon=0.0)
    with pytest.raises(ValueError, match="bits"):
        DeConfig(bits=17)
