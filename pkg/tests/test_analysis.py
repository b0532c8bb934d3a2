import numpy as np
import pytest
import scipy.integrate
import scipy.optimize
from hypothesis import given, settings
from hypothesis import strategies as st

from qlandauer.analysis import (
    AveragedRecord,
    CouplingEnsemble,
    RegionLabel,
    admissible_grid,
    averaged_bounds,
    averaged_clausius_threshold,
    b_max,
    beta_q_max,
    bloch_components,
    boundary_curve,
    boundary_residual,
    classify,
    classify_averaged,
    classify_max_point,
    clausius_threshold,
    draw_couplings,
    ds_beta,
    ds_max,
    ds_v,
    map_chunks,
    max_point,
    max_point_labels,
    sample_states,
)
from qlandauer.engine import bounds_at
from qlandauer.model import (
    InteractionModel,
    SystemStateParams,
    from_bloch,
    max_coherence,
    system_state,
    von_neumann_entropy,
)

LN2 = np.log(2.0)
betas = st.floats(0.05, 20.0)


def test_b_max_examples():
    assert b_max(0.0, 1.0) == 0.0
    assert b_max(1.0, 1.0) == pytest.approx(1.43379, abs=1e-5)
    assert b_max(1.0, 10.0) == pytest.approx(-np.log(1 - np.tanh(np.float128(10.0))), rel=1e-12)


def test_b_max_rejects_out_of_range():
    with pytest.raises(ValueError):
        b_max(1.2, 1.0)
    with pytest.raises(ValueError):
        b_max(0.5, 0.0)


@given(st.floats(-1.0, 1.0, allow_subnormal=False), betas)
def test_b_max_sign_follows_v_z(v_z, beta):
    b = b_max(v_z, beta)
    if v_z > 0:
        assert b > 0
    elif v_z < 0:
        assert b < 0
    else:
        assert b == 0


def test_ds_max_examples():
    ds, sb, sv = ds_max(0.0, 1.0)
    assert sv == 0.0
    assert ds == pytest.approx(0.32780, abs=1e-4)
    assert ds == pytest.approx(np.tanh(1) + 0.5 * np.log(1 - np.tanh(1) ** 2), abs=1e-14)
    ds1, sb1, sv1 = ds_max(1.0, 2.0)
    assert sv1 == pytest.approx(LN2, abs=1e-15)
    assert ds1 == pytest.approx(sb1 - LN2, abs=1e-15) and ds1 <= 0
    assert ds_max(0.0, 1e-8)[0] == pytest.approx(0.0, abs=1e-12)


@given(st.floats(0.0, 1.0), betas)
def test_ds_max_decomposition_exact(v, beta):
    ds, sb, sv = ds_max(v, beta)
    assert ds == sb - sv
    assert 0 <= sb <= LN2 and 0 <= sv <= LN2


@given(st.floats(0.0, 1.0))
def test_ds_v_is_purity_gap(v):
    # ln 2 - S(rho) for a qubit with Bloch length |v|
    rho = from_bloch([v, 0.0, 0.0])
    assert ds_v(v) == pytest.approx(LN2 - von_neumann_entropy(rho), abs=1e-12)


@given(st.floats(0.01, 30.0))
def test_ds_beta_matches_naive_form_where_stable(beta):
    naive = beta * np.tanh(beta) - np.log(np.cosh(beta))
    assert ds_beta(beta) == pytest.approx(naive, abs=1e-12)


def test_monotonicity_on_dense_grids():
    sb = ds_beta(np.linspace(1e-3, 40, 4000))
    sv = ds_v(np.linspace(0, 1, 4000))
    assert np.all(np.diff(sb) >= 0) and np.all(np.diff(sv) >= 0)
    assert sb.max() <= LN2 and sv.max() <= LN2


def test_beta_q_max_matches_time_domain():
    for a2 in (0.0, 0.3, 0.9):
        rec = bounds_at(InteractionModel.xx(1.0), system_state(a2, 0.4), 1.5, np.pi / 4)
        assert beta_q_max(1 - 2 * a2, 1.5) == pytest.approx(rec.beta_q, abs=1e-12)


def test_max_point_pure_excited():
    r = max_point(0.0, 0.0, 1.0)
    assert r.beta_q_max == pytest.approx(1.76159, abs=1e-5)
    assert r.ds_max == pytest.approx(-0.36532, abs=1e-4)
    assert r.b_max == pytest.approx(1.43379, abs=1e-5)


def test_bloch_components():
    v_z, v = bloch_components(0.6, 0.5)
    assert v_z == pytest.approx(-0.2)
    assert v == pytest.approx(np.hypot(0.2, 2 * 0.5 * np.sqrt(0.24)), abs=1e-15)


def test_clausius_xx():
    assert clausius_threshold("xx", 1e-9) == pytest.approx(0.5, abs=1e-8)
    assert clausius_threshold("xx", 10.0) == pytest.approx(0.99999, abs=1e-4)
    assert clausius_threshold("xx", 1.0) == pytest.approx(0.88080, abs=1e-5)


def test_clausius_ising_direct_evaluation():
    expect = 0.5 * (1 + np.tanh(1.0) * (1 / np.arctan(0.5) - 1))
    assert clausius_threshold("ising", 1.0, 1.0) == pytest.approx(expect, abs=1e-14)
    assert clausius_threshold("ising", 1.0, 1.0) == pytest.approx(0.94051, abs=1e-4)
    assert clausius_threshold("ising", 1.0, 10.0) == 1.0


def test_clausius_errors():
    with pytest.raises(ValueError):
        clausius_threshold("ising", 1.0)
    with pytest.raises(ValueError):
        clausius_threshold("generic", 1.0, 1.0)
    with pytest.raises(ValueError):
        clausius_threshold("xx", 0.0)


def _quadrature_threshold(beta, j_max):
    """Root of the long-time, coupling-averaged Ising heat, from numeric quadrature."""
    even = scipy.integrate.quad(lambda j: j**2 / (4 + j**2), 0, j_max)[0] / j_max
    p_exc = np.exp(-beta) / (2 * np.cosh(beta))
    p_gnd = 1 - p_exc

    def heat(a2):
        return 0.5 * ((1 - a2) * p_gnd - a2 * p_exc) + 0.5 * even * (a2 * p_gnd - (1 - a2) * p_exc)

    return scipy.optimize.brentq(heat, 0.0, 1.0, xtol=1e-14) if heat(1.0) < 0 else 1.0


@pytest.mark.parametrize("beta,j_max", [(0.3, 0.5), (1.0, 1.0), (2.0, 3.0), (0.5, 1.0), (1.0, 10.0)])
def test_clausius_ising_matches_quadrature(beta, j_max):
    assert clausius_threshold("ising", beta, j_max) == pytest.approx(
        _quadrature_threshold(beta, j_max), abs=1e-10)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
def test_clausius_ising_monte_carlo_sign_change(beta):
    mc = averaged_clausius_threshold("ising", beta, 1.0, n_samples=10_000, t_eval=1000.0)
    assert abs(mc - clausius_threshold("ising", beta, 1.0)) <= 0.02


def test_ising_threshold_increases_with_beta_and_j_max():
    vals = [[clausius_threshold("ising", b, j) for j in (0.5, 1.0, 2.0)] for b in (0.2, 0.5, 1.0)]
    arr = np.array(vals)
    assert np.all(np.diff(arr, axis=0) > 0) and np.all(np.diff(arr, axis=1) > 0)


def test_classify_precedence():
    assert classify(-1.0, -2.0, -3.0) is RegionLabel.NEGATIVE_HEAT
    assert classify(0.1, -0.2, -0.3) is RegionLabel.BOTH_BOUNDS_NEGATIVE
    assert classify(0.1, 0.05, 0.05 + 1e-10) is RegionLabel.TIE
    assert classify(0.1, 0.01, 0.05) is RegionLabel.THERMO_TIGHTER
    assert classify(0.1, 0.05, 0.01) is RegionLabel.ENTROPIC_TIGHTER
    assert classify(0.0, -1e-10, -1.0) is RegionLabel.ENTROPIC_TIGHTER


def test_classify_examples():
    for w in (0.0, 0.5, 1.0):
        assert classify_max_point(0.9, w, 1.0) is RegionLabel.NEGATIVE_HEAT
    assert classify_max_point(0.88, 0.0, 1.0) is not RegionLabel.NEGATIVE_HEAT
    assert classify_max_point(0.1, 0.0, 10.0) is RegionLabel.THERMO_TIGHTER
    for beta in (0.1, 1.0, 10.0):
        assert classify_max_point(0.5, 0.0, beta) is RegionLabel.ENTROPIC_TIGHTER


def test_max_point_labels_vectorised():
    a2, d = admissible_grid(30)
    w = np.where(max_coherence(a2) > 0, d / np.maximum(max_coherence(a2), 1e-300), 0)
    w = np.minimum(w, 1.0)
    labels = max_point_labels(a2, w, 2.0)
    for i in range(0, a2.size, 37):
        assert labels[i] == classify_max_point(a2[i], w[i], 2.0).value


def test_boundary_defining_property():
    for beta in (0.5, 1.0, 10.0):
        curve = boundary_curve(beta, np.linspace(0, 1, 81))
        assert curve.points.shape[0] + curve.missing.size == 81
        for a2, d in curve.points:
            assert d <= max_coherence(a2) + 1e-15
            assert abs(boundary_residual(a2, d, beta)) < 1e-9


def test_boundary_exists_below_half_at_low_temperature():
    curve = boundary_curve(10.0, np.linspace(0, 1, 41))
    assert np.any(curve.points[:, 0] < 0.5)
    # beyond alpha^2 = 0.5 no boundary point can have positive b_max
    for a2, _ in curve.points:
        if a2 > 0.5:
            assert b_max(1 - 2 * a2, 10.0) < 0


def test_boundary_rejects_bad_input():
    with pytest.raises(ValueError):
        boundary_curve(0.0, [0.1])
    with pytest.raises(ValueError):
        boundary_curve(1.0, [1.5])


def test_predominantly_excited_states_favour_thermodynamic_bound():
    # Property: for alpha^2 <= 0.45 at any temperature, b_max > ds_max at every grid point.
    a2 = np.linspace(0.0, 0.45, 50)
    w = np.linspace(0.0, 1.0, 50)
    A, W = np.meshgrid(a2, w, indexing="ij")
    fractions = {}
    for beta in (0.1, 0.5, 1.0, 2.0, 10.0):
        v_z, v = bloch_components(A, W)
        ok = b_max(v_z, beta) > ds_max(v, beta)[0]
        fractions[beta] = ok.mean()
    print("fraction of grid with b_max > ds_max:", fractions)
    assert all(f == 1.0 for f in fractions.values())


def test_admissible_grid():
    a2, d = admissible_grid(51)
    assert np.all(d <= max_coherence(a2) + 1e-15)
    assert a2.min() == 0 and a2.max() == 1 and d.max() == 0.5


def test_sample_states_deterministic_and_admissible():
    a, d = sample_states(100, seed=7)
    b, e = sample_states(100, seed=7)
    assert np.array_equal(a, b) and np.array_equal(d, e)
    assert np.all(d <= max_coherence(a))


def test_draw_couplings_range_and_shape():
    j = draw_couplings("generic", 2.0, 1000, seed=1)
    assert j.shape == (1000, 3) and np.all((j > 0) & (j <= 2.0))
    xx = draw_couplings("xx", 1.0, 10)
    assert np.array_equal(xx[:, 0], xx[:, 1]) and np.all(xx[:, 2] == 0)
    with pytest.raises(ValueError):
        draw_couplings("ising", 1.0, 0)


def test_averaged_determinism():
    p = SystemStateParams(0.3, 0.5)
    a = averaged_bounds("generic", p, 1.0, 1.0, n_samples=200, t_eval=50.0, seed=9)
    b = averaged_bounds("generic", p, 1.0, 1.0, n_samples=200, t_eval=50.0, seed=9)
    assert a == b
    assert isinstance(a, AveragedRecord) and a.n_samples == 200


def test_single_sample_equals_pointwise():
    ens = CouplingEnsemble("ising", 1.0, 1, 37.0, seed=4)
    j = ens.couplings[0, 0]
    sys0 = system_state(0.4, 0.7)
    rec = ens.average(sys0, 1.3)
    ref = bounds_at(InteractionModel.ising(j), sys0, 1.3, 37.0)
    assert rec.mean_beta_q == pytest.approx(ref.beta_q, abs=1e-12)
    assert rec.mean_ds == pytest.approx(ref.delta_s, abs=1e-12)
    assert rec.mean_b == pytest.approx(ref.thermo_b, abs=1e-12)


def test_ensemble_mean_heat_matches_average():
    ens = CouplingEnsemble("ising", 1.0, 300, 100.0)
    sys0 = system_state(0.7)
    assert ens.mean_heat(sys0, 1.0) == pytest.approx(ens.average(sys0, 1.0).mean_beta_q, abs=1e-12)


def test_averages_for_matches_average():
    ens = CouplingEnsemble("generic", 1.0, 64, 10.0, seed=2)
    a2 = np.array([0.1, 0.5, 0.8])
    d = np.array([0.2, 0.5, 0.1])
    out = ens.averages_for(a2, d, 2.0, chunk=2)
    for i in range(3):
        rec = ens.average(SystemStateParams.from_delta(a2[i], d[i]), 2.0)
        assert out[:, i] == pytest.approx([rec.mean_beta_q, rec.mean_ds, rec.mean_b], abs=1e-12)


@pytest.mark.parametrize("a2", [0.55, 0.7, 0.9])
def test_ising_average_thermo_bound_negative_above_half(a2):
    p = SystemStateParams.from_delta(a2, 0.1)
    rec = averaged_bounds("ising", p, 1.0, 1.0, n_samples=500, t_eval=100.0)
    assert rec.mean_b < 0


def test_classify_averaged_label():
    lab = classify_averaged("ising", 0.99, 0.0, 1.0, 1.0, n_samples=500, t_eval=100.0)
    assert lab is RegionLabel.NEGATIVE_HEAT


def test_averaged_clausius_generic_model_runs():
    t = averaged_clausius_threshold("generic", 1.0, 1.0, n_samples=500, t_eval=100.0)
    assert 0.5 <= t <= 1.0


def test_ising_bounds_independent_of_coherence():
    rng = np.random.default_rng(11)
    for _ in range(30):
        a2, beta, j, t = rng.random(), rng.uniform(0.1, 10), rng.uniform(0.05, 3), rng.uniform(0, 50)
        recs = [bounds_at(InteractionModel.ising(j), system_state(a2, w), beta, t)
                for w in np.linspace(0, 1, 5)]
        assert np.ptp([r.beta_q for r in recs]) <= 1e-9
        assert np.ptp([r.thermo_b for r in recs]) <= 1e-9


def test_generic_model_coherence_dependence_measured():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(50):
        model = InteractionModel.generic(*rng.uniform(0.05, 2, 3))
        a2, beta, t = rng.random(), rng.uniform(0.1, 10), rng.uniform(0, 50)
        recs = [bounds_at(model, system_state(a2, w), beta, t) for w in np.linspace(0, 1, 5)]
        worst = max(worst, np.ptp([r.beta_q for r in recs]), np.ptp([r.thermo_b for r in recs]))
    print(f"generic model: max spread of beta<Q> and B across w = {worst:.3e}")
    assert np.isfinite(worst)


@settings(max_examples=20)
@given(st.integers(1, 50), st.integers(1, 8))
def test_map_chunks_order_independent_of_threads(n, threads):
    fn = lambda s: np.arange(s.start, s.stop, dtype=float) ** 2  # noqa: E731
    assert np.array_equal(map_chunks(fn, n, threads=threads), np.arange(n, dtype=float) ** 2)
