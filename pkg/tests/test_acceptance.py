"""Acceptance suite: one test per acceptance criterion, at the stated
tolerances.  Run with `pytest tests/test_acceptance.py -v` to get one
pass/fail line per criterion; each test also prints its measured numbers
(visible with -s or on failure).
"""

import math

import numpy as np
import pytest

from cavoptics import (
    BilliardMap,
    MooreFunction,
    Sign,
    Sinusoidal,
    Static,
    TwoWallCavity,
    TwoWallDensity,
    anomaly_direct,
    count_local_maxima,
    cumulative_anomaly,
    density_at,
    density_field,
    effective_trajectory,
    energy_at_bounces,
    fit_log_slope,
    gaussian_seed,
    peak_census,
    principal_starting_points,
    quantum_density,
    quantum_total_energy,
    total_energy,
    trace_two_wall,
    two_wall_resonance_window,
    two_wall_return_points,
    two_wall_window_scan,
    uniform_seed,
    window_scan,
)


def report(name: str, detail: str) -> None:
    print(f"ACCEPTANCE {name}: {detail}")


def doppler_ratio(n_order: int, dl: float, L: float = 1.0) -> float:
    w_dl = n_order * math.pi / L * dl
    return (1.0 + w_dl) / (1.0 - w_dl)


# -- criterion 1: static-cavity suite -----------------------------------------


def test_static_cavity_suite():
    L = 1.0
    m = BilliardMap(Static(L))
    # billiard function
    for tau in (-3.0, 0.0, 7.7, 123.0):
        assert m.eval_f(tau) == pytest.approx(tau - 2 * L, abs=1e-12)
    # cumulative Doppler factors
    path = m.trace(0.3, 100)
    assert np.max(np.abs(path.log_doppler)) == 0.0
    # classical energy constant over 100 crossings (rel 1e-8)
    prof = gaussian_seed(L, center=0.2, width=0.1)
    e0 = total_energy(prof, m, 0.0)
    drift = max(
        abs(total_energy(prof, m, t) / e0 - 1.0) for t in (50.0, 123.0, 200.0)
    )
    assert drift < 1e-8
    # quantum density and total energy (rel 1e-10)
    mf = MooreFunction(m)
    rho = quantum_density(mf, 3.7)
    e_q = quantum_total_energy(m, 57.0)
    assert rho == pytest.approx(-math.pi / (48 * L * L), rel=1e-10)
    assert e_q == pytest.approx(-math.pi / (24 * L), rel=1e-10)
    report("static-suite", f"E drift {drift:.2e}, rho_q {rho:.12f}, E_q {e_q:.12f}")


# -- criterion 2: exact resonance Doppler --------------------------------------


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("dl", [0.001, 0.01])
def test_exact_resonance_doppler(N, dl):
    n = 50
    traj = Sinusoidal(1.0, dl, N * math.pi)
    m = BilliardMap(traj)
    r = doppler_ratio(N, dl)
    tp, tm = principal_starting_points(N, 1.0)
    worst = 0.0
    for tau in tp:
        got = m.trace(float(tau), n).log_doppler[-1]
        worst = max(worst, abs(got / (n * math.log(r)) - 1.0))
    for tau in tm:
        got = m.trace(float(tau), n).log_doppler[-1]
        worst = max(worst, abs(got / (-n * math.log(r)) - 1.0))
    assert worst < 1e-9
    report("resonance-doppler", f"N={N} dL={dl}: worst rel {worst:.2e}")


# -- criterion 3: derivative identity ------------------------------------------


def test_doppler_inverse_derivative_identity():
    m = BilliardMap(Sinusoidal(1.0, 0.01, 2 * math.pi))
    h = 1e-5
    rng = np.random.default_rng(17)
    worst = 0.0
    for _ in range(100):
        tau = float(rng.uniform(-1.0, 5.0))
        n = int(rng.integers(1, 21))
        tp = m.trace(tau + h, n).times[-1]
        tm = m.trace(tau - h, n).times[-1]
        d_fd = 1.0 / ((tp - tm) / (2 * h))
        d_n = math.exp(m.trace(tau, n).log_doppler[-1])
        worst = max(worst, abs(d_n / d_fd - 1.0))
    assert worst < 1e-6
    report("doppler-derivative-identity", f"worst rel {worst:.2e} over 100 cases")


# -- criterion 4: resonance window ---------------------------------------------


@pytest.mark.parametrize("dl", [0.01, 0.05])
def test_resonance_window_boundary(dl):
    step = 1e-3
    ratios = np.arange(0.0, 2.0 * dl + step, step)
    flags = window_scan(1.0, dl, 1, ratios)
    edge = float(ratios[np.max(np.nonzero(flags))])
    assert abs(edge - dl) <= step
    # negative detuning side is symmetric for the single wall
    flags_neg = window_scan(1.0, dl, 1, -ratios)
    edge_neg = float(ratios[np.max(np.nonzero(flags_neg))])
    assert abs(edge_neg - dl) <= step
    report("resonance-window", f"dL/L={dl}: edges +{edge:.3f}/-{edge_neg:.3f}")


# -- criterion 5: peak census ---------------------------------------------------


@pytest.mark.parametrize("N", [2, 3])
def test_travelling_peak_count(N):
    traj = Sinusoidal(1.0, 0.01, N * math.pi)
    m = BilliardMap(traj)
    prof = uniform_seed(1.0, 1.0)
    counts = []
    for frac in (0.13, 0.29, 0.37, 0.63, 0.77):
        t = 20.0 + 2.0 * frac
        xs = np.linspace(0.0, traj.position(t), 601)
        counts.append(count_local_maxima(density_field(prof, m, t, xs)))
    assert int(np.median(counts)) == N
    report("peak-count", f"N={N}: snapshot maxima {counts}")


def test_additional_series_census():
    # dL/L > M/N spawns M extra series; strengths follow
    # s_M = sqrt((omega_N dL)^2 - (M pi)^2).  Note these require
    # omega_N dL > pi (phase speed beyond the ray-tracing regime), so the
    # census is verified at the formula level.
    c = peak_census(4, 0.3)
    assert c.num_series == 2
    s1_expected = math.sqrt((1.2 * math.pi) ** 2 - math.pi**2)
    assert c.strengths[1] == pytest.approx(s1_expected, rel=1e-6)
    assert c.strengths[0] == pytest.approx(1.2 * math.pi, rel=1e-6)
    # principal-only below the threshold
    assert peak_census(1, 0.5).num_series == 1
    # subluminal case: exponent matches the traced classification
    c_sub = peak_census(2, 0.01)
    lam = math.log(doppler_ratio(2, 0.01))
    assert c_sub.exponents[0] == pytest.approx(lam, rel=1e-12)
    report("peak-census", f"N=4 dL/L=0.3: series {c.num_series}, s1 {c.strengths[1]:.6f}")


# -- criterion 6: peak asymptotics ----------------------------------------------


def test_peak_asymptotics_height_and_width():
    m = BilliardMap(Sinusoidal(1.0, 0.01, math.pi))
    prof = gaussian_seed(1.0, center=0.0, width=0.05)
    r = doppler_ratio(1, 0.01)

    def metrics(n):
        base = m.trace(0.0, n)
        t_n = float(base.times[-1])
        d_n = math.exp(base.log_doppler[-1])
        etas = np.linspace(-0.3 / d_n, 0.3 / d_n, 801)
        vals = np.array([density_at(prof, m, t_n + float(e)) for e in etas])
        top = float(vals.max())
        above = np.where(vals >= top / 2)[0]
        return top, float(etas[above[-1]] - etas[above[0]])

    h50, w50 = metrics(50)
    h51, w51 = metrics(51)
    assert h51 / h50 == pytest.approx(r * r, rel=0.01)
    assert w51 / w50 == pytest.approx(1.0 / r, rel=0.01)
    report(
        "peak-asymptotics",
        f"height ratio {h51 / h50:.6f} (D1^2 {r * r:.6f}), "
        f"width ratio {w51 / w50:.6f} (1/D1 {1 / r:.6f})",
    )


# -- criterion 7: Moore residual and anomaly -------------------------------------


def test_moore_residual_and_anomaly_identity():
    bm = BilliardMap(Sinusoidal(1.0, 0.05, math.pi))
    mf = MooreFunction(bm)
    rng = np.random.default_rng(23)
    worst_res = max(
        abs(mf.residual(float(tau))) for tau in rng.uniform(-1.0, 100.0, 1000)
    )
    assert worst_res < 1e-9
    worst_anom = 0.0
    for _ in range(20):
        tau = float(rng.uniform(-1.0, 1.0))
        n = int(rng.integers(1, 21))
        a_sum = cumulative_anomaly(bm, tau, n)
        a_dir = anomaly_direct(bm, tau, n)
        worst_anom = max(worst_anom, abs(a_sum / a_dir - 1.0))
    assert worst_anom < 1e-7
    report("moore-anomaly", f"residual {worst_res:.2e}, anomaly mismatch {worst_anom:.2e}")


# -- criterion 8: two-wall equivalences ------------------------------------------


def test_two_wall_equivalences():
    # breathing == single wall on the doubled map, D_n identical to 1e-10
    cav = TwoWallCavity.breathing(1.0, 0.01, 2 * math.pi)
    single = BilliardMap(cav.right)
    worst = 0.0
    for tau in (0.0, 0.37, 1.9):
        two = trace_two_wall(cav, "L", tau, 25)
        one = single.trace(tau, 50)
        worst = max(worst, float(np.max(np.abs(two.log_doppler - one.log_doppler[1::2]))))
    assert worst < 1e-10

    # period-L translational mode conserves the evolved energy (rel 1e-8)
    trans = TwoWallCavity.translational(1.0, 0.01, 2 * math.pi)
    w = 2 * math.pi
    dens = TwoWallDensity(trans, lambda tau: (w * math.cos(w * tau)) ** 2)
    es = [dens.total_energy(2.0 + 2.0 * j, tol=1e-11) for j in range(4)]
    spread = (max(es) - min(es)) / abs(es[0])
    assert spread < 1e-8

    # equal amplitudes, N odd, delta = 0: no exponential instability
    odd = TwoWallCavity.harmonic(1.0, 0.01, 0.01, math.pi, math.pi, 0.0)
    lam_odd = max(
        abs(trace_two_wall(odd, "L", tau0, 50).log_doppler[-1] / 50)
        for tau0 in (2.2, 3.1)
    )
    assert lam_odd < 1e-10

    # dephased window edges match the analytic bound within scan resolution
    dl1, dl2, delta, N = 0.01, 0.007, 0.7, 2
    bound_neg = two_wall_resonance_window(dl1, dl2, delta, N)
    amp = math.sqrt(dl1**2 + dl2**2 + 2 * dl1 * dl2 * math.cos(delta))
    bound_pos = amp - dl2 * math.sin(delta)
    step = 1e-3
    xs = -np.arange(0.0, 1.5 * bound_neg, step)
    edge_neg = abs(float(xs[np.max(np.nonzero(two_wall_window_scan(1.0, dl1, dl2, delta, N, xs)))]))
    xs = np.arange(0.0, 1.5 * bound_pos, step)
    edge_pos = float(xs[np.max(np.nonzero(two_wall_window_scan(1.0, dl1, dl2, delta, N, xs)))])
    assert abs(edge_neg - bound_neg) <= step
    assert abs(edge_pos - bound_pos) <= step
    report(
        "two-wall",
        f"breathing {worst:.1e}, translational spread {spread:.1e}, "
        f"odd-N lambda {lam_odd:.1e}, window edges {edge_neg:.3f}/{edge_pos:.3f} "
        f"vs {bound_neg:.3f}/{bound_pos:.3f}",
    )


# -- criterion 9: velocity composition -------------------------------------------


def test_effective_trajectory_velocity_composition():
    cav = TwoWallCavity.harmonic(1.0, 0.01, 0.007, 2 * math.pi, 2 * math.pi, 0.6)
    eff = effective_trajectory(cav, "L", 32.0)
    rng = np.random.default_rng(29)
    worst = 0.0
    for v in rng.uniform(2.0, 30.0, 1000):
        v = float(v)
        t1 = cav.map1.retarded_time(v)
        w = v - 2 * cav.right.position(t1)
        t2 = cav.map2.retarded_time(w)
        t_eff = v - (cav.right.position(t1) + cav.left.position(t2))
        ldot = eff.velocity(t_eff)
        lhs = (1 - ldot) / (1 + ldot)
        a1 = cav.right.velocity(t1)
        a2 = cav.left.velocity(t2)
        rhs = (1 - a1) / (1 + a1) * (1 - a2) / (1 + a2)
        worst = max(worst, abs(lhs / rhs - 1.0))
    assert worst < 1e-8
    report("velocity-composition", f"worst rel {worst:.2e} on 1000 samples")


# -- criterion 10: exponential energy growth -------------------------------------


def _measured_growth_slope(n_max=100):
    traj = Sinusoidal(1.0, 0.01, 2 * math.pi)
    m = BilliardMap(traj)
    prof = gaussian_seed(1.0, center=0.25, width=0.08)
    tp, tm = principal_starting_points(2, 1.0)
    be = energy_at_bounces(
        prof, m, n_max,
        force_points=[float(x) for x in np.concatenate([tp, tm])],
    )
    return fit_log_slope(be.n, be.log_energy)


@pytest.mark.xfail(
    strict=True,
    reason=(
        "stated target 2*log D1 is unattainable: E_n = int rho D_n dtau is "
        "bounded by D1(tau+)^n * E_0 pointwise, so the fitted slope equals "
        "log D1 (peak height grows like D_n^2 but its width shrinks like "
        "1/D_n, leaving one net power of D_n in the integral); see the "
        "companion test for the measured law"
    ),
)
def test_energy_growth_slope_as_stated():
    slope = _measured_growth_slope()
    lam = math.log(doppler_ratio(2, 0.01))
    report("energy-growth (as stated)", f"slope {slope:.6f} vs 2 log D1 {2 * lam:.6f}")
    assert slope == pytest.approx(2.0 * lam, rel=0.03)


def test_energy_growth_slope_measured_law():
    slope = _measured_growth_slope()
    lam = math.log(doppler_ratio(2, 0.01))
    assert slope == pytest.approx(lam, rel=0.03)
    report("energy-growth (measured law)", f"slope {slope:.6f} vs log D1 {lam:.6f}")
