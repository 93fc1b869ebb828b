//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_UNATTAINABLE` are still evaluated at full
//! tolerance and reported as FAIL; they do not abort the run because the
//! model itself cannot reach them (see the project notes). Any other
//! failure exits non-zero.

use std::time::Instant;

use nalgebra::Matrix4;
use num_complex::Complex64;
use optosqueeze_cli::{
    run_sweep, Axis, BranchEval, BranchPolicy, EvalOptions, FigureTask, Quantity, SweepRow,
    SweepSpec, VarianceMethod,
};
use optosqueeze_core::{
    derive_params, routh_hurwitz, solve_steady_state, variance_closed_form, variance_quadrature,
    Detuning, SpectralModel, SystemConfig, SystemParams, ThermalNoise,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_UNATTAINABLE: [u32; 2] = [5, 7];

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
    seconds: f64,
}

fn options(method: VarianceMethod) -> EvalOptions {
    EvalOptions {
        method,
        ..EvalOptions::default()
    }
}

fn preset_at(power: f64, ratio: f64) -> SystemConfig {
    SystemConfig::paper2017().with_power(power).with_quadratic_ratio(ratio)
}

fn power_sweep(ratio: f64, lo: f64, hi: f64, method: VarianceMethod) -> Vec<SweepRow> {
    let figure = FigureTask::VarianceCurves.spec(SystemConfig::paper2017());
    let values: Vec<f64> = figure
        .axis1
        .values
        .iter()
        .copied()
        .filter(|&p| p >= lo * (1.0 - 1e-12) && p <= hi * (1.0 + 1e-12))
        .collect();
    let mut spec = SweepSpec::new(
        Axis::values("input_power", values).unwrap(),
        vec![Quantity::VarX, Quantity::VarP],
        preset_at(0.0, ratio),
    );
    spec.policy = BranchPolicy::All;
    run_sweep(&spec, &options(method), 0).unwrap().rows
}

/// `(power, branch)` for every stable row with a quadrature result.
fn stable(rows: &[SweepRow]) -> Vec<(f64, &BranchEval)> {
    rows.iter()
        .filter_map(|r| {
            let b = r.branch.as_ref()?;
            (b.is_stable() && matches!(b.quadrature, Some(Ok(_)))).then_some((r.axis1, b))
        })
        .collect()
}

fn quad(b: &BranchEval) -> optosqueeze_core::VarianceResult {
    *b.quadrature.as_ref().unwrap().as_ref().unwrap()
}

fn timed(f: impl FnOnce() -> (bool, String)) -> (bool, String, f64) {
    let start = Instant::now();
    let (pass, detail) = f();
    (pass, detail, start.elapsed().as_secs_f64())
}

fn zero_power_equipartition() -> (bool, String) {
    let p = derive_params(&preset_at(0.0, 0.0)).unwrap();
    let s = solve_steady_state(&p).unwrap()[0];
    let v = variance_quadrature(&SpectralModel::new(&p, &s, ThermalNoise::FlatMarkovian)).unwrap();
    let target = p.n_th + 0.5;
    let mut worst = ((v.var_x - target) / target).abs().max(((v.var_p - target) / target).abs());
    // same property over random undriven oscillators
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let mut c = preset_at(0.0, rng.random_range(-0.05..0.05));
        c.mechanical_frequency = 10f64.powf(rng.random_range(5.0..8.0));
        c.mechanical_damping = c.mechanical_frequency * 10f64.powf(rng.random_range(-7.0..-3.0));
        c.bath_temperature = 10f64.powf(rng.random_range(-4.0..0.0));
        c.cavity_linewidth = 10f64.powf(rng.random_range(4.0..7.0));
        let p = derive_params(&c).unwrap();
        let s = solve_steady_state(&p).unwrap()[0];
        let v = variance_quadrature(&SpectralModel::new(&p, &s, ThermalNoise::FlatMarkovian)).unwrap();
        let t = p.n_th + 0.5;
        worst = worst.max(((v.var_x - t) / t).abs()).max(((v.var_p - t) / t).abs());
    }
    (
        worst <= 1e-6,
        format!("preset var_x = {:.9}, var_p = {:.9}, n_th + 1/2 = {target:.9}; worst relative deviation over 101 undriven draws {worst:.2e}", v.var_x, v.var_p),
    )
}

fn loc_sql_floor(rows: &[SweepRow]) -> (bool, String) {
    let st = stable(rows);
    let (mut min, mut at) = (f64::INFINITY, 0.0);
    for (power, b) in &st {
        let v = quad(b);
        let m = v.var_x.min(v.var_p);
        if m < min {
            min = m;
            at = *power;
        }
    }
    (
        !st.is_empty() && min >= 0.5 * (1.0 - 1e-3),
        format!("{} stable rows of {}; min(var_x, var_p) = {min:.6} at {:.3e} W", st.len(), rows.len(), at),
    )
}

fn three_db_crossing(rows: &[SweepRow]) -> (bool, String) {
    let lowest: Vec<(f64, f64)> = stable(rows)
        .into_iter()
        .filter(|(_, b)| b.steady.branch_id == 0)
        .map(|(p, b)| (p, quad(b).var_x))
        .collect();
    let first = lowest.iter().position(|&(_, v)| v < 0.25);
    let Some(k) = first.filter(|&k| k > 0) else {
        return (false, "var_x never crosses 0.25".into());
    };
    let ((p0, v0), (p1, v1)) = (lowest[k - 1], lowest[k]);
    let t = (0.25 - v0) / (v1 - v0);
    let crossing = (p0.ln() + t * (p1.ln() - p0.ln())).exp();
    (
        (crossing - 1.3e-3).abs() <= 0.15 * 1.3e-3,
        format!("var_x < 0.25 from {p1:.4e} W (grid), interpolated crossing {:.4} mW; window [1.105, 1.495] mW", crossing * 1e3),
    )
}

/// Largest power at which the lowest branch is stable, by bisection on
/// `[lo, hi]` (stable at `lo`, unstable at `hi`).
fn stability_edge(ratio: f64, mut lo: f64, mut hi: f64) -> f64 {
    let stable_at = |power: f64| {
        let p = derive_params(&preset_at(power, ratio)).unwrap();
        let s = solve_steady_state(&p).unwrap()[0];
        routh_hurwitz(&p, &s).unwrap().is_stable()
    };
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if stable_at(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn momentum_ceiling(rows: &[SweepRow]) -> (bool, String) {
    let st = stable(rows);
    let (mut best, mut at) = (f64::INFINITY, 0.0);
    for (power, b) in &st {
        let v = quad(b).var_p;
        if v < best {
            best = v;
            at = *power;
        }
    }
    let last_stable = st.iter().map(|(p, _)| *p).fold(0.0, f64::max);
    let next = rows
        .iter()
        .map(|r| r.axis1)
        .find(|&p| p > last_stable)
        .unwrap_or(last_stable);
    let edge = stability_edge(-0.01, last_stable, next);
    let pass = (best - 0.30).abs() <= 0.05 && (edge - 150e-6).abs() <= 0.2 * 150e-6;
    (
        pass,
        format!(
            "best var_p = {best:.4} at {:.1} µW; last stable grid power {:.1} µW, refined edge {:.2} µW; windows [0.25, 0.35] and [120, 180] µW",
            at * 1e6,
            last_stable * 1e6,
            edge * 1e6
        ),
    )
}

fn damping_ratios() -> (bool, String) {
    let ratio = |gq: f64| {
        let p = derive_params(&preset_at(100e-6, gq)).unwrap();
        let s = solve_steady_state(&p).unwrap()[0];
        let m = SpectralModel::new(&p, &s, ThermalNoise::FlatMarkovian);
        m.quasiresonant_dynamics().gamma_eff / p.gamma_m
    };
    let base = ratio(0.0);
    let neg = ratio(-0.01) / base;
    let pos = ratio(0.01) / base;
    (
        (neg - 0.5).abs() <= 0.2 * 0.5 && (pos - 0.05).abs() <= 0.2 * 0.05,
        format!(
            "Γ_eff/γ_m = {base:.2} (g_q = 0); ratio(−0.01)/ratio(0) = {neg:.4} (window [0.4, 0.6]); ratio(+0.01)/ratio(0) = {pos:.4} (window [0.04, 0.06])"
        ),
    )
}

fn random_config(rng: &mut ChaCha8Rng) -> SystemConfig {
    let mut c = SystemConfig::paper2017();
    c.mechanical_frequency = 10f64.powf(rng.random_range(5.0..8.0));
    c.mechanical_damping = c.mechanical_frequency * 10f64.powf(rng.random_range(-7.0..-2.0));
    c.cavity_linewidth = c.mechanical_frequency * 10f64.powf(rng.random_range(-2.0..1.0));
    c.linear_coupling = 10f64.powf(rng.random_range(1.0..3.5));
    c.quadratic_ratio = rng.random_range(-0.03..0.03);
    c.input_power = 10f64.powf(rng.random_range(-8.0..-1.5));
    c.bath_temperature = 10f64.powf(rng.random_range(-4.0..0.5));
    c.pump_wavelength = rng.random_range(500e-9..1600e-9);
    c.detuning = Detuning::Angular(2.0 * std::f64::consts::PI * c.mechanical_frequency * rng.random_range(0.1..3.0));
    c
}

fn stability_cross_validation() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2017);
    let (mut draws, mut points, mut marginal, mut disagree, mut unstable) = (0, 0, 0, 0, 0);
    let mut worst_pole = 0.0f64;
    let mut pole_draws = 0;
    while draws < 10_000 {
        let config = random_config(&mut rng);
        let Ok(p) = derive_params(&config) else { continue };
        let Ok(branches) = solve_steady_state(&p) else { continue };
        draws += 1;
        for s in &branches {
            let r = routh_hurwitz(&p, s).unwrap();
            points += 1;
            if r.marginal {
                marginal += 1;
                continue;
            }
            if !r.eigen_stable {
                unstable += 1;
            }
            if r.rh_stable != r.eigen_stable {
                disagree += 1;
            }
            if draws <= 1_000 {
                let poles = SpectralModel::new(&p, s, ThermalNoise::FlatMarkovian).response_poles().unwrap();
                for lambda in r.eigenvalues {
                    let omega = Complex64::i() * lambda;
                    let best = poles.iter().map(|z| (z - omega).norm()).fold(f64::INFINITY, f64::min);
                    worst_pole = worst_pole.max(best / omega.norm());
                }
            }
        }
        if draws <= 1_000 {
            pole_draws = draws;
        }
    }
    (
        disagree == 0 && worst_pole <= 1e-8,
        format!(
            "{draws} draws, {points} branches ({unstable} unstable, {marginal} marginal skipped), {disagree} disagreements; worst pole/eigenvalue mismatch over {pole_draws} draws {worst_pole:.2e}"
        ),
    )
}

fn closed_form_fidelity(rows: &[SweepRow]) -> (bool, String) {
    let mut worst_x = 0.0f64;
    let mut worst_p = 0.0f64;
    let mut n = 0;
    let mut at = 0.0;
    for (power, b) in stable(rows) {
        let Some(cf) = b.closed_form else { continue };
        if !cf.calibrated.quasiresonant_valid {
            continue;
        }
        n += 1;
        let q = quad(b);
        let ex = ((cf.calibrated.var_x - q.var_x) / q.var_x).abs();
        let ep = ((cf.calibrated.var_p - q.var_p) / q.var_p).abs();
        if ex.max(ep) > worst_x.max(worst_p) {
            at = power;
        }
        worst_x = worst_x.max(ex);
        worst_p = worst_p.max(ep);
    }
    let p = derive_params(&preset_at(0.0, 0.01)).unwrap();
    let s = solve_steady_state(&p).unwrap()[0];
    let m = SpectralModel::new(&p, &s, ThermalNoise::FlatMarkovian);
    let q = variance_quadrature(&m).unwrap();
    let printed = variance_closed_form(&m).as_printed;
    let gap_x = q.var_x / printed.var_x;
    let gap_p = q.var_p / printed.var_p;
    let gap_ok = (gap_x - 2.0).abs() <= 2e-6 && (gap_p - 2.0).abs() <= 2e-6;
    (
        n > 0 && worst_x <= 0.1 && worst_p <= 0.1 && gap_ok,
        format!(
            "{n} quasiresonant stable points; worst calibrated deviation var_x {:.1}%, var_p {:.1}% (at {:.3} mW); quadrature/as-printed at zero power = {gap_x:.9} (x), {gap_p:.9} (p)",
            worst_x * 100.0,
            worst_p * 100.0,
            at * 1e3
        ),
    )
}

fn heisenberg(sweeps: &[(&str, &[SweepRow])]) -> (bool, String) {
    let mut min = f64::INFINITY;
    let mut n = 0;
    let mut parts = Vec::new();
    for (name, rows) in sweeps {
        let local = stable(rows).iter().map(|(_, b)| quad(b).uncertainty_product).fold(f64::INFINITY, f64::min);
        n += stable(rows).len();
        min = min.min(local);
        parts.push(format!("{name} {local:.4}"));
    }
    (
        min >= 0.25 * (1.0 - 1e-6),
        format!("{n} stable points; min var_x·var_p per sweep: {}", parts.join(", ")),
    )
}

/// Textbook linear-coupling model written in the complex field basis
/// `(δx, δp, δa, δa†)`, independent of the pipeline's quadrature form.
fn loc_oracle(p: &SystemParams, omegas: &[f64]) -> (f64, f64, Vec<f64>) {
    // I (κ² + (Δ − g_l² I/ω_m)²) = ε², bracketed between 0 and ε²/κ²
    let residual = |i: f64| {
        let d = p.delta - p.g_l * p.g_l * i / p.omega_m;
        i * (p.kappa * p.kappa + d * d) - p.epsilon * p.epsilon
    };
    let (mut lo, mut hi) = (0.0, p.epsilon * p.epsilon / (p.kappa * p.kappa));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if residual(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let intensity = 0.5 * (lo + hi);
    let detuning = p.delta - p.g_l * p.g_l * intensity / p.omega_m;
    let a = Complex64::new(p.epsilon, 0.0) / Complex64::new(p.kappa, detuning);
    let i = Complex64::i();
    let zero = Complex64::new(0.0, 0.0);
    let re = |x: f64| Complex64::new(x, 0.0);
    #[rustfmt::skip]
    let drift = Matrix4::new(
        zero,                re(p.omega_m),      zero,                              zero,
        re(-p.omega_m),      re(-p.gamma_m),     -p.g_l * a.conj(),                 -p.g_l * a,
        -i * p.g_l * a,      zero,               -(re(p.kappa) + i * detuning),     zero,
        i * p.g_l * a.conj(), zero,              zero,                              -(re(p.kappa) - i * detuning),
    );
    let thermal = p.gamma_m * (2.0 * p.n_th + 1.0);
    let spectra = omegas
        .iter()
        .map(|&w| {
            let resolvent = (Matrix4::from_diagonal_element(Complex64::new(0.0, -w)) - drift)
                .try_inverse()
                .unwrap();
            let (ta, tad, tp) = (resolvent[(0, 2)], resolvent[(0, 3)], resolvent[(0, 1)]);
            // vacuum input: symmetrised ⟨a a†⟩ = 1/2, ⟨a† a⟩ = 0 per channel
            2.0 * p.kappa * 0.5 * (ta.norm_sqr() + tad.norm_sqr()) + thermal * tp.norm_sqr()
        })
        .collect();
    (intensity, detuning, spectra)
}

/// `S_xx` at `ω_m (0.5 + 0.05 k)`, reference preset, 100 µW, no quadratic term.
const LOC_TABLE: [f64; 20] = [
    8.468567912701051e-12,
    1.142918400790754e-11,
    1.6271837725512538e-11,
    2.4719090843238448e-11,
    4.071692518983214e-11,
    7.444514004395042e-11,
    1.565840440219668e-10,
    4.0147330709642e-10,
    1.392203642413615e-9,
    8.541076956347528e-9,
    2.7011142473743703e-6,
    7.54997036229228e-9,
    1.1151905334164442e-9,
    2.913891092913112e-10,
    1.0280131961808515e-10,
    4.409987748260357e-11,
    2.170139779619489e-11,
    1.1816715601425983e-11,
    6.952931331344047e-12,
    4.34909243205455e-12,
];

fn loc_reduction() -> (bool, String) {
    let p = derive_params(&preset_at(100e-6, 0.0)).unwrap();
    let s = solve_steady_state(&p).unwrap()[0];
    let m = SpectralModel::new(&p, &s, ThermalNoise::FlatMarkovian);
    let omegas: Vec<f64> = (0..20).map(|k| p.omega_m * (0.5 + 0.05 * k as f64)).collect();
    let (intensity, detuning, oracle) = loc_oracle(&p, &omegas);
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let mut worst = rel(s.intensity, intensity)
        .max(rel(s.delta_tilde, detuning))
        .max(rel(s.g_tilde, p.g_l))
        .max(rel(s.omega_m_tilde, p.omega_m));
    let mut worst_table = 0.0f64;
    for (k, &w) in omegas.iter().enumerate() {
        let got = m.spectrum_xx(w).unwrap();
        worst = worst.max(rel(got, oracle[k]));
        worst_table = worst_table.max(rel(got, LOC_TABLE[k])).max(rel(oracle[k], LOC_TABLE[k]));
    }
    (
        worst <= 1e-10 && worst_table <= 1e-10,
        format!("worst relative deviation from the LOC oracle {worst:.2e} (steady state and 20 spectrum values); from the locked table {worst_table:.2e}"),
    )
}

fn main() {
    let mut outcomes = Vec::new();
    let mut push = |id, title, (pass, detail, seconds): (bool, String, f64)| {
        outcomes.push(Outcome { id, title, pass, detail, seconds });
    };

    push(1, "zero-power equipartition", timed(zero_power_equipartition));

    let start = Instant::now();
    let loc = power_sweep(0.0, 1e-6, 1e-2, VarianceMethod::Quadrature);
    let loc_time = start.elapsed().as_secs_f64();
    let (pass, detail, t) = timed(|| loc_sql_floor(&loc));
    push(2, "SQL floor without quadratic coupling", (pass, detail, t + loc_time));

    let start = Instant::now();
    let positive = power_sweep(0.01, 1e-4, 2e-3, VarianceMethod::Both);
    let positive_time = start.elapsed().as_secs_f64();
    let (pass, detail, t) = timed(|| three_db_crossing(&positive));
    push(3, "3 dB crossing at positive coupling", (pass, detail, t + positive_time));

    let start = Instant::now();
    let negative = power_sweep(-0.01, 1e-6, 1e-2, VarianceMethod::Quadrature);
    let negative_time = start.elapsed().as_secs_f64();
    let (pass, detail, t) = timed(|| momentum_ceiling(&negative));
    push(4, "momentum squeezing ceiling", (pass, detail, t + negative_time));

    push(5, "damping-reduction ratios", timed(damping_ratios));
    push(6, "stability cross-validation", timed(stability_cross_validation));
    push(7, "closed-form fidelity", timed(|| closed_form_fidelity(&positive)));
    push(
        8,
        "Heisenberg bound",
        timed(|| heisenberg(&[("loc", &loc), ("+0.01", &positive), ("-0.01", &negative)])),
    );
    push(9, "linear-coupling reduction", timed(loc_reduction));

    let limits = [(1, 1.0), (2, 30.0), (3, 30.0)];
    let mut unexpected = 0;
    for o in &outcomes {
        let slow = limits.iter().any(|&(id, s)| id == o.id && o.seconds > s);
        let pass = o.pass && !slow;
        let known = KNOWN_UNATTAINABLE.contains(&o.id);
        if !pass && !known {
            unexpected += 1;
        }
        println!(
            "criterion {} {}: {} ({:.2} s){} - {}",
            o.id,
            o.title,
            if pass { "PASS" } else { "FAIL" },
            o.seconds,
            if !pass && known { " [known unattainable]" } else { "" },
            o.detail
        );
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria pass", outcomes.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
