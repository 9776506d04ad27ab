//! End-to-end acceptance gate. One test per shipping criterion; the harness
//! prints one pass/fail line per criterion. Run with `--nocapture` to see
//! the measured figures behind each verdict.

use mca_core::integrator::{extract_random_part, integrate_full, integrate_split};
use mca_core::linear_approx::{build, LinearSegment};
use mca_core::reference::{compare, euler, example1_closed_forms, example1_small_t};
use mca_core::stats::{chi_square_uniform, ks_uniform};
use mca_core::systems::{example1, lorenz, van_der_pol, PolySystem};
use mca_core::tau_series::{ShiftFunction, TauSeries};

const TAU_2P10: f64 = 0.0009765625;

/// χ² 0.999 quantile at 15 degrees of freedom: the cutoff for a 16-bin
/// uniformity test at significance 0.001.
const CHI2_CRIT_15_DOF: f64 = 37.6972;

fn builtins() -> Vec<(PolySystem, Vec<f64>)> {
    vec![
        (example1(), vec![1.0, 0.0]),
        (van_der_pol(1.0), vec![0.0, 1.0]),
        (lorenz(3.0, 15.0, 1.0), vec![3.0, 2.0, 15.0]),
    ]
}

#[test]
fn criterion_1_digit_shift_worked_example() {
    let shift = ShiftFunction::mod_carry(0.1);
    let series = TauSeries::new(0.1, vec![5.0, 2.0, 15.0]);
    let normalized = series.normalize(&shift);
    assert_eq!(normalized.coeffs(), &[5.0, 3.0, 5.0]);
    assert!(
        (normalized.value() - 5.35).abs() <= 1e-12,
        "value after normalize = {}",
        normalized.value()
    );
}

#[test]
fn criterion_2_series_integration_matches_the_plain_scheme() {
    let clock = std::time::Instant::now();
    let mut worst_full = 0.0f64;
    let mut worst_split = 0.0f64;
    for tau in [0.5f64.powi(8), 0.5f64.powi(10)] {
        let shift = ShiftFunction::mod_carry(tau);
        for (sys, y0) in builtins() {
            let oracle = euler(&sys, &y0, tau, 10_000).unwrap();
            let series = integrate_full(&sys, &y0, tau, 10_000, &shift).unwrap();
            let report = compare(&series, &oracle).unwrap();
            worst_full = worst_full.max(report.max_abs);
            assert!(
                report.max_abs <= 1e-9,
                "{} at tau={tau}: series deviates by {:e}",
                sys.id(),
                report.max_abs
            );
            if sys.id() == "lorenz" {
                let split = integrate_split(&sys, &y0, tau, 10_000, &shift).unwrap();
                let report = compare(&split, &oracle).unwrap();
                worst_split = worst_split.max(report.max_abs);
                assert!(
                    report.max_abs <= 1e-9,
                    "split form at tau={tau} deviates by {:e}",
                    report.max_abs
                );
            }
        }
    }
    let elapsed = clock.elapsed();
    println!("criterion 2: worst full deviation {worst_full:e}, worst split deviation {worst_split:e}, elapsed {elapsed:?}");
    assert!(elapsed.as_secs_f64() < 10.0, "runtime budget exceeded: {elapsed:?}");
}

#[test]
fn criterion_3_trailing_coefficients_stay_bounded() {
    for tau in [0.5f64.powi(8), 0.5f64.powi(10)] {
        let shift = ShiftFunction::mod_carry(tau);
        let bound = 1.0 / tau;
        for (sys, y0) in builtins() {
            let traj = integrate_full(&sys, &y0, tau, 10_000, &shift).unwrap();
            for snap in &traj.series_states.unwrap().states {
                for c in snap.components() {
                    for (m, &a) in c.coeffs().iter().enumerate().skip(1) {
                        assert!(
                            a.abs() <= bound,
                            "{} tau={tau}: |a_{m}| = {} > {bound}",
                            sys.id(),
                            a.abs()
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn criterion_4_oscillator_linear_table() {
    let sys = van_der_pol(1.0);
    let sol = build(&sys, &[0.0, 1.0], 0.01, 1.5).unwrap();
    assert_eq!(sol.segments.len(), 2, "expected exactly two segments");
    let s0 = &sol.segments[0];
    let s1 = &sol.segments[1];
    // [0,1]: u = t, v = 1 + t
    assert_eq!(s0.slope, vec![1.0, 1.0]);
    assert!(s0.intercept[0].abs() <= 1e-12 && (s0.intercept[1] - 1.0).abs() <= 1e-12);
    assert!((s0.t_end - 1.0).abs() <= 0.01, "first breakpoint {}", s0.t_end);
    // [1,1.5]: u = 2t − 1, v = −t + 3
    assert_eq!(s1.slope, vec![2.0, -1.0]);
    assert!((s1.intercept[0] + 1.0).abs() <= 1e-9 && (s1.intercept[1] - 3.0).abs() <= 1e-9);
    assert_eq!(s1.t_end, 1.5);
    println!(
        "criterion 4: segments [0,{}] and [{},1.5] with slopes {:?} / {:?}",
        s0.t_end, s1.t_start, s0.slope, s1.slope
    );
}

#[test]
fn criterion_5_convection_linear_table() {
    let sys = lorenz(3.0, 15.0, 1.0);
    let sol = build(&sys, &[3.0, 2.0, 15.0], 0.01, 0.24).unwrap();
    assert!(sol.segments.len() >= 2);
    let s0 = &sol.segments[0];
    let s1 = &sol.segments[1];
    assert_eq!(s0.slope, vec![-3.0, -2.0, -9.0]);
    assert!(
        (s0.t_end - 1.0 / 9.0).abs() <= 0.01,
        "first z-shift at {}, expected within one step of 1/9",
        s0.t_end
    );
    // The event drops z's integer part 15 → 14, so the second-segment slopes
    // are the lattice values at (3, 2, 14): (3·(2−3), 15·3 − 3·14 − 2, 3·2 − 14)
    // = (−3, 1, −8). The z closed form on [0.12, 0.24] is −8t + 14.88.
    assert_eq!(s1.slope, vec![-3.0, 1.0, -8.0]);
    assert!((s1.intercept[2] - 14.88).abs() <= 1e-9);
    println!(
        "criterion 5: first segment ends {}, second slopes {:?} (z form: {}t + {})",
        s0.t_end, s1.slope, s1.slope[2], s1.intercept[2]
    );
}

/// Sign changes of component `i` sampled at every segment endpoint.
fn crossings(segments: &[LinearSegment], value: impl Fn(&LinearSegment, f64) -> f64) -> usize {
    let mut count = 0;
    let mut prev = 0.0f64;
    for seg in segments {
        for t in [seg.t_start, seg.t_end] {
            let x = value(seg, t);
            if x != 0.0 {
                if prev != 0.0 && x.signum() != prev.signum() {
                    count += 1;
                }
                prev = x;
            }
        }
    }
    count
}

#[test]
fn criterion_6_linear_orbits_stay_bounded_and_oscillate() {
    let vdp = build(&van_der_pol(1.0), &[0.0, 1.0], 0.01, 50.0).unwrap();
    let mut max_u = 0.0f64;
    let mut max_v = 0.0f64;
    for seg in &vdp.segments {
        for t in [seg.t_start, seg.t_end] {
            max_u = max_u.max(seg.eval(0, t).abs());
            max_v = max_v.max(seg.eval(1, t).abs());
        }
    }
    let u_crossings = crossings(&vdp.segments, |s, t| s.eval(0, t));
    println!(
        "criterion 6: oscillator max|u|={max_u:.3} max|v|={max_v:.3}, u crossings {u_crossings}, {} segments",
        vdp.segments.len()
    );
    assert!(max_u <= 4.0 && max_v <= 8.0);
    assert!(u_crossings >= 6);

    let lor = build(&lorenz(3.0, 15.0, 1.0), &[3.0, 2.0, 15.0], 0.01, 10.0).unwrap();
    let mut max_x = 0.0f64;
    let mut max_y = 0.0f64;
    let mut z_range = (f64::INFINITY, f64::NEG_INFINITY);
    for seg in &lor.segments {
        for t in [seg.t_start, seg.t_end] {
            max_x = max_x.max(seg.eval(0, t).abs());
            max_y = max_y.max(seg.eval(1, t).abs());
            let z = seg.eval(2, t);
            z_range = (z_range.0.min(z), z_range.1.max(z));
        }
    }
    let xy_crossings = crossings(&lor.segments, |s, t| s.eval(0, t) - s.eval(1, t));
    println!(
        "criterion 6: convection max|x|={max_x:.3} max|y|={max_y:.3} z in [{:.3},{:.3}], x−y crossings {xy_crossings}, {} segments",
        z_range.0, z_range.1, lor.segments.len()
    );
    assert!(max_x <= 30.0 && max_y <= 30.0);
    assert!(z_range.0 >= 0.0 && z_range.1 <= 40.0);
    assert!(xy_crossings >= 2);
}

#[test]
fn criterion_7_closed_forms_agree_with_the_stepped_solution() {
    let tau = 0.01;
    let sys = example1();
    let oracle = euler(&sys, &[1.0, 0.0], tau, 200).unwrap();
    let lerp = |t: f64, i: usize| {
        let idx = (t / tau) as usize;
        let frac = t / tau - idx as f64;
        oracle.states[idx][i] * (1.0 - frac) + oracle.states[idx + 1][i] * frac
    };
    let mut checked = 0;
    let mut worst = 0.0f64;
    for a in 0u64.. {
        let (u, v, t) = example1_closed_forms(a, tau).unwrap();
        if t > 0.5 {
            break;
        }
        let (du, dv) = ((u - lerp(t, 0)).abs(), (v - lerp(t, 1)).abs());
        worst = worst.max(du).max(dv);
        assert!(
            du <= 0.05 && dv <= 0.05,
            "a={a}: closed form off by ({du:.4}, {dv:.4}) at t={t:.4}"
        );
        checked += 1;
    }
    assert!(checked > 10, "closed-form sweep covered only {checked} steps");

    let mut checked_small = 0;
    let mut worst_small = 0.0f64;
    for a in 0u64.. {
        let full = example1_closed_forms(a, tau).unwrap();
        let small = example1_small_t(a, tau).unwrap();
        if small.2 > 0.2 {
            break;
        }
        let d = (full.0 - small.0)
            .abs()
            .max((full.1 - small.1).abs())
            .max((full.2 - small.2).abs());
        worst_small = worst_small.max(d);
        assert!(d <= 0.02, "a={a}: small-time form off by {d:.4}");
        checked_small += 1;
    }
    assert!(checked_small > 10);
    println!(
        "criterion 7: {checked} steps vs oracle (worst {worst:.4}), {checked_small} small-time steps (worst {worst_small:.4})"
    );
}

#[test]
fn criterion_8_trailing_coefficients_pass_uniformity_tests() {
    let sys = lorenz(3.0, 15.0, 1.0);
    let shift = ShiftFunction::mod_carry(TAU_2P10);
    let traj = integrate_full(&sys, &[3.0, 2.0, 15.0], TAU_2P10, 10_000, &shift).unwrap();
    let p = sys.retained_terms(1).unwrap();
    let seq = extract_random_part(&traj, p).unwrap();
    let chi2 = chi_square_uniform(&seq, 16);
    let ks = ks_uniform(&seq);

    // Diagnostic: the same trailing coefficients folded modulo τ⁻¹ onto
    // [0, 1) (x·τ mod 1), instead of the sign-symmetric affine map. This
    // view is insensitive to which half of the ±τ⁻¹ band a digit occupies.
    let folded: Vec<f64> = traj
        .series_states
        .as_ref()
        .unwrap()
        .states
        .iter()
        .flat_map(|s| s.components().iter().map(|c| c.coeffs()[p] * TAU_2P10))
        .map(|x| x - x.floor())
        .collect();
    let chi2_folded = chi_square_uniform(&folded, 16);
    let ks_folded = ks_uniform(&folded);
    println!(
        "criterion 8: affine-mapped chi2={chi2:.2} (cutoff {CHI2_CRIT_15_DOF}), KS={ks:.4} (cutoff 0.05)"
    );
    println!(
        "criterion 8 diagnostic: folded-mod-tau^-1 chi2={chi2_folded:.2}, KS={ks_folded:.4} \
         — the digits are equidistributed over the band, but drift-sign \
         persistence makes the two halves unequally occupied, which the \
         affine map exposes"
    );
    assert!(
        chi2 < CHI2_CRIT_15_DOF,
        "chi-square {chi2:.2} exceeds the 0.001-significance cutoff {CHI2_CRIT_15_DOF}"
    );
    assert!(ks < 0.05, "KS distance {ks:.4} >= 0.05");
}

#[test]
fn criterion_9_segment_skeleton_survives_step_halving() {
    let cases: Vec<(PolySystem, Vec<f64>, f64)> = vec![
        (example1(), vec![1.0, 0.0], 0.5),
        (van_der_pol(1.0), vec![0.0, 1.0], 2.25),
        (lorenz(3.0, 15.0, 1.0), vec![3.0, 2.0, 15.0], 0.5),
    ];
    for (sys, y0, t_max) in &cases {
        for pow in [8, 9, 10, 11] {
            let coarse_tau = 0.5f64.powi(pow);
            let fine_tau = coarse_tau / 2.0;
            let coarse = build(sys, y0, coarse_tau, *t_max).unwrap();
            let fine = build(sys, y0, fine_tau, *t_max).unwrap();
            assert_eq!(
                coarse.segments.len(),
                fine.segments.len(),
                "{} t_max={t_max}: segment count changed between tau=2^-{pow} and its half",
                sys.id()
            );
            for (c, f) in coarse.segments.iter().zip(&fine.segments) {
                assert_eq!(
                    c.slope,
                    f.slope,
                    "{} t_max={t_max} tau=2^-{pow}: slopes changed under halving",
                    sys.id()
                );
                assert!(
                    (c.t_end - f.t_end).abs() <= coarse_tau,
                    "{} t_max={t_max} tau=2^-{pow}: breakpoint moved by {:e}",
                    sys.id(),
                    (c.t_end - f.t_end).abs()
                );
            }
        }
        println!(
            "criterion 9: {} to t_max={t_max} keeps its skeleton across tau = 2^-8 .. 2^-12",
            sys.id()
        );
    }
}
