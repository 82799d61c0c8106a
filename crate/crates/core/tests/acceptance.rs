//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use local_racing::control::{fit_velocity_profile, stanley_steering, LateralErrors, StanleyGains, VelocityLimits};
use local_racing::geometry::{Point2, Polyline, Pose2};
use local_racing::harness::{generate_track, load_config, simulate, ControllerKind, LapReport, Platform, RunLimits, TrackKind, TrackParams};
use local_racing::planning::{estimate_track_width, laplacian_smooth, opheim_simplify, plan_pipeline, PlannerParams, SmoothingParams, WidthProfile};
use local_racing::perception::{WallPair, WallSegment};
use local_racing::sim::{cast_lidar, SensorConfig, Walls};
use local_racing::spline::{ControlPoint, PathSpline};

const FEASIBILITY_CASES: usize = 200;
const ORACLE_CASES: usize = 100;
const ORACLE_TOL: f64 = 1e-9;
const STANLEY_SAMPLES: usize = 1000;
const WORKED_STEERING: f64 = 0.03570;
const WORKED_TOL: f64 = 5e-6;
const CENTERLINE_TOL: f64 = 0.05;
const STEP_TARGET_TOL: f64 = 0.05;
const STEP_BAND: (f64, f64) = (0.95, 2.05);
const LAP_TIME_RATIO: f64 = 0.85;
const FTG_RATIO: f64 = 1.10;
const KNOT_TOL: f64 = 1e-9;
const CIRCLE_KAPPA_TOL: f64 = 0.04;
const SESSION_LAPS: usize = 5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("velocity-profile feasibility", Duration::from_secs(5), feasibility),
        ("velocity-profile oracle equivalence", Duration::from_secs(5), oracle_equivalence),
        ("stanley identities", Duration::from_secs(1), stanley_identities),
        ("centerline accuracy", Duration::from_secs(5), centerline_accuracy),
        ("width step tracking", Duration::from_secs(2), width_step),
        ("tuning-arc lap-time reduction", Duration::from_secs(60), tuning_arc),
        ("follow-the-gap comparison", Duration::from_secs(60), ftg_comparison),
        ("trace determinism", Duration::from_secs(30), determinism),
        ("geometry checks", Duration::from_secs(2), geometry_checks),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= *budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {} {:<36} {}  {} ({:.2} s of {} s)",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

// ---- velocity profile ----

fn random_limits(rng: &mut ChaCha8Rng) -> VelocityLimits {
    let a_y_max = rng.random_range(1.0..8.0);
    // Keeps every curvature cap on |kappa| <= 2 above v_min.
    let v_min = rng.random_range(0.2..(a_y_max / 2.0f64).sqrt());
    VelocityLimits {
        v_min,
        v_max: v_min + rng.random_range(0.5..10.0),
        a_x_max: rng.random_range(0.5..6.0),
        a_x_min: rng.random_range(0.5..8.0),
        a_y_max,
        da_min: -1.0,
        da_max: 1.0,
    }
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<ControlPoint> {
    let mut p = Point2::new(0.0, 0.0);
    let mut psi: f64 = 0.0;
    let mut s = 0.0;
    (0..n)
        .map(|i| {
            if i > 0 {
                let step = rng.random_range(0.02..0.6);
                p = p + Point2::new(psi.cos(), psi.sin()) * step;
                s += step;
            }
            let kappa = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(-2.0..2.0) };
            psi += rng.random_range(-0.2..0.2);
            ControlPoint { position: p, psi_cp: psi, kappa, s }
        })
        .collect()
}

fn feasibility() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = String::new();
    for case in 0..FEASIBILITY_CASES {
        let n = rng.random_range(5..=200);
        let pts = random_points(&mut rng, n);
        let lim = random_limits(&mut rng);
        let seed = rng.random_range(0.0..12.0);
        let v = match fit_velocity_profile(&pts, seed, &lim) {
            Ok(p) => p.v,
            Err(e) => return outcome(false, format!("case {case}: {e}")),
        };
        for i in 0..n {
            if v[i] < lim.v_min - 1e-12 || v[i] > lim.v_max + 1e-12 {
                worst = format!("case {case} point {i}: speed {} outside bounds", v[i]);
            }
            if v[i] * v[i] * pts[i].kappa.abs() > lim.a_y_max + 1e-9 {
                worst = format!("case {case} point {i}: lateral limit exceeded");
            }
            if i + 1 < n {
                let ds = pts[i + 1].position.distance(pts[i].position);
                let a = (v[i + 1] * v[i + 1] - v[i] * v[i]) / (2.0 * ds);
                if a > lim.a_x_max + 1e-9 || a < -(lim.a_x_min + 1e-9) {
                    worst = format!("case {case} point {i}: longitudinal limit exceeded ({a})");
                }
            }
        }
        if !worst.is_empty() {
            return outcome(false, worst);
        }
    }
    outcome(true, format!("{FEASIBILITY_CASES} random profiles within all limits"))
}

/// Repeated forward and backward relaxation of every pairwise constraint
/// until nothing moves.
fn relaxation_oracle(pts: &[ControlPoint], v_seed: f64, lim: &VelocityLimits) -> Vec<f64> {
    let n = pts.len();
    let cap = |k: f64| if k == 0.0 { f64::INFINITY } else { (lim.a_y_max / k.abs()).sqrt() };
    let mut v: Vec<f64> = pts.iter().map(|p| cap(p.kappa).min(lim.v_max).max(lim.v_min)).collect();
    v[0] = v[0].min(v_seed.clamp(lim.v_min, lim.v_max));
    v[n - 1] = lim.v_min;
    for _ in 0..100_000 {
        let before = v.clone();
        for i in 1..n {
            let ds = pts[i].position.distance(pts[i - 1].position);
            v[i] = v[i].min((v[i - 1].powi(2) + 2.0 * ds * lim.a_x_max).sqrt()).max(lim.v_min);
        }
        for i in (0..n - 1).rev() {
            let ds = pts[i + 1].position.distance(pts[i].position);
            v[i] = v[i].min((v[i + 1].powi(2) + 2.0 * ds * lim.a_x_min).sqrt()).max(lim.v_min);
        }
        if v.iter().zip(&before).all(|(a, b)| (a - b).abs() <= 1e-12) {
            break;
        }
    }
    v
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut max_diff: f64 = 0.0;
    for _ in 0..ORACLE_CASES {
        let n = rng.random_range(2..=20);
        let pts = random_points(&mut rng, n);
        let lim = random_limits(&mut rng);
        let seed = rng.random_range(0.0..12.0);
        let Ok(prof) = fit_velocity_profile(&pts, seed, &lim) else {
            return outcome(false, "profile fit failed");
        };
        let oracle = relaxation_oracle(&pts, seed, &lim);
        for (a, b) in prof.v.iter().zip(&oracle) {
            max_diff = max_diff.max((a - b).abs());
        }
    }
    outcome(max_diff < ORACLE_TOL, format!("{ORACLE_CASES} instances, max difference {max_diff:.2e}"))
}

// ---- steering ----

fn base_gains() -> StanleyGains {
    StanleyGains {
        k_ang: 0.6,
        k_dist: 0.5,
        k_soft: 5.0,
        k_damp: 1.0,
        k_rate: -0.013,
        k_steer: 0.0,
        l_max: 0.2,
        kappa_norm: 1.0,
    }
}

fn stanley_identities() -> Outcome {
    let zero = LateralErrors { delta_psi: 0.0, delta_d: 0.0, delta_r: 0.0, delta_delta: 0.0 };
    let g = base_gains();
    if stanley_steering(&zero, 3.0, &g) != Ok(0.0) {
        return outcome(false, "zero errors give nonzero steering");
    }
    let worked = LateralErrors { delta_d: 0.5, ..zero };
    let Ok(d) = stanley_steering(&worked, 2.0, &g) else {
        return outcome(false, "worked example rejected");
    };
    if (d - WORKED_STEERING).abs() > WORKED_TOL || (d - (0.25f64 / 7.0).atan()).abs() > 1e-12 {
        return outcome(false, format!("worked example gives {d}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for i in 0..STANLEY_SAMPLES {
        let gains = StanleyGains {
            k_ang: rng.random_range(0.01..2.0),
            k_dist: rng.random_range(0.01..3.0),
            k_soft: rng.random_range(0.1..20.0),
            k_damp: rng.random_range(0.0..20.0),
            k_rate: rng.random_range(-0.1..0.1),
            k_steer: rng.random_range(-0.5..0.5),
            l_max: 0.5,
            kappa_norm: 1.0,
        };
        let e = LateralErrors {
            delta_psi: rng.random_range(-1.0..1.0),
            delta_d: rng.random_range(-2.0..2.0),
            delta_r: rng.random_range(-3.0..3.0),
            delta_delta: rng.random_range(-0.2..0.2),
        };
        let v = rng.random_range(0.0..10.0);
        let bump = rng.random_range(0.01..0.5);
        let (Ok(a), Ok(b)) = (stanley_steering(&e, v, &gains), stanley_steering(&-e, v, &gains)) else {
            return outcome(false, format!("sample {i} rejected"));
        };
        if (a + b).abs() > 1e-12 {
            return outcome(false, format!("sample {i}: not odd ({a} vs {b})"));
        }
        let more_d = LateralErrors { delta_d: e.delta_d + bump, ..e };
        let more_psi = LateralErrors { delta_psi: e.delta_psi + bump, ..e };
        if stanley_steering(&more_d, v, &gains).unwrap() <= a || stanley_steering(&more_psi, v, &gains).unwrap() <= a {
            return outcome(false, format!("sample {i}: not increasing"));
        }
    }
    outcome(true, format!("zero, worked value {d:.5} rad, {STANLEY_SAMPLES} symmetry/monotonicity samples"))
}

// ---- planning ----

fn corridor_sensor() -> SensorConfig {
    SensorConfig::default()
}

/// Straight corridor through the origin along `heading`, walls from 2 m
/// behind to 6 m ahead. A hidden wall is moved out of sensor range.
fn corridor(width: f64, heading: f64, hide: Option<bool>) -> Walls {
    let dir = Point2::new(heading.cos(), heading.sin());
    let normal = dir.perp();
    let wall = |offset: f64| Polyline::new(vec![dir * -2.0 + normal * offset, dir * 6.0 + normal * offset]).unwrap();
    let left = if hide == Some(true) { 100.0 } else { width / 2.0 };
    let right = if hide == Some(false) { -100.0 } else { -width / 2.0 };
    Walls::new(wall(left), wall(right), false)
}

fn centerline_accuracy() -> Outcome {
    let params = PlannerParams::default();
    let sensor = corridor_sensor();
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for width in [1.0, 2.0, 3.0] {
        let mut memory = WidthProfile::default();
        for heading_deg in [0.0f64, 30.0, 75.0] {
            let heading = heading_deg.to_radians();
            let pose = Pose2::new(0.0, 0.0, heading);
            for hide in [None, Some(true), Some(false)] {
                let scan = cast_lidar(&corridor(width, heading, hide), &pose, &sensor, runs as u64);
                let plan = match plan_pipeline(&scan, &memory, &params) {
                    Ok(p) => p,
                    Err(e) => return outcome(false, format!("width {width}, heading {heading_deg}: {e}")),
                };
                let err = plan.stages.centerline.iter().map(|p| p.y.abs()).fold(0.0, f64::max);
                if err >= CENTERLINE_TOL {
                    return outcome(false, format!("width {width}, heading {heading_deg}, hidden {hide:?}: error {err:.4} m"));
                }
                worst = worst.max(err);
                runs += 1;
                if hide.is_none() {
                    memory = plan.width;
                }
            }
        }
    }
    outcome(true, format!("{runs} corridors, max lateral error {worst:.4} m"))
}

fn line(x0: f64, x1: f64, y: f64, step: f64) -> Vec<Point2> {
    let n = ((x1 - x0) / step).round() as usize;
    (0..=n).map(|i| Point2::new(x0 + i as f64 * step, y)).collect()
}

fn width_step() -> Outcome {
    let mut left = line(0.0, 4.0, 0.5, 0.02);
    left.extend((1..50).map(|i| Point2::new(4.0, 0.5 + i as f64 * 0.02)));
    left.extend(line(4.0, 8.0, 1.5, 0.02));
    let right = line(0.0, 9.5, -0.5, 0.02);
    let walls = WallPair { left: Some(WallSegment::new(left)), right: Some(WallSegment::new(right)) };
    let params = SmoothingParams::default();
    let prof = estimate_track_width(&walls, &WidthProfile::new(1.0), &params);
    let Some(step) = prof.samples.iter().position(|s| s.anchor.x > 4.0) else {
        return outcome(false, "no samples past the step");
    };
    let (lo, hi) = STEP_BAND;
    if let Some(w) = prof.smoothed.iter().find(|w| !(lo..=hi).contains(*w)) {
        return outcome(false, format!("sample {w:.4} outside [{lo}, {hi}]"));
    }
    let reached = prof.smoothed[step..=(step + params.width_window).min(prof.smoothed.len() - 1)]
        .iter()
        .position(|w| (w - 2.0).abs() <= STEP_TARGET_TOL);
    match reached {
        Some(k) => outcome(true, format!("reaches 2.00 m {k} samples after the step (window {})", params.width_window)),
        None => outcome(false, "never within tolerance of 2.00 m inside one window"),
    }
}

// ---- closed loop ----

fn session(kind: ControllerKind, file: &str, laps: usize, seed: u64) -> Result<LapReport, String> {
    let track = generate_track(TrackKind::PaperLike, 0, &TrackParams::default()).map_err(|e| e.to_string())?;
    let cfg = load_config(kind, &configs_dir().join(file)).map_err(|e| e.to_string())?;
    simulate(&track, &cfg, &Platform::default(), &RunLimits { laps, seed, timeout: 300.0 }, None, None).map_err(|e| e.to_string())
}

fn clean(r: &LapReport, laps: usize) -> bool {
    r.completed && r.collisions == 0 && r.lap_times.len() == laps
}

fn tuning_arc() -> Outcome {
    let (base, opt) = match (
        session(ControllerKind::Stanley, "base.cfg", SESSION_LAPS, 0),
        session(ControllerKind::Stanley, "optimal.cfg", SESSION_LAPS, 0),
    ) {
        (Ok(b), Ok(o)) => (b, o),
        (Err(e), _) | (_, Err(e)) => return outcome(false, e),
    };
    if !clean(&base, SESSION_LAPS) {
        return outcome(false, format!("base did not finish cleanly: {:?}", base.end));
    }
    if !clean(&opt, SESSION_LAPS) {
        return outcome(false, format!("optimal did not finish cleanly: {:?}", opt.end));
    }
    let b = base.steady_state_mean().unwrap();
    let o = opt.steady_state_mean().unwrap();
    outcome(
        o <= LAP_TIME_RATIO * b,
        format!("base {b:.3} s, optimal {o:.3} s, reduction {:.1}%", 100.0 * (1.0 - o / b)),
    )
}

fn ftg_comparison() -> Outcome {
    let (ftg, opt) = match (
        session(ControllerKind::Ftg, "ftg.cfg", SESSION_LAPS, 0),
        session(ControllerKind::Stanley, "optimal.cfg", SESSION_LAPS, 0),
    ) {
        (Ok(f), Ok(o)) => (f, o),
        (Err(e), _) | (_, Err(e)) => return outcome(false, e),
    };
    if !clean(&ftg, SESSION_LAPS) || !clean(&opt, SESSION_LAPS) {
        return outcome(false, format!("ftg {:?}, optimal {:?}", ftg.end, opt.end));
    }
    let f = ftg.steady_state_mean().unwrap();
    let o = opt.steady_state_mean().unwrap();
    outcome(f >= FTG_RATIO * o, format!("ftg {f:.3} s, optimal {o:.3} s, ratio {:.3}", f / o))
}

fn determinism() -> Outcome {
    let track = match generate_track(TrackKind::PaperLike, 0, &TrackParams::default()) {
        Ok(t) => t,
        Err(e) => return outcome(false, e.to_string()),
    };
    let cfg = match load_config(ControllerKind::Stanley, &configs_dir().join("optimal.cfg")) {
        Ok(c) => c,
        Err(e) => return outcome(false, e.to_string()),
    };
    let limits = RunLimits { laps: 1, seed: 42, timeout: 60.0 };
    let run = || {
        let mut buf = Vec::new();
        simulate(&track, &cfg, &Platform::default(), &limits, Some(&mut buf), None).map(|_| buf)
    };
    match (run(), run()) {
        (Ok(a), Ok(b)) => outcome(
            !a.is_empty() && a == b,
            format!("{} trace bytes, identical: {}", a.len(), a == b),
        ),
        (Err(e), _) | (_, Err(e)) => outcome(false, e.to_string()),
    }
}

// ---- geometry ----

fn geometry_checks() -> Outcome {
    let pts: Vec<Point2> = (0..25)
        .map(|i| {
            let x = i as f64 * 0.4 + 0.05 * (i as f64 * 1.3).sin();
            Point2::new(x, (0.7 * x).sin())
        })
        .collect();
    let Ok(spline) = PathSpline::fit(&pts) else {
        return outcome(false, "spline fit failed");
    };
    let knot_err = spline
        .knots()
        .iter()
        .zip(&pts)
        .map(|(&s, p)| spline.eval_clamped(s).position.distance(*p))
        .fold(0.0, f64::max);
    if knot_err >= KNOT_TOL {
        return outcome(false, format!("knot error {knot_err:.2e}"));
    }

    let r = 2.0;
    let arc: Vec<Point2> = (0..=24).map(|i| Point2::from_polar(r, -PI / 2.0 + i as f64 * PI / 24.0)).collect();
    let Ok(circle) = PathSpline::fit(&arc) else {
        return outcome(false, "circle fit failed");
    };
    let kappa_err = circle
        .sample(0.05)
        .iter()
        .map(|cp| (cp.kappa * r - 1.0).abs())
        .fold(0.0, f64::max);
    if kappa_err > CIRCLE_KAPPA_TOL {
        return outcome(false, format!("circle curvature off by {:.2}%", 100.0 * kappa_err));
    }

    let params = SmoothingParams { laplacian_iterations: 1, laplacian_lambda: 0.5, ..SmoothingParams::default() };
    let hand = [Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(2.0, 0.0)];
    let smoothed = match laplacian_smooth(&hand, &params) {
        Ok(s) => s,
        Err(e) => return outcome(false, e.to_string()),
    };
    if smoothed != [hand[0], Point2::new(1.0, 0.5), hand[2]] {
        return outcome(false, format!("laplacian hand example gives {smoothed:?}"));
    }

    let collinear: Vec<Point2> = (0..100).map(|i| Point2::new(i as f64 * 0.01, 0.0)).collect();
    let op = SmoothingParams { opheim_min_tol: 0.01, opheim_max_tol: 1.0, ..SmoothingParams::default() };
    let simplified = opheim_simplify(&collinear, &op);
    if simplified != [collinear[0], collinear[99]] {
        return outcome(false, format!("opheim kept {} of 100 collinear points", simplified.len()));
    }
    outcome(
        true,
        format!("knot error {knot_err:.1e}, circle curvature within {:.2}%, laplacian and opheim exact", 100.0 * kappa_err),
    )
}
