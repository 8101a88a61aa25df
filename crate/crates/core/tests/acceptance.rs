//! Acceptance criteria. Runs as a plain binary (`harness = false`) so every
//! criterion prints exactly one PASS/FAIL line; the process fails if any
//! criterion fails.

use std::time::Instant;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sletool::cam;
use sletool::insertion::{
    self, spiral_search, ForceSensor, ImpedanceGains, ImpedanceState, InsertionWorld,
    Scenario, SpiralOptions, Trajectory,
};
use sletool::kinematics::{self, AlphaBounds, CycleModel, PadHeightAngle};
use sletool::quasistatics::{self, FingerLever, RatchetMode, TorqueModel};
use sletool::spring_opt;
use sletool::stability::{self, hull::ConvexHull, StabilityConfig, Vec3};
use sletool::{GripperParams, ToolParams};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c1_torque_identity() -> Outcome {
    let t0 = Instant::now();
    let base = ToolParams::default();
    let b = AlphaBounds::from_params(&base).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let alpha = rng.random_range(b.alpha_min..=b.alpha_init);
        let d = rng.random_range(5.0..80.0);
        let f = rng.random_range(0.0..200.0);
        let p = ToolParams {
            xi: rng.random_range(0.0..40.0),
            ..base
        };
        let sq = quasistatics::torque_squeeze(alpha, f, d, &p).unwrap().torque;
        let st = quasistatics::torque_stretch(alpha, d, &p).unwrap();
        let expect = f * d;
        let err = ((sq + st) - expect).abs() / expect.abs().max(1e-300);
        worst = worst.max(if expect == 0.0 { (sq + st).abs() } else { err });
    }
    let ms = t0.elapsed().as_secs_f64() * 1e3;
    outcome(
        worst <= 1e-9 && ms < 1000.0,
        format!("T_sqz + T_stch = F·d on 1000 random points: max rel err {worst:.2e} (tol 1e-9), {ms:.1} ms (limit 1000 ms)"),
    )
}

fn c2_kinematics() -> Outcome {
    let p = ToolParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut round_trip = 0.0f64;
    for _ in 0..1000 {
        let w = rng.random_range(p.w_tool_min..=p.w_tool_max);
        let a = kinematics::width_to_alpha(w, &p).unwrap();
        round_trip = round_trip.max((kinematics::alpha_to_width(a, &p).unwrap() - w).abs());
    }
    let model = CycleModel::new(150.0, 150.0, &p).unwrap();
    let (sq, st) = model.first_cycle_branches(model.t_m());
    let jump = (sq - st).abs();
    let samples_per_cycle = 16;
    let n_cycles = 10_000;
    let dt = model.period() / samples_per_cycle as f64;
    let mut prev = f64::NEG_INFINITY;
    let mut monotone = true;
    for i in 0..=(n_cycles * samples_per_cycle) {
        let d = model.sample(i as f64 * dt).unwrap().delta_out;
        if d < prev {
            monotone = false;
        }
        prev = d;
    }
    outcome(
        round_trip <= 1e-9 && jump <= 1e-9 && monotone,
        format!(
            "width/alpha round trip {round_trip:.2e} mm (tol 1e-9), branch gap at t_m {jump:.2e} deg (tol 1e-9), \
             delta_out non-decreasing over {n_cycles} cycles: {monotone}"
        ),
    )
}

fn c3_beta_peak() -> Outcome {
    let p = ToolParams {
        r_drv: 20.0,
        ..ToolParams::default()
    };
    let alpha = 45.0;
    let f = GripperParams::default().f_grpr_max;
    let mut best_sq = (f64::NEG_INFINITY, 0.0);
    let mut best_st = (f64::NEG_INFINITY, 0.0);
    for i in 0..=900 {
        let beta = i as f64 * 0.1;
        let g = GripperParams {
            beta,
            ..GripperParams::default()
        };
        let d = quasistatics::d_finger_with(&g, FingerLever::Projected);
        let sq = quasistatics::torque_squeeze(alpha, f, d, &p).unwrap().torque;
        let st = quasistatics::torque_stretch(alpha, d, &p).unwrap();
        if sq > best_sq.0 {
            best_sq = (sq, beta);
        }
        if st > best_st.0 {
            best_st = (st, beta);
        }
    }
    let ok = (best_sq.1 - 60.0).abs() <= 5.0 && (best_st.1 - 60.0).abs() <= 5.0;
    outcome(
        ok,
        format!(
            "beta sweep at alpha=45, r_drv=20 (projected lever): T_sqz peak at {:.1} deg, T_stch peak at {:.1} deg (target 60 ± 5)",
            best_sq.1, best_st.1
        ),
    )
}

fn c4_spring_opt() -> Outcome {
    let p = ToolParams::default();
    let t0 = Instant::now();
    let a = spring_opt::optimize_xi(125.0, 45.0, &p, (0.5, 100.0), TorqueModel::default()).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let b = spring_opt::optimize_xi(125.0, 45.0, &p, (0.5, 100.0), TorqueModel::default()).unwrap();
    let deterministic = a.xi.to_bits() == b.xi.to_bits();
    let in_band = (15.0..=25.0).contains(&a.xi);
    outcome(
        in_band && deterministic && secs < 5.0,
        format!(
            "xi* = {:.2} N·mm/deg (band [15, 25]; reference 19.52 / 19.27), deterministic: {deterministic}, {secs:.2} s (limit 5 s)",
            a.xi
        ),
    )
}

fn c5_screws() -> Outcome {
    let mut ok = true;
    let mut seen = Vec::new();
    for t_sqz in [3830.0, 3935.0, 4040.0] {
        let cells = quasistatics::fastenable_screws(t_sqz, 0.0, RatchetMode::SingleRatchet).unwrap();
        let gate = quasistatics::fastening_gate(t_sqz, 0.0, RatchetMode::SingleRatchet) / 1000.0;
        let largest = quasistatics::largest_size_for_class(&cells, "4.8");
        ok &= largest == Some("M5") && (2.65..4.50).contains(&gate);
        seen.push(format!("{:.2} N·m -> {}", gate, largest.unwrap_or("none")));
    }
    outcome(ok, format!("single ratchet, class 4.8 largest size: {} (expected M5)", seen.join(", ")))
}

fn c6_geometry() -> Outcome {
    let p = ToolParams::default();
    let travel = kinematics::max_rotational_travel(&p).unwrap();
    let h = kinematics::min_pad_height(&p, PadHeightAngle::Closed).unwrap();
    let travel_ok = (travel - 62.44).abs() <= 0.01;
    let h_ok = (50.0..=60.0).contains(&h);
    outcome(
        travel_ok && h_ok,
        format!("max rotational travel {travel:.4} deg (target 62.44 ± 0.01): {travel_ok}; closed-state pad height {h:.2} mm (range [50, 60]): {h_ok}"),
    )
}

fn c7_cam() -> Outcome {
    let p = ToolParams::default();
    let t0 = Instant::now();
    let prof = cam::synthesize(&p, 10_000).unwrap();
    let ms = t0.elapsed().as_secs_f64() * 1e3;
    let tangency = prof
        .samples
        .iter()
        .map(|s| (s.profile.distance(s.wheel) - p.r_whl).abs())
        .fold(0.0, f64::max);
    let mut normal = 0.0f64;
    let n = prof.samples.len();
    for s in &prof.samples[1..n - 1] {
        let analytic = cam::normal_angle(s.alpha, &p).unwrap();
        let fd = cam::normal_angle_fd(s.alpha, &p, 1e-5).unwrap();
        normal = normal.max((analytic - fd).abs());
    }
    outcome(
        tangency <= 1e-9 && normal <= 1e-6 && ms < 1000.0,
        format!("tangency error {tangency:.2e} mm (tol 1e-9), normal error {normal:.2e} rad (tol 1e-6), 10^4 samples in {ms:.1} ms (limit 1000 ms)"),
    )
}

fn fibonacci_directions(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let th = golden * i as f64;
            Vec3::new(r * th.cos(), r * th.sin(), z)
        })
        .collect()
}

fn support(pts: &[Vec3], u: &Vec3) -> f64 {
    pts.iter().map(|v| u.dot(v)).fold(f64::NEG_INFINITY, f64::max)
}

/// min over unit directions of the support function: dense sampling, then
/// shrinking-cone resampling around the best few samples.
fn sampled_margin(pts: &[Vec3], dirs: &[Vec3]) -> f64 {
    let mut scored: Vec<(f64, Vec3)> = dirs.iter().map(|u| (support(pts, u), *u)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = scored[0].0;
    for &(h0, u0) in scored.iter().take(16) {
        let (mut h, mut u) = (h0, u0);
        let mut radius = 0.05;
        while radius > 1e-7 {
            let a = u.cross(&Vec3::x()).try_normalize(1e-6).unwrap_or_else(|| u.cross(&Vec3::y()).normalize());
            let b = u.cross(&a);
            let mut improved = false;
            for k in 0..16 {
                let th = std::f64::consts::TAU * k as f64 / 16.0;
                let cand = (u + (a * th.cos() + b * th.sin()) * radius).normalize();
                let hc = support(pts, &cand);
                if hc < h {
                    h = hc;
                    u = cand;
                    improved = true;
                }
            }
            if !improved {
                radius *= 0.5;
            }
        }
        best = best.min(h);
    }
    best
}

fn c8_stability() -> Outcome {
    let p = ToolParams::default();
    let b = AlphaBounds::from_params(&p).unwrap();
    let cfg = StabilityConfig::default();
    let r_values = [6.0, 8.0, 10.0, 12.0, 14.0, 16.0];
    let n_alpha = 21;
    let alphas: Vec<f64> = (0..n_alpha)
        .map(|i| b.alpha_min + b.travel() * i as f64 / (n_alpha - 1) as f64)
        .collect();
    let grid = stability::sweep_stability(&p, &r_values, &alphas, 6.5, &cfg).unwrap();

    let non_negative = grid.cells.iter().all(|c| c.q.is_none_or(|q| q >= 0.0));
    let mut monotone_rows = Vec::new();
    for (i, r) in r_values.iter().enumerate() {
        let row: Vec<f64> = grid.row(i).into_iter().flatten().collect();
        let ok = row.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let peak = row
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |a, (j, &q)| if q > a.1 { (j, q) } else { a });
        monotone_rows.push((*r, ok, alphas[peak.0]));
    }
    let monotone = monotone_rows.iter().all(|r| r.1);

    let mut homog = 0.0f64;
    for &a in &alphas {
        let q1 = stability::pad_stability(a, &p, &cfg).unwrap();
        let q3 = stability::pad_stability(a, &p, &StabilityConfig { force_limit: 3.0, ..cfg }).unwrap();
        homog = homog.max((q3 - 3.0 * q1).abs() / q1.max(1e-300));
    }

    let dirs = fibonacci_directions(4_000);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut tested = 0;
    while tested < 50 {
        let n = rng.random_range(8..20);
        let pts: Vec<Vec3> = (0..n)
            .map(|_| {
                Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ) * rng.random_range(0.5..2.0)
            })
            .collect();
        let Some(h) = ConvexHull::build(&pts) else { continue };
        let q = h.origin_margin();
        if q <= 0.0 {
            continue;
        }
        let sampled = sampled_margin(&pts, &dirs);
        worst = worst.max((sampled - q).abs() / q);
        tested += 1;
    }

    let rows: Vec<String> = monotone_rows
        .iter()
        .map(|(r, ok, peak)| format!("r_sprt={r}: {}", if *ok { "monotone".to_string() } else { format!("peak at {peak:.1} deg") }))
        .collect();
    outcome(
        non_negative && homog <= 1e-9 && monotone && worst <= 0.02,
        format!(
            "Q >= 0: {non_negative}; homogeneity err {homog:.2e} (tol 1e-9); oracle max rel diff {:.2}% on 50 polytopes (tol 2%); \
             Q(alpha) non-increasing on [{:.2}, {:.2}] deg: {monotone} [{}]; absolute values are not comparable to published ones (force limits unreported)",
            worst * 100.0,
            b.alpha_min,
            b.alpha_init,
            rows.join("; ")
        ),
    )
}

fn rodrigues_oracle(theta_deg: f64, k: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    let (s, c) = theta_deg.to_radians().sin_cos();
    v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c))
}

fn random_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let mut s = Scenario::default();
    let world = InsertionWorld {
        socket_pose: nalgebra::Isometry3::new(
            Vector3::new(
                rng.random_range(-50.0..50.0),
                rng.random_range(-50.0..50.0),
                rng.random_range(-20.0..20.0),
            ),
            Vector3::new(
                rng.random_range(-0.3..0.3),
                rng.random_range(-0.3..0.3),
                rng.random_range(-3.0..3.0),
            ),
        ),
        ..InsertionWorld::default()
    };
    let r = s.search_bound * rng.random::<f64>().sqrt();
    let phi = rng.random_range(0.0..std::f64::consts::TAU);
    s.world = world;
    s.start_local = Vector3::new(r * phi.cos(), r * phi.sin(), rng.random_range(0.5..4.0));
    s.yaw_offset = rng.random_range(0.0..60.0);
    s.grpr_rpy = [
        rng.random_range(-180.0..180.0),
        rng.random_range(-90.0..90.0),
        rng.random_range(-180.0..180.0),
    ];
    s
}

fn c9_insertion() -> Outcome {
    let t0 = Instant::now();

    // steady contact force against a flat face
    let world = InsertionWorld::default();
    let v_att = world.attack_vector();
    let f_insrt = 5.0;
    let mut ctrl =
        ImpedanceState::at_rest(Vector3::new(4.0, 0.0, 0.0), v_att * f_insrt, ImpedanceGains::default()).unwrap();
    let settle = 500;
    for _ in 0..settle {
        let f = world.contact_force(&ctrl.p_curr, 20.0);
        ctrl.advance(f);
    }
    let contact = -world.contact_force(&ctrl.p_curr, 20.0).dot(&v_att);
    let steady_err = (contact - f_insrt).abs() / f_insrt;

    // spiral recurrence replay
    let s = Scenario::default();
    let plan = s.spiral_plan().unwrap();
    let mut sensor = ForceSensor::ideal(nalgebra::Rotation3::identity());
    let mut log = Trajectory::new(s.gains.dt);
    let p0 = Vector3::new(4.5, 0.0, -0.11);
    let sp = spiral_search(p0, &plan, &world, &mut sensor, 20.0, SpiralOptions::default(), &mut log).unwrap();
    let mut replay = 0.0f64;
    for i in 0..sp.waypoints.len() - 1 {
        let expect = sp.waypoints[i]
            + rodrigues_oracle(plan.theta(i + 1), &plan.v_att, &plan.v_sprl) * plan.r(i + 1);
        replay = replay.max((sp.waypoints[i + 1] - expect).amax());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = Vec::new();
    for i in 0..100 {
        let sc = random_scenario(&mut rng);
        match insertion::run_scenario(&sc) {
            Ok(o) if o.insertion.success => {}
            Ok(_) => failures.push(format!("#{i}: no success")),
            Err(e) => failures.push(format!("#{i}: {e}")),
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    outcome(
        steady_err <= 0.01 && replay <= 1e-12 && failures.is_empty() && secs < 30.0,
        format!(
            "steady force err {:.3}% after {settle} steps (tol 1%); spiral replay err {replay:.1e} mm over {} steps (tol 1e-12); \
             randomized scenarios: {} failures of 100{}; {secs:.1} s (limit 30 s)",
            steady_err * 100.0,
            sp.waypoints.len() - 1,
            failures.len(),
            if failures.is_empty() { String::new() } else { format!(" [{}]", failures.join(", ")) }
        ),
    )
}

fn c10_cycle_time() -> Outcome {
    let p = ToolParams::default();
    let model = CycleModel::new(150.0, 150.0, &p).unwrap();
    let t = model.time_to_angle(360.0).unwrap();
    let measured = 5.8;
    let ok = t <= measured && t * 3.0 >= measured;
    outcome(
        ok,
        format!("ideal 360 deg time at 150 mm/s: {t:.3} s vs measured {measured} s (ideal model: no slip, instant reversal)"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("algebraic identity", c1_torque_identity),
        ("kinematics round trip and continuity", c2_kinematics),
        ("holding-angle peak", c3_beta_peak),
        ("spring optimizer", c4_spring_opt),
        ("screw capability", c5_screws),
        ("geometry", c6_geometry),
        ("cam profile", c7_cam),
        ("stability", c8_stability),
        ("insertion", c9_insertion),
        ("cycle timing", c10_cycle_time),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{tag}] {name}: {}", i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
