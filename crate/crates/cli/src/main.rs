//! `sletool`: batch front end for the screwing-tool design analyses.
//!
//! Curves go out as CSV, scalar results as JSON report envelopes. Exit
//! status is 0 on success, 2 for configuration or input errors and 3 when
//! the analysis itself is infeasible.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod grid;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sletool::cam;
use sletool::insertion;
use sletool::kinematics::{self, AlphaBounds, CycleModel, PadHeightAngle};
use sletool::params::{self, LoadedParams};
use sletool::quasistatics::{self, FingerLever, RatchetMode, SpringAggregation, SpringSign, TorqueModel};
use sletool::report::{input_digest, numeric_csv, ReportEnvelope};
use sletool::spring_opt;
use sletool::stability::{self, StabilityConfig};
use sletool::{Error, GripperParams, ToolParams};

use grid::{Grid, Range};

/// Measured time for a full output revolution of the fabricated tool, s.
const MEASURED_360_S: f64 = 5.8;

#[derive(Parser, Debug)]
#[command(name = "sletool", version, about = "Design analysis for a gripper-driven SLE screwing tool")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Io {
    /// Parameter file (`key = value`); built-in prototype values otherwise.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Main output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report envelope destination.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SignArg {
    Compressive,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AggregationArg {
    Single,
    FourSpring,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LeverArg {
    Printed,
    Projected,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Torsional spring coefficient, N·mm/deg.
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long, value_enum, default_value = "compressive")]
    spring_sign: SignArg,
    #[arg(long, value_enum, default_value = "single")]
    aggregation: AggregationArg,
}

impl ModelArgs {
    fn model(&self) -> TorqueModel {
        TorqueModel {
            spring_sign: match self.spring_sign {
                SignArg::Compressive => SpringSign::Compressive,
                SignArg::AsPrinted => SpringSign::AsPrinted,
            },
            aggregation: match self.aggregation {
                AggregationArg::Single => SpringAggregation::Single,
                AggregationArg::FourSpring => SpringAggregation::FourSpring,
            },
        }
    }
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Squeeze/stretch output torque over an α, width or holding-angle grid.
    Torque {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        model: ModelArgs,
        /// Arm-angle grid, degrees.
        #[arg(long, conflicts_with_all = ["width", "beta"])]
        alpha: Option<Grid>,
        /// Pad-width grid, mm.
        #[arg(long, conflicts_with = "beta")]
        width: Option<Grid>,
        /// Holding-angle grid, degrees, evaluated at `--alpha-deg`.
        #[arg(long)]
        beta: Option<Grid>,
        /// Fixed arm angle for the holding-angle sweep, degrees.
        #[arg(long, default_value_t = 45.0)]
        alpha_deg: f64,
        /// Holding angle, degrees.
        #[arg(long)]
        beta_deg: Option<f64>,
        /// Finger lever arm, mm; computed from the finger pad otherwise.
        #[arg(long, conflicts_with = "beta")]
        d_fgr_mm: Option<f64>,
        #[arg(long, value_enum, default_value = "printed")]
        d_fgr_form: LeverArg,
        /// Gripper force, N.
        #[arg(long)]
        f_grpr: Option<f64>,
    },
    /// Output angle over repeated squeeze/stretch cycles.
    Angle {
        #[command(flatten)]
        io: Io,
        /// Squeezing speed, mm/s.
        #[arg(long)]
        v_sqz: Option<f64>,
        /// Stretching speed, mm/s.
        #[arg(long)]
        v_stch: Option<f64>,
        /// Simulated time, s.
        #[arg(long, default_value_t = 10.0)]
        duration: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        /// Output angle whose reaching time is reported, degrees.
        #[arg(long, default_value_t = 360.0)]
        target_deg: f64,
    },
    /// Angle bounds, rotational travel and pad height.
    Geometry {
        #[command(flatten)]
        io: Io,
    },
    /// Balanced spring coefficient and catalog pick.
    SpringOpt {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        f_grpr: Option<f64>,
        #[arg(long, default_value_t = 45.0)]
        d_fgr_mm: f64,
        /// Search interval `lo:hi`, N·mm/deg.
        #[arg(long, default_value = "0.5:100")]
        range: Range,
        /// Spring catalog (`[spring]` blocks); a small built-in set otherwise.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Largest spring outer diameter that fits, mm.
        #[arg(long, default_value_t = spring_opt::DEFAULT_MAX_SPRING_DIAMETER)]
        max_diameter: f64,
    },
    /// Curved inner pad profile.
    Cam {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Also write an `x y` polyline here.
        #[arg(long)]
        polyline: Option<PathBuf>,
    },
    /// Structural stability index over supporting-arm length and α.
    Stability {
        #[command(flatten)]
        io: Io,
        /// Supporting-arm lengths, mm.
        #[arg(long, default_value = "6:16:2")]
        r_sprt: Grid,
        /// Arm angles, degrees; 21 points over the stroke otherwise.
        #[arg(long)]
        alpha: Option<Grid>,
        #[arg(long, default_value_t = 6.5)]
        w_hldr: f64,
        #[arg(long, default_value_t = 8)]
        n_edges: usize,
        /// Torque normalization length, mm; half the pad height otherwise.
        #[arg(long)]
        torque_scale: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        force_limit: f64,
        /// Write the contact layout at `--layout-alpha` as JSON here.
        #[arg(long)]
        layout: Option<PathBuf>,
        #[arg(long)]
        layout_alpha: Option<f64>,
    },
    /// Linear, spiral and rotation search against the simulated socket.
    Insertion {
        /// Scenario file; built-in defaults otherwise.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Trajectory CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Starting tip yaw against the hex lattice, degrees.
        #[arg(long)]
        yaw_offset_deg: Option<f64>,
    },
    /// Check a parameter file.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(Error::from)
        .with_context(|| format!("reading {}", path.display()))
}

fn load(config: &Option<PathBuf>) -> Result<(LoadedParams, String)> {
    match config {
        Some(path) => {
            let text = read(path)?;
            let loaded = params::parse_params(&text).with_context(|| format!("loading {}", path.display()))?;
            for w in &loaded.warnings {
                eprintln!("warning: {w}");
            }
            Ok((loaded, text))
        }
        None => Ok((
            LoadedParams {
                tool: ToolParams::default(),
                gripper: GripperParams::default(),
                warnings: Vec::new(),
            },
            String::new(),
        )),
    }
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(Error::from)
            .with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Ctx {
    digest: String,
}

impl Ctx {
    fn envelope(&self, analysis: &str, parameters: Value, result: Value, notes: Vec<String>) -> Result<String> {
        Ok(ReportEnvelope::new(analysis, self.digest.clone(), &parameters, &result, notes)?.to_json()?)
    }
}

fn snapshot(tool: &ToolParams, gripper: &GripperParams, extra: Value) -> Value {
    json!({ "tool": tool, "gripper": gripper, "options": extra })
}

fn lever_form(arg: LeverArg) -> FingerLever {
    match arg {
        LeverArg::Printed => FingerLever::AsPrinted,
        LeverArg::Projected => FingerLever::Projected,
    }
}

fn screw_summary(t_sqz_max: f64, t_stch_max: f64) -> Result<Value> {
    let mut out = serde_json::Map::new();
    for (name, mode) in [("double_ratchet", RatchetMode::DoubleRatchet), ("single_ratchet", RatchetMode::SingleRatchet)] {
        let cells = quasistatics::fastenable_screws(t_sqz_max.max(0.0), t_stch_max.max(0.0), mode)?;
        let largest: serde_json::Map<String, Value> = quasistatics::PROPERTY_CLASSES
            .iter()
            .map(|c| (c.to_string(), json!(quasistatics::largest_size_for_class(&cells, c))))
            .collect();
        out.insert(
            name.to_string(),
            json!({
                "gate_Nm": quasistatics::fastening_gate(t_sqz_max, t_stch_max, mode) / 1000.0,
                "largest_size_by_class": largest,
            }),
        );
    }
    Ok(Value::Object(out))
}

#[allow(clippy::too_many_arguments)]
fn cmd_torque(
    ctx: &Ctx,
    io: &Io,
    model: &ModelArgs,
    alpha: &Option<Grid>,
    width: &Option<Grid>,
    beta: &Option<Grid>,
    alpha_deg: f64,
    beta_deg: Option<f64>,
    d_fgr_mm: Option<f64>,
    form: LeverArg,
    f_grpr: Option<f64>,
) -> Result<()> {
    let (loaded, _) = load(&io.config)?;
    let mut tool = loaded.tool;
    let mut gripper = loaded.gripper;
    if let Some(xi) = model.xi {
        tool.xi = xi;
    }
    if let Some(b) = beta_deg {
        gripper.beta = b;
    }
    let f = f_grpr.unwrap_or(gripper.f_grpr_max);
    let tm = model.model();
    let form = lever_form(form);
    let lever = |g: &GripperParams| d_fgr_mm.unwrap_or_else(|| quasistatics::d_finger_with(g, form));

    let mut rows = Vec::new();
    let header: Vec<&str>;
    if let Some(Grid(betas)) = beta {
        header = vec!["beta_deg", "alpha_deg", "T_sqz_Nmm", "T_stch_Nmm"];
        for &b in betas {
            let d = lever(&GripperParams { beta: b, ..gripper });
            let sq = quasistatics::torque_squeeze_with(alpha_deg, f, d, &tool, tm)?.torque;
            let st = quasistatics::torque_stretch_with(alpha_deg, d, &tool, tm)?;
            rows.push(vec![b, alpha_deg, sq, st]);
        }
    } else if let Some(Grid(widths)) = width {
        header = vec!["w_tool_mm", "alpha_deg", "T_sqz_Nmm", "T_stch_Nmm"];
        let d = lever(&gripper);
        for &w in widths {
            let a = kinematics::width_to_alpha(w, &tool)?;
            let sq = quasistatics::torque_squeeze_with(a, f, d, &tool, tm)?.torque;
            let st = quasistatics::torque_stretch_with(a, d, &tool, tm)?;
            rows.push(vec![w, a, sq, st]);
        }
    } else {
        header = vec!["alpha_deg", "T_sqz_Nmm", "T_stch_Nmm"];
        let alphas = match alpha {
            Some(Grid(a)) => a.clone(),
            None => {
                let b = AlphaBounds::from_params(&tool)?;
                let n = (b.travel() / 0.5).ceil() as usize;
                (0..=n).map(|i| b.alpha_min + b.travel() * i as f64 / n as f64).collect()
            }
        };
        let d = lever(&gripper);
        for s in quasistatics::torque_curve(&alphas, f, d, &tool, tm)? {
            rows.push(vec![s.alpha, s.t_sqz, s.t_stch]);
        }
    }
    let csv = numeric_csv(&header, rows.iter().cloned())?;
    emit(&io.out, &csv)?;

    if io.report.is_some() {
        let n = header.len();
        let peak = |col: usize| {
            rows.iter()
                .map(|r| (r[col], r[0]))
                .fold((f64::NEG_INFINITY, f64::NAN), |a, b| if b.0 > a.0 { b } else { a })
        };
        let (sq_max, sq_at) = peak(n - 2);
        let (st_max, st_at) = peak(n - 1);
        let mut notes = Vec::new();
        if beta.is_some() && d_fgr_mm.is_none() && matches!(form, FingerLever::AsPrinted) {
            notes.push(
                "the (w_fgr + l_fgr)·sin β lever peaks at β = 90°; `--d-fgr-form projected` uses w_fgr·cos β + l_fgr·sin β, \
                 which peaks at atan(l_fgr / w_fgr)"
                    .to_string(),
            );
        }
        let result = json!({
            "sweep": header[0],
            "T_sqz_max_Nmm": sq_max,
            "T_sqz_max_at": sq_at,
            "T_stch_max_Nmm": st_max,
            "T_stch_max_at": st_at,
            "screws": screw_summary(sq_max, st_max)?,
        });
        let params = snapshot(&tool, &gripper, json!({ "f_grpr": f, "model": format!("{tm:?}") }));
        emit(&io.report, &ctx.envelope("torque", params, result, notes)?)?;
    }
    Ok(())
}

fn cmd_angle(
    ctx: &Ctx,
    io: &Io,
    v_sqz: Option<f64>,
    v_stch: Option<f64>,
    duration: f64,
    dt: f64,
    target: f64,
) -> Result<()> {
    let (loaded, _) = load(&io.config)?;
    let v_sqz = v_sqz.unwrap_or(loaded.gripper.v_sqz);
    let v_stch = v_stch.unwrap_or(loaded.gripper.v_stch);
    let model = CycleModel::new(v_sqz, v_stch, &loaded.tool)?;
    let traj = model.trajectory(duration, dt)?;
    let mut w = String::from("t_s,delta_out_deg,phase\n");
    for s in &traj.samples {
        w.push_str(&format!("{},{},{}\n", s.t, s.delta_out, s.phase.as_str()));
    }
    emit(&io.out, &w)?;
    if io.report.is_some() {
        let t_target = model.time_to_angle(target)?;
        let mut result = json!({
            "t_m_s": model.t_m(),
            "period_s": model.period(),
            "advance_per_cycle_deg": model.advance_per_cycle(),
            "target_deg": target,
            "ideal_time_to_target_s": t_target,
        });
        let mut notes = vec![
            "ideal model: no finger slip, instantaneous squeeze/stretch reversal, rigid links".to_string(),
        ];
        if target == 360.0 {
            result["measured_time_to_360_s"] = json!(MEASURED_360_S);
            notes.push(format!(
                "measured full revolution on the fabricated tool: {MEASURED_360_S} s; ideal model: {t_target:.3} s"
            ));
        }
        let params = snapshot(&loaded.tool, &loaded.gripper, json!({ "v_sqz": v_sqz, "v_stch": v_stch, "dt": dt }));
        emit(&io.report, &ctx.envelope("angle", params, result, notes)?)?;
    }
    Ok(())
}

fn cmd_geometry(ctx: &Ctx, io: &Io) -> Result<()> {
    let (loaded, _) = load(&io.config)?;
    let p = loaded.tool;
    let b = AlphaBounds::from_params(&p)?;
    let travel_whl = kinematics::max_rotational_travel(&p)?;
    let result = json!({
        "alpha_min_deg": b.alpha_min,
        "alpha_init_deg": b.alpha_init,
        "travel_width_relation_deg": b.travel(),
        "max_rotational_travel_deg": travel_whl,
        "min_pad_height_closed_mm": kinematics::min_pad_height(&p, PadHeightAngle::Closed)?,
        "min_pad_height_open_mm": kinematics::min_pad_height(&p, PadHeightAngle::Open)?,
        "fabricated_pad_height_mm": p.l_tool,
    });
    let notes = vec![
        "max_rotational_travel uses the 2·r_whl width offset; the width relation (2·w_hldr) gives travel_width_relation, \
         which the cycle model uses"
            .to_string(),
        format!("reference rotational travel 62.44 deg; the 2·r_whl formula evaluates to {travel_whl:.4} deg"),
    ];
    let text = ctx.envelope("geometry", snapshot(&p, &loaded.gripper, json!({})), result, notes)?;
    emit(&io.out, &text)?;
    if io.report.is_some() {
        emit(&io.report, &text)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_spring_opt(
    ctx: &Ctx,
    io: &Io,
    model: &ModelArgs,
    f_grpr: Option<f64>,
    d_fgr: f64,
    range: Range,
    catalog: &Option<PathBuf>,
    max_diameter: f64,
) -> Result<()> {
    let (loaded, _) = load(&io.config)?;
    let tool = loaded.tool;
    let f = f_grpr.unwrap_or(loaded.gripper.f_grpr_max);
    let tm = model.model();
    let opt = spring_opt::optimize_xi(f, d_fgr, &tool, (range.0, range.1), tm)?;
    let entries = match catalog {
        Some(path) => spring_opt::parse_catalog(&read(path)?).with_context(|| format!("loading {}", path.display()))?,
        None => spring_opt::default_catalog(),
    };
    let pick = spring_opt::select_from_catalog(opt.xi, &entries, max_diameter)?;
    let in_band = (15.0..=25.0).contains(&opt.xi);
    let mut notes = vec![format!(
        "reference balanced coefficient: 19.52 N·mm/deg (text) and 19.27 N·mm/deg (figure caption); this model gives {:.2}",
        opt.xi
    )];
    if opt.at_boundary {
        notes.push("no interior maximum in the search range; the optimum sits on a range endpoint".into());
    }
    if opt.non_physical {
        notes.push("the gripper cannot overcome the springs anywhere on the stroke at this coefficient".into());
    }
    let result = json!({
        "xi_star": opt.xi,
        "objective": opt.objective,
        "bracket": [opt.bracket.0, opt.bracket.1],
        "search_range": [opt.search_range.0, opt.search_range.1],
        "at_boundary": opt.at_boundary,
        "non_physical": opt.non_physical,
        "stall_fraction": opt.stall_fraction,
        "evaluations": opt.evaluations,
        "reference_band": [15.0, 25.0],
        "in_reference_band": in_band,
        "catalog_pick": pick,
        "max_diameter_mm": max_diameter,
    });
    let params = snapshot(&tool, &loaded.gripper, json!({ "f_grpr": f, "d_fgr": d_fgr, "model": format!("{tm:?}") }));
    let text = ctx.envelope("spring-opt", params, result, notes)?;
    emit(&io.out, &text)?;
    if io.report.is_some() {
        emit(&io.report, &text)?;
    }
    Ok(())
}

fn cmd_cam(ctx: &Ctx, io: &Io, samples: usize, polyline: &Option<PathBuf>) -> Result<()> {
    let (loaded, _) = load(&io.config)?;
    let prof = cam::synthesize(&loaded.tool, samples)?;
    emit(&io.out, &prof.to_csv()?)?;
    if polyline.is_some() {
        emit(polyline, &prof.to_polyline())?;
    }
    if io.report.is_some() {
        let tangency = prof
            .samples
            .iter()
            .map(|s| (s.profile.distance(s.wheel) - loaded.tool.r_whl).abs())
            .fold(0.0, f64::max);
        let result = json!({
            "samples": prof.samples.len(),
            "max_tangency_error_mm": tangency,
            "profile_y_extent_mm": prof.y_extent(),
        });
        let notes = vec!["samples are uniform in α between the closed and open states".to_string()];
        let params = snapshot(&loaded.tool, &loaded.gripper, json!({ "samples": samples }));
        emit(&io.report, &ctx.envelope("cam", params, result, notes)?)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_stability(
    ctx: &Ctx,
    io: &Io,
    r_sprt: &Grid,
    alpha: &Option<Grid>,
    w_hldr: f64,
    n_edges: usize,
    torque_scale: Option<f64>,
    force_limit: f64,
    layout: &Option<PathBuf>,
    layout_alpha: Option<f64>,
) -> Result<()> {
    let (loaded, _) = load(&io.config)?;
    let tool = loaded.tool;
    let cfg = StabilityConfig {
        n_edges,
        torque_scale,
        force_limit,
        grip_half_span: loaded.gripper.l_fgr / 2.0,
    };
    let b = AlphaBounds::from_params(&tool)?;
    let alphas = match alpha {
        Some(Grid(a)) => a.clone(),
        None => (0..21).map(|i| b.alpha_min + b.travel() * i as f64 / 20.0).collect(),
    };
    let grid = stability::sweep_stability(&tool, &r_sprt.0, &alphas, w_hldr, &cfg)?;
    if grid.cells.iter().all(|c| c.q.is_none()) {
        return Err(Error::DegenerateGeometry("every stability cell is infeasible".into()).into());
    }
    emit(&io.out, &grid.to_csv()?)?;
    if layout.is_some() {
        let at = layout_alpha.unwrap_or(0.5 * (b.alpha_min + b.alpha_init));
        let p = ToolParams { w_hldr, ..tool };
        let l = stability::contact_layout(at, &p, &cfg)?;
        emit(layout, &(serde_json::to_string_pretty(&l)? + "\n"))?;
    }
    if io.report.is_some() {
        let rows: Vec<Value> = grid
            .r_sprt_values
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let row: Vec<(f64, f64)> = alphas.iter().zip(grid.row(i)).filter_map(|(a, q)| q.map(|q| (*a, q))).collect();
                let monotone = row.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
                let peak = row.iter().cloned().fold((f64::NAN, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
                json!({ "r_sprt_mm": r, "non_increasing_in_alpha": monotone, "peak_alpha_deg": peak.0, "peak_q": peak.1 })
            })
            .collect();
        let notes = vec![
            "Q is in normalized wrench units (torques divided by the torque scale); absolute values depend on the force limit".to_string(),
            "contact positions are reconstructed from the linkage geometry; see the stability module docs".to_string(),
        ];
        let result = json!({ "rows": rows, "torque_scale_mm": cfg.torque_scale_for(&tool) });
        let params = snapshot(&tool, &loaded.gripper, json!({ "w_hldr": w_hldr, "config": cfg }));
        emit(&io.report, &ctx.envelope("stability", params, result, notes)?)?;
    }
    Ok(())
}

fn cmd_insertion(
    ctx: &Ctx,
    scenario: &Option<PathBuf>,
    out: &Option<PathBuf>,
    report: &Option<PathBuf>,
    seed: Option<u64>,
    yaw: Option<f64>,
) -> Result<()> {
    let mut s = match scenario {
        Some(path) => insertion::parse_scenario(&read(path)?).with_context(|| format!("loading {}", path.display()))?,
        None => insertion::Scenario::default(),
    };
    if let Some(seed) = seed {
        s.seed = seed;
    }
    if let Some(y) = yaw {
        s.yaw_offset = y;
    }
    let outcome = insertion::run_scenario(&s)?;
    emit(out, &outcome.trajectory.to_csv()?)?;
    if report.is_some() {
        let notes = vec![
            "force threshold, spiral steps, gains and world geometry are simulation defaults, not measured values".to_string(),
            format!(
                "impedance damping term: {:?}",
                s.gains.form
            ),
        ];
        let params = json!({
            "world": {
                "hole_depth": s.world.hole_depth,
                "hex_across_flats": s.world.hex_across_flats,
                "chamfer_depth": s.world.chamfer_depth,
                "chamfer_half_angle_deg": s.world.chamfer_half_angle,
                "radial_clearance": s.world.radial_clearance,
                "surface_stiffness": s.world.surface_stiffness,
                "capture_radius": s.world.capture_radius(),
                "angular_tolerance_deg": s.world.angular_tolerance(),
            },
            "start_local": [s.start_local.x, s.start_local.y, s.start_local.z],
            "yaw_offset_deg": s.yaw_offset,
            "f_threshold": s.f_threshold,
            "d_theta_deg": s.d_theta,
            "d_r": s.d_r,
            "gains": s.gains,
            "f_insrt": s.f_insrt,
            "rotation": s.rotation,
            "noise_sigma": s.noise_sigma,
            "seed": s.seed,
        });
        emit(report, &ctx.envelope("insertion", params, serde_json::to_value(&outcome)?, notes)?)?;
    }
    Ok(())
}

fn cmd_validate(config: &Path) -> Result<()> {
    let text = read(config)?;
    let loaded = params::parse_params(&text)?;
    for w in &loaded.warnings {
        println!("warning: {w}");
    }
    let b = AlphaBounds::from_params(&loaded.tool)?;
    println!(
        "valid: alpha_min = {:.4} deg, alpha_init = {:.4} deg",
        b.alpha_min, b.alpha_init
    );
    Ok(())
}

fn config_text(command: &Command) -> Result<Vec<u8>> {
    let path = match command {
        Command::Torque { io, .. }
        | Command::Angle { io, .. }
        | Command::Geometry { io }
        | Command::SpringOpt { io, .. }
        | Command::Cam { io, .. }
        | Command::Stability { io, .. } => io.config.clone(),
        Command::Insertion { scenario, .. } => scenario.clone(),
        Command::Validate { config } => Some(config.clone()),
    };
    match path {
        Some(p) => Ok(read(&p)?.into_bytes()),
        None => Ok(Vec::new()),
    }
}

/// Flags that affect results, with file locations blanked so the digest
/// depends only on content.
fn digest_flags(command: &Command) -> String {
    let mut c = command.clone();
    match &mut c {
        Command::Torque { io, .. }
        | Command::Angle { io, .. }
        | Command::Geometry { io } => *io = Io { config: None, out: None, report: None },
        Command::SpringOpt { io, catalog, .. } => {
            *io = Io { config: None, out: None, report: None };
            *catalog = None;
        }
        Command::Cam { io, polyline, .. } => {
            *io = Io { config: None, out: None, report: None };
            *polyline = None;
        }
        Command::Stability { io, layout, .. } => {
            *io = Io { config: None, out: None, report: None };
            *layout = None;
        }
        Command::Insertion { scenario, out, report, .. } => {
            *scenario = None;
            *out = None;
            *report = None;
        }
        Command::Validate { config } => *config = PathBuf::new(),
    }
    if let Command::SpringOpt { catalog: Some(p), .. } = command {
        return format!("{c:?}{}", std::fs::read_to_string(p).unwrap_or_default());
    }
    format!("{c:?}")
}

fn run(cli: Cli) -> Result<()> {
    let flags = digest_flags(&cli.command);
    let digest = input_digest(&[&config_text(&cli.command)?, flags.as_bytes()]);
    let ctx = Ctx { digest };
    match &cli.command {
        Command::Torque {
            io,
            model,
            alpha,
            width,
            beta,
            alpha_deg,
            beta_deg,
            d_fgr_mm,
            d_fgr_form,
            f_grpr,
        } => cmd_torque(&ctx, io, model, alpha, width, beta, *alpha_deg, *beta_deg, *d_fgr_mm, *d_fgr_form, *f_grpr),
        Command::Angle {
            io,
            v_sqz,
            v_stch,
            duration,
            dt,
            target_deg,
        } => cmd_angle(&ctx, io, *v_sqz, *v_stch, *duration, *dt, *target_deg),
        Command::Geometry { io } => cmd_geometry(&ctx, io),
        Command::SpringOpt {
            io,
            model,
            f_grpr,
            d_fgr_mm,
            range,
            catalog,
            max_diameter,
        } => cmd_spring_opt(&ctx, io, model, *f_grpr, *d_fgr_mm, *range, catalog, *max_diameter),
        Command::Cam { io, samples, polyline } => cmd_cam(&ctx, io, *samples, polyline),
        Command::Stability {
            io,
            r_sprt,
            alpha,
            w_hldr,
            n_edges,
            torque_scale,
            force_limit,
            layout,
            layout_alpha,
        } => cmd_stability(
            &ctx,
            io,
            r_sprt,
            alpha,
            *w_hldr,
            *n_edges,
            *torque_scale,
            *force_limit,
            layout,
            *layout_alpha,
        ),
        Command::Insertion {
            scenario,
            out,
            report,
            seed,
            yaw_offset_deg,
        } => cmd_insertion(&ctx, scenario, out, report, *seed, *yaw_offset_deg),
        Command::Validate { config } => cmd_validate(config),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(
            Error::NoContact { .. }
            | Error::HoleNotFound { .. }
            | Error::Timeout { .. }
            | Error::DegenerateOptimum(_)
            | Error::NoCatalogFit { .. }
            | Error::DegenerateGeometry(_)
            | Error::Singular(_),
        ) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
