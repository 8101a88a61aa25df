//! Simulated tooltip exchange as a peg-in-hole task.
//!
//! Three stages run against [`InsertionWorld`]:
//!
//! 1. linear search along the attack vector until the axial force reaches
//!    `f_threshold`;
//! 2. spiral search at that height until the axial force falls below the
//!    threshold, meaning the tip dropped into the chamfer. Skipped when the
//!    linear search already ended more than half a chamfer depth below the
//!    nominal socket face;
//! 3. rotation search: the impedance controller presses with `f_insrt`
//!    while the hand turns about the attack vector whenever the tip stalls,
//!    until the hex engages and the axial force balances at full depth.
//!
//! All stages are sampled at the controller period `dt`; the trajectory log
//! has one row per force reading.

pub mod controller;
pub mod spiral;
pub mod world;

use nalgebra::{Isometry3, Rotation3, Translation3, UnitQuaternion, Vector3};
use serde::Serialize;

use crate::config::{self, Block};
use crate::error::{Error, Result};

pub use controller::{
    impedance_step, rotation_search_insert, DampingForm, ImpedanceGains, ImpedanceState, InsertionResult,
    RotationOptions,
};
pub use spiral::{
    linear_search, rodrigues, spiral_search, spiral_step, spiral_waypoints, Contact, LinearSearchOptions,
    SpiralOptions, SpiralPlan, SpiralResult,
};
pub use world::{ForceSensor, InsertionWorld};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Linear,
    Spiral,
    Rotation,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Linear => "linear",
            Stage::Spiral => "spiral",
            Stage::Rotation => "rotation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub step: usize,
    pub t: f64,
    pub p: Vector3<f64>,
    pub f: Vector3<f64>,
    pub stage: Stage,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub samples: Vec<TrajectorySample>,
}

impl Trajectory {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            samples: Vec::new(),
        }
    }

    pub fn push(&mut self, p: Vector3<f64>, f: Vector3<f64>, stage: Stage) {
        let step = self.samples.len();
        self.samples.push(TrajectorySample {
            step,
            t: step as f64 * self.dt,
            p,
            f,
            stage,
        });
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["step", "t_s", "x_mm", "y_mm", "z_mm", "Fx_N", "Fy_N", "Fz_N", "stage"])?;
        for s in &self.samples {
            let mut row: Vec<String> = vec![s.step.to_string(), s.t.to_string()];
            row.extend(s.p.iter().chain(s.f.iter()).map(|v| v.to_string()));
            row.push(s.stage.as_str().to_string());
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Everything needed to run the three-stage insertion once.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub world: InsertionWorld,
    /// Start of the approach in the socket frame, mm.
    pub start_local: Vector3<f64>,
    /// Tip yaw relative to the hex lattice at the start, degrees.
    pub yaw_offset: f64,
    pub f_threshold: f64,
    pub linear: LinearSearchOptions,
    pub d_theta: f64,
    pub d_r: f64,
    pub theta_0: f64,
    pub r_0: f64,
    pub search_bound: f64,
    pub substep: f64,
    pub gains: ImpedanceGains,
    /// N along the attack vector.
    pub f_insrt: f64,
    pub rotation: RotationOptions,
    /// Gripper (sensor) orientation as roll/pitch/yaw, degrees.
    pub grpr_rpy: [f64; 3],
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            world: InsertionWorld::default(),
            start_local: Vector3::new(2.0, 0.0, 2.0),
            yaw_offset: 20.0,
            f_threshold: 2.0,
            linear: LinearSearchOptions::default(),
            d_theta: 15.0,
            d_r: SpiralPlan::d_r_for_pitch(1.0, 15.0),
            theta_0: 0.0,
            r_0: 0.0,
            search_bound: 5.0,
            substep: 0.05,
            gains: ImpedanceGains::default(),
            f_insrt: 5.0,
            rotation: RotationOptions::default(),
            grpr_rpy: [0.0; 3],
            noise_sigma: 0.0,
            seed: 0,
        }
    }
}

fn rpy_rotation(rpy_deg: [f64; 3]) -> Rotation3<f64> {
    let [r, p, y] = rpy_deg.map(f64::to_radians);
    Rotation3::from_euler_angles(r, p, y)
}

impl Scenario {
    pub fn start_world(&self) -> Vector3<f64> {
        self.world.to_world(&self.start_local)
    }

    pub fn spiral_plan(&self) -> Result<SpiralPlan> {
        SpiralPlan::new(
            self.world.attack_vector(),
            self.world.lateral_axis(),
            self.d_theta,
            self.d_r,
            self.theta_0,
            self.r_0,
        )
    }

    pub fn sensor(&self) -> Result<ForceSensor> {
        ForceSensor::noisy(rpy_rotation(self.grpr_rpy), self.noise_sigma, self.seed)
    }
}

const SCENARIO_KEYS: &[&str] = &[
    "socket_x",
    "socket_y",
    "socket_z",
    "socket_roll_deg",
    "socket_pitch_deg",
    "socket_yaw_deg",
    "hole_depth",
    "hex_across_flats",
    "chamfer_depth",
    "chamfer_half_angle_deg",
    "radial_clearance",
    "surface_stiffness",
    "start_dx",
    "start_dy",
    "approach_height",
    "yaw_offset_deg",
    "f_threshold",
    "linear_step",
    "max_travel",
    "d_theta_deg",
    "d_r",
    "spiral_pitch",
    "theta_0_deg",
    "r_0",
    "search_bound",
    "substep",
    "m",
    "c",
    "k",
    "dt",
    "damping",
    "f_insrt",
    "omega_deg_s",
    "max_steps",
    "stall_speed",
    "engage_depth",
    "balance_tolerance",
    "grpr_roll_deg",
    "grpr_pitch_deg",
    "grpr_yaw_deg",
    "noise_sigma",
    "seed",
];

fn apply_scenario(block: &Block, s: &mut Scenario) -> Result<()> {
    let mut socket_t = s.world.socket_pose.translation.vector;
    let (mut roll, mut pitch, mut yaw) = s.world.socket_pose.rotation.euler_angles();
    roll = roll.to_degrees();
    pitch = pitch.to_degrees();
    yaw = yaw.to_degrees();
    let mut pitch_set = false;
    for e in &block.entries {
        if !SCENARIO_KEYS.contains(&e.key.as_str()) {
            return Err(Error::Parse {
                line: e.line,
                message: format!("unknown scenario key `{}`", e.key),
            });
        }
        match e.key.as_str() {
            "damping" => {
                s.gains.form = match e.value.as_str() {
                    "printed" => DampingForm::AsPrinted,
                    "standard" => DampingForm::Standard,
                    other => {
                        return Err(Error::Parse {
                            line: e.line,
                            message: format!("damping must be `printed` or `standard`, got `{other}`"),
                        })
                    }
                }
            }
            "max_steps" => s.rotation.max_steps = e.as_usize()?,
            "seed" => s.seed = e.as_usize()? as u64,
            key => {
                let v = e.as_f64()?;
                match key {
                    "socket_x" => socket_t.x = v,
                    "socket_y" => socket_t.y = v,
                    "socket_z" => socket_t.z = v,
                    "socket_roll_deg" => roll = v,
                    "socket_pitch_deg" => pitch = v,
                    "socket_yaw_deg" => yaw = v,
                    "hole_depth" => s.world.hole_depth = v,
                    "hex_across_flats" => s.world.hex_across_flats = v,
                    "chamfer_depth" => s.world.chamfer_depth = v,
                    "chamfer_half_angle_deg" => s.world.chamfer_half_angle = v,
                    "radial_clearance" => s.world.radial_clearance = v,
                    "surface_stiffness" => s.world.surface_stiffness = v,
                    "start_dx" => s.start_local.x = v,
                    "start_dy" => s.start_local.y = v,
                    "approach_height" => s.start_local.z = v,
                    "yaw_offset_deg" => s.yaw_offset = v,
                    "f_threshold" => s.f_threshold = v,
                    "linear_step" => s.linear.step = v,
                    "max_travel" => s.linear.max_travel = v,
                    "d_theta_deg" => s.d_theta = v,
                    "d_r" => s.d_r = v,
                    "spiral_pitch" => {
                        pitch_set = true;
                        s.d_r = v;
                    }
                    "theta_0_deg" => s.theta_0 = v,
                    "r_0" => s.r_0 = v,
                    "search_bound" => s.search_bound = v,
                    "substep" => s.substep = v,
                    "m" => s.gains.m = v,
                    "c" => s.gains.c = v,
                    "k" => s.gains.k = v,
                    "dt" => s.gains.dt = v,
                    "f_insrt" => s.f_insrt = v,
                    "omega_deg_s" => s.rotation.omega = v,
                    "stall_speed" => s.rotation.stall_speed = v,
                    "engage_depth" => s.rotation.engage_depth = v,
                    "balance_tolerance" => s.rotation.balance_tolerance = v,
                    "grpr_roll_deg" => s.grpr_rpy[0] = v,
                    "grpr_pitch_deg" => s.grpr_rpy[1] = v,
                    "grpr_yaw_deg" => s.grpr_rpy[2] = v,
                    "noise_sigma" => s.noise_sigma = v,
                    _ => unreachable!("key list and match arms agree"),
                }
            }
        }
    }
    if pitch_set {
        // `spiral_pitch` holds the pitch in mm until the angular step is known
        s.d_r = SpiralPlan::d_r_for_pitch(s.d_r, s.d_theta);
    }
    s.world.socket_pose = Isometry3::from_parts(
        Translation3::from(socket_t),
        UnitQuaternion::from_euler_angles(roll.to_radians(), pitch.to_radians(), yaw.to_radians()),
    );
    Ok(())
}

/// Reads a scenario; missing keys keep their defaults. Keys may sit at the
/// top level or in a `[scenario]` block.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let doc = config::parse(text)?;
    let mut s = Scenario::default();
    apply_scenario(doc.root(), &mut s)?;
    for block in doc.blocks.iter().skip(1) {
        match block.name.as_deref() {
            Some("scenario") => apply_scenario(block, &mut s)?,
            Some(other) => {
                return Err(Error::Parse {
                    line: block.line,
                    message: format!("unknown block `[{other}]` in scenario"),
                })
            }
            None => unreachable!("only the first block is unnamed"),
        }
    }
    s.world.validate()?;
    s.gains.validate()?;
    s.spiral_plan()?;
    Ok(s)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioOutcome {
    pub contact: [f64; 3],
    pub linear_steps: usize,
    pub spiral_skipped: bool,
    pub spiral_steps: usize,
    /// Lateral distance of the pre-insertion point from the socket axis, mm.
    pub alignment_error: f64,
    pub pre_insertion: [f64; 3],
    pub insertion: InsertionResult,
    /// Rotation needed on the hex lattice from the start yaw, degrees.
    pub expected_rotation: f64,
    #[serde(skip)]
    pub trajectory: Trajectory,
}

/// Runs linear, spiral and rotation search in sequence.
pub fn run_scenario(s: &Scenario) -> Result<ScenarioOutcome> {
    s.world.validate()?;
    let mut sensor = s.sensor()?;
    let mut log = Trajectory::new(s.gains.dt);
    let v_att = s.world.attack_vector();
    let contact = linear_search(
        s.start_world(),
        v_att,
        s.f_threshold,
        &s.world,
        &mut sensor,
        s.yaw_offset,
        s.linear,
        &mut log,
    )?;

    let in_recess = s.world.to_local(&contact.position).z < -0.5 * s.world.chamfer_depth;
    let (pre, spiral_steps) = if in_recess {
        (contact.position, 0)
    } else {
        let plan = s.spiral_plan()?;
        let r = spiral_search(
            contact.position,
            &plan,
            &s.world,
            &mut sensor,
            s.yaw_offset,
            SpiralOptions {
                f_threshold: s.f_threshold,
                search_bound: s.search_bound,
                substep: s.substep,
                ..SpiralOptions::default()
            },
            &mut log,
        )?;
        (r.position, r.steps)
    };

    let mut ctrl = ImpedanceState::at_rest(pre, v_att * s.f_insrt, s.gains)?;
    let insertion = rotation_search_insert(&s.world, &mut sensor, &mut ctrl, s.yaw_offset, s.rotation, &mut log)?;
    let local_pre = s.world.to_local(&pre);
    let tol = s.world.angular_tolerance();
    Ok(ScenarioOutcome {
        contact: contact.position.into(),
        linear_steps: contact.steps,
        spiral_skipped: in_recess,
        spiral_steps,
        alignment_error: local_pre.x.hypot(local_pre.y),
        pre_insertion: pre.into(),
        insertion,
        expected_rotation: expected_rotation(s.yaw_offset, tol),
        trajectory: log,
    })
}

/// Rotation in the positive sense from `yaw` until the tip enters the
/// aligned band `±tol` around the 60° lattice, degrees.
pub fn expected_rotation(yaw: f64, tol: f64) -> f64 {
    let r = yaw.rem_euclid(60.0);
    if r <= tol || r >= 60.0 - tol {
        0.0
    } else {
        60.0 - tol - r
    }
}
