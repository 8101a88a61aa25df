//! Discrete impedance control and the rotation search.
//!
//! The hand position follows, per axis,
//!
//! ```text
//!            F_insrt + F_rsst_i + m·(2·P_i − P_{i−1})/dt² + c·P_{i−1}/dt + k·P_i
//! P_{i+1} = ────────────────────────────────────────────────────────────────────
//!                              m/dt² + c/dt + k
//! ```
//!
//! Positions are in mm and the mass in kg, so the inertial terms carry a
//! 1e-3 factor to come out in N. [`DampingForm::Standard`] replaces the
//! `c·P_{i−1}/dt` term with the backward-difference `c·P_i/dt`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::world::{ForceSensor, InsertionWorld};
use super::{Stage, Trajectory};
use crate::error::{Error, Result};

/// kg·mm/s² per N.
const MASS_TO_N: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DampingForm {
    /// `c·P_{i−1}/dt` in the numerator.
    #[default]
    AsPrinted,
    /// `c·P_i/dt` in the numerator.
    Standard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpedanceGains {
    /// kg.
    pub m: f64,
    /// N·s/mm.
    pub c: f64,
    /// N/mm.
    pub k: f64,
    /// s.
    pub dt: f64,
    pub form: DampingForm,
}

impl Default for ImpedanceGains {
    fn default() -> Self {
        Self {
            m: 0.5,
            c: 0.2,
            k: 2.0,
            dt: 0.002,
            form: DampingForm::AsPrinted,
        }
    }
}

impl ImpedanceGains {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("m", self.m), ("c", self.c), ("k", self.k), ("dt", self.dt)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(name, v, format!("{name} > 0")));
            }
        }
        Ok(())
    }

    fn mass_term(&self) -> f64 {
        self.m * MASS_TO_N / (self.dt * self.dt)
    }

    pub fn denominator(&self) -> f64 {
        self.mass_term() + self.c / self.dt + self.k
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpedanceState {
    pub p_prev: Vector3<f64>,
    pub p_curr: Vector3<f64>,
    pub gains: ImpedanceGains,
    pub f_insrt: Vector3<f64>,
    pub f_rsst: Vector3<f64>,
}

impl ImpedanceState {
    /// At rest at `p` with no resisting force.
    pub fn at_rest(p: Vector3<f64>, f_insrt: Vector3<f64>, gains: ImpedanceGains) -> Result<Self> {
        gains.validate()?;
        Ok(Self {
            p_prev: p,
            p_curr: p,
            gains,
            f_insrt,
            f_rsst: Vector3::zeros(),
        })
    }

    /// Records `f_rsst`, steps once and shifts the history.
    pub fn advance(&mut self, f_rsst: Vector3<f64>) -> Vector3<f64> {
        self.f_rsst = f_rsst;
        let next = impedance_step(self);
        self.p_prev = self.p_curr;
        self.p_curr = next;
        next
    }
}

pub fn impedance_step(s: &ImpedanceState) -> Vector3<f64> {
    let g = &s.gains;
    let mt = g.mass_term();
    let damped = match g.form {
        DampingForm::AsPrinted => s.p_prev,
        DampingForm::Standard => s.p_curr,
    };
    (s.f_insrt + s.f_rsst + (2.0 * s.p_curr - s.p_prev) * mt + damped * (g.c / g.dt) + s.p_curr * g.k)
        / g.denominator()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationOptions {
    /// Hand rotation rate about the attack vector, degrees/s.
    pub omega: f64,
    pub max_steps: usize,
    /// The hand rotates only while the tip advances slower than this, mm/s.
    pub stall_speed: f64,
    /// Depth past the chamfer at which the hex is engaged and its yaw
    /// locked by the socket, mm.
    pub engage_depth: f64,
    /// Relative axial force-balance tolerance for success.
    pub balance_tolerance: f64,
}

impl Default for RotationOptions {
    fn default() -> Self {
        Self {
            omega: 30.0,
            max_steps: 20_000,
            stall_speed: 1.0,
            engage_depth: 0.5,
            balance_tolerance: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InsertionResult {
    pub success: bool,
    /// Depth of the tip below the socket face, mm.
    pub final_depth: f64,
    pub steps: usize,
    pub time: f64,
    /// Total hand rotation, degrees.
    pub rotated: f64,
    /// Final tip yaw relative to the hex lattice, degrees.
    pub final_yaw: f64,
    /// Axial resisting force at the end, N.
    pub axial_resistance: f64,
}

/// Presses along the attack vector with the impedance controller while
/// rotating the hand until the hex engages, then finishes when the axial
/// resisting force balances `F_insrt` at the bottom of the socket.
pub fn rotation_search_insert(
    world: &InsertionWorld,
    sensor: &mut ForceSensor,
    controller: &mut ImpedanceState,
    yaw0: f64,
    opts: RotationOptions,
    log: &mut Trajectory,
) -> Result<InsertionResult> {
    controller.gains.validate()?;
    let v_att = world.attack_vector();
    let f_cmd = controller.f_insrt.dot(&v_att);
    if !(f_cmd > 0.0) {
        return Err(Error::InvalidInput("insertion force must point along the attack vector".into()));
    }
    let dt = controller.gains.dt;
    let engaged_below = -(world.chamfer_depth + opts.engage_depth);
    let mut yaw = yaw0;
    let mut locked = false;
    for step in 0..opts.max_steps {
        let p = controller.p_curr;
        let f = sensor.measure(&world.contact_force(&p, yaw));
        log.push(p, f, Stage::Rotation);
        let local = world.to_local(&p);
        let resist = -f.dot(&v_att);
        if local.z <= -world.hole_depth && (f_cmd - resist).abs() <= opts.balance_tolerance * f_cmd {
            return Ok(InsertionResult {
                success: true,
                final_depth: -local.z,
                steps: step,
                time: step as f64 * dt,
                rotated: yaw - yaw0,
                final_yaw: yaw,
                axial_resistance: resist,
            });
        }
        let next = controller.advance(f);
        locked = locked || (world.to_local(&next).z < engaged_below && world.is_aligned(yaw));
        let speed = (next - p).dot(&v_att) / dt;
        if !locked && speed < opts.stall_speed {
            yaw += opts.omega * dt;
        }
    }
    Err(Error::Timeout {
        steps: opts.max_steps,
        time: opts.max_steps as f64 * dt,
    })
}
