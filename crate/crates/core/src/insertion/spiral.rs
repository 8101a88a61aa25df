//! Linear approach and spiral search for the socket.

use nalgebra::{Rotation3, Unit, Vector3};

use super::world::{ForceSensor, InsertionWorld};
use super::{Stage, Trajectory};
use crate::error::{Error, Result};

/// Force along the attack direction as seen through the sensor.
fn axial_force(v_att: &Vector3<f64>, f_measured: &Vector3<f64>) -> f64 {
    v_att.dot(f_measured).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSearchOptions {
    /// Advance per control step, mm.
    pub step: f64,
    /// Travel budget, mm.
    pub max_travel: f64,
}

impl Default for LinearSearchOptions {
    fn default() -> Self {
        Self {
            step: 0.02,
            max_travel: 20.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub position: Vector3<f64>,
    /// World-frame force estimate at the stop position.
    pub force: Vector3<f64>,
    pub steps: usize,
}

/// Advances from `start` along `v_att` until the axial force reaches
/// `f_threshold`.
#[allow(clippy::too_many_arguments)]
pub fn linear_search(
    start: Vector3<f64>,
    v_att: Vector3<f64>,
    f_threshold: f64,
    world: &InsertionWorld,
    sensor: &mut ForceSensor,
    yaw: f64,
    opts: LinearSearchOptions,
    log: &mut Trajectory,
) -> Result<Contact> {
    if ((v_att.norm() - 1.0).abs()) > 1e-9 {
        return Err(Error::InvalidInput(format!("attack vector must be unit length (|v| = {})", v_att.norm())));
    }
    if !(f_threshold > 0.0) {
        return Err(Error::domain("F_threshold", f_threshold, "F_threshold > 0 N"));
    }
    if !(opts.step > 0.0 && opts.max_travel > 0.0) {
        return Err(Error::InvalidInput("linear search step and travel must be positive".into()));
    }
    let n_max = (opts.max_travel / opts.step).floor() as usize;
    for i in 0..=n_max {
        let p = start + v_att * (i as f64 * opts.step);
        let f = sensor.measure(&world.contact_force(&p, yaw));
        log.push(p, f, Stage::Linear);
        if axial_force(&v_att, &f) >= f_threshold {
            return Ok(Contact {
                position: p,
                force: f,
                steps: i,
            });
        }
    }
    Err(Error::NoContact {
        travel: opts.max_travel,
    })
}

/// Rotates `v` by `theta_deg` about the unit `axis` (Rodrigues' formula).
pub fn rodrigues(theta_deg: f64, axis: &Vector3<f64>, v: &Vector3<f64>) -> Vector3<f64> {
    Rotation3::from_axis_angle(&Unit::new_normalize(*axis), theta_deg.to_radians()) * v
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralPlan {
    pub v_att: Vector3<f64>,
    pub v_sprl: Vector3<f64>,
    /// Degrees per step.
    pub d_theta: f64,
    /// mm per step.
    pub d_r: f64,
    pub theta_0: f64,
    pub r_0: f64,
}

impl SpiralPlan {
    pub fn new(
        v_att: Vector3<f64>,
        v_sprl: Vector3<f64>,
        d_theta: f64,
        d_r: f64,
        theta_0: f64,
        r_0: f64,
    ) -> Result<Self> {
        let mut problems = Vec::new();
        if (v_att.norm() - 1.0).abs() > 1e-9 || (v_sprl.norm() - 1.0).abs() > 1e-9 {
            problems.push("spiral vectors must be unit length".to_string());
        }
        if v_att.dot(&v_sprl).abs() > 1e-9 {
            problems.push("spiral direction must be perpendicular to the attack vector".to_string());
        }
        if !(d_theta > 0.0 && d_r > 0.0) {
            problems.push(format!("spiral steps must be positive (d_theta = {d_theta}, d_r = {d_r})"));
        }
        if r_0 < 0.0 {
            problems.push(format!("initial spiral step must be >= 0 (got {r_0})"));
        }
        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }
        Ok(Self {
            v_att,
            v_sprl,
            d_theta,
            d_r,
            theta_0,
            r_0,
        })
    }

    /// Step length for a pitch (radial growth per revolution) at the given
    /// angular step.
    pub fn d_r_for_pitch(pitch: f64, d_theta: f64) -> f64 {
        pitch * d_theta.to_radians().powi(2) / std::f64::consts::TAU
    }

    /// Radial growth per revolution of the generated path, mm.
    pub fn pitch(&self) -> f64 {
        std::f64::consts::TAU * self.d_r / self.d_theta.to_radians().powi(2)
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.theta_0 + i as f64 * self.d_theta
    }

    pub fn r(&self, i: usize) -> f64 {
        self.r_0 + i as f64 * self.d_r
    }
}

/// `P_{i+1} = r_{i+1}·rodrigues(θ_{i+1}, v_att)·v_sprl + P_i`.
pub fn spiral_step(p: &Vector3<f64>, plan: &SpiralPlan, i: usize) -> Vector3<f64> {
    plan.r(i + 1) * rodrigues(plan.theta(i + 1), &plan.v_att, &plan.v_sprl) + p
}

pub fn spiral_waypoints(p0: Vector3<f64>, plan: &SpiralPlan, n: usize) -> Vec<Vector3<f64>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(p0);
    for i in 0..n {
        let next = spiral_step(&out[i], plan, i);
        out.push(next);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralOptions {
    pub f_threshold: f64,
    /// Largest hole offset searched, mm.
    pub search_bound: f64,
    /// Longest motion between two force checks, mm.
    pub substep: f64,
    /// The hole counts as found once the axial force falls below
    /// `release_fraction · f_threshold`. Linear search stops right at the
    /// threshold, so comparing against the threshold itself would trip on
    /// round-off while still on the face.
    pub release_fraction: f64,
}

impl Default for SpiralOptions {
    fn default() -> Self {
        Self {
            f_threshold: 2.0,
            search_bound: 5.0,
            substep: 0.05,
            release_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpiralResult {
    /// Where the axial force fell below the release level.
    pub position: Vector3<f64>,
    /// Recurrence steps completed before the drop.
    pub steps: usize,
    /// `P_0 .. P_steps`.
    pub waypoints: Vec<Vector3<f64>>,
}

/// Follows the spiral from the contact point until the tip drops into the
/// chamfer, i.e. the axial force falls below the release level. The force is
/// checked at `substep` spacing along each spiral segment.
pub fn spiral_search(
    p0: Vector3<f64>,
    plan: &SpiralPlan,
    world: &InsertionWorld,
    sensor: &mut ForceSensor,
    yaw: f64,
    opts: SpiralOptions,
    log: &mut Trajectory,
) -> Result<SpiralResult> {
    if !(opts.substep > 0.0 && opts.search_bound > 0.0) {
        return Err(Error::InvalidInput("spiral substep and search bound must be positive".into()));
    }
    if !(opts.release_fraction > 0.0 && opts.release_fraction <= 1.0) {
        return Err(Error::InvalidInput("spiral release fraction must be in (0, 1]".into()));
    }
    let release = opts.release_fraction * opts.f_threshold;
    let f0 = sensor.measure(&world.contact_force(&p0, yaw));
    let mut waypoints = vec![p0];
    if axial_force(&plan.v_att, &f0) < release {
        return Ok(SpiralResult {
            position: p0,
            steps: 0,
            waypoints,
        });
    }
    let limit = opts.search_bound + plan.pitch();
    let mut p = p0;
    for i in 0.. {
        let next = spiral_step(&p, plan, i);
        let seg = next - p;
        let n = (seg.norm() / opts.substep).ceil().max(1.0) as usize;
        for s in 1..=n {
            let q = if s == n { next } else { p + seg * (s as f64 / n as f64) };
            let f = sensor.measure(&world.contact_force(&q, yaw));
            log.push(q, f, Stage::Spiral);
            if axial_force(&plan.v_att, &f) < release {
                return Ok(SpiralResult {
                    position: q,
                    steps: i,
                    waypoints,
                });
            }
        }
        p = next;
        waypoints.push(p);
        if (p - p0).norm() > limit {
            return Err(Error::HoleNotFound {
                bound: opts.search_bound,
                steps: i + 1,
            });
        }
    }
    unreachable!("the spiral loop only exits by returning")
}
