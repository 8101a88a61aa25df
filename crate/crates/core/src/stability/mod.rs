//! Structural stability of the tool held between the gripper fingers.
//!
//! The held pad is treated as a planar rigid body in its hinge frame
//! (origin at the hinge, x toward the ratchet center, y along the pad).
//! Six contacts act on it:
//!
//! * `c1`, `c2`: the finger pads pressing on the outer pad surface at
//!   `(−w_hldr, ±s)` with normal `+x`, where `s` is half the finger-pad
//!   height. Soft-finger contacts with friction `μ` and eccentricity `e_soft`.
//! * `c3`, `c4`: the supporting wheels touching the curved inner profile.
//!   The wheel centers sit at `((r_drv − r_sprt)·sin α, ±(r_drv + r_sprt)·cos α)`
//!   and the contacts lie `r_whl` further along the reversed outward curve
//!   normal `(cos φ, ±sin φ)`; each wheel pushes along that reversed normal.
//!   Frictionless.
//! * `c5`, `c6`: the hinge pin, modeled as two orthogonal frictionless
//!   bilateral constraints at the origin.
//!
//! Wrenches are `(f_x, f_y, τ/L)` with `L` a characteristic length (half the
//! pad height by default), so all three components are forces. Each contact
//! contributes the convex hull of the zero wrench and its extreme wrenches at
//! the force limit; the grasp wrench set is their Minkowski sum. `Q` is the
//! distance from the origin to the boundary of that set, and 0 whenever the
//! origin is not strictly inside or the set is flat.

pub mod hull;
pub mod wrench;

use serde::{Deserialize, Serialize};

use crate::cam;
use crate::error::{Error, Result};
use crate::params::{GripperParams, ToolParams};
pub use hull::{ConvexHull, Vec3};
pub use wrench::{contact_wrench_generators, Friction, WrenchContact};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    /// Samples of the soft-finger friction ellipse per contact.
    pub n_edges: usize,
    /// Length dividing torques, mm; `None` means `l_tool / 2`.
    pub torque_scale: Option<f64>,
    /// Force bound shared by all contacts, N.
    pub force_limit: f64,
    /// Half the finger-pad height, mm.
    pub grip_half_span: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            n_edges: 8,
            torque_scale: None,
            force_limit: 1.0,
            grip_half_span: GripperParams::default().l_fgr / 2.0,
        }
    }
}

impl StabilityConfig {
    pub fn torque_scale_for(&self, params: &ToolParams) -> f64 {
        self.torque_scale.unwrap_or(params.l_tool / 2.0)
    }
}

/// Contacts `c1..c6` of the pad at arm angle `alpha`.
pub fn pad_contacts(alpha: f64, params: &ToolParams, cfg: &StabilityConfig) -> Result<Vec<WrenchContact>> {
    let soft = Friction::SoftFinger {
        mu: params.mu,
        e_soft: params.e_soft,
    };
    let f = cfg.force_limit;
    let s = cfg.grip_half_span;
    let c = cam::wheel_center(alpha, params)?;
    let phi = cam::normal_angle(alpha, params)?;
    let (cp, sp) = (phi.cos(), phi.sin());
    let r = params.r_whl;
    Ok(vec![
        WrenchContact::new("c1", [-params.w_hldr, s], [1.0, 0.0], soft, f)?,
        WrenchContact::new("c2", [-params.w_hldr, -s], [1.0, 0.0], soft, f)?,
        WrenchContact::new("c3", [c.x - r * cp, c.y - r * sp], [-cp, -sp], Friction::Frictionless, f)?,
        WrenchContact::new("c4", [c.x - r * cp, -c.y + r * sp], [-cp, sp], Friction::Frictionless, f)?,
        WrenchContact::new("c5", [0.0, 0.0], [1.0, 0.0], Friction::Bilateral, f)?,
        WrenchContact::new("c6", [0.0, 0.0], [0.0, 1.0], Friction::Bilateral, f)?,
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct WrenchSet {
    /// Extreme points of the Minkowski sum in normalized wrench space.
    pub points: Vec<[f64; 3]>,
    pub hull: Option<ConvexHull>,
    pub torque_scale: f64,
}

fn dedup(points: Vec<Vec3>, tol: f64) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| (q - p).amax() <= tol) {
            out.push(p);
        }
    }
    out
}

/// Minkowski sum of the per-contact sets, pruned to hull vertices after each
/// step.
pub fn grasp_wrench_set(contacts: &[WrenchContact], n_edges: usize, torque_scale: f64) -> Result<WrenchSet> {
    if contacts.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "at least 2 contacts are required (got {})",
            contacts.len()
        )));
    }
    if !(torque_scale > 0.0) {
        return Err(Error::domain("torque_scale", torque_scale, "torque_scale > 0 mm"));
    }
    let mut sum = vec![Vec3::zeros()];
    for c in contacts {
        let mut set = vec![Vec3::zeros()];
        set.extend(
            contact_wrench_generators(c, n_edges)?
                .into_iter()
                .map(|w| Vec3::new(w.x, w.y, w.z / torque_scale)),
        );
        let next: Vec<Vec3> = sum
            .iter()
            .flat_map(|a| set.iter().map(move |b| a + b))
            .collect();
        sum = match ConvexHull::build(&next) {
            Some(h) => h.vertices(),
            None => dedup(next, 1e-12),
        };
    }
    let hull = ConvexHull::build(&sum);
    Ok(WrenchSet {
        points: sum.iter().map(|p| [p.x, p.y, p.z]).collect(),
        hull,
        torque_scale,
    })
}

pub fn stability_index(ws: &WrenchSet) -> f64 {
    ws.hull.as_ref().map_or(0.0, ConvexHull::origin_margin)
}

/// `Q` of the pad at `alpha` with the given parameters.
pub fn pad_stability(alpha: f64, params: &ToolParams, cfg: &StabilityConfig) -> Result<f64> {
    let contacts = pad_contacts(alpha, params, cfg)?;
    let ws = grasp_wrench_set(&contacts, cfg.n_edges, cfg.torque_scale_for(params))?;
    Ok(stability_index(&ws))
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityCell {
    pub alpha: f64,
    pub r_sprt: f64,
    /// `None` when the geometry is infeasible.
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityGrid {
    pub alpha_values: Vec<f64>,
    pub r_sprt_values: Vec<f64>,
    /// Row-major over `r_sprt_values`, then `alpha_values`.
    pub cells: Vec<StabilityCell>,
}

impl StabilityGrid {
    pub fn q(&self, r_index: usize, alpha_index: usize) -> Option<f64> {
        self.cells[r_index * self.alpha_values.len() + alpha_index].q
    }

    /// Q along α for one supporting-arm length.
    pub fn row(&self, r_index: usize) -> Vec<Option<f64>> {
        (0..self.alpha_values.len()).map(|j| self.q(r_index, j)).collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["alpha_deg", "r_sprt_mm", "Q"])?;
        for c in &self.cells {
            let q = c.q.map_or_else(|| "infeasible".to_string(), |q| q.to_string());
            w.write_record([c.alpha.to_string(), c.r_sprt.to_string(), q])?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn sweep_stability(
    params: &ToolParams,
    r_sprt_values: &[f64],
    alpha_values: &[f64],
    w_hldr: f64,
    cfg: &StabilityConfig,
) -> Result<StabilityGrid> {
    if r_sprt_values.is_empty() || alpha_values.is_empty() {
        return Err(Error::InvalidInput("stability sweep grids must be non-empty".into()));
    }
    let mut cells = Vec::with_capacity(r_sprt_values.len() * alpha_values.len());
    for &r_sprt in r_sprt_values {
        let p = ToolParams {
            r_sprt,
            w_hldr,
            ..*params
        };
        for &alpha in alpha_values {
            let (q, reason) = match pad_stability(alpha, &p, cfg) {
                Ok(q) => (Some(q), None),
                Err(e @ (Error::DegenerateGeometry(_) | Error::Domain { .. })) => (None, Some(e.to_string())),
                Err(e) => return Err(e),
            };
            cells.push(StabilityCell {
                alpha,
                r_sprt,
                q,
                reason,
            });
        }
    }
    Ok(StabilityGrid {
        alpha_values: alpha_values.to_vec(),
        r_sprt_values: r_sprt_values.to_vec(),
        cells,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ContactLayout {
    pub alpha: f64,
    pub torque_scale: f64,
    pub contacts: Vec<LayoutEntry>,
    pub q: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LayoutEntry {
    #[serde(flatten)]
    pub contact: WrenchContact,
    pub generators: Vec<[f64; 3]>,
}

/// Contact geometry and generators at one α, for inspection.
pub fn contact_layout(alpha: f64, params: &ToolParams, cfg: &StabilityConfig) -> Result<ContactLayout> {
    let contacts = pad_contacts(alpha, params, cfg)?;
    let scale = cfg.torque_scale_for(params);
    let ws = grasp_wrench_set(&contacts, cfg.n_edges, scale)?;
    let entries = contacts
        .into_iter()
        .map(|c| {
            let generators = contact_wrench_generators(&c, cfg.n_edges)?
                .into_iter()
                .map(|w| [w.x, w.y, w.z])
                .collect();
            Ok(LayoutEntry { contact: c, generators })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContactLayout {
        alpha,
        torque_scale: scale,
        contacts: entries,
        q: stability_index(&ws),
    })
}
