//! Contact models and planar wrench generators.

use serde::{Deserialize, Serialize};

use super::hull::Vec3;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Friction {
    /// Coulomb friction with a torsional moment about the contact normal;
    /// tangential force and normal moment share the elliptic limit
    /// `(f_t/μP)² + (τ_n/(μ·e·P))² ≤ 1`.
    SoftFinger { mu: f64, e_soft: f64 },
    /// Pushes along the normal only.
    Frictionless,
    /// Pushes or pulls along the normal (a pin constraint direction).
    Bilateral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WrenchContact {
    pub name: String,
    /// Position in the pad frame, mm.
    pub p: [f64; 2],
    /// Unit direction of the force applied to the pad.
    pub n: [f64; 2],
    pub friction: Friction,
    /// N.
    pub force_limit: f64,
}

impl WrenchContact {
    pub fn new(name: &str, p: [f64; 2], n: [f64; 2], friction: Friction, force_limit: f64) -> Result<Self> {
        let len = n[0].hypot(n[1]);
        if !(len > 1e-12) {
            return Err(Error::InvalidInput(format!("contact {name} has a zero normal")));
        }
        if !(force_limit > 0.0) {
            return Err(Error::domain("force_limit", force_limit, "force_limit > 0 N"));
        }
        Ok(Self {
            name: name.to_string(),
            p,
            n: [n[0] / len, n[1] / len],
            friction,
            force_limit,
        })
    }
}

/// Planar wrench `(f_x, f_y, τ)` for a force `f` applied at `p`, plus a free
/// moment `tau_n`.
fn map_wrench(p: [f64; 2], f: [f64; 2], tau_n: f64) -> Vec3 {
    Vec3::new(f[0], f[1], p[0] * f[1] - p[1] * f[0] + tau_n)
}

/// Extreme wrenches of one contact at its force limit. Soft-finger contacts
/// sample the friction ellipse at `n_edges` angles `2πk/n_edges`.
pub fn contact_wrench_generators(c: &WrenchContact, n_edges: usize) -> Result<Vec<Vec3>> {
    let len = c.n[0].hypot(c.n[1]);
    if !(len > 1e-12) {
        return Err(Error::InvalidInput(format!("contact {} has a zero normal", c.name)));
    }
    let n = [c.n[0] / len, c.n[1] / len];
    let t = [-n[1], n[0]];
    let p_max = c.force_limit;
    let scaled = |s: f64| [n[0] * s, n[1] * s];
    Ok(match c.friction {
        Friction::Frictionless => vec![map_wrench(c.p, scaled(p_max), 0.0)],
        Friction::Bilateral => vec![
            map_wrench(c.p, scaled(p_max), 0.0),
            map_wrench(c.p, scaled(-p_max), 0.0),
        ],
        Friction::SoftFinger { mu, e_soft } => {
            if n_edges < 2 {
                return Err(Error::InvalidInput(format!(
                    "frictional contacts need at least 2 cone edges (got {n_edges})"
                )));
            }
            (0..n_edges)
                .map(|k| {
                    let th = std::f64::consts::TAU * k as f64 / n_edges as f64;
                    let ft = mu * p_max * th.cos();
                    let tau_n = mu * e_soft * p_max * th.sin();
                    let f = [n[0] * p_max + t[0] * ft, n[1] * p_max + t[1] * ft];
                    map_wrench(c.p, f, tau_n)
                })
                .collect()
        }
    })
}
