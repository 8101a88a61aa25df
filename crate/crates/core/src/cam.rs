//! Curved inner profile of the holding pads.
//!
//! In the pad frame at the hinge (x toward the ratchet center, y along the
//! pad) the supporting-wheel center follows
//!
//! ```text
//! x_whl = (r_drv − r_sprt)·sin α
//! y_whl = (r_drv + r_sprt)·cos α
//! ```
//!
//! The pad surface is this curve offset by `r_whl` along its normal. With
//! `φ = atan2((r_drv − r_sprt)·cos α, (r_drv + r_sprt)·sin α)` the normal
//! pointing away from the hinge is `(cos φ, sin φ)`, and the profile point is
//! the wheel center moved by `r_whl` against it, which lowers y into the pad.
//! At α = 0 the curve has a horizontal tangent and φ = 90°.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::angle::{cos_deg, sin_deg};
use crate::error::{Error, Result};
use crate::kinematics::AlphaBounds;
use crate::params::ToolParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

fn check(alpha: f64, params: &ToolParams) -> Result<()> {
    if params.r_sprt >= params.r_drv {
        return Err(Error::DegenerateGeometry(format!(
            "supporting arm ({} mm) must be shorter than the driving arm ({} mm)",
            params.r_sprt, params.r_drv
        )));
    }
    if !(0.0..=90.0).contains(&alpha) {
        return Err(Error::domain("alpha", alpha, "[0, 90] degrees"));
    }
    Ok(())
}

pub fn wheel_center(alpha: f64, params: &ToolParams) -> Result<Point> {
    check(alpha, params)?;
    Ok(Point {
        x: (params.r_drv - params.r_sprt) * sin_deg(alpha),
        y: (params.r_drv + params.r_sprt) * cos_deg(alpha),
    })
}

/// Angle of the outward curve normal in radians.
pub fn normal_angle(alpha: f64, params: &ToolParams) -> Result<f64> {
    check(alpha, params)?;
    let a = params.r_drv - params.r_sprt;
    let b = params.r_drv + params.r_sprt;
    Ok((a * cos_deg(alpha)).atan2(b * sin_deg(alpha)))
}

pub fn profile_point(alpha: f64, params: &ToolParams) -> Result<Point> {
    let c = wheel_center(alpha, params)?;
    let phi = normal_angle(alpha, params)?;
    Ok(Point {
        x: c.x - params.r_whl * phi.cos(),
        y: c.y - params.r_whl * phi.sin(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CamSample {
    pub alpha: f64,
    pub wheel: Point,
    pub profile: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CamProfile {
    pub samples: Vec<CamSample>,
}

impl CamProfile {
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.samples.iter().map(|s| s.profile)
    }

    /// Extent of the profile along the pad.
    pub fn y_extent(&self) -> f64 {
        let (lo, hi) = self
            .points()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(p.y), hi.max(p.y))
            });
        hi - lo
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["alpha_deg", "x_whl_mm", "y_whl_mm", "x_sprt_mm", "y_sprt_mm"])?;
        for s in &self.samples {
            w.write_record(
                [s.alpha, s.wheel.x, s.wheel.y, s.profile.x, s.profile.y].map(|v| v.to_string()),
            )?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// One `x y` pair per line.
    pub fn to_polyline(&self) -> String {
        let mut out = String::new();
        for p in self.points() {
            let _ = writeln!(out, "{} {}", p.x, p.y);
        }
        out
    }
}

/// Uniformly α-sampled profile over the closed-to-open stroke.
pub fn synthesize(params: &ToolParams, n_samples: usize) -> Result<CamProfile> {
    if n_samples < 2 {
        return Err(Error::InvalidInput(format!(
            "at least 2 profile samples are required (got {n_samples})"
        )));
    }
    check(0.0, params)?;
    let b = AlphaBounds::from_params(params)?;
    let samples = (0..n_samples)
        .map(|i| {
            let alpha = b.alpha_min + b.travel() * i as f64 / (n_samples - 1) as f64;
            Ok(CamSample {
                alpha,
                wheel: wheel_center(alpha, params)?,
                profile: profile_point(alpha, params)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CamProfile { samples })
}

/// Normal angle from a central difference of the wheel-center curve.
pub fn normal_angle_fd(alpha: f64, params: &ToolParams, h_deg: f64) -> Result<f64> {
    let p0 = wheel_center(alpha - h_deg, params)?;
    let p1 = wheel_center(alpha + h_deg, params)?;
    let (tx, ty) = (p1.x - p0.x, p1.y - p0.y);
    // tangent rotated by +90° points away from the hinge
    Ok(tx.atan2(-ty))
}
