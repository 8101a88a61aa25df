//! Penalty-contact world with a chamfered hexagonal socket.
//!
//! Geometry is described in the socket frame: origin at the center of the
//! socket face, `+z` out of the socket, so the attack direction is `−z`.
//! The tooltip is reduced to its axis point; the bore therefore appears as a
//! cylinder of radius `radial_clearance` (the lateral play of the tip axis),
//! widened at the mouth by a conical chamfer of `chamfer_depth` and
//! `chamfer_half_angle` measured from the socket axis. A hex tip whose yaw is
//! off the 60° lattice by more than the angular tolerance rests on a shoulder
//! at the bottom of the chamfer; an aligned tip can reach `hole_depth`.

use nalgebra::{Isometry3, Rotation3, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::angle::{tan_deg, wrap_symmetric};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct InsertionWorld {
    pub socket_pose: Isometry3<f64>,
    pub hole_depth: f64,
    pub hex_across_flats: f64,
    pub chamfer_depth: f64,
    /// Degrees from the socket axis.
    pub chamfer_half_angle: f64,
    /// Lateral play of the tip axis inside the bore, mm.
    pub radial_clearance: f64,
    /// N/mm.
    pub surface_stiffness: f64,
}

impl Default for InsertionWorld {
    fn default() -> Self {
        Self {
            socket_pose: Isometry3::identity(),
            hole_depth: 8.0,
            hex_across_flats: 6.35,
            chamfer_depth: 1.0,
            chamfer_half_angle: 45.0,
            radial_clearance: 0.2,
            surface_stiffness: 20.0,
        }
    }
}

impl InsertionWorld {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (name, v) in [
            ("hole_depth", self.hole_depth),
            ("hex_across_flats", self.hex_across_flats),
            ("chamfer_depth", self.chamfer_depth),
            ("radial_clearance", self.radial_clearance),
            ("surface_stiffness", self.surface_stiffness),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                problems.push(format!("{name} must be positive (got {v})"));
            }
        }
        if !(self.chamfer_half_angle > 0.0 && self.chamfer_half_angle < 90.0) {
            problems.push(format!(
                "chamfer_half_angle must be in (0, 90) degrees (got {})",
                self.chamfer_half_angle
            ));
        }
        if self.chamfer_depth >= self.hole_depth {
            problems.push(format!(
                "chamfer_depth ({}) must be less than hole_depth ({})",
                self.chamfer_depth, self.hole_depth
            ));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems))
        }
    }

    /// Lateral offset of the tip axis below which the chamfer catches it.
    pub fn capture_radius(&self) -> f64 {
        self.radial_clearance + self.chamfer_depth * tan_deg(self.chamfer_half_angle)
    }

    /// Yaw misalignment (degrees, modulo 60°) the hex fit tolerates:
    /// the angle whose lever at half the across-flats equals the clearance.
    pub fn angular_tolerance(&self) -> f64 {
        (self.radial_clearance / (0.5 * self.hex_across_flats)).atan().to_degrees()
    }

    /// `yaw` is the tip yaw relative to the hole's hex lattice, degrees.
    pub fn is_aligned(&self, yaw: f64) -> bool {
        wrap_symmetric(yaw, 60.0).abs() <= self.angular_tolerance()
    }

    pub fn attack_vector(&self) -> Vector3<f64> {
        self.socket_pose.rotation * Vector3::new(0.0, 0.0, -1.0)
    }

    /// Socket-frame x axis expressed in the world frame.
    pub fn lateral_axis(&self) -> Vector3<f64> {
        self.socket_pose.rotation * Vector3::x()
    }

    pub fn to_local(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.socket_pose.rotation.inverse() * (p - self.socket_pose.translation.vector)
    }

    pub fn to_world(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.socket_pose.rotation * p + self.socket_pose.translation.vector
    }

    /// Contact force on the tip in the socket frame.
    pub fn contact_force_local(&self, p: &Vector3<f64>, yaw: f64) -> Vector3<f64> {
        let k = self.surface_stiffness;
        let rho = p.x.hypot(p.y);
        let radial = if rho > 1e-12 {
            Vector3::new(p.x / rho, p.y / rho, 0.0)
        } else {
            Vector3::zeros()
        };
        let r_h = self.radial_clearance;
        let r_c = self.capture_radius();
        let mut f = Vector3::zeros();
        if p.z < -self.chamfer_depth && rho < r_c {
            let floor = if self.is_aligned(yaw) {
                -self.hole_depth
            } else {
                -self.chamfer_depth
            };
            if p.z < floor {
                f.z += k * (floor - p.z);
            }
            if rho > r_h {
                f -= radial * (k * (rho - r_h));
            }
        } else if rho >= r_c {
            if p.z < 0.0 {
                f.z += k * -p.z;
            }
        } else if rho > r_h {
            let beta = self.chamfer_half_angle.to_radians();
            let z_surface = -(r_c - rho) / beta.tan();
            if p.z < z_surface {
                let pen = (z_surface - p.z) * beta.sin();
                f += (Vector3::new(0.0, 0.0, beta.sin()) - radial * beta.cos()) * (k * pen);
            }
        }
        f
    }

    /// Contact force on the tip in the world frame for a world position.
    pub fn contact_force(&self, p: &Vector3<f64>, yaw: f64) -> Vector3<f64> {
        self.socket_pose.rotation * self.contact_force_local(&self.to_local(p), yaw)
    }
}

/// Wrist force/torque sensor mounted with orientation `r_grpr`.
#[derive(Debug, Clone)]
pub struct ForceSensor {
    pub r_grpr: Rotation3<f64>,
    noise: Option<(Normal<f64>, ChaCha8Rng)>,
}

impl ForceSensor {
    pub fn ideal(r_grpr: Rotation3<f64>) -> Self {
        Self { r_grpr, noise: None }
    }

    /// Additive zero-mean Gaussian noise with standard deviation `sigma` N
    /// on each sensor axis.
    pub fn noisy(r_grpr: Rotation3<f64>, sigma: f64, seed: u64) -> Result<Self> {
        if sigma == 0.0 {
            return Ok(Self::ideal(r_grpr));
        }
        let normal = Normal::new(0.0, sigma).map_err(|_| Error::domain("noise_sigma", sigma, "sigma >= 0 N"))?;
        Ok(Self {
            r_grpr,
            noise: Some((normal, ChaCha8Rng::seed_from_u64(seed))),
        })
    }

    /// Reading in the sensor frame for a true world-frame force.
    pub fn read(&mut self, f_world: &Vector3<f64>) -> Vector3<f64> {
        let mut f = self.r_grpr.inverse() * f_world;
        if let Some((normal, rng)) = &mut self.noise {
            for c in f.iter_mut() {
                *c += normal.sample(rng);
            }
        }
        f
    }

    /// World-frame estimate `R_grpr · F_sensor`.
    pub fn measure(&mut self, f_world: &Vector3<f64>) -> Vector3<f64> {
        self.r_grpr * self.read(f_world)
    }
}
