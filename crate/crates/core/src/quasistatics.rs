//! Quasi-static force and torque transfer through the tool.
//!
//! With the arm angle α the spring torque is transmitted to the pads as the
//! force `T_sprg / (r_drv·cos α)`. In the squeezing extreme that force
//! opposes the gripper; in the stretching extreme it is the only driver:
//!
//! ```text
//! T_sqz  = (F_grpr − T_sprg / (r_drv·cos α)) · d_fgr
//! T_stch =           T_sprg / (r_drv·cos α)  · d_fgr
//! ```
//!
//! so `T_sqz + T_stch = F_grpr · d_fgr` for every α.

use serde::{Deserialize, Serialize};

use crate::angle::{cos_deg, sin_deg};
use crate::error::{Error, Result};
use crate::kinematics::AlphaBounds;
use crate::params::{GripperParams, ToolParams};

/// cos α below this is treated as the 90° singularity.
const COS_EPS: f64 = 1e-12;

/// Sign convention for the spring deformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpringSign {
    /// `ξ·(γ + α_init − α)`: squeezing compresses the springs, torque ≥ 0.
    #[default]
    Compressive,
    /// `ξ·(γ + α − α_init)`, negative while squeezing.
    AsPrinted,
}

/// How the spring torque enters the squeeze/stretch torque formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpringAggregation {
    /// One `T_sprg` term, matching the grip-pressure relation where the four
    /// springs and four arms cancel.
    #[default]
    Single,
    /// Four springs acting through one driving arm.
    FourSpring,
}

impl SpringAggregation {
    fn factor(self) -> f64 {
        match self {
            SpringAggregation::Single => 1.0,
            SpringAggregation::FourSpring => 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TorqueModel {
    pub spring_sign: SpringSign,
    pub aggregation: SpringAggregation,
}

pub fn spring_torque_with(alpha: f64, params: &ToolParams, sign: SpringSign) -> Result<f64> {
    let bounds = AlphaBounds::from_params(params)?;
    let deformation = match sign {
        SpringSign::Compressive => params.gamma + (bounds.alpha_init - alpha),
        SpringSign::AsPrinted => params.gamma + (alpha - bounds.alpha_init),
    };
    Ok(params.xi * deformation)
}

pub fn spring_torque(alpha: f64, params: &ToolParams) -> Result<f64> {
    spring_torque_with(alpha, params, SpringSign::Compressive)
}

fn checked_cos(alpha: f64) -> Result<f64> {
    let c = cos_deg(alpha);
    if c.abs() < COS_EPS {
        return Err(Error::Singular(format!(
            "cos(alpha) vanishes at alpha = {alpha}°"
        )));
    }
    Ok(c)
}

/// Pressure the pads exert on the gripper fingers,
/// `(4·T_sprg + T_rtct) / (4·r_drv·cos α)`.
pub fn grip_pressure(alpha: f64, params: &ToolParams) -> Result<f64> {
    let t_sprg = spring_torque(alpha, params)?;
    grip_pressure_from(t_sprg, alpha, params)
}

pub fn grip_pressure_from(t_sprg: f64, alpha: f64, params: &ToolParams) -> Result<f64> {
    let c = checked_cos(alpha)?;
    Ok((4.0 * t_sprg + params.t_rtct) / (4.0 * params.r_drv * c))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoldCondition {
    pub d_com: f64,
    pub d_com_limit: f64,
    pub holds: bool,
}

/// Stable-hold check for soft-finger contacts:
/// `d_com ≤ sqrt(4·μ²·P²·e² / G_tool − e²)`.
///
/// The expression is evaluated as written with P in N, e in mm and G_tool in
/// N; a negative radicand means the grip cannot hold the tool (limit 0).
pub fn hold_condition(d_com: f64, p_grpr: f64, params: &ToolParams) -> Result<HoldCondition> {
    if p_grpr < 0.0 {
        return Err(Error::domain("P_grpr", p_grpr, "P_grpr >= 0 N"));
    }
    let e2 = params.e_soft * params.e_soft;
    let radicand = 4.0 * params.mu * params.mu * p_grpr * p_grpr * e2 / params.g_tool - e2;
    let (d_com_limit, feasible) = if radicand >= 0.0 {
        (radicand.sqrt(), true)
    } else {
        (0.0, false)
    };
    Ok(HoldCondition {
        d_com,
        d_com_limit,
        holds: feasible && d_com <= d_com_limit,
    })
}

/// Form of the finger lever-arm expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FingerLever {
    /// `(w_fgr + l_fgr)·sin β`.
    #[default]
    AsPrinted,
    /// `w_fgr·cos β + l_fgr·sin β`, the projection of the pad diagonal.
    Projected,
}

pub fn d_finger_with(gripper: &GripperParams, form: FingerLever) -> f64 {
    let s = sin_deg(gripper.beta);
    match form {
        FingerLever::AsPrinted => gripper.w_fgr * s + gripper.l_fgr * s,
        FingerLever::Projected => gripper.w_fgr * cos_deg(gripper.beta) + gripper.l_fgr * s,
    }
}

pub fn d_finger(gripper: &GripperParams) -> f64 {
    d_finger_with(gripper, FingerLever::AsPrinted)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeTorque {
    pub torque: f64,
    /// The gripper cannot overcome the springs (`torque < 0`).
    pub stalled: bool,
}

/// Spring force seen at the pads, `k·T_sprg / (r_drv·cos α)`.
pub fn spring_pad_force(alpha: f64, params: &ToolParams, model: TorqueModel) -> Result<f64> {
    let c = checked_cos(alpha)?;
    let t_sprg = spring_torque_with(alpha, params, model.spring_sign)?;
    Ok(model.aggregation.factor() * t_sprg / (params.r_drv * c))
}

pub fn torque_squeeze_with(
    alpha: f64,
    f_grpr: f64,
    d_fgr: f64,
    params: &ToolParams,
    model: TorqueModel,
) -> Result<SqueezeTorque> {
    if f_grpr < 0.0 {
        return Err(Error::domain("F_grpr", f_grpr, "F_grpr >= 0 N"));
    }
    let torque = (f_grpr - spring_pad_force(alpha, params, model)?) * d_fgr;
    Ok(SqueezeTorque {
        torque,
        stalled: torque < 0.0,
    })
}

pub fn torque_squeeze(alpha: f64, f_grpr: f64, d_fgr: f64, params: &ToolParams) -> Result<SqueezeTorque> {
    torque_squeeze_with(alpha, f_grpr, d_fgr, params, TorqueModel::default())
}

pub fn torque_stretch_with(
    alpha: f64,
    d_fgr: f64,
    params: &ToolParams,
    model: TorqueModel,
) -> Result<f64> {
    Ok(spring_pad_force(alpha, params, model)? * d_fgr)
}

pub fn torque_stretch(alpha: f64, d_fgr: f64, params: &ToolParams) -> Result<f64> {
    torque_stretch_with(alpha, d_fgr, params, TorqueModel::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorqueSample {
    pub alpha: f64,
    pub t_sqz: f64,
    pub t_stch: f64,
}

/// Squeeze and stretch torques over an α grid.
pub fn torque_curve(
    alphas: &[f64],
    f_grpr: f64,
    d_fgr: f64,
    params: &ToolParams,
    model: TorqueModel,
) -> Result<Vec<TorqueSample>> {
    if alphas.is_empty() {
        return Err(Error::InvalidInput("empty alpha grid".into()));
    }
    alphas
        .iter()
        .map(|&alpha| {
            Ok(TorqueSample {
                alpha,
                t_sqz: torque_squeeze_with(alpha, f_grpr, d_fgr, params, model)?.torque,
                t_stch: torque_stretch_with(alpha, d_fgr, params, model)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatchetMode {
    /// Output is driven in both phases; the weaker phase limits fastening.
    DoubleRatchet,
    /// Output is driven only while squeezing.
    SingleRatchet,
}

/// Screw sizes in the fastening table.
pub const SCREW_SIZES: [&str; 5] = ["M3", "M3.5", "M4", "M5", "M6"];
/// Property classes in the fastening table.
pub const PROPERTY_CLASSES: [&str; 5] = ["4.8", "6.8", "8.8", "10.9", "12.9"];
/// Tightening torques in N·m, rows by [`SCREW_SIZES`], columns by
/// [`PROPERTY_CLASSES`] (JIS general machinery values).
pub const TIGHTENING_TORQUE_NM: [[f64; 5]; 5] = [
    [0.56, 1.10, 1.45, 2.08, 2.43],
    [0.89, 1.73, 2.28, 3.27, 3.82],
    [1.31, 2.57, 3.38, 4.84, 5.66],
    [2.65, 5.19, 6.80, 9.78, 11.43],
    [4.50, 8.81, 11.60, 16.60, 19.40],
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScrewCell {
    pub size: &'static str,
    pub class: &'static str,
    pub torque_nm: f64,
}

/// Torque gate applied to the fastening table, N·mm.
pub fn fastening_gate(t_sqz_max: f64, t_stch_max: f64, mode: RatchetMode) -> f64 {
    match mode {
        RatchetMode::DoubleRatchet => t_sqz_max.min(t_stch_max),
        RatchetMode::SingleRatchet => t_sqz_max,
    }
}

/// All table cells whose tightening torque does not exceed the gate.
/// Torques are given in N·mm.
pub fn fastenable_screws(t_sqz_max: f64, t_stch_max: f64, mode: RatchetMode) -> Result<Vec<ScrewCell>> {
    if t_sqz_max < 0.0 || t_stch_max < 0.0 {
        return Err(Error::InvalidInput("torques must be >= 0".into()));
    }
    let gate_nm = fastening_gate(t_sqz_max, t_stch_max, mode) / 1000.0;
    let mut cells = Vec::new();
    for (i, size) in SCREW_SIZES.iter().enumerate() {
        for (j, class) in PROPERTY_CLASSES.iter().enumerate() {
            let torque_nm = TIGHTENING_TORQUE_NM[i][j];
            if torque_nm <= gate_nm {
                cells.push(ScrewCell {
                    size,
                    class,
                    torque_nm,
                });
            }
        }
    }
    Ok(cells)
}

/// Largest screw size fastenable at the given property class.
pub fn largest_size_for_class(cells: &[ScrewCell], class: &str) -> Option<&'static str> {
    SCREW_SIZES
        .iter()
        .rev()
        .find(|size| cells.iter().any(|c| c.class == class && c.size == **size))
        .copied()
}
