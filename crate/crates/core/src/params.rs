//! Tool and gripper constants.
//!
//! Lengths are in mm, angles in degrees, forces in N, torques in N·mm and the
//! spring coefficient in N·mm/degree. Defaults reproduce the second (curved
//! pad) prototype. The friction coefficient, soft-finger eccentricity, tool
//! weight and pawl torque are not quantified for the prototype; the shipped
//! values for those four are artifact defaults and can be overridden.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::angle::asin_deg;
use crate::config::{self, Block};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToolParams {
    /// Maximum width between the holding pads (open state).
    pub w_tool_max: f64,
    /// Minimum width between the holding pads (closed state).
    pub w_tool_min: f64,
    /// Distance from the holding surface to the hinge center.
    pub w_hldr: f64,
    /// Holding-pad thickness.
    pub w_pad: f64,
    /// Driving-arm length.
    pub r_drv: f64,
    /// Supporting-arm length.
    pub r_sprt: f64,
    /// Supporting-wheel radius.
    pub r_whl: f64,
    /// Holding-pad height.
    pub l_tool: f64,
    /// Torsional spring coefficient, N·mm/degree.
    pub xi: f64,
    /// Spring preload deformation, degrees.
    pub gamma: f64,
    /// Ratchet diameter.
    pub d_rtct: f64,
    /// Resisting torque of the reversing pawl, N·mm.
    pub t_rtct: f64,
    /// Finger/pad friction coefficient.
    pub mu: f64,
    /// Soft-finger eccentricity parameter.
    pub e_soft: f64,
    /// Tool weight, N.
    pub g_tool: f64,
}

impl Default for ToolParams {
    fn default() -> Self {
        Self {
            w_tool_max: 83.0,
            w_tool_min: 40.0,
            w_hldr: 6.5,
            w_pad: 2.0,
            r_drv: 20.0,
            r_sprt: 10.0,
            r_whl: 1.5,
            l_tool: 54.0,
            xi: 6.0,
            gamma: 0.0,
            d_rtct: 32.0,
            t_rtct: 0.0,
            mu: 0.5,
            e_soft: 5.0,
            g_tool: 2.0,
        }
    }
}

/// Gripper-side quantities. `w_fgr`/`l_fgr` default to a pad whose largest
/// lever arm is 45 mm and whose projected lever arm peaks at a 60° holding
/// angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GripperParams {
    pub f_grpr_max: f64,
    /// Width closing speed while squeezing, mm/s.
    pub v_sqz: f64,
    /// Width opening speed while stretching, mm/s.
    pub v_stch: f64,
    /// Finger-pad width.
    pub w_fgr: f64,
    /// Finger-pad height.
    pub l_fgr: f64,
    /// Holding angle, degrees.
    pub beta: f64,
}

impl Default for GripperParams {
    fn default() -> Self {
        Self {
            f_grpr_max: 125.0,
            v_sqz: 150.0,
            v_stch: 150.0,
            w_fgr: 22.5,
            l_fgr: 39.0,
            beta: 57.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: &str) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    fn push(&mut self, code: &'static str, message: String) {
        self.violations.push(Violation { code, message });
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Validation(
                self.violations.into_iter().map(|v| v.message).collect(),
            ))
        }
    }
}

const LENGTHS: [&str; 10] = [
    "w_tool_max",
    "w_tool_min",
    "w_hldr",
    "w_pad",
    "r_drv",
    "r_sprt",
    "r_whl",
    "l_tool",
    "d_rtct",
    "e_soft",
];

impl ToolParams {
    fn length(&self, name: &str) -> f64 {
        match name {
            "w_tool_max" => self.w_tool_max,
            "w_tool_min" => self.w_tool_min,
            "w_hldr" => self.w_hldr,
            "w_pad" => self.w_pad,
            "r_drv" => self.r_drv,
            "r_sprt" => self.r_sprt,
            "r_whl" => self.r_whl,
            "l_tool" => self.l_tool,
            "d_rtct" => self.d_rtct,
            "e_soft" => self.e_soft,
            _ => unreachable!("unknown length {name}"),
        }
    }

    fn field_mut(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "w_tool_max" => &mut self.w_tool_max,
            "w_tool_min" => &mut self.w_tool_min,
            "w_hldr" => &mut self.w_hldr,
            "w_pad" => &mut self.w_pad,
            "r_drv" => &mut self.r_drv,
            "r_sprt" => &mut self.r_sprt,
            "r_whl" => &mut self.r_whl,
            "l_tool" => &mut self.l_tool,
            "xi" => &mut self.xi,
            "gamma" => &mut self.gamma,
            "d_rtct" => &mut self.d_rtct,
            "t_rtct" => &mut self.t_rtct,
            "mu" => &mut self.mu,
            "e_soft" => &mut self.e_soft,
            "g_tool" => &mut self.g_tool,
            _ => return None,
        })
    }

    fn fields(&self) -> [(&'static str, f64); 15] {
        [
            ("w_tool_max", self.w_tool_max),
            ("w_tool_min", self.w_tool_min),
            ("w_hldr", self.w_hldr),
            ("w_pad", self.w_pad),
            ("r_drv", self.r_drv),
            ("r_sprt", self.r_sprt),
            ("r_whl", self.r_whl),
            ("l_tool", self.l_tool),
            ("xi", self.xi),
            ("gamma", self.gamma),
            ("d_rtct", self.d_rtct),
            ("t_rtct", self.t_rtct),
            ("mu", self.mu),
            ("e_soft", self.e_soft),
            ("g_tool", self.g_tool),
        ]
    }
}

impl GripperParams {
    fn field_mut(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "f_grpr_max" => &mut self.f_grpr_max,
            "v_sqz" => &mut self.v_sqz,
            "v_stch" => &mut self.v_stch,
            "w_fgr" => &mut self.w_fgr,
            "l_fgr" => &mut self.l_fgr,
            "beta" => &mut self.beta,
            _ => return None,
        })
    }

    fn fields(&self) -> [(&'static str, f64); 6] {
        [
            ("f_grpr_max", self.f_grpr_max),
            ("v_sqz", self.v_sqz),
            ("v_stch", self.v_stch),
            ("w_fgr", self.w_fgr),
            ("l_fgr", self.l_fgr),
            ("beta", self.beta),
        ]
    }
}

/// Checks every tool invariant, including the pad/ratchet clearance and the
/// requirement that the open-state arm angle lies strictly inside (0°, 90°).
pub fn validate(params: &ToolParams) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (name, value) in params.fields() {
        if !value.is_finite() {
            report.push("non_finite", format!("{name} is not finite"));
        }
    }
    for name in LENGTHS {
        let v = params.length(name);
        if v.is_finite() && v <= 0.0 {
            report.push("non_positive_length", format!("{name} must be > 0 mm (got {v})"));
        }
    }
    if params.w_tool_min >= params.w_tool_max {
        report.push(
            "min_exceeds_max",
            format!(
                "min exceeds max: w_tool_min ({}) must be < w_tool_max ({})",
                params.w_tool_min, params.w_tool_max
            ),
        );
    }
    if params.w_tool_min < params.d_rtct {
        report.push(
            "pads_collide_with_ratchet",
            format!(
                "pads collide with ratchet: w_tool_min ({}) must be >= d_rtct ({})",
                params.w_tool_min, params.d_rtct
            ),
        );
    }
    if params.xi < 0.0 {
        report.push("negative_xi", format!("xi must be >= 0 (got {})", params.xi));
    }
    if params.gamma < 0.0 {
        report.push(
            "negative_gamma",
            format!("gamma must be >= 0 (got {})", params.gamma),
        );
    }
    if params.mu <= 0.0 {
        report.push("non_positive_mu", format!("mu must be > 0 (got {})", params.mu));
    }
    if params.t_rtct < 0.0 {
        report.push(
            "negative_t_rtct",
            format!("t_rtct must be >= 0 (got {})", params.t_rtct),
        );
    }
    if params.g_tool <= 0.0 {
        report.push(
            "non_positive_weight",
            format!("g_tool must be > 0 (got {})", params.g_tool),
        );
    }
    if params.r_drv > 0.0 {
        let s = (params.w_tool_max - 2.0 * params.w_hldr) / (4.0 * params.r_drv);
        if !(s > 0.0 && s < 1.0) {
            let alpha = if (-1.0..=1.0).contains(&s) {
                format!("{:.3}°", asin_deg(s))
            } else {
                "undefined".to_string()
            };
            report.push(
                "open_angle_out_of_range",
                format!("open-state arm angle must lie in (0°, 90°); width relation gives {alpha}"),
            );
        }
    }
    report
}

pub fn validate_gripper(gripper: &GripperParams) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (name, value) in gripper.fields() {
        if !value.is_finite() {
            report.push("non_finite", format!("{name} is not finite"));
        }
    }
    if gripper.f_grpr_max <= 0.0 {
        report.push(
            "non_positive_force",
            format!("f_grpr_max must be > 0 (got {})", gripper.f_grpr_max),
        );
    }
    if gripper.v_sqz <= 0.0 || gripper.v_stch <= 0.0 {
        report.push("non_positive_speed", "finger speeds must be > 0".to_string());
    }
    if gripper.w_fgr < 0.0 || gripper.l_fgr < 0.0 {
        report.push(
            "negative_finger_size",
            "finger-pad width and height must be >= 0".to_string(),
        );
    }
    if !(gripper.beta > 0.0 && gripper.beta <= 90.0) {
        report.push(
            "beta_out_of_range",
            format!("beta must lie in (0°, 90°] (got {})", gripper.beta),
        );
    }
    report
}

/// Result of reading a parameter file.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedParams {
    pub tool: ToolParams,
    pub gripper: GripperParams,
    /// Non-fatal diagnostics such as unknown keys.
    pub warnings: Vec<String>,
}

/// Applies the root block of `doc` on top of `tool`/`gripper`, returning
/// warnings for keys that belong to neither record.
pub(crate) fn apply_block(
    block: &Block,
    tool: &mut ToolParams,
    gripper: &mut GripperParams,
    warnings: &mut Vec<String>,
) -> Result<()> {
    for entry in &block.entries {
        if let Some(slot) = tool.field_mut(&entry.key) {
            *slot = entry.as_f64()?;
        } else if let Some(slot) = gripper.field_mut(&entry.key) {
            *slot = entry.as_f64()?;
        } else {
            warnings.push(format!("line {}: unknown key `{}` ignored", entry.line, entry.key));
        }
    }
    Ok(())
}

/// Parses parameter text. Missing keys keep their defaults; the result is
/// validated before it is returned.
pub fn parse_params(text: &str) -> Result<LoadedParams> {
    let doc = config::parse(text)?;
    let mut tool = ToolParams::default();
    let mut gripper = GripperParams::default();
    let mut warnings = Vec::new();
    apply_block(doc.root(), &mut tool, &mut gripper, &mut warnings)?;
    for block in doc.blocks.iter().skip(1) {
        warnings.push(format!(
            "line {}: block `[{}]` ignored by the parameter loader",
            block.line,
            block.name.as_deref().unwrap_or_default()
        ));
    }
    let mut violations = validate(&tool).violations;
    violations.extend(validate_gripper(&gripper).violations);
    ValidationReport { violations }.into_result()?;
    Ok(LoadedParams {
        tool,
        gripper,
        warnings,
    })
}

pub fn load_params(path: impl AsRef<Path>) -> Result<LoadedParams> {
    let text = std::fs::read_to_string(path)?;
    parse_params(&text)
}

/// Serializes both records in the configuration grammar. Values use the
/// shortest representation that parses back to the same `f64`.
pub fn save_params(tool: &ToolParams, gripper: &GripperParams) -> String {
    let mut out = String::from("# tool\n");
    for (k, v) in tool.fields() {
        let _ = writeln!(out, "{k} = {v:?}");
    }
    out.push_str("\n# gripper\n");
    for (k, v) in gripper.fields() {
        let _ = writeln!(out, "{k} = {v:?}");
    }
    out
}
