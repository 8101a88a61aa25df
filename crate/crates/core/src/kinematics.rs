//! Width/angle relations of the chained SLE and the output angle of the
//! double-ratchet stage.
//!
//! The pad-to-pad width and the arm angle α are tied by
//! `w = 4·r_drv·sin α + 2·w_hldr`. The closed state (`w_tool_min`) gives
//! `α_min`; the open/free state (`w_tool_max`) gives `α_init`. All other
//! modules take their α bounds from [`AlphaBounds::from_params`].
//!
//! The rotational-travel formula subtracts `2·r_whl` instead of `2·w_hldr`;
//! it is implemented as written and reported next to the width-relation
//! travel, which is what the cycle model uses.

use serde::{Deserialize, Serialize};

use crate::angle::{asin_deg, cos_deg, sin_deg};
use crate::error::{Error, Result};
use crate::params::ToolParams;

pub fn width_to_alpha(w_tool: f64, params: &ToolParams) -> Result<f64> {
    let lo = 2.0 * params.w_hldr;
    let hi = 4.0 * params.r_drv + 2.0 * params.w_hldr;
    if !(lo..=hi).contains(&w_tool) {
        return Err(Error::domain("w_tool", w_tool, format!("[{lo}, {hi}] mm")));
    }
    Ok(asin_deg((w_tool - lo) / (4.0 * params.r_drv)))
}

pub fn alpha_to_width(alpha: f64, params: &ToolParams) -> Result<f64> {
    if !(0.0..=90.0).contains(&alpha) {
        return Err(Error::domain("alpha", alpha, "[0, 90] degrees"));
    }
    Ok(4.0 * params.r_drv * sin_deg(alpha) + 2.0 * params.w_hldr)
}

/// Arm-angle range swept by the tool between its closed and open states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBounds {
    /// Closed (squeeze extreme) angle.
    pub alpha_min: f64,
    /// Open/free (stretch extreme) angle.
    pub alpha_init: f64,
}

impl AlphaBounds {
    pub fn from_params(params: &ToolParams) -> Result<Self> {
        Ok(Self {
            alpha_min: width_to_alpha(params.w_tool_min, params)?,
            alpha_init: width_to_alpha(params.w_tool_max, params)?,
        })
    }

    pub fn travel(&self) -> f64 {
        self.alpha_init - self.alpha_min
    }
}

/// Maximum rotation travel using the `2·r_whl` width offset.
pub fn max_rotational_travel(params: &ToolParams) -> Result<f64> {
    let denom = 4.0 * params.r_drv;
    let s_max = (params.w_tool_max - 2.0 * params.r_whl) / denom;
    let s_min = (params.w_tool_min - 2.0 * params.r_whl) / denom;
    for (name, s) in [("(w_tool_max - 2 r_whl)/(4 r_drv)", s_max), ("(w_tool_min - 2 r_whl)/(4 r_drv)", s_min)] {
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::Domain {
                quantity: "asin argument",
                value: s,
                range: format!("[-1, 1] for {name}"),
            });
        }
    }
    Ok(asin_deg(s_max) - asin_deg(s_min))
}

/// Which arm angle enters the pad-height formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PadHeightAngle {
    /// α at the closed state, where the wheel spacing is largest.
    #[default]
    Closed,
    /// α at the open state (`α_max` as literally written).
    Open,
}

pub fn min_pad_height(params: &ToolParams, angle: PadHeightAngle) -> Result<f64> {
    let bounds = AlphaBounds::from_params(params)?;
    let alpha = match angle {
        PadHeightAngle::Closed => bounds.alpha_min,
        PadHeightAngle::Open => bounds.alpha_init,
    };
    Ok(pad_height_at(alpha, params))
}

/// Wheel-to-wheel distance `2·(r_drv + r_sprt)·cos α`.
pub fn pad_height_at(alpha: f64, params: &ToolParams) -> f64 {
    2.0 * (params.r_drv + params.r_sprt) * cos_deg(alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Squeezing,
    Stretching,
    Free,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Squeezing => "squeezing",
            Phase::Stretching => "stretching",
            Phase::Free => "free",
        }
    }
}

/// Instantaneous configuration of the linkage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToolState {
    pub alpha: f64,
    pub w_tool: f64,
    pub phase: Phase,
}

impl ToolState {
    pub fn at_alpha(alpha: f64, phase: Phase, params: &ToolParams) -> Result<Self> {
        let bounds = AlphaBounds::from_params(params)?;
        if alpha < bounds.alpha_min - 1e-9 || alpha > bounds.alpha_init + 1e-9 {
            return Err(Error::domain(
                "alpha",
                alpha,
                format!("[{}, {}] degrees", bounds.alpha_min, bounds.alpha_init),
            ));
        }
        Ok(Self {
            alpha,
            w_tool: alpha_to_width(alpha, params)?,
            phase,
        })
    }

    pub fn at_width(w_tool: f64, phase: Phase, params: &ToolParams) -> Result<Self> {
        if w_tool < params.w_tool_min || w_tool > params.w_tool_max {
            return Err(Error::domain(
                "w_tool",
                w_tool,
                format!("[{}, {}] mm", params.w_tool_min, params.w_tool_max),
            ));
        }
        Ok(Self {
            alpha: width_to_alpha(w_tool, params)?,
            w_tool,
            phase,
        })
    }
}

/// Output angle after squeezing for `t` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeAngle {
    pub delta: f64,
    /// The commanded stroke ran past the closed-state stop.
    pub saturated: bool,
}

pub fn output_angle_squeeze(t: f64, v_sqz: f64, params: &ToolParams) -> Result<SqueezeAngle> {
    if t < 0.0 {
        return Err(Error::domain("t", t, "t >= 0 s"));
    }
    if v_sqz <= 0.0 {
        return Err(Error::domain("v_sqz", v_sqz, "v_sqz > 0 mm/s"));
    }
    let bounds = AlphaBounds::from_params(params)?;
    let stroke = params.w_tool_max - params.w_tool_min;
    let travel = v_sqz * t;
    let saturated = travel > stroke;
    let travel = travel.min(stroke);
    let s = sin_deg(bounds.alpha_init) - travel / (4.0 * params.r_drv);
    Ok(SqueezeAngle {
        delta: bounds.alpha_init - asin_deg(s.clamp(-1.0, 1.0)),
        saturated,
    })
}

/// Stretch-phase output angle starting from the arm angle `alpha_start`.
fn stretch_delta(tau: f64, v_stch: f64, alpha_start: f64, alpha_end: f64, r_drv: f64) -> (f64, bool) {
    let s = sin_deg(alpha_start) + v_stch * tau / (4.0 * r_drv);
    let s_end = sin_deg(alpha_end);
    if s >= s_end {
        (alpha_end - alpha_start, s > s_end)
    } else {
        (asin_deg(s) - alpha_start, false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleSample {
    pub t: f64,
    pub delta_out: f64,
    pub phase: Phase,
    pub saturated: bool,
}

/// Squeeze/stretch cycle of the gripper with an ideal (backlash-free)
/// double ratchet. Squeezing runs for `t_m = stroke / v_sqz`, stretching for
/// `stroke / v_stch`, and the pattern repeats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleModel {
    pub bounds: AlphaBounds,
    pub r_drv: f64,
    pub stroke: f64,
    pub v_sqz: f64,
    pub v_stch: f64,
}

impl CycleModel {
    pub fn new(v_sqz: f64, v_stch: f64, params: &ToolParams) -> Result<Self> {
        if v_sqz <= 0.0 {
            return Err(Error::domain("v_sqz", v_sqz, "v_sqz > 0 mm/s"));
        }
        if v_stch <= 0.0 {
            return Err(Error::domain("v_stch", v_stch, "v_stch > 0 mm/s"));
        }
        Ok(Self {
            bounds: AlphaBounds::from_params(params)?,
            r_drv: params.r_drv,
            stroke: params.w_tool_max - params.w_tool_min,
            v_sqz,
            v_stch,
        })
    }

    /// Squeeze/stretch switch instant.
    pub fn t_m(&self) -> f64 {
        self.stroke / self.v_sqz
    }

    pub fn period(&self) -> f64 {
        self.t_m() + self.stroke / self.v_stch
    }

    /// Output rotation of one full cycle, `2·(α_init − α_min)`.
    pub fn advance_per_cycle(&self) -> f64 {
        2.0 * self.bounds.travel()
    }

    fn squeeze_branch(&self, t: f64) -> f64 {
        let s = sin_deg(self.bounds.alpha_init) - self.v_sqz * t / (4.0 * self.r_drv);
        self.bounds.alpha_init - asin_deg(s.clamp(-1.0, 1.0))
    }

    /// Stretch branch: the squeeze output at `t_m` plus the stretch rotation
    /// re-based at the arm angle reached at `t_m`.
    fn stretch_branch(&self, t: f64) -> (f64, bool) {
        let t_m = self.t_m();
        let delta_m = self.squeeze_branch(t_m);
        let alpha_m = self.bounds.alpha_init - delta_m;
        let (d, sat) = stretch_delta(t - t_m, self.v_stch, alpha_m, self.bounds.alpha_init, self.r_drv);
        (delta_m + d, sat)
    }

    /// Evaluates both branches inside the first cycle, without wrapping.
    /// Exposed so the two pieces can be compared at `t_m`.
    pub fn first_cycle_branches(&self, t: f64) -> (f64, f64) {
        (self.squeeze_branch(t), self.stretch_branch(t).0)
    }

    pub fn sample(&self, t: f64) -> Result<CycleSample> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::domain("t", t, "t >= 0 s"));
        }
        let period = self.period();
        let cycles = (t / period).floor();
        let local = t - cycles * period;
        let base = cycles * self.advance_per_cycle();
        let (delta, phase, saturated) = if local <= self.t_m() {
            (self.squeeze_branch(local), Phase::Squeezing, false)
        } else {
            let (d, sat) = self.stretch_branch(local);
            (d, Phase::Stretching, sat)
        };
        Ok(CycleSample {
            t,
            delta_out: base + delta,
            phase,
            saturated,
        })
    }

    /// Time at which the cumulative output first reaches `target` degrees.
    pub fn time_to_angle(&self, target: f64) -> Result<f64> {
        if target < 0.0 || !target.is_finite() {
            return Err(Error::domain("target", target, "target >= 0 degrees"));
        }
        let per_cycle = self.advance_per_cycle();
        let mut cycles = (target / per_cycle).floor();
        let mut rem = target - cycles * per_cycle;
        // An exact multiple is reached at the end of the previous cycle.
        if rem == 0.0 && cycles > 0.0 {
            cycles -= 1.0;
            rem = per_cycle;
        }
        let b = self.bounds;
        let four_r = 4.0 * self.r_drv;
        let local = if rem <= b.travel() {
            (sin_deg(b.alpha_init) - sin_deg(b.alpha_init - rem)) * four_r / self.v_sqz
        } else {
            let stretch = rem - b.travel();
            self.t_m() + (sin_deg(b.alpha_min + stretch) - sin_deg(b.alpha_min)) * four_r / self.v_stch
        };
        Ok(cycles * self.period() + local)
    }

    /// Uniformly sampled trajectory over `[0, duration]`.
    pub fn trajectory(&self, duration: f64, dt: f64) -> Result<CycleTrajectory> {
        if !(dt > 0.0) {
            return Err(Error::domain("dt", dt, "dt > 0 s"));
        }
        if duration < 0.0 {
            return Err(Error::domain("duration", duration, "duration >= 0 s"));
        }
        let n = (duration / dt).round() as usize;
        let samples = (0..=n)
            .map(|i| self.sample(i as f64 * dt))
            .collect::<Result<Vec<_>>>()?;
        Ok(CycleTrajectory {
            samples,
            t_m: self.t_m(),
        })
    }
}

pub fn output_angle_cycle(
    t: f64,
    v_sqz: f64,
    v_stch: f64,
    params: &ToolParams,
) -> Result<CycleSample> {
    CycleModel::new(v_sqz, v_stch, params)?.sample(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleTrajectory {
    pub samples: Vec<CycleSample>,
    pub t_m: f64,
}
