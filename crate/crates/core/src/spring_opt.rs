//! Torsional spring selection.
//!
//! A stiffer spring raises the stretching torque and lowers the squeezing
//! torque. The balanced coefficient maximizes
//!
//! ```text
//! J(ξ) = ∫_{α_min}^{α_init} |T_sqz(α, ξ) · T_stch(α, ξ)| dα
//! ```
//!
//! `J` is integrated with the composite trapezoid rule at steps of at most
//! 0.1°. Because of the absolute value `J` grows without bound once the
//! springs stall the gripper over the whole stroke, so the optimizer returns
//! the first interior local maximum on a 0.5 N·mm/° grid (the balanced,
//! pre-stall optimum), refined by golden-section search to 0.01 N·mm/°.

use serde::{Deserialize, Serialize};

use crate::config;
use crate::error::{Error, Result};
use crate::kinematics::AlphaBounds;
use crate::params::ToolParams;
use crate::quasistatics::{spring_pad_force, TorqueModel};

pub const QUADRATURE_STEP_DEG: f64 = 0.1;
pub const GRID_STEP: f64 = 0.5;
pub const XI_TOLERANCE: f64 = 0.01;

/// Uniform α nodes covering the stroke with spacing ≤ `max_step`.
fn alpha_nodes(bounds: AlphaBounds, max_step: f64) -> Vec<f64> {
    let span = bounds.travel();
    let n = (span / max_step).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| bounds.alpha_min + span * i as f64 / n as f64)
        .collect()
}

/// Objective evaluator with the α grid precomputed.
#[derive(Debug, Clone)]
pub struct Objective {
    f_grpr: f64,
    d_fgr: f64,
    /// α nodes and the spring pad force per unit ξ at each node.
    nodes: Vec<(f64, f64)>,
}

impl Objective {
    pub fn new(f_grpr: f64, d_fgr: f64, params: &ToolParams, model: TorqueModel) -> Result<Self> {
        Self::with_step(f_grpr, d_fgr, params, model, QUADRATURE_STEP_DEG)
    }

    pub fn with_step(
        f_grpr: f64,
        d_fgr: f64,
        params: &ToolParams,
        model: TorqueModel,
        step_deg: f64,
    ) -> Result<Self> {
        let bounds = AlphaBounds::from_params(params)?;
        if !(bounds.alpha_min < bounds.alpha_init) {
            return Err(Error::InvalidInput(format!(
                "integration bounds must satisfy alpha_end < alpha_init (got {} and {})",
                bounds.alpha_min, bounds.alpha_init
            )));
        }
        if !(step_deg > 0.0) {
            return Err(Error::domain("step", step_deg, "step > 0 degrees"));
        }
        // The pad force is linear in ξ, so tabulate it once at ξ = 1.
        let unit = ToolParams { xi: 1.0, ..*params };
        let nodes = alpha_nodes(bounds, step_deg)
            .into_iter()
            .map(|a| Ok((a, spring_pad_force(a, &unit, model)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            f_grpr,
            d_fgr,
            nodes,
        })
    }

    fn integrand(&self, xi: f64, unit_force: f64) -> f64 {
        let s = xi * unit_force;
        ((self.f_grpr - s) * self.d_fgr * s * self.d_fgr).abs()
    }

    pub fn eval(&self, xi: f64) -> Result<f64> {
        if xi < 0.0 {
            return Err(Error::domain("xi", xi, "xi >= 0"));
        }
        let mut acc = 0.0;
        for w in self.nodes.windows(2) {
            let (a0, u0) = w[0];
            let (a1, u1) = w[1];
            acc += 0.5 * (a1 - a0) * (self.integrand(xi, u0) + self.integrand(xi, u1));
        }
        Ok(acc)
    }

    /// Fraction of α nodes where the squeeze torque is not positive.
    pub fn stall_fraction(&self, xi: f64) -> f64 {
        let stalled = self
            .nodes
            .iter()
            .filter(|(_, u)| self.f_grpr - xi * u <= 0.0)
            .count();
        stalled as f64 / self.nodes.len() as f64
    }
}

pub fn objective(
    xi: f64,
    f_grpr: f64,
    d_fgr: f64,
    params: &ToolParams,
    model: TorqueModel,
) -> Result<f64> {
    Objective::new(f_grpr, d_fgr, params, model)?.eval(xi)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct XiOptimum {
    pub xi: f64,
    pub objective: f64,
    /// Grid bracket refined by golden-section search.
    pub bracket: (f64, f64),
    pub search_range: (f64, f64),
    /// No interior maximum exists; `xi` is a search-range endpoint.
    pub at_boundary: bool,
    /// The squeeze torque is non-positive over the whole stroke at `xi`.
    pub non_physical: bool,
    pub stall_fraction: f64,
    pub evaluations: usize,
}

fn golden_section_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut evals = 2;
    while (b - a) > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
        evals += 1;
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?, evals + 1))
}

pub fn optimize_xi(
    f_grpr: f64,
    d_fgr: f64,
    params: &ToolParams,
    search_range: (f64, f64),
    model: TorqueModel,
) -> Result<XiOptimum> {
    let (lo, hi) = search_range;
    if !(lo >= 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "search range must be a positive interval, got [{lo}, {hi}]"
        )));
    }
    let obj = Objective::new(f_grpr, d_fgr, params, model)?;

    let n = ((hi - lo) / GRID_STEP).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| (lo + i as f64 * GRID_STEP).min(hi)).collect();
    let values = grid.iter().map(|&x| obj.eval(x)).collect::<Result<Vec<_>>>()?;
    let mut evaluations = values.len();

    let vmax = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let vmin = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if vmax - vmin <= 1e-12 * vmax.abs().max(1.0) {
        return Err(Error::DegenerateOptimum(format!(
            "objective is flat ({vmax}) over [{lo}, {hi}]"
        )));
    }

    let interior = (1..grid.len().saturating_sub(1))
        .find(|&i| values[i] >= values[i - 1] && values[i] > values[i + 1]);

    let (xi, value, bracket, at_boundary) = match interior {
        Some(i) => {
            let (a, b) = (grid[i - 1], grid[i + 1]);
            let (x, v, e) = golden_section_max(|x| obj.eval(x), a, b, XI_TOLERANCE)?;
            evaluations += e;
            // never report worse than the grid point that seeded the bracket
            if v >= values[i] {
                (x, v, (a, b), false)
            } else {
                (grid[i], values[i], (a, b), false)
            }
        }
        None => {
            let last = grid.len() - 1;
            let i = if values[last] >= values[0] { last } else { 0 };
            (grid[i], values[i], (grid[i], grid[i]), true)
        }
    };

    let stall_fraction = obj.stall_fraction(xi);
    Ok(XiOptimum {
        xi,
        objective: value,
        bracket,
        search_range,
        at_boundary,
        non_physical: stall_fraction >= 1.0,
        stall_fraction,
        evaluations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpringCatalogEntry {
    /// N·mm/degree.
    pub xi: f64,
    /// mm.
    pub max_outer_diameter: f64,
    pub label: String,
}

/// Small illustrative catalog; real catalogs are loaded from `[spring]`
/// blocks.
pub fn default_catalog() -> Vec<SpringCatalogEntry> {
    [
        (2.0, 8.0, "illustrative-2.00"),
        (4.0, 9.5, "illustrative-4.00"),
        (6.0, 11.0, "illustrative-6.00"),
        (10.0, 14.0, "illustrative-10.0"),
        (19.5, 20.0, "illustrative-19.5"),
        (30.0, 24.0, "illustrative-30.0"),
    ]
    .into_iter()
    .map(|(xi, d, label)| SpringCatalogEntry {
        xi,
        max_outer_diameter: d,
        label: label.to_string(),
    })
    .collect()
}

/// Spring outer-diameter limit used when none is configured, mm.
pub const DEFAULT_MAX_SPRING_DIAMETER: f64 = 12.0;

pub fn parse_catalog(text: &str) -> Result<Vec<SpringCatalogEntry>> {
    let doc = config::parse(text)?;
    let mut out = Vec::new();
    for block in doc.named("spring") {
        let need = |key: &str| {
            block.get(key).ok_or(Error::Parse {
                line: block.line,
                message: format!("[spring] block is missing `{key}`"),
            })
        };
        let xi_entry = need("xi")?;
        let xi = xi_entry.as_f64()?;
        if !(xi > 0.0) {
            return Err(Error::Parse {
                line: xi_entry.line,
                message: format!("spring xi must be > 0 (got {xi})"),
            });
        }
        let max_outer_diameter = need("max_outer_diameter")?.as_f64()?;
        let label = block
            .get("label")
            .map(|e| e.value.clone())
            .unwrap_or_else(|| format!("xi-{xi}"));
        out.push(SpringCatalogEntry {
            xi,
            max_outer_diameter,
            label,
        });
    }
    if out.is_empty() {
        return Err(Error::Parse {
            line: 1,
            message: "catalog contains no [spring] blocks".into(),
        });
    }
    Ok(out)
}

/// Nearest-ξ entry among those that fit; ties go to the smaller ξ.
pub fn select_from_catalog(
    xi_star: f64,
    catalog: &[SpringCatalogEntry],
    max_diameter: f64,
) -> Result<&SpringCatalogEntry> {
    if catalog.is_empty() {
        return Err(Error::InvalidInput("empty spring catalog".into()));
    }
    catalog
        .iter()
        .filter(|e| e.max_outer_diameter <= max_diameter)
        .min_by(|a, b| {
            let da = (a.xi - xi_star).abs();
            let db = (b.xi - xi_star).abs();
            da.total_cmp(&db).then(a.xi.total_cmp(&b.xi))
        })
        .ok_or(Error::NoCatalogFit { max_diameter })
}
