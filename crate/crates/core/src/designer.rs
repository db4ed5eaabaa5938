//! Inverse design of the cap: thinnest film that keeps molding deflection
//! and bending stress within limits, and thickness equivalence between
//! materials.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::material::Material;
use crate::mechanics::{PlateSolution, PlateSolver, PlateSpec};
use crate::units::{MPA, NM, UM};

/// Thickness lattice used by the search (m).
pub const THICKNESS_STEP: f64 = 10.0 * NM;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignConstraints {
    /// Largest allowed deflection (m); may be infinite.
    pub max_deflection: f64,
    /// Divides the material failure stress.
    pub safety_factor: f64,
    /// Molding pressure (Pa).
    pub pressure: f64,
    pub side_a: f64,
    pub side_b: f64,
    /// Thickness search interval (m).
    pub t_min: f64,
    pub t_max: f64,
    pub grid_n: usize,
}

impl DesignConstraints {
    /// 100 bar on a 30 um x 30 um membrane, 25 nm deflection budget.
    pub fn molding_default() -> Self {
        DesignConstraints {
            max_deflection: 25.0 * NM,
            safety_factor: 1.0,
            pressure: 10.0 * MPA,
            side_a: 30.0 * UM,
            side_b: 30.0 * UM,
            t_min: 0.5 * UM,
            t_max: 20.0 * UM,
            grid_n: 128,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max_deflection > 0.0)
            || !(self.safety_factor >= 1.0)
            || !(self.pressure > 0.0)
            || !(self.side_a > 0.0 && self.side_b > 0.0)
            || !(self.t_min > 0.0 && self.t_min < self.t_max)
        {
            return Err(Error::InvalidInput(format!("invalid design constraints {self:?}")));
        }
        Ok(())
    }
}

/// Plate response of a candidate cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapResponse {
    pub thickness: f64,
    pub w_max: f64,
    pub sigma_max: f64,
}

/// Evaluates candidate thicknesses against one factored plate geometry.
#[derive(Debug, Clone)]
pub struct CapEvaluator {
    solver: Arc<PlateSolver>,
    constraints: DesignConstraints,
}

impl CapEvaluator {
    pub fn new(constraints: &DesignConstraints) -> Result<Self> {
        constraints.validate()?;
        let solver = PlateSolver::shared(constraints.side_a, constraints.side_b, constraints.grid_n)?;
        Ok(CapEvaluator { solver, constraints: *constraints })
    }

    pub fn solve(&self, material: &Material, thickness: f64) -> Result<PlateSolution> {
        let spec = PlateSpec {
            side_a: self.constraints.side_a,
            side_b: self.constraints.side_b,
            thickness,
            material: material.clone(),
            pressure: self.constraints.pressure,
        };
        self.solver.solve(&spec)
    }

    pub fn response(&self, material: &Material, thickness: f64) -> Result<CapResponse> {
        let sol = self.solve(material, thickness)?;
        Ok(CapResponse { thickness, w_max: sol.w_max, sigma_max: sol.sigma_max })
    }

    /// Human-readable list of violated limits; empty when feasible.
    pub fn violations(&self, material: &Material, thickness: f64) -> Result<Vec<String>> {
        let r = self.response(material, thickness)?;
        let allowed = material.failure_stress / self.constraints.safety_factor;
        let mut v = Vec::new();
        if r.w_max > self.constraints.max_deflection {
            v.push(format!("deflection {:.3} nm exceeds {:.3} nm", r.w_max / NM, self.constraints.max_deflection / NM));
        }
        if r.sigma_max > allowed {
            v.push(format!("stress {:.3} MPa exceeds {:.3} MPa", r.sigma_max / MPA, allowed / MPA));
        }
        Ok(v)
    }

    pub fn feasible(&self, material: &Material, thickness: f64) -> Result<bool> {
        Ok(self.violations(material, thickness)?.is_empty())
    }

    /// Candidate thicknesses `t_min + k * step`, ending exactly at `t_max`.
    pub fn lattice(&self) -> Vec<f64> {
        let c = &self.constraints;
        let steps = ((c.t_max - c.t_min) / THICKNESS_STEP - 1e-9).ceil().max(0.0) as usize;
        (0..=steps).map(|k| (c.t_min + k as f64 * THICKNESS_STEP).min(c.t_max)).collect()
    }
}

/// Thinnest lattice thickness meeting both the deflection and the stress
/// limit, found by bisection over the 10 nm thickness lattice.
pub fn min_cap_thickness(material: &Material, constraints: &DesignConstraints) -> Result<f64> {
    let eval = CapEvaluator::new(constraints)?;
    min_cap_thickness_with(&eval, material)
}

pub fn min_cap_thickness_with(eval: &CapEvaluator, material: &Material) -> Result<f64> {
    material.validate()?;
    let lattice = eval.lattice();
    let last = lattice.len() - 1;
    let violations = eval.violations(material, lattice[last])?;
    if !violations.is_empty() {
        return Err(Error::Infeasible { t_max_um: lattice[last] / UM, violations });
    }
    if eval.feasible(material, lattice[0])? {
        return Ok(lattice[0]);
    }
    // invariant: lattice[lo] infeasible, lattice[hi] feasible
    let (mut lo, mut hi) = (0usize, last);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if eval.feasible(material, lattice[mid])? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(lattice[hi])
}

/// What two caps must have in common to be called equivalent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    /// Same maximum deflection.
    #[default]
    Deflection,
    /// Same margin to failure (failure_stress / sigma_max).
    FailureMargin,
}

/// Thickness of `material_b` that matches `(material_a, t_a)` under the
/// constraints' load and geometry.
pub fn equivalent_thickness(
    material_a: &Material,
    t_a: f64,
    material_b: &Material,
    constraints: &DesignConstraints,
    mode: MatchMode,
) -> Result<f64> {
    let eval = CapEvaluator::new(constraints)?;
    equivalent_thickness_with(&eval, material_a, t_a, material_b, mode)
}

pub fn equivalent_thickness_with(
    eval: &CapEvaluator,
    material_a: &Material,
    t_a: f64,
    material_b: &Material,
    mode: MatchMode,
) -> Result<f64> {
    material_a.validate()?;
    material_b.validate()?;
    if !(t_a > 0.0) {
        return Err(Error::InvalidInput("reference thickness must be > 0".into()));
    }
    let c = eval.constraints;
    let reference = eval.response(material_a, t_a)?;
    // both measures decrease with thickness; find where b meets a
    let measure = |m: &Material, r: &CapResponse| match mode {
        MatchMode::Deflection => r.w_max,
        MatchMode::FailureMargin => r.sigma_max / m.failure_stress,
    };
    let target = measure(material_a, &reference);
    let at = |t: f64| -> Result<f64> { Ok(measure(material_b, &eval.response(material_b, t)?) - target) };

    if at(t_a)? == 0.0 {
        return Ok(t_a);
    }
    let (mut lo, mut hi) = (c.t_min, c.t_max);
    let (f_lo, f_hi) = (at(lo)?, at(hi)?);
    if f_lo < 0.0 || f_hi > 0.0 {
        return Err(Error::Domain(format!(
            "equivalent {} thickness lies outside [{:.3}, {:.3}] um",
            material_b.name,
            lo / UM,
            hi / UM
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if at(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
