//! End-to-end process simulation: release, clogging, residue, molding.

use rayon::prelude::*;

use crate::clogging::{clog_state, thickness_to_clog};
use crate::error::{Result, Stage};
use crate::etch::{time_to_release_with, underetch, ReleaseJob};
use crate::mechanics::{PlateSolution, PlateSolver, PlateSpec};
use crate::recipe::{parse_quantity, Recipe};
use crate::units::Dimension;

/// Per hole group results.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleReport {
    pub name: String,
    pub count: usize,
    /// Underetch at the recipe's report time (m).
    pub underetch: f64,
    /// Deposit that seals this hole (m).
    pub clog_thickness: f64,
    /// Aperture left after the recipe's deposit (m).
    pub remaining_aperture: f64,
    pub residue_thickness: f64,
    pub residue_footprint: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoldingReport {
    /// Cap plus sealing film (m).
    pub cap_thickness: f64,
    pub pressure: f64,
    pub w_max: f64,
    pub sigma_max: f64,
    /// failure_stress / sigma_max; infinite when unloaded.
    pub safety_factor: f64,
    pub deflection_ok: bool,
    pub stress_ok: bool,
}

impl MoldingReport {
    pub fn pass(&self) -> bool {
        self.deflection_ok && self.stress_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessReport {
    pub t_release: f64,
    pub structural_loss: f64,
    pub report_time: f64,
    pub holes: Vec<HoleReport>,
    /// Largest per-hole seal thickness (m).
    pub governing_clog_thickness: f64,
    pub clog_deposition: f64,
    pub sealed: bool,
    /// Cavity pressure after sealing (Pa); equals the deposition ambient.
    pub cavity_pressure: f64,
    pub molding: MoldingReport,
}

impl ProcessReport {
    pub fn pass(&self) -> bool {
        self.sealed && self.molding.pass()
    }
}

/// Run every stage of the recipe in order.
pub fn run_recipe(recipe: &Recipe) -> Result<ProcessReport> {
    let holes = recipe.all_holes();
    let structural = recipe.material(&recipe.structural);
    let sealing = recipe.material(&recipe.sealing);
    let stack = &recipe.stack;

    let job = ReleaseJob {
        footprint: &stack.footprint,
        holes: &holes,
        stack,
        params: &recipe.etch,
        structural,
        options: recipe.release.options,
    };
    let release = time_to_release_with(&job).map_err(|e| e.in_stage(Stage::Release))?;
    log::debug!("released after {:.3} s", release.time);

    let mut reports = Vec::with_capacity(recipe.holes.len());
    for group in &recipe.holes {
        let u = underetch(&group.hole, stack, &recipe.etch, recipe.release.report_time)
            .map_err(|e| e.in_stage(Stage::Release))?;
        let clog = thickness_to_clog(&group.hole, stack.cap_thickness, sealing, &recipe.clog)
            .map_err(|e| e.in_stage(Stage::Clogging))?;
        let state = clog_state(&group.hole, stack.cap_thickness, stack.clog_deposition, sealing, &recipe.clog)
            .map_err(|e| e.in_stage(Stage::Residue))?;
        reports.push(HoleReport {
            name: group.name.clone(),
            count: group.count(),
            underetch: u,
            clog_thickness: clog,
            remaining_aperture: state.remaining_aperture,
            residue_thickness: state.residue_thickness,
            residue_footprint: state.residue_footprint,
        });
    }
    let governing = reports.iter().map(|h| h.clog_thickness).fold(0.0, f64::max);
    let sealed = reports.iter().all(|h| h.remaining_aperture == 0.0);

    let molding = run_molding(recipe)?.0;
    Ok(ProcessReport {
        t_release: release.time,
        structural_loss: release.structural_loss,
        report_time: recipe.release.report_time,
        holes: reports,
        governing_clog_thickness: governing,
        clog_deposition: stack.clog_deposition,
        sealed,
        cavity_pressure: recipe.chamber_pressure,
        molding,
    })
}

/// Plate check of the sealed cap under the molding pressure.
pub fn run_molding(recipe: &Recipe) -> Result<(MoldingReport, PlateSolution)> {
    let m = &recipe.molding;
    let material = recipe.material(&recipe.structural);
    let spec = PlateSpec {
        side_a: m.membrane_width,
        side_b: m.membrane_height,
        thickness: recipe.stack.cap_thickness + recipe.stack.clog_deposition,
        material: material.clone(),
        pressure: m.pressure,
    };
    if spec.is_thick() {
        log::warn!(
            "cap thickness {:.3} um exceeds a fifth of the span; thin-plate theory is approximate",
            spec.thickness / crate::units::UM
        );
    }
    let solution = PlateSolver::shared(spec.side_a, spec.side_b, m.grid_n)
        .and_then(|s| s.solve(&spec))
        .map_err(|e| e.in_stage(Stage::Molding))?;
    let safety_factor =
        if solution.sigma_max > 0.0 { material.failure_stress / solution.sigma_max } else { f64::INFINITY };
    let report = MoldingReport {
        cap_thickness: spec.thickness,
        pressure: m.pressure,
        w_max: solution.w_max,
        sigma_max: solution.sigma_max,
        safety_factor,
        deflection_ok: solution.w_max <= m.max_deflection,
        stress_ok: solution.sigma_max <= material.failure_stress / m.safety_factor,
    };
    Ok((report, solution))
}

/// One swept recipe variant.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Swept value in SI units.
    pub value: f64,
    pub report: ProcessReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub dimension: Dimension,
    pub rows: Vec<SweepRow>,
}

/// Run the recipe once per value of `param`; rows come back in input order.
/// Values carry their unit suffix, e.g. `"2um"`.
pub fn sweep(recipe: &Recipe, param: &str, values: &[String]) -> Result<Sweep> {
    // validates the path even when there is nothing to run
    let dimension = recipe.doc().clone().set(param, "0")?;
    let variants = values
        .iter()
        .map(|v| {
            let mut doc = recipe.doc().clone();
            doc.set(param, v)?;
            let r = Recipe::from_doc(doc)?;
            let x = parse_quantity(v, dimension)?;
            Ok((x, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = variants
        .into_par_iter()
        .map(|(value, r)| run_recipe(&r).map(|report| SweepRow { value, report }))
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep { param: param.to_string(), dimension, rows })
}
