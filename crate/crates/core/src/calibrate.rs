//! Least-squares calibration of the release-etch constants against
//! measured underetch distances.

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::etch::{underetch, EtchParams};
use crate::geometry::{hole_area, Hole, PackageStack, Rect};
use crate::units::{MIN, UM};

/// Reference underetch table: 2 min release, four hole diameters, 1.1 um
/// and 3.3 um aSi.
pub const BUILTIN_UNDERETCH_DATA: &str = include_str!("../data/underetch_2min.csv");

/// One measured underetch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtchObservation {
    pub hole: Hole,
    /// Sacrificial thickness (m).
    pub sacrificial_thickness: f64,
    /// Etch time (s).
    pub time: f64,
    /// Measured underetch (m).
    pub underetch: f64,
}

/// Parse the comma-separated observation format
/// `shape, dim1_um, dim2_um, h_s_um, t_min, U_um`; `#` starts a comment.
pub fn parse_observations(text: &str) -> Result<Vec<EtchObservation>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 6 {
            return Err(Error::parse(line_no, format!("expected 6 fields, found {}", fields.len())));
        }
        let num = |i: usize, what: &str| -> Result<f64> {
            if fields[i].is_empty() {
                return Ok(0.0);
            }
            fields[i].parse::<f64>().map_err(|_| Error::parse(line_no, format!("bad {what} '{}'", fields[i])))
        };
        let d1 = num(1, "dim1")? * UM;
        let d2 = num(2, "dim2")? * UM;
        let hole = match fields[0].to_ascii_lowercase().as_str() {
            "circle" => Hole::circle(d1, (0.0, 0.0)),
            "square" => Hole::square(d1, (0.0, 0.0)),
            "rectangle" => Hole::rectangle(d1, d2, (0.0, 0.0)),
            other => return Err(Error::parse(line_no, format!("unknown shape '{other}'"))),
        }
        .map_err(|e| Error::parse(line_no, e.to_string()))?;
        let obs = EtchObservation {
            hole,
            sacrificial_thickness: num(3, "h_s")? * UM,
            time: num(4, "time")? * MIN,
            underetch: num(5, "underetch")? * UM,
        };
        if !(obs.sacrificial_thickness > 0.0 && obs.time > 0.0 && obs.underetch >= 0.0) {
            return Err(Error::parse(line_no, "thickness and time must be > 0, underetch >= 0"));
        }
        out.push(obs);
    }
    Ok(out)
}

pub fn read_observations(path: &Path) -> Result<Vec<EtchObservation>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_observations(&text)
}

/// Which constants the fit may move; frozen ones keep their initial value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub fit_intrinsic_rate: bool,
    pub fit_aperture: bool,
    pub fit_path: bool,
    /// Starting point; `None` runs a multi-start search.
    pub initial: Option<EtchParams>,
    pub reference_thickness: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            fit_intrinsic_rate: true,
            fit_aperture: true,
            fit_path: true,
            initial: None,
            reference_thickness: UM,
        }
    }
}

impl FitConfig {
    fn free_count(&self) -> usize {
        [self.fit_intrinsic_rate, self.fit_aperture, self.fit_path].iter().filter(|f| **f).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    pub params: EtchParams,
    /// Euclidean norm of the underetch residuals (m).
    pub residual_norm: f64,
}

/// Fit all three etch constants to the observations.
pub fn calibrate_etch(observations: &[EtchObservation]) -> Result<Calibration> {
    calibrate_etch_with(observations, &FitConfig::default())
}

/// Constants in fit units: (R0 um/min, c_aperture um^2, c_path).
type Theta = [f64; 3];

fn to_params(theta: &Theta, reference_thickness: f64) -> EtchParams {
    EtchParams {
        intrinsic_rate: theta[0] * UM / MIN,
        aperture_constant: theta[1] * UM * UM,
        path_constant: theta[2],
        reference_thickness,
    }
}

fn from_params(p: &EtchParams) -> Theta {
    [p.intrinsic_rate / (UM / MIN), p.aperture_constant / (UM * UM), p.path_constant]
}

pub fn calibrate_etch_with(observations: &[EtchObservation], config: &FitConfig) -> Result<Calibration> {
    let n_free = config.free_count();
    if n_free == 0 {
        return Err(Error::InvalidInput("no free parameters to fit".into()));
    }
    if observations.len() < n_free {
        return Err(Error::Underdetermined(format!(
            "{} observations for {} free parameters",
            observations.len(),
            n_free
        )));
    }
    if config.fit_aperture && config.fit_intrinsic_rate {
        let mut areas: Vec<f64> = observations.iter().map(|o| hole_area(&o.hole)).collect();
        areas.sort_by(f64::total_cmp);
        areas.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());
        if areas.len() < 2 {
            return Err(Error::Underdetermined("observations must span at least two hole sizes".into()));
        }
    }

    let free: Vec<usize> = [config.fit_intrinsic_rate, config.fit_aperture, config.fit_path]
        .iter()
        .enumerate()
        .filter_map(|(i, f)| f.then_some(i))
        .collect();

    let starts: Vec<Theta> = match config.initial {
        Some(p) => vec![from_params(&p)],
        None => {
            let r0 = observations
                .iter()
                .map(|o| o.underetch * o.sacrificial_thickness / (config.reference_thickness * o.time))
                .fold(0.0, f64::max)
                / (UM / MIN);
            let mut v = Vec::new();
            for ca in [1.0, 10.0, 100.0, 1000.0] {
                for cp in [0.1, 1.0, 10.0, 100.0] {
                    for scale in [1.0, 10.0, 100.0] {
                        let mut th = [r0.max(1e-6) * scale, ca, cp];
                        if !config.fit_aperture {
                            th[1] = 0.0;
                        }
                        if !config.fit_path {
                            th[2] = 0.0;
                        }
                        v.push(th);
                    }
                }
            }
            v.dedup();
            v
        }
    };

    let problem = Problem { observations, reference_thickness: config.reference_thickness };
    let mut best: Option<(Theta, f64)> = None;
    for start in starts {
        let (theta, cost) = problem.levenberg_marquardt(start, &free)?;
        if best.is_none_or(|(_, c)| cost < c) {
            best = Some((theta, cost));
        }
    }
    let (theta, cost) = best.expect("at least one start");
    Ok(Calibration { params: to_params(&theta, config.reference_thickness), residual_norm: cost.sqrt() * UM })
}

struct Problem<'a> {
    observations: &'a [EtchObservation],
    reference_thickness: f64,
}

impl Problem<'_> {
    /// Residuals in um.
    fn residuals(&self, theta: &Theta) -> Result<DVector<f64>> {
        let params = to_params(theta, self.reference_thickness);
        let mut r = DVector::zeros(self.observations.len());
        for (i, o) in self.observations.iter().enumerate() {
            let fp = Rect::from_size(1.0, 1.0)?;
            let stack = PackageStack {
                sacrificial_thickness: o.sacrificial_thickness,
                cap_thickness: 1.0,
                clog_deposition: 1.0,
                footprint: fp,
            };
            r[i] = (underetch(&o.hole, &stack, &params, o.time)? - o.underetch) / UM;
        }
        Ok(r)
    }

    fn cost(&self, theta: &Theta) -> Result<f64> {
        Ok(self.residuals(theta)?.norm_squared())
    }

    fn jacobian(&self, theta: &Theta, free: &[usize]) -> Result<DMatrix<f64>> {
        let mut jac = DMatrix::zeros(self.observations.len(), free.len());
        for (col, &i) in free.iter().enumerate() {
            let h = 1e-6 * theta[i].abs().max(1e-3);
            let mut plus = *theta;
            let mut minus = *theta;
            plus[i] += h;
            minus[i] = (minus[i] - h).max(0.0);
            let d = plus[i] - minus[i];
            let diff = (self.residuals(&plus)? - self.residuals(&minus)?) / d;
            jac.set_column(col, &diff);
        }
        Ok(jac)
    }

    /// Projected Levenberg-Marquardt; only cost-reducing steps are taken.
    fn levenberg_marquardt(&self, start: Theta, free: &[usize]) -> Result<(Theta, f64)> {
        let mut theta = start;
        let mut cost = self.cost(&theta)?;
        let mut lambda = 1e-3;
        for _ in 0..500 {
            let r = self.residuals(&theta)?;
            let jac = self.jacobian(&theta, free)?;
            let jtj = jac.transpose() * &jac;
            let grad = jac.transpose() * &r;
            if grad.amax() < 1e-14 {
                break;
            }
            let mut improved = false;
            while lambda < 1e12 {
                let mut a = jtj.clone();
                for k in 0..free.len() {
                    a[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
                }
                let Some(step) = a.lu().solve(&(-&grad)) else {
                    lambda *= 10.0;
                    continue;
                };
                let mut trial = theta;
                for (k, &i) in free.iter().enumerate() {
                    trial[i] = (trial[i] + step[k]).max(0.0);
                }
                if trial[0] <= 0.0 {
                    trial[0] = theta[0] * 0.5;
                }
                let trial_cost = self.cost(&trial)?;
                if trial_cost < cost {
                    let rel = (cost - trial_cost) / cost.max(1e-300);
                    theta = trial;
                    cost = trial_cost;
                    lambda = (lambda / 10.0).max(1e-12);
                    improved = rel > 1e-15;
                    break;
                }
                lambda *= 10.0;
            }
            if !improved {
                break;
            }
        }
        Ok((theta, cost))
    }
}
