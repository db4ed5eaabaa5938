//! Clamped Kirchhoff plate under uniform transverse pressure.
//!
//! `D * lap(lap(w)) = q` is discretized with the 13-point finite-difference
//! biharmonic on a regular `(n+1) x (n+1)` node grid. Clamped edges set
//! `w = 0` on the boundary and mirror the first interior row into a ghost
//! row (`dw/dn = 0`). The system matrix depends only on the geometry and
//! the grid, so [`PlateSolver`] factors it once for a unit load over unit
//! rigidity and every solve is a rescaling of that field.

mod banded;

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::material::Material;
use crate::units::{MPA, NM, UM};

pub use banded::BandedSpd;

/// Smallest grid accepted by the solver.
pub const MIN_GRID: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct PlateSpec {
    /// Side along x (m).
    pub side_a: f64,
    /// Side along y (m).
    pub side_b: f64,
    /// Plate thickness (m).
    pub thickness: f64,
    pub material: Material,
    /// Uniform transverse pressure (Pa).
    pub pressure: f64,
}

impl PlateSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.side_a > 0.0 && self.side_b > 0.0 && self.thickness > 0.0) {
            return Err(Error::InvalidInput("plate sides and thickness must be > 0".into()));
        }
        if !(self.pressure >= 0.0) {
            return Err(Error::InvalidInput("pressure must be >= 0".into()));
        }
        self.material.validate()?;
        Ok(())
    }

    /// True when the plate is too thick for thin-plate theory to be accurate.
    pub fn is_thick(&self) -> bool {
        self.thickness > self.side_a.min(self.side_b) / 5.0
    }

    pub fn rigidity(&self) -> f64 {
        flexural_rigidity(&self.material, self.thickness)
    }
}

/// Bending stiffness `E t^3 / (12 (1 - nu^2))` in N*m.
pub fn flexural_rigidity(material: &Material, thickness: f64) -> f64 {
    let nu = material.poisson_ratio;
    material.youngs_modulus * thickness.powi(3) / (12.0 * (1.0 - nu * nu))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlateSolution {
    pub grid_n: usize,
    pub side_a: f64,
    pub side_b: f64,
    /// Nodal deflection (m), row-major with x fastest: `w[j * (n + 1) + i]`.
    pub deflection: Vec<f64>,
    /// Largest deflection (m).
    pub w_max: f64,
    /// Node of the largest deflection.
    pub w_max_at: (f64, f64),
    /// Largest principal bending stress at the surface (Pa).
    pub sigma_max: f64,
    pub sigma_max_at: (f64, f64),
}

impl PlateSolution {
    pub fn nodes_per_side(&self) -> usize {
        self.grid_n + 1
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.deflection[j * (self.grid_n + 1) + i]
    }

    pub fn node_position(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.side_a / self.grid_n as f64, j as f64 * self.side_b / self.grid_n as f64)
    }

    /// Dump `x_um,y_um,w_nm` lines for external plotting.
    pub fn write_field<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x_um,y_um,w_nm")?;
        let m = self.nodes_per_side();
        for j in 0..m {
            for i in 0..m {
                let (x, y) = self.node_position(i, j);
                writeln!(out, "{},{},{}", x / UM, y / UM, self.at(i, j) / NM)?;
            }
        }
        Ok(())
    }
}

/// Factored clamped-plate operator for one geometry and grid.
#[derive(Debug, Clone)]
pub struct PlateSolver {
    side_a: f64,
    side_b: f64,
    grid_n: usize,
    /// Nodal deflection for `q / D = 1`.
    unit_field: Vec<f64>,
}

impl PlateSolver {
    pub fn new(side_a: f64, side_b: f64, grid_n: usize) -> Result<Self> {
        if grid_n < MIN_GRID {
            return Err(Error::InvalidInput(format!("grid_n must be >= {MIN_GRID}, got {grid_n}")));
        }
        if !(side_a > 0.0 && side_b > 0.0) || !(side_a / side_b).is_finite() || !(side_b / side_a).is_finite() {
            return Err(Error::Solver("degenerate plate geometry".into()));
        }
        let n = grid_n;
        let m = n - 1;
        let hx = side_a / n as f64;
        let hy = side_b / n as f64;
        // equations scaled by hx^4
        let cx = 1.0;
        let cy = (hx / hy).powi(4);
        let cxy = 2.0 * (hx / hy).powi(2);

        let idx = |i: usize, j: usize| (j - 1) * m + (i - 1);
        let mut a = BandedSpd::zeros(m * m, 2 * m);
        let stencil_1d = |k: isize| -> f64 {
            match k {
                0 => 6.0,
                1 | -1 => -4.0,
                2 | -2 => 1.0,
                _ => 0.0,
            }
        };
        let second = |k: isize| -> f64 {
            if k == 0 {
                -2.0
            } else {
                1.0
            }
        };
        for j in 1..n {
            for i in 1..n {
                let row = idx(i, j);
                let push = |ii: isize, jj: isize, v: f64, a: &mut BandedSpd| {
                    // clamped: boundary rows are zero, ghosts mirror the first interior row
                    let reflect = |k: isize| -> Option<usize> {
                        if k == -1 {
                            Some(1)
                        } else if k == n as isize + 1 {
                            Some(n - 1)
                        } else if k <= 0 || k >= n as isize {
                            None
                        } else {
                            Some(k as usize)
                        }
                    };
                    if let (Some(ri), Some(rj)) = (reflect(ii), reflect(jj)) {
                        let col = idx(ri, rj);
                        if col <= row {
                            a.add(row, col, v);
                        }
                    }
                };
                let (ii, jj) = (i as isize, j as isize);
                for k in -2..=2isize {
                    push(ii + k, jj, cx * stencil_1d(k), &mut a);
                    push(ii, jj + k, cy * stencil_1d(k), &mut a);
                }
                for di in -1..=1isize {
                    for dj in -1..=1isize {
                        push(ii + di, jj + dj, cxy * second(di) * second(dj), &mut a);
                    }
                }
            }
        }
        a.factor()?;
        let mut rhs = vec![hx.powi(4); m * m];
        a.solve_in_place(&mut rhs)?;

        let mut unit_field = vec![0.0; (n + 1) * (n + 1)];
        for j in 1..n {
            for i in 1..n {
                unit_field[j * (n + 1) + i] = rhs[idx(i, j)];
            }
        }
        Ok(PlateSolver { side_a, side_b, grid_n, unit_field })
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    /// Process-wide cached solver for a geometry; factorization happens once.
    pub fn shared(side_a: f64, side_b: f64, grid_n: usize) -> Result<Arc<PlateSolver>> {
        type Key = (u64, u64, usize);
        static CACHE: OnceLock<Mutex<HashMap<Key, Arc<PlateSolver>>>> = OnceLock::new();
        let key = (side_a.to_bits(), side_b.to_bits(), grid_n);
        let cache = CACHE.get_or_init(Default::default);
        if let Some(s) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(Arc::clone(s));
        }
        let solver = Arc::new(PlateSolver::new(side_a, side_b, grid_n)?);
        let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
        if map.len() > 32 {
            map.clear();
        }
        Ok(Arc::clone(map.entry(key).or_insert(solver)))
    }

    pub fn matches(&self, spec: &PlateSpec) -> bool {
        self.side_a == spec.side_a && self.side_b == spec.side_b
    }

    pub fn solve(&self, spec: &PlateSpec) -> Result<PlateSolution> {
        spec.validate()?;
        if !self.matches(spec) {
            return Err(Error::InvalidInput("plate geometry does not match the factored solver".into()));
        }
        let scale = spec.pressure / spec.rigidity();
        let deflection: Vec<f64> = self.unit_field.iter().map(|w| w * scale).collect();
        let mut solution = PlateSolution {
            grid_n: self.grid_n,
            side_a: self.side_a,
            side_b: self.side_b,
            deflection,
            w_max: 0.0,
            w_max_at: (self.side_a / 2.0, self.side_b / 2.0),
            sigma_max: 0.0,
            sigma_max_at: (0.0, self.side_b / 2.0),
        };
        let m = self.grid_n + 1;
        let mut best = (0.0, m / 2, m / 2);
        for j in 0..m {
            for i in 0..m {
                let w = solution.at(i, j);
                if w > best.0 {
                    best = (w, i, j);
                }
            }
        }
        solution.w_max = best.0;
        if best.0 > 0.0 {
            solution.w_max_at = solution.node_position(best.1, best.2);
        }
        let (sigma, at) = stress_extremum(spec, &solution);
        solution.sigma_max = sigma;
        solution.sigma_max_at = at;
        Ok(solution)
    }
}

/// Solve the clamped plate on a `grid_n x grid_n` division.
pub fn solve_plate(spec: &PlateSpec, grid_n: usize) -> Result<PlateSolution> {
    spec.validate()?;
    PlateSolver::shared(spec.side_a, spec.side_b, grid_n)?.solve(spec)
}

/// Largest surface bending stress `6 M / t^2` (Pa) over all nodes, from
/// second differences of the deflection field.
pub fn max_bending_stress(spec: &PlateSpec, solution: &PlateSolution) -> f64 {
    stress_extremum(spec, solution).0
}

fn stress_extremum(spec: &PlateSpec, sol: &PlateSolution) -> (f64, (f64, f64)) {
    let n = sol.grid_n;
    let hx = sol.side_a / n as f64;
    let hy = sol.side_b / n as f64;
    let d = spec.rigidity();
    let nu = spec.material.poisson_ratio;
    let w = |i: usize, j: usize| sol.at(i, j);

    // second derivative along one axis; one-sided second order on edges
    let d2 = |vals: [f64; 4], h: f64| (2.0 * vals[0] - 5.0 * vals[1] + 4.0 * vals[2] - vals[3]) / (h * h);
    let wxx = |i: usize, j: usize| -> f64 {
        if i == 0 {
            d2([w(0, j), w(1, j), w(2, j), w(3, j)], hx)
        } else if i == n {
            d2([w(n, j), w(n - 1, j), w(n - 2, j), w(n - 3, j)], hx)
        } else {
            (w(i - 1, j) - 2.0 * w(i, j) + w(i + 1, j)) / (hx * hx)
        }
    };
    let wyy = |i: usize, j: usize| -> f64 {
        if j == 0 {
            d2([w(i, 0), w(i, 1), w(i, 2), w(i, 3)], hy)
        } else if j == n {
            d2([w(i, n), w(i, n - 1), w(i, n - 2), w(i, n - 3)], hy)
        } else {
            (w(i, j - 1) - 2.0 * w(i, j) + w(i, j + 1)) / (hy * hy)
        }
    };
    let wxy = |i: usize, j: usize| -> f64 {
        if i == 0 || j == 0 || i == n || j == n {
            0.0
        } else {
            (w(i + 1, j + 1) - w(i + 1, j - 1) - w(i - 1, j + 1) + w(i - 1, j - 1)) / (4.0 * hx * hy)
        }
    };

    let mut best = (0.0, (0.0, sol.side_b / 2.0));
    for j in 0..=n {
        for i in 0..=n {
            let (kxx, kyy, kxy) = (wxx(i, j), wyy(i, j), wxy(i, j));
            let mx = -d * (kxx + nu * kyy);
            let my = -d * (kyy + nu * kxx);
            let mxy = -d * (1.0 - nu) * kxy;
            let mean = 0.5 * (mx + my);
            let radius = (0.25 * (mx - my) * (mx - my) + mxy * mxy).sqrt();
            let m_abs = mean.abs() + radius;
            let sigma = 6.0 * m_abs / (spec.thickness * spec.thickness);
            if sigma > best.0 {
                best = (sigma, sol.node_position(i, j));
            }
        }
    }
    best
}

/// One row of a material trade study.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialComparison {
    pub material: String,
    pub thickness: f64,
    pub w_max: f64,
    pub sigma_max: f64,
    /// failure_stress / sigma_max; infinite when unloaded.
    pub safety_factor: f64,
}

/// Solve each plate and tabulate deflection, stress and safety factor.
pub fn compare_materials(specs: &[PlateSpec], grid_n: usize) -> Result<Vec<MaterialComparison>> {
    let mut solvers: Vec<PlateSolver> = Vec::new();
    let mut rows = Vec::with_capacity(specs.len());
    for spec in specs {
        spec.validate()?;
        let pos = match solvers.iter().position(|s| s.matches(spec)) {
            Some(p) => p,
            None => {
                solvers.push(PlateSolver::new(spec.side_a, spec.side_b, grid_n)?);
                solvers.len() - 1
            }
        };
        let sol = solvers[pos].solve(spec)?;
        let safety_factor =
            if sol.sigma_max > 0.0 { spec.material.failure_stress / sol.sigma_max } else { f64::INFINITY };
        rows.push(MaterialComparison {
            material: spec.material.name.clone(),
            thickness: spec.thickness,
            w_max: sol.w_max,
            sigma_max: sol.sigma_max,
            safety_factor,
        });
    }
    Ok(rows)
}

/// Human-readable trade-study table (um, nm, MPa).
pub fn format_comparison(rows: &[MaterialComparison]) -> String {
    let mut s = format!("{:<10} {:>10} {:>10} {:>12} {:>8}\n", "material", "t_um", "w_max_nm", "sigma_MPa", "SF");
    for r in rows {
        s.push_str(&format!(
            "{:<10} {:>10.3} {:>10.3} {:>12.3} {:>8.2}\n",
            r.material,
            r.thickness / UM,
            r.w_max / NM,
            r.sigma_max / MPA,
            r.safety_factor
        ));
    }
    s
}
