//! Independent reference computations used by the integration tests.
//!
//! Nothing here calls the code under test for the quantity being checked:
//! the etch and closure oracles integrate the rate laws with small explicit
//! steps, coverage is sampled point by point, and the plate oracle is a
//! Ritz expansion evaluated by exact polynomial integration.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use vacpack::geometry::{Hole, HoleShape, Rect};

pub const UM: f64 = 1e-6;
pub const NM: f64 = 1e-9;
pub const MIN: f64 = 60.0;

/// Relative difference, guarded for zero references.
pub fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// Open area of a hole (m^2).
pub fn area(hole: &Hole) -> f64 {
    match hole.shape {
        HoleShape::Circle { diameter } => std::f64::consts::PI * diameter * diameter / 4.0,
        HoleShape::Square { side } => side * side,
        HoleShape::Rectangle { width, length } => width * length,
    }
}

/// Distance from a point to the open region of a hole; 0 inside.
pub fn distance_to_hole(hole: &Hole, p: (f64, f64)) -> f64 {
    let dx = p.0 - hole.center.0;
    let dy = p.1 - hole.center.1;
    match hole.shape {
        HoleShape::Circle { diameter } => ((dx * dx + dy * dy).sqrt() - diameter / 2.0).max(0.0),
        HoleShape::Square { side } => {
            let ex = (dx.abs() - side / 2.0).max(0.0);
            let ey = (dy.abs() - side / 2.0).max(0.0);
            (ex * ex + ey * ey).sqrt()
        }
        HoleShape::Rectangle { width, length } => {
            let ex = (dx.abs() - length / 2.0).max(0.0);
            let ey = (dy.abs() - width / 2.0).max(0.0);
            (ex * ex + ey * ey).sqrt()
        }
    }
}

/// Covered fraction of the footprint by cell-centre point sampling.
pub fn sampled_coverage(footprint: &Rect, holes: &[Hole], underetch: &[f64], pitch: f64) -> f64 {
    let nx = (footprint.width / pitch).ceil() as usize;
    let ny = (footprint.height / pitch).ceil() as usize;
    let (hx, hy) = (footprint.width / nx as f64, footprint.height / ny as f64);
    let mut hit = 0usize;
    for j in 0..ny {
        let y = footprint.y0 + (j as f64 + 0.5) * hy;
        for i in 0..nx {
            let x = footprint.x0 + (i as f64 + 0.5) * hx;
            if holes.iter().zip(underetch).any(|(h, &u)| distance_to_hole(h, (x, y)) <= u) {
                hit += 1;
            }
        }
    }
    hit as f64 / (nx * ny) as f64
}

/// Etch rate law written out directly (SI units).
pub fn etch_rate(r0: f64, ca: f64, cp: f64, h_ref: f64, open_area: f64, h_s: f64, u: f64) -> f64 {
    r0 * (h_ref / h_s) / (1.0 + ca / open_area + cp * u / h_s)
}

/// Classical RK4 on the etch rate law with a 0.001 min step.
#[allow(clippy::too_many_arguments)]
pub fn integrate_underetch(r0: f64, ca: f64, cp: f64, h_ref: f64, open_area: f64, h_s: f64, u0: f64, t: f64) -> f64 {
    let dt_nominal = 0.001 * MIN;
    let steps = (t / dt_nominal).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let f = |u: f64| etch_rate(r0, ca, cp, h_ref, open_area, h_s, u);
    let mut u = u0;
    for _ in 0..steps {
        let k1 = f(u);
        let k2 = f(u + 0.5 * dt * k1);
        let k3 = f(u + 0.5 * dt * k2);
        let k4 = f(u + dt * k3);
        u += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    u
}

/// First multiple of `dt` at which `released(t)` holds, scanning from 0.
pub fn scan_release_time(dt: f64, t_max: f64, mut released: impl FnMut(f64) -> bool) -> Option<f64> {
    let n = (t_max / dt).ceil() as usize;
    (0..=n).map(|k| k as f64 * dt).find(|&t| released(t))
}

/// Closure model parameters spelled out for the oracle.
#[derive(Debug, Clone, Copy)]
pub struct Closure {
    pub kappa0: f64,
    pub kappa_narrow: f64,
    pub s_ref: f64,
    pub ar_knee: f64,
    pub sticking: f64,
}

impl Closure {
    pub fn attenuation(&self, r: f64) -> f64 {
        let floor = self.kappa_narrow / self.kappa0;
        if r >= self.ar_knee {
            1.0
        } else {
            (r / self.ar_knee).max(floor)
        }
    }

    /// d(aperture)/d(deposit) at aperture `a` after `x` deposited on a cap
    /// of thickness `h_c`.
    pub fn rate(&self, a: f64, h_c: f64, x: f64) -> f64 {
        if a <= 0.0 {
            return 0.0;
        }
        2.0 * self.kappa0 * (self.sticking / self.s_ref) * self.attenuation(a / (h_c + x))
    }

    /// Fine explicit midpoint integration of the aperture, 0.1 nm steps.
    /// Returns the aperture and the residue integral of (a/a0)*atten.
    pub fn integrate(&self, a0: f64, h_c: f64, deposited: f64) -> (f64, f64) {
        let dx_nominal = 0.1 * NM;
        let steps = (deposited / dx_nominal).ceil().max(1.0) as usize;
        let dx = deposited / steps as f64;
        let mut a = a0;
        let mut flux = 0.0;
        for k in 0..steps {
            if a <= 0.0 {
                break;
            }
            let x = k as f64 * dx;
            let mid_a = a - 0.5 * dx * self.rate(a, h_c, x);
            let xm = x + 0.5 * dx;
            // closes within the half step
            let a_next = if mid_a <= 0.0 { 0.0 } else { (a - dx * self.rate(mid_a, h_c, xm)).max(0.0) };
            let g = |a: f64, x: f64| if a > 0.0 { a / a0 * self.attenuation(a / (h_c + x)) } else { 0.0 };
            flux += 0.5 * dx * (g(a, x) + g(a_next, x + dx));
            a = a_next;
        }
        (a, flux)
    }

    /// Deposit at which the integrated aperture first reaches zero.
    pub fn seal_thickness(&self, a0: f64, h_c: f64, x_max: f64) -> Option<f64> {
        let dx = 0.1 * NM;
        let mut a = a0;
        let mut x = 0.0;
        while x < x_max {
            let mid_a = a - 0.5 * dx * self.rate(a, h_c, x);
            if mid_a <= 0.0 {
                return Some(x + 0.5 * dx);
            }
            a -= dx * self.rate(mid_a, h_c, x + 0.5 * dx);
            x += dx;
            if a <= 0.0 {
                return Some(x);
            }
        }
        None
    }
}

/// Polynomial in one variable, coefficients by ascending power.
#[derive(Debug, Clone)]
struct Poly(Vec<f64>);

impl Poly {
    fn mul(&self, o: &Poly) -> Poly {
        let mut c = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly(c)
    }

    fn deriv(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    /// Exact integral over [-1, 1].
    fn integral(&self) -> f64 {
        self.0.iter().enumerate().filter(|(k, _)| k % 2 == 0).map(|(k, c)| 2.0 * c / (k as f64 + 1.0)).sum()
    }

    fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Clamped-edge basis (1 - s^2)^2 s^(2m), symmetric in s.
fn clamped_basis(m: usize) -> Poly {
    let base = Poly(vec![1.0, 0.0, -2.0, 0.0, 1.0]);
    let mut mono = vec![0.0; 2 * m + 1];
    mono[2 * m] = 1.0;
    base.mul(&Poly(mono))
}

/// Ritz solution of the clamped rectangular plate under uniform load with
/// `terms` symmetric basis functions per direction.
pub struct RitzPlate {
    a: f64,
    b: f64,
    basis: Vec<Poly>,
    coef: DVector<f64>,
}

impl RitzPlate {
    /// Solves for the deflection per unit `q / D` on an `a x b` plate.
    pub fn solve(a: f64, b: f64, terms: usize) -> Self {
        let basis: Vec<Poly> = (0..terms).map(clamped_basis).collect();
        let d2: Vec<Poly> = basis.iter().map(|p| p.deriv().deriv()).collect();
        let n = terms;
        let i00 = |i: usize, j: usize| basis[i].mul(&basis[j]).integral();
        let i20 = |i: usize, j: usize| d2[i].mul(&basis[j]).integral();
        let i22 = |i: usize, j: usize| d2[i].mul(&d2[j]).integral();
        let (sx, sy) = (2.0 / a, 2.0 / b);
        let jac = a * b / 4.0;
        let idx = |p: usize, q: usize| p * n + q;
        let mut k = DMatrix::<f64>::zeros(n * n, n * n);
        let mut f = DVector::<f64>::zeros(n * n);
        for p in 0..n {
            for q in 0..n {
                f[idx(p, q)] = basis[p].integral() * basis[q].integral() * jac;
                for r in 0..n {
                    for s in 0..n {
                        // integral of lap(phi_pq) * lap(phi_rs)
                        let xx = sx.powi(4) * i22(p, r) * i00(q, s);
                        let yy = sy.powi(4) * i00(p, r) * i22(q, s);
                        let xy = sx * sx * sy * sy * (i20(p, r) * i20(s, q) + i20(r, p) * i20(q, s));
                        k[(idx(p, q), idx(r, s))] = (xx + yy + xy) * jac;
                    }
                }
            }
        }
        let coef = k.lu().solve(&f).expect("Ritz system is SPD");
        RitzPlate { a, b, basis, coef }
    }

    /// Deflection per unit `q / D` at (x, y), origin at the plate centre.
    pub fn w(&self, x: f64, y: f64) -> f64 {
        let (xi, eta) = (2.0 * x / self.a, 2.0 * y / self.b);
        let n = self.basis.len();
        let mut w = 0.0;
        for p in 0..n {
            for q in 0..n {
                w += self.coef[p * n + q] * self.basis[p].eval(xi) * self.basis[q].eval(eta);
            }
        }
        w
    }

    /// d^2 w / dx^2 per unit `q / D` at (x, y).
    pub fn w_xx(&self, x: f64, y: f64) -> f64 {
        let (xi, eta) = (2.0 * x / self.a, 2.0 * y / self.b);
        let n = self.basis.len();
        let scale = (2.0 / self.a).powi(2);
        let mut v = 0.0;
        for p in 0..n {
            let d2 = self.basis[p].deriv().deriv();
            for q in 0..n {
                v += self.coef[p * n + q] * d2.eval(xi) * self.basis[q].eval(eta);
            }
        }
        v * scale
    }
}

/// Thinnest thickness on `t_min + k * step` that satisfies `ok`, by a plain
/// upward scan.
pub fn scan_min_thickness(t_min: f64, t_max: f64, step: f64, mut ok: impl FnMut(f64) -> bool) -> Option<f64> {
    let n = ((t_max - t_min) / step - 1e-9).ceil() as usize;
    (0..=n).map(|k| (t_min + k as f64 * step).min(t_max)).find(|&t| ok(t))
}

/// Thickness of material b with the same flexural rigidity as (E_a, t_a).
pub fn rigidity_matched_thickness(e_a: f64, nu_a: f64, t_a: f64, e_b: f64, nu_b: f64) -> f64 {
    t_a * ((e_a / (1.0 - nu_a * nu_a)) / (e_b / (1.0 - nu_b * nu_b))).cbrt()
}
