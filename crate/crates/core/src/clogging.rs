//! Sealing of release holes by non-conformal sputter deposition.
//!
//! The overhang grows inward at the hole rim, closing the governing
//! (minimum) aperture dimension at the same absolute rate per side for every
//! shape. The rate scales with the sticking coefficient and is attenuated
//! when the opening is narrow compared to its depth, which grows with the
//! deposit:
//!
//! ```text
//! da/dx = -2 * kappa0 * (s / s_ref) * atten(a / (h_c + x))
//! atten(r) = min(1, max(kappa_narrow / kappa0, r / ar_knee))
//! ```
//!
//! Because `r` only decreases during deposition, a trajectory passes through
//! at most three phases (full rate, proportional attenuation, narrow floor),
//! each integrable in closed form.

use crate::error::{Error, Result};
use crate::geometry::{hole_min_dimension, Hole};
use crate::material::Material;
use crate::units::{NM, UM};

/// Bisection tolerance on the clog thickness (m).
const CLOG_TOLERANCE: f64 = 1.0 * NM;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClogParams {
    /// Lateral closure per side per unit deposit for wide openings at `s_ref`.
    pub kappa0: f64,
    /// Lateral closure per side per unit deposit in the narrow-hole limit.
    pub kappa_narrow: f64,
    /// Sticking coefficient the closure constants refer to.
    pub s_ref: f64,
    /// Aperture/depth ratio below which closure is attenuated.
    pub ar_knee: f64,
    /// In-cavity residue per unit deposit for a fully open, wide hole.
    pub residue_fraction_scale: f64,
    /// Lateral spread of the residue cone per unit cap depth.
    pub residue_spread: f64,
    /// Largest deposit tried before giving up on sealing (m).
    pub max_deposition: f64,
}

impl Default for ClogParams {
    fn default() -> Self {
        ClogParams {
            kappa0: 0.8,
            kappa_narrow: 0.33,
            s_ref: 0.26,
            ar_knee: 0.5,
            residue_fraction_scale: CALIBRATED_RESIDUE_FRACTION,
            residue_spread: CALIBRATED_RESIDUE_SPREAD,
            max_deposition: 10.0 * UM,
        }
    }
}

/// Residue per unit deposit, set so a 1.5 um hole in a 2 um cap leaves
/// 80 nm under 2.5 um of sputtered SiO2.
pub const CALIBRATED_RESIDUE_FRACTION: f64 = 0.170667;
/// Residue cone spread, set so the same hole leaves a 9 um wide patch.
pub const CALIBRATED_RESIDUE_SPREAD: f64 = 1.03386;

impl ClogParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.kappa0 > 0.0
            && self.kappa_narrow >= 0.0
            && self.s_ref > 0.0
            && self.s_ref <= 1.0
            && self.ar_knee > 0.0
            && self.residue_fraction_scale >= 0.0
            && self.residue_spread >= 0.0
            && self.max_deposition > 0.0;
        if !ok {
            return Err(Error::InvalidInput(format!("invalid clogging parameters {self:?}")));
        }
        Ok(())
    }

    fn floor(&self) -> f64 {
        (self.kappa_narrow / self.kappa0).min(1.0)
    }

    /// Attenuation of the closure rate at aperture/depth ratio `r`.
    pub fn attenuation(&self, r: f64) -> f64 {
        (r / self.ar_knee).max(self.floor()).min(1.0)
    }

    /// Full-rate closure of the min dimension per unit deposit.
    fn full_rate(&self, material: &Material) -> f64 {
        2.0 * self.kappa0 * material.sticking_coefficient / self.s_ref
    }
}

/// Closure of the minimum aperture dimension per unit deposited thickness.
pub fn closure_rate(aperture: f64, cap_depth: f64, material: &Material, params: &ClogParams) -> Result<f64> {
    if !(aperture >= 0.0) || !(cap_depth > 0.0) {
        return Err(Error::Domain(format!("aperture {aperture} and cap depth {cap_depth} out of range")));
    }
    if aperture == 0.0 {
        return Ok(0.0);
    }
    Ok(params.full_rate(material) * params.attenuation(aperture / cap_depth))
}

/// Phase boundaries of one closure trajectory.
#[derive(Debug, Clone, Copy)]
struct Trajectory {
    a0: f64,
    h: f64,
    /// Full-rate closure per unit deposit.
    c: f64,
    knee: f64,
    floor: f64,
    /// End of the full-rate phase and the aperture there.
    x_a: f64,
    a_a: f64,
    /// End of the proportional phase and the aperture there.
    x_b: f64,
    a_b: f64,
    /// Deposit at which the aperture reaches zero (may be infinite).
    x_seal: f64,
}

impl Trajectory {
    fn new(a0: f64, h: f64, material: &Material, params: &ClogParams) -> Self {
        let c = params.full_rate(material);
        let knee = params.ar_knee;
        let floor = params.floor();
        if a0 <= 0.0 {
            return Trajectory { a0, h, c, knee, floor, x_a: 0.0, a_a: 0.0, x_b: 0.0, a_b: 0.0, x_seal: 0.0 };
        }
        // full rate while a / (h + x) >= knee
        let (x_a, a_a) = if a0 >= knee * h {
            let x = (a0 - knee * h) / (c + knee);
            (x, a0 - c * x)
        } else {
            (0.0, a0)
        };
        if floor >= 1.0 {
            let x_seal = a0 / c;
            return Trajectory { a0, h, c, knee, floor, x_a: x_seal, a_a: 0.0, x_b: x_seal, a_b: 0.0, x_seal };
        }
        if x_a > 0.0 && a_a <= 0.0 {
            return Trajectory { a0, h, c, knee, floor, x_a, a_a: 0.0, x_b: x_a, a_b: 0.0, x_seal: x_a };
        }
        // proportional phase: a (h + x)^p constant, p = c / knee
        let p = c / knee;
        let r_start = a_a / (h + x_a);
        let (x_b, a_b) = if floor > 0.0 {
            let r_end = floor * knee;
            if r_start <= r_end {
                (x_a, a_a)
            } else {
                let depth_b = (h + x_a) * (r_start / r_end).powf(1.0 / (p + 1.0));
                (depth_b - h, r_end * depth_b)
            }
        } else {
            (f64::INFINITY, 0.0)
        };
        let x_seal = if floor > 0.0 { x_b + a_b / (c * floor) } else { f64::INFINITY };
        Trajectory { a0, h, c, knee, floor, x_a, a_a, x_b, a_b, x_seal }
    }

    fn aperture(&self, x: f64) -> f64 {
        if x >= self.x_seal {
            return 0.0;
        }
        let a = if x <= self.x_a {
            self.a0 - self.c * x
        } else if x <= self.x_b {
            let p = self.c / self.knee;
            self.a_a * ((self.h + self.x_a) / (self.h + x)).powf(p)
        } else {
            self.a_b - self.c * self.floor * (x - self.x_b)
        };
        a.max(0.0)
    }

    /// Integral over [0, x] of (a / a0) * atten(a / (h + x')).
    fn open_flux_integral(&self, x: f64) -> f64 {
        if self.a0 <= 0.0 {
            return 0.0;
        }
        let x = x.min(self.x_seal);
        let mut total = 0.0;
        // full rate: atten = 1, a linear
        let xa = x.min(self.x_a);
        if xa > 0.0 {
            total += (self.a0 * xa - 0.5 * self.c * xa * xa) / self.a0;
        }
        // proportional: integrand a^2 / (a0 * knee * (h + x))
        let xb = x.min(self.x_b);
        if xb > self.x_a {
            let p = self.c / self.knee;
            let d_a = self.h + self.x_a;
            let d_b = self.h + xb;
            // a^2 = a_a^2 d_a^{2p} d^{-2p}; integral of d^{-2p-1} = d^{-2p} / (-2p)
            let coef = self.a_a * self.a_a / (self.a0 * self.knee);
            total += coef / (2.0 * p) * (1.0 - (d_a / d_b).powf(2.0 * p));
        }
        // floor: atten = floor, a linear
        if x > self.x_b {
            let len = x - self.x_b;
            let a_end = self.a_b - self.c * self.floor * len;
            total += self.floor * 0.5 * (self.a_b + a_end.max(0.0)) * len / self.a0;
        }
        total
    }
}

/// Remaining aperture (m) of an opening of min dimension `aperture` in a
/// cap of thickness `cap_thickness` after `deposited` metres of sealing film.
pub fn aperture_after_dimension(
    aperture: f64,
    cap_thickness: f64,
    deposited: f64,
    material: &Material,
    params: &ClogParams,
) -> Result<f64> {
    check_inputs(aperture, cap_thickness, deposited, material)?;
    if aperture == 0.0 {
        return Ok(0.0);
    }
    Ok(Trajectory::new(aperture, cap_thickness, material, params).aperture(deposited))
}

/// Remaining min dimension of `hole` (m) after `deposited` metres of film.
pub fn aperture_after(
    hole: &Hole,
    cap_thickness: f64,
    deposited: f64,
    material: &Material,
    params: &ClogParams,
) -> Result<f64> {
    aperture_after_dimension(hole_min_dimension(hole), cap_thickness, deposited, material, params)
}

/// Smallest deposit (m) that seals an opening of min dimension `aperture`,
/// to within 1 nm.
pub fn thickness_to_clog_dimension(
    aperture: f64,
    cap_thickness: f64,
    material: &Material,
    params: &ClogParams,
) -> Result<f64> {
    check_inputs(aperture, cap_thickness, 0.0, material)?;
    if aperture == 0.0 {
        return Ok(0.0);
    }
    let traj = Trajectory::new(aperture, cap_thickness, material, params);
    let (mut lo, mut hi) = (0.0, params.max_deposition);
    if traj.aperture(hi) > 0.0 {
        return Err(Error::Unclottable { max_deposition_um: hi / UM });
    }
    while hi - lo > CLOG_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if traj.aperture(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

pub fn thickness_to_clog(hole: &Hole, cap_thickness: f64, material: &Material, params: &ClogParams) -> Result<f64> {
    thickness_to_clog_dimension(hole_min_dimension(hole), cap_thickness, material, params)
}

/// Residue left in the cavity under the hole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residue {
    /// Peak residue thickness (m).
    pub thickness: f64,
    /// Diameter of the residue patch (m).
    pub footprint: f64,
}

/// Residue that enters the cavity while the hole is still open.
pub fn residue_estimate(
    hole: &Hole,
    cap_thickness: f64,
    deposited: f64,
    material: &Material,
    params: &ClogParams,
) -> Result<Residue> {
    let a0 = hole_min_dimension(hole);
    check_inputs(a0, cap_thickness, deposited, material)?;
    if deposited == 0.0 {
        return Ok(Residue { thickness: 0.0, footprint: 0.0 });
    }
    let traj = Trajectory::new(a0, cap_thickness, material, params);
    let thickness = params.residue_fraction_scale * traj.open_flux_integral(deposited);
    let depth = cap_thickness + deposited.min(traj.x_seal);
    Ok(Residue { thickness, footprint: a0 + 2.0 * depth * params.residue_spread })
}

/// Aperture and residue after a given deposit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClogState {
    /// Remaining min dimension (m); zero once sealed.
    pub remaining_aperture: f64,
    /// Deposited thickness (m).
    pub deposited: f64,
    pub residue_thickness: f64,
    pub residue_footprint: f64,
    pub sealed: bool,
}

pub fn clog_state(
    hole: &Hole,
    cap_thickness: f64,
    deposited: f64,
    material: &Material,
    params: &ClogParams,
) -> Result<ClogState> {
    let remaining_aperture = aperture_after(hole, cap_thickness, deposited, material, params)?;
    let residue = residue_estimate(hole, cap_thickness, deposited, material, params)?;
    Ok(ClogState {
        remaining_aperture,
        deposited,
        residue_thickness: residue.thickness,
        residue_footprint: residue.footprint,
        sealed: remaining_aperture == 0.0,
    })
}

fn check_inputs(aperture: f64, cap_thickness: f64, deposited: f64, material: &Material) -> Result<()> {
    if !(aperture >= 0.0) {
        return Err(Error::Domain(format!("aperture must be >= 0, got {aperture}")));
    }
    if !(cap_thickness > 0.0) {
        return Err(Error::Domain(format!("cap thickness must be > 0, got {cap_thickness}")));
    }
    if !(deposited >= 0.0) {
        return Err(Error::Domain(format!("deposited thickness must be >= 0, got {deposited}")));
    }
    if !(material.sticking_coefficient > 0.0) {
        return Err(Error::Domain(format!("{} has no sticking coefficient", material.name)));
    }
    Ok(())
}
