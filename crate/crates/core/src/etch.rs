//! Transport-limited isotropic release etch of the sacrificial layer.
//!
//! Etchant reaches the aSi through the hole aperture and then travels
//! laterally through the channel already opened under the cap. Both act as
//! series resistances on the reactant flux, and the front advances by
//! consuming a film of thickness `h_s`:
//!
//! ```text
//! dU/dt = R0 * (h_ref / h_s) / (1 + c_aperture / A_open + c_path * U / h_s)
//! ```
//!
//! The equation is separable, so underetch has the closed form
//! `B*U + k*U^2/2 = K*t` with `B = 1 + c_aperture/A_open`, `k = c_path/h_s`
//! and `K = R0*h_ref/h_s`.

use crate::error::{Error, Result};
use crate::geometry::{default_grid_pitch, hole_area, release_coverage, Hole, PackageStack, Rect};
use crate::material::Material;
use crate::units::{MIN, UM};

/// Intrinsic rate fitted to the digitized underetch data (um/min).
pub const CALIBRATED_INTRINSIC_RATE_UM_MIN: f64 = 66.3545;
/// Aperture constant fitted to the digitized underetch data (um^2).
pub const CALIBRATED_APERTURE_UM2: f64 = 329.549;
/// Path constant fitted to the digitized underetch data.
pub const CALIBRATED_PATH: f64 = 9.11485;

/// Default cap on the release time (s).
pub const DEFAULT_MAX_RELEASE_TIME: f64 = 120.0 * MIN;

/// Bisection stops once the time bracket is narrower than this (s).
const RELEASE_TIME_TOLERANCE: f64 = 1e-3 * MIN;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtchParams {
    /// Front speed with no transport limitation on a film of
    /// `reference_thickness` (m/s).
    pub intrinsic_rate: f64,
    /// Aperture conductance constant, the exposed-surface factor (m^2).
    pub aperture_constant: f64,
    /// Lateral channel constant, the path factor.
    pub path_constant: f64,
    /// Film thickness at which `intrinsic_rate` is quoted (m).
    pub reference_thickness: f64,
}

impl Default for EtchParams {
    fn default() -> Self {
        EtchParams {
            intrinsic_rate: CALIBRATED_INTRINSIC_RATE_UM_MIN * UM / MIN,
            aperture_constant: CALIBRATED_APERTURE_UM2 * UM * UM,
            path_constant: CALIBRATED_PATH,
            reference_thickness: UM,
        }
    }
}

impl EtchParams {
    /// Calibrated transport constants with the sacrificial material's own
    /// intrinsic rate.
    pub fn for_material(material: &Material) -> Self {
        EtchParams { intrinsic_rate: material.intrinsic_etch_rate, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.intrinsic_rate > 0.0)
            || !(self.aperture_constant >= 0.0)
            || !(self.path_constant >= 0.0)
            || !(self.reference_thickness > 0.0)
        {
            return Err(Error::InvalidInput(format!("invalid etch parameters {self:?}")));
        }
        Ok(())
    }

    /// `(B, k, K)` of the closed form for one hole.
    fn coefficients(&self, hole: &Hole, sacrificial_thickness: f64) -> (f64, f64, f64) {
        let b = 1.0 + self.aperture_constant / hole_area(hole);
        let k = self.path_constant / sacrificial_thickness;
        let big_k = self.intrinsic_rate * self.reference_thickness / sacrificial_thickness;
        (b, k, big_k)
    }
}

/// Instantaneous front speed dU/dt (m/s) at underetch `u`.
pub fn etch_rate(hole: &Hole, stack: &PackageStack, params: &EtchParams, u: f64) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(Error::Domain(format!("underetch must be >= 0, got {u}")));
    }
    let (b, k, big_k) = params.coefficients(hole, stack.sacrificial_thickness);
    Ok(big_k / (b + k * u))
}

/// Underetch distance (m) after etching for `t` seconds from a fresh hole.
pub fn underetch(hole: &Hole, stack: &PackageStack, params: &EtchParams, t: f64) -> Result<f64> {
    underetch_from(hole, stack, params, 0.0, t)
}

/// Underetch after a further `dt` seconds starting from underetch `u0`.
pub fn underetch_from(hole: &Hole, stack: &PackageStack, params: &EtchParams, u0: f64, dt: f64) -> Result<f64> {
    if !(dt >= 0.0) {
        return Err(Error::Domain(format!("etch time must be >= 0, got {dt}")));
    }
    if !(u0 >= 0.0) {
        return Err(Error::Domain(format!("underetch must be >= 0, got {u0}")));
    }
    let (b, k, big_k) = params.coefficients(hole, stack.sacrificial_thickness);
    let s = b * u0 + 0.5 * k * u0 * u0 + big_k * dt;
    // rationalized root, stable as k -> 0
    Ok(2.0 * s / (b + (b * b + 2.0 * k * s).sqrt()))
}

/// Release front of every hole at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct EtchState {
    /// Per-hole underetch (m).
    pub underetch: Vec<f64>,
    /// Elapsed etch time (s).
    pub elapsed: f64,
    /// Thickness lost from the structural film (m).
    pub structural_loss: f64,
    pub released: bool,
}

impl EtchState {
    pub fn start(n_holes: usize) -> Self {
        EtchState { underetch: vec![0.0; n_holes], elapsed: 0.0, structural_loss: 0.0, released: false }
    }

    /// Advance every front by `dt` seconds and refresh the release flag.
    pub fn advance(&mut self, job: &ReleaseJob<'_>, dt: f64) -> Result<()> {
        if self.underetch.len() != job.holes.len() {
            return Err(Error::InvalidInput("etch state does not match hole list".into()));
        }
        for (u, hole) in self.underetch.iter_mut().zip(job.holes) {
            *u = underetch_from(hole, job.stack, job.params, *u, dt)?;
        }
        self.elapsed += dt;
        self.structural_loss = job.structural.selectivity_loss * self.elapsed;
        self.released = job.coverage_of(&self.underetch)? >= 1.0;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReleaseOptions {
    /// Give up if the footprint is not released by this time (s).
    pub max_time: f64,
    /// Coverage raster pitch (m); defaults to a hole-based value.
    pub grid_pitch: Option<f64>,
}

impl Default for ReleaseOptions {
    fn default() -> Self {
        ReleaseOptions { max_time: DEFAULT_MAX_RELEASE_TIME, grid_pitch: None }
    }
}

/// Everything needed to evaluate release progress for one layout.
#[derive(Debug, Clone, Copy)]
pub struct ReleaseJob<'a> {
    pub footprint: &'a Rect,
    pub holes: &'a [Hole],
    pub stack: &'a PackageStack,
    pub params: &'a EtchParams,
    pub structural: &'a Material,
    pub options: ReleaseOptions,
}

impl ReleaseJob<'_> {
    fn pitch(&self) -> f64 {
        self.options.grid_pitch.unwrap_or_else(|| default_grid_pitch(self.holes))
    }

    fn coverage_of(&self, underetch: &[f64]) -> Result<f64> {
        release_coverage(self.footprint, self.holes, underetch, self.pitch())
    }

    /// Footprint coverage after etching for `t` seconds.
    pub fn coverage_at(&self, t: f64) -> Result<f64> {
        let u = self.holes.iter().map(|h| underetch(h, self.stack, self.params, t)).collect::<Result<Vec<_>>>()?;
        self.coverage_of(&u)
    }

    /// Front state after etching for `t` seconds.
    pub fn state_at(&self, t: f64) -> Result<EtchState> {
        let mut state = EtchState::start(self.holes.len());
        state.advance(self, t)?;
        Ok(state)
    }
}

/// Release time and structural loss for a layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReleaseResult {
    /// Time to full release (s).
    pub time: f64,
    /// Structural film consumed meanwhile (m).
    pub structural_loss: f64,
}

/// Smallest etch time at which the hole fronts cover the whole footprint.
pub fn time_to_release(
    footprint: &Rect,
    holes: &[Hole],
    stack: &PackageStack,
    params: &EtchParams,
    structural: &Material,
) -> Result<ReleaseResult> {
    let job = ReleaseJob { footprint, holes, stack, params, structural, options: ReleaseOptions::default() };
    time_to_release_with(&job)
}

pub fn time_to_release_with(job: &ReleaseJob<'_>) -> Result<ReleaseResult> {
    if job.holes.is_empty() {
        return Err(Error::InvalidInput("release needs at least one hole".into()));
    }
    job.params.validate()?;
    let released = |t: f64| job.coverage_at(t).map(|c| c >= 1.0);

    let time = if released(0.0)? {
        0.0
    } else {
        let (mut lo, mut hi) = (0.0, job.options.max_time);
        if !released(hi)? {
            return Err(Error::ReleaseTooSlow { max_time_min: hi / MIN });
        }
        while hi - lo > RELEASE_TIME_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if released(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    };
    Ok(ReleaseResult { time, structural_loss: job.structural.selectivity_loss * time })
}
