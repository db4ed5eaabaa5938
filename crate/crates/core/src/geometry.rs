//! Layout primitives: release holes, the film stack and the cavity
//! footprint, plus the purely geometric queries shared by the physical
//! models. All lengths are metres.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HoleShape {
    Circle {
        diameter: f64,
    },
    Square {
        side: f64,
    },
    /// Axis-aligned; `width <= length`, with the length along x.
    Rectangle {
        width: f64,
        length: f64,
    },
}

/// One release perforation through the cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hole {
    pub shape: HoleShape,
    pub center: (f64, f64),
}

impl Hole {
    pub fn circle(diameter: f64, center: (f64, f64)) -> Result<Self> {
        Self::new(HoleShape::Circle { diameter }, center)
    }

    pub fn square(side: f64, center: (f64, f64)) -> Result<Self> {
        Self::new(HoleShape::Square { side }, center)
    }

    /// The two sides may be given in either order.
    pub fn rectangle(a: f64, b: f64, center: (f64, f64)) -> Result<Self> {
        let (width, length) = if a <= b { (a, b) } else { (b, a) };
        Self::new(HoleShape::Rectangle { width, length }, center)
    }

    pub fn new(shape: HoleShape, center: (f64, f64)) -> Result<Self> {
        let ok = match shape {
            HoleShape::Circle { diameter } => diameter > 0.0,
            HoleShape::Square { side } => side > 0.0,
            HoleShape::Rectangle { width, length } => width > 0.0 && width <= length,
        };
        if !ok || !center.0.is_finite() || !center.1.is_finite() {
            return Err(Error::InvalidInput(format!("invalid hole {shape:?}")));
        }
        Ok(Hole { shape, center })
    }

    /// Same shape, different center.
    pub fn at(&self, center: (f64, f64)) -> Self {
        Hole { shape: self.shape, center }
    }

    /// Same hole with its governing dimension replaced (the rectangle keeps
    /// its length).
    pub fn with_min_dimension(&self, dim: f64) -> Result<Self> {
        let shape = match self.shape {
            HoleShape::Circle { .. } => HoleShape::Circle { diameter: dim },
            HoleShape::Square { .. } => HoleShape::Square { side: dim },
            HoleShape::Rectangle { length, .. } => HoleShape::Rectangle { width: dim, length: length.max(dim) },
        };
        Hole::new(shape, self.center)
    }

    /// Half extents of the straight-sided core: for a circle this is the
    /// center point, the disc radius is carried separately.
    fn core(&self) -> (f64, f64, f64) {
        match self.shape {
            HoleShape::Circle { diameter } => (0.0, 0.0, diameter / 2.0),
            HoleShape::Square { side } => (side / 2.0, side / 2.0, 0.0),
            HoleShape::Rectangle { width, length } => (length / 2.0, width / 2.0, 0.0),
        }
    }
}

pub fn hole_area(hole: &Hole) -> f64 {
    match hole.shape {
        HoleShape::Circle { diameter } => PI * diameter * diameter / 4.0,
        HoleShape::Square { side } => side * side,
        HoleShape::Rectangle { width, length } => width * length,
    }
}

/// The dimension that governs clogging.
pub fn hole_min_dimension(hole: &Hole) -> f64 {
    match hole.shape {
        HoleShape::Circle { diameter } => diameter,
        HoleShape::Square { side } => side,
        HoleShape::Rectangle { width, .. } => width,
    }
}

/// Opening-over-depth ratio of a hole in a cap of the given thickness.
pub fn aspect_ratio(hole: &Hole, cap_thickness: f64) -> Result<f64> {
    if !(cap_thickness > 0.0) {
        return Err(Error::Domain("cap thickness must be > 0".into()));
    }
    Ok(hole_min_dimension(hole) / cap_thickness)
}

/// Axis-aligned rectangle, used for cavity footprints and membranes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0) {
            return Err(Error::InvalidInput("rectangle sides must be > 0".into()));
        }
        Ok(Rect { x0, y0, width, height })
    }

    /// Rectangle with its lower-left corner at the origin.
    pub fn from_size(width: f64, height: f64) -> Result<Self> {
        Self::new(0.0, 0.0, width, height)
    }

    pub fn area(&self) -> f64 {
        self.width * self.height
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        p.0 >= self.x0 && p.0 <= self.x0 + self.width && p.1 >= self.y0 && p.1 <= self.y0 + self.height
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Rect { x0: self.x0 + dx, y0: self.y0 + dy, ..*self }
    }
}

/// Film thicknesses and cavity footprint of the package.
#[derive(Debug, Clone, PartialEq)]
pub struct PackageStack {
    /// Sacrificial aSi thickness (m).
    pub sacrificial_thickness: f64,
    /// Structural cap thickness before sealing (m).
    pub cap_thickness: f64,
    /// Sealing deposit thickness (m).
    pub clog_deposition: f64,
    pub footprint: Rect,
}

impl PackageStack {
    pub fn new(sacrificial_thickness: f64, cap_thickness: f64, clog_deposition: f64, footprint: Rect) -> Result<Self> {
        for (name, v) in [
            ("sacrificial thickness", sacrificial_thickness),
            ("cap thickness", cap_thickness),
            ("clog deposition", clog_deposition),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidInput(format!("{name} must be > 0")));
            }
        }
        Ok(PackageStack { sacrificial_thickness, cap_thickness, clog_deposition, footprint })
    }

    /// Every hole center must lie inside the footprint.
    pub fn check_holes(&self, holes: &[Hole]) -> Result<()> {
        match holes.iter().find(|h| !self.footprint.contains(h.center)) {
            Some(h) => Err(Error::InvalidInput(format!(
                "hole centered at ({:.3} um, {:.3} um) lies outside the footprint",
                h.center.0 * 1e6,
                h.center.1 * 1e6
            ))),
            None => Ok(()),
        }
    }
}

/// Default coverage raster pitch: an eighth of the smallest hole dimension.
pub fn default_grid_pitch(holes: &[Hole]) -> f64 {
    holes.iter().map(hole_min_dimension).fold(f64::INFINITY, f64::min) / 8.0
}

/// Fraction of `footprint` covered by the union of each hole dilated
/// outward by its underetch distance (Minkowski sum with a disc).
///
/// The footprint is cut into rows of height at most `grid_pitch`. The
/// covered length along a horizontal line is exact; rows are integrated
/// with Simpson weights over their edges and mid-line, so the result is
/// exactly 1.0 only when every sampled line, footprint edges included, is
/// fully covered.
pub fn release_coverage(footprint: &Rect, holes: &[Hole], underetch: &[f64], grid_pitch: f64) -> Result<f64> {
    if holes.len() != underetch.len() {
        return Err(Error::InvalidInput(format!("{} holes but {} underetch values", holes.len(), underetch.len())));
    }
    if !(grid_pitch > 0.0) {
        return Err(Error::InvalidInput("grid pitch must be > 0".into()));
    }
    if holes.is_empty() {
        return Ok(0.0);
    }
    let rows = (footprint.height / grid_pitch).ceil().max(1.0) as usize;
    let dy = footprint.height / rows as f64;
    let (xa, xb) = (footprint.x0, footprint.x0 + footprint.width);

    let mut intervals: Vec<(f64, f64)> = Vec::with_capacity(holes.len());
    let mut line = |y: f64| -> f64 {
        intervals.clear();
        for (hole, &u) in holes.iter().zip(underetch) {
            if let Some(half) = dilated_half_width(hole, u.max(0.0), y) {
                let lo = (hole.center.0 - half).max(xa);
                let hi = (hole.center.0 + half).min(xb);
                if hi > lo {
                    intervals.push((lo, hi));
                }
            }
        }
        (union_length(&mut intervals) / footprint.width).min(1.0)
    };
    // lines k = 0..=2*rows at half-row spacing; even k are row edges
    let mut weighted = 0.0;
    let mut all_full = true;
    for k in 0..=2 * rows {
        let y = if k == 2 * rows { footprint.y0 + footprint.height } else { footprint.y0 + k as f64 * 0.5 * dy };
        let f = line(y);
        if f < 1.0 {
            all_full = false;
        }
        let w = if k % 2 == 1 {
            4.0
        } else if k == 0 || k == 2 * rows {
            1.0
        } else {
            2.0
        };
        weighted += w * f;
    }
    if all_full {
        return Ok(1.0);
    }
    Ok((weighted / (6.0 * rows as f64)).clamp(0.0, 1.0 - f64::EPSILON))
}

/// Half chord at height `y` of the hole dilated by `u`, if the line hits it.
fn dilated_half_width(hole: &Hole, u: f64, y: f64) -> Option<f64> {
    let (hx, hy, r) = hole.core();
    let radius = r + u;
    let dy = ((y - hole.center.1).abs() - hy).max(0.0);
    if dy > radius {
        return None;
    }
    let half = hx + (radius * radius - dy * dy).sqrt();
    (half > 0.0).then_some(half)
}

fn union_length(intervals: &mut [(f64, f64)]) -> f64 {
    if intervals.is_empty() {
        return 0.0;
    }
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let (mut lo, mut hi) = intervals[0];
    for &(a, b) in &intervals[1..] {
        if a > hi {
            total += hi - lo;
            lo = a;
            hi = b;
        } else if b > hi {
            hi = b;
        }
    }
    total + (hi - lo)
}
