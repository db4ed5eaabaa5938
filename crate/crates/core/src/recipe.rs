//! Process recipe files.
//!
//! A recipe is line oriented: `[section]` headers followed by
//! `key = value` entries, `#` comments. Every dimensioned quantity carries a
//! unit suffix (`1.5um`, `2min`, `100bar`, `5e-7mbar`, `1nm/min`); plain
//! numbers are dimensionless.
//!
//! ```text
//! [materials]
//! sacrificial = asi
//! structural = sio2
//! sealing = sio2
//! sio2.youngs_modulus = 70GPa
//!
//! [stack]
//! sacrificial_thickness = 5um
//! cap_thickness = 2um
//! clog_deposition = 2.5um
//! footprint_width = 30um
//! footprint_height = 30um
//!
//! [holes]
//! grid = circle diameter=1.5um x=2.5um y=2.5um nx=6 ny=6 pitch=5um
//!
//! [release]
//! report_time = 2min
//!
//! [clogging]
//! chamber_pressure = 5e-7mbar
//!
//! [molding]
//! pressure = 100bar
//! max_deflection = 25nm
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::calibrate::{calibrate_etch, parse_observations, read_observations, BUILTIN_UNDERETCH_DATA};
use crate::clogging::ClogParams;
use crate::designer::DesignConstraints;
use crate::error::{Error, Result};
use crate::etch::{EtchParams, ReleaseOptions, DEFAULT_MAX_RELEASE_TIME};
use crate::geometry::{Hole, HoleShape, PackageStack, Rect};
use crate::material::Material;
use crate::units::{parse_unit, split_quantity, Dimension, MBAR, MIN, UM};

const SECTIONS: [&str; 6] = ["materials", "stack", "holes", "release", "clogging", "molding"];

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Debug, Clone, PartialEq)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

/// Syntax tree of a recipe: sections and raw entries, before any
/// interpretation. Sweeps edit this and re-resolve.
#[derive(Debug, Clone, PartialEq)]
pub struct RecipeDoc {
    sections: Vec<Section>,
    base_dir: Option<PathBuf>,
}

impl RecipeDoc {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: Vec<Section> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::parse(line, "unterminated section header"))?
                    .trim()
                    .to_string();
                if !SECTIONS.contains(&name.as_str()) {
                    return Err(Error::parse(line, format!("unknown section [{name}]")));
                }
                if let Some(prev) = sections.iter().find(|s| s.name == name) {
                    return Err(Error::parse(
                        line,
                        format!(
                            "duplicate section [{name}] (first defined on line {}, again on line {line})",
                            prev.line
                        ),
                    ));
                }
                sections.push(Section { name, line, entries: Vec::new() });
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::parse(line, format!("expected 'key = value', found '{content}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(Error::parse(line, "empty key or value"));
            }
            let section = sections.last_mut().ok_or_else(|| Error::parse(line, "entry outside of any section"))?;
            if let Some(prev) = section.entries.iter().find(|e| e.key == key) {
                return Err(Error::parse(
                    line,
                    format!("duplicate key '{key}' in [{}] (first on line {})", section.name, prev.line),
                ));
            }
            section.entries.push(Entry { key: key.to_string(), value: value.to_string(), line });
        }
        Ok(RecipeDoc { sections, base_dir: None })
    }

    /// Directory that relative paths in the recipe resolve against.
    pub fn with_base_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.base_dir = Some(dir.into());
        self
    }

    fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    /// Replace the numeric field addressed by `path` with `value` (unit
    /// suffix included). Paths are `section.key`, `holes.<name>.<param>`
    /// (`*` matches every hole) or `materials.<material>.<property>`.
    /// Returns the dimension of the field.
    pub fn set(&mut self, path: &str, value: &str) -> Result<Dimension> {
        let parts: Vec<&str> = path.split('.').collect();
        let bad_path = || Error::InvalidInput(format!("'{path}' does not address a numeric recipe field"));
        match parts.as_slice() {
            ["holes", name, param] => {
                let section = self.sections.iter_mut().find(|s| s.name == "holes").ok_or_else(bad_path)?;
                let mut hit = false;
                for e in section.entries.iter_mut().filter(|e| *name == "*" || e.key == *name) {
                    let mut tokens: Vec<String> = e.value.split_whitespace().map(String::from).collect();
                    let prefix = format!("{param}=");
                    let tok = tokens.iter_mut().skip(1).find(|t| t.starts_with(&prefix));
                    let Some(tok) = tok else { continue };
                    let old = &tok[prefix.len()..];
                    split_quantity(old).ok_or_else(bad_path)?;
                    *tok = format!("{prefix}{value}");
                    e.value = tokens.join(" ");
                    hit = true;
                }
                if !hit {
                    return Err(bad_path());
                }
                Ok(hole_param_dimension(param).ok_or_else(bad_path)?)
            }
            ["materials", mat, prop] => {
                let dim = material_property_dimension(prop).ok_or_else(bad_path)?;
                let key = format!("{mat}.{prop}");
                let (line, section) = match self.sections.iter().position(|s| s.name == "materials") {
                    Some(p) => (0, &mut self.sections[p]),
                    None => {
                        self.sections.push(Section { name: "materials".into(), line: 0, entries: Vec::new() });
                        (0, self.sections.last_mut().expect("just pushed"))
                    }
                };
                match section.entries.iter_mut().find(|e| e.key == key) {
                    Some(e) => e.value = value.to_string(),
                    None => section.entries.push(Entry { key, value: value.to_string(), line }),
                }
                Ok(dim)
            }
            [section_name, key] => {
                let dim = field_dimension(section_name, key).ok_or_else(bad_path)?;
                let section = match self.sections.iter().position(|s| s.name == *section_name) {
                    Some(p) => &mut self.sections[p],
                    None => {
                        self.sections.push(Section { name: section_name.to_string(), line: 0, entries: Vec::new() });
                        self.sections.last_mut().expect("just pushed")
                    }
                };
                match section.entries.iter_mut().find(|e| e.key == *key) {
                    Some(e) => e.value = value.to_string(),
                    None => section.entries.push(Entry { key: key.to_string(), value: value.to_string(), line: 0 }),
                }
                Ok(dim)
            }
            _ => Err(bad_path()),
        }
    }
}

/// Dimension of a plain `section.key` numeric field.
fn field_dimension(section: &str, key: &str) -> Option<Dimension> {
    use Dimension::*;
    let d = match (section, key) {
        ("stack", "sacrificial_thickness" | "cap_thickness" | "clog_deposition") => Length,
        ("stack", "footprint_width" | "footprint_height" | "footprint_x0" | "footprint_y0") => Length,
        ("release", "intrinsic_rate") => Velocity,
        ("release", "aperture_constant") => Area,
        ("release", "path_constant") => Dimensionless,
        ("release", "reference_thickness" | "grid_pitch") => Length,
        ("release", "report_time" | "max_time") => Time,
        ("clogging", "closure_per_side" | "narrow_closure_per_side" | "reference_sticking" | "ar_knee") => {
            Dimensionless
        }
        ("clogging", "residue_fraction" | "residue_spread") => Dimensionless,
        ("clogging", "max_deposition") => Length,
        ("clogging", "chamber_pressure") => Pressure,
        ("molding", "pressure") => Pressure,
        ("molding", "membrane_width" | "membrane_height" | "max_deflection" | "t_min" | "t_max") => Length,
        ("molding", "safety_factor" | "grid") => Dimensionless,
        _ => return None,
    };
    Some(d)
}

fn hole_param_dimension(param: &str) -> Option<Dimension> {
    match param {
        "diameter" | "side" | "width" | "length" | "x" | "y" | "pitch" | "pitch_x" | "pitch_y" => {
            Some(Dimension::Length)
        }
        "nx" | "ny" => Some(Dimension::Dimensionless),
        _ => None,
    }
}

fn material_property_dimension(prop: &str) -> Option<Dimension> {
    match prop {
        "intrinsic_etch_rate" | "selectivity_loss" => Some(Dimension::Velocity),
        "sticking_coefficient" | "poisson_ratio" => Some(Dimension::Dimensionless),
        "youngs_modulus" | "failure_stress" => Some(Dimension::Pressure),
        _ => None,
    }
}

/// Parse `text` as a quantity of the given dimension, returning SI.
fn quantity(text: &str, dim: Dimension, line: usize) -> Result<f64> {
    let (value, suffix) =
        split_quantity(text).ok_or_else(|| Error::parse(line, format!("expected a number, found '{text}'")))?;
    let (unit_dim, scale) = parse_unit(suffix).ok_or_else(|| Error::parse(line, format!("unknown unit '{suffix}'")))?;
    if unit_dim != dim {
        if unit_dim == Dimension::Dimensionless {
            return Err(Error::parse(line, format!("'{text}' needs a unit (expected {})", dim.display_unit())));
        }
        return Err(Error::parse(line, format!("dimension mismatch: '{text}' is {unit_dim:?}, expected {dim:?}")));
    }
    if !value.is_finite() {
        return Err(Error::parse(line, format!("'{text}' is not finite")));
    }
    Ok(value * scale)
}

/// Parse a quantity such as `1.5um` as the given dimension, returning SI.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64> {
    quantity(text, dim, 0)
}

fn count(text: &str, line: usize) -> Result<usize> {
    text.trim().parse::<usize>().map_err(|_| Error::parse(line, format!("expected a whole number, found '{text}'")))
}

/// A named hole or a regular array of identical holes.
#[derive(Debug, Clone, PartialEq)]
pub struct HoleGroup {
    pub name: String,
    /// First hole of the array.
    pub hole: Hole,
    pub nx: usize,
    pub ny: usize,
    pub pitch_x: f64,
    pub pitch_y: f64,
}

impl HoleGroup {
    pub fn count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn expand(&self) -> Vec<Hole> {
        let (x0, y0) = self.hole.center;
        let mut out = Vec::with_capacity(self.count());
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.push(self.hole.at((x0 + i as f64 * self.pitch_x, y0 + j as f64 * self.pitch_y)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReleaseSettings {
    /// Time at which per-hole underetch is reported (s).
    pub report_time: f64,
    pub options: ReleaseOptions,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoldingSettings {
    /// Uniform molding pressure (Pa); zero disables the load.
    pub pressure: f64,
    pub membrane_width: f64,
    pub membrane_height: f64,
    pub max_deflection: f64,
    pub safety_factor: f64,
    pub grid_n: usize,
    pub t_min: f64,
    pub t_max: f64,
}

impl MoldingSettings {
    pub fn constraints(&self) -> DesignConstraints {
        DesignConstraints {
            max_deflection: self.max_deflection,
            safety_factor: self.safety_factor,
            pressure: self.pressure,
            side_a: self.membrane_width,
            side_b: self.membrane_height,
            t_min: self.t_min,
            t_max: self.t_max,
            grid_n: self.grid_n,
        }
    }
}

/// A fully resolved process recipe.
#[derive(Debug, Clone, PartialEq)]
pub struct Recipe {
    pub materials: BTreeMap<String, Material>,
    pub sacrificial: String,
    pub structural: String,
    pub sealing: String,
    pub stack: PackageStack,
    pub holes: Vec<HoleGroup>,
    pub etch: EtchParams,
    pub release: ReleaseSettings,
    pub clog: ClogParams,
    /// Ambient during the sealing deposition (Pa).
    pub chamber_pressure: f64,
    pub molding: MoldingSettings,
    doc: RecipeDoc,
}

/// Parse and resolve a recipe; relative paths resolve against the working
/// directory.
pub fn parse_recipe(text: &str) -> Result<Recipe> {
    Recipe::from_doc(RecipeDoc::parse(text)?)
}

/// Read a recipe file; relative paths inside it resolve against its folder.
pub fn read_recipe(path: &Path) -> Result<Recipe> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let mut doc = RecipeDoc::parse(&text)?;
    if let Some(dir) = path.parent() {
        doc = doc.with_base_dir(dir);
    }
    Recipe::from_doc(doc)
}

struct Fields<'a> {
    section: Option<&'a Section>,
    name: &'static str,
}

impl<'a> Fields<'a> {
    fn new(doc: &'a RecipeDoc, name: &'static str) -> Self {
        Fields { section: doc.section(name), name }
    }

    fn entries(&self) -> impl Iterator<Item = &'a Entry> {
        self.section.into_iter().flat_map(|s| s.entries.iter())
    }

    fn get(&self, key: &str) -> Option<&'a Entry> {
        self.entries().find(|e| e.key == key)
    }

    fn quantity(&self, key: &str, default: Option<f64>) -> Result<f64> {
        let dim = field_dimension(self.name, key).expect("known field");
        match (self.get(key), default) {
            (Some(e), _) => quantity(&e.value, dim, e.line),
            (None, Some(d)) => Ok(d),
            (None, None) => {
                let line = self.section.map_or(0, |s| s.line);
                Err(Error::parse(line, format!("missing required key '{key}' in [{}]", self.name)))
            }
        }
    }

    fn reject_unknown(&self, allowed: &dyn Fn(&str) -> bool) -> Result<()> {
        match self.entries().find(|e| !allowed(&e.key)) {
            Some(e) => Err(Error::parse(e.line, format!("unknown key '{}' in [{}]", e.key, self.name))),
            None => Ok(()),
        }
    }
}

impl Recipe {
    pub fn from_doc(doc: RecipeDoc) -> Result<Self> {
        let (materials, sacrificial, structural, sealing) = resolve_materials(&doc)?;

        let stack_fields = Fields::new(&doc, "stack");
        if stack_fields.section.is_none() {
            return Err(Error::parse(0, "missing [stack] section"));
        }
        stack_fields.reject_unknown(&|k| field_dimension("stack", k).is_some())?;
        let footprint = Rect::new(
            stack_fields.quantity("footprint_x0", Some(0.0))?,
            stack_fields.quantity("footprint_y0", Some(0.0))?,
            stack_fields.quantity("footprint_width", None)?,
            stack_fields.quantity("footprint_height", None)?,
        )
        .map_err(|e| Error::parse(stack_fields.section.map_or(0, |s| s.line), e.to_string()))?;
        let stack = PackageStack::new(
            stack_fields.quantity("sacrificial_thickness", None)?,
            stack_fields.quantity("cap_thickness", None)?,
            stack_fields.quantity("clog_deposition", None)?,
            footprint,
        )
        .map_err(|e| Error::parse(stack_fields.section.map_or(0, |s| s.line), e.to_string()))?;

        let holes = resolve_holes(&doc)?;
        let all: Vec<Hole> = holes.iter().flat_map(HoleGroup::expand).collect();
        stack.check_holes(&all)?;

        let rel = Fields::new(&doc, "release");
        rel.reject_unknown(&|k| k == "calibrate_from" || field_dimension("release", k).is_some())?;
        let sacrificial_material = &materials[&sacrificial];
        let mut etch = EtchParams::for_material(sacrificial_material);
        if let Some(e) = rel.get("calibrate_from") {
            let obs = if e.value == "builtin" {
                parse_observations(BUILTIN_UNDERETCH_DATA)?
            } else {
                let p = Path::new(&e.value);
                let path = match &doc.base_dir {
                    Some(dir) if p.is_relative() => dir.join(p),
                    _ => p.to_path_buf(),
                };
                read_observations(&path).map_err(|err| Error::parse(e.line, err.to_string()))?
            };
            etch = calibrate_etch(&obs)?.params;
        }
        etch.intrinsic_rate = rel.quantity("intrinsic_rate", Some(etch.intrinsic_rate))?;
        etch.aperture_constant = rel.quantity("aperture_constant", Some(etch.aperture_constant))?;
        etch.path_constant = rel.quantity("path_constant", Some(etch.path_constant))?;
        etch.reference_thickness = rel.quantity("reference_thickness", Some(etch.reference_thickness))?;
        etch.validate().map_err(|e| Error::parse(rel.section.map_or(0, |s| s.line), e.to_string()))?;
        let grid_pitch = match rel.get("grid_pitch") {
            Some(_) => Some(rel.quantity("grid_pitch", None)?),
            None => None,
        };
        let release = ReleaseSettings {
            report_time: rel.quantity("report_time", Some(2.0 * MIN))?,
            options: ReleaseOptions { max_time: rel.quantity("max_time", Some(DEFAULT_MAX_RELEASE_TIME))?, grid_pitch },
        };

        let cl = Fields::new(&doc, "clogging");
        cl.reject_unknown(&|k| field_dimension("clogging", k).is_some())?;
        let d = ClogParams::default();
        let clog = ClogParams {
            kappa0: cl.quantity("closure_per_side", Some(d.kappa0))?,
            kappa_narrow: cl.quantity("narrow_closure_per_side", Some(d.kappa_narrow))?,
            s_ref: cl.quantity("reference_sticking", Some(d.s_ref))?,
            ar_knee: cl.quantity("ar_knee", Some(d.ar_knee))?,
            residue_fraction_scale: cl.quantity("residue_fraction", Some(d.residue_fraction_scale))?,
            residue_spread: cl.quantity("residue_spread", Some(d.residue_spread))?,
            max_deposition: cl.quantity("max_deposition", Some(d.max_deposition))?,
        };
        clog.validate().map_err(|e| Error::parse(cl.section.map_or(0, |s| s.line), e.to_string()))?;
        let chamber_pressure = cl.quantity("chamber_pressure", Some(5e-7 * MBAR))?;

        let mo = Fields::new(&doc, "molding");
        mo.reject_unknown(&|k| field_dimension("molding", k).is_some())?;
        let grid_n = match mo.get("grid") {
            Some(e) => count(&e.value, e.line)?,
            None => 128,
        };
        let max_deflection = match mo.get("max_deflection") {
            Some(e) if e.value == "none" => f64::INFINITY,
            _ => mo.quantity("max_deflection", Some(f64::INFINITY))?,
        };
        let molding = MoldingSettings {
            pressure: mo.quantity("pressure", Some(100.0 * crate::units::BAR))?,
            membrane_width: mo.quantity("membrane_width", Some(stack.footprint.width))?,
            membrane_height: mo.quantity("membrane_height", Some(stack.footprint.height))?,
            max_deflection,
            safety_factor: mo.quantity("safety_factor", Some(1.0))?,
            grid_n,
            t_min: mo.quantity("t_min", Some(0.5 * UM))?,
            t_max: mo.quantity("t_max", Some(20.0 * UM))?,
        };
        let mline = mo.section.map_or(0, |s| s.line);
        if !(molding.pressure >= 0.0) || !(molding.membrane_width > 0.0) || !(molding.membrane_height > 0.0) {
            return Err(Error::parse(mline, "molding pressure must be >= 0 and membrane sides > 0"));
        }
        if !(molding.max_deflection > 0.0) || !(molding.safety_factor >= 1.0) || grid_n < crate::mechanics::MIN_GRID {
            return Err(Error::parse(mline, "need max_deflection > 0, safety_factor >= 1 and grid >= 16"));
        }
        if !(molding.t_min > 0.0 && molding.t_min < molding.t_max) {
            return Err(Error::parse(mline, "need 0 < t_min < t_max"));
        }

        Ok(Recipe {
            materials,
            sacrificial,
            structural,
            sealing,
            stack,
            holes,
            etch,
            release,
            clog,
            chamber_pressure,
            molding,
            doc,
        })
    }

    pub fn doc(&self) -> &RecipeDoc {
        &self.doc
    }

    /// Copy of this recipe with one numeric field replaced.
    pub fn with_value(&self, path: &str, value: &str) -> Result<Recipe> {
        let mut doc = self.doc.clone();
        doc.set(path, value)?;
        Recipe::from_doc(doc)
    }

    pub fn material(&self, name: &str) -> &Material {
        &self.materials[name]
    }

    pub fn all_holes(&self) -> Vec<Hole> {
        self.holes.iter().flat_map(HoleGroup::expand).collect()
    }
}

type ResolvedMaterials = (BTreeMap<String, Material>, String, String, String);

fn resolve_materials(doc: &RecipeDoc) -> Result<ResolvedMaterials> {
    let mut materials: BTreeMap<String, Material> = Material::LIBRARY_NAMES
        .iter()
        .map(|n| (n.to_string(), Material::library(n).expect("library material")))
        .collect();
    let mut roles: BTreeMap<&str, (String, usize)> = BTreeMap::new();
    let fields = Fields::new(doc, "materials");

    // declarations first so overrides may follow in any order
    for e in fields.entries() {
        if let Some((mat, "like")) = e.key.split_once('.') {
            let base = materials
                .get(&e.value)
                .cloned()
                .ok_or_else(|| Error::parse(e.line, format!("unknown material '{}'", e.value)))?;
            materials.insert(mat.to_string(), Material { name: mat.to_string(), ..base });
        }
    }
    for e in fields.entries() {
        match e.key.split_once('.') {
            Some((_, "like")) => {}
            Some((mat, prop)) => {
                let dim = material_property_dimension(prop)
                    .ok_or_else(|| Error::parse(e.line, format!("unknown material property '{prop}'")))?;
                let v = quantity(&e.value, dim, e.line)?;
                let m = materials.get_mut(mat).ok_or_else(|| {
                    Error::parse(e.line, format!("material '{mat}' is not defined (declare it with {mat}.like = ...)"))
                })?;
                match prop {
                    "intrinsic_etch_rate" => m.intrinsic_etch_rate = v,
                    "selectivity_loss" => m.selectivity_loss = v,
                    "sticking_coefficient" => m.sticking_coefficient = v,
                    "poisson_ratio" => m.poisson_ratio = v,
                    "youngs_modulus" => m.youngs_modulus = v,
                    "failure_stress" => m.failure_stress = v,
                    _ => unreachable!("checked above"),
                }
            }
            None => match e.key.as_str() {
                role @ ("sacrificial" | "structural" | "sealing") => {
                    roles.insert(role, (e.value.clone(), e.line));
                }
                other => return Err(Error::parse(e.line, format!("unknown key '{other}' in [materials]"))),
            },
        }
    }
    let mut pick = |role: &str, default: &str| -> Result<String> {
        let (name, line) = roles.remove(role).unwrap_or((default.to_string(), 0));
        let m = materials
            .get(&name)
            .ok_or_else(|| Error::parse(line, format!("{role} material '{name}' is not defined")))?;
        m.validate().map_err(|e| Error::parse(line, e.to_string()))?;
        Ok(name)
    };
    let sacrificial = pick("sacrificial", "asi")?;
    let structural = pick("structural", "sio2")?;
    let sealing = pick("sealing", "sio2")?;
    if !(materials[&sacrificial].intrinsic_etch_rate > 0.0) {
        return Err(Error::parse(0, format!("sacrificial material '{sacrificial}' does not etch")));
    }
    Ok((materials, sacrificial, structural, sealing))
}

fn resolve_holes(doc: &RecipeDoc) -> Result<Vec<HoleGroup>> {
    let section = doc.section("holes").ok_or_else(|| Error::parse(0, "missing [holes] section"))?;
    if section.entries.is_empty() {
        return Err(Error::parse(section.line, "[holes] declares no holes"));
    }
    section.entries.iter().map(resolve_hole_group).collect()
}

fn resolve_hole_group(e: &Entry) -> Result<HoleGroup> {
    let mut tokens = e.value.split_whitespace();
    let shape = tokens.next().unwrap_or_default();
    let mut params: BTreeMap<&str, &str> = BTreeMap::new();
    for tok in tokens {
        let (k, v) =
            tok.split_once('=').ok_or_else(|| Error::parse(e.line, format!("expected name=value, found '{tok}'")))?;
        if hole_param_dimension(k).is_none() {
            return Err(Error::parse(e.line, format!("unknown hole parameter '{k}'")));
        }
        if params.insert(k, v).is_some() {
            return Err(Error::parse(e.line, format!("hole parameter '{k}' given twice")));
        }
    }
    let mut take = |k: &str| -> Result<Option<f64>> {
        match params.remove(k) {
            Some(v) => Ok(Some(quantity(v, Dimension::Length, e.line)?)),
            None => Ok(None),
        }
    };
    let need = |v: Option<f64>, k: &str| v.ok_or_else(|| Error::parse(e.line, format!("hole '{}' needs {k}=", e.key)));
    let hole_shape = match shape {
        "circle" => HoleShape::Circle { diameter: need(take("diameter")?, "diameter")? },
        "square" => HoleShape::Square { side: need(take("side")?, "side")? },
        "rectangle" => {
            let (a, b) = (need(take("width")?, "width")?, need(take("length")?, "length")?);
            HoleShape::Rectangle { width: a.min(b), length: a.max(b) }
        }
        other => return Err(Error::parse(e.line, format!("unknown hole shape '{other}'"))),
    };
    let x = need(take("x")?, "x")?;
    let y = need(take("y")?, "y")?;
    let pitch = take("pitch")?;
    let pitch_x = take("pitch_x")?.or(pitch);
    let pitch_y = take("pitch_y")?.or(pitch);
    let nx = params.remove("nx").map(|v| count(v, e.line)).transpose()?.unwrap_or(1);
    let ny = params.remove("ny").map(|v| count(v, e.line)).transpose()?.unwrap_or(1);
    if let Some(k) = params.keys().next() {
        return Err(Error::parse(e.line, format!("parameter '{k}' does not apply to a {shape}")));
    }
    if nx == 0 || ny == 0 {
        return Err(Error::parse(e.line, "nx and ny must be >= 1"));
    }
    let pitch_x = if nx > 1 { need(pitch_x, "pitch")? } else { pitch_x.unwrap_or(0.0) };
    let pitch_y = if ny > 1 { need(pitch_y, "pitch")? } else { pitch_y.unwrap_or(0.0) };
    let hole = Hole::new(hole_shape, (x, y)).map_err(|err| Error::parse(e.line, err.to_string()))?;
    Ok(HoleGroup { name: e.key.clone(), hole, nx, ny, pitch_x, pitch_y })
}
