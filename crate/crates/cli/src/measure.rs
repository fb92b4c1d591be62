//! Spectral measure declarations, as TOML tables or inline strings such as
//! `box:a=pi/2` or `atom:alpha=1,weight=0.3+poisson:r=0.5`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use trigzero::{Atom, DensitySpec, SpectralMeasure};

use crate::error::{CliError, Result};
use crate::expr;

/// A number, or an expression string evaluated by [`expr::eval`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Number(f64),
    Text(String),
}

impl Param {
    pub fn value(&self, field: &str) -> Result<f64> {
        match self {
            Param::Number(v) => Ok(*v),
            Param::Text(s) => expr::eval(s).map_err(|e| CliError::config(field, e)),
        }
    }
}

impl From<f64> for Param {
    fn from(v: f64) -> Self {
        Param::Number(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDecl {
    pub alpha: Param,
    #[serde(default = "unit")]
    pub weight: Param,
}

fn unit() -> Param {
    Param::Number(1.0)
}

/// `kind` plus the kind's parameters. `weight` is the total mass of the
/// density part (default: whatever the atoms leave); tabulated shapes are
/// rescaled to that mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityDecl {
    pub kind: String,
    #[serde(flatten)]
    pub params: BTreeMap<String, Param>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDecl {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<AtomDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityDecl>,
}

const DENSITY_KINDS: [&str; 8] = [
    "uniform",
    "independent",
    "box",
    "annulus",
    "poisson",
    "constant_corr",
    "raised_cosine_squared",
    "tabulated",
];

fn allowed_params(kind: &str) -> &'static [&'static str] {
    match kind {
        "box" => &["a", "weight"],
        "annulus" => &["a", "b", "weight"],
        "poisson" | "constant_corr" => &["r", "weight"],
        "tabulated" => &["path", "weight"],
        _ => &["weight"],
    }
}

impl DensityDecl {
    fn param(&self, name: &str) -> Result<f64> {
        let field = format!("measure.density.{name}");
        self.params
            .get(name)
            .ok_or_else(|| CliError::config(&field, format!("required by kind '{}'", self.kind)))?
            .value(&field)
    }

    fn shape(&self, base_dir: &Path) -> Result<DensitySpec> {
        if !DENSITY_KINDS.contains(&self.kind.as_str()) {
            return Err(CliError::config(
                "measure.density.kind",
                format!(
                    "unknown kind '{}' (expected one of {})",
                    self.kind,
                    DENSITY_KINDS.join(", ")
                ),
            ));
        }
        let allowed = allowed_params(&self.kind);
        if let Some(extra) = self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(CliError::config(
                format!("measure.density.{extra}"),
                format!("not a parameter of kind '{}'", self.kind),
            ));
        }
        let spec = match self.kind.as_str() {
            "uniform" | "independent" => Ok(DensitySpec::uniform()),
            "box" => DensitySpec::box_density(self.param("a")?),
            "annulus" => DensitySpec::annulus(self.param("b")?, self.param("a")?),
            "poisson" => DensitySpec::poisson(self.param("r")?),
            "constant_corr" => DensitySpec::constant_corr(self.param("r")?),
            "raised_cosine_squared" => Ok(DensitySpec::raised_cosine_squared()),
            "tabulated" => {
                let path = match self.params.get("path") {
                    Some(Param::Text(p)) => base_dir.join(p),
                    _ => return Err(CliError::config("measure.density.path", "a file path is required")),
                };
                return load_tabulated(&path);
            }
            _ => unreachable!("kind checked above"),
        };
        spec.map_err(|e| prefix(e, "measure"))
    }
}

/// Prefixes the field of a core measure error with the config location.
fn prefix(e: trigzero::Error, location: &str) -> CliError {
    match e {
        trigzero::Error::InvalidMeasure { field, reason } if field == "measure" => CliError::config(location, reason),
        trigzero::Error::InvalidMeasure { field, reason } => CliError::config(format!("{location}.{field}"), reason),
        other => CliError::Core(other),
    }
}

/// Reads an `x,psi` CSV tabulating the density shape on `[0, π]`.
pub fn load_tabulated(path: &Path) -> Result<DensitySpec> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::parse(path, e))?;
    let headers = reader.headers().map_err(|e| CliError::parse(path, e))?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "psi" {
        return Err(CliError::parse(path, "expected header 'x,psi'"));
    }
    let (mut grid, mut values) = (Vec::new(), Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::parse(path, e))?;
        let parse = |i: usize| -> Result<f64> {
            record[i]
                .trim()
                .parse()
                .map_err(|_| CliError::parse(path, format!("row {}: bad number '{}'", line + 2, &record[i])))
        };
        grid.push(parse(0)?);
        values.push(parse(1)?);
    }
    DensitySpec::tabulated(grid, values).map_err(|e| prefix(e, "measure"))
}

impl MeasureDecl {
    pub fn build(&self, base_dir: &Path) -> Result<SpectralMeasure> {
        let mut atoms = Vec::with_capacity(self.atoms.len());
        for (i, a) in self.atoms.iter().enumerate() {
            let alpha = a.alpha.value(&format!("measure.atoms[{i}].alpha"))?;
            let weight = a.weight.value(&format!("measure.atoms[{i}].weight"))?;
            let atom = Atom::new(alpha, weight).map_err(|e| match e {
                trigzero::Error::InvalidMeasure { field, reason } => {
                    let leaf = field.rsplit('.').next().unwrap_or("atom").to_string();
                    CliError::config(format!("measure.atoms[{i}].{leaf}"), reason)
                }
                other => CliError::Core(other),
            })?;
            atoms.push(atom);
        }
        let atom_mass: f64 = atoms.iter().map(|a| a.weight).sum();
        let density = match &self.density {
            None => None,
            Some(decl) => {
                let shape = decl.shape(base_dir)?;
                let share = match decl.params.get("weight") {
                    Some(w) => w.value("measure.density.weight")?,
                    None => 1.0 - atom_mass,
                };
                if !(share > 0.0) {
                    return Err(CliError::config(
                        "measure.density.weight",
                        format!("density mass {share} must be positive (atoms carry {atom_mass})"),
                    ));
                }
                // the natural split of constant_corr between its atom and
                // its density scales with the share
                let implied = shape.implied_atoms();
                let shape_mass = shape.mass() + implied.iter().map(|a| a.weight).sum::<f64>();
                for a in implied {
                    atoms.push(Atom::new(a.alpha, a.weight * share / shape_mass).map_err(|e| prefix(e, "measure"))?);
                }
                let weight = share * shape.weight() / shape_mass;
                Some(shape.with_weight(weight).map_err(|e| prefix(e, "measure"))?)
            }
        };
        SpectralMeasure::new(atoms, density).map_err(|e| prefix(e, "measure").with_hint())
    }

    /// Parses the inline syntax: `+`-separated components, each
    /// `kind[:key=value,...]`; `atom` and `atomic` declare atoms.
    pub fn parse_inline(text: &str) -> Result<Self> {
        let mut components: Vec<String> = Vec::new();
        for piece in text.split('+') {
            let head = piece.trim().split(':').next().unwrap_or("").trim();
            let starts_component = head == "atom" || head == "atomic" || DENSITY_KINDS.contains(&head);
            match components.last_mut() {
                Some(last) if !starts_component => {
                    last.push('+');
                    last.push_str(piece);
                }
                _ => components.push(piece.trim().to_string()),
            }
        }
        let mut decl = MeasureDecl {
            atoms: Vec::new(),
            density: None,
        };
        for component in components {
            let (kind, rest) = component.split_once(':').unwrap_or((component.as_str(), ""));
            let kind = kind.trim();
            let mut params = BTreeMap::new();
            for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| CliError::config("measure", format!("expected key=value, found '{pair}'")))?;
                params.insert(k.trim().to_string(), Param::Text(v.trim().to_string()));
            }
            match kind {
                "atom" | "atomic" => {
                    let alpha = params
                        .remove("alpha")
                        .ok_or_else(|| CliError::config("measure.atoms.alpha", "required"))?;
                    let weight = params.remove("weight").unwrap_or_else(unit);
                    if let Some(extra) = params.keys().next() {
                        return Err(CliError::config(format!("measure.atoms.{extra}"), "unknown parameter"));
                    }
                    decl.atoms.push(AtomDecl { alpha, weight });
                }
                _ => {
                    if decl.density.is_some() {
                        return Err(CliError::config("measure.density", "at most one density component"));
                    }
                    decl.density = Some(DensityDecl {
                        kind: kind.to_string(),
                        params,
                    });
                }
            }
        }
        Ok(decl)
    }
}

impl CliError {
    fn with_hint(self) -> Self {
        match self {
            CliError::Config { field, reason } if reason.starts_with("total mass") => CliError::Config {
                field,
                reason: format!("{reason}; atom weights and the density weight must add up to 1"),
            },
            other => other,
        }
    }
}

/// Resolves a relative path against the directory of the declaring file.
pub fn resolve(base_dir: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base_dir.join(path)
    }
}
