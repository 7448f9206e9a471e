//! Surface-spec files (TOML, `format_version = 1`).
//!
//! A spec gives either an explicit list of functions or a `[family]`
//! shorthand, plus optional `[sampling]`, `[tolerances]` and `[mesh]`
//! tables. Coordinate indices in files are 1-based.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use sepcurv::families::{Expected, FamilySpec};
use sepcurv::funcalc::{Domain, Function1D};
use sepcurv::geometry::SamplingBox;
use sepcurv::{SeparableSurface, Tolerances};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub format_version: u32,
    pub n: Option<usize>,
    /// 1-based; defaults to `n`.
    pub height: Option<usize>,
    #[serde(default)]
    pub functions: Vec<FunctionEntry>,
    pub family: Option<FamilySpec>,
    pub sampling: Option<SamplingSection>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    pub mesh: Option<MeshSection>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionEntry {
    pub expr: String,
    #[serde(default = "real_line")]
    pub domain: Domain,
    /// Root bracket for the height coordinate; only meaningful on the height function.
    pub bracket: Option<[f64; 2]>,
}

fn real_line() -> Domain {
    Domain::REAL_LINE
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingSection {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    /// One `[lo, hi]` per non-height coordinate.
    pub ranges: Option<Vec<[f64; 2]>>,
    pub bracket: Option<[f64; 2]>,
    #[serde(default = "yes")]
    pub coordinate_pairs: bool,
    #[serde(default)]
    pub oblique_planes: usize,
    /// Curvature to test the constant-curvature residual against.
    pub target_k: Option<f64>,
}

fn default_count() -> usize {
    100
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub on_surface: Option<f64>,
    pub regularity: Option<f64>,
    pub orthogonality: Option<f64>,
    pub independence: Option<f64>,
    pub equivalence: Option<f64>,
    pub constancy: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSection {
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    pub ranges: Option<Vec<[f64; 2]>>,
}

fn default_resolution() -> usize {
    32
}

/// A validated spec with its surface built.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub path: PathBuf,
    /// Hex SHA-256 of the file bytes.
    pub digest: String,
    pub label: String,
    pub surface: SeparableSurface,
    pub expected: Option<Expected>,
    pub bracket: Option<(f64, f64)>,
    pub ranges: Option<Vec<(f64, f64)>>,
    pub sampling: Option<SamplingSection>,
    pub tolerances: ToleranceOverrides,
    pub mesh: Option<MeshSection>,
}

pub fn digest_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn pairs(v: &[[f64; 2]]) -> Vec<(f64, f64)> {
    v.iter().map(|&[a, b]| (a, b)).collect()
}

impl LoadedSpec {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let bytes = std::fs::read(path).map_err(|source| CliError::ReadInput {
            path: path.to_path_buf(),
            source,
        })?;
        let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::Spec {
            path: path.to_path_buf(),
            message: "not valid UTF-8".into(),
        })?;
        let mut spec = Self::parse(&text, path)?;
        spec.digest = digest_hex(&bytes);
        Ok(spec)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let bad = |message: String| CliError::Spec {
            path: path.to_path_buf(),
            message,
        };
        let file: SpecFile =
            toml::from_str(text).map_err(|e| bad(e.to_string().trim_end().to_string()))?;
        if file.format_version != FORMAT_VERSION {
            return Err(bad(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                file.format_version
            )));
        }
        let (label, surface, expected, default_box) =
            match (&file.family, file.functions.is_empty()) {
                (Some(_), false) => {
                    return Err(bad("give either `functions` or `family`, not both".into()))
                }
                (None, true) => return Err(bad("missing `functions` or `family`".into())),
                (Some(fam), true) => {
                    let built = fam.build().map_err(|e| bad(e.to_string()))?;
                    let n = built.surface.dim();
                    if file.n.is_some_and(|m| m != n) {
                        return Err(bad(format!(
                            "n = {} disagrees with the family's n = {n}",
                            file.n.unwrap()
                        )));
                    }
                    if file.height.is_some_and(|h| h != n) {
                        return Err(bad(
                            "family surfaces use the last coordinate as height".into()
                        ));
                    }
                    (
                        built.label,
                        built.surface,
                        Some(built.expected),
                        Some(built.sampling),
                    )
                }
                (None, false) => {
                    let n = file
                        .n
                        .ok_or_else(|| bad("`n` is required with `functions`".into()))?;
                    if n != file.functions.len() {
                        return Err(bad(format!(
                            "n = {n} but {} functions are listed",
                            file.functions.len()
                        )));
                    }
                    let height = file.height.unwrap_or(n);
                    if height == 0 || height > n {
                        return Err(bad(format!("height {height} is not in 1..={n}")));
                    }
                    let funcs = file
                        .functions
                        .iter()
                        .enumerate()
                        .map(|(k, f)| {
                            Function1D::parse(&f.expr, f.domain)
                                .map_err(|e| bad(format!("function {}: `{}`: {e}", k + 1, f.expr)))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    for (k, f) in file.functions.iter().enumerate() {
                        if f.bracket.is_some() && k + 1 != height {
                            return Err(bad(format!(
                                "function {} has a bracket but is not the height",
                                k + 1
                            )));
                        }
                    }
                    let label = funcs
                        .iter()
                        .map(|f| f.to_string())
                        .collect::<Vec<_>>()
                        .join(" + ");
                    let surface =
                        SeparableSurface::new(funcs, height - 1).map_err(|e| bad(e.to_string()))?;
                    (label, surface, None, None)
                }
            };

        let n = surface.dim();
        let sampling = file.sampling.clone();
        let height_bracket = file.functions.get(surface.height()).and_then(|f| f.bracket);
        let bracket = sampling
            .as_ref()
            .and_then(|s| s.bracket)
            .or(height_bracket)
            .map(|[a, b]| (a, b))
            .or(default_box.as_ref().map(|b| b.bracket));
        if let Some((lo, hi)) = bracket {
            if !(lo < hi) {
                return Err(bad(format!("bracket [{lo}, {hi}] is empty")));
            }
        }
        let ranges = sampling
            .as_ref()
            .and_then(|s| s.ranges.as_deref().map(pairs))
            .or(default_box.map(|b| b.ranges));
        if let Some(r) = &ranges {
            if r.len() != n - 1 {
                return Err(bad(format!(
                    "{} sampling ranges given, {} expected",
                    r.len(),
                    n - 1
                )));
            }
        }
        if let Some(s) = &sampling {
            if s.target_k.is_some_and(|k| !k.is_finite()) {
                return Err(bad("target_k must be finite".into()));
            }
        }
        if let Some(m) = &file.mesh {
            if m.ranges.as_ref().is_some_and(|r| r.len() != 2) {
                return Err(bad("mesh ranges need exactly two intervals".into()));
            }
        }
        Ok(LoadedSpec {
            path: path.to_path_buf(),
            digest: digest_hex(text.as_bytes()),
            label,
            surface,
            expected,
            bracket,
            ranges,
            sampling,
            tolerances: file.tolerances,
            mesh: file.mesh,
        })
    }

    fn bad(&self, message: impl Into<String>) -> CliError {
        CliError::Spec {
            path: self.path.clone(),
            message: message.into(),
        }
    }

    pub fn require_bracket(&self) -> Result<(f64, f64), CliError> {
        self.bracket.ok_or_else(|| {
            self.bad("no height bracket: set `bracket` on the height function or in [sampling]")
        })
    }

    pub fn require_sampling(&self) -> Result<&SamplingSection, CliError> {
        self.sampling
            .as_ref()
            .ok_or_else(|| self.bad("a [sampling] table is required"))
    }

    pub fn sampling_box(&self) -> Result<SamplingBox, CliError> {
        let ranges = self
            .ranges
            .clone()
            .ok_or_else(|| self.bad("no sampling ranges given"))?;
        Ok(SamplingBox {
            ranges,
            bracket: self.require_bracket()?,
        })
    }

    /// Grid ranges for mesh export: `[mesh].ranges`, else the sampling ranges.
    pub fn mesh_ranges(&self) -> Result<[(f64, f64); 2], CliError> {
        let r = match self.mesh.as_ref().and_then(|m| m.ranges.as_deref()) {
            Some(r) => pairs(r),
            None => self
                .ranges
                .clone()
                .ok_or_else(|| self.bad("no mesh or sampling ranges given"))?,
        };
        match r.as_slice() {
            [a, b] => Ok([*a, *b]),
            _ => Err(self.bad(format!("mesh needs two ranges, found {}", r.len()))),
        }
    }

    /// Applies file overrides on top of `base`, then checks every value.
    pub fn tolerances(&self, base: Tolerances<f64>) -> Result<Tolerances<f64>, CliError> {
        let o = &self.tolerances;
        let t = Tolerances {
            on_surface: o.on_surface.unwrap_or(base.on_surface),
            regularity: o.regularity.unwrap_or(base.regularity),
            orthogonality: o.orthogonality.unwrap_or(base.orthogonality),
            independence: o.independence.unwrap_or(base.independence),
            equivalence: o.equivalence.unwrap_or(base.equivalence),
            constancy: o.constancy.unwrap_or(base.constancy),
        };
        check_tolerances(&t).map_err(|m| self.bad(m))?;
        Ok(t)
    }
}

pub fn check_tolerances(t: &Tolerances<f64>) -> Result<(), String> {
    for (name, v) in [
        ("on_surface", t.on_surface),
        ("regularity", t.regularity),
        ("orthogonality", t.orthogonality),
        ("independence", t.independence),
        ("equivalence", t.equivalence),
        ("constancy", t.constancy),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(format!(
                "tolerance `{name}` must be positive and finite, got {v}"
            ));
        }
    }
    Ok(())
}
