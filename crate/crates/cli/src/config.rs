//! Run configuration: the full set of inputs that determine a command's
//! output.
//!
//! Every report embeds its `RunConfig` verbatim, so a result can be traced
//! back to the exact invocation that produced it. Two runs with equal
//! configs write byte-identical JSON.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use magschro::{FamilySpec, GraphSource, MagneticGraph, RandomParams};
use serde::Serialize;

/// Numerical tolerances in effect for a run.
///
/// Defaults mirror the library constants. Each field is functional: the
/// check suite compares identities against `identity`, solve-derived
/// identities against `solve`, the interior residual of harmonic extensions
/// against `harmonic_residual`, and reported eigenpairs against
/// `eigen_residual`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub identity: f64,
    pub solve: f64,
    pub harmonic_residual: f64,
    pub eigen_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: magschro::verify::IDENTITY_TOLERANCE,
            solve: magschro::verify::SOLVE_TOLERANCE,
            harmonic_residual: magschro::verify::HARMONIC_RESIDUAL_TOLERANCE,
            eigen_residual: magschro::eigen::EIGEN_RESIDUAL_TOLERANCE,
        }
    }
}

impl Tolerances {
    /// Applies `--tol NAME=VALUE` overrides. Overridden values are recorded
    /// in the run config like the defaults they replace.
    pub fn apply_overrides(&mut self, pairs: &[String]) -> Result<()> {
        for pair in pairs {
            let (name, value) = pair
                .split_once('=')
                .with_context(|| format!("expected NAME=VALUE, got `{pair}`"))?;
            let value: f64 = value
                .parse()
                .with_context(|| format!("tolerance `{name}` needs a float, got `{value}`"))?;
            if !(value > 0.0 && value.is_finite()) {
                bail!("tolerance `{name}` must be positive and finite, got {value}");
            }
            match name {
                "identity" => self.identity = value,
                "solve" => self.solve = value,
                "harmonic_residual" => self.harmonic_residual = value,
                "eigen_residual" => self.eigen_residual = value,
                other => bail!(
                    "unknown tolerance `{other}`; valid names: identity, solve, \
                     harmonic_residual, eigen_residual"
                ),
            }
        }
        Ok(())
    }
}

/// Where the graph came from, as recorded in reports.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphRef {
    File { path: String },
    Family { name: String, params: BTreeMap<String, String> },
}

/// A resolved graph input: either a file to load or a family to generate.
#[derive(Debug, Clone)]
pub struct GraphChoice {
    pub source_ref: GraphRef,
    kind: ChoiceKind,
}

#[derive(Debug, Clone)]
enum ChoiceKind {
    File(PathBuf),
    Family(FamilySpec),
}

impl GraphChoice {
    /// Builds the choice from the `--graph` / `--family` / `--params` flags.
    /// `seed` feeds the random family's generator.
    pub fn from_flags(
        graph: Option<&Path>,
        family: Option<&str>,
        params: &[String],
        seed: u64,
    ) -> Result<GraphChoice> {
        match (graph, family) {
            (Some(_), Some(_)) => bail!("pass either --graph or --family, not both"),
            (None, None) => bail!("a graph is required: pass --graph PATH or --family NAME"),
            (Some(path), None) => {
                if !params.is_empty() {
                    bail!("--params only applies to --family");
                }
                Ok(GraphChoice {
                    source_ref: GraphRef::File { path: path.display().to_string() },
                    kind: ChoiceKind::File(path.to_path_buf()),
                })
            }
            (None, Some(name)) => {
                let parsed = parse_params(params)?;
                let (spec, echo) = family_spec(name, &parsed, seed)?;
                Ok(GraphChoice {
                    source_ref: GraphRef::Family { name: name.to_string(), params: echo },
                    kind: ChoiceKind::Family(spec),
                })
            }
        }
    }

    pub fn family(&self) -> Option<&FamilySpec> {
        match &self.kind {
            ChoiceKind::Family(spec) => Some(spec),
            ChoiceKind::File(_) => None,
        }
    }

    /// Loads or generates the graph. `radius` is the truncation radius for
    /// infinite families and is ignored by files and finite families.
    pub fn realize(&self, radius: u32) -> Result<MagneticGraph> {
        match &self.kind {
            ChoiceKind::File(path) => MagneticGraph::load(path)
                .with_context(|| format!("loading graph from {}", path.display())),
            ChoiceKind::Family(spec) => spec
                .generate(radius)
                .with_context(|| format!("generating family `{}`", spec.name())),
        }
    }

    /// The same input as a [`GraphSource`], which keeps infinite families
    /// symbolic so diagnostics can reason about them beyond any truncation.
    pub fn to_source(&self, radius: u32) -> Result<GraphSource> {
        match &self.kind {
            ChoiceKind::File(_) => Ok(GraphSource::Loaded(self.realize(radius)?)),
            ChoiceKind::Family(spec) => Ok(GraphSource::Family(spec.clone())),
        }
    }
}

fn parse_params(params: &[String]) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for p in params {
        let (k, v) = p
            .split_once('=')
            .with_context(|| format!("expected KEY=VALUE in --params, got `{p}`"))?;
        if out.insert(k.to_string(), v.to_string()).is_some() {
            bail!("duplicate parameter `{k}`");
        }
    }
    Ok(out)
}

/// Accepts plain floats plus the convenience forms `pi`, `-pi`, `pi/N`,
/// and `-pi/N`.
fn parse_flux(s: &str) -> Result<f64> {
    let (sign, rest) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s),
    };
    if rest == "pi" {
        return Ok(sign * std::f64::consts::PI);
    }
    if let Some(den) = rest.strip_prefix("pi/") {
        let den: f64 = den
            .parse()
            .with_context(|| format!("bad flux denominator in `{s}`"))?;
        if den == 0.0 {
            bail!("flux denominator must be nonzero");
        }
        return Ok(sign * std::f64::consts::PI / den);
    }
    s.parse::<f64>()
        .with_context(|| format!("flux must be a float or pi[/N], got `{s}`"))
}

fn family_spec(
    name: &str,
    params: &BTreeMap<String, String>,
    seed: u64,
) -> Result<(FamilySpec, BTreeMap<String, String>)> {
    let reject_unknown = |allowed: &[&str]| -> Result<()> {
        for k in params.keys() {
            if !allowed.contains(&k.as_str()) {
                bail!(
                    "family `{name}` does not take parameter `{k}` (allowed: {})",
                    if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") }
                );
            }
        }
        Ok(())
    };
    match name {
        "halfline" => {
            reject_unknown(&[])?;
            Ok((FamilySpec::Halfline, BTreeMap::new()))
        }
        "triangular" => {
            reject_unknown(&[])?;
            Ok((FamilySpec::Triangular, BTreeMap::new()))
        }
        "cycle" => {
            reject_unknown(&["n", "flux"])?;
            let n: usize = params
                .get("n")
                .context("family `cycle` needs n=SIZE in --params")?
                .parse()
                .context("cycle parameter n must be a positive integer")?;
            let flux = match params.get("flux") {
                Some(s) => parse_flux(s)?,
                None => 0.0,
            };
            let mut echo = BTreeMap::new();
            echo.insert("flux".to_string(), format!("{flux}"));
            echo.insert("n".to_string(), format!("{n}"));
            Ok((FamilySpec::Cycle { n, flux }, echo))
        }
        "random" => {
            reject_unknown(&["n", "p"])?;
            let mut rp = RandomParams { seed, ..RandomParams::default() };
            if let Some(n) = params.get("n") {
                rp.n = n.parse().context("random parameter n must be a positive integer")?;
            }
            if let Some(p) = params.get("p") {
                rp.p = p.parse().context("random parameter p must be a float")?;
            }
            let mut echo = BTreeMap::new();
            echo.insert("n".to_string(), format!("{}", rp.n));
            echo.insert("p".to_string(), format!("{}", rp.p));
            Ok((FamilySpec::Random(rp), echo))
        }
        other => bail!("unknown family `{other}`; valid: halfline, triangular, cycle, random"),
    }
}

/// Everything that determines a command's output, embedded in each report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub graph: GraphRef,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_n: Option<u32>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    pub tolerances: Tolerances,
}
