//! Implementations of the subcommands.
//!
//! Each command builds its graph, computes a result, wraps it in a
//! [`Report`](crate::output::Report), and emits JSON or text. The returned
//! integer is the process exit code: 0 for success, 1 when a check suite
//! found a violation. Usage and numeric failures surface as errors and are
//! mapped to exit codes by the caller.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use magschro::diagnostics::{
    self, DegreeBound, HypothesisStatus, TheoremReport,
};
use magschro::verify::{self, CheckResult};
use magschro::{eigen, export, metric, ops};
use magschro::{MagneticGraph, VertexId};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cli::Format;
use crate::config::{GraphChoice, RunConfig, Tolerances};
use crate::output::{atomic_write, emit, Report};

/// Truncation radius used by `check` when none is given.
const DEFAULT_CHECK_RADIUS: u32 = 30;
/// Truncation radius used by `metric --from/--to` when none is given.
const DEFAULT_METRIC_RADIUS: u32 = 60;
/// Largest graph on which `check` runs the all-pairs Lipschitz scan.
const PSI_ALL_PAIRS_LIMIT: usize = 400;

fn resolve_x0(g: &MagneticGraph, x0: Option<&str>) -> Result<VertexId> {
    match x0 {
        Some(name) => Ok(g.resolve(name)?),
        None => Ok(g.root()),
    }
}

/// Realizes the graph and picks the ball radius for matrix-oriented
/// commands. Infinite families require an explicit radius and are generated
/// one layer larger so the ball keeps its outgoing edges; files and finite
/// families default to covering the whole graph.
fn graph_and_ball(
    choice: &GraphChoice,
    x0: Option<&str>,
    radius: Option<u32>,
) -> Result<(MagneticGraph, VertexId, u32)> {
    if let Some(spec) = choice.family().filter(|s| s.is_infinite()) {
        let r = radius.with_context(|| {
            format!("--radius is required with the infinite family `{}`", spec.name())
        })?;
        let g = spec.generate(r + 1)?;
        let x0v = resolve_x0(&g, x0)?;
        let hop = g.bfs_radii(g.root())[x0v.idx()];
        if hop == 0 {
            return Ok((g, x0v, r));
        }
        // Off-center ball: enlarge the truncation so the ball still has its
        // boundary layer.
        let g = spec.generate(r + 1 + hop)?;
        let x0v = resolve_x0(&g, x0)?;
        return Ok((g, x0v, r));
    }
    let g = choice.realize(0)?;
    let x0v = resolve_x0(&g, x0)?;
    let r = match radius {
        Some(r) => r,
        None => g.bfs_radii(x0v).iter().copied().max().unwrap_or(0),
    };
    Ok((g, x0v, r))
}

fn render<T: Serialize>(
    report: &Report<T>,
    format: Format,
    text: impl FnOnce(&Report<T>) -> String,
) -> Result<String> {
    match format {
        Format::Json => report.to_json(),
        Format::Text => Ok(text(report)),
    }
}

// ---------------------------------------------------------------------------
// gen

pub fn cmd_gen(
    choice: &GraphChoice,
    radius: Option<u32>,
    out: &Path,
    _seed: u64,
) -> Result<i32> {
    let spec = choice
        .family()
        .context("gen writes generated families; pass --family, not --graph")?;
    if spec.is_infinite() && radius.is_none() {
        bail!("--radius is required with the infinite family `{}`", spec.name());
    }
    let g = spec.generate(radius.unwrap_or(0))?;
    atomic_write(out, g.to_json_string().as_bytes())?;
    println!(
        "wrote {} ({} vertices, {} edges, hash {})",
        out.display(),
        g.vertex_count(),
        g.edge_count(),
        &g.hash_hex()[..12]
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// check

#[derive(Debug, Serialize)]
pub struct CheckSummary {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

pub fn cmd_check(
    choice: &GraphChoice,
    radius: Option<u32>,
    seed: u64,
    trials: usize,
    tolerances: Tolerances,
    format: Format,
    out: Option<&Path>,
) -> Result<i32> {
    let gen_radius = radius.unwrap_or(DEFAULT_CHECK_RADIUS);
    let g = choice.realize(gen_radius)?;

    let mut checks = verify::run_suite(&g, seed, trials, tolerances.identity)?;
    checks.extend(structural_checks(&g, seed, &tolerances)?);
    let passed = checks.iter().all(|c| c.passed);

    let config = RunConfig {
        command: "check".into(),
        graph: choice.source_ref.clone(),
        x0: None,
        radius: Some(gen_radius),
        max_n: None,
        seed,
        trials: Some(trials),
        tolerances,
    };
    let report = Report::new(g.hash_hex(), config, CheckSummary { passed, checks });
    emit(out, &render(&report, format, check_text)?)?;
    Ok(if passed { 0 } else { 1 })
}

/// Checks that need the graph's geometry rather than random fields: cut-off
/// ramp properties, and the ground-state identity plus energy bound on a
/// harmonic extension over the largest interior ball.
fn structural_checks(
    g: &MagneticGraph,
    seed: u64,
    tolerances: &Tolerances,
) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let x0 = g.root();
    let radii = g.bfs_radii(x0);
    let ecc = radii.iter().copied().max().unwrap_or(0);
    if ecc == 0 {
        return Ok(out); // single vertex: nothing geometric to check
    }

    let n_phi = (ecc + 1) / 2;
    out.push(verify::check_phi_properties(g, x0, n_phi.max(1))?);

    let dists = metric::dist_from(g, x0);
    let dmax = dists.iter().cloned().fold(0.0_f64, f64::max);
    // The annular ramp needs vertices beyond metric distance R + 1, so it
    // only fits on graphs whose metric reach exceeds 1.
    if dmax > 1.0 + 1e-9 {
        let r_psi = (dmax - 1.0) * 0.5;
        out.push(verify::check_psi_properties(g, x0, r_psi)?);
        if g.vertex_count() <= PSI_ALL_PAIRS_LIMIT {
            out.push(verify::check_psi_lipschitz_all_pairs(g, x0, r_psi)?);
        }
    }

    if ecc >= 2 {
        let r = ecc - 1;
        let interior: BTreeSet<VertexId> =
            g.vertices().filter(|x| radii[x.idx()] <= r).collect();
        let mut boundary: BTreeMap<VertexId, Complex64> = BTreeMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        for x in g.vertices() {
            if radii[x.idx()] == r + 1 {
                let re: f64 = rng.gen_range(-1.0..1.0);
                let im: f64 = rng.gen_range(-1.0..1.0);
                // Offset keeps the data away from the trivial all-zero case.
                boundary.insert(x, Complex64::new(re + 0.25, im));
            }
        }
        let ext = verify::harmonic_extension(g, &interior, &boundary)?;
        let sup = ext
            .solution
            .support()
            .map(|x| ext.solution.get(x).norm())
            .fold(0.0_f64, f64::max);
        let rel_residual = ext.residual / sup.max(1.0);
        out.push(CheckResult {
            name: "harmonic_residual".into(),
            passed: rel_residual <= tolerances.harmonic_residual,
            max_violation: rel_residual,
            slack: None,
            location: None,
            tolerance: tolerances.harmonic_residual,
        });

        // supp φ_n ⊆ B_{2n-1} must stay inside the interior ball B_r.
        let n_h = ((r + 1) / 2).max(1);
        let phi = metric::phi_cutoff(g, x0, n_h)?.to_field();
        out.push(verify::check_ground_form_identity(g, &ext, &phi, tolerances.solve)?);
        out.push(verify::check_cutoff_energy_bound(g, &ext, n_h, x0)?);
    }
    Ok(out)
}

fn check_text(report: &Report<CheckSummary>) -> String {
    let mut s = header_text(report);
    for c in &report.result.checks {
        let status = if c.passed { "ok  " } else { "FAIL" };
        let _ = write!(
            s,
            "{status}  {:<28} violation {:9.2e}  tol {:7.1e}",
            c.name, c.max_violation, c.tolerance
        );
        if let Some(slack) = c.slack {
            let _ = write!(s, "  slack {slack:9.2e}");
        }
        if let Some(loc) = &c.location {
            let _ = write!(s, "  at {loc}");
        }
        s.push('\n');
    }
    let _ = writeln!(
        s,
        "overall: {} ({} checks)",
        if report.result.passed { "PASS" } else { "FAIL" },
        report.result.checks.len()
    );
    s
}

// ---------------------------------------------------------------------------
// report

pub fn cmd_report(
    choice: &GraphChoice,
    x0: Option<&str>,
    max_n: u32,
    seed: u64,
    tolerances: Tolerances,
    format: Format,
    out: Option<&Path>,
) -> Result<i32> {
    let source = choice.to_source(max_n + 1)?;
    let result = diagnostics::theorem_report(&source, x0, max_n)?;
    let hash = source.realize(max_n + 1)?.hash_hex();

    let config = RunConfig {
        command: "report".into(),
        graph: choice.source_ref.clone(),
        x0: x0.map(str::to_string),
        radius: None,
        max_n: Some(max_n),
        seed,
        trials: None,
        tolerances,
    };
    let report = Report::new(hash, config, result);
    emit(out, &render(&report, format, report_text)?)?;
    Ok(0)
}

fn describe_degree(d: &DegreeBound) -> String {
    match d {
        DegreeBound::Exact { max_degree } => format!("bounded, max degree {max_degree}"),
        DegreeBound::Unbounded => "unbounded".into(),
        DegreeBound::LowerBound { max_degree, probe_radius } => format!(
            "at least {max_degree} within radius {probe_radius}; global bound unknown"
        ),
    }
}

fn status_tag(s: HypothesisStatus) -> &'static str {
    match s {
        HypothesisStatus::Holds => "holds",
        HypothesisStatus::Fails => "fails",
        HypothesisStatus::Undecidable => "open ",
    }
}

fn report_text(report: &Report<TheoremReport>) -> String {
    let mut s = header_text(report);
    let r = &report.result;
    let _ = writeln!(s, "graph: {}   center: {}   scan depth: {}", r.graph, r.center, r.max_n);
    if let Some(note) = &r.finite_note {
        let _ = writeln!(s, "note: {note}");
    }
    if let Some(last) = r.assumption_a.records.last() {
        let _ = writeln!(
            s,
            "growth: m = {}, a = {:.6}, m·a/n² = {:.6} at n = {}",
            last.m, last.a, last.ratio, last.n
        );
    }
    let _ = writeln!(s, "degree: {}", describe_degree(&r.degree));
    let prof = &r.metric_profile;
    if let Some(row) = prof.rows.last() {
        let _ = writeln!(
            s,
            "metric: min distance {:.6} at hop {}{}",
            row.min_dist,
            row.n,
            if prof.fully_stabilized() { "" } else { " (profile not stabilized)" }
        );
    }
    if let Some(fb) = r.form_bound.records.last() {
        let _ = writeln!(
            s,
            "form bound: lambda_min = {:.6} on the radius-{} ball, c_est = {:.6}",
            fb.lambda_min, fb.n, r.form_bound.c_est
        );
    }
    for t in &r.theorems {
        let _ = writeln!(
            s,
            "criterion {} ({}): {}",
            t.index,
            t.name,
            if t.applicable { "APPLIES" } else { "does not apply" }
        );
        for h in &t.hypotheses {
            let _ = writeln!(s, "  [{}] {} — {}", status_tag(h.status), h.name, h.evidence);
        }
    }
    s
}

// ---------------------------------------------------------------------------
// assemble

#[derive(Debug, Serialize)]
pub struct AssembleSummary {
    pub matrix: String,
    pub sidecar: String,
    pub dim: usize,
    pub symmetrized: bool,
}

pub fn cmd_assemble(
    choice: &GraphChoice,
    x0: Option<&str>,
    radius: Option<u32>,
    symmetrize: bool,
    out: &Path,
    seed: u64,
) -> Result<i32> {
    let (g, x0v, r) = graph_and_ball(choice, x0, radius)?;
    let ball = g.ball(x0v, r);
    let op = ops::assemble(&g, &ball, symmetrize);

    let sidecar_path = PathBuf::from(format!("{}.meta.json", out.display()));
    let config = RunConfig {
        command: "assemble".into(),
        graph: choice.source_ref.clone(),
        x0: Some(g.name(x0v).to_string()),
        radius: Some(r),
        max_n: None,
        seed,
        trials: None,
        tolerances: Tolerances::default(),
    };
    let sidecar = Report::new(g.hash_hex(), config, export::matrix_sidecar(&g, &op));

    atomic_write(out, export::matrix_csv(&g, &op).as_bytes())?;
    atomic_write(&sidecar_path, sidecar.to_json()?.as_bytes())?;
    println!(
        "wrote {}x{} {} matrix to {} (sidecar {})",
        op.dim(),
        op.dim(),
        if symmetrize { "symmetrized" } else { "weighted" },
        out.display(),
        sidecar_path.display()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// spectrum

#[derive(Debug, Serialize)]
pub struct SpectrumSummary {
    pub dim: usize,
    pub k: usize,
    pub values: Vec<f64>,
    pub max_residual: f64,
}

pub fn cmd_spectrum(
    choice: &GraphChoice,
    x0: Option<&str>,
    radius: Option<u32>,
    k: usize,
    seed: u64,
    tolerances: Tolerances,
    format: Format,
    out: Option<&Path>,
) -> Result<i32> {
    let (g, x0v, r) = graph_and_ball(choice, x0, radius)?;
    let ball = g.ball(x0v, r);
    let op = ops::assemble(&g, &ball, true);
    let spectrum = eigen::smallest_eigenpairs(&op, k)?;

    let scale = spectrum.values.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if spectrum.max_residual > tolerances.eigen_residual * scale {
        return Err(magschro::Error::EigenConvergence {
            achieved: spectrum.max_residual,
            wanted: tolerances.eigen_residual * scale,
        }
        .into());
    }

    let config = RunConfig {
        command: "spectrum".into(),
        graph: choice.source_ref.clone(),
        x0: Some(g.name(x0v).to_string()),
        radius: Some(r),
        max_n: None,
        seed,
        trials: None,
        tolerances,
    };
    let summary = SpectrumSummary {
        dim: op.dim(),
        k: spectrum.values.len(),
        values: spectrum.values,
        max_residual: spectrum.max_residual,
    };
    let report = Report::new(g.hash_hex(), config, summary);
    emit(out, &render(&report, format, |r| export::eigenvalues_csv(&r.result.values))?)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// metric

#[derive(Debug, Serialize)]
pub struct DistanceSummary {
    pub from: String,
    pub to: String,
    pub distance: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_metric(
    choice: &GraphChoice,
    x0: Option<&str>,
    from: Option<&str>,
    to: Option<&str>,
    profile: bool,
    radius: Option<u32>,
    max_n: u32,
    margin: u32,
    seed: u64,
    tolerances: Tolerances,
    format: Format,
    out: Option<&Path>,
) -> Result<i32> {
    match (from, to, profile) {
        (Some(a), Some(b), false) => {
            let g = match choice.family().filter(|s| s.is_infinite()) {
                Some(spec) => spec.generate(radius.unwrap_or(DEFAULT_METRIC_RADIUS))?,
                None => choice.realize(0)?,
            };
            let av = g.resolve(a)?;
            let bv = g.resolve(b)?;
            let d = metric::dist(&g, av, bv);
            let config = RunConfig {
                command: "metric".into(),
                graph: choice.source_ref.clone(),
                x0: None,
                radius: choice
                    .family()
                    .filter(|s| s.is_infinite())
                    .map(|_| radius.unwrap_or(DEFAULT_METRIC_RADIUS)),
                max_n: None,
                seed,
                trials: None,
                tolerances,
            };
            let summary =
                DistanceSummary { from: a.to_string(), to: b.to_string(), distance: d };
            let report = Report::new(g.hash_hex(), config, summary);
            emit(out, &render(&report, format, |r| format!("{:.12}\n", r.result.distance))?)?;
            Ok(0)
        }
        (None, None, true) => {
            let (g, prof) = match choice.family() {
                Some(spec) if spec.is_infinite() => {
                    let prof = metric::completeness_profile(spec, max_n, margin)?;
                    (spec.generate(max_n + margin + 1)?, prof)
                }
                Some(spec) => {
                    let g = spec.generate(max_n)?;
                    let x0v = resolve_x0(&g, x0)?;
                    let prof = metric::profile_graph(&g, x0v, max_n, spec.name(), 0);
                    (g, prof)
                }
                None => {
                    let g = choice.realize(0)?;
                    let x0v = resolve_x0(&g, x0)?;
                    let prof = metric::profile_graph(&g, x0v, max_n, "loaded", 0);
                    (g, prof)
                }
            };
            let config = RunConfig {
                command: "metric".into(),
                graph: choice.source_ref.clone(),
                x0: x0.map(str::to_string),
                radius: None,
                max_n: Some(max_n),
                seed,
                trials: None,
                tolerances,
            };
            let report = Report::new(g.hash_hex(), config, prof);
            emit(out, &render(&report, format, |r| export::profile_csv(&r.result))?)?;
            Ok(0)
        }
        _ => bail!(
            "metric needs either --from A --to B for a distance, or --profile for a \
             completeness profile"
        ),
    }
}

// ---------------------------------------------------------------------------

fn header_text<T: Serialize>(report: &Report<T>) -> String {
    format!(
        "{} {}  graph {}  seed {}\n",
        report.tool,
        report.version,
        &report.graph_hash[..12],
        report.config.seed
    )
}
