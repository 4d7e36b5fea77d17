//! Growth sequences, degree bounds, spectral lower bounds, and the
//! applicability report for the three self-adjointness criteria.
//!
//! The report never over-claims: statements that need the whole infinite
//! family (degree bounds, growth limits, metric completeness) are answered
//! exactly only where a closed form exists; everything measured on a finite
//! truncation is labeled as such, and limits of stored graphs are reported
//! as fitted trends, never verdicts.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::eigen::{self, Spectrum};
use crate::error::{Error, Result};
use crate::exact::ExactScalar;
use crate::family::{ExactAttributes, FamilySpec, GraphSource};
use crate::graph::{Ball, MagneticGraph, VertexId};
use crate::metric::{self, MetricProfile};
use crate::ops;

/// Extra hops beyond the profiled depth when a report computes a metric
/// profile on an infinite family.
const PROFILE_MARGIN: u32 = 8;

/// Degree and conductance-ratio maxima over a combinatorial ball: the
/// largest vertex degree (counted in the whole stored graph, edges leaving
/// the ball included) and the largest `a(e)/w(x)` over ball vertices `x` and
/// all their incident edges.
pub fn ball_growth(g: &MagneticGraph, ball: &Ball) -> (u64, f64) {
    let mut m = 0u64;
    let mut a = 0.0f64;
    for &x in &ball.vertices {
        m = m.max(g.degree(x) as u64);
        let w = g.w(x);
        for h in g.incident(x) {
            a = a.max(g.a(h.edge) / w);
        }
    }
    (m, a)
}

// ---------------------------------------------------------------------------
// Growth sequence
// ---------------------------------------------------------------------------

/// One entry of the growth sequence at hop radius `n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssumptionARecord {
    pub n: u32,
    /// Max degree over the ball `B_n`, counted in the full graph.
    pub m: u64,
    /// Max degree counting only edges inside `B_n`; recorded when it
    /// disagrees with `m` (the two readings differ on the ball's rim).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_in_ball: Option<u64>,
    /// Max of `a(e)/w(x)` over `x ∈ B_n` and all incident edges.
    pub a: f64,
    /// `m · a / n²`.
    pub ratio: f64,
    /// Exact value of `a` for families with closed-form attributes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a_exact: Option<ExactScalar>,
    /// Exact value of the ratio for families with closed-form attributes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_exact: Option<ExactScalar>,
}

/// Least-squares power law fitted to a ratio sequence tail.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PowerLawTrend {
    /// Exponent `p` in `ratio ≈ c · n^p`.
    pub exponent: f64,
    pub prefactor: f64,
}

/// The growth sequence `n ↦ (m_n, a_n, m_n·a_n/n²)` around a center.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssumptionASequence {
    pub center: String,
    pub records: Vec<AssumptionARecord>,
}

impl AssumptionASequence {
    pub fn final_ratio(&self) -> Option<f64> {
        self.records.last().map(|r| r.ratio)
    }

    /// Fits `ln ratio = ln c + p·ln n` over the second half of the records;
    /// `None` with fewer than three usable points.  A trend is descriptive
    /// only — no finite sample decides a limit.
    pub fn fitted_trend(&self) -> Option<PowerLawTrend> {
        let tail = &self.records[self.records.len() / 2..];
        let pts: Vec<(f64, f64)> = tail
            .iter()
            .filter(|r| r.ratio > 0.0)
            .map(|r| ((r.n as f64).ln(), r.ratio.ln()))
            .collect();
        if pts.len() < 3 {
            return None;
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() < 1e-30 {
            return None;
        }
        let exponent = (n * sxy - sx * sy) / denom;
        let prefactor = ((sy - exponent * sx) / n).exp();
        Some(PowerLawTrend { exponent, prefactor })
    }
}

/// Exact `max_e a(e) / w(x)` at one vertex; `None` for an isolated vertex.
fn vertex_ratio_exact(
    g: &MagneticGraph,
    attrs: &ExactAttributes,
    x: VertexId,
) -> Option<ExactScalar> {
    let mut best: Option<ExactScalar> = None;
    for h in g.incident(x) {
        let cand = attrs.a[h.edge.idx()];
        best = Some(match best {
            None => cand,
            // Equality first: on families with constant conductance this is
            // the hot path over millions of half-edges.
            Some(b) if cand == b => b,
            Some(b) => match cand.compare(&b) {
                Ordering::Greater => cand,
                _ => b,
            },
        });
    }
    Some(best?.div(attrs.w[x.idx()]))
}

/// Shared sphere-by-sphere scan behind the `assumption_a` entry points.
fn growth_scan(
    g: &MagneticGraph,
    x0: VertexId,
    max_n: u32,
    exact: Option<&ExactAttributes>,
) -> Result<AssumptionASequence> {
    if max_n == 0 {
        return Err(Error::InvalidParams("growth sequence needs max_n >= 1".into()));
    }
    if let Some(r) = g.truncation_radius() {
        if max_n + 1 > r {
            return Err(Error::TruncationTooSmall(format!(
                "degrees on the hop-{max_n} ball need truncation radius {}, graph is cut at {r}",
                max_n + 1
            )));
        }
    }
    let radii = g.bfs_radii(x0);
    let reach = radii.iter().copied().max().unwrap_or(0) as usize;
    let mut spheres: Vec<Vec<VertexId>> = vec![Vec::new(); reach + 1];
    for x in g.vertices() {
        spheres[radii[x.idx()] as usize].push(x);
    }

    let mut m_run: u64 = 0;
    let mut a_run: f64 = 0.0;
    let mut a_run_exact = exact.map(|_| ExactScalar::zero());
    let mut records = Vec::with_capacity(max_n as usize);

    for n in 0..=max_n {
        let sphere: &[VertexId] = spheres
            .get(n as usize)
            .map(|v| v.as_slice())
            .unwrap_or(&[]);
        // Degrees restricted to B_n can only lag on the outermost sphere:
        // anything deeper already has its whole neighborhood inside.
        let m_prev = m_run;
        let mut rim_in_ball: u64 = 0;
        for &x in sphere {
            let inside = g
                .incident(x)
                .iter()
                .filter(|h| radii[h.neighbor.idx()] <= n)
                .count() as u64;
            rim_in_ball = rim_in_ball.max(inside);
        }
        for &x in sphere {
            m_run = m_run.max(g.degree(x) as u64);
            let mut best_a = 0.0f64;
            for h in g.incident(x) {
                best_a = best_a.max(g.a(h.edge));
            }
            if best_a > 0.0 {
                a_run = a_run.max(best_a / g.w(x));
            }
            if let (Some(run), Some(attrs)) = (a_run_exact.as_mut(), exact) {
                if let Some(cand) = vertex_ratio_exact(g, attrs, x) {
                    if cand.compare(run) == Ordering::Greater {
                        *run = cand;
                    }
                }
            }
        }
        if n == 0 {
            continue;
        }
        let m_in_ball = m_prev.max(rim_in_ball);
        let ratio = m_run as f64 * a_run / ((n as f64) * (n as f64));
        let (a_exact, ratio_exact) = match a_run_exact {
            Some(a_ex) => {
                let r = ExactScalar::integer(m_run as i128)
                    .mul(a_ex)
                    .div(ExactScalar::integer(n as i128 * n as i128));
                (Some(a_ex), Some(r))
            }
            None => (None, None),
        };
        records.push(AssumptionARecord {
            n,
            m: m_run,
            m_in_ball: (m_in_ball != m_run).then_some(m_in_ball),
            a: a_run,
            ratio,
            a_exact,
            ratio_exact,
        });
    }
    Ok(AssumptionASequence { center: g.name(x0).to_string(), records })
}

/// Growth sequence of a family around its root, with exact values where the
/// family has closed-form attributes.  The family is realized one hop beyond
/// `max_n` so every ball vertex keeps its true degree.
pub fn assumption_a(family: &FamilySpec, max_n: u32) -> Result<AssumptionASequence> {
    let g = family.generate(max_n + 1)?;
    let exact = family.exact_attributes(&g);
    growth_scan(&g, g.root(), max_n, exact.as_ref())
}

/// Growth sequence on a stored graph around `x0` (floating point only).
/// A graph marked as a radius-`r` truncation must satisfy `max_n + 1 ≤ r`;
/// an unmarked graph is taken as the complete object.
pub fn assumption_a_on_graph(
    g: &MagneticGraph,
    x0: VertexId,
    max_n: u32,
) -> Result<AssumptionASequence> {
    growth_scan(g, x0, max_n, None)
}

/// Closed-form limit of the growth ratio for the built-in infinite families:
/// the halfline's `2(n+1)²/n²` tends to 2, the triangular family's
/// `2(n+1)^{3/2}/n²` tends to 0.
pub fn closed_form_ratio_limit(family: &FamilySpec) -> Option<f64> {
    match family {
        FamilySpec::Halfline => Some(2.0),
        FamilySpec::Triangular => Some(0.0),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// Degree bound
// ---------------------------------------------------------------------------

/// The maximum vertex degree, qualified by how much of the graph it covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegreeBound {
    /// Known exactly for the whole (possibly infinite) graph.
    Exact { max_degree: u64 },
    /// Degrees grow without bound.
    Unbounded,
    /// Largest degree within a finite probe; the full graph may exceed it.
    LowerBound { max_degree: u64, probe_radius: u32 },
}

/// Degree bound for a graph source.  The halfline and cycles have degree 2
/// by construction; the triangular family's row-`k` degree `2k` is
/// unbounded.  A stored complete graph answers exactly; a stored truncation
/// of something larger only certifies a lower bound.
pub fn bounded_degree(source: &GraphSource, probe_radius: u32) -> Result<DegreeBound> {
    match source {
        GraphSource::Family(FamilySpec::Halfline) | GraphSource::Family(FamilySpec::Cycle { .. }) => {
            Ok(DegreeBound::Exact { max_degree: 2 })
        }
        GraphSource::Family(FamilySpec::Triangular) => Ok(DegreeBound::Unbounded),
        GraphSource::Family(spec @ FamilySpec::Random(_)) => {
            let g = spec.generate(probe_radius)?;
            Ok(DegreeBound::Exact { max_degree: g.max_degree() as u64 })
        }
        GraphSource::Loaded(g) => Ok(match g.truncation_radius() {
            None => DegreeBound::Exact { max_degree: g.max_degree() as u64 },
            Some(r) => DegreeBound::LowerBound {
                max_degree: g.max_degree() as u64,
                probe_radius: r.min(probe_radius),
            },
        }),
    }
}

// ---------------------------------------------------------------------------
// Form lower bound
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormBoundRecord {
    pub n: u32,
    pub ball_size: usize,
    pub lambda_min: f64,
}

/// Rayleigh lower bounds on nested ball truncations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormBoundEstimate {
    pub records: Vec<FormBoundRecord>,
    /// `max(0, -lambda_min)` at the deepest ball: the smallest constant that
    /// semibounds the form on functions supported in the profiled balls.  A
    /// globally valid constant can be no smaller.
    pub c_est: f64,
}

/// `lambda_min(n)`: smallest eigenvalue of the symmetrized operator on
/// `B_n(x0)`, over strictly ascending `radii`.  Balls are nested, so the
/// sequence is nonincreasing (up to solver residual).
pub fn form_bound(g: &MagneticGraph, x0: VertexId, radii: &[u32]) -> Result<FormBoundEstimate> {
    if radii.is_empty() {
        return Err(Error::InvalidParams("form_bound needs at least one radius".into()));
    }
    if !radii.windows(2).all(|p| p[0] < p[1]) {
        return Err(Error::InvalidParams(
            "form_bound radii must be strictly ascending".into(),
        ));
    }
    let mut records = Vec::with_capacity(radii.len());
    for &n in radii {
        let ball = g.ball(x0, n);
        let op = ops::assemble(g, &ball, true);
        let spectrum = eigen::smallest_eigenpairs(&op, 1)?;
        records.push(FormBoundRecord {
            n,
            ball_size: ball.len(),
            lambda_min: spectrum.values[0],
        });
    }
    let c_est = records.last().map(|r| (-r.lambda_min).max(0.0)).unwrap();
    Ok(FormBoundEstimate { records, c_est })
}

/// The `k` smallest eigenvalues of the symmetrized truncation on `ball`,
/// ascending and residual-verified.
pub fn spectrum(g: &MagneticGraph, ball: &Ball, k: usize) -> Result<Spectrum> {
    let op = ops::assemble(g, ball, true);
    eigen::smallest_eigenpairs(&op, k)
}

// ---------------------------------------------------------------------------
// Theorem applicability report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisStatus {
    Holds,
    Fails,
    /// Not decidable from the finite data at hand.
    Undecidable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub status: HypothesisStatus,
    pub evidence: String,
}

/// One of the three self-adjointness criteria with its hypothesis checklist.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoremVerdict {
    pub index: u8,
    pub name: String,
    pub hypotheses: Vec<Hypothesis>,
    /// True only when every hypothesis holds.
    pub applicable: bool,
}

/// Full diagnostic report for one graph source.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoremReport {
    pub graph: String,
    pub center: String,
    pub max_n: u32,
    pub finite: bool,
    /// Present for finite graphs: the criteria target infinite graphs, and
    /// the finite case is closed for free.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite_note: Option<String>,
    pub assumption_a: AssumptionASequence,
    pub form_bound: FormBoundEstimate,
    pub metric_profile: MetricProfile,
    pub degree: DegreeBound,
    pub theorems: Vec<TheoremVerdict>,
}

fn hypothesis(name: &str, status: HypothesisStatus, evidence: String) -> Hypothesis {
    Hypothesis { name: name.to_string(), status, evidence }
}

fn verdict(index: u8, name: &str, hypotheses: Vec<Hypothesis>) -> TheoremVerdict {
    let applicable = hypotheses
        .iter()
        .all(|h| h.status == HypothesisStatus::Holds);
    TheoremVerdict { index, name: name.to_string(), hypotheses, applicable }
}

/// Builds the applicability report around `x0` (the root when `None`).
///
/// `max_n` controls the depth of the growth sequence, the form-bound radii,
/// and the metric profile; it must be at least 4 so the nested-ball spectra
/// have room to nest.
pub fn theorem_report(
    source: &GraphSource,
    x0: Option<&str>,
    max_n: u32,
) -> Result<TheoremReport> {
    if max_n < 4 {
        return Err(Error::InvalidParams("theorem report needs max_n >= 4".into()));
    }
    let g = source.realize(max_n + 1)?;
    let x0 = match x0 {
        Some(name) => g
            .lookup(name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))?,
        None => g.root(),
    };
    let family = source.family();
    let exact = family.and_then(|f| f.exact_attributes(&g));
    let assumption = growth_scan(&g, x0, max_n, exact.as_ref())?;

    let mut radii: Vec<u32> = vec![max_n / 4, max_n / 2, (3 * max_n) / 4, max_n];
    for r in &mut radii {
        *r = (*r).max(1);
    }
    radii.dedup();
    let form = form_bound(&g, x0, &radii)?;

    let metric_profile = match family {
        Some(spec) if spec.is_infinite() => {
            metric::completeness_profile(spec, max_n, PROFILE_MARGIN)?
        }
        Some(spec) => metric::completeness_profile(spec, max_n, 0)?,
        None => metric::profile_graph(&g, x0, max_n, "loaded", 0),
    };

    let degree = bounded_degree(source, max_n + 1)?;
    let finite = source.is_finite();

    // -- standing setting: infinite, locally finite, connected --------------
    let standing = if finite {
        hypothesis(
            "infinite_locally_finite_connected",
            HypothesisStatus::Fails,
            format!(
                "the graph is finite ({} vertices); the criteria address infinite graphs",
                g.vertex_count()
            ),
        )
    } else {
        hypothesis(
            "infinite_locally_finite_connected",
            HypothesisStatus::Holds,
            format!(
                "the {} family is infinite, locally finite, and connected by construction",
                family.map(|f| f.name()).unwrap_or("loaded")
            ),
        )
    };

    // -- criterion 1: constant vertex weight + potential bounded below ------
    let weight_hyp = match family {
        Some(FamilySpec::Halfline) => hypothesis(
            "constant_vertex_weight",
            HypothesisStatus::Fails,
            "w(j) = 1/(j+1) varies with j".to_string(),
        ),
        Some(FamilySpec::Triangular) => hypothesis(
            "constant_vertex_weight",
            HypothesisStatus::Fails,
            "w = 1/sqrt(row) varies across rows".to_string(),
        ),
        _ => {
            let w0 = g.w(g.root());
            match g.vertices().find(|&x| g.w(x) != w0) {
                None => hypothesis(
                    "constant_vertex_weight",
                    HypothesisStatus::Holds,
                    format!("w ≡ {w0} across all {} vertices", g.vertex_count()),
                ),
                Some(x) => hypothesis(
                    "constant_vertex_weight",
                    HypothesisStatus::Fails,
                    format!(
                        "w({}) = {} differs from w({}) = {w0}",
                        g.name(x),
                        g.w(x),
                        g.name(g.root())
                    ),
                ),
            }
        }
    };
    let q_min = g
        .vertices()
        .map(|x| g.q(x))
        .fold(f64::INFINITY, f64::min);
    let potential_hyp = match family {
        Some(
            FamilySpec::Halfline
            | FamilySpec::Triangular
            | FamilySpec::Cycle { .. },
        ) => hypothesis(
            "potential_bounded_below",
            HypothesisStatus::Holds,
            "q ≡ 0 by construction".to_string(),
        ),
        _ => hypothesis(
            "potential_bounded_below",
            HypothesisStatus::Holds,
            format!("finite graph: min q = {q_min}"),
        ),
    };
    let theorem1 = verdict(
        1,
        "uniform_weight",
        vec![standing.clone(), weight_hyp, potential_hyp],
    );

    // -- criterion 2: vanishing growth ratio + semibounded form -------------
    let growth_hyp = match family {
        Some(spec @ FamilySpec::Halfline) => hypothesis(
            "growth_ratio_vanishes",
            HypothesisStatus::Fails,
            format!(
                "m_n·a_n/n² = 2(n+1)²/n² has limit {} ≠ 0; measured ratio({max_n}) = {:.6}",
                closed_form_ratio_limit(spec).unwrap(),
                assumption.final_ratio().unwrap_or(f64::NAN)
            ),
        ),
        Some(spec @ FamilySpec::Triangular) => hypothesis(
            "growth_ratio_vanishes",
            HypothesisStatus::Holds,
            format!(
                "m_n·a_n/n² = 2(n+1)^(3/2)/n² → {}; measured ratio({max_n}) = {:.6}",
                closed_form_ratio_limit(spec).unwrap(),
                assumption.final_ratio().unwrap_or(f64::NAN)
            ),
        ),
        Some(_) => hypothesis(
            "growth_ratio_vanishes",
            HypothesisStatus::Holds,
            "finite graph: balls stabilize, so the ratio decays like 1/n²".to_string(),
        ),
        None => {
            let trend = assumption
                .fitted_trend()
                .map(|t| {
                    format!(
                        "fitted ratio ≈ {:.4}·n^{:.3} over the sampled tail",
                        t.prefactor, t.exponent
                    )
                })
                .unwrap_or_else(|| "too few samples for a trend".to_string());
            hypothesis(
                "growth_ratio_vanishes",
                HypothesisStatus::Undecidable,
                format!("{trend}; a finite sample cannot decide the limit"),
            )
        }
    };
    let semibounded_hyp = match family {
        Some(
            FamilySpec::Halfline
            | FamilySpec::Triangular
            | FamilySpec::Cycle { .. },
        ) => hypothesis(
            "form_semibounded",
            HypothesisStatus::Holds,
            format!(
                "q ≡ 0 makes the form nonnegative; measured lambda_min({max_n}) = {:.3e}",
                form.records.last().map(|r| r.lambda_min).unwrap_or(f64::NAN)
            ),
        ),
        _ => hypothesis(
            "form_semibounded",
            HypothesisStatus::Holds,
            format!(
                "finite-dimensional operator is bounded; witnessed constant c = {:.6}",
                form.c_est
            ),
        ),
    };
    let theorem2 = verdict(
        2,
        "vanishing_growth",
        vec![standing.clone(), growth_hyp, semibounded_hyp.clone()],
    );

    // -- criterion 3: bounded degree + complete metric + semibounded form ---
    let degree_hyp = match degree {
        DegreeBound::Exact { max_degree } => hypothesis(
            "bounded_degree",
            HypothesisStatus::Holds,
            format!("max degree = {max_degree}, exact"),
        ),
        DegreeBound::Unbounded => hypothesis(
            "bounded_degree",
            HypothesisStatus::Fails,
            "row-k vertices have degree 2k, unbounded".to_string(),
        ),
        DegreeBound::LowerBound { max_degree, probe_radius } => hypothesis(
            "bounded_degree",
            HypothesisStatus::Undecidable,
            format!(
                "max degree ≥ {max_degree} within hop {probe_radius}; the full graph may exceed it"
            ),
        ),
    };
    let complete_hyp = match family {
        Some(FamilySpec::Halfline) => hypothesis(
            "metric_complete",
            HypothesisStatus::Holds,
            format!(
                "dist(0, n) = Σ 1/sqrt((k+1)(k+2)) diverges, so metric balls are finite; \
                 profiled min distance reaches {:.4} (stabilized: {})",
                metric_profile.final_min_dist(),
                metric_profile.fully_stabilized()
            ),
        ),
        Some(FamilySpec::Triangular) => hypothesis(
            "metric_complete",
            HypothesisStatus::Holds,
            format!(
                "row-k step length (k+1)^(-1/4) sums to infinity, so metric balls are finite; \
                 profiled min distance reaches {:.4} (stabilized: {})",
                metric_profile.final_min_dist(),
                metric_profile.fully_stabilized()
            ),
        ),
        _ => hypothesis(
            "metric_complete",
            HypothesisStatus::Holds,
            "a finite metric space is complete".to_string(),
        ),
    };
    let theorem3 = verdict(
        3,
        "complete_metric",
        vec![standing, degree_hyp, complete_hyp, semibounded_hyp],
    );

    let finite_note = finite.then(|| {
        "finite graph: the operator is bounded and symmetric on a finite-dimensional space, \
         hence trivially essentially self-adjoint; the criteria below target infinite graphs"
            .to_string()
    });

    Ok(TheoremReport {
        graph: family
            .map(|f| f.name().to_string())
            .unwrap_or_else(|| "loaded".to_string()),
        center: g.name(x0).to_string(),
        max_n,
        finite,
        finite_note,
        assumption_a: assumption,
        form_bound: form,
        metric_profile,
        degree,
        theorems: vec![theorem1, theorem2, theorem3],
    })
}
