//! Built-in graph families.
//!
//! Two infinite families with closed-form structure (a weighted half-line and
//! a triangular layer graph), plus finite cycle and random families.  The
//! infinite families are materialized as truncations of a requested hop
//! radius around their root; generated truncations remember that radius so
//! geometric routines can treat the rim conservatively.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::ExactScalar;
use crate::graph::{EdgeData, EdgeSpec, MagneticGraph, VertexId, VertexSpec};

/// Closed-form vertex weights and edge conductances of a generated graph,
/// keyed by dense index in generation order.
#[derive(Debug, Clone)]
pub struct ExactAttributes {
    pub w: Vec<ExactScalar>,
    pub a: Vec<ExactScalar>,
}

/// Parameters of the random family.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomParams {
    pub n: usize,
    pub p: f64,
    pub w_range: (f64, f64),
    pub a_range: (f64, f64),
    pub q_range: (f64, f64),
    pub random_phase: bool,
    pub seed: u64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            n: 50,
            p: 0.15,
            w_range: (0.1, 10.0),
            a_range: (0.1, 10.0),
            q_range: (-5.0, 5.0),
            random_phase: true,
            seed: 0,
        }
    }
}

/// A reproducible description of a graph family.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    /// Vertices 0,1,2,... with w(j) = 1/(j+1) and a([j-1, j]) = j.
    Halfline,
    /// Row k (k >= 1) holds k vertices with w = k^(-1/2); consecutive rows are
    /// joined completely with a = 1.
    Triangular,
    /// N-cycle with unit weights; the flux is spread evenly, exp(i*flux/N) per
    /// stored edge.
    Cycle { n: usize, flux: f64 },
    /// Connected Erdős–Rényi graph with uniform weights, potentials, and
    /// optionally uniform random phases.
    Random(RandomParams),
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Halfline => "halfline",
            FamilySpec::Triangular => "triangular",
            FamilySpec::Cycle { .. } => "cycle",
            FamilySpec::Random(_) => "random",
        }
    }

    /// True for families whose truncations grow without bound with the
    /// requested radius.
    pub fn is_infinite(&self) -> bool {
        matches!(self, FamilySpec::Halfline | FamilySpec::Triangular)
    }

    /// Generates the family member; for infinite families this is the
    /// truncation of hop radius `radius` around the root.
    pub fn generate(&self, radius: u32) -> Result<MagneticGraph> {
        match self {
            FamilySpec::Halfline => halfline(radius),
            FamilySpec::Triangular => triangular(radius),
            FamilySpec::Cycle { n, flux } => cycle(*n, *flux),
            FamilySpec::Random(params) => random(params),
        }
    }

    /// Exact weights and conductances for a graph produced by
    /// [`FamilySpec::generate`], for families defined in closed form.
    /// Random graphs have none.  Exactness lets downstream sequence
    /// diagnostics run without rounding.
    pub fn exact_attributes(&self, g: &MagneticGraph) -> Option<ExactAttributes> {
        let attrs = match self {
            FamilySpec::Halfline => {
                // w(j) = 1/(j+1); the j-th stored edge is [j, j+1] with a = j+1.
                let w = (0..g.vertex_count())
                    .map(|j| ExactScalar::ratio(1, j as i128 + 1))
                    .collect();
                let a = (0..g.edge_count())
                    .map(|e| ExactScalar::integer(e as i128 + 1))
                    .collect();
                ExactAttributes { w, a }
            }
            FamilySpec::Triangular => {
                // Row k (k >= 1, k vertices) has w = 1/sqrt(k); a = 1 throughout.
                let rows = g.truncation_radius()? as usize + 1;
                let mut w = Vec::with_capacity(g.vertex_count());
                for k in 1..=rows {
                    for _ in 0..k {
                        w.push(ExactScalar::sqrt_ratio(1, k as i128));
                    }
                }
                if w.len() != g.vertex_count() {
                    return None;
                }
                let a = vec![ExactScalar::integer(1); g.edge_count()];
                ExactAttributes { w, a }
            }
            FamilySpec::Cycle { .. } => ExactAttributes {
                w: vec![ExactScalar::integer(1); g.vertex_count()],
                a: vec![ExactScalar::integer(1); g.edge_count()],
            },
            FamilySpec::Random(_) => return None,
        };
        debug_assert!(g
            .vertices()
            .all(|x| (attrs.w[x.idx()].to_f64() - g.w(x)).abs() <= 1e-12 * g.w(x)));
        debug_assert!(g
            .edge_ids()
            .all(|e| (attrs.a[e.idx()].to_f64() - g.a(e)).abs() <= 1e-12 * g.a(e)));
        Some(attrs)
    }
}

fn halfline(radius: u32) -> Result<MagneticGraph> {
    let r = radius as usize;
    let vertices = (0..=r)
        .map(|j| VertexSpec {
            id: j.to_string(),
            w: 1.0 / (j as f64 + 1.0),
            q: 0.0,
        })
        .collect();
    let edges = (1..=r)
        .map(|j| EdgeSpec {
            from: (j - 1).to_string(),
            to: j.to_string(),
            a: j as f64,
            sigma: Complex64::new(1.0, 0.0),
        })
        .collect();
    let mut g = MagneticGraph::from_parts(vertices, edges, Some("0"))?;
    g.set_truncation_radius(radius);
    Ok(g)
}

/// First global index of row `k` (rows count from 1).
fn triangular_row_start(k: usize) -> usize {
    k * (k - 1) / 2
}

fn triangular(radius: u32) -> Result<MagneticGraph> {
    // Row counts grow linearly and complete joins grow quadratically, so a
    // deep truncation has millions of edges; build it through the dense
    // constructor rather than per-edge name strings.
    let rows = radius as usize + 1;
    let count = triangular_row_start(rows + 1);
    let mut names = Vec::with_capacity(count);
    let mut w = Vec::with_capacity(count);
    for k in 1..=rows {
        let wk = 1.0 / (k as f64).sqrt();
        for i in triangular_row_start(k)..triangular_row_start(k + 1) {
            names.push(format!("x{i}"));
            w.push(wk);
        }
    }
    let edge_count = (rows - 1) * rows * (rows + 1) / 3;
    let mut edges = Vec::with_capacity(edge_count);
    let one = Complex64::new(1.0, 0.0);
    for k in 1..rows {
        for i in triangular_row_start(k)..triangular_row_start(k + 1) {
            for j in triangular_row_start(k + 1)..triangular_row_start(k + 2) {
                edges.push(EdgeData {
                    origin: VertexId(i as u32),
                    terminus: VertexId(j as u32),
                    a: 1.0,
                    sigma: one,
                });
            }
        }
    }
    let mut g = MagneticGraph::from_indexed(names, w, vec![0.0; count], edges, VertexId(0));
    g.set_truncation_radius(radius);
    Ok(g)
}

fn cycle(n: usize, flux: f64) -> Result<MagneticGraph> {
    if n < 3 {
        return Err(Error::InvalidParams(format!(
            "cycle needs at least 3 vertices, got {n}"
        )));
    }
    let vertices = (0..n)
        .map(|j| VertexSpec {
            id: j.to_string(),
            w: 1.0,
            q: 0.0,
        })
        .collect();
    let per_edge = Complex64::from_polar(1.0, flux / n as f64);
    let edges = (0..n)
        .map(|j| EdgeSpec {
            from: j.to_string(),
            to: ((j + 1) % n).to_string(),
            a: 1.0,
            sigma: per_edge,
        })
        .collect();
    MagneticGraph::from_parts(vertices, edges, Some("0"))
}

fn random(params: &RandomParams) -> Result<MagneticGraph> {
    let RandomParams { n, p, w_range, a_range, q_range, random_phase, seed } = *params;
    if n == 0 {
        return Err(Error::InvalidParams("random family needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!(
            "edge probability must lie in [0, 1], got {p}"
        )));
    }
    for (lo, hi, what) in [
        (w_range.0, w_range.1, "w"),
        (a_range.0, a_range.1, "a"),
        (q_range.0, q_range.1, "q"),
    ] {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidParams(format!(
                "bad {what} range [{lo}, {hi}]"
            )));
        }
    }
    if w_range.0 <= 0.0 || a_range.0 <= 0.0 {
        return Err(Error::InvalidParams(
            "w and a ranges must be strictly positive".into(),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const MAX_ATTEMPTS: usize = 1000;
    for _ in 0..MAX_ATTEMPTS {
        // Sample the edge set first; weights are only drawn once it connects,
        // so the output is a deterministic function of (params, seed).
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(p) {
                    pairs.push((i, j));
                }
            }
        }
        if !pairs_connected(n, &pairs) {
            continue;
        }
        let vertices = (0..n)
            .map(|j| VertexSpec {
                id: j.to_string(),
                w: rng.gen_range(w_range.0..=w_range.1),
                q: rng.gen_range(q_range.0..=q_range.1),
            })
            .collect();
        let edges = pairs
            .into_iter()
            .map(|(i, j)| EdgeSpec {
                from: i.to_string(),
                to: j.to_string(),
                a: rng.gen_range(a_range.0..=a_range.1),
                sigma: if random_phase {
                    Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU))
                } else {
                    Complex64::new(1.0, 0.0)
                },
            })
            .collect();
        return MagneticGraph::from_parts(vertices, edges, Some("0"));
    }
    Err(Error::InvalidParams(format!(
        "no connected sample in {MAX_ATTEMPTS} attempts (n = {n}, p = {p})"
    )))
}

fn pairs_connected(n: usize, pairs: &[(usize, usize)]) -> bool {
    if n == 1 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in pairs {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count == n
}

/// Where a diagnostic run gets its graph from: a regenerable family or a
/// fixed, fully stored graph.
#[derive(Debug, Clone)]
pub enum GraphSource {
    Family(FamilySpec),
    Loaded(MagneticGraph),
}

impl GraphSource {
    /// A graph covering hop radius `radius` around the root. Families are
    /// truncated at exactly that radius; loaded graphs are returned whole.
    pub fn realize(&self, radius: u32) -> Result<std::borrow::Cow<'_, MagneticGraph>> {
        match self {
            GraphSource::Family(spec) => Ok(std::borrow::Cow::Owned(spec.generate(radius)?)),
            GraphSource::Loaded(g) => Ok(std::borrow::Cow::Borrowed(g)),
        }
    }

    /// True when the underlying graph is finite (everything except the
    /// infinite built-in families).
    pub fn is_finite(&self) -> bool {
        match self {
            GraphSource::Family(spec) => !spec.is_infinite(),
            GraphSource::Loaded(_) => true,
        }
    }

    pub fn family(&self) -> Option<&FamilySpec> {
        match self {
            GraphSource::Family(spec) => Some(spec),
            GraphSource::Loaded(_) => None,
        }
    }
}
