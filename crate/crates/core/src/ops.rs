//! Operator calculus on weighted magnetic graphs.
//!
//! Conventions, fixed once here and relied on everywhere:
//!
//! * The weighted vertex pairing is `(f, h)_w = Σ_x w(x) f(x) conj(h(x))`.
//! * The edge pairing is `(F, G)_a = Σ_e a(e) F(e) conj(G(e))` over stored
//!   edges only; reversed orientations never enter a pairing directly.
//! * The deformed difference is `(d_σ u)(e) = conj(σ(e)) u(t(e)) - u(o(e))`.
//! * The divergence is
//!   `(δ_σ Y)(x) = (1/w(x)) [ Σ_{t(e)=x} σ(e) a(e) Y(e) - Σ_{o(e)=x} a(e) Y(e) ]`.
//! * The magnetic Laplacian acts as
//!   `(Δ_σ u)(x) = (1/w(x)) Σ_{e: x ~ y} a(e) (u(x) - conj(σ_out(e)) u(y))`,
//!   where `σ_out` is the phase of the edge oriented away from `x`; the
//!   Schrödinger operator adds `q(x) u(x)`.
//!
//! All reductions run in ascending index order, so results are reproducible
//! bit for bit.

use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{EdgeField, VertexField};
use crate::graph::{Ball, EdgeSpec, MagneticGraph, VertexId, VertexSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Weighted vertex inner product `Σ_x w(x) f(x) conj(h(x))`.
pub fn inner_v(g: &MagneticGraph, f: &VertexField, h: &VertexField) -> Complex64 {
    let mut acc = ZERO;
    for (x, v) in f.iter() {
        let o = h.get(x);
        if o != ZERO {
            acc += g.w(x) * v * o.conj();
        }
    }
    acc
}

/// Squared norm `(f, f)_w`, returned as a real number.
pub fn norm_sq_v(g: &MagneticGraph, f: &VertexField) -> f64 {
    let mut acc = 0.0;
    for (x, v) in f.iter() {
        acc += g.w(x) * v.norm_sqr();
    }
    acc
}

/// Weighted norm `sqrt((f, f)_w)`.
pub fn norm_v(g: &MagneticGraph, f: &VertexField) -> f64 {
    norm_sq_v(g, f).sqrt()
}

/// Edge inner product `Σ_e a(e) F(e) conj(G(e))` over stored edges.
pub fn inner_e(g: &MagneticGraph, f: &EdgeField, h: &EdgeField) -> Complex64 {
    let mut acc = ZERO;
    for (e, v) in f.iter() {
        let o = h.get(e);
        if o != ZERO {
            acc += g.a(e) * v * o.conj();
        }
    }
    acc
}

/// Stored edges touching the support of `u`, ascending.
fn edges_touching(g: &MagneticGraph, u: &VertexField) -> BTreeSet<crate::graph::EdgeId> {
    let mut out = BTreeSet::new();
    for x in u.support() {
        for h in g.incident(x) {
            out.insert(h.edge);
        }
    }
    out
}

/// Plain difference operator `(d u)(e) = u(t(e)) - u(o(e))`.
pub fn d_plain(g: &MagneticGraph, u: &VertexField) -> EdgeField {
    let mut out = EdgeField::new();
    for e in edges_touching(g, u) {
        let data = g.edge(e);
        out.set(e, u.get(data.terminus) - u.get(data.origin));
    }
    out
}

/// Deformed difference `(d_σ u)(e) = conj(σ(e)) u(t(e)) - u(o(e))`.
pub fn d_sigma(g: &MagneticGraph, u: &VertexField) -> EdgeField {
    let mut out = EdgeField::new();
    for e in edges_touching(g, u) {
        let data = g.edge(e);
        out.set(e, data.sigma.conj() * u.get(data.terminus) - u.get(data.origin));
    }
    out
}

/// Divergence adjoint to `d_σ`:
/// `(δ_σ Y)(x) = (1/w(x)) [Σ_{t(e)=x} σ(e) a(e) Y(e) - Σ_{o(e)=x} a(e) Y(e)]`.
pub fn delta_sigma(g: &MagneticGraph, y: &EdgeField) -> VertexField {
    let mut touched = BTreeSet::new();
    for e in y.support() {
        let data = g.edge(e);
        touched.insert(data.origin);
        touched.insert(data.terminus);
    }
    let mut out = VertexField::new();
    for x in touched {
        let mut acc = ZERO;
        for h in g.incident(x) {
            let v = y.get(h.edge);
            if v == ZERO {
                continue;
            }
            if h.forward {
                // x is the origin of the stored edge.
                acc -= g.a(h.edge) * v;
            } else {
                // x is the terminus.
                acc += g.sigma(h.edge) * g.a(h.edge) * v;
            }
        }
        out.set(x, acc / g.w(x));
    }
    out
}

/// Vertices where `Δ_σ u` can be nonzero: the support of `u` plus neighbors,
/// optionally clipped to a ball.
fn evaluation_set(g: &MagneticGraph, u: &VertexField, restrict_to: Option<&Ball>) -> Vec<VertexId> {
    match restrict_to {
        Some(ball) => ball.vertices.clone(),
        None => {
            let mut set = BTreeSet::new();
            for x in u.support() {
                set.insert(x);
                for h in g.incident(x) {
                    set.insert(h.neighbor);
                }
            }
            set.into_iter().collect()
        }
    }
}

fn laplacian_impl(
    g: &MagneticGraph,
    u: &VertexField,
    magnetic: bool,
    potential: bool,
    restrict_to: Option<&Ball>,
) -> VertexField {
    let mut out = VertexField::new();
    for x in evaluation_set(g, u, restrict_to) {
        let ux = u.get(x);
        let mut acc = ZERO;
        for h in g.incident(x) {
            let coupled = if magnetic {
                g.sigma_out(h).conj() * u.get(h.neighbor)
            } else {
                u.get(h.neighbor)
            };
            acc += g.a(h.edge) * (ux - coupled);
        }
        let mut value = acc / g.w(x);
        if potential {
            value += g.q(x) * ux;
        }
        out.set(x, value);
    }
    out
}

/// Magnetic Laplacian `Δ_σ u`, evaluated on the support of `u` plus its
/// one-neighborhood, or on `restrict_to` when given.
pub fn laplacian_sigma(
    g: &MagneticGraph,
    u: &VertexField,
    restrict_to: Option<&Ball>,
) -> VertexField {
    laplacian_impl(g, u, true, false, restrict_to)
}

/// Phase-free Laplacian (all phases read as 1), same evaluation rules.
pub fn laplacian_plain(
    g: &MagneticGraph,
    u: &VertexField,
    restrict_to: Option<&Ball>,
) -> VertexField {
    laplacian_impl(g, u, false, false, restrict_to)
}

/// Schrödinger operator `H u = Δ_σ u + q u`.
pub fn schrodinger(g: &MagneticGraph, u: &VertexField, restrict_to: Option<&Ball>) -> VertexField {
    laplacian_impl(g, u, true, true, restrict_to)
}

/// Rewrites the phases through a vertex gauge `τ`:
/// `σ'(e) = conj(τ(o(e))) σ(e) τ(t(e))`. Weights and potentials are kept.
pub fn gauge_transform(g: &MagneticGraph, tau: &[Complex64]) -> Result<MagneticGraph> {
    if tau.len() != g.vertex_count() {
        return Err(Error::InvalidParams(format!(
            "gauge needs {} values, got {}",
            g.vertex_count(),
            tau.len()
        )));
    }
    for (i, t) in tau.iter().enumerate() {
        if (t.norm() - 1.0).abs() > crate::graph::UNIT_MODULUS_TOLERANCE {
            return Err(Error::InvalidParams(format!(
                "gauge value at vertex {} has modulus {}",
                g.name(VertexId(i as u32)),
                t.norm()
            )));
        }
    }
    let vertices = g
        .vertices()
        .map(|x| VertexSpec {
            id: g.name(x).to_string(),
            w: g.w(x),
            q: g.q(x),
        })
        .collect();
    let edges = g
        .edge_ids()
        .map(|e| {
            let d = g.edge(e);
            EdgeSpec {
                from: g.name(d.origin).to_string(),
                to: g.name(d.terminus).to_string(),
                a: d.a,
                sigma: tau[d.origin.idx()].conj() * d.sigma * tau[d.terminus.idx()],
            }
        })
        .collect();
    MagneticGraph::from_parts(vertices, edges, Some(g.name(g.root())))
}

// ---------------------------------------------------------------------------
// Truncated operator
// ---------------------------------------------------------------------------

/// Matrix of the Schrödinger operator compressed to a ball, Dirichlet style:
/// the diagonal keeps the full weighted degree (edges leaving the ball
/// included), off-diagonal entries couple in-ball neighbors only.
///
/// Internally the *weighted* matrix `B = W·M` is stored; its Hermitian
/// symmetry `B[i,j] = conj(B[j,i])` holds exactly by construction.  `M` and
/// the symmetrized `S = D^{1/2} M D^{-1/2} = D^{-1/2} B D^{-1/2}` are derived
/// from `B` on demand.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    ball: Ball,
    /// Row-major sparse weighted matrix; columns ascending within a row.
    weighted_rows: Vec<Vec<(usize, Complex64)>>,
    weights: Vec<f64>,
    sqrt_weights: Vec<f64>,
    row_of: HashMap<VertexId, usize>,
    symmetrized: bool,
}

/// Builds the truncated operator on `ball`. With `symmetrize` the standard
/// Hermitian representative is exposed via the `*_sym` accessors.
pub fn assemble(g: &MagneticGraph, ball: &Ball, symmetrize: bool) -> TruncatedOperator {
    let dim = ball.vertices.len();
    let mut row_of = HashMap::with_capacity(dim);
    for (i, &x) in ball.vertices.iter().enumerate() {
        row_of.insert(x, i);
    }
    let mut weighted_rows = Vec::with_capacity(dim);
    let mut weights = Vec::with_capacity(dim);
    for (i, &x) in ball.vertices.iter().enumerate() {
        // Full weighted degree: every stored incident edge counts, including
        // edges whose other endpoint lies outside the ball.
        let mut diagonal = 0.0;
        let mut row: Vec<(usize, Complex64)> = Vec::with_capacity(g.degree(x) + 1);
        for h in g.incident(x) {
            diagonal += g.a(h.edge);
            if let Some(&j) = row_of.get(&h.neighbor) {
                // Coefficient of u(y) in (Δ_σ u)(x) is -(a/w) σ([y, x]);
                // weighted by w it is -a·σ([y, x]) = -a·conj(σ_out).
                row.push((j, -g.a(h.edge) * g.sigma_out(h).conj()));
            }
        }
        row.push((i, Complex64::new(diagonal + g.w(x) * g.q(x), 0.0)));
        row.sort_by_key(|&(j, _)| j);
        weighted_rows.push(row);
        weights.push(g.w(x));
    }
    let sqrt_weights = weights.iter().map(|w| w.sqrt()).collect();
    TruncatedOperator {
        ball: ball.clone(),
        weighted_rows,
        weights,
        sqrt_weights,
        row_of,
        symmetrized: symmetrize,
    }
}

impl TruncatedOperator {
    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    pub fn vertex_ids(&self) -> &[VertexId] {
        &self.ball.vertices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn row_of(&self, x: VertexId) -> Option<usize> {
        self.row_of.get(&x).copied()
    }

    pub fn is_symmetrized(&self) -> bool {
        self.symmetrized
    }

    /// Entry of the weighted matrix `B = W·M`.
    pub fn weighted_entry(&self, i: usize, j: usize) -> Complex64 {
        self.weighted_rows[i]
            .iter()
            .find(|&&(col, _)| col == j)
            .map(|&(_, v)| v)
            .unwrap_or(ZERO)
    }

    /// Entry of `M` itself.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.weighted_entry(i, j) / self.weights[i]
    }

    /// Entry of the symmetrized matrix `S`.
    pub fn entry_sym(&self, i: usize, j: usize) -> Complex64 {
        self.weighted_entry(i, j) / (self.sqrt_weights[i] * self.sqrt_weights[j])
    }

    /// Sparse traversal of `M` entries as `(row, col, value)`, row-major.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.weighted_rows.iter().enumerate().flat_map(move |(i, row)| {
            row.iter().map(move |&(j, v)| (i, j, v / self.weights[i]))
        })
    }

    /// Largest deviation from Hermitian symmetry of the weighted matrix.
    /// Zero by construction; nonzero only for graphs built unchecked.
    pub fn weighted_hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in self.weighted_rows.iter().enumerate() {
            for &(j, v) in row {
                worst = worst.max((v - self.weighted_entry(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `M x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim());
        self.weighted_rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut acc = ZERO;
                for &(j, v) in row {
                    acc += v * x[j];
                }
                acc / self.weights[i]
            })
            .collect()
    }

    /// `S x` for the symmetrized matrix.
    pub fn apply_sym(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim());
        let scaled: Vec<Complex64> = x
            .iter()
            .zip(&self.sqrt_weights)
            .map(|(v, s)| v / *s)
            .collect();
        self.weighted_rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut acc = ZERO;
                for &(j, v) in row {
                    acc += v * scaled[j];
                }
                acc / self.sqrt_weights[i]
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::from_element(n, n, ZERO);
        for (i, row) in self.weighted_rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = v / self.weights[i];
            }
        }
        m
    }

    pub fn to_dense_sym(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut m = DMatrix::from_element(n, n, ZERO);
        for (i, row) in self.weighted_rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] = v / (self.sqrt_weights[i] * self.sqrt_weights[j]);
            }
        }
        m
    }
}
