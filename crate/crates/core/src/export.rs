//! Deterministic text exports: matrix triplets with a JSON sidecar,
//! eigenvalue lists, and metric profiles.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! inputs always export byte-equal files and every value parses back to the
//! exact bits that produced it.

use serde::{Deserialize, Serialize};

use crate::graph::MagneticGraph;
use crate::metric::MetricProfile;
use crate::ops::TruncatedOperator;

/// Companion metadata for a matrix export: the vertex order the rows use and
/// the weight diagonal needed to rebuild the weighted or symmetrized forms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixSidecar {
    pub dim: usize,
    /// Whether the CSV holds the symmetrized matrix rather than the plain one.
    pub symmetrized: bool,
    /// Vertex ids in row/column order.
    pub order: Vec<String>,
    /// `w(x)` in the same order.
    pub weight_diagonal: Vec<f64>,
}

/// CSV triplets `row_id,col_id,re,im` of the stored nonzero entries,
/// row-major with columns ascending.  Exports the symmetrized matrix when
/// the operator was assembled with symmetrization, the plain one otherwise.
pub fn matrix_csv(g: &MagneticGraph, op: &TruncatedOperator) -> String {
    let ids = op.vertex_ids();
    let mut out = String::from("row_id,col_id,re,im\n");
    for (i, j, value) in op.entries() {
        let v = if op.is_symmetrized() { op.entry_sym(i, j) } else { value };
        out.push_str(&format!(
            "{},{},{},{}\n",
            g.name(ids[i]),
            g.name(ids[j]),
            v.re,
            v.im
        ));
    }
    out
}

/// Sidecar for [`matrix_csv`].
pub fn matrix_sidecar(g: &MagneticGraph, op: &TruncatedOperator) -> MatrixSidecar {
    MatrixSidecar {
        dim: op.dim(),
        symmetrized: op.is_symmetrized(),
        order: op.vertex_ids().iter().map(|&x| g.name(x).to_string()).collect(),
        weight_diagonal: op.weights().to_vec(),
    }
}

/// One eigenvalue per line, ascending, trailing newline.
pub fn eigenvalues_csv(values: &[f64]) -> String {
    let mut out = String::new();
    for v in values {
        out.push_str(&format!("{v}\n"));
    }
    out
}

/// CSV `n,min_dist,max_dist,margin,stabilized` of a metric profile.
pub fn profile_csv(profile: &MetricProfile) -> String {
    let mut out = String::from("n,min_dist,max_dist,margin,stabilized\n");
    for row in &profile.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.n, row.min_dist, row.max_dist, profile.margin, row.stabilized
        ));
    }
    out
}
