//! Finitely supported complex functions on vertices and stored edges.
//!
//! Both field types keep their entries in ordered maps so that every
//! iteration — and hence every floating-point reduction built on top —
//! visits entries in ascending index order.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::graph::{EdgeId, HalfEdge, VertexId};

/// Complex function on vertices with finite support. Absent vertices read 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VertexField {
    values: BTreeMap<VertexId, Complex64>,
}

impl VertexField {
    pub fn new() -> Self {
        Self::default()
    }

    /// The indicator of a single vertex.
    pub fn indicator(x: VertexId) -> Self {
        let mut f = Self::new();
        f.set(x, Complex64::new(1.0, 0.0));
        f
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (VertexId, Complex64)>) -> Self {
        let mut f = Self::new();
        for (x, v) in entries {
            f.set(x, v);
        }
        f
    }

    pub fn get(&self, x: VertexId) -> Complex64 {
        self.values
            .get(&x)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Stores the value; an exact zero removes the entry to keep supports tight.
    pub fn set(&mut self, x: VertexId, v: Complex64) {
        if v.re == 0.0 && v.im == 0.0 {
            self.values.remove(&x);
        } else {
            self.values.insert(x, v);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.values.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Complex64)> + '_ {
        self.values.iter().map(|(&x, &v)| (x, v))
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self::from_entries(self.iter().map(|(x, v)| (x, f(v))))
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// Pointwise absolute value, |f|(x) = |f(x)| as a real-valued field.
    pub fn abs(&self) -> Self {
        self.map(|v| Complex64::new(v.norm(), 0.0))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| c * v)
    }

    /// Pointwise product. The support is the intersection of the supports.
    pub fn product(&self, other: &Self) -> Self {
        let mut out = Self::new();
        for (x, v) in self.iter() {
            let o = other.get(x);
            if o.re != 0.0 || o.im != 0.0 {
                out.set(x, v * o);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, v) in other.iter() {
            out.set(x, out.get(x) + v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, v) in other.iter() {
            out.set(x, out.get(x) - v);
        }
        out
    }
}

/// Complex function on stored edges with finite support.
///
/// Values attach to the stored orientation; evaluation on a reversed edge
/// negates, matching the antisymmetric-function convention on oriented edges.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeField {
    values: BTreeMap<EdgeId, Complex64>,
}

impl EdgeField {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (EdgeId, Complex64)>) -> Self {
        let mut f = Self::new();
        for (e, v) in entries {
            f.set(e, v);
        }
        f
    }

    /// Value on the stored orientation.
    pub fn get(&self, e: EdgeId) -> Complex64 {
        self.values
            .get(&e)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Value on the orientation of the half-edge: stored value if the
    /// half-edge runs forward, its negative otherwise.
    pub fn get_oriented(&self, h: &HalfEdge) -> Complex64 {
        let v = self.get(h.edge);
        if h.forward {
            v
        } else {
            -v
        }
    }

    pub fn set(&mut self, e: EdgeId, v: Complex64) {
        if v.re == 0.0 && v.im == 0.0 {
            self.values.remove(&e);
        } else {
            self.values.insert(e, v);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.values.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (EdgeId, Complex64)> + '_ {
        self.values.iter().map(|(&e, &v)| (e, v))
    }

    pub fn support_len(&self) -> usize {
        self.values.len()
    }
}
