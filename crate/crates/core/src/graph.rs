//! Weighted magnetic graph model.
//!
//! A graph here is a finite, connected, loop-free multigraph-free structure
//! with a positive vertex weight `w`, a real potential `q`, a positive edge
//! weight `a`, and a unit-modulus phase `sigma` per stored edge.  Every edge
//! is stored with one fixed orientation; the reversed orientation is derived,
//! with `a` unchanged and the phase conjugated.  Vertices are addressed by
//! dense indices in file/generation order, so all iteration (and therefore
//! all floating-point summation) is deterministic.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Modulus slack accepted for phases on input; anything worse is rejected.
pub const UNIT_MODULUS_TOLERANCE: f64 = 1e-6;

/// Dense vertex index. Stable for the lifetime of the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// Dense index into the stored edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// One stored (oriented) edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeData {
    pub origin: VertexId,
    pub terminus: VertexId,
    pub a: f64,
    pub sigma: Complex64,
}

/// An edge as seen from one of its endpoints: `forward` is true when the
/// base vertex is the stored origin. The phase of the outward orientation is
/// `sigma(e)` if forward, `conj(sigma(e))` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HalfEdge {
    pub edge: EdgeId,
    pub neighbor: VertexId,
    pub forward: bool,
}

/// Construction input: one vertex.
#[derive(Debug, Clone)]
pub struct VertexSpec {
    pub id: String,
    pub w: f64,
    pub q: f64,
}

/// Construction input: one stored edge.
#[derive(Debug, Clone)]
pub struct EdgeSpec {
    pub from: String,
    pub to: String,
    pub a: f64,
    pub sigma: Complex64,
}

/// Combinatorial ball around a center vertex.
///
/// `vertices` is sorted ascending; `interior_edges` holds the stored edges
/// with both endpoints in the ball, `incident_edges` those with at least one.
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: VertexId,
    pub radius: u32,
    pub vertices: Vec<VertexId>,
    pub interior_edges: Vec<EdgeId>,
    pub incident_edges: Vec<EdgeId>,
    membership: Vec<bool>,
}

impl Ball {
    pub fn contains(&self, x: VertexId) -> bool {
        self.membership[x.idx()]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Weighted graph with magnetic phases.
#[derive(Debug, Clone)]
pub struct MagneticGraph {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    w: Vec<f64>,
    q: Vec<f64>,
    edges: Vec<EdgeData>,
    adjacency: Vec<Vec<HalfEdge>>,
    root: VertexId,
    truncation_radius: Option<u32>,
}

// ---------------------------------------------------------------------------
// JSON file layout
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SigmaEntry {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct VertexEntry {
    id: String,
    w: f64,
    q: f64,
}

#[derive(Serialize, Deserialize)]
struct EdgeEntry {
    from: String,
    to: String,
    a: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<SigmaEntry>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<VertexEntry>,
    edges: Vec<EdgeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<String>,
}

impl MagneticGraph {
    /// Builds and validates a graph. Endpoints must be distinct and unique per
    /// unordered pair, weights positive and finite, phases unit modulus within
    /// [`UNIT_MODULUS_TOLERANCE`] (then normalized exactly), and the graph
    /// connected. `root` defaults to the first vertex.
    pub fn from_parts(
        vertices: Vec<VertexSpec>,
        edges: Vec<EdgeSpec>,
        root: Option<&str>,
    ) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        let mut names = Vec::with_capacity(vertices.len());
        let mut index = HashMap::with_capacity(vertices.len());
        let mut w = Vec::with_capacity(vertices.len());
        let mut q = Vec::with_capacity(vertices.len());
        for (i, v) in vertices.into_iter().enumerate() {
            if index.contains_key(&v.id) {
                return Err(Error::InvalidGraph(format!("duplicate vertex id {:?}", v.id)));
            }
            if !(v.w.is_finite() && v.w > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "vertex {:?}: weight w must be positive and finite, got {}",
                    v.id, v.w
                )));
            }
            if !v.q.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "vertex {:?}: potential q must be finite, got {}",
                    v.id, v.q
                )));
            }
            index.insert(v.id.clone(), VertexId(i as u32));
            names.push(v.id);
            w.push(v.w);
            q.push(v.q);
        }

        let mut edge_data = Vec::with_capacity(edges.len());
        let mut seen_pairs = HashMap::new();
        for e in edges {
            let from = *index
                .get(&e.from)
                .ok_or_else(|| Error::UnknownVertex(e.from.clone()))?;
            let to = *index
                .get(&e.to)
                .ok_or_else(|| Error::UnknownVertex(e.to.clone()))?;
            if from == to {
                return Err(Error::InvalidGraph(format!(
                    "edge [{:?}, {:?}] is a loop",
                    e.from, e.to
                )));
            }
            let key = (from.min(to), from.max(to));
            if seen_pairs.insert(key, ()).is_some() {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge between {:?} and {:?}",
                    e.from, e.to
                )));
            }
            if !(e.a.is_finite() && e.a > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge [{:?}, {:?}]: weight a must be positive and finite, got {}",
                    e.from, e.to, e.a
                )));
            }
            let modulus = e.sigma.norm();
            if !modulus.is_finite() || (modulus - 1.0).abs() > UNIT_MODULUS_TOLERANCE {
                return Err(Error::InvalidGraph(format!(
                    "edge [{:?}, {:?}]: |sigma| = {} is not 1 within {:.0e}",
                    e.from, e.to, modulus, UNIT_MODULUS_TOLERANCE
                )));
            }
            // Normalize only when the modulus is measurably off; a phase
            // already unit to a few ulps is kept bit-for-bit, which makes
            // normalization idempotent and save/load round trips exact.
            let sigma = if (modulus - 1.0).abs() <= 4.0 * f64::EPSILON {
                e.sigma
            } else {
                e.sigma / modulus
            };
            edge_data.push(EdgeData { origin: from, terminus: to, a: e.a, sigma });
        }

        let root = match root {
            Some(name) => *index
                .get(name)
                .ok_or_else(|| Error::UnknownVertex(name.to_string()))?,
            None => VertexId(0),
        };

        let g = Self::assemble_unchecked(names, index, w, q, edge_data, root, None);
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    /// Builds a graph without any validation or phase normalization.
    ///
    /// Intended for fault-injection tests (e.g. deliberately non-unimodular
    /// phases). Operator code assumes validated input; results on invalid
    /// graphs are well-defined arithmetic but carry no guarantees.
    pub fn from_parts_unchecked(
        vertices: Vec<VertexSpec>,
        edges: Vec<EdgeSpec>,
        root: Option<&str>,
    ) -> Self {
        let mut names = Vec::new();
        let mut index = HashMap::new();
        let mut w = Vec::new();
        let mut q = Vec::new();
        for (i, v) in vertices.into_iter().enumerate() {
            index.insert(v.id.clone(), VertexId(i as u32));
            names.push(v.id);
            w.push(v.w);
            q.push(v.q);
        }
        let edge_data = edges
            .into_iter()
            .map(|e| EdgeData {
                origin: index[&e.from],
                terminus: index[&e.to],
                a: e.a,
                sigma: e.sigma,
            })
            .collect();
        let root = root.map(|name| index[name]).unwrap_or(VertexId(0));
        Self::assemble_unchecked(names, index, w, q, edge_data, root, None)
    }

    /// Builds a graph directly from dense indices, skipping name lookups and
    /// per-edge validation.  For generator code whose invariants (distinct
    /// endpoints, unique pairs, positive weights, unit phases, connectivity)
    /// hold by construction; large closed-form truncations would otherwise
    /// spend most of their time formatting and hashing vertex-name strings.
    pub(crate) fn from_indexed(
        names: Vec<String>,
        w: Vec<f64>,
        q: Vec<f64>,
        edges: Vec<EdgeData>,
        root: VertexId,
    ) -> Self {
        let index = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), VertexId(i as u32)))
            .collect();
        let g = Self::assemble_unchecked(names, index, w, q, edges, root, None);
        debug_assert!(g.is_connected());
        g
    }

    fn assemble_unchecked(
        names: Vec<String>,
        index: HashMap<String, VertexId>,
        w: Vec<f64>,
        q: Vec<f64>,
        edges: Vec<EdgeData>,
        root: VertexId,
        truncation_radius: Option<u32>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); names.len()];
        for (i, e) in edges.iter().enumerate() {
            let id = EdgeId(i as u32);
            adjacency[e.origin.idx()].push(HalfEdge {
                edge: id,
                neighbor: e.terminus,
                forward: true,
            });
            adjacency[e.terminus.idx()].push(HalfEdge {
                edge: id,
                neighbor: e.origin,
                forward: false,
            });
        }
        MagneticGraph {
            names,
            index,
            w,
            q,
            edges,
            adjacency,
            root,
            truncation_radius,
        }
    }

    /// Marks this graph as a radius-`r` truncation of a larger family member.
    /// Distance-to-complement computations then treat the outermost
    /// combinatorial sphere as already belonging to the complement.
    pub(crate) fn set_truncation_radius(&mut self, r: u32) {
        self.truncation_radius = Some(r);
    }

    // -- I/O ---------------------------------------------------------------

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        let vertices = file
            .vertices
            .into_iter()
            .map(|v| VertexSpec { id: v.id, w: v.w, q: v.q })
            .collect();
        let edges = file
            .edges
            .into_iter()
            .map(|e| EdgeSpec {
                from: e.from,
                to: e.to,
                a: e.a,
                sigma: e
                    .sigma
                    .map(|s| Complex64::new(s.re, s.im))
                    .unwrap_or(Complex64::new(1.0, 0.0)),
            })
            .collect();
        Self::from_parts(vertices, edges, file.root.as_deref())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    fn to_file_repr(&self) -> GraphFile {
        GraphFile {
            vertices: self
                .vertices()
                .map(|x| VertexEntry {
                    id: self.names[x.idx()].clone(),
                    w: self.w[x.idx()],
                    q: self.q[x.idx()],
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeEntry {
                    from: self.names[e.origin.idx()].clone(),
                    to: self.names[e.terminus.idx()].clone(),
                    a: e.a,
                    sigma: Some(SigmaEntry {
                        re: e.sigma.re,
                        im: e.sigma.im,
                    }),
                })
                .collect(),
            root: Some(self.names[self.root.idx()].clone()),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_repr()).expect("graph serialization")
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    /// SHA-256 over the canonical (compact, storage-ordered) serialization.
    pub fn hash_hex(&self) -> String {
        let canonical = serde_json::to_string(&self.to_file_repr()).expect("graph serialization");
        let mut hasher = Sha256::new();
        hasher.update(canonical.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    // -- accessors ----------------------------------------------------------

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.names.len() as u32).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn edge(&self, e: EdgeId) -> &EdgeData {
        &self.edges[e.idx()]
    }

    pub fn w(&self, x: VertexId) -> f64 {
        self.w[x.idx()]
    }

    pub fn q(&self, x: VertexId) -> f64 {
        self.q[x.idx()]
    }

    pub fn name(&self, x: VertexId) -> &str {
        &self.names[x.idx()]
    }

    pub fn lookup(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    pub fn resolve(&self, name: &str) -> Result<VertexId> {
        self.lookup(name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn truncation_radius(&self) -> Option<u32> {
        self.truncation_radius
    }

    /// Number of stored edges at `x` (the graph-theoretic degree).
    pub fn degree(&self, x: VertexId) -> usize {
        self.adjacency[x.idx()].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.names.len())
            .map(|i| self.adjacency[i].len())
            .max()
            .unwrap_or(0)
    }

    /// Edges at `x`, each presented with `x` as base vertex.
    pub fn incident(&self, x: VertexId) -> &[HalfEdge] {
        &self.adjacency[x.idx()]
    }

    /// Phase of the edge oriented away from the half-edge's base vertex.
    pub fn sigma_out(&self, h: &HalfEdge) -> Complex64 {
        let s = self.edges[h.edge.idx()].sigma;
        if h.forward {
            s
        } else {
            s.conj()
        }
    }

    pub fn a(&self, e: EdgeId) -> f64 {
        self.edges[e.idx()].a
    }

    pub fn sigma(&self, e: EdgeId) -> Complex64 {
        self.edges[e.idx()].sigma
    }

    // -- combinatorial structure ---------------------------------------------

    /// Hop distances from `x0` via breadth-first search. All vertices are
    /// reachable on a validated (connected) graph.
    pub fn bfs_radii(&self, x0: VertexId) -> Vec<u32> {
        let n = self.vertex_count();
        let mut dist = vec![u32::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        dist[x0.idx()] = 0;
        queue.push_back(x0);
        while let Some(x) = queue.pop_front() {
            let d = dist[x.idx()];
            for h in &self.adjacency[x.idx()] {
                let v = h.neighbor.idx();
                if dist[v] == u32::MAX {
                    dist[v] = d + 1;
                    queue.push_back(h.neighbor);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.bfs_radii(VertexId(0)).iter().all(|&d| d != u32::MAX)
    }

    /// Combinatorial ball of hop radius `n` around `x0`.
    pub fn ball(&self, x0: VertexId, n: u32) -> Ball {
        let radii = self.bfs_radii(x0);
        let membership: Vec<bool> = radii.iter().map(|&r| r <= n).collect();
        let vertices: Vec<VertexId> = self
            .vertices()
            .filter(|x| membership[x.idx()])
            .collect();
        let mut interior_edges = Vec::new();
        let mut incident_edges = Vec::new();
        for e in self.edge_ids() {
            let d = &self.edges[e.idx()];
            let o_in = membership[d.origin.idx()];
            let t_in = membership[d.terminus.idx()];
            if o_in && t_in {
                interior_edges.push(e);
            }
            if o_in || t_in {
                incident_edges.push(e);
            }
        }
        Ball {
            center: x0,
            radius: n,
            vertices,
            interior_edges,
            incident_edges,
            membership,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn path3() -> MagneticGraph {
        MagneticGraph::from_parts(
            vec![
                VertexSpec { id: "p".into(), w: 1.0, q: 0.0 },
                VertexSpec { id: "r".into(), w: 2.0, q: 0.5 },
                VertexSpec { id: "s".into(), w: 0.5, q: -1.0 },
            ],
            vec![
                EdgeSpec { from: "p".into(), to: "r".into(), a: 1.0, sigma: c(1.0, 0.0) },
                EdgeSpec { from: "r".into(), to: "s".into(), a: 3.0, sigma: c(0.0, 1.0) },
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn builds_and_indexes_in_input_order() {
        let g = path3();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.lookup("p"), Some(VertexId(0)));
        assert_eq!(g.lookup("s"), Some(VertexId(2)));
        assert_eq!(g.name(VertexId(1)), "r");
        assert_eq!(g.root(), VertexId(0));
        assert_eq!(g.degree(VertexId(1)), 2);
        assert_eq!(g.degree(VertexId(0)), 1);
    }

    #[test]
    fn half_edges_carry_orientation() {
        let g = path3();
        let r = g.lookup("r").unwrap();
        let hs = g.incident(r);
        assert_eq!(hs.len(), 2);
        // Edge p->r seen from r is reversed; edge r->s is forward.
        let back = hs.iter().find(|h| h.neighbor == VertexId(0)).unwrap();
        assert!(!back.forward);
        assert_eq!(g.sigma_out(back), c(1.0, 0.0));
        let fwd = hs.iter().find(|h| h.neighbor == VertexId(2)).unwrap();
        assert!(fwd.forward);
        assert_eq!(g.sigma_out(fwd), c(0.0, 1.0));
        // Reversed orientation conjugates the phase.
        let s = g.lookup("s").unwrap();
        let back2 = g.incident(s).iter().find(|h| h.neighbor == r).unwrap();
        assert_eq!(g.sigma_out(back2), c(0.0, -1.0));
    }

    #[test]
    fn rejects_invalid_input() {
        let v = |id: &str| VertexSpec { id: id.into(), w: 1.0, q: 0.0 };
        let e = |f: &str, t: &str| EdgeSpec {
            from: f.into(),
            to: t.into(),
            a: 1.0,
            sigma: c(1.0, 0.0),
        };

        // Loop.
        let err = MagneticGraph::from_parts(vec![v("x"), v("y")], vec![e("x", "x"), e("x", "y")], None);
        assert!(matches!(err, Err(Error::InvalidGraph(_))));

        // Duplicate unordered pair.
        let err = MagneticGraph::from_parts(vec![v("x"), v("y")], vec![e("x", "y"), e("y", "x")], None);
        assert!(matches!(err, Err(Error::InvalidGraph(_))));

        // Unknown endpoint.
        let err = MagneticGraph::from_parts(vec![v("x"), v("y")], vec![e("x", "z")], None);
        assert!(matches!(err, Err(Error::UnknownVertex(_))));

        // Nonpositive weight.
        let err = MagneticGraph::from_parts(
            vec![VertexSpec { id: "x".into(), w: 0.0, q: 0.0 }, v("y")],
            vec![e("x", "y")],
            None,
        );
        assert!(matches!(err, Err(Error::InvalidGraph(_))));

        // Phase far from the unit circle.
        let err = MagneticGraph::from_parts(
            vec![v("x"), v("y")],
            vec![EdgeSpec { from: "x".into(), to: "y".into(), a: 1.0, sigma: c(1.5, 0.0) }],
            None,
        );
        assert!(matches!(err, Err(Error::InvalidGraph(_))));

        // Disconnected.
        let err = MagneticGraph::from_parts(vec![v("x"), v("y"), v("z")], vec![e("x", "y")], None);
        assert!(matches!(err, Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn normalizes_slightly_off_phases_to_unit_modulus() {
        let g = MagneticGraph::from_parts(
            vec![
                VertexSpec { id: "x".into(), w: 1.0, q: 0.0 },
                VertexSpec { id: "y".into(), w: 1.0, q: 0.0 },
            ],
            vec![EdgeSpec {
                from: "x".into(),
                to: "y".into(),
                a: 1.0,
                sigma: c(1.0 + 5e-7, 0.0),
            }],
            None,
        )
        .unwrap();
        assert!((g.sigma(EdgeId(0)).norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn json_round_trip_preserves_everything() {
        let g = path3();
        let text = g.to_json_string();
        let h = MagneticGraph::from_json_str(&text).unwrap();
        assert_eq!(g.vertex_count(), h.vertex_count());
        for x in g.vertices() {
            assert_eq!(g.name(x), h.name(x));
            assert_eq!(g.w(x), h.w(x));
            assert_eq!(g.q(x), h.q(x));
        }
        for e in g.edge_ids() {
            assert_eq!(g.edge(e).origin, h.edge(e).origin);
            assert_eq!(g.edge(e).terminus, h.edge(e).terminus);
            assert_eq!(g.a(e), h.a(e));
            assert_eq!(g.sigma(e), h.sigma(e));
        }
        assert_eq!(g.hash_hex(), h.hash_hex());
    }

    #[test]
    fn sigma_defaults_to_one_when_absent() {
        let text = r#"{
            "vertices": [ {"id": "u", "w": 1.0, "q": 0.0}, {"id": "v", "w": 1.0, "q": 0.0} ],
            "edges": [ {"from": "u", "to": "v", "a": 2.0} ],
            "root": "v"
        }"#;
        let g = MagneticGraph::from_json_str(text).unwrap();
        assert_eq!(g.sigma(EdgeId(0)), c(1.0, 0.0));
        assert_eq!(g.root(), VertexId(1));
    }

    #[test]
    fn ball_splits_interior_and_incident_edges() {
        // Path p - r - s with center p, radius 1: s is outside, edge r-s only incident.
        let g = path3();
        let ball = g.ball(VertexId(0), 1);
        assert_eq!(ball.vertices, vec![VertexId(0), VertexId(1)]);
        assert_eq!(ball.interior_edges, vec![EdgeId(0)]);
        assert_eq!(ball.incident_edges, vec![EdgeId(0), EdgeId(1)]);
        assert!(ball.contains(VertexId(1)));
        assert!(!ball.contains(VertexId(2)));

        let tiny = g.ball(VertexId(0), 0);
        assert_eq!(tiny.vertices, vec![VertexId(0)]);
        assert!(tiny.interior_edges.is_empty());
        assert_eq!(tiny.incident_edges, vec![EdgeId(0)]);
    }

    #[test]
    fn bfs_radii_count_hops() {
        let g = path3();
        assert_eq!(g.bfs_radii(VertexId(0)), vec![0, 1, 2]);
        assert_eq!(g.bfs_radii(VertexId(1)), vec![1, 0, 1]);
    }

    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        /// JSON round trips preserve every attribute bit-for-bit, and balls
        /// nest as their radius grows.
        #[test]
        fn prop_json_round_trip_and_ball_nesting(
            n in 2usize..40,
            p in 0.05f64..0.6,
            seed in any::<u64>(),
            r in 0u32..5,
        ) {
            use crate::family::{FamilySpec, RandomParams};
            // Keep the density above the connectivity threshold so the
            // rejection-sampling generator always finds a connected graph.
            let p = p.max((2.5 * (n as f64).ln() / n as f64).min(0.9));
            let g = FamilySpec::Random(RandomParams { n, p, seed, ..RandomParams::default() })
                .generate(0)
                .unwrap();
            let back = MagneticGraph::from_json_str(&g.to_json_string()).unwrap();
            prop_assert_eq!(back.vertex_count(), g.vertex_count());
            prop_assert_eq!(back.edge_count(), g.edge_count());
            for x in g.vertices() {
                prop_assert_eq!(back.w(x), g.w(x));
                prop_assert_eq!(back.q(x), g.q(x));
                prop_assert_eq!(back.name(x), g.name(x));
            }
            for e in g.edge_ids() {
                prop_assert_eq!(back.a(e), g.a(e));
                prop_assert_eq!(back.sigma(e), g.sigma(e));
                prop_assert_eq!(back.edge(e).origin, g.edge(e).origin);
                prop_assert_eq!(back.edge(e).terminus, g.edge(e).terminus);
            }

            let inner = g.ball(g.root(), r);
            let outer = g.ball(g.root(), r + 1);
            prop_assert!(inner.vertices.iter().all(|&x| outer.contains(x)));
            let outer_interior: std::collections::BTreeSet<_> =
                outer.interior_edges.iter().copied().collect();
            prop_assert!(inner
                .interior_edges
                .iter()
                .all(|e| outer_interior.contains(e)));
            // Interior edges have both endpoints inside; incident edges at
            // least one.
            for &e in &inner.interior_edges {
                let d = g.edge(e);
                prop_assert!(inner.contains(d.origin) && inner.contains(d.terminus));
            }
            for &e in &inner.incident_edges {
                let d = g.edge(e);
                prop_assert!(inner.contains(d.origin) || inner.contains(d.terminus));
            }
        }
    }
}
