//! Weighted path metric, metric balls, and the two cut-off families.
//!
//! Every edge carries the length `sqrt(min(w(o), w(t)) / a(e))`; the distance
//! `d_{w,a}` between vertices is the infimum of summed edge lengths over
//! paths.  This is the natural metric in which the energy estimates of the
//! diagnostics are one-Lipschitz.
//!
//! Two cut-off families are provided:
//!
//! * the hop-based ramp `phi_n`, equal to 1 on the combinatorial ball of
//!   radius `n`, sloping to 0 at radius `2n` with per-edge increments of at
//!   most `1/n` (held exactly — values are integer multiples of `1/n`);
//! * the metric ramp `psi_R`, the distance to the complement of the metric
//!   ball `U_{R+1}` capped at 1, which is 1 on `U_R`, supported in `U_{R+1}`,
//!   and one-Lipschitz for `d_{w,a}`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::fields::VertexField;
use crate::graph::{EdgeId, MagneticGraph, VertexId};

/// Two truncations must reproduce a profile row's distances this closely
/// before the row counts as stabilized.
pub const STABILIZATION_TOLERANCE: f64 = 1e-9;

/// Length of a stored edge: `sqrt(min(w(o), w(t)) / a)`.
pub fn edge_length(g: &MagneticGraph, e: EdgeId) -> f64 {
    let d = g.edge(e);
    (g.w(d.origin).min(g.w(d.terminus)) / d.a).sqrt()
}

#[derive(Copy, Clone, PartialEq)]
struct HeapKey {
    dist: f64,
    vertex: u32,
}

impl Eq for HeapKey {}

impl Ord for HeapKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist
            .total_cmp(&other.dist)
            .then(self.vertex.cmp(&other.vertex))
    }
}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest `d_{w,a}` distance from every vertex to the nearest source.
/// Vertices unreachable from the sources (or an empty source set) come back
/// as infinity.
pub fn dist_from_set(g: &MagneticGraph, sources: &[VertexId]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; g.vertex_count()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if dist[s.idx()] > 0.0 {
            dist[s.idx()] = 0.0;
            heap.push(Reverse(HeapKey { dist: 0.0, vertex: s.0 }));
        }
    }
    while let Some(Reverse(HeapKey { dist: d, vertex })) = heap.pop() {
        let x = VertexId(vertex);
        if d > dist[x.idx()] {
            continue;
        }
        for h in g.incident(x) {
            let candidate = d + edge_length(g, h.edge);
            if candidate < dist[h.neighbor.idx()] {
                dist[h.neighbor.idx()] = candidate;
                heap.push(Reverse(HeapKey { dist: candidate, vertex: h.neighbor.0 }));
            }
        }
    }
    dist
}

/// Distances from a single vertex.
pub fn dist_from(g: &MagneticGraph, x0: VertexId) -> Vec<f64> {
    dist_from_set(g, &[x0])
}

/// Distance between two vertices.
pub fn dist(g: &MagneticGraph, from: VertexId, to: VertexId) -> f64 {
    dist_from(g, from)[to.idx()]
}

/// Vertices within metric distance `radius` of `x0`, ascending by index.
pub fn metric_ball(g: &MagneticGraph, x0: VertexId, radius: f64) -> Vec<VertexId> {
    dist_from(g, x0)
        .iter()
        .enumerate()
        .filter(|&(_, d)| *d <= radius)
        .map(|(i, _)| VertexId(i as u32))
        .collect()
}

// ---------------------------------------------------------------------------
// Hop-based cut-off family
// ---------------------------------------------------------------------------

/// The ramp `phi_n(x) = clamp((2n - hop(x)) / n, 0, 1)` around a center.
///
/// Values are `numerator / n` with integer numerators in `0..=n`, so the
/// family's structural properties (plateau, support, slope bound `1/n`) can
/// be checked in integer arithmetic, immune to rounding.
#[derive(Debug, Clone)]
pub struct PhiCutoff {
    n: u32,
    center: VertexId,
    numerators: Vec<u32>,
}

/// Builds `phi_n` around `x0`; requires `n >= 1`.
pub fn phi_cutoff(g: &MagneticGraph, x0: VertexId, n: u32) -> Result<PhiCutoff> {
    if n == 0 {
        return Err(Error::InvalidParams("cut-off index n must be at least 1".into()));
    }
    let radii = g.bfs_radii(x0);
    let numerators = radii
        .iter()
        .map(|&r| (2 * n as i64 - r as i64).clamp(0, n as i64) as u32)
        .collect();
    Ok(PhiCutoff { n, center: x0, numerators })
}

impl PhiCutoff {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn center(&self) -> VertexId {
        self.center
    }

    /// Exact integer numerator of the value at `x` (value = numerator / n).
    pub fn numerator(&self, x: VertexId) -> u32 {
        self.numerators[x.idx()]
    }

    pub fn value(&self, x: VertexId) -> f64 {
        self.numerators[x.idx()] as f64 / self.n as f64
    }

    /// The cut-off as a complex vertex field (zeros omitted).
    pub fn to_field(&self) -> VertexField {
        let mut out = VertexField::new();
        for (i, &k) in self.numerators.iter().enumerate() {
            if k > 0 {
                out.set(
                    VertexId(i as u32),
                    Complex64::new(k as f64 / self.n as f64, 0.0),
                );
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Metric cut-off family
// ---------------------------------------------------------------------------

/// The metric ramp `psi_R(x) = min(1, d_{w,a}(x, V \ U_{R+1}))` where `U_s`
/// is the metric ball of radius `s` around the center.
#[derive(Debug, Clone)]
pub struct PsiCutoff {
    radius: f64,
    center: VertexId,
    values: Vec<f64>,
    dist_from_center: Vec<f64>,
    exterior: Vec<VertexId>,
}

/// Builds `psi_R` around `x0`.  Fails with [`Error::TruncationTooSmall`] when
/// the graph holds no vertex beyond metric distance `R + 1`, because the
/// complement of `U_{R+1}` is then invisible and the ramp undefined.
pub fn psi_cutoff(g: &MagneticGraph, x0: VertexId, radius: f64) -> Result<PsiCutoff> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "cut-off radius must be positive and finite, got {radius}"
        )));
    }
    let dist_from_center = dist_from(g, x0);
    let exterior: Vec<VertexId> = dist_from_center
        .iter()
        .enumerate()
        .filter(|&(_, d)| *d > radius + 1.0)
        .map(|(i, _)| VertexId(i as u32))
        .collect();
    if exterior.is_empty() {
        return Err(Error::TruncationTooSmall(format!(
            "no vertex lies beyond metric distance {} of {}; enlarge the truncation",
            radius + 1.0,
            g.name(x0)
        )));
    }
    let values = dist_from_set(g, &exterior)
        .into_iter()
        .map(|d| d.min(1.0))
        .collect();
    Ok(PsiCutoff { radius, center: x0, values, dist_from_center, exterior })
}

impl PsiCutoff {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> VertexId {
        self.center
    }

    pub fn value(&self, x: VertexId) -> f64 {
        self.values[x.idx()]
    }

    /// Distance of `x` from the center in `d_{w,a}`.
    pub fn center_distance(&self, x: VertexId) -> f64 {
        self.dist_from_center[x.idx()]
    }

    /// Whether `x` lies in the inner ball `U_R`.
    pub fn in_inner_ball(&self, x: VertexId) -> bool {
        self.dist_from_center[x.idx()] <= self.radius
    }

    /// Whether `x` lies in the outer ball `U_{R+1}`.
    pub fn in_outer_ball(&self, x: VertexId) -> bool {
        self.dist_from_center[x.idx()] <= self.radius + 1.0
    }

    /// The vertices standing in for the complement of `U_{R+1}`.
    pub fn exterior(&self) -> &[VertexId] {
        &self.exterior
    }

    pub fn to_field(&self) -> VertexField {
        let mut out = VertexField::new();
        for (i, &v) in self.values.iter().enumerate() {
            if v != 0.0 {
                out.set(VertexId(i as u32), Complex64::new(v, 0.0));
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Completeness profile
// ---------------------------------------------------------------------------

/// One hop-sphere of the metric growth profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileRow {
    /// Combinatorial distance from the root.
    pub n: u32,
    /// Smallest metric distance to the root over the sphere.
    pub min_dist: f64,
    /// Largest metric distance to the root over the sphere.
    pub max_dist: f64,
    /// True when a strictly larger truncation reproduces both figures,
    /// so the row is insensitive to where the graph was cut.
    pub stabilized: bool,
}

/// How far the metric grows along hop-spheres of a family.
///
/// A profile whose `min_dist` keeps climbing past every bound witnesses
/// metric completeness of the infinite family; a bounded one suggests the
/// metric stays finite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricProfile {
    pub family: String,
    pub margin: u32,
    pub rows: Vec<ProfileRow>,
}

impl MetricProfile {
    /// Metric distance reached at the outermost profiled sphere.
    pub fn final_min_dist(&self) -> f64 {
        self.rows.last().map(|r| r.min_dist).unwrap_or(0.0)
    }

    /// Whether every row survived the enlarged-truncation comparison.
    pub fn fully_stabilized(&self) -> bool {
        self.rows.iter().all(|r| r.stabilized)
    }
}

fn sphere_extrema(
    g: &MagneticGraph,
    radii: &[u32],
    dist: &[f64],
    n: u32,
) -> Option<(f64, f64, VertexId)> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut witness = None;
    for (i, &r) in radii.iter().enumerate() {
        if r == n {
            let d = dist[i];
            if d < min {
                min = d;
                witness = Some(VertexId(i as u32));
            }
            if d > max {
                max = d;
            }
        }
    }
    let _ = g;
    witness.map(|w| (min, max, w))
}

/// Profiles metric growth of `family` out to hop distance `max_n`.
///
/// Infinite families are realized twice — truncated at `max_n + margin` and
/// at `max_n + margin + 2` hops — and a row is marked stabilized when both
/// truncations agree to within [`STABILIZATION_TOLERANCE`].  Distances
/// measured on a truncation can only overestimate the infinite graph's
/// (cutting a graph removes paths), so stabilized rows are trustworthy and
/// unstabilized ones are flagged rather than silently reported.
pub fn completeness_profile(
    family: &FamilySpec,
    max_n: u32,
    margin: u32,
) -> Result<MetricProfile> {
    if family.is_infinite() {
        let g = family.generate(max_n + margin)?;
        let g_big = family.generate(max_n + margin + 2)?;
        let radii = g.bfs_radii(g.root());
        let dist = dist_from(&g, g.root());
        let radii_big = g_big.bfs_radii(g_big.root());
        let dist_big = dist_from(&g_big, g_big.root());
        let mut rows = Vec::new();
        for n in 1..=max_n {
            let (min_d, max_d, _) = sphere_extrema(&g, &radii, &dist, n)
                .ok_or_else(|| Error::InvalidParams(format!("no vertices at hop distance {n}")))?;
            let stabilized = match sphere_extrema(&g_big, &radii_big, &dist_big, n) {
                Some((min_b, max_b, _)) => {
                    (min_d - min_b).abs() <= STABILIZATION_TOLERANCE
                        && (max_d - max_b).abs() <= STABILIZATION_TOLERANCE
                }
                None => false,
            };
            rows.push(ProfileRow { n, min_dist: min_d, max_dist: max_d, stabilized });
        }
        Ok(MetricProfile { family: family.name().to_string(), margin, rows })
    } else {
        // Finite families: the graph is the whole object, nothing is cut off.
        let g = family.generate(max_n)?;
        let root = g.root();
        Ok(profile_graph(&g, root, max_n, family.name(), margin))
    }
}

/// Profiles metric growth of a complete (untruncated) graph around `x0`.
/// Every row is stabilized by definition: no part of the graph is missing.
pub fn profile_graph(
    g: &MagneticGraph,
    x0: VertexId,
    max_n: u32,
    label: &str,
    margin: u32,
) -> MetricProfile {
    let radii = g.bfs_radii(x0);
    let dist = dist_from(g, x0);
    let reach = radii.iter().copied().max().unwrap_or(0);
    let mut rows = Vec::new();
    for n in 1..=reach.min(max_n) {
        if let Some((min_d, max_d, _)) = sphere_extrema(g, &radii, &dist, n) {
            rows.push(ProfileRow { n, min_dist: min_d, max_dist: max_d, stabilized: true });
        }
    }
    MetricProfile { family: label.to_string(), margin, rows }
}
