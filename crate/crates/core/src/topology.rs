//! Layered relay-network topologies.
//!
//! A network has `M + 1` nodes labeled `0..=M`, node 0 the source, arranged in
//! layers so that every edge goes from layer `k` to layer `k + 1`. Each edge
//! carries a complex gain. The topology also fixes the global precision
//! parameter `n` of the discrete interface: the largest floor-log2 of any
//! nonzero gain component, clamped below at 1.

use std::collections::BTreeSet;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::{Error, Result};

/// Default cap on cut enumeration: at most `2^20` cuts.
pub const DEFAULT_CUT_CAP_LOG2: u32 = 20;

/// A complex channel gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gain {
    pub re: f64,
    pub im: f64,
}

impl Gain {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    /// Gain scaled by `2^k` (exact in binary floating point).
    pub fn scaled_pow2(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        Self::new(self.re * f, self.im * f)
    }
}

/// The discrete interface's bits-per-real-component parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Precision(u32);

impl Precision {
    /// `n` must be at least 1 so the constellation is never empty.
    pub fn new(n: u32) -> Self {
        assert!(n >= 1, "precision must be at least 1");
        Self(n)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Bits per complex symbol: `2n`.
    pub fn tuple_bits(self) -> usize {
        2 * self.0 as usize
    }

    /// Size of the per-component alphabet: `2^n`.
    pub fn component_levels(self) -> u64 {
        1u64 << self.0
    }

    /// Size of the per-symbol tuple alphabet: `2^(2n)`.
    pub fn tuple_alphabet(self) -> usize {
        1usize << (2 * self.0)
    }
}

/// One directed edge with its gain.
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub gain: Gain,
}

/// A structural defect found by [`Topology::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Node 0 is not in layer 0, or layer 0 contains other nodes.
    SourceLayer,
    /// The destination set contains node 0.
    SourceIsDestination,
    /// The destination set is empty.
    NoDestinations,
    /// An edge skips layers or goes backwards.
    NonAdjacentLayers { from: usize, to: usize },
    /// Layer indices are not contiguous starting from 0.
    NonContiguousLayers,
    /// A non-source node on a source-to-destination path has no parent.
    OrphanPathNode { node: usize },
    /// An edge gain is non-finite.
    NonFiniteGain { from: usize, to: usize },
    /// A declared edge has both gain components zero.
    ZeroGain { from: usize, to: usize },
    /// Duplicate edge between the same node pair.
    DuplicateEdge { from: usize, to: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::SourceLayer => write!(f, "node 0 must be the unique node in layer 0"),
            Violation::SourceIsDestination => write!(f, "source is destination"),
            Violation::NoDestinations => write!(f, "destination set is empty"),
            Violation::NonAdjacentLayers { from, to } => {
                write!(f, "non-adjacent layers: edge {from}->{to}")
            }
            Violation::NonContiguousLayers => write!(f, "layer indices are not contiguous"),
            Violation::OrphanPathNode { node } => {
                write!(f, "node {node} lies on a source-destination path but has no parent")
            }
            Violation::NonFiniteGain { from, to } => {
                write!(f, "non-finite gain on edge {from}->{to}")
            }
            Violation::ZeroGain { from, to } => {
                write!(f, "edge {from}->{to} declared with zero gain")
            }
            Violation::DuplicateEdge { from, to } => {
                write!(f, "duplicate edge {from}->{to}")
            }
        }
    }
}

/// A layered relay-network topology.
#[derive(Debug, Clone)]
pub struct Topology {
    layer_of: Vec<u32>,
    edges: Vec<Edge>,
    destinations: BTreeSet<usize>,
    /// Parents of each node, sorted by parent id, with gains.
    parents: Vec<Vec<(usize, Gain)>>,
    /// Children of each node, sorted by child id.
    children: Vec<Vec<usize>>,
}

impl Topology {
    /// Build a topology from raw parts.
    ///
    /// Node ids must be the consecutive integers `0..node_count`; edge
    /// endpoints and destinations must be in range. Semantic invariants
    /// (layering, parents, gain values) are checked by [`validate`], not here.
    ///
    /// [`validate`]: Topology::validate
    pub fn new(
        layer_of: Vec<u32>,
        edges: Vec<Edge>,
        destinations: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let node_count = layer_of.len();
        if node_count == 0 {
            return Err(Error::Parse("topology has no nodes".into()));
        }
        let destinations: BTreeSet<usize> = destinations.into_iter().collect();
        for &d in &destinations {
            if d >= node_count {
                return Err(Error::Parse(format!("destination {d} out of range")));
            }
        }
        let mut parents = vec![Vec::new(); node_count];
        let mut children = vec![Vec::new(); node_count];
        for e in &edges {
            if e.from >= node_count || e.to >= node_count {
                return Err(Error::Parse(format!("edge {}->{} out of range", e.from, e.to)));
            }
            parents[e.to].push((e.from, e.gain));
            children[e.from].push(e.to);
        }
        for p in &mut parents {
            p.sort_by_key(|&(id, _)| id);
        }
        for c in &mut children {
            c.sort_unstable();
        }
        Ok(Self {
            layer_of,
            edges,
            destinations,
            parents,
            children,
        })
    }

    pub fn node_count(&self) -> usize {
        self.layer_of.len()
    }

    pub fn layer_of(&self, node: usize) -> u32 {
        self.layer_of[node]
    }

    /// Number of layers, i.e. `max layer + 1`.
    pub fn layer_count(&self) -> u32 {
        self.layer_of.iter().copied().max().unwrap_or(0) + 1
    }

    /// Nodes in layer `k`, ascending.
    pub fn nodes_in_layer(&self, k: u32) -> Vec<usize> {
        (0..self.node_count()).filter(|&v| self.layer_of[v] == k).collect()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Parents of `node` with their gains, sorted by parent id.
    pub fn parents(&self, node: usize) -> &[(usize, Gain)] {
        &self.parents[node]
    }

    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn destinations(&self) -> &BTreeSet<usize> {
        &self.destinations
    }

    /// The sole destination, if there is exactly one.
    pub fn single_destination(&self) -> Option<usize> {
        if self.destinations.len() == 1 {
            self.destinations.iter().next().copied()
        } else {
            None
        }
    }

    /// Gain of edge `from -> to`, if declared.
    pub fn gain(&self, from: usize, to: usize) -> Option<Gain> {
        self.parents[to]
            .iter()
            .find(|&&(p, _)| p == from)
            .map(|&(_, g)| g)
    }

    /// Nodes reachable from the source.
    fn reachable_from_source(&self) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &c in self.children(v) {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        seen
    }

    /// Nodes from which some destination is reachable.
    fn reaches_destination(&self) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack: Vec<usize> = self.destinations.iter().copied().collect();
        for &d in &self.destinations {
            seen[d] = true;
        }
        while let Some(v) = stack.pop() {
            for &(p, _) in self.parents(v) {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// Nodes lying on some source-to-destination path.
    pub fn on_path(&self) -> Vec<bool> {
        let fwd = self.reachable_from_source();
        let bwd = self.reaches_destination();
        fwd.iter().zip(&bwd).map(|(&a, &b)| a && b).collect()
    }

    /// Relay nodes that must carry a linear code: every non-source node on a
    /// source-to-destination path that has outgoing edges.
    pub fn coding_nodes(&self) -> Vec<usize> {
        let on_path = self.on_path();
        (1..self.node_count())
            .filter(|&v| on_path[v] && !self.children(v).is_empty())
            .collect()
    }

    /// Check every structural invariant; an empty report means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let layer0 = self.nodes_in_layer(0);
        if self.layer_of[0] != 0 || layer0 != [0] {
            out.push(Violation::SourceLayer);
        }
        if self.destinations.is_empty() {
            out.push(Violation::NoDestinations);
        }
        if self.destinations.contains(&0) {
            out.push(Violation::SourceIsDestination);
        }
        let max_layer = self.layer_count() - 1;
        for k in 0..=max_layer {
            if self.nodes_in_layer(k).is_empty() {
                out.push(Violation::NonContiguousLayers);
                break;
            }
        }
        let mut seen_pairs = BTreeSet::new();
        for e in &self.edges {
            if self.layer_of[e.to] != self.layer_of[e.from] + 1 {
                out.push(Violation::NonAdjacentLayers { from: e.from, to: e.to });
            }
            if !e.gain.is_finite() {
                out.push(Violation::NonFiniteGain { from: e.from, to: e.to });
            } else if e.gain.is_zero() {
                out.push(Violation::ZeroGain { from: e.from, to: e.to });
            }
            if !seen_pairs.insert((e.from, e.to)) {
                out.push(Violation::DuplicateEdge { from: e.from, to: e.to });
            }
        }
        let on_path = self.on_path();
        for v in 1..self.node_count() {
            if on_path[v] && self.parents(v).is_empty() {
                out.push(Violation::OrphanPathNode { node: v });
            }
        }
        out
    }

    /// The same topology with every gain scaled by `2^k`.
    pub fn scaled_gains_pow2(&self, k: i32) -> Self {
        let mut t = self.clone();
        for e in &mut t.edges {
            e.gain = e.gain.scaled_pow2(k);
        }
        for p in &mut t.parents {
            for entry in p.iter_mut() {
                entry.1 = entry.1.scaled_pow2(k);
            }
        }
        t
    }

    /// Load from a TOML topology file. See the repository README for the schema.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Parse(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_toml_str(&text)
    }

    /// Parse the TOML topology document. Unknown fields are rejected.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: TopologyFile =
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let node_count = file.nodes.len();
        let mut layer_of = vec![u32::MAX; node_count];
        for n in &file.nodes {
            if n.id >= node_count {
                return Err(Error::Parse(format!(
                    "node ids must be consecutive 0..{node_count}, got {}",
                    n.id
                )));
            }
            if layer_of[n.id] != u32::MAX {
                return Err(Error::Parse(format!("duplicate node id {}", n.id)));
            }
            layer_of[n.id] = n.layer;
        }
        let edges = file
            .edges
            .iter()
            .map(|e| Edge {
                from: e.from,
                to: e.to,
                gain: Gain::new(e.re, e.im),
            })
            .collect();
        Topology::new(layer_of, edges, file.destinations)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyFile {
    nodes: Vec<TomlNode>,
    edges: Vec<TomlEdge>,
    destinations: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TomlNode {
    id: usize,
    layer: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TomlEdge {
    from: usize,
    to: usize,
    re: f64,
    im: f64,
}

/// Exact `floor(log2(x))` for finite `x > 0`.
///
/// `f64::log2` can land on the wrong side of an integer boundary; correct the
/// estimate with exact power-of-two comparisons.
pub fn floor_log2(x: f64) -> i32 {
    debug_assert!(x > 0.0 && x.is_finite());
    let mut e = x.log2().floor() as i32;
    while 2f64.powi(e + 1) <= x {
        e += 1;
    }
    while 2f64.powi(e) > x {
        e -= 1;
    }
    e
}

/// The discrete interface's precision: the maximum of `floor(log2 |g|)` over
/// all nonzero gain components of all edges, clamped below at 1.
///
/// Zero components are skipped (their floor-log is -inf, never the max). A
/// raw value below 1 (all components of magnitude < 2) is clamped to 1 so the
/// discrete alphabet is never empty.
pub fn compute_precision(topology: &Topology) -> Result<Precision> {
    if topology.edges().is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let mut best: Option<i32> = None;
    for e in topology.edges() {
        if !e.gain.is_finite() {
            return Err(Error::NonFiniteGain { from: e.from, to: e.to });
        }
        for comp in [e.gain.re, e.gain.im] {
            let mag = comp.abs();
            if mag > 0.0 {
                let l = floor_log2(mag);
                best = Some(best.map_or(l, |b| b.max(l)));
            }
        }
    }
    let raw = best.unwrap_or(1);
    Ok(Precision::new(raw.max(1) as u32))
}

/// A source-side cut: the node set `omega` contains the source and excludes
/// the destination it separates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cut {
    /// Bitmask over node ids; bit `v` set means node `v` is on the source side.
    pub omega: u64,
    /// The destination this cut separates from the source.
    pub destination: usize,
}

impl Cut {
    pub fn contains(&self, node: usize) -> bool {
        self.omega >> node & 1 == 1
    }

    /// Nodes on the source side, ascending.
    pub fn omega_nodes(&self, node_count: usize) -> Vec<usize> {
        (0..node_count).filter(|&v| self.contains(v)).collect()
    }

    /// Nodes on the destination side, ascending.
    pub fn complement_nodes(&self, node_count: usize) -> Vec<usize> {
        (0..node_count).filter(|&v| !self.contains(v)).collect()
    }
}

/// Enumerate all cuts separating the source from `destination`.
///
/// Every subset of the remaining `M - 1` nodes may sit on either side, giving
/// `2^(M-1)` cuts in lexicographic bitmask order. Errors with
/// [`Error::CutExplosion`] when that count exceeds `2^cap_log2`.
pub fn enumerate_cuts(
    topology: &Topology,
    destination: usize,
    cap_log2: u32,
) -> Result<Vec<Cut>> {
    let node_count = topology.node_count();
    assert!(destination < node_count && destination != 0);
    let free: Vec<usize> = (1..node_count).filter(|&v| v != destination).collect();
    let f = free.len() as u32;
    if f > cap_log2 {
        return Err(Error::CutExplosion { free_nodes: f, cap_log2 });
    }
    let mut cuts = Vec::with_capacity(1usize << f);
    for mask in 0u64..(1u64 << f) {
        let mut omega = 1u64; // source
        for (i, &v) in free.iter().enumerate() {
            if mask >> i & 1 == 1 {
                omega |= 1 << v;
            }
        }
        cuts.push(Cut { omega, destination });
    }
    Ok(cuts)
}
