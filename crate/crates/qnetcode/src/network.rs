//! Network topologies, permutations of end-to-end demands, and traffic
//! accounting against edge capacities.
//!
//! Topologies are directed acyclic multigraphs with one designated
//! bottleneck edge. Builders are provided for the two-pair butterfly and
//! the generalized K-pair single-bottleneck network; arbitrary topologies
//! round-trip through JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Role of a node in an end-to-end communication demand. Sender/target
/// indices are 1-based pair labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeRole {
    Sender(usize),
    Target(usize),
    Internal,
}

/// A network node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub role: NodeRole,
}

/// What an edge carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    /// One unit moves one qubit.
    Qubit,
    /// One unit moves one classical bit.
    Bit,
}

/// A directed edge with an integer capacity in units of its kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub kind: EdgeKind,
    pub capacity: u32,
}

/// Serde mirror of [`Topology`]; semantic validation happens in
/// [`Topology::new`] after deserialization.
#[derive(Serialize, Deserialize)]
struct TopologyWire {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    bottleneck: usize,
}

/// A validated directed acyclic network with a designated bottleneck edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topology {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    bottleneck: usize,
}

impl Topology {
    /// Validates node-id uniqueness, edge endpoints, positive capacities,
    /// bottleneck index, and acyclicity.
    pub fn new(nodes: Vec<Node>, edges: Vec<Edge>, bottleneck: usize) -> Result<Self> {
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, node) in nodes.iter().enumerate() {
            if node.id.is_empty() {
                return Err(Error::BadTopology {
                    reason: format!("nodes[{i}]: empty node id"),
                });
            }
            if index.insert(node.id.as_str(), i).is_some() {
                return Err(Error::BadTopology {
                    reason: format!("nodes[{i}]: duplicate node id \"{}\"", node.id),
                });
            }
        }
        for (e, edge) in edges.iter().enumerate() {
            for endpoint in [&edge.from, &edge.to] {
                if !index.contains_key(endpoint.as_str()) {
                    return Err(Error::BadTopology {
                        reason: format!("edges[{e}]: unknown endpoint \"{endpoint}\""),
                    });
                }
            }
            if edge.from == edge.to {
                return Err(Error::BadTopology {
                    reason: format!("edges[{e}]: self-loop at \"{}\"", edge.from),
                });
            }
            if edge.capacity == 0 {
                return Err(Error::BadTopology {
                    reason: format!("edges[{e}]: capacity must be at least 1"),
                });
            }
        }
        if bottleneck >= edges.len() {
            return Err(Error::BadTopology {
                reason: format!(
                    "bottleneck index {bottleneck} out of range for {} edges",
                    edges.len()
                ),
            });
        }
        // Kahn's algorithm; if anything remains, a cycle exists and the
        // lexicographically smallest node on it is reported.
        let mut indegree = vec![0usize; nodes.len()];
        for edge in &edges {
            indegree[index[edge.to.as_str()]] += 1;
        }
        let mut ready: Vec<usize> = (0..nodes.len()).filter(|&i| indegree[i] == 0).collect();
        let mut removed = 0usize;
        while let Some(i) = ready.pop() {
            removed += 1;
            for edge in &edges {
                if edge.from == nodes[i].id {
                    let j = index[edge.to.as_str()];
                    indegree[j] -= 1;
                    if indegree[j] == 0 {
                        ready.push(j);
                    }
                }
            }
        }
        if removed != nodes.len() {
            let culprit = nodes
                .iter()
                .enumerate()
                .filter(|(i, _)| indegree[*i] > 0)
                .map(|(_, n)| n.id.as_str())
                .min()
                .unwrap_or("?");
            return Err(Error::BadTopology {
                reason: format!("cycle detected through node \"{culprit}\""),
            });
        }
        Ok(Self {
            nodes,
            edges,
            bottleneck,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Index into [`Topology::edges`] of the designated bottleneck.
    pub fn bottleneck(&self) -> usize {
        self.bottleneck
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Index of the first edge from `from` to `to`, if any.
    pub fn edge_between(&self, from: &str, to: &str) -> Option<usize> {
        self.edges
            .iter()
            .position(|e| e.from == from && e.to == to)
    }

    /// Parses and validates a topology from JSON.
    pub fn from_json(json: &str) -> Result<Self> {
        let wire: TopologyWire = serde_json::from_str(json)?;
        Self::new(wire.nodes, wire.edges, wire.bottleneck)
    }

    /// Serializes to pretty-printed JSON (stable field order).
    pub fn to_json(&self) -> String {
        let wire = TopologyWire {
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
            bottleneck: self.bottleneck,
        };
        serde_json::to_string_pretty(&wire).expect("topology serialization cannot fail")
    }
}

/// One usage entry in a traffic log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrafficRecord {
    /// Index into the topology's edge list.
    pub edge: usize,
    pub kind: EdgeKind,
    /// Units consumed (qubits or bits, matching `kind`).
    pub units: u32,
    /// Human-readable description of what moved.
    pub note: String,
}

/// Everything a protocol run sent, edge by edge.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrafficLog {
    pub records: Vec<TrafficRecord>,
}

impl TrafficLog {
    pub fn push(&mut self, edge: usize, kind: EdgeKind, units: u32, note: impl Into<String>) {
        self.records.push(TrafficRecord {
            edge,
            kind,
            units,
            note: note.into(),
        });
    }
}

/// A capacity violation found by [`validate_traffic`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub edge: usize,
    pub used: u64,
    pub capacity: u32,
}

/// Sums per-edge usage and reports every edge whose total exceeds its
/// capacity. Records whose kind disagrees with the edge kind are also
/// violations (reported with the summed usage).
pub fn validate_traffic(log: &TrafficLog, topology: &Topology) -> Vec<Violation> {
    let mut used = vec![0u64; topology.edges().len()];
    let mut kind_mismatch = vec![false; topology.edges().len()];
    for record in &log.records {
        if record.edge >= used.len() {
            continue; // out-of-range records counted against no edge
        }
        used[record.edge] += u64::from(record.units);
        if record.kind != topology.edges()[record.edge].kind {
            kind_mismatch[record.edge] = true;
        }
    }
    topology
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, e)| used[*i] > u64::from(e.capacity) || kind_mismatch[*i])
        .map(|(i, e)| Violation {
            edge: i,
            used: used[i],
            capacity: e.capacity,
        })
        .collect()
}

/// Total classical bits the log sends across the designated bottleneck.
pub fn bottleneck_usage(log: &TrafficLog, topology: &Topology) -> u64 {
    log.records
        .iter()
        .filter(|r| r.edge == topology.bottleneck() && r.kind == EdgeKind::Bit)
        .map(|r| u64::from(r.units))
        .sum()
}

fn node(id: &str, role: NodeRole) -> Node {
    Node {
        id: id.to_string(),
        role,
    }
}

fn edge(from: &str, to: &str, kind: EdgeKind, capacity: u32) -> Edge {
    Edge {
        from: from.to_string(),
        to: to.to_string(),
        kind,
        capacity,
    }
}

/// The classic two-pair butterfly: senders s1, s2 each demand delivery to
/// the crosswise target, all seven edges carry one classical bit, and the
/// middle edge n1 -> n2 is the bottleneck.
pub fn build_butterfly() -> Topology {
    butterfly_with_capacity(1)
}

/// Butterfly with a uniform edge capacity, used by protocols whose unit of
/// transfer needs more than one bit per edge (teleporting one qubit costs
/// two classical bits).
pub(crate) fn butterfly_with_capacity(capacity: u32) -> Topology {
    let nodes = vec![
        node("s1", NodeRole::Sender(1)),
        node("s2", NodeRole::Sender(2)),
        node("n1", NodeRole::Internal),
        node("n2", NodeRole::Internal),
        node("t1", NodeRole::Target(1)),
        node("t2", NodeRole::Target(2)),
    ];
    let edges = vec![
        edge("s1", "n1", EdgeKind::Bit, capacity),
        edge("s2", "n1", EdgeKind::Bit, capacity),
        edge("n1", "n2", EdgeKind::Bit, capacity), // bottleneck
        edge("n2", "t1", EdgeKind::Bit, capacity),
        edge("n2", "t2", EdgeKind::Bit, capacity),
        edge("s1", "t2", EdgeKind::Bit, capacity),
        edge("s2", "t1", EdgeKind::Bit, capacity),
    ];
    Topology::new(nodes, edges, 2).expect("butterfly construction is static")
}

/// A permutation of pair indices, stored 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Validates that `map` is a permutation of `0..map.len()`.
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let k = map.len();
        if k == 0 {
            return Err(Error::BadPermutation {
                reason: "permutation is empty".to_string(),
            });
        }
        let mut seen = vec![false; k];
        for &v in &map {
            if v >= k {
                return Err(Error::BadPermutation {
                    reason: format!("entry {v} out of range for {k} pairs"),
                });
            }
            if seen[v] {
                return Err(Error::BadPermutation {
                    reason: format!("entry {v} appears more than once"),
                });
            }
            seen[v] = true;
        }
        Ok(Self(map))
    }

    /// Identity on `k` pairs.
    pub fn identity(k: usize) -> Self {
        Self((0..k).collect())
    }

    /// The cycle `j -> j+1 (mod k)`.
    pub fn cyclic(k: usize) -> Self {
        Self((0..k).map(|j| (j + 1) % k).collect())
    }

    /// Parses `"2,3,1"`-style 1-based lists, or the names `identity`,
    /// `cyclic`, `swap` (swap requires k == 2).
    pub fn parse(text: &str, k: usize) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "identity" => return Ok(Self::identity(k)),
            "cyclic" => return Ok(Self::cyclic(k)),
            "swap" => {
                if k != 2 {
                    return Err(Error::BadPermutation {
                        reason: format!("swap is only defined for 2 pairs, got {k}"),
                    });
                }
                return Ok(Self::cyclic(2));
            }
            _ => {}
        }
        let entries: Vec<usize> = text
            .split(',')
            .map(|tok| {
                tok.trim().parse::<usize>().map_err(|_| Error::BadPermutation {
                    reason: format!("cannot parse entry \"{}\"", tok.trim()),
                })
            })
            .collect::<Result<_>>()?;
        if entries.len() != k {
            return Err(Error::BadPermutation {
                reason: format!("expected {k} entries, got {}", entries.len()),
            });
        }
        if entries.iter().any(|&v| v == 0) {
            return Err(Error::BadPermutation {
                reason: "entries are 1-based; 0 is not a valid pair label".to_string(),
            });
        }
        Self::new(entries.iter().map(|&v| v - 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Image of pair `j` (0-based).
    pub fn apply(&self, j: usize) -> usize {
        self.0[j]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(j, &v)| j == v)
    }

    /// True when no pair maps to itself.
    pub fn is_derangement(&self) -> bool {
        self.0.iter().enumerate().all(|(j, &v)| j != v)
    }

    /// Coded routing requires either the identity (plain parallel streams)
    /// or a derangement (every target needs a remote word). A permutation
    /// with some but not all fixed points leaves a pair that cannot be
    /// decoded from adjacent-sum codes; reject it, naming the first fixed
    /// point 1-based.
    pub fn check_coded_routable(&self) -> Result<()> {
        if self.is_identity() || self.is_derangement() {
            return Ok(());
        }
        let fixed = self
            .0
            .iter()
            .enumerate()
            .find(|(j, &v)| *j == v)
            .map(|(j, _)| j + 1)
            .expect("non-identity, non-derangement permutation has a fixed point");
        Err(Error::FixedPoint { index: fixed })
    }
}

/// The generalized K-pair single-bottleneck network.
///
/// Senders s1..sK each hold a message and are co-located with their
/// same-numbered target t1..tK. Every sender forwards its teleportation
/// word to relay `a`; `a` compresses the K words into 2(K-1) adjacent XOR
/// sums and sends them over the bottleneck to `b`, which broadcasts them to
/// every target. Each target also receives its co-located sender's word
/// over a zero-length side edge, plus the half of an entangled pair shared
/// with the sender whose message it must reconstruct (`perm`).
pub fn build_kpair(k: usize, perm: &Permutation) -> Result<Topology> {
    if k < 2 {
        return Err(Error::BadConfig {
            reason: format!("a coded network needs at least 2 pairs, got {k}"),
        });
    }
    if perm.len() != k {
        return Err(Error::BadPermutation {
            reason: format!("permutation has {} entries for {k} pairs", perm.len()),
        });
    }
    perm.check_coded_routable()?;
    let mut nodes = Vec::with_capacity(2 * k + 2);
    for i in 1..=k {
        nodes.push(node(&format!("s{i}"), NodeRole::Sender(i)));
    }
    nodes.push(node("a", NodeRole::Internal));
    nodes.push(node("b", NodeRole::Internal));
    for j in 1..=k {
        nodes.push(node(&format!("t{j}"), NodeRole::Target(j)));
    }
    let sum_bits = 2 * (k as u32 - 1);
    let mut edges = Vec::new();
    // Edges 0..k-1: sender words into the relay.
    for i in 1..=k {
        edges.push(edge(&format!("s{i}"), "a", EdgeKind::Bit, 2));
    }
    // Edge k: the bottleneck.
    edges.push(edge("a", "b", EdgeKind::Bit, sum_bits));
    // Edges k+1..2k: broadcast of the sums.
    for j in 1..=k {
        edges.push(edge("b", &format!("t{j}"), EdgeKind::Bit, sum_bits));
    }
    // Edges 2k+1..3k: co-located side channels.
    for j in 1..=k {
        edges.push(edge(&format!("s{j}"), &format!("t{j}"), EdgeKind::Bit, 2));
    }
    // Edges 3k+1..4k: pre-shared entanglement, one qubit per pair.
    for j in 1..=k {
        let src = perm.apply(j - 1) + 1;
        edges.push(edge(&format!("s{src}"), &format!("t{j}"), EdgeKind::Qubit, 1));
    }
    Topology::new(nodes, edges, k)
}
