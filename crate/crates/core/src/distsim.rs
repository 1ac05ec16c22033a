//! Message-level simulation of the flooding searches.
//!
//! Execution is a deterministic event queue. A transmission is a radio
//! broadcast: it counts once for the sender and produces one delivery per
//! awake neighbour. Deliveries of round `t` are processed in
//! `(sender id, send sequence, receiver id)` order and anything they
//! forward goes out in round `t + 1`. A run ends when the queue drains.
//! [`EventOrder::Shuffled`] permutes each round's deliveries with a seeded
//! RNG for sensitivity studies.

use std::fmt;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::danger::{node_path_exposure, PotentialModel};
use crate::field::{nearest_node, CommGraph, NodeId, Point};
use crate::nodeset::NodeSet;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("source {0} is asleep")]
    SleepingSource(NodeId),
    #[error("no awake node to host danger point ({x}, {y})")]
    NoHostForDanger { x: f64, y: f64 },
    #[error("parent pointers from {0} do not reach the source")]
    ParentCycle(NodeId),
}

/// The awake part of a communication graph.
#[derive(Debug, Clone, Copy)]
pub struct Subgraph<'a> {
    pub graph: &'a CommGraph,
    pub active: &'a NodeSet,
}

impl<'a> Subgraph<'a> {
    pub fn new(graph: &'a CommGraph, active: &'a NodeSet) -> Self {
        Subgraph { graph, active }
    }

    pub fn neighbors(&self, id: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.graph.neighbors(id).iter().copied().filter(|&j| self.active.contains(j))
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketKind {
    Search,
    ExposureSearch,
    PotentialFlood,
    WakeUp,
}

impl fmt::Display for PacketKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PacketKind::Search => "search",
            PacketKind::ExposureSearch => "exposure",
            PacketKind::PotentialFlood => "potential",
            PacketKind::WakeUp => "wakeup",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Packet {
    pub kind: PacketKind,
    /// Hops travelled when sent.
    pub hop_count: u32,
    pub exposure: f64,
    pub origin: NodeId,
    pub last: NodeId,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimNode {
    pub id: NodeId,
    pub awake: bool,
    pub potential: f64,
    pub distance: Option<u32>,
    /// `f64::INFINITY` until a search packet arrives.
    pub minexposure: f64,
    pub parent: Option<NodeId>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEvent {
    pub round: u32,
    pub sender: NodeId,
    pub receiver: NodeId,
    pub kind: PacketKind,
    /// Hop count for hop searches, accumulated exposure otherwise.
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EventOrder {
    #[default]
    Deterministic,
    Shuffled(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimOptions {
    pub order: EventOrder,
    pub trace: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimRun {
    pub kind: PacketKind,
    pub source: NodeId,
    pub nodes: Vec<SimNode>,
    pub transmissions: Vec<u32>,
    pub total_packets: u64,
    pub deliveries: u64,
    pub rounds: u32,
    pub converged: bool,
    pub trace: Vec<TraceEvent>,
}

impl SimRun {
    pub fn reached(&self) -> usize {
        self.nodes.iter().filter(|n| n.parent.is_some() || n.id == self.source).count()
    }

    pub fn max_transmissions(&self) -> u32 {
        self.transmissions.iter().copied().max().unwrap_or(0)
    }

    pub fn distances(&self) -> Vec<Option<u32>> {
        self.nodes.iter().map(|n| n.distance).collect()
    }

    pub fn minexposures(&self) -> Vec<f64> {
        self.nodes.iter().map(|n| n.minexposure).collect()
    }

    /// `round sender receiver kind value` per delivery.
    pub fn write_trace<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.trace {
            writeln!(out, "{} {} {} {} {}", e.round, e.sender, e.receiver, e.kind, e.value)?;
        }
        Ok(())
    }
}

/// Runs the queue until quiescence. `on_receive(nodes, receiver, packet)`
/// returns the packet to broadcast next round, if any.
fn simulate(
    sub: Subgraph<'_>,
    kind: PacketKind,
    source: NodeId,
    mut nodes: Vec<SimNode>,
    first: Packet,
    opts: SimOptions,
    mut on_receive: impl FnMut(&mut [SimNode], NodeId, &Packet) -> Option<Packet>,
) -> SimRun {
    let n = sub.n();
    let mut transmissions = vec![0u32; n];
    let mut deliveries = 0u64;
    let mut trace = Vec::new();
    let mut rng = match opts.order {
        EventOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        EventOrder::Deterministic => None,
    };

    // (sender, packet) broadcasts of the current round, in send order
    let mut outbox: Vec<(NodeId, Packet)> = vec![(source, first)];
    let mut round = 0u32;
    while !outbox.is_empty() {
        let mut sends = std::mem::take(&mut outbox);
        // stable: keeps per-sender send order
        sends.sort_by_key(|(s, _)| *s);
        let mut events: Vec<(NodeId, NodeId, Packet)> = Vec::new();
        for (sender, pkt) in &sends {
            transmissions[sender.index()] += 1;
            events.extend(sub.neighbors(*sender).map(|r| (*sender, r, *pkt)));
        }
        if let Some(rng) = rng.as_mut() {
            events.shuffle(rng);
        }
        for (sender, receiver, pkt) in events {
            deliveries += 1;
            if opts.trace {
                let value = match kind {
                    PacketKind::ExposureSearch => pkt.exposure,
                    _ => pkt.hop_count as f64,
                };
                trace.push(TraceEvent { round, sender, receiver, kind, value });
            }
            let arriving = Packet { hop_count: pkt.hop_count + 1, last: sender, ..pkt };
            if let Some(fwd) = on_receive(&mut nodes, receiver, &arriving) {
                outbox.push((receiver, fwd));
            }
        }
        round += 1;
    }
    let total_packets = transmissions.iter().map(|&t| t as u64).sum();
    SimRun { kind, source, nodes, transmissions, total_packets, deliveries, rounds: round, converged: true, trace }
}

fn initial_nodes(sub: Subgraph<'_>, potentials: Option<&[f64]>) -> Vec<SimNode> {
    (0..sub.n())
        .map(|i| {
            let id = NodeId::from(i);
            SimNode {
                id,
                awake: sub.active.contains(id),
                potential: potentials.map_or(0.0, |p| p[i]),
                distance: None,
                minexposure: f64::INFINITY,
                parent: None,
            }
        })
        .collect()
}

/// Hop-count flooding: a node keeps the first (smallest-hop) search packet
/// it hears and forwards it once; later packets are dropped.
pub fn run_bfs_flood(sub: Subgraph<'_>, source: NodeId, opts: SimOptions) -> Result<SimRun, SimError> {
    flood(sub, source, PacketKind::Search, opts)
}

fn flood(sub: Subgraph<'_>, source: NodeId, kind: PacketKind, opts: SimOptions) -> Result<SimRun, SimError> {
    if !sub.active.contains(source) {
        return Err(SimError::SleepingSource(source));
    }
    let mut nodes = initial_nodes(sub, None);
    nodes[source.index()].distance = Some(0);
    let first = Packet { kind, hop_count: 0, exposure: 0.0, origin: source, last: source };
    Ok(simulate(sub, kind, source, nodes, first, opts, |nodes, at, pkt| {
        let node = &mut nodes[at.index()];
        if node.distance.is_some_and(|d| d <= pkt.hop_count) {
            return None;
        }
        node.distance = Some(pkt.hop_count);
        node.parent = Some(pkt.last);
        Some(*pkt)
    }))
}

/// Minimum-exposure search: each arrival adds the receiver's potential and
/// is forwarded iff it strictly improves the stored minimum. The source
/// starts at its own potential.
pub fn run_min_exposure(sub: Subgraph<'_>, source: NodeId, potentials: &[f64], opts: SimOptions) -> Result<SimRun, SimError> {
    if !sub.active.contains(source) {
        return Err(SimError::SleepingSource(source));
    }
    let mut nodes = initial_nodes(sub, Some(potentials));
    let start = potentials[source.index()];
    nodes[source.index()].minexposure = start;
    nodes[source.index()].distance = Some(0);
    let kind = PacketKind::ExposureSearch;
    let first = Packet { kind, hop_count: 0, exposure: start, origin: source, last: source };
    Ok(simulate(sub, kind, source, nodes, first, opts, |nodes, at, pkt| {
        let node = &mut nodes[at.index()];
        let exposure = pkt.exposure + node.potential;
        if exposure < node.minexposure {
            node.minexposure = exposure;
            node.parent = Some(pkt.last);
            node.distance = Some(pkt.hop_count);
            Some(Packet { exposure, ..*pkt })
        } else {
            None
        }
    }))
}

/// Per-danger hop floods and the potentials they induce.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPhase {
    /// Host node of each danger point.
    pub sources: Vec<NodeId>,
    /// `distances[i][v]`: hops from source `i` to node `v`.
    pub distances: Vec<Vec<Option<u32>>>,
    pub potentials: Vec<f64>,
    /// Transmissions summed over all floods.
    pub run: SimRun,
}

/// One hop flood per danger point from the awake node nearest to it; each
/// node then sums `1 / max(hops, clamp)^beta` over the sources that reach it.
pub fn run_potential_phase(
    sub: Subgraph<'_>,
    dangers: &[Point],
    model: &PotentialModel,
    opts: SimOptions,
) -> Result<PotentialPhase, SimError> {
    let field = sub.graph.field();
    let mut sources = Vec::with_capacity(dangers.len());
    for p in dangers {
        let host = nearest_node(field, *p, |id| sub.active.contains(id)).map_err(|_| SimError::NoHostForDanger { x: p.x, y: p.y })?;
        sources.push(host);
    }

    let n = sub.n();
    let mut distances = Vec::with_capacity(sources.len());
    let mut potentials = vec![0.0; n];
    let mut transmissions = vec![0u32; n];
    let mut deliveries = 0;
    let mut rounds = 0;
    let mut trace = Vec::new();
    for &s in &sources {
        let run = flood(sub, s, PacketKind::PotentialFlood, opts)?;
        for (i, node) in run.nodes.iter().enumerate() {
            if let Some(d) = node.distance {
                potentials[i] += model.at_distance(d as f64);
            }
        }
        for (t, r) in transmissions.iter_mut().zip(&run.transmissions) {
            *t += r;
        }
        deliveries += run.deliveries;
        rounds = rounds.max(run.rounds);
        trace.extend(run.trace.iter().copied());
        distances.push(run.distances());
    }
    let mut nodes = initial_nodes(sub, Some(&potentials));
    // distances of the first flood, so `reached` means something
    if let Some(first) = distances.first() {
        for (node, d) in nodes.iter_mut().zip(first) {
            node.distance = *d;
            if d.is_some_and(|d| d > 0) {
                node.parent = Some(node.id);
            }
        }
    }
    let total_packets = transmissions.iter().map(|&t| t as u64).sum();
    let run = SimRun {
        kind: PacketKind::PotentialFlood,
        source: sources.first().copied().unwrap_or(NodeId(0)),
        nodes,
        transmissions,
        total_packets,
        deliveries,
        rounds,
        converged: true,
        trace,
    };
    Ok(PotentialPhase { sources, distances, potentials, run })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub nodes: Vec<NodeId>,
    pub hops: u32,
    pub geometric_length: f64,
    /// Sum of node potentials along the path (0 without potentials).
    pub exposure: f64,
    pub reachable: bool,
    /// Packets spent by the run that discovered the path.
    pub cost: u64,
}

/// Follows parent pointers from `destination` back to the source.
pub fn extract_path(run: &SimRun, graph: &CommGraph, destination: NodeId, potentials: Option<&[f64]>) -> Result<PathResult, SimError> {
    let dest = &run.nodes[destination.index()];
    let reached = destination == run.source || dest.parent.is_some();
    if !reached {
        return Ok(PathResult {
            nodes: Vec::new(),
            hops: 0,
            geometric_length: 0.0,
            exposure: 0.0,
            reachable: false,
            cost: run.total_packets,
        });
    }
    let mut path = vec![destination];
    let mut cur = destination;
    while cur != run.source {
        cur = run.nodes[cur.index()].parent.ok_or(SimError::ParentCycle(destination))?;
        path.push(cur);
        if path.len() > run.nodes.len() {
            return Err(SimError::ParentCycle(destination));
        }
    }
    path.reverse();
    let geometric_length = path.windows(2).map(|w| graph.position(w[0]).dist(graph.position(w[1]))).sum();
    let exposure = potentials.map_or(0.0, |p| node_path_exposure(p, &path).value());
    Ok(PathResult {
        hops: (path.len() - 1) as u32,
        nodes: path,
        geometric_length,
        exposure,
        reachable: true,
        cost: run.total_packets,
    })
}
