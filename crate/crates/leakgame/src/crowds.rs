//! Leakage games for the Crowds protocol on a proximity network.
//!
//! Nodes at fixed positions communicate within a radius. A message
//! originates at an honest initiator, who forwards it to a uniformly random
//! neighbor; every honest node that receives it keeps forwarding with
//! probability `p_f` (again to a uniform neighbor) and otherwise delivers it
//! externally. The attacker has placed one corrupted node: the first honest
//! node observed forwarding into it is "detected", everything else ends
//! "undetected". The defender may place one deliverer node, which silently
//! delivers anything sent to it, never initiates, and never forwards.
//!
//! Detection probabilities are computed exactly by solving the linear
//! system of the induced absorbing chain; no simulation is involved (a
//! Monte-Carlo simulator is provided separately as a test oracle).

use std::path::Path;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::channel::{Channel, Prior};
use crate::error::{Error, Result};
use crate::game::LeakageGame;
use crate::vulnerability::VulnerabilityMeasure;

pub type Position = (f64, f64);

/// Node positions, communication radius, and the candidate locations where
/// either player may place a new node.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub nodes: Vec<Position>,
    pub comm_radius: f64,
    pub candidate_locations: Vec<Position>,
}

/// Forwarding parameter plus topology; everything a channel needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TopologyRepr", into = "TopologyRepr")]
pub struct CrowdsConfig {
    pub p_f: f64,
    pub topology: Topology,
}

/// File form: `{"nodes": [[x,y],..], "radius": r, "candidates": [[x,y],..], "p_f": p}`.
#[derive(Serialize, Deserialize)]
struct TopologyRepr {
    nodes: Vec<Position>,
    radius: f64,
    candidates: Vec<Position>,
    p_f: f64,
}

impl TryFrom<TopologyRepr> for CrowdsConfig {
    type Error = Error;

    fn try_from(repr: TopologyRepr) -> Result<Self> {
        let config = CrowdsConfig {
            p_f: repr.p_f,
            topology: Topology {
                nodes: repr.nodes,
                comm_radius: repr.radius,
                candidate_locations: repr.candidates,
            },
        };
        config.validate()?;
        Ok(config)
    }
}

impl From<CrowdsConfig> for TopologyRepr {
    fn from(config: CrowdsConfig) -> Self {
        TopologyRepr {
            nodes: config.topology.nodes,
            radius: config.topology.comm_radius,
            candidates: config.topology.candidate_locations,
            p_f: config.p_f,
        }
    }
}

impl CrowdsConfig {
    pub fn new(p_f: f64, topology: Topology) -> Result<Self> {
        let config = Self { p_f, topology };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_f > 0.0 && self.p_f < 1.0) {
            return Err(Error::InvalidTopology(format!(
                "forwarding probability must be in (0,1), got {}",
                self.p_f
            )));
        }
        if !(self.topology.comm_radius > 0.0) {
            return Err(Error::InvalidTopology(format!(
                "communication radius must be positive, got {}",
                self.topology.comm_radius
            )));
        }
        if self.topology.nodes.is_empty() {
            return Err(Error::InvalidTopology("empty node list".into()));
        }
        let finite = |(x, y): &Position| x.is_finite() && y.is_finite();
        if !self.topology.nodes.iter().all(finite)
            || !self.topology.candidate_locations.iter().all(finite)
        {
            return Err(Error::InvalidTopology("non-finite position".into()));
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let value = serde_json::to_value(self.clone())?;
        std::fs::write(path, format!("{:#}\n", value))?;
        Ok(())
    }

    pub fn node_label(&self, i: usize) -> String {
        format!("n{i}")
    }
}

fn adjacency_of(points: &[Position], radius: f64) -> Vec<Vec<usize>> {
    let r2 = radius * radius;
    let n = points.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = points[i].0 - points[j].0;
            let dy = points[i].1 - points[j].1;
            // Ties at exactly the radius count as connected.
            if dx * dx + dy * dy <= r2 {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    adj
}

/// Neighbor sets of the base nodes: `i` and `j` are adjacent iff their
/// Euclidean distance is at most the communication radius. No self-loops.
pub fn build_adjacency(topology: &Topology) -> Vec<Vec<usize>> {
    adjacency_of(&topology.nodes, topology.comm_radius)
}

/// Solves `A X = B` for the square matrix `X` by Gaussian elimination with
/// partial pivoting. `B` columns are independent right-hand sides.
fn solve_linear_system(mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() < 1e-12 {
            return Err(Error::SingularSystem);
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..n {
                    let delta = factor * a[col][k];
                    a[row][k] -= delta;
                }
                for k in 0..n {
                    let delta = factor * b[col][k];
                    b[row][k] -= delta;
                }
            }
        }
    }
    for row in 0..n {
        let d = a[row][row];
        for v in &mut b[row] {
            *v /= d;
        }
    }
    Ok(b)
}

/// Everything the exact computation and the simulator share: the full point
/// set (base nodes, then corrupted, then the optional deliverer) and its
/// adjacency.
struct PlacedNetwork {
    adjacency: Vec<Vec<usize>>,
    num_honest: usize,
    corrupted: usize,
    deliverer: Option<usize>,
}

fn place_nodes(
    config: &CrowdsConfig,
    corrupted_location: usize,
    deliverer_location: Option<usize>,
) -> Result<PlacedNetwork> {
    config.validate()?;
    let candidates = &config.topology.candidate_locations;
    let check = |idx: usize| -> Result<Position> {
        candidates.get(idx).copied().ok_or_else(|| {
            Error::InvalidTopology(format!(
                "candidate index {idx} out of range ({} available)",
                candidates.len()
            ))
        })
    };
    let mut points = config.topology.nodes.clone();
    let num_honest = points.len();
    let corrupted = points.len();
    points.push(check(corrupted_location)?);
    let deliverer = match deliverer_location {
        Some(idx) => {
            points.push(check(idx)?);
            Some(corrupted + 1)
        }
        None => None,
    };
    let adjacency = adjacency_of(&points, config.topology.comm_radius);
    for x in 0..num_honest {
        if adjacency[x].is_empty() {
            return Err(Error::IsolatedInitiator(config.node_label(x)));
        }
    }
    Ok(PlacedNetwork {
        adjacency,
        num_honest,
        corrupted,
        deliverer,
    })
}

fn output_labels(config: &CrowdsConfig) -> Vec<String> {
    let mut labels: Vec<String> = (0..config.topology.nodes.len())
        .map(|k| format!("det@{}", config.node_label(k)))
        .collect();
    labels.push("undetected".into());
    labels
}

/// Exact detection channel for one placement of the corrupted node and, if
/// any, the deliverer node.
///
/// Inputs are the honest initiators; outputs are `det@<node>` for every
/// honest node plus `undetected`. Both players' new nodes join the
/// neighbor-selection pool of whoever is in range, including on the
/// initiator's first hop. The corrupted and deliverer nodes never initiate.
pub fn crowds_channel(
    config: &CrowdsConfig,
    corrupted_location: usize,
    deliverer_location: Option<usize>,
) -> Result<Channel> {
    let net = place_nodes(config, corrupted_location, deliverer_location)?;
    let h = net.num_honest;
    let p_f = config.p_f;
    let degree: Vec<f64> = (0..h).map(|u| net.adjacency[u].len() as f64).collect();
    let direct: Vec<bool> = (0..h)
        .map(|u| net.adjacency[u].contains(&net.corrupted))
        .collect();

    // Absorption probabilities X[u][k] = P(detected at k | forwarder u),
    // from (deg(u) I - p_f A_hh) X = p_f E with E the direct-hit indicator.
    let mut a = vec![vec![0.0; h]; h];
    let mut b = vec![vec![0.0; h]; h];
    for u in 0..h {
        a[u][u] = degree[u];
        for &w in &net.adjacency[u] {
            if w < h {
                a[u][w] -= p_f;
            }
        }
        if direct[u] {
            b[u][u] = p_f;
        }
    }
    let absorption = solve_linear_system(a, b)?;

    let mut rows = Vec::with_capacity(h);
    for x in 0..h {
        let mut row = vec![0.0; h + 1];
        for k in 0..h {
            let mut mass = if direct[x] && x == k { 1.0 } else { 0.0 };
            for &v in &net.adjacency[x] {
                if v < h {
                    mass += absorption[v][k];
                }
            }
            row[k] = mass / degree[x];
        }
        let detected: f64 = row[..h].iter().sum();
        row[h] = (1.0 - detected).max(0.0);
        rows.push(row);
    }

    let inputs: Vec<String> = (0..h).map(|x| config.node_label(x)).collect();
    Channel::new(rows, inputs, output_labels(config))
}

/// Builds the placement game: defender actions are deliverer locations,
/// attacker actions are corrupted-node locations (both as indices into the
/// shared candidate list), the prior is uniform over the honest initiators,
/// and utility is Bayes posterior vulnerability.
pub fn case_study_game(
    config: &CrowdsConfig,
    attacker_candidates: &[usize],
    defender_candidates: &[usize],
) -> Result<LeakageGame> {
    if attacker_candidates.is_empty() || defender_candidates.is_empty() {
        return Err(Error::InvalidTopology("empty candidate list".into()));
    }
    let channels = defender_candidates
        .iter()
        .map(|&d| {
            attacker_candidates
                .iter()
                .map(|&a| crowds_channel(config, a, Some(d)))
                .collect::<Result<Vec<Channel>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let secrets: Vec<String> = (0..config.topology.nodes.len())
        .map(|x| config.node_label(x))
        .collect();
    LeakageGame::new(
        defender_candidates.iter().map(|d| format!("c{d}")).collect(),
        attacker_candidates.iter().map(|a| format!("c{a}")).collect(),
        channels,
        Prior::uniform(secrets)?,
        VulnerabilityMeasure::Bayes,
    )
}

/// Monte-Carlo estimate of [`crowds_channel`]: `runs_per_initiator`
/// simulated protocol runs per secret, mirroring the forwarding process
/// step by step. Test oracle for the exact computation.
pub fn simulate_channel(
    config: &CrowdsConfig,
    corrupted_location: usize,
    deliverer_location: Option<usize>,
    runs_per_initiator: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let net = place_nodes(config, corrupted_location, deliverer_location)?;
    let h = net.num_honest;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(h);
    for x in 0..h {
        let mut counts = vec![0u64; h + 1];
        for _ in 0..runs_per_initiator {
            let mut sender = x;
            let outcome = loop {
                let neighbors = &net.adjacency[sender];
                let target = neighbors[rng.gen_range(0..neighbors.len())];
                if target == net.corrupted {
                    break sender;
                }
                if Some(target) == net.deliverer {
                    break h;
                }
                if rng.gen_range(0.0..1.0) >= config.p_f {
                    break h;
                }
                sender = target;
            };
            counts[outcome] += 1;
        }
        rows.push(
            counts
                .into_iter()
                .map(|c| c as f64 / runs_per_initiator as f64)
                .collect(),
        );
    }
    Ok(rows)
}
