//! Bundled example games and topologies.
//!
//! The same objects are shipped as JSON files under `fixtures/` in the
//! crate root; `emit` reproduces those files byte-for-byte (see the tests),
//! and the CLI exposes them via `examples list` / `examples emit`.

use crate::channel::{Channel, Prior};
use crate::crowds::{CrowdsConfig, Topology};
use crate::error::{Error, Result};
use crate::game::LeakageGame;
use crate::vulnerability::VulnerabilityMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureKind {
    Game,
    Topology,
}

#[derive(Debug, Clone, Copy)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub kind: FixtureKind,
    pub description: &'static str,
}

pub const CATALOG: &[FixtureInfo] = &[
    FixtureInfo {
        name: "two_millionaires",
        kind: FixtureKind::Game,
        description: "comparison service with two programs; matching-pennies-like utility",
    },
    FixtureInfo {
        name: "binary_sum",
        kind: FixtureKind::Game,
        description: "xor service where every pure profile leaks fully but mixing halves it",
    },
    FixtureInfo {
        name: "crowds_star",
        kind: FixtureKind::Topology,
        description: "hub with three leaves; candidates at the hub and to the south",
    },
    FixtureInfo {
        name: "crowds_line3",
        kind: FixtureKind::Topology,
        description: "three nodes in a row; candidates beyond each endpoint",
    },
    FixtureInfo {
        name: "crowds_manet10",
        kind: FixtureKind::Topology,
        description: "ten nodes in a 700m square with three shared candidate locations",
    },
];

fn bit_channel(rows: [[f64; 2]; 2], outputs: [&str; 2]) -> Channel {
    Channel::new(
        rows.iter().map(|r| r.to_vec()).collect(),
        vec!["0", "1"],
        outputs.to_vec(),
    )
    .expect("fixture channel is valid")
}

/// Two defender programs compare the secret bit against the attacker's
/// chosen bit; one ordering reveals the secret, the other reveals nothing,
/// and which is which depends on the attacker's bit.
pub fn two_millionaires() -> LeakageGame {
    let outs = ["T", "F"];
    let c00 = bit_channel([[1.0, 0.0], [0.0, 1.0]], outs);
    let c01 = bit_channel([[1.0, 0.0], [1.0, 0.0]], outs);
    let c10 = bit_channel([[1.0, 0.0], [1.0, 0.0]], outs);
    let c11 = bit_channel([[0.0, 1.0], [1.0, 0.0]], outs);
    LeakageGame::new(
        vec!["0", "1"],
        vec!["0", "1"],
        vec![vec![c00, c01], vec![c10, c11]],
        Prior::uniform(vec!["0", "1"]).expect("two secrets"),
        VulnerabilityMeasure::Bayes,
    )
    .expect("fixture game is valid")
}

/// Both defender programs reveal the xor of the secret with a known bit, so
/// every pure profile leaks everything; only the defender's coin flip
/// between them hides the secret.
pub fn binary_sum() -> LeakageGame {
    let outs = ["0", "1"];
    let same = [[1.0, 0.0], [0.0, 1.0]];
    let flip = [[0.0, 1.0], [1.0, 0.0]];
    let c00 = bit_channel(same, outs);
    let c01 = bit_channel(flip, outs);
    let c10 = bit_channel(flip, outs);
    let c11 = bit_channel(same, outs);
    LeakageGame::new(
        vec!["0", "1"],
        vec!["0", "1"],
        vec![vec![c00, c01], vec![c10, c11]],
        Prior::uniform(vec!["0", "1"]).expect("two secrets"),
        VulnerabilityMeasure::Bayes,
    )
    .expect("fixture game is valid")
}

/// Hub-and-leaves network. Candidate 0 sits on the hub (in range of every
/// node), candidate 1 reaches only the hub.
pub fn star_topology() -> CrowdsConfig {
    CrowdsConfig::new(
        0.8,
        Topology {
            nodes: vec![(0.0, 0.0), (200.0, 0.0), (-200.0, 0.0), (0.0, 200.0)],
            comm_radius: 250.0,
            candidate_locations: vec![(0.0, 0.0), (0.0, -200.0)],
        },
    )
    .expect("fixture topology is valid")
}

/// Three nodes in a row; candidate 0 extends the line past one end,
/// candidate 1 past the other.
pub fn line3_topology() -> CrowdsConfig {
    CrowdsConfig::new(
        0.5,
        Topology {
            nodes: vec![(0.0, 0.0), (200.0, 0.0), (400.0, 0.0)],
            comm_radius: 250.0,
            candidate_locations: vec![(600.0, 0.0), (-200.0, 0.0)],
        },
    )
    .expect("fixture topology is valid")
}

/// Ten nodes spread over roughly 700m x 700m with 250m range, connected but
/// uneven, plus three candidate locations covering the lower, right, and
/// upper regions.
pub fn manet10_topology() -> CrowdsConfig {
    CrowdsConfig::new(
        0.8,
        Topology {
            nodes: vec![
                (100.0, 100.0),
                (300.0, 120.0),
                (500.0, 100.0),
                (150.0, 300.0),
                (350.0, 320.0),
                (550.0, 300.0),
                (220.0, 520.0),
                (430.0, 500.0),
                (600.0, 480.0),
                (520.0, 680.0),
            ],
            comm_radius: 250.0,
            candidate_locations: vec![(250.0, 200.0), (500.0, 400.0), (350.0, 600.0)],
        },
    )
    .expect("fixture topology is valid")
}

/// JSON form of a named fixture, exactly as shipped under `fixtures/`.
pub fn emit(name: &str) -> Result<serde_json::Value> {
    match name {
        "two_millionaires" => two_millionaires().to_json_value(),
        "binary_sum" => binary_sum().to_json_value(),
        "crowds_star" => Ok(serde_json::to_value(star_topology())?),
        "crowds_line3" => Ok(serde_json::to_value(line3_topology())?),
        "crowds_manet10" => Ok(serde_json::to_value(manet10_topology())?),
        other => Err(Error::InvalidGameFile(format!("unknown fixture `{other}`"))),
    }
}
