//! Leakage games: a channel per pure strategy profile, scored by posterior
//! vulnerability.
//!
//! The utility of a pure profile `(d, a)` is the posterior vulnerability of
//! its channel. Under mixed strategies the attacker knows his own action but
//! not the defender's, so for each attacker action he faces the convex
//! combination of the defender's channels; the utility averages the
//! vulnerability of those combinations over the attacker's distribution.
//! That makes the utility affine in the attacker's strategy but convex (not
//! affine) in the defender's, which is the whole point of the model.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{check_distribution, compose_convex, pad_compatible, Channel, Prior};
use crate::error::{Error, Result};
use crate::vulnerability::{posterior_vulnerability, MeasureSpec, VulnerabilityMeasure};

/// Probability distribution over an action list, indexed positionally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Self::new(probs)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(s: MixedStrategy) -> Self {
        s.probs
    }
}

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_distribution(&probs, "strategy")?;
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("no actions".into()));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    /// Point mass on action `index`.
    pub fn point(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::DimensionMismatch(format!(
                "point index {index} out of {n}"
            )));
        }
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Self::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Matrix of pure-profile utilities, rows = defender actions, columns =
/// attacker actions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtilityTable {
    pub values: Vec<Vec<f64>>,
}

/// Zero-sum information-leakage game. Utility is always the attacker's;
/// the defender minimizes it.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakageGame {
    defender_actions: Vec<String>,
    attacker_actions: Vec<String>,
    /// `channels[d][a]`; for each fixed `a` the family over `d` is padded
    /// to a common output set at construction.
    channels: Vec<Vec<Channel>>,
    prior: Prior,
    measure: VulnerabilityMeasure,
}

impl LeakageGame {
    /// Builds a game from `channels[d][a]`.
    ///
    /// Every channel's inputs must match the prior's secrets. Channels for
    /// different attacker actions may have different output sets (the
    /// observation space can depend on the attacker's action); within one
    /// attacker action the defender family is padded to the union.
    pub fn new<S: Into<String>, T: Into<String>>(
        defender_actions: Vec<S>,
        attacker_actions: Vec<T>,
        mut channels: Vec<Vec<Channel>>,
        prior: Prior,
        measure: VulnerabilityMeasure,
    ) -> Result<Self> {
        let defender_actions: Vec<String> =
            defender_actions.into_iter().map(Into::into).collect();
        let attacker_actions: Vec<String> =
            attacker_actions.into_iter().map(Into::into).collect();
        if defender_actions.is_empty() || attacker_actions.is_empty() {
            return Err(Error::InvalidGameFile("empty action set".into()));
        }
        crate::channel::check_unique_labels(&defender_actions, "defender action")?;
        crate::channel::check_unique_labels(&attacker_actions, "attacker action")?;
        let (nd, na) = (defender_actions.len(), attacker_actions.len());
        if channels.len() != nd || channels.iter().any(|row| row.len() != na) {
            return Err(Error::DimensionMismatch(format!(
                "channel table must be {nd}x{na}"
            )));
        }
        for row in &channels {
            for c in row {
                if c.input_labels() != prior.labels() {
                    return Err(Error::LabelMismatch(
                        "channel inputs differ from the prior's secrets".into(),
                    ));
                }
            }
        }
        for a in 0..na {
            let family: Vec<Channel> = (0..nd).map(|d| channels[d][a].clone()).collect();
            let padded = pad_compatible(&family)?;
            for (d, c) in padded.into_iter().enumerate() {
                channels[d][a] = c;
            }
        }
        Ok(Self {
            defender_actions,
            attacker_actions,
            channels,
            prior,
            measure,
        })
    }

    pub fn defender_actions(&self) -> &[String] {
        &self.defender_actions
    }

    pub fn attacker_actions(&self) -> &[String] {
        &self.attacker_actions
    }

    pub fn num_defender_actions(&self) -> usize {
        self.defender_actions.len()
    }

    pub fn num_attacker_actions(&self) -> usize {
        self.attacker_actions.len()
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn measure(&self) -> &VulnerabilityMeasure {
        &self.measure
    }

    /// Channel of the pure profile, by action indices.
    pub fn channel(&self, d: usize, a: usize) -> &Channel {
        &self.channels[d][a]
    }

    fn defender_index(&self, d: &str) -> Result<usize> {
        self.defender_actions
            .iter()
            .position(|x| x == d)
            .ok_or_else(|| Error::UnknownAction(d.into()))
    }

    fn attacker_index(&self, a: &str) -> Result<usize> {
        self.attacker_actions
            .iter()
            .position(|x| x == a)
            .ok_or_else(|| Error::UnknownAction(a.into()))
    }

    /// Posterior vulnerability of the pure profile `(d, a)`, by label.
    pub fn pure_utility(&self, d: &str, a: &str) -> Result<f64> {
        let (di, ai) = (self.defender_index(d)?, self.attacker_index(a)?);
        self.pure_utility_at(di, ai)
    }

    /// Posterior vulnerability of the pure profile, by index.
    pub fn pure_utility_at(&self, d: usize, a: usize) -> Result<f64> {
        posterior_vulnerability(&self.measure, &self.prior, &self.channels[d][a])
    }

    /// The channel the attacker faces when playing `a` against the mixed
    /// defense `delta`.
    pub fn composed_channel(&self, delta: &MixedStrategy, a: usize) -> Result<Channel> {
        let family: Vec<Channel> = (0..self.num_defender_actions())
            .map(|d| self.channels[d][a].clone())
            .collect();
        compose_convex(&family, delta.probs())
    }

    /// Vulnerability of the defender-averaged channel for attacker action
    /// `a` (one branch of the attacker's best-response objective).
    pub fn action_value(&self, delta: &MixedStrategy, a: usize) -> Result<f64> {
        if delta.len() != self.num_defender_actions() {
            return Err(Error::DimensionMismatch(format!(
                "defender strategy has {} entries, game has {} actions",
                delta.len(),
                self.num_defender_actions()
            )));
        }
        let composed = self.composed_channel(delta, a)?;
        posterior_vulnerability(&self.measure, &self.prior, &composed)
    }

    /// Utility of a mixed profile: for each attacker action, the
    /// vulnerability of the defender-averaged channel, averaged under the
    /// attacker's distribution.
    pub fn mixed_utility(&self, delta: &MixedStrategy, alpha: &MixedStrategy) -> Result<f64> {
        if alpha.len() != self.num_attacker_actions() {
            return Err(Error::DimensionMismatch(format!(
                "attacker strategy has {} entries, game has {} actions",
                alpha.len(),
                self.num_attacker_actions()
            )));
        }
        let mut total = 0.0;
        for (a, &w) in alpha.probs().iter().enumerate() {
            // Fixed-order summation; skipping zero weights keeps point
            // masses exactly equal to the pure utility.
            if w != 0.0 {
                total += w * self.action_value(delta, a)?;
            }
        }
        Ok(total)
    }

    /// The attacker's best pure response to `delta`: the maximizing action
    /// index and the objective value `f(delta)`. Ties break toward the
    /// lowest action index.
    pub fn attacker_best_response(&self, delta: &MixedStrategy) -> Result<(usize, f64)> {
        let mut best = (0, f64::NEG_INFINITY);
        for a in 0..self.num_attacker_actions() {
            let v = self.action_value(delta, a)?;
            if v > best.1 {
                best = (a, v);
            }
        }
        Ok(best)
    }

    /// Full table of pure-profile utilities.
    pub fn utility_table(&self) -> Result<UtilityTable> {
        let values = (0..self.num_defender_actions())
            .map(|d| {
                (0..self.num_attacker_actions())
                    .map(|a| self.pure_utility_at(d, a))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(UtilityTable { values })
    }
}

/// Serialized game file.
#[derive(Serialize, Deserialize)]
struct GameRepr {
    secrets: Vec<String>,
    prior: Vec<f64>,
    defender_actions: Vec<String>,
    attacker_actions: Vec<String>,
    measure: MeasureSpec,
    /// Keyed by `"<defender>,<attacker>"`.
    channels: BTreeMap<String, Channel>,
}

pub(crate) fn profile_key(d: &str, a: &str) -> String {
    format!("{d},{a}")
}

impl LeakageGame {
    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let repr: GameRepr = serde_json::from_value(value)?;
        Self::from_repr(repr)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let repr: GameRepr = serde_json::from_str(s)?;
        Self::from_repr(repr)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    fn from_repr(repr: GameRepr) -> Result<Self> {
        let prior = Prior::new(repr.secrets, repr.prior)?;
        let measure = repr.measure.to_measure()?;
        // Profile keys must be unambiguous: two distinct profiles may not
        // produce the same "d,a" string.
        let mut seen: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for (di, d) in repr.defender_actions.iter().enumerate() {
            for (ai, a) in repr.attacker_actions.iter().enumerate() {
                if seen.insert(profile_key(d, a), (di, ai)).is_some() {
                    return Err(Error::InvalidGameFile(format!(
                        "ambiguous channel key `{}`",
                        profile_key(d, a)
                    )));
                }
            }
        }
        for key in repr.channels.keys() {
            if !seen.contains_key(key) {
                return Err(Error::InvalidGameFile(format!(
                    "channel key `{key}` does not name a strategy profile"
                )));
            }
        }
        let channels = repr
            .defender_actions
            .iter()
            .map(|d| {
                repr.attacker_actions
                    .iter()
                    .map(|a| {
                        repr.channels
                            .get(&profile_key(d, a))
                            .cloned()
                            .ok_or_else(|| {
                                Error::InvalidGameFile(format!(
                                    "missing channel for profile `{}`",
                                    profile_key(d, a)
                                ))
                            })
                    })
                    .collect::<Result<Vec<Channel>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(
            repr.defender_actions,
            repr.attacker_actions,
            channels,
            prior,
            measure,
        )
    }

    /// Serializes to the game file form. Fails for custom measures, which
    /// have no file representation.
    pub fn to_json_value(&self) -> Result<serde_json::Value> {
        let measure = self.measure.to_spec().ok_or_else(|| {
            Error::InvalidGameFile("custom measures cannot be written to game files".into())
        })?;
        let mut channels = BTreeMap::new();
        for (di, d) in self.defender_actions.iter().enumerate() {
            for (ai, a) in self.attacker_actions.iter().enumerate() {
                channels.insert(profile_key(d, a), self.channels[di][ai].clone());
            }
        }
        let repr = GameRepr {
            secrets: self.prior.labels().to_vec(),
            prior: self.prior.probs().to_vec(),
            defender_actions: self.defender_actions.clone(),
            attacker_actions: self.attacker_actions.clone(),
            measure,
            channels,
        };
        Ok(serde_json::to_value(repr)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let value = self.to_json_value()?;
        std::fs::write(path, format!("{:#}\n", value))?;
        Ok(())
    }
}
