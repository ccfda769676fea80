//! Vulnerability measures and leakage.
//!
//! A vulnerability measure is a continuous convex function on priors; the
//! posterior vulnerability of a channel is the expectation of that function
//! over the posteriors the channel induces. Convexity is exactly what makes
//! posterior vulnerability never smaller than prior vulnerability, i.e.
//! leakage non-negative.
//!
//! Three kinds are supported: Bayes vulnerability `max_x pi(x)`,
//! g-vulnerability with an explicit finite gain matrix, and caller-supplied
//! convex functions. Only the first two are representable in game files.

use std::fmt;
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::channel::{decompose, Channel, Prior};
use crate::error::{Error, Result};

/// Function handle for caller-supplied convex measures. Takes the
/// probability vector of a prior.
pub type MeasureFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A vulnerability measure: a continuous convex function on priors.
#[derive(Clone)]
pub enum VulnerabilityMeasure {
    /// `max_x pi(x)`: probability of guessing the secret in one try.
    Bayes,
    /// `max_w sum_x gain[w][x] pi(x)` over an explicit guess set.
    GVulnerability {
        guesses: Vec<String>,
        gain: Vec<Vec<f64>>,
    },
    /// Caller-supplied function, declared convex by the caller.
    /// Use [`spot_check_convexity`] or [`VulnerabilityMeasure::custom_checked`]
    /// to test the declaration.
    CustomConvex(MeasureFn),
}

impl fmt::Debug for VulnerabilityMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bayes => write!(f, "Bayes"),
            Self::GVulnerability { guesses, .. } => {
                write!(f, "GVulnerability({} guesses)", guesses.len())
            }
            Self::CustomConvex(_) => write!(f, "CustomConvex(..)"),
        }
    }
}

impl PartialEq for VulnerabilityMeasure {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Bayes, Self::Bayes) => true,
            (
                Self::GVulnerability { guesses, gain },
                Self::GVulnerability {
                    guesses: g2,
                    gain: n2,
                },
            ) => guesses == g2 && gain == n2,
            (Self::CustomConvex(a), Self::CustomConvex(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl VulnerabilityMeasure {
    pub fn bayes() -> Self {
        Self::Bayes
    }

    /// Builds a g-vulnerability measure; `gain` is indexed `[guess][secret]`
    /// and every entry must be finite.
    pub fn g_vulnerability<S: Into<String>>(guesses: Vec<S>, gain: Vec<Vec<f64>>) -> Result<Self> {
        let guesses: Vec<String> = guesses.into_iter().map(Into::into).collect();
        if guesses.is_empty() {
            return Err(Error::InvalidDistribution("empty guess set".into()));
        }
        if guesses.len() != gain.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} guesses vs {} gain rows",
                guesses.len(),
                gain.len()
            )));
        }
        crate::channel::check_unique_labels(&guesses, "guess")?;
        let width = gain.first().map_or(0, Vec::len);
        for (w, row) in gain.iter().enumerate() {
            if row.len() != width {
                return Err(Error::DimensionMismatch(format!(
                    "gain row {w} has {} entries, expected {width}",
                    row.len()
                )));
            }
            for (x, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("gain[{w}][{x}] = {v}")));
                }
            }
        }
        Ok(Self::GVulnerability { guesses, gain })
    }

    /// Wraps a function the caller declares to be convex.
    pub fn custom(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self::CustomConvex(Arc::new(f))
    }

    /// Wraps a function and immediately spot-checks its convexity on random
    /// priors of the given dimension.
    pub fn custom_checked(
        f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        dim: usize,
    ) -> Result<Self> {
        let m = Self::custom(f);
        spot_check_convexity(&m, dim, 200, 42)?;
        Ok(m)
    }

    pub fn is_bayes(&self) -> bool {
        matches!(self, Self::Bayes)
    }
}

/// File form of a measure: `"bayes"` or `{"g": {"guesses": [...], "gain": [[...]]}}`.
/// Custom measures are library-only and have no file form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureSpecRepr", into = "MeasureSpecRepr")]
pub enum MeasureSpec {
    Bayes,
    G {
        guesses: Vec<String>,
        gain: Vec<Vec<f64>>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MeasureSpecRepr {
    Name(String),
    Tagged { g: GRepr },
}

#[derive(Serialize, Deserialize)]
struct GRepr {
    guesses: Vec<String>,
    gain: Vec<Vec<f64>>,
}

impl TryFrom<MeasureSpecRepr> for MeasureSpec {
    type Error = Error;

    fn try_from(repr: MeasureSpecRepr) -> Result<Self> {
        match repr {
            MeasureSpecRepr::Name(s) if s == "bayes" => Ok(MeasureSpec::Bayes),
            MeasureSpecRepr::Name(s) => Err(Error::InvalidGameFile(format!(
                "unknown measure `{s}` (expected \"bayes\" or a g-vulnerability object)"
            ))),
            MeasureSpecRepr::Tagged { g } => Ok(MeasureSpec::G {
                guesses: g.guesses,
                gain: g.gain,
            }),
        }
    }
}

impl From<MeasureSpec> for MeasureSpecRepr {
    fn from(spec: MeasureSpec) -> Self {
        match spec {
            MeasureSpec::Bayes => MeasureSpecRepr::Name("bayes".into()),
            MeasureSpec::G { guesses, gain } => MeasureSpecRepr::Tagged {
                g: GRepr { guesses, gain },
            },
        }
    }
}

impl MeasureSpec {
    pub fn to_measure(&self) -> Result<VulnerabilityMeasure> {
        match self {
            MeasureSpec::Bayes => Ok(VulnerabilityMeasure::Bayes),
            MeasureSpec::G { guesses, gain } => {
                VulnerabilityMeasure::g_vulnerability(guesses.clone(), gain.clone())
            }
        }
    }
}

impl VulnerabilityMeasure {
    /// File form of this measure, if it has one.
    pub fn to_spec(&self) -> Option<MeasureSpec> {
        match self {
            Self::Bayes => Some(MeasureSpec::Bayes),
            Self::GVulnerability { guesses, gain } => Some(MeasureSpec::G {
                guesses: guesses.clone(),
                gain: gain.clone(),
            }),
            Self::CustomConvex(_) => None,
        }
    }
}

fn eval_on_probs(measure: &VulnerabilityMeasure, probs: &[f64]) -> Result<f64> {
    match measure {
        VulnerabilityMeasure::Bayes => {
            Ok(probs.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
        }
        VulnerabilityMeasure::GVulnerability { gain, .. } => {
            let width = gain.first().map_or(0, Vec::len);
            if width != probs.len() {
                return Err(Error::DimensionMismatch(format!(
                    "gain matrix has {width} secrets, prior has {}",
                    probs.len()
                )));
            }
            Ok(gain
                .iter()
                .map(|row| row.iter().zip(probs).map(|(g, p)| g * p).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max))
        }
        VulnerabilityMeasure::CustomConvex(f) => Ok(f(probs)),
    }
}

/// Vulnerability of the secret before any observation.
pub fn prior_vulnerability(measure: &VulnerabilityMeasure, prior: &Prior) -> Result<f64> {
    eval_on_probs(measure, prior.probs())
}

/// Expected vulnerability of the posteriors induced by `channel` on `prior`.
///
/// For the Bayes measure this is computed in closed form as
/// `sum_y max_x pi(x) C(x,y)`; for the other measures as the expectation of
/// [`prior_vulnerability`] over the posterior decomposition. The two routes
/// agree for Bayes (see the tests).
pub fn posterior_vulnerability(
    measure: &VulnerabilityMeasure,
    prior: &Prior,
    channel: &Channel,
) -> Result<f64> {
    if prior.labels() != channel.input_labels() {
        return Err(Error::LabelMismatch(
            "prior labels differ from channel input labels".into(),
        ));
    }
    match measure {
        VulnerabilityMeasure::Bayes => Ok(bayes_posterior_raw(prior.probs(), channel.rows())),
        _ => posterior_vulnerability_expectation(measure, prior, channel),
    }
}

/// Generic expectation route: decompose into posteriors and average the
/// prior vulnerability. Works for every measure; used as the cross-check
/// path for the Bayes closed form.
pub fn posterior_vulnerability_expectation(
    measure: &VulnerabilityMeasure,
    prior: &Prior,
    channel: &Channel,
) -> Result<f64> {
    let joint = decompose(prior, channel)?;
    let mut total = 0.0;
    for (py, posterior) in joint.output_marginal.iter().zip(&joint.posteriors) {
        if let Some(post) = posterior {
            total += py * prior_vulnerability(measure, post)?;
        }
    }
    Ok(total)
}

/// Closed-form Bayes posterior vulnerability over raw rows; tolerates rows
/// that do not sum to one (used by the solver when stepping off the simplex).
pub(crate) fn bayes_posterior_raw(pi: &[f64], rows: &[Vec<f64>]) -> f64 {
    let ny = rows.first().map_or(0, Vec::len);
    (0..ny)
        .map(|y| {
            rows.iter()
                .zip(pi)
                .map(|(row, p)| p * row[y])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum()
}

/// Expectation-route posterior vulnerability over raw rows: the output
/// "marginal" may sum to anything, but each posterior is normalized before
/// the measure is applied.
pub(crate) fn posterior_raw(
    measure: &VulnerabilityMeasure,
    pi: &[f64],
    rows: &[Vec<f64>],
) -> Result<f64> {
    if measure.is_bayes() {
        return Ok(bayes_posterior_raw(pi, rows));
    }
    let ny = rows.first().map_or(0, Vec::len);
    let mut total = 0.0;
    for y in 0..ny {
        let joint: Vec<f64> = rows.iter().zip(pi).map(|(row, p)| p * row[y]).collect();
        let py: f64 = joint.iter().sum();
        if py > 0.0 {
            let post: Vec<f64> = joint.iter().map(|v| v / py).collect();
            total += py * eval_on_probs(measure, &post)?;
        }
    }
    Ok(total)
}

/// Bayes posterior vulnerability of a channel under the uniform prior,
/// computed as the sum of column maxima divided by the number of inputs.
pub fn column_max_vulnerability(channel: &Channel) -> f64 {
    let nx = channel.num_inputs() as f64;
    (0..channel.num_outputs())
        .map(|y| {
            (0..channel.num_inputs())
                .map(|x| channel.entry(x, y))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum::<f64>()
        / nx
}

/// Prior vs posterior vulnerability of a channel, with the induced additive
/// and multiplicative leakage.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakageReport {
    pub prior_vulnerability: f64,
    pub posterior_vulnerability: f64,
    /// `posterior - prior`.
    pub additive: f64,
    /// `posterior / prior`; absent when the prior vulnerability is zero.
    pub multiplicative: Option<f64>,
}

pub fn leakage(
    measure: &VulnerabilityMeasure,
    prior: &Prior,
    channel: &Channel,
) -> Result<LeakageReport> {
    let before = prior_vulnerability(measure, prior)?;
    let after = posterior_vulnerability(measure, prior, channel)?;
    Ok(LeakageReport {
        prior_vulnerability: before,
        posterior_vulnerability: after,
        additive: after - before,
        multiplicative: (before != 0.0).then(|| after / before),
    })
}

/// Tests the convexity declaration of a measure on random priors:
/// `V(t p1 + (1-t) p2) <= t V(p1) + (1-t) V(p2) + 1e-9` must hold for every
/// sampled pair, otherwise the measure is reported as not convex.
pub fn spot_check_convexity(
    measure: &VulnerabilityMeasure,
    dim: usize,
    samples: usize,
    seed: u64,
) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidDistribution("zero-dimensional prior".into()));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    for i in 0..samples {
        let p1 = random_prob_vector(&mut rng, dim);
        let p2 = random_prob_vector(&mut rng, dim);
        let t: f64 = rng.gen_range(0.0..1.0);
        let mix: Vec<f64> = p1
            .iter()
            .zip(&p2)
            .map(|(a, b)| t * a + (1.0 - t) * b)
            .collect();
        let lhs = eval_on_probs(measure, &mix)?;
        let rhs = t * eval_on_probs(measure, &p1)? + (1.0 - t) * eval_on_probs(measure, &p2)?;
        if lhs > rhs + 1e-9 {
            return Err(Error::NotConvex(format!(
                "violation {:.3e} at sample {i}",
                lhs - rhs
            )));
        }
    }
    Ok(())
}

pub(crate) fn random_prob_vector(rng: &mut StdRng, dim: usize) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.0..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        if sum > 1e-6 {
            return raw.into_iter().map(|v| v / sum).collect();
        }
    }
}
