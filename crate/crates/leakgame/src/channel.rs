//! Channel matrices, priors over secrets, and the probability computations
//! they induce.
//!
//! A [`Channel`] is a row-stochastic matrix: entry `(x, y)` is the conditional
//! probability of observing output `y` when the secret input is `x`. A
//! [`Prior`] is the attacker's distribution over secrets before observing
//! anything. [`decompose`] turns a prior and a channel into the output
//! marginal and the family of posterior distributions, which is what every
//! vulnerability computation is built on.
//!
//! All types are immutable values after construction; operations are pure
//! functions, so everything here is safe to share across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for "sums to one" checks on distributions and
/// channel rows.
pub const DIST_TOL: f64 = 1e-9;

pub(crate) fn check_distribution(probs: &[f64], what: &str) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution(format!("{what} is empty")));
    }
    let mut sum = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() {
            return Err(Error::NonFinite(format!("{what}[{i}] = {p}")));
        }
        if p < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "{what}[{i}] = {p} is negative"
            )));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > DIST_TOL {
        return Err(Error::InvalidDistribution(format!(
            "{what} sums to {sum}, expected 1 within {DIST_TOL}"
        )));
    }
    Ok(())
}

pub(crate) fn check_unique_labels(labels: &[String], kind: &'static str) -> Result<()> {
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].contains(a) {
            return Err(Error::DuplicateLabel {
                kind,
                label: a.clone(),
            });
        }
    }
    Ok(())
}

/// Probability distribution over secret values.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl Prior {
    /// Builds a prior, verifying that `probs` is a distribution over the
    /// (unique) `labels`.
    pub fn new<S: Into<String>>(labels: Vec<S>, probs: Vec<f64>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != probs.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels vs {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        check_unique_labels(&labels, "secret")?;
        check_distribution(&probs, "prior")?;
        Ok(Self { labels, probs })
    }

    /// Uniform distribution over the given secrets.
    pub fn uniform<S: Into<String>>(labels: Vec<S>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidDistribution("no secrets".into()));
        }
        Self::new(labels, vec![1.0 / n as f64; n])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
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

    /// Largest single probability, `max_x pi(x)`.
    pub fn max_prob(&self) -> f64 {
        self.probs.iter().cloned().fold(f64::MIN, f64::max)
    }
}

/// Serialized form of a channel: `{"inputs": [...], "outputs": [...], "rows": [[...]]}`.
#[derive(Serialize, Deserialize)]
struct ChannelRepr {
    inputs: Vec<String>,
    outputs: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// Row-stochastic matrix of conditional probabilities from secrets to
/// observables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRepr", into = "ChannelRepr")]
pub struct Channel {
    matrix: Vec<Vec<f64>>,
    input_labels: Vec<String>,
    output_labels: Vec<String>,
}

impl TryFrom<ChannelRepr> for Channel {
    type Error = Error;

    fn try_from(repr: ChannelRepr) -> Result<Self> {
        Channel::new(repr.rows, repr.inputs, repr.outputs)
    }
}

impl From<Channel> for ChannelRepr {
    fn from(c: Channel) -> Self {
        ChannelRepr {
            inputs: c.input_labels,
            outputs: c.output_labels,
            rows: c.matrix,
        }
    }
}

impl Channel {
    /// Validates and constructs a channel. Rejects non-rectangular matrices,
    /// entries outside `[0, 1]`, rows deviating from sum 1 by more than
    /// [`DIST_TOL`], duplicate labels, and label/shape mismatches.
    pub fn new<S: Into<String>, T: Into<String>>(
        matrix: Vec<Vec<f64>>,
        input_labels: Vec<S>,
        output_labels: Vec<T>,
    ) -> Result<Self> {
        let input_labels: Vec<String> = input_labels.into_iter().map(Into::into).collect();
        let output_labels: Vec<String> = output_labels.into_iter().map(Into::into).collect();
        if matrix.len() != input_labels.len() {
            return Err(Error::InvalidChannel(format!(
                "{} rows vs {} input labels",
                matrix.len(),
                input_labels.len()
            )));
        }
        if matrix.is_empty() || output_labels.is_empty() {
            return Err(Error::InvalidChannel("empty channel".into()));
        }
        check_unique_labels(&input_labels, "input")?;
        check_unique_labels(&output_labels, "output")?;
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != output_labels.len() {
                return Err(Error::InvalidChannel(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    output_labels.len()
                )));
            }
            let mut sum = 0.0;
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("entry ({i},{j}) = {v}")));
                }
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidChannel(format!(
                        "entry ({i},{j}) = {v} outside [0,1]"
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > DIST_TOL {
                return Err(Error::InvalidChannel(format!(
                    "row {i} sums to {sum}, expected 1 within {DIST_TOL}"
                )));
            }
        }
        Ok(Self {
            matrix,
            input_labels,
            output_labels,
        })
    }

    pub fn input_labels(&self) -> &[String] {
        &self.input_labels
    }

    pub fn output_labels(&self) -> &[String] {
        &self.output_labels
    }

    pub fn num_inputs(&self) -> usize {
        self.input_labels.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.output_labels.len()
    }

    /// Conditional probability of output `y` (by index) given input `x`.
    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.matrix[x][y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.matrix[x]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    /// True when `other` has identical input and output label lists.
    pub fn compatible_with(&self, other: &Channel) -> bool {
        self.input_labels == other.input_labels && self.output_labels == other.output_labels
    }
}

/// Extends every channel to the union of the output label sets by adding
/// zero-valued columns, so that they can be mixed entry-wise.
///
/// All channels must share the same input labels. Original entries are
/// preserved; the union keeps first-seen label order.
pub fn pad_compatible(channels: &[Channel]) -> Result<Vec<Channel>> {
    if channels.is_empty() {
        return Err(Error::IncompatibleChannels("no channels given".into()));
    }
    let inputs = &channels[0].input_labels;
    for (i, c) in channels.iter().enumerate() {
        if &c.input_labels != inputs {
            return Err(Error::IncompatibleChannels(format!(
                "channel {i} has different input labels"
            )));
        }
    }
    let mut union: Vec<String> = Vec::new();
    for c in channels {
        for y in &c.output_labels {
            if !union.contains(y) {
                union.push(y.clone());
            }
        }
    }
    channels
        .iter()
        .map(|c| {
            let col_of: Vec<Option<usize>> = union
                .iter()
                .map(|y| c.output_labels.iter().position(|l| l == y))
                .collect();
            let matrix = c
                .matrix
                .iter()
                .map(|row| {
                    col_of
                        .iter()
                        .map(|j| j.map_or(0.0, |j| row[j]))
                        .collect::<Vec<f64>>()
                })
                .collect();
            Channel::new(matrix, inputs.clone(), union.clone())
        })
        .collect()
}

/// Entry-wise convex combination `sum_i weights[i] * channels[i]`.
///
/// The channels must be pairwise compatible (same input and output labels;
/// use [`pad_compatible`] first) and `weights` must be a distribution over
/// the list.
pub fn compose_convex(channels: &[Channel], weights: &[f64]) -> Result<Channel> {
    if channels.is_empty() {
        return Err(Error::IncompatibleChannels("no channels given".into()));
    }
    if channels.len() != weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} channels vs {} weights",
            channels.len(),
            weights.len()
        )));
    }
    check_distribution(weights, "weights")?;
    let first = &channels[0];
    for (i, c) in channels.iter().enumerate().skip(1) {
        if !first.compatible_with(c) {
            return Err(Error::IncompatibleChannels(format!(
                "channel {i} has different labels; pad first"
            )));
        }
    }
    let (nx, ny) = (first.num_inputs(), first.num_outputs());
    let mut matrix = vec![vec![0.0; ny]; nx];
    for (c, &w) in channels.iter().zip(weights) {
        for x in 0..nx {
            for y in 0..ny {
                matrix[x][y] += w * c.matrix[x][y];
            }
        }
    }
    Channel::new(
        matrix,
        first.input_labels.clone(),
        first.output_labels.clone(),
    )
}

/// Output marginal and posterior distributions induced by a prior and a
/// channel.
///
/// `posteriors[y]` is `None` exactly when the output has zero marginal
/// probability, where the posterior is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDecomposition {
    pub output_marginal: Vec<f64>,
    pub posteriors: Vec<Option<Prior>>,
}

/// Computes `p(y) = sum_x pi(x) C(x,y)` and the posteriors
/// `p(x|y) = pi(x) C(x,y) / p(y)` for every output with `p(y) > 0`.
pub fn decompose(prior: &Prior, channel: &Channel) -> Result<JointDecomposition> {
    if prior.labels() != channel.input_labels() {
        return Err(Error::LabelMismatch(
            "prior labels differ from channel input labels".into(),
        ));
    }
    let (nx, ny) = (channel.num_inputs(), channel.num_outputs());
    let pi = prior.probs();
    let mut output_marginal = vec![0.0; ny];
    for y in 0..ny {
        for x in 0..nx {
            output_marginal[y] += pi[x] * channel.entry(x, y);
        }
    }
    let posteriors = (0..ny)
        .map(|y| {
            let py = output_marginal[y];
            if py == 0.0 {
                return Ok(None);
            }
            let probs: Vec<f64> = (0..nx).map(|x| pi[x] * channel.entry(x, y) / py).collect();
            // Rescale away accumulated rounding so the posterior passes its
            // own distribution check.
            let total: f64 = probs.iter().sum();
            let probs = probs.into_iter().map(|p| p / total).collect();
            Prior::new(prior.labels().to_vec(), probs).map(Some)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(JointDecomposition {
        output_marginal,
        posteriors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    pub(crate) fn channel_2x2(rows: [[f64; 2]; 2]) -> Channel {
        Channel::new(
            rows.iter().map(|r| r.to_vec()).collect(),
            labels("x", 2),
            labels("y", 2),
        )
        .unwrap()
    }

    #[test]
    fn identity_channel_is_valid() {
        let c = channel_2x2([[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(c.entry(0, 0), 1.0);
        assert_eq!(c.entry(1, 0), 0.0);
    }

    #[test]
    fn millionaires_reveal_channel_is_valid() {
        // The "both programs agree" channel that maps each secret to a
        // distinct output.
        assert!(Channel::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec!["x0", "x1"],
            vec!["T", "F"],
        )
        .is_ok());
    }

    #[test]
    fn bad_row_sum_is_rejected() {
        let err = Channel::new(
            vec![vec![0.5, 0.6], vec![0.0, 1.0]],
            labels("x", 2),
            labels("y", 2),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidChannel(_)));
    }

    #[test]
    fn negative_entry_is_rejected() {
        let err = Channel::new(
            vec![vec![-0.1, 1.1], vec![0.0, 1.0]],
            labels("x", 2),
            labels("y", 2),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidChannel(_)));
    }

    #[test]
    fn duplicate_labels_are_rejected() {
        let err = Channel::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec!["x0", "x0"],
            vec!["y0", "y1"],
        )
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateLabel { .. }));
        let err = Prior::new(vec!["x0", "x0"], vec![0.5, 0.5]).unwrap_err();
        assert!(matches!(err, Error::DuplicateLabel { .. }));
    }

    #[test]
    fn pad_identical_outputs_unchanged() {
        let a = channel_2x2([[1.0, 0.0], [0.0, 1.0]]);
        let b = channel_2x2([[0.5, 0.5], [0.25, 0.75]]);
        let padded = pad_compatible(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(padded[0], a);
        assert_eq!(padded[1], b);
    }

    #[test]
    fn pad_disjoint_outputs_to_union() {
        let t = Channel::new(vec![vec![1.0], vec![1.0]], labels("x", 2), vec!["T"]).unwrap();
        let f = Channel::new(vec![vec![1.0], vec![1.0]], labels("x", 2), vec!["F"]).unwrap();
        let padded = pad_compatible(&[t, f]).unwrap();
        assert_eq!(padded[0].output_labels(), ["T", "F"]);
        assert_eq!(padded[1].output_labels(), ["T", "F"]);
        assert_eq!(padded[0].rows(), &[vec![1.0, 0.0], vec![1.0, 0.0]]);
        assert_eq!(padded[1].rows(), &[vec![0.0, 1.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn pad_three_way_partial_overlap() {
        let xs = labels("x", 1);
        let c1 = Channel::new(vec![vec![0.5, 0.5]], xs.clone(), vec!["a", "b"]).unwrap();
        let c2 = Channel::new(vec![vec![0.25, 0.75]], xs.clone(), vec!["b", "c"]).unwrap();
        let c3 = Channel::new(vec![vec![1.0]], xs.clone(), vec!["d"]).unwrap();
        let padded = pad_compatible(&[c1, c2, c3]).unwrap();
        // Union in first-seen order: a, b, c, d.
        for p in &padded {
            assert_eq!(p.output_labels(), ["a", "b", "c", "d"]);
        }
        assert_eq!(padded[0].row(0), [0.5, 0.5, 0.0, 0.0]);
        assert_eq!(padded[1].row(0), [0.0, 0.25, 0.75, 0.0]);
        assert_eq!(padded[2].row(0), [0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn compose_point_mass_returns_component_exactly() {
        let a = channel_2x2([[0.3, 0.7], [0.6, 0.4]]);
        let b = channel_2x2([[1.0, 0.0], [0.0, 1.0]]);
        let mixed = compose_convex(&[a.clone(), b], &[1.0, 0.0]).unwrap();
        assert_eq!(mixed, a);
    }

    #[test]
    fn compose_matches_millionaires_mixed_channel() {
        // Mixing the reveal channel with the constant channel at weight 0.3
        // gives rows [1,0] and [0.7, 0.3].
        let c00 = channel_2x2([[1.0, 0.0], [0.0, 1.0]]);
        let c10 = channel_2x2([[1.0, 0.0], [1.0, 0.0]]);
        let mixed = compose_convex(&[c00, c10], &[0.3, 0.7]).unwrap();
        assert_eq!(mixed.row(0), [1.0, 0.0]);
        assert!((mixed.entry(1, 0) - 0.7).abs() < 1e-15);
        assert!((mixed.entry(1, 1) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn equal_mix_with_row_swapped_copy_is_flat() {
        let c = channel_2x2([[0.9, 0.1], [0.1, 0.9]]);
        let swapped = channel_2x2([[0.1, 0.9], [0.9, 0.1]]);
        let mixed = compose_convex(&[c, swapped], &[0.5, 0.5]).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!((mixed.entry(x, y) - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn compose_rejects_bad_weights() {
        let a = channel_2x2([[1.0, 0.0], [0.0, 1.0]]);
        let b = channel_2x2([[0.5, 0.5], [0.5, 0.5]]);
        assert!(compose_convex(&[a, b], &[0.6, 0.6]).is_err());
    }

    #[test]
    fn decompose_identity_gives_point_posteriors() {
        let prior = Prior::uniform(labels("x", 2)).unwrap();
        let c = channel_2x2([[1.0, 0.0], [0.0, 1.0]]);
        let d = decompose(&prior, &c).unwrap();
        assert_eq!(d.output_marginal, vec![0.5, 0.5]);
        assert_eq!(d.posteriors[0].as_ref().unwrap().probs(), [1.0, 0.0]);
        assert_eq!(d.posteriors[1].as_ref().unwrap().probs(), [0.0, 1.0]);
    }

    #[test]
    fn decompose_constant_channel_keeps_prior() {
        let prior = Prior::new(labels("x", 2), vec![0.25, 0.75]).unwrap();
        let c = Channel::new(
            vec![vec![1.0], vec![1.0]],
            labels("x", 2),
            vec!["y".to_string()],
        )
        .unwrap();
        let d = decompose(&prior, &c).unwrap();
        assert_eq!(d.output_marginal, vec![1.0]);
        assert_eq!(d.posteriors[0].as_ref().unwrap(), &prior);
    }

    #[test]
    fn decompose_hand_computed_case() {
        let prior = Prior::new(labels("x", 2), vec![0.25, 0.75]).unwrap();
        let c = channel_2x2([[0.8, 0.2], [0.4, 0.6]]);
        let d = decompose(&prior, &c).unwrap();
        assert!((d.output_marginal[0] - 0.5).abs() < 1e-12);
        assert!((d.output_marginal[1] - 0.5).abs() < 1e-12);
        let p0 = d.posteriors[0].as_ref().unwrap().probs();
        let p1 = d.posteriors[1].as_ref().unwrap().probs();
        assert!((p0[0] - 0.4).abs() < 1e-12 && (p0[1] - 0.6).abs() < 1e-12);
        assert!((p1[0] - 0.1).abs() < 1e-12 && (p1[1] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn decompose_skips_zero_mass_outputs() {
        let prior = Prior::new(labels("x", 2), vec![1.0, 0.0]).unwrap();
        let c = channel_2x2([[1.0, 0.0], [0.0, 1.0]]);
        let d = decompose(&prior, &c).unwrap();
        assert!(d.posteriors[0].is_some());
        assert!(d.posteriors[1].is_none());
    }

    #[test]
    fn decompose_rejects_label_mismatch() {
        let prior = Prior::uniform(vec!["a", "b"]).unwrap();
        let c = channel_2x2([[1.0, 0.0], [0.0, 1.0]]);
        assert!(matches!(
            decompose(&prior, &c),
            Err(Error::LabelMismatch(_))
        ));
    }

    #[test]
    fn channel_json_round_trip() {
        let c = Channel::new(
            vec![vec![0.5, 0.5], vec![0.1, 0.9]],
            vec!["x0", "x1"],
            vec!["T", "F"],
        )
        .unwrap();
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"inputs\""));
        let back: Channel = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn channel_json_parse_validates() {
        let bad = r#"{"inputs":["a","b"],"outputs":["y"],"rows":[[0.5],[1.0]]}"#;
        assert!(serde_json::from_str::<Channel>(bad).is_err());
    }
}
