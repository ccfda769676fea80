//! Independent brute-force verification.
//!
//! Nothing here shares code with the solver's optimization path: the grid
//! search enumerates the strategy simplex exhaustively, the saddle check
//! re-evaluates the game at sampled strategies, and the convexity check
//! evaluates both sides of the mixing inequality directly. These are the
//! desk-scale oracles the solver results are audited against.

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use crate::channel::{Channel, Prior};
use crate::error::{Error, Result};
use crate::game::{LeakageGame, MixedStrategy};
use crate::vulnerability::{
    posterior_vulnerability, random_prob_vector, VulnerabilityMeasure,
};

/// Default sample count for randomized saddle checks.
pub const DEFAULT_SAMPLES: usize = 1000;
/// Default seed for randomized checks, so failures are reproducible.
pub const DEFAULT_SEED: u64 = 42;

/// Largest defender dimension the grid enumerates.
pub const GRID_DIM_LIMIT: usize = 4;
/// Largest attacker dimension for the optional maximin enumeration.
pub const MAXIMIN_DIM_LIMIT: usize = 3;

/// Result of exhaustive grid search over the defender simplex.
#[derive(Debug, Clone, Serialize)]
pub struct GridResult {
    pub best_delta: MixedStrategy,
    pub best_value: f64,
    pub resolution: f64,
    /// Attacker-side maximin over the same grids, enumerated only for tiny
    /// attacker action sets.
    pub attacker_maximin: Option<(MixedStrategy, f64)>,
}

/// Enumerates every distribution with coordinates that are multiples of
/// `resolution` (vertices and edges included), in lexicographic order.
fn simplex_grid(dim: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(dim: usize, remaining: usize, steps: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if dim == 1 {
            prefix.push(remaining);
            out.push(prefix.iter().map(|&k| k as f64 / steps as f64).collect());
            prefix.pop();
            return;
        }
        for k in 0..=remaining {
            prefix.push(k);
            rec(dim - 1, remaining - k, steps, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, steps, steps, &mut Vec::new(), &mut out);
    out
}

/// Brute-force minimax: evaluates the attacker's best-response value at
/// every grid point of the defender simplex and returns the minimizer.
pub fn grid_minimax(game: &LeakageGame, resolution: f64) -> Result<GridResult> {
    let nd = game.num_defender_actions();
    if nd > GRID_DIM_LIMIT {
        return Err(Error::GridDimension {
            got: nd,
            limit: GRID_DIM_LIMIT,
        });
    }
    if !(resolution > 0.0 && resolution <= 0.1) {
        return Err(Error::InvalidDistribution(format!(
            "grid resolution must be in (0, 0.1], got {resolution}"
        )));
    }
    let na = game.num_attacker_actions();
    let steps = (1.0 / resolution).round() as usize;
    let grid = simplex_grid(nd, steps);

    // Per-point value of each pure attacker response; reused by both the
    // minimax scan and the maximin enumeration.
    let mut branch_values: Vec<Vec<f64>> = Vec::with_capacity(grid.len());
    let mut best: Option<(usize, f64)> = None;
    for (idx, point) in grid.iter().enumerate() {
        let delta = MixedStrategy::new(point.clone())?;
        let values = (0..na)
            .map(|a| game.action_value(&delta, a))
            .collect::<Result<Vec<f64>>>()?;
        let f = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if best.map_or(true, |(_, b)| f < b) {
            best = Some((idx, f));
        }
        branch_values.push(values);
    }
    let (best_idx, best_value) = best.expect("grid is never empty");

    let attacker_maximin = if na <= MAXIMIN_DIM_LIMIT {
        let mut best_alpha: Option<(Vec<f64>, f64)> = None;
        for alpha in simplex_grid(na, steps) {
            let worst = branch_values
                .iter()
                .map(|values| {
                    values
                        .iter()
                        .zip(&alpha)
                        .map(|(v, w)| v * w)
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min);
            if best_alpha.as_ref().map_or(true, |(_, b)| worst > *b) {
                best_alpha = Some((alpha, worst));
            }
        }
        best_alpha
            .map(|(alpha, value)| Ok::<_, Error>((MixedStrategy::new(alpha)?, value)))
            .transpose()?
    } else {
        None
    };

    Ok(GridResult {
        best_delta: MixedStrategy::new(grid[best_idx].clone())?,
        best_value,
        resolution,
        attacker_maximin,
    })
}

/// Outcome of an approximate-saddle audit of a defender strategy.
#[derive(Debug, Clone, Serialize)]
pub struct SaddleReport {
    pub pass: bool,
    /// Best-response value at the audited strategy.
    pub value: f64,
    pub epsilon: f64,
    /// Maximum of `f(delta_hat) - f(delta) - epsilon` over the tested
    /// strategies; positive means some strategy beats the audited one by
    /// more than epsilon.
    pub worst_violation: f64,
    /// The strategy attaining the worst violation.
    pub worst_delta: Vec<f64>,
    /// True when averaging over attacker actions never beats the best pure
    /// response (the affine side of the saddle property).
    pub affine_side_ok: bool,
    pub samples: usize,
}

/// Checks that `delta_hat` is an epsilon-approximate minimizer of the
/// attacker's best-response value: every simplex vertex and `samples`
/// random strategies must satisfy `f(delta) >= f(delta_hat) - epsilon`.
pub fn verify_epsilon_saddle(
    game: &LeakageGame,
    delta_hat: &MixedStrategy,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> Result<SaddleReport> {
    let nd = game.num_defender_actions();
    if delta_hat.len() != nd {
        return Err(Error::DimensionMismatch(format!(
            "strategy has {} entries, game has {nd} defender actions",
            delta_hat.len()
        )));
    }
    let (_, f_hat) = game.attacker_best_response(delta_hat)?;

    // Affine side: mixing attacker actions cannot beat the best pure one.
    let mut affine_side_ok = true;
    let mut rng = StdRng::seed_from_u64(seed);
    for a in 0..game.num_attacker_actions() {
        let alpha = MixedStrategy::point(game.num_attacker_actions(), a)?;
        if game.mixed_utility(delta_hat, &alpha)? > f_hat + 1e-12 {
            affine_side_ok = false;
        }
    }

    // Convex side: no tested defense is more than epsilon better.
    let mut worst_violation = f64::NEG_INFINITY;
    let mut worst_delta = delta_hat.probs().to_vec();
    let mut check = |delta: MixedStrategy| -> Result<()> {
        let (_, f) = game.attacker_best_response(&delta)?;
        let violation = f_hat - f - epsilon;
        if violation > worst_violation {
            worst_violation = violation;
            worst_delta = delta.probs().to_vec();
        }
        Ok(())
    };
    for d in 0..nd {
        check(MixedStrategy::point(nd, d)?)?;
    }
    for _ in 0..samples {
        check(MixedStrategy::new(random_prob_vector(&mut rng, nd))?)?;
    }

    Ok(SaddleReport {
        pass: worst_violation <= 0.0 && affine_side_ok,
        value: f_hat,
        epsilon,
        worst_violation,
        worst_delta,
        affine_side_ok,
        samples,
    })
}

/// Both sides of the channel-mixing inequality for one instance.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexityReport {
    /// Vulnerability of the mixed channel.
    pub mixed_value: f64,
    /// Mixture of the individual vulnerabilities.
    pub average_value: f64,
    pub pass: bool,
}

/// Evaluates the vulnerability of the mixture against the mixture of
/// vulnerabilities: convex measures must satisfy `mixed <= average` up to
/// 1e-9 of slack.
pub fn check_convexity_theorem(
    prior: &Prior,
    measure: &VulnerabilityMeasure,
    channels: &[Channel],
    mu: &[f64],
) -> Result<ConvexityReport> {
    let padded = crate::channel::pad_compatible(channels)?;
    let mixed = crate::channel::compose_convex(&padded, mu)?;
    let mixed_value = posterior_vulnerability(measure, prior, &mixed)?;
    let mut average_value = 0.0;
    for (c, &w) in padded.iter().zip(mu) {
        average_value += w * posterior_vulnerability(measure, prior, c)?;
    }
    Ok(ConvexityReport {
        mixed_value,
        average_value,
        pass: mixed_value <= average_value + 1e-9,
    })
}

/// Random full-support prior over `n` secrets labeled `x0..`.
pub fn random_prior(rng: &mut StdRng, n: usize) -> Result<Prior> {
    Prior::new(index_labels("x", n), random_prob_vector(rng, n))
}

/// Random full-support channel with rows drawn as normalized uniforms.
pub fn random_channel(rng: &mut StdRng, nx: usize, ny: usize) -> Result<Channel> {
    let rows = (0..nx).map(|_| random_prob_vector(rng, ny)).collect();
    Channel::new(rows, index_labels("x", nx), index_labels("y", ny))
}

/// Random Bayes leakage game with one random channel per profile.
pub fn random_game(
    rng: &mut StdRng,
    nd: usize,
    na: usize,
    nx: usize,
    ny: usize,
) -> Result<LeakageGame> {
    let channels = (0..nd)
        .map(|_| {
            (0..na)
                .map(|_| random_channel(rng, nx, ny))
                .collect::<Result<Vec<Channel>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    LeakageGame::new(
        index_labels("d", nd),
        index_labels("a", na),
        channels,
        random_prior(rng, nx)?,
        VulnerabilityMeasure::Bayes,
    )
}

/// Observed Lipschitz estimate: the largest subgradient norm over the
/// simplex vertices and `samples` random strategies. Bayes games only.
pub fn lipschitz_estimate(game: &LeakageGame, samples: usize, seed: u64) -> Result<f64> {
    let nd = game.num_defender_actions();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut largest: f64 = 0.0;
    let mut probe = |delta: &MixedStrategy| -> Result<()> {
        let g = crate::solver::bayes_subgradient(game, delta)?;
        largest = largest.max(g.iter().map(|v| v * v).sum::<f64>().sqrt());
        Ok(())
    };
    for d in 0..nd {
        probe(&MixedStrategy::point(nd, d)?)?;
    }
    for _ in 0..samples {
        probe(&MixedStrategy::new(random_prob_vector(&mut rng, nd))?)?;
    }
    Ok(largest)
}

pub(crate) fn index_labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::solver::{solve_minimax, SolverConfig};

    #[test]
    fn grid_finds_millionaires_equilibrium() {
        let game = fixtures::two_millionaires();
        let r = grid_minimax(&game, 0.01).unwrap();
        assert!((r.best_delta.probs()[0] - 0.5).abs() <= 0.01 + 1e-12);
        assert!((r.best_value - 0.75).abs() <= 0.005 + 1e-12);
        // Attacker maximin agrees with the game value here.
        let (_, maximin) = r.attacker_maximin.unwrap();
        assert!((maximin - 0.75).abs() <= 0.005 + 1e-12);
    }

    #[test]
    fn grid_finds_binary_sum_equilibrium() {
        let game = fixtures::binary_sum();
        let r = grid_minimax(&game, 0.01).unwrap();
        assert!((r.best_value - 0.5).abs() <= 0.005 + 1e-12);
    }

    #[test]
    fn grid_on_trivial_game() {
        let c = Channel::new(
            vec![vec![0.5, 0.5], vec![0.25, 0.75]],
            index_labels("x", 2),
            index_labels("y", 2),
        )
        .unwrap();
        let prior = Prior::uniform(index_labels("x", 2)).unwrap();
        let expected =
            posterior_vulnerability(&VulnerabilityMeasure::Bayes, &prior, &c).unwrap();
        let game = LeakageGame::new(
            vec!["d0".to_string()],
            vec!["a0".to_string()],
            vec![vec![c]],
            prior,
            VulnerabilityMeasure::Bayes,
        )
        .unwrap();
        let r = grid_minimax(&game, 0.1).unwrap();
        assert_eq!(r.best_delta.probs(), [1.0]);
        assert_eq!(r.best_value, expected);
    }

    #[test]
    fn grid_rejects_large_dimension() {
        let mut rng = StdRng::seed_from_u64(1);
        let game = random_game(&mut rng, 5, 2, 2, 2).unwrap();
        assert!(matches!(
            grid_minimax(&game, 0.05),
            Err(Error::GridDimension { .. })
        ));
    }

    #[test]
    fn grid_covers_vertices_and_interior() {
        let grid = simplex_grid(3, 4);
        assert_eq!(grid.len(), 15); // C(6, 2)
        assert!(grid.contains(&vec![1.0, 0.0, 0.0]));
        assert!(grid.contains(&vec![0.0, 0.0, 1.0]));
        assert!(grid.contains(&vec![0.25, 0.5, 0.25]));
        for point in &grid {
            assert!((point.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn saddle_check_accepts_solver_output() {
        let game = fixtures::two_millionaires();
        let res = solve_minimax(&game, &SolverConfig::default()).unwrap();
        let report =
            verify_epsilon_saddle(&game, &res.delta_star, 1e-3, 500, DEFAULT_SEED).unwrap();
        assert!(report.pass, "worst violation {}", report.worst_violation);
        assert!(report.affine_side_ok);
    }

    #[test]
    fn saddle_check_rejects_vertex_strategy() {
        let game = fixtures::two_millionaires();
        let vertex = MixedStrategy::point(2, 0).unwrap();
        let report = verify_epsilon_saddle(&game, &vertex, 1e-3, 100, DEFAULT_SEED).unwrap();
        assert!(!report.pass);
        assert!(report.worst_violation > 0.2);
    }

    #[test]
    fn saddle_check_trivial_game_passes() {
        let c = Channel::new(
            vec![vec![1.0], vec![1.0]],
            index_labels("x", 2),
            vec!["y0".to_string()],
        )
        .unwrap();
        let game = LeakageGame::new(
            vec!["d0".to_string()],
            vec!["a0".to_string()],
            vec![vec![c]],
            Prior::uniform(index_labels("x", 2)).unwrap(),
            VulnerabilityMeasure::Bayes,
        )
        .unwrap();
        let report = verify_epsilon_saddle(
            &game,
            &MixedStrategy::point(1, 0).unwrap(),
            1e-3,
            10,
            DEFAULT_SEED,
        )
        .unwrap();
        assert!(report.pass);
    }

    #[test]
    fn saddle_check_rejects_wrong_length() {
        let game = fixtures::two_millionaires();
        let bad = MixedStrategy::uniform(3).unwrap();
        assert!(matches!(
            verify_epsilon_saddle(&game, &bad, 1e-3, 10, DEFAULT_SEED),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn convexity_point_mass_is_equality() {
        let mut rng = StdRng::seed_from_u64(3);
        let prior = random_prior(&mut rng, 3).unwrap();
        let channels = vec![
            random_channel(&mut rng, 3, 3).unwrap(),
            random_channel(&mut rng, 3, 3).unwrap(),
        ];
        let r = check_convexity_theorem(
            &prior,
            &VulnerabilityMeasure::Bayes,
            &channels,
            &[1.0, 0.0],
        )
        .unwrap();
        assert!(r.pass);
        assert_eq!(r.mixed_value, r.average_value);
    }

    #[test]
    fn convexity_on_blurred_bijections() {
        // Mixing the blurred bijection with the anti-bijection destroys
        // almost all leakage while the average stays near 1.
        let eps = 0.01;
        let labels = index_labels("x", 2);
        let outs = index_labels("y", 2);
        let c1 = Channel::new(
            vec![vec![1.0 - eps, eps], vec![eps, 1.0 - eps]],
            labels.clone(),
            outs.clone(),
        )
        .unwrap();
        let c3 = Channel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], labels.clone(), outs).unwrap();
        let prior = Prior::uniform(labels).unwrap();
        let r = check_convexity_theorem(&prior, &VulnerabilityMeasure::Bayes, &[c1, c3], &[0.5, 0.5])
            .unwrap();
        assert!(r.pass);
        assert!((r.mixed_value - 0.505).abs() < 1e-12);
        assert!((r.average_value - 0.995).abs() < 1e-12);
    }

    #[test]
    fn convexity_negative_control_fails() {
        // A concave function violates the mixing inequality on revealing
        // channels.
        let concave = VulnerabilityMeasure::custom(|p| {
            1.0 - p.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        });
        let labels = index_labels("x", 2);
        let outs = index_labels("y", 2);
        let c2 = Channel::new(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            labels.clone(),
            outs.clone(),
        )
        .unwrap();
        let c3 = Channel::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]], labels.clone(), outs).unwrap();
        let prior = Prior::uniform(labels).unwrap();
        let r = check_convexity_theorem(&prior, &concave, &[c2, c3], &[0.5, 0.5]).unwrap();
        assert!(!r.pass);
    }

    #[test]
    fn lipschitz_estimate_bounded_for_bayes() {
        let game = fixtures::two_millionaires();
        let g = lipschitz_estimate(&game, 100, DEFAULT_SEED).unwrap();
        // Bayes subgradient coordinates are at most 1.
        assert!(g > 0.0 && g <= (2.0f64).sqrt() + 1e-12);
    }
}
