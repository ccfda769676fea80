//! Equilibrium computation for the defender.
//!
//! The defender's problem is to minimize `f(delta) = max_a V[pi, C_delta_a]`
//! over the probability simplex: the best-response value of the attacker,
//! which is convex and piecewise built from the vulnerability of the
//! averaged channels. Two routes are provided:
//!
//! * [`solve_minimax`]: projected subgradient descent from the uniform
//!   start, step size `step_scale / sqrt(k)`, tracking the best iterate and
//!   an a-posteriori gap bound. Works for every convex measure (exact
//!   subgradients for Bayes, finite differences otherwise).
//! * [`solve_lp_bayes`]: exact linear-programming reformulation, available
//!   because the Bayes objective is piecewise linear in `delta`.

mod lp;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{LeakageGame, MixedStrategy};
use crate::vulnerability::posterior_raw;

pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_MAX_ITERATIONS: usize = 50_000;
pub const DEFAULT_STEP_SCALE: f64 = 0.1;
/// Forward-difference step for measures without an exact subgradient.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// Upper bound on the distance from the uniform start to any point of the
/// probability simplex (the simplex diameter).
const SIMPLEX_RADIUS: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Serialize)]
pub struct SolverConfig {
    /// Target accuracy for the a-posteriori gap bound.
    pub epsilon: f64,
    pub max_iterations: usize,
    /// Step size at iteration `k` is `step_scale / sqrt(k)`.
    pub step_scale: f64,
    /// Reserved for randomized tie perturbation; unused by the default
    /// deterministic tie-breaking.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            step_scale: DEFAULT_STEP_SCALE,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidDistribution(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(self.step_scale > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "step_scale must be positive, got {}",
                self.step_scale
            )));
        }
        Ok(())
    }
}

/// Defender equilibrium strategy with its certificate.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumResult {
    pub delta_star: MixedStrategy,
    /// Attacker best-response value at `delta_star`; equals the maximum of
    /// `certificate`.
    pub value: f64,
    pub iterations_used: usize,
    /// Per-attacker-action value of the averaged channel at `delta_star`.
    pub certificate: Vec<f64>,
    /// A-posteriori bound on `value - optimum`; zero for the exact LP route.
    pub gap_bound: f64,
}

/// Per-iteration diagnostics of the subgradient loop.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub objective: f64,
    pub best_objective: f64,
    pub step_size: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SubgradientTrace {
    pub rows: Vec<TraceRow>,
}

/// Euclidean projection onto the probability simplex by sorting and
/// thresholding: the result is `max(v_i - theta, 0)` for the unique `theta`
/// that makes the entries sum to one.
pub fn project_simplex(v: &[f64]) -> Result<MixedStrategy> {
    if v.is_empty() {
        return Err(Error::DimensionMismatch("empty vector".into()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("projection input".into()));
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if s - candidate > 0.0 {
            theta = candidate;
        }
    }
    let probs: Vec<f64> = v.iter().map(|&x| (x - theta).max(0.0)).collect();
    // Sorting guarantees the sum is 1 up to rounding; rescale the dust away.
    let total: f64 = probs.iter().sum();
    MixedStrategy::new(probs.into_iter().map(|p| p / total).collect())
}

/// Rows of the averaged channel for attacker action `a` under arbitrary
/// (not necessarily stochastic) defender weights.
fn composed_rows(game: &LeakageGame, a: usize, weights: &[f64]) -> Vec<Vec<f64>> {
    let nx = game.prior().len();
    let ny = game.channel(0, a).num_outputs();
    let mut rows = vec![vec![0.0; ny]; nx];
    for (d, &w) in weights.iter().enumerate() {
        let c = game.channel(d, a);
        for x in 0..nx {
            for y in 0..ny {
                rows[x][y] += w * c.entry(x, y);
            }
        }
    }
    rows
}

/// Exact subgradient of the best-response objective for Bayes games.
///
/// With `a*` the best response to `delta` and, for each output `y`, `x*_y`
/// the secret maximizing `pi(x) C_delta_a*(x, y)`, the subgradient is
/// `g_d = sum_y pi(x*_y) C_{d,a*}(x*_y, y)`. Ties break toward the lowest
/// index in both maximizations.
pub fn bayes_subgradient(game: &LeakageGame, delta: &MixedStrategy) -> Result<Vec<f64>> {
    if !game.measure().is_bayes() {
        return Err(Error::NonBayesMeasure);
    }
    let (a_star, _) = game.attacker_best_response(delta)?;
    let pi = game.prior().probs();
    let mixed = composed_rows(game, a_star, delta.probs());
    let nx = pi.len();
    let ny = mixed[0].len();
    let nd = game.num_defender_actions();
    let mut g = vec![0.0; nd];
    for y in 0..ny {
        let mut x_star = 0;
        let mut best = f64::NEG_INFINITY;
        for x in 0..nx {
            let v = pi[x] * mixed[x][y];
            if v > best {
                best = v;
                x_star = x;
            }
        }
        for (d, gd) in g.iter_mut().enumerate() {
            *gd += pi[x_star] * game.channel(d, a_star).entry(x_star, y);
        }
    }
    Ok(g)
}

/// Finite-difference subgradient estimate for arbitrary convex measures.
///
/// Forward differences of the active branch are taken along the coordinate
/// directions of the positively-homogeneous extension of the objective and
/// then re-centered onto the tangent space of the simplex. Adding a
/// multiple of the all-ones vector does not change a projected subgradient
/// step, so the centered vector is interchangeable with the exact
/// subgradient wherever both exist.
pub fn generic_subgradient(game: &LeakageGame, delta: &MixedStrategy, h: f64) -> Result<Vec<f64>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::NonFinite(format!("finite-difference step {h}")));
    }
    let (a_star, _) = game.attacker_best_response(delta)?;
    let pi = game.prior().probs();
    let measure = game.measure();
    let branch = |weights: &[f64]| -> Result<f64> {
        posterior_raw(measure, pi, &composed_rows(game, a_star, weights))
    };
    let base = branch(delta.probs())?;
    let nd = game.num_defender_actions();
    let mut g = vec![0.0; nd];
    let mut weights = delta.probs().to_vec();
    for d in 0..nd {
        weights[d] += h;
        g[d] = (branch(&weights)? - base) / h;
        weights[d] = delta.probs()[d];
    }
    let mean = g.iter().sum::<f64>() / nd as f64;
    for gd in &mut g {
        *gd -= mean;
    }
    Ok(g)
}

fn subgradient(game: &LeakageGame, delta: &MixedStrategy) -> Result<Vec<f64>> {
    if game.measure().is_bayes() {
        bayes_subgradient(game, delta)
    } else {
        generic_subgradient(game, delta, DEFAULT_FD_STEP)
    }
}

fn certificate_at(game: &LeakageGame, delta: &MixedStrategy) -> Result<(Vec<f64>, f64)> {
    let certificate = (0..game.num_attacker_actions())
        .map(|a| game.action_value(delta, a))
        .collect::<Result<Vec<f64>>>()?;
    let value = certificate.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((certificate, value))
}

/// Projected subgradient descent on the attacker's best-response value.
///
/// Starts from the uniform distribution and returns the best iterate seen.
/// Stops when the a-posteriori bound
/// `(R^2 + G^2 sum step^2) / (2 sum step)` drops below `epsilon` (with `R`
/// the simplex diameter and `G` the running maximum subgradient norm) or
/// when `max_iterations` is reached; in the latter case the result simply
/// carries a `gap_bound` above `epsilon`.
pub fn solve_minimax(game: &LeakageGame, config: &SolverConfig) -> Result<EquilibriumResult> {
    Ok(solve_minimax_traced(game, config)?.0)
}

/// Same as [`solve_minimax`], also returning the per-iteration trace.
pub fn solve_minimax_traced(
    game: &LeakageGame,
    config: &SolverConfig,
) -> Result<(EquilibriumResult, SubgradientTrace)> {
    config.validate()?;
    let nd = game.num_defender_actions();
    let mut trace = SubgradientTrace::default();

    if nd == 1 {
        // The simplex is a single point; there is nothing to iterate.
        let delta = MixedStrategy::point(1, 0)?;
        let (certificate, value) = certificate_at(game, &delta)?;
        return Ok((
            EquilibriumResult {
                delta_star: delta,
                value,
                iterations_used: 0,
                certificate,
                gap_bound: 0.0,
            },
            trace,
        ));
    }

    let mut delta = MixedStrategy::uniform(nd)?;
    let mut best_delta = delta.clone();
    let mut best_f = f64::INFINITY;
    let mut norm_max: f64 = 0.0;
    let mut step_sum = 0.0;
    let mut step_sq_sum = 0.0;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;

    for k in 1..=config.max_iterations {
        iterations = k;
        let (_, f) = game.attacker_best_response(&delta)?;
        if f < best_f {
            best_f = f;
            best_delta = delta.clone();
        }
        let g = subgradient(game, &delta)?;
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        norm_max = norm_max.max(norm);
        let step = config.step_scale / (k as f64).sqrt();
        step_sum += step;
        step_sq_sum += step * step;
        gap = (SIMPLEX_RADIUS * SIMPLEX_RADIUS + norm_max * norm_max * step_sq_sum)
            / (2.0 * step_sum);
        trace.rows.push(TraceRow {
            iteration: k,
            objective: f,
            best_objective: best_f,
            step_size: step,
        });
        if gap <= config.epsilon {
            break;
        }
        let moved: Vec<f64> = delta
            .probs()
            .iter()
            .zip(&g)
            .map(|(x, gd)| x - step * gd)
            .collect();
        delta = project_simplex(&moved)?;
    }

    let (certificate, value) = certificate_at(game, &best_delta)?;
    Ok((
        EquilibriumResult {
            delta_star: best_delta,
            value,
            iterations_used: iterations,
            certificate,
            gap_bound: gap,
        },
        trace,
    ))
}

/// Exact minimax solution for Bayes games via linear programming.
///
/// Minimizes `t` over `(delta, z, t)` subject to
/// `z_{a,y} >= sum_d delta(d) pi(x) C_da(x,y)` for every `(a, y, x)`,
/// `sum_y z_{a,y} <= t` for every `a`, and `delta` on the simplex. At the
/// optimum each `z_{a,y}` is the Bayes summand, so `t` is the best-response
/// value.
pub fn solve_lp_bayes(game: &LeakageGame) -> Result<EquilibriumResult> {
    if !game.measure().is_bayes() {
        return Err(Error::NonBayesMeasure);
    }
    let nd = game.num_defender_actions();
    let na = game.num_attacker_actions();
    let pi = game.prior().probs();
    let nx = pi.len();

    // Variable layout: [delta | z (grouped by attacker action) | t].
    let mut z_offset = vec![0usize; na];
    let mut nz = 0;
    for a in 0..na {
        z_offset[a] = nd + nz;
        nz += game.channel(0, a).num_outputs();
    }
    let t_col = nd + nz;
    let ncols = t_col + 1;

    let mut constraints = Vec::new();
    for a in 0..na {
        let ny = game.channel(0, a).num_outputs();
        for y in 0..ny {
            for x in 0..nx {
                let mut coeffs = vec![0.0; ncols];
                for d in 0..nd {
                    coeffs[d] = pi[x] * game.channel(d, a).entry(x, y);
                }
                coeffs[z_offset[a] + y] = -1.0;
                constraints.push(lp::Constraint {
                    coeffs,
                    relation: lp::Relation::Le,
                    rhs: 0.0,
                });
            }
        }
        let mut coeffs = vec![0.0; ncols];
        for y in 0..ny {
            coeffs[z_offset[a] + y] = 1.0;
        }
        coeffs[t_col] = -1.0;
        constraints.push(lp::Constraint {
            coeffs,
            relation: lp::Relation::Le,
            rhs: 0.0,
        });
    }
    let mut simplex_row = vec![0.0; ncols];
    simplex_row[..nd].fill(1.0);
    constraints.push(lp::Constraint {
        coeffs: simplex_row,
        relation: lp::Relation::Eq,
        rhs: 1.0,
    });

    let mut objective = vec![0.0; ncols];
    objective[t_col] = 1.0;
    let solution = lp::minimize(&objective, &constraints)?;

    // The LP keeps delta non-negative and summing to one up to solver
    // arithmetic; rescale the rounding away.
    let raw = &solution.x[..nd];
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::LinearProgram("defender weights vanished".into()));
    }
    let delta = MixedStrategy::new(raw.iter().map(|v| v / total).collect())?;
    let (certificate, value) = certificate_at(game, &delta)?;
    // The recomputed best-response value and the LP optimum must coincide up
    // to solver arithmetic.
    if (value - solution.objective).abs() > 1e-6 {
        return Err(Error::LinearProgram(format!(
            "optimum {} inconsistent with recomputed value {value}",
            solution.objective
        )));
    }
    Ok(EquilibriumResult {
        delta_star: delta,
        value,
        iterations_used: solution.pivots,
        certificate,
        gap_bound: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::vulnerability::{random_prob_vector, VulnerabilityMeasure};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn projection_identity_on_distributions() {
        let p = project_simplex(&[0.2, 0.5, 0.3]).unwrap();
        assert!((p.probs()[0] - 0.2).abs() < 1e-15);
        assert!((p.probs()[1] - 0.5).abs() < 1e-15);
        assert!((p.probs()[2] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn projection_clips_to_vertex() {
        let p = project_simplex(&[2.0, 0.0]).unwrap();
        assert_eq!(p.probs(), [1.0, 0.0]);
    }

    #[test]
    fn projection_threshold_case() {
        // theta = 0.1: entries become (0.5, 0.5, 0).
        let p = project_simplex(&[0.6, 0.6, 0.1]).unwrap();
        assert!((p.probs()[0] - 0.5).abs() < 1e-12);
        assert!((p.probs()[1] - 0.5).abs() < 1e-12);
        assert!(p.probs()[2].abs() < 1e-12);
    }

    #[test]
    fn projection_rejects_non_finite() {
        assert!(project_simplex(&[f64::NAN, 0.0]).is_err());
        assert!(project_simplex(&[f64::INFINITY, 0.0]).is_err());
    }

    #[test]
    fn projection_matches_grid_search() {
        // Brute-force nearest point on a fine simplex grid.
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..20 {
            let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let p = project_simplex(&v).unwrap();
            let exact_d2: f64 = p
                .probs()
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let res = 1000usize;
            let mut best = f64::INFINITY;
            for i in 0..=res {
                for j in 0..=(res - i) {
                    let k = res - i - j;
                    let q = [
                        i as f64 / res as f64,
                        j as f64 / res as f64,
                        k as f64 / res as f64,
                    ];
                    let d2: f64 = q.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum();
                    if d2 < best {
                        best = d2;
                    }
                }
            }
            // The grid point cannot beat the true projection, and must be
            // within the grid's own resolution of it.
            assert!(exact_d2 <= best + 1e-12);
            assert!(best - exact_d2 <= 2.0 * (1.0 / res as f64) + 1e-9);
        }
    }

    #[test]
    fn bayes_subgradient_on_millionaires_vertex() {
        let g = fixtures::two_millionaires();
        let delta = MixedStrategy::point(2, 0).unwrap();
        let grad = bayes_subgradient(&g, &delta).unwrap();
        assert!((grad[0] - 1.0).abs() < 1e-15);
        assert!((grad[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bayes_subgradient_on_binary_sum_vertex() {
        let g = fixtures::binary_sum();
        let delta = MixedStrategy::point(2, 0).unwrap();
        let grad = bayes_subgradient(&g, &delta).unwrap();
        assert!((grad[0] - 1.0).abs() < 1e-15);
        assert!(grad[1].abs() < 1e-15);
    }

    #[test]
    fn bayes_subgradient_requires_bayes() {
        let g = fixtures::two_millionaires();
        let custom = crate::game::LeakageGame::new(
            g.defender_actions().to_vec(),
            g.attacker_actions().to_vec(),
            (0..2)
                .map(|d| (0..2).map(|a| g.channel(d, a).clone()).collect())
                .collect(),
            g.prior().clone(),
            VulnerabilityMeasure::custom(|p| p.iter().map(|v| v * v).sum()),
        )
        .unwrap();
        assert!(matches!(
            bayes_subgradient(&custom, &MixedStrategy::uniform(2).unwrap()),
            Err(Error::NonBayesMeasure)
        ));
    }

    #[test]
    fn subgradient_inequality_holds() {
        let mut rng = StdRng::seed_from_u64(23);
        for game in [fixtures::two_millionaires(), fixtures::binary_sum()] {
            for _ in 0..100 {
                let delta =
                    MixedStrategy::new(random_prob_vector(&mut rng, 2)).unwrap();
                let g = bayes_subgradient(&game, &delta).unwrap();
                let (_, f) = game.attacker_best_response(&delta).unwrap();
                let other = MixedStrategy::new(random_prob_vector(&mut rng, 2)).unwrap();
                let (_, f_other) = game.attacker_best_response(&other).unwrap();
                let linear: f64 = g
                    .iter()
                    .zip(other.probs().iter().zip(delta.probs()))
                    .map(|(gd, (o, d))| gd * (o - d))
                    .sum();
                assert!(f_other >= f + linear - 1e-9);
            }
        }
    }

    fn centered(mut g: Vec<f64>) -> Vec<f64> {
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        for v in &mut g {
            *v -= mean;
        }
        g
    }

    #[test]
    fn generic_matches_exact_route_at_smooth_points() {
        let game = fixtures::two_millionaires();
        let mut rng = StdRng::seed_from_u64(29);
        for _ in 0..50 {
            // Stay away from the kink at 1/2 where the active branch flips.
            let p: f64 = if rng.gen_bool(0.5) {
                rng.gen_range(0.05..0.45)
            } else {
                rng.gen_range(0.55..0.95)
            };
            let delta = MixedStrategy::new(vec![p, 1.0 - p]).unwrap();
            let exact = centered(bayes_subgradient(&game, &delta).unwrap());
            let fd = generic_subgradient(&game, &delta, 1e-6).unwrap();
            for (e, f) in exact.iter().zip(&fd) {
                assert!((e - f).abs() < 1e-4, "exact {exact:?} vs fd {fd:?}");
            }
        }
    }

    #[test]
    fn generic_vanishes_on_constant_objective() {
        // Both defender actions share one channel, so the objective is
        // constant; a smooth measure keeps the finite differences clean.
        let c = crate::channel::Channel::new(
            vec![vec![0.7, 0.3], vec![0.2, 0.8]],
            vec!["x0", "x1"],
            vec!["y0", "y1"],
        )
        .unwrap();
        let game = crate::game::LeakageGame::new(
            vec!["d0", "d1"],
            vec!["a0"],
            vec![vec![c.clone()], vec![c]],
            crate::channel::Prior::uniform(vec!["x0", "x1"]).unwrap(),
            VulnerabilityMeasure::custom(|p| p.iter().map(|v| v * v).sum()),
        )
        .unwrap();
        let g = generic_subgradient(&game, &MixedStrategy::new(vec![0.3, 0.7]).unwrap(), 1e-6)
            .unwrap();
        for v in g {
            assert!(v.abs() < 1e-4);
        }
    }

    #[test]
    fn generic_matches_bayes_for_identity_gain() {
        let bayes_game = fixtures::two_millionaires();
        let identity_gain = VulnerabilityMeasure::g_vulnerability(
            vec!["w0", "w1"],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let g_game = crate::game::LeakageGame::new(
            bayes_game.defender_actions().to_vec(),
            bayes_game.attacker_actions().to_vec(),
            (0..2)
                .map(|d| (0..2).map(|a| bayes_game.channel(d, a).clone()).collect())
                .collect(),
            bayes_game.prior().clone(),
            identity_gain,
        )
        .unwrap();
        let delta = MixedStrategy::new(vec![0.3, 0.7]).unwrap();
        let exact = centered(bayes_subgradient(&bayes_game, &delta).unwrap());
        let fd = generic_subgradient(&g_game, &delta, 1e-6).unwrap();
        for (e, f) in exact.iter().zip(&fd) {
            assert!((e - f).abs() < 1e-4);
        }
    }

    #[test]
    fn millionaires_equilibrium_both_routes() {
        let game = fixtures::two_millionaires();
        let sub = solve_minimax(&game, &SolverConfig::default()).unwrap();
        assert!((sub.value - 0.75).abs() < 1e-3, "value {}", sub.value);
        assert!((sub.delta_star.probs()[0] - 0.5).abs() < 1e-3);
        let lp = solve_lp_bayes(&game).unwrap();
        assert!((lp.value - 0.75).abs() < 1e-9);
        assert!((lp.delta_star.probs()[0] - 0.5).abs() < 1e-9);
        assert_eq!(lp.gap_bound, 0.0);
    }

    #[test]
    fn binary_sum_equilibrium_both_routes() {
        let game = fixtures::binary_sum();
        let sub = solve_minimax(&game, &SolverConfig::default()).unwrap();
        assert!((sub.value - 0.5).abs() < 1e-3);
        assert!((sub.delta_star.probs()[0] - 0.5).abs() < 1e-3);
        let lp = solve_lp_bayes(&game).unwrap();
        assert!((lp.value - 0.5).abs() < 1e-6);
    }

    #[test]
    fn trivial_game_needs_no_iterations() {
        let c = crate::channel::Channel::new(
            vec![vec![0.5, 0.5], vec![0.25, 0.75]],
            vec!["x0", "x1"],
            vec!["y0", "y1"],
        )
        .unwrap();
        let game = crate::game::LeakageGame::new(
            vec!["d0"],
            vec!["a0"],
            vec![vec![c]],
            crate::channel::Prior::uniform(vec!["x0", "x1"]).unwrap(),
            VulnerabilityMeasure::Bayes,
        )
        .unwrap();
        let res = solve_minimax(&game, &SolverConfig::default()).unwrap();
        assert_eq!(res.iterations_used, 0);
        assert_eq!(res.gap_bound, 0.0);
        assert_eq!(res.delta_star.probs(), [1.0]);
        assert_eq!(res.value, game.pure_utility_at(0, 0).unwrap());
    }

    #[test]
    fn value_is_max_of_certificate() {
        let game = fixtures::two_millionaires();
        for res in [
            solve_minimax(&game, &SolverConfig::default()).unwrap(),
            solve_lp_bayes(&game).unwrap(),
        ] {
            let max = res
                .certificate
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(res.value, max);
            assert!(res.gap_bound >= 0.0);
        }
    }

    #[test]
    fn best_objective_is_monotone_and_trace_deterministic() {
        let game = fixtures::two_millionaires();
        let config = SolverConfig {
            max_iterations: 500,
            ..SolverConfig::default()
        };
        let (r1, t1) = solve_minimax_traced(&game, &config).unwrap();
        let (r2, t2) = solve_minimax_traced(&game, &config).unwrap();
        assert_eq!(r1.delta_star.probs(), r2.delta_star.probs());
        assert_eq!(r1.value, r2.value);
        assert_eq!(t1.rows.len(), t2.rows.len());
        let mut prev = f64::INFINITY;
        for (a, b) in t1.rows.iter().zip(&t2.rows) {
            assert_eq!(a.objective, b.objective);
            assert_eq!(a.best_objective, b.best_objective);
            assert!(a.best_objective <= prev + 1e-15);
            prev = a.best_objective;
        }
    }

    #[test]
    fn lp_handles_non_square_random_games() {
        let mut rng = StdRng::seed_from_u64(31);
        for _ in 0..10 {
            let game = crate::oracle::random_game(&mut rng, 3, 2, 3, 4).unwrap();
            let lp = solve_lp_bayes(&game).unwrap();
            let sub = solve_minimax(&game, &SolverConfig::default()).unwrap();
            assert!(
                (lp.value - sub.value).abs() < 1e-3,
                "lp {} vs subgradient {}",
                lp.value,
                sub.value
            );
            // The LP value can never exceed the value at any strategy.
            assert!(lp.value <= sub.value + 1e-9);
        }
    }

    #[test]
    fn config_validation() {
        let game = fixtures::two_millionaires();
        for bad in [
            SolverConfig {
                epsilon: 0.0,
                ..SolverConfig::default()
            },
            SolverConfig {
                max_iterations: 0,
                ..SolverConfig::default()
            },
            SolverConfig {
                step_scale: -1.0,
                ..SolverConfig::default()
            },
        ] {
            assert!(solve_minimax(&game, &bad).is_err());
        }
    }
}
