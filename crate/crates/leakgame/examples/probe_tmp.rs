use leakgame::oracle::random_game;
use leakgame::solver::{solve_lp_bayes, solve_minimax, SolverConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn main() {
    let mut rng = StdRng::seed_from_u64(1234);
    let mut games = Vec::new();
    for _ in 0..50 {
        let nd = rng.gen_range(2..=4);
        let na = rng.gen_range(2..=5);
        let nx = rng.gen_range(2..=4);
        let ny = rng.gen_range(2..=4);
        games.push(random_game(&mut rng, nd, na, nx, ny).unwrap());
    }
    for max_iter in [50_000usize, 100_000, 200_000, 300_000] {
        let config = SolverConfig {
            max_iterations: max_iter,
            ..SolverConfig::default()
        };
        let start = std::time::Instant::now();
        let mut worst: f64 = 0.0;
        for g in &games {
            let lp = solve_lp_bayes(g).unwrap();
            let sub = solve_minimax(g, &config).unwrap();
            worst = worst.max((lp.value - sub.value).abs());
        }
        println!(
            "max_iter {:>7}: worst |lp - sub| = {:.3e}, elapsed {:?}",
            max_iter,
            worst,
            start.elapsed()
        );
    }
}
