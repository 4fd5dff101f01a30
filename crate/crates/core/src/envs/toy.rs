//! A two-state, two-action game with `N_T = 3`: small enough that all 256
//! deterministic policies can be enumerated, yet with mean field coupling in
//! both the dynamics and the reward.

use super::TabularGame;
use crate::types::{Distribution, HorizonSpec};

/// Base reward `[state][action]`.
const BASE: [[f64; 2]; 2] = [[0.0, -0.1], [0.6, 0.3]];
/// Crowd-aversion weight on `mu_n(x)`.
const CROWDING: f64 = 1.5;

/// Action 0 leaves the state w.p. 0.1; action 1 switches w.p. `0.8 - 0.4 mu(other)`.
/// Reward is `BASE[x][a] - 1.5 mu(x) + 0.1 n x`; `m_0 = (0.7, 0.3)`.
pub fn toy_env() -> TabularGame {
    TabularGame::new(
        "toy",
        HorizonSpec::steps(3).expect("valid horizon"),
        2,
        2,
        Distribution::new(vec![0.7, 0.3]).expect("valid m0"),
        |_, x, a, mu| {
            let switch = if a == 0 { 0.1 } else { 0.8 - 0.4 * mu.get(1 - x) };
            let mut row = vec![0.0; 2];
            row[x] = 1.0 - switch;
            row[1 - x] = switch;
            row
        },
        |n, x, a, mu| BASE[x][a] - CROWDING * mu.get(x) + 0.1 * (n * x) as f64,
    )
}

/// Same dynamics, reward independent of the population.
pub fn toy_env_decoupled() -> TabularGame {
    TabularGame::new(
        "toy-decoupled",
        HorizonSpec::steps(3).expect("valid horizon"),
        2,
        2,
        Distribution::new(vec![0.7, 0.3]).expect("valid m0"),
        |_, x, a, _| {
            let switch = if a == 0 { 0.1 } else { 0.6 };
            let mut row = vec![0.0; 2];
            row[x] = 1.0 - switch;
            row[1 - x] = switch;
            row
        },
        |n, x, a, _| BASE[x][a] + 0.1 * (n * x) as f64,
    )
}
