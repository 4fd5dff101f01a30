//! Three-population chasing game on a grid.
//!
//! The state is `(population, cell)`, flattened as `population * cells + cell`.
//! Each population keeps a fixed third of the total mass; per-population
//! densities `mu^i` are the slices of the joint distribution rescaled by that
//! mass. Reward for population `i` at `x`:
//! `-ln mu^i(x) + sum_{j != i} mu^j(x) rbar[i][j]`.

use rand::RngCore;

use super::grid::{GridSpec, NUM_MOVES};
use crate::env::Environment;
use crate::error::{invalid, Result};
use crate::types::{floored_ln, Distribution, HorizonSpec};

pub const POPULATIONS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct MultiPopParams {
    pub grid: GridSpec,
    /// `rbar[i][j]`, antisymmetric.
    pub interaction: [[f64; POPULATIONS]; POPULATIONS],
}

/// `rbar^{1,2} = -1`, `rbar^{1,3} = 1`, `rbar^{2,3} = -1`, extended antisymmetrically.
pub const DEFAULT_INTERACTION: [[f64; POPULATIONS]; POPULATIONS] =
    [[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]];

impl Default for MultiPopParams {
    fn default() -> Self {
        Self { grid: GridSpec::chase_arena(), interaction: DEFAULT_INTERACTION }
    }
}

#[derive(Debug, Clone)]
pub struct MultiPopEnv {
    params: MultiPopParams,
    horizon: HorizonSpec,
    cells: usize,
    next: Vec<[usize; NUM_MOVES]>,
    m0: Distribution,
    pop_mass: [f64; POPULATIONS],
}

pub fn multipop_env(params: MultiPopParams) -> Result<MultiPopEnv> {
    let r = &params.interaction;
    for i in 0..POPULATIONS {
        for j in 0..POPULATIONS {
            if r[i][j] != -r[j][i] {
                return Err(invalid("interaction", format!("rbar[{i}][{j}] != -rbar[{j}][{i}]")));
            }
        }
    }
    let grid = &params.grid;
    if let Some(i) = grid.starts.iter().position(|s| s.is_empty()) {
        return Err(invalid("grid", format!("map has no start cell for population {}", i + 1)));
    }
    let horizon = HorizonSpec::steps(grid.n_t)?;
    let cells = grid.cells();
    let next = (0..cells).map(|c| std::array::from_fn(|a| grid.step(c, a))).collect();
    let share = 1.0 / POPULATIONS as f64;
    let mut mass = vec![0.0; POPULATIONS * cells];
    for i in 0..POPULATIONS {
        let start = grid.population_start(i);
        for c in 0..cells {
            mass[i * cells + c] = share * start.get(c);
        }
    }
    let m0 = Distribution::new(mass)?;
    Ok(MultiPopEnv { params, horizon, cells, next, m0, pop_mass: [share; POPULATIONS] })
}

impl MultiPopEnv {
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn state(&self, population: usize, cell: usize) -> usize {
        population * self.cells + cell
    }

    /// Density of population `i` at `cell`, normalized within the population.
    pub fn density(&self, mu: &Distribution, i: usize, cell: usize) -> f64 {
        mu.get(self.state(i, cell)) / self.pop_mass[i]
    }

    pub fn grid(&self) -> &GridSpec {
        &self.params.grid
    }
}

impl Environment for MultiPopEnv {
    fn name(&self) -> &str {
        "multipop"
    }

    fn num_states(&self) -> usize {
        POPULATIONS * self.cells
    }

    fn num_actions(&self) -> usize {
        NUM_MOVES
    }

    fn horizon(&self) -> HorizonSpec {
        self.horizon
    }

    fn initial_distribution(&self) -> Distribution {
        self.m0.clone()
    }

    fn transition(&self, _n: usize, x: usize, a: usize, _mu: &Distribution) -> Distribution {
        let (i, c) = (x / self.cells, x % self.cells);
        Distribution::point(self.num_states(), self.state(i, self.next[c][a]))
    }

    fn reward(&self, _n: usize, x: usize, _a: usize, mu: &Distribution) -> f64 {
        let (i, c) = (x / self.cells, x % self.cells);
        let mut r = -floored_ln(self.density(mu, i, c));
        for j in (0..POPULATIONS).filter(|j| *j != i) {
            r += self.density(mu, j, c) * self.params.interaction[i][j];
        }
        r
    }

    fn sample_next(&self, _n: usize, x: usize, a: usize, _mu: &Distribution, _rng: &mut dyn RngCore) -> usize {
        let (i, c) = (x / self.cells, x % self.cells);
        self.state(i, self.next[c][a])
    }

    fn num_populations(&self) -> usize {
        POPULATIONS
    }

    fn population_of(&self, x: usize) -> usize {
        x / self.cells
    }
}
