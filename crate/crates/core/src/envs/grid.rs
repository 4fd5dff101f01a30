//! Two-dimensional grid worlds: four-rooms exploration and maze crowd
//! modeling with congestion.
//!
//! # Map format
//!
//! A map is plain text, one grid row per line, every row the same width:
//!
//! | char | meaning |
//! |------|---------|
//! | `#`  | wall |
//! | `.`  | floor |
//! | `R`  | floor, the target cell `x_ref` (at most one) |
//! | `1`-`3` | floor, initial mass of that population |
//!
//! Empty lines and lines starting with `;` are ignored. Every state is a cell
//! (walls included, they are simply unreachable). The initial distribution of
//! population `k` is uniform over the cells marked `k`; single-population maps
//! without any digit start uniform over all floor cells.

use std::collections::VecDeque;

use rand::RngCore;

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::types::{floored_ln, Distribution, HorizonSpec};

pub const STAY: usize = 0;
pub const LEFT: usize = 1;
pub const RIGHT: usize = 2;
pub const UP: usize = 3;
pub const DOWN: usize = 4;
pub const NUM_MOVES: usize = 5;

pub const FOUR_ROOMS_MAP: &str = include_str!("../../assets/four_rooms.map");
pub const MAZE_MAP: &str = include_str!("../../assets/maze.map");
pub const CHASE_MAP: &str = include_str!("../../assets/chase.map");

/// Default horizon for grid games.
pub const GRID_HORIZON: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub width: usize,
    pub height: usize,
    pub walls: Vec<bool>,
    pub n_t: usize,
    pub target: Option<usize>,
    /// Cells marked with population digits `1..=3`, by population.
    pub starts: [Vec<usize>; 3],
}

impl GridSpec {
    pub fn parse(text: &str, n_t: usize) -> Result<Self> {
        let mut walls = Vec::new();
        let mut target = None;
        let mut starts: [Vec<usize>; 3] = Default::default();
        let mut width = 0;
        let mut height = 0;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end();
            if line.is_empty() || line.starts_with(';') {
                continue;
            }
            let err = |reason: String| Error::MapParse { line: lineno + 1, reason };
            let row_width = line.chars().count();
            if height == 0 {
                width = row_width;
            } else if row_width != width {
                return Err(err(format!("row has width {row_width}, expected {width}")));
            }
            for (col, ch) in line.chars().enumerate() {
                let cell = height * width + col;
                match ch {
                    '#' => walls.push(true),
                    '.' => walls.push(false),
                    'R' => {
                        if target.replace(cell).is_some() {
                            return Err(err("more than one target cell".into()));
                        }
                        walls.push(false);
                    }
                    '1'..='3' => {
                        starts[(ch as u8 - b'1') as usize].push(cell);
                        walls.push(false);
                    }
                    other => return Err(err(format!("unknown map character {other:?}"))),
                }
            }
            height += 1;
        }
        if height == 0 {
            return Err(Error::MapParse { line: 0, reason: "empty map".into() });
        }
        if walls.iter().all(|w| *w) {
            return Err(Error::MapParse { line: 0, reason: "map has no floor cell".into() });
        }
        HorizonSpec::steps(n_t)?;
        Ok(Self { width, height, walls, n_t, target, starts })
    }

    pub fn four_rooms() -> Self {
        Self::parse(FOUR_ROOMS_MAP, GRID_HORIZON).expect("bundled map parses")
    }

    pub fn maze() -> Self {
        Self::parse(MAZE_MAP, GRID_HORIZON).expect("bundled map parses")
    }

    pub fn chase_arena() -> Self {
        Self::parse(CHASE_MAP, GRID_HORIZON).expect("bundled map parses")
    }

    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    pub fn is_wall(&self, cell: usize) -> bool {
        self.walls[cell]
    }

    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell % self.width, cell / self.width)
    }

    /// Where `action` leads from `cell`; blocked moves stay put.
    pub fn step(&self, cell: usize, action: usize) -> usize {
        let (c, r) = self.coords(cell);
        let target = match action {
            LEFT if c > 0 => Some(cell - 1),
            RIGHT if c + 1 < self.width => Some(cell + 1),
            UP if r > 0 => Some(cell - self.width),
            DOWN if r + 1 < self.height => Some(cell + self.width),
            _ => None,
        };
        match target {
            Some(t) if !self.walls[t] && !self.walls[cell] => t,
            _ => cell,
        }
    }

    /// Initial distribution of one population over the cells.
    pub fn population_start(&self, population: usize) -> Distribution {
        let cells: Vec<usize> = if self.starts[population].is_empty() {
            (0..self.cells()).filter(|c| !self.walls[*c]).collect()
        } else {
            self.starts[population].clone()
        };
        let mut mass = vec![0.0; self.cells()];
        for c in &cells {
            mass[*c] = 1.0 / cells.len() as f64;
        }
        Distribution::new(mass).expect("uniform over a non-empty set")
    }

    /// Manhattan distance from every cell to `to`, ignoring walls.
    pub fn manhattan_from(&self, to: usize) -> Vec<f64> {
        let (tc, tr) = self.coords(to);
        (0..self.cells())
            .map(|cell| {
                let (c, r) = self.coords(cell);
                (c.abs_diff(tc) + r.abs_diff(tr)) as f64
            })
            .collect()
    }

    /// Shortest-path length through floor cells; unreachable cells get `inf`.
    pub fn path_distance_from(&self, to: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.cells()];
        let mut queue = VecDeque::from([to]);
        dist[to] = 0.0;
        while let Some(cell) = queue.pop_front() {
            for a in [LEFT, RIGHT, UP, DOWN] {
                let nb = self.step(cell, a);
                if dist[nb].is_infinite() {
                    dist[nb] = dist[cell] + 1.0;
                    queue.push_back(nb);
                }
            }
        }
        dist
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMetric {
    Manhattan,
    ShortestPath,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridReward {
    /// `-ln mu(x)`.
    Exploration,
    /// `-dist(x, x_ref) - mu(x) |a| - ln mu(x)`.
    Congestion { distance: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct GridEnv {
    name: &'static str,
    spec: GridSpec,
    horizon: HorizonSpec,
    next: Vec<[usize; NUM_MOVES]>,
    reward: GridReward,
    m0: Distribution,
}

impl GridEnv {
    fn build(name: &'static str, spec: GridSpec, reward: GridReward) -> Result<Self> {
        let horizon = HorizonSpec::steps(spec.n_t)?;
        let next = (0..spec.cells()).map(|cell| std::array::from_fn(|a| spec.step(cell, a))).collect();
        let m0 = spec.population_start(0);
        Ok(Self { name, spec, horizon, next, reward, m0 })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn next_cell(&self, cell: usize, action: usize) -> usize {
        self.next[cell][action]
    }
}

pub fn four_rooms_env(spec: GridSpec) -> Result<GridEnv> {
    GridEnv::build("four_rooms", spec, GridReward::Exploration)
}

pub fn maze_env(spec: GridSpec) -> Result<GridEnv> {
    maze_env_with(spec, DistanceMetric::Manhattan)
}

pub fn maze_env_with(spec: GridSpec, metric: DistanceMetric) -> Result<GridEnv> {
    let target =
        spec.target.ok_or_else(|| Error::MapParse { line: 0, reason: "maze map needs a target cell `R`".into() })?;
    let distance = match metric {
        DistanceMetric::Manhattan => spec.manhattan_from(target),
        DistanceMetric::ShortestPath => {
            spec.path_distance_from(target).into_iter().map(|d| if d.is_finite() { d } else { 0.0 }).collect()
        }
    };
    GridEnv::build("maze", spec, GridReward::Congestion { distance })
}

impl Environment for GridEnv {
    fn name(&self) -> &str {
        self.name
    }

    fn num_states(&self) -> usize {
        self.spec.cells()
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
        Distribution::point(self.spec.cells(), self.next[x][a])
    }

    fn reward(&self, _n: usize, x: usize, a: usize, mu: &Distribution) -> f64 {
        let density = mu.get(x);
        let crowd = -floored_ln(density);
        match &self.reward {
            GridReward::Exploration => crowd,
            GridReward::Congestion { distance } => {
                let moving = if a == STAY { 0.0 } else { 1.0 };
                -distance[x] - density * moving + crowd
            }
        }
    }

    fn sample_next(&self, _n: usize, x: usize, a: usize, _mu: &Distribution, _rng: &mut dyn RngCore) -> usize {
        self.next[x][a]
    }
}
