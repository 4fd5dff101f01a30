use crate::env::Environment;

/// How `(n, x)` is presented to a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    /// One-hot over states followed by `n / N_T`.
    #[default]
    StateTime,
    /// One-hot over `(n, x)` pairs; a linear network on it is a lookup table.
    Joint,
}

/// Precomputed inputs for every `(n, x)`.
#[derive(Debug, Clone)]
pub struct Encoder {
    kind: Encoding,
    states: usize,
    steps: usize,
    width: usize,
    table: Vec<f64>,
}

impl Encoder {
    pub fn new(kind: Encoding, env: &dyn Environment) -> Self {
        let states = env.num_states();
        let steps = env.horizon().len();
        let n_t = env.horizon().n_t().max(1) as f64;
        let width = match kind {
            Encoding::StateTime => states + 1,
            Encoding::Joint => steps * states,
        };
        let mut table = vec![0.0; steps * states * width];
        for n in 0..steps {
            for x in 0..states {
                let row = &mut table[(n * states + x) * width..][..width];
                match kind {
                    Encoding::StateTime => {
                        row[x] = 1.0;
                        row[states] = n as f64 / n_t;
                    }
                    Encoding::Joint => row[n * states + x] = 1.0,
                }
            }
        }
        Self { kind, states, steps, width, table }
    }

    pub fn kind(&self) -> Encoding {
        self.kind
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn input(&self, n: usize, x: usize) -> &[f64] {
        debug_assert!(n < self.steps && x < self.states);
        let start = (n * self.states + x) * self.width;
        &self.table[start..start + self.width]
    }
}
