use mfg::neural::{grad_cross_entropy, grad_squared_loss, Labeled, Mlp, Regression, ReservoirBuffer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub struct Instance {
    pub net: Mlp,
    pub inputs: Vec<Vec<f64>>,
    pub actions: Vec<usize>,
    pub targets: Vec<f64>,
    pub weights: Vec<f64>,
}

/// A random network with 0-2 hidden layers and a random batch for it.
pub fn random_instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let depth = rng.random_range(0..=2);
    let mut sizes = vec![rng.random_range(1..=6)];
    for _ in 0..depth {
        sizes.push(rng.random_range(2..=8));
    }
    sizes.push(rng.random_range(2..=4));
    let mut net = Mlp::new(&sizes, &mut rng).unwrap();
    for p in net.params_mut() {
        *p += rng.random_range(-0.3..0.3);
    }
    let batch = rng.random_range(1..=6);
    let inputs = (0..batch).map(|_| (0..sizes[0]).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
    let actions = (0..batch).map(|_| rng.random_range(0..*sizes.last().unwrap())).collect();
    let targets = (0..batch).map(|_| rng.random_range(-3.0..3.0)).collect();
    let weights = (0..batch).map(|_| rng.random_range(0.5..2.0)).collect();
    Instance { net, inputs, actions, targets, weights }
}

impl Instance {
    fn regression(&self) -> Vec<Regression<'_>> {
        self.inputs
            .iter()
            .zip(&self.actions)
            .zip(&self.targets)
            .zip(&self.weights)
            .map(|(((x, a), y), w)| Regression { input: x, action: *a, target: *y, weight: *w })
            .collect()
    }

    fn labeled(&self) -> Vec<Labeled<'_>> {
        self.inputs.iter().zip(&self.actions).map(|(x, a)| Labeled { input: x, action: *a }).collect()
    }
}

/// `||g - g_fd|| / max(||g||, ||g_fd||)` with central differences of step 1e-5.
fn fd_error(net: &Mlp, analytic: &[f64], loss: impl Fn(&Mlp) -> f64) -> f64 {
    let h = 1e-5;
    let mut probe = net.clone();
    let mut numeric = vec![0.0; analytic.len()];
    for i in 0..analytic.len() {
        let p = probe.params()[i];
        probe.params_mut()[i] = p + h;
        let up = loss(&probe);
        probe.params_mut()[i] = p - h;
        let down = loss(&probe);
        probe.params_mut()[i] = p;
        numeric[i] = (up - down) / (2.0 * h);
    }
    let diff: f64 = analytic.iter().zip(&numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let scale = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let denom = scale(analytic).max(scale(&numeric));
    if denom < 1e-12 {
        diff
    } else {
        diff / denom
    }
}

pub fn squared_loss_fd_error(seed: u64) -> f64 {
    let inst = random_instance(seed);
    let batch = inst.regression();
    let (_, g) = grad_squared_loss(&inst.net, &batch).unwrap();
    fd_error(&inst.net, g.as_slice(), |n| grad_squared_loss(n, &batch).unwrap().0)
}

pub fn cross_entropy_fd_error(seed: u64) -> f64 {
    let inst = random_instance(seed);
    let batch = inst.labeled();
    let (_, g) = grad_cross_entropy(&inst.net, &batch).unwrap();
    fd_error(&inst.net, g.as_slice(), |n| grad_cross_entropy(n, &batch).unwrap().0)
}

/// Chi-square p-value of the retained counts of `blocks` equal blocks of the
/// stream, pooled over `reps` independent reservoirs.
pub fn reservoir_block_p_value(offers: usize, capacity: usize, reps: u64, blocks: usize, seed: u64) -> f64 {
    let mut counts = vec![0u64; blocks];
    for r in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(r));
        let mut res = ReservoirBuffer::new(capacity);
        for i in 0..offers {
            res.offer(i, &mut rng);
        }
        assert_eq!(res.len(), capacity);
        for &i in res.items() {
            counts[i * blocks / offers] += 1;
        }
    }
    let expected = (reps as usize * capacity) as f64 / blocks as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    1.0 - ChiSquared::new((blocks - 1) as f64).unwrap().cdf(stat)
}
