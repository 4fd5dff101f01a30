//! Trains a small network on a 1-d regression task with Adam, then saves and
//! reloads it.

use mfg::neural::{grad_squared_loss, io, Mlp, OptimizerState, Regression};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> mfg::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut net = Mlp::new(&[1, 32, 32, 1], &mut rng)?;
    let mut opt = OptimizerState::adam(net.num_params(), 1e-2);
    let xs: Vec<[f64; 1]> = (0..256).map(|_| [rng.random_range(-3.0..3.0)]).collect();
    let ys: Vec<f64> = xs.iter().map(|x| x[0].sin()).collect();
    for step in 0..=2000 {
        let batch: Vec<Regression<'_>> = xs.iter().zip(&ys).map(|(x, y)| Regression::new(x, 0, *y)).collect();
        let (loss, grad) = grad_squared_loss(&net, &batch)?;
        opt.step(&mut net, &grad)?;
        if step % 500 == 0 {
            println!("step {step:>4}: loss {loss:.5}");
        }
    }
    let path = std::env::temp_dir().join("mlp_regression.mlp");
    io::save(&net, &path)?;
    let back = io::load(&path)?;
    println!("reloaded net identical: {}", back == net);
    println!("f(1.0) = {:.4}, sin(1.0) = {:.4}", back.forward(&[1.0])?[0], 1.0f64.sin());
    Ok(())
}
