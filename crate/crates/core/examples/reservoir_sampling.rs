//! Reservoir sampling keeps a uniform sample of a stream: each of 10 equal
//! blocks of a 100k-item stream should hold about a tenth of the reservoir.

use mfg::neural::ReservoirBuffer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut res = ReservoirBuffer::new(1000);
    for i in 0..100_000usize {
        res.offer(i, &mut rng);
    }
    let mut blocks = [0usize; 10];
    for &i in res.items() {
        blocks[i / 10_000] += 1;
    }
    println!("offered {}, kept {}", res.offered(), res.len());
    println!("per-block counts: {blocks:?}");
}
