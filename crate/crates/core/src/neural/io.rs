//! Plain-text network files.
//!
//! ```text
//! mlp 1
//! layers 3 64 64 2
//! <one parameter per line, flat layout of `Mlp::params`>
//! ```
//!
//! Lines starting with `#` are ignored. Parameters are written with Rust's
//! shortest round-trip float formatting, so a save/load cycle is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use super::mlp::Mlp;
use crate::error::{Error, Result};

const MAGIC: &str = "mlp 1";

fn format_err(reason: impl Into<String>) -> Error {
    Error::ModelFormat(reason.into())
}

pub fn to_text(net: &Mlp) -> String {
    let mut out = String::with_capacity(net.num_params() * 20);
    out.push_str(MAGIC);
    out.push_str("\nlayers");
    for s in net.layer_sizes() {
        let _ = write!(out, " {s}");
    }
    out.push('\n');
    for p in net.params() {
        let _ = writeln!(out, "{p:?}");
    }
    out
}

pub fn from_text(text: &str) -> Result<Mlp> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    if lines.next() != Some(MAGIC) {
        return Err(format_err(format!("missing `{MAGIC}` header")));
    }
    let sizes = lines
        .next()
        .and_then(|l| l.strip_prefix("layers"))
        .ok_or_else(|| format_err("missing `layers` line"))?
        .split_whitespace()
        .map(|s| s.parse::<usize>().map_err(|e| format_err(format!("layer size `{s}`: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let params = lines
        .map(|l| l.parse::<f64>().map_err(|e| format_err(format!("parameter `{l}`: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Mlp::from_params(&sizes, params).map_err(|e| format_err(e.to_string()))
}

pub fn save(net: &Mlp, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_text(net))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Mlp> {
    from_text(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_is_bit_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut net = Mlp::new(&[5, 7, 3], &mut rng).unwrap();
        net.params_mut()[0] = 1e-300;
        net.params_mut()[1] = -0.1 - 0.2;
        let back = from_text(&to_text(&net)).unwrap();
        assert!(net.params().iter().zip(back.params()).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!(back.layer_sizes(), net.layer_sizes());
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(from_text("layers 2 1\n0\n0\n0\n").is_err());
        assert!(from_text("mlp 1\nlayers 2 1\n0\n0\n").is_err());
        assert!(from_text("mlp 1\nlayers 2 1\n0\nx\n0\n").is_err());
    }
}
