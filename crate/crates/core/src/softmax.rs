use crate::types::Distribution;

/// Writes `softmax(inv_temp * values)` into `out`, subtracting the maximum first.
pub fn softmax_into(values: &[f64], inv_temp: f64, out: &mut [f64]) {
    debug_assert_eq!(values.len(), out.len());
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for (o, &v) in out.iter_mut().zip(values) {
        *o = (inv_temp * (v - max)).exp();
        z += *o;
    }
    for o in out.iter_mut() {
        *o /= z;
    }
}

/// `softmax(inv_temp * values)` as a validated distribution.
pub fn stable_softmax(values: &[f64], inv_temp: f64) -> Distribution {
    let mut out = vec![0.0; values.len()];
    softmax_into(values, inv_temp, &mut out);
    Distribution::new(out).expect("softmax of finite logits is a distribution")
}

/// `log(sum(exp(values)))` without overflow.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Index of the largest entry; ties go to the smallest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
