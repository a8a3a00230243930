use std::ops::RangeInclusive;

use rand::distr::{Distribution, Uniform};
use rand_pcg::Pcg64;
use rrs_core::Instance;

use crate::error::BenchError;

/// Support of every generated `p̂_i` and `p̄_i`.
pub const TIME_RANGE: RangeInclusive<u32> = 1..=100;

/// Generator for instance `index` of size `n`.
pub fn instance_rng(seed: u64, n: usize, index: usize) -> Pcg64 {
    Pcg64::new(u128::from(seed), ((n as u128) << 64) | index as u128)
}

/// `count` instances with `n` jobs, ids `n{n}-s{seed}-{k}` with 1-based `k`.
pub fn generate_instances(seed: u64, n: usize, count: usize) -> Result<Vec<Instance>, BenchError> {
    if n == 0 || count == 0 {
        return Err(BenchError::Config(format!("need n >= 1 and count >= 1, got n = {n}, count = {count}")));
    }
    let dist = Uniform::new_inclusive(*TIME_RANGE.start(), *TIME_RANGE.end()).expect("nonempty range");
    (0..count)
        .map(|k| {
            let mut rng = instance_rng(seed, n, k);
            let mut draw = || (0..n).map(|_| f64::from(dist.sample(&mut rng))).collect::<Vec<f64>>();
            let nominal = draw();
            let deviation = draw();
            Ok(Instance::new(format!("n{n}-s{seed}-{}", k + 1), nominal, deviation)?)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let a = generate_instances(7, 6, 5).unwrap();
        assert_eq!(a, generate_instances(7, 6, 5).unwrap());
        assert_ne!(a, generate_instances(8, 6, 5).unwrap());
        // prefixes are stable when the count grows
        assert_eq!(a[..], generate_instances(7, 6, 9).unwrap()[..5]);
        for inst in &a {
            for &t in inst.nominal().iter().chain(inst.deviation()) {
                assert!(t.fract() == 0.0 && (1.0..=100.0).contains(&t));
            }
        }
        assert!(generate_instances(7, 0, 1).is_err());
    }

    #[test]
    fn nominal_mean_is_near_fifty() {
        let inst = generate_instances(2024, 10_000, 1).unwrap();
        let mean = inst[0].nominal().iter().sum::<f64>() / 10_000.0;
        assert!((48.0..=53.0).contains(&mean), "{mean}");
    }
}
