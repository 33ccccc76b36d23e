//! Seeded random inputs for sweeps over the power family
//! `f'(x) = c·x^(s−1)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::funcspec::FunctionSpec;

/// One draw of `(s, a, b, c)` with `0 < a < b <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSample {
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl PowerSample {
    pub fn function(&self) -> Result<FunctionSpec> {
        FunctionSpec::builtin_power_s(self.s, self.c)
    }
}

/// Closed ranges the sampler draws from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRanges {
    pub s: [f64; 2],
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Default for SweepRanges {
    fn default() -> Self {
        Self { s: [0.05, 0.95], a: [0.01, 0.99], b: [0.01, 1.0] }
    }
}

impl SweepRanges {
    pub fn validate(&self) -> Result<()> {
        let [s0, s1] = self.s;
        if !(s0 > 0.0 && s0 <= s1 && s1 < 1.0) {
            return Err(input(format!("s range must satisfy 0 < lo <= hi < 1, got {:?}", self.s)));
        }
        for (name, [lo, hi]) in [("a", self.a), ("b", self.b)] {
            if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
                return Err(input(format!("{name} range must satisfy 0 < lo <= hi <= 1, got [{lo}, {hi}]")));
            }
        }
        if self.a[0] >= self.b[1] {
            return Err(input("a range lies entirely above b range"));
        }
        Ok(())
    }
}

/// How `c` is chosen for each draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `c = u·a^(1−s)` with `u` uniform in `(0, 1]`, so that `|f'| <= 1` on `[a, b]`.
    Admissible,
    /// `c = 1`.
    Unscaled,
}

fn uniform(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// `n` draws from `ranges`, deterministic in `seed`. Pairs with `a >= b`
/// are redrawn.
pub fn power_samples(seed: u64, n: usize, ranges: &SweepRanges, family: Family) -> Result<Vec<PowerSample>> {
    ranges.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let s = uniform(&mut rng, ranges.s);
        let a = uniform(&mut rng, ranges.a);
        let b = uniform(&mut rng, ranges.b);
        let u: f64 = 1.0 - rng.gen::<f64>();
        if a >= b {
            continue;
        }
        let c = match family {
            Family::Admissible => u * a.powf(1.0 - s),
            Family::Unscaled => 1.0,
        };
        out.push(PowerSample { s, a, b, c });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_admissible() {
        let r = SweepRanges::default();
        let x = power_samples(7, 200, &r, Family::Admissible).unwrap();
        assert_eq!(x, power_samples(7, 200, &r, Family::Admissible).unwrap());
        assert_ne!(x, power_samples(8, 200, &r, Family::Admissible).unwrap());
        for p in &x {
            assert!(p.a < p.b && p.b <= 1.0);
            assert!(p.c > 0.0 && p.c <= p.a.powf(1.0 - p.s));
            let fs = p.function().unwrap();
            assert!(fs.abs_fprime(p.a).unwrap() <= 1.0 + 1e-15);
        }
        let y = power_samples(7, 10, &r, Family::Unscaled).unwrap();
        assert!(y.iter().all(|p| p.c == 1.0));
    }

    #[test]
    fn bad_ranges() {
        let r = SweepRanges { s: [0.5, 1.0], ..Default::default() };
        assert!(power_samples(0, 1, &r, Family::Admissible).is_err());
        let r = SweepRanges { a: [0.9, 0.95], b: [0.1, 0.5], ..Default::default() };
        assert!(r.validate().is_err());
    }
}
