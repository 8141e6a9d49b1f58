//! Walker/Vose alias tables with integer thresholds.
//!
//! Weights are scaled to integers first, so the two-level draw reproduces the
//! normalized weights exactly when enumerated over `slot x coin`.

use super::GraphError;

const MAX_SHIFT: i32 = 40;
const MAX_TOTAL: f64 = (1u64 << 52) as f64;

/// Owned alias table for one neighbor list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliasTable {
    threshold: Vec<u64>,
    alias: Vec<u32>,
    total: u64,
}

/// Borrowed view of an alias table, e.g. a slice of a channel's alias store.
#[derive(Debug, Clone, Copy)]
pub struct AliasRef<'a> {
    pub threshold: &'a [u64],
    pub alias: &'a [u32],
    pub total: u64,
}

/// Converts weights to integers, exactly when a power-of-two scale allows it.
pub(crate) fn integer_weights(weights: &[f64]) -> Result<Vec<u64>, GraphError> {
    if let Some((i, &w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(**w >= 0.0) || !w.is_finite())
    {
        return Err(GraphError::InvalidWeight { edge: i, weight: w });
    }
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        return Err(GraphError::AllZeroWeights);
    }
    for k in 0..=MAX_SHIFT {
        let scale = (2.0f64).powi(k);
        if sum * scale > MAX_TOTAL {
            break;
        }
        if weights.iter().all(|w| (w * scale).fract() == 0.0) {
            return Ok(weights.iter().map(|w| (w * scale) as u64).collect());
        }
    }
    let scale = (2.0f64).powi(MAX_SHIFT) / sum;
    Ok(weights
        .iter()
        .map(|&w| {
            if w > 0.0 {
                ((w * scale).round() as u64).max(1)
            } else {
                0
            }
        })
        .collect())
}

impl AliasTable {
    pub fn build(weights: &[f64]) -> Result<Self, GraphError> {
        Self::from_integer_weights(&integer_weights(weights)?)
    }

    pub fn from_integer_weights(weights: &[u64]) -> Result<Self, GraphError> {
        let n = weights.len();
        let total: u64 = weights.iter().sum();
        if total == 0 {
            return Err(GraphError::AllZeroWeights);
        }
        let s = total as u128;
        let mut r: Vec<u128> = weights.iter().map(|&w| w as u128 * n as u128).collect();
        let mut threshold = vec![total; n];
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| r[i] < s);
        while let (Some(&l), Some(&g)) = (small.last(), large.last()) {
            small.pop();
            threshold[l] = r[l] as u64;
            alias[l] = g as u32;
            r[g] -= s - r[l];
            if r[g] < s {
                large.pop();
                small.push(g);
            }
        }
        // leftovers in either list hold exactly S up to the loop invariant
        Ok(Self {
            threshold,
            alias,
            total,
        })
    }

    pub fn len(&self) -> usize {
        self.threshold.len()
    }

    pub fn is_empty(&self) -> bool {
        self.threshold.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn thresholds(&self) -> &[u64] {
        &self.threshold
    }

    pub fn aliases(&self) -> &[u32] {
        &self.alias
    }

    /// Probability of keeping each slot instead of jumping to its alias.
    pub fn prob(&self) -> Vec<f64> {
        self.threshold
            .iter()
            .map(|&t| t as f64 / self.total as f64)
            .collect()
    }

    pub fn view(&self) -> AliasRef<'_> {
        AliasRef {
            threshold: &self.threshold,
            alias: &self.alias,
            total: self.total,
        }
    }

    pub fn sample(&self, r1: u64, r2: u64) -> usize {
        self.view().sample(r1, r2)
    }
}

impl AliasRef<'_> {
    pub fn len(&self) -> usize {
        self.threshold.len()
    }

    pub fn is_empty(&self) -> bool {
        self.threshold.is_empty()
    }

    /// Outcome for an explicit `(slot, coin)` pair with `coin < total`.
    pub fn resolve(&self, slot: usize, coin: u64) -> usize {
        if coin < self.threshold[slot] {
            slot
        } else {
            self.alias[slot] as usize
        }
    }

    /// Two-draw lookup: `r1` picks the slot, `r2` the coin.
    pub fn sample(&self, r1: u64, r2: u64) -> usize {
        let slot = ((r1 as u128 * self.len() as u128) >> 64) as usize;
        let coin = ((r2 as u128 * self.total as u128) >> 64) as u64;
        self.resolve(slot, coin)
    }
}

pub fn build_alias_table(weights: &[f64]) -> Result<AliasTable, GraphError> {
    AliasTable::build(weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn enumerate(t: &AliasTable) -> Vec<Ratio<u128>> {
        let mut hits = vec![0u128; t.len()];
        let v = t.view();
        for slot in 0..t.len() {
            for coin in 0..t.total() {
                hits[v.resolve(slot, coin)] += 1;
            }
        }
        let denom = t.len() as u128 * t.total() as u128;
        hits.into_iter().map(|h| Ratio::new(h, denom)).collect()
    }

    #[test]
    fn two_weights() {
        let t = build_alias_table(&[1.0, 3.0]).unwrap();
        assert_eq!(enumerate(&t), vec![Ratio::new(1, 4), Ratio::new(3, 4)]);
    }

    #[test]
    fn uniform_needs_no_alias() {
        let t = build_alias_table(&[1.0; 4]).unwrap();
        assert_eq!(t.prob(), vec![1.0; 4]);
    }

    #[test]
    fn three_weights_exact() {
        let t = build_alias_table(&[5.0, 1.0, 2.0]).unwrap();
        assert_eq!(
            enumerate(&t),
            vec![Ratio::new(5, 8), Ratio::new(1, 8), Ratio::new(2, 8)]
        );
        assert!(t.aliases().iter().all(|&a| (a as usize) < t.len()));
    }

    #[test]
    fn rejects_all_zero() {
        assert!(matches!(
            build_alias_table(&[0.0, 0.0]),
            Err(GraphError::AllZeroWeights)
        ));
        assert!(build_alias_table(&[]).is_err());
    }

    #[test]
    fn zero_weight_never_drawn() {
        let t = build_alias_table(&[0.0, 7.0]).unwrap();
        assert_eq!(t.sample(0, 0), 1);
        assert_eq!(t.sample(0, u64::MAX), 1);
    }

    #[test]
    fn irrational_weights_are_close() {
        let w = [std::f64::consts::PI, 1.0, std::f64::consts::E];
        let t = build_alias_table(&w).unwrap();
        let sum: f64 = w.iter().sum();
        let mut mass = vec![0.0; 3];
        for (i, (&th, &a)) in t.thresholds().iter().zip(t.aliases()).enumerate() {
            let p = th as f64 / t.total() as f64;
            mass[i] += p / 3.0;
            mass[a as usize] += (1.0 - p) / 3.0;
        }
        for (m, w) in mass.iter().zip(w) {
            assert!((m - w / sum).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn exact_for_dyadic_weights(nums in prop::collection::vec(0u32..=64, 1..8)) {
            prop_assume!(nums.iter().any(|&x| x > 0));
            let w: Vec<f64> = nums.iter().map(|&x| x as f64 / 64.0).collect();
            let t = build_alias_table(&w).unwrap();
            let sum: u32 = nums.iter().sum();
            let got = enumerate(&t);
            for (g, &x) in got.iter().zip(&nums) {
                prop_assert_eq!(*g, Ratio::new(x as u128, sum as u128));
            }
        }
    }
}
