//! Train/test assignment.
//!
//! The test set has `round(f·N)` records. It is apportioned across strata (one per kind or kind
//! combination) by largest remainder, so each stratum gets `f·N_s` rounded up or down. Inside a
//! stratum, records are ranked by a seeded hash of their pair id, so a pair's levels tend to land
//! in the same split.

use std::collections::BTreeMap;

use super::manifest::Split;
use crate::derive_seed;

pub(crate) struct SplitItem<'a> {
    pub stratum: &'a str,
    pub pair_id: &'a str,
    pub key: &'a str,
}

pub(crate) fn assign(items: &[SplitItem<'_>], fraction: f64, seed: u64) -> Vec<Split> {
    let mut strata: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, item) in items.iter().enumerate() {
        strata.entry(item.stratum).or_default().push(i);
    }
    let total = (fraction * items.len() as f64).round() as usize;
    let mut quotas: Vec<(&str, usize, f64)> = strata
        .iter()
        .map(|(name, members)| {
            let exact = fraction * members.len() as f64;
            (*name, exact.floor() as usize, exact - exact.floor())
        })
        .collect();
    let assigned: usize = quotas.iter().map(|q| q.1).sum();
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    order.sort_by(|&a, &b| quotas[b].2.total_cmp(&quotas[a].2).then(quotas[a].0.cmp(quotas[b].0)));
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        quotas[i].1 += 1;
    }

    let mut out = vec![Split::Train; items.len()];
    for (name, quota, _) in quotas {
        let mut members = strata[name].clone();
        members.sort_by_key(|&i| (derive_seed(seed, &["split", items[i].pair_id]), items[i].key));
        for &i in members.iter().take(quota) {
            out[i] = Split::Test;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn items(pairs: usize, strata: usize, levels: usize) -> Vec<(String, String, String)> {
        let mut v = vec![];
        for p in 0..pairs {
            for s in 0..strata {
                for l in 0..levels {
                    v.push((format!("k{s}"), format!("p{p}"), format!("p{p}/k{s}/{l}")));
                }
            }
        }
        v
    }

    fn run(v: &[(String, String, String)], f: f64, seed: u64) -> Vec<Split> {
        let it: Vec<_> = v.iter().map(|(s, p, k)| SplitItem { stratum: s, pair_id: p, key: k }).collect();
        assign(&it, f, seed)
    }

    #[test]
    fn fraction_within_one_record() {
        for (pairs, strata, levels, f) in [(5, 12, 4, 0.1), (7, 5, 3, 0.25), (3, 4, 1, 0.33), (1, 1, 1, 0.5), (9, 12, 4, 0.0)] {
            let v = items(pairs, strata, levels);
            let s = run(&v, f, 3);
            let test = s.iter().filter(|&&x| x == Split::Test).count() as f64;
            assert!((test - f * v.len() as f64).abs() <= 1.0);
            // Per stratum as well.
            for k in 0..strata {
                let name = format!("k{k}");
                let idx: Vec<_> = v.iter().enumerate().filter(|(_, x)| x.0 == name).map(|(i, _)| i).collect();
                let t = idx.iter().filter(|&&i| s[i] == Split::Test).count() as f64;
                assert!((t - f * idx.len() as f64).abs() < 1.0);
            }
        }
    }

    #[test]
    fn deterministic_and_seed_dependent() {
        let v = items(10, 3, 4);
        assert_eq!(run(&v, 0.2, 1), run(&v, 0.2, 1));
        let differs = (2..10).any(|s| run(&v, 0.2, s) != run(&v, 0.2, 1));
        assert!(differs);
    }
}
