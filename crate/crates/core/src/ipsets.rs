//! IP-sets: all finite sums `p_{i1} + ... + p_{ik}` with `i1 < ... < ik` of
//! a fixed sequence of positive integers. Used to restrict the dilation
//! factors tried by the recurrence search.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "lowercase", deny_unknown_fields)]
enum RawSpec {
    Geometric {
        base: u64,
        #[serde(default)]
        first: Option<u64>,
    },
    Arithmetic {
        start: u64,
        step: u64,
    },
    Explicit {
        values: Vec<u64>,
    },
}

/// Generator sequence of an IP-set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub enum IPSetSpec {
    /// `first * base^(i-1)`.
    Geometric { base: u64, first: u64 },
    /// `start + (i-1) * step`.
    Arithmetic { start: u64, step: u64 },
    /// A finite list, used in the given order.
    Explicit(Vec<u64>),
}

impl TryFrom<RawSpec> for IPSetSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let spec = match raw {
            RawSpec::Geometric { base, first } => IPSetSpec::Geometric { base, first: first.unwrap_or(base) },
            RawSpec::Arithmetic { start, step } => IPSetSpec::Arithmetic { start, step },
            RawSpec::Explicit { values } => IPSetSpec::Explicit(values),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<IPSetSpec> for RawSpec {
    fn from(spec: IPSetSpec) -> Self {
        match spec {
            IPSetSpec::Geometric { base, first } => RawSpec::Geometric { base, first: Some(first) },
            IPSetSpec::Arithmetic { start, step } => RawSpec::Arithmetic { start, step },
            IPSetSpec::Explicit(values) => RawSpec::Explicit { values },
        }
    }
}

impl IPSetSpec {
    pub fn geometric(base: u64) -> Self {
        IPSetSpec::Geometric { base, first: base }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            IPSetSpec::Geometric { base, first } => *base >= 1 && *first >= 1,
            IPSetSpec::Arithmetic { start, .. } => *start >= 1,
            IPSetSpec::Explicit(v) => !v.is_empty() && v.iter().all(|&p| p >= 1),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("IP-set generators must be positive and the list nonempty".into()))
        }
    }

    /// The generators `p_i <= limit`, in index order. Constant sequences
    /// are cut after `limit` terms, which is enough to reach every sum.
    pub fn generators(&self, limit: u64) -> Vec<u64> {
        let mut out = Vec::new();
        match self {
            IPSetSpec::Explicit(v) => out.extend(v.iter().copied().filter(|&p| p <= limit)),
            IPSetSpec::Geometric { base, first } => {
                let mut p = *first;
                while p <= limit && (out.len() as u64) < limit {
                    out.push(p);
                    match p.checked_mul(*base) {
                        Some(q) => p = q,
                        None => break,
                    }
                }
            }
            IPSetSpec::Arithmetic { start, step } => {
                let mut p = *start;
                while p <= limit && (out.len() as u64) < limit {
                    out.push(p);
                    match p.checked_add(*step) {
                        Some(q) => p = q,
                        None => break,
                    }
                }
            }
        }
        out
    }
}

/// All elements of the IP-set up to `limit`, ascending.
pub fn ip_enumerate(spec: &IPSetSpec, limit: u64) -> Vec<u64> {
    let limit_us = limit as usize;
    let mut reach = vec![false; limit_us + 1];
    reach[0] = true;
    for p in spec.generators(limit) {
        let p = p as usize;
        for s in (p..=limit_us).rev() {
            if reach[s - p] {
                reach[s] = true;
            }
        }
    }
    (1..=limit_us).filter(|&s| reach[s]).map(|s| s as u64).collect()
}

/// Whether `n` is a sum of generators with distinct indices. Depth-first
/// over distinct generator values (largest first), taking each value up to
/// its multiplicity, with remaining-sum pruning.
pub fn ip_contains(spec: &IPSetSpec, n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut gens = spec.generators(n);
    gens.sort_unstable_by(|a, b| b.cmp(a));
    let mut groups: Vec<(u64, u64)> = Vec::new();
    for g in gens {
        match groups.last_mut() {
            Some((v, m)) if *v == g => *m += 1,
            _ => groups.push((g, 1)),
        }
    }
    let mut suffix = vec![0u64; groups.len() + 1];
    let mut gcds = vec![0u64; groups.len() + 1];
    for i in (0..groups.len()).rev() {
        suffix[i] = suffix[i + 1].saturating_add(groups[i].0.saturating_mul(groups[i].1));
        gcds[i] = gcd(gcds[i + 1], groups[i].0);
    }
    let mut failed = HashSet::new();
    dfs(&Search { groups: &groups, suffix: &suffix, gcds: &gcds }, &mut failed, 0, n)
}

struct Search<'a> {
    groups: &'a [(u64, u64)],
    suffix: &'a [u64],
    gcds: &'a [u64],
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn dfs(s: &Search, failed: &mut HashSet<(usize, u64)>, level: usize, remaining: u64) -> bool {
    if remaining == 0 {
        return true;
    }
    if level == s.groups.len() || s.suffix[level] < remaining || !remaining.is_multiple_of(s.gcds[level]) {
        return false;
    }
    if failed.contains(&(level, remaining)) {
        return false;
    }
    let (v, m) = s.groups[level];
    let most = m.min(remaining / v);
    if (0..=most).rev().any(|k| dfs(s, failed, level + 1, remaining - k * v)) {
        return true;
    }
    failed.insert((level, remaining));
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    /// All subset sums of a short generator list, by bitmask.
    fn subset_oracle(gens: &[u64], limit: u64) -> BTreeSet<u64> {
        let mut out = BTreeSet::new();
        for mask in 1u32..(1 << gens.len()) {
            let s: u64 = (0..gens.len()).filter(|i| mask & (1 << i) != 0).map(|i| gens[i]).sum();
            if s <= limit {
                out.insert(s);
            }
        }
        out
    }

    #[test]
    fn enumeration_examples() {
        let powers = IPSetSpec::Geometric { base: 2, first: 1 };
        assert_eq!(ip_enumerate(&powers, 10), (1..=10).collect::<Vec<_>>());
        let e = IPSetSpec::Explicit(vec![10, 100, 1000]);
        assert_eq!(ip_enumerate(&e, 2000), vec![10, 100, 110, 1000, 1010, 1100, 1110]);
        assert_eq!(ip_enumerate(&IPSetSpec::Explicit(vec![5]), 100), vec![5]);
    }

    #[test]
    fn membership_examples() {
        let g3 = IPSetSpec::geometric(3);
        assert!(ip_contains(&g3, 12));
        assert!(!ip_contains(&g3, 6));
        assert!(ip_contains(&IPSetSpec::Explicit(vec![7, 11, 13]), 31));
        assert_eq!(ip_enumerate(&g3, 40), vec![3, 9, 12, 27, 30, 36, 39]);
    }

    #[test]
    fn repeated_values_are_distinct_terms() {
        let s = IPSetSpec::Explicit(vec![2, 2, 5]);
        assert_eq!(ip_enumerate(&s, 20), vec![2, 4, 5, 7, 9]);
        assert!(ip_contains(&s, 9));
        assert!(!ip_contains(&s, 6));
    }

    #[test]
    fn json_shape() {
        let s: IPSetSpec = serde_json::from_str(r#"{"kind":"geometric","params":{"base":3}}"#).unwrap();
        assert_eq!(s, IPSetSpec::geometric(3));
        let a: IPSetSpec = serde_json::from_str(r#"{"kind":"arithmetic","params":{"start":4,"step":3}}"#).unwrap();
        assert_eq!(a.generators(12), vec![4, 7, 10]);
        assert!(serde_json::from_str::<IPSetSpec>(r#"{"kind":"explicit","params":{"values":[]}}"#).is_err());
        assert!(serde_json::from_str::<IPSetSpec>(r#"{"kind":"explicit","params":{"values":[0,3]}}"#).is_err());
        let back: IPSetSpec = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn constant_sequences() {
        let ones = IPSetSpec::Geometric { base: 1, first: 3 };
        assert_eq!(ip_enumerate(&ones, 10), vec![3, 6, 9]);
        assert!(ip_contains(&ones, 300));
        assert!(!ip_contains(&ones, 301));
    }

    fn spec_strategy() -> impl Strategy<Value = IPSetSpec> {
        prop_oneof![
            (2u64..6, 1u64..5).prop_map(|(base, first)| IPSetSpec::Geometric { base, first }),
            (1u64..40, 0u64..30).prop_map(|(start, step)| IPSetSpec::Arithmetic { start, step }),
            prop::collection::vec(1u64..3000, 1..12).prop_map(IPSetSpec::Explicit),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn contains_agrees_with_enumeration(spec in spec_strategy(), limit in 1u64..10_000) {
            let set: BTreeSet<u64> = ip_enumerate(&spec, limit).into_iter().collect();
            for m in 1..=limit {
                prop_assert_eq!(ip_contains(&spec, m), set.contains(&m), "m = {}", m);
            }
        }

        #[test]
        fn explicit_matches_subset_oracle(gens in prop::collection::vec(1u64..500, 1..10), limit in 1u64..3000) {
            let spec = IPSetSpec::Explicit(gens.clone());
            let got: BTreeSet<u64> = ip_enumerate(&spec, limit).into_iter().collect();
            prop_assert_eq!(got, subset_oracle(&gens, limit));
        }

        #[test]
        fn disjoint_sums_close(gens in prop::collection::vec(1u64..300, 2..10), mask in any::<u16>(), limit in 100u64..3000) {
            let (mut a, mut b) = (0, 0);
            for (i, g) in gens.iter().enumerate() {
                if mask & (1 << i) != 0 { a += g } else { b += g }
            }
            let spec = IPSetSpec::Explicit(gens);
            let set = ip_enumerate(&spec, limit);
            if a > 0 && b > 0 && a + b <= limit {
                prop_assert!(set.contains(&(a + b)));
            }
        }
    }
}
