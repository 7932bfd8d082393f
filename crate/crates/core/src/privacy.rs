//! Index privacy of the queries.
//!
//! Each server sees one query vector. The scheme is private when, for every
//! server group, the law of that vector does not depend on the requested
//! index. Answers and transmissions are deterministic functions of the query,
//! the messages and an index-independent dither, so this invariance carries
//! over to everything a single server observes.
//!
//! The exact check enumerates all `2^M` selectors with rational arithmetic.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;

use crate::error::{Error, Result};
use crate::protocol::{Group, QueryPair, Rational};

/// Largest `M` accepted by the exact enumerations.
pub const MAX_ENUMERATION: usize = 20;

/// Maps a selector `b` and a requested index to the two queries.
pub trait QueryRule {
    fn queries(&self, selector: &[bool], index: usize) -> Result<[Vec<Rational>; 2]>;
}

/// The scheme as specified, optionally with integer coefficients `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorrectedRule {
    pub coefficients: [i64; 2],
}

impl CorrectedRule {
    pub fn non_fading() -> Self {
        Self {
            coefficients: [1, 1],
        }
    }

    pub fn fading(coefficients: [i64; 2]) -> Self {
        Self { coefficients }
    }
}

impl QueryRule for CorrectedRule {
    fn queries(&self, selector: &[bool], index: usize) -> Result<[Vec<Rational>; 2]> {
        let q = QueryPair::from_selector(selector.to_vec(), index, self.coefficients)?;
        Ok([
            q.query(Group::First).to_vec(),
            q.query(Group::Second).to_vec(),
        ])
    }
}

/// A broken variant that always sends `-b + e_i` to the second group,
/// ignoring `b_i`. Entry `i` of the second query can then be `+1`, which
/// never happens at any other position.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IgnoreSelectedBit;

impl QueryRule for IgnoreSelectedBit {
    fn queries(&self, selector: &[bool], index: usize) -> Result<[Vec<Rational>; 2]> {
        if index >= selector.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: selector.len(),
            });
        }
        let first = selector
            .iter()
            .map(|&b| Rational::from_integer(i64::from(b)))
            .collect();
        let second = selector
            .iter()
            .enumerate()
            .map(|(m, &b)| Rational::from_integer(i64::from(m == index) - i64::from(b)))
            .collect();
        Ok([first, second])
    }
}

/// Exact law of a query vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryDistribution {
    probabilities: BTreeMap<Vec<Rational>, Rational>,
}

impl QueryDistribution {
    pub fn support(&self) -> impl Iterator<Item = &Vec<Rational>> {
        self.probabilities.keys()
    }

    pub fn probability(&self, query: &[Rational]) -> Rational {
        self.probabilities
            .get(query)
            .copied()
            .unwrap_or_else(|| Rational::from_integer(0))
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.probabilities.values().copied().sum()
    }

    /// Probability that coordinate `k` equals `value`.
    pub fn marginal(&self, k: usize, value: Rational) -> Rational {
        self.probabilities
            .iter()
            .filter(|(q, _)| q[k] == value)
            .map(|(_, p)| *p)
            .sum()
    }
}

fn check_enumeration(messages: usize) -> Result<()> {
    if messages > MAX_ENUMERATION {
        return Err(Error::EnumerationTooLarge {
            requested: messages,
            limit: MAX_ENUMERATION,
        });
    }
    Ok(())
}

fn selector(bits: u32, m: usize) -> Vec<bool> {
    (0..m).map(|k| (bits >> k) & 1 == 1).collect()
}

/// Law of the query seen by `group` when index `index` is requested, under
/// a uniform selector.
pub fn exact_query_distribution_with<Q: QueryRule + ?Sized>(
    rule: &Q,
    group: Group,
    messages: usize,
    index: usize,
) -> Result<QueryDistribution> {
    check_enumeration(messages)?;
    let count = 1u32 << messages;
    let weight = Rational::new(1, i64::from(count));
    let mut probabilities = BTreeMap::new();
    for bits in 0..count {
        let [first, second] = rule.queries(&selector(bits, messages), index)?;
        let q = match group {
            Group::First => first,
            Group::Second => second,
        };
        *probabilities
            .entry(q)
            .or_insert_with(|| Rational::from_integer(0)) += weight;
    }
    Ok(QueryDistribution { probabilities })
}

/// [`exact_query_distribution_with`] for the corrected scheme; `None`
/// coefficients select the non-fading variant.
pub fn exact_query_distribution(
    group: Group,
    messages: usize,
    index: usize,
    coefficients: Option<[i64; 2]>,
) -> Result<QueryDistribution> {
    let rule = CorrectedRule::fading(coefficients.unwrap_or([1, 1]));
    exact_query_distribution_with(&rule, group, messages, index)
}

/// True iff both groups' query laws are identical for every requested index.
pub fn verify_privacy_exact_with<Q: QueryRule + ?Sized>(rule: &Q, messages: usize) -> Result<bool> {
    check_enumeration(messages)?;
    for group in [Group::First, Group::Second] {
        let reference = exact_query_distribution_with(rule, group, messages, 0)?;
        for index in 1..messages {
            if exact_query_distribution_with(rule, group, messages, index)? != reference {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn verify_privacy_exact(messages: usize, coefficients: Option<[i64; 2]>) -> Result<bool> {
    let rule = CorrectedRule::fading(coefficients.unwrap_or([1, 1]));
    verify_privacy_exact_with(&rule, messages)
}

/// Total-variation distance between the empirical query laws for two
/// requested indices, each estimated from `samples` draws.
pub fn empirical_tv_distance<Q: QueryRule + ?Sized, R: Rng + ?Sized>(
    rule: &Q,
    group: Group,
    messages: usize,
    indices: [usize; 2],
    samples: usize,
    rng: &mut R,
) -> Result<f64> {
    if samples == 0 {
        return Err(crate::error::invalid("samples", "need at least one sample"));
    }
    let mut counts: HashMap<Vec<Rational>, [u64; 2]> = HashMap::new();
    for (slot, &index) in indices.iter().enumerate() {
        for _ in 0..samples {
            let b: Vec<bool> = (0..messages).map(|_| rng.random()).collect();
            let [first, second] = rule.queries(&b, index)?;
            let q = match group {
                Group::First => first,
                Group::Second => second,
            };
            counts.entry(q).or_default()[slot] += 1;
        }
    }
    let n = samples as f64;
    Ok(0.5
        * counts
            .values()
            .map(|c| (c[0] as f64 / n - c[1] as f64 / n).abs())
            .sum::<f64>())
}
