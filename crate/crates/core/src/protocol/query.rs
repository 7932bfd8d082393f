use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Exact rational query entry.
pub type Rational = Ratio<i64>;

/// Which query a server receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    First,
    Second,
}

impl Group {
    pub fn index(self) -> usize {
        match self {
            Group::First => 0,
            Group::Second => 1,
        }
    }

    pub fn from_index(idx: usize) -> Option<Self> {
        match idx {
            0 => Some(Group::First),
            1 => Some(Group::Second),
            _ => None,
        }
    }
}

/// The two queries of one retrieval.
///
/// With selector `b ∈ {0,1}^M`, requested index `i` and integer coefficients
/// `(a₁, a₂)`:
///
/// ```text
/// first  = a₁⁻¹ · b
/// second = a₂⁻¹ · (-b - e_i)   if b_i = 0
/// second = a₂⁻¹ · (-b + e_i)   if b_i = 1
/// ```
///
/// The non-fading scheme is the case `a = (1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryPair {
    selector: Vec<bool>,
    index: usize,
    coefficients: [i64; 2],
    first: Vec<Rational>,
    second: Vec<Rational>,
}

impl QueryPair {
    pub fn from_selector(
        selector: Vec<bool>,
        index: usize,
        coefficients: [i64; 2],
    ) -> Result<Self> {
        let m = selector.len();
        if index >= m {
            return Err(Error::IndexOutOfRange { index, len: m });
        }
        if coefficients.contains(&0) {
            return Err(invalid(
                "coefficients",
                format!("entries must be non-zero, got {coefficients:?}"),
            ));
        }
        let inv1 = Rational::new(1, coefficients[0]);
        let inv2 = Rational::new(1, coefficients[1]);
        let unit = if selector[index] { 1 } else { -1 };
        let first = selector.iter().map(|&b| inv1 * i64::from(b)).collect();
        let second = selector
            .iter()
            .enumerate()
            .map(|(m, &b)| {
                let e = if m == index { unit } else { 0 };
                inv2 * (e - i64::from(b))
            })
            .collect();
        Ok(Self {
            selector,
            index,
            coefficients,
            first,
            second,
        })
    }

    pub fn selector(&self) -> &[bool] {
        &self.selector
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn coefficients(&self) -> [i64; 2] {
        self.coefficients
    }

    /// `b_i`.
    pub fn selected_bit(&self) -> bool {
        self.selector[self.index]
    }

    /// `2b_i - 1`: the sign with which the requested codeword appears in the
    /// combined answers.
    pub fn sign(&self) -> i64 {
        if self.selected_bit() {
            1
        } else {
            -1
        }
    }

    pub fn query(&self, group: Group) -> &[Rational] {
        match group {
            Group::First => &self.first,
            Group::Second => &self.second,
        }
    }

    pub fn messages(&self) -> usize {
        self.selector.len()
    }
}

pub(crate) fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn random_selector<R: Rng + ?Sized>(messages: usize, rng: &mut R) -> Vec<bool> {
    (0..messages).map(|_| rng.random()).collect()
}

/// Non-fading queries for message `index` (0-based) out of `messages`.
pub fn gen_queries<R: Rng + ?Sized>(
    messages: usize,
    index: usize,
    rng: &mut R,
) -> Result<QueryPair> {
    gen_queries_fading(messages, index, [1, 1], rng)
}

/// Fading queries, scaled by the inverses of the integer coefficients.
pub fn gen_queries_fading<R: Rng + ?Sized>(
    messages: usize,
    index: usize,
    coefficients: [i64; 2],
    rng: &mut R,
) -> Result<QueryPair> {
    if index >= messages {
        return Err(Error::IndexOutOfRange {
            index,
            len: messages,
        });
    }
    if coefficients.contains(&0) {
        return Err(invalid(
            "coefficients",
            format!("entries must be non-zero, got {coefficients:?}"),
        ));
    }
    QueryPair::from_selector(random_selector(messages, rng), index, coefficients)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_integer(x)).collect()
    }

    #[test]
    fn single_message() {
        let q = QueryPair::from_selector(vec![false], 0, [1, 1]).unwrap();
        assert_eq!(q.query(Group::First), ints(&[0]).as_slice());
        assert_eq!(q.query(Group::Second), ints(&[-1]).as_slice());
        let q = QueryPair::from_selector(vec![true], 0, [1, 1]).unwrap();
        assert_eq!(q.query(Group::First), ints(&[1]).as_slice());
        assert_eq!(q.query(Group::Second), ints(&[0]).as_slice());
    }

    #[test]
    fn scaled_single_message() {
        let q = QueryPair::from_selector(vec![true], 0, [2, 3]).unwrap();
        assert_eq!(q.query(Group::First), &[r(1, 2)]);
        assert_eq!(q.query(Group::Second), &[r(0, 1)]);
    }

    /// `q1 + q2 = (2b_i - 1)·e_i` for every selector with `M ≤ 10`.
    #[test]
    fn sum_is_signed_unit_vector() {
        for m in 1..=10usize {
            for bits in 0..(1u32 << m) {
                let selector: Vec<bool> = (0..m).map(|k| (bits >> k) & 1 == 1).collect();
                for i in 0..m {
                    let q = QueryPair::from_selector(selector.clone(), i, [1, 1]).unwrap();
                    let sign = if selector[i] { 1 } else { -1 };
                    for k in 0..m {
                        let s = q.query(Group::First)[k] + q.query(Group::Second)[k];
                        let expected = if k == i { sign } else { 0 };
                        assert_eq!(s, Rational::from_integer(expected));
                    }
                    assert!(q
                        .query(Group::First)
                        .iter()
                        .all(|x| *x == r(0, 1) || *x == r(1, 1)));
                    assert!(q
                        .query(Group::Second)
                        .iter()
                        .all(|x| *x == r(0, 1) || *x == r(-1, 1)));
                }
            }
        }
    }

    #[test]
    fn unit_coefficients_match_nonfading() {
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        let a = gen_queries(7, 3, &mut r1).unwrap();
        let b = gen_queries_fading(7, 3, [1, 1], &mut r2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            gen_queries(3, 3, &mut rng),
            Err(Error::IndexOutOfRange { index: 3, len: 3 })
        ));
        assert!(gen_queries_fading(3, 0, [1, 0], &mut rng).is_err());
        assert!(gen_queries_fading(3, 0, [0, 2], &mut rng).is_err());
    }
}
