//! Exact arithmetic for vector entries of the form `±√q` with `q` rational.
//!
//! The built-in measurement vectors only contain such entries, so squared
//! overlaps between them are rational and can be compared exactly.

use std::collections::BTreeMap;

use num_rational::Ratio;

pub type Rational = Ratio<i64>;

/// A real number `sign · √square` with a non-negative rational `square`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SignedSqrt {
    pub negative: bool,
    pub square: Rational,
}

impl SignedSqrt {
    pub const fn zero() -> Self {
        SignedSqrt {
            negative: false,
            square: Ratio::new_raw(0, 1),
        }
    }

    /// `sign · √(num/den)`
    pub fn new(sign: i8, num: i64, den: i64) -> Self {
        assert!(num >= 0 && den > 0, "square must be non-negative");
        SignedSqrt {
            negative: sign < 0 && num != 0,
            square: Ratio::new(num, den),
        }
    }

    pub fn value(&self) -> f64 {
        let v = (*self.square.numer() as f64 / *self.square.denom() as f64).sqrt();
        if self.negative {
            -v
        } else {
            v
        }
    }

    pub fn is_zero(&self) -> bool {
        *self.square.numer() == 0
    }
}

/// Splits `n > 0` as `s² · m` with `m` square-free.
fn square_free_split(mut n: i64) -> (i64, i64) {
    let mut s = 1;
    let mut m = 1;
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= p;
        }
        if e % 2 == 1 {
            m *= p;
        }
        p += 1;
    }
    (s, m * n)
}

/// Exact inner product `Σ a_k b_k`, returned as a map from square-free radicand
/// to rational coefficient (zero coefficients dropped).
pub fn inner_product(a: &[SignedSqrt], b: &[SignedSqrt]) -> BTreeMap<i64, Rational> {
    let mut acc: BTreeMap<i64, Rational> = BTreeMap::new();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let prod = x.square * y.square;
        // √(p/q) = √(p·q) / q
        let (p, q) = (*prod.numer(), *prod.denom());
        let (s, m) = square_free_split(p * q);
        let mut coeff = Ratio::new(s, q);
        if x.negative != y.negative {
            coeff = -coeff;
        }
        *acc.entry(m).or_insert_with(|| Ratio::from_integer(0)) += coeff;
    }
    acc.retain(|_, v| *v.numer() != 0);
    acc
}

/// `|⟨a|b⟩|²` as an exact rational, if the overlap is a rational multiple of a
/// single square root.
pub fn overlap_squared(a: &[SignedSqrt], b: &[SignedSqrt]) -> Option<Rational> {
    let terms = inner_product(a, b);
    match terms.len() {
        0 => Some(Ratio::from_integer(0)),
        1 => {
            let (m, coeff) = terms.into_iter().next().unwrap();
            Some(coeff * coeff * Ratio::from_integer(m))
        }
        _ => None,
    }
}
