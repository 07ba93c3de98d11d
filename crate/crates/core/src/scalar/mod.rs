//! Exact scalars of the form `u(p/r) * t_1^e_1 * ... * t_k^e_k`.
//!
//! `u(p/r)` is the root of unity `exp(2 pi i p / r)` and the `t_k` are named
//! formal parameters, taken to be algebraically independent transcendentals.
//! Under that assumption the scalars form a free abelian group times the
//! torsion group `Q/Z`, so equality is componentwise and decidable.

mod parse;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Mul, MulAssign};
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use parse::{is_identifier, ParseError};

/// Multiplicative order of a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(r) => Some(r),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(r) => write!(f, "{r}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

/// A nonzero field element `u(num/den) * prod name^exp`.
///
/// `num/den` is kept reduced with `0 <= num < den`; the exponent map never
/// stores a zero exponent.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    num: u64,
    den: u64,
    params: BTreeMap<String, i64>,
}

impl Scalar {
    pub fn one() -> Self {
        Scalar {
            num: 0,
            den: 1,
            params: BTreeMap::new(),
        }
    }

    /// `-1`, i.e. `u(1/2)`.
    pub fn minus_one() -> Self {
        Self::root_of_unity(1, 2)
    }

    /// The root of unity `exp(2 pi i p / r)`.
    ///
    /// Panics if `r == 0`.
    pub fn root_of_unity(p: i64, r: u64) -> Self {
        assert!(r > 0, "root of unity with zero denominator");
        let mut s = Scalar::one();
        s.set_root(p as i128, r as i128);
        s
    }

    /// The formal parameter `name` to the first power.
    ///
    /// Panics if `name` is not an identifier.
    pub fn param(name: &str) -> Self {
        Self::param_pow(name, 1)
    }

    pub fn param_pow(name: &str, exp: i64) -> Self {
        assert!(is_identifier(name), "invalid parameter name {name:?}");
        let mut s = Scalar::one();
        if exp != 0 {
            s.params.insert(name.to_string(), exp);
        }
        s
    }

    /// All primitive `order`-th roots of unity, in increasing numerator order.
    pub fn primitive_roots(order: u64) -> Vec<Scalar> {
        assert!(order > 0);
        (0..order)
            .filter(|p| p.gcd(&order) == 1)
            .map(|p| Scalar::root_of_unity(p as i64, order))
            .collect()
    }

    fn set_root(&mut self, p: i128, r: i128) {
        let p = p.rem_euclid(r);
        let g = p.gcd(&r);
        self.num = (p / g) as u64;
        self.den = (r / g) as u64;
    }

    /// Root-of-unity part as the reduced fraction `(p, r)` with `0 <= p < r`.
    pub fn root_fraction(&self) -> (u64, u64) {
        (self.num, self.den)
    }

    /// The root-of-unity factor alone.
    pub fn root_part(&self) -> Scalar {
        Scalar {
            num: self.num,
            den: self.den,
            params: BTreeMap::new(),
        }
    }

    pub fn params(&self) -> impl Iterator<Item = (&str, i64)> {
        self.params.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn exponent_of(&self, name: &str) -> i64 {
        self.params.get(name).copied().unwrap_or(0)
    }

    pub fn has_params(&self) -> bool {
        !self.params.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.num == 0 && self.params.is_empty()
    }

    pub fn pow(&self, k: i64) -> Scalar {
        let mut out = Scalar::one();
        out.set_root(self.num as i128 * k as i128, self.den as i128);
        if k != 0 {
            out.params = self
                .params
                .iter()
                .map(|(n, e)| (n.clone(), e * k))
                .collect();
        }
        out
    }

    pub fn inv(&self) -> Scalar {
        self.pow(-1)
    }

    pub fn div(&self, other: &Scalar) -> Scalar {
        self * &other.inv()
    }

    pub fn multiplicative_order(&self) -> Order {
        if self.params.is_empty() {
            Order::Finite(self.den)
        } else {
            Order::Infinite
        }
    }

    /// Whether the q-integer `[m]_q = 1 + q + ... + q^(m-1)` vanishes.
    ///
    /// In characteristic zero this holds iff `q != 1` and `q^m = 1`; `[0]_q` is
    /// the empty sum and counts as zero.
    pub fn qint_is_zero(&self, m: u64) -> bool {
        if m == 0 {
            return true;
        }
        !self.is_one() && self.params.is_empty() && m.is_multiple_of(self.den)
    }

    /// Replaces the parameter `name` by `value`.
    pub fn substitute(&self, name: &str, value: &Scalar) -> Scalar {
        match self.params.get(name) {
            None => self.clone(),
            Some(&e) => {
                let mut rest = self.clone();
                rest.params.remove(name);
                &rest * &value.pow(e)
            }
        }
    }

    /// Replaces every parameter named in `values` simultaneously.
    pub fn substitute_all(&self, values: &BTreeMap<String, Scalar>) -> Scalar {
        let mut out = self.root_part();
        for (name, &e) in &self.params {
            match values.get(name) {
                Some(v) => out *= &v.pow(e),
                None => out *= &Scalar::param_pow(name, e),
            }
        }
        out
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::one()
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;

    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out *= rhs;
        out
    }
}

impl Mul for Scalar {
    type Output = Scalar;

    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        let (a, b) = (self.num as i128, self.den as i128);
        let (c, d) = (rhs.num as i128, rhs.den as i128);
        let l = b.lcm(&d);
        self.set_root(a * (l / b) + c * (l / d), l);
        for (name, e) in &rhs.params {
            let entry = self.params.entry(name.clone()).or_insert(0);
            *entry += e;
            if *entry == 0 {
                self.params.remove(name);
            }
        }
    }
}

impl std::iter::Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |acc, x| acc * x)
    }
}

/// Orders by `(den, num)` first, then by the sorted `(name, exponent)` list.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.den, self.num)
            .cmp(&(other.den, other.num))
            .then_with(|| self.params.iter().cmp(other.params.iter()))
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.num != 0 {
            parts.push(format!("u({}/{})", self.num, self.den));
        }
        for (name, e) in &self.params {
            if *e == 1 {
                parts.push(name.clone());
            } else {
                parts.push(format!("{name}^{e}"));
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

impl FromStr for Scalar {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse::parse_scalar(s)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn u(p: i64, r: u64) -> Scalar {
        Scalar::root_of_unity(p, r)
    }

    fn t() -> Scalar {
        Scalar::param("t")
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&u(1, 2) * &u(1, 2), Scalar::one());
        let a = &u(1, 3) * &t();
        let b = &u(1, 3) * &t().inv();
        assert_eq!(&a * &b, u(2, 3));
        assert_eq!(&u(1, 12).pow(5) * &u(1, 12).pow(5), u(5, 6));
        assert_eq!((&a * &b).root_fraction(), (2, 3));
    }

    #[test]
    fn pow_examples() {
        assert_eq!((&u(1, 2) * &t()).pow(-1), &u(1, 2) * &t().inv());
        assert_eq!(u(1, 5).pow(5), Scalar::one());
        assert_eq!(u(1, 12).pow(4), u(1, 3));
        assert_eq!(u(-1, 3), u(2, 3));
        assert_eq!(u(4, 8), u(1, 2));
    }

    #[test]
    fn order_examples() {
        assert_eq!(u(1, 2).multiplicative_order(), Order::Finite(2));
        assert_eq!(u(5, 12).multiplicative_order(), Order::Finite(12));
        assert_eq!(
            (&u(1, 3) * &t().pow(2)).multiplicative_order(),
            Order::Infinite
        );
        assert_eq!(Scalar::one().multiplicative_order(), Order::Finite(1));
    }

    #[test]
    fn qint_examples() {
        assert!(u(1, 3).qint_is_zero(3));
        assert!(!Scalar::one().qint_is_zero(3));
        assert!(!u(1, 2).qint_is_zero(3));
        assert!(u(1, 2).qint_is_zero(0));
        assert!(u(1, 2).qint_is_zero(4));
        assert!(!t().qint_is_zero(5));
    }

    #[test]
    fn compare_examples() {
        assert_eq!(Scalar::one().cmp(&u(1, 2)), Ordering::Less);
        assert_eq!(t().cmp(&t()), Ordering::Equal);
        assert_eq!(u(1, 3).cmp(&(&u(1, 3) * &t())), Ordering::Less);
        assert_eq!(t().cmp(&u(1, 2)), Ordering::Less);
    }

    #[test]
    fn rendering() {
        assert_eq!(Scalar::one().to_string(), "1");
        assert_eq!(Scalar::minus_one().to_string(), "u(1/2)");
        assert_eq!(t().pow(-2).to_string(), "t^-2");
        let x = &(&u(1, 3) * &Scalar::param("zeta")) * &t().pow(3);
        assert_eq!(x.to_string(), "u(1/3)*t^3*zeta");
    }

    #[test]
    fn substitution() {
        let q = Scalar::param("q").pow(-2);
        let v = &u(1, 2) * &Scalar::param("q0").inv();
        assert_eq!(q.substitute("q", &v), Scalar::param("q0").pow(2));
        assert_eq!(u(1, 3).substitute("q", &v), u(1, 3));

        let x: Scalar = "a*b^2".parse().unwrap();
        let swap = BTreeMap::from([
            ("a".to_string(), Scalar::param("b")),
            ("b".to_string(), Scalar::param("a")),
        ]);
        assert_eq!(x.substitute_all(&swap), "b*a^2".parse().unwrap());
    }

    #[test]
    fn primitive_roots_counts() {
        let counts: Vec<usize> = [3, 5, 8, 12, 14, 18, 20, 24, 30]
            .iter()
            .map(|&r| Scalar::primitive_roots(r).len())
            .collect();
        assert_eq!(counts, vec![2, 4, 4, 4, 6, 6, 8, 8, 8]);
        assert_eq!(Scalar::primitive_roots(1), vec![Scalar::one()]);
    }

    pub(crate) fn arb_scalar() -> impl Strategy<Value = Scalar> {
        (
            -60i64..60,
            1u64..=60,
            proptest::collection::btree_map(
                prop_oneof![Just("t".to_string()), Just("s".to_string())],
                -4i64..=4,
                0..=2,
            ),
        )
            .prop_map(|(p, r, params)| {
                params
                    .into_iter()
                    .fold(Scalar::root_of_unity(p, r), |acc, (n, e)| {
                        &acc * &Scalar::param_pow(&n, e)
                    })
            })
    }

    proptest! {
        #[test]
        fn inverse_law(a in arb_scalar()) {
            prop_assert!((&a * &a.inv()).is_one());
        }

        #[test]
        fn pow_is_additive(a in arb_scalar(), k in -20i64..20, l in -20i64..20) {
            prop_assert_eq!(a.pow(k + l), &a.pow(k) * &a.pow(l));
        }

        #[test]
        fn order_of_power(a in arb_scalar(), k in -40i64..40) {
            if let Order::Finite(r) = a.multiplicative_order() {
                let g = (r as i64).gcd(&k) as u64;
                prop_assert_eq!(a.pow(k).multiplicative_order(), Order::Finite(r / g));
            }
        }

        #[test]
        fn mul_commutes_and_associates(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn compare_is_total(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
            prop_assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
            prop_assert_eq!(a.cmp(&b) == Ordering::Equal, a == b);
            if a <= b && b <= c {
                prop_assert!(a <= c);
            }
        }

        #[test]
        fn display_round_trips(a in arb_scalar()) {
            let back: Scalar = a.to_string().parse().unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
