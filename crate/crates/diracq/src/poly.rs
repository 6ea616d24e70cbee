//! Exact multivariate polynomials over the chart variables.
//!
//! Coefficients are arbitrary-precision rationals; all arithmetic is exact.
//! The radius parameter `R` is an ordinary formal variable here (it only ever
//! appears with even exponent in this toolkit's systems) and is folded to a
//! number by [`Polynomial::substitute_radius`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::chart::Var;

/// Number of formal variables (q1, q2, p1, p2, R).
pub const NUM_VARS: usize = 5;

/// Exact rational coefficient.
pub type Coeff = BigRational;

/// Convenience constructor for integer coefficients.
pub fn coeff_int(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

/// Convenience constructor for fractional coefficients.
pub fn coeff_frac(num: i64, den: i64) -> Coeff {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exponent tuple of a monomial, indexed by [`Var::index`].
///
/// The derived ordering (lexicographic on the tuple) makes q1-heavy monomials
/// largest; display and leading-term conventions both use it.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(pub [u32; NUM_VARS]);

impl Monomial {
    pub fn one() -> Self {
        Monomial([0; NUM_VARS])
    }

    pub fn var(v: Var) -> Self {
        let mut e = [0; NUM_VARS];
        e[v.index()] = 1;
        Monomial(e)
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0[v.index()]
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut e = [0; NUM_VARS];
        for i in 0..NUM_VARS {
            e[i] = self.0[i] + other.0[i];
        }
        Monomial(e)
    }

    /// Componentwise quotient; caller guarantees divisibility.
    fn div(&self, other: &Monomial) -> Monomial {
        let mut e = [0; NUM_VARS];
        for i in 0..NUM_VARS {
            debug_assert!(self.0[i] >= other.0[i]);
            e[i] = self.0[i] - other.0[i];
        }
        Monomial(e)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return f.write_str("1");
        }
        let mut first = true;
        for v in Var::ALL {
            let e = self.exponent(v);
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", v)?;
            } else {
                write!(f, "{}^{}", v, e)?;
            }
        }
        Ok(())
    }
}

/// Exact multivariate polynomial. Stored terms never carry a zero coefficient.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Polynomial { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Polynomial::constant(coeff_int(n))
    }

    pub fn var(v: Var) -> Self {
        Polynomial::var_pow(v, 1)
    }

    pub fn var_pow(v: Var, e: u32) -> Self {
        if e == 0 {
            return Polynomial::one();
        }
        let mut mono = [0; NUM_VARS];
        mono[v.index()] = e;
        let mut terms = BTreeMap::new();
        terms.insert(Monomial(mono), Coeff::one());
        Polynomial { terms }
    }

    pub fn monomial(c: Coeff, exponents: [u32; NUM_VARS]) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial(exponents), c);
        }
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&Monomial::one())
                .is_some_and(|c| c.is_one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_constant)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Coefficient of the largest monomial in the term order; zero for the
    /// zero polynomial.
    pub fn leading_coefficient(&self) -> Coeff {
        self.terms
            .iter()
            .next_back()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Coeff::zero)
    }

    fn insert_term(&mut self, mono: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get().clone() + c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &Coeff) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, a)| (*m, a * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Polynomial {
        let mut acc = Polynomial::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact partial derivative.
    pub fn differentiate(&self, v: Var) -> Polynomial {
        let idx = v.index();
        let mut out = Polynomial::zero();
        for (mono, c) in &self.terms {
            let e = mono.0[idx];
            if e == 0 {
                continue;
            }
            let mut m = *mono;
            m.0[idx] = e - 1;
            out.insert_term(m, c * coeff_int(e as i64));
        }
        out
    }

    /// Substitute zero for a variable (drops every term containing it).
    pub fn substitute_zero(&self, v: Var) -> Polynomial {
        let idx = v.index();
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.0[idx] == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Fold the formal parameter `R` to an exact numeric value.
    pub fn substitute_radius(&self, r: &Coeff) -> Polynomial {
        let idx = Var::R.index();
        let mut out = Polynomial::zero();
        for (mono, c) in &self.terms {
            let e = mono.0[idx];
            let mut m = *mono;
            m.0[idx] = 0;
            let mut scaled = c.clone();
            for _ in 0..e {
                scaled *= r;
            }
            out.insert_term(m, scaled);
        }
        out
    }

    /// Exact evaluation at rational values, indexed like [`Var::ALL`].
    pub fn eval_exact(&self, vals: &[Coeff; NUM_VARS]) -> Coeff {
        let mut acc = Coeff::zero();
        for (mono, c) in &self.terms {
            let mut term = c.clone();
            for i in 0..NUM_VARS {
                for _ in 0..mono.0[i] {
                    term *= &vals[i];
                }
            }
            acc += term;
        }
        acc
    }

    /// Floating evaluation; used by the numeric layers, never by exact checks.
    pub fn eval_f64(&self, vals: &[f64; NUM_VARS]) -> f64 {
        let mut acc = 0.0;
        for (mono, c) in &self.terms {
            let mut term = c.to_f64().unwrap_or(f64::NAN);
            for i in 0..NUM_VARS {
                if mono.0[i] > 0 {
                    term *= vals[i].powi(mono.0[i] as i32);
                }
            }
            acc += term;
        }
        acc
    }

    /// Numeric content: the positive rational `g` such that `self / g` has
    /// coprime integer coefficients. Zero for the zero polynomial.
    pub fn numeric_content(&self) -> Coeff {
        if self.is_zero() {
            return Coeff::zero();
        }
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            let scaled = c.numer() * (&den_lcm / c.denom());
            num_gcd = num_gcd.gcd(&scaled);
        }
        BigRational::new(num_gcd, den_lcm)
    }

    /// Componentwise minimum exponent over all terms (the shared monomial
    /// factor). Returns the unit monomial for the zero polynomial.
    pub fn monomial_content(&self) -> Monomial {
        let mut mins = [u32::MAX; NUM_VARS];
        for mono in self.terms.keys() {
            for i in 0..NUM_VARS {
                mins[i] = mins[i].min(mono.0[i]);
            }
        }
        if self.terms.is_empty() {
            return Monomial::one();
        }
        Monomial(mins)
    }

    /// Divide every term by a monomial; caller guarantees divisibility.
    pub fn div_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(mono, c)| (mono.div(m), c.clone()))
                .collect(),
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(*m, c.clone());
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(*m, -c.clone());
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, -c.clone()))
                .collect(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

fn fmt_coeff(c: &Coeff) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        // Largest monomial first.
        for (i, (mono, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            if mono.is_constant() {
                f.write_str(&fmt_coeff(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}*{}", fmt_coeff(&abs), mono)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Var::*;

    fn q1() -> Polynomial {
        Polynomial::var(Q1)
    }
    fn q2() -> Polynomial {
        Polynomial::var(Q2)
    }
    fn p1() -> Polynomial {
        Polynomial::var(P1)
    }

    #[test]
    fn power_rule() {
        let f = q1().pow(2);
        assert_eq!(f.differentiate(Q1), q1().scale(&coeff_int(2)));
    }

    #[test]
    fn derivative_of_independent_variable_is_zero() {
        let f = Polynomial::var(P2);
        assert!(f.differentiate(Q2).is_zero());
    }

    #[test]
    fn derivative_commutes_with_sum() {
        let f = &(&q1().pow(3) * &q2()) + &p1().pow(2);
        let g = &q2().pow(4) - &Polynomial::from_int(7);
        for v in [Q1, Q2, P1, P2] {
            let lhs = (&f + &g).differentiate(v);
            let rhs = &f.differentiate(v) + &g.differentiate(v);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn addition_cancels_exactly() {
        let f = &q1() - &q1();
        assert!(f.is_zero());
        let g = &(&q1() + &q2()) - &q2();
        assert_eq!(g, q1());
    }

    #[test]
    fn substitute_radius_folds_parameter() {
        // q2^2 - R^2 at R = 2 -> q2^2 - 4
        let f = &Polynomial::var_pow(Q2, 2) - &Polynomial::var_pow(R, 2);
        let g = f.substitute_radius(&coeff_int(2));
        let expect = &Polynomial::var_pow(Q2, 2) - &Polynomial::from_int(4);
        assert_eq!(g, expect);
    }

    #[test]
    fn eval_exact_matches_hand_value() {
        // q1^2 + p1^2 at (1, 1, 2, 0) -> 5
        let f = &Polynomial::var_pow(Q1, 2) + &Polynomial::var_pow(P1, 2);
        let vals = [
            coeff_int(1),
            coeff_int(1),
            coeff_int(2),
            coeff_int(0),
            coeff_int(0),
        ];
        assert_eq!(f.eval_exact(&vals), coeff_int(5));
    }

    #[test]
    fn content_normalization() {
        // 6*q1*q2^2 + 4*q1^2*q2 has numeric content 2 and monomial content q1*q2
        let f = &Polynomial::monomial(coeff_int(6), [1, 2, 0, 0, 0])
            + &Polynomial::monomial(coeff_int(4), [2, 1, 0, 0, 0]);
        assert_eq!(f.numeric_content(), coeff_int(2));
        assert_eq!(f.monomial_content(), Monomial([1, 1, 0, 0, 0]));
        let reduced = f
            .div_monomial(&f.monomial_content())
            .scale(&coeff_int(2).recip());
        let expect = &Polynomial::monomial(coeff_int(3), [0, 1, 0, 0, 0])
            + &Polynomial::monomial(coeff_int(2), [1, 0, 0, 0, 0]);
        assert_eq!(reduced, expect);
    }

    #[test]
    fn display_order_and_format() {
        // phi2 = q1^2 + q2^2 + p1^2 - R^2
        let f = &(&(&Polynomial::var_pow(Q1, 2) + &Polynomial::var_pow(Q2, 2))
            + &Polynomial::var_pow(P1, 2))
            - &Polynomial::var_pow(R, 2);
        assert_eq!(f.to_string(), "q1^2 + q2^2 + p1^2 - R^2");
        let g = Polynomial::monomial(coeff_int(-2), [0, 1, 0, 0, 0]);
        assert_eq!(g.to_string(), "-2*q2");
        let h = Polynomial::monomial(coeff_frac(1, 3), [0, 3, 0, 0, 0]);
        assert_eq!(h.to_string(), "1/3*q2^3");
    }
}
