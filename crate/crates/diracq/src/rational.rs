//! Rational functions of the canonical variables: the observable type that
//! carries constraints, Hamiltonians, and brackets.
//!
//! Observables are stored as numerator/denominator pairs of exact
//! polynomials. They are kept unreduced apart from content normalization
//! (shared numeric factor and shared variable powers); equality is decided by
//! exact cross-multiplication, so no multivariate gcd machinery is needed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chart::{CanonicalChart, Var};
use crate::poly::{Coeff, Polynomial, NUM_VARS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    /// Evaluation point lies on the zero set of the denominator
    /// (in these systems, the excluded line q2 = 0).
    #[error("denominator vanishes at the evaluation point")]
    DenominatorVanishes,
    /// Attempted to construct or divide by a zero denominator.
    #[error("zero denominator")]
    ZeroDenominator,
}

/// Phase-space point (q1, q2, p1, p2).
pub type PhasePoint4 = [f64; 4];

/// Exact rational function of (q1, q2, p1, p2) and the parameter R.
#[derive(Clone, Debug)]
pub struct RationalObservable {
    num: Polynomial,
    den: Polynomial,
}

impl RationalObservable {
    /// Build from numerator and denominator; the denominator must be nonzero.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(Self { num, den }.normalized())
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Self {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_poly(Polynomial::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(Polynomial::var(v))
    }

    pub fn constant(c: Coeff) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(Polynomial::from_int(n))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// True when the denominator is the constant 1 after normalization.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// Strip the common numeric and monomial content of numerator and
    /// denominator and make the denominator's leading coefficient positive.
    fn normalized(self) -> Self {
        let RationalObservable { num, den } = self;
        if num.is_zero() {
            return Self {
                num,
                den: Polynomial::one(),
            };
        }
        let mono_n = num.monomial_content();
        let mono_d = den.monomial_content();
        let mut shared = [0u32; NUM_VARS];
        for i in 0..NUM_VARS {
            shared[i] = mono_n.0[i].min(mono_d.0[i]);
        }
        let shared = crate::poly::Monomial(shared);
        let mut num = num.div_monomial(&shared);
        let mut den = den.div_monomial(&shared);

        let cn = num.numeric_content();
        let cd = den.numeric_content();
        // gcd of two positive rationals: gcd(a/b, c/d) = gcd(ad, cb)/(bd)
        let g = BigRational::new(
            num_integer::Integer::gcd(
                &(cn.numer() * cd.denom()),
                &(cd.numer() * cn.denom()),
            ),
            cn.denom() * cd.denom(),
        );
        if !g.is_zero() {
            let inv = g.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        if den.leading_coefficient().is_negative() {
            num = -num;
            den = -den;
        }
        Self { num, den }
    }

    pub fn differentiate(&self, v: Var) -> RationalObservable {
        let dn = self.num.differentiate(v);
        let dd = self.den.differentiate(v);
        if dd.is_zero() {
            // Denominator free of v: d(n/d) = n'/d.
            return Self {
                num: dn,
                den: self.den.clone(),
            }
            .normalized();
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        let den = &self.den * &self.den;
        Self { num, den }.normalized()
    }

    pub fn substitute_zero(&self, v: Var) -> Result<RationalObservable, AlgebraError> {
        RationalObservable::new(
            self.num.substitute_zero(v),
            self.den.substitute_zero(v),
        )
    }

    pub fn substitute_radius(&self, r: &Coeff) -> RationalObservable {
        Self {
            num: self.num.substitute_radius(r),
            den: self.den.substitute_radius(r),
        }
        .normalized()
    }

    /// Exact divide; the divisor must be nonzero.
    pub fn div(&self, rhs: &RationalObservable) -> Result<RationalObservable, AlgebraError> {
        if rhs.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        RationalObservable::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    /// Evaluate at a phase point with numeric radius. The arithmetic is
    /// exact rational throughout and folds to floating point only at the end.
    pub fn evaluate(&self, point: &PhasePoint4, r: f64) -> Result<f64, AlgebraError> {
        let vals = exact_values(point, r);
        let den = self.den.eval_exact(&vals);
        if den.is_zero() {
            return Err(AlgebraError::DenominatorVanishes);
        }
        let num = self.num.eval_exact(&vals);
        Ok((num / den).to_f64().unwrap_or(f64::NAN))
    }

    /// Exact evaluation at rational arguments.
    pub fn evaluate_exact(&self, vals: &[Coeff; NUM_VARS]) -> Result<Coeff, AlgebraError> {
        let den = self.den.eval_exact(vals);
        if den.is_zero() {
            return Err(AlgebraError::DenominatorVanishes);
        }
        Ok(self.num.eval_exact(vals) / den)
    }

    /// Bake the observable (with numeric radius) into a flat term list for
    /// fast per-step floating evaluation inside integrators.
    pub fn compile(&self, r: f64) -> CompiledObservable {
        let r_exact = BigRational::from_float(r).unwrap_or_else(BigRational::zero);
        let fixed = self.substitute_radius(&r_exact);
        CompiledObservable {
            num: compile_poly(&fixed.num),
            den: compile_poly(&fixed.den),
        }
    }
}

fn exact_values(point: &PhasePoint4, r: f64) -> [Coeff; NUM_VARS] {
    let conv = |x: f64| BigRational::from_float(x).unwrap_or_else(BigRational::zero);
    [
        conv(point[0]),
        conv(point[1]),
        conv(point[2]),
        conv(point[3]),
        conv(r),
    ]
}

impl PartialEq for RationalObservable {
    /// Semantic equality by exact cross-multiplication:
    /// a/b = c/d iff a*d - c*b = 0.
    fn eq(&self, other: &Self) -> bool {
        (&(&self.num * &other.den) - &(&other.num * &self.den)).is_zero()
    }
}

impl Eq for RationalObservable {}

impl Add for &RationalObservable {
    type Output = RationalObservable;
    fn add(self, rhs: &RationalObservable) -> RationalObservable {
        RationalObservable {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
        .normalized()
    }
}

impl Sub for &RationalObservable {
    type Output = RationalObservable;
    fn sub(self, rhs: &RationalObservable) -> RationalObservable {
        RationalObservable {
            num: &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
        .normalized()
    }
}

impl Mul for &RationalObservable {
    type Output = RationalObservable;
    fn mul(self, rhs: &RationalObservable) -> RationalObservable {
        RationalObservable {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        }
        .normalized()
    }
}

impl Neg for &RationalObservable {
    type Output = RationalObservable;
    fn neg(self) -> RationalObservable {
        RationalObservable {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for RationalObservable {
            type Output = RationalObservable;
            fn $method(self, rhs: RationalObservable) -> RationalObservable {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&RationalObservable> for RationalObservable {
            type Output = RationalObservable;
            fn $method(self, rhs: &RationalObservable) -> RationalObservable {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl Neg for RationalObservable {
    type Output = RationalObservable;
    fn neg(self) -> RationalObservable {
        -&self
    }
}

impl fmt::Display for RationalObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num_s = self.num.to_string();
        let den_s = self.den.to_string();
        let num_wrapped = if self.num.num_terms() > 1 {
            format!("({})", num_s)
        } else {
            num_s
        };
        // Parenthesize the denominator unless it is a bare monomial with
        // coefficient one (e.g. "q2", "q2^2").
        let den_plain = self.den.num_terms() == 1
            && self
                .den
                .terms()
                .next()
                .is_some_and(|(_, c)| c.abs().is_one() && !c.is_negative());
        let den_wrapped = if den_plain {
            den_s
        } else {
            format!("({})", den_s)
        };
        write!(f, "{}/{}", num_wrapped, den_wrapped)
    }
}

impl Serialize for RationalObservable {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalObservable {
    /// Reports deserialize expressions as opaque text; reconstruction of the
    /// symbolic form is not supported, so this restores a display-only value.
    fn deserialize<D: serde::Deserializer<'de>>(_deserializer: D) -> Result<Self, D::Error> {
        Err(serde::de::Error::custom(
            "RationalObservable cannot be reconstructed from text",
        ))
    }
}

/// Canonical Poisson bracket {f, g} = sum_i (df/dqi dg/dpi - df/dpi dg/dqi).
pub fn poisson_bracket(f: &RationalObservable, g: &RationalObservable) -> RationalObservable {
    let chart = CanonicalChart::standard();
    let mut acc = RationalObservable::zero();
    for (q, p) in chart.pairs() {
        let term = &(&f.differentiate(q) * &g.differentiate(p))
            - &(&f.differentiate(p) * &g.differentiate(q));
        acc = &acc + &term;
    }
    acc
}

/// Flat floating-point form of an observable with the radius substituted.
#[derive(Clone, Debug)]
pub struct CompiledObservable {
    num: CompiledPoly,
    den: CompiledPoly,
}

#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(f64, [u32; 4])>,
}

fn compile_poly(p: &Polynomial) -> CompiledPoly {
    let terms = p
        .terms()
        .map(|(m, c)| {
            debug_assert_eq!(m.exponent(Var::R), 0);
            let e = [m.0[0], m.0[1], m.0[2], m.0[3]];
            (c.to_f64().unwrap_or(f64::NAN), e)
        })
        .collect();
    CompiledPoly { terms }
}

impl CompiledPoly {
    fn eval(&self, x: &PhasePoint4) -> f64 {
        let mut acc = 0.0;
        for (c, e) in &self.terms {
            let mut t = *c;
            for i in 0..4 {
                if e[i] > 0 {
                    t *= x[i].powi(e[i] as i32);
                }
            }
            acc += t;
        }
        acc
    }
}

impl CompiledObservable {
    /// Fast floating evaluation. Returns `None` when the denominator is
    /// numerically negligible.
    pub fn eval(&self, x: &PhasePoint4) -> Option<f64> {
        let d = self.den.eval(x);
        if d.abs() < 1e-300 {
            return None;
        }
        Some(self.num.eval(x) / d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Var::*;
    use crate::poly::{coeff_int, Polynomial as P};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn var(v: Var) -> RationalObservable {
        RationalObservable::var(v)
    }

    fn inv_q2() -> RationalObservable {
        RationalObservable::new(P::one(), P::var(Q2)).unwrap()
    }

    /// Random sparse polynomial of bounded total degree, for exact identities.
    pub(crate) fn random_poly(rng: &mut StdRng, max_degree: u32, max_terms: usize) -> P {
        let n_terms = rng.random_range(1..=max_terms);
        let mut p = P::zero();
        for _ in 0..n_terms {
            let mut exps = [0u32; NUM_VARS];
            let mut budget = max_degree;
            for slot in 0..4 {
                let e = rng.random_range(0..=budget);
                exps[slot] = e;
                budget -= e;
            }
            let c = coeff_int(rng.random_range(-4..=4));
            p = &p + &P::monomial(c, exps);
        }
        p
    }

    #[test]
    fn quotient_rule_on_reciprocal() {
        // d(1/q2)/dq2 = -1/q2^2
        let f = inv_q2();
        let df = f.differentiate(Q2);
        let expect =
            RationalObservable::new(-P::one(), P::var_pow(Q2, 2)).unwrap();
        assert_eq!(df, expect);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        // Independent numeric oracle for the symbolic quotient rule.
        let f = RationalObservable::new(
            &(&P::var_pow(Q1, 2) * &P::var(P1)) + &P::var(Q2),
            P::var_pow(Q2, 2),
        )
        .unwrap();
        let point = [0.7, 1.3, -0.4, 0.9];
        let r = 2.0;
        let h = 1e-6;
        for (i, v) in [Q1, Q2, P1, P2].into_iter().enumerate() {
            let sym = f.differentiate(v).evaluate(&point, r).unwrap();
            let mut plus = point;
            plus[i] += h;
            let mut minus = point;
            minus[i] -= h;
            let fd =
                (f.evaluate(&plus, r).unwrap() - f.evaluate(&minus, r).unwrap()) / (2.0 * h);
            assert!(
                (sym - fd).abs() <= 1e-6 * (1.0 + sym.abs()),
                "mismatch for {v}: {sym} vs {fd}"
            );
        }
    }

    #[test]
    fn canonical_pairs_bracket_to_one() {
        assert_eq!(poisson_bracket(&var(Q1), &var(P1)), RationalObservable::one());
        assert_eq!(poisson_bracket(&var(Q2), &var(P2)), RationalObservable::one());
        assert!(poisson_bracket(&var(Q1), &var(P2)).is_zero());
        assert!(poisson_bracket(&var(Q1), &var(Q2)).is_zero());
    }

    #[test]
    fn bracket_with_sphere_constraint() {
        // {p2, q1^2 + q2^2 + p1^2 + p2^2 - R^2} = -2*q2
        let sphere = &(&(&(&P::var_pow(Q1, 2) + &P::var_pow(Q2, 2)) + &P::var_pow(P1, 2))
            + &P::var_pow(P2, 2))
            - &P::var_pow(R, 2);
        let b = poisson_bracket(&var(P2), &RationalObservable::from_poly(sphere));
        let expect = RationalObservable::from_poly(P::monomial(coeff_int(-2), [0, 1, 0, 0, 0]));
        assert_eq!(b, expect);
    }

    #[test]
    fn bracket_hand_example() {
        // {q1*p1, q1^2} = -2*q1^2
        let f = RationalObservable::from_poly(P::monomial(coeff_int(1), [1, 0, 1, 0, 0]));
        let g = RationalObservable::from_poly(P::var_pow(Q1, 2));
        let expect =
            RationalObservable::from_poly(P::monomial(coeff_int(-2), [2, 0, 0, 0, 0]));
        assert_eq!(poisson_bracket(&f, &g), expect);
    }

    #[test]
    fn evaluate_examples() {
        let f = &(&RationalObservable::var(Q1) * &RationalObservable::var(Q1))
            + &(&RationalObservable::var(P1) * &RationalObservable::var(P1));
        assert_eq!(f.evaluate(&[1.0, 1.0, 2.0, 0.0], 2.0).unwrap(), 5.0);

        let g = RationalObservable::new(-P::var(Q1), P::var(Q2)).unwrap();
        assert_eq!(g.evaluate(&[3.0, 2.0, 0.0, 0.0], 2.0).unwrap(), -1.5);

        let h = inv_q2();
        assert_eq!(
            h.evaluate(&[1.0, 0.0, 0.0, 0.0], 2.0),
            Err(AlgebraError::DenominatorVanishes)
        );
    }

    #[test]
    fn bracket_axioms_hold_exactly() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let f = RationalObservable::from_poly(random_poly(&mut rng, 4, 4));
            let g = RationalObservable::from_poly(random_poly(&mut rng, 4, 4));
            let h = RationalObservable::from_poly(random_poly(&mut rng, 4, 4));
            let a = RationalObservable::constant(coeff_int(rng.random_range(-3..=3)));
            let b = RationalObservable::constant(coeff_int(rng.random_range(-3..=3)));

            // Bilinearity
            let lhs = poisson_bracket(&(&(&a * &f) + &(&b * &g)), &h);
            let rhs = &(&a * &poisson_bracket(&f, &h)) + &(&b * &poisson_bracket(&g, &h));
            assert_eq!(lhs, rhs);

            // Antisymmetry
            let anti = &poisson_bracket(&f, &g) + &poisson_bracket(&g, &f);
            assert!(anti.is_zero());

            // Leibniz
            let leib = &poisson_bracket(&(&f * &g), &h)
                - &(&(&f * &poisson_bracket(&g, &h)) + &(&g * &poisson_bracket(&f, &h)));
            assert!(leib.is_zero());

            // Jacobi
            let jac = &(&poisson_bracket(&f, &poisson_bracket(&g, &h))
                + &poisson_bracket(&g, &poisson_bracket(&h, &f)))
                + &poisson_bracket(&h, &poisson_bracket(&f, &g));
            assert!(jac.is_zero());
        }
    }

    #[test]
    fn display_of_simple_quotients() {
        let f = RationalObservable::new(-P::var(Q1), P::var(Q2)).unwrap();
        assert_eq!(f.to_string(), "-q1/q2");
        let g = RationalObservable::new(P::one(), P::monomial(coeff_int(2), [0, 1, 0, 0, 0]))
            .unwrap();
        assert_eq!(g.to_string(), "1/(2*q2)");
    }

    #[test]
    fn cross_multiplied_equality_ignores_representation() {
        // q1/q2 == (q1*q2)/(q2^2)
        let a = RationalObservable::new(P::var(Q1), P::var(Q2)).unwrap();
        let b = RationalObservable::new(
            &P::var(Q1) * &P::var(Q2),
            P::var_pow(Q2, 2),
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn compiled_matches_exact_evaluation() {
        let f = RationalObservable::new(
            &(&P::var_pow(Q1, 2) * &P::var(P1)) - &P::var_pow(R, 2),
            P::var(Q2),
        )
        .unwrap();
        let compiled = f.compile(2.0);
        let pt = [0.3, -1.7, 2.2, 0.1];
        let fast = compiled.eval(&pt).unwrap();
        let exact = f.evaluate(&pt, 2.0).unwrap();
        assert!((fast - exact).abs() < 1e-12 * (1.0 + exact.abs()));
    }
}
