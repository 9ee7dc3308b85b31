//! Coefficient fields: the rationals, prime fields and one layer of rational
//! functions over either.

use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::AlgebraError;
use crate::gcd::poly_gcd;
use crate::poly::{MonomialOrder, Polynomial, Ring};

/// A coefficient field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldDesc {
    Rationals,
    PrimeField(u64),
    /// `base(params)`: the parameter ring carries the ground field and the
    /// ordered parameter names.
    RationalFunctions(Arc<Ring>),
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldDesc {
    pub fn prime_field(p: u64) -> Result<Self, AlgebraError> {
        if p > u32::MAX as u64 {
            return Err(AlgebraError::InvalidField(format!(
                "characteristic {p} exceeds the supported range"
            )));
        }
        if !is_prime(p) {
            return Err(AlgebraError::InvalidField(format!("{p} is not prime")));
        }
        Ok(FieldDesc::PrimeField(p))
    }

    /// `base(params)`; the base must be a ground field (one transcendental layer).
    pub fn rational_functions(base: FieldDesc, params: Vec<String>) -> Result<Self, AlgebraError> {
        if !base.is_ground() {
            return Err(AlgebraError::InvalidField(
                "rational function fields may only be built over Q or F_p".into(),
            ));
        }
        if params.is_empty() {
            return Err(AlgebraError::InvalidField(
                "rational function field needs at least one parameter".into(),
            ));
        }
        Ok(FieldDesc::RationalFunctions(Ring::new(base, params)?))
    }

    pub fn is_ground(&self) -> bool {
        !matches!(self, FieldDesc::RationalFunctions(_))
    }

    /// The ground field at the bottom of the tower.
    pub fn ground(&self) -> &FieldDesc {
        match self {
            FieldDesc::RationalFunctions(r) => r.field(),
            f => f,
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self.ground() {
            FieldDesc::PrimeField(p) => *p,
            _ => 0,
        }
    }

    pub fn params(&self) -> &[String] {
        match self {
            FieldDesc::RationalFunctions(r) => r.vars(),
            _ => &[],
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.from_int(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        match self {
            FieldDesc::Rationals => FieldElement::Rational(BigRational::from_integer(n.clone())),
            FieldDesc::PrimeField(p) => FieldElement::Modular {
                value: reduce_mod(n, *p),
                modulus: *p,
            },
            FieldDesc::RationalFunctions(r) => {
                let c = r.field().from_bigint(n);
                FieldElement::Fraction(RatFun::from_poly(Polynomial::constant(r, c)))
            }
        }
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<FieldElement, AlgebraError> {
        let num = self.from_bigint(q.numer());
        let den = self.from_bigint(q.denom());
        num.div(&den)
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDesc::Rationals => write!(f, "Q"),
            FieldDesc::PrimeField(p) => write!(f, "F_{p}"),
            FieldDesc::RationalFunctions(r) => write!(f, "{}({})", r.field(), r.vars().join(",")),
        }
    }
}

fn reduce_mod(n: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = ((n % &m) + &m) % &m;
    r.to_u64().expect("residue fits")
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// An element of a rational function field `k(params)`, kept as a reduced
/// fraction with monic denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatFun {
    num: Polynomial,
    den: Polynomial,
}

impl RatFun {
    pub fn from_poly(num: Polynomial) -> Self {
        let den = Polynomial::one(num.ring());
        RatFun { num, den }
    }

    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if num.ring() != den.ring() {
            return Err(AlgebraError::RingMismatch(
                num.ring().to_string(),
                den.ring().to_string(),
            ));
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            let one = Polynomial::one(den.ring());
            return RatFun { num, den: one };
        }
        let g = poly_gcd(&num, &den);
        let (mut num, mut den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.exact_div(&g).expect("gcd divides numerator"),
                den.exact_div(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den
            .leading_term(MonomialOrder::DegRevLex)
            .map(|(_, c)| c.clone())
            .expect("nonzero denominator");
        if !lc.is_one() {
            let inv = lc.inv().expect("nonzero leading coefficient");
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFun { num, den }
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    fn add(&self, o: &Self) -> Self {
        if self.den == o.den {
            return Self::normalized(&self.num + &o.num, self.den.clone());
        }
        Self::normalized(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }

    fn mul(&self, o: &Self) -> Self {
        Self::normalized(&self.num * &o.num, &self.den * &o.den)
    }

    fn neg(&self) -> Self {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    fn inv(&self) -> Result<Self, AlgebraError> {
        if self.num.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }
}

/// A field element in canonical form; equality is representational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldElement {
    Rational(BigRational),
    /// Residue in `[0, modulus)`.
    Modular { value: u64, modulus: u64 },
    Fraction(RatFun),
}

impl FieldElement {
    pub fn field(&self) -> FieldDesc {
        match self {
            FieldElement::Rational(_) => FieldDesc::Rationals,
            FieldElement::Modular { modulus, .. } => FieldDesc::PrimeField(*modulus),
            FieldElement::Fraction(r) => FieldDesc::RationalFunctions(r.num.ring().clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_zero(),
            FieldElement::Modular { value, .. } => *value == 0,
            FieldElement::Fraction(r) => r.num.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_one(),
            FieldElement::Modular { value, .. } => *value == 1,
            FieldElement::Fraction(r) => r.den.is_one() && r.num.is_one(),
        }
    }

    /// Rational value, if this is an element of Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldElement::Rational(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_residue(&self) -> Option<u64> {
        match self {
            FieldElement::Modular { value, .. } => Some(*value),
            _ => None,
        }
    }

    /// Whether the printed form starts with a minus sign.
    pub(crate) fn is_negative(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_negative(),
            _ => false,
        }
    }

    fn mismatch(&self, o: &Self) -> ! {
        panic!("field mismatch: {} vs {}", self.field(), o.field())
    }

    pub fn add(&self, o: &Self) -> Self {
        match (self, o) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a + b),
            (FieldElement::Modular { value: a, modulus: p }, FieldElement::Modular { value: b, modulus: q })
                if p == q =>
            {
                FieldElement::Modular {
                    value: ((*a as u128 + *b as u128) % *p as u128) as u64,
                    modulus: *p,
                }
            }
            (FieldElement::Fraction(a), FieldElement::Fraction(b)) if a.num.ring() == b.num.ring() => {
                FieldElement::Fraction(a.add(b))
            }
            _ => self.mismatch(o),
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            FieldElement::Rational(a) => FieldElement::Rational(-a),
            FieldElement::Modular { value, modulus } => FieldElement::Modular {
                value: if *value == 0 { 0 } else { modulus - value },
                modulus: *modulus,
            },
            FieldElement::Fraction(a) => FieldElement::Fraction(a.neg()),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        match (self, o) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => FieldElement::Rational(a * b),
            (FieldElement::Modular { value: a, modulus: p }, FieldElement::Modular { value: b, modulus: q })
                if p == q =>
            {
                FieldElement::Modular {
                    value: mul_mod(*a, *b, *p),
                    modulus: *p,
                }
            }
            (FieldElement::Fraction(a), FieldElement::Fraction(b)) if a.num.ring() == b.num.ring() => {
                FieldElement::Fraction(a.mul(b))
            }
            _ => self.mismatch(o),
        }
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(match self {
            FieldElement::Rational(a) => FieldElement::Rational(a.recip()),
            FieldElement::Modular { value, modulus } => FieldElement::Modular {
                value: inv_mod(*value, *modulus),
                modulus: *modulus,
            },
            FieldElement::Fraction(a) => FieldElement::Fraction(a.inv()?),
        })
    }

    pub fn div(&self, o: &Self) -> Result<Self, AlgebraError> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Re-derives the canonical form from the stored value.
    pub fn canonicalize(&self) -> Self {
        match self {
            FieldElement::Rational(q) => FieldElement::Rational(BigRational::new(q.numer().clone(), q.denom().clone())),
            FieldElement::Modular { value, modulus } => FieldElement::Modular {
                value: value % modulus,
                modulus: *modulus,
            },
            FieldElement::Fraction(r) => FieldElement::Fraction(RatFun::normalized(r.num.clone(), r.den.clone())),
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            FieldElement::Modular { value, .. } => write!(f, "{value}"),
            FieldElement::Fraction(r) => {
                if r.den.is_one() {
                    write!(f, "({})", r.num)
                } else {
                    write!(f, "({})/({})", r.num, r.den)
                }
            }
        }
    }
}

/// Field operation selector for [`field_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Inverts the first operand; the second is ignored.
    Inv,
}

/// Checked field arithmetic.
pub fn field_arith(op: FieldOp, a: &FieldElement, b: &FieldElement) -> Result<FieldElement, AlgebraError> {
    let (fa, fb) = (a.field(), b.field());
    if fa != fb {
        return Err(AlgebraError::FieldMismatch(fa.to_string(), fb.to_string()));
    }
    match op {
        FieldOp::Add => Ok(a.add(b)),
        FieldOp::Sub => Ok(a.sub(b)),
        FieldOp::Mul => Ok(a.mul(b)),
        FieldOp::Div => a.div(b),
        FieldOp::Inv => a.inv(),
    }
}

/// Square root in F_p, if one exists.
pub(crate) fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    // Tonelli-Shanks
    let mut q = p - 1;
    let mut s = 0;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn q(n: i64, d: i64) -> FieldElement {
        FieldElement::Rational(BigRational::new(n.into(), d.into()))
    }

    #[test]
    fn rational_sum() {
        assert_eq!(field_arith(FieldOp::Add, &q(1, 2), &q(1, 3)).unwrap(), q(5, 6));
    }

    #[test]
    fn prime_field_inverse() {
        let f5 = FieldDesc::prime_field(5).unwrap();
        let two = f5.from_int(2);
        assert_eq!(field_arith(FieldOp::Inv, &two, &two).unwrap(), f5.from_int(3));
        assert_eq!(f5.from_int(-1).as_residue(), Some(4));
    }

    #[test]
    fn prime_field_rejects_composites() {
        assert!(FieldDesc::prime_field(4).is_err());
        assert!(FieldDesc::prime_field(1).is_err());
        assert!(FieldDesc::prime_field(7).is_ok());
    }

    #[test]
    fn rational_function_inverse_pair() {
        let k = FieldDesc::rational_functions(FieldDesc::Rationals, vec!["pi".into()]).unwrap();
        let pring = match &k {
            FieldDesc::RationalFunctions(r) => r.clone(),
            _ => unreachable!(),
        };
        let pi = parse_poly(&pring, "pi").unwrap();
        let pi1 = parse_poly(&pring, "pi + 1").unwrap();
        let a = FieldElement::Fraction(RatFun::new(pi.clone(), pi1.clone()).unwrap());
        let b = FieldElement::Fraction(RatFun::new(pi1, pi).unwrap());
        let prod = field_arith(FieldOp::Mul, &a, &b).unwrap();
        assert!(prod.is_one());
        assert_eq!(prod, k.one());
    }

    #[test]
    fn ratfun_is_reduced_with_monic_denominator() {
        let k = FieldDesc::rational_functions(FieldDesc::Rationals, vec!["u".into()]).unwrap();
        let r = match &k {
            FieldDesc::RationalFunctions(r) => r.clone(),
            _ => unreachable!(),
        };
        let num = parse_poly(&r, "u^2 - 1").unwrap();
        let den = parse_poly(&r, "2*u^2 + 4*u + 2").unwrap();
        let x = RatFun::new(num, den).unwrap();
        assert_eq!(x.numerator().to_string(), "1/2*u - 1/2");
        assert_eq!(x.denominator().to_string(), "u + 1");
    }

    #[test]
    fn division_by_zero_and_mismatch() {
        let z = q(0, 1);
        assert_eq!(field_arith(FieldOp::Div, &q(1, 1), &z), Err(AlgebraError::DivisionByZero));
        let f3 = FieldDesc::PrimeField(3).one();
        assert!(matches!(
            field_arith(FieldOp::Add, &q(1, 1), &f3),
            Err(AlgebraError::FieldMismatch(_, _))
        ));
    }

    #[test]
    fn sqrt_mod_small_primes() {
        for p in [2u64, 3, 5, 7, 11, 13, 17] {
            for a in 0..p {
                match sqrt_mod(a, p) {
                    Some(r) => assert_eq!(mul_mod(r, r, p), a),
                    None => assert!((0..p).all(|x| mul_mod(x, x, p) != a)),
                }
            }
        }
    }

    #[test]
    fn canonicalize_idempotent() {
        let x = q(6, 4);
        assert_eq!(x.canonicalize(), x);
        assert_eq!(x.canonicalize().canonicalize(), x.canonicalize());
    }
}
