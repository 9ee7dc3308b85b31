//! Multivariate polynomial GCD over a field, by recursive content and
//! primitive pseudo-remainder sequences.

use crate::poly::{Monomial, MonomialOrder, Polynomial};

/// Monic (DegRevLex) greatest common divisor; `gcd(0, 0) = 0`.
pub fn poly_gcd(f: &Polynomial, g: &Polynomial) -> Polynomial {
    let vars: Vec<usize> = (0..f.ring().nvars()).collect();
    let d = gcd_in(f, g, &vars);
    if d.is_zero() {
        d
    } else {
        d.monic(MonomialOrder::DegRevLex)
    }
}

fn gcd_in(f: &Polynomial, g: &Polynomial, vars: &[usize]) -> Polynomial {
    if f.is_zero() {
        return g.clone();
    }
    if g.is_zero() {
        return f.clone();
    }
    let used = |p: &Polynomial, v: usize| p.degree_in(v).unwrap_or(0) > 0;
    let Some(pos) = vars.iter().position(|&v| used(f, v) || used(g, v)) else {
        return Polynomial::one(f.ring());
    };
    let v = vars[pos];
    let rest: Vec<usize> = vars[pos + 1..].to_vec();

    let cf = content_in(f, v, &rest);
    let cg = content_in(g, v, &rest);
    let c = gcd_in(&cf, &cg, &rest);
    let mut a = f.exact_div(&cf).expect("content divides");
    let mut b = g.exact_div(&cg).expect("content divides");
    if a.degree_in(v) < b.degree_in(v) {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        let r = pseudo_rem(&a, &b, v);
        a = b;
        // Scalars are units; dropping them keeps remainders over Q small.
        b = if r.is_zero() { r } else { primitive_part(&r, v, &rest).monic(MonomialOrder::DegRevLex) };
    }
    let pp = primitive_part(&a, v, &rest);
    &c * &pp
}

/// GCD of the coefficients of `f` viewed in `K[rest][v]`.
pub(crate) fn content_in(f: &Polynomial, v: usize, rest: &[usize]) -> Polynomial {
    let mut acc = Polynomial::zero(f.ring());
    for c in f.coefficients_in(v) {
        if c.is_zero() {
            continue;
        }
        acc = gcd_in(&acc, &c, rest);
        if acc.is_constant() {
            return Polynomial::one(f.ring());
        }
    }
    acc
}

pub(crate) fn primitive_part(f: &Polynomial, v: usize, rest: &[usize]) -> Polynomial {
    let c = content_in(f, v, rest);
    f.exact_div(&c).expect("content divides")
}

/// `lc(b)^k * a mod b` as univariate polynomials in `v`.
fn pseudo_rem(a: &Polynomial, b: &Polynomial, v: usize) -> Polynomial {
    let db = b.degree_in(v).unwrap_or(0);
    let bc = b.coefficients_in(v);
    let lb = bc[db as usize].clone();
    let n = a.ring().nvars();
    let mut r = a.clone();
    while !r.is_zero() {
        let dr = r.degree_in(v).unwrap_or(0);
        if dr < db {
            break;
        }
        let lr = r.coefficients_in(v)[dr as usize].clone();
        let shift = Monomial::var(n, v, dr - db);
        r = &(&lb * &r) - &(&lr * &b.mul_monomial(&shift));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDesc;
    use crate::parse::parse_poly;
    use crate::poly::Ring;
    use std::sync::Arc;

    fn ring(field: FieldDesc, vars: &[&str]) -> Arc<Ring> {
        Ring::new(field, vars.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn univariate_gcd() {
        let r = ring(FieldDesc::Rationals, &["x"]);
        let f = parse_poly(&r, "x^2 - 1").unwrap();
        let g = parse_poly(&r, "2*x^2 + 4*x + 2").unwrap();
        assert_eq!(poly_gcd(&f, &g), parse_poly(&r, "x + 1").unwrap());
    }

    #[test]
    fn multivariate_gcd() {
        let r = ring(FieldDesc::Rationals, &["x", "y", "z"]);
        let common = parse_poly(&r, "x*y - z^2 + 1").unwrap();
        let f = &common * &parse_poly(&r, "x + y").unwrap();
        let g = &common * &parse_poly(&r, "x - z^3").unwrap();
        assert_eq!(poly_gcd(&f, &g), common.monic(MonomialOrder::DegRevLex));
        let h = parse_poly(&r, "y*z").unwrap();
        assert!(poly_gcd(&f, &h).is_one());
    }

    #[test]
    fn gcd_over_prime_field() {
        let r = ring(FieldDesc::PrimeField(2), &["x"]);
        let f = parse_poly(&r, "x^4 + x^2 + 1").unwrap();
        let g = f.derivative(0);
        // x^4 + x^2 + 1 = (x^2 + x + 1)^2 over F_2, and the derivative vanishes.
        assert!(g.is_zero());
        assert_eq!(poly_gcd(&f, &g), f);
    }

    #[test]
    fn gcd_with_zero() {
        let r = ring(FieldDesc::Rationals, &["x"]);
        let z = Polynomial::zero(&r);
        assert!(poly_gcd(&z, &z).is_zero());
        let f = parse_poly(&r, "3*x").unwrap();
        assert_eq!(poly_gcd(&f, &z), parse_poly(&r, "x").unwrap());
    }
}
