//! Factorization into irreducibles for the polynomial shapes that arise in
//! practice: univariate over Q or F_p, bivariate homogeneous, bivariate
//! quadratic, anything linear in some variable after content and square-free
//! splitting, and the same over rational function fields (by clearing
//! denominators). Other shapes are rejected with `UnsupportedShape`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::bigint::{BigInt, BigUint};
use num::integer::Integer;
use num::{BigRational, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::AlgebraError;
use crate::field::{inv_mod, is_prime, mul_mod, sqrt_mod, FieldDesc, FieldElement, RatFun};
use crate::gcd::{content_in, poly_gcd, primitive_part};
use crate::poly::{Monomial, MonomialOrder, Polynomial, Ring};

/// `f = unit * Π factor^mult`, with monic (DegRevLex) pairwise distinct
/// irreducible factors sorted by degree, then text.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub unit: FieldElement,
    pub factors: Vec<(Polynomial, u32)>,
}

impl Factorization {
    pub fn expand(&self, ring: &Arc<Ring>) -> Polynomial {
        let mut acc = Polynomial::constant(ring, self.unit.clone());
        for (f, e) in &self.factors {
            acc = &acc * &f.pow(*e);
        }
        acc
    }
}

pub fn factor_poly(f: &Polynomial) -> Result<Factorization, AlgebraError> {
    let Some((_, lc)) = f.leading_term(MonomialOrder::DegRevLex) else {
        return Err(AlgebraError::UnsupportedShape("cannot factor the zero polynomial".into()));
    };
    let unit = lc.clone();
    let raw = match f.ring().field() {
        FieldDesc::RationalFunctions(params) => factor_over_function_field(f, params)?,
        _ => {
            let mut out = Vec::new();
            factor_rec(f, 1, &mut out)?;
            out
        }
    };
    let mut merged: BTreeMap<String, (Polynomial, u32)> = BTreeMap::new();
    for (g, e) in raw {
        let g = g.monic(MonomialOrder::DegRevLex);
        merged.entry(g.to_string()).or_insert((g, 0)).1 += e;
    }
    let mut factors: Vec<(Polynomial, u32)> = merged.into_values().collect();
    factors.sort_by_key(|(g, _)| (g.total_degree().unwrap_or(0), g.to_string()));
    Ok(Factorization { unit, factors })
}

/// Whether a nonconstant polynomial is irreducible.
pub fn is_irreducible(f: &Polynomial) -> Result<bool, AlgebraError> {
    if f.is_constant() {
        return Ok(false);
    }
    let fac = factor_poly(f)?;
    Ok(fac.factors.len() == 1 && fac.factors[0].1 == 1)
}

fn factor_rec(g: &Polynomial, e: u32, out: &mut Vec<(Polynomial, u32)>) -> Result<(), AlgebraError> {
    if g.is_constant() {
        return Ok(());
    }
    let ring = g.ring().clone();
    let n = ring.nvars();

    let mut low = vec![u32::MAX; n];
    for (m, _) in g.terms() {
        for (l, &x) in low.iter_mut().zip(m.exponents()) {
            *l = (*l).min(x);
        }
    }
    if low.iter().any(|&x| x > 0) {
        for (v, &k) in low.iter().enumerate() {
            if k > 0 {
                out.push((Polynomial::var(&ring, v), e * k));
            }
        }
        let rest = Polynomial::from_terms(
            &ring,
            g.terms().map(|(m, c)| {
                let ex = m.exponents().iter().zip(&low).map(|(a, b)| a - b).collect();
                (Monomial::new(ex), c.clone())
            }),
        );
        return factor_rec(&rest, e, out);
    }

    let used = g.used_vars();
    for &v in &used {
        let rest: Vec<usize> = used.iter().copied().filter(|&u| u != v).collect();
        let c = content_in(g, v, &rest);
        if !c.is_constant() {
            factor_rec(&c, e, out)?;
            return factor_rec(&g.exact_div(&c).expect("content divides"), e, out);
        }
    }

    let mut all_zero = true;
    for &v in &used {
        let d = g.derivative(v);
        if d.is_zero() {
            continue;
        }
        all_zero = false;
        let h = poly_gcd(g, &d);
        if !h.is_constant() {
            factor_rec(&h, e, out)?;
            return factor_rec(&g.exact_div(&h).expect("gcd divides"), e, out);
        }
    }
    if all_zero {
        let p = ring.field().characteristic() as u32;
        return factor_rec(&pth_root(g, p), e * p, out);
    }

    if used.iter().any(|&v| g.degree_in(v) == Some(1)) {
        out.push((g.clone(), e));
        return Ok(());
    }
    if used.len() == 1 {
        for q in factor_univariate(g, used[0])? {
            out.push((q, e));
        }
        return Ok(());
    }
    if used.len() == 2 && g.is_homogeneous() {
        return factor_homogeneous(g, used[0], used[1], e, out);
    }
    if used.len() == 2 && ring.field().characteristic() != 2 {
        for (v, w) in [(used[0], used[1]), (used[1], used[0])] {
            if g.degree_in(v) == Some(2) {
                return factor_quadratic(g, v, w, e, out);
            }
        }
    }
    Err(AlgebraError::UnsupportedShape(format!("cannot factor {g}")))
}

/// `g^(1/p)` for `g` whose exponents are all multiples of `p`, over F_p.
fn pth_root(g: &Polynomial, p: u32) -> Polynomial {
    Polynomial::from_terms(
        g.ring(),
        g.terms().map(|(m, c)| {
            (Monomial::new(m.exponents().iter().map(|x| x / p).collect()), c.clone())
        }),
    )
}

fn factor_homogeneous(
    g: &Polynomial,
    x: usize,
    y: usize,
    e: u32,
    out: &mut Vec<(Polynomial, u32)>,
) -> Result<(), AlgebraError> {
    let ring = g.ring();
    let images: Vec<Polynomial> = (0..ring.nvars())
        .map(|i| if i == y { Polynomial::one(ring) } else { Polynomial::var(ring, i) })
        .collect();
    let dehom = g.substitute(ring, &images);
    let mut parts = Vec::new();
    factor_rec(&dehom, 1, &mut parts)?;
    for (q, k) in parts {
        let d = q.degree_in(x).unwrap_or(0);
        let rehom = Polynomial::from_terms(
            ring,
            q.terms().map(|(m, c)| {
                let mut ex = m.exponents().to_vec();
                ex[y] = d - ex[x];
                (Monomial::new(ex), c.clone())
            }),
        );
        out.push((rehom, e * k));
    }
    Ok(())
}

/// `g = a v^2 + b v + c` with `a, b, c` in `K[w]`, primitive and square-free:
/// reducible exactly when the discriminant is a square in `K[w]`.
fn factor_quadratic(
    g: &Polynomial,
    v: usize,
    w: usize,
    e: u32,
    out: &mut Vec<(Polynomial, u32)>,
) -> Result<(), AlgebraError> {
    let ring = g.ring();
    let co = g.coefficients_in(v);
    let (c, b, a) = (&co[0], &co[1], &co[2]);
    let disc = &(b * b) - &(&Polynomial::from_int(ring, 4) * &(a * c));
    let Some(s) = poly_sqrt(&disc, w)? else {
        out.push((g.clone(), e));
        return Ok(());
    };
    let two_a_v = &(&Polynomial::from_int(ring, 2) * a) * &Polynomial::var(ring, v);
    for lin in [&(&two_a_v + b) - &s, &(&two_a_v + b) + &s] {
        out.push((primitive_part(&lin, v, &[w]), e));
    }
    Ok(())
}

/// Square root of a polynomial in the single variable `w`, if it is a square.
fn poly_sqrt(d: &Polynomial, w: usize) -> Result<Option<Polynomial>, AlgebraError> {
    let ring = d.ring();
    if d.is_zero() {
        return Ok(Some(d.clone()));
    }
    let deg = d.degree_in(w).unwrap_or(0);
    if deg % 2 == 1 {
        return Ok(None);
    }
    let half = deg / 2;
    let coeff = |p: &Polynomial, i: u32| p.coefficients_in(w).get(i as usize).map(|c| c.constant_term());
    let lead = coeff(d, deg).expect("degree term");
    let Some(root) = field_sqrt(&lead)? else {
        return Ok(None);
    };
    let n = ring.nvars();
    let mut s = Polynomial::monomial(ring, Monomial::var(n, w, half), root.clone());
    let two_root = root.add(&root);
    for k in (0..half).rev() {
        let r = d - &(&s * &s);
        let rk = coeff(&r, half + k).unwrap_or_else(|| ring.field().zero());
        let ck = rk.div(&two_root)?;
        s = &s + &Polynomial::monomial(ring, Monomial::var(n, w, k), ck);
    }
    Ok((&s * &s == *d).then_some(s))
}

fn field_sqrt(c: &FieldElement) -> Result<Option<FieldElement>, AlgebraError> {
    match c {
        FieldElement::Rational(q) => {
            if q.is_negative() {
                return Ok(None);
            }
            let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
            Ok((&n * &n == *q.numer() && &d * &d == *q.denom())
                .then(|| FieldElement::Rational(BigRational::new(n, d))))
        }
        FieldElement::Modular { value, modulus } => Ok(sqrt_mod(*value, *modulus).map(|r| FieldElement::Modular {
            value: r,
            modulus: *modulus,
        })),
        FieldElement::Fraction(_) => Err(AlgebraError::UnsupportedShape("square root in a function field".into())),
    }
}

fn factor_univariate(g: &Polynomial, v: usize) -> Result<Vec<Polynomial>, AlgebraError> {
    let ring = g.ring();
    let n = ring.nvars();
    match ring.field() {
        FieldDesc::PrimeField(p) => {
            let p = *p;
            let mut f: Vec<u64> = vec![0; g.degree_in(v).unwrap_or(0) as usize + 1];
            for (m, c) in g.terms() {
                f[m.exponents()[v] as usize] = c.as_residue().expect("prime field coefficient");
            }
            let f = up_monic(&f, p);
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            Ok(factor_fp(&f, p, &mut rng)
                .into_iter()
                .map(|q| {
                    Polynomial::from_terms(
                        ring,
                        q.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| {
                            (Monomial::var(n, v, i as u32), FieldElement::Modular { value: c, modulus: p })
                        }),
                    )
                })
                .collect())
        }
        FieldDesc::Rationals => {
            let mut f: Vec<BigRational> = vec![BigRational::zero(); g.degree_in(v).unwrap_or(0) as usize + 1];
            for (m, c) in g.terms() {
                f[m.exponents()[v] as usize] = c.as_rational().expect("rational coefficient").clone();
            }
            let den = f.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
            let z: Vec<BigInt> = f.iter().map(|c| (c * BigRational::from(den.clone())).to_integer()).collect();
            Ok(factor_z(&z_primitive(&z))?
                .into_iter()
                .map(|q| {
                    Polynomial::from_terms(
                        ring,
                        q.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| {
                            (Monomial::var(n, v, i as u32), FieldElement::Rational(BigRational::from(c.clone())))
                        }),
                    )
                })
                .collect())
        }
        FieldDesc::RationalFunctions(_) => unreachable!("function fields are lifted first"),
    }
}

/// Factors over `k(params)` by clearing denominators, factoring in
/// `k[vars, params]`, and keeping the factors that involve a variable.
fn factor_over_function_field(
    f: &Polynomial,
    params: &Arc<Ring>,
) -> Result<Vec<(Polynomial, u32)>, AlgebraError> {
    let ring = f.ring();
    let (n, k) = (ring.nvars(), params.nvars());
    let as_frac = |c: &FieldElement| match c {
        FieldElement::Fraction(r) => r.clone(),
        _ => unreachable!("function field coefficient"),
    };
    let mut lcm = Polynomial::one(params);
    for (_, c) in f.terms() {
        let d = as_frac(c).denominator().clone();
        let g = poly_gcd(&lcm, &d);
        lcm = (&lcm * &d).exact_div(&g).expect("gcd divides");
    }
    let mut vars: Vec<String> = ring.vars().to_vec();
    vars.extend(params.vars().iter().cloned());
    let big = Ring::new(params.field().clone(), vars)?;
    let mut terms = Vec::new();
    for (m, c) in f.terms() {
        let r = as_frac(c);
        let scaled = r.numerator() * &lcm.exact_div(r.denominator()).expect("denominator divides lcm");
        for (pm, pc) in scaled.terms() {
            let mut ex = m.exponents().to_vec();
            ex.extend_from_slice(pm.exponents());
            terms.push((Monomial::new(ex), pc.clone()));
        }
    }
    let lifted = Polynomial::from_terms(&big, terms);
    let mut out = Vec::new();
    for (q, e) in factor_poly(&lifted)?.factors {
        if q.used_vars().iter().all(|&i| i >= n) {
            continue;
        }
        let mut by_mono: BTreeMap<Vec<u32>, Vec<(Monomial, FieldElement)>> = BTreeMap::new();
        for (m, c) in q.terms() {
            let ex = m.exponents();
            by_mono
                .entry(ex[..n].to_vec())
                .or_default()
                .push((Monomial::new(ex[n..n + k].to_vec()), c.clone()));
        }
        let back = Polynomial::from_terms(
            ring,
            by_mono.into_iter().map(|(ex, pts)| {
                let num = Polynomial::from_terms(params, pts);
                (Monomial::new(ex), FieldElement::Fraction(RatFun::from_poly(num)))
            }),
        );
        out.push((back, e));
    }
    Ok(out)
}

// ---- dense univariate arithmetic over F_p, coefficients low to high ----

type Up = Vec<u64>;

fn up_trim(mut a: Up) -> Up {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn up_deg(a: &Up) -> usize {
    a.len().saturating_sub(1)
}

fn up_monic(a: &Up, p: u64) -> Up {
    let a = up_trim(a.clone());
    let Some(&lc) = a.last() else { return a };
    let inv = inv_mod(lc, p);
    a.iter().map(|&c| mul_mod(c, inv, p)).collect()
}

fn up_sub(a: &Up, b: &Up, p: u64) -> Up {
    let n = a.len().max(b.len());
    up_trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

fn up_mul(a: &Up, b: &Up, p: u64) -> Up {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    up_trim(out)
}

fn up_divrem(a: &Up, b: &Up, p: u64) -> (Up, Up) {
    let b = up_trim(b.clone());
    let mut r = up_trim(a.clone());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let inv = inv_mod(*b.last().expect("nonzero divisor"), p);
    let mut q = vec![0u64; r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let c = mul_mod(*r.last().expect("nonempty"), inv, p);
        q[shift] = c;
        for (j, &y) in b.iter().enumerate() {
            r[shift + j] = (r[shift + j] + p - mul_mod(c, y, p)) % p;
        }
        r = up_trim(r);
    }
    (up_trim(q), r)
}

fn up_rem(a: &Up, b: &Up, p: u64) -> Up {
    up_divrem(a, b, p).1
}

fn up_gcd(a: &Up, b: &Up, p: u64) -> Up {
    let (mut a, mut b) = (up_trim(a.clone()), up_trim(b.clone()));
    while !b.is_empty() {
        let r = up_rem(&a, &b, p);
        a = b;
        b = r;
    }
    up_monic(&a, p)
}

fn up_powmod(base: &Up, exp: &BigUint, m: &Up, p: u64) -> Up {
    let mut acc: Up = up_rem(&vec![1], m, p);
    let b = up_rem(base, m, p);
    for i in (0..exp.bits()).rev() {
        acc = up_rem(&up_mul(&acc, &acc, p), m, p);
        if exp.bit(i) {
            acc = up_rem(&up_mul(&acc, &b, p), m, p);
        }
    }
    acc
}

/// Monic irreducible factors of a monic square-free `f`, by distinct-degree
/// then equal-degree (Cantor-Zassenhaus) splitting.
fn factor_fp(f: &Up, p: u64, rng: &mut ChaCha8Rng) -> Vec<Up> {
    let mut out = Vec::new();
    let mut g = f.clone();
    let x: Up = vec![0, 1];
    let mut h = up_rem(&x, &g, p);
    let mut d = 1;
    while up_deg(&g) >= 2 * d {
        h = up_powmod(&h, &BigUint::from(p), &g, p);
        let t = up_gcd(&up_sub(&h, &x, p), &g, p);
        if up_deg(&t) > 0 {
            equal_degree(&t, d, p, rng, &mut out);
            g = up_divrem(&g, &t, p).0;
            h = up_rem(&h, &g, p);
        }
        d += 1;
    }
    if up_deg(&g) > 0 {
        out.push(up_monic(&g, p));
    }
    out
}

fn equal_degree(f: &Up, d: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<Up>) {
    let n = up_deg(f);
    if n == d {
        out.push(up_monic(f, p));
        return;
    }
    let exp = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let a = up_trim((0..n).map(|_| rng.random_range(0..p)).collect());
        if up_deg(&a) == 0 {
            continue;
        }
        let b = if p == 2 {
            let mut t = a.clone();
            let mut s = a.clone();
            for _ in 1..d {
                t = up_rem(&up_mul(&t, &t, p), f, p);
                s = up_sub(&s, &up_sub(&vec![], &t, p), p);
            }
            s
        } else {
            up_sub(&up_powmod(&a, &exp, f, p), &vec![1], p)
        };
        let g = up_gcd(&b, f, p);
        if up_deg(&g) > 0 && up_deg(&g) < n {
            let q = up_divrem(f, &g, p).0;
            equal_degree(&g, d, p, rng, out);
            equal_degree(&q, d, p, rng, out);
            return;
        }
    }
}

// ---- univariate factoring over Z, by a large prime and recombination ----

fn z_primitive(a: &[BigInt]) -> Vec<BigInt> {
    let mut v: Vec<BigInt> = a.to_vec();
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    let g = v.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return v;
    }
    let sign = if v.last().expect("nonzero").is_negative() { -g } else { g };
    v.iter().map(|c| c / &sign).collect()
}

/// `a / b` if it is exact over Z.
fn z_exact_div(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut r: Vec<BigInt> = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return None;
    }
    let lb = &b[db];
    let mut q = vec![BigInt::zero(); r.len() - db];
    for i in (0..q.len()).rev() {
        let top = &r[i + db];
        if top.is_zero() {
            continue;
        }
        if !(top % lb).is_zero() {
            return None;
        }
        let c = top / lb;
        for (j, y) in b.iter().enumerate() {
            r[i + j] -= &c * y;
        }
        q[i] = c;
    }
    r.iter().all(|c| c.is_zero()).then_some(q)
}

const MAX_MODULAR_FACTORS: usize = 20;

/// Irreducible factors of a primitive square-free `f` of degree at least 2.
fn factor_z(f: &[BigInt]) -> Result<Vec<Vec<BigInt>>, AlgebraError> {
    let n = f.len() - 1;
    let lc = f[n].abs();
    let norm = f.iter().fold(BigInt::zero(), |acc, c| acc + c * c).sqrt() + 1;
    let bound: BigInt = &lc * (BigInt::one() << n) * norm;
    let start = (bound * 2u32 + 1u32)
        .to_u64()
        .filter(|&b| b < (1u64 << 62))
        .ok_or_else(|| AlgebraError::UnsupportedShape("coefficients too large to factor".into()))?;
    let reduce = |p: u64| -> Up {
        let pb = BigInt::from(p);
        up_trim(f.iter().map(|c| c.mod_floor(&pb).to_u64().expect("reduced")).collect())
    };
    let mut p = start.max(3);
    let fp = loop {
        if is_prime(p) && !(&lc % p).is_zero() {
            let fp = reduce(p);
            let df: Up = up_trim((1..fp.len()).map(|i| mul_mod(fp[i], i as u64 % p, p)).collect());
            if up_deg(&up_gcd(&fp, &df, p)) == 0 {
                break fp;
            }
        }
        p += 1;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut modular = factor_fp(&up_monic(&fp, p), p, &mut rng);
    if modular.len() > MAX_MODULAR_FACTORS {
        return Err(AlgebraError::UnsupportedShape("too many modular factors".into()));
    }
    let lift = |u: &Up| -> Vec<BigInt> {
        let half = p / 2;
        u.iter()
            .map(|&c| if c > half { BigInt::from(c) - BigInt::from(p) } else { BigInt::from(c) })
            .collect()
    };
    let mut rest: Vec<BigInt> = f.to_vec();
    let mut out = Vec::new();
    let mut s = 1;
    'outer: while 2 * s <= modular.len() {
        let lcr = rest.last().expect("nonzero").mod_floor(&BigInt::from(p)).to_u64().expect("reduced");
        for combo in combinations(modular.len(), s) {
            let mut prod: Up = vec![lcr];
            for &i in &combo {
                prod = up_mul(&prod, &modular[i], p);
            }
            let cand = z_primitive(&lift(&prod));
            if let Some(q) = z_exact_div(&rest, &cand) {
                out.push(cand);
                rest = q;
                for &i in combo.iter().rev() {
                    modular.remove(i);
                }
                continue 'outer;
            }
        }
        s += 1;
    }
    if rest.len() > 1 {
        out.push(z_primitive(&rest));
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn ring(field: FieldDesc, vars: &[&str]) -> Arc<Ring> {
        Ring::new(field, vars.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn shown(f: &Factorization) -> Vec<(String, u32)> {
        f.factors.iter().map(|(g, e)| (g.to_string(), *e)).collect()
    }

    fn check(r: &Arc<Ring>, text: &str, expected: &[(&str, u32)]) {
        let f = parse_poly(r, text).unwrap();
        let fac = factor_poly(&f).unwrap();
        assert_eq!(fac.expand(r), f, "{text}");
        let mut want: Vec<(String, u32)> = expected.iter().map(|(s, e)| (s.to_string(), *e)).collect();
        let mut got = shown(&fac);
        want.sort();
        got.sort();
        assert_eq!(got, want, "{text}");
    }

    #[test]
    fn monomials_and_powers() {
        let r = ring(FieldDesc::Rationals, &["t"]);
        check(&r, "t^2", &[("t", 2)]);
        check(&r, "3*t^3 - 3*t", &[("t", 1), ("t - 1", 1), ("t + 1", 1)]);
    }

    #[test]
    fn cyclotomic_over_q() {
        let r = ring(FieldDesc::Rationals, &["x"]);
        check(&r, "x^2 + 1", &[("x^2 + 1", 1)]);
        check(
            &r,
            "x^6 - 1",
            &[("x - 1", 1), ("x + 1", 1), ("x^2 - x + 1", 1), ("x^2 + x + 1", 1)],
        );
        check(&r, "x^4 + 4", &[("x^2 - 2*x + 2", 1), ("x^2 + 2*x + 2", 1)]);
        check(&r, "(2*x - 1)^2*(x^3 - 2)", &[("x - 1/2", 2), ("x^3 - 2", 1)]);
    }

    #[test]
    fn degree_sixteen_norm() {
        // minimal polynomial of zeta + 2 zeta' over Q, zeta and zeta' fifth roots of unity;
        // the squarefree gcd used to blow up on this
        let r = ring(FieldDesc::Rationals, &["z"]);
        let f = parse_poly(
            &r,
            "z^16 + 12*z^15 + 80*z^14 + 390*z^13 + 1545*z^12 + 5106*z^11 + 14182*z^10 + 33120*z^9 \
             + 64585*z^8 + 104880*z^7 + 143712*z^6 + 178284*z^5 + 228545*z^4 + 278610*z^3 \
             + 289080*z^2 + 241758*z + 107811",
        )
        .unwrap();
        let fac = factor_poly(&f).unwrap();
        assert_eq!(fac.factors.len(), 4);
        assert!(fac.factors.iter().all(|(g, e)| *e == 1 && g.total_degree() == Some(4)));
        assert_eq!(fac.expand(&r), f);
    }

    #[test]
    fn prime_field_square() {
        let r = ring(FieldDesc::PrimeField(2), &["x"]);
        check(&r, "x^4 + x^2 + 1", &[("x^2 + x + 1", 2)]);
        let r = ring(FieldDesc::PrimeField(3), &["x"]);
        check(&r, "x^3 - x", &[("x", 1), ("x + 1", 1), ("x + 2", 1)]);
    }

    #[test]
    fn homogeneous_bivariate() {
        let r = ring(FieldDesc::Rationals, &["x", "y"]);
        check(&r, "x^2 - y^2", &[("x - y", 1), ("x + y", 1)]);
        check(&r, "x^3 - y^3", &[("x - y", 1), ("x^2 + x*y + y^2", 1)]);
    }

    #[test]
    fn quadratic_bivariate() {
        let r = ring(FieldDesc::Rationals, &["x", "t"]);
        check(&r, "x^2 - t", &[("x^2 - t", 1)]);
        check(&r, "x^2 - t^2 - 2*t - 1", &[("x - t - 1", 1), ("x + t + 1", 1)]);
    }

    #[test]
    fn content_is_split_off() {
        let r = ring(FieldDesc::Rationals, &["x", "t"]);
        check(&r, "x^2*t - t^3 + x^2 - t^2", &[("t + 1", 1), ("x - t", 1), ("x + t", 1)]);
    }

    #[test]
    fn over_function_field() {
        let k = FieldDesc::rational_functions(FieldDesc::Rationals, vec!["pi".into()]).unwrap();
        let r = ring(k, &["t"]);
        let f = parse_poly(&r, "t^2 - pi^2").unwrap();
        let fac = factor_poly(&f).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(fac.expand(&r), f);
        assert!(is_irreducible(&parse_poly(&r, "t^2 - pi").unwrap()).unwrap());
    }

    #[test]
    fn unsupported_shapes_are_reported() {
        let r = ring(FieldDesc::Rationals, &["x", "y", "z"]);
        let f = parse_poly(&r, "x^2 + y^2 + z^3 + 1").unwrap();
        assert!(matches!(factor_poly(&f), Err(AlgebraError::UnsupportedShape(_))));
    }

    fn all_polys(p: u64, deg: usize) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for _ in 0..=deg {
            out = out
                .into_iter()
                .flat_map(|v| (0..p).map(move |c| [v.clone(), vec![c]].concat()))
                .collect();
        }
        out.into_iter().map(up_trim).collect()
    }

    /// Brute force: a monic polynomial is irreducible iff no monic polynomial
    /// of degree between 1 and deg/2 divides it.
    fn brute_irreducible(f: &Up, p: u64) -> bool {
        let n = up_deg(f);
        all_polys(p, n / 2)
            .iter()
            .filter(|g| (1..=n / 2).contains(&up_deg(g)) && *g.last().unwrap() == 1)
            .all(|g| !up_rem(f, g, p).is_empty())
    }

    #[test]
    fn exhaustive_small_prime_fields() {
        for p in [2u64, 3] {
            let r = ring(FieldDesc::PrimeField(p), &["x"]);
            for coeffs in all_polys(p, 4) {
                if up_deg(&coeffs) == 0 {
                    continue;
                }
                let f = Polynomial::from_terms(
                    &r,
                    coeffs.iter().enumerate().map(|(i, &c)| {
                        (Monomial::var(1, 0, i as u32), FieldElement::Modular { value: c, modulus: p })
                    }),
                );
                let fac = factor_poly(&f).unwrap();
                assert_eq!(fac.expand(&r), f);
                for (g, _) in &fac.factors {
                    let mut u = vec![0u64; g.degree_in(0).unwrap() as usize + 1];
                    for (m, c) in g.terms() {
                        u[m.exponents()[0] as usize] = c.as_residue().unwrap();
                    }
                    assert!(brute_irreducible(&u, p), "{g} over F_{p}");
                }
            }
        }
    }
}
