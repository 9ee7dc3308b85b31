//! Multivariate polynomials over the coefficient tower.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::AlgebraError;
use crate::field::{FieldDesc, FieldElement};

/// A polynomial ring `field[vars]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ring {
    field: FieldDesc,
    vars: Vec<String>,
}

pub(crate) fn valid_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    }
}

impl Ring {
    pub fn new(field: FieldDesc, vars: Vec<String>) -> Result<Arc<Ring>, AlgebraError> {
        for (i, v) in vars.iter().enumerate() {
            if !valid_identifier(v) {
                return Err(AlgebraError::InvalidRing(format!("invalid variable name {v:?}")));
            }
            if vars[..i].contains(v) {
                return Err(AlgebraError::InvalidRing(format!("duplicate variable {v}")));
            }
            if field.params().contains(v) {
                return Err(AlgebraError::InvalidRing(format!(
                    "variable {v} clashes with a field parameter"
                )));
            }
        }
        Ok(Arc::new(Ring { field, vars }))
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// A variable name not used by this ring or its field, derived from `stem`.
    pub fn fresh_name(&self, stem: &str) -> String {
        let taken = |n: &str| self.vars.iter().any(|v| v == n) || self.field.params().iter().any(|v| v == n);
        if !taken(stem) {
            return stem.to_string();
        }
        (0..)
            .map(|i| format!("{stem}{i}"))
            .find(|n| !taken(n))
            .expect("unbounded search")
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.field, self.vars.join(","))
    }
}

/// Exponent vector; its length equals the ring's variable count.
///
/// The `Ord` instance is degree-reverse-lexicographic, which is the storage
/// order of every [`Polynomial`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize, e: u32) -> Self {
        let mut v = vec![0; n];
        v[i] = e;
        Monomial(v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, o: &Self) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    /// `o / self`, assuming `self` divides `o`.
    pub fn quotient_of(&self, o: &Self) -> Self {
        Monomial(o.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, o: &Self) -> Self {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn gcd(&self, o: &Self) -> Self {
        Monomial(self.0.iter().zip(&o.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn is_coprime(&self, o: &Self) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Variables with nonzero exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    da.cmp(&db).then_with(|| {
        for i in (0..a.len()).rev() {
            if a[i] != b[i] {
                return b[i].cmp(&a[i]);
            }
        }
        Ordering::Equal
    })
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        grevlex(&self.0, &other.0)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Monomial orders. Variable 0 is the largest variable in every order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    Lex,
    DegRevLex,
    /// Block order eliminating variables `0..split`: both blocks compared by
    /// DegRevLex, the front block first.
    BlockElim { split: usize },
}

impl MonomialOrder {
    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::DegRevLex => grevlex(&a.0, &b.0),
            MonomialOrder::BlockElim { split } => {
                grevlex(&a.0[..split], &b.0[..split]).then_with(|| grevlex(&a.0[split..], &b.0[split..]))
            }
        }
    }

    pub fn validate(&self, nvars: usize) -> Result<(), AlgebraError> {
        match *self {
            MonomialOrder::BlockElim { split } if split == 0 || split > nvars => Err(AlgebraError::InvalidRing(
                format!("block split {split} outside 1..={nvars}"),
            )),
            _ => Ok(()),
        }
    }
}

/// A polynomial with canonical term map: no zero coefficients, all terms in
/// one ring, iteration in ascending DegRevLex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, FieldElement>,
}

impl Polynomial {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::constant(ring, ring.field().one())
    }

    pub fn constant(ring: &Arc<Ring>, c: FieldElement) -> Self {
        Self::monomial(ring, Monomial::one(ring.nvars()), c)
    }

    pub fn from_int(ring: &Arc<Ring>, n: i64) -> Self {
        Self::constant(ring, ring.field().from_int(n))
    }

    pub fn monomial(ring: &Arc<Ring>, m: Monomial, c: FieldElement) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn var(ring: &Arc<Ring>, i: usize) -> Self {
        Self::monomial(ring, Monomial::var(ring.nvars(), i, 1), ring.field().one())
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(ring: &Arc<Ring>, terms: impl IntoIterator<Item = (Monomial, FieldElement)>) -> Self {
        let mut map: BTreeMap<Monomial, FieldElement> = BTreeMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.0.len(), ring.nvars());
            accumulate(&mut map, m, c);
        }
        Polynomial {
            ring: ring.clone(),
            terms: map,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn constant_term(&self) -> FieldElement {
        self.terms
            .get(&Monomial::one(self.ring.nvars()))
            .cloned()
            .unwrap_or_else(|| self.ring.field().zero())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending DegRevLex order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &FieldElement)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, m: &Monomial) -> FieldElement {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.field().zero())
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &FieldElement)> {
        match order {
            MonomialOrder::DegRevLex => self.terms.iter().next_back(),
            _ => self.terms.iter().max_by(|a, b| order.compare(a.0, b.0)),
        }
    }

    pub fn leading_monomial(&self, order: MonomialOrder) -> Option<&Monomial> {
        self.leading_term(order).map(|(m, _)| m)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    /// Which variables occur.
    pub fn used_vars(&self) -> Vec<usize> {
        let n = self.ring.nvars();
        (0..n).filter(|&i| self.terms.keys().any(|m| m.0[i] > 0)).collect()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Monomial::degree);
        match degs.next() {
            Some(d) => degs.all(|e| e == d),
            None => true,
        }
    }

    /// Coefficients with respect to `var`: entry `i` multiplies `var^i`.
    pub fn coefficients_in(&self, var: usize) -> Vec<Polynomial> {
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![Polynomial::zero(&self.ring); deg + 1];
        if self.is_zero() {
            return out;
        }
        let mut buckets: Vec<Vec<(Monomial, FieldElement)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.0[var] as usize;
            let mut mm = m.clone();
            mm.0[var] = 0;
            buckets[e].push((mm, c.clone()));
        }
        for (slot, b) in out.iter_mut().zip(buckets) {
            *slot = Polynomial {
                ring: self.ring.clone(),
                terms: b.into_iter().collect(),
            };
        }
        out
    }

    /// Reassembles `sum_i coeffs[i] * var^i`.
    pub fn from_coefficients_in(ring: &Arc<Ring>, var: usize, coeffs: &[Polynomial]) -> Self {
        let mut terms = BTreeMap::new();
        for (i, c) in coeffs.iter().enumerate() {
            for (m, v) in &c.terms {
                let mut mm = m.clone();
                mm.0[var] += i as u32;
                accumulate(&mut terms, mm, v.clone());
            }
        }
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.mul(c))).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    /// Scales so the leading coefficient under `order` is one.
    pub fn monic(&self, order: MonomialOrder) -> Self {
        match self.leading_term(order) {
            Some((_, c)) if !c.is_one() => self.scale(&c.inv().expect("nonzero")),
            _ => self.clone(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Polynomial::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Self {
        let field = self.ring.field();
        Polynomial::from_terms(
            &self.ring,
            self.terms.iter().filter(|(m, _)| m.0[var] > 0).map(|(m, c)| {
                let mut mm = m.clone();
                let e = mm.0[var];
                mm.0[var] -= 1;
                (mm, c.mul(&field.from_int(e as i64)))
            }),
        )
    }

    fn check_ring(&self, o: &Self) -> Result<(), AlgebraError> {
        if self.ring != o.ring {
            return Err(AlgebraError::RingMismatch(self.ring.to_string(), o.ring.to_string()));
        }
        Ok(())
    }

    /// Multivariate division with remainder: divisors are tried in list order.
    pub fn divrem(
        &self,
        divisors: &[Polynomial],
        order: MonomialOrder,
    ) -> Result<(Vec<Polynomial>, Polynomial), AlgebraError> {
        for d in divisors {
            self.check_ring(d)?;
            if d.is_zero() {
                return Err(AlgebraError::DivisionByZero);
            }
        }
        let leads: Vec<(Monomial, FieldElement)> = divisors
            .iter()
            .map(|d| {
                let (m, c) = d.leading_term(order).expect("nonzero divisor");
                (m.clone(), c.clone())
            })
            .collect();
        let mut quotients: Vec<Vec<(Monomial, FieldElement)>> = vec![Vec::new(); divisors.len()];
        let mut rem: Vec<(Monomial, FieldElement)> = Vec::new();
        let mut p = self.clone();
        while let Some((lm, lc)) = p.leading_term(order).map(|(m, c)| (m.clone(), c.clone())) {
            let hit = leads.iter().position(|(m, _)| m.divides(&lm));
            match hit {
                Some(i) => {
                    let (dm, dc) = &leads[i];
                    let qm = dm.quotient_of(&lm);
                    let qc = lc.div(dc).expect("nonzero leading coefficient");
                    p = &p - &divisors[i].mul_monomial(&qm).scale(&qc);
                    quotients[i].push((qm, qc));
                }
                None => {
                    p.terms.remove(&lm);
                    rem.push((lm, lc));
                }
            }
        }
        let qs = quotients
            .into_iter()
            .map(|t| Polynomial::from_terms(&self.ring, t))
            .collect();
        Ok((qs, Polynomial::from_terms(&self.ring, rem)))
    }

    /// `self / d` when the division is exact.
    pub fn exact_div(&self, d: &Polynomial) -> Option<Polynomial> {
        if d.is_zero() {
            return None;
        }
        let (mut q, r) = self.divrem(std::slice::from_ref(d), MonomialOrder::DegRevLex).ok()?;
        r.is_zero().then(|| q.pop().expect("one quotient"))
    }

    /// Evaluation homomorphism: replaces variable `i` by `images[i]`, all in
    /// `target`, whose coefficient field must equal this ring's.
    pub fn substitute(&self, target: &Arc<Ring>, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.ring.nvars(), "one image per variable");
        assert_eq!(self.ring.field(), target.field(), "substitution keeps the field");
        let mut acc = Polynomial::zero(target);
        let mut powers: Vec<Vec<Polynomial>> = vec![vec![Polynomial::one(target)]; images.len()];
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().expect("seeded") * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Renames variables: variable `i` becomes variable `index_map[i]` of `target`.
    pub fn map_vars(&self, target: &Arc<Ring>, index_map: &[usize]) -> Polynomial {
        assert_eq!(self.ring.field(), target.field(), "renaming keeps the field");
        let n = target.nvars();
        Polynomial::from_terms(
            target,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0u32; n];
                for (i, &x) in m.0.iter().enumerate() {
                    if x > 0 {
                        e[index_map[i]] += x;
                    }
                }
                (Monomial(e), c.clone())
            }),
        )
    }

    /// Re-expresses a polynomial over the same field in a ring whose variable
    /// names include all names used here.
    pub fn embed_by_name(&self, target: &Arc<Ring>) -> Result<Polynomial, AlgebraError> {
        let mut map = Vec::with_capacity(self.ring.nvars());
        for (i, v) in self.ring.vars().iter().enumerate() {
            match target.var_index(v) {
                Some(j) => map.push(j),
                None if self.degree_in(i).unwrap_or(0) == 0 => map.push(usize::MAX),
                None => {
                    return Err(AlgebraError::RingMismatch(self.ring.to_string(), target.to_string()));
                }
            }
        }
        if self.ring.field() != target.field() {
            return Err(AlgebraError::RingMismatch(self.ring.to_string(), target.to_string()));
        }
        let n = target.nvars();
        Ok(Polynomial::from_terms(
            target,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0u32; n];
                for (i, &x) in m.0.iter().enumerate() {
                    if x > 0 {
                        e[map[i]] += x;
                    }
                }
                (Monomial(e), c.clone())
            }),
        ))
    }

    fn combine(&self, o: &Self, negate: bool) -> Self {
        assert!(self.ring == o.ring, "ring mismatch: {} vs {}", self.ring, o.ring);
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            let c = if negate { c.neg() } else { c.clone() };
            accumulate(&mut terms, m.clone(), c);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms,
        }
    }

    fn product(&self, o: &Self) -> Self {
        assert!(self.ring == o.ring, "ring mismatch: {} vs {}", self.ring, o.ring);
        let mut terms = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                accumulate(&mut terms, a.mul(b), x.mul(y));
            }
        }
        Polynomial {
            ring: self.ring.clone(),
            terms,
        }
    }
}

fn accumulate(map: &mut BTreeMap<Monomial, FieldElement>, m: Monomial, c: FieldElement) {
    if c.is_zero() {
        return;
    }
    match map.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get().add(&c);
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        self.combine(o, false)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        self.combine(o, true)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        self.product(o)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }
}

/// Polynomial operation selector for [`poly_arith`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyOp {
    Add(Polynomial),
    Sub(Polynomial),
    Mul(Polynomial),
    Pow(u32),
}

/// Checked polynomial arithmetic.
pub fn poly_arith(f: &Polynomial, op: &PolyOp) -> Result<Polynomial, AlgebraError> {
    match op {
        PolyOp::Add(g) => f.check_ring(g).map(|_| f + g),
        PolyOp::Sub(g) => f.check_ring(g).map(|_| f - g),
        PolyOp::Mul(g) => f.check_ring(g).map(|_| f * g),
        PolyOp::Pow(e) => Ok(f.pow(*e)),
    }
}

fn fmt_monomial(ring: &Ring, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(ring.vars[i].clone()),
            _ => parts.push(format!("{}^{}", ring.vars[i], e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            let abs = if neg { c.neg() } else { c.clone() };
            let body = if m.is_one() {
                abs.to_string()
            } else if abs.is_one() {
                fmt_monomial(&self.ring, m)
            } else {
                format!("{}*{}", abs, fmt_monomial(&self.ring, m))
            };
            match (k, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn qring(vars: &[&str]) -> Arc<Ring> {
        Ring::new(FieldDesc::Rationals, vars.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn p(r: &Arc<Ring>, s: &str) -> Polynomial {
        parse_poly(r, s).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let r = qring(&["x"]);
        assert_eq!(&p(&r, "x - 1") * &p(&r, "x + 1"), p(&r, "x^2 - 1"));
    }

    #[test]
    fn cancellation_leaves_canonical_terms() {
        let r = qring(&["t", "x"]);
        let f = &p(&r, "x^3 - t") + &p(&r, "t");
        assert_eq!(f, p(&r, "x^3"));
        assert_eq!(f.num_terms(), 1);
        let z = &f - &f;
        assert!(z.is_zero());
        assert_eq!(z.to_string(), "0");
    }

    #[test]
    fn powers_multiply() {
        let r = qring(&["t"]);
        assert_eq!(&p(&r, "t^2") * &p(&r, "t^3"), p(&r, "t^5"));
        assert_eq!(poly_arith(&p(&r, "t + 1"), &PolyOp::Pow(3)).unwrap(), p(&r, "t^3 + 3*t^2 + 3*t + 1"));
        assert_eq!(p(&r, "t + 1").pow(0), Polynomial::one(&r));
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let r = qring(&["t"]);
        let s = qring(&["x"]);
        assert!(matches!(
            poly_arith(&p(&r, "t"), &PolyOp::Add(p(&s, "x"))),
            Err(AlgebraError::RingMismatch(_, _))
        ));
    }

    #[test]
    fn divide_by_single_variable() {
        let r = qring(&["x"]);
        let (q, rem) = p(&r, "x^2").divrem(&[p(&r, "x")], MonomialOrder::Lex).unwrap();
        assert_eq!(q, vec![p(&r, "x")]);
        assert!(rem.is_zero());
    }

    #[test]
    fn divide_by_two_polynomials_lex() {
        // hand long division: x^2*y + 1 = x*(x*y - 1) + (x + 1), and no term of
        // x + 1 is divisible by x*y or y.
        let r = qring(&["x", "y"]);
        let f = p(&r, "x^2*y + 1");
        let ds = [p(&r, "x*y - 1"), p(&r, "y")];
        let (q, rem) = f.divrem(&ds, MonomialOrder::Lex).unwrap();
        assert_eq!(rem, p(&r, "x + 1"));
        let rebuilt = &(&(&q[0] * &ds[0]) + &(&q[1] * &ds[1])) + &rem;
        assert_eq!(rebuilt, f);
    }

    #[test]
    fn divide_by_nothing() {
        let r = qring(&["x"]);
        let f = p(&r, "x^2 + 3");
        let (q, rem) = f.divrem(&[], MonomialOrder::DegRevLex).unwrap();
        assert!(q.is_empty());
        assert_eq!(rem, f);
    }

    #[test]
    fn orders_agree_on_variables() {
        let r = qring(&["x", "y", "z"]);
        let x = p(&r, "x");
        let y2 = p(&r, "y^2");
        let xm = x.leading_monomial(MonomialOrder::Lex).unwrap().clone();
        let ym = y2.leading_monomial(MonomialOrder::Lex).unwrap().clone();
        assert_eq!(MonomialOrder::Lex.compare(&xm, &ym), Ordering::Greater);
        assert_eq!(MonomialOrder::DegRevLex.compare(&xm, &ym), Ordering::Less);
        assert_eq!(MonomialOrder::BlockElim { split: 1 }.compare(&xm, &ym), Ordering::Greater);
        // grevlex: x*z < y^2
        let xz = Monomial::new(vec![1, 0, 1]);
        assert_eq!(MonomialOrder::DegRevLex.compare(&xz, &ym), Ordering::Less);
    }

    #[test]
    fn printing_is_descending_grevlex() {
        let r = qring(&["x", "t"]);
        assert_eq!(p(&r, "1/2 - 2*t + x^3").to_string(), "x^3 - 2*t + 1/2");
        assert_eq!(p(&r, "-x*t - x").to_string(), "-x*t - x");
    }

    #[test]
    fn substitution_is_a_homomorphism() {
        let src = qring(&["a", "b"]);
        let dst = qring(&["t"]);
        let images = [p(&dst, "t^2"), p(&dst, "t^3")];
        assert!(p(&src, "b^2 - a^3").substitute(&dst, &images).is_zero());
        assert_eq!(p(&src, "a*b + 1").substitute(&dst, &images), p(&dst, "t^5 + 1"));
    }

    #[test]
    fn coefficient_views_round_trip() {
        let r = qring(&["x", "y"]);
        let f = p(&r, "x^2*y + 3*x*y^2 - y + 7");
        let cs = f.coefficients_in(0);
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[1], p(&r, "3*y^2"));
        assert_eq!(Polynomial::from_coefficients_in(&r, 0, &cs), f);
    }

    #[test]
    fn exact_division() {
        let r = qring(&["x", "y"]);
        let f = p(&r, "x^2 - y^2");
        assert_eq!(f.exact_div(&p(&r, "x - y")), Some(p(&r, "x + y")));
        assert_eq!(f.exact_div(&p(&r, "x")), None);
    }
}
