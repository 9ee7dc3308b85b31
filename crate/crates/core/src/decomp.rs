//! Minimal primes of an ideal and the length of the local ring at each.

use std::fmt;
use std::sync::Arc;

use crate::error::AlgebraError;
use crate::factor::factor_poly;
use crate::field::FieldDesc;
use crate::groebner::{count_standard_monomials, Ideal};
use crate::poly::{Monomial, MonomialOrder, Polynomial, Ring};

/// How primality of a [`PrimeIdeal`] was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Certificate {
    /// Zero ideal, or a principal ideal with an irreducible generator, possibly
    /// after eliminating variables that occur linearly.
    FactorSplitLeaf,
    /// Triangular Lex basis over the function field of an independent set,
    /// with an irreducible last element and a saturated ideal.
    TriangularIrreducible,
    /// Zero-dimensional radical ideal whose quotient is `k[z]/(q)` for an
    /// irreducible `q`, through a separating linear form.
    PrimitiveElement,
    /// Preimage of a prime under a ring map.
    Contraction,
    UserAsserted,
}

impl Certificate {
    pub fn label(&self) -> &'static str {
        match self {
            Certificate::FactorSplitLeaf => "factor-split",
            Certificate::TriangularIrreducible => "triangular",
            Certificate::PrimitiveElement => "primitive-element",
            Certificate::Contraction => "contraction",
            Certificate::UserAsserted => "asserted",
        }
    }
}

/// A proper prime ideal with a primality certificate. Equality is ideal
/// equality.
#[derive(Clone)]
pub struct PrimeIdeal {
    inner: Ideal,
    certificate: Certificate,
}

impl PrimeIdeal {
    /// A prime the caller vouches for; only properness is checked.
    pub fn asserted(ideal: Ideal) -> Result<Self, AlgebraError> {
        if ideal.is_unit() {
            return Err(AlgebraError::NotPrime(ideal.key()));
        }
        Ok(PrimeIdeal {
            inner: ideal,
            certificate: Certificate::UserAsserted,
        })
    }

    /// Certifies `ideal` as prime by decomposing it.
    pub fn certify(ideal: Ideal) -> Result<Self, AlgebraError> {
        let mins = minimal_primes(&ideal)?;
        match mins.as_slice() {
            [p] if p.inner == ideal => Ok(p.clone()),
            _ => Err(AlgebraError::NotPrime(ideal.key())),
        }
    }

    pub(crate) fn from_contraction(ideal: Ideal) -> Self {
        PrimeIdeal {
            inner: ideal,
            certificate: Certificate::Contraction,
        }
    }

    pub fn ideal(&self) -> &Ideal {
        &self.inner
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.inner.ring()
    }

    pub fn certificate(&self) -> Certificate {
        self.certificate
    }

    pub fn is_asserted(&self) -> bool {
        self.certificate == Certificate::UserAsserted
    }

    /// Stable identity: the reduced DegRevLex basis, e.g. `(t, x)`.
    pub fn key(&self) -> String {
        self.inner.key()
    }

    /// Krull dimension of `R / p`.
    pub fn dimension(&self) -> i64 {
        self.inner.dimension().0
    }
}

impl PartialEq for PrimeIdeal {
    fn eq(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

impl Eq for PrimeIdeal {}

impl fmt::Debug for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key())?;
        if self.is_asserted() {
            write!(f, " asserted")?;
        }
        Ok(())
    }
}

/// A minimal prime together with the length of the local ring there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentData {
    pub prime: PrimeIdeal,
    pub multiplicity: u64,
}

/// Minimal primes over `ideal`, sorted by printed form. Empty for the unit
/// ideal.
pub fn minimal_primes(ideal: &Ideal) -> Result<Vec<PrimeIdeal>, AlgebraError> {
    let mut leaves = Vec::new();
    split(ideal, &mut leaves)?;
    let mut keyed: Vec<(String, PrimeIdeal)> = leaves.into_iter().map(|p| (p.key(), p)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    let primes: Vec<PrimeIdeal> = keyed.into_iter().map(|(_, p)| p).collect();
    let minimal = primes
        .iter()
        .filter(|p| {
            !primes
                .iter()
                .any(|q| q.key() != p.key() && p.inner.contains_ideal(&q.inner))
        })
        .cloned()
        .collect();
    Ok(minimal)
}

fn split(ideal: &Ideal, out: &mut Vec<PrimeIdeal>) -> Result<(), AlgebraError> {
    if ideal.is_unit() {
        return Ok(());
    }
    let ring = ideal.ring().clone();
    let basis = ideal.gb();
    if basis.is_empty() {
        out.push(PrimeIdeal {
            inner: Ideal::zero(&ring),
            certificate: Certificate::FactorSplitLeaf,
        });
        return Ok(());
    }

    if ring.nvars() >= 2 {
        if let Some((v, g)) = linear_generator(&basis) {
            return split_linear(ideal, v, &g, out);
        }
    }

    for g in basis.iter() {
        let fac = match factor_poly(g) {
            Ok(f) => f,
            Err(AlgebraError::UnsupportedShape(_)) => continue,
            Err(e) => return Err(e),
        };
        if fac.factors.len() > 1 || fac.factors.iter().any(|(_, e)| *e > 1) {
            for (q, _) in &fac.factors {
                split(&ideal.with_generators([q.clone()]), out)?;
            }
            return Ok(());
        }
    }

    if basis.len() == 1 && is_irreducible_generator(&basis[0])? {
        out.push(PrimeIdeal {
            inner: Ideal::new(&ring, basis.to_vec())?,
            certificate: Certificate::FactorSplitLeaf,
        });
        return Ok(());
    }

    match triangular_check(ideal)? {
        Leaf::Prime => {
            out.push(PrimeIdeal {
                inner: Ideal::new(&ring, basis.to_vec())?,
                certificate: Certificate::TriangularIrreducible,
            });
            Ok(())
        }
        Leaf::Split(parts) => {
            for p in parts {
                split(&p, out)?;
            }
            Ok(())
        }
        Leaf::Undecided => match primitive_element_split(ideal)? {
            Some(primes) => {
                out.extend(primes);
                Ok(())
            }
            None => Err(AlgebraError::UndecidedPrimality(ideal.key())),
        },
    }
}

/// Univariate factors of `g` without multiplicity, or `None` when the shape
/// is not supported.
fn distinct_factors(g: &Polynomial) -> Result<Option<Vec<Polynomial>>, AlgebraError> {
    match factor_poly(g) {
        Ok(f) => Ok(Some(f.factors.into_iter().map(|(q, _)| q).collect())),
        Err(AlgebraError::UnsupportedShape(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Minimal polynomial of `u` modulo a zero-dimensional `ideal`, as a
/// polynomial in a one-variable ring.
fn min_poly(ideal: &Ideal, u: &Polynomial) -> Result<Polynomial, AlgebraError> {
    let ring = ideal.ring();
    let n = ring.nvars();
    let mut vars = ring.vars().to_vec();
    vars.push(ring.fresh_name("z"));
    let big = Ring::new(ring.field().clone(), vars)?;
    let ident: Vec<usize> = (0..n).collect();
    let mut gens: Vec<Polynomial> = ideal.generators().iter().map(|g| g.map_vars(&big, &ident)).collect();
    gens.push(&Polynomial::var(&big, n) - &u.map_vars(&big, &ident));
    let drop: Vec<usize> = (0..n).collect();
    let elim = Ideal::new(&big, gens)?.eliminate(&drop);
    Ok(elim.gb()[0].clone())
}

/// Splits a zero-dimensional ideal over `Q` or `F_p` into maximal ideals,
/// using a linear form that separates the points of its radical.
fn primitive_element_split(ideal: &Ideal) -> Result<Option<Vec<PrimeIdeal>>, AlgebraError> {
    let ring = ideal.ring();
    let n = ring.nvars();
    let field = ring.field();
    if ideal.dimension().0 != 0 || matches!(field, FieldDesc::RationalFunctions(_)) {
        return Ok(None);
    }
    let mut radical_gens = Vec::new();
    for i in 0..n {
        let m = min_poly(ideal, &Polynomial::var(ring, i))?;
        let Some(qs) = distinct_factors(&m)? else {
            return Ok(None);
        };
        let sqfree = qs.iter().fold(Polynomial::one(m.ring()), |acc, q| &acc * q);
        radical_gens.push(sqfree.substitute(ring, &[Polynomial::var(ring, i)]));
    }
    let radical = ideal.with_generators(radical_gens);
    let Some(points) = radical.vector_space_dim() else {
        return Ok(None);
    };
    let p = field.characteristic();
    let tries = if p == 0 { points * points * n as u64 + 2 } else { p.min(points * points * n as u64 + 2) };
    for c in 0..tries {
        let weight = field.from_int(c as i64);
        let mut u = Polynomial::zero(ring);
        let mut w = field.from_int(1);
        for i in (0..n).rev() {
            u = &u + &Polynomial::var(ring, i).scale(&w);
            w = w.mul(&weight);
        }
        let m = min_poly(&radical, &u)?;
        let Some(qs) = distinct_factors(&m)? else {
            return Ok(None);
        };
        let degree: u64 = qs.iter().map(|q| u64::from(q.total_degree().unwrap_or(0))).sum();
        if degree != points {
            continue;
        }
        return qs
            .iter()
            .map(|q| {
                Ok(PrimeIdeal {
                    inner: radical.with_generators([q.substitute(ring, &[u.clone()])]),
                    certificate: Certificate::PrimitiveElement,
                })
            })
            .collect::<Result<Vec<_>, AlgebraError>>()
            .map(Some);
    }
    Ok(None)
}

fn is_irreducible_generator(g: &Polynomial) -> Result<bool, AlgebraError> {
    match factor_poly(g) {
        Ok(f) => Ok(f.factors.len() == 1 && f.factors[0].1 == 1),
        Err(AlgebraError::UnsupportedShape(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

/// A basis element `c*v + h` with `c` constant and `h` free of `v`.
fn linear_generator(basis: &[Polynomial]) -> Option<(usize, Polynomial)> {
    for g in basis {
        for v in g.used_vars() {
            if g.degree_in(v) == Some(1) && g.coefficients_in(v)[1].is_constant() {
                return Some((v, g.clone()));
            }
        }
    }
    None
}

/// Eliminates `v` through `g = c*v + h`, decomposes in the smaller ring and
/// lifts the primes back.
fn split_linear(ideal: &Ideal, v: usize, g: &Polynomial, out: &mut Vec<PrimeIdeal>) -> Result<(), AlgebraError> {
    let ring = ideal.ring();
    let co = g.coefficients_in(v);
    let c = co[1].constant_term();
    let image = co[0].scale(&c.inv()?.neg());
    let vars: Vec<String> = ring.vars().iter().enumerate().filter(|(i, _)| *i != v).map(|(_, s)| s.clone()).collect();
    let small = Ring::new(ring.field().clone(), vars)?;
    let image_small = image.embed_by_name(&small)?;
    let images: Vec<Polynomial> = (0..ring.nvars())
        .map(|i| {
            if i == v {
                image_small.clone()
            } else {
                Polynomial::var(&small, small.var_index(&ring.vars()[i]).expect("kept variable"))
            }
        })
        .collect();
    let reduced = Ideal::new(&small, ideal.gb().iter().map(|h| h.substitute(&small, &images)).collect())?;
    let relation = g.monic(MonomialOrder::DegRevLex);
    for p in minimal_primes(&reduced)? {
        let mut gens = vec![relation.clone()];
        for h in p.inner.generators() {
            gens.push(h.embed_by_name(ring)?);
        }
        out.push(PrimeIdeal {
            inner: Ideal::new(ring, gens)?,
            certificate: p.certificate,
        });
    }
    Ok(())
}

enum Leaf {
    Prime,
    Split(Vec<Ideal>),
    Undecided,
}

/// Returns `(permuted ring, permuted ideal, back map)` with the variables of
/// `front` first, then the rest, each in original order.
fn permute_front(ideal: &Ideal, front: &[usize]) -> Result<(Arc<Ring>, Ideal, Vec<usize>), AlgebraError> {
    let ring = ideal.ring();
    let n = ring.nvars();
    let order: Vec<usize> = front
        .iter()
        .copied()
        .chain((0..n).filter(|i| !front.contains(i)))
        .collect();
    let perm_ring = Ring::new(ring.field().clone(), order.iter().map(|&i| ring.vars()[i].clone()).collect())?;
    let mut to_perm = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        to_perm[i] = pos;
    }
    let permuted = Ideal::new(
        &perm_ring,
        ideal.generators().iter().map(|g| g.map_vars(&perm_ring, &to_perm)).collect(),
    )?;
    Ok((perm_ring, permuted, order))
}

/// Leaf test over `k(u)` for a maximal independent set `u`: the Lex basis
/// (non-independent variables first) must be triangular with linear leading
/// terms except the last, which must be irreducible; then the ideal is prime
/// exactly when it is saturated by the leading coefficients.
fn triangular_check(ideal: &Ideal) -> Result<Leaf, AlgebraError> {
    let ring = ideal.ring();
    let n = ring.nvars();
    let (_, indep) = ideal.dimension();
    let rest: Vec<usize> = (0..n).filter(|i| !indep.contains(i)).collect();
    let r = rest.len();
    if r == 0 {
        return Ok(Leaf::Undecided);
    }
    let (perm_ring, permuted, order) = permute_front(ideal, &rest)?;
    let basis = permuted.groebner_basis(MonomialOrder::Lex)?;
    let rest_lead = |g: &Polynomial| -> Vec<u32> {
        g.leading_monomial(MonomialOrder::Lex).expect("nonzero").exponents()[..r].to_vec()
    };
    let divides = |a: &[u32], b: &[u32]| a.iter().zip(b).all(|(x, y)| x <= y);
    let leads: Vec<Vec<u32>> = basis.iter().map(rest_lead).collect();
    let mut chosen: Vec<usize> = Vec::new();
    for (i, l) in leads.iter().enumerate() {
        let redundant = leads
            .iter()
            .enumerate()
            .any(|(k, m)| k != i && divides(m, l) && (m != l || k < i));
        if !redundant {
            chosen.push(i);
        }
    }
    let mut last: Option<usize> = None;
    for &i in &chosen {
        let l = &leads[i];
        let support: Vec<usize> = (0..r).filter(|&k| l[k] > 0).collect();
        match support.as_slice() {
            [k] if *k == r - 1 => last = Some(i),
            [k] if l[*k] == 1 => {}
            _ => return Ok(Leaf::Undecided),
        }
    }
    if chosen.len() != r {
        return Ok(Leaf::Undecided);
    }
    let Some(last) = last else {
        return Ok(Leaf::Undecided);
    };

    let mut back = vec![0; n];
    for (pos, &i) in order.iter().enumerate() {
        back[pos] = i;
    }
    let q = basis[last].map_vars(ring, &back);
    let x_last = rest[r - 1];
    match factor_poly(&q) {
        Ok(fac) => {
            let involving: Vec<&(Polynomial, u32)> =
                fac.factors.iter().filter(|(f, _)| f.degree_in(x_last).unwrap_or(0) > 0).collect();
            if involving.len() > 1 || involving.iter().any(|(_, e)| *e > 1) {
                return Ok(Leaf::Split(
                    involving.iter().map(|(f, _)| ideal.with_generators([f.clone()])).collect(),
                ));
            }
        }
        Err(AlgebraError::UnsupportedShape(_)) => return Ok(Leaf::Undecided),
        Err(e) => return Err(e),
    }

    let mut s = Polynomial::one(&perm_ring);
    for &i in &chosen {
        let g = &basis[i];
        let lead = &leads[i];
        let lc = Polynomial::from_terms(
            &perm_ring,
            g.terms()
                .filter(|(m, _)| m.exponents()[..r] == lead[..])
                .map(|(m, c)| {
                    let mut e = m.exponents().to_vec();
                    e[..r].iter_mut().for_each(|x| *x = 0);
                    (Monomial::new(e), c.clone())
                }),
        );
        s = &s * &lc;
    }
    let s = s.map_vars(ring, &back);
    if s.is_constant() {
        return Ok(Leaf::Prime);
    }
    let sat = ideal.saturate(&Ideal::new(ring, vec![s.clone()])?)?;
    if sat == *ideal {
        return Ok(Leaf::Prime);
    }
    Ok(Leaf::Split(vec![sat, ideal.with_generators([s])]))
}

/// `dim_{k(u)} k(u)[rest] / I`, read off a block-order basis with the
/// non-`u` variables first.
fn extended_vector_space_dim(ideal: &Ideal, u: &[usize]) -> Result<Option<u64>, AlgebraError> {
    let n = ideal.ring().nvars();
    let rest: Vec<usize> = (0..n).filter(|i| !u.contains(i)).collect();
    let r = rest.len();
    if r == 0 {
        return Ok(Some(if ideal.is_unit() { 0 } else { 1 }));
    }
    let (_, permuted, _) = permute_front(ideal, &rest)?;
    let basis = permuted.groebner_basis(MonomialOrder::BlockElim { split: r })?;
    let leads: Vec<Monomial> = basis
        .iter()
        .map(|g| {
            Monomial::new(g.leading_monomial(MonomialOrder::BlockElim { split: r }).expect("nonzero").exponents()[..r].to_vec())
        })
        .collect();
    Ok(count_standard_monomials(&leads, r))
}

/// Length of `(R/I)_p` for a minimal prime `p` of `I`.
pub fn multiplicity(ideal: &Ideal, p: &PrimeIdeal) -> Result<u64, AlgebraError> {
    let mins = minimal_primes(ideal)?;
    if !mins.contains(p) {
        return Err(AlgebraError::NotMinimal {
            prime: p.key(),
            ideal: ideal.key(),
        });
    }
    multiplicity_among(ideal, p, &mins)
}

fn multiplicity_among(ideal: &Ideal, p: &PrimeIdeal, mins: &[PrimeIdeal]) -> Result<u64, AlgebraError> {
    let ring = ideal.ring();
    let mut h = Polynomial::one(ring);
    for q in mins.iter().filter(|q| *q != p) {
        let g = q
            .inner
            .gb()
            .iter()
            .find(|g| !p.inner.contains(g).expect("same ring"))
            .cloned()
            .expect("incomparable minimal primes");
        h = &h * &g;
    }
    let primary = if h.is_constant() {
        ideal.clone()
    } else {
        ideal.saturate(&Ideal::new(ring, vec![h])?)?
    };
    let (_, u) = p.inner.dimension();
    let whole = extended_vector_space_dim(&primary, &u)?;
    let residue = extended_vector_space_dim(&p.inner, &u)?;
    match (whole, residue) {
        (Some(a), Some(b)) if b > 0 && a % b == 0 && a > 0 => Ok(a / b),
        (a, b) => Err(AlgebraError::NonExactDivision(format!(
            "{a:?} / {b:?} at {} over {}",
            p.key(),
            ideal.key()
        ))),
    }
}

/// Minimal primes with their multiplicities.
pub fn components(ideal: &Ideal) -> Result<Vec<ComponentData>, AlgebraError> {
    let mins = minimal_primes(ideal)?;
    mins.iter()
        .map(|p| {
            Ok(ComponentData {
                prime: p.clone(),
                multiplicity: multiplicity_among(ideal, p, &mins)?,
            })
        })
        .collect()
}

/// Codimension of the closure of `p` in `Spec(R/I)`.
pub fn point_codim(ideal: &Ideal, p: &PrimeIdeal) -> Result<u64, AlgebraError> {
    if !p.inner.contains_ideal(ideal) {
        return Err(AlgebraError::NotContaining {
            prime: p.key(),
            ideal: ideal.key(),
        });
    }
    let dp = p.dimension();
    let best = minimal_primes(ideal)?
        .iter()
        .filter(|q| p.inner.contains_ideal(&q.inner))
        .map(|q| q.dimension() - dp)
        .max()
        .expect("some minimal prime lies under p");
    Ok(best as u64)
}
