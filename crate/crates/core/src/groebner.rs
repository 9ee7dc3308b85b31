//! Reduced Groebner bases (Buchberger, normal selection strategy, both
//! Buchberger criteria) and the ideal operations built on them.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::AlgebraError;
use crate::field::FieldElement;
use crate::poly::{Monomial, MonomialOrder, Polynomial, Ring};

/// Terms sorted descending under a fixed order.
#[derive(Debug, Clone)]
struct OPoly {
    terms: Vec<(Monomial, FieldElement)>,
}

impl OPoly {
    fn from_poly(p: &Polynomial, order: MonomialOrder) -> Self {
        let mut terms: Vec<(Monomial, FieldElement)> = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        if order != MonomialOrder::DegRevLex {
            terms.sort_by(|a, b| order.compare(&b.0, &a.0));
        }
        OPoly { terms }
    }

    fn to_poly(&self, ring: &Arc<Ring>) -> Polynomial {
        Polynomial::from_terms(ring, self.terms.iter().cloned())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    fn lc(&self) -> &FieldElement {
        &self.terms[0].1
    }

    fn monic(mut self) -> Self {
        if let Some((_, c)) = self.terms.first() {
            if !c.is_one() {
                let inv = c.inv().expect("nonzero leading coefficient");
                for t in &mut self.terms {
                    t.1 = t.1.mul(&inv);
                }
            }
        }
        self
    }

    /// `self - c * m * g`.
    fn sub_mul(&self, c: &FieldElement, m: &Monomial, g: &OPoly, order: MonomialOrder) -> OPoly {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = g.terms.iter().map(|(gm, gc)| (gm.mul(m), gc.mul(c))).peekable();
        loop {
            let ord = match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (Some(x), Some(y)) => order.compare(&x.0, &y.0),
            };
            match ord {
                Ordering::Greater => out.push(a.next().expect("peeked").clone()),
                Ordering::Less => {
                    let (bm, bc) = b.next().expect("peeked");
                    out.push((bm, bc.neg()));
                }
                Ordering::Equal => {
                    let (am, ac) = a.next().expect("peeked");
                    let (_, bc) = b.next().expect("peeked");
                    let s = ac.sub(&bc);
                    if !s.is_zero() {
                        out.push((am.clone(), s));
                    }
                }
            }
        }
        OPoly { terms: out }
    }
}

/// Full reduction of `f` modulo `basis`.
fn normal_form(f: &OPoly, basis: &[OPoly], order: MonomialOrder) -> OPoly {
    let mut p = f.clone();
    let mut rem: Vec<(Monomial, FieldElement)> = Vec::new();
    while !p.is_zero() {
        let lm = p.lm().clone();
        match basis.iter().find(|g| g.lm().divides(&lm)) {
            Some(g) => {
                let q = g.lm().quotient_of(&lm);
                let c = p.lc().div(g.lc()).expect("nonzero leading coefficient");
                p = p.sub_mul(&c, &q, g, order);
            }
            None => {
                rem.push(p.terms.remove(0));
            }
        }
    }
    OPoly { terms: rem }
}

fn s_poly(f: &OPoly, g: &OPoly, order: MonomialOrder) -> OPoly {
    let l = f.lm().lcm(g.lm());
    let mf = f.lm().quotient_of(&l);
    let mg = g.lm().quotient_of(&l);
    let zero = OPoly { terms: Vec::new() };
    let a = zero.sub_mul(&f.lc().inv().expect("nonzero").neg(), &mf, f, order);
    a.sub_mul(&g.lc().inv().expect("nonzero"), &mg, g, order)
}

fn buchberger(gens: Vec<OPoly>, order: MonomialOrder) -> Vec<OPoly> {
    let mut basis: Vec<OPoly> = Vec::new();
    for g in gens.into_iter().filter(|g| !g.is_zero()) {
        let g = g.monic();
        if g.lm().is_one() {
            return vec![g];
        }
        basis.push(g);
    }
    let mut pending: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pending.push((i, j));
        }
    }
    let mut pending_set: HashSet<(usize, usize)> = pending.iter().copied().collect();
    while !pending.is_empty() {
        // normal selection: smallest lcm, ties broken by pair index
        let (idx, _) = pending
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let la = basis[a.0].lm().lcm(basis[a.1].lm());
                let lb = basis[b.0].lm().lcm(basis[b.1].lm());
                order.compare(&la, &lb).then_with(|| (a.1, a.0).cmp(&(b.1, b.0)))
            })
            .expect("nonempty");
        let (i, j) = pending.swap_remove(idx);
        pending_set.remove(&(i, j));
        let (li, lj) = (basis[i].lm(), basis[j].lm());
        if li.is_coprime(lj) {
            continue;
        }
        let l = li.lcm(lj);
        let chain = (0..basis.len()).any(|k| {
            k != i
                && k != j
                && basis[k].lm().divides(&l)
                && !pending_set.contains(&(i.min(k), i.max(k)))
                && !pending_set.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let h = normal_form(&s_poly(&basis[i], &basis[j], order), &basis, order);
        if h.is_zero() {
            continue;
        }
        let h = h.monic();
        if h.lm().is_one() {
            return vec![h];
        }
        let n = basis.len();
        basis.push(h);
        for k in 0..n {
            pending.push((k, n));
            pending_set.insert((k, n));
        }
    }
    reduce_basis(basis, order)
}

fn reduce_basis(basis: Vec<OPoly>, order: MonomialOrder) -> Vec<OPoly> {
    let mut minimal: Vec<OPoly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(k, h)| {
            k != i && h.lm().divides(g.lm()) && (h.lm() != g.lm() || k < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<OPoly> = minimal
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, g)| g.clone())
            .collect();
        let head = OPoly {
            terms: vec![minimal[i].terms[0].clone()],
        };
        let tail = OPoly {
            terms: minimal[i].terms[1..].to_vec(),
        };
        let mut r = normal_form(&tail, &others, order);
        r.terms.insert(0, head.terms[0].clone());
        reduced.push(r.monic());
    }
    reduced.sort_by(|a, b| order.compare(a.lm(), b.lm()));
    reduced
}

/// Whether every S-polynomial of `basis` reduces to zero.
pub fn is_groebner(basis: &[Polynomial], order: MonomialOrder) -> bool {
    let ob: Vec<OPoly> = basis.iter().map(|p| OPoly::from_poly(p, order)).collect();
    for j in 0..ob.len() {
        for i in 0..j {
            if !normal_form(&s_poly(&ob[i], &ob[j], order), &ob, order).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Whether `basis` is a reduced Groebner basis: monic, pairwise non-dividing
/// leading monomials, and no term divisible by another leading monomial.
pub fn is_reduced(basis: &[Polynomial], order: MonomialOrder) -> bool {
    let leads: Vec<&Monomial> = basis.iter().filter_map(|g| g.leading_monomial(order)).collect();
    basis.iter().enumerate().all(|(i, g)| {
        let Some((_, c)) = g.leading_term(order) else {
            return false;
        };
        c.is_one()
            && g.terms().all(|(m, _)| {
                leads
                    .iter()
                    .enumerate()
                    .all(|(k, l)| k == i || !l.divides(m))
            })
    }) && is_groebner(basis, order)
}

fn display_key(p: &Polynomial) -> (u32, std::cmp::Reverse<Monomial>) {
    let m = p.leading_monomial(MonomialOrder::DegRevLex).expect("nonzero").clone();
    (m.degree(), std::cmp::Reverse(m))
}

type BasisCell = Arc<OnceLock<Arc<Vec<Polynomial>>>>;

struct IdealInner {
    ring: Arc<Ring>,
    generators: Vec<Polynomial>,
    bases: Mutex<HashMap<MonomialOrder, BasisCell>>,
    eliminations: Mutex<HashMap<Vec<usize>, Arc<OnceLock<Ideal>>>>,
}

/// An ideal given by generators, with cached reduced Groebner bases per
/// monomial order. Cloning is cheap and shares the caches.
#[derive(Clone)]
pub struct Ideal(Arc<IdealInner>);

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Ideal {
    pub fn new(ring: &Arc<Ring>, generators: Vec<Polynomial>) -> Result<Self, AlgebraError> {
        for g in &generators {
            if g.ring() != ring {
                return Err(AlgebraError::RingMismatch(ring.to_string(), g.ring().to_string()));
            }
        }
        Ok(Self::from_checked(ring, generators))
    }

    fn from_checked(ring: &Arc<Ring>, generators: Vec<Polynomial>) -> Self {
        Ideal(Arc::new(IdealInner {
            ring: ring.clone(),
            generators: generators.into_iter().filter(|g| !g.is_zero()).collect(),
            bases: Mutex::new(HashMap::new()),
            eliminations: Mutex::new(HashMap::new()),
        }))
    }

    pub fn zero(ring: &Arc<Ring>) -> Self {
        Self::from_checked(ring, Vec::new())
    }

    pub fn unit(ring: &Arc<Ring>) -> Self {
        Self::from_checked(ring, vec![Polynomial::one(ring)])
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.0.ring
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.0.generators
    }

    /// Reduced Groebner basis, sorted by leading monomial ascending. Computed
    /// at most once per order, even under concurrent callers.
    pub fn groebner_basis(&self, order: MonomialOrder) -> Result<Arc<Vec<Polynomial>>, AlgebraError> {
        order.validate(self.ring().nvars())?;
        let cell = {
            let mut map = self.0.bases.lock().expect("cache lock");
            map.entry(order).or_default().clone()
        };
        Ok(cell
            .get_or_init(|| {
                let gens = self.0.generators.iter().map(|g| OPoly::from_poly(g, order)).collect();
                let basis = buchberger(gens, order);
                Arc::new(basis.iter().map(|g| g.to_poly(self.ring())).collect())
            })
            .clone())
    }

    /// The DegRevLex basis.
    pub fn gb(&self) -> Arc<Vec<Polynomial>> {
        self.groebner_basis(MonomialOrder::DegRevLex).expect("DegRevLex is always valid")
    }

    pub fn is_unit(&self) -> bool {
        self.gb().first().is_some_and(|g| g.is_constant())
    }

    pub fn is_zero(&self) -> bool {
        self.0.generators.is_empty()
    }

    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial, AlgebraError> {
        if f.ring() != self.ring() {
            return Err(AlgebraError::RingMismatch(self.ring().to_string(), f.ring().to_string()));
        }
        let order = MonomialOrder::DegRevLex;
        let basis: Vec<OPoly> = self.gb().iter().map(|g| OPoly::from_poly(g, order)).collect();
        Ok(normal_form(&OPoly::from_poly(f, order), &basis, order).to_poly(self.ring()))
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool, AlgebraError> {
        Ok(self.normal_form(f)?.is_zero())
    }

    /// `other ⊆ self`.
    pub fn contains_ideal(&self, other: &Ideal) -> bool {
        other
            .generators()
            .iter()
            .all(|g| self.contains(g).expect("same ring"))
    }

    pub fn sum(&self, other: &Ideal) -> Ideal {
        assert_eq!(self.ring(), other.ring(), "ideal sum across rings");
        let mut gens = self.0.generators.clone();
        gens.extend(other.0.generators.iter().cloned());
        Self::from_checked(self.ring(), gens)
    }

    pub fn with_generators(&self, extra: impl IntoIterator<Item = Polynomial>) -> Ideal {
        let mut gens = self.0.generators.clone();
        for g in extra {
            assert_eq!(g.ring(), self.ring(), "generator from another ring");
            gens.push(g);
        }
        Self::from_checked(self.ring(), gens)
    }

    pub fn product(&self, other: &Ideal) -> Ideal {
        let mut gens = Vec::new();
        for a in self.generators() {
            for b in other.generators() {
                gens.push(a * b);
            }
        }
        Self::from_checked(self.ring(), gens)
    }

    /// Ideal with every generator raised to the power `e`.
    pub fn map_generators(&self, f: impl Fn(&Polynomial) -> Polynomial) -> Ideal {
        Self::from_checked(self.ring(), self.generators().iter().map(f).collect())
    }

    /// `I ∩ k[kept vars]`, returned in the ring of the kept variables (in their
    /// original relative order).
    pub fn eliminate(&self, drop_vars: &[usize]) -> Ideal {
        let mut key: Vec<usize> = drop_vars.to_vec();
        key.sort_unstable();
        key.dedup();
        let cell = {
            let mut map = self.0.eliminations.lock().expect("cache lock");
            map.entry(key.clone()).or_default().clone()
        };
        cell.get_or_init(|| self.compute_elimination(&key)).clone()
    }

    fn compute_elimination(&self, drop: &[usize]) -> Ideal {
        let ring = self.ring();
        let n = ring.nvars();
        let kept: Vec<usize> = (0..n).filter(|i| !drop.contains(i)).collect();
        let kept_ring = Ring::new(
            ring.field().clone(),
            kept.iter().map(|&i| ring.vars()[i].clone()).collect(),
        )
        .expect("subset of valid variables");
        if drop.is_empty() {
            return Ideal::from_checked(&kept_ring, self.generators().to_vec());
        }
        let order: Vec<usize> = drop.iter().chain(kept.iter()).copied().collect();
        let perm_ring = Ring::new(ring.field().clone(), order.iter().map(|&i| ring.vars()[i].clone()).collect())
            .expect("permutation of valid variables");
        let mut to_perm = vec![0; n];
        for (pos, &i) in order.iter().enumerate() {
            to_perm[i] = pos;
        }
        let permuted = Ideal::from_checked(
            &perm_ring,
            self.generators().iter().map(|g| g.map_vars(&perm_ring, &to_perm)).collect(),
        );
        let split = drop.len();
        if split == n {
            let unit = permuted.is_unit();
            return if unit {
                Ideal::unit(&kept_ring)
            } else {
                Ideal::zero(&kept_ring)
            };
        }
        let basis = permuted
            .groebner_basis(MonomialOrder::BlockElim { split })
            .expect("split within range");
        let back: Vec<usize> = (0..n).map(|pos| pos.saturating_sub(split)).collect();
        let gens = basis
            .iter()
            .filter(|g| g.terms().all(|(m, _)| m.exponents()[..split].iter().all(|&e| e == 0)))
            .map(|g| g.map_vars(&kept_ring, &back))
            .collect();
        Ideal::from_checked(&kept_ring, gens)
    }

    /// `I ∩ J`, via `t·I + (1 - t)·J` and elimination of `t`.
    pub fn intersect(&self, other: &Ideal) -> Ideal {
        assert_eq!(self.ring(), other.ring(), "intersection across rings");
        if self.is_zero() || other.is_zero() {
            return Ideal::zero(self.ring());
        }
        let ring = self.ring();
        let t = ring.fresh_name("elim_t");
        let mut vars = vec![t];
        vars.extend(ring.vars().iter().cloned());
        let big = Ring::new(ring.field().clone(), vars).expect("fresh variable");
        let shift: Vec<usize> = (1..=ring.nvars()).collect();
        let tv = Polynomial::var(&big, 0);
        let one_minus_t = &Polynomial::one(&big) - &tv;
        let mut gens = Vec::new();
        for g in self.generators() {
            gens.push(&tv * &g.map_vars(&big, &shift));
        }
        for g in other.generators() {
            gens.push(&one_minus_t * &g.map_vars(&big, &shift));
        }
        let elim = Ideal::from_checked(&big, gens).eliminate(&[0]);
        let gens = elim
            .generators()
            .iter()
            .map(|g| g.embed_by_name(ring).expect("same variables"))
            .collect();
        Ideal::from_checked(ring, gens)
    }

    /// `I : J`.
    pub fn quotient(&self, other: &Ideal) -> Ideal {
        assert_eq!(self.ring(), other.ring(), "quotient across rings");
        let mut acc: Option<Ideal> = None;
        for g in other.generators() {
            let part = self.quotient_by(g);
            acc = Some(match acc {
                None => part,
                Some(a) => a.intersect(&part),
            });
        }
        acc.unwrap_or_else(|| Ideal::unit(self.ring()))
    }

    fn quotient_by(&self, g: &Polynomial) -> Ideal {
        let principal = Ideal::from_checked(self.ring(), vec![g.clone()]);
        let inter = self.intersect(&principal);
        let gens = inter
            .generators()
            .iter()
            .map(|h| h.exact_div(g).expect("elements of I ∩ (g) are divisible by g"))
            .collect();
        Ideal::from_checked(self.ring(), gens)
    }

    /// `I : J^∞`, iterating quotients until they stabilize.
    pub fn saturate(&self, other: &Ideal) -> Result<Ideal, AlgebraError> {
        const MAX_ROUNDS: usize = 64;
        let mut cur = self.clone();
        for _ in 0..MAX_ROUNDS {
            let next = cur.quotient(other);
            if next == cur {
                return Ok(Ideal::from_checked(self.ring(), next.gb().to_vec()));
            }
            cur = next;
        }
        Err(AlgebraError::SaturationDiverged(MAX_ROUNDS))
    }

    /// Krull dimension of `ring / I` (−1 for the unit ideal) and one maximal
    /// independent set of variables.
    pub fn dimension(&self) -> (i64, Vec<usize>) {
        let basis = self.gb();
        if basis.first().is_some_and(|g| g.is_constant()) {
            return (-1, Vec::new());
        }
        let n = self.ring().nvars();
        let leads: Vec<Vec<usize>> = basis
            .iter()
            .map(|g| g.leading_monomial(MonomialOrder::DegRevLex).expect("nonzero").support().collect())
            .collect();
        let mut best: Vec<usize> = Vec::new();
        // subsets in increasing bitmask order; the first of maximal size wins
        for mask in 0u64..(1u64 << n) {
            let size = mask.count_ones() as usize;
            if size <= best.len() && !best.is_empty() {
                continue;
            }
            let independent = leads.iter().all(|s| s.iter().any(|&v| mask & (1 << v) == 0));
            if independent && (size > best.len() || best.is_empty()) {
                best = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
            }
        }
        (best.len() as i64, best)
    }

    /// `dim_k(ring / I)` as the number of standard monomials, if finite.
    pub fn vector_space_dim(&self) -> Option<u64> {
        let basis = self.gb();
        let n = self.ring().nvars();
        let leads: Vec<Monomial> = basis
            .iter()
            .map(|g| g.leading_monomial(MonomialOrder::DegRevLex).expect("nonzero").clone())
            .collect();
        count_standard_monomials(&leads, n)
    }

    /// Canonical text: the reduced DegRevLex basis in display order.
    pub fn canonical_generators(&self) -> Vec<Polynomial> {
        let mut gens = self.gb().to_vec();
        gens.sort_by_key(display_key);
        gens
    }

    /// `(g1, g2, ...)` in canonical order; `(0)` for the zero ideal.
    pub fn key(&self) -> String {
        let gens = self.canonical_generators();
        if gens.is_empty() {
            return "(0)".into();
        }
        let parts: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
        format!("({})", parts.join(", "))
    }
}

/// Number of monomials in `n` variables divisible by none of `leads`, or
/// `None` if infinite.
pub fn count_standard_monomials(leads: &[Monomial], n: usize) -> Option<u64> {
    if leads.iter().any(Monomial::is_one) {
        return Some(0);
    }
    let mut bounds = vec![0u32; n];
    for (i, b) in bounds.iter_mut().enumerate() {
        *b = leads
            .iter()
            .filter(|m| m.support().all(|v| v == i))
            .map(|m| m.exponents()[i])
            .min()?;
    }
    let mut exps = vec![0u32; n];
    Some(count_rec(leads, &bounds, &mut exps, 0))
}

fn count_rec(leads: &[Monomial], bounds: &[u32], exps: &mut Vec<u32>, i: usize) -> u64 {
    let divisible = |e: &[u32]| leads.iter().any(|m| m.exponents().iter().zip(e).all(|(a, b)| a <= b));
    if divisible(exps) {
        return 0;
    }
    if i == exps.len() {
        return 1;
    }
    let mut total = 0;
    for e in 0..bounds[i] {
        exps[i] = e;
        let c = count_rec(leads, bounds, exps, i + 1);
        if c == 0 {
            break;
        }
        total += c;
    }
    exps[i] = 0;
    total
}

impl PartialEq for Ideal {
    fn eq(&self, other: &Self) -> bool {
        self.ring() == other.ring() && *self.gb() == *other.gb()
    }
}

impl Eq for Ideal {}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens = self.canonical_generators();
        let parts: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
        write!(f, "ideal({})", parts.join(", "))
    }
}

/// Reduced Groebner basis of `I` under `order`.
pub fn groebner_basis(ideal: &Ideal, order: MonomialOrder) -> Result<Arc<Vec<Polynomial>>, AlgebraError> {
    ideal.groebner_basis(order)
}

/// Ideal membership.
pub fn ideal_member(f: &Polynomial, ideal: &Ideal) -> Result<bool, AlgebraError> {
    ideal.contains(f)
}
