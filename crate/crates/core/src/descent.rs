//! The descent complex `Z(Y) -> Z(X) -> Z(X x_Y X)` of a morphism, evaluated
//! on a finite scope of points of `Y`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num::bigint::BigInt;
use num::integer::Integer;
use num::{One, Signed, Zero};

use crate::cycles::{naive_pullback, Cycle};
use crate::error::DescentError;
use crate::intlat::{is_saturated, kernel, quotient_invariants, solve_integer, IntMatrix};
use crate::scheme::{fiber_product, image_point, Property, Scheme, SchemeMorphism, SchemePoint};

/// `X x_Y X` with both projections.
pub struct FiberSquare {
    pub scheme: Arc<Scheme>,
    pub pr1: SchemeMorphism,
    pub pr2: SchemeMorphism,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Map {
    F,
    Pr1,
    Pr2,
}

/// Memoized pullbacks, keyed by map and point.
type PullbackMemo = HashMap<(Map, (String, String)), Cycle>;

pub struct DescentProblem {
    f: SchemeMorphism,
    scope: Vec<SchemePoint>,
    square: OnceLock<FiberSquare>,
    pullbacks: Mutex<PullbackMemo>,
}

impl fmt::Debug for DescentProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DescentProblem({}, {} scope points)", self.f.name(), self.scope.len())
    }
}

impl DescentProblem {
    pub fn new(f: SchemeMorphism, scope: Vec<SchemePoint>) -> Result<Self, DescentError> {
        for y in &scope {
            if y.scheme().name() != f.target().name() {
                return Err(crate::error::SchemeError::SchemeMismatch {
                    expected: f.target().name().to_string(),
                    found: y.scheme().name().to_string(),
                }
                .into());
            }
        }
        Ok(DescentProblem {
            f,
            scope,
            square: OnceLock::new(),
            pullbacks: Mutex::new(HashMap::new()),
        })
    }

    pub fn morphism(&self) -> &SchemeMorphism {
        &self.f
    }

    pub fn scope(&self) -> &[SchemePoint] {
        &self.scope
    }

    /// The fiber square, computed once.
    pub fn square(&self) -> Result<&FiberSquare, DescentError> {
        if let Some(s) = self.square.get() {
            return Ok(s);
        }
        let (scheme, pr1, pr2) = fiber_product(&self.f, &self.f)?;
        Ok(self.square.get_or_init(|| FiberSquare { scheme, pr1, pr2 }))
    }

    fn pull_point(&self, which: Map, p: &SchemePoint) -> Result<Cycle, DescentError> {
        let key = (which, p.key());
        if let Some(c) = self.pullbacks.lock().unwrap().get(&key) {
            return Ok(c.clone());
        }
        let m = match which {
            Map::F => &self.f,
            Map::Pr1 => &self.square()?.pr1,
            Map::Pr2 => &self.square()?.pr2,
        };
        let c = naive_pullback(m, &Cycle::point(p))?;
        self.pullbacks.lock().unwrap().insert(key, c.clone());
        Ok(c)
    }

    fn pull(&self, which: Map, c: &Cycle) -> Result<Cycle, DescentError> {
        let target = match which {
            Map::F => self.f.source().clone(),
            _ => self.square()?.scheme.clone(),
        };
        let mut out = Cycle::zero(&target);
        for (p, k) in c.terms() {
            out = out.add(&self.pull_point(which, p)?.scale(k))?;
        }
        Ok(out)
    }

    /// `f^{*,naive}(c)` for a cycle on `Y`, memoized per point.
    pub fn pullback(&self, c: &Cycle) -> Result<Cycle, DescentError> {
        self.pull(Map::F, c)
    }

    pub fn pr1_pullback(&self, c: &Cycle) -> Result<Cycle, DescentError> {
        self.pull(Map::Pr1, c)
    }

    pub fn pr2_pullback(&self, c: &Cycle) -> Result<Cycle, DescentError> {
        self.pull(Map::Pr2, c)
    }

    /// `(pr1^* - pr2^*)(c)`; zero exactly for cycles with descent datum.
    pub fn descent_defect(&self, c: &Cycle) -> Result<Cycle, DescentError> {
        Ok(self.pr1_pullback(c)?.sub(&self.pr2_pullback(c)?)?)
    }

    /// Components of `f^{-1}(closure(y))` with multiplicities, each flagged
    /// by whether it lies over `y`.
    pub fn fiber(&self, y: &SchemePoint) -> Result<Vec<(SchemePoint, BigInt, bool)>, DescentError> {
        let pulled = self.pull_point(Map::F, y)?;
        let mut out = Vec::new();
        for (x, k) in pulled.terms() {
            let over = image_point(&self.f, x)? == *y;
            out.push((x.clone(), k.clone(), over));
        }
        Ok(out)
    }

    /// Whether some point of `X` maps to `y`.
    pub fn is_surjective_at(&self, y: &SchemePoint) -> Result<bool, DescentError> {
        Ok(self.fiber(y)?.iter().any(|(_, _, over)| *over))
    }

    /// gcd of the multiplicities of all components of `f^{-1}(closure(y))`.
    pub fn g_y(&self, y: &SchemePoint) -> Result<BigInt, DescentError> {
        let fib = self.fiber(y)?;
        if fib.is_empty() {
            return Err(DescentError::EmptyFiber(y.to_string()));
        }
        Ok(fib.iter().fold(BigInt::zero(), |g, (_, k, _)| g.gcd(k)))
    }

    /// gcd over the components lying over `y` only.
    pub fn g_res(&self, y: &SchemePoint) -> Result<BigInt, DescentError> {
        let g = self
            .fiber(y)?
            .iter()
            .filter(|(_, _, over)| *over)
            .fold(BigInt::zero(), |g, (_, k, _)| g.gcd(k));
        if g.is_zero() {
            return Err(DescentError::EmptyFiber(y.to_string()));
        }
        Ok(g)
    }

    /// lcm of `g_y` over the scope.
    pub fn g_scope(&self) -> Result<SupernaturalTrunc, DescentError> {
        if self.scope.is_empty() {
            return Err(DescentError::EmptyScope);
        }
        let mut acc = SupernaturalTrunc::one(self.scope.len());
        for y in &self.scope {
            acc = acc.lcm(&SupernaturalTrunc::of(&self.g_y(y)?, self.scope.len()));
        }
        Ok(acc)
    }

    /// Product of `g_res` over the scope.
    pub fn pi_res_scope(&self) -> Result<SupernaturalTrunc, DescentError> {
        if self.scope.is_empty() {
            return Err(DescentError::EmptyScope);
        }
        let mut acc = SupernaturalTrunc::one(self.scope.len());
        for y in &self.scope {
            acc = acc.mul(&SupernaturalTrunc::of(&self.g_res(y)?, self.scope.len()));
        }
        Ok(acc)
    }

    /// Smallest `m >= 1` with `m*c` in the image of `f^{*,naive}`, and a
    /// `Y`-cycle mapping onto it. Candidates on `Y` are the images of the
    /// points of `c`, plus the scope unless `f` is asserted generalizing.
    pub fn effective_order(&self, c: &Cycle) -> Result<Option<(BigInt, Cycle)>, DescentError> {
        if c.is_zero() {
            return Err(DescentError::ZeroCycle);
        }
        let mut candidates = Basis::default();
        for x in c.points() {
            candidates.insert(&image_point(&self.f, &x)?);
        }
        if !self.f.asserts(Property::Generalizing) && !self.f.asserts(Property::UniversallyGeneralizing) {
            for y in &self.scope {
                candidates.insert(y);
            }
        }
        let mut basis = Basis::default();
        for x in c.points() {
            basis.insert(&x);
        }
        let images: Vec<Cycle> = candidates
            .points
            .iter()
            .map(|y| self.pull_point(Map::F, y))
            .collect::<Result<_, _>>()?;
        for img in &images {
            for x in img.points() {
                basis.insert(&x);
            }
        }
        let a = IntMatrix::from_columns(basis.len(), &images.iter().map(|img| basis.coords(img)).collect::<Vec<_>>());
        let target = basis.coords(c);
        let exponent = quotient_invariants(basis.len(), &a)
            .into_iter()
            .filter(|d| !d.is_zero())
            .fold(BigInt::one(), |acc, d| acc * d);
        for m in divisors(&exponent) {
            let rhs: Vec<BigInt> = target.iter().map(|t| t * &m).collect();
            if let Some(w) = solve_integer(&a, &rhs) {
                let witness = Cycle::from_terms(
                    self.f.target(),
                    candidates.points.iter().cloned().zip(w),
                )?;
                if self.pullback(&witness)? != c.scale(&m) {
                    return Err(DescentError::Violation(format!(
                        "witness {witness} does not pull back to {m}*({c})"
                    )));
                }
                return Ok(Some((m, witness)));
            }
        }
        Ok(None)
    }

    /// Invariant factors of `H_{y,f}`: cycles on the generic points of the
    /// fiber over `y` with descent datum, modulo `Z f^*(y)`. Factors equal
    /// to 1 are omitted and a free summand shows up as `0`. Each factor is
    /// checked to divide `g_y`.
    pub fn h_local(&self, y: &SchemePoint) -> Result<Vec<BigInt>, DescentError> {
        if !self.f.asserts(Property::UniversallyGeneralizing) {
            return Err(DescentError::NotUniversallyGeneralizing(self.f.name().to_string()));
        }
        let fib = self.fiber(y)?;
        let mut basis = Basis::default();
        for (x, _, over) in &fib {
            if *over {
                basis.insert(x);
            }
        }
        if basis.is_empty() {
            return Ok(Vec::new());
        }
        let defects: Vec<Cycle> = basis
            .points
            .iter()
            .map(|x| self.descent_defect(&Cycle::point(x)))
            .collect::<Result<_, _>>()?;
        let mut rows = Basis::default();
        for d in &defects {
            for p in d.points() {
                rows.insert(&p);
            }
        }
        let cols: Vec<Vec<BigInt>> = defects.iter().map(|d| rows.coords(d)).collect();
        let k = kernel(&IntMatrix::from_columns(rows.len(), &cols));
        let fy = basis.coords(&self.pull_point(Map::F, y)?);
        let coeffs = solve_integer(&k, &fy).ok_or_else(|| {
            DescentError::Violation(format!("f^*({y}) has nonzero descent defect"))
        })?;
        let rel = IntMatrix::from_columns(k.cols(), &[coeffs]);
        let factors: Vec<BigInt> = quotient_invariants(k.cols(), &rel)
            .into_iter()
            .filter(|d| !d.is_one())
            .collect();
        let g = self.g_y(y)?;
        for d in &factors {
            if d.is_zero() || !(&g % d).is_zero() {
                return Err(DescentError::Violation(format!(
                    "invariant factor {d} of H at {y} does not divide g_y = {g}"
                )));
            }
        }
        Ok(factors)
    }

    /// The scope span: every point occurring in some `f^*(y)`, `y` in scope.
    pub fn scope_span(&self) -> Result<Vec<SchemePoint>, DescentError> {
        let mut basis = Basis::default();
        for y in &self.scope {
            for x in self.pull_point(Map::F, y)?.points() {
                basis.insert(&x);
            }
        }
        Ok(basis.points)
    }

    /// Invariant factors of the scope span modulo the effective descent
    /// cycles `f^*(y)`, `y` in scope.
    pub fn eff_desc_quotient(&self) -> Result<Vec<BigInt>, DescentError> {
        let (basis, a) = self.eff_desc_matrix()?;
        Ok(quotient_invariants(basis.len(), &a))
    }

    fn eff_desc_matrix(&self) -> Result<(Basis, IntMatrix), DescentError> {
        if self.scope.is_empty() {
            return Err(DescentError::EmptyScope);
        }
        let mut basis = Basis::default();
        for x in self.scope_span()? {
            basis.insert(&x);
        }
        let cols: Vec<Vec<BigInt>> = self
            .scope
            .iter()
            .map(|y| Ok(basis.coords(&self.pull_point(Map::F, y)?)))
            .collect::<Result<_, DescentError>>()?;
        let a = IntMatrix::from_columns(basis.len(), &cols);
        Ok((basis, a))
    }

    /// Saturation of the descent and effective-descent subgroups on the
    /// scope span, checked against `g` and `g_res`.
    pub fn check_saturation(&self) -> Result<SaturationReport, DescentError> {
        let (basis, a) = self.eff_desc_matrix()?;
        let mut points = Vec::new();
        let mut surjective = true;
        let mut complex = true;
        for y in &self.scope {
            let over = self.is_surjective_at(y)?;
            surjective &= over;
            let g_y = self.g_y(y)?;
            let g_res = if over { Some(self.g_res(y)?) } else { None };
            let h_local = if self.f.asserts(Property::UniversallyGeneralizing) {
                Some(self.h_local(y)?)
            } else {
                None
            };
            let defect_zero = self.descent_defect(&self.pull_point(Map::F, y)?)?.is_zero();
            complex &= defect_zero;
            points.push(PointStanza {
                point: y.clone(),
                g_y,
                g_res,
                h_local,
                complex_at_point: defect_zero,
            });
        }
        let defects: Vec<Cycle> = basis
            .points
            .iter()
            .map(|x| self.descent_defect(&Cycle::point(x)))
            .collect::<Result<_, _>>()?;
        let mut rows = Basis::default();
        for d in &defects {
            for p in d.points() {
                rows.insert(&p);
            }
        }
        let dmat = IntMatrix::from_columns(rows.len(), &defects.iter().map(|d| rows.coords(d)).collect::<Vec<_>>());
        let desc_saturated = is_saturated(basis.len(), &kernel(&dmat));
        let eff_invariants = quotient_invariants(basis.len(), &a);
        let eff_saturated = is_saturated(basis.len(), &a);
        let g = self.g_scope()?;
        let g_res_trivial = points.iter().all(|p| p.g_res.as_ref().is_some_and(|g| g.is_one()));
        let mut violations = Vec::new();
        if !desc_saturated {
            violations.push("descent subgroup is not saturated".to_string());
        }
        if surjective && complex {
            if eff_saturated && !g.is_one() {
                violations.push(format!("effective descent subgroup saturated but g = {}", g.value()));
            }
            if g_res_trivial && !eff_saturated {
                violations.push("g_res = 1 on scope but effective descent subgroup not saturated".into());
            }
        }
        Ok(SaturationReport {
            points,
            span_rank: basis.len(),
            surjective,
            complex,
            desc_saturated,
            eff_saturated,
            eff_invariants,
            g_scope: g,
            pi_res_scope: if surjective { Some(self.pi_res_scope()?) } else { None },
            violations,
        })
    }
}

pub struct PointStanza {
    pub point: SchemePoint,
    pub g_y: BigInt,
    /// `None` when no point of `X` lies over this one.
    pub g_res: Option<BigInt>,
    /// `None` unless `f` is asserted universally generalizing.
    pub h_local: Option<Vec<BigInt>>,
    pub complex_at_point: bool,
}

pub struct SaturationReport {
    pub points: Vec<PointStanza>,
    pub span_rank: usize,
    pub surjective: bool,
    pub complex: bool,
    pub desc_saturated: bool,
    pub eff_saturated: bool,
    pub eff_invariants: Vec<BigInt>,
    pub g_scope: SupernaturalTrunc,
    pub pi_res_scope: Option<SupernaturalTrunc>,
    pub violations: Vec<String>,
}

/// A finite product of prime powers standing in for a supernatural number,
/// computed over a finite scope of points only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupernaturalTrunc {
    pub factorization: BTreeMap<BigInt, u32>,
    pub scope_size: usize,
}

impl SupernaturalTrunc {
    pub fn one(scope_size: usize) -> Self {
        SupernaturalTrunc {
            factorization: BTreeMap::new(),
            scope_size,
        }
    }

    /// Factors a positive integer by trial division.
    pub fn of(n: &BigInt, scope_size: usize) -> Self {
        assert!(n.is_positive(), "supernatural truncations are built from positive integers");
        let mut out = Self::one(scope_size);
        let mut n = n.clone();
        let mut p = BigInt::from(2);
        while &p * &p <= n {
            while (&n % &p).is_zero() {
                *out.factorization.entry(p.clone()).or_insert(0) += 1;
                n /= &p;
            }
            p += 1;
        }
        if !n.is_one() {
            *out.factorization.entry(n).or_insert(0) += 1;
        }
        out
    }

    pub fn lcm(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (p, e) in &o.factorization {
            let slot = out.factorization.entry(p.clone()).or_insert(0);
            *slot = (*slot).max(*e);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (p, e) in &o.factorization {
            *out.factorization.entry(p.clone()).or_insert(0) += e;
        }
        out
    }

    pub fn value(&self) -> BigInt {
        self.factorization
            .iter()
            .fold(BigInt::one(), |acc, (p, e)| acc * num::pow(p.clone(), *e as usize))
    }

    pub fn is_one(&self) -> bool {
        self.factorization.is_empty()
    }

    pub fn is_divisible_by(&self, n: &BigInt) -> bool {
        !n.is_zero() && (self.value() % n).is_zero()
    }

    /// `2^2*3`, or `1`.
    pub fn factored(&self) -> String {
        if self.factorization.is_empty() {
            return "1".into();
        }
        self.factorization
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Display for SupernaturalTrunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.scope_size == 1 { "" } else { "s" };
        let (value, factored) = (self.value().to_string(), self.factored());
        if value != factored {
            write!(f, "{value} = ")?;
        }
        write!(f, "{factored} (truncated to {} scope point{s})", self.scope_size)
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let q = &n / &d;
            if q != d {
                large.push(q);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// An ordered point basis for coordinate vectors.
#[derive(Default)]
struct Basis {
    points: Vec<SchemePoint>,
    index: HashMap<(String, String), usize>,
}

impl Basis {
    fn insert(&mut self, p: &SchemePoint) {
        let key = p.key();
        if !self.index.contains_key(&key) {
            self.index.insert(key, self.points.len());
            self.points.push(p.clone());
        }
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn coords(&self, c: &Cycle) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.len()];
        for (p, k) in c.terms() {
            let i = self.index[&p.key()];
            v[i] = k.clone();
        }
        v
    }
}
