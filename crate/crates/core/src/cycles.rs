//! Cycles: finite integer combinations of scheme points, with `cycl`, naive
//! pull-back, push-forward along closed immersions and codimension grading.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::{Signed, Zero};

use crate::decomp::{components, point_codim, PrimeIdeal};
use crate::error::{AlgebraError, SchemeError};
use crate::groebner::Ideal;
use crate::parse::parse_poly;
use crate::scheme::{
    closure_of_point, image_point, preimage_subscheme, ClosedSubscheme, Property, Scheme, SchemeMorphism, SchemePoint,
};

/// A cycle on one scheme. Zero coefficients are never stored; terms are
/// ordered by (piece name, printed prime).
#[derive(Clone)]
pub struct Cycle {
    scheme: Arc<Scheme>,
    terms: BTreeMap<(String, String), (SchemePoint, BigInt)>,
}

impl Cycle {
    pub fn zero(scheme: &Arc<Scheme>) -> Self {
        Cycle {
            scheme: scheme.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn point(x: &SchemePoint) -> Self {
        let mut c = Cycle::zero(x.scheme());
        c.add_term(x, BigInt::from(1));
        c
    }

    pub fn from_terms(
        scheme: &Arc<Scheme>,
        terms: impl IntoIterator<Item = (SchemePoint, BigInt)>,
    ) -> Result<Self, SchemeError> {
        let mut c = Cycle::zero(scheme);
        for (x, k) in terms {
            if x.scheme().name() != scheme.name() {
                return Err(SchemeError::SchemeMismatch {
                    expected: scheme.name().to_string(),
                    found: x.scheme().name().to_string(),
                });
            }
            c.add_term(&x, k);
        }
        Ok(c)
    }

    fn add_term(&mut self, x: &SchemePoint, k: BigInt) {
        if k.is_zero() {
            return;
        }
        let entry = self.terms.entry(x.key()).or_insert_with(|| (x.clone(), BigInt::zero()));
        entry.1 += k;
        if entry.1.is_zero() {
            self.terms.remove(&x.key());
        }
    }

    pub fn scheme(&self) -> &Arc<Scheme> {
        &self.scheme
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&SchemePoint, &BigInt)> {
        self.terms.values().map(|(x, k)| (x, k))
    }

    pub fn points(&self) -> Vec<SchemePoint> {
        self.terms.values().map(|(x, _)| x.clone()).collect()
    }

    pub fn coefficient(&self, x: &SchemePoint) -> BigInt {
        self.terms.get(&x.key()).map(|(_, k)| k.clone()).unwrap_or_default()
    }

    pub fn scale(&self, k: &BigInt) -> Cycle {
        let mut out = Cycle::zero(&self.scheme);
        for (x, c) in self.terms() {
            out.add_term(x, c * k);
        }
        out
    }

    pub fn add(&self, o: &Cycle) -> Result<Cycle, SchemeError> {
        self.same_scheme(o)?;
        let mut out = self.clone();
        for (x, c) in o.terms() {
            out.add_term(x, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Cycle) -> Result<Cycle, SchemeError> {
        self.add(&o.scale(&BigInt::from(-1)))
    }

    fn same_scheme(&self, o: &Cycle) -> Result<(), SchemeError> {
        if self.scheme.name() != o.scheme.name() {
            return Err(SchemeError::SchemeMismatch {
                expected: self.scheme.name().to_string(),
                found: o.scheme.name().to_string(),
            });
        }
        Ok(())
    }

    /// Reads the printed form back, e.g. `2*[piece=X0; (t, x)] - 1*[piece=X1; (pi)]`.
    /// Primes are re-certified unless marked `asserted`.
    pub fn parse(scheme: &Arc<Scheme>, text: &str) -> Result<Cycle, SchemeError> {
        let text = text.trim();
        let mut out = Cycle::zero(scheme);
        if text == "0" {
            return Ok(out);
        }
        let bad = |msg: &str| SchemeError::InvalidScheme(format!("cycle text: {msg}"));
        let mut rest = text;
        let mut sign = BigInt::from(1);
        loop {
            let star = rest.find('*').ok_or_else(|| bad("expected coefficient"))?;
            let coef: BigInt = rest[..star].trim().parse().map_err(|_| bad("bad coefficient"))?;
            let open = rest.find('[').ok_or_else(|| bad("expected '['"))?;
            let close = rest.find(']').ok_or_else(|| bad("expected ']'"))?;
            let body = &rest[open + 1..close];
            let (piece, prime) = body
                .strip_prefix("piece=")
                .and_then(|b| b.split_once(';'))
                .ok_or_else(|| bad("expected piece=NAME; (gens)"))?;
            let mut prime = prime.trim();
            let asserted = prime.ends_with(" asserted");
            if asserted {
                prime = prime.trim_end_matches(" asserted").trim();
            }
            let ring = scheme.piece(piece.trim())?.ring().clone();
            let inner = prime
                .strip_prefix('(')
                .and_then(|p| p.strip_suffix(')'))
                .ok_or_else(|| bad("expected parenthesized generators"))?;
            let gens = split_top_level(inner)
                .into_iter()
                .filter(|g| g.trim() != "0")
                .map(|g| parse_poly(&ring, g.trim()))
                .collect::<Result<Vec<_>, AlgebraError>>()?;
            let ideal = Ideal::new(&ring, gens)?;
            let p = if asserted {
                PrimeIdeal::asserted(ideal)?
            } else {
                PrimeIdeal::certify(ideal)?
            };
            out.add_term(&SchemePoint::new(scheme, piece.trim(), p)?, &sign * coef);
            rest = rest[close + 1..].trim_start();
            if rest.is_empty() {
                return Ok(out);
            }
            sign = match rest.as_bytes()[0] {
                b'+' => BigInt::from(1),
                b'-' => BigInt::from(-1),
                _ => return Err(bad("expected '+' or '-' between terms")),
            };
            rest = rest[1..].trim_start();
        }
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

impl PartialEq for Cycle {
    fn eq(&self, other: &Self) -> bool {
        self.scheme.name() == other.scheme.name()
            && self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((ka, (_, a)), (kb, (_, b)))| ka == kb && a == b)
    }
}

impl Eq for Cycle {}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (x, k)) in self.terms().enumerate() {
            match (i, k.is_negative()) {
                (0, _) => write!(f, "{k}*{x}")?,
                (_, true) => write!(f, " - {}*{x}", k.abs())?,
                (_, false) => write!(f, " + {k}*{x}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Each minimal prime of each piece ideal, weighted by the local length.
pub fn cycl(z: &ClosedSubscheme) -> Result<Cycle, SchemeError> {
    let scheme = z.ambient();
    let mut out = Cycle::zero(scheme);
    for (piece, ideal) in scheme.pieces().iter().zip(z.ideals()) {
        if ideal.is_unit() {
            continue;
        }
        for comp in components(ideal)? {
            let x = SchemePoint::new(scheme, piece.name(), comp.prime)?;
            out.add_term(&x, BigInt::from(comp.multiplicity));
        }
    }
    Ok(out)
}

/// Linear extension of `y ↦ cycl(f^{-1}(closure of y))`.
pub fn naive_pullback(f: &SchemeMorphism, c: &Cycle) -> Result<Cycle, SchemeError> {
    if c.scheme.name() != f.target().name() {
        return Err(SchemeError::SchemeMismatch {
            expected: f.target().name().to_string(),
            found: c.scheme.name().to_string(),
        });
    }
    let mut out = Cycle::zero(f.source());
    for (y, k) in c.terms() {
        let part = cycl(&preimage_subscheme(f, &closure_of_point(y))?)?;
        out = out.add(&part.scale(k))?;
    }
    Ok(out)
}

/// `Σ m_x x ↦ Σ m_x i(x)` along a closed immersion.
pub fn pushforward_closed(i: &SchemeMorphism, c: &Cycle) -> Result<Cycle, SchemeError> {
    if !i.asserts(Property::ClosedImmersion) {
        return Err(SchemeError::NotClosedImmersion(
            i.name().to_string(),
            "closed_immersion is not asserted (and witnessed)".into(),
        ));
    }
    if c.scheme.name() != i.source().name() {
        return Err(SchemeError::SchemeMismatch {
            expected: i.source().name().to_string(),
            found: c.scheme.name().to_string(),
        });
    }
    let mut out = Cycle::zero(i.target());
    for (x, k) in c.terms() {
        out.add_term(&image_point(i, x)?, k.clone());
    }
    Ok(out)
}

/// Splits a cycle by the codimension of each point in its piece.
pub fn grade(c: &Cycle) -> Result<BTreeMap<u64, Cycle>, SchemeError> {
    let mut out: BTreeMap<u64, Cycle> = BTreeMap::new();
    for (x, k) in c.terms() {
        let r = point_codim(x.piece_data().ideal(), x.prime())?;
        out.entry(r).or_insert_with(|| Cycle::zero(&c.scheme)).add_term(x, k.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldDesc;
    use crate::poly::{Polynomial, Ring};
    use crate::scheme::{AffinePiece, PieceMap};
    use std::collections::BTreeSet;

    fn qring(vars: &[&str]) -> Arc<Ring> {
        Ring::new(FieldDesc::Rationals, vars.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn ideal(r: &Arc<Ring>, gens: &[&str]) -> Ideal {
        Ideal::new(r, gens.iter().map(|g| parse_poly(r, g).unwrap()).collect()).unwrap()
    }

    fn one_piece(name: &str, r: &Arc<Ring>, gens: &[&str]) -> Arc<Scheme> {
        Scheme::new(name, vec![AffinePiece::new("P", ideal(r, gens)).unwrap()]).unwrap()
    }

    fn map(x: &Arc<Scheme>, y: &Arc<Scheme>, images: &[&str], props: &[Property]) -> SchemeMorphism {
        let r = x.pieces()[0].ring().clone();
        SchemeMorphism::new(
            "f",
            x,
            y,
            vec![PieceMap {
                source: "P".into(),
                target: "P".into(),
                images: images.iter().map(|s| parse_poly(&r, s).unwrap()).collect(),
            }],
            props.iter().copied().collect(),
        )
        .unwrap()
    }

    fn point(s: &Arc<Scheme>, piece: &str, gens: &[&str]) -> SchemePoint {
        let r = s.piece(piece).unwrap().ring().clone();
        SchemePoint::new(s, piece, PrimeIdeal::certify(ideal(&r, gens)).unwrap()).unwrap()
    }

    #[test]
    fn cycle_of_cover_fiber() {
        let x = one_piece("X", &qring(&["t", "x"]), &["x^3 - t"]);
        let z = ClosedSubscheme::cut(&x, &[("P".into(), vec![parse_poly(x.pieces()[0].ring(), "x^3").unwrap()])]).unwrap();
        let c = cycl(&z).unwrap();
        assert_eq!(c.to_string(), "3*[piece=P; (t, x)]");
    }

    #[test]
    fn cusp_fiber_cycle() {
        let cusp = one_piece("C", &qring(&["a", "b"]), &["b^2 - a^3"]);
        let r = cusp.pieces()[0].ring().clone();
        let z = ClosedSubscheme::cut(&cusp, &[("P".into(), vec![parse_poly(&r, "a").unwrap()])]).unwrap();
        assert_eq!(cycl(&z).unwrap().to_string(), "2*[piece=P; (a, b)]");
    }

    fn dvr(n: u32) -> (Arc<Scheme>, Arc<Scheme>, SchemeMorphism) {
        let r = qring(&["pi"]);
        let x = Scheme::new(
            "X",
            vec![
                AffinePiece::new("X1", ideal(&r, &[&format!("pi^{n}")])).unwrap(),
                AffinePiece::new("X2", ideal(&r, &["pi"])).unwrap(),
            ],
        )
        .unwrap();
        let y = one_piece("Y", &r, &[]);
        let maps = ["X1", "X2"]
            .iter()
            .map(|s| PieceMap {
                source: s.to_string(),
                target: "P".into(),
                images: vec![Polynomial::var(&r, 0)],
            })
            .collect();
        let f = SchemeMorphism::new("f", &x, &y, maps, BTreeSet::new()).unwrap();
        (x, y, f)
    }

    #[test]
    fn dvr_pullbacks() {
        for n in 2..=3 {
            let (x, y, f) = dvr(n);
            let eta = Cycle::point(&point(&y, "P", &[]));
            let s = Cycle::point(&point(&y, "P", &["pi"]));
            let x1 = point(&x, "X1", &["pi"]);
            let x2 = point(&x, "X2", &["pi"]);
            let expected_eta = Cycle::from_terms(&x, [(x1.clone(), BigInt::from(n)), (x2.clone(), BigInt::from(1))]).unwrap();
            let expected_s = Cycle::from_terms(&x, [(x1, BigInt::from(1)), (x2, BigInt::from(1))]).unwrap();
            assert_eq!(naive_pullback(&f, &eta).unwrap(), expected_eta);
            assert_eq!(naive_pullback(&f, &s).unwrap(), expected_s);
        }
    }

    #[test]
    fn arithmetic_and_printing() {
        let (x, _, _) = dvr(2);
        let x1 = point(&x, "X1", &["pi"]);
        let x2 = point(&x, "X2", &["pi"]);
        let a = Cycle::from_terms(&x, [(x1.clone(), BigInt::from(2)), (x2.clone(), BigInt::from(-1))]).unwrap();
        assert_eq!(a.to_string(), "2*[piece=X1; (pi)] - 1*[piece=X2; (pi)]");
        assert!(a.sub(&a).unwrap().is_zero());
        assert_eq!(a.sub(&a).unwrap().to_string(), "0");
        assert_eq!(Cycle::parse(&x, &a.to_string()).unwrap(), a);
        assert_eq!(a.coefficient(&x2), BigInt::from(-1));
    }

    #[test]
    fn identity_pullback_is_identity() {
        let y = one_piece("Y", &qring(&["t", "x"]), &["x^2 - t"]);
        let id = SchemeMorphism::identity(&y);
        let c = Cycle::from_terms(
            &y,
            [(point(&y, "P", &["t", "x"]), BigInt::from(3)), (point(&y, "P", &["x^2 - t"]), BigInt::from(-2))],
        )
        .unwrap();
        assert_eq!(naive_pullback(&id, &c).unwrap(), c);
    }

    #[test]
    fn pushforward_along_closed_immersion() {
        let plane = one_piece("A", &qring(&["t", "x"]), &[]);
        let line = one_piece("Z", &qring(&["t", "x"]), &["x"]);
        let i = map(&line, &plane, &["t", "x"], &[Property::ClosedImmersion]);
        let c = Cycle::point(&point(&line, "P", &["x", "t"]));
        let pushed = pushforward_closed(&i, &c).unwrap();
        assert_eq!(pushed, Cycle::point(&point(&plane, "P", &["x", "t"])));
        assert!(pushforward_closed(&i, &Cycle::zero(&line)).unwrap().is_zero());
        let not_closed = map(&line, &plane, &["t", "x"], &[]);
        assert!(pushforward_closed(&not_closed, &c).is_err());
    }

    #[test]
    fn grading_by_codimension() {
        let y = one_piece("Y", &qring(&["t", "x"]), &["x^2 - t"]);
        let c = Cycle::from_terms(
            &y,
            [(point(&y, "P", &["t", "x"]), BigInt::from(1)), (point(&y, "P", &["x^2 - t"]), BigInt::from(1))],
        )
        .unwrap();
        let g = grade(&c).unwrap();
        assert_eq!(g.keys().copied().collect::<Vec<_>>(), vec![0, 1]);
        let (_, _, f) = dvr(2);
        let eta = Cycle::point(&point(f.target(), "P", &[]));
        let pulled = naive_pullback(&f, &eta).unwrap();
        assert_eq!(grade(&pulled).unwrap().keys().copied().collect::<Vec<_>>(), vec![0]);
    }
}
