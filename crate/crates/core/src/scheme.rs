//! Finite disjoint unions of affine pieces, their points, morphisms, fiber
//! products, scheme-theoretic preimages, closures and point images.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::decomp::PrimeIdeal;
use crate::error::{AlgebraError, SchemeError};
use crate::groebner::Ideal;
use crate::poly::{MonomialOrder, Polynomial, Ring};

#[derive(Clone)]
pub struct AffinePiece {
    name: String,
    ideal: Ideal,
}

impl AffinePiece {
    /// Rejects the unit ideal: such a piece would be empty.
    pub fn new(name: impl Into<String>, ideal: Ideal) -> Result<Self, SchemeError> {
        let name = name.into();
        if ideal.is_unit() {
            return Err(SchemeError::InvalidScheme(format!("piece {name} has the unit ideal")));
        }
        Ok(AffinePiece { name, ideal })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ring(&self) -> &Arc<Ring> {
        self.ideal.ring()
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }
}

pub struct Scheme {
    name: String,
    pieces: Vec<AffinePiece>,
}

impl fmt::Debug for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scheme({})", self.name)
    }
}

impl Scheme {
    pub fn new(name: impl Into<String>, pieces: Vec<AffinePiece>) -> Result<Arc<Self>, SchemeError> {
        let name = name.into();
        if pieces.is_empty() {
            return Err(SchemeError::InvalidScheme(format!("scheme {name} has no pieces")));
        }
        Self::build(name, pieces)
    }

    fn build(name: String, pieces: Vec<AffinePiece>) -> Result<Arc<Self>, SchemeError> {
        let mut seen = BTreeSet::new();
        for p in &pieces {
            if !seen.insert(p.name.clone()) {
                return Err(SchemeError::InvalidScheme(format!("duplicate piece {} in {name}", p.name)));
            }
            if p.ring().field() != pieces[0].ring().field() {
                return Err(AlgebraError::FieldMismatch(
                    p.ring().field().to_string(),
                    pieces[0].ring().field().to_string(),
                )
                .into());
            }
        }
        Ok(Arc::new(Scheme { name, pieces }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn piece(&self, name: &str) -> Result<&AffinePiece, SchemeError> {
        self.pieces
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| SchemeError::UnknownPiece(format!("{}.{name}", self.name)))
    }

    pub fn piece_index(&self, name: &str) -> Result<usize, SchemeError> {
        self.pieces
            .iter()
            .position(|p| p.name == name)
            .ok_or_else(|| SchemeError::UnknownPiece(format!("{}.{name}", self.name)))
    }

    /// The generic points of every piece.
    pub fn generic_points(self: &Arc<Self>) -> Result<Vec<SchemePoint>, SchemeError> {
        let mut out = Vec::new();
        for p in &self.pieces {
            for q in crate::decomp::minimal_primes(p.ideal())? {
                out.push(SchemePoint::new(self, p.name(), q)?);
            }
        }
        Ok(out)
    }
}

/// A point: a prime of one piece containing that piece's ideal.
#[derive(Clone)]
pub struct SchemePoint {
    scheme: Arc<Scheme>,
    piece: String,
    prime: PrimeIdeal,
}

impl SchemePoint {
    pub fn new(scheme: &Arc<Scheme>, piece: &str, prime: PrimeIdeal) -> Result<Self, SchemeError> {
        let p = scheme.piece(piece)?;
        if prime.ring() != p.ring() {
            return Err(AlgebraError::RingMismatch(p.ring().to_string(), prime.ring().to_string()).into());
        }
        if !prime.ideal().contains_ideal(p.ideal()) {
            return Err(AlgebraError::NotContaining {
                prime: prime.key(),
                ideal: p.ideal().key(),
            }
            .into());
        }
        Ok(SchemePoint {
            scheme: scheme.clone(),
            piece: piece.to_string(),
            prime,
        })
    }

    pub fn scheme(&self) -> &Arc<Scheme> {
        &self.scheme
    }

    pub fn piece(&self) -> &str {
        &self.piece
    }

    pub fn piece_data(&self) -> &AffinePiece {
        self.scheme.piece(&self.piece).expect("validated at construction")
    }

    pub fn prime(&self) -> &PrimeIdeal {
        &self.prime
    }

    /// Identity key `(piece, printed prime)`.
    pub fn key(&self) -> (String, String) {
        (self.piece.clone(), self.prime.key())
    }
}

impl PartialEq for SchemePoint {
    fn eq(&self, other: &Self) -> bool {
        self.scheme.name == other.scheme.name && self.piece == other.piece && self.prime == other.prime
    }
}

impl Eq for SchemePoint {}

impl fmt::Display for SchemePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[piece={}; {}]", self.piece, self.prime)
    }
}

impl fmt::Debug for SchemePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Properties a user may assert on a morphism. Only `ClosedImmersion` is
/// checked (by an explicit witness); the others are recorded and echoed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Flat,
    Surjective,
    Generalizing,
    UniversallyGeneralizing,
    UniversallyBijective,
    ClosedImmersion,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::Flat,
        Property::Surjective,
        Property::Generalizing,
        Property::UniversallyGeneralizing,
        Property::UniversallyBijective,
        Property::ClosedImmersion,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Property::Flat => "flat",
            Property::Surjective => "surjective",
            Property::Generalizing => "generalizing",
            Property::UniversallyGeneralizing => "universally_generalizing",
            Property::UniversallyBijective => "universally_bijective",
            Property::ClosedImmersion => "closed_immersion",
        }
    }

    /// Preserved by every base change.
    pub fn is_universal(&self) -> bool {
        !matches!(self, Property::Generalizing)
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Property::ALL
            .iter()
            .find(|p| p.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown property {s}"))
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where one source piece goes: the target piece, and the image of each
/// target variable as a polynomial in the source piece's ring.
#[derive(Debug, Clone)]
pub struct PieceMap {
    pub source: String,
    pub target: String,
    pub images: Vec<Polynomial>,
}

#[derive(Clone)]
pub struct SchemeMorphism {
    name: String,
    source: Arc<Scheme>,
    target: Arc<Scheme>,
    maps: Vec<PieceMap>,
    asserted: BTreeSet<Property>,
}

impl fmt::Debug for SchemeMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.name, self.source.name, self.target.name)
    }
}

impl SchemeMorphism {
    /// Validates the piece maps, well-definedness, and the closed-immersion
    /// witness when that property is asserted.
    pub fn new(
        name: impl Into<String>,
        source: &Arc<Scheme>,
        target: &Arc<Scheme>,
        maps: Vec<PieceMap>,
        asserted: BTreeSet<Property>,
    ) -> Result<Self, SchemeError> {
        let name = name.into();
        let mut ordered = Vec::with_capacity(source.pieces.len());
        for piece in &source.pieces {
            let mut hits = maps.iter().filter(|m| m.source == piece.name);
            let m = hits.next().ok_or_else(|| {
                SchemeError::InvalidScheme(format!("morphism {name} does not map piece {}", piece.name))
            })?;
            if hits.next().is_some() {
                return Err(SchemeError::InvalidScheme(format!(
                    "morphism {name} maps piece {} twice",
                    piece.name
                )));
            }
            let tp = target.piece(&m.target)?;
            if m.images.len() != tp.ring().nvars() {
                return Err(SchemeError::InvalidScheme(format!(
                    "morphism {name}: piece {} needs {} images, got {}",
                    piece.name,
                    tp.ring().nvars(),
                    m.images.len()
                )));
            }
            for img in &m.images {
                if img.ring() != piece.ring() {
                    return Err(AlgebraError::RingMismatch(piece.ring().to_string(), img.ring().to_string()).into());
                }
            }
            for g in tp.ideal().generators() {
                if !piece.ideal().contains(&g.substitute(piece.ring(), &m.images))? {
                    return Err(SchemeError::IllDefined {
                        morphism: name.clone(),
                        piece: piece.name.clone(),
                        generator: g.to_string(),
                    });
                }
            }
            ordered.push(m.clone());
        }
        for m in &maps {
            source.piece(&m.source)?;
        }
        let f = SchemeMorphism {
            name,
            source: source.clone(),
            target: target.clone(),
            maps: ordered,
            asserted,
        };
        if f.asserts(Property::ClosedImmersion) {
            f.check_closed_immersion()?;
        }
        Ok(f)
    }

    pub fn identity(scheme: &Arc<Scheme>) -> Self {
        let maps = scheme
            .pieces
            .iter()
            .map(|p| PieceMap {
                source: p.name.clone(),
                target: p.name.clone(),
                images: (0..p.ring().nvars()).map(|i| Polynomial::var(p.ring(), i)).collect(),
            })
            .collect();
        SchemeMorphism {
            name: format!("id_{}", scheme.name),
            source: scheme.clone(),
            target: scheme.clone(),
            maps,
            asserted: Property::ALL.into_iter().collect(),
        }
    }

    /// `g ∘ f`. Asserted properties are those asserted on both, all of which
    /// are stable under composition.
    pub fn compose(name: impl Into<String>, g: &SchemeMorphism, f: &SchemeMorphism) -> Result<Self, SchemeError> {
        if f.target.name != g.source.name {
            return Err(SchemeError::SchemeMismatch {
                expected: g.source.name.clone(),
                found: f.target.name.clone(),
            });
        }
        let mut maps = Vec::new();
        for fm in &f.maps {
            let gm = g.piece_map(&fm.target)?;
            let src_ring = f.source.piece(&fm.source)?.ring();
            let images = gm.images.iter().map(|h| h.substitute(src_ring, &fm.images)).collect();
            maps.push(PieceMap {
                source: fm.source.clone(),
                target: gm.target.clone(),
                images,
            });
        }
        let asserted = f.asserted.intersection(&g.asserted).copied().collect();
        SchemeMorphism::new(name, &f.source, &g.target, maps, asserted)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<Scheme> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Scheme> {
        &self.target
    }

    pub fn maps(&self) -> &[PieceMap] {
        &self.maps
    }

    pub fn asserted(&self) -> &BTreeSet<Property> {
        &self.asserted
    }

    pub fn asserts(&self, p: Property) -> bool {
        self.asserted.contains(&p)
    }

    pub fn piece_map(&self, source_piece: &str) -> Result<&PieceMap, SchemeError> {
        self.maps
            .iter()
            .find(|m| m.source == source_piece)
            .ok_or_else(|| SchemeError::UnknownPiece(format!("{}.{source_piece}", self.source.name)))
    }

    /// Every source variable must be congruent, modulo the source ideal, to a
    /// polynomial in the images of the target variables.
    fn check_closed_immersion(&self) -> Result<(), SchemeError> {
        for m in &self.maps {
            let piece = self.source.piece(&m.source)?;
            let (graph, n) = graph_ideal(piece.ideal(), &m.images)?;
            let basis = graph.groebner_basis(MonomialOrder::BlockElim { split: n })?;
            for i in 0..n {
                let x = Polynomial::var(graph.ring(), i);
                let (_, r) = x.divrem(&basis[..], MonomialOrder::BlockElim { split: n })?;
                if r.used_vars().iter().any(|&v| v < n) {
                    return Err(SchemeError::NotClosedImmersion(
                        self.name.clone(),
                        format!("variable {} of piece {} is not in the image", piece.ring().vars()[i], piece.name),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// `I + (y_j - images_j)` in the ring of the source variables followed by one
/// fresh variable per image. Returns the ideal and the source variable count.
fn graph_ideal(source: &Ideal, images: &[Polynomial]) -> Result<(Ideal, usize), AlgebraError> {
    let ring = source.ring();
    let n = ring.nvars();
    let mut vars = ring.vars().to_vec();
    let mut probe = ring.clone();
    for j in 0..images.len() {
        let name = probe.fresh_name(&format!("y{j}"));
        vars.push(name);
        probe = Ring::new(ring.field().clone(), vars.clone())?;
    }
    let big = probe;
    let shift: Vec<usize> = (0..n).collect();
    let mut gens: Vec<Polynomial> = source.generators().iter().map(|g| g.map_vars(&big, &shift)).collect();
    for (j, img) in images.iter().enumerate() {
        gens.push(&Polynomial::var(&big, n + j) - &img.map_vars(&big, &shift));
    }
    Ok((Ideal::new(&big, gens)?, n))
}

/// Per-piece ideals containing the piece ideals; the unit ideal marks a piece
/// the subscheme misses.
#[derive(Clone)]
pub struct ClosedSubscheme {
    ambient: Arc<Scheme>,
    ideals: Vec<Ideal>,
}

impl fmt::Debug for ClosedSubscheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .ambient
            .pieces
            .iter()
            .zip(&self.ideals)
            .map(|(p, i)| format!("{}: {}", p.name, i))
            .collect();
        write!(f, "V[{}]", parts.join("; "))
    }
}

impl ClosedSubscheme {
    pub fn new(ambient: &Arc<Scheme>, ideals: Vec<Ideal>) -> Result<Self, SchemeError> {
        if ideals.len() != ambient.pieces.len() {
            return Err(SchemeError::InvalidScheme(format!(
                "subscheme of {} needs {} ideals",
                ambient.name,
                ambient.pieces.len()
            )));
        }
        for (p, i) in ambient.pieces.iter().zip(&ideals) {
            if i.ring() != p.ring() {
                return Err(AlgebraError::RingMismatch(p.ring().to_string(), i.ring().to_string()).into());
            }
            if !i.contains_ideal(p.ideal()) {
                return Err(AlgebraError::NotContaining {
                    prime: i.key(),
                    ideal: p.ideal().key(),
                }
                .into());
            }
        }
        Ok(ClosedSubscheme {
            ambient: ambient.clone(),
            ideals,
        })
    }

    /// `V(gens)` on the named pieces (each added to the piece ideal), empty on
    /// all others.
    pub fn cut(ambient: &Arc<Scheme>, cuts: &[(String, Vec<Polynomial>)]) -> Result<Self, SchemeError> {
        let mut ideals: Vec<Ideal> = ambient.pieces.iter().map(|p| Ideal::unit(p.ring())).collect();
        for (piece, gens) in cuts {
            let k = ambient.piece_index(piece)?;
            ideals[k] = ambient.pieces[k].ideal().with_generators(gens.iter().cloned());
        }
        Self::new(ambient, ideals)
    }

    pub fn whole(ambient: &Arc<Scheme>) -> Self {
        ClosedSubscheme {
            ambient: ambient.clone(),
            ideals: ambient.pieces.iter().map(|p| p.ideal().clone()).collect(),
        }
    }

    pub fn ambient(&self) -> &Arc<Scheme> {
        &self.ambient
    }

    pub fn ideals(&self) -> &[Ideal] {
        &self.ideals
    }

    pub fn ideal_on(&self, piece: &str) -> Result<&Ideal, SchemeError> {
        Ok(&self.ideals[self.ambient.piece_index(piece)?])
    }
}

impl PartialEq for ClosedSubscheme {
    fn eq(&self, other: &Self) -> bool {
        self.ambient.name == other.ambient.name && self.ideals == other.ideals
    }
}

/// `X ×_S Y` with its projections. Pieces are named `(a,b)`; variables of the
/// two factors get suffixes `_1` and `_2`. Pieces with the unit ideal are
/// dropped. Each projection carries the base-change-stable properties of the
/// morphism it is a base change of.
pub fn fiber_product(
    f: &SchemeMorphism,
    g: &SchemeMorphism,
) -> Result<(Arc<Scheme>, SchemeMorphism, SchemeMorphism), SchemeError> {
    if f.target.name != g.target.name {
        return Err(SchemeError::SchemeMismatch {
            expected: f.target.name.clone(),
            found: g.target.name.clone(),
        });
    }
    let (x, y) = (&f.source, &g.source);
    let mut pieces = Vec::new();
    let mut pr1_maps = Vec::new();
    let mut pr2_maps = Vec::new();
    for a in &x.pieces {
        let fa = f.piece_map(&a.name)?;
        for b in &y.pieces {
            let gb = g.piece_map(&b.name)?;
            if fa.target != gb.target {
                continue;
            }
            let (na, nb) = (a.ring().nvars(), b.ring().nvars());
            let mut vars: Vec<String> = a.ring().vars().iter().map(|v| format!("{v}_1")).collect();
            vars.extend(b.ring().vars().iter().map(|v| format!("{v}_2")));
            let ring = Ring::new(a.ring().field().clone(), vars)?;
            let left: Vec<usize> = (0..na).collect();
            let right: Vec<usize> = (na..na + nb).collect();
            let mut gens: Vec<Polynomial> = a.ideal().generators().iter().map(|h| h.map_vars(&ring, &left)).collect();
            gens.extend(b.ideal().generators().iter().map(|h| h.map_vars(&ring, &right)));
            for (p, q) in fa.images.iter().zip(&gb.images) {
                gens.push(&p.map_vars(&ring, &left) - &q.map_vars(&ring, &right));
            }
            let ideal = Ideal::new(&ring, gens)?;
            if ideal.is_unit() {
                continue;
            }
            let name = format!("({},{})", a.name, b.name);
            pr1_maps.push(PieceMap {
                source: name.clone(),
                target: a.name.clone(),
                images: (0..na).map(|i| Polynomial::var(&ring, i)).collect(),
            });
            pr2_maps.push(PieceMap {
                source: name.clone(),
                target: b.name.clone(),
                images: (0..nb).map(|i| Polynomial::var(&ring, na + i)).collect(),
            });
            pieces.push(AffinePiece { name, ideal });
        }
    }
    let product = Scheme::build(format!("{}_x_{}", x.name, y.name), pieces)?;
    let stable = |m: &SchemeMorphism| -> BTreeSet<Property> {
        m.asserted.iter().copied().filter(Property::is_universal).collect()
    };
    let pr1 = SchemeMorphism::new("pr1", &product, x, pr1_maps, stable(g))?;
    let pr2 = SchemeMorphism::new("pr2", &product, y, pr2_maps, stable(f))?;
    Ok((product, pr1, pr2))
}

/// Scheme-theoretic preimage `f^{-1}(Z)`.
pub fn preimage_subscheme(f: &SchemeMorphism, z: &ClosedSubscheme) -> Result<ClosedSubscheme, SchemeError> {
    if z.ambient.name != f.target.name {
        return Err(SchemeError::SchemeMismatch {
            expected: f.target.name.clone(),
            found: z.ambient.name.clone(),
        });
    }
    let mut ideals = Vec::new();
    for (piece, m) in f.source.pieces.iter().zip(&f.maps) {
        let zi = z.ideal_on(&m.target)?;
        let ideal = if zi.is_unit() {
            Ideal::unit(piece.ring())
        } else {
            piece
                .ideal()
                .with_generators(zi.generators().iter().map(|g| g.substitute(piece.ring(), &m.images)))
        };
        ideals.push(ideal);
    }
    Ok(ClosedSubscheme {
        ambient: f.source.clone(),
        ideals,
    })
}

/// The reduced closure `V(p)` of a point, empty on the other pieces.
pub fn closure_of_point(x: &SchemePoint) -> ClosedSubscheme {
    let ideals = x
        .scheme
        .pieces
        .iter()
        .map(|p| {
            if p.name == x.piece {
                x.prime.ideal().clone()
            } else {
                Ideal::unit(p.ring())
            }
        })
        .collect();
    ClosedSubscheme {
        ambient: x.scheme.clone(),
        ideals,
    }
}

/// `f(x)`: the contraction of `x`'s prime, by elimination on the graph.
pub fn image_point(f: &SchemeMorphism, x: &SchemePoint) -> Result<SchemePoint, SchemeError> {
    if x.scheme.name != f.source.name {
        return Err(SchemeError::SchemeMismatch {
            expected: f.source.name.clone(),
            found: x.scheme.name.clone(),
        });
    }
    let m = f.piece_map(&x.piece)?;
    let target = f.target.piece(&m.target)?;
    let (graph, n) = graph_ideal(x.prime.ideal(), &m.images)?;
    let drop: Vec<usize> = (0..n).collect();
    let contracted = graph.eliminate(&drop);
    let ident: Vec<usize> = (0..target.ring().nvars()).collect();
    let gens = contracted
        .generators()
        .iter()
        .map(|g| g.map_vars(target.ring(), &ident))
        .collect();
    let prime = PrimeIdeal::from_contraction(Ideal::new(target.ring(), gens)?);
    SchemePoint::new(&f.target, &m.target, prime)
}
