//! The line-oriented problem format: declarations of a field, rings,
//! schemes, morphisms, points, cycles and subschemes, followed by tasks.
//!
//! ```text
//! field Q
//! ring R vars t x
//! ring S vars t
//! scheme X piece P ring R ideal x^3 - t
//! scheme Y piece P ring S ideal 0
//! morphism f X -> Y piece P->P map t=t assert flat,surjective
//! point y0 scheme Y piece P prime t
//! cycle c scheme Y terms 2*y0
//! task pullback f c
//! ```
//!
//! Lines of one multi-piece scheme (or morphism, or subscheme) must be
//! consecutive. `compose h g f` declares `h = g . f`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use thiserror::Error;

use crate::cycles::Cycle;
use crate::decomp::PrimeIdeal;
use crate::error::{AlgebraError, SchemeError};
use crate::field::FieldDesc;
use crate::groebner::Ideal;
use crate::parse::parse_poly;
use crate::poly::{Polynomial, Ring};
use crate::scheme::{AffinePiece, ClosedSubscheme, PieceMap, Property, Scheme, SchemeMorphism, SchemePoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}: unresolved reference to {kind} {name}")]
    Unresolved { line: usize, kind: &'static str, name: String },
    #[error("line {line}: {name} is already declared")]
    Duplicate { line: usize, name: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: SchemeError },
}

/// One declaration line, in normalized form.
#[derive(Debug, Clone)]
enum Decl {
    Blank,
    Comment(String),
    Field(FieldDesc),
    Ring { name: String, vars: Vec<String> },
    SchemePiece { scheme: String, piece: String, ring: String, gens: Vec<String> },
    MorphismPiece {
        name: String,
        source: String,
        target: String,
        from: String,
        to: String,
        images: Vec<(String, String)>,
        asserts: Vec<Property>,
    },
    Compose { name: String, g: String, f: String },
    Point { name: String, scheme: String, piece: String, gens: Vec<String>, asserted: bool },
    Cycle { name: String, scheme: String, terms: Vec<(BigInt, String)> },
    Subscheme { name: String, scheme: String, piece: String, gens: Vec<String> },
    Task { command: String, args: Vec<String> },
}

fn gens_text(gens: &[String]) -> String {
    if gens.is_empty() {
        "0".into()
    } else {
        gens.join("; ")
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decl::Blank => Ok(()),
            Decl::Comment(c) => write!(f, "#{c}"),
            Decl::Field(d) => {
                let (ground, params) = match d {
                    FieldDesc::RationalFunctions(r) => (r.field().clone(), r.vars().to_vec()),
                    other => (other.clone(), Vec::new()),
                };
                match ground {
                    FieldDesc::PrimeField(p) => write!(f, "field Fp {p}")?,
                    _ => write!(f, "field Q")?,
                }
                if !params.is_empty() {
                    write!(f, " params {}", params.join(" "))?;
                }
                Ok(())
            }
            Decl::Ring { name, vars } => write!(f, "ring {name} vars {}", vars.join(" ")),
            Decl::SchemePiece { scheme, piece, ring, gens } => {
                write!(f, "scheme {scheme} piece {piece} ring {ring} ideal {}", gens_text(gens))
            }
            Decl::MorphismPiece {
                name,
                source,
                target,
                from,
                to,
                images,
                asserts,
            } => {
                let map: Vec<String> = images.iter().map(|(v, p)| format!("{v}={p}")).collect();
                write!(f, "morphism {name} {source} -> {target} piece {from}->{to} map {}", map.join(", "))?;
                if !asserts.is_empty() {
                    let names: Vec<&str> = asserts.iter().map(|p| p.name()).collect();
                    write!(f, " assert {}", names.join(","))?;
                }
                Ok(())
            }
            Decl::Compose { name, g, f: ff } => write!(f, "compose {name} {g} {ff}"),
            Decl::Point {
                name,
                scheme,
                piece,
                gens,
                asserted,
            } => {
                write!(f, "point {name} scheme {scheme} piece {piece} prime {}", gens_text(gens))?;
                if *asserted {
                    write!(f, " asserted")?;
                }
                Ok(())
            }
            Decl::Cycle { name, scheme, terms } => {
                let t: Vec<String> = terms.iter().map(|(k, p)| format!("{k}*{p}")).collect();
                let t = if t.is_empty() { "0".to_string() } else { t.join(" ") };
                write!(f, "cycle {name} scheme {scheme} terms {t}")
            }
            Decl::Subscheme { name, scheme, piece, gens } => {
                write!(f, "subscheme {name} scheme {scheme} piece {piece} ideal {}", gens_text(gens))
            }
            Decl::Task { command, args } => {
                write!(f, "task {command}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub line: usize,
    pub command: String,
    pub args: Vec<String>,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "task {}", self.command)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

/// A parsed and validated problem file.
pub struct ProblemFile {
    decls: Vec<Decl>,
    pub field: FieldDesc,
    pub rings: BTreeMap<String, Arc<Ring>>,
    pub schemes: BTreeMap<String, Arc<Scheme>>,
    pub morphisms: BTreeMap<String, SchemeMorphism>,
    pub points: BTreeMap<String, SchemePoint>,
    pub cycles: BTreeMap<String, Cycle>,
    pub subschemes: BTreeMap<String, ClosedSubscheme>,
    pub tasks: Vec<Task>,
    /// Declaration order of morphisms, points and cycles.
    pub morphism_order: Vec<String>,
    pub point_order: Vec<String>,
}

impl fmt::Display for ProblemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.decls {
            writeln!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ProblemFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProblemFile({} declarations)", self.decls.len())
    }
}

/// A word-by-word reader over one line that remembers columns.
struct Cursor<'a> {
    line_no: usize,
    line: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn column_of(&self, part: &str) -> usize {
        part.as_ptr() as usize - self.line.as_ptr() as usize + 1
    }

    fn syntax(&self, column: usize, message: impl Into<String>) -> ProblemError {
        ProblemError::Syntax {
            line: self.line_no,
            column,
            message: message.into(),
        }
    }

    fn skip_space(&mut self) {
        while self.pos < self.line.len() && self.line.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn word(&mut self, what: &str) -> Result<&'a str, ProblemError> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.line.len() && !self.line.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax(start + 1, format!("expected {what}")));
        }
        Ok(&self.line[start..self.pos])
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ProblemError> {
        self.skip_space();
        let col = self.pos + 1;
        let w = self.word(&format!("'{kw}'"))?;
        if w != kw {
            return Err(self.syntax(col, format!("expected '{kw}', found '{w}'")));
        }
        Ok(())
    }

    fn rest(&mut self) -> &'a str {
        self.skip_space();
        let r = self.line[self.pos..].trim_end();
        self.pos = self.line.len();
        r
    }

    fn done(&mut self) -> Result<(), ProblemError> {
        self.skip_space();
        if self.pos < self.line.len() {
            return Err(self.syntax(self.pos + 1, "unexpected trailing input"));
        }
        Ok(())
    }
}

fn is_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'' || c == '.')
}

/// Pending multi-line declarations, finalized once the run of lines ends.
enum Pending {
    None,
    Scheme { name: String, line: usize, pieces: Vec<AffinePiece> },
    Morphism {
        name: String,
        line: usize,
        source: Arc<Scheme>,
        target: Arc<Scheme>,
        maps: Vec<PieceMap>,
        asserts: BTreeSet<Property>,
    },
    Subscheme { name: String, line: usize, scheme: Arc<Scheme>, cuts: Vec<(String, Vec<Polynomial>)> },
}

struct Builder {
    file: ProblemFile,
    pending: Pending,
    field_seen: bool,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile, ProblemError> {
        let mut b = Builder {
            file: ProblemFile {
                decls: Vec::new(),
                field: FieldDesc::Rationals,
                rings: BTreeMap::new(),
                schemes: BTreeMap::new(),
                morphisms: BTreeMap::new(),
                points: BTreeMap::new(),
                cycles: BTreeMap::new(),
                subschemes: BTreeMap::new(),
                tasks: Vec::new(),
                morphism_order: Vec::new(),
                point_order: Vec::new(),
            },
            pending: Pending::None,
            field_seen: false,
        };
        for (i, line) in text.lines().enumerate() {
            b.line(i + 1, line)?;
        }
        b.flush()?;
        Ok(b.file)
    }

    pub fn cycle_like(&self, name: &str) -> Option<Result<Cycle, SchemeError>> {
        if let Some(c) = self.cycles.get(name) {
            return Some(Ok(c.clone()));
        }
        if let Some(p) = self.points.get(name) {
            return Some(Ok(Cycle::point(p)));
        }
        self.subschemes.get(name).map(crate::cycles::cycl)
    }

    /// Name of a declared point, if `p` is one.
    pub fn point_name(&self, p: &SchemePoint) -> Option<&str> {
        self.point_order.iter().find(|n| self.points[*n] == *p).map(|s| s.as_str())
    }
}

impl Builder {
    fn line(&mut self, line_no: usize, line: &str) -> Result<(), ProblemError> {
        let mut cur = Cursor { line_no, line, pos: 0 };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            self.flush()?;
            self.file.decls.push(Decl::Blank);
            return Ok(());
        }
        if let Some(c) = trimmed.strip_prefix('#') {
            self.file.decls.push(Decl::Comment(c.to_string()));
            return Ok(());
        }
        let head = cur.word("a declaration")?;
        let continues = match (&self.pending, head) {
            (Pending::Scheme { name, .. }, "scheme") | (Pending::Morphism { name, .. }, "morphism") | (Pending::Subscheme { name, .. }, "subscheme") => {
                let mut peek = Cursor { line_no, line, pos: cur.pos };
                peek.word("a name").ok() == Some(name.as_str())
            }
            _ => false,
        };
        if !continues {
            self.flush()?;
        }
        match head {
            "field" => self.field(&mut cur),
            "ring" => self.ring(&mut cur),
            "scheme" => self.scheme(&mut cur),
            "morphism" => self.morphism(&mut cur),
            "compose" => self.compose(&mut cur),
            "point" => self.point(&mut cur),
            "cycle" => self.cycle(&mut cur),
            "subscheme" => self.subscheme(&mut cur),
            "task" => self.task(&mut cur),
            other => Err(cur.syntax(1 + line.len() - line.trim_start().len(), format!("unknown declaration '{other}'"))),
        }
    }

    fn name(&self, cur: &mut Cursor<'_>, what: &str) -> Result<String, ProblemError> {
        let col = {
            cur.skip_space();
            cur.pos + 1
        };
        let w = cur.word(what)?;
        if !is_name(w) {
            return Err(cur.syntax(col, format!("invalid {what} '{w}'")));
        }
        Ok(w.to_string())
    }

    fn unresolved(line: usize, kind: &'static str, name: &str) -> ProblemError {
        ProblemError::Unresolved {
            line,
            kind,
            name: name.to_string(),
        }
    }

    fn fresh(&self, line: usize, name: &str) -> Result<(), ProblemError> {
        let f = &self.file;
        if f.rings.contains_key(name)
            || f.schemes.contains_key(name)
            || f.morphisms.contains_key(name)
            || f.points.contains_key(name)
            || f.cycles.contains_key(name)
            || f.subschemes.contains_key(name)
        {
            return Err(ProblemError::Duplicate {
                line,
                name: name.to_string(),
            });
        }
        Ok(())
    }

    fn invalid(line: usize) -> impl Fn(SchemeError) -> ProblemError {
        move |source| ProblemError::Invalid { line, source }
    }

    fn algebra(cur: &Cursor<'_>, part: &str) -> impl Fn(AlgebraError) -> ProblemError {
        let (line, base) = (cur.line_no, cur.column_of(part));
        move |e| match e {
            AlgebraError::Syntax { column, message } => ProblemError::Syntax {
                line,
                column: base + column.saturating_sub(1),
                message,
            },
            other => ProblemError::Invalid {
                line,
                source: other.into(),
            },
        }
    }

    /// Parses `g1; g2; ...` in `ring`; a lone `0` is the empty list.
    fn polys(&self, cur: &Cursor<'_>, ring: &Arc<Ring>, text: &str) -> Result<(Vec<Polynomial>, Vec<String>), ProblemError> {
        let mut polys = Vec::new();
        let mut printed = Vec::new();
        if text.trim() == "0" || text.trim().is_empty() {
            return Ok((polys, printed));
        }
        for part in text.split(';') {
            let p = part.trim();
            if p.is_empty() {
                return Err(cur.syntax(cur.column_of(part), "empty polynomial"));
            }
            let poly = parse_poly(ring, p).map_err(Self::algebra(cur, p))?;
            if !poly.is_zero() {
                printed.push(poly.to_string());
                polys.push(poly);
            }
        }
        Ok((polys, printed))
    }

    fn field(&mut self, cur: &mut Cursor<'_>) -> Result<(), ProblemError> {
        if self.field_seen || !self.file.rings.is_empty() {
            return Err(cur.syntax(1, "the field must be declared once, before any ring"));
        }
        let kind = cur.word("Q or Fp")?;
        let ground = match kind {
            "Q" => FieldDesc::Rationals,
            "Fp" => {
                cur.skip_space();
                let col = cur.pos + 1;
                let p: u64 = cur
                    .word("a prime")?
                    .parse()
                    .map_err(|_| cur.syntax(col, "expected a prime"))?;
                FieldDesc::prime_field(p).map_err(|e| cur.syntax(col, e.to_string()))?
            }
            other => return Err(cur.syntax(cur.column_of(other), format!("unknown field '{other}'"))),
        };
        cur.skip_space();
        let field = if cur.pos < cur.line.len() {
            cur.keyword("params")?;
            let mut params = Vec::new();
            loop {
                cur.skip_space();
                if cur.pos >= cur.line.len() {
                    break;
                }
                params.push(self.name(cur, "parameter name")?);
            }
            FieldDesc::rational_functions(ground, params).map_err(|e| cur.syntax(1, e.to_string()))?
        } else {
            ground
        };
        self.field_seen = true;
        self.file.field = field.clone();
        self.file.decls.push(Decl::Field(field));
        Ok(())
    }

    fn ring(&mut self, cur: &mut Cursor<'_>) -> Result<(), ProblemError> {
        let name = self.name(cur, "ring name")?;
        self.fresh(cur.line_no, &name)?;
        cur.keyword("vars")?;
        let mut vars = Vec::new();
        loop {
            cur.skip_space();
            if cur.pos >= cur.line.len() {
                break;
            }
            vars.push(self.name(cur, "variable name")?);
        }
        let ring = Ring::new(self.file.field.clone(), vars.clone()).map_err(|e| cur.syntax(1, e.to_string()))?;
        self.file.rings.insert(name.clone(), ring);
        self.file.decls.push(Decl::Ring { name, vars });
        Ok(())
    }

    fn lookup_ring(&self, cur: &mut Cursor<'_>) -> Result<(String, Arc<Ring>), ProblemError> {
        let name = self.name(cur, "ring name")?;
        let ring = self
            .file
            .rings
            .get(&name)
            .cloned()
            .ok_or_else(|| Self::unresolved(cur.line_no, "ring", &name))?;
        Ok((name, ring))
    }

    fn lookup_scheme(&self, cur: &mut Cursor<'_>) -> Result<(String, Arc<Scheme>), ProblemError> {
        let name = self.name(cur, "scheme name")?;
        let s = self
            .file
            .schemes
            .get(&name)
            .cloned()
            .ok_or_else(|| Self::unresolved(cur.line_no, "scheme", &name))?;
        Ok((name, s))
    }

    fn piece_ring(&self, line: usize, scheme: &Arc<Scheme>, piece: &str) -> Result<Arc<Ring>, ProblemError> {
        Ok(scheme
            .piece(piece)
            .map_err(|_| Self::unresolved(line, "piece", piece))?
            .ring()
            .clone())
    }

    fn scheme(&mut self, cur: &mut Cursor<'_>) -> Result<(), ProblemError> {
        let name = self.name(cur, "scheme name")?;
        cur.keyword("piece")?;
        let piece = self.name(cur, "piece name")?;
        cur.keyword("ring")?;
        let (ring_name, ring) = self.lookup_ring(cur)?;
        cur.keyword("ideal")?;
        let text = cur.rest();
        let (polys, gens) = self.polys(cur, &ring, text)?;
        let ideal = Ideal::new(&ring, polys).map_err(|e| Self::invalid(cur.line_no)(e.into()))?;
        let p = AffinePiece::new(piece.clone(), ideal).map_err(Self::invalid(cur.line_no))?;
        match &mut self.pending {
            Pending::Scheme { pieces, .. } => pieces.push(p),
            _ => {
                self.fresh(cur.line_no, &name)?;
                self.pending = Pending::Scheme {
                    name: name.clone(),
                    line: cur.line_no,
                    pieces: vec![p],
                };
            }
        }
        self.file.decls.push(Decl::SchemePiece {
            scheme: name,
            piece,
            ring: ring_name,
            gens,
        });
        Ok(())
    }

    fn morphism(&mut self, cur: &mut Cursor<'_>) -> Result<(), ProblemError> {
        let name = self.name(cur, "morphism name")?;
        let (source_name, source) = self.lookup_scheme(cur)?;
        cur.keyword("->")?;
        let (target_name, target) = self.lookup_scheme(cur)?;
        cur.keyword("piece")?;
        cur.skip_space();
        let col = cur.pos + 1;
        let arrow = cur.word("SRC->DST")?;
        let (from, to) = arrow
            .split_once("->")
            .ok_or_else(|| cur.syntax(col, "expected SRC->DST"))?;
        let src_ring = self.piece_ring(cur.line_no, &source, from)?;
        let dst_ring = self.piece_ring(cur.line_no, &target, to)?;
        cur.keyword("map")?;
        let rest = cur.rest();
        let (map_text, assert_text) = match rest.find(" assert ") {
            Some(i) => (&rest[..i], Some(rest[i + 8..].trim())),
            None if rest.starts_with("assert ") => ("", Some(rest[7..].trim())),
            None => (rest, None),
        };
        let mut images: Vec<Option<Polynomial>> = vec![None; dst_ring.nvars()];
        if !map_text.trim().is_empty() {
            for part in map_text.split(',') {
                let (v, p) = part
                    .split_once('=')
                    .ok_or_else(|| cur.syntax(cur.column_of(part), "expected VAR=POLY"))?;
                let v = v.trim();
                let idx = dst_ring
                    .var_index(v)
                    .ok_or_else(|| cur.syntax(cur.column_of(v), format!("{v} is not a variable of piece {to}")))?;
                if images[idx].is_some() {
                    return Err(cur.syntax(cur.column_of(v), format!("{v} is mapped twice")));
                }
                let p = p.trim();
                images[idx] = Some(parse_poly(&src_ring, p).map_err(Self::algebra(cur, p))?);
            }
        }
        let mut printed = Vec::new();
        let mut polys = Vec::new();
        for (i, img) in images.into_iter().enumerate() {
            let v = &dst_ring.vars()[i];
            let img = img.ok_or_else(|| cur.syntax(cur.line.len(), format!("no image given for {v}")))?;
            printed.push((v.clone(), img.to_string()));
            polys.push(img);
        }
        let mut asserts = Vec::new();
        if let Some(a) = assert_text {
            for word in a.split(',') {
                let w = word.trim();
                let p: Property = w
                    .parse()
                    .map_err(|_| cur.syntax(cur.column_of(w), format!("unknown property '{w}'")))?;
                if !asserts.contains(&p) {
                    asserts.push(p);
                }
            }
        }
        let map = PieceMap {
            source: from.to_string(),
            target: to.to_string(),
            images: polys,
        };
        match &mut self.pending {
            Pending::Morphism {
                maps,
                asserts: all,
                source: s,
                target: t,
                ..
            } => {
                if s.name() != source.name() || t.name() != target.name() {
                    return Err(cur.syntax(1, "morphism pieces disagree on source or target"));
                }
                maps.push(map);
                all.extend(asserts.iter().copied());
            }
            _ => {
                self.fresh(cur.line_no, &name)?;
                self.pending = Pending::Morphism {
                    name: name.clone(),
                    line: cur.line_no,
                    source,
                    target,
                    maps: vec![map],
                    asserts: asserts.iter().copied().collect(),
                };
            }
        }
        self.file.decls.push(Decl::MorphismPiece {
            name,
            source: source_name,
            target: target_name,
            from: from.to_string(),
            to: to.to_string(),
            images: printed,
            asserts,
        });
        Ok(())
    }

    fn compose(&mut self, cur: &mut Cursor<'_>) -> Result<(), ProblemError> {
        let name = self.name(cur, "morphism name")?;
        self.fresh(cur.line_no, &name)?;
        let g = self.name(cur, "morphism name")?;
        let f = self.name(cur, "morphism name")?;
        cur.done()?;
        let gm = self.file.morphisms.get(&g).ok_or_else(|| Self::unresolved(cur.line_no, "morphism", &g))?;
        let fm = self.file.morphisms.get(&f).ok_or_else(|| Self::unresolved(cur.line_no, "morphism", &f))?;
        let h = SchemeMorphism::compose(name.clone(), gm, fm).map_err(Self::invalid(cur.line_no))?;
        self.file.morphisms.insert(name.clone(), h);
        self.file.morphism_order.push(name.clone());
        self.file.decls.push(Decl::Compose { name, g, f });
        Ok(())
    }

    fn point(&mut self, cur: &mut Cursor<'_>) -> Result<(), ProblemError> {
        let name = self.name(cur, "point name")?;
        self.fresh(cur.line_no, &name)?;
        cur.keyword("scheme")?;
        let (scheme_name, scheme) = self.lookup_scheme(cur)?;
        cur.keyword("piece")?;
        let piece = self.name(cur, "piece name")?;
        let ring = self.piece_ring(cur.line_no, &scheme, &piece)?;
        cur.keyword("prime")?;
        let mut text = cur.rest();
        let asserted = text.ends_with(" asserted") || text == "asserted";
        if asserted {
            text = text.trim_end_matches("asserted").trim_end();
        }
        let (polys, gens) = self.polys(cur, &ring, text)?;
        let ideal = Ideal::new(&ring, polys).map_err(|e| Self::invalid(cur.line_no)(e.into()))?;
        let prime = if asserted {
            PrimeIdeal::asserted(ideal)
        } else {
            PrimeIdeal::certify(ideal)
        }
        .map_err(|e| Self::invalid(cur.line_no)(e.into()))?;
        let p = SchemePoint::new(&scheme, &piece, prime).map_err(Self::invalid(cur.line_no))?;
        self.file.points.insert(name.clone(), p);
        self.file.point_order.push(name.clone());
        self.file.decls.push(Decl::Point {
            name,
            scheme: scheme_name,
            piece,
            gens,
            asserted,
        });
        Ok(())
    }

    fn cycle(&mut self, cur: &mut Cursor<'_>) -> Result<(), ProblemError> {
        let name = self.name(cur, "cycle name")?;
        self.fresh(cur.line_no, &name)?;
        cur.keyword("scheme")?;
        let (scheme_name, scheme) = self.lookup_scheme(cur)?;
        cur.keyword("terms")?;
        let mut terms = Vec::new();
        let mut c = Cycle::zero(&scheme);
        loop {
            cur.skip_space();
            if cur.pos >= cur.line.len() {
                break;
            }
            let col = cur.pos + 1;
            let w = cur.word("a term")?;
            if w == "0" && terms.is_empty() {
                continue;
            }
            let (k, p) = w.split_once('*').ok_or_else(|| cur.syntax(col, "expected INT*POINT"))?;
            let k: BigInt = k.parse().map_err(|_| cur.syntax(col, "expected an integer coefficient"))?;
            let pt = self
                .file
                .points
                .get(p)
                .ok_or_else(|| Self::unresolved(cur.line_no, "point", p))?;
            let term = Cycle::from_terms(&scheme, [(pt.clone(), k.clone())]).map_err(Self::invalid(cur.line_no))?;
            c = c.add(&term).map_err(Self::invalid(cur.line_no))?;
            terms.push((k, p.to_string()));
        }
        self.file.cycles.insert(name.clone(), c);
        self.file.decls.push(Decl::Cycle {
            name,
            scheme: scheme_name,
            terms,
        });
        Ok(())
    }

    fn subscheme(&mut self, cur: &mut Cursor<'_>) -> Result<(), ProblemError> {
        let name = self.name(cur, "subscheme name")?;
        cur.keyword("scheme")?;
        let (scheme_name, scheme) = self.lookup_scheme(cur)?;
        cur.keyword("piece")?;
        let piece = self.name(cur, "piece name")?;
        let ring = self.piece_ring(cur.line_no, &scheme, &piece)?;
        cur.keyword("ideal")?;
        let text = cur.rest();
        let (polys, gens) = self.polys(cur, &ring, text)?;
        match &mut self.pending {
            Pending::Subscheme { cuts, scheme: s, .. } => {
                if s.name() != scheme.name() {
                    return Err(cur.syntax(1, "subscheme pieces disagree on the ambient scheme"));
                }
                cuts.push((piece.clone(), polys));
            }
            _ => {
                self.fresh(cur.line_no, &name)?;
                self.pending = Pending::Subscheme {
                    name: name.clone(),
                    line: cur.line_no,
                    scheme: scheme.clone(),
                    cuts: vec![(piece.clone(), polys)],
                };
            }
        }
        self.file.decls.push(Decl::Subscheme {
            name,
            scheme: scheme_name,
            piece,
            gens,
        });
        Ok(())
    }

    fn task(&mut self, cur: &mut Cursor<'_>) -> Result<(), ProblemError> {
        let command = cur.word("a task command")?.to_string();
        let mut args = Vec::new();
        loop {
            cur.skip_space();
            if cur.pos >= cur.line.len() {
                break;
            }
            args.push(self.name(cur, "argument")?);
        }
        self.file.tasks.push(Task {
            line: cur.line_no,
            command: command.clone(),
            args: args.clone(),
        });
        self.file.decls.push(Decl::Task { command, args });
        Ok(())
    }

    fn flush(&mut self) -> Result<(), ProblemError> {
        match std::mem::replace(&mut self.pending, Pending::None) {
            Pending::None => {}
            Pending::Scheme { name, line, pieces } => {
                let s = Scheme::new(name.clone(), pieces).map_err(Self::invalid(line))?;
                self.file.schemes.insert(name, s);
            }
            Pending::Morphism {
                name,
                line,
                source,
                target,
                maps,
                asserts,
            } => {
                let m = SchemeMorphism::new(name.clone(), &source, &target, maps, asserts).map_err(Self::invalid(line))?;
                self.file.morphisms.insert(name.clone(), m);
                self.file.morphism_order.push(name);
            }
            Pending::Subscheme { name, line, scheme, cuts } => {
                let z = ClosedSubscheme::cut(&scheme, &cuts).map_err(Self::invalid(line))?;
                self.file.subschemes.insert(name, z);
            }
        }
        Ok(())
    }
}
