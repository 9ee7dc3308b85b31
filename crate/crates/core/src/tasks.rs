//! Task dispatch for problem files and the plain-text report format.

use std::fmt;

use num::bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::cycles::{cycl, grade, naive_pullback, pushforward_closed, Cycle};
use crate::descent::DescentProblem;
use crate::error::{AlgebraError, DescentError, SchemeError};
use crate::intlat::describe_group;
use crate::problem::{ProblemError, ProblemFile, Task};
use crate::scheme::{preimage_subscheme, SchemeMorphism, SchemePoint};

pub const COMMANDS: &[&str] = &[
    "cycl",
    "pullback",
    "preimage",
    "pushforward",
    "defect",
    "gy",
    "gres",
    "gscope",
    "order",
    "hlocal",
    "saturation",
    "grade",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error("line {line}: {message}")]
    Usage { line: usize, message: String },
    #[error(transparent)]
    Descent(#[from] DescentError),
}

impl From<SchemeError> for TaskError {
    fn from(e: SchemeError) -> Self {
        TaskError::Descent(e.into())
    }
}

impl From<AlgebraError> for TaskError {
    fn from(e: AlgebraError) -> Self {
        TaskError::Descent(e.into())
    }
}

/// Exit status for a parse failure: 10..=14.
pub fn problem_exit_code(e: &ProblemError) -> i32 {
    match e {
        ProblemError::Syntax { .. } => 10,
        ProblemError::Unresolved { .. } => 11,
        ProblemError::Duplicate { .. } => 12,
        ProblemError::Invalid { .. } => 14,
    }
}

fn algebra_exit_code(e: &AlgebraError) -> i32 {
    match e {
        AlgebraError::UndecidedPrimality(_) => 21,
        AlgebraError::UnsupportedShape(_) => 22,
        AlgebraError::SaturationDiverged(_) => 23,
        AlgebraError::NonExactDivision(_) => 41,
        _ => 20,
    }
}

/// Exit status for a failed task: 13 for usage, 2x algebra and geometry,
/// 3x descent preconditions, 4x verification.
pub fn task_exit_code(e: &TaskError) -> i32 {
    match e {
        TaskError::Usage { .. } => 13,
        TaskError::Descent(d) => match d {
            DescentError::Scheme(SchemeError::Algebra(a)) => algebra_exit_code(a),
            DescentError::Scheme(SchemeError::NotClosedImmersion(..)) => 24,
            DescentError::Scheme(SchemeError::SchemeMismatch { .. }) => 25,
            DescentError::Scheme(_) => 26,
            DescentError::NotUniversallyGeneralizing(_) => 30,
            DescentError::EmptyFiber(_) => 31,
            DescentError::EmptyScope => 32,
            DescentError::ZeroCycle => 33,
            DescentError::Violation(_) => 40,
        },
    }
}

/// Exit status when a report records a hard failure.
pub const HARD_FAILURE_EXIT: i32 = 42;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stanza {
    pub title: String,
    pub fields: Vec<(String, String)>,
}

/// Deterministic `key: value` report of one task.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub task: String,
    pub fields: Vec<(String, String)>,
    pub stanzas: Vec<Stanza>,
    pub hard_failure: bool,
}

impl Report {
    fn new(task: &Task) -> Self {
        Report {
            task: task.to_string(),
            fields: Vec::new(),
            stanzas: Vec::new(),
            hard_failure: false,
        }
    }

    fn field(&mut self, k: &str, v: impl ToString) {
        self.fields.push((k.to_string(), v.to_string()));
    }

    /// Looks up a top-level field.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {}", self.task)?;
        for (k, v) in &self.fields {
            writeln!(f, "{k}: {v}")?;
        }
        for s in &self.stanzas {
            writeln!(f, "-- {}", s.title)?;
            for (k, v) in &s.fields {
                writeln!(f, "{k}: {v}")?;
            }
        }
        Ok(())
    }
}

fn list(xs: &[BigInt]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

struct Ctx<'a> {
    file: &'a ProblemFile,
    task: &'a Task,
}

impl<'a> Ctx<'a> {
    fn usage(&self, message: impl Into<String>) -> TaskError {
        TaskError::Usage {
            line: self.task.line,
            message: message.into(),
        }
    }

    fn arity(&self, min: usize, max: Option<usize>, shape: &str) -> Result<(), TaskError> {
        let n = self.task.args.len();
        if n < min || max.is_some_and(|m| n > m) {
            return Err(self.usage(format!("usage: task {} {shape}", self.task.command)));
        }
        Ok(())
    }

    fn morphism(&self, name: &str) -> Result<&'a SchemeMorphism, TaskError> {
        self.file
            .morphisms
            .get(name)
            .ok_or_else(|| self.usage(format!("unknown morphism {name}")))
    }

    fn point(&self, name: &str) -> Result<&'a SchemePoint, TaskError> {
        self.file
            .points
            .get(name)
            .ok_or_else(|| self.usage(format!("unknown point {name}")))
    }

    fn cycle(&self, name: &str) -> Result<Cycle, TaskError> {
        match self.file.cycle_like(name) {
            Some(c) => Ok(c?),
            None => Err(self.usage(format!("unknown cycle, point or subscheme {name}"))),
        }
    }

    fn points(&self, names: &[String]) -> Result<Vec<SchemePoint>, TaskError> {
        names.iter().map(|n| self.point(n).cloned()).collect()
    }

    fn describe(&self, r: &mut Report, m: &SchemeMorphism) {
        let props: Vec<&str> = m.asserted().iter().map(|p| p.name()).collect();
        let props = if props.is_empty() { "none".to_string() } else { props.join(", ") };
        r.field(
            &format!("morphism {}", m.name()),
            format!("{} -> {}; asserts {props}", m.source().name(), m.target().name()),
        );
    }

    fn point_title(&self, y: &SchemePoint) -> String {
        match self.file.point_name(y) {
            Some(n) => format!("point {n} {y}"),
            None => format!("point {y}"),
        }
    }
}

/// Runs one task of a parsed file.
pub fn run_task(file: &ProblemFile, task: &Task) -> Result<Report, TaskError> {
    let ctx = Ctx { file, task };
    let args = &task.args;
    let mut r = Report::new(task);
    match task.command.as_str() {
        "cycl" => {
            ctx.arity(1, Some(1), "SUBSCHEME")?;
            let z = file
                .subschemes
                .get(&args[0])
                .ok_or_else(|| ctx.usage(format!("unknown subscheme {}", args[0])))?;
            r.field("scheme", z.ambient().name());
            r.field("result", cycl(z)?);
        }
        "pullback" => {
            ctx.arity(2, None, "MORPHISM... CYCLE")?;
            let (maps, c) = args.split_at(args.len() - 1);
            let mut cur = ctx.cycle(&c[0])?;
            for name in maps.iter().rev() {
                let m = ctx.morphism(name)?;
                ctx.describe(&mut r, m);
                cur = naive_pullback(m, &cur)?;
            }
            r.field("scheme", cur.scheme().name());
            r.field("result", cur);
        }
        "preimage" => {
            ctx.arity(2, Some(2), "MORPHISM SUBSCHEME")?;
            let m = ctx.morphism(&args[0])?;
            let z = file
                .subschemes
                .get(&args[1])
                .ok_or_else(|| ctx.usage(format!("unknown subscheme {}", args[1])))?;
            ctx.describe(&mut r, m);
            r.field("result", cycl(&preimage_subscheme(m, z)?)?);
        }
        "pushforward" => {
            ctx.arity(2, Some(2), "MORPHISM CYCLE")?;
            let m = ctx.morphism(&args[0])?;
            ctx.describe(&mut r, m);
            r.field("result", pushforward_closed(m, &ctx.cycle(&args[1])?)?);
        }
        "defect" => {
            ctx.arity(2, Some(2), "MORPHISM CYCLE")?;
            let m = ctx.morphism(&args[0])?;
            ctx.describe(&mut r, m);
            let p = DescentProblem::new(m.clone(), Vec::new())?;
            let c = ctx.cycle(&args[1])?;
            let d = p.descent_defect(&c)?;
            r.field("pr1_pullback", p.pr1_pullback(&c)?);
            r.field("pr2_pullback", p.pr2_pullback(&c)?);
            r.field("defect", &d);
            r.field("descent_datum", yes(d.is_zero()));
        }
        "gy" | "gres" => {
            ctx.arity(2, Some(2), "MORPHISM POINT")?;
            let m = ctx.morphism(&args[0])?;
            ctx.describe(&mut r, m);
            let y = ctx.point(&args[1])?;
            let p = DescentProblem::new(m.clone(), vec![y.clone()])?;
            let mut fiber = Vec::new();
            for (x, k, over) in p.fiber(y)? {
                fiber.push(format!("{k}*{x}{}", if over { "" } else { " (not over y)" }));
            }
            r.field("fiber", if fiber.is_empty() { "empty".into() } else { fiber.join(", ") });
            if task.command == "gy" {
                r.field("g_y", p.g_y(y)?);
            } else {
                r.field("g_res_y", p.g_res(y)?);
            }
        }
        "gscope" => {
            ctx.arity(2, None, "MORPHISM POINT...")?;
            let m = ctx.morphism(&args[0])?;
            ctx.describe(&mut r, m);
            let p = DescentProblem::new(m.clone(), ctx.points(&args[1..])?)?;
            r.field("g_scope", p.g_scope()?);
            let surjective = p.scope().iter().map(|y| p.is_surjective_at(y)).collect::<Result<Vec<_>, _>>()?;
            if surjective.iter().all(|b| *b) {
                r.field("pi_res_scope", p.pi_res_scope()?);
            } else {
                r.field("pi_res_scope", "undefined (empty fiber in scope)");
            }
        }
        "order" => {
            ctx.arity(2, None, "MORPHISM CYCLE [POINT...]")?;
            let m = ctx.morphism(&args[0])?;
            ctx.describe(&mut r, m);
            let p = DescentProblem::new(m.clone(), ctx.points(&args[2..])?)?;
            match p.effective_order(&ctx.cycle(&args[1])?)? {
                Some((k, w)) => {
                    r.field("order", k);
                    r.field("witness", w);
                }
                None => r.field("order", "none"),
            }
        }
        "hlocal" => {
            ctx.arity(2, Some(2), "MORPHISM POINT")?;
            let m = ctx.morphism(&args[0])?;
            ctx.describe(&mut r, m);
            let y = ctx.point(&args[1])?;
            let p = DescentProblem::new(m.clone(), vec![y.clone()])?;
            let h = p.h_local(y)?;
            r.field("g_y", p.g_y(y)?);
            r.field("h_local_invariants", list(&h));
            r.field("group", describe_group(&h));
        }
        "saturation" => {
            ctx.arity(2, None, "MORPHISM POINT...")?;
            let m = ctx.morphism(&args[0])?;
            ctx.describe(&mut r, m);
            let p = DescentProblem::new(m.clone(), ctx.points(&args[1..])?)?;
            let rep = p.check_saturation()?;
            r.field("scope", format!("{} points (truncation)", p.scope().len()));
            r.field("span_rank", rep.span_rank);
            r.field("surjective_on_scope", yes(rep.surjective));
            r.field("complex_on_scope", yes(rep.complex));
            r.field("desc_saturated", yes(rep.desc_saturated));
            r.field("eff_desc_saturated", yes(rep.eff_saturated));
            r.field("eff_desc_quotient", describe_group(&rep.eff_invariants));
            r.field("g_scope", &rep.g_scope);
            if let Some(pi) = &rep.pi_res_scope {
                r.field("pi_res_scope", pi);
            }
            r.field(
                "violations",
                if rep.violations.is_empty() { "none".to_string() } else { rep.violations.join("; ") },
            );
            r.hard_failure = !rep.violations.is_empty();
            for s in &rep.points {
                let mut fields = vec![("g_y".to_string(), s.g_y.to_string())];
                fields.push((
                    "g_res_y".into(),
                    s.g_res.as_ref().map_or("undefined (empty fiber)".into(), |g| g.to_string()),
                ));
                fields.push((
                    "h_local_invariants".into(),
                    s.h_local.as_ref().map_or("n/a (not universally generalizing)".into(), |h| list(h)),
                ));
                fields.push(("complex".into(), yes(s.complex_at_point).into()));
                r.stanzas.push(Stanza {
                    title: ctx.point_title(&s.point),
                    fields,
                });
            }
        }
        "grade" => {
            ctx.arity(1, Some(1), "CYCLE")?;
            let c = ctx.cycle(&args[0])?;
            r.field("scheme", c.scheme().name());
            for (codim, part) in grade(&c)? {
                r.field(&format!("codim {codim}"), part);
            }
        }
        other => {
            return Err(ctx.usage(format!("unknown task '{other}'; expected one of {}", COMMANDS.join(", "))));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> Vec<Report> {
        let p = ProblemFile::parse(text).unwrap();
        p.tasks.iter().map(|t| run_task(&p, t).unwrap()).collect()
    }

    #[test]
    fn cusp_chain() {
        let reports = run("\
field Q
ring A vars t
ring B vars a b
ring C vars s
scheme X piece P ring A ideal 0
scheme Y piece P ring B ideal b^2 - a^3
scheme Z piece P ring C ideal 0
morphism f X -> Y piece P->P map a=t^2, b=t^3 assert universally_bijective
morphism g Y -> Z piece P->P map s=a assert flat
compose gf g f
point z0 scheme Z piece P prime s
task pullback g z0
task pullback f g z0
task pullback gf z0
");
        assert_eq!(reports[0].get("result"), Some("2*[piece=P; (a, b)]"));
        assert_eq!(reports[1].get("result"), Some("4*[piece=P; (t)]"));
        assert_eq!(reports[2].get("result"), Some("2*[piece=P; (t)]"));
        assert!(reports[1].to_string().contains("asserts universally_bijective"));
    }

    #[test]
    fn hlocal_and_exit_codes() {
        let text = "\
field Q
ring R vars t x
ring S vars t
scheme X piece P ring R ideal x^3 - t
scheme Y piece P ring S ideal 0
morphism f X -> Y piece P->P map t=t assert flat,surjective
point y0 scheme Y piece P prime t
task hlocal f y0
task frobnicate f
";
        let p = ProblemFile::parse(text).unwrap();
        let e = run_task(&p, &p.tasks[0]).unwrap_err();
        assert_eq!(task_exit_code(&e), 30);
        assert_eq!(task_exit_code(&run_task(&p, &p.tasks[1]).unwrap_err()), 13);
    }
}
