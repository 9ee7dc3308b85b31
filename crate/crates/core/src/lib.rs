//! Exact algebraic-cycle calculus on affine schemes of finite type over Q or F_p.

pub mod cycles;
pub mod decomp;
pub mod descent;
pub mod error;
pub mod factor;
pub mod field;
pub mod gcd;
pub mod groebner;
pub mod intlat;
pub mod parse;
pub mod poly;
pub mod problem;
pub mod scheme;
pub mod tasks;

pub use cycles::{cycl, grade, naive_pullback, pushforward_closed, Cycle};
pub use decomp::{components, minimal_primes, multiplicity, point_codim, Certificate, ComponentData, PrimeIdeal};
pub use descent::{DescentProblem, FiberSquare, PointStanza, SaturationReport, SupernaturalTrunc};
pub use error::{AlgebraError, DescentError, SchemeError};
pub use factor::{factor_poly, is_irreducible, Factorization};
pub use field::{field_arith, FieldDesc, FieldElement, FieldOp, RatFun};
pub use groebner::{count_standard_monomials, groebner_basis, ideal_member, Ideal};
pub use intlat::{describe_group, is_saturated, kernel, quotient_invariants, snf, solve_integer, IntMatrix, SNFResult};
pub use parse::parse_poly;
pub use problem::{ProblemError, ProblemFile, Task};
pub use poly::{poly_arith, Monomial, MonomialOrder, PolyOp, Polynomial, Ring};
pub use tasks::{problem_exit_code, run_task, task_exit_code, Report, Stanza, TaskError, HARD_FAILURE_EXIT};
pub use scheme::{closure_of_point, fiber_product, image_point, preimage_subscheme, AffinePiece, ClosedSubscheme, PieceMap, Property, Scheme, SchemeMorphism, SchemePoint};
