//! The typed-STRIPS PDDL subset, plus trace files.

pub mod domain;
pub mod problem;
pub mod sexpr;
pub mod trace;

pub use domain::{parse_domain, parse_domain_with, print_domain};
pub use problem::{parse_problem, print_problem, NamedAtom, ProblemInstance};
pub use trace::{read_trace, read_trace_in, state_text, write_trace};
