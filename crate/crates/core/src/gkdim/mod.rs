//! Gelfand-Kirillov dimension of the modules: span-closure growth, degree
//! estimation and the lower-bound certificates.

pub mod degree;
pub mod hitting;
pub mod lemmas;
pub mod report;
pub mod span;

pub use degree::{binomial_lower_bound, estimate_degree, power_upper_bound, DegreeEstimate, DegreeMethod};
pub use hitting::{hitting_polynomials, hitting_polynomials_with, Certificate, HittingPolynomial, SigmaConvention};
pub use report::{gk_report, quotient_rows, GrowthConfig, GrowthReport};
pub use span::{generator_entries, span_closure, Grading, SpanClosure};
