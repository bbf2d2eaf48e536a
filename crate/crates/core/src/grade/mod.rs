//! Gradient-descent design of relocation probability distributions.

mod descent;
mod dist;
mod forecast;
mod objective;

pub use descent::{grade_1d, md_grade, GradeConfig, GradeOutcome, GradeStatus};
pub use dist::{force, ProbDistMatrix};
pub use forecast::{forecast, Forecast};
pub use objective::{
    cycle6_weight, gradient_n6, gradient_n8, objective_gradient, objective_n6, objective_n8, objective_value,
    Cycle8Weights, Objective,
};
