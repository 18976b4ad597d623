//! G-concurrence of assistance, bounds on the G-concurrence of mixed states,
//! and numerical checks of the assistance inequalities.

mod bounds;
mod locc;
mod monogamy;
mod optimize;
mod swap;

pub use bounds::{diagonal_sum, gc_bounds, gcoa_ceiling, gcoa_from_diag, BoundsReport};
pub use locc::{locc_assist_check, AssistReport};
pub use monogamy::{monogamy_sample, monogamy_terms, Bracket, MonogamyReport, MonogamyTerms, Tally, Verdict};
pub use optimize::{optimize_avg_g, Direction, OptimizerOutcome};
pub use swap::{swap_bound, SwapReport};

pub use crate::search::OptimizerConfig;
