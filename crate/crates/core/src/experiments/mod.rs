//! Reproducible experiments tying the operators, weights and norms together.
//! Every procedure is sequential and runs its combinations in a fixed order,
//! so identical inputs give identical reports.

pub mod annuli;
pub mod compare;
pub mod counterexample;
pub mod local;
pub mod sweep;

pub use annuli::{annuli_check, AnnuliReport, AnnulusRecord};
pub use compare::{m2_llogl_compare, multilinear_check, vector_valued_check, LloglComparison, MultilinearReport};
pub use counterexample::{lhs_closed_form, sawyer_counterexample, CounterexampleParams, CounterexampleReport};
pub use local::{lemma_local_solve, local_g};
pub use sweep::{thm2_sweep, SweepConfig, SweepReport};
