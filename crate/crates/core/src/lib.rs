//! Numerical laboratory for mixed weighted weak-type inequalities on the
//! real line: grids and step functions, exact weight sampling, discrete
//! maximal operators, weight-class constants, weak and Lorentz norms, the
//! Rubio de Francia majorant, and the experiments built from them.
//!
//! ```
//! use mixweak::norms::{weak_norm, WeightedMeasure};
//! use mixweak::{maximal, sample_weight, Grid, WeightDescriptor};
//!
//! let g = Grid::covering(-8.0, 8.0, 1.0 / 64.0, 0.0)?;
//! let f = sample_weight(&"indicator:-1,1".parse::<WeightDescriptor>()?, &g)?;
//! let w = weak_norm(&maximal(&f), 1.0, &WeightedMeasure::lebesgue(g))?;
//! assert!(w <= 2.0 * 2.0);
//! # Ok::<(), mixweak::Error>(())
//! ```

pub mod error;
pub mod experiments;
pub mod family;
pub mod grid;
pub mod maximal;
pub mod norms;
pub mod numeric;
pub mod range;
pub mod rubio;
pub mod sampling;
pub mod weights;

pub use error::{Error, Result};
pub use family::{FamilyKind, IntervalFamily};
pub use grid::{integrate, weighted_measure, Grid, StepFunction};
pub use maximal::{maximal, maximal_brute, maximal_fast, MaximalKind};
pub use sampling::{sample_weight, seeded_step_functions, WeightDescriptor};
