//! Words in `BS(p, q)`, Britton reduction, and automorphism checks.
mod auto;
mod britton;
mod presentation;
mod search;
mod word;

pub use auto::AutomorphismSpec;
pub use britton::{BsGroup, PinchOrder};
pub use presentation::{verify_presentation, PresentationReport, RelationCheck};
pub use search::{bounded_inner_search, scan_power_of_x_conjugators, solve_inner};
pub use word::{GroupWord, WordParseError};
