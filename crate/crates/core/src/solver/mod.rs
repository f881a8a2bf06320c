//! Planar monotone wide-stencil solver for `det D^2 u = F(x, u)` with zero
//! boundary values, and a radial shooting oracle on balls.

mod fixed;
mod grid;
mod radial;
mod scheme;
mod singular;

pub use fixed::{operator_residual, solve_fixed_from, solve_fixed_rhs, DiscreteSolution, FixedOptions, Sweep};
pub use grid::{discretize_domain, stencil, Grid2D, Link};
pub use scheme::{local_solve, ma_operator, min_second_difference, pair_root, second_difference, split_difference};
pub use radial::{radial_solve, radial_solve_law, RadialOptions, RadialProfile};
pub use singular::{default_floors, solve_singular, solve_singular_from, SingularOptions};
