//! Symbolic substrate: subshifts of finite type, words and cylinders, periodic-point
//! enumeration, Birkhoff sums, and locally constant potentials.

pub mod birkhoff;
pub mod error;
pub mod fix;
pub mod potential;
pub mod shift;
pub mod word;

pub use birkhoff::{birkhoff_sum, cylinder_hits};
pub use error::{Result, SymbolicError};
pub use fix::{enumerate_fix, enumerate_orbits, for_each_fix, FixIter, OrbitClass};
pub use potential::{discretize, Discretization, LocallyConstantPotential};
pub use shift::{default_period_cap, ShiftSpec, Symbol};
pub use word::{minimal_period, PeriodicWord, Word};
