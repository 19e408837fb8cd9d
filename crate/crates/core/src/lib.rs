//! Exact counting of disjoint-union structure in set families, additive
//! energy on the Boolean cube, and a small numerical lab for the scalar
//! inequalities that govern both.
//!
//! The crate is organized around three data types:
//!
//! * [`SetFamily`]: a deduplicated, canonically ordered family of clusters
//!   (bitmasks over a compressed cell universe).
//! * [`CubeSet`]: a sorted set of points of `{0,1}^n`.
//! * [`CubeFunction`]: a dense nonnegative function on `{0,1}^n`.
//!
//! All counters are exact (`u128`); bounds are evaluated in `f64` and every
//! comparison against a float bound carries an explicit documented slack.

pub mod counting;
pub mod energy;
pub mod family;
pub mod lab;
pub mod sample;

pub use counting::{CountError, CountReport, KFoldReport, TripartiteReport};
pub use energy::{CrossCheck, CubeSet, EnergyError, EnergyReport, EnergySplit, FourFamilyCount};
pub use family::{Cluster, FamilyError, InputFormat, ParseOptions, ParseOutcome, SetFamily};
pub use lab::{CubeFunction, Exponents, LabError};

pub(crate) mod serde_u128 {
    //! Serialize exact counters as decimal strings so that JSON consumers
    //! never round them through a double.
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }
}
