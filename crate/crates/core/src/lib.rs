//! Combinatorial core of Kac-Moody masure theory at desk scale.
//!
//! The crate provides, over exact rational arithmetic:
//!
//! - root generating systems and coweight lattice arithmetic ([`rootdata`]);
//! - the Weyl group action, real-root enumeration and dominant
//!   representatives ([`weylgeom`]);
//! - the finite monoid basis of the dominant coweights `Y^{++}`
//!   ([`coweight_monoid`]);
//! - lambda-paths with Hecke chain certificates, path enumeration by
//!   folding, and the associated deficit/threshold arithmetic
//!   ([`hecke_paths`]);
//! - an exact rank-one masure oracle — the `(q+1)`-regular tree with a
//!   marked apartment — with retractions, vectorial distance, spheres and
//!   bi-retraction fiber counts, plus products of two such oracles
//!   ([`tree_masure`]);
//! - truncated coweight series with Laurent-polynomial coefficients in
//!   `q`, both sides of the Gindikin-Karpelevich identity, and exact
//!   comparison ([`gk_series`]).
//!
//! All values are immutable after construction and all operations are
//! pure functions, so everything is safe to share across threads.

pub mod coweight_monoid;
pub mod gk_series;
pub mod hecke_paths;
pub mod linalg;
pub mod rational;
pub mod rootdata;
pub mod tree_masure;
pub mod weylgeom;

pub use num;
pub use rational::Rat;
pub use rootdata::{
    CoweightVector, DominanceFlavor, KacMoodyMatrix, RootDataError, RootDatumJson,
    RootGeneratingSystem,
};
