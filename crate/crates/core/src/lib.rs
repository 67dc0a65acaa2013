//! Dihedral quandle colorings of braid-closure links and their coloring quivers.
//!
//! A braid word is closed into a link, its colorings by the dihedral quandle
//! `R_n` are counted and listed (by brute force or by Smith normal form), and
//! the endomorphisms of `R_n` turn the coloring set into a weighted quiver.
//! For torus links the counts and quivers can be checked against closed forms.
//!
//! ```
//! use quandle_quiver::{braid::TorusLinkSpec, coloring::LinearColoringSystem};
//!
//! let system = LinearColoringSystem::torus(TorusLinkSpec::new(5, 5).unwrap());
//! assert_eq!(system.count(6).unwrap(), 96);
//! ```

pub mod braid;
pub mod coloring;
pub mod counting;
pub mod error;
pub mod export;
pub mod isomorphism;
pub mod linalg;
pub mod quandle;
pub mod quiver;

pub use braid::{torus_braid, BraidWord, Letter, LinkSpec, Sign, TorusLinkSpec};
pub use coloring::{ColoringSet, LinearColoringSystem};
pub use counting::{predict_count, verify_counts, CountCase, CountPrediction, SweepGrid, SweepReport};
pub use isomorphism::{isomorphic, IsoVerdict};
pub use quandle::{affine_endomorphisms, DihedralQuandle, Endomorphism, FiniteQuandle};
pub use quiver::{build_quiver, predict_quiver, realize, QuiverForm, WeightedQuiver};
