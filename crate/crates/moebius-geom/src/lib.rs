//! Moebius-geometric invariants of umbilic-free Euclidean hypersurfaces.
//!
//! The crate evaluates immersions through exact truncated Taylor arithmetic
//! ([`jet`]), derives first- and second-fundamental data ([`hypersurface`]),
//! builds the conformally invariant metric, shape operator, Blaschke tensor
//! and Moebius form ([`moebius`]), maps hypersurfaces to sphere congruences in
//! the Lorentzian light-cone model ([`lorentz`], [`congruence`]), and checks
//! the structures that govern Moebius bendability: flat bilinear forms,
//! splitting tensors, and associated families ([`deform`]). A small gallery of
//! closed-form hypersurfaces ([`gallery`]) anchors every check to values that
//! can be verified by hand.

pub mod congruence;
pub mod deform;
pub mod error;
pub mod gallery;
pub mod hypersurface;
pub mod jet;
pub mod linalg;
pub mod lorentz;
pub mod moebius;

pub use error::{GeomError, Result};
pub use jet::Jet;
