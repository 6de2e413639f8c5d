//! Graph products of cyclic groups over Baire space.
//!
//! The crate covers the word problem for `G(Γ, 𝔭)` when `Γ` is a closed graph
//! on eventually constant points of `ω^ω`, the left-invariant group
//! ultrametric obtained from the truncation quotients `G_n`, and the
//! conversion of a finite metric graph into a colored graph on Baire space.
//!
//! With the default `parallel` feature the property suites in [`check`] fan
//! out over rayon; without it they run sequentially with identical results.

pub mod baire;
pub mod check;
pub mod embed;
pub mod error;
pub mod exec;
pub mod graphspec;
pub mod oracle;
pub mod ultranorm;
pub mod words;

pub use baire::{Prefix, UltraValue, VertexPath};
pub use error::{Error, Result};
pub use graphspec::{Coloring, EdgeOracle, GraphInstance, Order};
pub use words::{canonical, equal, reduce, NormalForm, Presentation, Syllable, Word};
