//! Outer billiards and the integral elements of their periodic-orbit system.
//!
//! The crate is organized bottom-up:
//!
//! * [`geom`] — plane vectors and the cyclic quantities of an orbit polygon,
//! * [`rank`] — numerical rank by singular values,
//! * [`elements`] and [`variety`] — the matrix `C`, integral and convex elements,
//!   curvature recovery,
//! * [`search`] — search for convex integral elements,
//! * [`billiard`] — the outer billiard map and periodic orbits,
//! * [`lab`] — samplers of `(n, m)` orbit polygons and the verifiers built on them.
//!
//! A guide with worked examples lives in `book/` at the repository root.

pub mod billiard;
pub mod config;
pub mod elements;
pub mod error;
pub mod geom;
pub mod lab;
mod lm;
pub mod rank;
pub mod search;
pub mod seeds;
pub mod variety;

pub use config::Tolerances;
pub use elements::{
    build_matrix_c, check_element, classify_paradoxical, curvature_from_element,
    element_from_curvature, is_convex_element, is_integral_element, special_element_minus,
    special_element_plus, Curvature, CurvatureProfile, CyclicMatrixC, IntegralElement,
};
pub use error::{Error, Result};
pub use geom::{det2, inner2, OrbitPolygon, PlanePoint, PlaneVector, Vec2};
pub use rank::{numerical_rank, RankTolerance};
pub use variety::{variety_equations_n4, variety_equations_n5, variety_equations_n6};
pub use billiard::{iterate, orbit_polygon, outer_map, ConvexCurve, OrbitRecord};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/orbit-polygons.md")]
    struct OrbitPolygons;
    #[doc = include_str!("../../../book/src/integral-elements.md")]
    struct IntegralElements;
    #[doc = include_str!("../../../book/src/convex-elements.md")]
    struct ConvexElements;
    #[doc = include_str!("../../../book/src/billiard.md")]
    struct Billiard;
    #[doc = include_str!("../../../book/src/search-lab.md")]
    struct SearchLab;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
    #[doc = include_str!("../../../README.md")]
    struct Readme;
}
