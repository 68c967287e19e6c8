//! Numerical tools for length bounds of closed geodesics with few
//! self-intersections on hyperbolic surfaces.
//!
//! * [`hyp2`]: isometries and geodesics of the upper half-plane.
//! * [`collar`]: collar widths about short geodesics.
//! * [`pants`]: lengths of `Γ_{m,n}` curves in pairs of pants.
//! * [`winding`]: arc length against winding number in collars and cusps.
//! * [`verifier`]: checks of the analytic inequality chains.
//! * [`enumerator`]: length spectrum and self-intersection counts on the
//!   thrice-punctured sphere.
//! * [`report`]: structured pass/fail reports.

pub mod collar;
pub mod enumerator;
pub mod hyp2;
pub mod pants;
pub mod report;
pub mod verifier;
pub mod winding;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
