//! Elliptic curves and genus-2 Jacobians over finite fields.

pub mod count;
mod elliptic;
mod jacobian;
mod torsion;

pub use elliptic::{EcPoint, EllipticCurve};
pub use jacobian::{Genus2Curve, Jacobian, MumfordDivisor};
pub use torsion::{companion_order, torsion_degree, TorsionBasis};
