//! Rational points on `y² = x³ + ax + b` specialized into ideal classes of
//! real quadratic fields `ℚ(√(p³ + ap + b))`.
//!
//! * [`arith`]: primality, factorization, modular inverses.
//! * [`elliptic`]: the group law over ℚ and torsion detection.
//! * [`quadforms`]: indefinite binary quadratic forms and class groups.
//! * [`quadorder`]: ideals of `ℤ[√d]` and their images in the maximal order.
//! * [`specialize`]: the point-to-ideal map at a single prime.
//! * [`scan`]: running the map over a range of primes.

pub mod arith;
pub mod elliptic;
pub mod quadforms;
pub mod quadorder;
pub mod scan;
pub mod specialize;

pub use elliptic::{CanonicalPoint, Curve, Point};
pub use quadforms::{ClassGroup, ClassNumber, Discriminant, QuadForm};
pub use quadorder::{FieldData, QuadIdeal};
pub use scan::{scan, ScanOptions, ScanReport, ScanRow, ScanSummary};
pub use specialize::{
    class_verdict, homomorphism_check, specialize_point, ClassVerdict, SpecStatus,
    SpecializationResult, SpecializeOptions,
};
