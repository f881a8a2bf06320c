//! Convex domains, boundary distance, local frames and convexity
//! certificates.

mod certificates;
mod domain;
mod frame;
pub mod sampling;

pub use certificates::{
    certify_a_eta, certify_a_eta_all, sphere_conditions, AEtaCertificate, CertStatus, SphereCertificate,
    SphereWitness,
};
pub use domain::{BallSpec, ConvexDomain, HalfSpaceSpec, Point, Shape};
pub use frame::{local_frame_at, LocalFrame};
