//! Numerical toolkit for homogeneous spray geometry.
//!
//! A model is a Lie algebra `g` given by structure constants, a matrix
//! representation with a base point `o`, a reductive split `g = h + m` and a
//! spray vector field `η` on `m \ {0}`. Geodesics through `o` are built from
//! integral curves of `−η` ([`flow`]); the geodesic-orbit and weak-symmetry
//! properties are checked on seeded samples with explicit witnesses
//! ([`classify`]).
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.

pub mod certificate;
pub mod classify;
pub mod config;
pub mod expr;
pub mod flow;
pub mod lie;
pub mod linalg;
pub mod local;
pub mod ode;
pub mod reductive;
pub mod registry;
pub mod sampling;
pub mod scalar;
pub mod spray;

pub use certificate::{PropertyCertificate, Verdict};
pub use classify::{check_go, check_ws, go_witness, verify_theorem3, ws_search, GoVerdict, WsVerdict};
pub use config::{Config, ConfigError, Model};
pub use flow::{geodesic, homogeneous_geodesic, integrate_eta_flow, reconstruct_group_curve, verify_claim_a};
pub use lie::{AlgebraVector, BasePoint, LieAlgebra, MatrixRep};
pub use linalg::{matrix_exp, Matrix};
pub use local::{Chart, LocalSpray, PointMap};
pub use ode::IntegrationError;
pub use reductive::{MVector, ReductiveSpace};
pub use scalar::Scalar;
pub use spray::{FieldKind, SprayField};

pub type Real = f64;
pub type Algebra = LieAlgebra<f64>;
pub type Representation = MatrixRep<f64>;
pub type Space = ReductiveSpace<f64>;
pub type Field = SprayField<f64>;
pub type Vector = MVector<f64>;
pub type Trajectory = flow::Trajectory<f64>;
pub type GoCertificate = classify::GoCertificate<f64>;
pub type WsCertificate = classify::WsCertificate<f64>;
