//! Sampled-evidence certificates and their JSON shape.

use serde::Serialize;

use crate::scalar::Scalar;

/// Stamped on every certificate.
pub const NOTE_SAMPLED: &str = "sampled evidence: residuals are measured at finitely many seeded samples, not proven";
/// Stamped on certificates for fields built from user expressions.
pub const NOTE_SMOOTHNESS: &str =
    "smoothness of the field on m minus the origin is not checked (e.g. abs() may be nonsmooth on a null set)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// One evaluated sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRecord<T> {
    pub y: Vec<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<T>,
    /// Group element in h-exponential coordinates, when the check used one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl<T> SampleRecord<T> {
    pub fn ok(y: Vec<T>, residual: T) -> Self {
        Self {
            y,
            residual: Some(residual),
            g: None,
            error: None,
        }
    }

    pub fn failed(y: Vec<T>, error: String) -> Self {
        Self {
            y,
            residual: None,
            g: None,
            error: Some(error),
        }
    }
}

/// Result of a sampled property check on a spray field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCertificate<T> {
    pub property: String,
    pub verdict: Verdict,
    pub seed: u64,
    pub tolerance: T,
    pub max_residual: T,
    pub samples: Vec<SampleRecord<T>>,
    pub notes: Vec<String>,
}

impl<T: Scalar> PropertyCertificate<T> {
    /// Assembles the certificate: inconclusive if any sample failed to
    /// evaluate, otherwise pass iff the max residual is within tolerance.
    pub fn from_records(
        property: &str,
        seed: u64,
        tolerance: T,
        samples: Vec<SampleRecord<T>>,
        notes: Vec<String>,
    ) -> Self {
        let max_residual =
            samples
                .iter()
                .filter_map(|s| s.residual)
                .fold(T::zero(), |a, r| if r > a || r.is_nan() { r } else { a });
        let verdict = if samples.iter().any(|s| s.error.is_some()) {
            Verdict::Inconclusive
        } else if max_residual <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            property: property.to_string(),
            verdict,
            seed,
            tolerance,
            max_residual,
            samples,
            notes,
        }
    }
}
