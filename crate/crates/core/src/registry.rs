//! Built-in example models, as configs.

use crate::config::{
    AlgebraConfig, BasePointValue, ChartConfig, Config, DecompositionConfig, EtaConfig, MatrixValue, Numerics,
    RepresentationConfig,
};
use crate::lie::{BasePoint, MatrixRep};
use crate::local::PointMap;

pub const NAMES: [&str; 6] = [
    "so3_group",
    "so3_sphere_zero_eta",
    "so3_sphere_radial_eta",
    "so3_sphere_tangential_eta",
    "su2_group",
    "sphere_chart",
];

pub const SPHERE_CHART_COEFFICIENTS: [&str; 2] = ["-0.5*sin(x1)*cos(x1)*y2^2", "cos(x1)/sin(x1)*y1*y2"];

fn so3_algebra() -> AlgebraConfig {
    AlgebraConfig {
        dim: 3,
        structure_constants: vec![(1, 2, 3, 1.0), (2, 3, 1, 1.0), (3, 1, 2, 1.0)],
        labels: None,
    }
}

fn generators(rep: &MatrixRep<f64>) -> Vec<MatrixValue> {
    rep.generators().iter().map(MatrixValue::from_matrix).collect()
}

fn identity_rows(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

fn group(name: &str, description: &str, rep: MatrixRep<f64>) -> Config {
    let n = rep.size();
    Config {
        name: Some(name.into()),
        description: Some(description.into()),
        algebra: so3_algebra(),
        representation: RepresentationConfig {
            size: n,
            generators: generators(&rep),
            base_point: BasePointValue::Matrix(identity_rows(n)),
        },
        decomposition: DecompositionConfig {
            h_indices: vec![],
            m_indices: vec![1, 2, 3],
        },
        eta: EtaConfig::Zero,
        numerics: Numerics {
            y0: Some(vec![1.0, 0.5, -0.25]),
            ..Numerics::default()
        },
        chart: None,
    }
}

fn sphere(name: &str, description: &str, eta: EtaConfig) -> Config {
    let rep = MatrixRep::<f64>::so3_defining(BasePoint::Vector(vec![0.0, 0.0, 1.0]));
    Config {
        name: Some(name.into()),
        description: Some(description.into()),
        algebra: so3_algebra(),
        representation: RepresentationConfig {
            size: 3,
            generators: generators(&rep),
            base_point: BasePointValue::Vector(vec![0.0, 0.0, 1.0]),
        },
        decomposition: DecompositionConfig {
            h_indices: vec![3],
            m_indices: vec![1, 2],
        },
        eta,
        numerics: Numerics {
            y0: Some(vec![1.0, 0.0]),
            ..Numerics::default()
        },
        chart: None,
    }
}

/// The named example, if it exists.
pub fn get(name: &str) -> Option<Config> {
    let strings = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
    Some(match name {
        "so3_group" => group(
            name,
            "SO(3)/{e} with eta = 0: geodesic orbit, not weakly symmetric",
            MatrixRep::so3_defining(BasePoint::Matrix(crate::linalg::Matrix::identity(3))),
        ),
        "su2_group" => group(
            name,
            "SU(2)/{e} with eta = 0, defining representation realified to 4x4 real matrices",
            MatrixRep::su2_realified(),
        ),
        "so3_sphere_zero_eta" => sphere(
            name,
            "SO(3)/SO(2) (round 2-sphere) with eta = 0: weakly symmetric and geodesic orbit",
            EtaConfig::Zero,
        ),
        "so3_sphere_radial_eta" => sphere(
            name,
            "SO(3)/SO(2) with eta(y) = |y| y: equivariant, not geodesic orbit, not even",
            EtaConfig::Components {
                components: strings(&["norm()*y1", "norm()*y2"]),
            },
        ),
        "so3_sphere_tangential_eta" => sphere(
            name,
            "SO(3)/SO(2) with eta(y) = |y| [e3, y]: geodesic orbit with witness |y| e3, not even",
            EtaConfig::BracketForm {
                coefficients: strings(&["norm()"]),
            },
        ),
        "sphere_chart" => Config {
            chart: Some(ChartConfig {
                point_map: PointMap::SpherePolarAxis1.name().into(),
                coefficients: strings(&SPHERE_CHART_COEFFICIENTS),
            }),
            ..sphere(
                name,
                "SO(3)/SO(2) with eta = 0 and the round-sphere chart (theta from the first axis, phi in the 2-3 plane)",
                EtaConfig::Zero,
            )
        },
        _ => return None,
    })
}

/// All examples in registry order.
pub fn all() -> Vec<Config> {
    NAMES.iter().map(|n| get(n).expect("registered")).collect()
}
