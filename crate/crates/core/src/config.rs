//! JSON model description: algebra, representation, decomposition, field,
//! numerics and an optional chart. Indices in the file are 1-based.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::expr::{parse_with, Grammar};
use crate::lie::{
    BasePoint, LieAlgebra, MatrixRep, COORDINATE_TOLERANCE, REPRESENTATION_TOLERANCE, STABILIZER_TOLERANCE,
};
use crate::lie::{ANTISYMMETRY_TOLERANCE, JACOBI_TOLERANCE};
use crate::linalg::Matrix;
use crate::local::{Chart, LocalSpray, PointMap};
use crate::reductive::ReductiveSpace;
use crate::sampling::DEFAULT_SEED;
use crate::scalar::Scalar;
use crate::spray::SprayField;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub algebra: AlgebraConfig,
    pub representation: RepresentationConfig,
    pub decomposition: DecompositionConfig,
    pub eta: EtaConfig,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraConfig {
    pub dim: usize,
    /// `[i, j, k, value]` meaning `[e_i, e_j]` has `value` along `e_k`.
    pub structure_constants: Vec<(usize, usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// A square matrix written either as rows or as a flat row-major list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixValue {
    Flat(Vec<f64>),
    Rows(Vec<Vec<f64>>),
}

impl MatrixValue {
    fn to_matrix<T: Scalar>(&self, n: usize) -> Result<Matrix<T>, String> {
        let flat: Vec<f64> = match self {
            MatrixValue::Flat(v) => v.clone(),
            MatrixValue::Rows(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(format!("expected {n} rows of {n} entries"));
                }
                rows.concat()
            }
        };
        if flat.len() != n * n {
            return Err(format!("expected {} entries, found {}", n * n, flat.len()));
        }
        if flat.iter().any(|x| !x.is_finite()) {
            return Err("non-finite entry".into());
        }
        Ok(Matrix::from_row_major(n, n, flat.into_iter().map(T::of).collect()).expect("checked shape"))
    }

    pub fn from_matrix<T: Scalar>(m: &Matrix<T>) -> Self {
        MatrixValue::Rows(
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m[(i, j)].to_f64_lossy()).collect())
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasePointValue {
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationConfig {
    pub size: usize,
    pub generators: Vec<MatrixValue>,
    pub base_point: BasePointValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionConfig {
    pub h_indices: Vec<usize>,
    pub m_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EtaConfig {
    Zero,
    BracketForm { coefficients: Vec<String> },
    Components { components: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub step: f64,
    pub t_span: [f64; 2],
    pub samples: usize,
    pub seed: u64,
    pub restarts: usize,
    /// Default initial vector in m-coordinates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<f64>>,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            step: 1e-3,
            t_span: [0.0, 2.0],
            samples: crate::classify::DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            restarts: crate::classify::DEFAULT_RESTARTS,
            y0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartConfig {
    pub point_map: String,
    pub coefficients: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io(String),
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    Invalid(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Parse { line, column, message } => {
                write!(f, "config parse error at line {line}, column {column}: {message}")
            }
            ConfigError::Invalid(v) => {
                write!(
                    f,
                    "invalid config ({} problem{}):",
                    v.len(),
                    if v.len() == 1 { "" } else { "s" }
                )?;
                for m in v {
                    write!(f, "\n  - {m}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

/// Everything needed to run the checks and integrators on one config.
#[derive(Debug, Clone)]
pub struct Model<T> {
    pub name: Option<String>,
    pub space: Arc<ReductiveSpace<T>>,
    pub field: SprayField<T>,
    pub chart: Option<Chart>,
    pub numerics: Numerics,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Validates everything and builds the model, reporting every violation
    /// found rather than stopping at the first.
    pub fn build<T: Scalar>(&self) -> Result<Model<T>, ConfigError> {
        let mut errs = Vec::new();
        let algebra = self.build_algebra::<T>(&mut errs);
        let rep = self.build_rep::<T>(&mut errs);
        let (h, m) = self.decomposition_indices(&mut errs);
        self.check_numerics(&mut errs);

        let space = match (algebra, rep) {
            (Some(a), Some(r)) if errs.is_empty() => match ReductiveSpace::new(a, r, h, m) {
                Ok(s) => Some(Arc::new(s)),
                Err(e) => {
                    errs.push(e.to_string());
                    None
                }
            },
            _ => None,
        };
        if let Some(s) = &space {
            check_space(s, &mut errs);
        }
        let field = space.as_ref().and_then(|s| self.build_field(s, &mut errs));
        let chart = self.build_chart(&mut errs);
        match (space, field) {
            (Some(space), Some(field)) if errs.is_empty() => Ok(Model {
                name: self.name.clone(),
                space,
                field,
                chart,
                numerics: self.numerics.clone(),
            }),
            _ => Err(ConfigError::Invalid(errs)),
        }
    }

    fn build_algebra<T: Scalar>(&self, errs: &mut Vec<String>) -> Option<LieAlgebra<T>> {
        let a = &self.algebra;
        let n = a.dim;
        if n == 0 {
            errs.push("algebra.dim must be positive".into());
            return None;
        }
        let before = errs.len();
        let mut entries = Vec::with_capacity(a.structure_constants.len());
        for &(i, j, k, v) in &a.structure_constants {
            let loc = format!("structure constant [{i}, {j}, {k}]");
            if [i, j, k].iter().any(|&x| x == 0 || x > n) {
                errs.push(format!("{loc}: indices must be in 1..={n}"));
                continue;
            }
            if !v.is_finite() {
                errs.push(format!("{loc}: value is not finite"));
                continue;
            }
            if i == j && v != 0.0 {
                errs.push(format!("antisymmetry violation: c[{i}][{i}][{k}] = {v} must be 0"));
            }
            entries.push((i - 1, j - 1, k - 1, v));
        }
        for (a_idx, &(i, j, k, v)) in entries.iter().enumerate() {
            for &(i2, j2, k2, v2) in &entries[a_idx + 1..] {
                let loc = |i: usize, j: usize| format!("c[{}][{}][{}]", i + 1, j + 1, k + 1);
                if i2 == j && j2 == i && k2 == k && i != j && (v + v2).abs() > ANTISYMMETRY_TOLERANCE {
                    errs.push(format!(
                        "antisymmetry violation: {} = {v} and {} = {v2}",
                        loc(i, j),
                        loc(j, i)
                    ));
                }
                if (i2, j2, k2) == (i, j, k) && v != v2 {
                    errs.push(format!("{} given twice with different values", loc(i, j)));
                }
            }
        }
        let labels = match &a.labels {
            Some(l) if l.len() != n => {
                errs.push(format!("algebra.labels has {} entries, expected {n}", l.len()));
                return None;
            }
            Some(l) => l.clone(),
            None => (1..=n).map(|i| format!("e{i}")).collect(),
        };
        if errs.len() > before {
            return None;
        }
        let entries: Vec<_> = entries.into_iter().map(|(i, j, k, v)| (i, j, k, T::of(v))).collect();
        match LieAlgebra::from_entries(n, &entries, labels) {
            Ok(alg) => {
                let anti = alg.antisymmetry_residual().to_f64_lossy();
                if anti > ANTISYMMETRY_TOLERANCE {
                    errs.push(format!(
                        "antisymmetry residual {anti:e} exceeds {ANTISYMMETRY_TOLERANCE:e}"
                    ));
                }
                let jac = alg.jacobi_residual().to_f64_lossy();
                if jac > JACOBI_TOLERANCE {
                    errs.push(format!("Jacobi residual {jac:e} exceeds {JACOBI_TOLERANCE:e}"));
                }
                Some(alg)
            }
            Err(e) => {
                errs.push(e.to_string());
                None
            }
        }
    }

    fn build_rep<T: Scalar>(&self, errs: &mut Vec<String>) -> Option<MatrixRep<T>> {
        let r = &self.representation;
        let n = r.size;
        if n == 0 {
            errs.push("representation.size must be positive".into());
            return None;
        }
        let before = errs.len();
        if r.generators.len() != self.algebra.dim {
            errs.push(format!(
                "representation has {} generators, expected one per algebra basis vector ({})",
                r.generators.len(),
                self.algebra.dim
            ));
        }
        let generators: Vec<Matrix<T>> = r
            .generators
            .iter()
            .enumerate()
            .filter_map(|(i, g)| match g.to_matrix(n) {
                Ok(m) => Some(m),
                Err(e) => {
                    errs.push(format!("generator {}: {e}", i + 1));
                    None
                }
            })
            .collect();
        let base = match &r.base_point {
            BasePointValue::Vector(v) if v.len() == n && v.iter().all(|x| x.is_finite()) => {
                Some(BasePoint::Vector(v.iter().map(|&x| T::of(x)).collect()))
            }
            BasePointValue::Vector(v) => {
                errs.push(format!(
                    "base_point must be {n} finite numbers, found {} entries",
                    v.len()
                ));
                None
            }
            BasePointValue::Matrix(rows) => match MatrixValue::Rows(rows.clone()).to_matrix(n) {
                Ok(m) => Some(BasePoint::Matrix(m)),
                Err(e) => {
                    errs.push(format!("base_point: {e}"));
                    None
                }
            },
        };
        if errs.len() > before {
            return None;
        }
        match MatrixRep::new(n, generators, base?) {
            Ok(rep) => Some(rep),
            Err(e) => {
                errs.push(e.to_string());
                None
            }
        }
    }

    fn decomposition_indices(&self, errs: &mut Vec<String>) -> (Vec<usize>, Vec<usize>) {
        let n = self.algebra.dim;
        let convert = |name: &str, v: &[usize], errs: &mut Vec<String>| -> Vec<usize> {
            v.iter()
                .filter_map(|&i| {
                    if i == 0 || i > n {
                        errs.push(format!("decomposition.{name}: index {i} out of range 1..={n}"));
                        None
                    } else {
                        Some(i - 1)
                    }
                })
                .collect()
        };
        let h = convert("h_indices", &self.decomposition.h_indices, errs);
        let m = convert("m_indices", &self.decomposition.m_indices, errs);
        (h, m)
    }

    fn check_numerics(&self, errs: &mut Vec<String>) {
        let nu = &self.numerics;
        if !(nu.step.is_finite() && nu.step > 0.0) {
            errs.push(format!("numerics.step must be positive, found {}", nu.step));
        }
        if nu.t_span.iter().any(|t| !t.is_finite()) {
            errs.push("numerics.t_span must be finite".into());
        }
        if nu.samples == 0 {
            errs.push("numerics.samples must be at least 1".into());
        }
        if nu.restarts == 0 {
            errs.push("numerics.restarts must be at least 1".into());
        }
        if let Some(y0) = &nu.y0 {
            if y0.len() != self.decomposition.m_indices.len() {
                errs.push(format!(
                    "numerics.y0 has {} entries, expected dim m = {}",
                    y0.len(),
                    self.decomposition.m_indices.len()
                ));
            }
        }
    }

    fn build_field<T: Scalar>(&self, space: &Arc<ReductiveSpace<T>>, errs: &mut Vec<String>) -> Option<SprayField<T>> {
        let result = match &self.eta {
            EtaConfig::Zero => return Some(SprayField::zero(space.clone())),
            EtaConfig::BracketForm { coefficients } => {
                let refs: Vec<&str> = coefficients.iter().map(String::as_str).collect();
                SprayField::bracket_form(space.clone(), &refs)
            }
            EtaConfig::Components { components } => {
                let refs: Vec<&str> = components.iter().map(String::as_str).collect();
                SprayField::components(space.clone(), &refs)
            }
        };
        match result {
            Ok(f) => Some(f),
            Err(e) => {
                errs.push(format!("eta: {e}"));
                None
            }
        }
    }

    fn build_chart(&self, errs: &mut Vec<String>) -> Option<Chart> {
        let c = self.chart.as_ref()?;
        let Some(map) = PointMap::from_name(&c.point_map) else {
            errs.push(format!("chart.point_map: unknown map {:?}", c.point_map));
            return None;
        };
        let point_len = match &self.representation.base_point {
            BasePointValue::Vector(v) => v.len(),
            BasePointValue::Matrix(rows) => rows.len() * rows.first().map_or(0, Vec::len),
        };
        if point_len != map.point_dim() {
            errs.push(format!(
                "chart.point_map {} needs {}-dimensional model points, base point has {point_len}",
                map.name(),
                map.point_dim()
            ));
        }
        if c.coefficients.len() != map.chart_dim() {
            errs.push(format!(
                "chart.coefficients has {} entries, expected {}",
                c.coefficients.len(),
                map.chart_dim()
            ));
            return None;
        }
        let grammar = Grammar::chart(map.chart_dim());
        let mut exprs = Vec::new();
        for (i, src) in c.coefficients.iter().enumerate() {
            match parse_with(src, grammar) {
                Ok(e) => exprs.push(e),
                Err(e) => errs.push(format!("chart coefficient {}: {e}", i + 1)),
            }
        }
        if exprs.len() != c.coefficients.len() {
            return None;
        }
        match LocalSpray::new(map.chart_dim(), exprs) {
            Ok(spray) => Some(Chart { spray, map }),
            Err(e) => {
                errs.push(format!("chart: {e}"));
                None
            }
        }
    }
}

fn check_space<T: Scalar>(s: &ReductiveSpace<T>, errs: &mut Vec<String>) {
    let cert = s.validate_decomposition();
    if !cert.pass {
        errs.push(format!(
            "decomposition is not reductive: [h,h] residual {:e}, [h,m] residual {:e} (tolerance {:e})",
            cert.subalgebra_residual.to_f64_lossy(),
            cert.reductive_residual.to_f64_lossy(),
            cert.tolerance.to_f64_lossy()
        ));
    }
    match s.rep_residuals() {
        Ok((rep, stab)) => {
            let (rep, stab) = (rep.to_f64_lossy(), stab.to_f64_lossy());
            if rep > REPRESENTATION_TOLERANCE {
                errs.push(format!(
                    "representation residual {rep:e} exceeds {REPRESENTATION_TOLERANCE:e}: generators do not satisfy the brackets"
                ));
            }
            if stab > STABILIZER_TOLERANCE {
                errs.push(format!(
                    "stabilizer residual {stab:e} exceeds {STABILIZER_TOLERANCE:e}: h does not fix the base point"
                ));
            }
        }
        Err(e) => errs.push(format!(
            "representation check failed: {e} (coordinate tolerance {COORDINATE_TOLERANCE:e})"
        )),
    }
}
