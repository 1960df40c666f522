//! JSON state files: `{"d": 2, "matrix": [[[re, im], ...], ...]}`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::linalg::ComplexMatrix;
use crate::states::{DensityMatrix, ValidationFailure};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub d: usize,
    /// `d^2` rows of `d^2` complex entries, each `[re, im]`.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let matrix = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| [m.get(i, j).re, m.get(i, j).im]).collect())
            .collect();
        Self { d: rho.d(), matrix }
    }

    /// Validates into a state, naming the failed rule on error.
    pub fn to_density(&self) -> Result<DensityMatrix, CliError> {
        let invalid = |kind: ValidationFailure, message: String| CliError::InvalidState { kind, message };
        let n = self.d * self.d;
        if self.d < 2 || self.matrix.len() != n || self.matrix.iter().any(|r| r.len() != n) {
            return Err(invalid(
                ValidationFailure::Shape,
                format!("expected {n}x{n} matrix for d = {}", self.d),
            ));
        }
        let rows: Vec<Vec<Complex64>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        let classify = |e: crate::Error| match ValidationFailure::of(&e) {
            Some(kind) => invalid(kind, e.to_string()),
            None => CliError::Usage(e.to_string()),
        };
        let mat = ComplexMatrix::from_rows(&rows).map_err(classify)?;
        DensityMatrix::new(self.d, mat).map_err(classify)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::InvalidState {
            kind: ValidationFailure::Shape,
            message: format!("{}: {e}", path.display()),
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("plain data serializes");
        std::fs::write(path, text).map_err(|e| CliError::Write(format!("{}: {e}", path.display())))
    }
}

/// Reads and validates a state file.
pub fn load_state(path: &Path) -> Result<DensityMatrix, CliError> {
    StateFile::read(path)?.to_density()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{isotropic, random_density};

    #[test]
    fn roundtrip_through_json() {
        let rho = random_density(3, 4, 12).unwrap();
        let file = StateFile::from_density(&rho);
        let text = serde_json::to_string(&file).unwrap();
        let back: StateFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_density().unwrap(), rho);
    }

    #[test]
    fn bad_trace_is_named() {
        let mut file = StateFile::from_density(&isotropic(2, 0.0).unwrap());
        for (i, row) in file.matrix.iter_mut().enumerate() {
            row[i][0] = 0.225;
        }
        match file.to_density() {
            Err(CliError::InvalidState { kind, message }) => {
                assert_eq!(kind, ValidationFailure::Trace);
                assert!(message.contains("trace"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_shape_is_named() {
        let file = StateFile {
            d: 2,
            matrix: vec![vec![[1.0, 0.0]; 3]; 3],
        };
        assert!(matches!(
            file.to_density(),
            Err(CliError::InvalidState { kind: ValidationFailure::Shape, .. })
        ));
    }

    #[test]
    fn non_hermitian_and_not_psd_are_named() {
        let mut file = StateFile::from_density(&isotropic(2, 0.0).unwrap());
        file.matrix[0][1] = [0.1, 0.0];
        let kind = |f: &StateFile| match f.to_density() {
            Err(CliError::InvalidState { kind, .. }) => kind,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(kind(&file), ValidationFailure::NonHermitian);

        let mut file = StateFile::from_density(&isotropic(2, 0.0).unwrap());
        file.matrix[0][0] = [-0.25, 0.0];
        file.matrix[1][1] = [0.75, 0.0];
        assert_eq!(kind(&file), ValidationFailure::NotPsd);
    }
}
