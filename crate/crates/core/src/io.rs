//! JSON files for subspaces and single matrices.
//!
//! Entries are `[re, im]` pairs, matrices are arrays of rows.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cf64, Real};
use crate::subspace::{Field, Mat, MatrixSubspace, Tolerances};

pub type Rows = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceFile {
    pub n: usize,
    pub field: Field,
    pub basis: Vec<Rows>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Rows,
}

fn parse<D: DeserializeOwned>(text: &str) -> Result<D> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path.is_empty() || path == "." {
            Error::Parse(inner.to_string())
        } else {
            Error::Parse(format!("at `{path}`: {inner}"))
        }
    })
}

fn rows_of<T: Real>(m: &Mat<T>) -> Rows {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| {
                    let z = m[(i, j)];
                    [z.re.to_f64_lossy(), z.im.to_f64_lossy()]
                })
                .collect()
        })
        .collect()
}

fn mat_of<T: Real>(rows: &Rows, n: usize, path: &str) -> Result<Mat<T>> {
    if rows.len() != n {
        return Err(Error::Parse(format!(
            "at `{path}`: expected {n} rows, found {}",
            rows.len()
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Parse(format!(
                "at `{path}[{i}]`: expected {n} entries, found {}",
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|z| !z[0].is_finite() || !z[1].is_finite()) {
            return Err(Error::Parse(format!("at `{path}[{i}][{j}]`: non-finite entry")));
        }
    }
    Ok(Mat::from_fn(n, n, |i, j| cf64(rows[i][j][0], rows[i][j][1])))
}

impl SubspaceFile {
    pub fn from_subspace<T: Real>(s: &MatrixSubspace<T>) -> Self {
        Self {
            n: s.n(),
            field: s.field(),
            basis: s.raw_basis().iter().map(rows_of).collect(),
        }
    }

    pub fn from_matrices<T: Real>(n: usize, field: Field, mats: &[Mat<T>]) -> Self {
        Self {
            n,
            field,
            basis: mats.iter().map(rows_of).collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse(text)
    }

    /// Builds the subspace; an empty basis gives the zero subspace.
    pub fn to_subspace<T: Real>(&self, tols: Tolerances) -> Result<MatrixSubspace<T>> {
        if self.n == 0 {
            return Err(Error::Parse("at `n`: matrix size must be positive".into()));
        }
        let mats = self
            .basis
            .iter()
            .enumerate()
            .map(|(k, rows)| mat_of(rows, self.n, &format!("basis[{k}]")))
            .collect::<Result<Vec<Mat<T>>>>()?;
        if mats.is_empty() {
            return Ok(MatrixSubspace::zero(self.n, self.field, tols));
        }
        MatrixSubspace::from_matrices(mats, self.field, tols)
    }
}

impl MatrixFile {
    pub fn from_mat<T: Real>(m: &Mat<T>) -> Self {
        Self {
            n: m.nrows(),
            entries: rows_of(m),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse(text)
    }

    pub fn to_mat<T: Real>(&self) -> Result<Mat<T>> {
        if self.n == 0 {
            return Err(Error::Parse("at `n`: matrix size must be positive".into()));
        }
        mat_of(&self.entries, self.n, "entries")
    }
}

pub fn read_subspace<T: Real>(text: &str, tols: Tolerances) -> Result<MatrixSubspace<T>> {
    SubspaceFile::parse(text)?.to_subspace(tols)
}

pub fn read_matrix<T: Real>(text: &str) -> Result<Mat<T>> {
    MatrixFile::parse(text)?.to_mat()
}

pub fn write_subspace<T: Real>(s: &MatrixSubspace<T>) -> String {
    serde_json::to_string_pretty(&SubspaceFile::from_subspace(s)).expect("plain data serializes")
}

pub fn write_matrix<T: Real>(m: &Mat<T>) -> String {
    serde_json::to_string_pretty(&MatrixFile::from_mat(m)).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lower_triangular;
    use crate::test_util::*;

    #[test]
    fn subspace_round_trip() {
        let s = lower_triangular::<f64>(3, Field::Real, Tolerances::default());
        let text = write_subspace(&s);
        let back: MatrixSubspace<f64> = read_subspace(&text, Tolerances::default()).unwrap();
        assert_eq!(back.dim(), 6);
        assert!(back.same_span(&s));
        assert_eq!(write_subspace(&back), text);
    }

    #[test]
    fn matrix_round_trip() {
        let m = crate::subspace::random_matrix::<f64>(3, Field::Complex, 4);
        let back: Mat<f64> = read_matrix(&write_matrix(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn diagnostics_name_the_location() {
        let bad = r#"{"n": 2, "field": "real", "basis": [[[[1,0],[0,0]],[[0,0]]]]}"#;
        let e = read_subspace::<f64>(bad, Tolerances::default()).unwrap_err();
        assert_eq!(e, Error::Parse("at `basis[0][1]`: expected 2 entries, found 1".into()));

        let bad = r#"{"n": 2, "field": "quaternion", "basis": []}"#;
        let Error::Parse(msg) = read_subspace::<f64>(bad, Tolerances::default()).unwrap_err() else {
            panic!()
        };
        assert!(msg.contains("`field`") && msg.contains("line 1"), "{msg}");

        let bad = r#"{"n": 2, "field": "real", "basis": [[[[1,0],[0,"x"]],[[0,0],[1,0]]]]}"#;
        let Error::Parse(msg) = read_subspace::<f64>(bad, Tolerances::default()).unwrap_err() else {
            panic!()
        };
        assert!(msg.contains("basis[0][0][1]"), "{msg}");

        let bad = r#"{"n": 1, "entries": [[[1,0]]], "extra": 1}"#;
        assert!(matches!(read_matrix::<f64>(bad), Err(Error::Parse(_))));
    }

    #[test]
    fn real_field_rejects_imaginary_entries() {
        let text = r#"{"n": 1, "field": "real", "basis": [[[[1,0]]], [[[0,1]]]]}"#;
        assert_eq!(
            read_subspace::<f64>(text, Tolerances::default()).unwrap_err(),
            Error::RealFieldViolation { index: 1 }
        );
    }

    #[test]
    fn empty_basis_is_zero_subspace() {
        let text = r#"{"n": 2, "field": "complex", "basis": []}"#;
        assert_eq!(read_subspace::<f64>(text, Tolerances::default()).unwrap().dim(), 0);
        let m: Mat<f64> = MatrixFile::from_mat(&eye(2)).to_mat().unwrap();
        assert_eq!(m, eye(2));
    }
}
