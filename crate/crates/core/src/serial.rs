//! Wire formats: complex numbers are `[re, im]` pairs, matrices are
//! row-major arrays of rows.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{QbcError, Result};
use crate::qcore::{CMatrix, CVector, DensityOperator, StateVector, UnitaryOperator, C64};

pub type ComplexPair = [f64; 2];

pub fn pair(z: C64) -> ComplexPair {
    [z.re, z.im]
}

pub fn vector_pairs(v: &CVector) -> Vec<ComplexPair> {
    v.iter().copied().map(pair).collect()
}

pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<ComplexPair>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect()).collect()
}

pub fn vector_from_pairs(pairs: &[ComplexPair]) -> CVector {
    CVector::from_iterator(pairs.len(), pairs.iter().map(|p| C64::new(p[0], p[1])))
}

pub fn matrix_from_rows(rows: &[Vec<ComplexPair>]) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(QbcError::Parse(format!("ragged matrix: row of length {} among rows of length {m}", bad.len())));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("StateVector", 2)?;
        s.serialize_field("dims", self.dims())?;
        s.serialize_field("amplitudes", &vector_pairs(self.amplitudes()))?;
        s.end()
    }
}

impl Serialize for UnitaryOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("UnitaryOperator", 2)?;
        s.serialize_field("dim", &self.dim())?;
        s.serialize_field("matrix", &matrix_rows(self.matrix()))?;
        s.end()
    }
}

impl Serialize for DensityOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DensityOperator", 2)?;
        s.serialize_field("dim", &self.dim())?;
        s.serialize_field("matrix", &matrix_rows(self.matrix()))?;
        s.end()
    }
}
