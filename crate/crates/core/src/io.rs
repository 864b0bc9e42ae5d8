// SPDX-License-Identifier: Apache-2.0

//! JSON interchange types. Complex entries are `[re, im]` pairs, matrices are
//! lists of rows.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<[f64; 2]>>);

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        MatrixJson(
            (0..m.rows())
                .map(|r| (0..m.cols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                .collect(),
        )
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let rows: Vec<Vec<C64>> = self
            .0
            .iter()
            .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
            .collect();
        if rows.is_empty() {
            return Err(Error::Dimension("empty matrix".into()));
        }
        ComplexMatrix::from_rows(&rows)
    }
}

pub fn vector_to_json(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}
