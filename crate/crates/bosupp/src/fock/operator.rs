use super::space::CompositeSpace;
use super::{CMatrix, CVector, C64};
use crate::error::{Error, Result};

/// Dense operator on a (composite) truncated space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    space: CompositeSpace,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(space: impl Into<CompositeSpace>, matrix: CMatrix) -> Result<Self> {
        let space = space.into();
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::Dimension(format!(
                "matrix is {}x{}, space dimension is {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator entry".into()));
        }
        Ok(Self { space, matrix })
    }

    pub(crate) fn new_unchecked(space: CompositeSpace, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim());
        Self { space, matrix }
    }

    pub fn identity(space: impl Into<CompositeSpace>) -> Self {
        let space = space.into();
        let d = space.dim();
        Self {
            space,
            matrix: CMatrix::identity(d, d),
        }
    }

    pub fn zeros(space: impl Into<CompositeSpace>) -> Self {
        let space = space.into();
        let d = space.dim();
        Self {
            space,
            matrix: CMatrix::zeros(d, d),
        }
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.space != other.space {
            return Err(Error::Dimension(format!(
                "operator spaces differ: {:?} vs {:?}",
                self.space.factor_dims(),
                other.space.factor_dims()
            )));
        }
        Ok(())
    }

    /// Operator product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * s,
        }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn apply(&self, ket: &CVector) -> Result<CVector> {
        if ket.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "ket length {} vs operator dimension {}",
                ket.len(),
                self.dim()
            )));
        }
        Ok(&self.matrix * ket)
    }

    /// `⟨bra|self|ket⟩`.
    pub fn braket(&self, bra: &CVector, ket: &CVector) -> Result<C64> {
        let v = self.apply(ket)?;
        Ok(bra.dotc(&v))
    }

    /// Largest entry of `|self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(max_abs(&(&self.matrix - &other.matrix)))
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}
