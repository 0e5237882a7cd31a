use crate::error::{Error, Result};

/// Default number of Fock levels.
pub const DEFAULT_DIM: usize = 40;
/// Default number of top levels reserved as truncation headroom.
pub const DEFAULT_GUARD: usize = 8;
/// Maximum probability weight tolerated above the guarded subspace.
pub const LEAKAGE_TOL: f64 = 1e-6;

/// Truncated single-mode Fock space spanning `|0⟩..|dim-1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockSpace {
    dim: usize,
    guard: usize,
}

impl FockSpace {
    pub fn new(dim: usize, guard: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Parameter(format!("Fock dimension {dim} < 2")));
        }
        if guard >= dim {
            return Err(Error::Parameter(format!(
                "guard {guard} must be smaller than dimension {dim}"
            )));
        }
        Ok(Self { dim, guard })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    /// Highest representable photon number.
    pub fn n_max(&self) -> usize {
        self.dim - 1
    }

    /// Highest photon number inside the guarded (trusted) subspace.
    pub fn guarded_max(&self) -> usize {
        self.dim - 1 - self.guard
    }
}

impl Default for FockSpace {
    fn default() -> Self {
        Self {
            dim: DEFAULT_DIM,
            guard: DEFAULT_GUARD,
        }
    }
}

/// Tensor-product space. The Fock factor, when present, is always first;
/// finite-dimensional factors follow in the order they were attached.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CompositeSpace {
    fock: Option<FockSpace>,
    qudits: Vec<usize>,
}

impl CompositeSpace {
    pub fn fock(space: FockSpace) -> Self {
        Self {
            fock: Some(space),
            qudits: Vec::new(),
        }
    }

    /// Purely finite-dimensional space (qubits, qutrits, ...).
    pub fn qudits(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Dimension("empty qudit list".into()));
        }
        if let Some(d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Dimension(format!("qudit dimension {d} < 2")));
        }
        Ok(Self {
            fock: None,
            qudits: dims.to_vec(),
        })
    }

    pub fn qubit() -> Self {
        Self {
            fock: None,
            qudits: vec![2],
        }
    }

    /// Appends a finite factor of dimension `d`.
    pub fn with_ancilla(mut self, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Dimension(format!("ancilla dimension {d} < 2")));
        }
        self.qudits.push(d);
        Ok(self)
    }

    pub fn fock_space(&self) -> Option<FockSpace> {
        self.fock
    }

    /// Dimensions of the finite factors (ancillas and any extra systems).
    pub fn ancillas(&self) -> &[usize] {
        &self.qudits
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.qudits.len() + 1);
        if let Some(f) = self.fock {
            dims.push(f.dim());
        }
        dims.extend_from_slice(&self.qudits);
        dims
    }

    pub fn n_factors(&self) -> usize {
        self.qudits.len() + usize::from(self.fock.is_some())
    }

    pub fn dim(&self) -> usize {
        self.factor_dims().iter().product()
    }

    pub(crate) fn from_parts(fock: Option<FockSpace>, qudits: Vec<usize>) -> Self {
        Self { fock, qudits }
    }

    /// Subspace made of the selected factors (indices must be increasing).
    pub fn select(&self, keep: &[usize]) -> Result<Self> {
        let n = self.n_factors();
        if keep.is_empty() {
            return Err(Error::Dimension("empty factor selection".into()));
        }
        if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= n) {
            return Err(Error::Dimension(format!(
                "invalid factor selection {keep:?} for {n} factors"
            )));
        }
        let dims = self.factor_dims();
        let has_fock = self.fock.is_some();
        let fock = if has_fock && keep[0] == 0 {
            self.fock
        } else {
            None
        };
        let qudits = keep
            .iter()
            .filter(|&&k| !(has_fock && k == 0))
            .map(|&k| dims[k])
            .collect();
        Ok(Self { fock, qudits })
    }
}

impl From<FockSpace> for CompositeSpace {
    fn from(space: FockSpace) -> Self {
        Self::fock(space)
    }
}

/// Row-major mixed-radix strides for a list of factor dimensions.
pub fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for f in (0..dims.len().saturating_sub(1)).rev() {
        s[f] = s[f + 1] * dims[f + 1];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fock_space_bounds() {
        assert!(FockSpace::new(1, 0).is_err());
        assert!(FockSpace::new(10, 10).is_err());
        let s = FockSpace::new(10, 3).unwrap();
        assert_eq!(s.n_max(), 9);
        assert_eq!(s.guarded_max(), 6);
        assert_eq!(FockSpace::default().dim(), 40);
    }

    #[test]
    fn composite_dims_and_selection() {
        let s = CompositeSpace::fock(FockSpace::new(5, 1).unwrap())
            .with_ancilla(2)
            .unwrap()
            .with_ancilla(3)
            .unwrap();
        assert_eq!(s.factor_dims(), vec![5, 2, 3]);
        assert_eq!(s.dim(), 30);
        assert_eq!(strides(&s.factor_dims()), vec![6, 3, 1]);
        let q = s.select(&[1, 2]).unwrap();
        assert!(q.fock_space().is_none());
        assert_eq!(q.factor_dims(), vec![2, 3]);
        assert!(s.select(&[2, 1]).is_err());
        assert!(s.select(&[0, 3]).is_err());
    }
}
