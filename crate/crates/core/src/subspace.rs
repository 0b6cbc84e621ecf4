//! Subspace carrier shared by the oracle and the model modules.

use nalgebra::DMatrix;

use crate::matrix::{hcat, Entry};

/// Columns spanning a subspace, with the nullspace part kept apart.
///
/// `translation` holds the operator-nullspace directions (component
/// indicators, exponentials); `basis` holds the constrained generators.
/// `certified_rank` is the numeric rank of both blocks taken together.
#[derive(Clone, Debug)]
pub struct SubspaceBasis<T: Entry> {
    pub basis: DMatrix<T>,
    pub translation: DMatrix<T>,
    pub certified_rank: usize,
}

impl<T: Entry> SubspaceBasis<T> {
    pub fn new(basis: DMatrix<T>, translation: DMatrix<T>, certified_rank: usize) -> Self {
        assert_eq!(
            basis.nrows(),
            translation.nrows(),
            "blocks must share the ambient dimension"
        );
        Self {
            basis,
            translation,
            certified_rank,
        }
    }

    /// Basis without a separate translation block.
    pub fn plain(basis: DMatrix<T>, certified_rank: usize) -> Self {
        let n = basis.nrows();
        Self::new(
            basis,
            DMatrix::from_element(n, 0, T::zero()),
            certified_rank,
        )
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// `[translation | basis]`.
    pub fn combined(&self) -> DMatrix<T> {
        hcat(&self.translation, &self.basis)
    }
}
