//! Polarized rational spaces and the similitude character.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::linalg::{Rational, RationalMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingError {
    #[error("pairing matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("pairing matrix is empty")]
    Empty,
    #[error("pairing must be antisymmetric for odd weight")]
    NotAntisymmetric,
    #[error("pairing is degenerate (determinant 0)")]
    Degenerate,
    #[error("weight {0} is not a positive odd integer (even weight is unsupported)")]
    EvenWeight(u32),
}

/// A rational vector space with a nondegenerate alternating pairing.
///
/// Only odd weights are supported, so the pairing is antisymmetric and the
/// similitude group is symplectic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarizedSpace {
    weight: u32,
    pairing: RationalMatrix,
}

impl PolarizedSpace {
    pub fn new(weight: u32, pairing: RationalMatrix) -> Result<Self, PairingError> {
        if weight % 2 == 0 {
            return Err(PairingError::EvenWeight(weight));
        }
        if !pairing.is_square() {
            return Err(PairingError::NotSquare {
                rows: pairing.rows(),
                cols: pairing.cols(),
            });
        }
        if pairing.rows() == 0 {
            return Err(PairingError::Empty);
        }
        if pairing.transpose() != -&pairing {
            return Err(PairingError::NotAntisymmetric);
        }
        if pairing.rank() < pairing.rows() {
            return Err(PairingError::Degenerate);
        }
        Ok(Self { weight, pairing })
    }

    /// Weight 1 with the standard form `[[0, I], [-I, 0]]` on `Q^(2g)`.
    pub fn standard_symplectic(g: usize) -> Self {
        Self::new(1, standard_symplectic_matrix(g)).expect("standard form is valid")
    }

    pub fn dim(&self) -> usize {
        self.pairing.rows()
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn pairing(&self) -> &RationalMatrix {
        &self.pairing
    }

    /// Orthogonal direct sum of several spaces (block-diagonal pairing).
    /// All summands must share a weight.
    pub fn direct_sum(parts: &[PolarizedSpace]) -> Self {
        assert!(!parts.is_empty());
        let weight = parts[0].weight;
        assert!(parts.iter().all(|p| p.weight == weight), "weights differ");
        let blocks: Vec<RationalMatrix> = parts.iter().map(|p| p.pairing.clone()).collect();
        Self::new(weight, RationalMatrix::block_diagonal(&blocks)).expect("sum of valid pairings")
    }

    /// `(V^s, ψ^s)`.
    pub fn power(&self, s: usize) -> Self {
        Self::direct_sum(&vec![self.clone(); s])
    }
}

pub fn standard_symplectic_matrix(g: usize) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(2 * g, 2 * g);
    for i in 0..g {
        m.set(i, g + i, Rational::one());
        m.set(g + i, i, -Rational::one());
    }
    m
}

/// The scalar `χ` with `gᵀΨg = χΨ`, if one exists.
///
/// The candidate ratio is read off the first nonzero entry of `Ψ` (row-major)
/// and then checked against the whole matrix.
pub fn similitude_factor(g: &RationalMatrix, space: &PolarizedSpace) -> Option<Rational> {
    let psi = space.pairing();
    assert_eq!(
        (g.rows(), g.cols()),
        (psi.rows(), psi.cols()),
        "element does not act on the polarized space"
    );
    let transformed = &(&g.transpose() * psi) * g;
    let (idx, pivot) = psi
        .as_flat()
        .iter()
        .enumerate()
        .find(|(_, x)| !x.is_zero())?;
    let chi = &transformed.as_flat()[idx] / pivot;
    (transformed == psi.scale(&chi)).then_some(chi)
}

/// Membership in `Iso = Ker χ`.
pub fn is_isometry(g: &RationalMatrix, space: &PolarizedSpace) -> bool {
    similitude_factor(g, space).is_some_and(|chi| chi.is_one())
}
