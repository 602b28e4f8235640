//! Local polynomial interpolation on subcubes: the control variate `g`.
//!
//! Every subcube uses the same node set in local coordinates, so the
//! interpolation matrix is factorised once per [`Interpolator`] and reused
//! for all `m^d` patches.

use crate::error::{Error, Result};
use crate::grid::{MonomialBasis, NodeSet, SubcubeIndex};
use crate::testbed::Integrand;
use nalgebra::{DMatrix, DVectorViewMut, Dyn, LU};
use std::sync::Arc;

/// Factorised monomial interpolation on a fixed node set.
#[derive(Debug, Clone)]
pub struct Interpolator {
    basis: Arc<MonomialBasis>,
    nodes: NodeSet,
    lu: LU<f64, Dyn, Dyn>,
    moments: Vec<f64>,
}

impl Interpolator {
    pub fn new(nodes: NodeSet) -> Result<Self> {
        let basis = MonomialBasis::new(nodes.smoothness())?;
        let vandermonde: DMatrix<f64> = basis.vandermonde(&nodes);
        let rcond = crate::grid::reciprocal_condition(&vandermonde);
        if !(rcond >= crate::grid::RCOND_THRESHOLD) {
            return Err(Error::IllConditioned { rcond, threshold: crate::grid::RCOND_THRESHOLD });
        }
        let moments = basis.moments();
        Ok(Self { basis: Arc::new(basis), nodes, lu: vandermonde.lu(), moments })
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    /// Number of nodes (and of coefficients), `n0`.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Overwrite node values with monomial coefficients.
    pub fn solve_in_place(&self, values: &mut [f64]) -> Result<()> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: values.len() });
        }
        let n = values.len();
        let mut rhs = DVectorViewMut::from_slice(values, n);
        if !self.lu.solve_mut(&mut rhs) {
            return Err(Error::IllConditioned { rcond: 0.0, threshold: crate::grid::RCOND_THRESHOLD });
        }
        Ok(())
    }

    /// `∫_{[0,1]^d}` of the polynomial with the given coefficients.
    pub fn mean_of(&self, coeffs: &[f64]) -> f64 {
        coeffs.iter().zip(&self.moments).map(|(c, m)| c * m).sum()
    }

    /// Value at local coordinates `x` of the polynomial with the given coefficients.
    #[inline]
    pub fn eval_of(&self, coeffs: &[f64], x: &[f64]) -> f64 {
        self.basis.eval(coeffs, x)
    }

    /// Interpolate `values` (one per node) as a patch on `subcube`.
    pub fn fit(&self, values: &[f64], subcube: SubcubeIndex) -> Result<PolyPatch> {
        let mut coeffs = values.to_vec();
        self.solve_in_place(&mut coeffs)?;
        Ok(PolyPatch { basis: Arc::clone(&self.basis), coeffs, subcube })
    }
}

/// Polynomial of total degree `< s` in local coordinates of one subcube.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyPatch {
    basis: Arc<MonomialBasis>,
    coeffs: Vec<f64>,
    subcube: SubcubeIndex,
}

impl PolyPatch {
    pub fn new(basis: Arc<MonomialBasis>, coeffs: Vec<f64>, subcube: SubcubeIndex) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), got: coeffs.len() });
        }
        if subcube.dim() != basis.smoothness().d() {
            return Err(Error::DimensionMismatch { expected: basis.smoothness().d(), got: subcube.dim() });
        }
        Ok(Self { basis, coeffs, subcube })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: &[u32]) -> Option<f64> {
        self.basis.position(alpha).map(|k| self.coeffs[k])
    }

    pub fn basis(&self) -> &MonomialBasis {
        &self.basis
    }

    pub fn subcube(&self) -> &SubcubeIndex {
        &self.subcube
    }

    pub fn eval_local(&self, x: &[f64]) -> f64 {
        self.basis.eval(&self.coeffs, x)
    }

    pub fn mean(&self) -> f64 {
        patch_mean(self)
    }
}

/// Unique polynomial of total degree `< s` through `values` at `nodes`,
/// on the whole cube (`m = 1`).
pub fn interpolate(values: &[f64], nodes: &NodeSet) -> Result<PolyPatch> {
    let whole = SubcubeIndex::new(vec![0; nodes.dim()], 1)?;
    Interpolator::new(nodes.clone())?.fit(values, whole)
}

/// `Σ_α c_α Π_j 1/(α_j + 1)`, the integral of the patch over local coordinates.
pub fn patch_mean(p: &PolyPatch) -> f64 {
    p.coeffs.iter().zip(p.basis.moments()).map(|(c, m)| c * m).sum()
}

/// `f(x) − g(Φ^{-1}(x))` for a global point `x` in the patch's subcube.
pub fn residual_eval(f: &Integrand, p: &PolyPatch, x_global: &[f64]) -> Result<f64> {
    let local = p.subcube.inverse(x_global)?;
    Ok(f.eval(x_global) - p.eval_local(&local))
}
