//! Dimension bookkeeping: polynomial space dimension, the subcube
//! decomposition of `[0,1]^d`, and interpolation node sets.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Node sets whose monomial interpolation matrix has a reciprocal
/// condition number below this are rejected.
pub const RCOND_THRESHOLD: f64 = 1e-10;

/// Interpolation order `s` and dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Smoothness {
    s: usize,
    d: usize,
}

impl Smoothness {
    pub fn new(s: usize, d: usize) -> Result<Self> {
        if s == 0 || d == 0 {
            return Err(Error::InvalidParameter(format!("need s >= 1 and d >= 1, got s={s}, d={d}")));
        }
        Ok(Self { s, d })
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of monomials of total degree `< s` in `d` variables.
    pub fn n0(&self) -> Result<usize> {
        poly_dim(self.s, self.d)
    }
}

/// `C(s+d-1, d)`: the dimension of the space of `d`-variate polynomials of
/// total degree less than `s`.
pub fn poly_dim(s: usize, d: usize) -> Result<usize> {
    if s == 0 || d == 0 {
        return Err(Error::InvalidParameter(format!("poly_dim needs s >= 1 and d >= 1, got s={s}, d={d}")));
    }
    let overflow = || Error::Overflow(format!("poly_dim({s}, {d})"));
    let n = (s as u128).checked_add(d as u128 - 1).ok_or_else(overflow)?;
    let k = (d as u128).min(n - d as u128);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) / i stays integral at every step.
        acc = acc.checked_mul(n - k + i).ok_or_else(overflow)? / i;
    }
    usize::try_from(acc).map_err(|_| overflow())
}

/// Position of a subcube `G_{m,i} = prod_j [i_j/m, (i_j+1)/m]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubcubeIndex {
    index: Vec<usize>,
    m: usize,
}

impl SubcubeIndex {
    pub fn new(index: Vec<usize>, m: usize) -> Result<Self> {
        if m == 0 || index.is_empty() || index.iter().any(|&i| i >= m) {
            return Err(Error::IndexOutOfRange { index, m });
        }
        Ok(Self { index, m })
    }

    /// Subcube with lexicographic position `linear` (last axis fastest).
    pub fn from_linear(mut linear: usize, m: usize, d: usize) -> Result<Self> {
        let mut index = vec![0; d];
        for slot in index.iter_mut().rev() {
            *slot = linear % m.max(1);
            linear /= m.max(1);
        }
        if linear != 0 {
            return Err(Error::IndexOutOfRange { index, m });
        }
        Self::new(index, m)
    }

    /// All `m^d` subcubes in lexicographic order.
    pub fn all(m: usize, d: usize) -> impl Iterator<Item = SubcubeIndex> {
        let count = m.checked_pow(d as u32).unwrap_or(0);
        (0..count).map(move |lin| {
            Self::from_linear(lin, m, d).expect("linear index below m^d is always valid")
        })
    }

    pub fn index(&self) -> &[usize] {
        &self.index
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn linear(&self) -> usize {
        self.index.iter().fold(0, |acc, &i| acc * self.m + i)
    }

    pub fn volume(&self) -> f64 {
        (self.m as f64).powi(-(self.dim() as i32))
    }

    /// `Φ_{m,i}(x) = (x + i)/m`, written into `out`.
    pub fn map_into(&self, local: &[f64], out: &mut [f64]) {
        let m = self.m as f64;
        for ((o, &x), &i) in out.iter_mut().zip(local).zip(&self.index) {
            *o = (x + i as f64) / m;
        }
    }

    pub fn map(&self, local: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(local.len())?;
        let mut out = vec![0.0; self.dim()];
        self.map_into(local, &mut out);
        Ok(out)
    }

    /// `Φ_{m,i}^{-1}(y) = m·y - i`, written into `out` without range checks.
    pub fn inverse_into(&self, global: &[f64], out: &mut [f64]) {
        let m = self.m as f64;
        for ((o, &y), &i) in out.iter_mut().zip(global).zip(&self.index) {
            *o = m * y - i as f64;
        }
    }

    pub fn inverse(&self, global: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(global.len())?;
        if !self.contains(global) {
            return Err(Error::OutOfDomain { point: global.to_vec(), region: format!("subcube {:?} (m={})", self.index, self.m) });
        }
        let mut out = vec![0.0; self.dim()];
        self.inverse_into(global, &mut out);
        Ok(out)
    }

    /// Closed-subcube membership with a few ulps of slack at the faces.
    pub fn contains(&self, global: &[f64]) -> bool {
        const SLACK: f64 = 1e-12;
        let m = self.m as f64;
        global.len() == self.dim()
            && global.iter().zip(&self.index).all(|(&y, &i)| {
                let lo = i as f64 / m;
                let hi = (i + 1) as f64 / m;
                y >= lo - SLACK && y <= hi + SLACK
            })
    }

    /// Subcube containing `global`; points on shared faces go to the upper cube,
    /// except on the outer face `1.0`.
    pub fn locate(global: &[f64], m: usize) -> Result<Self> {
        let mut index = Vec::with_capacity(global.len());
        for &y in global {
            if !(0.0..=1.0).contains(&y) {
                return Err(Error::OutOfDomain { point: global.to_vec(), region: "[0,1]^d".into() });
            }
            index.push(((y * m as f64) as usize).min(m - 1));
        }
        Self::new(index, m)
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }
}

/// Monomials `x^α` with `|α|_1 < s`, ordered by total degree and then
/// lexicographically descending in the exponent vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    smoothness: Smoothness,
    exponents: Vec<Vec<u32>>,
}

impl MonomialBasis {
    pub fn new(smoothness: Smoothness) -> Result<Self> {
        let n0 = smoothness.n0()?;
        let mut exponents = Vec::with_capacity(n0);
        for degree in 0..smoothness.s() {
            let mut alpha = vec![0u32; smoothness.d()];
            push_compositions(degree as u32, 0, &mut alpha, &mut exponents);
        }
        debug_assert_eq!(exponents.len(), n0);
        Ok(Self { smoothness, exponents })
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    pub fn position(&self, alpha: &[u32]) -> Option<usize> {
        self.exponents.iter().position(|e| e.as_slice() == alpha)
    }

    /// Value of monomial `k` at `x`.
    pub fn monomial(&self, k: usize, x: &[f64]) -> f64 {
        self.exponents[k].iter().zip(x).map(|(&a, &xi)| xi.powi(a as i32)).product()
    }

    /// `Σ_k coeffs[k] x^{α_k}`.
    pub fn eval(&self, coeffs: &[f64], x: &[f64]) -> f64 {
        coeffs.iter().enumerate().map(|(k, &c)| c * self.monomial(k, x)).sum()
    }

    /// Exact integrals `∫_{[0,1]^d} x^α dx = Π_j 1/(α_j + 1)`.
    pub fn moments(&self) -> Vec<f64> {
        self.exponents
            .iter()
            .map(|alpha| alpha.iter().map(|&a| 1.0 / (a as f64 + 1.0)).product())
            .collect()
    }

    /// Interpolation matrix `V[j][k] = x_j^{α_k}`.
    pub fn vandermonde(&self, nodes: &NodeSet) -> DMatrix<f64> {
        DMatrix::from_fn(nodes.len(), self.len(), |j, k| self.monomial(k, nodes.point(j)))
    }
}

fn push_compositions(remaining: u32, axis: usize, alpha: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let d = alpha.len();
    if axis == d - 1 {
        alpha[axis] = remaining;
        out.push(alpha.clone());
        return;
    }
    for a in (0..=remaining).rev() {
        alpha[axis] = a;
        push_compositions(remaining - a, axis + 1, alpha, out);
    }
    alpha[axis] = 0;
}

/// Unisolvent interpolation nodes in local coordinates on `[0,1]^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    smoothness: Smoothness,
    points: Vec<f64>,
    shift: Option<Vec<f64>>,
    rcond: f64,
}

impl NodeSet {
    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn dim(&self) -> usize {
        self.smoothness.d()
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, j: usize) -> &[f64] {
        let d = self.dim();
        &self.points[j * d..(j + 1) * d]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim())
    }

    pub fn shift(&self) -> Option<&[f64]> {
        self.shift.as_deref()
    }

    /// Reciprocal 1-norm condition number of the monomial interpolation matrix.
    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    fn build(smoothness: Smoothness, points: Vec<f64>, shift: Option<Vec<f64>>) -> Result<Self> {
        let mut set = Self { smoothness, points, shift, rcond: 0.0 };
        let basis = MonomialBasis::new(smoothness)?;
        set.rcond = reciprocal_condition(&basis.vandermonde(&set));
        if !(set.rcond >= RCOND_THRESHOLD) {
            return Err(Error::IllConditioned { rcond: set.rcond, threshold: RCOND_THRESHOLD });
        }
        Ok(set)
    }
}

pub(crate) fn reciprocal_condition(matrix: &DMatrix<f64>) -> f64 {
    let norm1 = |a: &DMatrix<f64>| {
        a.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    };
    match matrix.clone().try_inverse() {
        Some(inv) => {
            let rc = 1.0 / (norm1(matrix) * norm1(&inv));
            if rc.is_finite() { rc } else { 0.0 }
        }
        None => 0.0,
    }
}

/// The principal lattice `{α/(s-1) : |α|_1 ≤ s-1}` of the corner simplex for
/// `s ≥ 2`, and the cube centre for `s = 1`.
pub fn regular_nodes(s: usize, d: usize) -> Result<NodeSet> {
    let smoothness = Smoothness::new(s, d)?;
    let points = if s == 1 {
        vec![0.5; d]
    } else {
        let basis = MonomialBasis::new(smoothness)?;
        let scale = (s - 1) as f64;
        basis.exponents().iter().flat_map(|alpha| alpha.iter().map(move |&a| a as f64 / scale)).collect()
    };
    NodeSet::build(smoothness, points, None)
}

/// Randomly shifted node set `{(x_j + ξ)/2}`.
pub fn shifted_nodes(base: &NodeSet, xi: &[f64]) -> Result<NodeSet> {
    if base.shift.is_some() {
        return Err(Error::InvalidParameter("shifted_nodes expects an unshifted base set".into()));
    }
    if xi.len() != base.dim() {
        return Err(Error::DimensionMismatch { expected: base.dim(), got: xi.len() });
    }
    if xi.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::OutOfDomain { point: xi.to_vec(), region: "[0,1]^d".into() });
    }
    let points = base.points().flat_map(|x| x.iter().zip(xi).map(|(a, b)| 0.5 * (a + b))).collect();
    NodeSet::build(base.smoothness, points, Some(xi.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_dim(s: usize, d: usize) -> usize {
        // Count α ∈ {0..s-1}^d with |α|_1 ≤ s-1.
        let total = s.pow(d as u32);
        (0..total)
            .filter(|&code| {
                let mut c = code;
                let mut sum = 0;
                for _ in 0..d {
                    sum += c % s;
                    c /= s;
                }
                sum < s
            })
            .count()
    }

    #[test]
    fn poly_dim_examples() {
        assert_eq!(poly_dim(2, 2).unwrap(), 3);
        assert_eq!(poly_dim(1, 7).unwrap(), 1);
        assert_eq!(poly_dim(3, 2).unwrap(), 6);
    }

    #[test]
    fn poly_dim_matches_enumeration() {
        for s in 1..=6 {
            for d in 1..=5 {
                assert_eq!(poly_dim(s, d).unwrap(), brute_force_dim(s, d), "s={s} d={d}");
            }
        }
    }

    #[test]
    fn poly_dim_large_and_overflow() {
        // C(59, 30) fits comfortably.
        assert_eq!(poly_dim(30, 30).unwrap(), 59132290782430712);
        for s in 1..60 {
            assert!(poly_dim(s, 60 - s).is_ok());
        }
        assert!(matches!(poly_dim(200, 200), Err(Error::Overflow(_))));
        assert!(poly_dim(0, 2).is_err());
    }

    #[test]
    fn subcube_map_examples() {
        let id = SubcubeIndex::new(vec![0, 0, 0], 1).unwrap();
        assert_eq!(id.map(&[0.1, 0.2, 0.3]).unwrap(), vec![0.1, 0.2, 0.3]);
        let i = SubcubeIndex::new(vec![3, 0], 4).unwrap();
        assert_eq!(i.map(&[0.5, 0.5]).unwrap(), vec![0.875, 0.125]);
        assert!(SubcubeIndex::new(vec![4, 0], 4).is_err());
    }

    #[test]
    fn subcube_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let d = rng.random_range(1..=4);
            let m = rng.random_range(1..=16);
            let idx: Vec<usize> = (0..d).map(|_| rng.random_range(0..m)).collect();
            let cube = SubcubeIndex::new(idx, m).unwrap();
            let x: Vec<f64> = (0..d).map(|_| rng.random()).collect();
            let back = cube.inverse(&cube.map(&x).unwrap()).unwrap();
            for (a, b) in x.iter().zip(&back) {
                assert!((a - b).abs() <= 16.0 * f64::EPSILON * m as f64, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn inverse_rejects_outside_points() {
        let cube = SubcubeIndex::new(vec![1, 1], 2).unwrap();
        assert!(cube.inverse(&[0.2, 0.7]).is_err());
        assert!(cube.inverse(&[0.5, 1.0]).is_ok());
    }

    #[test]
    fn lexicographic_order_and_partition() {
        let cubes: Vec<_> = SubcubeIndex::all(3, 2).collect();
        assert_eq!(cubes.len(), 9);
        assert_eq!(cubes[1].index(), &[0, 1]);
        assert_eq!(cubes[3].index(), &[1, 0]);
        for (lin, c) in cubes.iter().enumerate() {
            assert_eq!(c.linear(), lin);
        }
        for m in 1..=7 {
            for d in 1..=3 {
                let total: f64 = SubcubeIndex::all(m, d).map(|c| c.volume()).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
        let hit = SubcubeIndex::locate(&[1.0, 0.5], 4).unwrap();
        assert_eq!(hit.index(), &[3, 2]);
    }

    #[test]
    fn basis_order() {
        let b = MonomialBasis::new(Smoothness::new(3, 2).unwrap()).unwrap();
        let expected: Vec<Vec<u32>> = vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]];
        assert_eq!(b.exponents(), expected.as_slice());
        assert_eq!(b.moments()[4], 0.25);
    }

    #[test]
    fn regular_node_examples() {
        let n = regular_nodes(2, 1).unwrap();
        assert_eq!(n.points().collect::<Vec<_>>(), vec![&[0.0][..], &[1.0][..]]);
        let n = regular_nodes(1, 3).unwrap();
        assert_eq!(n.point(0), &[0.5, 0.5, 0.5]);
        let n = regular_nodes(2, 2).unwrap();
        let pts: Vec<_> = n.points().map(|p| p.to_vec()).collect();
        assert_eq!(pts, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]);
        // Solve the 3x3 system for the values {1,2,4}: coefficients (1, 1, 3).
        let v = MonomialBasis::new(n.smoothness()).unwrap().vandermonde(&n);
        let c = v.lu().solve(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 4.0])).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-14 && (c[1] - 1.0).abs() < 1e-14 && (c[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn regular_nodes_unisolvent_up_to_desk_scale() {
        for s in 1..=5 {
            for d in 1..=4 {
                let n = regular_nodes(s, d).unwrap();
                assert_eq!(n.len(), poly_dim(s, d).unwrap());
                assert!(n.rcond() > RCOND_THRESHOLD, "s={s} d={d} rcond={}", n.rcond());
                let pts: Vec<_> = n.points().collect();
                for a in 0..pts.len() {
                    for b in a + 1..pts.len() {
                        assert_ne!(pts[a], pts[b]);
                    }
                }
            }
        }
    }

    #[test]
    fn shifted_node_examples() {
        let base = regular_nodes(2, 1).unwrap();
        let sh = shifted_nodes(&base, &[0.0]).unwrap();
        assert_eq!(sh.points().collect::<Vec<_>>(), vec![&[0.0][..], &[0.5][..]]);
        let base = regular_nodes(1, 3).unwrap();
        let sh = shifted_nodes(&base, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(sh.point(0), &[0.75, 0.75, 0.75]);
        assert_eq!(sh.shift(), Some(&[1.0, 1.0, 1.0][..]));
        assert!(shifted_nodes(&base, &[1.5, 0.0, 0.0]).is_err());
        assert!(shifted_nodes(&sh, &[0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn shifted_nodes_stay_unisolvent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let s = rng.random_range(1..=4);
            let d = rng.random_range(1..=3);
            let base = regular_nodes(s, d).unwrap();
            let xi: Vec<f64> = (0..d).map(|_| rng.random()).collect();
            let sh = shifted_nodes(&base, &xi).unwrap();
            assert!(sh.points().flatten().all(|v| (0.0..=1.0).contains(v)));
            // Solve against random data and check the residual.
            let basis = MonomialBasis::new(sh.smoothness()).unwrap();
            let v = basis.vandermonde(&sh);
            let y = nalgebra::DVector::from_fn(sh.len(), |_, _| rng.random::<f64>());
            let c = v.clone().lu().solve(&y).unwrap();
            assert!((v * c - y).amax() < 1e-9);
        }
    }
}
