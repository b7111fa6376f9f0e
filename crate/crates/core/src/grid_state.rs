//! State space of the walk: the N vertices of an n_rows × n_cols torus plus one
//! selfloop state, stored row-major with the selfloop last.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridDims {
    n_rows: usize,
    n_cols: usize,
}

impl GridDims {
    pub fn new(n_rows: usize, n_cols: usize) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 || !n_rows.is_multiple_of(2) || !n_cols.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "grid dimensions must be positive and even, got {n_rows}x{n_cols}"
            )));
        }
        Ok(Self { n_rows, n_cols })
    }

    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// Number of grid vertices.
    pub fn n(&self) -> usize {
        self.n_rows * self.n_cols
    }

    /// Length of a state vector (vertices plus selfloop), never zero.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.n() + 1
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "a square grid is required, got {}x{}",
                self.n_rows, self.n_cols
            )))
        }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n_rows && j < self.n_cols);
        i * self.n_cols + j
    }

    /// Index of the vertex (i, j) after reducing both coordinates modulo the torus size.
    pub fn index_wrapped(&self, i: usize, j: usize) -> usize {
        (i % self.n_rows) * self.n_cols + (j % self.n_cols)
    }

    pub fn coords(&self, idx: usize) -> Option<(usize, usize)> {
        (idx < self.n()).then(|| (idx / self.n_cols, idx % self.n_cols))
    }

    pub fn selfloop(&self) -> usize {
        self.n()
    }

    pub fn check_vertex(&self, (i, j): (usize, usize)) -> Result<()> {
        if i < self.n_rows && j < self.n_cols {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "vertex ({i},{j}) outside the {}x{} grid",
                self.n_rows, self.n_cols
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    dims: GridDims,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(dims: GridDims) -> Self {
        Self {
            dims,
            amps: vec![Complex64::new(0.0, 0.0); dims.len()],
        }
    }

    pub fn from_amps(dims: GridDims, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != dims.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} amplitudes, got {}",
                dims.len(),
                amps.len()
            )));
        }
        Ok(Self { dims, amps })
    }

    pub fn from_real(dims: GridDims, values: &[f64]) -> Result<Self> {
        Self::from_amps(
            dims,
            values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Computational basis state at flat index `idx`.
    pub fn basis(dims: GridDims, idx: usize) -> Self {
        let mut s = Self::zeros(dims);
        s.amps[idx] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn vertex(dims: GridDims, i: usize, j: usize) -> Self {
        Self::basis(dims, dims.index(i, j))
    }

    pub fn selfloop(dims: GridDims) -> Self {
        Self::basis(dims, dims.selfloop())
    }

    /// Unit vector with independent standard-normal real and imaginary parts.
    pub fn random_unit(dims: GridDims, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..dims.len())
            .map(|_| Complex64::new(normal(&mut rng), normal(&mut rng)))
            .collect();
        let mut s = Self { dims, amps };
        s.normalize();
        s
    }

    /// Real unit vector with standard-normal entries.
    pub fn random_real_unit(dims: GridDims, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..dims.len())
            .map(|_| Complex64::new(normal(&mut rng), 0.0))
            .collect();
        let mut s = Self { dims, amps };
        s.normalize();
        s
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.amps[self.dims.index(i, j)]
    }

    pub fn selfloop_amp(&self) -> Complex64 {
        self.amps[self.dims.selfloop()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.scale_mut(Complex64::new(1.0 / n, 0.0));
        }
    }

    pub fn scale_mut(&mut self, c: Complex64) {
        for a in &mut self.amps {
            *a *= c;
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut s = self.clone();
        s.scale_mut(c);
        s
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: Complex64, other: &StateVector) {
        debug_assert_eq!(self.dims, other.dims);
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += c * b;
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            dims: self.dims,
            amps: self.amps.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn real_part(&self) -> Self {
        Self {
            dims: self.dims,
            amps: self
                .amps
                .iter()
                .map(|a| Complex64::new(a.re, 0.0))
                .collect(),
        }
    }

    /// Largest absolute imaginary part of any amplitude.
    pub fn max_imag(&self) -> f64 {
        self.amps.iter().fold(0.0, |m, a| m.max(a.im.abs()))
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        debug_assert_eq!(self.dims, other.dims);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// The uniform superposition |π⟩ over all vertices, with no selfloop weight.
pub fn uniform_state(dims: GridDims) -> StateVector {
    let mut s = StateVector::zeros(dims);
    let a = Complex64::new(1.0 / (dims.n() as f64).sqrt(), 0.0);
    for x in &mut s.amps[..dims.n()] {
        *x = a;
    }
    s
}

/// |π_z⟩ = cz|π⟩.
pub fn uniform_state_z(dims: GridDims) -> StateVector {
    apply_cz(&uniform_state(dims))
}

pub fn apply_cz(state: &StateVector) -> StateVector {
    let mut s = state.clone();
    apply_cz_mut(&mut s);
    s
}

/// Negates every vertex whose row and column are both even.
pub fn apply_cz_mut(state: &mut StateVector) {
    let dims = state.dims;
    for i in (0..dims.n_rows).step_by(2) {
        let row = i * dims.n_cols;
        for j in (0..dims.n_cols).step_by(2) {
            state.amps[row + j] = -state.amps[row + j];
        }
    }
}

/// ⟨a|b⟩, conjugate-linear in `a`.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.dims != b.dims {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.dims.n_rows, a.dims.n_cols, b.dims.n_rows, b.dims.n_cols
        )));
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Grid automorphism moving a marked vertex to the origin.
///
/// Even shifts and the reflection i ↦ 1 − i both preserve the even and the odd
/// tessellation, so the walk operators commute with this map. A plain shift by
/// an odd offset would swap the two tessellations, so odd coordinates use the
/// reflection instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarkFrame {
    dims: GridDims,
    marked: (usize, usize),
}

impl MarkFrame {
    pub fn new(dims: GridDims, marked: (usize, usize)) -> Result<Self> {
        dims.check_vertex(marked)?;
        Ok(Self { dims, marked })
    }

    pub fn marked(&self) -> (usize, usize) {
        self.marked
    }

    fn map_axis(x: usize, m: usize, n: usize) -> usize {
        if m.is_multiple_of(2) {
            (x + n - m) % n
        } else {
            (m + n - x) % n
        }
    }

    /// Canonical coordinates of the user vertex (i, j); the mark maps to (0, 0).
    pub fn to_canonical_vertex(&self, (i, j): (usize, usize)) -> (usize, usize) {
        (
            Self::map_axis(i, self.marked.0, self.dims.n_rows),
            Self::map_axis(j, self.marked.1, self.dims.n_cols),
        )
    }

    /// User coordinates of the canonical vertex (i, j).
    pub fn to_user_vertex(&self, (i, j): (usize, usize)) -> (usize, usize) {
        let inv = |x: usize, m: usize, n: usize| {
            if m.is_multiple_of(2) {
                (x + m) % n
            } else {
                (m + n - x) % n
            }
        };
        (
            inv(i, self.marked.0, self.dims.n_rows),
            inv(j, self.marked.1, self.dims.n_cols),
        )
    }

    pub fn to_canonical(&self, state: &StateVector) -> StateVector {
        let mut out = StateVector::zeros(self.dims);
        for idx in 0..self.dims.n() {
            let (i, j) = self.dims.coords(idx).expect("vertex index");
            let (ci, cj) = self.to_canonical_vertex((i, j));
            out.amps[self.dims.index(ci, cj)] = state.amps[idx];
        }
        out.amps[self.dims.n()] = state.amps[self.dims.n()];
        out
    }

    pub fn to_user(&self, state: &StateVector) -> StateVector {
        let mut out = StateVector::zeros(self.dims);
        for idx in 0..self.dims.n() {
            let (i, j) = self.dims.coords(idx).expect("vertex index");
            let (ui, uj) = self.to_user_vertex((i, j));
            out.amps[self.dims.index(ui, uj)] = state.amps[idx];
        }
        out.amps[self.dims.n()] = state.amps[self.dims.n()];
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_dims() {
        assert!(GridDims::new(15, 16).is_err());
        assert!(GridDims::new(16, 0).is_err());
        assert!(GridDims::new(2, 4).is_ok());
    }

    #[test]
    fn uniform_2x2() {
        let d = GridDims::new(2, 2).unwrap();
        let s = uniform_state(d);
        for k in 0..4 {
            assert_eq!(s.amps()[k], Complex64::new(0.5, 0.0));
        }
        assert_eq!(s.selfloop_amp(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn uniform_is_unit_and_orthogonal_to_selfloop() {
        let d = GridDims::new(4, 4).unwrap();
        let p = uniform_state(d);
        assert!((p.norm() - 1.0).abs() < 1e-15);
        assert_eq!(inner(&p, &StateVector::selfloop(d)).unwrap().norm(), 0.0);
    }

    #[test]
    fn cz_examples() {
        let d = GridDims::new(4, 4).unwrap();
        assert_eq!(
            apply_cz(&StateVector::vertex(d, 0, 0)),
            StateVector::vertex(d, 0, 0).scaled((-1.0).into())
        );
        assert_eq!(
            apply_cz(&StateVector::vertex(d, 0, 1)),
            StateVector::vertex(d, 0, 1)
        );
        let p = uniform_state(d);
        let v = inner(&p, &apply_cz(&p)).unwrap();
        assert!((v.re - 0.5).abs() < 1e-15 && v.im == 0.0);
    }

    #[test]
    fn basis_orthogonal() {
        let d = GridDims::new(4, 6).unwrap();
        assert_eq!(
            inner(&StateVector::vertex(d, 0, 0), &StateVector::vertex(d, 0, 1))
                .unwrap()
                .norm(),
            0.0
        );
    }

    #[test]
    fn inner_rejects_mismatch() {
        let a = uniform_state(GridDims::new(4, 4).unwrap());
        let b = uniform_state(GridDims::new(4, 6).unwrap());
        assert!(matches!(inner(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn indexing_is_bijective() {
        let d = GridDims::new(6, 4).unwrap();
        let mut seen = vec![false; d.len()];
        for i in 0..6 {
            for j in 0..4 {
                let k = d.index(i, j);
                assert!(!seen[k]);
                seen[k] = true;
                assert_eq!(d.coords(k), Some((i, j)));
            }
        }
        assert!(!seen[d.selfloop()]);
        assert_eq!(d.coords(d.selfloop()), None);
    }

    #[test]
    fn frame_round_trip() {
        let d = GridDims::new(6, 8).unwrap();
        for m in [(0, 0), (1, 3), (4, 5), (3, 2)] {
            let f = MarkFrame::new(d, m).unwrap();
            assert_eq!(f.to_canonical_vertex(m), (0, 0));
            let x = StateVector::random_unit(d, 7);
            assert_eq!(f.to_user(&f.to_canonical(&x)), x);
        }
    }
}
