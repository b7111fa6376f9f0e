//! Independent dense oracles written from the operator definitions, entry by
//! entry, without the library's kernels or dense builders.

#![allow(dead_code)]

use latwalk::grid_state::{GridDims, StateVector};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub fn dims(n: usize) -> GridDims {
    GridDims::square(n).unwrap()
}

fn block(x: usize, offset: usize, n: usize) -> usize {
    ((x + n - offset) % n) / 2
}

/// Reflection about the 2×2 squares starting at (offset, offset), plus |⟲⟩.
pub fn tessellation(d: GridDims, offset: usize) -> DMatrix<f64> {
    let (nr, nc, n) = (d.n_rows(), d.n_cols(), d.n());
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for a in 0..n {
        for b in 0..n {
            let (ia, ja, ib, jb) = (a / nc, a % nc, b / nc, b % nc);
            if block(ia, offset, nr) == block(ib, offset, nr)
                && block(ja, offset, nc) == block(jb, offset, nc)
            {
                m[(a, b)] = 0.5;
            }
        }
        m[(a, a)] -= 1.0;
    }
    m[(n, n)] = 1.0;
    m
}

pub fn oracle_a(d: GridDims) -> DMatrix<f64> {
    tessellation(d, 0)
}

pub fn oracle_b(d: GridDims) -> DMatrix<f64> {
    tessellation(d, 1)
}

pub fn oracle_cz(d: GridDims) -> DMatrix<f64> {
    let mut m = DMatrix::identity(d.len(), d.len());
    for a in 0..d.n() {
        if (a / d.n_cols()).is_multiple_of(2) && (a % d.n_cols()).is_multiple_of(2) {
            m[(a, a)] = -1.0;
        }
    }
    m
}

/// I − 2|g̃⟩⟨g̃| with 1 − s passed separately.
pub fn oracle_gt(d: GridDims, marked: (usize, usize), s: f64, one_minus_s: f64) -> DMatrix<f64> {
    let mut v = DVector::zeros(d.len());
    v[marked.0 * d.n_cols() + marked.1] = s.sqrt();
    v[d.n()] = one_minus_s.sqrt();
    DMatrix::identity(d.len(), d.len()) - 2.0 * &v * v.transpose()
}

pub fn oracle_u(d: GridDims, marked: (usize, usize), s: f64, one_minus_s: f64) -> DMatrix<f64> {
    let g = oracle_gt(d, marked, s, one_minus_s);
    oracle_b(d) * &g * oracle_a(d) * &g
}

pub fn oracle_w(d: GridDims) -> DMatrix<f64> {
    let cz = oracle_cz(d);
    &cz * oracle_b(d) * oracle_a(d) * &cz
}

pub fn oracle_f(d: GridDims, s: f64, one_minus_s: f64) -> DMatrix<f64> {
    let cz = oracle_cz(d);
    let g = oracle_gt(d, (0, 0), s, one_minus_s);
    let a = oracle_a(d);
    &cz * &a * &g * &a * &g * &cz
}

pub fn default_weight(d: GridDims) -> (f64, f64) {
    let n = d.n() as f64;
    (n / (n + 1.0), 1.0 / (n + 1.0))
}

/// Materializes a state map as a dense matrix by applying it to basis vectors.
pub fn materialize(d: GridDims, f: impl Fn(&StateVector) -> StateVector) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(d.len(), d.len());
    for c in 0..d.len() {
        let col = f(&StateVector::basis(d, c));
        for (r, a) in col.amps().iter().enumerate() {
            assert!(a.im.abs() < 1e-15);
            m[(r, c)] = a.re;
        }
    }
    m
}

pub fn apply(m: &DMatrix<f64>, x: &StateVector) -> StateVector {
    let re = DVector::from_iterator(x.amps().len(), x.amps().iter().map(|a| a.re));
    let im = DVector::from_iterator(x.amps().len(), x.amps().iter().map(|a| a.im));
    let (re, im) = (m * re, m * im);
    StateVector::from_amps(
        x.dims(),
        re.iter()
            .zip(im.iter())
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect(),
    )
    .unwrap()
}

pub fn to_dvec(x: &StateVector) -> DVector<f64> {
    assert!(x.max_imag() < 1e-14);
    DVector::from_iterator(x.amps().len(), x.amps().iter().map(|a| a.re))
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

/// Spectral data of a real orthogonal Q read off the symmetric part
/// (Q + Qᵀ)/2: eigenvalue cos θ, each conjugate pair giving a 2-plane.
pub struct OrthoSpectrum {
    pub cosines: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn ortho_spectrum(q: &DMatrix<f64>) -> OrthoSpectrum {
    let e = SymmetricEigen::new((q + q.transpose()) * 0.5);
    let mut idx: Vec<usize> = (0..e.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| e.eigenvalues[b].partial_cmp(&e.eigenvalues[a]).unwrap());
    let cosines = idx.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &idx.iter()
            .map(|&i| e.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    OrthoSpectrum { cosines, vectors }
}

impl OrthoSpectrum {
    /// Phases in (0, π), one per conjugate pair, ascending.
    pub fn positive_phases(&self, tol: f64) -> Vec<f64> {
        let interior: Vec<f64> = self
            .cosines
            .iter()
            .copied()
            .filter(|c| c.abs() < 1.0 - tol)
            .collect();
        interior
            .chunks(2)
            .map(|p| (0.5 * (p[0] + p[1])).acos())
            .collect()
    }

    /// ‖P x‖² for the projector onto the eigenspace of the symmetric part at `cos`.
    pub fn weight_at(&self, cos: f64, tol: f64, x: &DVector<f64>) -> f64 {
        self.cosines
            .iter()
            .enumerate()
            .filter(|(_, &c)| (c - cos).abs() < tol)
            .map(|(i, _)| self.vectors.column(i).dot(x).powi(2))
            .sum()
    }
}
