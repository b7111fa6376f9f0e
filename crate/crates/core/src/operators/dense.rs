//! Dense (N+1)×(N+1) matrices of every operator, built from the explicit
//! reflection formulas rather than the block kernels. Oracle use only.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{build_f_vectors, InterpolationParams, MarkedConfig};
use crate::error::{Error, Result};
use crate::grid_state::{GridDims, StateVector};

/// Largest grid size (number of vertices) for which dense matrices are built.
pub const DENSE_GUARD: usize = 1024;

fn guard(dims: GridDims) -> Result<()> {
    if dims.n() > DENSE_GUARD {
        return Err(Error::Config(format!(
            "dense matrices are limited to N <= {DENSE_GUARD}, got N = {}",
            dims.n()
        )));
    }
    Ok(())
}

fn reflection_about(dims: GridDims, vectors: &[DVector<f64>], selfloop: bool) -> DMatrix<f64> {
    let len = dims.len();
    let mut m = -DMatrix::<f64>::identity(len, len);
    for v in vectors {
        m += 2.0 * v * v.transpose();
    }
    if selfloop {
        m[(dims.selfloop(), dims.selfloop())] += 2.0;
    }
    m
}

fn tessellation_states(dims: GridDims, offset: usize) -> Vec<DVector<f64>> {
    let mut out = Vec::new();
    for bi in 0..dims.n_rows() / 2 {
        for bj in 0..dims.n_cols() / 2 {
            let mut v = DVector::<f64>::zeros(dims.len());
            for di in 0..2 {
                for dj in 0..2 {
                    v[dims.index_wrapped(2 * bi + di + offset, 2 * bj + dj + offset)] = 0.5;
                }
            }
            out.push(v);
        }
    }
    out
}

/// A = 2 Σ|a_ij⟩⟨a_ij| + 2|⟲⟩⟨⟲| − I over the even squares.
pub fn matrix_a(dims: GridDims) -> Result<DMatrix<f64>> {
    guard(dims)?;
    Ok(reflection_about(dims, &tessellation_states(dims, 0), true))
}

/// Same construction over the odd, wrap-around squares.
pub fn matrix_b(dims: GridDims) -> Result<DMatrix<f64>> {
    guard(dims)?;
    Ok(reflection_about(dims, &tessellation_states(dims, 1), true))
}

pub fn matrix_gt(dims: GridDims, config: &MarkedConfig) -> Result<DMatrix<f64>> {
    guard(dims)?;
    let mut g = DVector::<f64>::zeros(dims.len());
    g[dims.index(config.marked.0, config.marked.1)] = config.params.s().sqrt();
    g[dims.selfloop()] = config.params.one_minus_s().sqrt();
    Ok(DMatrix::identity(dims.len(), dims.len()) - 2.0 * &g * g.transpose())
}

pub fn matrix_cz(dims: GridDims) -> Result<DMatrix<f64>> {
    guard(dims)?;
    let mut m = DMatrix::identity(dims.len(), dims.len());
    for i in (0..dims.n_rows()).step_by(2) {
        for j in (0..dims.n_cols()).step_by(2) {
            let k = dims.index(i, j);
            m[(k, k)] = -1.0;
        }
    }
    Ok(m)
}

pub fn matrix_u(dims: GridDims, config: &MarkedConfig) -> Result<DMatrix<f64>> {
    let g = matrix_gt(dims, config)?;
    Ok(matrix_b(dims)? * &g * matrix_a(dims)? * &g)
}

pub fn matrix_w(dims: GridDims) -> Result<DMatrix<f64>> {
    let cz = matrix_cz(dims)?;
    Ok(&cz * matrix_b(dims)? * matrix_a(dims)? * &cz)
}

/// F = cz A G̃ A G̃ cz with the mark at the origin.
pub fn matrix_f(dims: GridDims, params: InterpolationParams) -> Result<DMatrix<f64>> {
    let cz = matrix_cz(dims)?;
    let a = matrix_a(dims)?;
    let g = matrix_gt(
        dims,
        &MarkedConfig {
            marked: (0, 0),
            params,
        },
    )?;
    Ok(&cz * &a * &g * &a * &g * &cz)
}

fn rank_one_reflection(v: &StateVector) -> DMatrix<f64> {
    let x = DVector::from_iterator(v.amps().len(), v.amps().iter().map(|a| a.re));
    DMatrix::identity(x.len(), x.len()) - 2.0 * &x * x.transpose()
}

pub fn matrix_f1(dims: GridDims, params: InterpolationParams) -> Result<DMatrix<f64>> {
    guard(dims)?;
    Ok(rank_one_reflection(&build_f_vectors(dims, params).f1))
}

pub fn matrix_f2(dims: GridDims, params: InterpolationParams) -> Result<DMatrix<f64>> {
    guard(dims)?;
    Ok(rank_one_reflection(&build_f_vectors(dims, params).f2))
}

/// Applies a real matrix to a complex state.
pub fn apply_matrix(m: &DMatrix<f64>, state: &StateVector) -> StateVector {
    let re = DVector::from_iterator(state.amps().len(), state.amps().iter().map(|a| a.re));
    let im = DVector::from_iterator(state.amps().len(), state.amps().iter().map(|a| a.im));
    let (re, im) = (m * re, m * im);
    let amps = re
        .iter()
        .zip(im.iter())
        .map(|(&r, &i)| Complex64::new(r, i))
        .collect();
    StateVector::from_amps(state.dims(), amps).expect("matrix size matches the state")
}

/// Eigenphases of a real orthogonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpectrum {
    /// Phases in (0, π), one entry per conjugate pair, ascending.
    pub positive: Vec<f64>,
    pub plus_one: usize,
    pub minus_one: usize,
}

/// Reads the spectrum of a real orthogonal Q from the symmetric part (Q+Qᵀ)/2,
/// whose eigenvalues are cos θ with each conjugate pair appearing twice.
pub fn orthogonal_phases(q: &DMatrix<f64>, tol: f64) -> PhaseSpectrum {
    let sym = (q + q.transpose()) * 0.5;
    let mut cosines: Vec<f64> = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    cosines.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let plus_one = cosines.iter().filter(|&&c| c > 1.0 - tol).count();
    let minus_one = cosines.iter().filter(|&&c| c < -1.0 + tol).count();
    let interior: Vec<f64> = cosines[plus_one..cosines.len() - minus_one].to_vec();
    let positive = interior
        .chunks(2)
        .map(|pair| {
            let c = pair.iter().sum::<f64>() / pair.len() as f64;
            c.clamp(-1.0, 1.0).acos()
        })
        .collect();
    PhaseSpectrum {
        positive,
        plus_one,
        minus_one,
    }
}
