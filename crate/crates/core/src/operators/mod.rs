//! Walk operators as O(N) actions on state vectors.
//!
//! A and B reflect about the 2×2 squares of the even and odd tessellation, G̃
//! reflects about the interpolated marked state, U = B G̃ A G̃ is one walk step.
//! W and F are the cz-conjugated factors with U = cz W F cz; F splits into the
//! two reflections F₁ F₂ about vectors supported on five coordinates.

pub mod dense;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid_state::{apply_cz_mut, GridDims, StateVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationParams {
    s: f64,
    /// 1 − s, kept separately so that s close to 1 does not lose digits.
    one_minus_s: f64,
    eta: f64,
}

impl InterpolationParams {
    pub fn new(s: f64) -> Result<Self> {
        Self::build(s, 1.0 - s)
    }

    /// s = 1 − 1/(N+1).
    pub fn default_for(dims: GridDims) -> Self {
        let n = dims.n() as f64;
        Self::build(n / (n + 1.0), 1.0 / (n + 1.0)).expect("default weight lies in [0, 1]")
    }

    fn build(s: f64, one_minus_s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) || !s.is_finite() {
            return Err(Error::Config(format!(
                "selfloop weight s must lie in [0, 1], got {s}"
            )));
        }
        let eta = (0.75 * s).sqrt().asin();
        Ok(Self {
            s,
            one_minus_s,
            eta,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn one_minus_s(&self) -> f64 {
        self.one_minus_s
    }

    /// η ∈ [0, π/3] with sin²η = 3s/4.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// λ = e^{4iη}, the nontrivial eigenvalue of F.
    pub fn lambda(&self) -> Complex64 {
        Complex64::from_polar(1.0, 4.0 * self.eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkedConfig {
    pub marked: (usize, usize),
    pub params: InterpolationParams,
}

impl MarkedConfig {
    pub fn new(
        dims: GridDims,
        marked: (usize, usize),
        params: InterpolationParams,
    ) -> Result<Self> {
        dims.check_vertex(marked)?;
        Ok(Self { marked, params })
    }

    /// Mark at the origin with the default weight.
    pub fn canonical(dims: GridDims) -> Self {
        Self {
            marked: (0, 0),
            params: InterpolationParams::default_for(dims),
        }
    }

    /// |g̃⟩ = √s|g⟩ + √(1−s)|⟲⟩ as a state vector.
    pub fn g_tilde(&self, dims: GridDims) -> StateVector {
        let mut v = StateVector::zeros(dims);
        v.amps_mut()[dims.index(self.marked.0, self.marked.1)] = self.params.s.sqrt().into();
        v.amps_mut()[dims.selfloop()] = self.params.one_minus_s.sqrt().into();
        v
    }
}

/// |U₀⟩ = |π_z⟩ − √(s/((1−s)N))|⟲⟩, normalized; fixed by W, F₁ and F₂. Needs s < 1.
pub fn u0_state(dims: GridDims, params: InterpolationParams) -> Result<StateVector> {
    if params.one_minus_s <= 0.0 {
        return Err(Error::Config("the (+1) state U0 needs s < 1".into()));
    }
    let mut v = crate::grid_state::uniform_state_z(dims);
    v.amps_mut()[dims.selfloop()] = Complex64::new(
        -(params.s / (params.one_minus_s * dims.n() as f64)).sqrt(),
        0.0,
    );
    v.normalize();
    Ok(v)
}

/// Real vector supported on a handful of coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseReal {
    pub entries: Vec<(usize, f64)>,
}

impl SparseReal {
    pub fn to_state(&self, dims: GridDims) -> StateVector {
        let mut v = StateVector::zeros(dims);
        for &(i, x) in &self.entries {
            v.amps_mut()[i] += Complex64::new(x, 0.0);
        }
        v
    }

    pub fn dot(&self, state: &StateVector) -> Complex64 {
        self.entries.iter().map(|&(i, x)| state.amps()[i] * x).sum()
    }

    /// In-place reflection I − 2|v⟩⟨v| about this (unit) vector.
    pub fn reflect_mut(&self, state: &mut StateVector) {
        let ip = self.dot(state) * 2.0;
        let amps = state.amps_mut();
        for &(i, x) in &self.entries {
            amps[i] -= ip * x;
        }
    }

    fn combine(a: &SparseReal, ca: f64, b: &SparseReal, cb: f64) -> SparseReal {
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for (src, c) in [(a, ca), (b, cb)] {
            for &(i, x) in &src.entries {
                match entries.iter_mut().find(|e| e.0 == i) {
                    Some(e) => e.1 += c * x,
                    None => entries.push((i, c * x)),
                }
            }
        }
        SparseReal { entries }
    }
}

/// The reflection vectors of F, all expressed with the mark at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct FVectors {
    pub params: InterpolationParams,
    pub f1: StateVector,
    pub f2: StateVector,
    pub kplus: StateVector,
    pub kminus: StateVector,
    f1_sparse: SparseReal,
    f2_sparse: SparseReal,
    kplus_sparse: SparseReal,
    kminus_sparse: SparseReal,
}

impl FVectors {
    pub fn f1_sparse(&self) -> &SparseReal {
        &self.f1_sparse
    }

    pub fn f2_sparse(&self) -> &SparseReal {
        &self.f2_sparse
    }

    pub fn kplus_sparse(&self) -> &SparseReal {
        &self.kplus_sparse
    }

    pub fn kminus_sparse(&self) -> &SparseReal {
        &self.kminus_sparse
    }

    /// (|+⟩ − i|f₁⟩)/√2, the eigenvector of F with eigenvalue λ.
    pub fn f_plus(&self) -> StateVector {
        let mut v = self.kplus.clone();
        v.axpy(Complex64::new(0.0, -1.0), &self.f1);
        v.scaled(std::f64::consts::FRAC_1_SQRT_2.into())
    }

    /// Entrywise conjugate of `f_plus`, eigenvalue λ⁻¹.
    pub fn f_minus(&self) -> StateVector {
        self.f_plus().conj()
    }
}

/// Builds |+⟩, |−⟩, |f₁⟩, |f₂⟩ for the mark at the origin.
pub fn build_f_vectors(dims: GridDims, params: InterpolationParams) -> FVectors {
    let square = [
        dims.index(0, 0),
        dims.index(0, 1),
        dims.index(1, 0),
        dims.index(1, 1),
    ];
    let r3 = 3f64.sqrt();
    // |g⟩ = |0,0⟩ and |a₀₀⟩ = ½ Σ over the square.
    let kplus = SparseReal {
        entries: square
            .iter()
            .enumerate()
            .map(|(m, &i)| (i, if m == 0 { 1.5 } else { 0.5 } / r3))
            .collect(),
    };
    let kminus = SparseReal {
        entries: square
            .iter()
            .enumerate()
            .map(|(m, &i)| (i, if m == 0 { 0.5 } else { -0.5 }))
            .collect(),
    };
    let s = params.s;
    let norm = (4.0 - 3.0 * s).sqrt();
    let selfloop = SparseReal {
        entries: vec![(dims.selfloop(), 1.0)],
    };
    let f1 = SparseReal::combine(
        &kminus,
        s.sqrt() / norm,
        &selfloop,
        -2.0 * params.one_minus_s.sqrt() / norm,
    );
    let two_eta = 2.0 * params.eta;
    let f2 = SparseReal::combine(&kplus, two_eta.sin(), &f1, two_eta.cos());
    FVectors {
        params,
        f1: f1.to_state(dims),
        f2: f2.to_state(dims),
        kplus: kplus.to_state(dims),
        kminus: kminus.to_state(dims),
        f1_sparse: f1,
        f2_sparse: f2,
        kplus_sparse: kplus,
        kminus_sparse: kminus,
    }
}

/// Replaces each amplitude of every 2×2 block with (block sum)/2 minus itself.
fn reflect_blocks(state: &mut StateVector, offset: usize) {
    let dims = state.dims();
    let (nr, nc) = (dims.n_rows(), dims.n_cols());
    let amps = state.amps_mut();
    for bi in (0..nr).step_by(2) {
        let r0 = (bi + offset) % nr * nc;
        let r1 = (bi + offset + 1) % nr * nc;
        for bj in (0..nc).step_by(2) {
            let c0 = (bj + offset) % nc;
            let c1 = (bj + offset + 1) % nc;
            let idx = [r0 + c0, r0 + c1, r1 + c0, r1 + c1];
            let half = (amps[idx[0]] + amps[idx[1]] + amps[idx[2]] + amps[idx[3]]) * 0.5;
            for k in idx {
                amps[k] = half - amps[k];
            }
        }
    }
}

pub fn apply_a_mut(state: &mut StateVector) {
    reflect_blocks(state, 0);
}

pub fn apply_b_mut(state: &mut StateVector) {
    reflect_blocks(state, 1);
}

pub fn apply_gt_mut(state: &mut StateVector, config: &MarkedConfig) {
    let dims = state.dims();
    let m = dims.index(config.marked.0, config.marked.1);
    let l = dims.selfloop();
    let (a, b) = (config.params.s.sqrt(), config.params.one_minus_s.sqrt());
    let amps = state.amps_mut();
    let ip = (amps[m] * a + amps[l] * b) * 2.0;
    amps[m] -= ip * a;
    amps[l] -= ip * b;
}

/// One walk step U = B G̃ A G̃.
pub fn apply_u_mut(state: &mut StateVector, config: &MarkedConfig) {
    apply_gt_mut(state, config);
    apply_a_mut(state);
    apply_gt_mut(state, config);
    apply_b_mut(state);
}

/// W = cz B A cz.
pub fn apply_w_mut(state: &mut StateVector) {
    apply_cz_mut(state);
    apply_a_mut(state);
    apply_b_mut(state);
    apply_cz_mut(state);
}

pub fn apply_f1_mut(state: &mut StateVector, fvecs: &FVectors) {
    fvecs.f1_sparse.reflect_mut(state);
}

pub fn apply_f2_mut(state: &mut StateVector, fvecs: &FVectors) {
    fvecs.f2_sparse.reflect_mut(state);
}

/// F = F₁ F₂.
pub fn apply_f_mut(state: &mut StateVector, fvecs: &FVectors) {
    apply_f2_mut(state, fvecs);
    apply_f1_mut(state, fvecs);
}

/// F through its definition cz A G̃ A G̃ cz (mark at the origin).
pub fn apply_f_walk_mut(state: &mut StateVector, params: InterpolationParams) {
    let config = MarkedConfig {
        marked: (0, 0),
        params,
    };
    apply_cz_mut(state);
    apply_gt_mut(state, &config);
    apply_a_mut(state);
    apply_gt_mut(state, &config);
    apply_a_mut(state);
    apply_cz_mut(state);
}

macro_rules! pure {
    ($(#[$m:meta])* $name:ident, $inner:ident $(, $arg:ident : $ty:ty)*) => {
        $(#[$m])*
        pub fn $name(state: &StateVector $(, $arg: $ty)*) -> StateVector {
            let mut s = state.clone();
            $inner(&mut s $(, $arg)*);
            s
        }
    };
}

pure!(apply_a, apply_a_mut);
pure!(apply_b, apply_b_mut);
pure!(apply_gt, apply_gt_mut, config: &MarkedConfig);
pure!(apply_u, apply_u_mut, config: &MarkedConfig);
pure!(apply_w, apply_w_mut);
pure!(apply_f1, apply_f1_mut, fvecs: &FVectors);
pure!(apply_f2, apply_f2_mut, fvecs: &FVectors);
pure!(apply_f, apply_f_mut, fvecs: &FVectors);
pure!(apply_f_walk, apply_f_walk_mut, params: InterpolationParams);

/// Intermediate walk step W F₁.
pub fn apply_wf1_mut(state: &mut StateVector, fvecs: &FVectors) {
    apply_f1_mut(state, fvecs);
    apply_w_mut(state);
}

/// W F.
pub fn apply_wf_mut(state: &mut StateVector, fvecs: &FVectors) {
    apply_f_mut(state, fvecs);
    apply_w_mut(state);
}

pure!(apply_wf1, apply_wf1_mut, fvecs: &FVectors);
pure!(apply_wf, apply_wf_mut, fvecs: &FVectors);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_state::{apply_cz, inner, uniform_state_z};

    fn dims(n: usize) -> GridDims {
        GridDims::square(n).unwrap()
    }

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn params_invariants() {
        for s in [0.0, 0.3, 0.9, 1.0] {
            let p = InterpolationParams::new(s).unwrap();
            assert!((p.eta().sin().powi(2) - 0.75 * s).abs() < 1e-14);
            assert!((p.lambda().norm() - 1.0).abs() < 1e-15);
            assert!(p.eta() <= std::f64::consts::FRAC_PI_3 + 1e-15);
        }
        assert!(
            (InterpolationParams::new(1.0).unwrap().eta() - std::f64::consts::FRAC_PI_3).abs()
                < 1e-15
        );
        assert!(InterpolationParams::new(1.2).is_err());
        let d = dims(16);
        assert!((InterpolationParams::default_for(d).s() - (1.0 - 1.0 / 257.0)).abs() < 1e-16);
    }

    #[test]
    fn a_examples() {
        let d = dims(4);
        let l = StateVector::selfloop(d);
        assert_eq!(apply_a(&l), l);
        let f = build_f_vectors(d, InterpolationParams::new(1.0).unwrap());
        let mut a00 = StateVector::zeros(d);
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            a00.amps_mut()[d.index(i, j)] = c(0.5);
        }
        assert!(apply_a(&a00).distance(&a00) < 1e-15);
        let x = apply_a(&StateVector::vertex(d, 0, 0));
        assert_eq!(x.at(0, 0), c(-0.5));
        assert_eq!(x.at(0, 1), c(0.5));
        assert_eq!(x.at(1, 0), c(0.5));
        assert_eq!(x.at(1, 1), c(0.5));
        assert!(inner(&f.kplus, &f.kminus).unwrap().norm() < 1e-15);
    }

    #[test]
    fn b_wraps_around() {
        let d = dims(4);
        let x = apply_b(&StateVector::vertex(d, 0, 0));
        // The odd block containing (0,0) is rows {3,0}, columns {3,0}.
        for (i, j) in [(3, 3), (3, 0), (0, 3)] {
            assert_eq!(x.at(i, j), c(0.5));
        }
        assert_eq!(x.at(0, 0), c(-0.5));
    }

    #[test]
    fn gt_examples() {
        let d = dims(4);
        let cfg = MarkedConfig::canonical(d);
        let g = cfg.g_tilde(d);
        assert!(apply_gt(&g, &cfg).distance(&g.scaled(c(-1.0))) < 1e-15);
        let one = MarkedConfig {
            marked: (0, 0),
            params: InterpolationParams::new(1.0).unwrap(),
        };
        let gv = StateVector::vertex(d, 0, 0);
        assert_eq!(apply_gt(&gv, &one), gv.scaled(c(-1.0)));
        let l = StateVector::selfloop(d);
        assert_eq!(apply_gt(&l, &one), l);
        let other = StateVector::vertex(d, 2, 3);
        assert_eq!(apply_gt(&other, &cfg), other);
    }

    #[test]
    fn f_vectors_examples() {
        let d = dims(16);
        let p = InterpolationParams::default_for(d);
        let f = build_f_vectors(d, p);
        let n = d.n() as f64;
        let mut expect = f.kminus.scaled(c((n / (n + 4.0)).sqrt()));
        expect.amps_mut()[d.selfloop()] = c(-2.0 / (n + 4.0).sqrt());
        assert!(f.f1.distance(&expect) < 1e-15);
        for v in [&f.f1, &f.f2, &f.kplus, &f.kminus] {
            assert!((v.norm() - 1.0).abs() < 1e-15);
        }
        assert!(inner(&f.f1, &f.kplus).unwrap().norm() < 1e-16);
    }

    #[test]
    fn f_eigenvectors() {
        let d = dims(4);
        for s in [0.2, 0.7, 1.0, 16.0 / 17.0] {
            let p = InterpolationParams::new(s).unwrap();
            let f = build_f_vectors(d, p);
            let fp = f.f_plus();
            assert!(apply_f_walk(&fp, p).distance(&fp.scaled(p.lambda())) < 1e-12);
            let fm = f.f_minus();
            assert!(apply_f_walk(&fm, p).distance(&fm.scaled(p.lambda().conj())) < 1e-12);
        }
    }

    #[test]
    fn f_is_identity_at_s_zero() {
        let d = dims(4);
        let p = InterpolationParams::new(0.0).unwrap();
        let f = build_f_vectors(d, p);
        for idx in 0..d.len() {
            let e = StateVector::basis(d, idx);
            assert!(apply_f(&e, &f).distance(&e) < 1e-15);
            assert!(apply_f_walk(&e, p).distance(&e) < 1e-15);
        }
    }

    #[test]
    fn w_fixes_piz_and_selfloop() {
        let d = dims(8);
        let pz = uniform_state_z(d);
        assert!(apply_w(&pz).distance(&pz) < 1e-15);
        let l = StateVector::selfloop(d);
        assert_eq!(apply_w(&l), l);
    }

    #[test]
    fn w_is_real() {
        let d = GridDims::new(6, 8).unwrap();
        let x = StateVector::random_real_unit(d, 3);
        assert!(apply_w(&x).max_imag() <= 1e-14);
    }

    #[test]
    fn u_equals_conjugated_wf() {
        let d = dims(8);
        let p = InterpolationParams::new(0.8).unwrap();
        let cfg = MarkedConfig {
            marked: (0, 0),
            params: p,
        };
        let f = build_f_vectors(d, p);
        for seed in 0..4 {
            let x = StateVector::random_unit(d, seed);
            let lhs = apply_u(&x, &cfg);
            let rhs = apply_cz(&apply_wf(&apply_cz(&x), &f));
            assert!(lhs.distance(&rhs) < 1e-13);
        }
    }
}
