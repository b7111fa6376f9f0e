//! Analytic eigensystem of W = cz B A cz.
//!
//! Every eigenvector is a product of a row factor and a column factor, each a
//! Fourier state modulated by a two-periodic pattern. Eigenvectors sharing a
//! phase are grouped into the invariant subspaces W_kl.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid_state::{GridDims, StateVector};
use crate::operators::{build_f_vectors, InterpolationParams, SparseReal};

fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Returns (1 − t/p, 1 + t/p) for p² = t² + rest without cancellation.
fn one_mp(t: f64, rest: f64, p: f64) -> (f64, f64) {
    if t >= 0.0 {
        let lo = rest / (p * (p + t));
        (lo, 2.0 - lo)
    } else {
        let hi = rest / (p * (p - t));
        (2.0 - hi, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralIndex {
    pub k: usize,
    pub l: usize,
    pub k_tilde: f64,
    pub l_tilde: f64,
    pub eps_k: f64,
    pub eps_l: f64,
    pub p: f64,
    pub theta: f64,
}

impl SpectralIndex {
    pub fn new(dims: GridDims, k: usize, l: usize) -> Result<Self> {
        if k >= dims.n_rows() / 2 || l >= dims.n_cols() / 2 {
            return Err(Error::Config(format!(
                "spectral index ({k},{l}) out of range for a {}x{} grid",
                dims.n_rows(),
                dims.n_cols()
            )));
        }
        let k_tilde = 2.0 * PI * k as f64 / dims.n_rows() as f64;
        let l_tilde = 2.0 * PI * l as f64 / dims.n_cols() as f64;
        let (ck, cl) = (k_tilde.cos(), l_tilde.cos());
        let (eps_k, eps_l) = (sign(ck), sign(cl));
        let p2 = (1.0 - ck * ck * cl * cl).max(0.0);
        let theta = eps_k * eps_l * (1.0 - 2.0 * p2).clamp(-1.0, 1.0).acos();
        Ok(Self {
            k,
            l,
            k_tilde,
            l_tilde,
            eps_k,
            eps_l,
            p: p2.sqrt(),
            theta,
        })
    }

    pub fn components(&self) -> EigenvectorComponents {
        if self.k == 0 && self.l == 0 {
            return EigenvectorComponents {
                r_plus: SQRT_2,
                r_minus: SQRT_2,
                c_plus: SQRT_2,
                c_minus: SQRT_2,
                s_plus: SQRT_2,
                s_minus: 0.0,
                d_plus: SQRT_2,
                d_minus: 0.0,
            };
        }
        let (sk, ck) = self.k_tilde.sin_cos();
        let (sl, cl) = self.l_tilde.sin_cos();
        let p = self.p;
        // r±² = 2(1 ± sin k̃ cos l̃ / p), with p² − (sin k̃ cos l̃)² = sin² l̃.
        let (rm, rp) = one_mp(sk * cl, sl * sl, p);
        let (cm, cp) = one_mp(ck * sl, sk * sk, p);
        // s±² = 1 ± sin l̃ / p and d±² = 1 ± sin k̃ / p.
        let (sm, spp) = one_mp(sl, cl * cl * sk * sk, p);
        let (dm, dp) = one_mp(sk, ck * ck * sl * sl, p);
        EigenvectorComponents {
            r_plus: (2.0 * rp).sqrt(),
            r_minus: (2.0 * rm).sqrt(),
            c_plus: (2.0 * cp).sqrt(),
            c_minus: (2.0 * cm).sqrt(),
            s_plus: spp.sqrt(),
            s_minus: self.eps_l * sm.sqrt(),
            d_plus: dp.sqrt(),
            d_minus: self.eps_k * dm.sqrt(),
        }
    }
}

/// Signed eigenphase θ_kl.
pub fn eigenphase(dims: GridDims, k: usize, l: usize) -> Result<f64> {
    Ok(SpectralIndex::new(dims, k, l)?.theta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenvectorComponents {
    pub r_plus: f64,
    pub r_minus: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    pub s_plus: f64,
    pub s_minus: f64,
    pub d_plus: f64,
    pub d_minus: f64,
}

/// Which of the row and column patterns carry the XZ flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flip {
    B00,
    B01,
    B10,
    B11,
}

impl Flip {
    pub const ALL: [Flip; 4] = [Flip::B00, Flip::B01, Flip::B10, Flip::B11];

    fn bits(self) -> (bool, bool) {
        match self {
            Flip::B00 => (false, false),
            Flip::B01 => (false, true),
            Flip::B10 => (true, false),
            Flip::B11 => (true, true),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Flip::B00 => "00",
            Flip::B01 => "01",
            Flip::B10 => "10",
            Flip::B11 => "11",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EigLabel {
    pub k: usize,
    pub l: usize,
    pub b: Flip,
}

impl EigLabel {
    pub fn new(k: usize, l: usize, b: Flip) -> Self {
        Self { k, l, b }
    }

    /// Eigenphase θ_kl, 0, 0, −θ_kl for B = 00, 01, 10, 11.
    pub fn phase(&self, dims: GridDims) -> Result<f64> {
        let theta = eigenphase(dims, self.k, self.l)?;
        Ok(match self.b {
            Flip::B00 => theta,
            Flip::B01 | Flip::B10 => 0.0,
            Flip::B11 => -theta,
        })
    }
}

/// Lazily evaluated eigenvector w^B_kl; any amplitude costs O(1).
#[derive(Debug, Clone, Copy)]
pub struct ProductEigenvector {
    dims: GridDims,
    k: usize,
    l: usize,
    rv: [f64; 2],
    cv: [f64; 2],
    phase_fix: Complex64,
    pub phase: f64,
}

impl ProductEigenvector {
    pub fn new(dims: GridDims, label: EigLabel) -> Result<Self> {
        let idx = SpectralIndex::new(dims, label.k, label.l)?;
        let c = idx.components();
        let mut rv = [0.5 * c.r_minus, 0.5 * c.r_plus];
        let mut cv = [0.5 * c.c_minus, 0.5 * c.c_plus];
        let (flip_r, flip_c) = label.b.bits();
        // XZ maps (a, b) to (−b, a).
        if flip_r {
            rv = [-rv[1], rv[0]];
        }
        if flip_c {
            cv = [-cv[1], cv[0]];
        }
        let mut w = Self {
            dims,
            k: label.k,
            l: label.l,
            rv,
            cv,
            phase_fix: Complex64::new(1.0, 0.0),
            phase: label.phase(dims)?,
        };
        // Canonical phase: the first nonzero amplitude in row-major order is real positive.
        let tol = 1e-9 / (dims.n() as f64).sqrt();
        let i0 = if w.row(0).norm() > tol { 0 } else { 1 };
        let j0 = if w.col(0).norm() > tol { 0 } else { 1 };
        let a = w.row(i0) * w.col(j0);
        w.phase_fix = a.conj() / a.norm();
        Ok(w)
    }

    fn row(&self, i: usize) -> Complex64 {
        let n = self.dims.n_rows() as f64;
        let ang = 2.0 * PI * ((i * self.k) % self.dims.n_rows()) as f64 / n;
        Complex64::from_polar((2.0 / n).sqrt() * self.rv[i % 2], ang)
    }

    fn col(&self, j: usize) -> Complex64 {
        let n = self.dims.n_cols() as f64;
        let ang = 2.0 * PI * ((j * self.l) % self.dims.n_cols()) as f64 / n;
        Complex64::from_polar((2.0 / n).sqrt() * self.cv[j % 2], ang)
    }

    pub fn amplitude(&self, i: usize, j: usize) -> Complex64 {
        self.row(i) * self.col(j) * self.phase_fix
    }

    /// Amplitude at a flat index; the selfloop amplitude is zero.
    pub fn amplitude_at(&self, idx: usize) -> Complex64 {
        match self.dims.coords(idx) {
            Some((i, j)) => self.amplitude(i, j),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// ⟨w|x⟩ for a sparse real x.
    pub fn overlap(&self, x: &SparseReal) -> Complex64 {
        x.entries
            .iter()
            .map(|&(i, v)| self.amplitude_at(i).conj() * v)
            .sum()
    }

    pub fn to_state(&self) -> StateVector {
        let rows: Vec<Complex64> = (0..self.dims.n_rows())
            .map(|i| self.row(i) * self.phase_fix)
            .collect();
        let cols: Vec<Complex64> = (0..self.dims.n_cols()).map(|j| self.col(j)).collect();
        let mut amps = Vec::with_capacity(self.dims.len());
        for r in &rows {
            amps.extend(cols.iter().map(|c| r * c));
        }
        amps.push(Complex64::new(0.0, 0.0));
        StateVector::from_amps(self.dims, amps).expect("length matches dims")
    }
}

/// The unit eigenvector w^B_kl of W.
pub fn eigenvector_w(dims: GridDims, label: EigLabel) -> Result<StateVector> {
    Ok(ProductEigenvector::new(dims, label)?.to_state())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceKind {
    /// θ = 0 labels together with the selfloop.
    PlusOne,
    Generic,
    /// k = n_rows/4.
    QuarterRow,
    /// l = n_cols/4.
    QuarterCol,
    /// k = 0.
    RowAxis,
    /// l = 0.
    ColAxis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceDescriptor {
    pub id: usize,
    pub kind: SubspaceKind,
    /// The (k, l) pair that names the subspace.
    pub key: (usize, usize),
    pub labels: Vec<EigLabel>,
    pub includes_selfloop: bool,
    /// Eigenphase in (−π, π]; eigenphase −π is reported as π.
    pub theta: f64,
    pub dim: usize,
    pub conjugate_id: usize,
    /// ‖Π|−⊥⟩‖ = √(2·dim/N) for every subspace except the (+1)-space.
    pub m_kl: f64,
}

impl SubspaceDescriptor {
    pub fn is_plus_one(&self) -> bool {
        self.kind == SubspaceKind::PlusOne
    }
}

#[derive(Debug, Clone)]
pub struct SubspacePartition {
    pub dims: GridDims,
    pub subspaces: Vec<SubspaceDescriptor>,
    /// The count printed in closed form for the non-(+1) subspaces.
    pub closed_form_count: usize,
    label_index: HashMap<EigLabel, usize>,
}

impl SubspacePartition {
    pub fn enumerated_count(&self) -> usize {
        self.subspaces.len()
    }

    /// Number of subspaces other than the (+1)-eigenspace.
    pub fn nontrivial_count(&self) -> usize {
        self.subspaces.len() - 1
    }

    pub fn count_mismatch(&self) -> bool {
        self.nontrivial_count() != self.closed_form_count
    }

    pub fn plus_one(&self) -> &SubspaceDescriptor {
        &self.subspaces[0]
    }

    pub fn subspace_of(&self, label: EigLabel) -> Option<&SubspaceDescriptor> {
        self.label_index.get(&label).map(|&i| &self.subspaces[i])
    }

    pub fn nontrivial(&self) -> impl Iterator<Item = &SubspaceDescriptor> {
        self.subspaces.iter().skip(1)
    }
}

/// Closed-form count of the non-(+1) invariant subspaces.
pub fn closed_form_subspace_count(dims: GridDims) -> usize {
    let (nr, nc) = (dims.n_rows(), dims.n_cols());
    if (nc / 2) % 2 == 1 {
        (nr + 2) * (nc - 2) / 8 + 1
    } else {
        (nr + 2) * nc / 8 + nr / 4 - 1
    }
}

/// Partitions all N eigenvectors plus the selfloop into invariant subspaces.
pub fn enumerate_subspaces(dims: GridDims) -> SubspacePartition {
    let (nr, nc) = (dims.n_rows(), dims.n_cols());
    let (hr, hc) = (nr / 2, nc / 2);
    let kp = |k: usize| if k == 0 { 0 } else { hr - k };
    let lp = |l: usize| if l == 0 { 0 } else { hc - l };
    let lab = EigLabel::new;
    use Flip::*;

    let mut raw: Vec<(SubspaceKind, (usize, usize), Vec<EigLabel>)> = Vec::new();
    let mut plus = Vec::with_capacity(dims.n() / 2 + 2);
    for k in 0..hr {
        for l in 0..hc {
            plus.push(lab(k, l, B01));
            plus.push(lab(k, l, B10));
        }
    }
    plus.push(lab(0, 0, B00));
    plus.push(lab(0, 0, B11));
    raw.push((SubspaceKind::PlusOne, (0, 0), plus));

    for k in 1..hr {
        if 4 * k == nr {
            continue;
        }
        for l in (1..hc).filter(|&l| 4 * l < nc) {
            raw.push((
                SubspaceKind::Generic,
                (k, l),
                vec![
                    lab(k, l, B00),
                    lab(kp(k), lp(l), B00),
                    lab(kp(k), l, B11),
                    lab(k, lp(l), B11),
                ],
            ));
        }
    }
    if nr % 4 == 0 {
        let k = nr / 4;
        for l in (1..hc).filter(|&l| 4 * l < nc) {
            raw.push((
                SubspaceKind::QuarterRow,
                (k, l),
                vec![
                    lab(k, l, B00),
                    lab(k, lp(l), B00),
                    lab(k, l, B11),
                    lab(k, lp(l), B11),
                ],
            ));
        }
    }
    if nc % 4 == 0 {
        let l = nc / 4;
        for k in (1..hr).filter(|&k| 4 * k <= nr) {
            let mut v = vec![
                lab(k, l, B00),
                lab(kp(k), l, B00),
                lab(kp(k), l, B11),
                lab(k, l, B11),
            ];
            let mut seen = Vec::new();
            v.retain(|x| {
                let fresh = !seen.contains(x);
                seen.push(*x);
                fresh
            });
            raw.push((SubspaceKind::QuarterCol, (k, l), v));
        }
    }
    for l in 1..hc {
        raw.push((
            SubspaceKind::RowAxis,
            (0, l),
            vec![lab(0, l, B00), lab(0, lp(l), B11)],
        ));
    }
    for k in 1..hr {
        raw.push((
            SubspaceKind::ColAxis,
            (k, 0),
            vec![lab(k, 0, B00), lab(kp(k), 0, B11)],
        ));
    }

    let mut label_index = HashMap::with_capacity(dims.n());
    for (id, (_, _, labels)) in raw.iter().enumerate() {
        for l in labels {
            label_index.insert(*l, id);
        }
    }
    let n = dims.n() as f64;
    let subspaces = raw
        .into_iter()
        .enumerate()
        .map(|(id, (kind, key, labels))| {
            let plus_one = kind == SubspaceKind::PlusOne;
            let first = labels[0];
            let mut theta = if plus_one {
                0.0
            } else {
                first.phase(dims).expect("enumerated label")
            };
            if (theta + PI).abs() < 1e-12 {
                theta = PI;
            }
            let dim = labels.len() + usize::from(plus_one);
            // The conjugate span contains w^11 with the same (k, l) as the first w^00.
            let conjugate_id = if plus_one || theta == PI {
                id
            } else {
                label_index[&EigLabel::new(first.k, first.l, Flip::B11)]
            };
            let m_kl = if plus_one {
                0.0
            } else {
                (2.0 * dim as f64 / n).sqrt()
            };
            SubspaceDescriptor {
                id,
                kind,
                key,
                labels,
                includes_selfloop: plus_one,
                theta,
                dim,
                conjugate_id,
                m_kl,
            }
        })
        .collect();
    SubspacePartition {
        dims,
        subspaces,
        closed_form_count: closed_form_subspace_count(dims),
        label_index,
    }
}

/// Orthogonal projection of `state` onto a subspace.
pub fn project(state: &StateVector, subspace: &SubspaceDescriptor) -> Result<StateVector> {
    let dims = state.dims();
    let mut out = StateVector::zeros(dims);
    for &label in &subspace.labels {
        let w = eigenvector_w(dims, label)?;
        let c = crate::grid_state::inner(&w, state)?;
        out.axpy(c, &w);
    }
    if subspace.includes_selfloop {
        out.amps_mut()[dims.selfloop()] = state.selfloop_amp();
    }
    Ok(out)
}

/// ⟨x|Π|y⟩ for sparse real x, y, in O(dim) time.
pub fn projected_inner(
    dims: GridDims,
    subspace: &SubspaceDescriptor,
    x: &SparseReal,
    y: &SparseReal,
) -> Complex64 {
    let mut acc: Complex64 = subspace
        .labels
        .iter()
        .map(|&l| {
            let w = ProductEigenvector::new(dims, l).expect("enumerated label");
            w.overlap(x).conj() * w.overlap(y)
        })
        .sum();
    if subspace.includes_selfloop {
        let at = |v: &SparseReal| {
            v.entries
                .iter()
                .filter(|e| e.0 == dims.selfloop())
                .map(|e| e.1)
                .sum::<f64>()
        };
        acc += at(x) * at(y);
    }
    acc
}

/// Maximum deviation of each projection identity over all subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub checks: Vec<(String, f64)>,
}

impl ProjectionReport {
    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().fold(0.0, |m, c| m.max(c.1))
    }
}

pub fn verify_projection_identities(dims: GridDims) -> ProjectionReport {
    let part = enumerate_subspaces(dims);
    let f = build_f_vectors(dims, InterpolationParams::new(1.0).expect("s = 1"));
    let (plus, minus) = (f.kplus_sparse(), f.kminus_sparse());
    let g = SparseReal {
        entries: vec![(dims.index(0, 0), 1.0)],
    };
    let a00 = SparseReal {
        entries: [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&(i, j)| (dims.index(i, j), 0.5))
            .collect(),
    };
    let n = dims.n() as f64;
    let mut perp: f64 = 0.0;
    let mut plus_norm: f64 = 0.0;
    let mut minus_norm: f64 = 0.0;
    let mut fact: f64 = 0.0;
    for sub in &part.subspaces {
        perp = perp.max(projected_inner(dims, sub, plus, minus).norm());
        let pp = projected_inner(dims, sub, plus, plus).re;
        let mm = projected_inner(dims, sub, minus, minus).re;
        let ga = projected_inner(dims, sub, &g, &a00);
        let d = sub.dim as f64;
        let (ep, em, ef) = if sub.is_plus_one() {
            (2.0 * (n + 2.0) / (3.0 * n), 4.0 / n, 0.5)
        } else {
            (2.0 * d / (3.0 * n), 2.0 * d / n, 0.0)
        };
        plus_norm = plus_norm.max((pp - ep).abs());
        minus_norm = minus_norm.max((mm - em).abs());
        fact = fact.max((ga - Complex64::new(ef, 0.0)).norm());
    }
    let gg = projected_inner(dims, part.plus_one(), &g, &g).re;
    let total: usize = part.subspaces.iter().map(|s| s.dim).sum();
    ProjectionReport {
        checks: vec![
            ("plus_perp_minus".into(), perp),
            ("plus_projection_norms".into(), plus_norm),
            ("minus_projection_norms".into(), minus_norm),
            ("g_pi_a00".into(), fact),
            ("g_pi00_g".into(), (gg - (n + 4.0) / (2.0 * n)).abs()),
            ("dimension_total".into(), (total as f64 - (n + 1.0)).abs()),
            (
                "plus_one_dimension".into(),
                (part.plus_one().dim as f64 - (n / 2.0 + 3.0)).abs(),
            ),
        ],
    }
}

/// Every label (k, l, B) with 0 ≤ k < n_rows/2, 0 ≤ l < n_cols/2.
pub fn all_labels(dims: GridDims) -> Vec<EigLabel> {
    let mut out = Vec::with_capacity(dims.n());
    for k in 0..dims.n_rows() / 2 {
        for l in 0..dims.n_cols() / 2 {
            out.extend(Flip::ALL.iter().map(|&b| EigLabel::new(k, l, b)));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenbasisCheck {
    /// max ‖W w − e^{iθ} w‖ over all N analytic eigenvectors.
    pub max_residual: f64,
    /// max |⟨w_a|w_b⟩ − δ_ab|.
    pub max_gram_deviation: f64,
}

/// Checks all N analytic eigenvectors against the W kernel. O(N³) for the Gram matrix.
pub fn check_eigenbasis(dims: GridDims) -> Result<EigenbasisCheck> {
    use rayon::prelude::*;
    let vecs: Vec<(StateVector, f64)> = all_labels(dims)
        .into_iter()
        .map(|l| Ok((eigenvector_w(dims, l)?, l.phase(dims)?)))
        .collect::<Result<_>>()?;
    let max_residual = vecs
        .par_iter()
        .map(|(w, theta)| {
            let mut r = crate::operators::apply_w(w);
            r.axpy(-Complex64::from_polar(1.0, *theta), w);
            r.norm()
        })
        .reduce(|| 0.0, f64::max);
    let max_gram_deviation = (0..vecs.len())
        .into_par_iter()
        .map(|a| {
            let mut m: f64 = 0.0;
            for b in a..vecs.len() {
                let ip: Complex64 = vecs[a]
                    .0
                    .amps()
                    .iter()
                    .zip(vecs[b].0.amps())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                m = m.max((ip - target).norm());
            }
            m
        })
        .reduce(|| 0.0, f64::max);
    Ok(EigenbasisCheck {
        max_residual,
        max_gram_deviation,
    })
}
