//! Spectral analysis of W F₁ and W F in the collapsed basis.
//!
//! W is a scalar on every invariant subspace, and F₁, F₂ reflect about vectors
//! in span{|+⟩, |−⟩, |⟲⟩}. So only the normalized projections Π_E|−⟩ and
//! Π_E|+⟩ onto each distinct eigenphase E of W ever matter: f₁ has weight
//! s·2·dim_E/(N(4−3s)) on Π_E|−⟩, and W F₁ acts as W on every Π_E|+⟩. All
//! overlaps are known in closed form, so the secular equations for φ₁ and β
//! involve one term per distinct phase instead of N+1 coordinates.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{
    slow_eigenvector, EigenDirections, PhaseWeight, ReflectionDecomposition, SecularSolution,
};
use crate::error::{Error, Result};
use crate::grid_state::{uniform_state_z, GridDims, StateVector};
use crate::operators::{build_f_vectors, InterpolationParams, SparseReal};
use crate::spectra::{
    enumerate_subspaces, ProductEigenvector, SubspaceDescriptor, SubspacePartition,
};

/// Distinct eigenphases closer than this are merged into one group.
const PHASE_MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReflectionTarget {
    /// f₁ against W.
    F1,
    /// f₂ against W F₁.
    F2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhichWalk {
    Wf1,
    Wf,
}

/// All invariant subspaces sharing one eigenphase θ ∈ (0, π].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGroup {
    pub theta: f64,
    pub dim: usize,
    pub subspace_ids: Vec<usize>,
}

/// Origin of each conjugate pair in the decomposition of f₂ against W F₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSource {
    /// Π_E|+⟩ for the W phase group with this index.
    Group(usize),
    /// The W F₁ eigenvector at this root index.
    Root(usize),
}

#[derive(Debug, Clone)]
pub struct CollapsedModel {
    pub dims: GridDims,
    pub params: InterpolationParams,
    pub partition: SubspacePartition,
    /// Groups with θ ∈ (0, π), ascending.
    pub groups: Vec<PhaseGroup>,
    pub pi_group: Option<PhaseGroup>,
    /// f₁ against W.
    pub f1: ReflectionDecomposition,
    /// All eigenphases of W F₁ in (0, π] that are not phases of W; the first is φ₁.
    pub wf1_roots: Vec<SecularSolution>,
    /// f₂ against W F₁.
    pub f2: ReflectionDecomposition,
    pub f2_sources: Vec<PairSource>,
    /// Overlap of f₂ with Π_π|+⟩ and with the W F₁ eigenvector at π (if any).
    f2_minus1_parts: (f64, f64),
}

fn sign(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn cot(x: f64) -> f64 {
    1.0 / x.tan()
}

impl CollapsedModel {
    pub fn new(dims: GridDims, params: InterpolationParams) -> Result<Self> {
        let partition = enumerate_subspaces(dims);
        let (groups, pi_group) = phase_groups(&partition);
        let n = dims.n() as f64;
        let s = params.s();
        let denom = 1.0 + 3.0 * params.one_minus_s();
        let weight = |dim: usize| (s * 2.0 * dim as f64 / (n * denom)).sqrt();

        let s0 = ((4.0 * s / n + 4.0 * params.one_minus_s()) / denom).sqrt();
        let f1 = ReflectionDecomposition::new(
            s0,
            pi_group.as_ref().map_or(0.0, |g| weight(g.dim)),
            groups
                .iter()
                .map(|g| PhaseWeight {
                    phi: g.theta,
                    s: weight(g.dim),
                })
                .collect(),
        )?;
        let wf1_roots = f1.all_eigenphases()?;

        let two_eta = 2.0 * params.eta();
        let (sin2, cos2) = two_eta.sin_cos();
        let plus_weight = |dim: usize| sin2.abs() * (2.0 * dim as f64 / (3.0 * n)).sqrt();
        let mut pairs: Vec<(PhaseWeight, PairSource)> = groups
            .iter()
            .enumerate()
            .map(|(i, g)| {
                (
                    PhaseWeight {
                        phi: g.theta,
                        s: plus_weight(g.dim),
                    },
                    PairSource::Group(i),
                )
            })
            .collect();
        let mut root_at_pi = 0.0;
        for (j, r) in wf1_roots.iter().enumerate() {
            let w = cos2.abs() / f1.eigvec_norm_sqr(r.alpha).sqrt();
            if r.alpha < PI {
                pairs.push((PhaseWeight { phi: r.alpha, s: w }, PairSource::Root(j)));
            } else {
                root_at_pi = w;
            }
        }
        pairs.sort_by(|a, b| a.0.phi.partial_cmp(&b.0.phi).expect("finite phases"));
        let pi_plus = pi_group.as_ref().map_or(0.0, |g| plus_weight(g.dim));
        let f2 = ReflectionDecomposition::new(
            sin2.abs() * (2.0 * (n + 2.0) / (3.0 * n)).sqrt(),
            pi_plus.hypot(root_at_pi),
            pairs.iter().map(|p| p.0).collect(),
        )?;
        Ok(Self {
            dims,
            params,
            partition,
            groups,
            pi_group,
            f1,
            wf1_roots,
            f2,
            f2_sources: pairs.iter().map(|p| p.1).collect(),
            f2_minus1_parts: (pi_plus, root_at_pi),
        })
    }

    /// Square grid with the default weight s = 1 − 1/(N+1).
    pub fn for_search(dims: GridDims) -> Result<Self> {
        dims.require_square()?;
        Self::new(dims, InterpolationParams::default_for(dims))
    }

    pub fn phi1(&self) -> &SecularSolution {
        &self.wf1_roots[0]
    }

    pub fn beta(&self) -> Result<SecularSolution> {
        self.f2.smallest_eigenphase()
    }

    /// Components of the (+1)-projection of f₁ along |π_z⟩ and |⟲⟩.
    fn f1_plus_one_parts(&self) -> (f64, f64) {
        let n = self.dims.n() as f64;
        let norm = (1.0 + 3.0 * self.params.one_minus_s()).sqrt();
        (
            -2.0 * self.params.s().sqrt() / (n.sqrt() * norm),
            -2.0 * self.params.one_minus_s().sqrt() / norm,
        )
    }

    /// ⟨π_z + ⟲ | ê_α⟩ for the unit W F₁ eigenvector at root `alpha`.
    fn target_overlap_wf1(&self, alpha: f64) -> Complex64 {
        let (pz, lp) = self.f1_plus_one_parts();
        Complex64::new(1.0, cot(alpha / 2.0)) * (pz + lp) / self.f1.eigvec_norm_sqr(alpha).sqrt()
    }

    pub fn g0_sq(&self) -> f64 {
        self.f2.s0 * self.f2.s0
    }

    /// Squared overlap of f₂ with the φ₁-eigenvector of W F₁.
    pub fn g1_sq(&self) -> f64 {
        let k = self
            .f2_sources
            .iter()
            .position(|s| *s == PairSource::Root(0))
            .expect("φ₁ is a pair");
        self.f2.pairs[k].s.powi(2)
    }

    /// ‖Π_{φ₁}(|π_z⟩ + |⟲⟩)‖ for W F₁.
    pub fn overlap_wf1(&self) -> f64 {
        2f64.sqrt() * self.target_overlap_wf1(self.phi1().alpha).norm()
    }

    /// ‖Π_β(|π_z⟩ + |⟲⟩)‖ for W F.
    pub fn overlap_wf(&self, beta: f64) -> f64 {
        let sigma = sign((2.0 * self.params.eta()).cos());
        let c = self.f2.eigen_coefficients(beta);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, src) in self.f2_sources.iter().enumerate() {
            if let PairSource::Root(j) = *src {
                let t = self.target_overlap_wf1(self.wf1_roots[j].alpha) * sigma;
                acc += c.pairs[k].0 * t + c.pairs[k].1 * t.conj();
            }
        }
        if self.f2.s_minus1 > 0.0 && self.f2_minus1_parts.1 > 0.0 {
            let t = self.target_overlap_wf1(PI) * sigma * self.f2_minus1_parts.1 / self.f2.s_minus1;
            acc += c.t_minus1 * t;
        }
        2f64.sqrt() * acc.norm() / self.f2.eigvec_norm_sqr(beta).sqrt()
    }

    /// Rescales the φ₁-eigenvector to ⟨π_z|ζ⟩ = ½ and splits it as
    /// ζ = a|−⊥⟩ + ½|π_z⟩ + ½|⟲⟩ + |ψ⟩.
    pub fn slow_decomposition(&self) -> SlowEigenvectorDecomposition {
        let n = self.dims.n() as f64;
        let phi = self.phi1().alpha;
        let c = self.f1.eigen_coefficients(phi);
        let (pz, lp) = self.f1_plus_one_parts();
        // ⟨π_z|ζ⟩ = scale · t₀ · ⟨π_z|d₀⟩ with d₀ = P₊₁ f₁ / s₀.
        let scale = 0.5 / (c.t0 * pz / self.f1.s0);
        let selfloop_overlap = scale * c.t0 * lp / self.f1.s0;
        let m = |dim: usize| (2.0 * dim as f64 / n).sqrt();
        let m_pi = self.pi_group.as_ref().map_or(0.0, |g| m(g.dim));
        let mut proj = Complex64::new(0.0, 0.0);
        for (g, (tp, tm)) in self.groups.iter().zip(&c.pairs) {
            proj += (tp + tm) * scale * m(g.dim);
        }
        proj += c.t_minus1 * scale * m_pi;
        let a = proj / (1.0 - 4.0 / n);

        let rho = (Complex64::from_polar(1.0, phi) - 1.0) * (n.sqrt() / 4.0);
        let predicted = |theta: f64, mm: f64| -> Complex64 {
            mm * (a - rho / (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, phi - theta)))
        };
        let mut re_sq = (selfloop_overlap - 0.5).re.powi(2);
        let (mut c2, mut c2_literal) = (0.0f64, 0.0f64);
        for (g, (tp, tm)) in self.groups.iter().zip(&c.pairs) {
            let mm = m(g.dim);
            let xp = scale * tp - a * mm;
            let xm = scale * tm - a * mm;
            re_sq += 2.0 * ((xp + xm.conj()) * 0.5).norm_sqr();
            for (x, theta) in [(xp, g.theta), (xm, -g.theta)] {
                c2 = c2.max((x + predicted(theta, mm)).norm());
                c2_literal = c2_literal.max((x - predicted(theta, mm)).norm());
            }
        }
        if let Some(g) = &self.pi_group {
            let x = scale * c.t_minus1 - a * m_pi;
            re_sq += x.re.powi(2);
            c2 = c2.max((x + predicted(PI, m_pi)).norm());
            c2_literal = c2_literal.max((x - predicted(PI, m_pi)).norm());
            debug_assert!(g.dim > 0);
        }
        let lhs = a * (8.0 * (n - 4.0) / (n.sqrt() * (n + 4.0))) - 16.0 / (n + 4.0);
        SlowEigenvectorDecomposition {
            phi1: phi,
            a,
            psi_real_norm: re_sq.sqrt(),
            selfloop_overlap,
            constraint1_residual: (lhs - (Complex64::from_polar(1.0, phi) - 1.0)).norm(),
            constraint2_residual: c2,
            constraint2_literal_residual: c2_literal,
        }
    }

    /// The φ₁-eigenvector of W F₁ as a state vector (unnormalized, O(N²) work).
    pub fn slow_eigenvector_wf1(&self) -> Result<StateVector> {
        Ok(slow_eigenvector(
            &self.f1,
            self.phi1(),
            &WDirections::new(self),
        ))
    }

    /// The β-eigenvector of W F as a state vector (unnormalized, O(N²) work).
    pub fn slow_eigenvector_wf(&self) -> Result<(SecularSolution, StateVector)> {
        let beta = self.beta()?;
        let v = slow_eigenvector(&self.f2, &beta, &Wf1Directions::new(self));
        Ok((beta, v))
    }

    /// Every eigenphase of W F₁ in (0, π), ascending, with multiplicity: each
    /// phase group of W keeps dim − 1 eigenvectors and one root lies strictly
    /// between consecutive groups.
    pub fn predicted_wf1_phases(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .wf1_roots
            .iter()
            .map(|r| r.alpha)
            .filter(|&a| a < PI)
            .collect();
        for g in &self.groups {
            out.extend(std::iter::repeat_n(g.theta, g.dim - 1));
        }
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite phases"));
        out
    }

    pub fn decomposition(&self, target: ReflectionTarget) -> &ReflectionDecomposition {
        match target {
            ReflectionTarget::F1 => &self.f1,
            ReflectionTarget::F2 => &self.f2,
        }
    }
}

fn phase_groups(partition: &SubspacePartition) -> (Vec<PhaseGroup>, Option<PhaseGroup>) {
    let mut positive: Vec<&SubspaceDescriptor> = partition
        .nontrivial()
        .filter(|s| s.theta > 0.0 && s.theta < PI)
        .collect();
    positive.sort_by(|a, b| a.theta.partial_cmp(&b.theta).expect("finite phases"));
    let mut groups: Vec<PhaseGroup> = Vec::new();
    for s in positive {
        match groups.last_mut() {
            Some(g) if (s.theta - g.theta).abs() <= PHASE_MERGE_TOL => {
                g.dim += s.dim;
                g.subspace_ids.push(s.id);
            }
            _ => groups.push(PhaseGroup {
                theta: s.theta,
                dim: s.dim,
                subspace_ids: vec![s.id],
            }),
        }
    }
    let pis: Vec<&SubspaceDescriptor> = partition.nontrivial().filter(|s| s.theta == PI).collect();
    let pi_group = (!pis.is_empty()).then(|| PhaseGroup {
        theta: PI,
        dim: pis.iter().map(|s| s.dim).sum(),
        subspace_ids: pis.iter().map(|s| s.id).collect(),
    });
    (groups, pi_group)
}

/// Π x for a sparse real x and a set of subspaces (no selfloop term).
fn project_sparse(
    dims: GridDims,
    partition: &SubspacePartition,
    ids: &[usize],
    x: &SparseReal,
) -> StateVector {
    let mut out = StateVector::zeros(dims);
    for &id in ids {
        for &label in &partition.subspaces[id].labels {
            let w = ProductEigenvector::new(dims, label).expect("enumerated label");
            let c = w.overlap(x);
            out.axpy(c, &w.to_state());
        }
    }
    out
}

fn normalized(mut v: StateVector) -> StateVector {
    v.normalize();
    v
}

/// Eigen-directions of W seen by f₁.
pub struct WDirections<'a> {
    model: &'a CollapsedModel,
    f1: SparseReal,
}

impl<'a> WDirections<'a> {
    pub fn new(model: &'a CollapsedModel) -> Self {
        Self {
            model,
            f1: build_f_vectors(model.dims, model.params)
                .f1_sparse()
                .clone(),
        }
    }
}

impl EigenDirections for WDirections<'_> {
    fn t0(&self) -> StateVector {
        let m = self.model;
        let (pz, lp) = m.f1_plus_one_parts();
        let mut v = uniform_state_z(m.dims).scaled(Complex64::new(pz / m.f1.s0, 0.0));
        v.amps_mut()[m.dims.selfloop()] = Complex64::new(lp / m.f1.s0, 0.0);
        v
    }

    fn pair(&self, k: usize) -> (StateVector, StateVector) {
        let m = self.model;
        let d = normalized(project_sparse(
            m.dims,
            &m.partition,
            &m.groups[k].subspace_ids,
            &self.f1,
        ));
        let c = d.conj();
        (d, c)
    }

    fn t_minus1(&self) -> Option<StateVector> {
        let m = self.model;
        m.pi_group.as_ref().map(|g| {
            normalized(project_sparse(
                m.dims,
                &m.partition,
                &g.subspace_ids,
                &self.f1,
            ))
        })
    }
}

/// Eigen-directions of W F₁ seen by f₂.
pub struct Wf1Directions<'a> {
    model: &'a CollapsedModel,
    kplus: SparseReal,
    w: WDirections<'a>,
}

impl<'a> Wf1Directions<'a> {
    pub fn new(model: &'a CollapsedModel) -> Self {
        Self {
            model,
            kplus: build_f_vectors(model.dims, model.params)
                .kplus_sparse()
                .clone(),
            w: WDirections::new(model),
        }
    }

    /// Unit W F₁ eigenvector at root j, phased so its overlap with f₁ is positive.
    pub fn root_vector(&self, j: usize) -> StateVector {
        let m = self.model;
        normalized(slow_eigenvector(&m.f1, &m.wf1_roots[j], &self.w))
    }

    fn sigma(&self) -> Complex64 {
        Complex64::new(sign((2.0 * self.model.params.eta()).cos()), 0.0)
    }
}

impl EigenDirections for Wf1Directions<'_> {
    fn t0(&self) -> StateVector {
        let m = self.model;
        let ids = [m.partition.plus_one().id];
        normalized(project_sparse(m.dims, &m.partition, &ids, &self.kplus))
    }

    fn pair(&self, k: usize) -> (StateVector, StateVector) {
        let m = self.model;
        let v = match m.f2_sources[k] {
            PairSource::Group(i) => normalized(project_sparse(
                m.dims,
                &m.partition,
                &m.groups[i].subspace_ids,
                &self.kplus,
            )),
            PairSource::Root(j) => self.root_vector(j).scaled(self.sigma()),
        };
        let c = v.conj();
        (v, c)
    }

    fn t_minus1(&self) -> Option<StateVector> {
        let m = self.model;
        let (plus_part, root_part) = m.f2_minus1_parts;
        if m.f2.s_minus1 == 0.0 {
            return None;
        }
        let mut v = StateVector::zeros(m.dims);
        if let Some(g) = &m.pi_group {
            let h = normalized(project_sparse(
                m.dims,
                &m.partition,
                &g.subspace_ids,
                &self.kplus,
            ));
            v.axpy(Complex64::new(plus_part, 0.0), &h);
        }
        if root_part > 0.0 {
            let j = m.wf1_roots.len() - 1;
            v.axpy(self.sigma() * root_part, &self.root_vector(j));
        }
        Some(v.scaled(Complex64::new(1.0 / m.f2.s_minus1, 0.0)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowEigenvectorDecomposition {
    pub phi1: f64,
    /// Coefficient of |−⊥⟩ = |−⟩ + (2/√N)|π_z⟩.
    pub a: Complex64,
    pub psi_real_norm: f64,
    /// ⟨⟲|ζ⟩; equals ½ at the default weight.
    pub selfloop_overlap: Complex64,
    /// |8a(N−4)/(√N(N+4)) − 16/(N+4) − (e^{iφ₁} − 1)|.
    pub constraint1_residual: f64,
    /// Largest |⟨−_E|ψ⟩ + m_E[a − (√N/4)(e^{iφ₁} − 1)/(1 − e^{i(φ₁−θ_E)})]| over phase groups.
    pub constraint2_residual: f64,
    /// The same with the bracket entering with a plus sign.
    pub constraint2_literal_residual: f64,
}

/// Overlaps of f₁ with the eigenphases of W, or of f₂ with those of W F₁.
pub fn decompose_reflection_state(
    dims: GridDims,
    target: ReflectionTarget,
    s: f64,
) -> Result<ReflectionDecomposition> {
    dims.require_square()?;
    let model = CollapsedModel::new(dims, InterpolationParams::new(s)?)?;
    Ok(model.decomposition(target).clone())
}

/// Slow-eigenvector decomposition at the default weight.
pub fn extract_slow_decomposition(dims: GridDims) -> Result<SlowEigenvectorDecomposition> {
    Ok(CollapsedModel::for_search(dims)?.slow_decomposition())
}

pub fn slow_subspace_overlap(
    dims: GridDims,
    params: InterpolationParams,
    which: WhichWalk,
) -> Result<f64> {
    dims.require_square()?;
    let model = CollapsedModel::new(dims, params)?;
    Ok(match which {
        WhichWalk::Wf1 => model.overlap_wf1(),
        WhichWalk::Wf => model.overlap_wf(model.beta()?.alpha),
    })
}

/// S0 = Σ dim·cot((θ−α)/2) and S4 = Σ dim·[cot((θ+α)/2) − cot((θ−α)/2)]²
/// over every subspace except the (+1)-eigenspace, with signed θ.
pub fn asymptotic_sums(dims: GridDims, alpha: f64) -> Result<(f64, f64)> {
    let part = enumerate_subspaces(dims);
    let min_theta = part.nontrivial().map(|s| s.theta.abs()).fold(PI, f64::min);
    if !(alpha > 0.0 && alpha < min_theta) {
        return Err(Error::Config(format!(
            "alpha must lie in (0, {min_theta}), got {alpha}"
        )));
    }
    let (mut s0, mut s4) = (0.0, 0.0);
    for s in part.nontrivial() {
        let d = s.dim as f64;
        let minus = cot((s.theta - alpha) / 2.0);
        s0 += d * minus;
        s4 += d * (cot((s.theta + alpha) / 2.0) - minus).powi(2);
    }
    Ok((s0, s4))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f1_weights_match_closed_form() {
        let d = GridDims::square(16).unwrap();
        let m = CollapsedModel::for_search(d).unwrap();
        assert!((m.f1.s0.powi(2) - 8.0 / 260.0).abs() < 1e-15);
        assert!((m.f1.total_weight() - 1.0).abs() < 1e-12);
        assert!((m.f2.total_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phi1_below_first_phase() {
        let d = GridDims::square(16).unwrap();
        let m = CollapsedModel::for_search(d).unwrap();
        let phi = m.phi1().alpha;
        assert!(phi > 0.0 && phi < PI / 4.0);
        assert!(m.beta().unwrap().alpha < phi);
    }

    #[test]
    fn constraint_one_holds() {
        let d = GridDims::square(16).unwrap();
        let s = extract_slow_decomposition(d).unwrap();
        assert!(s.constraint1_residual < 1e-12, "{s:?}");
        assert!(s.constraint2_residual < 1e-12, "{s:?}");
        assert!((s.selfloop_overlap - 0.5).norm() < 1e-12);
    }

    #[test]
    fn sums_reject_bad_alpha() {
        let d = GridDims::square(16).unwrap();
        assert!(asymptotic_sums(d, 3.0).is_err());
        assert!(asymptotic_sums(d, 0.0).is_err());
        assert!(asymptotic_sums(d, 0.01).is_ok());
    }

    #[test]
    fn handles_grids_without_pi_phase() {
        // n ≡ 2 mod 4: no eigenphase π, so W F₁ has a root exactly at π.
        let d = GridDims::square(6).unwrap();
        let m = CollapsedModel::for_search(d).unwrap();
        assert!(m.pi_group.is_none());
        assert_eq!(m.wf1_roots.last().unwrap().alpha, PI);
        assert!((m.f2.total_weight() - 1.0).abs() < 1e-12);
        assert!(m.beta().unwrap().alpha < m.phi1().alpha);
    }
}
