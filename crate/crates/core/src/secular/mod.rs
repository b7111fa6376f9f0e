//! Eigenphases of a real unitary composed with a rank-one reflection.
//!
//! If a real unit vector |s⟩ has overlaps s₀ on the (+1)-eigenspace of a real
//! unitary T, s₋₁ on its (−1)-eigenspace and s_k on each conjugate pair of
//! eigenvectors with phases ±φ_k, then the eigenphases α of T(I − 2|s⟩⟨s|)
//! away from those of T are the roots of
//!
//! s₀² cot(α/2) + Σ s_k² [cot((α−φ_k)/2) + cot((α+φ_k)/2)] − s₋₁² tan(α/2) = 0,
//!
//! with eigenvector |s⟩ + i|e⊥⟩ whose coordinates are the cot/tan terms.

mod collapsed;

pub use collapsed::{
    asymptotic_sums, decompose_reflection_state, extract_slow_decomposition, slow_subspace_overlap,
    CollapsedModel, PairSource, PhaseGroup, ReflectionTarget, SlowEigenvectorDecomposition,
    WDirections, Wf1Directions, WhichWalk,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid_state::StateVector;

/// Closest distance to a pole at which the secular function is evaluated.
pub const POLE_GUARD: f64 = 1e-15;
/// Distance kept from each pole when bracketing a root.
pub const BRACKET_MARGIN: f64 = 1e-13;
/// Overlaps at or below this are treated as zero.
pub const ZERO_OVERLAP: f64 = 1e-14;
pub const MAX_BISECTIONS: usize = 200;
pub const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseWeight {
    pub phi: f64,
    pub s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionDecomposition {
    pub s0: f64,
    pub s_minus1: f64,
    pub pairs: Vec<PhaseWeight>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecularSolution {
    pub alpha: f64,
    /// Coordinates of |e⊥⟩ on T₀, then (T_k⁺, T_k⁻) per pair, then T₋₁.
    pub cot_coeffs: Vec<f64>,
    pub bracket: (f64, f64),
}

/// Coordinates of |e⟩ = |s⟩ + i|e⊥⟩ in the eigen-directions of T.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenCoefficients {
    pub t0: Complex64,
    pub pairs: Vec<(Complex64, Complex64)>,
    pub t_minus1: Complex64,
}

fn cot(x: f64) -> f64 {
    1.0 / x.tan()
}

impl ReflectionDecomposition {
    pub fn new(s0: f64, s_minus1: f64, pairs: Vec<PhaseWeight>) -> Result<Self> {
        let d = Self {
            s0,
            s_minus1,
            pairs,
        };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        if self.s0 < 0.0 || self.s_minus1 < 0.0 || self.pairs.iter().any(|p| p.s < 0.0) {
            return Err(Error::Config(
                "reflection overlaps must be nonnegative".into(),
            ));
        }
        for w in self.pairs.windows(2) {
            if w[0].phi >= w[1].phi {
                return Err(Error::Config(format!(
                    "pair phases must be strictly ascending ({} then {})",
                    w[0].phi, w[1].phi
                )));
            }
        }
        if self
            .pairs
            .iter()
            .any(|p| !(p.phi > 0.0 && p.phi < std::f64::consts::PI))
        {
            return Err(Error::Config("pair phases must lie in (0, π)".into()));
        }
        let total = self.total_weight();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::Config(format!(
                "reflection state is not unit: squared norm {total}"
            )));
        }
        Ok(())
    }

    /// s₀² + s₋₁² + Σ 2 s_k².
    pub fn total_weight(&self) -> f64 {
        self.s0 * self.s0
            + self.s_minus1 * self.s_minus1
            + self.pairs.iter().map(|p| 2.0 * p.s * p.s).sum::<f64>()
    }

    fn active_poles(&self) -> impl Iterator<Item = &PhaseWeight> {
        self.pairs.iter().filter(|p| p.s > ZERO_OVERLAP)
    }

    pub fn secular_eval(&self, alpha: f64) -> Result<f64> {
        use std::f64::consts::PI;
        for pole in [0.0, PI]
            .into_iter()
            .chain(self.pairs.iter().map(|p| p.phi))
        {
            if (alpha - pole).abs() < POLE_GUARD {
                return Err(Error::Pole { alpha, pole });
            }
        }
        Ok(self.eval_unchecked(alpha))
    }

    fn eval_unchecked(&self, alpha: f64) -> f64 {
        let mut v = self.s0 * self.s0 * cot(alpha / 2.0);
        for p in &self.pairs {
            v += p.s * p.s * (cot((alpha - p.phi) / 2.0) + cot((alpha + p.phi) / 2.0));
        }
        v - self.s_minus1 * self.s_minus1 * (alpha / 2.0).tan()
    }

    /// Sum of the absolute values of the terms; the natural size of the function at `alpha`.
    pub fn secular_scale(&self, alpha: f64) -> f64 {
        let mut v = (self.s0 * self.s0 * cot(alpha / 2.0)).abs();
        for p in &self.pairs {
            v += p.s * p.s * (cot((alpha - p.phi) / 2.0).abs() + cot((alpha + p.phi) / 2.0).abs());
        }
        v + (self.s_minus1 * self.s_minus1 * (alpha / 2.0).tan()).abs()
    }

    fn check_hypotheses(&self) -> Result<()> {
        if self.s0 <= ZERO_OVERLAP
            || self.s_minus1 <= ZERO_OVERLAP
            || self.active_poles().next().is_none()
        {
            return Err(Error::Numeric(format!(
                "interlacing hypotheses fail: s0 = {:e}, s-1 = {:e}, {} nonzero pairs",
                self.s0,
                self.s_minus1,
                self.active_poles().count()
            )));
        }
        Ok(())
    }

    fn bisect(&self, lo_pole: f64, hi_pole: f64) -> Result<SecularSolution> {
        let (mut lo, mut hi) = (lo_pole + BRACKET_MARGIN, hi_pole - BRACKET_MARGIN);
        let (flo, fhi) = (self.eval_unchecked(lo), self.eval_unchecked(hi));
        if !(flo > 0.0 && fhi < 0.0) {
            return Err(Error::Numeric(format!(
                "no sign change on ({lo_pole:e}, {hi_pole:e}): f(lo) = {flo:e}, f(hi) = {fhi:e}"
            )));
        }
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval_unchecked(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let alpha = 0.5 * (lo + hi);
        if hi - lo > REL_TOL * alpha {
            return Err(Error::Numeric(format!(
                "bisection did not converge on ({lo:e}, {hi:e})"
            )));
        }
        Ok(self.solution_at(alpha, (lo_pole, hi_pole)))
    }

    fn solution_at(&self, alpha: f64, bracket: (f64, f64)) -> SecularSolution {
        let c = self.eigen_coefficients(alpha);
        let mut cot_coeffs = vec![c.t0.im];
        for (p, m) in &c.pairs {
            cot_coeffs.push(p.im);
            cot_coeffs.push(m.im);
        }
        cot_coeffs.push(c.t_minus1.im);
        SecularSolution {
            alpha,
            cot_coeffs,
            bracket,
        }
    }

    /// The root in (0, first nonzero-overlap phase).
    pub fn smallest_eigenphase(&self) -> Result<SecularSolution> {
        self.check_hypotheses()?;
        let first = self.active_poles().next().expect("checked above").phi;
        self.bisect(0.0, first)
    }

    /// Every eigenphase in (0, π] that is not a phase of T: one root between
    /// each pair of consecutive active poles, ascending. When s₋₁ vanishes the
    /// last root sits exactly at π.
    pub fn all_eigenphases(&self) -> Result<Vec<SecularSolution>> {
        use std::f64::consts::PI;
        if self.s0 <= ZERO_OVERLAP {
            return Err(Error::Numeric(
                "the reflection state has no (+1) overlap".into(),
            ));
        }
        let mut poles = vec![0.0];
        poles.extend(self.active_poles().map(|p| p.phi));
        let mut out = Vec::with_capacity(poles.len());
        for w in poles.windows(2) {
            out.push(self.bisect(w[0], w[1])?);
        }
        let last = *poles.last().expect("nonempty");
        if self.s_minus1 > ZERO_OVERLAP {
            out.push(self.bisect(last, PI)?);
        } else {
            out.push(self.solution_at(PI, (last, PI)));
        }
        Ok(out)
    }

    pub fn eigen_coefficients(&self, alpha: f64) -> EigenCoefficients {
        let one_plus = |s: f64, x: f64| {
            if s == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(s, s * cot(x))
            }
        };
        let t_minus1 = if self.s_minus1 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(self.s_minus1, -self.s_minus1 * (alpha / 2.0).tan())
        };
        EigenCoefficients {
            t0: one_plus(self.s0, alpha / 2.0),
            pairs: self
                .pairs
                .iter()
                .map(|p| {
                    (
                        one_plus(p.s, (alpha - p.phi) / 2.0),
                        one_plus(p.s, (alpha + p.phi) / 2.0),
                    )
                })
                .collect(),
            t_minus1,
        }
    }

    /// ‖e‖² for the eigenvector at `alpha`.
    pub fn eigvec_norm_sqr(&self, alpha: f64) -> f64 {
        let sin2 = |x: f64| x.sin().powi(2);
        let mut v = self.s0 * self.s0 / sin2(alpha / 2.0);
        for p in &self.pairs {
            v +=
                p.s * p.s * (1.0 / sin2((alpha - p.phi) / 2.0) + 1.0 / sin2((alpha + p.phi) / 2.0));
        }
        if self.s_minus1 != 0.0 {
            v += self.s_minus1 * self.s_minus1 / (alpha / 2.0).cos().powi(2);
        }
        v
    }
}

/// Supplies the unit eigen-directions T₀, (T_k⁺, T_k⁻), T₋₁ of a decomposition,
/// each phased so that its overlap with the reflection state is s₀, s_k, s₋₁.
pub trait EigenDirections {
    fn t0(&self) -> StateVector;
    fn pair(&self, k: usize) -> (StateVector, StateVector);
    fn t_minus1(&self) -> Option<StateVector>;
}

/// Assembles |e⟩ = |s⟩ + i|e⊥⟩ from its coordinates (unnormalized).
pub fn slow_eigenvector(
    decomp: &ReflectionDecomposition,
    solution: &SecularSolution,
    dirs: &dyn EigenDirections,
) -> StateVector {
    let c = decomp.eigen_coefficients(solution.alpha);
    let mut e = dirs.t0().scaled(c.t0);
    for (k, (cp, cm)) in c.pairs.iter().enumerate() {
        if decomp.pairs[k].s == 0.0 {
            continue;
        }
        let (tp, tm) = dirs.pair(k);
        e.axpy(*cp, &tp);
        e.axpy(*cm, &tm);
    }
    if decomp.s_minus1 != 0.0 {
        if let Some(t) = dirs.t_minus1() {
            e.axpy(c.t_minus1, &t);
        }
    }
    e
}
