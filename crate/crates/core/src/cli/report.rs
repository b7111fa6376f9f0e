//! The data behind each mode: spectra listing, secular summary, scaling rows
//! and the verify suite.

use rayon::prelude::*;

use super::table::{Cell, Table};
use crate::error::{Error, Result};
use crate::grid_state::{
    apply_cz, apply_cz_mut, uniform_state, uniform_state_z, GridDims, MarkFrame, StateVector,
};
use crate::operators::dense::{self, DENSE_GUARD};
use crate::operators::{
    apply_a, apply_b, apply_f, apply_f1, apply_f2, apply_f_walk, apply_gt, apply_u, apply_u_mut,
    apply_w, apply_wf_mut, build_f_vectors, u0_state, InterpolationParams, MarkedConfig,
};
use crate::search::{amplify_selfloop_to_marked, run_baseline, run_main_walk, RunConfig};
use crate::secular::{asymptotic_sums, CollapsedModel};
use crate::spectra::{
    check_eigenbasis, eigenphase, enumerate_subspaces, verify_projection_identities,
};

/// Largest N for the O(N³) eigenbasis Gram check inside verify.
pub const GRAM_GUARD: usize = 1024;

pub fn spectra_table(dims: GridDims) -> Table {
    let mut t = Table::new(vec!["k", "l", "theta_kl", "dim", "subspace_id"]);
    for s in &enumerate_subspaces(dims).subspaces {
        t.push(vec![
            s.key.0.into(),
            s.key.1.into(),
            s.theta.into(),
            s.dim.into(),
            s.id.into(),
        ]);
    }
    t
}

/// α = θ₁₀/N, the point used for the asymptotic sums.
pub fn sums_alpha(dims: GridDims) -> Result<f64> {
    Ok(eigenphase(dims, 1, 0)? / dims.n() as f64)
}

pub fn secular_record(dims: GridDims, params: InterpolationParams) -> Result<Table> {
    dims.require_square()?;
    let m = CollapsedModel::new(dims, params)?;
    let beta = m.beta()?.alpha;
    let (s0, s4) = asymptotic_sums(dims, sums_alpha(dims)?)?;
    Ok(Table::record(vec![
        ("N", dims.n().into()),
        ("s", params.s().into()),
        ("phi1", m.phi1().alpha.into()),
        ("beta", beta.into()),
        ("g0_sq", m.g0_sq().into()),
        ("g1_sq", m.g1_sq().into()),
        ("overlap_WF1", m.overlap_wf1().into()),
        ("overlap_WF", m.overlap_wf(beta).into()),
        ("sum_S0", s0.into()),
        ("sum_S4", s4.into()),
    ]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub n_vertices: usize,
    pub phi1: f64,
    pub beta: f64,
    /// Largest p_selfloop over the first cycle, steps 0..=2⌊π/β⌋.
    pub p_peak: f64,
    pub baseline_peak: f64,
}

pub fn scaling_row(side: usize) -> Result<ScalingRow> {
    let dims = GridDims::square(side)?;
    let main = run_main_walk(RunConfig::new(dims).with_scan(true))?;
    let base = run_baseline(RunConfig::new(dims).with_s(1.0))?;
    Ok(ScalingRow {
        n_vertices: dims.n(),
        phi1: main.phi1.expect("auto policy"),
        beta: main.beta.expect("auto policy"),
        p_peak: main.peak_value,
        baseline_peak: base.peak_value,
    })
}

pub fn scaling_rows(sweep: &[usize]) -> Result<Vec<ScalingRow>> {
    if sweep.is_empty() {
        return Err(Error::Config("the scaling sweep is empty".into()));
    }
    for &n in sweep {
        GridDims::square(n)?;
    }
    sweep.par_iter().map(|&n| scaling_row(n)).collect()
}

pub fn scaling_table(rows: &[ScalingRow]) -> Table {
    let mut t = Table::new(vec![
        "N",
        "phi1",
        "beta",
        "phi1_sqrtNlogN",
        "beta_sqrtNlogN",
        "p_peak",
        "one_minus_p_times_logN",
        "baseline_peak_times_logN",
    ]);
    for r in rows {
        let n = r.n_vertices as f64;
        let root = (n * n.ln()).sqrt();
        t.push(vec![
            r.n_vertices.into(),
            r.phi1.into(),
            r.beta.into(),
            (r.phi1 * root).into(),
            (r.beta * root).into(),
            r.p_peak.into(),
            ((1.0 - r.p_peak) * n.ln()).into(),
            (r.baseline_peak * n.ln()).into(),
        ]);
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

struct Suite(Vec<Check>);

impl Suite {
    fn add(&mut self, name: &str, max_deviation: f64, tolerance: f64) {
        self.0.push(Check {
            name: name.into(),
            max_deviation,
            tolerance,
        });
    }
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

/// Runs every invariant that applies to the grid. Dense oracles are skipped
/// above DENSE_GUARD vertices and the secular checks on non-square grids.
pub fn verify_suite(
    dims: GridDims,
    marked: (usize, usize),
    params: InterpolationParams,
    seed: u64,
) -> Result<Vec<Check>> {
    let mut suite = Suite(Vec::new());
    let x = StateVector::random_unit(dims, seed);
    let cfg = MarkedConfig::new(dims, marked, params)?;
    let canon = MarkedConfig {
        marked: (0, 0),
        params,
    };
    let fv = build_f_vectors(dims, params);

    suite.add("a_involution", apply_a(&apply_a(&x)).distance(&x), 1e-12);
    suite.add("b_involution", apply_b(&apply_b(&x)).distance(&x), 1e-12);
    suite.add(
        "gt_involution",
        apply_gt(&apply_gt(&x, &cfg), &cfg).distance(&x),
        1e-12,
    );
    suite.add(
        "f1_involution",
        apply_f1(&apply_f1(&x, &fv), &fv).distance(&x),
        1e-12,
    );
    suite.add(
        "f2_involution",
        apply_f2(&apply_f2(&x, &fv), &fv).distance(&x),
        1e-12,
    );
    suite.add(
        "f_is_f1_f2",
        apply_f_walk(&x, params).distance(&apply_f(&x, &fv)),
        1e-12,
    );
    let conj = apply_cz(&apply_w(&apply_f(&apply_cz(&x), &fv)));
    suite.add("u_is_cz_wf_cz", apply_u(&x, &canon).distance(&conj), 1e-12);
    let frame = MarkFrame::new(dims, marked)?;
    let moved = frame.to_user(&apply_u(&frame.to_canonical(&x), &canon));
    suite.add(
        "mark_frame_equivariance",
        apply_u(&x, &cfg).distance(&moved),
        1e-12,
    );
    if params.one_minus_s() > 0.0 {
        let u0 = u0_state(dims, params)?;
        let r = max_of([
            apply_w(&u0).distance(&u0),
            apply_f1(&u0, &fv).distance(&u0),
            apply_f2(&u0, &fv).distance(&u0),
        ]);
        suite.add("u0_fixed_by_w_f1_f2", r, 1e-12);
    }

    if dims.n() <= DENSE_GUARD {
        let dev = max_of([
            dense::apply_matrix(&dense::matrix_a(dims)?, &x).distance(&apply_a(&x)),
            dense::apply_matrix(&dense::matrix_b(dims)?, &x).distance(&apply_b(&x)),
            dense::apply_matrix(&dense::matrix_gt(dims, &cfg)?, &x).distance(&apply_gt(&x, &cfg)),
            dense::apply_matrix(&dense::matrix_u(dims, &cfg)?, &x).distance(&apply_u(&x, &cfg)),
            dense::apply_matrix(&dense::matrix_w(dims)?, &x).distance(&apply_w(&x)),
            dense::apply_matrix(&dense::matrix_f(dims, params)?, &x).distance(&apply_f(&x, &fv)),
        ]);
        suite.add("dense_operators", dev, 1e-12);

        let u = dense::matrix_u(dims, &cfg)?;
        let mut oracle = uniform_state(dims);
        let mut kernel = oracle.clone();
        let mut dev: f64 = 0.0;
        for _ in 0..3 {
            oracle = dense::apply_matrix(&u, &oracle);
            apply_u_mut(&mut kernel, &cfg);
            dev = dev.max(oracle.distance(&kernel));
        }
        suite.add("walk_vs_dense_powers", dev, 1e-10);
    }

    let mut walk = uniform_state(dims);
    let mut conj = uniform_state_z(dims);
    let mut dev: f64 = 0.0;
    for _ in 0..3 {
        apply_u_mut(&mut walk, &canon);
        apply_wf_mut(&mut conj, &fv);
        let mut back = conj.clone();
        apply_cz_mut(&mut back);
        dev = dev.max(walk.distance(&back));
    }
    suite.add("u_powers_vs_cz_wf_powers", dev, 1e-10);

    if dims.n() <= GRAM_GUARD {
        let eb = check_eigenbasis(dims)?;
        suite.add("eigenvector_residual", eb.max_residual, 1e-10);
        suite.add("eigenvector_gram", eb.max_gram_deviation, 1e-10);
    }
    for (name, dev) in verify_projection_identities(dims).checks {
        suite.add(&format!("projection_{name}"), dev, 1e-10);
    }

    if dims.is_square() && params.one_minus_s() > 0.0 {
        let model = CollapsedModel::new(dims, params)?;
        let beta = model.beta()?.alpha;
        if dims.n() <= DENSE_GUARD {
            let w = dense::matrix_w(dims)?;
            let wf1 =
                dense::orthogonal_phases(&(&w * dense::matrix_f1(dims, params)?), 1e-9).positive;
            let wf =
                dense::orthogonal_phases(&(&w * dense::matrix_f(dims, params)?), 1e-9).positive;
            suite.add(
                "secular_phi1_vs_dense",
                (model.phi1().alpha - wf1[0]).abs(),
                1e-9,
            );
            suite.add("secular_beta_vs_dense", (beta - wf[0]).abs(), 1e-9);
            let predicted = model.predicted_wf1_phases();
            let dev = if predicted.len() == wf1.len() {
                max_of(predicted.iter().zip(&wf1).map(|(a, b)| (a - b).abs()))
            } else {
                f64::INFINITY
            };
            suite.add("wf1_interlacing", dev, 1e-9);
        }
        if params.s() == InterpolationParams::default_for(dims).s() {
            let slow = model.slow_decomposition();
            suite.add("slow_constraint1", slow.constraint1_residual, 1e-9);
            suite.add(
                "slow_selfloop_half",
                (slow.selfloop_overlap - 0.5).norm(),
                1e-9,
            );
        }
        let alpha = sums_alpha(dims)?;
        let (_, s4) = asymptotic_sums(dims, alpha)?;
        suite.add("sum_s4_nonnegative", (-s4).max(0.0), 0.0);
        let amp = amplify_selfloop_to_marked(dims, marked, params.s())?;
        suite.add("amplification_leakage", amp.leakage, 1e-12);
    }
    Ok(suite.0)
}

pub fn verify_table(checks: &[Check]) -> Table {
    let mut t = Table::new(vec!["check", "max_deviation", "tolerance", "pass"]);
    for c in checks {
        t.push(vec![
            c.name.clone().into(),
            c.max_deviation.into(),
            c.tolerance.into(),
            Cell::Bool(c.pass()),
        ]);
    }
    t
}
