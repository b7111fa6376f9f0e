mod common;

use std::f64::consts::PI;

use common::*;
use latwalk::grid_state::{uniform_state_z, GridDims, StateVector};
use latwalk::operators::{apply_w, apply_wf, apply_wf1, build_f_vectors, InterpolationParams};
use latwalk::secular::*;
use latwalk::spectra::{all_labels, eigenphase};
use num_complex::Complex64;

struct DenseView {
    phi1: f64,
    beta: f64,
    wf1_phases: Vec<f64>,
    g0_sq: f64,
    g1_sq: f64,
    overlap_wf1: f64,
    overlap_wf: f64,
}

fn dense_view(n: usize, s: f64, oms: f64) -> DenseView {
    let d = dims(n);
    let w = oracle_w(d);
    let fv = build_f_vectors(d, InterpolationParams::new(s).unwrap());
    let f1 = to_dvec(&fv.f1);
    let id = nalgebra::DMatrix::<f64>::identity(d.len(), d.len());
    let wf1 = &w * (&id - 2.0 * &f1 * f1.transpose());
    let wf = &w * oracle_f(d, s, oms);
    let s1 = ortho_spectrum(&wf1);
    let s2 = ortho_spectrum(&wf);
    let wf1_phases = s1.positive_phases(1e-9);
    let (phi1, beta) = (wf1_phases[0], s2.positive_phases(1e-9)[0]);
    let f2 = to_dvec(&fv.f2);
    let mut x = to_dvec(&uniform_state_z(d));
    x[d.selfloop()] = 1.0;
    DenseView {
        phi1,
        beta,
        wf1_phases,
        g0_sq: s1.weight_at(1.0, 1e-9, &f2),
        g1_sq: 0.5 * s1.weight_at(phi1.cos(), 1e-9, &f2),
        overlap_wf1: s1.weight_at(phi1.cos(), 1e-9, &x).sqrt(),
        overlap_wf: s2.weight_at(beta.cos(), 1e-9, &x).sqrt(),
    }
}

#[test]
fn collapsed_model_matches_dense_default_weight() {
    for n in [8, 16] {
        let d = dims(n);
        let (s, oms) = default_weight(d);
        let o = dense_view(n, s, oms);
        let m = CollapsedModel::for_search(d).unwrap();
        let beta = m.beta().unwrap().alpha;
        assert!((m.phi1().alpha - o.phi1).abs() < 1e-9);
        assert!((beta - o.beta).abs() < 1e-9);
        assert!(
            (m.g0_sq() - o.g0_sq).abs() < 1e-9,
            "{} vs {}",
            m.g0_sq(),
            o.g0_sq
        );
        assert!(
            (m.g1_sq() - o.g1_sq).abs() < 1e-9,
            "{} vs {}",
            m.g1_sq(),
            o.g1_sq
        );
        assert!((m.overlap_wf1() - o.overlap_wf1).abs() < 1e-9);
        assert!((m.overlap_wf(beta) - o.overlap_wf).abs() < 1e-9);
        let pred = m.predicted_wf1_phases();
        assert_eq!(pred.len(), o.wf1_phases.len());
        for (a, b) in pred.iter().zip(&o.wf1_phases) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn collapsed_model_matches_dense_general_weight() {
    // n = 6 has no eigenphase π, so W F₁ gains a root exactly at π.
    for (n, s) in [(6, 0.4), (8, 0.7), (10, 0.9)] {
        let o = dense_view(n, s, 1.0 - s);
        let m = CollapsedModel::new(dims(n), InterpolationParams::new(s).unwrap()).unwrap();
        let beta = m.beta().unwrap().alpha;
        assert!((m.phi1().alpha - o.phi1).abs() < 1e-9, "n={n}");
        assert!((beta - o.beta).abs() < 1e-9, "n={n}");
        assert!((m.g0_sq() - o.g0_sq).abs() < 1e-9, "n={n}");
        assert!((m.overlap_wf(beta) - o.overlap_wf).abs() < 1e-9, "n={n}");
    }
}

#[test]
fn slow_eigenvectors_are_eigenvectors() {
    let d = dims(8);
    let m = CollapsedModel::for_search(d).unwrap();
    let fv = build_f_vectors(d, m.params);
    let e = m.slow_eigenvector_wf1().unwrap();
    let phi = m.phi1().alpha;
    let mut r = apply_wf1(&e, &fv);
    r.axpy(-Complex64::from_polar(1.0, phi), &e);
    assert!(r.norm() / e.norm() < 1e-8);
    // Normalized so that ⟨f₁|e⟩ = 1, hence (e^{iφ} − W) e = −2 W f₁.
    let f1_dot: Complex64 = fv
        .f1
        .amps()
        .iter()
        .zip(e.amps())
        .map(|(a, b)| a.conj() * b)
        .sum();
    assert!((f1_dot - 1.0).norm() < 1e-10);
    let mut lhs = e.scaled(Complex64::from_polar(1.0, phi));
    lhs.axpy(Complex64::new(-1.0, 0.0), &apply_w(&e));
    lhs.axpy(Complex64::new(2.0, 0.0), &apply_w(&fv.f1));
    assert!(lhs.norm() / e.norm() < 1e-8);
    let c = e.conj();
    let mut rc = apply_wf1(&c, &fv);
    rc.axpy(-Complex64::from_polar(1.0, -phi), &c);
    assert!(rc.norm() / c.norm() < 1e-8);

    let (beta, eb) = m.slow_eigenvector_wf().unwrap();
    let mut rb = apply_wf(&eb, &fv);
    rb.axpy(-Complex64::from_polar(1.0, beta.alpha), &eb);
    assert!(rb.norm() / eb.norm() < 1e-8);
}

#[test]
fn slow_eigenvector_with_minus_one_root() {
    let d = dims(6);
    let m = CollapsedModel::new(d, InterpolationParams::new(0.5).unwrap()).unwrap();
    let fv = build_f_vectors(d, m.params);
    let (beta, eb) = m.slow_eigenvector_wf().unwrap();
    let mut rb = apply_wf(&eb, &fv);
    rb.axpy(-Complex64::from_polar(1.0, beta.alpha), &eb);
    assert!(rb.norm() / eb.norm() < 1e-8);
}

#[test]
fn slow_decomposition_against_materialized_vector() {
    let d = dims(8);
    let n = d.n() as f64;
    let m = CollapsedModel::for_search(d).unwrap();
    let sd = m.slow_decomposition();
    let e = m.slow_eigenvector_wf1().unwrap();
    let pz = uniform_state_z(d);
    let ip: Complex64 = pz
        .amps()
        .iter()
        .zip(e.amps())
        .map(|(a, b)| a.conj() * b)
        .sum();
    let zeta = e.scaled(0.5 / ip);
    assert!((zeta.selfloop_amp() - sd.selfloop_overlap).norm() < 1e-10);
    let fv = build_f_vectors(d, m.params);
    let mut minus_perp = fv.kminus_sparse().to_state(d);
    minus_perp.axpy(Complex64::new(2.0 / n.sqrt(), 0.0), &pz);
    let a_direct: Complex64 = minus_perp
        .amps()
        .iter()
        .zip(zeta.amps())
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        / minus_perp.norm_sqr();
    assert!((a_direct - sd.a).norm() < 1e-10, "{a_direct} vs {}", sd.a);
    let mut psi = zeta.clone();
    psi.axpy(-sd.a, &minus_perp);
    psi.axpy(Complex64::new(-0.5, 0.0), &pz);
    psi.axpy(Complex64::new(-0.5, 0.0), &StateVector::selfloop(d));
    assert!((psi.real_part().norm() - sd.psi_real_norm).abs() < 1e-10);
    assert!(sd.constraint1_residual < 1e-10);
    assert!(sd.constraint2_residual < 1e-10);
}

#[test]
fn secular_roots_are_zeros() {
    let m = CollapsedModel::for_search(dims(16)).unwrap();
    for r in &m.wf1_roots {
        if r.alpha < PI {
            assert!(
                m.f1.secular_eval(r.alpha).unwrap().abs() <= 1e-9 * m.f1.secular_scale(r.alpha)
            );
            assert!(r.bracket.0 < r.alpha && r.alpha < r.bracket.1);
        }
    }
    let b = m.beta().unwrap();
    assert!(m.f2.secular_eval(b.alpha).unwrap().abs() <= 1e-9 * m.f2.secular_scale(b.alpha));
    assert!(m.f1.secular_eval(1e-8).unwrap() > 1e6);
}

#[test]
fn reflection_decompositions_are_unit() {
    for n in [8, 16, 32] {
        let d = dims(n);
        let s = InterpolationParams::default_for(d).s();
        let f1 = decompose_reflection_state(d, ReflectionTarget::F1, s).unwrap();
        let f2 = decompose_reflection_state(d, ReflectionTarget::F2, s).unwrap();
        assert!((f1.total_weight() - 1.0).abs() < 1e-10);
        assert!((f2.total_weight() - 1.0).abs() < 1e-10);
        assert!((f1.s0 * f1.s0 - 8.0 / (d.n() as f64 + 4.0)).abs() < 1e-14);
    }
    assert!(
        decompose_reflection_state(GridDims::new(8, 4).unwrap(), ReflectionTarget::F1, 0.5)
            .is_err()
    );
}

/// Brute force over every label, independent of the subspace grouping.
#[test]
fn asymptotic_sums_brute_force() {
    let d = dims(16);
    let alpha = eigenphase(d, 1, 0).unwrap() / d.n() as f64;
    let (mut s0, mut s4) = (0.0, 0.0);
    for l in all_labels(d) {
        let th = l.phase(d).unwrap();
        if th == 0.0 {
            continue;
        }
        let cot = |x: f64| 1.0 / x.tan();
        s0 += cot((th - alpha) / 2.0);
        s4 += (cot((th + alpha) / 2.0) - cot((th - alpha) / 2.0)).powi(2);
    }
    let (a0, a4) = asymptotic_sums(d, alpha).unwrap();
    assert!((a0 - s0).abs() < 1e-9 * s0.abs().max(1.0), "{a0} vs {s0}");
    assert!((a4 - s4).abs() < 1e-9 * s4, "{a4} vs {s4}");
}

#[test]
fn overlap_helper_matches_model() {
    let d = dims(16);
    let p = InterpolationParams::default_for(d);
    let m = CollapsedModel::for_search(d).unwrap();
    assert_eq!(
        slow_subspace_overlap(d, p, WhichWalk::Wf1).unwrap(),
        m.overlap_wf1()
    );
}
