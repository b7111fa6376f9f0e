mod common;

use std::f64::consts::PI;

use common::*;
use latwalk::grid_state::{GridDims, StateVector};
use latwalk::operators::{build_f_vectors, InterpolationParams};
use latwalk::spectra::*;
use num_complex::Complex64;

fn dense_residual(d: GridDims) -> f64 {
    let w = oracle_w(d);
    all_labels(d)
        .into_iter()
        .map(|l| {
            let v = eigenvector_w(d, l).unwrap();
            let mut r = apply(&w, &v);
            r.axpy(-Complex64::from_polar(1.0, l.phase(d).unwrap()), &v);
            r.norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn analytic_eigenvectors_against_dense_w() {
    for (r, c) in [(8, 8), (6, 10), (12, 8)] {
        let d = GridDims::new(r, c).unwrap();
        assert!(dense_residual(d) < 1e-12, "{r}x{c}");
        let chk = check_eigenbasis(d).unwrap();
        assert!(chk.max_gram_deviation < 1e-12, "{r}x{c}: {chk:?}");
    }
}

#[test]
fn subspace_projectors_sum_to_identity() {
    let d = dims(8);
    let part = enumerate_subspaces(d);
    let x = StateVector::random_unit(d, 5);
    let mut total = StateVector::zeros(d);
    for s in &part.subspaces {
        total.axpy(Complex64::new(1.0, 0.0), &project(&x, s).unwrap());
    }
    assert!(total.distance(&x) < 1e-12);
}

#[test]
fn subspaces_carry_one_phase() {
    let d = GridDims::new(8, 12).unwrap();
    let part = enumerate_subspaces(d);
    for s in &part.subspaces {
        for l in &s.labels {
            let th = l.phase(d).unwrap();
            let diff = (th - s.theta).rem_euclid(2.0 * PI);
            assert!(diff.min(2.0 * PI - diff) < 1e-12, "{l:?} in {}", s.id);
        }
        assert_eq!(s.dim, s.labels.len() + usize::from(s.includes_selfloop));
    }
}

#[test]
fn plus_one_dimension() {
    for n in [4, 8, 16, 32] {
        assert_eq!(enumerate_subspaces(dims(n)).plus_one().dim, n * n / 2 + 3);
    }
}

#[test]
fn dense_plus_one_dimension_matches() {
    let d = dims(8);
    let sp = ortho_spectrum(&oracle_w(d));
    let count = sp.cosines.iter().filter(|&&c| c > 1.0 - 1e-9).count();
    assert_eq!(count, enumerate_subspaces(d).plus_one().dim);
}

#[test]
fn projection_norms_from_full_states() {
    let d = dims(8);
    let n = d.n() as f64;
    let fv = build_f_vectors(d, InterpolationParams::new(1.0).unwrap());
    let plus = fv.kplus_sparse().to_state(d);
    let minus = fv.kminus_sparse().to_state(d);
    let part = enumerate_subspaces(d);
    for s in &part.subspaces {
        let pp = project(&plus, s).unwrap().norm_sqr();
        let pm = project(&minus, s).unwrap().norm_sqr();
        let dim = s.dim as f64;
        if s.is_plus_one() {
            assert!((pp - 2.0 * (n + 2.0) / (3.0 * n)).abs() < 1e-12);
            assert!((pm - 4.0 / n).abs() < 1e-12);
        } else {
            assert!((pp - 2.0 * dim / (3.0 * n)).abs() < 1e-12);
            assert!((pm - 2.0 * dim / n).abs() < 1e-12);
        }
    }
}

#[test]
fn closed_form_count_pattern() {
    for (r, c) in [(8, 8), (16, 16), (8, 12), (12, 16)] {
        let p = enumerate_subspaces(GridDims::new(r, c).unwrap());
        assert!(!p.count_mismatch(), "{r}x{c}");
    }
    for (r, c) in [(6, 6), (10, 10), (8, 6)] {
        let p = enumerate_subspaces(GridDims::new(r, c).unwrap());
        assert!(p.nontrivial_count() > p.closed_form_count, "{r}x{c}");
    }
}

#[test]
fn theta_of_first_index() {
    for n in [16, 32, 64] {
        let d = dims(n);
        let th = eigenphase(d, 1, 0).unwrap();
        assert!(th > 0.0 && th < 4.0 * PI / n as f64 + 1e-12);
        let min = enumerate_subspaces(d)
            .nontrivial()
            .map(|s| s.theta.abs())
            .fold(PI, f64::min);
        assert!((min - th).abs() < 1e-15);
    }
}
