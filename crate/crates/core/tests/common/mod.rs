// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use covpovm::linalg::{hermitian_span_basis, normalized, ComplexMatrix, C64};
use covpovm::povm::Povm;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn random_vector<R: Rng>(d: usize, rng: &mut R) -> Vec<C64> {
    (0..d)
        .map(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect()
}

pub fn random_unit<R: Rng>(d: usize, rng: &mut R) -> Vec<C64> {
    normalized(&random_vector(d, rng))
}

pub fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(d, d, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    a.hermitian_part()
}

/// Random density matrix of full rank.
pub fn random_state<R: Rng>(d: usize, rng: &mut R) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(d, d, |_, _| {
        C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let rho = a.matmul(&a.adjoint());
    let t = rho.trace().re;
    rho.scale_real(1.0 / t).hermitian_part()
}

/// Real HS projection of `m` off the Hermitian orthonormal set `basis`.
fn project_out(m: &ComplexMatrix, basis: &[ComplexMatrix]) -> ComplexMatrix {
    let mut out = m.clone();
    for b in basis {
        let c = covpovm::linalg::inner(b.as_slice(), m.as_slice()).re;
        out = &out - &b.scale_real(c);
    }
    out
}

/// A POVM whose effect span is the HS complement of `removed` (traceless
/// Hermitian operators). Effects are `c(𝟙 + εHⱼ)` plus a balancing outcome.
pub fn povm_with_complement(d: usize, removed: &[ComplexMatrix], rng: &mut impl Rng) -> Povm {
    let id = ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt());
    let mut excluded = hermitian_span_basis(
        &std::iter::once(id.clone()).chain(removed.iter().cloned()).collect::<Vec<_>>(),
        1e-9,
    )
    .unwrap();
    let mut keep = Vec::new();
    let target = d * d - excluded.len();
    while keep.len() < target {
        let h = project_out(&random_hermitian(d, rng), &excluded);
        let n = h.frobenius_norm();
        let h = h.scale_real(1.0 / n);
        excluded.push(h.clone());
        keep.push(h);
    }
    let m = keep.len();
    let c = 1.0 / (m as f64 + 1.0);
    let eps = 0.5 / m as f64;
    let one = ComplexMatrix::identity(d);
    let mut ops: Vec<ComplexMatrix> = keep
        .iter()
        .map(|h| (&one + &h.scale_real(eps)).scale_real(c))
        .collect();
    let mut rest = one.clone();
    for o in &ops {
        rest = &rest - o;
    }
    ops.push(rest.hermitian_part());
    Povm::from_ops(d, ops).unwrap()
}

/// Planted witness `(ψ, φ)` and a POVM whose complement contains
/// `|ψ⟩⟨ψ| − |φ⟩⟨φ|` plus `extra` random traceless directions.
pub fn planted_povm(d: usize, extra: usize, rng: &mut impl Rng) -> (Povm, Vec<C64>, Vec<C64>) {
    let psi = random_unit(d, rng);
    let phi = random_unit(d, rng);
    let diff = &ComplexMatrix::projector(&psi) - &ComplexMatrix::projector(&phi);
    let mut removed = vec![diff];
    for _ in 0..extra {
        let mut h = random_hermitian(d, rng);
        let t = h.trace().re / d as f64;
        h = &h - &ComplexMatrix::identity(d).scale_real(t);
        removed.push(h);
    }
    (povm_with_complement(d, &removed, rng), psi, phi)
}
