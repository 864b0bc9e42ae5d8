// SPDX-License-Identifier: Apache-2.0

mod common;

use covpovm::constructions::{pic3_rep, weyl_heisenberg_rep, Pic3Group};
use covpovm::group::{build_group, GroupKind};
use covpovm::linalg::{orthogonal_complement, span_orthonormalize, ComplexMatrix, OperatorSubspace, C64, ONE};
use covpovm::rep::{
    character_inner, common_eigenspaces, conjugation_rep, cyclic_by_schmidt, cyclic_by_span,
    direct_sum, exactness_defect, irreps_of, is_exact_multiplier, isotypic_decompose, regular_rep,
    rep_from_matrices, Exactness, ExactnessMethod, ProjectiveRep,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn supported_kinds() -> Vec<GroupKind> {
    let mut v = GroupKind::all_order8();
    v.extend([GroupKind::Cyclic(1), GroupKind::Cyclic(5), GroupKind::Cyclic(12)]);
    v.push(GroupKind::product(GroupKind::Cyclic(3), GroupKind::Cyclic(3)));
    v
}

fn exhaustive_cocycle_defect(rep: &ProjectiveRep) -> f64 {
    let g = rep.group();
    let mut worst: f64 = 0.0;
    for a in g.elements() {
        for b in g.elements() {
            for c in g.elements() {
                let lhs = rep.multiplier(a, b) * rep.multiplier(g.mul(a, b), c);
                let rhs = rep.multiplier(a, g.mul(b, c)) * rep.multiplier(b, c);
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    worst
}

#[test]
fn cocycle_identity_on_all_triples() {
    let mut reps = vec![pic3_rep(Pic3Group::Quaternion).unwrap(), pic3_rep(Pic3Group::Dihedral).unwrap()];
    for d in 2..=5 {
        reps.push(weyl_heisenberg_rep(d).unwrap());
    }
    for kind in GroupKind::all_order8() {
        let g = build_group(&kind).unwrap();
        reps.push(regular_rep(&g).unwrap());
        for pi in irreps_of(&g).unwrap() {
            reps.push(rep_from_matrices(&g, pi.matrices).unwrap());
        }
    }
    for rep in &reps {
        assert!(exhaustive_cocycle_defect(rep) < 1e-9);
        assert!(rep.cocycle_defect() < 1e-9);
    }
}

#[test]
fn conjugation_rep_is_ordinary_for_projective_input() {
    for d in 2..=5 {
        let wh = weyl_heisenberg_rep(d).unwrap();
        assert!(!wh.is_ordinary());
        let tilde = conjugation_rep(&wh).unwrap();
        for row in tilde.multiplier_table() {
            for w in row {
                assert!((w - ONE).norm() < 1e-9);
            }
        }
    }
}

#[test]
fn schur_orthogonality_for_every_dual() {
    for kind in supported_kinds() {
        let g = build_group(&kind).unwrap();
        let dual = irreps_of(&g).unwrap();
        assert_eq!(dual.iter().map(|p| p.dim * p.dim).sum::<usize>(), g.order());
        for (i, a) in dual.iter().enumerate() {
            for (j, b) in dual.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((character_inner(&a.character, &b.character) - C64::new(expect, 0.0)).norm() < 1e-9);
            }
        }
    }
}

fn decompositions() -> Vec<(String, ProjectiveRep, Vec<covpovm::rep::Irrep>)> {
    let mut out = Vec::new();
    for (name, grp) in [("quaternion", Pic3Group::Quaternion), ("dihedral", Pic3Group::Dihedral)] {
        let u = pic3_rep(grp).unwrap();
        let g = u.group().clone();
        let dual = irreps_of(&g).unwrap();
        let pi = rep_from_matrices(&g, dual[4].matrices.clone()).unwrap();
        out.push((format!("{name}: pi on M2"), conjugation_rep(&pi).unwrap(), dual.clone()));
        let tilde = conjugation_rep(&u).unwrap();
        let t = OperatorSubspace::from_orthonormal(
            3,
            vec![ComplexMatrix::diag_real(&[2.0, -1.0, -1.0]).scale_real(1.0 / 6f64.sqrt())],
            1e-9,
        )
        .unwrap();
        let t_perp = orthogonal_complement(&t);
        out.push((format!("{name}: U on T-perp"), tilde.restrict_to_operators(&t_perp).unwrap(), dual.clone()));
        out.push((format!("{name}: U on L(C3)"), tilde, dual.clone()));
        out.push((format!("{name}: regular"), regular_rep(&g).unwrap(), dual));
    }
    let z6 = build_group(&GroupKind::Cyclic(6)).unwrap();
    let zd = irreps_of(&z6).unwrap();
    let chi = |k: usize| rep_from_matrices(&z6, zd[k].matrices.clone()).unwrap();
    let sum = direct_sum(&[&chi(1), &chi(1), &chi(4)]).unwrap();
    out.push(("Z6: chi1+chi1+chi4".into(), sum, zd));
    out
}

#[test]
fn projections_are_complete_and_idempotent() {
    for (name, rep, dual) in decompositions() {
        let dec = isotypic_decompose(&rep, &dual).unwrap();
        assert!(dec.projection_defect() < 1e-9, "{name}");
        let mut total = ComplexMatrix::zeros(rep.dim(), rep.dim());
        for c in &dec.components {
            total += &c.projection;
        }
        assert!((&total - &ComplexMatrix::identity(rep.dim())).frobenius_norm() < 1e-9, "{name}");
    }
}

#[test]
fn cyclicity_tests_agree_on_random_and_structured_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (name, rep, dual) in decompositions() {
        let dec = isotypic_decompose(&rep, &dual).unwrap();
        let mut cyclic_seen = [false, false];
        for trial in 0..120 {
            let mut v = common::random_vector(rep.dim(), &mut rng);
            // Every fourth vector drops a random subset of isotypic components.
            if trial % 4 == 3 {
                let mut w = vec![C64::new(0.0, 0.0); rep.dim()];
                for c in &dec.components {
                    if rng.random_bool(0.6) {
                        for (x, y) in w.iter_mut().zip(c.projection.apply(&v)) {
                            *x += y;
                        }
                    }
                }
                if w.iter().all(|z| z.norm() == 0.0) {
                    continue;
                }
                v = w;
            }
            let a = cyclic_by_span(&rep, &v).unwrap();
            let b = cyclic_by_schmidt(&dec, &v).unwrap();
            assert_eq!(a, b, "{name}, trial {trial}");
            cyclic_seen[a as usize] = true;
        }
        assert!(cyclic_seen[0], "{name}: never saw a non-cyclic vector");
    }
}

#[test]
fn cyclic_projective_reps_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [2usize, 3, 4, 6, 8] {
        let g = build_group(&GroupKind::Cyclic(n)).unwrap();
        let dual = irreps_of(&g).unwrap();
        let base = direct_sum(&[
            &rep_from_matrices(&g, dual[1 % n].matrices.clone()).unwrap(),
            &rep_from_matrices(&g, dual[n - 1].matrices.clone()).unwrap(),
        ])
        .unwrap();
        let phases: Vec<C64> = (0..n)
            .map(|k| if k == 0 { ONE } else { C64::from_polar(1.0, rng.random_range(0.0..6.28)) })
            .collect();
        let rep = base.rephased(&phases).unwrap();
        match is_exact_multiplier(&rep) {
            Exactness::Exact { phases, .. } => assert!(exactness_defect(&rep, &phases) < 1e-8),
            other => panic!("Z{n}: {other:?}"),
        }
    }
}

#[test]
fn eigenline_path_returns_valid_phases() {
    let g = build_group(&GroupKind::Quaternion).unwrap();
    let u = pic3_rep(Pic3Group::Quaternion).unwrap();
    let phases: Vec<C64> = (0..8).map(|k| C64::from_polar(1.0, 0.3 * k as f64 * k as f64)).collect();
    let mut phases = phases;
    phases[g.identity()] = ONE;
    let rep = u.rephased(&phases).unwrap();
    assert!(!rep.is_ordinary());
    let mats: Vec<ComplexMatrix> = rep.matrices().to_vec();
    assert!(!common_eigenspaces(&mats, 3).is_empty());
    match is_exact_multiplier(&rep) {
        Exactness::Exact { phases, method } => {
            assert_eq!(method, ExactnessMethod::CommonEigenvector);
            assert!(exactness_defect(&rep, &phases) < 1e-9);
            let fixed = rep.rephased(&phases).unwrap();
            assert!(fixed.is_ordinary());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn weyl_heisenberg_is_not_exact() {
    for d in 2..=5 {
        assert_eq!(is_exact_multiplier(&weyl_heisenberg_rep(d).unwrap()), Exactness::NotExact);
    }
}

#[test]
fn span_of_covariant_orbit_is_invariant() {
    let u = pic3_rep(Pic3Group::Quaternion).unwrap();
    let tilde = conjugation_rep(&u).unwrap();
    let seed = covpovm::constructions::Pic3Params::default_quaternion().seed_matrix();
    let orbit: Vec<ComplexMatrix> = u.matrices().iter().map(|m| seed.conjugate_by(m)).collect();
    let span = span_orthonormalize(&orbit, 1e-9).unwrap();
    let sub = tilde.restrict_to_operators(&span).unwrap();
    assert_eq!(sub.dim(), 8);
}
