// SPDX-License-Identifier: Apache-2.0

//! Named observables and reference data.
//!
//! * Weyl-Heisenberg (shift/clock) covariant observables in any dimension.
//! * Minimal PIC observables on `ℂ³` covariant under the quaternion or
//!   dihedral group of order 8, including the rank-one family.
//! * Known minimal outcome counts for PIC observables.
//! * The prime-index obstruction and a dimension-3 minimality report.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{
    build_group, coset_space, find_cyclic_transitive_subgroup, is_prime, matrix_realization,
    CosetSpace, FiniteGroup, GroupKind, Subgroup,
};
use crate::linalg::{hermitian_eig, inner, normalized, pauli, tol, ComplexMatrix, C64, ONE, ZERO};
use crate::povm::{build_covariant, check_pic, operator_span, FalsifierSettings, PicStatus, PicVerdict, Povm};
use crate::rep::{rep_from_matrices, ProjectiveRep};

/// Which construction produced an observable, and with what parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub construction: String,
    pub parameters: serde_json::Value,
}

fn c64_json(z: C64) -> serde_json::Value {
    json!([z.re, z.im])
}

// ---------------------------------------------------------------------------
// Weyl-Heisenberg

/// Shift `U e_ℓ = e_{ℓ+1}` and clock `V e_ℓ = e^{2πiℓ/d} e_ℓ`.
pub fn shift_clock(d: usize) -> (ComplexMatrix, ComplexMatrix) {
    let shift = ComplexMatrix::from_fn(d, d, |r, c| if r == (c + 1) % d { ONE } else { ZERO });
    let phases: Vec<C64> = (0..d)
        .map(|l| C64::from_polar(1.0, 2.0 * PI * l as f64 / d as f64))
        .collect();
    (shift, ComplexMatrix::diag(&phases))
}

/// `W(j,k) = U^j V^k` on `ℤ_d × ℤ_d`, element `(j,k)` at index `j·d + k`.
pub fn weyl_heisenberg_rep(d: usize) -> Result<ProjectiveRep> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension must be at least 2, got {d}")));
    }
    let group = build_group(&GroupKind::product(GroupKind::Cyclic(d), GroupKind::Cyclic(d)))?;
    let (u, v) = shift_clock(d);
    let mut u_pows = vec![ComplexMatrix::identity(d)];
    let mut v_pows = vec![ComplexMatrix::identity(d)];
    for k in 1..d {
        u_pows.push(u_pows[k - 1].matmul(&u));
        v_pows.push(v_pows[k - 1].matmul(&v));
    }
    let mats = (0..d * d).map(|x| u_pows[x / d].matmul(&v_pows[x % d])).collect();
    rep_from_matrices(&group, mats)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WhParams {
    pub d: usize,
    /// Positive operator with trace `1/d`.
    pub seed: ComplexMatrix,
    /// Reject seeds with `tr(M W(j,k)) = 0` for some `(j,k)`.
    pub require_ic: bool,
}

impl WhParams {
    pub fn provenance(&self) -> Provenance {
        Provenance {
            construction: "weyl_heisenberg_covariant".into(),
            parameters: json!({ "d": self.d, "require_ic": self.require_ic }),
        }
    }
}

fn min_wh_overlap(seed: &ComplexMatrix, rep: &ProjectiveRep) -> f64 {
    rep.matrices()
        .iter()
        .map(|w| inner(seed.as_slice(), w.as_slice()).norm())
        .fold(f64::INFINITY, f64::min)
}

/// `M(j,k) = W(j,k) M W(j,k)†`, labelled `"(j,k)"`.
pub fn build_weyl_heisenberg(params: &WhParams) -> Result<(Povm, ProjectiveRep)> {
    let d = params.d;
    let rep = weyl_heisenberg_rep(d)?;
    let seed = &params.seed;
    if seed.shape() != (d, d) {
        return Err(Error::Dimension(format!("seed has shape {:?}, expected {d}x{d}", seed.shape())));
    }
    let tr = seed.trace();
    if (tr - C64::new(1.0 / d as f64, 0.0)).norm() > 1e-9 {
        return Err(Error::Domain(format!(
            "seed trace is {:.12}, expected 1/{d}",
            tr.re
        )));
    }
    if params.require_ic {
        let m = min_wh_overlap(seed, &rep);
        if m <= 1e-9 {
            return Err(Error::Precondition {
                condition: "tr(M W(j,k)) ≠ 0",
                message: format!("seed has a vanishing overlap ({m:.3e}), observable would not be IC"),
            });
        }
    }
    let cosets = coset_space(rep.group(), &Subgroup::trivial(rep.group()))?;
    let povm = build_covariant(&rep, &cosets, seed)?;
    Ok((povm, rep))
}

/// Rank-one seed `|ψ⟩⟨ψ|/d` from a pseudorandom unit vector, redrawn until
/// every `tr(M W(j,k))` is nonzero.
pub fn default_wh_seed(d: usize, rng_seed: u64) -> Result<ComplexMatrix> {
    let rep = weyl_heisenberg_rep(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for _ in 0..1000 {
        let psi: Vec<C64> = (0..d)
            .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        let seed = ComplexMatrix::projector(&psi).scale_real(1.0 / d as f64);
        if min_wh_overlap(&seed, &rep) > 1e-9 {
            return Ok(seed);
        }
    }
    Err(Error::Construction(format!(
        "no seed with nonvanishing overlaps after 1000 draws (d = {d}, rng seed {rng_seed})"
    )))
}

// ---------------------------------------------------------------------------
// Minimal PIC observables on ℂ³

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pic3Group {
    Quaternion,
    Dihedral,
}

impl Pic3Group {
    pub fn kind(self) -> GroupKind {
        match self {
            Pic3Group::Quaternion => GroupKind::Quaternion,
            Pic3Group::Dihedral => GroupKind::Dihedral8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pic3Params {
    /// Scale of the complement generator `T = diag(2λ, −λ, −λ)`.
    pub lambda: f64,
    pub alpha: [f64; 3],
    pub v: [C64; 2],
    pub group: Pic3Group,
}

impl Pic3Params {
    pub fn default_quaternion() -> Self {
        Pic3Params {
            lambda: 1.0,
            alpha: [1.0 / 32.0; 3],
            v: [C64::new(1.0 / 32.0, 0.0), ZERO],
            group: Pic3Group::Quaternion,
        }
    }

    /// `v = (1/32, 1/64)`: the dihedral family needs `Re(v₁ v̄₂) ≠ 0`, which
    /// `v = (1/32, 0)` violates.
    pub fn default_dihedral() -> Self {
        Pic3Params {
            v: [C64::new(1.0 / 32.0, 0.0), C64::new(1.0 / 64.0, 0.0)],
            group: Pic3Group::Dihedral,
            ..Self::default_quaternion()
        }
    }

    /// `𝟙/8 + Σ αᵢ (0 ⊕ σᵢ) + [[0, v̄ᵀ], [v, 0]]`.
    pub fn seed_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(3).scale_real(0.125);
        for (a, s) in self.alpha.iter().zip(pauli()) {
            for r in 0..2 {
                for c in 0..2 {
                    m[(r + 1, c + 1)] += s[(r, c)] * *a;
                }
            }
        }
        for (i, &vi) in self.v.iter().enumerate() {
            m[(i + 1, 0)] += vi;
            m[(0, i + 1)] += vi.conj();
        }
        m
    }

    pub fn complement_generator(&self) -> ComplexMatrix {
        ComplexMatrix::diag_real(&[2.0 * self.lambda, -self.lambda, -self.lambda])
    }

    /// Checks the three conditions in order and names the first violated one.
    pub fn check_conditions(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::Domain(format!("lambda must be positive, got {}", self.lambda)));
        }
        if let Some(i) = self.alpha.iter().position(|a| a.abs() <= tol::ZERO_FLOOR) {
            return Err(Error::Precondition {
                condition: "cond:1 α₁, α₂, α₃ ≠ 0",
                message: format!("alpha{} = {}", i + 1, self.alpha[i]),
            });
        }
        match self.group {
            Pic3Group::Quaternion => {
                if self.v.iter().all(|z| z.norm() <= tol::ZERO_FLOOR) {
                    return Err(Error::Precondition {
                        condition: "cond:2 v ≠ 0",
                        message: "v vanishes".into(),
                    });
                }
            }
            Pic3Group::Dihedral => {
                if (self.v[0].norm() - self.v[1].norm()).abs() <= tol::ZERO_FLOOR {
                    return Err(Error::Precondition {
                        condition: "cond:2 |v₁| ≠ |v₂|",
                        message: format!("|v1| = |v2| = {}", self.v[0].norm()),
                    });
                }
                // With the σ₃ intertwiner the off-diagonal block is cyclic iff
                // det[v, σ₃v̄] = −2 Re(v₁ v̄₂) is nonzero.
                if (self.v[0] * self.v[1].conj()).re.abs() <= tol::ZERO_FLOOR {
                    return Err(Error::Precondition {
                        condition: "cond:2 Re(v₁v̄₂) ≠ 0",
                        message: format!(
                            "v = ({}, {}) makes the off-diagonal block non-cyclic",
                            self.v[0], self.v[1]
                        ),
                    });
                }
            }
        }
        let low = *hermitian_eig(&self.seed_matrix())?.values.last().expect("3x3");
        if low < -tol::PSD {
            return Err(Error::Precondition {
                condition: "cond:3 M ≥ 0",
                message: format!("seed has eigenvalue {low:.3e}"),
            });
        }
        Ok(())
    }

    pub fn provenance(&self) -> Provenance {
        let construction = match self.group {
            Pic3Group::Quaternion => "quaternion_dim3_minimal_pic",
            Pic3Group::Dihedral => "dihedral_dim3_minimal_pic",
        };
        Provenance {
            construction: construction.into(),
            parameters: json!({
                "lambda": self.lambda,
                "alpha": self.alpha,
                "v": [c64_json(self.v[0]), c64_json(self.v[1])],
                "group": self.group,
            }),
        }
    }
}

/// A covariant observable on `ℂ³` with eight outcomes, one per group element.
#[derive(Debug, Clone)]
pub struct Pic3Observable {
    pub povm: Povm,
    pub rep: ProjectiveRep,
    pub cosets: CosetSpace,
    /// Expected generator of the span's orthogonal complement.
    pub t: ComplexMatrix,
    pub seed: ComplexMatrix,
    pub provenance: Provenance,
}

/// `U(g) = 1 ⊕ π(g)` on `ℂ³`.
pub fn pic3_rep(group: Pic3Group) -> Result<ProjectiveRep> {
    let kind = group.kind();
    let g = build_group(&kind)?;
    let mats = matrix_realization(&kind)
        .expect("order-8 realization")
        .into_iter()
        .map(|p| ComplexMatrix::from_fn(3, 3, |r, c| match (r, c) {
            (0, 0) => ONE,
            (0, _) | (_, 0) => ZERO,
            _ => p[(r - 1, c - 1)],
        }))
        .collect();
    rep_from_matrices(&g, mats)
}

fn assemble_pic3(
    group: Pic3Group,
    seed: ComplexMatrix,
    lambda: f64,
    provenance: Provenance,
) -> Result<Pic3Observable> {
    let rep = pic3_rep(group)?;
    let cosets = coset_space(rep.group(), &Subgroup::trivial(rep.group()))?;
    let povm = build_covariant(&rep, &cosets, &seed)?;
    Ok(Pic3Observable {
        povm,
        rep,
        cosets,
        t: ComplexMatrix::diag_real(&[2.0 * lambda, -lambda, -lambda]),
        seed,
        provenance,
    })
}

pub fn build_pic3(params: &Pic3Params) -> Result<Pic3Observable> {
    params.check_conditions()?;
    build_pic3_unchecked(params)
}

/// Skips the parameter conditions. The result is still required to be an
/// observable, so a seed that is not positive is rejected.
pub fn build_pic3_unchecked(params: &Pic3Params) -> Result<Pic3Observable> {
    let mut prov = params.provenance();
    prov.parameters["conditions_checked"] = json!(false);
    assemble_pic3(params.group, params.seed_matrix(), params.lambda, prov)
}

/// The rank-one quaternion family: `M² = (3/8) M` for
/// `α₁² + α₂² + α₃² = 1/64` with all `αᵢ ≠ 0`.
pub fn rank1_seed(gamma: f64, alpha: [f64; 3]) -> Result<ComplexMatrix> {
    if !(0.0..2.0 * PI).contains(&gamma) {
        return Err(Error::Domain(format!("gamma must lie in [0, 2π), got {gamma}")));
    }
    if let Some(i) = alpha.iter().position(|a| *a == 0.0) {
        return Err(Error::Domain(format!("alpha{} must be nonzero", i + 1)));
    }
    let s: f64 = alpha.iter().map(|a| a * a).sum();
    if (s - 1.0 / 64.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "alpha must satisfy a1² + a2² + a3² = 1/64, got {s:.15}"
        )));
    }
    let [a1, a2, a3] = alpha;
    let r = (1.0 + 8.0 * a3).sqrt();
    let e = C64::from_polar(1.0, gamma);
    let z = C64::new(a1, a2);
    let c = |x: f64| C64::new(x, 0.0);
    ComplexMatrix::from_rows(&[
        vec![c(0.125), e.conj() * (r / 8.0), e.conj() * z.conj() / r],
        vec![e * (r / 8.0), c(0.125 + a3), z.conj()],
        vec![e * z / r, z, c(0.125 - a3)],
    ])
}

pub fn build_rank1_pic3(gamma: f64, alpha: [f64; 3]) -> Result<Pic3Observable> {
    let seed = rank1_seed(gamma, alpha)?;
    let prov = Provenance {
        construction: "rank1_quaternion_dim3_pic".into(),
        parameters: json!({ "gamma": gamma, "alpha": alpha }),
    };
    assemble_pic3(Pic3Group::Quaternion, seed, 1.0, prov)
}

// ---------------------------------------------------------------------------
// Minimal outcome counts

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MinOutcomes {
    Exact(usize),
    /// Known to be one of two consecutive values.
    Either(usize, usize),
}

impl MinOutcomes {
    pub fn admits(self, n: usize) -> bool {
        match self {
            MinOutcomes::Exact(m) => m == n,
            MinOutcomes::Either(a, b) => n == a || n == b,
        }
    }

    pub fn values(self) -> Vec<usize> {
        match self {
            MinOutcomes::Exact(m) => vec![m],
            MinOutcomes::Either(a, b) => vec![a, b],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinOutcomeRecord {
    pub d: usize,
    pub min_outcomes: MinOutcomes,
    /// Whether the count is known and prime.
    pub is_prime: bool,
}

/// Minimal outcome counts for `d = 2..=15`.
pub const SMALL_DIMENSIONS: [(usize, MinOutcomes); 14] = {
    use MinOutcomes::{Either, Exact};
    [
        (2, Exact(4)),
        (3, Exact(8)),
        (4, Exact(10)),
        (5, Exact(16)),
        (6, Exact(18)),
        (7, Exact(23)),
        (8, Either(24, 25)),
        (9, Exact(32)),
        (10, Exact(34)),
        (11, Exact(39)),
        (12, Either(40, 41)),
        (13, Exact(47)),
        (14, Either(48, 49)),
        (15, Exact(54)),
    ]
};

/// Dimensions whose minimal outcome count is a prime number.
pub const PRIME_COUNT_DIMENSIONS: [(usize, usize); 15] = [
    (7, 23),
    (13, 47),
    (19, 71),
    (21, 79),
    (49, 191),
    (67, 263),
    (69, 271),
    (97, 383),
    (259, 1031),
    (261, 1039),
    (273, 1087),
    (289, 1151),
    (321, 1279),
    (517, 2063),
    (529, 2111),
];

/// `[4d − 4 − ⌊2 log₂ d⌋, 4d − 4]`.
pub fn outcome_band(d: usize) -> (usize, usize) {
    let sq = (d * d) as u128;
    let floor_2log = (127 - sq.leading_zeros()) as usize;
    (4 * d - 4 - floor_2log, 4 * d - 4)
}

pub fn minimal_pic_outcomes(d: usize) -> Result<MinOutcomeRecord> {
    let found = SMALL_DIMENSIONS
        .iter()
        .find(|(dd, _)| *dd == d)
        .map(|&(_, m)| m)
        .or_else(|| {
            PRIME_COUNT_DIMENSIONS
                .iter()
                .find(|(dd, _)| *dd == d)
                .map(|&(_, n)| MinOutcomes::Exact(n))
        });
    match found {
        Some(m) => Ok(MinOutcomeRecord {
            d,
            min_outcomes: m,
            is_prime: matches!(m, MinOutcomes::Exact(n) if is_prime(n)),
        }),
        None if d >= 2 => {
            let (lower, upper) = outcome_band(d);
            Err(Error::UnknownDimension { d, lower, upper })
        }
        None => Err(Error::Domain(format!("dimension must be at least 2, got {d}"))),
    }
}

/// Every tabulated dimension in increasing order.
pub fn all_min_outcome_records() -> Vec<MinOutcomeRecord> {
    let mut ds: Vec<usize> = SMALL_DIMENSIONS
        .iter()
        .map(|r| r.0)
        .chain(PRIME_COUNT_DIMENSIONS.iter().map(|r| r.0))
        .collect();
    ds.sort_unstable();
    ds.dedup();
    ds.into_iter()
        .map(|d| minimal_pic_outcomes(d).expect("tabulated"))
        .collect()
}

// ---------------------------------------------------------------------------
// Obstructions and minimality

/// For `#(G/H)` prime, a cyclic subgroup acting transitively on `G/H`.
/// Restricted to it, every projective representation is exact and abelian, so
/// it has two common eigenlines whose states no covariant observable can
/// separate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub index: usize,
    pub subgroup: Vec<String>,
    pub generator: String,
    pub cyclic_subgroup: Vec<String>,
    pub conclusion: String,
}

pub fn prime_index_obstruction(g: &FiniteGroup, h: &Subgroup) -> Result<ObstructionReport> {
    if h.order() == g.order() {
        return Err(Error::Domain("H must be a proper subgroup".into()));
    }
    let index = g.order() / h.order();
    let found = find_cyclic_transitive_subgroup(g, h)?;
    if !is_prime(index) {
        let tail = match &found {
            None => "no cyclic transitive subgroup".to_string(),
            Some(c) => format!("cyclic transitive subgroup generated by {}", g.name(c.generator)),
        };
        return Err(Error::Precondition {
            condition: "prime index",
            message: format!("index {index} not prime; {tail}"),
        });
    }
    let found = found.ok_or_else(|| {
        Error::Inconsistency(format!("no cyclic subgroup acts transitively on a coset space of prime index {index}"))
    })?;
    let names = |xs: &[usize]| xs.iter().map(|&x| g.name(x).to_string()).collect::<Vec<_>>();
    Ok(ObstructionReport {
        index,
        subgroup: names(h.members()),
        generator: g.name(found.generator).to_string(),
        cyclic_subgroup: names(found.subgroup.members()),
        conclusion: format!(
            "no covariant observable on G/H is PIC for any projective representation; \
             the cyclic subgroup generated by {} acts transitively",
            g.name(found.generator)
        ),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimalityReport {
    pub outcomes: usize,
    pub table_minimum: MinOutcomes,
    pub span_dim: usize,
    pub linearly_independent: bool,
    pub verdict: PicVerdict,
    pub minimal: bool,
}

/// An 8-outcome PIC observable on `ℂ³` with independent effects attains the
/// tabulated minimum.
pub fn minimality_witness_dim3(povm: &Povm) -> Result<MinimalityReport> {
    if povm.dim() != 3 || povm.len() != 8 {
        return Err(Error::Domain(format!(
            "expected an 8-outcome observable on C^3, got {} outcomes on C^{}",
            povm.len(),
            povm.dim()
        )));
    }
    let table_minimum = minimal_pic_outcomes(3)?.min_outcomes;
    let span_dim = operator_span(povm)?.dim();
    let verdict = check_pic(povm, &FalsifierSettings::default())?;
    let linearly_independent = span_dim == povm.len();
    let minimal = table_minimum.admits(povm.len())
        && linearly_independent
        && verdict.status == PicStatus::PicCertified;
    Ok(MinimalityReport {
        outcomes: povm.len(),
        table_minimum,
        span_dim,
        linearly_independent,
        verdict,
        minimal,
    })
}

/// Unit vector `(1, e^{iπ/4}·2)/√5`, a seed direction used in examples.
pub fn qubit_example_vector() -> Vec<C64> {
    normalized(&[ONE, C64::from_polar(2.0, PI / 4.0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::povm::{check_covariance, is_ic};
    use crate::rep::{is_exact_multiplier, Exactness};

    #[test]
    fn wh_qubit_example_is_ic() {
        let psi = qubit_example_vector();
        let seed = ComplexMatrix::projector(&psi).scale_real(0.5);
        let (povm, rep) = build_weyl_heisenberg(&WhParams { d: 2, seed, require_ic: true }).unwrap();
        assert_eq!(povm.len(), 4);
        assert!(is_ic(&povm).unwrap());
        assert_eq!(povm.outcomes()[1].label, "(0,1)");
        assert_eq!(is_exact_multiplier(&rep), Exactness::NotExact);
    }

    #[test]
    fn wh_maximally_mixed_is_not_ic() {
        let seed = ComplexMatrix::identity(3).scale_real(1.0 / 9.0);
        let params = WhParams { d: 3, seed, require_ic: false };
        let (povm, _) = build_weyl_heisenberg(&params).unwrap();
        assert_eq!(operator_span(&povm).unwrap().dim(), 1);
        let strict = WhParams { require_ic: true, ..params };
        assert!(matches!(build_weyl_heisenberg(&strict), Err(Error::Precondition { .. })));
    }

    #[test]
    fn wh_rejects_wrong_trace() {
        let seed = ComplexMatrix::identity(2).scale_real(0.3);
        assert!(matches!(
            build_weyl_heisenberg(&WhParams { d: 2, seed, require_ic: false }),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn default_wh_seeds() {
        for d in [2, 3, 5] {
            let seed = default_wh_seed(d, 7).unwrap();
            assert!((seed.trace().re - 1.0 / d as f64).abs() < 1e-12);
            assert_eq!(seed, default_wh_seed(d, 7).unwrap());
            let (povm, _) = build_weyl_heisenberg(&WhParams { d, seed, require_ic: true }).unwrap();
            assert_eq!(operator_span(&povm).unwrap().dim(), d * d);
        }
    }

    #[test]
    fn default_quat3_is_pic() {
        for params in [Pic3Params::default_quaternion(), Pic3Params::default_dihedral()] {
            let obs = build_pic3(&params).unwrap();
            assert!(obs.povm.validate().passed);
            assert!(check_covariance(&obs.povm, &obs.rep, &obs.cosets).unwrap());
            let v = check_pic(&obs.povm, &FalsifierSettings::default()).unwrap();
            assert_eq!(v.status, PicStatus::PicCertified);
            assert_eq!(v.complement_dim, 1);
            assert_eq!(v.generator_rank, Some(3));
        }
    }

    #[test]
    fn conditions_are_named() {
        let mut p = Pic3Params::default_quaternion();
        p.alpha[1] = 0.0;
        assert!(build_pic3(&p).unwrap_err().to_string().contains("cond:1"));
        let mut p = Pic3Params::default_quaternion();
        p.v = [ZERO, ZERO];
        assert!(build_pic3(&p).unwrap_err().to_string().contains("cond:2"));
        let mut p = Pic3Params::default_dihedral();
        p.v = [C64::new(0.01, 0.0), C64::new(0.0, 0.01)];
        assert!(build_pic3(&p).unwrap_err().to_string().contains("|v₁| ≠ |v₂|"));
        p.v = [C64::new(0.01, 0.0), C64::new(0.0, 0.02)];
        assert!(build_pic3(&p).unwrap_err().to_string().contains("Re(v₁v̄₂)"));
        let mut p = Pic3Params::default_quaternion();
        p.alpha = [0.2, 0.2, 0.2];
        assert!(build_pic3(&p).unwrap_err().to_string().contains("cond:3"));
    }

    #[test]
    fn rank1_seed_is_scaled_projector() {
        let a = 1.0 / 192f64.sqrt();
        for gamma in [0.0, PI / 2.0] {
            let m = rank1_seed(gamma, [a, a, a]).unwrap();
            let defect = (&m.matmul(&m) - &m.scale_real(0.375)).frobenius_norm();
            assert!(defect < 1e-12);
            let eig = hermitian_eig(&m).unwrap();
            assert!((eig.values[0] - 0.375).abs() < 1e-12);
            assert!(eig.values[1].abs() < 1e-12 && eig.values[2].abs() < 1e-12);
        }
        assert!(rank1_seed(0.0, [0.1, 0.1, 0.1]).is_err());
        assert!(rank1_seed(0.0, [0.125, 0.0, 0.0]).is_err());
    }

    #[test]
    fn table_lookups() {
        assert_eq!(minimal_pic_outcomes(3).unwrap().min_outcomes, MinOutcomes::Exact(8));
        let r7 = minimal_pic_outcomes(7).unwrap();
        assert_eq!(r7.min_outcomes, MinOutcomes::Exact(23));
        assert!(r7.is_prime);
        assert_eq!(minimal_pic_outcomes(8).unwrap().min_outcomes, MinOutcomes::Either(24, 25));
        assert!(matches!(
            minimal_pic_outcomes(16),
            Err(Error::UnknownDimension { d: 16, lower: 52, upper: 60 })
        ));
        assert_eq!(outcome_band(7), (19, 24));
    }

    #[test]
    fn obstruction_examples() {
        let d8 = build_group(&GroupKind::Dihedral8).unwrap();
        let rot = Subgroup::new(&d8, [0, 1, 2, 3]).unwrap();
        let rep = prime_index_obstruction(&d8, &rot).unwrap();
        assert_eq!(rep.index, 2);

        let q = build_group(&GroupKind::Quaternion).unwrap();
        let pm = Subgroup::new(&q, [0, 1]).unwrap();
        let err = prime_index_obstruction(&q, &pm).unwrap_err().to_string();
        assert!(err.contains("index 4 not prime; no cyclic transitive subgroup"), "{err}");

        let z9 = build_group(&GroupKind::Cyclic(9)).unwrap();
        let h = Subgroup::new(&z9, [0, 3, 6]).unwrap();
        assert_eq!(prime_index_obstruction(&z9, &h).unwrap().generator, "1");
    }

    #[test]
    fn minimality_reports() {
        let obs = build_pic3(&Pic3Params::default_quaternion()).unwrap();
        assert!(minimality_witness_dim3(&obs.povm).unwrap().minimal);
        let flat = assemble_pic3(
            Pic3Group::Quaternion,
            ComplexMatrix::identity(3).scale_real(0.125),
            1.0,
            Pic3Params::default_quaternion().provenance(),
        )
        .unwrap();
        let r = minimality_witness_dim3(&flat.povm).unwrap();
        assert_eq!(r.span_dim, 1);
        assert!(!r.minimal);
    }
}
