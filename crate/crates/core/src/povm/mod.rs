// SPDX-License-Identifier: Apache-2.0

//! Finite-outcome POVMs: validation, covariance, and informational
//! completeness analysis.
//!
//! A POVM is IC iff its effects span `L(H)`. It is PIC (identifies all pure
//! states) iff every nonzero selfadjoint operator in the HS complement of the
//! span has rank at least 3. [`check_pic`] decides this exactly when the
//! complement has dimension at most one and otherwise runs the falsifier in
//! [`falsifier`].

pub mod falsifier;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::group::CosetSpace;
use crate::io::{vector_to_json, MatrixJson};
use crate::linalg::{
    hermitian_eig, normalized, numerical_rank, orthogonal_complement, span_orthonormalize, tol,
    ComplexMatrix, OperatorSubspace, C64,
};
use crate::rep::{common_eigenspaces, ProjectiveRep};

pub use falsifier::{falsify, FalsifierOutcome, FalsifierSettings};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub op: ComplexMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    dim: usize,
    outcomes: Vec<Outcome>,
}

/// Residuals of the POVM axioms. `passed` is true when every residual is
/// within tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub outcomes: usize,
    /// Largest `‖M(x) − M(x)†‖_F`.
    pub hermiticity_residual: f64,
    /// Smallest eigenvalue over all effects.
    pub min_eigenvalue: f64,
    /// `‖Σ_x M(x) − 𝟙‖_F`.
    pub normalization_residual: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

impl ValidationReport {
    /// `max(0, −min_eigenvalue)`.
    pub fn psd_residual(&self) -> f64 {
        (-self.min_eigenvalue).max(0.0)
    }

    pub fn max_residual(&self) -> f64 {
        self.hermiticity_residual
            .max(self.psd_residual())
            .max(self.normalization_residual)
    }
}

impl Povm {
    /// Checks shapes only; see [`Povm::validate`] for the POVM axioms.
    pub fn new(dim: usize, outcomes: Vec<Outcome>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("Hilbert space dimension must be positive".into()));
        }
        if outcomes.is_empty() {
            return Err(Error::Dimension("a POVM needs at least one outcome".into()));
        }
        for o in &outcomes {
            if o.op.shape() != (dim, dim) {
                return Err(Error::Dimension(format!(
                    "outcome '{}' has shape {:?}, expected {dim}x{dim}",
                    o.label,
                    o.op.shape()
                )));
            }
        }
        Ok(Povm { dim, outcomes })
    }

    /// Like [`Povm::new`] but also rejects anything that fails validation,
    /// naming the first offending outcome.
    pub fn validated(dim: usize, outcomes: Vec<Outcome>) -> Result<Self> {
        let povm = Self::new(dim, outcomes)?;
        let report = povm.validate();
        match report.failures.first() {
            Some(first) => Err(Error::Domain(first.clone())),
            None => Ok(povm),
        }
    }

    pub fn from_ops(dim: usize, ops: Vec<ComplexMatrix>) -> Result<Self> {
        let outcomes = ops
            .into_iter()
            .enumerate()
            .map(|(i, op)| Outcome { label: i.to_string(), op })
            .collect();
        Self::new(dim, outcomes)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn ops(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.outcomes.iter().map(|o| &o.op)
    }

    /// The same POVM with two outcome operators exchanged (labels kept).
    pub fn with_swapped_ops(&self, a: usize, b: usize) -> Self {
        let mut out = self.clone();
        let tmp = out.outcomes[a].op.clone();
        out.outcomes[a].op = out.outcomes[b].op.clone();
        out.outcomes[b].op = tmp;
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for o in &mut out.outcomes {
            o.op = o.op.scale_real(s);
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let mut herm: f64 = 0.0;
        let mut min_eig = f64::INFINITY;
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for o in &self.outcomes {
            let r = o.op.hermiticity_residual();
            herm = herm.max(r);
            if !o.op.is_hermitian() {
                failures.push(format!("outcome '{}' is not Hermitian (residual {r:.3e})", o.label));
            }
            let low = hermitian_eig(&o.op.hermitian_part())
                .map(|e| *e.values.last().expect("nonempty spectrum"))
                .unwrap_or(f64::NAN);
            min_eig = min_eig.min(low);
            if !(low >= -tol::PSD) {
                failures.push(format!(
                    "outcome '{}' is not positive semidefinite (min eigenvalue {low:.3e})",
                    o.label
                ));
            }
            sum += &o.op;
        }
        let norm_res = (&sum - &ComplexMatrix::identity(self.dim)).frobenius_norm();
        if norm_res > 1e-9 {
            failures.push(format!(
                "outcome operators do not sum to the identity (residual {norm_res:.3e})"
            ));
        }
        ValidationReport {
            outcomes: self.outcomes.len(),
            hermiticity_residual: herm,
            min_eigenvalue: min_eig,
            normalization_residual: norm_res,
            passed: failures.is_empty(),
            failures,
        }
    }

    pub fn to_json(&self) -> PovmJson {
        PovmJson {
            dim: self.dim,
            outcomes: self
                .outcomes
                .iter()
                .map(|o| OutcomeJson {
                    label: o.label.clone(),
                    matrix: MatrixJson::from(&o.op),
                })
                .collect(),
        }
    }

    /// Parses the interchange format; shapes are checked, axioms are not.
    pub fn from_json(json: &PovmJson) -> Result<Self> {
        let outcomes = json
            .outcomes
            .iter()
            .map(|o| {
                Ok(Outcome {
                    label: o.label.clone(),
                    op: o.matrix.to_matrix()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.dim, outcomes)
    }
}

/// `{"dim": d, "outcomes": [{"label": s, "matrix": [[[re,im],...],...]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmJson {
    pub dim: usize,
    pub outcomes: Vec<OutcomeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeJson {
    pub label: String,
    pub matrix: MatrixJson,
}

/// `S_M = span{M(x)}`.
pub fn operator_span(povm: &Povm) -> Result<OperatorSubspace> {
    let ops: Vec<ComplexMatrix> = povm.ops().cloned().collect();
    span_orthonormalize(&ops, tol::RANK)
}

pub fn is_ic(povm: &Povm) -> Result<bool> {
    Ok(operator_span(povm)?.dim() == povm.dim * povm.dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PicStatus {
    #[serde(rename = "PIC_certified")]
    PicCertified,
    #[serde(rename = "PIC_unfalsified")]
    PicUnfalsified,
    #[serde(rename = "not_PIC")]
    NotPic,
}

/// Two distinct pure states with identical outcome statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub psi: Vec<C64>,
    pub phi: Vec<C64>,
}

impl Witness {
    /// `|⟨ψ,φ⟩|²` for the normalized states.
    pub fn fidelity(&self) -> f64 {
        crate::linalg::inner(&normalized(&self.psi), &normalized(&self.phi)).norm_sqr()
    }

    /// `|ψ⟩⟨ψ| − |φ⟩⟨φ|` for the normalized states.
    pub fn difference(&self) -> ComplexMatrix {
        &ComplexMatrix::projector(&self.psi) - &ComplexMatrix::projector(&self.phi)
    }

    /// Largest entrywise gap between the two Born probability vectors.
    pub fn probability_gap(&self, povm: &Povm) -> Result<f64> {
        let p = born_probabilities(povm, &ComplexMatrix::projector(&self.psi))?;
        let q = born_probabilities(povm, &ComplexMatrix::projector(&self.phi))?;
        Ok(p.iter().zip(&q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicVerdict {
    pub status: PicStatus,
    pub complement_dim: usize,
    pub witness: Option<Witness>,
    /// `‖P_{S_M}(|ψ⟩⟨ψ| − |φ⟩⟨φ|)‖_HS` for the witness.
    pub residual: Option<f64>,
    /// Rank of the selfadjoint complement generator when the complement is
    /// one-dimensional.
    pub generator_rank: Option<usize>,
    /// The selfadjoint complement generator, normalized, when one-dimensional.
    pub generator: Option<ComplexMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PicVerdictJson {
    pub status: PicStatus,
    pub complement_dim: usize,
    pub witness: Option<[Vec<[f64; 2]>; 2]>,
    pub residual: Option<f64>,
    pub generator_rank: Option<usize>,
}

impl PicVerdict {
    pub fn to_json(&self) -> PicVerdictJson {
        PicVerdictJson {
            status: self.status,
            complement_dim: self.complement_dim,
            witness: self
                .witness
                .as_ref()
                .map(|w| [vector_to_json(&w.psi), vector_to_json(&w.phi)]),
            residual: self.residual,
            generator_rank: self.generator_rank,
        }
    }
}

/// Selfadjoint representative of a one-dimensional *-closed complement.
fn selfadjoint_generator(b: &ComplexMatrix) -> ComplexMatrix {
    let re = b.hermitian_part();
    let im = (b - &b.adjoint()).scale(C64::new(0.0, -0.5));
    let t = if re.frobenius_norm() >= im.frobenius_norm() { re } else { im };
    let n = t.frobenius_norm();
    t.scale_real(1.0 / n)
}

/// Witness from a traceless selfadjoint operator of rank ≤ 2: the eigenvectors
/// of its largest and smallest eigenvalues.
pub(crate) fn witness_from_spectrum(t: &ComplexMatrix) -> Result<Witness> {
    let eig = hermitian_eig(&t.hermitian_part())?;
    Ok(Witness {
        psi: eig.vector(0),
        phi: eig.vector(eig.values.len() - 1),
    })
}

pub(crate) fn witness_residual(span: &OperatorSubspace, w: &Witness) -> f64 {
    span.project(&w.difference()).frobenius_norm()
}

/// Decides pure-state informational completeness.
///
/// * complement dimension 0: IC, hence PIC.
/// * complement dimension 1: exact rank test on the selfadjoint generator.
/// * larger complements: falsification search; `PicUnfalsified` if nothing
///   is found.
pub fn check_pic(povm: &Povm, settings: &FalsifierSettings) -> Result<PicVerdict> {
    let span = operator_span(povm)?;
    let complement = orthogonal_complement(&span);
    let complement_dim = complement.dim();
    let mut verdict = PicVerdict {
        status: PicStatus::PicCertified,
        complement_dim,
        witness: None,
        residual: None,
        generator_rank: None,
        generator: None,
    };
    match complement_dim {
        0 => Ok(verdict),
        1 => {
            let t = selfadjoint_generator(&complement.basis()[0]);
            let rank = numerical_rank(&t, tol::RANK);
            verdict.generator_rank = Some(rank);
            verdict.generator = Some(t.clone());
            if rank < 3 {
                let w = witness_from_spectrum(&t)?;
                verdict.residual = Some(witness_residual(&span, &w));
                verdict.witness = Some(w);
                verdict.status = PicStatus::NotPic;
            }
            Ok(verdict)
        }
        _ => {
            let outcome = falsify(povm, &span, settings)?;
            if outcome.is_witness() {
                verdict.status = PicStatus::NotPic;
                verdict.residual = Some(outcome.residual);
                verdict.witness = Some(outcome.witness);
            } else {
                verdict.status = PicStatus::PicUnfalsified;
            }
            Ok(verdict)
        }
    }
}

/// `p_x = tr(ρ M(x))`, with values in `(−10⁻⁹, 0)` clamped to zero.
pub fn born_probabilities(povm: &Povm, state: &ComplexMatrix) -> Result<Vec<f64>> {
    if state.shape() != (povm.dim, povm.dim) {
        return Err(Error::Domain(format!(
            "state of shape {:?} for a {}-dimensional POVM",
            state.shape(),
            povm.dim
        )));
    }
    if !state.is_hermitian() {
        return Err(Error::Domain("state is not Hermitian".into()));
    }
    let tr = state.trace();
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-9 {
        return Err(Error::Domain(format!("state has trace {:.6}, expected 1", tr.re)));
    }
    let low = *hermitian_eig(state)?.values.last().expect("nonempty");
    if low < -tol::PSD {
        return Err(Error::Domain(format!(
            "state is not positive semidefinite (min eigenvalue {low:.3e})"
        )));
    }
    Ok(povm
        .ops()
        .map(|m| {
            let p = crate::linalg::inner(state.as_slice(), m.as_slice()).re;
            if p < 0.0 && p > -tol::PSD {
                0.0
            } else {
                p
            }
        })
        .collect())
}

/// `M(gH) = U(g) M U(g)†` for one representative per coset. Fails unless the
/// seed is positive, commutes with `U(h)` for `h ∈ H`, and the orbit sums to
/// the identity.
pub fn build_covariant(rep: &ProjectiveRep, cosets: &CosetSpace, seed: &ComplexMatrix) -> Result<Povm> {
    let d = rep.dim();
    if seed.shape() != (d, d) {
        return Err(Error::Dimension(format!(
            "seed has shape {:?}, representation acts on dimension {d}",
            seed.shape()
        )));
    }
    if !seed.is_hermitian() {
        return Err(Error::Domain("seed is not Hermitian".into()));
    }
    let low = *hermitian_eig(seed)?.values.last().expect("nonempty");
    if low < -tol::PSD {
        return Err(Error::Domain(format!(
            "seed is not positive semidefinite (min eigenvalue {low:.3e})"
        )));
    }
    let scale = 1f64.max(seed.frobenius_norm());
    for &h in cosets.subgroup().members() {
        let c = seed.commutator(rep.matrix(h)).frobenius_norm();
        if c > 1e-9 * scale {
            return Err(Error::Domain(format!(
                "seed does not commute with U({}) (‖[M,U(h)]‖ = {c:.3e})",
                rep.group().name(h)
            )));
        }
    }
    let outcomes: Vec<Outcome> = cosets
        .representatives()
        .iter()
        .map(|&g| Outcome {
            label: rep.group().name(g).to_string(),
            op: seed.conjugate_by(rep.matrix(g)).hermitian_part(),
        })
        .collect();
    let povm = Povm::new(d, outcomes)?;
    let mut sum = ComplexMatrix::zeros(d, d);
    for m in povm.ops() {
        sum += m;
    }
    let deficit = &sum - &ComplexMatrix::identity(d);
    let norm = deficit.frobenius_norm();
    if norm > 1e-9 {
        return Err(Error::NotAnObservable { norm, deficit });
    }
    if !check_covariance(&povm, rep, cosets)? {
        return Err(Error::Inconsistency("constructed POVM is not covariant".into()));
    }
    Ok(povm)
}

/// Largest `‖U(g) M(x) U(g)† − M(g·x)‖_F` over all `g` and cosets `x`.
pub fn covariance_residual(povm: &Povm, rep: &ProjectiveRep, cosets: &CosetSpace) -> Result<f64> {
    covariance_residual_with(povm, rep, cosets, Execution::default())
}

/// [`covariance_residual`] with an explicit execution mode.
pub fn covariance_residual_with(
    povm: &Povm,
    rep: &ProjectiveRep,
    cosets: &CosetSpace,
    execution: Execution,
) -> Result<f64> {
    if povm.len() != cosets.len() {
        return Err(Error::Domain(format!(
            "{} outcomes but {} cosets",
            povm.len(),
            cosets.len()
        )));
    }
    if povm.dim() != rep.dim() {
        return Err(Error::Domain("POVM and representation dimensions differ".into()));
    }
    let ops: Vec<&ComplexMatrix> = povm.ops().collect();
    let per_g = map_indexed(rep.group().order(), execution, |g| {
        (0..cosets.len())
            .map(|x| {
                let moved = ops[x].conjugate_by(rep.matrix(g));
                (&moved - ops[cosets.act(g, x)]).frobenius_norm()
            })
            .fold(0.0, f64::max)
    });
    Ok(per_g.into_iter().fold(0.0, f64::max))
}

pub fn check_covariance(povm: &Povm, rep: &ProjectiveRep, cosets: &CosetSpace) -> Result<bool> {
    Ok(covariance_residual(povm, rep, cosets)? <= 1e-9)
}

/// Two pure states that every covariant observable of a representation fails
/// to separate: both are common eigenvectors of all `U(g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianCertificate {
    pub states: [Vec<C64>; 2],
}

impl AbelianCertificate {
    pub fn density(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::projector(&self.states[i])
    }

    /// Largest deviation of `tr(M(x) ρᵢ)` from `1/#Ω` over both states.
    pub fn verify(&self, povm: &Povm) -> Result<f64> {
        let uniform = 1.0 / povm.len() as f64;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for p in born_probabilities(povm, &self.density(i))? {
                worst = worst.max((p - uniform).abs());
            }
        }
        Ok(worst)
    }

    pub fn as_witness(&self) -> Witness {
        Witness {
            psi: self.states[0].clone(),
            phi: self.states[1].clone(),
        }
    }
}

/// Looks for two linearly independent common eigenvectors of all `U(g)`.
pub fn abelian_obstruction_certificate(rep: &ProjectiveRep) -> Option<AbelianCertificate> {
    let gens: Vec<ComplexMatrix> = rep
        .group()
        .generators()
        .into_iter()
        .map(|g| rep.matrix(g).clone())
        .collect();
    let mut lines = common_eigenspaces(&gens, rep.dim()).into_iter().flatten();
    let a = lines.next()?;
    let b = lines.next()?;
    Some(AbelianCertificate { states: [a, b] })
}
