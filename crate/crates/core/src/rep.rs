// SPDX-License-Identifier: Apache-2.0

//! Projective unitary representations, their multipliers, and the character
//! theory used to test cyclicity.
//!
//! A [`ProjectiveRep`] stores `g ↦ U(g)` together with the multiplier
//! `ω(g,h)` defined by `U(gh) = ω(g,h) U(g) U(h)`. Ordinary unitary
//! representations are the special case `ω ≡ 1`; the functions that need one
//! check this and return a domain error otherwise.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::group::{build_group, matrix_realization, FiniteGroup, GroupKind};
use crate::linalg::{
    approx_eq, hermitian_eig, inner, norm, numerical_rank, tol, ComplexMatrix, OperatorSubspace,
    C64, ONE, ZERO,
};

const UNITARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ProjectiveRep {
    group: FiniteGroup,
    dim: usize,
    matrices: Vec<ComplexMatrix>,
    multiplier: Vec<Vec<C64>>,
}

/// Validates `matrices` (one per group element, in index order) and extracts
/// the multiplier as `ω(g,h) = ⟨U(g)U(h), U(gh)⟩_HS / d`.
pub fn rep_from_matrices(group: &FiniteGroup, matrices: Vec<ComplexMatrix>) -> Result<ProjectiveRep> {
    let n = group.order();
    if matrices.len() != n {
        return Err(Error::Dimension(format!(
            "{} matrices for a group of order {n}",
            matrices.len()
        )));
    }
    let dim = matrices[0].rows();
    let scale = (dim as f64).sqrt().max(1.0);
    for (g, m) in matrices.iter().enumerate() {
        if m.shape() != (dim, dim) {
            return Err(Error::Dimension(format!(
                "matrix for {} has shape {:?}, expected {dim}x{dim}",
                group.name(g),
                m.shape()
            )));
        }
        let r = m.unitarity_residual();
        if r > UNITARY_TOL * scale {
            return Err(Error::Domain(format!(
                "U({}) is not unitary (residual {r:.3e})",
                group.name(g)
            )));
        }
    }
    let e = group.identity();
    if (&matrices[e] - &ComplexMatrix::identity(dim)).frobenius_norm() > UNITARY_TOL * scale {
        return Err(Error::NotProjectiveRep("U(e) is not the identity".into()));
    }

    let rows: Vec<Result<Vec<C64>>> = map_indexed(n, Execution::default(), |g| {
        (0..n)
            .map(|h| {
                let prod = matrices[g].matmul(&matrices[h]);
                let target = &matrices[group.mul(g, h)];
                let omega = inner(prod.as_slice(), target.as_slice()) / dim as f64;
                let residual = (target - &prod.scale(omega)).frobenius_norm();
                if residual > UNITARY_TOL * scale * 10.0 {
                    return Err(Error::NotProjectiveRep(format!(
                        "U({}{}) is not proportional to U({})U({}) (residual {residual:.3e})",
                        group.name(g),
                        group.name(h),
                        group.name(g),
                        group.name(h)
                    )));
                }
                Ok(omega / omega.norm())
            })
            .collect()
    });
    let multiplier = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let rep = ProjectiveRep {
        group: group.clone(),
        dim,
        matrices,
        multiplier,
    };
    let defect = rep.cocycle_defect();
    if defect > 1e-8 {
        return Err(Error::NotProjectiveRep(format!(
            "multiplier violates the cocycle identity (defect {defect:.3e})"
        )));
    }
    Ok(rep)
}

impl ProjectiveRep {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &ComplexMatrix {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }

    pub fn multiplier(&self, g: usize, h: usize) -> C64 {
        self.multiplier[g][h]
    }

    pub fn multiplier_table(&self) -> &[Vec<C64>] {
        &self.multiplier
    }

    /// `tr U(g)` for every element.
    pub fn character(&self) -> Vec<C64> {
        self.matrices.iter().map(ComplexMatrix::trace).collect()
    }

    /// Whether the multiplier is identically 1.
    pub fn is_ordinary(&self) -> bool {
        self.multiplier.iter().flatten().all(|&w| approx_eq(w, ONE))
    }

    pub(crate) fn require_ordinary(&self, what: &str) -> Result<()> {
        if self.is_ordinary() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{what} needs an ordinary unitary representation (multiplier ≢ 1)"
            )))
        }
    }

    /// Largest violation of `ω(g,hk)ω(h,k) = ω(g,h)ω(gh,k)` over all triples.
    pub fn cocycle_defect(&self) -> f64 {
        let g = &self.group;
        let w = &self.multiplier;
        let mut worst: f64 = 0.0;
        for a in g.elements() {
            for b in g.elements() {
                for c in g.elements() {
                    let lhs = w[a][g.mul(b, c)] * w[b][c];
                    let rhs = w[a][b] * w[g.mul(a, b)][c];
                    worst = worst.max((lhs - rhs).norm());
                }
            }
        }
        worst
    }

    /// Largest residual of `U(gh) = ω(g,h) U(g) U(h)`.
    pub fn projective_residual(&self) -> f64 {
        let g = &self.group;
        let mut worst: f64 = 0.0;
        for a in g.elements() {
            for b in g.elements() {
                let prod = self.matrices[a].matmul(&self.matrices[b]).scale(self.multiplier[a][b]);
                worst = worst.max((&self.matrices[g.mul(a, b)] - &prod).frobenius_norm());
            }
        }
        worst
    }

    /// `g ↦ f(g) U(g)`.
    pub fn rephased(&self, phases: &[C64]) -> Result<ProjectiveRep> {
        let mats = self
            .matrices
            .iter()
            .zip(phases)
            .map(|(m, &f)| m.scale(f))
            .collect();
        rep_from_matrices(&self.group, mats)
    }

    /// Compression `Q† V(g) Q` onto an invariant subspace with orthonormal
    /// basis `basis`.
    pub fn restrict(&self, basis: &[Vec<C64>]) -> Result<ProjectiveRep> {
        if basis.is_empty() {
            return Err(Error::Dimension("cannot restrict to the zero subspace".into()));
        }
        if basis.iter().any(|b| b.len() != self.dim) {
            return Err(Error::Dimension("basis vectors have the wrong length".into()));
        }
        let q = ComplexMatrix::from_columns(basis)?;
        let qa = q.adjoint();
        let mut mats = Vec::with_capacity(self.matrices.len());
        for (g, m) in self.matrices.iter().enumerate() {
            let mq = m.matmul(&q);
            let compressed = qa.matmul(&mq);
            let leak = (&mq - &q.matmul(&compressed)).frobenius_norm();
            if leak > 1e-8 {
                return Err(Error::Domain(format!(
                    "subspace is not invariant under U({}) (leak {leak:.3e})",
                    self.group.name(g)
                )));
            }
            mats.push(compressed);
        }
        rep_from_matrices(&self.group, mats)
    }

    /// Restriction of an operator-space representation (such as the
    /// conjugation representation) to an invariant operator subspace.
    pub fn restrict_to_operators(&self, s: &OperatorSubspace) -> Result<ProjectiveRep> {
        let basis: Vec<Vec<C64>> = s.basis().iter().map(|b| b.as_slice().to_vec()).collect();
        self.restrict(&basis)
    }
}

/// Direct sum of representations of the same group.
pub fn direct_sum(reps: &[&ProjectiveRep]) -> Result<ProjectiveRep> {
    let first = reps
        .first()
        .ok_or_else(|| Error::Dimension("direct sum of nothing".into()))?;
    let group = &first.group;
    if reps.iter().any(|r| r.group.order() != group.order()) {
        return Err(Error::Dimension("direct sum needs a common group".into()));
    }
    let dim: usize = reps.iter().map(|r| r.dim).sum();
    let mats = group
        .elements()
        .map(|g| {
            let mut m = ComplexMatrix::zeros(dim, dim);
            let mut off = 0;
            for r in reps {
                let block = r.matrix(g);
                for i in 0..r.dim {
                    for j in 0..r.dim {
                        m[(off + i, off + j)] = block[(i, j)];
                    }
                }
                off += r.dim;
            }
            m
        })
        .collect();
    rep_from_matrices(group, mats)
}

/// Left regular representation `[R(g)φ](x) = φ(g⁻¹x)` on functions on `G`.
pub fn regular_rep(group: &FiniteGroup) -> Result<ProjectiveRep> {
    let n = group.order();
    let mats = group
        .elements()
        .map(|g| {
            let mut m = ComplexMatrix::zeros(n, n);
            for x in group.elements() {
                m[(group.mul(g, x), x)] = ONE;
            }
            m
        })
        .collect();
    rep_from_matrices(group, mats)
}

/// `Ũ(g) L = U(g) L U(g)†`, acting on row-major vectorized operators as
/// `U(g) ⊗ conj(U(g))`. Always an ordinary representation.
pub fn conjugation_rep(rep: &ProjectiveRep) -> Result<ProjectiveRep> {
    let mats = rep.matrices.iter().map(|u| u.kron(&u.conj())).collect();
    let tilde = rep_from_matrices(&rep.group, mats)?;
    if !tilde.is_ordinary() {
        return Err(Error::Inconsistency(
            "conjugation representation has a nontrivial multiplier".into(),
        ));
    }
    Ok(tilde)
}

// ---------------------------------------------------------------------------
// Exactness of multipliers

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactnessMethod {
    /// The multiplier is already trivial.
    Trivial,
    /// Closed form for cyclic groups: rescale a generator by a root of `α(n)`.
    CyclicClosedForm,
    /// A common eigenline of all `U(g)` yields the phase function.
    CommonEigenvector,
    /// Exhaustive search over generator phases.
    PhaseSearch,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Exactness {
    /// `ω(g,h) = f(g) f(h) conj(f(gh))`; `g ↦ f(g)U(g)` is an ordinary
    /// representation (verified).
    Exact {
        phases: Vec<C64>,
        method: ExactnessMethod,
    },
    NotExact,
    /// The phase search exceeded its budget.
    Undetermined,
}

impl Exactness {
    pub fn is_exact(&self) -> Option<bool> {
        match self {
            Exactness::Exact { .. } => Some(true),
            Exactness::NotExact => Some(false),
            Exactness::Undetermined => None,
        }
    }
}

const PHASE_SEARCH_BUDGET: usize = 1 << 20;

/// Largest violation of `ω(g,h) = f(g) f(h) conj(f(gh))`.
pub fn exactness_defect(rep: &ProjectiveRep, phases: &[C64]) -> f64 {
    let g = &rep.group;
    let mut worst: f64 = 0.0;
    for a in g.elements() {
        for b in g.elements() {
            let rhs = phases[a] * phases[b] * phases[g.mul(a, b)].conj();
            worst = worst.max((rep.multiplier(a, b) - rhs).norm());
        }
    }
    worst
}

fn accept(rep: &ProjectiveRep, phases: Vec<C64>, method: ExactnessMethod) -> Option<Exactness> {
    (exactness_defect(rep, &phases) <= 1e-8).then_some(Exactness::Exact { phases, method })
}

/// Decides whether the multiplier of `rep` is exact, trying in turn the
/// trivial case, the cyclic closed form, a common eigenline, and finally an
/// exhaustive phase search.
pub fn is_exact_multiplier(rep: &ProjectiveRep) -> Exactness {
    let n = rep.group.order();
    if rep.is_ordinary() {
        return Exactness::Exact {
            phases: vec![ONE; n],
            method: ExactnessMethod::Trivial,
        };
    }
    if let Some(found) = cyclic_phases(rep).and_then(|f| accept(rep, f, ExactnessMethod::CyclicClosedForm)) {
        return found;
    }
    if let Some(found) = eigenline_phases(rep).and_then(|f| accept(rep, f, ExactnessMethod::CommonEigenvector)) {
        return found;
    }
    phase_search(rep)
}

/// For cyclic `G = ⟨s⟩` of order `n`: with `U(s)^k = α(k) U(s^k)` and
/// `α(n) = e^{iθ}`, the map `k ↦ (e^{−iθ/n} U(s))^k` is an ordinary
/// representation, so `f(s^k) = e^{−ikθ/n} α(k)`.
fn cyclic_phases(rep: &ProjectiveRep) -> Option<Vec<C64>> {
    let g = &rep.group;
    let s = g.cyclic_generator()?;
    let n = g.order();
    let d = rep.dim as f64;
    let u = rep.matrix(s);
    let mut phases = vec![ZERO; n];
    let mut power = ComplexMatrix::identity(rep.dim);
    let mut element = g.identity();
    let mut alphas = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        let alpha = inner(rep.matrix(element).as_slice(), power.as_slice()) / d;
        alphas.push((alpha / alpha.norm(), element));
        power = power.matmul(u);
        element = g.mul(element, s);
    }
    let theta = alphas[n].0.arg();
    for (k, &(alpha, el)) in alphas.iter().take(n).enumerate() {
        phases[el] = C64::from_polar(1.0, -(k as f64) * theta / n as f64) * alpha;
    }
    Some(phases)
}

/// Prop.-2-style construction: if `U(g)v = e(g)v` for all `g`, then
/// `f = conj(e)` trivializes the multiplier.
fn eigenline_phases(rep: &ProjectiveRep) -> Option<Vec<C64>> {
    let gens: Vec<ComplexMatrix> = rep
        .group
        .generators()
        .into_iter()
        .map(|g| rep.matrix(g).clone())
        .collect();
    let spaces = common_eigenspaces(&gens, rep.dim);
    let v = spaces.first()?.first()?.clone();
    Some(
        rep.matrices
            .iter()
            .map(|m| inner(&v, &m.apply(&v)).conj())
            .map(|z| z / z.norm())
            .collect(),
    )
}

/// Any solution satisfies `f(g)^n = Π_h ω(g,h)`, so on each generator `f`
/// ranges over the `n`-th roots of that product; the rest of `f` follows by
/// propagation along `f(xs) = f(x) f(s) conj(ω(x,s))`.
fn phase_search(rep: &ProjectiveRep) -> Exactness {
    let g = &rep.group;
    let n = g.order();
    let gens = g.generators();
    let Some(total) = n.checked_pow(gens.len() as u32) else {
        return Exactness::Undetermined;
    };
    if total > PHASE_SEARCH_BUDGET {
        return Exactness::Undetermined;
    }
    let base: Vec<C64> = gens
        .iter()
        .map(|&s| {
            let prod: C64 = g.elements().map(|h| rep.multiplier(s, h)).product();
            C64::from_polar(1.0, prod.arg() / n as f64)
        })
        .collect();
    for combo in 0..total {
        let mut idx = combo;
        let gen_phases: Vec<C64> = base
            .iter()
            .map(|&b| {
                let k = idx % n;
                idx /= n;
                b * C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
            })
            .collect();
        if let Some(phases) = propagate(rep, &gens, &gen_phases) {
            if let Some(found) = accept(rep, phases, ExactnessMethod::PhaseSearch) {
                return found;
            }
        }
    }
    Exactness::NotExact
}

fn propagate(rep: &ProjectiveRep, gens: &[usize], gen_phases: &[C64]) -> Option<Vec<C64>> {
    let g = &rep.group;
    let mut phases: Vec<Option<C64>> = vec![None; g.order()];
    phases[g.identity()] = Some(ONE);
    let mut queue = vec![g.identity()];
    while let Some(x) = queue.pop() {
        let fx = phases[x].expect("queued elements are assigned");
        for (&s, &fs) in gens.iter().zip(gen_phases) {
            let y = g.mul(x, s);
            let fy = fx * fs * rep.multiplier(x, s).conj();
            match phases[y] {
                Some(existing) if (existing - fy).norm() > 1e-8 => return None,
                Some(_) => {}
                None => {
                    phases[y] = Some(fy);
                    queue.push(y);
                }
            }
        }
    }
    phases.into_iter().collect()
}

// ---------------------------------------------------------------------------
// Common eigenvectors

/// Eigenspaces of a unitary (normal) matrix, grouped by eigenvalue. Uses the
/// Hermitian combination `Re U + b·Im U` whose eigenspaces coincide with those
/// of `U` for generic `b`.
pub fn unitary_eigenspaces(u: &ComplexMatrix) -> Vec<(C64, Vec<Vec<C64>>)> {
    const B: f64 = 0.754_877_666_246_692_7;
    let re = u.hermitian_part();
    let im = (u - &u.adjoint()).scale(C64::new(0.0, -0.5));
    let h = &re + &im.scale_real(B);
    let eig = hermitian_eig(&h).expect("Hermitian by construction");
    let mut out: Vec<(C64, Vec<Vec<C64>>)> = Vec::new();
    let mut last = f64::NAN;
    for (k, &l) in eig.values.iter().enumerate() {
        let v = eig.vector(k);
        if (l - last).abs() <= 1e-8 {
            out.last_mut().expect("cluster started").1.push(v);
        } else {
            let lambda = inner(&v, &u.apply(&v));
            out.push((lambda, vec![v]));
            last = l;
        }
    }
    out
}

/// Mutually orthogonal subspaces whose vectors are eigenvectors of every
/// matrix in `mats` (simultaneous eigenspaces). Each entry is an orthonormal
/// basis. Empty when no common eigenvector exists.
pub fn common_eigenspaces(mats: &[ComplexMatrix], dim: usize) -> Vec<Vec<Vec<C64>>> {
    let mut spaces: Vec<Vec<Vec<C64>>> = vec![(0..dim)
        .map(|i| {
            let mut e = vec![ZERO; dim];
            e[i] = ONE;
            e
        })
        .collect()];
    for m in mats {
        let eigenspaces = unitary_eigenspaces(m);
        let mut refined = Vec::new();
        for s in &spaces {
            for (_, e) in &eigenspaces {
                let meet = intersect(s, e);
                if !meet.is_empty() {
                    refined.push(meet);
                }
            }
        }
        spaces = refined;
        if spaces.is_empty() {
            break;
        }
    }
    spaces
}

/// Orthonormal basis of `span(a) ∩ span(b)` for orthonormal `a`, `b`.
fn intersect(a: &[Vec<C64>], b: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let k = a.len();
    // M = A† P_B A where P_B = Σ b b†
    let m = ComplexMatrix::from_fn(k, k, |i, j| {
        b.iter().map(|bv| inner(&a[i], bv) * inner(bv, &a[j])).sum()
    });
    let eig = hermitian_eig(&m.hermitian_part()).expect("Hermitian by construction");
    eig.values
        .iter()
        .enumerate()
        .take_while(|(_, &l)| l > 1.0 - 1e-6)
        .map(|(c, _)| {
            let x = eig.vector(c);
            let mut v = vec![ZERO; a[0].len()];
            for (coef, basis) in x.iter().zip(a) {
                for (vi, bi) in v.iter_mut().zip(basis) {
                    *vi += coef * bi;
                }
            }
            let n = norm(&v);
            v.iter().map(|z| z / n).collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Irreducible representations and characters

#[derive(Debug, Clone)]
pub struct Irrep {
    pub name: String,
    pub dim: usize,
    pub matrices: Vec<ComplexMatrix>,
    pub character: Vec<C64>,
}

impl Irrep {
    fn new(group: &FiniteGroup, name: String, matrices: Vec<ComplexMatrix>) -> Result<Self> {
        let rep = rep_from_matrices(group, matrices)?;
        rep.require_ordinary("an irrep")?;
        let character = rep.character();
        let norm2 = character_inner(&character, &character);
        if (norm2 - ONE).norm() > 1e-9 {
            return Err(Error::Inconsistency(format!(
                "{name} is reducible (character norm² = {:.6})",
                norm2.re
            )));
        }
        Ok(Irrep {
            name,
            dim: rep.dim,
            matrices: rep.matrices,
            character,
        })
    }
}

/// `(1/#G) Σ_g conj(χ₁(g)) χ₂(g)`.
pub fn character_inner(chi1: &[C64], chi2: &[C64]) -> C64 {
    inner(chi1, chi2) / chi1.len() as f64
}

/// The complete dual of a supported group.
pub fn irreps_of(group: &FiniteGroup) -> Result<Vec<Irrep>> {
    let kind = group.kind().ok_or_else(|| {
        Error::NotImplemented("irreps of a group given only by its table".into())
    })?;
    let dual = irreps_of_kind(group, kind)?;
    let total: usize = dual.iter().map(|p| p.dim * p.dim).sum();
    if total != group.order() {
        return Err(Error::Inconsistency(format!(
            "Σ dim² = {total} ≠ #G = {}",
            group.order()
        )));
    }
    Ok(dual)
}

fn irreps_of_kind(group: &FiniteGroup, kind: &GroupKind) -> Result<Vec<Irrep>> {
    match kind {
        GroupKind::Cyclic(n) => {
            let n = *n;
            (0..n)
                .map(|j| {
                    let mats = (0..n)
                        .map(|k| {
                            let phase = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
                            ComplexMatrix::diag(&[C64::from_polar(1.0, phase)])
                        })
                        .collect();
                    Irrep::new(group, format!("chi{j}"), mats)
                })
                .collect()
        }
        GroupKind::Product(a, b) => {
            let (ga, gb) = (build_group(a)?, build_group(b)?);
            let (da, db) = (irreps_of(&ga)?, irreps_of(&gb)?);
            let nb = gb.order();
            let mut out = Vec::new();
            for pa in &da {
                for pb in &db {
                    let mats = group
                        .elements()
                        .map(|x| pa.matrices[x / nb].kron(&pb.matrices[x % nb]))
                        .collect();
                    out.push(Irrep::new(group, format!("{}*{}", pa.name, pb.name), mats)?);
                }
            }
            Ok(out)
        }
        GroupKind::Quaternion | GroupKind::Dihedral8 => {
            // One-dimensional characters: χ_k is +1 on {±1} and on the pair of
            // elements realized by ±(i)σ_k, −1 elsewhere. Indices follow the
            // canonical element order (±1, ±σ₁-type, ±σ₂-type, ±σ₃-type).
            let mut out = Vec::new();
            for k in 0..4 {
                let mats = group
                    .elements()
                    .map(|g| {
                        let plus = k == 0 || g < 2 || g / 2 == k;
                        ComplexMatrix::diag_real(&[if plus { 1.0 } else { -1.0 }])
                    })
                    .collect();
                out.push(Irrep::new(group, format!("chi{k}"), mats)?);
            }
            let pi = matrix_realization(kind).expect("non-abelian order-8 kinds");
            out.push(Irrep::new(group, "pi".into(), pi)?);
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// Isotypic decomposition and cyclicity

#[derive(Debug, Clone)]
pub struct IsotypicComponent {
    pub irrep: usize,
    pub name: String,
    pub irrep_dim: usize,
    pub multiplicity: usize,
    /// Orthogonal projection onto the isotypic component.
    pub projection: ComplexMatrix,
    /// `basis[a][j]` spans `κ_π ⊗ V_π` so that
    /// `V(g) basis[a][j] = Σ_b π(g)_{ba} basis[b][j]`.
    pub basis: Vec<Vec<Vec<C64>>>,
}

#[derive(Debug, Clone)]
pub struct IsotypicDecomposition {
    pub rep: ProjectiveRep,
    pub components: Vec<IsotypicComponent>,
}

fn group_algebra_element(rep: &ProjectiveRep, coeffs: impl Fn(usize) -> C64) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rep.dim, rep.dim);
    for g in rep.group.elements() {
        out += &rep.matrix(g).scale(coeffs(g));
    }
    out
}

/// Splits an ordinary representation along a complete dual, using
/// `P_π = (dim π / #G) Σ_g conj(χ_π(g)) V(g)`.
pub fn isotypic_decompose(rep: &ProjectiveRep, dual: &[Irrep]) -> Result<IsotypicDecomposition> {
    rep.require_ordinary("isotypic_decompose")?;
    let n = rep.group.order() as f64;
    let chi_v = rep.character();
    let mut components = Vec::with_capacity(dual.len());
    let mut total = ComplexMatrix::zeros(rep.dim, rep.dim);
    for (idx, pi) in dual.iter().enumerate() {
        if pi.matrices.len() != rep.group.order() {
            return Err(Error::Dimension(format!("irrep {} has the wrong group", pi.name)));
        }
        let m = character_inner(&pi.character, &chi_v);
        let rounded = m.re.round();
        if (m - C64::new(rounded, 0.0)).norm() > 1e-6 || rounded < 0.0 {
            return Err(Error::Inconsistency(format!(
                "multiplicity of {} is {:.6}{:+.6}i, not a nonnegative integer",
                pi.name, m.re, m.im
            )));
        }
        let multiplicity = rounded as usize;
        let dpi = pi.dim as f64;
        let projection = group_algebra_element(rep, |g| pi.character[g].conj() * (dpi / n));
        let rank = if multiplicity == 0 {
            0
        } else {
            numerical_rank(&projection, tol::RANK)
        };
        if rank != pi.dim * multiplicity {
            return Err(Error::Inconsistency(format!(
                "rank(P_{}) = {rank}, expected {}",
                pi.name,
                pi.dim * multiplicity
            )));
        }
        let basis = if multiplicity == 0 {
            Vec::new()
        } else {
            component_basis(rep, pi, multiplicity)?
        };
        total += &projection;
        components.push(IsotypicComponent {
            irrep: idx,
            name: pi.name.clone(),
            irrep_dim: pi.dim,
            multiplicity,
            projection,
            basis,
        });
    }
    let decomposition = IsotypicDecomposition { rep: rep.clone(), components };
    let defect = decomposition.projection_defect();
    if defect > 1e-9 || (&total - &ComplexMatrix::identity(rep.dim)).frobenius_norm() > 1e-9 {
        return Err(Error::Inconsistency(format!(
            "isotypic projections are inconsistent (defect {defect:.3e}); dual incomplete?"
        )));
    }
    Ok(decomposition)
}

/// Adapted basis of one isotypic component: an orthonormal basis `w_j` of the
/// range of `P_{00}`, transported by `P_{a0}` where
/// `P_{ab} = (dim π / #G) Σ_g conj(π(g)_{ab}) V(g)`.
fn component_basis(rep: &ProjectiveRep, pi: &Irrep, multiplicity: usize) -> Result<Vec<Vec<Vec<C64>>>> {
    let n = rep.group.order() as f64;
    let dpi = pi.dim as f64;
    let p_a0 = |a: usize| group_algebra_element(rep, |g| pi.matrices[g][(a, 0)].conj() * (dpi / n));
    let p00 = p_a0(0);
    let eig = hermitian_eig(&p00.hermitian_part())?;
    let w: Vec<Vec<C64>> = (0..multiplicity).map(|j| eig.vector(j)).collect();
    if eig.values.get(multiplicity - 1).is_none_or(|&l| l < 0.5)
        || eig.values.get(multiplicity).is_some_and(|&l| l > 0.5)
    {
        return Err(Error::Inconsistency(format!(
            "P_00 for {} does not have rank {multiplicity}",
            pi.name
        )));
    }
    Ok((0..pi.dim)
        .map(|a| {
            let pa = p_a0(a);
            w.iter().map(|wj| pa.apply(wj)).collect()
        })
        .collect())
}

impl IsotypicDecomposition {
    /// Largest violation of `P² = P` and `P_π P_σ = 0`.
    pub fn projection_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.components.iter().enumerate() {
            let p = &a.projection;
            worst = worst.max((&p.matmul(p) - p).frobenius_norm());
            for b in &self.components[i + 1..] {
                worst = worst.max(p.matmul(&b.projection).frobenius_norm());
            }
        }
        worst
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.components.iter().map(|c| c.multiplicity).collect()
    }

    pub fn multiplicity_of(&self, name: &str) -> Option<usize> {
        self.components.iter().find(|c| c.name == name).map(|c| c.multiplicity)
    }

    /// `(dim π) × m_π` coordinate matrix of `P_π v` in the adapted basis; its
    /// rank is the Schmidt rank of the projected vector.
    pub fn schmidt_coordinates(&self, component: usize, v: &[C64]) -> ComplexMatrix {
        let c = &self.components[component];
        ComplexMatrix::from_fn(c.irrep_dim, c.multiplicity, |a, j| inner(&c.basis[a][j], v))
    }
}

/// Cyclicity by direct span: `rank [V(g)v]_g = dim`.
pub fn cyclic_by_span(rep: &ProjectiveRep, v: &[C64]) -> Result<bool> {
    if v.len() != rep.dim {
        return Err(Error::Domain(format!(
            "vector of length {} for a representation of dimension {}",
            v.len(),
            rep.dim
        )));
    }
    let cols: Vec<Vec<C64>> = rep.matrices.iter().map(|m| m.apply(v)).collect();
    Ok(numerical_rank(&ComplexMatrix::from_columns(&cols)?, tol::RANK) == rep.dim)
}

/// Cyclicity by the Schmidt-rank criterion: for every irrep, the Schmidt rank
/// of `P_π v` equals the multiplicity.
pub fn cyclic_by_schmidt(decomp: &IsotypicDecomposition, v: &[C64]) -> Result<bool> {
    if v.len() != decomp.rep.dim {
        return Err(Error::Domain("vector length does not match the representation".into()));
    }
    let n = norm(v);
    if n == 0.0 {
        return Ok(decomp.rep.dim == 0);
    }
    let unit: Vec<C64> = v.iter().map(|z| z / n).collect();
    for (k, c) in decomp.components.iter().enumerate() {
        if c.multiplicity == 0 {
            continue;
        }
        if c.multiplicity > c.irrep_dim {
            return Ok(false);
        }
        if numerical_rank(&decomp.schmidt_coordinates(k, &unit), tol::RANK) != c.multiplicity {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `v` is cyclic for the decomposed representation. Both criteria are
/// evaluated; disagreement is reported as an inconsistency.
pub fn is_cyclic_vector(decomp: &IsotypicDecomposition, v: &[C64]) -> Result<bool> {
    let by_span = cyclic_by_span(&decomp.rep, v)?;
    let by_schmidt = cyclic_by_schmidt(decomp, v)?;
    if by_span != by_schmidt {
        return Err(Error::Inconsistency(format!(
            "span test says {by_span}, Schmidt-rank test says {by_schmidt}"
        )));
    }
    Ok(by_span)
}

/// A representation is cyclic iff every multiplicity is at most the irrep
/// dimension.
pub fn is_cyclic_rep(decomp: &IsotypicDecomposition) -> bool {
    decomp.components.iter().all(|c| c.multiplicity <= c.irrep_dim)
}

/// Serialized form: group table plus per-element matrices as `[re, im]` rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepJson {
    pub group: crate::group::GroupJson,
    pub matrices: Vec<crate::io::MatrixJson>,
}

impl ProjectiveRep {
    pub fn to_json(&self) -> RepJson {
        RepJson {
            group: self.group.to_json(),
            matrices: self.matrices.iter().map(crate::io::MatrixJson::from).collect(),
        }
    }

    pub fn from_json(json: &RepJson) -> Result<Self> {
        let group = FiniteGroup::from_json(&json.group)?;
        let mats = json
            .matrices
            .iter()
            .map(|m| m.to_matrix())
            .collect::<Result<Vec<_>>>()?;
        rep_from_matrices(&group, mats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_group, GroupKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quaternion_pi() -> (FiniteGroup, ProjectiveRep) {
        let g = build_group(&GroupKind::Quaternion).unwrap();
        let pi = matrix_realization(&GroupKind::Quaternion).unwrap();
        let rep = rep_from_matrices(&g, pi).unwrap();
        (g, rep)
    }

    fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
        (0..n)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn ordinary_rep_has_trivial_multiplier() {
        let (_, rep) = quaternion_pi();
        assert!(rep.is_ordinary());
        assert!(rep.cocycle_defect() < 1e-12);
        assert_eq!(
            is_exact_multiplier(&rep),
            Exactness::Exact {
                phases: vec![ONE; 8],
                method: ExactnessMethod::Trivial
            }
        );
    }

    #[test]
    fn rejects_non_unitary_and_non_projective() {
        let g = build_group(&GroupKind::Cyclic(2)).unwrap();
        let bad = vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2).scale_real(2.0)];
        assert!(matches!(rep_from_matrices(&g, bad), Err(Error::Domain(_))));
        let [s1, _, s3] = crate::linalg::pauli();
        // σ₁ then σ₃ would need σ₁² ∝ U(0) = 𝟙, fine; use a Z3 table with two
        // unrelated unitaries instead.
        let g3 = build_group(&GroupKind::Cyclic(3)).unwrap();
        let mats = vec![ComplexMatrix::identity(2), s1, s3];
        assert!(matches!(rep_from_matrices(&g3, mats), Err(Error::NotProjectiveRep(_))));
    }

    #[test]
    fn character_orthogonality_for_supported_duals() {
        let kinds = [
            GroupKind::Quaternion,
            GroupKind::Dihedral8,
            GroupKind::Cyclic(5),
            "cyclic:2xcyclic:4".parse().unwrap(),
        ];
        for kind in kinds {
            let g = build_group(&kind).unwrap();
            let dual = irreps_of(&g).unwrap();
            let total: usize = dual.iter().map(|p| p.dim * p.dim).sum();
            assert_eq!(total, g.order());
            for (i, a) in dual.iter().enumerate() {
                for (j, b) in dual.iter().enumerate() {
                    let want = if i == j { ONE } else { ZERO };
                    assert!((character_inner(&a.character, &b.character) - want).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn table_two_rows() {
        let q = build_group(&GroupKind::Quaternion).unwrap();
        let d = build_group(&GroupKind::Dihedral8).unwrap();
        let dq = irreps_of(&q).unwrap();
        let dd = irreps_of(&d).unwrap();
        assert_eq!(dq.iter().map(|p| p.dim).collect::<Vec<_>>(), vec![1, 1, 1, 1, 2]);
        // χ₂ is +1 on iσ₂ for Q (element "-j") and on σ₂ for D (element "s2").
        assert_eq!(dq[2].character[q.index_of("-j").unwrap()], ONE);
        assert_eq!(dd[2].character[d.index_of("s2").unwrap()], ONE);
        assert_eq!(dq[1].character[q.index_of("j").unwrap()], -ONE);
        assert_eq!(dd[3].character[d.index_of("is1").unwrap()], -ONE);
    }

    #[test]
    fn unsupported_group_is_not_implemented() {
        let g = FiniteGroup::from_table(vec!["e".into()], vec![vec![0]], false).unwrap();
        assert!(matches!(irreps_of(&g), Err(Error::NotImplemented(_))));
    }

    #[test]
    fn conjugation_of_pi_splits_into_characters() {
        for kind in [GroupKind::Quaternion, GroupKind::Dihedral8] {
            let g = build_group(&kind).unwrap();
            let rep = rep_from_matrices(&g, matrix_realization(&kind).unwrap()).unwrap();
            let tilde = conjugation_rep(&rep).unwrap();
            let decomp = isotypic_decompose(&tilde, &irreps_of(&g).unwrap()).unwrap();
            assert_eq!(decomp.multiplicities(), vec![1, 1, 1, 1, 0]);
            assert!(is_cyclic_rep(&decomp));
        }
    }

    #[test]
    fn adapted_basis_transforms_like_the_irrep() {
        let g = build_group(&GroupKind::Quaternion).unwrap();
        let reg = regular_rep(&g).unwrap();
        let dual = irreps_of(&g).unwrap();
        let decomp = isotypic_decompose(&reg, &dual).unwrap();
        for c in &decomp.components {
            let pi = &dual[c.irrep];
            for x in g.elements() {
                for a in 0..c.irrep_dim {
                    for j in 0..c.multiplicity {
                        let lhs = reg.matrix(x).apply(&c.basis[a][j]);
                        let mut rhs = vec![ZERO; reg.dim()];
                        for b in 0..c.irrep_dim {
                            for (r, e) in rhs.iter_mut().zip(&c.basis[b][j]) {
                                *r += pi.matrices[x][(b, a)] * e;
                            }
                        }
                        let diff: Vec<C64> = lhs.iter().zip(&rhs).map(|(p, q)| p - q).collect();
                        assert!(norm(&diff) < 1e-10);
                    }
                }
            }
            // orthonormal
            let flat: Vec<&Vec<C64>> = c.basis.iter().flatten().collect();
            for (i, u) in flat.iter().enumerate() {
                for (j, w) in flat.iter().enumerate() {
                    let want = if i == j { ONE } else { ZERO };
                    assert!((inner(u, w) - want).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn regular_rep_is_cyclic_with_full_multiplicities() {
        let g = build_group(&GroupKind::Quaternion).unwrap();
        let decomp = isotypic_decompose(&regular_rep(&g).unwrap(), &irreps_of(&g).unwrap()).unwrap();
        assert_eq!(decomp.multiplicities(), vec![1, 1, 1, 1, 2]);
        assert!(is_cyclic_rep(&decomp));
        let mut delta = vec![ZERO; 8];
        delta[0] = ONE;
        assert!(is_cyclic_vector(&decomp, &delta).unwrap());
    }

    #[test]
    fn doubled_character_is_not_cyclic() {
        let g = build_group(&GroupKind::Cyclic(4)).unwrap();
        let dual = irreps_of(&g).unwrap();
        let chi = rep_from_matrices(&g, dual[1].matrices.clone()).unwrap();
        let doubled = direct_sum(&[&chi, &chi]).unwrap();
        let decomp = isotypic_decompose(&doubled, &dual).unwrap();
        assert!(!is_cyclic_rep(&decomp));
        assert!(!is_cyclic_vector(&decomp, &[ONE, ONE]).unwrap());
    }

    #[test]
    fn trivial_one_dim_rep_cyclic() {
        let g = build_group(&GroupKind::Cyclic(3)).unwrap();
        let triv = rep_from_matrices(&g, vec![ComplexMatrix::identity(1); 3]).unwrap();
        let decomp = isotypic_decompose(&triv, &irreps_of(&g).unwrap()).unwrap();
        assert!(is_cyclic_vector(&decomp, &[C64::new(0.3, 0.1)]).unwrap());
        assert!(matches!(cyclic_by_span(&triv, &[ONE, ONE]), Err(Error::Domain(_))));
    }

    #[test]
    fn cyclicity_criteria_agree_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = build_group(&GroupKind::Dihedral8).unwrap();
        let dual = irreps_of(&g).unwrap();
        let reg = regular_rep(&g).unwrap();
        let decomp = isotypic_decompose(&reg, &dual).unwrap();
        for trial in 0..50 {
            let mut v = random_vector(&mut rng, 8);
            if trial % 3 == 0 {
                // kill the χ₀ component to force a non-cyclic vector
                let mean: C64 = v.iter().sum::<C64>() / 8.0;
                v.iter_mut().for_each(|z| *z -= mean);
            }
            let cyclic = is_cyclic_vector(&decomp, &v).unwrap();
            assert_eq!(cyclic, trial % 3 != 0);
        }
    }

    #[test]
    fn cyclic_projective_reps_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2usize, 3, 5, 8] {
            let g = build_group(&GroupKind::Cyclic(n)).unwrap();
            // diagonal unitary rep times random phases
            let ks: Vec<usize> = (0..3).map(|_| rng.random_range(0..n)).collect();
            let phases: Vec<C64> = (0..n)
                .map(|x| if x == 0 { ONE } else { C64::from_polar(1.0, rng.random_range(0.0..6.28)) })
                .collect();
            let mats = (0..n)
                .map(|x| {
                    let diag: Vec<C64> = ks
                        .iter()
                        .map(|&k| C64::from_polar(1.0, 2.0 * PI * (k * x % n) as f64 / n as f64))
                        .collect();
                    ComplexMatrix::diag(&diag).scale(phases[x])
                })
                .collect();
            let rep = rep_from_matrices(&g, mats).unwrap();
            assert!(!rep.is_ordinary());
            match is_exact_multiplier(&rep) {
                Exactness::Exact { phases, method } => {
                    assert_eq!(method, ExactnessMethod::CyclicClosedForm);
                    assert!(rep.rephased(&phases).unwrap().is_ordinary());
                }
                other => panic!("expected exact, got {other:?}"),
            }
        }
    }

    #[test]
    fn eigenline_and_phase_search_paths() {
        // A projective rep of Z2xZ2 with an invariant line: 1 ⊕ (Pauli rep ⊗ phases).
        let g = build_group(&"cyclic:2xcyclic:2".parse().unwrap()).unwrap();
        let [s1, _, s3] = crate::linalg::pauli();
        let pauli_rep = [ComplexMatrix::identity(2), s3.clone(), s1.clone(), s1.matmul(&s3)];
        let pr = rep_from_matrices(&g, pauli_rep.to_vec()).unwrap();
        assert_eq!(is_exact_multiplier(&pr), Exactness::NotExact);

        let mats: Vec<ComplexMatrix> = (0..4)
            .map(|x| {
                let phase = C64::from_polar(1.0, 0.4 * x as f64);
                let mut m = ComplexMatrix::zeros(2, 2);
                m[(0, 0)] = ONE;
                m[(1, 1)] = C64::from_polar(1.0, PI * (x % 2) as f64);
                m.scale(phase)
            })
            .collect();
        let rep = rep_from_matrices(&g, mats).unwrap();
        match is_exact_multiplier(&rep) {
            Exactness::Exact { phases, method } => {
                assert_eq!(method, ExactnessMethod::CommonEigenvector);
                assert!(exactness_defect(&rep, &phases) < 1e-10);
            }
            other => panic!("{other:?}"),
        }

        // Phase search alone also settles both cases.
        assert!(matches!(phase_search(&rep), Exactness::Exact { .. }));
        assert_eq!(phase_search(&pr), Exactness::NotExact);
    }

    #[test]
    fn conjugation_rep_fixes_identity() {
        let (_, rep) = quaternion_pi();
        let tilde = conjugation_rep(&rep).unwrap();
        let id = ComplexMatrix::identity(2);
        for m in tilde.matrices() {
            let out = m.apply(id.as_slice());
            assert!(out.iter().zip(id.as_slice()).all(|(a, b)| (a - b).norm() < 1e-12));
        }
    }

    #[test]
    fn common_eigenspaces_of_commuting_diagonals() {
        let a = ComplexMatrix::diag(&[ONE, ONE, -ONE]);
        let b = ComplexMatrix::diag(&[ONE, -ONE, -ONE]);
        let spaces = common_eigenspaces(&[a, b], 3);
        assert_eq!(spaces.iter().map(Vec::len).sum::<usize>(), 3);
        let [s1, s2, _] = crate::linalg::pauli();
        assert!(common_eigenspaces(&[s1, s2], 2).is_empty());
    }

    #[test]
    fn rep_json_round_trip() {
        let (_, rep) = quaternion_pi();
        let text = serde_json::to_string(&rep.to_json()).unwrap();
        let back = ProjectiveRep::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.matrices(), rep.matrices());
    }
}
