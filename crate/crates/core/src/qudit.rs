//! Virtual qudits in correlation space: partners, capsules, SWAP retrieval and
//! Fisher information for unitary write operations on qudit registers.

use nalgebra::DMatrix;

use crate::algebra::{self, check_unitary, HermitianOp, PureState, SuBasis};
use crate::error::{QicError, Result};
use crate::linalg::{
    self, apply_on_first_site, commutator, embed_first, hermitian_eigen, identity, kron,
    max_abs, max_abs_diff, projector, unitarity_residual, CMatrix, CVector, C64, ONE, ZERO,
};

/// Amplitudes below this magnitude are treated as empty branches.
const BRANCH_TOL: f64 = 1e-12;

/// A virtual qudit `T̂_i = V̂† (t_i ⊗ I) V̂`, stored through its conjugator `V̂`.
#[derive(Debug, Clone)]
pub struct VirtualQudit {
    basis: SuBasis,
    num_sites: usize,
    conjugator: CMatrix,
}

impl VirtualQudit {
    pub fn new(basis: SuBasis, num_sites: usize, conjugator: CMatrix) -> Result<Self> {
        let dim = basis.dim().pow(num_sites as u32);
        if conjugator.nrows() != dim {
            return Err(QicError::DimensionMismatch {
                expected: dim,
                found: conjugator.nrows(),
            });
        }
        check_unitary(&conjugator)?;
        Ok(VirtualQudit {
            basis,
            num_sites,
            conjugator,
        })
    }

    /// The first physical qudit, `V̂ = I`.
    pub fn first_real_qudit(basis: SuBasis, num_sites: usize) -> Self {
        let dim = basis.dim().pow(num_sites as u32);
        VirtualQudit {
            basis,
            num_sites,
            conjugator: identity(dim),
        }
    }

    pub fn basis(&self) -> &SuBasis {
        &self.basis
    }

    pub fn local_dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        self.conjugator.nrows()
    }

    pub fn conjugator(&self) -> &CMatrix {
        &self.conjugator
    }

    /// `T̂_μ` on the full register for the extended index (`μ = 0` is `I`).
    pub fn operator(&self, mu: usize) -> CMatrix {
        let rest = self.dim() / self.local_dim();
        let local = embed_first(&self.basis.extended(mu), rest);
        let t = self.conjugator.adjoint() * local * &self.conjugator;
        (&t + t.adjoint()).scale(0.5)
    }

    /// The `d² − 1` traceless operators `T̂_1 … T̂_{d²−1}`.
    pub fn operators(&self) -> Vec<CMatrix> {
        (1..self.basis.extended_len())
            .map(|mu| self.operator(mu))
            .collect()
    }

    /// The qudit whose operators are `Û† T̂_i Û`.
    pub fn conjugated(&self, u: &CMatrix) -> Result<Self> {
        Self::new(self.basis.clone(), self.num_sites, &self.conjugator * u)
    }

    fn check_state(&self, state: &PureState) -> Result<()> {
        if state.dim() != self.dim() || state.local_dim() != self.local_dim() {
            return Err(QicError::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        Ok(())
    }

    /// Expectation values `⟨Ψ|T̂_μ|Ψ⟩` over the extended index.
    pub fn expectations(&self, state: &PureState) -> Result<Vec<f64>> {
        self.check_state(state)?;
        let rotated = &self.conjugator * state.amplitudes();
        Ok((0..self.basis.extended_len())
            .map(|mu| {
                let moved = apply_on_first_site(&self.basis.extended(mu), &rotated);
                rotated.dotc(&moved).re
            })
            .collect())
    }

    /// `ρ̂ = (1/d) Σ_μ ⟨T̂_μ⟩ t_μ`.
    pub fn correlation_state(&self, state: &PureState) -> Result<CorrelationState> {
        let d = self.local_dim();
        let mut rho = CMatrix::zeros(d, d);
        for (mu, value) in self.expectations(state)?.into_iter().enumerate() {
            rho += self.basis.extended(mu).scale(value / d as f64);
        }
        CorrelationState::new(rho)
    }
}

/// Density matrix of a virtual qudit.
#[derive(Debug, Clone)]
pub struct CorrelationState {
    matrix: CMatrix,
}

impl CorrelationState {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let tr = linalg::trace(&matrix);
        if (tr - ONE).norm() > 1e-10 {
            return Err(QicError::InternalConsistency(format!(
                "correlation state has trace {tr}"
            )));
        }
        let herm = linalg::hermiticity_residual(&matrix);
        if herm > 1e-10 {
            return Err(QicError::InternalConsistency(format!(
                "correlation state is not Hermitian (residual {herm:.3e})"
            )));
        }
        let (values, _) = hermitian_eigen(&matrix);
        if values[0] < -1e-10 {
            return Err(QicError::InternalConsistency(format!(
                "correlation state has negative eigenvalue {:.3e}",
                values[0]
            )));
        }
        Ok(CorrelationState { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.matrix * &self.matrix)).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }
}

/// A write `Ŵ(θ) = exp(−iθT̂)` with `T̂ = Û† (t̂ ⊗ I) Û`.
#[derive(Debug, Clone)]
pub struct WriteOperation {
    local_generator: CMatrix,
    conjugator: CMatrix,
    num_sites: usize,
}

impl WriteOperation {
    pub fn new(local_generator: CMatrix, conjugator: CMatrix, num_sites: usize) -> Result<Self> {
        let d = local_generator.nrows();
        if !local_generator.is_square() || d < 2 {
            return Err(QicError::InvalidDimension(format!(
                "local generator must be a square matrix of size >= 2, got {:?}",
                local_generator.shape()
            )));
        }
        let herm = linalg::hermiticity_residual(&local_generator);
        if herm > 1e-12 {
            return Err(QicError::NotHermitian { residual: herm });
        }
        let tr = linalg::trace(&local_generator).norm();
        let norm = linalg::trace(&(&local_generator * &local_generator)).re;
        if tr > 1e-10 || (norm - d as f64).abs() > 1e-10 {
            return Err(QicError::Precondition(format!(
                "local generator must be traceless with Tr(t^2) = {d} (trace {tr:.3e}, Tr(t^2) {norm})"
            )));
        }
        let dim = d.pow(num_sites as u32);
        if conjugator.nrows() != dim {
            return Err(QicError::DimensionMismatch {
                expected: dim,
                found: conjugator.nrows(),
            });
        }
        check_unitary(&conjugator)?;
        Ok(WriteOperation {
            local_generator,
            conjugator,
            num_sites,
        })
    }

    /// A write acting on the first physical qudit only (`Û = I`).
    pub fn local(local_generator: CMatrix, num_sites: usize) -> Result<Self> {
        let dim = local_generator.nrows().pow(num_sites as u32);
        Self::new(local_generator, identity(dim), num_sites)
    }

    pub fn local_dim(&self) -> usize {
        self.local_generator.nrows()
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn dim(&self) -> usize {
        self.conjugator.nrows()
    }

    pub fn local_generator(&self) -> &CMatrix {
        &self.local_generator
    }

    pub fn conjugator(&self) -> &CMatrix {
        &self.conjugator
    }

    /// `T̂ = Û† (t̂ ⊗ I) Û` as a dense matrix.
    pub fn generator(&self) -> CMatrix {
        let rest = self.dim() / self.local_dim();
        let t = self.conjugator.adjoint() * embed_first(&self.local_generator, rest) * &self.conjugator;
        (&t + t.adjoint()).scale(0.5)
    }

    /// `ŵ(θ) = exp(−iθt̂)`.
    pub fn local_unitary(&self, theta: f64) -> CMatrix {
        linalg::unitary_from_hermitian(&self.local_generator, theta)
    }

    /// `Ŵ(θ)|Ψ⟩`, applied as `Û†`, then `ŵ(θ) ⊗ I`, then `Û`.
    pub fn apply(&self, state: &PureState, theta: f64) -> Result<PureState> {
        algebra::apply_structured_unitary(state, &self.local_unitary(theta), Some(&self.conjugator))
    }

    fn check_state(&self, state: &PureState) -> Result<()> {
        if state.dim() != self.dim() || state.local_dim() != self.local_dim() {
            return Err(QicError::DimensionMismatch {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        Ok(())
    }
}

/// Two commuting virtual qudits that are jointly pure.
#[derive(Debug, Clone)]
pub struct PartnerPair {
    pub qudit_a: VirtualQudit,
    pub qudit_b: VirtualQudit,
    /// `ρ̂_AB` assembled from the generator expectation values.
    pub joint_state: CMatrix,
    /// `|Ψ_AB⟩ = Σ √p_i |φ_i⟩|φ_i⟩` predicted by the Schmidt decomposition.
    pub joint_vector: CVector,
}

impl PartnerPair {
    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.joint_state * &self.joint_state)).re
    }

    /// `max_{i,j} ‖[T̂_i^(A), T̂_j^(B)]‖_max`.
    pub fn locality_residual(&self) -> f64 {
        let a = self.qudit_a.operators();
        let b = self.qudit_b.operators();
        let mut worst: f64 = 0.0;
        for ta in &a {
            for tb in &b {
                worst = worst.max(max_abs(&commutator(ta, tb)));
            }
        }
        worst
    }
}

/// `ρ̂_AB = (1/d²) Σ_{μν} ⟨T̂_μ^(A) T̂_ν^(B)⟩ t_μ ⊗ t_ν`.
pub fn joint_correlation_state(
    a: &VirtualQudit,
    b: &VirtualQudit,
    state: &PureState,
) -> Result<CMatrix> {
    a.check_state(state)?;
    b.check_state(state)?;
    let basis = a.basis();
    let d = basis.dim();
    let n_ext = basis.extended_len();
    let rotated_a = a.conjugator() * state.amplitudes();
    let rotated_b = b.conjugator() * state.amplitudes();
    let back = a.conjugator() * b.conjugator().adjoint();
    // ⟨Ψ|T_μ^A T_ν^B|Ψ⟩ = ((t_μ⊗I) V_A Ψ)† (V_A V_B† (t_ν⊗I) V_B Ψ)
    let left: Vec<CVector> = (0..n_ext)
        .map(|mu| apply_on_first_site(&basis.extended(mu), &rotated_a))
        .collect();
    let right: Vec<CVector> = (0..n_ext)
        .map(|nu| &back * apply_on_first_site(&basis.extended(nu), &rotated_b))
        .collect();
    let mut rho = CMatrix::zeros(d * d, d * d);
    for (mu, l) in left.iter().enumerate() {
        let t_mu = basis.extended(mu);
        for (nu, r) in right.iter().enumerate() {
            let value = l.dotc(r);
            rho += kron(&t_mu, &basis.extended(nu)) * value;
        }
    }
    Ok(rho.unscale((d * d) as f64))
}

/// Builds the partner of `qudit_a` in `state`.
///
/// With `|Ψ'⟩ = V̂_A|Ψ⟩ = Σ √p_i |φ_i⟩|ψ_i⟩`, the environment unitary `v̂` sends
/// `|ψ_i⟩ ↦ |φ_i⟩|0…0⟩`, so the partner basis coincides with the Schmidt basis
/// of the first site and `V̂_B = SWAP₁₂ (I ⊗ v̂) V̂_A`.
pub fn construct_partner(qudit_a: &VirtualQudit, state: &PureState) -> Result<PartnerPair> {
    qudit_a.check_state(state)?;
    if state.num_sites() < 2 {
        return Err(QicError::NoEnvironment);
    }
    let d = qudit_a.local_dim();
    let rest = state.rest_dim();
    let tail = rest / d;
    let rotated = state.with_amplitudes(qudit_a.conjugator() * state.amplitudes())?;
    let sd = algebra::schmidt(&rotated)?;

    let mut chi = CVector::zeros(tail);
    chi[0] = ONE;
    let sources = linalg::orthonormal_completion(&sd.right, rest, rest);
    let targets_head: Vec<CVector> = sd.left.iter().map(|phi| linalg::kron_vec(phi, &chi)).collect();
    let targets = linalg::orthonormal_completion(&targets_head, rest, rest);
    let mut env = CMatrix::zeros(rest, rest);
    for (t, s) in targets.iter().zip(&sources) {
        env += t * s.adjoint();
    }

    let swap12 = kron(&algebra::swap_operator(d)?, &identity(tail));
    let conj_b = swap12 * kron(&identity(d), &env) * qudit_a.conjugator();
    let qudit_b = VirtualQudit::new(qudit_a.basis().clone(), qudit_a.num_sites(), conj_b)?;

    let mut joint_vector = CVector::zeros(d * d);
    for (s, phi) in sd.coefficients.iter().zip(&sd.left) {
        joint_vector += linalg::kron_vec(phi, phi).scale(*s);
    }
    let joint_state = joint_correlation_state(qudit_a, &qudit_b, state)?;
    Ok(PartnerPair {
        qudit_a: qudit_a.clone(),
        qudit_b,
        joint_state,
        joint_vector,
    })
}

/// Both sides of the partner write-action identity at one `θ`.
#[derive(Debug, Clone)]
pub struct WriteAction {
    /// `ρ̂_AB(θ)` recomputed from `Ŵ(θ)|Ψ⟩`.
    pub recomputed: CMatrix,
    /// `(ŵ(θ) ⊗ I) ρ̂_AB (ŵ(θ) ⊗ I)†`.
    pub predicted: CMatrix,
}

impl WriteAction {
    pub fn residual(&self) -> f64 {
        max_abs_diff(&self.recomputed, &self.predicted)
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.recomputed * &self.recomputed)).re
    }
}

pub fn partner_write_action(
    pair: &PartnerPair,
    write: &WriteOperation,
    theta: f64,
    state: &PureState,
) -> Result<WriteAction> {
    write.check_state(state)?;
    let mismatch = max_abs_diff(pair.qudit_a.conjugator(), write.conjugator());
    if mismatch > 1e-10 {
        return Err(QicError::ContractViolation(format!(
            "partner A was not built from the write's conjugator (max deviation {mismatch:.3e})"
        )));
    }
    let written = write.apply(state, theta)?;
    let recomputed = joint_correlation_state(&pair.qudit_a, &pair.qudit_b, &written)?;
    let w = kron(&write.local_unitary(theta), &identity(write.local_dim()));
    let predicted = &w * &pair.joint_state * w.adjoint();
    Ok(WriteAction {
        recomputed,
        predicted,
    })
}

/// A quantum information capsule for one write operation.
#[derive(Debug, Clone)]
pub struct Qic {
    pub qudit: VirtualQudit,
    pub state: CorrelationState,
    /// `|Φ⟩ = Σ c_i |φ_i⟩`.
    pub capsule: CVector,
    /// Reference environment vector `|ψ⟩`.
    pub reference: CVector,
    pub reference_index: usize,
    /// Eigenvalues of `t̂`, descending, paired with the columns of `eigenbasis`.
    pub eigenvalues: Vec<f64>,
    pub eigenbasis: CMatrix,
    /// Branch amplitudes `c_i` (phase-carrying).
    pub amplitudes: Vec<C64>,
    /// `V̂ = Σ_i |φ_i⟩⟨φ_i| ⊗ V_i`, without the write conjugator.
    pub branch_map: CMatrix,
    write_conjugator: CMatrix,
    write_generator: CMatrix,
}

impl Qic {
    pub fn purity(&self) -> f64 {
        self.state.purity()
    }

    /// `|Φ(θ)⟩ = ŵ(θ)|Φ⟩`, the capsule state after a write.
    pub fn written_capsule(&self, write: &WriteOperation, theta: f64) -> CVector {
        write.local_unitary(theta) * &self.capsule
    }

    fn check_write(&self, write: &WriteOperation) -> Result<()> {
        let dev = max_abs_diff(&self.write_conjugator, write.conjugator())
            .max(max_abs_diff(&self.write_generator, write.local_generator()));
        if dev > 1e-10 {
            return Err(QicError::ContractViolation(format!(
                "capsule was built for a different write (max deviation {dev:.3e})"
            )));
        }
        Ok(())
    }

    /// The deformed capsule with `V̂(r) = exp(−i r t̂ ⊗ |ψ⟩⟨ψ|) V̂`.
    pub fn deformed(&self, write: &WriteOperation, r: f64) -> Result<VirtualQudit> {
        self.check_write(write)?;
        let d = write.local_dim();
        let rest = write.dim() / d;
        // (t̂ ⊗ P)^n = t̂^n ⊗ P for a projector P
        let phase = write.local_unitary(r) - identity(d);
        let deform = identity(d * rest) + kron(&phase, &projector(&self.reference));
        VirtualQudit::new(
            self.qudit.basis().clone(),
            self.qudit.num_sites(),
            deform * &self.branch_map * &self.write_conjugator,
        )
    }
}

/// Gauge for a conditional vector: first significant component real positive.
fn gauge_phase(y: &CVector) -> C64 {
    let norm = y.norm();
    y.iter()
        .find(|z| z.norm() > 1e-8 * norm)
        .map(|z| z / z.norm())
        .unwrap_or(ONE)
}

/// Builds a QIC for `write` on `state`.
///
/// `Û|Ψ⟩` is expanded along the eigenbasis of `t̂` (eigenvalues descending) as
/// `Σ c_i |φ_i⟩|ψ_i⟩`. Each branch is rotated onto the reference vector (the
/// branch with the largest `|c_i|`, lowest index on ties), which leaves
/// `V̂ Û|Ψ⟩ = |Φ⟩|ψ⟩`. Empty branches keep `V_i = I`.
pub fn construct_qic(write: &WriteOperation, state: &PureState) -> Result<Qic> {
    write.check_state(state)?;
    let d = write.local_dim();
    let rest = write.dim() / d;
    let (mut values, vectors) = hermitian_eigen(write.local_generator());
    values.reverse();
    let eigenbasis = CMatrix::from_fn(d, d, |i, j| vectors[(i, d - 1 - j)]);

    let rotated = write.conjugator() * state.amplitudes();
    let coeffs = linalg::first_site_matrix(&rotated, d);
    let mut amplitudes = Vec::with_capacity(d);
    let mut branches: Vec<Option<CVector>> = Vec::with_capacity(d);
    for i in 0..d {
        let phi = eigenbasis.column(i);
        let y: CVector = (phi.adjoint() * &coeffs).transpose();
        let norm = y.norm();
        if norm < BRANCH_TOL {
            amplitudes.push(C64::new(norm, 0.0));
            branches.push(None);
            continue;
        }
        let phase = gauge_phase(&y);
        amplitudes.push(phase * norm);
        branches.push(Some(y.unscale(norm) / phase));
    }

    let mut reference_index = 0;
    for (i, c) in amplitudes.iter().enumerate() {
        if c.norm() > amplitudes[reference_index].norm() {
            reference_index = i;
        }
    }
    let reference = branches[reference_index]
        .clone()
        .ok_or_else(|| QicError::InternalConsistency("no populated branch".into()))?;

    let mut branch_map = CMatrix::zeros(d * rest, d * rest);
    for (i, branch) in branches.iter().enumerate() {
        let phi = eigenbasis.column(i).into_owned();
        let local = match branch {
            Some(psi) => algebra::map_vector_unitary(psi, &reference)?,
            None => identity(rest),
        };
        branch_map += kron(&projector(&phi), &local);
    }

    let mut capsule = CVector::zeros(d);
    for (i, c) in amplitudes.iter().enumerate() {
        capsule += eigenbasis.column(i) * *c;
    }

    let basis = SuBasis::new(d)?;
    let qudit = VirtualQudit::new(basis, write.num_sites(), &branch_map * write.conjugator())?;
    let corr = qudit.correlation_state(state)?;
    Ok(Qic {
        qudit,
        state: corr,
        capsule,
        reference,
        reference_index,
        eigenvalues: values,
        eigenbasis,
        amplitudes,
        branch_map,
        write_conjugator: write.conjugator().clone(),
        write_generator: write.local_generator().clone(),
    })
}

/// Outcome of swapping a virtual qudit with an external register in `|0⟩`.
#[derive(Debug, Clone)]
pub struct SwapRetrieval {
    /// Joint vector on `register ⊗ external`.
    pub joint: CVector,
    /// Reduced state left in the register.
    pub residual: CMatrix,
    /// Reduced state of the external qudit.
    pub extracted: CMatrix,
}

impl SwapRetrieval {
    pub fn fidelity_with(&self, target: &CVector) -> f64 {
        linalg::expectation(&self.extracted, target).re
    }
}

/// `Û_swap = (1/d) Σ_μ T̂_μ ⊗ t_μ` as a dense matrix on `register ⊗ external`.
pub fn virtual_swap(qudit: &VirtualQudit) -> CMatrix {
    let basis = qudit.basis();
    let d = basis.dim();
    let dim = qudit.dim();
    let mut swap = CMatrix::zeros(dim * d, dim * d);
    for mu in 0..basis.extended_len() {
        swap += kron(&qudit.operator(mu), &basis.extended(mu));
    }
    swap.unscale(d as f64)
}

pub fn retrieve_by_swap(qudit: &VirtualQudit, state_after_write: &PureState) -> Result<SwapRetrieval> {
    qudit.check_state(state_after_write)?;
    let d = qudit.local_dim();
    let swap = virtual_swap(qudit);
    let residual = unitarity_residual(&swap);
    if residual > 1e-8 {
        return Err(QicError::BrokenVirtualQudit { residual });
    }
    let mut fiducial = CVector::zeros(d);
    fiducial[0] = ONE;
    let input = linalg::kron_vec(state_after_write.amplitudes(), &fiducial);
    let joint = swap * input;
    Ok(SwapRetrieval {
        residual: linalg::trace_out_last(&joint, d),
        extracted: linalg::reduce_to_last(&joint, d),
        joint,
    })
}

/// `4 (⟨T̂²⟩ − ⟨T̂⟩²)` for a Hermitian operator on the full register.
pub fn variance_fisher(op: &CMatrix, state: &PureState) -> f64 {
    let moved = op * state.amplitudes();
    let mean = state.amplitudes().dotc(&moved).re;
    let second = moved.norm_squared();
    (4.0 * (second - mean * mean)).max(0.0)
}

/// Quantum Fisher information of a write on a pure state.
pub fn fisher_information(write: &WriteOperation, state: &PureState) -> Result<f64> {
    write.check_state(state)?;
    let rotated = write.conjugator() * state.amplitudes();
    let moved = apply_on_first_site(write.local_generator(), &rotated);
    let mean = rotated.dotc(&moved).re;
    let second = moved.norm_squared();
    Ok((4.0 * (second - mean * mean)).max(0.0))
}

/// The `d − 1` diagonal generators of su(d).
pub fn commuting_generators(d: usize) -> Result<Vec<HermitianOp>> {
    let basis = SuBasis::new(d)?;
    basis
        .cartan()
        .iter()
        .map(|c| HermitianOp::new(c.clone()))
        .collect()
}

/// Lifts local generators to `Ĉ_i = Û† (ĉ_i ⊗ I) Û`.
pub fn lift_generators(
    local: &[HermitianOp],
    conjugator: &CMatrix,
) -> Result<Vec<HermitianOp>> {
    local
        .iter()
        .map(|c| {
            let rest = conjugator.nrows() / c.dim();
            let m = conjugator.adjoint() * embed_first(c.matrix(), rest) * conjugator;
            HermitianOp::new((&m + m.adjoint()).scale(0.5))
        })
        .collect()
}

/// SLD Fisher matrix `F_ij = 4 Re⟨ΔĈ_i ΔĈ_j⟩` for commuting generators.
pub fn sld_fisher_matrix(generators: &[HermitianOp], state: &PureState) -> Result<DMatrix<f64>> {
    for g in generators {
        if g.dim() != state.dim() {
            return Err(QicError::DimensionMismatch {
                expected: state.dim(),
                found: g.dim(),
            });
        }
    }
    for (i, a) in generators.iter().enumerate() {
        for b in &generators[i + 1..] {
            let residual = max_abs(&commutator(a.matrix(), b.matrix()));
            if residual >= 1e-10 {
                return Err(QicError::Precondition(format!(
                    "generators do not commute (residual {residual:.3e})"
                )));
            }
        }
    }
    let psi = state.amplitudes();
    let moved: Vec<CVector> = generators.iter().map(|g| g.matrix() * psi).collect();
    let means: Vec<f64> = moved.iter().map(|m| psi.dotc(m).re).collect();
    let k = generators.len();
    Ok(DMatrix::from_fn(k, k, |i, j| {
        4.0 * (moved[i].dotc(&moved[j]).re - means[i] * means[j])
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxEntangledCheck {
    pub feasible: bool,
    /// `⟨Ψ|T̂|Ψ⟩`.
    pub expectation: f64,
}

/// Necessary condition `⟨Ψ|T̂|Ψ⟩ = 0` for a maximally entangled partner pair.
pub fn max_entangled_partner_feasible(
    write: &WriteOperation,
    state: &PureState,
) -> Result<MaxEntangledCheck> {
    write.check_state(state)?;
    let rotated = write.conjugator() * state.amplitudes();
    let expectation = rotated
        .dotc(&apply_on_first_site(write.local_generator(), &rotated))
        .re;
    Ok(MaxEntangledCheck {
        feasible: expectation.abs() < 1e-10,
        expectation,
    })
}

/// The qudit GHZ state `Σ_i |i…i⟩/√d` (the Bell state for `d = N = 2`).
pub fn ghz_state(d: usize, num_sites: usize) -> Result<PureState> {
    let dim = d.pow(num_sites as u32);
    let mut amps = CVector::from_element(dim, ZERO);
    let stride: usize = (0..num_sites).map(|k| d.pow(k as u32)).sum();
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        amps[i * stride] = amp;
    }
    PureState::new(d, num_sites, amps)
}
