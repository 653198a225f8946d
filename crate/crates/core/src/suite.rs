//! Randomized invariant suites shared by `qic verify` and `qic qudit-suite`.
//!
//! Every check reports the worst residual seen over its trials next to the
//! tolerance it was held to.

use std::fmt::Write as _;

use nalgebra::DVector;
use rand::Rng;

use crate::algebra::{self, PureState, SuBasis};
use crate::error::Result;
use crate::gaussian::{self, GaussianState};
use crate::lattice::{self, LatticeConfig, ModeMatrix};
use crate::linalg::{self, embed_first, hermitian_eigen, max_abs_diff, trace_distance, CMatrix};
use crate::qudit::{self, VirtualQudit, WriteOperation};
use crate::random::{self, QicRng, PRNG_NAME};
use crate::record::{fmt_f64, StateRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub module: &'static str,
    pub invariant: String,
    pub trials: usize,
    /// Worst residual; larger is worse unless `lower_bound` is set.
    pub worst: f64,
    pub tolerance: f64,
    /// The check asserts `worst > tolerance` instead of `worst < tolerance`.
    pub lower_bound: bool,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        if self.lower_bound {
            self.worst > self.tolerance
        } else {
            self.worst < self.tolerance
        }
    }
}

/// Running maximum of a residual over trials.
struct Tracker {
    module: &'static str,
    invariant: String,
    trials: usize,
    worst: f64,
    tolerance: f64,
}

impl Tracker {
    fn new(module: &'static str, invariant: impl Into<String>, tolerance: f64) -> Self {
        Tracker {
            module,
            invariant: invariant.into(),
            trials: 0,
            worst: 0.0,
            tolerance,
        }
    }

    fn record(&mut self, residual: f64) {
        self.trials += 1;
        // NaN must fail the check
        if residual.is_nan() || residual > self.worst {
            self.worst = if residual.is_nan() { f64::INFINITY } else { residual };
        }
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            module: self.module,
            invariant: self.invariant,
            trials: self.trials,
            worst: self.worst,
            tolerance: self.tolerance,
            lower_bound: false,
        }
    }
}

fn boolean(module: &'static str, invariant: &str, ok: bool) -> CheckOutcome {
    CheckOutcome {
        module,
        invariant: invariant.into(),
        trials: 1,
        worst: if ok { 0.0 } else { 1.0 },
        tolerance: 0.5,
        lower_bound: false,
    }
}

pub fn random_state(rng: &mut QicRng, d: usize, n: usize) -> Result<PureState> {
    PureState::new(d, n, random::random_unit_vector(rng, d.pow(n as u32)))
}

/// Random write: normalized su(d) generator conjugated by a Haar unitary.
pub fn random_write(rng: &mut QicRng, d: usize, n: usize) -> Result<WriteOperation> {
    let basis = SuBasis::new(d)?;
    let t = random::random_local_generator(rng, &basis);
    let u = random::haar_unitary(rng, d.pow(n as u32));
    WriteOperation::new(t, u, n)
}

/// Generator-level algebra checks for `d ∈ {2, 3, 4}`.
pub fn algebra_checks() -> Result<Vec<CheckOutcome>> {
    let mut ortho = Tracker::new("qudit_algebra", "Tr(t_mu t_nu) = d delta", 1e-10);
    let mut swap = Tracker::new("qudit_algebra", "SWAP equals (1/d) sum t_mu (x) t_mu", 1e-12);
    let mut involution = Tracker::new("qudit_algebra", "SWAP unitary and involutive", 1e-12);
    for d in 2..=4 {
        let basis = SuBasis::new(d)?;
        for mu in 0..basis.extended_len() {
            for nu in 0..basis.extended_len() {
                let tr = linalg::trace(&(basis.extended(mu) * basis.extended(nu)));
                let expected = if mu == nu { d as f64 } else { 0.0 };
                ortho.record((tr - linalg::C64::new(expected, 0.0)).norm());
            }
        }
        let s = algebra::swap_operator(d)?;
        swap.record(max_abs_diff(&s, &algebra::swap_from_generators(&basis)));
        involution.record(
            linalg::unitarity_residual(&s).max(max_abs_diff(&(&s * &s), &linalg::identity(d * d))),
        );
    }
    Ok(vec![ortho.finish(), swap.finish(), involution.finish()])
}

/// Schmidt and map-vector checks on random states.
pub fn decomposition_checks(rng: &mut QicRng, trials: usize) -> Result<Vec<CheckOutcome>> {
    let mut schmidt = Tracker::new("qudit_algebra", "Schmidt marginal reconstruction", 1e-10);
    let mut complement = Tracker::new("qudit_algebra", "map_vector_unitary identity off span", 1e-12);
    for trial in 0..trials {
        let d = 2 + trial % 3;
        let state = random_state(rng, d, 2)?;
        let dec = algebra::schmidt(&state)?;
        let p: f64 = dec.probabilities().iter().sum();
        let mut rho = CMatrix::zeros(d, d);
        for (pi, phi) in dec.probabilities().iter().zip(&dec.left) {
            rho += linalg::projector(phi).scale(*pi);
        }
        let marginal = linalg::reduce_to_first_site(state.amplitudes(), d);
        schmidt.record(max_abs_diff(&rho, &marginal).max((p - 1.0).abs()));

        let dim = d + 2;
        let src = random::random_unit_vector(rng, dim);
        let dst = random::random_unit_vector(rng, dim);
        let v = algebra::map_vector_unitary(&src, &dst)?;
        let span = linalg::orthonormal_completion(&[src, dst], dim, dim);
        let mut worst: f64 = 0.0;
        for w in &span[2..] {
            worst = worst.max((&v * w - w).iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
        complement.record(worst);
    }
    Ok(vec![schmidt.finish(), complement.finish()])
}

/// QIC construction, SWAP retrieval, partner and Fisher checks on random
/// `(state, Û, t̂)` triples.
pub fn qudit_checks(rng: &mut QicRng, d: usize, n: usize, trials: usize) -> Result<Vec<CheckOutcome>> {
    let tag = |s: &str| format!("{s} [d={d} N={n}]");
    let mut purity = Tracker::new("qudit_info", tag("QIC purity"), 1e-8);
    let mut commute = Tracker::new("qudit_info", tag("QIC branch map commutes with t (x) I"), 1e-10);
    let mut left = Tracker::new("qudit_info", tag("SWAP residual trace distance"), 1e-7);
    let mut fidelity = Tracker::new("qudit_info", tag("SWAP extracted fidelity defect"), 1e-7);
    let mut partner_purity = Tracker::new("qudit_info", tag("partner purity"), 1e-8);
    let mut locality = Tracker::new("qudit_info", tag("partner locality"), 1e-9);
    let mut action = Tracker::new("qudit_info", tag("partner write action"), 1e-8);
    let mut fisher = Tracker::new("qudit_info", tag("Fisher independent of theta"), 1e-9);
    let mut closure = Tracker::new("qudit_info", tag("equivalence closure spectrum"), 1e-9);
    let mut family = Tracker::new("qudit_info", tag("deformed QIC purity"), 1e-9);

    let basis = SuBasis::new(d)?;
    for _ in 0..trials {
        let state = random_state(rng, d, n)?;
        let write = random_write(rng, d, n)?;

        let qic = qudit::construct_qic(&write, &state)?;
        purity.record((qic.purity() - 1.0).abs());
        let rest = write.dim() / d;
        let t_full = embed_first(write.local_generator(), rest);
        commute.record(linalg::max_abs(&linalg::commutator(&qic.branch_map, &t_full)));

        let mut residuals = Vec::new();
        for theta in [0.0, 1.3] {
            let written = write.apply(&state, theta)?;
            let out = qudit::retrieve_by_swap(&qic.qudit, &written)?;
            let target = qic.written_capsule(&write, theta);
            fidelity.record((1.0 - out.fidelity_with(&target)).abs());
            residuals.push(out.residual);
        }
        left.record(trace_distance(&residuals[0], &residuals[1]));

        let pair = qudit::construct_partner(&VirtualQudit::new(basis.clone(), n, write.conjugator().clone())?, &state)?;
        partner_purity.record((pair.purity() - 1.0).abs());
        locality.record(pair.locality_residual());
        for theta in [0.1, 0.7, 2.3] {
            action.record(qudit::partner_write_action(&pair, &write, theta, &state)?.residual());
        }

        let f0 = qudit::fisher_information(&write, &state)?;
        for theta in [0.5, 1.5] {
            let f = qudit::fisher_information(&write, &write.apply(&state, theta)?)?;
            fisher.record((f - f0).abs() / f0.max(1e-300));
        }

        // exp(-i Σ c_μ T̂_μ) = V†(w ⊗ I)V for the QIC's own conjugator
        let w = random::random_local_generator(rng, &basis);
        let v = qic.qudit.conjugator();
        let big = v.adjoint() * embed_first(&linalg::unitary_from_hermitian(&w, 0.8), rest) * v;
        let moved = qic.qudit.conjugated(&big)?;
        let before = hermitian_eigen(qic.state.matrix()).0;
        let after = hermitian_eigen(moved.correlation_state(&state)?.matrix()).0;
        let spec_dev = before
            .iter()
            .zip(&after)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        closure.record(spec_dev);

        let deformed = qic.deformed(&write, rng.gen_range(-2.0..2.0))?;
        family.record((deformed.correlation_state(&state)?.purity() - 1.0).abs());
    }
    Ok(vec![
        purity.finish(),
        commute.finish(),
        left.finish(),
        fidelity.finish(),
        partner_purity.finish(),
        locality.finish(),
        action.finish(),
        fisher.finish(),
        closure.finish(),
        family.finish(),
    ])
}

/// Pure-state, closed-form QIC and uniqueness checks.
pub fn gaussian_checks(rng: &mut QicRng, trials: usize) -> Result<Vec<CheckOutcome>> {
    let m = "gaussian_cv";
    let mut purity = Tracker::new(m, "purity relation M Omega M = Omega/4", 1e-8);
    let mut pairing = Tracker::new(m, "conjugate pairing v^T Omega u = 1", 1e-8);
    let mut orth = Tracker::new(m, "conjugate orthogonality v^T M u = 0", 1e-8);
    let mut det = Tracker::new(m, "det m = 1/4", 1e-8);
    let mut unique = Tracker::new(m, "uniqueness: admissible perturbations raise det m", 1e-15);
    let mut shift = Tracker::new(m, "Fisher 4 v^T M v invariant under shift write", 1e-12);
    for trial in 0..trials {
        let n = 1 + trial % 8;
        let state = GaussianState::random_pure(rng, n)?;
        purity.record(state.purity_residual());
        let v = DVector::from_fn(2 * n, |_, _| rng.gen_range(-1.0..=1.0));
        let pair = gaussian::conjugate_qic_vector(&v, &state)?;
        pairing.record((pair.pairing() - 1.0).abs());
        orth.record(state.covariance_form(&v, &pair.u).abs());
        let base = gaussian::mode_covariance(&pair, &state).det();
        det.record((base - 0.25).abs());
        if n >= 2 {
            for _ in 0..20 {
                let delta = gaussian::admissible_perturbation(rng, &v, &state)?;
                let scale = rng.gen_range(0.05..1.0);
                let moved = gaussian::ModePair {
                    u: &pair.u + delta * scale,
                    ..pair.clone()
                };
                let gain = gaussian::mode_covariance(&moved, &state).det() - base;
                // a non-positive gain is a violation
                unique.record(if gain > 0.0 { 0.0 } else { 1.0 });
            }
        }
        let shifted = gaussian::apply_shift_write(&state, &v, rng.gen_range(-3.0..3.0))?;
        let f0 = 4.0 * state.covariance_form(&v, &v);
        let f1 = 4.0 * shifted.covariance_form(&v, &v);
        shift.record((f1 - f0).abs() / f0);
    }
    for s in [GaussianState::squeezed(0.7), GaussianState::two_mode_squeezed(0.9)] {
        purity.record(s.purity_residual());
    }

    let grid: Vec<f64> = (0..=400).map(|i| 1e-8 * 1e9f64.powf(i as f64 / 400.0)).collect();
    let monotone = grid
        .windows(2)
        .all(|w| gaussian::entropy_from_g(w[1]) > gaussian::entropy_from_g(w[0]));
    let limit = gaussian::entropy_from_g(1e-6) < 1e-10;
    let closed = 2f64.sqrt() * (1.0 + 2f64.sqrt()).ln() + 0.5f64.ln();
    let mut entropy = Tracker::new(m, "entropy S(g=1) closed form", 1e-10);
    entropy.record((gaussian::entropy_from_g(1.0) - closed).abs());

    Ok(vec![
        purity.finish(),
        pairing.finish(),
        orth.finish(),
        det.finish(),
        unique.finish(),
        shift.finish(),
        entropy.finish(),
        boolean(m, "entropy monotone in g on [1e-8, 10]", monotone && limit),
    ])
}

/// Lattice checks at the figure parameters plus random conjugate pairs.
pub fn lattice_checks(rng: &mut QicRng, trials: usize) -> Result<Vec<CheckOutcome>> {
    let m = "lattice_field";
    let config = LatticeConfig::new(30, 0.4)?;
    let mm = ModeMatrix::new(&config)?;
    let vacuum = lattice::vacuum_covariance(&config);
    let mut out = Vec::new();

    let mut inverse = Tracker::new(m, "A A^-1 = I", 1e-10);
    inverse.record(mm.inverse_residual());
    out.push(inverse.finish());
    let mut vac = Tracker::new(m, "vacuum purity relation", 1e-8);
    vac.record(vacuum.purity_residual());
    out.push(vac.finish());
    let mut routes = Tracker::new(m, "vacuum mode sums match Re(A D A^T)", 1e-12);
    routes.record(linalg_max_abs_real(
        &(vacuum.covariance() - lattice::vacuum_covariance_from_modes(&mm)),
    ));
    out.push(routes.finish());

    let mut pairing = Tracker::new(m, "evolved pairing v(t)^T Omega u(t) = 1", 1e-9);
    let mut det = Tracker::new(m, "evolved det m = 1/4 against vacuum", 1e-8);
    let mut parseval = Tracker::new(m, "v^T Omega v' invariant under evolution", 1e-9);
    for _ in 0..trials {
        let v = DVector::from_fn(60, |_, _| rng.gen_range(-1.0..=1.0));
        let w = DVector::from_fn(60, |_, _| rng.gen_range(-1.0..=1.0));
        let pair = gaussian::conjugate_qic_vector(&v, &vacuum)?;
        let base = gaussian::symplectic_product(&v, &w);
        for t in [1.0, 5.0, 25.0, 50.0] {
            let ev = lattice::evolve_pair(&pair, t, &mm)?;
            pairing.record((ev.pairing() - 1.0).abs());
            det.record((gaussian::mode_covariance(&ev.as_mode_pair(), &vacuum).det() - 0.25).abs());
            let (vt, _) = lattice::evolve_vector(&v, t, &mm)?;
            let (wt, _) = lattice::evolve_vector(&w, t, &mm)?;
            parseval.record((gaussian::symplectic_product(&vt, &wt) - base).abs());
        }
    }
    out.extend([pairing.finish(), det.finish(), parseval.finish()]);

    let fig = lattice::figure_experiment(&config, 15, &[0.0, 25.0, 50.0])?;
    let mut omega = Tracker::new(m, "omega_15 = sqrt(2.6)", 1e-12);
    omega.record((fig.omegas[14] - 2.6f64.sqrt()).abs());
    out.push(omega.finish());
    out.push(CheckOutcome {
        module: m,
        invariant: "u(0) off-site magnitude".into(),
        trials: 1,
        worst: fig.slices[0].max_off_site_u(15),
        tolerance: 1e-4,
        lower_bound: true,
    });
    out.push(CheckOutcome {
        module: m,
        invariant: "support of |u| grows from t=0 to t=50".into(),
        trials: 1,
        worst: (fig.slices[2].u_support(1e-3) as f64) - (fig.slices[0].u_support(1e-3) as f64),
        tolerance: 0.0,
        lower_bound: true,
    });

    let mut translation = Tracker::new(m, "translation covariance", 1e-10);
    let times = [0.0, 10.0];
    let base = lattice::figure_experiment(&config, 1, &times)?;
    for s in [1usize, 7, 29] {
        let moved = lattice::figure_experiment(&config, 1 + s, &times)?;
        for (a, b) in base.slices.iter().zip(&moved.slices) {
            for ra in &a.rows {
                let rb = &b.rows[(ra.site - 1 + s) % 30];
                let diff = [
                    ra.v_q - rb.v_q,
                    ra.v_p - rb.v_p,
                    ra.u_q - rb.u_q,
                    ra.u_p - rb.u_p,
                ]
                .iter()
                .fold(0.0f64, |acc, x| acc.max(x.abs()));
                translation.record(diff);
            }
        }
    }
    out.push(translation.finish());
    Ok(out)
}

fn linalg_max_abs_real(m: &nalgebra::DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

/// Checks an externally supplied state file against the GaussianState
/// invariants without rejecting it at parse time.
pub fn state_record_checks(record: &StateRecord) -> Vec<CheckOutcome> {
    let m = "gaussian_cv";
    let cov = &record.covariance;
    let mut symmetry = Tracker::new(m, "GaussianState symmetry", gaussian::SYMMETRY_TOL);
    symmetry.record(linalg_max_abs_real(&(cov - cov.transpose())));
    let mut out = vec![symmetry.finish()];
    let sym = (cov + cov.transpose()).scale(0.5);
    if let Ok(state) = GaussianState::new(record.mean.clone(), sym) {
        out.push(CheckOutcome {
            module: m,
            invariant: "GaussianState uncertainty relation".into(),
            trials: 1,
            worst: state.uncertainty_min_eigenvalue(),
            tolerance: -gaussian::UNCERTAINTY_TOL,
            lower_bound: true,
        });
    } else {
        out.push(boolean(m, "GaussianState uncertainty relation", false));
    }
    out
}

/// Everything `qic verify` runs, at fixed trial counts.
pub fn verify_all(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = random::rng_from_seed(seed);
    let mut out = algebra_checks()?;
    out.extend(decomposition_checks(&mut rng, 30)?);
    for (d, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        out.extend(qudit_checks(&mut rng, d, n, 10)?);
    }
    out.extend(gaussian_checks(&mut rng, 100)?);
    out.extend(lattice_checks(&mut rng, 20)?);
    Ok(out)
}

/// Per-module `(module, checks, failures)` counts.
pub fn module_counts(outcomes: &[CheckOutcome]) -> Vec<(&'static str, usize, usize)> {
    let mut counts: Vec<(&'static str, usize, usize)> = Vec::new();
    for o in outcomes {
        match counts.iter_mut().find(|c| c.0 == o.module) {
            Some(c) => {
                c.1 += 1;
                c.2 += usize::from(!o.passed());
            }
            None => counts.push((o.module, 1, usize::from(!o.passed()))),
        }
    }
    counts
}

/// CSV report: a `#` header naming the generator and seed, then one row per check.
pub fn format_report(title: &str, seed: u64, outcomes: &[CheckOutcome]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {title}");
    let _ = writeln!(out, "# prng: {PRNG_NAME}; seed: {seed}");
    out.push_str("module,invariant,trials,worst,tolerance,status\n");
    for o in outcomes {
        let bound = if o.lower_bound { ">" } else { "<" };
        let _ = writeln!(
            out,
            "{},{},{},{},{bound}{},{}",
            o.module,
            o.invariant.replace(',', ";"),
            o.trials,
            fmt_f64(o.worst),
            fmt_f64(o.tolerance),
            if o.passed() { "pass" } else { "FAIL" }
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracker_fails_on_nan() {
        let mut t = Tracker::new("m", "x", 1.0);
        t.record(0.5);
        t.record(f64::NAN);
        assert!(!t.finish().passed());
    }

    #[test]
    fn small_qudit_suite_passes() {
        let mut rng = random::rng_from_seed(7);
        for o in qudit_checks(&mut rng, 2, 2, 5).unwrap() {
            assert!(o.passed(), "{o:?}");
        }
    }

    #[test]
    fn injected_asymmetry_is_named() {
        let record = StateRecord::parse("gaussian N=1\nmean: 0,0\n1,1e-3\n0,1\n").unwrap();
        let failed: Vec<_> = state_record_checks(&record)
            .into_iter()
            .filter(|o| !o.passed())
            .collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].invariant, "GaussianState symmetry");
    }

    #[test]
    fn report_is_deterministic() {
        let a = format_report("t", 3, &algebra_checks().unwrap());
        let b = format_report("t", 3, &algebra_checks().unwrap());
        assert_eq!(a, b);
        assert!(a.contains("seed: 3"));
    }
}
