//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use qic_core::algebra::{self, PureState, SuBasis};
use qic_core::gaussian::{self, GaussianState, ModeCovariance, ModePair};
use qic_core::lattice::{self, LatticeConfig};
use qic_core::linalg::{self, max_abs_diff, CVector};
use qic_core::qudit::{self, VirtualQudit, WriteOperation};
use qic_core::random::{rng_from_seed, QicRng};
use qic_core::suite::{random_state, random_write};
use qic_core::Result;

const SEED: u64 = 20240601;
const SIZES: [(usize, usize); 4] = [(2, 2), (2, 3), (3, 2), (3, 3)];

/// `√2·ln(1+√2) + ln(1/2)` evaluated to 20 digits with arbitrary-precision arithmetic.
const ENTROPY_AT_G1: f64 = 0.553_303_299_720_515_717_37;

struct Verdict {
    ok: bool,
    detail: String,
}

impl Verdict {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Verdict {
            ok,
            detail: detail.into(),
        }
    }
}

/// Worst value seen for one quantity against its tolerance.
struct Worst {
    name: &'static str,
    value: f64,
    tol: f64,
}

impl Worst {
    fn new(name: &'static str, tol: f64) -> Self {
        Worst {
            name,
            value: 0.0,
            tol,
        }
    }

    fn record(&mut self, x: f64) {
        if x.is_nan() || x > self.value {
            self.value = if x.is_nan() { f64::INFINITY } else { x };
        }
    }

    fn ok(&self) -> bool {
        self.value < self.tol
    }

    fn describe(&self) -> String {
        format!("{} {:.2e} < {:.0e}", self.name, self.value, self.tol)
    }
}

fn combine(parts: &[&Worst]) -> Verdict {
    Verdict::new(
        parts.iter().all(|w| w.ok()),
        parts.iter().map(|w| w.describe()).collect::<Vec<_>>().join("; "),
    )
}

fn ensemble(rng: &mut QicRng, d: usize, n: usize, count: usize) -> Result<Vec<(PureState, WriteOperation)>> {
    (0..count)
        .map(|_| Ok((random_state(rng, d, n)?, random_write(rng, d, n)?)))
        .collect()
}

fn swap_identity() -> Result<Verdict> {
    let mut diff = Worst::new("max |SWAP - (1/d) sum t(x)t|", 1e-12);
    for d in 2..=4 {
        let basis = SuBasis::new(d)?;
        diff.record(max_abs_diff(
            &algebra::swap_operator(d)?,
            &algebra::swap_from_generators(&basis),
        ));
    }
    Ok(combine(&[&diff]))
}

fn qic_existence(rng: &mut QicRng) -> Result<Verdict> {
    let mut purity = Worst::new("max |Tr rho_QIC^2 - 1|", 1e-8);
    for (d, n) in SIZES {
        for (state, write) in ensemble(rng, d, n, 50)? {
            purity.record((qudit::construct_qic(&write, &state)?.purity() - 1.0).abs());
        }
    }
    Ok(combine(&[&purity]))
}

fn perfect_retrieval(rng: &mut QicRng) -> Result<Verdict> {
    let mut left = Worst::new("residual trace distance", 1e-7);
    let mut defect = Worst::new("1 - fidelity", 1e-7);
    for (d, n) in SIZES {
        for (state, write) in ensemble(rng, d, n, 50)? {
            let qic = qudit::construct_qic(&write, &state)?;
            let mut residuals = Vec::new();
            for theta in [0.0, 1.3] {
                let out = qudit::retrieve_by_swap(&qic.qudit, &write.apply(&state, theta)?)?;
                defect.record(1.0 - out.fidelity_with(&qic.written_capsule(&write, theta)));
                residuals.push(out.residual);
            }
            left.record(linalg::trace_distance(&residuals[0], &residuals[1]));
        }
    }
    Ok(combine(&[&left, &defect]))
}

fn partner_theorem(rng: &mut QicRng) -> Result<Verdict> {
    let mut action = Worst::new("max |rho_AB(theta) - w rho_AB w^dag|", 1e-8);
    for trial in 0..50 {
        let (d, n) = SIZES[trial % SIZES.len()];
        let state = random_state(rng, d, n)?;
        let write = random_write(rng, d, n)?;
        let a = VirtualQudit::new(SuBasis::new(d)?, n, write.conjugator().clone())?;
        let pair = qudit::construct_partner(&a, &state)?;
        let theta = rng.gen_range(-3.0..3.0);
        action.record(qudit::partner_write_action(&pair, &write, theta, &state)?.residual());
    }
    Ok(combine(&[&action]))
}

fn gaussian_closed_form(rng: &mut QicRng) -> Result<Verdict> {
    let mut pairing = Worst::new("|v^T Omega u - 1|", 1e-8);
    let mut orth = Worst::new("|v^T M u|", 1e-8);
    let mut det = Worst::new("|det m - 1/4|", 1e-8);
    let mut failures = 0usize;
    let mut perturbed = 0usize;
    for trial in 0..100 {
        let n = 1 + trial % 8;
        let state = GaussianState::random_pure(rng, n)?;
        let v = DVector::from_fn(2 * n, |_, _| rng.gen_range(-1.0..=1.0));
        let pair = gaussian::conjugate_qic_vector(&v, &state)?;
        pairing.record((pair.pairing() - 1.0).abs());
        orth.record(state.covariance_form(&v, &pair.u).abs());
        let base = gaussian::mode_covariance(&pair, &state).det();
        det.record((base - 0.25).abs());
        // one mode leaves no room for a perturbation orthogonal to Ωv and Mv
        if n < 2 {
            continue;
        }
        for _ in 0..20 {
            let delta = gaussian::admissible_perturbation(rng, &v, &state)?;
            let moved = ModePair {
                u: &pair.u + delta * rng.gen_range(0.05..1.0),
                ..pair.clone()
            };
            perturbed += 1;
            if gaussian::mode_covariance(&moved, &state).det() <= base {
                failures += 1;
            }
        }
    }
    let mut v = combine(&[&pairing, &orth, &det]);
    v.ok &= failures == 0;
    v.detail += &format!("; det m increased in {}/{perturbed} perturbations", perturbed - failures);
    Ok(v)
}

fn purity_relation(rng: &mut QicRng) -> Result<Verdict> {
    let mut res = Worst::new("max |M Omega M - Omega/4|", 1e-8);
    let mut states = vec![
        GaussianState::vacuum(3),
        GaussianState::squeezed(0.8),
        GaussianState::two_mode_squeezed(1.2),
        lattice::vacuum_covariance(&LatticeConfig::new(30, 0.4)?),
    ];
    for n in 1..=8 {
        states.push(GaussianState::random_pure(rng, n)?);
    }
    for s in &states {
        res.record(s.purity_residual());
    }
    Ok(combine(&[&res]))
}

fn finite_difference_fisher(write: &WriteOperation, state: &PureState, h: f64) -> Result<f64> {
    let plus = write.apply(state, h)?;
    let minus = write.apply(state, -h)?;
    let deriv: CVector = (plus.amplitudes() - minus.amplitudes()).unscale(2.0 * h);
    let overlap = state.amplitudes().dotc(&deriv);
    Ok(4.0 * (deriv.norm_squared() - overlap.norm_sqr()))
}

fn fisher_consistency(rng: &mut QicRng) -> Result<Verdict> {
    let mut fd = Worst::new("rel |F - F_fd|", 1e-5);
    let mut drift = Worst::new("rel theta drift", 1e-9);
    for trial in 0..20 {
        let (d, n) = SIZES[trial % SIZES.len()];
        let state = random_state(rng, d, n)?;
        let write = random_write(rng, d, n)?;
        let f = qudit::fisher_information(&write, &state)?;
        let numeric = finite_difference_fisher(&write, &state, 1e-4)?;
        fd.record((f - numeric).abs() / f);
        for theta in [0.5, 1.5] {
            let ft = qudit::fisher_information(&write, &write.apply(&state, theta)?)?;
            drift.record((ft - f).abs() / f);
        }
    }
    Ok(combine(&[&fd, &drift]))
}

fn lattice_experiment() -> Result<Verdict> {
    let config = LatticeConfig::new(30, 0.4)?;
    let fig = lattice::figure_experiment(&config, 15, &[0.0, 25.0, 50.0])?;
    let mut omega = Worst::new("|omega_15 - sqrt(2.6)|", 1e-12);
    omega.record((fig.omegas[14] - 2.6f64.sqrt()).abs());
    let mut pairing = Worst::new("|v^T Omega u - 1|", 1e-9);
    let mut det = Worst::new("|det m - 1/4|", 1e-8);
    for s in &fig.slices {
        pairing.record((s.pairing - 1.0).abs());
        det.record((s.det_m - 0.25).abs());
    }
    let support: Vec<usize> = fig.slices.iter().map(|s| s.u_support(1e-3)).collect();
    let grows = support.windows(2).all(|w| w[1] > w[0]);
    let off_site = fig.slices[0].max_off_site_u(15);
    let mut v = combine(&[&omega, &pairing, &det]);
    v.ok &= grows && off_site > 1e-4;
    v.detail += &format!(
        "; support {:?} strictly growing; off-site |u(0)| {:.3e} > 1e-4",
        support, off_site
    );
    Ok(v)
}

/// Weighting vectors `S⁻¹ e_k` for the given phase-space indices, where `M = SᵀS/2`.
fn normal_mode_vectors(s_inv: &DMatrix<f64>, indices: &[usize]) -> Vec<DVector<f64>> {
    indices.iter().map(|&k| s_inv.column(k).into_owned()).collect()
}

fn multiparam(rng: &mut QicRng) -> Result<Verdict> {
    let mut cross = Worst::new("max |v_i^T Omega u_j - delta_ij|", 1e-9);
    let mut misclassified = Vec::new();
    let mut fisher_ok = true;
    for n in 2..=6 {
        let s = gaussian::random_symplectic(rng, n);
        let s_inv = s.clone().try_inverse().expect("symplectic matrices are invertible");
        let state = GaussianState::from_symplectic(&s)?;

        // independent q quadratures of distinct normal modes
        let q: Vec<usize> = (0..n).map(|k| 2 * k).collect();
        let good = normal_mode_vectors(&s_inv, &q);
        let report = gaussian::multiparam_conditions(&good, &state)?;
        if !(report.commuting && report.independent) {
            misclassified.push(format!("satisfying N={n}"));
        }
        if let Some(r) = report.cross_pairing_residual() {
            cross.record(r);
        }
        match gaussian::shift_fisher_matrix(&good, &state) {
            Ok(f) => {
                let diagonal = (0..n).all(|i| f[(i, i)] > 0.0)
                    && (0..n).all(|i| (0..n).all(|j| i == j || f[(i, j)] == 0.0));
                fisher_ok &= diagonal;
            }
            Err(_) => fisher_ok = false,
        }

        // q and p of the same normal mode: independent but non-commuting
        let clash = normal_mode_vectors(&s_inv, &[0, 1]);
        let report = gaussian::multiparam_conditions(&clash, &state)?;
        if report.commuting || !report.independent || gaussian::shift_fisher_matrix(&clash, &state).is_ok() {
            misclassified.push(format!("non-commuting N={n}"));
        }

        // q of mode 0 and q0 + q1: commuting but correlated
        let mut dep = normal_mode_vectors(&s_inv, &[0, 2]);
        dep[1] = &dep[0] + &dep[1];
        let report = gaussian::multiparam_conditions(&dep, &state)?;
        if !report.commuting || report.independent || gaussian::shift_fisher_matrix(&dep, &state).is_ok() {
            misclassified.push(format!("dependent N={n}"));
        }
    }
    let mut v = combine(&[&cross]);
    v.ok &= misclassified.is_empty() && fisher_ok;
    v.detail += &format!(
        "; misclassified families: {}; Fisher diagonal positive: {fisher_ok}",
        if misclassified.is_empty() { "none".into() } else { misclassified.join(", ") }
    );
    Ok(v)
}

fn entropy_formula() -> Result<Verdict> {
    let mut at_one = Worst::new("|S(g=1) - reference|", 1e-10);
    at_one.record((gaussian::entropy_from_g(1.0) - ENTROPY_AT_G1).abs());

    let entropy_at = |det: f64| {
        let m = nalgebra::Matrix2::new(det.sqrt(), 0.0, 0.0, det.sqrt());
        gaussian::mode_entropy(&ModeCovariance::new(m))
    };
    // det m descending toward 1/4
    let mut grid: Vec<f64> = (0..40).map(|i| 0.25 + 2.0 * 0.8f64.powi(i)).collect();
    grid.extend((4..=14).map(|k| 0.25 + 10f64.powi(-k)));
    let values = grid.iter().map(|&d| entropy_at(d)).collect::<Result<Vec<_>>>()?;
    let monotone = values.windows(2).all(|w| w[1] < w[0] || (w[1] == 0.0 && w[0] == 0.0));
    let floor = entropy_at(0.25)?;
    let tail = *values.last().unwrap();
    let mut v = combine(&[&at_one]);
    v.ok &= monotone && floor == 0.0 && tail < 1e-8;
    v.detail += &format!(
        "; monotone on {} points: {monotone}; S(det 1/4 + 1e-14) = {tail:.2e}; S(1/4) = {floor}",
        grid.len()
    );
    Ok(v)
}

type Criterion = (&'static str, Option<Duration>, Box<dyn FnOnce() -> Result<Verdict>>);

fn main() -> ExitCode {
    let mut rng = rng_from_seed(SEED);
    let mut r = || rng_from_seed(rng.gen());
    let (mut r2, mut r3, mut r4, mut r5, mut r6, mut r7, mut r9) = (r(), r(), r(), r(), r(), r(), r());
    let criteria: Vec<Criterion> = vec![
        ("SWAP identity", Some(Duration::from_secs(1)), Box::new(swap_identity)),
        ("QIC existence", Some(Duration::from_secs(30)), Box::new(move || qic_existence(&mut r2))),
        ("perfect retrieval", None, Box::new(move || perfect_retrieval(&mut r3))),
        ("partner write action", None, Box::new(move || partner_theorem(&mut r4))),
        ("Gaussian conjugate closed form", Some(Duration::from_secs(10)), Box::new(move || gaussian_closed_form(&mut r5))),
        ("purity relation", None, Box::new(move || purity_relation(&mut r6))),
        ("Fisher consistency", None, Box::new(move || fisher_consistency(&mut r7))),
        ("lattice experiment", Some(Duration::from_secs(10)), Box::new(lattice_experiment)),
        ("multi-parameter conditions", None, Box::new(move || multiparam(&mut r9))),
        ("mode entropy formula", None, Box::new(entropy_formula)),
    ];

    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(v) => (v.ok, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = budget.map_or(true, |b| elapsed < b);
        let ok = ok && in_time;
        let limit = budget.map(|b| format!(" < {}s", b.as_secs())).unwrap_or_default();
        println!(
            "{} {:>2} {name}: {detail}; {:.3}s{limit}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            elapsed.as_secs_f64()
        );
        if !ok {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
