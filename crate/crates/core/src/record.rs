//! Plain-text records for Gaussian states and mode pairs.
//!
//! Numbers are written as decimal scientific notation with 17 significant
//! digits, which reproduces every `f64` bit for bit when parsed back.
//!
//! State file:
//!
//! ```text
//! gaussian N=<n>
//! mean: <2N comma-separated reals>
//! <2N rows of 2N comma-separated reals>
//! ```
//!
//! Mode pair:
//!
//! ```text
//! modepair N=<n>
//! v: <2N reals>
//! u: <2N reals>
//! offsets: <q_offset>,<p_offset>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{QicError, Result};
use crate::gaussian::{GaussianState, ModePair, SwapCoupling};

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // keep the sign bit of -0.0 out of reports
        return "0.0000000000000000e0".to_string();
    }
    format!("{x:.16e}")
}

pub fn join_reals<'a>(values: impl IntoIterator<Item = &'a f64>) -> String {
    values
        .into_iter()
        .map(|&x| fmt_f64(x))
        .collect::<Vec<_>>()
        .join(",")
}

/// Parses a comma-separated list of reals; `line` is only used for errors.
pub fn parse_reals(text: &str, line: usize) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<f64>()
                .map_err(|_| QicError::parse(line, format!("not a real number: {tok:?}")))
                .and_then(|x| {
                    if x.is_finite() {
                        Ok(x)
                    } else {
                        Err(QicError::parse(line, format!("non-finite value: {tok:?}")))
                    }
                })
        })
        .collect()
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_header(line: usize, text: &str, keyword: &str) -> Result<usize> {
    let rest = text
        .strip_prefix(keyword)
        .ok_or_else(|| QicError::parse(line, format!("expected header `{keyword} N=<n>`")))?;
    let n = rest
        .trim()
        .strip_prefix("N=")
        .ok_or_else(|| QicError::parse(line, "expected `N=<n>` in header"))?;
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| QicError::parse(line, format!("invalid mode count {n:?}")))?;
    if n == 0 {
        return Err(QicError::parse(line, "mode count must be positive"));
    }
    Ok(n)
}

fn labelled<'a>(line: usize, text: &'a str, label: &str) -> Result<&'a str> {
    text.strip_prefix(label)
        .map(str::trim)
        .ok_or_else(|| QicError::parse(line, format!("expected `{label}` row")))
}

fn expect_len(line: usize, values: &[f64], len: usize) -> Result<()> {
    if values.len() != len {
        return Err(QicError::parse(
            line,
            format!("expected {len} values, found {}", values.len()),
        ));
    }
    Ok(())
}

/// Raw contents of a state file, before any physical validation.
#[derive(Debug, Clone, PartialEq)]
pub struct StateRecord {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl StateRecord {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (l, header) = lines
            .next()
            .ok_or_else(|| QicError::parse(1, "empty state file"))?;
        let n = parse_header(l, header, "gaussian")?;
        let dim = 2 * n;
        let (l, mean_line) = lines
            .next()
            .ok_or_else(|| QicError::parse(l + 1, "missing `mean:` row"))?;
        let mean = parse_reals(labelled(l, mean_line, "mean:")?, l)?;
        expect_len(l, &mean, dim)?;
        let mut rows = Vec::with_capacity(dim * dim);
        let mut last = l;
        for r in 0..dim {
            let (l, row) = lines.next().ok_or_else(|| {
                QicError::parse(last + 1, format!("missing covariance row {}", r + 1))
            })?;
            let values = parse_reals(row, l)?;
            expect_len(l, &values, dim)?;
            rows.extend(values);
            last = l;
        }
        if let Some((l, _)) = lines.next() {
            return Err(QicError::parse(l, "unexpected trailing content"));
        }
        Ok(StateRecord {
            mean: DVector::from_vec(mean),
            covariance: DMatrix::from_row_slice(dim, dim, &rows),
        })
    }

    /// Validated state; physical errors are reported as such, not as parse errors.
    pub fn into_state(self) -> Result<GaussianState> {
        GaussianState::new(self.mean, self.covariance)
    }
}

pub fn parse_state(text: &str) -> Result<GaussianState> {
    StateRecord::parse(text)?.into_state()
}

pub fn read_state(path: &Path) -> Result<GaussianState> {
    let text = std::fs::read_to_string(path).map_err(|e| QicError::io(path, e))?;
    parse_state(&text)
}

pub fn format_state(state: &GaussianState) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "gaussian N={}", state.n_modes());
    let _ = writeln!(out, "mean: {}", join_reals(state.mean().iter()));
    for row in state.covariance().row_iter() {
        let _ = writeln!(out, "{}", join_reals(row.iter()));
    }
    out
}

pub fn format_mode_pair(pair: &ModePair) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "modepair N={}", pair.n_modes());
    let _ = writeln!(out, "v: {}", join_reals(pair.v.iter()));
    let _ = writeln!(out, "u: {}", join_reals(pair.u.iter()));
    let _ = writeln!(
        out,
        "offsets: {},{}",
        fmt_f64(pair.q_offset),
        fmt_f64(pair.p_offset)
    );
    out
}

pub fn parse_mode_pair(text: &str) -> Result<ModePair> {
    let mut lines = content_lines(text);
    let (l, header) = lines
        .next()
        .ok_or_else(|| QicError::parse(1, "empty mode-pair record"))?;
    let dim = 2 * parse_header(l, header, "modepair")?;
    let mut row = |label: &str, len: usize, prev: usize| -> Result<(usize, Vec<f64>)> {
        let (l, text) = lines
            .next()
            .ok_or_else(|| QicError::parse(prev + 1, format!("missing `{label}` row")))?;
        let values = parse_reals(labelled(l, text, label)?, l)?;
        expect_len(l, &values, len)?;
        Ok((l, values))
    };
    let (l, v) = row("v:", dim, l)?;
    let (l, u) = row("u:", dim, l)?;
    let (l, offsets) = row("offsets:", 2, l)?;
    ModePair::new(
        DVector::from_vec(v),
        DVector::from_vec(u),
        offsets[0],
        offsets[1],
    )
    .map_err(|e| QicError::parse(l, e.to_string()))
}

pub fn format_swap_coupling(coupling: &SwapCoupling) -> String {
    format!(
        "swap strength={}\n{}",
        fmt_f64(coupling.strength),
        format_mode_pair(&coupling.pair)
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{conjugate_qic_vector, cv_swap_generator};
    use crate::random::rng_from_seed;

    #[test]
    fn seventeen_digits_round_trip() {
        let mut rng = rng_from_seed(11);
        for _ in 0..1000 {
            let x: f64 = rand::Rng::gen_range(&mut rng, -1e6..1e6);
            let y = x * 1e-9;
            for z in [x, y, 1.0 / 3.0, f64::MIN_POSITIVE, f64::MAX] {
                assert_eq!(fmt_f64(z).parse::<f64>().unwrap().to_bits(), z.to_bits());
            }
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn state_round_trip_is_exact() {
        let state = GaussianState::random_pure(&mut rng_from_seed(5), 3).unwrap();
        let state = state
            .with_mean(DVector::from_fn(6, |i, _| 0.1 * i as f64 - 0.2))
            .unwrap();
        let back = parse_state(&format_state(&state)).unwrap();
        assert_eq!(back, state);
    }

    #[test]
    fn mode_pair_round_trip_is_exact() {
        let state = GaussianState::two_mode_squeezed(0.3);
        let v = DVector::from_row_slice(&[0.7, -0.1, 0.2, 0.4]);
        let pair = conjugate_qic_vector(&v, &state).unwrap();
        assert_eq!(parse_mode_pair(&format_mode_pair(&pair)).unwrap(), pair);
        let swap = format_swap_coupling(&cv_swap_generator(&pair));
        assert!(swap.starts_with("swap strength=1.5707963267948966e0\nmodepair N=2\n"));
    }

    #[test]
    fn vacuum_file_parses() {
        let text = "gaussian N=1\nmean: 0,0\n0.5,0\n0,0.5\n";
        assert_eq!(parse_state(text).unwrap(), GaussianState::vacuum(1));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("", 1),
            ("gauss N=1\n", 1),
            ("gaussian N=1\nmean: 0\n", 2),
            ("gaussian N=1\nmean: 0,0\n0.5,0\n0,abc\n", 4),
            ("gaussian N=1\n# comment\nmean: 0,0\n0.5,0\n", 5),
            ("gaussian N=1\nmean: 0,0\n0.5,0\n0,0.5\nextra\n", 5),
        ];
        for (text, line) in cases {
            match StateRecord::parse(text) {
                Err(QicError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn physical_errors_are_not_parse_errors() {
        let text = "gaussian N=1\nmean: 0,0\n0.5,0.001\n0,0.5\n";
        assert!(matches!(
            parse_state(text),
            Err(QicError::AsymmetricCovariance { .. })
        ));
    }
}
