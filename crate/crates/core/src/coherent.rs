//! Coherent states in a truncated number basis and the large-amplitude limit
//! of the absolute phase, `<gamma| |Phi| |gamma> -> |theta|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg::StateVector;
use crate::phase::{build_abs_phase, PhaseSector};
use crate::table::{ScanTable, Value};

pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Odd-harmonic cutoff used for the Fourier reference column of a scan.
pub const SCAN_FOURIER_CUTOFF: usize = 9999;

/// `gamma = sqrt(nbar) e^{i theta}` truncated to `dim` number states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherentParams {
    pub nbar: f64,
    pub theta: f64,
    /// `None` selects the smallest dimension whose Poisson tail is within
    /// `tail_tol`.
    pub dim: Option<usize>,
    pub tail_tol: f64,
}

impl CoherentParams {
    pub fn new(nbar: f64, theta: f64) -> Self {
        Self {
            nbar,
            theta,
            dim: None,
            tail_tol: DEFAULT_TAIL_TOL,
        }
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = Some(dim);
        self
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Self {
        self.tail_tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.nbar >= 0.0 && self.nbar.is_finite()) {
            return Err(Error::Range(format!(
                "mean photon number must be >= 0, got {}",
                self.nbar
            )));
        }
        if !self.theta.is_finite() {
            return Err(Error::Range(format!(
                "theta must be finite, got {}",
                self.theta
            )));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::Range(format!(
                "tail_tol must be positive, got {}",
                self.tail_tol
            )));
        }
        Ok(())
    }

    /// Truncation dimension that will be used, after validating the tail.
    pub fn resolved_dim(&self) -> Result<usize> {
        self.validate()?;
        let minimal = minimal_dim(self.nbar, self.tail_tol);
        match self.dim {
            None => Ok(minimal),
            Some(dim) => {
                let tail = poisson_tail(self.nbar, dim);
                if tail > self.tail_tol {
                    Err(Error::Truncation {
                        dim,
                        tail,
                        tol: self.tail_tol,
                        minimal_dim: minimal,
                    })
                } else {
                    Ok(dim)
                }
            }
        }
    }
}

fn ln_poisson_weight(nbar: f64, n: usize) -> f64 {
    if nbar == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -nbar + n as f64 * nbar.ln() - ln_gamma(n as f64 + 1.0)
}

/// Index past which Poisson weights are below double-precision relevance.
fn weight_horizon(nbar: f64) -> usize {
    (nbar + 40.0 * nbar.sqrt() + 60.0).ceil() as usize
}

/// `sum_{n >= dim} e^{-nbar} nbar^n / n!`, summed directly from the far end
/// so small tails keep full relative accuracy.
pub fn poisson_tail(nbar: f64, dim: usize) -> f64 {
    let horizon = weight_horizon(nbar).max(dim);
    (dim..=horizon)
        .rev()
        .map(|n| ln_poisson_weight(nbar, n).exp())
        .sum()
}

/// Smallest `dim` with `poisson_tail(nbar, dim) <= tol`.
pub fn minimal_dim(nbar: f64, tol: f64) -> usize {
    let horizon = weight_horizon(nbar);
    let mut tail = 0.0;
    // tail(d) = tail(d+1) + p(d); walk down until the tail exceeds tol.
    for d in (0..=horizon).rev() {
        let with_d = tail + ln_poisson_weight(nbar, d).exp();
        if with_d > tol {
            return (d + 1).max(1);
        }
        tail = with_d;
    }
    1
}

/// Coherent amplitudes `e^{-nbar/2} gamma^n / sqrt(n!)` evaluated in log space.
pub fn coherent_vector(p: &CoherentParams) -> Result<StateVector> {
    let dim = p.resolved_dim()?;
    let amps = (0..dim)
        .map(|n| {
            let magnitude = (0.5 * ln_poisson_weight(p.nbar, n)).exp();
            Complex64::from_polar(magnitude, n as f64 * p.theta)
        })
        .collect();
    StateVector::new(amps)
}

/// `<gamma| |Phi| |gamma> / <gamma|gamma>` on the truncated state.
///
/// Dividing by the truncated norm removes the first-order effect of the
/// discarded tail mass.
pub fn expect_abs_phase(p: &CoherentParams, sector: PhaseSector) -> Result<f64> {
    let state = coherent_vector(p)?;
    let op = build_abs_phase(sector, state.dim())?;
    let value = op.matrix_element(&state, &state)?;
    Ok(value.re / state.norm_sqr())
}

/// Partial sum `pi/2 - (4/pi) sum_{odd s <= cutoff} cos(s theta)/s^2`, which
/// tends to `|theta|` on `[-pi, pi]`.
pub fn fourier_abs(theta: f64, cutoff: usize) -> Result<f64> {
    if cutoff < 1 {
        return Err(Error::Range("Fourier cutoff must be at least 1".into()));
    }
    // Largest terms last keeps the rounding of the small tail terms.
    let terms = cutoff.div_ceil(2);
    let sum: f64 = (0..terms)
        .rev()
        .map(|j| {
            let sf = (2 * j + 1) as f64;
            (sf * theta).cos() / (sf * sf)
        })
        .sum();
    Ok(PI / 2.0 - 4.0 / PI * sum)
}

/// Column names of a classical-limit scan, in order.
pub const SCAN_COLUMNS: [&str; 8] = [
    "theta",
    "nbar",
    "sector",
    "dim",
    "expect",
    "abs_theta",
    "fourier_ref",
    "deviation",
];

/// One row per `(theta, nbar)` in grid order (theta outer, nbar inner):
/// the expectation, `|theta|`, the Fourier partial sum and
/// `|expect - |theta||`.
pub fn classical_limit_scan(
    theta_grid: &[f64],
    nbar_list: &[f64],
    sector: PhaseSector,
    tail_tol: f64,
) -> Result<ScanTable> {
    classical_limit_scan_at(theta_grid, nbar_list, sector, tail_tol, None)
}

/// As [`classical_limit_scan`], with every point truncated at `dim` when
/// given. Fails with [`Error::Truncation`] if `dim` is too small for any `nbar`.
pub fn classical_limit_scan_at(
    theta_grid: &[f64],
    nbar_list: &[f64],
    sector: PhaseSector,
    tail_tol: f64,
    dim: Option<usize>,
) -> Result<ScanTable> {
    if theta_grid.is_empty() || nbar_list.is_empty() {
        return Err(Error::Range("scan grids must be non-empty".into()));
    }
    let points: Vec<(f64, f64)> = theta_grid
        .iter()
        .flat_map(|&t| nbar_list.iter().map(move |&n| (t, n)))
        .collect();
    let rows: Vec<Vec<Value>> = points
        .par_iter()
        .map(|&(theta, nbar)| -> Result<Vec<Value>> {
            let mut params = CoherentParams::new(nbar, theta).with_tail_tol(tail_tol);
            if let Some(d) = dim {
                params = params.with_dim(d);
            }
            let dim = params.resolved_dim()?;
            let expect = expect_abs_phase(&params.with_dim(dim), sector)?;
            let fourier = fourier_abs(theta, SCAN_FOURIER_CUTOFF)?;
            Ok(vec![
                Value::Real(theta),
                Value::Real(nbar),
                Value::Text(sector.name().into()),
                Value::Int(dim as i64),
                Value::Real(expect),
                Value::Real(theta.abs()),
                Value::Real(fourier),
                Value::Real((expect - theta.abs()).abs()),
            ])
        })
        .collect::<Result<_>>()?;

    let mut table = ScanTable::new(SCAN_COLUMNS.iter().map(|s| s.to_string()).collect());
    table.push_meta("scan", "classical_limit");
    table.push_meta("sector", sector.name());
    table.push_meta("tail_tol", format!("{tail_tol:e}"));
    table.push_meta("fourier_cutoff", SCAN_FOURIER_CUTOFF.to_string());
    table.push_meta("dim", dim.map_or("minimal".to_string(), |d| d.to_string()));
    table.push_meta("expectation", "normalized by truncated state norm");
    for row in rows {
        table.push_row(row)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum() {
        let v = coherent_vector(&CoherentParams::new(0.0, 0.3)).unwrap();
        assert_eq!(v.dim(), 1);
        assert_eq!(v.amps()[0], Complex64::new(1.0, 0.0));
        let e = expect_abs_phase(&CoherentParams::new(0.0, 0.3), PhaseSector::Plus).unwrap();
        assert!((e - PI / 2.0).abs() < 1e-15);
        let padded = CoherentParams::new(0.0, 0.3).with_dim(8);
        assert!((expect_abs_phase(&padded, PhaseSector::Plus).unwrap() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn real_positive_amplitudes_at_zero_phase() {
        let v = coherent_vector(&CoherentParams::new(4.0, 0.0).with_dim(64)).unwrap();
        assert!(v.amps().iter().all(|z| z.re > 0.0 && z.im == 0.0));
        assert!((1.0 - v.norm_sqr()).abs() <= 1e-12);
    }

    #[test]
    fn too_small_dim_reports_minimum() {
        let err = coherent_vector(&CoherentParams::new(400.0, 1.0).with_dim(450)).unwrap_err();
        match err {
            Error::Truncation { minimal_dim, .. } => {
                assert_eq!(minimal_dim, minimal_dim_for(400.0));
                assert!(minimal_dim > 400);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    fn minimal_dim_for(nbar: f64) -> usize {
        minimal_dim(nbar, DEFAULT_TAIL_TOL)
    }

    #[test]
    fn fourier_abs_special_points() {
        assert!((fourier_abs(PI / 2.0, 9999).unwrap() - PI / 2.0).abs() <= 1e-14);
        assert!((fourier_abs(-PI / 2.0, 11).unwrap() - PI / 2.0).abs() <= 1e-14);
        assert!((fourier_abs(1.0, 9999).unwrap() - 1.0).abs() < 1e-3);
        assert!(fourier_abs(1.0, 0).is_err());
    }

    #[test]
    fn scan_schema() {
        let t = classical_limit_scan(&[PI / 2.0], &[100.0], PhaseSector::Plus, 1e-12).unwrap();
        assert_eq!(t.columns(), SCAN_COLUMNS);
        assert_eq!(t.rows().len(), 1);
        assert!(t.rows()[0]
            .iter()
            .all(|v| !matches!(v, Value::Real(x) if !x.is_finite())));
        assert!(classical_limit_scan(&[], &[1.0], PhaseSector::Plus, 1e-12).is_err());
    }
}
