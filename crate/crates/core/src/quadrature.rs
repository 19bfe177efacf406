//! Numerical integration used as an independent oracle for closed-form
//! matrix elements.
//!
//! Two rules are provided so that every validated integral can be
//! cross-checked: a composite fixed-order Gauss–Legendre rule, and an
//! adaptive Gauss–Kronrod (7/15) bisection rule.

use std::ops::{Add, Mul, Sub};

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::phase::{abs_phase_entry_unchecked, basis_amplitude, cos_phase_entry, PhaseSector};
use crate::table::{ScanTable, Value};

/// Integrand values the rules know how to accumulate.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum QuadRule {
    /// Composite Gauss–Legendre with `order` nodes per panel. The error
    /// estimate compares against the same rule on twice as many panels.
    FixedGauss { order: usize },
    /// Gauss–Kronrod 7/15 with recursive bisection until each panel's local
    /// error is below its share of `abs_tol`.
    Adaptive { abs_tol: f64, max_depth: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureConfig {
    pub rule: QuadRule,
    /// Number of equal panels the interval is split into before the rule is
    /// applied. Oscillatory integrands need this to scale with frequency.
    pub min_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self::adaptive()
    }
}

impl QuadratureConfig {
    pub fn adaptive() -> Self {
        Self {
            rule: QuadRule::Adaptive {
                abs_tol: 1e-12,
                max_depth: 40,
            },
            min_panels: 1,
        }
    }

    pub fn fixed(order: usize) -> Self {
        Self {
            rule: QuadRule::FixedGauss { order },
            min_panels: 1,
        }
    }

    pub fn with_min_panels(mut self, panels: usize) -> Self {
        self.min_panels = panels.max(1);
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.rule {
            QuadRule::FixedGauss { order } if order < 8 => Err(Error::Config(format!(
                "fixed Gauss order must be at least 8, got {order}"
            ))),
            QuadRule::Adaptive { abs_tol, .. } if !(abs_tol > 0.0) => Err(Error::Config(format!(
                "adaptive abs_tol must be positive, got {abs_tol}"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T, F>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    cfg.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Range(format!(
            "integration interval [{a}, {b}] must satisfy a < b"
        )));
    }
    let panels = cfg.min_panels.max(1);
    match cfg.rule {
        QuadRule::FixedGauss { order } => Ok(fixed_gauss(&f, a, b, order, panels)),
        QuadRule::Adaptive { abs_tol, max_depth } => {
            let width = (b - a) / panels as f64;
            let mut total = Estimate {
                value: T::zero(),
                error: 0.0,
            };
            for p in 0..panels {
                let lo = a + width * p as f64;
                let hi = if p + 1 == panels { b } else { lo + width };
                let local_tol = abs_tol * (hi - lo) / (b - a);
                let est = adaptive_panel(&f, lo, hi, local_tol, max_depth, 0)?;
                total.value = total.value + est.value;
                total.error += est.error;
            }
            Ok(total)
        }
    }
}

/// Integrates over consecutive sub-intervals split at `breaks`, which must be
/// increasing and lie strictly inside `(a, b)`. Use for integrands with known
/// kinks.
pub fn integrate_with_breaks<T, F>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let mut points = Vec::with_capacity(breaks.len() + 2);
    points.push(a);
    points.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    points.push(b);
    let mut total = Estimate {
        value: T::zero(),
        error: 0.0,
    };
    for w in points.windows(2) {
        // Each piece gets its share of the panel budget.
        let share = ((cfg.min_panels as f64) * (w[1] - w[0]) / (b - a)).ceil() as usize;
        let piece_cfg = QuadratureConfig {
            min_panels: share.max(1),
            ..*cfg
        };
        let piece_cfg = match cfg.rule {
            QuadRule::Adaptive { abs_tol, max_depth } => QuadratureConfig {
                rule: QuadRule::Adaptive {
                    abs_tol: abs_tol * (w[1] - w[0]) / (b - a),
                    max_depth,
                },
                ..piece_cfg
            },
            QuadRule::FixedGauss { .. } => piece_cfg,
        };
        let est = integrate(&f, w[0], w[1], &piece_cfg)?;
        total.value = total.value + est.value;
        total.error += est.error;
    }
    Ok(total)
}

// Relative size of accumulated rounding in a 15-point panel sum.
const ROUNDOFF_FACTOR: f64 = 50.0 * f64::EPSILON;

fn adaptive_panel<T, F>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
    depth: usize,
) -> Result<Estimate<T>>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let (kronrod, gauss, abs_sum) = gauss_kronrod_15(f, a, b);
    let floor = ROUNDOFF_FACTOR * abs_sum;
    let err = (kronrod - gauss).magnitude().max(floor);
    if err <= tol || (kronrod - gauss).magnitude() <= floor {
        return Ok(Estimate {
            value: kronrod,
            error: err,
        });
    }
    if depth >= max_depth {
        return Err(Error::Quadrature { a, b, max_depth });
    }
    let mid = 0.5 * (a + b);
    let left = adaptive_panel(f, a, mid, 0.5 * tol, max_depth, depth + 1)?;
    let right = adaptive_panel(f, mid, b, 0.5 * tol, max_depth, depth + 1)?;
    Ok(Estimate {
        value: left.value + right.value,
        error: left.error + right.error,
    })
}

// Gauss–Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Returns (Kronrod-15 value, Gauss-7 value, integral of |f| by Kronrod).
fn gauss_kronrod_15<T, F>(f: &F, a: f64, b: f64) -> (T, T, f64)
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.magnitude() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let pair = f1 + f2;
        kronrod = kronrod + pair * WGK[j];
        abs_sum += (f1.magnitude() + f2.magnitude()) * WGK[j];
        // Gauss-7 nodes are the odd-indexed Kronrod nodes.
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    (kronrod * half, gauss * half, abs_sum * half)
}

/// Gauss–Legendre nodes and weights on [-1, 1] by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn fixed_gauss<T, F>(f: &F, a: f64, b: f64, order: usize, panels: usize) -> Estimate<T>
where
    T: QuadValue,
    F: Fn(f64) -> T,
{
    let (nodes, weights) = gauss_legendre(order);
    let composite = |panels: usize| -> (T, f64) {
        let width = (b - a) / panels as f64;
        let mut sum = T::zero();
        let mut abs_sum = 0.0;
        for p in 0..panels {
            let lo = a + width * p as f64;
            let center = lo + 0.5 * width;
            let half = 0.5 * width;
            let mut local = T::zero();
            for (x, w) in nodes.iter().zip(&weights) {
                let v = f(center + half * x);
                local = local + v * *w;
                abs_sum += v.magnitude() * w * half;
            }
            sum = sum + local * half;
        }
        (sum, abs_sum)
    };
    let (coarse, _) = composite(panels);
    let (fine, abs_sum) = composite(2 * panels);
    let floor = ROUNDOFF_FACTOR * abs_sum * (order as f64).sqrt();
    Estimate {
        value: fine,
        error: (fine - coarse).magnitude().max(floor),
    }
}

/// Kernels whose closed-form matrix elements are checked against quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKernel {
    Phi,
    CosPhi,
    Constant,
}

impl OracleKernel {
    pub const ALL: [OracleKernel; 3] = [
        OracleKernel::Phi,
        OracleKernel::CosPhi,
        OracleKernel::Constant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OracleKernel::Phi => "phi",
            OracleKernel::CosPhi => "cos_phi",
            OracleKernel::Constant => "constant",
        }
    }

    pub fn eval(self, phi: f64) -> f64 {
        match self {
            OracleKernel::Phi => phi,
            OracleKernel::CosPhi => phi.cos(),
            OracleKernel::Constant => 1.0,
        }
    }
}

/// Closed-form `int_0^pi f(phi) e_phi(n) e_phi(m) dphi` as frozen in the
/// phase module.
pub fn closed_form_entry(sector: PhaseSector, kernel: OracleKernel, n: usize, m: usize) -> f64 {
    match kernel {
        OracleKernel::Phi => abs_phase_entry_unchecked(sector, n, m),
        OracleKernel::CosPhi => cos_phase_entry(sector, n, m),
        OracleKernel::Constant => {
            let zero_row = sector == PhaseSector::Minus && n == 0;
            if n == m && !zero_row {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// The same integral by quadrature, with at least `n + m + 2` panels.
pub fn quadrature_entry(
    sector: PhaseSector,
    kernel: OracleKernel,
    n: usize,
    m: usize,
    cfg: &QuadratureConfig,
) -> Result<Estimate<f64>> {
    let cfg = cfg.with_min_panels(cfg.min_panels.max(n + m + 2));
    integrate(
        |phi: f64| {
            kernel.eval(phi) * basis_amplitude(sector, n, phi) * basis_amplitude(sector, m, phi)
        },
        0.0,
        PI,
        &cfg,
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleEntry {
    pub closed_form: f64,
    pub quadrature: f64,
    pub error_estimate: f64,
    pub diff: f64,
}

/// Compares one closed-form entry with quadrature and fails with
/// [`Error::Tolerance`] if they differ by more than `tol`.
pub fn oracle_validate_entry(
    sector: PhaseSector,
    kernel: OracleKernel,
    n: usize,
    m: usize,
    cfg: &QuadratureConfig,
    tol: f64,
) -> Result<OracleEntry> {
    let entry = oracle_compare_entry(sector, kernel, n, m, cfg)?;
    if !(entry.diff <= tol) {
        return Err(Error::Tolerance(format!(
            "{sector} {} entry ({n}, {m}): closed form {} vs quadrature {} differ by {:e} > {tol:e}",
            kernel.name(),
            entry.closed_form,
            entry.quadrature,
            entry.diff
        )));
    }
    Ok(entry)
}

/// Like [`oracle_validate_entry`] but never fails on a mismatch.
pub fn oracle_compare_entry(
    sector: PhaseSector,
    kernel: OracleKernel,
    n: usize,
    m: usize,
    cfg: &QuadratureConfig,
) -> Result<OracleEntry> {
    let closed_form = closed_form_entry(sector, kernel, n, m);
    let est = quadrature_entry(sector, kernel, n, m, cfg)?;
    Ok(OracleEntry {
        closed_form,
        quadrature: est.value,
        error_estimate: est.error,
        diff: (closed_form - est.value).abs(),
    })
}

/// Fixed Gauss order used as the second rule in [`oracle_sweep`].
pub const SWEEP_FIXED_ORDER: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub sector: PhaseSector,
    pub kernel: OracleKernel,
    pub n: usize,
    pub m: usize,
    pub adaptive: OracleEntry,
    pub fixed: OracleEntry,
}

impl SweepRow {
    pub fn rule_diff(&self) -> f64 {
        (self.adaptive.quadrature - self.fixed.quadrature).abs()
    }

    /// Whether each rule's reported error (or `abs_tol` for the adaptive rule)
    /// covers its observed deviation from the closed form.
    pub fn estimates_conservative(&self, abs_tol: f64) -> bool {
        self.adaptive.diff <= self.adaptive.error_estimate.max(abs_tol)
            && self.fixed.diff <= self.fixed.error_estimate.max(abs_tol)
    }
}

pub const SWEEP_COLUMNS: [&str; 11] = [
    "sector",
    "kernel",
    "n",
    "m",
    "closed_form",
    "adaptive",
    "adaptive_err",
    "fixed",
    "fixed_err",
    "diff",
    "rule_diff",
];

/// Every entry `n, m < max_index` for both sectors and all oracle kernels,
/// under both the adaptive rule (`adaptive_cfg`) and composite Gauss of order
/// [`SWEEP_FIXED_ORDER`]. Rows come back in (sector, kernel, n, m) order.
pub fn oracle_sweep(max_index: usize, adaptive_cfg: &QuadratureConfig) -> Result<Vec<SweepRow>> {
    let fixed_cfg = QuadratureConfig::fixed(SWEEP_FIXED_ORDER);
    let mut cases = Vec::with_capacity(6 * max_index * max_index);
    for sector in PhaseSector::ALL {
        for kernel in OracleKernel::ALL {
            for n in 0..max_index {
                for m in 0..max_index {
                    cases.push((sector, kernel, n, m));
                }
            }
        }
    }
    cases
        .par_iter()
        .map(|&(sector, kernel, n, m)| {
            Ok(SweepRow {
                sector,
                kernel,
                n,
                m,
                adaptive: oracle_compare_entry(sector, kernel, n, m, adaptive_cfg)?,
                fixed: oracle_compare_entry(sector, kernel, n, m, &fixed_cfg)?,
            })
        })
        .collect()
}

/// Renders sweep rows with the [`SWEEP_COLUMNS`] schema.
pub fn sweep_table(rows: &[SweepRow]) -> ScanTable {
    let mut t = ScanTable::new(SWEEP_COLUMNS.iter().map(|s| s.to_string()).collect());
    t.push_meta("fixed_order", SWEEP_FIXED_ORDER.to_string());
    for r in rows {
        t.push_row(vec![
            Value::Text(r.sector.name().into()),
            Value::Text(r.kernel.name().into()),
            Value::Int(r.n as i64),
            Value::Int(r.m as i64),
            Value::Real(r.adaptive.closed_form),
            Value::Real(r.adaptive.quadrature),
            Value::Real(r.adaptive.error_estimate),
            Value::Real(r.fixed.quadrature),
            Value::Real(r.fixed.error_estimate),
            Value::Real(r.adaptive.diff),
            Value::Real(r.rule_diff()),
        ])
        .expect("row width matches SWEEP_COLUMNS");
    }
    t
}
