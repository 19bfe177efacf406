//! Number-basis matrices for real, even functions of the quantum phase.
//!
//! Two sectors are available. `Plus` is spanned by the cosine states
//! `|phi> = pi^{-1/2}|0> + sqrt(2/pi) sum_n cos(n phi)|n>` and `Minus` by the
//! sine states `sqrt(2/pi) sum_{n>=1} sin(n phi)|n>`, with `phi` in `[0, pi]`.
//! An operator `f(Phi)` is `int_0^pi f(phi) |phi><phi| dphi`; its number-basis
//! entries are evaluated here in closed form.
//!
//! Minus-sector matrices keep the full `dim x dim` shape: row and column 0 are
//! identically zero, so their spectrum always carries one spurious zero.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{commutator, number_operator, BasisTag, OperatorMatrix, StateVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhaseSector {
    /// Cosine sector, `H_N^+`.
    Plus,
    /// Sine sector, `H_N^-`.
    Minus,
}

impl PhaseSector {
    pub const ALL: [PhaseSector; 2] = [PhaseSector::Plus, PhaseSector::Minus];

    pub fn name(self) -> &'static str {
        match self {
            PhaseSector::Plus => "plus",
            PhaseSector::Minus => "minus",
        }
    }
}

impl fmt::Display for PhaseSector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhaseSector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plus" | "+" => Ok(PhaseSector::Plus),
            "minus" | "-" => Ok(PhaseSector::Minus),
            other => Err(Error::Range(format!("unknown phase sector {other:?}"))),
        }
    }
}

/// Normalization of the `n`-th basis function, so that
/// `e_phi(n) = norm(n) * cos(n phi)` (Plus) or `norm(n) * sin(n phi)` (Minus).
fn basis_norm(sector: PhaseSector, n: usize) -> f64 {
    match (sector, n) {
        (PhaseSector::Plus, 0) => 1.0 / PI.sqrt(),
        (PhaseSector::Minus, 0) => 0.0,
        _ => (2.0 / PI).sqrt(),
    }
}

/// `e_phi^{+-}(n)`, the `n`-th number-basis amplitude of the sector phase state.
pub fn basis_amplitude(sector: PhaseSector, n: usize, phi: f64) -> f64 {
    let arg = n as f64 * phi;
    match sector {
        PhaseSector::Plus => basis_norm(sector, n) * arg.cos(),
        PhaseSector::Minus => basis_norm(sector, n) * arg.sin(),
    }
}

/// Truncation of the continuum-normalized phase state `|phi>` to `dim`
/// number states. The result is not normalizable in the limit and is
/// returned as-is.
pub fn phase_state(sector: PhaseSector, phi: f64, dim: usize) -> Result<StateVector> {
    if !(0.0..=PI).contains(&phi) {
        return Err(Error::Range(format!("phase {phi} outside [0, pi]")));
    }
    if dim < 1 {
        return Err(Error::Range(
            "phase state dimension must be positive".into(),
        ));
    }
    StateVector::from_real(
        &(0..dim)
            .map(|n| basis_amplitude(sector, n, phi))
            .collect::<Vec<_>>(),
    )
}

/// `int_0^pi phi cos(k phi) dphi` for integer `k`.
fn phi_cos_moment(k: u64) -> f64 {
    if k == 0 {
        PI * PI / 2.0
    } else if k.is_multiple_of(2) {
        0.0
    } else {
        let kf = k as f64;
        -2.0 / (kf * kf)
    }
}

/// Closed-form `<n| |Phi| |m>` in the given sector, in radians.
///
/// From `cos a cos b = (cos(a-b) + cos(a+b))/2` and
/// `sin a sin b = (cos(a-b) - cos(a+b))/2` the entry reduces to
/// `norm(n) norm(m) / 2 * (J(n-m) +- J(n+m))` with
/// `J(k) = int_0^pi phi cos(k phi) = ((-1)^k - 1)/k^2`, `J(0) = pi^2/2`.
pub fn abs_phase_entry(sector: PhaseSector, n: i64, m: i64) -> Result<f64> {
    if n < 0 || m < 0 {
        return Err(Error::Range(format!(
            "number-basis indices must be >= 0, got ({n}, {m})"
        )));
    }
    Ok(abs_phase_entry_unchecked(sector, n as usize, m as usize))
}

pub(crate) fn abs_phase_entry_unchecked(sector: PhaseSector, n: usize, m: usize) -> f64 {
    let scale = basis_norm(sector, n) * basis_norm(sector, m);
    if scale == 0.0 {
        return 0.0;
    }
    let diff = phi_cos_moment(n.abs_diff(m) as u64);
    let sum = phi_cos_moment((n + m) as u64);
    let combined = match sector {
        PhaseSector::Plus => diff + sum,
        PhaseSector::Minus => diff - sum,
    };
    0.5 * scale * combined
}

/// `|Phi|` truncated to the first `dim` number states.
pub fn build_abs_phase(sector: PhaseSector, dim: usize) -> Result<OperatorMatrix> {
    check_dim(dim, 1)?;
    Ok(OperatorMatrix::real_symmetric_from_fn(
        dim,
        BasisTag::Number,
        |n, m| abs_phase_entry_unchecked(sector, n, m),
    ))
}

/// A real, even function of the phase given as a finite cosine series
/// `f(phi) = a_0 + sum_{k>=1} a_k cos(k phi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseKernel {
    cosine_coeffs: Vec<f64>,
}

impl PhaseKernel {
    pub fn new(cosine_coeffs: Vec<f64>) -> Result<Self> {
        if cosine_coeffs.is_empty() {
            return Err(Error::Range(
                "kernel needs at least the constant coefficient".into(),
            ));
        }
        if let Some(bad) = cosine_coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::Range(format!(
                "kernel coefficient {bad} is not finite"
            )));
        }
        Ok(Self { cosine_coeffs })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            cosine_coeffs: vec![value],
        }
    }

    pub fn cos_phi() -> Self {
        Self {
            cosine_coeffs: vec![0.0, 1.0],
        }
    }

    /// Fourier cosine series of `phi` on `[0, pi]` (the even extension is
    /// `|phi|`) truncated after harmonic `cutoff`:
    /// `pi/2 - (4/pi) sum_{odd s <= cutoff} cos(s phi)/s^2`.
    pub fn abs_phi_series(cutoff: usize) -> Self {
        let mut coeffs = vec![0.0; cutoff + 1];
        coeffs[0] = PI / 2.0;
        for s in (1..=cutoff).step_by(2) {
            let sf = s as f64;
            coeffs[s] = -4.0 / (PI * sf * sf);
        }
        Self {
            cosine_coeffs: coeffs,
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.cosine_coeffs
    }

    pub fn cutoff(&self) -> usize {
        self.cosine_coeffs.len() - 1
    }

    fn coeff(&self, k: usize) -> f64 {
        self.cosine_coeffs.get(k).copied().unwrap_or(0.0)
    }

    pub fn eval(&self, phi: f64) -> f64 {
        self.cosine_coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * (k as f64 * phi).cos())
            .sum()
    }
}

/// `int_0^pi f(phi) |phi><phi| dphi` for a cosine-series kernel.
///
/// Uses `int_0^pi cos(k x) cos(n x) cos(m x) dx =
///   (pi/4) [d(k, n+m) + d(k, |n-m|)(1 + d(n, m)) + d(k+n+m, 0)]`
/// and, for the sine sector,
/// `int_0^pi cos(k x) sin(n x) sin(m x) dx =
///   (pi/4) [d(k, |n-m|)(1 + d(n, m)) - d(k, n+m) - d(k+n+m, 0)]`,
/// so each entry only picks up the coefficients at `n+m` and `|n-m|`.
pub fn build_function_of_phase(
    kernel: &PhaseKernel,
    sector: PhaseSector,
    dim: usize,
) -> Result<OperatorMatrix> {
    check_dim(dim, 1)?;
    Ok(OperatorMatrix::real_symmetric_from_fn(
        dim,
        BasisTag::Number,
        |n, m| kernel_entry(kernel, sector, n, m),
    ))
}

fn kernel_entry(kernel: &PhaseKernel, sector: PhaseSector, n: usize, m: usize) -> f64 {
    let scale = basis_norm(sector, n) * basis_norm(sector, m);
    if scale == 0.0 {
        return 0.0;
    }
    let diff_weight = if n == m { 2.0 } else { 1.0 };
    let at_diff = diff_weight * kernel.coeff(n.abs_diff(m));
    let at_sum = kernel.coeff(n + m);
    let all_zero = if n == 0 && m == 0 {
        kernel.coeff(0)
    } else {
        0.0
    };
    let bracket = match sector {
        PhaseSector::Plus => at_diff + at_sum + all_zero,
        PhaseSector::Minus => at_diff - at_sum - all_zero,
    };
    scale * (PI / 4.0) * bracket
}

/// Susskind–Glogower one-sided shift `E = sum_n |n><n+1|`, truncated.
/// The last row is zero; `E E^dag` therefore misses `|dim-1><dim-1|`.
pub fn build_sg_ladder(dim: usize) -> Result<OperatorMatrix> {
    check_dim(dim, 1)?;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 0..dim - 1 {
        m[(n, n + 1)] = Complex64::new(1.0, 0.0);
    }
    OperatorMatrix::general(m, BasisTag::Number)
}

/// Carruthers–Nieto `C = (E + E^dag)/2`.
pub fn build_cn_cosine(dim: usize) -> Result<OperatorMatrix> {
    let e = build_sg_ladder(dim)?;
    let c = (e.entries() + e.entries().adjoint()) * Complex64::new(0.5, 0.0);
    OperatorMatrix::hermitian(c, BasisTag::Number, 0.0)
}

/// Carruthers–Nieto `S = (E - E^dag)/(2i)`.
pub fn build_cn_sine(dim: usize) -> Result<OperatorMatrix> {
    let e = build_sg_ladder(dim)?;
    let s = (e.entries() - e.entries().adjoint()) * Complex64::new(0.0, -0.5);
    OperatorMatrix::hermitian(s, BasisTag::Number, 0.0)
}

/// The self-adjoint cosine of the phase in each sector, built from `C`:
/// Plus adds `(sqrt2 - 1)/2 (|0><1| + |1><0|)`, Minus subtracts
/// `(|0><1| + |1><0|)/2` so that row and column 0 vanish.
pub fn build_cos_phase(sector: PhaseSector, dim: usize) -> Result<OperatorMatrix> {
    let c = build_cn_cosine(dim)?;
    if dim < 2 {
        return Ok(c);
    }
    let correction = match sector {
        PhaseSector::Plus => 0.5 * (2.0_f64.sqrt() - 1.0),
        PhaseSector::Minus => -0.5,
    };
    let mut m = c.into_entries();
    m[(0, 1)] += correction;
    m[(1, 0)] += correction;
    OperatorMatrix::hermitian(m, BasisTag::Number, 0.0)
}

/// Entry `(n, m)` of [`build_cos_phase`] without building the matrix; the
/// value does not depend on the truncation as long as both indices fit.
pub fn cos_phase_entry(sector: PhaseSector, n: usize, m: usize) -> f64 {
    let c = if n.abs_diff(m) == 1 { 0.5 } else { 0.0 };
    if n.min(m) != 0 || n.max(m) != 1 {
        return c;
    }
    match sector {
        PhaseSector::Plus => c + 0.5 * (2.0_f64.sqrt() - 1.0),
        PhaseSector::Minus => c - 0.5,
    }
}

/// Tolerance for the truncated `[C, S]` identity.
pub const CS_COMMUTATOR_TOL: f64 = 1e-14;

/// `[C, S]`, checked against `(i/2)(|0><0| - |dim-1><dim-1|)`. The second
/// projector is an artifact of cutting `E` off at `dim`.
pub fn cs_commutator_check(dim: usize) -> Result<OperatorMatrix> {
    check_dim(dim, 3)?;
    let c = build_cn_cosine(dim)?;
    let s = build_cn_sine(dim)?;
    let comm = commutator(&c, &s)?;
    let residual = cs_commutator_residual(&comm);
    if residual > CS_COMMUTATOR_TOL {
        return Err(Error::Tolerance(format!(
            "[C, S] differs from its truncated form by {residual:e} at dim {dim}"
        )));
    }
    Ok(comm)
}

/// Max-norm distance of `comm` from `(i/2)(|0><0| - |D-1><D-1|)`.
pub fn cs_commutator_residual(comm: &OperatorMatrix) -> f64 {
    let d = comm.dim();
    let mut worst = 0.0_f64;
    for i in 0..d {
        for j in 0..d {
            let expected = if i == j && i == 0 {
                Complex64::new(0.0, 0.5)
            } else if i == j && i == d - 1 {
                Complex64::new(0.0, -0.5)
            } else {
                Complex64::new(0.0, 0.0)
            };
            worst = worst.max((comm.get(i, j) - expected).norm());
        }
    }
    worst
}

/// Overlap of the truncated Plus phase state at `phi` with the truncated
/// Minus phase state at `psi`. Nonzero values witness that the two sectors
/// are not orthogonal.
pub fn sector_overlap(phi: f64, psi: f64, dim: usize) -> Result<Complex64> {
    let plus = phase_state(PhaseSector::Plus, phi, dim)?;
    let minus = phase_state(PhaseSector::Minus, psi, dim)?;
    crate::linalg::inner_product(&plus, &minus)
}

/// Largest `|[N, A]_{nn}|`. For any number-basis operator this is zero since
/// `[N, A]_{nm} = (n - m) A_{nm}`.
pub fn number_phase_diagonal_check(a: &OperatorMatrix) -> Result<f64> {
    let n = number_operator(a.dim());
    let comm = commutator(&n, a)?;
    Ok((0..a.dim())
        .map(|i| comm.get(i, i).norm())
        .fold(0.0, f64::max))
}

fn check_dim(dim: usize, min: usize) -> Result<()> {
    if dim < min {
        return Err(Error::Range(format!(
            "dimension must be at least {min}, got {dim}"
        )));
    }
    Ok(())
}
