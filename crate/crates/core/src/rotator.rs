//! Plane rotator: the `J_z^alpha` extension family, the angle operator and
//! its smoothed versions, and the parity split of `|Theta|`.
//!
//! Matrices are written in the eigenbasis `u_m(theta) = e^{i(m+alpha)theta}/sqrt(2 pi)`
//! of `J_z^alpha`, truncated to `m = -m_max..=m_max` and stored at index
//! `m + m_max`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{BasisTag, OperatorMatrix};
use crate::quadrature::{integrate_with_breaks, QuadRule, QuadratureConfig};

/// Twist parameter of `u(pi) = e^{2 pi i alpha} u(-pi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaExtension(f64);

impl AlphaExtension {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Range(format!(
                "alpha must lie in [0, 1), got {alpha}"
            )));
        }
        Ok(Self(alpha))
    }

    pub fn periodic() -> Self {
        Self(0.0)
    }

    pub fn alpha(self) -> f64 {
        self.0
    }

    fn basis(self) -> BasisTag {
        BasisTag::Rotator { alpha: self.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RotatorTruncation {
    m_max: usize,
}

impl RotatorTruncation {
    pub fn new(m_max: usize) -> Result<Self> {
        if m_max == 0 {
            return Err(Error::Range("m_max must be positive".into()));
        }
        Ok(Self { m_max })
    }

    pub fn m_max(self) -> usize {
        self.m_max
    }

    pub fn dim(self) -> usize {
        2 * self.m_max + 1
    }

    /// Storage index of quantum number `m`.
    pub fn index(self, m: i64) -> Option<usize> {
        let shifted = m + self.m_max as i64;
        (0..self.dim() as i64)
            .contains(&shifted)
            .then_some(shifted as usize)
    }

    /// Quantum number stored at `index`.
    pub fn quantum_number(self, index: usize) -> i64 {
        index as i64 - self.m_max as i64
    }
}

/// `m + alpha`, the eigenvalue of `-i d/dtheta` on `u_m`.
pub fn jz_eigenvalue(m: i64, ext: AlphaExtension) -> f64 {
    m as f64 + ext.alpha()
}

/// `J_z^alpha` in its own eigenbasis.
pub fn jz_matrix(trunc: RotatorTruncation, ext: AlphaExtension) -> OperatorMatrix {
    OperatorMatrix::real_symmetric_from_fn(trunc.dim(), ext.basis(), |i, j| {
        if i == j {
            jz_eigenvalue(trunc.quantum_number(i), ext)
        } else {
            0.0
        }
    })
}

/// `(1/2 pi) int theta e^{i k theta}` over `[-pi, pi]`: zero for `k = 0`,
/// `-i (-1)^k / k` otherwise.
fn theta_fourier(k: i64) -> Complex64 {
    if k == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    Complex64::new(0.0, -sign / k as f64)
}

/// Angle operator `Theta`, `<m|Theta|m'> = (1/2 pi) int theta e^{i(m'-m)theta}`.
/// The alpha phases cancel, so the entries do not depend on the extension.
pub fn theta_matrix(trunc: RotatorTruncation, ext: AlphaExtension) -> OperatorMatrix {
    toeplitz(trunc, ext.basis(), theta_fourier)
}

/// `|Theta|`, entries `pi/2` on the diagonal and `((-1)^k - 1)/(pi k^2)` at
/// offset `k`.
pub fn abs_theta_matrix(trunc: RotatorTruncation) -> OperatorMatrix {
    toeplitz(trunc, AlphaExtension::periodic().basis(), |k| {
        let value = if k == 0 {
            PI / 2.0
        } else if k % 2 == 0 {
            0.0
        } else {
            let kf = k as f64;
            -2.0 / (PI * kf * kf)
        };
        Complex64::new(value, 0.0)
    })
}

/// Matrix with `A[m][m'] = symbol(m' - m)`. `symbol(-k)` must equal
/// `conj(symbol(k))`; only `k >= 0` is evaluated and the rest is mirrored.
fn toeplitz(
    trunc: RotatorTruncation,
    basis: BasisTag,
    mut symbol: impl FnMut(i64) -> Complex64,
) -> OperatorMatrix {
    let dim = trunc.dim();
    let values: Vec<Complex64> = (0..dim as i64).map(&mut symbol).collect();
    let m = DMatrix::from_fn(dim, dim, |i, j| {
        if j >= i {
            values[j - i]
        } else {
            values[i - j].conj()
        }
    });
    OperatorMatrix::hermitian(m, basis, 0.0).expect("mirrored Toeplitz matrix is Hermitian")
}

/// Smooth periodic stand-in for `theta`: equal to `theta` on
/// `[-pi, pi - epsilon)`, then a cubic Hermite segment back down to `-pi`
/// with slope 1 at both ends, so the periodic extension is `C^1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaperSpec {
    epsilon: f64,
}

impl TaperSpec {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < PI) {
            return Err(Error::Range(format!(
                "taper epsilon must lie in (0, pi), got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(self) -> f64 {
        self.epsilon
    }

    pub fn family(self) -> &'static str {
        "cubic-hermite"
    }

    pub fn start(self) -> f64 {
        PI - self.epsilon
    }

    pub fn eval(self, theta: f64) -> f64 {
        let start = self.start();
        if theta < start {
            return theta;
        }
        let eps = self.epsilon;
        let s = ((theta - start) / eps).min(1.0);
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * start + h10 * eps + h01 * (-PI) + h11 * eps
    }

    pub fn derivative(self, theta: f64) -> f64 {
        let start = self.start();
        if theta < start {
            return 1.0;
        }
        let eps = self.epsilon;
        let s = ((theta - start) / eps).min(1.0);
        let s2 = s * s;
        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        (d00 * start + d01 * (-PI)) / eps + d10 + d11
    }
}

/// `Theta_eps = f_eps(Theta)`, entries `(1/2 pi) int f_eps(theta) e^{i(m'-m)theta}`
/// by adaptive quadrature split at the taper start.
pub fn theta_eps_matrix(trunc: RotatorTruncation, taper: TaperSpec) -> Result<OperatorMatrix> {
    let dim = trunc.dim();
    let mut values = Vec::with_capacity(dim);
    for k in 0..dim as i64 {
        let cfg = QuadratureConfig {
            rule: QuadRule::Adaptive {
                abs_tol: 1e-13,
                max_depth: 40,
            },
            min_panels: k as usize + 2,
        };
        let integrand = |t: f64| Complex64::from_polar(taper.eval(t), k as f64 * t);
        let est = integrate_with_breaks(integrand, -PI, PI, &[taper.start()], &cfg)?;
        values.push(est.value / (2.0 * PI));
    }
    Ok(toeplitz(trunc, AlphaExtension::periodic().basis(), |k| {
        values[k as usize]
    }))
}

/// Max over the truncation of `|(m - m') <m|Theta|m'> + i(d_{mm'} - e^{i(m'-m)pi})|`.
pub fn commutator_identity_check(trunc: RotatorTruncation) -> f64 {
    let theta = theta_matrix(trunc, AlphaExtension::periodic());
    let dim = trunc.dim();
    let mut worst = 0.0_f64;
    for i in 0..dim {
        let m = trunc.quantum_number(i);
        for j in 0..dim {
            let mp = trunc.quantum_number(j);
            let lhs = theta.get(i, j) * (m - mp) as f64;
            let delta = if m == mp { 1.0 } else { 0.0 };
            let rhs = Complex64::new(0.0, -1.0)
                * (Complex64::new(delta, 0.0) - Complex64::from_polar(1.0, (mp - m) as f64 * PI));
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

/// Even and odd diagonal blocks of a rotator operator together with the
/// max-norm of the block coupling them.
#[derive(Clone, Debug)]
pub struct ParityBlocks {
    /// Basis `|0>, (|m> + |-m>)/sqrt2` for `m = 1..=m_max`.
    pub even: OperatorMatrix,
    /// Basis `(|m> - |-m>)/sqrt2` for `m = 1..=m_max`.
    pub odd: OperatorMatrix,
    pub cross_norm: f64,
}

/// Largest coupling allowed between the even and odd sectors.
pub const PARITY_CROSS_TOL: f64 = 1e-12;

/// Orthogonal change of basis to parity-adapted states. Columns
/// `0..=m_max` are even, the remaining `m_max` columns are odd.
fn parity_basis(m_max: usize) -> DMatrix<Complex64> {
    let dim = 2 * m_max + 1;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut p = DMatrix::<Complex64>::zeros(dim, dim);
    p[(m_max, 0)] = Complex64::new(1.0, 0.0);
    for m in 1..=m_max {
        let (plus, minus) = (m_max + m, m_max - m);
        p[(plus, m)] = Complex64::new(r, 0.0);
        p[(minus, m)] = Complex64::new(r, 0.0);
        let col = m_max + m;
        p[(plus, col)] = Complex64::new(r, 0.0);
        p[(minus, col)] = Complex64::new(-r, 0.0);
    }
    p
}

/// Splits a rotator-basis operator into even and odd parity blocks.
pub fn parity_decompose(a: &OperatorMatrix) -> Result<ParityBlocks> {
    let dim = a.dim();
    if !matches!(a.basis(), BasisTag::Rotator { .. }) {
        return Err(Error::Range(
            "parity decomposition needs a rotator-basis operator".into(),
        ));
    }
    if dim.is_multiple_of(2) {
        return Err(Error::Range(format!(
            "dimension {dim} does not correspond to a symmetric range -m_max..=m_max"
        )));
    }
    let m_max = dim / 2;
    let p = parity_basis(m_max);
    let rotated = p.adjoint() * a.entries() * &p;
    let n_even = m_max + 1;

    let even = rotated.view((0, 0), (n_even, n_even)).clone_owned();
    let odd = rotated.view((n_even, n_even), (m_max, m_max)).clone_owned();
    let cross_norm = rotated
        .view((0, n_even), (n_even, m_max))
        .iter()
        .chain(rotated.view((n_even, 0), (m_max, n_even)).iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if cross_norm > PARITY_CROSS_TOL {
        return Err(Error::Tolerance(format!(
            "even/odd coupling {cross_norm:e} exceeds {PARITY_CROSS_TOL:e}"
        )));
    }
    let tol = a.hermitian_tol().max(1e-12);
    Ok(ParityBlocks {
        even: OperatorMatrix::hermitian(even, a.basis(), tol)?,
        odd: OperatorMatrix::hermitian(odd, a.basis(), tol)?,
        cross_norm,
    })
}

/// `max |P A P - A|` for the reflection `P: m -> -m`.
pub fn parity_commutation_residual(a: &OperatorMatrix) -> f64 {
    let d = a.dim();
    let mut worst = 0.0_f64;
    for i in 0..d {
        for j in 0..d {
            worst = worst.max((a.get(d - 1 - i, d - 1 - j) - a.get(i, j)).norm());
        }
    }
    worst
}
