//! Sampled functions on the circle `[-pi, pi]` and the half line `[0, R]`,
//! used to evaluate boundary forms `<u, F v> - <F* u, v>` numerically and to
//! compare them with their boundary-value expressions.
//!
//! Derivatives use fourth-order finite differences (central in the interior,
//! one-sided near the ends) with weights from Fornberg's recursion; integrals
//! use composite Simpson.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_R_MAX: f64 = 40.0;
pub const DEFAULT_HALF_LINE_POINTS: usize = 16_385;
pub const DEFAULT_CIRCLE_POINTS: usize = 4_097;
pub const MIN_POINTS: usize = 64;
/// `|u(R)|` must not exceed this for a half-line sample to stand in for
/// `u(infinity) = 0`.
pub const DECAY_TOL: f64 = 1e-12;
/// Longest span a membership stencil may cover. Stencil spacing is chosen
/// below this by comparing estimates at successive doublings of the stride.
pub const MEMBERSHIP_MAX_SPAN: f64 = 0.25;
/// Highest derivative order a membership check will estimate.
pub const MAX_MEMBERSHIP_ORDER: usize = 4;

const ACCURACY: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    /// `[-pi, pi]`.
    Circle,
    /// `[0, r_max]`.
    HalfLine { r_max: f64 },
}

impl Domain {
    fn bounds(self) -> (f64, f64) {
        match self {
            Domain::Circle => (-PI, PI),
            Domain::HalfLine { r_max } => (0.0, r_max),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Circle => write!(f, "circle"),
            Domain::HalfLine { r_max } => write!(f, "half_line(R={r_max})"),
        }
    }
}

/// Uniform samples of a complex function, endpoints included.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    domain: Domain,
    samples: Vec<Complex64>,
    /// Samples of `u(-r)` on the same grid, when the function is known on the
    /// negative axis. Used only to split `u` into even and odd parts.
    reflection: Option<Vec<Complex64>>,
}

impl GridFunction {
    pub fn from_samples(domain: Domain, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() < MIN_POINTS {
            return Err(Error::Grid(format!(
                "grid needs at least {MIN_POINTS} points, got {}",
                samples.len()
            )));
        }
        if let Domain::HalfLine { r_max } = domain {
            if !(r_max > 0.0 && r_max.is_finite()) {
                return Err(Error::Grid(format!(
                    "half-line cutoff must be positive, got {r_max}"
                )));
            }
            let tail = samples[samples.len() - 1].norm();
            if !(tail <= DECAY_TOL) {
                return Err(Error::Grid(format!(
                    "|u(R)| = {tail:e} at R = {r_max} exceeds the decay bound {DECAY_TOL:e}"
                )));
            }
        }
        if samples
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Grid("samples must be finite".into()));
        }
        Ok(Self {
            domain,
            samples,
            reflection: None,
        })
    }

    pub fn sample(domain: Domain, points: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        if points < 2 {
            return Err(Error::Grid("grid needs at least two points".into()));
        }
        let (a, b) = domain.bounds();
        let h = (b - a) / (points - 1) as f64;
        let samples = (0..points)
            .map(|i| {
                if i + 1 == points {
                    f(b)
                } else {
                    f(a + h * i as f64)
                }
            })
            .collect();
        Self::from_samples(domain, samples)
    }

    pub fn circle(points: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::sample(Domain::Circle, points, f)
    }

    pub fn half_line(r_max: f64, points: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::sample(Domain::HalfLine { r_max }, points, f)
    }

    /// Half-line sample that also records `f(-r)`, so the even and odd parts
    /// of `f` about `r = 0` are available to [`cos_sin_transform`].
    pub fn half_line_with_reflection(
        r_max: f64,
        points: usize,
        f: impl Fn(f64) -> Complex64,
    ) -> Result<Self> {
        let mut g = Self::half_line(r_max, points, &f)?;
        let h = g.spacing();
        let refl: Vec<Complex64> = (0..points).map(|i| f(-h * i as f64)).collect();
        if refl.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Grid("reflected samples must be finite".into()));
        }
        g.reflection = Some(refl);
        Ok(g)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn spacing(&self) -> f64 {
        let (a, b) = self.domain.bounds();
        (b - a) / (self.len() - 1) as f64
    }

    pub fn first(&self) -> Complex64 {
        self.samples[0]
    }

    pub fn last(&self) -> Complex64 {
        self.samples[self.len() - 1]
    }

    /// Derivative of the given order at every grid point.
    pub fn derivative(&self, order: usize) -> Result<Vec<Complex64>> {
        let n = self.len();
        let width = order + ACCURACY - usize::from(order.is_multiple_of(2));
        let width = width.max(order + 1);
        if n < order + ACCURACY + 1 {
            return Err(Error::Grid(format!(
                "{n} points cannot carry a derivative of order {order}"
            )));
        }
        let h = self.spacing();
        let scale = h.powi(order as i32);
        let half = width / 2;
        // Interior points share one central stencil; only the edges need their own.
        let central = fornberg_offsets(&centered(half), order);
        let edge_width = order + ACCURACY;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, slot) in out.iter_mut().enumerate() {
            if i >= half && i + half < n {
                *slot = apply(&central, &self.samples[i - half..=i + half]) / scale;
            } else {
                let start = if i < half { 0 } else { n - edge_width };
                let offsets: Vec<f64> = (start..start + edge_width)
                    .map(|j| j as f64 - i as f64)
                    .collect();
                let w = fornberg_offsets(&offsets, order);
                *slot = apply(&w, &self.samples[start..start + edge_width]) / scale;
            }
        }
        Ok(out)
    }

    /// One-sided estimate of the `order`-th derivative at the left (`r = 0`
    /// or `theta = -pi`) end, using every `stride`-th sample.
    pub fn left_derivative(&self, order: usize, stride: usize) -> Result<Complex64> {
        let stride = stride.max(1);
        let needed = order + ACCURACY;
        if order == 0 {
            return Ok(self.first());
        }
        if (needed - 1) * stride >= self.len() {
            return Err(Error::Grid(format!(
                "{} points cannot carry a one-sided order-{order} stencil with stride {stride}",
                self.len()
            )));
        }
        let offsets: Vec<f64> = (0..needed).map(|j| j as f64).collect();
        let w = fornberg_offsets(&offsets, order);
        let picked: Vec<Complex64> = (0..needed).map(|j| self.samples[j * stride]).collect();
        Ok(apply(&w, &picked) / (self.spacing() * stride as f64).powi(order as i32))
    }

    fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.domain != other.domain || self.len() != other.len() {
            return Err(Error::Grid(format!(
                "grids differ: {} with {} points vs {} with {} points",
                self.domain,
                self.len(),
                other.domain,
                other.len()
            )));
        }
        Ok(())
    }
}

fn centered(half: usize) -> Vec<f64> {
    (0..=2 * half).map(|j| j as f64 - half as f64).collect()
}

fn apply(weights: &[f64], values: &[Complex64]) -> Complex64 {
    weights
        .iter()
        .zip(values)
        .fold(Complex64::new(0.0, 0.0), |acc, (w, v)| acc + v * *w)
}

/// Finite-difference weights for the `order`-th derivative at 0 on the given
/// node offsets (unit spacing), by Fornberg's recursion.
pub fn fornberg_offsets(nodes: &[f64], order: usize) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0];
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i];
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[order]).collect()
}

/// Composite Simpson over the whole grid; an odd number of intervals closes
/// with a 3/8 panel.
fn simpson(values: &[Complex64], h: f64) -> Complex64 {
    let n = values.len();
    let intervals = n - 1;
    let (simpson_end, tail) = if intervals.is_multiple_of(2) {
        (n - 1, None)
    } else {
        (n - 4, Some(n - 4))
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut i = 0;
    while i + 2 <= simpson_end {
        acc += (values[i] + values[i + 1] * 4.0 + values[i + 2]) * (h / 3.0);
        i += 2;
    }
    if let Some(s) = tail {
        acc += (values[s] + values[s + 1] * 3.0 + values[s + 2] * 3.0 + values[s + 3])
            * (3.0 * h / 8.0);
    }
    acc
}

/// Numerical boundary form next to its boundary-value expression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryForm {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

impl BoundaryForm {
    fn new(lhs: Complex64, rhs: Complex64) -> Self {
        Self {
            lhs,
            rhs,
            residual: (lhs - rhs).norm(),
        }
    }
}

/// `<u, -i v'> - <-i u', v>` against `-i[conj u(pi) v(pi) - conj u(-pi) v(-pi)]`.
pub fn boundary_form_jz(u: &GridFunction, v: &GridFunction) -> Result<BoundaryForm> {
    require_domain(u, Domain::Circle)?;
    u.check_same_grid(v)?;
    let lhs = first_order_form(u, v)?;
    let rhs =
        Complex64::new(0.0, -1.0) * (u.last().conj() * v.last() - u.first().conj() * v.first());
    Ok(BoundaryForm::new(lhs, rhs))
}

/// `<u, -i v'> - <-i u', v>` on the half line against `i conj u(0) v(0)`.
pub fn boundary_form_pr(u: &GridFunction, v: &GridFunction) -> Result<BoundaryForm> {
    require_half_line(u)?;
    u.check_same_grid(v)?;
    let lhs = first_order_form(u, v)?;
    let rhs = Complex64::new(0.0, 1.0) * u.first().conj() * v.first();
    Ok(BoundaryForm::new(lhs, rhs))
}

/// `<u, -v''> - <-u'', v>` on the half line against
/// `conj u(0) v'(0) - conj u'(0) v(0)`.
pub fn boundary_form_pr2(u: &GridFunction, v: &GridFunction) -> Result<BoundaryForm> {
    require_half_line(u)?;
    u.check_same_grid(v)?;
    let u2 = u.derivative(2)?;
    let v2 = v.derivative(2)?;
    let integrand: Vec<Complex64> = (0..u.len())
        .map(|i| -u.samples[i].conj() * v2[i] + u2[i].conj() * v.samples[i])
        .collect();
    let lhs = simpson(&integrand, u.spacing());
    let du0 = u.left_derivative(1, 1)?;
    let dv0 = v.left_derivative(1, 1)?;
    let rhs = u.first().conj() * dv0 - du0.conj() * v.first();
    Ok(BoundaryForm::new(lhs, rhs))
}

fn first_order_form(u: &GridFunction, v: &GridFunction) -> Result<Complex64> {
    let du = u.derivative(1)?;
    let dv = v.derivative(1)?;
    let minus_i = Complex64::new(0.0, -1.0);
    // <u, -i v'> - <-i u', v> = -i * int (conj u v' + conj u' v)
    let integrand: Vec<Complex64> = (0..u.len())
        .map(|i| minus_i * (u.samples[i].conj() * dv[i] + du[i].conj() * v.samples[i]))
        .collect();
    Ok(simpson(&integrand, u.spacing()))
}

fn require_domain(u: &GridFunction, expected: Domain) -> Result<()> {
    if u.domain != expected {
        return Err(Error::Grid(format!(
            "expected a {expected} function, got {}",
            u.domain
        )));
    }
    Ok(())
}

fn require_half_line(u: &GridFunction) -> Result<()> {
    match u.domain {
        Domain::HalfLine { .. } => Ok(()),
        other => Err(Error::Grid(format!(
            "expected a half-line function, got {other}"
        ))),
    }
}

/// Boundary-condition classes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MembershipClass {
    /// Odd-order derivatives vanish at `r = 0`.
    HrPlus,
    /// Even-order derivatives (including the value) vanish at `r = 0`.
    HrMinus,
    /// All derivatives vanish at `r = 0`.
    A,
    /// `u(pi) = e^{2 pi i alpha} u(-pi)` on the circle.
    HAlpha(f64),
}

impl MembershipClass {
    fn orders(self) -> Vec<usize> {
        match self {
            MembershipClass::HrPlus => vec![1, 3],
            MembershipClass::HrMinus => vec![0, 2],
            MembershipClass::A => vec![0, 1, 2, 3],
            MembershipClass::HAlpha(_) => Vec::new(),
        }
    }
}

impl fmt::Display for MembershipClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MembershipClass::HrPlus => write!(f, "Hr+"),
            MembershipClass::HrMinus => write!(f, "Hr-"),
            MembershipClass::A => write!(f, "A"),
            MembershipClass::HAlpha(a) => write!(f, "H_alpha({a})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MembershipReport {
    pub class: MembershipClass,
    /// Derivative orders checked, matching `derivative_residuals`. Empty for
    /// `HAlpha`, whose single residual is the twisted-periodicity mismatch.
    pub orders: Vec<usize>,
    pub derivative_residuals: Vec<f64>,
    pub verdict: bool,
}

/// Checks the boundary conditions defining `class` up to derivative order
/// [`MAX_MEMBERSHIP_ORDER`]; higher orders are not estimated.
pub fn membership_check(
    u: &GridFunction,
    class: MembershipClass,
    tol: f64,
) -> Result<MembershipReport> {
    let (orders, residuals) = match class {
        MembershipClass::HAlpha(alpha) => {
            require_domain(u, Domain::Circle)?;
            let twist = Complex64::from_polar(1.0, 2.0 * PI * alpha);
            (Vec::new(), vec![(u.last() - twist * u.first()).norm()])
        }
        _ => {
            require_half_line(u)?;
            let orders = class.orders();
            let residuals = orders
                .iter()
                .map(|&k| {
                    debug_assert!(k <= MAX_MEMBERSHIP_ORDER);
                    stable_left_derivative(u, k).map(|d| d.norm())
                })
                .collect::<Result<Vec<_>>>()?;
            (orders, residuals)
        }
    };
    let verdict = residuals.iter().all(|&r| r <= tol);
    Ok(MembershipReport {
        class,
        orders,
        derivative_residuals: residuals,
        verdict,
    })
}

/// One-sided derivative at the left end with the stride picked from the
/// doubling sequence `1, 2, 4, ...` where consecutive estimates agree best.
/// Small strides lose to rounding, large ones to truncation.
fn stable_left_derivative(u: &GridFunction, order: usize) -> Result<Complex64> {
    if order == 0 {
        return Ok(u.first());
    }
    let span = (order + ACCURACY - 1) as f64 * u.spacing();
    let mut estimates = Vec::new();
    let mut stride = 1;
    while estimates.len() < 2 || span * stride as f64 <= MEMBERSHIP_MAX_SPAN {
        match u.left_derivative(order, stride) {
            Ok(d) => estimates.push(d),
            Err(e) if estimates.is_empty() => return Err(e),
            Err(_) => break,
        }
        stride *= 2;
    }
    if estimates.len() < 2 {
        return Ok(estimates[0]);
    }
    let best = (0..estimates.len() - 1)
        .min_by(|&a, &b| {
            let da = (estimates[a] - estimates[a + 1]).norm();
            let db = (estimates[b] - estimates[b + 1]).norm();
            da.total_cmp(&db)
        })
        .unwrap_or(0);
    Ok(estimates[best])
}

/// Discrete cosine and sine components of a half-line function.
///
/// With `chi_k = k pi / R`, `cos_components[k]` approximates
/// `(1/pi) int_0^R u_even(r) cos(chi_k r) dr` (a DCT-I of the even part) and
/// `sin_components[k]` approximates `(1/pi) int_0^R u_odd(r) sin(chi_k r) dr`
/// (a DST-I of the odd part; index 0 and the last index are zero).
#[derive(Clone, Debug, PartialEq)]
pub struct TransformPair {
    pub chi: Vec<f64>,
    pub cos_components: Vec<Complex64>,
    pub sin_components: Vec<Complex64>,
    /// Max error of the even part rebuilt from the cosine components.
    pub even_reconstruction_error: f64,
    /// Max error of the odd part rebuilt from the sine components.
    pub odd_reconstruction_error: f64,
}

/// Splits `u` into even and odd parts about `r = 0` and transforms each.
/// Without reflection samples, `u` itself is used for both parts, i.e. its
/// even and odd extensions are transformed.
pub fn cos_sin_transform(u: &GridFunction) -> Result<TransformPair> {
    let r_max = match u.domain {
        Domain::HalfLine { r_max } => r_max,
        other => {
            return Err(Error::Grid(format!(
                "transform needs a half-line function, got {other}"
            )))
        }
    };
    let n = u.len();
    let (even, odd): (Vec<Complex64>, Vec<Complex64>) = match &u.reflection {
        Some(refl) => u
            .samples
            .iter()
            .zip(refl)
            .map(|(a, b)| ((a + b) * 0.5, (a - b) * 0.5))
            .unzip(),
        None => (u.samples.clone(), u.samples.clone()),
    };
    let h = u.spacing();
    let table = TrigTable::new(n - 1);
    let scale = h / PI;

    let dct = table.dct1(&even);
    let dst = table.dst1(&odd);
    let back_even = table.dct1(&dct);
    let back_odd = table.dst1(&dst);
    let norm = 2.0 / (n - 1) as f64;
    let even_err = even
        .iter()
        .zip(&back_even)
        .map(|(a, b)| (a - b * norm).norm())
        .fold(0.0, f64::max);
    let odd_err = odd
        .iter()
        .zip(&back_odd)
        .skip(1)
        .take(n - 2)
        .map(|(a, b)| (a - b * norm).norm())
        .fold(0.0, f64::max);

    Ok(TransformPair {
        chi: (0..n).map(|k| k as f64 * PI / r_max).collect(),
        cos_components: dct.iter().map(|z| z * scale).collect(),
        sin_components: dst.iter().map(|z| z * scale).collect(),
        even_reconstruction_error: even_err,
        odd_reconstruction_error: odd_err,
    })
}

/// `cos(pi j / m)` and `sin(pi j / m)` for `j = 0..2m`, so that transform
/// kernels are table lookups on `j k mod 2m`.
struct TrigTable {
    m: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigTable {
    fn new(m: usize) -> Self {
        let period = 2 * m;
        let angle = |j: usize| PI * j as f64 / m as f64;
        Self {
            m,
            cos: (0..period).map(|j| angle(j).cos()).collect(),
            sin: (0..period).map(|j| angle(j).sin()).collect(),
        }
    }

    /// Unnormalized DCT-I on `m + 1` points; applying it twice scales by `m/2`.
    fn dct1(&self, x: &[Complex64]) -> Vec<Complex64> {
        let m = self.m;
        let period = 2 * m;
        (0..=m)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let mut acc = (x[0] + x[m] * sign) * 0.5;
                let mut idx = k % period;
                for xj in &x[1..m] {
                    acc += xj * self.cos[idx];
                    idx = (idx + k) % period;
                }
                acc
            })
            .collect()
    }

    /// Unnormalized DST-I on interior points `1..m`; endpoints are zero.
    fn dst1(&self, x: &[Complex64]) -> Vec<Complex64> {
        let m = self.m;
        let period = 2 * m;
        (0..=m)
            .map(|k| {
                if k == 0 || k == m {
                    return Complex64::new(0.0, 0.0);
                }
                let mut acc = Complex64::new(0.0, 0.0);
                let mut idx = k % period;
                for xj in &x[1..m] {
                    acc += xj * self.sin[idx];
                    idx = (idx + k) % period;
                }
                acc
            })
            .collect()
    }
}

/// Shipped test functions.
#[derive(Clone, Copy)]
pub struct CorpusFunction {
    pub name: &'static str,
    pub on_circle: bool,
    pub f: fn(f64) -> Complex64,
    /// Member of `H_r^+` (half line only).
    pub plus: bool,
    /// Member of `H_r^-` (half line only).
    pub minus: bool,
}

impl fmt::Debug for CorpusFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CorpusFunction")
            .field("name", &self.name)
            .finish()
    }
}

impl CorpusFunction {
    pub fn sample(&self, points: usize) -> Result<GridFunction> {
        if self.on_circle {
            GridFunction::circle(points, self.f)
        } else {
            GridFunction::half_line(DEFAULT_R_MAX, points, self.f)
        }
    }

    pub fn sample_default(&self) -> Result<GridFunction> {
        self.sample(if self.on_circle {
            DEFAULT_CIRCLE_POINTS
        } else {
            DEFAULT_HALF_LINE_POINTS
        })
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `e^{-1/r}/r^2`, extended by 0 at the origin; every derivative vanishes there.
pub fn flat_at_origin(r: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        (-1.0 / r).exp() / (r * r)
    }
}

/// [`flat_at_origin`] times `e^{-r}`. The bare function decays only like
/// `1/r^2`, far above the decay bound at any practical cutoff; the extra
/// factor leaves the behaviour at the origin untouched.
pub fn flat_at_origin_damped(r: f64) -> f64 {
    flat_at_origin(r) * (-r).exp()
}

pub fn corpus() -> Vec<CorpusFunction> {
    let half = |name, f: fn(f64) -> Complex64, plus, minus| CorpusFunction {
        name,
        on_circle: false,
        f,
        plus,
        minus,
    };
    let circ = |name, f: fn(f64) -> Complex64| CorpusFunction {
        name,
        on_circle: true,
        f,
        plus: false,
        minus: false,
    };
    vec![
        half("exp(-r)", |r| real((-r).exp()), false, false),
        half("r*exp(-r)", |r| real(r * (-r).exp()), false, false),
        half("exp(-r^2)", |r| real((-r * r).exp()), true, false),
        half("r*exp(-r^2)", |r| real(r * (-r * r).exp()), false, true),
        half(
            "exp(-1/r-r)/r^2",
            |r| real(flat_at_origin_damped(r)),
            true,
            true,
        ),
        circ("cos(theta)", |t| real(t.cos())),
        circ("sin(theta)", |t| real(t.sin())),
        circ("theta*cos^2(theta/2)", |t| {
            real(t * (0.5 * t).cos().powi(2))
        }),
        circ("theta", real),
        circ("1", |_| real(1.0)),
    ]
}

/// Looks up a corpus function by name.
pub fn corpus_function(name: &str) -> Option<CorpusFunction> {
    corpus().into_iter().find(|c| c.name == name)
}

/// Which boundary form a corpus row evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormKind {
    Jz,
    Pr,
    Pr2,
}

impl FormKind {
    pub fn name(self) -> &'static str {
        match self {
            FormKind::Jz => "jz",
            FormKind::Pr => "p_r",
            FormKind::Pr2 => "p_r^2",
        }
    }

    pub fn evaluate(self, u: &GridFunction, v: &GridFunction) -> Result<BoundaryForm> {
        match self {
            FormKind::Jz => boundary_form_jz(u, v),
            FormKind::Pr => boundary_form_pr(u, v),
            FormKind::Pr2 => boundary_form_pr2(u, v),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CorpusRow {
    pub form: FormKind,
    pub u: &'static str,
    pub v: &'static str,
    pub result: BoundaryForm,
}

/// Every ordered pair of same-domain corpus functions under every applicable
/// form, at the default grids.
pub fn corpus_sweep() -> Result<Vec<CorpusRow>> {
    let funcs = corpus();
    let sampled: Vec<(CorpusFunction, GridFunction)> = funcs
        .iter()
        .map(|c| c.sample_default().map(|g| (*c, g)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (cu, gu) in &sampled {
        for (cv, gv) in &sampled {
            if cu.on_circle != cv.on_circle {
                continue;
            }
            let forms: &[FormKind] = if cu.on_circle {
                &[FormKind::Jz]
            } else {
                &[FormKind::Pr, FormKind::Pr2]
            };
            for &form in forms {
                rows.push(CorpusRow {
                    form,
                    u: cu.name,
                    v: cv.name,
                    result: form.evaluate(gu, gv)?,
                });
            }
        }
    }
    Ok(rows)
}
