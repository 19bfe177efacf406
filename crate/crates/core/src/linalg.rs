//! Dense operator matrices, state vectors, and the handful of linear-algebra
//! operations every other module leans on.
//!
//! Everything is stored as `Complex64`, including the real-symmetric phase
//! matrices, so number-basis and rotator-basis operators share one type.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-12;

/// Which discrete basis the rows and columns of a matrix refer to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasisTag {
    /// Number states `|n>`, `n = 0..dim`.
    Number,
    /// Rotator momentum states `|m>` of `J_z^alpha`, `m = -m_max..=m_max`
    /// stored at index `m + m_max`.
    Rotator { alpha: f64 },
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisTag::Number => write!(f, "number"),
            BasisTag::Rotator { alpha } => write!(f, "rotator(alpha={alpha})"),
        }
    }
}

/// Whether the Hermitian invariant was checked and holds for a matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Hermitian,
    General,
}

/// Square dense complex matrix in a tagged basis.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    entries: DMatrix<Complex64>,
    basis: BasisTag,
    hermitian_tol: f64,
    symmetry: Symmetry,
}

impl OperatorMatrix {
    /// Wraps `entries` after checking squareness and Hermiticity within `tol`.
    pub fn hermitian(entries: DMatrix<Complex64>, basis: BasisTag, tol: f64) -> Result<Self> {
        check_square(&entries)?;
        let residual = hermitian_residual(&entries);
        if residual > tol {
            return Err(Error::Hermiticity { residual, tol });
        }
        Ok(Self {
            entries,
            basis,
            hermitian_tol: tol,
            symmetry: Symmetry::Hermitian,
        })
    }

    /// Wraps `entries` with no Hermiticity claim (ladder operators, commutators).
    pub fn general(entries: DMatrix<Complex64>, basis: BasisTag) -> Result<Self> {
        check_square(&entries)?;
        Ok(Self {
            entries,
            basis,
            hermitian_tol: DEFAULT_HERMITIAN_TOL,
            symmetry: Symmetry::General,
        })
    }

    /// Builds a real symmetric matrix from an entry function evaluated on the
    /// upper triangle and mirrored, so the Hermitian invariant holds exactly.
    pub(crate) fn real_symmetric_from_fn(
        dim: usize,
        basis: BasisTag,
        mut entry: impl FnMut(usize, usize) -> f64,
    ) -> Self {
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v = Complex64::new(entry(i, j), 0.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Self {
            entries: m,
            basis,
            hermitian_tol: DEFAULT_HERMITIAN_TOL,
            symmetry: Symmetry::Hermitian,
        }
    }

    pub fn identity(dim: usize, basis: BasisTag) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
            basis,
            hermitian_tol: DEFAULT_HERMITIAN_TOL,
            symmetry: Symmetry::Hermitian,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn hermitian_tol(&self) -> f64 {
        self.hermitian_tol
    }

    pub fn with_hermitian_tol(mut self, tol: f64) -> Self {
        self.hermitian_tol = tol;
        self
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// `max |A[i][j] - conj(A[j][i])|`.
    pub fn hermitian_residual(&self) -> f64 {
        hermitian_residual(&self.entries)
    }

    /// Largest absolute imaginary part over all entries.
    pub fn max_imag(&self) -> f64 {
        self.entries.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Max-norm `max |A[i][j]|`.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-norm of `self - other`; dims and basis tags must agree.
    pub fn max_abs_diff(&self, other: &OperatorMatrix) -> Result<f64> {
        check_compatible(self, other)?;
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix {
            entries: self.entries.adjoint(),
            basis: self.basis,
            hermitian_tol: self.hermitian_tol,
            symmetry: self.symmetry,
        }
    }

    pub fn mul(&self, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        check_compatible(self, other)?;
        OperatorMatrix::general(&self.entries * &other.entries, self.basis)
    }

    /// `<u|A|v>`.
    pub fn matrix_element(&self, u: &StateVector, v: &StateVector) -> Result<Complex64> {
        if u.dim() != self.dim() || v.dim() != self.dim() {
            return Err(Error::Dimension(format!(
                "matrix element of {}x{} operator between vectors of dim {} and {}",
                self.dim(),
                self.dim(),
                u.dim(),
                v.dim()
            )));
        }
        let av = &self.entries * &v.amps;
        Ok(u.amps.dotc(&av))
    }
}

fn check_square(m: &DMatrix<Complex64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "operator must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(Error::Dimension(
            "operator dimension must be positive".into(),
        ));
    }
    Ok(())
}

fn check_compatible(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!(
            "operators have dims {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    if a.basis != b.basis {
        return Err(Error::Dimension(format!(
            "operators live in different bases: {} vs {}",
            a.basis, b.basis
        )));
    }
    Ok(())
}

fn hermitian_residual(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Complex amplitude vector in the number (or rotator) basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: nalgebra::DVector<Complex64>,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::Dimension("state vector must be non-empty".into()));
        }
        Ok(Self {
            amps: nalgebra::DVector::from_vec(amps),
        })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Number state `|n>` in a `dim`-dimensional truncation.
    pub fn basis(dim: usize, n: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::Range(format!("basis index {n} outside dim {dim}")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[n] = Complex64::new(1.0, 0.0);
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (1.0 - self.norm_sqr()).abs() <= 1e-12
    }
}

/// `sum_n conj(u[n]) v[n]`.
pub fn inner_product(u: &StateVector, v: &StateVector) -> Result<Complex64> {
    if u.dim() != v.dim() {
        return Err(Error::Dimension(format!(
            "inner product of vectors with dims {} and {}",
            u.dim(),
            v.dim()
        )));
    }
    Ok(u.amps.dotc(&v.amps))
}

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `max |V^dag V - I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let gram = self.eigenvectors.adjoint() * &self.eigenvectors;
        let n = gram.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).norm());
            }
        }
        worst
    }

    /// `V diag(lambda) V^dag`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let mut scaled = self.eigenvectors.clone();
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(lam);
        }
        scaled * self.eigenvectors.adjoint()
    }
}

/// Full eigendecomposition of a Hermitian operator.
///
/// Real symmetric inputs take the real solver path; the result is identical
/// in structure either way.
pub fn eigen_decompose(a: &OperatorMatrix) -> Result<Spectrum> {
    let residual = a.hermitian_residual();
    if residual > a.hermitian_tol() {
        return Err(Error::Hermiticity {
            residual,
            tol: a.hermitian_tol(),
        });
    }
    let n = a.dim();
    let (values, vectors): (Vec<f64>, DMatrix<Complex64>) = if a.max_imag() == 0.0 {
        let real = DMatrix::<f64>::from_fn(n, n, |i, j| 0.5 * (a.get(i, j).re + a.get(j, i).re));
        let eig = SymmetricEigen::new(real);
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
        )
    } else {
        let sym =
            DMatrix::<Complex64>::from_fn(n, n, |i, j| 0.5 * (a.get(i, j) + a.get(j, i).conj()));
        let eig = SymmetricEigen::new(sym);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, k| vectors[(i, order[k])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// `AB - BA`. The result carries no Hermiticity claim; for Hermitian inputs
/// it is anti-Hermitian.
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_compatible(a, b)?;
    let ab = &a.entries * &b.entries;
    let ba = &b.entries * &a.entries;
    OperatorMatrix::general(ab - ba, a.basis)
}

/// Number operator `diag(0, 1, ..., dim-1)`.
pub fn number_operator(dim: usize) -> OperatorMatrix {
    OperatorMatrix::real_symmetric_from_fn(dim, BasisTag::Number, |i, j| {
        if i == j {
            i as f64
        } else {
            0.0
        }
    })
}

/// Tolerances shared by every verification in the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceConfig {
    pub closed_form_vs_quadrature: f64,
    pub hermiticity: f64,
    pub spectrum_slack: f64,
    pub boundary_residual: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            closed_form_vs_quadrature: 1e-10,
            hermiticity: 1e-12,
            spectrum_slack: 1e-9,
            boundary_residual: 1e-6,
        }
    }
}

impl ToleranceConfig {
    pub const KEYS: [&'static str; 4] = [
        "closed_form_vs_quadrature",
        "hermiticity",
        "spectrum_slack",
        "boundary_residual",
    ];

    pub fn validate(&self) -> Result<()> {
        for (key, value) in self.fields() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Config(format!(
                    "tolerance {key} must be strictly positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }

    pub fn fields(&self) -> [(&'static str, f64); 4] {
        [
            ("closed_form_vs_quadrature", self.closed_form_vs_quadrature),
            ("hermiticity", self.hermiticity),
            ("spectrum_slack", self.spectrum_slack),
            ("boundary_residual", self.boundary_residual),
        ]
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key.trim() {
            "closed_form_vs_quadrature" => &mut self.closed_form_vs_quadrature,
            "hermiticity" => &mut self.hermiticity,
            "spectrum_slack" => &mut self.spectrum_slack,
            "boundary_residual" => &mut self.boundary_residual,
            other => return Err(Error::Config(format!("unknown tolerance key {other:?}"))),
        };
        *slot = value;
        Ok(())
    }

    /// Applies a comma-separated `key=value` list, e.g.
    /// `hermiticity=1e-10,boundary_residual=1e-5`.
    pub fn apply_overrides(&mut self, spec: &str) -> Result<()> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got {item:?}")))?;
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Config(format!("tolerance {key} is not a number: {value:?}"))
            })?;
            self.set(key, value)?;
        }
        self.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(rows: &[&[f64]]) -> DMatrix<Complex64> {
        let n = rows.len();
        DMatrix::from_fn(n, rows[0].len(), |i, j| c(rows[i][j], 0.0))
    }

    #[test]
    fn inner_product_of_basis_states() {
        let e0 = StateVector::basis(4, 0).unwrap();
        let e1 = StateVector::basis(4, 1).unwrap();
        assert_eq!(inner_product(&e0, &e0).unwrap(), c(1.0, 0.0));
        assert_eq!(inner_product(&e0, &e1).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn inner_product_conjugates_left_argument() {
        let u = StateVector::new(vec![c(0.0, 1.0)]).unwrap();
        let v = StateVector::new(vec![c(1.0, 0.0)]).unwrap();
        assert_eq!(inner_product(&u, &v).unwrap(), c(0.0, -1.0));
    }

    #[test]
    fn inner_product_rejects_mismatched_dims() {
        let u = StateVector::basis(3, 0).unwrap();
        let v = StateVector::basis(4, 0).unwrap();
        assert!(matches!(inner_product(&u, &v), Err(Error::Dimension(_))));
    }

    #[test]
    fn eigen_decompose_trivial_cases() {
        let a = OperatorMatrix::hermitian(real(&[&[PI / 2.0]]), BasisTag::Number, 1e-12).unwrap();
        let s = eigen_decompose(&a).unwrap();
        assert_eq!(s.eigenvalues, vec![PI / 2.0]);

        let b =
            OperatorMatrix::hermitian(real(&[&[PI, 0.0], &[0.0, 0.0]]), BasisTag::Number, 1e-12)
                .unwrap();
        let s = eigen_decompose(&b).unwrap();
        assert!((s.eigenvalues[0] - 0.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] - PI).abs() < 1e-15);
    }

    #[test]
    fn eigen_decompose_complex_hermitian() {
        // Pauli Y: eigenvalues -1, +1.
        let y =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let a = OperatorMatrix::hermitian(y, BasisTag::Number, 1e-12).unwrap();
        let s = eigen_decompose(&a).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(s.orthonormality_residual() < 1e-14);
        let diff = (s.reconstruct() - a.entries())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-14);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let m = real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            OperatorMatrix::hermitian(m.clone(), BasisTag::Number, 1e-12),
            Err(Error::Hermiticity { .. })
        ));
        let g = OperatorMatrix::general(m, BasisTag::Number).unwrap();
        assert!(matches!(
            eigen_decompose(&g),
            Err(Error::Hermiticity { .. })
        ));
    }

    #[test]
    fn non_square_is_a_dimension_error() {
        let m = DMatrix::<Complex64>::zeros(2, 3);
        assert!(matches!(
            OperatorMatrix::general(m, BasisTag::Number),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn commutator_hand_computed() {
        let a =
            OperatorMatrix::hermitian(real(&[&[0.0, 0.0], &[0.0, 1.0]]), BasisTag::Number, 1e-12)
                .unwrap();
        let b =
            OperatorMatrix::hermitian(real(&[&[0.0, 1.0], &[1.0, 0.0]]), BasisTag::Number, 1e-12)
                .unwrap();
        let comm = commutator(&a, &b).unwrap();
        let expected = real(&[&[0.0, -1.0], &[1.0, 0.0]]);
        // AB = [[0,0],[1,0]], BA = [[0,1],[0,0]].
        assert_eq!(comm.entries(), &expected);
        assert_eq!(commutator(&a, &a).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn commutator_rejects_basis_mismatch() {
        let a = OperatorMatrix::identity(3, BasisTag::Number);
        let b = OperatorMatrix::identity(3, BasisTag::Rotator { alpha: 0.0 });
        assert!(commutator(&a, &b).is_err());
        let c3 = OperatorMatrix::identity(4, BasisTag::Number);
        assert!(commutator(&a, &c3).is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let mut t = ToleranceConfig::default();
        t.apply_overrides("hermiticity=1e-10, boundary_residual=2e-6")
            .unwrap();
        assert_eq!(t.hermiticity, 1e-10);
        assert_eq!(t.boundary_residual, 2e-6);
        assert!(t.clone().apply_overrides("nope=1").is_err());
        assert!(t.clone().apply_overrides("hermiticity=0").is_err());
        assert!(t.clone().apply_overrides("hermiticity").is_err());
    }
}
