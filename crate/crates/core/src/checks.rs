//! Verification suites that turn the identities of the other modules into
//! residual tables with a pass/fail verdict per row.
//!
//! Tolerance mapping: identities that hold in exact arithmetic use
//! `hermiticity`, eigenvalue bounds use `spectrum_slack`, quadrature
//! comparisons use `closed_form_vs_quadrature`, boundary forms use
//! `boundary_residual`. The truncated `[C, S]` identity always uses
//! [`CS_COMMUTATOR_TOL`].

use std::f64::consts::PI;

use crate::boundary::{corpus, corpus_sweep, membership_check, FormKind, MembershipClass};
use crate::error::{Error, Result};
use crate::linalg::{commutator, eigen_decompose, BasisTag, OperatorMatrix, ToleranceConfig};
use crate::phase::{
    build_abs_phase, build_cn_cosine, build_cn_sine, build_cos_phase, build_sg_ladder,
    cs_commutator_residual, number_phase_diagonal_check, PhaseSector, CS_COMMUTATOR_TOL,
};
use crate::quadrature::{oracle_sweep, sweep_table, OracleKernel, QuadratureConfig, SWEEP_COLUMNS};
use crate::rotator::{
    abs_theta_matrix, commutator_identity_check, parity_commutation_residual, parity_decompose,
    theta_eps_matrix, theta_matrix, AlphaExtension, RotatorTruncation, TaperSpec,
};
use crate::table::{ScanTable, Value};

pub const CHECK_COLUMNS: [&str; 5] = ["check", "case", "value", "tolerance", "pass"];

/// Taper widths for the `Theta_eps -> Theta` convergence check.
pub const TAPER_EPSILONS: [f64; 2] = [0.1, 0.01];
/// Minimum error reduction between the two taper widths.
pub const TAPER_MIN_RATIO: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckSuite {
    Rotator,
    Boundary,
    Oracle,
    Commutators,
}

impl CheckSuite {
    pub const ALL: [CheckSuite; 4] = [
        CheckSuite::Rotator,
        CheckSuite::Boundary,
        CheckSuite::Oracle,
        CheckSuite::Commutators,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckSuite::Rotator => "rotator",
            CheckSuite::Boundary => "boundary",
            CheckSuite::Oracle => "oracle",
            CheckSuite::Commutators => "commutators",
        }
    }
}

impl std::str::FromStr for CheckSuite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckSuite::ALL
            .into_iter()
            .find(|c| c.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown check suite {s:?}")))
    }
}

/// Parameters of the suites that have any.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckParams {
    pub m_max: usize,
    pub max_index: usize,
}

impl Default for CheckParams {
    fn default() -> Self {
        Self {
            m_max: 50,
            max_index: 64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckReport {
    pub table: ScanTable,
    /// One line per failing row.
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn run_check(
    suite: CheckSuite,
    params: CheckParams,
    tol: &ToleranceConfig,
) -> Result<CheckReport> {
    tol.validate()?;
    let mut report = match suite {
        CheckSuite::Rotator => check_rotator(params.m_max, tol)?,
        CheckSuite::Boundary => check_boundary(tol)?,
        CheckSuite::Oracle => check_oracle(params.max_index, tol)?,
        CheckSuite::Commutators => check_commutators(tol)?,
    };
    report.table.push_meta("check", suite.name());
    report
        .table
        .push_meta("verdict", if report.passed() { "pass" } else { "fail" });
    Ok(report)
}

struct Rows {
    table: ScanTable,
    failures: Vec<String>,
}

impl Rows {
    fn new() -> Self {
        Self {
            table: ScanTable::new(CHECK_COLUMNS.iter().map(|s| s.to_string()).collect()),
            failures: Vec::new(),
        }
    }

    /// Records `value <= tol`.
    fn at_most(&mut self, check: &str, case: impl Into<String>, value: f64, tol: f64) {
        self.push(check, case.into(), value, tol, value <= tol);
    }

    /// Records `value >= bound`.
    fn at_least(&mut self, check: &str, case: impl Into<String>, value: f64, bound: f64) {
        self.push(check, case.into(), value, bound, value >= bound);
    }

    fn push(&mut self, check: &str, case: String, value: f64, tol: f64, pass: bool) {
        if !pass {
            self.failures.push(format!(
                "{check} [{case}]: value {value:e} vs tolerance {tol:e}"
            ));
        }
        self.table
            .push_row(vec![
                Value::Text(check.into()),
                Value::Text(case),
                Value::Real(value),
                Value::Real(tol),
                Value::Text(if pass { "true" } else { "false" }.into()),
            ])
            .expect("row width matches CHECK_COLUMNS");
    }

    fn finish(self) -> CheckReport {
        CheckReport {
            table: self.table,
            failures: self.failures,
        }
    }
}

fn max_entry_diff(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            worst = worst.max((a.get(i, j) - b.get(i, j)).norm());
        }
    }
    worst
}

/// Angle-operator identities at `m_max`.
pub fn check_rotator(m_max: usize, tol: &ToleranceConfig) -> Result<CheckReport> {
    let trunc = RotatorTruncation::new(m_max)?;
    let exact = tol.hermiticity;
    let mut rows = Rows::new();
    let case = format!("m_max={m_max}");

    rows.at_most(
        "commutator_identity",
        case.clone(),
        commutator_identity_check(trunc),
        exact,
    );

    let base = theta_matrix(trunc, AlphaExtension::periodic());
    rows.at_most(
        "theta_hermitian",
        case.clone(),
        base.hermitian_residual(),
        exact,
    );
    for alpha in [0.3, 0.7] {
        let other = theta_matrix(trunc, AlphaExtension::new(alpha)?);
        rows.at_most(
            "theta_alpha_independent",
            format!("{case} alpha={alpha}"),
            max_entry_diff(&base, &other),
            exact,
        );
    }

    let abs = abs_theta_matrix(trunc);
    rows.at_most(
        "abs_theta_parity_commutation",
        case.clone(),
        parity_commutation_residual(&abs),
        exact,
    );
    let cross = match parity_decompose(&abs) {
        Ok(blocks) => blocks.cross_norm,
        Err(Error::Tolerance(_)) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    rows.at_most("abs_theta_parity_cross_block", case.clone(), cross, exact);

    let spec = eigen_decompose(&abs)?;
    rows.at_most(
        "abs_theta_spectrum_min_below_zero",
        case.clone(),
        (-spec.min()).max(0.0),
        tol.spectrum_slack,
    );
    rows.at_most(
        "abs_theta_spectrum_max_above_pi",
        case.clone(),
        (spec.max() - PI).max(0.0),
        tol.spectrum_slack,
    );

    let mut errs = Vec::new();
    for eps in TAPER_EPSILONS {
        let approx = theta_eps_matrix(trunc, TaperSpec::new(eps)?)?;
        rows.at_most(
            "theta_eps_hermitian",
            format!("{case} eps={eps}"),
            approx.hermitian_residual(),
            exact,
        );
        let err = max_entry_diff(&approx, &base);
        // |f_eps - theta| <= 2 pi on an interval of length eps, so each entry
        // moves by at most eps.
        rows.at_most(
            "theta_eps_entry_error",
            format!("{case} eps={eps}"),
            err,
            eps,
        );
        errs.push(err);
    }
    rows.at_least(
        "theta_eps_convergence_ratio",
        format!("{case} eps={}/{}", TAPER_EPSILONS[0], TAPER_EPSILONS[1]),
        errs[0] / errs[1],
        TAPER_MIN_RATIO,
    );
    let mut report = rows.finish();
    report
        .table
        .push_meta("taper_family", TaperSpec::new(TAPER_EPSILONS[0])?.family());
    report
        .table
        .push_meta("index_map", "m = -m_max..m_max stored at 0..2*m_max");
    Ok(report)
}

/// `[C, S]`, the ladder products and `[N, A]` diagonals.
pub fn check_commutators(tol: &ToleranceConfig) -> Result<CheckReport> {
    let mut rows = Rows::new();
    for dim in [4, 16, 64] {
        let comm = commutator(&build_cn_cosine(dim)?, &build_cn_sine(dim)?)?;
        rows.at_most(
            "cs_truncated_identity",
            format!("D={dim}"),
            cs_commutator_residual(&comm),
            CS_COMMUTATOR_TOL,
        );

        let e = build_sg_ladder(dim)?;
        let eed = e.mul(&e.adjoint())?;
        let ede = e.adjoint().mul(&e)?;
        let proj = |skip: usize| {
            OperatorMatrix::real_symmetric_from_fn(dim, BasisTag::Number, |i, j| {
                if i == j && i != skip {
                    1.0
                } else {
                    0.0
                }
            })
        };
        rows.at_most(
            "e_e_dagger",
            format!("D={dim}"),
            max_entry_diff(&eed, &proj(dim - 1)),
            tol.hermiticity,
        );
        rows.at_most(
            "e_dagger_e",
            format!("D={dim}"),
            max_entry_diff(&ede, &proj(0)),
            tol.hermiticity,
        );

        for sector in PhaseSector::ALL {
            let abs = build_abs_phase(sector, dim)?;
            let cos = build_cos_phase(sector, dim)?;
            rows.at_most(
                "number_abs_phase_diagonal",
                format!("{sector} D={dim}"),
                number_phase_diagonal_check(&abs)?,
                tol.hermiticity,
            );
            rows.at_most(
                "number_cos_phase_diagonal",
                format!("{sector} D={dim}"),
                number_phase_diagonal_check(&cos)?,
                tol.hermiticity,
            );
        }
    }
    Ok(rows.finish())
}

pub const BOUNDARY_COLUMNS: [&str; 11] = [
    "check",
    "form",
    "u",
    "v",
    "lhs_re",
    "lhs_im",
    "rhs_re",
    "rhs_im",
    "value",
    "tolerance",
    "pass",
];

/// Boundary forms over the corpus, the two domain witnesses and the
/// membership flags of every half-line corpus function.
pub fn check_boundary(tol: &ToleranceConfig) -> Result<CheckReport> {
    let mut table = ScanTable::new(BOUNDARY_COLUMNS.iter().map(|s| s.to_string()).collect());
    let mut failures = Vec::new();
    let funcs = corpus();
    let flags = |name: &str| {
        funcs
            .iter()
            .find(|c| c.name == name)
            .map(|c| (c.plus, c.minus))
            .unwrap_or((false, false))
    };
    let blank = || Value::Text(String::new());
    let mut push = |check: &str,
                    form: &str,
                    u: &str,
                    v: &str,
                    cells: [Value; 4],
                    value: f64,
                    bound: f64,
                    pass: bool| {
        if !pass {
            failures.push(format!("{check} {form} ({u}, {v}): {value:e} vs {bound:e}"));
        }
        let mut row = vec![
            Value::Text(check.into()),
            Value::Text(form.into()),
            Value::Text(u.into()),
            Value::Text(v.into()),
        ];
        row.extend(cells);
        row.extend([
            Value::Real(value),
            Value::Real(bound),
            Value::Text(if pass { "true" } else { "false" }.into()),
        ]);
        table
            .push_row(row)
            .expect("row width matches BOUNDARY_COLUMNS");
    };

    for r in corpus_sweep()? {
        let cells = [
            Value::Real(r.result.lhs.re),
            Value::Real(r.result.lhs.im),
            Value::Real(r.result.rhs.re),
            Value::Real(r.result.rhs.im),
        ];
        let res = r.result.residual;
        push(
            "residual",
            r.form.name(),
            r.u,
            r.v,
            cells.clone(),
            res,
            tol.boundary_residual,
            res <= tol.boundary_residual,
        );

        let (up, um) = flags(r.u);
        let (vp, vm) = flags(r.v);
        if r.form == FormKind::Pr2 && ((up && vp) || (um && vm)) {
            let rhs = r.result.rhs.norm();
            push(
                "domain_witness_zero_rhs",
                r.form.name(),
                r.u,
                r.v,
                cells.clone(),
                rhs,
                1e-8,
                rhs <= 1e-8,
            );
        }
        if r.form == FormKind::Pr && r.u == "exp(-r)" && r.v == "exp(-r)" {
            let rhs = r.result.rhs.norm();
            push(
                "p_r_nonzero_rhs",
                r.form.name(),
                r.u,
                r.v,
                cells,
                rhs,
                0.1,
                rhs >= 0.1,
            );
        }
    }

    for c in funcs.iter().filter(|c| !c.on_circle) {
        let g = c.sample_default()?;
        for (class, expected) in [
            (MembershipClass::HrPlus, c.plus),
            (MembershipClass::HrMinus, c.minus),
            (MembershipClass::A, c.plus && c.minus),
        ] {
            let report = membership_check(&g, class, tol.boundary_residual)?;
            let worst = report
                .derivative_residuals
                .iter()
                .copied()
                .fold(0.0, f64::max);
            let check = if expected { "member" } else { "non_member" };
            push(
                check,
                &class.to_string(),
                c.name,
                "",
                [blank(), blank(), blank(), blank()],
                worst,
                tol.boundary_residual,
                report.verdict == expected,
            );
        }
    }
    table.push_meta("membership_orders", "Hr+: 1,3; Hr-: 0,2; A: 0..3");
    Ok(CheckReport { table, failures })
}

/// Closed-form entries against both quadrature rules for `n, m < max_index`.
pub fn check_oracle(max_index: usize, tol: &ToleranceConfig) -> Result<CheckReport> {
    if max_index == 0 {
        return Err(Error::Range("oracle sweep needs max_index >= 1".into()));
    }
    let adaptive = QuadratureConfig::adaptive();
    let rows = oracle_sweep(max_index, &adaptive)?;
    let mut table = sweep_table(&rows);
    let mut columns: Vec<String> = SWEEP_COLUMNS.iter().map(|s| s.to_string()).collect();
    columns.push("pass".into());
    let mut out = ScanTable::new(columns);
    for (k, v) in table.meta() {
        out.push_meta(k.clone(), v.clone());
    }
    out.push_meta("kernels", OracleKernel::ALL.map(|k| k.name()).join(","));
    let mut failures = Vec::new();
    let rule_tol = 0.1 * tol.closed_form_vs_quadrature;
    for (r, mut cells) in rows
        .iter()
        .zip(std::mem::take(&mut table).rows().iter().cloned())
    {
        let pass = r.adaptive.diff <= tol.closed_form_vs_quadrature && r.rule_diff() <= rule_tol;
        if !pass {
            failures.push(format!(
                "{} {} ({}, {}): diff {:e}, rule disagreement {:e}",
                r.sector,
                r.kernel.name(),
                r.n,
                r.m,
                r.adaptive.diff,
                r.rule_diff()
            ));
        }
        cells.push(Value::Text(if pass { "true" } else { "false" }.into()));
        out.push_row(cells)?;
    }
    out.push_meta("rule_agreement_tol", format!("{rule_tol:e}"));
    Ok(CheckReport {
        table: out,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_at_defaults() {
        let tol = ToleranceConfig::default();
        let params = CheckParams {
            m_max: 10,
            max_index: 8,
        };
        for suite in CheckSuite::ALL {
            let report = run_check(suite, params, &tol).unwrap();
            assert!(report.passed(), "{}: {:?}", suite.name(), report.failures);
            assert!(!report.table.rows().is_empty());
        }
    }

    #[test]
    fn tight_tolerance_reports_failures() {
        let tol = ToleranceConfig {
            boundary_residual: 1e-30,
            ..Default::default()
        };
        let report = check_boundary(&tol).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn suite_names_parse() {
        for s in CheckSuite::ALL {
            assert_eq!(s.name().parse::<CheckSuite>().unwrap(), s);
        }
        assert!("nope".parse::<CheckSuite>().is_err());
    }
}
