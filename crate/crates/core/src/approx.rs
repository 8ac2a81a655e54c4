//! Approximating multipoint problems, convergence sweeps, error constants and the
//! perturbed-right-hand-side bound checks.
//!
//! For a problem `(L, B)` the `k`-th approximating problem replaces every coefficient
//! by a piecewise-constant (or piecewise-linear) function on `k` equal cells and the
//! boundary operator by [`multipointify`]. The right-hand sides are left untouched.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::boundary::{
    default_probes, multipointify_with, norm_lower_bound, norm_upper_bound, sequence_norm_bound, BoundaryOperator,
};
use crate::bvp::{solve, BvpProblem, BvpSolution};
use crate::error::{Error, Result};
use crate::funcspace::{
    norm_cl, norm_w1r, vector_norm, PiecewisePoly, Poly, PolyMatrix, PolyVector, SampledJet, Side,
};
use crate::stieltjes::{cell_edge, MeasureDiscretizer, MidpointDiscretizer};
use crate::{CMatrix, CVector, C64};

/// A dense family of simple functions used to approximate coefficients in `L¹`.
pub trait CoefficientApproximator: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// Approximation on `k` equal cells of the domain.
    fn approximate(&self, p: &PiecewisePoly, k: usize) -> Result<PiecewisePoly>;

    fn approximate_matrix(&self, a: &PolyMatrix, k: usize) -> Result<PolyMatrix> {
        let entries = a
            .entries()
            .iter()
            .map(|p| self.approximate(p, k))
            .collect::<Result<Vec<_>>>()?;
        PolyMatrix::new(a.rows(), a.cols(), entries)
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("number of cells k must be at least 1".into()));
    }
    Ok(())
}

/// Cell means: `A_k = (1/|Δ_j|) ∫_{Δ_j} A` on each cell `Δ_j`.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanApproximator;

impl CoefficientApproximator for MeanApproximator {
    fn name(&self) -> &'static str {
        "mean"
    }

    fn description(&self) -> &'static str {
        "piecewise constant, cell means"
    }

    fn approximate(&self, p: &PiecewisePoly, k: usize) -> Result<PiecewisePoly> {
        check_k(k)?;
        let (a, b) = p.domain();
        let breaks: Vec<f64> = (0..=k).map(|j| cell_edge(a, b, k, j)).collect();
        let pieces = breaks
            .windows(2)
            .map(|w| {
                let (lo, hi) = (w[0], w[1]);
                // a single constant piece covering the cell is kept bit-for-bit
                let mut overlapping = p
                    .breakpoints()
                    .windows(2)
                    .zip(p.pieces())
                    .filter(|(bw, _)| bw[1] > lo && bw[0] < hi);
                match (overlapping.next(), overlapping.next()) {
                    (Some((_, piece)), None) if piece.degree() == 0 => piece.clone().trimmed(),
                    _ => Poly::constant(p.mean(lo, hi)),
                }
            })
            .collect();
        Ok(PiecewisePoly::new(breaks, pieces)?.simplified())
    }
}

/// Continuous piecewise-linear interpolation at the cell edges.
#[derive(Debug, Clone, Copy, Default)]
pub struct PolygonalApproximator;

impl CoefficientApproximator for PolygonalApproximator {
    fn name(&self) -> &'static str {
        "polygonal"
    }

    fn description(&self) -> &'static str {
        "continuous piecewise linear, interpolating at cell edges"
    }

    fn approximate(&self, p: &PiecewisePoly, k: usize) -> Result<PiecewisePoly> {
        check_k(k)?;
        let (a, b) = p.domain();
        let breaks: Vec<f64> = (0..=k).map(|j| cell_edge(a, b, k, j)).collect();
        let vals: Vec<C64> = breaks
            .iter()
            .map(|&t| p.eval_side(t, if t == b { Side::Left } else { Side::Right }))
            .collect();
        let pieces = (0..k)
            .map(|j| {
                let (t0, t1) = (breaks[j], breaks[j + 1]);
                let slope = (vals[j + 1] - vals[j]) / (t1 - t0);
                Poly::new(vec![vals[j] - slope * t0, slope]).trimmed()
            })
            .collect();
        Ok(PiecewisePoly::new(breaks, pieces)?.simplified())
    }
}

/// Strategy pair defining the approximating sequence.
#[derive(Debug, Clone)]
pub struct ApproximationScheme {
    pub discretizer: Arc<dyn MeasureDiscretizer>,
    pub coefficients: Arc<dyn CoefficientApproximator>,
}

impl Default for ApproximationScheme {
    fn default() -> Self {
        Self {
            discretizer: Arc::new(MidpointDiscretizer),
            coefficients: Arc::new(MeanApproximator),
        }
    }
}

/// Cell-mean approximation of a coefficient matrix on `k` cells.
pub fn approximate_coefficients(a: &PolyMatrix, k: usize) -> Result<PolyMatrix> {
    MeanApproximator.approximate_matrix(a, k)
}

pub fn build_multipoint_problem(p: &BvpProblem, k: usize) -> Result<BvpProblem> {
    build_multipoint_problem_with(p, k, &ApproximationScheme::default())
}

/// The `k`-th approximating problem. A multipoint boundary operator is kept as is.
pub fn build_multipoint_problem_with(p: &BvpProblem, k: usize, scheme: &ApproximationScheme) -> Result<BvpProblem> {
    check_k(k)?;
    let coefficients = p
        .coefficients()
        .iter()
        .map(|a| scheme.coefficients.approximate_matrix(a, k))
        .collect::<Result<Vec<_>>>()?;
    let boundary = match p.boundary() {
        BoundaryOperator::General(g) => multipointify_with(g, k, scheme.discretizer.as_ref())?.into(),
        mp @ BoundaryOperator::Multipoint(_) => mp.clone(),
    };
    BvpProblem::new(*p.grid(), coefficients, p.rhs().clone(), p.q().clone(), boundary)
}

/// Constants of the error estimate
/// `‖x_k - y‖_(r-1) < κ σ ε` with `κ = (c₁ + c₂) λ + c₁ c₂ + 1`.
///
/// `lambda_hat = 1 / (probe lower bound of ‖B‖) ≥ λ` and `sigma_hat ≥ sup_k ‖B_k‖`,
/// so `kappa_hat · sigma_hat` over-estimates the exact `κ σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorConstants {
    pub c1: f64,
    pub c2: f64,
    pub lambda_hat: f64,
    pub kappa_hat: f64,
    pub sigma_hat: f64,
}

/// `b - a + ‖A_{r-1}‖_1` for `r ≥ 2`, `‖A_0‖_1` for `r = 1`.
fn growth_factor(p: &BvpProblem) -> f64 {
    let (a, b) = p.interval();
    let top = p.coefficients()[p.r() - 1].norm_l1();
    if p.r() == 1 {
        top
    } else {
        b - a + top
    }
}

/// Uniform bound on `‖B_k‖` for the approximating operators.
fn sequence_sigma(p: &BvpProblem) -> f64 {
    match p.boundary() {
        BoundaryOperator::General(g) => sequence_norm_bound(g),
        BoundaryOperator::Multipoint(mp) => norm_upper_bound(mp),
    }
}

fn constants_from(p: &BvpProblem, s: &BvpSolution) -> Result<ErrorConstants> {
    let c1 = 1.0 + s.stability();
    let c2 = 2.0 + s.fundamental_norm * s.inverse_fundamental_norm * growth_factor(p);
    let probes = default_probes(p.r(), p.m(), p.grid());
    let norm_lb = norm_lower_bound(p.boundary(), &probes)?;
    if !(norm_lb > 0.0) {
        return Err(Error::Precondition("boundary operator vanishes on every probe".into()));
    }
    let lambda_hat = 1.0 / norm_lb;
    Ok(ErrorConstants {
        c1,
        c2,
        lambda_hat,
        kappa_hat: (c1 + c2) * lambda_hat + c1 * c2 + 1.0,
        sigma_hat: sequence_sigma(p),
    })
}

pub fn remark3_constants(p: &BvpProblem) -> Result<ErrorConstants> {
    constants_from(p, &solve(p)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    pub solvable: bool,
    /// `‖y_k - y‖_{r,1}`.
    pub err_w1r: f64,
    /// `‖y_k - y‖_(r-1)`.
    pub err_cr1: f64,
    /// `|det [T_k V_k]|`.
    pub det: f64,
    /// `‖B_k‖` upper bound.
    pub sigma_hat: f64,
    /// `‖V_k‖_C · ‖[T_k V_k]⁻¹‖`.
    pub stability: f64,
    /// `‖V_k‖_C · ‖V_k⁻¹‖_C · (b - a + ‖A_{r-1,k}‖_1)` (`‖A_{0,k}‖_1` when `r = 1`).
    pub growth: f64,
    /// `stability ≤ c₁` and `growth ≤ c₂ - 1`.
    pub bound_holds: bool,
    /// `max |[T_k V_k] - [T V]|` over entries.
    pub char_diff: f64,
}

impl SweepRow {
    fn unsolvable(k: usize, det: f64) -> Self {
        Self {
            k,
            solvable: false,
            err_w1r: f64::NAN,
            err_cr1: f64::NAN,
            det,
            sigma_hat: f64::NAN,
            stability: f64::NAN,
            growth: f64::NAN,
            bound_holds: false,
            char_diff: f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceInfo {
    pub det: f64,
    pub condition: f64,
    pub ode_residual: f64,
    pub boundary_residual: f64,
    pub norm_w1r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationReport {
    pub rows: Vec<SweepRow>,
    pub constants: ErrorConstants,
    pub reference: ReferenceInfo,
    pub discretizer: String,
    pub coefficient_approximator: String,
    /// First swept `k` from which every problem is uniquely solvable.
    pub rho_solvable: Option<usize>,
    /// First swept `k` from which the stability bounds hold.
    pub rho_stable: Option<usize>,
}

/// Smallest `rows[i].k` such that `pred` holds on `rows[i..]`.
fn first_k_from(rows: &[SweepRow], pred: impl Fn(&SweepRow) -> bool) -> Option<usize> {
    let tail = rows.iter().rev().take_while(|r| pred(r)).count();
    (tail > 0).then(|| rows[rows.len() - tail].k)
}

fn normalize_ks(ks: &[usize]) -> Result<Vec<usize>> {
    if ks.is_empty() {
        return Err(Error::InvalidArgument("empty list of k values".into()));
    }
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    check_k(ks[0])?;
    Ok(ks)
}

fn max_entry_diff(x: &CMatrix, y: &CMatrix) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

/// Solves the `k`-th problem; `Ok(Err(det))` marks a numerically singular problem.
fn solve_row(p: &BvpProblem, k: usize, scheme: &ApproximationScheme) -> Result<std::result::Result<(BvpProblem, BvpSolution), f64>> {
    let pk = build_multipoint_problem_with(p, k, scheme)?;
    match solve(&pk) {
        Ok(s) => Ok(Ok((pk, s))),
        Err(Error::NotUniquelySolvable { det, .. }) => Ok(Err(det)),
        Err(e) => Err(e),
    }
}

fn sweep_row(
    p: &BvpProblem,
    k: usize,
    scheme: &ApproximationScheme,
    reference: &BvpSolution,
    constants: &ErrorConstants,
) -> Result<SweepRow> {
    let (pk, s) = match solve_row(p, k, scheme)? {
        Ok(x) => x,
        Err(det) => return Ok(SweepRow::unsolvable(k, det)),
    };
    let diff = s.y.sub(&reference.y)?;
    let sigma_hat = match pk.boundary() {
        BoundaryOperator::Multipoint(mp) => norm_upper_bound(mp),
        BoundaryOperator::General(_) => unreachable!("approximating problems are multipoint"),
    };
    let stability = s.stability();
    let growth = s.fundamental_norm * s.inverse_fundamental_norm * growth_factor(&pk);
    Ok(SweepRow {
        k,
        solvable: true,
        err_w1r: norm_w1r(&diff),
        err_cr1: norm_cl(&diff, p.r() - 1)?,
        det: s.det.norm(),
        sigma_hat,
        stability,
        growth,
        bound_holds: stability <= constants.c1 && growth <= constants.c2 - 1.0,
        char_diff: max_entry_diff(&s.char_matrix, &reference.char_matrix),
    })
}

pub fn sweep(p: &BvpProblem, ks: &[usize]) -> Result<ApproximationReport> {
    sweep_with(p, ks, &ApproximationScheme::default())
}

/// Solves the reference problem and every approximating problem (in parallel over `k`).
/// Singular approximating problems are recorded as unsolvable rows.
pub fn sweep_with(p: &BvpProblem, ks: &[usize], scheme: &ApproximationScheme) -> Result<ApproximationReport> {
    let ks = normalize_ks(ks)?;
    let reference = solve(p)?;
    let constants = constants_from(p, &reference)?;
    let rows = ks
        .par_iter()
        .map(|&k| sweep_row(p, k, scheme, &reference, &constants))
        .collect::<Result<Vec<_>>>()?;
    Ok(ApproximationReport {
        rho_solvable: first_k_from(&rows, |r| r.solvable),
        rho_stable: first_k_from(&rows, |r| r.bound_holds),
        reference: ReferenceInfo {
            det: reference.det.norm(),
            condition: reference.condition,
            ode_residual: reference.ode_residual,
            boundary_residual: reference.boundary_residual,
            norm_w1r: norm_w1r(&reference.y),
        },
        constants,
        discretizer: scheme.discretizer.name().to_string(),
        coefficient_approximator: scheme.coefficients.name().to_string(),
        rows,
    })
}

/// Right-hand sides `(f_k, q_k)` for the `k`-th perturbed problem.
pub trait PerturbationGenerator: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    fn perturb(&self, p: &BvpProblem, k: usize, eps: f64) -> Result<(PolyVector, CVector)>;
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be positive and finite, got {eps}")));
    }
    Ok(())
}

/// Zero-mean sawtooth with `k` teeth in every component of `f`, scaled so that
/// `‖F_k - F‖_C = ε/2` while `‖f_k - f‖_1 = kε`, plus `q` shifted by `ε/(2rm)` per entry.
#[derive(Debug, Clone, Copy, Default)]
pub struct SawtoothPerturbation;

impl PerturbationGenerator for SawtoothPerturbation {
    fn name(&self) -> &'static str {
        "sawtooth"
    }

    fn description(&self) -> &'static str {
        "zero-mean sawtooth: small primitive, large L1 norm"
    }

    fn perturb(&self, p: &BvpProblem, k: usize, eps: f64) -> Result<(PolyVector, CVector)> {
        check_k(k)?;
        check_eps(eps)?;
        let (a, b) = p.interval();
        let m = p.m();
        let period = (b - a) / k as f64;
        let amp = 2.0 * eps / (m as f64 * period);
        let breaks: Vec<f64> = (0..=k).map(|j| cell_edge(a, b, k, j)).collect();
        let pieces = breaks
            .windows(2)
            .map(|w| {
                let slope = 2.0 * amp / (w[1] - w[0]);
                Poly::from_real(&[-amp - slope * w[0], slope])
            })
            .collect();
        let saw = PiecewisePoly::new(breaks, pieces)?;
        let f = p.rhs().map(|e| e.add(&saw));
        let shift = C64::new(eps / (2.0 * (p.r() * m) as f64), 0.0);
        Ok((f, p.q().add_scalar(shift)))
    }
}

/// `f_k = f + ε / (2 m (b - a))` in every component, `q_k = q`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantShiftPerturbation;

impl PerturbationGenerator for ConstantShiftPerturbation {
    fn name(&self) -> &'static str {
        "constant-shift"
    }

    fn description(&self) -> &'static str {
        "constant shift of f with L1 norm eps/2"
    }

    fn perturb(&self, p: &BvpProblem, k: usize, eps: f64) -> Result<(PolyVector, CVector)> {
        check_k(k)?;
        check_eps(eps)?;
        let (a, b) = p.interval();
        let shift = PiecewisePoly::constant(a, b, C64::new(eps / (2.0 * p.m() as f64 * (b - a)), 0.0));
        Ok((p.rhs().map(|e| e.add(&shift)), p.q().clone()))
    }
}

/// `f_k = f`, `q_k = q`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoPerturbation;

impl PerturbationGenerator for NoPerturbation {
    fn name(&self) -> &'static str {
        "none"
    }

    fn description(&self) -> &'static str {
        "unperturbed right-hand sides"
    }

    fn perturb(&self, p: &BvpProblem, k: usize, eps: f64) -> Result<(PolyVector, CVector)> {
        check_k(k)?;
        check_eps(eps)?;
        Ok((p.rhs().clone(), p.q().clone()))
    }
}

/// `max_t ‖∫_a^t (g - f)‖` over the grid nodes, summed over components.
fn primitive_gap(p: &BvpProblem, g: &PolyVector) -> Result<f64> {
    let diff = g.sub(p.rhs())?;
    let grid = p.grid();
    let mut total = 0.0;
    for e in diff.entries() {
        let mut acc = C64::new(0.0, 0.0);
        let mut worst: f64 = 0.0;
        for i in 0..grid.n() {
            acc += e.integrate(grid.node(i), grid.node(i + 1));
            worst = worst.max(acc.norm());
        }
        total += worst;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    /// `‖f_k - f‖_1 < ε`, `‖q_k - q‖ < ε` ⇒ `‖x_k - y‖_{r,1} < κ ε`.
    Two,
    /// `‖F_k - F‖_C < ε`, `‖q_k - q‖ < ε` ⇒ `‖x_k - y‖_(r-1) < κ σ ε`.
    Three,
}

impl Theorem {
    pub fn number(self) -> u8 {
        match self {
            Theorem::Two => 2,
            Theorem::Three => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub k: usize,
    pub solvable: bool,
    /// Stability bounds of the unperturbed `k`-th problem hold.
    pub stable: bool,
    /// `‖y_k - y‖` in the theorem's norm.
    pub approximation_error: f64,
    /// `‖x_k - y‖` in the theorem's norm.
    pub error: f64,
    /// `error / ε`.
    pub ratio: f64,
    pub f_l1_gap: f64,
    pub f_primitive_gap: f64,
    pub q_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub theorem: Theorem,
    pub eps: f64,
    pub constants: ErrorConstants,
    pub rows: Vec<CheckRow>,
    /// First swept `k` from which the approximation threshold holds.
    pub rho: Option<usize>,
    /// `κ̂ σ̂ ε` (third theorem only).
    pub bound: Option<f64>,
    /// Largest `error / ε` over `k ≥ ρ`.
    pub sup_ratio: f64,
    /// Ratios finite without growth in `k` (second theorem).
    pub bounded: bool,
    /// Any row with `‖f_k - f‖_1 ≥ ε`.
    pub l1_condition_violated: bool,
    pub passed: bool,
}

impl CheckReport {
    /// Rows with `k ≥ ρ`.
    pub fn certified_rows(&self) -> &[CheckRow] {
        match self.rho {
            Some(rho) => {
                let start = self.rows.iter().position(|r| r.k >= rho).unwrap_or(self.rows.len());
                &self.rows[start..]
            }
            None => &[],
        }
    }
}

fn theorem_norm(theorem: Theorem, r: usize, y: &SampledJet) -> Result<f64> {
    match theorem {
        Theorem::Two => Ok(norm_w1r(y)),
        Theorem::Three => norm_cl(y, r - 1),
    }
}

/// Runs the perturbed-right-hand-side check for `rhs[i]` at `ks[i]`.
///
/// Each `(f_k, q_k)` must satisfy the theorem's ε-condition, else
/// [`Error::Precondition`]. `ρ` is the first swept `k` from which all unperturbed
/// problems are solvable, stable and within `ε` (second theorem, `W^r_1` norm) or
/// `σ̂ ε` (third theorem, `C^(r-1)` norm) of the reference solution.
pub fn run_check(
    theorem: Theorem,
    p: &BvpProblem,
    ks: &[usize],
    rhs: &[(PolyVector, CVector)],
    eps: f64,
    scheme: &ApproximationScheme,
) -> Result<CheckReport> {
    check_eps(eps)?;
    if ks.len() != rhs.len() {
        return Err(Error::dims("right-hand side sequence", ks.len(), rhs.len()));
    }
    if ks.is_empty() {
        return Err(Error::InvalidArgument("empty list of k values".into()));
    }
    if ks.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("k values must be strictly increasing".into()));
    }
    check_k(ks[0])?;

    let mut gaps = Vec::with_capacity(ks.len());
    for (&k, (f, q)) in ks.iter().zip(rhs) {
        if f.dim() != p.m() {
            return Err(Error::dims("perturbed f", p.m(), f.dim()));
        }
        if q.len() != p.q().len() {
            return Err(Error::dims("perturbed q", p.q().len(), q.len()));
        }
        let f_l1 = f.sub(p.rhs())?.norm_l1();
        let f_prim = primitive_gap(p, f)?;
        let q_gap = vector_norm(&(q - p.q()));
        let f_gap = match theorem {
            Theorem::Two => f_l1,
            Theorem::Three => f_prim,
        };
        if !(f_gap < eps && q_gap < eps) {
            return Err(Error::Precondition(format!(
                "k = {k}: perturbation ({f_gap:e}, {q_gap:e}) violates the eps = {eps:e} condition"
            )));
        }
        gaps.push((f_l1, f_prim, q_gap));
    }

    let reference = solve(p)?;
    let constants = constants_from(p, &reference)?;
    let r = p.r();
    let rows = ks
        .par_iter()
        .zip(rhs.par_iter())
        .zip(gaps.par_iter())
        .map(|((&k, (f, q)), &(f_l1_gap, f_primitive_gap, q_gap))| {
            let row = sweep_row(p, k, scheme, &reference, &constants)?;
            let mut out = CheckRow {
                k,
                solvable: row.solvable,
                stable: row.bound_holds,
                approximation_error: f64::NAN,
                error: f64::NAN,
                ratio: f64::NAN,
                f_l1_gap,
                f_primitive_gap,
                q_gap,
            };
            if !row.solvable {
                return Ok(out);
            }
            out.approximation_error = match theorem {
                Theorem::Two => row.err_w1r,
                Theorem::Three => row.err_cr1,
            };
            let pk = build_multipoint_problem_with(p, k, scheme)?.with_rhs(f.clone(), q.clone())?;
            match solve(&pk) {
                Ok(x) => {
                    out.error = theorem_norm(theorem, r, &x.y.sub(&reference.y)?)?;
                    out.ratio = out.error / eps;
                }
                Err(Error::NotUniquelySolvable { .. }) => out.solvable = false,
                Err(e) => return Err(e),
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let threshold = match theorem {
        Theorem::Two => eps,
        Theorem::Three => constants.sigma_hat * eps,
    };
    let rho = ks
        .iter()
        .zip(&rows)
        .rev()
        .take_while(|(_, row)| row.solvable && row.stable && row.approximation_error < threshold)
        .last()
        .map(|(&k, _)| k);

    let bound = (theorem == Theorem::Three).then(|| constants.kappa_hat * constants.sigma_hat * eps);
    let mut report = CheckReport {
        theorem,
        eps,
        constants,
        rows,
        rho,
        bound,
        sup_ratio: f64::NAN,
        bounded: false,
        l1_condition_violated: false,
        passed: false,
    };
    report.l1_condition_violated = report.rows.iter().any(|r| r.f_l1_gap >= eps);
    let certified = report.certified_rows().to_vec();
    let ratios: Vec<f64> = certified.iter().map(|r| r.ratio).collect();
    if !ratios.is_empty() {
        report.sup_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let half = ratios.len() / 2;
        let early = ratios[..half.max(1)].iter().copied().fold(0.0, f64::max);
        let late = ratios[half..].iter().copied().fold(0.0, f64::max);
        report.bounded = ratios.iter().all(|x| x.is_finite()) && late <= 2.0 * early.max(f64::MIN_POSITIVE);
    }
    report.passed = !certified.is_empty()
        && match report.bound {
            Some(bound) => certified.iter().all(|r| r.error < bound),
            None => report.bounded,
        };
    Ok(report)
}

pub fn theorem2_check(p: &BvpProblem, ks: &[usize], rhs: &[(PolyVector, CVector)], eps: f64) -> Result<CheckReport> {
    run_check(Theorem::Two, p, ks, rhs, eps, &ApproximationScheme::default())
}

pub fn theorem3_check(p: &BvpProblem, ks: &[usize], rhs: &[(PolyVector, CVector)], eps: f64) -> Result<CheckReport> {
    run_check(Theorem::Three, p, ks, rhs, eps, &ApproximationScheme::default())
}

/// Builds the right-hand sides with `generator` and runs the check.
pub fn check_with_generator(
    theorem: Theorem,
    p: &BvpProblem,
    ks: &[usize],
    eps: f64,
    generator: &dyn PerturbationGenerator,
    scheme: &ApproximationScheme,
) -> Result<CheckReport> {
    let ks = normalize_ks(ks)?;
    let rhs = ks
        .iter()
        .map(|&k| generator.perturb(p, k, eps))
        .collect::<Result<Vec<_>>>()?;
    run_check(theorem, p, &ks, &rhs, eps, scheme)
}
