//! Boundary operators `B : (C^(r-1))^m → ℂ^{rm}`.
//!
//! A [`GeneralBoundaryOperator`] is stored in the canonical form
//!
//! ```text
//! B y = Σ_{l=0}^{r-2} α_l y^(l)(a) + ∫_a^b dΦ(t) y^(r-1)(t)
//! ```
//!
//! and a [`MultipointBoundaryOperator`] as a finite list of `β · y^(l)(t_j)` terms.
//! Both lift to operators on `v = col(y, y', ..., y^(r-1))`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::funcspace::{matrix_norm, norm_cl, vector_norm, Grid, Poly, SampledFn, SampledJet};
use crate::linode::MatrixTrajectory;
use crate::stieltjes::{MatrixMeasure, MeasureDiscretizer, MidpointDiscretizer, ATOM_MERGE_TOL};
use crate::{CMatrix, CVector, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralBoundaryOperator {
    r: usize,
    m: usize,
    alphas: Vec<CMatrix>,
    phi: MatrixMeasure,
}

impl GeneralBoundaryOperator {
    /// `alphas` holds `α_0 .. α_{r-2}` (empty for `r = 1`), each `rm × m`; `phi` is `rm × m`.
    pub fn new(r: usize, m: usize, alphas: Vec<CMatrix>, phi: MatrixMeasure) -> Result<Self> {
        if r == 0 || m == 0 {
            return Err(Error::InvalidArgument("order and dimension must be positive".into()));
        }
        if alphas.len() != r - 1 {
            return Err(Error::dims("alpha matrix count", r - 1, alphas.len()));
        }
        for al in &alphas {
            if al.shape() != (r * m, m) {
                return Err(Error::dims("alpha matrix rows", r * m, al.nrows()));
            }
            if al.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::NonFinite("alpha matrix".into()));
            }
        }
        if phi.rows() != r * m {
            return Err(Error::dims("Phi rows", r * m, phi.rows()));
        }
        if phi.cols() != m {
            return Err(Error::dims("Phi columns", m, phi.cols()));
        }
        Ok(Self { r, m, alphas, phi })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn alphas(&self) -> &[CMatrix] {
        &self.alphas
    }

    pub fn phi(&self) -> &MatrixMeasure {
        &self.phi
    }

    pub fn interval(&self) -> (f64, f64) {
        self.phi.entries()[0].interval()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipointTerm {
    pub node: f64,
    pub order: usize,
    pub beta: CMatrix,
}

impl MultipointTerm {
    pub fn new(node: f64, order: usize, beta: CMatrix) -> Self {
        Self { node, order, beta }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultipointBoundaryOperator {
    r: usize,
    m: usize,
    a: f64,
    b: f64,
    terms: Vec<MultipointTerm>,
}

impl MultipointBoundaryOperator {
    /// Validates the terms, merges those sharing `(node, order)` and sorts by `(order, node)`.
    pub fn new(r: usize, m: usize, a: f64, b: f64, terms: Vec<MultipointTerm>) -> Result<Self> {
        if r == 0 || m == 0 {
            return Err(Error::InvalidArgument("order and dimension must be positive".into()));
        }
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Interval { a, b });
        }
        for term in &terms {
            if !term.node.is_finite() || term.node < a || term.node > b {
                return Err(Error::InvalidArgument(format!(
                    "multipoint node {} outside [{a}, {b}]",
                    term.node
                )));
            }
            if term.order >= r {
                return Err(Error::OrderOutOfRange {
                    requested: term.order,
                    available: r - 1,
                });
            }
            if term.beta.shape() != (r * m, m) {
                return Err(Error::dims("beta matrix rows", r * m, term.beta.nrows()));
            }
            if term.beta.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::NonFinite("beta matrix".into()));
            }
        }
        let tol = (b - a) * ATOM_MERGE_TOL;
        let mut sorted = terms;
        sorted.sort_by(|x, y| x.order.cmp(&y.order).then(x.node.total_cmp(&y.node)));
        let mut merged: Vec<MultipointTerm> = Vec::with_capacity(sorted.len());
        for term in sorted {
            match merged.last_mut() {
                Some(last) if last.order == term.order && (last.node - term.node).abs() <= tol => {
                    last.beta += term.beta;
                }
                _ => merged.push(term),
            }
        }
        Ok(Self {
            r,
            m,
            a,
            b,
            terms: merged,
        })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn terms(&self) -> &[MultipointTerm] {
        &self.terms
    }
}

/// Either representation; the solver only needs the lifted form.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryOperator {
    General(GeneralBoundaryOperator),
    Multipoint(MultipointBoundaryOperator),
}

impl BoundaryOperator {
    pub fn r(&self) -> usize {
        match self {
            BoundaryOperator::General(g) => g.r,
            BoundaryOperator::Multipoint(mp) => mp.r,
        }
    }

    pub fn m(&self) -> usize {
        match self {
            BoundaryOperator::General(g) => g.m,
            BoundaryOperator::Multipoint(mp) => mp.m,
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        match self {
            BoundaryOperator::General(g) => g.interval(),
            BoundaryOperator::Multipoint(mp) => mp.interval(),
        }
    }

    pub fn apply(&self, y: &SampledJet) -> Result<CVector> {
        match self {
            BoundaryOperator::General(g) => apply_general(g, y),
            BoundaryOperator::Multipoint(mp) => apply_multipoint(mp, y),
        }
    }
}

impl From<GeneralBoundaryOperator> for BoundaryOperator {
    fn from(g: GeneralBoundaryOperator) -> Self {
        BoundaryOperator::General(g)
    }
}

impl From<MultipointBoundaryOperator> for BoundaryOperator {
    fn from(mp: MultipointBoundaryOperator) -> Self {
        BoundaryOperator::Multipoint(mp)
    }
}

fn check_jet(r: usize, m: usize, y: &SampledJet) -> Result<()> {
    if y.m() != m {
        return Err(Error::dims("jet components", m, y.m()));
    }
    if y.order() + 1 < r {
        return Err(Error::OrderOutOfRange {
            requested: r - 1,
            available: y.order(),
        });
    }
    Ok(())
}

/// `Σ_l α_l y^(l)(a) + ∫ dΦ y^(r-1)`.
pub fn apply_general(op: &GeneralBoundaryOperator, y: &SampledJet) -> Result<CVector> {
    check_jet(op.r, op.m, y)?;
    let mut out = op.phi.apply(y.channel(op.r - 1)?)?;
    for (l, al) in op.alphas.iter().enumerate() {
        out += al * y.channel(l)?.value(0);
    }
    Ok(out)
}

/// `Σ β y^(l)(t_j)`; off-grid nodes use linear interpolation of the jet channel.
pub fn apply_multipoint(op: &MultipointBoundaryOperator, y: &SampledJet) -> Result<CVector> {
    check_jet(op.r, op.m, y)?;
    let mut out = CVector::zeros(op.r * op.m);
    for term in &op.terms {
        out += &term.beta * y.channel(term.order)?.interpolate(term.node);
    }
    Ok(out)
}

/// Multipoint operator whose order-`(r-1)` part discretizes every entry of `Φ` into
/// `k` cells and whose lower part is the untouched `α_l y^(l)(a)` terms.
pub fn multipointify(op: &GeneralBoundaryOperator, k: usize) -> Result<MultipointBoundaryOperator> {
    multipointify_with(op, k, &MidpointDiscretizer)
}

pub fn multipointify_with(
    op: &GeneralBoundaryOperator,
    k: usize,
    discretizer: &dyn MeasureDiscretizer,
) -> Result<MultipointBoundaryOperator> {
    let (a, b) = op.interval();
    let (rows, m) = (op.r * op.m, op.m);
    let mut terms: Vec<MultipointTerm> = op
        .alphas
        .iter()
        .enumerate()
        .map(|(l, al)| MultipointTerm::new(a, l, al.clone()))
        .collect();

    // (location, row, col, weight) for every atom of every discretized entry
    let mut atoms: Vec<(f64, usize, usize, C64)> = Vec::new();
    for i in 0..rows {
        for j in 0..m {
            let disc = discretizer.discretize(op.phi.get(i, j), k)?;
            atoms.extend(disc.atoms().iter().map(|at| (at.t, i, j, at.w)));
        }
    }
    atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
    let tol = (b - a) * ATOM_MERGE_TOL;
    let mut start = 0;
    while start < atoms.len() {
        let node = atoms[start].0;
        let mut beta = CMatrix::zeros(rows, m);
        let mut end = start;
        while end < atoms.len() && atoms[end].0 - node <= tol {
            let (_, i, j, w) = atoms[end];
            beta[(i, j)] += w;
            end += 1;
        }
        terms.push(MultipointTerm::new(node, op.r - 1, beta));
        start = end;
    }
    MultipointBoundaryOperator::new(op.r, op.m, a, b, terms)
}

/// Point term of a lifted operator: `β · v^block(node)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedTerm {
    pub node: f64,
    pub block: usize,
    pub beta: CMatrix,
}

/// Operator on `rm`-vector functions `v = col(v^0, ..., v^{r-1})` with
/// `lift(B)(col(y, ..., y^(r-1))) = B y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedOperator {
    r: usize,
    m: usize,
    point_terms: Vec<LiftedTerm>,
    integral: Option<MatrixMeasure>,
}

impl LiftedOperator {
    pub fn dim(&self) -> usize {
        self.r * self.m
    }

    pub fn point_terms(&self) -> &[LiftedTerm] {
        &self.point_terms
    }

    /// Matrix measure acting on the last block, if any.
    pub fn integral(&self) -> Option<&MatrixMeasure> {
        self.integral.as_ref()
    }

    pub fn apply(&self, v: &SampledFn) -> Result<CVector> {
        let d = self.dim();
        if v.dim() != d {
            return Err(Error::dims("lifted operator argument", d, v.dim()));
        }
        let mut out = CVector::zeros(d);
        for term in &self.point_terms {
            let val = v.interpolate(term.node);
            out += &term.beta * val.rows(term.block * self.m, self.m);
        }
        if let Some(phi) = &self.integral {
            out += phi.apply(&v.block((self.r - 1) * self.m, self.m))?;
        }
        Ok(out)
    }

    /// `[T V]`: column `j` is the operator applied to column `j` of the trajectory.
    pub fn characteristic_matrix(&self, v: &MatrixTrajectory) -> Result<CMatrix> {
        let d = self.dim();
        if v.dim() != d {
            return Err(Error::dims("trajectory dimension", d, v.dim()));
        }
        let mut out = CMatrix::zeros(d, d);
        for j in 0..d {
            out.set_column(j, &self.apply(&v.column(j)?)?);
        }
        Ok(out)
    }
}

pub fn lift(op: &BoundaryOperator) -> LiftedOperator {
    match op {
        BoundaryOperator::General(g) => {
            let (a, _) = g.interval();
            LiftedOperator {
                r: g.r,
                m: g.m,
                point_terms: g
                    .alphas
                    .iter()
                    .enumerate()
                    .map(|(l, al)| LiftedTerm {
                        node: a,
                        block: l,
                        beta: al.clone(),
                    })
                    .collect(),
                integral: (!g.phi.is_zero()).then(|| g.phi.clone()),
            }
        }
        BoundaryOperator::Multipoint(mp) => LiftedOperator {
            r: mp.r,
            m: mp.m,
            point_terms: mp
                .terms
                .iter()
                .map(|t| LiftedTerm {
                    node: t.node,
                    block: t.order,
                    beta: t.beta.clone(),
                })
                .collect(),
            integral: None,
        },
    }
}

/// `max ‖B y‖ / ‖y‖_(r-1)` over the probes: a lower bound for `‖B‖`.
pub fn norm_lower_bound(op: &BoundaryOperator, probes: &[SampledJet]) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::InvalidArgument("norm estimate needs at least one probe".into()));
    }
    let r = op.r();
    let mut best: Option<f64> = None;
    for y in probes {
        let denom = norm_cl(y, r - 1)?;
        if denom == 0.0 {
            continue;
        }
        let ratio = vector_norm(&op.apply(y)?) / denom;
        best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
    }
    best.ok_or_else(|| Error::InvalidArgument("all probes are zero".into()))
}

/// Scalar probe polynomials with derivatives up to `r - 1`: Chebyshev polynomials on
/// `[a, b]`, their repeated antiderivatives from `a`, and powers of `b - t`.
fn probe_polys(r: usize, a: f64, b: f64) -> Vec<Poly> {
    const DEGREE: usize = 5;
    let (alpha, beta) = (-(a + b) / (b - a), 2.0 / (b - a));
    let mut cheb = vec![Poly::from_real(&[1.0]), Poly::from_real(&[0.0, 1.0])];
    for j in 2..=DEGREE {
        let next = Poly::from_real(&[0.0, 2.0]).mul(&cheb[j - 1]).sub(&cheb[j - 2]).trimmed();
        cheb.push(next);
    }
    let cheb: Vec<Poly> = cheb.iter().map(|p| p.compose_affine(alpha, beta)).collect();

    let mut out = cheb.clone();
    let mut level = cheb;
    for _ in 1..r {
        level = level
            .iter()
            .map(|p| {
                let prim = p.antiderivative();
                prim.sub(&Poly::constant(prim.eval(a)))
            })
            .collect();
        out.extend(level.iter().cloned());
    }
    let mut fact = 1.0;
    for l in 1..r {
        fact *= l as f64;
        let lin = Poly::from_real(&[b, -1.0]);
        let mut pw = Poly::from_real(&[1.0]);
        for _ in 0..l {
            pw = pw.mul(&lin);
        }
        out.push(pw.scale(C64::new(1.0 / fact, 0.0)));
    }
    out
}

/// Default probe family for [`norm_lower_bound`]: every probe polynomial placed in each
/// single component, plus all sign patterns across components.
pub fn default_probes(r: usize, m: usize, grid: &Grid) -> Vec<SampledJet> {
    let polys = probe_polys(r, grid.a(), grid.b());
    let mut patterns: Vec<Vec<f64>> = (0..m)
        .map(|c| (0..m).map(|i| if i == c { 1.0 } else { 0.0 }).collect())
        .collect();
    if m > 1 {
        for mask in 0..(1usize << (m - 1)) {
            let mut s = vec![1.0];
            s.extend((1..m).map(|i| if mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 }));
            patterns.push(s);
        }
    }
    let mut probes = Vec::with_capacity(polys.len() * patterns.len());
    for p in &polys {
        let mut derivs = vec![p.clone()];
        for l in 1..r {
            derivs.push(derivs[l - 1].derivative());
        }
        for pat in &patterns {
            probes.push(SampledJet::from_fn(grid, m, r - 1, |t, j| {
                let v = derivs[j].eval(t);
                CVector::from_iterator(m, pat.iter().map(|&s| v * s))
            }));
        }
    }
    probes
}

/// `max_{l, μ} Σ_{terms of order l} Σ_λ |β_{λμ}|`: an upper bound for
/// `‖B_k : (C^(r-1))^m → ℂ^{rm}‖`.
pub fn norm_upper_bound(op: &MultipointBoundaryOperator) -> f64 {
    let mut sums = DMatrix::<f64>::zeros(op.r, op.m);
    for term in &op.terms {
        for (mu, col) in term.beta.column_iter().enumerate() {
            sums[(term.order, mu)] += col.iter().map(|z| z.norm()).sum::<f64>();
        }
    }
    sums.iter().copied().fold(0.0, f64::max)
}

/// Bound on [`norm_upper_bound`] valid for every `multipointify(op, k)`: the larger of
/// `max_l ‖α_l‖` and the max-column norm of the entrywise variation matrix of `Φ`.
pub fn sequence_norm_bound(op: &GeneralBoundaryOperator) -> f64 {
    let var = op.phi.variation_matrix();
    let phi_part = var
        .column_iter()
        .map(|c| c.iter().sum::<f64>())
        .fold(0.0, f64::max);
    op.alphas.iter().map(matrix_norm).fold(phi_part, f64::max)
}
