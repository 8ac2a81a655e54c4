//! JSON problem files.
//!
//! ```json
//! {
//!   "order": 1,
//!   "dim": 1,
//!   "interval": [0.0, 1.0],
//!   "grid_n": 2048,
//!   "coefficients": [[[{"breakpoints": [0.0, 1.0], "pieces": [[[1.0, 0.0]]]}]]],
//!   "rhs": [{"breakpoints": [0.0, 1.0], "pieces": [[[1.0, 0.0], [1.0, 0.0]]]}],
//!   "q": [[1.1321205588285577, 0.0]],
//!   "boundary": {
//!     "kind": "general",
//!     "alphas": [],
//!     "phi": [[{"atoms": [], "density": {"breakpoints": [0.0, 1.0], "pieces": [[[1.0, 0.0]]]}}]]
//!   }
//! }
//! ```
//!
//! Complex numbers are `[re, im]`, polynomial coefficients are lowest degree first in
//! absolute `t`, `coefficients[l]` is the `m × m` matrix `A_l` as rows, atoms are
//! `[t, re, im]`. A multipoint boundary is `{"kind": "multipoint", "terms":
//! [{"node": t, "order": l, "beta": rows}]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryOperator, GeneralBoundaryOperator, MultipointBoundaryOperator, MultipointTerm};
use crate::bvp::BvpProblem;
use crate::error::{Error, Result};
use crate::funcspace::{Grid, PiecewisePoly, Poly, PolyMatrix, PolyVector, DEFAULT_GRID_N};
use crate::stieltjes::{Atom, MatrixMeasure, ScalarMeasure};
use crate::{CMatrix, CVector, C64};

pub type ComplexPair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseSpec {
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Vec<ComplexPair>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    #[serde(default)]
    pub atoms: Vec<[f64; 3]>,
    #[serde(default)]
    pub density: Option<PiecewiseSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub node: f64,
    pub order: usize,
    pub beta: Vec<Vec<ComplexPair>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BoundarySpec {
    General {
        alphas: Vec<Vec<Vec<ComplexPair>>>,
        phi: Vec<Vec<MeasureSpec>>,
    },
    Multipoint {
        terms: Vec<TermSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub order: usize,
    pub dim: usize,
    pub interval: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    pub coefficients: Vec<Vec<Vec<PiecewiseSpec>>>,
    pub rhs: Vec<PiecewiseSpec>,
    pub q: Vec<ComplexPair>,
    pub boundary: BoundarySpec,
}

fn pair(z: C64) -> ComplexPair {
    [z.re, z.im]
}

fn cx(p: ComplexPair) -> C64 {
    C64::new(p[0], p[1])
}

fn pp_spec(p: &PiecewisePoly) -> PiecewiseSpec {
    PiecewiseSpec {
        breakpoints: p.breakpoints().to_vec(),
        pieces: p.pieces().iter().map(|q| q.coeffs().iter().copied().map(pair).collect()).collect(),
    }
}

fn matrix_spec(m: &CMatrix) -> Vec<Vec<ComplexPair>> {
    m.row_iter().map(|row| row.iter().copied().map(pair).collect()).collect()
}

fn measure_spec(mu: &ScalarMeasure) -> MeasureSpec {
    MeasureSpec {
        atoms: mu.atoms().iter().map(|a| [a.t, a.w.re, a.w.im]).collect(),
        density: (!mu.density().is_zero()).then(|| pp_spec(mu.density())),
    }
}

impl ProblemFile {
    pub fn from_problem(p: &BvpProblem) -> Self {
        let (r, m) = (p.r(), p.m());
        let (a, b) = p.interval();
        let coefficients = p
            .coefficients()
            .iter()
            .map(|al| (0..m).map(|i| (0..m).map(|j| pp_spec(al.get(i, j))).collect()).collect())
            .collect();
        let boundary = match p.boundary() {
            BoundaryOperator::General(g) => BoundarySpec::General {
                alphas: g.alphas().iter().map(matrix_spec).collect(),
                phi: (0..r * m)
                    .map(|i| (0..m).map(|j| measure_spec(g.phi().get(i, j))).collect())
                    .collect(),
            },
            BoundaryOperator::Multipoint(mp) => BoundarySpec::Multipoint {
                terms: mp
                    .terms()
                    .iter()
                    .map(|t| TermSpec {
                        node: t.node,
                        order: t.order,
                        beta: matrix_spec(&t.beta),
                    })
                    .collect(),
            },
        };
        ProblemFile {
            order: r,
            dim: m,
            interval: [a, b],
            grid_n: Some(p.grid().n()),
            coefficients,
            rhs: p.rhs().entries().iter().map(pp_spec).collect(),
            q: p.q().iter().copied().map(pair).collect(),
            boundary,
        }
    }

    /// Validates the file and builds the problem; `grid_n` overrides the stored grid size.
    pub fn to_problem(&self, grid_n: Option<usize>) -> Result<BvpProblem> {
        let (r, m) = (self.order, self.dim);
        if r == 0 {
            return Err(Error::schema("order", "must be at least 1"));
        }
        if m == 0 {
            return Err(Error::schema("dim", "must be at least 1"));
        }
        let [a, b] = self.interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Interval { a, b });
        }
        let n = grid_n.or(self.grid_n).unwrap_or(DEFAULT_GRID_N);
        let grid = Grid::new(a, b, n).map_err(|e| Error::schema("grid_n", e.to_string()))?;

        if self.coefficients.len() != r {
            return Err(Error::dims("coefficients", r, self.coefficients.len()));
        }
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(l, rows)| {
                let field = format!("coefficients[{l}]");
                let entries = square(rows, m, &field)?
                    .into_iter()
                    .map(|(path, spec)| to_pp(spec, a, b, &path))
                    .collect::<Result<Vec<_>>>()?;
                PolyMatrix::new(m, m, entries)
            })
            .collect::<Result<Vec<_>>>()?;

        if self.rhs.len() != m {
            return Err(Error::dims("rhs", m, self.rhs.len()));
        }
        let rhs = PolyVector::new(
            self.rhs
                .iter()
                .enumerate()
                .map(|(i, s)| to_pp(s, a, b, &format!("rhs[{i}]")))
                .collect::<Result<Vec<_>>>()?,
        )?;

        if self.q.len() != r * m {
            return Err(Error::dims("q", r * m, self.q.len()));
        }
        for (i, z) in self.q.iter().enumerate() {
            finite(z, &format!("q[{i}]"))?;
        }
        let q = CVector::from_iterator(r * m, self.q.iter().copied().map(cx));

        let boundary: BoundaryOperator = match &self.boundary {
            BoundarySpec::General { alphas, phi } => {
                if alphas.len() != r - 1 {
                    return Err(Error::dims("boundary.alphas", r - 1, alphas.len()));
                }
                let alphas = alphas
                    .iter()
                    .enumerate()
                    .map(|(l, rows)| to_matrix(rows, r * m, m, &format!("boundary.alphas[{l}]")))
                    .collect::<Result<Vec<_>>>()?;
                check_rows(phi, r * m, m, "boundary.phi")?;
                let mut entries = Vec::with_capacity(r * m * m);
                for (i, row) in phi.iter().enumerate() {
                    for (j, spec) in row.iter().enumerate() {
                        entries.push(to_measure(spec, a, b, &format!("boundary.phi[{i}][{j}]"))?);
                    }
                }
                GeneralBoundaryOperator::new(r, m, alphas, MatrixMeasure::new(r * m, m, entries)?)?.into()
            }
            BoundarySpec::Multipoint { terms } => {
                let terms = terms
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        let field = format!("boundary.terms[{i}]");
                        if !(t.node.is_finite() && t.node >= a && t.node <= b) {
                            return Err(Error::schema(format!("{field}.node"), format!("{} outside [{a}, {b}]", t.node)));
                        }
                        if t.order >= r {
                            return Err(Error::schema(format!("{field}.order"), format!("{} exceeds r - 1 = {}", t.order, r - 1)));
                        }
                        Ok(MultipointTerm::new(t.node, t.order, to_matrix(&t.beta, r * m, m, &format!("{field}.beta"))?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                MultipointBoundaryOperator::new(r, m, a, b, terms)?.into()
            }
        };
        BvpProblem::new(grid, coefficients, rhs, q, boundary)
    }
}

fn finite(z: &ComplexPair, field: &str) -> Result<()> {
    if z.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::schema(field, "non-finite number"))
    }
}

fn check_rows<T>(rows: &[Vec<T>], nrows: usize, ncols: usize, field: &str) -> Result<()> {
    if rows.len() != nrows {
        return Err(Error::dims(format!("{field} rows"), nrows, rows.len()));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            return Err(Error::dims(format!("{field}[{i}] columns"), ncols, row.len()));
        }
    }
    Ok(())
}

fn square<'a, T>(rows: &'a [Vec<T>], m: usize, field: &str) -> Result<Vec<(String, &'a T)>> {
    check_rows(rows, m, m, field)?;
    Ok(rows
        .iter()
        .enumerate()
        .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, x)| (format!("{field}[{i}][{j}]"), x)))
        .collect())
}

fn to_matrix(rows: &[Vec<ComplexPair>], nrows: usize, ncols: usize, field: &str) -> Result<CMatrix> {
    check_rows(rows, nrows, ncols, field)?;
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            finite(z, &format!("{field}[{i}][{j}]"))?;
        }
    }
    Ok(CMatrix::from_row_iterator(nrows, ncols, rows.iter().flatten().copied().map(cx)))
}

fn to_pp(spec: &PiecewiseSpec, a: f64, b: f64, field: &str) -> Result<PiecewisePoly> {
    let bp = &spec.breakpoints;
    if bp.first() != Some(&a) || bp.last() != Some(&b) {
        return Err(Error::schema(
            format!("{field}.breakpoints"),
            format!("must start at {a} and end at {b}"),
        ));
    }
    for (j, piece) in spec.pieces.iter().enumerate() {
        if piece.is_empty() {
            return Err(Error::schema(format!("{field}.pieces[{j}]"), "empty coefficient list"));
        }
        for (d, z) in piece.iter().enumerate() {
            finite(z, &format!("{field}.pieces[{j}][{d}]"))?;
        }
    }
    let pieces = spec
        .pieces
        .iter()
        .map(|c| Poly::new(c.iter().copied().map(cx).collect()))
        .collect();
    PiecewisePoly::new(bp.clone(), pieces).map_err(|e| Error::schema(field, e.to_string()))
}

fn to_measure(spec: &MeasureSpec, a: f64, b: f64, field: &str) -> Result<ScalarMeasure> {
    let atoms = spec
        .atoms
        .iter()
        .enumerate()
        .map(|(i, &[t, re, im])| {
            if !(t.is_finite() && re.is_finite() && im.is_finite()) {
                return Err(Error::schema(format!("{field}.atoms[{i}]"), "non-finite number"));
            }
            if t < a || t > b {
                return Err(Error::schema(format!("{field}.atoms[{i}]"), format!("location {t} outside [{a}, {b}]")));
            }
            Ok(Atom::new(t, C64::new(re, im)))
        })
        .collect::<Result<Vec<_>>>()?;
    let density = match &spec.density {
        Some(d) => to_pp(d, a, b, &format!("{field}.density"))?,
        None => PiecewisePoly::zero(a, b),
    };
    ScalarMeasure::new(a, b, atoms, density).map_err(|e| Error::schema(field, e.to_string()))
}

fn json_error(e: serde_json::Error) -> Error {
    Error::schema(format!("line {} column {}", e.line(), e.column()), e.to_string())
}

pub fn parse_str(text: &str, grid_n: Option<usize>) -> Result<BvpProblem> {
    let file: ProblemFile = serde_json::from_str(text).map_err(json_error)?;
    file.to_problem(grid_n)
}

pub fn parse_problem(path: impl AsRef<Path>, grid_n: Option<usize>) -> Result<BvpProblem> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_str(&text, grid_n)
}

/// Pretty-printed JSON; `parse_str(&emit(p), None)` reproduces `p` exactly.
pub fn emit(p: &BvpProblem) -> String {
    let mut s = serde_json::to_string_pretty(&ProblemFile::from_problem(p)).expect("problem files always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::build_multipoint_problem;
    use crate::corpus;

    #[test]
    fn corpus_round_trip_is_exact() {
        for name in corpus::NAMES {
            let p = corpus::load(name, 512).unwrap().problem;
            let text = emit(&p);
            assert_eq!(parse_str(&text, None).unwrap(), p, "{name}");
            let mp = build_multipoint_problem(&p, 8).unwrap();
            assert_eq!(parse_str(&emit(&mp), None).unwrap(), mp, "{name} multipoint");
        }
    }

    #[test]
    fn p1_header() {
        let p = parse_str(&emit(&corpus::load("P1", 2048).unwrap().problem), None).unwrap();
        assert_eq!((p.r(), p.m()), (1, 1));
        assert!(matches!(p.boundary(), BoundaryOperator::General(_)));
    }

    fn p1_file() -> ProblemFile {
        ProblemFile::from_problem(&corpus::load("P1", 64).unwrap().problem)
    }

    #[test]
    fn wrong_q_length_names_field() {
        let mut f = p1_file();
        f.q.push([0.0, 0.0]);
        match f.to_problem(None) {
            Err(Error::DimensionMismatch { what, expected, found }) => {
                assert_eq!((what.as_str(), expected, found), ("q", 1, 2));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reversed_interval_is_rejected() {
        let mut f = p1_file();
        f.interval = [1.0, 0.0];
        assert!(matches!(f.to_problem(None), Err(Error::Interval { .. })));
    }

    #[test]
    fn schema_errors_carry_paths() {
        let mut f = p1_file();
        f.rhs[0].breakpoints = vec![0.0, 0.7, 0.5, 1.0];
        f.rhs[0].pieces = vec![vec![[1.0, 0.0]]; 3];
        match f.to_problem(None) {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "rhs[0]"),
            other => panic!("unexpected {other:?}"),
        }
        let text = emit(&corpus::load("P1", 64).unwrap().problem).replace("\"order\"", "\"orders\"");
        assert!(matches!(parse_str(&text, None), Err(Error::Schema { .. })));
    }

    #[test]
    fn grid_override() {
        let text = emit(&corpus::load("P3", 64).unwrap().problem);
        assert_eq!(parse_str(&text, Some(128)).unwrap().grid().n(), 128);
        assert_eq!(parse_str(&text, None).unwrap().grid().n(), 64);
    }
}
