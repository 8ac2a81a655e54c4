use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use genbvp::approx::{ApproximationReport, CheckReport, ErrorConstants};
use genbvp::funcspace::SampledJet;

/// Fixed 17-significant-digit scientific notation.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

pub fn jet_csv(y: &SampledJet) -> String {
    let grid = y.grid();
    let m = y.m();
    let mut out = String::from("t");
    for j in 0..=y.order() {
        for c in 0..m {
            let _ = write!(out, ",re_y{j}_{c},im_y{j}_{c}");
        }
    }
    out.push('\n');
    for i in 0..grid.len() {
        out.push_str(&num(grid.node(i)));
        for ch in y.channels() {
            for z in ch.value(i).iter() {
                let _ = write!(out, ",{},{}", num(z.re), num(z.im));
            }
        }
        out.push('\n');
    }
    out
}

pub fn sweep_csv(rep: &ApproximationReport) -> String {
    let mut out = String::from("k,err_w1r,err_cr1,det,sigma_hat,bound_holds\n");
    for r in &rep.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.k,
            num(r.err_w1r),
            num(r.err_cr1),
            num(r.det),
            num(r.sigma_hat),
            r.bound_holds
        );
    }
    out
}

pub fn check_csv(rep: &CheckReport) -> String {
    let mut out = String::from("k,solvable,stable,approximation_error,error,ratio,f_l1_gap,f_primitive_gap,q_gap\n");
    for r in &rep.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.k,
            r.solvable,
            r.stable,
            num(r.approximation_error),
            num(r.error),
            num(r.ratio),
            num(r.f_l1_gap),
            num(r.f_primitive_gap),
            num(r.q_gap)
        );
    }
    out
}

pub fn constants_text(c: &ErrorConstants) -> String {
    format!(
        "c1 = {}\nc2 = {}\nlambda_hat = {}\nkappa_hat = {}\nsigma_hat = {}\n",
        num(c.c1),
        num(c.c2),
        num(c.lambda_hat),
        num(c.kappa_hat),
        num(c.sigma_hat)
    )
}

fn opt_k(k: Option<usize>) -> String {
    k.map_or_else(|| "none".to_string(), |k| k.to_string())
}

pub fn sweep_summary(rep: &ApproximationReport) -> String {
    format!(
        "discretizer = {}\ncoefficients = {}\nreference_det = {}\nreference_condition = {}\nrho_solvable = {}\nrho_stable = {}\n{}",
        rep.discretizer,
        rep.coefficient_approximator,
        num(rep.reference.det),
        num(rep.reference.condition),
        opt_k(rep.rho_solvable),
        opt_k(rep.rho_stable),
        constants_text(&rep.constants)
    )
}

pub fn check_summary(rep: &CheckReport) -> String {
    format!(
        "theorem = {}\neps = {}\nrho = {}\nbound = {}\nsup_ratio = {}\nbounded = {}\nl1_condition_violated = {}\npassed = {}\n{}",
        rep.theorem.number(),
        num(rep.eps),
        opt_k(rep.rho),
        rep.bound.map_or_else(|| "none".to_string(), num),
        num(rep.sup_ratio),
        rep.bounded,
        rep.l1_condition_violated,
        rep.passed,
        constants_text(&rep.constants)
    )
}

/// Writes `contents` to `dir/name` through a temporary file in the same directory.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name)).map_err(|e| e.error)?;
    Ok(())
}
