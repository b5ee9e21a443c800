use crate::conditioning::harmonic_limits;
use crate::error::Result;
use crate::experiments::{hypothesis_violation, Criterion, ExperimentConfig, Report, Table};
use crate::limit_laws::{h_bm, half_stable_tau_tail};

/// `â_n P(C_n) → 1/√π` and `P(C_n) V(x σ√n) → h(x)/√π` over the grid.
pub fn run_harmonic(config: &ExperimentConfig) -> Result<Report> {
    if let Some(reason) = hypothesis_violation(&config.law) {
        return Ok(Report::violation(config, reason));
    }
    let p = &config.params;
    let h = harmonic_limits(&config.law, &p.x_grid, &config.n_grid, p.rel_tol)?;
    let target = half_stable_tau_tail();
    let mut table = Table::new(&["n", "x", "a_hat_n", "p_cn", "product", "v_at_x", "harmonic_product", "h_target"]);
    for r in &h.rows {
        table.push(vec![
            r.n as f64,
            r.x,
            r.a_hat_n,
            r.p_cn,
            r.product,
            r.v_at_x,
            r.harmonic_product,
            h_bm(r.x)? * target,
        ]);
    }
    let last = h.rows.last().expect("nonempty grid").product;
    let mut report = Report::new(config);
    report.criteria.push(Criterion::at_most(
        "product_rel_error",
        "relative error of a_hat_n P(C_n) against 1/sqrt(pi) at the largest n",
        (last - target).abs() / target,
        config.tolerance("product_rel_error")?,
    ));
    report.criteria.push(Criterion::at_most(
        "last_doubling_change",
        "relative change of a_hat_n P(C_n) over the last grid step",
        h.relative_changes.last().copied().unwrap_or(0.0),
        config.tolerance("last_doubling_change")?,
    ));
    report.tables.insert("harmonic".into(), table);
    Ok(report)
}
