use super::engine::SweepRow;
use crate::channel::linear_to_db;
use crate::report::{csv_field, fmt_float};

pub const SWEEP_CSV_HEADER: &str = "mode,feedforward,cdi_model,L,lambda,sigma2,theta_p,theta_s,gamma_p_db,gamma_max_db,p_max,B,A,B_local,codebook_samples,codebook_seed,su_outage,pu_outage,pu_outage_reference,su_ci_halfwidth,pu_ci_halfwidth,mean_tx_power,trials,seed,error";

/// One CSV line for a sweep row. Failed rows leave the numeric result
/// columns empty and fill `error`.
pub fn sweep_csv_row(row: &SweepRow) -> String {
    let c = &row.config;
    let p = &c.params;
    let cdi_model = match c.cdi_model {
        super::CdiModel::Statistical => "statistical",
        super::CdiModel::Rvq => "rvq",
    };
    let mut fields = vec![
        c.mode.to_string(),
        c.feedforward.to_string(),
        cdi_model.to_string(),
        p.antennas.to_string(),
        fmt_float(p.lambda),
        fmt_float(p.sigma2),
        fmt_float(p.theta_p),
        fmt_float(p.theta_s),
        fmt_float(linear_to_db(p.gamma_p)),
        fmt_float(linear_to_db(p.gamma_max())),
        fmt_float(p.p_max),
        p.b_cdi.to_string(),
        p.a_ipc.to_string(),
        p.b_local.to_string(),
        c.codebook.n_samples.to_string(),
        c.codebook.seed.to_string(),
    ];
    match &row.result {
        Ok(e) => fields.extend([
            fmt_float(e.su_outage),
            fmt_float(e.pu_outage),
            fmt_float(e.pu_outage_reference),
            fmt_float(e.su_ci_halfwidth),
            fmt_float(e.pu_ci_halfwidth),
            fmt_float(e.mean_tx_power),
            e.trials.to_string(),
            c.master_seed.to_string(),
            String::new(),
        ]),
        Err(msg) => {
            fields.extend(std::iter::repeat(String::new()).take(6));
            fields.extend([c.n_trials.to_string(), c.master_seed.to_string(), csv_field(msg)]);
        }
    }
    fields.join(",")
}

/// Header plus one line per row, newline terminated.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&sweep_csv_row(r));
        out.push('\n');
    }
    out
}
