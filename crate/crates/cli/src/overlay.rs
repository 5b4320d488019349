//! Closed-form companion values for each row of a sweep.

use cogfeed_core::analysis::{
    corollary1_asymptote, saturation_lower_bound, quantized_ipc_floor, prop2_upper_bound, theorem1_su_outage,
    theorem2_su_outage_ff, AnalyticOutage,
};
use cogfeed_core::channel::linear_to_db;
use cogfeed_core::report::fmt_float;
use cogfeed_core::sim::TrialConfig;
use cogfeed_core::Bits;

pub const OVERLAY_CSV_HEADER: &str = "mode,feedforward,L,gamma_p_db,gamma_max_db,B,A,B_local,ocb_outage,ocb_outage_ff,saturation_floor,saturation_lower_bound,quantized_ipc_bound,quantized_ipc_floor,validity_ratio,valid";

/// Closed-form values for one configuration. The quantized-IPC columns are
/// `None` when `A` is infinite.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlayRow {
    pub ocb: AnalyticOutage,
    pub ocb_ff: AnalyticOutage,
    pub saturation: AnalyticOutage,
    pub saturation_lower: AnalyticOutage,
    pub ipc_bound: Option<AnalyticOutage>,
    pub ipc_floor: Option<AnalyticOutage>,
}

impl OverlayRow {
    pub fn new(cfg: &TrialConfig) -> Self {
        let p = &cfg.params;
        let b = p.b_cdi;
        let quantized = matches!(p.a_ipc, Bits::Finite(_));
        Self {
            ocb: theorem1_su_outage(p, b),
            ocb_ff: theorem2_su_outage_ff(p, b),
            saturation: corollary1_asymptote(p, b),
            saturation_lower: saturation_lower_bound(p, b),
            ipc_bound: quantized.then(|| prop2_upper_bound(p, p.a_ipc, b, cfg.feedforward)),
            ipc_floor: quantized.then(|| quantized_ipc_floor(p, p.a_ipc, b)),
        }
    }

    /// The formula matching the row's feedback setting.
    pub fn primary(&self, feedforward: bool) -> &AnalyticOutage {
        match (&self.ipc_bound, feedforward) {
            (Some(bound), _) => bound,
            (None, true) => &self.ocb_ff,
            (None, false) => &self.ocb,
        }
    }
}

fn opt(x: Option<&AnalyticOutage>) -> String {
    x.map(|r| fmt_float(r.value)).unwrap_or_default()
}

pub fn overlay_csv_row(cfg: &TrialConfig) -> String {
    let p = &cfg.params;
    let row = OverlayRow::new(cfg);
    let primary = row.primary(cfg.feedforward);
    [
        cfg.mode.to_string(),
        cfg.feedforward.to_string(),
        p.antennas.to_string(),
        fmt_float(linear_to_db(p.gamma_p)),
        fmt_float(linear_to_db(p.gamma_max())),
        p.b_cdi.to_string(),
        p.a_ipc.to_string(),
        p.b_local.to_string(),
        fmt_float(row.ocb.value),
        fmt_float(row.ocb_ff.value),
        fmt_float(row.saturation.value),
        fmt_float(row.saturation_lower.value),
        opt(row.ipc_bound.as_ref()),
        opt(row.ipc_floor.as_ref()),
        fmt_float(primary.validity_ratio),
        primary.valid.to_string(),
    ]
    .join(",")
}
