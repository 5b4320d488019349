//! Expansion of an experiment into concrete trial configurations.

use cogfeed_core::channel::linear_to_db;
use cogfeed_core::sim::TrialConfig;
use cogfeed_core::{BeamMode, Bits, Error, Result, SystemParams};

use crate::spec::{ExperimentKind, ExperimentSpec};

/// Default γ_max axis for the figure sweeps, in dB.
pub const GAMMA_MAX_AXIS_DB: [f64; 9] = [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0];
/// γ_max values (dB) at which the bit split is searched.
pub const TRADEOFF_GAMMA_MAX_DB: [f64; 3] = [10.0, 20.0, 30.0];
pub const DEFAULT_TOTAL_BITS: u32 = 12;

/// Fully resolved sweep axes. Points are the Cartesian product in field
/// order, `gamma_max_db` varying fastest. For figure6 `split` replaces the
/// `b_cdi × a_ipc` product with `(B, A) = (F − A, A)`, `A = 1..F−1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub modes: Vec<BeamMode>,
    pub feedforward: Vec<bool>,
    pub antennas: Vec<usize>,
    pub gamma_p_db: Vec<f64>,
    pub b_cdi: Vec<Bits>,
    pub a_ipc: Vec<Bits>,
    pub b_local: Vec<Bits>,
    pub gamma_max_db: Vec<f64>,
    pub split: Option<u32>,
}

fn finite(bits: &[u32]) -> Vec<Bits> {
    bits.iter().map(|&b| Bits::Finite(b)).collect()
}

impl Grid {
    /// Default axes for `kind` around the base parameters.
    pub fn defaults(kind: ExperimentKind, base: &SystemParams) -> Grid {
        let mut g = Grid {
            modes: vec![BeamMode::Ocb],
            feedforward: vec![false],
            antennas: vec![base.antennas],
            gamma_p_db: vec![linear_to_db(base.gamma_p)],
            b_cdi: vec![base.b_cdi],
            a_ipc: vec![base.a_ipc],
            b_local: vec![base.b_local],
            gamma_max_db: GAMMA_MAX_AXIS_DB.to_vec(),
            split: None,
        };
        match kind {
            ExperimentKind::Figure2 => {
                g.b_cdi = finite(&[8, 12, 16, 20]);
                g.a_ipc = vec![Bits::Infinite];
            }
            ExperimentKind::Figure3 => {
                g.modes = vec![BeamMode::Ocb, BeamMode::Nocb];
                g.b_cdi = finite(&[8, 16]);
                g.a_ipc = vec![Bits::Infinite];
            }
            ExperimentKind::Figure4 => {
                g.modes = vec![BeamMode::Ocb, BeamMode::Nocb];
                g.feedforward = vec![false, true];
                g.antennas = vec![4, 6];
                g.b_cdi = finite(&[12]);
                g.a_ipc = vec![Bits::Infinite];
            }
            ExperimentKind::Figure5 => {
                g.modes = vec![BeamMode::Ocb, BeamMode::Nocb];
                g.b_cdi = finite(&[12]);
                g.a_ipc = vec![Bits::Infinite];
                g.b_local = vec![Bits::Infinite, Bits::Finite(8)];
            }
            ExperimentKind::Figure6 => {
                g.split = Some(DEFAULT_TOTAL_BITS);
                g.gamma_max_db = TRADEOFF_GAMMA_MAX_DB.to_vec();
            }
            ExperimentKind::AllocateBits => {
                g.split = Some(DEFAULT_TOTAL_BITS);
                g.gamma_max_db = vec![linear_to_db(base.gamma_max())];
            }
            ExperimentKind::CustomSweep | ExperimentKind::ValidateDistributions => {
                g.gamma_max_db = vec![linear_to_db(base.gamma_max())];
            }
        }
        g
    }

    /// Kind defaults with the spec's explicit axes applied.
    pub fn for_spec(spec: &ExperimentSpec) -> Result<Grid> {
        let base = spec.params()?;
        let mut g = Grid::defaults(spec.kind, &base);
        // A scalar override pins its axis unless the grid block sets it.
        let s = &spec.overrides;
        if s.antennas.is_some() {
            g.antennas = vec![base.antennas];
        }
        if s.gamma_p_db.is_some() {
            g.gamma_p_db = vec![linear_to_db(base.gamma_p)];
        }
        if s.b_cdi.is_some() && g.split.is_none() {
            g.b_cdi = vec![base.b_cdi];
        }
        if s.a_ipc.is_some() && g.split.is_none() {
            g.a_ipc = vec![base.a_ipc];
        }
        if s.b_local.is_some() {
            g.b_local = vec![base.b_local];
        }
        if s.gamma_max_db.is_some() {
            g.gamma_max_db = vec![linear_to_db(base.gamma_max())];
        }
        let o = &spec.grid;
        macro_rules! take {
            ($f:ident) => {
                if let Some(v) = &o.$f {
                    g.$f = v.clone();
                }
            };
        }
        take!(modes);
        take!(feedforward);
        take!(antennas);
        take!(gamma_p_db);
        take!(b_cdi);
        take!(a_ipc);
        take!(b_local);
        take!(gamma_max_db);
        if let Some(total) = o.total_bits {
            if g.split.is_none() {
                return Err(Error::Config(format!(
                    "grid.total_bits: only used by figure6 and allocate-bits, not {}",
                    spec.kind.as_str()
                )));
            }
            g.split = Some(total);
        }
        Ok(g)
    }

    /// `(B, A)` pairs in sweep order.
    fn bit_pairs(&self) -> Vec<(Bits, Bits)> {
        match self.split {
            Some(total) => (1..total).map(|a| (Bits::Finite(total - a), Bits::Finite(a))).collect(),
            None => self
                .b_cdi
                .iter()
                .flat_map(|&b| self.a_ipc.iter().map(move |&a| (b, a)))
                .collect(),
        }
    }

    /// Trial configurations in sweep order.
    pub fn configs(&self, spec: &ExperimentSpec) -> Result<Vec<TrialConfig>> {
        let base = spec.params()?;
        let mut out = Vec::new();
        for &mode in &self.modes {
            for &ff in &self.feedforward {
                for &l in &self.antennas {
                    for &gp in &self.gamma_p_db {
                        for (b, a) in self.bit_pairs() {
                            for &bl in &self.b_local {
                                for &gm in &self.gamma_max_db {
                                    let params = base
                                        .clone()
                                        .with_antennas(l)
                                        .with_gamma_p_db(gp)
                                        .with_gamma_max_db(gm)
                                        .with_cdi_bits(b)
                                        .with_ipc_bits(a)
                                        .with_local_bits(bl);
                                    let mut c = TrialConfig::new(params, mode, ff, spec.n_trials, spec.master_seed);
                                    c.cdi_model = spec.cdi_model;
                                    c.codebook = spec.codebook;
                                    out.push(c);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn configs(spec: &ExperimentSpec) -> Vec<TrialConfig> {
        Grid::for_spec(spec).unwrap().configs(spec).unwrap()
    }

    #[test]
    fn figure2_grid() {
        let c = configs(&ExperimentSpec::new("f", ExperimentKind::Figure2));
        assert_eq!(c.len(), 4 * 9);
        assert!(c.iter().all(|c| c.mode == BeamMode::Ocb && !c.feedforward && c.params.a_ipc.is_infinite()));
        assert_eq!(c[0].params.b_cdi, Bits::Finite(8));
        assert_eq!(c[0].params.p_max, 1.0);
        assert!((c[8].params.p_max - 1e4).abs() < 1e-6);
        assert_eq!(c[9].params.b_cdi, Bits::Finite(12));
    }

    #[test]
    fn figure6_splits_the_budget() {
        let mut spec = ExperimentSpec::new("f", ExperimentKind::Figure6);
        spec.overrides.gamma_p_db = Some(13.0);
        let c = configs(&spec);
        assert_eq!(c.len(), 11 * 3);
        for cfg in &c {
            let (b, a) = (cfg.params.b_cdi.finite().unwrap(), cfg.params.a_ipc.finite().unwrap());
            assert_eq!(a + b, 12);
            assert!((linear_to_db(cfg.params.gamma_p) - 13.0).abs() < 1e-12);
        }
    }

    #[test]
    fn explicit_axes_win() {
        let mut spec = ExperimentSpec::new("f", ExperimentKind::Figure3);
        spec.grid.gamma_max_db = Some(vec![40.0]);
        spec.grid.b_cdi = Some(vec![Bits::Finite(10)]);
        let c = configs(&spec);
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].mode, BeamMode::Nocb);
    }

    #[test]
    fn scalar_overrides_pin_their_axis() {
        let mut spec = ExperimentSpec::new("f", ExperimentKind::Figure3);
        spec.overrides.a_ipc = Some(Bits::Finite(6));
        spec.overrides.antennas = Some(5);
        let c = configs(&spec);
        assert_eq!(c.len(), 2 * 2 * 9);
        assert!(c.iter().all(|c| c.params.a_ipc == Bits::Finite(6) && c.params.antennas == 5));

        spec.grid.a_ipc = Some(vec![Bits::Finite(3), Bits::Infinite]);
        assert_eq!(configs(&spec).len(), 2 * 2 * 2 * 9);
    }

    #[test]
    fn total_bits_only_for_splits() {
        let mut spec = ExperimentSpec::new("f", ExperimentKind::Figure2);
        spec.grid.total_bits = Some(8);
        assert!(matches!(Grid::for_spec(&spec), Err(Error::Config(_))));
    }
}
