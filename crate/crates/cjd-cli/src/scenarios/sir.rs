//! Stochastic SIR epidemic with saturated (Beddington-DeAngelis style)
//! incidence. The susceptible pool is the interacting boundary component;
//! the occupation average of its extinction functional decides whether the
//! infection dies out exponentially.

use cjd_core::benchmarks::SirParams;
use cjd_core::runner::run_paths;
use cjd_core::stability::{
    estimate_invariant_measure, stability_verdict, LyapunovReport, StabilityHypotheses,
};
use cjd_core::simulate_path;
use nalgebra::DVector;

use crate::config::{OutputKind, Params, ScenarioConfig};
use crate::output::{occupation_rows, trajectory_rows, OutputSink};
use crate::scenarios::{ParamSpec, Scenario};
use crate::CliError;

pub struct Sir;

const PARAMS: &[ParamSpec] = &[
    ParamSpec { name: "c0", default: "1.0", help: "susceptible inflow" },
    ParamSpec { name: "c1", default: "1.0", help: "susceptible decay rate" },
    ParamSpec { name: "c2", default: "0.5", help: "infected removal rate" },
    ParamSpec { name: "c3", default: "0.2", help: "contact rate" },
    ParamSpec { name: "c4", default: "1.0", help: "incidence saturation offset" },
    ParamSpec { name: "c5", default: "1.0", help: "incidence saturation in S" },
    ParamSpec { name: "c6", default: "1.0", help: "incidence saturation in I" },
    ParamSpec { name: "c7", default: "0.3", help: "infected diffusion intensity" },
    ParamSpec { name: "sigma1", default: "0.2", help: "susceptible diffusion intensity" },
    ParamSpec { name: "gamma1_hat", default: "[0.1]", help: "additive S-jump sizes" },
    ParamSpec { name: "gamma1_weight", default: "[0.5]", help: "S-jump rates" },
    ParamSpec { name: "gamma2_hat", default: "[0.2]", help: "relative I-jump sizes" },
    ParamSpec { name: "gamma2_weight", default: "[0.5]", help: "I-jump rates" },
    ParamSpec { name: "s0", default: "1.0", help: "initial susceptible mass" },
    ParamSpec { name: "i0", default: "1e-3", help: "initial infected mass" },
];

pub(crate) fn params_from(p: &Params) -> Result<SirParams, CliError> {
    Ok(SirParams {
        c0: p.f64("c0", 1.0)?,
        c1: p.f64("c1", 1.0)?,
        c2: p.f64("c2", 0.5)?,
        c3: p.f64("c3", 0.2)?,
        c4: p.f64("c4", 1.0)?,
        c5: p.f64("c5", 1.0)?,
        c6: p.f64("c6", 1.0)?,
        c7: p.f64("c7", 0.3)?,
        sigma1: p.f64("sigma1", 0.2)?,
        gamma1_atoms: if p.has("gamma1_hat") {
            p.atoms("gamma1")?
        } else {
            vec![(0.1, 0.5)]
        },
        gamma2_atoms: if p.has("gamma2_hat") {
            p.atoms("gamma2")?
        } else {
            vec![(0.2, 0.5)]
        },
    })
}

/// Hypotheses for the epidemic: log barrier on `I`, quadratic `V`, and a
/// `K5` large enough to dominate the (bounded) extinction functional on
/// the nonnegative susceptible axis.
pub(crate) fn hypotheses(sp: &SirParams) -> Result<StabilityHypotheses, CliError> {
    let jump: f64 = sp.gamma2_atoms.iter().map(|&(g, w)| w * g * g).sum();
    let f1_sup = sp.c2 + sp.c7 * sp.c7 / 2.0 + jump + sp.c3 / sp.c5.max(1e-9);
    let k5 = 2.0 * (f1_sup + 1.0);
    Ok(StabilityHypotheses::builder(1, 1)
        .v0(|x: &DVector<f64>| 1.0 + x[0] * x[0])
        .v1(|x: &DVector<f64>| 1.0 + x[0] * x[0])
        .f1_field(sp.f1())
        .f2(|_| 1.0)
        .delta0(0.5)
        .c_sigma(10.0)
        .k5(k5)
        .x1_domain(|x: &DVector<f64>| x[0] >= 0.0)
        .build()?)
}

impl Scenario for Sir {
    fn name(&self) -> &'static str {
        "sir"
    }

    fn describe(&self) -> &'static str {
        "stochastic SIR epidemic: boundary occupation of the susceptible pool decides exponential extinction of the infection"
    }

    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }

    fn run(&self, cfg: &ScenarioConfig, sink: &mut OutputSink) -> Result<(), CliError> {
        let p = Params::new(&cfg.parameters);
        let sp = params_from(&p)?;
        let system = sp.system()?;
        let hyp = hypotheses(&sp)?;
        let s0 = DVector::from_element(1, p.f64("s0", 1.0)?);
        let i0 = DVector::from_element(1, p.f64("i0", 1e-3)?);

        let occ = estimate_invariant_measure(&system, &s0, &cfg.integrator, cfg.ensemble)?;
        let report = stability_verdict(&system, &hyp, &occ, &cfg.integrator)?;

        if cfg.outputs.contains(&OutputKind::Report) {
            sink.write_csv(
                "report.csv",
                LyapunovReport::csv_header(),
                [report.csv_row()],
            )?;
        }
        if cfg.outputs.contains(&OutputKind::Occupation) {
            sink.write_csv("occupation.csv", "index,weight,s", occupation_rows(&occ))?;
        }
        if cfg.outputs.contains(&OutputKind::Paths) {
            let paths: Vec<_> = run_paths(cfg.ensemble, |idx| {
                simulate_path(&system, (&s0, &i0), &cfg.integrator, idx)
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
            sink.write_csv(
                "trajectories.csv",
                "path,time,s,i",
                trajectory_rows(paths.iter().enumerate(), |x1, x2| vec![x1[0], x2[0]]),
            )?;
        }
        Ok(())
    }
}
