//! Feedback stabilization of the interacting component: synthesize the
//! gain, verify the negative occupation average empirically, and measure
//! the decay fraction of the controlled coupled system.

use cjd_core::benchmarks;
use cjd_core::control::{
    controlled_decay_fraction, design_feedback, verify_weak_stabilization, FeedbackGainDesign,
};
use cjd_core::stability::StabilityHypotheses;
use nalgebra::{DMatrix, DVector};

use crate::config::{OutputKind, Params, ScenarioConfig};
use crate::output::{fmt_f64, OutputSink};
use crate::scenarios::{ParamSpec, Scenario};
use crate::CliError;

pub struct Control;

const PARAMS: &[ParamSpec] = &[
    ParamSpec { name: "q_diag", default: "[1.0]", help: "diagonal of the quadratic form Q" },
    ParamSpec { name: "c1", default: "1.0", help: "constant generator bound" },
    ParamSpec { name: "c2", default: "0.0", help: "quadratic generator bound" },
    ParamSpec { name: "k1", default: "1.0", help: "constant part of the f1 bound" },
    ParamSpec { name: "k2", default: "1.0", help: "quadratic part of the f1 bound" },
    ParamSpec { name: "base", default: "-0.5", help: "slow drift at a quiet boundary" },
    ParamSpec { name: "gain", default: "2.0", help: "destabilizing response to |x1|^2" },
    ParamSpec { name: "x2_noise", default: "0.1", help: "slow diffusion intensity" },
    ParamSpec { name: "x2_0", default: "1e-3", help: "initial displacement for the decay check" },
    ParamSpec { name: "margin", default: "0.05", help: "decay threshold on fitted slopes" },
];

impl Scenario for Control {
    fn name(&self) -> &'static str {
        "control"
    }

    fn describe(&self) -> &'static str {
        "linear state feedback on the interacting component: gain synthesis, occupation-average verification, and controlled decay fraction"
    }

    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }

    fn run(&self, cfg: &ScenarioConfig, sink: &mut OutputSink) -> Result<(), CliError> {
        let p = Params::new(&cfg.parameters);
        let q_diag = p.vector("q_diag", &[1.0])?;
        let l1 = q_diag.len();
        let q = DMatrix::from_diagonal(&DVector::from_vec(q_diag));
        let design = design_feedback(
            &q,
            p.f64("c1", 1.0)?,
            p.f64("c2", 0.0)?,
            p.f64("k1", 1.0)?,
            p.f64("k2", 1.0)?,
        )?;

        let system = benchmarks::stabilization_benchmark(
            l1,
            p.f64("base", -0.5)?,
            p.f64("gain", 2.0)?,
            p.f64("x2_noise", 0.1)?,
        )?;
        let hyp = quadratic_hypotheses(l1, design.k1, design.k2)?;
        let report = verify_weak_stabilization(&system, &design, &hyp, &cfg.integrator, cfg.ensemble)?;
        let frac = controlled_decay_fraction(
            &system,
            &design,
            p.f64("x2_0", 1e-3)?,
            &cfg.integrator,
            cfg.ensemble,
            p.f64("margin", 0.05)?,
        )?;

        if cfg.outputs.contains(&OutputKind::Report) {
            let header = format!("{},decay_fraction", FeedbackGainDesign::csv_header());
            let row = format!("{},{}", report.csv_row(), fmt_f64(frac));
            sink.write_csv("report.csv", &header, [row])?;
        }
        Ok(())
    }
}

fn quadratic_hypotheses(
    l1: usize,
    k1: f64,
    k2: f64,
) -> Result<StabilityHypotheses, CliError> {
    // f1 = -K1 + K2 |x1|^2 with a dominating quadratic V1
    let scale = 2.0 * (k1 + k2 + 2.0);
    Ok(StabilityHypotheses::builder(l1, 1)
        .v0(|x: &DVector<f64>| 1.0 + x.norm_squared())
        .v1(|x: &DVector<f64>| 1.0 + x.norm_squared())
        .f1(move |x: &DVector<f64>| -k1 + k2 * x.norm_squared())
        .f2(|_| 1.0)
        .k5(scale)
        .build()?)
}
