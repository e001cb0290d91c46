//! Scalar linear benchmark: an Ornstein-Uhlenbeck boundary component
//! driving a multiplicative linear second component whose exponential rate
//! has a closed form. The report carries the measured exponent next to the
//! boundary functional averages and the decay verdict.

use cjd_core::benchmarks;
use cjd_core::runner::run_paths;
use cjd_core::simulate_path;
use cjd_core::stability::{
    estimate_invariant_measure, estimate_log_lyapunov_exponent, stability_verdict,
    LyapunovReport, StabilityHypotheses,
};
use nalgebra::DVector;

use crate::config::{OutputKind, Params, ScenarioConfig};
use crate::output::{fmt_f64, occupation_rows, trajectory_rows, OutputSink};
use crate::scenarios::{ParamSpec, Scenario};
use crate::CliError;

pub struct Linear;

const PARAMS: &[ParamSpec] = &[
    ParamSpec { name: "theta1", default: "1.0", help: "boundary mean-reversion rate" },
    ParamSpec { name: "sigma1", default: "1.0", help: "boundary diffusion intensity" },
    ParamSpec { name: "gamma1_hat", default: "[]", help: "additive boundary jump sizes" },
    ParamSpec { name: "gamma1_weight", default: "[]", help: "boundary jump rates" },
    ParamSpec { name: "a", default: "-1.0", help: "second-component drift rate" },
    ParamSpec { name: "s", default: "0.0", help: "second-component diffusion intensity" },
    ParamSpec { name: "gamma2_hat", default: "[]", help: "relative jump sizes of x2" },
    ParamSpec { name: "gamma2_weight", default: "[]", help: "x2 jump rates" },
    ParamSpec { name: "coupling", default: "0.0", help: "drift modulation of x2 by x1" },
    ParamSpec { name: "x1_0", default: "0.0", help: "initial boundary state" },
    ParamSpec { name: "x2_0", default: "1e-3", help: "initial second-component state" },
];

/// The exact drift of `-ln |x2|` for this benchmark:
/// `f1(x1) = -(a + c x1) + s^2/2 + sum w (ghat - ln|1+ghat|)`.
pub(crate) fn exact_f1(
    a: f64,
    s: f64,
    coupling: f64,
    atoms: &[(f64, f64)],
) -> impl Fn(&DVector<f64>) -> f64 + Send + Sync + 'static {
    let jump: f64 = atoms
        .iter()
        .map(|&(g, w)| w * (g - (1.0 + g).abs().ln()))
        .sum();
    let constant = -a + s * s / 2.0 + jump;
    move |x1: &DVector<f64>| constant - coupling * x1[0]
}

pub(crate) fn hypotheses(
    a: f64,
    s: f64,
    coupling: f64,
    atoms: &[(f64, f64)],
) -> Result<StabilityHypotheses, CliError> {
    let f1 = exact_f1(a, s, coupling, atoms);
    let jump_sq: f64 = atoms.iter().map(|&(g, w)| w * g * g).sum();
    let f2c = s * s + jump_sq + 1.0;
    let bound = a.abs() + s * s / 2.0 + jump_sq + coupling.abs() + f2c;
    Ok(StabilityHypotheses::builder(1, 1)
        .v0(|x: &DVector<f64>| 1.0 + x[0] * x[0])
        .v1(|x: &DVector<f64>| 1.0 + x[0] * x[0])
        .f1(f1)
        .f2(move |_| f2c)
        .k5(2.0 * (bound + 1.0))
        .build()?)
}

impl Scenario for Linear {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn describe(&self) -> &'static str {
        "scalar linear jump diffusion over an OU boundary: measured exponential rate, boundary functionals, and the decay verdict"
    }

    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }

    fn run(&self, cfg: &ScenarioConfig, sink: &mut OutputSink) -> Result<(), CliError> {
        let p = Params::new(&cfg.parameters);
        let theta1 = p.f64("theta1", 1.0)?;
        let sigma1 = p.f64("sigma1", 1.0)?;
        let jumps1 = p.atoms("gamma1")?;
        let a = p.f64("a", -1.0)?;
        let s = p.f64("s", 0.0)?;
        let jumps2 = p.atoms("gamma2")?;
        let coupling = p.f64("coupling", 0.0)?;
        let system =
            benchmarks::scalar_linear(theta1, sigma1, &jumps1, a, s, &jumps2, coupling)?;
        let x1_0 = DVector::from_element(1, p.f64("x1_0", 0.0)?);
        let x2_0 = DVector::from_element(1, p.f64("x2_0", 1e-3)?);

        let exponent =
            estimate_log_lyapunov_exponent(&system, (&x1_0, &x2_0), &cfg.integrator, cfg.ensemble)?;
        let occ = estimate_invariant_measure(&system, &x1_0, &cfg.integrator, cfg.ensemble)?;
        let hyp = hypotheses(a, s, coupling, &jumps2)?;
        let verdict = stability_verdict(&system, &hyp, &occ, &cfg.integrator)?;

        if cfg.outputs.contains(&OutputKind::Report) {
            sink.write_csv(
                "report.csv",
                "quantity,value,stderr",
                [
                    format!(
                        "exponent,{},{}",
                        fmt_f64(exponent.mean),
                        fmt_f64(exponent.stderr)
                    ),
                    format!(
                        "lambda1,{},{}",
                        fmt_f64(verdict.lambda1.0),
                        fmt_f64(verdict.lambda1.1)
                    ),
                    format!(
                        "lambda2,{},{}",
                        fmt_f64(verdict.lambda2.0),
                        fmt_f64(verdict.lambda2.1)
                    ),
                ],
            )?;
            sink.write_csv(
                "lyapunov.csv",
                LyapunovReport::csv_header(),
                [verdict.csv_row()],
            )?;
        }
        if cfg.outputs.contains(&OutputKind::Occupation) {
            sink.write_csv("occupation.csv", "index,weight,x1", occupation_rows(&occ))?;
        }
        if cfg.outputs.contains(&OutputKind::Paths) {
            let paths: Vec<_> = run_paths(cfg.ensemble, |idx| {
                simulate_path(&system, (&x1_0, &x2_0), &cfg.integrator, idx)
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
            sink.write_csv(
                "trajectories.csv",
                "path,time,x1,x2",
                trajectory_rows(paths.iter().enumerate(), |x1, x2| vec![x1[0], x2[0]]),
            )?;
        }
        Ok(())
    }
}
