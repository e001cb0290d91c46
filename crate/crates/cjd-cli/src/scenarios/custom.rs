//! Fully parameterized scalar coupled system with bidirectional coupling,
//! plus the empirical regularity report.

use cjd_core::benchmarks;
use cjd_core::lipschitz::validate_lipschitz;
use cjd_core::runner::run_paths;
use cjd_core::simulate_path;
use cjd_core::stability::{
    estimate_invariant_measure, estimate_log_lyapunov_exponent, stability_verdict, LyapunovReport,
};
use nalgebra::DVector;

use crate::config::{OutputKind, Params, ScenarioConfig};
use crate::output::{fmt_f64, occupation_rows, trajectory_rows, OutputSink};
use crate::scenarios::{linear, ParamSpec, Scenario};
use crate::CliError;

pub struct Custom;

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
    ParamSpec { name: "back", default: "0.0", help: "back-action of x2 on the x1 drift" },
    ParamSpec { name: "x1_0", default: "0.0", help: "initial boundary state" },
    ParamSpec { name: "x2_0", default: "1e-3", help: "initial second-component state" },
    ParamSpec { name: "declared_k1", default: "(none)", help: "declared Lipschitz bound to check" },
    ParamSpec { name: "declared_k2", default: "(none)", help: "declared growth bound to check" },
    ParamSpec { name: "box_radius", default: "5.0", help: "radius of the regularity probe box" },
    ParamSpec { name: "probe_samples", default: "600", help: "point pairs for the regularity probe" },
];

impl Scenario for Custom {
    fn name(&self) -> &'static str {
        "custom"
    }

    fn describe(&self) -> &'static str {
        "user-parameterized bidirectional scalar system: regularity probe, measured exponent, and decay verdict"
    }

    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }

    fn run(&self, cfg: &ScenarioConfig, sink: &mut OutputSink) -> Result<(), CliError> {
        let p = Params::new(&cfg.parameters);
        let a = p.f64("a", -1.0)?;
        let s = p.f64("s", 0.0)?;
        let coupling = p.f64("coupling", 0.0)?;
        let jumps2 = p.atoms("gamma2")?;
        let system = benchmarks::scalar_bidirectional(
            p.f64("theta1", 1.0)?,
            p.f64("sigma1", 1.0)?,
            &p.atoms("gamma1")?,
            a,
            s,
            &jumps2,
            coupling,
            p.f64("back", 0.0)?,
        )?;
        let x1_0 = DVector::from_element(1, p.f64("x1_0", 0.0)?);
        let x2_0 = DVector::from_element(1, p.f64("x2_0", 1e-3)?);

        let declared_k1 = p.has("declared_k1").then(|| p.f64("declared_k1", 0.0)).transpose()?;
        let declared_k2 = p.has("declared_k2").then(|| p.f64("declared_k2", 0.0)).transpose()?;
        let reg = validate_lipschitz(
            &system,
            p.usize("probe_samples", 600)?,
            p.f64("box_radius", 5.0)?,
            declared_k1,
            declared_k2,
        )?;

        let exponent =
            estimate_log_lyapunov_exponent(&system, (&x1_0, &x2_0), &cfg.integrator, cfg.ensemble)?;
        let occ = estimate_invariant_measure(&system, &x1_0, &cfg.integrator, cfg.ensemble)?;
        let hyp = linear::hypotheses(a, s, coupling, &jumps2)?;
        let verdict = stability_verdict(&system, &hyp, &occ, &cfg.integrator)?;

        if cfg.outputs.contains(&OutputKind::Report) {
            let b = |x: Option<bool>| match x {
                Some(true) => "1",
                Some(false) => "0",
                None => "",
            };
            sink.write_csv(
                "report.csv",
                "quantity,value,stderr,note",
                [
                    format!(
                        "exponent,{},{},",
                        fmt_f64(exponent.mean),
                        fmt_f64(exponent.stderr)
                    ),
                    format!("k1_hat,{},0e0,pass={}", fmt_f64(reg.k1_hat), b(reg.k1_pass)),
                    format!("k2_hat,{},0e0,pass={}", fmt_f64(reg.k2_hat), b(reg.k2_pass)),
                    format!(
                        "unbounded_trend,{},0e0,",
                        if reg.unbounded_trend { "1e0" } else { "0e0" }
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
