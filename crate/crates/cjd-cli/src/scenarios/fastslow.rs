//! Two-time-scale benchmark: the scalar tanh-modulated system swept over a
//! list of scale separations, next to the averaged-limit exponent.

use std::sync::Arc;

use cjd_core::benchmarks;
use cjd_core::fastslow::{lambda_eps, lambda_star, FastSlowSystem};
use cjd_core::levy::LevyMeasure;
use cjd_core::polar::LinearizedCoefficients;
use cjd_core::IntegratorConfig;
use nalgebra::{DMatrix, DVector};

use crate::config::{OutputKind, Params, ScenarioConfig};
use crate::output::{fmt_f64, OutputSink};
use crate::scenarios::{ParamSpec, Scenario};
use crate::CliError;

pub struct FastSlow;

const PARAMS: &[ParamSpec] = &[
    ParamSpec { name: "b", default: "-0.3", help: "mean drift rate of the slow component" },
    ParamSpec { name: "tanh_gain", default: "0.8", help: "fast-state modulation of the drift" },
    ParamSpec { name: "s", default: "0.5", help: "slow diffusion intensity" },
    ParamSpec { name: "gamma2_hat", default: "[]", help: "relative slow jump sizes" },
    ParamSpec { name: "gamma2_weight", default: "[]", help: "slow jump rates" },
    ParamSpec { name: "theta1", default: "1.0", help: "fast mean-reversion rate" },
    ParamSpec { name: "sigma1", default: "1.4142135623730951", help: "fast diffusion intensity" },
    ParamSpec { name: "epsilons", default: "[1.0, 0.3, 0.1, 0.03]", help: "scale separations to sweep" },
];

/// Scalar tanh-modulated linearization with y1-independent noise channels.
pub(crate) fn scalar_tanh_lin(
    b: f64,
    gain: f64,
    s: f64,
) -> Result<LinearizedCoefficients, CliError> {
    Ok(LinearizedCoefficients::new(
        1,
        1,
        vec![Arc::new(move |_: &DVector<f64>| DMatrix::from_element(1, 1, s)) as Arc<_>],
        Arc::new(move |y1: &DVector<f64>| DMatrix::from_element(1, 1, b + gain * y1[0].tanh())),
        Arc::new(|_: &DVector<f64>, mark: &DVector<f64>| DMatrix::from_element(1, 1, mark[0])),
    )?)
}

impl Scenario for FastSlow {
    fn name(&self) -> &'static str {
        "fastslow"
    }

    fn describe(&self) -> &'static str {
        "two-time-scale system: angular exponent swept over scale separations, converging to the averaged-limit value (epsilon = 0 rows)"
    }

    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }

    fn run(&self, cfg: &ScenarioConfig, sink: &mut OutputSink) -> Result<(), CliError> {
        let p = Params::new(&cfg.parameters);
        let b = p.f64("b", -0.3)?;
        let gain = p.f64("tanh_gain", 0.8)?;
        let s = p.f64("s", 0.5)?;
        let atoms = p.atoms("gamma2")?;
        let theta1 = p.f64("theta1", 1.0)?;
        let sigma1 = p.f64("sigma1", std::f64::consts::SQRT_2)?;
        let epsilons = p.vector("epsilons", &[1.0, 0.3, 0.1, 0.03])?;

        let lin = scalar_tanh_lin(b, gain, s)?;
        let nu2 = LevyMeasure::scalar_atoms(&atoms)?;
        let base = benchmarks::linearized_system(theta1, sigma1, &lin, &nu2)?;
        let y1_0 = DVector::zeros(1);
        let theta0 = DVector::from_element(1, 1.0);

        let mut rows = Vec::new();
        for &eps in &epsilons {
            let fs = FastSlowSystem::new(base.clone(), eps, lin.clone())?;
            // resolve the fast scale without forcing the caller to retune dt
            let cfg_eps = IntegratorConfig {
                dt: cfg.integrator.dt.min(eps / 10.0),
                ..cfg.integrator
            };
            let pair = lambda_eps(&fs, &y1_0, &theta0, &cfg_eps, cfg.ensemble)?;
            rows.push(format!(
                "{},generator,{},{}",
                fmt_f64(eps),
                fmt_f64(pair.generator.0),
                fmt_f64(pair.generator.1)
            ));
            rows.push(format!(
                "{},jump_penalized,{},{}",
                fmt_f64(eps),
                fmt_f64(pair.jump_penalized.0),
                fmt_f64(pair.jump_penalized.1)
            ));
        }

        // averaged limit, reported as epsilon = 0
        let fs = FastSlowSystem::new(base.clone(), 1.0, lin.clone())?;
        let star = lambda_star(&fs, &y1_0, &theta0, &cfg.integrator, cfg.ensemble)?;
        rows.push(format!(
            "0e0,generator,{},{}",
            fmt_f64(star.value.generator.0),
            fmt_f64(star.value.generator.1)
        ));
        rows.push(format!(
            "0e0,jump_penalized,{},{}",
            fmt_f64(star.value.jump_penalized.0),
            fmt_f64(star.value.jump_penalized.1)
        ));

        if cfg.outputs.contains(&OutputKind::Report) {
            sink.write_csv("report.csv", "epsilon,variant,lambda,stderr", rows)?;
        }
        Ok(())
    }
}
