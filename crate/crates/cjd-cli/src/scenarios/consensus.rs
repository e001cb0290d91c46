//! Leader-following consensus: verdicts on built-in or file-defined
//! topologies under noisy measurement protocols.

use std::sync::Arc;

use cjd_core::consensus::{
    consentability_verdict, simulate_network, ConsensusProtocol, ConsensusReport,
    LeaderFollowerGraph, NoiseModel, VerdictOptions,
};
use nalgebra::{DMatrix, DVector};

use crate::config::{OutputKind, Params, ScenarioConfig};
use crate::output::{fmt_f64, OutputSink};
use crate::scenarios::{ParamSpec, Scenario};
use crate::CliError;

pub struct Consensus;

const PARAMS: &[ParamSpec] = &[
    ParamSpec { name: "topology", default: "star", help: "star, chain, or file" },
    ParamSpec { name: "n_followers", default: "3", help: "follower count for built-in topologies" },
    ParamSpec { name: "graph_file", default: "(none)", help: "adjacency list ('i j' per line, 0 = leader) when topology = file" },
    ParamSpec { name: "n_dim", default: "1", help: "agent state dimension" },
    ParamSpec { name: "k_gain", default: "[1.0]", help: "diagonal of the symmetric gain K" },
    ParamSpec { name: "b_gain", default: "[1.0]", help: "diagonal of the input matrix B" },
    ParamSpec { name: "sigma", default: "0.05", help: "uniform measurement-noise intensity" },
    ParamSpec { name: "jump_hat", default: "[]", help: "relative measurement jump sizes (every edge)" },
    ParamSpec { name: "jump_weight", default: "[]", help: "measurement jump rates" },
    ParamSpec { name: "drift_a", default: "-1.0", help: "plant drift rate (f = a x)" },
    ParamSpec { name: "margin", default: "0.05", help: "decay threshold on fitted slopes" },
    ParamSpec { name: "initial_error", default: "1e-3", help: "initial follower displacement norm" },
    ParamSpec { name: "quorum", default: "0.9", help: "required fraction of decaying paths" },
];

fn diag_from(v: &[f64], n_dim: usize, what: &str) -> Result<DMatrix<f64>, CliError> {
    let d = if v.len() == 1 {
        DVector::from_element(n_dim, v[0])
    } else if v.len() == n_dim {
        DVector::from_column_slice(v)
    } else {
        return Err(CliError::Validation(format!(
            "{what}: expected 1 or n_dim = {n_dim} entries, got {}",
            v.len()
        )));
    };
    Ok(DMatrix::from_diagonal(&d))
}

impl Scenario for Consensus {
    fn name(&self) -> &'static str {
        "consensus"
    }

    fn describe(&self) -> &'static str {
        "leader-following network under noisy measurements: per-path error exponents and the consentability verdict"
    }

    fn params(&self) -> &'static [ParamSpec] {
        PARAMS
    }

    fn run(&self, cfg: &ScenarioConfig, sink: &mut OutputSink) -> Result<(), CliError> {
        let p = Params::new(&cfg.parameters);
        let n = p.usize("n_followers", 3)?;
        let graph = match p.text("topology", "star")?.as_str() {
            "star" => LeaderFollowerGraph::star(n)?,
            "chain" => LeaderFollowerGraph::chain(n)?,
            "file" => {
                let path = p.text("graph_file", "")?;
                if path.is_empty() {
                    return Err(CliError::Validation(
                        "topology = file requires graph_file".into(),
                    ));
                }
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CliError::Io(format!("{path}: {e}")))?;
                LeaderFollowerGraph::from_edge_list(&text)?
            }
            other => {
                return Err(CliError::Validation(format!(
                    "unknown topology '{other}' (star, chain, file)"
                )))
            }
        };
        let n_dim = p.usize("n_dim", 1)?;
        let protocol = ConsensusProtocol::new(
            diag_from(&p.vector("k_gain", &[1.0])?, n_dim, "k_gain")?,
            diag_from(&p.vector("b_gain", &[1.0])?, n_dim, "b_gain")?,
        )?;
        let mut noise = NoiseModel::uniform_sigma(&graph, p.f64("sigma", 0.05)?)?;
        let jump_atoms = p.atoms("jump")?;
        if !jump_atoms.is_empty() {
            for (i, j) in graph.edges() {
                noise = noise.with_jumps(i, j, &jump_atoms)?;
            }
        }
        let a = p.f64("drift_a", -1.0)?;
        let f: Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync> =
            Arc::new(move |x: &DVector<f64>| x * a);
        let opts = VerdictOptions {
            margin: p.f64("margin", 0.05)?,
            initial_error: p.f64("initial_error", 1e-3)?,
            decay_quorum: p.f64("quorum", 0.9)?,
        };

        let report =
            consentability_verdict(&graph, &protocol, &noise, &f, &cfg.integrator, cfg.ensemble, opts)?;

        if cfg.outputs.contains(&OutputKind::Report) {
            sink.write_csv(
                "report.csv",
                ConsensusReport::csv_header(),
                [report.csv_row()],
            )?;
            sink.write_csv(
                "slopes.csv",
                "path,slope",
                report
                    .slopes
                    .iter()
                    .enumerate()
                    .map(|(i, s)| format!("{i},{}", fmt_f64(*s))),
            )?;
        }
        if cfg.outputs.contains(&OutputKind::Paths) {
            // one representative path with all agents recorded
            let x0 = DVector::zeros(n_dim);
            let followers: Vec<DVector<f64>> = (0..graph.n_followers())
                .map(|i| DVector::from_element(n_dim, opts.initial_error * (i + 1) as f64))
                .collect();
            let paths = simulate_network(
                &graph,
                &protocol,
                &noise,
                &f,
                &x0,
                &followers,
                &cfg.integrator,
                0,
            )?;
            let mut header = String::from("time,agent");
            for k in 0..n_dim {
                header.push_str(&format!(",x{}", k + 1));
            }
            let mut rows = Vec::new();
            for (t_idx, t) in paths.times.iter().enumerate() {
                let mut row = format!("{},0", fmt_f64(*t));
                for v in paths.leader[t_idx].iter() {
                    row.push(',');
                    row.push_str(&fmt_f64(*v));
                }
                rows.push(row);
                for (i, series) in paths.followers.iter().enumerate() {
                    let mut row = format!("{},{}", fmt_f64(*t), i + 1);
                    for v in series[t_idx].iter() {
                        row.push(',');
                        row.push_str(&fmt_f64(*v));
                    }
                    rows.push(row);
                }
            }
            sink.write_csv("trajectories.csv", &header, rows)?;
        }
        Ok(())
    }
}
