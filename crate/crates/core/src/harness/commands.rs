//! Command implementations shared by the CLI and tests.

use super::checks::run_all;
use super::config::SuiteConfig;
use super::report::{digest, CheckRecord, CsvTable, Report};
use crate::action::classical_action_extrapolated;
use crate::algebra::{DiracMatrix, FourVector};
use crate::current::{coherent_state, gauge_residual, loop_current};
use crate::decomposition::{
    classical_meromorphic_expansion, decomposition_residual, expansion_contracted_total,
    expansion_total, pole_terms, SignConvention,
};
use crate::error::{Error, Result};
use serde_json::json;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Verify,
    Current,
    Decompose,
    Coherent,
    Action,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Current => "current",
            Command::Decompose => "decompose",
            Command::Coherent => "coherent",
            Command::Action => "action",
        }
    }

    /// Default file name when neither `--out` nor `output_path` is set.
    pub fn default_output(self) -> &'static str {
        match self {
            Command::Current => "current.csv",
            Command::Coherent => "coherent.csv",
            Command::Verify => "verify.json",
            Command::Decompose => "decompose.json",
            Command::Action => "action.json",
        }
    }
}

pub enum Output {
    Report(Report),
    Csv(CsvTable),
}

impl Output {
    pub fn passed(&self) -> bool {
        match self {
            Output::Report(r) => r.all_passed(),
            Output::Csv(_) => true,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        match self {
            Output::Report(r) => r.write(path),
            Output::Csv(t) => t.write(path),
        }
    }
}

pub fn run(command: Command, cfg: &SuiteConfig) -> Result<Output> {
    Ok(match command {
        Command::Verify => Output::Report(verify(cfg)),
        Command::Current => Output::Csv(current(cfg)?),
        Command::Decompose => Output::Report(decompose(cfg)),
        Command::Coherent => Output::Csv(coherent(cfg)?),
        Command::Action => Output::Report(action(cfg)),
    })
}

pub fn verify(cfg: &SuiteConfig) -> Report {
    Report::new("verify", cfg, run_all(cfg), None)
}

pub const CURRENT_HEADER: [&str; 13] = [
    "k0", "k1", "k2", "k3", "ReJ0", "ImJ0", "ReJ1", "ImJ1", "ReJ2", "ImJ2", "ReJ3", "ImJ3",
    "gauge_residual",
];

/// J^μ(k) of the main loop on every node of the current grid. The last
/// column is |k·J| / (k⁰‖J‖₁).
pub fn current(cfg: &SuiteConfig) -> Result<CsvTable> {
    let path = cfg.main_loop()?;
    let grid = cfg.current_grid.build()?;
    let mut table = CsvTable::new(&CURRENT_HEADER);
    for k in grid.nodes() {
        let j = loop_current(&path, k);
        let mut row: Vec<f64> = k.re().to_vec();
        for c in j.0 {
            row.push(c.re);
            row.push(c.im);
        }
        let scale = k[0].re.abs() * j.norm_l1();
        row.push(if scale > 0.0 { gauge_residual(k, &j) / scale } else { 0.0 });
        table.push(row);
    }
    Ok(table)
}

pub const COHERENT_HEADER: [&str; 4] = ["k_min", "photon_number", "norm_factor", "phi_cross"];

/// Photon number and normalization along the k_min ladder, with the
/// cross-edge action of the action loop (NaN when it does not converge).
pub fn coherent(cfg: &SuiteConfig) -> Result<CsvTable> {
    let path = cfg.main_loop()?;
    let base = cfg.grid.build()?;
    let phi = match classical_action_extrapolated(&cfg.action_path()?, &cfg.action_config()) {
        Ok(r) => r.value,
        Err(Error::NonConvergent(_)) => f64::NAN,
        Err(e) => return Err(e),
    };
    let mut table = CsvTable::new(&COHERENT_HEADER);
    for &k_min in &cfg.k_min_ladder {
        let data = coherent_state(&path, &base.with_k_min(k_min)?, phi);
        table.push(vec![k_min, data.photon_number, data.norm_factor, phi]);
    }
    Ok(table)
}

fn matrix_json(m: &DiracMatrix) -> serde_json::Value {
    json!(m.0.iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()).collect::<Vec<_>>())
}

/// Pole terms, completeness residual and Θ table for the configured line.
pub fn decompose(cfg: &SuiteConfig) -> Report {
    let tol = cfg.tolerance("pole_decomposition", 1e-8);
    let inputs = digest(&cfg.chain);
    let result = (|| -> Result<(f64, serde_json::Value)> {
        let chain = cfg.chain.build()?;
        let p = FourVector::real(cfg.chain.p);
        let residual = decomposition_residual(&chain, &p, SignConvention::AllPositive)?;
        let terms = pole_terms(&chain, &p)?;
        let poles: Vec<_> = terms
            .iter()
            .map(|t| {
                json!({
                    "index": t.index,
                    "pole_momentum": t.pole_momentum.re(),
                    "pole_denominator": [t.pole_denominator.re, t.pole_denominator.im],
                    "residue": matrix_json(&t.residue()),
                })
            })
            .collect();
        let photons = cfg.chain.photons()?;
        let theta = if photons.is_empty() {
            serde_json::Value::Null
        } else {
            let expansion = classical_meromorphic_expansion(&chain, &p, &photons)?;
            let rows: Vec<_> = expansion
                .iter()
                .map(|t| {
                    json!({
                        "theta": t.theta.label(),
                        "sign": t.sign,
                        "shift": t.shift.re(),
                        "value": matrix_json(&t.value()),
                    })
                })
                .collect();
            json!({
                "terms": rows,
                "total": matrix_json(&expansion_total(&expansion)),
                "contracted_total": matrix_json(&expansion_contracted_total(&expansion)),
            })
        };
        Ok((residual, json!({ "poles": poles, "theta": theta, "completeness_residual": residual })))
    })();
    let (record, data) = match result {
        Ok((residual, data)) => (
            CheckRecord::new(
                "pole_decomposition",
                "pole-decomposition",
                inputs,
                residual,
                tol,
                "Σ pole terms vs direct product".into(),
            ),
            Some(data),
        ),
        Err(e) => (CheckRecord::errored("pole_decomposition", "pole-decomposition", tol, &e), None),
    };
    Report::new("decompose", cfg, vec![record], data)
}

/// Cross-edge classical action of the action loop.
pub fn action(cfg: &SuiteConfig) -> Report {
    let tol = cfg.action_config().convergence_tolerance;
    let inputs = (|| Ok::<_, Error>(digest(&(cfg.action_path()?.vertices(), cfg.charge, &cfg.eta_factors))))()
        .unwrap_or_else(|_| digest(&"invalid loop"));
    let result = cfg
        .action_path()
        .and_then(|l| classical_action_extrapolated(&l, &cfg.action_config()));
    match result {
        Ok(r) => {
            let rel = r.error / r.value.abs().max(f64::MIN_POSITIVE);
            let pair = |p: &crate::action::PairLimit| {
                json!({
                    "edges": [p.e1, p.e2],
                    "prefactor": p.prefactor,
                    "limit": p.limit.as_ref().map(|x| x.value).ok(),
                    "error": p.limit.as_ref().map(|x| x.error).ok(),
                    "failure": p.limit.as_ref().err(),
                })
            };
            let data = json!({
                "phi": r.value,
                "error": r.error,
                "etas": r.etas,
                "cross_pairs": r.cross_pairs.iter().map(pair).collect::<Vec<_>>(),
                "self_pairs": r.self_pairs.iter().map(pair).collect::<Vec<_>>(),
                "divergent_self_pairs": r.divergent_self_pairs(),
            });
            let record = CheckRecord::new(
                "action_convergence",
                "classical-action",
                inputs,
                rel,
                tol,
                format!("Φ = {:.10e} ± {:.1e}", r.value, r.error),
            );
            Report::new("action", cfg, vec![record], Some(data))
        }
        Err(e) => Report::new(
            "action",
            cfg,
            vec![CheckRecord::errored("action_convergence", "classical-action", tol, &e)],
            None,
        ),
    }
}
