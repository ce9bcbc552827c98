use bcs_core::boundary3d::{
    criterion, m3_profile, t_j, table1_with, BoundaryCondition, CriterionReport, Sign, TABLE1_STEP,
};
use bcs_core::bs_solver::{tc0, SolverOptions, Tc0Record};
use bcs_core::diagnostics::{dt_form_d1, dt_form_d2, fit_growth, GrowthModel};
use bcs_core::kernels::{m_mu, KernelParams};
use bcs_core::{Dimension, RadialPotential};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{non_empty, positive, Command, RunConfig};
use crate::report::{num, Check, RunReport, Table};
use crate::CliError;

/// Report plus an optional table written by `--out`.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub table: Option<Table>,
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Table1 => table1(|j, x| t_j(x, j)),
        Command::M3Profile => m3_profile_cmd(cfg),
        Command::Criterion => criterion_cmd(cfg),
        Command::Tc0 => tc0_cmd(cfg),
        Command::DtGrowth => dt_growth(cfg),
        Command::VmuSpectrum => vmu_spectrum(cfg),
    }
}

fn potential(cfg: &RunConfig) -> Result<(RadialPotential, Value), CliError> {
    let spec = cfg.potential_or_default();
    let echo = serde_json::to_value(&spec).expect("spec is serializable");
    Ok((RadialPotential::try_from(spec)?, echo))
}

fn require_bc(cfg: &RunConfig) -> Result<BoundaryCondition, CliError> {
    cfg.bc
        .ok_or_else(|| CliError::Config("bc is required (\"dirichlet\" or \"neumann\")".into()))
}

/// Table of values at zero, built from the given `t_j(x)` implementation.
pub fn table1(term: impl Fn(usize, f64) -> bcs_core::Result<f64> + Sync) -> Result<Outcome, CliError> {
    let cells = table1_with(term)?;
    let checks = cells
        .iter()
        .map(|c| {
            Check::enforced(
                format!("{} order {}", c.function, c.order),
                c.pass,
                format!("computed {:e}, exact {:e}, tolerance {:e}", c.computed, c.reference, c.tolerance),
            )
        })
        .collect();
    let report = RunReport::new(
        Command::Table1,
        json!({ "derivative_step": TABLE1_STEP }),
        json!({ "cells": cells }),
        checks,
    );
    Ok(Outcome { report, table: None })
}

fn m3_profile_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let bc = require_bc(cfg)?;
    let x_max = cfg.x_max.unwrap_or(20.0);
    let step = cfg.step.unwrap_or(0.05);
    if !(x_max >= 0.0 && x_max.is_finite()) {
        return Err(CliError::Config(format!("x_max must be nonnegative and finite, got {x_max}")));
    }
    positive("step", step)?;
    let rows = m3_profile(x_max, step, bc)?;

    let mut table = Table::new(vec!["x", "m3"]);
    for &(x, y) in &rows {
        table.push(vec![num(x), num(y)]);
    }
    let (min, max) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, y)| (lo.min(y), hi.max(y)));
    let at_zero = rows[0].1;
    let checks = match bc {
        BoundaryCondition::Dirichlet => vec![Check::observed(
            "nonnegative",
            min >= -1e-6,
            format!("minimum {min:e}"),
        )],
        BoundaryCondition::Neumann => {
            let first_negative = rows[1..].iter().find(|&&(_, y)| y < 0.0).map(|&(x, _)| x);
            let sign_change = match first_negative {
                Some(x) => format!("first negative sample at x = {x}"),
                None => "no negative sample".to_string(),
            };
            vec![
                Check::enforced("value at zero is 4", (at_zero - 4.0).abs() <= 1e-6, format!("{at_zero:e}")),
                if x_max >= 20.0 {
                    Check::enforced("changes sign", first_negative.is_some(), sign_change)
                } else {
                    Check::observed("changes sign", first_negative.is_some(), sign_change)
                },
            ]
        }
    };
    let report = RunReport::new(
        Command::M3Profile,
        json!({ "bc": bc, "x_max": x_max, "step": step }),
        json!({ "rows": rows.len(), "value_at_zero": at_zero, "min": min, "max": max }),
        checks,
    );
    Ok(Outcome { report, table: Some(table) })
}

fn criterion_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let bc = require_bc(cfg)?;
    let (v, echo) = potential(cfg)?;
    let mus: Vec<f64> = match (&cfg.mu_sweep, cfg.mu) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either mu or mu_sweep, not both".into())),
        (Some(sweep), None) => non_empty("mu_sweep", Some(sweep))?.to_vec(),
        (None, _) => vec![cfg.mu_or_default()?],
    };
    let reports: Vec<CriterionReport> = mus
        .par_iter()
        .map(|&mu| criterion(&v, mu, bc))
        .collect::<bcs_core::Result<_>>()?;

    let mut table = Table::new(vec!["mu", "value", "sign"]);
    let mut checks = Vec::new();
    for r in &reports {
        table.push(vec![num(r.inputs.mu), num(r.value), r.sign.to_string()]);
        checks.push(Check::observed(
            format!("sign conclusive at mu = {}", r.inputs.mu),
            r.sign != Sign::Inconclusive,
            format!("value {:e} ({}), error estimate {:e}", r.value, r.sign, r.error_estimate),
        ));
    }
    let report = RunReport::new(
        Command::Criterion,
        json!({ "potential": echo, "bc": bc, "mu": mus }),
        json!({ "reports": reports }),
        checks,
    );
    Ok(Outcome { report, table: Some(table) })
}

fn tc0_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (v, echo) = potential(cfg)?;
    let mu = cfg.mu_or_default()?;
    let lambdas = non_empty("lambdas", cfg.lambdas.as_ref())?;
    let mut opts = SolverOptions::default();
    if let Some(tol) = cfg.tol {
        opts.bisect_tol = positive("tol", tol)?;
    }
    let e = v.e_mu(mu)?;
    let rows: Vec<Result<Tc0Record, String>> = lambdas
        .par_iter()
        .map(|&lambda| {
            let sol = tc0(&v, mu, lambda, &opts)?;
            let m = m_mu(KernelParams::new(sol.t_c, mu)?, v.dim())?;
            Ok(Tc0Record {
                lambda,
                t_c: sol.t_c,
                residual: sol.residual,
                e_mu_m_mu_lambda: e * m * lambda,
            })
        })
        .map(|r: bcs_core::Result<Tc0Record>| r.map_err(|e| e.to_string()))
        .collect();

    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (&lambda, row) in lambdas.iter().zip(rows) {
        match row {
            Ok(r) => records.push(r),
            Err(error) => failures.push(json!({ "lambda": lambda, "error": error })),
        }
    }
    records.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));

    let mut table = Table::new(vec!["lambda", "Tc", "residual", "e_mu_m_mu_lambda"]);
    for r in &records {
        table.push(vec![num(r.lambda), num(r.t_c), num(r.residual), num(r.e_mu_m_mu_lambda)]);
    }
    let increasing = records.windows(2).all(|w| w[1].t_c > w[0].t_c);
    let worst = records.iter().map(|r| r.residual).fold(0.0, f64::max);
    let checks = vec![
        Check::enforced(
            "every coupling solved",
            failures.is_empty(),
            format!("{} of {} solved", records.len(), lambdas.len()),
        ),
        Check::enforced("T_c increasing in lambda", increasing, format!("{} rows", records.len())),
        Check::enforced(
            "bisection residual",
            worst <= opts.bisect_tol,
            format!("max |lambda a_T - 1| = {worst:e}"),
        ),
    ];
    let report = RunReport::new(
        Command::Tc0,
        json!({ "potential": echo, "mu": mu, "lambdas": lambdas, "solver": opts }),
        json!({ "e_mu": e, "records": records, "failures": failures }),
        checks,
    );
    Ok(Outcome { report, table: Some(table) })
}

fn dt_growth(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = cfg
        .potential
        .clone()
        .ok_or_else(|| CliError::Config("potential is required, with d = 1 or 2".into()))?;
    let echo = serde_json::to_value(&spec).expect("spec is serializable");
    let v = RadialPotential::try_from(spec)?;
    let mu = cfg.mu_or_default()?;
    let default_ts = vec![1e-2, 1e-3, 1e-4];
    let ts = non_empty("temperatures", Some(cfg.temperatures.as_ref().unwrap_or(&default_ts)))?;
    let (model, form): (GrowthModel, fn(&RadialPotential, f64, f64) -> bcs_core::Result<f64>) = match v.dim() {
        Dimension::One => (GrowthModel::InverseT, dt_form_d1),
        Dimension::Two => (GrowthModel::LogCubed, dt_form_d2),
        Dimension::Three => {
            return Err(CliError::Config("dt-growth supports d = 1 and d = 2 only".into()));
        }
    };
    let samples: Vec<(f64, f64)> = ts
        .iter()
        .map(|&t| Ok((t, form(&v, t, mu)?)))
        .collect::<bcs_core::Result<_>>()?;
    let fit = fit_growth(&samples, model, mu)?;

    let nonnegative = fit.samples.iter().all(|&(_, y)| y >= 0.0);
    let mut checks = vec![Check::enforced(
        "nonnegative",
        nonnegative,
        format!("{} samples", fit.samples.len()),
    )];
    match model {
        GrowthModel::InverseT => {
            let tol = cfg.tol.unwrap_or(0.2);
            checks.push(Check::enforced(
                "T times value is stable",
                fit.max_relative_deviation <= tol,
                format!("max relative deviation {:.4} (tolerance {tol})", fit.max_relative_deviation),
            ));
        }
        GrowthModel::LogCubed => {
            let tol = cfg.tol.unwrap_or(0.15);
            let ratios: Vec<f64> = fit.normalized.windows(2).map(|w| w[1] / w[0]).collect();
            let worst = ratios.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
            let listed: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
            checks.push(Check::enforced(
                "value over ln^3(mu/T) is stable",
                worst <= tol,
                format!("successive ratios [{}] (tolerance {tol})", listed.join(", ")),
            ));
        }
    }
    let report = RunReport::new(
        Command::DtGrowth,
        json!({ "potential": echo, "mu": mu, "temperatures": ts }),
        json!({ "fit": fit }),
        checks,
    );
    Ok(Outcome { report, table: None })
}

fn vmu_spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (v, echo) = potential(cfg)?;
    let mu = cfg.mu_or_default()?;
    let l_max = cfg.l_max.unwrap_or(4);
    if l_max == 0 {
        return Err(CliError::InsufficientData(
            "l_max must be at least 1 to compare l = 0 with higher channels".into(),
        ));
    }
    let values = v.vmu_spectrum(mu, l_max)?;
    let rest = values[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let verdict = values[0] > rest;
    let checks = vec![Check::observed(
        "l = 0 channel is the strict maximum",
        verdict,
        format!("v_0 = {:e}, max over l >= 1 = {rest:e}", values[0]),
    )];
    let report = RunReport::new(
        Command::VmuSpectrum,
        json!({ "potential": echo, "mu": mu, "l_max": l_max }),
        json!({ "eigenvalues": values, "s_wave_dominant": verdict }),
        checks,
    );
    Ok(Outcome { report, table: None })
}
