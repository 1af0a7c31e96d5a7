//! Batch front end: one scenario file in, CSV tables and a JSON report out.

pub mod config;
pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use maxsemi::distributions::{
    geometric_max_identity_check, lt_semi_sd_cofactor, scale_exponent, IDENTITY_TOL,
};
use maxsemi::processes::{compound_cdf_analytic, marginal, simulate_compound_eps, simulate_ep_paths};
use maxsemi::stats::{ks_one_sample, monotone_df_check};
use maxsemi::timeseries::{
    default_checkpoints, geometric_max_sampler, simulate_max_ar1, simulate_modified_max_ar1,
    stationarity_report, MaxAr1, ModifiedMaxAr1,
};
use maxsemi::{
    exp_max_semi_stable, sample_power, semi_sd_cofactor_df, AnyLaw, Branch, DistSpec, Error,
    LaplaceTransformSpec, MaxLaw, MaxSemiStableDF, PhiMaxSemiStableDF,
};

use config::*;
use output::{fmt_f64, write_csv, write_json, Check, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    MakeDist,
    Eval,
    Sample,
    Verify,
    SimEp,
    SimCompoundEp,
    SimAr1,
    SimAr1Mod,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::MakeDist => "make-dist",
            Command::Eval => "eval",
            Command::Sample => "sample",
            Command::Verify => "verify",
            Command::SimEp => "sim-ep",
            Command::SimCompoundEp => "sim-compound-ep",
            Command::SimAr1 => "sim-ar1",
            Command::SimAr1Mod => "sim-ar1-mod",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub command: Command,
    pub config: PathBuf,
    pub out: PathBuf,
    pub seed: Option<u64>,
}

/// Failure before any check ran. Serialized as the error detail.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CliError {
    pub error: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariant: Option<String>,
    pub detail: String,
}

impl CliError {
    fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError {
            error: "io",
            invariant: None,
            detail: format!("{}: {e}", path.display()),
        }
    }

    fn config(detail: impl Into<String>) -> Self {
        CliError {
            error: "config",
            invariant: None,
            detail: detail.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let invariant = match &e {
            Error::InvalidParameter { invariant, .. } => Some(invariant.to_string()),
            _ => None,
        };
        CliError {
            error: "validation",
            invariant,
            detail: e.to_string(),
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;

pub fn exit_code(result: &Result<RunReport, CliError>) -> i32 {
    match result {
        Ok(r) if r.pass => EXIT_OK,
        Ok(_) => EXIT_CHECK_FAILED,
        Err(_) => EXIT_INVALID,
    }
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Parses, validates and runs one scenario, writing artifacts into
/// `opts.out` (created if missing). `report.json` is always written on
/// success; `error.json` on validation failure.
pub fn run(opts: &RunOptions) -> Result<RunReport, CliError> {
    fs::create_dir_all(&opts.out).map_err(|e| CliError::io(&opts.out, e))?;
    let result = dispatch(opts);
    match &result {
        Ok(report) => write_json(&opts.out.join("report.json"), report)
            .map_err(|e| CliError::io(&opts.out, e))?,
        Err(err) => {
            let _ = write_json(&opts.out.join("error.json"), err);
        }
    }
    result
}

fn dispatch(opts: &RunOptions) -> Result<RunReport, CliError> {
    let out = opts.out.as_path();
    let checks = match opts.command {
        Command::MakeDist => make_dist(load(&opts.config)?, out)?,
        Command::Eval => eval(load(&opts.config)?, out)?,
        Command::Sample => {
            let mut cfg: SampleConfig = load(&opts.config)?;
            cfg.seed = opts.seed.unwrap_or(cfg.seed);
            sample(cfg, out)?
        }
        Command::Verify => verify(load(&opts.config)?)?,
        Command::SimEp => {
            let mut cfg: SimEpConfig = load(&opts.config)?;
            cfg.seed = opts.seed.unwrap_or(cfg.seed);
            sim_ep(cfg, out)?
        }
        Command::SimCompoundEp => {
            let mut cfg: SimCompoundEpConfig = load(&opts.config)?;
            cfg.seed = opts.seed.unwrap_or(cfg.seed);
            sim_compound_ep(cfg, out)?
        }
        Command::SimAr1 | Command::SimAr1Mod => {
            let mut cfg: SimAr1Config = load(&opts.config)?;
            cfg.seed = opts.seed.unwrap_or(cfg.seed);
            if opts.command == Command::SimAr1 {
                sim_ar1(cfg, out)?
            } else {
                sim_ar1_mod(cfg, out)?
            }
        }
    };
    Ok(RunReport::new(opts.command.name(), checks))
}

fn io_err(out: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::io(out, e)
}

fn make_dist(cfg: MakeDistConfig, out: &Path) -> Result<Vec<Check>, CliError> {
    let law = AnyLaw::try_from(cfg.dist)?;
    write_json(&out.join("spec.json"), &DistSpec::from(&law)).map_err(io_err(out))?;
    Ok(vec![Check::boolean("Def11_valid", true)])
}

/// Grid spanning the `[lo, 1 - lo]` quantile range, linear in `x`.
fn support_grid<L: MaxLaw>(law: &L, lo: f64, n: usize) -> Vec<f64> {
    let from = law.quantile(lo).expect("valid level");
    let to = law.quantile(1.0 - lo).expect("valid level");
    (0..n)
        .map(|i| from + (to - from) * i as f64 / (n - 1) as f64)
        .collect()
}

fn eval(cfg: EvalConfig, out: &Path) -> Result<Vec<Check>, CliError> {
    let law = AnyLaw::try_from(cfg.dist)?;
    let xs = cfg.x.unwrap_or_else(|| support_grid(&law, 1e-6, 201));
    let us = cfg
        .u
        .unwrap_or_else(|| (1..100).map(|i| i as f64 / 100.0).collect());
    let quantiles = us
        .iter()
        .map(|&u| law.quantile(u))
        .collect::<Result<Vec<f64>, Error>>()?;
    write_csv(
        &out.join("cdf.csv"),
        "x,cdf",
        xs.iter().map(|&x| format!("{},{}", fmt_f64(x), fmt_f64(law.cdf(x)))),
    )
    .map_err(io_err(out))?;
    write_csv(
        &out.join("quantile.csv"),
        "u,x",
        us.iter()
            .zip(&quantiles)
            .map(|(&u, &x)| format!("{},{}", fmt_f64(u), fmt_f64(x))),
    )
    .map_err(io_err(out))?;
    let worst = us
        .iter()
        .zip(&quantiles)
        .map(|(&u, &x)| (law.cdf(x) - u).abs())
        .fold(0.0, f64::max);
    Ok(vec![Check::identity(&maxsemi::IdentityReport::new(
        "QuantileInverse",
        worst,
        1e-10,
    ))])
}

fn sample(cfg: SampleConfig, out: &Path) -> Result<Vec<Check>, CliError> {
    let law = AnyLaw::try_from(cfg.dist)?;
    let draws = sample_power(&law, cfg.tau, cfg.n, cfg.seed)?;
    match cfg.format {
        SampleFormat::Csv => write_csv(&out.join("samples.csv"), "", draws.iter().map(|&v| fmt_f64(v))),
        SampleFormat::Json => write_json(&out.join("samples.json"), &draws),
    }
    .map_err(io_err(out))?;
    let ks = ks_one_sample(&draws, |x| law.cdf_power(x, cfg.tau))?;
    Ok(vec![Check::ks("SampleKS", &ks, Some(cfg.tau))])
}

fn max_stable_scales(branch: Branch) -> [f64; 3] {
    match branch {
        Branch::Frechet => [1.3, 2.0, 5.0],
        Branch::Weibull => [1.0 / 1.3, 0.5, 0.2],
    }
}

/// Every grid identity that applies to the law.
pub fn verify_checks(law: &AnyLaw, grid_size: usize) -> Result<Vec<Check>, CliError> {
    let psi = law.psi();
    let mut checks = vec![Check::identity(&psi.check_scaling_identity(grid_size, IDENTITY_TOL))];

    let grid = psi.log_grid(grid_size, 3.0);
    let mut round_trip: f64 = 0.0;
    for &x in &grid {
        round_trip = round_trip.max(((law.quantile(law.cdf(x))? - x) / x).abs());
    }
    checks.push(Check::identity(&maxsemi::IdentityReport::new(
        "QuantileRoundTrip",
        round_trip,
        1e-10,
    )));
    if psi.h().is_constant() {
        let worst = (1..1000)
            .map(|i| {
                let level = law.level_log(i as f64 / 1000.0, 1.0);
                let closed = psi.inverse_log_closed_form(level).expect("constant h");
                ((psi.inverse_log_search(level) - closed) / closed).abs()
            })
            .fold(0.0, f64::max);
        checks.push(Check::identity(&maxsemi::IdentityReport::new(
            "QuantileClosedForm",
            worst,
            1e-10,
        )));
    }
    let monotone = monotone_df_check(|x| law.cdf(x), &support_grid(law, 1e-9, 10_000));
    checks.push(Check::boolean("CdfMonotone", monotone.pass));

    match law {
        AnyLaw::MaxSemiStable(f) => checks.extend(verify_max_semi_stable(f, grid_size)?),
        AnyLaw::Phi(g) => checks.extend(verify_phi(g, grid_size)?),
    }
    Ok(checks)
}

fn verify_max_semi_stable(f: &MaxSemiStableDF, grid_size: usize) -> Result<Vec<Check>, CliError> {
    let psi = f.psi();
    let mut checks = vec![Check::identity(&f.check_max_semi_stability(grid_size, IDENTITY_TOL))];
    match semi_sd_cofactor_df(f, psi.b()) {
        Ok(h) => {
            let worst = h
                .check_grid()
                .iter()
                .map(|&x| (h.ratio(x) - h.power_form(x)).abs())
                .fold(0.0, f64::max);
            checks.push(Check::identity(&maxsemi::IdentityReport::new(
                "Thm41_cofactor",
                worst,
                IDENTITY_TOL,
            )));
            checks.push(Check::boolean("Def12_cofactor_is_df", h.report().pass));
        }
        Err(_) => checks.push(Check::boolean("Thm41_cofactor", false)),
    }
    let rejected = matches!(
        semi_sd_cofactor_df(f, 1.0 / psi.b()),
        Err(Error::InvalidCofactor { .. })
    );
    checks.push(Check::boolean("Def12_wrong_direction_rejected", rejected));
    if psi.h().is_constant() {
        for c in max_stable_scales(psi.branch()) {
            let expected = match psi.branch() {
                Branch::Frechet => c.powf(psi.alpha()),
                Branch::Weibull => c.powf(-psi.alpha()),
            };
            let mut check = match semi_sd_cofactor_df(f, c) {
                Ok(h) => {
                    let err = (h.exponent() + 1.0 - expected).abs();
                    Check {
                        check: "Thm42".into(),
                        max_err: err,
                        threshold: IDENTITY_TOL,
                        pass: h.report().pass && err <= IDENTITY_TOL,
                        at: None,
                    }
                }
                Err(_) => Check::boolean("Thm42", false),
            };
            check.at = Some(c);
            checks.push(check);
        }
    }
    Ok(checks)
}

fn verify_phi(g: &PhiMaxSemiStableDF, grid_size: usize) -> Result<Vec<Check>, CliError> {
    let psi = g.psi();
    let mut checks = vec![Check::identity(&g.check_composition_identity(psi.b(), grid_size, IDENTITY_TOL)?)];
    let lt_scale = 1.0 / scale_exponent(psi, psi.b())?;
    let (_, cm) = lt_semi_sd_cofactor(g.phi(), lt_scale)?;
    let worst = cm
        .orders
        .iter()
        .map(|o| (-o.min_value).max(0.0))
        .fold(0.0, f64::max);
    checks.push(Check {
        check: "Def13_cm_proxy".into(),
        max_err: worst,
        threshold: maxsemi::stats::CM_TOL,
        pass: cm.pass,
        at: Some(lt_scale),
    });
    if g.phi() == LaplaceTransformSpec::Exponential {
        let rep = geometric_max_identity_check(g, 1.0 / psi.a(), psi.b(), &psi.log_grid(grid_size, 3.0))?;
        checks.push(Check::identity(&rep));
    }
    Ok(checks)
}

fn verify(cfg: VerifyConfig) -> Result<Vec<Check>, CliError> {
    let law = AnyLaw::try_from(cfg.dist)?;
    verify_checks(&law, cfg.grid_size.max(2))
}

fn write_paths(out: &Path, paths: &[maxsemi::processes::ExtremalPath]) -> Result<(), CliError> {
    let rows = paths.iter().enumerate().flat_map(|(r, p)| {
        p.times
            .iter()
            .zip(&p.values)
            .map(move |(&t, &v)| format!("{r},{},{}", fmt_f64(t), fmt_f64(v)))
    });
    write_csv(&out.join("paths.csv"), "replicate,time,value", rows).map_err(io_err(out))
}

fn sim_ep(cfg: SimEpConfig, out: &Path) -> Result<Vec<Check>, CliError> {
    let law = AnyLaw::try_from(cfg.dist)?;
    let paths = simulate_ep_paths(&law, &cfg.times, cfg.n, cfg.seed)?;
    write_paths(out, &paths)?;
    let mut checks = vec![Check::boolean(
        "EP_nondecreasing",
        paths.iter().all(|p| p.is_nondecreasing()),
    )];
    for (i, &t) in cfg.times.iter().enumerate() {
        let ks = ks_one_sample(&marginal(&paths, i), |x| law.cdf_power(x, t))?;
        checks.push(Check::ks("EP_marginal", &ks, Some(t)));
    }
    Ok(checks)
}

fn sim_compound_ep(cfg: SimCompoundEpConfig, out: &Path) -> Result<Vec<Check>, CliError> {
    let law = AnyLaw::try_from(cfg.dist)?;
    let phi = cfg.phi.validated()?;
    let paths = simulate_compound_eps(&law, phi.beta(), &cfg.times, cfg.n, cfg.seed)?;
    write_paths(out, &paths)?;
    let mut checks = vec![Check::boolean(
        "EP_nondecreasing",
        paths.iter().all(|p| p.is_nondecreasing()),
    )];
    for (i, &t) in cfg.times.iter().enumerate().filter(|(_, &t)| t > 0.0) {
        let ks = ks_one_sample(&marginal(&paths, i), |x| {
            compound_cdf_analytic(phi, &law, t, x).expect("t > 0")
        })?;
        checks.push(Check::ks("Eq4", &ks, Some(t)));
    }
    Ok(checks)
}

fn write_series(out: &Path, series: &[Vec<f64>]) -> Result<(), CliError> {
    let rows = series.iter().enumerate().flat_map(|(r, row)| {
        row.iter()
            .enumerate()
            .map(move |(n, &v)| format!("{r},{n},{}", fmt_f64(v)))
    });
    write_csv(&out.join("series.csv"), "replicate,n,value", rows).map_err(io_err(out))
}

fn sim_ar1(cfg: SimAr1Config, out: &Path) -> Result<Vec<Check>, CliError> {
    if cfg.p.is_some() {
        return Err(CliError::config("`p` belongs to sim-ar1-mod"));
    }
    let f = match AnyLaw::try_from(cfg.marginal)? {
        AnyLaw::MaxSemiStable(f) => f,
        AnyLaw::Phi(_) => {
            return Err(CliError::config(
                "sim-ar1 needs a max-semi-stable marginal (no `phi`)",
            ))
        }
    };
    let model = MaxAr1::new(cfg.rho, f, cfg.length, cfg.burn_in, cfg.init)?;
    let series = simulate_max_ar1(&model, cfg.replicates, cfg.seed);
    write_series(out, &series)?;
    let checkpoints = cfg
        .checkpoints
        .unwrap_or_else(|| default_checkpoints(cfg.burn_in));
    let mut checks = vec![Check::identity(
        &model.check_stationary_identity(&model.innovation().check_grid()),
    )];
    for rep in stationarity_report(&series, |x| model.marginal().cdf(x), &checkpoints)? {
        checks.push(Check::ks("Thm31", &rep.ks, Some(rep.index as f64)));
    }
    Ok(checks)
}

fn sim_ar1_mod(cfg: SimAr1Config, out: &Path) -> Result<Vec<Check>, CliError> {
    let p = cfg
        .p
        .ok_or_else(|| CliError::config("sim-ar1-mod needs `p`"))?;
    let g = match AnyLaw::try_from(cfg.marginal)? {
        AnyLaw::MaxSemiStable(f) => exp_max_semi_stable(f.psi().clone()),
        AnyLaw::Phi(g) => g,
    };
    let model = ModifiedMaxAr1::new(cfg.rho, p, g, cfg.length, cfg.burn_in, cfg.init)?;
    let series = simulate_modified_max_ar1(&model, cfg.replicates, cfg.seed);
    write_series(out, &series)?;
    let g = model.marginal();
    let c = 1.0 / cfg.rho;
    let checkpoints = cfg
        .checkpoints
        .unwrap_or_else(|| default_checkpoints(cfg.burn_in));
    let grid = g.psi().log_grid(2001, 3.0);
    let mut checks = vec![Check::identity(&geometric_max_identity_check(g, p, c, &grid)?)];
    for rep in stationarity_report(&series, |x| g.cdf(x), &checkpoints)? {
        checks.push(Check::ks("Thm32", &rep.ks, Some(rep.index as f64)));
    }
    // separate seed so the check is independent of replicate 0
    let draws = geometric_max_sampler(
        g,
        p,
        c,
        cfg.geometric_n.unwrap_or(cfg.replicates),
        cfg.seed.wrapping_add(1),
    )?;
    let ks = ks_one_sample(&draws, |x| g.cdf(x))?;
    checks.push(Check::ks("Eq10_geometric", &ks, None));
    Ok(checks)
}
