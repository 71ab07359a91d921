//! The five subcommands. Each checks its extra requirements on the scenario
//! before touching the output directory.

use std::iter;

use fracanneal_core::analysis::{
    gronwall_ladder, jackknife_se, mean_var, quadrature_rate_fit, GronwallConstants, Welford,
};
use fracanneal_core::ensemble::{ReplicateMap, WienerEnsemble};
use fracanneal_core::fbm::{
    discrete_covariance, fbm_from_wiener, fbm_values_at, liouville_covariance, mandelbrot_covariance,
};
use fracanneal_core::sde::{driving_paths, euler_maruyama, AnnealingConfig, EnergyFunction};
use fracanneal_core::steady::{
    expm_paper, find_steady_state, linear_solution, linearize, reconstruct_state, ExpmMode, LinearModel,
    SolverOptions, XiVariant,
};
use fracanneal_core::{FbmPath, HurstParam};

use crate::error::{CliError, CliResult};
use crate::output::{finish, num, Staging};
use crate::scenario::Run;

/// Replicates evaluated between two writes.
const CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SimulateFbm,
    Anneal,
    Linearize,
    Converge,
    Covcheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SimulateFbm => "simulate-fbm",
            Command::Anneal => "anneal",
            Command::Linearize => "linearize",
            Command::Converge => "converge",
            Command::Covcheck => "covcheck",
        }
    }

    /// Command-specific scenario requirements.
    pub fn check(self, run: &Run) -> CliResult<()> {
        match self {
            Command::SimulateFbm => Ok(()),
            Command::Anneal => {
                run.require_energy()?;
                run.require_temperature()?;
                run.require_x_init()?;
                run.require_replicates(2)
            }
            Command::Linearize => {
                run.require_two_dims()?;
                run.require_energy()?;
                run.require_temperature()?;
                run.require_x_init().map(|_| ())
            }
            Command::Converge => {
                run.require_two_dims()?;
                run.require_energy()?;
                run.require_temperature()?;
                run.require_x_init()?;
                run.require_replicates(2)?;
                if run.ladder.len() < 4 {
                    return Err(CliError::config(format!(
                        "epsilon_ladder: needs at least 4 rungs, got {}",
                        run.ladder.len()
                    )));
                }
                if let Some(j) = run.hurst.iter().position(|h| h.is_brownian()) {
                    return Err(CliError::config(format!(
                        "hurst[{j}]: at H = 0.5 the kernels coincide and the difference is identically zero"
                    )));
                }
                Ok(())
            }
            Command::Covcheck => run.require_replicates(2),
        }
    }

    pub fn execute<X: ReplicateMap>(self, run: &Run, out: &mut Staging, exec: &X) -> CliResult<()> {
        match self {
            Command::SimulateFbm => simulate_fbm(run, out, exec),
            Command::Anneal => anneal(run, out, exec),
            Command::Linearize => linearize_cmd(run, out, exec),
            Command::Converge => converge(run, out, exec),
            Command::Covcheck => covcheck(run, out, exec),
        }
    }
}

fn numeric(e: fracanneal_core::Error) -> CliError {
    CliError::numeric(e.to_string())
}

fn ensemble(run: &Run) -> CliResult<WienerEnsemble> {
    WienerEnsemble::new(run.grid, run.dims(), run.seed(), run.replicates()).map_err(|e| CliError::config(e.to_string()))
}

/// Maps `f` over all replicates in chunks, handing each finished chunk to
/// `sink` in replicate order. The first error in replicate order wins.
fn chunked<X, T, F, S>(exec: &X, total: usize, f: F, mut sink: S) -> CliResult<()>
where
    X: ReplicateMap,
    T: Send,
    F: Fn(usize) -> CliResult<T> + Sync + Send,
    S: FnMut(usize, T) -> CliResult<()>,
{
    let mut start = 0;
    while start < total {
        let len = CHUNK.min(total - start);
        let results = exec.map_replicates(len, |i| f(start + i));
        for (i, r) in results.into_iter().enumerate() {
            sink(start + i, r?)?;
        }
        start += len;
    }
    Ok(())
}

fn exact_then_ladder(run: &Run) -> Vec<f64> {
    iter::once(0.0).chain(run.ladder.iter().copied()).collect()
}

fn simulate_fbm<X: ReplicateMap>(run: &Run, out: &mut Staging, exec: &X) -> CliResult<()> {
    let ens = ensemble(run)?;
    let eps = exact_then_ladder(run);
    let times: Vec<String> = run.grid.nodes().into_iter().map(num).collect();
    let eps_text: Vec<String> = eps.iter().map(|e| num(*e)).collect();
    let mut w = out.csv("fbm_paths.csv", &["t", "replicate", "dim", "value", "epsilon"])?;
    chunked(
        exec,
        ens.replicates,
        |r| {
            let wp = ens.path(r);
            let mut paths = Vec::with_capacity(run.dims() * eps.len());
            for (j, &h) in run.hurst.iter().enumerate() {
                for &e in &eps {
                    paths.push(fbm_from_wiener(&wp, h, e, j).map_err(numeric)?);
                }
            }
            Ok(paths)
        },
        |r, paths: Vec<FbmPath>| {
            let rep = r.to_string();
            for (k, p) in paths.iter().enumerate() {
                let dim = (k / eps.len()).to_string();
                for (t, v) in times.iter().zip(&p.values) {
                    w.write_record([t.as_str(), &rep, &dim, &num(*v), &eps_text[k % eps.len()]])?;
                }
            }
            Ok(())
        },
    )?;
    finish(w)
}

fn anneal<X: ReplicateMap>(run: &Run, out: &mut Staging, exec: &X) -> CliResult<()> {
    let g = run.require_energy()?;
    let d = run.dims();
    let cfg = AnnealingConfig::new(
        run.require_temperature()?,
        run.hurst.clone(),
        vec![0.0; d],
        run.require_x_init()?.to_vec(),
        run.grid,
    )
    .map_err(|e| CliError::config(e.to_string()))?;
    let ens = ensemble(run)?;
    let times: Vec<String> = run.grid.nodes().into_iter().map(num).collect();

    let xs: Vec<String> = (1..=d).map(|j| format!("x{j}")).collect();
    let mut header: Vec<&str> = vec!["t", "replicate"];
    header.extend(xs.iter().map(String::as_str));
    header.push("energy");
    let mut w = out.csv("anneal_paths.csv", &header)?;

    // per node: one accumulator per coordinate, then the energy
    let mut stats = vec![vec![Welford::default(); d + 1]; times.len()];
    chunked(
        exec,
        ens.replicates,
        |r| {
            let drivers = driving_paths(&cfg, &ens.path(r)).map_err(numeric)?;
            euler_maruyama(g, &cfg, &drivers).map_err(|e| CliError::numeric(format!("replicate {r}: {e}")))
        },
        |r, path| {
            let rep = r.to_string();
            for (n, row) in path.rows().enumerate() {
                let e = g.value(row);
                let mut rec = vec![times[n].clone(), rep.clone()];
                rec.extend(row.iter().map(|v| num(*v)));
                rec.push(num(e));
                w.write_record(&rec)?;
                for (acc, v) in stats[n].iter_mut().zip(row.iter().chain(iter::once(&e))) {
                    acc.push(*v);
                }
            }
            Ok(())
        },
    )?;
    finish(w)?;

    let mut header = vec!["t".to_string()];
    header.extend((1..=d).map(|j| format!("mean_x{j}")));
    header.push("mean_energy".into());
    header.extend((1..=d).map(|j| format!("se_x{j}")));
    header.push("se_energy".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut w = out.csv("anneal_summary.csv", &header)?;
    for (t, accs) in times.iter().zip(&stats) {
        let mut rec = vec![t.clone()];
        rec.extend(accs.iter().map(|a| num(a.mean())));
        rec.extend(accs.iter().map(|a| num(a.std_error())));
        w.write_record(&rec)?;
    }
    finish(w)
}

fn steady_model(run: &Run) -> CliResult<LinearModel> {
    let g = run.require_energy()?;
    let steady = find_steady_state(g, run.require_x_init()?, SolverOptions::default())
        .map_err(|e| CliError::numeric(format!("steady state search: {e}")))?;
    linearize(g, &steady, run.require_temperature()?).map_err(numeric)
}

fn pair(run: &Run) -> [HurstParam; 2] {
    [run.hurst[0], run.hurst[1]]
}

fn linearize_cmd<X: ReplicateMap>(run: &Run, out: &mut Staging, exec: &X) -> CliResult<()> {
    let model = steady_model(run)?;
    let dt = run.grid.dt();
    let deviation = |v| expm_paper(&model, dt, v).map_or(f64::NAN, |c| c.deviation);
    let mut w = out.csv(
        "linear_model.csv",
        &[
            "x_star_1",
            "x_star_2",
            "gradient_norm",
            "iterations",
            "a1",
            "b1",
            "a2",
            "b2",
            "lambda",
            "xi_paper",
            "xi_sqrt",
            "tau",
            "expm_deviation_paper",
            "expm_deviation_sqrt",
        ],
    )?;
    let s = &model.steady;
    w.write_record([
        num(s.point[0]),
        num(s.point[1]),
        num(s.gradient_norm),
        s.iterations.to_string(),
        num(model.a1()),
        num(model.b1()),
        num(model.a2()),
        num(model.b2()),
        num(model.lambda),
        num(model.xi_paper),
        num(model.xi_sqrt),
        num(dt),
        num(deviation(XiVariant::Printed)),
        num(deviation(XiVariant::SquareRoot)),
    ])?;
    finish(w)?;

    let ens = ensemble(run)?;
    let hurst = pair(run);
    let eps = exact_then_ladder(run);
    let times: Vec<String> = run.grid.nodes().into_iter().map(num).collect();
    let mut w = out.csv("linear_paths.csv", &["t", "replicate", "epsilon", "u1", "u2", "x1", "x2"])?;
    chunked(
        exec,
        ens.replicates,
        |r| {
            let wp = ens.path(r);
            eps.iter()
                .map(|&e| {
                    let d0 = fbm_from_wiener(&wp, hurst[0], e, 0).map_err(numeric)?;
                    let d1 = fbm_from_wiener(&wp, hurst[1], e, 1).map_err(numeric)?;
                    let u = linear_solution(&model, [&d0, &d1], ExpmMode::General).map_err(numeric)?;
                    let x = reconstruct_state(&model.steady, &u).map_err(numeric)?;
                    Ok((u, x))
                })
                .collect::<CliResult<Vec<_>>>()
        },
        |r, sols| {
            let rep = r.to_string();
            for ((u, x), e) in sols.iter().zip(&eps) {
                let e = num(*e);
                for (n, t) in times.iter().enumerate() {
                    let (un, xn) = (u.row(n), x.row(n));
                    w.write_record([
                        t.as_str(),
                        &rep,
                        &e,
                        &num(un[0]),
                        &num(un[1]),
                        &num(xn[0]),
                        &num(xn[1]),
                    ])?;
                }
            }
            Ok(())
        },
    )?;
    finish(w)
}

fn converge<X: ReplicateMap>(run: &Run, out: &mut Staging, exec: &X) -> CliResult<()> {
    let hurst = pair(run);
    let t_fit = *run.checkpoints.last().expect("validated non-empty");
    let mut w = out.csv(
        "rate_report.csv",
        &[
            "dim",
            "hurst",
            "t",
            "quantity",
            "nominal_slope",
            "slope",
            "intercept",
            "r_squared",
            "prefactor",
        ],
    )?;
    for (j, h) in hurst.iter().enumerate() {
        let fit = quadrature_rate_fit(t_fit, *h, &run.ladder).map_err(numeric)?;
        for (name, nominal, rep) in [
            ("variance", 2.0 * h.h(), &fit.variance),
            ("rms", h.h(), &fit.rms),
        ] {
            w.write_record([
                j.to_string(),
                num(h.h()),
                num(t_fit),
                name.to_string(),
                num(nominal),
                num(rep.slope),
                num(rep.intercept),
                num(rep.r_squared),
                num(rep.prefactor()),
            ])?;
        }
    }
    finish(w)?;

    let model = steady_model(run)?;
    let constants = GronwallConstants::from_quadrature(t_fit, hurst, &run.ladder).map_err(numeric)?;
    let ens = ensemble(run)?;
    let reports = gronwall_ladder(&model, hurst, &run.ladder, &ens, &run.checkpoints, &constants, exec)
        .map_err(numeric)?;
    let mut w = out.csv(
        "gronwall_report.csv",
        &[
            "epsilon",
            "t",
            "measured",
            "measured_se",
            "bound_paper",
            "bound_safe",
            "c_alpha_eps",
            "m_paper",
            "m_safe",
            "replicates",
        ],
    )?;
    for rep in &reports {
        for k in 0..rep.t_checkpoints.len() {
            w.write_record([
                num(rep.epsilon[0]),
                num(rep.t_checkpoints[k]),
                num(rep.measured[k]),
                num(rep.measured_se[k]),
                num(rep.bound_paper[k]),
                num(rep.bound_safe[k]),
                num(rep.c_alpha_eps),
                num(rep.m_paper),
                num(rep.m_safe),
                rep.replicates.to_string(),
            ])?;
        }
    }
    finish(w)
}

fn covcheck<X: ReplicateMap>(run: &Run, out: &mut Staging, exec: &X) -> CliResult<()> {
    let ens = ensemble(run)?;
    let eps = exact_then_ladder(run);
    let nodes: Vec<usize> = run
        .checkpoints
        .iter()
        .map(|&t| run.grid.index_of(t).expect("validated on grid"))
        .collect();
    // samples[dim][eps][checkpoint] → one value per replicate
    let mut samples = vec![vec![vec![Vec::with_capacity(ens.replicates); nodes.len()]; eps.len()]; run.dims()];
    chunked(
        exec,
        ens.replicates,
        |r| {
            let wp = ens.path(r);
            let mut v = Vec::with_capacity(run.dims() * eps.len());
            for (j, &h) in run.hurst.iter().enumerate() {
                for &e in &eps {
                    v.push(fbm_values_at(&wp, h, e, j, &nodes).map_err(numeric)?);
                }
            }
            Ok(v)
        },
        |_, v: Vec<Vec<f64>>| {
            for (k, vals) in v.into_iter().enumerate() {
                let slot = &mut samples[k / eps.len()][k % eps.len()];
                for (c, x) in slot.iter_mut().zip(vals) {
                    c.push(x);
                }
            }
            Ok(())
        },
    )?;

    let mut w = out.csv(
        "covariance.csv",
        &[
            "dim",
            "hurst",
            "epsilon",
            "t",
            "s",
            "mc",
            "mc_se",
            "discrete",
            "continuous",
            "mandelbrot",
        ],
    )?;
    for (j, &h) in run.hurst.iter().enumerate() {
        for (ei, &e) in eps.iter().enumerate() {
            let cols = &samples[j][ei];
            for a in 0..nodes.len() {
                for b in 0..=a {
                    let (x, y) = (&cols[a], &cols[b]);
                    let prod: Vec<f64> = x.iter().zip(y).map(|(p, q)| p * q).collect();
                    let stat = |m: &[f64]| m[0] - m[1] * m[2];
                    let mc = stat(&[mean_var(&prod).0, mean_var(x).0, mean_var(y).0]);
                    let se = jackknife_se(&[&prod, x, y], stat);
                    let (t, s) = (run.checkpoints[a], run.checkpoints[b]);
                    let cont = liouville_covariance(t, s, h, e).map_err(numeric)?;
                    let mandel = if h.is_brownian() {
                        num(mandelbrot_covariance(t, s, h).map_err(numeric)?)
                    } else {
                        String::new()
                    };
                    w.write_record([
                        j.to_string(),
                        num(h.h()),
                        num(e),
                        num(t),
                        num(s),
                        num(mc),
                        num(se),
                        num(discrete_covariance(&run.grid, h, e, nodes[a], nodes[b])),
                        num(cont),
                        mandel,
                    ])?;
                }
            }
        }
    }
    finish(w)
}
