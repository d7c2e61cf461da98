//! Subcommand bodies. Each one computes every table in memory and returns
//! the files to write, so a failed run leaves nothing behind.

use std::f64::consts::FRAC_PI_2;

use wfl_core::io::{
    limit_rows, viscous_rows, write_rows, write_sweep, CoefficientRow, KRow, NapRow, PerceivedRow,
};
use wfl_core::{
    angle_sweep, axial_tension, integrate, nap_coefficients, perceived_extrema, run_sweep,
    solve_limit, uniform_grid, BristleModel, KFunction, PerceivedProfile, SweepPoint, WigglySystem,
};

use crate::config::{linspace, AngleGrid, Experiment};
use crate::error::CliError;
use crate::svg::{Band, Plot};

/// A named output file.
pub struct Artifact {
    pub name: String,
    pub contents: Vec<u8>,
}

impl Artifact {
    fn csv<T: serde::Serialize>(name: &str, rows: &[T]) -> Result<Self, CliError> {
        let mut buf = Vec::new();
        write_rows(&mut buf, rows)?;
        Ok(Artifact {
            name: name.into(),
            contents: buf,
        })
    }

    fn svg(name: &str, plot: &Plot) -> Self {
        Artifact {
            name: name.into(),
            contents: plot.render().into_bytes(),
        }
    }
}

pub struct Outcome {
    pub files: Vec<Artifact>,
    pub summary: Vec<String>,
}

pub fn coeffs(exp: &Experiment) -> Result<Outcome, CliError> {
    let model = exp.config.model;
    let c = exp.coefficients;
    let (op, om) = perceived_extrema(&exp.profile, model.slope_factor())?;
    let row = CoefficientRow {
        model: model.name().into(),
        angle: None,
        alpha: c.alpha,
        mu_plus: c.mu_plus,
        mu_minus: c.mu_minus,
        rho_plus: c.rho_plus,
        rho_minus: c.rho_minus,
        mu_plus_oracle: op,
        mu_minus_oracle: om,
    };
    let json = serde_json::to_vec_pretty(&serde_json::json!({ "model": model, "coefficients": c }))
        .map_err(|e| CliError::Output(e.into()))?;
    Ok(Outcome {
        files: vec![
            Artifact::csv("coeffs.csv", &[row])?,
            Artifact {
                name: "coeffs.json".into(),
                contents: json,
            },
        ],
        summary: vec![format!(
            "{}: alpha = {:.6}, mu+ = {:.6}, mu- = {:.6}, rho+ = {:.6}, rho- = {:.6} (oracle gap {:.1e})",
            model.name(),
            c.alpha,
            c.mu_plus,
            c.mu_minus,
            c.rho_plus,
            c.rho_minus,
            (op - c.mu_plus).abs().max((om - c.mu_minus).abs())
        )],
    })
}

/// Default sweep range: every angle at which the slope factor stays admissible, minus 0.01.
fn default_angles(exp: &Experiment) -> Result<AngleGrid, CliError> {
    let e = exp.profile.derivative_extrema()?;
    let upper = if e.omega_plus > 0.0 {
        (1.0 / e.omega_plus).atan()
    } else {
        FRAC_PI_2
    };
    let (from, to) = match exp.config.model {
        BristleModel::Slanted { .. } => (0.01, upper - 0.01),
        BristleModel::Angular { .. } => ((-e.omega_minus).atan() + 0.01, upper - 0.01),
        BristleModel::Vertical { .. } => {
            return Err(CliError::Config(
                "sweep-theta needs a slanted or angular model".into(),
            ))
        }
    };
    Ok(AngleGrid {
        from,
        to,
        count: 50,
    })
}

pub fn sweep_theta(exp: &Experiment, svg: bool) -> Result<Outcome, CliError> {
    let grid = match exp.config.angles {
        Some(g) => g,
        None => default_angles(exp)?,
    };
    let base = exp.config.model;
    let make = |angle: f64| match base {
        BristleModel::Slanted {
            k,
            rest_length,
            height,
            ..
        } => BristleModel::slanted(k, rest_length, height, angle),
        BristleModel::Angular {
            k,
            length,
            theta_rest,
            ..
        } => BristleModel::angular(k, length, length * angle.cos(), theta_rest),
        BristleModel::Vertical { .. } => Err(wfl_core::Error::InvalidModel(
            "sweep-theta needs a slanted or angular model".into(),
        )),
    };
    let points: Vec<SweepPoint> =
        angle_sweep(make, &grid.points(), &exp.profile).map_err(CliError::config)?;
    let rows: Vec<CoefficientRow> = points
        .iter()
        .map(|p| CoefficientRow {
            model: base.name().into(),
            angle: Some(p.angle),
            alpha: p.coefficients.alpha,
            mu_plus: p.coefficients.mu_plus,
            mu_minus: p.coefficients.mu_minus,
            rho_plus: p.coefficients.rho_plus,
            rho_minus: p.coefficients.rho_minus,
            mu_plus_oracle: p.oracle.0,
            mu_minus_oracle: p.oracle.1,
        })
        .collect();
    let gap = rows
        .iter()
        .map(|r| {
            (r.mu_plus - r.mu_plus_oracle)
                .abs()
                .max((r.mu_minus - r.mu_minus_oracle).abs())
        })
        .fold(0.0, f64::max);
    let mut files = vec![Artifact::csv("sweep_theta.csv", &rows)?];
    if svg {
        let angle = if matches!(base, BristleModel::Angular { .. }) {
            "theta_lim"
        } else {
            "theta"
        };
        let series = |f: fn(&CoefficientRow) -> f64| {
            rows.iter()
                .map(|r| (r.angle.unwrap_or_default(), f(r)))
                .collect()
        };
        let plot = Plot::new(
            &format!("{} model: geometric factors", base.name()),
            angle,
            "mu",
        )
        .line("mu+", series(|r| r.mu_plus))
        .line("mu-", series(|r| r.mu_minus))
        .markers("mu+ (inversion)", series(|r| r.mu_plus_oracle))
        .markers("mu- (inversion)", series(|r| r.mu_minus_oracle));
        files.push(Artifact::svg("sweep_theta.svg", &plot));
    }
    Ok(Outcome {
        files,
        summary: vec![format!(
            "{} angles in [{:.4}, {:.4}], closed form vs inversion within {gap:.1e}",
            rows.len(),
            grid.from,
            grid.to
        )],
    })
}

pub fn simulate(
    exp: &Experiment,
    epsilon: Option<f64>,
    limit: bool,
    svg: bool,
) -> Result<Outcome, CliError> {
    let sim = &exp.config.simulation;
    let epsilon = epsilon
        .or_else(|| sim.epsilons.first().copied())
        .ok_or_else(|| CliError::Config("no epsilon given".into()))?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(CliError::Config(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let system = WigglySystem::new(
        exp.base.clone(),
        exp.config.model,
        exp.profile.clone(),
        epsilon,
        sim.gamma,
    )
    .map_err(CliError::config)?;
    let horizon = exp.base.horizon();
    let viscous = integrate(&system, sim.z0, horizon, &exp.integrator())?;
    let mut files = vec![Artifact::csv(
        "viscous.csv",
        &viscous_rows(&system, &viscous)?,
    )?];
    let mut summary = vec![format!(
        "viscous eps = {epsilon}: z(T) = {:.6}, dissipation = {:.6}",
        viscous.final_state(),
        viscous.total_dissipation()
    )];

    let limit_traj = if limit {
        let traj = solve_limit(
            &exp.base,
            sim.z0,
            &uniform_grid(horizon, sim.grid_intervals),
        )?;
        files.push(Artifact::csv("limit.csv", &limit_rows(&exp.base, &traj))?);
        summary.push(format!(
            "limit: z(T) = {:.6}, dissipation = {:.6}, sup |z_eps - z| = {:.3e}",
            traj.final_state(),
            traj.total_dissipation(),
            viscous.sup_distance(&traj)?
        ));
        Some(traj)
    } else {
        None
    };

    if svg {
        let (lower, upper): (Vec<f64>, Vec<f64>) = viscous
            .times
            .iter()
            .map(|&t| exp.base.elastic_strip(t))
            .unzip();
        let mut plot = Plot::new(&format!("trajectories, eps = {epsilon}"), "t", "z")
            .band(Band {
                label: "elastic strip".into(),
                x: viscous.times.clone(),
                lower,
                upper,
            })
            .line(
                "z_eps",
                viscous
                    .times
                    .iter()
                    .copied()
                    .zip(viscous.states.iter().copied())
                    .collect(),
            );
        if let Some(traj) = &limit_traj {
            plot = plot.line(
                "z limit",
                traj.times
                    .iter()
                    .copied()
                    .zip(traj.states.iter().copied())
                    .collect(),
            );
        }
        files.push(Artifact::svg("simulate.svg", &plot));
    }
    Ok(Outcome { files, summary })
}

pub fn converge(exp: &Experiment, threads: Option<usize>, svg: bool) -> Result<Outcome, CliError> {
    let setup = exp.sweep_setup(threads);
    let epsilons = &exp.config.simulation.epsilons;
    let report = run_sweep(&setup, epsilons).map_err(|f| {
        eprintln!(
            "sweep aborted at eps = {} after {} of {} scales",
            f.epsilon,
            f.partial.len(),
            epsilons.len()
        );
        CliError::Runtime(f.source)
    })?;
    let mut buf = Vec::new();
    write_sweep(&mut buf, &report)?;
    let mut files = vec![Artifact {
        name: "converge.csv".into(),
        contents: buf,
    }];
    if svg {
        let measured: Vec<(f64, f64)> = report
            .epsilons
            .iter()
            .copied()
            .zip(report.sup_errors.iter().copied())
            .collect();
        let mut plot = Plot::new(
            "convergence of the viscous flow",
            "epsilon",
            "sup |z_eps - z|",
        )
        .log_log()
        .markers("sup error", measured);
        if let (Some(p), Some(&e0), Some(&s0)) = (
            report.fitted_order,
            report.epsilons.first(),
            report.sup_errors.first(),
        ) {
            let fit = report
                .epsilons
                .iter()
                .map(|&e| (e, s0 * (e / e0).powf(p)))
                .collect();
            plot = plot.line(&format!("slope {p:.2}"), fit);
        }
        files.push(Artifact::svg("converge.svg", &plot));
    }
    let mut summary: Vec<String> = (0..report.len())
        .map(|i| {
            format!(
                "eps = {:<8} sup error = {:.4e}  gaps = {:?}  ({:.2} s)",
                report.epsilons[i],
                report.sup_errors[i],
                report.dissipation_gaps[i],
                report.runtimes[i]
            )
        })
        .collect();
    summary.push(match report.fitted_order {
        Some(p) => format!("fitted order {p:.3}"),
        None => "fitted order: n/a".into(),
    });
    Ok(Outcome { files, summary })
}

pub fn nap(exp: &Experiment) -> Result<Outcome, CliError> {
    let model = exp.config.model;
    let BristleModel::Angular {
        k, length, height, ..
    } = model
    else {
        return Err(CliError::Config(format!(
            "nap needs the angular model, got {}",
            model.name()
        )));
    };
    let theta_lim = model.theta_lim().unwrap_or_default();
    let nap = &exp.config.nap;
    let angles = match &nap.theta_with {
        Some(a) => a.clone(),
        None => linspace(0.0, theta_lim, nap.count + 1)[..nap.count].to_vec(),
    };
    let mu_plus = exp.coefficients.mu_plus;
    let rows = angles
        .iter()
        .map(|&theta_with| {
            let (rho_with, rho_against) =
                nap_coefficients(mu_plus, theta_lim, theta_with).map_err(CliError::config)?;
            let with =
                BristleModel::angular(k, length, height, theta_with).map_err(CliError::config)?;
            let against =
                BristleModel::angular(k, length, height, -theta_with).map_err(CliError::config)?;
            let tension_with = axial_tension(&with, rho_with)?;
            let tension_against = axial_tension(&against, rho_against)?;
            Ok(NapRow {
                theta_lim,
                theta_with,
                rho_with,
                rho_against,
                ratio: rho_against / rho_with,
                tension_with,
                tension_against,
                compressed_with: tension_with < 0.0,
                compressed_against: tension_against < 0.0,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let compressed = rows.iter().filter(|r| r.compressed_against).count();
    Ok(Outcome {
        files: vec![Artifact::csv("nap.csv", &rows)?],
        summary: vec![format!(
            "theta_lim = {theta_lim:.6}, mu+ = {mu_plus:.6}; {} rest angles, {compressed} compressed against the nap",
            rows.len()
        )],
    })
}

pub fn perceived(exp: &Experiment, svg: bool) -> Result<Outcome, CliError> {
    let a = exp.config.model.slope_factor();
    let points = exp.config.perceived.points;
    if points == 0 {
        return Err(CliError::Config("perceived.points must be positive".into()));
    }
    let perceived = PerceivedProfile::with_resolution(&exp.profile, a, points)?;
    let rows = perceived
        .grid()
        .iter()
        .zip(perceived.tabulated_values())
        .zip(perceived.tabulated_slopes())
        .map(|((&z, &w), &w_slope)| {
            Ok(PerceivedRow {
                z,
                p: perceived.inverse(z)?,
                w,
                w_slope,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let (mu_plus, mu_minus) = perceived.slope_extrema()?;
    let mut files = vec![Artifact::csv("perceived.csv", &rows)?];
    if svg {
        let plot = Plot::new(&format!("perceived profile, a = {a:.4}"), "z", "")
            .line("W(z)", rows.iter().map(|r| (r.z, r.w)).collect())
            .line("W'(z)", rows.iter().map(|r| (r.z, r.w_slope)).collect())
            .line(
                "w(z)",
                rows.iter().map(|r| (r.z, exp.profile.value(r.z))).collect(),
            );
        files.push(Artifact::svg("perceived.svg", &plot));
    }
    Ok(Outcome {
        files,
        summary: vec![format!(
            "a = {a:.6}: mu+ = {mu_plus:.10}, mu- = {mu_minus:.10}"
        )],
    })
}

pub fn k_table(exp: &Experiment, svg: bool) -> Result<Outcome, CliError> {
    let k = KFunction::from_model(&exp.config.model, &exp.profile)?;
    let i = k.interval();
    let spec = &exp.config.k_table;
    let from = spec.from.unwrap_or(2.0 * i.lower);
    let to = spec.to.unwrap_or(2.0 * i.upper);
    if !(from < to) || spec.count < 2 {
        return Err(CliError::Config(format!(
            "k_table needs from < to and count >= 2, got [{from}, {to}] with {}",
            spec.count
        )));
    }
    let rows: Vec<KRow> = k
        .table(&linspace(from, to, spec.count))
        .into_iter()
        .map(|(xi, k)| KRow { xi, k })
        .collect();
    let mut files = vec![Artifact::csv("k_table.csv", &rows)?];
    if svg {
        let plot = Plot::new("limit dissipation factor", "xi", "K")
            .line("K(xi)", rows.iter().map(|r| (r.xi, r.k)).collect())
            .line("|xi|", rows.iter().map(|r| (r.xi, r.xi.abs())).collect());
        files.push(Artifact::svg("k_table.svg", &plot));
    }
    Ok(Outcome {
        files,
        summary: vec![format!(
            "{} points on [{from}, {to}], elastic domain [{}, {}], K(0) = {:.10}",
            rows.len(),
            i.lower,
            i.upper,
            k.eval(0.0)
        )],
    })
}
