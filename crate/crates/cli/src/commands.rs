use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use schwinger_core::bounds::{bound_report, fit_reports, write_reports_csv, BoundReport};
use schwinger_core::compiler::xx_per_step;
use schwinger_core::model::bare_vacuum_index;
use schwinger_core::observables::{
    post_select, sector_bitstrings, write_observables_csv, write_projections_csv, ObservableRow,
};
use schwinger_core::state::ExactPropagator;
use schwinger_core::trotter::{alpha_sweep as sweep, optimize_alpha1};
use schwinger_core::{bare_vacuum, build_step, compile_step, count_gates, evolve as trotter_evolve, verify_circuit};
use serde_json::json;

use crate::config::RunConfig;
use crate::CliError;

/// Writes `out/name` through `body`, flushing before returning.
fn write_file(
    out: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(out.join(name))?);
    body(&mut w)?;
    w.flush()?;
    Ok(())
}

fn write_csv_with_header(
    cfg: &RunConfig,
    out: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<File>) -> schwinger_core::Result<()>,
) -> Result<(), CliError> {
    write_file(out, name, |w| {
        writeln!(w, "{}", cfg.header())?;
        Ok(body(w)?)
    })
}

fn write_json(out: &Path, name: &str, value: &serde_json::Value) -> Result<(), CliError> {
    write_file(out, name, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(schwinger_core::Error::from)?;
        writeln!(w)?;
        Ok(())
    })
}

fn write_series(cfg: &RunConfig, out: &Path, series: &str, rows: &[ObservableRow]) -> Result<(), CliError> {
    write_csv_with_header(cfg, out, &format!("observables_{series}.csv"), |w| write_observables_csv(rows, w))?;
    if cfg.observables.projections {
        write_csv_with_header(cfg, out, &format!("projections_{series}.csv"), |w| write_projections_csv(rows, w))?;
    }
    Ok(())
}

/// Trotter trajectory from the bare vacuum; optionally the exact trajectory,
/// and sampled populations before and after zero-charge post-selection.
pub fn evolve(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let plan = cfg.plan()?;
    let n = cfg.model.n_sites;
    let model = cfg.model.build(n)?;
    let psi0 = bare_vacuum(model.params())?;
    let bits = cfg.observables.projections.then(|| sector_bitstrings(n, 0));
    let proj = bits.as_deref();
    let time = |k: usize| k as f64 * plan.dt;

    // built first so an oversized lattice fails before any work is done
    let exact = cfg.observables.exact.then(|| ExactPropagator::new(&model, cfg.dense_limit)).transpose()?;

    let traj = trotter_evolve(&model, &psi0, plan)?;
    let rows = traj
        .iter()
        .enumerate()
        .map(|(k, psi)| ObservableRow::from_state(time(k), psi, &psi0, 0, proj))
        .collect::<schwinger_core::Result<Vec<_>>>()?;
    write_series(cfg, out, "trotter", &rows)?;

    if let Some(prop) = exact {
        let rows = (0..=plan.steps)
            .into_par_iter()
            .map(|k| ObservableRow::from_state(time(k), &prop.evolve(&psi0, time(k))?, &psi0, 0, proj))
            .collect::<schwinger_core::Result<Vec<_>>>()?;
        write_series(cfg, out, "exact", &rows)?;
    }

    if let Some(shots) = cfg.shots {
        let vac = bare_vacuum_index(n);
        let (raw, selected): (Vec<_>, Vec<_>) = traj
            .par_iter()
            .enumerate()
            .map(|(k, psi)| {
                let pop = psi.sample(shots, cfg.seed.wrapping_add(k as u64))?;
                let raw = ObservableRow::from_populations(time(k), &pop, vac, 0, proj)?;
                let sel = ObservableRow::from_populations(time(k), &post_select(&pop, 0)?, vac, 0, proj)?;
                Ok((raw, sel))
            })
            .collect::<schwinger_core::Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        write_series(cfg, out, "sampled", &raw)?;
        write_series(cfg, out, "postselected", &selected)?;
    }
    Ok(())
}

/// Step counts for each lattice size, plus power-law fits when there are at
/// least three sizes.
pub fn bounds(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let b = &cfg.bounds;
    if b.sites.is_empty() {
        return Err(CliError::Config("bounds.sites is empty".into()));
    }
    if let Some(&odd) = b.sites.iter().find(|&&n| n % 2 != 0 || n < 2) {
        return Err(CliError::Config(format!("bounds.sites must hold even sizes ≥ 2, got {odd}")));
    }
    if !(b.epsilon > 0.0 && b.dt > 0.0 && b.t.is_none_or(|t| t > 0.0)) {
        return Err(CliError::Config("bounds.epsilon, bounds.dt and bounds.t must be positive".into()));
    }
    let reports = b
        .sites
        .par_iter()
        .map(|&n| {
            let m = cfg.model.build(n)?;
            let t = b.t.unwrap_or(n as f64);
            Ok(bound_report(&m, t, b.epsilon, b.dt, b.lambda_reading, cfg.dense_limit)?)
        })
        .collect::<Result<Vec<BoundReport>, CliError>>()?;

    write_csv_with_header(cfg, out, "bounds.csv", |w| write_reports_csv(&reports, w))?;
    let mut sizes = b.sites.clone();
    sizes.sort_unstable();
    sizes.dedup();
    let fits = if sizes.len() >= 3 { Some(fit_reports(&reports)?) } else { None };
    write_json(out, "fits.json", &json!({ "config": cfg, "fits": fits, "reports": reports }))
}

/// Best `α₁` per evolution time.
pub fn alpha_sweep(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let a = &cfg.alpha;
    let model = cfg.model.build(cfg.model.n_sites)?;
    let optima = a
        .times
        .par_iter()
        .map(|&t| optimize_alpha1(&model, a.ordering, a.dt, t, a.grid_points))
        .collect::<schwinger_core::Result<Vec<_>>>()?;

    write_csv_with_header(cfg, out, "alpha.csv", |w| {
        writeln!(w, "t,alpha1,leakage")?;
        for (t, o) in a.times.iter().zip(&optima) {
            writeln!(w, "{t},{},{}", o.alpha1, o.leakage)?;
        }
        Ok(())
    })?;
    let rows: Vec<_> = a
        .times
        .iter()
        .zip(&optima)
        .map(|(t, o)| json!({ "t": t, "alpha1": o.alpha1, "leakage": o.leakage, "local_minima": o.local_minima }))
        .collect();
    write_json(out, "alpha.json", &json!({ "config": cfg, "rows": rows }))?;

    if a.curves {
        let curves = a
            .times
            .par_iter()
            .map(|&t| sweep(&model, a.ordering, a.dt, t, a.grid_points))
            .collect::<schwinger_core::Result<Vec<_>>>()?;
        write_csv_with_header(cfg, out, "alpha_curves.csv", |w| {
            writeln!(w, "t,alpha1,leakage")?;
            for (t, curve) in a.times.iter().zip(&curves) {
                for (alpha, leak) in curve {
                    writeln!(w, "{t},{alpha},{leak}")?;
                }
            }
            Ok(())
        })?;
    }
    Ok(())
}

/// One compiled first-order step as text, and its gate counts.
pub fn compile(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let plan = cfg.plan()?;
    if plan.order_p != 1 {
        return Err(CliError::Config(format!("compile emits first-order steps; set plan.p to 1 (got {})", plan.order_p)));
    }
    if plan.protection.is_some() {
        return Err(CliError::Config("compile does not take a protection schedule".into()));
    }
    let n = cfg.model.n_sites;
    let model = cfg.model.build(n)?;
    let circuit = compile_step(&model, plan.ordering, plan.dt)?;
    let verification = if n <= cfg.dense_limit {
        Some(verify_circuit(&circuit, &build_step(&model, plan.ordering, 1, plan.dt)?)?)
    } else {
        None
    };

    write_file(out, "circuit.txt", |w| {
        let text = circuit.to_text();
        let (first, rest) = text.split_once('\n').expect("header line");
        writeln!(w, "{first}\n{}", cfg.header())?;
        w.write_all(rest.as_bytes())?;
        Ok(())
    })?;
    let counts = count_gates(&circuit);
    write_json(
        out,
        "gates.json",
        &json!({
            "config": cfg,
            "n_sites": n,
            "ordering": plan.ordering,
            "dt": plan.dt,
            "steps": plan.steps,
            "per_step": counts,
            "xx_per_step_formula": xx_per_step(n),
            "total": { "xx": counts.xx * plan.steps, "r": counts.r * plan.steps, "z": counts.z * plan.steps },
            "verification_error": verification,
        }),
    )
}
