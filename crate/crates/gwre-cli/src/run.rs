//! Subcommand implementations: build the requested object, write one CSV.

use crate::config::{Precision, RunConfig};
use crate::csvio::write_csv;
use crate::CliError;
use gwre::asymptotics::{amplitude_set, density_series, AmplitudeMethod};
use gwre::montecarlo::{martingale_histogram, SimConfig};
use gwre::phi::{phi_table, PhiTable};
use gwre::pseudo_inverse::b_recurrence;
use gwre::qmatrix::q_matrix;
use gwre::reference::{reference_density, ReferenceConfig, DEFAULT_SEQUENCE_BUDGET};
use gwre::{CurveMeta, DensityCurve, DoubleDouble, Environment, Real};
use std::path::Path;

fn base_meta(cfg: &RunConfig, sub: &str, precision: &str) -> Vec<(String, String)> {
    vec![
        ("tool".into(), "gwre".into()),
        ("version".into(), env!("CARGO_PKG_VERSION").into()),
        ("subcommand".into(), sub.into()),
        ("precision".into(), precision.into()),
        ("environment".into(), cfg.env_label.clone()),
    ]
}

fn build_table<R: Real>(
    env: &Environment,
    j_max: usize,
    n_max: usize,
) -> Result<PhiTable<R>, CliError> {
    let q = q_matrix::<R>(env, n_max)?;
    Ok(phi_table(&q, j_max, n_max)?)
}

fn write_curve<R: Real>(
    out: &Path,
    meta: &[(String, String)],
    aux_name: &str,
    curve: &DensityCurve<R>,
) -> Result<(), CliError> {
    let rows = (0..curve.len()).map(|i| {
        vec![
            curve.xs[i].to_sci_string(),
            curve.ps[i].to_sci_string(),
            curve.aux[i].to_sci_string(),
        ]
    });
    write_csv(out, meta, &["x", "p", aux_name], rows)
}

pub fn run_phi(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    match cfg.raw.precision {
        Precision::Standard => phi_impl::<f64>(cfg, out),
        Precision::Extended => phi_impl::<DoubleDouble>(cfg, out),
    }
}

fn phi_impl<R: Real>(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let s = cfg.phi_section()?;
    let table = build_table::<R>(&cfg.env, s.j, s.n)?;
    let mut meta = base_meta(cfg, "phi", R::PRECISION);
    meta.push(("J".into(), s.j.to_string()));
    meta.push(("N".into(), s.n.to_string()));
    let mut rows = Vec::new();
    for j in 1..=s.j {
        for n in j..=s.n {
            rows.push(vec![
                n.to_string(),
                j.to_string(),
                table.value(n, j).to_sci_string(),
            ]);
        }
    }
    write_csv(out, &meta, &["n", "j", "phi"], rows)
}

pub fn run_b(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    match cfg.raw.precision {
        Precision::Standard => b_impl::<f64>(cfg, out),
        Precision::Extended => b_impl::<DoubleDouble>(cfg, out),
    }
}

fn b_impl<R: Real>(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let s = cfg.phi_section()?;
    let table = build_table::<R>(&cfg.env, s.j, s.n)?;
    let bs = b_recurrence(&table);
    let mut meta = base_meta(cfg, "b", R::PRECISION);
    meta.push(("J".into(), s.j.to_string()));
    meta.push(("N".into(), s.n.to_string()));
    let rows = (1..=s.j).map(|j| vec![j.to_string(), bs.get(j).to_sci_string()]);
    write_csv(out, &meta, &["j", "b"], rows)
}

pub fn run_amplitudes(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    match cfg.raw.precision {
        Precision::Standard => amplitudes_impl::<f64>(cfg, out),
        Precision::Extended => amplitudes_impl::<DoubleDouble>(cfg, out),
    }
}

fn amplitudes_impl<R: Real>(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let s = cfg
        .raw
        .amplitudes
        .ok_or_else(|| CliError::Config("this subcommand needs an \"amplitudes\" section".into()))?;
    let n_needed = if s.richardson {
        (s.m as f64 * cfg.env.common_mean()).round() as usize
    } else {
        s.m
    };
    let (j_dim, n_dim) = cfg.table_dims(1, n_needed);
    let table = build_table::<R>(&cfg.env, j_dim, n_dim)?;
    let amps = amplitude_set(&table, j_dim, s.m, s.richardson)?;
    let mut meta = base_meta(cfg, "amplitudes", R::PRECISION);
    meta.push(("M".into(), s.m.to_string()));
    meta.push(("richardson".into(), s.richardson.to_string()));
    meta.push(("J".into(), j_dim.to_string()));
    meta.push(("N".into(), n_dim.to_string()));
    let rows = amps.records().iter().map(|rec| {
        let (method, m1, m2) = match rec.method {
            AmplitudeMethod::Plain { m } => ("plain", m, m),
            AmplitudeMethod::Richardson { m1, m2 } => ("richardson", m1, m2),
        };
        vec![
            rec.j.to_string(),
            rec.alpha.to_sci_string(),
            rec.amplitude.to_sci_string(),
            method.to_string(),
            m1.to_string(),
            m2.to_string(),
        ]
    });
    write_csv(
        out,
        &meta,
        &["j", "alpha", "amplitude", "method", "M1", "M2"],
        rows,
    )
}

pub fn run_density(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    match cfg.raw.precision {
        Precision::Standard => density_impl::<f64>(cfg, out),
        Precision::Extended => density_impl::<DoubleDouble>(cfg, out),
    }
}

fn density_impl<R: Real>(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let s = cfg
        .raw
        .density
        .ok_or_else(|| CliError::Config("this subcommand needs a \"density\" section".into()))?;
    let xs = s.x.points()?;
    let (j_dim, n_dim) = cfg.table_dims(s.j, s.m);
    let table = build_table::<R>(&cfg.env, j_dim, n_dim)?;
    let bs = b_recurrence(&table);
    let amps = amplitude_set(&table, s.j, s.m, false)?;
    let curve = density_series(&bs, &amps, s.j, &xs)?;
    let mut meta = base_meta(cfg, "density", R::PRECISION);
    meta.push(("J".into(), s.j.to_string()));
    meta.push(("M".into(), s.m.to_string()));
    meta.push(("N".into(), n_dim.to_string()));
    meta.push(("x_min".into(), s.x.min.to_string()));
    meta.push(("x_max".into(), s.x.max.to_string()));
    meta.push(("x_step".into(), s.x.step.to_string()));
    write_curve(out, &meta, "last_term_bound", &curve)
}

pub fn run_reference(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let s = cfg
        .raw
        .reference
        .ok_or_else(|| CliError::Config("this subcommand needs a \"reference\" section".into()))?;
    let rc = ReferenceConfig {
        t: s.t,
        y_max: s.y_max,
        dy: s.dy,
        xs: s.x.points()?,
        budget: DEFAULT_SEQUENCE_BUDGET,
    };
    let curve = reference_density(&cfg.env, &rc)?;
    // quadrature runs in binary64 regardless of the configured precision
    let mut meta = base_meta(cfg, "reference", f64::PRECISION);
    meta.push(("t".into(), s.t.to_string()));
    meta.push(("y_max".into(), s.y_max.to_string()));
    meta.push(("dy".into(), s.dy.to_string()));
    write_curve(out, &meta, "imag_residual", &curve)
}

pub fn run_simulate(cfg: &RunConfig, out: &Path) -> Result<(), CliError> {
    let s = cfg
        .raw
        .simulate
        .ok_or_else(|| CliError::Config("this subcommand needs a \"simulate\" section".into()))?;
    let sim = SimConfig {
        initial: s.initial.unwrap_or(1),
        horizon: s.t,
        trials: s.trials,
        seed: s.seed,
    };
    let range = s.x.map(|r| (r.min, r.max)).unwrap_or((0.0, 5.0));
    let curve = martingale_histogram(&cfg.env, &sim, s.bins, range)?;
    let mut meta = base_meta(cfg, "simulate", f64::PRECISION);
    meta.push(("t".into(), s.t.to_string()));
    meta.push(("trials".into(), s.trials.to_string()));
    meta.push(("seed".into(), s.seed.to_string()));
    meta.push(("bins".into(), s.bins.to_string()));
    meta.push(("initial".into(), sim.initial.to_string()));
    meta.push(("x_min".into(), range.0.to_string()));
    meta.push(("x_max".into(), range.1.to_string()));
    if let CurveMeta::MonteCarlo {
        sample_mean,
        sample_sd,
        ..
    } = curve.meta
    {
        meta.push(("sample_mean".into(), format!("{sample_mean:.17e}")));
        meta.push(("sample_sd".into(), format!("{sample_sd:.17e}")));
    }
    write_curve(out, &meta, "count", &curve)
}
