//! Experiment runners: each takes a resolved config, writes its artifact
//! set under the output directory, and returns the manifest.

use crate::config::{ControlKind, ExperimentConfig, ExperimentKind};
use crate::manifest::Manifest;
use anyhow::{anyhow, bail, Result};
use neurofield::analytic::{locate_zeros, SeriesKind};
use neurofield::control::{
    linear_control, small_time_control, two_phase_control, ControlProblem, ShootingOptions,
};
use neurofield::dynamics::{
    integrate, stationary_state, FieldOperator, IntegrateOptions, SolverOptions,
};
use neurofield::euclid::{act, GroupElement};
use neurofield::grid::{Field, Norm};
use neurofield::imaging::{field_to_pgm, warp_binary_to_retina, warp_to_retina};
use neurofield::kernel::constants;
use neurofield::stimulus::{binarize, generate, random_smooth};
use std::path::Path;
use std::time::Instant;

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(out_dir)?;
    let started = Instant::now();
    let mut manifest = Manifest::new(cfg.kind.name());
    manifest.config = cfg.raw.entries.clone();
    let c = constants(&cfg.params).map_err(|e| anyhow!("{e}"))?;
    manifest.constants.insert("mu_0".into(), c.mu_0);
    manifest.constants.insert("mu_c".into(), c.mu_c);
    manifest.constants.insert("q_c".into(), c.q_c);
    manifest.constants.insert("l1_norm".into(), c.l1_norm);
    // non-periodic stimuli induce a wrap seam at x1 = +-L; measurements on
    // this run should stay this far inside the domain
    manifest
        .metrics
        .insert("seam_margin".into(), cfg.seam_margin);

    let outcome = match cfg.kind {
        ExperimentKind::MackayRays | ExperimentKind::MackayTarget | ExperimentKind::Stationary => {
            run_stationary_figure(cfg, out_dir, &mut manifest)
        }
        ExperimentKind::Simulate => run_simulate(cfg, out_dir, &mut manifest),
        ExperimentKind::KernelZeros => run_zero_table(SeriesKind::K, cfg, out_dir, &mut manifest),
        ExperimentKind::HeavisideZeros => {
            run_zero_table(SeriesKind::BHeaviside, cfg, out_dir, &mut manifest)
        }
        ExperimentKind::Control => run_control(cfg, out_dir, &mut manifest),
        ExperimentKind::Equivariance => run_equivariance(cfg, out_dir, &mut manifest),
    };

    manifest.wall_seconds = started.elapsed().as_secs_f64();
    if let Err(e) = &outcome {
        manifest.status = format!("failed: {e}");
        manifest.save(out_dir)?;
        bail!("experiment failed (partial artifacts kept): {e}");
    }
    manifest.save(out_dir)?;
    Ok(manifest)
}

fn save_field(manifest: &mut Manifest, dir: &Path, name: &str, field: &Field) -> Result<()> {
    let mut buf = Vec::new();
    field.write_to(&mut buf).map_err(|e| anyhow!("{e}"))?;
    manifest.write_artifact(dir, &format!("{name}.nfld"), &buf)?;
    if field.spec().dim == 2 {
        let raster = field_to_pgm(field).map_err(|e| anyhow!("{e}"))?;
        manifest.write_artifact(dir, &format!("{name}.pgm"), &raster.to_pgm())?;
        #[cfg(feature = "png")]
        save_png(manifest, dir, name, &raster)?;
    }
    Ok(())
}

#[cfg(feature = "png")]
fn save_png(
    manifest: &mut Manifest,
    dir: &Path,
    name: &str,
    raster: &neurofield::imaging::Raster,
) -> Result<()> {
    let img = image::GrayImage::from_raw(
        raster.width as u32,
        raster.height as u32,
        raster.pixels.clone(),
    )
    .ok_or_else(|| anyhow!("raster size mismatch"))?;
    let mut bytes: Vec<u8> = Vec::new();
    img.write_to(
        &mut std::io::Cursor::new(&mut bytes),
        image::ImageFormat::Png,
    )?;
    manifest.write_artifact(dir, &format!("{name}.png"), &bytes)?;
    Ok(())
}

fn run_stationary_figure(
    cfg: &ExperimentConfig,
    dir: &Path,
    manifest: &mut Manifest,
) -> Result<()> {
    let op = FieldOperator::new(cfg.grid, &cfg.params).map_err(|e| anyhow!("{e}"))?;
    let input = generate(&cfg.stimulus, cfg.grid).map_err(|e| anyhow!("{e}"))?;
    save_field(manifest, dir, "input_cortical", &input)?;

    if cfg.grid.dim == 2 {
        let input_retinal = warp_binary_to_retina(&binarize(&input), cfg.out_px, cfg.r_max)
            .map_err(|e| anyhow!("{e}"))?;
        manifest.write_artifact(dir, "input_retinal.pgm", &input_retinal.to_pgm())?;
    }

    let opts = SolverOptions {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        ..Default::default()
    };
    let (state, report) =
        stationary_state(&op, &input, cfg.mu, cfg.response, &opts).map_err(|e| anyhow!("{e}"))?;
    manifest.record_solver("stationary", &report);
    save_field(manifest, dir, "stationary_cortical", &state)?;

    let binary = binarize(&state);
    manifest.write_artifact(dir, "stationary_binary.pbm", &binary.to_pbm())?;
    if cfg.grid.dim == 2 {
        let retinal =
            warp_binary_to_retina(&binary, cfg.out_px, cfg.r_max).map_err(|e| anyhow!("{e}"))?;
        manifest.write_artifact(dir, "stationary_retinal.pgm", &retinal.to_pgm())?;
        let retinal_gray =
            warp_to_retina(&state, cfg.out_px, cfg.r_max).map_err(|e| anyhow!("{e}"))?;
        manifest.write_artifact(dir, "stationary_retinal_gray.pgm", &retinal_gray.to_pgm())?;
    }
    manifest
        .metrics
        .insert("stationary_sup_norm".into(), state.norm(Norm::Sup));
    Ok(())
}

fn run_simulate(cfg: &ExperimentConfig, dir: &Path, manifest: &mut Manifest) -> Result<()> {
    let op = FieldOperator::new(cfg.grid, &cfg.params).map_err(|e| anyhow!("{e}"))?;
    let input = generate(&cfg.stimulus, cfg.grid).map_err(|e| anyhow!("{e}"))?;
    let a0 = random_smooth(cfg.grid, cfg.seed, 24).map_err(|e| anyhow!("{e}"))?;
    save_field(manifest, dir, "initial", &a0)?;
    let evo = integrate(
        &op,
        &a0,
        &input,
        cfg.mu,
        cfg.response,
        &IntegrateOptions {
            t_final: cfg.t_final,
            dt: cfg.dt,
            log_every: ((0.1 / cfg.dt).round() as usize).max(1),
            ..Default::default()
        },
    )
    .map_err(|e| anyhow!("{e}"))?;

    let mut csv = String::from("t,gap\n");
    for (t, gap) in &evo.decay_log {
        csv.push_str(&format!("{t:.6},{gap:.15e}\n"));
    }
    manifest.write_artifact(dir, "decay_log.csv", csv.as_bytes())?;
    save_field(manifest, dir, "final", &evo.final_state)?;
    save_field(manifest, dir, "stationary", &evo.stationary)?;
    if let Some((t, g)) = evo.decay_log.last() {
        manifest.metrics.insert("final_t".into(), *t);
        manifest.metrics.insert("final_gap".into(), *g);
    }
    Ok(())
}

fn run_zero_table(
    kind: SeriesKind,
    cfg: &ExperimentConfig,
    dir: &Path,
    manifest: &mut Manifest,
) -> Result<()> {
    let table = locate_zeros(kind, cfg.zero_k_max).map_err(|e| anyhow!("{e}"))?;
    let name = match kind {
        SeriesKind::K => "kernel_zeros.csv",
        SeriesKind::BHeaviside => "heaviside_zeros.csv",
    };
    manifest.write_artifact(dir, name, table.to_csv().as_bytes())?;
    manifest.metrics.insert(
        "rows_passing".into(),
        table.rows.iter().filter(|r| r.pass).count() as f64,
    );
    if !table.all_pass() {
        bail!("zero table has failing rows");
    }
    Ok(())
}

fn run_control(cfg: &ExperimentConfig, dir: &Path, manifest: &mut Manifest) -> Result<()> {
    let a0 = random_smooth(cfg.grid, cfg.seed, 24).map_err(|e| anyhow!("{e}"))?;
    let a_target = random_smooth(cfg.grid, cfg.seed + 1, 24).map_err(|e| anyhow!("{e}"))?;
    save_field(manifest, dir, "a0", &a0)?;
    save_field(manifest, dir, "a_target", &a_target)?;
    let problem = ControlProblem {
        a0,
        a_target,
        horizon: cfg.horizon,
        mu: cfg.mu,
        kind: cfg.response,
    };
    let shooting = ShootingOptions::default();

    let mut schedule = String::from("t_start,t_end,field\n");
    match cfg.control_kind {
        ControlKind::Linear => {
            let r = linear_control(&problem, &cfg.params).map_err(|e| anyhow!("{e}"))?;
            save_field(manifest, dir, "control", &r.control)?;
            schedule.push_str(&format!("0.0,{},control.nfld\n", cfg.horizon));
            manifest
                .metrics
                .insert("endpoint_error".into(), r.endpoint_error);
        }
        ControlKind::SmallTime => {
            let problem = ControlProblem {
                horizon: cfg.tau,
                ..problem
            };
            let r =
                small_time_control(&problem, &cfg.params, &shooting).map_err(|e| anyhow!("{e}"))?;
            save_field(manifest, dir, "control", &r.control)?;
            schedule.push_str(&format!("0.0,{},control.nfld\n", cfg.tau));
            manifest
                .metrics
                .insert("endpoint_error".into(), r.endpoint_error);
            manifest
                .metrics
                .insert("iterations".into(), r.iterations as f64);
        }
        ControlKind::TwoPhase => {
            let r = two_phase_control(&problem, &cfg.params, cfg.tau, &shooting)
                .map_err(|e| anyhow!("{e}"))?;
            for (i, seg) in r.segments.iter().enumerate() {
                let name = format!("control_segment_{i}");
                save_field(manifest, dir, &name, &seg.input)?;
                schedule.push_str(&format!("{},{},{name}.nfld\n", seg.t_start, seg.t_end));
            }
            manifest
                .metrics
                .insert("endpoint_error".into(), r.endpoint_error);
        }
    }
    manifest.write_artifact(dir, "schedule.csv", schedule.as_bytes())?;
    Ok(())
}

fn run_equivariance(cfg: &ExperimentConfig, dir: &Path, manifest: &mut Manifest) -> Result<()> {
    let op = FieldOperator::new(cfg.grid, &cfg.params).map_err(|e| anyhow!("{e}"))?;
    let opts = SolverOptions {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        ..Default::default()
    };
    let elements: Vec<(String, GroupElement)> = vec![
        ("translate(17,-5)".into(), GroupElement::translation(17, -5)),
        ("reflect-x1".into(), GroupElement::reflection_x1()),
        ("reflect-x2".into(), GroupElement::reflection_x2()),
        ("rotate-90".into(), GroupElement::rotation_quarter_turns(1)),
        ("rotate-180".into(), GroupElement::rotation_quarter_turns(2)),
    ];
    let mut csv = String::from("element,seed,gap\n");
    let mut worst = 0.0f64;
    for (i, (label, g)) in elements.iter().enumerate() {
        let input = random_smooth(cfg.grid, cfg.seed + i as u64, 20).map_err(|e| anyhow!("{e}"))?;
        let (psi, r1) = stationary_state(&op, &input, cfg.mu, cfg.response, &opts)
            .map_err(|e| anyhow!("{e}"))?;
        let moved = act(g, &input).map_err(|e| anyhow!("{e}"))?;
        let (psi_g, r2) = stationary_state(&op, &moved, cfg.mu, cfg.response, &opts)
            .map_err(|e| anyhow!("{e}"))?;
        manifest.record_solver(&format!("{label}-base"), &r1);
        manifest.record_solver(&format!("{label}-moved"), &r2);
        let gap = psi_g
            .sup_distance(&act(g, &psi).map_err(|e| anyhow!("{e}"))?)
            .map_err(|e| anyhow!("{e}"))?;
        worst = worst.max(gap);
        csv.push_str(&format!("{label},{},{gap:.3e}\n", cfg.seed + i as u64));
    }
    manifest.write_artifact(dir, "equivariance.csv", csv.as_bytes())?;
    manifest.metrics.insert("max_gap".into(), worst);
    if worst > 10.0 * cfg.tol {
        bail!("equivariance gap {worst:.3e} exceeds 10x solver tolerance");
    }
    Ok(())
}
