//! One runner per experiment kind. Runners compute in memory; persistence
//! lives in `envelope`.

use std::fmt::Write as _;

use hartree_core::ensemble::{
    add_perturbation, picard_iterate, scattering_probe, Bump, ModeEnsemble, PerturbationSpec, PerturbationState,
    PicardSettings, Placement, ScatteringSettings, Trajectory,
};
use hartree_core::equilibria::{hypothesis_check, CovarianceProfile, Distribution, Potential};
use hartree_core::response::{
    decay_bound_check, default_tau_grid, default_xi_grid, mf_from_profile, stability_margin, MultiplierTable,
};
use hartree_core::special::sphere_area;
use hartree_core::spectral::{run_toolbox, TorusGrid};
use hartree_core::twowave::{
    closed_form_spectrum, eigensolver_spectrum, multiset_distance, unstable_band, TwoWaveParams,
};
use hartree_core::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{DistKind, Format, Kind, PlacementKind, PotKind, RunConfig};
use crate::plot::{emit_plot, PlotStyle, Series};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl Verdict {
    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            pass: value <= threshold,
            value,
            threshold: Some(threshold),
        }
    }

    fn below(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            pass: value < threshold,
            value,
            threshold: Some(threshold),
        }
    }

    fn holds(name: &str, pass: bool, value: f64) -> Self {
        Self {
            name: name.into(),
            pass,
            value,
            threshold: None,
        }
    }
}

/// A payload file before it is written: name relative to the run directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub format: Format,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub payload: Value,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
    pub artifacts: Vec<Artifact>,
}

impl Outcome {
    fn add(&mut self, name: &str, format: Format, bytes: Vec<u8>) {
        self.artifacts.push(Artifact {
            name: name.into(),
            format,
            bytes,
        });
    }

    fn plot(&mut self, name: &str, series: &[Series], style: PlotStyle) -> Result<(), String> {
        let svg = emit_plot(series, &style)?;
        self.add(name, Format::Svg, svg.into_bytes());
        Ok(())
    }
}

fn ndjson<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    for r in rows {
        serde_json::to_writer(&mut out, &r).map_err(|e| e.to_string())?;
        out.push(b'\n');
    }
    Ok(out)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn distribution(cfg: &RunConfig) -> Result<Distribution, String> {
    let p = &cfg.physics;
    match p.f_kind {
        DistKind::Fermi => Distribution::fermi(p.f_temperature, p.f_mu),
        DistKind::Bose => Distribution::bose(p.f_temperature, p.f_mu),
        DistKind::ZeroTempFermi => Distribution::zero_temp_fermi(p.f_mu),
        DistKind::Gaussian => Distribution::gaussian(p.f_width),
        DistKind::Zero => Ok(Distribution::zero()),
    }
    .map_err(err)
}

pub fn potential(cfg: &RunConfig) -> Result<Potential, String> {
    let p = &cfg.physics;
    match p.w_kind {
        PotKind::Zero => Ok(Potential::zero()),
        PotKind::Delta => Potential::delta(p.w_amplitude),
        PotKind::Gaussian => Potential::gaussian(p.w_amplitude, p.w_width),
    }
    .map_err(err)
}

fn grid(cfg: &RunConfig) -> Result<TorusGrid, String> {
    TorusGrid::new(cfg.grid.d, cfg.grid.length, cfg.grid.n).map_err(err)
}

fn equilibrium(cfg: &RunConfig) -> Result<ModeEnsemble, String> {
    ModeEnsemble::init_equilibrium(&grid(cfg)?, &distribution(cfg)?, &potential(cfg)?, cfg.numerics.theta).map_err(err)
}

fn perturbed(cfg: &RunConfig, e: &ModeEnsemble) -> Result<PerturbationState, String> {
    let n = &cfg.numerics;
    let placement = match n.pert_placement {
        PlacementKind::Modulated => Placement::Modulated,
        PlacementKind::Single => Placement::SingleMode(n.pert_mode),
    };
    add_perturbation(
        e,
        &PerturbationSpec {
            bump: Bump::centered(e.grid(), n.pert_width, n.pert_amplitude),
            placement,
        },
    )
    .map_err(err)
}

fn density_csv(e: &ModeEnsemble) -> Vec<u8> {
    let g = e.grid();
    let d = g.dim();
    let mut s = String::from("index");
    for a in 0..d {
        let _ = write!(s, ",x{}", a + 1);
    }
    s.push_str(",rho\n");
    for (i, r) in e.density_values().iter().enumerate() {
        let x = g.position(i);
        let _ = write!(s, "{i}");
        for v in &x[..d] {
            let _ = write!(s, ",{v:e}");
        }
        let _ = writeln!(s, ",{r:e}");
    }
    s.into_bytes()
}

fn trajectory_rows(t: &Trajectory) -> Result<Vec<u8>, String> {
    ndjson(&t.records)
}

pub fn run_experiment_outcome(cfg: &RunConfig, provenance: &str) -> Result<Outcome, String> {
    match cfg.kind {
        Kind::EquilibriumCheck => equilibrium_check(cfg, provenance),
        Kind::Simulate => simulate(cfg, provenance),
        Kind::LinearResponse => linear_response(cfg, provenance),
        Kind::StabilityCheck => stability_check(cfg, provenance),
        Kind::Instability => instability(cfg, provenance),
        Kind::Picard => picard(cfg, provenance),
        Kind::Norms => norms(cfg, provenance),
        Kind::ScatteringProbe => scattering(cfg, provenance),
    }
}

fn equilibrium_check(cfg: &RunConfig, prov: &str) -> Result<Outcome, String> {
    let mut e = equilibrium(cfg)?;
    let sel = *e.selection().expect("set by init_equilibrium");
    let start: Vec<Vec<Complex64>> = e.modes().iter().map(|m| m.field.clone()).collect();
    let traj = e
        .evolve(
            cfg.numerics.t_total,
            cfg.numerics.dt,
            cfg.numerics.stride,
            |_, _| Ok(()),
        )
        .map_err(err)?;
    let rho = e.density_values();
    let mean = rho.iter().sum::<f64>() / rho.len().max(1) as f64;
    let density_dev = rho.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max);
    let amp_dev = e
        .modes()
        .iter()
        .flat_map(|m| m.field.iter().map(move |u| (u.norm() - m.weight).abs()))
        .fold(0.0, f64::max);
    // unwind e^{-i(m+|ξ|²)t} and compare with t = 0
    let t = e.time();
    let d = e.grid().dim();
    let gauge = e
        .modes()
        .iter()
        .zip(&start)
        .map(|(m, u0)| {
            let k2: f64 = m.xi[..d].iter().map(|x| x * x).sum();
            let ph = Complex64::from_polar(1.0, (e.mass() + k2) * t);
            m.field
                .iter()
                .zip(u0)
                .map(|(u, v)| (u * ph - v).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);

    let mut out = Outcome {
        payload: json!({
            "modes": sel.modes,
            "mass": e.mass(),
            "selection": sel,
            "truncated_fraction": if sel.h0 > 0.0 { sel.truncated_mass / sel.h0 } else { 0.0 },
            "steps": traj.steps,
            "mode_mass_drift": traj.max_mass_drift(),
            "density_deviation": density_dev,
            "amplitude_deviation": amp_dev,
            "gauge_residual": gauge,
        }),
        verdicts: vec![
            Verdict::at_most("mode-mass-drift", traj.max_mass_drift(), 1e-10),
            Verdict::at_most("density-deviation", density_dev, 1e-8),
            Verdict::at_most("amplitude-deviation", amp_dev, 1e-12),
            Verdict::at_most("gauge-residual", gauge, 1e-10),
        ],
        ..Default::default()
    };
    out.add("trajectory.ndjson", Format::Ndjson, trajectory_rows(&traj)?);
    out.add("density.csv", Format::Csv, density_csv(&e));
    let first = traj.records[0].mode_masses.clone();
    let drift: Vec<(f64, f64)> = traj
        .records
        .iter()
        .map(|r| {
            let dm = r
                .mode_masses
                .iter()
                .zip(&first)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            (r.time, dm)
        })
        .collect();
    out.plot(
        "mass_drift.svg",
        &[Series::new("max per-mode mass drift", drift)],
        PlotStyle {
            title: "equilibrium mass drift".into(),
            x_label: "t".into(),
            y_label: "drift".into(),
            log_y: true,
            provenance: prov.into(),
            ..Default::default()
        },
    )?;
    Ok(out)
}

fn simulate(cfg: &RunConfig, prov: &str) -> Result<Outcome, String> {
    let e = equilibrium(cfg)?;
    let mut s = perturbed(cfg, &e)?;
    let n = &cfg.numerics;
    let traj = s.evolve(n.t_total, n.dt, n.stride).map_err(err)?;
    let mut out = Outcome {
        payload: json!({
            "modes": e.len(),
            "steps": traj.steps,
            "dt": traj.dt,
            "mode_mass_drift": traj.max_mass_drift(),
            "energy_drift": traj.max_energy_drift(),
            "final_norms": traj.records.last().and_then(|r| r.norms.clone()),
        }),
        verdicts: vec![
            Verdict::at_most("mode-mass-drift", traj.max_mass_drift(), 1e-10),
            Verdict::holds(
                "energy-finite",
                traj.records.iter().all(|r| r.energy.is_finite()),
                traj.max_energy_drift(),
            ),
        ],
        ..Default::default()
    };
    out.add("trajectory.ndjson", Format::Ndjson, trajectory_rows(&traj)?);
    out.add("density.csv", Format::Csv, density_csv(s.ensemble()));
    let e0 = traj.records[0].energy;
    let pts: Vec<(f64, f64)> = traj.records.iter().map(|r| (r.time, r.energy - e0)).collect();
    out.plot(
        "energy.svg",
        &[Series::new("E(t) - E(0)", pts)],
        PlotStyle {
            title: "energy drift".into(),
            x_label: "t".into(),
            y_label: "E(t) - E(0)".into(),
            provenance: prov.into(),
            ..Default::default()
        },
    )?;
    Ok(out)
}

fn multiplier_table(cfg: &RunConfig) -> Result<(CovarianceProfile, MultiplierTable), String> {
    let n = &cfg.numerics;
    let profile = CovarianceProfile::new(&distribution(cfg)?, cfg.grid.d).map_err(err)?;
    let taus = default_tau_grid(n.tau_min, n.tau_max, n.tau_n);
    let xis = default_xi_grid(n.xi_min, n.xi_max, n.xi_n);
    let table = MultiplierTable::compute(&profile, &taus, &xis);
    Ok((profile, table))
}

fn linear_response(cfg: &RunConfig, prov: &str) -> Result<Outcome, String> {
    let (profile, table) = multiplier_table(cfg)?;
    let zero_xi = table
        .taus()
        .iter()
        .map(|&t| mf_from_profile(&profile, t, 0.0).value.norm())
        .fold(0.0, f64::max);
    let (asym, qerr) = table.conjugate_asymmetry();
    let decay = decay_bound_check(&table);
    let mut out = Outcome {
        payload: json!({
            "h0": profile.h0(),
            "h_decayed": profile.decayed(),
            "sup_abs": table.sup_abs(),
            "max_error": table.max_error(),
            "conjugate_asymmetry": asym,
            "decay_bound": decay,
        }),
        verdicts: vec![
            Verdict::at_most("mf-zero-frequency", zero_xi, 0.0),
            Verdict::at_most("conjugate-symmetry", asym, 2.0 * qerr),
            Verdict::holds("decay-bound-finite", decay.finite, decay.sup),
        ],
        ..Default::default()
    };
    if !profile.decayed() {
        out.warnings
            .push(format!("h has not decayed by x = {}", profile.x_max()));
    }
    let mut csv = Vec::new();
    table.write_csv(&mut csv).map_err(err)?;
    out.add("multiplier.csv", Format::Csv, csv);
    let j = table.xis().len() / 2;
    let xi = table.xis()[j];
    let pts: Vec<(f64, f64)> = table
        .taus()
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > 0.0)
        .map(|(i, &t)| (t.log10(), table.get(i, j).norm()))
        .collect();
    out.plot(
        "mf_decay.svg",
        &[Series::new(format!("|m_f(τ, {xi:.3})|"), pts)],
        PlotStyle {
            title: "multiplier decay in τ".into(),
            x_label: "log10 τ".into(),
            y_label: "|m_f|".into(),
            log_y: true,
            provenance: prov.into(),
            ..Default::default()
        },
    )?;
    Ok(out)
}

fn stability_check(cfg: &RunConfig, prov: &str) -> Result<Outcome, String> {
    let (_, table) = multiplier_table(cfg)?;
    let w = potential(cfg)?;
    let f = distribution(cfg)?;
    let margin = stability_margin(&table, &w).map_err(err)?;
    let hyp = if cfg.grid.d <= 4 {
        Some(hypothesis_check(&f, &w, cfg.grid.d, 4.0 * cfg.numerics.xi_max).map_err(err)?)
    } else {
        None
    };
    let sup = table.sup_abs();
    let mut verdicts = vec![Verdict::holds("margin-positive", margin.min > 0.0, margin.min)];
    if w.is_zero() {
        verdicts.push(Verdict::holds("margin-unit", margin.min == 1.0, margin.min));
    }
    let mut out = Outcome {
        payload: json!({
            "margin": margin,
            "sup_abs_mf": sup,
            "amplitude_limit": if sup > 0.0 { 1.0 / sup } else { f64::INFINITY },
            "hypotheses": hyp,
        }),
        verdicts,
        ..Default::default()
    };
    let record = json!({
        "min": margin.min,
        "argmin": { "tau": margin.tau, "xi_abs": margin.xi_abs },
        "sup_abs_mf": sup,
        "amplitude_limit": if sup > 0.0 { 1.0 / sup } else { f64::INFINITY },
        "two_sphere_area": 2.0 * sphere_area(cfg.grid.d),
    });
    out.add("margin.ndjson", Format::Ndjson, ndjson([record])?);
    let mut csv = String::from("tau,xi_abs,margin\n");
    let mut per_xi = vec![f64::INFINITY; table.xis().len()];
    for (i, &t) in table.taus().iter().enumerate() {
        for (j, &x) in table.xis().iter().enumerate() {
            let m = (Complex64::new(1.0, 0.0) - table.get(i, j) * w.hat(x)).norm();
            per_xi[j] = per_xi[j].min(m);
            let _ = writeln!(csv, "{t:e},{x:e},{m:e}");
        }
    }
    out.add("margin.csv", Format::Csv, csv.into_bytes());
    let pts: Vec<(f64, f64)> = table.xis().iter().copied().zip(per_xi).collect();
    out.plot(
        "margin.svg",
        &[Series::new("min over τ of |1 - ŵ m_f|", pts)],
        PlotStyle {
            title: "stability margin".into(),
            x_label: "|ξ|".into(),
            y_label: "margin".into(),
            provenance: prov.into(),
            ..Default::default()
        },
    )?;
    Ok(out)
}

fn instability(cfg: &RunConfig, prov: &str) -> Result<Outcome, String> {
    let d = cfg.grid.d;
    let n = &cfg.numerics;
    let mass = cfg.physics.mass.unwrap_or(0.0);
    let mut xi = vec![0.0; d];
    xi[0] = cfg.physics.xi;
    let params = TwoWaveParams::new(&xi, mass, potential(cfg)?).map_err(err)?;
    let cell = (n.r_max - n.r_min) / (n.r_n - 1) as f64;
    let r_grid: Vec<f64> = (0..n.r_n).map(|i| n.r_min + cell * i as f64).collect();
    let mut dir = vec![0.0; d];
    dir[0] = 1.0;
    let band = unstable_band(&params, &dir, &r_grid).map_err(err)?;
    let scale = if cfg.physics.xi > 0.0 { cfg.physics.xi } else { 1.0 };
    // colliding roots are defective and Schur only resolves them to ~√ε
    let mut agree = 0.0f64;
    let mut degenerate = (0usize, 0.0f64);
    for &r in &r_grid {
        let k: Vec<f64> = dir.iter().map(|u| u * r * scale).collect();
        let a = closed_form_spectrum(&params, &k).map_err(err)?;
        let b = eigensolver_spectrum(&params, &k).map_err(err)?;
        let size = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let gap = (0..4)
            .flat_map(|i| (i + 1..4).map(move |j| (i, j)))
            .map(|(i, j)| (a[i] - a[j]).norm())
            .fold(f64::INFINITY, f64::min);
        let dist = multiset_distance(&a, &b);
        if gap < 1e-6 * size {
            degenerate = (degenerate.0 + 1, degenerate.1.max(dist));
        } else {
            agree = agree.max(dist);
        }
    }
    let mut verdicts = vec![Verdict::at_most("spectra-agree", agree, 1e-10)];
    if let Some((lo, hi)) = band.predicted {
        let ok = band.detected.len() == 1 && {
            let (a, b) = band.detected[0];
            (a - lo).abs() <= cell + 1e-12 && (b - hi).abs() <= cell + 1e-12
        };
        let off = band
            .detected
            .first()
            .map(|&(a, b)| (a - lo).abs().max((b - hi).abs()))
            .unwrap_or(f64::INFINITY);
        verdicts.push(Verdict::holds("band-endpoints", ok, off));
    } else if mass == 0.0 || cfg.physics.xi == 0.0 {
        verdicts.push(Verdict::holds(
            "band-empty",
            band.is_empty() && band.max_growth.abs() <= 1e-10,
            band.max_growth,
        ));
    }
    let mut out = Outcome {
        payload: json!({
            "predicted": band.predicted,
            "detected": band.detected,
            "max_growth": band.max_growth,
            "argmax_r": band.argmax_r,
            "grid_cell": cell,
            "spectra_distance": agree,
            "degenerate_samples": degenerate.0,
            "degenerate_distance": degenerate.1,
        }),
        verdicts,
        ..Default::default()
    };
    let mut csv = String::from("r,k_abs,re_lambda_max,im_lambda_1,im_lambda_2,im_lambda_3,im_lambda_4\n");
    for s in &band.samples {
        let _ = writeln!(
            csv,
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            s.r, s.k_abs, s.max_re, s.im[0], s.im[1], s.im[2], s.im[3]
        );
    }
    out.add("band.csv", Format::Csv, csv.into_bytes());
    let pts: Vec<(f64, f64)> = band.samples.iter().map(|s| (s.r, s.max_re)).collect();
    out.plot(
        "dispersion.svg",
        &[Series::new("max Re λ", pts)],
        PlotStyle {
            title: "two-wave growth rate".into(),
            x_label: "r = |k|/|ξ|".into(),
            y_label: "max Re λ".into(),
            band: band.predicted,
            provenance: prov.into(),
            ..Default::default()
        },
    )?;
    Ok(out)
}

fn picard(cfg: &RunConfig, prov: &str) -> Result<Outcome, String> {
    let e = equilibrium(cfg)?;
    let s = perturbed(cfg, &e)?;
    let n = &cfg.numerics;
    let settings = PicardSettings {
        window: n.t_total,
        dt: n.picard_dt,
        max_iterations: n.picard_iterations,
        tolerance: 1e-12,
    };
    let rep = picard_iterate(&s, &settings).map_err(err)?;
    let vs_split = rep.compare_with_split_step(&s, 10).map_err(err)?;
    // ratios of iterates 3..=6, i.e. successive differences after the free term
    let early: Vec<f64> = rep
        .iterates
        .iter()
        .filter(|i| (3..=6).contains(&i.iteration))
        .filter_map(|i| i.ratio)
        .collect();
    let worst = early.iter().copied().fold(0.0, f64::max);
    let mut verdicts = vec![
        Verdict::holds(
            "not-diverged",
            !rep.diverged,
            rep.ratios().last().copied().unwrap_or(0.0),
        ),
        Verdict::at_most("split-step-agreement", vs_split, 1e-4),
    ];
    if !rep.converged || rep.iterates.len() > 1 {
        verdicts.push(Verdict::below("contraction-factor", worst, 0.5));
    }
    let mut out = Outcome {
        payload: json!({
            "modes": e.len(),
            "converged": rep.converged,
            "diverged": rep.diverged,
            "iterations": rep.iterates.len(),
            "split_step_difference": vs_split,
            "settings": rep.settings,
        }),
        verdicts,
        ..Default::default()
    };
    out.add("iterates.ndjson", Format::Ndjson, ndjson(&rep.iterates)?);
    let pts: Vec<(f64, f64)> = rep
        .iterates
        .iter()
        .map(|i| (i.iteration as f64, i.difference))
        .collect();
    out.plot(
        "iterates.svg",
        &[Series::new("Θ(X_k - X_{k-1})", pts)],
        PlotStyle {
            title: "fixed-point iteration".into(),
            x_label: "iteration".into(),
            y_label: "difference".into(),
            log_y: true,
            provenance: prov.into(),
            ..Default::default()
        },
    )?;
    Ok(out)
}

fn norms(cfg: &RunConfig, prov: &str) -> Result<Outcome, String> {
    let g = grid(cfg)?;
    let rep = run_toolbox(&g, cfg.numerics.trials, cfg.numerics.seed).map_err(err)?;
    let mut out = Outcome {
        payload: json!({ "report": rep }),
        verdicts: vec![
            Verdict::at_most("parseval", rep.parseval_max_rel, 1e-12),
            Verdict::at_most("partition-of-unity", rep.partition_max_err, 1e-12),
            Verdict::below("bernstein-spread", rep.bernstein_spread, 10.0),
            Verdict::at_most("besov-monotonicity-violations", rep.besov_violations as f64, 0.0),
        ],
        ..Default::default()
    };
    let mut csv = String::from("j,ratio\n");
    for (j, r) in &rep.bernstein {
        let _ = writeln!(csv, "{j},{r:e}");
    }
    out.add("bernstein.csv", Format::Csv, csv.into_bytes());
    let pts: Vec<(f64, f64)> = rep.bernstein.iter().map(|&(j, r)| (j as f64, r)).collect();
    out.plot(
        "bernstein.svg",
        &[Series::new("‖f_j‖∞ / (2^{jd/2}‖f_j‖₂)", pts)],
        PlotStyle {
            title: "Bernstein ratios".into(),
            x_label: "j".into(),
            y_label: "ratio".into(),
            provenance: prov.into(),
            ..Default::default()
        },
    )?;
    Ok(out)
}

#[derive(Serialize)]
struct ProbeRow {
    time: f64,
    cauchy: Option<f64>,
    local_mass: f64,
}

fn scattering(cfg: &RunConfig, prov: &str) -> Result<Outcome, String> {
    let e = equilibrium(cfg)?;
    let s = perturbed(cfg, &e)?;
    let n = &cfg.numerics;
    let rep = scattering_probe(
        &s,
        &ScatteringSettings {
            window: n.t_total,
            dt: n.dt,
            stride: n.stride,
            ball_center: None,
            ball_radius: n.ball_radius,
        },
    )
    .map_err(err)?;
    let verdicts = if e.potential().is_zero() {
        vec![Verdict::at_most("free-profile-constant", rep.profile_drift, 1e-10)]
    } else {
        let last = |v: &[f64]| v.last().copied().unwrap_or(0.0);
        vec![
            Verdict::holds("cauchy-decreasing", rep.cauchy_decreasing, last(&rep.cauchy)),
            Verdict::holds(
                "local-mass-decreasing",
                rep.local_mass_decreasing,
                last(&rep.local_mass),
            ),
        ]
    };
    let mut out = Outcome {
        payload: json!({
            "modes": e.len(),
            "recurrence_time": rep.recurrence_time,
            "profile_drift": rep.profile_drift,
            "cauchy_decreasing": rep.cauchy_decreasing,
            "local_mass_decreasing": rep.local_mass_decreasing,
        }),
        verdicts,
        warnings: rep.warning.iter().cloned().collect(),
        ..Default::default()
    };
    let rows = rep.times.iter().enumerate().map(|(i, &t)| ProbeRow {
        time: t,
        cauchy: i.checked_sub(1).map(|k| rep.cauchy[k]),
        local_mass: rep.local_mass[i],
    });
    out.add("probe.ndjson", Format::Ndjson, ndjson(rows)?);
    let cauchy: Vec<(f64, f64)> = rep.times[1..].iter().copied().zip(rep.cauchy.iter().copied()).collect();
    let local: Vec<(f64, f64)> = rep.times.iter().copied().zip(rep.local_mass.iter().copied()).collect();
    out.plot(
        "probe.svg",
        &[
            Series::new("Cauchy difference", cauchy),
            Series::new("local mass", local),
        ],
        PlotStyle {
            title: "scattering probe".into(),
            x_label: "t".into(),
            y_label: "value".into(),
            log_y: true,
            provenance: prov.into(),
            ..Default::default()
        },
    )?;
    Ok(out)
}
