//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::thread;
use std::time::Instant;

use boxaffine_core::acceptance;
use boxaffine_core::analytic_box::{zero_extended_eigenfunction, BoxGeometry};
use boxaffine_core::piecewise::{discrete_second_derivative_norm, l2_norm_squared, weak_second_derivative};
use boxaffine_core::potentials::boundary_asymptotic_ratio;
use boxaffine_core::rayleigh_ritz::{compute_spectrum, convergence_sweep, SpectrumResult};
use boxaffine_core::shooting::{boundary_exponent_probe, Shooter, DEFAULT_OFFSET};
use boxaffine_core::stats::{least_squares_slope, observed_orders};
use boxaffine_core::{Error, ModelSpec, PiecewiseSmooth};

use crate::config::{Format, ModelName, RunConfig, Target};
use crate::report::{
    Agreement, BasisSweep, ConfigEcho, Content, Convergence, CriterionRecord, Derivatives, GridSweep, LevelRecord,
    PointTerm, Report, ScalingRow, Units,
};
use crate::Failure;

/// Relative method disagreement above which `spectrum` exits with code 3.
pub const AGREEMENT_THRESHOLD: f64 = 1e-5;
/// Mesh spacings `2^-k` (in units of `b`) for the divergence table.
pub const SCALING_EXPONENTS: std::ops::RangeInclusive<i32> = 6..=12;

fn solver(module: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Solver(format!("{module}: {e}"))
}

fn millis(start: Instant) -> f64 {
    // whole microseconds keep the timing table short
    (start.elapsed().as_micros() as f64) / 1000.0
}

/// Shooting eigenvalues and node counts for levels `0..levels`.
fn shoot_levels(model: &ModelSpec, grid_size: usize, levels: usize, tol: f64) -> Result<Vec<(f64, usize)>, Failure> {
    let shooter = Shooter::new(model, grid_size, DEFAULT_OFFSET).map_err(solver("shooting"))?;
    (0..levels)
        .map(|k| {
            let e = shooter.search(k, tol).map_err(solver("shooting"))?;
            Ok((e, shooter.integrate(e).node_count))
        })
        .collect()
}

/// Wall exponents of the given levels, probed concurrently.
fn probe_exponents(model: &ModelSpec, energies: &[f64]) -> Result<Vec<f64>, Failure> {
    thread::scope(|s| {
        let handles: Vec<_> = energies
            .iter()
            .map(|&e| s.spawn(move || boundary_exponent_probe(model, e)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("probe thread panicked").map_err(solver("shooting")))
            .collect()
    })
}

pub struct SpectrumOutcome {
    pub report: Report,
    pub agreement_failed: Option<f64>,
}

pub fn spectrum(cfg: &RunConfig) -> Result<SpectrumOutcome, Failure> {
    let total = Instant::now();
    let mut timings = BTreeMap::new();
    let (rr, shot) = thread::scope(|s| {
        let rr = cfg.method.uses_rayleigh_ritz().then(|| {
            s.spawn(|| {
                let t = Instant::now();
                let r = compute_spectrum(&cfg.model, cfg.basis_size).map_err(solver("rayleigh_ritz"));
                (r, millis(t))
            })
        });
        let shot = cfg.method.uses_shooting().then(|| {
            s.spawn(|| {
                let t = Instant::now();
                let r = shoot_levels(&cfg.model, cfg.grid_size, cfg.levels, cfg.tol);
                (r, millis(t))
            })
        });
        (
            rr.map(|h| h.join().expect("solver thread panicked")),
            shot.map(|h| h.join().expect("solver thread panicked")),
        )
    });
    let rr: Option<SpectrumResult> = match rr {
        Some((r, ms)) => {
            timings.insert("rayleigh_ritz_ms".to_string(), ms);
            Some(r?)
        }
        None => None,
    };
    let shot: Option<Vec<(f64, usize)>> = match shot {
        Some((r, ms)) => {
            timings.insert("shooting_ms".to_string(), ms);
            Some(r?)
        }
        None => None,
    };

    // shooting alone has no spectral diagnostics; probe the wall exponent
    let probed = match (&rr, &shot) {
        (None, Some(levels)) => {
            let t = Instant::now();
            let energies: Vec<f64> = levels.iter().map(|l| l.0).collect();
            let p = probe_exponents(&cfg.model, &energies)?;
            timings.insert("exponent_probe_ms".to_string(), millis(t));
            Some(p)
        }
        _ => None,
    };

    let mut records = Vec::with_capacity(cfg.levels);
    let mut max_delta: f64 = 0.0;
    for k in 0..cfg.levels {
        let rr_e = rr.as_ref().map(|r| r.eigenvalues[k]);
        let sh = shot.as_ref().map(|s| s[k]);
        let delta = match (rr_e, sh) {
            (Some(a), Some((b, _))) => Some(((b - a) / a).abs()),
            _ => None,
        };
        if let Some(d) = delta {
            max_delta = max_delta.max(d);
        }
        let diag = rr.as_ref().map(|r| r.diagnostics[k]);
        records.push(LevelRecord {
            index: k,
            energy: rr_e.or(sh.map(|s| s.0)).expect("at least one method ran"),
            parity: diag.map(|d| d.parity.as_str().to_string()),
            node_count: diag.map(|d| d.node_count).or(sh.map(|s| s.1)).unwrap_or(0),
            boundary_exponent: diag.map(|d| d.boundary_exponent).or(probed.as_ref().map(|p| p[k])),
            rayleigh_ritz: rr_e,
            shooting: sh.map(|s| s.0),
            relative_delta: delta,
        });
    }
    let agreement = (rr.is_some() && shot.is_some()).then_some(Agreement {
        threshold: AGREEMENT_THRESHOLD,
        max_relative_delta: max_delta,
        passed: max_delta <= AGREEMENT_THRESHOLD,
    });
    let agreement_failed = agreement.as_ref().filter(|a| !a.passed).map(|a| a.max_relative_delta);
    timings.insert("total_ms".to_string(), millis(total));
    let content = Content {
        command: "spectrum".into(),
        units: Units::default(),
        config: Some(ConfigEcho::from(cfg)),
        levels: records,
        agreement,
        convergence: None,
        derivatives: None,
        validation: None,
    };
    Ok(SpectrumOutcome {
        report: Report::new(content, timings),
        agreement_failed,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn spectrum_csv(report: &Report) -> String {
    let mut out = String::from("index,energy,parity,node_count,boundary_exponent,rayleigh_ritz,shooting,relative_delta\n");
    for l in &report.content.levels {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            l.index,
            l.energy,
            l.parity.as_deref().unwrap_or(""),
            l.node_count,
            opt(l.boundary_exponent),
            opt(l.rayleigh_ritz),
            opt(l.shooting),
            opt(l.relative_delta)
        );
    }
    out
}

/// Default sampling window and count for `potential`.
fn default_window(cfg: &RunConfig) -> (f64, f64, usize) {
    match cfg.model_name {
        ModelName::CqBox | ModelName::AqBox => (-0.99 * cfg.b, 0.99 * cfg.b, 199),
        ModelName::HalfHo => (0.05 * cfg.hbar.sqrt(), 6.0 * cfg.hbar.sqrt(), 120),
        ModelName::AntiBox => (1.5 * cfg.b, 3.5 * cfg.b, 201),
    }
}

pub fn potential(cfg: &RunConfig, x_min: Option<f64>, x_max: Option<f64>, samples: Option<usize>) -> Result<String, Failure> {
    if cfg.format != Format::Csv {
        return Err(Failure::Usage("potential writes CSV only; use --format csv".into()));
    }
    let (lo, hi, n) = default_window(cfg);
    let lo = x_min.unwrap_or(lo);
    let hi = x_max.unwrap_or(hi);
    let n = samples.unwrap_or(n);
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Failure::Usage(format!("--x-min ({lo}) must be finite and below --x-max ({hi})")));
    }
    if !(2..=crate::config::MAX_SAMPLES).contains(&n) {
        return Err(Failure::Usage(format!(
            "--samples must be in 2..={}, got {n}",
            crate::config::MAX_SAMPLES
        )));
    }
    let geom = cfg.model.geometry();
    let with_ratio = cfg.model_name == ModelName::AqBox;
    let mut out = String::from(if with_ratio { "x,V,ratio\n" } else { "x,V\n" });
    for i in 0..n {
        let t = i as f64 / (n - 1) as f64;
        // symmetric interpolation keeps the midpoint of a symmetric window at 0
        let x = lo * (1.0 - t) + hi * t;
        let v = cfg.model.potential(x).map_err(|e| {
            Failure::Usage(format!(
                "sample x = {x} touches a singular point or leaves the {} domain ({e})",
                cfg.model_name.as_str()
            ))
        })?;
        if with_ratio {
            let geom = geom.expect("aq-box has a geometry");
            let r = boundary_asymptotic_ratio(x, &geom).map_err(|e| Failure::Usage(e.to_string()))?;
            let _ = writeln!(out, "{x},{v},{r}");
        } else {
            let _ = writeln!(out, "{x},{v}");
        }
    }
    Ok(out)
}

pub fn check_derivatives(cfg: &RunConfig, target: Target, n: u32) -> Result<Report, Failure> {
    let total = Instant::now();
    let err = solver("piecewise");
    let (f, scale, n_echo): (PiecewiseSmooth, f64, Option<u32>) = match target {
        Target::Toy => (PiecewiseSmooth::floor_and_ramp(), 1.0, None),
        Target::CqEigenfunction => {
            let geom = BoxGeometry::new(cfg.b, cfg.hbar).map_err(|e| Failure::Usage(e.to_string()))?;
            let f = zero_extended_eigenfunction(n, &geom).map_err(|e| Failure::Usage(e.to_string()))?;
            (f, cfg.b, Some(n))
        }
    };
    let w = weak_second_derivative(&f).map_err(&err)?;
    let l2 = l2_norm_squared(&w, f.interval()).map_err(&err)?;
    let mut scaling = Vec::new();
    for k in SCALING_EXPONENTS {
        let h = scale * 2f64.powi(-k);
        scaling.push(ScalingRow {
            h,
            norm: discrete_second_derivative_norm(&f, h).map_err(&err)?,
        });
    }
    let pts: Vec<(f64, f64)> = scaling.iter().map(|r| (r.h.ln(), r.norm.ln())).collect();
    let terms = |ts: &[boxaffine_core::DeltaTerm]| {
        ts.iter()
            .map(|d| PointTerm {
                location: d.location,
                coefficient: d.coefficient,
            })
            .collect::<Vec<_>>()
    };
    let derivatives = Derivatives {
        target: match target {
            Target::Toy => "toy".into(),
            Target::CqEigenfunction => "cq-eigenfunction".into(),
        },
        n: n_echo,
        deltas: terms(&w.delta_terms),
        delta_primes: terms(&w.delta_prime_terms),
        l2_finite: l2.is_finite(),
        l2_norm_squared: l2.is_finite().then_some(l2),
        scaling,
        slope: least_squares_slope(&pts),
    };
    let content = Content {
        command: "check-derivatives".into(),
        units: Units::default(),
        config: Some(ConfigEcho::from(cfg)),
        levels: Vec::new(),
        agreement: None,
        convergence: None,
        derivatives: Some(derivatives),
        validation: None,
    };
    Ok(Report::new(content, BTreeMap::from([("total_ms".to_string(), millis(total))])))
}

pub fn derivatives_csv(report: &Report) -> String {
    let mut out = String::from("h,norm\n");
    if let Some(d) = &report.content.derivatives {
        for r in &d.scaling {
            let _ = writeln!(out, "{},{}", r.h, r.norm);
        }
    }
    out
}

/// Default basis sizes: multiples of 8 not below `levels`, ending at `max`.
pub fn default_sizes(levels: usize, max: usize) -> Vec<usize> {
    let mut sizes: Vec<usize> = (1..).map(|i| 8 * i).take_while(|&n| n <= max).filter(|&n| n >= levels).collect();
    if sizes.last() != Some(&max) && max >= levels {
        sizes.push(max);
    }
    sizes
}

/// Grid sizes with spacing `h`, `h/2`, `h/4`.
pub fn refined_grids(points: usize) -> [usize; 3] {
    [points, 2 * points - 1, 4 * points - 3]
}

pub fn convergence(cfg: &RunConfig, sizes: Option<Vec<usize>>) -> Result<Report, Failure> {
    let total = Instant::now();
    let mut timings = BTreeMap::new();
    let sizes = sizes.unwrap_or_else(|| default_sizes(cfg.levels, cfg.basis_size));
    if cfg.method.uses_rayleigh_ritz() {
        if sizes.len() < 2 || sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Failure::Usage(format!(
                "--sizes must list at least two strictly ascending basis sizes, got {sizes:?}"
            )));
        }
        if sizes[0] < cfg.levels || *sizes.last().unwrap() > boxaffine_core::rayleigh_ritz::MAX_BASIS_SIZE {
            return Err(Failure::Usage(format!(
                "--sizes must lie in {}..={} (levels up to the basis cap), got {sizes:?}",
                cfg.levels,
                boxaffine_core::rayleigh_ritz::MAX_BASIS_SIZE
            )));
        }
    }
    let grids = refined_grids(cfg.grid_size);
    if grids[2] > crate::config::MAX_GRID_SIZE {
        return Err(Failure::Usage(format!(
            "--grid-size {} is too large to refine twice (limit {})",
            cfg.grid_size,
            crate::config::MAX_GRID_SIZE
        )));
    }
    let (rr, shot) = thread::scope(|s| {
        let rr = cfg.method.uses_rayleigh_ritz().then(|| {
            s.spawn(|| {
                let t = Instant::now();
                (convergence_sweep(&cfg.model, &sizes, cfg.levels), millis(t))
            })
        });
        let shot = cfg.method.uses_shooting().then(|| {
            let t = Instant::now();
            let jobs: Vec<_> = grids
                .iter()
                .map(|&m| s.spawn(move || shoot_levels(&cfg.model, m, cfg.levels, cfg.tol)))
                .collect();
            let results: Vec<_> = jobs.into_iter().map(|h| h.join().expect("solver thread panicked")).collect();
            (results, millis(t))
        });
        (rr.map(|h| h.join().expect("solver thread panicked")), shot)
    });

    let rayleigh_ritz = match rr {
        Some((table, ms)) => {
            timings.insert("rayleigh_ritz_ms".to_string(), ms);
            let table = table.map_err(solver("rayleigh_ritz"))?;
            // rounding noise of the dense solve scales with the largest level
            let slack = 1e-12 * table.energies.iter().flatten().fold(1.0, |a: f64, b| a.max(b.abs()));
            Some(BasisSweep {
                nonincreasing: table.is_nonincreasing(slack),
                final_relative_change: table.final_relative_change(),
                sizes: table.sizes,
                energies: table.energies,
            })
        }
        None => None,
    };
    let shooting = match shot {
        Some((results, ms)) => {
            timings.insert("shooting_ms".to_string(), ms);
            let mut energies = Vec::with_capacity(3);
            for r in results {
                energies.push(r?.into_iter().map(|l| l.0).collect::<Vec<f64>>());
            }
            let observed_order = (0..cfg.levels)
                .map(|k| {
                    let column: Vec<f64> = energies.iter().map(|row| row[k]).collect();
                    observed_orders(&column).first().copied().filter(|p| p.is_finite())
                })
                .collect();
            Some(GridSweep {
                grid_sizes: grids.to_vec(),
                energies,
                observed_order,
            })
        }
        None => None,
    };
    timings.insert("total_ms".to_string(), millis(total));
    let content = Content {
        command: "convergence".into(),
        units: Units::default(),
        config: Some(ConfigEcho::from(cfg)),
        levels: Vec::new(),
        agreement: None,
        convergence: Some(Convergence { rayleigh_ritz, shooting }),
        derivatives: None,
        validation: None,
    };
    Ok(Report::new(content, timings))
}

pub fn convergence_csv(report: &Report) -> String {
    let mut out = String::from("method,size,level,energy\n");
    if let Some(c) = &report.content.convergence {
        if let Some(rr) = &c.rayleigh_ritz {
            for (n, row) in rr.sizes.iter().zip(&rr.energies) {
                for (k, e) in row.iter().enumerate() {
                    let _ = writeln!(out, "rayleigh-ritz,{n},{k},{e}");
                }
            }
        }
        if let Some(sh) = &c.shooting {
            for (m, row) in sh.grid_sizes.iter().zip(&sh.energies) {
                for (k, e) in row.iter().enumerate() {
                    let _ = writeln!(out, "shooting,{m},{k},{e}");
                }
            }
        }
    }
    out
}

pub struct ValidationOutcome {
    pub lines: Vec<String>,
    pub report: Report,
    pub all_passed: bool,
}

pub fn validate() -> ValidationOutcome {
    let total = Instant::now();
    let outcomes = acceptance::run_all();
    let mut timings = BTreeMap::new();
    for o in &outcomes {
        timings.insert(format!("criterion_{}_ms", o.id), o.elapsed.as_secs_f64() * 1000.0);
    }
    timings.insert("total_ms".to_string(), millis(total));
    let content = Content {
        command: "validate".into(),
        units: Units::default(),
        config: None,
        levels: Vec::new(),
        agreement: None,
        convergence: None,
        derivatives: None,
        validation: Some(
            outcomes
                .iter()
                .map(|o| CriterionRecord {
                    id: o.id,
                    name: o.name.to_string(),
                    passed: o.passed,
                    detail: o.detail.clone(),
                })
                .collect(),
        ),
    };
    ValidationOutcome {
        lines: outcomes.iter().map(|o| o.to_string()).collect(),
        all_passed: outcomes.iter().all(|o| o.passed),
        report: Report::new(content, timings),
    }
}
