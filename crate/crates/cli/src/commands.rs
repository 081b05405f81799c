//! Experiment orchestration: one function per subcommand, each writing a
//! CSV table and a JSON summary.
//!
//! Exit codes: 0 on success, 2 on solver errors, 3 when a check-style
//! command (talenti, fk-check, nonexistence, limit-gap) finds a violation.

use crate::config::{Command, RunConfig};
use crate::output::{Csv, CsvCell, Json};
use crate::synth;
use bulksurf_core::disk::{self, DiskGrid, TalentiProblem};
use bulksurf_core::rng::SplitMix64;
use bulksurf_core::symmetrize::cap_symmetrize_disk;
use bulksurf_core::{fem, hessian, radial};
use std::path::PathBuf;
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SOLVER_ERROR: i32 = 2;
pub const EXIT_VERDICT_FAILURE: i32 = 3;

struct Artifacts {
    csv: Csv,
    headline: Json,
    verdicts: Json,
    failed_checks: usize,
}

impl Artifacts {
    fn new(csv: Csv) -> Self {
        Artifacts {
            csv,
            headline: Json::obj(),
            verdicts: Json::obj(),
            failed_checks: 0,
        }
    }

    fn check(&mut self, name: &str, ok: bool) {
        self.verdicts.push(name, Json::Bool(ok));
        if !ok {
            self.failed_checks += 1;
        }
    }
}

/// Runs a validated configuration; returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    let start = Instant::now();
    let result = match config.command {
        Command::EigenBall => eigen_ball(config),
        Command::EigenFem => eigen_fem(config),
        Command::Hessian => hessian_cmd(config),
        Command::HessianFd => hessian_fd_cmd(config),
        Command::RegimeScan => regime_scan_cmd(config),
        Command::Talenti => talenti_cmd(config),
        Command::Nonexistence => nonexistence_cmd(config),
        Command::FkCheck => fk_check_cmd(config),
        Command::LimitGap => limit_gap_cmd(config),
    };
    let art = match result {
        Ok(art) => art,
        Err(message) => {
            eprintln!("error: {message}");
            return EXIT_SOLVER_ERROR;
        }
    };
    let stem = PathBuf::from(config.text("out"));
    let csv_path = stem.with_extension("csv");
    let json_path = stem.with_extension("json");

    let mut summary = Json::obj();
    summary.push("command", Json::Str(config.command.name().into()));
    let mut params = Json::obj();
    for (key, value) in &config.values {
        params.push(key, Json::Str(value.to_string()));
    }
    summary.push("parameters", params);
    summary.push("headline_numbers", art.headline);
    summary.push("verdicts", art.verdicts);
    summary.push("wall_time_s", Json::Num(start.elapsed().as_secs_f64()));

    if let Err(e) = std::fs::write(&csv_path, art.csv.render()) {
        eprintln!("error: writing {}: {e}", csv_path.display());
        return EXIT_SOLVER_ERROR;
    }
    if let Err(e) = std::fs::write(&json_path, summary.render()) {
        eprintln!("error: writing {}: {e}", json_path.display());
        return EXIT_SOLVER_ERROR;
    }
    println!(
        "{}: wrote {} and {}",
        config.command.name(),
        csv_path.display(),
        json_path.display()
    );
    if art.failed_checks > 0 {
        eprintln!("{} check(s) failed", art.failed_checks);
        EXIT_VERDICT_FAILURE
    } else {
        EXIT_OK
    }
}

/// Worker-pool map keyed by trial index; results come back in input order
/// regardless of the schedule. Thread count from BULKSURF_THREADS (0 or
/// unset = all cores).
fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let threads = match std::env::var("BULKSURF_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        Some(0) | None => std::thread::available_parallelism()
            .map(|p| p.get())
            .unwrap_or(1),
        Some(t) => t,
    }
    .min(n.max(1));
    if threads <= 1 {
        return (0..n).map(f).collect();
    }
    let counter = std::sync::atomic::AtomicUsize::new(0);
    let mut results: Vec<(usize, T)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|_| {
                scope.spawn(|| {
                    let mut chunk = Vec::new();
                    loop {
                        let i = counter.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                        if i >= n {
                            return chunk;
                        }
                        chunk.push((i, f(i)));
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    results.sort_by_key(|(i, _)| *i);
    results.into_iter().map(|(_, t)| t).collect()
}

fn eigen_ball(cfg: &RunConfig) -> Result<Artifacts, String> {
    let d = cfg.int("d") as usize;
    let eig = radial::solve_principal_ball(
        d,
        cfg.float("r"),
        cfg.float("c_i"),
        cfg.float("c_b"),
        cfg.int("grid_n") as usize,
    )
    .map_err(|e| e.to_string())?;
    let mut csv = Csv::new(&["r", "u", "du"]);
    for ((r, u), du) in eig.radii().zip(&eig.u).zip(&eig.du) {
        csv.row(&[CsvCell::Num(r), CsvCell::Num(*u), CsvCell::Num(*du)]);
    }
    let mut art = Artifacts::new(csv);
    art.headline.push("lambda", Json::Num(eig.lambda));
    art.headline.push("lambda_bar", Json::Num(eig.lambda_bar));
    art.headline
        .push("lambda_tilde", Json::Num(eig.lambda_tilde));
    art.headline.push("v", Json::Num(eig.v));
    art.headline.push("u_at_r", Json::Num(eig.u_at_boundary()));
    art.headline.push("du_at_r", Json::Num(eig.du_at_r));
    art.headline.push("d2u_at_r", Json::Num(eig.d2u_at_r));
    art.headline.push(
        "rayleigh_gap",
        Json::Num((eig.rayleigh_quotient() - eig.lambda).abs()),
    );
    art.check("normalized", (eig.coupled_norm_sq() - 1.0).abs() < 1e-10);
    Ok(art)
}

fn eigen_fem(cfg: &RunConfig) -> Result<Artifacts, String> {
    let (c_i, c_b, h) = (cfg.float("c_i"), cfg.float("c_b"), cfg.float("h"));
    let domain = cfg.text("domain");
    let mesh = match domain {
        "disk" => fem::make_disk_mesh(h),
        "rectangle" => fem::make_rectangle_mesh(cfg.float("a"), cfg.float("b"), h),
        other => return Err(format!("unknown domain `{other}` (disk or rectangle)")),
    }
    .map_err(|e| e.to_string())?;
    let (lambda_h, _) = fem::lambda_fem(&mesh, c_i, c_b).map_err(|e| e.to_string())?;
    let mut csv = Csv::new(&["domain", "h", "n_vertices", "area", "perimeter", "lambda_h"]);
    csv.row(&[
        CsvCell::Text(domain.to_string()),
        CsvCell::Num(h),
        CsvCell::Int(mesh.n_vertices() as i64),
        CsvCell::Num(mesh.area()),
        CsvCell::Num(mesh.perimeter()),
        CsvCell::Num(lambda_h),
    ]);
    let mut art = Artifacts::new(csv);
    art.headline.push("lambda_h", Json::Num(lambda_h));
    if domain == "disk" {
        // radial cross-check wired into the command
        let reference = radial::solve_principal_ball(2, 1.0, c_i, c_b, cfg.int("grid_n") as usize)
            .map_err(|e| e.to_string())?;
        let delta = (lambda_h - reference.lambda).abs();
        art.headline
            .push("lambda_radial", Json::Num(reference.lambda));
        art.headline.push("crosscheck_delta", Json::Num(delta));
        art.check("crosscheck_within_1e-2", delta <= 1e-2);
    }
    Ok(art)
}

fn hessian_cmd(cfg: &RunConfig) -> Result<Artifacts, String> {
    let d = cfg.int("d") as usize;
    let grid_n = cfg.int("grid_n") as usize;
    let k_max = cfg.int("k_max") as usize;
    let eig = radial::solve_principal_ball(d, 1.0, cfg.float("c_i"), cfg.float("c_b"), grid_n)
        .map_err(|e| e.to_string())?;
    let coeffs = hessian::ball_coefficients(&eig).map_err(|e| e.to_string())?;
    let mut csv = Csv::new(&["k", "sigma_k", "d_k", "p_k1", "q_k", "a_k"]);
    let mut a2 = f64::NAN;
    let mut a1 = f64::NAN;
    let mut min_ratio = f64::INFINITY;
    for k in 1..=k_max {
        let row = hessian::hessian_row_with(k, &eig, &coeffs, grid_n).map_err(|e| e.to_string())?;
        if k == 1 {
            a1 = row.a_k;
        }
        if k == 2 {
            a2 = row.a_k;
        }
        if k >= 2 {
            min_ratio = min_ratio.min(row.a_k / (1.0 + row.sigma_k));
        }
        csv.row(&[
            CsvCell::Int(k as i64),
            CsvCell::Num(row.sigma_k),
            CsvCell::Num(row.d_k),
            CsvCell::Num(row.p_k1),
            CsvCell::Num(row.q_k),
            CsvCell::Num(row.a_k),
        ]);
    }
    let mut art = Artifacts::new(csv);
    art.headline.push("lambda", Json::Num(eig.lambda));
    art.headline.push("mu", Json::Num(coeffs.mu));
    art.headline
        .push("coeff_alpha", Json::Num(coeffs.coeff_alpha));
    art.headline
        .push("coeff_beta", Json::Num(coeffs.coeff_beta));
    art.headline
        .push("coeff_gamma", Json::Num(coeffs.coeff_gamma));
    art.headline
        .push("coeff_delta", Json::Num(coeffs.coeff_delta));
    art.headline.push("a1_over_a2", Json::Num(a1 / a2));
    art.headline.push("min_ratio", Json::Num(min_ratio));
    Ok(art)
}

fn hessian_fd_cmd(cfg: &RunConfig) -> Result<Artifacts, String> {
    let (c_i, c_b) = (cfg.float("c_i"), cfg.float("c_b"));
    let k = cfg.int("k") as usize;
    let (t, h) = (cfg.float("t"), cfg.float("h"));
    let grid_n = cfg.int("grid_n") as usize;
    let eig = radial::solve_principal_ball(2, 1.0, c_i, c_b, grid_n).map_err(|e| e.to_string())?;
    let coeffs = hessian::ball_coefficients(&eig).map_err(|e| e.to_string())?;
    let row = hessian::hessian_row_with(k, &eig, &coeffs, grid_n).map_err(|e| e.to_string())?;
    let fd = fem::hessian_fd(k, c_i, c_b, t, h, coeffs.mu).map_err(|e| e.to_string())?;
    let rel = (fd - row.a_k).abs() / row.a_k.abs().max(1e-300);
    let mut csv = Csv::new(&["k", "t", "h", "mu", "a_k_analytic", "a_k_fd", "rel_gap"]);
    csv.row(&[
        CsvCell::Int(k as i64),
        CsvCell::Num(t),
        CsvCell::Num(h),
        CsvCell::Num(coeffs.mu),
        CsvCell::Num(row.a_k),
        CsvCell::Num(fd),
        CsvCell::Num(rel),
    ]);
    let mut art = Artifacts::new(csv);
    art.headline.push("mu", Json::Num(coeffs.mu));
    art.headline.push("a_k_analytic", Json::Num(row.a_k));
    art.headline.push("a_k_fd", Json::Num(fd));
    art.headline.push("rel_gap", Json::Num(rel));
    Ok(art)
}

fn regime_scan_cmd(cfg: &RunConfig) -> Result<Artifacts, String> {
    let report = hessian::regime_scan_with_grid(
        cfg.int("d") as usize,
        cfg.float("c_i"),
        cfg.float("c_b"),
        cfg.int("k_max") as usize,
        cfg.int("grid_n") as usize,
    )
    .map_err(|e| e.to_string())?;
    let mut csv = Csv::new(&["k", "sigma_k", "a_k", "a_k_over_w12"]);
    for row in &report.rows {
        csv.row(&[
            CsvCell::Int(row.k as i64),
            CsvCell::Num(row.sigma_k),
            CsvCell::Num(row.a_k),
            CsvCell::Num(row.a_k / (1.0 + row.sigma_k)),
        ]);
    }
    let mut art = Artifacts::new(csv);
    let verdict = match report.verdict {
        hessian::RegimeVerdict::NegativeDirectionFound => "negative_direction_found",
        hessian::RegimeVerdict::CoerciveUpToKmax => "coercive_up_to_kmax",
    };
    art.headline.push("min_ratio", Json::Num(report.min_ratio));
    art.headline.push("min_k", Json::Int(report.min_k as i64));
    art.verdicts
        .push("classification", Json::Str(verdict.into()));
    match report.tail {
        hessian::TailStatus::Certified { probe_k, ratio } => {
            art.headline.push("tail_probe_k", Json::Int(probe_k as i64));
            art.headline.push("tail_ratio", Json::Num(ratio));
            art.verdicts.push("tail", Json::Str("certified".into()));
        }
        hessian::TailStatus::Unchecked => {
            art.verdicts.push("tail", Json::Str("unchecked".into()));
        }
    }
    if report.outside_proven_regime {
        art.verdicts.push("outside_proven_regime", Json::Bool(true));
    }
    Ok(art)
}

fn talenti_cmd(cfg: &RunConfig) -> Result<Artifacts, String> {
    let kind = cfg.text("kind").to_string();
    let trials = cfg.int("trials") as usize;
    let grid =
        DiskGrid::new(cfg.int("n_r") as usize, cfg.int("m") as usize).map_err(|e| e.to_string())?;
    let beta = cfg.float("robin_beta");
    let tol = cfg.float("tol");
    let seed = cfg.seed();

    struct Trial {
        holds: bool,
        worst_deficit: f64,
        asym: f64,
        l2_margin: f64,
        mass_gap: f64,
        norms: [f64; 6],
        error: Option<String>,
    }

    let run_trial = |i: usize| -> Trial {
        let mut rng = SplitMix64::stream(seed, i as u64);
        let f = synth::random_bulk_field(grid, &mut rng, 1.0);
        let problem = match kind.as_str() {
            "robin" => {
                // half the trials exercise the w = 0 mass-equality case
                let w = if i % 2 == 0 {
                    grid.circle(|_| 0.0)
                } else {
                    synth::random_circle_field(grid, &mut rng, 0.5)
                };
                TalentiProblem::Robin {
                    f: f.clone(),
                    w,
                    robin_beta: beta,
                }
            }
            "dirichlet" => {
                let w = synth::random_circle_field(grid, &mut rng, 0.5);
                TalentiProblem::Dirichlet { f: f.clone(), w }
            }
            "coupled" => {
                let g = synth::random_circle_field(grid, &mut rng, 1.0);
                let m1 = synth::random_bulk_field(grid, &mut rng, 0.4);
                let m2 = synth::random_circle_field(grid, &mut rng, 1.0);
                // keep the surface operator away from its kernel
                let m2 = bulksurf_core::symmetrize::CircleField::new(
                    1.0,
                    m2.values.iter().map(|v| v + 0.1).collect(),
                )
                .expect("valid field");
                TalentiProblem::Coupled {
                    f: f.clone(),
                    g,
                    m1,
                    m2,
                    robin_beta: beta,
                }
            }
            other => {
                return Trial {
                    holds: false,
                    worst_deficit: f64::NAN,
                    asym: f64::NAN,
                    l2_margin: f64::NAN,
                    mass_gap: f64::NAN,
                    norms: [f64::NAN; 6],
                    error: Some(format!("unknown kind `{other}`")),
                }
            }
        };
        match disk::talenti_verify(&problem, tol) {
            Ok(rep) => {
                let fs = cap_symmetrize_disk(&f).expect("nonnegative by construction");
                let asym = synth::asymmetry_distance(grid, &f, &fs);
                let mut norms = [0.0; 6];
                for (slot, n) in rep.norms.iter().enumerate() {
                    norms[2 * slot] = n.norm_u;
                    norms[2 * slot + 1] = n.norm_v;
                }
                Trial {
                    holds: rep.comparison.holds,
                    worst_deficit: rep.comparison.worst_deficit,
                    asym,
                    l2_margin: norms[3] - norms[2],
                    mass_gap: rep.mass_equality_gap.unwrap_or(f64::NAN),
                    norms,
                    error: None,
                }
            }
            Err(e) => Trial {
                holds: false,
                worst_deficit: f64::NAN,
                asym: f64::NAN,
                l2_margin: f64::NAN,
                mass_gap: f64::NAN,
                norms: [f64::NAN; 6],
                error: Some(e.to_string()),
            },
        }
    };

    let results = par_map(trials, run_trial);
    if let Some(t) = results.iter().find(|t| t.error.is_some()) {
        return Err(t.error.clone().unwrap());
    }

    let mut csv = Csv::new(&[
        "trial",
        "holds",
        "worst_deficit",
        "f_asymmetry",
        "l2_margin",
        "mass_gap",
        "norm1_u",
        "norm1_v",
        "norm2_u",
        "norm2_v",
        "norm4_u",
        "norm4_v",
    ]);
    let mut violations = 0usize;
    let mut margin_failures = 0usize;
    for (i, t) in results.iter().enumerate() {
        if !t.holds {
            violations += 1;
        }
        if t.asym >= 0.1 && t.l2_margin <= 0.0 {
            margin_failures += 1;
        }
        csv.row(&[
            CsvCell::Int(i as i64),
            CsvCell::Bool(t.holds),
            CsvCell::Num(t.worst_deficit),
            CsvCell::Num(t.asym),
            CsvCell::Num(t.l2_margin),
            CsvCell::Num(t.mass_gap),
            CsvCell::Num(t.norms[0]),
            CsvCell::Num(t.norms[1]),
            CsvCell::Num(t.norms[2]),
            CsvCell::Num(t.norms[3]),
            CsvCell::Num(t.norms[4]),
            CsvCell::Num(t.norms[5]),
        ]);
    }
    let worst = results
        .iter()
        .map(|t| t.worst_deficit)
        .fold(f64::INFINITY, f64::min);
    let worst_mass = results
        .iter()
        .map(|t| t.mass_gap)
        .filter(|g| g.is_finite())
        .fold(0.0f64, f64::max);
    let mut art = Artifacts::new(csv);
    art.headline.push("trials", Json::Int(trials as i64));
    art.headline
        .push("violations", Json::Int(violations as i64));
    art.headline.push("worst_deficit", Json::Num(worst));
    art.headline.push("worst_mass_gap", Json::Num(worst_mass));
    if let Some(t) = results.last() {
        let records: Vec<Json> = [1.0, 2.0, 4.0]
            .iter()
            .enumerate()
            .map(|(slot, &p)| {
                let mut rec = Json::obj();
                rec.push("p", Json::Num(p));
                rec.push("norm_u", Json::Num(t.norms[2 * slot]));
                rec.push("norm_v", Json::Num(t.norms[2 * slot + 1]));
                rec
            })
            .collect();
        art.headline
            .push("norm_records_last_trial", Json::Arr(records));
    }
    art.check("comparison_holds_all_trials", violations == 0);
    art.check("l2_margin_positive_when_asymmetric", margin_failures == 0);
    if kind == "robin" {
        art.check("mass_equality_when_w_zero", worst_mass < 1e-8);
    }
    Ok(art)
}

fn nonexistence_cmd(cfg: &RunConfig) -> Result<Artifacts, String> {
    let (c_i, c_b) = (cfg.float("c_i"), cfg.float("c_b"));
    let rows =
        fem::nonexistence_scan(c_i, c_b, cfg.float_list("aspects")).map_err(|e| e.to_string())?;
    let mut csv = Csv::new(&[
        "aspect",
        "area",
        "perimeter",
        "lambda_h",
        "upper_bound",
        "gap",
    ]);
    let mut bounds_ok = true;
    let mut above_floor = true;
    for r in &rows {
        bounds_ok &= r.lambda_h <= r.upper_bound + 1e-2;
        above_floor &= r.lambda_h > -c_b;
        csv.row(&[
            CsvCell::Num(r.aspect),
            CsvCell::Num(r.area),
            CsvCell::Num(r.perimeter),
            CsvCell::Num(r.lambda_h),
            CsvCell::Num(r.upper_bound),
            CsvCell::Num(r.lambda_h + c_b),
        ]);
    }
    let monotone = rows
        .windows(2)
        .all(|w| w[1].lambda_h + c_b <= w[0].lambda_h + c_b);
    let mut art = Artifacts::new(csv);
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        art.headline.push(
            "gap_shrink_factor",
            Json::Num((last.lambda_h + c_b) / (first.lambda_h + c_b)),
        );
    }
    art.check("above_minus_c_b", above_floor);
    art.check("below_perimeter_bound", bounds_ok);
    art.check("gap_decreasing_in_aspect", monotone);
    Ok(art)
}

fn fk_check_cmd(cfg: &RunConfig) -> Result<Artifacts, String> {
    let trials = cfg.int("trials") as usize;
    let grid =
        DiskGrid::new(cfg.int("n_r") as usize, cfg.int("m") as usize).map_err(|e| e.to_string())?;
    let tol = cfg.float("tol");
    let seed = cfg.seed();
    let results: Vec<Result<(f64, f64), String>> = par_map(trials, |i| {
        let mut rng = SplitMix64::stream(seed, i as u64);
        let f = synth::random_bulk_field(grid, &mut rng, 1.5);
        let g = synth::random_circle_field(grid, &mut rng, 1.5);
        let fs = cap_symmetrize_disk(&f).map_err(|e| e.to_string())?;
        let gs = bulksurf_core::symmetrize::cap_symmetrize_circle(&g).map_err(|e| e.to_string())?;
        let l = disk::lambda_disk_general(&f, &g).map_err(|e| e.to_string())?;
        let ls = disk::lambda_disk_general(&fs, &gs).map_err(|e| e.to_string())?;
        Ok((l, ls))
    });
    let mut csv = Csv::new(&["trial", "lambda", "lambda_symmetrized", "slack"]);
    let mut violations = 0usize;
    let mut worst = f64::INFINITY;
    for (i, r) in results.iter().enumerate() {
        let (l, ls) = r.clone()?;
        let slack = l - ls;
        worst = worst.min(slack);
        if slack < -tol {
            violations += 1;
        }
        csv.row(&[
            CsvCell::Int(i as i64),
            CsvCell::Num(l),
            CsvCell::Num(ls),
            CsvCell::Num(slack),
        ]);
    }
    let mut art = Artifacts::new(csv);
    art.headline.push("trials", Json::Int(trials as i64));
    art.headline
        .push("violations", Json::Int(violations as i64));
    art.headline.push("worst_slack", Json::Num(worst));
    art.check("symmetrization_lowers_eigenvalue", violations == 0);
    Ok(art)
}

fn limit_gap_cmd(cfg: &RunConfig) -> Result<Artifacts, String> {
    let d = cfg.int("d") as usize;
    let rows = radial::limit_gap_scan(d, cfg.float_list("c_i_list")).map_err(|e| e.to_string())?;
    let grid_n = cfg.int("grid_n") as usize;
    let robin = radial::robin_eigenvalue(d, 1.0, grid_n).map_err(|e| e.to_string())?;
    let mut csv = Csv::new(&["c_i", "lambda", "gap"]);
    for (c_i, gap) in &rows {
        csv.row(&[
            CsvCell::Num(*c_i),
            CsvCell::Num(c_i + gap),
            CsvCell::Num(*gap),
        ]);
    }
    // the gap is a non-increasing function of c_i, and approaches the Robin
    // eigenvalue from below as c_i decreases
    let monotone = rows.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-9);
    let positive = rows.iter().all(|(_, g)| *g > 0.0);
    let last_gap = rows.last().map(|(_, g)| *g).unwrap_or(f64::NAN);
    let rel = (last_gap - robin).abs() / robin;
    let mut art = Artifacts::new(csv);
    art.headline.push("robin_eigenvalue", Json::Num(robin));
    art.headline.push("last_gap", Json::Num(last_gap));
    art.headline
        .push("relative_distance_to_robin", Json::Num(rel));
    art.check("gap_positive", positive);
    art.check("gap_monotone_in_c_i", monotone);
    art.check("converges_to_robin_within_1pct", rel <= 0.01);
    Ok(art)
}
