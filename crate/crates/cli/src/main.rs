use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nlstefan::asymptotics::{baiocchi, longtime_convergence, obstacle_solve, DEFAULT_OBSTACLE_MAX_ITER};
use nlstefan::geometry::waiting_time;
use nlstefan::io::{self, ExperimentConfig, PRESETS};
use nlstefan::local_limit::eps_convergence_study;
use nlstefan::nonlocal_heat::decay_check;
use nlstefan::solver::{evolve, temperature, Snapshot, Trajectory};
use nlstefan::{Error, Field64, Trajectory64};

#[derive(Parser)]
#[command(name = "nlstefan", version, about = "Nonlocal one-phase Stefan problem experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file (`key = value` lines)
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset, used when no configuration file is given
    #[arg(long)]
    preset: Option<String>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured datum and write snapshots and diagnostics
    Simulate(Common),
    /// Post-process the snapshots written by `simulate`
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Output directory of an earlier `simulate` run
        #[arg(long)]
        trajectory: PathBuf,
    },
    /// Compare the rescaled problem with the local Stefan problem
    LimitEps(Common),
    /// Solve the obstacle problem and track convergence to the mesa
    Mesa(Common),
    /// Decay of the nonlocal heat semigroup against the local heat flow
    HeatDecay(Common),
    /// List the built-in presets
    PresetList,
}

fn load(c: &Common) -> Result<ExperimentConfig, Error> {
    let cfg = match (&c.config, &c.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(name)) => io::preset(name)?,
        (None, None) => {
            return Err(Error::Config("either --config or --preset is required".into()))
        }
    };
    fs::create_dir_all(&c.out)?;
    fs::write(c.out.join("config.resolved"), cfg.resolved())?;
    Ok(cfg)
}

fn simulate(c: &Common) -> Result<(), Error> {
    let cfg = load(c)?;
    let f = cfg.initial_field()?;
    let kernel = cfg.kernel()?;
    let traj = evolve(&f, &kernel, &cfg.solver())?;
    io::write_diagnostics(&c.out.join("diagnostics.csv"), &traj)?;
    io::write_supports(&c.out.join("supports.csv"), &traj, cfg.support_delta, cfg.mushy_delta)?;
    write_snapshots(&c.out, &traj)?;
    let fields: Vec<(String, Field64)> = traj
        .snapshots
        .iter()
        .map(|s| (format!("t = {}", s.t), s.u.clone()))
        .collect();
    io::render_plot(&fields, &c.out.join("snapshots.svg"))?;
    let d = traj.diagnostics.last().expect("at least one diagnostic row");
    println!(
        "t_end = {}  mass = {:.12}  sup u = {:.6}  |v|_1 = {:.6e}  waiting time = {:.6}",
        d.t,
        d.mass,
        d.sup_u,
        d.l1_v,
        waiting_time(&f, &kernel).unwrap_or(f64::INFINITY)
    );
    Ok(())
}

fn write_snapshots(out: &Path, traj: &Trajectory64) -> Result<(), Error> {
    let dir = out.join("snapshots");
    fs::create_dir_all(&dir)?;
    let mut index = String::from("index,t,file\n");
    for (k, s) in traj.snapshots.iter().enumerate() {
        let name = format!("u_{k:04}.csv");
        io::write_field_csv(&dir.join(&name), &s.u)?;
        let _ = writeln!(index, "{k},{:.16e},{name}", s.t);
    }
    fs::write(dir.join("index.csv"), index)?;
    Ok(())
}

fn read_snapshots(dir: &Path) -> Result<Trajectory64, Error> {
    let dir = dir.join("snapshots");
    let index = fs::read_to_string(dir.join("index.csv"))
        .map_err(|e| Error::Config(format!("cannot read trajectory index in {}: {e}", dir.display())))?;
    let mut snapshots = Vec::new();
    for line in index.lines().skip(1).filter(|l| !l.trim().is_empty()) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parse(format!("bad index row `{line}`")));
        }
        let t: f64 = cols[1]
            .parse()
            .map_err(|_| Error::Parse(format!("bad time `{}`", cols[1])))?;
        snapshots.push(Snapshot {
            t,
            u: io::read_field_csv(&dir.join(cols[2]))?,
        });
    }
    Ok(Trajectory {
        snapshots,
        diagnostics: Vec::new(),
    })
}

fn analyze(c: &Common, trajectory: &Path) -> Result<(), Error> {
    let cfg = load(c)?;
    let kernel = cfg.kernel()?;
    let traj = read_snapshots(trajectory)?;
    io::write_supports(&c.out.join("supports.csv"), &traj, cfg.support_delta, cfg.mushy_delta)?;
    let w = baiocchi(&traj)?;
    io::write_field_csv(&c.out.join("baiocchi.csv"), &w)?;
    let mut s = String::from("t,mass,l1_v,water_components,mushy_measure\n");
    for snap in &traj.snapshots {
        let v = temperature(&snap.u);
        let _ = writeln!(
            s,
            "{},{:.16e},{:.10e},{},{:.10e}",
            snap.t,
            snap.u.integrate(),
            v.integrate(),
            nlstefan::geometry::water_components(&v, cfg.support_delta)?.len(),
            nlstefan::geometry::mushy_region(&snap.u, cfg.mushy_delta)?.measure()
        );
    }
    fs::write(c.out.join("analysis.csv"), s)?;
    let residual = nlstefan::local_limit::weak_form_residual(&traj, &kernel, |x| (-x * x).exp())?;
    println!(
        "{} snapshots, weak-form residual (Gaussian test function) = {residual:.3e}",
        traj.snapshots.len()
    );
    Ok(())
}

fn limit_eps(c: &Common) -> Result<(), Error> {
    let cfg = load(c)?;
    let grid = cfg.grid()?;
    let study = eps_convergence_study(
        &cfg.datum()?,
        &grid,
        &cfg.kernel()?,
        &cfg.eps_list,
        cfg.t_eval,
        &cfg.study_options(),
    )?;
    io::write_eps_study(&c.out.join("eps_study.csv"), &study)?;
    io::write_field_csv(&c.out.join("local.csv"), &study.local)?;
    let mut fields = vec![("local".to_string(), study.local.clone())];
    for r in &study.runs {
        println!(
            "eps = {:<6} L1 error = {:.4e}  mushy measure = {:.4e}",
            r.eps, r.l1_error, r.mushy_measure
        );
        fields.push((format!("eps = {}", r.eps), r.u.clone()));
    }
    io::render_plot(&fields, &c.out.join("eps_study_plot.svg"))?;
    Ok(())
}

fn mesa(c: &Common) -> Result<(), Error> {
    let cfg = load(c)?;
    let f = cfg.initial_field()?;
    let kernel = cfg.kernel()?;
    let sol = obstacle_solve(&f, &kernel, cfg.obstacle_tol, DEFAULT_OBSTACLE_MAX_ITER)?;
    io::write_mesa(&c.out.join("mesa.csv"), &f, &sol)?;
    io::render_plot(
        &[("f".to_string(), f.clone()), ("mesa".to_string(), sol.mesa.clone())],
        &c.out.join("mesa_plot.svg"),
    )?;
    let r = sol.residuals;
    println!(
        "obstacle: {} iterations, residuals neg_w = {:.2e} lower = {:.2e} upper = {:.2e} compl = {:.2e}, mass = {:.10}",
        sol.iterations,
        r.neg_w,
        r.lower,
        r.upper,
        r.compl,
        sol.mesa.integrate()
    );
    if !cfg.longtime_times.is_empty() {
        let report = longtime_convergence(&f, &kernel, &cfg.longtime_times, cfg.longtime_dt)?;
        io::write_convergence(&c.out.join("convergence.csv"), &report)?;
        for row in &report.rows {
            println!("T = {:<6} |u(T) - Pf|_1 = {:.4e}  |v(T)|_1 = {:.4e}", row.t, row.l1_error, row.l1_v);
        }
        if let (Some(s), Some(r)) = (report.decay_slope, report.decay_correlation) {
            println!("log |v|_1 tail fit: slope = {s:.4}, correlation = {r:.4}");
        }
    }
    Ok(())
}

fn heat_decay(c: &Common) -> Result<(), Error> {
    let cfg = load(c)?;
    let grid = cfg.heat_grid()?;
    let f = cfg.heat_datum.sample(&grid);
    let rows = decay_check(&f, &cfg.kernel()?, &cfg.heat_times)?;
    io::write_decay(&c.out.join("decay.csv"), &rows)?;
    for r in &rows {
        println!(
            "t = {:<6} D = {:.4e}  |u|_1 = {:.6}  sup regular part = {:.4e}",
            r.t, r.d, r.l1_u, r.sup_regular
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Simulate(c) => simulate(c),
        Command::Analyze { common, trajectory } => analyze(common, trajectory),
        Command::LimitEps(c) => limit_eps(c),
        Command::Mesa(c) => mesa(c),
        Command::HeatDecay(c) => heat_decay(c),
        Command::PresetList => {
            for name in PRESETS {
                println!("{name:<14} {}", io::preset_summary(name).unwrap_or(""));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
