//! Experiment configuration, presets, CSV output and SVG line plots.
//!
//! Configuration files are flat `key = value` lines; `#` starts a comment.
//! A `preset` key, if present, is applied first and the remaining keys
//! override it. Data are written as
//!
//! ```text
//! const(a, b, c) + possin(a, b, amp, freq) + sin(a, b, amp, freq, offset)
//! ```
//!
//! for `c·1_[a,b]`, `amp (sin(freq x))_+ 1_[a,b]` and
//! `(amp sin(freq x) + offset) 1_[a,b]`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::asymptotics::{LongtimeReport, ObstacleSolution};
use crate::geometry::{mushy_region, support, water_components};
use crate::local_limit::{EpsStudy, StudyOptions};
use crate::nonlocal_heat::DecayRow;
use crate::solver::{temperature, Scheme, SolverConfig, Trajectory};
use crate::{Datum, Error, Field, Grid, Kernel, Piece, Result, Scalar, Shape};

pub const PRESETS: [&str; 4] = ["mushy", "disconnected", "eps-limit", "mesa"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelChoice {
    /// `0.75 (1 − x²)_+`
    Polynomial,
    /// `½ 1_{|x| ≤ 1}`
    Indicator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Option<String>,
    pub kernel: KernelChoice,
    pub epsilon: f64,
    pub xmin: f64,
    pub xmax: f64,
    pub n: usize,
    pub datum: Datum,
    /// CSV field (`x,value`) replacing `datum` when set.
    pub datum_file: Option<PathBuf>,
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    pub snapshots: Vec<f64>,
    pub gamma_n: u32,
    pub picard_max_iter: usize,
    pub fft: bool,
    pub support_delta: f64,
    pub mushy_delta: f64,
    pub eps_list: Vec<f64>,
    pub t_eval: f64,
    pub refine: usize,
    pub longtime_times: Vec<f64>,
    pub longtime_dt: f64,
    pub obstacle_tol: f64,
    pub heat_datum: Datum,
    pub heat_times: Vec<f64>,
    pub heat_length: f64,
    pub heat_n: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            preset: None,
            kernel: KernelChoice::Polynomial,
            epsilon: 1.0,
            xmin: -6.0,
            xmax: 6.0,
            n: 2048,
            datum: Datum::mushy_preset(),
            datum_file: None,
            scheme: Scheme::Rk4,
            dt: 1e-3,
            t_end: 2.0,
            snapshots: vec![0.1, 0.2, 0.3, 0.5, 1.0],
            gamma_n: 1,
            picard_max_iter: 200,
            fft: false,
            support_delta: 1e-8,
            mushy_delta: 1e-6,
            eps_list: vec![1.0, 0.5, 0.2],
            t_eval: 1.0,
            refine: 4,
            longtime_times: vec![1.0, 5.0, 10.0, 20.0],
            longtime_dt: 0.01,
            obstacle_tol: 1e-10,
            heat_datum: Datum::indicator(-1.0, 1.0, 1.0),
            heat_times: vec![5.0, 10.0, 20.0, 40.0, 80.0],
            heat_length: 102.4,
            heat_n: 2048,
        }
    }
}

/// The named experiment setups.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let base = ExperimentConfig {
        preset: Some(name.to_string()),
        ..Default::default()
    };
    match name {
        "mushy" => Ok(base),
        "disconnected" => Ok(ExperimentConfig {
            xmin: -4.0,
            xmax: 4.0,
            datum: Datum::disconnected_preset(),
            t_end: 1.0,
            snapshots: (1..20).map(|k| k as f64 * 0.05).collect(),
            ..base
        }),
        "eps-limit" => Ok(ExperimentConfig {
            t_end: 1.0,
            snapshots: vec![],
            ..base
        }),
        "mesa" => Ok(ExperimentConfig {
            xmin: -8.0,
            xmax: 10.0,
            n: 4096,
            datum: Datum::mesa_preset(),
            dt: 0.01,
            t_end: 20.0,
            snapshots: vec![1.0, 5.0, 10.0],
            fft: true,
            ..base
        }),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// One-line description of each preset.
pub fn preset_summary(name: &str) -> Option<&'static str> {
    Some(match name {
        "mushy" => "f = 2 on [-1, 1]; mushy annulus and localization on [-6, 6]",
        "disconnected" => "f = 2.5 on [-1.25, -0.5] + 0.99 on [0.5, 1]; water emergence on [-4, 4]",
        "eps-limit" => "f = 2 on [-1, 1]; eps in {1, 0.5, 0.2} against the local problem",
        "mesa" => "sine bump, raised sine plateau and small step on [-8, 10]; long-time mesa",
        _ => return None,
    })
}

/// Splits `key = value` lines, rejecting duplicates and lines without `=`.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", no + 1)))?;
        let k = k.trim().to_string();
        if k.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", no + 1)));
        }
        if map.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{k}`", no + 1)));
        }
    }
    Ok(map)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{v}`")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    if v.trim().is_empty() {
        return Ok(vec![]);
    }
    v.split(',').map(|s| num(key, s.trim())).collect()
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Parses the piece syntax described in the module docs.
pub fn parse_datum(text: &str) -> Result<Datum> {
    let mut pieces = Vec::new();
    for term in text.split('+') {
        let term = term.trim();
        let open = term
            .find('(')
            .ok_or_else(|| Error::Config(format!("datum term `{term}` lacks arguments")))?;
        if !term.ends_with(')') {
            return Err(Error::Config(format!("datum term `{term}` is not closed")));
        }
        let name = term[..open].trim();
        let args = list("datum", &term[open + 1..term.len() - 1])?;
        let shape = match (name, args.len()) {
            ("const", 3) => Shape::Constant(args[2]),
            ("possin", 4) => Shape::PositiveSine { amp: args[2], freq: args[3] },
            ("sin", 5) => Shape::Sine { amp: args[2], freq: args[3], offset: args[4] },
            _ => {
                return Err(Error::Config(format!(
                    "datum term `{term}`: expected const(a,b,c), possin(a,b,amp,freq) or sin(a,b,amp,freq,offset)"
                )))
            }
        };
        if !(args[1] > args[0]) {
            return Err(Error::Config(format!("datum term `{term}`: need a < b")));
        }
        pieces.push(Piece { a: args[0], b: args[1], shape });
    }
    Ok(Datum::Piecewise(pieces))
}

/// Inverse of [`parse_datum`]; `None` for nodal data.
pub fn format_datum(d: &Datum) -> Option<String> {
    let Datum::Piecewise(pieces) = d else {
        return None;
    };
    Some(
        pieces
            .iter()
            .map(|p| match p.shape {
                Shape::Constant(c) => format!("const({}, {}, {})", p.a, p.b, c),
                Shape::PositiveSine { amp, freq } => format!("possin({}, {}, {}, {})", p.a, p.b, amp, freq),
                Shape::Sine { amp, freq, offset } => {
                    format!("sin({}, {}, {}, {}, {})", p.a, p.b, amp, freq, offset)
                }
            })
            .collect::<Vec<_>>()
            .join(" + "),
    )
}

impl ExperimentConfig {
    /// Parses a configuration file body. Relative `datum_file` paths are
    /// resolved against `base_dir`.
    pub fn from_text(text: &str, base_dir: &Path) -> Result<Self> {
        let map = parse_key_values(text)?;
        let mut cfg = match map.get("preset") {
            Some(p) => preset(p)?,
            None => ExperimentConfig::default(),
        };
        for (k, v) in &map {
            match k.as_str() {
                "preset" => {}
                "kernel" => {
                    cfg.kernel = match v.as_str() {
                        "polynomial" => KernelChoice::Polynomial,
                        "indicator" => KernelChoice::Indicator,
                        _ => return Err(Error::Config(format!("unknown kernel `{v}`"))),
                    }
                }
                "epsilon" => cfg.epsilon = num(k, v)?,
                "xmin" => cfg.xmin = num(k, v)?,
                "xmax" => cfg.xmax = num(k, v)?,
                "n" => cfg.n = num(k, v)?,
                "datum" => cfg.datum = parse_datum(v)?,
                "datum_file" => {
                    let p = base_dir.join(v);
                    if !p.is_file() {
                        return Err(Error::Config(format!("datum file {} does not exist", p.display())));
                    }
                    cfg.datum_file = Some(p);
                }
                "scheme" => cfg.scheme = v.parse()?,
                "dt" => cfg.dt = num(k, v)?,
                "t_end" => cfg.t_end = num(k, v)?,
                "snapshots" => cfg.snapshots = list(k, v)?,
                "gamma_n" => cfg.gamma_n = num(k, v)?,
                "picard_max_iter" => cfg.picard_max_iter = num(k, v)?,
                "conv" => {
                    cfg.fft = match v.as_str() {
                        "fft" => true,
                        "direct" => false,
                        _ => return Err(Error::Config(format!("unknown convolution `{v}`"))),
                    }
                }
                "support_delta" => cfg.support_delta = num(k, v)?,
                "mushy_delta" => cfg.mushy_delta = num(k, v)?,
                "eps_list" => cfg.eps_list = list(k, v)?,
                "t_eval" => cfg.t_eval = num(k, v)?,
                "refine" => cfg.refine = num(k, v)?,
                "longtime_times" => cfg.longtime_times = list(k, v)?,
                "longtime_dt" => cfg.longtime_dt = num(k, v)?,
                "obstacle_tol" => cfg.obstacle_tol = num(k, v)?,
                "heat_datum" => cfg.heat_datum = parse_datum(v)?,
                "heat_times" => cfg.heat_times = list(k, v)?,
                "heat_length" => cfg.heat_length = num(k, v)?,
                "heat_n" => cfg.heat_n = num(k, v)?,
                other => return Err(Error::Config(format!("unknown key `{other}`"))),
            }
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_text(&text, path.parent().unwrap_or(Path::new(".")))
    }

    fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(self.xmax > self.xmin) || self.n < 3 {
            return bad("grid needs xmin < xmax and n >= 3");
        }
        if !(self.dt > 0.0) || !(self.t_end >= 0.0) {
            return bad("need dt > 0 and t_end >= 0");
        }
        if self.snapshots.iter().any(|t| !(*t >= 0.0 && *t <= self.t_end)) {
            return bad("snapshot times must lie in [0, t_end]");
        }
        if !(self.support_delta > 0.0) {
            return bad("support_delta must be positive");
        }
        if !(self.mushy_delta > 0.0 && self.mushy_delta < 0.5) {
            return bad("mushy_delta must lie in (0, 0.5)");
        }
        if self.refine == 0 || self.heat_n < 3 || !(self.heat_length > 0.0) {
            return bad("refine, heat_n and heat_length must be positive");
        }
        Ok(())
    }

    /// The configuration in file form, with every key spelled out.
    pub fn resolved(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        if let Some(p) = &self.preset {
            kv("# preset", p.clone());
        }
        kv(
            "kernel",
            match self.kernel {
                KernelChoice::Polynomial => "polynomial",
                KernelChoice::Indicator => "indicator",
            }
            .into(),
        );
        kv("epsilon", self.epsilon.to_string());
        kv("xmin", self.xmin.to_string());
        kv("xmax", self.xmax.to_string());
        kv("n", self.n.to_string());
        match (&self.datum_file, format_datum(&self.datum)) {
            (Some(p), _) => kv("datum_file", p.display().to_string()),
            (None, Some(d)) => kv("datum", d),
            (None, None) => {}
        }
        kv("scheme", self.scheme.to_string());
        kv("dt", self.dt.to_string());
        kv("t_end", self.t_end.to_string());
        kv("snapshots", fmt_list(&self.snapshots));
        kv("gamma_n", self.gamma_n.to_string());
        kv("picard_max_iter", self.picard_max_iter.to_string());
        kv("conv", if self.fft { "fft" } else { "direct" }.into());
        kv("support_delta", self.support_delta.to_string());
        kv("mushy_delta", self.mushy_delta.to_string());
        kv("eps_list", fmt_list(&self.eps_list));
        kv("t_eval", self.t_eval.to_string());
        kv("refine", self.refine.to_string());
        kv("longtime_times", fmt_list(&self.longtime_times));
        kv("longtime_dt", self.longtime_dt.to_string());
        kv("obstacle_tol", self.obstacle_tol.to_string());
        if let Some(d) = format_datum(&self.heat_datum) {
            kv("heat_datum", d);
        }
        kv("heat_times", fmt_list(&self.heat_times));
        kv("heat_length", self.heat_length.to_string());
        kv("heat_n", self.heat_n.to_string());
        s
    }

    pub fn grid(&self) -> Result<Grid<f64>> {
        Grid::new(self.xmin, self.xmax, self.n)
    }

    /// Kernel at the configured ε.
    pub fn kernel(&self) -> Result<Kernel<f64>> {
        let k = match self.kernel {
            KernelChoice::Polynomial => Kernel::polynomial(),
            KernelChoice::Indicator => Kernel::indicator(),
        };
        if self.epsilon == 1.0 {
            Ok(k)
        } else {
            k.rescale(self.epsilon)
        }
    }

    /// The initial datum, from `datum_file` if set.
    pub fn datum(&self) -> Result<Datum> {
        match &self.datum_file {
            Some(p) => Ok(Datum::from(&read_field_csv::<f64>(p)?)),
            None => Ok(self.datum.clone()),
        }
    }

    pub fn initial_field(&self) -> Result<Field<f64>> {
        Ok(self.datum()?.sample(&self.grid()?))
    }

    pub fn solver(&self) -> SolverConfig<f64> {
        let mut c = SolverConfig::new(self.scheme, self.dt, self.t_end)
            .with_snapshots(self.snapshots.iter().copied());
        c.gamma_n = self.gamma_n;
        c.picard_max_iter = self.picard_max_iter;
        if self.fft {
            c.conv = crate::conv::ConvMethod::Fft;
        }
        c
    }

    pub fn study_options(&self) -> StudyOptions<f64> {
        StudyOptions {
            refine: self.refine,
            mushy_delta: self.mushy_delta,
            ..Default::default()
        }
    }

    /// Periodic cell `[−L/2, L/2)` with `heat_n` nodes.
    pub fn heat_grid(&self) -> Result<Grid<f64>> {
        let h = self.heat_length / self.heat_n as f64;
        let a = -0.5 * self.heat_length;
        Grid::new(a, a + h * (self.heat_n - 1) as f64, self.heat_n)
    }
}

fn create(path: &Path) -> Result<fs::File> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    Ok(fs::File::create(path)?)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    use std::io::Write;
    let mut f = create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

/// `x,value` with 17 significant digits, enough to read back every `f64`
/// exactly.
pub fn write_field_csv<T: Scalar>(path: &Path, field: &Field<T>) -> Result<()> {
    let mut s = String::from("x,value\n");
    for (i, v) in field.values().iter().enumerate() {
        let _ = writeln!(s, "{:.16e},{:.16e}", field.grid().x(i).as_f64(), v.as_f64());
    }
    write_text(path, &s)
}

/// Reads a field written by [`write_field_csv`]. The grid is rebuilt from the
/// first and last abscissae; the others must match it.
pub fn read_field_csv<T: Scalar>(path: &Path) -> Result<Field<T>> {
    let text = fs::read_to_string(path)?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (no, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let (x, v) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("{}:{}: expected `x,value`", path.display(), no + 1)))?;
        let parse = |s: &str| -> Result<T> {
            s.trim()
                .parse::<f64>()
                .map(T::lit)
                .map_err(|_| Error::Parse(format!("{}:{}: bad number `{s}`", path.display(), no + 1)))
        };
        xs.push(parse(x)?);
        vs.push(parse(v)?);
    }
    if xs.len() < 3 {
        return Err(Error::Parse(format!("{}: need at least three rows", path.display())));
    }
    let grid = Grid::new(xs[0], xs[xs.len() - 1], xs.len())?;
    let tol = grid.h() * T::lit(1e-6);
    if xs.iter().enumerate().any(|(i, x)| (*x - grid.x(i)).abs() > tol) {
        return Err(Error::Parse(format!("{}: abscissae are not equispaced", path.display())));
    }
    Field::new(grid, vs)
}

pub fn write_diagnostics<T: Scalar>(path: &Path, traj: &Trajectory<T>) -> Result<()> {
    let mut s = String::from("t,mass,sup_u,l1_v\n");
    for d in &traj.diagnostics {
        let _ = writeln!(s, "{:e},{:.16e},{:.16e},{:.16e}", d.t, d.mass, d.sup_u, d.l1_v);
    }
    write_text(path, &s)
}

/// Supports of `u` and `v` and the mushy region at every snapshot.
pub fn write_supports<T: Scalar>(
    path: &Path,
    traj: &Trajectory<T>,
    support_delta: T,
    mushy_delta: T,
) -> Result<()> {
    let mut s = String::from("t,set_kind,interval_index,a,b\n");
    for snap in &traj.snapshots {
        let sets = [
            ("u", support(&snap.u, support_delta)?),
            ("v", water_components(&temperature(&snap.u), support_delta)?),
            ("mushy", mushy_region(&snap.u, mushy_delta)?),
        ];
        for (kind, set) in sets {
            for (i, (a, b)) in set.intervals.iter().enumerate() {
                let _ = writeln!(s, "{},{kind},{i},{:.10e},{:.10e}", snap.t, a, b);
            }
        }
    }
    write_text(path, &s)
}

pub fn write_eps_study<T: Scalar>(path: &Path, study: &EpsStudy<T>) -> Result<()> {
    let mut s = String::from("eps,l1_error,mushy_measure\n");
    for r in &study.runs {
        let _ = writeln!(s, "{},{:.10e},{:.10e}", r.eps, r.l1_error, r.mushy_measure);
    }
    write_text(path, &s)
}

pub fn write_mesa<T: Scalar>(path: &Path, f: &Field<T>, sol: &ObstacleSolution<T>) -> Result<()> {
    f.check_grid(&sol.w)?;
    let mut s = String::from("x,f,w,mesa\n");
    for i in 0..f.grid().len() {
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            f.grid().x(i),
            f.values()[i],
            sol.w.values()[i],
            sol.mesa.values()[i]
        );
    }
    write_text(path, &s)
}

pub fn write_convergence<T: Scalar>(path: &Path, report: &LongtimeReport<T>) -> Result<()> {
    let mut s = String::from("T,l1_error,l1_v\n");
    for r in &report.rows {
        let _ = writeln!(s, "{},{:.10e},{:.10e}", r.t, r.l1_error, r.l1_v);
    }
    write_text(path, &s)
}

pub fn write_decay<T: Scalar>(path: &Path, rows: &[DecayRow<T>]) -> Result<()> {
    let mut s = String::from("t,D,l1_u,sup_regular_part\n");
    for r in rows {
        let _ = writeln!(s, "{},{:.10e},{:.10e},{:.10e}", r.t, r.d, r.l1_u, r.sup_regular);
    }
    write_text(path, &s)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Writes one polyline per field to `path` (SVG) and the values to the same
/// path with a `.csv` extension. All fields must share a grid.
pub fn render_plot<T: Scalar>(fields: &[(String, Field<T>)], path: &Path) -> Result<()> {
    let (_, first) = fields
        .first()
        .ok_or_else(|| Error::InvalidParameter("nothing to plot".into()))?;
    let grid = *first.grid();
    for (_, f) in fields {
        first.check_grid(f)?;
    }

    let mut csv = String::from("x");
    for (label, _) in fields {
        let _ = write!(csv, ",{}", label.replace(',', ";"));
    }
    csv.push('\n');
    for i in 0..grid.len() {
        let _ = write!(csv, "{:.16e}", grid.x(i));
        for (_, f) in fields {
            let _ = write!(csv, ",{:.16e}", f.values()[i]);
        }
        csv.push('\n');
    }

    let (w, h, pad) = (800.0, 480.0, 50.0);
    let x0 = grid.xmin().as_f64();
    let x1 = grid.xmax().as_f64();
    let mut y0 = fields.iter().map(|(_, f)| f.min().as_f64()).fold(f64::INFINITY, f64::min);
    let mut y1 = fields.iter().map(|(_, f)| f.sup().as_f64()).fold(f64::NEG_INFINITY, f64::max);
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <g stroke=\"black\" stroke-width=\"1\">\
         <line x1=\"{pad}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\"/>\
         <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{b}\"/></g>\n\
         <g font-family=\"sans-serif\" font-size=\"12\">\
         <text x=\"{pad}\" y=\"{lb}\">{x0}</text><text x=\"{r}\" y=\"{lb}\" text-anchor=\"end\">{x1}</text>\
         <text x=\"{tl}\" y=\"{b}\" text-anchor=\"end\">{y0:.3}</text>\
         <text x=\"{tl}\" y=\"{pad}\" text-anchor=\"end\">{y1:.3}</text></g>\n",
        b = h - pad,
        r = w - pad,
        lb = h - pad + 18.0,
        tl = pad - 4.0,
    );
    for (k, (label, f)) in fields.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = f
            .values()
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{:.2},{:.2}", sx(grid.x(i).as_f64()), sy(v.as_f64())))
            .collect();
        let _ = writeln!(
            svg,
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            pts.join(" ")
        );
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>",
            w - pad - 120.0,
            pad + 16.0 * k as f64,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    write_text(path, &svg)?;
    write_text(&path.with_extension("csv"), &csv)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_their_descriptions() {
        let m = preset("mushy").unwrap();
        let g = m.grid().unwrap();
        assert!((m.initial_field().unwrap().integrate() - 4.0).abs() <= 2.0 * g.h());
        let d = preset("disconnected").unwrap();
        let Datum::Piecewise(p) = &d.datum else { panic!() };
        assert_eq!(p.len(), 2);
        let f = d.initial_field().unwrap();
        assert_eq!(support(&f, 1e-8).unwrap().len(), 2);
        let mesa = preset("mesa").unwrap();
        let f = mesa.initial_field().unwrap();
        assert!((f.sup() - 4.0).abs() < 1e-3);
        assert_eq!(preset("eps-limit").unwrap().eps_list, vec![1.0, 0.5, 0.2]);
        assert!(matches!(preset("nope"), Err(Error::UnknownPreset(_))));
        for name in PRESETS {
            assert_eq!(preset(name).unwrap(), preset(name).unwrap());
            assert!(preset_summary(name).is_some());
        }
    }

    #[test]
    fn resolved_config_round_trips() {
        for name in PRESETS {
            let c = preset(name).unwrap();
            let text = format!("preset = {name}\n{}", c.resolved());
            let back = ExperimentConfig::from_text(&text, Path::new(".")).unwrap();
            assert_eq!(back, c, "{name}");
        }
    }

    #[test]
    fn config_overrides_and_errors() {
        let c = ExperimentConfig::from_text(
            "# comment\npreset = mushy\nn = 512  # coarse\nscheme = picard\ndatum = const(-1, 1, 0.5) + sin(2, 3, 1, 2, 1)\n",
            Path::new("."),
        )
        .unwrap();
        assert_eq!(c.n, 512);
        assert_eq!(c.scheme, Scheme::Picard);
        assert_eq!(format_datum(&c.datum).unwrap(), "const(-1, 1, 0.5) + sin(2, 3, 1, 2, 1)");
        for bad in ["n = ", "foo = 1", "n = 1\nn = 2", "junk", "datum = const(1, 2)", "preset = x", "datum_file = /no/such.csv"] {
            assert!(ExperimentConfig::from_text(bad, Path::new(".")).is_err(), "{bad}");
        }
    }

    #[test]
    fn field_csv_round_trip_is_exact() {
        let dir = std::env::temp_dir().join(format!("nlstefan-io-{}", std::process::id()));
        let g = Grid::new(-6.0, 6.0, 2048).unwrap();
        let f = Field::from_fn(g, |x: f64| (3.0 * x).sin() / 7.0 + 1e-300).unwrap();
        let p = dir.join("f.csv");
        write_field_csv(&p, &f).unwrap();
        let back: Field<f64> = read_field_csv(&p).unwrap();
        assert_eq!(back, f);
        let _ = fs::remove_dir_all(dir);
    }

    #[test]
    fn plot_needs_fields() {
        let dir = std::env::temp_dir().join(format!("nlstefan-plot-{}", std::process::id()));
        let p = dir.join("p.svg");
        assert!(render_plot::<f64>(&[], &p).is_err());
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        render_plot(&[("a".to_string(), Field::zeros(g))], &p).unwrap();
        let svg = fs::read_to_string(&p).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(p.with_extension("csv").is_file());
        let _ = fs::remove_dir_all(dir);
    }
}
