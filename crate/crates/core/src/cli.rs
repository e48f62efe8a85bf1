//! Command-line front end. Every run writes its artifact (JSON or CSV) and a
//! `run.json` echo of the resolved configuration into `--out`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cplx::{fmt_f64, format_complex, parse_complex, powi, C64};
use crate::error::{LabError, Result};
use crate::multiplier::{
    dyadic_piece, localized_multiplier, nonlocal_multiplier, resolvent_kernel, series_bound, BumpFunctions, Multiplier,
};
use crate::oscint::{
    decay_exponent_fit, surface_measure_ft, weighted_resolvent_integral, ConvexSymbol, MihlinWeight,
};
use crate::probe::{
    bernstein_probe, blowup_sequence, l1_linf_norm, l2_resolvent_norm, pq_lower_bound_restarts, region_uniformity,
    AscentOptions, BetaRule,
};
use crate::quad::set_tolerance_scale;
use crate::region::{dist_to_sector_boundary, map_to_zeta, parabolic_boundary_profile, xi_membership, SectorParams};
use crate::residue::{fourier_transform_mz, fourier_transform_oracle, resolvent_multiplier_identity};
use crate::spectra::{
    build_torus_model, build_zoll_model, cluster_report, counting_function, load_custom_spectrum, weyl_constant,
    ModelSpectrum, ZollParams,
};
use crate::suite::{run_group, Group};
use crate::symbol::{norm2, Symbol};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser, Serialize)]
#[command(name = "resolventlab", version, about = "Resolvent multipliers, spectral regions and norm probes")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Directory for the run artifacts.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Multiplies every default quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tol_scale: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Sector membership, boundary distance and the map z -> z^m.
    Region(RegionArgs),
    /// Fourier transform of the resolvent multiplier against its quadrature oracle.
    Residue(ResidueArgs),
    /// Build a model spectrum and report counts, Weyl constants or clusters.
    Spectra(SpectraArgs),
    /// Evaluate multiplier pieces on a tau grid.
    Multiplier(MultiplierArgs),
    /// Operator-norm probes.
    Probe(ProbeArgs),
    /// Surface-measure transforms and the weighted resolvent integral.
    Oscint(OscintArgs),
    /// Run an acceptance group.
    Suite(SuiteArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct RegionArgs {
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Comma-separated Re z values along the lower boundary `Im z = delta`.
    #[arg(long)]
    pub profile_alphas: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct ResidueArgs {
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t: f64,
    /// Also check the half-wave resolvent formula at `--tau`.
    #[arg(long)]
    pub check_identity: bool,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelChoice {
    Torus,
    Zoll,
    File,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "torus")]
    pub model: ModelChoice,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// Torus cutoff on the eigenvalues of Q.
    #[arg(long, default_value_t = 20.0)]
    pub cutoff: f64,
    #[arg(long, default_value = "euclid")]
    pub symbol: String,
    /// Grid points per axis for the torus basis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Last Zoll cluster.
    #[arg(long, default_value_t = 40)]
    pub k_max: usize,
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    /// Attach one zonal eigenfunction per Zoll cluster (n = 2, 3).
    #[arg(long)]
    pub zonal: bool,
    /// `mu,multiplicity` CSV for `--model file`.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Report {
    Count,
    Weyl,
    Clusters,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectraArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "count")]
    pub report: Report,
    /// Counting-function argument for `--report count` (defaults to the cutoff).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Cluster half-width constant for `--report clusters`.
    #[arg(long, default_value_t = 0.0)]
    pub width: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiplierOp {
    Apply,
    Mzloc,
    Rz,
    Dyadic,
    Series,
}

#[derive(Debug, Args, Serialize)]
pub struct MultiplierArgs {
    #[arg(long, value_enum)]
    pub op: MultiplierOp,
    #[arg(long, allow_hyphen_values = true, default_value = "0+2i")]
    pub z: String,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    /// `a:b:n`, n+1 evenly spaced points. For `series` the grid is over |z|.
    #[arg(long, default_value = "0:10:100")]
    pub tau_grid: String,
    /// Dyadic index for `--op dyadic`.
    #[arg(long, default_value_t = 1)]
    pub j: u32,
    /// Shift a as a fraction of |z| for `--op series`.
    #[arg(long, default_value_t = 1.0)]
    pub a_fraction: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeWhat {
    L2,
    L1linf,
    Pq,
    Bernstein,
    Blowup,
    Region,
}

#[derive(Debug, Args, Serialize)]
pub struct ProbeArgs {
    #[arg(long, value_enum)]
    pub what: ProbeWhat,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, allow_hyphen_values = true, default_value = "3+0.5i")]
    pub z: String,
    #[arg(long, default_value_t = 1.5)]
    pub p: f64,
    #[arg(long, default_value_t = 4.0)]
    pub q: f64,
    /// Target exponent for `--what bernstein` (`inf` allowed).
    #[arg(long, default_value = "inf")]
    pub r: String,
    #[arg(long, default_value = "5:30")]
    pub k_range: String,
    #[arg(long, default_value = "inv-k")]
    pub beta_rule: String,
    /// Comma-separated alphas (Bernstein) or radii (region).
    #[arg(long, default_value = "2,3,4,6,8")]
    pub alphas: String,
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    #[arg(long, default_value_t = 3)]
    pub restarts: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct OscintArgs {
    #[arg(long, default_value = "euclid")]
    pub symbol: String,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Evaluation point, or the fit direction with `--fit-radii`.
    #[arg(long, allow_hyphen_values = true, default_value = "1,0")]
    pub x: String,
    /// Spectral parameter for the weighted resolvent integral.
    #[arg(long, allow_hyphen_values = true)]
    pub w: Option<String>,
    /// `a:b:k`, k log-spaced radii for the decay fit.
    #[arg(long)]
    pub fit_radii: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub refinement: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct SuiteArgs {
    /// identities, region, blowup, oscint or all.
    pub name: String,
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_entry() -> i32 {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Ok(t) = std::env::var("RESOLVENTLAB_THREADS") {
        match t.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("RESOLVENTLAB_THREADS must be a positive integer, got '{t}'");
                return 2;
            }
        }
    }
    let (module, op) = cli.command.names();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            let body = json!({"module": module, "op": op, "message": e.to_string()});
            eprintln!("{body}");
            match e {
                LabError::Parse(_) => 2,
                _ => 1,
            }
        }
    }
}

impl Command {
    fn names(&self) -> (&'static str, String) {
        match self {
            Command::Region(a) => ("region", if a.profile_alphas.is_some() { "profile" } else { "membership" }.into()),
            Command::Residue(_) => ("residue", "fourier_transform".into()),
            Command::Spectra(a) => ("spectra", format!("{:?}", a.report).to_lowercase()),
            Command::Multiplier(a) => ("multiplier", format!("{:?}", a.op).to_lowercase()),
            Command::Probe(a) => ("probe", format!("{:?}", a.what).to_lowercase()),
            Command::Oscint(a) => ("oscint", if a.fit_radii.is_some() { "decay_fit" } else if a.w.is_some() { "resolvent_integral" } else { "surface_ft" }.into()),
            Command::Suite(a) => ("suite", a.name.clone()),
        }
    }
}

enum Artifact {
    Json(Value),
    Csv { header: Vec<&'static str>, rows: Vec<Vec<String>> },
}

/// Executes the configured command and writes its artifacts. Returns the
/// exit code (non-zero only when a suite criterion fails).
pub fn run(cli: &Cli) -> Result<i32> {
    set_tolerance_scale(cli.tol_scale)?;
    let (module, _) = cli.command.names();
    let mut code = 0;
    let artifact = match &cli.command {
        Command::Region(a) => region(a)?,
        Command::Residue(a) => residue(a)?,
        Command::Spectra(a) => spectra(a)?,
        Command::Multiplier(a) => multiplier(a)?,
        Command::Probe(a) => probe(a, cli.seed)?,
        Command::Oscint(a) => oscint(a)?,
        Command::Suite(a) => {
            let results = run_group(Group::parse(&a.name)?, cli.seed)?;
            for r in &results {
                println!("{}", r.line());
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            println!("{} of {} criteria passed", results.len() - failed, results.len());
            if failed > 0 {
                code = 1;
            }
            Artifact::Json(json!({"suite": a.name, "results": results}))
        }
    };
    fs::create_dir_all(&cli.out).map_err(|e| LabError::Io(format!("{}: {e}", cli.out.display())))?;
    let (name, text) = match artifact {
        Artifact::Json(v) => {
            let s = serde_json::to_string_pretty(&v).map_err(|e| LabError::Io(e.to_string()))? + "\n";
            if !matches!(cli.command, Command::Suite(_)) {
                print!("{s}");
            }
            (format!("{module}.json"), s)
        }
        Artifact::Csv { header, rows } => {
            let s = csv_text(&header, &rows, cli.seed)?;
            print!("{s}");
            (format!("{module}.csv"), s)
        }
    };
    write(&cli.out.join(name), &text)?;
    let echo = json!({"version": VERSION, "config": cli});
    let echo = serde_json::to_string_pretty(&echo).map_err(|e| LabError::Io(e.to_string()))? + "\n";
    write(&cli.out.join("run.json"), &echo)?;
    Ok(code)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))
}

fn csv_text(header: &[&str], rows: &[Vec<String>], seed: u64) -> Result<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).map_err(|e| LabError::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| LabError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::Io(e.to_string()))?;
    let mut s = String::from_utf8(bytes).map_err(|e| LabError::Io(e.to_string()))?;
    s.push_str(&format!("# seed={seed}, version={VERSION}\n"));
    Ok(s)
}

fn parse_f64(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => t.parse().map_err(|_| LabError::Parse(format!("cannot parse number '{s}'"))),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

/// `a:b:n` to `n + 1` evenly spaced points.
fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(LabError::Parse(format!("grid '{s}' must be a:b:n")));
    }
    let (a, b) = (parse_f64(parts[0])?, parse_f64(parts[1])?);
    let n: usize = parts[2].trim().parse().map_err(|_| LabError::Parse(format!("bad point count in '{s}'")))?;
    if n == 0 {
        return Ok(vec![a]);
    }
    Ok((0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect())
}

fn parse_k_range(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once(':').ok_or_else(|| LabError::Parse(format!("k range '{s}' must be a:b")))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|_| LabError::Parse(format!("bad k range '{s}'")));
    Ok((p(a)?, p(b)?))
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

fn region(a: &RegionArgs) -> Result<Artifact> {
    let params = SectorParams::new(a.m, a.delta)?;
    if let Some(list) = &a.profile_alphas {
        let pts = parabolic_boundary_profile(&parse_list(list)?, SectorParams::region(a.m, a.delta)?)?;
        let rows = pts.iter().map(|p| vec![f(p.t), f(p.re_zeta), f(p.im_zeta), f(p.ratio)]).collect();
        return Ok(Artifact::Csv {
            header: vec!["t", "re_zeta", "im_zeta", "ratio"],
            rows,
        });
    }
    let z = parse_complex(a.z.as_deref().ok_or_else(|| LabError::Parse("--z is required".into()))?)?;
    let member = xi_membership(z, params);
    let dist = dist_to_sector_boundary(z, a.m).ok();
    Ok(Artifact::Json(json!({
        "member": member,
        "dist": dist,
        "zeta": format_complex(map_to_zeta(z, a.m)),
    })))
}

fn residue(a: &ResidueArgs) -> Result<Artifact> {
    let z = parse_complex(&a.z)?;
    let value = fourier_transform_mz(a.t, z, a.m)?;
    let oracle = fourier_transform_oracle(a.t, z, a.m)?;
    let mut out = json!({
        "value_re": value.re,
        "value_im": value.im,
        "oracle_re": oracle.value.re,
        "oracle_im": oracle.value.im,
        "oracle_error": oracle.error,
        "rel_err": crate::cplx::rel_err(value, oracle.value),
    });
    if a.check_identity {
        let (lhs, rhs) = resolvent_multiplier_identity(a.tau, z, a.m)?;
        out["identity"] = json!({
            "tau": a.tau,
            "multiplier": format_complex(lhs),
            "half_wave": format_complex(rhs),
            "rel_err": crate::cplx::rel_err(rhs, lhs),
        });
    }
    Ok(Artifact::Json(out))
}

pub fn build_model(a: &ModelArgs) -> Result<ModelSpectrum> {
    match a.model {
        ModelChoice::Torus => build_torus_model(a.n, a.m, Symbol::parse(&a.symbol)?, a.cutoff, a.grid),
        ModelChoice::Zoll => build_zoll_model(ZollParams {
            jitter: a.jitter,
            zonal: a.zonal,
            ..ZollParams::new(a.n, a.m, a.k_max)
        }),
        ModelChoice::File => {
            let path = a.file.as_ref().ok_or_else(|| LabError::Parse("--model file needs --file".into()))?;
            load_custom_spectrum(path, a.n, a.m)
        }
    }
}

fn spectra(a: &SpectraArgs) -> Result<Artifact> {
    let model = build_model(&a.model)?;
    match a.report {
        Report::Count => {
            let alpha = a.alpha.unwrap_or(model.cutoff);
            Ok(Artifact::Json(json!({
                "entries": model.entries.len(),
                "total_multiplicity": model.total_multiplicity(),
                "cutoff": model.cutoff,
                "alpha": alpha,
                "count": counting_function(&model, alpha),
            })))
        }
        Report::Weyl => {
            let c = weyl_constant(&model)?;
            let alpha = a.alpha.unwrap_or(model.cutoff);
            let count = counting_function(&model, alpha);
            Ok(Artifact::Json(json!({
                "weyl_constant": c.value,
                "weyl_error": c.error,
                "alpha": alpha,
                "count": count,
                "count_ratio": count as f64 / alpha.powi(model.n as i32),
            })))
        }
        Report::Clusters => {
            let (period, shift) = match &model.kind {
                crate::spectra::ModelKind::Zoll(p) => (p.period, p.alpha_shift),
                _ => (2.0 * std::f64::consts::PI, 0.0),
            };
            let rep = cluster_report(&model, period, shift, a.width)?;
            let rows = rep
                .clusters
                .iter()
                .map(|c| vec![c.k.to_string(), f(c.center), f(c.half_width), c.count.to_string()])
                .collect();
            log::info!("fitted degree {}, outside count {}", rep.fitted_degree, rep.outside_count);
            Ok(Artifact::Csv {
                header: vec!["k", "center", "half_width", "count"],
                rows,
            })
        }
    }
}

fn multiplier(a: &MultiplierArgs) -> Result<Artifact> {
    let grid = parse_grid(&a.tau_grid)?;
    let m = a.m;
    if let MultiplierOp::Series = a.op {
        let rows = grid
            .iter()
            .map(|&r| {
                let s = series_bound(m, r, a.a_fraction * r)?;
                Ok(vec![f(r), f(s.value), f(0.0), f(s.tail_error)])
            })
            .collect::<Result<_>>()?;
        return Ok(Artifact::Csv {
            header: vec!["z_modulus", "re", "im", "bound_ratio"],
            rows,
        });
    }
    let z = parse_complex(&a.z)?;
    let bumps = BumpFunctions::new(a.eps)?;
    let dist = dist_to_sector_boundary(z, m)?;
    let rows = grid
        .iter()
        .map(|&tau| {
            let (v, ratio) = match a.op {
                MultiplierOp::Apply => {
                    let v = Multiplier::resolvent(z, m).eval(tau);
                    (v, v.norm() * dist * z.norm().powi(m as i32 - 2).max(1.0))
                }
                MultiplierOp::Mzloc => {
                    let v = localized_multiplier(tau, z, m, &bumps)?;
                    (v, v.norm() * (1.0 + tau).powi(m as i32))
                }
                MultiplierOp::Rz => {
                    let v = nonlocal_multiplier(tau, z, m, &bumps)?;
                    (v, v.norm() * dist)
                }
                MultiplierOp::Dyadic => {
                    let v = dyadic_piece(tau, z, m, a.j, &bumps)?;
                    (v, v.norm() * (1.0 + tau).powi(m as i32))
                }
                MultiplierOp::Series => unreachable!("handled above"),
            };
            Ok(vec![f(tau), f(v.re), f(v.im), f(ratio)])
        })
        .collect::<Result<_>>()?;
    Ok(Artifact::Csv {
        header: vec!["tau", "re", "im", "bound_ratio"],
        rows,
    })
}

fn probe(a: &ProbeArgs, seed: u64) -> Result<Artifact> {
    let model = build_model(&a.model)?;
    let opts = AscentOptions { seed, ..Default::default() };
    match a.what {
        ProbeWhat::L2 => {
            let z = parse_complex(&a.z)?;
            let r = l2_resolvent_norm(&model, z)?;
            Ok(Artifact::Json(json!({"kind": r.kind, "value": r.value, "zeta": format_complex(powi(z, model.m))})))
        }
        ProbeWhat::L1linf => {
            let z = parse_complex(&a.z)?;
            let k = resolvent_kernel(&model, z, None)?;
            let r = l1_linf_norm(&k);
            Ok(Artifact::Json(json!({"kind": r.kind, "value": r.value, "hermitian_defect": k.hermitian_defect()})))
        }
        ProbeWhat::Pq => {
            let z = parse_complex(&a.z)?;
            let r = pq_lower_bound_restarts(&model, &Multiplier::resolvent(z, model.m), a.p, a.q, opts, a.restarts)?;
            Ok(Artifact::Json(json!({
                "kind": r.kind,
                "value": r.value,
                "iterations": r.iterations,
                "converged": r.converged,
                "p": a.p,
                "q": a.q,
            })))
        }
        ProbeWhat::Bernstein => {
            let fit = bernstein_probe(&model, &BumpFunctions::beta, &parse_list(&a.alphas)?, a.q, parse_f64(&a.r)?)?;
            log::info!("slope {} (predicted {})", fit.slope, fit.predicted);
            let rows = fit.alphas.iter().zip(&fit.ratios).map(|(x, v)| vec![f(*x), f(*v)]).collect();
            Ok(Artifact::Csv {
                header: vec!["alpha", "value"],
                rows,
            })
        }
        ProbeWhat::Blowup => {
            let seq = blowup_sequence(&model, parse_k_range(&a.k_range)?, BetaRule::parse(&a.beta_rule)?)?;
            let rows = seq
                .iter()
                .map(|s| vec![s.k.to_string(), f(s.alpha_k), f(s.beta_k), f(s.l_lower), f(s.l_upper), f(s.density_k)])
                .collect();
            Ok(Artifact::Csv {
                header: vec!["k", "alpha_k", "beta_k", "L_k", "L_k_upper", "density_k"],
                rows,
            })
        }
        ProbeWhat::Region => {
            let rows = region_uniformity(&model, a.delta, &parse_list(&a.alphas)?, 200)?
                .iter()
                .map(|r| vec![f(r.radius), f(r.scaled_norm)])
                .collect();
            Ok(Artifact::Csv {
                header: vec!["alpha", "value"],
                rows,
            })
        }
    }
}

fn oscint(a: &OscintArgs) -> Result<Artifact> {
    let sym = ConvexSymbol::new(a.n, Symbol::parse(&a.symbol)?)?;
    let x = parse_list(&a.x)?;
    if let Some(spec) = &a.fit_radii {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(LabError::Parse(format!("fit radii '{spec}' must be a:b:k")));
        }
        let k: usize = parts[2].trim().parse().map_err(|_| LabError::Parse(format!("bad count in '{spec}'")))?;
        let fit = decay_exponent_fit(&sym, &x, parse_f64(parts[0])?, parse_f64(parts[1])?, k)?;
        log::info!("exponent {} (expected {}), flagged {}", fit.exponent, fit.expected, fit.flagged);
        let rows = fit
            .radii
            .iter()
            .zip(&fit.peaks)
            .map(|(r, p)| {
                let bound = r.powf(fit.expected);
                vec![f(*r), f(*p), f(bound), f(p / bound)]
            })
            .collect();
        return Ok(Artifact::Csv {
            header: vec!["radius", "abs_value", "bound", "ratio"],
            rows,
        });
    }
    if let Some(w) = &a.w {
        let w: C64 = parse_complex(w)?;
        let v = weighted_resolvent_integral(&sym, &MihlinWeight::one(), &x, w, a.refinement)?;
        let xn = norm2(&x);
        let e = (sym.n - 1) as f64;
        let bound = xn.powf(-e) + (w.norm() / xn).powf(e / 2.0);
        let rows = vec![vec![f(xn), f(v.value.norm()), f(bound), f(v.value.norm() / bound)]];
        return Ok(Artifact::Csv {
            header: vec!["radius", "abs_value", "bound", "ratio"],
            rows,
        });
    }
    let v = surface_measure_ft(&sym, &x, a.refinement)?;
    Ok(Artifact::Json(json!({
        "value": format_complex(v.value),
        "value_re": v.value.re,
        "value_im": v.value.im,
        "error": v.error,
    })))
}
