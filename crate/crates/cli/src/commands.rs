use std::fs;
use std::path::Path;

use serde::Serialize;

use dropkit::analytic::{
    ball_distance_moment, ball_distance_moment_mc, ball_energy, critical_mass, BallConstants,
    RieszSelfMethod, DEFAULT_RADIAL_NODES,
};
use dropkit::inequalities::{binding_scan, g_alpha, h_alpha, lemma_g_scan, open_grid, BindingVerdict};
use dropkit::optimizer::{optimize_from, OptimizationResult, OptimizeOptions};
use dropkit::quadrature::{rasterize, FourierShape, GridShape};
use dropkit::splits::{angular_constant_closed, best_split, necessary_condition, nonexistence_mass_bound};
use dropkit::{Mass, RieszParams};

use crate::args::*;
use crate::grid::parse_mass_grid;
use crate::output::{csv, json, num, pick, CliError, Rendered};

type Out = Result<Rendered, CliError>;

const DEFAULT_MC_SAMPLES: f64 = 1e6;

pub fn run(cli: &Cli) -> Out {
    let f = cli.format;
    match &cli.command {
        Command::Mstar(a) => mstar(a, pick(f, Format::Json)),
        Command::LemmaG(a) => lemma_g(a, pick(f, Format::Csv)),
        Command::BindingScan(a) => binding(a, pick(f, Format::Csv)),
        Command::Optimize(a) => optimize(a, pick(f, Format::Json)),
        Command::Split(a) => split(a, pick(f, Format::Csv)),
        Command::Necessary(a) => necessary(a, pick(f, Format::Json)),
        Command::NonexistenceBound(a) => nonexistence(a, pick(f, Format::Json)),
    }
}

fn ok(body: String) -> Out {
    Ok(Rendered { body, code: 0 })
}

fn params(p: &Problem) -> Result<RieszParams, CliError> {
    Ok(RieszParams::new(p.dim, p.lambda)?)
}

/// Budget as a positive whole number; accepts `1e7`.
fn budget(value: Option<f64>, method: Method) -> Result<u64, CliError> {
    let b = value.unwrap_or(match method {
        Method::Radial => DEFAULT_RADIAL_NODES as f64,
        Method::Mc => DEFAULT_MC_SAMPLES,
    });
    if !(b >= 1.0 && b.fract() == 0.0 && b <= 1e15) {
        return Err(CliError::param(format!(
            "budget must be a whole number in [1, 1e15], got {b}"
        )));
    }
    Ok(b as u64)
}

fn single_row<T: Serialize>(value: &T) -> Result<String, CliError> {
    let map = match serde_json::to_value(value).expect("serializes") {
        serde_json::Value::Object(m) => m,
        _ => unreachable!("single results are objects"),
    };
    let header: Vec<&str> = map.keys().map(String::as_str).collect();
    let row = map
        .values()
        .map(|v| match v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Null => String::new(),
            other => other.to_string(),
        })
        .collect();
    csv(&header, [row])
}

fn render<T: Serialize>(value: &T, format: Format) -> Out {
    ok(match format {
        Format::Json => json(value),
        Format::Csv => single_row(value)?,
    })
}

#[derive(Serialize)]
struct MstarOut {
    #[serde(rename = "N")]
    n: usize,
    lambda: f64,
    m_star: f64,
    d_ball: f64,
    per_ball: f64,
    omega: f64,
    method: Method,
    /// Standard error of `d_ball`.
    stderr: f64,
    m_star_stderr: f64,
}

fn mstar(a: &MstarArgs, format: Format) -> Out {
    let p = params(&a.problem)?;
    let method = match a.method {
        Method::Radial => RieszSelfMethod::RadialQuadrature,
        Method::Mc => RieszSelfMethod::MonteCarlo,
    };
    let c = BallConstants::compute(&p, method, budget(a.budget, a.method)?, a.seed)?;
    let m_star = critical_mass(&p, &c);
    let out = MstarOut {
        n: p.dimension(),
        lambda: p.exponent(),
        m_star,
        d_ball: c.riesz_self,
        per_ball: c.surface,
        omega: c.volume,
        method: a.method,
        stderr: c.riesz_self_stderr,
        // m* ∝ D^{-1/gap}
        m_star_stderr: m_star * c.riesz_self_stderr / (c.riesz_self * p.gap_exp()),
    };
    render(&out, format)
}

#[derive(Serialize)]
struct LemmaGRow {
    alpha: f64,
    min_g: f64,
    s1: Option<f64>,
    passed: bool,
}

#[derive(Serialize)]
struct LemmaGOut {
    s_grid: usize,
    all_passed: bool,
    rows: Vec<LemmaGRow>,
}

fn lemma_g(a: &LemmaGArgs, format: Format) -> Out {
    if a.alpha_grid < 10 || a.s_grid < 10 {
        return Err(CliError::param(
            "--alpha-grid and --s-grid need at least 10 points",
        ));
    }
    let rows = open_grid(a.alpha_grid)
        .into_iter()
        .map(|t| {
            let alpha = 2.0 * t;
            let r = lemma_g_scan(alpha, a.s_grid)?;
            Ok(LemmaGRow {
                alpha,
                min_g: r.min_g,
                s1: r.h_sign_change,
                passed: r.passed,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    if let Some(path) = &a.dump_curve {
        dump_curve(path, a.curve_points)?;
    }
    let all_passed = rows.iter().all(|r| r.passed);
    let body = match format {
        Format::Json => json(&LemmaGOut {
            s_grid: a.s_grid,
            all_passed,
            rows,
        }),
        Format::Csv => csv(
            &["alpha", "min_g", "s1", "passed"],
            rows.iter().map(|r| {
                vec![
                    num(r.alpha),
                    num(r.min_g),
                    r.s1.map(num).unwrap_or_default(),
                    r.passed.to_string(),
                ]
            }),
        )?,
    };
    Ok(Rendered {
        body,
        code: if all_passed { 0 } else { 1 },
    })
}

/// `alpha,s,g,h` for α = 0.5 and 1.5; `h` is blank for s > 1/2.
fn dump_curve(path: &Path, points: usize) -> Result<(), CliError> {
    if points < 10 {
        return Err(CliError::param("--curve-points needs at least 10 points"));
    }
    let mut rows = Vec::new();
    for alpha in [0.5, 1.5] {
        for s in open_grid(points) {
            let h = if s <= 0.5 {
                num(h_alpha(alpha, s)?)
            } else {
                String::new()
            };
            rows.push(vec![num(alpha), num(s), num(g_alpha(alpha, s)?), h]);
        }
    }
    fs::write(path, csv(&["alpha", "s", "g", "h"], rows)?)?;
    Ok(())
}

#[derive(Serialize)]
struct BindingRow {
    m: f64,
    min_deficit: f64,
    argmin_s: f64,
    verdict: BindingVerdict,
}

#[derive(Serialize)]
struct BindingOut {
    #[serde(rename = "N")]
    n: usize,
    lambda: f64,
    m_star: f64,
    rows: Vec<BindingRow>,
}

fn verdict_name(v: BindingVerdict) -> &'static str {
    match v {
        BindingVerdict::StrictBindingCertified => "strict_binding_certified",
        BindingVerdict::Inconclusive => "inconclusive",
    }
}

fn binding(a: &BindingScanArgs, format: Format) -> Out {
    let p = params(&a.problem)?;
    let c = BallConstants::radial(&p);
    let masses = parse_mass_grid(&a.mass_grid)?;
    let rows = masses
        .iter()
        .map(|&m| {
            let r = binding_scan(&p, &c, m, a.s_grid)?;
            Ok(BindingRow {
                m,
                min_deficit: r.min_deficit,
                argmin_s: r.argmin_s,
                verdict: r.verdict,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    ok(match format {
        Format::Json => json(&BindingOut {
            n: p.dimension(),
            lambda: p.exponent(),
            m_star: critical_mass(&p, &c),
            rows,
        }),
        Format::Csv => csv(
            &["m", "min_deficit", "argmin_s", "verdict"],
            rows.iter().map(|r| {
                vec![
                    num(r.m),
                    num(r.min_deficit),
                    num(r.argmin_s),
                    verdict_name(r.verdict).to_string(),
                ]
            }),
        )?,
    })
}

#[derive(Serialize)]
struct OptimizeOut {
    #[serde(rename = "N")]
    n: usize,
    lambda: f64,
    mass: f64,
    modes: usize,
    options: OptimizeOptions,
    ball_total: f64,
    result: OptimizationResult,
}

fn optimize(a: &OptimizeArgs, format: Format) -> Out {
    if a.dim != 2 {
        return Err(CliError::param(format!(
            "optimize supports N=2 only, got N={}",
            a.dim
        )));
    }
    let p = RieszParams::new(2, a.lambda)?;
    let mass = Mass::new(a.mass)?;
    let start = match a.start.as_str() {
        "disk" => FourierShape::disk(1.0)?,
        path => read_fourier(Path::new(path))?,
    };
    let options = OptimizeOptions {
        h: a.h,
        nodes: a.nodes,
        max_iter: a.max_iter,
        step_init: a.step_init,
        step_min: a.step_min,
        seed: a.seed,
    };
    let result = optimize_from(&p, a.mass, &start, a.modes, &options)?;
    if let Some(path) = &a.boundary {
        if a.boundary_points < 3 {
            return Err(CliError::param("--boundary-points needs at least 3 points"));
        }
        let rows = result
            .shape
            .boundary(a.boundary_points)
            .into_iter()
            .map(|(t, r)| vec![num(t), num(r)]);
        fs::write(path, csv(&["theta", "r"], rows)?)?;
    }
    let ball_total = ball_energy(&p, mass, &BallConstants::radial(&p)).total;
    ok(match format {
        Format::Json => json(&OptimizeOut {
            n: 2,
            lambda: a.lambda,
            mass: a.mass,
            modes: a.modes,
            options,
            ball_total,
            result,
        }),
        Format::Csv => csv(
            &["iteration", "total"],
            result.history.iter().map(|&(i, e)| vec![i.to_string(), num(e)]),
        )?,
    })
}

fn read_fourier(path: &Path) -> Result<FourierShape, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::param(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::param(format!(
            "{} is not a Fourier shape JSON list: {e}",
            path.display()
        ))
    })
}

#[derive(Serialize)]
struct SplitRow {
    m: f64,
    best_k: usize,
    best_total: f64,
    energies_by_k: Vec<(usize, f64)>,
}

#[derive(Serialize)]
struct SplitOut {
    #[serde(rename = "N")]
    n: usize,
    lambda: f64,
    m_star: f64,
    rows: Vec<SplitRow>,
}

fn split(a: &SplitArgs, format: Format) -> Out {
    let p = params(&a.problem)?;
    let c = BallConstants::radial(&p);
    let masses = parse_mass_grid(&a.mass_grid)?;
    let rows = masses
        .iter()
        .map(|&m| {
            let r = best_split(&p, &c, m, a.kmax)?;
            Ok(SplitRow {
                m,
                best_k: r.best_k,
                best_total: r.best_total,
                energies_by_k: r.energies_by_k,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    ok(match format {
        Format::Json => json(&SplitOut {
            n: p.dimension(),
            lambda: p.exponent(),
            m_star: critical_mass(&p, &c),
            rows,
        }),
        Format::Csv => {
            let mut header = vec!["m".to_string(), "best_k".into(), "best_total".into()];
            header.extend((1..=a.kmax).map(|k| format!("e_{k}")));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            csv(
                &header,
                rows.iter().map(|r| {
                    let mut row = vec![num(r.m), r.best_k.to_string(), num(r.best_total)];
                    row.extend(r.energies_by_k.iter().map(|&(_, e)| num(e)));
                    row
                }),
            )?
        }
    })
}

#[derive(Serialize)]
struct NecessaryOut {
    #[serde(rename = "N")]
    n: usize,
    lambda: f64,
    shape_kind: &'static str,
    cells: u64,
    cell_size: f64,
    moment: f64,
    measure: f64,
    c_n: f64,
    bound: f64,
    satisfied: bool,
    margin: f64,
}

fn necessary(a: &NecessaryArgs, format: Format) -> Out {
    let p = params(&a.problem)?;
    let text = fs::read_to_string(&a.shape_file)
        .map_err(|e| CliError::param(format!("cannot read {}: {e}", a.shape_file.display())))?;
    let (kind, g) = if text.trim_start().starts_with('[') {
        let shape = read_fourier(&a.shape_file)?;
        if !(a.h > 0.0 && a.h < 1.0) {
            return Err(CliError::param(format!(
                "relative cell size must be in (0,1), got {}",
                a.h
            )));
        }
        ("fourier", rasterize(&shape, a.h * shape.base_radius())?)
    } else {
        ("grid", GridShape::from_rle(&text)?)
    };
    let r = necessary_condition(&g, &p)?;
    render(
        &NecessaryOut {
            n: p.dimension(),
            lambda: p.exponent(),
            shape_kind: kind,
            cells: g.cell_count(),
            cell_size: g.cell_size(),
            moment: r.moment,
            measure: r.measure,
            c_n: r.c_n,
            bound: r.bound,
            satisfied: r.satisfied,
            margin: r.margin,
        },
        format,
    )
}

#[derive(Serialize)]
struct NonexistenceOut {
    #[serde(rename = "N")]
    n: usize,
    lambda: f64,
    c_n: f64,
    bound: f64,
    /// Unit-ball moment of `|x-y|^{1-λ}`; absent at λ = 1 where it is not used.
    ball_moment: Option<f64>,
    moment_method: Option<Method>,
    stderr: f64,
}

fn nonexistence(a: &NonexistenceArgs, format: Format) -> Out {
    let p = params(&a.problem)?;
    let c = BallConstants::radial(&p);
    let n = p.dimension();
    let lambda = p.exponent();
    let moment = if lambda < 1.0 {
        let b = budget(a.budget, a.moment)?;
        Some(match a.moment {
            Method::Radial => (ball_distance_moment(n, 1.0 - lambda, b as usize)?, 0.0),
            Method::Mc => {
                let e = ball_distance_moment_mc(n, 1.0 - lambda, b, a.seed)?;
                (e.value, e.stderr)
            }
        })
    } else {
        None
    };
    let bound = nonexistence_mass_bound(&p, &c, moment.map_or(f64::NAN, |m| m.0))?;
    render(
        &NonexistenceOut {
            n,
            lambda,
            c_n: angular_constant_closed(n)?,
            bound,
            ball_moment: moment.map(|m| m.0),
            moment_method: moment.map(|_| a.moment),
            stderr: moment.map_or(0.0, |m| m.1),
        },
        format,
    )
}
