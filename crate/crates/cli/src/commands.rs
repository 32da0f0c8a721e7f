//! Subcommand implementations.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::Args;
use re100::econ::{legendre, ContourPiece, CostFunction};
use re100::envelope::{
    grid, partial_sum_hull, storage_requirement_lossy, Interval, PartialSums, ProductionFunction,
};
use re100::format::{
    read_cost_function, read_production_function, real, write_bottlenecks, write_cost_function,
    write_lp_model, write_lp_solution, write_production_function, CostFunctionFile, Document,
};
use re100::lp::{diagnostics, Capacity, LpModel, LpSolution, Status, StorageOption, Variant};
use re100::oracle::{enumerate_intervals, fingerprint, greedy_min_capacity, vertex_scan, Method};
use re100::tech::SecondStorageCosts;
use re100::{Error, StorageTech, TechCosts};

use crate::input::{parse_sweep, InputArgs, Instance};
use crate::output::{num, Output, OutputArgs, Provenance};
use crate::plot::{bars, chart, Series, Style};

/// Technology costs and efficiencies; defaults are the reference values.
#[derive(Args, Debug, Clone)]
pub struct TechArgs {
    /// Generation cost per unit of generation capacity.
    #[arg(long, default_value_t = 4.7)]
    pub c_g: f64,
    /// First storage energy cost.
    #[arg(long, default_value_t = 500.0)]
    pub c_s: f64,
    /// First storage power cost.
    #[arg(long, default_value_t = 10000.0)]
    pub c_p: f64,
    /// Second storage energy cost.
    #[arg(long, default_value_t = 10.0)]
    pub c_2s: f64,
    /// Second storage charging power cost.
    #[arg(long, default_value_t = 10000.0)]
    pub c_2p_in: f64,
    /// Second storage discharging power cost.
    #[arg(long, default_value_t = 15000.0)]
    pub c_2p_out: f64,
    /// First storage charge efficiency.
    #[arg(long, default_value_t = 0.8f64.sqrt())]
    pub charge1: f64,
    /// First storage discharge factor (energy drawn per unit delivered).
    #[arg(long, default_value_t = 1.0 / 0.8f64.sqrt())]
    pub discharge1: f64,
    #[arg(long, default_value_t = 0.8)]
    pub charge2: f64,
    #[arg(long, default_value_t = 2.0)]
    pub discharge2: f64,
}

impl TechArgs {
    fn costs(&self) -> re100::Result<TechCosts> {
        let costs = TechCosts {
            generation: self.c_g,
            storage: self.c_s,
            storage_power: Some(self.c_p),
            second: Some(SecondStorageCosts {
                energy: self.c_2s,
                power_in: self.c_2p_in,
                power_out: self.c_2p_out,
            }),
        };
        costs.validate()?;
        Ok(costs)
    }

    fn techs(&self) -> re100::Result<[StorageTech; 2]> {
        Ok([
            StorageTech::new(self.charge1, self.discharge1)?,
            StorageTech::new(self.charge2, self.discharge2)?,
        ])
    }
}

fn sweep(s: &str) -> Result<(f64, f64, usize), String> {
    parse_sweep(s)
}

fn tag(k: usize, total: usize) -> String {
    if total == 1 {
        String::new()
    } else {
        format!("-{}", k + 1)
    }
}

fn descriptions(instances: &[Instance]) -> Vec<String> {
    instances.iter().map(|i| i.description.clone()).collect()
}

#[derive(Args, Debug)]
pub struct ProdfnArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Round-trip efficiency of a lossy storage to sweep alongside. Repeatable.
    #[arg(long, value_name = "E")]
    pub eff: Vec<f64>,
    /// Upper end of the tabulated x_g range.
    #[arg(long, default_value_t = 4.0)]
    pub xg_max: f64,
    /// Points in the tabulated x_g range.
    #[arg(long, default_value_t = 61)]
    pub grid: usize,
}

pub fn prodfn(run: &Provenance, a: ProdfnArgs) -> anyhow::Result<()> {
    let inst = a.input.load_one()?;
    let out = Output::new(
        run,
        &a.output,
        "prodfn",
        std::slice::from_ref(&inst.description),
    )?;
    let pf = partial_sum_hull(&inst.demand, &inst.generation)?;
    out.document(".pf", write_production_function(&pf))?;

    let techs = a
        .eff
        .iter()
        .map(|&e| StorageTech::symmetric(e))
        .collect::<re100::Result<Vec<_>>>()?;
    let xs = grid(pf.x_g_min, a.xg_max.max(pf.x_g_min), a.grid.max(2));
    let mut columns = vec!["x_g".to_string(), "x_s".to_string()];
    columns.extend(a.eff.iter().map(|e| format!("x_s_eff_{e}")));
    let mut rows = Vec::new();
    let mut curves: Vec<Vec<(f64, f64)>> = vec![Vec::new(); techs.len()];
    for &x in &xs {
        let mut row = vec![num(x), num(pf.eval(x)?)];
        for (tech, curve) in techs.iter().zip(&mut curves) {
            match storage_requirement_lossy(&inst.demand, &inst.generation, x, tech) {
                Ok(r) => {
                    row.push(num(r.x_s));
                    curve.push((x, r.x_s));
                }
                Err(Error::Infeasible { .. }) => row.push(String::new()),
                Err(e) => return Err(e.into()),
            }
        }
        rows.push(row);
    }
    let columns: Vec<&str> = columns.iter().map(String::as_str).collect();
    out.table(".csv", &columns, &rows)?;

    if out.plots() {
        let mut series = vec![
            Series::new(
                "lossless",
                xs.iter()
                    .map(|&x| (x, pf.eval(x).unwrap_or(f64::NAN)))
                    .collect(),
                Style::Line,
            ),
            Series::new(
                "vertices",
                pf.vertices
                    .iter()
                    .copied()
                    .filter(|v| v.0 <= a.xg_max)
                    .collect(),
                Style::Markers,
            ),
        ];
        for (e, curve) in a.eff.iter().zip(curves) {
            series.push(Series::new(format!("efficiency {e}"), curve, Style::Line));
        }
        out.svg(".svg", chart("Production function", "x_g", "x_s", &series)?)?;
    }

    println!("segments: {}", pf.segments.len());
    println!("x_s(1) = {}", num(pf.eval(1.0)?));
    for (x, s) in &pf.vertices {
        println!("vertex x_g = {} x_s = {}", num(*x), num(*s));
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct CostfnArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Production-function or cost-function file to use instead of profiles. Repeatable.
    #[arg(long, value_name = "FILE")]
    pub pf: Vec<PathBuf>,
    /// Total cost of an iso-cost contour. Repeatable.
    #[arg(long, value_name = "L", default_values_t = [10.0])]
    pub contour: Vec<f64>,
    /// Largest storage cost drawn for contours that run off to infinity.
    #[arg(long, value_name = "C_S")]
    pub cs_max: Option<f64>,
    /// Generation cost at which to report the optimum (with --c-s).
    #[arg(long, requires = "c_s")]
    pub c_g: Option<f64>,
    /// Storage cost at which to report the optimum (with --c-g).
    #[arg(long, requires = "c_g")]
    pub c_s: Option<f64>,
    #[arg(long, default_value = "JPY/kWh")]
    pub currency: String,
}

fn production_function_file(path: &PathBuf) -> re100::Result<ProductionFunction> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let located = |e: Error| match e {
        Error::Format { line, message } => Error::Format {
            line,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    };
    let doc = Document::parse(&text).map_err(located)?;
    match doc.kind().map_err(located)? {
        "cost-function" => Ok(read_cost_function(&doc)
            .map_err(located)?
            .production_function),
        _ => read_production_function(&doc).map_err(located),
    }
}

pub fn costfn(run: &Provenance, a: CostfnArgs) -> anyhow::Result<()> {
    let sources: Vec<(String, String, ProductionFunction)> = if a.pf.is_empty() {
        a.input
            .load()?
            .into_iter()
            .map(|i| {
                Ok((
                    i.label,
                    i.description,
                    partial_sum_hull(&i.demand, &i.generation)?,
                ))
            })
            .collect::<re100::Result<_>>()?
    } else {
        a.pf.iter()
            .map(|p| {
                let label = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                Ok((
                    label,
                    format!("production function {}", p.display()),
                    production_function_file(p)?,
                ))
            })
            .collect::<re100::Result<_>>()?
    };
    let header: Vec<String> = sources.iter().map(|s| s.1.clone()).collect();
    let out = Output::new(run, &a.output, "costfn", &header)?;
    let costs = a.c_g.zip(a.c_s).map(|(g, s)| TechCosts::simple(g, s));

    let cfs: Vec<CostFunction> = sources.iter().map(|s| legendre(&s.2)).collect();
    for (k, ((_, _, pf), cf)) in sources.iter().zip(&cfs).enumerate() {
        let file = CostFunctionFile {
            cost_function: cf.clone(),
            production_function: pf.clone(),
            costs,
            currency: a.currency.clone(),
        };
        out.document(
            &format!("{}.cf", tag(k, sources.len())),
            write_cost_function(&file),
        )?;
    }

    let contours: Vec<(usize, re100::econ::Contour)> = cfs
        .iter()
        .enumerate()
        .flat_map(|(k, cf)| a.contour.iter().map(move |&l| (k, cf.contour(l))))
        .collect();
    let cs_max = a.cs_max.unwrap_or_else(|| {
        let far = contours
            .iter()
            .flat_map(|(_, c)| c.pieces.iter())
            .map(|p| match *p {
                ContourPiece::Segment { from, to, .. } => from.1.max(to.1),
                ContourPiece::Ray { c_s_from, .. } => c_s_from,
            })
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        if far > 0.0 {
            1.25 * far
        } else {
            1.0
        }
    });

    let mut rows = Vec::new();
    let mut series = Vec::new();
    for (k, contour) in &contours {
        let label = &sources[*k].0;
        for (i, piece) in contour.pieces.iter().enumerate() {
            let (kind, vertex, from, to) = match *piece {
                ContourPiece::Segment { vertex, from, to } => ("segment", vertex, from, to),
                ContourPiece::Ray {
                    vertex,
                    c_g,
                    c_s_from,
                } => ("ray", vertex, (c_g, c_s_from), (c_g, f64::INFINITY)),
            };
            rows.push(vec![
                label.clone(),
                num(contour.lcoe),
                i.to_string(),
                vertex.to_string(),
                kind.to_string(),
                num(from.0),
                num(from.1),
                num(to.0),
                num(to.1),
            ]);
        }
        let pts = contour
            .polyline(cs_max)
            .into_iter()
            .map(|(g, s)| (s, g))
            .collect();
        series.push(Series::new(
            format!("{label} L = {}", contour.lcoe),
            pts,
            Style::LineMarkers,
        ));
    }
    out.table(
        "_contours.csv",
        &[
            "profile", "lcoe", "piece", "vertex", "kind", "c_g_from", "c_s_from", "c_g_to",
            "c_s_to",
        ],
        &rows,
    )?;
    out.svg(
        "_contours.svg",
        chart("Iso-cost contours", "c_s", "c_g", &series)?,
    )?;

    if let (Some(c_g), Some(c_s)) = (a.c_g, a.c_s) {
        for ((label, _, _), cf) in sources.iter().zip(&cfs) {
            let o = cf.optimal_capacity(c_g, c_s)?;
            println!(
                "{label}: L = {} at x_g = {} x_s = {} (vertex {})",
                num(o.lcoe),
                num(o.x_g),
                num(o.x_s),
                o.vertex
            );
        }
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct GdCurveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Most interval points to tabulate; larger inputs are thinned evenly.
    #[arg(long, default_value_t = 20000)]
    pub max_points: usize,
}

pub fn gd_curve(run: &Provenance, a: GdCurveArgs) -> anyhow::Result<()> {
    let inst = a.input.load_one()?;
    let out = Output::new(
        run,
        &a.output,
        "gd-curve",
        std::slice::from_ref(&inst.description),
    )?;
    let pf = partial_sum_hull(&inst.demand, &inst.generation)?;
    let sums = PartialSums::new(inst.demand.values(), inst.generation.values());
    let n = sums.period();

    let total = n * n;
    let stride = ((total as f64 / a.max_points.max(1) as f64).sqrt().ceil() as usize).max(1);
    let mut points = vec![(Interval::EMPTY, 0.0, 0.0)];
    for start in (0..n).step_by(stride) {
        let mut lens: Vec<usize> = (1..=n).step_by(stride).collect();
        if lens.last() != Some(&n) {
            lens.push(n);
        }
        for len in lens {
            let p = sums.point(Interval { start, len });
            points.push((p.interval, p.generation, p.demand));
        }
    }
    let row =
        |i: &Interval, g: f64, d: f64| vec![i.start.to_string(), i.len.to_string(), num(g), num(d)];
    let columns = ["start", "len", "generation", "demand"];
    let boundary: Vec<Vec<String>> = pf
        .boundary
        .iter()
        .map(|p| row(&p.interval, p.generation, p.demand))
        .collect();
    out.table("_boundary.csv", &columns, &boundary)?;
    let sampled: Vec<Vec<String>> = points.iter().map(|(i, g, d)| row(i, *g, *d)).collect();
    out.table("_points.csv", &columns, &sampled)?;

    if out.plots() {
        let series = [
            Series::new(
                "intervals",
                points.iter().map(|p| (p.1, p.2)).collect(),
                Style::Dots,
            ),
            Series::new(
                "upper hull",
                pf.boundary
                    .iter()
                    .map(|p| (p.generation, p.demand))
                    .collect(),
                Style::LineMarkers,
            ),
            Series::new("D = G", vec![(0.0, 0.0), (1.0, 1.0)], Style::Line),
        ];
        out.svg(".svg", chart("Partial sums", "G", "D", &series)?)?;
    }
    println!("boundary points: {}", pf.boundary.len());
    println!("tabulated intervals: {} (stride {stride})", points.len());
    Ok(())
}

#[derive(Args, Debug)]
pub struct LpArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub tech: TechArgs,
    /// simplest, lossy, power-capped or two-storage.
    #[arg(long, default_value = "two-storage")]
    pub variant: String,
    /// Pin a capacity, e.g. `x_g=1.5`. Repeatable.
    #[arg(long, value_name = "NAME=VALUE")]
    pub fix: Vec<String>,
    /// Also write the assembled model.
    #[arg(long)]
    pub write_model: bool,
}

fn parse_fix(s: &str) -> re100::Result<(Capacity, f64)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| Error::Validation(format!("--fix expects NAME=VALUE, got `{s}`")))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::Validation(format!("--fix: bad value in `{s}`")))?;
    Ok((name.trim().parse()?, value))
}

fn solve_fixed(
    mut model: LpModel,
    fixes: &[(Capacity, f64)],
) -> re100::Result<(LpModel, LpSolution)> {
    for &(c, v) in fixes {
        if model.capacity_column(c).is_some() {
            model.fix(c, v)?;
        }
    }
    let s = model.solve()?;
    Ok((model, s))
}

fn diagnostics_text(model: &LpModel, solution: &LpSolution) -> re100::Result<String> {
    let d = diagnostics(model, solution)?;
    let mut t = String::new();
    let _ = writeln!(t, "storage = {}", d.energy);
    let _ = writeln!(t, "energy_capacity = {}", real(d.energy_capacity));
    let _ = writeln!(t, "bottleneck_start = {}", d.bottleneck.start);
    let _ = writeln!(t, "bottleneck_len = {}", d.bottleneck.len);
    let _ = writeln!(t, "soc_start = {}", real(d.soc_start));
    let _ = writeln!(t, "soc_end = {}", real(d.soc_end));
    let _ = writeln!(t, "unutilized_power = {}", real(d.unutilized_power));
    let _ = writeln!(t, "inconclusive = {}", d.inconclusive);
    for s in &d.sensitivities {
        let _ = writeln!(
            t,
            "sensitivity {} value = {} left = {} right = {} cost_ratio = {} consistent = {}",
            s.capacity,
            real(s.value),
            real(s.left),
            real(s.right),
            real(s.cost_ratio),
            s.consistent
        );
    }
    Ok(t)
}

fn option_file(o: StorageOption) -> &'static str {
    match o {
        StorageOption::Both => "both",
        StorageOption::FirstOnly => "st1",
        StorageOption::SecondOnly => "st2",
    }
}

pub fn lp(run: &Provenance, a: LpArgs) -> anyhow::Result<()> {
    let variant: Variant = a.variant.parse()?;
    let costs = a.tech.costs()?;
    let techs = a.tech.techs()?;
    let fixes = a
        .fix
        .iter()
        .map(|s| parse_fix(s))
        .collect::<re100::Result<Vec<_>>>()?;
    let instances = a.input.load()?;
    let out = Output::new(run, &a.output, "lp", &descriptions(&instances))?;

    let mut summary = Vec::new();
    let mut bar_values = Vec::new();
    let mut infeasible = Vec::new();
    for (k, inst) in instances.iter().enumerate() {
        let t = tag(k, instances.len());
        let runs: Vec<(String, LpModel, LpSolution)> = if variant == Variant::TwoStorage {
            StorageOption::ALL
                .iter()
                .map(|&o| {
                    let m = LpModel::two_storage_option(
                        &inst.demand,
                        &inst.generation,
                        &costs,
                        &techs,
                        o,
                    )?;
                    let (m, s) = solve_fixed(m, &fixes)?;
                    Ok((o.name().to_string(), m, s))
                })
                .collect::<re100::Result<_>>()?
        } else {
            let used: &[StorageTech] = match variant {
                Variant::Simplest => &[],
                _ => &techs[..1],
            };
            let m = LpModel::build(variant, &inst.demand, &inst.generation, &costs, used)?;
            let (m, s) = solve_fixed(m, &fixes)?;
            vec![(variant.name().to_string(), m, s)]
        };

        if variant == Variant::TwoStorage && runs.iter().all(|r| r.2.is_optimal()) {
            let l: Vec<f64> = runs.iter().map(|r| r.2.objective).collect();
            let best_single = l[1].min(l[2]);
            if l[0] > best_single + 1e-9 * best_single.abs().max(1.0) {
                return Err(Error::Solver(format!(
                    "{}: combined storage costs {} but a single storage costs {}",
                    inst.label, l[0], best_single
                ))
                .into());
            }
        }

        for (i, (name, model, solution)) in runs.iter().enumerate() {
            let suffix = if variant == Variant::TwoStorage {
                format!("{t}-{}", option_file(StorageOption::ALL[i]))
            } else {
                t.clone()
            };
            out.document(&format!("{suffix}.sol"), write_lp_solution(solution))?;
            let mut row = vec![
                inst.label.clone(),
                name.clone(),
                solution.status.name().to_string(),
                num(solution.objective),
            ];
            for c in Capacity::ALL {
                row.push(solution.capacity(c).map(num).unwrap_or_default());
            }
            summary.push(row);
            println!(
                "{} {name}: {} L = {}",
                inst.label,
                solution.status.name(),
                num(solution.objective)
            );
            if i == 0 {
                if a.write_model {
                    out.document(&format!("{suffix}.lp"), write_lp_model(model))?;
                }
                if solution.is_optimal() {
                    out.text(
                        &format!("{suffix}_diagnostics.txt"),
                        &diagnostics_text(model, solution)?,
                    )?;
                    let stores = if variant == Variant::TwoStorage { 2 } else { 1 };
                    let soc: Vec<Vec<f64>> =
                        (0..stores).map(|j| solution.state_of_charge(j)).collect();
                    let rows: Vec<Vec<String>> = (0..model.period)
                        .map(|t| {
                            let mut r = vec![
                                t.to_string(),
                                num(model.demand[t]),
                                num(model.generation[t]),
                            ];
                            r.extend(soc.iter().map(|s| num(s[t])));
                            r
                        })
                        .collect();
                    let mut cols = vec!["t", "demand", "generation", "soc1"];
                    if stores == 2 {
                        cols.push("soc2");
                    }
                    out.table(&format!("{suffix}_soc.csv"), &cols, &rows)?;
                    if out.plots() {
                        let series: Vec<Series> = soc
                            .iter()
                            .enumerate()
                            .map(|(j, s)| {
                                Series::new(
                                    format!("storage {}", j + 1),
                                    s.iter().enumerate().map(|(t, &v)| (t as f64, v)).collect(),
                                    Style::Line,
                                )
                            })
                            .collect();
                        out.svg(
                            &format!("{suffix}_soc.svg"),
                            chart("State of charge", "step", "energy", &series)?,
                        )?;
                    }
                } else {
                    infeasible.push(format!("{} {name}", inst.label));
                }
            }
        }
        bar_values.push(runs.iter().map(|r| r.2.objective).collect::<Vec<f64>>());
    }

    let mut columns = vec!["profile", "model", "status", "lcoe"];
    columns.extend(Capacity::ALL.iter().map(|c| c.name()));
    out.table("_summary.csv", &columns, &summary)?;
    if variant == Variant::TwoStorage && out.plots() {
        let groups: Vec<String> = instances.iter().map(|i| i.label.clone()).collect();
        let names: Vec<String> = StorageOption::ALL
            .iter()
            .map(|o| o.name().to_string())
            .collect();
        out.svg(
            "_costs.svg",
            bars(
                "Total cost by storage option",
                "L",
                &groups,
                &names,
                &bar_values,
            )?,
        )?;
    }
    if !infeasible.is_empty() {
        return Err(Error::Infeasible {
            reason: format!("no feasible capacities for {}", infeasible.join(", ")),
            min_generation: None,
        }
        .into());
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct BottleneckArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Generation capacities to examine, as lo:hi:n.
    #[arg(long, default_value = "1:4:31", value_parser = sweep, value_name = "LO:HI:N")]
    pub xg_sweep: (f64, f64, usize),
}

pub fn bottleneck(run: &Provenance, a: BottleneckArgs) -> anyhow::Result<()> {
    let inst = a.input.load_one()?;
    let out = Output::new(
        run,
        &a.output,
        "bottleneck",
        std::slice::from_ref(&inst.description),
    )?;
    let pf = partial_sum_hull(&inst.demand, &inst.generation)?;
    let (lo, hi, n) = a.xg_sweep;
    let reports = pf.bottleneck_sweep(lo, hi, n)?;
    out.document(".bn", write_bottlenecks(&reports))?;
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                num(r.x_g),
                r.interval.start.to_string(),
                r.interval.len.to_string(),
                num(r.length_hours),
                num(r.demand_sum),
                num(r.generation_sum),
                num(r.x_s),
            ]
        })
        .collect();
    out.table(
        ".csv",
        &[
            "x_g",
            "start",
            "len",
            "length_hours",
            "demand_sum",
            "generation_sum",
            "x_s",
        ],
        &rows,
    )?;
    if out.plots() {
        let pts = reports.iter().map(|r| (r.x_g, r.length_hours)).collect();
        out.svg(
            ".svg",
            chart(
                "Bottleneck length",
                "x_g",
                "hours",
                &[Series::new("bottleneck", pts, Style::Steps)],
            )?,
        )?;
    }
    for r in &reports {
        println!(
            "x_g = {} bottleneck start {} length {} steps ({} h) x_s = {}",
            num(r.x_g),
            r.interval.start,
            r.interval.len,
            num(r.length_hours),
            num(r.x_s)
        );
    }
    Ok(())
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub tech: TechArgs,
    /// Generation costs to try, as lo:hi:n.
    #[arg(long, default_value = "4.2:5.2:11", value_parser = sweep, value_name = "LO:HI:N")]
    pub cg_grid: (f64, f64, usize),
    /// First storage energy costs to try, as lo:hi:n.
    #[arg(long, default_value = "300:700:9", value_parser = sweep, value_name = "LO:HI:N")]
    pub c1e_grid: (f64, f64, usize),
    /// Total cost to match.
    #[arg(long, default_value_t = 10.0)]
    pub target: f64,
    /// `lp` (two-storage program), `envelope` (lossless single storage) or `auto`.
    #[arg(long, default_value = "auto")]
    pub model: String,
}

/// Largest period for which `--model auto` uses the linear program.
const AUTO_LP_PERIOD: usize = 96;

pub fn calibrate(run: &Provenance, a: CalibrateArgs) -> anyhow::Result<()> {
    let inst = a.input.load_one()?;
    let out = Output::new(
        run,
        &a.output,
        "calibrate",
        std::slice::from_ref(&inst.description),
    )?;
    let use_lp = match a.model.as_str() {
        "lp" => true,
        "envelope" => false,
        "auto" => inst.demand.len() <= AUTO_LP_PERIOD,
        other => {
            return Err(Error::Validation(format!(
                "--model must be lp, envelope or auto, got `{other}`"
            ))
            .into())
        }
    };
    let techs = a.tech.techs()?;
    let cf = if use_lp {
        None
    } else {
        Some(legendre(&partial_sum_hull(&inst.demand, &inst.generation)?))
    };
    let cgs = grid(a.cg_grid.0, a.cg_grid.1, a.cg_grid.2);
    let c1es = grid(a.c1e_grid.0, a.c1e_grid.1, a.c1e_grid.2);

    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut best: Option<(f64, f64, f64)> = None;
    for &c_g in &cgs {
        let mut line = Vec::new();
        for &c_1e in &c1es {
            let l = match &cf {
                Some(cf) => cf.optimal_capacity(c_g, c_1e)?.lcoe,
                None => {
                    let costs = TechArgs {
                        c_g,
                        c_s: c_1e,
                        ..a.tech.clone()
                    }
                    .costs()?;
                    let m = LpModel::two_storage_option(
                        &inst.demand,
                        &inst.generation,
                        &costs,
                        &techs,
                        StorageOption::Both,
                    )?;
                    let s = m.solve()?;
                    if s.status != Status::Optimal {
                        return Err(Error::Infeasible {
                            reason: format!(
                                "two-storage model is {} at c_g = {c_g}, c_1e = {c_1e}",
                                s.status.name()
                            ),
                            min_generation: None,
                        }
                        .into());
                    }
                    s.objective
                }
            };
            let dev = (l - a.target).abs();
            if best.is_none_or(|b| dev < (b.2 - a.target).abs()) {
                best = Some((c_g, c_1e, l));
            }
            rows.push(vec![num(c_g), num(c_1e), num(l), num(l - a.target)]);
            line.push((c_1e, l));
        }
        lines.push(Series::new(
            format!("c_g = {c_g:.3}"),
            line,
            Style::LineMarkers,
        ));
    }
    out.table(".csv", &["c_g", "c_1e", "lcoe", "deviation"], &rows)?;
    let (c_g, c_1e, l) = best.expect("grids are non-empty");
    let mut doc = Document::new("calibration");
    doc.top
        .push("model", if use_lp { "lp" } else { "envelope" })
        .push("target", real(a.target))
        .push("c_g", real(c_g))
        .push("c_1e", real(c_1e))
        .push("lcoe", real(l));
    out.document(".cal", doc)?;
    if out.plots() {
        let x0 = c1es[0];
        let x1 = *c1es.last().expect("non-empty");
        lines.push(Series::new(
            "target",
            vec![(x0, a.target), (x1, a.target)],
            Style::Line,
        ));
        out.svg(".svg", chart("Calibration", "c_1e", "L", &lines)?)?;
    }
    println!(
        "chosen c_g = {} c_1e = {} L = {} (target {})",
        num(c_g),
        num(c_1e),
        num(l),
        num(a.target)
    );
    Ok(())
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// `storage` (interval enumeration), `simulation` (greedy bisection) or `optimum` (vertex scan).
    #[arg(long, default_value = "storage")]
    pub quantity: String,
    #[arg(long, default_value_t = 1.0)]
    pub xg: f64,
    /// Round-trip efficiency for `simulation`; lossless when absent.
    #[arg(long)]
    pub eff: Option<f64>,
    #[arg(long, default_value_t = 4.7)]
    pub c_g: f64,
    #[arg(long, default_value_t = 500.0)]
    pub c_s: f64,
    /// Bisection tolerance for `simulation`.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
}

pub fn oracle(run: &Provenance, a: OracleArgs) -> anyhow::Result<()> {
    let inst = a.input.load_one()?;
    let out = Output::new(
        run,
        &a.output,
        "oracle",
        std::slice::from_ref(&inst.description),
    )?;
    let (d, g) = (&inst.demand, &inst.generation);
    let (method, value, params) = match a.quantity.as_str() {
        "storage" => (
            Method::IntervalEnumeration,
            enumerate_intervals(d, g, a.xg)?,
            vec![("x_g", a.xg)],
        ),
        "simulation" => {
            let tech = match a.eff {
                Some(e) => StorageTech::symmetric(e)?,
                None => StorageTech::LOSSLESS,
            };
            let v = greedy_min_capacity(d, g, a.xg, &tech, a.tol)?.ok_or_else(|| {
                Error::Infeasible {
                    reason: format!("no storage capacity serves demand at x_g = {}", a.xg),
                    min_generation: None,
                }
            })?;
            (
                Method::GreedySimulation,
                v,
                vec![
                    ("x_g", a.xg),
                    ("charge", tech.charge),
                    ("discharge", tech.discharge),
                    ("tol", a.tol),
                ],
            )
        }
        "optimum" => {
            let pf = partial_sum_hull(d, g)?;
            let (_, _, l) = vertex_scan(&pf, a.c_g, a.c_s);
            (Method::VertexScan, l, vec![("c_g", a.c_g), ("c_s", a.c_s)])
        }
        other => {
            return Err(Error::Validation(format!(
                "--quantity must be storage, simulation or optimum, got `{other}`"
            ))
            .into())
        }
    };
    let values: Vec<f64> = params.iter().map(|p| p.1).collect();
    let print = fingerprint(&[d, g], &values);
    let mut doc = Document::new("oracle-report");
    doc.top
        .push("quantity", a.quantity.clone())
        .push("method", method.name())
        .push("value", real(value))
        .push("fingerprint", print.clone());
    let p = doc.section("parameters");
    for (k, v) in &params {
        p.push(k, real(*v));
    }
    out.document(".oracle", doc)?;
    println!("{} by {method}: {} [{print}]", a.quantity, real(value));
    Ok(())
}
