//! Line-oriented structured text for results.
//!
//! ```text
//! # comment lines are ignored
//! format = re100 1
//! kind = production-function
//! period = 4
//!
//! [segment]
//! slope = 1.00000000000000e-1
//! ```
//!
//! Top-level `key = value` lines come first, then `[name]` sections holding
//! their own `key = value` lines. Keys may repeat. Reals are written with 15
//! significant digits; infinities as `inf` and `-inf`. Lists are
//! space-separated on one line.

use std::fmt::Write as _;

use crate::econ::{CostFunction, Region};
use crate::envelope::{BottleneckReport, Interval, PartialSumPoint, ProductionFunction, Segment};
use crate::error::{Error, Result};
use crate::lp::{Capacity, LpModel, LpSolution, Row, Sense, Status, Variant};
use crate::tech::{SecondStorageCosts, StorageTech, TechCosts};

pub const FORMAT_VERSION: &str = "re100 1";

/// Formats a real with 15 significant digits.
pub fn real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.14e}")
    }
}

pub fn parse_real(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

fn reals(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| real(*v))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Section {
    pub name: String,
    /// 1-based line of the section header.
    pub line: usize,
    pub entries: Vec<(String, String, usize)>,
}

impl Section {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            line: 0,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.entries.push((key.into(), value.into(), 0));
        self
    }

    fn entry(&self, key: &str) -> Result<(&str, usize)> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
            .ok_or_else(|| Error::Format {
                line: self.line,
                message: format!("missing key `{key}`"),
            })
    }

    pub fn get(&self, key: &str) -> Result<&str> {
        self.entry(key).map(|(v, _)| v)
    }

    pub fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = (&'a str, usize)> + 'a {
        self.entries
            .iter()
            .filter(move |(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    }

    pub fn real(&self, key: &str) -> Result<f64> {
        let (v, line) = self.entry(key)?;
        parse_real(v).ok_or_else(|| Error::Format {
            line,
            message: format!("`{key}` is not a number: `{v}`"),
        })
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        let (v, line) = self.entry(key)?;
        v.parse().map_err(|_| Error::Format {
            line,
            message: format!("`{key}` is not a count: `{v}`"),
        })
    }

    pub fn reals(&self, key: &str) -> Result<Vec<f64>> {
        let (v, line) = self.entry(key)?;
        split_reals(v, line)
    }

    pub fn optional_real(&self, key: &str) -> Result<Option<f64>> {
        match self.entries.iter().any(|(k, _, _)| k == key) {
            true => self.real(key).map(Some),
            false => Ok(None),
        }
    }
}

fn split_reals(v: &str, line: usize) -> Result<Vec<f64>> {
    v.split_whitespace()
        .map(|s| {
            parse_real(s).ok_or_else(|| Error::Format {
                line,
                message: format!("not a number: `{s}`"),
            })
        })
        .collect()
}

/// A parsed file: top-level entries plus named sections in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Document {
    pub comments: Vec<String>,
    pub top: Section,
    pub sections: Vec<Section>,
}

impl Document {
    pub fn new(kind: &str) -> Self {
        let mut top = Section::new("");
        top.push("format", FORMAT_VERSION).push("kind", kind);
        Self {
            comments: Vec::new(),
            top,
            sections: Vec::new(),
        }
    }

    pub fn comment(&mut self, text: impl Into<String>) -> &mut Self {
        self.comments.push(text.into());
        self
    }

    pub fn section(&mut self, name: &str) -> &mut Section {
        self.sections.push(Section::new(name));
        self.sections.last_mut().expect("just pushed")
    }

    pub fn sections<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Section> {
        self.sections.iter().filter(move |s| s.name == name)
    }

    pub fn kind(&self) -> Result<&str> {
        self.top.get("kind")
    }

    fn expect_kind(&self, kind: &str) -> Result<()> {
        let found = self.kind()?;
        if found != kind {
            return Err(Error::Format {
                line: self.top.entry("kind")?.1,
                message: format!("expected kind `{kind}`, found `{found}`"),
            });
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            for line in c.lines() {
                let _ = writeln!(out, "# {line}");
            }
        }
        for (k, v, _) in &self.top.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        for s in &self.sections {
            let _ = writeln!(out, "\n[{}]", s.name);
            for (k, v, _) in &s.entries {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = Document::default();
        let mut current: Option<Section> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                doc.comments.push(c.trim().to_string());
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                if let Some(s) = current.take() {
                    doc.sections.push(s);
                }
                current = Some(Section {
                    name: name.trim().to_string(),
                    line: line_no,
                    entries: Vec::new(),
                });
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Format {
                line: line_no,
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            let entry = (k.trim().to_string(), v.trim().to_string(), line_no);
            match current.as_mut() {
                Some(s) => s.entries.push(entry),
                None => doc.top.entries.push(entry),
            }
        }
        if let Some(s) = current {
            doc.sections.push(s);
        }
        if doc.top.get("format").ok() != Some(FORMAT_VERSION) {
            return Err(Error::Format {
                line: 1,
                message: format!("missing or unsupported `format = {FORMAT_VERSION}` line"),
            });
        }
        Ok(doc)
    }
}

fn interval_of(s: &Section) -> Result<Interval> {
    Ok(Interval {
        start: s.usize("start")?,
        len: s.usize("len")?,
    })
}

fn push_point(s: &mut Section, p: &PartialSumPoint) {
    s.push("start", p.interval.start.to_string())
        .push("len", p.interval.len.to_string())
        .push("generation", real(p.generation))
        .push("demand", real(p.demand));
}

fn point_of(s: &Section) -> Result<PartialSumPoint> {
    Ok(PartialSumPoint {
        interval: interval_of(s)?,
        generation: s.real("generation")?,
        demand: s.real("demand")?,
    })
}

fn add_production_function(doc: &mut Document, pf: &ProductionFunction) {
    doc.top
        .push("period", pf.period.to_string())
        .push("step_hours", real(pf.step_hours))
        .push("x_g_min", real(pf.x_g_min));
    push_point(doc.section("full-cycle"), &pf.full_cycle);
    for seg in &pf.segments {
        doc.section("segment")
            .push("slope", real(seg.slope))
            .push("intercept", real(seg.intercept))
            .push("x_g_lo", real(seg.x_g_lo))
            .push("x_g_hi", real(seg.x_g_hi))
            .push("start", seg.bottleneck.start.to_string())
            .push("len", seg.bottleneck.len.to_string());
    }
    for &(x_g, x_s) in &pf.vertices {
        doc.section("vertex")
            .push("x_g", real(x_g))
            .push("x_s", real(x_s));
    }
    for p in &pf.boundary {
        push_point(doc.section("boundary"), p);
    }
}

fn production_function_of(doc: &Document) -> Result<ProductionFunction> {
    let full = doc
        .sections("full-cycle")
        .next()
        .ok_or_else(|| Error::Format {
            line: 0,
            message: "missing [full-cycle] section".into(),
        })?;
    Ok(ProductionFunction {
        segments: doc
            .sections("segment")
            .map(|s| {
                Ok(Segment {
                    slope: s.real("slope")?,
                    intercept: s.real("intercept")?,
                    x_g_lo: s.real("x_g_lo")?,
                    x_g_hi: s.real("x_g_hi")?,
                    bottleneck: interval_of(s)?,
                })
            })
            .collect::<Result<_>>()?,
        x_g_min: doc.top.real("x_g_min")?,
        vertices: doc
            .sections("vertex")
            .map(|s| Ok((s.real("x_g")?, s.real("x_s")?)))
            .collect::<Result<_>>()?,
        period: doc.top.usize("period")?,
        step_hours: doc.top.real("step_hours")?,
        full_cycle: point_of(full)?,
        boundary: doc
            .sections("boundary")
            .map(point_of)
            .collect::<Result<_>>()?,
    })
}

pub fn write_production_function(pf: &ProductionFunction) -> Document {
    let mut doc = Document::new("production-function");
    add_production_function(&mut doc, pf);
    doc
}

pub fn read_production_function(doc: &Document) -> Result<ProductionFunction> {
    match doc.kind()? {
        "production-function" | "cost-function" => production_function_of(doc),
        other => Err(Error::Format {
            line: 0,
            message: format!("expected a production or cost function, found `{other}`"),
        }),
    }
}

fn push_costs(s: &mut Section, costs: &TechCosts) {
    s.push("generation", real(costs.generation))
        .push("storage", real(costs.storage));
    if let Some(p) = costs.storage_power {
        s.push("storage_power", real(p));
    }
    if let Some(c) = costs.second {
        s.push("second_energy", real(c.energy))
            .push("second_power_in", real(c.power_in))
            .push("second_power_out", real(c.power_out));
    }
}

fn costs_of(s: &Section) -> Result<TechCosts> {
    let second = match s.optional_real("second_energy")? {
        Some(energy) => Some(SecondStorageCosts {
            energy,
            power_in: s.real("second_power_in")?,
            power_out: s.real("second_power_out")?,
        }),
        None => None,
    };
    Ok(TechCosts {
        generation: s.real("generation")?,
        storage: s.real("storage")?,
        storage_power: s.optional_real("storage_power")?,
        second,
    })
}

/// Cost function with the production function it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CostFunctionFile {
    pub cost_function: CostFunction,
    pub production_function: ProductionFunction,
    pub costs: Option<TechCosts>,
    pub currency: String,
}

pub fn write_cost_function(file: &CostFunctionFile) -> Document {
    let mut doc = Document::new("cost-function");
    doc.top.push("currency", file.currency.clone());
    add_production_function(&mut doc, &file.production_function);
    if let Some(c) = &file.costs {
        push_costs(doc.section("costs"), c);
    }
    for r in &file.cost_function.regions {
        doc.section("region")
            .push("ratio_lo", real(r.ratio_lo))
            .push("ratio_hi", real(r.ratio_hi))
            .push("x_g", real(r.x_g))
            .push("x_s", real(r.x_s));
    }
    doc
}

pub fn read_cost_function(doc: &Document) -> Result<CostFunctionFile> {
    doc.expect_kind("cost-function")?;
    let regions = doc
        .sections("region")
        .map(|s| {
            Ok(Region {
                ratio_lo: s.real("ratio_lo")?,
                ratio_hi: s.real("ratio_hi")?,
                x_g: s.real("x_g")?,
                x_s: s.real("x_s")?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CostFunctionFile {
        cost_function: CostFunction { regions },
        production_function: production_function_of(doc)?,
        costs: doc.sections("costs").next().map(costs_of).transpose()?,
        currency: doc.top.get("currency")?.to_string(),
    })
}

pub fn write_bottlenecks(reports: &[BottleneckReport]) -> Document {
    let mut doc = Document::new("bottleneck-reports");
    for r in reports {
        doc.section("report")
            .push("x_g", real(r.x_g))
            .push("start", r.interval.start.to_string())
            .push("len", r.interval.len.to_string())
            .push("demand_sum", real(r.demand_sum))
            .push("generation_sum", real(r.generation_sum))
            .push("x_s", real(r.x_s))
            .push("length_hours", real(r.length_hours));
    }
    doc
}

pub fn read_bottlenecks(doc: &Document) -> Result<Vec<BottleneckReport>> {
    doc.expect_kind("bottleneck-reports")?;
    doc.sections("report")
        .map(|s| {
            Ok(BottleneckReport {
                x_g: s.real("x_g")?,
                interval: interval_of(s)?,
                demand_sum: s.real("demand_sum")?,
                generation_sum: s.real("generation_sum")?,
                x_s: s.real("x_s")?,
                length_hours: s.real("length_hours")?,
            })
        })
        .collect()
}

pub fn write_lp_model(model: &LpModel) -> Document {
    let mut doc = Document::new("lp-model");
    doc.top
        .push("variant", model.variant.name())
        .push("period", model.period.to_string())
        .push("step_hours", real(model.step_hours))
        .push("variables", model.num_variables().to_string())
        .push("constraints", model.num_constraints().to_string());
    push_costs(doc.section("costs"), &model.costs);
    for t in &model.techs {
        doc.section("tech")
            .push("charge", real(t.charge))
            .push("discharge", real(t.discharge));
    }
    doc.section("series")
        .push("demand", reals(&model.demand))
        .push("generation", reals(&model.generation));
    let obj = doc.section("objective");
    for (j, c) in model.objective.iter().enumerate() {
        if *c != 0.0 {
            obj.push("c", format!("{j} {}", real(*c)));
        }
    }
    let rows = doc.section("rows");
    for (i, r) in model.rows.iter().enumerate() {
        rows.push("row", format!("{i} {} {}", r.sense.symbol(), real(r.rhs)));
    }
    let m = doc.section("matrix");
    for (i, r) in model.rows.iter().enumerate() {
        for &(j, a) in &r.coeffs {
            m.push("a", format!("{i} {j} {}", real(a)));
        }
    }
    let fixed = doc.section("fixed");
    for (c, v) in &model.fixed {
        fixed.push(c.name(), real(*v));
    }
    doc
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Format {
        line,
        message: message.into(),
    }
}

fn index(s: &str, line: usize, bound: usize) -> Result<usize> {
    let i: usize = s
        .parse()
        .map_err(|_| bad(line, format!("not an index: `{s}`")))?;
    if i >= bound {
        return Err(bad(line, format!("index {i} out of range 0..{bound}")));
    }
    Ok(i)
}

fn one_section<'a>(doc: &'a Document, name: &'a str) -> Result<&'a Section> {
    doc.sections(name)
        .next()
        .ok_or_else(|| bad(0, format!("missing [{name}] section")))
}

pub fn read_lp_model(doc: &Document) -> Result<LpModel> {
    doc.expect_kind("lp-model")?;
    let variant: Variant = doc.top.get("variant")?.parse()?;
    let n_vars = doc.top.usize("variables")?;
    let n_rows = doc.top.usize("constraints")?;
    let series = one_section(doc, "series")?;

    let mut objective = vec![0.0; n_vars];
    for (v, line) in one_section(doc, "objective")?.all("c") {
        let (j, c) = v
            .split_once(' ')
            .ok_or_else(|| bad(line, "expected `index value`"))?;
        objective[index(j, line, n_vars)?] =
            parse_real(c.trim()).ok_or_else(|| bad(line, "bad coefficient"))?;
    }
    let mut rows = vec![
        Row {
            coeffs: Vec::new(),
            sense: Sense::Eq,
            rhs: 0.0,
        };
        n_rows
    ];
    for (v, line) in one_section(doc, "rows")?.all("row") {
        let parts: Vec<&str> = v.split_whitespace().collect();
        let [i, sense, rhs] = parts[..] else {
            return Err(bad(line, "expected `index sense rhs`"));
        };
        let i = index(i, line, n_rows)?;
        rows[i].sense = sense
            .parse()
            .map_err(|_| bad(line, format!("bad sense `{sense}`")))?;
        rows[i].rhs = parse_real(rhs).ok_or_else(|| bad(line, "bad right-hand side"))?;
    }
    for (v, line) in one_section(doc, "matrix")?.all("a") {
        let parts: Vec<&str> = v.split_whitespace().collect();
        let [i, j, a] = parts[..] else {
            return Err(bad(line, "expected `row column value`"));
        };
        let i = index(i, line, n_rows)?;
        let j = index(j, line, n_vars)?;
        let a = parse_real(a).ok_or_else(|| bad(line, "bad coefficient"))?;
        rows[i].coeffs.push((j, a));
    }
    let fixed = match doc.sections("fixed").next() {
        Some(s) => s
            .entries
            .iter()
            .map(|(k, v, line)| {
                Ok((
                    k.parse::<Capacity>()?,
                    parse_real(v).ok_or_else(|| bad(*line, "bad fixed value"))?,
                ))
            })
            .collect::<Result<_>>()?,
        None => Vec::new(),
    };
    Ok(LpModel {
        variant,
        period: doc.top.usize("period")?,
        step_hours: doc.top.real("step_hours")?,
        demand: series.reals("demand")?,
        generation: series.reals("generation")?,
        costs: costs_of(one_section(doc, "costs")?)?,
        techs: doc
            .sections("tech")
            .map(|s| {
                Ok(StorageTech {
                    charge: s.real("charge")?,
                    discharge: s.real("discharge")?,
                })
            })
            .collect::<Result<_>>()?,
        objective,
        rows,
        fixed,
    })
}

pub fn write_lp_solution(solution: &LpSolution) -> Document {
    let mut doc = Document::new("lp-solution");
    doc.top
        .push("variant", solution.variant.name())
        .push("status", solution.status.name())
        .push("period", solution.period.to_string())
        .push("objective", real(solution.objective));
    let caps = doc.section("capacities");
    for (c, v) in solution.capacities() {
        caps.push(c.name(), real(v));
    }
    doc.section("vectors")
        .push("x", reals(&solution.x))
        .push("duals", reals(&solution.duals));
    doc
}

pub fn read_lp_solution(doc: &Document) -> Result<LpSolution> {
    doc.expect_kind("lp-solution")?;
    let vectors = one_section(doc, "vectors")?;
    let status: Status = doc.top.get("status")?.parse()?;
    Ok(LpSolution {
        variant: doc.top.get("variant")?.parse()?,
        status,
        objective: doc.top.real("objective")?,
        x: vectors.reals("x")?,
        duals: vectors.reals("duals")?,
        period: doc.top.usize("period")?,
    })
}
