//! CSV export and import of traces and reports.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::disruption::DisruptionKind;
use crate::error::{Error, Result};
use crate::harness::{FrontierPoint, SuiteReport};
use crate::panel::{CostRating, Evaluation, SpeedRating};
use crate::policy::PolicyKind;
use crate::scalar::Scalar;
use crate::world::{DayRecord, KpiReport, PerRole};

pub const TRACE_HEADER: [&str; 10] = [
    "day",
    "entity",
    "on_hand",
    "backorders",
    "on_order",
    "demand",
    "fulfilled",
    "holding_cost",
    "backorder_cost",
    "premium_cost",
];
pub const KPI_HEADER: [&str; 10] = [
    "total_cost",
    "holding_cost",
    "backorder_cost",
    "premium_cost",
    "service_level",
    "holding_supplier",
    "holding_manufacturer",
    "holding_retailer",
    "total_demand",
    "total_fulfilled",
];
pub const SUITE_HEADER: [&str; 7] = [
    "scenario",
    "policy",
    "mean_cost",
    "std_cost",
    "mean_service",
    "std_service",
    "n",
];
pub const FRONTIER_HEADER: [&str; 5] = [
    "strategy",
    "total_cost",
    "service_level",
    "cost_rating",
    "speed_rating",
];
pub const EVALUATION_HEADER: [&str; 3] = ["strategy", "cost_rating", "speed_rating"];

fn writer<W: Write>(out: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

fn finish<W: Write>(w: csv::Writer<W>) -> Result<()> {
    w.into_inner()
        .map_err(|e| Error::Csv(e.into_error().into()))?
        .flush()
        .map_err(|e| Error::Csv(e.into()))
}

pub fn write_trace<W: Write, T: Scalar>(out: W, trace: &[DayRecord<T>]) -> Result<()> {
    let mut w = writer(out, &TRACE_HEADER)?;
    for r in trace {
        w.serialize(r)?;
    }
    finish(w)
}

pub fn read_trace<R: Read, T: Scalar>(input: R) -> Result<Vec<DayRecord<T>>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[derive(Debug, Serialize, Deserialize)]
struct KpiRow<T> {
    total_cost: T,
    holding_cost: T,
    backorder_cost: T,
    premium_cost: T,
    service_level: T,
    holding_supplier: T,
    holding_manufacturer: T,
    holding_retailer: T,
    total_demand: u64,
    total_fulfilled: u64,
}

pub fn write_kpi<W: Write, T: Scalar>(out: W, reports: &[KpiReport<T>]) -> Result<()> {
    let mut w = writer(out, &KPI_HEADER)?;
    for k in reports {
        w.serialize(KpiRow {
            total_cost: k.total_cost,
            holding_cost: k.holding_cost,
            backorder_cost: k.backorder_cost,
            premium_cost: k.premium_cost,
            service_level: k.service_level,
            holding_supplier: k.holding_by_role.supplier,
            holding_manufacturer: k.holding_by_role.manufacturer,
            holding_retailer: k.holding_by_role.retailer,
            total_demand: k.total_demand,
            total_fulfilled: k.total_fulfilled,
        })?;
    }
    finish(w)
}

pub fn read_kpi<R: Read, T: Scalar>(input: R) -> Result<Vec<KpiReport<T>>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize()
        .map(|row| {
            let k: KpiRow<T> = row?;
            Ok(KpiReport {
                total_cost: k.total_cost,
                holding_cost: k.holding_cost,
                backorder_cost: k.backorder_cost,
                premium_cost: k.premium_cost,
                service_level: k.service_level,
                holding_by_role: PerRole {
                    supplier: k.holding_supplier,
                    manufacturer: k.holding_manufacturer,
                    retailer: k.holding_retailer,
                },
                total_demand: k.total_demand,
                total_fulfilled: k.total_fulfilled,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow<T> {
    pub scenario: String,
    pub policy: String,
    pub mean_cost: T,
    pub std_cost: T,
    pub mean_service: T,
    pub std_service: T,
    pub n: usize,
}

pub fn write_suite<W: Write, T: Scalar>(out: W, suite: &SuiteReport<T>) -> Result<()> {
    let mut w = writer(out, &SUITE_HEADER)?;
    for c in &suite.cells {
        w.serialize(SuiteRow {
            scenario: c.scenario.name().to_string(),
            policy: c.policy.name().to_string(),
            mean_cost: c.stats.mean_cost,
            std_cost: c.stats.std_cost,
            mean_service: c.stats.mean_service,
            std_service: c.stats.std_service,
            n: c.stats.n,
        })?;
    }
    finish(w)
}

pub fn read_suite<R: Read, T: Scalar>(input: R) -> Result<Vec<SuiteRow<T>>> {
    let mut r = csv::Reader::from_reader(input);
    let rows: Vec<SuiteRow<T>> = r.deserialize().collect::<std::result::Result<_, _>>()?;
    for row in &rows {
        row.scenario.parse::<DisruptionKind>()?;
        row.policy.parse::<PolicyKind>()?;
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierRow<T> {
    pub strategy: String,
    pub total_cost: T,
    pub service_level: T,
    pub cost_rating: String,
    pub speed_rating: String,
}

pub fn write_frontier<W: Write, T: Scalar>(out: W, points: &[FrontierPoint<T>]) -> Result<()> {
    let mut w = writer(out, &FRONTIER_HEADER)?;
    for p in points {
        w.serialize(FrontierRow {
            strategy: p.strategy_name.clone(),
            total_cost: p.total_cost,
            service_level: p.service_level,
            cost_rating: p.cost_rating.label().to_string(),
            speed_rating: p.speed_rating.label().to_string(),
        })?;
    }
    finish(w)
}

pub fn read_frontier<R: Read, T: Scalar>(input: R) -> Result<Vec<FrontierRow<T>>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub strategy: String,
    pub cost_rating: String,
    pub speed_rating: String,
}

impl EvaluationRow {
    pub fn ratings(&self) -> Option<(CostRating, SpeedRating)> {
        Some((
            CostRating::parse_label(&self.cost_rating)?,
            SpeedRating::parse_label(&self.speed_rating)?,
        ))
    }
}

pub fn write_evaluations<W: Write>(out: W, evals: &[Evaluation]) -> Result<()> {
    let mut w = writer(out, &EVALUATION_HEADER)?;
    for e in evals {
        w.serialize(EvaluationRow {
            strategy: e.strategy_name.clone(),
            cost_rating: e.cost.label().to_string(),
            speed_rating: e.speed.label().to_string(),
        })?;
    }
    finish(w)
}

pub fn read_evaluations<R: Read>(input: R) -> Result<Vec<EvaluationRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

/// Everything a command may write. Absent parts produce no file.
#[derive(Debug, Default)]
pub struct Outputs<'a, T> {
    pub trace: Option<&'a [DayRecord<T>]>,
    pub kpi: Option<&'a [KpiReport<T>]>,
    pub suite: Option<&'a SuiteReport<T>>,
    pub frontier: Option<&'a [FrontierPoint<T>]>,
    pub evaluations: Option<&'a [Evaluation]>,
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

/// Writes the present outputs into `out_dir` (created if needed) and returns
/// the written paths. Existing files are overwritten.
pub fn export_reports<T: Scalar>(outputs: &Outputs<'_, T>, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written = Vec::new();
    let mut emit = |name: &str, f: &dyn Fn(fs::File) -> Result<()>| -> Result<()> {
        let path = out_dir.join(name);
        f(create(&path)?)?;
        written.push(path);
        Ok(())
    };
    if let Some(t) = outputs.trace {
        emit("trace.csv", &|f| write_trace(f, t))?;
    }
    if let Some(k) = outputs.kpi {
        emit("kpi.csv", &|f| write_kpi(f, k))?;
    }
    if let Some(s) = outputs.suite {
        emit("suite.csv", &|f| write_suite(f, s))?;
    }
    if let Some(p) = outputs.frontier {
        emit("frontier.csv", &|f| write_frontier(f, p))?;
    }
    if let Some(e) = outputs.evaluations {
        emit("evaluations.csv", &|f| write_evaluations(f, e))?;
    }
    Ok(written)
}
