//! Prime scans: specialize one point at every prime up to a bound, classify
//! the resulting classes and summarize.
//!
//! Rows are computed independently (optionally on a worker pool) and always
//! emitted in increasing `p`, so reports are identical for any worker count.

use std::collections::BTreeMap;
use std::io;

use num_bigint::BigInt;
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith;
use crate::elliptic::{Curve, CurveError, Point};
use crate::quadforms::QuadForm;
use crate::specialize::{
    self, class_verdict_with, specialize_point, SpecStatus, SpecializeError, SpecializeOptions,
    VerdictOptions,
};

/// Bit-exact CSV header.
pub const CSV_HEADER: [&str; 17] = [
    "p",
    "d",
    "d_factorization",
    "squarefree",
    "fundamental_discriminant",
    "A",
    "B",
    "form_a",
    "form_b",
    "form_c",
    "h_narrow",
    "h_wide",
    "class_order_order",
    "class_order_maximal",
    "nontrivial",
    "status",
    "flags",
];

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("point has finite order {0}; pass allow_torsion to scan anyway")]
    TorsionPoint(u32),
    #[error("cannot scan the point at infinity")]
    PointAtInfinity,
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Specialize(#[from] SpecializeError),
    #[error("summary counts {counted} do not partition {considered} primes")]
    SummaryMismatch { counted: u64, considered: u64 },
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOptions {
    pub order_mode: bool,
    pub jobs: usize,
    pub allow_torsion: bool,
    /// Recorded in metadata only; no computation uses it.
    pub aux_point: Option<Point>,
    pub class_number_limit: BigInt,
    pub rho_budget: u64,
    pub order_budget: u64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            order_mode: false,
            jobs: 1,
            allow_torsion: false,
            aux_point: None,
            class_number_limit: BigInt::from(specialize::DEFAULT_CLASS_NUMBER_LIMIT),
            rho_budget: arith::DEFAULT_RHO_BUDGET,
            order_budget: specialize::DEFAULT_ORDER_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRow {
    pub p: u64,
    pub d: BigInt,
    pub d_factorization: Option<String>,
    pub squarefree: Option<bool>,
    pub fundamental_discriminant: Option<BigInt>,
    pub a_value: Option<BigInt>,
    pub root: Option<BigInt>,
    pub form: Option<QuadForm>,
    pub h_narrow: Option<u64>,
    pub h_wide: Option<u64>,
    pub class_order_order: Option<u64>,
    pub class_order_maximal: Option<u64>,
    pub nontrivial: Option<bool>,
    pub status: SpecStatus,
    pub flags: specialize::PrimeFlags,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ScanSummary {
    pub primes_considered: u64,
    pub ok_count: u64,
    /// Count per non-Ok status, every status listed.
    pub skipped: BTreeMap<SpecStatus, u64>,
    pub nontrivial_count: u64,
    pub nontrivial_primes: Vec<u64>,
    pub min_h_wide: Option<u64>,
    pub max_h_wide: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanMetadata {
    pub a: BigInt,
    pub b: BigInt,
    pub point: Point,
    pub p_max: u64,
    pub order_mode: bool,
    pub allow_torsion: bool,
    pub torsion_order: Option<u32>,
    pub aux_point: Option<Point>,
    pub class_number_limit: BigInt,
    pub primality: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub summary: ScanSummary,
    pub metadata: ScanMetadata,
}

fn primes_up_to(p_max: u64) -> Vec<u64> {
    (3..=p_max)
        .filter(|&p| arith::is_prime(&BigInt::from(p)))
        .collect()
}

/// Specializes `point` at every prime `3 ≤ p ≤ p_max`.
pub fn scan(
    curve: &Curve,
    point: &Point,
    p_max: u64,
    options: &ScanOptions,
) -> Result<ScanReport, ScanError> {
    if point.is_infinity() {
        return Err(ScanError::PointAtInfinity);
    }
    let torsion_order = curve.torsion_order(point)?;
    if let (Some(order), false) = (torsion_order, options.allow_torsion) {
        return Err(ScanError::TorsionPoint(order));
    }
    let canonical = curve.canonicalize(point)?;
    let spec_options = SpecializeOptions {
        order_mode: options.order_mode,
        rho_budget: options.rho_budget,
    };
    let verdict_options = VerdictOptions {
        class_number_limit: options.class_number_limit.clone(),
        order_budget: options.order_budget,
    };
    let row_for = |p: &u64| -> Result<ScanRow, ScanError> {
        let result = specialize_point(curve, &canonical, &BigInt::from(*p), &spec_options)?;
        let verdict = if result.status == SpecStatus::Ok {
            Some(class_verdict_with(&result, &verdict_options)?)
        } else {
            None
        };
        let class_number = verdict.as_ref().and_then(|v| v.class_number);
        Ok(ScanRow {
            p: *p,
            d: result.d,
            d_factorization: result.d_factorization.map(|f| f.to_string()),
            squarefree: result.squarefree,
            fundamental_discriminant: result.fundamental_discriminant,
            a_value: result.a_value,
            root: result.root,
            form: result.form,
            h_narrow: class_number.map(|h| h.narrow),
            h_wide: class_number.map(|h| h.wide),
            class_order_order: verdict.as_ref().and_then(|v| v.order_in_order),
            class_order_maximal: verdict.as_ref().and_then(|v| v.order_in_maximal),
            nontrivial: verdict.as_ref().map(|v| v.nontrivial),
            status: result.status,
            flags: result.flags,
        })
    };

    let primes = primes_up_to(p_max);
    let rows = run_rows(&primes, options.jobs, row_for)?;
    let summary = summarize(&rows);
    let counted = summary.ok_count + summary.skipped.values().sum::<u64>();
    if counted != summary.primes_considered {
        return Err(ScanError::SummaryMismatch {
            counted,
            considered: summary.primes_considered,
        });
    }
    Ok(ScanReport {
        rows,
        summary,
        metadata: ScanMetadata {
            a: curve.a().clone(),
            b: curve.b().clone(),
            point: point.clone(),
            p_max,
            order_mode: options.order_mode,
            allow_torsion: options.allow_torsion,
            torsion_order,
            aux_point: options.aux_point.clone(),
            class_number_limit: options.class_number_limit.clone(),
            primality: arith::primality_policy(),
        },
    })
}

#[cfg(feature = "parallel")]
fn run_rows<F>(primes: &[u64], jobs: usize, row_for: F) -> Result<Vec<ScanRow>, ScanError>
where
    F: Fn(&u64) -> Result<ScanRow, ScanError> + Sync + Send,
{
    use rayon::prelude::*;
    if jobs <= 1 {
        return primes.iter().map(row_for).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| ScanError::Pool(e.to_string()))?;
    pool.install(|| primes.par_iter().map(row_for).collect())
}

#[cfg(not(feature = "parallel"))]
fn run_rows<F>(primes: &[u64], _jobs: usize, row_for: F) -> Result<Vec<ScanRow>, ScanError>
where
    F: Fn(&u64) -> Result<ScanRow, ScanError>,
{
    primes.iter().map(row_for).collect()
}

pub fn summarize(rows: &[ScanRow]) -> ScanSummary {
    let mut summary = ScanSummary {
        skipped: SpecStatus::ALL
            .iter()
            .filter(|s| **s != SpecStatus::Ok)
            .map(|s| (*s, 0))
            .collect(),
        ..Default::default()
    };
    for row in rows {
        summary.primes_considered += 1;
        if row.status == SpecStatus::Ok {
            summary.ok_count += 1;
        } else {
            *summary.skipped.entry(row.status).or_default() += 1;
        }
        if row.nontrivial == Some(true) {
            summary.nontrivial_count += 1;
            summary.nontrivial_primes.push(row.p);
        }
        if let Some(h) = row.h_wide {
            summary.min_h_wide = Some(summary.min_h_wide.map_or(h, |m| m.min(h)));
            summary.max_h_wide = Some(summary.max_h_wide.map_or(h, |m| m.max(h)));
        }
    }
    summary
}

fn cell<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl ScanRow {
    fn csv_record(&self) -> [String; 17] {
        let form = |pick: fn(&QuadForm) -> &BigInt| {
            self.form
                .as_ref()
                .map(|f| pick(f).to_string())
                .unwrap_or_default()
        };
        [
            self.p.to_string(),
            self.d.to_string(),
            cell(&self.d_factorization),
            cell(&self.squarefree),
            cell(&self.fundamental_discriminant),
            cell(&self.a_value),
            cell(&self.root),
            form(QuadForm::a),
            form(QuadForm::b),
            form(QuadForm::c),
            cell(&self.h_narrow),
            cell(&self.h_wide),
            cell(&self.class_order_order),
            cell(&self.class_order_maximal),
            cell(&self.nontrivial),
            self.status.to_string(),
            self.flags.to_string(),
        ]
    }

    pub fn to_json(&self) -> Value {
        let s = |v: &Option<String>| v.clone().map_or(Value::Null, Value::String);
        let n = |v: Option<u64>| v.map_or(Value::Null, |x| Value::String(x.to_string()));
        json!({
            "p": self.p.to_string(),
            "d": self.d.to_string(),
            "d_factorization": s(&self.d_factorization),
            "squarefree": self.squarefree,
            "fundamental_discriminant": s(&self.fundamental_discriminant.as_ref().map(|v| v.to_string())),
            "A": s(&self.a_value.as_ref().map(|v| v.to_string())),
            "B": s(&self.root.as_ref().map(|v| v.to_string())),
            "form": self.form.as_ref().map(specialize::form_json),
            "h_narrow": n(self.h_narrow),
            "h_wide": n(self.h_wide),
            "class_order_order": n(self.class_order_order),
            "class_order_maximal": n(self.class_order_maximal),
            "nontrivial": self.nontrivial,
            "status": self.status.as_str(),
            "flags": self.flags.to_string(),
        })
    }
}

/// Writes the header and one record per row.
pub fn write_csv<W: io::Write>(rows: &[ScanRow], out: W) -> Result<(), ScanError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.write_record(row.csv_record())?;
    }
    writer.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[ScanRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

impl ScanSummary {
    pub fn to_json(&self) -> Value {
        let skipped: serde_json::Map<String, Value> = self
            .skipped
            .iter()
            .map(|(s, c)| (s.as_str().to_string(), Value::String(c.to_string())))
            .collect();
        let opt = |v: Option<u64>| v.map_or(Value::Null, |x| Value::String(x.to_string()));
        json!({
            "primes_considered": self.primes_considered.to_string(),
            "ok_count": self.ok_count.to_string(),
            "skipped": skipped,
            "nontrivial_count": self.nontrivial_count.to_string(),
            "nontrivial_primes": self.nontrivial_primes.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "min_h_wide": opt(self.min_h_wide),
            "max_h_wide": opt(self.max_h_wide),
        })
    }
}

impl ScanMetadata {
    pub fn to_json(&self) -> Value {
        json!({
            "a": self.a.to_string(),
            "b": self.b.to_string(),
            "point": self.point.to_string(),
            "p_max": self.p_max.to_string(),
            "order_mode": self.order_mode,
            "allow_torsion": self.allow_torsion,
            "torsion_order": self.torsion_order.map(|o| o.to_string()),
            "aux_point": self.aux_point.as_ref().map(|p| p.to_string()),
            "class_number_limit": self.class_number_limit.to_string(),
            "primality": self.primality,
        })
    }
}

impl ScanReport {
    /// A JSON array: one object per row, then the summary (with metadata).
    pub fn to_json(&self) -> Value {
        let mut items: Vec<Value> = self.rows.iter().map(ScanRow::to_json).collect();
        let mut summary = self.summary.to_json();
        summary["summary"] = Value::Bool(true);
        summary["metadata"] = self.metadata.to_json();
        items.push(summary);
        Value::Array(items)
    }

    pub fn to_csv(&self) -> String {
        to_csv_string(&self.rows)
    }
}
