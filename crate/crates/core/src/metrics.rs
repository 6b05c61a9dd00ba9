//! Change indicators and robustness rates.
//!
//! Every rate is a mean of per-input means, computed exactly with big
//! rationals; [`Rate`] serializes as a float.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use log::warn;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::harness::{MetricValue, MetricVector, ResultTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    Change,
    NoChange,
}

/// How two metric values are compared. Missing vs missing is never a change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonPolicy {
    /// Absolute tolerance for numeric metrics; absent ids compare exactly.
    pub numeric_tolerance: BTreeMap<String, f64>,
    pub missing_vs_present: MissingPolicy,
}

impl Default for ComparisonPolicy {
    fn default() -> Self {
        ComparisonPolicy {
            numeric_tolerance: BTreeMap::new(),
            missing_vs_present: MissingPolicy::Change,
        }
    }
}

impl ComparisonPolicy {
    fn changed(&self, id: &str, base: MetricValue, variant: MetricValue) -> bool {
        use MetricValue::*;
        match (base, variant) {
            (Missing, Missing) => false,
            (Missing, _) | (_, Missing) => self.missing_vs_present == MissingPolicy::Change,
            (Bool(a), Bool(b)) => a != b,
            (Num(a), Num(b)) => (a - b).abs() > self.numeric_tolerance.get(id).copied().unwrap_or(0.0),
            _ => true,
        }
    }
}

/// Per-metric change flags and their OR.
pub fn change_indicator(
    base: &MetricVector,
    variant: &MetricVector,
    policy: &ComparisonPolicy,
) -> Result<(Vec<bool>, bool)> {
    if base.ids() != variant.ids() {
        return Err(Error::MetricSetMismatch(format!(
            "{:?} vs {:?}",
            base.ids(),
            variant.ids()
        )));
    }
    let deltas: Vec<bool> = base
        .0
        .iter()
        .zip(&variant.0)
        .map(|((id, a), (_, b))| policy.changed(id, *a, *b))
        .collect();
    let any = deltas.iter().any(|d| *d);
    Ok((deltas, any))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeRow {
    pub i: usize,
    pub j: usize,
    pub method_id: String,
    pub category: String,
    pub deltas: Vec<bool>,
    pub any: bool,
}

/// Change rows for every perturbed record whose group has an original row.
pub fn change_rows(table: &ResultTable, policy: &ComparisonPolicy) -> Result<Vec<ChangeRow>> {
    let vector = |values: &[MetricValue]| {
        MetricVector(table.metric_ids.iter().cloned().zip(values.iter().copied()).collect())
    };
    let mut bases = BTreeMap::new();
    for r in table.rows.iter().filter(|r| r.j == 0) {
        if r.values.len() != table.metric_ids.len() {
            return Err(Error::MetricSetMismatch(format!("row ({}, 0) has {} values", r.i, r.values.len())));
        }
        bases.insert(r.i, vector(&r.values));
    }
    let mut out = Vec::new();
    for r in table.rows.iter().filter(|r| r.j > 0) {
        let Some(base) = bases.get(&r.i) else {
            warn!("group {} has no original row; ({}, {}) ignored", r.i, r.i, r.j);
            continue;
        };
        let (deltas, any) = change_indicator(base, &vector(&r.values), policy)?;
        out.push(ChangeRow {
            i: r.i,
            j: r.j,
            method_id: r.method_id.clone(),
            category: r.category.clone(),
            deltas,
            any,
        });
    }
    Ok(out)
}

/// An exact rate in [0, 1].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Rate(pub BigRational);

impl Rate {
    pub fn zero() -> Self {
        Rate(BigRational::zero())
    }

    pub fn ratio(num: usize, den: usize) -> Self {
        Rate(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// `p/q` in lowest terms.
    pub fn exact(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.to_f64())
    }
}

impl Serialize for Rate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

fn mean(values: impl IntoIterator<Item = BigRational>) -> BigRational {
    let mut sum = BigRational::zero();
    let mut n = 0usize;
    for v in values {
        sum += v;
        n += 1;
    }
    if n == 0 {
        sum
    } else {
        sum / BigRational::from_integer(BigInt::from(n))
    }
}

/// Rates conditional on a method or category `key`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalRate {
    pub key: String,
    /// Category of a method; `None` on category rows.
    pub category: Option<String>,
    /// |I_D|: inputs with at least one variant from this method or category.
    pub inputs: usize,
    /// Total number of variants from this method or category.
    pub variants: usize,
    pub any: Rate,
    pub per_metric: Vec<Rate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputRate {
    pub i: usize,
    /// n(i)
    pub variants: usize,
    pub any: Rate,
    pub per_metric: Vec<Rate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessAggregate {
    pub metric_ids: Vec<String>,
    /// N: inputs with at least one variant.
    pub inputs: usize,
    pub per_metric: Vec<Rate>,
    pub any: Rate,
    pub per_method: Vec<ConditionalRate>,
    pub per_category: Vec<ConditionalRate>,
    pub per_input: Vec<InputRate>,
}

impl RobustnessAggregate {
    pub fn method(&self, id: &str) -> Option<&ConditionalRate> {
        self.per_method.iter().find(|r| r.key == id)
    }

    pub fn category(&self, id: &str) -> Option<&ConditionalRate> {
        self.per_category.iter().find(|r| r.key == id)
    }

    pub fn metric(&self, id: &str) -> Option<&Rate> {
        self.metric_ids.iter().position(|m| m == id).map(|k| &self.per_metric[k])
    }
}

/// n(i) counted from the rows themselves.
pub fn group_sizes(rows: &[ChangeRow]) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for r in rows {
        *out.entry(r.i).or_insert(0) += 1;
    }
    out
}

fn conditional(
    rows: &[ChangeRow],
    m: usize,
    key_of: impl Fn(&ChangeRow) -> &str,
) -> BTreeMap<String, (usize, usize, BigRational, Vec<BigRational>)> {
    // key -> i -> (v(i), changes, per-metric changes)
    let mut acc: BTreeMap<String, BTreeMap<usize, (usize, usize, Vec<usize>)>> = BTreeMap::new();
    for r in rows {
        let e = acc
            .entry(key_of(r).to_string())
            .or_default()
            .entry(r.i)
            .or_insert((0, 0, vec![0; m]));
        e.0 += 1;
        e.1 += r.any as usize;
        for (k, d) in r.deltas.iter().enumerate() {
            e.2[k] += *d as usize;
        }
    }
    acc.into_iter()
        .map(|(key, per_i)| {
            let inputs = per_i.len();
            let variants = per_i.values().map(|e| e.0).sum();
            let any = mean(per_i.values().map(|e| Rate::ratio(e.1, e.0).0));
            let per_metric = (0..m)
                .map(|k| mean(per_i.values().map(|e| Rate::ratio(e.2[k], e.0).0)))
                .collect();
            (key, (inputs, variants, any, per_metric))
        })
        .collect()
}

/// Aggregate change rows. `sizes` gives n(i) per group (missing groups use
/// the row count); groups with n(i) = 0 are left out.
pub fn aggregate(
    rows: &[ChangeRow],
    metric_ids: &[String],
    sizes: &BTreeMap<usize, usize>,
) -> Result<RobustnessAggregate> {
    let m = metric_ids.len();
    if let Some(bad) = rows.iter().find(|r| r.deltas.len() != m) {
        return Err(Error::MetricSetMismatch(format!(
            "row ({}, {}) has {} indicators, expected {m}",
            bad.i,
            bad.j,
            bad.deltas.len()
        )));
    }
    let counted = group_sizes(rows);
    let groups: BTreeSet<usize> = sizes.keys().chain(counted.keys()).copied().collect();
    let mut per_input = Vec::new();
    for i in groups {
        let n = sizes.get(&i).copied().unwrap_or(0).max(counted.get(&i).copied().unwrap_or(0));
        if n == 0 {
            continue;
        }
        let mine: Vec<&ChangeRow> = rows.iter().filter(|r| r.i == i).collect();
        per_input.push(InputRate {
            i,
            variants: n,
            any: Rate::ratio(mine.iter().filter(|r| r.any).count(), n),
            per_metric: (0..m)
                .map(|k| Rate::ratio(mine.iter().filter(|r| r.deltas[k]).count(), n))
                .collect(),
        });
    }
    if per_input.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let any = Rate(mean(per_input.iter().map(|p| p.any.0.clone())));
    let per_metric = (0..m)
        .map(|k| Rate(mean(per_input.iter().map(|p| p.per_metric[k].0.clone()))))
        .collect();

    let category_of: BTreeMap<&str, &str> =
        rows.iter().map(|r| (r.method_id.as_str(), r.category.as_str())).collect();
    let build = |map: BTreeMap<String, (usize, usize, BigRational, Vec<BigRational>)>, methods: bool| {
        map.into_iter()
            .map(|(key, (inputs, variants, any, pm))| ConditionalRate {
                category: methods.then(|| category_of.get(key.as_str()).unwrap_or(&"").to_string()),
                key,
                inputs,
                variants,
                any: Rate(any),
                per_metric: pm.into_iter().map(Rate).collect(),
            })
            .collect::<Vec<_>>()
    };
    let per_method = build(conditional(rows, m, |r| &r.method_id), true);
    let per_category = build(conditional(rows, m, |r| &r.category), false);

    Ok(RobustnessAggregate {
        metric_ids: metric_ids.to_vec(),
        inputs: per_input.len(),
        per_metric,
        any,
        per_method,
        per_category,
        per_input,
    })
}
