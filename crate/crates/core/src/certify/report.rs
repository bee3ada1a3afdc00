use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Certificate, CertifyError};
use crate::sampling::SpecKind;
use crate::stats::clopper_pearson;

/// Mean and population standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Self { mean, std: var.sqrt() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: String,
    pub kind: SpecKind,
    pub certificates: usize,
    pub lower: MeanStd,
    pub upper: MeanStd,
    pub accuracy: MeanStd,
    pub mean_width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    /// Plain-text table, one row per (model, kind).
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<24} {:<20} {:>5}  {:>15}  {:>15}  {:>15}  {:>7}\n",
            "model", "kind", "certs", "lower", "upper", "accuracy", "width"
        );
        let cell = |m: &MeanStd| format!("{:.3} ± {:.3}", m.mean, m.std);
        for r in &self.rows {
            out.push_str(&format!(
                "{:<24} {:<20} {:>5}  {:>15}  {:>15}  {:>15}  {:>7.3}\n",
                r.model,
                r.kind.as_str(),
                r.certificates,
                cell(&r.lower),
                cell(&r.upper),
                cell(&r.accuracy),
                r.mean_width
            ));
        }
        out
    }
}

/// Groups certificates by (model, kind) and summarizes each group.
pub fn aggregate(certs: &[Certificate]) -> Result<Summary, CertifyError> {
    if certs.is_empty() {
        return Err(CertifyError::EmptyInput);
    }
    let mut groups: BTreeMap<(String, SpecKind), Vec<&Certificate>> = BTreeMap::new();
    for c in certs {
        let name = match &c.model.mock {
            Some(mode) => format!("{}:{}", c.model.name, mode),
            None => c.model.name.clone(),
        };
        groups.entry((name, c.spec.kind)).or_default().push(c);
    }
    let rows = groups
        .into_iter()
        .map(|((model, kind), cs)| {
            let pick = |f: fn(&Certificate) -> f64| cs.iter().map(|c| f(c)).collect::<Vec<_>>();
            let widths = pick(|c| c.results.upper - c.results.lower);
            SummaryRow {
                model,
                kind,
                certificates: cs.len(),
                lower: MeanStd::of(&pick(|c| c.results.lower)),
                upper: MeanStd::of(&pick(|c| c.results.upper)),
                accuracy: MeanStd::of(&pick(|c| c.results.accuracy)),
                mean_width: widths.iter().sum::<f64>() / widths.len() as f64,
            }
        })
        .collect();
    Ok(Summary { rows })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopRow {
    pub hops: usize,
    pub n: usize,
    pub k: usize,
    pub accuracy: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Pools per-hop tallies over all certificates; empty buckets are omitted.
pub fn per_hop_report(certs: &[Certificate], delta: f64) -> Result<Vec<HopRow>, CertifyError> {
    let mut pooled: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for c in certs {
        for t in &c.results.per_hop {
            let e = pooled.entry(t.hops).or_default();
            e.0 += t.n;
            e.1 += t.k;
        }
    }
    pooled
        .into_iter()
        .filter(|(_, (n, _))| *n > 0)
        .map(|(hops, (n, k))| {
            let iv = clopper_pearson::<f64>(k as u64, n as u64, delta)?;
            Ok(HopRow { hops, n, k, accuracy: k as f64 / n as f64, lower: iv.lower, upper: iv.upper })
        })
        .collect()
}

/// Plain-text per-hop table.
pub fn hop_table(rows: &[HopRow]) -> String {
    let mut out = format!("{:>4} {:>7} {:>7} {:>9} {:>9} {:>9}\n", "hops", "n", "k", "accuracy", "lower", "upper");
    for r in rows {
        out.push_str(&format!(
            "{:>4} {:>7} {:>7} {:>9.4} {:>9.4} {:>9.4}\n",
            r.hops, r.n, r.k, r.accuracy, r.lower, r.upper
        ));
    }
    out
}
