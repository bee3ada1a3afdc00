use std::collections::BTreeSet;
use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    CertifyArgs, CliError, ExportArgs, ModelArgs, PivotsArgs, PreprocessArgs, ReportArgs, SpecArgs, ValidateMockArgs,
};
use crate::certify::{
    aggregate, certificate_file_name, certify, draw_instance, hop_table, per_hop_report, read_certificate,
    read_certificates, sample_log_file_name, write_atomic, write_certificate, write_sample_log, CertifyOptions,
};
use crate::fixtures::toy_raw;
use crate::kg::io::{read_graph, write_graph};
use crate::kg::raw::default_banned;
use crate::kg::{parse_raw_dataset, preprocess as build, KnowledgeGraph, NodeId, ParseMode, ParseReport, RawPaths};
use crate::model::{mock_seed_for, HttpModel, MockMode, MockModel, Model, ModelEndpoint};
use crate::prompting::{write_prompt_record, PromptRecord};
use crate::sampling::{
    extract_subgraph, read_pivots, select_pivots, write_pivots, DistractorMode, PivotCriteria, SpecConfig, SpecKind,
};
use crate::seed::derive_rng;

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::io(format!("{}: {e}", path.display()))
}

fn load_graph(path: &Path) -> Result<KnowledgeGraph, CliError> {
    let file = fs::File::open(path).map_err(|e| io_error(path, e))?;
    read_graph(BufReader::new(file)).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report values serialize");
    bytes.push(b'\n');
    write_atomic(path, &bytes).map_err(CliError::from)
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

#[derive(Serialize)]
struct PreprocessReport {
    parse: ParseReport,
    build: crate::kg::BuildStats,
}

pub(super) fn preprocess(a: PreprocessArgs) -> Result<(), CliError> {
    let (raw, parse) = if a.toy {
        (toy_raw(), ParseReport::default())
    } else {
        let pick = |explicit: &Option<PathBuf>, name: &str| -> Result<PathBuf, CliError> {
            match (explicit, &a.raw_dir) {
                (Some(p), _) => Ok(p.clone()),
                (None, Some(dir)) => Ok(dir.join(name)),
                (None, None) => {
                    Err(CliError::usage(format!("missing input: pass --raw-dir, --toy or the {name} path")))
                }
            }
        };
        let paths = RawPaths {
            triples: pick(&a.triples, "triples.tsv")?,
            entity_aliases: pick(&a.entity_aliases, "entity_aliases.tsv")?,
            relation_aliases: pick(&a.relation_aliases, "relation_aliases.tsv")?,
            corpus: pick(&a.corpus, "corpus.tsv")?,
        };
        let mode = if a.strict { ParseMode::Strict } else { ParseMode::Lenient };
        parse_raw_dataset(&paths, mode)?
    };
    let banned: BTreeSet<String> = match a.banned {
        Some(list) => list.into_iter().map(|s| s.trim().to_owned()).filter(|s| !s.is_empty()).collect(),
        None => default_banned(),
    };
    let (graph, stats) = build(raw, &banned)?;

    let mut buf = Vec::new();
    write_graph(&graph, &mut buf)?;
    write_atomic(&a.out, &buf)?;

    let report = serde_json::to_string_pretty(&PreprocessReport { parse, build: stats }).expect("stats serialize");
    println!("{report}");
    if let Some(path) = a.stats {
        write_atomic(&path, format!("{report}\n").as_bytes())?;
    }
    Ok(())
}

pub(super) fn pivots(a: PivotsArgs) -> Result<(), CliError> {
    let graph = load_graph(&a.graph)?;
    let criteria = PivotCriteria { top_k: a.top_k, min_subgraph_size: a.min_subgraph_size, radius: a.max_hops };
    let chosen = select_pivots(&graph, a.count, &criteria, &mut derive_rng(a.seed, &[]))?;
    let mut buf = Vec::new();
    write_pivots(&chosen, &mut buf).expect("writing to memory");
    write_atomic(&a.out, &buf)?;
    eprintln!("wrote {} pivots to {}", chosen.len(), a.out.display());
    Ok(())
}

/// Optional defaults read from `--config`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    max_hops: Option<usize>,
    n_samples: Option<usize>,
    confidence: Option<f64>,
    seed: Option<u64>,
    few_shot_count: Option<usize>,
    distractor_mode: Option<DistractorMode>,
    min_num_options: Option<usize>,
    token_budget: Option<usize>,
    endpoint: Option<ModelEndpoint>,
}

fn read_config(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else { return Ok(FileConfig::default()) };
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Spec template with flags taking precedence over the config file.
fn resolve_spec(args: &SpecArgs, file: &FileConfig, pivot: NodeId, kind: SpecKind) -> Result<SpecConfig, CliError> {
    let mut spec = SpecConfig::new(pivot, kind);
    macro_rules! pick {
        ($field:ident, $flag:ident, $key:ident) => {
            if let Some(v) = args.$flag.clone().or(file.$key.clone()) {
                spec.$field = v;
            }
        };
    }
    pick!(max_hops, max_hops, max_hops);
    pick!(n_samples, n_samples, n_samples);
    pick!(confidence, confidence, confidence);
    pick!(seed, seed, seed);
    pick!(few_shot_count, few_shot, few_shot_count);
    pick!(distractor_mode, distractor_mode, distractor_mode);
    pick!(min_num_options, min_options, min_num_options);
    pick!(token_budget, token_budget, token_budget);
    spec.validate()?;
    Ok(spec)
}

enum ModelChoice {
    Mock(MockMode),
    Http(Arc<HttpModel>),
}

impl ModelChoice {
    fn for_spec(&self, spec: &SpecConfig) -> Result<Arc<dyn Model>, CliError> {
        Ok(match self {
            ModelChoice::Mock(mode) => Arc::new(MockModel::new(mode.clone(), mock_seed_for(spec))?),
            ModelChoice::Http(m) => m.clone(),
        })
    }

    fn max_in_flight(&self) -> Option<usize> {
        match self {
            ModelChoice::Mock(_) => None,
            ModelChoice::Http(m) => Some(m.endpoint().max_in_flight),
        }
    }
}

fn resolve_model(args: &ModelArgs, file: &FileConfig) -> Result<ModelChoice, CliError> {
    if let Some(mode) = args.model.strip_prefix("mock:") {
        return Ok(ModelChoice::Mock(mode.parse()?));
    }
    if args.model != "http" {
        return Err(CliError::usage(format!("unknown model `{}` (expected mock:<mode> or http)", args.model)));
    }
    let mut ep = file.endpoint.clone().unwrap_or_default();
    if let Some(v) = &args.base_url {
        ep.base_url = v.clone();
    }
    if let Some(v) = &args.model_name {
        ep.model_name = v.clone();
    }
    if let Some(v) = &args.api_key_env {
        ep.api_key_env = v.clone();
    }
    if let Some(v) = args.temperature {
        ep.temperature = v;
    }
    if let Some(v) = args.max_tokens {
        ep.max_tokens = v;
    }
    if let Some(v) = args.timeout {
        ep.timeout = std::time::Duration::try_from_secs_f64(v)
            .map_err(|_| CliError::usage("--timeout must be a non-negative number of seconds"))?;
    }
    if let Some(v) = args.max_retries {
        ep.max_retries = v;
    }
    if args.rate_limit.is_some() {
        ep.rate_limit = args.rate_limit;
    }
    Ok(ModelChoice::Http(Arc::new(HttpModel::new(ep)?)))
}

fn created_at(flag: Option<String>) -> Result<String, CliError> {
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Ok(epoch) = std::env::var("SOURCE_DATE_EPOCH") {
        let secs: i64 = epoch.trim().parse().map_err(|_| CliError::usage("SOURCE_DATE_EPOCH must be an integer"))?;
        let t = chrono::DateTime::from_timestamp(secs, 0)
            .ok_or_else(|| CliError::usage("SOURCE_DATE_EPOCH out of range"))?;
        return Ok(t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    }
    Ok(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

fn load_pivots(file: Option<&Path>, listed: &[String]) -> Result<Vec<NodeId>, CliError> {
    let mut out: Vec<NodeId> = Vec::new();
    if let Some(path) = file {
        let f = fs::File::open(path).map_err(|e| io_error(path, e))?;
        out = read_pivots(BufReader::new(f)).map_err(|e| io_error(path, e))?;
    }
    out.extend(listed.iter().map(|s| NodeId::new(s.as_str())));
    if out.is_empty() {
        return Err(CliError::validation("no pivots given"));
    }
    Ok(out)
}

pub(super) fn certify_cmd(a: CertifyArgs) -> Result<(), CliError> {
    let file = read_config(a.spec.config.as_deref())?;
    let graph = load_graph(&a.graph)?;
    let pivots = load_pivots(a.pivots.as_deref(), &a.pivot)?;
    let kinds: Vec<SpecKind> = if a.kind.is_empty() { SpecKind::ALL.to_vec() } else { a.kind.clone() };
    // Resolve everything up front so bad input fails before any model call.
    let mut specs = Vec::new();
    for p in &pivots {
        if !graph.contains(p) {
            return Err(CliError::validation(format!("pivot {p} is not in the graph")));
        }
        for &k in &kinds {
            specs.push(resolve_spec(&a.spec, &file, p.clone(), k)?);
        }
    }
    let choice = resolve_model(&a.model, &file)?;
    let created = created_at(a.created_at)?;
    let threads = match choice.max_in_flight() {
        Some(limit) if a.jobs == 0 || a.jobs > limit => limit,
        _ => a.jobs,
    };
    create_dir(&a.out)?;

    for spec in &specs {
        let model = choice.for_spec(spec)?;
        let cert_path = a.out.join(certificate_file_name(spec));
        if !a.force && cert_path.exists() {
            if let Ok(existing) = read_certificate(&cert_path) {
                if !existing.incomplete && existing.spec == *spec && existing.model == model.descriptor() {
                    eprintln!("{}: up to date", cert_path.display());
                    continue;
                }
            }
        }
        let log_name = sample_log_file_name(spec);
        let opts = CertifyOptions {
            threads,
            created_at: created.clone(),
            sample_log: Some(log_name.clone()),
            ..CertifyOptions::default()
        };
        let (cert, records) = certify(&graph, spec, model.as_ref(), &opts)?;
        write_sample_log(&a.out.join(&log_name), &records)?;
        write_certificate(&cert_path, &cert)?;
        let r = &cert.results;
        println!(
            "{} {}: k={}/{} accuracy={:.4} interval=[{:.4}, {:.4}]",
            spec.pivot, spec.kind, r.k, r.n, r.accuracy, r.lower, r.upper
        );
    }
    Ok(())
}

pub(super) fn report(a: ReportArgs) -> Result<(), CliError> {
    let certs = read_certificates(&a.certs)?;
    let summary = aggregate(&certs)?;
    let delta = 1.0 - a.confidence;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CliError::usage("--confidence must lie strictly between 0 and 1"));
    }
    let hops = per_hop_report(&certs, delta)?;
    let out = a.out.unwrap_or_else(|| a.certs.clone());
    create_dir(&out)?;
    write_json(&out.join("summary.json"), &summary)?;
    write_json(&out.join("per_hop.json"), &hops)?;
    print!("{}\n{}", summary.to_table(), hop_table(&hops));
    Ok(())
}

#[derive(Debug, Serialize)]
struct CoverageReport {
    runs: usize,
    p: f64,
    n_samples: usize,
    delta: f64,
    pivot: NodeId,
    kind: SpecKind,
    covered: usize,
    coverage: f64,
    target: f64,
    mean_width: f64,
}

fn default_pivot(graph: &KnowledgeGraph) -> Result<NodeId, CliError> {
    graph
        .node_ids()
        .max_by(|a, b| graph.out_degree(a).cmp(&graph.out_degree(b)).then_with(|| b.cmp(a)))
        .cloned()
        .ok_or_else(|| CliError::validation("graph has no nodes"))
}

pub(super) fn validate_mock(a: ValidateMockArgs) -> Result<(), CliError> {
    if a.runs == 0 {
        return Err(CliError::usage("--runs must be positive"));
    }
    let graph = match &a.graph {
        Some(path) => load_graph(path)?,
        None => crate::fixtures::toy_graph().0,
    };
    let pivot = match &a.pivot {
        Some(p) => NodeId::new(p.as_str()),
        None => default_pivot(&graph)?,
    };
    let mut spec = SpecConfig::new(pivot.clone(), a.kind);
    spec.n_samples = a.n_samples;
    spec.confidence = 1.0 - a.delta;
    spec.validate()?;
    let mode = MockMode::FixedAccuracy(a.p);

    let mut covered = 0;
    let mut width_sum = 0.0;
    for r in 0..a.runs {
        spec.seed = a.seed.wrapping_add(r as u64);
        let model = MockModel::new(mode.clone(), mock_seed_for(&spec))?;
        let opts = CertifyOptions { threads: a.jobs, ..CertifyOptions::default() };
        let (cert, _) = certify(&graph, &spec, &model, &opts)?;
        let res = &cert.results;
        covered += usize::from(res.lower <= a.p && a.p <= res.upper);
        width_sum += res.upper - res.lower;
    }
    let report = CoverageReport {
        runs: a.runs,
        p: a.p,
        n_samples: a.n_samples,
        delta: a.delta,
        pivot,
        kind: a.kind,
        covered,
        coverage: covered as f64 / a.runs as f64,
        target: 1.0 - a.delta,
        mean_width: width_sum / a.runs as f64,
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{text}");
    if let Some(path) = &a.out {
        write_atomic(path, format!("{text}\n").as_bytes())?;
    }
    if report.coverage < report.target {
        return Err(CliError::validation(format!("coverage {:.4} below target {:.4}", report.coverage, report.target)));
    }
    Ok(())
}

pub(super) fn export_prompts(a: ExportArgs) -> Result<(), CliError> {
    let file = read_config(a.spec.config.as_deref())?;
    let graph = load_graph(&a.graph)?;
    let spec = resolve_spec(&a.spec, &file, NodeId::new(a.pivot.as_str()), a.kind)?;
    let sub = extract_subgraph(&graph, &spec.pivot, spec.max_hops)?;
    let mut out = BufWriter::new(Vec::new());
    for i in 0..spec.n_samples {
        let (instance, _) = draw_instance(&sub, &spec, i, CertifyOptions::default().max_redraws)?;
        write_prompt_record(&PromptRecord::new(&spec, i, &instance.prompt), &mut out).expect("writing to memory");
    }
    out.flush().expect("writing to memory");
    write_atomic(&a.out, &out.into_inner().expect("in-memory buffer"))?;
    Ok(())
}
