//! Sweep orchestration: per-instance pipelines, deterministic CSV/JSON/SVG
//! emission, and falsification reporting.
//!
//! Instances run concurrently, but every output collection is sorted by its
//! instance key before writing, so parallelism never changes a byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use dirmax_core::{
    enumerate_family, gen_field, maximal_fn, weak_type_constant, CoveringReport,
    Dyadic, FamilySpec, FieldGenSpec, ForestAnalysis, OneVarField, Rat, Selection,
};

use crate::config::ExperimentConfig;
use crate::render;

/// Exact rational as `p/q` (or an integer when the denominator is 1).
pub fn rat_str(r: &Rat) -> String {
    if *r.denom() == 1.into() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn dy_str(d: Dyadic) -> String {
    rat_str(&d.to_rat())
}

fn file_tag(s: &str) -> String {
    s.replace('/', "_")
}

/// The fixed column set of `sweep.csv`, in order.
pub const SWEEP_CSV_COLUMNS: [&str; 22] = [
    "record",
    "field",
    "n",
    "delta",
    "q",
    "p",
    "lambda",
    "test_fn",
    "count_r1",
    "count_r2",
    "sum_r1_area",
    "union_r2_area",
    "q_integral",
    "ratio_union",
    "ratio_q_normalized",
    "measure_E_lambda",
    "f_norm_p",
    "constant",
    "carleson_ratio",
    "bmo_sup",
    "h_mass",
    "falsification_count",
];

#[derive(Clone, Default, Debug)]
pub struct CsvRow {
    pub cells: BTreeMap<&'static str, String>,
}

impl CsvRow {
    fn new(record: &str, field: &str, n: u32, delta: Dyadic) -> CsvRow {
        let mut row = CsvRow::default();
        row.set("record", record.to_string());
        row.set("field", field.to_string());
        row.set("n", n.to_string());
        row.set("delta", delta.to_string());
        row
    }

    fn set(&mut self, col: &'static str, value: String) {
        assert!(SWEEP_CSV_COLUMNS.contains(&col), "unknown column {col}");
        self.cells.insert(col, value);
    }

    fn line(&self) -> String {
        SWEEP_CSV_COLUMNS
            .iter()
            .map(|c| self.cells.get(c).cloned().unwrap_or_default())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn sort_key(&self) -> String {
        self.line()
    }
}

/// The covering-report document, with exact values as fraction strings.
#[derive(Serialize)]
pub struct CoveringReportDoc {
    pub n: u32,
    pub delta: String,
    pub q: u32,
    pub count_r1: usize,
    pub count_r2: usize,
    pub sum_r1_area: String,
    pub union_r2_area: String,
    pub q_integral: String,
    pub ratio_union: String,
    pub ratio_q_normalized: String,
    pub falsifications: Vec<dirmax_core::Falsification>,
}

impl CoveringReportDoc {
    pub fn from_report(r: &CoveringReport) -> CoveringReportDoc {
        CoveringReportDoc {
            n: r.n,
            delta: r.delta.to_string(),
            q: r.q,
            count_r1: r.count_r1,
            count_r2: r.count_r2,
            sum_r1_area: dy_str(r.sum_r1_area),
            union_r2_area: rat_str(&r.union_r2_area),
            q_integral: rat_str(&r.q_integral),
            ratio_union: rat_str(&r.ratio_union),
            ratio_q_normalized: rat_str(&r.ratio_q_normalized),
            falsifications: r.falsifications.clone(),
        }
    }
}

/// Serialized selection (`selection.json`).
#[derive(Serialize, serde::Deserialize)]
pub struct SelectionDoc {
    pub n: u32,
    pub delta: String,
    pub r1: Vec<dirmax_core::ParallelogramRepr>,
    pub r2: Vec<EvictedDoc>,
}

#[derive(Serialize, serde::Deserialize)]
pub struct EvictedDoc {
    pub rect: dirmax_core::ParallelogramRepr,
    pub covered_by: Vec<usize>,
}

impl SelectionDoc {
    pub fn from_selection(sel: &Selection, n: u32, delta: Dyadic) -> SelectionDoc {
        SelectionDoc {
            n,
            delta: delta.to_string(),
            r1: sel.r1.iter().map(dirmax_core::ParallelogramRepr::from).collect(),
            r2: sel
                .r2
                .iter()
                .map(|e| EvictedDoc {
                    rect: dirmax_core::ParallelogramRepr::from(&e.rect),
                    covered_by: e.covered_by.clone(),
                })
                .collect(),
        }
    }

    pub fn into_selection(self) -> Selection {
        Selection {
            r1: self.r1.into_iter().map(|r| r.into_parallelogram(self.n)).collect(),
            r2: self
                .r2
                .into_iter()
                .map(|e| dirmax_core::Evicted {
                    rect: e.rect.into_parallelogram(self.n),
                    covered_by: e.covered_by,
                })
                .collect(),
        }
    }
}

/// Output of one `(field, n, delta)` instance.
pub struct InstanceOutput {
    pub key: String,
    pub rows: Vec<CsvRow>,
    pub files: Vec<(String, String)>,
    pub falsification_count: usize,
}

pub fn run_instance(
    spec: &FieldGenSpec,
    n: u32,
    delta: Dyadic,
    cfg: &ExperimentConfig,
) -> Result<InstanceOutput> {
    let label = spec.label();
    let key = format!("{label}_n{n}_d{}", file_tag(&delta.to_string()));
    let u = gen_field(spec, n)?;
    let mut rows = Vec::new();
    let mut files: Vec<(String, String)> = Vec::new();
    let mut falsification_docs: Vec<serde_json::Value> = Vec::new();

    // Forest-level checks: Carleson constant, BMO oscillation, mass.
    let analysis = ForestAnalysis::new(&dirmax_core::DyadicInterval::unit(), &u, delta)?;
    let carleson = analysis.carleson_check();
    let (bmo_sup, bmo_witness) = analysis.bmo_oscillation();
    let stats = analysis.jn_stats(2);
    let mut row = CsvRow::new("forest", &label, n, delta);
    row.set("carleson_ratio", dy_str(carleson.worst_ratio));
    row.set("bmo_sup", dy_str(bmo_sup));
    row.set("h_mass", dy_str(stats.mass));
    rows.push(row);
    if !carleson.ok {
        falsification_docs.push(serde_json::json!({
            "kind": "carleson-constant",
            "detail": format!("worst interval {} ratio {}", carleson.worst_interval, carleson.worst_ratio),
        }));
    }
    if bmo_sup > Dyadic::ONE {
        falsification_docs.push(serde_json::json!({
            "kind": "bmo-oscillation",
            "detail": format!("oscillation {} at {}", bmo_sup, bmo_witness),
        }));
    }
    if stats.mass > Dyadic::ONE {
        falsification_docs.push(serde_json::json!({
            "kind": "h-mass",
            "detail": format!("mass {} exceeds 1", stats.mass),
        }));
    }

    // Family, selection, covering reports per q.
    let mut fspec = FamilySpec::new(delta, cfg.offset_denom);
    fspec.cap = cfg.family_cap;
    let family = enumerate_family(&u, &fspec)?;
    let mut selection_for_render: Option<Selection> = None;
    for &q in &cfg.qs {
        let report = dirmax_core::verify_covering_with(&family, &u, delta, q, cfg.claims);
        let mut row = CsvRow::new("covering", &label, n, delta);
        row.set("q", q.to_string());
        row.set("count_r1", report.count_r1.to_string());
        row.set("count_r2", report.count_r2.to_string());
        row.set("sum_r1_area", dy_str(report.sum_r1_area));
        row.set("union_r2_area", rat_str(&report.union_r2_area));
        row.set("q_integral", rat_str(&report.q_integral));
        row.set("ratio_union", rat_str(&report.ratio_union));
        row.set("ratio_q_normalized", rat_str(&report.ratio_q_normalized));
        row.set("falsification_count", report.falsifications.len().to_string());
        rows.push(row);
        for f in &report.falsifications {
            falsification_docs.push(serde_json::to_value(f).unwrap());
        }
        let doc = CoveringReportDoc::from_report(&report);
        files.push((
            format!("covering_{key}_q{q}.json"),
            serde_json::to_string_pretty(&doc).unwrap() + "\n",
        ));
        if selection_for_render.is_none() {
            selection_for_render = Some(report.selection);
        }
    }

    // Weak-type measurements per test function and exponent.
    let sel = selection_for_render.as_ref().expect("qs is nonempty");
    let lambdas = cfg.lambdas_parsed();
    for tf in &cfg.test_functions {
        let f = tf.build().map_err(anyhow::Error::from)?;
        let field_max = maximal_fn(&f, &family);
        for &p in &cfg.ps_parsed() {
            let res = weak_type_constant(&field_max, &f, p, &lambdas);
            for wrow in &res.rows {
                let mut row = CsvRow::new("weaktype", &label, n, delta);
                row.set("p", format!("{p}"));
                row.set("lambda", wrow.lambda.to_string());
                row.set("test_fn", tf.label());
                row.set("measure_E_lambda", rat_str(&wrow.measure));
                row.set("f_norm_p", format!("{}", res.f_norm_p_p));
                row.set("constant", format!("{}", res.constant));
                rows.push(row);
            }
        }
    }

    if cfg.render {
        let svg = render::render_selection_svg(sel, &render::RenderOpts::default())?;
        files.push((format!("selection_{key}.svg"), svg));
        let heat = render::render_heatmap_svg(&sel.r1, 6, 20_000)?;
        files.push((format!("heatmap_{key}.svg"), heat));
    }

    for (i, doc) in falsification_docs.iter().enumerate() {
        files.push((
            format!("falsification_{key}_{i}.json"),
            serde_json::to_string_pretty(doc).unwrap() + "\n",
        ));
    }

    Ok(InstanceOutput { key, rows, files, falsification_count: falsification_docs.len() })
}

#[derive(Serialize)]
pub struct SweepSummary {
    pub instances: usize,
    pub falsifications: usize,
    pub csv_rows: usize,
}

/// Runs the whole sweep into the config's output directory. Returns the
/// summary; any falsification makes the caller exit nonzero.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepSummary> {
    cfg.validate()?;
    let out_dir = cfg.resolved_output_dir();
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("creating output dir {}", out_dir.display()))?;

    let mut jobs: Vec<(FieldGenSpec, u32, Dyadic)> = Vec::new();
    for spec in cfg.all_fields() {
        for &n in &cfg.ns {
            for delta in cfg.deltas_parsed() {
                jobs.push((spec.clone(), n, delta));
            }
        }
    }
    let results: Vec<Result<InstanceOutput>> = jobs
        .par_iter()
        .map(|(spec, n, delta)| run_instance(spec, *n, *delta, cfg))
        .collect();

    let mut outputs = Vec::with_capacity(results.len());
    for r in results {
        outputs.push(r?);
    }
    outputs.sort_by(|a, b| a.key.cmp(&b.key));

    let mut all_rows: Vec<CsvRow> = outputs.iter().flat_map(|o| o.rows.clone()).collect();
    all_rows.sort_by_key(|r| r.sort_key());
    let mut csv = SWEEP_CSV_COLUMNS.join(",");
    csv.push('\n');
    for row in &all_rows {
        csv.push_str(&row.line());
        csv.push('\n');
    }
    write_file(&out_dir.join("sweep.csv"), &csv)?;

    let mut falsifications = 0usize;
    for o in &outputs {
        falsifications += o.falsification_count;
        for (name, content) in &o.files {
            write_file(&out_dir.join(name), content)?;
        }
    }
    let summary = SweepSummary {
        instances: outputs.len(),
        falsifications,
        csv_rows: all_rows.len(),
    };
    write_file(
        &out_dir.join("summary.json"),
        &(serde_json::to_string_pretty(&summary).unwrap() + "\n"),
    )?;
    Ok(summary)
}

pub fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Forest dump (`forest.json` plus `weights.csv`) for the `forest`
/// subcommand: nonempty `T(I)` sets keyed `level:index`, and the nonzero
/// Carleson weights.
pub fn forest_documents(u: &OneVarField, delta: Dyadic) -> Result<(String, String, String)> {
    let analysis = ForestAnalysis::new(&dirmax_core::DyadicInterval::unit(), u, delta)?;
    let mut t_map: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for (interval, t) in analysis.forest.nodes() {
        if !t.is_empty() {
            t_map.insert(interval.to_string(), t.iter().map(|s| s.index).collect());
        }
    }
    let forest_json = serde_json::to_string_pretty(&serde_json::json!({
        "root": dirmax_core::DyadicInterval::unit().to_string(),
        "delta": delta.to_string(),
        "t": t_map,
    }))
    .unwrap()
        + "\n";

    let mut weights_csv = String::from("interval,mu\n");
    for (interval, _) in analysis.forest.nodes() {
        let mu = analysis.weights.mu(&interval);
        if !mu.is_zero() {
            weights_csv.push_str(&format!("{interval},{}\n", dy_str(mu)));
        }
    }

    let carleson = analysis.carleson_check();
    let (bmo_sup, _) = analysis.bmo_oscillation();
    let stats2 = analysis.jn_stats(2);
    let stats3 = analysis.jn_stats(3);
    let summary = serde_json::to_string_pretty(&serde_json::json!({
        "carleson_ok": carleson.ok,
        "carleson_worst_interval": carleson.worst_interval.to_string(),
        "carleson_worst_ratio": dy_str(carleson.worst_ratio),
        "bmo_sup": dy_str(bmo_sup),
        "h_mass": dy_str(stats2.mass),
        "h_moment_2": dy_str(stats2.moment),
        "h_moment_3": dy_str(stats3.moment),
        "decay": stats2
            .decay
            .iter()
            .map(|(l, m)| (l.to_string(), dy_str(*m)))
            .collect::<BTreeMap<String, String>>(),
    }))
    .unwrap()
        + "\n";
    Ok((forest_json, weights_csv, summary))
}

/// Output directory resolution for single-shot subcommands.
pub fn resolve_out_dir(cli_dir: &Path) -> PathBuf {
    match std::env::var_os("DIRMAX_OUT_DIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => cli_dir.to_path_buf(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_have_stable_shape() {
        let mut row = CsvRow::new("forest", "iid7", 4, Dyadic::new(1, -2));
        row.set("h_mass", "7/8".into());
        let line = row.line();
        assert_eq!(line.split(',').count(), SWEEP_CSV_COLUMNS.len());
        assert!(line.starts_with("forest,iid7,4,1/4,,,"));
    }

    #[test]
    fn rational_formatting() {
        assert_eq!(dy_str(Dyadic::new(7, -3)), "7/8");
        assert_eq!(dy_str(Dyadic::new(4, 0)), "4");
        assert_eq!(rat_str(&Rat::new(22.into(), 11.into())), "2");
    }

    #[test]
    fn selection_doc_round_trips() {
        use dirmax_core::{DyadicInterval, Parallelogram, SlopeCell};
        let r = Parallelogram::new(
            DyadicInterval::standard(1, 1),
            SlopeCell::new(2, 3),
            Dyadic::new(-3, -4),
            3,
        );
        let sel = Selection { r1: vec![r], r2: vec![] };
        let doc = SelectionDoc::from_selection(&sel, 3, Dyadic::new(1, -2));
        let json = serde_json::to_string(&doc).unwrap();
        let back: SelectionDoc = serde_json::from_str(&json).unwrap();
        let sel2 = back.into_selection();
        assert_eq!(sel2.r1, sel.r1);
    }
}
