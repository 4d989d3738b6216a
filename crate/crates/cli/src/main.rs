use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use dirmax_cli::config::ExperimentConfig;
use dirmax_cli::pipeline::{
    self, dy_str, forest_documents, rat_str, resolve_out_dir, CoveringReportDoc, SelectionDoc,
};
use dirmax_cli::render;
use dirmax_core::{
    enumerate_family, gen_field, maximal_fn, verify_covering, weak_type_constant, Dyadic,
    FamilySpec, FieldGenSpec, OneVarField, TestFnSpec,
};

#[derive(Parser)]
#[command(
    name = "dirmax",
    about = "Exact experiments with maximal averages along one-variable vector fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a slope field and write it as a field file.
    GenField(GenFieldArgs),
    /// Build the slope forest of a field and dump it with its weights.
    Forest(ForestArgs),
    /// Enumerate the admissible family and run the greedy selection.
    Select(SelectArgs),
    /// Level sets and weak-type constants of the maximal function.
    Maximal(MaximalArgs),
    /// Full covering verification for one instance; exits nonzero on any
    /// falsification.
    Verify(VerifyArgs),
    /// Run a configured sweep; exits nonzero on any falsification.
    Sweep(SweepArgs),
    /// Render a stored selection as SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct GenFieldArgs {
    /// Generator kind: constant | iid-uniform | two-value | cantor-lacunary | staircase.
    #[arg(long)]
    kind: String,
    /// Resolution exponent (w = 2^-n).
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cell index for `constant`.
    #[arg(long, default_value_t = 0)]
    cell: u64,
    /// First cell for `two-value`.
    #[arg(long, default_value_t = 0)]
    a: u64,
    /// Second cell for `two-value`.
    #[arg(long, default_value_t = 1)]
    b: u64,
    /// Block length for `two-value`.
    #[arg(long, default_value_t = 1)]
    block: usize,
    /// Output field file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ForestArgs {
    #[arg(long)]
    field: PathBuf,
    /// Popularity threshold, a dyadic like "1/8".
    #[arg(long)]
    delta: String,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SelectArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    delta: String,
    #[arg(long, default_value_t = 2)]
    offset_denom: u32,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct MaximalArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    delta: String,
    /// Test function as JSON, e.g. '{"kind":"square","level":3,"ix":2,"iy":3}'.
    #[arg(long, default_value = r#"{"kind":"square","level":3,"ix":2,"iy":3}"#)]
    f: String,
    /// Exponents like "3/2,2".
    #[arg(long, default_value = "3/2,2")]
    ps: String,
    /// Comma-separated dyadic thresholds.
    #[arg(long, default_value = "1/2,1/4,1/8,1/16,1/32,1/64")]
    lambdas: String,
    #[arg(long, default_value_t = 2)]
    offset_denom: u32,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    delta: String,
    #[arg(long, default_value_t = 2)]
    q: u32,
    #[arg(long, default_value_t = 2)]
    offset_denom: u32,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    /// A selection.json produced by `select` or `verify`.
    #[arg(long)]
    selection: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also draw the 5-dilates, dashed.
    #[arg(long, default_value_t = false)]
    dilates: bool,
    /// Also write an overlap heatmap of r1 next to `out`.
    #[arg(long, default_value_t = false)]
    heatmap: bool,
    #[arg(long, default_value_t = 20_000)]
    element_cap: usize,
}

fn load_field(path: &PathBuf) -> Result<OneVarField> {
    OneVarField::load(path).with_context(|| format!("loading field {}", path.display()))
}

fn parse_delta(s: &str) -> Result<Dyadic> {
    let d = Dyadic::parse(s).with_context(|| format!("parsing delta {s:?}"))?;
    if d <= Dyadic::ZERO || d > Dyadic::ONE {
        bail!("delta {s} outside (0, 1]");
    }
    Ok(d)
}

fn run() -> Result<usize> {
    let cli = Cli::parse();
    match cli.command {
        Command::GenField(args) => {
            let spec = match args.kind.as_str() {
                "constant" => FieldGenSpec::Constant { cell: args.cell },
                "iid-uniform" => FieldGenSpec::IidUniform { seed: args.seed },
                "two-value" => FieldGenSpec::TwoValue { a: args.a, b: args.b, block: args.block },
                "cantor-lacunary" => FieldGenSpec::CantorLacunary,
                "staircase" => FieldGenSpec::Staircase,
                other => bail!("unknown generator kind {other:?}"),
            };
            let field = gen_field(&spec, args.n)?;
            field.save(&args.out)?;
            println!(
                "wrote field {} (n={}, {} columns)",
                args.out.display(),
                args.n,
                field.num_columns()
            );
            Ok(0)
        }
        Command::Forest(args) => {
            let u = load_field(&args.field)?;
            let delta = parse_delta(&args.delta)?;
            let out_dir = resolve_out_dir(&args.out_dir);
            let (forest_json, weights_csv, summary) = forest_documents(&u, delta)?;
            pipeline::write_file(&out_dir.join("forest.json"), &forest_json)?;
            pipeline::write_file(&out_dir.join("weights.csv"), &weights_csv)?;
            pipeline::write_file(&out_dir.join("forest_summary.json"), &summary)?;
            print!("{summary}");
            Ok(0)
        }
        Command::Select(args) => {
            let u = load_field(&args.field)?;
            let delta = parse_delta(&args.delta)?;
            let out_dir = resolve_out_dir(&args.out_dir);
            let family = enumerate_family(&u, &FamilySpec::new(delta, args.offset_denom))?;
            let sel = dirmax_core::select(&family);
            let falsifications = dirmax_core::check_selection(&sel, family.len());
            println!(
                "family {} -> r1 {} / r2 {} (sum |r1| = {})",
                family.len(),
                sel.r1.len(),
                sel.r2.len(),
                dy_str(sel.sum_r1_area())
            );
            let doc = SelectionDoc::from_selection(&sel, u.n(), delta);
            pipeline::write_file(
                &out_dir.join("selection.json"),
                &(serde_json::to_string_pretty(&doc)? + "\n"),
            )?;
            for f in &falsifications {
                eprintln!("falsification: {} ({})", f.kind, f.detail);
            }
            Ok(falsifications.len())
        }
        Command::Maximal(args) => {
            let u = load_field(&args.field)?;
            let delta = parse_delta(&args.delta)?;
            let out_dir = resolve_out_dir(&args.out_dir);
            let spec: TestFnSpec = serde_json::from_str(&args.f).context("parsing test function")?;
            let f = spec.build()?;
            let family = enumerate_family(&u, &FamilySpec::new(delta, args.offset_denom))?;
            let field_max = maximal_fn(&f, &family);
            let lambdas: Vec<Dyadic> = args
                .lambdas
                .split(',')
                .map(|s| Dyadic::parse(s.trim()).map_err(anyhow::Error::from))
                .collect::<Result<_>>()?;
            let mut csv = String::from("n,delta,p,lambda,measure_E_lambda,f_norm_p,constant\n");
            for p_str in args.ps.split(',') {
                let p = dirmax_cli::config::parse_p(p_str)?;
                let res = weak_type_constant(&field_max, &f, p, &lambdas);
                for row in &res.rows {
                    csv.push_str(&format!(
                        "{},{},{p},{},{},{},{}\n",
                        u.n(),
                        delta,
                        row.lambda,
                        rat_str(&row.measure),
                        res.f_norm_p_p,
                        res.constant
                    ));
                }
                println!("p = {p}: weak-type constant {}", res.constant);
            }
            pipeline::write_file(&out_dir.join("maximal.csv"), &csv)?;
            Ok(0)
        }
        Command::Verify(args) => {
            let u = load_field(&args.field)?;
            let delta = parse_delta(&args.delta)?;
            let out_dir = resolve_out_dir(&args.out_dir);
            let family = enumerate_family(&u, &FamilySpec::new(delta, args.offset_denom))?;
            let report = verify_covering(&family, &u, delta, args.q);
            let doc = CoveringReportDoc::from_report(&report);
            pipeline::write_file(
                &out_dir.join("covering_report.json"),
                &(serde_json::to_string_pretty(&doc)? + "\n"),
            )?;
            for (i, fals) in report.falsifications.iter().enumerate() {
                pipeline::write_file(
                    &out_dir.join(format!("falsification_{i}.json")),
                    &(serde_json::to_string_pretty(fals)? + "\n"),
                )?;
                eprintln!("falsification: {} ({})", fals.kind, fals.detail);
            }
            println!(
                "r1 {} / r2 {}; ratio_union {}; normalized q-ratio {}; {} points checked; {} falsifications",
                report.count_r1,
                report.count_r2,
                rat_str(&report.ratio_union),
                rat_str(&report.ratio_q_normalized),
                report.claims.points_checked,
                report.falsifications.len()
            );
            Ok(report.falsifications.len())
        }
        Command::Sweep(args) => {
            let cfg = ExperimentConfig::load(&args.config)?;
            let summary = dirmax_cli::run_sweep(&cfg)?;
            println!(
                "{} instances, {} csv rows, {} falsifications -> {}",
                summary.instances,
                summary.csv_rows,
                summary.falsifications,
                cfg.resolved_output_dir().display()
            );
            Ok(summary.falsifications)
        }
        Command::Render(args) => {
            let text = std::fs::read_to_string(&args.selection)
                .with_context(|| format!("reading {}", args.selection.display()))?;
            let doc: SelectionDoc = serde_json::from_str(&text)?;
            let sel = doc.into_selection();
            let opts = render::RenderOpts { dilates: args.dilates, element_cap: args.element_cap };
            let svg = render::render_selection_svg(&sel, &opts)?;
            pipeline::write_file(&args.out, &svg)?;
            if args.heatmap {
                let heat = render::render_heatmap_svg(&sel.r1, 6, args.element_cap)?;
                let heat_path = args.out.with_extension("heatmap.svg");
                pipeline::write_file(&heat_path, &heat)?;
            }
            println!("wrote {}", args.out.display());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
