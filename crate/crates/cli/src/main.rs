use std::collections::BTreeMap;
use std::fmt::Display;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use vsplit_core::viewmodel::{compare_labelings, Comparison, NO_LABEL};
use vsplit_core::{
    parse_script, ClusterCurves, LoadOptions, ModelDocument, NodeId, Orientation, Session, SessionOptions,
};
use vsplit_service::{prepare_dataset, AppState};

#[derive(Parser)]
#[command(name = "vsplit", version, about = "Iterative PCA partitioning of expression data")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Load and validate a dataset, print its summary.
    IngestCheck(DataArgs),
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Preload a dataset; otherwise clients upload one.
        #[arg(long)]
        expression: Option<PathBuf>,
        #[command(flatten)]
        data: OptionalData,
    },
    /// Replay a split script and write model.json and summary.json.
    Replay {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Replay a script (or none) and print or write the model document.
    ExportModel {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        script: Option<PathBuf>,
        /// Output path; stdout when absent.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Assign every sample of an expression file to a leaf of a model.
    Classify {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        model: PathBuf,
    },
    /// Kaplan-Meier tables per leaf and for all samples.
    Survival {
        #[command(flatten)]
        data: DataArgs,
        /// Defaults to the single-cluster model.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Contingency table and adjusted Rand index of model leaves against
    /// the clinical labels, or against a second model.
    Compare {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        against: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    expression: PathBuf,
    #[command(flatten)]
    rest: OptionalData,
}

#[derive(Args)]
struct OptionalData {
    #[arg(long)]
    clinical: Option<PathBuf>,
    /// Standardize every feature to mean 0, sd 1.
    #[arg(long)]
    zscore: bool,
    #[arg(long)]
    impute_mean: bool,
    #[arg(long, default_value_t = Orientation::SamplesAsRows)]
    orientation: Orientation,
    #[arg(long, default_value_t = vsplit_core::viewmodel::DEFAULT_BINS)]
    bins: usize,
    #[arg(long, default_value_t = vsplit_core::viewmodel::DEFAULT_CMAX)]
    cmax: f64,
}

enum Failure {
    Usage(String),
    Data(String),
    Script(String),
}

fn data_err(e: impl Display) -> Failure {
    Failure::Data(e.to_string())
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn open(expression: &Path, d: &OptionalData) -> Result<(Session, vsplit_core::DatasetSummary), Failure> {
    let expr = read_text(expression)?;
    let clin = d.clinical.as_deref().map(read_text).transpose()?;
    if d.bins == 0 {
        return Err(Failure::Usage("--bins must be positive".into()));
    }
    prepare_dataset(
        &expr,
        clin.as_deref(),
        LoadOptions {
            orientation: d.orientation,
            impute_mean: d.impute_mean,
        },
        d.zscore,
        SessionOptions {
            bins: d.bins,
            cmax: d.cmax,
        },
    )
    .map_err(|e| Failure::Data(format!("{}: {e}", e.name())))
}

fn load_model(session: &mut Session, path: &Path) -> Result<(), Failure> {
    let doc = ModelDocument::from_json(&read_text(path)?).map_err(|e| Failure::Data(format!("{}: {e}", e.name())))?;
    session
        .import(&doc)
        .map_err(|e| Failure::Data(format!("{}: {e}", e.name())))?;
    Ok(())
}

fn replay_script(session: &mut Session, path: &Path) -> Result<usize, Failure> {
    let commands = parse_script(&read_text(path)?).map_err(|e| Failure::Script(e.to_string()))?;
    session
        .replay(&commands)
        .map_err(|e| Failure::Script(e.to_string()))?;
    Ok(commands.len())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn leaf_labels(session: &Session) -> BTreeMap<String, String> {
    let ids = session.matrix().sample_ids();
    session
        .tree()
        .assignment()
        .iter()
        .enumerate()
        .map(|(s, leaf)| (ids[s].clone(), leaf.to_string()))
        .collect()
}

/// Leaves against clinical labels over the samples that carry a label.
fn compare_with_labels(session: &Session) -> Option<Comparison> {
    let clinical = session.clinical();
    if !clinical.has_labels() {
        return None;
    }
    let ids = session.matrix().sample_ids();
    let prior: BTreeMap<String, String> = (0..ids.len())
        .filter_map(|s| clinical.label(s).map(|l| (ids[s].clone(), l.to_owned())))
        .filter(|(_, l)| l != NO_LABEL)
        .collect();
    let leaves: BTreeMap<String, String> = leaf_labels(session)
        .into_iter()
        .filter(|(id, _)| prior.contains_key(id))
        .collect();
    compare_labelings(&leaves, &prior).ok()
}

#[derive(Serialize)]
struct ClusterSize {
    id: NodeId,
    color: usize,
    size: usize,
}

#[derive(Serialize)]
struct SplitSummary {
    node: NodeId,
    sequence: usize,
    positive: NodeId,
    negative: NodeId,
    pc_x: usize,
    pc_y: usize,
    features: usize,
    sigma_avg: Option<f64>,
    selected: Vec<String>,
}

#[derive(Serialize)]
struct ReplaySummary {
    n_samples: usize,
    commands: usize,
    clusters: Vec<ClusterSize>,
    splits: Vec<SplitSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    survival: Option<ClusterCurves>,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<Comparison>,
}

fn summarize(session: &Session, commands: usize) -> ReplaySummary {
    let tree = session.tree();
    let names = session.matrix().feature_names();
    ReplaySummary {
        n_samples: session.matrix().n_samples(),
        commands,
        clusters: tree
            .leaves()
            .into_iter()
            .map(|id| {
                let n = tree.node(id).expect("leaf exists");
                ClusterSize {
                    id,
                    color: n.color,
                    size: n.members.len(),
                }
            })
            .collect(),
        splits: tree
            .splits_in_order()
            .into_iter()
            .filter_map(|n| {
                let rule = n.rule.as_ref()?;
                Some(SplitSummary {
                    node: n.id,
                    sequence: rule.sequence,
                    positive: rule.positive,
                    negative: rule.negative,
                    pc_x: rule.plane.pc_x,
                    pc_y: rule.plane.pc_y,
                    features: rule.plane.feature_subset.len(),
                    sigma_avg: n.important.as_ref().map(|r| r.sigma_avg),
                    selected: n
                        .important
                        .as_ref()
                        .map(|r| r.selected.iter().map(|&f| names[f].clone()).collect())
                        .unwrap_or_default(),
                })
            })
            .collect(),
        survival: session.survival().ok(),
        comparison: compare_with_labels(session),
    }
}

fn km_table(curves: &ClusterCurves) -> String {
    let mut out = String::from("cluster\ttime\tsurvival\tn_at_risk_initial\n");
    for c in curves.clusters.iter().chain(std::iter::once(&curves.baseline)) {
        for (t, s) in &c.steps {
            out.push_str(&format!("{}\t{t}\t{s}\t{}\n", c.cluster, c.n_at_risk_initial));
        }
    }
    out
}

fn comparison_table(c: &Comparison) -> String {
    let mut out = String::from("cluster");
    for b in &c.labels_b {
        out.push('\t');
        out.push_str(b);
    }
    out.push('\n');
    for (a, row) in c.labels_a.iter().zip(&c.table) {
        out.push_str(a);
        for n in row {
            out.push_str(&format!("\t{n}"));
        }
        out.push('\n');
    }
    out.push_str(&format!("ARI\t{}\n", c.ari));
    out
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::IngestCheck(d) => {
            let (_, summary) = open(&d.expression, &d.rest)?;
            print!("{}", to_json(&summary));
        }
        Cmd::Serve { port, expression, data } => {
            let state = match expression {
                Some(path) => AppState::with_session(open(&path, &data)?.0),
                None => AppState::new(),
            };
            let addr = SocketAddr::from(([127, 0, 0, 1], port));
            let rt = tokio::runtime::Runtime::new().map_err(data_err)?;
            eprintln!("listening on http://{addr}");
            rt.block_on(vsplit_service::serve(addr, state)).map_err(data_err)?;
        }
        Cmd::Replay { data, script, out_dir } => {
            let (mut session, _) = open(&data.expression, &data.rest)?;
            let n = replay_script(&mut session, &script)?;
            std::fs::create_dir_all(&out_dir).map_err(data_err)?;
            write_text(&out_dir.join("model.json"), &session.export().to_json())?;
            write_text(&out_dir.join("summary.json"), &to_json(&summarize(&session, n)))?;
            println!(
                "{n} commands, {} clusters, model written to {}",
                session.tree().leaves().len(),
                out_dir.join("model.json").display()
            );
        }
        Cmd::ExportModel { data, script, model } => {
            let (mut session, _) = open(&data.expression, &data.rest)?;
            if let Some(script) = script {
                replay_script(&mut session, &script)?;
            }
            let text = session.export().to_json();
            match model {
                Some(path) => write_text(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Cmd::Classify { data, model } => {
            let (mut session, _) = open(&data.expression, &data.rest)?;
            load_model(&mut session, &model)?;
            let mut out = String::from("sample_id\tcluster\n");
            for (id, leaf) in leaf_labels(&session) {
                out.push_str(&format!("{id}\t{leaf}\n"));
            }
            print!("{out}");
        }
        Cmd::Survival { data, model } => {
            if data.rest.clinical.is_none() {
                return Err(Failure::Usage("survival needs --clinical".into()));
            }
            let (mut session, _) = open(&data.expression, &data.rest)?;
            if let Some(model) = model {
                load_model(&mut session, &model)?;
            }
            let curves = session.survival().map_err(|e| Failure::Data(format!("{}: {e}", e.name())))?;
            print!("{}", km_table(&curves));
        }
        Cmd::Compare { data, model, against } => {
            let (mut session, _) = open(&data.expression, &data.rest)?;
            load_model(&mut session, &model)?;
            let comparison = match against {
                Some(other) => {
                    let a = leaf_labels(&session);
                    load_model(&mut session, &other)?;
                    compare_labelings(&a, &leaf_labels(&session)).map_err(data_err)?
                }
                None => compare_with_labels(&session)
                    .ok_or_else(|| Failure::Data("clinical data has no labels to compare against".into()))?,
            };
            print!("{}", comparison_table(&comparison));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("data error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Script(m)) => {
            eprintln!("script error: {m}");
            ExitCode::from(3)
        }
    }
}
