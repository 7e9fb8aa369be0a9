use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use hyptype::connectivity::{
    c1_partition, is_two_edge_connected, three_edge_connectivization, two_edge_connectivization,
};
use hyptype::decision::{
    cross_validate, is_hyperelliptic_type, jacobian_gram, jacobians_isomorphic,
    strongly_hyperelliptic_type, Forbidden,
};
use hyptype::ears::{
    ensure_three_initial_ears, hedify, htedify, involution_from_hed, nested_ear_decomposition,
    EarDecomposition,
};
use hyptype::gen::{enumerate_stable_graphs, random_stable_curve};
use hyptype::graph::{Block, EdgeFate};
use hyptype::hyperelliptic::{enumerate_involutions, is_hyperelliptic, quotient};
use hyptype::io::{self, Names, ParsedCurve};
use hyptype::{Error, Result, TropicalCurve};

#[derive(Parser)]
#[command(name = "hyptype", version, about = "Hyperelliptic-type recognition for tropical curves")]
struct Cli {
    /// Human-readable summary on stderr in addition to the JSON on stdout.
    #[arg(long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Genus, stability, blocks, and the C1-sets of a curve.
    Analyze { file: PathBuf },
    /// Contract bridges (level 2), then collapse C1-sets (level 3).
    Connectivize {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3), default_value_t = 3)]
        level: u8,
        file: PathBuf,
    },
    /// Search for a minor model of a pattern graph inside the input.
    Minor {
        /// "k4", "l3", or a path to a graph document.
        #[arg(long, default_value = "k4")]
        pattern: String,
        file: PathBuf,
    },
    /// Decide hyperelliptic type and emit the certificate.
    Hyptype {
        /// Reflect the verdict in the exit code: 0 = yes, 1 = no.
        #[arg(long)]
        check: bool,
        file: PathBuf,
    },
    /// Determinant and optionally the full Gram matrix of the Jacobian.
    Jacobian {
        #[arg(long)]
        gram: bool,
        /// Compare Jacobians with a second curve via the Torelli criterion.
        #[arg(long)]
        compare: Option<PathBuf>,
        file: PathBuf,
    },
    /// Nested ear decomposition, reshaped as far as the requested stage.
    Ears {
        #[arg(long, value_enum, default_value_t = StageArg::Nested)]
        stage: StageArg,
        file: PathBuf,
    },
    /// Decide whether the curve itself is hyperelliptic.
    Hyperelliptic {
        /// Also list every isometric involution of the stable model.
        #[arg(long)]
        involutions: bool,
        file: PathBuf,
    },
    /// Quotient of a curve by an involution document.
    Quotient {
        #[arg(long)]
        involution: PathBuf,
        file: PathBuf,
    },
    /// Sample a random stable curve.
    Gen {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 3)]
        genus: u32,
        #[arg(long = "max-edges", default_value_t = 10)]
        max_edges: usize,
    },
    /// Cross-validate the characterization clauses over a corpus.
    Sweep {
        /// Include all stable graphs of genus 2 up to this genus.
        #[arg(long = "genus-max", default_value_t = 3)]
        genus_max: u32,
        /// Number of extra random stable curves.
        #[arg(long, default_value_t = 0)]
        random: usize,
        #[arg(long = "max-edges", default_value_t = 8)]
        max_edges: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Additional curve documents to include, in order.
        files: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum StageArg {
    Nested,
    Hted,
    Hed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::SizeGuard { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Analyze { file } => analyze(cli, file),
        Command::Connectivize { level, file } => connectivize(cli, *level, file),
        Command::Minor { pattern, file } => minor(cli, pattern, file),
        Command::Hyptype { check, file } => hyptype(cli, *check, file),
        Command::Jacobian { gram, compare, file } => jacobian(cli, *gram, compare.as_deref(), file),
        Command::Ears { stage, file } => ears(cli, *stage, file),
        Command::Hyperelliptic { involutions, file } => hyperelliptic(cli, *involutions, file),
        Command::Quotient { involution, file } => quotient_cmd(cli, involution, file),
        Command::Gen { seed, genus, max_edges } => gen_cmd(cli, *seed, *genus, *max_edges),
        Command::Sweep { genus_max, random, max_edges, seed, files } => {
            sweep(cli, *genus_max, *random, *max_edges, *seed, files)
        }
    }
}

fn load(path: &Path) -> Result<ParsedCurve> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Document(format!("{}: {e}", path.display())))?;
    let parsed = io::parse_graph(&text)?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(parsed)
}

/// The seed, from `HYPTYPE_SEED` if set, else the flag, else 0.
fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    match std::env::var("HYPTYPE_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Document(format!("HYPTYPE_SEED: not an integer: {s:?}"))),
        Err(_) => Ok(flag.unwrap_or(0)),
    }
}

fn emit<T: serde::Serialize>(doc: &T) {
    print!("{}", io::to_json(doc));
}

fn analyze(cli: &Cli, file: &Path) -> Result<ExitCode> {
    let p = load(file)?;
    let g = p.curve.graph();
    let partition = c1_partition(g);
    let blocks = g
        .blocks()
        .into_iter()
        .map(|b| match b {
            Block::WeightUnit { anchor } => io::BlockDoc {
                kind: "weight".into(),
                vertices: vec![p.names.vertex(anchor)],
                edges: vec![],
                betti1: 0,
            },
            Block::TwoConnected { vertices, edges } => io::BlockDoc {
                kind: if edges.len() + 1 == vertices.len() { "bridge" } else { "cycle" }.into(),
                betti1: (edges.len() + 1 - vertices.len()) as u32,
                vertices: vertices.iter().map(|&v| p.names.vertex(v)).collect(),
                edges: edges.iter().map(|&e| p.names.edge(e)).collect(),
            },
        })
        .collect();
    let doc = io::AnalyzeDoc {
        genus: p.curve.genus(),
        betti1: g.betti1(),
        total_weight: g.total_weight(),
        vertices: g.n_vertices(),
        edges: g.n_edges(),
        stable: p.curve.is_stable(),
        d_invariant: g.d_invariant().ok(),
        two_edge_connected: is_two_edge_connected(g),
        blocks,
        separating_edges: partition.separating.iter().map(|&e| p.names.edge(e)).collect(),
        c1_sets: partition
            .sets
            .iter()
            .map(|s| s.iter().map(|&e| p.names.edge(e)).collect())
            .collect(),
    };
    if cli.verbose {
        eprintln!(
            "genus {} = {} cycles + {} weight; {} vertices, {} edges; {} C1-sets; {}",
            doc.genus,
            doc.betti1,
            doc.total_weight,
            doc.vertices,
            doc.edges,
            doc.c1_sets.len(),
            if doc.stable { "stable" } else { "not stable" },
        );
    }
    emit(&doc);
    Ok(ExitCode::SUCCESS)
}

fn connectivize(cli: &Cli, level: u8, file: &Path) -> Result<ExitCode> {
    let p = load(file)?;
    let doc = if level == 2 {
        let (curve, _) = two_edge_connectivization(&p.curve)?;
        io::ConnectivizeDoc {
            level,
            curve: io::graph_document(&curve, &p.names),
            psi: None,
        }
    } else {
        let cs = three_edge_connectivization(&p.curve)?;
        io::ConnectivizeDoc {
            level,
            curve: io::graph_document(&cs.curve, &p.names),
            psi: Some(
                cs.psi
                    .iter()
                    .map(|(&e, &r)| (p.names.edge(e), p.names.edge(r)))
                    .collect(),
            ),
        }
    };
    if cli.verbose {
        eprintln!(
            "level-{} connectivization: {} edges down from {}",
            level,
            doc.curve.edges.len(),
            p.curve.graph().n_edges(),
        );
    }
    emit(&doc);
    Ok(ExitCode::SUCCESS)
}

fn minor(cli: &Cli, pattern: &str, file: &Path) -> Result<ExitCode> {
    let p = load(file)?;
    let (pattern_graph, pattern_names, label) = match pattern {
        "k4" => {
            let g = Forbidden::K4.graph();
            (g.clone(), Names::canonical(&g), "k4".to_string())
        }
        "l3" => {
            let g = Forbidden::L3.graph();
            (g.clone(), Names::canonical(&g), "l3".to_string())
        }
        path => {
            let parsed = load(Path::new(path))?;
            let g = parsed.curve.graph().clone();
            (g, parsed.names, path.to_string())
        }
    };
    let model = hyptype::minors::find_minor_model(p.curve.graph(), &pattern_graph)?;
    let doc = io::MinorDoc {
        pattern: label.clone(),
        found: model.is_some(),
        model: model.map(|m| io::minor_model_document(&m, &pattern_names, &p.names)),
    };
    if cli.verbose {
        eprintln!(
            "{label} minor: {}",
            if doc.found { "found" } else { "not present" }
        );
    }
    emit(&doc);
    Ok(ExitCode::SUCCESS)
}

fn hyptype(cli: &Cli, check: bool, file: &Path) -> Result<ExitCode> {
    let p = load(file)?;
    let cert = is_hyperelliptic_type(&p.curve)?;
    cert.verify(&p.curve)?;
    let doc = io::hyptype_document(&cert, &p.curve, &p.names);
    if cli.verbose {
        match &cert.negative {
            Some(neg) => eprintln!("not of hyperelliptic type: {} minor found", neg.pattern.name()),
            None => eprintln!(
                "hyperelliptic type: model with {} edges, certificate verified",
                cert.positive.as_ref().map_or(0, |p| p.model.graph().n_edges()),
            ),
        }
    }
    emit(&doc);
    if check && !cert.verdict {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn jacobian(cli: &Cli, gram: bool, compare: Option<&Path>, file: &Path) -> Result<ExitCode> {
    let p = load(file)?;
    let gm = jacobian_gram(&p.curve)?;
    let comparison = match compare {
        Some(other_path) => {
            let other = load(other_path)?;
            let witness = jacobians_isomorphic(&p.curve, &other.curve)?;
            Some(io::CompareDoc {
                isomorphic: witness.is_some(),
                witness: witness.map(|iso| {
                    io::edge_map_document(&iso.edge_map, &p.names, &other.names)
                }),
            })
        }
        None => None,
    };
    let doc = io::JacobianDoc {
        genus: p.curve.genus(),
        determinant: gm.determinant().to_string(),
        gram: gram.then(|| io::gram_document(&gm, &p.names)),
        comparison,
    };
    if cli.verbose {
        eprint!("Gram determinant {}", doc.determinant);
        match &doc.comparison {
            Some(c) if c.isomorphic => eprintln!("; Jacobians isomorphic"),
            Some(_) => eprintln!("; Jacobians differ"),
            None => eprintln!(),
        }
    }
    emit(&doc);
    Ok(ExitCode::SUCCESS)
}

fn ears_doc(
    stage: &str,
    curve: &TropicalCurve,
    d: &EarDecomposition,
    names: &Names,
) -> Result<io::EarsDoc> {
    let mut names = names.clone();
    names.extend(curve.graph());
    Ok(io::EarsDoc {
        stage: stage.into(),
        curve: io::graph_document(curve, &names),
        ears: d
            .ears
            .iter()
            .map(|ear| io::EarDoc {
                vertices: ear.vertices.iter().map(|&v| names.vertex(v)).collect(),
                edges: ear.edges.iter().map(|&e| names.edge(e)).collect(),
            })
            .collect(),
        initial: d.nesting()?.initial,
        constraints: vec![],
        involution: None,
        obstruction: None,
    })
}

fn ears(cli: &Cli, stage: StageArg, file: &Path) -> Result<ExitCode> {
    let p = load(file)?;
    let Some(nested) = nested_ear_decomposition(p.curve.graph())? else {
        let doc = io::EarsDoc {
            stage: "none".into(),
            curve: io::graph_document(&p.curve, &p.names),
            ears: vec![],
            initial: vec![],
            constraints: vec![],
            involution: None,
            obstruction: Some("graph is not series-parallel, so a K4 minor is present".into()),
        };
        emit(&doc);
        return Ok(ExitCode::SUCCESS);
    };
    let mut doc = ears_doc("nested", &p.curve, &nested, &p.names)?;
    if stage >= StageArg::Hted {
        match htedify(&nested).and_then(|d| ensure_three_initial_ears(&d)) {
            Ok(hted) => {
                doc = ears_doc("hted", &p.curve, &hted, &p.names)?;
                if stage == StageArg::Hed {
                    let hed = hedify(&p.curve, &hted)?;
                    let (inv, constraints) = involution_from_hed(&hed.decomposition)?;
                    doc = ears_doc("hed", &hed.curve, &hed.decomposition, &p.names)?;
                    let mut names = p.names.clone();
                    names.extend(hed.curve.graph());
                    doc.constraints = constraints
                        .iter()
                        .map(|&(a, b)| [names.edge(a), names.edge(b)])
                        .collect();
                    doc.involution = Some(io::involution_document(
                        &inv,
                        hed.curve.graph(),
                        &names,
                    ));
                }
            }
            Err(Error::EarPipeline(msg)) => doc.obstruction = Some(msg),
            Err(e) => return Err(e),
        }
    }
    if cli.verbose {
        match &doc.obstruction {
            Some(msg) => eprintln!("stopped at stage {}: {msg}", doc.stage),
            None => eprintln!("stage {}: {} ears", doc.stage, doc.ears.len()),
        }
    }
    emit(&doc);
    Ok(ExitCode::SUCCESS)
}

fn hyperelliptic(cli: &Cli, involutions: bool, file: &Path) -> Result<ExitCode> {
    let p = load(file)?;
    let witness = is_hyperelliptic(&p.curve)?;
    let (stable, _) = p.curve.stable_model()?;
    let mut names = p.names.clone();
    names.extend(stable.graph());
    let mut doc = io::HyperellipticDoc {
        hyperelliptic: witness.is_some(),
        stable: io::graph_document(&stable, &names),
        involution: None,
        quotient: None,
        involutions: vec![],
    };
    if let Some(w) = &witness {
        doc.involution = Some(io::involution_document(&w.involution, w.stable.graph(), &names));
        let mut qnames = names.clone();
        qnames.extend(w.quotient.graph());
        doc.quotient = Some(io::graph_document(&w.quotient, &qnames));
    }
    if involutions {
        doc.involutions = enumerate_involutions(&stable)?
            .iter()
            .map(|inv| io::involution_document(inv, stable.graph(), &names))
            .collect();
    }
    if cli.verbose {
        eprintln!(
            "hyperelliptic: {}{}",
            if doc.hyperelliptic { "yes" } else { "no" },
            if involutions {
                format!(" ({} isometric involutions)", doc.involutions.len())
            } else {
                String::new()
            },
        );
    }
    emit(&doc);
    Ok(ExitCode::SUCCESS)
}

fn quotient_cmd(cli: &Cli, involution: &Path, file: &Path) -> Result<ExitCode> {
    let p = load(file)?;
    let text = fs::read_to_string(involution)
        .map_err(|e| Error::Document(format!("{}: {e}", involution.display())))?;
    let inv_doc: io::InvolutionDoc = serde_json::from_str(&text)
        .map_err(|e| Error::Document(format!("{}: invalid JSON: {e}", involution.display())))?;
    let inv = io::parse_involution(&inv_doc, p.curve.graph(), &p.names)?;
    let (q, trace) = quotient(&p.curve, &inv)?;
    let mut names = p.names.clone();
    names.extend(q.graph());
    let edge_fates = p
        .curve
        .graph()
        .edge_ids()
        .map(|e| {
            let fate = match trace.edge(e) {
                EdgeFate::Kept(t) => io::FateDoc {
                    fate: "kept".into(),
                    target: Some(names.edge(t)),
                },
                EdgeFate::Collapsed(v) => io::FateDoc {
                    fate: "collapsed".into(),
                    target: Some(names.vertex(v)),
                },
                EdgeFate::Deleted => io::FateDoc {
                    fate: "deleted".into(),
                    target: None,
                },
            };
            (p.names.edge(e), fate)
        })
        .collect();
    let doc = io::QuotientDoc {
        curve: io::graph_document(&q, &names),
        edge_fates,
    };
    if cli.verbose {
        eprintln!(
            "quotient: {} vertices, {} edges, betti1 {}",
            q.graph().n_vertices(),
            q.graph().n_edges(),
            q.graph().betti1(),
        );
    }
    emit(&doc);
    Ok(ExitCode::SUCCESS)
}

fn gen_cmd(cli: &Cli, seed: Option<u64>, genus: u32, max_edges: usize) -> Result<ExitCode> {
    let seed = resolve_seed(seed)?;
    let c = random_stable_curve(seed, genus, max_edges)?;
    let names = Names::canonical(c.graph());
    if cli.verbose {
        eprintln!(
            "seed {seed}: genus {} curve with {} edges",
            c.genus(),
            c.graph().n_edges(),
        );
    }
    emit(&io::graph_document(&c, &names));
    Ok(ExitCode::SUCCESS)
}

fn sweep_item(index: usize, source: String, c: &TropicalCurve) -> io::SweepItemDoc {
    let mut item = io::SweepItemDoc {
        index,
        source,
        genus: c.genus(),
        edges: c.graph().n_edges(),
        verdict: false,
        pipeline_ok: false,
        torelli_ok: false,
        agree: false,
        strongly: None,
        error: None,
    };
    match cross_validate(c) {
        Ok(cv) => {
            item.verdict = cv.verdict;
            item.pipeline_ok = cv.pipeline_ok;
            item.torelli_ok = cv.torelli_ok;
            item.agree = cv.agree();
        }
        Err(e) => item.error = Some(e.to_string()),
    }
    if item.verdict && item.error.is_none() {
        item.strongly = strongly_hyperelliptic_type(c.graph())
            .map(|w| w.is_some())
            .ok();
    }
    item
}

fn sweep(
    cli: &Cli,
    genus_max: u32,
    random: usize,
    max_edges: usize,
    seed: Option<u64>,
    files: &[PathBuf],
) -> Result<ExitCode> {
    let seed = resolve_seed(seed)?;
    let mut corpus: Vec<(String, TropicalCurve)> = Vec::new();
    for path in files {
        corpus.push((path.display().to_string(), load(path)?.curve));
    }
    for genus in 2..=genus_max {
        for (i, g) in enumerate_stable_graphs(genus).into_iter().enumerate() {
            if g.n_edges() <= max_edges {
                corpus.push((format!("stable-g{genus}-{i}"), TropicalCurve::with_unit_lengths(g)));
            }
        }
    }
    for i in 0..random {
        let genus = 2 + (i as u32 % 4);
        match random_stable_curve(seed.wrapping_add(i as u64), genus, max_edges) {
            Ok(c) => corpus.push((format!("random-{i}"), c)),
            Err(e) => eprintln!("warning: random sample {i} skipped: {e}"),
        }
    }

    let items: Vec<io::SweepItemDoc> = corpus
        .par_iter()
        .enumerate()
        .map(|(index, (source, c))| sweep_item(index, source.clone(), c))
        .collect();

    let doc = io::SweepDoc {
        total: items.len(),
        agreements: items.iter().filter(|i| i.agree).count(),
        disagreements: items.iter().filter(|i| !i.agree).map(|i| i.index).collect(),
        type_but_not_strongly: items
            .iter()
            .filter(|i| i.verdict && i.strongly == Some(false))
            .map(|i| i.index)
            .collect(),
        items,
    };
    if cli.verbose {
        eprintln!(
            "{} curves: {} agree, {} disagree; {} of hyperelliptic type without a hyperelliptic metric",
            doc.total,
            doc.agreements,
            doc.disagreements.len(),
            doc.type_but_not_strongly.len(),
        );
    }
    emit(&doc);
    Ok(ExitCode::SUCCESS)
}
