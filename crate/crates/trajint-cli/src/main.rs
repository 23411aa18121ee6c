//! `trajint` — price claims on finite trajectory trees by superhedging.
//!
//! Exit codes: 0 success, 1 verified property failed, 2 usage or file
//! error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use trajint::io::{
    certificate_to_file, load_model, parse_leafset, parse_payoff_spec, save_model, NumberLiteral,
};
use trajint::{
    check_integrable, check_k_property, check_l_property, classify_process, construct,
    gen_example1, gen_example2, gen_lattice, hedge_certificate, is_conditionally_null, oracle,
    price_process, scan_tree, upper_values, verify_convergence, verify_tower, ConstraintSet,
    ConvergenceMode, Ext, HoldingInterval, LatticeKind, LeafValues, NodeKind, NodePath, Payoff,
    ProcessClass, ProcessMode, Scalar, TrajectoryTree,
};

#[derive(Parser)]
#[command(name = "trajint", version, about = "Trajectory-tree pricing by superhedging")]
struct Cli {
    /// Worker threads for the grid oracle (falls back to TRAJINT_THREADS).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a model file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Classify every interior node and print summary flags.
    Classify {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        exact: bool,
    },
    /// Price a payoff at a node.
    Price {
        model: PathBuf,
        #[arg(long)]
        payoff: String,
        #[arg(long, default_value = "root")]
        node: String,
        #[arg(long, value_enum)]
        mode: PriceMode,
        #[command(flatten)]
        common: CommonOpts,
        /// Write the dominating hedge here.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Verify pricing properties; exits 1 when one fails.
    Verify {
        model: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        properties: Vec<Property>,
        #[arg(long)]
        payoff: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        trials: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Price processes, tower checks, martingale classification.
    Martingale {
        model: PathBuf,
        #[arg(long)]
        payoff: String,
        #[arg(long, value_enum)]
        mode: ProcMode,
        #[arg(long)]
        classify: bool,
        /// Check the iterated-conditioning chain between two depths, `j,k`.
        #[arg(long)]
        check_tower: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Hedging norm of a leaf set at a node.
    Nullcheck {
        model: PathBuf,
        /// `@file` or inline `0,0;1,0`.
        #[arg(long)]
        set: String,
        #[arg(long, default_value = "root")]
        node: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Brute-force cross-checks (float mode only).
    Oracle {
        model: PathBuf,
        #[arg(long)]
        payoff: String,
        #[arg(long, value_enum)]
        method: OracleMethod,
        #[arg(long, default_value = "root")]
        node: String,
        #[arg(long, default_value_t = 32.0)]
        h_range: f64,
        #[arg(long, default_value_t = 1e-4)]
        step: f64,
        /// Superposition terms for `enum`.
        #[arg(long, default_value_t = 1)]
        terms: usize,
        /// Comma-separated coefficient grid for `enum`.
        #[arg(long)]
        coeff_grid: Option<String>,
    },
}

#[derive(Args)]
struct CommonOpts {
    /// Exact rational arithmetic (accepts `p/q` literals in files).
    #[arg(long)]
    exact: bool,
    /// Holding bounds `lo,hi`; each side a number or `-inf`/`inf`.
    #[arg(long)]
    constraint: Option<String>,
}

#[derive(Subcommand)]
enum GenKind {
    /// Paths at 1 jumping once to 2 (type I arbitrage nodes).
    Example1(GenCommon),
    /// Paths at 2 jumping once to 3 or 1 (arbitrage-free).
    Example2(GenCommon),
    /// Multiplicative two-factor lattice.
    Binomial {
        #[command(flatten)]
        common: GenCommon,
        #[arg(long, default_value = "1")]
        s0: String,
        #[arg(short, long)]
        u: String,
        #[arg(short, long)]
        d: String,
    },
    /// Multiplicative three-factor lattice.
    Trinomial {
        #[command(flatten)]
        common: GenCommon,
        #[arg(long, default_value = "1")]
        s0: String,
        #[arg(short, long)]
        u: String,
        #[arg(short, long)]
        m: String,
        #[arg(short, long)]
        d: String,
    },
}

#[derive(Args)]
struct GenCommon {
    #[arg(long)]
    horizon: usize,
    /// Output path (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Write exact rational literals.
    #[arg(long)]
    exact: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum PriceMode {
    Upper,
    Lower,
    Norm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProcMode {
    Upper,
    Lower,
    Integral,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Property {
    L,
    K,
    Integrable,
    Convergence,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleMethod {
    Grid,
    Dual,
    Enum,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli
        .threads
        .or_else(|| std::env::var("TRAJINT_THREADS").ok().and_then(|v| v.parse().ok()));
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Gen { kind } => cmd_gen(kind),
        Command::Classify {
            model,
            format,
            exact,
        } => {
            if exact {
                cmd_classify::<BigRational>(&model, format)
            } else {
                cmd_classify::<f64>(&model, format)
            }
        }
        Command::Price {
            model,
            payoff,
            node,
            mode,
            common,
            certificate,
        } => {
            if common.exact {
                cmd_price::<BigRational>(&model, &payoff, &node, mode, &common, certificate)
            } else {
                cmd_price::<f64>(&model, &payoff, &node, mode, &common, certificate)
            }
        }
        Command::Verify {
            model,
            properties,
            payoff,
            seed,
            trials,
            common,
        } => {
            if common.exact {
                cmd_verify::<BigRational>(&model, &properties, payoff.as_deref(), seed, trials, &common)
            } else {
                cmd_verify::<f64>(&model, &properties, payoff.as_deref(), seed, trials, &common)
            }
        }
        Command::Martingale {
            model,
            payoff,
            mode,
            classify,
            check_tower,
            out,
            common,
        } => {
            if common.exact {
                cmd_martingale::<BigRational>(&model, &payoff, mode, classify, check_tower, out, &common)
            } else {
                cmd_martingale::<f64>(&model, &payoff, mode, classify, check_tower, out, &common)
            }
        }
        Command::Nullcheck {
            model,
            set,
            node,
            common,
        } => {
            if common.exact {
                cmd_nullcheck::<BigRational>(&model, &set, &node, &common)
            } else {
                cmd_nullcheck::<f64>(&model, &set, &node, &common)
            }
        }
        Command::Oracle {
            model,
            payoff,
            method,
            node,
            h_range,
            step,
            terms,
            coeff_grid,
        } => cmd_oracle(&model, &payoff, method, &node, h_range, step, terms, coeff_grid),
    }
}

fn cmd_gen(kind: GenKind) -> anyhow::Result<u8> {
    fn emit<T: Scalar>(tree: &TrajectoryTree<T>, out: Option<&Path>) -> anyhow::Result<u8> {
        match out {
            Some(path) => save_model(tree, path)?,
            None => println!(
                "{}",
                serde_json::to_string_pretty(&trajint::io::model_to_file(tree))?
            ),
        }
        Ok(0)
    }
    fn lattice<T: Scalar>(
        kind: &LatticeKind<T>,
        common: &GenCommon,
        s0: &str,
    ) -> anyhow::Result<u8> {
        let s0 = parse_scalar::<T>(s0)?;
        let tree = gen_lattice(kind, common.horizon, s0)?;
        emit(&tree, common.out.as_deref())
    }
    match kind {
        GenKind::Example1(common) => {
            if common.exact {
                emit(&gen_example1::<BigRational>(common.horizon), common.out.as_deref())
            } else {
                emit(&gen_example1::<f64>(common.horizon), common.out.as_deref())
            }
        }
        GenKind::Example2(common) => {
            if common.exact {
                emit(&gen_example2::<BigRational>(common.horizon), common.out.as_deref())
            } else {
                emit(&gen_example2::<f64>(common.horizon), common.out.as_deref())
            }
        }
        GenKind::Binomial { common, s0, u, d } => {
            if common.exact {
                let kind = LatticeKind::Binomial {
                    u: parse_scalar::<BigRational>(&u)?,
                    d: parse_scalar::<BigRational>(&d)?,
                };
                lattice(&kind, &common, &s0)
            } else {
                let kind = LatticeKind::Binomial {
                    u: parse_scalar::<f64>(&u)?,
                    d: parse_scalar::<f64>(&d)?,
                };
                lattice(&kind, &common, &s0)
            }
        }
        GenKind::Trinomial { common, s0, u, m, d } => {
            if common.exact {
                let kind = LatticeKind::Trinomial {
                    u: parse_scalar::<BigRational>(&u)?,
                    m: parse_scalar::<BigRational>(&m)?,
                    d: parse_scalar::<BigRational>(&d)?,
                };
                lattice(&kind, &common, &s0)
            } else {
                let kind = LatticeKind::Trinomial {
                    u: parse_scalar::<f64>(&u)?,
                    m: parse_scalar::<f64>(&m)?,
                    d: parse_scalar::<f64>(&d)?,
                };
                lattice(&kind, &common, &s0)
            }
        }
    }
}

fn parse_scalar<T: Scalar>(text: &str) -> anyhow::Result<T> {
    T::parse_literal(text).ok_or_else(|| anyhow!("cannot parse number {text:?}"))
}

fn parse_node(text: &str) -> anyhow::Result<NodePath> {
    NodePath::parse(text).ok_or_else(|| anyhow!("cannot parse node path {text:?}"))
}

fn parse_constraint<T: Scalar>(common: &CommonOpts) -> anyhow::Result<ConstraintSet<T>> {
    let Some(spec) = &common.constraint else {
        return Ok(ConstraintSet::unrestricted());
    };
    let (lo, hi) = spec
        .split_once(',')
        .ok_or_else(|| anyhow!("constraint must be lo,hi"))?;
    let parse_side = |s: &str| -> anyhow::Result<Ext<T>> {
        match s.trim() {
            "-inf" => Ok(Ext::NegInf),
            "inf" | "+inf" => Ok(Ext::PosInf),
            lit => Ok(Ext::Finite(parse_scalar(lit)?)),
        }
    };
    let interval = HoldingInterval::new(parse_side(lo)?, parse_side(hi)?)?;
    Ok(ConstraintSet::uniform(interval))
}

fn load_payoff<T: Scalar>(spec: &str, model_path: &Path) -> anyhow::Result<Payoff<T>> {
    let base = model_path.parent().unwrap_or(Path::new("."));
    Ok(parse_payoff_spec(spec, base)?)
}

fn cmd_classify<T: Scalar>(model: &Path, format: Format) -> anyhow::Result<u8> {
    let tree: TrajectoryTree<T> = load_model(model).context("loading model")?;
    let scan = scan_tree(&tree);
    let kind_name = |k: NodeKind| match k {
        NodeKind::UpDown => "up-down",
        NodeKind::Flat => "flat",
        NodeKind::ArbitrageI => "arbitrage-I",
        NodeKind::ArbitrageII => "arbitrage-II",
    };
    match format {
        Format::Json => {
            let nodes: Vec<_> = scan
                .classes
                .iter()
                .map(|(path, c)| {
                    serde_json::json!({
                        "node": path.indices(),
                        "class": kind_name(c.kind),
                        "zero_neutral": c.zero_neutral,
                        "sup_inc": NumberLiteral::render(&c.sup_inc),
                        "inf_inc": NumberLiteral::render(&c.inf_inc),
                    })
                })
                .collect();
            let doc = serde_json::json!({
                "nodes": nodes,
                "locally_0_neutral": scan.locally_zero_neutral,
                "locally_arbitrage_free": scan.locally_arbitrage_free,
                "has_type_II": scan.has_type_ii,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Format::Tsv => {
            println!("node\tclass\tzero_neutral\tsup_inc\tinf_inc");
            for (path, c) in &scan.classes {
                println!(
                    "{path}\t{}\t{}\t{}\t{}",
                    kind_name(c.kind),
                    c.zero_neutral,
                    c.sup_inc,
                    c.inf_inc
                );
            }
            println!(
                "# locally_0_neutral={} locally_arbitrage_free={} has_type_II={}",
                scan.locally_zero_neutral, scan.locally_arbitrage_free, scan.has_type_ii
            );
        }
        Format::Text => {
            for (path, c) in &scan.classes {
                println!(
                    "{path:<12} {:<12} zero_neutral={:<5} increments in [{}, {}]",
                    kind_name(c.kind),
                    c.zero_neutral,
                    c.inf_inc,
                    c.sup_inc
                );
            }
            println!(
                "locally_0_neutral={} locally_arbitrage_free={} has_type_II={}",
                scan.locally_zero_neutral, scan.locally_arbitrage_free, scan.has_type_ii
            );
        }
    }
    Ok(0)
}

fn cmd_price<T: Scalar>(
    model: &Path,
    payoff: &str,
    node: &str,
    mode: PriceMode,
    common: &CommonOpts,
    certificate: Option<PathBuf>,
) -> anyhow::Result<u8> {
    let tree: TrajectoryTree<T> = load_model(model).context("loading model")?;
    let payoff: Payoff<T> = load_payoff(payoff, model)?;
    let node = parse_node(node)?;
    let constraint = parse_constraint::<T>(common)?;
    let value = match mode {
        PriceMode::Upper => trajint::upper_integral(&tree, &payoff, &node, &constraint)?,
        PriceMode::Lower => trajint::lower_integral(&tree, &payoff, &node, &constraint)?,
        PriceMode::Norm => trajint::conditional_norm(&tree, &payoff, &node, &constraint)?,
    };
    println!("{value}");
    if let Some(path) = certificate {
        let target = match mode {
            PriceMode::Norm => abs_payoff(&tree, &payoff)?,
            PriceMode::Upper => payoff.clone(),
            PriceMode::Lower => bail!("certificates witness upper prices and norms only"),
        };
        let cert = hedge_certificate(&tree, &target, &node, &constraint, T::zero())?;
        std::fs::write(
            &path,
            serde_json::to_string_pretty(&certificate_to_file(&cert))?,
        )?;
        eprintln!(
            "certificate: {} element(s), premium {} -> {}",
            cert.elements.len(),
            cert.total_premium,
            path.display()
        );
    }
    Ok(0)
}

/// `|f|` as an explicit leaf table, for norm certificates.
fn abs_payoff<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &Payoff<T>,
) -> anyhow::Result<Payoff<T>> {
    let mut table = BTreeMap::new();
    for leaf in tree.leaves() {
        table.insert(leaf.clone(), f.evaluate(tree, leaf)?.abs_ext());
    }
    Ok(Payoff::LeafTable(table))
}

fn cmd_verify<T: Scalar>(
    model: &Path,
    properties: &[Property],
    payoff: Option<&str>,
    seed: u64,
    trials: usize,
    common: &CommonOpts,
) -> anyhow::Result<u8> {
    let tree: TrajectoryTree<T> = load_model(model).context("loading model")?;
    let constraint = parse_constraint::<T>(common)?;
    let payoff: Option<Payoff<T>> = payoff.map(|s| load_payoff(s, model)).transpose()?;
    let mut failed = false;

    for prop in properties {
        match prop {
            Property::L => {
                let map = check_l_property(&tree, &constraint);
                let bad: Vec<_> = map.iter().filter(|(_, ok)| !**ok).collect();
                if bad.is_empty() {
                    println!("property L: PASS ({} nodes price the zero claim at 0)", map.len());
                } else {
                    failed = true;
                    println!(
                        "property L: FAIL at {} node(s), first {}",
                        bad.len(),
                        bad[0].0
                    );
                }
            }
            Property::K => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut bad = None;
                for _ in 0..trials {
                    let f = construct::random_elementary::<T, T>(
                        &mut rng,
                        &tree,
                        &NodePath::root(),
                    );
                    let r = check_k_property(&tree, &f, &constraint)?;
                    if !r.holds {
                        bad = Some(r);
                        break;
                    }
                }
                match bad {
                    None => println!("property K: PASS ({trials} random portfolios)"),
                    Some(r) => {
                        failed = true;
                        println!(
                            "property K: FAIL at {} (norm+ {} vs I {} + norm- {})",
                            r.node, r.norm_pos, r.integral, r.norm_neg
                        );
                    }
                }
            }
            Property::Integrable => {
                let f = payoff
                    .as_ref()
                    .ok_or_else(|| anyhow!("--payoff required for the integrable check"))?;
                let mut ok = true;
                for depth in 0..=tree.horizon() {
                    let r = check_integrable(&tree, f, depth, &constraint)?;
                    if !r.integrable {
                        ok = false;
                        let node = r.exceptional.iter().next().cloned().unwrap_or_default();
                        println!("integrable: FAIL at depth {depth}, node {node}");
                        break;
                    }
                }
                if ok {
                    println!("integrable: PASS at every depth");
                } else {
                    failed = true;
                }
            }
            Property::Convergence => {
                let f = payoff
                    .as_ref()
                    .ok_or_else(|| anyhow!("--payoff required for the convergence check"))?;
                let abs = abs_payoff(&tree, f)?;
                let members = trials.clamp(2, 16);
                let family: Vec<Payoff<T>> = (1..=members)
                    .map(|n| {
                        let c = T::one() - T::one() / T::from_int(n as i64);
                        scale_payoff(&tree, &abs, &c)
                    })
                    .collect::<anyhow::Result<_>>()?;
                let r = verify_convergence(&tree, &family, 0, ConvergenceMode::Monotone, &constraint)?;
                if r.ok {
                    println!("convergence: PASS ({} members, residuals shrink to 0)", members);
                } else {
                    failed = true;
                    println!("convergence: FAIL, residuals {:?}", r.residuals.iter().map(|e| e.to_f64()).collect::<Vec<_>>());
                }
            }
        }
    }
    Ok(if failed { 1 } else { 0 })
}

fn scale_payoff<T: Scalar>(
    tree: &TrajectoryTree<T>,
    f: &Payoff<T>,
    c: &T,
) -> anyhow::Result<Payoff<T>> {
    let mut table = BTreeMap::new();
    for leaf in tree.leaves() {
        table.insert(leaf.clone(), Ext::scale(c, &f.evaluate(tree, leaf)?));
    }
    Ok(Payoff::LeafTable(table))
}

fn cmd_martingale<T: Scalar>(
    model: &Path,
    payoff: &str,
    mode: ProcMode,
    classify: bool,
    check_tower: Option<String>,
    out: Option<PathBuf>,
    common: &CommonOpts,
) -> anyhow::Result<u8> {
    let tree: TrajectoryTree<T> = load_model(model).context("loading model")?;
    let payoff: Payoff<T> = load_payoff(payoff, model)?;
    let constraint = parse_constraint::<T>(common)?;
    let mode = match mode {
        ProcMode::Upper => ProcessMode::Upper,
        ProcMode::Lower => ProcessMode::Lower,
        ProcMode::Integral => ProcessMode::Integral,
    };
    let process = match price_process(&tree, &payoff, mode, &constraint) {
        Ok(p) => p,
        Err(e @ trajint::Error::NotIntegrable(_)) => {
            println!("not integrable: {e}");
            return Ok(1);
        }
        Err(e) => return Err(e.into()),
    };
    let mut failed = false;

    for depth in 0..=tree.horizon() {
        let row: Vec<String> = process
            .at_depth(depth)
            .iter()
            .map(|(p, v)| format!("{p}={v}"))
            .collect();
        println!("depth {depth}: {}", row.join("  "));
    }
    if classify {
        let class = classify_process(&tree, &process, &constraint)?;
        let name = match class {
            ProcessClass::Martingale => "martingale",
            ProcessClass::Submartingale => "submartingale",
            ProcessClass::Supermartingale => "supermartingale",
            ProcessClass::None => "none",
        };
        println!("classification: {name}");
    }
    if let Some(spec) = check_tower {
        let (j, k) = spec
            .split_once(',')
            .ok_or_else(|| anyhow!("--check-tower expects j,k"))?;
        let (j, k): (usize, usize) = (j.trim().parse()?, k.trim().parse()?);
        let r = verify_tower(&tree, &payoff, j, k, &constraint)?;
        println!(
            "tower {j},{k}: chain {}{}",
            if r.chain_ok { "PASS" } else { "FAIL" },
            match r.integral_ok {
                Some(true) => ", integral equality PASS",
                Some(false) => ", integral equality FAIL",
                None => " (claim not integrable; ordering only)",
            }
        );
        if !r.chain_ok || r.integral_ok == Some(false) {
            failed = true;
        }
    }
    if let Some(path) = out {
        let values: Vec<_> = process
            .values
            .iter()
            .map(|(p, v)| {
                serde_json::json!({
                    "node": p.indices(),
                    "value": NumberLiteral::render_ext(v),
                })
            })
            .collect();
        let doc = serde_json::json!({
            "mode": match mode {
                ProcessMode::Upper => "upper",
                ProcessMode::Lower => "lower",
                ProcessMode::Integral => "integral",
            },
            "values": values,
        });
        std::fs::write(&path, serde_json::to_string_pretty(&doc)?)?;
    }
    Ok(if failed { 1 } else { 0 })
}

fn cmd_nullcheck<T: Scalar>(
    model: &Path,
    set: &str,
    node: &str,
    common: &CommonOpts,
) -> anyhow::Result<u8> {
    let tree: TrajectoryTree<T> = load_model(model).context("loading model")?;
    let base = model.parent().unwrap_or(Path::new("."));
    let set = parse_leafset(set, base)?;
    let node = parse_node(node)?;
    let constraint = parse_constraint::<T>(common)?;
    let r = is_conditionally_null(&tree, &set, &node, &constraint)?;
    println!(
        "norm of indicator at {}: {} -> {}",
        r.node,
        r.norm_value,
        if r.is_null { "null" } else { "not null" }
    );
    if let Some(cert) = &r.certificate {
        println!(
            "dominating hedge: {} element(s), premium {}",
            cert.elements.len(),
            cert.total_premium
        );
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_oracle(
    model: &Path,
    payoff: &str,
    method: OracleMethod,
    node: &str,
    h_range: f64,
    step: f64,
    terms: usize,
    coeff_grid: Option<String>,
) -> anyhow::Result<u8> {
    let tree: TrajectoryTree<f64> = load_model(model).context("loading model")?;
    let payoff: Payoff<f64> = load_payoff(payoff, model)?;
    let node = parse_node(node)?;
    let f: LeafValues<f64> = payoff.resolve(&tree)?;
    let constraint = ConstraintSet::unrestricted();
    let dp = upper_values(&tree, &f, &constraint);
    match method {
        OracleMethod::Grid => {
            let v = oracle::grid_superhedge(&tree, &f, &node, h_range, step)?;
            println!("grid value:   {v}");
            println!("engine value: {}", dp.at(&node));
        }
        OracleMethod::Dual => {
            let n = tree.node(&node)?;
            if n.is_leaf() {
                bail!("dual oracle needs an interior node");
            }
            let points: Vec<(f64, f64)> = n
                .children()
                .iter()
                .enumerate()
                .map(|(i, child)| {
                    let delta = child.value() - n.value();
                    (delta, dp.at(&node.child(i)).to_f64())
                })
                .collect();
            let v = oracle::martingale_measure_value(&points)?;
            println!("dual value:   {v}");
            println!("engine value: {}", dp.at(&node));
        }
        OracleMethod::Enum => {
            let grid: Vec<f64> = match coeff_grid {
                Some(s) => s
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| anyhow!("bad coefficient grid: {e}"))?,
                None => vec![-1.0, -0.5, 0.0, 0.5, 1.0, 2.0],
            };
            let v = oracle::enumerate_superpositions(&tree, &f, &node, terms, &grid)?;
            println!("superposition value ({terms} terms): {v}");
            println!("engine value: {}", dp.at(&node));
        }
    }
    Ok(0)
}
