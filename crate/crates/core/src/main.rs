use std::cmp::Ordering;
use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use hfrat::approx::{self, ApproxError, Codec, Surd};
use hfrat::bench::{self, BenchError, Format};
use hfrat::ratcodec::{self, CodecError, NatRep, Ratio};
use hfrat::sbtree::{self, Anchor, TreeError};
use hfrat::words::{self, Word, WordError};

#[derive(Parser)]
#[command(name = "hfrat", version, about = "Rationals as hereditarily finite sets")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Natural representation of N/D
    Encode {
        #[arg(allow_hyphen_values = true)]
        ratio: String,
    },
    /// Value of a natural representation
    Decode {
        #[arg(allow_hyphen_values = true)]
        seq: String,
    },
    /// Standard continued fraction of N/D
    Cf {
        #[arg(allow_hyphen_values = true)]
        ratio: String,
    },
    /// Value of a standard continued fraction
    CfEval {
        #[arg(allow_hyphen_values = true)]
        seq: String,
    },
    /// Order of two natural representations: <, = or >
    Compare {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// The extended Stern-Brocot tree
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Words and the sets they denote
    #[command(subcommand)]
    Set(SetCmd),
    /// Digit streams of a quadratic irrational
    Approx {
        #[arg(long, conflicts_with = "golden", required_unless_present = "golden")]
        sqrt: Option<u64>,
        /// Use the golden ratio (1+√5)/2
        #[arg(long)]
        golden: bool,
        #[arg(long)]
        terms: usize,
        #[arg(long, value_enum, default_value = "natural")]
        codec: CodecArg,
        /// Side-by-side rows for both codecs
        #[arg(long)]
        compare: bool,
    },
    /// Fibonacci-ratio codec timings
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = bench::DEFAULT_NS)]
        fib: Vec<u32>,
        #[arg(long, default_value_t = bench::DEFAULT_ITERATIONS)]
        iters: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
}

#[derive(Subcommand)]
enum TreeCmd {
    /// Every node at height H, in order
    Level {
        h: u64,
        #[arg(long)]
        dot: bool,
    },
    Children {
        #[arg(allow_hyphen_values = true)]
        seq: String,
    },
    /// Edge labels and route word from the root
    Route {
        #[arg(allow_hyphen_values = true)]
        seq: String,
    },
    /// Node I (0-based) at height H
    Node { h: u64, i: u64 },
    /// Symmetric pairs around an anchor, as JSON
    Symmetry {
        #[arg(long, allow_hyphen_values = true)]
        anchor: String,
        #[arg(long)]
        height: u64,
    },
}

#[derive(Subcommand)]
enum SetCmd {
    /// Canonical serialization of the set a word denotes
    Lower { word: String },
    /// Normal form of a word
    Eval {
        word: String,
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = words::DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Also print the numeric reading of the normal form
        #[arg(long)]
        value: bool,
    },
    /// Membership graph of the set a word denotes
    Dot { word: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum CodecArg {
    Natural,
    Standard,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<CodecError> for Failure {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<WordError> for Failure {
    fn from(e: WordError) -> Self {
        match e {
            WordError::Parse { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<TreeError> for Failure {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::Codec(c) => c.into(),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<ApproxError> for Failure {
    fn from(e: ApproxError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        Failure::Domain(e.to_string())
    }
}

fn seq(s: &str) -> Result<NatRep, Failure> {
    Ok(s.parse::<NatRep>()?)
}

fn word(s: &str) -> Result<Word, Failure> {
    Ok(s.parse::<Word>()?)
}

fn value_text(v: Option<Ratio>) -> String {
    v.map_or_else(|| "undefined".to_string(), |q| q.to_string())
}

fn cmp_symbol(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "<",
        Ordering::Equal => "=",
        Ordering::Greater => ">",
    }
}

fn run(cmd: Cmd) -> Result<String, Failure> {
    let mut out = String::new();
    match cmd {
        Cmd::Encode { ratio } => {
            writeln!(out, "{}", ratcodec::encode(&ratcodec::parse_ratio(&ratio)?)).unwrap();
        }
        Cmd::Decode { seq: s } => {
            writeln!(out, "{}", ratcodec::decode(&seq(&s)?)?).unwrap();
        }
        Cmd::Cf { ratio } => {
            let q = ratcodec::parse_ratio(&ratio)?;
            writeln!(out, "{}", ratcodec::format_seq(&ratcodec::cf_encode(&q))).unwrap();
        }
        Cmd::CfEval { seq: s } => {
            writeln!(out, "{}", ratcodec::cf_eval(&ratcodec::parse_entries(&s)?)?).unwrap();
        }
        Cmd::Compare { a, b } => {
            writeln!(out, "{}", cmp_symbol(ratcodec::compare(&seq(&a)?, &seq(&b)?)?)).unwrap();
        }
        Cmd::Tree(t) => tree(t, &mut out)?,
        Cmd::Set(s) => set(s, &mut out)?,
        Cmd::Approx { sqrt, golden, terms, codec, compare } => {
            let x = if golden { Surd::golden() } else { Surd::sqrt(sqrt.expect("clap requires one"))? };
            approximate(&x, terms, codec, compare, &mut out)?;
        }
        Cmd::Bench { fib, iters, format, out: path } => {
            let rows = bench::run_suite(&fib, iters)?;
            let format = match format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
            eprintln!("# {} iterations={iters}", bench::build_info());
            let text = bench::emit(&rows, format);
            match path {
                Some(p) => std::fs::write(&p, text)
                    .map_err(|e| Failure::Domain(format!("cannot write {}: {e}", p.display())))?,
                None => out = text,
            }
        }
    }
    Ok(out)
}

fn tree(t: TreeCmd, out: &mut String) -> Result<(), Failure> {
    match t {
        TreeCmd::Level { h, dot: true } => out.push_str(&sbtree::level_dot(h)?),
        TreeCmd::Level { h, dot: false } => {
            let nodes = sbtree::level(h)?;
            let texts: Vec<String> = nodes.iter().map(|s| s.to_string()).collect();
            let iw = (nodes.len().saturating_sub(1)).to_string().len();
            let sw = texts.iter().map(|t| t.chars().count()).max().unwrap_or(0);
            for (i, (s, t)) in nodes.iter().zip(&texts).enumerate() {
                let v = ratcodec::decode(s)?;
                writeln!(out, "{i:>iw$}  {t:<sw$}  {v}").unwrap();
            }
        }
        TreeCmd::Children { seq: s } => {
            for (c, label) in sbtree::children(&seq(&s)?) {
                writeln!(out, "{label:<3}  {c}  {}", ratcodec::decode(&c)?).unwrap();
            }
        }
        TreeCmd::Route { seq: s } => {
            let s = seq(&s)?;
            let labels: Vec<&str> = sbtree::route(&s).iter().map(|l| l.symbol()).collect();
            let rw = sbtree::route_word(&s);
            let nf = words::evaluate(&rw)?;
            writeln!(out, "labels: {}", labels.join(" ")).unwrap();
            writeln!(out, "word: {rw}").unwrap();
            writeln!(out, "normal: {nf}").unwrap();
            writeln!(out, "value: {}", value_text(words::valuate_normal(&nf)?)).unwrap();
        }
        TreeCmd::Node { h, i } => {
            let s = sbtree::node_at(h, i)?;
            writeln!(out, "{s}  {}", ratcodec::decode(&s)?).unwrap();
        }
        TreeCmd::Symmetry { anchor, height } => {
            let report = sbtree::check_symmetry(Anchor::parse(&anchor)?, height)?;
            out.push_str(&serde_json::to_string_pretty(&report).expect("report serializes"));
            out.push('\n');
        }
    }
    Ok(())
}

fn set(s: SetCmd, out: &mut String) -> Result<(), Failure> {
    match s {
        SetCmd::Lower { word: w } => {
            writeln!(out, "{}", words::lower(&word(&w)?)?.serialize()).unwrap();
        }
        SetCmd::Eval { word: w, trace, max_steps, value } => {
            let w = word(&w)?;
            let (nf, steps) = words::evaluate_traced(&w, max_steps)?;
            if trace {
                for t in &steps {
                    writeln!(out, "{t}").unwrap();
                }
            }
            writeln!(out, "{nf}").unwrap();
            if value {
                writeln!(out, "value: {}", value_text(words::valuate_normal(&nf)?)).unwrap();
            }
        }
        SetCmd::Dot { word: w } => out.push_str(&words::lower(&word(&w)?)?.to_dot()),
    }
    Ok(())
}

fn approximate(x: &Surd, terms: usize, codec: CodecArg, compare: bool, out: &mut String) -> Result<(), Failure> {
    if terms == 0 {
        return Err(Failure::Usage("--terms must be at least 1".into()));
    }
    let nat = approx::nat_digits(x, terms)?;
    let cf = approx::cf_digits(x, terms)?;
    let row = |d: &[BigInt], c: Codec| -> Result<(Ratio, Surd), Failure> {
        Ok((approx::convergent(d, c)?, approx::convergent_error(x, d, c)?))
    };
    if compare {
        writeln!(out, "x = {x}").unwrap();
        writeln!(out, "natural: {}", ratcodec::format_seq(&nat)).unwrap();
        writeln!(out, "standard: {}", ratcodec::format_seq(&cf)).unwrap();
        writeln!(out, "k\tnatural\tnatural_error\tstandard\tstandard_error\tnatural_vs_standard").unwrap();
        for k in 1..=terms {
            let (nv, ne) = row(&nat[..k], Codec::Natural)?;
            let (sv, se) = row(&cf[..k], Codec::Standard)?;
            let o = ne.cmp_surd(&se).expect("same radicand");
            writeln!(out, "{k}\t{nv}\t{ne}\t{sv}\t{se}\t{}", cmp_symbol(o)).unwrap();
        }
    } else {
        let (digits, c) = match codec {
            CodecArg::Natural => (&nat, Codec::Natural),
            CodecArg::Standard => (&cf, Codec::Standard),
        };
        writeln!(out, "{}", ratcodec::format_seq(digits)).unwrap();
        writeln!(out, "k\tconvergent\terror").unwrap();
        for k in 1..=terms {
            let (v, e) = row(&digits[..k], c)?;
            writeln!(out, "{k}\t{v}\t{e}").unwrap();
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 2 {
                let usage = e.render().to_string();
                let first = usage.lines().next().unwrap_or("error");
                eprintln!("{first}");
                eprintln!("usage: hfrat <encode|decode|cf|cf-eval|compare|tree|set|approx|bench> ... (see --help)");
            } else {
                print!("{e}");
            }
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("usage: hfrat <encode|decode|cf|cf-eval|compare|tree|set|approx|bench> ... (see --help)");
            ExitCode::from(2)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
