//! `wg`: exact Weingarten calculus for S(N), U(N), O(N), Sp(N), and the
//! circular ensembles, with a Monte Carlo cross-check.
//!
//! Subcommands: `fn` (class-label Weingarten values), `integrate` (exact
//! Haar integrals of matrix-entry monomials), `expand` (monotone-walk data
//! against the 1/N series), `gram` (invariant Gram matrices), `mc-verify`
//! (statistical comparison of exact values with sampled estimates).
//!
//! Exit codes: 0 success, 1 usage error, 2 mathematical error (pole or
//! infeasible computation), 3 a failed Monte Carlo verification.

use std::env;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use wg_cli::haar_mc::{self, McMonomial, Z_THRESHOLD};
use wg_core::combinat::{cycle_type, word_norm, IndexSequence, IntegerPartition, Permutation};
use wg_core::exactalg::{BigRational, RationalFunction, UniPolynomial};
use wg_core::integrate::{
    integrate_coe, integrate_cse, integrate_orthogonal_with, integrate_symmetric_group,
    integrate_symplectic_with, integrate_unitary_with, parse_real_monomial,
    parse_unitary_monomial, IntegralResult, RealMonomial, UnitaryMonomial,
};
use wg_core::symchar::{catalan_product, central_binomial_product};
use wg_core::weingarten::{
    coset_representative, gram_bruteforce, gram_orthogonal, gram_symmetric, gram_unitary,
    wg_coe, wg_cse, wg_unitary_asymptotic, GramMatrix, GroupKind, Regime, WgCache,
};

#[derive(Parser)]
#[command(
    name = "wg",
    about = "Exact Weingarten calculus: class values, Haar integrals, 1/N expansions, Gram matrices, and Monte Carlo verification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weingarten value for one class label (cycle type for U, coset type
    /// for O/Sp/COE/CSE, block count for S)
    #[command(name = "fn")]
    Fn(FnArgs),
    /// Exact Haar integral of a matrix-entry monomial
    Integrate(IntegrateArgs),
    /// Monotone-walk counts against the 1/N series of the unitary
    /// Weingarten function
    Expand(ExpandArgs),
    /// Gram matrix of the tensor invariants
    Gram(GramArgs),
    /// Monte Carlo cross-check of an exact integral
    #[command(name = "mc-verify")]
    McVerify(McVerifyArgs),
}

#[derive(Args)]
struct FnArgs {
    /// Group: S, U, O, Sp, COE, or CSE
    #[arg(long)]
    group: String,
    /// Class label as comma-separated partition parts, e.g. "2,1"
    #[arg(long = "type")]
    class: String,
    /// "symbolic" or a positive integer rank
    #[arg(long)]
    n: String,
    /// Emit JSON instead of plain text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct IntegrateArgs {
    /// Group: S, U, O, Sp, COE, or CSE
    #[arg(long)]
    group: String,
    /// "symbolic" or a positive integer rank
    #[arg(long)]
    n: String,
    /// Monomial: "i,j;k,l;..." for S/O/Sp, with conj:/plain: sections for
    /// U/COE/CSE; symplectic indices are literal over [2N]
    #[arg(long)]
    monomial: String,
    /// Symplectic only: the encoding half H, reading indices over [2H]
    /// (index H+k is the J-partner of index k). Required for a symbolic
    /// symplectic integral; a numeric rank must equal it.
    #[arg(long = "encoded-half")]
    encoded_half: Option<usize>,
    /// Emit JSON instead of plain text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExpandArgs {
    /// Degree d of the symmetric group S(d)
    #[arg(long)]
    d: usize,
    /// First permutation, one-line images "r(1),...,r(d)"
    #[arg(long)]
    rho: String,
    /// Second permutation, one-line images "s(1),...,s(d)"
    #[arg(long)]
    sigma: String,
    /// Highest walk order k to report (counts W_0 .. W_k)
    #[arg(long)]
    orders: usize,
    /// Emit JSON instead of plain text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GramArgs {
    /// Group: S, U, O, or Sp (circular ensembles have no Gram route)
    #[arg(long)]
    group: String,
    /// Invariant degree d
    #[arg(long)]
    d: usize,
    /// "symbolic" or a positive integer rank
    #[arg(long)]
    n: String,
    /// Emit JSON instead of plain text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct McVerifyArgs {
    /// Group: U, O, Sp, COE, or CSE
    #[arg(long)]
    group: String,
    /// Positive integer rank
    #[arg(long)]
    n: String,
    /// Monomial in the same grammar as `integrate`
    #[arg(long)]
    monomial: String,
    /// Number of Monte Carlo samples
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    /// RNG seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Emit JSON instead of plain text
    #[arg(long)]
    json: bool,
}

/// Errors carry their exit class: usage problems exit 1, mathematical
/// failures (poles, infeasible builds, out-of-range indices) exit 2.
enum AppError {
    Usage(String),
    Math(String),
}

fn usage<T>(msg: impl Into<String>) -> Result<T, AppError> {
    Err(AppError::Usage(msg.into()))
}

impl From<wg_core::weingarten::WeingartenError> for AppError {
    fn from(e: wg_core::weingarten::WeingartenError) -> Self {
        AppError::Math(e.0)
    }
}

impl From<wg_core::integrate::IntegrateError> for AppError {
    fn from(e: wg_core::integrate::IntegrateError) -> Self {
        AppError::Math(e.0)
    }
}

impl From<wg_core::combinat::CombinatError> for AppError {
    fn from(e: wg_core::combinat::CombinatError) -> Self {
        AppError::Math(e.0)
    }
}

impl From<wg_core::exactalg::ExactAlgError> for AppError {
    fn from(e: wg_core::exactalg::ExactAlgError) -> Self {
        AppError::Math(format!("{e}"))
    }
}

impl From<wg_core::symchar::SymCharError> for AppError {
    fn from(e: wg_core::symchar::SymCharError) -> Self {
        AppError::Math(e.0)
    }
}

impl From<haar_mc::HaarMcError> for AppError {
    fn from(e: haar_mc::HaarMcError) -> Self {
        AppError::Math(e.0)
    }
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (e.g. `wg gram ... | head`) like a
    // classic filter instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let outcome = match cli.command {
        Command::Fn(args) => cmd_fn(&args),
        Command::Integrate(args) => cmd_integrate(&args),
        Command::Expand(args) => cmd_expand(&args),
        Command::Gram(args) => cmd_gram(&args),
        Command::McVerify(args) => cmd_mc_verify(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared parsing helpers
// ---------------------------------------------------------------------------

fn parse_group(text: &str) -> Result<GroupKind, AppError> {
    GroupKind::parse(text).map_err(|e| AppError::Usage(e.0))
}

fn parse_regime(text: &str) -> Result<Regime, AppError> {
    if text == "symbolic" {
        return Ok(Regime::Symbolic);
    }
    match text.parse::<i64>() {
        Ok(n) if n >= 1 => Ok(Regime::Numeric(n)),
        _ => usage(format!(
            "--n must be \"symbolic\" or a positive integer, got {text:?}"
        )),
    }
}

fn parse_class(text: &str) -> Result<IntegerPartition, AppError> {
    let mut parts = Vec::new();
    for tok in text.split(',') {
        let tok = tok.trim();
        match tok.parse::<usize>() {
            Ok(p) if p >= 1 => parts.push(p),
            _ => {
                return usage(format!(
                    "--type takes comma-separated positive integers, got {tok:?}"
                ))
            }
        }
    }
    IntegerPartition::new(parts).map_err(|e| AppError::Usage(e.0))
}

fn parse_permutation(text: &str, d: usize) -> Result<Permutation, AppError> {
    let mut images = Vec::new();
    for tok in text.split(',') {
        let tok = tok.trim();
        match tok.parse::<usize>() {
            Ok(v) if v >= 1 => images.push(v),
            _ => {
                return usage(format!(
                    "permutations are comma-separated one-line images, got token {tok:?}"
                ))
            }
        }
    }
    if images.len() != d {
        return usage(format!(
            "permutation has {} images but --d is {d}",
            images.len()
        ));
    }
    Permutation::from_images(images).map_err(|e| AppError::Usage(e.0))
}

fn regime_tag(regime: Regime) -> &'static str {
    match regime {
        Regime::Symbolic => "symbolic",
        Regime::Numeric(_) => "numeric",
    }
}

fn regime_json(regime: Regime) -> Value {
    match regime {
        Regime::Symbolic => Value::String(String::from("symbolic")),
        Regime::Numeric(n) => Value::from(n),
    }
}

/// Canonical plain-text form of a value: expanded polynomials in N with
/// caret powers; numeric constants as reduced fractions.
fn format_value(value: &RationalFunction) -> String {
    value.format_with_var("N")
}

fn value_result_json(query: Value, result: &IntegralResult) -> Value {
    json!({
        "query": query,
        "value": result.value.to_json(),
        "regime": regime_tag(result.regime),
        "stable": result.stable,
    })
}

fn print_value_output(json_mode: bool, query: Value, result: &IntegralResult) {
    if json_mode {
        println!("{}", value_result_json(query, result));
    } else {
        println!("{}", format_value(&result.value));
    }
}

// ---------------------------------------------------------------------------
// Symbolic table persistence (WG_CACHE_DIR)
// ---------------------------------------------------------------------------

/// Table-backed groups persist symbolic Weingarten tables between runs when
/// WG_CACHE_DIR is set. Numeric tables stay in memory: entrywise tables do
/// not serialize, and numeric builds are cheap relative to symbolic solves.
struct TableStore {
    dir: Option<PathBuf>,
}

impl TableStore {
    fn from_env() -> TableStore {
        TableStore {
            dir: env::var_os("WG_CACHE_DIR").map(PathBuf::from),
        }
    }

    fn path(&self, group: GroupKind, degree: usize) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("wg-table-{group}-d{degree}-symbolic.json")))
    }

    /// Seeds the in-memory cache from disk when a valid file exists.
    fn preload(&self, cache: &mut WgCache, group: GroupKind, degree: usize) {
        let Some(path) = self.path(group, degree) else {
            return;
        };
        let Ok(text) = fs::read_to_string(&path) else {
            return;
        };
        let Ok(value) = serde_json::from_str::<Value>(&text) else {
            return;
        };
        if let Ok(table) = wg_core::weingarten::WeingartenTable::from_json(&value) {
            if table.group() == group
                && table.degree() == degree
                && table.regime() == Regime::Symbolic
            {
                cache.insert(table);
            }
        }
    }

    /// Writes a freshly built symbolic table back to disk.
    fn persist(&self, cache: &WgCache, group: GroupKind, degree: usize) {
        let Some(path) = self.path(group, degree) else {
            return;
        };
        if path.exists() {
            return;
        }
        let Some(table) = cache.get_if_present(group, degree, Regime::Symbolic) else {
            return;
        };
        let Ok(value) = table.to_json() else {
            return;
        };
        if let Some(parent) = path.parent() {
            let _ = fs::create_dir_all(parent);
        }
        if let Err(e) = fs::write(&path, value.to_string()) {
            eprintln!("warning: could not write table cache {}: {e}", path.display());
        }
    }
}

// ---------------------------------------------------------------------------
// fn
// ---------------------------------------------------------------------------

fn cmd_fn(args: &FnArgs) -> Result<u8, AppError> {
    let group = parse_group(&args.group)?;
    let class = parse_class(&args.class)?;
    let regime = parse_regime(&args.n)?;

    let (value, stable) = match group {
        GroupKind::SymmetricPermRep => {
            if class.len() != 1 {
                return usage(format!(
                    "the symmetric-group class label is one block count, got {:?}",
                    args.class
                ));
            }
            fn_from_table(group, &class, class.parts()[0], regime)?
        }
        GroupKind::UnitaryAdjoint | GroupKind::Orthogonal | GroupKind::Symplectic => {
            fn_from_table(group, &class, class.weight(), regime)?
        }
        GroupKind::COE | GroupKind::CSE => {
            // Class values at the even (staircase) coset representative;
            // the CSE weight of an odd permutation is the negative of its
            // class value.
            let rep = coset_representative(&class);
            let value = if group == GroupKind::COE {
                wg_coe(&rep, regime)?
            } else {
                wg_cse(&rep, regime)?
            };
            let stable = match regime {
                Regime::Symbolic => true,
                Regime::Numeric(n) => n >= class.weight() as i64,
            };
            (value, stable)
        }
    };

    let result = IntegralResult {
        value,
        regime,
        stable,
    };
    let query = json!({
        "command": "fn",
        "group": group.to_string(),
        "type": class.parts(),
        "n": regime_json(regime),
    });
    print_value_output(args.json, query, &result);
    Ok(0)
}

fn fn_from_table(
    group: GroupKind,
    class: &IntegerPartition,
    degree: usize,
    regime: Regime,
) -> Result<(RationalFunction, bool), AppError> {
    let store = TableStore::from_env();
    let mut cache = WgCache::new();
    if regime == Regime::Symbolic {
        store.preload(&mut cache, group, degree);
    }
    let table = cache.get(group, degree, regime)?;
    let value = table
        .entry(class)
        .cloned()
        .ok_or_else(|| AppError::Math(format!("no class {class} in the degree-{degree} table")))?;
    let stable = table.stable();
    if regime == Regime::Symbolic {
        store.persist(&cache, group, degree);
    }
    Ok((value, stable))
}

// ---------------------------------------------------------------------------
// integrate
// ---------------------------------------------------------------------------

/// The monomial grammar per group: plain pair lists for S/O/Sp, sectioned
/// conj:/plain: monomials for U and the circular ensembles.
enum ParsedMonomial {
    Real(RealMonomial),
    Complex(UnitaryMonomial),
}

fn parse_monomial_for(group: GroupKind, text: &str) -> Result<ParsedMonomial, AppError> {
    match group {
        GroupKind::SymmetricPermRep | GroupKind::Orthogonal | GroupKind::Symplectic => {
            parse_real_monomial(text)
                .map(ParsedMonomial::Real)
                .map_err(|e| AppError::Usage(format!("{e}")))
        }
        GroupKind::UnitaryAdjoint | GroupKind::COE | GroupKind::CSE => {
            parse_unitary_monomial(text)
                .map(ParsedMonomial::Complex)
                .map_err(|e| AppError::Usage(format!("{e}")))
        }
    }
}

/// Index words of a circular-ensemble monomial: the plain factors form the
/// first word, the conjugated factors the second, each entry contributing
/// its row and column index in order.
fn circular_words(
    m: &UnitaryMonomial,
) -> Result<(IndexSequence, IndexSequence), AppError> {
    let alphabet = m.max_index();
    let flatten = |pairs: &[(usize, usize)]| -> Result<IndexSequence, AppError> {
        let mut w = Vec::with_capacity(2 * pairs.len());
        for &(i, j) in pairs {
            w.push(i);
            w.push(j);
        }
        Ok(IndexSequence::new(w, alphabet)?)
    };
    Ok((flatten(m.plain_pairs())?, flatten(m.conj_pairs())?))
}

fn cmd_integrate(args: &IntegrateArgs) -> Result<u8, AppError> {
    let group = parse_group(&args.group)?;
    let regime = parse_regime(&args.n)?;
    if args.encoded_half.is_some() && group != GroupKind::Symplectic {
        return usage("--encoded-half applies to the symplectic group only");
    }
    let monomial = parse_monomial_for(group, &args.monomial)?;
    let store = TableStore::from_env();
    let mut cache = WgCache::new();

    let mut query = json!({
        "command": "integrate",
        "group": group.to_string(),
        "monomial": args.monomial,
        "n": regime_json(regime),
    });

    let result = match (group, &monomial) {
        (GroupKind::SymmetricPermRep, ParsedMonomial::Real(m)) => {
            let alphabet = m.max_index();
            let i = m.row_word(alphabet)?;
            let j = m.col_word(alphabet)?;
            integrate_symmetric_group(&i, &j, regime)?
        }
        (GroupKind::UnitaryAdjoint, ParsedMonomial::Complex(m)) => {
            let degree = m.plain_degree();
            if regime == Regime::Symbolic {
                store.preload(&mut cache, group, degree);
            }
            let r = integrate_unitary_with(&mut cache, m, regime)?;
            if regime == Regime::Symbolic {
                store.persist(&cache, group, degree);
            }
            r
        }
        (GroupKind::Orthogonal, ParsedMonomial::Real(m)) => {
            let degree = m.len() / 2;
            if regime == Regime::Symbolic {
                store.preload(&mut cache, group, degree);
            }
            let r = integrate_orthogonal_with(&mut cache, m, regime)?;
            if regime == Regime::Symbolic {
                store.persist(&cache, group, degree);
            }
            r
        }
        (GroupKind::Symplectic, ParsedMonomial::Real(m)) => {
            let encoded_half = match (args.encoded_half, regime) {
                (Some(h), Regime::Numeric(n)) if h as i64 != n => {
                    return usage(format!(
                        "--encoded-half {h} contradicts --n {n}: numeric symplectic \
                         integrals read indices over [2N]"
                    ))
                }
                (Some(h), _) => h,
                (None, Regime::Numeric(n)) => n as usize,
                (None, Regime::Symbolic) => {
                    return usage(
                        "a symbolic symplectic integral needs --encoded-half H to fix \
                         which indices mean k and which mean N+k (indices run over [2H])",
                    )
                }
            };
            query["encoded_half"] = Value::from(encoded_half as u64);
            let degree = m.len() / 2;
            if regime == Regime::Symbolic {
                store.preload(&mut cache, group, degree);
            }
            let r = integrate_symplectic_with(&mut cache, m, encoded_half, regime)?;
            if regime == Regime::Symbolic {
                store.persist(&cache, group, degree);
            }
            r
        }
        (GroupKind::COE, ParsedMonomial::Complex(m)) => {
            let (i, j) = circular_words(m)?;
            integrate_coe(&i, &j, regime)?
        }
        (GroupKind::CSE, ParsedMonomial::Complex(m)) => {
            let (i, j) = circular_words(m)?;
            integrate_cse(&i, &j, regime)?
        }
        _ => unreachable!("monomial flavor fixed by the group"),
    };

    print_value_output(args.json, query, &result);
    Ok(0)
}

// ---------------------------------------------------------------------------
// expand
// ---------------------------------------------------------------------------

fn cmd_expand(args: &ExpandArgs) -> Result<u8, AppError> {
    if args.d == 0 {
        return usage("--d must be positive");
    }
    let rho = parse_permutation(&args.rho, args.d)?;
    let sigma = parse_permutation(&args.sigma, args.d)?;

    let pi = rho.inverse().compose(&sigma);
    let alpha = cycle_type(&pi);
    let norm = word_norm(&pi);

    let walks = wg_unitary_asymptotic(&rho, &sigma, args.orders)?;

    // The exact function, scaled to a power series in 1/N with leading
    // coefficient W_0: (-1)^norm N^(d + norm) Wg(alpha).
    let wg = wg_core::weingarten::wg_unitary(&alpha)?;
    let mut scaled = wg.mul(&RationalFunction::from_polynomial(UniPolynomial::monomial(
        BigRational::from_integer(1.into()),
        args.d + norm,
    )));
    if norm % 2 == 1 {
        scaled = scaled.neg();
    }
    let series = scaled.series_at_infinity(2 * args.orders + 1)?;

    // Leading-order closed forms, reported side by side with enumeration;
    // they need not agree (the binomial product already fails at (3)).
    let enumeration = BigRational::from_integer(walks[0].into());
    let catalan = catalan_product(&alpha)?;
    let binomial = central_binomial_product(&alpha)?;

    if args.json {
        let out = json!({
            "query": {
                "command": "expand",
                "d": args.d,
                "rho": args.rho,
                "sigma": args.sigma,
                "orders": args.orders,
            },
            "class": alpha.parts(),
            "walks": walks,
            "series": series.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "leading": {
                "enumeration": enumeration.to_string(),
                "catalan_product": catalan.to_string(),
                "central_binomial_product": binomial.to_string(),
            },
        });
        println!("{out}");
        return Ok(0);
    }

    let class_text = alpha
        .parts()
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(",");
    println!("cycle type of rho^-1 sigma: {class_text}");
    for (k, w) in walks.iter().enumerate() {
        println!("W_{k} = {w}");
    }
    let series_text = series
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    println!("series of (-1)^{norm} N^{} Wg in powers of 1/N: {series_text}", args.d + norm);
    println!(
        "leading order W_0: enumeration = {enumeration}, Catalan product = {catalan}, \
         central-binomial product = {binomial}"
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// gram
// ---------------------------------------------------------------------------

fn cmd_gram(args: &GramArgs) -> Result<u8, AppError> {
    let group = parse_group(&args.group)?;
    let regime = parse_regime(&args.n)?;
    if args.d == 0 {
        return usage("--d must be positive");
    }

    // Symbolic Gram matrices exist for S/U/O; the symplectic Gram (signed
    // pairing deltas) and the circular ensembles are numeric-only or absent.
    let (labels, entries): (Vec<String>, Vec<Vec<RationalFunction>>) = match (group, regime) {
        (GroupKind::SymmetricPermRep, _)
        | (GroupKind::UnitaryAdjoint, _)
        | (GroupKind::Orthogonal, _) => {
            let g = match group {
                GroupKind::SymmetricPermRep => gram_symmetric(args.d)?,
                GroupKind::UnitaryAdjoint => gram_unitary(args.d)?,
                _ => gram_orthogonal(args.d)?,
            };
            match regime {
                Regime::Symbolic => gram_to_rows(&g),
                Regime::Numeric(n) => {
                    let gn = g.evaluate_at(n)?;
                    gram_rational_rows(&gn)
                }
            }
        }
        (GroupKind::Symplectic, Regime::Numeric(n)) => {
            let g = gram_bruteforce(group, args.d, n as usize)?;
            gram_rational_rows(&g)
        }
        (GroupKind::Symplectic, Regime::Symbolic) => {
            return Err(AppError::Math(String::from(
                "the symplectic Gram matrix is built entrywise from signed deltas: \
                 pass a numeric rank",
            )))
        }
        (GroupKind::COE | GroupKind::CSE, _) => {
            return Err(AppError::Math(String::from(
                "circular ensembles have no Gram-matrix route",
            )))
        }
    };

    if args.json {
        let out = json!({
            "query": {
                "command": "gram",
                "group": group.to_string(),
                "d": args.d,
                "n": regime_json(regime),
            },
            "labels": labels,
            "matrix": entries
                .iter()
                .map(|row| row.iter().map(RationalFunction::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "regime": regime_tag(regime),
        });
        println!("{out}");
        return Ok(0);
    }

    println!("group: {group}");
    println!("degree: {}", args.d);
    println!("regime: {}", regime_tag(regime));
    for (idx, label) in labels.iter().enumerate() {
        println!("label {idx}: {label}");
    }
    for row in &entries {
        let mut line = String::from("[");
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                line.push_str(", ");
            }
            let _ = write!(line, "{}", format_value(v));
        }
        line.push(']');
        println!("{line}");
    }
    Ok(0)
}

fn gram_to_rows(g: &GramMatrix<RationalFunction>) -> (Vec<String>, Vec<Vec<RationalFunction>>) {
    let labels = g.labels().iter().map(|l| l.to_string()).collect();
    let m = g.matrix();
    let rows = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).clone()).collect())
        .collect();
    (labels, rows)
}

fn gram_rational_rows(g: &GramMatrix<BigRational>) -> (Vec<String>, Vec<Vec<RationalFunction>>) {
    let labels = g.labels().iter().map(|l| l.to_string()).collect();
    let m = g.matrix();
    let rows = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| RationalFunction::from_rational(m.get(i, j).clone()))
                .collect()
        })
        .collect();
    (labels, rows)
}

// ---------------------------------------------------------------------------
// mc-verify
// ---------------------------------------------------------------------------

fn cmd_mc_verify(args: &McVerifyArgs) -> Result<u8, AppError> {
    let group = parse_group(&args.group)?;
    if group == GroupKind::SymmetricPermRep {
        return usage("mc-verify covers the continuous ensembles U, O, Sp, COE, CSE");
    }
    let n = match args.n.parse::<usize>() {
        Ok(n) if n >= 1 => n,
        _ => {
            return usage(format!(
                "--n must be a positive integer for mc-verify, got {:?}",
                args.n
            ))
        }
    };
    let monomial = match parse_monomial_for(group, &args.monomial)? {
        ParsedMonomial::Real(m) => McMonomial::Real(m),
        ParsedMonomial::Complex(m) => McMonomial::Complex(m),
    };

    let exact = haar_mc::exact_moment(group, &monomial, n)?;
    let est = haar_mc::estimate_monomial(group, &monomial, n, args.samples, args.seed)?;
    let z = haar_mc::compare(&exact, &est);
    let pass = z <= Z_THRESHOLD;

    if args.json {
        let out = json!({
            "query": {
                "command": "mc-verify",
                "group": group.to_string(),
                "monomial": args.monomial,
                "n": n,
                "samples": args.samples,
                "seed": args.seed,
            },
            "exact": RationalFunction::from_rational(exact.clone()).to_json(),
            "estimate": {
                "mean_re": est.mean.re,
                "mean_im": est.mean.im,
                "std_error": est.std_error,
                "n_samples": est.n_samples,
                "seed": est.seed,
            },
            "z": z,
            "pass": pass,
        });
        println!("{out}");
    } else {
        println!("exact = {exact}");
        println!("estimate = {:.9e} + {:.9e} i", est.mean.re, est.mean.im);
        println!("stderr = {:.9e}", est.std_error);
        println!("z = {z:.4}");
        println!("{}", if pass { "PASS" } else { "FAIL" });
    }
    Ok(if pass { 0 } else { 3 })
}
