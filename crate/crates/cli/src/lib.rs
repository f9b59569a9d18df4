//! `qgk`: build and inspect module actions, run the lemma checks and
//! produce growth reports. Output is JSON on stdout (or `--out`).

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use qfa_gk::corep::{
    action_difference, action_matrix_dense, elementary_action, parse_torus, unitarity_defect, LetterTable, WordAction,
};
use qfa_gk::fock::truncated_basis;
use qfa_gk::gkdim::hitting::{hitting_polynomials_with, SigmaConvention};
use qfa_gk::gkdim::lemmas::{block_ranks, tail_map, verify_part_operators, verify_unique_path, window, Check};
use qfa_gk::gkdim::{gk_report, GrowthConfig};
use qfa_gk::weyl::{parse_normal_form, parse_word, Family, NormalForm, ParabolicSubset, WeylGroup};
use qfa_gk::{AlgebraSpec, Error};
use serde_json::{json, Value};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qgk", version, about = "Modules of quantized function algebras and their growth")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Element matrix, length, normal form and quotient membership.
    Weyl,
    /// Paths of one entry of the action, optionally as a truncated matrix.
    Act,
    /// Unique-path, part-operator, hitting, unitarity and bracketing checks.
    Verify,
    /// Growth report with the estimated Gelfand-Kirillov dimension.
    Gkdim,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SigmaArg {
    Literal,
    CommutingPair,
}

impl From<SigmaArg> for SigmaConvention {
    fn from(s: SigmaArg) -> Self {
        match s {
            SigmaArg::Literal => SigmaConvention::Literal,
            SigmaArg::CommutingPair => SigmaConvention::CommutingPair,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// A, C or D.
    #[arg(long, global = true)]
    pub family: Option<String>,
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    /// Reduced word, e.g. "1 2 3 4 2".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub word: Option<String>,
    /// Normal form as "r,k,eps;r,k,eps;...".
    #[arg(long = "normal-form", global = true)]
    pub normal_form: Option<String>,
    /// Torus point, e.g. "1, 0.6+0.8i".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[arg(long, global = true, default_value_t = 0.5)]
    pub q: f64,
    /// Truncation per factor; defaults to kmax + 4.
    #[arg(long, global = true)]
    pub cutoff: Option<usize>,
    #[arg(long, global = true, default_value_t = 12)]
    pub kmax: usize,
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Quotient mode: generators from the last M rows.
    #[arg(long, global = true)]
    pub quotient: Option<usize>,
    /// Entry "k,l" for `act`.
    #[arg(long, global = true)]
    pub entry: Option<String>,
    /// Also print the truncated dense matrix.
    #[arg(long, global = true)]
    pub dense: bool,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write "k,dim" lines here (`gkdim`).
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Permutation convention of the type D certificates.
    #[arg(long, global = true, value_enum, default_value_t = SigmaArg::Literal)]
    pub sigma: SigmaArg,
}

/// Failure of a run, carrying its exit code.
#[derive(Debug)]
pub struct RunError {
    pub code: i32,
    pub message: String,
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RankAmbiguity { .. } | Error::TruncationContact { .. } => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        };
        RunError { code, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> RunError {
    RunError { code: EXIT_USAGE, message: message.into() }
}

type RunResult<T> = std::result::Result<T, RunError>;

impl RunConfig {
    pub fn group(&self) -> RunResult<WeylGroup> {
        let family: Family = self.family.as_deref().ok_or_else(|| usage("--family is required"))?.parse()?;
        let rank = self.rank.ok_or_else(|| usage("--rank is required"))?;
        Ok(WeylGroup::new(family, rank)?)
    }

    /// The word given by `--word` or `--normal-form` (empty if neither).
    pub fn word(&self, group: &WeylGroup) -> RunResult<Vec<usize>> {
        match (&self.word, &self.normal_form) {
            (Some(_), Some(_)) => Err(usage("give either --word or --normal-form, not both")),
            (Some(w), None) => Ok(parse_word(w)?),
            (None, Some(nf)) => Ok(group.normal_form_from_triples(&parse_normal_form(nf)?)?.word()),
            (None, None) => Ok(Vec::new()),
        }
    }

    pub fn spec(&self, group: WeylGroup) -> RunResult<AlgebraSpec> {
        match &self.t {
            Some(t) => Ok(AlgebraSpec::new(group, self.q, parse_torus(t)?)?),
            None => Ok(AlgebraSpec::trivial_torus(group, self.q)?),
        }
    }

    fn growth(&self) -> GrowthConfig {
        GrowthConfig {
            kmax: self.kmax,
            cutoff: self.cutoff,
            tol: self.tol,
            quotient_m: self.quotient,
            seed: self.seed,
            sigma: self.sigma.into(),
            ..Default::default()
        }
    }
}

/// Outcome of a command: the JSON document and the exit code.
pub struct Outcome {
    pub body: String,
    pub code: i32,
}

pub fn run_command(cli: &Cli) -> RunResult<Outcome> {
    let cfg = &cli.config;
    match cli.command {
        Command::Weyl => cmd_weyl(cfg),
        Command::Act => cmd_act(cfg),
        Command::Verify => cmd_verify(cfg, &elementary_action),
        Command::Gkdim => cmd_gkdim(cfg),
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

pub fn cmd_weyl(cfg: &RunConfig) -> RunResult<Outcome> {
    let g = cfg.group()?;
    let word = cfg.word(&g)?;
    let w = g.word_to_element(&word)?;
    let nf = g.normal_form(&w)?;
    let quotient: Value = match g.family() {
        Family::D => Value::Null,
        _ => (1..=g.rank())
            .map(|m| {
                let s = ParabolicSubset::standard(&g, m)?;
                Ok(json!({"m": m, "roots": s.roots(), "member": g.is_min_coset_rep(&w, &s)?}))
            })
            .collect::<Result<Vec<_>, Error>>()?
            .into(),
    };
    let body = json!({
        "family": g.family(),
        "rank": g.rank(),
        "word": word,
        "is_reduced": g.is_reduced(&word)?,
        "length": w.length(),
        "matrix": w.matrix(),
        "normal_form": nf.to_string(),
        "normal_form_word": nf.word(),
        "parts": nf.parts(),
        "quotient_membership": quotient,
    });
    Ok(Outcome { body: pretty(&body), code: EXIT_PASS })
}

fn parse_entry(s: &str) -> RunResult<(usize, usize)> {
    let bad = || usage(format!("--entry expects \"k,l\", got {s:?}"));
    let (k, l) = s.split_once(',').ok_or_else(bad)?;
    Ok((k.trim().parse().map_err(|_| bad())?, l.trim().parse().map_err(|_| bad())?))
}

pub fn cmd_act(cfg: &RunConfig) -> RunResult<Outcome> {
    let g = cfg.group()?;
    let word = cfg.word(&g)?;
    let spec = cfg.spec(g)?;
    let (k, l) = parse_entry(cfg.entry.as_deref().ok_or_else(|| usage("act needs --entry k,l"))?)?;
    let action = WordAction::new(&spec, &word)?;
    let entry = action.entry(k, l)?;
    let paths: Vec<Value> = entry
        .paths()
        .iter()
        .map(|p| {
            json!({
                "scalar": [p.scalar.re, p.scalar.im],
                "legs": p.legs.iter().map(|op| op.symbol()).collect::<Vec<_>>(),
                "text": p.to_string(),
            })
        })
        .collect();
    let mut body = json!({
        "family": g.family(),
        "rank": g.rank(),
        "word": word,
        "entry": [k, l],
        "factors": action.factors(),
        "paths": paths,
        "text": if entry.is_zero() { "zero (no path)".to_string() } else {
            entry.paths().iter().map(|p| p.to_string()).collect::<Vec<_>>().join("\n+ ")
        },
    });
    if cfg.dense {
        let cutoff = cfg.cutoff.unwrap_or(4);
        let m = action_matrix_dense(&action, k, l, cutoff)?;
        let part = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> { m.data.iter().map(|r| r.iter().map(f).collect()).collect() };
        body["dense"] = json!({
            "cutoff": cutoff,
            "basis": m.basis,
            "boundary_contact": m.boundary_contact,
            "re": part(|z| z.re),
            "im": part(|z| z.im),
        });
    }
    Ok(Outcome { body: pretty(&body), code: EXIT_PASS })
}

/// Basis vectors with every coordinate below `bound`, at most `limit` of
/// them spread evenly over the lexicographic order.
fn probes(factors: usize, bound: usize, limit: usize) -> Vec<Vec<u16>> {
    let all = truncated_basis(factors, bound);
    if all.len() <= limit {
        return all;
    }
    let step = all.len() as f64 / limit as f64;
    (0..limit).map(|i| all[(i as f64 * step) as usize].clone()).collect()
}

fn check_line(c: &Check) -> Value {
    json!({"check": c.name, "passed": c.passed, "detail": c.detail})
}

/// All checks of `verify` for the module of the normal form of the word,
/// with the action built from `table`.
pub fn verify_checks(cfg: &RunConfig, table: &LetterTable) -> RunResult<Vec<Check>> {
    let g = cfg.group()?;
    let word = cfg.word(&g)?;
    let spec = cfg.spec(g)?;
    let w = g.word_to_element(&word)?;
    if !g.is_reduced(&word)? {
        return Err(Error::NotReduced(word).into());
    }
    let nf: NormalForm = g.normal_form(&w)?;
    let nf_word = nf.word();
    let action = WordAction::with_table(&spec, &nf_word, table)?;
    let n = g.rank();
    let mut checks = Vec::new();

    for i in 0..n {
        let (lo, hi) = window(&g, i);
        if lo > hi {
            continue;
        }
        let tail: Vec<usize> = nf.parts()[i..].iter().flat_map(|p| p.word.iter().copied()).collect();
        let map = tail_map(&g, &nf, i, n)?;
        let tail_action = WordAction::with_table(&spec, &tail, table)?;
        checks.extend(verify_unique_path(&tail_action, &map, &format!("parts {}..{n}", i + 1))?);
    }
    for i in block_ranks(&g) {
        checks.extend(verify_part_operators(&action, &nf, i, 3)?);
    }

    let cert = hitting_polynomials_with(&action, &nf, cfg.seed, cfg.sigma.into())?;
    let detail = format!(
        "{} of {} exponent tuples, M0 = {}, min |c| = {:e}{}",
        cert.checks_passed,
        cert.checks_passed + cert.checks_failed,
        cert.m0,
        cert.min_coefficient,
        cert.failures.first().map(|f| format!(", first failure: {f}")).unwrap_or_default()
    );
    checks.push(Check { name: "hitting identities".into(), passed: cert.passed(), detail });

    let cutoff = 6;
    let pr = probes(action.factors(), cutoff - 2, 64);
    let defect = unitarity_defect(&action, &pr, cutoff)?;
    let name = "unitarity on interior basis vectors";
    checks.push(if defect < 1e-10 {
        Check { name: name.into(), passed: true, detail: format!("max defect {defect:.1e}") }
    } else {
        Check::fail(name, format!("max defect {defect:e}"))
    });

    let right = WordAction::new_right_folded_with(&spec, &nf_word, table)?;
    let diff = action_difference(&action, &right, &pr, cutoff)?;
    let name = "left and right bracketing agree";
    checks.push(if diff < 1e-12 {
        Check { name: name.into(), passed: true, detail: format!("max difference {diff:.1e}") }
    } else {
        Check::fail(name, format!("max difference {diff:e}"))
    });
    Ok(checks)
}

/// `verify` with a replaceable generator table; negative controls pass a
/// corrupted one.
pub fn cmd_verify(cfg: &RunConfig, table: &LetterTable) -> RunResult<Outcome> {
    let checks = verify_checks(cfg, table)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let mut body = String::new();
    for c in &checks {
        body.push_str(&serde_json::to_string(&check_line(c)).expect("json"));
        body.push('\n');
    }
    let summary = json!({"summary": {"checks": checks.len(), "failed": failed, "pass": failed == 0}});
    body.push_str(&serde_json::to_string(&summary).expect("json"));
    body.push('\n');
    Ok(Outcome { body, code: if failed == 0 { EXIT_PASS } else { EXIT_CHECK_FAILED } })
}

pub fn cmd_gkdim(cfg: &RunConfig) -> RunResult<Outcome> {
    let g = cfg.group()?;
    let word = cfg.word(&g)?;
    let spec = cfg.spec(g)?;
    let report = gk_report(&spec, &word, &cfg.growth())?;
    if let Some(path) = &cfg.csv {
        fs::write(path, report.to_csv()).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let body = serde_json::to_string_pretty(&report).expect("json") + "\n";
    Ok(Outcome { body, code: if report.pass { EXIT_PASS } else { EXIT_CHECK_FAILED } })
}

/// Parses `args`, runs the command and writes its output; returns the exit
/// code.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    match run_command(&cli) {
        Ok(out) => {
            let written = match &cli.config.out {
                Some(path) => fs::write(path, &out.body).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout.write_all(out.body.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => out.code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
