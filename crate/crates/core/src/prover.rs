//! End-to-end proving: encode, solve, decode, and verify.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::encode::{kbo_sat, EncodeOptions, SumWidth};
use crate::kbo::{KboProof, PrecedenceMode};
use crate::logic::{to_dimacs, Cnf};
use crate::pb::{self, kbo_pbc, pb_to_cnf, to_opb, Objective, PbProblem};
use crate::proof::{decode, verify, DecodeTables, EngineKind, SoundnessError};
use crate::solver::{solve_with, Limit, Model, SolveResult, SolverConfig};
use crate::term::{SystemKind, Trs};

/// Default weight width for term rewrite systems.
pub const DEFAULT_TRS_BITS: usize = 4;
/// Default weight width for string rewrite systems.
pub const DEFAULT_SRS_BITS: usize = 7;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Minimize {
    None,
    Weights,
    Precedence,
}

impl std::str::FromStr for Minimize {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Minimize::None),
            "weights" => Ok(Minimize::Weights),
            "precedence" => Ok(Minimize::Precedence),
            _ => Err(format!("unknown objective `{s}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub engine: EngineKind,
    /// Weight width; `None` picks the default for the kind of system.
    pub bits: Option<usize>,
    pub mode: PrecedenceMode,
    pub minimize: Minimize,
    pub timeout: Option<Duration>,
    pub cancel: bool,
    pub cache: bool,
    pub embed_shortcut: bool,
    pub sum_width: SumWidth,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            engine: EngineKind::Pbc,
            bits: None,
            mode: PrecedenceMode::Quasi,
            minimize: Minimize::None,
            timeout: Some(DEFAULT_TIMEOUT),
            cancel: true,
            cache: true,
            embed_shortcut: true,
            sum_width: SumWidth::Growing,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("minimization needs the pbc engine")]
    MinimizeNeedsPbc,
    #[error("the number of bits must be at least 1")]
    ZeroBits,
}

impl RunConfig {
    pub fn new(engine: EngineKind, bits: usize, mode: PrecedenceMode) -> Self {
        RunConfig { engine, bits: Some(bits), mode, ..RunConfig::default() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.minimize != Minimize::None && self.engine != EngineKind::Pbc {
            return Err(ConfigError::MinimizeNeedsPbc);
        }
        if self.bits == Some(0) {
            return Err(ConfigError::ZeroBits);
        }
        Ok(())
    }

    pub fn bits_for(&self, kind: SystemKind) -> usize {
        self.bits.unwrap_or(match kind {
            SystemKind::Term => DEFAULT_TRS_BITS,
            SystemKind::String => DEFAULT_SRS_BITS,
        })
    }

    pub fn encode_options(&self, trs: &Trs) -> EncodeOptions {
        EncodeOptions {
            bits: self.bits_for(trs.kind()),
            mode: self.mode,
            cancel: self.cancel,
            cache: self.cache,
            embed_shortcut: self.embed_shortcut,
            sum_width: self.sum_width,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProveError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("internal soundness error: {0}")]
    Soundness(#[from] Box<SoundnessError>),
    #[error("external model does not satisfy the encoding")]
    ModelRejected,
}

/// The encoding exactly as the internal solver consumes it.
pub enum Encoded {
    Sat { cnf: Cnf, tables: DecodeTables, encoding_vars: u32, adders: usize },
    Pbc { problem: PbProblem, cnf: Cnf },
}

impl Encoded {
    pub fn cnf(&self) -> &Cnf {
        match self {
            Encoded::Sat { cnf, .. } | Encoded::Pbc { cnf, .. } => cnf,
        }
    }

    pub fn tables(&self) -> &DecodeTables {
        match self {
            Encoded::Sat { tables, .. } => tables,
            Encoded::Pbc { problem, .. } => &problem.tables,
        }
    }

    /// Variables issued before CNF conversion.
    pub fn encoding_vars(&self) -> u32 {
        match self {
            Encoded::Sat { encoding_vars, .. } => *encoding_vars,
            Encoded::Pbc { problem, .. } => problem.num_vars,
        }
    }

    pub fn dimacs(&self) -> String {
        to_dimacs(self.cnf())
    }

    /// OPB text; only the pseudo-boolean engine has one.
    pub fn opb(&self) -> Option<String> {
        match self {
            Encoded::Sat { .. } => None,
            Encoded::Pbc { problem, .. } => Some(to_opb(
                &problem.constraints,
                problem.objective.as_deref(),
                problem.num_vars,
            )),
        }
    }
}

pub fn encode(trs: &Trs, cfg: &RunConfig) -> Result<Encoded, ConfigError> {
    cfg.validate()?;
    let opts = cfg.encode_options(trs);
    Ok(match cfg.engine {
        EngineKind::Sat => {
            let mut enc = kbo_sat(trs, &opts);
            let cnf = crate::logic::tseitin(&enc.formula, &mut enc.pool);
            Encoded::Sat {
                cnf,
                tables: enc.tables,
                encoding_vars: enc.encoding_vars,
                adders: enc.adders,
            }
        }
        EngineKind::Pbc => {
            let mut problem = kbo_pbc(trs, &opts);
            problem.objective = match cfg.minimize {
                Minimize::None => None,
                Minimize::Weights => Some(pb::objective(&problem, Objective::Weights)),
                Minimize::Precedence => Some(pb::objective(&problem, Objective::Precedence)),
            };
            let cnf = pb_to_cnf(&problem.constraints, problem.num_vars);
            Encoded::Pbc { problem, cnf }
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MaybeReason {
    /// The encoding is unsatisfiable at this width and mode.
    Unsat,
    Timeout,
    ConflictLimit,
}

impl From<Limit> for MaybeReason {
    fn from(l: Limit) -> Self {
        match l {
            Limit::Timeout => MaybeReason::Timeout,
            Limit::Conflicts => MaybeReason::ConflictLimit,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ObjectiveReport {
    pub value: i64,
    /// The minimizer proved that `value - 1` is infeasible.
    pub optimal: bool,
    pub trace: Vec<i64>,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Yes { proof: Box<KboProof>, objective: Option<ObjectiveReport> },
    Maybe(MaybeReason),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes { .. } => "YES",
            Verdict::Maybe(_) => "MAYBE",
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Stats {
    pub bits: usize,
    pub encoding_vars: u32,
    pub cnf_vars: u32,
    pub cnf_clauses: usize,
    pub pb_constraints: usize,
    pub adders: usize,
    pub millis: f64,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub verdict: Verdict,
    pub stats: Stats,
}

fn certify(trs: &Trs, m: &Model, tables: &DecodeTables) -> Result<KboProof, Box<SoundnessError>> {
    let (wf, p) = decode(m, tables);
    verify(trs, &wf, &p)
}

/// Proves termination by KBO, answering YES only with a verified proof.
pub fn prove(trs: &Trs, cfg: &RunConfig) -> Result<Outcome, ProveError> {
    let start = Instant::now();
    let solver = SolverConfig { conflict_budget: None, deadline: cfg.timeout.map(|t| start + t) };
    let encoded = encode(trs, cfg)?;
    let mut stats = Stats {
        bits: cfg.bits_for(trs.kind()),
        encoding_vars: encoded.encoding_vars(),
        cnf_vars: encoded.cnf().num_vars,
        cnf_clauses: encoded.cnf().clauses.len(),
        ..Stats::default()
    };
    let verdict = match &encoded {
        Encoded::Sat { cnf, tables, adders, .. } => {
            stats.adders = *adders;
            match solve_with(cnf, &solver) {
                SolveResult::Sat(m) => {
                    Verdict::Yes { proof: Box::new(certify(trs, &m, tables)?), objective: None }
                }
                SolveResult::Unsat => Verdict::Maybe(MaybeReason::Unsat),
                SolveResult::Unknown(l) => Verdict::Maybe(l.into()),
            }
        }
        Encoded::Pbc { problem, cnf } => {
            stats.pb_constraints = problem.constraints.len();
            match &problem.objective {
                None => match solve_with(cnf, &solver) {
                    SolveResult::Sat(m) => {
                        for c in &problem.constraints {
                            assert!(c.holds(&|v| m.value(v.id())), "model violates {c}");
                        }
                        let proof = certify(trs, &m, &problem.tables)?;
                        Verdict::Yes { proof: Box::new(proof), objective: None }
                    }
                    SolveResult::Unsat => Verdict::Maybe(MaybeReason::Unsat),
                    SolveResult::Unknown(l) => Verdict::Maybe(l.into()),
                },
                Some(obj) => {
                    let r = pb::minimize(problem, obj, &solver);
                    match r.best {
                        Some((m, value)) => {
                            let proof = certify(trs, &m, &problem.tables)?;
                            let report = ObjectiveReport { value, optimal: r.optimal, trace: r.trace };
                            Verdict::Yes { proof: Box::new(proof), objective: Some(report) }
                        }
                        None => Verdict::Maybe(r.limit.map_or(MaybeReason::Unsat, Into::into)),
                    }
                }
            }
        }
    };
    stats.millis = start.elapsed().as_secs_f64() * 1e3;
    Ok(Outcome { verdict, stats })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: bad literal `{token}`")]
pub struct ModelParseError {
    pub line: usize,
    pub token: String,
}

/// Reads a solver model: signed literals such as `3 -4` or `x3 -x4`,
/// optionally on `v` lines; `c` and `s` lines and the terminating `0` are
/// skipped. Unmentioned variables are false.
pub fn parse_model(text: &str) -> Result<Model, ModelParseError> {
    let mut m = Model::from_values(Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('c') || line.starts_with('s') || line.starts_with('*') {
            continue;
        }
        let body = line.strip_prefix('v').unwrap_or(line);
        for tok in body.split_whitespace() {
            let bad = || ModelParseError { line: i + 1, token: tok.to_string() };
            let (neg, rest) = match tok.strip_prefix('-') {
                Some(r) => (true, r),
                None => (false, tok),
            };
            let rest = rest.strip_prefix('x').unwrap_or(rest);
            let id: u32 = rest.parse().map_err(|_| bad())?;
            if id == 0 {
                continue;
            }
            m.set(id, !neg);
        }
    }
    Ok(m)
}

/// Checks an externally computed model against the encoding and decodes it
/// into a verified proof.
pub fn import_model(trs: &Trs, cfg: &RunConfig, model: &Model) -> Result<KboProof, ProveError> {
    let encoded = encode(trs, cfg)?;
    let accepted = match &encoded {
        Encoded::Sat { cnf, .. } => cnf.satisfied_by(&|v| model.value(v)),
        Encoded::Pbc { problem, .. } => {
            problem.constraints.iter().all(|c| c.holds(&|v| model.value(v.id())))
        }
    };
    if !accepted {
        return Err(ProveError::ModelRejected);
    }
    Ok(certify(trs, model, encoded.tables())?)
}
