//! Cross-checks between the closed forms, the brute-force oracle and the
//! structural identities.
//!
//! A failed check is recorded in the report with a witness, never raised as
//! an error. Sweeps run cases in parallel and merge results by case index,
//! so reports are identical across runs and thread counts.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{cofsum_bi_block, cofsum_bi_block_with, det_bi_block, inverse_bi_block, CofsumForm};
use crate::edm::{exponential_matrix, singularity_profile, EdmBundle};
use crate::error::{Error, Result};
use crate::graph::{random_bi_block, BiBlockGraph};
use crate::leaf::{leaf_block_triangularize, selector_identities};
use crate::matrix::{oracle_adjugate_sum, oracle_det, oracle_inverse, Mismatch, RationalMatrix};
use crate::rational::Rational;

/// Environment variable capping the number of concurrently verified cases.
pub const THREADS_ENV: &str = "EXPDIST_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Det,
    Inverse,
    Cofsum,
    Qlap,
    Triangularize,
    Identities,
    TreeReduction,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::Det,
        CheckKind::Inverse,
        CheckKind::Cofsum,
        CheckKind::Qlap,
        CheckKind::Triangularize,
        CheckKind::Identities,
        CheckKind::TreeReduction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Det => "det",
            CheckKind::Inverse => "inverse",
            CheckKind::Cofsum => "cofsum",
            CheckKind::Qlap => "qlap",
            CheckKind::Triangularize => "triangularize",
            CheckKind::Identities => "identities",
            CheckKind::TreeReduction => "tree-reduction",
        }
    }

    pub fn all() -> BTreeSet<CheckKind> {
        Self::ALL.into_iter().collect()
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One graph, one `q`, a set of checks.
#[derive(Debug, Clone)]
pub struct CheckCase {
    pub graph: BiBlockGraph,
    /// Generator seed, when the graph came from [`random_bi_block`].
    pub seed: Option<u64>,
    pub q: Rational,
    pub checks: BTreeSet<CheckKind>,
}

impl CheckCase {
    pub fn new(graph: BiBlockGraph, q: Rational, checks: BTreeSet<CheckKind>) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroQ);
        }
        Ok(CheckCase { graph, seed: None, q, checks })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// First point of disagreement between a closed form and its reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Which comparison failed.
    pub relation: String,
    /// Matrix coordinate, or `None` for scalars.
    pub location: Option<(usize, usize)>,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.relation)?;
        if let Some((i, j)) = self.location {
            write!(f, " at ({i}, {j})")?;
        }
        write!(f, ": expected {}, got {}", self.expected, self.actual)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(Witness),
    Skipped(String),
}

impl Outcome {
    pub fn status(&self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail(_) => "fail",
            Outcome::Skipped(_) => "skipped",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub kind: CheckKind,
    pub outcome: Outcome,
    /// Exact scalars computed along the way (closed form and oracle values).
    pub values: BTreeMap<String, Rational>,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub case: CheckCase,
    /// One record per requested check, in [`CheckKind`] order.
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn record(&self, kind: CheckKind) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.kind == kind)
    }

    pub fn outcome(&self, kind: CheckKind) -> Option<&Outcome> {
        self.record(kind).map(|r| &r.outcome)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| matches!(r.outcome, Outcome::Fail(_)))
    }

    pub fn all_passed_or_skipped(&self) -> bool {
        self.failures().next().is_none()
    }
}

/// Early exit from a check body.
enum Stop {
    Fail(Witness),
    Skip(String),
}

impl From<Error> for Stop {
    fn from(e: Error) -> Self {
        Stop::Fail(Witness {
            relation: "evaluation".into(),
            location: None,
            expected: "a value".into(),
            actual: format!("{}: {e}", e.name()),
        })
    }
}

type Step = std::result::Result<(), Stop>;

struct Ctx<'a> {
    graph: &'a BiBlockGraph,
    q: &'a Rational,
    f: RationalMatrix,
    values: BTreeMap<String, Rational>,
}

impl Ctx<'_> {
    fn scalar(&mut self, relation: &str, closed: Rational, oracle: Rational) -> Step {
        self.values.insert(format!("{relation}.closed_form"), closed.clone());
        self.values.insert(format!("{relation}.oracle"), oracle.clone());
        if closed == oracle {
            Ok(())
        } else {
            Err(Stop::Fail(Witness {
                relation: relation.into(),
                location: None,
                expected: oracle.to_string(),
                actual: closed.to_string(),
            }))
        }
    }

    fn require_regular(&self) -> Step {
        let profile = singularity_profile(self.graph, self.q);
        if profile.q_is_pm1 {
            return Err(Stop::Skip(format!("SingularParameter: q = {}", self.q)));
        }
        if !profile.vanishing_blocks.is_empty() {
            return Err(Stop::Skip(format!("SingularParameter: vanishing blocks {:?}", profile.vanishing_blocks)));
        }
        Ok(())
    }

    fn require_leaf(&self) -> Step {
        if self.graph.block_count() < 2 {
            return Err(Stop::Skip("NotEnoughBlocks".into()));
        }
        Ok(())
    }
}

fn matrices(relation: &str, closed: &RationalMatrix, reference: &RationalMatrix) -> Step {
    match closed.first_mismatch(reference) {
        None => Ok(()),
        Some(Mismatch::Shape { left, right }) => Err(Stop::Fail(Witness {
            relation: relation.into(),
            location: None,
            expected: format!("{}x{}", right.0, right.1),
            actual: format!("{}x{}", left.0, left.1),
        })),
        Some(Mismatch::Entry { row, col, left, right }) => Err(Stop::Fail(Witness {
            relation: relation.into(),
            location: Some((row, col)),
            expected: right.to_string(),
            actual: left.to_string(),
        })),
    }
}

fn flag(relation: &str, ok: bool) -> Step {
    if ok {
        Ok(())
    } else {
        Err(Stop::Fail(Witness {
            relation: relation.into(),
            location: None,
            expected: "true".into(),
            actual: "false".into(),
        }))
    }
}

fn check_det(cx: &mut Ctx) -> Step {
    let closed = det_bi_block(cx.graph, cx.q)?;
    let oracle = oracle_det(&cx.f)?;
    cx.scalar("det", closed, oracle)
}

fn check_inverse(cx: &mut Ctx) -> Step {
    cx.require_regular()?;
    let bundle = EdmBundle::build(cx.graph, cx.q)?;
    let inv = inverse_bi_block(&bundle)?;
    let n = cx.graph.vertex_count();
    matrices("F * inverse = I", &cx.f.mul(&inv)?, &RationalMatrix::identity(n))?;
    matrices("inverse = oracle inverse", &inv, &oracle_inverse(&cx.f)?)
}

fn check_cofsum(cx: &mut Ctx) -> Step {
    let closed = cofsum_bi_block(cx.graph, cx.q)?;
    let oracle = oracle_adjugate_sum(&cx.f)?;
    cx.scalar("cofsum", closed, oracle.clone())?;
    if singularity_profile(cx.graph, cx.q).is_regular() {
        let fractional = cofsum_bi_block_with(cx.graph, cx.q, CofsumForm::Fractional)?;
        cx.scalar("cofsum_fractional", fractional, oracle)?;
    }
    Ok(())
}

/// `(1 - q^2) F^-1 = L` and `L = diag(x) + q^2 B - q A`, plus
/// `x = 1 + q^2 mu` entrywise.
pub fn qlap_relation_check(bundle: &EdmBundle) -> Result<bool> {
    let base = Rational::one() - bundle.q.square();
    if base.is_zero() {
        return Err(Error::SingularParameter(format!("q = {}", bundle.q)));
    }
    let scaled = oracle_inverse(&bundle.f)?.scale(&base);
    Ok(bundle.x_matches_mu() && scaled == bundle.qlap && bundle.qlap == entrywise_q_laplacian(bundle))
}

/// `diag(x) + q^2 B - q A`, assembled entry by entry.
fn entrywise_q_laplacian(bundle: &EdmBundle) -> RationalMatrix {
    let q = &bundle.q;
    let q2 = q.square();
    let n = bundle.order();
    RationalMatrix::from_fn(n, n, |i, j| {
        let mut v = &(&q2 * &bundle.b[(i, j)]) - &(q * &bundle.a[(i, j)]);
        if i == j {
            v += &bundle.x[i];
        }
        v
    })
}

fn check_qlap(cx: &mut Ctx) -> Step {
    cx.require_regular()?;
    let bundle = EdmBundle::build(cx.graph, cx.q)?;
    if let Some(v) = (0..bundle.order()).find(|&v| bundle.x[v] != Rational::one() + &(&cx.q.square() * &bundle.mu[v])) {
        return Err(Stop::Fail(Witness {
            relation: "x = 1 + q^2 mu".into(),
            location: Some((v, v)),
            expected: (Rational::one() + &(&cx.q.square() * &bundle.mu[v])).to_string(),
            actual: bundle.x[v].to_string(),
        }));
    }
    matrices("L = diag(x) + q^2 B - q A", &bundle.qlap, &entrywise_q_laplacian(&bundle))?;
    let base = Rational::one() - cx.q.square();
    matrices("(1 - q^2) F^-1 = L", &oracle_inverse(&cx.f)?.scale(&base), &bundle.qlap)
}

fn check_triangularize(cx: &mut Ctx) -> Step {
    cx.require_leaf()?;
    let d = leaf_block_triangularize(cx.graph, cx.q)?;
    let c = d.check()?;
    flag("L F lower blocks vanish", c.lower_blocks_zero)?;
    flag("L F leading block is F(H)", c.leading_block_is_f_hat)?;
    flag("L F middle block is (1-q^2)(I + q^2 J)", c.middle_block_matches)?;
    flag("L F last block matches", c.last_block_matches)?;
    flag("det L = 1", c.l_is_unimodular)?;
    flag("det F factorizes over diagonal blocks", c.det_factorizes)
}

fn check_identities(cx: &mut Ctx) -> Step {
    cx.require_leaf()?;
    let ids = selector_identities(cx.graph, cx.q)?;
    for (label, pair) in [("a", ids.a), ("b", ids.b), ("c", ids.c), ("d", ids.d), ("e", ids.e)] {
        flag(&format!("selector identity ({label}) first half"), pair[0])?;
        flag(&format!("selector identity ({label}) second half"), pair[1])?;
    }
    Ok(())
}

/// `qL - (q-1) I + q(q-1) diag(deg - 1)` for a tree.
pub fn tree_q_laplacian(g: &BiBlockGraph, q: &Rational) -> RationalMatrix {
    let n = g.vertex_count();
    let one = Rational::one();
    let q_minus_1 = q - &one;
    let qq1 = q * &q_minus_1;
    RationalMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let deg = Rational::from(g.degree(i));
            &(&(q * &deg) - &q_minus_1) + &(&qq1 * &(&deg - &one))
        } else if g.is_adjacent(i, j) {
            -q
        } else {
            Rational::zero()
        }
    })
}

fn check_tree_reduction(cx: &mut Ctx) -> Step {
    if !cx.graph.is_tree() {
        return Err(Stop::Skip("NotATree".into()));
    }
    let n = cx.graph.vertex_count() as u32;
    let expected = (Rational::one() - cx.q.square()).pow(n - 1);
    cx.scalar("tree det closed form", det_bi_block(cx.graph, cx.q)?, expected.clone())?;
    cx.scalar("tree det oracle", oracle_det(&cx.f)?, expected)?;
    let bundle = EdmBundle::build(cx.graph, cx.q)?;
    flag("tree B = 0", bundle.b.is_zero())?;
    let adjacency = RationalMatrix::from_fn(bundle.order(), bundle.order(), |i, j| {
        if cx.graph.is_adjacent(i, j) {
            Rational::one()
        } else {
            Rational::zero()
        }
    });
    matrices("tree A = adjacency", &bundle.a, &adjacency)?;
    let deg_minus_1: Vec<Rational> = (0..bundle.order()).map(|v| Rational::from(cx.graph.degree(v) - 1)).collect();
    flag("tree mu = deg - 1", bundle.mu == deg_minus_1)?;
    let tree_lap = tree_q_laplacian(cx.graph, cx.q);
    matrices("tree L = qL - (q-1)I + q(q-1)diag(d-1)", &bundle.qlap, &tree_lap)?;
    let base = Rational::one() - cx.q.square();
    if !base.is_zero() {
        matrices("tree (1 - q^2) F^-1 = L", &oracle_inverse(&cx.f)?.scale(&base), &tree_lap)?;
    }
    Ok(())
}

/// Runs every requested check of `case`.
pub fn run_case(case: &CheckCase) -> VerificationReport {
    let f = exponential_matrix(&case.graph, &case.q);
    let records = case
        .checks
        .iter()
        .map(|&kind| {
            let start = Instant::now();
            let mut values = BTreeMap::new();
            let outcome = match &f {
                Err(e) => Outcome::Fail(Witness {
                    relation: "build F".into(),
                    location: None,
                    expected: "a matrix".into(),
                    actual: e.to_string(),
                }),
                Ok(f) => {
                    let mut cx = Ctx { graph: &case.graph, q: &case.q, f: f.clone(), values: BTreeMap::new() };
                    let result = match kind {
                        CheckKind::Det => check_det(&mut cx),
                        CheckKind::Inverse => check_inverse(&mut cx),
                        CheckKind::Cofsum => check_cofsum(&mut cx),
                        CheckKind::Qlap => check_qlap(&mut cx),
                        CheckKind::Triangularize => check_triangularize(&mut cx),
                        CheckKind::Identities => check_identities(&mut cx),
                        CheckKind::TreeReduction => check_tree_reduction(&mut cx),
                    };
                    values = cx.values;
                    match result {
                        Ok(()) => Outcome::Pass,
                        Err(Stop::Fail(w)) => Outcome::Fail(w),
                        Err(Stop::Skip(reason)) => Outcome::Skipped(reason),
                    }
                }
            };
            CheckRecord { kind, outcome, values, elapsed: start.elapsed() }
        })
        .collect();
    VerificationReport { case: case.clone(), records }
}

/// Parameters of a seeded sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepParams {
    pub seed: u64,
    pub cases: usize,
    pub r_max: usize,
    pub size_max: usize,
    pub q_list: Vec<Rational>,
}

impl SweepParams {
    pub fn validate(&self) -> Result<()> {
        if self.cases == 0 {
            return Err(Error::DimensionMismatch("cases must be at least 1".into()));
        }
        if self.r_max == 0 || self.size_max == 0 {
            return Err(Error::DimensionMismatch("r_max and size_max must be at least 1".into()));
        }
        if self.q_list.is_empty() {
            return Err(Error::DimensionMismatch("q list is empty".into()));
        }
        if self.q_list.iter().any(Rational::is_zero) {
            return Err(Error::ZeroQ);
        }
        Ok(())
    }

    /// `(block count, graph seed)` for each case, drawn from `seed`.
    pub fn case_plan(&self) -> Vec<(usize, u64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..self.cases).map(|_| (rng.random_range(1..=self.r_max), rng.random())).collect()
    }
}

#[derive(Debug, Clone)]
pub struct SweepCase {
    pub index: usize,
    pub graph_seed: u64,
    /// One report per `q`, in the order of `SweepParams::q_list`.
    pub runs: Vec<VerificationReport>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub params: SweepParams,
    pub cases: Vec<SweepCase>,
}

/// Pass/fail/skip tallies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

impl Tally {
    fn add(&mut self, outcome: &Outcome) {
        match outcome {
            Outcome::Pass => self.pass += 1,
            Outcome::Fail(_) => self.fail += 1,
            Outcome::Skipped(_) => self.skipped += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.pass + self.fail + self.skipped
    }
}

impl SweepReport {
    pub fn reports(&self) -> impl Iterator<Item = &VerificationReport> {
        self.cases.iter().flat_map(|c| c.runs.iter())
    }

    pub fn tally(&self) -> Tally {
        let mut t = Tally::default();
        for r in self.reports().flat_map(|r| r.records.iter()) {
            t.add(&r.outcome);
        }
        t
    }

    pub fn tally_by_kind(&self) -> BTreeMap<CheckKind, Tally> {
        let mut out: BTreeMap<CheckKind, Tally> = BTreeMap::new();
        for r in self.reports().flat_map(|r| r.records.iter()) {
            out.entry(r.kind).or_default().add(&r.outcome);
        }
        out
    }

    pub fn failure_count(&self) -> usize {
        self.tally().fail
    }
}

/// Thread cap from `EXPDIST_THREADS`, if set to a positive integer.
pub fn thread_cap_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Generates `cases` random graphs (block counts uniform in `1..=r_max`,
/// part sizes uniform in `1..=size_max`) and runs every check at every `q`.
pub fn sweep(params: &SweepParams) -> Result<SweepReport> {
    sweep_with_threads(params, thread_cap_from_env())
}

pub fn sweep_with_threads(params: &SweepParams, threads: Option<usize>) -> Result<SweepReport> {
    params.validate()?;
    let plan = params.case_plan();
    let run = || -> Result<Vec<SweepCase>> {
        plan.par_iter()
            .enumerate()
            .map(|(index, &(r, graph_seed))| {
                let graph = random_bi_block(graph_seed, r, params.size_max, params.size_max)?;
                let runs = params
                    .q_list
                    .iter()
                    .map(|q| {
                        let case = CheckCase::new(graph.clone(), q.clone(), CheckKind::all())?.with_seed(graph_seed);
                        Ok(run_case(&case))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(SweepCase { index, graph_seed, runs })
            })
            .collect()
    };
    let cases = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::DimensionMismatch(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    Ok(SweepReport { params: params.clone(), cases })
}
