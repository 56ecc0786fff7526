//! Monte Carlo simulator for the GHZ-based (N,N) secret sharing protocol
//! with a dealer and N players, plus three tampering models.
//!
//! Party 0 is the dealer. Every party applies its Z-phase and measures X;
//! the reported result is the antipode `-k` of the raw outcome `k`, so that
//! `secret = ciphertext + Σ player results + a` whenever the phases sum to
//! the classical point `a`.

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lhv::{
    build_trivial_lhv, identity_solution, lhv_exists, quantum_table, Existence, LhvMode, LhvModel,
    LhvVerdict, LocalAssignment,
};
use crate::phase::PhasePoint;
use crate::qudit::{complementarity_report, mermin_outcome_distribution, phased_x_basis, Distribution};
use crate::scenario::MerminScenario;

/// Rounds per independently seeded batch.
pub const BATCH_ROUNDS: usize = 4096;
/// Cap on the number of jointly drawable phase vectors.
pub const DEFAULT_VECTOR_BOUND: usize = 1 << 16;
pub const DEFAULT_TV_THRESHOLD: f64 = 0.05;
pub const DEFAULT_MIN_ROUNDS: usize = 100;

fn default_tv() -> f64 {
    DEFAULT_TV_THRESHOLD
}

fn default_min_rounds() -> usize {
    DEFAULT_MIN_ROUNDS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QssConfig {
    /// Number of players, not counting the dealer.
    #[serde(rename = "N")]
    pub players: usize,
    #[serde(rename = "D")]
    pub dim: usize,
    /// Allowed phases for each of the `N + 1` parties, dealer first.
    pub alphabet: Vec<Vec<PhasePoint>>,
    pub seed: u64,
    pub rounds: usize,
    #[serde(default = "default_tv")]
    pub tv_threshold: f64,
    #[serde(default = "default_min_rounds")]
    pub min_rounds: usize,
}

impl QssConfig {
    /// Every party draws from the same alphabet.
    pub fn shared(players: usize, dim: usize, alphabet: Vec<PhasePoint>, seed: u64, rounds: usize) -> Self {
        QssConfig {
            players,
            dim,
            alphabet: vec![alphabet; players + 1],
            seed,
            rounds,
            tv_threshold: DEFAULT_TV_THRESHOLD,
            min_rounds: DEFAULT_MIN_ROUNDS,
        }
    }

    pub fn parties(&self) -> usize {
        self.players + 1
    }

    pub fn check(&self) -> Result<()> {
        if self.players < 1 || self.dim < 2 {
            return Err(Error::Config("need at least one player and D >= 2".into()));
        }
        if self.alphabet.len() != self.parties() {
            return Err(Error::Config(format!(
                "alphabet lists {} parties, expected {}",
                self.alphabet.len(),
                self.parties()
            )));
        }
        for (j, a) in self.alphabet.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::Config(format!("party {j} has an empty alphabet")));
            }
            if a.iter().any(|p| p.dim() != self.dim) {
                return Err(Error::Config(format!("party {j} has a phase of the wrong dimension")));
            }
        }
        if !(0.0..=1.0).contains(&self.tv_threshold) {
            return Err(Error::Config("tv_threshold must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Uniform distribution over alphabet choices whose phases sum to a
/// classical point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDistribution {
    /// Alphabet index chosen by each party.
    pub vectors: Vec<Vec<usize>>,
    /// Classical point `a` of each vector.
    pub points: Vec<u64>,
    pub probs: Vec<f64>,
}

impl PhaseDistribution {
    pub fn uniform(cfg: &QssConfig, bound: usize) -> Result<Self> {
        cfg.check()?;
        let total = cfg
            .alphabet
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.len()))
            .unwrap_or(usize::MAX);
        if total > bound {
            return Err(Error::resource("phase vector enumeration", total as u128, bound as u128));
        }
        let mut vectors = Vec::new();
        let mut points = Vec::new();
        let mut cur = vec![0usize; cfg.parties()];
        for _ in 0..total {
            let sum = PhasePoint::sum(cfg.dim, cur.iter().enumerate().map(|(j, &s)| &cfg.alphabet[j][s]));
            if let Some(g) = sum.classical_index() {
                vectors.push(cur.clone());
                points.push(g);
            }
            for j in (0..cur.len()).rev() {
                cur[j] += 1;
                if cur[j] < cfg.alphabet[j].len() {
                    break;
                }
                cur[j] = 0;
            }
        }
        if vectors.is_empty() {
            return Err(Error::Config("no phase choice sums to a classical point".into()));
        }
        let p = 1.0 / vectors.len() as f64;
        Ok(PhaseDistribution {
            probs: vec![p; vectors.len()],
            vectors,
            points,
        })
    }

    pub fn p_max(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    /// Most probable vector; the first one on ties.
    pub fn modal(&self) -> usize {
        let m = self.p_max();
        self.probs.iter().position(|&p| p == m).expect("non-empty")
    }

    pub fn phases(&self, cfg: &QssConfig, v: usize) -> Vec<PhasePoint> {
        self.vectors[v]
            .iter()
            .enumerate()
            .map(|(j, &s)| cfg.alphabet[j][s].clone())
            .collect()
    }

    /// The scenario whose rows are all drawable phase vectors.
    pub fn scenario(&self, cfg: &QssConfig) -> Result<MerminScenario> {
        MerminScenario::new(cfg.dim, (0..self.vectors.len()).map(|v| self.phases(cfg, v)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum AttackModel {
    None,
    /// One player (1..=N) refuses to broadcast.
    Withhold { player: usize },
    /// The GHZ source is replaced by a product state before phases are drawn.
    PrePhaseSubstitution,
    /// Outcomes are fixed in advance by a mixture of deterministic tables
    /// indexed by `(party, alphabet index)`.
    PostPhaseDeterministic { model: LhvModel },
}

impl AttackModel {
    pub fn name(&self) -> &'static str {
        match self {
            AttackModel::None => "none",
            AttackModel::Withhold { .. } => "withhold",
            AttackModel::PrePhaseSubstitution => "pre_phase_substitution",
            AttackModel::PostPhaseDeterministic { .. } => "post_phase_deterministic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTranscript {
    pub round: usize,
    /// Alphabet index drawn by each party.
    pub phases: Vec<usize>,
    pub a: u64,
    pub secret: u64,
    pub dealer_outcome: u64,
    pub ciphertext: u64,
    /// Broadcast results of players 1..=N; `None` for a withheld one.
    pub player_outcomes: Vec<Option<u64>>,
    pub decoded: u64,
    pub attack: String,
    /// The attacker's guess of the secret, when the attack yields one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attacker_guess: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QssSummary {
    pub rounds: usize,
    pub accuracy: f64,
    pub failure_rate: f64,
    /// Total variation distance of the decoded values from uniform.
    pub tv_distance: f64,
    /// Plug-in mutual information between secret and decoded value, in
    /// units of `log D`.
    pub mutual_information: f64,
    pub p_max: f64,
    pub k: usize,
}

impl QssSummary {
    pub const CSV_HEADER: &'static str = "rounds,accuracy,failure_rate,tv_distance";

    pub fn csv(&self) -> String {
        format!(
            "{}\n{},{},{},{}\n",
            Self::CSV_HEADER,
            self.rounds,
            self.accuracy,
            self.failure_rate,
            self.tv_distance
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QssRun {
    pub transcripts: Vec<RoundTranscript>,
    pub summary: QssSummary,
}

impl QssRun {
    pub fn jsonl(&self) -> String {
        let mut out = String::new();
        for t in &self.transcripts {
            out.push_str(&serde_json::to_string(t).expect("serializable"));
            out.push('\n');
        }
        out
    }
}

fn sampler(probs: &[f64]) -> Result<WeightedIndex<f64>> {
    let cleaned: Vec<f64> = probs
        .iter()
        .map(|&p| if p > crate::DEFAULT_TOL { p } else { 0.0 })
        .collect();
    WeightedIndex::new(cleaned).map_err(|e| Error::Domain(format!("bad distribution: {e}")))
}

/// Where raw outcomes come from in a round.
enum Source {
    Quantum(Vec<WeightedIndex<f64>>),
    /// `per_party[j][s]` samples party `j`'s outcome under alphabet index `s`.
    Product(Vec<Vec<WeightedIndex<f64>>>),
    Tables(LhvModel, WeightedIndex<f64>),
}

struct Engine<'a> {
    cfg: &'a QssConfig,
    dist: PhaseDistribution,
    pick: WeightedIndex<f64>,
    source: Source,
    /// Raw outcomes the pre-phase attacker has planted.
    planted: Option<Vec<u64>>,
}

fn quantum_source(cfg: &QssConfig, dist: &PhaseDistribution) -> Result<Vec<Distribution>> {
    (0..dist.vectors.len())
        .into_par_iter()
        .map(|v| mermin_outcome_distribution(cfg.dim, cfg.parties(), &dist.phases(cfg, v)))
        .collect()
}

/// The modal-vector attacker: party `j` gets `P_{α_j}† |x_{k_j}⟩` for the
/// modal phases, with `k_0 = a` and `k_j = 0` otherwise.
fn planted_outcomes(dist: &PhaseDistribution) -> Vec<u64> {
    let v = dist.modal();
    let mut k = vec![0; dist.vectors[v].len()];
    k[0] = dist.points[v];
    k
}

fn product_source(cfg: &QssConfig, dist: &PhaseDistribution, planted: &[u64]) -> Result<Vec<Vec<WeightedIndex<f64>>>> {
    let modal = &dist.vectors[dist.modal()];
    (0..cfg.parties())
        .map(|j| {
            let psi = &phased_x_basis(&cfg.alphabet[j][modal[j]])[planted[j] as usize];
            cfg.alphabet[j]
                .iter()
                .map(|p| {
                    let probs: Vec<f64> = phased_x_basis(p)
                        .iter()
                        .map(|b| b.iter().zip(psi).map(|(x, y)| x.conj() * y).sum::<num_complex::Complex64>().norm_sqr())
                        .collect();
                    sampler(&probs)
                })
                .collect()
        })
        .collect()
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a QssConfig, attack: &AttackModel) -> Result<Self> {
        let dist = PhaseDistribution::uniform(cfg, DEFAULT_VECTOR_BOUND)?;
        let pick = sampler(&dist.probs)?;
        let mut planted = None;
        let source = match attack {
            AttackModel::None | AttackModel::Withhold { .. } => Source::Quantum(
                quantum_source(cfg, &dist)?
                    .iter()
                    .map(|d| sampler(&d.probabilities))
                    .collect::<Result<_>>()?,
            ),
            AttackModel::PrePhaseSubstitution => {
                let k = planted_outcomes(&dist);
                let s = product_source(cfg, &dist, &k)?;
                planted = Some(k);
                Source::Product(s)
            }
            AttackModel::PostPhaseDeterministic { model } => {
                let counts: Vec<usize> = cfg.alphabet.iter().map(Vec::len).collect();
                if model.dim != cfg.dim || model.setting_counts != counts {
                    return Err(Error::Config("deterministic tables do not match the alphabet".into()));
                }
                if model.assignments.iter().flatten().flatten().any(|&o| o >= cfg.dim as u64) {
                    return Err(Error::Config("table outcome out of range".into()));
                }
                Source::Tables(model.clone(), sampler(&model.weights)?)
            }
        };
        if let AttackModel::Withhold { player } = attack {
            if *player == 0 || *player > cfg.players {
                return Err(Error::Config(format!("withholding player must be in 1..={}", cfg.players)));
            }
        }
        Ok(Engine {
            cfg,
            dist,
            pick,
            source,
            planted,
        })
    }

    fn raw_outcomes(&self, v: usize, rng: &mut ChaCha8Rng) -> Vec<u64> {
        let d = self.cfg.dim;
        match &self.source {
            Source::Quantum(s) => {
                let mut idx = s[v].sample(rng);
                let mut k = vec![0; self.cfg.parties()];
                for slot in k.iter_mut().rev() {
                    *slot = (idx % d) as u64;
                    idx /= d;
                }
                k
            }
            Source::Product(s) => self.dist.vectors[v]
                .iter()
                .enumerate()
                .map(|(j, &a)| s[j][a].sample(rng) as u64)
                .collect(),
            Source::Tables(model, w) => {
                let table: &LocalAssignment = &model.assignments[w.sample(rng)];
                self.dist.vectors[v]
                    .iter()
                    .enumerate()
                    .map(|(j, &a)| table[j][a])
                    .collect()
            }
        }
    }

    fn round(&self, round: usize, secret: Option<u64>, attack: &AttackModel, rng: &mut ChaCha8Rng) -> RoundTranscript {
        let d = self.cfg.dim as u64;
        let secret = secret.unwrap_or_else(|| rng.gen_range(0..d)) % d;
        let v = self.pick.sample(rng);
        let a = self.dist.points[v];
        let reported: Vec<u64> = self.raw_outcomes(v, rng).iter().map(|&k| (d - k) % d).collect();
        let dealer_outcome = reported[0];
        let ciphertext = (secret + dealer_outcome) % d;
        let withheld = match attack {
            AttackModel::Withhold { player } => Some(*player),
            _ => None,
        };
        let player_outcomes: Vec<Option<u64>> = (1..reported.len())
            .map(|j| (Some(j) != withheld).then_some(reported[j]))
            .collect();
        let decoded = (ciphertext + player_outcomes.iter().flatten().sum::<u64>() + a) % d;
        let attacker_guess = self
            .planted
            .as_ref()
            .map(|k| (ciphertext + k[0]) % d);
        RoundTranscript {
            round,
            phases: self.dist.vectors[v].clone(),
            a,
            secret,
            dealer_outcome,
            ciphertext,
            player_outcomes,
            decoded,
            attack: attack.name().into(),
            attacker_guess,
        }
    }

    /// Rounds in parallel batches, batch `b` seeded from `(seed, stream b)`.
    fn run(&self, secret: Option<u64>, attack: &AttackModel) -> Vec<RoundTranscript> {
        let rounds = self.cfg.rounds;
        let batches = rounds.div_ceil(BATCH_ROUNDS);
        (0..batches)
            .into_par_iter()
            .flat_map_iter(|b| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
                rng.set_stream(b as u64);
                let lo = b * BATCH_ROUNDS;
                let hi = (lo + BATCH_ROUNDS).min(rounds);
                (lo..hi)
                    .map(|r| self.round(r, secret, attack, &mut rng))
                    .collect::<Vec<_>>()
            })
            .collect()
    }
}

fn tv_from_uniform(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let u = 1.0 / counts.len() as f64;
    counts
        .iter()
        .map(|&c| (c as f64 / total as f64 - u).abs())
        .sum::<f64>()
        / 2.0
}

fn mutual_information(pairs: impl Iterator<Item = (u64, u64)>, d: usize) -> f64 {
    let mut joint = vec![vec![0usize; d]; d];
    let mut n = 0usize;
    for (x, y) in pairs {
        joint[x as usize][y as usize] += 1;
        n += 1;
    }
    if n == 0 {
        return 0.0;
    }
    let px: Vec<f64> = joint.iter().map(|r| r.iter().sum::<usize>() as f64 / n as f64).collect();
    let py: Vec<f64> = (0..d)
        .map(|y| joint.iter().map(|r| r[y]).sum::<usize>() as f64 / n as f64)
        .collect();
    let mut mi = 0.0;
    for x in 0..d {
        for y in 0..d {
            let p = joint[x][y] as f64 / n as f64;
            if p > 0.0 {
                mi += p * (p / (px[x] * py[y])).ln();
            }
        }
    }
    mi / (d as f64).ln()
}

fn summarize(cfg: &QssConfig, dist: &PhaseDistribution, ts: &[RoundTranscript]) -> QssSummary {
    let d = cfg.dim;
    let n = ts.len();
    let correct = ts.iter().filter(|t| t.decoded == t.secret).count();
    let mut counts = vec![0usize; d];
    for t in ts {
        counts[t.decoded as usize] += 1;
    }
    let accuracy = if n == 0 { 0.0 } else { correct as f64 / n as f64 };
    QssSummary {
        rounds: n,
        accuracy,
        failure_rate: 1.0 - accuracy,
        tv_distance: tv_from_uniform(&counts, n),
        mutual_information: mutual_information(ts.iter().map(|t| (t.secret, t.decoded)), d),
        p_max: dist.p_max(),
        k: d,
    }
}

/// Runs `cfg.rounds` rounds. With `secret = None` a uniformly random secret
/// is drawn each round.
pub fn run_protocol(cfg: &QssConfig, secret: Option<u64>, attack: &AttackModel) -> Result<QssRun> {
    let engine = Engine::new(cfg, attack)?;
    let transcripts = engine.run(secret, attack);
    let summary = summarize(cfg, &engine.dist, &transcripts);
    Ok(QssRun { transcripts, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrePhaseReport {
    pub summary: QssSummary,
    pub p_max: f64,
    pub k: usize,
    /// `(1 - p_max)(1 - 1/k)`, reported only when it applies.
    pub expected_failure: Option<f64>,
    pub mutually_unbiased: bool,
    pub note: Option<String>,
    /// Fraction of rounds in which the attacker's guess equals the secret.
    pub attacker_guess_accuracy: f64,
    /// Guessing advantage rescaled to `[0, 1]`: a proxy for k-its learned.
    pub information_proxy: f64,
}

/// Whether each party's alternative phases give pairwise mutually unbiased
/// measurements.
pub fn alphabet_is_mub(cfg: &QssConfig, tol: f64) -> Result<bool> {
    for a in &cfg.alphabet {
        for (i, p) in a.iter().enumerate() {
            for q in &a[i + 1..] {
                if p == q {
                    continue;
                }
                if !complementarity_report(&phased_x_basis(p), &phased_x_basis(q), tol)?.mutually_unbiased {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

pub fn simulate_pre_phase_attack(cfg: &QssConfig, tol: f64) -> Result<PrePhaseReport> {
    let attack = AttackModel::PrePhaseSubstitution;
    let run = run_protocol(cfg, None, &attack)?;
    let s = run.summary;
    let k = cfg.dim;
    let mub = alphabet_is_mub(cfg, tol)?;
    let n = run.transcripts.len().max(1) as f64;
    let guessed = run
        .transcripts
        .iter()
        .filter(|t| t.attacker_guess == Some(t.secret))
        .count() as f64
        / n;
    let chance = 1.0 / k as f64;
    Ok(PrePhaseReport {
        p_max: s.p_max,
        k,
        expected_failure: mub.then_some((1.0 - s.p_max) * (1.0 - chance)),
        mutually_unbiased: mub,
        note: (!mub).then(|| "formula not applicable: alphabet is not mutually unbiased".to_string()),
        attacker_guess_accuracy: guessed,
        information_proxy: ((guessed - chance) / (1.0 - chance)).max(0.0),
        summary: s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionVerdict {
    Detected,
    Undetected,
    Insufficient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiReport {
    pub verdict: DetectionVerdict,
    pub rounds: usize,
    /// A drawn phase vector (alphabet indices) and an outcome tuple it can
    /// never produce honestly.
    pub impossible_outcome: Option<(Vec<usize>, Vec<usize>)>,
    /// Round-weighted mean over contexts of the total variation distance
    /// between observed and honest raw outcome tuples.
    pub pooled_tv: f64,
    pub max_tv: f64,
    pub tv_threshold: f64,
}

/// Runs the protocol with outcomes fixed by `model` and tests the raw
/// outcome statistics against the honest ones, possibilistically and then by
/// pooled total variation.
pub fn simulate_device_independent_attack(cfg: &QssConfig, model: &LhvModel) -> Result<DiReport> {
    let attack = AttackModel::PostPhaseDeterministic { model: model.clone() };
    let engine = Engine::new(cfg, &attack)?;
    let honest = quantum_source(cfg, &engine.dist)?;
    let run = engine.run(Some(0), &attack);
    let d = cfg.dim as u64;
    let nv = engine.dist.vectors.len();
    let mut counts = vec![vec![0usize; honest[0].probabilities.len()]; nv];
    let mut impossible = None;
    for t in &run {
        let v = engine.dist.vectors.iter().position(|x| *x == t.phases).expect("drawn vector");
        let mut raw: Vec<usize> = vec![((d - t.dealer_outcome) % d) as usize];
        raw.extend(t.player_outcomes.iter().map(|o| ((d - o.expect("no withholding")) % d) as usize));
        let idx = honest[v].index(&raw);
        counts[v][idx] += 1;
        if impossible.is_none() && honest[v].probabilities[idx] <= crate::DEFAULT_TOL {
            impossible = Some((t.phases.clone(), raw));
        }
    }
    let mut pooled = 0.0;
    let mut max_tv: f64 = 0.0;
    for (c, h) in counts.iter().zip(&honest) {
        let n: usize = c.iter().sum();
        if n == 0 {
            continue;
        }
        let tv = c
            .iter()
            .zip(&h.probabilities)
            .map(|(&k, &p)| (k as f64 / n as f64 - p).abs())
            .sum::<f64>()
            / 2.0;
        pooled += tv * n as f64 / run.len() as f64;
        max_tv = max_tv.max(tv);
    }
    let verdict = if run.len() < cfg.min_rounds.max(1) {
        DetectionVerdict::Insufficient
    } else if impossible.is_some() || pooled > cfg.tv_threshold {
        DetectionVerdict::Detected
    } else {
        DetectionVerdict::Undetected
    };
    Ok(DiReport {
        verdict,
        rounds: run.len(),
        impossible_outcome: impossible,
        pooled_tv: pooled,
        max_tv,
        tv_threshold: cfg.tv_threshold,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiAudit {
    /// Whether the alphabet-induced scenario admits a local model.
    pub lhv: LhvVerdict,
    pub tables_checked: u64,
    /// Deterministic tables whose every drawable context stays inside the
    /// honest support.
    pub undetectable_tables: u64,
    /// A mixture reproducing the honest statistics, when one exists.
    pub mimic: Option<LhvModel>,
}

impl DiAudit {
    pub fn secure(&self) -> bool {
        self.lhv.existence == Existence::Refuted && self.undetectable_tables == 0
    }
}

/// Checks every deterministic table against the honest supports and looks
/// for a mimicking local model.
pub fn audit_device_independent(cfg: &QssConfig, bound: u64) -> Result<DiAudit> {
    let dist = PhaseDistribution::uniform(cfg, DEFAULT_VECTOR_BOUND)?;
    let scenario = dist.scenario(cfg)?;
    let table = quantum_table(&scenario, crate::DEFAULT_TOL)?;
    let lhv = lhv_exists(&table, LhvMode::Possibilistic, bound)?;

    let counts: Vec<usize> = cfg.alphabet.iter().map(Vec::len).collect();
    let slots: usize = counts.iter().sum();
    let total = (cfg.dim as u128).checked_pow(slots as u32).unwrap_or(u128::MAX);
    if total > bound as u128 {
        return Err(Error::resource("deterministic table audit", total, bound as u128));
    }
    let supports = table.support_sets();
    let undetectable = (0..total as u64)
        .into_par_iter()
        .filter(|&code| {
            let t = decode_table(code, cfg.dim as u64, &counts);
            dist.vectors
                .iter()
                .zip(&supports)
                .all(|(v, s)| s.contains(&LhvModel::outcome(&t, v)))
        })
        .count() as u64;

    let mimic = if scenario.is_all_classical() {
        Some(build_trivial_lhv(&scenario, &identity_solution(&scenario)?, bound as u128)?)
    } else {
        let parity = lhv_exists(&table, LhvMode::ParityOnly, bound)?;
        match parity.existence {
            Existence::Exists => parity.model,
            _ => None,
        }
    };
    // Scenario settings are first-appearance ordered; reindex to alphabet order.
    let mimic = mimic.map(|m| reindex_model(cfg, &scenario, m));
    Ok(DiAudit {
        lhv,
        tables_checked: total as u64,
        undetectable_tables: undetectable,
        mimic,
    })
}

fn decode_table(mut code: u64, d: u64, counts: &[usize]) -> LocalAssignment {
    counts
        .iter()
        .map(|&c| {
            (0..c)
                .map(|_| {
                    let o = code % d;
                    code /= d;
                    o
                })
                .collect()
        })
        .collect()
}

fn reindex_model(cfg: &QssConfig, s: &MerminScenario, m: LhvModel) -> LhvModel {
    let settings = s.settings();
    let assignments = m
        .assignments
        .iter()
        .map(|a| {
            cfg.alphabet
                .iter()
                .enumerate()
                .map(|(j, alpha)| {
                    alpha
                        .iter()
                        .map(|p| settings[j].iter().position(|q| q == p).map_or(0, |k| a[j][k]))
                        .collect()
                })
                .collect()
        })
        .collect();
    LhvModel {
        dim: m.dim,
        setting_counts: cfg.alphabet.iter().map(Vec::len).collect(),
        assignments,
        weights: m.weights,
    }
}
