//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p delayed-bandit --test acceptance`. The mushroom
//! experiments use `$DELAYED_BANDIT_DATA/agaricus-lepiota.data` when it exists
//! and the built-in surrogate otherwise.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use delayed_bandit::design::{DesignMatrix, DesignMode};
use delayed_bandit::env::{DelayDistribution, DelayFamily, EnvSeeds, Environment, RevealQueue};
use delayed_bandit::harness::{
    aggregate, build_source, emit, neural_config, run_csv, run_experiment, run_seed, Algorithm,
    DelaySpec, ExperimentConfig, RunResult, SourceKind, DATA_ENV,
};
use delayed_bandit::model::{forward, gradient, init_symmetric, NetworkShape, ParamVector};
use delayed_bandit::ntk::{d_plus, ntk_gram, DelayBoundParams};
use delayed_bandit::policy::{NeuralPolicy, Policy};
use delayed_bandit::rng::{stream, Stream};
use delayed_bandit::BanditRecord;

type Outcome = Result<String, String>;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn workspace_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn config(rel: &str) -> ExperimentConfig {
    ExperimentConfig::load(workspace_file(rel)).expect("bundled config parses")
}

/// The mushroom config, pointed at the UCI file when one is available.
fn mushroom_config() -> (ExperimentConfig, &'static str) {
    let mut cfg = config("configs/mushroom.toml");
    if let Some(dir) = std::env::var_os(DATA_ENV) {
        let file = Path::new(&dir).join("agaricus-lepiota.data");
        if file.is_file() {
            cfg.environment.source = SourceKind::Mushroom;
            cfg.environment.path = Some(file);
            return (cfg, "UCI agaricus-lepiota.data");
        }
    }
    (cfg, "built-in surrogate (no agaricus-lepiota.data found)")
}

// ---------------------------------------------------------------------------
// 1. zero delay

fn zero_delay_equivalence() -> Outcome {
    let mut cfg = ExperimentConfig {
        horizon: 200,
        arms: Some(4),
        ..ExperimentConfig::default()
    };
    cfg.environment.source = SourceKind::Synthetic;
    cfg.environment.dim = 4;
    cfg.environment.embed_assumption3 = true;
    cfg.policy.width = 8;
    cfg.policy.depth = 2;
    cfg.policy.algorithm = Algorithm::DelayedNeuralUcb;
    cfg.environment.delay = DelaySpec::expected(DelayFamily::None, 0.0);
    let seed = 11;

    let delayed = run_seed(&cfg, None, seed).map_err(|e| e.to_string())?;

    // plain NeuralUCB loop: every reward is handed over in its own round
    cfg.policy.algorithm = Algorithm::NeuralUcb;
    let source = build_source(&cfg, None).map_err(|e| e.to_string())?;
    let mut env = Environment::new(
        source,
        cfg.noise_sigma(),
        DelayDistribution::None,
        EnvSeeds::uniform(seed),
    )
    .map_err(|e| e.to_string())?;
    let mut policy = NeuralPolicy::new(
        neural_config(&cfg).map_err(|e| e.to_string())?,
        &mut stream(seed, Stream::PolicyInit),
        stream(seed, Stream::Policy),
    )
    .map_err(|e| e.to_string())?;
    let mut arms = Vec::new();
    let mut cum = Vec::new();
    let mut total = 0.0;
    for t in 1..=cfg.horizon {
        let contexts = env.observe(t).map_err(|e| e.to_string())?.to_vec();
        let arm = policy.select(t, &contexts).map_err(|e| e.to_string())?.arm;
        let out = env.step(t, arm).map_err(|e| e.to_string())?;
        policy
            .ingest(
                t,
                vec![BanditRecord::new(t, contexts[arm].clone(), arm, out.reward)],
            )
            .map_err(|e| e.to_string())?;
        total += out.regret;
        arms.push(arm);
        cum.push(total);
    }

    let d_arms: Vec<usize> = delayed.rows.iter().map(|r| r.arm).collect();
    let d_cum: Vec<f64> = delayed.rows.iter().map(|r| r.cum_regret).collect();
    if d_arms != arms {
        let first = arms.iter().zip(&d_arms).position(|(a, b)| a != b);
        return Err(format!("action sequences differ, first at index {first:?}"));
    }
    if d_cum
        .iter()
        .zip(&cum)
        .any(|(a, b)| a.to_bits() != b.to_bits())
    {
        return Err("cumulative regret differs".into());
    }
    let undelayed = run_seed(&cfg, None, seed).map_err(|e| e.to_string())?;
    if undelayed.rows != delayed.rows {
        return Err("harness NeuralUCB run differs from delayed run".into());
    }
    Ok(format!(
        "T=200, K=4, m=8: identical actions, final regret {total}"
    ))
}

// ---------------------------------------------------------------------------
// 2. gradient oracle

/// Pre-activations of every hidden layer, computed from the flat layout.
fn pre_activations(theta: &ParamVector, x: &[f64]) -> Vec<Vec<f64>> {
    let shape = *theta.shape();
    let m = shape.width();
    let mut input = x.to_vec();
    let mut out = Vec::new();
    for l in 1..shape.depth() {
        let w = theta.layer(l);
        let pre: Vec<f64> = (0..m)
            .map(|i| {
                (0..input.len())
                    .map(|j| w[i * input.len() + j] * input[j])
                    .sum()
            })
            .collect();
        input = pre.iter().map(|v| v.max(0.0)).collect();
        out.push(pre);
    }
    out
}

fn pattern(theta: &ParamVector, x: &[f64]) -> Vec<bool> {
    pre_activations(theta, x)
        .into_iter()
        .flatten()
        .map(|v| v > 0.0)
        .collect()
}

fn gradient_oracle() -> Outcome {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    let mut instances = 0;
    let mut attempts = 0;
    while instances < 50 {
        attempts += 1;
        let depth = r.random_range(2..=4);
        let width = 2 * r.random_range(1..=8);
        let dim = 2 * r.random_range(1..=4);
        let shape = NetworkShape::new(depth, width, dim).map_err(|e| e.to_string())?;
        let init = init_symmetric(shape, &mut r).map_err(|e| e.to_string())?;
        let values: Vec<f64> = init
            .values()
            .iter()
            .map(|v| v + 0.3 * normal(&mut r))
            .collect();
        let theta = ParamVector::from_values(shape, values).map_err(|e| e.to_string())?;
        let x: Vec<f64> = (0..dim).map(|_| normal(&mut r)).collect();
        let pre = pre_activations(&theta, &x);
        if pre.iter().flatten().any(|v| v.abs() <= 1e-3) {
            continue;
        }
        instances += 1;
        let g = gradient(&theta, &x).map_err(|e| e.to_string())?;
        let base = pattern(&theta, &x);
        for i in 0..theta.len() {
            let mut h = 1e-3;
            let (plus, minus) = loop {
                let mut p = theta.values().to_vec();
                let mut q = p.clone();
                p[i] += h;
                q[i] -= h;
                let p = ParamVector::from_values(shape, p).map_err(|e| e.to_string())?;
                let q = ParamVector::from_values(shape, q).map_err(|e| e.to_string())?;
                if pattern(&p, &x) == base && pattern(&q, &x) == base {
                    break (p, q);
                }
                h /= 10.0;
            };
            let fd = (forward(&plus, &x).map_err(|e| e.to_string())?
                - forward(&minus, &x).map_err(|e| e.to_string())?)
                / (2.0 * h);
            let gi = g.values()[i];
            let scale = gi.abs().max(fd.abs());
            if scale > 0.0 {
                worst = worst.max((gi - fd).abs() / scale);
            }
        }
    }
    let msg = format!(
        "50 instances ({} resampled near kinks), max relative error {worst:.2e}",
        attempts - 50
    );
    if worst <= 1e-4 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------------------
// 3. design matrix

fn design_oracle() -> Outcome {
    let p = 50;
    let lambda = 1.0;
    let mut r = rng(3);
    let mut design = DesignMatrix::new(p, lambda, DesignMode::Full).map_err(|e| e.to_string())?;
    let mut z = DMatrix::<f64>::identity(p, p) * lambda;
    for _ in 0..200 {
        let u: Vec<f64> = (0..p).map(|_| normal(&mut r) / (p as f64).sqrt()).collect();
        design.rank1_update(&u).map_err(|e| e.to_string())?;
        for i in 0..p {
            for j in 0..p {
                z[(i, j)] += u[i] * u[j];
            }
        }
    }
    let chol = z.clone().cholesky().ok_or("direct Cholesky failed")?;
    let direct_inv = chol.inverse();
    let direct_logdet =
        2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>() - p as f64 * lambda.ln();
    let inv_err = (design.inverse() - &direct_inv).amax() / direct_inv.amax();
    let ld_err = (design.logdet_ratio() - direct_logdet).abs() / direct_logdet.abs();
    let msg =
        format!("p=50, 200 updates: inverse rel err {inv_err:.2e}, logdet rel err {ld_err:.2e}");
    if inv_err <= 1e-8 && ld_err <= 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------------------
// 4. NTK oracle

fn unit(r: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| normal(r)).collect();
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / n).collect()
}

/// Monte Carlo estimate and standard error of the final Gram entry, sampling
/// the last layer's Gaussian pair under the closed-form previous-level kernels.
fn monte_carlo_entry(s: [f64; 3], h_prev: f64, samples: usize, r: &mut ChaCha8Rng) -> (f64, f64) {
    let [s_ii, s_ij, s_jj] = s;
    let a = s_ii.sqrt();
    let b = s_ij / a;
    let c = (s_jj - b * b).max(0.0).sqrt();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let (z1, z2) = (normal(r), normal(r));
        let u = a * z1;
        let v = b * z1 + c * z2;
        let relu = 2.0 * u.max(0.0) * v.max(0.0);
        let step = if u > 0.0 && v > 0.0 { 2.0 } else { 0.0 };
        // H = (H_tilde + Sigma) / 2 with H_tilde = h_prev * step + relu
        let z = (h_prev * step + 2.0 * relu) / 2.0;
        sum += z;
        sum_sq += z * z;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn ntk_oracle() -> Outcome {
    let mut r = rng(4);
    let mut worst_z: f64 = 0.0;
    for depth in [2usize, 3] {
        for _ in 0..20 {
            let x = unit(&mut r, 5);
            let y = unit(&mut r, 5);
            let gram = ntk_gram(&[x, y], depth).map_err(|e| e.to_string())?;
            let s = &gram.sigma[depth - 2];
            let (mc, se) = monte_carlo_entry(
                [s[(0, 0)], s[(0, 1)], s[(1, 1)]],
                gram.h_tilde[depth - 2][(0, 1)],
                1_000_000,
                &mut r,
            );
            worst_z = worst_z.max((gram.h[(0, 1)] - mc).abs() / se);
        }
    }
    let self_entry = ntk_gram(&[vec![0.6, 0.8]], 2).map_err(|e| e.to_string())?.h[(0, 0)];
    let orth = ntk_gram(&[vec![1.0, 0.0], vec![0.0, 1.0]], 2)
        .map_err(|e| e.to_string())?
        .h[(0, 1)];
    let hand = (self_entry - 1.5).abs().max((orth - 1.0 / PI).abs());
    let msg = format!("40 pairs, max |closed - MC| = {worst_z:.2} SE; hand values err {hand:.1e}");
    if worst_z <= 3.0 && hand <= 1e-3 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------------------
// 5. reveal protocol

fn reveal_protocol() -> Outcome {
    let dists = [
        DelayDistribution::from_expected(DelayFamily::Uniform, 30.0),
        DelayDistribution::from_expected(DelayFamily::Exponential, 30.0),
        DelayDistribution::from_expected(DelayFamily::Pareto, 30.0),
    ];
    let mut r = rng(5);
    let mut checked = 0;
    for dist in dists {
        let dist = dist.map_err(|e| e.to_string())?;
        let taus: Vec<f64> = (0..500).map(|_| dist.sample(&mut r)).collect();
        let mut queue = RevealQueue::new();
        let mut seen = vec![false; taus.len()];
        let mut t = 0;
        while t < taus.len() || queue.pending_count() > 0 {
            t += 1;
            if t <= taus.len() {
                let tau = taus[t - 1];
                let bucket = queue
                    .schedule(t, tau, BanditRecord::new(t, vec![0.0], 0, 0.0))
                    .map_err(|e| e.to_string())?;
                if bucket as f64 != (t as f64 + tau).ceil() {
                    return Err(format!(
                        "{dist}: s={t}, tau={tau} placed in bucket {bucket}"
                    ));
                }
            }
            for rec in queue.pop_revealed(t).map_err(|e| e.to_string())? {
                let at = rec.round as f64 + taus[rec.round - 1];
                if !(t as f64 - 1.0 < at && at <= t as f64) || seen[rec.round - 1] {
                    return Err(format!(
                        "{dist}: round {} popped at {t}, s+tau={at}",
                        rec.round
                    ));
                }
                seen[rec.round - 1] = true;
            }
            if queue.inserted() != queue.popped() + queue.pending_count() {
                return Err(format!("{dist}: conservation broken at t={t}"));
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(format!("{dist}: some rewards were never revealed"));
        }
        checked += taus.len();
    }
    Ok(format!(
        "{checked} pairs over uniform, exponential, Pareto delays"
    ))
}

// ---------------------------------------------------------------------------
// 6. delay mapping

fn delay_mapping() -> Outcome {
    let expected = [
        (
            DelayFamily::Exponential,
            "Exponential(rate=0.03333333333333333)",
        ),
        (DelayFamily::Uniform, "Uniform(0, 60)"),
        (DelayFamily::Pareto, "Pareto(a=1.0333333333333334, x_m=1)"),
    ];
    let mut got = Vec::new();
    for (family, want) in expected {
        let text = DelaySpec::expected(family, 30.0)
            .resolve()
            .map_err(|e| e.to_string())?
            .to_string();
        if text != want {
            return Err(format!("{family:?}: got {text}, want {want}"));
        }
        got.push(text);
    }
    if (31.0f64 / 30.0).to_string() != "1.0333333333333334" {
        return Err("31/30 prints differently".into());
    }
    Ok(got.join(", "))
}

// ---------------------------------------------------------------------------
// 7. D_+

fn d_plus_oracle() -> Outcome {
    // 3T / (2 delta) = e^3 with T = 3
    let trivial = d_plus(&DelayBoundParams {
        horizon: 3,
        delta: 3.0 * 3.0 / (2.0 * 3f64.exp()),
        expected_delay: 0.0,
        alpha: 0.0,
        b: 0.0,
    })
    .map_err(|e| e.to_string())?
    .d_plus;
    let got = d_plus(&DelayBoundParams {
        horizon: 1000,
        delta: 0.05,
        expected_delay: 30.0,
        alpha: 30.0,
        b: 0.0,
    })
    .map_err(|e| e.to_string())?
    .d_plus;
    // log 30000 = log 3 + 4 log 10, summed smallest terms first
    let l = 3f64.ln() + 4.0 * std::f64::consts::LN_10;
    let d_tau = 30.0 * (2.0 * l).sqrt();
    let psi = 4.0 * l / 3.0 + 2.0 * 60f64.sqrt() * l.sqrt();
    let oracle = ((psi + d_tau) + 60.0) + 1.0;
    let rel = (got - oracle).abs() / oracle;

    let mut monotone = true;
    let mut prev_t = f64::NEG_INFINITY;
    for horizon in [10, 100, 1000, 10_000, 100_000] {
        let mut prev_e = f64::NEG_INFINITY;
        for e in [0.0, 0.5, 1.0, 5.0, 30.0, 100.0] {
            let v = d_plus(&DelayBoundParams {
                horizon,
                delta: 0.05,
                expected_delay: e,
                alpha: 2.0,
                b: 0.0,
            })
            .map_err(|e| e.to_string())?
            .d_plus;
            monotone &= v >= prev_e;
            prev_e = v;
        }
        let v = d_plus(&DelayBoundParams {
            horizon,
            delta: 0.05,
            expected_delay: 30.0,
            alpha: 2.0,
            b: 0.0,
        })
        .map_err(|e| e.to_string())?
        .d_plus;
        monotone &= v >= prev_t;
        prev_t = v;
    }
    let msg = format!(
        "plug-in {trivial} (err {:.1e}); T=1000 case {got:.4} vs oracle {oracle:.4} (rel {rel:.1e}); grid monotone: {monotone}",
        (trivial - 5.0).abs()
    );
    if (trivial - 5.0).abs() <= 1e-12 && rel <= 1e-9 && monotone {
        Ok(msg)
    } else {
        Err(msg)
    }
}

// ---------------------------------------------------------------------------
// 8-10. desk-scale experiments

struct Experiment {
    name: String,
    results: Vec<RunResult>,
    mean: Vec<f64>,
}

impl Experiment {
    fn run(cfg: &ExperimentConfig) -> Result<Self, String> {
        let results = run_experiment(cfg, 1).map_err(|e| e.to_string())?;
        let mean = aggregate(&results).map_err(|e| e.to_string())?.mean;
        Ok(Self {
            name: cfg.policy.algorithm.name().to_string(),
            results,
            mean,
        })
    }

    fn final_regret(&self) -> f64 {
        *self.mean.last().expect("nonempty horizon")
    }

    /// Mean regret accrued in rounds `from..=to` (1-based).
    fn window(&self, from: usize, to: usize) -> f64 {
        let before = if from > 1 { self.mean[from - 2] } else { 0.0 };
        self.mean[to - 1] - before
    }
}

struct Desk {
    mushroom: Vec<Experiment>,
    synthetic: Vec<Experiment>,
}

fn desk_configs() -> (Vec<ExperimentConfig>, Vec<ExperimentConfig>) {
    let (base, _) = mushroom_config();
    let mushroom = Algorithm::ALL
        .iter()
        .map(|&a| {
            let mut cfg = base.clone();
            cfg.policy.algorithm = a;
            cfg
        })
        .collect();
    let syn = config("configs/synthetic-quadratic.toml");
    let synthetic = [Algorithm::NeuralUcb, Algorithm::LinUcb]
        .iter()
        .map(|&a| {
            let mut cfg = syn.clone();
            cfg.policy.algorithm = a;
            cfg
        })
        .collect();
    (mushroom, synthetic)
}

fn run_desk() -> Result<Desk, String> {
    let (mushroom, synthetic) = desk_configs();
    Ok(Desk {
        mushroom: mushroom
            .iter()
            .map(Experiment::run)
            .collect::<Result<_, _>>()?,
        synthetic: synthetic
            .iter()
            .map(Experiment::run)
            .collect::<Result<_, _>>()?,
    })
}

fn desk_ordering(desk: &Desk) -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for e in &desk.mushroom {
        let (first, last) = (e.window(1, 500), e.window(1501, 2000));
        ok &= last < first;
        lines.push(format!(
            "      {:<20} final {:>8.2}  rounds 1-500 {:>7.2}  rounds 1501-2000 {:>7.2}",
            e.name,
            e.final_regret(),
            first,
            last
        ));
    }
    let find = |name: &str| {
        desk.mushroom
            .iter()
            .find(|e| e.name == name)
            .expect("all algorithms ran")
    };
    let ratio = find("delayed-neural-ucb").final_regret() / find("neural-ucb").final_regret();
    ok &= (1.0..=2.0).contains(&ratio);
    lines.push(format!(
        "      delayed/undelayed NeuralUCB final regret ratio {ratio:.3}"
    ));
    let neural = desk.synthetic[0].final_regret();
    let linear = desk.synthetic[1].final_regret();
    ok &= neural < linear;
    lines.push(format!(
        "      synthetic quadratic: neural-ucb {neural:.2} vs lin-ucb {linear:.2}"
    ));
    let msg = format!("\n{}", lines.join("\n"));
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn delay_families(desk: &Desk) -> Outcome {
    let (base, _) = mushroom_config();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    for family in [
        DelayFamily::Uniform,
        DelayFamily::Exponential,
        DelayFamily::Pareto,
    ] {
        let mut cfg = base.clone();
        cfg.policy.algorithm = Algorithm::DelayedNeuralUcb;
        cfg.environment.delay = DelaySpec::expected(family, 30.0);
        let exp = if family == DelayFamily::Uniform {
            desk.mushroom
                .iter()
                .find(|e| e.name == "delayed-neural-ucb")
                .map(|e| Experiment {
                    name: e.name.clone(),
                    results: e.results.clone(),
                    mean: e.mean.clone(),
                })
                .expect("criterion 8 ran delayed-neural-ucb")
        } else {
            Experiment::run(&cfg)?
        };
        let out = dir.path().join(format!("{family:?}").to_lowercase());
        emit(&cfg, &exp.results, None, &out, false).map_err(|e| e.to_string())?;
        let mean_csv = std::fs::read_to_string(out.join("mean.csv")).map_err(|e| e.to_string())?;
        if mean_csv.lines().count() != cfg.horizon + 1 {
            return Err(format!(
                "{family:?}: mean.csv has {} lines",
                mean_csv.lines().count()
            ));
        }
        let delay = cfg.effective_delay().map_err(|e| e.to_string())?;
        lines.push(format!(
            "      {:<38} final mean regret {:>8.2}",
            delay.to_string(),
            exp.final_regret()
        ));
    }
    Ok(format!("\n{}", lines.join("\n")))
}

fn determinism(desk: &Desk) -> Outcome {
    let (mushroom, synthetic) = desk_configs();
    let mut files = 0;
    for (cfg, before) in mushroom
        .iter()
        .chain(&synthetic)
        .zip(desk.mushroom.iter().chain(&desk.synthetic))
    {
        let again = run_experiment(cfg, 1).map_err(|e| e.to_string())?;
        for (a, b) in before.results.iter().zip(&again) {
            if run_csv(a) != run_csv(b) {
                return Err(format!(
                    "{} seed {}: CSV differs on rerun",
                    before.name, a.seed
                ));
            }
            files += 1;
        }
    }
    Ok(format!("{files} run CSVs byte-identical on rerun"))
}

// ---------------------------------------------------------------------------

struct Criterion {
    id: u8,
    title: &'static str,
    limit_seconds: Option<f64>,
}

fn report(c: &Criterion, started: Instant, outcome: Outcome) -> bool {
    let secs = started.elapsed().as_secs_f64();
    let in_time = c.limit_seconds.is_none_or(|l| secs < l);
    let (ok, detail) = match outcome {
        Ok(d) => (in_time, d),
        Err(d) => (false, d),
    };
    let limit = c
        .limit_seconds
        .map(|l| format!(" / limit {l:.0}s"))
        .unwrap_or_default();
    println!(
        "{} {:>2}. {}: {detail} [{secs:.1}s{limit}]",
        if ok { "PASS" } else { "FAIL" },
        c.id,
        c.title
    );
    ok
}

fn main() -> ExitCode {
    let (_, data) = mushroom_config();
    println!("mushroom data: {data}");
    let mut all = true;
    let simple: [(Criterion, fn() -> Outcome); 7] = [
        (
            Criterion {
                id: 1,
                title: "zero-delay equivalence",
                limit_seconds: Some(30.0),
            },
            zero_delay_equivalence,
        ),
        (
            Criterion {
                id: 2,
                title: "gradient oracle",
                limit_seconds: Some(10.0),
            },
            gradient_oracle,
        ),
        (
            Criterion {
                id: 3,
                title: "linear-algebra oracle",
                limit_seconds: Some(5.0),
            },
            design_oracle,
        ),
        (
            Criterion {
                id: 4,
                title: "NTK oracle",
                limit_seconds: Some(60.0),
            },
            ntk_oracle,
        ),
        (
            Criterion {
                id: 5,
                title: "reveal protocol",
                limit_seconds: Some(5.0),
            },
            reveal_protocol,
        ),
        (
            Criterion {
                id: 6,
                title: "delay-parameter mapping",
                limit_seconds: None,
            },
            delay_mapping,
        ),
        (
            Criterion {
                id: 7,
                title: "D_+ calculator",
                limit_seconds: None,
            },
            d_plus_oracle,
        ),
    ];
    for (c, f) in simple {
        let start = Instant::now();
        all &= report(&c, start, f());
    }

    let c8 = Criterion {
        id: 8,
        title: "desk-scale ordering (mushroom, 5 seeds)",
        limit_seconds: Some(1200.0),
    };
    let start = Instant::now();
    let desk = run_desk();
    let desk = match desk {
        Ok(d) => {
            all &= report(&c8, start, desk_ordering(&d));
            Some(d)
        }
        Err(e) => {
            all &= report(&c8, start, Err(e));
            None
        }
    };
    let c9 = Criterion {
        id: 9,
        title: "delay families complete",
        limit_seconds: Some(1800.0),
    };
    let c10 = Criterion {
        id: 10,
        title: "determinism",
        limit_seconds: None,
    };
    match &desk {
        Some(d) => {
            let start = Instant::now();
            all &= report(&c9, start, delay_families(d));
            let start = Instant::now();
            all &= report(&c10, start, determinism(d));
        }
        None => {
            all &= report(&c9, Instant::now(), Err("criterion 8 runs failed".into()));
            all &= report(&c10, Instant::now(), Err("criterion 8 runs failed".into()));
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
