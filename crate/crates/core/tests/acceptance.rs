//! Acceptance criteria. Runs without the default test harness and prints one
//! `PASS`/`FAIL` line per criterion; any failure makes the target fail.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use ranked_delegation::axioms::{
    check_copy_robustness, check_guru_participation, check_guru_participation_star, lift_guru_violation, run_axiom,
    Axiom,
};
use ranked_delegation::branching::{borda_branching, unpopularity_margin, Branching, PriorityOrder};
use ranked_delegation::experiment::{run_experiment, ExperimentConfig};
use ranked_delegation::fixtures::{self, fig1};
use ranked_delegation::generate::GenConfig;
use ranked_delegation::model::{classify, paths_from, Instance, DEFAULT_PATH_CAP};
use ranked_delegation::oracle::{oracle_best_sequence, oracle_borda, oracle_unpopularity, enumerate_branchings, OracleBudget};
use ranked_delegation::sampling::{nth_instance, SamplerConfig};
use ranked_delegation::{resolve_confluent, resolve_diffusion_process, Rule, SeqOrder};

type Outcome = Result<String, String>;

const SEED: u64 = 2024;
const ORACLE_INSTANCES: u64 = 500;

fn oracle_batch() -> Vec<Instance> {
    (0..ORACLE_INSTANCES).map(|i| nth_instance(SamplerConfig::ORACLE, SEED, i)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    ensure(start.elapsed() < limit, || format!("took {:?}, limit {:?}", start.elapsed(), limit))
}

fn path_of(inst: &Instance, rule: &Rule, voter: &str) -> Result<String, String> {
    let res = rule.resolve(inst).map_err(|e| e.to_string())?;
    let v = inst.id_of(voter).ok_or("unknown voter")?;
    res.path(v).map(|p| p.display(inst)).ok_or_else(|| format!("{voter} has no path"))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let inst = fig1();
    let expect = [
        (Rule::Dfd, "a -> b -> c -> d -> e -> f -> k"),
        (Rule::Bfd, "a -> b -> c -> i"),
        (Rule::MinSum, "a -> b -> c -> d -> j"),
        (Rule::Leximax, "a -> b -> c -> d -> j"),
    ];
    for (rule, path) in expect {
        let got = path_of(&inst, &rule, "a")?;
        ensure(got == path, || format!("{rule} gives a: {got}, expected {path}"))?;
    }
    let d = inst.id_of("d").unwrap();
    let pd: BTreeSet<String> =
        paths_from(&inst, d, DEFAULT_PATH_CAP).map_err(|e| e.to_string())?.iter().map(|p| p.display(&inst)).collect();
    let want: BTreeSet<String> =
        ["d -> j", "d -> e -> b -> c -> i", "d -> e -> f -> k"].iter().map(|s| s.to_string()).collect();
    ensure(pd == want, || format!("P_d = {pd:?}"))?;
    let g = inst.id_of("g").unwrap();
    ensure(paths_from(&inst, g, DEFAULT_PATH_CAP).map_err(|e| e.to_string())?.is_empty(), || "P_g is not empty".into())?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("fig1 paths exact in {:?}", start.elapsed()))
}

fn criterion_2(batch: &[Instance]) -> Outcome {
    let start = Instant::now();
    let budget = OracleBudget::default();
    let rules = [Rule::Dfd, Rule::Bfd, Rule::MinSum, Rule::Leximax, Rule::Diffusion];
    let mut checked = 0usize;
    for (i, inst) in batch.iter().enumerate() {
        for rule in &rules {
            let res = rule.resolve(inst).map_err(|e| e.to_string())?;
            let order = rule.order().unwrap();
            for v in classify(inst).delegating() {
                let want = oracle_best_sequence(inst, v, &order, budget).map_err(|e| e.to_string())?;
                let got = res.sequence(v).ok_or_else(|| format!("instance {i}: {rule} left {v} unresolved"))?;
                ensure(got == want, || format!("instance {i}, {rule}, voter {v}: {got} vs oracle {want}"))?;
                checked += 1;
            }
        }
        let pi = PriorityOrder::identity(inst.n());
        let b = borda_branching(inst, &pi).map_err(|e| e.to_string())?;
        let want = oracle_borda(inst, &pi, budget).map_err(|e| e.to_string())?;
        ensure(b == want, || format!("instance {i}: borda differs from brute force"))?;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("{checked} voter sequences and {} borda branchings match in {:?}", batch.len(), start.elapsed()))
}

fn criterion_3(batch: &[Instance]) -> Outcome {
    for (i, inst) in batch.iter().enumerate() {
        let process = resolve_diffusion_process(inst).map_err(|e| e.to_string())?;
        let engine = resolve_confluent(inst, &SeqOrder::Diff).map_err(|e| e.to_string())?;
        let same = inst.voters().all(|v| process.path(v) == engine.path(v));
        ensure(same, || format!("instance {i}: diffusion process and diffusion order disagree"))?;
    }
    Ok(format!("{} instances identical", batch.len()))
}

fn criterion_4(batch: &[Instance]) -> Outcome {
    let rules = [Rule::Bfd, Rule::MinSum, Rule::Leximax, Rule::Diffusion, Rule::Borda(None)];
    for (i, inst) in batch.iter().enumerate() {
        for rule in &rules {
            let res = rule.resolve(inst).map_err(|e| e.to_string())?;
            ensure(res.is_confluent(), || format!("instance {i}: {rule} output is not confluent"))?;
        }
    }
    let dfd = Rule::Dfd.resolve(&fig1()).map_err(|e| e.to_string())?;
    ensure(!dfd.is_confluent(), || "dfd is confluent on fig1".into())?;
    Ok(format!("{} rules confluent on {} instances; dfd not confluent on fig1", rules.len(), batch.len()))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let e = |x: ranked_delegation::Error| x.to_string();
    let confluent = [Rule::Bfd, Rule::MinSum, Rule::Leximax, Rule::Diffusion, Rule::Borda(None)];
    for rule in &confluent {
        let report = run_axiom(rule, Axiom::GuruParticipation, 1000, SEED).map_err(e)?;
        ensure(report.passed(), || format!("{rule} guru-participation: {:?}", report.violations.first()))?;
    }
    let inst = fixtures::dfd_guru();
    let x = inst.id_of(fixtures::DFD_GURU_VOTER).unwrap();
    let witness = check_guru_participation(&Rule::Dfd, &inst, x).map_err(e)?;
    let witness = witness.ok_or("dfd guru fixture no longer violates")?;
    let (padded, ballots) = lift_guru_violation(&Rule::Dfd, &inst, witness.voter).map_err(e)?;
    ensure(
        check_guru_participation_star(&Rule::Dfd, &padded, x, &ballots).map_err(e)?.is_some(),
        || "lifted dfd fixture no longer violates the majority version".into(),
    )?;
    let ring = fixtures::copy_ring();
    let u = ring.id_of("u").unwrap();
    for rule in [Rule::Bfd, Rule::MinSum, Rule::Leximax, Rule::Diffusion] {
        ensure(check_copy_robustness(&rule, &ring, u).map_err(e)?.is_some(), || {
            format!("copy ring no longer violates copy-robustness for {rule}")
        })?;
    }
    for rule in [Rule::Dfd, Rule::Borda(None)] {
        let report = run_axiom(&rule, Axiom::CopyRobustness, 1000, SEED).map_err(e)?;
        ensure(report.passed(), || format!("{rule} copy-robustness: {:?}", report.violations.first()))?;
    }
    for rule in Rule::all() {
        let report = run_axiom(&rule, Axiom::Iic, 500, SEED).map_err(e)?;
        ensure(report.passed(), || format!("{rule} IIC: {:?}", report.violations.first()))?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("guru, copy and IIC checks hold; fixtures reproduce, in {:?}", start.elapsed()))
}

fn criterion_6() -> Outcome {
    let budget = OracleBudget::default();
    let mut checked = 0;
    for i in 0..200 {
        let inst = nth_instance(SamplerConfig::POPULARITY, SEED, i);
        let mut candidates = vec![borda_branching(&inst, &PriorityOrder::identity(inst.n())).map_err(|e| e.to_string())?];
        for rule in [Rule::Bfd, Rule::Leximax, Rule::Diffusion] {
            let res = rule.resolve(&inst).map_err(|e| e.to_string())?;
            candidates.push(Branching::from_resolution(&inst, &res).map_err(|e| e.to_string())?);
        }
        let all = enumerate_branchings(&inst, budget).map_err(|e| e.to_string())?;
        candidates.push(all[i as usize % all.len()].clone());
        for b in &candidates {
            let (mu, _) = unpopularity_margin(&inst, b).map_err(|e| e.to_string())?;
            let want = oracle_unpopularity(&inst, b, budget).map_err(|e| e.to_string())?;
            ensure(mu == want, || format!("instance {i}: margin {mu}, brute force {want}"))?;
            checked += 1;
        }
    }
    let inst = fixtures::no_popular();
    for b in enumerate_branchings(&inst, budget).map_err(|e| e.to_string())? {
        ensure(unpopularity_margin(&inst, &b).map_err(|e| e.to_string())?.0 > 0, || "no_popular has a popular branching".into())?;
    }
    Ok(format!("{checked} margins match brute force; no_popular fixture has no popular branching"))
}

fn friendship_batch() -> Result<ranked_delegation::experiment::ExperimentReport, String> {
    let cfg = ExperimentConfig {
        seed: SEED,
        instances: 100,
        rules: None,
        truncation: Vec::new(),
        base: None,
        generator: GenConfig::friendship(200, 4.0, 0.2, 2.0, 0),
    };
    run_experiment(&cfg, None).map_err(|e| e.to_string())
}

fn criterion_7(report: &ranked_delegation::experiment::ExperimentReport, elapsed: Duration) -> Outcome {
    let frac = report.borda_popular_fraction().ok_or("borda did not run")?;
    ensure(frac >= 0.80, || format!("borda popular in only {:.1}% of instances", 100.0 * frac))?;
    ensure(elapsed < Duration::from_secs(600), || format!("took {elapsed:?}"))?;
    Ok(format!("borda popular in {:.0}% of 100 instances (threshold 80%), {:?}", 100.0 * frac, elapsed))
}

fn criterion_8(report: &ranked_delegation::experiment::ExperimentReport) -> Outcome {
    let get = |r: &str| report.summary(r).map(|s| &s.mean).ok_or(format!("missing rule {r}"));
    let bfd = get("bfd")?;
    let borda = get("borda")?;
    for s in &report.rules {
        ensure(bfd.avg_len <= s.mean.avg_len, || format!("avg_len of bfd exceeds {}", s.rule))?;
    }
    ensure(borda.avg_rank <= bfd.avg_rank, || "avg_rank of borda exceeds bfd".into())?;
    ensure(bfd.max_weight <= borda.max_weight, || "max_weight of bfd exceeds borda".into())?;
    ensure(borda.unpop <= bfd.unpop, || "unpop of borda exceeds bfd".into())?;
    Ok("bfd shortest paths, borda lower avg_rank, higher max_weight, lower unpop".into())
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        seed: SEED,
        instances: 50,
        rules: Some(Vec::new()),
        truncation: vec![1, 2],
        base: None,
        generator: GenConfig::friendship(1000, 5.0, 0.05, 2.0, 0),
    };
    let report = run_experiment(&cfg, None).map_err(|e| e.to_string())?;
    let (d1, d2) = (report.truncation[0].mean_isolated_fraction, report.truncation[1].mean_isolated_fraction);
    ensure(d2 < 0.05, || format!("isolated fraction at cap 2 is {d2:.4}"))?;
    ensure(d2 < d1 / 5.0, || format!("cap 2 fraction {d2:.4} not below a fifth of cap 1 fraction {d1:.4}"))?;
    within(start, Duration::from_secs(300))?;
    Ok(format!("isolated fraction {d1:.4} at cap 1, {d2:.4} at cap 2"))
}

fn criterion_10(batch: &[Instance]) -> Outcome {
    let mut checked = 0;
    for (i, inst) in batch.iter().enumerate() {
        let bfd = Rule::Bfd.resolve(inst).map_err(|e| e.to_string())?;
        let minsum = Rule::MinSum.resolve(inst).map_err(|e| e.to_string())?;
        let leximax = Rule::Leximax.resolve(inst).map_err(|e| e.to_string())?;
        for v in classify(inst).delegating() {
            let seqs: Vec<_> = paths_from(inst, v, DEFAULT_PATH_CAP).map_err(|e| e.to_string())?.iter().map(|p| p.sequence()).collect();
            let min_len = seqs.iter().map(|s| s.len()).min().unwrap();
            let min_sum = seqs.iter().map(|s| s.sum()).min().unwrap();
            let min_max = seqs.iter().map(|s| s.max_rank()).min().unwrap();
            ensure(bfd.sequence(v).unwrap().len() == min_len, || format!("instance {i}: bfd length of {v}"))?;
            ensure(minsum.sequence(v).unwrap().sum() == min_sum, || format!("instance {i}: minsum sum of {v}"))?;
            ensure(leximax.sequence(v).unwrap().max_rank() == min_max, || format!("instance {i}: leximax max of {v}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} voters certified"))
}

fn report(id: usize, name: &str, outcome: Outcome) -> bool {
    match outcome {
        Ok(detail) => {
            println!("PASS criterion {id:>2} {name}: {detail}");
            true
        }
        Err(why) => {
            println!("FAIL criterion {id:>2} {name}: {why}");
            false
        }
    }
}

fn main() {
    let batch = oracle_batch();
    let mut ok = true;
    ok &= report(1, "figure-1 golden fixture", criterion_1());
    ok &= report(2, "oracle equivalence", criterion_2(&batch));
    ok &= report(3, "diffusion duality", criterion_3(&batch));
    ok &= report(4, "confluence", criterion_4(&batch));
    ok &= report(5, "axiom suite", criterion_5());
    ok &= report(6, "unpopularity correctness", criterion_6());
    let start = Instant::now();
    match friendship_batch() {
        Ok(batch_report) => {
            let elapsed = start.elapsed();
            ok &= report(7, "popularity frequency", criterion_7(&batch_report, elapsed));
            ok &= report(8, "qualitative spectrum", criterion_8(&batch_report));
        }
        Err(e) => {
            ok &= report(7, "popularity frequency", Err(e.clone()));
            ok &= report(8, "qualitative spectrum", Err(e));
        }
    }
    ok &= report(9, "backup delegation", criterion_9());
    ok &= report(10, "optimality certificates", criterion_10(&batch));
    if !ok {
        std::process::exit(1);
    }
}
