//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::{random_network, random_suite, rng, SUITE_SEED};
use kamrfp::attack::{k1_bisection_oracle, worst_case};
use kamrfp::maxflow::{max_flow, max_flow_with_order, min_cut_cardinality, residual_value};
use kamrfp::model::{solve_kamrfp, ObjectiveMode, Solution, SolveOptions};
use kamrfp::{ArcId, ArcSet, Error, InputFormat, Network, Rational};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

type Check = Result<String, String>;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn cli(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["kamrfp"];
    full.extend_from_slice(args);
    let out = kamrfp::cli::run(full);
    let doc = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
    (out.exit_code, doc)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn solve(net: &Network, k: usize, mode: ObjectiveMode) -> Result<Solution, String> {
    solve_kamrfp(net, k, &SolveOptions { mode, ..Default::default() }).map_err(|e| e.to_string())
}

fn choose(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_1() -> Check {
    let path = fixtures().join("paper_b4.dimacs");
    let start = Instant::now();
    let (code, doc) = cli(&["solve", "-k", "1", path.to_str().unwrap()]);
    let elapsed = start.elapsed();
    ensure(code == 0, || format!("exit code {code}: {doc}"))?;
    for (key, want) in [("fstar", "4"), ("theta", "2"), ("loss", "2")] {
        ensure(doc[key] == want, || format!("{key} = {}, expected {want}", doc[key]))?;
    }
    ensure(doc["certified"] == true, || "not certified".into())?;
    let flow = doc["flow"].as_array().ok_or("flow missing")?;
    for arc in [5, 6] {
        let v = &flow[arc - 1];
        ensure(v["arc"] == arc && v["value"] == "2", || format!("(v,t) arc entry {v}"))?;
    }
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    for b in [6usize, 8, 10] {
        let path = fixtures().join(format!("paper_b{b}.dimacs"));
        let (code, doc) = cli(&["solve", "-k", "1", path.to_str().unwrap()]);
        let half = (b / 2).to_string();
        ensure(code == 0 && doc["theta"] == half.as_str(), || format!("b={b}: theta {}", doc["theta"]))?;
        ensure(doc["certified"] == true, || format!("b={b}: not certified"))?;
        let flow = doc["flow"].as_array().unwrap();
        ensure(flow[b]["value"] == half.as_str() && flow[b + 1]["value"] == half.as_str(), || {
            format!("b={b}: (v,t) values {} {}", flow[b]["value"], flow[b + 1]["value"])
        })?;
    }
    Ok(format!("theta 2 in {elapsed:.1?}; b = 6, 8, 10 give b/2"))
}

fn criterion_2() -> Check {
    let path = fixtures().join("paper_b4.dimacs");
    let (code, doc) = cli(&["solve", "-k", "2", path.to_str().unwrap()]);
    ensure(code == 0, || format!("exit code {code}"))?;
    ensure(doc["theta"] == "0" && doc["loss"] == "4", || format!("theta {} loss {}", doc["theta"], doc["loss"]))?;
    ensure(doc["worst_attack"] == serde_json::json!([5, 6]), || format!("worst_attack {}", doc["worst_attack"]))?;
    ensure(doc["certified"] == true, || "not certified".into())?;
    Ok("theta 0, loss 4, attack [5, 6]".into())
}

fn criterion_3() -> Check {
    let mut checked = 0;
    let mut entries: Vec<PathBuf> = std::fs::read_dir(fixtures())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| matches!(p.extension().and_then(|e| e.to_str()), Some("dimacs" | "json")))
        .collect();
    entries.sort();
    for path in entries {
        let format = if path.extension().unwrap() == "json" { "json" } else { "dimacs" };
        let text = std::fs::read_to_string(&path).unwrap();
        let fmt = if format == "json" { InputFormat::Json } else { InputFormat::Dimacs };
        let m = Network::parse(&text, fmt).map_err(|e| e.to_string())?.arc_count();
        for k in 1..=m.min(3) {
            let ks = k.to_string();
            let (code, doc) = cli(&["solve", "-k", &ks, "--no-certify", "--format", format, path.to_str().unwrap()]);
            ensure(code == 0, || format!("{}: exit {code}", path.display()))?;
            let want = (m + 1) + 1 + choose(m, k) * (m + 1 - k);
            ensure(doc["variables"] == want, || {
                format!("{} k={k}: {} variables, formula gives {want}", path.display(), doc["variables"])
            })?;
            ensure(doc["scenarios"] == choose(m, k), || format!("{} k={k}: scenario count", path.display()))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} fixture/k pairs match"))
}

struct SuiteRun {
    net: Network,
    k: usize,
    two_phase: Solution,
}

fn run_suite() -> Result<Vec<SuiteRun>, String> {
    random_suite(SUITE_SEED, 200)
        .into_iter()
        .map(|(net, k)| Ok(SuiteRun { two_phase: solve(&net, k, ObjectiveMode::TwoPhase)?, net, k }))
        .collect()
}

fn criterion_4(suite: &[SuiteRun]) -> Check {
    let mut nonzero = 0;
    for (i, run) in suite.iter().enumerate() {
        let rep = worst_case(&run.net, &run.two_phase.flow, run.k).map_err(|e| e.to_string())?;
        ensure(rep.residual == run.two_phase.theta, || {
            format!("instance {i} (k={}): attack leaves {}, LP theta {}", run.k, rep.residual, run.two_phase.theta)
        })?;
        ensure(run.two_phase.certified, || format!("instance {i} not certified"))?;
        nonzero += usize::from(run.two_phase.theta.is_positive());
    }
    Ok(format!("{} instances, {nonzero} with theta > 0", suite.len()))
}

fn criterion_5(suite: &[SuiteRun]) -> Check {
    let tol = Rational::new(1, 1_000_000);
    let mut worst = Rational::zero();
    for (i, run) in suite.iter().enumerate() {
        let sol = if run.k == 1 { run.two_phase.clone() } else { solve(&run.net, 1, ObjectiveMode::TwoPhase)? };
        let lambda = k1_bisection_oracle(&run.net, &tol);
        let gap = (&(&sol.fstar - &sol.theta) - &lambda).abs();
        ensure(gap <= tol, || format!("instance {i}: F*-theta = {}, lambda = {lambda}", &sol.fstar - &sol.theta))?;
        worst = worst.max(gap);
    }
    Ok(format!("{} instances, largest gap {worst}", suite.len()))
}

fn criterion_6(suite: &[SuiteRun]) -> Check {
    for (i, run) in suite.iter().enumerate() {
        let combined = solve(&run.net, run.k, ObjectiveMode::Combined)?;
        ensure(combined.theta == run.two_phase.theta, || {
            format!("instance {i}: combined theta {} vs two-phase {}", combined.theta, run.two_phase.theta)
        })?;
        let fstar = max_flow(&run.net, None, &ArcSet::new()).value;
        ensure(combined.flow.value() == &fstar, || {
            format!("instance {i}: combined flow value {} vs F* {fstar}", combined.flow.value())
        })?;
        combined.flow.validate(&run.net).map_err(|e| format!("instance {i}: {e}"))?;
    }
    Ok(format!("{} instances agree", suite.len()))
}

fn criterion_7(suite: &[SuiteRun]) -> Check {
    let mut r = rng(SUITE_SEED ^ 7);
    let mut alternatives = 0;
    for (i, run) in suite.iter().enumerate() {
        let net = &run.net;
        let m = net.arc_count();

        // Monotone in k, and zero once k reaches the minimum cut cardinality.
        let cut = min_cut_cardinality(net);
        let mut thetas = Vec::new();
        for k in (1..=m.min(3)).filter(|&k| choose(m, k) <= 400) {
            let theta = if k == run.k { run.two_phase.theta.clone() } else { solve(net, k, ObjectiveMode::TwoPhase)?.theta };
            if k >= cut {
                ensure(theta.is_zero(), || format!("instance {i}: min cut {cut} <= k={k} but theta {theta}"))?;
            }
            thetas.push(theta);
        }
        ensure(thetas.windows(2).all(|w| w[1] <= w[0]), || format!("instance {i}: theta by k {thetas:?}"))?;

        // Residual bounds on the LP flow for random k-subsets.
        let phi = &run.two_phase.flow;
        let mut ids: Vec<ArcId> = net.real_arcs().map(|(a, _)| a).collect();
        for _ in 0..5 {
            ids.shuffle(&mut r);
            let set: ArcSet = ids[..run.k].iter().copied().collect();
            let res = residual_value(net, phi, &set).map_err(|e| e.to_string())?;
            let removed: Rational = set.iter().map(|&a| phi.get(a).clone()).sum();
            ensure((phi.value() - &removed) <= res && &res <= phi.value() && !res.is_negative(), || {
                format!("instance {i}: residual {res} outside bounds for {set:?}")
            })?;
        }

        // Dominance over alternative maximum flows.
        for _ in 0..20 {
            ids.shuffle(&mut r);
            let psi = max_flow_with_order(net, None, &ArcSet::new(), &ids);
            let rep = worst_case(net, &psi.flow, run.k).map_err(|e| e.to_string())?;
            ensure(rep.residual <= run.two_phase.theta, || {
                format!("instance {i}: alternative flow keeps {} > theta {}", rep.residual, run.two_phase.theta)
            })?;
            alternatives += 1;
        }
    }
    Ok(format!("{} instances, {alternatives} alternative flows", suite.len()))
}

fn criterion_8() -> Check {
    let mut r = rng(SUITE_SEED ^ 8);
    let mut net = random_network(&mut r, 8, 16, 10);
    while max_flow(&net, None, &ArcSet::new()).value.is_zero() || min_cut_cardinality(&net) <= 3 {
        let n = r.random_range(6..=8);
        net = random_network(&mut r, n, 16, 10);
    }
    let start = Instant::now();
    let sol = solve(&net, 3, ObjectiveMode::TwoPhase)?;
    let elapsed = start.elapsed();
    ensure(sol.certified, || "m=16, k=3 not certified".into())?;
    ensure(sol.variables == 18 + 560 * 14, || format!("{} variables", sol.variables))?;
    ensure(elapsed < Duration::from_secs(60), || format!("m=16, k=3 took {elapsed:?}"))?;

    // m = 20, k = 4 needs 4845 * 17 scenario variables.
    let big = random_network(&mut r, 8, 20, 10);
    let err = solve_kamrfp(&big, 4, &SolveOptions::default()).err();
    ensure(matches!(err, Some(Error::Budget(ref msg)) if msg.contains("--max-vars")), || format!("guardrail gave {err:?}"))?;
    let dir = std::env::temp_dir().join(format!("kamrfp-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let file = dir.join("m20.dimacs");
    std::fs::write(&file, big.to_dimacs()).map_err(|e| e.to_string())?;
    let (code, doc) = cli(&["solve", "-k", "4", file.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).ok();
    ensure(code == 3, || format!("CLI exit {code} for oversize model: {doc}"))?;
    Ok(format!("m=16 k=3 theta {} certified in {elapsed:.2?}; m=20 k=4 rejected", sol.theta))
}

fn main() {
    let mut failures = 0;
    let mut report = |n: usize, result: Check| match result {
        Ok(detail) => println!("criterion {n}: PASS ({detail})"),
        Err(why) => {
            failures += 1;
            println!("criterion {n}: FAIL ({why})");
        }
    };
    report(1, criterion_1());
    report(2, criterion_2());
    report(3, criterion_3());
    match run_suite() {
        Ok(suite) => {
            report(4, criterion_4(&suite));
            report(5, criterion_5(&suite));
            report(6, criterion_6(&suite));
            report(7, criterion_7(&suite));
        }
        Err(e) => {
            for n in 4..=7 {
                report(n, Err(format!("random suite failed to solve: {e}")));
            }
        }
    }
    report(8, criterion_8());
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
