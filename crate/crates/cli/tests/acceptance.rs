//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test -p streamhp-cli --test acceptance`.

use std::collections::HashMap;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::Rng;
use serde_json::Value;
use streamhp::ingest::{column_net, seeded_rng, stream_order, synthetic_pattern, StreamFile, SyntheticSpec};
use streamhp::partitioners::{run, Algorithm, PartitionerConfig, RunOptions};
use streamhp::refine::{
    run_refined, BufferCapacity, FlushRecord, MoveEvent, RefineConfig, RefineObserver, RefineStrategy,
};
use streamhp::sketch::{bf_fpp, BloomFilter};
use streamhp::{connectivity_cutsize, Hypergraph, NetConnectivity, PartitionState, UNASSIGNED};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        match $cond {
            true => {}
            false => return Err(format!($($arg)*)),
        }
    };
}

/// The three desk-scale fixtures: 10^4 vertices, about 10^5 pins each.
fn fixtures() -> Vec<(String, Hypergraph)> {
    [(11u64, 2.3f64, 32usize), (12, 2.5, 64), (13, 3.0, 128)]
        .into_iter()
        .map(|(seed, exponent, clusters)| {
            let spec = SyntheticSpec {
                vertices: 10_000,
                nets: 10_000,
                mean_degree: 10.0,
                clusters,
                exponent,
                seed,
                ..Default::default()
            };
            let hg = column_net(&synthetic_pattern(&spec).unwrap());
            (format!("syn{seed}(a={exponent},c={clusters})"), hg)
        })
        .collect()
}

fn config(alg: Algorithm, k: u32, seed: u64) -> PartitionerConfig {
    let mut c = PartitionerConfig::new(alg, k);
    c.seed = seed;
    c
}

fn prefix_cut(stream: &StreamFile, len: usize, parts: &[u32], cache: &mut Option<(usize, Hypergraph)>) -> u64 {
    if cache.as_ref().map(|c| c.0) != Some(len) {
        *cache = Some((len, stream.prefix_hypergraph(len).unwrap()));
    }
    let hg = &cache.as_ref().unwrap().1;
    let mut parts = parts.to_vec();
    parts.resize(hg.num_vertices(), UNASSIGNED);
    connectivity_cutsize(hg, &parts).unwrap()
}

/// Recomputes the cut from scratch after every move and at every flush.
struct Oracle<'a> {
    stream: &'a StreamFile,
    per_move: bool,
    cache: Option<(usize, Hypergraph)>,
    moves: u64,
    flushes: u64,
    errors: Vec<String>,
}

impl<'a> Oracle<'a> {
    fn new(stream: &'a StreamFile, per_move: bool) -> Self {
        Oracle {
            stream,
            per_move,
            cache: None,
            moves: 0,
            flushes: 0,
            errors: Vec::new(),
        }
    }
}

impl RefineObserver for Oracle<'_> {
    fn on_move(&mut self, ev: &MoveEvent, state: &PartitionState, conn: &NetConnectivity) -> streamhp::Result<()> {
        self.moves += 1;
        if !self.per_move {
            return Ok(());
        }
        let len = ev.stream_position as usize;
        let mut parts = state.part_vector().to_vec();
        let cut = prefix_cut(self.stream, len, &parts, &mut self.cache);
        if cut != conn.cut() {
            self.errors.push(format!("tracked {} vs oracle {cut} after move", conn.cut()));
        }
        parts[ev.vertex as usize] = ev.from;
        let before = prefix_cut(self.stream, len, &parts, &mut self.cache);
        if cut > before {
            self.errors.push(format!("cut rose {before} -> {cut} moving vertex {}", ev.vertex));
        }
        Ok(())
    }

    fn on_flush(&mut self, rec: &FlushRecord, state: &PartitionState, conn: &NetConnectivity) -> streamhp::Result<()> {
        self.flushes += 1;
        let cut = prefix_cut(self.stream, rec.stream_position as usize, state.part_vector(), &mut self.cache);
        if cut != conn.cut() || cut != rec.cut_after {
            self.errors.push(format!(
                "flush at {}: tracked {} record {} oracle {cut}",
                rec.stream_position,
                conn.cut(),
                rec.cut_after
            ));
        }
        if rec.cut_after > rec.cut_before {
            self.errors.push(format!("flush raised cut {} -> {}", rec.cut_before, rec.cut_after));
        }
        Ok(())
    }
}

/// Flush-level oracle checks accumulated across every refinement run here.
#[derive(Default)]
struct FlushTally {
    flushes: u64,
    errors: Vec<String>,
}

fn equivalence(fx: &[(String, Hypergraph)]) -> Outcome {
    let mut n = 0;
    for (name, hg) in fx {
        let s = stream_order(hg, 1);
        for k in [16, 256] {
            let a = run(&config(Algorithm::MinMax, k, 0), &s, &RunOptions::default()).unwrap();
            let b = run(&config(Algorithm::MinMaxN2p, k, 0), &s, &RunOptions::default()).unwrap();
            ensure!(a.parts == b.parts, "{name} K={k}: part vectors differ");
            n += 1;
        }
    }
    Ok(format!("{n} fixture/K pairs identical ({} pins on first)", fx[0].1.num_pins()))
}

fn speed() -> Outcome {
    let spec = SyntheticSpec {
        vertices: 100_000,
        nets: 100_000,
        mean_degree: 10.0,
        clusters: 256,
        seed: 21,
        ..Default::default()
    };
    let hg = column_net(&synthetic_pattern(&spec).unwrap());
    let s = stream_order(&hg, 2);
    let slow = run(&config(Algorithm::MinMax, 2048, 0), &s, &RunOptions::default()).unwrap();
    let fast = (0..3)
        .map(|_| run(&config(Algorithm::MinMaxN2p, 2048, 0), &s, &RunOptions::default()).unwrap())
        .min_by(|a, b| a.stats.elapsed_seconds.total_cmp(&b.stats.elapsed_seconds))
        .unwrap();
    ensure!(slow.parts == fast.parts, "outputs differ");
    let ratio = slow.stats.elapsed_seconds / fast.stats.elapsed_seconds;
    let msg = format!(
        "{} pins, K=2048: minmax {:.2}s, minmax-n2p {:.3}s, ratio {ratio:.1} (need >= 10)",
        hg.num_pins(),
        slow.stats.elapsed_seconds,
        fast.stats.elapsed_seconds
    );
    ensure!(ratio >= 10.0, "{msg}");
    Ok(msg)
}

fn entry_identity(fx: &[(String, Hypergraph)]) -> Outcome {
    let mut checked = 0;
    for (name, hg) in fx {
        for k in [16, 256] {
            let s = stream_order(hg, 3);
            let out = run(&config(Algorithm::MinMaxN2p, k, 0), &s, &RunOptions { checkpoints: 25, audit: false }).unwrap();
            ensure!(out.stats.checkpoints.len() >= 20, "{name}: only {} checkpoints", out.stats.checkpoints.len());
            for cp in &out.stats.checkpoints {
                ensure!(
                    cp.entries == cp.cut + cp.nets_seen,
                    "{name} K={k} at {}: entries {} != cut {} + seen {}",
                    cp.vertices,
                    cp.entries,
                    cp.cut,
                    cp.nets_seen
                );
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} checkpoints hold entries = cut + nets seen"))
}

fn balance(fx: &[(String, Hypergraph)], tally: &mut FlushTally) -> Outcome {
    let mut runs = 0;
    let audit = RunOptions { checkpoints: 0, audit: true };
    for (name, hg) in fx {
        let s = stream_order(hg, 4);
        for k in [16, 256] {
            for alg in Algorithm::ALL {
                run(&config(alg, k, 7), &s, &audit).map_err(|e| format!("{name} {alg} K={k}: {e}"))?;
                runs += 1;
            }
            for strat in RefineStrategy::ALL {
                let mut obs = Oracle::new(&s, false);
                run_refined(&config(Algorithm::MinMaxN2p, k, 0), &RefineConfig::new(strat), &s, &audit, Some(&mut obs))
                    .map_err(|e| format!("{name} {strat} K={k}: {e}"))?;
                tally.flushes += obs.flushes;
                tally.errors.extend(obs.errors);
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} audited runs, bound held after every assignment and move"))
}

fn quality(fx: &[(String, Hypergraph)]) -> Outcome {
    let k = 256;
    let mut lines = Vec::new();
    for (name, hg) in fx {
        let mut l_wins = 0;
        for seed in 0..5u64 {
            let s = stream_order(hg, 100 + seed);
            let cut = |alg, ell| {
                let mut c = config(alg, k, seed);
                c.ell = ell;
                run(&c, &s, &RunOptions::default()).unwrap().stats.cut
            };
            let (n2p, random) = (cut(Algorithm::MinMaxN2p, 5), cut(Algorithm::Random, 5));
            let (l5, l3) = (cut(Algorithm::MinMaxL, 5), cut(Algorithm::MinMaxL, 3));
            ensure!(n2p < random, "{name} seed {seed}: n2p {n2p} >= random {random}");
            if l5 <= l3 {
                l_wins += 1;
            }
            if seed == 0 {
                lines.push(format!("{name}: n2p {n2p} l5 {l5} l3 {l3} random {random}"));
            }
        }
        ensure!(l_wins >= 3, "{name}: L5 <= L3 on only {l_wins}/5 seeds");
    }
    Ok(format!("K={k}; {}", lines.join("; ")))
}

fn bloom() -> Outcome {
    let (n, hashes, m) = (10_000u64, 4u32, 105_000u64);
    let predicted = bf_fpp(hashes, n, m);
    let mut bf = BloomFilter::new(m, hashes).unwrap();
    let mut rng = seeded_rng(61);
    for _ in 0..n {
        bf.insert(rng.random::<u64>() & !1);
    }
    let probes = 100_000;
    let hits = (0..probes).filter(|_| bf.query(rng.random::<u64>() | 1)).count();
    let empirical = hits as f64 / probes as f64;
    let ratio = empirical / predicted;
    ensure!(
        (0.5..=2.0).contains(&ratio),
        "empirical {empirical:.5} vs predicted {predicted:.5} (ratio {ratio:.2})"
    );

    let mut big = BloomFilter::new(1 << 21, 4).unwrap();
    let mut misses = 0;
    for _ in 0..100_000 {
        let key = rng.random::<u64>();
        big.insert(key);
        if !big.query(key) {
            misses += 1;
        }
    }
    ensure!(misses == 0, "{misses} false negatives");
    Ok(format!(
        "fpp empirical {empirical:.5} predicted {predicted:.5} (ratio {ratio:.2}); 0 false negatives in 1e5"
    ))
}

fn monotonicity(tally: &mut FlushTally) -> Outcome {
    let mut moves = 0;
    for (i, exponent) in [2.3, 3.0].into_iter().enumerate() {
        let spec = SyntheticSpec {
            vertices: 1500,
            nets: 1200,
            mean_degree: 6.0,
            clusters: 16,
            exponent,
            seed: 30 + i as u64,
            ..Default::default()
        };
        let hg = column_net(&synthetic_pattern(&spec).unwrap());
        let s = stream_order(&hg, 9);
        for k in [8, 64] {
            for strat in RefineStrategy::ALL {
                for passes in [2, 4, 8] {
                    let mut rc = RefineConfig::new(strat);
                    rc.passes = passes;
                    let mut obs = Oracle::new(&s, true);
                    run_refined(
                        &config(Algorithm::MinMaxN2p, k, 0),
                        &rc,
                        &s,
                        &RunOptions { checkpoints: 0, audit: true },
                        Some(&mut obs),
                    )
                    .map_err(|e| e.to_string())?;
                    ensure!(obs.errors.is_empty(), "{strat} passes={passes} K={k}: {}", obs.errors[0]);
                    ensure!(obs.flushes > 0, "{strat} passes={passes}: no flush happened");
                    moves += obs.moves;
                    tally.flushes += obs.flushes;
                }
            }
        }
    }
    Ok(format!("{moves} oracle-checked moves, none raised the cut"))
}

fn benefit(fx: &[(String, Hypergraph)], tally: &mut FlushTally) -> Outcome {
    let mut lines = Vec::new();
    for (name, hg) in fx {
        for k in [16, 256] {
            let mut wins = 0;
            let mut ratio = 0.0;
            for seed in 0..5u64 {
                let s = stream_order(hg, 200 + seed);
                let c = config(Algorithm::MinMaxN2p, k, seed);
                let plain = run(&c, &s, &RunOptions::default()).unwrap().stats.cut;
                let mut obs = Oracle::new(&s, false);
                let rc = RefineConfig {
                    passes: 4,
                    capacity: BufferCapacity::Fraction(0.15),
                    ..RefineConfig::new(RefineStrategy::RefRlx)
                };
                let refined = run_refined(&c, &rc, &s, &RunOptions { checkpoints: 0, audit: true }, Some(&mut obs))
                    .map_err(|e| e.to_string())?
                    .stats
                    .cut;
                tally.flushes += obs.flushes;
                tally.errors.extend(obs.errors);
                if refined <= plain {
                    wins += 1;
                }
                ratio += refined as f64 / plain.max(1) as f64 / 5.0;
            }
            ensure!(wins >= 3, "{name} K={k}: ref-rlx <= n2p on only {wins}/5 seeds");
            lines.push(format!("{name} K={k} {wins}/5 mean ratio {ratio:.3}"));
        }
    }
    Ok(lines.join("; "))
}

fn degeneration(fx: &[(String, Hypergraph)]) -> Outcome {
    let mut n = 0;
    for (name, hg) in fx {
        let s = stream_order(hg, 5);
        for k in [16, 256] {
            let base = run(&config(Algorithm::MinMaxN2p, k, 0), &s, &RunOptions::default()).unwrap();
            for ell in [k as usize, k as usize + 7] {
                let mut c = config(Algorithm::MinMaxL, k, 3);
                c.ell = ell;
                let l = run(&c, &s, &RunOptions::default()).unwrap();
                ensure!(l.parts == base.parts, "{name} K={k} ell={ell} differs from n2p");
                n += 1;
            }
            for strat in RefineStrategy::ALL {
                for cap in [BufferCapacity::Fraction(1e-9), BufferCapacity::Pins(0)] {
                    let rc = RefineConfig {
                        capacity: cap,
                        ..RefineConfig::new(strat)
                    };
                    let r = run_refined(&config(Algorithm::MinMaxN2p, k, 0), &rc, &s, &RunOptions::default(), None)
                        .unwrap();
                    ensure!(r.parts == base.parts, "{name} K={k} {strat} {cap:?} differs from n2p");
                    n += 1;
                }
            }
        }
    }
    Ok(format!("{n} degenerate configurations reproduce minmax-n2p"))
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.retain(|k, _| !k.contains("seconds"));
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn strip_csv_timing(text: &str) -> String {
    text.lines()
        .map(|l| l.split(',').take(7).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("\n")
}

fn cli(args: &[&str], dir: &Path) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_streamhp"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "streamhp {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr));
    Ok(())
}

fn determinism() -> Outcome {
    let mut files: Vec<HashMap<String, String>> = Vec::new();
    for _ in 0..2 {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        let d = tmp.path();
        cli(&["generate", "-o", "m.mtx", "--vertices", "3000", "--nets", "3000", "--seed", "5"], d)?;
        cli(&["convert", "m.mtx", "-o", "s.shps", "--seed", "8"], d)?;
        let mut jobs: Vec<(String, Vec<&str>)> = Algorithm::ALL
            .iter()
            .map(|a| (a.name().to_string(), vec!["--alg", a.name()]))
            .collect();
        for r in ["ref", "ref-rlx", "ref-rlx-sv"] {
            jobs.push((r.to_string(), vec!["--refine", r]));
        }
        for (tag, extra) in &jobs {
            let (p, st) = (format!("{tag}.parts"), format!("{tag}.json"));
            let mut args = vec!["partition", "s.shps", "-k", "32", "--seed", "3", "--checkpoints", "4", "-o", &p, "--stats", &st];
            args.extend(extra.iter().copied());
            let tr = format!("{tag}.jsonl");
            if tag.starts_with("ref") {
                args.extend(["--trace", tr.as_str()]);
            }
            cli(&args, d)?;
        }
        cli(&["evaluate", "s.shps", "minmax-n2p.parts", "-k", "32", "-o", "eval.json"], d)?;
        fs::write(
            d.join("bench.toml"),
            "[[run]]\nstream = \"s.shps\"\nalgorithm = \"minmax-l\"\nparts = 32\nell = 3\nseeds = [0, 1]\n\
             [[run]]\nmatrix = \"m.mtx\"\nalgorithm = \"minmax-mh\"\nparts = 32\nseeds = [0, 1]\n",
        )
        .map_err(|e| e.to_string())?;
        cli(&["bench", "bench.toml", "-o", "bench.csv"], d)?;

        let mut snapshot = HashMap::new();
        for entry in fs::read_dir(d).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            let name = path.file_name().unwrap().to_string_lossy().to_string();
            let bytes = fs::read(&path).map_err(|e| e.to_string())?;
            let content = if name.ends_with(".json") {
                let mut v: Value = serde_json::from_slice(&bytes).map_err(|e| e.to_string())?;
                strip_timing(&mut v);
                v.to_string()
            } else if name.ends_with(".csv") {
                strip_csv_timing(&String::from_utf8_lossy(&bytes))
            } else {
                format!("{:?}", bytes)
            };
            snapshot.insert(name, content);
        }
        files.push(snapshot);
    }
    ensure!(files[0].len() == files[1].len(), "different file sets");
    for (name, content) in &files[0] {
        ensure!(files[1].get(name) == Some(content), "{name} differs between runs");
    }
    Ok(format!("{} output files byte-identical across two runs (timing fields excluded)", files[0].len()))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let fx = fixtures();
    let mut tally = FlushTally::default();
    let mut failed = 0;
    let mut report = |id: u32, name: &str, f: &mut dyn FnMut(&mut FlushTally) -> Outcome, tally: &mut FlushTally| {
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(|| f(tally))).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("PASS {id:>2} {name} [{secs:.1}s]: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id:>2} {name} [{secs:.1}s]: {msg}");
            }
        }
    };
    report(1, "minmax/n2p equivalence", &mut |_| equivalence(&fx), &mut tally);
    report(2, "n2p speed separation", &mut |_| speed(), &mut tally);
    report(3, "entry identity", &mut |_| entry_identity(&fx), &mut tally);
    report(4, "balance law", &mut |t| balance(&fx, t), &mut tally);
    report(5, "quality ordering", &mut |_| quality(&fx), &mut tally);
    report(6, "bloom filter analytics", &mut |_| bloom(), &mut tally);
    report(7, "refinement monotonicity", &mut |t| monotonicity(t), &mut tally);
    report(8, "refinement benefit", &mut |t| benefit(&fx, t), &mut tally);
    report(9, "degeneration", &mut |_| degeneration(&fx), &mut tally);
    report(10, "cli determinism", &mut |_| determinism(), &mut tally);
    report(
        11,
        "oracle agreement at flushes",
        &mut |t| {
            ensure!(t.errors.is_empty(), "{}", t.errors[0]);
            ensure!(t.flushes > 0, "no flushes were checked");
            Ok(format!("{} flushes matched the from-scratch cut", t.flushes))
        },
        &mut tally,
    );
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        11 - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
