//! Acceptance suite: one PASS/FAIL line per criterion, each with its own
//! runtime budget. Runs without a test harness so the lines stay readable.

use std::panic::AssertUnwindSafe;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestCaseError, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use vidtriage_core::buzzword::{sample_lexicons, MatchMode};
use vidtriage_core::config::{modules, signals};
use vidtriage_core::decision::score;
use vidtriage_core::eval::{
    compare_deepfake_backends, compute_metrics, report, run_ablation, run_eval, Dataset,
};
use vidtriage_core::fixtures::{self, deepfake_script, synthetic_bench};
use vidtriage_core::inference::mock::MockServer;
use vidtriage_core::inference::{BackendClient, BackendEndpoint};
use vidtriage_core::pipeline::Pipeline;
use vidtriage_core::record::{AnalysisRecord, ModuleStatus};
use vidtriage_core::store::Store;
use vidtriage_core::{
    BuzzwordHit, CharSpan, ClaimCheckResult, Label, ModalitySignals, PipelineConfig, SemanticClass,
    Stance, TextSource,
};

type Outcome = Result<String, String>;

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn block_on<F: std::future::Future<Output = Outcome>>(f: F) -> Outcome {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?
        .block_on(f)
}

// Metric identity

/// Stated decimals of a value written like "0.64" or "0.992".
fn decimals(stated: &str) -> i32 {
    stated.split('.').nth(1).map_or(0, |d| d.len() as i32)
}

fn round_to(x: f64, places: i32) -> f64 {
    let k = 10f64.powi(places);
    (x * k).round() / k
}

/// Smallest (tp, fp, fn) whose precision and recall round to the stated
/// values at the stated number of decimals.
fn counts_for(p: &str, r: &str) -> Option<(u64, u64, u64)> {
    let (pv, rv): (f64, f64) = (p.parse().ok()?, r.parse().ok()?);
    let (pd, rd) = (decimals(p), decimals(r));
    for tp in 1..100_000u64 {
        let fp = (tp as f64 * (1.0 - pv) / pv).round() as u64;
        let fn_ = (tp as f64 * (1.0 - rv) / rv).round() as u64;
        let prec = tp as f64 / (tp + fp) as f64;
        let rec = tp as f64 / (tp + fn_) as f64;
        if round_to(prec, pd) == pv && round_to(rec, rd) == rv {
            return Some((tp, fp, fn_));
        }
    }
    None
}

fn metric_identity() -> Outcome {
    // (P, R, F1) as published.
    let rows = [
        ("0.64", "0.85", 0.73),
        ("0.95", "0.92", 0.93),
        ("0.82", "0.58", 0.68),
        ("0.72", "0.90", 0.80),
        ("0.992", "0.573", 0.727),
    ];
    let mut got = Vec::new();
    for (p, r, want) in rows {
        let (tp, fp, fn_) = counts_for(p, r).ok_or(format!("no counts for ({p},{r})"))?;
        let tn = 50;
        let mut golds = Vec::new();
        let mut preds = Vec::new();
        for (g, pr, n) in [(true, true, tp), (false, true, fp), (true, false, fn_), (false, false, tn)] {
            for _ in 0..n {
                golds.push(Label::from_bool(g));
                preds.push(Label::from_bool(pr));
            }
        }
        let m = compute_metrics(&golds, &preds).map_err(|e| e.to_string())?;
        let f1 = m.checkworthy.f1;
        ensure(
            (f1 - want).abs() <= 0.005,
            format!("({p},{r}) gave F1 {f1:.4}, expected {want} ± 0.005"),
        )?;
        got.push(format!("{f1:.3}"));
    }
    Ok(format!("F1 = {}", got.join(", ")))
}

// Worked example

fn worked_example() -> Outcome {
    let store = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |output: &str| {
        Command::new(env!("CARGO_BIN_EXE_vidtriage"))
            .arg("analyze")
            .arg(fixtures_dir().join("beirut.y4m"))
            .arg("--fixture-mode")
            .arg("--fixtures")
            .arg(fixtures_dir())
            .arg("--store")
            .arg(store.path())
            .args(["--output", output])
            .output()
    };
    let out = run("json").map_err(|e| e.to_string())?;
    ensure(out.status.success(), String::from_utf8_lossy(&out.stderr))?;
    let r: AnalysisRecord = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let s = &r.signals;
    ensure(
        s.overlay_text.as_deref() == Some("Someone captured the | missile in the Beirut blast"),
        format!("overlay_text {:?}", s.overlay_text),
    )?;
    // The table glosses the Arabic speech as "It's a shame"; the record keeps
    // the transcription itself.
    ensure(s.transcript.as_deref() == Some("يا حرام"), format!("transcript {:?}", s.transcript))?;
    ensure(s.transcript_lang.as_deref() == Some("ar"), "transcript language is not ar")?;
    ensure(
        s.video_summary.as_deref()
            == Some(
                "The video captures footage of the 2020 Beirut blast, showing destruction and chaos \
                 in an urban area, with explosions visible throughout.",
            ),
        format!("video_summary {:?}", s.video_summary),
    )?;
    ensure(!s.buzzword_detected(), "buzzword detected")?;
    ensure(s.transcript_verdict == SemanticClass::Hostile, "transcript verdict")?;
    ensure(s.summary_verdict == SemanticClass::ContentiousIssue, "summary verdict")?;
    ensure(s.overlay_verdict == SemanticClass::Hostile, "overlay verdict")?;
    ensure(r.result.label == Label::Checkworthy, "label")?;

    let text = run("text").map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&text.stdout);
    ensure(text.contains("summary_verdict    contentious_issue"), "text table")?;
    Ok(format!("label {} with score {}", r.result.label, r.result.score))
}

// Decision engine properties

fn class() -> impl Strategy<Value = SemanticClass> {
    prop::sample::select(SemanticClass::ALL.to_vec())
}

fn stance() -> impl Strategy<Value = Stance> {
    prop::sample::select(vec![Stance::Supported, Stance::Refuted, Stance::Disputed, Stance::NoEvidence])
}

fn hit(n: usize) -> BuzzwordHit {
    BuzzwordHit {
        term: format!("term{n}"),
        surface: format!("term{n}"),
        source: TextSource::Transcript,
        span: CharSpan::new(0, 5),
    }
}

fn claim(stance: Stance) -> ClaimCheckResult {
    ClaimCheckResult {
        claim_text: "a claim".into(),
        stance,
        evidence_refs: vec!["https://example.org/e".into()],
        confidence: 0.5,
        warning: None,
    }
}

fn signal_vector() -> impl Strategy<Value = ModalitySignals> {
    (
        (class(), class(), class()),
        0usize..3,
        prop::collection::vec(stance(), 0..4),
        prop::option::of(0.0f64..=1.0),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|((tv, sv, ov), hits, claims, deepfake, ad, weapon)| ModalitySignals {
            transcript_verdict: tv,
            summary_verdict: sv,
            overlay_verdict: ov,
            buzzword_hits: (0..hits).map(hit).collect(),
            claim_results: claims.into_iter().map(claim).collect(),
            deepfake_score: deepfake,
            is_advertisement: ad,
            weapon_detected: weapon,
            ..ModalitySignals::default()
        })
}

/// Random module toggles, non-negative weights (a contradicted claim never
/// weighs less than an uncontradicted one), threshold and trigger.
fn config() -> impl Strategy<Value = PipelineConfig> {
    (
        prop::collection::vec(any::<bool>(), modules::ALL.len()),
        prop::collection::vec(0.0f64..4.0, signals::TABLE.len()),
        0.5f64..6.0,
        0.0f64..=1.0,
    )
        .prop_map(|(enabled, weights, threshold, trigger)| {
            let mut c = PipelineConfig::default();
            for (m, on) in modules::ALL.iter().zip(enabled) {
                c.set_enabled(m, on);
            }
            for ((signal, _, _), w) in signals::TABLE.iter().zip(weights) {
                c.weights.insert(signal.to_string(), w);
            }
            let present = c.weight(signals::CLAIM_PRESENT);
            let refuted = c.weights.get_mut(signals::CLAIM_REFUTED).unwrap();
            *refuted += present;
            c.threshold = threshold;
            c.deepfake_trigger = trigger;
            c
        })
}

/// `s` with one more signal switched on.
fn add_signal(s: &ModalitySignals, which: usize) -> ModalitySignals {
    let mut t = s.clone();
    match which {
        0 => t.transcript_verdict = SemanticClass::Hostile,
        1 => t.summary_verdict = SemanticClass::Political,
        2 => t.overlay_verdict = SemanticClass::ContentiousIssue,
        3 => t.buzzword_hits.push(hit(9)),
        4 => t.claim_results.push(claim(Stance::Refuted)),
        5 => t.deepfake_score = Some(1.0),
        _ => t.weapon_detected = true,
    }
    t
}

fn decision_properties() -> Outcome {
    const CASES: u32 = 10_000;
    let mut runner = TestRunner::new(PropConfig { cases: CASES, failure_persistence: None, ..PropConfig::default() });
    let seen = std::cell::Cell::new(0u32);
    runner
        .run(&(signal_vector(), config(), 0usize..7), |(s, c, which)| {
            seen.set(seen.get() + 1);
            let r = score(&s, &c);

            // Conservation: the ledger adds up to the score.
            prop_assert_eq!(r.ledger_total(), r.score);
            r.check().map_err(TestCaseError::fail)?;

            // Ad override dominates everything else.
            if s.is_advertisement && c.is_enabled(modules::AD_FILTER) {
                prop_assert!(r.ad_override);
                prop_assert_eq!(r.label, Label::NotCheckworthy);
            }

            // Monotonicity: one more signal never lowers the score or flips a
            // Checkworthy label.
            let more = score(&add_signal(&s, which), &c);
            prop_assert!(more.score >= r.score, "{} < {}", more.score, r.score);
            if r.label == Label::Checkworthy {
                prop_assert_eq!(more.label, Label::Checkworthy);
            }

            // Determinism: same input, same output, same bytes.
            let again = score(&s.clone(), &c.clone());
            prop_assert_eq!(&again, &r);
            prop_assert_eq!(serde_json::to_string(&again).unwrap(), serde_json::to_string(&r).unwrap());
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    ensure(seen.get() >= CASES, format!("only {} cases ran", seen.get()))?;
    Ok(format!("{} generated signal vectors", seen.get()))
}

// Ablation mechanics

fn ablation_mechanics() -> Outcome {
    let config = PipelineConfig::default();
    let ds = Dataset::load(&fixtures_dir().join("synth20.recs")).map_err(|e| e.to_string())?;
    ensure(ds.records.len() == 20, "synth20 does not hold 20 records")?;
    let table = run_ablation(&ds, &config, &[]).map_err(|e| e.to_string())?;
    let eval = run_eval(&ds, &config).map_err(|e| e.to_string())?;
    ensure(table.baseline_report == eval, "baseline row differs from run_eval")?;
    let weapon = table.rows.iter().find(|r| r.module == modules::WEAPON).ok_or("no weapon row")?;
    let d = weapon.delta;
    ensure(
        [d.precision, d.recall, d.accuracy, d.f1, d.cw_precision, d.cw_recall].iter().all(|x| *x == 0.0),
        format!("weapon row is not all zeros: {d:?}"),
    )?;

    let sep = Dataset::load(&fixtures_dir().join("datasets/buzzword-separator.jsonl")).map_err(|e| e.to_string())?;
    let table = run_ablation(&sep, &config, &[modules::BUZZWORD.to_string()]).map_err(|e| e.to_string())?;
    let delta = table.rows[0].delta.cw_recall;
    ensure(delta == -1.0, format!("buzzword removal gave dR(CW) = {delta}"))?;
    Ok(format!("baseline = run_eval, weapon row zero, buzzword dR(CW) = {delta:.1}"))
}

// Metrics against a brute-force recount

struct Recount {
    p: [f64; 2],
    r: [f64; 2],
    f1: [f64; 2],
    support: [u64; 2],
    accuracy: f64,
}

fn recount(golds: &[bool], preds: &[bool]) -> Recount {
    let safe = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let mut out = Recount { p: [0.0; 2], r: [0.0; 2], f1: [0.0; 2], support: [0; 2], accuracy: 0.0 };
    for (k, class) in [true, false].into_iter().enumerate() {
        let mut hit = 0;
        let mut predicted = 0;
        let mut actual = 0;
        for i in 0..golds.len() {
            if preds[i] == class {
                predicted += 1;
            }
            if golds[i] == class {
                actual += 1;
                if preds[i] == class {
                    hit += 1;
                }
            }
        }
        out.p[k] = safe(hit, predicted);
        out.r[k] = safe(hit, actual);
        out.f1[k] = if out.p[k] + out.r[k] == 0.0 { 0.0 } else { 2.0 * out.p[k] * out.r[k] / (out.p[k] + out.r[k]) };
        out.support[k] = actual;
    }
    let agree = golds.iter().zip(preds).filter(|(g, p)| g == p).count() as u64;
    out.accuracy = safe(agree, golds.len() as u64);
    out
}

fn metrics_oracle() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for case in 0..1000 {
        let n = rng.random_range(1..=500usize);
        let bias = rng.random_range(0.0..1.0);
        let golds: Vec<bool> = (0..n).map(|_| rng.random_bool(bias)).collect();
        let preds: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let m = compute_metrics(
            &golds.iter().copied().map(Label::from_bool).collect::<Vec<_>>(),
            &preds.iter().copied().map(Label::from_bool).collect::<Vec<_>>(),
        )
        .map_err(|e| e.to_string())?;
        let o = recount(&golds, &preds);
        let n_f = n as f64;
        let pairs = [
            ("cw precision", m.checkworthy.precision, o.p[0]),
            ("cw recall", m.checkworthy.recall, o.r[0]),
            ("cw f1", m.checkworthy.f1, o.f1[0]),
            ("ncw precision", m.not_checkworthy.precision, o.p[1]),
            ("ncw recall", m.not_checkworthy.recall, o.r[1]),
            ("ncw f1", m.not_checkworthy.f1, o.f1[1]),
            ("macro precision", m.macro_avg.precision, (o.p[0] + o.p[1]) / 2.0),
            ("macro recall", m.macro_avg.recall, (o.r[0] + o.r[1]) / 2.0),
            ("macro f1", m.macro_avg.f1, (o.f1[0] + o.f1[1]) / 2.0),
            (
                "weighted f1",
                m.weighted_f1,
                (o.f1[0] * o.support[0] as f64 + o.f1[1] * o.support[1] as f64) / n_f,
            ),
            ("accuracy", m.accuracy, o.accuracy),
        ];
        for (what, got, want) in pairs {
            ensure(got == want, format!("case {case} (n={n}): {what} {got} != {want}"))?;
        }
        ensure(
            m.checkworthy.support == o.support[0] && m.not_checkworthy.support == o.support[1] && m.n == n as u64,
            format!("case {case}: support mismatch"),
        )?;
    }
    Ok("1000 random pairs, sizes 1-500, exact".into())
}

// Buzzword invariances

const FILLER: [&str; 8] = ["look", "at", "this", "video", "today", "og", "her", "news"];

fn respace(term: &str, gaps: &[String]) -> String {
    let mut out = String::new();
    for (i, word) in term.split(' ').enumerate() {
        if i > 0 {
            out.push_str(&gaps[(i - 1) % gaps.len()]);
        }
        out.push_str(word);
    }
    out
}

fn recase(s: &str, mask: &[bool]) -> String {
    s.chars()
        .enumerate()
        .map(|(i, c)| if mask[i % mask.len()] { c.to_uppercase().collect::<String>() } else { c.to_string() })
        .collect()
}

fn buzzword_invariances() -> Outcome {
    let lex = sample_lexicons();
    let literal: Vec<String> = lex
        .entries()
        .filter(|e| e.mode != MatchMode::RegexLite)
        .map(|e| e.term.clone())
        .collect();
    let mut runner = TestRunner::new(PropConfig { cases: 2_000, failure_persistence: None, ..PropConfig::default() });
    let gap = prop::sample::select(vec![" ", "  ", "\t", " \n ", "\u{a0}"]).prop_map(String::from);
    let strategy = (
        prop::sample::select(literal),
        prop::collection::vec(any::<bool>(), 1..8),
        prop::collection::vec(gap, 1..3),
        prop::collection::vec(prop::sample::select(FILLER.to_vec()), 0..4),
        prop::collection::vec(prop::sample::select(FILLER.to_vec()), 0..4),
        prop::sample::select(vec!["x", "9", "ab"]),
    );
    runner
        .run(&strategy, |(term, mask, gaps, before, after, glue)| {
            let variant = recase(&respace(&term, &gaps), &mask);
            let text = [before.join(" "), variant.clone(), after.join(" ")].join(" ");
            let hits = lex.detect(&text, TextSource::Transcript);
            prop_assert!(hits.iter().any(|h| h.term == term), "{:?} not found in {:?}", term, text);
            for h in &hits {
                prop_assert_eq!(h.span.slice(&text), Some(h.surface.as_str()));
            }
            // Glued to a word character on either side it is a different word.
            for glued in [format!("{glue}{variant}"), format!("{variant}{glue}")] {
                let text = [before.join(" "), glued, after.join(" ")].join(" ");
                let hits = lex.detect(&text, TextSource::Transcript);
                prop_assert!(!hits.iter().any(|h| h.term == term), "{:?} matched inside {:?}", term, text);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;

    let slogan = "Gutter, husk å STEM  FRP i høst!";
    let hits = lex.detect(slogan, TextSource::Overlay);
    ensure(hits.len() == 1 && hits[0].term == "stem frp", format!("slogan hits {hits:?}"))?;
    ensure(hits[0].surface == "STEM  FRP", format!("surface {:?}", hits[0].surface))?;
    Ok(format!("2000 generated corpora; \"Stem FRP\" found as {:?}", hits[0].surface))
}

// Caching

fn caching() -> Outcome {
    block_on(async {
        let server = MockServer::replay(fixtures_dir().join("recordings")).await.map_err(|e| e.to_string())?;
        let mut config = PipelineConfig::default();
        server.point_config(&mut config);
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let store = Store::open(dir.path()).map_err(|e| e.to_string())?;
        let pipeline = Pipeline::new(config, Some(store)).map_err(|e| e.to_string())?;
        let clip = fixtures_dir().join("beirut.y4m").display().to_string();
        let first = pipeline.analyze(&clip).await.map_err(|e| e.to_string())?;
        let calls = server.total_calls();
        ensure(calls > 0 && !first.cached, "first run made no backend calls")?;
        let second = pipeline.analyze(&clip).await.map_err(|e| e.to_string())?;
        ensure(server.total_calls() == calls, format!("second run made {} calls", server.total_calls() - calls))?;
        ensure(second.cached && second.bytes == first.bytes, "second record is not byte-identical")?;
        Ok(format!("{calls} calls then 0; {} identical bytes", second.bytes.len()))
    })
}

// Degradation

fn degradation() -> Outcome {
    block_on(async {
        let server = MockServer::scripted(fixtures::beirut_script()).await.map_err(|e| e.to_string())?;
        server.set_down("transcription", true);
        let mut config = PipelineConfig::default();
        server.point_config(&mut config);
        let pipeline = Pipeline::new(config, None).map_err(|e| e.to_string())?;
        let clip = fixtures_dir().join("beirut.y4m").display().to_string();
        let a = pipeline.analyze(&clip).await.map_err(|e| format!("analysis aborted: {e}"))?;
        let r = &a.record;
        ensure(r.status("transcript") == Some(ModuleStatus::Failed), "transcript status is not failed")?;
        ensure(r.signals.transcript.is_none(), "transcript present")?;
        ensure(r.result.score == 2.0 && r.result.label == Label::Checkworthy, format!("score {}", r.result.score))?;
        r.result.check()?;
        Ok(format!("transcript failed; label {} from score {}", r.result.label, r.result.score))
    })
}

// Deepfake comparison

fn deepfake_harness() -> Outcome {
    // 218 fakes then 24 real items: TP 125, FN 93, FP 1, TN 23, the smallest
    // confusion whose A/P/R/F1 round to the published best row.
    const FAKES: u32 = 218;
    let bench = synthetic_bench("scripted", FAKES, 24);
    block_on(async move {
        let server = MockServer::scripted(deepfake_script(|backend, id| match backend {
            "df_good" => Some(if id < 125 || id == FAKES { 0.95 } else { 0.05 }),
            "df_never" => Some(0.01),
            _ => None,
        }))
        .await
        .map_err(|e| e.to_string())?;
        let clients: Vec<BackendClient> = ["df_good", "df_never"]
            .iter()
            .map(|n| BackendClient::new(BackendEndpoint::new(n, &server.url(n)).unwrap()))
            .collect();
        let rows = compare_deepfake_backends(&bench, &clients, 0.5, 16).await.map_err(|e| e.to_string())?;
        let text = report::deepfake_text(&rows);
        let line = |name: &str| text.lines().find(|l| l.starts_with(name)).map(str::to_string);
        let good = line("df_good").ok_or("no df_good row")?;
        let never = line("df_never").ok_or("no df_never row")?;
        let cols = |l: &str| l.split_whitespace().skip(1).map(String::from).collect::<Vec<_>>();
        ensure(cols(&good) == ["0.612", "0.992", "0.573", "0.727"], format!("df_good row: {good}"))?;
        let never_cols = cols(&never);
        ensure(never_cols[2] == "0.000" && never_cols[3] == "0.000", format!("df_never row: {never}"))?;
        Ok(format!("[{}] [{}]", good.trim(), never.trim()))
    })
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let criteria = [
        Criterion { name: "metric identity", budget: Duration::from_secs(1), run: metric_identity },
        Criterion { name: "worked example fixture", budget: Duration::from_secs(5), run: worked_example },
        Criterion { name: "decision properties", budget: Duration::from_secs(30), run: decision_properties },
        Criterion { name: "ablation mechanics", budget: Duration::from_secs(10), run: ablation_mechanics },
        Criterion { name: "metrics oracle", budget: Duration::from_secs(10), run: metrics_oracle },
        Criterion { name: "buzzword invariances", budget: Duration::from_secs(5), run: buzzword_invariances },
        Criterion { name: "caching", budget: Duration::from_secs(5), run: caching },
        Criterion { name: "degradation", budget: Duration::from_secs(5), run: degradation },
        Criterion { name: "deepfake harness", budget: Duration::from_secs(5), run: deepfake_harness },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.iter().any(|f| c.name.contains(f.as_str()))) {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(AssertUnwindSafe(c.run))
            .unwrap_or_else(|p| Err(p.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(_) if took > c.budget => Err(format!("over budget ({:.2} s > {} s)", took.as_secs_f64(), c.budget.as_secs())),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(e) => ("FAIL", e.as_str()),
        };
        if outcome.is_err() {
            failed += 1;
        }
        println!("{tag}  {:<24} {:>6.2} s / {:>2} s  {detail}", c.name, took.as_secs_f64(), c.budget.as_secs());
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
