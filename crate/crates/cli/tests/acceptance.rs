//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_center::general::logtower_stack;
use robust_center::halfplus::{halfplus_constant, refine_from, refine_iteration_bound};
use robust_center::lp::median_distance_bound;
use robust_center::opnorm::{Enumeration, MedianReport};
use robust_center::verify::DEFAULT_ATTEMPT_CAP;
use robust_center::{
    ball_cover, below_half_cover, brute_force_best, centroid_refine, cluster_halfplus, cluster_logtower,
    generate_planted, las_vegas_baseline, lp_coordinate_median, median_counterexample_report, metric_cover,
    metric_halfplus, verify_ball, BucketSize, Center, CoverResult, LpNorm, LpSpace, MatrixOracle, MetricGeometry,
    NormedGeometry, NormedSpace, PlantMode, PlantSpec, PlantedInstance, SignMatrixEnsemble, SpaceModel,
    WeightedPointSet,
};
use robust_center_cli::args::{BenchArgs, BenchSolver};
use robust_center_cli::bench::run_bench;
use robust_center_cli::{run, Cli};
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn planted_q(inst: &PlantedInstance) -> &[f64] {
    match &inst.center {
        Center::Point(x) => x,
        Center::Index(_) => unreachable!("coordinate instance"),
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn lp_bound() -> Check {
    let start = Instant::now();
    let (alpha, r) = (0.75, 1.0);
    let l2 = LpNorm::euclidean();
    let bound = median_distance_bound(alpha, 2.0) * r;
    ensure((bound - 3f64.sqrt()).abs() < 1e-15, || format!("bound {bound} is not sqrt 3"))?;
    let mut worst = 0.0f64;
    for seed in 0..200 {
        let inst = generate_planted(&PlantSpec::new(SpaceModel::Lp, 10_000, 16, alpha, r, seed)).map_err(err)?;
        let ps = inst.point_set().map_err(err)?;
        let x = lp_coordinate_median(&ps, &LpSpace { norm: l2, dim: 16 }, alpha).map_err(err)?;
        let d = l2.distance(&x, planted_q(&inst));
        worst = worst.max(d);
        ensure(d <= bound + 1e-9, || format!("seed {seed}: distance {d} > {bound}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs <= 10.0, || format!("took {secs:.2} s"))?;
    Ok(format!("200 instances, max distance {worst:.4} <= {bound:.4}, {secs:.2} s"))
}

fn halfplus_exact() -> Check {
    let l2 = LpNorm::euclidean();
    let alphas = [0.6, 0.75, 0.9];
    for i in 0..100u64 {
        let alpha = alphas[i as usize % 3];
        let r = 0.5 + (i % 7) as f64;
        let spec = PlantSpec::new(SpaceModel::Normed, 1500, 8, alpha, r, 1000 + i).weighted(i % 2 == 1);
        let inst = generate_planted(&spec).map_err(err)?;
        let ps = inst.point_set().map_err(err)?;
        let ball = cluster_halfplus(&ps, &l2, alpha, r).map_err(err)?;
        let c = 4.0 * alpha / (2.0 * alpha - 1.0);
        ensure(ball.radius == c * r, || format!("instance {i}: radius {} != {}", ball.radius, c * r))?;
        let v = verify_ball(&NormedGeometry::new(&ps, &l2), &ball, alpha).map_err(err)?;
        ensure(v.ok, || format!("instance {i}: covers only {}", v.covered_weight))?;
    }
    Ok("100 instances, radius exactly C r, all verified".into())
}

fn contraction() -> Check {
    let l2 = LpNorm::euclidean();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut steps_checked, mut singles) = (0usize, 0usize);
    for i in 0..60u64 {
        let alpha = [0.6, 0.75, 0.9][i as usize % 3];
        let eps = alpha - 0.5;
        let d = 6;
        let inst = generate_planted(&PlantSpec::new(SpaceModel::Normed, 800, d, alpha, 1.0, 2000 + i)).map_err(err)?;
        let ps = inst.point_set().map_err(err)?;
        let q = planted_q(&inst);
        let random_start = |rng: &mut ChaCha8Rng, k: f64| -> Vec<f64> {
            let u: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let len = l2.norm(&u);
            let t = rng.gen_range(0.0..=1.0) * (k - 1.0);
            q.iter().zip(&u).map(|(a, b)| a + t * b / len).collect()
        };

        // single steps from containment at several K >= 2 + 1/eps
        let k_min = 2.0 + 1.0 / eps;
        for k in [k_min, 1.5 * k_min, 3.0 * k_min] {
            let a = random_start(&mut rng, k);
            let c = centroid_refine(&ps, &l2, &a, k, 1.0, alpha).map_err(err)?;
            let dist = l2.distance(&c, q);
            let bound = k - k * eps - 1.0;
            ensure(dist <= bound + 1e-9, || format!("instance {i}, K {k}: {dist} > {bound}"))?;
            singles += 1;
        }

        // the full loop from the starting multiplier
        let k0 = 3.0 * halfplus_constant(alpha) + 4.0;
        let trace = refine_from(&ps, &l2, &random_start(&mut rng, k0), alpha, 1.0).map_err(err)?;
        let cap = refine_iteration_bound(alpha);
        let expected_cap = (5f64.ln() / (1.0 / (1.0 - eps)).ln()).ceil() as usize;
        ensure(cap == expected_cap, || format!("iteration bound {cap} != {expected_cap}"))?;
        ensure(trace.steps.len() <= cap, || format!("instance {i}: {} iterations > {cap}", trace.steps.len()))?;
        for (j, s) in trace.steps.iter().enumerate() {
            let dist = l2.distance(&s.center, q);
            let bound = s.k - s.k * eps - 1.0;
            ensure(dist <= bound + 1e-9, || format!("instance {i}, step {j}: {dist} > {bound}"))?;
            steps_checked += 1;
        }
    }
    Ok(format!("{singles} single steps and {steps_checked} loop steps contract; loop within bound"))
}

fn general_alpha() -> Check {
    let l2 = LpNorm::euclidean();
    let mut runs = 0;
    for alpha in [0.3, 0.4, 0.5] {
        for seed in 0..4u64 {
            let inst =
                generate_planted(&PlantSpec::new(SpaceModel::Normed, 800, 4, alpha, 1.0, 3000 + seed)).map_err(err)?;
            let ps = inst.point_set().map_err(err)?;
            let g = NormedGeometry::new(&ps, &l2);
            for k in [0, 1] {
                let found = cluster_logtower(&ps, &l2, alpha, k, 1.0).map_err(err)?;
                let t = found.ok_or_else(|| format!("alpha {alpha}, seed {seed}, k {k}: no ball"))?;
                let v = verify_ball(&g, &t.ball, alpha).map_err(err)?;
                ensure(v.ok && v.covered_weight >= alpha * ps.total_weight() * (1.0 - 1e-12), || {
                    format!("alpha {alpha}, seed {seed}, k {k}: covers {}", v.covered_weight)
                })?;
                ensure(t.ball.radius <= t.approx_constant * (1.0 + 1e-12), || {
                    format!("alpha {alpha}, k {k}: radius {} above {}", t.ball.radius, t.approx_constant)
                })?;

                let stack = logtower_stack::<LpNorm>(k, BucketSize::PolyLog(2));
                let cover = ball_cover(&*stack, &l2, &ps, alpha, alpha, stack.constant(alpha), 1.0).map_err(err)?;
                let cap = (1.0 / alpha).floor() as usize;
                ensure(cover.balls.len() <= cap, || format!("cover of {} balls > {cap}", cover.balls.len()))?;
                runs += 1;
            }

            let gap = PlantSpec::new(SpaceModel::Normed, 600, 3, alpha, 1.0, 3100 + seed).mode(PlantMode::Gap);
            let gi = generate_planted(&gap).map_err(err)?;
            let gps = gi.point_set().map_err(err)?;
            let cover = below_half_cover(&gps, &l2, alpha, 1.0).map_err(err)?;
            let cap = CoverResult::max_len(alpha);
            ensure(cap == (1.0 / alpha).floor() as usize, || "max_len disagrees with floor(1/alpha)".into())?;
            ensure(cover.balls.len() <= cap, || format!("gap cover of {} balls > {cap}", cover.balls.len()))?;
        }
    }
    Ok(format!("{runs} logtower runs verified; every cover within floor(1/alpha)"))
}

/// Random weighted instance over random points; integer grids force distance ties.
fn random_metric(rng: &mut ChaCha8Rng) -> (WeightedPointSet<usize>, MatrixOracle) {
    let n = rng.gen_range(1..=256);
    let d = rng.gen_range(1..=4);
    let grid = rng.gen_bool(0.5);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| if grid { rng.gen_range(0..6) as f64 } else { rng.gen_range(-10.0..10.0) }).collect())
        .collect();
    let norm = LpNorm::new([1.0, 2.0, f64::INFINITY][rng.gen_range(0..3)]).expect("valid p");
    let weights: Vec<f64> = (0..n)
        .map(|_| match rng.gen_range(0..3) {
            0 => 1.0,
            1 => rng.gen_range(0..4) as f64,
            _ => rng.gen_range(0.0..2.0),
        })
        .collect();
    let mut weights = weights;
    if weights.iter().sum::<f64>() <= 0.0 {
        weights[0] = 1.0;
    }
    let o = MatrixOracle::from_points(&points, &norm).expect("finite points");
    (WeightedPointSet::indexed(weights).expect("valid weights"), o)
}

fn metric_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t in 0..500 {
        let (ps, o) = random_metric(&mut rng);
        let alpha = rng.gen_range(0.501..=1.0);
        let ours = metric_halfplus(&ps, &o, alpha, 1).map_err(err)?;
        let brute = brute_force_best(&MetricGeometry::new(&ps, &o), alpha).map_err(err)?;
        ensure(ours.center == brute.center && ours.radius == brute.radius, || {
            format!("instance {t}: {:?} r {} vs {:?} r {}", ours.center, ours.radius, brute.center, brute.radius)
        })?;
    }
    Ok("500 random instances, identical (index, radius)".into())
}

fn metric_approximation() -> Check {
    let mut covers = 0;
    for levels in 1..=3u32 {
        let bound = 2.0 * levels as f64;
        for seed in 0..8u64 {
            let r = 1.0 + seed as f64 * 0.25;
            let inst =
                generate_planted(&PlantSpec::new(SpaceModel::Metric, 300, 3, 0.75, r, 4000 + seed)).map_err(err)?;
            let (ps, o) = (inst.index_set().map_err(err)?, inst.matrix_oracle().map_err(err)?);
            let ball = metric_halfplus(&ps, &o, 0.75, levels).map_err(err)?;
            ensure(ball.radius <= bound * r + 1e-9, || format!("C {levels}: s {} > {}", ball.radius, bound * r))?;

            let spec = PlantSpec::new(SpaceModel::Metric, 300, 3, 0.4, r, 4100 + seed).mode(PlantMode::TwoClusters);
            let inst = generate_planted(&spec).map_err(err)?;
            let (ps, o) = (inst.index_set().map_err(err)?, inst.matrix_oracle().map_err(err)?);
            let cover = metric_cover(&ps, &o, inst.alpha, levels).map_err(err)?;
            for b in &cover.balls {
                ensure(b.radius <= bound * r + 1e-9, || format!("C {levels}: s {} > {}", b.radius, bound * r))?;
            }
            for c in inst.centers() {
                let qi = c.index().expect("metric centers are points");
                let hit = cover.balls.iter().any(|b| {
                    let pi = b.center.index().expect("metric centers are points");
                    o.entry(qi, pi) <= b.radius + r + 1e-9
                });
                ensure(hit, || format!("C {levels}, seed {seed}: planted center {qi} is far from every ball"))?;
            }
            covers += 1;
        }
    }
    Ok(format!("s <= 2C r for C = 1, 2, 3; {covers} two-cluster covers reach every planted center"))
}

fn query_scaling() -> Check {
    let start = Instant::now();
    let mut parts = Vec::new();
    let mut failures = Vec::new();
    for levels in 1..=3u32 {
        let args = BenchArgs {
            solver: BenchSolver::MetricHalfplus,
            levels,
            sizes: vec![64, 256, 1024, 4096],
            alpha: 0.75,
            d: 4,
            seed: 0,
            no_baseline: false,
            output: None,
        };
        let report = run_bench(&args).map_err(err)?;
        let target = 1.0 + 1.0 / levels as f64;
        parts.push(format!("C={levels} slope {:.3}", report.slope));
        if (report.slope - target).abs() > 0.15 {
            failures.push(format!("C {levels}: slope {:.3} outside {target:.3} +- 0.15", report.slope));
        }
        if !report.points.iter().all(|p| p.within_bound) {
            failures.push(format!("C {levels}: a radius exceeds 2C r"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs > 120.0 {
        failures.push(format!("bench took {secs:.1} s"));
    }
    ensure(failures.is_empty(), || failures.join("; "))?;
    Ok(format!("{}; {secs:.1} s", parts.join(", ")))
}

/// Largest singular value straight from an SVD.
fn svd_norm(m: &[f64], k: usize) -> f64 {
    nalgebra::DMatrix::from_row_slice(k, k, m).singular_values().max()
}

fn threshold(report: &MedianReport, c: f64) -> Result<f64, String> {
    report.thresholds.iter().find(|t| t.c == c).map(|t| t.fraction_within).ok_or_else(|| format!("no threshold {c}"))
}

fn counterexample() -> Check {
    let small = SignMatrixEnsemble::new(3, Enumeration::Exhaustive).map_err(err)?;
    let rep = median_counterexample_report(&small, 1e-9).map_err(err)?;
    ensure(rep.members == 511, || format!("{} members", rep.members))?;
    ensure(small.coordinate_median().iter().all(|&x| x == 1.0), || "k = 3 median is not all ones".into())?;
    ensure(rep.median_is_all_ones && rep.median_norm == 3.0, || format!("k = 3 median norm {}", rep.median_norm))?;

    let big = SignMatrixEnsemble::new(32, Enumeration::Sampled { count: 10_000, seed: 0 }).map_err(err)?;
    let rep = median_counterexample_report(&big, 1e-9).map_err(err)?;
    ensure(rep.median_is_all_ones && rep.median_norm == 32.0, || format!("k = 32 median norm {}", rep.median_norm))?;
    let within = threshold(&rep, 2.5)?;
    let bound = 2.5 * 32f64.sqrt();

    // recount the threshold on a slice of members with an independent SVD
    let members = big.members();
    let head = &members[..500];
    let svd_within = head.iter().filter(|m| svd_norm(m, 32) <= bound).count() as f64 / head.len() as f64;
    ensure(svd_within >= 0.9, || format!("SVD recount: only {svd_within} within bound"))?;
    ensure(within >= 0.9, || format!("only {within} of samples within {bound:.3}"))?;
    let ratio = rep.median_norm / bound;
    Ok(format!(
        "k=3: 511 members, median norm 3; k=32: median norm 32, {:.1}% <= {bound:.3} (SVD slice {:.1}%), ratio >= {ratio:.3}",
        within * 100.0,
        svd_within * 100.0
    ))
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("wall_time_ms");
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

fn run_json(args: &[&str]) -> Result<String, String> {
    let cli = Cli::try_parse_from(std::iter::once("robust-center").chain(args.iter().copied())).map_err(err)?;
    let out = run(cli).map_err(err)?;
    let mut v: Value = serde_json::from_str(&out.text).map_err(err)?;
    strip_timing(&mut v);
    serde_json::to_string(&v).map_err(err)
}

fn determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("robust-center-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(err)?;
    let path = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let (lp, metric, gap) = (path("lp.json"), path("metric.json"), path("gap.json"));
    for (file, args) in [
        (&lp, vec!["gen", "--n", "300", "--d", "3", "--alpha", "0.7", "--seed", "1", "--weighted"]),
        (&metric, vec!["gen", "--space", "metric", "--n", "120", "--alpha", "0.7", "--seed", "2"]),
        (&gap, vec!["gen", "--space", "normed", "--mode", "gap", "--n", "300", "--alpha", "0.3", "--seed", "3"]),
    ] {
        let cli = Cli::try_parse_from(std::iter::once("robust-center").chain(args)).map_err(err)?;
        std::fs::write(file, run(cli).map_err(err)?.text).map_err(err)?;
    }
    let cases: Vec<Vec<&str>> = vec![
        vec!["solve", "--input", &lp, "--alpha", "0.7"],
        vec!["solve", "--input", &lp, "--alpha", "0.7", "--r", "1"],
        vec!["solve", "--input", &lp, "--space", "normed", "--alpha", "0.7", "--r", "1"],
        vec!["solve", "--input", &lp, "--space", "normed", "--alpha", "0.7", "--radius-search"],
        vec!["solve", "--input", &gap, "--space", "normed", "--solver", "any-alpha", "--alpha", "0.3", "--r", "1"],
        vec!["solve", "--input", &gap, "--space", "normed", "--solver", "logtower", "--alpha", "0.3", "--r", "1"],
        vec!["solve", "--input", &metric, "--alpha", "0.7", "-C", "2"],
        vec!["solve", "--input", &metric, "--alpha", "0.7", "--solver", "brute-force"],
        vec!["cover", "--input", &gap, "--space", "normed", "--solver", "below-half", "--alpha", "0.3", "--r", "1"],
        vec!["cover", "--input", &gap, "--space", "normed", "--solver", "any-alpha", "--alpha", "0.3", "--r", "1"],
        vec!["cover", "--input", &metric, "--solver", "metric-cover", "--alpha", "0.3", "-C", "2"],
        vec!["cover", "--input", &metric, "--solver", "metric-quadratic", "--alpha", "0.3"],
        vec!["verify", "--input", &lp],
        vec!["bench", "--sizes", "32,64,128,256", "-C", "2"],
        vec!["opnorm-demo", "--k", "8", "--samples", "300", "--seed", "4"],
    ];
    for args in &cases {
        let (a, b) = (run_json(args)?, run_json(args)?);
        ensure(a == b, || format!("{args:?} differs between runs"))?;
    }
    std::fs::remove_dir_all(&dir).ok();

    let mut means = Vec::new();
    for alpha in [0.4, 0.75] {
        let inst = generate_planted(&PlantSpec::new(SpaceModel::Normed, 400, 3, alpha, 1.0, 77)).map_err(err)?;
        let ps = inst.point_set().map_err(err)?;
        let l2 = LpNorm::euclidean();
        let g = NormedGeometry::new(&ps, &l2);
        let mut total = 0usize;
        for seed in 0..1000 {
            let out = las_vegas_baseline(&g, alpha, 1.0, seed, DEFAULT_ATTEMPT_CAP).map_err(err)?;
            ensure(out.ball.is_some(), || format!("alpha {alpha}, seed {seed}: no ball"))?;
            total += out.attempts;
        }
        let mean = total as f64 / 1000.0;
        ensure((1.0..=2.0 / alpha).contains(&mean), || format!("alpha {alpha}: mean attempts {mean}"))?;
        means.push(format!("alpha {alpha}: {mean:.3}"));
    }
    Ok(format!("{} commands byte-identical; Las Vegas mean attempts {}", cases.len(), means.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("l_p coordinate median bound", lp_bound),
        ("normed alpha > 1/2 exact radius", halfplus_exact),
        ("centroid contraction", contraction),
        ("general alpha normed", general_alpha),
        ("metric oracle equivalence", metric_equivalence),
        ("metric approximation", metric_approximation),
        ("query scaling", query_scaling),
        ("operator-norm counterexample", counterexample),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = check();
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.2} s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
