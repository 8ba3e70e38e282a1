//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line
//! each and exits nonzero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use lsa_cli::report::{strip_wall_ms, Summary};
use lsa_core::auxiliary::{aux_bound_unaries, build_auxiliary, lsa_aux_solve, AuxParams, BoundVariant};
use lsa_core::baselines::{brute_force_min, lsa_tr_l_solve, parallel_icm_solve, truncation_solve};
use lsa_core::problems::{build_deconvolution_energy, random_energy, synthesize_deconv_instance, Shape};
use lsa_core::trust_region::{
    build_approximation, build_lagrangian, lsa_tr_solve, taylor_linearize, taylor_linearize_sup,
};
use lsa_core::{hamming, minimize_submodular, Labeling, Pair, TrustRegionParams};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Seeded labeling independent of the energy generator.
fn random_labeling(n: usize, seed: u64) -> Labeling {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03;
    Labeling::from_bools(
        (0..n)
            .map(|_| {
                // xorshift64*
                state ^= state >> 12;
                state ^= state << 25;
                state ^= state >> 27;
                state.wrapping_mul(0x2545_F491_4F6C_DD1D) >> 63 == 1
            })
            .collect(),
    )
}

fn all_labelings(n: usize) -> impl Iterator<Item = Labeling> {
    (0..1u64 << n).map(move |code| Labeling::from_code(code, n))
}

/// 1. minimize_submodular equals brute force on ≥1000 submodular instances.
fn submodular_exactness() -> Outcome {
    let count = 1200;
    for seed in 0..count {
        let n = 1 + (seed as usize % 14);
        let e = random_energy(n, 0.5, 0.0, 1.0, seed).unwrap();
        let (_, exact) = minimize_submodular(&e).unwrap();
        let (_, oracle) = brute_force_min(&e).unwrap();
        let rel = (exact - oracle).abs() / oracle.abs().max(1.0);
        ensure(rel <= 1e-9, || format!("seed {seed} n={n}: flow {exact} vs brute {oracle}"))?;
    }
    Ok(format!("{count} instances, n ≤ 14, relative error ≤ 1e-9"))
}

/// 2. Auxiliary function bounds E everywhere and touches it at s_t.
fn auxiliary_bound_validity() -> Outcome {
    let count = 240;
    for seed in 0..count {
        let n = 1 + (seed as usize % 12);
        let e = random_energy(n, 0.6, 0.5, 1.0, 10_000 + seed).unwrap();
        let dec = e.decompose();
        let s_t = random_labeling(n, seed);
        let variants = [
            BoundVariant::Standard,
            BoundVariant::Permutation { seed, redraw: true },
            BoundVariant::Permutation { seed: seed + 1, redraw: false },
        ];
        for variant in variants {
            for iteration in [0, 3] {
                let aux = build_auxiliary(&dec, &aux_bound_unaries(&dec, &s_t, variant, iteration).unwrap()).unwrap();
                ensure(aux.is_submodular(), || format!("seed {seed}: A_t not submodular"))?;
                let touch = (aux.eval(&s_t).unwrap() - e.eval(&s_t).unwrap()).abs();
                ensure(touch <= 1e-12, || format!("seed {seed} {variant:?}: |A_t(s_t) - E(s_t)| = {touch:e}"))?;
                for s in all_labelings(n) {
                    let (a, v) = (aux.eval(&s).unwrap(), e.eval(&s).unwrap());
                    ensure(a >= v - 1e-12, || format!("seed {seed} {variant:?}: A_t {a} < E {v} at {s:?}"))?;
                }
            }
        }
    }
    Ok(format!("{count} instances, n ≤ 12, both variants, exhaustive"))
}

/// 3. Each Taylor plane meets w·xy at exactly three of four configurations.
fn taylor_three_of_four() -> Outcome {
    for w in [1.0, 0.37, 5.0, 0.0] {
        for state in 0..4u64 {
            let s_t = Labeling::from_code(state, 2);
            let (u, c) = taylor_linearize(&[Pair::new(0, 1, w)], &s_t).unwrap();
            let matches = all_labelings(2)
                .filter(|s| u[0] * s.value(0) + u[1] * s.value(1) + c == w * s.value(0) * s.value(1))
                .count();
            let expected = if w == 0.0 { 4 } else { 3 };
            ensure(matches == expected, || format!("w={w} state {s_t:?}: {matches} matches"))?;
        }
    }
    Ok("4 states × 4 configurations, w ∈ {1, 0.37, 5, 0}".into())
}

/// 4. Descent properties on mixed instances up to n = 200.
fn monotone_descent() -> Outcome {
    let count = 220;
    let params = TrustRegionParams::default();
    for seed in 0..count {
        let n = 5 + (seed as usize * 37) % 196;
        let density = (8.0 / n as f64).min(0.5);
        let e = random_energy(n, density, 0.4, 1.0, 20_000 + seed).unwrap();
        let init = Labeling::ones(n);
        let e0 = e.eval(&init).unwrap();

        let tr = lsa_tr_solve(&e, &params, &init).unwrap();
        let accepted: Vec<f64> = tr.accepted_energies().collect();
        ensure(accepted.windows(2).all(|w| w[1] < w[0]), || {
            format!("seed {seed}: LSA-TR accepted energies not strictly decreasing")
        })?;
        ensure(accepted.first().is_none_or(|&first| first < e0), || {
            format!("seed {seed}: first accepted step did not decrease")
        })?;
        ensure(tr.energy <= e0, || format!("seed {seed}: LSA-TR final {} > initial {e0}", tr.energy))?;

        for variant in [BoundVariant::Standard, BoundVariant::Permutation { seed, redraw: true }] {
            let aux = lsa_aux_solve(&e, variant, &init, &AuxParams::default()).unwrap();
            let mut prev = e0;
            for r in &aux.records {
                ensure(r.energy <= prev, || format!("seed {seed} {variant:?}: energy rose {prev} -> {}", r.energy))?;
                prev = r.energy;
            }
            ensure(aux.energy <= e0, || format!("seed {seed}: LSA-AUX final above initial"))?;
        }
    }
    Ok(format!("{count} instances, n ∈ [5, 200]"))
}

/// 5. LSA-TR never beats the optimum and usually finds it when few pairs
///    are supermodular.
fn oracle_gap() -> Outcome {
    let fractions = [0.1, 0.2, 0.3, 0.6];
    let count = 240;
    let (mut low_total, mut low_hits) = (0, 0);
    for seed in 0..count {
        let n = 4 + (seed as usize % 9);
        let sup_fraction = fractions[seed as usize % fractions.len()];
        let e = random_energy(n, 0.5, sup_fraction, 1.0, 30_000 + seed).unwrap();
        let (_, optimum) = brute_force_min(&e).unwrap();
        let tr = lsa_tr_solve(&e, &TrustRegionParams::default(), &Labeling::ones(n)).unwrap();
        ensure(tr.energy >= optimum - 1e-12 * optimum.abs().max(1.0), || {
            format!("seed {seed}: LSA-TR {} below optimum {optimum}", tr.energy)
        })?;
        if sup_fraction <= 0.3 {
            low_total += 1;
            if (tr.energy - optimum).abs() <= 1e-9 * optimum.abs().max(1.0) {
                low_hits += 1;
            }
        }
    }
    ensure(2 * low_hits > low_total, || format!("optimum reached on only {low_hits}/{low_total}"))?;
    Ok(format!("{count} instances never below optimum; exact on {low_hits}/{low_total} with sup_fraction ≤ 0.3"))
}

/// 6. Scaled-down deconvolution benchmark ordering.
fn deconvolution_ordering() -> Outcome {
    let (w, h, sigma) = (32, 32, 0.05);
    let params = TrustRegionParams::default();
    let seeds = 0..10u64;
    let mut sums = [0.0f64; 4]; // tr, aux, truncation, icm
    let mut violations = [0usize; 3];
    for seed in seeds.clone() {
        let (img, _) = synthesize_deconv_instance(w, h, Shape::centered_disk(w, h), sigma, seed).unwrap();
        let e = build_deconvolution_energy(&img).unwrap();
        let init = Labeling::ones(e.num_vars());
        let tr = lsa_tr_solve(&e, &params, &init).unwrap();
        let tr_l = lsa_tr_l_solve(&e, &params, &init).unwrap();
        ensure(tr == tr_l, || format!("seed {seed}: LSA-TR-L trace differs from LSA-TR"))?;
        let aux = lsa_aux_solve(&e, BoundVariant::Standard, &init, &AuxParams::default()).unwrap();
        let trunc = truncation_solve(&e).unwrap();
        let icm = parallel_icm_solve(&e, &init, 1000).unwrap();
        let values = [tr.energy, aux.energy, trunc.energy, icm.energy];
        for (s, v) in sums.iter_mut().zip(values) {
            *s += v;
        }
        violations[0] += (values[0] > values[1]) as usize;
        violations[1] += (values[1] > values[2]) as usize;
        violations[2] += (values[0] > values[3]) as usize;
    }
    let n = seeds.count() as f64;
    let [tr, aux, trunc, icm] = sums.map(|s| s / n);
    let summary = format!(
        "means: LSA-TR {tr:.4}, LSA-AUX {aux:.4}, truncation {trunc:.4}, ICM {icm:.4}; violations {violations:?}"
    );
    ensure(tr <= aux && aux <= trunc && tr <= icm, || format!("ordering fails on means; {summary}"))?;
    ensure(violations.iter().all(|&v| v <= 2), || format!("too many per-seed violations; {summary}"))?;
    Ok(summary)
}

/// 7. L_t(S) = E_t(S) + λ·hamming(S, s_t) exhaustively.
fn lagrangian_identity() -> Outcome {
    let count = 60;
    for seed in 0..count {
        let n = 1 + (seed as usize % 10);
        let e = random_energy(n, 0.5, 0.5, 1.0, 40_000 + seed).unwrap();
        let dec = e.decompose();
        let s_t = random_labeling(n, seed + 7);
        let (u, c) = taylor_linearize_sup(&dec, &s_t).unwrap();
        let model = build_approximation(&dec, &u, c).unwrap();
        // the model must also agree with E at s_t
        ensure((model.eval(&s_t).unwrap() - e.eval(&s_t).unwrap()).abs() <= 1e-12, || {
            format!("seed {seed}: E_t(s_t) != E(s_t)")
        })?;
        for lambda in [0.0, 1.0, 100.0] {
            let lag = build_lagrangian(&dec, &u, c, &s_t, lambda).unwrap();
            ensure(lag.is_submodular(), || format!("seed {seed}: L_t not submodular"))?;
            for s in all_labelings(n) {
                let direct = model.eval(&s).unwrap() + lambda * hamming(&s, &s_t).unwrap() as f64;
                let diff = (lag.eval(&s).unwrap() - direct).abs();
                ensure(diff <= 1e-12, || format!("seed {seed} λ={lambda}: |L_t - (E_t + λ·d)| = {diff:e}"))?;
            }
        }
    }
    Ok(format!("{count} instances, n ≤ 10, λ ∈ {{0, 1, 100}}"))
}

/// 8. Two identical `lsa solve` runs give byte-identical non-time outputs.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let energy_path = dir.path().join("instance.bpbe");
    let e = random_energy(40, 0.2, 0.4, 1.0, 77).unwrap();
    std::fs::write(&energy_path, lsa_cli::format::format_energy(&e)).map_err(|e| e.to_string())?;

    let run = |method: &str, tag: &str| -> Result<(Vec<u8>, String, String), String> {
        let out = |name: &str| dir.path().join(format!("{tag}.{name}"));
        let status = Command::new(env!("CARGO_BIN_EXE_lsa"))
            .args(["solve", "--method", method, "--seed", "11", "--width", "8"])
            .arg("--energy")
            .arg(&energy_path)
            .arg("--labeling-out")
            .arg(out("pgm"))
            .arg("--trace-out")
            .arg(out("csv"))
            .arg("--summary-out")
            .arg(out("txt"))
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || format!("{method}: {}", String::from_utf8_lossy(&status.stderr)))?;
        let read = |p: &Path| std::fs::read(p).map_err(|e| e.to_string());
        let summary = String::from_utf8(read(&out("txt"))?).unwrap();
        let summary: String =
            summary.lines().filter(|l| !l.starts_with("wall_ms=")).map(|l| format!("{l}\n")).collect();
        let trace = strip_wall_ms(&String::from_utf8(read(&out("csv"))?).unwrap());
        Ok((read(&out("pgm"))?, trace, summary))
    };

    for method in ["lsa-tr", "lsa-tr-l", "lsa-aux", "lsa-aux-p", "icm", "ipfp", "truncate"] {
        let a = run(method, &format!("{method}-a"))?;
        let b = run(method, &format!("{method}-b"))?;
        ensure(a == b, || format!("{method}: outputs differ between runs"))?;
        let energy = Summary::parse(&a.2).get("energy").map(str::to_owned);
        ensure(energy.is_some(), || format!("{method}: summary lacks energy"))?;
    }
    Ok("7 methods × 2 runs: labeling, trace (minus wall_ms) and summary identical".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 submodular exactness", submodular_exactness),
        ("2 auxiliary bound validity", auxiliary_bound_validity),
        ("3 Taylor 3-of-4 geometry", taylor_three_of_four),
        ("4 monotone descent", monotone_descent),
        ("5 oracle gap at small scale", oracle_gap),
        ("6 deconvolution benchmark ordering", deconvolution_ordering),
        ("7 Lagrangian identity", lagrangian_identity),
        ("8 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.2}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.2}s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
