//! Acceptance suite. Every criterion prints a single `PASS`/`FAIL` line and
//! asserts on its tolerance and wall-clock budget.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qudit_sim::clifford::{peg_reduce, CliffordGate, Generator};
use qudit_sim::compiler::{certify_stages, compile_two_qudit, layer_of, prime_fast_path, swap_generator, Pipeline};
use qudit_sim::decoupling::{apply_plan, chain_plan, compile_routed, generic_recursive_plan, DecouplingPlan, Planner};
use qudit_sim::linalg::DenseOperator;
use qudit_sim::majorization::traceless_decompose;
use qudit_sim::modular::{gcd, lemma_witness};
use qudit_sim::pauli::{
    all_labels, commutation_phase, compose_labels, full_pauli_twirl_identity_check, PauliLabel, SymbolicHamiltonian,
};
use qudit_sim::random::{
    random_chain, random_entangling, random_hamiltonian, random_hermitian_dense, random_traceless_hermitian,
    random_two_body,
};
use qudit_sim::sim::{effective_hamiltonian, lower, TrotterConfig};
use qudit_sim::verify::{execute_schedule, target_unitary, unitary_distance, Executor};

fn report(id: u32, title: &str, start: Instant, budget: Duration, outcome: Result<String, String>) {
    let elapsed = start.elapsed();
    let outcome = outcome.and_then(|detail| {
        if elapsed <= budget {
            Ok(detail)
        } else {
            Err(format!("{detail}; took {elapsed:.1?}, budget {budget:?}"))
        }
    });
    match &outcome {
        Ok(detail) => println!("PASS criterion {id:>2} {title}: {detail} ({elapsed:.2?})"),
        Err(detail) => println!("FAIL criterion {id:>2} {title}: {detail} ({elapsed:.2?})"),
    }
    assert!(outcome.is_ok(), "criterion {id} failed");
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn omega(e: f64, d: u32) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * e / d as f64)
}

/// Shift and clock matrices written out from their definitions.
fn oracle_x(d: u32) -> DenseOperator {
    let du = d as usize;
    DenseOperator::from_fn(du, |r, c| {
        if r == (c + 1) % du {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn oracle_z(d: u32) -> DenseOperator {
    DenseOperator::diagonal(&(0..d).map(|j| omega(j as f64, d)).collect::<Vec<_>>())
}

fn oracle_pow(m: &DenseOperator, e: u32) -> DenseOperator {
    (0..e).fold(DenseOperator::identity(m.dim()), |acc, _| acc.matmul(m))
}

fn oracle_label(j: u32, k: u32, d: u32) -> DenseOperator {
    oracle_pow(&oracle_x(d), j).matmul(&oracle_pow(&oracle_z(d), k))
}

/// `|tr(A† B)|/dim`, equal to 1 exactly when unitaries agree up to phase.
fn phase_overlap(a: &DenseOperator, b: &DenseOperator) -> f64 {
    a.adjoint().matmul(b).trace().norm() / a.dim() as f64
}

fn zz_target(d: u32) -> SymbolicHamiltonian {
    let z = PauliLabel { j: 0, k: 1 };
    let mut k = SymbolicHamiltonian::new(d, 2);
    k.add_term(vec![z, z], C64::new(0.5, 0.0));
    k.hermitian_part().scale(2.0)
}

#[test]
fn criterion_01_pauli_algebra() {
    let start = Instant::now();
    let run = || -> Result<String, String> {
        let mut worst = 0.0f64;
        let mut pairs = 0usize;
        for d in 2..=6u32 {
            let mats: Vec<(PauliLabel, DenseOperator)> =
                all_labels(d).map(|l| (l, oracle_label(l.j, l.k, d))).collect();
            for (p, mp) in &mats {
                for (q, mq) in &mats {
                    let pq = mp.matmul(mq);
                    let (r, ph) = compose_labels(*p, *q, d);
                    let want = oracle_label(r.j, r.k, d).scale(ph.to_complex());
                    worst = worst.max(pq.max_abs_diff(&want));
                    let qp = mq.matmul(mp).scale(commutation_phase(*p, *q, d).to_complex());
                    worst = worst.max(pq.max_abs_diff(&qp));
                    pairs += 1;
                }
                worst = worst.max(p.matrix(d).max_abs_diff(mp));
            }
        }
        ensure(worst < 1e-12, || format!("max residual {worst:.2e}"))?;
        Ok(format!("{pairs} label pairs, max residual {worst:.2e}"))
    };
    report(1, "Pauli algebra exactness", start, Duration::from_secs(10), run());
}

#[test]
fn criterion_02_twirl_identity() {
    let start = Instant::now();
    let run = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut worst = 0.0f64;
        let mut cases = 0;
        for (d, n) in (2..=6u32).map(|d| (d, 1usize)).chain([(2, 2), (3, 2)]) {
            for _ in 0..50 {
                let dim = (d as usize).pow(n as u32);
                let j = random_hermitian_dense(&mut rng, dim);
                let r = full_pauli_twirl_identity_check(&j, d, n).map_err(|e| e.to_string())?;
                worst = worst.max(r);
                cases += 1;
            }
        }
        ensure(worst < 1e-10, || format!("max residual {worst:.2e}"))?;
        Ok(format!("{cases} operators, max residual {worst:.2e}"))
    };
    report(2, "full twirl identity", start, Duration::from_secs(10), run());
}

#[test]
fn criterion_03_normalizer_gates() {
    let start = Instant::now();
    let run = || -> Result<String, String> {
        let mut worst = 0.0f64;
        for d in 2..=7u32 {
            let du = d as usize;
            let (x, z) = (oracle_x(d), oracle_z(d));
            let fourier = DenseOperator::from_fn(du, |r, c| omega((r * c) as f64, d) / (d as f64).sqrt());
            let phase = DenseOperator::diagonal(
                &(0..d)
                    .map(|j| {
                        let e = if d % 2 == 0 {
                            (j * j) as f64 / 2.0
                        } else {
                            (j * j.saturating_sub(1) / 2) as f64
                        };
                        omega(e, d)
                    })
                    .collect::<Vec<_>>(),
            );
            worst = worst.max(Generator::Fourier.matrix(d).max_abs_diff(&fourier));
            worst = worst.max(Generator::Phase.matrix(d).max_abs_diff(&phase));

            // Fourier: X → Z, Z → X^{-1}.
            worst = worst.max(fourier.conjugate(&x).max_abs_diff(&z));
            worst = worst.max(fourier.conjugate(&z).max_abs_diff(&oracle_pow(&x, d - 1)));
            // Phase: X → XZ, with an extra ω^{1/2} for even D; Z → Z.
            let half = if d % 2 == 0 { omega(0.5, d) } else { C64::new(1.0, 0.0) };
            worst = worst.max(phase.conjugate(&x).max_abs_diff(&x.matmul(&z).scale(half)));
            worst = worst.max(phase.conjugate(&z).max_abs_diff(&z));
            // Multiplier: X → X^a, Z → Z^{a^{-1}}.
            for a in (1..d).filter(|&a| gcd(a as i64, d as i64) == 1) {
                let inv = (1..d).find(|&b| (a * b) % d == 1).unwrap();
                let m = Generator::Multiplier(a).matrix(d);
                let perm = DenseOperator::from_fn(du, |r, c| {
                    if r == (a as usize * c) % du {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                worst = worst.max(m.max_abs_diff(&perm));
                worst = worst.max(perm.conjugate(&x).max_abs_diff(&oracle_pow(&x, a)));
                worst = worst.max(perm.conjugate(&z).max_abs_diff(&oracle_pow(&z, inv)));
            }
            // Symbolic action of every generator agrees with dense conjugation on every label.
            let mut gens = vec![
                Generator::Fourier,
                Generator::FourierInverse,
                Generator::Phase,
                Generator::PhaseInverse,
            ];
            gens.extend(
                (1..d)
                    .filter(|&a| gcd(a as i64, d as i64) == 1)
                    .map(Generator::Multiplier),
            );
            gens.push(Generator::Pauli(1, d - 1));
            for g in gens {
                let gate = CliffordGate::new(d, vec![g]).map_err(|e| e.to_string())?;
                let u = gate.matrix();
                for l in all_labels(d) {
                    let (img, ph) = gate.act_on_label(l);
                    let want = oracle_label(img.j, img.k, d).scale(ph.to_complex());
                    worst = worst.max(u.conjugate(&oracle_label(l.j, l.k, d)).max_abs_diff(&want));
                }
            }
        }
        let d2 = Generator::Phase.matrix(2).conjugate(&oracle_x(2));
        let ixz = oracle_x(2).matmul(&oracle_z(2)).scale(C64::new(0.0, 1.0));
        worst = worst.max(d2.max_abs_diff(&ixz));
        ensure(worst < 1e-12, || format!("max residual {worst:.2e}"))?;
        Ok(format!("D=2..7, max residual {worst:.2e}"))
    };
    report(3, "normalizer gates", start, Duration::from_secs(5), run());
}

fn peg_check(d: u32, j: u32, k: u32) -> Result<f64, String> {
    let (gate, g) = peg_reduce(d, j, k).map_err(|e| e.to_string())?;
    let expect = gcd(j as i64, k as i64) as u32;
    ensure(g == expect, || {
        format!("D={d} ({j},{k}) gave Z^{g}, expected Z^{expect}")
    })?;
    let (img, _) = gate.act_on_label(PauliLabel { j, k });
    ensure(img == PauliLabel { j: 0, k: g % d }, || {
        format!("D={d} ({j},{k}) symbolic image {img:?}")
    })?;
    let conj = gate.matrix().conjugate(&oracle_label(j, k, d));
    Ok((1.0 - phase_overlap(&conj, &oracle_label(0, g, d))).abs())
}

#[test]
fn criterion_04_peg_lemma() {
    let start = Instant::now();
    let run = || -> Result<String, String> {
        let mut worst = 0.0f64;
        let mut cases = 0;
        for d in 2..=10u32 {
            for (j, k) in (0..d)
                .flat_map(|j| (0..d).map(move |k| (j, k)))
                .filter(|&p| p != (0, 0))
            {
                worst = worst.max(peg_check(d, j, k)?);
                cases += 1;
            }
        }
        let big = peg_check(105, 104, 80)?;
        ensure(worst < 1e-9 && big < 1e-9, || {
            format!("overlap defect {worst:.2e}, D=105 {big:.2e}")
        })?;
        Ok(format!("{cases} labels, X^104 Z^80 -> Z^8 at D=105 (defect {big:.1e})"))
    };
    report(4, "PEG lemma", start, Duration::from_secs(30), run());
}

#[test]
fn criterion_05_number_lemma() {
    let start = Instant::now();
    let run = || -> Result<String, String> {
        let mut cases = 0usize;
        for d in 2..=12i64 {
            for (l, m) in (0..d)
                .flat_map(|l| (0..d).map(move |m| (l, m)))
                .filter(|&(l, m)| gcd(l, m) == 1)
            {
                for (j, k) in (0..d).flat_map(|j| (0..d).map(move |k| (j, k))) {
                    let congruent = (j * m - k * l).rem_euclid(d) == 0;
                    let brute = (0..d).find(|n| (n * l - j).rem_euclid(d) == 0 && (n * m - k).rem_euclid(d) == 0);
                    let w = lemma_witness(j, k, l, m, d).ok();
                    ensure(congruent == w.is_some() && congruent == brute.is_some(), || {
                        format!("D={d} (j,k)=({j},{k}) (l,m)=({l},{m}): congruence {congruent}, witness {w:?}")
                    })?;
                    if let Some(n) = w {
                        ensure((n * l - j).rem_euclid(d) == 0 && (n * m - k).rem_euclid(d) == 0, || {
                            format!("D={d} witness {n} fails for ({j},{k}) ({l},{m})")
                        })?;
                    }
                    cases += 1;
                }
            }
        }
        let mut worst = 0.0f64;
        let mut dense = 0usize;
        for d in 2..=8u32 {
            for (l, m) in (0..d)
                .flat_map(|l| (0..d).map(move |m| (l, m)))
                .filter(|&(l, m)| gcd(l as i64, m as i64) == 1)
            {
                let (gate, g) = peg_reduce(d, l, m).map_err(|e| e.to_string())?;
                ensure(g == 1, || format!("D={d} ({l},{m}) reduced to Z^{g}"))?;
                let u = gate.matrix();
                for (j, k) in (0..d).flat_map(|j| (0..d).map(move |k| (j, k))) {
                    if let Ok(n) = lemma_witness(j as i64, k as i64, l as i64, m as i64, d as i64) {
                        let conj = u.conjugate(&oracle_label(j, k, d));
                        worst = worst.max((1.0 - phase_overlap(&conj, &oracle_label(0, n as u32, d))).abs());
                        dense += 1;
                    }
                }
            }
        }
        ensure(worst < 1e-9, || format!("dense cross-check defect {worst:.2e}"))?;
        Ok(format!(
            "{cases} congruences, {dense} dense cross-checks, defect {worst:.1e}"
        ))
    };
    report(5, "number lemma", start, Duration::from_secs(30), run());
}

#[test]
fn criterion_06_uhlmann() {
    let start = Instant::now();
    let run = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (mut recon, mut min_w, mut max_terms) = (0.0f64, f64::INFINITY, 0usize);
        for d in 2..=8usize {
            for _ in 0..100 {
                let a = random_traceless_hermitian(&mut rng, d);
                let b = random_traceless_hermitian(&mut rng, d);
                let dec = traceless_decompose(&a, &b).map_err(|e| e.to_string())?;
                recon = recon.max(dec.reconstruct(&b).max_abs_diff(&a));
                min_w = dec.weights.iter().copied().fold(min_w, f64::min);
                ensure(dec.len() <= d * d, || format!("D={d}: {} terms", dec.len()))?;
                max_terms = max_terms.max(dec.len());
            }
        }
        ensure(recon <= 1e-8 && min_w >= -1e-12, || {
            format!("reconstruction {recon:.2e}, min weight {min_w:.2e}")
        })?;
        Ok(format!(
            "700 pairs, reconstruction {recon:.1e}, min weight {min_w:.1e}, max terms {max_terms}"
        ))
    };
    report(6, "Uhlmann corollary", start, Duration::from_secs(60), run());
}

/// `n` with `labels = (Z^c ⊗ Z^d)^n`, if any.
fn power_of(labels: &[PauliLabel], c: u32, dd: u32, d: u32) -> Option<u32> {
    (0..d).find(|&n| labels[0] == PauliLabel { j: 0, k: n * c % d } && labels[1] == PauliLabel { j: 0, k: n * dd % d })
}

#[test]
fn criterion_07_stage_contracts() {
    let start = Instant::now();
    let run = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (mut worst, mut imag) = (0.0f64, 0.0f64);
        for d in 2..=6u32 {
            for i in 0..20 {
                let h = random_entangling(&mut rng, d);
                let p = Pipeline::build(&h).map_err(|e| format!("D={d} #{i}: {e}"))?;
                let (c, dd, f) = (p.params.c, p.params.dd, p.params.f);
                ensure(p.h2.terms().all(|(l, _)| l.iter().all(|x| x.j == 0)), || {
                    format!("D={d} #{i}: H2 not diagonal")
                })?;
                ensure(p.h3.terms().all(|(l, _)| power_of(l, c, dd, d).is_some()), || {
                    format!("D={d} #{i}: H3 has a term outside the Z^c⊗Z^d powers")
                })?;
                let allowed = [0, f % d, (d - f) % d];
                ensure(
                    p.h4.terms()
                        .all(|(l, _)| power_of(l, c, dd, d).is_some_and(|n| allowed.contains(&n))),
                    || format!("D={d} #{i}: H4 keeps an unexpected power"),
                )?;
                ensure(p.beta4.norm() > 1e-12, || {
                    format!("D={d} #{i}: secured coupling vanished")
                })?;
                for s in certify_stages(&p).map_err(|e| e.to_string())? {
                    worst = worst.max(s.residual);
                }
                imag = imag.max(p.gamma.max_imag);
            }
        }
        ensure(worst < 1e-9 && imag < 1e-10, || {
            format!("stage residual {worst:.2e}, gamma imag {imag:.2e}")
        })?;
        Ok(format!(
            "100 resources, stage residual {worst:.1e}, gamma imag {imag:.1e}"
        ))
    };
    report(7, "pipeline stage contracts", start, Duration::from_secs(120), run());
}

#[test]
fn criterion_08_prime_fast_path() {
    let start = Instant::now();
    let run = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut worst = 0.0f64;
        for d in [2u32, 3, 5, 7] {
            for _ in 0..10 {
                let h = random_entangling(&mut rng, d);
                let fast = prime_fast_path(&h).map_err(|e| e.to_string())?;
                let pipe = Pipeline::build(&h).map_err(|e| e.to_string())?;
                let mapped = layer_of(&[
                    CliffordGate::multiplier(d, pipe.params.a as i64).map_err(|e| e.to_string())?,
                    CliffordGate::multiplier(d, pipe.params.b as i64).map_err(|e| e.to_string())?,
                ])
                .conjugate(&pipe.h3);
                let words: Vec<Vec<PauliLabel>> =
                    fast.h3.terms().chain(mapped.terms()).map(|(l, _)| l.clone()).collect();
                let (num, den) = words.iter().fold((C64::new(0.0, 0.0), 0.0), |(n, dn), w| {
                    let (x, y) = (mapped.coefficient(w), fast.h3.coefficient(w));
                    (n + x.conj() * y, dn + x.norm_sqr())
                });
                let ratio = num / den;
                ensure(ratio.re > 0.0 && ratio.im.abs() < 1e-9, || {
                    format!("D={d}: ratio {ratio}")
                })?;
                let dev = mapped.scale(ratio.re).max_coefficient_diff(&fast.h3) / fast.h3.max_abs();
                worst = worst.max(dev);
            }
        }
        ensure(worst < 1e-9, || format!("relative deviation {worst:.2e}"))?;
        Ok(format!("40 resources, relative deviation {worst:.1e}"))
    };
    report(8, "prime fast path", start, Duration::from_secs(30), run());
}

#[test]
fn criterion_09_end_to_end() {
    let start = Instant::now();
    let run = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let slices = [64usize, 128, 256, 512];
        let (mut worst256, mut worst_ratio) = (0.0f64, f64::INFINITY);
        for d in 2..=5u32 {
            let h = random_entangling(&mut rng, d);
            let swap = swap_generator(d).map_err(|e| e.to_string())?;
            let targets = [
                ("ZZ", zz_target(d)),
                ("SWAP", swap),
                ("random", random_hamiltonian(&mut rng, d, 2)),
            ];
            let mut exec = Executor::new(&h).map_err(|e| e.to_string())?;
            for (name, k) in targets {
                let c = compile_two_qudit(&h, &k).map_err(|e| format!("D={d} {name}: {e}"))?;
                let target = target_unitary(&k, 1.0).map_err(|e| e.to_string())?;
                let mut errs = Vec::new();
                for n in slices {
                    let s = lower(&c.expr, d, 2, TrotterConfig::new(1.0, n).map_err(|e| e.to_string())?)
                        .map_err(|e| e.to_string())?;
                    let u = exec.run(&s).map_err(|e| e.to_string())?;
                    errs.push(unitary_distance(&u, &target).map_err(|e| e.to_string())?);
                }
                ensure(errs[2] <= 1e-2, || {
                    format!("D={d} {name}: distance {:.2e} at n=256", errs[2])
                })?;
                let ratio = errs.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min);
                ensure(ratio >= 1.5, || {
                    format!("D={d} {name}: convergence ratios too small, errors {errs:?}")
                })?;
                worst256 = worst256.max(errs[2]);
                worst_ratio = worst_ratio.min(ratio);
            }
        }
        Ok(format!(
            "12 compilations, worst n=256 distance {worst256:.2e}, min ratio {worst_ratio:.2}"
        ))
    };
    report(
        9,
        "end-to-end two-qudit simulation",
        start,
        Duration::from_secs(600),
        run(),
    );
}

/// Rounds of the generic plan on `N` qudits: one full round plus halvings.
fn generic_rounds(n: usize) -> u32 {
    1 + (n - 2).next_power_of_two().trailing_zeros()
}

fn decoupling_case(h: &SymbolicHamiltonian, plan: &DecouplingPlan, expected_count: u128) -> Result<(f64, f64), String> {
    let (d, n) = (h.dim(), h.qudits());
    let (p0, p1) = plan.principal;
    let out = apply_plan(h, plan).map_err(|e| e.to_string())?;
    ensure(out.off_principal < 1e-12, || {
        format!("N={n} D={d}: off-principal {:.2e}", out.off_principal)
    })?;

    let before = h.restrict(&[p0, p1]);
    let (num, den) = before.terms().fold((0.0, 0.0), |(a, b), (l, c)| {
        (a + (out.principal.coefficient(l).conj() * c).re, b + c.norm_sqr())
    });
    let scale = num / den;
    let kept = before.scale(scale).max_coefficient_diff(&out.principal);
    ensure(scale > 0.0 && kept < 1e-12, || {
        format!("N={n} D={d}: principal scale {scale}, residual {kept:.2e}")
    })?;

    ensure(plan.flattened_count(d) == expected_count, || {
        format!(
            "N={n} D={d}: {} flattened terms, expected {expected_count}",
            plan.flattened_count(d)
        )
    })?;
    let expr = plan.expr(d).map_err(|e| e.to_string())?;
    ensure(expr.expanded_term_count() == expected_count as f64, || {
        format!("N={n} D={d}: expression expands to {}", expr.expanded_term_count())
    })?;
    let via_expr = effective_hamiltonian(&expr, h).max_coefficient_diff(&out.hamiltonian);

    let dense = target_unitary(&out.hamiltonian, 1.0).map_err(|e| e.to_string())?;
    let local = target_unitary(&out.principal.embed(n, &[p0, p1]), 1.0).map_err(|e| e.to_string())?;
    Ok((dense.max_abs_diff(&local), via_expr))
}

#[test]
fn criterion_10_decoupling() {
    let start = Instant::now();
    let run = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut cases: Vec<(SymbolicHamiltonian, DecouplingPlan, u128)> = Vec::new();
        for n in [4usize, 5, 6] {
            let plan = generic_recursive_plan(n, (0, 1)).map_err(|e| e.to_string())?;
            cases.push((random_two_body(&mut rng, 2, n), plan, 4u128.pow(generic_rounds(n))));
        }
        let plan = generic_recursive_plan(4, (1, 2)).map_err(|e| e.to_string())?;
        cases.push((random_two_body(&mut rng, 3, 4), plan, 9u128.pow(generic_rounds(4))));
        let plan = chain_plan(8, (3, 4)).map_err(|e| e.to_string())?;
        ensure(plan.depth() == 3, || format!("chain plan has {} rounds", plan.depth()))?;
        cases.push((random_chain(&mut rng, 2, 8), plan, 64));
        ensure(cases[0].1.flattened_count(2) == 16, || {
            "N=4, D=2 count is not 16".into()
        })?;

        let (mut dense, mut expr) = (0.0f64, 0.0f64);
        for (h, plan, count) in &cases {
            let (a, b) = decoupling_case(h, plan, *count)?;
            dense = dense.max(a);
            expr = expr.max(b);
        }
        ensure(dense < 1e-9 && expr < 1e-12, || {
            format!("dense {dense:.2e}, expression {expr:.2e}")
        })?;
        Ok(format!("{} plans, dense evolution residual {dense:.1e}", cases.len()))
    };
    report(10, "decoupling", start, Duration::from_secs(300), run());
}

#[test]
fn criterion_11_routed_coupling() {
    let start = Instant::now();
    let run = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst = 0.0f64;
        for d in [2u32, 3] {
            let h = random_chain(&mut rng, d, 4);
            let k = random_hamiltonian(&mut rng, d, 2);
            let planners: [(&str, Box<Planner>); 2] = [
                ("generic", Box::new(|p| generic_recursive_plan(4, p))),
                ("chain", Box::new(|p| chain_plan(4, p))),
            ];
            let target = target_unitary(&k.embed(4, &[0, 3]), 1.0).map_err(|e| e.to_string())?;
            for (name, planner) in planners {
                let r = compile_routed(&h, &*planner, (0, 3), &k, 1.0, 512).map_err(|e| e.to_string())?;
                ensure(r.swaps.len() == 2, || format!("D={d} {name}: swap chain {:?}", r.swaps))?;
                let u = execute_schedule(&r.schedule, &h).map_err(|e| e.to_string())?;
                let dist = unitary_distance(&u, &target).map_err(|e| e.to_string())?;
                ensure(dist <= 5e-2, || format!("D={d} {name}: distance {dist:.2e}"))?;
                worst = worst.max(dist);
            }
        }
        Ok(format!(
            "N=4 chain, pair (0,3) through two swaps, worst distance {worst:.2e} at n=512"
        ))
    };
    report(11, "routed coupling", start, Duration::from_secs(300), run());
}
