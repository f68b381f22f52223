//! Acceptance gate. Each criterion prints one `PASS`/`FAIL` line; the test
//! fails if any criterion does. Tolerances and sample counts are pinned here.

use std::time::Instant;

use hamext::classical::{characteristic_k, characteristic_kbar, check_fundamental, extend, kbar_indices};
use hamext::harness::independence_rank;
use hamext::ladder::{
    factorized_k, factorized_kbar, kuru_negro, m_identity, potential_condition, shift_relation, solve_c1, Sign,
};
use hamext::quantum::{
    a_hat_identity, check_warped_symmetry, d_hat_shift, excited_separable_eigenfunction, extended_quantum_h,
    folded_shift_identity, g_hat, g_hat_coefficients, radial_eigenfunction, random_test_functions, run_all,
    schrodinger, warped_symmetry_x, EigenPair, Normalization, XSigns,
};
use hamext::systems::{self, ttw_like_line, EigenFamily, SystemDef};
use hamext::{CheckOutcome, Comparison, Expr};

const SEED: u64 = 42;
const GRID: [(u32, u32); 4] = [(1, 1), (2, 1), (1, 2), (3, 2)];
const SIGNS: [Sign; 2] = [Sign::Plus, Sign::Minus];

const TTW_TOL: f64 = 1e-9;
const TTW_POINTS: usize = 100;
const FUNDAMENTAL_TOL: f64 = 1e-9;
const INTEGRAL_TOL: f64 = 1e-8;
const KN_TOL: f64 = 1e-7;
const KN_H_TOL: f64 = 1e-9;
const GEOMETRY_TOL: f64 = 1e-9;
const C1_TOL: f64 = 1e-8;
const GHAT_TOL: f64 = 1e-10;
const AHAT_TOL: f64 = 1e-8;
const AHAT_TESTS: usize = 20;
const DHAT_TOL: f64 = 1e-8;
const X_TOL: f64 = 1e-7;
const FOLD_MIN: f64 = 1e-3;
const RANK_POINTS: usize = 20;
const POINTS: usize = 40;
const DEEP_POINTS: usize = 20;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

/// Worst residual across `outs`, failing on the first that does not pass.
fn all_pass(what: &str, outs: &[(String, CheckOutcome)]) -> Verdict {
    let mut worst = 0.0f64;
    for (name, o) in outs {
        if !o.passed {
            return Err(format!(
                "{what}: {name} max_rel {:.3e} >= {:.0e}",
                o.max_rel_residual, o.tolerance
            ));
        }
        worst = worst.max(o.max_rel_residual);
    }
    Ok(format!("{} checks, worst max_rel {worst:.3e}", outs.len()))
}

fn run(cmp: &Comparison, sys: &SystemDef, points: usize, tol: f64) -> Result<CheckOutcome, String> {
    cmp.run(&sys.domain.clone().with_seed(SEED), points, tol)
        .map_err(|e| e.to_string())
}

fn criterion_1() -> Verdict {
    let sys = systems::ttw_angular();
    let base = sys.base.clone().unwrap();
    let lp = sys.ladder.clone().ok_or("ttw_angular has no stored ladder")?;
    let mut outs = Vec::new();
    for sign in SIGNS {
        outs.push((
            format!("Xi {sign:?}"),
            run(&lp.relation(&base, sign), &sys, TTW_POINTS, TTW_TOL)?,
        ));
    }
    all_pass("TTW anchor", &outs)
}

fn criterion_2() -> Verdict {
    let mut outs = Vec::new();
    let mut negatives = 0;
    for sys in systems::catalog() {
        let Some(base) = sys.base.clone() else { continue };
        let d = sys.domain.clone().with_seed(SEED);
        for cand in &sys.candidates {
            let g = cand.fundamental_g(&base);
            let o = check_fundamental(&base, &g, cand.c, cand.c0, &d, POINTS, FUNDAMENTAL_TOL)
                .map_err(|e| e.to_string())?;
            outs.push((format!("{}/{}", sys.name, cand.label), o));
        }
        for neg in &sys.planted_negatives {
            let o = check_fundamental(&base, &neg.g, neg.c, neg.c0, &d, POINTS, FUNDAMENTAL_TOL)
                .map_err(|e| e.to_string())?;
            if o.passed {
                return Err(format!("planted negative {}/{} passed", sys.name, neg.label));
            }
            negatives += 1;
        }
    }
    if negatives == 0 {
        return Err("no planted negative in the catalog".into());
    }
    all_pass("fundamental", &outs).map(|s| format!("{s}; {negatives} planted negative rejected"))
}

fn integral_systems() -> [SystemDef; 2] {
    [systems::flat_harmonic(), systems::ttw_angular()]
}

fn criterion_3() -> Verdict {
    let mut outs = Vec::new();
    for sys in integral_systems() {
        let base = sys.base.clone().unwrap();
        let cand = &sys.candidates[0];
        let g = cand.fundamental_g(&base);
        let d = sys.domain.clone().with_seed(SEED);
        for (m, n) in GRID {
            let (s, r) = kbar_indices(m, n);
            for omega in [0.0, 0.5] {
                let ext = extend(&base, &sys.extension_params(m, n, omega).unwrap());
                if omega == 0.0 {
                    let k = characteristic_k(&ext, &g, &d, POINTS, FUNDAMENTAL_TOL).map_err(|e| e.to_string())?;
                    outs.push((
                        format!("{} K {m}/{n}", sys.name),
                        run(&ext.conservation(&k), &sys, POINTS, INTEGRAL_TOL)?,
                    ));
                }
                let kb = characteristic_kbar(&ext, &g, s, r, &d, POINTS, FUNDAMENTAL_TOL).map_err(|e| e.to_string())?;
                outs.push((
                    format!("{} Kbar {m}/{n} Omega={omega}", sys.name),
                    run(&ext.conservation(&kb), &sys, POINTS, INTEGRAL_TOL)?,
                ));
            }
        }
    }
    all_pass("{H, K}", &outs)
}

fn criterion_4() -> Verdict {
    let mut outs = Vec::new();
    for sys in integral_systems() {
        let base = sys.base.clone().unwrap();
        let cand = &sys.candidates[0];
        let lp = sys
            .ladder
            .clone()
            .unwrap_or_else(|| hamext::ladder::build_ladder(&base, &cand.g, cand.c, cand.c0, cand.c1));
        for (m, n) in GRID {
            let ext = extend(&base, &sys.extension_params(m, n, 0.0).unwrap());
            let fz = factorized_k(&ext, &lp);
            let cmp = Comparison::new().pair(ext.k_integral(&lp.gplus), fz.product());
            outs.push((
                format!("{} K=(2f)^(n-1)G^nF {m}/{n}", sys.name),
                run(&cmp, &sys, POINTS, INTEGRAL_TOL)?,
            ));
            outs.push((
                format!("{} X_H F {m}/{n}", sys.name),
                run(&shift_relation(&ext, &lp, &fz), &sys, POINTS, INTEGRAL_TOL)?,
            ));

            let (s, r) = kbar_indices(m, n);
            let ext = extend(&base, &sys.extension_params(m, n, 0.5).unwrap());
            let fz = factorized_kbar(&ext, &lp, s, r);
            let cmp = Comparison::new().pair(ext.kbar_integral(&lp.gplus, s, r), fz.product());
            outs.push((
                format!("{} Kbar factorization {m}/{n}", sys.name),
                run(&cmp, &sys, POINTS, INTEGRAL_TOL)?,
            ));
            outs.push((
                format!("{} Kbar X_H F {m}/{n}", sys.name),
                run(&shift_relation(&ext, &lp, &fz), &sys, POINTS, INTEGRAL_TOL)?,
            ));
        }
    }
    all_pass("factorization", &outs)
}

fn criterion_5() -> Verdict {
    let sys = systems::ttw_angular();
    let base = sys.base.clone().unwrap();
    let lp = sys.ladder.clone().unwrap();
    // the factors take a square root of Omega
    let omega = 0.5;
    let mut outs = Vec::new();
    for (m, n) in GRID {
        let p = sys.extension_params(m, n, omega).unwrap();
        if p.big_c != 0.0 {
            return Err("TTW preset has C != 0".into());
        }
        let ext = extend(&base, &p);
        let kn = kuru_negro(&ext, &lp).map_err(|e| e.to_string())?;
        let tag = format!("{m}/{n} Omega={omega}");
        for sign in SIGNS {
            outs.push((
                format!("HG {sign:?} {tag}"),
                run(&kn.relation_g(&ext, sign), &sys, DEEP_POINTS, KN_TOL)?,
            ));
            outs.push((
                format!("HA {sign:?} {tag}"),
                run(&kn.relation_a(&ext, sign), &sys, DEEP_POINTS, KN_TOL)?,
            ));
            outs.push((
                format!("HD {sign:?} {tag}"),
                run(&kn.relation_d(&ext, sign), &sys, DEEP_POINTS, KN_TOL)?,
            ));
            outs.push((
                format!("H,X {sign:?} {tag}"),
                run(&kn.conservation(&ext, sign), &sys, DEEP_POINTS, KN_TOL)?,
            ));
        }
        outs.push((
            format!("H=A+A-+wM {tag}"),
            run(&kn.h_factorization(&ext), &sys, POINTS, KN_H_TOL)?,
        ));
        outs.push((
            format!("M identity {tag}"),
            run(&m_identity(&ext, &kn, &lp), &sys, POINTS, KN_H_TOL)?,
        ));
    }
    all_pass("Kuru-Negro", &outs)
}

fn criterion_6() -> Verdict {
    let mut outs = Vec::new();
    for sys in [systems::s3_hopf(), systems::s3_hopf_c1()] {
        let base = sys.base.clone().unwrap();
        let metric = base.metric();
        let d = sys.domain.clone().with_seed(SEED);
        let x: Vec<Expr> = metric.coords().iter().map(|s| s.expr()).collect();
        let probe = x[0].cos() * x[1].sin() + x[2].powi(2) * x[0].sin() + x[1].powi(3);
        let e = |r: Result<CheckOutcome, _>| r.map_err(|e: hamext::SampleError| e.to_string());
        for cand in &sys.candidates {
            let tag = format!("{}/{}", sys.name, cand.label);
            outs.push((
                format!("hessian {tag}"),
                e(metric.check_hessian_equation(&cand.g, cand.c, &d, POINTS, GEOMETRY_TOL))?,
            ));
            outs.push((
                format!("ricci {tag}"),
                e(metric.check_ricci_ladder_lemma(&cand.g, cand.c, &d, POINTS, GEOMETRY_TOL))?,
            ));
            let cond = Comparison::new().pair(
                potential_condition(&base, &cand.g, cand.c, cand.c0),
                Expr::real(-cand.c1),
            );
            outs.push((
                format!("potential c1={} {tag}", cand.c1),
                run(&cond, &sys, POINTS, GEOMETRY_TOL)?,
            ));
            let g = cand.fundamental_g(&base);
            let o =
                check_fundamental(&base, &g, cand.c, cand.c0, &d, POINTS, GEOMETRY_TOL).map_err(|e| e.to_string())?;
            outs.push((format!("fundamental {tag}"), o));
        }
        outs.push((
            format!("third derivative {}", sys.name),
            e(metric.check_third_derivative_commutator(&probe, &d, POINTS, GEOMETRY_TOL))?,
        ));
    }
    let summary = all_pass("geometry", &outs)?;
    let (c1, c2) = (0.7, 1.3);
    let (line, g, d) = ttw_like_line(c1, c2);
    let got = solve_c1(&line, &g, 1.0, 0.0, &d.with_seed(SEED), POINTS, C1_TOL).map_err(|e| e.to_string())?;
    if (got + c2).abs() >= C1_TOL {
        return Err(format!("solve_c1 gave {got}, expected {}", -c2));
    }
    Ok(format!("{summary}; solve_c1 = {got:.12} (want {})", -c2))
}

fn circle() -> (SystemDef, Vec<f64>) {
    let sys = systems::circle_free();
    let Some(EigenFamily::Symbolic { samples, .. }) = &sys.eigen else {
        panic!("circle_free has a symbolic family")
    };
    let eps = samples.iter().map(|v| v[0]).collect();
    (sys, eps)
}

fn criterion_7() -> Verdict {
    let (sys, samples) = circle();
    let base = sys.base.clone().unwrap();
    let qp = sys.quantum.clone().unwrap();
    let fam = sys.eigen.clone().unwrap();
    let g = &sys.candidates[0].g;
    let l0 = schrodinger(&base, qp.hbar);
    let mut outs = Vec::new();
    for eps in samples {
        for sign in SIGNS {
            let qe = qp.clone().with_epsilon(eps);
            let norm = Normalization::default();
            let k = g_hat_coefficients(&qe, sign, eps, norm).map_err(|e| e.to_string())?;
            // G^+ lowers eps by 2, G^- raises it
            let shifted = eps - sign.value() as f64 * 2.0;
            if k.a1 != sign.value() as f64 * 2.0 * eps {
                return Err(format!(
                    "a1 {sign:?} at eps={eps} is {}, not {}",
                    k.a1,
                    sign.value() as f64 * 2.0 * eps
                ));
            }
            let op = g_hat(base.metric(), g, &qe, sign, norm).map_err(|e| e.to_string())?;
            let psi = fam.instance(&[eps]).unwrap();
            let next = fam.instance(&[shifted]).unwrap();
            let image = op.apply(&psi.psi);
            let prop = Comparison::new().pair(image.clone(), Expr::real(k.a1) * &next.psi);
            outs.push((
                format!("proportional {sign:?} eps={eps}"),
                run(&prop, &sys, POINTS, GHAT_TOL)?,
            ));
            let eig = EigenPair::new(image, shifted * shifted, "L0").comparison(&l0);
            outs.push((
                format!("eigenvalue {sign:?} eps={eps}"),
                run(&eig, &sys, POINTS, GHAT_TOL)?,
            ));
        }
    }
    all_pass("G hat", &outs).map(|s| format!("{s}; a1 = ±2 eps exactly"))
}

fn radial() -> (SystemDef, Vec<f64>) {
    let sys = systems::radial_oscillator();
    let Some(EigenFamily::Radial { samples }) = sys.eigen.clone() else {
        panic!("radial family")
    };
    (sys, samples)
}

fn criterion_8() -> Verdict {
    let (sys, _) = radial();
    let qp = sys.quantum.clone().unwrap().with_mu(1.9);
    let tests = random_test_functions(AHAT_TESTS, SEED);
    let d = sys.domain.clone().with_seed(SEED);
    let mut outs = Vec::new();
    for sigma in SIGNS {
        for tau in SIGNS {
            for m in [1, 2] {
                let cmps = a_hat_identity(&qp, sigma, tau, m, &tests).map_err(|e| e.to_string())?;
                let o = run_all(&cmps, &d, DEEP_POINTS, AHAT_TOL).map_err(|e| e.to_string())?;
                outs.push((format!("sigma={sigma:?} tau={tau:?} m={m}"), o));
            }
        }
    }
    all_pass("A hat", &outs)
}

fn criterion_9() -> Verdict {
    let (sys, samples) = radial();
    let qp = sys.quantum.clone().unwrap();
    let d = sys.domain.clone().with_seed(SEED);
    if samples.len() < 3 {
        return Err("fewer than three radial eigenfunctions".into());
    }
    let step = 2.0 * qp.hbar * qp.c * qp.omega;
    let mut outs = Vec::new();
    for &big_m in &samples[..3] {
        let phi = radial_eigenfunction(&qp, big_m, Sign::Plus).map_err(|e| e.to_string())?;
        for sign in SIGNS {
            let (one, cmp) = d_hat_shift(&qp, sign, big_m, &phi, 1).map_err(|e| e.to_string())?;
            let shift = one.eigenvalue.re - phi.eigenvalue.re;
            if (shift - sign.value() as f64 * step).abs() > DHAT_TOL * step {
                return Err(format!("shift {shift} at M={big_m}, expected ±{step}"));
            }
            outs.push((
                format!("M={big_m} {sign:?} one rung"),
                cmp.run(&d, POINTS, DHAT_TOL).map_err(|e| e.to_string())?,
            ));
            let (two, cmp) = d_hat_shift(&qp, sign, big_m, &phi, 2).map_err(|e| e.to_string())?;
            outs.push((
                format!("M={big_m} {sign:?} two rungs"),
                cmp.run(&d, POINTS, DHAT_TOL).map_err(|e| e.to_string())?,
            ));
            // two rungs at once agree with one rung applied twice
            let (again, _) = d_hat_shift(&qp, sign, big_m, &one, 1).map_err(|e| e.to_string())?;
            let cmp = Comparison::new().pair(two.psi.clone(), again.psi.clone());
            outs.push((
                format!("M={big_m} {sign:?} rung consistency"),
                cmp.run(&d, POINTS, DHAT_TOL).map_err(|e| e.to_string())?,
            ));
            if (two.eigenvalue.re - again.eigenvalue.re).abs() > DHAT_TOL * step {
                return Err(format!("two-rung energies disagree at M={big_m}"));
            }
        }
    }
    all_pass("D hat", &outs).map(|s| format!("{s}; shift ±{step}"))
}

fn criterion_10() -> Verdict {
    let (sys, samples) = circle();
    let base = sys.base.clone().unwrap();
    let qp0 = sys.quantum.clone().unwrap();
    let fam = sys.eigen.clone().unwrap();
    let g = &sys.candidates[0].g;
    let l0 = schrodinger(&base, qp0.hbar);
    let (rsys, _) = radial();
    let d = sys.domain.merged(&rsys.domain).with_seed(SEED);
    let eps = samples[samples.len() / 2];
    let pair = fam.instance(&[eps]).unwrap();
    let mut outs = Vec::new();
    for (m, n) in GRID {
        let qp = qp0.clone().with_k(m, n).map_err(|e| e.to_string())?;
        let qp = qp.clone().with_epsilon(qp.epsilon_for(pair.eigenvalue.re));
        // the radial factor sits m rungs up so that no variant annihilates it
        let f = excited_separable_eigenfunction(&qp, &pair, Sign::Plus, m).map_err(|e| e.to_string())?;
        let qp = qp.with_energy(f.eigenvalue.re);
        let h = extended_quantum_h(&l0, &qp).map_err(|e| e.to_string())?;
        for signs in XSigns::all() {
            let x =
                warped_symmetry_x(base.metric(), g, &qp, signs, Normalization::default()).map_err(|e| e.to_string())?;
            let o = check_warped_symmetry(&h, &x, &f, &d, DEEP_POINTS, X_TOL)
                .map_err(|e| format!("k={m}/{n} {}: {e}", signs.label()))?;
            outs.push((format!("k={m}/{n} {}", signs.label()), o));
        }
    }
    all_pass("warped symmetry", &outs)
}

fn criterion_11() -> Verdict {
    let (sys, _) = radial();
    let d = sys.domain.clone().with_seed(SEED);
    let tests = random_test_functions(4, SEED);
    let mut qp = sys.quantum.clone().unwrap();
    qp.dim = 3;
    let cmps = folded_shift_identity(&qp, Sign::Plus, Sign::Plus, 2.0, &tests).map_err(|e| e.to_string())?;
    let o = run_all(&cmps, &d, DEEP_POINTS, FOLD_MIN).map_err(|e| e.to_string())?;
    if o.max_rel_residual <= FOLD_MIN {
        return Err(format!(
            "folded identity holds for N=3 (max_rel {:.3e})",
            o.max_rel_residual
        ));
    }
    Ok(format!("N=3 residual {:.3e} > {FOLD_MIN:.0e}", o.max_rel_residual))
}

fn criterion_12() -> Verdict {
    let sys = systems::flat_harmonic();
    let base = sys.base.clone().unwrap();
    let cand = &sys.candidates[0];
    let ext = extend(&base, &sys.extension_params(1, 1, 0.0).unwrap());
    let funcs = [
        ext.h().clone(),
        base.l().clone(),
        ext.k_integral(&cand.fundamental_g(&base)),
    ];
    let mut chart = ext.chart().coordinates();
    chart.extend(ext.chart().momenta());
    let rank = independence_rank(&funcs, &chart, &sys.domain.clone().with_seed(SEED), RANK_POINTS)
        .map_err(|e| e.to_string())?;
    if rank != 3 {
        return Err(format!("rank {rank}"));
    }
    Ok(format!("rank 3 over {RANK_POINTS} points"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 12] = [
        ("TTW ladder anchor", criterion_1),
        ("fundamental-equation gate", criterion_2),
        ("characteristic integrals", criterion_3),
        ("ladder factorization and shift", criterion_4),
        ("Kuru-Negro factors", criterion_5),
        ("S^3 geometry and solve_c1", criterion_6),
        ("quantum G hat on the circle", criterion_7),
        ("A hat operator identity", criterion_8),
        ("D hat energy shift", criterion_9),
        ("warped symmetry end to end", criterion_10),
        ("delta0 folding negative control", criterion_11),
        ("functional independence", criterion_12),
    ];
    let mut failed = Vec::new();
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = f();
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match &verdict {
            Ok(detail) => println!("criterion {:>2} PASS  {title}: {detail} ({ms:.0} ms)", i + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {title}: {detail} ({ms:.0} ms)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
