//! Acceptance suite. Every criterion recomputes its identities from the raw
//! operators with test-local oracles and prints one PASS/FAIL line.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use intertwine::crypto::{build_g1, build_g2_full, level_two_core, make_crypto_scenario};
use intertwine::linalg::{dominant_index, kernel_basis, rank_of, solve};
use intertwine::models::{boson_lowering, quon_nu};
use intertwine::transform::{completeness_defect, joint_eigenbasis, map_family, tilde_h2};
use intertwine::{
    make_model, transform, CMat, CVec, Error, ModelInstance, ModelKind, ModelParams,
    ToleranceConfig, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn rel(r: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        r / scale
    } else {
        r
    }
}

/// Largest `||A v - lambda v|| / (||A|| ||v||)` over the columns.
fn eig_res(a: &CMat, vecs: &CMat, vals: &[f64]) -> f64 {
    (0..vecs.cols())
        .map(|i| {
            let v = vecs.column(i);
            let r = (a.mul_vec(&v) - &v * C64::from(vals[i])).norm();
            rel(r, a.fro_norm() * v.norm())
        })
        .fold(0.0, f64::max)
}

fn gap(a: &CMat, b: &CMat) -> f64 {
    (a - b).max_abs()
}

fn eye_gap(m: &CMat) -> f64 {
    gap(m, &CMat::identity(m.rows()))
}

/// `eps_n = 1 + q + ... + q^(n-1)`
fn q_number(n: usize, q: f64) -> f64 {
    (0..n).map(|j| q.powi(j as i32)).sum()
}

fn factorial_ratio(top: usize, bottom: usize) -> f64 {
    ((bottom + 1)..=top).map(|i| i as f64).product()
}

fn model_suite() -> Vec<(String, ModelInstance)> {
    let mut out = Vec::new();
    for k in 1..=3 {
        let p = ModelParams { k, ..Default::default() };
        out.push((format!("boson k={k}"), make_model(ModelKind::Boson, 16, p).unwrap()));
    }
    for q in [0.0, 0.3, 0.7, 1.0] {
        for k in 1..=2 {
            let p = ModelParams { k, q, ..Default::default() };
            out.push((format!("quon q={q} k={k}"), make_model(ModelKind::Quon, 16, p).unwrap()));
        }
    }
    for kind in [ModelKind::LandauA, ModelKind::LandauB] {
        out.push((kind.name().to_string(), make_model(kind, 8, ModelParams::default()).unwrap()));
    }
    out
}

/// Number-state label of a (number-basis) eigenvector.
fn basis_of(model: &ModelInstance, v: &CVec) -> Vec<usize> {
    model.space.label_of(dominant_index(v))
}

/// Closed-form `(eps1, nu)` for a number state, or `None` outside the truncation margin.
fn closed_form(model: &ModelInstance, b: &[usize]) -> Option<(f64, f64, f64)> {
    let p = model.params;
    let w = p.hbar_omega;
    match (model.kind, b) {
        (ModelKind::Boson, &[n]) if n + p.k < model.dim() => {
            let nu = factorial_ratio(n + p.k, n);
            let eps2 = if n == 0 { 0.0 } else { factorial_ratio(n + p.k, n - 1) };
            Some((n as f64, nu, eps2))
        }
        (ModelKind::Quon, &[n]) if n + p.k < model.dim() => {
            let nu: f64 = (1..=p.k).map(|i| q_number(n + i, p.q)).product();
            let e = q_number(n, p.q);
            Some((e, nu, e * nu))
        }
        (ModelKind::LandauA, &[np, nm]) => {
            let d = match model.space {
                intertwine::models::Space::TwoMode { plus, .. } => plus,
                _ => unreachable!(),
            };
            (np + 1 < d && nm + 1 < d).then(|| {
                let e = w * (2 * nm + 1) as f64;
                let nu = ((np + 1) * (nm + 1)) as f64;
                (e, nu, w * (2 * nm + 1) as f64 * ((np + 1) * (nm + 1)) as f64)
            })
        }
        (ModelKind::LandauB, &[np, nm]) => {
            let d = match model.space {
                intertwine::models::Space::TwoMode { plus, .. } => plus,
                _ => unreachable!(),
            };
            (np + 1 < d).then(|| {
                let e = w * (2 * nm + 1) as f64;
                (e, (np + 1) as f64, e * (np + 1) as f64)
            })
        }
        _ => None,
    }
}

fn mixed_ok(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * b.abs() + 1e-12
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (_, m) in model_suite() {
        let (h1, x) = (&m.h1, &m.x);
        let xd = x.adjoint();
        let n1 = x * &xd;
        let n2 = &xd * x;
        let h2 = &(&xd * h1) * x;
        let r = [
            rel(gap(&h2, &h2.adjoint()), h2.max_abs()),
            rel(
                (&(&h2 * &n2) - &(&n2 * &h2)).fro_norm(),
                h2.fro_norm() * n2.fro_norm(),
            ),
            rel(
                (&(&n1 * x) - &(x * &n2)).fro_norm(),
                n1.fro_norm() * x.fro_norm(),
            ),
            rel(
                (&(&(h1 * &n1) * x) - &(x * &h2)).fro_norm(),
                h1.fro_norm() * n1.fro_norm() * x.fro_norm(),
            ),
        ];
        worst = r.into_iter().fold(worst, f64::max);
        // the library pipeline must agree
        let t = transform(&m, &tol()).unwrap();
        worst = t
            .checks
            .iter()
            .filter(|c| c.name.starts_with("rel."))
            .map(|c| c.residual)
            .fold(worst, f64::max);
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-10 && elapsed < Duration::from_secs(2),
        detail: format!(
            "partner identities on 11 models, max scaled residual {worst:.3e} (<= 1e-10), {:.3} s (< 2 s)",
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_2() -> Outcome {
    let mut worst_law = 0.0f64;
    let mut failures = 0usize;
    let mut rows = 0usize;
    for (name, m) in model_suite() {
        let t = transform(&m, &tol()).unwrap();
        let h2 = &(&m.x.adjoint() * &m.h1) * &m.x;
        for i in 0..t.f1.len() {
            let phi = t.f1.vector(i);
            let b = basis_of(&m, &phi);
            let Some((e1, nu, e2)) = closed_form(&m, &b) else {
                continue;
            };
            rows += 1;
            let v = m.x.adjoint().mul_vec(&phi);
            let measured = (v.dotc(&h2.mul_vec(&v)) / v.dotc(&v)).re;
            let law = t.f1.eps1[i] * t.f1.nu[i];
            worst_law = worst_law.max((measured - law).abs() / (measured.abs() + 1e-2));
            let ok = mixed_ok(measured, law)
                && mixed_ok(t.f1.eps1[i], e1)
                && mixed_ok(t.f1.nu[i], nu)
                && mixed_ok(measured, e2);
            if !ok {
                failures += 1;
                eprintln!("  {name} basis {b:?}: eps2 {measured} law {law} oracle {e2}");
            }
        }
    }
    Outcome {
        pass: failures == 0 && rows > 0,
        detail: format!(
            "product law and closed forms on {rows} in-margin labels, {failures} violations of |a-b| <= 1e-10|b| + 1e-12 (worst law residual {worst_law:.3e})"
        ),
    }
}

fn criterion_3() -> Outcome {
    let mut worst = 0.0f64;
    let mut labels = 0;
    for (_, m) in model_suite() {
        let t = transform(&m, &tol()).unwrap();
        for &i in &t.f1.j_prime {
            let phi1 = t.f1.vector(i);
            let phi2 = m.x.adjoint().mul_vec(&phi1);
            let back = m.x.mul_vec(&phi2) / C64::from(t.f1.nu[i]);
            worst = worst.max((back - phi1).norm());
            labels += 1;
        }
    }
    Outcome {
        pass: worst <= 1e-9,
        detail: format!("recovery phi1 = x phi2 / nu over {labels} labels, max error {worst:.3e} (<= 1e-9)"),
    }
}

fn random_complex(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    let a = random_complex(rng, d, d);
    (&a + &a.adjoint()).scale_real(0.5)
}

fn criterion_4() -> Outcome {
    let t = tol();
    let mut bad = Vec::new();
    for (name, m) in model_suite() {
        let r = transform(&m, &t).unwrap();
        let c = r.completeness;
        if c.f2_rank + c.kernel_dim != c.space_dim {
            bad.push(name);
        }
    }
    let d = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut deficient = 0;
    for trial in 0..50 {
        // every other instance is a product of thin factors, rank r < d
        let (x, expected_kernel) = if trial % 2 == 0 {
            (random_complex(&mut rng, d, d), 0)
        } else {
            let r = 4 + trial % 9;
            deficient += 1;
            let a = random_complex(&mut rng, d, r);
            let b = random_complex(&mut rng, r, d);
            (&a * &b, d - r)
        };
        let n1 = &x * &x.adjoint();
        let f1 = joint_eigenbasis(&n1, &n1, &t).unwrap();
        let f2 = map_family(&x, &f1, &t);
        let c = completeness_defect(&x, &f2, &t);
        let kernel = kernel_basis(&x, &t).cols();
        let ok = c.f2_rank + c.kernel_dim == d
            && c.kernel_dim == expected_kernel
            && kernel == expected_kernel
            && rank_of(&x, &t) == d - expected_kernel;
        if !ok {
            bad.push(format!("random #{trial}: {c:?}"));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "rank sum f2_rank + dim ker(x) = dim on 11 models and 50 random x ({deficient} rank-deficient), failures: {bad:?}"
        ),
    }
}

fn criterion_5() -> Outcome {
    let t = tol();
    let d = 16;
    let boson = make_model(ModelKind::Boson, d, ModelParams::default()).unwrap();

    // invertible N2: the cyclic completion of the ladder operator
    let x = boson.periodic_companion().unwrap();
    let h1 = &boson.h1;
    let tilde = tilde_h2(h1, &x, &t).unwrap();
    let h2 = &(&x.adjoint() * h1) * &x;
    let f1 = joint_eigenbasis(h1, &(&x * &x.adjoint()), &t).unwrap();
    let f2 = map_family(&x, &f1, &t);
    let eps1: Vec<f64> = f2.source.iter().map(|&i| f1.eps1[i]).collect();
    let iso = eig_res(&tilde, &f2.vectors, &eps1);
    let shifted = eig_res(&h2, &f2.vectors, &f2.eps2);
    let moved = f2.eps2.iter().zip(&eps1).filter(|(a, b)| (*a - *b).abs() > 0.5).count();

    // dense-solve oracle on x = a + 2I: tilde h2 = x^-1 h1 x
    let a = boson_lowering(d).unwrap();
    let xs = &a + &CMat::identity(d).scale_real(2.0);
    let inv = solve(&xs, &CMat::identity(d)).unwrap();
    let oracle = &(&inv * h1) * &xs;
    let solve_gap = rel(gap(&tilde_h2(h1, &xs, &t).unwrap(), &oracle), oracle.max_abs());

    let singular = match tilde_h2(h1, &boson.x, &t) {
        Err(e @ Error::SingularN2 { .. }) => e.to_string().contains("admits no inverse"),
        _ => false,
    };
    Outcome {
        pass: iso <= 1e-9 && shifted <= 1e-10 && moved > 0 && solve_gap <= 1e-9 && singular,
        detail: format!(
            "isospectral partner keeps eps1 (residual {iso:.3e} <= 1e-9), h2 moves {moved}/{} levels to eps1*nu (residual {shifted:.3e}), dense-solve gap {solve_gap:.3e}, x = a raises singular-N2 error: {singular}",
            f2.len()
        ),
    }
}

fn criterion_6() -> Outcome {
    let d = 16;
    let mut worst = 0.0f64;
    let mut stated_at_one = 0.0f64;
    for q in [0.0, 0.3, 0.7, 1.0] {
        // lowering operator built here from eps_n alone
        let b = CMat::from_fn(d, d, |i, j| {
            if j == i + 1 {
                C64::from(q_number(j, q).sqrt())
            } else {
                C64::from(0.0)
            }
        });
        let mut bk = CMat::identity(d);
        for k in 1..=3 {
            bk = &bk * &b;
            let n1 = &bk * &bk.adjoint();
            for n in 0..d - k {
                let brute = n1.get(n, n).re;
                worst = worst.max((quon_nu(n, k, q) - brute).abs() / brute.abs().max(1e-300));
                if q == 1.0 {
                    let stated = intertwine::errata::quon_nu_stated(n, k, q);
                    stated_at_one = stated_at_one.max((stated - brute).abs() / brute);
                }
            }
        }
    }
    Outcome {
        pass: worst <= 1e-12,
        detail: format!(
            "adopted nu recurrence vs brute-force B^k B^dagger^k, max relative error {worst:.3e} (<= 1e-12); stated eps_(n+1) form at q = 1 misses by up to {:.1}% (reported)",
            100.0 * stated_at_one
        ),
    }
}

struct CryptoTally {
    crypto_herm: f64,
    eigen: f64,
    frames: f64,
    frame_forms: f64,
    intertwine: f64,
    degeneration: f64,
    runs: usize,
}

fn crypto_case(base: &ModelInstance, eps: f64, seed: u64, tally: &mut CryptoTally) {
    let t = tol();
    let sc = make_crypto_scenario(base, eps, seed, &t).unwrap();
    let m = &sc.metric;
    let ch = |h: &CMat| rel((h - &(&(&m.inv * &h.adjoint()) * &m.theta)).fro_norm(), h.fro_norm());
    let xdd = &(&m.inv * &sc.x.adjoint()) * &m.theta;
    let n1 = &sc.x * &xdd;
    tally.crypto_herm = tally.crypto_herm.max(ch(&sc.h1)).max(ch(&n1));

    let g1 = build_g1(&sc.h1, &n1, m, &t).unwrap();
    let h = &(&m.sqrt * &sc.h1) * &m.inv_sqrt;
    let n_hat = &(&m.sqrt * &n1) * &m.inv_sqrt;
    let h1d = sc.h1.adjoint();
    let n1d = n1.adjoint();
    let e = [
        eig_res(&h, &g1.phi, &g1.eps),
        eig_res(&n_hat, &g1.phi, &g1.nu),
        eig_res(&sc.h1, &g1.big_phi, &g1.eps),
        eig_res(&n1, &g1.big_phi, &g1.nu),
        eig_res(&h1d, &g1.eta, &g1.eps),
        eig_res(&n1d, &g1.eta, &g1.nu),
    ];
    tally.eigen = e.into_iter().fold(tally.eigen, f64::max);
    let s_phi = &g1.big_phi * &g1.big_phi.adjoint();
    let s_eta = &g1.eta * &g1.eta.adjoint();
    tally.frames = tally
        .frames
        .max(rel(gap(&s_phi, &m.inv), m.inv.max_abs()))
        .max(rel(gap(&s_eta, &m.theta), m.theta.max_abs()));

    // level two on the model's own x (non-trivial kernel)
    let h2 = &(&xdd * &sc.h1) * &sc.x;
    let n2 = &xdd * &sc.x;
    let core = level_two_core(&sc.h1, &sc.x, &g1, m, &t).unwrap();
    let ph2: Vec<CVec> = g1.j_prime.iter().map(|&i| xdd.mul_vec(&g1.big_phi.column(i))).collect();
    let ph2 = CMat::from_columns(sc.x.rows(), &ph2);
    let eps2: Vec<f64> = g1.j_prime.iter().map(|&i| g1.eps[i] * g1.nu[i]).collect();
    let nu2: Vec<f64> = g1.j_prime.iter().map(|&i| g1.nu[i]).collect();
    let comm = |a: &CMat, b: &CMat| rel((&(a * b) - &(b * a)).fro_norm(), a.fro_norm() * b.fro_norm());
    let l2 = [
        ch(&h2),
        comm(&h2, &n2),
        rel((&(&n1 * &sc.x) - &(&sc.x * &n2)).fro_norm(), n1.fro_norm() * sc.x.fro_norm()),
        rel(
            (&(&(&sc.h1 * &n1) * &sc.x) - &(&sc.x * &h2)).fro_norm(),
            sc.h1.fro_norm() * n1.fro_norm() * sc.x.fro_norm(),
        ),
        eig_res(&h2, &ph2, &eps2),
        eig_res(&n2, &ph2, &nu2),
        rel(gap(&core.h2, &h2), h2.max_abs()),
    ];
    tally.eigen = l2.into_iter().fold(tally.eigen, f64::max);
    let sum = &ph2 * &ph2.adjoint();
    let closed = &(&xdd * &m.inv) * &xdd.adjoint();
    tally.frame_forms = tally.frame_forms.max(rel(gap(&sum, &closed), closed.max_abs()));
    let inter = |s: &CMat, h: &CMat| rel((&(s * &h.adjoint()) - &(h * s)).fro_norm(), s.fro_norm() * h.fro_norm());
    tally.intertwine = tally.intertwine.max(inter(&s_phi, &sc.h1)).max(inter(&sum, &h2));

    // complete level two on the invertible companion
    let xp = sc.dress_operator(&base.periodic_companion().unwrap()).unwrap();
    let b = build_g2_full(&sc.h1, &xp, m, &t).unwrap();
    let g2 = &b.family;
    let e57 = [
        eig_res(&g2.hamiltonian.adjoint(), &g2.eta, &g2.eps),
        eig_res(&g2.number.adjoint(), &g2.eta, &g2.nu),
        eig_res(&g2.hamiltonian, &g2.big_phi, &g2.eps),
        eig_res(&g2.h, &g2.phi, &g2.eps),
    ];
    tally.eigen = e57.into_iter().fold(tally.eigen, f64::max);
    let s2 = &g2.big_phi * &g2.big_phi.adjoint();
    let s2_eta = &g2.eta * &g2.eta.adjoint();
    let xpdd = &(&m.inv * &xp.adjoint()) * &m.theta;
    let closed2 = &(&xpdd * &m.inv) * &xpdd.adjoint();
    tally.frame_forms = tally.frame_forms.max(rel(gap(&s2, &closed2), closed2.max_abs()));
    tally.frames = tally
        .frames
        .max(eye_gap(&(&s2 * &s2_eta)))
        .max(eye_gap(&(&g2.phi.adjoint() * &g2.phi)))
        .max(eye_gap(&(&g2.big_phi.adjoint() * &g2.eta)));
    tally.intertwine = tally
        .intertwine
        .max(inter(&(&b.g1.big_phi * &b.g1.big_phi.adjoint()), &sc.h1))
        .max(inter(&s2, &g2.hamiltonian));

    if eps == 0.0 {
        let r = transform(base, &t).unwrap();
        let v = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let d = [
            gap(&sc.h1, &base.h1),
            gap(&sc.x, &base.x),
            gap(&g1.phi, &r.f1.vectors),
            gap(&g1.big_phi, &r.f1.vectors),
            gap(&g1.eta, &r.f1.vectors),
            v(&g1.eps, &r.f1.eps1),
            v(&g1.nu, &r.f1.nu),
            gap(&core.h2, &r.ops.h2),
            gap(&core.n2, &r.ops.n2),
            gap(&core.big_phi, &r.f2.vectors),
        ];
        tally.degeneration = d.into_iter().fold(tally.degeneration, f64::max);
    }
    tally.runs += 1;
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut tally = CryptoTally {
        crypto_herm: 0.0,
        eigen: 0.0,
        frames: 0.0,
        frame_forms: 0.0,
        intertwine: 0.0,
        degeneration: 0.0,
        runs: 0,
    };
    let bases = [
        make_model(ModelKind::Boson, 16, ModelParams::default()).unwrap(),
        make_model(ModelKind::Boson, 12, ModelParams { k: 2, ..Default::default() }).unwrap(),
        make_model(ModelKind::LandauA, 4, ModelParams::default()).unwrap(),
        make_model(ModelKind::LandauB, 4, ModelParams::default()).unwrap(),
    ];
    for base in &bases {
        for eps in [0.0, 0.1, 0.2] {
            for seed in [1, 2, 3] {
                crypto_case(base, eps, seed, &mut tally);
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = tally.crypto_herm <= 1e-10
        && tally.eigen <= 1e-9
        && tally.frames <= 1e-9
        && tally.frame_forms <= 1e-9
        && tally.intertwine <= 1e-9
        && tally.degeneration <= 1e-12
        && elapsed < Duration::from_secs(10);
    Outcome {
        pass,
        detail: format!(
            "{} crypto runs: crypto-hermiticity {:.2e} (<= 1e-10), eigen-equations {:.2e}, frame identities {:.2e}, frame forms {:.2e}, intertwining {:.2e} (<= 1e-9), epsilon = 0 gap {:.2e} (<= 1e-12), {:.3} s (< 10 s)",
            tally.runs,
            tally.crypto_herm,
            tally.eigen,
            tally.frames,
            tally.frame_forms,
            tally.intertwine,
            tally.degeneration,
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut universal = 0.0f64;
    let mut conditional = 0.0f64;
    for _ in 0..200 {
        let d = rng.random_range(1..=64);
        let x = random_complex(&mut rng, d, d);
        let h1 = random_hermitian(&mut rng, d);
        let xd = x.adjoint();
        let n1 = &x * &xd;
        let n2 = &xd * &x;
        let h2 = &(&xd * &h1) * &x;
        universal = universal
            .max(rel((&(&n1 * &x) - &(&x * &n2)).fro_norm(), n1.fro_norm() * x.fro_norm()))
            .max(rel((&h2 - &h2.adjoint()).fro_norm(), h2.fro_norm()));
    }
    for _ in 0..200 {
        let d = rng.random_range(1..=64);
        let x = random_complex(&mut rng, d, d).scale_real(1.0 / (d as f64).sqrt());
        let xd = x.adjoint();
        let n1 = &x * &xd;
        // h1 = c0 + c1 N1 + c2 N1^2 commutes with N1 exactly in exact arithmetic
        let c: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let h1 = &(&CMat::identity(d).scale_real(c[0]) + &n1.scale_real(c[1])) + &(&n1 * &n1).scale_real(c[2]);
        let h1 = (&h1 + &h1.adjoint()).scale_real(0.5);
        let n2 = &xd * &x;
        let h2 = &(&xd * &h1) * &x;
        conditional = conditional
            .max(rel(
                (&(&h2 * &n2) - &(&n2 * &h2)).fro_norm(),
                h2.fro_norm() * n2.fro_norm(),
            ))
            .max(rel(
                (&(&(&h1 * &n1) * &x) - &(&x * &h2)).fro_norm(),
                h1.fro_norm() * n1.fro_norm() * x.fro_norm(),
            ));
    }
    Outcome {
        pass: universal <= 1e-12 && conditional <= 1e-10,
        detail: format!(
            "200 random instances: universal identities {universal:.3e} (<= 1e-12); 200 polynomial instances: conditional identities {conditional:.3e} (<= 1e-10)"
        ),
    }
}

fn criterion_9() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_intertwine");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut times = Vec::new();
    let mut codes = Vec::new();
    for d in &dirs {
        let start = Instant::now();
        let status = Command::new(bin)
            .args(["verify", "--all", "--out"])
            .arg(d.path())
            .output()
            .unwrap()
            .status;
        times.push(start.elapsed());
        codes.push(status.code());
    }
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut mismatched = Vec::new();
    let mut files = 0;
    for sc in intertwine::Scenario::ALL {
        let name = format!("{}.json", sc.name());
        let a = std::fs::read(dirs[0].path().join(&name)).unwrap_or_default();
        let b = std::fs::read(dirs[1].path().join(&name)).unwrap_or_default();
        let g = std::fs::read(golden.join(&name)).unwrap_or_default();
        files += 1;
        if a.is_empty() || a != b || a != g {
            mismatched.push(name);
        }
    }
    let slowest = times.iter().max().copied().unwrap_or_default();
    Outcome {
        pass: codes.iter().all(|c| *c == Some(0)) && slowest < Duration::from_secs(30) && mismatched.is_empty(),
        detail: format!(
            "`verify --all` exit codes {codes:?}, slowest run {:.3} s (< 30 s), {files} reports byte-identical across runs and to golden files, mismatches: {mismatched:?}",
            slowest.as_secs_f64()
        ),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("partner identities", criterion_1),
        ("eigenvalue product law", criterion_2),
        ("inverse map recovery", criterion_3),
        ("completeness rank sum", criterion_4),
        ("isospectral contrast", criterion_5),
        ("quon recurrence", criterion_6),
        ("crypto-hermitian suite", criterion_7),
        ("random identity sweeps", criterion_8),
        ("cli contract", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {} ({name}): {}", i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
