//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vvmf::ahol::{
    ahol_decompose, constant_one, lower_op, raise_op, raise_times, raise_with_weight,
    upper_factorial,
};
use vvmf::exactnum::{rat, rat_int};
use vvmf::forms::{check_t_consistency, delta_form, eisenstein};
use vvmf::harness::{e12_rho3, verify_counts, verify_example32, verify_thm11, Status};
use vvmf::hecke::{cocycle, delta_cosets, hecke_form, hecke_rep, pi_m, unit_embedding};
use vvmf::sl2;
use vvmf::{AholForm, CycNum, Matrix, Rational, Rep, RepRegistry};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn run(n: usize, title: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let ok = o.ok && took <= limit;
    let timing = if took > limit {
        format!(", over the {limit:?} limit")
    } else {
        String::new()
    };
    println!(
        "criterion {n}: {} - {title} ({}; {:.2?}{timing})",
        if ok { "PASS" } else { "FAIL" },
        o.detail,
        took
    );
    ok
}

fn golden() -> Outcome {
    match verify_example32(3) {
        Ok(r) => {
            let cases: Vec<_> = r
                .cases
                .iter()
                .filter(|c| c.name.starts_with("trivial component"))
                .collect();
            let ok = cases.len() == 3 && cases.iter().all(|c| c.status == Status::Pass);
            let obs: Vec<&str> = cases.iter().map(|c| c.observed.as_str()).collect();
            outcome(ok, obs.join(", "))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn decomposition() -> Outcome {
    match verify_example32(3) {
        Ok(r) => {
            let cases: Vec<_> = r
                .cases
                .iter()
                .filter(|c| c.name.starts_with("hom_dim") || c.name.starts_with("intertwiner"))
                .collect();
            let ok = cases.len() == 9 && cases.iter().all(|c| c.status == Status::Pass);
            let dims: Vec<&str> = cases
                .iter()
                .filter(|c| c.name.starts_with("hom_dim"))
                .map(|c| c.observed.as_str())
                .collect();
            outcome(
                ok,
                format!("hom dims ({}), 5 intertwiners checked", dims.join(", ")),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn counts() -> Outcome {
    match verify_counts() {
        Ok(r) => outcome(
            r.passed(),
            format!("{} count/distinctness cases", r.cases.len()),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

/// `a_{pn} + p^{11} a_{n/p}` computed directly from the coefficients of `Δ`.
fn classical_tp_delta(p: i64, n_max: i64) -> Vec<Rational> {
    let d = delta_form((p * n_max + 1) as u64);
    let a = |n: i64| d.components()[0].coeff_int(n).to_rational().unwrap();
    (0..n_max)
        .map(|n| {
            let mut c = a(p * n);
            if n % p == 0 {
                c += a(n / p) * Rational::from_integer(num_traits::pow(p.into(), 11));
            }
            c
        })
        .collect()
}

fn hecke_recovery() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for (p, tau) in [(2i64, -24i64), (3, 252)] {
        let d = delta_form(6 * p as u64);
        let tp = hecke_form(p as u64, &d).unwrap();
        let row = Matrix::from_rows(vec![unit_embedding(p as u64).unwrap()]).unwrap();
        let g = tp.apply_matrix(&row, &Rep::trivial()).unwrap();
        let scale = Rational::new(1.into(), num_traits::pow(p.into(), 5));
        let oracle = classical_tp_delta(p, 6);
        let d6 = delta_form(6);
        for n in 0..6 {
            let got = g.components()[0].coeff_int(n).to_rational().unwrap();
            let via_oracle = &oracle[n as usize] * &scale;
            let via_tau =
                d6.components()[0].coeff_int(n).to_rational().unwrap() * rat(tau, 1) * &scale;
            ok &= got == via_oracle && got == via_tau;
        }
        notes.push(format!("p={p}: {}", g.components()[0].coeff_int(1)));
    }
    outcome(
        ok,
        format!("q-coefficient of the contraction {}", notes.join(", ")),
    )
}

fn cusp_generation() -> Outcome {
    match verify_thm11(12, 4, 8, &[1, 2], 5) {
        Ok(r) => {
            let c = r.case("Delta in span");
            let ok = c.is_some_and(|c| c.status == Status::Pass);
            outcome(
                ok,
                c.map(|c| c.diagnostics.clone().unwrap_or_default())
                    .unwrap_or_default(),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn pi_compatibility() -> Outcome {
    let one = Rep::trivial();
    let mut ok = true;
    for m in [2u64, 3] {
        let e4 = eisenstein(4, 4 * m).unwrap();
        let e6 = eisenstein(6, 4 * m).unwrap();
        let lhs_src = hecke_form(m, &e4)
            .unwrap()
            .tensor(&hecke_form(m, &e6).unwrap());
        let target = hecke_rep(m, &one.tensor(&one)).unwrap().rep;
        let lhs = lhs_src
            .apply_matrix(&pi_m(&one, &one, m).unwrap(), &target)
            .unwrap();
        let rhs = hecke_form(m, &e4.mul(&e6)).unwrap();
        let p = rat_int(4);
        ok &= lhs.truncate(&p).components() == rhs.truncate(&p).components();
        ok &= Rep::intertwines(&pi_m(&one, &one, m).unwrap(), lhs_src.rep(), &target);
    }
    outcome(ok, "M = 2, 3 to precision 4")
}

fn differential_suite() -> Vec<(String, bool)> {
    let mut lines = Vec::new();

    let mut uf = true;
    for l in [4, 6, 8] {
        let mut f = constant_one(l, 4);
        for t in 1..=3usize {
            f = raise_op(&f);
            let top = f.layer(t).unwrap()[0].coeff_int(0).to_rational().unwrap();
            uf &= f.depth() == t && top == Rational::from_integer(upper_factorial(l, t));
            uf &= (0..t).all(|r| f.layer(r).unwrap()[0].is_zero());
        }
    }
    lines.push((
        "upper factorial R^t(1) for l' in {4,6,8}, t <= 3".to_string(),
        uf,
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut fixed = true;
    let mut covariant = true;
    let mut recon = true;
    for i in 0..20 {
        let k = [12, 14, 16][i % 3];
        let depth = i % 3;
        let (f, parts) = common::random_ahol(&mut rng, k, depth, 5);
        for (r, layer) in f.graded().iter().enumerate() {
            let piece = layer_form(&f, r, layer.to_vec());
            let lr = lower_op(&raise_with_weight(&piece, k));
            let rl = raise_with_weight(&lower_op(&piece), k);
            let comm = lr.sub(&rl.with_weight(k)).unwrap();
            fixed &= comm
                == piece
                    .scale(&CycNum::from_int(2 * r as i64 - k))
                    .truncate(&comm.prec());
            let lr = lower_op(&raise_op(&piece));
            let rl = raise_op(&lower_op(&piece));
            let comm = lr.sub(&rl).unwrap();
            covariant &= comm == piece.scale(&CycNum::from_int(-k)).truncate(&comm.prec());
        }
        let got = ahol_decompose(&f).unwrap();
        let mut back = AholForm::zero(k, Rep::trivial(), f.prec());
        for (t, h) in got.iter().enumerate() {
            back = back.add(&raise_times(h, t)).unwrap();
        }
        recon &= back == f.truncate(&back.prec());
        recon &= got.len() == parts.len()
            && got
                .iter()
                .zip(&parts)
                .all(|(a, b)| a.components() == b.components());
    }
    lines.push((
        "commutator (2r - k) with fixed weight parameter, 20 random forms".to_string(),
        fixed,
    ));
    lines.push((
        "commutator -k for weight-covariant raising, 20 random forms".to_string(),
        covariant,
    ));
    lines.push((
        "depth decomposition reconstruction, 20 random forms".to_string(),
        recon,
    ));
    lines
}

/// `g Y^r` as a form of the same weight and type as `f`.
fn layer_form(f: &AholForm, r: usize, layer: Vec<vvmf::QExp>) -> AholForm {
    let zero = vec![vvmf::QExp::zero(f.prec()); f.dim()];
    let mut graded = vec![zero; r];
    graded.push(layer);
    AholForm::new(f.weight(), f.rep().clone(), graded).unwrap()
}

trait WithWeight {
    fn with_weight(self, k: i64) -> AholForm;
}

impl WithWeight for AholForm {
    fn with_weight(self, k: i64) -> AholForm {
        AholForm::new(k, self.rep().clone(), self.graded().to_vec()).unwrap()
    }
}

fn invariant_suites() -> Outcome {
    let reg = RepRegistry::bundled();
    let mut reps_ok = 0;
    let mut reps_total = 0;
    for m in 1..=6u64 {
        for r in reg.iter() {
            reps_total += 1;
            if hecke_rep(m, r).is_ok_and(|h| h.rep.validate().passed()) {
                reps_ok += 1;
            }
        }
    }

    let mut forms: Vec<AholForm> = vec![
        eisenstein(4, 6).unwrap(),
        eisenstein(12, 6).unwrap(),
        delta_form(6),
    ];
    forms.push(e12_rho3(3).unwrap());
    for m in 2..=4 {
        forms.push(hecke_form(m, &eisenstein(4, 4 * m).unwrap()).unwrap());
        forms.push(hecke_form(m, &delta_form(4 * m)).unwrap());
    }
    forms.push(raise_op(
        &hecke_form(3, &eisenstein(6, 9).unwrap()).unwrap(),
    ));
    let e = e12_rho3(3).unwrap();
    forms.push(e.tensor(&e));
    let t_ok = forms.iter().filter(|f| check_t_consistency(f)).count();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut cocycle_ok = 0;
    for i in 0..50 {
        let big_m = [2i64, 3, 4][i % 3];
        let cosets = delta_cosets(1, big_m).unwrap();
        let m = &cosets[i % cosets.len()];
        let g1 = common::random_sl2(&mut rng, 6);
        let g2 = common::random_sl2(&mut rng, 6);
        let (i12, _) = cocycle(m, &sl2::mul(&g1, &g2)).unwrap();
        let (i1, m1) = cocycle(m, &g1).unwrap();
        let (i2, _) = cocycle(&m1, &g2).unwrap();
        if i12 == sl2::mul(&i1, &i2) {
            cocycle_ok += 1;
        }
    }
    let ok = reps_ok == reps_total && t_ok == forms.len() && cocycle_ok == 50;
    outcome(
        ok,
        format!(
            "relations {reps_ok}/{reps_total} T_M reps, T-consistency {t_ok}/{} forms, cocycle {cocycle_ok}/50",
            forms.len()
        ),
    )
}

fn main() -> ExitCode {
    let mut all = true;
    all &= run(
        1,
        "golden trivial-type coefficients of the E12,rho3 square",
        Duration::from_secs(10),
        golden,
    );
    all &= run(
        2,
        "hom dimensions and displayed intertwiners",
        Duration::from_secs(5),
        decomposition,
    );
    all &= run(
        3,
        "coset counts in genus 1 and 2",
        Duration::from_secs(60),
        counts,
    );
    all &= run(
        4,
        "unit contraction of T_p Delta",
        Duration::from_secs(60),
        hecke_recovery,
    );
    all &= run(
        5,
        "Delta in the span of E4 x E8 and T2E4 x T2E8",
        Duration::from_secs(60),
        cusp_generation,
    );
    all &= run(
        6,
        "pi_M compatibility with T_M",
        Duration::from_secs(60),
        pi_compatibility,
    );

    let start = Instant::now();
    let lines = differential_suite();
    let took = start.elapsed();
    let ok7 = lines.iter().all(|(_, ok)| *ok);
    println!(
        "criterion 7: {} - differential operators ({took:.2?})",
        if ok7 { "PASS" } else { "FAIL" }
    );
    for (title, ok) in &lines {
        println!("    {} {title}", if *ok { "ok  " } else { "FAIL" });
    }
    all &= ok7;

    all &= run(
        8,
        "invariant suites",
        Duration::from_secs(300),
        invariant_suites,
    );

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
