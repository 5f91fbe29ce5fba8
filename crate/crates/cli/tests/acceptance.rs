//! Acceptance suite: one PASS/FAIL line per criterion, with the numbers behind
//! each verdict. Exits nonzero if any criterion fails.

use gme_cli::analysis::{demo, find_threshold, Setup};
use gme_cli::CliError;
use gme_core::bounds::{commutator_bound, min_variance_sum};
use gme_core::criteria::{full_separability_tripartite, gme_criterion, spin_gme_criterion};
use gme_core::observables::{pauli_family, sigma_x, sigma_y, sigma_z};
use gme_core::states::{fully_separable_threshold, random_biseparable, random_density, random_pure};
use gme_core::tensor::{c, identity, kron, validate_density, variance, ComplexMatrix};
use gme_core::{
    enumerate_bipartitions, BoundProvider, ConstantBounds, DensityMatrix, ObservableFamily,
    SpinConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Outcome {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }

    fn with(mut self, details: Vec<String>) -> Self {
        self.details = details;
        self
    }
}

type Curve = fn(f64) -> f64;
type Check = fn() -> Outcome;

fn sqrt0(x: f64) -> f64 {
    x.max(0.0).sqrt()
}

fn closed_w3(q: f64) -> f64 {
    -q * q - 14.0 / 3.0 * q + 35.0 / 9.0
        - (sqrt0(1.0 / 9.0 - q * q / 9.0) - sqrt0(-4.0 / 9.0 * q * q - 10.0 / 3.0 * q + 34.0 / 9.0)).powi(2)
}

fn closed_w4(q: f64) -> f64 {
    -4.0 * q * q + 3.0 - (sqrt0(-q * q + 2.0 * q) - sqrt0(-q * q - 2.0 * q + 3.0)).powi(2)
}

fn closed_w5(q: f64) -> f64 {
    -9.0 * q * q + 0.8 * q + 91.0 / 25.0
        - (sqrt0(-81.0 / 25.0 * q * q - 0.4 * q + 91.0 / 25.0) - sqrt0(-36.0 / 25.0 * q * q + 2.0 * q)).powi(2)
}

fn closed_w6(q: f64) -> f64 {
    -16.0 * q * q + 6.0 * q + 77.0 / 9.0
        - (sqrt0(-100.0 / 9.0 * q * q + 4.0 * q + 64.0 / 9.0) - sqrt0(4.0 / 9.0 - 4.0 / 9.0 * q * q)).powi(2)
}

fn closed_qutrit(x: f64) -> f64 {
    25.0 / 9.0 - 4.0 * x
        - (sqrt0(-x * x / 9.0 - 3.0 * x + 28.0 / 9.0) - sqrt0(-x * x / 9.0 + x / 3.0 + 7.0 / 3.0)).powi(2)
}

/// Sign change of a closed form, by bisection on [0, 1].
fn closed_form_root(f: Curve) -> Option<f64> {
    let (mut lo, mut hi) = (0.0, 1.0);
    if f(lo).signum() == f(hi).signum() {
        return None;
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == f(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

const CURVE_POINTS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Per-q breakdown of the minimizing cut.
fn breakdown(setup: &Setup, expected: Curve) -> Vec<String> {
    CURVE_POINTS
        .iter()
        .map(|&q| match setup.evaluate(q) {
            Ok(r) => {
                let a = r.argmin_partition();
                format!(
                    "q={q:.2}: f={:.6} expected={:.6} F={:.6} argmin {} U=({:.6}, {:.6}) V=({:.6}, {:.6}) W={:.6}",
                    r.f,
                    expected(q),
                    r.f_total,
                    a.partition,
                    a.u_left,
                    a.u_right,
                    a.v_left,
                    a.v_right,
                    a.w
                )
            }
            Err(e) => format!("q={q:.2}: error {e}"),
        })
        .collect()
}

/// The single cut whose `F - total` tracks the closed form most closely.
fn closest_single_cut(setup: &Setup, expected: Curve) -> String {
    let reports: Vec<_> = CURVE_POINTS.iter().map(|&q| setup.evaluate(q).unwrap()).collect();
    let n_cuts = reports[0].partition_bounds.len();
    let (idx, dev) = (0..n_cuts)
        .map(|i| {
            let dev = CURVE_POINTS
                .iter()
                .zip(&reports)
                .map(|(&q, r)| (r.f_total - r.partition_bounds[i].total - expected(q)).abs())
                .fold(0.0, f64::max);
            (i, dev)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let pb = &reports[4].partition_bounds[idx];
    format!(
        "closest single cut to the closed form: {} (max deviation {:.3e}; U at q=1: {:.6}, {:.6})",
        pb.partition, dev, pb.u_left, pb.u_right
    )
}

fn criterion_1() -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = gme_cli::run(["gme", "threshold", "--demo", "w3"], &mut out, &mut err);
    if code != 0 {
        return Outcome::new(false, format!("exit {code}: {}", String::from_utf8_lossy(&err)));
    }
    let json: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let q = json["q_star"].as_f64().unwrap();
    Outcome::new((q - 0.512).abs() <= 0.002, format!("q_star = {q:.6} (target 0.512 ± 0.002)"))
}

fn threshold_line(name: &str, target: f64, expected: Curve) -> (bool, String, Vec<String>) {
    let setup = demo(name).unwrap();
    let crossing = closed_form_root(expected).map_or("none".into(), |q| format!("{q:.5}"));
    match find_threshold(&setup, 0.0, 1.0) {
        Ok(t) => {
            let pass = (t.q_star - target).abs() <= 0.002;
            let line = format!("{name}: q_star = {:.5} (target {target} ± 0.002; closed form crosses at {crossing})", t.q_star);
            let mut details = Vec::new();
            if !pass {
                let r = setup.evaluate(t.q_star).unwrap();
                let a = r.argmin_partition();
                details.push(format!(
                    "{name} at q_star: argmin {} U=({:.6}, {:.6})",
                    a.partition, a.u_left, a.u_right
                ));
            }
            (pass, line, details)
        }
        Err(CliError::Core(gme_core::Error::NoSignChange { f_lo, f_hi, .. })) => (
            false,
            format!("{name}: no sign change, f(0) = {f_lo:.6}, f(1) = {f_hi:.6} (target {target}; closed form crosses at {crossing})"),
            Vec::new(),
        ),
        Err(e) => (false, format!("{name}: error {e}"), Vec::new()),
    }
}

fn criterion_2() -> Outcome {
    let cases: [(&str, f64, Curve); 3] =
        [("w4", 0.857, closed_w4), ("w5", 0.651, closed_w5), ("w6", 0.46, closed_w6)];
    let mut pass = true;
    let mut lines = Vec::new();
    let mut details = Vec::new();
    for (name, target, expected) in cases {
        let (ok, line, d) = threshold_line(name, target, expected);
        pass &= ok;
        lines.push(line);
        details.extend(d);
    }
    Outcome::new(pass, lines.join("; ")).with(details)
}

fn criterion_3() -> Outcome {
    let (pass, line, details) = threshold_line("qutrit3", 0.632, closed_qutrit);
    Outcome::new(pass, line).with(details)
}

fn criterion_4() -> Outcome {
    let cases: [(&str, Curve); 5] = [
        ("w3", closed_w3),
        ("w4", closed_w4),
        ("w5", closed_w5),
        ("w6", closed_w6),
        ("qutrit3", closed_qutrit),
    ];
    let mut pass = true;
    let mut summary = Vec::new();
    let mut details = Vec::new();
    for (name, expected) in cases {
        let setup = demo(name).unwrap();
        let dev = CURVE_POINTS
            .iter()
            .map(|&q| (setup.evaluate(q).unwrap().f - expected(q)).abs())
            .fold(0.0, f64::max);
        let ok = dev < 1e-6;
        pass &= ok;
        summary.push(format!("{name} max|Δf| = {dev:.3e}"));
        if !ok {
            details.push(format!("{name} breakdown:"));
            details.extend(breakdown(&setup, expected).into_iter().map(|l| format!("  {l}")));
            details.push(format!("  {}", closest_single_cut(&setup, expected)));
        }
    }
    Outcome::new(pass, summary.join(", ")).with(details)
}

fn criterion_5() -> Outcome {
    let table = [(3, 0.17798), (4, 0.09260), (5, 0.04709), (6, 0.022901)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (n, want) in table {
        let got = fully_separable_threshold(n).unwrap();
        let ok = (got - want).abs() <= 1e-5;
        pass &= ok;
        parts.push(format!(
            "n={n}: {got:.7} vs {want} (|Δ| = {:.2e}{})",
            (got - want).abs(),
            if ok { "" } else { ", outside 1e-5" }
        ));
    }
    Outcome::new(pass, parts.join("; "))
}

fn random_signs(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; 3]> {
    (0..n)
        .map(|_| [0; 3].map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }))
        .collect()
}

/// Mixture of biseparable states across two or three randomly chosen cuts.
fn mixed_biseparable(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let dims = vec![2; n];
    let cuts = enumerate_bipartitions(n).unwrap();
    let k = rng.random_range(2..=3);
    let mut rho = random_biseparable(&dims, &cuts[rng.random_range(0..cuts.len())], 2, rng.random()).unwrap();
    for i in 1..k {
        let next = random_biseparable(&dims, &cuts[rng.random_range(0..cuts.len())], 2, rng.random()).unwrap();
        // Equal-weight running average over the k components.
        rho = rho.mix(i as f64 / (i + 1) as f64, &next).unwrap();
    }
    rho
}

fn fully_separable_3q(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let terms = rng.random_range(1..=4);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut m = ComplexMatrix::zeros(8, 8);
    for w in weights {
        let mut f = || random_pure(&[2], rng.random()).projector();
        let (a, b, cc) = (f(), f(), f());
        m += kron(&kron(&a, &b), &cc) * c(w / total, 0.0);
    }
    validate_density(m, &[2, 2, 2]).unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_gme = f64::INFINITY;
    let mut gme_violations = 0;
    let mut errors = Vec::new();
    for i in 0..500 {
        let n = if i % 2 == 0 { 3 } else { 4 };
        let rho = mixed_biseparable(&mut rng, n);
        let fam = pauli_family(&random_signs(&mut rng, n)).unwrap();
        let providers = [
            BoundProvider::zero(),
            BoundProvider::constant(ConstantBounds::per_site(2.0, 0.0, n).unwrap()),
        ];
        for p in &providers {
            match gme_criterion(&rho, &fam, p) {
                Ok(r) => {
                    worst_gme = worst_gme.min(r.f);
                    if r.f < -1e-6 {
                        gme_violations += 1;
                    }
                }
                Err(e) => errors.push(format!("state {i} ({}): {e}", p.tag())),
            }
        }
    }

    let mut worst_sep = f64::INFINITY;
    let mut sep_violations = 0;
    let mut worst_product = f64::INFINITY;
    let mut worst_label = String::new();
    for _ in 0..200 {
        let rho = fully_separable_3q(&mut rng);
        let fam = pauli_family(&random_signs(&mut rng, 3)).unwrap();
        let provider = BoundProvider::constant(ConstantBounds::per_site(2.0, 0.0, 3).unwrap());
        let report = full_separability_tripartite(&rho, &fam, &provider).unwrap();
        let min = report.values.iter().map(|v| v.value).fold(f64::INFINITY, f64::min);
        if min < worst_sep {
            worst_sep = min;
            worst_label = report
                .values
                .iter()
                .min_by(|a, b| a.value.total_cmp(&b.value))
                .map(|v| v.label.clone())
                .unwrap();
        }
        if min < -1e-6 {
            sep_violations += 1;
        }
        let purity = (rho.matrix() * rho.matrix()).trace().re;
        if (purity - 1.0).abs() < 1e-9 {
            worst_product = worst_product.min(min);
        }
    }

    let pass = gme_violations == 0 && errors.is_empty() && sep_violations == 0;
    let summary = format!(
        "biseparable: {gme_violations}/1000 evaluations below -1e-6 (worst f = {worst_gme:.6}, {} errors); \
         fully separable: {sep_violations}/200 states violate an inequality (worst {worst_label} = {worst_sep:.6}; \
         pure products alone: worst {worst_product:.6})",
        errors.len()
    );
    Outcome::new(pass, summary).with(errors.into_iter().take(5).collect())
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    (&g + g.adjoint()) * c(2.0, 0.0)
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let shapes: [&[usize]; 4] = [&[2], &[3], &[2, 2], &[2, 3]];
    let mut worst = f64::INFINITY;
    for i in 0..500 {
        let dims = shapes[i % shapes.len()];
        let d: usize = dims.iter().product();
        let r1 = random_density(dims, rng.random());
        let r2 = random_density(dims, rng.random());
        let p: f64 = rng.random();
        let op = random_hermitian(&mut rng, d);
        let mixed = r1.mix(p, &r2).unwrap();
        let gap = variance(&op, &mixed).unwrap()
            - (p * variance(&op, &r1).unwrap() + (1.0 - p) * variance(&op, &r2).unwrap());
        worst = worst.min(gap);
    }
    Outcome::new(worst >= -1e-10, format!("min of Δ²(mix) - mix of Δ² over 500 cases = {worst:.3e}"))
}

fn criterion_8() -> Outcome {
    let paulis = [sigma_x(), sigma_y(), sigma_z()];
    let single = min_variance_sum(&paulis, 2, 8, 1).unwrap().value;
    let collective: Vec<ComplexMatrix> = paulis
        .iter()
        .map(|s| kron(s, &identity(2)) + kron(&identity(2), s))
        .collect();
    let singlet = min_variance_sum(&collective, 4, 16, 2).unwrap().value;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_gap = f64::INFINITY;
    for i in 0..500 {
        let d = 2 + i % 4;
        let x = random_hermitian(&mut rng, d);
        let y = random_hermitian(&mut rng, d);
        let rho = random_density(&[d], rng.random());
        let gap = variance(&x, &rho).unwrap() + variance(&y, &rho).unwrap() - commutator_bound(&x, &y, &rho).unwrap();
        worst_gap = worst_gap.min(gap);
    }
    let counts_ok = (2..=8).all(|n| enumerate_bipartitions(n).unwrap().len() == (1 << (n - 1)) - 1);

    let pass = (single - 2.0).abs() <= 1e-6 && singlet.abs() <= 1e-6 && worst_gap >= -1e-9 && counts_ok;
    Outcome::new(
        pass,
        format!(
            "Pauli triple min = {single:.9}; singlet collective min = {singlet:.3e}; \
             min(Δ²x+Δ²y-|⟨[x,y]⟩|) over 500 = {worst_gap:.3e}; partition counts n=2..8 {}",
            if counts_ok { "ok" } else { "wrong" }
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let mut pm = || if rng.random::<bool>() { 1.0 } else { -1.0 };
        let h: Vec<f64> = (0..3).map(|_| pm()).collect();
        let g: Vec<f64> = (0..3).map(|_| pm()).collect();
        let cfg = SpinConfig::new(h.clone(), g.clone()).unwrap();
        let per_site = (0..3)
            .map(|i| vec![sigma_x() * c(0.5 * h[i], 0.0), sigma_y() * c(0.5 * g[i], 0.0)])
            .collect();
        let fam = ObservableFamily::new(vec![2, 2, 2], per_site).unwrap();
        let rho = random_density(&[2, 2, 2], rng.random());
        let spin = spin_gme_criterion(&rho, &[1, 1, 1], &cfg).unwrap();
        let pauli = gme_criterion(&rho, &fam, &BoundProvider::commutator()).unwrap();
        worst = worst.max((spin.f - pauli.f).abs());
        for (a, b) in spin.partition_bounds.iter().zip(&pauli.partition_bounds) {
            worst = worst.max((a.total - b.total).abs());
        }
    }
    Outcome::new(worst <= 1e-9, format!("max difference over 50 states = {worst:.3e}"))
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("W3 threshold", criterion_1),
        ("W4/W5/W6 thresholds", criterion_2),
        ("3-qutrit threshold", criterion_3),
        ("closed-form curve match", criterion_4),
        ("full-separability table", criterion_5),
        ("soundness suite", criterion_6),
        ("mixing inequality", criterion_7),
        ("oracle equivalences", criterion_8),
        ("path equivalence", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {name}: {}", i + 1, outcome.summary);
        for d in &outcome.details {
            println!("       {d}");
        }
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
