//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line with
//! its measured errors and runtime; the test fails if any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use mahler::descent::{concentration_report, descend, fit_parallelogram, DescentOptions};
use mahler::functional::{
    check_concavity_bound, check_concavity_bound_symmetric, d2_mahler, d_mahler,
    localized_perturbation, mahler as grid_mahler, second_variation,
};
use mahler::polygon::{
    certify_nonminimal, fd_quadratic_form, make_random_parallelogram, make_random_symmetric,
    make_regular, nonsymmetric_mahler, project_to_critical, simple_deformation_hessian,
    PolygonSupport,
};
use mahler::polytope::{product_body, random_symmetric, PolytopeV};
use mahler::sampling::{
    random_half_perturbation, random_perturbation, random_smooth_support, random_window,
};
use mahler::support::{cell_measures, GridSupport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Mahler volume of a polygon from grid samples of its support function.
fn grid_oracle(p: &PolygonSupport, n: usize) -> f64 {
    grid_mahler(&p.sample(n).unwrap()).unwrap()
}

/// Random invertible map with condition number at most 50.
fn random_map(rng: &mut ChaCha8Rng) -> [[f64; 2]; 2] {
    let (a, b) = (rng.gen_range(0.0..PI), rng.gen_range(0.0..PI));
    let s1 = rng.gen_range(0.2..5.0);
    let s2 = s1 / rng.gen_range(1.0..50.0);
    let rot = |t: f64| [[t.cos(), -t.sin()], [t.sin(), t.cos()]];
    let (r, q) = (rot(a), rot(b));
    let d = [[s1, 0.0], [0.0, s2]];
    let mul = |x: [[f64; 2]; 2], y: [[f64; 2]; 2]| {
        [
            [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
            [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
        ]
    };
    mul(mul(r, d), q)
}

fn exact_square() -> Outcome {
    let q = make_regular(2, 1.0).unwrap();
    let m = q.mahler();
    let b = q.polar_area();
    let foc = q.foc_residual().unwrap().iter().map(|x| x.abs()).fold(0.0, f64::max);
    outcome(
        (m - 8.0).abs() <= 1e-12 && (b - 2.0).abs() <= 1e-12 && foc <= 1e-12,
        format!("|M-8| = {:.1e}, |B-2| = {:.1e}, foc = {foc:.1e}", (m - 8.0).abs(), (b - 2.0).abs()),
    )
}

fn disc_on_grid() -> Outcome {
    let h = GridSupport::constant(2048, 1.0).unwrap();
    let err = (grid_mahler(&h).unwrap() - PI * PI).abs();
    outcome(err <= 1e-6, format!("|M - pi^2| = {err:.1e}"))
}

fn hexagon_suite() -> Outcome {
    let hex = make_regular(3, 1.0).unwrap();
    let exact = (hex.mahler() - 9.0).abs();
    let oracle = (grid_oracle(&hex, 4096) - 9.0).abs();
    let foc = hex.foc_residual().unwrap().iter().map(|x| x.abs()).fold(0.0, f64::max);
    let cert = simple_deformation_hessian(&hex, 1).unwrap();
    let qf = (cert.quadratic_form + 2.0).abs();
    let fd = rel(fd_quadratic_form(&hex, 1, 1e-4), cert.quadratic_form);
    outcome(
        exact <= 1e-12 && oracle <= 5e-3 && foc <= 1e-12 && qf <= 1e-10 && fd <= 1e-6,
        format!(
            "|M-9| = {exact:.1e}, grid |M-9| = {oracle:.1e}, foc = {foc:.1e}, |QF+2| = {qf:.1e}, FD rel = {fd:.1e}"
        ),
    )
}

fn certificate_sweep() -> Outcome {
    let mut regular_ok = true;
    for pairs in 3..=12 {
        let p = make_regular(pairs, 1.0).unwrap();
        regular_ok &= matches!(certify_nonminimal(&p), Ok(Some(c)) if c.quadratic_form < 0.0);
    }
    let (mut certified, mut attempts, mut worst) = (0, 0u64, f64::NEG_INFINITY);
    let mut random_ok = true;
    while certified < 100 && attempts < 1000 {
        let seed = attempts;
        attempts += 1;
        let pairs = 3 + (seed % 6) as usize;
        let p = make_random_symmetric(pairs, seed).unwrap();
        let Ok(q) = project_to_critical(&p) else { continue };
        if q.m() < 6 {
            continue;
        }
        certified += 1;
        match certify_nonminimal(&q) {
            Ok(Some(c)) if c.quadratic_form < 0.0 => worst = worst.max(c.quadratic_form),
            _ => random_ok = false,
        }
    }
    let parallelograms_ok = (0..100).all(|seed| {
        let p = make_random_parallelogram(seed).unwrap();
        matches!(certify_nonminimal(&p), Ok(None))
    });
    outcome(
        regular_ok && random_ok && certified == 100 && parallelograms_ok,
        format!(
            "regular 6..24-gons negative: {regular_ok}; {certified}/100 random critical polygons \
             ({attempts} draws), all negative: {random_ok}, largest QF = {worst:.3e}; \
             parallelograms uncertified: {parallelograms_ok}"
        ),
    )
}

fn derivative_validation() -> Outcome {
    let (mut e1, mut e2, mut e3) = (0.0f64, 0.0f64, 0.0f64);
    for seed in 0..50 {
        let h = random_smooth_support(720, seed, false).unwrap();
        let v = random_perturbation(720, 1000 + seed).unwrap().scaled(0.1);
        let j = |t: f64| grid_mahler(&h.perturbed(&v, t).unwrap()).unwrap();
        let d1 = d_mahler(&h, &v).unwrap();
        let fd1 = (j(1e-5) - j(-1e-5)) / 2e-5;
        let d2 = d2_mahler(&h, &v).unwrap();
        let fd2 = (j(1e-4) - 2.0 * j(0.0) + j(-1e-4)) / 1e-8;
        e1 = e1.max((d1 - fd1).abs() / (1.0 + d1.abs()));
        e2 = e2.max((d2 - fd2).abs() / (1.0 + d2.abs()));
        e3 = e3.max(second_variation(&h, &v).unwrap().middle_term_defect());
    }
    outcome(
        e1 <= 1e-6 && e2 <= 1e-4 && e3 <= 1e-6,
        format!("dJ err = {e1:.1e}, d2J err = {e2:.1e}, middle-term defect = {e3:.1e}"),
    )
}

fn concavity() -> Outcome {
    let (mut violations, mut min_margin) = (0, f64::INFINITY);
    for seed in 0..200 {
        let h = random_smooth_support(720, seed, false).unwrap();
        let v = random_perturbation(720, 5000 + seed).unwrap();
        let c = check_concavity_bound(&h, &v).unwrap();
        violations += usize::from(!c.holds);
        min_margin = min_margin.min(c.rhs - c.lhs);

        let hs = random_smooth_support(720, 10_000 + seed, true).unwrap();
        let w = random_half_perturbation(720, 15_000 + seed).unwrap();
        let c = check_concavity_bound_symmetric(&hs, &w).unwrap();
        violations += usize::from(!c.holds);
        min_margin = min_margin.min(c.rhs - c.lhs);
    }
    outcome(
        violations == 0,
        format!("{violations} violations in 400 checks (200 general, 200 symmetric), min margin = {min_margin:.3e}"),
    )
}

fn localized() -> Outcome {
    let (mut slope, mut leak, mut poincare) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    let mut failures = 0;
    for seed in 0..50 {
        let h = random_smooth_support(720, 20_000 + seed, false).unwrap();
        let mu = h.curvature_measure(h.default_atom_threshold()).unwrap();
        let (window, sub) = random_window(seed);
        let Ok(lp) = localized_perturbation(&mu, window, &sub) else {
            failures += 1;
            continue;
        };
        slope = slope.max(lp.slope_at_start.abs()).max(lp.slope_at_end.abs());
        let cells = cell_measures(lp.perturbation.values());
        let carried: Vec<usize> = lp.masses.iter().map(|m| m.cell).collect();
        let outside = cells
            .iter()
            .enumerate()
            .filter(|(j, _)| !carried.contains(j))
            .map(|(_, x)| x.abs())
            .fold(0.0, f64::max);
        leak = leak.max(outside);
        let norms = lp.perturbation.norms();
        poincare = poincare.max(norms.linf - (lp.length.sqrt() * norms.h1_seminorm + 1e-9));
    }
    outcome(
        failures == 0 && slope <= 1e-8 && leak <= 1e-6 && poincare <= 0.0,
        format!(
            "constructed 50 - {failures}; max slope = {slope:.1e}, max measure off support = {leak:.1e}, \
             max (|v|_inf - sqrt(eps)|v|_H1) = {poincare:.3e}"
        ),
    )
}

fn descent_evidence() -> Outcome {
    let h0 = GridSupport::constant(720, 1.0).unwrap();
    let opts = DescentOptions {
        initial_kick: 1e-2,
        seed: 1,
        ..DescentOptions::default()
    };
    let trace = descend(&h0, &opts).unwrap();
    let j = trace.final_value();
    let (topk, _) = concentration_report(&trace.final_body, 4).unwrap();
    let fit = fit_parallelogram(&trace.final_body).unwrap();
    outcome(
        j <= 8.1 && topk >= 0.99 && fit.normalized_distance <= 0.05,
        format!(
            "J = {j:.6}, topk(4) = {topk:.6}, fit distance = {:.2e}, {} iterations ({})",
            fit.normalized_distance,
            trace.records.len(),
            trace.stop_reason.as_str()
        ),
    )
}

fn bounds_scan() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut dual, mut affine) = (0.0f64, 0.0f64);
    for seed in 0..100 {
        let p = make_random_symmetric(2 + (seed % 9) as usize, 30_000 + seed).unwrap();
        let m = p.mahler();
        lo = lo.min(m);
        hi = hi.max(m);
        dual = dual.max(rel(p.polar().unwrap().mahler(), m));
        affine = affine.max(rel(p.linear_image(random_map(&mut rng)).unwrap().mahler(), m));
    }
    outcome(
        lo >= 8.0 - 1e-9 && hi <= PI * PI && dual <= 1e-10 && affine <= 1e-8,
        format!("M in [{lo:.12}, {hi:.12}], duality err = {dual:.1e}, affine err = {affine:.1e}"),
    )
}

fn three_d_suite() -> Outcome {
    let cube = PolytopeV::cube(3, 1.0).unwrap();
    let mc = (cube.mahler().unwrap() - 32.0 / 3.0).abs();
    let seg = PolytopeV::cube(1, 1.0).unwrap();
    let o2 = PolytopeV::cross_polytope(2, 1.0).unwrap();
    let mp = (product_body(&seg, &o2).unwrap().mahler().unwrap() - 32.0 / 3.0).abs();
    let (mut gap, mut least) = (f64::INFINITY, f64::INFINITY);
    for seed in 0..50 {
        let p = random_symmetric(3, 3 + (seed % 18) as usize, 40_000 + seed).unwrap();
        gap = gap.min(p.kuperberg_gap().unwrap());
        least = least.min(p.mahler().unwrap());
    }
    let conjecture = least >= 32.0 / 3.0 - 1e-9;
    outcome(
        mc <= 1e-9 && mp <= 1e-9 && gap >= -1e-9 && conjecture,
        format!(
            "|M(cube)-32/3| = {mc:.1e}, |M(Q1 x O2)-32/3| = {mp:.1e}, min Kuperberg gap = {gap:.4}, \
             min M = {least:.6} (>= 32/3: {conjecture})"
        ),
    )
}

/// Minimum of the translated polar area over a grid of interior points.
fn translation_grid_oracle(p: &PolygonSupport, steps: usize) -> (f64, [f64; 2]) {
    let v = p.to_vertices();
    let (mut best, mut arg) = (f64::INFINITY, [0.0, 0.0]);
    for i in 1..steps {
        for k in 1..steps - i {
            let (s, t) = (i as f64 / steps as f64, k as f64 / steps as f64);
            let z = [
                v[0][0] + s * (v[1][0] - v[0][0]) + t * (v[2][0] - v[0][0]),
                v[0][1] + s * (v[1][1] - v[0][1]) + t * (v[2][1] - v[0][1]),
            ];
            let b = p.translated(z).unwrap().polar_area();
            if b < best {
                best = b;
                arg = z;
            }
        }
    }
    (p.area() * best, arg)
}

fn nonsymmetric_triangle() -> Outcome {
    let tri = PolygonSupport::from_vertices(&[[-1.0, -0.5], [2.0, -1.0], [0.5, 2.0]]).unwrap();
    let centroid = [0.5, 0.5 / 3.0];
    let (oracle, _) = translation_grid_oracle(&tri, 600);
    let oracle_err = (oracle - 6.75).abs();
    let (value, s) = nonsymmetric_mahler(&tri).unwrap();
    let dz = (s.point[0] - centroid[0]).hypot(s.point[1] - centroid[1]);
    let err = (value - 6.75).abs();
    outcome(
        oracle_err <= 1e-4 && dz <= 1e-6 && err <= 1e-8,
        format!("grid oracle P = {oracle:.8} (|.-27/4| = {oracle_err:.1e}), |z - centroid| = {dz:.1e}, |P-27/4| = {err:.1e}"),
    )
}

fn main() {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        ("1 exact square", Duration::from_millis(1), exact_square),
        ("2 disc on grid", Duration::from_millis(10), disc_on_grid),
        ("3 hexagon suite", Duration::from_millis(100), hexagon_suite),
        ("4 certificate sweep", Duration::from_secs(30), certificate_sweep),
        ("5 derivative validation", Duration::from_secs(10), derivative_validation),
        ("6 concavity", Duration::from_secs(20), concavity),
        ("7 localized perturbations", Duration::from_secs(5), localized),
        ("8 descent evidence", Duration::from_secs(60), descent_evidence),
        ("9 bounds scan", Duration::from_secs(10), bounds_scan),
        ("10 3-D suite", Duration::from_secs(30), three_d_suite),
        ("11 nonsymmetric triangle", Duration::from_secs(5), nonsymmetric_triangle),
    ];
    let mut failed = Vec::new();
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let pass = o.pass && in_time;
        println!(
            "criterion {name}: {} [{:.3?} of {:?}] {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed,
            budget,
            o.detail
        );
        if !pass {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
