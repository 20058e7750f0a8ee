//! Random inputs and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use kleincount::counting::Region;
use kleincount::formats::circle_csv;
use kleincount::mobius::{
    beta, busemann, circle_from_center_radius, circle_through, hyperbolic_area, line_from_normal_offset, rat, reflect_in,
    sample_points, Circle, Motion, Rational,
};
use kleincount::packing::{descartes_validate, enumerate_orbit, strip_apollonian_spec, EnumConfig};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
}

pub fn random_circle(rng: &mut ChaCha8Rng) -> Circle<f64> {
    if rng.gen_bool(0.1) {
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        line_from_normal_offset(Complex64::new(a.cos(), a.sin()), rng.gen_range(-2.0..2.0)).unwrap()
    } else {
        circle_from_center_radius(random_complex(rng, 3.0), rng.gen_range(0.05..3.0)).unwrap()
    }
}

pub fn random_motion(rng: &mut ChaCha8Rng) -> Motion<f64> {
    loop {
        let m = [[random_complex(rng, 2.0), random_complex(rng, 2.0)], [random_complex(rng, 2.0), random_complex(rng, 2.0)]];
        let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if d.norm() > 0.1 {
            return Motion::from_matrix(m, rng.gen_bool(0.5)).unwrap();
        }
    }
}

/// Agreement of two circles in center/radius (or normal/offset), relative
/// to their size.
pub fn same_circle(a: &Circle<f64>, b: &Circle<f64>, tol: f64) -> bool {
    match (a.center(), a.radius(), b.center(), b.radius()) {
        (Some(za), Some(ra), Some(zb), Some(rb)) => {
            let scale = 1.0 + za.norm().max(ra);
            (za - zb).norm() <= tol * scale && (ra - rb).abs() <= tol * scale
        }
        (None, None, None, None) => {
            let (na, nb) = (a.normal().unwrap(), b.normal().unwrap());
            let (da, db) = (a.offset().unwrap(), b.offset().unwrap());
            let scale = 1.0 + da.abs();
            (na - nb).norm() <= tol && (da - db).abs() <= tol * scale
        }
        _ => false,
    }
}

pub fn q_deviation(g: &Motion<f64>, c: &Circle<f64>) -> f64 {
    (g.apply_circle(c).quadratic_form() - 1.0).abs()
}

/// Image of `c` rebuilt from the images of three of its points.
pub fn three_point_image(g: &Motion<f64>, c: &Circle<f64>) -> Circle<f64> {
    let pts = sample_points(c).map(|p| g.apply_point(&p));
    circle_through(pts).unwrap()
}

pub fn three_point_agrees(g: &Motion<f64>, c: &Circle<f64>) -> bool {
    same_circle(&g.apply_circle(c), &three_point_image(g, c), 1e-9)
}

pub fn float_involution_holds(m: &Circle<f64>, c: &Circle<f64>) -> bool {
    same_circle(&reflect_in(m, &reflect_in(m, c)), c, 1e-10)
}

pub fn random_rational_circle(rng: &mut ChaCha8Rng) -> Circle<Rational> {
    let x = rat(rng.gen_range(-30..30), rng.gen_range(1..8));
    let y = rat(rng.gen_range(-30..30), rng.gen_range(1..8));
    let r = rat(rng.gen_range(1..30), rng.gen_range(1..8));
    Circle::with_center_radius(x, y, r).unwrap()
}

pub fn exact_involution_holds(m: &Circle<Rational>, c: &Circle<Rational>) -> bool {
    reflect_in(m, &reflect_in(m, c)) == *c
}

/// Returns `Some(agrees)` for a random disk in the upper half-plane, or
/// `None` when either side of the criterion falls inside the neutral band.
pub fn area_criterion_case(rng: &mut ChaCha8Rng, band: f64) -> Option<bool> {
    let y: f64 = 10f64.powf(rng.gen_range(-2.0..1.0));
    let r = y * rng.gen_range(1e-4..0.9999);
    let x = rng.gen_range(-5.0..5.0);
    let t = 10f64.powf(rng.gen_range(-6.0..3.0));
    let c = circle_from_center_radius(Complex64::new(x, y), r).unwrap();
    let area = hyperbolic_area(&c).unwrap();
    let lhs = area - t;
    let rhs = r - y * beta(t).unwrap();
    if lhs.abs() <= band * t.max(1.0) || rhs.abs() <= band * y {
        return None;
    }
    Some((lhs > 0.0) == (rhs > 0.0))
}

/// Hyperbolic distance in upper half-space, written out independently.
fn dist(z: Complex64, h: f64, w: Complex64, k: f64) -> f64 {
    let num = (z - w).norm_sqr() + (h - k).powi(2);
    (1.0 + num / (2.0 * h * k)).acosh()
}

/// `d(ξ_t, p + r j) − d(ξ_t, z + j)` along the ray `ξ_t = z + e^{−t} j`.
pub fn busemann_oracle(z: Complex64, p: Complex64, r: f64, t: f64) -> f64 {
    let h = (-t).exp();
    dist(z, h, p, r) - dist(z, h, z, 1.0)
}

pub fn busemann_error(rng: &mut ChaCha8Rng) -> f64 {
    let z = random_complex(rng, 2.0);
    let p = random_complex(rng, 2.0);
    let r = rng.gen_range(0.1..3.0);
    (busemann(z, p, r).unwrap() - busemann_oracle(z, p, r, 20.0)).abs()
}

/// Circles of the strip packing with curvature ≤ `max_curv` whose center
/// lies in `{|Re z| ≤ 1, 0 < Im z ≤ 2}`, plus the two lines, found by
/// Descartes-quadruple swaps `b' = 2(b₁+b₂+b₃) − b₄` and the complex
/// analogue for `b·z` (lines carry their outward normal).
pub fn descartes_strip_count(max_curv: i64) -> usize {
    type Node = (i64, Complex64);
    let key = |n: &Node| (n.0, (n.1.re * 1e6).round() as i64, (n.1.im * 1e6).round() as i64);
    let root: [Node; 4] = [
        (0, Complex64::new(-1.0, 0.0)),
        (0, Complex64::new(1.0, 0.0)),
        (1, Complex64::new(0.0, 0.0)),
        (1, Complex64::new(0.0, 2.0)),
    ];
    let quad_key = |q: &[Node; 4]| {
        let mut k: Vec<_> = q.iter().map(key).collect();
        k.sort();
        k
    };
    let mut seen_quads = HashSet::new();
    let mut circles = HashSet::new();
    seen_quads.insert(quad_key(&root));
    for n in &root {
        circles.insert(key(n));
    }
    let mut queue = VecDeque::from([root]);
    while let Some(q) = queue.pop_front() {
        for i in 0..4 {
            let b: i64 = 2 * (0..4).filter(|&j| j != i).map(|j| q[j].0).sum::<i64>() - q[i].0;
            let w: Complex64 = 2.0 * (0..4).filter(|&j| j != i).map(|j| q[j].1).sum::<Complex64>() - q[i].1;
            if b < q[i].0 || b > max_curv || b == 0 {
                continue;
            }
            let y = w.im / b as f64;
            if !(-2.5..=4.5).contains(&y) {
                continue;
            }
            let mut next = q;
            next[i] = (b, w);
            if seen_quads.insert(quad_key(&next)) {
                circles.insert(key(&next[i]));
                queue.push_back(next);
            }
        }
    }
    circles
        .iter()
        .filter(|&&(b, x, y)| {
            if b == 0 {
                return true;
            }
            let (cx, cy) = (x as f64 * 1e-6 / b as f64, y as f64 * 1e-6 / b as f64);
            cx.abs() <= 1.0 + 1e-9 && cy > 1e-9 && cy <= 2.0 + 1e-9
        })
        .count()
}

/// The same count from the orbit enumeration.
pub fn enumerated_strip_count(max_curv: i64) -> usize {
    let spec = strip_apollonian_spec::<Rational>().unwrap();
    let set = enumerate_orbit(&spec, &EnumConfig::new(max_curv as f64 + 0.5, Region::rect(-1.0, 0.0, 1.0, 2.0).unwrap()))
        .unwrap();
    set.circles
        .iter()
        .filter(|c| match c.center_exact() {
            None => true,
            Some((_, y)) => c.curvature() <= rat(max_curv, 1) && y > rat(0, 1) && y <= rat(2, 1),
        })
        .count()
}

/// Canonical CSV of the strip enumeration run on a pool of `threads` workers.
pub fn strip_csv_with_threads(threads: usize, max_curv: f64) -> String {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let spec = strip_apollonian_spec::<Rational>().unwrap();
        let set = enumerate_orbit(&spec, &EnumConfig::new(max_curv, Region::rect(-1.0, 0.0, 1.0, 2.0).unwrap())).unwrap();
        circle_csv(&set.circles).unwrap()
    })
}

pub fn descartes_max_residual(max_curv: f64) -> (usize, f64) {
    let spec = strip_apollonian_spec::<Rational>().unwrap();
    let set = enumerate_orbit(&spec, &EnumConfig::new(max_curv, Region::rect(-1.0, 0.0, 1.0, 2.0).unwrap())).unwrap();
    let report = descartes_validate(&set, max_curv);
    (report.quadruples, report.max_residual)
}
