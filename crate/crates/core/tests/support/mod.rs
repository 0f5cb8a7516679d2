//! Test-only helpers: a dense uniform trapezoid oracle written independently
//! of the adaptive engine, golden-data I/O, and seeded random cycle specs.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use nalgebra::Matrix4;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const KB: f64 = 0.086_173_332_62;
pub const LAMBDA: f64 = 30.0;
pub const PANELS: usize = 1 << 20;

pub fn golden_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/oracle_golden.json")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Positive bands, recomputed here rather than borrowed from the library.
pub fn bands(k: f64, u: f64) -> [f64; 2] {
    let a = u.abs();
    [
        (k * k + (a - LAMBDA) * (a - LAMBDA)).sqrt(),
        (k * k + (a + LAMBDA) * (a + LAMBDA)).sqrt(),
    ]
}

pub fn occ(e: f64, t: f64) -> f64 {
    1.0 / ((e / (KB * t)).exp() + 1.0)
}

pub fn binary_entropy(f: f64) -> f64 {
    let a = if f > 0.0 { f * f.ln() } else { 0.0 };
    let b = if f < 1.0 {
        (1.0 - f) * (-f).ln_1p()
    } else {
        0.0
    };
    -(a + b)
}

/// Uniform trapezoid on `[0, cutoff]` with `PANELS` panels.
pub fn trapezoid<F: Fn(f64) -> f64>(g: F, cutoff: f64) -> f64 {
    let h = cutoff / PANELS as f64;
    let mut sum = 0.5 * (g(0.0) + g(cutoff));
    let mut comp = 0.0;
    for i in 1..PANELS {
        // Kahan summation
        let y = g(i as f64 * h) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum * h
}

pub fn cutoff(temps: &[f64], fields: &[f64]) -> f64 {
    let t = temps.iter().cloned().fold(0.0, f64::max);
    let u = fields.iter().map(|u| u.abs()).fold(0.0, f64::max);
    60.0 * (KB * t).max(LAMBDA + u)
}

pub fn oracle_internal_energy(t: f64, u: f64) -> f64 {
    let raw = trapezoid(
        |k| {
            let e = bands(k, u);
            k * (e[0] * occ(e[0], t) + e[1] * occ(e[1], t))
        },
        cutoff(&[t], &[u]),
    );
    2.0 / PI * raw
}

pub fn oracle_entropy(t: f64, u: f64) -> f64 {
    let raw = trapezoid(
        |k| {
            let e = bands(k, u);
            k * (binary_entropy(occ(e[0], t)) + binary_entropy(occ(e[1], t)))
        },
        cutoff(&[t], &[u]),
    );
    2.0 * KB / PI * raw
}

pub fn oracle_grand_term(t: f64, u: f64) -> f64 {
    let b = 1.0 / (KB * t);
    let raw = trapezoid(
        |k| {
            let e = bands(k, u);
            k * ((-b * e[0]).exp().ln_1p() + (-b * e[1]).exp().ln_1p())
        },
        cutoff(&[t], &[u]),
    );
    2.0 * KB * t / PI * raw
}

/// Otto heats `(q_in, q_out)`.
pub fn oracle_otto(t_hot: f64, t_cold: f64, u_hot: f64, u_cold: f64) -> (f64, f64) {
    let kc = cutoff(&[t_hot, t_cold], &[u_hot, u_cold]);
    let q_in = trapezoid(
        |k| {
            let (eh, ec) = (bands(k, u_hot), bands(k, u_cold));
            k * (0..2)
                .map(|n| eh[n] * (occ(eh[n], t_hot) - occ(ec[n], t_cold)))
                .sum::<f64>()
        },
        kc,
    );
    let q_out = trapezoid(
        |k| {
            let (eh, ec) = (bands(k, u_hot), bands(k, u_cold));
            k * (0..2)
                .map(|n| ec[n] * (occ(ec[n], t_cold) - occ(eh[n], t_hot)))
                .sum::<f64>()
        },
        kc,
    );
    (2.0 / PI * q_in, 2.0 / PI * q_out)
}

/// Stirling work through the partition functions at the four corners.
pub fn oracle_stirling_work(t_hot: f64, t_cold: f64, u_hot: f64, u_cold: f64) -> f64 {
    let kc = cutoff(&[t_hot, t_cold], &[u_hot, u_cold]);
    let ln_z = |e: f64, t: f64| KB * t * (-e / (KB * t)).exp().ln_1p();
    let raw = trapezoid(
        |k| {
            let (eh, ec) = (bands(k, u_hot), bands(k, u_cold));
            k * (0..2)
                .map(|n| {
                    ln_z(ec[n], t_hot) - ln_z(eh[n], t_hot) + ln_z(eh[n], t_cold)
                        - ln_z(ec[n], t_cold)
                })
                .sum::<f64>()
        },
        kc,
    );
    2.0 / PI * raw
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct SpecRecord {
    pub t_hot: f64,
    pub t_cold: f64,
    pub u_hot: f64,
    pub u_cold: f64,
}

/// Densities at one `(T, u)` point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct PointRecord {
    pub t: f64,
    pub u: f64,
    pub internal_energy: f64,
    pub entropy: f64,
    pub grand_term: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CycleRecord {
    pub spec: SpecRecord,
    /// Corners A, B, C, D of the Stirling rectangle.
    pub corners: [PointRecord; 4],
    pub otto_q_in: f64,
    pub otto_q_out: f64,
    pub stirling_work: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Golden {
    pub description: String,
    pub panels: usize,
    /// Named reference points used by unit-level checks.
    pub points: Vec<PointRecord>,
    pub cycles: Vec<CycleRecord>,
}

pub fn point(t: f64, u: f64) -> PointRecord {
    PointRecord {
        t,
        u,
        internal_energy: oracle_internal_energy(t, u),
        entropy: oracle_entropy(t, u),
        grand_term: oracle_grand_term(t, u),
    }
}

pub fn cycle_record(s: SpecRecord) -> CycleRecord {
    let (q_in, q_out) = oracle_otto(s.t_hot, s.t_cold, s.u_hot, s.u_cold);
    CycleRecord {
        spec: s,
        corners: [
            point(s.t_hot, s.u_hot),
            point(s.t_hot, s.u_cold),
            point(s.t_cold, s.u_cold),
            point(s.t_cold, s.u_hot),
        ],
        otto_q_in: q_in,
        otto_q_out: q_out,
        stirling_work: oracle_stirling_work(s.t_hot, s.t_cold, s.u_hot, s.u_cold),
    }
}

/// Ten random cycles with T in [20, 400] K and u in [0, 150] meV, followed by
/// the fixed reference cycles used elsewhere in the suite.
pub fn golden_specs() -> Vec<SpecRecord> {
    let mut r = rng(0x7e57_0a11);
    let mut specs: Vec<SpecRecord> = (0..10)
        .map(|_| SpecRecord {
            t_hot: r.random_range(20.0..400.0),
            t_cold: r.random_range(20.0..400.0),
            u_hot: r.random_range(0.0..150.0),
            u_cold: r.random_range(0.0..150.0),
        })
        .collect();
    for (t_hot, t_cold, u_hot, u_cold) in [
        (40.0, 30.0, 33.0, 30.0),
        (300.0, 150.0, 90.0, 60.0),
        (40.0, 30.0, 40.0, 30.0),
    ] {
        specs.push(SpecRecord {
            t_hot,
            t_cold,
            u_hot,
            u_cold,
        });
    }
    specs
}

pub fn golden_points() -> Vec<(f64, f64)> {
    vec![(300.0, 40.0), (300.0, 0.0), (120.0, 35.0), (30.0, 30.0)]
}

pub fn build_golden() -> Golden {
    Golden {
        description: "dense uniform trapezoid, K = 60 max(kB T, lambda + |u|), lambda = 30 meV"
            .into(),
        panels: PANELS,
        points: golden_points()
            .into_iter()
            .map(|(t, u)| point(t, u))
            .collect(),
        cycles: golden_specs().into_iter().map(cycle_record).collect(),
    }
}

pub fn load_golden() -> Golden {
    let text = std::fs::read_to_string(golden_path()).expect("golden file present");
    serde_json::from_str(&text).expect("golden file parses")
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Eigenvalues of a 4×4 Hermitian matrix via its real 8×8 embedding
/// `[[A, −B], [B, A]]`, whose spectrum is that of `A + iB` doubled.
pub fn hermitian_spectrum(h: &Matrix4<Complex64>) -> Vec<f64> {
    let mut m = nalgebra::DMatrix::<f64>::zeros(8, 8);
    for i in 0..4 {
        for j in 0..4 {
            let z = h[(i, j)];
            m[(i, j)] = z.re;
            m[(i + 4, j + 4)] = z.re;
            m[(i, j + 4)] = -z.im;
            m[(i + 4, j)] = z.im;
        }
    }
    let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().cloned().collect();
    ev.sort_by(f64::total_cmp);
    ev.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
}
