#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nalgebra::{Complex, DMatrix, DVector};
use qprior::born::DensityOperator;
use qprior::hilbert::{ComplexMatrix, HermitianOperator, C64};
use qprior::io::fmt17;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn qprior() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qprior"));
    c.env_remove("QPRIOR_THREADS");
    c
}

pub fn run(args: &[&str]) -> Output {
    qprior().args(args).output().expect("spawn qprior")
}

pub fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

pub fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

/// Header `x1..xp,<response>`, then one row per sample.
pub fn write_csv(dir: &Path, name: &str, x: &DMatrix<f64>, y: &DVector<f64>, response: &str) -> PathBuf {
    let mut s: String = (1..=x.ncols()).map(|c| format!("x{c},")).collect();
    s.push_str(response);
    s.push('\n');
    for r in 0..x.nrows() {
        for c in 0..x.ncols() {
            s.push_str(&fmt17(x[(r, c)]));
            s.push(',');
        }
        s.push_str(&fmt17(y[r]));
        s.push('\n');
    }
    write(dir, name, &s)
}

pub fn floats(v: &serde_json::Value) -> Vec<f64> {
    v.as_array()
        .expect("array")
        .iter()
        .map(|x| x.as_f64().expect("number"))
        .collect()
}

pub fn complex_gaussian(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<C64> {
    DMatrix::from_fn(r, c, |_, _| {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianOperator {
    let g = complex_gaussian(rng, n, n);
    let h = (&g + g.adjoint()) * Complex::new(0.5, 0.0);
    HermitianOperator::new(ComplexMatrix::new(h).unwrap()).unwrap()
}

pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::new(complex_gaussian(rng, n, n).qr().q()).unwrap()
}

/// Eigenvalues drawn from a few integer levels, rotated by a random unitary.
pub fn degenerate_operator(rng: &mut ChaCha8Rng, n: usize) -> HermitianOperator {
    let levels = rng.random_range(1..=n);
    let u = random_unitary(rng, n).into_matrix();
    let d = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex::new(rng.random_range(0..levels) as f64, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let a = &u * d * u.adjoint();
    let a = (&a + a.adjoint()) * Complex::new(0.5, 0.0);
    HermitianOperator::new(ComplexMatrix::new(a).unwrap()).unwrap()
}

pub fn random_density(rng: &mut ChaCha8Rng, n: usize) -> DensityOperator {
    let rank = rng.random_range(1..=n);
    let b = complex_gaussian(rng, n, rank);
    let m = &b * b.adjoint();
    let m = &m / Complex::new(m.trace().re, 0.0);
    let m = (&m + m.adjoint()) * Complex::new(0.5, 0.0);
    DensityOperator::new(ComplexMatrix::new(m).unwrap()).unwrap()
}

pub fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0) + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}

pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn compose(g: &[usize], h: &[usize]) -> Vec<usize> {
    h.iter().map(|&x| g[x]).collect()
}

fn random_cycle(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let len = rng.random_range(1..=n);
    let points: Vec<usize> = rand::seq::index::sample(rng, n, len).into_vec();
    let mut p: Vec<usize> = (0..n).collect();
    for (i, &x) in points.iter().enumerate() {
        p[x] = points[(i + 1) % len];
    }
    p
}

/// Closure of `gens`, or `None` once it exceeds `cap` elements.
pub fn close_under_composition(n: usize, gens: &[Vec<usize>], cap: usize) -> Option<Vec<Vec<usize>>> {
    let mut elements = vec![(0..n).collect::<Vec<usize>>()];
    let mut i = 0;
    while i < elements.len() {
        for g in gens {
            let next = compose(g, &elements[i]);
            if !elements.contains(&next) {
                if elements.len() == cap {
                    return None;
                }
                elements.push(next);
            }
        }
        i += 1;
    }
    Some(elements)
}

pub fn random_small_group(rng: &mut ChaCha8Rng, n: usize, max_order: usize) -> Vec<Vec<usize>> {
    loop {
        let k = rng.random_range(1..=2);
        let gens: Vec<Vec<usize>> = (0..k).map(|_| random_cycle(rng, n)).collect();
        if let Some(g) = close_under_composition(n, &gens, max_order) {
            return g;
        }
    }
}

pub fn permissible_by_triple_loop(elements: &[Vec<usize>], z: &[usize]) -> bool {
    let n = z.len();
    for g in elements {
        for x1 in 0..n {
            for x2 in 0..n {
                if z[x1] == z[x2] && z[g[x1]] != z[g[x2]] {
                    return false;
                }
            }
        }
    }
    true
}

/// Finest permissible coarsening of the level sets of `z`.
pub fn permissible_coarsening(elements: &[Vec<usize>], z: &[usize]) -> Vec<usize> {
    let n = z.len();
    let mut label = z.to_vec();
    loop {
        let mut changed = false;
        for g in elements {
            for x1 in 0..n {
                for x2 in 0..n {
                    if label[x1] == label[x2] && label[g[x1]] != label[g[x2]] {
                        let (keep, drop) = (label[g[x1]], label[g[x2]]);
                        for l in label.iter_mut() {
                            if *l == drop {
                                *l = keep;
                            }
                        }
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return label;
        }
    }
}
