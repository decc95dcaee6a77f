//! Seeded random tensor inputs.

use cfpinch_core::tensor::{self, Sym2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn lower(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        l[i * n + i] = 1.0 + 0.5 * rng.random::<f64>();
        for j in 0..i {
            l[i * n + j] = 0.3 * rng.random_range(-1.0..1.0);
        }
    }
    l
}

/// `A M Aᵀ` for square row-major `A`.
fn congruence(a: &[f64], m: &Sym2) -> Sym2 {
    let n = m.dim();
    Sym2::from_fn(n, |i, j| {
        let mut s = 0.0;
        for k in 0..n {
            for l in 0..n {
                s += a[i * n + k] * m.get(k, l) * a[j * n + l];
            }
        }
        s
    })
}

/// A metric `g = L Lᵀ` with its Cholesky-like factor `L`.
pub fn metric(n: usize, rng: &mut impl Rng) -> (Sym2, Vec<f64>) {
    let l = lower(n, rng);
    (congruence(&l, &Sym2::identity(n)), l)
}

/// Log-uniform magnitude in `[1e-2, 1e2]`.
pub fn magnitude(rng: &mut impl Rng) -> f64 {
    10f64.powf(rng.random_range(-2.0..2.0))
}

/// A `g`-trace-free symmetric tensor of random magnitude.
pub fn trace_free(g: &Sym2, rng: &mut impl Rng) -> Sym2 {
    let n = g.dim();
    let mut s = Sym2::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-1.0..1.0);
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    let tr = tensor::trace(g, &s).expect("same dimension");
    let e = &s - &g.scale(tr / n as f64);
    let norm = tensor::norm(g, &e).expect("positive definite");
    e.scale(magnitude(rng) / norm)
}

/// Orthogonal matrix as a product of random Givens rotations.
pub fn rotation(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    for p in 0..n {
        for r in p + 1..n {
            let (s, c) = rng.random_range(0.0..std::f64::consts::TAU).sin_cos();
            for k in 0..n {
                let (x, y) = (q[k * n + p], q[k * n + r]);
                q[k * n + p] = c * x - s * y;
                q[k * n + r] = s * x + c * y;
            }
        }
    }
    q
}

/// `E` whose eigenvalues relative to `g = L Lᵀ` are `λ` (`n-1` times) and
/// `-(n-1)λ`, in a random eigenframe.
pub fn pattern(l: &[f64], lambda: f64, rng: &mut impl Rng) -> Sym2 {
    let n = (l.len() as f64).sqrt() as usize;
    let mut d = vec![lambda; n];
    d[n - 1] = -(n as f64 - 1.0) * lambda;
    let q = rotation(n, rng);
    let inner = congruence(&q, &Sym2::from_diag(&d));
    congruence(l, &inner)
}
