//! Brute-force reference implementations shared by the integration tests.
//! Nothing here touches the library's linear algebra.

#![allow(dead_code)]

use num_complex::Complex64 as C;

pub type Dense = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// (3/4) e^{ir}/r³ [(1−cos²θ) r² + i(1−3cos²θ) r − (1−3cos²θ)].
pub fn hop(r: f64, theta: f64) -> C {
    let cc = theta.cos().powi(2);
    let (a, b) = (1.0 - cc, 1.0 - 3.0 * cc);
    C::from_polar(0.75 / (r * r * r), r) * c(a * r * r - b, b * r)
}

/// Green's tensor contraction p·𝐆·p · 3π written out from the textbook
/// near/intermediate/far-field form.
pub fn tensor_hop(sep: [f64; 3], p: [f64; 3]) -> C {
    let r = sep.iter().map(|x| x * x).sum::<f64>().sqrt();
    let u: Vec<f64> = sep.iter().map(|x| x / r).collect();
    let pu: f64 = p.iter().zip(&u).map(|(a, b)| a * b).sum();
    let pp: f64 = p.iter().map(|a| a * a).sum();
    let i = c(0.0, 1.0);
    let pref = C::from_polar(1.0 / (4.0 * std::f64::consts::PI * r), r);
    let t1 = 1.0 + i / r - 1.0 / (r * r);
    let t2 = -1.0 - 3.0 * i / r + 3.0 / (r * r);
    pref * (t1 * pp + t2 * pu * pu) * (3.0 * std::f64::consts::PI)
}

/// Two-band chain by explicit summation: −G(|i−j|d) off the diagonal,
/// ±h alternating from +h, optional −i/2 on-site decay.
pub fn dense_chain(n: usize, d: f64, theta: f64, h: f64, onsite: bool) -> Dense {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        let s = if i % 2 == 0 { h } else { -h };
                        c(s, if onsite { -0.5 } else { 0.0 })
                    } else {
                        -hop(i.abs_diff(j) as f64 * d, theta)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn matvec(a: &Dense, v: &[C]) -> Vec<C> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Characteristic polynomial coefficients, lowest degree first, by the
/// Faddeev–LeVerrier recursion.
pub fn charpoly(a: &Dense) -> Vec<C> {
    let n = a.len();
    let mut coeffs = vec![c(0.0, 0.0); n + 1];
    coeffs[n] = c(1.0, 0.0);
    let mut m = vec![vec![c(0.0, 0.0); n]; n];
    for k in 1..=n {
        let am = matmul(a, &m);
        for i in 0..n {
            for j in 0..n {
                m[i][j] = am[i][j] + if i == j { coeffs[n - k + 1] } else { c(0.0, 0.0) };
            }
        }
        let am = matmul(a, &m);
        let tr: C = (0..n).map(|i| am[i][i]).sum();
        coeffs[n - k] = -tr / k as f64;
    }
    coeffs
}

fn horner(coeffs: &[C], z: C) -> (C, C) {
    let mut p = c(0.0, 0.0);
    let mut dp = c(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All roots of a monic polynomial by Durand–Kerner, polished by Newton.
pub fn poly_roots(coeffs: &[C]) -> Vec<C> {
    let n = coeffs.len() - 1;
    let radius = 1.0 + coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut roots: Vec<C> = (0..n)
        .map(|k| C::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let (p, _) = horner(coeffs, roots[i]);
            let mut denom = c(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = p / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..5 {
            let (p, dp) = horner(coeffs, *r);
            if dp.norm() > 0.0 {
                *r -= p / dp;
            }
        }
    }
    roots
}

/// Solves A x = b by Gaussian elimination with partial pivoting.
pub fn solve(a: &Dense, b: &[C]) -> Vec<C> {
    let n = a.len();
    let mut m: Vec<Vec<C>> = a.iter().zip(b).map(|(r, &bi)| {
        let mut r = r.clone();
        r.push(bi);
        r
    }).collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm())).unwrap();
        m.swap(col, piv);
        for row in (col + 1)..n {
            let f = m[row][col] / m[col][col];
            for k in col..=n {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
        }
    }
    let mut x = vec![c(0.0, 0.0); n];
    for row in (0..n).rev() {
        let s: C = ((row + 1)..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (m[row][n] - s) / m[row][row];
    }
    x
}

/// Right eigenvector for an isolated eigenvalue by inverse iteration.
pub fn eigenvector(a: &Dense, lambda: C) -> Vec<C> {
    let n = a.len();
    let shift = lambda + c(1e-10, 1e-10);
    let shifted: Dense = (0..n)
        .map(|i| (0..n).map(|j| a[i][j] - if i == j { shift } else { c(0.0, 0.0) }).collect())
        .collect();
    let mut v: Vec<C> = (0..n).map(|i| c(1.0 + 0.1 * i as f64, 0.3)).collect();
    for _ in 0..4 {
        v = solve(&shifted, &v);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.iter_mut().for_each(|z| *z /= norm);
    }
    v
}

/// e^{−iHt} v as a Taylor series over sub-steps with ‖H‖ dt ≤ 1/2.
pub fn taylor_propagate(a: &Dense, v: &[C], t: f64) -> Vec<C> {
    let norm: f64 = a.iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let steps = ((norm * t / 0.5).ceil() as usize).max(1);
    let dt = t / steps as f64;
    let mut out = v.to_vec();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for k in 1..40 {
            term = matvec(a, &term).into_iter().map(|z| z * c(0.0, -dt) / k as f64).collect();
            for (x, y) in acc.iter_mut().zip(&term) {
                *x += y;
            }
        }
        out = acc;
    }
    out
}

/// F(x, 0) = −2 Re (Im H · X)_xx with X = ∫₀^∞ ψψ† dt evaluated through the
/// eigen-expansion ∫₀^∞ e^{−i(λ_i − λ̄_j)t} dt = 1/(i(λ_i − λ̄_j)).
pub fn escape_oracle(a: &Dense, psi: &[C]) -> Vec<f64> {
    let n = a.len();
    let lambdas = poly_roots(&charpoly(a));
    let vecs: Vec<Vec<C>> = lambdas.iter().map(|&l| eigenvector(a, l)).collect();
    let v: Dense = (0..n).map(|r| (0..n).map(|col| vecs[col][r]).collect()).collect();
    let coef = solve(&v, psi);
    let mut x = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for j in 0..n {
            let w = coef[i] * coef[j].conj() / (c(0.0, 1.0) * (lambdas[i] - lambdas[j].conj()));
            for r in 0..n {
                for s in 0..n {
                    x[r][s] += w * vecs[i][r] * vecs[j][s].conj();
                }
            }
        }
    }
    let im_h: Dense = (0..n)
        .map(|i| (0..n).map(|j| (a[i][j] - a[j][i].conj()) * c(0.0, -0.5)).collect())
        .collect();
    (0..n)
        .map(|p| -2.0 * (0..n).map(|k| im_h[p][k] * x[k][p]).sum::<C>().re)
        .collect()
}

/// Im G̃_d(k) = Σ_{n≠0} ½ sinc(|n|d) e^{−iknd} at the magic angle by Poisson
/// summation: (π/2d) · #{m : |k + 2πm/d| < 1} − ½.
pub fn poisson_rectangle(k: f64, d: f64) -> f64 {
    let period = 2.0 * std::f64::consts::PI / d;
    let count = (-50..=50).filter(|&m| (k + m as f64 * period).abs() < 1.0).count();
    std::f64::consts::PI / (2.0 * d) * count as f64 - 0.5
}
