//! Dense complex linear algebra shared by the physics modules: the matrix
//! carrier, 2×2 Pauli algebra and the matrix exponential.

use faer::linalg::solvers::Solve;
use faer::{Mat, MatRef};
use num_complex::Complex64;

/// Dense square complex matrix carrying every Hamiltonian and propagator.
pub type ComplexMatrix = Mat<Complex64>;

/// Row-major 2×2 complex matrix for Bloch symbols.
pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub const IDENTITY2: Mat2 = [[ONE, ZERO], [ZERO, ONE]];
pub const SIGMA_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const SIGMA_Y: Mat2 = [[ZERO, Complex64::new(0.0, -1.0)], [I, ZERO]];
pub const SIGMA_Z: Mat2 = [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]];

pub fn mat2_scale(a: &Mat2, s: Complex64) -> Mat2 {
    [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]]
}

pub fn mat2_add(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

pub fn mat2_sub(a: &Mat2, b: &Mat2) -> Mat2 {
    mat2_add(a, &mat2_scale(b, -ONE))
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// Largest entry modulus.
pub fn mat2_max_abs(a: &Mat2) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues tr/2 ± √((a−d)²/4 + bc), principal square root; the `+`
/// root comes first.
pub fn mat2_eigenvalues(a: &Mat2) -> (Complex64, Complex64) {
    let half_trace = (a[0][0] + a[1][1]) * 0.5;
    let half_diff = (a[0][0] - a[1][1]) * 0.5;
    let root = (half_diff * half_diff + a[0][1] * a[1][0]).sqrt();
    (half_trace + root, half_trace - root)
}

pub fn mat2_to_matrix(a: &Mat2) -> ComplexMatrix {
    Mat::from_fn(2, 2, |i, j| a[i][j])
}

/// Operator 1-norm: largest absolute column sum.
pub fn one_norm(a: MatRef<'_, Complex64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn mat_vec(a: MatRef<'_, Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.ncols(), v.len());
    let mut out = vec![ZERO; a.nrows()];
    for (j, &vj) in v.iter().enumerate() {
        if vj == ZERO {
            continue;
        }
        let col = a.col(j);
        for (o, &aij) in out.iter_mut().zip(col.iter()) {
            *o += aij * vj;
        }
    }
    out
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ⟨a|b⟩ with the first argument conjugated.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn is_complex_symmetric(a: MatRef<'_, Complex64>) -> bool {
    let n = a.nrows();
    a.ncols() == n && (0..n).all(|i| (0..i).all(|j| a[(i, j)] == a[(j, i)]))
}

/// Hermitian part (A + A†)/2.
pub fn hermitian_part(a: MatRef<'_, Complex64>) -> ComplexMatrix {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

/// Anti-Hermitian part divided by i, (A − A†)/(2i); Hermitian.
pub fn imaginary_part(a: MatRef<'_, Complex64>) -> ComplexMatrix {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        (a[(i, j)] - a[(j, i)].conj()) * Complex64::new(0.0, -0.5)
    })
}

fn lin_comb(n: usize, terms: &[(f64, MatRef<'_, Complex64>)], identity: f64) -> ComplexMatrix {
    Mat::from_fn(n, n, |i, j| {
        let mut acc = if i == j { Complex64::new(identity, 0.0) } else { ZERO };
        for (c, m) in terms {
            acc += m[(i, j)] * *c;
        }
        acc
    })
}

// Padé coefficients and switching thresholds θ_m for the degree-m diagonal
// approximant (Higham's scaling and squaring).
const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

/// U and V of the low-degree approximants from precomputed even powers.
fn pade_low(a: MatRef<'_, Complex64>, powers: &[ComplexMatrix], b: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.nrows();
    let odd: Vec<(f64, MatRef<'_, Complex64>)> =
        powers.iter().enumerate().map(|(k, p)| (b[2 * k + 3], p.as_ref())).collect();
    let even: Vec<(f64, MatRef<'_, Complex64>)> =
        powers.iter().enumerate().map(|(k, p)| (b[2 * k + 2], p.as_ref())).collect();
    let inner = lin_comb(n, &odd, b[1]);
    let u = a * &inner;
    let v = lin_comb(n, &even, b[0]);
    (u, v)
}

/// e^A by Padé scaling and squaring. Never diagonalises, so it stays valid
/// at exceptional points.
pub fn expm(a: MatRef<'_, Complex64>) -> ComplexMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    let norm = one_norm(a);
    let a2 = a * a;

    for (m, theta) in THETA {
        if norm <= theta {
            let mut powers = vec![a2.clone()];
            while powers.len() < (m - 1) / 2 {
                let next = powers.last().unwrap() * &a2;
                powers.push(next);
            }
            let b: &[f64] = match m {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let (u, v) = pade_low(a, &powers, b);
            return solve_pade(&u, &v);
        }
    }

    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(s);
    let a1 = lin_comb(n, &[(scale, a)], 0.0);
    let a2 = lin_comb(n, &[(scale * scale, a2.as_ref())], 0.0);
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;
    let t_u = lin_comb(n, &[(b[13], a6.as_ref()), (b[11], a4.as_ref()), (b[9], a2.as_ref())], 0.0);
    let t_u = &a6 * &t_u;
    let inner_u = lin_comb(
        n,
        &[(1.0, t_u.as_ref()), (b[7], a6.as_ref()), (b[5], a4.as_ref()), (b[3], a2.as_ref())],
        b[1],
    );
    let u = &a1 * &inner_u;
    let t_v = lin_comb(n, &[(b[12], a6.as_ref()), (b[10], a4.as_ref()), (b[8], a2.as_ref())], 0.0);
    let t_v = &a6 * &t_v;
    let v = lin_comb(
        n,
        &[(1.0, t_v.as_ref()), (b[6], a6.as_ref()), (b[4], a4.as_ref()), (b[2], a2.as_ref())],
        b[0],
    );
    let mut r = solve_pade(&u, &v);
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// (V − U)⁻¹ (V + U).
fn solve_pade(u: &ComplexMatrix, v: &ComplexMatrix) -> ComplexMatrix {
    let p = v + u;
    let q = v - u;
    q.partial_piv_lu().solve(&p)
}
