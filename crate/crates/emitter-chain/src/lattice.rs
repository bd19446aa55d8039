//! Polylogarithms on the unit circle, Li_p(e^{iφ}) = Σ_{n≥1} e^{inφ}/n^p,
//! which are the building blocks of every lattice sum of the dipole hopping.
//!
//! The series converge at best conditionally. A compensated partial sum over
//! n < N is completed by the Euler–Boole expansion of the tail
//!
//!   Σ_{n≥N} zⁿ f(n) = z^N [ f(N)/(1−z) + Σ_{j≥1} Li_{−j}(z) f⁽ʲ⁾(N)/j! ],
//!
//! which is asymptotic in 1/(N|1−z|). At z = 1 the Euler–Maclaurin formula
//! takes over.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Truncation cap for the explicit part of any lattice sum.
pub const MAX_TERMS: usize = 10_000_000;

const MIN_TERMS: usize = 64;
const TAIL_ORDER: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSum {
    pub value: Complex64,
    /// Number of explicitly summed terms before the tail expansion.
    pub terms: usize,
    pub achieved_tolerance: f64,
}

/// Neumaier-compensated accumulator.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Reduce φ to (−π, π].
fn reduce_phase(phi: f64) -> f64 {
    let r = phi.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Coefficients in w = 1/(1−z) of Li_{−j}(z) for j = 0..=order.
/// Li₀ = w − 1 and Li_{−j−1} = (w² − w) d/dw Li_{−j}.
fn negative_order_polys(order: usize) -> Vec<Vec<f64>> {
    let mut polys = vec![vec![-1.0, 1.0]];
    for j in 0..order {
        let prev = &polys[j];
        let mut next = vec![0.0; prev.len() + 1];
        for (m, &c) in prev.iter().enumerate().skip(1) {
            let dc = m as f64 * c;
            next[m + 1] += dc;
            next[m] -= dc;
        }
        polys.push(next);
    }
    polys
}

fn eval_poly(coeffs: &[f64], w: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c)
}

/// Σ_{n=1}^{count} e^{inφ}/n^p with compensated accumulation.
fn partial_sum(phi: f64, p: u32, count: usize) -> Complex64 {
    let mut re = Compensated::default();
    let mut im = Compensated::default();
    let p = p as i32;
    for n in 1..=count {
        let nf = n as f64;
        let (s, c) = (nf * phi).sin_cos();
        let w = nf.powi(-p);
        re.add(c * w);
        im.add(s * w);
    }
    Complex64::new(re.value(), im.value())
}

/// Σ_{n≥1} n^{−p}, p ≥ 2, or the harmonic-type partial sum up to `MAX_TERMS`
/// for p = 1, via Euler–Maclaurin.
fn sum_at_one(p: u32) -> (f64, f64) {
    // Bernoulli numbers B₂ … B₁₂.
    const B: [f64; 6] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
    ];
    let n0 = 32usize;
    let pf = p as f64;
    let head = partial_sum(0.0, p, n0 - 1).re;
    let n = n0 as f64;
    if p == 1 {
        // Partial sum up to MAX_TERMS: H_M = H_{N−1} + Σ_{n=N}^{M} 1/n.
        let m = MAX_TERMS as f64;
        let tail = (m / n).ln() + 0.5 / n + 0.5 / m + (1.0 / (12.0 * n * n) - 1.0 / (12.0 * m * m))
            - (1.0 / (120.0 * n.powi(4)) - 1.0 / (120.0 * m.powi(4)))
            + 1.0 / (252.0 * n.powi(6));
        return (head + tail, f64::INFINITY);
    }
    // Σ_{n≥N} n^{−p} = N^{1−p}/(p−1) + N^{−p}/2 − Σ_k B_{2k}/(2k)! f^{(2k−1)}(N).
    let mut tail = n.powf(1.0 - pf) / (pf - 1.0) + 0.5 * n.powf(-pf);
    let mut last = 0.0;
    for (k, b) in B.iter().enumerate() {
        let order = 2 * k + 1;
        // f^{(m)}(N) = (−1)^m (p)_m N^{−p−m}
        let mut rising = 1.0;
        for i in 0..order {
            rising *= pf + i as f64;
        }
        let mut fact = 1.0;
        for i in 1..=(order + 1) {
            fact *= i as f64;
        }
        let deriv = -rising * n.powf(-pf - order as f64);
        last = b / fact * deriv;
        tail -= last;
    }
    (head + tail, last.abs() + 1e-16 * head.abs())
}

/// Li_p(e^{iφ}) for integer p ≥ 1 and real φ.
///
/// Returns `Error::NotConverged` carrying the partial value when the series
/// diverges (p = 1 at φ ≡ 0) or when `tolerance` would need more than
/// `MAX_TERMS` explicit terms.
pub fn unit_polylog(phi: f64, p: u32, tolerance: f64) -> Result<LatticeSum> {
    if p == 0 {
        return Err(Error::InvalidInput("polylog order must be ≥ 1".into()));
    }
    if !(tolerance > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tolerance}")));
    }
    if !phi.is_finite() {
        return Err(Error::InvalidInput("phase must be finite".into()));
    }
    let phi = reduce_phase(phi);

    if phi == 0.0 {
        let (value, achieved) = sum_at_one(p);
        let value = Complex64::new(value, 0.0);
        if achieved > tolerance {
            return Err(Error::NotConverged {
                partial: value,
                achieved,
                truncation: MAX_TERMS,
            });
        }
        return Ok(LatticeSum {
            value,
            terms: 31,
            achieved_tolerance: achieved,
        });
    }

    let z = Complex64::from_polar(1.0, phi);
    let one_minus_z = Complex64::new(1.0, 0.0) - z;
    let w = one_minus_z.inv();
    let gap = one_minus_z.norm();
    let polys = negative_order_polys(TAIL_ORDER);
    let pf = p as f64;

    let mut n_terms = MIN_TERMS.max((60.0 / gap).ceil() as usize);
    loop {
        if n_terms > MAX_TERMS {
            let partial = partial_sum(phi, p, MAX_TERMS);
            // Crude bound on the neglected tail: |Σ_{n>M} zⁿ n^{−p}| ≤ 2/(|1−z| M^p).
            let achieved = 2.0 / (gap * (MAX_TERMS as f64).powf(pf));
            return Err(Error::NotConverged {
                partial,
                achieved,
                truncation: MAX_TERMS,
            });
        }
        let n = n_terms as f64;
        let head = partial_sum(phi, p, n_terms - 1);

        // Tail terms t_j = Li_{−j}(z) (−1)^j C(p+j−1, j) N^{−p−j}, with the
        // j = 0 term using Σ_{n≥0} zⁿ = w.
        let mut tail = w * n.powf(-pf);
        let mut binom = 1.0;
        // Li_{−j}(z) can vanish for individual j (all even j at z = −1), so
        // growth and convergence are judged on the larger of two successive
        // terms.
        let mut prev = tail.norm();
        let mut last = prev;
        for (j, poly) in polys.iter().enumerate().skip(1) {
            let jf = j as f64;
            binom *= (pf + jf - 1.0) / jf;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let term = eval_poly(&poly[..], w) * (sign * binom * n.powf(-pf - jf));
            let size = term.norm();
            if j > 2 && size > last.max(prev) {
                // The asymptotic series started to grow; stop before this term.
                break;
            }
            tail += term;
            prev = last;
            last = size;
            if last.max(prev) < 1e-3 * tolerance {
                break;
            }
        }
        let zn = Complex64::from_polar(1.0, reduce_phase(n * phi));
        let value = head + zn * tail;
        let rounding = 4.0 * f64::EPSILON * (head.norm() + tail.norm() + 1.0);
        let achieved = last.max(prev) + rounding;
        if achieved <= tolerance {
            return Ok(LatticeSum {
                value,
                terms: n_terms - 1,
                achieved_tolerance: achieved,
            });
        }
        n_terms *= 2;
    }
}

/// Σ_{n odd ≥ 1} e^{inφ}/n^p = [Li_p(e^{iφ}) − Li_p(−e^{iφ})]/2.
pub fn unit_polylog_odd(phi: f64, p: u32, tolerance: f64) -> Result<LatticeSum> {
    let a = unit_polylog(phi, p, tolerance / 2.0)?;
    let b = unit_polylog(phi + PI, p, tolerance / 2.0)?;
    Ok(LatticeSum {
        value: (a.value - b.value) * 0.5,
        terms: a.terms.max(b.terms),
        achieved_tolerance: 0.5 * (a.achieved_tolerance + b.achieved_tolerance),
    })
}
