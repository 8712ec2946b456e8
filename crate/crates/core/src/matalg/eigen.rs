//! Cyclic complex Jacobi eigensolver for Hermitian matrices.
//!
//! Each `(p, q)` rotation first removes the phase of `a_pq` and then applies the
//! real symmetric Jacobi rotation, so the combined transform
//!
//! ```text
//! W = diag(1, e^{-i phi}) * [[c, s], [-s, c]]      (a_pq = |a_pq| e^{i phi})
//! ```
//!
//! is unitary and `W* A W` zeroes the `(p, q)` entry. Sweeps stop once the
//! off-diagonal Frobenius mass drops to `1e-14 * |A|_F`.

use num_complex::Complex64;

use super::{hermitian_checked, AlgebraElement, MatError, Tolerance};

/// Sweep cap before reporting `NoConvergence`.
pub const MAX_SWEEPS: usize = 60;

const CONVERGENCE_RTOL: f64 = 1e-14;

/// `A = V diag(eigenvalues) V*`, eigenvalues ascending, `V` unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: AlgebraElement,
}

impl SpectralDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `V diag(f(l)) V*`, made exactly Hermitian.
    pub fn apply_real(&self, f: impl Fn(f64) -> f64) -> AlgebraElement {
        let v = &self.eigenvectors;
        let d = v.dim();
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        AlgebraElement::from_fn(d, |i, j| {
            (0..d)
                .map(|k| v.get(i, k) * v.get(j, k).conj() * fl[k])
                .sum::<Complex64>()
        })
        .re_part()
    }

    pub fn reconstruct(&self) -> AlgebraElement {
        self.apply_real(|l| l)
    }
}

fn off_diagonal_norm(a: &AlgebraElement) -> f64 {
    let d = a.dim();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                s += a.get(i, j).norm_sqr();
            }
        }
    }
    s.sqrt()
}

pub fn eig_hermitian(a: &AlgebraElement, tol: Tolerance) -> Result<SpectralDecomposition, MatError> {
    if !a.is_finite() {
        return Err(MatError::NonFinite);
    }
    let mut m = hermitian_checked(a, tol)?;
    let d = m.dim();
    let mut v = AlgebraElement::identity(d);
    let target = CONVERGENCE_RTOL * m.frobenius_norm();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off <= target {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(MatError::NoConvergence {
                sweeps,
                off_diagonal: off,
            });
        }
        sweeps += 1;
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| m.get(i, i).re.total_cmp(&m.get(j, j).re));
    let eigenvalues = order.iter().map(|&i| m.get(i, i).re).collect();
    let eigenvectors = AlgebraElement::from_fn(d, |i, k| v.get(i, order[k]));
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate(m: &mut AlgebraElement, v: &mut AlgebraElement, p: usize, q: usize) {
    let apq = m.get(p, q);
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;
    let phase = apq / r;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;

    // W = [[w_pp, w_pq], [w_qp, w_qq]]
    let w_pp = Complex64::new(c, 0.0);
    let w_pq = Complex64::new(s, 0.0);
    let w_qp = -phase.conj() * s;
    let w_qq = phase.conj() * c;

    let d = m.dim();
    // A <- A W
    for k in 0..d {
        let akp = m.get(k, p);
        let akq = m.get(k, q);
        m.set(k, p, akp * w_pp + akq * w_qp);
        m.set(k, q, akp * w_pq + akq * w_qq);
    }
    // A <- W* A
    for k in 0..d {
        let apk = m.get(p, k);
        let aqk = m.get(q, k);
        m.set(p, k, w_pp.conj() * apk + w_qp.conj() * aqk);
        m.set(q, k, w_pq.conj() * apk + w_qq.conj() * aqk);
    }
    m.set(p, q, Complex64::new(0.0, 0.0));
    m.set(q, p, Complex64::new(0.0, 0.0));
    m.set(p, p, Complex64::new(m.get(p, p).re, 0.0));
    m.set(q, q, Complex64::new(m.get(q, q).re, 0.0));
    // V <- V W
    for k in 0..d {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * w_pp + vkq * w_qp);
        v.set(k, q, vkp * w_pq + vkq * w_qq);
    }
}
