//! Dense polynomials with complex coefficients and their roots via companion matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Polynomial `sum c[k] x^k` (coefficients in ascending order).
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<Complex64>,
}

fn cz() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Poly::from_real(&[0.0, 1.0])
    }

    /// Index of the highest nonzero coefficient, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != cz())
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(cz(), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::new(vec![cz()]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or_else(cz)
                        + other.coeffs.get(k).copied().unwrap_or_else(cz)
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Poly::new(vec![cz()]);
        }
        let mut out = vec![cz(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Substitute `x -> q(x)`.
    pub fn compose(&self, q: &Poly) -> Poly {
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::new(vec![cz()]), |acc, &c| acc.mul(q).add(&Poly::constant(c)))
            .trimmed()
    }

    /// Drop exact-zero high-order coefficients.
    pub fn trimmed(mut self) -> Poly {
        let n = self.degree().map_or(1, |d| d + 1);
        self.coeffs.truncate(n);
        if self.coeffs.is_empty() {
            self.coeffs.push(cz());
        }
        self
    }

    /// All `degree` roots, with multiplicity. Exact zero low-order coefficients
    /// yield exact zero roots; the remaining roots are the eigenvalues of the
    /// balanced companion matrix, which is already upper Hessenberg.
    pub fn roots(&self) -> Vec<Complex64> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        let low = self.coeffs.iter().position(|c| *c != cz()).unwrap_or(0);
        let mut out = vec![cz(); low];
        let core = &self.coeffs[low..=deg];
        let n = core.len() - 1;
        if n == 0 {
            return out;
        }
        let lead = core[n];
        if n == 1 {
            out.push(-core[0] / lead);
            return out;
        }
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..n {
            m[(i, n - 1)] = -core[i] / lead;
        }
        balance(&mut m);
        out.extend(hessenberg_eigenvalues(m));
        out
    }
}

/// Diagonal similarity scaling by powers of two so that row and column norms
/// are comparable.
fn balance(m: &mut DMatrix<Complex64>) {
    let n = m.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].norm();
                    r += m[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

const QR_MAX_SWEEPS_PER_EIG: usize = 200;

/// Eigenvalues of an upper Hessenberg matrix by single-shift complex QR with
/// Wilkinson shifts and deflation. Only the active diagonal block is updated.
fn hessenberg_eigenvalues(mut h: DMatrix<Complex64>) -> Vec<Complex64> {
    let n = h.nrows();
    let mut eig = vec![cz(); n];
    if n == 0 {
        return eig;
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if sub <= f64::EPSILON * diag || sub < f64::MIN_POSITIVE {
                h[(lo, lo - 1)] = cz();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > QR_MAX_SWEEPS_PER_EIG {
            // no convergence: report the current diagonal
            for k in 0..=hi {
                eig[k] = h[(k, k)];
            }
            return eig;
        }
        let shift = if iter.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let (a, b, c, d) = (
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            );
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let m1 = (a + d) * 0.5 + disc;
            let m2 = (a + d) * 0.5 - disc;
            if (m1 - d).norm() <= (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        for k in lo..=hi {
            h[(k, k)] -= shift;
        }
        rot.clear();
        for k in lo..hi {
            let x = h[(k, k)];
            let y = h[(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (1.0, cz())
            } else if x.norm() == 0.0 {
                (0.0, Complex64::new(1.0, 0.0))
            } else {
                let xn = x.norm();
                (xn / r, (x / xn) * y.conj() / r)
            };
            for j in k..=hi {
                let (p, q) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = p * c + s * q;
                h[(k + 1, j)] = -s.conj() * p + q * c;
            }
            rot.push((c, s));
        }
        for (off, &(c, s)) in rot.iter().enumerate() {
            let k = lo + off;
            for i in lo..=(k + 1).min(hi) {
                let (p, q) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = p * c + s.conj() * q;
                h[(i, k + 1)] = -s * p + q * c;
            }
        }
        for k in lo..=hi {
            h[(k, k)] += shift;
        }
    }
    eig[0] = h[(0, 0)];
    eig
}
