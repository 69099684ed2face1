//! Bivariate real polynomials in graded-lexicographic coefficient storage.
//!
//! A [`Poly2`] of degree `d` stores its `r_d = (d+1)(d+2)/2` coefficients in
//! ascending graded-lex order of the exponent pair: total degree first, then
//! the `x1` exponent. All values are immutable after construction.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative threshold below which a coefficient counts as zero when locating
/// the leading index `alpha*`.
pub const COEFF_ZERO_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("polynomial is numerically zero; cannot normalize")]
    ZeroPolynomial,
    #[error("coefficient vector has length {got}, expected {expected} for degree {degree}")]
    CoeffLength {
        degree: usize,
        expected: usize,
        got: usize,
    },
    #[error("term exponent {0:?} exceeds polynomial degree {1}")]
    TermOutOfRange(MultiIndex, usize),
}

/// Exponent pair `(a1, a2)` of a monomial `x1^a1 * x2^a2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub a1: usize,
    pub a2: usize,
}

impl MultiIndex {
    pub fn new(a1: usize, a2: usize) -> Self {
        Self { a1, a2 }
    }

    pub fn degree(&self) -> usize {
        self.a1 + self.a2
    }

    /// Position in the ascending graded-lex enumeration:
    /// (0,0), (0,1), (1,0), (0,2), (1,1), (2,0), ...
    pub fn ordinal(&self) -> usize {
        let m = self.degree();
        m * (m + 1) / 2 + self.a1
    }

    /// Inverse of [`MultiIndex::ordinal`].
    pub fn from_ordinal(i: usize) -> Self {
        let mut m = 0usize;
        while (m + 1) * (m + 2) / 2 <= i {
            m += 1;
        }
        let a1 = i - m * (m + 1) / 2;
        Self { a1, a2: m - a1 }
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.degree(), self.a1, self.a2).cmp(&(other.degree(), other.a1, other.a2))
    }
}

/// Number of bivariate monomials of total degree at most `d`.
pub fn basis_len(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

/// Bivariate polynomial of fixed maximal degree with dense graded-lex storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyJson", into = "PolyJson")]
pub struct Poly2 {
    degree: usize,
    coeffs: Vec<f64>,
}

impl Poly2 {
    pub fn new(degree: usize, coeffs: Vec<f64>) -> Result<Self, PolyError> {
        let expected = basis_len(degree);
        if coeffs.len() != expected {
            return Err(PolyError::CoeffLength {
                degree,
                expected,
                got: coeffs.len(),
            });
        }
        Ok(Self { degree, coeffs })
    }

    pub fn zero(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![0.0; basis_len(degree)],
        }
    }

    pub fn from_terms(degree: usize, terms: &[(MultiIndex, f64)]) -> Result<Self, PolyError> {
        let mut coeffs = vec![0.0; basis_len(degree)];
        for &(alpha, c) in terms {
            if alpha.degree() > degree {
                return Err(PolyError::TermOutOfRange(alpha, degree));
            }
            coeffs[alpha.ordinal()] += c;
        }
        Ok(Self { degree, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, alpha: MultiIndex) -> f64 {
        if alpha.degree() > self.degree {
            0.0
        } else {
            self.coeffs[alpha.ordinal()]
        }
    }

    fn powers(x: f64, d: usize) -> Vec<f64> {
        let mut p = vec![1.0; d + 1];
        for k in 1..=d {
            p[k] = p[k - 1] * x;
        }
        p
    }

    pub fn eval(&self, x: [f64; 2]) -> f64 {
        let p1 = Self::powers(x[0], self.degree);
        let p2 = Self::powers(x[1], self.degree);
        let mut acc = 0.0;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c != 0.0 {
                let a = MultiIndex::from_ordinal(i);
                acc += c * p1[a.a1] * p2[a.a2];
            }
        }
        acc
    }

    pub fn gradient(&self, x: [f64; 2]) -> [f64; 2] {
        let p1 = Self::powers(x[0], self.degree);
        let p2 = Self::powers(x[1], self.degree);
        let mut g = [0.0, 0.0];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let a = MultiIndex::from_ordinal(i);
            if a.a1 > 0 {
                g[0] += c * a.a1 as f64 * p1[a.a1 - 1] * p2[a.a2];
            }
            if a.a2 > 0 {
                g[1] += c * a.a2 as f64 * p1[a.a1] * p2[a.a2 - 1];
            }
        }
        g
    }

    pub fn hessian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let p1 = Self::powers(x[0], self.degree);
        let p2 = Self::powers(x[1], self.degree);
        let mut h = [[0.0; 2]; 2];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let a = MultiIndex::from_ordinal(i);
            let (n1, n2) = (a.a1 as f64, a.a2 as f64);
            if a.a1 > 1 {
                h[0][0] += c * n1 * (n1 - 1.0) * p1[a.a1 - 2] * p2[a.a2];
            }
            if a.a1 > 0 && a.a2 > 0 {
                h[0][1] += c * n1 * n2 * p1[a.a1 - 1] * p2[a.a2 - 1];
            }
            if a.a2 > 1 {
                h[1][1] += c * n2 * (n2 - 1.0) * p1[a.a1] * p2[a.a2 - 2];
            }
        }
        h[1][0] = h[0][1];
        h
    }

    /// Leading index: graded-lex maximum over coefficients that are nonzero
    /// relative to the sup norm of the coefficient vector.
    pub fn leading_index(&self) -> Option<MultiIndex> {
        let sup = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if sup == 0.0 {
            return None;
        }
        let tol = COEFF_ZERO_REL_TOL * sup;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > tol)
            .map(|(i, _)| MultiIndex::from_ordinal(i))
            .max()
    }

    /// Divides by the coefficient at `alpha*` so the leading coefficient is 1.
    pub fn normalize(&self) -> Result<Poly2, PolyError> {
        let lead = self.leading_index().ok_or(PolyError::ZeroPolynomial)?;
        let c = self.coeffs[lead.ordinal()];
        let coeffs = self.coeffs.iter().map(|v| v / c).collect();
        Ok(Poly2 {
            degree: self.degree,
            coeffs,
        })
    }

    pub fn scale(&self, c: f64) -> Poly2 {
        Poly2 {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    /// Sets the constant term to zero, returning the new polynomial together
    /// with the magnitude that was dropped.
    pub fn drop_constant_term(&self) -> (Poly2, f64) {
        let mut out = self.clone();
        let dropped = out.coeffs[0].abs();
        out.coeffs[0] = 0.0;
        (out, dropped)
    }

    /// Product of two polynomials; the result has degree `self.degree + rhs.degree`.
    pub fn mul(&self, rhs: &Poly2) -> Poly2 {
        let degree = self.degree + rhs.degree;
        let mut coeffs = vec![0.0; basis_len(degree)];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let ai = MultiIndex::from_ordinal(i);
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                if b == 0.0 {
                    continue;
                }
                let bj = MultiIndex::from_ordinal(j);
                let prod = MultiIndex::new(ai.a1 + bj.a1, ai.a2 + bj.a2);
                coeffs[prod.ordinal()] += a * b;
            }
        }
        Poly2 { degree, coeffs }
    }

    pub fn coeff_norm_inf(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn coeff_norm_2(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

#[derive(Serialize, Deserialize)]
struct PolyTermJson {
    alpha: [usize; 2],
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    degree: usize,
    coeffs: Vec<PolyTermJson>,
}

impl From<Poly2> for PolyJson {
    fn from(p: Poly2) -> Self {
        let coeffs = p
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(i, &c)| {
                let a = MultiIndex::from_ordinal(i);
                PolyTermJson {
                    alpha: [a.a1, a.a2],
                    c,
                }
            })
            .collect();
        PolyJson {
            degree: p.degree,
            coeffs,
        }
    }
}

impl TryFrom<PolyJson> for Poly2 {
    type Error = PolyError;

    fn try_from(j: PolyJson) -> Result<Self, PolyError> {
        let terms: Vec<(MultiIndex, f64)> = j
            .coeffs
            .iter()
            .map(|t| (MultiIndex::new(t.alpha[0], t.alpha[1]), t.c))
            .collect();
        Poly2::from_terms(j.degree, &terms)
    }
}

/// `x1^2 + x2^2 - 2 c1 x1 - 2 c2 x2 + (c1^2 + c2^2 - r^2)`:
/// the circle of radius `r` centered at `(c1, c2)`.
pub fn circle_poly(center: [f64; 2], r: f64) -> Poly2 {
    Poly2::from_terms(
        2,
        &[
            (MultiIndex::new(2, 0), 1.0),
            (MultiIndex::new(0, 2), 1.0),
            (MultiIndex::new(1, 0), -2.0 * center[0]),
            (MultiIndex::new(0, 1), -2.0 * center[1]),
            (
                MultiIndex::new(0, 0),
                center[0] * center[0] + center[1] * center[1] - r * r,
            ),
        ],
    )
    .expect("static term list")
}
