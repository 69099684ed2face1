//! Nyström discretization of the Neumann-Poincaré operator, resolvent density
//! solves, and GPT / tessera / TGPT assembly (the forward problem).
//!
//! The operator kernel on a smooth closed curve is continuous with diagonal
//! limit `kappa/(4 pi)`, so plain trapezoidal Nyström converges spectrally on
//! the smooth fixtures.

use crate::geometry::BoundaryCurve;
use crate::poly2d::MultiIndex;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NpError {
    #[error("contrast lambda must satisfy |lambda| > 1/2, got {0}")]
    InvalidContrast(f64),
    #[error("conductivity must be positive and != 1, got {0}")]
    InvalidConductivity(f64),
    #[error("nodes {0} and {1} coincide; cannot assemble the operator")]
    CoincidentNodes(usize, usize),
    #[error("resolvent solve is ill-conditioned (estimated condition {cond:.3e}); lambda may be near the spectrum")]
    IllConditioned { cond: f64 },
    #[error("multi-index {0:?} must have degree >= 1")]
    DegreeZero(MultiIndex),
    #[error("tessera order (m={m}, n={n}) out of range for d={d}")]
    TesseraOrder { m: usize, n: usize, d: usize },
}

/// Conductivity contrast `lambda = (k+1) / (2(k-1))`, valid for `|lambda| > 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contrast {
    lambda: f64,
}

impl Contrast {
    pub fn new(lambda: f64) -> Result<Self, NpError> {
        if !(lambda.abs() > 0.5) || !lambda.is_finite() {
            return Err(NpError::InvalidContrast(lambda));
        }
        Ok(Self { lambda })
    }

    pub fn from_conductivity(k: f64) -> Result<Self, NpError> {
        if !(k > 0.0) || k == 1.0 {
            return Err(NpError::InvalidConductivity(k));
        }
        Self::new((k + 1.0) / (2.0 * (k - 1.0)))
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        1.0 / self.lambda
    }
}

/// Dense Nyström matrix of the Neumann-Poincaré operator on a boundary curve.
pub struct NpOperator {
    matrix: DMatrix<f64>,
    curve: BoundaryCurve,
}

impl NpOperator {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn curve(&self) -> &BoundaryCurve {
        &self.curve
    }

    pub fn len(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.nrows() == 0
    }
}

/// Assembles the Nyström matrix: off-diagonal entries
/// `w_j <x_i - y_j, nu_i> / (2 pi |x_i - y_j|^2)`, diagonal `kappa_i w_i / (4 pi)`.
pub fn assemble_np(curve: &BoundaryCurve) -> Result<NpOperator, NpError> {
    let n = curve.len();
    let nodes = curve.nodes();
    let normals = curve.normals();
    let weights = curve.weights();
    let kappa = curve.curvature();
    let mut k = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                k[(i, i)] = kappa[i] * weights[i] / (4.0 * PI);
                continue;
            }
            let dx = nodes[i][0] - nodes[j][0];
            let dy = nodes[i][1] - nodes[j][1];
            let r2 = dx * dx + dy * dy;
            if r2 < 1e-28 {
                return Err(NpError::CoincidentNodes(i, j));
            }
            k[(i, j)] = weights[j] * (dx * normals[i][0] + dy * normals[i][1]) / (2.0 * PI * r2);
        }
    }
    Ok(NpOperator {
        matrix: k,
        curve: curve.clone(),
    })
}

/// Boundary data `nu . grad(x^alpha)` evaluated at the nodes.
pub fn monomial_rhs(curve: &BoundaryCurve, alpha: MultiIndex) -> DVector<f64> {
    let n = curve.len();
    let mut rhs = DVector::zeros(n);
    let (a1, a2) = (alpha.a1, alpha.a2);
    for i in 0..n {
        let [x, y] = curve.nodes()[i];
        let nu = curve.normals()[i];
        let mut gx = 0.0;
        let mut gy = 0.0;
        if a1 > 0 {
            gx = a1 as f64 * x.powi(a1 as i32 - 1) * y.powi(a2 as i32);
        }
        if a2 > 0 {
            gy = a2 as f64 * x.powi(a1 as i32) * y.powi(a2 as i32 - 1);
        }
        rhs[i] = nu[0] * gx + nu[1] * gy;
    }
    rhs
}

const RESIDUAL_REL_TOL: f64 = 1e-10;

fn solve_system(
    a: &DMatrix<f64>,
    rhs: &DVector<f64>,
) -> Result<DVector<f64>, NpError> {
    let lu = a.clone().lu();
    let phi = lu.solve(rhs).ok_or_else(|| {
        let svd = a.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        NpError::IllConditioned { cond: smax / smin }
    })?;
    let rhs_sup = rhs.amax();
    if rhs_sup > 0.0 {
        let residual = (a * &phi - rhs).amax();
        if residual > RESIDUAL_REL_TOL * rhs_sup {
            let svd = a.clone().svd(false, false);
            let smax = svd.singular_values.max();
            let smin = svd.singular_values.min().max(f64::MIN_POSITIVE);
            return Err(NpError::IllConditioned { cond: smax / smin });
        }
    }
    Ok(phi)
}

/// Solves `(lambda I - K) phi = rhs` for an arbitrary boundary density.
pub fn solve_rhs(
    op: &NpOperator,
    contrast: &Contrast,
    rhs: &DVector<f64>,
) -> Result<DVector<f64>, NpError> {
    let n = op.len();
    let mut a = -op.matrix.clone();
    for i in 0..n {
        a[(i, i)] += contrast.lambda;
    }
    solve_system(&a, rhs)
}

/// The GPT density `phi_alpha = (lambda I - K)^{-1} [nu . grad x^alpha]`.
pub fn solve_density(
    op: &NpOperator,
    contrast: &Contrast,
    alpha: MultiIndex,
) -> Result<DVector<f64>, NpError> {
    if alpha.degree() < 1 {
        return Err(NpError::DegreeZero(alpha));
    }
    solve_rhs(op, contrast, &monomial_rhs(op.curve(), alpha))
}

fn moment(curve: &BoundaryCurve, beta: MultiIndex, phi: &DVector<f64>) -> f64 {
    let mut acc = 0.0;
    for i in 0..curve.len() {
        let [x, y] = curve.nodes()[i];
        acc += x.powi(beta.a1 as i32) * y.powi(beta.a2 as i32) * phi[i] * curve.weights()[i];
    }
    acc
}

/// Single generalized polarization tensor entry `M_{alpha beta}`.
pub fn gpt(
    op: &NpOperator,
    contrast: &Contrast,
    alpha: MultiIndex,
    beta: MultiIndex,
) -> Result<f64, NpError> {
    if beta.degree() < 1 {
        return Err(NpError::DegreeZero(beta));
    }
    let phi = solve_density(op, contrast, alpha)?;
    Ok(moment(op.curve(), beta, &phi))
}

/// `M_{alpha beta}` computed through the `mu`-form resolvent
/// `mu * integral (I - mu K)^{-1}[nu . grad x^alpha] y^beta`,
/// using `(lambda I - K)^{-1} = lambda^{-1} (I - mu K)^{-1}`.
pub fn gpt_mu_form(
    op: &NpOperator,
    contrast: &Contrast,
    alpha: MultiIndex,
    beta: MultiIndex,
) -> Result<f64, NpError> {
    if alpha.degree() < 1 || beta.degree() < 1 {
        return Err(NpError::DegreeZero(if alpha.degree() < 1 { alpha } else { beta }));
    }
    let n = op.len();
    let mu = contrast.mu();
    let mut a = op.matrix.clone() * (-mu);
    for i in 0..n {
        a[(i, i)] += 1.0;
    }
    let psi = solve_system(&a, &monomial_rhs(op.curve(), alpha))?;
    Ok(contrast.mu() * moment(op.curve(), beta, &psi))
}

/// Row multi-indices of tessera block `m`: `(m,0), (m-1,1), ..., (0,m)`.
fn block_indices(m: usize) -> impl Iterator<Item = MultiIndex> {
    (0..=m).map(move |i| MultiIndex::new(m - i, i))
}

/// Solves densities for all `|alpha| <= max_degree` against one factorization.
fn all_densities(
    op: &NpOperator,
    contrast: &Contrast,
    max_degree: usize,
) -> Result<Vec<(MultiIndex, DVector<f64>)>, NpError> {
    let n = op.len();
    let mut a = -op.matrix.clone();
    for i in 0..n {
        a[(i, i)] += contrast.lambda;
    }
    let lu = a.clone().lu();
    let mut out = Vec::new();
    for m in 1..=max_degree {
        for alpha in block_indices(m) {
            let rhs = monomial_rhs(op.curve(), alpha);
            let phi = lu.solve(&rhs).ok_or(NpError::IllConditioned { cond: f64::INFINITY })?;
            let rhs_sup = rhs.amax();
            if rhs_sup > 0.0 && (&a * &phi - &rhs).amax() > RESIDUAL_REL_TOL * rhs_sup {
                let svd = a.clone().svd(false, false);
                return Err(NpError::IllConditioned {
                    cond: svd.singular_values.max()
                        / svd.singular_values.min().max(f64::MIN_POSITIVE),
                });
            }
            out.push((alpha, phi));
        }
    }
    Ok(out)
}

/// GPT tessera of order `(m, n)`: the `(m+1) x (n+1)` matrix with rows
/// `alpha = (m,0)...(0,m)` and columns `beta = (n,0)...(0,n)`.
pub fn tessera(
    op: &NpOperator,
    contrast: &Contrast,
    m: usize,
    n: usize,
) -> Result<DMatrix<f64>, NpError> {
    if m < 1 || n < 1 {
        return Err(NpError::TesseraOrder { m, n, d: 0 });
    }
    let densities = all_densities(op, contrast, m)?;
    let mut out = DMatrix::zeros(m + 1, n + 1);
    for (i, alpha) in block_indices(m).enumerate() {
        let phi = &densities.iter().find(|(a, _)| *a == alpha).unwrap().1;
        for (j, beta) in block_indices(n).enumerate() {
            out[(i, j)] = moment(op.curve(), beta, phi);
        }
    }
    Ok(out)
}

/// The tesselated GPT of order `d`: blocks `m = 1..2d` stacked over
/// `n = 1..d`, of total shape `sum(m+1) x (r_d - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TgptJson", into = "TgptJson")]
pub struct TgptMatrix {
    d: usize,
    lambda: f64,
    entries: DMatrix<f64>,
}

/// Number of rows of the TGPT of order `d`.
pub fn tgpt_rows(d: usize) -> usize {
    (1..=2 * d).map(|m| m + 1).sum()
}

/// Number of columns of the TGPT of order `d` (`r_d - 1`).
pub fn tgpt_cols(d: usize) -> usize {
    (1..=d).map(|n| n + 1).sum()
}

impl TgptMatrix {
    pub fn new(d: usize, lambda: f64, entries: DMatrix<f64>) -> Result<Self, NpError> {
        if entries.nrows() != tgpt_rows(d) || entries.ncols() != tgpt_cols(d) {
            return Err(NpError::TesseraOrder { m: entries.nrows(), n: entries.ncols(), d });
        }
        Ok(Self { d, lambda, entries })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// Row index of `alpha` (1 <= |alpha| <= 2d) in the stacked layout.
    pub fn row_of(&self, alpha: MultiIndex) -> Option<usize> {
        let m = alpha.degree();
        if m < 1 || m > 2 * self.d {
            return None;
        }
        Some((1..m).map(|k| k + 1).sum::<usize>() + alpha.a2)
    }

    /// Column index of `beta` (1 <= |beta| <= d).
    pub fn col_of(&self, beta: MultiIndex) -> Option<usize> {
        let n = beta.degree();
        if n < 1 || n > self.d {
            return None;
        }
        Some((1..n).map(|k| k + 1).sum::<usize>() + beta.a2)
    }

    /// Multi-index of column `j` (inverse of [`TgptMatrix::col_of`]).
    pub fn col_beta(&self, j: usize) -> MultiIndex {
        let mut n = 1;
        let mut off = 0;
        while off + n + 1 <= j {
            off += n + 1;
            n += 1;
        }
        let a2 = j - off;
        MultiIndex::new(n - a2, a2)
    }

    pub fn entry(&self, alpha: MultiIndex, beta: MultiIndex) -> Option<f64> {
        Some(self.entries[(self.row_of(alpha)?, self.col_of(beta)?)])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// Entry-wise map, preserving shape metadata.
    pub fn map_entries(&self, f: impl Fn(f64) -> f64) -> TgptMatrix {
        TgptMatrix {
            d: self.d,
            lambda: self.lambda,
            entries: self.entries.map(f),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.rows() {
            let row: Vec<String> = (0..self.cols())
                .map(|j| format!("{}", self.entries[(i, j)]))
                .collect();
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Serialize, Deserialize)]
struct TgptJson {
    d: usize,
    lambda: f64,
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl From<TgptMatrix> for TgptJson {
    fn from(t: TgptMatrix) -> Self {
        let rows = t.rows();
        let cols = t.cols();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(t.entries[(i, j)]);
            }
        }
        TgptJson {
            d: t.d,
            lambda: t.lambda,
            rows,
            cols,
            entries,
        }
    }
}

impl TryFrom<TgptJson> for TgptMatrix {
    type Error = String;

    fn try_from(j: TgptJson) -> Result<Self, String> {
        if j.rows != tgpt_rows(j.d) || j.cols != tgpt_cols(j.d) {
            return Err(format!(
                "TGPT of order {} must be {}x{}, got {}x{}",
                j.d,
                tgpt_rows(j.d),
                tgpt_cols(j.d),
                j.rows,
                j.cols
            ));
        }
        if j.entries.len() != j.rows * j.cols {
            return Err(format!(
                "entry count {} does not match {}x{}",
                j.entries.len(),
                j.rows,
                j.cols
            ));
        }
        let entries = DMatrix::from_row_slice(j.rows, j.cols, &j.entries);
        TgptMatrix::new(j.d, j.lambda, entries).map_err(|e| e.to_string())
    }
}

/// Assembles the full TGPT of order `d` with one factorization.
pub fn tgpt(op: &NpOperator, contrast: &Contrast, d: usize) -> Result<TgptMatrix, NpError> {
    if d < 1 {
        return Err(NpError::TesseraOrder { m: 0, n: 0, d });
    }
    let densities = all_densities(op, contrast, 2 * d)?;
    let mut entries = DMatrix::zeros(tgpt_rows(d), tgpt_cols(d));
    let mut row = 0;
    for m in 1..=2 * d {
        for (i, alpha) in block_indices(m).enumerate() {
            let phi = &densities
                .iter()
                .find(|(a, _)| *a == alpha)
                .expect("density solved for every |alpha| <= 2d")
                .1;
            let mut col = 0;
            for n in 1..=d {
                for (j, beta) in block_indices(n).enumerate() {
                    entries[(row + i, col + j)] = moment(op.curve(), beta, phi);
                }
                col += n + 1;
            }
        }
        row += m + 1;
    }
    TgptMatrix::new(d, contrast.lambda(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_shape, BoundaryCurve, ShapeSpec};
    use crate::poly2d::circle_poly;

    /// Analytic circle centered anywhere (test fixture helper).
    fn circle_curve(center: [f64; 2], r: f64, n: usize) -> BoundaryCurve {
        let dt = 2.0 * PI / n as f64;
        let mut nodes = Vec::new();
        let mut tangents = Vec::new();
        let mut normals = Vec::new();
        let mut curvature = Vec::new();
        let mut weights = Vec::new();
        for i in 0..n {
            let t = i as f64 * dt;
            nodes.push([center[0] + r * t.cos(), center[1] + r * t.sin()]);
            tangents.push([-t.sin(), t.cos()]);
            normals.push([t.cos(), t.sin()]);
            curvature.push(1.0 / r);
            weights.push(r * dt);
        }
        BoundaryCurve::from_parts(nodes, tangents, normals, curvature, weights).unwrap()
    }

    #[test]
    fn disk_operator_annihilates_mean_zero_densities() {
        let op = assemble_np(&circle_curve([0.0, 0.0], 1.0, 256)).unwrap();
        let eigs = op.matrix().clone().complex_eigenvalues();
        let mut mags: Vec<f64> = eigs.iter().map(|z| z.norm()).collect();
        mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((mags[0] - 0.5).abs() < 1e-3, "top eigenvalue {}", mags[0]);
        assert!(mags[1] < 1e-3, "second eigenvalue {}", mags[1]);
    }

    #[test]
    fn operator_maps_constants_to_half() {
        let op = assemble_np(&make_shape(&ShapeSpec::CircleThroughOrigin { radius: 1.0 }, 256).unwrap())
            .unwrap();
        let ones = DVector::from_element(op.len(), 1.0);
        let image = op.matrix() * &ones;
        for v in image.iter() {
            assert!((v - 0.5).abs() < 1e-3, "K[1] entry {v}");
        }
    }

    #[test]
    fn ellipse_spectrum_inside_resolvent_bound() {
        let curve = make_shape(&ShapeSpec::Ellipse { a: 2.0, b: 1.0 }, 256).unwrap();
        let op = assemble_np(&curve).unwrap();
        let eigs = op.matrix().clone().complex_eigenvalues();
        for z in eigs.iter() {
            assert!(z.norm() <= 0.5 + 1e-3, "eigenvalue {z} outside bound");
        }
    }

    #[test]
    fn disk_density_is_normal_component() {
        let op = assemble_np(&circle_curve([0.0, 0.0], 1.0, 256)).unwrap();
        let contrast = Contrast::new(1.0).unwrap();
        let phi = solve_density(&op, &contrast, MultiIndex::new(1, 0)).unwrap();
        for (i, nu) in op.curve().normals().iter().enumerate() {
            assert!((phi[i] - nu[0]).abs() < 1e-10, "phi[{i}] = {}", phi[i]);
        }
    }

    #[test]
    fn zero_rhs_gives_zero_density() {
        let op = assemble_np(&make_shape(&ShapeSpec::Ellipse { a: 1.0, b: 0.7 }, 128).unwrap())
            .unwrap();
        let contrast = Contrast::new(0.75).unwrap();
        let phi = solve_rhs(&op, &contrast, &DVector::zeros(op.len())).unwrap();
        assert_eq!(phi.amax(), 0.0);
    }

    #[test]
    fn huge_lambda_resolvent_limit() {
        let op = assemble_np(&make_shape(&ShapeSpec::Ellipse { a: 1.0, b: 0.6 }, 128).unwrap())
            .unwrap();
        let contrast = Contrast::new(1e6).unwrap();
        let alpha = MultiIndex::new(1, 1);
        let rhs = monomial_rhs(op.curve(), alpha);
        let phi = solve_density(&op, &contrast, alpha).unwrap();
        for i in 0..op.len() {
            let expected = rhs[i] / 1e6;
            assert!(
                (phi[i] - expected).abs() <= 1e-4 * expected.abs().max(1e-12),
                "resolvent limit violated at node {i}"
            );
        }
    }

    #[test]
    fn disk_first_order_gpt_is_area() {
        let op = assemble_np(&circle_curve([0.0, 0.0], 1.0, 512)).unwrap();
        let contrast = Contrast::new(1.0).unwrap();
        let m = gpt(&op, &contrast, MultiIndex::new(1, 0), MultiIndex::new(1, 0)).unwrap();
        assert!((m - PI).abs() < 1e-6 * PI, "M_11 = {m}");
    }

    #[test]
    fn disk_odd_moment_vanishes() {
        let op = assemble_np(&circle_curve([0.0, 0.0], 1.0, 512)).unwrap();
        let contrast = Contrast::new(1.0).unwrap();
        let m = gpt(&op, &contrast, MultiIndex::new(1, 0), MultiIndex::new(2, 0)).unwrap();
        assert!(m.abs() < 1e-8, "odd-parity entry {m}");
    }

    #[test]
    fn ellipse_gpt_self_convergence() {
        let contrast = Contrast::from_conductivity(3.0).unwrap();
        let alpha = MultiIndex::new(1, 0);
        let beta = MultiIndex::new(1, 0);
        let value = |n: usize| {
            let op = assemble_np(&make_shape(&ShapeSpec::Ellipse { a: 2.0, b: 1.0 }, n).unwrap())
                .unwrap();
            gpt(&op, &contrast, alpha, beta).unwrap()
        };
        let (v16, v32, v64) = (value(16), value(32), value(64));
        let ratio = (v16 - v32).abs() / (v32 - v64).abs().max(1e-300);
        assert!(ratio >= 3.0, "refinement ratio {ratio}");
    }

    #[test]
    fn ellipse_high_res_relative_agreement() {
        let contrast = Contrast::from_conductivity(3.0).unwrap();
        let alpha = MultiIndex::new(1, 0);
        let beta = MultiIndex::new(1, 0);
        let value = |n: usize| {
            let op = assemble_np(&make_shape(&ShapeSpec::Ellipse { a: 2.0, b: 1.0 }, n).unwrap())
                .unwrap();
            gpt(&op, &contrast, alpha, beta).unwrap()
        };
        let coarse = value(128);
        let fine = value(512);
        assert!(
            ((coarse - fine) / fine).abs() < 1e-6,
            "resolution disagreement {}",
            ((coarse - fine) / fine).abs()
        );
    }

    #[test]
    fn mu_form_matches_lambda_form() {
        let op = assemble_np(&make_shape(&ShapeSpec::Ellipse { a: 1.5, b: 0.8 }, 128).unwrap())
            .unwrap();
        let contrast = Contrast::new(0.8).unwrap();
        for (alpha, beta) in [
            (MultiIndex::new(1, 0), MultiIndex::new(1, 0)),
            (MultiIndex::new(2, 0), MultiIndex::new(1, 1)),
            (MultiIndex::new(1, 1), MultiIndex::new(0, 2)),
        ] {
            let direct = gpt(&op, &contrast, alpha, beta).unwrap();
            let mu = gpt_mu_form(&op, &contrast, alpha, beta).unwrap();
            assert!(
                (direct - mu).abs() < 1e-10 * direct.abs().max(1.0),
                "forms disagree: {direct} vs {mu}"
            );
        }
    }

    #[test]
    fn tgpt_shapes() {
        let op = assemble_np(&circle_curve([1.0, 0.0], 1.0, 128)).unwrap();
        let contrast = Contrast::new(1.0).unwrap();
        let t1 = tgpt(&op, &contrast, 1).unwrap();
        assert_eq!((t1.rows(), t1.cols()), (5, 2));
        let t2 = tgpt(&op, &contrast, 2).unwrap();
        assert_eq!((t2.rows(), t2.cols()), (14, 5));
        // first-order block of a disk is area times identity
        let m11 = t1.entry(MultiIndex::new(1, 0), MultiIndex::new(1, 0)).unwrap();
        let m12 = t1.entry(MultiIndex::new(1, 0), MultiIndex::new(0, 1)).unwrap();
        let m21 = t1.entry(MultiIndex::new(0, 1), MultiIndex::new(1, 0)).unwrap();
        let m22 = t1.entry(MultiIndex::new(0, 1), MultiIndex::new(0, 1)).unwrap();
        assert!((m11 - PI).abs() < 1e-6);
        assert!((m22 - PI).abs() < 1e-6);
        assert!(m12.abs() < 1e-8 && m21.abs() < 1e-8);
        // tessera (1,1) equals the top block
        let t11 = tessera(&op, &contrast, 1, 1).unwrap();
        assert!((t11[(0, 0)] - m11).abs() < 1e-14);
        assert!((t11[(1, 1)] - m22).abs() < 1e-14);
    }

    #[test]
    fn tgpt_annihilates_boundary_polynomial() {
        // circle through origin: g = x1^2 + x2^2 - 2 x1
        let op = assemble_np(
            &make_shape(&ShapeSpec::CircleThroughOrigin { radius: 1.0 }, 512).unwrap(),
        )
        .unwrap();
        let contrast = Contrast::new(1.0).unwrap();
        let t = tgpt(&op, &contrast, 2).unwrap();
        let g = circle_poly([1.0, 0.0], 1.0);
        let mut residual: Vec<f64> = vec![0.0; t.rows()];
        let mut gnorm = 0.0f64;
        for j in 0..t.cols() {
            let beta = t.col_beta(j);
            let c = g.coeff(beta);
            gnorm += c * c;
            for (i, r) in residual.iter_mut().enumerate() {
                *r += t.entries()[(i, j)] * c;
            }
        }
        let rnorm = residual.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rel = rnorm / (t.frobenius_norm() * gnorm.sqrt());
        assert!(rel < 1e-4, "kernel residual {rel}");
    }

    #[test]
    fn tgpt_json_round_trip() {
        let op = assemble_np(&circle_curve([1.0, 0.0], 1.0, 64)).unwrap();
        let contrast = Contrast::new(1.0).unwrap();
        let t = tgpt(&op, &contrast, 2).unwrap();
        let s = serde_json::to_string(&t).unwrap();
        let back: TgptMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn contrast_validation() {
        assert!(Contrast::new(0.4).is_err());
        assert!(Contrast::new(-0.5).is_err());
        assert!(Contrast::new(-0.75).is_ok());
        let c = Contrast::from_conductivity(3.0).unwrap();
        assert_eq!(c.lambda(), 1.0);
        assert!(Contrast::from_conductivity(1.0).is_err());
    }
}
