//! Recovery of the minimal boundary polynomial from the numerical kernel of a
//! tesselated GPT matrix, via SVD.

use crate::nptensor::{NpError, TgptMatrix};
use crate::poly2d::{basis_len, MultiIndex, Poly2};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InversionError {
    #[error("SVD failed to converge")]
    SvdFailed,
    #[error("kernel vector is numerically zero")]
    ZeroKernel,
    #[error("polynomial degree {poly} exceeds tensor order {d}")]
    DegreeMismatch { poly: usize, d: usize },
    #[error("no degree up to {d_max} produced a kernel (best gap ratio {best:.3e})")]
    NoKernel { d_max: usize, best: f64 },
    #[error(transparent)]
    Forward(#[from] NpError),
}

/// Coefficients below `KERNEL_COEFF_REL_TOL * max|c|` are treated as zero when
/// picking the leading multi-index of a recovered kernel vector.
pub const KERNEL_COEFF_REL_TOL: f64 = 1e-6;

/// The kernel is flagged ambiguous when the two smallest singular values are
/// within this factor of each other.
pub const AMBIGUITY_FACTOR: f64 = 10.0;

/// Default spectral-gap threshold used by [`degree_scan`].
pub const DEGREE_SCAN_GAP: f64 = 1e-3;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelDiagnostics {
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
    /// Smallest singular value divided by the second smallest.
    pub gap_ratio: f64,
    /// True when the two smallest singular values are within a factor
    /// [`AMBIGUITY_FACTOR`] of each other, i.e. the kernel direction is not
    /// well determined.
    pub ambiguous: bool,
    /// Magnitude of the constant term removed from the recovered polynomial.
    /// The linear system has no constant column, so this is structurally zero;
    /// it is reported for interface symmetry with file-based polynomial input.
    pub dropped_constant: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveredPoly {
    pub poly: Poly2,
    pub diagnostics: KernelDiagnostics,
}

/// Right singular vector of the smallest singular value, mapped onto
/// polynomial coefficients through the tensor's column layout, then scaled so
/// the graded-lex-leading coefficient is 1.
pub fn recover_coefficients(t: &TgptMatrix) -> Result<RecoveredPoly, InversionError> {
    let svd = t
        .entries()
        .clone()
        .try_svd(false, true, f64::EPSILON, 0)
        .ok_or(InversionError::SvdFailed)?;
    let v_t = svd.v_t.as_ref().ok_or(InversionError::SvdFailed)?;
    let sv = &svd.singular_values;

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].partial_cmp(&sv[a]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| sv[i]).collect();
    let min_idx = *order.last().unwrap();
    let sigma_min = sorted[sorted.len() - 1];
    let sigma_next = sorted[sorted.len() - 2].max(f64::MIN_POSITIVE);
    let gap_ratio = sigma_min / sigma_next;
    // ambiguous when the runner-up is comparable to the smallest, or is itself
    // at the numerical-zero floor (kernel dimension > 1)
    let ambiguous = sigma_min * AMBIGUITY_FACTOR >= sigma_next
        || sigma_next <= 1e-12 * sorted[0].max(f64::MIN_POSITIVE);

    let kernel: DVector<f64> = v_t.row(min_idx).transpose();
    let sup = kernel.amax();
    if sup == 0.0 {
        return Err(InversionError::ZeroKernel);
    }

    let d = t.d();
    let mut coeffs = vec![0.0; basis_len(d)];
    for j in 0..t.cols() {
        let beta = t.col_beta(j);
        coeffs[beta.ordinal()] = kernel[j];
    }

    // graded-lex maximum among coefficients that stand out from the noise
    let lead = (0..coeffs.len())
        .filter(|&i| coeffs[i].abs() > KERNEL_COEFF_REL_TOL * sup)
        .map(MultiIndex::from_ordinal)
        .max()
        .ok_or(InversionError::ZeroKernel)?;
    let c_lead = coeffs[lead.ordinal()];
    for c in coeffs.iter_mut() {
        *c /= c_lead;
    }

    let poly = Poly2::new(d, coeffs).map_err(|_| InversionError::ZeroKernel)?;
    Ok(RecoveredPoly {
        poly,
        diagnostics: KernelDiagnostics {
            singular_values: sorted,
            gap_ratio,
            ambiguous,
            dropped_constant: 0.0,
        },
    })
}

/// Relative kernel residual `|T c| / (|T|_F |c|)` of a candidate boundary
/// polynomial against a tensor. The constant term does not enter the system.
pub fn kernel_residual(t: &TgptMatrix, g: &Poly2) -> Result<f64, InversionError> {
    if g.degree() > t.d() {
        return Err(InversionError::DegreeMismatch {
            poly: g.degree(),
            d: t.d(),
        });
    }
    let mut c = DVector::zeros(t.cols());
    for j in 0..t.cols() {
        let beta = t.col_beta(j);
        if beta.degree() <= g.degree() {
            c[j] = g.coeff(beta);
        }
    }
    let cnorm = c.norm();
    if cnorm == 0.0 {
        return Err(InversionError::ZeroKernel);
    }
    Ok((t.entries() * &c).norm() / (t.frobenius_norm() * cnorm))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeScan {
    pub degree: usize,
    pub recovery: RecoveredPoly,
    /// Gap ratio observed at each tried degree, starting at 1.
    pub ratios: Vec<f64>,
}

/// Tries tensor orders `d = 1..=d_max` and returns the smallest whose spectral
/// gap ratio falls below `gap`, together with the recovery at that order.
pub fn degree_scan(
    d_max: usize,
    gap: f64,
    mut tgpt_for: impl FnMut(usize) -> Result<TgptMatrix, NpError>,
) -> Result<DegreeScan, InversionError> {
    let mut ratios = Vec::new();
    for d in 1..=d_max {
        let t = tgpt_for(d)?;
        let recovery = recover_coefficients(&t)?;
        let ratio = recovery.diagnostics.gap_ratio;
        ratios.push(ratio);
        if ratio < gap {
            return Ok(DegreeScan {
                degree: d,
                recovery,
                ratios,
            });
        }
    }
    let best = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Err(InversionError::NoKernel { d_max, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_shape, CirclesPart, ShapeSpec};
    use crate::nptensor::{assemble_np, tgpt, tgpt_cols, tgpt_rows, Contrast};
    use crate::poly2d::circle_poly;
    use nalgebra::DMatrix;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_coeff_diff(a: &Poly2, b: &Poly2) -> f64 {
        assert_eq!(a.degree(), b.degree());
        a.coeffs()
            .iter()
            .zip(b.coeffs())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    }

    /// Random matrix whose kernel is exactly the span of `c`.
    fn planted_kernel_matrix(
        rng: &mut ChaCha8Rng,
        rows: usize,
        c: &DVector<f64>,
    ) -> DMatrix<f64> {
        let n = c.len();
        let b = DMatrix::from_fn(rows, n, |_, _| rng.random_range(-1.0..1.0));
        let proj = DMatrix::identity(n, n) - c * c.transpose() / c.norm_squared();
        b * proj
    }

    fn union_fixture() -> crate::geometry::BoundaryCurve {
        make_shape(
            &ShapeSpec::TwoOverlappingCircles {
                r1: 1.0,
                r2: 1.0,
                separation: 0.6,
                part: CirclesPart::Union,
            },
            512,
        )
        .unwrap()
    }

    fn union_product_poly() -> Poly2 {
        let h = (1.0f64 - 0.09).sqrt();
        circle_poly([-0.3, -h], 1.0).mul(&circle_poly([0.3, -h], 1.0))
    }

    #[test]
    fn circle_round_trip() {
        let curve = make_shape(&ShapeSpec::CircleThroughOrigin { radius: 1.0 }, 512).unwrap();
        let op = assemble_np(&curve).unwrap();
        let t = tgpt(&op, &Contrast::new(1.0).unwrap(), 2).unwrap();
        let rec = recover_coefficients(&t).unwrap();
        let truth = circle_poly([1.0, 0.0], 1.0).normalize().unwrap();
        assert!(
            max_coeff_diff(&rec.poly, &truth) < 1e-4,
            "coefficient error {}",
            max_coeff_diff(&rec.poly, &truth)
        );
        assert!(!rec.diagnostics.ambiguous);
        assert!(rec.diagnostics.gap_ratio < 1e-6);
        assert_eq!(rec.diagnostics.dropped_constant, 0.0);
    }

    #[test]
    fn overlapping_circles_round_trip() {
        let op = assemble_np(&union_fixture()).unwrap();
        let t = tgpt(&op, &Contrast::new(1.0).unwrap(), 4).unwrap();
        assert_eq!((t.rows(), t.cols()), (tgpt_rows(4), tgpt_cols(4)));
        let rec = recover_coefficients(&t).unwrap();
        let truth = union_product_poly().normalize().unwrap();
        assert!(
            max_coeff_diff(&rec.poly, &truth) < 1e-3,
            "coefficient error {}",
            max_coeff_diff(&rec.poly, &truth)
        );
    }

    #[test]
    fn recovered_poly_vanishes_on_the_boundary() {
        let curve = union_fixture();
        let op = assemble_np(&curve).unwrap();
        let t = tgpt(&op, &Contrast::new(1.0).unwrap(), 4).unwrap();
        let rec = recover_coefficients(&t).unwrap();
        for p in curve.nodes() {
            assert!(rec.poly.eval(*p).abs() < 1e-3, "residual {} at {p:?}", rec.poly.eval(*p));
        }
    }

    #[test]
    fn planted_kernel_recovered_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = 2;
        let mut c = DVector::zeros(tgpt_cols(d));
        // kernel of x^2 + y^2 - 2x laid out over columns (1,0),(0,1),(2,0),(1,1),(0,2)
        c[0] = -2.0;
        c[2] = 1.0;
        c[4] = 1.0;
        let m = planted_kernel_matrix(&mut rng, tgpt_rows(d), &c);
        let t = TgptMatrix::new(d, 1.0, m).unwrap();
        let rec = recover_coefficients(&t).unwrap();
        let truth = circle_poly([1.0, 0.0], 1.0).normalize().unwrap();
        assert!(max_coeff_diff(&rec.poly, &truth) < 1e-10);
        assert!(rec.diagnostics.gap_ratio < 1e-12);
        let res = kernel_residual(&t, &rec.poly).unwrap();
        assert!(res < 1e-12, "kernel residual {res}");
    }

    #[test]
    fn recovery_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut c = DVector::zeros(tgpt_cols(2));
        c[1] = 0.4;
        c[2] = 1.0;
        c[3] = -0.2;
        c[4] = 2.0;
        let m = planted_kernel_matrix(&mut rng, tgpt_rows(2), &c);
        let t1 = TgptMatrix::new(2, 1.0, m.clone()).unwrap();
        let t2 = TgptMatrix::new(2, 1.0, m * 7.3).unwrap();
        let p1 = recover_coefficients(&t1).unwrap().poly;
        let p2 = recover_coefficients(&t2).unwrap().poly;
        assert!(max_coeff_diff(&p1, &p2) < 1e-12);
    }

    #[test]
    fn noise_degrades_recovery_monotonically() {
        let truth = circle_poly([1.0, 0.0], 1.0).normalize().unwrap();
        let mut c = DVector::zeros(tgpt_cols(2));
        c[0] = -2.0;
        c[2] = 1.0;
        c[4] = 1.0;
        let mut medians = Vec::new();
        for (k, eps) in [1e-8, 1e-4, 1e-2].into_iter().enumerate() {
            let mut errs = Vec::new();
            for trial in 0..20 {
                let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial + k as u64 * 100);
                let mut m = planted_kernel_matrix(&mut rng, tgpt_rows(2), &c);
                let scale = eps * m.norm();
                for v in m.iter_mut() {
                    *v += scale * rng.random_range(-1.0..1.0);
                }
                let t = TgptMatrix::new(2, 1.0, m).unwrap();
                let rec = recover_coefficients(&t).unwrap();
                errs.push(max_coeff_diff(&rec.poly, &truth));
            }
            errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            medians.push(errs[errs.len() / 2]);
        }
        assert!(
            medians[0] <= medians[1] && medians[1] <= medians[2],
            "medians not monotone: {medians:?}"
        );
    }

    #[test]
    fn degenerate_kernel_is_flagged_ambiguous() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = tgpt_cols(2);
        let mut c1 = DVector::zeros(n);
        c1[2] = 1.0;
        let mut c2 = DVector::zeros(n);
        c2[4] = 1.0;
        let b = DMatrix::from_fn(tgpt_rows(2), n, |_, _| rng.random_range(-1.0..1.0));
        let proj1 = DMatrix::identity(n, n) - &c1 * c1.transpose();
        let proj2 = DMatrix::identity(n, n) - &c2 * c2.transpose();
        let t = TgptMatrix::new(2, 1.0, b * proj1 * proj2).unwrap();
        let rec = recover_coefficients(&t).unwrap();
        assert!(rec.diagnostics.ambiguous, "two-dimensional kernel not flagged");
    }

    #[test]
    fn degree_scan_finds_minimal_degree() {
        let op = assemble_np(&union_fixture()).unwrap();
        let contrast = Contrast::new(1.0).unwrap();
        let scan = degree_scan(5, DEGREE_SCAN_GAP, |d| tgpt(&op, &contrast, d)).unwrap();
        assert_eq!(scan.degree, 4, "gap ratios {:?}", scan.ratios);
        for r in &scan.ratios[..3] {
            assert!(*r >= DEGREE_SCAN_GAP, "premature kernel at ratios {:?}", scan.ratios);
        }
    }

    #[test]
    fn degree_scan_reports_absence() {
        // an ellipse is not a polynomial level set of degree 1
        let curve = make_shape(&ShapeSpec::Ellipse { a: 2.0, b: 1.0 }, 128).unwrap();
        let op = assemble_np(&curve).unwrap();
        let contrast = Contrast::new(1.0).unwrap();
        let err = degree_scan(1, DEGREE_SCAN_GAP, |d| tgpt(&op, &contrast, d)).unwrap_err();
        assert!(matches!(err, InversionError::NoKernel { d_max: 1, .. }));
    }

    #[test]
    fn residual_rejects_degree_mismatch() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = DMatrix::from_fn(tgpt_rows(1), tgpt_cols(1), |_, _| rng.random_range(-1.0..1.0));
        let t = TgptMatrix::new(1, 1.0, m).unwrap();
        let g = circle_poly([1.0, 0.0], 1.0);
        assert!(matches!(
            kernel_residual(&t, &g),
            Err(InversionError::DegreeMismatch { poly: 2, d: 1 })
        ));
    }
}
