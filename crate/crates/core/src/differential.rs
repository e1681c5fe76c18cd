//! Real differentials of slice maps assembled from the standard set of
//! curves, and conformality audits of the resulting matrices.
//!
//! Columns are always ordered `(df·1, df·I, df·I₂, …, df·I_{dim−1})` for an
//! adapted basis `(1, I, I₂, …)` at the base point.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::{Algebra, Basis, HyperNum, SlicePoint};
use crate::error::{Error, Result};
use crate::sampling::{self, random_unit};
use crate::stem::{StemFunction, SymmetricDomain};
use rand::Rng;

/// Step used by [`jacobian_numeric`] unless the caller picks another.
pub const DEFAULT_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CurveKind {
    /// `α(t) = (x + t) + Iy`
    Alpha,
    /// `β_I(t) = x + I(y + t)`
    BetaI,
    /// `Γ_{I_l}(t) = x + (I cos(t/y) + I_l sin(t/y))·y`, used when `y > 0`
    Gamma(usize),
    /// `β_{I_l}(t) = x + I_l t`, used when `y = 0`
    BetaL(usize),
}

/// One curve of the standard set through a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curve {
    pub kind: CurveKind,
    base: HyperNum,
    x: f64,
    y: f64,
    unit: HyperNum,
    direction: HyperNum,
}

impl Curve {
    pub fn at(&self, t: f64) -> HyperNum {
        match self.kind {
            CurveKind::Alpha => self.base + HyperNum::real(self.base.algebra(), t),
            CurveKind::BetaI => self.base + self.unit * t,
            CurveKind::BetaL(_) => self.base + self.direction * t,
            CurveKind::Gamma(_) => {
                let s = t / self.y;
                let arc = self.unit * s.cos() + self.direction * s.sin();
                HyperNum::real(self.base.algebra(), self.x) + arc * self.y
            }
        }
    }

    /// Velocity at `t = 0`, which is the matching basis vector.
    pub fn velocity(&self) -> HyperNum {
        match self.kind {
            CurveKind::Alpha => HyperNum::one(self.base.algebra()),
            CurveKind::BetaI => self.unit,
            CurveKind::BetaL(_) | CurveKind::Gamma(_) => self.direction,
        }
    }
}

/// The standard set of curves at a point for a given adapted basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    pub point: SlicePoint,
    pub basis: Basis,
    pub curves: Vec<Curve>,
}

/// Builds the standard curves at `p`. The basis must start with `(1, p.unit)`.
pub fn standard_curves(p: &SlicePoint, basis: &Basis) -> Result<CurveSet> {
    let algebra = p.algebra();
    if basis.dim() != algebra.dim() {
        return Err(Error::DimensionMismatch {
            left: basis.dim(),
            right: algebra.dim(),
        });
    }
    let units = basis.units();
    if units[0].max_abs_diff(&HyperNum::one(algebra)) > 1e-12
        || units[1].max_abs_diff(&p.unit.value()) > 1e-12
    {
        return Err(Error::Alignment);
    }
    let base = p.reconstruct();
    let unit = p.unit.value();
    let make = |kind, direction| Curve {
        kind,
        base,
        x: p.x,
        y: p.y,
        unit,
        direction,
    };
    let mut curves = vec![make(CurveKind::Alpha, units[0]), make(CurveKind::BetaI, unit)];
    for (l, dir) in units.iter().enumerate().skip(2) {
        let kind = if p.y > 0.0 {
            CurveKind::Gamma(l)
        } else {
            CurveKind::BetaL(l)
        };
        curves.push(make(kind, *dir));
    }
    Ok(CurveSet {
        point: *p,
        basis: basis.clone(),
        curves,
    })
}

/// Real `N × dim` matrix of a differential in adapted-basis columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferentialMatrix {
    matrix: DMatrix<f64>,
}

impl DifferentialMatrix {
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.first().map(|c| c.len()).unwrap_or(0);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::Configuration("ragged Jacobian columns".into()));
        }
        Ok(DifferentialMatrix {
            matrix: DMatrix::from_fn(n, columns.len(), |r, c| columns[c][r]),
        })
    }

    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        DifferentialMatrix { matrix }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn ambient_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn column(&self, l: usize) -> Vec<f64> {
        self.matrix.column(l).iter().copied().collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.matrix.nrows())
            .map(|r| self.matrix.row(r).iter().copied().collect())
            .collect()
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.matrix[(row, col)]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        (&self.matrix - &other.matrix).abs().max()
    }

    pub fn is_finite(&self) -> bool {
        self.matrix.iter().all(|v| v.is_finite())
    }

    /// Keeps only the listed rows.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        DifferentialMatrix {
            matrix: self.matrix.select_rows(rows.iter()),
        }
    }
}

/// Flattens algebra-valued components into one real vector.
pub fn flatten(values: &[HyperNum]) -> Vec<f64> {
    values.iter().flat_map(|v| v.coeffs().to_vec()).collect()
}

/// Central differences of `map` along each standard curve at `p`.
pub fn jacobian_numeric<F>(map: F, p: &SlicePoint, basis: &Basis, h: f64) -> Result<DifferentialMatrix>
where
    F: Fn(&HyperNum) -> Result<Vec<f64>>,
{
    let set = standard_curves(p, basis)?;
    let stencil_err = |e: Error| match e {
        Error::Domain { .. } | Error::Pole | Error::Stencil { .. } => Error::Stencil {
            x: p.x,
            y: p.y,
            h,
        },
        other => other,
    };
    let mut columns = Vec::with_capacity(set.curves.len());
    for curve in &set.curves {
        let plus = map(&curve.at(h)).map_err(stencil_err)?;
        let minus = map(&curve.at(-h)).map_err(stencil_err)?;
        if plus.len() != minus.len() {
            return Err(Error::Configuration("map output length varies".into()));
        }
        columns.push(
            plus.iter()
                .zip(&minus)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect(),
        );
    }
    DifferentialMatrix::from_columns(&columns)
}

/// Closed-form differential of the slice function induced by `stem`:
/// `[∂ₓF₁ + I∂ₓF₂, ∂ᵧF₁ + I∂ᵧF₂, I₂F₂/y, …]`, with `F₂/y` replaced by its
/// limit `∂ᵧF₂(x, 0)` on the real axis.
pub fn jacobian_slice_analytic(
    stem: &StemFunction,
    p: &SlicePoint,
    basis: &Basis,
) -> Result<DifferentialMatrix> {
    standard_curves(p, basis)?;
    let d = stem.partials(p.x, p.y)?;
    let mut columns = vec![
        flatten(&stem.combine(&d.dx1, &d.dx2, &p.unit)?),
        flatten(&stem.combine(&d.dy1, &d.dy2, &p.unit)?),
    ];
    let spherical = stem.spherical_derivative(p)?;
    for unit in &basis.units()[2..] {
        let col: Vec<HyperNum> = spherical.iter().map(|s| *unit * *s).collect();
        columns.push(flatten(&col));
    }
    DifferentialMatrix::from_columns(&columns)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Degenerate,
}

/// Conformality of a group of columns `B`: how far `ᵗBB` is from `k·I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockReport {
    pub column_norms: Vec<f64>,
    /// Mean squared column norm.
    pub factor: f64,
    /// Largest `|cos|` of the angle between two columns.
    pub orthogonality_residual: f64,
    /// `max norm / min norm − 1`.
    pub norm_ratio_deviation: f64,
    /// `max |ᵗBB − kI| / k`.
    pub residual: f64,
    pub verdict: Verdict,
}

impl BlockReport {
    pub fn passes(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

pub fn block_report(block: &DMatrix<f64>, tol: f64) -> BlockReport {
    let ncols = block.ncols();
    let norms: Vec<f64> = (0..ncols).map(|c| block.column(c).norm()).collect();
    let max_norm = norms.iter().copied().fold(0.0, f64::max);
    let min_norm = norms.iter().copied().fold(f64::INFINITY, f64::min);
    if ncols == 0 || max_norm < tol {
        return BlockReport {
            column_norms: norms,
            factor: 0.0,
            orthogonality_residual: 0.0,
            norm_ratio_deviation: 0.0,
            residual: 0.0,
            verdict: Verdict::Degenerate,
        };
    }
    let gram = block.transpose() * block;
    let k = gram.diagonal().mean();
    let mut residual = 0.0f64;
    let mut ortho = 0.0f64;
    for a in 0..ncols {
        for b in 0..ncols {
            let target = if a == b { k } else { 0.0 };
            residual = residual.max((gram[(a, b)] - target).abs() / k);
            if a != b {
                let denom = (gram[(a, a)] * gram[(b, b)]).sqrt();
                ortho = ortho.max(if denom > 0.0 {
                    gram[(a, b)].abs() / denom
                } else {
                    1.0
                });
            }
        }
    }
    let ratio = if min_norm > 0.0 {
        max_norm / min_norm - 1.0
    } else {
        f64::INFINITY
    };
    BlockReport {
        column_norms: norms,
        factor: k,
        orthogonality_residual: ortho,
        norm_ratio_deviation: ratio,
        residual,
        verdict: if residual <= tol {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalityReport {
    pub tolerance: f64,
    /// Columns `df·1, df·I` (restriction to the slice `ℂ_I`).
    pub slice_block: BlockReport,
    /// Columns `df·I₂ … df·I_{dim−1}` (restriction to `ℂ_I^⊥`).
    pub perp_block: BlockReport,
    pub full: BlockReport,
}

impl ConformalityReport {
    pub fn slice_conformal(&self) -> bool {
        self.slice_block.passes() && self.perp_block.passes()
    }

    pub fn fully_conformal(&self) -> bool {
        self.full.passes()
    }
}

/// Audits the slice block, the orthogonal block and the full matrix.
/// Residuals are relative to each block's conformal factor.
pub fn conformality_audit(j: &DifferentialMatrix, tol: f64) -> Result<ConformalityReport> {
    let m = j.matrix();
    if m.ncols() < 4 {
        return Err(Error::Configuration(format!(
            "expected at least 4 columns, got {}",
            m.ncols()
        )));
    }
    let slice = m.columns(0, 2).into_owned();
    let perp = m.columns(2, m.ncols() - 2).into_owned();
    Ok(ConformalityReport {
        tolerance: tol,
        slice_block: block_report(&slice, tol),
        perp_block: block_report(&perp, tol),
        full: block_report(m, tol),
    })
}

/// Hypotheses of the slice-conformal-curve theorem that a certificate checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// The stem is complex intrinsic.
    Intrinsic,
    /// (a) `dF` is conformal on `D`.
    StemConformal,
    /// (b) `∂ᵧF₂ ≠ 0` on `ℝ ∩ D` and `F₂ ≠ 0` off the real axis.
    NonVanishingF2,
    /// Spot check: slice block of the induced map's differential.
    SpotSliceBlock,
    /// Spot check: orthogonal block of the induced map's differential.
    SpotPerpBlock,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertifyConfig {
    pub tolerance: f64,
    pub samples: usize,
    pub spot_checks: usize,
    pub seed: u64,
    pub algebra: Algebra,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            tolerance: crate::stem::DEFAULT_TOLERANCE,
            samples: 256,
            spot_checks: 32,
            seed: 0,
            algebra: Algebra::Quaternion,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub stem: String,
    pub tolerance: f64,
    pub samples: usize,
    pub intrinsic_residual: f64,
    /// Worst relative conformality residual of `dF` over the samples.
    pub stem_conformality_residual: f64,
    pub stem_degenerate_points: usize,
    /// `min |∂ᵧF₂|` over real-axis samples (`None` if the domain misses ℝ).
    pub min_dy_f2_on_axis: Option<f64>,
    /// `min |F₂|` over off-axis samples.
    pub min_f2_off_axis: f64,
    /// `min |F₂|/|y|` over off-axis samples, the quantity compared to the
    /// tolerance since `|F₂|` itself shrinks linearly towards the axis.
    pub min_f2_over_y_off_axis: f64,
    pub spot_checks: usize,
    pub spot_slice_failures: usize,
    pub spot_perp_failures: usize,
    /// Sampled search for `F(z) = F(w)` with `z ≠ w`. Finding none does not
    /// prove injectivity.
    pub injectivity_witness: Option<[(f64, f64); 2]>,
    pub failing: Vec<Condition>,
    pub pass: bool,
}

/// Certifies the theorem hypotheses for `stem` on `domain` with spot checks
/// of the induced slice map's own differential.
pub fn certify_theorem(
    stem: &StemFunction,
    domain: &SymmetricDomain,
    cfg: &CertifyConfig,
) -> Result<Certificate> {
    certify_with_jacobian(stem, domain, cfg, |p, b| jacobian_slice_analytic(stem, p, b))
}

/// Like [`certify_theorem`], but spot checks use `jacobian`, e.g. the
/// differential of a chart that the stem only describes along one slice.
pub fn certify_with_jacobian<J>(
    stem: &StemFunction,
    domain: &SymmetricDomain,
    cfg: &CertifyConfig,
    jacobian: J,
) -> Result<Certificate>
where
    J: Fn(&SlicePoint, &Basis) -> Result<DifferentialMatrix>,
{
    if cfg.samples == 0 {
        return Err(Error::Configuration("certificate needs samples".into()));
    }
    let tol = cfg.tolerance;
    let intrinsic = stem.check_intrinsic(cfg.samples, cfg.seed, tol)?;
    let intrinsic_residual = intrinsic
        .even_residual
        .max(intrinsic.odd_residual)
        .max(intrinsic.axis_residual);

    let samples = domain.sample(cfg.seed ^ 0x5eed, cfg.samples);
    let on_axis: Vec<_> = samples.iter().filter(|s| s.1 == 0.0).collect();
    if domain.contains_real_axis() && on_axis.is_empty() {
        return Err(Error::Configuration(
            "domain meets the real axis but no real samples were drawn".into(),
        ));
    }

    let mut conf_residual = 0.0f64;
    let mut degenerate = 0usize;
    let mut conf_fail = false;
    let mut min_axis = f64::INFINITY;
    let mut min_off = f64::INFINITY;
    let mut min_off_scaled = f64::INFINITY;
    for &(x, y) in &samples {
        let d = stem.partials(x, y)?;
        let mut ux = flatten(&d.dx1);
        ux.extend(flatten(&d.dx2));
        let mut uy = flatten(&d.dy1);
        uy.extend(flatten(&d.dy2));
        let block = DifferentialMatrix::from_columns(&[ux, uy])?;
        let r = block_report(block.matrix(), tol);
        match r.verdict {
            Verdict::Degenerate => {
                degenerate += 1;
                conf_fail = true;
            }
            Verdict::Fail => conf_fail = true,
            Verdict::Pass => {}
        }
        conf_residual = conf_residual.max(r.residual);

        if y == 0.0 {
            min_axis = min_axis.min(vec_norm(&d.dy2));
        } else {
            let f2 = vec_norm(&stem.eval(x, y)?.f2);
            min_off = min_off.min(f2);
            min_off_scaled = min_off_scaled.min(f2 / y.abs());
        }
    }
    let axis_ok = !domain.contains_real_axis() || min_axis > tol;
    let off_ok = min_off_scaled > tol;

    let mut failing = Vec::new();
    if !intrinsic.pass {
        failing.push(Condition::Intrinsic);
    }
    if conf_fail {
        failing.push(Condition::StemConformal);
    }
    if !(axis_ok && off_ok) {
        failing.push(Condition::NonVanishingF2);
    }

    let mut spot_slice = 0;
    let mut spot_perp = 0;
    let mut spot_checks = 0;
    if failing.is_empty() {
        let mut rng = sampling::rng(cfg.seed ^ 0x5a0f);
        let ((xa, xb), (_, yb)) = domain.sampling_box();
        let ya = domain.y_abs.0.max(0.05 * yb);
        for _ in 0..cfg.spot_checks {
            let x = rng.random_range(xa..=xb);
            let y = rng.random_range(ya..=yb);
            let p = SlicePoint::new(x, y, random_unit(&mut rng, cfg.algebra))?;
            let basis = p.unit.complete_basis();
            let report = conformality_audit(&jacobian(&p, &basis)?, tol)?;
            spot_checks += 1;
            if !report.slice_block.passes() {
                spot_slice += 1;
            }
            if !report.perp_block.passes() {
                spot_perp += 1;
            }
        }
        if spot_slice > 0 {
            failing.push(Condition::SpotSliceBlock);
        }
        if spot_perp > 0 {
            failing.push(Condition::SpotPerpBlock);
        }
    }

    Ok(Certificate {
        stem: stem.name().to_string(),
        tolerance: tol,
        samples: cfg.samples,
        intrinsic_residual,
        stem_conformality_residual: conf_residual,
        stem_degenerate_points: degenerate,
        min_dy_f2_on_axis: domain.contains_real_axis().then_some(min_axis),
        min_f2_off_axis: min_off,
        min_f2_over_y_off_axis: min_off_scaled,
        spot_checks,
        spot_slice_failures: spot_slice,
        spot_perp_failures: spot_perp,
        injectivity_witness: injectivity_witness(stem, &samples)?,
        pass: failing.is_empty(),
        failing,
    })
}

fn vec_norm(v: &[HyperNum]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Looks for two well-separated samples (mirrored across the real axis as
/// well) with numerically equal stem values.
fn injectivity_witness(stem: &StemFunction, samples: &[(f64, f64)]) -> Result<Option<[(f64, f64); 2]>> {
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(2 * samples.len());
    for &(x, y) in samples {
        pts.push((x, y));
        if y != 0.0 {
            pts.push((x, -y));
        }
    }
    let values = pts
        .iter()
        .map(|&(x, y)| {
            let v = stem.eval(x, y)?;
            let mut flat = flatten(&v.f1);
            flat.extend(flatten(&v.f2));
            Ok(flat)
        })
        .collect::<Result<Vec<_>>>()?;
    for a in 0..pts.len() {
        for b in (a + 1)..pts.len() {
            let dz = (pts[a].0 - pts[b].0).hypot(pts[a].1 - pts[b].1);
            if dz < 1e-6 {
                continue;
            }
            let scale = values[a].iter().map(|v| v.abs()).fold(1.0, f64::max);
            let df = values[a]
                .iter()
                .zip(&values[b])
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max);
            if df <= 1e-12 * scale {
                return Ok(Some([pts[a], pts[b]]));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ImaginaryUnit;
    use crate::stem::{conjugate_stem, identity_stem, StemPartials, Target};

    fn quat(w: f64, i: f64, j: f64, k: f64) -> HyperNum {
        HyperNum::quaternion(w, i, j, k)
    }

    fn i_unit() -> ImaginaryUnit {
        ImaginaryUnit::basis(Algebra::Quaternion, 1)
    }

    #[test]
    fn gamma_curve_matches_explicit_arc() {
        let p = SlicePoint::new(1.0, 1.0, i_unit()).unwrap();
        let basis = Basis::canonical(Algebra::Quaternion);
        let set = standard_curves(&p, &basis).unwrap();
        assert_eq!(set.curves[2].kind, CurveKind::Gamma(2));
        for t in [-0.3f64, 0.0, 0.4, 1.2] {
            let expected = quat(1.0, t.cos(), t.sin(), 0.0);
            assert!(set.curves[2].at(t).max_abs_diff(&expected) < 1e-15);
        }
        let h = 1e-6;
        for c in &set.curves {
            let v = (c.at(h) - c.at(-h)) / (2.0 * h);
            assert!(v.max_abs_diff(&c.velocity()) < 1e-8);
            assert!(c.at(0.0).max_abs_diff(&p.reconstruct()) < 1e-15);
        }
    }

    #[test]
    fn real_points_use_straight_lines() {
        let p = SlicePoint::real(0.5, i_unit());
        let set = standard_curves(&p, &Basis::canonical(Algebra::Quaternion)).unwrap();
        assert_eq!(set.curves[2].kind, CurveKind::BetaL(2));
        assert_eq!(set.curves[2].at(0.25), quat(0.5, 0.0, 0.25, 0.0));
    }

    #[test]
    fn misaligned_basis_is_rejected() {
        let p = SlicePoint::new(0.0, 1.0, ImaginaryUnit::basis(Algebra::Quaternion, 2)).unwrap();
        assert_eq!(
            standard_curves(&p, &Basis::canonical(Algebra::Quaternion)),
            Err(Error::Alignment)
        );
    }

    #[test]
    fn identity_and_constant_maps() {
        let unit = ImaginaryUnit::from_imaginary(&quat(0.0, 1.0, -2.0, 0.5)).unwrap();
        let p = SlicePoint::new(0.2, 0.9, unit).unwrap();
        let basis = unit.complete_basis();
        let j = jacobian_numeric(|q| Ok(q.coeffs().to_vec()), &p, &basis, DEFAULT_STEP).unwrap();
        let expected = DifferentialMatrix::from_matrix(basis.matrix());
        assert!(j.max_abs_diff(&expected) < 1e-9);
        let report = conformality_audit(&j, 1e-8).unwrap();
        assert!(report.fully_conformal());
        assert!((report.full.factor - 1.0).abs() < 1e-9);

        let c = jacobian_numeric(|_| Ok(vec![1.0, 2.0]), &p, &basis, DEFAULT_STEP).unwrap();
        assert_eq!(c.matrix().abs().max(), 0.0);
        let r = conformality_audit(&c, 1e-9).unwrap();
        assert_eq!(r.full.verdict, Verdict::Degenerate);

        let exact = jacobian_slice_analytic(&identity_stem(), &p, &basis).unwrap();
        assert!(exact.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn stencil_errors_surface() {
        let p = SlicePoint::new(0.0, 1.0, i_unit()).unwrap();
        let basis = Basis::canonical(Algebra::Quaternion);
        let r = jacobian_numeric(
            |q| if q.re() > 0.0 { Err(Error::Domain { x: q.re(), y: 0.0 }) } else { Ok(vec![0.0]) },
            &p,
            &basis,
            1e-3,
        );
        assert!(matches!(r, Err(Error::Stencil { .. })));
    }

    #[test]
    fn psi_like_matrix_fails_perp_block() {
        // columns (1,1), (i,i), (j,j), (k,0) in ℍ²
        let cols = vec![
            vec![1., 0., 0., 0., 1., 0., 0., 0.],
            vec![0., 1., 0., 0., 0., 1., 0., 0.],
            vec![0., 0., 1., 0., 0., 0., 1., 0.],
            vec![0., 0., 0., 1., 0., 0., 0., 0.],
        ];
        let r = conformality_audit(&DifferentialMatrix::from_columns(&cols).unwrap(), 1e-9).unwrap();
        assert!(r.slice_block.passes());
        assert_eq!(r.perp_block.verdict, Verdict::Fail);
        assert!((r.perp_block.column_norms[0] - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.perp_block.column_norms[1], 1.0);
    }

    #[test]
    fn certificate_for_identity_curve() {
        // (z, z) with A = ℝ: dF conformal, F₂ = (y, y)
        let stem = StemFunction::real("diag", 2, SymmetricDomain::plane(), |x, y| {
            (vec![x, x], vec![y, y])
        })
        .with_partials(|_, _| StemPartials::real(&[1., 1.], &[0., 0.], &[0., 0.], &[1., 1.]));
        let cert = certify_theorem(&stem, &SymmetricDomain::plane(), &CertifyConfig::default()).unwrap();
        assert!(cert.pass, "{cert:?}");
        assert_eq!(cert.spot_checks, 32);
        assert!((cert.min_dy_f2_on_axis.unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(cert.injectivity_witness, None);
    }

    #[test]
    fn certificate_flags_vanishing_f2() {
        let flat = StemFunction::real("flat", 1, SymmetricDomain::plane(), |x, _| (vec![x], vec![0.0]))
            .with_partials(|_, _| StemPartials::real(&[1.0], &[0.0], &[0.0], &[0.0]));
        let cert = certify_theorem(&flat, &SymmetricDomain::plane(), &CertifyConfig::default()).unwrap();
        assert!(!cert.pass);
        assert!(cert.failing.contains(&Condition::NonVanishingF2));
        assert!(cert.injectivity_witness.is_some());

        let anti = conjugate_stem();
        let cert = certify_theorem(&anti, &SymmetricDomain::plane(), &CertifyConfig::default()).unwrap();
        // z̄ has a conformal (orientation-reversing) differential
        assert!(!cert.failing.contains(&Condition::StemConformal));
        assert_eq!(anti.target(), Target::Real);
    }
}
