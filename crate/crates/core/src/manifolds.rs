//! Catalog of parameterized hypercomplex Riemann manifolds.
//!
//! Each chart is a map `x + Iy ↦ ℝᴺ` built from one or more algebra-valued
//! components. A component may be kept whole, or reduced to its real or
//! imaginary part when the other part vanishes identically (the catenoid's
//! height `x`, the helicoid's axis `Iy`).

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{decompose, Algebra, Basis, HyperNum, ImaginaryUnit, SlicePoint};
use crate::differential::{
    self, certify_with_jacobian, conformality_audit, flatten, jacobian_numeric, BlockReport,
    Certificate, CertifyConfig, ConformalityReport, DifferentialMatrix, Verdict,
};
use crate::error::{Error, Result};
use crate::parallel::Execution;
use crate::sampling::PointRanges;
use crate::stem::{StemFunction, StemPartials, SymmetricDomain};

/// Which real coordinates of a component appear in the chart's output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    Full,
    RealOnly,
    ImagOnly,
}

impl Layout {
    pub fn width(self, dim: usize) -> usize {
        match self {
            Layout::Full => dim,
            Layout::RealOnly => 1,
            Layout::ImagOnly => dim - 1,
        }
    }

    fn range(self, dim: usize) -> std::ops::Range<usize> {
        match self {
            Layout::Full => 0..dim,
            Layout::RealOnly => 0..1,
            Layout::ImagOnly => 1..dim,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConformalityClass {
    /// Conformal on `ℂ_I` and on `ℂ_I^⊥` separately.
    Slice,
    /// Conformal as a whole (and therefore also slice conformal).
    Full,
    /// Only an immersion: the differential has full rank.
    Immersion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pole {
    North,
    South,
}

/// Parameters for charts that need them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartParams {
    pub algebra: Algebra,
    pub theta: f64,
    pub n: u32,
    pub pole: Pole,
}

impl Default for ChartParams {
    fn default() -> Self {
        ChartParams {
            algebra: Algebra::Quaternion,
            theta: PI / 4.0,
            n: 2,
            pole: Pole::North,
        }
    }
}

#[derive(Debug, Clone)]
enum ChartKind {
    Stem(StemFunction),
    Psi,
}

/// A named chart together with its domain and expected conformality class.
#[derive(Debug, Clone)]
pub struct ManifoldChart {
    name: String,
    algebra: Algebra,
    layouts: Vec<Layout>,
    domain: SymmetricDomain,
    class: ConformalityClass,
    kind: ChartKind,
}

pub const CATALOG: [&str; 8] = [
    "sphere-north",
    "sphere-south",
    "helicoid",
    "catenoid",
    "deformation",
    "nroot",
    "log",
    "psi",
];

impl ManifoldChart {
    /// Looks a chart up by name. `sphere` picks the pole from `params`;
    /// `graph:<expr>` builds the graph of an expression stem.
    pub fn from_name(name: &str, params: &ChartParams) -> Result<Self> {
        let a = params.algebra;
        if a == Algebra::Real {
            return Err(Error::UnsupportedDimension(1));
        }
        if let Some(text) = name.strip_prefix("graph:") {
            let stem = crate::expr::parse_stem_expr(text)?.to_stem(text);
            return Self::graph(stem, a);
        }
        match name {
            "sphere" => Ok(Self::sphere(params.pole, a)),
            "sphere-north" => Ok(Self::sphere(Pole::North, a)),
            "sphere-south" => Ok(Self::sphere(Pole::South, a)),
            "helicoid" => Ok(Self::helicoid(a)),
            "catenoid" => Ok(Self::catenoid(a)),
            "deformation" => Self::deformation(params.theta, a),
            "nroot" => Self::nroot(params.n, a),
            "log" => Ok(Self::log(a)),
            "psi" => Self::psi(a),
            other => Err(Error::UnknownChart(other.to_string())),
        }
    }

    fn from_stem(
        stem: StemFunction,
        algebra: Algebra,
        layouts: Vec<Layout>,
        class: ConformalityClass,
    ) -> Self {
        ManifoldChart {
            name: stem.name().to_string(),
            algebra,
            layouts,
            domain: *stem.domain(),
            class,
            kind: ChartKind::Stem(stem),
        }
    }

    pub fn sphere(pole: Pole, algebra: Algebra) -> Self {
        Self::from_stem(
            sphere_stem(pole),
            algebra,
            vec![Layout::Full, Layout::RealOnly],
            ConformalityClass::Full,
        )
    }

    pub fn helicoid(algebra: Algebra) -> Self {
        Self::from_stem(
            helicoid_stem(),
            algebra,
            vec![Layout::Full, Layout::ImagOnly],
            ConformalityClass::Slice,
        )
    }

    pub fn catenoid(algebra: Algebra) -> Self {
        Self::from_stem(
            catenoid_stem(),
            algebra,
            vec![Layout::Full, Layout::RealOnly],
            ConformalityClass::Slice,
        )
    }

    pub fn deformation(theta: f64, algebra: Algebra) -> Result<Self> {
        Ok(Self::from_stem(
            deformation_stem(theta)?,
            algebra,
            vec![Layout::Full, Layout::Full],
            ConformalityClass::Slice,
        ))
    }

    pub fn nroot(n: u32, algebra: Algebra) -> Result<Self> {
        Ok(Self::from_stem(
            nroot_stem(n)?,
            algebra,
            vec![Layout::Full, Layout::Full],
            ConformalityClass::Slice,
        ))
    }

    /// The logarithm manifold parameterized by `E(x + Iy) = (exp(x + Iy), Iy)`.
    pub fn log(algebra: Algebra) -> Self {
        Self::from_stem(
            log_stem(),
            algebra,
            vec![Layout::Full, Layout::ImagOnly],
            ConformalityClass::Immersion,
        )
    }

    /// `x + Iy ↦ (x + Iy, x + ψ(I)y)` over ℍ, whose orthogonal block is not
    /// conformal although each slice is mapped conformally.
    pub fn psi(algebra: Algebra) -> Result<Self> {
        if algebra != Algebra::Quaternion {
            return Err(Error::Parameter(format!(
                "psi is defined on the quaternions only, got dimension {}",
                algebra.dim()
            )));
        }
        Ok(ManifoldChart {
            name: "psi".into(),
            algebra,
            layouts: vec![Layout::Full, Layout::Full],
            domain: SymmetricDomain::plane(),
            class: ConformalityClass::Slice,
            kind: ChartKind::Psi,
        })
    }

    /// The slice function induced by `stem`, one full component per stem
    /// component.
    pub fn slice_function(stem: StemFunction, algebra: Algebra) -> Result<Self> {
        if stem.target().algebra() != Algebra::Real && stem.target().algebra() != algebra {
            return Err(Error::DimensionMismatch {
                left: stem.target().algebra().dim(),
                right: algebra.dim(),
            });
        }
        Ok(Self::from_stem(
            stem.clone(),
            algebra,
            vec![Layout::Full; stem.arity()],
            ConformalityClass::Slice,
        ))
    }

    /// Graph `q ↦ (q, f(q))` of the slice function induced by `stem`.
    pub fn graph(stem: StemFunction, algebra: Algebra) -> Result<Self> {
        if stem.target().algebra() != Algebra::Real && stem.target().algebra() != algebra {
            return Err(Error::DimensionMismatch {
                left: stem.target().algebra().dim(),
                right: algebra.dim(),
            });
        }
        let arity = stem.arity();
        let name = format!("graph:{}", stem.name());
        let inner = stem.clone();
        let outer = stem;
        let graph = StemFunction::new(
            name.clone(),
            inner.target(),
            arity + 1,
            *inner.domain(),
            move |x, y| {
                let v = inner.eval(x, y).expect("graph evaluated inside its domain");
                let a = v.f1.first().map(|c| c.algebra()).unwrap_or(Algebra::Real);
                let mut f1 = vec![HyperNum::real(a, x)];
                let mut f2 = vec![HyperNum::real(a, y)];
                f1.extend(v.f1);
                f2.extend(v.f2);
                crate::stem::StemValue { f1, f2 }
            },
        )
        .with_partials(move |x, y| {
            let d = outer.partials(x, y).expect("graph differentiated inside its domain");
            let a = d.dx1.first().map(|c| c.algebra()).unwrap_or(Algebra::Real);
            let one = HyperNum::one(a);
            let zero = HyperNum::zero(a);
            let prepend = |head: HyperNum, tail: Vec<HyperNum>| {
                let mut v = vec![head];
                v.extend(tail);
                v
            };
            StemPartials {
                dx1: prepend(one, d.dx1),
                dy1: prepend(zero, d.dy1),
                dx2: prepend(zero, d.dx2),
                dy2: prepend(one, d.dy2),
            }
        });
        Ok(ManifoldChart {
            name,
            algebra,
            layouts: vec![Layout::Full; arity + 1],
            domain: *graph.domain(),
            class: ConformalityClass::Slice,
            kind: ChartKind::Stem(graph),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn layouts(&self) -> &[Layout] {
        &self.layouts
    }

    pub fn domain(&self) -> &SymmetricDomain {
        &self.domain
    }

    pub fn class(&self) -> ConformalityClass {
        self.class
    }

    pub fn stem(&self) -> Option<&StemFunction> {
        match &self.kind {
            ChartKind::Stem(s) => Some(s),
            ChartKind::Psi => None,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.layouts.iter().map(|l| l.width(self.dim())).sum()
    }

    fn check(&self, p: &SlicePoint) -> Result<()> {
        if p.algebra() != self.algebra {
            return Err(Error::DimensionMismatch {
                left: p.algebra().dim(),
                right: self.dim(),
            });
        }
        if !self.domain.contains(p.x, p.y) {
            return Err(Error::Domain { x: p.x, y: p.y });
        }
        Ok(())
    }

    /// Algebra-valued components before any reduction to real or imaginary
    /// parts.
    pub fn components(&self, p: &SlicePoint) -> Result<Vec<HyperNum>> {
        self.check(p)?;
        match &self.kind {
            ChartKind::Stem(s) => s.eval_slice(p),
            ChartKind::Psi => Ok(vec![
                p.reconstruct(),
                HyperNum::real(self.algebra, p.x) + psi(&p.unit).value() * p.y,
            ]),
        }
    }

    /// The induced map into `ℝᴺ`.
    pub fn eval(&self, p: &SlicePoint) -> Result<Vec<f64>> {
        let comps = self.components(p)?;
        Ok(self.project(&comps))
    }

    /// Evaluates at an arbitrary element of the algebra.
    pub fn eval_at(&self, q: &HyperNum) -> Result<Vec<f64>> {
        self.eval(&decompose(q, ImaginaryUnit::default_for(self.algebra)))
    }

    fn project(&self, comps: &[HyperNum]) -> Vec<f64> {
        let d = self.dim();
        comps
            .iter()
            .zip(&self.layouts)
            .flat_map(|(c, l)| c.coeffs()[l.range(d)].to_vec())
            .collect()
    }

    fn output_rows(&self) -> Vec<usize> {
        let d = self.dim();
        self.layouts
            .iter()
            .enumerate()
            .flat_map(|(c, l)| l.range(d).map(move |r| c * d + r))
            .collect()
    }

    /// Closed-form differential in the columns of `basis`.
    pub fn jacobian(&self, p: &SlicePoint, basis: &Basis) -> Result<DifferentialMatrix> {
        self.check(p)?;
        match &self.kind {
            ChartKind::Stem(s) => Ok(differential::jacobian_slice_analytic(s, p, basis)?
                .select_rows(&self.output_rows())),
            ChartKind::Psi => psi_jacobian(p, basis),
        }
    }

    /// Closed-form differential with every output component written in
    /// coordinates of `basis` (imaginary parts in `I, I₂, …`), the layout in
    /// which such matrices are usually displayed.
    pub fn jacobian_in_basis(&self, p: &SlicePoint, basis: &Basis) -> Result<DifferentialMatrix> {
        let j = self.jacobian(p, basis)?;
        let b = basis.matrix();
        let d = self.dim();
        let mut out = DMatrix::zeros(j.ambient_dim(), j.ncols());
        let mut row = 0;
        for l in &self.layouts {
            let r = l.range(d);
            let w = r.len();
            let change = b.view((r.start, r.start), (w, w)).transpose();
            let block = j.matrix().rows(row, w);
            out.rows_mut(row, w).copy_from(&(change * block));
            row += w;
        }
        Ok(DifferentialMatrix::from_matrix(out))
    }

    /// Central-difference differential along the standard curves.
    pub fn jacobian_numeric(&self, p: &SlicePoint, basis: &Basis, h: f64) -> Result<DifferentialMatrix> {
        self.check(p)?;
        jacobian_numeric(|q| self.eval_at(q), p, basis, h)
    }

    /// Audits the closed-form differential at `p` in the default adapted basis.
    pub fn audit_point(&self, p: &SlicePoint, tol: f64) -> Result<PointAudit> {
        let basis = p.unit.complete_basis();
        let j = self.jacobian(p, &basis)?;
        let report = conformality_audit(&j, tol)?;
        let min_sv = min_singular_value(j.matrix());
        let pass = match self.class {
            ConformalityClass::Slice => report.slice_conformal(),
            ConformalityClass::Full => report.slice_conformal() && report.fully_conformal(),
            ConformalityClass::Immersion => min_sv > tol,
        };
        Ok(PointAudit {
            point: *p,
            report,
            min_singular_value: min_sv,
            pass,
        })
    }

    /// Points drawn inside the chart's domain (`y ≥ 0.05` off the real axis).
    pub fn point_ranges(&self) -> PointRanges {
        let ((xa, xb), (ya, yb)) = self.domain.sampling_box();
        PointRanges {
            x: (xa, xb),
            y: (ya.max(0.05_f64.min(0.5 * yb)), yb),
            real_fraction: if self.domain.contains_real_axis() { 0.125 } else { 0.0 },
        }
    }

    pub fn sample_points(&self, seed: u64, count: usize) -> Vec<SlicePoint> {
        self.point_ranges().sample_many(seed, self.algebra, count)
    }

    /// Audits `points` and aggregates the per-block verdicts.
    pub fn audit(&self, points: &[SlicePoint], tol: f64, exec: Execution) -> Result<AuditSummary> {
        let audits = exec
            .map(points, |p| self.audit_point(p, tol))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        let block = |pick: fn(&ConformalityReport) -> &BlockReport| {
            let mut s = BlockSummary::default();
            for a in &audits {
                let b = pick(&a.report);
                s.max_residual = s.max_residual.max(b.residual);
                s.max_orthogonality_residual = s.max_orthogonality_residual.max(b.orthogonality_residual);
                s.max_norm_ratio_deviation = s.max_norm_ratio_deviation.max(b.norm_ratio_deviation);
                match b.verdict {
                    Verdict::Pass => s.pass += 1,
                    Verdict::Fail => s.fail += 1,
                    Verdict::Degenerate => s.degenerate += 1,
                }
                if b.verdict != Verdict::Pass && s.first_failure.is_none() {
                    s.first_failure = Some(FailureRecord::new(&a.point, b));
                }
            }
            s
        };
        let slice_block = block(|r| &r.slice_block);
        let perp_block = block(|r| &r.perp_block);
        let full = block(|r| &r.full);
        let min_sv = audits
            .iter()
            .map(|a| a.min_singular_value)
            .fold(f64::INFINITY, f64::min);
        let failing_points = audits.iter().filter(|a| !a.pass).count();
        let verdict = match self.class {
            ConformalityClass::Immersion if failing_points > 0 => "rank deficient",
            ConformalityClass::Immersion => "immersion",
            _ if slice_block.fail + slice_block.degenerate > 0 => "slice block fails",
            _ if perp_block.fail + perp_block.degenerate > 0 => "perp block fails",
            ConformalityClass::Full if failing_points > 0 => "full differential fails",
            ConformalityClass::Full => "conformal",
            ConformalityClass::Slice => "slice conformal",
        };
        Ok(AuditSummary {
            chart: self.name.clone(),
            dim: self.dim(),
            class: self.class,
            points: points.len(),
            tolerance: tol,
            slice_block,
            perp_block,
            full,
            min_singular_value: if points.is_empty() { 0.0 } else { min_sv },
            failing_points,
            verdict: verdict.to_string(),
            pass: failing_points == 0 && !points.is_empty(),
        })
    }

    /// Certifies the hypotheses of the slice-conformal-curve theorem for the
    /// chart's stem, with spot checks on the chart's own differential. The ψ
    /// chart is certified through its restriction to `ℂ_i`, the stem `(z, z)`.
    pub fn certify(&self, cfg: &CertifyConfig) -> Result<Certificate> {
        let cfg = CertifyConfig {
            algebra: self.algebra,
            ..cfg.clone()
        };
        let jac = |p: &SlicePoint, b: &Basis| self.jacobian(p, b);
        match &self.kind {
            ChartKind::Stem(s) => certify_with_jacobian(s, &self.domain, &cfg, jac),
            ChartKind::Psi => {
                let mut cert = certify_with_jacobian(&psi_reference_stem(), &self.domain, &cfg, jac)?;
                cert.stem = self.name.clone();
                Ok(cert)
            }
        }
    }
}

/// Audit of one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointAudit {
    #[serde(skip)]
    pub point: SlicePoint,
    pub report: ConformalityReport,
    pub min_singular_value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureRecord {
    pub x: f64,
    pub y: f64,
    pub unit: Vec<f64>,
    pub column_norms: Vec<f64>,
    pub residual: f64,
}

impl FailureRecord {
    fn new(p: &SlicePoint, b: &BlockReport) -> Self {
        FailureRecord {
            x: p.x,
            y: p.y,
            unit: p.unit.value().coeffs()[1..].to_vec(),
            column_norms: b.column_norms.clone(),
            residual: b.residual,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct BlockSummary {
    pub max_residual: f64,
    pub max_orthogonality_residual: f64,
    pub max_norm_ratio_deviation: f64,
    pub pass: usize,
    pub fail: usize,
    pub degenerate: usize,
    pub first_failure: Option<FailureRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditSummary {
    pub chart: String,
    pub dim: usize,
    pub class: ConformalityClass,
    pub points: usize,
    pub tolerance: f64,
    pub slice_block: BlockSummary,
    pub perp_block: BlockSummary,
    pub full: BlockSummary,
    pub min_singular_value: f64,
    pub failing_points: usize,
    pub verdict: String,
    pub pass: bool,
}

pub fn min_singular_value(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.min()
}

fn sphere_stem(pole: Pole) -> StemFunction {
    let s = match pole {
        Pole::North => 1.0,
        Pole::South => -1.0,
    };
    let name = match pole {
        Pole::North => "sphere-north",
        Pole::South => "sphere-south",
    };
    StemFunction::real(name, 2, SymmetricDomain::plane(), move |x, y| {
        let d = 1.0 + x * x + y * y;
        (
            vec![2.0 * x / d, s * (x * x + y * y - 1.0) / d],
            vec![s * 2.0 * y / d, 0.0],
        )
    })
    .with_partials(move |x, y| {
        let d2 = (1.0 + x * x + y * y).powi(2);
        let gx1 = 2.0 * (1.0 - x * x + y * y) / d2;
        let gy1 = -4.0 * x * y / d2;
        let gx2 = -4.0 * x * y / d2;
        let gy2 = 2.0 * (1.0 + x * x - y * y) / d2;
        StemPartials::real(
            &[gx1, s * 4.0 * x / d2],
            &[gy1, s * 4.0 * y / d2],
            &[s * gx2, 0.0],
            &[s * gy2, 0.0],
        )
    })
}

fn helicoid_stem() -> StemFunction {
    StemFunction::real("helicoid", 2, SymmetricDomain::plane(), |x, y| {
        let s = x.sinh();
        (vec![s * y.cos(), 0.0], vec![s * y.sin(), y])
    })
    .with_partials(|x, y| {
        let (s, c) = (x.sinh(), x.cosh());
        StemPartials::real(
            &[c * y.cos(), 0.0],
            &[-s * y.sin(), 0.0],
            &[c * y.sin(), 0.0],
            &[s * y.cos(), 1.0],
        )
    })
}

fn catenoid_stem() -> StemFunction {
    StemFunction::real("catenoid", 2, SymmetricDomain::strip(PI), |x, y| {
        let c = x.cosh();
        (vec![c * y.cos(), x], vec![c * y.sin(), 0.0])
    })
    .with_partials(|x, y| {
        let (s, c) = (x.sinh(), x.cosh());
        StemPartials::real(
            &[s * y.cos(), 1.0],
            &[-c * y.sin(), 0.0],
            &[s * y.sin(), 0.0],
            &[c * y.cos(), 0.0],
        )
    })
}

/// `A = cosh x cos θ + sinh x sin θ` and `B = sinh x cos θ + cosh x sin θ`.
pub fn deformation_coefficients(x: f64, theta: f64) -> (f64, f64) {
    let (s, c) = (x.sinh(), x.cosh());
    let (st, ct) = theta.sin_cos();
    (c * ct + s * st, s * ct + c * st)
}

fn deformation_stem(theta: f64) -> Result<StemFunction> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::Parameter(format!("theta = {theta} outside [0, π/2]")));
    }
    let (st, ct) = theta.sin_cos();
    let name = format!("deformation(theta={theta})");
    Ok(StemFunction::real(name, 2, SymmetricDomain::strip(PI), move |x, y| {
        let (_, b) = deformation_coefficients(x, theta);
        (vec![b * y.cos(), x * st], vec![b * y.sin(), y * ct])
    })
    .with_partials(move |x, y| {
        let (a, b) = deformation_coefficients(x, theta);
        StemPartials::real(
            &[a * y.cos(), st],
            &[-b * y.sin(), 0.0],
            &[a * y.sin(), 0.0],
            &[b * y.cos(), ct],
        )
    }))
}

fn nroot_stem(n: u32) -> Result<StemFunction> {
    if n < 2 {
        return Err(Error::Parameter(format!("n = {n} must be at least 2")));
    }
    let nf = n as f64;
    Ok(StemFunction::real(
        format!("nroot(n={n})"),
        2,
        SymmetricDomain::strip(nf * PI),
        move |x, y| {
            let s = x.sinh();
            let t = y / nf;
            (vec![s * y.cos(), nf * t.cos()], vec![s * y.sin(), nf * t.sin()])
        },
    )
    .with_partials(move |x, y| {
        let (s, c) = (x.sinh(), x.cosh());
        let t = y / nf;
        StemPartials::real(
            &[c * y.cos(), 0.0],
            &[-s * y.sin(), -t.sin()],
            &[c * y.sin(), 0.0],
            &[s * y.cos(), t.cos()],
        )
    }))
}

fn log_stem() -> StemFunction {
    StemFunction::real("log", 2, SymmetricDomain::plane(), |x, y| {
        let e = x.exp();
        (vec![e * y.cos(), 0.0], vec![e * y.sin(), y])
    })
    .with_partials(|x, y| {
        let e = x.exp();
        StemPartials::real(
            &[e * y.cos(), 0.0],
            &[-e * y.sin(), 0.0],
            &[e * y.sin(), 0.0],
            &[e * y.cos(), 1.0],
        )
    })
}

fn psi_reference_stem() -> StemFunction {
    StemFunction::holomorphic(
        "psi",
        2,
        SymmetricDomain::plane(),
        |z| vec![z, z],
        |_| vec![Complex64::new(1.0, 0.0); 2],
    )
}

/// `ψ(αi + βj + γk) = (α³i + βj + γ³k)/|α³i + βj + γ³k|`.
pub fn psi(unit: &ImaginaryUnit) -> ImaginaryUnit {
    let c = unit.value();
    let (a, b, g) = (c.coeffs()[1], c.coeffs()[2], c.coeffs()[3]);
    let p = HyperNum::quaternion(0.0, a.powi(3), b, g.powi(3));
    ImaginaryUnit::from_imaginary(&p).expect("ψ never vanishes on the unit sphere")
}

/// Differential of `ψ` at `unit` applied to the tangent vector `v`.
pub fn psi_differential(unit: &ImaginaryUnit, v: &HyperNum) -> HyperNum {
    let c = unit.value();
    let (a, b, g) = (c.coeffs()[1], c.coeffs()[2], c.coeffs()[3]);
    let p = HyperNum::quaternion(0.0, a.powi(3), b, g.powi(3));
    let dp = HyperNum::quaternion(
        0.0,
        3.0 * a * a * v.coeffs()[1],
        v.coeffs()[2],
        3.0 * g * g * v.coeffs()[3],
    );
    let n = p.norm();
    dp / n - p * (p.dot(&dp) / (n * n * n))
}

fn psi_jacobian(p: &SlicePoint, basis: &Basis) -> Result<DifferentialMatrix> {
    differential::standard_curves(p, basis)?;
    let units = basis.units();
    let mut cols = vec![
        flatten(&[units[0], units[0]]),
        flatten(&[units[1], psi(&p.unit).value()]),
    ];
    for l in &units[2..] {
        let second = if p.y > 0.0 {
            psi_differential(&p.unit, l)
        } else {
            psi(&ImaginaryUnit::from_imaginary(l)?).value()
        };
        cols.push(flatten(&[*l, second]));
    }
    DifferentialMatrix::from_columns(&cols)
}

/// Closed-form inverse stereographic charts into `K × ℝ`.
pub fn param_sphere(pole: Pole, p: &SlicePoint) -> Vec<f64> {
    let r2 = p.x * p.x + p.y * p.y;
    let d = 1.0 + r2;
    let q = match pole {
        Pole::North => p.reconstruct(),
        Pole::South => p.reconstruct().conj(),
    };
    let h = match pole {
        Pole::North => (r2 - 1.0) / d,
        Pole::South => (1.0 - r2) / d,
    };
    let mut out: Vec<f64> = (q * (2.0 / d)).coeffs().to_vec();
    out.push(h);
    out
}

/// Inverse of the north chart. Away from the north pole `u/(1−s)` is used,
/// in the southern hemisphere the equivalent `u(1+s)/|u|²`.
pub fn north_inverse(point: &[f64], algebra: Algebra) -> Result<HyperNum> {
    let (u, s) = split_sphere(point, algebra)?;
    if s < 0.0 {
        Ok(u * (1.0 - s).recip())
    } else {
        if u.norm_sqr() == 0.0 {
            return Err(Error::Pole);
        }
        Ok(u * ((1.0 + s) / u.norm_sqr()))
    }
}

/// Inverse of the south chart, `ū/(1+s)` or `ū(1−s)/|u|²`.
pub fn south_inverse(point: &[f64], algebra: Algebra) -> Result<HyperNum> {
    let (u, s) = split_sphere(point, algebra)?;
    if s > 0.0 {
        Ok(u.conj() * (1.0 + s).recip())
    } else {
        if u.norm_sqr() == 0.0 {
            return Err(Error::Pole);
        }
        Ok(u.conj() * ((1.0 - s) / u.norm_sqr()))
    }
}

fn split_sphere(point: &[f64], algebra: Algebra) -> Result<(HyperNum, f64)> {
    let d = algebra.dim();
    if point.len() != d + 1 {
        return Err(Error::DimensionMismatch {
            left: point.len(),
            right: d + 1,
        });
    }
    let norm: f64 = point.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotOnManifold((norm - 1.0).abs()));
    }
    Ok((HyperNum::from_slice(&point[..d])?, point[d]))
}

/// Transition `south⁻¹ ∘ north` between the two sphere charts, which is `1/q`.
pub fn sphere_transition(q: &HyperNum) -> Result<HyperNum> {
    q.inv().map_err(|_| Error::Pole)
}

/// Transition computed by composing the charts numerically.
pub fn sphere_transition_composed(q: &HyperNum) -> Result<HyperNum> {
    if q.norm() == 0.0 {
        return Err(Error::Pole);
    }
    let p = decompose(q, ImaginaryUnit::default_for(q.algebra()));
    south_inverse(&param_sphere(Pole::North, &p), q.algebra())
}

/// `(sinh x cos y + I sinh x sin y, Iy)` with the second factor as its
/// imaginary coordinates.
pub fn param_helicoid(p: &SlicePoint) -> Vec<f64> {
    let s = p.x.sinh();
    let first = HyperNum::real(p.algebra(), s * p.y.cos()) + p.unit.value() * (s * p.y.sin());
    let mut out = first.coeffs().to_vec();
    out.extend_from_slice(&(p.unit.value() * p.y).coeffs()[1..]);
    out
}

/// `(cosh x cos y + I cosh x sin y, x)` on `ℝ × 𝕊(−π, π)`.
pub fn param_catenoid(p: &SlicePoint) -> Result<Vec<f64>> {
    if p.y.abs() >= PI {
        return Err(Error::Domain { x: p.x, y: p.y });
    }
    let c = p.x.cosh();
    let first = HyperNum::real(p.algebra(), c * p.y.cos()) + p.unit.value() * (c * p.y.sin());
    let mut out = first.coeffs().to_vec();
    out.push(p.x);
    Ok(out)
}

/// `H cos θ + C sin θ` for the helicoid and catenoid embedded in `K²`.
pub fn param_deformation(theta: f64, p: &SlicePoint) -> Result<[HyperNum; 2]> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::Parameter(format!("theta = {theta} outside [0, π/2]")));
    }
    if p.y.abs() >= PI {
        return Err(Error::Domain { x: p.x, y: p.y });
    }
    let [h1, h2] = embedded_helicoid(p);
    let [c1, c2] = embedded_catenoid(p);
    let (st, ct) = theta.sin_cos();
    Ok([h1 * ct + c1 * st, h2 * ct + c2 * st])
}

pub fn embedded_helicoid(p: &SlicePoint) -> [HyperNum; 2] {
    let s = p.x.sinh();
    let a = p.algebra();
    [
        HyperNum::real(a, s * p.y.cos()) + p.unit.value() * (s * p.y.sin()),
        p.unit.value() * p.y,
    ]
}

pub fn embedded_catenoid(p: &SlicePoint) -> [HyperNum; 2] {
    let c = p.x.cosh();
    let a = p.algebra();
    [
        HyperNum::real(a, c * p.y.cos()) + p.unit.value() * (c * p.y.sin()),
        HyperNum::real(a, p.x),
    ]
}

/// `(x + Iy, x + ψ(I)y)`.
pub fn psi_counterexample(p: &SlicePoint) -> Result<[HyperNum; 2]> {
    if p.algebra() != Algebra::Quaternion {
        return Err(Error::UnsupportedDimension(p.algebra().dim()));
    }
    Ok([
        p.reconstruct(),
        HyperNum::real(Algebra::Quaternion, p.x) + psi(&p.unit).value() * p.y,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_hypernum, rng};

    fn q(w: f64, i: f64, j: f64, k: f64) -> HyperNum {
        HyperNum::quaternion(w, i, j, k)
    }

    #[test]
    fn sphere_special_points() {
        let i = ImaginaryUnit::basis(Algebra::Quaternion, 1);
        assert_eq!(param_sphere(Pole::North, &SlicePoint::real(0.0, i)), vec![0., 0., 0., 0., -1.]);
        let p = SlicePoint::new(0.6, 0.8, i).unwrap();
        let v = param_sphere(Pole::North, &p);
        assert!((v[0] - 0.6).abs() < 1e-15 && (v[1] - 0.8).abs() < 1e-15 && v[4].abs() < 1e-15);
    }

    #[test]
    fn transition_is_inverse() {
        assert_eq!(sphere_transition(&HyperNum::real(Algebra::Quaternion, 2.0)).unwrap().re(), 0.5);
        let minus_i = sphere_transition(&q(0.0, 1.0, 0.0, 0.0)).unwrap();
        assert!(minus_i.max_abs_diff(&q(0.0, -1.0, 0.0, 0.0)) < 1e-16);
        assert_eq!(sphere_transition(&HyperNum::zero(Algebra::Octonion)), Err(Error::Pole));
        let mut r = rng(4);
        for _ in 0..200 {
            let z = random_hypernum(&mut r, Algebra::Octonion);
            let a = sphere_transition(&z).unwrap();
            let b = sphere_transition_composed(&z).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12 * (1.0 + a.norm()));
        }
    }

    #[test]
    fn psi_values() {
        for k in 1..4 {
            let e = ImaginaryUnit::basis(Algebra::Quaternion, k);
            assert!(psi(&e).value().max_abs_diff(&e.value()) < 1e-16);
            assert!(psi(&e.neg()).value().max_abs_diff(&e.neg().value()) < 1e-16);
        }
        let s = 1.0 / 3f64.sqrt();
        let u = ImaginaryUnit::from_imaginary(&q(0.0, s, s, s)).unwrap();
        let raw = q(0.0, 1.0 / (3.0 * 3f64.sqrt()), s, 1.0 / (3.0 * 3f64.sqrt()));
        let expected = raw / (1.0 / 27.0 + 1.0 / 3.0 + 1.0 / 27.0f64).sqrt();
        assert!(psi(&u).value().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn psi_jacobian_at_i() {
        let chart = ManifoldChart::psi(Algebra::Quaternion).unwrap();
        let p = SlicePoint::new(0.3, 1.1, ImaginaryUnit::basis(Algebra::Quaternion, 1)).unwrap();
        let basis = Basis::canonical(Algebra::Quaternion);
        let j = chart.jacobian(&p, &basis).unwrap();
        let mut expected = DMatrix::zeros(8, 4);
        for (r, c) in [(0, 0), (1, 1), (2, 2), (3, 3), (4, 0), (5, 1), (6, 2)] {
            expected[(r, c)] = 1.0;
        }
        assert!(j.max_abs_diff(&DifferentialMatrix::from_matrix(expected)) < 1e-15);
        let num = chart.jacobian_numeric(&p, &basis, 1e-5).unwrap();
        assert!(j.max_abs_diff(&num) < 1e-8);
        assert!(!chart.audit_point(&p, 1e-9).unwrap().pass);
    }

    #[test]
    fn charts_agree_with_closed_forms() {
        let a = Algebra::Octonion;
        let p = SlicePoint::new(0.7, 1.3, crate::sampling::random_unit(&mut rng(1), a)).unwrap();
        let close = |u: &[f64], v: &[f64]| u.iter().zip(v).all(|(a, b)| (a - b).abs() < 1e-12);
        assert!(close(&ManifoldChart::helicoid(a).eval(&p).unwrap(), &param_helicoid(&p)));
        assert!(close(&ManifoldChart::catenoid(a).eval(&p).unwrap(), &param_catenoid(&p).unwrap()));
        for pole in [Pole::North, Pole::South] {
            assert!(close(&ManifoldChart::sphere(pole, a).eval(&p).unwrap(), &param_sphere(pole, &p)));
        }
        let d = ManifoldChart::deformation(0.4, a).unwrap().components(&p).unwrap();
        let e = param_deformation(0.4, &p).unwrap();
        assert!(d[0].max_abs_diff(&e[0]) < 1e-12 && d[1].max_abs_diff(&e[1]) < 1e-12);
        assert_eq!(ManifoldChart::helicoid(a).ambient_dim(), 15);
        assert_eq!(ManifoldChart::catenoid(Algebra::Quaternion).ambient_dim(), 5);
    }

    #[test]
    fn registry() {
        let params = ChartParams::default();
        for name in CATALOG {
            assert!(ManifoldChart::from_name(name, &params).is_ok(), "{name}");
        }
        assert!(matches!(
            ManifoldChart::from_name("torus", &params),
            Err(Error::UnknownChart(_))
        ));
        let bad = ChartParams { theta: 2.0, ..params };
        assert!(matches!(ManifoldChart::from_name("deformation", &bad), Err(Error::Parameter(_))));
        let oct = ChartParams { algebra: Algebra::Octonion, ..params };
        assert!(ManifoldChart::from_name("psi", &oct).is_err());
        let p = SlicePoint::new(0.0, 4.0, ImaginaryUnit::basis(Algebra::Quaternion, 1)).unwrap();
        assert!(matches!(
            ManifoldChart::catenoid(Algebra::Quaternion).eval(&p),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn catalog_classes_hold() {
        let params = ChartParams::default();
        for name in CATALOG {
            let chart = ManifoldChart::from_name(name, &params).unwrap();
            let pts = chart.sample_points(11, 64);
            let s = chart.audit(&pts, 1e-9, Execution::Sequential).unwrap();
            assert_eq!(s.pass, name != "psi", "{name}: {}", s.verdict);
        }
    }
}
