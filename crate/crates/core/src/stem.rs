//! Stem functions and the slice functions they induce.
//!
//! A stem `F = F₁ + ιF₂` lives on a symmetric domain `D ⊂ ℂ` and takes values
//! in `Aⁿ ⊗ ℂ` with `A ∈ {ℝ, ℍ, 𝕆}`. It induces the slice function
//! `f(x + Iy) = F₁(x, y) + I·F₂(x, y)` on the axially symmetric set over `D`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{Algebra, HyperNum, ImaginaryUnit, SlicePoint};
use crate::error::{Error, Result};
use crate::sampling;
use rand::Rng;

/// Absolute tolerance for boolean verdicts on scaled residuals.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Looser tolerance applied to holomorphy verdicts that rely on
/// finite-difference partials.
pub const NUMERIC_HOLOMORPHY_TOLERANCE: f64 = 1e-6;

/// A domain `{(x, y) : x ∈ (x₀, x₁), |y| ∈ [y₀, y₁)}` (or `(y₀, y₁)` when
/// `y₀ > 0`), which is symmetric under `y ↦ −y` by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricDomain {
    pub x: (f64, f64),
    pub y_abs: (f64, f64),
    /// Finite sampling window used for unbounded sides.
    pub window_x: (f64, f64),
    pub window_y: f64,
}

impl SymmetricDomain {
    pub fn plane() -> Self {
        SymmetricDomain {
            x: (f64::NEG_INFINITY, f64::INFINITY),
            y_abs: (0.0, f64::INFINITY),
            window_x: (-2.0, 2.0),
            window_y: 3.0,
        }
    }

    /// `ℝ × (−b, b)`.
    pub fn strip(b: f64) -> Self {
        SymmetricDomain {
            y_abs: (0.0, b),
            ..Self::plane()
        }
    }

    /// `(x₀, x₁) × (−b, b)`.
    pub fn rectangle(x: (f64, f64), b: f64) -> Self {
        SymmetricDomain {
            x,
            y_abs: (0.0, b),
            ..Self::plane()
        }
    }

    /// `ℝ × ((−b, −a) ∪ (a, b))`, a product domain missing the real axis.
    pub fn band(a: f64, b: f64) -> Self {
        SymmetricDomain {
            y_abs: (a, b),
            ..Self::plane()
        }
    }

    pub fn with_window(mut self, x: (f64, f64), y: f64) -> Self {
        self.window_x = x;
        self.window_y = y;
        self
    }

    pub fn contains_real_axis(&self) -> bool {
        self.y_abs.0 == 0.0
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let ay = y.abs();
        let y_ok = if self.y_abs.0 == 0.0 {
            ay < self.y_abs.1
        } else {
            ay > self.y_abs.0 && ay < self.y_abs.1
        };
        x > self.x.0 && x < self.x.1 && y_ok
    }

    /// Closed sampling box `[xa, xb] × [ya, yb]` for `y ≥ 0`, kept strictly
    /// inside the domain.
    pub fn sampling_box(&self) -> ((f64, f64), (f64, f64)) {
        let shrink = |lo: f64, hi: f64| {
            let w = hi - lo;
            (lo + 0.02 * w, hi - 0.02 * w)
        };
        let xa = self.x.0.max(self.window_x.0);
        let xb = self.x.1.min(self.window_x.1);
        let (xa, xb) = shrink(xa, xb);
        let yb = (0.95 * self.y_abs.1).min(self.window_y);
        let ya = if self.y_abs.0 > 0.0 {
            self.y_abs.0 + 0.05 * (yb - self.y_abs.0)
        } else {
            0.0
        };
        ((xa, xb), (ya, yb))
    }

    /// Seeded samples with `y ≥ 0`. When the domain meets ℝ every eighth point
    /// lies on the real axis.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<(f64, f64)> {
        let mut rng = sampling::rng(seed);
        let ((xa, xb), (ya, yb)) = self.sampling_box();
        (0..count)
            .map(|i| {
                let x = rng.random_range(xa..=xb);
                let y = rng.random_range(ya..=yb);
                if self.contains_real_axis() && i % 8 == 0 {
                    (x, 0.0)
                } else {
                    (x, y)
                }
            })
            .collect()
    }
}

/// Target algebra `A` of a stem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Target {
    Real,
    Hyper(Algebra),
}

impl Target {
    pub fn algebra(self) -> Algebra {
        match self {
            Target::Real => Algebra::Real,
            Target::Hyper(a) => a,
        }
    }
}

/// `(F₁, F₂)` at one point; each holds `arity` components in the target algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct StemValue {
    pub f1: Vec<HyperNum>,
    pub f2: Vec<HyperNum>,
}

impl StemValue {
    pub fn real(f1: &[f64], f2: &[f64]) -> Self {
        let lift = |v: &[f64]| {
            v.iter()
                .map(|&c| HyperNum::real(Algebra::Real, c))
                .collect()
        };
        StemValue {
            f1: lift(f1),
            f2: lift(f2),
        }
    }

    /// Components as complex numbers `F₁ + ιF₂` (real targets only).
    pub fn as_complex(&self) -> Vec<Complex64> {
        self.f1
            .iter()
            .zip(&self.f2)
            .map(|(a, b)| Complex64::new(a.re(), b.re()))
            .collect()
    }
}

/// The four first-order partials of a stem.
#[derive(Debug, Clone, PartialEq)]
pub struct StemPartials {
    pub dx1: Vec<HyperNum>,
    pub dy1: Vec<HyperNum>,
    pub dx2: Vec<HyperNum>,
    pub dy2: Vec<HyperNum>,
}

impl StemPartials {
    pub fn real(dx1: &[f64], dy1: &[f64], dx2: &[f64], dy2: &[f64]) -> Self {
        let a = StemValue::real(dx1, dy1);
        let b = StemValue::real(dx2, dy2);
        StemPartials {
            dx1: a.f1,
            dy1: a.f2,
            dx2: b.f1,
            dy2: b.f2,
        }
    }
}

type EvalFn = dyn Fn(f64, f64) -> StemValue + Send + Sync;
type PartialsFn = dyn Fn(f64, f64) -> StemPartials + Send + Sync;

/// A stem function together with its domain and optional analytic partials.
#[derive(Clone)]
pub struct StemFunction {
    name: String,
    target: Target,
    arity: usize,
    domain: SymmetricDomain,
    eval: Arc<EvalFn>,
    partials: Option<Arc<PartialsFn>>,
}

impl fmt::Debug for StemFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StemFunction")
            .field("name", &self.name)
            .field("target", &self.target)
            .field("arity", &self.arity)
            .field("domain", &self.domain)
            .field("analytic_partials", &self.partials.is_some())
            .finish()
    }
}

impl StemFunction {
    pub fn new(
        name: impl Into<String>,
        target: Target,
        arity: usize,
        domain: SymmetricDomain,
        eval: impl Fn(f64, f64) -> StemValue + Send + Sync + 'static,
    ) -> Self {
        assert!(arity >= 1, "stem arity must be at least 1");
        StemFunction {
            name: name.into(),
            target,
            arity,
            domain,
            eval: Arc::new(eval),
            partials: None,
        }
    }

    /// Real-valued stem from a closure returning `(F₁, F₂)` as real vectors.
    pub fn real(
        name: impl Into<String>,
        arity: usize,
        domain: SymmetricDomain,
        eval: impl Fn(f64, f64) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, Target::Real, arity, domain, move |x, y| {
            let (a, b) = eval(x, y);
            StemValue::real(&a, &b)
        })
    }

    pub fn with_partials(
        mut self,
        partials: impl Fn(f64, f64) -> StemPartials + Send + Sync + 'static,
    ) -> Self {
        self.partials = Some(Arc::new(partials));
        self
    }

    /// Real stem built from a complex function `z ↦ F(z)` per component and
    /// its complex derivative; the partials follow from holomorphy
    /// (`∂ₓF = F'`, `∂ᵧF = ιF'`).
    pub fn holomorphic(
        name: impl Into<String>,
        arity: usize,
        domain: SymmetricDomain,
        f: impl Fn(Complex64) -> Vec<Complex64> + Send + Sync + 'static,
        df: impl Fn(Complex64) -> Vec<Complex64> + Send + Sync + 'static,
    ) -> Self {
        Self::real(name, arity, domain, move |x, y| {
            let v = f(Complex64::new(x, y));
            (v.iter().map(|c| c.re).collect(), v.iter().map(|c| c.im).collect())
        })
        .with_partials(move |x, y| {
            let d = df(Complex64::new(x, y));
            let re: Vec<f64> = d.iter().map(|c| c.re).collect();
            let im: Vec<f64> = d.iter().map(|c| c.im).collect();
            let neg_im: Vec<f64> = im.iter().map(|v| -v).collect();
            StemPartials::real(&re, &neg_im, &im, &re)
        })
    }

    /// Stem of the polynomial `f(q) = Σ qᵏ aₖ`, i.e. `F(z) = Σ zᵏ aₖ`. Real
    /// coefficients (dimension 1) give a slice-preserving function.
    pub fn polynomial(coeffs: Vec<HyperNum>) -> Result<Self> {
        let algebra = coeffs
            .first()
            .map(|c| c.algebra())
            .ok_or_else(|| Error::Configuration("empty polynomial".into()))?;
        if coeffs.iter().any(|c| c.algebra() != algebra) {
            return Err(Error::Configuration("mixed coefficient algebras".into()));
        }
        let target = match algebra {
            Algebra::Real => Target::Real,
            a => Target::Hyper(a),
        };
        let a = coeffs.clone();
        let eval = move |x: f64, y: f64| {
            let z = Complex64::new(x, y);
            let mut p = Complex64::new(1.0, 0.0);
            let mut f1 = HyperNum::zero(algebra);
            let mut f2 = HyperNum::zero(algebra);
            for c in &a {
                f1 += *c * p.re;
                f2 += *c * p.im;
                p *= z;
            }
            StemValue {
                f1: vec![f1],
                f2: vec![f2],
            }
        };
        let a = coeffs;
        let partials = move |x: f64, y: f64| {
            let z = Complex64::new(x, y);
            let mut p = Complex64::new(1.0, 0.0);
            let mut re = HyperNum::zero(algebra);
            let mut im = HyperNum::zero(algebra);
            for (k, c) in a.iter().enumerate().skip(1) {
                let d = p * k as f64;
                re += *c * d.re;
                im += *c * d.im;
                p *= z;
            }
            StemPartials {
                dx1: vec![re],
                dy1: vec![-im],
                dx2: vec![im],
                dy2: vec![re],
            }
        };
        Ok(Self::new("polynomial", target, 1, SymmetricDomain::plane(), eval).with_partials(partials))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain(&self) -> &SymmetricDomain {
        &self.domain
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partials.is_some()
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<StemValue> {
        if !self.domain.contains(x, y) {
            return Err(Error::Domain { x, y });
        }
        Ok((self.eval)(x, y))
    }

    /// Analytic partials when available, central differences otherwise.
    pub fn partials(&self, x: f64, y: f64) -> Result<StemPartials> {
        if !self.domain.contains(x, y) {
            return Err(Error::Domain { x, y });
        }
        match &self.partials {
            Some(p) => Ok(p(x, y)),
            None => self.numeric_partials(x, y, default_step(x, y)),
        }
    }

    /// Central-difference partials with step `h`.
    pub fn numeric_partials(&self, x: f64, y: f64, h: f64) -> Result<StemPartials> {
        let stencil = [(x + h, y), (x - h, y), (x, y + h), (x, y - h)];
        if stencil.iter().any(|&(a, b)| !self.domain.contains(a, b)) {
            return Err(Error::Stencil { x, y, h });
        }
        let [xp, xm, yp, ym] = stencil.map(|(a, b)| (self.eval)(a, b));
        let diff = |p: &[HyperNum], m: &[HyperNum]| -> Vec<HyperNum> {
            p.iter().zip(m).map(|(a, b)| (*a - *b) / (2.0 * h)).collect()
        };
        Ok(StemPartials {
            dx1: diff(&xp.f1, &xm.f1),
            dy1: diff(&yp.f1, &ym.f1),
            dx2: diff(&xp.f2, &xm.f2),
            dy2: diff(&yp.f2, &ym.f2),
        })
    }

    fn lift_all(&self, v: &[HyperNum], algebra: Algebra) -> Result<Vec<HyperNum>> {
        if let Target::Hyper(a) = self.target {
            if a != algebra {
                return Err(Error::DimensionMismatch {
                    left: a.dim(),
                    right: algebra.dim(),
                });
            }
        }
        v.iter().map(|c| c.lift(algebra)).collect()
    }

    /// `A + unit·B` componentwise, lifting real components into the algebra.
    pub(crate) fn combine(
        &self,
        a: &[HyperNum],
        b: &[HyperNum],
        unit: &ImaginaryUnit,
    ) -> Result<Vec<HyperNum>> {
        let algebra = unit.algebra();
        let a = self.lift_all(a, algebra)?;
        let b = self.lift_all(b, algebra)?;
        Ok(a.iter()
            .zip(&b)
            .map(|(p, q)| *p + unit.value() * *q)
            .collect())
    }

    /// `f(x + Iy) = F₁(x, y) + I·F₂(x, y)`.
    pub fn eval_slice(&self, p: &SlicePoint) -> Result<Vec<HyperNum>> {
        let v = self.eval(p.x, p.y)?;
        self.combine(&v.f1, &v.f2, &p.unit)
    }

    /// Evaluates the induced slice function at an arbitrary element.
    pub fn eval_at(&self, q: &HyperNum) -> Result<Vec<HyperNum>> {
        let p = crate::algebra::decompose(q, ImaginaryUnit::default_for(q.algebra()));
        self.eval_slice(&p)
    }

    /// Parity residuals over `samples` seeded domain points.
    pub fn check_intrinsic(&self, samples: usize, seed: u64, tol: f64) -> Result<IntrinsicReport> {
        if samples == 0 {
            return Err(Error::Configuration("intrinsic check needs at least one sample".into()));
        }
        let mut even = 0.0f64;
        let mut odd = 0.0f64;
        let mut axis = 0.0f64;
        for (x, y) in self.domain.sample(seed, samples) {
            let up = (self.eval)(x, y);
            if y == 0.0 {
                for c in &up.f2 {
                    axis = axis.max(c.norm());
                }
                continue;
            }
            let down = (self.eval)(x, -y);
            for (a, b) in up.f1.iter().zip(&down.f1) {
                even = even.max((*a - *b).norm() / a.norm().max(1.0));
            }
            for (a, b) in up.f2.iter().zip(&down.f2) {
                odd = odd.max((*a + *b).norm() / a.norm().max(1.0));
            }
        }
        let worst = even.max(odd).max(axis);
        Ok(IntrinsicReport {
            samples,
            even_residual: even,
            odd_residual: odd,
            axis_residual: axis,
            pass: worst <= tol,
        })
    }

    /// Cauchy–Riemann residual `max(|∂ₓF₁ − ∂ᵧF₂|, |∂ᵧF₁ + ∂ₓF₂|)`, scaled
    /// by `max(1, |∂F|)`, at `(x, y)`.
    pub fn check_holomorphic(&self, x: f64, y: f64, tol: f64) -> Result<HolomorphyVerdict> {
        let p = self.partials(x, y)?;
        let mut residual = 0.0f64;
        for c in 0..self.arity {
            let scale = p.dx1[c].norm().max(p.dx2[c].norm()).max(1.0);
            let r1 = (p.dx1[c] - p.dy2[c]).norm() / scale;
            let r2 = (p.dy1[c] + p.dx2[c]).norm() / scale;
            residual = residual.max(r1).max(r2);
        }
        Ok(HolomorphyVerdict {
            residual,
            holomorphic: residual <= tol,
        })
    }

    fn holomorphy_tolerance(&self) -> f64 {
        if self.partials.is_some() {
            DEFAULT_TOLERANCE
        } else {
            NUMERIC_HOLOMORPHY_TOLERANCE
        }
    }

    /// Value at `p` of the slice function induced by the derivative stem
    /// `F' = ∂ₓF₁ + ι∂ₓF₂`.
    pub fn slice_derivative(&self, p: &SlicePoint) -> Result<Vec<HyperNum>> {
        let verdict = self.check_holomorphic(p.x, p.y, self.holomorphy_tolerance())?;
        if !verdict.holomorphic {
            return Err(Error::Unsupported(format!(
                "stem `{}` is not holomorphic at ({}, {}) (residual {:e})",
                self.name, p.x, p.y, verdict.residual
            )));
        }
        let d = self.partials(p.x, p.y)?;
        self.combine(&d.dx1, &d.dx2, &p.unit)
    }

    /// `y⁻¹F₂(x, y)` off the real axis and its limit `∂ᵧF₂(x, 0)` on it.
    pub fn spherical_derivative(&self, p: &SlicePoint) -> Result<Vec<HyperNum>> {
        let algebra = p.algebra();
        let raw = if p.y > 0.0 {
            let v = self.eval(p.x, p.y)?;
            v.f2.iter().map(|c| *c / p.y).collect::<Vec<_>>()
        } else {
            self.partials(p.x, 0.0)?.dy2
        };
        self.lift_all(&raw, algebra)
    }
}

fn default_step(x: f64, y: f64) -> f64 {
    1e-6 * 1f64.max(x.abs()).max(y.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntrinsicReport {
    pub samples: usize,
    pub even_residual: f64,
    pub odd_residual: f64,
    pub axis_residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolomorphyVerdict {
    pub residual: f64,
    pub holomorphic: bool,
}

/// Predicts `f(x + Ly)` from the values at `x + My` and `x + Ny`:
/// `(M−N)⁻¹·[M·f_M − N·f_N] + L·((M−N)⁻¹·[f_M − f_N])`.
///
/// Each bracket is formed first and multiplied on the left by `(M−N)⁻¹`, then
/// by `L`. With this grouping every product involves at most two of the
/// generators `M − N` and an element of the form `(M − N)·v`, so the result is
/// exact for octonions as well (alternativity).
pub fn representation_formula(
    f_m: &HyperNum,
    f_n: &HyperNum,
    m: &ImaginaryUnit,
    n: &ImaginaryUnit,
    l: &ImaginaryUnit,
) -> Result<HyperNum> {
    let diff = m.value() - n.value();
    if diff.norm() < 1e-12 {
        return Err(Error::DegeneratePair);
    }
    let inv = diff.inv()?;
    let first = inv * (m.value() * *f_m - n.value() * *f_n);
    let second = l.value() * (inv * (*f_m - *f_n));
    Ok(first + second)
}

/// `y⁻¹(M−N)⁻¹[f(x+My) − f(x+Ny)]`.
pub fn spherical_derivative_from_values(
    f_m: &HyperNum,
    f_n: &HyperNum,
    m: &ImaginaryUnit,
    n: &ImaginaryUnit,
    y: f64,
) -> Result<HyperNum> {
    let diff = m.value() - n.value();
    if diff.norm() < 1e-12 {
        return Err(Error::DegeneratePair);
    }
    Ok(diff.inv()? * (*f_m - *f_n) / y)
}

/// `F(z) = z` on ℂ.
pub fn identity_stem() -> StemFunction {
    StemFunction::holomorphic(
        "identity",
        1,
        SymmetricDomain::plane(),
        |z| vec![z],
        |_| vec![Complex64::new(1.0, 0.0)],
    )
}

/// `F(z) = z̄`, intrinsic but antiholomorphic.
pub fn conjugate_stem() -> StemFunction {
    StemFunction::real("conj", 1, SymmetricDomain::plane(), |x, y| (vec![x], vec![-y]))
        .with_partials(|_, _| StemPartials::real(&[1.0], &[0.0], &[0.0], &[-1.0]))
}

/// Constant real stem `F ≡ c`.
pub fn constant_stem(c: f64) -> StemFunction {
    StemFunction::real("constant", 1, SymmetricDomain::plane(), move |_, _| {
        (vec![c], vec![0.0])
    })
    .with_partials(|_, _| StemPartials::real(&[0.0], &[0.0], &[0.0], &[0.0]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quat(w: f64, i: f64, j: f64, k: f64) -> HyperNum {
        HyperNum::quaternion(w, i, j, k)
    }

    fn z_squared() -> StemFunction {
        StemFunction::polynomial(vec![
            HyperNum::real(Algebra::Real, 0.0),
            HyperNum::real(Algebra::Real, 0.0),
            HyperNum::real(Algebra::Real, 1.0),
        ])
        .unwrap()
    }

    fn unit(i: f64, j: f64, k: f64) -> ImaginaryUnit {
        ImaginaryUnit::from_imaginary(&quat(0., i, j, k)).unwrap()
    }

    #[test]
    fn domains() {
        let d = SymmetricDomain::strip(std::f64::consts::PI);
        assert!(d.contains(10.0, -3.0));
        assert!(!d.contains(0.0, std::f64::consts::PI));
        assert!(d.contains_real_axis());
        let b = SymmetricDomain::band(1.0, 2.0);
        assert!(!b.contains_real_axis());
        assert!(!b.contains(0.0, 0.0));
        assert!(b.contains(0.0, -1.5));
        for (x, y) in b.sample(1, 100) {
            assert!(b.contains(x, y) && b.contains(x, -y));
        }
        let pts = d.sample(2, 64);
        assert_eq!(pts.iter().filter(|p| p.1 == 0.0).count(), 8);
    }

    #[test]
    fn eval_z_squared() {
        let f = z_squared();
        let j = unit(0., 1., 0.);
        let v = f.eval_slice(&SlicePoint::new(1.0, 2.0, j).unwrap()).unwrap();
        // (1+2j)² computed directly
        let direct = quat(1., 0., 2., 0.) * quat(1., 0., 2., 0.);
        assert!(v[0].max_abs_diff(&direct) < 1e-15);
        assert!(v[0].max_abs_diff(&quat(-3., 0., 4., 0.)) < 1e-15);

        let r = f.eval_slice(&SlicePoint::real(1.5, j)).unwrap();
        assert_eq!(r[0], HyperNum::real(Algebra::Quaternion, 2.25));

        let id = identity_stem();
        let p = SlicePoint::new(0.3, 0.7, unit(1., 2., 2.)).unwrap();
        assert!(id.eval_slice(&p).unwrap()[0].max_abs_diff(&p.reconstruct()) < 1e-15);
    }

    #[test]
    fn outside_domain_is_an_error() {
        let f = StemFunction::real("s", 1, SymmetricDomain::strip(1.0), |x, y| (vec![x], vec![y]));
        let p = SlicePoint::new(0.0, 2.0, unit(1., 0., 0.)).unwrap();
        assert_eq!(f.eval_slice(&p), Err(Error::Domain { x: 0.0, y: 2.0 }));
    }

    #[test]
    fn quaternion_stem_rejects_octonion_points() {
        let f = StemFunction::polynomial(vec![quat(0., 1., 0., 0.)]).unwrap();
        let p = SlicePoint::real(1.0, ImaginaryUnit::default_for(Algebra::Octonion));
        assert!(matches!(f.eval_slice(&p), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn intrinsic_checks() {
        let r = z_squared().check_intrinsic(200, 1, DEFAULT_TOLERANCE).unwrap();
        assert!(r.pass);
        assert_eq!(r.even_residual.max(r.odd_residual).max(r.axis_residual), 0.0);

        let bad = StemFunction::real("const-f2", 1, SymmetricDomain::plane(), |x, _| {
            (vec![x], vec![1.0])
        });
        let r = bad.check_intrinsic(200, 1, DEFAULT_TOLERANCE).unwrap();
        assert!(!r.pass);
        assert!(r.odd_residual > 1.0 && r.axis_residual == 1.0);

        assert!(conjugate_stem().check_intrinsic(200, 1, DEFAULT_TOLERANCE).unwrap().pass);
        assert!(matches!(
            z_squared().check_intrinsic(0, 1, DEFAULT_TOLERANCE),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn holomorphy_checks() {
        assert!(z_squared().check_holomorphic(1.0, 1.0, DEFAULT_TOLERANCE).unwrap().holomorphic);
        for (x, y) in [(0.0, 0.0), (1.0, -2.0), (-3.0, 0.5)] {
            assert!(!conjugate_stem().check_holomorphic(x, y, DEFAULT_TOLERANCE).unwrap().holomorphic);
        }
        // numeric partials of sinh(z) = sinh x cos y + ι cosh x sin y
        let s = StemFunction::real("sinh", 1, SymmetricDomain::plane(), |x, y| {
            (vec![x.sinh() * y.cos()], vec![x.cosh() * y.sin()])
        });
        let v = s.check_holomorphic(1.0, std::f64::consts::FRAC_PI_3, NUMERIC_HOLOMORPHY_TOLERANCE).unwrap();
        assert!(v.holomorphic, "{v:?}");
        let narrow = StemFunction::real("n", 1, SymmetricDomain::strip(0.5), |x, y| (vec![x], vec![y]));
        assert!(matches!(narrow.check_holomorphic(0.0, 0.5 - 1e-9, 1e-9), Err(Error::Stencil { .. })));
    }

    #[test]
    fn derivatives() {
        let j = unit(0., 1., 0.);
        let p = SlicePoint::new(1.0, 2.0, j).unwrap();
        let d = z_squared().slice_derivative(&p).unwrap();
        assert!(d[0].max_abs_diff(&quat(2., 0., 4., 0.)) < 1e-15);
        assert_eq!(constant_stem(3.0).slice_derivative(&p).unwrap()[0], HyperNum::zero(Algebra::Quaternion));
        assert_eq!(identity_stem().slice_derivative(&p).unwrap()[0], HyperNum::one(Algebra::Quaternion));
        assert!(matches!(conjugate_stem().slice_derivative(&p), Err(Error::Unsupported(_))));

        let i = unit(1., 0., 0.);
        let s = z_squared().spherical_derivative(&SlicePoint::new(1.0, 1.0, i).unwrap()).unwrap();
        assert!((s[0].re() - 2.0).abs() < 1e-15);
        let s = z_squared().spherical_derivative(&SlicePoint::real(1.7, i)).unwrap();
        assert!((s[0].re() - 3.4).abs() < 1e-15);
        assert!(constant_stem(2.0).spherical_derivative(&p).unwrap()[0].norm() == 0.0);
    }

    #[test]
    fn representation_formula_examples() {
        let (i, j, k) = (unit(1., 0., 0.), unit(0., 1., 0.), unit(0., 0., 1.));
        let pred = representation_formula(&quat(0., 2., 0., 0.), &quat(0., 0., 2., 0.), &i, &j, &k).unwrap();
        let direct = quat(1., 0., 0., 1.) * quat(1., 0., 0., 1.);
        assert!(pred.max_abs_diff(&direct) < 1e-15);
        assert!(pred.max_abs_diff(&quat(0., 0., 0., 2.)) < 1e-15);

        let fm = quat(0.3, -1.0, 2.0, 0.5);
        let fnn = quat(1.1, 0.2, -0.7, 4.0);
        let same = representation_formula(&fm, &fnn, &i, &j, &i).unwrap();
        assert!(same.max_abs_diff(&fm) < 1e-15);

        let c = quat(1.5, 0.5, -2.0, 0.25);
        let l = unit(1., 2., 3.);
        assert!(representation_formula(&c, &c, &i, &j, &l).unwrap().max_abs_diff(&c) < 1e-15);
        assert_eq!(representation_formula(&c, &c, &i, &i, &l), Err(Error::DegeneratePair));
    }
}
