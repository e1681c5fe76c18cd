//! Fixed-dimension division-algebra arithmetic over ℝ, ℍ and 𝕆.
//!
//! Elements are stored as real coefficient vectors over the ordered basis
//! `e₀ = 1, e₁, …, e_{dim−1}`. Quaternions use the standard `i, j, k` table and
//! octonions are built from quaternion pairs by Cayley–Dickson doubling with
//! the convention `(a,b)(c,d) = (ac − d̄b, da + bc̄)`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used when validating unit norms.
pub const UNIT_TOLERANCE: f64 = 1e-9;

/// The three supported real division algebras.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algebra {
    Real,
    Quaternion,
    Octonion,
}

impl Algebra {
    pub const fn dim(self) -> usize {
        match self {
            Algebra::Real => 1,
            Algebra::Quaternion => 4,
            Algebra::Octonion => 8,
        }
    }

    pub fn from_dim(dim: usize) -> Result<Self> {
        match dim {
            1 => Ok(Algebra::Real),
            4 => Ok(Algebra::Quaternion),
            8 => Ok(Algebra::Octonion),
            other => Err(Error::UnsupportedDimension(other)),
        }
    }
}

/// An element of ℝ, ℍ or 𝕆.
#[derive(Clone, Copy, PartialEq)]
pub struct HyperNum {
    algebra: Algebra,
    coeffs: [f64; 8],
}

impl HyperNum {
    pub fn zero(algebra: Algebra) -> Self {
        HyperNum {
            algebra,
            coeffs: [0.0; 8],
        }
    }

    pub fn one(algebra: Algebra) -> Self {
        Self::real(algebra, 1.0)
    }

    pub fn real(algebra: Algebra, value: f64) -> Self {
        let mut q = Self::zero(algebra);
        q.coeffs[0] = value;
        q
    }

    /// The basis element `e_index`.
    pub fn basis(algebra: Algebra, index: usize) -> Self {
        assert!(index < algebra.dim(), "basis index {index} out of range");
        let mut q = Self::zero(algebra);
        q.coeffs[index] = 1.0;
        q
    }

    pub fn from_slice(coeffs: &[f64]) -> Result<Self> {
        let algebra = Algebra::from_dim(coeffs.len())?;
        let mut q = Self::zero(algebra);
        q.coeffs[..coeffs.len()].copy_from_slice(coeffs);
        Ok(q)
    }

    /// Builds an element from its real part and `dim − 1` imaginary coefficients.
    pub fn from_parts(re: f64, im: &[f64]) -> Result<Self> {
        let algebra = Algebra::from_dim(im.len() + 1)?;
        let mut q = Self::zero(algebra);
        q.coeffs[0] = re;
        q.coeffs[1..=im.len()].copy_from_slice(im);
        Ok(q)
    }

    pub fn quaternion(w: f64, i: f64, j: f64, k: f64) -> Self {
        HyperNum {
            algebra: Algebra::Quaternion,
            coeffs: [w, i, j, k, 0.0, 0.0, 0.0, 0.0],
        }
    }

    pub fn octonion(c: [f64; 8]) -> Self {
        HyperNum {
            algebra: Algebra::Octonion,
            coeffs: c,
        }
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..self.dim()]
    }

    pub fn re(&self) -> f64 {
        self.coeffs[0]
    }

    /// Imaginary part as an element of the same algebra.
    pub fn im(&self) -> Self {
        let mut q = *self;
        q.coeffs[0] = 0.0;
        q
    }

    pub fn conj(&self) -> Self {
        let mut q = -*self;
        q.coeffs[0] = self.coeffs[0];
        q
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs().iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Euclidean inner product of the coefficient vectors.
    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs()
            .iter()
            .zip(other.coeffs())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn is_real(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0.0)
    }

    /// Re-expresses a real or lower-dimensional element inside a larger algebra
    /// via the canonical inclusion (ℝ ⊂ ℍ ⊂ 𝕆).
    pub fn lift(&self, algebra: Algebra) -> Result<Self> {
        if self.dim() > algebra.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: algebra.dim(),
            });
        }
        Ok(HyperNum {
            algebra,
            coeffs: self.coeffs,
        })
    }

    /// Checked product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.algebra != other.algebra {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let mut out = Self::zero(self.algebra);
        match self.algebra {
            Algebra::Real => out.coeffs[0] = self.coeffs[0] * other.coeffs[0],
            Algebra::Quaternion => {
                let r = quat_mul(quat(&self.coeffs, 0), quat(&other.coeffs, 0));
                out.coeffs[..4].copy_from_slice(&r);
            }
            Algebra::Octonion => {
                let (a, b) = (quat(&self.coeffs, 0), quat(&self.coeffs, 4));
                let (c, d) = (quat(&other.coeffs, 0), quat(&other.coeffs, 4));
                let first = quat_sub(quat_mul(a, c), quat_mul(quat_conj(d), b));
                let second = quat_add(quat_mul(d, a), quat_mul(b, quat_conj(c)));
                out.coeffs[..4].copy_from_slice(&first);
                out.coeffs[4..].copy_from_slice(&second);
            }
        }
        Ok(out)
    }

    /// `conj(q) / |q|²`.
    pub fn inv(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.conj() / n2)
    }

    /// The exponential `eˣ(cos y + I sin y)` for `q = x + Iy`.
    pub fn exp(&self) -> Self {
        let im = self.im();
        let y = im.norm();
        let ex = self.re().exp();
        let mut out = im * (ex * sinc(y));
        out.coeffs[0] = ex * y.cos();
        out
    }

    /// Integer power by repeated left multiplication. Powers of a single
    /// element associate in every alternative algebra.
    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one(self.algebra);
        for _ in 0..n {
            acc = *self * acc;
        }
        acc
    }

    /// Largest absolute coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs()
            .iter()
            .zip(other.coeffs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }
}

/// `sin(y)/y`, evaluated by its Taylor series near zero.
pub fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        y.sin() / y
    }
}

type Quat = [f64; 4];

fn quat(c: &[f64; 8], offset: usize) -> Quat {
    [c[offset], c[offset + 1], c[offset + 2], c[offset + 3]]
}

fn quat_mul(a: Quat, b: Quat) -> Quat {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn quat_conj(a: Quat) -> Quat {
    [a[0], -a[1], -a[2], -a[3]]
}

fn quat_add(a: Quat, b: Quat) -> Quat {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn quat_sub(a: Quat, b: Quat) -> Quat {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

impl fmt::Debug for HyperNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HyperNum{:?}", self.coeffs())
    }
}

impl fmt::Display for HyperNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeffs[0])?;
        for (i, c) in self.coeffs().iter().enumerate().skip(1) {
            if *c != 0.0 {
                write!(f, " {} {}e{}", if *c < 0.0 { '-' } else { '+' }, c.abs(), i)?;
            }
        }
        Ok(())
    }
}

impl Index<usize> for HyperNum {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coeffs()[i]
    }
}

impl Add for HyperNum {
    type Output = HyperNum;
    fn add(mut self, rhs: HyperNum) -> HyperNum {
        assert_eq!(self.algebra, rhs.algebra, "algebra mismatch in add");
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs) {
            *a += b;
        }
        self
    }
}

impl AddAssign for HyperNum {
    fn add_assign(&mut self, rhs: HyperNum) {
        *self = *self + rhs;
    }
}

impl Sub for HyperNum {
    type Output = HyperNum;
    fn sub(self, rhs: HyperNum) -> HyperNum {
        self + (-rhs)
    }
}

impl Neg for HyperNum {
    type Output = HyperNum;
    fn neg(mut self) -> HyperNum {
        for a in self.coeffs.iter_mut() {
            *a = -*a;
        }
        self
    }
}

impl Mul<f64> for HyperNum {
    type Output = HyperNum;
    fn mul(mut self, s: f64) -> HyperNum {
        for a in self.coeffs.iter_mut() {
            *a *= s;
        }
        self
    }
}

impl Div<f64> for HyperNum {
    type Output = HyperNum;
    fn div(self, s: f64) -> HyperNum {
        self * (1.0 / s)
    }
}

/// Algebra product; panics when the operands live in different algebras.
/// Use [`HyperNum::try_mul`] for the checked form.
impl Mul for HyperNum {
    type Output = HyperNum;
    fn mul(self, rhs: HyperNum) -> HyperNum {
        HyperNum::try_mul(&self, &rhs).expect("algebra mismatch in product")
    }
}

/// A purely imaginary element of unit norm, i.e. a square root of −1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImaginaryUnit(HyperNum);

impl ImaginaryUnit {
    /// Accepts `q` if its real part vanishes and `|q| = 1` within
    /// [`UNIT_TOLERANCE`]; the stored value is renormalized.
    pub fn new(q: HyperNum) -> Result<Self> {
        if q.dim() < 2 {
            return Err(Error::InvalidUnit("ℝ has no imaginary units".into()));
        }
        if q.re().abs() > UNIT_TOLERANCE {
            return Err(Error::InvalidUnit(format!("real part {} ≠ 0", q.re())));
        }
        let n = q.im().norm();
        if (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::InvalidUnit(format!("norm {n} ≠ 1")));
        }
        Ok(ImaginaryUnit(q.im() / n))
    }

    /// Normalizes the imaginary part of `q`.
    pub fn from_imaginary(q: &HyperNum) -> Result<Self> {
        let im = q.im();
        let n = im.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidUnit("zero imaginary part".into()));
        }
        Ok(ImaginaryUnit(im / n))
    }

    /// `e_index` as a unit (`index ≥ 1`).
    pub fn basis(algebra: Algebra, index: usize) -> Self {
        assert!(index >= 1, "e0 is not imaginary");
        ImaginaryUnit(HyperNum::basis(algebra, index))
    }

    /// `e₁`, the default unit for real points.
    pub fn default_for(algebra: Algebra) -> Self {
        Self::basis(algebra, 1)
    }

    pub fn value(&self) -> HyperNum {
        self.0
    }

    pub fn algebra(&self) -> Algebra {
        self.0.algebra()
    }

    pub fn neg(&self) -> Self {
        ImaginaryUnit(-self.0)
    }

    pub fn complete_basis(&self) -> Basis {
        complete_basis(&self.0, Completion::Forward).expect("validated imaginary unit")
    }
}

/// The decomposition `q = x + I·y` with `y ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePoint {
    pub x: f64,
    pub y: f64,
    pub unit: ImaginaryUnit,
}

impl SlicePoint {
    pub fn new(x: f64, y: f64, unit: ImaginaryUnit) -> Result<Self> {
        if y < 0.0 || !y.is_finite() || !x.is_finite() {
            return Err(Error::Domain { x, y });
        }
        Ok(SlicePoint { x, y, unit })
    }

    pub fn real(x: f64, unit: ImaginaryUnit) -> Self {
        SlicePoint { x, y: 0.0, unit }
    }

    pub fn algebra(&self) -> Algebra {
        self.unit.algebra()
    }

    /// `x + unit·y`.
    pub fn reconstruct(&self) -> HyperNum {
        let mut q = self.unit.value() * self.y;
        q.coeffs[0] = self.x;
        q
    }
}

/// Splits `q` into `x + I·y`; real points take `fallback` as their unit.
pub fn decompose(q: &HyperNum, fallback: ImaginaryUnit) -> SlicePoint {
    let im = q.im();
    let y = im.norm();
    let unit = if y > 0.0 {
        ImaginaryUnit(im / y)
    } else {
        fallback
    };
    SlicePoint { x: q.re(), y, unit }
}

/// Order in which canonical vectors are fed to Gram–Schmidt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Completion {
    /// `e₁, e₂, …` in increasing index order.
    Forward,
    /// `e_{dim−1}, …, e₁`; a second deterministic completion used to check
    /// that verdicts do not depend on the choice of `I₂ … I_{dim−1}`.
    Reverse,
}

/// An orthonormal, positively oriented basis `(1, I, I₂, …, I_{dim−1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    units: Vec<HyperNum>,
}

impl Basis {
    pub fn units(&self) -> &[HyperNum] {
        &self.units
    }

    pub fn dim(&self) -> usize {
        self.units.len()
    }

    pub fn unit(&self) -> ImaginaryUnit {
        ImaginaryUnit(self.units[1])
    }

    /// Columns are the basis vectors.
    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| self.units[c].coeffs()[r])
    }

    pub fn determinant(&self) -> f64 {
        self.matrix().determinant()
    }

    /// Coordinates of `q` in this basis.
    pub fn coordinates(&self, q: &HyperNum) -> Vec<f64> {
        self.units.iter().map(|u| u.dot(q)).collect()
    }

    /// The standard basis of the algebra.
    pub fn canonical(algebra: Algebra) -> Self {
        Basis {
            units: (0..algebra.dim())
                .map(|i| HyperNum::basis(algebra, i))
                .collect(),
        }
    }
}

/// Completes `{1, I}` to an orthonormal positively oriented basis.
///
/// Gram–Schmidt (two passes) runs over the canonical imaginary vectors in the
/// requested order, skipping the one on which `I` has its largest component
/// (lowest index on ties), so the remaining candidates are never close to
/// dependent. The last vector is negated if the orientation comes out negative.
pub fn complete_basis(unit: &HyperNum, order: Completion) -> Result<Basis> {
    let algebra = unit.algebra();
    let d = algebra.dim();
    if d < 4 {
        return Err(Error::InvalidUnit(format!(
            "cannot complete a basis in dimension {d}"
        )));
    }
    if unit.re().abs() > UNIT_TOLERANCE || (unit.norm() - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::InvalidUnit(format!(
            "|I| = {} with real part {}",
            unit.norm(),
            unit.re()
        )));
    }
    let i = unit.im() / unit.im().norm();
    let pivot = (1..d)
        .max_by(|&a, &b| {
            i.coeffs[a]
                .abs()
                .partial_cmp(&i.coeffs[b].abs())
                .unwrap()
                .then(b.cmp(&a))
        })
        .expect("d ≥ 4");
    let mut candidates: Vec<usize> = (1..d).filter(|&l| l != pivot).collect();
    if order == Completion::Reverse {
        candidates.reverse();
    }

    let mut units = vec![HyperNum::one(algebra), i];
    for l in candidates {
        let mut v = HyperNum::basis(algebra, l);
        for _ in 0..2 {
            for u in &units {
                v = v - *u * u.dot(&v);
            }
        }
        let n = v.norm();
        units.push(v / n);
    }
    let mut basis = Basis { units };
    if basis.determinant() < 0.0 {
        let last = basis.units.len() - 1;
        basis.units[last] = -basis.units[last];
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(w: f64, i: f64, j: f64, k: f64) -> HyperNum {
        HyperNum::quaternion(w, i, j, k)
    }

    fn e(index: usize) -> HyperNum {
        HyperNum::basis(Algebra::Octonion, index)
    }

    #[test]
    fn quaternion_table() {
        assert_eq!(q(0., 1., 0., 0.) * q(0., 0., 1., 0.), q(0., 0., 0., 1.));
        assert_eq!(q(0., 0., 1., 0.) * q(0., 0., 0., 1.), q(0., 1., 0., 0.));
        assert_eq!(q(0., 0., 0., 1.) * q(0., 1., 0., 0.), q(0., 0., 1., 0.));
        assert_eq!(q(0., 0., 1., 0.) * q(0., 1., 0., 0.), q(0., 0., 0., -1.));
    }

    #[test]
    fn octonion_products_from_doubling() {
        // (i,0)(0,1) = (0, 1·i)
        assert_eq!(e(1) * e(4), e(5));
        assert_eq!((e(1) * e(2)) * e(4), e(7));
        assert_eq!(e(1) * (e(2) * e(4)), -e(7));
        for a in 1..8 {
            assert_eq!(e(a) * e(a), -e(0));
        }
    }

    #[test]
    fn mixed_dimensions_are_rejected() {
        let err = HyperNum::try_mul(&q(1., 0., 0., 0.), &e(1)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { left: 4, right: 8 });
    }

    #[test]
    fn inverse_examples() {
        let inv = q(1., 1., 0., 0.).inv().unwrap();
        assert!(inv.max_abs_diff(&q(0.5, -0.5, 0., 0.)) < 1e-15);
        let r = HyperNum::real(Algebra::Real, 2.0).inv().unwrap();
        assert_eq!(r.re(), 0.5);
        let o = e(3) + e(5);
        let inv = o.inv().unwrap();
        assert!(inv.max_abs_diff(&(-(o) / 2.0)) < 1e-15);
        assert!((o * inv).max_abs_diff(&e(0)) < 1e-12);
        assert_eq!(HyperNum::zero(Algebra::Quaternion).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn exponential_examples() {
        assert_eq!(HyperNum::zero(Algebra::Quaternion).exp(), q(1., 0., 0., 0.));
        let unit = ImaginaryUnit::new(q(0., 0.6, 0., 0.8)).unwrap();
        let z = (unit.value() * std::f64::consts::PI).exp();
        assert!(z.max_abs_diff(&q(-1., 0., 0., 0.)) < 1e-15);
        let w = q(1., std::f64::consts::FRAC_PI_2, 0., 0.).exp();
        let expected = q(0., std::f64::consts::E, 0., 0.);
        assert!(w.max_abs_diff(&expected) < 1e-15);
        // tiny imaginary parts take the series branch
        let t = q(0.3, 1e-9, 0., 0.).exp();
        assert!((t[1] - 0.3f64.exp() * 1e-9).abs() < 1e-24);
    }

    #[test]
    fn decompose_examples() {
        let i = ImaginaryUnit::basis(Algebra::Quaternion, 1);
        let p = decompose(&q(3., 0., 0., 0.), i);
        assert_eq!((p.x, p.y, p.unit), (3.0, 0.0, i));

        let p = decompose(&q(1., 2., 2., 1.), i);
        assert_eq!((p.x, p.y), (1.0, 3.0));
        assert!(p.unit.value().max_abs_diff(&q(0., 2. / 3., 2. / 3., 1. / 3.)) < 1e-15);

        let p = decompose(&q(2., 0., 0., -5.), i);
        assert_eq!((p.x, p.y), (2.0, 5.0));
        assert_eq!(p.unit.value(), q(0., 0., 0., -1.));
    }

    #[test]
    fn unit_validation() {
        assert!(ImaginaryUnit::new(q(0., 1., 1., 0.)).is_err());
        assert!(ImaginaryUnit::new(q(0.1, 1., 0., 0.)).is_err());
        assert!(ImaginaryUnit::new(HyperNum::real(Algebra::Real, 0.0)).is_err());
        assert!(complete_basis(&q(0., 1.0 + 1e-6, 0., 0.), Completion::Forward).is_err());
        assert!(complete_basis(&q(0., 1.0 + 1e-11, 0., 0.), Completion::Forward).is_ok());
    }

    #[test]
    fn canonical_completion() {
        let b = ImaginaryUnit::basis(Algebra::Quaternion, 1).complete_basis();
        assert_eq!(b, Basis::canonical(Algebra::Quaternion));
    }

    fn gram_schmidt_oracle(unit: &HyperNum) -> f64 {
        // Independent check: orthonormality residual of the completed basis
        // measured through the coefficient matrix.
        let b = complete_basis(unit, Completion::Forward).unwrap();
        let m = b.matrix();
        let g = m.transpose() * &m;
        let id = DMatrix::<f64>::identity(b.dim(), b.dim());
        (g - id).abs().max()
    }

    #[test]
    fn completion_is_orthonormal_and_oriented() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let unit = q(0., s, s, 0.);
        assert!(gram_schmidt_oracle(&unit) < 1e-12);
        let b = complete_basis(&unit, Completion::Forward).unwrap();
        assert!((b.determinant() - 1.0).abs() < 1e-12);
        assert_eq!(b.units()[1], unit);

        let b = complete_basis(&e(7), Completion::Forward).unwrap();
        assert_eq!(b.dim(), 8);
        assert!(gram_schmidt_oracle(&e(7)) < 1e-12);
        assert!((b.determinant() - 1.0).abs() < 1e-12);

        let again = complete_basis(&e(7), Completion::Forward).unwrap();
        assert_eq!(b, again);
        let rev = complete_basis(&e(7), Completion::Reverse).unwrap();
        assert!((rev.determinant() - 1.0).abs() < 1e-12);
    }
}
