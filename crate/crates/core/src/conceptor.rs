//! Conceptor matrices and their algebra.
//!
//! A conceptor is a symmetric matrix with spectrum in `[0, 1]`. It is computed
//! from a state correlation `R` as `C = R (R + α⁻² I)⁻¹` and combined with
//! NOT, AND, OR, logical difference, aperture adaptation and linear mixing.
//! Every operation symmetrizes its result and clamps the spectrum to `[0, 1]`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, RANK_TOL};
use crate::reservoir::StateCloud;

/// Spectrum values this far outside `[0, 1]` are still accepted (and clamped).
pub const CLAMP_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-10;
const MIX_SUM_TOL: f64 = 1e-9;

/// Aperture a conceptor was computed with, or `Composite` for results of
/// operations that have no single aperture.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Aperture {
    Value(f64),
    Composite,
}

impl Aperture {
    pub fn value(self) -> Option<f64> {
        match self {
            Aperture::Value(a) => Some(a),
            Aperture::Composite => None,
        }
    }
}

impl fmt::Display for Aperture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Aperture::Value(a) => write!(f, "{a}"),
            Aperture::Composite => f.write_str("composite"),
        }
    }
}

impl Serialize for Aperture {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Aperture::Value(a) => s.serialize_f64(*a),
            Aperture::Composite => s.serialize_str("composite"),
        }
    }
}

impl<'de> Deserialize<'de> for Aperture {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(a) if a > 0.0 && a.is_finite() => Ok(Aperture::Value(a)),
            Raw::Num(a) => Err(serde::de::Error::custom(format!("aperture {a} is not positive"))),
            Raw::Text(t) if t == "composite" => Ok(Aperture::Composite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("unknown aperture `{t}`"))),
        }
    }
}

/// State correlation matrix `X Xᵀ / L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    #[serde(with = "crate::serde_mat")]
    mat: DMatrix<f64>,
    sample_count: usize,
}

impl Correlation {
    pub fn from_states(states: &DMatrix<f64>) -> Result<Self> {
        let l = states.ncols();
        if l == 0 {
            return Err(Error::InvalidParameter("empty state cloud".into()));
        }
        let mat = linalg::symmetrize(&(states * states.transpose())) / l as f64;
        Ok(Self { mat, sample_count: l })
    }

    pub fn from_cloud(cloud: &StateCloud) -> Result<Self> {
        Self::from_states(&cloud.states)
    }

    /// Pools several clouds as if their states were concatenated.
    pub fn pooled<'a>(clouds: impl IntoIterator<Item = &'a StateCloud>) -> Result<Self> {
        let mut acc: Option<DMatrix<f64>> = None;
        let mut count = 0;
        for c in clouds {
            let outer = &c.states * c.states.transpose();
            count += c.len();
            acc = Some(match acc {
                Some(a) if a.shape() != outer.shape() => {
                    return Err(Error::DimensionMismatch { expected: a.nrows(), got: outer.nrows() })
                }
                Some(a) => a + outer,
                None => outer,
            });
        }
        match acc {
            Some(a) if count > 0 => Ok(Self {
                mat: linalg::symmetrize(&a) / count as f64,
                sample_count: count,
            }),
            _ => Err(Error::InvalidParameter("empty state cloud".into())),
        }
    }

    pub fn from_matrix(mat: DMatrix<f64>, sample_count: usize) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), got: mat.ncols() });
        }
        if sample_count == 0 {
            return Err(Error::InvalidParameter("sample_count must be positive".into()));
        }
        Ok(Self { mat: linalg::symmetrize(&mat), sample_count })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conceptor {
    mat: DMatrix<f64>,
    aperture: Aperture,
}

#[derive(Serialize, Deserialize)]
struct ConceptorJson {
    n: usize,
    aperture: Aperture,
    mat: Vec<f64>,
}

impl Serialize for Conceptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ConceptorJson {
            n: self.dim(),
            aperture: self.aperture,
            mat: crate::serde_mat::to_row_major(&self.mat),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Conceptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ConceptorJson::deserialize(d)?;
        if j.mat.len() != j.n * j.n {
            return Err(serde::de::Error::custom(format!(
                "conceptor of size {} needs {} entries, got {}",
                j.n,
                j.n * j.n,
                j.mat.len()
            )));
        }
        Conceptor::from_matrix(DMatrix::from_row_slice(j.n, j.n, &j.mat), j.aperture)
            .map_err(serde::de::Error::custom)
    }
}

impl Conceptor {
    /// Validates symmetry and spectrum (within tolerance) and clamps.
    pub fn from_matrix(mat: DMatrix<f64>, aperture: Aperture) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidConceptor(format!("{}x{} is not square", mat.nrows(), mat.ncols())));
        }
        if mat.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConceptor("non-finite entries".into()));
        }
        let asym = (&mat - mat.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidConceptor(format!("asymmetry {asym:e}")));
        }
        let spec = linalg::sorted_eigenvalues(&mat);
        if let (Some(&hi), Some(&lo)) = (spec.first(), spec.last()) {
            if hi > 1.0 + CLAMP_TOL || lo < -CLAMP_TOL {
                return Err(Error::InvalidConceptor(format!("spectrum [{lo}, {hi}] outside [0, 1]")));
            }
            // Exactly symmetric matrices with an in-range spectrum are kept
            // as given, so serialized conceptors read back bit-identically.
            if asym == 0.0 && hi <= 1.0 && lo >= 0.0 {
                return Ok(Self { mat, aperture });
            }
        }
        Ok(Self::clamped(mat, aperture))
    }

    /// Symmetrizes and clamps the spectrum to `[0, 1]` unconditionally.
    pub fn clamped(mat: DMatrix<f64>, aperture: Aperture) -> Self {
        Self { mat: linalg::map_spectrum(&mat, |s| s.clamp(0.0, 1.0)), aperture }
    }

    /// Wraps a matrix the caller guarantees to be a valid conceptor.
    pub(crate) fn from_valid(mat: DMatrix<f64>, aperture: Aperture) -> Self {
        Self { mat, aperture }
    }

    pub fn zero(n: usize) -> Self {
        Self { mat: DMatrix::zeros(n, n), aperture: Aperture::Composite }
    }

    pub fn identity(n: usize) -> Self {
        Self { mat: DMatrix::identity(n, n), aperture: Aperture::Composite }
    }

    /// Diagonal conceptor with the given spectrum.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_matrix(
            DMatrix::from_diagonal(&DVector::from_column_slice(values)),
            Aperture::Composite,
        )
    }

    /// `C = R (R + α⁻² I)⁻¹`, evaluated on the eigenbasis of `R` through the
    /// eigenvalue map `σ ↦ σ / (σ + α⁻²)`.
    pub fn from_correlation(corr: &Correlation, aperture: f64) -> Result<Self> {
        if !(aperture > 0.0 && aperture.is_finite()) {
            return Err(Error::InvalidParameter(format!("aperture {aperture} must be positive")));
        }
        let reg = aperture.powi(-2);
        let mat = linalg::map_spectrum(corr.matrix(), |s| {
            let s = s.max(0.0);
            s / (s + reg)
        });
        Ok(Self { mat, aperture: Aperture::Value(aperture) })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn aperture(&self) -> Aperture {
        self.aperture
    }

    pub fn with_aperture(mut self, aperture: Aperture) -> Self {
        self.aperture = aperture;
        self
    }

    /// Spectrum in descending order.
    pub fn spectrum(&self) -> Vec<f64> {
        linalg::sorted_eigenvalues(&self.mat)
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.mat * x
    }

    fn check_dim(&self, other: &Conceptor) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }

    /// `I − C`. The spectrum stays in `[0, 1]`, so no clamp is needed.
    pub fn not(&self) -> Self {
        let n = self.dim();
        Self {
            mat: linalg::symmetrize(&(DMatrix::identity(n, n) - &self.mat)),
            aperture: Aperture::Composite,
        }
    }

    /// `(A⁺ + B⁺ − I)⁻¹` on the intersection of the ranges of `A` and `B`,
    /// zero on its orthogonal complement.
    pub fn and(&self, other: &Conceptor) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim();
        let null_a = linalg::eigen_basis(&self.mat, |s| s <= RANK_TOL);
        let null_b = linalg::eigen_basis(&other.mat, |s| s <= RANK_TOL);
        let null_sum = &null_a * null_a.transpose() + &null_b * null_b.transpose();
        // The range intersection is the null space of the summed null projectors.
        let basis = linalg::eigen_basis(&null_sum, |s| s <= RANK_TOL);
        if basis.ncols() == 0 {
            return Ok(Self::zero(n));
        }
        let eye = DMatrix::identity(n, n);
        let sum = linalg::pinv_sym(&self.mat, RANK_TOL) + linalg::pinv_sym(&other.mat, RANK_TOL) - eye;
        let restricted = linalg::symmetrize(&(basis.transpose() * sum * &basis));
        // Restricted to the range intersection both pseudo-inverses dominate I,
        // so `restricted` is positive definite.
        let inv = linalg::map_spectrum(&restricted, |s| 1.0 / s);
        let mat = &basis * inv * basis.transpose();
        Ok(Self::clamped(mat, Aperture::Composite))
    }

    /// `¬(¬A ∧ ¬B)`.
    pub fn or(&self, other: &Conceptor) -> Result<Self> {
        Ok(self.not().and(&other.not())?.not())
    }

    /// Logical difference `A ∧ ¬B`: what `self` holds that `other` does not.
    pub fn diff(&self, other: &Conceptor) -> Result<Self> {
        self.and(&other.not())
    }

    /// Rescales the aperture by `gamma` through `s ↦ s / (s + γ⁻²(1 − s))`.
    /// `gamma = 0` gives the zero conceptor and `gamma = ∞` the orthogonal
    /// projector onto the range of `self`.
    pub fn adapt_aperture(&self, gamma: f64) -> Result<Self> {
        if gamma.is_nan() || gamma < 0.0 {
            return Err(Error::InvalidParameter(format!("gamma {gamma} must be nonnegative")));
        }
        let n = self.dim();
        if gamma == 0.0 {
            return Ok(Self::zero(n));
        }
        if gamma.is_infinite() {
            let range = linalg::eigen_basis(&self.mat, |s| s > RANK_TOL);
            return Ok(Self { mat: &range * range.transpose(), aperture: Aperture::Composite });
        }
        let g2 = gamma * gamma;
        let mat = linalg::map_spectrum(&self.mat, |s| {
            let s = s.clamp(0.0, 1.0);
            let denom = g2 * s + (1.0 - s);
            if denom > 0.0 { (g2 * s / denom).clamp(0.0, 1.0) } else { 0.0 }
        });
        let aperture = match self.aperture {
            Aperture::Value(a) => Aperture::Value(a * gamma),
            Aperture::Composite => Aperture::Composite,
        };
        Ok(Self { mat, aperture })
    }

    /// Löwner order: `self ≤ other` iff `other − self` has no eigenvalue below `−tol`.
    pub fn loewner_leq(&self, other: &Conceptor, tol: f64) -> Result<bool> {
        self.check_dim(other)?;
        Ok(linalg::min_eigenvalue(&(&other.mat - &self.mat)) >= -tol)
    }

    /// Normalized size `trace / N`: the fraction of state space claimed.
    pub fn quota(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        (self.mat.trace() / self.dim() as f64).clamp(0.0, 1.0)
    }

    pub fn distance(&self, other: &Conceptor) -> f64 {
        linalg::frobenius_distance(&self.mat, &other.mat)
    }
}

/// Affine mixture `Σ aᵢ Cⁱ` with `Σ aᵢ = 1`; negative weights extrapolate.
pub fn mix(cs: &[Conceptor], coeffs: &[f64]) -> Result<Conceptor> {
    if cs.is_empty() || cs.len() != coeffs.len() {
        return Err(Error::DimensionMismatch { expected: cs.len(), got: coeffs.len() });
    }
    let total: f64 = coeffs.iter().sum();
    if (total - 1.0).abs() > MIX_SUM_TOL {
        return Err(Error::CoefficientSum(total));
    }
    let n = cs[0].dim();
    let mut mat = DMatrix::zeros(n, n);
    for (c, &a) in cs.iter().zip(coeffs) {
        cs[0].check_dim(c)?;
        mat += c.matrix() * a;
    }
    Ok(Conceptor::clamped(mat, Aperture::Composite))
}

/// `∨`-fold of a sequence of conceptors of size `n`; the empty fold is the zero conceptor.
pub fn or_all<'a>(n: usize, cs: impl IntoIterator<Item = &'a Conceptor>) -> Result<Conceptor> {
    cs.into_iter().try_fold(Conceptor::zero(n), |acc, c| acc.or(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> Conceptor {
        Conceptor::diagonal(v).unwrap()
    }

    fn close(a: &Conceptor, b: &Conceptor, tol: f64) -> bool {
        a.distance(b) <= tol
    }

    #[test]
    fn correlation_examples() {
        let v = DMatrix::from_column_slice(2, 1, &[1.0, 2.0]);
        let r = Correlation::from_states(&v).unwrap();
        assert_eq!(r.matrix(), &(&v * v.transpose()));
        let axes = DMatrix::identity(2, 2);
        let r = Correlation::from_states(&axes).unwrap();
        assert_eq!(r.matrix(), &(DMatrix::identity(2, 2) * 0.5));
        let zero = Correlation::from_states(&DMatrix::zeros(3, 4)).unwrap();
        assert_eq!(zero.matrix(), &DMatrix::zeros(3, 3));
        assert!(Correlation::from_states(&DMatrix::zeros(3, 0)).is_err());
    }

    #[test]
    fn compute_conceptor_examples() {
        let zero = Correlation::from_matrix(DMatrix::zeros(2, 2), 1).unwrap();
        assert_eq!(Conceptor::from_correlation(&zero, 3.0).unwrap().matrix(), &DMatrix::zeros(2, 2));
        let eye = Correlation::from_matrix(DMatrix::identity(3, 3), 1).unwrap();
        let c = Conceptor::from_correlation(&eye, 1.0).unwrap();
        assert!((c.matrix() - DMatrix::identity(3, 3) * 0.5).norm() < 1e-15);
        let r = Correlation::from_matrix(DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 0.0])), 1).unwrap();
        let c = Conceptor::from_correlation(&r, 1.0).unwrap();
        assert!(close(&c, &diag(&[0.8, 0.0]), 1e-15));
        assert_eq!(c.aperture(), Aperture::Value(1.0));
        assert!(Conceptor::from_correlation(&r, 0.0).is_err());
    }

    #[test]
    fn not_examples() {
        assert_eq!(Conceptor::zero(3).not().matrix(), &DMatrix::identity(3, 3));
        let c = diag(&[0.8, 0.3]);
        assert!(close(&c.not(), &diag(&[0.2, 0.7]), 1e-15));
        assert!(close(&c.not().not(), &c, 1e-15));
    }

    #[test]
    fn and_examples() {
        let b = diag(&[0.3, 0.9, 0.0]);
        assert!(close(&Conceptor::identity(3).and(&b).unwrap(), &b, 1e-14));
        assert!(close(&Conceptor::zero(3).and(&b).unwrap(), &Conceptor::zero(3), 1e-15));
        let half = diag(&[0.5]);
        let r = half.and(&half).unwrap();
        assert!((r.matrix()[(0, 0)] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn and_is_zero_off_range_intersection() {
        // Ranges span{e1, e2} and span{e2, e3} intersect in span{e2}.
        let a = diag(&[0.5, 0.5, 0.0]);
        let b = diag(&[0.0, 0.5, 0.5]);
        let r = a.and(&b).unwrap();
        assert!(close(&r, &diag(&[0.0, 1.0 / 3.0, 0.0]), 1e-14));
    }

    #[test]
    fn or_examples() {
        let b = diag(&[0.3, 0.9]);
        assert!(close(&Conceptor::zero(2).or(&b).unwrap(), &b, 1e-14));
        assert!(close(&Conceptor::identity(2).or(&b).unwrap(), &Conceptor::identity(2), 1e-14));
        let half = diag(&[0.5]);
        assert!((half.or(&half).unwrap().matrix()[(0, 0)] - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn or_with_itself_doubles_the_correlation() {
        // C ∨ C = C(2R), i.e. the aperture grows by √2; OR is not idempotent.
        let r = Correlation::from_matrix(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.3, 0.01])), 1).unwrap();
        let c = Conceptor::from_correlation(&r, 3.0).unwrap();
        let twice = c.or(&c).unwrap();
        assert!(close(&twice, &c.adapt_aperture(2f64.sqrt()).unwrap(), 1e-12));
    }

    #[test]
    fn diff_examples() {
        let c = diag(&[0.4, 0.7]);
        assert!(close(&c.diff(&Conceptor::zero(2)).unwrap(), &c, 1e-14));
        assert!(close(&c.diff(&Conceptor::identity(2)).unwrap(), &Conceptor::zero(2), 1e-15));
        let half = diag(&[0.5]);
        assert!((half.diff(&half).unwrap().matrix()[(0, 0)] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn aperture_examples() {
        let c = diag(&[0.5, 0.2, 0.0, 1.0]);
        assert!(close(&c.adapt_aperture(1.0).unwrap(), &c, 1e-15));
        assert!(close(&c.adapt_aperture(0.0).unwrap(), &Conceptor::zero(4), 0.0));
        let g2 = c.adapt_aperture(2.0).unwrap();
        assert!((g2.matrix()[(0, 0)] - 0.8).abs() < 1e-15);
        let inf = c.adapt_aperture(f64::INFINITY).unwrap();
        assert!(close(&inf, &diag(&[1.0, 1.0, 0.0, 1.0]), 1e-15));
        assert!(c.adapt_aperture(-1.0).is_err());
    }

    #[test]
    fn loewner_examples() {
        let a = diag(&[0.5, 0.1]);
        let b = diag(&[0.4, 0.9]);
        assert!(!a.loewner_leq(&b, 1e-10).unwrap());
        assert!(Conceptor::zero(2).loewner_leq(&a, 0.0).unwrap());
        assert!(a.loewner_leq(&Conceptor::identity(2), 0.0).unwrap());
        assert!(a.loewner_leq(&diag(&[1.0]), 0.0).is_err());
    }

    #[test]
    fn quota_examples() {
        assert_eq!(Conceptor::identity(4).quota(), 1.0);
        assert_eq!(Conceptor::zero(4).quota(), 0.0);
        assert!((diag(&[0.8, 0.2]).quota() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mix_examples() {
        let a = diag(&[0.2]);
        let b = diag(&[0.8]);
        let m = mix(&[a.clone(), b.clone()], &[0.5, 0.5]).unwrap();
        assert!((m.matrix()[(0, 0)] - 0.5).abs() < 1e-15);
        assert_eq!(m.aperture(), Aperture::Composite);
        let one_hot = mix(&[a.clone(), b.clone()], &[1.0, 0.0]).unwrap();
        assert!(close(&one_hot, &a, 1e-15));
        assert!(close(&mix(&[a.clone(), a.clone()], &[0.5, 0.5]).unwrap(), &a, 1e-15));
        assert!(matches!(mix(&[a.clone(), b.clone()], &[0.5, 0.6]), Err(Error::CoefficientSum(_))));
        // Extrapolation leaves [0,1] and is clamped.
        let ex = mix(&[a, b], &[-1.0, 2.0]).unwrap();
        assert_eq!(ex.matrix()[(0, 0)], 1.0);
    }

    #[test]
    fn rejects_invalid_matrices() {
        let asym = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.0, 0.5]);
        assert!(Conceptor::from_matrix(asym, Aperture::Composite).is_err());
        let big = DMatrix::identity(2, 2) * 1.5;
        assert!(Conceptor::from_matrix(big, Aperture::Composite).is_err());
        let nearly = DMatrix::identity(2, 2) * (1.0 + 1e-12);
        let c = Conceptor::from_matrix(nearly, Aperture::Composite).unwrap();
        assert!(c.spectrum()[0] <= 1.0);
    }

    #[test]
    fn json_form() {
        let c = Conceptor::from_correlation(
            &Correlation::from_matrix(DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]), 3).unwrap(),
            2.0,
        )
        .unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["aperture"], 2.0);
        assert_eq!(v["mat"].as_array().unwrap().len(), 4);
        let back: Conceptor = serde_json::from_str(&text).unwrap();
        assert!(close(&back, &c, 1e-14));
        let composite: Conceptor =
            serde_json::from_str(r#"{"n":1,"aperture":"composite","mat":[0.25]}"#).unwrap();
        assert_eq!(composite.aperture(), Aperture::Composite);
        assert!(serde_json::from_str::<Conceptor>(r#"{"n":2,"aperture":1.0,"mat":[0.25]}"#).is_err());
    }
}
