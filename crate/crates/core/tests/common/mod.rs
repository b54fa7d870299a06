#![allow(dead_code)]

use conceptor_core::{Conceptor, Correlation};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Slack for eigenvalues recomputed from a matrix rebuilt out of its
/// spectrum; a value clamped to 1 can read back as 1 + a few ulps.
pub const ROUNDOFF: f64 = 1e-12;

pub fn in_unit_interval(s: f64) -> bool {
    (-ROUNDOFF..=1.0 + ROUNDOFF).contains(&s)
}

/// Random orthogonal matrix from the QR factor of a Gaussian matrix.
pub fn random_rotation(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    g.qr().q()
}

fn with_spectrum(q: &DMatrix<f64>, spectrum: &[f64]) -> DMatrix<f64> {
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(spectrum));
    let m = q * d * q.transpose();
    (&m + m.transpose()) * 0.5
}

/// Full-rank conceptor with spectrum drawn from `[0.05, 0.95]`.
pub fn random_conceptor(n: usize, rng: &mut ChaCha8Rng) -> Conceptor {
    let q = random_rotation(n, rng);
    let s: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.95)).collect();
    Conceptor::from_matrix(with_spectrum(&q, &s), conceptor_core::Aperture::Composite).unwrap()
}

/// Full-rank correlation with eigenvalues drawn from `[0.01, 1]`.
pub fn random_correlation(n: usize, rng: &mut ChaCha8Rng) -> Correlation {
    let q = random_rotation(n, rng);
    let s: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    Correlation::from_matrix(with_spectrum(&q, &s), 1).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dist(a: &Conceptor, b: &Conceptor) -> f64 {
    (a.matrix() - b.matrix()).norm()
}

/// Largest Frobenius deviation over the algebra laws for one draw of three
/// conceptors and two correlations; each entry is `(law, deviation)`.
pub fn law_deviations(n: usize, seed: u64) -> Vec<(&'static str, f64)> {
    let mut r = rng(seed);
    let (a, b, c) = (random_conceptor(n, &mut r), random_conceptor(n, &mut r), random_conceptor(n, &mut r));
    let (r1, r2) = (random_correlation(n, &mut r), random_correlation(n, &mut r));
    let alpha = r.gen_range(0.5..10.0);
    let (g1, g2) = (r.gen_range(0.2..5.0), r.gen_range(0.2..5.0));

    let and_ab = a.and(&b).unwrap();
    let or_ab = a.or(&b).unwrap();
    let sum = Correlation::from_matrix(r1.matrix() + r2.matrix(), 1).unwrap();
    let c1 = Conceptor::from_correlation(&r1, alpha).unwrap();
    let c2 = Conceptor::from_correlation(&r2, alpha).unwrap();
    let below = if a.loewner_leq(&or_ab, 1e-10).unwrap() { 0.0 } else { f64::INFINITY };

    vec![
        ("de_morgan_and", dist(&and_ab.not(), &a.not().or(&b.not()).unwrap())),
        ("de_morgan_or", dist(&or_ab.not(), &a.not().and(&b.not()).unwrap())),
        ("double_negation", dist(&a.not().not(), &a)),
        ("and_commutes", dist(&and_ab, &b.and(&a).unwrap())),
        ("or_commutes", dist(&or_ab, &b.or(&a).unwrap())),
        ("and_associates", dist(&and_ab.and(&c).unwrap(), &a.and(&b.and(&c).unwrap()).unwrap())),
        ("or_associates", dist(&or_ab.or(&c).unwrap(), &a.or(&b.or(&c).unwrap()).unwrap())),
        ("below_or", below),
        (
            "aperture_composition",
            dist(&a.adapt_aperture(g1).unwrap().adapt_aperture(g2).unwrap(), &a.adapt_aperture(g1 * g2).unwrap()),
        ),
        (
            "aperture_semantics",
            dist(&Conceptor::from_correlation(&r1, g1 * alpha).unwrap(), &c1.adapt_aperture(g1).unwrap()),
        ),
        ("or_adds_correlations", dist(&c1.or(&c2).unwrap(), &Conceptor::from_correlation(&sum, alpha).unwrap())),
    ]
}
