//! Small dense complex linear algebra: 2×2 eigen-decomposition and matrix
//! exponential.

use nalgebra::Matrix2;

use crate::C64;

pub type CMatrix2 = Matrix2<C64>;

/// Relative eigenvalue separation below which a 2×2 matrix is treated as
/// degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;

/// Eigenvalues and column eigenvectors of a non-degenerate 2×2 matrix.
#[derive(Debug, Clone, Copy)]
pub struct Eigen2 {
    pub values: [C64; 2],
    pub vectors: CMatrix2,
}

fn norm(m: &CMatrix2) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Half-trace and half-gap: the eigenvalues are `mean ± half_gap`.
fn spectrum(m: &CMatrix2) -> (C64, C64) {
    let mean = (m[(0, 0)] + m[(1, 1)]) * 0.5;
    let half_diff = (m[(0, 0)] - m[(1, 1)]) * 0.5;
    let half_gap = (half_diff * half_diff + m[(0, 1)] * m[(1, 0)]).sqrt();
    (mean, half_gap)
}

fn is_degenerate(m: &CMatrix2, half_gap: C64) -> bool {
    2.0 * half_gap.norm() < DEGENERACY_THRESHOLD * norm(m)
}

/// Eigen-decomposition, or `None` when the eigenvalues are (nearly) equal.
pub fn eigen2(m: &CMatrix2) -> Option<Eigen2> {
    let (mean, half_gap) = spectrum(m);
    if is_degenerate(m, half_gap) || half_gap == C64::new(0.0, 0.0) {
        return None;
    }
    let values = [mean - half_gap, mean + half_gap];
    let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let vector = |lambda: C64| {
        // Both candidates solve (m - λ)v = 0; keep the better conditioned.
        let v1 = [b, lambda - a];
        let v2 = [lambda - d, c];
        let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
        let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
        let (v, n) = if n1 >= n2 { (v1, n1) } else { (v2, n2) };
        let s = n.sqrt();
        [v[0] / s, v[1] / s]
    };
    let v0 = vector(values[0]);
    let v1 = vector(values[1]);
    Some(Eigen2 {
        values,
        vectors: CMatrix2::new(v0[0], v1[0], v0[1], v1[1]),
    })
}

/// exp(m) for a finite complex 2×2 matrix.
///
/// Uses exp(m) = e^μ [cosh(s) I + sinh(s)/s (m − μI)] with eigenvalues
/// μ ± s, and a scaled Taylor series when the eigenvalues nearly coincide.
pub fn matrix_exponential(m: &CMatrix2) -> CMatrix2 {
    let (mean, half_gap) = spectrum(m);
    if is_degenerate(m, half_gap) || half_gap == C64::new(0.0, 0.0) {
        return taylor_exponential(m);
    }
    let shifted = m - CMatrix2::identity() * mean;
    let scale = mean.exp();
    (CMatrix2::identity() * half_gap.cosh() + shifted * (half_gap.sinh() / half_gap)) * scale
}

fn taylor_exponential(m: &CMatrix2) -> CMatrix2 {
    let n = norm(m);
    let mut squarings = 0;
    let mut scaled = *m;
    if n > 0.5 {
        squarings = (n / 0.5).log2().ceil() as u32;
        scaled = m / C64::new(2f64.powi(squarings as i32), 0.0);
    }
    let mut sum = CMatrix2::identity();
    let mut term = CMatrix2::identity();
    for k in 1..=20 {
        term = term * scaled / C64::new(k as f64, 0.0);
        sum += term;
        if norm(&term) < 1e-18 * norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn max_dev(a: &CMatrix2, b: &CMatrix2) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_matrix_gives_identity() {
        assert_eq!(matrix_exponential(&CMatrix2::zeros()), CMatrix2::identity());
    }

    #[test]
    fn diagonal_matrix() {
        let a = c(0.3, -1.2);
        let b = c(-2.0, 0.5);
        let e = matrix_exponential(&CMatrix2::new(a, c(0.0, 0.0), c(0.0, 0.0), b));
        let want = CMatrix2::new(a.exp(), c(0.0, 0.0), c(0.0, 0.0), b.exp());
        assert!(max_dev(&e, &want) < 1e-14);
    }

    #[test]
    fn jordan_block_uses_series() {
        // exp([[l, 1], [0, l]]) = e^l [[1, 1], [0, 1]]
        let l = c(0.7, 0.2);
        let e = matrix_exponential(&CMatrix2::new(l, c(1.0, 0.0), c(0.0, 0.0), l));
        let want = CMatrix2::new(l.exp(), l.exp(), c(0.0, 0.0), l.exp());
        assert!(max_dev(&e, &want) < 1e-14);
    }

    #[test]
    fn near_degenerate_matches_series() {
        let eps = 1e-10;
        let m = CMatrix2::new(c(1.0, 0.5), c(1.0, 0.0), c(eps * eps, 0.0), c(1.0, 0.5));
        let series = taylor_exponential(&m);
        assert!(max_dev(&matrix_exponential(&m), &series) < 1e-13);
    }

    #[test]
    fn eigenvectors_satisfy_definition() {
        let m = CMatrix2::new(c(-60.0, 0.1), c(0.3, -2.0), c(1.5, 0.2), c(40.0, -3.0));
        let e = eigen2(&m).unwrap();
        for k in 0..2 {
            let v = e.vectors.column(k);
            let r = m * v - v * e.values[k];
            assert!(r.norm() < 1e-12 * norm(&m));
        }
        assert!(eigen2(&CMatrix2::identity()).is_none());
    }

    proptest! {
        #[test]
        fn exp_times_exp_neg_is_identity(v in proptest::collection::vec(-3.0f64..3.0, 8)) {
            let m = CMatrix2::new(c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5]), c(v[6], v[7]));
            let p = matrix_exponential(&m) * matrix_exponential(&-m);
            prop_assert!(max_dev(&p, &CMatrix2::identity()) < 1e-12);
        }

        #[test]
        fn closed_form_matches_series(v in proptest::collection::vec(-2.0f64..2.0, 8)) {
            let m = CMatrix2::new(c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5]), c(v[6], v[7]));
            let a = matrix_exponential(&m);
            let b = taylor_exponential(&m);
            prop_assert!(max_dev(&a, &b) < 1e-11 * (1.0 + norm(&b)));
        }
    }
}
