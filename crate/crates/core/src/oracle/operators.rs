use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::spectral::Couplings;

/// Largest width for which dense 2^N operators are built.
pub const MAX_ORACLE_WIDTH: usize = 12;

/// Dense spin-basis operators of the periodic strip. Basis state b has spin
/// σ_j = +1 when bit j of b is clear and −1 when it is set.
#[derive(Debug, Clone)]
pub struct SpinOperatorSet {
    n: usize,
    eps_y: i8,
    /// ln of the prefactor (2 sinh 2K_x)^{N/2}.
    log_scale: f64,
    /// V_y^{1/2} V_x V_y^{1/2}, i.e. V without the prefactor.
    reduced_v: DMatrix<f64>,
    /// The inverse of `reduced_v`, built in closed form.
    reduced_v_inverse: DMatrix<f64>,
    /// Spin values per site: spins[l][b] = σ_l(b).
    spins: Vec<Vec<f64>>,
    /// Global flip: (U f)(b) = f(flip[b]).
    flip: Vec<usize>,
    /// Translation: (T f)(b) = f(shift[b]).
    shift: Vec<usize>,
}

fn spin(b: usize, j: usize) -> f64 {
    if b >> j & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

impl SpinOperatorSet {
    pub fn new(c: &Couplings, eps_y: i8) -> Result<Self> {
        let n = c.n();
        if n > MAX_ORACLE_WIDTH {
            return Err(Error::Resource(format!("dense oracle limited to N <= {MAX_ORACLE_WIDTH}, got {n}")));
        }
        if eps_y.abs() != 1 {
            return Err(Error::Domain(format!("eps_y must be ±1, got {eps_y}")));
        }
        let dim = 1usize << n;
        let spins: Vec<Vec<f64>> = (0..n).map(|j| (0..dim).map(|b| spin(b, j)).collect()).collect();
        let bond = |b: usize| -> f64 {
            (0..n)
                .map(|j| {
                    let next = if j + 1 == n { eps_y as f64 * spin(b, 0) } else { spin(b, j + 1) };
                    spin(b, j) * next
                })
                .sum()
        };
        let half_vy: Vec<f64> = (0..dim).map(|b| (0.5 * c.ky() * bond(b)).exp()).collect();
        let (ch, sh) = (c.kx_star().cosh(), c.kx_star().sinh());
        let vx = |b: usize, d: usize, sign: f64| {
            let h = (b ^ d).count_ones() as i32;
            ch.powi(n as i32 - h) * (sign * sh).powi(h)
        };
        let reduced_v = DMatrix::from_fn(dim, dim, |b, d| half_vy[b] * vx(b, d, 1.0) * half_vy[d]);
        let reduced_v_inverse = DMatrix::from_fn(dim, dim, |b, d| vx(b, d, -1.0) / (half_vy[b] * half_vy[d]));
        let all = dim - 1;
        let flip = (0..dim).map(|b| b ^ all).collect();
        let twist = if eps_y == -1 { 1 } else { 0 };
        let shift = (0..dim).map(|b| (b >> 1) | (((b & 1) ^ twist) << (n - 1))).collect();
        Ok(Self {
            n,
            eps_y,
            log_scale: 0.5 * n as f64 * (2.0 * c.sinh_2kx()).ln(),
            reduced_v,
            reduced_v_inverse,
            spins,
            flip,
            shift,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eps_y(&self) -> i8 {
        self.eps_y
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    /// V divided by (2 sinh 2K_x)^{N/2}.
    pub fn reduced_v(&self) -> &DMatrix<f64> {
        &self.reduced_v
    }

    pub fn reduced_v_inverse(&self) -> &DMatrix<f64> {
        &self.reduced_v_inverse
    }

    /// The full transfer matrix V.
    pub fn v(&self) -> DMatrix<f64> {
        &self.reduced_v * self.log_scale.exp()
    }

    pub fn spin_diagonal(&self, l: usize) -> &[f64] {
        &self.spins[l]
    }

    pub fn flip_map(&self) -> &[usize] {
        &self.flip
    }

    pub fn shift_map(&self) -> &[usize] {
        &self.shift
    }

    fn permutation_matrix(map: &[usize]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(map.len(), map.len());
        for (b, &d) in map.iter().enumerate() {
            m[(b, d)] = 1.0;
        }
        m
    }

    pub fn u_matrix(&self) -> DMatrix<f64> {
        Self::permutation_matrix(&self.flip)
    }

    pub fn t_matrix(&self) -> DMatrix<f64> {
        Self::permutation_matrix(&self.shift)
    }

    pub fn spin_matrix(&self, l: usize) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.spins[l]))
    }

    /// The diagonal of T^k s_0 T^{−k}, for any integer k.
    pub fn translated_spin_diagonal(&self, k: i64) -> Vec<f64> {
        let dim = self.dim();
        let mut inverse = vec![0; dim];
        for (b, &d) in self.shift.iter().enumerate() {
            inverse[d] = b;
        }
        let map = if k >= 0 { &self.shift } else { &inverse };
        let mut diag = self.spins[0].clone();
        for _ in 0..k.unsigned_abs() {
            diag = (0..dim).map(|b| diag[map[b]]).collect();
        }
        diag
    }

    /// Norms of [V, U], [V, T], [T, U], {s_l, U} and of T s_j T⁻¹ − s_{j+1},
    /// relative to the largest entry of V.
    pub fn symmetry_residuals(&self) -> SymmetryResiduals {
        let dim = self.dim();
        let v = &self.reduced_v;
        let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let conj = |map: &[usize]| {
            let mut worst = 0.0f64;
            for b in 0..dim {
                for d in 0..dim {
                    worst = worst.max((v[(map[b], map[d])] - v[(b, d)]).abs());
                }
            }
            worst / scale
        };
        let tu = (0..dim).all(|b| self.shift[self.flip[b]] == self.flip[self.shift[b]]);
        let mut anti = 0.0f64;
        for s in &self.spins {
            for b in 0..dim {
                anti = anti.max((s[self.flip[b]] + s[b]).abs());
            }
        }
        let mut translate = 0.0f64;
        for j in 0..self.n {
            let next: Vec<f64> = if j + 1 == self.n {
                self.spins[0].iter().map(|x| self.eps_y as f64 * x).collect()
            } else {
                self.spins[j + 1].clone()
            };
            for b in 0..dim {
                translate = translate.max((self.spins[j][self.shift[b]] - next[b]).abs());
            }
        }
        SymmetryResiduals {
            v_u: conj(&self.flip),
            v_t: conj(&self.shift),
            t_u: if tu { 0.0 } else { 1.0 },
            spin_u_anticommutator: anti,
            spin_translation: translate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryResiduals {
    pub v_u: f64,
    pub v_t: f64,
    pub t_u: f64,
    pub spin_u_anticommutator: f64,
    pub spin_translation: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        [self.v_u, self.v_t, self.t_u, self.spin_u_anticommutator, self.spin_translation]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetries_hold() {
        for n in 1..=5 {
            let c = Couplings::new(n, 0.4, 0.7).unwrap();
            for eps in [1, -1] {
                let ops = SpinOperatorSet::new(&c, eps).unwrap();
                let r = ops.symmetry_residuals();
                assert!(r.max() < 1e-12, "N = {n} eps = {eps}: {r:?}");
                let v = ops.v();
                assert!((&v - v.transpose()).amax() < 1e-12 * v.amax());
            }
        }
    }

    #[test]
    fn inverse_is_exact() {
        let c = Couplings::new(4, 0.3, 0.9).unwrap();
        let ops = SpinOperatorSet::new(&c, 1).unwrap();
        let prod = ops.reduced_v() * ops.reduced_v_inverse();
        assert!((prod - DMatrix::identity(16, 16)).amax() < 1e-12);
    }

    #[test]
    fn single_site() {
        let c = Couplings::new(1, 0.4, 0.7).unwrap();
        let ops = SpinOperatorSet::new(&c, 1).unwrap();
        let v = ops.v();
        assert_eq!(v.nrows(), 2);
        let f = (2.0 * c.sinh_2kx()).sqrt() * c.ky().exp();
        assert!((v[(0, 0)] - f * c.kx_star().cosh()).abs() < 1e-12 * f);
        assert!((v[(0, 1)] - f * c.kx_star().sinh()).abs() < 1e-12 * f);
    }

    #[test]
    fn width_limit() {
        let c = Couplings::new(13, 0.4, 0.7).unwrap();
        assert!(matches!(SpinOperatorSet::new(&c, 1), Err(Error::Resource(_))));
    }

    #[test]
    fn translated_spin() {
        let c = Couplings::new(4, 0.4, 0.7).unwrap();
        let ops = SpinOperatorSet::new(&c, -1).unwrap();
        assert_eq!(ops.translated_spin_diagonal(2), ops.spin_diagonal(2));
        let wrapped: Vec<f64> = ops.spin_diagonal(1).iter().map(|x| -x).collect();
        assert_eq!(ops.translated_spin_diagonal(5), wrapped);
        assert_eq!(ops.translated_spin_diagonal(-3), wrapped);
    }
}
