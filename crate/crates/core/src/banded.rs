//! Complex band LU with partial pivoting.
//!
//! Storage follows the LAPACK general-band layout: column `c` occupies
//! `ldab = 2 kl + ku + 1` consecutive slots and `A[r][c]` lives at offset
//! `kl + ku + r - c`. The top `kl` rows of each column absorb the fill-in
//! produced by row interchanges, so the factor's upper bandwidth is `kl + ku`.

use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<Complex64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let ldab = 2 * kl + ku + 1;
        Self { n, kl, ku, ldab, data: vec![Complex64::new(0.0, 0.0); ldab * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn offset(&self, r: usize, c: usize) -> usize {
        c * self.ldab + self.kl + self.ku + r - c
    }

    /// Adds `v` at `(r, c)`; panics if the entry lies outside the band.
    pub fn add(&mut self, r: usize, c: usize, v: Complex64) {
        assert!(r <= c + self.kl && c <= r + self.ku, "entry ({r}, {c}) outside band");
        let o = self.offset(r, c);
        self.data[o] += v;
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        if r > c + self.kl || c > r + self.ku + self.kl {
            return Complex64::new(0.0, 0.0);
        }
        self.data[self.offset(r, c)]
    }

    /// Factors in place. Fails with the first column whose pivot is exactly zero.
    pub fn factor(mut self) -> Result<BandLu, usize> {
        let (n, kl, ku, ldab) = (self.n, self.kl, self.ku, self.ldab);
        let mut pivots = vec![0usize; n];
        let mut ju = 0usize;
        let diag = kl + ku;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let col = j * ldab + diag;
            let mut jp = 0;
            let mut best = self.data[col].norm();
            for i in 1..=km {
                let m = self.data[col + i].norm();
                if m > best {
                    best = m;
                    jp = i;
                }
            }
            pivots[j] = j + jp;
            if best == 0.0 {
                return Err(j);
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    let a = self.offset(j, c);
                    let b = self.offset(j + jp, c);
                    self.data.swap(a, b);
                }
            }
            let inv = self.data[col].inv();
            for i in 1..=km {
                self.data[col + i] *= inv;
            }
            if km == 0 {
                continue;
            }
            let (head, tail) = self.data.split_at_mut((j + 1) * ldab);
            let multipliers = &head[col + 1..col + 1 + km];
            for c in j + 1..=ju {
                // Column c starts at tail offset (c - j - 1) * ldab; row j sits at diag + j - c.
                let base = (c - j - 1) * ldab + diag + j - c;
                let a = tail[base];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let dst = &mut tail[base + 1..base + 1 + km];
                for (d, m) in dst.iter_mut().zip(multipliers) {
                    *d -= m * a;
                }
            }
        }
        Ok(BandLu { n, kl, ku, ldab, data: self.data, pivots })
    }
}

/// `P A = L U` factors of a band matrix.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ldab: usize,
    data: Vec<Complex64>,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Overwrites `b` with `A^{-1} b`.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        assert_eq!(b.len(), self.n);
        let (n, kl, ldab) = (self.n, self.kl, self.ldab);
        let diag = kl + self.ku;
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                b.swap(j, p);
            }
            let km = kl.min(n - 1 - j);
            let bj = b[j];
            if km == 0 || bj == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = &self.data[j * ldab + diag + 1..j * ldab + diag + 1 + km];
            for (t, m) in b[j + 1..j + 1 + km].iter_mut().zip(col) {
                *t -= m * bj;
            }
        }
        let ubw = diag;
        for j in (0..n).rev() {
            let colstart = j * ldab;
            b[j] /= self.data[colstart + diag];
            let bj = b[j];
            if bj == Complex64::new(0.0, 0.0) {
                continue;
            }
            let top = j.saturating_sub(ubw);
            // rows top..j of column j live at offsets diag + r - j
            let first = colstart + diag + top - j;
            let col = &self.data[first..colstart + diag];
            for (t, u) in b[top..j].iter_mut().zip(col) {
                *t -= u * bj;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(n: usize, kl: usize, ku: usize, seed: u64) -> (BandMatrix, Vec<Vec<Complex64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = BandMatrix::zeros(n, kl, ku);
        let mut dense = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for r in 0..n {
            for c in r.saturating_sub(kl)..=(r + ku).min(n - 1) {
                // Small diagonal so that pivoting is exercised.
                let scale = if r == c { 0.1 } else { 1.0 };
                let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale;
                m.add(r, c, v);
                dense[r][c] = v;
            }
        }
        (m, dense)
    }

    #[test]
    fn solves_random_band_systems() {
        for &(n, kl, ku) in &[(1, 0, 0), (7, 2, 1), (40, 3, 5), (60, 7, 7)] {
            let (m, dense) = random_band(n, kl, ku, n as u64);
            let lu = m.factor().unwrap();
            let x: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64 * 0.1 - 1.0, (i % 3) as f64)).collect();
            let mut b: Vec<Complex64> = (0..n).map(|r| (0..n).map(|c| dense[r][c] * x[c]).sum()).collect();
            lu.solve_in_place(&mut b);
            for (got, want) in b.iter().zip(&x) {
                assert!((got - want).norm() < 1e-9, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn zero_pivot_detected() {
        let mut m = BandMatrix::zeros(3, 1, 1);
        m.add(0, 0, Complex64::new(1.0, 0.0));
        m.add(2, 2, Complex64::new(1.0, 0.0));
        assert_eq!(m.factor().unwrap_err(), 1);
    }
}
