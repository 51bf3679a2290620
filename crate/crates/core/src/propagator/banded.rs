use num_complex::Complex64 as C64;

/// Square complex band matrix with equal lower and upper half-bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    half: usize,
    data: Vec<C64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, half: usize) -> Self {
        Self {
            n,
            half,
            data: vec![C64::new(0.0, 0.0); n * (2 * half + 1)],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i.abs_diff(j) <= self.half);
        i * (2 * self.half + 1) + (j + self.half - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        if i.abs_diff(j) > self.half {
            C64::new(0.0, 0.0)
        } else {
            self.data[self.idx(i, j)]
        }
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    /// Row range of nonzero columns.
    #[inline]
    fn cols(&self, i: usize) -> std::ops::Range<usize> {
        i.saturating_sub(self.half)..(i + self.half + 1).min(self.n)
    }

    pub fn matvec(&self, x: &[C64], out: &mut [C64]) {
        for (i, o) in out.iter_mut().enumerate().take(self.n) {
            let mut acc = C64::new(0.0, 0.0);
            for j in self.cols(i) {
                acc += self.data[self.idx(i, j)] * x[j];
            }
            *o = acc;
        }
    }

    /// In-place LU factorization without pivoting. Valid for matrices whose
    /// leading principal minors never vanish, such as `1 + i H` with `H`
    /// hermitian.
    pub fn factorize(mut self) -> Option<BandLu> {
        for k in 0..self.n {
            let pivot = self.data[self.idx(k, k)];
            if pivot.norm() == 0.0 || !pivot.is_finite() {
                return None;
            }
            let last = (k + self.half).min(self.n - 1);
            for i in k + 1..=last {
                let ik = self.idx(i, k);
                let l = self.data[ik] / pivot;
                self.data[ik] = l;
                for j in k + 1..=last {
                    let kj = self.data[self.idx(k, j)];
                    let ij = self.idx(i, j);
                    self.data[ij] -= l * kj;
                }
            }
        }
        Some(BandLu { m: self })
    }
}

/// Packed `L U` factors of a band matrix.
#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
}

impl BandLu {
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let m = &self.m;
        for i in 0..m.n {
            let mut acc = b[i];
            for j in i.saturating_sub(m.half)..i {
                acc -= m.data[m.idx(i, j)] * b[j];
            }
            b[i] = acc;
        }
        for i in (0..m.n).rev() {
            let mut acc = b[i];
            for j in i + 1..(i + m.half + 1).min(m.n) {
                acc -= m.data[m.idx(i, j)] * b[j];
            }
            b[i] = acc / m.data[m.idx(i, i)];
        }
    }
}
