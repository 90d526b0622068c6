//! Bit-packed matrices and subspaces over `F_2` (`n <= 32`).
//!
//! A matrix acts on row vectors, `x -> x T`, matching the graph convention
//! `V(L) = {(x, xL)}` used throughout the crate. Row `i` of the matrix is
//! the image of the standard basis vector `e_i`, packed into a `u32`.

use super::LinalgError;

/// Square matrix over `F_2` with bit-packed rows.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitMat {
    n: usize,
    rows: Vec<u32>,
}

impl std::fmt::Debug for BitMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMat {}x{} [", self.n, self.n)?;
        for r in &self.rows {
            writeln!(f, "  {:0width$b}", r.reverse_bits() >> (32 - self.n), width = self.n)?;
        }
        write!(f, "]")
    }
}

impl BitMat {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1 && n <= 32);
        BitMat { n, rows: vec![0; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMat::zero(n);
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        m
    }

    pub fn from_rows(n: usize, rows: Vec<u32>) -> Self {
        assert_eq!(rows.len(), n);
        let mask = mask(n);
        assert!(rows.iter().all(|r| r & !mask == 0), "row exceeds dimension");
        BitMat { n, rows }
    }

    /// Row `i` of the matrix = image of `e_i`.
    pub fn from_fn(n: usize, f: impl Fn(u32) -> u32) -> Self {
        BitMat::from_rows(n, (0..n).map(|i| f(1 << i)).collect())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, i: usize) -> u32 {
        self.rows[i]
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// `x -> x T`: xor of the rows selected by the bits of `x`.
    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        let mut acc = 0;
        let mut bits = x;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            acc ^= self.rows[i];
            bits &= bits - 1;
        }
        acc
    }

    pub fn add(&self, other: &BitMat) -> BitMat {
        assert_eq!(self.n, other.n);
        BitMat { n: self.n, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a ^ b).collect() }
    }

    /// Matrix product; `(self * other).apply(x) == other.apply(self.apply(x))`.
    pub fn mul(&self, other: &BitMat) -> BitMat {
        assert_eq!(self.n, other.n);
        BitMat { n: self.n, rows: self.rows.iter().map(|&r| other.apply(r)).collect() }
    }

    pub fn transpose(&self) -> BitMat {
        let mut t = BitMat::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.rows[i] >> j & 1 == 1 {
                    t.rows[j] |= 1 << i;
                }
            }
        }
        t
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        gauss(&mut rows)
    }

    pub fn kernel(&self) -> BitSubspace {
        // Track row combinations alongside elimination: combos whose image
        // reduces to zero form the kernel.
        let n = self.n;
        let mut img: Vec<u32> = self.rows.clone();
        let mut coef: Vec<u32> = (0..n).map(|i| 1u32 << i).collect();
        let mut kernel_rows = Vec::new();
        let mut done = 0;
        for col in 0..n {
            if let Some(r) = (done..n).find(|&r| img[r] >> col & 1 == 1) {
                img.swap(done, r);
                coef.swap(done, r);
                for r2 in 0..n {
                    if r2 != done && img[r2] >> col & 1 == 1 {
                        img[r2] ^= img[done];
                        coef[r2] ^= coef[done];
                    }
                }
                done += 1;
            }
        }
        for r in done..n {
            debug_assert_eq!(img[r], 0);
            kernel_rows.push(coef[r]);
        }
        BitSubspace::from_rows(n, kernel_rows)
    }

    pub fn image(&self) -> BitSubspace {
        BitSubspace::from_rows(self.n, self.rows.clone())
    }

    pub fn inverse(&self) -> Option<BitMat> {
        let n = self.n;
        let mut a = self.rows.clone();
        let mut b = BitMat::identity(n).rows;
        let mut done = 0;
        for col in 0..n {
            let r = (done..n).find(|&r| a[r] >> col & 1 == 1)?;
            a.swap(done, r);
            b.swap(done, r);
            for r2 in 0..n {
                if r2 != done && a[r2] >> col & 1 == 1 {
                    a[r2] ^= a[done];
                    b[r2] ^= b[done];
                }
            }
            done += 1;
        }
        Some(BitMat { n, rows: b })
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.transpose()
    }

    pub fn diagonal(&self) -> u32 {
        let mut d = 0;
        for i in 0..self.n {
            d |= (self.rows[i] >> i & 1) << i;
        }
        d
    }
}

#[inline]
pub(crate) fn mask(n: usize) -> u32 {
    if n == 32 { u32::MAX } else { (1u32 << n) - 1 }
}

/// In-place elimination; returns the rank. Rows end up echelonized but not
/// canonical (use [`BitSubspace`] for the canonical form).
fn gauss(rows: &mut [u32]) -> usize {
    let mut done = 0;
    for col in 0..32 {
        if done == rows.len() {
            break;
        }
        if let Some(r) = (done..rows.len()).find(|&r| rows[r] >> col & 1 == 1) {
            rows.swap(done, r);
            for r2 in 0..rows.len() {
                if r2 != done && rows[r2] >> col & 1 == 1 {
                    rows[r2] ^= rows[done];
                }
            }
            done += 1;
        }
    }
    done
}

/// Subspace of `F_2^ambient` held as a reduced row-echelon basis with
/// ascending pivots, so equal subspaces have identical representations.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSubspace {
    ambient: usize,
    rows: Vec<u32>,
}

impl std::fmt::Debug for BitSubspace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitSubspace(dim {} of {}; rows {:x?})", self.dim(), self.ambient, self.rows)
    }
}

impl BitSubspace {
    pub fn zero(ambient: usize) -> Self {
        BitSubspace { ambient, rows: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        BitSubspace { ambient, rows: (0..ambient).map(|i| 1u32 << i).collect() }
    }

    pub fn from_rows(ambient: usize, mut rows: Vec<u32>) -> Self {
        assert!(ambient <= 32);
        let m = mask(ambient);
        assert!(rows.iter().all(|r| r & !m == 0), "row exceeds ambient dimension");
        let rank = gauss(&mut rows);
        rows.truncate(rank);
        rows.sort_unstable_by_key(|r| r.trailing_zeros());
        BitSubspace { ambient, rows }
    }

    pub fn point(ambient: usize, v: u32) -> Self {
        assert!(v != 0);
        BitSubspace::from_rows(ambient, vec![v])
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    /// Residue of `v` after reduction by the basis; zero iff contained.
    #[inline]
    pub fn reduce(&self, mut v: u32) -> u32 {
        for &r in &self.rows {
            let piv = r & r.wrapping_neg();
            if v & piv != 0 {
                v ^= r;
            }
        }
        v
    }

    #[inline]
    pub fn contains(&self, v: u32) -> bool {
        self.reduce(v) == 0
    }

    pub fn contains_space(&self, other: &BitSubspace) -> bool {
        other.rows.iter().all(|&r| self.contains(r))
    }

    pub fn sum(&self, other: &BitSubspace) -> BitSubspace {
        assert_eq!(self.ambient, other.ambient);
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        BitSubspace::from_rows(self.ambient, rows)
    }

    /// Zassenhaus: eliminate paired rows `[a|a]`, `[b|0]`; left-zero rows
    /// carry intersection vectors on the right.
    pub fn intersect(&self, other: &BitSubspace) -> BitSubspace {
        assert_eq!(self.ambient, other.ambient);
        let w = self.ambient;
        let mut rows: Vec<u64> = self
            .rows
            .iter()
            .map(|&a| (a as u64) << w | a as u64)
            .chain(other.rows.iter().map(|&b| (b as u64) << w))
            .collect();
        // eliminate on the high (left) half first
        let mut done = 0;
        for col in (0..2 * w).rev() {
            if done == rows.len() {
                break;
            }
            if let Some(r) = (done..rows.len()).find(|&r| rows[r] >> col & 1 == 1) {
                rows.swap(done, r);
                for r2 in 0..rows.len() {
                    if r2 != done && rows[r2] >> col & 1 == 1 {
                        rows[r2] ^= rows[done];
                    }
                }
                done += 1;
            }
            if col == w {
                break;
            }
        }
        let inter: Vec<u32> = rows[done..]
            .iter()
            .map(|&r| (r & mask(w) as u64) as u32)
            .filter(|&r| r != 0)
            .collect();
        BitSubspace::from_rows(self.ambient, inter)
    }

    /// All vectors of the subspace (2^dim of them, including zero).
    pub fn vectors(&self) -> impl Iterator<Item = u32> + '_ {
        let d = self.dim();
        (0u32..(1 << d)).map(move |sel| {
            let mut v = 0;
            let mut bits = sel;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                v ^= self.rows[i];
                bits &= bits - 1;
            }
            v
        })
    }

    /// Image of the subspace under a linear map on the ambient space.
    pub fn map(&self, m: &BitMat) -> BitSubspace {
        BitSubspace::from_rows(self.ambient, self.rows.iter().map(|&r| m.apply(r)).collect())
    }

    /// Deterministic complement: standard basis vectors at non-pivot
    /// positions, reduced.
    pub fn complement(&self) -> BitSubspace {
        let pivots: Vec<u32> = self.rows.iter().map(|r| r.trailing_zeros()).collect();
        let rows = (0..self.ambient as u32)
            .filter(|i| !pivots.contains(i))
            .map(|i| 1u32 << i)
            .collect();
        BitSubspace::from_rows(self.ambient, rows)
    }
}

/// Nondegenerate symmetric bilinear form `b(x, y) = x G y^t` on `F_2^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitForm {
    gram: BitMat,
    gram_inv: BitMat,
}

impl BitForm {
    pub fn new(gram: BitMat) -> Result<BitForm, LinalgError> {
        if !gram.is_symmetric() {
            return Err(LinalgError::BadGram);
        }
        let gram_inv = gram.inverse().ok_or(LinalgError::BadGram)?;
        Ok(BitForm { gram, gram_inv })
    }

    /// The dot product (identity Gram).
    pub fn dot(n: usize) -> BitForm {
        let id = BitMat::identity(n);
        BitForm { gram: id.clone(), gram_inv: id }
    }

    pub fn n(&self) -> usize {
        self.gram.n()
    }

    pub fn gram(&self) -> &BitMat {
        &self.gram
    }

    #[inline]
    pub fn eval(&self, x: u32, y: u32) -> u32 {
        (self.gram.apply(x) & y).count_ones() & 1
    }

    /// `T* = G T^t G^{-1}`, the adjoint: `b(xT, y) = b(x, yT*)`.
    pub fn adjoint(&self, t: &BitMat) -> BitMat {
        self.gram.mul(&t.transpose()).mul(&self.gram_inv)
    }

    pub fn is_self_adjoint(&self, t: &BitMat) -> bool {
        // T self-adjoint <=> T G symmetric.
        t.mul(&self.gram).is_symmetric()
    }

    /// Alternating (the paper's "skew-symmetric"): self-adjoint and
    /// `b(x, xT) = 0` for all `x`; in characteristic 2 the basis plus
    /// self-adjointness suffices.
    pub fn is_alternating(&self, t: &BitMat) -> bool {
        let tg = t.mul(&self.gram);
        tg.is_symmetric() && tg.diagonal() == 0
    }

    /// Exhaustive `b(x, xT)` check, kept as an independent route for small n.
    pub fn is_alternating_exhaustive(&self, t: &BitMat) -> bool {
        if !self.is_self_adjoint(t) {
            return false;
        }
        let n = self.n();
        assert!(n <= 12, "exhaustive route is for small dimensions");
        (0u32..1 << n).all(|x| self.eval(x, t.apply(x)) == 0)
    }

    /// Rank-one operator `x -> b(x, a) b`; zero when `a` or `b` is zero.
    pub fn rank_one(&self, a: u32, b: u32) -> BitMat {
        let ga = self.gram.apply(a);
        BitMat::from_fn(self.n(), |x| if (ga & x).count_ones() & 1 == 1 { b } else { 0 })
    }

    /// Basis change `S` with `S G S^t = I`. Exists exactly when the form is
    /// not alternating (true for every Gram this crate builds: invertible
    /// alternating forms only live in even dimension with zero diagonal,
    /// and the trace and dot Grams both have ones on the diagonal).
    ///
    /// Greedy orthonormalization; when the remaining perp space turns
    /// alternating, one previously chosen vector `e` is recombined with a
    /// hyperbolic pair `(u, w)` into the orthonormal triple
    /// `(e+u, e+w, e+u+w)`.
    pub fn orthonormal_basis(&self) -> Result<BitMat, LinalgError> {
        let n = self.n();
        let mut chosen: Vec<u32> = Vec::new();
        let mut rest: Vec<u32> = (0..n).map(|i| 1u32 << i).collect();
        while !rest.is_empty() {
            // independent remainder basis orthogonal to everything chosen
            if let Some(pos) = rest.iter().position(|&v| self.eval(v, v) == 1) {
                let v = rest.remove(pos);
                rest = rest
                    .into_iter()
                    .map(|w| if self.eval(w, v) == 1 { w ^ v } else { w })
                    .collect();
                rest = BitSubspace::from_rows(n, rest).rows().to_vec();
                chosen.push(v);
                continue;
            }
            // alternating remainder: grab a hyperbolic pair and fix up
            let e = chosen.pop().ok_or(LinalgError::BadGram)?;
            let u = rest[0];
            let w_pos = rest.iter().position(|&w| self.eval(u, w) == 1).ok_or(LinalgError::BadGram)?;
            let w = rest[w_pos];
            rest.retain(|&x| x != u && x != w);
            for v in [e ^ u, e ^ w, e ^ u ^ w] {
                rest = rest
                    .into_iter()
                    .map(|x| if self.eval(x, v) == 1 { x ^ v } else { x })
                    .collect();
                chosen.push(v);
            }
            rest = BitSubspace::from_rows(n, rest).rows().to_vec();
        }
        let s = BitMat::from_rows(n, chosen);
        let check = s.mul(&self.gram).mul(&s.transpose());
        if check != BitMat::identity(n) {
            return Err(LinalgError::BadGram);
        }
        Ok(s)
    }

    /// For self-adjoint `T`, the unique rank-<=-1 self-adjoint `R = E_{a,a}`
    /// with `T + R` alternating; returns `(R, a)`. The defining identity is
    /// `b(x, a)^2 = b(x, xT)`, a linear system over a basis in char 2.
    pub fn skew_normalize(&self, t: &BitMat) -> Result<(BitMat, u32), LinalgError> {
        if !self.is_self_adjoint(t) {
            return Err(LinalgError::NotSelfAdjoint);
        }
        let n = self.n();
        // lambda_i = b(e_i, e_i T); solve b(e_i, a) = lambda_i, i.e. (G a^t)_i = lambda_i.
        let mut lambda = 0u32;
        for i in 0..n {
            lambda |= self.eval(1 << i, t.apply(1 << i)) << i;
        }
        // G a^t = lambda, i.e. a = lambda G^{-1} as a row vector.
        let a = self.gram_inv.apply(lambda);
        let r = self.rank_one(a, a);
        debug_assert!(self.is_alternating(&t.add(&r)));
        Ok((r, a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng_mat(n: usize, state: &mut u64) -> BitMat {
        BitMat::from_rows(
            n,
            (0..n)
                .map(|_| {
                    *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (*state >> 33) as u32 & mask(n)
                })
                .collect(),
        )
    }

    #[test]
    fn rank_kernel_image() {
        assert_eq!(BitMat::zero(5).rank(), 0);
        assert_eq!(BitMat::zero(5).kernel().dim(), 5);
        assert_eq!(BitMat::identity(5).rank(), 5);
        let mut s = 42;
        for _ in 0..50 {
            let m = rng_mat(6, &mut s);
            assert_eq!(m.rank() + m.kernel().dim(), 6);
            assert_eq!(m.image().dim(), m.rank());
            for v in m.kernel().vectors() {
                assert_eq!(m.apply(v), 0);
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let mut s = 7;
        let mut found = 0;
        while found < 20 {
            let m = rng_mat(5, &mut s);
            if let Some(inv) = m.inverse() {
                assert_eq!(m.mul(&inv), BitMat::identity(5));
                assert_eq!(inv.mul(&m), BitMat::identity(5));
                found += 1;
            }
        }
    }

    #[test]
    fn subspace_dim_formula() {
        let mut s = 99;
        for _ in 0..100 {
            let a = BitSubspace::from_rows(8, (0..3).map(|_| rng_mat(8, &mut s).row(0)).collect());
            let b = BitSubspace::from_rows(8, (0..4).map(|_| rng_mat(8, &mut s).row(0)).collect());
            let i = a.intersect(&b);
            let u = a.sum(&b);
            assert_eq!(i.dim() + u.dim(), a.dim() + b.dim());
            assert!(a.contains_space(&i));
            assert!(b.contains_space(&i));
            for v in i.vectors() {
                assert!(a.contains(v) && b.contains(v));
            }
        }
        let a = BitSubspace::from_rows(4, vec![0b0011, 0b0110]);
        assert_eq!(a.intersect(&a), a);
        assert_eq!(a.intersect(&BitSubspace::zero(4)).dim(), 0);
    }

    #[test]
    fn canonical_representation() {
        let a = BitSubspace::from_rows(4, vec![0b1010, 0b0110]);
        let b = BitSubspace::from_rows(4, vec![0b1100, 0b1010]);
        assert_eq!(a, b);
    }

    #[test]
    fn adjoint_involution_and_antiautomorphism() {
        // an ad-hoc symmetric invertible gram that is not the identity
        let gram = BitMat::from_rows(5, vec![0b00001, 0b00100, 0b00010, 0b10000, 0b01000]);
        let form = BitForm::new(gram).unwrap();
        let mut s = 5;
        for _ in 0..50 {
            let t = rng_mat(5, &mut s);
            let u = rng_mat(5, &mut s);
            assert_eq!(form.adjoint(&form.adjoint(&t)), t);
            assert_eq!(form.adjoint(&t.mul(&u)), form.adjoint(&u).mul(&form.adjoint(&t)));
            for x in 0..32u32 {
                for y in 0..32u32 {
                    assert_eq!(form.eval(t.apply(x), y), form.eval(x, form.adjoint(&t).apply(y)));
                }
            }
        }
    }

    #[test]
    fn rank_one_properties() {
        let form = BitForm::dot(5);
        assert!(form.rank_one(0, 0b101).is_zero());
        let e = form.rank_one(0b011, 0b110);
        assert_eq!(e.rank(), 1);
        assert_eq!(e.image(), BitSubspace::point(5, 0b110));
        // adjoint(E_{a,b}) = E_{b,a}
        assert_eq!(form.adjoint(&e), form.rank_one(0b110, 0b011));
        // kernel = <a>^perp (dot product: vectors with even overlap with a)
        for v in e.kernel().vectors() {
            assert_eq!((v & 0b011).count_ones() & 1, 0);
        }
    }

    #[test]
    fn every_rank_one_is_some_e_ab() {
        // enumerate every matrix at n = 3 and n = 4 over the dot gram
        for n in [3usize, 4] {
            let form = BitForm::dot(n);
            let mut eabs = std::collections::HashSet::new();
            for a in 1u32..(1 << n) {
                for b in 1u32..(1 << n) {
                    eabs.insert(form.rank_one(a, b));
                }
            }
            let mut count = 0u32;
            let msk = mask(n);
            for code in 0u32..(1 << (n * n)) {
                let m = BitMat::from_rows(n, (0..n).map(|i| code >> (n * i) & msk).collect());
                if m.rank() == 1 {
                    assert!(eabs.contains(&m));
                    count += 1;
                }
            }
            assert_eq!(count, ((1 << n) - 1) * ((1 << n) - 1));
        }
    }

    #[test]
    fn skew_normalize_is_additive() {
        // with T + E_{a,a} and S + E_{b,b} alternating, T + S + E_{a+b,a+b}
        // is alternating too
        let form = BitForm::dot(5);
        let mut st = 0xfeed;
        for _ in 0..2000 {
            let mk = |st: &mut u64| {
                let mut rows = vec![0u32; 5];
                for i in 0..5 {
                    for j in 0..=i {
                        *st = st.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        if *st >> 40 & 1 == 1 {
                            rows[i] |= 1 << j;
                            rows[j] |= 1 << i;
                        }
                    }
                }
                BitMat::from_rows(5, rows)
            };
            let t = mk(&mut st);
            let s = mk(&mut st);
            let (_, a) = form.skew_normalize(&t).unwrap();
            let (_, b) = form.skew_normalize(&s).unwrap();
            let sum = t.add(&s);
            let (_, c) = form.skew_normalize(&sum).unwrap();
            assert_eq!(c, a ^ b);
            assert!(form.is_alternating(&sum.add(&form.rank_one(a ^ b, a ^ b))));
        }
    }

    #[test]
    fn alternating_matches_zero_diagonal_symmetric() {
        // With the dot gram: self-adjoint <=> symmetric, alternating <=> symmetric with zero diagonal.
        let form = BitForm::dot(4);
        let mut s = 11;
        for _ in 0..100 {
            let t = rng_mat(4, &mut s);
            assert_eq!(form.is_self_adjoint(&t), t.is_symmetric());
            assert_eq!(form.is_alternating(&t), t.is_symmetric() && t.diagonal() == 0);
            if form.is_self_adjoint(&t) {
                assert_eq!(form.is_alternating(&t), form.is_alternating_exhaustive(&t));
            }
        }
    }

    #[test]
    fn skew_normalize_basics() {
        let form = BitForm::dot(5);
        // alternating input -> R = 0
        let mut alt = BitMat::zero(5);
        for (i, j) in [(0usize, 1usize), (2, 4)] {
            let mut rows = alt.rows().to_vec();
            rows[i] |= 1 << j;
            rows[j] |= 1 << i;
            alt = BitMat::from_rows(5, rows);
        }
        let (r, a) = form.skew_normalize(&alt).unwrap();
        assert!(r.is_zero());
        assert_eq!(a, 0);
        // E_{a,a} -> R = E_{a,a}
        let e = form.rank_one(0b10110, 0b10110);
        let (r, a) = form.skew_normalize(&e).unwrap();
        assert_eq!(a, 0b10110);
        assert!(e.add(&r).is_zero());
        // non-self-adjoint input is rejected
        let ns = BitMat::from_rows(5, vec![0b10, 0, 0, 0, 0]);
        assert!(form.skew_normalize(&ns).is_err());
    }
}
