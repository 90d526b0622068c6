//! Symplectic and quadratic ambient spaces.
//!
//! The standard spaces are `V = U + U` with pairing
//! `((x,y),(x',y')) = b(x,y') + b(y,x')` and quadratic form `Q((x,y)) = b(x,y)`,
//! and the extended space with coordinates `(alpha, x, beta, y)` and
//! `Q = alpha*beta + b(x,y)`; the latter is just `U' + U'` for
//! `U' = F_q + U` with the Gram `1 (+) G`, so one constructor serves both.
//!
//! Quotients by a point `P = <w>` use canonical transversals: an RREF basis
//! of `w^perp` with the row carrying `w`'s pivot removed, so the same input
//! always produces the same coordinates.

use crate::field::{Elt, FieldCtx};
use crate::linalg::{vdecode, BitForm, BitMat, BitSubspace, FForm, FMat, FSubspace};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormsError {
    #[error("vector is not in the perp of the quotient point")]
    NotInPerp,
    #[error("quotient point must be {0}")]
    WrongSingularity(&'static str),
    #[error("point must be nonzero")]
    ZeroPoint,
}

// ---------------------------------------------------------------------------
// Bit-packed quadratic spaces (q = 2)

/// Quadratic space over `F_2`: `Q(v)` from an upper-triangular bit matrix,
/// pairing = polarization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadBit {
    dim: usize,
    /// Row `i` holds the coefficients of the `Q`-monomials `v_i v_j`, `j >= i`.
    qrows: Vec<u32>,
    /// Polarized pairing matrix (symmetric, zero diagonal).
    prows: Vec<u32>,
}

impl QuadBit {
    /// `U + U` with `Q((x,y)) = b(x,y)`; `dim = 2n`.
    pub fn uu(form: &BitForm) -> QuadBit {
        let n = form.n();
        let dim = 2 * n;
        let mut qrows = vec![0u32; dim];
        for i in 0..n {
            qrows[i] = form.gram().row(i) << n;
        }
        let mut prows = vec![0u32; dim];
        for i in 0..n {
            prows[i] = form.gram().row(i) << n;
            prows[n + i] = form.gram().row(i);
        }
        QuadBit { dim, qrows, prows }
    }

    /// Extended space `(F_q + U) + (F_q + U)` with `Q = alpha beta + b(x,y)`,
    /// coordinates ordered `(alpha, x, beta, y)`.
    pub fn extended(form: &BitForm) -> QuadBit {
        QuadBit::uu(&ext_form(form))
    }

    /// Rebuilds a space from stored matrices, checking that the pairing is
    /// the polarization of `Q`.
    pub fn from_raw(dim: usize, qrows: Vec<u32>, prows: Vec<u32>) -> Option<QuadBit> {
        if qrows.len() != dim || prows.len() != dim {
            return None;
        }
        let space = QuadBit { dim, qrows, prows };
        for i in 0..dim {
            for j in 0..dim {
                let u = 1u32 << i;
                let v = 1u32 << j;
                if space.q_value(u ^ v) ^ space.q_value(u) ^ space.q_value(v) != space.pairing(u, v) {
                    return None;
                }
            }
        }
        Some(space)
    }

    pub fn raw(&self) -> (&[u32], &[u32]) {
        (&self.qrows, &self.prows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn q_value(&self, v: u32) -> u32 {
        let mut acc = 0;
        let mut bits = v;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            acc ^= (self.qrows[i] & v).count_ones() & 1;
            bits &= bits - 1;
        }
        acc
    }

    #[inline]
    pub fn pairing(&self, u: u32, v: u32) -> u32 {
        (self.apply_pairing(u) & v).count_ones() & 1
    }

    pub fn is_singular(&self, v: u32) -> bool {
        self.q_value(v) == 0
    }

    /// In char 2 it suffices that `Q` kills a basis and the pairing kills
    /// all basis pairs.
    pub fn is_totally_singular(&self, s: &BitSubspace) -> bool {
        let rows = s.rows();
        rows.iter().all(|&r| self.q_value(r) == 0)
            && rows.iter().enumerate().all(|(i, &r)| rows[..i].iter().all(|&r2| self.pairing(r, r2) == 0))
    }

    pub fn is_totally_isotropic(&self, s: &BitSubspace) -> bool {
        let rows = s.rows();
        rows.iter().enumerate().all(|(i, &r)| rows[..i].iter().all(|&r2| self.pairing(r, r2) == 0))
    }

    pub fn perp(&self, s: &BitSubspace) -> BitSubspace {
        // v in perp <=> dot(v, rP) = 0 for each basis row r.
        let constraints: Vec<u32> = s.rows().iter().map(|&r| self.apply_pairing(r)).collect();
        let m = BitMat::from_fn(self.dim, |e| {
            let mut out = 0u32;
            for (j, &c) in constraints.iter().enumerate() {
                out |= ((e & c).count_ones() & 1) << j;
            }
            out
        });
        m.kernel()
    }

    pub fn perp_point(&self, w: u32) -> BitSubspace {
        self.perp(&BitSubspace::point(self.dim, w))
    }

    #[inline]
    fn apply_pairing(&self, v: u32) -> u32 {
        let mut acc = 0;
        let mut bits = v;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            acc ^= self.prows[i];
            bits &= bits - 1;
        }
        acc
    }

    /// All singular vectors including zero (streaming; `dim <= 24`).
    pub fn singular_vectors(&self) -> impl Iterator<Item = u32> + '_ {
        assert!(self.dim <= 24, "singular enumeration is desk-scale only");
        (0u32..1 << self.dim).filter(move |&v| self.q_value(v) == 0)
    }

    /// `q^(2m-1) + q^m - q^(m-1)` vectors (with zero) on `V+(2m, q)`.
    pub fn plus_type_singular_count(dim: usize, q: u64) -> u64 {
        assert!(dim % 2 == 0);
        let m = (dim / 2) as u32;
        q.pow(2 * m - 1) + q.pow(m) - q.pow(m - 1)
    }

    /// Hyperbolic 2-space test: `N` nonsingular, `P` singular, and `<N,P>`
    /// contains a second singular point.
    pub fn is_hyperbolic_pair(&self, n_pt: u32, p_pt: u32) -> Result<bool, FormsError> {
        if n_pt == 0 || p_pt == 0 {
            return Err(FormsError::ZeroPoint);
        }
        if self.is_singular(n_pt) {
            return Err(FormsError::WrongSingularity("nonsingular"));
        }
        if !self.is_singular(p_pt) {
            return Err(FormsError::WrongSingularity("singular"));
        }
        // The only other point of the 2-space is N + P.
        Ok(self.is_singular(n_pt ^ p_pt))
    }

    /// Quotient by a singular point: `P^perp / P` with the induced quadratic
    /// form, a `V+(dim-2, 2)`.
    pub fn quotient_singular(&self, w: u32) -> Result<(QuadBit, QuotientBit), FormsError> {
        if w == 0 {
            return Err(FormsError::ZeroPoint);
        }
        if !self.is_singular(w) {
            return Err(FormsError::WrongSingularity("singular"));
        }
        let quot = QuotientBit::new(self, w);
        let dim = quot.dim;
        let mut qrows = vec![0u32; dim];
        let mut prows = vec![0u32; dim];
        for i in 0..dim {
            let ri = quot.rows[i];
            qrows[i] |= self.q_value(ri) << i;
            for j in 0..dim {
                if j > i {
                    qrows[i] |= self.pairing(ri, quot.rows[j]) << j;
                }
                if j != i {
                    prows[i] |= self.pairing(ri, quot.rows[j]) << j;
                }
            }
        }
        Ok((QuadBit { dim, qrows, prows }, quot))
    }

    /// Quotient by a nonsingular point: `N^perp / N` keeps only the
    /// symplectic pairing (`Q` is not constant on cosets of `N`).
    pub fn quotient_nonsingular(&self, w: u32) -> Result<(SympBit, QuotientBit), FormsError> {
        if w == 0 {
            return Err(FormsError::ZeroPoint);
        }
        if self.is_singular(w) {
            return Err(FormsError::WrongSingularity("nonsingular"));
        }
        let quot = QuotientBit::new(self, w);
        let dim = quot.dim;
        let mut prows = vec![0u32; dim];
        for i in 0..dim {
            for j in 0..dim {
                if j != i {
                    prows[i] |= self.pairing(quot.rows[i], quot.rows[j]) << j;
                }
            }
        }
        Ok((SympBit { dim, prows }, quot))
    }
}

/// Symplectic space over `F_2` (pairing only).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SympBit {
    dim: usize,
    prows: Vec<u32>,
}

impl SympBit {
    pub fn uu(form: &BitForm) -> SympBit {
        let q = QuadBit::uu(form);
        SympBit { dim: q.dim, prows: q.prows }
    }

    pub fn from_raw(dim: usize, prows: Vec<u32>) -> Option<SympBit> {
        if prows.len() != dim {
            return None;
        }
        let s = SympBit { dim, prows };
        for i in 0..dim {
            if s.pairing(1 << i, 1 << i) != 0 {
                return None;
            }
            for j in 0..i {
                if s.pairing(1 << i, 1 << j) != s.pairing(1 << j, 1 << i) {
                    return None;
                }
            }
        }
        Some(s)
    }

    pub fn raw(&self) -> &[u32] {
        &self.prows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn pairing(&self, u: u32, v: u32) -> u32 {
        let mut acc = 0;
        let mut bits = u;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            acc ^= (self.prows[i] & v).count_ones() & 1;
            bits &= bits - 1;
        }
        acc
    }

    pub fn is_totally_isotropic(&self, s: &BitSubspace) -> bool {
        let rows = s.rows();
        rows.iter().enumerate().all(|(i, &r)| rows[..i].iter().all(|&r2| self.pairing(r, r2) == 0))
    }
}

/// The Gram `1 (+) G` of the extended space `F_q + U`.
pub fn ext_form(form: &BitForm) -> BitForm {
    let n = form.n();
    let mut rows = vec![1u32];
    rows.extend(form.gram().rows().iter().map(|&r| r << 1));
    BitForm::new(BitMat::from_rows(n + 1, rows)).expect("1 (+) G stays symmetric invertible")
}

/// Canonical transversal data for `w^perp / <w>` (valid for singular and
/// nonsingular `w`, since the pairing is alternating in char 2).
#[derive(Clone, Debug)]
pub struct QuotientBit {
    pub ambient_dim: usize,
    pub w: u32,
    pub dim: usize,
    /// Transversal basis rows inside `w^perp`.
    rows: Vec<u32>,
    /// Pivot position of each transversal row.
    pivots: Vec<u32>,
    /// Pivot coordinates of `w` over the transversal rows.
    w_coefs: Vec<u32>,
    w_pivot_row: usize,
}

impl QuotientBit {
    fn new(space: &QuadBit, w: u32) -> QuotientBit {
        let perp = space.perp_point(w);
        debug_assert!(perp.contains(w), "alternating pairing puts w inside w^perp");
        let all_rows: Vec<u32> = perp.rows().to_vec();
        let coefs: Vec<u32> = all_rows.iter().map(|r| (w >> r.trailing_zeros()) & 1).collect();
        let j = coefs.iter().position(|&c| c == 1).expect("w is a combination of the basis");
        let rows: Vec<u32> = all_rows.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, &r)| r).collect();
        let pivots = rows.iter().map(|r| r.trailing_zeros()).collect();
        let w_coefs = all_rows.iter().enumerate().filter(|&(i, _)| i != j).map(|(i, _)| coefs[i]).collect();
        QuotientBit {
            ambient_dim: space.dim,
            w,
            dim: rows.len(),
            rows,
            pivots,
            w_coefs,
            w_pivot_row: all_rows[j].trailing_zeros() as usize,
        }
    }

    /// Image of `v` (which must lie in `w^perp`) in quotient coordinates.
    pub fn push_vec(&self, v: u32) -> Result<u32, FormsError> {
        // Coefficients over the RREF basis of w^perp read off the pivots;
        // the row carrying w's pivot folds back through w's expression.
        let beta_j = (v >> self.w_pivot_row) & 1;
        let mut out = 0u32;
        let mut check = if beta_j == 1 { self.w } else { 0 };
        for i in 0..self.dim {
            let b = ((v >> self.pivots[i]) & 1) ^ (beta_j & self.w_coefs[i]);
            out |= b << i;
            if b == 1 {
                check ^= self.rows[i];
            }
        }
        if check != v {
            return Err(FormsError::NotInPerp);
        }
        Ok(out)
    }

    /// `<S n w^perp, w> / w` as a subspace of the quotient.
    pub fn push_space(&self, space: &QuadBit, s: &BitSubspace) -> BitSubspace {
        let perp = space.perp_point(self.w);
        let inner = s.intersect(&perp);
        let rows: Vec<u32> = inner.rows().iter().map(|&r| self.push_vec(r).expect("rows lie in w^perp")).collect();
        BitSubspace::from_rows(self.dim, rows)
    }

    /// Transversal representative of a quotient vector.
    pub fn lift_vec(&self, vq: u32) -> u32 {
        let mut out = 0;
        let mut bits = vq;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            out ^= self.rows[i];
            bits &= bits - 1;
        }
        out
    }

    /// Induced quotient matrix of an ambient map that fixes `<w>` and
    /// preserves `w^perp`.
    pub fn push_map(&self, m: &BitMat) -> Result<BitMat, FormsError> {
        let rows: Result<Vec<u32>, FormsError> = (0..self.dim).map(|i| self.push_vec(m.apply(self.rows[i]))).collect();
        Ok(BitMat::from_rows(self.dim, rows?))
    }
}

// ---------------------------------------------------------------------------
// Generic quadratic spaces (char-2 fields with q > 2)

/// Quadratic space over a char-2 context with `q > 2`.
#[derive(Clone, Debug)]
pub struct QuadGen {
    dim: usize,
    /// Upper-triangular coefficient matrix of Q.
    qmat: FMat,
    /// Polarized pairing.
    pmat: FMat,
}

impl QuadGen {
    pub fn uu(ctx: &FieldCtx, form: &FForm) -> QuadGen {
        assert_eq!(ctx.p(), 2, "generic quadratic spaces are used in char 2 only");
        let n = form.n();
        let dim = 2 * n;
        let qmat = FMat::from_fn(dim, |i, j| if i < n && j >= n { form.gram().at(i, j - n) } else { 0 });
        let pmat = FMat::from_fn(dim, |i, j| match (i < n, j < n) {
            (true, false) => form.gram().at(i, j - n),
            (false, true) => form.gram().at(j, i - n),
            _ => 0,
        });
        QuadGen { dim, qmat, pmat }
    }

    pub fn extended(ctx: &FieldCtx, form: &FForm) -> QuadGen {
        let n = form.n();
        let big = FMat::from_fn(n + 1, |i, j| match (i, j) {
            (0, 0) => 1,
            (0, _) | (_, 0) => 0,
            _ => form.gram().at(i - 1, j - 1),
        });
        QuadGen::uu(ctx, &FForm::new(ctx, big).expect("1 (+) G stays symmetric invertible"))
    }

    pub fn raw(&self) -> (&FMat, &FMat) {
        (&self.qmat, &self.pmat)
    }

    pub fn from_raw(ctx: &FieldCtx, qmat: FMat, pmat: FMat) -> Option<QuadGen> {
        let dim = qmat.n();
        if pmat.n() != dim {
            return None;
        }
        let space = QuadGen { dim, qmat, pmat };
        let basis = |i: usize| {
            let mut v = vec![0; dim];
            v[i] = 1;
            v
        };
        for i in 0..dim {
            for j in 0..dim {
                let (u, v) = (basis(i), basis(j));
                let sum: Vec<Elt> = u.iter().zip(&v).map(|(&a, &b)| ctx.add(a, b)).collect();
                let pol = ctx.add(
                    ctx.add(space.q_value(ctx, &sum), space.q_value(ctx, &u)),
                    space.q_value(ctx, &v),
                );
                if pol != space.pairing(ctx, &u, &v) {
                    return None;
                }
            }
        }
        Some(space)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q_value(&self, ctx: &FieldCtx, v: &[Elt]) -> Elt {
        let mut acc = 0;
        for i in 0..self.dim {
            if v[i] == 0 {
                continue;
            }
            for j in i..self.dim {
                let c = self.qmat.at(i, j);
                if c != 0 && v[j] != 0 {
                    acc = ctx.add(acc, ctx.mul(c, ctx.mul(v[i], v[j])));
                }
            }
        }
        acc
    }

    pub fn pairing(&self, ctx: &FieldCtx, u: &[Elt], v: &[Elt]) -> Elt {
        let pu = self.pmat.apply(ctx, u);
        pu.iter().zip(v).fold(0, |acc, (&a, &b)| ctx.add(acc, ctx.mul(a, b)))
    }

    pub fn is_totally_singular(&self, ctx: &FieldCtx, s: &FSubspace) -> bool {
        let rows = s.rows();
        rows.iter().all(|r| self.q_value(ctx, r) == 0)
            && rows.iter().enumerate().all(|(i, r)| rows[..i].iter().all(|r2| self.pairing(ctx, r, r2) == 0))
    }

    pub fn perp_point(&self, ctx: &FieldCtx, w: &[Elt]) -> FSubspace {
        let pw = self.pmat.apply(ctx, w);
        // kernel of v -> <v, pw>
        let m = FMat::from_fn(self.dim, |i, j| if j == 0 { pw[i] } else { 0 });
        m.kernel(ctx)
    }

    pub fn singular_vcodes<'a>(&'a self, ctx: &'a FieldCtx) -> impl Iterator<Item = u64> + 'a {
        let q = ctx.order();
        let total = q.pow(self.dim as u32);
        (0..total).filter(move |&code| {
            let v = vdecode(code, q, self.dim);
            self.q_value(ctx, &v) == 0
        })
    }

    /// Quotient by a singular point; returns the smaller quadratic space and
    /// the transversal data.
    pub fn quotient_singular(&self, ctx: &FieldCtx, w: &[Elt]) -> Result<(QuadGen, QuotientGen), FormsError> {
        if w.iter().all(|&x| x == 0) {
            return Err(FormsError::ZeroPoint);
        }
        if self.q_value(ctx, w) != 0 {
            return Err(FormsError::WrongSingularity("singular"));
        }
        let quot = QuotientGen::new(self, ctx, w);
        let dim = quot.rows.len();
        let qmat = FMat::from_fn(dim, |i, j| {
            if i == j {
                self.q_value(ctx, &quot.rows[i])
            } else if j > i {
                self.pairing(ctx, &quot.rows[i], &quot.rows[j])
            } else {
                0
            }
        });
        let pmat = FMat::from_fn(dim, |i, j| if i == j { 0 } else { self.pairing(ctx, &quot.rows[i], &quot.rows[j]) });
        Ok((QuadGen { dim, qmat, pmat }, quot))
    }
}

/// Canonical transversal of `w^perp / <w>` over a generic context.
#[derive(Clone, Debug)]
pub struct QuotientGen {
    pub w: Vec<Elt>,
    rows: Vec<Vec<Elt>>,
    perp: FSubspace,
}

impl QuotientGen {
    fn new(space: &QuadGen, ctx: &FieldCtx, w: &[Elt]) -> QuotientGen {
        let perp = space.perp_point(ctx, w);
        let all: Vec<Vec<Elt>> = perp.rows().to_vec();
        // read w's coefficients over the RREF basis off the pivots
        let coefs: Vec<Elt> = all
            .iter()
            .map(|r| {
                let piv = r.iter().position(|&x| x != 0).unwrap();
                w[piv]
            })
            .collect();
        let j = coefs.iter().position(|&c| c != 0).expect("w lies in its own perp");
        let rows = all.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, r)| r.clone()).collect();
        QuotientGen { w: w.to_vec(), rows, perp }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn push_vec(&self, ctx: &FieldCtx, v: &[Elt]) -> Result<Vec<Elt>, FormsError> {
        if !self.perp.contains(ctx, v) {
            return Err(FormsError::NotInPerp);
        }
        // Reduce v against the transversal rows; the remainder is then a
        // multiple of w and vanishes in the quotient.
        let mut out = vec![0; self.rows.len()];
        let mut rem = v.to_vec();
        for (i, r) in self.rows.iter().enumerate() {
            let piv = r.iter().position(|&x| x != 0).unwrap();
            let c = rem[piv];
            if c != 0 {
                out[i] = c;
                for k in 0..rem.len() {
                    rem[k] = ctx.sub(rem[k], ctx.mul(c, r[k]));
                }
            }
        }
        Ok(out)
    }

    pub fn push_space(&self, ctx: &FieldCtx, space: &QuadGen, s: &FSubspace) -> FSubspace {
        let perp = space.perp_point(ctx, &self.w);
        let inner = s.intersect(ctx, &perp);
        let rows: Vec<Vec<Elt>> = inner.rows().iter().map(|r| self.push_vec(ctx, r).expect("rows lie in w^perp")).collect();
        FSubspace::from_rows(ctx, self.rows.len(), rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::BitForm;

    #[test]
    fn uu_space_basics() {
        let form = BitForm::dot(3);
        let space = QuadBit::uu(&form);
        assert_eq!(space.dim(), 6);
        // Q((x,0)) = Q((0,y)) = 0
        for x in 0..8u32 {
            assert_eq!(space.q_value(x), 0);
            assert_eq!(space.q_value(x << 3), 0);
        }
        // polarization: Q(u+v) + Q(u) + Q(v) = (u,v)
        for u in 0..64u32 {
            for v in 0..64u32 {
                assert_eq!(space.q_value(u ^ v) ^ space.q_value(u) ^ space.q_value(v), space.pairing(u, v));
            }
        }
    }

    #[test]
    fn singular_counts() {
        for n in [1usize, 2, 3] {
            let space = QuadBit::uu(&BitForm::dot(n));
            let count = space.singular_vectors().count() as u64;
            assert_eq!(count, QuadBit::plus_type_singular_count(2 * n, 2));
        }
        // extended space V+(8,2) built on U = F_2^3
        let space = QuadBit::extended(&BitForm::dot(3));
        assert_eq!(space.singular_vectors().count() as u64, QuadBit::plus_type_singular_count(8, 2));
    }

    #[test]
    fn perp_properties() {
        let space = QuadBit::uu(&BitForm::dot(3));
        let full = BitSubspace::full(6);
        assert_eq!(space.perp(&full).dim(), 0);
        // U + 0 is maximal totally singular, hence self-perp
        let u0 = BitSubspace::from_rows(6, vec![1, 2, 4]);
        assert!(space.is_totally_singular(&u0));
        assert_eq!(space.perp(&u0), u0);
        // perp of a point is a hyperplane
        let p = space.singular_vectors().find(|&v| v != 0).unwrap();
        assert_eq!(space.perp_point(p).dim(), 5);
        // (S^perp)^perp = S
        let s = BitSubspace::from_rows(6, vec![0b000011, 0b101000]);
        assert_eq!(space.perp(&space.perp(&s)), s);
    }

    #[test]
    fn hyperbolic_pairs() {
        // N = <(e1,e1)>, P = <(0,e1)>: second singular point (e1,0)
        let space = QuadBit::uu(&BitForm::dot(3));
        let n_pt = 1 | 1 << 3;
        let p_pt = 1 << 3;
        assert!(space.is_hyperbolic_pair(n_pt, p_pt).unwrap());
        assert!(space.is_hyperbolic_pair(p_pt, n_pt).is_err());
        // exhaustive cross-check against the 2-space definition
        for npt in 1..64u32 {
            if space.is_singular(npt) {
                continue;
            }
            for ppt in 1..64u32 {
                if !space.is_singular(ppt) || ppt == npt {
                    continue;
                }
                let second_singular = space.is_singular(npt ^ ppt);
                assert_eq!(space.is_hyperbolic_pair(npt, ppt).unwrap(), second_singular);
            }
        }
    }

    #[test]
    fn quotient_singular_dimension_and_type() {
        // V+(12,2) -> V+(10,2)
        let space = QuadBit::extended(&BitForm::dot(5));
        assert_eq!(space.dim(), 12);
        let p = space.singular_vectors().find(|&v| v != 0).unwrap();
        let (small, quot) = space.quotient_singular(p).unwrap();
        assert_eq!(small.dim(), 10);
        assert_eq!(quot.dim, 10);
        // Witt-type check by singular count
        assert_eq!(small.singular_vectors().count() as u64, QuadBit::plus_type_singular_count(10, 2));
        // polarization survives the quotient
        for u in [3u32, 17, 1020, 555] {
            for v in [9u32, 801, 333] {
                assert_eq!(small.q_value(u ^ v) ^ small.q_value(u) ^ small.q_value(v), small.pairing(u, v));
            }
        }
    }

    #[test]
    fn pushforward_dimensions() {
        let space = QuadBit::uu(&BitForm::dot(4));
        let p = space.singular_vectors().find(|&v| v != 0).unwrap();
        let (_, quot) = space.quotient_singular(p).unwrap();
        // the point itself dies in the quotient
        let through = BitSubspace::from_rows(8, vec![p]);
        assert_eq!(quot.push_space(&space, &through).dim(), 0);
        // push and lift round-trip on quotient vectors
        for vq in 0..(1u32 << quot.dim) {
            assert_eq!(quot.push_vec(quot.lift_vec(vq)).unwrap(), vq);
        }
    }

    #[test]
    fn quotient_nonsingular_is_symplectic() {
        let space = QuadBit::extended(&BitForm::dot(3));
        let n0 = 1 | 1 << 4; // (1, 0, 1, 0)
        assert!(!space.is_singular(n0));
        let (symp, quot) = space.quotient_nonsingular(n0).unwrap();
        assert_eq!(symp.dim(), 6);
        assert_eq!(quot.dim, 6);
        // the pairing is alternating and nondegenerate
        for v in 0..64u32 {
            assert_eq!(symp.pairing(v, v), 0);
        }
        for v in 1..64u32 {
            assert!((0..64u32).any(|u| symp.pairing(v, u) == 1), "degenerate at {v}");
        }
    }

    #[test]
    fn generic_quad_f4() {
        let f4 = FieldCtx::new(2, 2, None).unwrap();
        let space = QuadGen::uu(&f4, &FForm::dot(2));
        assert_eq!(space.dim(), 4);
        // polarization identity over F_4
        for a in 0..256u64 {
            let u = vdecode(a & 0xf, 4, 4);
            let v = vdecode(a >> 4, 4, 4);
            let sum: Vec<_> = u.iter().zip(&v).map(|(&x, &y)| f4.add(x, y)).collect();
            let lhs = f4.add(f4.add(space.q_value(&f4, &sum), space.q_value(&f4, &u)), space.q_value(&f4, &v));
            assert_eq!(lhs, space.pairing(&f4, &u, &v));
        }
        // singular count matches the plus-type formula
        assert_eq!(space.singular_vcodes(&f4).count() as u64, QuadBit::plus_type_singular_count(4, 4));
    }
}
