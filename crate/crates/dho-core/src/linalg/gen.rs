//! Dense matrices and subspaces over an arbitrary small field context.
//!
//! This is the `q > 2` companion of the bit-packed path. Dimensions stay
//! tiny (the qDHO constructions top out around `F_4^8`), so clarity wins
//! over packing. Every operation takes the [`FieldCtx`] explicitly.

use std::collections::HashMap;

use super::LinalgError;
use crate::field::{Elt, FieldCtx};

/// Square matrix over a field context, row-major; acts on row vectors.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FMat {
    n: usize,
    a: Vec<Elt>,
}

impl FMat {
    pub fn zero(n: usize) -> Self {
        FMat { n, a: vec![0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = FMat::zero(n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Elt) -> Self {
        let mut m = FMat::zero(n);
        for i in 0..n {
            for j in 0..n {
                m.a[i * n + j] = f(i, j);
            }
        }
        m
    }

    /// Row `i` is the image of the `i`-th basis vector under the map.
    pub fn from_row_images(n: usize, rows: Vec<Vec<Elt>>) -> Self {
        assert_eq!(rows.len(), n);
        let mut m = FMat::zero(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            m.a[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Elt {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elt) {
        self.a[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Elt] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    /// `x -> x T` for a row vector `x`.
    pub fn apply(&self, ctx: &FieldCtx, x: &[Elt]) -> Vec<Elt> {
        let n = self.n;
        let mut out = vec![0; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for j in 0..n {
                out[j] = ctx.add(out[j], ctx.mul(xi, self.a[i * n + j]));
            }
        }
        out
    }

    pub fn add(&self, ctx: &FieldCtx, other: &FMat) -> FMat {
        assert_eq!(self.n, other.n);
        FMat { n: self.n, a: self.a.iter().zip(&other.a).map(|(&x, &y)| ctx.add(x, y)).collect() }
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &FMat) -> FMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = FMat::zero(n);
        for i in 0..n {
            for l in 0..n {
                let x = self.a[i * n + l];
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] = ctx.add(out.a[i * n + j], ctx.mul(x, other.a[l * n + j]));
                }
            }
        }
        out
    }

    pub fn scale(&self, ctx: &FieldCtx, c: Elt) -> FMat {
        FMat { n: self.n, a: self.a.iter().map(|&x| ctx.mul(c, x)).collect() }
    }

    pub fn transpose(&self) -> FMat {
        FMat::from_fn(self.n, |i, j| self.at(j, i))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.at(i, j) == self.at(j, i)))
    }

    pub fn rank(&self, ctx: &FieldCtx) -> usize {
        let mut rows: Vec<Vec<Elt>> = (0..self.n).map(|i| self.row(i).to_vec()).collect();
        gauss(ctx, &mut rows)
    }

    pub fn is_invertible(&self, ctx: &FieldCtx) -> bool {
        self.rank(ctx) == self.n
    }

    pub fn inverse(&self, ctx: &FieldCtx) -> Option<FMat> {
        let n = self.n;
        let mut a: Vec<Vec<Elt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut b: Vec<Vec<Elt>> = (0..n).map(|i| FMat::identity(n).row(i).to_vec()).collect();
        let mut done = 0;
        for col in 0..n {
            let r = (done..n).find(|&r| a[r][col] != 0)?;
            a.swap(done, r);
            b.swap(done, r);
            let inv = ctx.inv(a[done][col]);
            for j in 0..n {
                a[done][j] = ctx.mul(a[done][j], inv);
                b[done][j] = ctx.mul(b[done][j], inv);
            }
            for r2 in 0..n {
                if r2 != done && a[r2][col] != 0 {
                    let c = a[r2][col];
                    for j in 0..n {
                        a[r2][j] = ctx.sub(a[r2][j], ctx.mul(c, a[done][j]));
                        b[r2][j] = ctx.sub(b[r2][j], ctx.mul(c, b[done][j]));
                    }
                }
            }
            done += 1;
        }
        Some(FMat::from_row_images(n, b))
    }

    pub fn kernel(&self, ctx: &FieldCtx) -> FSubspace {
        let n = self.n;
        let mut img: Vec<Vec<Elt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut coef: Vec<Vec<Elt>> = (0..n).map(|i| FMat::identity(n).row(i).to_vec()).collect();
        let mut done = 0;
        for col in 0..n {
            if let Some(r) = (done..n).find(|&r| img[r][col] != 0) {
                img.swap(done, r);
                coef.swap(done, r);
                let inv = ctx.inv(img[done][col]);
                for j in 0..n {
                    img[done][j] = ctx.mul(img[done][j], inv);
                }
                for j in 0..n {
                    coef[done][j] = ctx.mul(coef[done][j], inv);
                }
                for r2 in 0..n {
                    if r2 != done && img[r2][col] != 0 {
                        let c = img[r2][col];
                        for j in 0..n {
                            img[r2][j] = ctx.sub(img[r2][j], ctx.mul(c, img[done][j]));
                            coef[r2][j] = ctx.sub(coef[r2][j], ctx.mul(c, coef[done][j]));
                        }
                    }
                }
                done += 1;
            }
        }
        FSubspace::from_rows(ctx, n, coef[done..].to_vec())
    }
}

fn gauss(ctx: &FieldCtx, rows: &mut Vec<Vec<Elt>>) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let w = rows[0].len();
    let mut done = 0;
    for col in 0..w {
        if done == rows.len() {
            break;
        }
        if let Some(r) = (done..rows.len()).find(|&r| rows[r][col] != 0) {
            rows.swap(done, r);
            let inv = ctx.inv(rows[done][col]);
            for j in 0..w {
                rows[done][j] = ctx.mul(rows[done][j], inv);
            }
            for r2 in 0..rows.len() {
                if r2 != done && rows[r2][col] != 0 {
                    let c = rows[r2][col];
                    for j in 0..w {
                        rows[r2][j] = ctx.sub(rows[r2][j], ctx.mul(c, rows[done][j]));
                    }
                }
            }
            done += 1;
        }
    }
    done
}

/// Subspace of `ctx^ambient` as a reduced row-echelon basis (pivots
/// ascending, pivot entries 1), so equal subspaces compare equal.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FSubspace {
    ambient: usize,
    rows: Vec<Vec<Elt>>,
}

impl FSubspace {
    pub fn zero(ambient: usize) -> Self {
        FSubspace { ambient, rows: Vec::new() }
    }

    pub fn from_rows(ctx: &FieldCtx, ambient: usize, mut rows: Vec<Vec<Elt>>) -> Self {
        rows.retain(|r| r.iter().any(|&x| x != 0));
        for r in &rows {
            assert_eq!(r.len(), ambient);
        }
        let rank = gauss(ctx, &mut rows);
        rows.truncate(rank);
        rows.sort_by_key(|r| r.iter().position(|&x| x != 0).unwrap_or(usize::MAX));
        FSubspace { ambient, rows }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Elt>] {
        &self.rows
    }

    pub fn reduce(&self, ctx: &FieldCtx, v: &[Elt]) -> Vec<Elt> {
        let mut v = v.to_vec();
        for r in &self.rows {
            let piv = r.iter().position(|&x| x != 0).unwrap();
            if v[piv] != 0 {
                let c = v[piv];
                for j in 0..self.ambient {
                    v[j] = ctx.sub(v[j], ctx.mul(c, r[j]));
                }
            }
        }
        v
    }

    pub fn contains(&self, ctx: &FieldCtx, v: &[Elt]) -> bool {
        self.reduce(ctx, v).iter().all(|&x| x == 0)
    }

    pub fn sum(&self, ctx: &FieldCtx, other: &FSubspace) -> FSubspace {
        assert_eq!(self.ambient, other.ambient);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        FSubspace::from_rows(ctx, self.ambient, rows)
    }

    pub fn intersect(&self, ctx: &FieldCtx, other: &FSubspace) -> FSubspace {
        assert_eq!(self.ambient, other.ambient);
        // Zassenhaus with doubled rows [a | a], [b | 0].
        let w = self.ambient;
        let mut rows: Vec<Vec<Elt>> = Vec::new();
        for a in &self.rows {
            let mut r = a.clone();
            r.extend_from_slice(a);
            rows.push(r);
        }
        for b in &other.rows {
            let mut r = b.clone();
            r.extend(std::iter::repeat(0).take(w));
            rows.push(r);
        }
        // Eliminate the left half.
        let mut done = 0;
        for col in 0..w {
            if done == rows.len() {
                break;
            }
            if let Some(r) = (done..rows.len()).find(|&r| rows[r][col] != 0) {
                rows.swap(done, r);
                let inv = ctx.inv(rows[done][col]);
                for j in 0..2 * w {
                    rows[done][j] = ctx.mul(rows[done][j], inv);
                }
                for r2 in 0..rows.len() {
                    if r2 != done && rows[r2][col] != 0 {
                        let c = rows[r2][col];
                        for j in 0..2 * w {
                            rows[r2][j] = ctx.sub(rows[r2][j], ctx.mul(c, rows[done][j]));
                        }
                    }
                }
                done += 1;
            }
        }
        let inter = rows[done..].iter().map(|r| r[w..].to_vec()).collect();
        FSubspace::from_rows(ctx, w, inter)
    }

    /// All `q^dim` vectors of the subspace, `q = ctx.order()`.
    pub fn vectors<'a>(&'a self, ctx: &'a FieldCtx) -> impl Iterator<Item = Vec<Elt>> + 'a {
        let d = self.dim() as u32;
        let q = ctx.order();
        let total = q.pow(d);
        (0..total).map(move |sel| {
            let mut v = vec![0; self.ambient];
            let mut t = sel;
            for r in &self.rows {
                let c = t % q;
                t /= q;
                if c != 0 {
                    for j in 0..self.ambient {
                        v[j] = ctx.add(v[j], ctx.mul(c, r[j]));
                    }
                }
            }
            v
        })
    }
}

/// Nondegenerate symmetric bilinear form `b(x, y) = x G y^t` over a context.
#[derive(Clone, Debug)]
pub struct FForm {
    gram: FMat,
    gram_inv: FMat,
}

impl FForm {
    pub fn new(ctx: &FieldCtx, gram: FMat) -> Result<FForm, LinalgError> {
        if !gram.is_symmetric() {
            return Err(LinalgError::BadGram);
        }
        let gram_inv = gram.inverse(ctx).ok_or(LinalgError::BadGram)?;
        Ok(FForm { gram, gram_inv })
    }

    pub fn dot(n: usize) -> FForm {
        FForm { gram: FMat::identity(n), gram_inv: FMat::identity(n) }
    }

    pub fn n(&self) -> usize {
        self.gram.n()
    }

    pub fn gram(&self) -> &FMat {
        &self.gram
    }

    pub fn eval(&self, ctx: &FieldCtx, x: &[Elt], y: &[Elt]) -> Elt {
        let gx = self.gram.apply(ctx, x);
        gx.iter().zip(y).fold(0, |acc, (&a, &b)| ctx.add(acc, ctx.mul(a, b)))
    }

    pub fn adjoint(&self, ctx: &FieldCtx, t: &FMat) -> FMat {
        self.gram.mul(ctx, &t.transpose()).mul(ctx, &self.gram_inv)
    }

    pub fn is_self_adjoint(&self, ctx: &FieldCtx, t: &FMat) -> bool {
        t.mul(ctx, &self.gram).is_symmetric()
    }

    /// `b(x, xT) = 0` for all `x`; checked on the basis and pairwise sums,
    /// which suffices in any characteristic for a quadratic condition.
    pub fn is_alternating(&self, ctx: &FieldCtx, t: &FMat) -> bool {
        if !self.is_self_adjoint(ctx, t) {
            return false;
        }
        let n = self.n();
        let basis = |i: usize| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        };
        for i in 0..n {
            let ei = basis(i);
            if self.eval(ctx, &ei, &t.apply(ctx, &ei)) != 0 {
                return false;
            }
            for j in 0..i {
                let mut s = basis(j);
                s[i] = 1;
                if self.eval(ctx, &s, &t.apply(ctx, &s)) != 0 {
                    return false;
                }
            }
        }
        true
    }

    pub fn rank_one(&self, ctx: &FieldCtx, a: &[Elt], b: &[Elt]) -> FMat {
        let n = self.n();
        let ga = self.gram.apply(ctx, a);
        FMat::from_fn(n, |i, j| ctx.mul(ga[i], b[j]))
    }

    /// Char-2 only: the unique `R = E_{a,a}` of rank at most one with `T + R`
    /// alternating, via `b(x, a)^2 = b(x, xT)` solved on a basis.
    pub fn skew_normalize(&self, ctx: &FieldCtx, t: &FMat) -> Result<(FMat, Vec<Elt>), LinalgError> {
        if ctx.p() != 2 {
            return Err(LinalgError::OddCharacteristic(ctx.p()));
        }
        if !self.is_self_adjoint(ctx, t) {
            return Err(LinalgError::NotSelfAdjoint);
        }
        let n = self.n();
        let q = ctx.order();
        // mu_i = sqrt(b(e_i, e_i T)); sqrt is x -> x^(q/2) in char 2.
        let mut mu = vec![0; n];
        for i in 0..n {
            let mut ei = vec![0; n];
            ei[i] = 1;
            let lam = self.eval(ctx, &ei, &t.apply(ctx, &ei));
            mu[i] = ctx.pow(lam, q / 2);
        }
        let a = self.gram_inv.apply(ctx, &mu);
        let r = self.rank_one(ctx, &a, &a);
        debug_assert!(self.is_alternating(ctx, &t.add(ctx, &r)));
        Ok((r, a))
    }
}

/// Viewing `F_{p^k}` as a vector space over its degree-`d` subfield, with a
/// standalone context for the subfield, coordinate tables in the power basis
/// `1, x, ..., x^(k/d - 1)`, and the relative-trace Gram matrix.
pub struct SubfieldSplit {
    pub sub: FieldCtx,
    pub dim: usize,
    /// `emb[c]` = parent code of the standalone subfield element `c`.
    emb: Vec<Elt>,
    emb_inv: HashMap<Elt, Elt>,
    to_coords: Vec<Vec<Elt>>,
    from_coords: HashMap<Vec<Elt>, Elt>,
}

impl SubfieldSplit {
    pub fn new(parent: &FieldCtx, d: u32) -> Result<SubfieldSplit, crate::field::FieldError> {
        let k = parent.degree();
        if d == 0 || k % d != 0 {
            return Err(crate::field::FieldError::NotADivisor(d, k));
        }
        let sub = FieldCtx::new(parent.p(), d, None)?;
        let dim = (k / d) as usize;
        // Embed: send the subfield generator-x to the least root of the
        // subfield modulus inside the parent's fixed field.
        let fixed = parent.subfield_elements(d)?;
        let spec = sub.spec();
        let sub_poly: Vec<u64> = {
            let mut v = Vec::new();
            let mut c = u64::from_str_radix(spec.poly.trim_start_matches("0x"), 16).unwrap();
            while c > 0 {
                v.push(c % parent.p());
                c /= parent.p();
            }
            v
        };
        let eval_at = |r: Elt| {
            let mut acc = 0;
            for (i, &c) in sub_poly.iter().enumerate() {
                if c != 0 {
                    acc = parent.add(acc, parent.mul(c, parent.pow(r, i as u64)));
                }
            }
            acc
        };
        let root = fixed.iter().copied().find(|&r| eval_at(r) == 0).expect("subfield modulus splits in the fixed field");
        let mut emb = Vec::with_capacity(sub.order() as usize);
        for c in sub.elements() {
            // digits of c in base p, mapped through powers of the root
            let mut acc = 0;
            let mut t = c;
            let mut pw = 1;
            while t > 0 {
                let digit = t % parent.p();
                if digit != 0 {
                    acc = parent.add(acc, parent.mul(digit, pw));
                }
                t /= parent.p();
                pw = parent.mul(pw, root);
            }
            emb.push(acc);
        }
        let emb_inv: HashMap<Elt, Elt> = emb.iter().enumerate().map(|(c, &e)| (e, c as Elt)).collect();
        debug_assert_eq!(emb_inv.len(), sub.order() as usize);

        // Coordinate tables over the power basis.
        let mut to_coords = vec![Vec::new(); parent.order() as usize];
        let mut from_coords = HashMap::with_capacity(parent.order() as usize);
        let xs: Vec<Elt> = (0..dim).map(|j| parent.pow_of_x(j)).collect();
        let total = sub.order().pow(dim as u32);
        for sel in 0..total {
            let mut coords = vec![0; dim];
            let mut t = sel;
            let mut v: Elt = 0;
            for (j, c) in coords.iter_mut().enumerate() {
                *c = t % sub.order();
                t /= sub.order();
                if *c != 0 {
                    v = parent.add(v, parent.mul(emb[*c as usize], xs[j]));
                }
            }
            to_coords[v as usize] = coords.clone();
            from_coords.insert(coords, v);
        }
        Ok(SubfieldSplit { sub, dim, emb, emb_inv, to_coords, from_coords })
    }

    pub fn embed(&self, c: Elt) -> Elt {
        self.emb[c as usize]
    }

    pub fn retract(&self, e: Elt) -> Elt {
        self.emb_inv[&e]
    }

    pub fn coords(&self, x: Elt) -> &[Elt] {
        &self.to_coords[x as usize]
    }

    pub fn from_coords(&self, v: &[Elt]) -> Elt {
        self.from_coords[&v.to_vec()]
    }

    /// Gram matrix `G_ij = Tr_{k:d}(x^i x^j)` in standalone subfield codes.
    pub fn trace_gram(&self, parent: &FieldCtx) -> FMat {
        FMat::from_fn(self.dim, |i, j| {
            let prod = parent.mul(parent.pow_of_x(i), parent.pow_of_x(j));
            self.retract(parent.rel_trace(prod, self.sub.degree()).unwrap())
        })
    }

    /// Matrix (over the subfield) of an F-linear map given on parent codes.
    pub fn operator(&self, f: impl Fn(Elt) -> Elt) -> FMat {
        let rows = (0..self.dim)
            .map(|j| {
                let mut basis = vec![0; self.dim];
                basis[j] = 1;
                self.coords(f(self.from_coords(&basis))).to_vec()
            })
            .collect();
        FMat::from_row_images(self.dim, rows)
    }
}

/// Pack a coordinate vector into a base-`q` code (for hashing and files).
pub fn vcode(v: &[Elt], q: u64) -> u64 {
    v.iter().rev().fold(0, |acc, &c| acc * q + c)
}

pub fn vdecode(code: u64, q: u64, len: usize) -> Vec<Elt> {
    let mut v = vec![0; len];
    let mut t = code;
    for c in v.iter_mut() {
        *c = t % q;
        t /= q;
    }
    v
}
