//! Arithmetic for small finite fields `F_{p^k}`.
//!
//! Elements are stored as canonical `u64` codes: the coefficient vector of
//! the element in the polynomial basis, packed little-endian (for `p = 2`
//! this is just the bit pattern, for odd `p` it is the base-`p` digit
//! expansion). All arithmetic goes through a [`FieldCtx`], which is immutable
//! after construction and freely shareable between threads.
//!
//! Subfields are realized inside the big field as Frobenius fixed fields
//! `F_{p^d} = { x : x^{p^d} = x }` rather than as abstract extensions; every
//! formula in this crate only ever needs subfield *elements* of the ambient
//! field, never a standalone copy of `F_{p^d}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Canonical element code (polynomial-basis coefficients, base-`p` packed).
pub type Elt = u64;

const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    BadDegree,
    #[error("modulus has degree {got}, expected {want}")]
    BadPolyDegree { got: usize, want: usize },
    #[error("modulus is not monic")]
    NotMonic,
    #[error("modulus is reducible (nontrivial factor {factor})")]
    Reducible { factor: String },
    #[error("field F_{{{p}^{k}}} is outside the supported range")]
    TooLarge { p: u64, k: u32 },
    #[error("{0} does not divide the extension degree {1}")]
    NotADivisor(u32, u32),
}

/// Context for `F_{p^k}` with the reduction polynomial and (for small
/// fields) discrete-log tables.
#[derive(Clone)]
pub struct FieldCtx {
    p: u64,
    k: u32,
    q: u64,
    /// Monic reduction polynomial, `poly[i]` = coefficient of `x^i`, length `k+1`.
    poly: Vec<u64>,
    /// For `p = 2`: the same polynomial as a bit mask.
    poly_bits: u64,
    /// `exp[i] = g^i` for a fixed generator `g`; empty when `q > TABLE_LIMIT`.
    exp: Vec<Elt>,
    /// `log[x]` with `log[g^i] = i`; `log[0]` is unused.
    log: Vec<u32>,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldCtx(F_{}^{}, poly={:#x})", self.p, self.k, self.poly_code())
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.poly == other.poly
    }
}
impl Eq for FieldCtx {}

/// Serialized shape of a field: `{"p":2,"k":9,"poly":"0x211"}` with the
/// modulus packed little-endian (base-`p` digits; plain coefficient bits
/// when `p = 2`).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub k: u32,
    pub poly: String,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---------------------------------------------------------------------------
// Dense polynomial helpers over F_p (little-endian coefficient vectors).
// Only used during context construction, so clarity beats speed here.

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm], p);
    while r.len() > dm {
        let c = (r[r.len() - 1] * lead_inv) % p;
        let shift = r.len() - 1 - dm;
        for i in 0..=dm {
            let idx = shift + i;
            let sub = (c * m[i]) % p;
            r[idx] = (r[idx] + p - sub) % p;
        }
        poly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

#[allow(dead_code)]
fn poly_mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    poly_rem(&prod, m, p)
}

/// `h(x)^p mod m` using the freshman's dream: coefficients are fixed by the
/// p-th power map, so only the exponents spread out.
fn poly_pow_p(h: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut spread = vec![0u64; h.len().saturating_sub(1) * p as usize + 1];
    for (i, &c) in h.iter().enumerate() {
        spread[i * p as usize] = c;
    }
    poly_rem(&spread, m, p)
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x: Vec<u64> = a.to_vec();
    let mut y: Vec<u64> = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        let r = poly_rem(&x, &y, p);
        x = y;
        y = r;
    }
    x
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // p is a small prime; Fermat suffices.
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

/// Returns `None` when irreducible, otherwise a human-readable witness of a
/// nontrivial factorization.
fn reducibility_witness(poly: &[u64], p: u64) -> Option<String> {
    let k = poly.len() - 1;
    if k == 1 {
        return None;
    }
    let x = vec![0, 1];
    let frob_pow = |d: usize| {
        let mut g = poly_rem(&x, poly, p);
        for _ in 0..d {
            g = poly_pow_p(&g, poly, p);
        }
        g
    };
    let minus_x = |mut g: Vec<u64>| {
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + p - 1) % p;
        poly_trim(&mut g);
        g
    };
    // An irreducible of degree d divides x^(p^d) - x; scanning d upward finds
    // the smallest-degree factor as a gcd.
    for d in 1..k {
        let gcd = poly_gcd(poly, &minus_x(frob_pow(d)), p);
        if gcd.len() > 1 && gcd.len() < poly.len() {
            return Some(poly_string(&gcd));
        }
        if gcd.len() == poly.len() && d < k {
            return Some(format!("product of irreducibles of degree dividing {d}"));
        }
    }
    // No factor of degree < k, so irreducibility reduces to x^(p^k) = x.
    if frob_pow(k) != poly_rem(&x, poly, p) {
        return Some("repeated factor".into());
    }
    None
}

impl FieldCtx {
    /// Builds `F_{p^k}`. When `poly` is omitted the lexicographically least
    /// monic irreducible of degree `k` is chosen (candidates ordered by their
    /// packed little-endian code), which keeps serialized objects identical
    /// across runs.
    pub fn new(p: u64, k: u32, poly: Option<Vec<u64>>) -> Result<FieldCtx, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::BadDegree);
        }
        let bits = (p as f64).log2() * k as f64;
        if bits > 32.0 + 1e-9 || (p > 2 && bits > 20.0) {
            return Err(FieldError::TooLarge { p, k });
        }
        let q = (p as u128).pow(k) as u64;

        let poly = match poly {
            Some(mut v) => {
                for c in v.iter_mut() {
                    *c %= p;
                }
                poly_trim(&mut v);
                if v.len() != k as usize + 1 {
                    return Err(FieldError::BadPolyDegree { got: v.len().saturating_sub(1), want: k as usize });
                }
                if v[k as usize] != 1 {
                    return Err(FieldError::NotMonic);
                }
                if let Some(factor) = reducibility_witness(&v, p) {
                    return Err(FieldError::Reducible { factor });
                }
                v
            }
            None => least_irreducible(p, k),
        };

        let poly_bits = if p == 2 {
            poly.iter().enumerate().fold(0u64, |acc, (i, &c)| acc | (c << i))
        } else {
            0
        };

        let mut ctx = FieldCtx { p, k, q, poly, poly_bits, exp: Vec::new(), log: Vec::new() };
        if q <= TABLE_LIMIT {
            ctx.build_tables();
        }
        Ok(ctx)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<FieldCtx, FieldError> {
        let code = u64::from_str_radix(spec.poly.trim_start_matches("0x"), 16)
            .map_err(|_| FieldError::BadPolyDegree { got: 0, want: spec.k as usize })?;
        let mut poly = Vec::new();
        let mut c = code;
        while c > 0 {
            poly.push(c % spec.p);
            c /= spec.p;
        }
        FieldCtx::new(spec.p, spec.k, Some(poly))
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.p, k: self.k, poly: format!("{:#x}", self.poly_code()) }
    }

    fn poly_code(&self) -> u64 {
        self.poly.iter().rev().fold(0u64, |acc, &c| acc * self.p + c)
    }

    fn build_tables(&mut self) {
        let g = self.find_generator();
        let mut exp = Vec::with_capacity(self.q as usize - 1);
        let mut log = vec![0u32; self.q as usize];
        let mut acc: Elt = 1;
        for i in 0..(self.q - 1) {
            exp.push(acc);
            log[acc as usize] = i as u32;
            acc = self.mul_slow(acc, g);
        }
        debug_assert_eq!(acc, 1);
        self.exp = exp;
        self.log = log;
    }

    fn find_generator(&self) -> Elt {
        let factors = prime_factors(self.q - 1);
        'cand: for g in 1..self.q {
            if g == 1 && self.q > 2 {
                continue;
            }
            for &r in &factors {
                if self.pow_slow(g, (self.q - 1) / r) == 1 {
                    continue 'cand;
                }
            }
            return g;
        }
        1
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.k
    }
    pub fn order(&self) -> u64 {
        self.q
    }
    pub fn zero(&self) -> Elt {
        0
    }
    pub fn one(&self) -> Elt {
        1
    }
    /// A fixed multiplicative generator (only for table-backed fields).
    pub fn generator(&self) -> Elt {
        assert!(!self.exp.is_empty(), "generator requires a table-backed field");
        self.exp[1 % self.exp.len().max(1)]
    }

    pub fn elements(&self) -> impl Iterator<Item = Elt> {
        0..self.q
    }

    #[inline]
    pub fn add(&self, a: Elt, b: Elt) -> Elt {
        if self.p == 2 {
            return a ^ b;
        }
        let mut out = 0u64;
        let (mut a, mut b) = (a, b);
        let mut shift = 1u64;
        while a > 0 || b > 0 {
            out += ((a + b) % self.p) * shift;
            a /= self.p;
            b /= self.p;
            shift *= self.p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: Elt) -> Elt {
        if self.p == 2 {
            return a;
        }
        let mut out = 0u64;
        let mut a = a;
        let mut shift = 1u64;
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * shift;
            a /= self.p;
            shift *= self.p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: Elt, b: Elt) -> Elt {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        if a == 0 || b == 0 {
            return 0;
        }
        if !self.exp.is_empty() {
            let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
            return self.exp[(s % (self.q - 1)) as usize];
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: Elt, b: Elt) -> Elt {
        if self.p == 2 {
            // Carryless shift-xor multiply, then reduce by the modulus.
            let mut acc: u64 = 0;
            let mut a = a;
            let mut b = b;
            while b > 0 {
                if b & 1 == 1 {
                    acc ^= a;
                }
                a <<= 1;
                b >>= 1;
            }
            let k = self.k;
            let top = 64 - acc.leading_zeros();
            let mut bit = top;
            while bit > k {
                bit -= 1;
                if acc >> bit & 1 == 1 {
                    acc ^= self.poly_bits << (bit - k);
                }
            }
            acc & ((1u64 << k) - 1).max(1)
        } else {
            // Schoolbook product of digit vectors mod poly.
            let ka = self.k as usize;
            let mut prod = vec![0u64; 2 * ka];
            let mut ad = vec![0u64; ka];
            let mut bd = vec![0u64; ka];
            let (mut ta, mut tb) = (a, b);
            for i in 0..ka {
                ad[i] = ta % self.p;
                bd[i] = tb % self.p;
                ta /= self.p;
                tb /= self.p;
            }
            for i in 0..ka {
                if ad[i] == 0 {
                    continue;
                }
                for j in 0..ka {
                    prod[i + j] = (prod[i + j] + ad[i] * bd[j]) % self.p;
                }
            }
            let r = poly_rem(&prod, &self.poly, self.p);
            r.iter().rev().fold(0u64, |acc, &c| acc * self.p + c)
        }
    }

    pub fn pow(&self, a: Elt, e: u64) -> Elt {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        if !self.exp.is_empty() {
            let l = (self.log[a as usize] as u128 * e as u128 % (self.q - 1) as u128) as usize;
            return self.exp[l];
        }
        self.pow_slow(a, e)
    }

    fn pow_slow(&self, a: Elt, mut e: u64) -> Elt {
        let mut acc = 1;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Elt) -> Elt {
        assert!(a != 0, "division by zero");
        self.pow(a, self.q - 2)
    }

    /// `x^(p^j)`. Additive and multiplicative; `frobenius(x, k) = x`.
    pub fn frobenius(&self, x: Elt, j: u32) -> Elt {
        let j = j % self.k;
        if x == 0 || j == 0 {
            return x;
        }
        if !self.exp.is_empty() {
            let e = {
                let mut e = 1u128;
                for _ in 0..j {
                    e = e * self.p as u128 % (self.q - 1) as u128;
                }
                e as u64
            };
            let l = (self.log[x as usize] as u128 * e as u128 % (self.q - 1) as u128) as usize;
            return self.exp[l];
        }
        let mut out = x;
        for _ in 0..j {
            out = self.pow_slow(out, self.p);
        }
        out
    }

    /// Relative trace `Tr_{k:d}(x) = sum over j of x^(p^(d*j))`, landing in
    /// the subfield `F_{p^d}`.
    pub fn rel_trace(&self, x: Elt, d: u32) -> Result<Elt, FieldError> {
        if d == 0 || self.k % d != 0 {
            return Err(FieldError::NotADivisor(d, self.k));
        }
        let mut acc = 0;
        let mut t = x;
        for _ in 0..(self.k / d) {
            acc = self.add(acc, t);
            t = self.frobenius(t, d);
        }
        debug_assert_eq!(t, x);
        Ok(acc)
    }

    /// Absolute trace down to the prime field.
    pub fn abs_trace(&self, x: Elt) -> Elt {
        self.rel_trace(x, 1).expect("1 divides k")
    }

    /// The `p^d` fixed points of `frobenius(., d)`, computed as the kernel of
    /// the F_p-linear map `x -> x^(p^d) - x` and returned in code order.
    pub fn subfield_elements(&self, d: u32) -> Result<Vec<Elt>, FieldError> {
        if d == 0 || self.k % d != 0 {
            return Err(FieldError::NotADivisor(d, self.k));
        }
        let k = self.k as usize;
        // Columns of the map on the polynomial basis.
        let mut cols = Vec::with_capacity(k);
        for i in 0..k {
            let basis_el = self.pow_of_x(i);
            let img = self.sub(self.frobenius(basis_el, d), basis_el);
            cols.push(self.digits(img));
        }
        // Kernel over F_p by column reduction on the transposed system.
        let kernel = fp_kernel(&cols, k, self.p);
        // Enumerate the span of the kernel basis.
        let dim = kernel.len();
        let total = (self.p as u128).pow(dim as u32) as u64;
        let mut out = Vec::with_capacity(total as usize);
        for idx in 0..total {
            let mut v = 0u64;
            let mut t = idx;
            for b in kernel.iter() {
                let c = t % self.p;
                t /= self.p;
                if c != 0 {
                    let scaled = self.mul(self.from_digits_fp(b), c);
                    v = self.add(v, scaled);
                }
            }
            out.push(v);
        }
        out.sort_unstable();
        out.dedup();
        debug_assert_eq!(out.len() as u64, (self.p as u128).pow(d) as u64);
        Ok(out)
    }

    /// Element `x^i` as a field element (i < k gives a basis vector).
    pub fn pow_of_x(&self, i: usize) -> Elt {
        if (i as u32) < self.k {
            (self.p as u64).pow(i as u32)
        } else {
            self.pow(self.p, i as u64) // p is the code of x
        }
    }

    fn digits(&self, x: Elt) -> Vec<u64> {
        let mut out = vec![0u64; self.k as usize];
        let mut t = x;
        for d in out.iter_mut() {
            *d = t % self.p;
            t /= self.p;
        }
        out
    }

    fn from_digits_fp(&self, d: &[u64]) -> Elt {
        d.iter().rev().fold(0u64, |acc, &c| acc * self.p + c)
    }

    /// Validated divisibility chain `1 = d_0 | d_1 | ... | d_m | k` with an
    /// F_p-basis of each fixed field.
    pub fn subfield_chain(&self, degrees: &[u32]) -> Result<SubfieldChain, FieldError> {
        let mut full = vec![1];
        full.extend_from_slice(degrees);
        full.dedup();
        for w in full.windows(2) {
            if w[1] % w[0] != 0 || w[1] <= w[0] {
                return Err(FieldError::NotADivisor(w[0], w[1]));
            }
        }
        if let Some(&last) = full.last() {
            if self.k % last != 0 {
                return Err(FieldError::NotADivisor(last, self.k));
            }
        }
        let mut bases = Vec::new();
        for &d in &full {
            let elems = self.subfield_elements(d)?;
            bases.push(fp_span_basis(self, &elems, d));
        }
        Ok(SubfieldChain { degrees: full, bases })
    }
}

/// A divisibility chain of subfields realized inside one ambient field.
#[derive(Debug, Clone)]
pub struct SubfieldChain {
    /// `degrees[0] = 1`; each entry divides the next and the last divides `k`.
    pub degrees: Vec<u32>,
    /// For each degree, an F_p-basis of the fixed field (codes in the big field).
    pub bases: Vec<Vec<Elt>>,
}

fn fp_span_basis(ctx: &FieldCtx, elems: &[Elt], d: u32) -> Vec<Elt> {
    // Greedy F_p-independent subset of the subfield, d elements.
    let mut basis: Vec<Elt> = Vec::new();
    let mut span: Vec<Elt> = vec![0];
    for &e in elems {
        if span.contains(&e) {
            continue;
        }
        basis.push(e);
        let mut next = span.clone();
        for &s in &span {
            let mut scaled = e;
            for _ in 1..ctx.p {
                next.push(ctx.add(s, scaled));
                scaled = ctx.add(scaled, e);
            }
        }
        // scaled walk above adds s + c*e for c = 1..p-1
        span = next;
        span.sort_unstable();
        span.dedup();
        if basis.len() == d as usize {
            break;
        }
    }
    basis
}

/// Kernel of the F_p-linear map with the given columns (each a digit vector
/// of length `k`); returns a basis of digit vectors.
fn fp_kernel(cols: &[Vec<u64>], k: usize, p: u64) -> Vec<Vec<u64>> {
    // Row-reduce the k x k matrix whose j-th column is cols[j].
    let mut m = vec![vec![0u64; k]; k];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..k {
            m[i][j] = col[i];
        }
    }
    let mut pivot_of_col = vec![usize::MAX; k];
    let mut row = 0;
    for col in 0..k {
        if let Some(r) = (row..k).find(|&r| m[r][col] != 0) {
            m.swap(row, r);
            let inv = mod_inv(m[row][col], p);
            for x in m[row].iter_mut() {
                *x = *x * inv % p;
            }
            for r2 in 0..k {
                if r2 != row && m[r2][col] != 0 {
                    let c = m[r2][col];
                    for x in 0..k {
                        let sub = c * m[row][x] % p;
                        m[r2][x] = (m[r2][x] + p - sub) % p;
                    }
                }
            }
            pivot_of_col[col] = row;
            row += 1;
        }
    }
    let mut kernel = Vec::new();
    for free in 0..k {
        if pivot_of_col[free] != usize::MAX {
            continue;
        }
        let mut v = vec![0u64; k];
        v[free] = 1;
        for col in 0..k {
            let r = pivot_of_col[col];
            if r != usize::MAX {
                v[col] = (p - m[r][free] % p) % p;
            }
        }
        kernel.push(v);
    }
    kernel
}

fn least_irreducible(p: u64, k: u32) -> Vec<u64> {
    let span = (p as u128).pow(k) as u64;
    for low in 1..span {
        let mut poly = Vec::with_capacity(k as usize + 1);
        let mut t = low;
        for _ in 0..k {
            poly.push(t % p);
            t /= p;
        }
        poly.push(1);
        if reducibility_witness(&poly, p).is_none() {
            return poly;
        }
    }
    unreachable!("an irreducible of every degree exists")
}

fn poly_string(poly: &[u64]) -> String {
    let terms: Vec<String> = poly
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| match (i, c) {
            (0, c) => format!("{c}"),
            (1, 1) => "x".into(),
            (1, c) => format!("{c}x"),
            (i, 1) => format!("x^{i}"),
            (i, c) => format!("{c}x^{i}"),
        })
        .collect();
    if terms.is_empty() { "0".into() } else { terms.join("+") }
}
