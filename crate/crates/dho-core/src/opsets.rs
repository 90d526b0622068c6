//! The operator-set calculus: symplectic spread-sets, Kerdock sets and
//! DHO-sets as sets of linear operators on `U = V(n, q)`, together with
//! canonical labelings, shadows, twists and dilations.
//!
//! A spread-set is `q^n` self-adjoint operators containing 0 with invertible
//! pairwise differences. A Kerdock set is `q^(n-1)` alternating operators
//! with invertible differences. A DHO-set (`q = 2`, `n` odd) is `2^n`
//! alternating operators whose pairwise sums have rank `n - 1` and whose
//! kernels, for fixed first argument, sweep out every point of `U` exactly
//! once. The canonical labeling attaches to each spread-set member `L` the
//! unique vector `a` with `L + E_{a,a}` alternating; the shadow replaces
//! `C(a)` by `B(a) = C(a) + E_{a,a}`, trading the spread-set axioms for the
//! DHO-set ones.

use std::collections::{HashMap, HashSet};

use crate::exec;
use crate::field::{Elt, FieldCtx};
use crate::linalg::{BitForm, BitMat, FForm, FMat, SubfieldSplit};
use crate::report::VerifyReport;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OpSetError {
    #[error("operation requires labels (a canonical labeling) on the set")]
    MissingLabels,
    #[error("labeling is not bijective: {0}")]
    LabelingNotBijective(String),
    #[error("dilation parameter may not be 1")]
    DilationAtOne,
    #[error("{0}")]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error("result fails verification: {0}")]
    BadResult(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    SpreadSet,
    KerdockSet,
    DhoSet,
}

impl SetKind {
    pub fn name(&self) -> &'static str {
        match self {
            SetKind::SpreadSet => "spread-set",
            SetKind::KerdockSet => "kerdock-set",
            SetKind::DhoSet => "dho-set",
        }
    }
}

/// A tagged set of operators on `U = V(n, 2)` with its bilinear context.
/// When `labels` is present, `ops[i]` is the operator labeled by the vector
/// `labels[i]` (so `ops[i] = C(labels[i])` for spread-sets).
#[derive(Clone, Debug)]
pub struct OpSet {
    pub kind: SetKind,
    pub form: BitForm,
    pub ops: Vec<BitMat>,
    pub labels: Option<Vec<u32>>,
}

impl OpSet {
    pub fn new(kind: SetKind, form: BitForm, ops: Vec<BitMat>, labels: Option<Vec<u32>>) -> OpSet {
        let n = form.n();
        assert!(ops.iter().all(|m| m.n() == n));
        if let Some(l) = &labels {
            assert_eq!(l.len(), ops.len());
        }
        let mut set = OpSet { kind, form, ops, labels };
        set.sort_canonical();
        set
    }

    pub fn n(&self) -> usize {
        self.form.n()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Sorts by label when present (zero label first), else by matrix rows.
    fn sort_canonical(&mut self) {
        match &self.labels {
            Some(labels) => {
                let mut idx: Vec<usize> = (0..self.ops.len()).collect();
                idx.sort_by_key(|&i| labels[i]);
                self.ops = idx.iter().map(|&i| self.ops[i].clone()).collect();
                self.labels = Some(idx.iter().map(|&i| labels[i]).collect());
            }
            None => self.ops.sort(),
        }
    }

    pub fn label_of(&self, i: usize) -> Option<u32> {
        self.labels.as_ref().map(|l| l[i])
    }

    pub fn op_by_label(&self, a: u32) -> Option<&BitMat> {
        let labels = self.labels.as_ref()?;
        labels.iter().position(|&l| l == a).map(|i| &self.ops[i])
    }

    pub fn index_map(&self) -> HashMap<BitMat, usize> {
        self.ops.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect()
    }

    /// Set equality of the underlying operator sets (labels ignored).
    pub fn same_ops(&self, other: &OpSet) -> bool {
        if self.ops.len() != other.ops.len() {
            return false;
        }
        let mut a: Vec<&BitMat> = self.ops.iter().collect();
        let mut b: Vec<&BitMat> = other.ops.iter().collect();
        a.sort();
        b.sort();
        a == b
    }
}

// ---------------------------------------------------------------------------
// Operator constructors from field arithmetic

/// Gram matrix of the absolute trace form `b(x, y) = Tr(xy)` on `F_{2^n}`
/// in the polynomial basis.
pub fn trace_form(f: &FieldCtx) -> BitForm {
    assert_eq!(f.p(), 2);
    let n = f.degree() as usize;
    let gram = BitMat::from_fn(n, |e| {
        let i = e.trailing_zeros() as usize;
        let mut row = 0u32;
        for j in 0..n {
            let prod = f.mul(f.pow_of_x(i), f.pow_of_x(j));
            row |= (f.abs_trace(prod) as u32) << j;
        }
        row
    });
    BitForm::new(gram).expect("trace form is symmetric and nondegenerate")
}

/// Matrix of an `F_2`-linear map on `F_{2^n}` given elementwise.
pub fn linear_op(f: &FieldCtx, map: impl Fn(Elt) -> Elt) -> BitMat {
    let n = f.degree() as usize;
    BitMat::from_fn(n, |e| map(e as Elt) as u32)
}

/// Multiplication by a fixed field element.
pub fn mult_op(f: &FieldCtx, c: Elt) -> BitMat {
    linear_op(f, |x| f.mul(c, x))
}

/// The `j`-th Frobenius power as an `F_2`-linear map.
pub fn frob_op(f: &FieldCtx, j: u32) -> BitMat {
    linear_op(f, |x| f.frobenius(x, j))
}

// ---------------------------------------------------------------------------
// Verification

fn pair_of_index(idx: usize, m: usize) -> (usize, usize) {
    (idx / m, idx % m)
}

/// Lemma-style spread-set check: cardinality `2^n`, zero member,
/// self-adjoint members, invertible pairwise differences.
pub fn verify_spread_set(set: &OpSet) -> VerifyReport {
    let mut report = VerifyReport::new("spread-set");
    let n = set.n();
    let m = set.len();
    if m != 1 << n {
        return report.fail(format!("cardinality {} != 2^{n}", m));
    }
    let mut seen = HashSet::new();
    for op in &set.ops {
        if !seen.insert(op.clone()) {
            return report.fail("repeated operator".to_string());
        }
    }
    if !set.ops.iter().any(|o| o.is_zero()) {
        return report.fail("zero operator missing".to_string());
    }
    report.check(format!("cardinality 2^{n} with 0"));
    if let Some((i, _)) = exec::first_violation(m, |i| {
        (!set.form.is_self_adjoint(&set.ops[i])).then(|| String::new())
    }) {
        return report.fail(format!("operator #{i} is not self-adjoint"));
    }
    report.check("all members self-adjoint".to_string());
    if let Some((idx, _)) = exec::first_violation(m * m, |idx| {
        let (i, j) = pair_of_index(idx, m);
        (i < j && !set.ops[i].add(&set.ops[j]).is_invertible()).then(|| String::new())
    }) {
        let (i, j) = pair_of_index(idx, m);
        return report.fail(format!("difference of members #{i} and #{j} is singular"));
    }
    report.check(format!("{} pairwise differences invertible", m * (m - 1) / 2));
    report
}

/// Kerdock-set check: cardinality `2^(n-1)`, zero member, alternating
/// members, invertible pairwise differences.
pub fn verify_kerdock_set(set: &OpSet) -> VerifyReport {
    let mut report = VerifyReport::new("kerdock-set");
    let n = set.n();
    let m = set.len();
    if m != 1 << (n - 1) {
        return report.fail(format!("cardinality {} != 2^{}", m, n - 1));
    }
    if !set.ops.iter().any(|o| o.is_zero()) {
        return report.fail("zero operator missing".to_string());
    }
    report.check(format!("cardinality 2^{} with 0", n - 1));
    if let Some((i, _)) =
        exec::first_violation(m, |i| (!set.form.is_alternating(&set.ops[i])).then(|| String::new()))
    {
        return report.fail(format!("operator #{i} is not alternating"));
    }
    report.check("all members alternating".to_string());
    if let Some((idx, _)) = exec::first_violation(m * m, |idx| {
        let (i, j) = pair_of_index(idx, m);
        (i < j && !set.ops[i].add(&set.ops[j]).is_invertible()).then(|| String::new())
    }) {
        let (i, j) = pair_of_index(idx, m);
        return report.fail(format!("sum of members #{i} and #{j} is singular"));
    }
    report.check(format!("{} pairwise sums invertible", m * (m - 1) / 2));
    report
}

/// Kernel table of a DHO-set: `table[i*m + j]` is the unique nonzero vector
/// of `ker(B_i + B_j)`, zero on the diagonal.
#[derive(Clone, Debug)]
pub struct Kappa {
    pub m: usize,
    pub table: Vec<u32>,
}

impl Kappa {
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> u32 {
        self.table[i * self.m + j]
    }
}

/// DHO-set check (`q = 2`, `n` odd): alternating members, pairwise sums of
/// rank `n - 1`, and row-wise kernel coverage of all points of `U`. On
/// success the kernel table is returned alongside, since the same pass that
/// proves the axioms produces the isomorphism-search structure.
pub fn verify_dho_set(set: &OpSet) -> (VerifyReport, Option<Kappa>) {
    let mut report = VerifyReport::new("dho-set");
    let n = set.n();
    let m = set.len();
    if n % 2 == 0 {
        return (report.fail(format!("n = {n} is even; orthogonal DHOs require odd rank")), None);
    }
    if m != 1 << n {
        return (report.fail(format!("cardinality {} != 2^{n}", m)), None);
    }
    if !set.ops.iter().any(|o| o.is_zero()) {
        return (report.fail("zero operator missing".to_string()), None);
    }
    report.check(format!("cardinality 2^{n} with 0"));
    if let Some((i, _)) =
        exec::first_violation(m, |i| (!set.form.is_alternating(&set.ops[i])).then(|| String::new()))
    {
        return (report.fail(format!("operator #{i} is not alternating")), None);
    }
    report.check("all members alternating".to_string());

    // One row per member: kernels of all sums, checking rank and coverage.
    let rows: Vec<Result<Vec<u32>, String>> = exec::map_range(m, |i| {
        let mut row = vec![0u32; m];
        let mut cover = vec![false; 1 << n];
        for j in 0..m {
            if j == i {
                continue;
            }
            let sum = set.ops[i].add(&set.ops[j]);
            let ker = sum.kernel();
            if ker.dim() != 1 {
                return Err(format!("rank of sum of members #{i} and #{j} is {}, want {}", n - ker.dim(), n - 1));
            }
            let v = ker.rows()[0];
            row[j] = v;
            if cover[v as usize] {
                return Err(format!("kernel point {v:#x} repeats in row #{i}"));
            }
            cover[v as usize] = true;
        }
        Ok(row)
    });
    let mut table = vec![0u32; m * m];
    for (i, r) in rows.into_iter().enumerate() {
        match r {
            Ok(row) => table[i * m..(i + 1) * m].copy_from_slice(&row),
            Err(msg) => return (report.fail(msg), None),
        }
    }
    report.check(format!("pairwise sums of rank {} with kernels sweeping all {} points per row", n - 1, m - 1));
    (report, Some(Kappa { m, table }))
}

// ---------------------------------------------------------------------------
// Canonical labeling, shadow, twist

/// The canonical labeling of a spread-set: for each member `L` the unique
/// `a` with `L + E_{a,a}` alternating. Returns labels parallel to `set.ops`.
pub fn canonical_labeling(set: &OpSet) -> Result<Vec<u32>, OpSetError> {
    let mut labels = Vec::with_capacity(set.len());
    let mut seen = HashSet::new();
    for op in &set.ops {
        let (_, a) = set.form.skew_normalize(op)?;
        if !seen.insert(a) {
            return Err(OpSetError::LabelingNotBijective(format!("label {a:#x} repeats")));
        }
        labels.push(a);
    }
    Ok(labels)
}

/// Attaches the canonical labeling (computing it when absent) and sorts.
pub fn with_canonical_labels(set: &OpSet) -> Result<OpSet, OpSetError> {
    let labels = canonical_labeling(set)?;
    Ok(OpSet::new(set.kind, set.form.clone(), set.ops.clone(), Some(labels)))
}

pub fn is_additively_closed(set: &OpSet) -> bool {
    let members: HashSet<&BitMat> = set.ops.iter().collect();
    set.ops.iter().enumerate().all(|(i, a)| set.ops[..=i].iter().all(|b| members.contains(&a.add(b))))
}

/// Shadow of a labeled spread-set: `B(a) = C(a) + E_{a,a}`.
pub fn shadow(set: &OpSet) -> Result<OpSet, OpSetError> {
    let set = match &set.labels {
        Some(_) => set.clone(),
        None => with_canonical_labels(set)?,
    };
    let labels = set.labels.as_ref().unwrap();
    let ops = set
        .ops
        .iter()
        .zip(labels)
        .map(|(c, &a)| c.add(&set.form.rank_one(a, a)))
        .collect();
    Ok(OpSet::new(SetKind::DhoSet, set.form.clone(), ops, Some(labels.clone())))
}

/// Inverse of the shadow map on a labeled DHO-set: `C(a) = B(a) + E_{a,a}`.
/// Fails (with the report) when the labeling was not shadow-canonical.
pub fn invert_shadow(set: &OpSet) -> Result<OpSet, OpSetError> {
    let labels = set.labels.as_ref().ok_or(OpSetError::MissingLabels)?;
    let ops: Vec<BitMat> = set
        .ops
        .iter()
        .zip(labels)
        .map(|(b, &a)| b.add(&set.form.rank_one(a, a)))
        .collect();
    let out = OpSet::new(SetKind::SpreadSet, set.form.clone(), ops, Some(labels.clone()));
    let report = verify_spread_set(&out);
    if !report.ok {
        return Err(OpSetError::BadResult(report.violation.unwrap_or_default()));
    }
    Ok(out)
}

/// The u-twist `C_u(a) = C(a) + E_{a,u} + E_{u,a}` of a labeled spread-set.
pub fn twist(set: &OpSet, u: u32) -> Result<OpSet, OpSetError> {
    let set = match &set.labels {
        Some(_) => set.clone(),
        None => with_canonical_labels(set)?,
    };
    let labels = set.labels.as_ref().unwrap();
    let ops = set
        .ops
        .iter()
        .zip(labels)
        .map(|(c, &a)| c.add(&set.form.rank_one(a, u)).add(&set.form.rank_one(u, a)))
        .collect();
    Ok(OpSet::new(SetKind::SpreadSet, set.form.clone(), ops, Some(labels.clone())))
}

/// The lambda-dilation over `F_2`, where the only admissible parameter is 0
/// and the result is the set itself. Nontrivial dilations live over larger
/// even fields; see [`dilation_gen`].
pub fn dilation_trivial(set: &OpSet, lambda: u32) -> Result<OpSet, OpSetError> {
    if lambda == 1 {
        return Err(OpSetError::DilationAtOne);
    }
    Ok(set.clone())
}

/// Transports an operator set onto the dot-product Gram: with `S G S^t = I`
/// the operators become `S B S^{-1}`. Equivalence questions are invariant
/// under this change of basis, which lets sets over different Grams be
/// compared in one frame.
pub fn to_dot_gram(set: &OpSet) -> Result<(OpSet, BitMat), OpSetError> {
    let s = set.form.orthonormal_basis()?;
    let s_inv = s.inverse().expect("basis change is invertible");
    let ops = set.ops.iter().map(|b| s.mul(b).mul(&s_inv)).collect();
    let labels = set.labels.as_ref().map(|ls| ls.iter().map(|&a| s_inv.apply(a)).collect());
    Ok((OpSet::new(set.kind, BitForm::dot(set.n()), ops, labels), s))
}

// ---------------------------------------------------------------------------
// Generic-field mirror (char 2, q > 2)

/// Operator set over a `q > 2` context; labels are coordinate vectors of
/// `U = F_q^n`.
#[derive(Clone, Debug)]
pub struct FOpSet {
    pub kind: SetKind,
    pub ctx: FieldCtx,
    pub form: FForm,
    pub ops: Vec<FMat>,
    pub labels: Option<Vec<Vec<Elt>>>,
}

impl FOpSet {
    pub fn n(&self) -> usize {
        self.form.n()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }
}

/// The desarguesian spread-set `{a^2 x}` on `F_{q^n}` viewed over `F_q`
/// through a subfield split, with its canonical labeling.
pub fn desarguesian_gen(parent: &FieldCtx, split: &SubfieldSplit) -> FOpSet {
    let form = FForm::new(&split.sub, split.trace_gram(parent)).expect("trace gram");
    let mut ops = Vec::with_capacity(parent.order() as usize);
    let mut labels = Vec::with_capacity(parent.order() as usize);
    for a in parent.elements() {
        let a2 = parent.mul(a, a);
        ops.push(split.operator(|x| parent.mul(a2, x)));
        labels.push(split.coords(a).to_vec());
    }
    FOpSet { kind: SetKind::SpreadSet, ctx: split.sub.clone(), form, ops, labels: Some(labels) }
}

pub fn verify_spread_set_gen(set: &FOpSet) -> VerifyReport {
    let mut report = VerifyReport::new("spread-set");
    let n = set.n();
    let q = set.ctx.order();
    let m = set.len();
    if m as u64 != q.pow(n as u32) {
        return report.fail(format!("cardinality {m} != {q}^{n}"));
    }
    let mut seen = HashSet::new();
    for op in &set.ops {
        if !seen.insert(op.clone()) {
            return report.fail("repeated operator".to_string());
        }
    }
    if !set.ops.iter().any(|o| o.is_zero()) {
        return report.fail("zero operator missing".to_string());
    }
    report.check(format!("cardinality {q}^{n} with 0"));
    if let Some((i, _)) = exec::first_violation(m, |i| {
        (!set.form.is_self_adjoint(&set.ctx, &set.ops[i])).then(|| String::new())
    }) {
        return report.fail(format!("operator #{i} is not self-adjoint"));
    }
    report.check("all members self-adjoint".to_string());
    if let Some((idx, _)) = exec::first_violation(m * m, |idx| {
        let (i, j) = pair_of_index(idx, m);
        (i < j && !set.ops[i].add(&set.ctx, &set.ops[j]).is_invertible(&set.ctx)).then(|| String::new())
    }) {
        let (i, j) = pair_of_index(idx, m);
        return report.fail(format!("difference of members #{i} and #{j} is singular"));
    }
    report.check(format!("{} pairwise differences invertible", m * (m - 1) / 2));
    report
}

pub fn verify_kerdock_set_gen(set: &FOpSet) -> VerifyReport {
    let mut report = VerifyReport::new("kerdock-set");
    let n = set.n();
    let q = set.ctx.order();
    let m = set.len();
    if m as u64 != q.pow(n as u32 - 1) {
        return report.fail(format!("cardinality {m} != {q}^{}", n - 1));
    }
    if !set.ops.iter().any(|o| o.is_zero()) {
        return report.fail("zero operator missing".to_string());
    }
    report.check(format!("cardinality {q}^{} with 0", n - 1));
    if let Some((i, _)) = exec::first_violation(m, |i| {
        (!set.form.is_alternating(&set.ctx, &set.ops[i])).then(|| String::new())
    }) {
        return report.fail(format!("operator #{i} is not alternating"));
    }
    report.check("all members alternating".to_string());
    if let Some((idx, _)) = exec::first_violation(m * m, |idx| {
        let (i, j) = pair_of_index(idx, m);
        (i < j && !set.ops[i].add(&set.ctx, &set.ops[j]).is_invertible(&set.ctx)).then(|| String::new())
    }) {
        let (i, j) = pair_of_index(idx, m);
        return report.fail(format!("sum of members #{i} and #{j} is singular"));
    }
    report.check(format!("{} pairwise sums invertible", m * (m - 1) / 2));
    report
}

fn scale_vec(ctx: &FieldCtx, c: Elt, v: &[Elt]) -> Vec<Elt> {
    v.iter().map(|&x| ctx.mul(c, x)).collect()
}

/// The u-twist over a generic context.
pub fn twist_gen(set: &FOpSet, u: &[Elt]) -> Result<FOpSet, OpSetError> {
    let labels = set.labels.as_ref().ok_or(OpSetError::MissingLabels)?;
    let ops = set
        .ops
        .iter()
        .zip(labels)
        .map(|(c, a)| {
            c.add(&set.ctx, &set.form.rank_one(&set.ctx, a, u)).add(&set.ctx, &set.form.rank_one(&set.ctx, u, a))
        })
        .collect();
    Ok(FOpSet { kind: SetKind::SpreadSet, ctx: set.ctx.clone(), form: set.form.clone(), ops, labels: Some(labels.clone()) })
}

/// The lambda-dilation `C^lambda((1+lambda) a) = C(a) + E_{lambda a, lambda a}`
/// of a labeled spread-set over an even field, `lambda != 1`.
pub fn dilation_gen(set: &FOpSet, lambda: Elt) -> Result<FOpSet, OpSetError> {
    if lambda == 1 {
        return Err(OpSetError::DilationAtOne);
    }
    let labels = set.labels.as_ref().ok_or(OpSetError::MissingLabels)?;
    let ctx = &set.ctx;
    let one_plus = ctx.add(1, lambda);
    let mut ops = Vec::with_capacity(set.ops.len());
    let mut new_labels = Vec::with_capacity(set.ops.len());
    for (c, a) in set.ops.iter().zip(labels) {
        let la = scale_vec(ctx, lambda, a);
        ops.push(c.add(ctx, &set.form.rank_one(ctx, &la, &la)));
        new_labels.push(scale_vec(ctx, one_plus, a));
    }
    Ok(FOpSet { kind: SetKind::SpreadSet, ctx: set.ctx.clone(), form: set.form.clone(), ops, labels: Some(new_labels) })
}

/// Checks that the attached labeling is canonical: `C(a) + E_{a,a}`
/// alternating for every `a`.
pub fn labeling_is_canonical_gen(set: &FOpSet) -> bool {
    match &set.labels {
        None => false,
        Some(labels) => set.ops.iter().zip(labels).all(|(c, a)| {
            let e = set.form.rank_one(&set.ctx, a, a);
            set.form.is_alternating(&set.ctx, &c.add(&set.ctx, &e))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desarguesian(n: u32) -> (FieldCtx, OpSet) {
        let f = FieldCtx::new(2, n, None).unwrap();
        let form = trace_form(&f);
        let mut ops = Vec::new();
        let mut labels = Vec::new();
        for a in f.elements() {
            let a2 = f.mul(a, a);
            ops.push(mult_op(&f, a2));
            labels.push(a as u32);
        }
        let set = OpSet::new(SetKind::SpreadSet, form, ops, Some(labels));
        (f, set)
    }

    #[test]
    fn desarguesian_is_a_spread_set() {
        let (_, set) = desarguesian(3);
        verify_spread_set(&set).expect_ok();
        assert!(is_additively_closed(&set));
    }

    #[test]
    fn repeated_member_rejected() {
        let (_, mut set) = desarguesian(3);
        set.ops[1] = set.ops[2].clone();
        let report = verify_spread_set(&set);
        assert!(!report.ok);
    }

    #[test]
    fn canonical_labeling_matches_squares() {
        // C(a) = a^2 x is the canonical labeling of the desarguesian set.
        let (_, set) = desarguesian(5);
        let labels = canonical_labeling(&set).unwrap();
        assert_eq!(&labels, set.labels.as_ref().unwrap());
        // C(0) = 0
        assert_eq!(labels[0], 0);
        assert!(set.ops[0].is_zero());
    }

    #[test]
    fn prequasifield_trace_condition() {
        // Tr(x (x C(a))) = b(x, a)^2 for the canonical labeling.
        let (_, set) = desarguesian(5);
        let labels = set.labels.as_ref().unwrap();
        for (c, &a) in set.ops.iter().zip(labels) {
            for x in 0..32u32 {
                let lhs = set.form.eval(x, c.apply(x));
                let rhs = set.form.eval(x, a); // squaring is identity on F_2
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn shadow_of_desarguesian_is_a_dho_set() {
        let (f, set) = desarguesian(3);
        let sh = shadow(&set).unwrap();
        let (report, kappa) = verify_dho_set(&sh);
        report.expect_ok();
        let kappa = kappa.unwrap();
        // B(0) = 0
        assert!(sh.ops[0].is_zero());
        // explicit formula x B(a) = a^2 x + Tr(xa) a
        for (b, &a) in sh.ops.iter().zip(sh.labels.as_ref().unwrap()) {
            let a2 = f.mul(a as u64, a as u64);
            let expect = linear_op(&f, |x| {
                f.add(f.mul(a2, x), f.mul(f.abs_trace(f.mul(x, a as u64)), a as u64))
            });
            assert_eq!(*b, expect);
        }
        // kappa symmetry
        for i in 0..kappa.m {
            for j in 0..kappa.m {
                assert_eq!(kappa.at(i, j), kappa.at(j, i));
            }
        }
    }

    #[test]
    fn dho_set_rejections() {
        let (_, set) = desarguesian(3);
        let sh = shadow(&set).unwrap();
        // missing element
        let mut short = sh.clone();
        short.ops.pop();
        short.labels.as_mut().unwrap().pop();
        assert!(!verify_dho_set(&short).0.ok);
        // non-alternating perturbation
        let mut bad = sh.clone();
        bad.ops[3] = bad.ops[3].add(&bad.form.rank_one(1, 1));
        assert!(!verify_dho_set(&bad).0.ok);
        // kerdock cardinality rejection
        let zero_only = OpSet::new(SetKind::KerdockSet, BitForm::dot(3), vec![BitMat::zero(3)], None);
        assert!(!verify_kerdock_set(&zero_only).ok);
    }

    #[test]
    fn twist_properties() {
        let (_, set) = desarguesian(5);
        // twist by zero is the identity
        assert!(twist(&set, 0).unwrap().same_ops(&set));
        // twists verify as spread-sets and preserve additive closure
        for u in [1u32, 7, 19, 31] {
            let t = twist(&set, u).unwrap();
            verify_spread_set(&t).expect_ok();
            assert!(is_additively_closed(&t));
            // the attached labeling is canonical for the twist
            let expected = canonical_labeling(&t).unwrap();
            assert_eq!(&expected, t.labels.as_ref().unwrap());
        }
    }

    #[test]
    fn shadow_twist_identity_additively_closed() {
        // B_u(a) = B(a+u) + B(u) for additively closed spread-sets.
        let (_, set) = desarguesian(5);
        let sh = shadow(&set).unwrap();
        for u in 0..32u32 {
            let tw = twist(&set, u).unwrap();
            let sh_u = shadow(&tw).unwrap();
            for a in 0..32u32 {
                let lhs = sh_u.op_by_label(a).unwrap();
                let rhs = sh.op_by_label(a ^ u).unwrap().add(sh.op_by_label(u).unwrap());
                assert_eq!(*lhs, rhs);
            }
        }
    }

    #[test]
    fn invert_shadow_round_trip() {
        let (_, set) = desarguesian(5);
        let sh = shadow(&set).unwrap();
        let back = invert_shadow(&sh).unwrap();
        assert!(back.same_ops(&set));
        let again = shadow(&back).unwrap();
        assert!(again.same_ops(&sh));
    }

    #[test]
    fn dilation_gen_over_f4() {
        let f64 = FieldCtx::new(2, 6, None).unwrap();
        let split = SubfieldSplit::new(&f64, 2).unwrap();
        let set = desarguesian_gen(&f64, &split);
        verify_spread_set_gen(&set).expect_ok();
        assert!(labeling_is_canonical_gen(&set));
        // dilation by each lambda != 1 verifies with canonical labels
        for lambda in [0u64, 2, 3] {
            let d = dilation_gen(&set, lambda).unwrap();
            verify_spread_set_gen(&d).expect_ok();
            assert!(labeling_is_canonical_gen(&d));
        }
        assert!(dilation_gen(&set, 1).is_err());
        // lambda = 0 is the identity on operators
        let d0 = dilation_gen(&set, 0).unwrap();
        assert_eq!(d0.ops, set.ops);
    }

    #[test]
    fn twist_gen_over_f4() {
        let f64 = FieldCtx::new(2, 6, None).unwrap();
        let split = SubfieldSplit::new(&f64, 2).unwrap();
        let set = desarguesian_gen(&f64, &split);
        let u = split.coords(5).to_vec();
        let t = twist_gen(&set, &u).unwrap();
        verify_spread_set_gen(&t).expect_ok();
        assert!(labeling_is_canonical_gen(&t));
    }
}
