//! Subspace-level geometry: spreads, orthogonal spreads and DHOs as
//! families of subspaces, the graph coordinatization `V(L) = {(x, xL)}`,
//! and the lift/projection constructions connecting symplectic spreads in
//! `V(2n, q)` with orthogonal spreads in `V+(2n+2, q)` and orthogonal DHOs
//! in `V+(2n, 2)`.
//!
//! The `q > 2` constructions (qDHOs) live in [`qdho`].

pub mod qdho;

use crate::exec;
use crate::forms::{ext_form, FormsError, QuadBit, QuotientBit, SympBit};
use crate::linalg::{BitForm, BitMat, BitSubspace};
use crate::opsets::{shadow, OpSet, OpSetError, SetKind};
use crate::report::VerifyReport;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("{0}")]
    Forms(#[from] FormsError),
    #[error("{0}")]
    OpSet(#[from] OpSetError),
    #[error("point {0:#x} lies in {1} members, need exactly one")]
    PointCoverage(u32, usize),
    #[error("chosen X and Y are not complementary (intersection dim {0})")]
    NotComplementary(usize),
    #[error("projection vector must satisfy b(w, w) = 1")]
    BadProjector,
    #[error("member index {0} out of range")]
    BadIndex(usize),
    #[error("operation needs {0}")]
    Unsupported(&'static str),
    #[error("quotient subspace meets the span of members #{0} and #{1}")]
    QdhoQuotientBlocked(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Spread,
    OrthogonalSpread,
    Dho,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::Spread => "spread",
            FamilyKind::OrthogonalSpread => "orthogonal spread",
            FamilyKind::Dho => "dho",
        }
    }
}

/// Ambient space of a family: quadratic when a `Q` is available, symplectic
/// otherwise (projections at nonsingular points lose the quadratic form).
#[derive(Clone, Debug)]
pub enum Ambient {
    Quadratic(QuadBit),
    Symplectic(SympBit),
}

impl Ambient {
    pub fn dim(&self) -> usize {
        match self {
            Ambient::Quadratic(s) => s.dim(),
            Ambient::Symplectic(s) => s.dim(),
        }
    }

    pub fn pairing(&self, u: u32, v: u32) -> u32 {
        match self {
            Ambient::Quadratic(s) => s.pairing(u, v),
            Ambient::Symplectic(s) => s.pairing(u, v),
        }
    }

    pub fn quad(&self) -> Option<&QuadBit> {
        match self {
            Ambient::Quadratic(s) => Some(s),
            Ambient::Symplectic(_) => None,
        }
    }
}

/// A family of equal-dimensional subspaces with an optional distinguished
/// splitting space. Members are kept sorted, so equal families compare equal.
#[derive(Clone, Debug)]
pub struct Family {
    pub kind: FamilyKind,
    pub ambient: Ambient,
    pub members: Vec<BitSubspace>,
    pub split_y: Option<BitSubspace>,
}

impl Family {
    pub fn new(kind: FamilyKind, ambient: Ambient, mut members: Vec<BitSubspace>, split_y: Option<BitSubspace>) -> Family {
        members.sort();
        Family { kind, ambient, members, split_y }
    }

    pub fn member_dim(&self) -> usize {
        self.members.first().map(|m| m.dim()).unwrap_or(0)
    }

    pub fn find_member(&self, s: &BitSubspace) -> Option<usize> {
        self.members.binary_search(s).ok()
    }

    pub fn same_members(&self, other: &Family) -> bool {
        self.members == other.members
    }
}

// ---------------------------------------------------------------------------
// Operator set <-> subspace family

/// `{V(L)} (+ Y)`: the graphs of the operators inside `U + U` with the
/// standard forms; `Y = 0 + U` joins the family for spread kinds and is
/// recorded as the splitting space for DHO-sets.
pub fn subspaces_from_opset(set: &OpSet) -> Family {
    let n = set.n();
    let dim = 2 * n;
    let members: Vec<BitSubspace> = set
        .ops
        .iter()
        .map(|l| BitSubspace::from_rows(dim, (0..n).map(|i| (1u32 << i) | (l.row(i) << n)).collect()))
        .collect();
    let y = BitSubspace::from_rows(dim, (0..n).map(|i| 1u32 << (n + i)).collect());
    let space = QuadBit::uu(&set.form);
    match set.kind {
        SetKind::SpreadSet => {
            let mut m = members;
            m.push(y);
            Family::new(FamilyKind::Spread, Ambient::Quadratic(space), m, None)
        }
        SetKind::KerdockSet => {
            let mut m = members;
            m.push(y);
            Family::new(FamilyKind::OrthogonalSpread, Ambient::Quadratic(space), m, None)
        }
        SetKind::DhoSet => Family::new(FamilyKind::Dho, Ambient::Quadratic(space), members, Some(y)),
    }
}

/// Which subspace plays the role of `Y = 0 + U` in a coordinatization.
#[derive(Debug, Clone, Copy)]
pub enum YChoice {
    Member(usize),
    Split,
}

/// Coordinatizes a family with respect to an ordered pair `(X, Y)`: a basis
/// change carries `X` to `U + 0` and `Y` to `0 + U` while matching the
/// standard forms, and every other member becomes a graph `V(L)`. The
/// resulting operator set lives over the dot-product Gram (the hyperbolic
/// basis absorbs the original one).
pub fn extract_opset(family: &Family, x_idx: usize, y_choice: YChoice) -> Result<OpSet, GeomError> {
    let x = family.members.get(x_idx).ok_or(GeomError::BadIndex(x_idx))?;
    let y = match y_choice {
        YChoice::Member(i) => family.members.get(i).ok_or(GeomError::BadIndex(i))?.clone(),
        YChoice::Split => family.split_y.clone().ok_or(GeomError::Unsupported("a splitting space"))?,
    };
    let n = x.dim();
    let dim = family.ambient.dim();
    assert_eq!(dim, 2 * n, "coordinatization needs half-dimensional members");
    let inter = x.intersect(&y);
    if inter.dim() != 0 {
        return Err(GeomError::NotComplementary(inter.dim()));
    }

    // Hyperbolic dual basis: y_i in Y with (x_j, y_i) = delta_ij.
    let xb: Vec<u32> = x.rows().to_vec();
    let yb: Vec<u32> = y.rows().to_vec();
    let pair_mat = BitMat::from_fn(n, |e| {
        let k = e.trailing_zeros() as usize;
        let mut row = 0u32;
        for (j, &xj) in xb.iter().enumerate() {
            row |= family.ambient.pairing(xj, yb[k]) << j;
        }
        row
    });
    // pair_mat row k = (pairing(x_j, z_k))_j; invertible since X x Y pairing
    // is nondegenerate when X + Y = V.
    let pinv = pair_mat.inverse().ok_or(GeomError::NotComplementary(0))?;
    let dual: Vec<u32> = (0..n)
        .map(|i| {
            // y_i = sum_k c_k z_k with c = e_i * P^{-1}
            let c = pinv.apply(1 << i);
            let mut v = 0;
            for (k, &zk) in yb.iter().enumerate() {
                if c >> k & 1 == 1 {
                    v ^= zk;
                }
            }
            v
        })
        .collect();
    // In the new coordinates the pairing is the standard one and, for
    // totally singular X and Y, the quadratic form is Q((a,b)) = a.b.
    let mut basis_rows: Vec<u32> = xb.clone();
    basis_rows.extend(dual.iter().copied());
    let basis = FullBasis::new(dim, basis_rows);

    let mut ops = Vec::with_capacity(family.members.len());
    for (idx, z) in family.members.iter().enumerate() {
        if let YChoice::Member(yi) = y_choice {
            if idx == yi {
                continue;
            }
        }
        let coords: Vec<u32> = z.rows().iter().map(|&r| basis.coords(r)).collect();
        // rows (A | B) with A invertible; L = A^{-1} B
        let a = BitMat::from_fn(n, |e| {
            let i = e.trailing_zeros() as usize;
            coords[i] & crate::linalg::bit_mask(n)
        });
        let b = BitMat::from_fn(n, |e| {
            let i = e.trailing_zeros() as usize;
            coords[i] >> n
        });
        let ainv = a.inverse().ok_or(GeomError::NotComplementary(0))?;
        ops.push(ainv.mul(&b));
    }
    let kind = match family.kind {
        FamilyKind::Spread => SetKind::SpreadSet,
        FamilyKind::OrthogonalSpread => SetKind::KerdockSet,
        FamilyKind::Dho => SetKind::DhoSet,
    };
    Ok(OpSet::new(kind, BitForm::dot(n), ops, None))
}

/// Invertible coordinate change onto a chosen row basis.
struct FullBasis {
    inv: BitMat,
}

impl FullBasis {
    fn new(dim: usize, rows: Vec<u32>) -> FullBasis {
        let b = BitMat::from_rows(dim, rows);
        FullBasis { inv: b.inverse().expect("basis rows are independent") }
    }

    fn coords(&self, v: u32) -> u32 {
        self.inv.apply(v)
    }
}

// ---------------------------------------------------------------------------
// Family verification

/// Spread: `2^d + 1` members of dimension `d` in a `2d`-dimensional space,
/// pairwise trivial intersections (the count then forces a partition of the
/// nonzero vectors), totally isotropic when the family claims symplecticity.
pub fn verify_spread(family: &Family) -> VerifyReport {
    let mut report = VerifyReport::new("spread");
    let dim = family.ambient.dim();
    let d = family.member_dim();
    if dim != 2 * d {
        return report.fail(format!("member dimension {d} in ambient dimension {dim}"));
    }
    let want = (1usize << d) + 1;
    if family.members.len() != want {
        return report.fail(format!("{} members, want {want}", family.members.len()));
    }
    if family.members.iter().any(|m| m.dim() != d) {
        return report.fail("members of unequal dimension".to_string());
    }
    report.check(format!("2^{d}+1 members of dimension {d}"));
    if let Some((i, _)) = exec::first_violation(family.members.len(), |i| {
        (!family.ambient.pairing_isotropic(&family.members[i])).then(String::new)
    }) {
        return report.fail(format!("member #{i} is not totally isotropic"));
    }
    report.check("members totally isotropic".to_string());
    if let Some(msg) = pairwise_trivial(family) {
        return report.fail(msg);
    }
    report.check("pairwise intersections trivial; counting forces the partition".to_string());
    report
}

/// Orthogonal spread: `2^(d-1) + 1` totally singular `d`-spaces in
/// `V+(2d, 2)` with trivial pairwise meets; the singular-vector count then
/// forces the partition, and small spaces are additionally swept directly.
pub fn verify_orthogonal_spread(family: &Family) -> VerifyReport {
    let mut report = VerifyReport::new("orthogonal spread");
    let space = match family.ambient.quad() {
        Some(s) => s,
        None => return report.fail("ambient has no quadratic form".to_string()),
    };
    let dim = family.ambient.dim();
    let d = family.member_dim();
    if dim != 2 * d {
        return report.fail(format!("member dimension {d} in ambient dimension {dim}"));
    }
    let want = (1usize << (d - 1)) + 1;
    if family.members.len() != want {
        return report.fail(format!("{} members, want {want}", family.members.len()));
    }
    report.check(format!("2^{}+1 members of dimension {d}", d - 1));
    if let Some((i, _)) = exec::first_violation(family.members.len(), |i| {
        (!space.is_totally_singular(&family.members[i])).then(String::new)
    }) {
        return report.fail(format!("member #{i} is not totally singular"));
    }
    report.check("members totally singular".to_string());
    if let Some(msg) = pairwise_trivial(family) {
        return report.fail(msg);
    }
    let covered = family.members.len() as u64 * ((1u64 << d) - 1);
    let singular = QuadBit::plus_type_singular_count(dim, 2) - 1;
    if covered != singular {
        return report.fail(format!("members cover {covered} nonzero vectors, {singular} singular ones exist"));
    }
    report.check(format!("disjoint members cover all {singular} nonzero singular vectors"));
    if dim <= 14 {
        for v in space.singular_vectors() {
            if v == 0 {
                continue;
            }
            let k = family.members.iter().filter(|m| m.contains(v)).count();
            if k != 1 {
                return report.fail(format!("singular vector {v:#x} lies in {k} members"));
            }
        }
        report.check("partition confirmed by direct enumeration".to_string());
    }
    report
}

/// Orthogonal DHO that splits over a totally singular `Y`: `2^d` totally
/// singular members, pairwise meets of dimension 1, no point on three
/// members, the family spans, and every member is complementary to `Y`.
pub fn verify_dho(family: &Family) -> VerifyReport {
    let mut report = VerifyReport::new("orthogonal dho");
    let space = match family.ambient.quad() {
        Some(s) => s,
        None => return report.fail("ambient has no quadratic form".to_string()),
    };
    let dim = family.ambient.dim();
    let d = family.member_dim();
    if dim != 2 * d {
        return report.fail(format!("member dimension {d} in ambient dimension {dim}"));
    }
    if d % 2 == 0 {
        return report.fail(format!("rank {d} is even; orthogonal DHOs require odd rank"));
    }
    if family.members.len() != 1 << d {
        return report.fail(format!("{} members, want 2^{d}", family.members.len()));
    }
    report.check(format!("2^{d} members of rank {d}"));
    if let Some((i, _)) = exec::first_violation(family.members.len(), |i| {
        (!space.is_totally_singular(&family.members[i])).then(String::new)
    }) {
        return report.fail(format!("member #{i} is not totally singular"));
    }
    report.check("members totally singular".to_string());

    let m = family.members.len();
    if let Some((idx, _)) = exec::first_violation(m * m, |idx| {
        let (i, j) = (idx / m, idx % m);
        (i < j && family.members[i].intersect(&family.members[j]).dim() != 1).then(String::new)
    }) {
        let (i, j) = (idx / m, idx % m);
        return report.fail(format!(
            "members #{i} and #{j} meet in dimension {}",
            family.members[i].intersect(&family.members[j]).dim()
        ));
    }
    report.check("pairwise intersections one-dimensional".to_string());

    // No vector on three members: count (<= 2 suffices, the pair count then
    // forces exactly 2 on every covered point).
    let mut hits = vec![0u8; 1 << dim];
    for member in &family.members {
        for v in member.vectors() {
            if v != 0 {
                let h = &mut hits[v as usize];
                *h += 1;
                if *h > 2 {
                    return report.fail(format!("vector {v:#x} lies on three members"));
                }
            }
        }
    }
    report.check("no vector on three members".to_string());

    let span = family.members.iter().fold(BitSubspace::zero(dim), |acc, m| acc.sum(m));
    if span.dim() != dim {
        return report.fail(format!("family spans only {} of {dim} dimensions", span.dim()));
    }
    report.check("family spans the ambient space".to_string());

    if let Some(y) = &family.split_y {
        if !space.is_totally_singular(y) || y.dim() != d {
            return report.fail("splitting space is not a totally singular half".to_string());
        }
        if let Some(bad) = family.members.iter().position(|m| m.intersect(y).dim() != 0) {
            return report.fail(format!("member #{bad} meets the splitting space"));
        }
        report.check("family splits over Y".to_string());
    }
    report
}

fn pairwise_trivial(family: &Family) -> Option<String> {
    let m = family.members.len();
    exec::first_violation(m * m, |idx| {
        let (i, j) = (idx / m, idx % m);
        (i < j && family.members[i].intersect(&family.members[j]).dim() != 0).then(String::new)
    })
    .map(|(idx, _)| {
        let (i, j) = (idx / m, idx % m);
        format!("members #{i} and #{j} intersect nontrivially")
    })
}

impl Ambient {
    fn pairing_isotropic(&self, s: &BitSubspace) -> bool {
        match self {
            Ambient::Quadratic(q) => q.is_totally_isotropic(s),
            Ambient::Symplectic(sp) => sp.is_totally_isotropic(s),
        }
    }
}

// ---------------------------------------------------------------------------
// Lifts and projections

/// Lift of a labeled symplectic spread-set to an orthogonal spread of the
/// extended space: the Kerdock set `{D(a)}` on `F_2 + U` with
/// `(alpha, x) D(a) = (b(x,a), alpha a + x B(a))`, `B(a) = C(a) + E_{a,a}`.
pub fn lift(set: &OpSet) -> Result<(OpSet, Family), GeomError> {
    let set = crate::opsets::with_canonical_labels(set)?;
    let labels = set.labels.as_ref().unwrap().clone();
    let n = set.n();
    let shadow_set = shadow(&set)?;
    let mut dops = Vec::with_capacity(set.len());
    for (b_op, &a) in shadow_set.ops.iter().zip(&labels) {
        let mut rows = Vec::with_capacity(n + 1);
        rows.push(a << 1); // (1, 0) -> (0, a)
        for i in 0..n {
            let first = set.form.eval(1 << i, a);
            rows.push(first | (b_op.row(i) << 1));
        }
        dops.push(BitMat::from_rows(n + 1, rows));
    }
    let kerdock = OpSet::new(SetKind::KerdockSet, ext_form(&set.form), dops, Some(labels));
    let family = subspaces_from_opset(&kerdock);
    Ok((kerdock, family))
}

/// Symplectic spread-set of `O/N` for `N = <(w, w)>` with `b(w, w) = 1`:
/// `{L pi + E_{wL, wL}}` restricted to `<w>^perp`.
pub fn kerdock_project_n(kset: &OpSet, w: u32) -> Result<OpSet, GeomError> {
    let (basis, gram) = perp_basis(&kset.form, w)?;
    let n = basis.len();
    let mut ops = Vec::with_capacity(kset.len());
    for l in &kset.ops {
        let wl = l.apply(w);
        let rows: Vec<u32> = basis
            .iter()
            .map(|&u| {
                let img = project_off(&kset.form, w, l.apply(u));
                let e_term = if kset.form.eval(u, wl) == 1 { project_off(&kset.form, w, wl) } else { 0 };
                in_basis_coords(&basis, img ^ e_term)
            })
            .collect();
        ops.push(BitMat::from_rows(n, rows));
    }
    Ok(OpSet::new(SetKind::SpreadSet, gram, ops, None))
}

/// DHO-set of `O/P` for `P = <(0, w)>` with `b(w, w) = 1`: `{L pi}`
/// restricted to `<w>^perp`.
pub fn kerdock_project_p(kset: &OpSet, w: u32) -> Result<OpSet, GeomError> {
    let (basis, gram) = perp_basis(&kset.form, w)?;
    let n = basis.len();
    let mut ops = Vec::with_capacity(kset.len());
    for l in &kset.ops {
        let rows: Vec<u32> = basis
            .iter()
            .map(|&u| in_basis_coords(&basis, project_off(&kset.form, w, l.apply(u))))
            .collect();
        ops.push(BitMat::from_rows(n, rows));
    }
    Ok(OpSet::new(SetKind::DhoSet, gram, ops, None))
}

/// RREF basis of `<w>^perp` and the restricted Gram, requiring `b(w,w) = 1`
/// so that the orthogonal projection along `w` exists.
fn perp_basis(form: &BitForm, w: u32) -> Result<(Vec<u32>, BitForm), GeomError> {
    if form.eval(w, w) != 1 {
        return Err(GeomError::BadProjector);
    }
    let nn = form.n();
    let constraint = form.gram().apply(w);
    let m = BitMat::from_fn(nn, |e| (e & constraint).count_ones() & 1);
    let perp = m.kernel();
    let basis: Vec<u32> = perp.rows().to_vec();
    let n = basis.len();
    let gram = BitMat::from_fn(n, |e| {
        let i = e.trailing_zeros() as usize;
        let mut row = 0;
        for (j, &bj) in basis.iter().enumerate() {
            row |= form.eval(basis[i], bj) << j;
        }
        row
    });
    Ok((basis, BitForm::new(gram).expect("restriction of a nondegenerate form to a nonsingular complement")))
}

#[inline]
fn project_off(form: &BitForm, w: u32, v: u32) -> u32 {
    if form.eval(v, w) == 1 {
        v ^ w
    } else {
        v
    }
}

/// Coordinates of a vector lying in the span of an RREF basis.
#[inline]
fn in_basis_coords(basis: &[u32], v: u32) -> u32 {
    let mut out = 0;
    for (i, &b) in basis.iter().enumerate() {
        out |= ((v >> b.trailing_zeros()) & 1) << i;
    }
    out
}

/// Theorem-level projection of an orthogonal spread at a singular point `P`:
/// the DHO `{<X n P^perp, P> / P}` in `P^perp / P`, splitting over `Y/P`
/// where `Y` is the unique member through `P`.
pub fn project_singular(family: &Family, w: u32) -> Result<(Family, QuotientBit), GeomError> {
    let space = family.ambient.quad().ok_or(GeomError::Unsupported("a quadratic ambient"))?;
    let holders: Vec<usize> =
        (0..family.members.len()).filter(|&i| family.members[i].contains(w)).collect();
    if holders.len() != 1 {
        return Err(GeomError::PointCoverage(w, holders.len()));
    }
    let y_idx = holders[0];
    let (small, quot) = space.quotient_singular(w)?;
    let members: Vec<BitSubspace> = family
        .members
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != y_idx)
        .map(|(_, x)| quot.push_space(space, x))
        .collect();
    let split = quot.push_space(space, &family.members[y_idx]);
    Ok((Family::new(FamilyKind::Dho, Ambient::Quadratic(small), members, Some(split)), quot))
}

/// Projection at a nonsingular point `N`: the symplectic spread
/// `{<X n N^perp, N> / N}` of `N^perp / N`.
pub fn project_nonsingular(family: &Family, w: u32) -> Result<(Family, QuotientBit), GeomError> {
    let space = family.ambient.quad().ok_or(GeomError::Unsupported("a quadratic ambient"))?;
    let (symp, quot) = space.quotient_nonsingular(w)?;
    let members: Vec<BitSubspace> = family
        .members
        .iter()
        .map(|x| {
            let inner = x.intersect(&space.perp_point(w));
            let mut rows: Vec<u32> =
                inner.rows().iter().map(|&r| quot.push_vec(r).expect("rows lie in w^perp")).collect();
            rows.push(0); // w itself maps to zero; harmless
            BitSubspace::from_rows(quot.dim, rows)
        })
        .collect();
    Ok((Family::new(FamilyKind::Spread, Ambient::Symplectic(symp), members, None), quot))
}
