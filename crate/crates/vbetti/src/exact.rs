//! Exact integer/rational linear algebra and permutation primitives.
//!
//! Everything here is value-semantic and deterministic: permutations are
//! stored 0-based internally and printed 1-based in cycle notation, matrices
//! use arbitrary-precision integers/rationals, and Smith normal form keeps
//! its unimodular witnesses so tests can re-multiply.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

// ---------------------------------------------------------------------------
// permutations
// ---------------------------------------------------------------------------

/// A bijection of `{0..degree-1}` (printed 1-based).
///
/// Acting on the right: words of permutations are applied left to right.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            images: (0..degree).collect(),
        }
    }

    /// From a 0-based image table; validates bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(Error::InvalidInput(format!(
                    "image table {:?} is not a bijection",
                    images
                )));
            }
            seen[v] = true;
        }
        Ok(Perm { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, p: usize) -> usize {
        self.images[p]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `self` first, then `other`.
    pub fn then(&self, other: &Perm) -> Result<Perm> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                expected: self.degree(),
                got: other.degree(),
            });
        }
        Ok(Perm {
            images: self.images.iter().map(|&s| other.images[s]).collect(),
        })
    }

    pub fn inverse(&self) -> Perm {
        let mut out = vec![0; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            out[v] = i;
        }
        Perm { images: out }
    }

    pub fn pow(&self, e: i64) -> Perm {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Perm::identity(self.degree());
        for _ in 0..e.unsigned_abs() {
            out = out.then(&base).expect("equal degrees");
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Cycle decomposition partitioning all points; fixed points are 1-cycles.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut c = Vec::new();
            let mut t = s;
            while !seen[t] {
                seen[t] = true;
                c.push(t);
                t = self.images[t];
            }
            out.push(c);
        }
        out
    }

    pub fn order(&self) -> u64 {
        self.cycles()
            .iter()
            .fold(1u64, |acc, c| num_integer::lcm(acc, c.len() as u64))
    }

    /// Parses 1-based cycle notation, e.g. `"(1 2 3 4)(5 6)"`.
    /// `"()"`, `"id"` and the empty string denote the identity.
    pub fn parse(s: &str, degree: usize) -> Result<Perm> {
        let s = s.trim();
        let mut p = Perm::identity(degree);
        if s.is_empty() || s == "id" || s == "()" {
            return Ok(p);
        }
        let mut rest = s;
        while !rest.is_empty() {
            rest = rest.trim_start();
            if rest.is_empty() {
                break;
            }
            if !rest.starts_with('(') {
                return Err(Error::Parse(format!(
                    "expected '(' in cycle notation at \"{rest}\""
                )));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced '(' in \"{s}\"")))?;
            let body = &rest[1..close];
            rest = &rest[close + 1..];
            let mut pts = Vec::new();
            for tok in body.split([' ', ',']).filter(|t| !t.is_empty()) {
                let v: usize = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad point \"{tok}\" in \"{s}\"")))?;
                if v == 0 || v > degree {
                    return Err(Error::Parse(format!(
                        "point {v} out of range 1..={degree}"
                    )));
                }
                pts.push(v - 1);
            }
            let mut seen = std::collections::HashSet::new();
            for &v in &pts {
                if !seen.insert(v) {
                    return Err(Error::Parse(format!("repeated point {} in \"{s}\"", v + 1)));
                }
            }
            let cyc = Perm::from_cycle(degree, &pts)?;
            p = p.then(&cyc)?;
        }
        Ok(p)
    }

    /// Single cycle on the given 0-based points.
    pub fn from_cycle(degree: usize, pts: &[usize]) -> Result<Perm> {
        let mut images: Vec<usize> = (0..degree).collect();
        for (i, &v) in pts.iter().enumerate() {
            if v >= degree {
                return Err(Error::InvalidInput(format!("point {v} out of range")));
            }
            images[v] = pts[(i + 1) % pts.len()];
        }
        Perm::from_images(images)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nontrivial: Vec<Vec<usize>> = self
            .cycles()
            .into_iter()
            .filter(|c| c.len() > 1)
            .collect();
        if nontrivial.is_empty() {
            return write!(f, "()");
        }
        for c in nontrivial {
            write!(f, "(")?;
            for (i, v) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", v + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// `perm_cycles` as 1-based point lists (display-level counterpart of
/// [`Perm::cycles`]).
pub fn perm_cycles(p: &Perm) -> Vec<Vec<usize>> {
    p.cycles()
        .into_iter()
        .map(|c| c.into_iter().map(|v| v + 1).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// integer matrices and Smith normal form
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> IntMatrix {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> IntMatrix {
        let mut m = IntMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> IntMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = IntMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, BigInt::from(v));
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.get(k, j);
                    let cur = out.get(i, j) + add;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn to_rat(&self) -> RatMatrix {
        let mut out = RatMatrix::zero(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, Rat::from_integer(self.get(i, j).clone()));
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row_i -= q * row_j
    fn row_sub(&mut self, i: usize, j: usize, q: &BigInt) {
        for c in 0..self.cols {
            let v = self.get(i, c) - q * self.get(j, c);
            self.set(i, c, v);
        }
    }

    /// col_i -= q * col_j
    fn col_sub(&mut self, i: usize, j: usize, q: &BigInt) {
        for r in 0..self.rows {
            let v = self.get(r, i) - q * self.get(r, j);
            self.set(r, i, v);
        }
    }

    /// row_i += row_j
    fn row_add(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            let v = self.get(i, c) + self.get(j, c);
            self.set(i, c, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for c in 0..self.cols {
            let v = -self.get(i, c);
            self.set(i, c, v);
        }
    }

    /// Determinant by fraction-free rational elimination (test support for
    /// unimodularity of Smith witnesses).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.to_rat();
        let mut det = Rat::one();
        for c in 0..n {
            let piv = (c..n).find(|&r| !m.get(r, c).is_zero());
            let Some(piv) = piv else {
                return BigInt::zero();
            };
            if piv != c {
                m.swap_rows(piv, c);
                det = -det;
            }
            let pv = m.get(c, c).clone();
            det *= pv.clone();
            for r in c + 1..n {
                if m.get(r, c).is_zero() {
                    continue;
                }
                let f = m.get(r, c) / &pv;
                for k in c..n {
                    let v = m.get(r, k) - &f * m.get(c, k);
                    m.set(r, k, v);
                }
            }
        }
        assert!(det.is_integer());
        det.to_integer()
    }
}

/// Smith normal form `U * M * V = D` with unimodular witnesses.
#[derive(Clone, Debug)]
pub struct Snf {
    /// Non-negative diagonal with d1 | d2 | ... (trailing zeros included up to
    /// min(rows, cols)).
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

pub fn smith_normal_form(m0: &IntMatrix) -> Snf {
    let (r, c) = (m0.rows, m0.cols);
    let mut m = m0.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut t = 0;
    let lim = r.min(c);
    while t < lim {
        // smallest-magnitude nonzero pivot in the trailing submatrix
        let mut piv: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                if !m.get(i, j).is_zero()
                    && piv
                        .map(|(pi, pj)| m.get(i, j).abs() < m.get(pi, pj).abs())
                        .unwrap_or(true)
                {
                    piv = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        m.swap_rows(t, pi);
        u.swap_rows(t, pi);
        m.swap_cols(t, pj);
        v.swap_cols(t, pj);

        let mut dirty = false;
        for i in t + 1..r {
            if !m.get(i, t).is_zero() {
                let q = m.get(i, t) / m.get(t, t);
                if !q.is_zero() {
                    m.row_sub(i, t, &q);
                    u.row_sub(i, t, &q);
                }
                if !m.get(i, t).is_zero() {
                    dirty = true;
                }
            }
        }
        for j in t + 1..c {
            if !m.get(t, j).is_zero() {
                let q = m.get(t, j) / m.get(t, t);
                if !q.is_zero() {
                    m.col_sub(j, t, &q);
                    v.col_sub(j, t, &q);
                }
                if !m.get(t, j).is_zero() {
                    dirty = true;
                }
            }
        }
        if dirty {
            continue; // re-pivot on a smaller entry
        }
        // enforce divisibility of the remaining submatrix by the pivot
        let pivval = m.get(t, t).clone();
        let mut fixed = false;
        'scan: for i in t + 1..r {
            for j in t + 1..c {
                if !(m.get(i, j) % &pivval).is_zero() {
                    m.row_add(t, i);
                    u.row_add(t, i);
                    fixed = true;
                    break 'scan;
                }
            }
        }
        if fixed {
            continue;
        }
        if m.get(t, t).is_negative() {
            m.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let mut diagonal = Vec::with_capacity(lim);
    for i in 0..lim {
        diagonal.push(m.get(i, i).clone());
    }
    let rank = diagonal.iter().filter(|d| !d.is_zero()).count();
    Snf {
        diagonal,
        rank,
        u,
        v,
    }
}

// ---------------------------------------------------------------------------
// rational matrices
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> RatMatrix {
        RatMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> RatMatrix {
        let mut m = RatMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Rat>]) -> RatMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = RatMatrix::zero(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Rat> {
        (0..self.cols).map(|j| self.get(i, j).clone()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = RatMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = a * other.get(k, j);
                    let cur = out.get(i, j) + add;
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| !self.get(i, j).is_zero())
                    .map(|j| self.get(i, j) * &v[j])
                    .sum()
            })
            .collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut out = RatMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = out.get(i, j) - other.get(i, j);
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon().1.len()
    }

    /// Reduced row echelon form; returns (echelon matrix, pivot columns).
    pub fn echelon(mut self) -> (RatMatrix, Vec<usize>) {
        let mut pivcols = Vec::new();
        let mut pr = 0;
        for c in 0..self.cols {
            if pr == self.rows {
                break;
            }
            let Some(piv) = (pr..self.rows).find(|&r| !self.get(r, c).is_zero()) else {
                continue;
            };
            self.swap_rows(pr, piv);
            let pv = self.get(pr, c).clone();
            for j in 0..self.cols {
                let v = self.get(pr, j) / &pv;
                self.set(pr, j, v);
            }
            for r in 0..self.rows {
                if r != pr && !self.get(r, c).is_zero() {
                    let f = self.get(r, c).clone();
                    for j in 0..self.cols {
                        let v = self.get(r, j) - &f * self.get(pr, j);
                        self.set(r, j, v);
                    }
                }
            }
            pivcols.push(c);
            pr += 1;
        }
        (self, pivcols)
    }

    /// Basis of the right kernel.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let (ech, pivcols) = self.clone().echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivcols.contains(c)).collect();
        let mut out = Vec::new();
        for &fc in &free {
            let mut v = vec![Rat::zero(); self.cols];
            v[fc] = Rat::one();
            for (i, &pc) in pivcols.iter().enumerate() {
                v[pc] = -ech.get(i, fc).clone();
            }
            out.push(v);
        }
        out
    }

    /// Vertically stacks matrices with equal column counts.
    pub fn stack(mats: &[&RatMatrix]) -> RatMatrix {
        let cols = mats[0].cols;
        let rows = mats.iter().map(|m| m.rows).sum();
        let mut out = RatMatrix::zero(rows, cols);
        let mut r0 = 0;
        for m in mats {
            assert_eq!(m.cols, cols);
            for i in 0..m.rows {
                for j in 0..cols {
                    out.set(r0 + i, j, m.get(i, j).clone());
                }
            }
            r0 += m.rows;
        }
        out
    }
}

/// Basis of `ker(A - I)` for a square rational matrix.
pub fn fixed_subspace(a: &RatMatrix) -> Result<Vec<Vec<Rat>>> {
    if a.rows != a.cols {
        return Err(Error::NonSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    Ok(a.sub(&RatMatrix::identity(a.rows)).kernel_basis())
}

// ---------------------------------------------------------------------------
// finite group tables
// ---------------------------------------------------------------------------

/// A finite group as labels plus a full multiplication table.
#[derive(Clone, Debug)]
pub struct FiniteGroupTable {
    labels: Vec<String>,
    mult: Vec<u32>, // flat n*n, mult[i*n+j] = index of labels[i]*labels[j]
    identity: usize,
}

impl FiniteGroupTable {
    /// Validates identity/inverse laws for all elements and associativity on
    /// a deterministic sample of triples (all triples for small groups).
    pub fn new(labels: Vec<String>, mult: Vec<u32>, identity: usize) -> Result<FiniteGroupTable> {
        let n = labels.len();
        if mult.len() != n * n || identity >= n {
            return Err(Error::InvalidInput(
                "multiplication table has wrong shape".into(),
            ));
        }
        for &v in &mult {
            if v as usize >= n {
                return Err(Error::InvalidInput("table entry out of range".into()));
            }
        }
        let g = FiniteGroupTable {
            labels,
            mult,
            identity,
        };
        for i in 0..n {
            if g.mul(g.identity, i) != i || g.mul(i, g.identity) != i {
                return Err(Error::InvalidInput(format!(
                    "identity law fails at element {i}"
                )));
            }
            if !(0..n).any(|j| g.mul(i, j) == g.identity && g.mul(j, i) == g.identity) {
                return Err(Error::InvalidInput(format!("element {i} has no inverse")));
            }
        }
        // associativity: exhaustive for small groups, sampled deterministically
        // beyond that
        if n <= 32 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)) {
                            return Err(Error::InvalidInput(format!(
                                "associativity fails at ({a},{b},{c})"
                            )));
                        }
                    }
                }
            }
        } else {
            let mut s: u64 = 0x9e3779b97f4a7c15;
            for _ in 0..(64 * n) {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let a = (s >> 33) as usize % n;
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let b = (s >> 33) as usize % n;
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let c = (s >> 33) as usize % n;
                if g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)) {
                    return Err(Error::InvalidInput(format!(
                        "associativity fails at ({a},{b},{c})"
                    )));
                }
            }
        }
        Ok(g)
    }

    pub fn cyclic(n: usize) -> FiniteGroupTable {
        let labels = (0..n).map(|i| format!("g^{i}")).collect();
        let mut mult = vec![0u32; n * n];
        for i in 0..n {
            for j in 0..n {
                mult[i * n + j] = ((i + j) % n) as u32;
            }
        }
        FiniteGroupTable::new(labels, mult, 0).expect("cyclic group is a group")
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::InvalidInput(format!("unknown element label \"{label}\"")))
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order() + b] as usize
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order())
            .find(|&b| self.mul(a, b) == self.identity)
            .expect("validated group has inverses")
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut x = a;
        let mut k = 1u64;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }
}

/// Left translation by `g` as a permutation of the element indices.
pub fn left_regular_representation(g: &FiniteGroupTable, elt: usize) -> Result<Perm> {
    if elt >= g.order() {
        return Err(Error::InvalidInput(format!(
            "element index {elt} out of range for group of order {}",
            g.order()
        )));
    }
    Perm::from_images((0..g.order()).map(|h| g.mul(elt, h)).collect())
}
