//! Rational homology of covers, the induced action of lifted monodromies,
//! boundary-killed (orbifold) homology, the Betti-number formula for mapping
//! tori, the independent HNN-presentation oracle, and the fixed-pair search
//! on grid covers.
//!
//! `b1` of the mapping torus of a lifted monodromy over the orbifold closure
//! is `1 + dim fix` of the action on `H1(cover;Q) / <boundary classes>`
//! (dimension `2 genus`).

use crate::cover::{
    chain_intersection_number, intersection_number, verify_lift, CoverLoop, GridCover, PermCover,
    Step,
};
use crate::error::{Error, Result};
use crate::exact::{fixed_subspace, Rat, RatMatrix};
use crate::fpgroup::{FPGroup, FreeAut, FreeWord};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::cell::OnceCell;

/// Dimension of the fixed subspace of a square rational matrix.
pub fn fixed_dim(a: &RatMatrix) -> usize {
    fixed_subspace(a).expect("square matrix").len()
}

// ---------------------------------------------------------------------------
// H1 basis and the boundary-killed quotient
// ---------------------------------------------------------------------------

/// The fundamental-cycle basis of `H1(cover;Q)` together with the echelonized
/// span of boundary classes and a fixed complement (free columns) giving
/// coordinates on the quotient `H1(O;Q)`.
pub struct H1Basis<'a> {
    cover: &'a PermCover,
    dim: usize,
    echelon: Vec<Vec<Rat>>,
    pivot_cols: Vec<usize>,
    free_cols: Vec<usize>,
    killed_form: OnceCell<RatMatrix>,
}

impl<'a> H1Basis<'a> {
    pub fn new(cover: &'a PermCover) -> H1Basis<'a> {
        let dim = cover.h1_dim();
        let mut boundary_rows: Vec<Vec<Rat>> = Vec::new();
        for lift in cover.boundary_lifts() {
            let lp = cover.puncture_loop(lift);
            boundary_rows.push(
                cover
                    .cycle_coords(lp.steps())
                    .into_iter()
                    .map(|v| Rat::from_integer(BigInt::from(v)))
                    .collect(),
            );
        }
        let (ech, pivot_cols) = RatMatrix::from_rows(&boundary_rows).echelon();
        let echelon: Vec<Vec<Rat>> = (0..pivot_cols.len()).map(|i| ech.row(i)).collect();
        let free_cols: Vec<usize> = (0..dim).filter(|c| !pivot_cols.contains(c)).collect();
        H1Basis {
            cover,
            dim,
            echelon,
            pivot_cols,
            free_cols,
            killed_form: OnceCell::new(),
        }
    }

    pub fn cover(&self) -> &PermCover {
        self.cover
    }

    /// Dimension of H1 of the cover.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rank of the span of boundary classes (= punctures - 1 on a connected
    /// cover).
    pub fn boundary_rank(&self) -> usize {
        self.pivot_cols.len()
    }

    /// Dimension of the boundary-killed quotient; equals `2 genus`.
    pub fn killed_dim(&self) -> usize {
        self.free_cols.len()
    }

    /// Image of a full H1 vector in quotient coordinates. A vector reduces
    /// to zero iff it lies in the span of the boundary classes.
    pub fn reduce(&self, v: &[Rat]) -> Vec<Rat> {
        let mut v = v.to_vec();
        for (i, &pc) in self.pivot_cols.iter().enumerate() {
            if !v[pc].is_zero() {
                let f = v[pc].clone();
                for (x, e) in v.iter_mut().zip(&self.echelon[i]) {
                    *x -= &f * e;
                }
            }
        }
        self.free_cols.iter().map(|&c| v[c].clone()).collect()
    }

    /// The canonical representative with the given quotient coordinates
    /// (free columns set, pivot columns zero).
    pub fn lift_coords(&self, q: &[Rat]) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); self.dim];
        for (&c, x) in self.free_cols.iter().zip(q) {
            v[c] = x.clone();
        }
        v
    }

    /// Quotient class of a closed loop.
    pub fn loop_class(&self, lp: &CoverLoop) -> Vec<Rat> {
        let full: Vec<Rat> = self
            .cover
            .cycle_coords(lp.steps())
            .into_iter()
            .map(|v| Rat::from_integer(BigInt::from(v)))
            .collect();
        self.reduce(&full)
    }

    /// Quotient class of a 1-chain (sum of loops).
    pub fn chain_class(&self, chain: &[CoverLoop]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.killed_dim()];
        for lp in chain {
            for (o, v) in out.iter_mut().zip(self.loop_class(lp)) {
                *o += v;
            }
        }
        out
    }

    /// The intersection form on quotient coordinates (exact, antisymmetric,
    /// nondegenerate on the closed-up surface).
    pub fn killed_form(&self) -> &RatMatrix {
        self.killed_form.get_or_init(|| {
            let q = self.killed_dim();
            let loops: Vec<CoverLoop> = self
                .free_cols
                .iter()
                .map(|&c| {
                    let w = self.cover.basis_loop_word(c);
                    CoverLoop::from_word(self.cover, self.cover.basepoint(), &w)
                        .expect("basis loop closes")
                })
                .collect();
            let mut j = RatMatrix::zero(q, q);
            for a in 0..q {
                for b in 0..q {
                    j.set(
                        a,
                        b,
                        Rat::from_integer(BigInt::from(intersection_number(
                            self.cover, &loops[a], &loops[b],
                        ))),
                    );
                }
            }
            j
        })
    }

    /// `q_a^T J q_b` on quotient coordinates.
    pub fn pair(&self, a: &[Rat], b: &[Rat]) -> Rat {
        let j = self.killed_form();
        let jb = j.mul_vec(b);
        a.iter().zip(&jb).map(|(x, y)| x * y).sum()
    }

    fn traced_column(&self, f: &FreeAut, lam: &[usize], basis_index: usize) -> Result<Vec<Rat>> {
        let w = self.cover.basis_loop_word(basis_index);
        let fw = f.apply(&w);
        let start = lam[self.cover.basepoint()];
        let (steps, end) = self.cover.path_steps(start, &fw);
        if end != start {
            return Err(Error::CertificateViolation(
                "lifted image of a basis loop did not close".into(),
            ));
        }
        Ok(self
            .cover
            .cycle_coords(&steps)
            .into_iter()
            .map(|v| Rat::from_integer(BigInt::from(v)))
            .collect())
    }

    /// Matrix of the lifted automorphism on the boundary-killed quotient
    /// only (cheaper than [`H1Basis::action`]; used when scanning lifts).
    pub fn killed_action(&self, f: &FreeAut, lam: &[usize]) -> Result<RatMatrix> {
        let q = self.killed_dim();
        let mut out = RatMatrix::zero(q, q);
        for (jcol, &c) in self.free_cols.iter().enumerate() {
            let col = self.reduce(&self.traced_column(f, lam, c)?);
            for i in 0..q {
                out.set(i, jcol, col[i].clone());
            }
        }
        Ok(out)
    }

    /// Full homology action of a lifted automorphism, with validation of the
    /// intertwiner and of boundary-class preservation.
    pub fn action(&self, f: &FreeAut, lam: &[usize]) -> Result<HomologyAction> {
        if !verify_lift(self.cover, f, lam) {
            return Err(Error::InvalidInput(
                "sheet bijection is not an intertwiner for f".into(),
            ));
        }
        let mut full = RatMatrix::zero(self.dim, self.dim);
        for j in 0..self.dim {
            let col = self.traced_column(f, lam, j)?;
            for i in 0..self.dim {
                full.set(i, j, col[i].clone());
            }
        }
        // boundary classes must map into the boundary span
        for lift in self.cover.boundary_lifts() {
            let lp = self.cover.puncture_loop(lift);
            let bc: Vec<Rat> = self
                .cover
                .cycle_coords(lp.steps())
                .into_iter()
                .map(|v| Rat::from_integer(BigInt::from(v)))
                .collect();
            let img = full.mul_vec(&bc);
            if self.reduce(&img).iter().any(|v| !v.is_zero()) {
                return Err(Error::CertificateViolation(
                    "boundary class not mapped into the boundary span".into(),
                ));
            }
        }
        // killed matrix: columns are reductions of the full columns at the
        // free coordinates
        let q = self.killed_dim();
        let mut killed = RatMatrix::zero(q, q);
        for (jcol, &c) in self.free_cols.iter().enumerate() {
            let col: Vec<Rat> = (0..self.dim).map(|i| full.get(i, c).clone()).collect();
            let red = self.reduce(&col);
            for i in 0..q {
                killed.set(i, jcol, red[i].clone());
            }
        }
        Ok(HomologyAction {
            lam: lam.to_vec(),
            full,
            killed,
        })
    }
}

/// The induced action of a lifted automorphism on `H1(cover;Q)` and on the
/// boundary-killed quotient.
#[derive(Clone, Debug)]
pub struct HomologyAction {
    pub lam: Vec<usize>,
    pub full: RatMatrix,
    pub killed: RatMatrix,
}

impl HomologyAction {
    pub fn fixed_dim(&self) -> usize {
        fixed_dim(&self.killed)
    }

    /// Exact symplectic-invariance check `A^T J A = J` on the quotient.
    pub fn preserves_form(&self, basis: &H1Basis<'_>) -> bool {
        let j = basis.killed_form();
        self.killed.transpose().mul(&j.mul(&self.killed)) == *j
    }
}

/// `b1` of the mapping torus over the orbifold closure `T(n)`:
/// `1 + dim fix` of the boundary-killed action. Errors if the cover does not
/// fill over `T(n)`.
pub fn betti_mapping_torus(
    basis: &H1Basis<'_>,
    action: &HomologyAction,
    n: u32,
) -> Result<u64> {
    basis.cover().orbifold_fill(n)?;
    Ok(1 + action.fixed_dim() as u64)
}

// ---------------------------------------------------------------------------
// HNN-presentation oracle
// ---------------------------------------------------------------------------

/// Independent computation of the same `b1` by abelianizing the HNN
/// presentation of the mapping-torus orbifold group: Reidemeister–Schreier
/// generators of the cover's surface group, conjugation relators through the
/// lifted automorphism, and cone-power relators from the orbifold filling.
pub fn betti_oracle(c: &PermCover, f: &FreeAut, lam: &[usize], n: u32) -> Result<u64> {
    if !verify_lift(c, f, lam) {
        return Err(Error::InvalidInput(
            "sheet bijection is not an intertwiner for f".into(),
        ));
    }
    let fill = c.orbifold_fill(n)?;
    let ng = c.h1_dim();
    // Schreier rewriting of a based loop into the non-tree generators
    let rewrite = |start: usize, w: &FreeWord| -> (FreeWord, usize) {
        let mut out: Vec<i32> = Vec::new();
        let mut s = start;
        for &l in w.letters() {
            if l > 0 {
                if let Some(e) = c.nontree_index(s, l as usize) {
                    out.push(e as i32 + 1);
                }
                s = c.act_letter(s, l);
            } else {
                let t = c.act_letter(s, l);
                if let Some(e) = c.nontree_index(t, (-l) as usize) {
                    out.push(-(e as i32 + 1));
                }
                s = t;
            }
        }
        (FreeWord::from_letters(&out), s)
    };
    let bp = c.basepoint();
    let conj = c.rep_word(lam[bp]).clone();
    let t = ng as i32 + 1;
    let mut relators: Vec<FreeWord> = Vec::new();
    for i in 0..ng {
        let w = c.basis_loop_word(i);
        let fw = f.apply(&w);
        let based = conj.mul(&fw).mul(&conj.inverse());
        let (img, end) = rewrite(bp, &based);
        if end != bp {
            return Err(Error::CertificateViolation(
                "rewritten image is not a based loop".into(),
            ));
        }
        let rel = FreeWord::from_letters(&[t, i as i32 + 1, -t]).mul(&img.inverse());
        relators.push(rel);
    }
    for (lift, &cone) in c.boundary_lifts().iter().zip(&fill.cone_orders) {
        let bw = &c.base().boundary_words()[lift.boundary_index];
        let lw = c
            .rep_word(lift.sheets[0])
            .mul(&bw.repeat(lift.degree))
            .mul(&c.rep_word(lift.sheets[0]).inverse());
        let (wsub, end) = rewrite(bp, &lw);
        if end != bp {
            return Err(Error::CertificateViolation(
                "rewritten boundary loop is not based".into(),
            ));
        }
        relators.push(wsub.repeat(cone as usize));
    }
    let gens: Vec<String> = (1..=ng)
        .map(|i| format!("s{i}"))
        .chain(std::iter::once("t".into()))
        .collect();
    Ok(FPGroup::new(gens, relators).abelianization_rank() as u64)
}

// ---------------------------------------------------------------------------
// fixed-pair search on grid covers
// ---------------------------------------------------------------------------

/// Serializable edge-path form of a loop.
pub fn loop_json(lp: &CoverLoop) -> Vec<(usize, i32)> {
    lp.steps().iter().map(|s| (s.sheet, s.letter)).collect()
}

/// Certificate produced by [`fixed_pair_search`].
#[derive(Clone, Debug)]
pub struct FixedPairCertificate {
    pub delta: CoverLoop,
    pub delta_star: CoverLoop,
    /// `I(delta, delta_star)`, nonzero (equals 2 on the standard Case 1
    /// cover).
    pub intersection: BigInt,
    /// Intersections of each loop with every component of the preimage of
    /// `y` (all zero).
    pub y_intersections: Vec<BigInt>,
    pub y_intersections_star: Vec<BigInt>,
    /// Dimension of the joint fixed space of the canonical lifts of `D_x`
    /// and `D_y^4` on boundary-killed homology.
    pub joint_fixed_dim: usize,
    /// Dimension of the subspace of the joint fixed space pairing to zero
    /// with every `y` component.
    pub pair_space_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPairJson {
    pub delta: Vec<(usize, i32)>,
    pub delta_star: Vec<(usize, i32)>,
    pub intersection: String,
    pub y_intersections: Vec<String>,
    pub y_intersections_star: Vec<String>,
    pub joint_fixed_dim: usize,
    pub pair_space_dim: usize,
}

impl FixedPairCertificate {
    pub fn to_json(&self) -> FixedPairJson {
        FixedPairJson {
            delta: loop_json(&self.delta),
            delta_star: loop_json(&self.delta_star),
            intersection: self.intersection.to_string(),
            y_intersections: self.y_intersections.iter().map(BigInt::to_string).collect(),
            y_intersections_star: self
                .y_intersections_star
                .iter()
                .map(BigInt::to_string)
                .collect(),
            joint_fixed_dim: self.joint_fixed_dim,
            pair_space_dim: self.pair_space_dim,
        }
    }
}

fn primitive_integer(v: &[Rat]) -> Vec<BigInt> {
    use num_integer::Integer;
    let mut den = BigInt::one();
    for x in v {
        den = den.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &den).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g > BigInt::one() {
        ints.into_iter().map(|x| x / &g).collect()
    } else {
        ints
    }
}

/// Builds a closed loop at the basepoint realizing an integer vector of
/// quotient coordinates (concatenating fundamental-cycle loops).
fn realize_loop(
    basis: &H1Basis<'_>,
    qvec: &[BigInt],
) -> Result<CoverLoop> {
    let c = basis.cover();
    let mut steps: Vec<Step> = Vec::new();
    for (&col, coeff) in basis.free_cols.iter().zip(qvec) {
        if coeff.is_zero() {
            continue;
        }
        let w = c.basis_loop_word(col);
        let w = if coeff.is_negative() { w.inverse() } else { w };
        let reps: usize = coeff.abs().try_into().map_err(|_| {
            Error::InvalidInput("class coefficient too large to realize".into())
        })?;
        for _ in 0..reps {
            let (st, end) = c.path_steps(c.basepoint(), &w);
            debug_assert_eq!(end, c.basepoint());
            steps.extend(st);
        }
    }
    if steps.is_empty() {
        return Err(Error::CertificateViolation("zero class has no loop".into()));
    }
    CoverLoop::new(c, steps)
}

/// Finds a certified fixed pair on a grid cover satisfying Condition I (or
/// more generally the Lemma-lift conditions): two nonzero classes fixed by
/// the canonical lifts of `D_x` and `D_y^4`, pairing to zero with every
/// component of the preimage of `y`, with nonzero mutual intersection.
///
/// The search is exact linear algebra over the joint fixed subspace of the
/// two canonical lifts intersected with the annihilator of the `y`
/// components, with a deterministic choice of pair.
pub fn fixed_pair_search<'a>(
    grid: &GridCover,
    basis: &H1Basis<'a>,
) -> Result<FixedPairCertificate> {
    let c = grid.cover();
    if !std::ptr::eq(basis.cover(), c) {
        return Err(Error::InvalidInput(
            "H1 basis does not belong to the grid cover".into(),
        ));
    }
    let dx = FreeAut::dehn_twist_x(2);
    let dy4 = FreeAut::dehn_twist_y(2).pow(4)?;
    let lam_x = grid.canonical_dx_lift();
    if !verify_lift(c, &dx, &lam_x) {
        return Err(Error::CertificateViolation(
            "canonical D_x lift is not an intertwiner (Lemma-lift conditions fail)".into(),
        ));
    }
    let lam_y: Vec<usize> = (0..c.degree()).collect();
    if !verify_lift(c, &dy4, &lam_y) {
        return Err(Error::CertificateViolation(
            "identity is not a lift of D_y^4".into(),
        ));
    }
    let ax = basis.killed_action(&dx, &lam_x)?;
    let ay = basis.killed_action(&dy4, &lam_y)?;
    let q = basis.killed_dim();
    let id = RatMatrix::identity(q);
    let joint = RatMatrix::stack(&[&ax.sub(&id), &ay.sub(&id)]);
    let joint_fixed_dim = joint.kernel_basis().len();

    // annihilator rows: v -> I(v, y-component)
    let ycomps = grid.y_components();
    let j = basis.killed_form();
    let mut yrows = RatMatrix::zero(ycomps.len(), q);
    for (i, yc) in ycomps.iter().enumerate() {
        let ycl = basis.loop_class(yc);
        let row = j.mul_vec(&ycl);
        for (jcol, v) in row.into_iter().enumerate() {
            yrows.set(i, jcol, v);
        }
    }
    let system = RatMatrix::stack(&[&joint, &yrows]);
    let kernel = system.kernel_basis();
    let pair_space_dim = kernel.len();
    if pair_space_dim < 2 {
        return Err(Error::CertificateViolation(format!(
            "fixed-pair space has dimension {pair_space_dim} < 2"
        )));
    }
    let prim: Vec<Vec<BigInt>> = kernel.iter().map(|v| primitive_integer(v)).collect();
    let as_rat = |v: &[BigInt]| -> Vec<Rat> {
        v.iter().map(|x| Rat::from_integer(x.clone())).collect()
    };
    // deterministic pair choice: smallest nonzero |pairing|, then index order
    let mut best: Option<(BigInt, usize, usize)> = None;
    for a in 0..prim.len() {
        for b in a + 1..prim.len() {
            let p = basis.pair(&as_rat(&prim[a]), &as_rat(&prim[b]));
            debug_assert!(p.is_integer());
            let p = p.to_integer();
            if p.is_zero() {
                continue;
            }
            let key = p.abs();
            if best.as_ref().map(|(k, _, _)| key < *k).unwrap_or(true) {
                best = Some((key, a, b));
            }
        }
    }
    let Some((_, ia, ib)) = best else {
        return Err(Error::CertificateViolation(
            "no pair in the fixed space has nonzero intersection".into(),
        ));
    };
    let delta = realize_loop(basis, &prim[ia])?;
    let delta_star = realize_loop(basis, &prim[ib])?;

    // re-verify everything on the realized loops
    let dcl = basis.loop_class(&delta);
    let scl = basis.loop_class(&delta_star);
    if dcl != as_rat(&prim[ia]) || scl != as_rat(&prim[ib]) {
        return Err(Error::CertificateViolation(
            "realized loop does not represent its class".into(),
        ));
    }
    for (cl, name) in [(&dcl, "delta"), (&scl, "delta_star")] {
        let imgx = ax.mul_vec(cl);
        let imgy = ay.mul_vec(cl);
        if imgx != *cl.as_slice() || imgy != *cl.as_slice() {
            return Err(Error::CertificateViolation(format!(
                "{name} is not fixed by the canonical lifts"
            )));
        }
    }
    let intersection = BigInt::from(intersection_number(c, &delta, &delta_star));
    if intersection.is_zero() {
        return Err(Error::CertificateViolation(
            "realized pair has zero intersection".into(),
        ));
    }
    let y_intersections: Vec<BigInt> = ycomps
        .iter()
        .map(|yc| BigInt::from(intersection_number(c, &delta, yc)))
        .collect();
    let y_intersections_star: Vec<BigInt> = ycomps
        .iter()
        .map(|yc| BigInt::from(intersection_number(c, &delta_star, yc)))
        .collect();
    if y_intersections.iter().any(|v| !v.is_zero())
        || y_intersections_star.iter().any(|v| !v.is_zero())
    {
        return Err(Error::CertificateViolation(
            "pair meets a component of the y preimage".into(),
        ));
    }
    Ok(FixedPairCertificate {
        delta,
        delta_star,
        intersection,
        y_intersections,
        y_intersections_star,
        joint_fixed_dim,
        pair_space_dim,
    })
}

/// Dimension of the joint fixed subspace of the canonical lifts of `D_x`
/// and `D_y^4` on boundary-killed homology (both lifts are verified as
/// intertwiners first).
pub fn fixed_subspace_dim_of_canonical_lifts(
    grid: &GridCover,
    basis: &H1Basis<'_>,
) -> Result<usize> {
    let c = grid.cover();
    if !std::ptr::eq(basis.cover(), c) {
        return Err(Error::InvalidInput(
            "H1 basis does not belong to the grid cover".into(),
        ));
    }
    let dx = FreeAut::dehn_twist_x(2);
    let dy4 = FreeAut::dehn_twist_y(2).pow(4)?;
    let lam_x = grid.canonical_dx_lift();
    if !verify_lift(c, &dx, &lam_x) {
        return Err(Error::CertificateViolation(
            "canonical D_x lift is not an intertwiner (Lemma-lift conditions fail)".into(),
        ));
    }
    let lam_y: Vec<usize> = (0..c.degree()).collect();
    if !verify_lift(c, &dy4, &lam_y) {
        return Err(Error::CertificateViolation(
            "identity is not a lift of D_y^4".into(),
        ));
    }
    let ax = basis.killed_action(&dx, &lam_x)?;
    let ay = basis.killed_action(&dy4, &lam_y)?;
    let q = basis.killed_dim();
    let id = RatMatrix::identity(q);
    let joint = RatMatrix::stack(&[&ax.sub(&id), &ay.sub(&id)]);
    Ok(joint.kernel_basis().len())
}

/// Loop-level and class-level cross-intersection matrix of a family of
/// 1-chains.
pub fn chain_intersection_matrix(c: &PermCover, chains: &[Vec<CoverLoop>]) -> Vec<Vec<i64>> {
    chains
        .iter()
        .map(|a| {
            chains
                .iter()
                .map(|b| chain_intersection_number(c, a, b))
                .collect()
        })
        .collect()
}
