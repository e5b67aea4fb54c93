//! Punctured surfaces as one-vertex ribbon graphs (fatgraphs), finite covers
//! as transitive permutation representations with cached Schreier data, grid
//! covers, lifting of mapping classes, fiber products and intersection
//! numbers.
//!
//! Permutations act on the right; a word acts letter by letter, left to
//! right. The boundary word of the once-punctured torus is
//! `[x, y] = x y x^-1 y^-1` and the counterclockwise dart order at the rose
//! vertex is `x+, y-, x-, y+` (which calibrates `I(x, y) = +1`).

use crate::error::{Error, Result};
use crate::exact::Perm;
use crate::fpgroup::{commutator_xy, standard_names, FreeAut, FreeWord};
use serde::Serialize;
use std::collections::VecDeque;

// ---------------------------------------------------------------------------
// fat surfaces
// ---------------------------------------------------------------------------

/// A dart (edge end) at the rose vertex: a generator together with the end
/// (`positive` = the end where the edge leaves in the positive direction).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Dart {
    pub gen: usize, // 1-based
    pub positive: bool,
}

/// A punctured surface presented as a one-vertex ribbon graph: free
/// fundamental group with named generators, declared boundary words, and a
/// counterclockwise dart order at the vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FatSurface {
    gen_names: Vec<String>,
    boundary_words: Vec<FreeWord>,
    dart_order: Vec<Dart>,
    genus: u32,
}

/// Faces of the rose determined by a dart order: the boundary trace follows
/// `next = successor of the opposite dart` in the cyclic order.
fn trace_boundary(dart_order: &[Dart]) -> Vec<FreeWord> {
    let m = dart_order.len();
    let pos = |d: Dart| -> usize {
        dart_order
            .iter()
            .position(|&e| e == d)
            .expect("dart present")
    };
    let mut seen = vec![false; m];
    let mut words = Vec::new();
    for start in 0..m {
        if seen[start] {
            continue;
        }
        let mut letters = Vec::new();
        let mut di = start;
        while !seen[di] {
            seen[di] = true;
            let d = dart_order[di];
            letters.push(if d.positive {
                d.gen as i32
            } else {
                -(d.gen as i32)
            });
            let opposite = Dart {
                gen: d.gen,
                positive: !d.positive,
            };
            di = (pos(opposite) + 1) % m;
        }
        words.push(FreeWord::from_letters(&letters));
    }
    words
}

impl FatSurface {
    /// Validates that tracing the ribbon boundary reproduces the declared
    /// boundary words up to cyclic rotation, and derives the genus from the
    /// Euler characteristic.
    pub fn new(
        gen_names: Vec<String>,
        boundary_words: Vec<FreeWord>,
        dart_order: Vec<Dart>,
    ) -> Result<FatSurface> {
        let rank = gen_names.len();
        if rank == 0 {
            return Err(Error::InvalidInput("surface needs at least one generator".into()));
        }
        if dart_order.len() != 2 * rank {
            return Err(Error::InvalidInput(
                "dart order must list each generator end exactly once".into(),
            ));
        }
        for g in 1..=rank {
            for positive in [true, false] {
                if !dart_order.iter().any(|d| d.gen == g && d.positive == positive) {
                    return Err(Error::InvalidInput(format!(
                        "dart order is missing an end of generator {g}"
                    )));
                }
            }
        }
        let traced = trace_boundary(&dart_order);
        if traced.len() != boundary_words.len() {
            return Err(Error::InvalidInput(format!(
                "ribbon structure has {} boundary components, {} declared",
                traced.len(),
                boundary_words.len()
            )));
        }
        let mut used = vec![false; traced.len()];
        for bw in &boundary_words {
            let bw = bw.cyclically_reduced();
            let found = traced.iter().enumerate().find(|(i, t)| {
                !used[*i] && t.cyclically_reduced().is_rotation_of(&bw)
            });
            match found {
                Some((i, _)) => used[i] = true,
                None => {
                    return Err(Error::InvalidInput(format!(
                        "declared boundary word does not match the ribbon trace"
                    )))
                }
            }
        }
        // chi = 1 - rank = 2 - 2g - b
        let b = boundary_words.len() as i64;
        let two_g = 2 - (1 - rank as i64) - b;
        if two_g < 0 || two_g % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "Euler characteristic inconsistent: 2g = {two_g}"
            )));
        }
        Ok(FatSurface {
            gen_names,
            boundary_words,
            dart_order,
            genus: (two_g / 2) as u32,
        })
    }

    /// The once-punctured torus: rank 2, boundary `[x, y]`.
    pub fn punctured_torus() -> FatSurface {
        FatSurface::k_punctured_torus(1)
    }

    /// Torus with `k >= 1` punctures: generators `x, y, z1..z_{k-1}`,
    /// boundary words `z_j` for `j < k` and
    /// `z_{k-1}^-1 ... z_1^-1 [x, y]` for the k-th puncture.
    pub fn k_punctured_torus(k: usize) -> FatSurface {
        assert!(k >= 1);
        let rank = k + 1;
        let names = standard_names(rank);
        let mut boundary = Vec::new();
        for j in 1..k {
            boundary.push(FreeWord::generator(2 + j));
        }
        let mut last: Vec<i32> = (1..k).rev().map(|j| -((2 + j) as i32)).collect();
        last.extend_from_slice(commutator_xy().letters());
        boundary.push(FreeWord::from_letters(&last));
        let mut darts = vec![
            Dart { gen: 1, positive: true },
            Dart { gen: 2, positive: false },
            Dart { gen: 1, positive: false },
            Dart { gen: 2, positive: true },
        ];
        for j in (1..k).rev() {
            darts.push(Dart { gen: 2 + j, positive: false });
            darts.push(Dart { gen: 2 + j, positive: true });
        }
        FatSurface::new(names, boundary, darts).expect("standard surface is valid")
    }

    pub fn rank(&self) -> usize {
        self.gen_names.len()
    }

    pub fn gen_names(&self) -> &[String] {
        &self.gen_names
    }

    pub fn boundary_words(&self) -> &[FreeWord] {
        &self.boundary_words
    }

    pub fn dart_order(&self) -> &[Dart] {
        &self.dart_order
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn punctures(&self) -> usize {
        self.boundary_words.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        1 - self.rank() as i64
    }
}

// ---------------------------------------------------------------------------
// permutation covers
// ---------------------------------------------------------------------------

/// One lift of a base puncture: the cycle of the boundary word's permutation
/// image through its sheets; `degree` is the unwrapping degree.
#[derive(Clone, Debug, Serialize)]
pub struct PunctureLift {
    pub boundary_index: usize,
    pub sheets: Vec<usize>,
    pub degree: usize,
}

/// One step of an edge path in the Schreier graph: the sheet it leaves and
/// the signed base generator it follows.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Step {
    pub sheet: usize,
    pub letter: i32,
}

/// A finite cover given by a transitive permutation representation, with
/// cached Schreier tree, fundamental-cycle basis and boundary lifts.
#[derive(Clone, Debug)]
pub struct PermCover {
    base: FatSurface,
    perms: Vec<Perm>,
    inv_perms: Vec<Perm>,
    degree: usize,
    basepoint: usize,
    rep: Vec<FreeWord>,            // tree word from basepoint to each sheet
    nontree: Vec<(usize, usize)>,  // (sheet, gen), in (gen, sheet) order
    ntpos: Vec<Option<usize>>,     // edge id -> basis index
    punctures: Vec<PunctureLift>,
}

/// Result of filling the punctures of a cover over the base orbifold `T(n)`.
#[derive(Clone, Debug, Serialize)]
pub struct FillResult {
    /// One cone order `n / m` per puncture lift (1 = smooth point).
    pub cone_orders: Vec<u32>,
    /// True iff every unwrapping degree equals `n` (the filled cover is a
    /// manifold).
    pub manifold: bool,
}

impl PermCover {
    pub fn build(base: FatSurface, perms: Vec<Perm>, basepoint: usize) -> Result<PermCover> {
        let rank = base.rank();
        if perms.len() != rank {
            return Err(Error::RankMismatch {
                expected: rank,
                got: perms.len(),
            });
        }
        let degree = perms.first().map_or(0, Perm::degree);
        if degree == 0 {
            return Err(Error::InvalidInput("cover degree must be positive".into()));
        }
        for p in &perms {
            if p.degree() != degree {
                return Err(Error::DegreeMismatch {
                    expected: degree,
                    got: p.degree(),
                });
            }
        }
        if basepoint >= degree {
            return Err(Error::InvalidInput("basepoint out of range".into()));
        }
        let inv_perms: Vec<Perm> = perms.iter().map(Perm::inverse).collect();

        // BFS spanning tree
        let mut rep: Vec<Option<FreeWord>> = vec![None; degree];
        let mut is_tree = vec![false; rank * degree];
        rep[basepoint] = Some(FreeWord::empty());
        let mut queue = VecDeque::from([basepoint]);
        let mut visited = 1usize;
        while let Some(s) = queue.pop_front() {
            for g in 1..=rank {
                for sign in [1i32, -1] {
                    let t = if sign > 0 {
                        perms[g - 1].apply(s)
                    } else {
                        inv_perms[g - 1].apply(s)
                    };
                    if rep[t].is_none() {
                        rep[t] = Some(
                            rep[s]
                                .as_ref()
                                .unwrap()
                                .mul(&FreeWord::from_letters(&[sign * g as i32])),
                        );
                        let (es, eg) = if sign > 0 { (s, g) } else { (t, g) };
                        is_tree[(eg - 1) * degree + es] = true;
                        queue.push_back(t);
                        visited += 1;
                    }
                }
            }
        }
        if visited != degree {
            // report the orbit partition
            let mut orbits = Vec::new();
            let mut covered = vec![false; degree];
            for s0 in 0..degree {
                if covered[s0] {
                    continue;
                }
                let mut orbit = vec![s0];
                covered[s0] = true;
                let mut q = VecDeque::from([s0]);
                while let Some(s) = q.pop_front() {
                    for g in 0..rank {
                        for t in [perms[g].apply(s), inv_perms[g].apply(s)] {
                            if !covered[t] {
                                covered[t] = true;
                                orbit.push(t);
                                q.push_back(t);
                            }
                        }
                    }
                }
                orbits.push(orbit);
            }
            return Err(Error::NonTransitive { orbits });
        }
        let mut nontree = Vec::new();
        let mut ntpos = vec![None; rank * degree];
        for g in 1..=rank {
            for s in 0..degree {
                if !is_tree[(g - 1) * degree + s] {
                    ntpos[(g - 1) * degree + s] = Some(nontree.len());
                    nontree.push((s, g));
                }
            }
        }
        debug_assert_eq!(nontree.len(), degree * (rank - 1) + 1);

        let mut cover = PermCover {
            base,
            perms,
            inv_perms,
            degree,
            basepoint,
            rep: rep.into_iter().map(Option::unwrap).collect(),
            nontree,
            ntpos,
            punctures: Vec::new(),
        };
        cover.punctures = cover.compute_punctures();
        // chi accounting must close exactly
        let chi = cover.degree as i64 * cover.base.euler_characteristic();
        let two_g = 2 - chi - cover.punctures.len() as i64;
        if two_g < 0 || two_g % 2 != 0 {
            return Err(Error::InvalidInput(format!(
                "cover Euler characteristic inconsistent: 2g = {two_g}"
            )));
        }
        Ok(cover)
    }

    fn compute_punctures(&self) -> Vec<PunctureLift> {
        let mut out = Vec::new();
        for (bi, bw) in self.base.boundary_words().iter().enumerate() {
            let mut p = Perm::identity(self.degree);
            for &l in bw.letters() {
                let q = if l > 0 {
                    &self.perms[l as usize - 1]
                } else {
                    &self.inv_perms[(-l) as usize - 1]
                };
                p = p.then(q).expect("equal degrees");
            }
            for c in p.cycles() {
                let degree = c.len();
                out.push(PunctureLift {
                    boundary_index: bi,
                    sheets: c,
                    degree,
                });
            }
        }
        out
    }

    pub fn base(&self) -> &FatSurface {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    pub fn act_letter(&self, s: usize, l: i32) -> usize {
        if l > 0 {
            self.perms[l as usize - 1].apply(s)
        } else {
            self.inv_perms[(-l) as usize - 1].apply(s)
        }
    }

    pub fn act_word(&self, mut s: usize, w: &FreeWord) -> usize {
        for &l in w.letters() {
            s = self.act_letter(s, l);
        }
        s
    }

    /// Tree word from the basepoint to a sheet.
    pub fn rep_word(&self, s: usize) -> &FreeWord {
        &self.rep[s]
    }

    /// Dimension of H1 of the cover (number of fundamental cycles).
    pub fn h1_dim(&self) -> usize {
        self.nontree.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degree as i64 * self.base.euler_characteristic()
    }

    pub fn genus(&self) -> u32 {
        let two_g = 2 - self.euler_characteristic() - self.punctures.len() as i64;
        (two_g / 2) as u32
    }

    /// Non-tree edges indexing the fundamental-cycle basis.
    pub fn nontree_edges(&self) -> &[(usize, usize)] {
        &self.nontree
    }

    /// Basis index of the non-tree edge `(s, g)`, or `None` for tree edges.
    pub fn nontree_index(&self, s: usize, g: usize) -> Option<usize> {
        self.ntpos[(g - 1) * self.degree + s]
    }

    /// The basis loop of a non-tree edge `(s, g)`:
    /// `rep(s) * g * rep(s.g)^-1`.
    pub fn basis_loop_word(&self, i: usize) -> FreeWord {
        let (s, g) = self.nontree[i];
        let t = self.perms[g - 1].apply(s);
        self.rep[s]
            .mul(&FreeWord::generator(g))
            .mul(&self.rep[t].inverse())
    }

    /// Edge steps of spelling `w` from sheet `s`; returns the end sheet.
    pub fn path_steps(&self, s: usize, w: &FreeWord) -> (Vec<Step>, usize) {
        self.path_steps_letters(s, w.letters())
    }

    /// As [`PermCover::path_steps`] but over a raw (possibly unreduced)
    /// letter sequence.
    pub fn path_steps_letters(&self, mut s: usize, letters: &[i32]) -> (Vec<Step>, usize) {
        let mut steps = Vec::with_capacity(letters.len());
        for &l in letters {
            steps.push(Step { sheet: s, letter: l });
            s = self.act_letter(s, l);
        }
        (steps, s)
    }

    fn edge_id(&self, s: usize, g: usize) -> usize {
        (g - 1) * self.degree + s
    }

    /// Signed edge-traversal counts of a closed path.
    pub fn edge_vector(&self, steps: &[Step]) -> Vec<i64> {
        let mut v = vec![0i64; self.rank() * self.degree];
        for st in steps {
            if st.letter > 0 {
                v[self.edge_id(st.sheet, st.letter as usize)] += 1;
            } else {
                let t = self.act_letter(st.sheet, st.letter);
                v[self.edge_id(t, (-st.letter) as usize)] -= 1;
            }
        }
        v
    }

    /// Coordinates of a closed path in the fundamental-cycle basis (its
    /// non-tree edge counts).
    pub fn cycle_coords(&self, steps: &[Step]) -> Vec<i64> {
        let ev = self.edge_vector(steps);
        self.nontree
            .iter()
            .map(|&(s, g)| ev[self.edge_id(s, g)])
            .collect()
    }

    pub fn boundary_lifts(&self) -> &[PunctureLift] {
        &self.punctures
    }

    /// The closed loop tracing one puncture lift from its first sheet.
    pub fn puncture_loop(&self, lift: &PunctureLift) -> CoverLoop {
        let bw = &self.base.boundary_words()[lift.boundary_index];
        let word = bw.repeat(lift.degree);
        CoverLoop::from_word(self, lift.sheets[0], &word).expect("puncture loop closes")
    }

    /// Checks that every unwrapping degree divides `n` and returns the cone
    /// orders `n / m` of the filled cover over `T(n)`.
    pub fn orbifold_fill(&self, n: u32) -> Result<FillResult> {
        if n < 2 {
            return Err(Error::InvalidInput("cone order n must be >= 2".into()));
        }
        let mut cone_orders = Vec::new();
        for p in &self.punctures {
            if n as usize % p.degree != 0 {
                return Err(Error::FillFailed {
                    degree: p.degree,
                    n,
                });
            }
            cone_orders.push(n / p.degree as u32);
        }
        let manifold = cone_orders.iter().all(|&c| c == 1);
        Ok(FillResult {
            cone_orders,
            manifold,
        })
    }

    /// JSON descriptor: base, degree, perms in cycle notation, punctures.
    pub fn descriptor(&self) -> CoverDescriptor {
        CoverDescriptor {
            base: format!(
                "genus {} surface with {} punctures, generators {}",
                self.base.genus(),
                self.base.punctures(),
                self.base.gen_names().join(" ")
            ),
            degree: self.degree,
            genus: self.genus(),
            perms: self
                .base
                .gen_names()
                .iter()
                .zip(&self.perms)
                .map(|(n, p)| (n.clone(), p.to_string()))
                .collect(),
            punctures: self
                .punctures
                .iter()
                .map(|p| PunctureDescriptor {
                    word: self.base.boundary_words()[p.boundary_index]
                        .display(self.base.gen_names()),
                    cycle: p.sheets.iter().map(|s| s + 1).collect(),
                    degree: p.degree,
                })
                .collect(),
        }
    }

    /// DOT export of the Schreier graph: sheets as nodes, one colored edge
    /// per generator, boundary cycles annotated as comments.
    pub fn to_dot(&self) -> String {
        const COLORS: [&str; 6] = ["black", "red", "blue", "green", "orange", "purple"];
        let mut out = String::from("digraph schreier {\n");
        for p in &self.punctures {
            out.push_str(&format!(
                "  // boundary {} cycle {:?} unwraps {}\n",
                self.base.boundary_words()[p.boundary_index].display(self.base.gen_names()),
                p.sheets.iter().map(|s| s + 1).collect::<Vec<_>>(),
                p.degree
            ));
        }
        for s in 0..self.degree {
            out.push_str(&format!("  s{} [label=\"{}\"];\n", s, s + 1));
        }
        for g in 1..=self.rank() {
            let color = COLORS[(g - 1) % COLORS.len()];
            for s in 0..self.degree {
                out.push_str(&format!(
                    "  s{} -> s{} [label=\"{}\", color=\"{}\"];\n",
                    s,
                    self.perms[g - 1].apply(s),
                    self.base.gen_names()[g - 1],
                    color
                ));
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverDescriptor {
    pub base: String,
    pub degree: usize,
    pub genus: u32,
    pub perms: Vec<(String, String)>,
    pub punctures: Vec<PunctureDescriptor>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PunctureDescriptor {
    pub word: String,
    pub cycle: Vec<usize>,
    pub degree: usize,
}

pub fn build_cover(base: FatSurface, perms: Vec<Perm>) -> Result<PermCover> {
    PermCover::build(base, perms, 0)
}

// ---------------------------------------------------------------------------
// grid covers
// ---------------------------------------------------------------------------

/// The 4r-fold grid cover of the once-punctured torus: sheets `(row, j)`
/// with row in 0..4 and j in 0..r (sheet index `row*r + j`); `y` shifts the
/// row cyclically, `x` acts on row `i` by `sigma_i`.
#[derive(Clone, Debug)]
pub struct GridCover {
    cover: PermCover,
    r: usize,
    sigmas: [Perm; 4],
}

pub fn grid_cover(r: usize, sigmas: [Perm; 4]) -> Result<GridCover> {
    if r == 0 {
        return Err(Error::InvalidInput("grid parameter r must be >= 1".into()));
    }
    for s in &sigmas {
        if s.degree() != r {
            return Err(Error::DegreeMismatch {
                expected: r,
                got: s.degree(),
            });
        }
    }
    let d = 4 * r;
    let mut px = vec![0usize; d];
    let mut py = vec![0usize; d];
    for row in 0..4 {
        for j in 0..r {
            px[row * r + j] = row * r + sigmas[row].apply(j);
            py[row * r + j] = ((row + 1) % 4) * r + j;
        }
    }
    let cover = PermCover::build(
        FatSurface::punctured_torus(),
        vec![Perm::from_images(px)?, Perm::from_images(py)?],
        0,
    )?;
    Ok(GridCover { cover, r, sigmas })
}

impl GridCover {
    pub fn cover(&self) -> &PermCover {
        &self.cover
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn sigmas(&self) -> &[Perm; 4] {
        &self.sigmas
    }

    /// The canonical lift of `D_x`: on row `i` (0-based) it acts by the
    /// partial product `sigma_1 ... sigma_{i+1}` (left-to-right, sigma_1
    /// applied first). Valid whenever the Lemma-lift conditions hold.
    pub fn canonical_dx_lift(&self) -> Vec<usize> {
        let mut lam = vec![0usize; self.cover.degree()];
        let mut acc = Perm::identity(self.r);
        for row in 0..4 {
            acc = acc.then(&self.sigmas[row]).expect("equal degrees");
            for j in 0..self.r {
                lam[row * self.r + j] = row * self.r + acc.apply(j);
            }
        }
        lam
    }

    /// Row action of a sheet bijection that preserves rows; `None` if the
    /// bijection does not preserve the given row.
    pub fn row_action(&self, lam: &[usize], row: usize) -> Option<Perm> {
        let mut images = vec![0usize; self.r];
        for j in 0..self.r {
            let t = lam[row * self.r + j];
            if t / self.r != row {
                return None;
            }
            images[j] = t % self.r;
        }
        Perm::from_images(images).ok()
    }

    /// Components of the full preimage of `y` (cycles of `phi(y)`), as
    /// closed loops.
    pub fn y_components(&self) -> Vec<CoverLoop> {
        let py = &self.cover.perms()[1];
        py.cycles()
            .into_iter()
            .map(|c| {
                let word = FreeWord::generator(2).repeat(c.len());
                CoverLoop::from_word(&self.cover, c[0], &word).expect("y cycle closes")
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// lifting conditions and the lifting oracle
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LiftConditions {
    /// Partial products `sigma_1 ... sigma_i` commute with `sigma_{i+1}` and
    /// the full product is the identity.
    pub lemma_lift: bool,
    /// `sigma_2 = sigma_1^-1` and `sigma_4 = sigma_3^-1`.
    pub condition_i: bool,
}

pub fn check_lift_conditions(sigmas: &[Perm]) -> Result<LiftConditions> {
    let d = sigmas
        .first()
        .map(Perm::degree)
        .ok_or_else(|| Error::InvalidInput("empty sigma tuple".into()))?;
    for s in sigmas {
        if s.degree() != d {
            return Err(Error::DegreeMismatch {
                expected: d,
                got: s.degree(),
            });
        }
    }
    let mut lemma_lift = true;
    let mut acc = Perm::identity(d);
    for s in sigmas {
        let forward = acc.then(s)?;
        let backward = s.then(&acc)?;
        if forward != backward {
            lemma_lift = false;
        }
        acc = forward;
    }
    if !acc.is_identity() {
        lemma_lift = false;
    }
    let condition_i = sigmas.len() == 4
        && sigmas[1] == sigmas[0].inverse()
        && sigmas[3] == sigmas[2].inverse();
    Ok(LiftConditions {
        lemma_lift,
        condition_i,
    })
}

/// Condition II at level `n`: every boundary monodromy
/// `sigma_{i+1}^-1 sigma_i` has order dividing `n` (equivalently all
/// unwrapping degrees of the grid cover divide `n`).
pub fn condition_ii(sigmas: &[Perm], n: u32) -> Result<bool> {
    let count = sigmas.len();
    for i in 0..count {
        let m = sigmas[(i + 1) % count].inverse().then(&sigmas[i])?;
        if !m.pow(n as i64).is_identity() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Verifies the intertwiner identity `lam(s.g) = lam(s).f(g)` on every sheet
/// and generator, plus bijectivity.
pub fn verify_lift(c: &PermCover, f: &FreeAut, lam: &[usize]) -> bool {
    if lam.len() != c.degree() {
        return false;
    }
    let mut seen = vec![false; c.degree()];
    for &t in lam {
        if t >= c.degree() || seen[t] {
            return false;
        }
        seen[t] = true;
    }
    for s in 0..c.degree() {
        for g in 1..=c.rank() {
            let lhs = lam[c.perms()[g - 1].apply(s)];
            let rhs = c.act_word(lam[s], f.image(g));
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Enumerates all intertwiners of `f` on the cover: sheet bijections `lam`
/// with `lam(s.w) = lam(s).f(w)`. Nonempty iff `f` lifts (basepoint-free
/// criterion). Deterministic order by candidate basepoint image.
pub fn find_lifts(c: &PermCover, f: &FreeAut) -> Result<Vec<Vec<usize>>> {
    if f.rank() != c.rank() {
        return Err(Error::RankMismatch {
            expected: c.rank(),
            got: f.rank(),
        });
    }
    if !f.has_certified_inverse() {
        return Err(Error::NoCertifiedInverse);
    }
    let inv: Vec<Perm> = c.perms().iter().map(Perm::inverse).collect();
    let imgs: Vec<Perm> = (1..=c.rank())
        .map(|g| eval_word(c.perms(), &inv, f.image(g), c.degree()))
        .collect();
    Ok(find_lifts_by_images(c, &imgs))
}

/// The sheet permutation traced by `w`, read in `perms` (one entry per
/// generator; `inv_perms` are their inverses).
fn eval_word(perms: &[Perm], inv_perms: &[Perm], w: &FreeWord, degree: usize) -> Perm {
    let images = (0..degree)
        .map(|mut s| {
            for &l in w.letters() {
                s = if l > 0 {
                    perms[l as usize - 1].apply(s)
                } else {
                    inv_perms[(-l) as usize - 1].apply(s)
                };
            }
            s
        })
        .collect();
    Perm::from_images(images).expect("words act bijectively")
}

/// Lift search once the images `f(g)` are known as sheet permutations.
fn find_lifts_by_images(c: &PermCover, imgs: &[Perm]) -> Vec<Vec<usize>> {
    let d = c.degree();
    let inv_imgs: Vec<Perm> = imgs.iter().map(Perm::inverse).collect();
    let mut lifts = Vec::new();
    'cand: for t0 in 0..d {
        let mut lam: Vec<Option<usize>> = vec![None; d];
        lam[c.basepoint()] = Some(t0);
        let mut queue = VecDeque::from([c.basepoint()]);
        while let Some(s) = queue.pop_front() {
            for g in 1..=c.rank() {
                for sign in [1i32, -1] {
                    let s2 = c.act_letter(s, sign * g as i32);
                    let t2 = if sign > 0 {
                        imgs[g - 1].apply(lam[s].unwrap())
                    } else {
                        inv_imgs[g - 1].apply(lam[s].unwrap())
                    };
                    match lam[s2] {
                        Some(prev) if prev != t2 => continue 'cand,
                        Some(_) => {}
                        None => {
                            lam[s2] = Some(t2);
                            queue.push_back(s2);
                        }
                    }
                }
            }
        }
        let lam: Vec<usize> = lam.into_iter().map(Option::unwrap).collect();
        let mut seen = vec![false; d];
        for &t in &lam {
            if seen[t] {
                continue 'cand;
            }
            seen[t] = true;
        }
        lifts.push(lam);
    }
    lifts
}

/// Smallest `m <= bound` with a nonempty lift set for `f^m`, together with
/// the lifts.
///
/// The powers are never materialized as words (their lengths can grow
/// exponentially in `m`); instead the sheet permutations of the images of
/// `f^m` are iterated, reading `f(g)` in the permutations of the previous
/// power each round.
pub fn minimal_lifting_power(
    c: &PermCover,
    f: &FreeAut,
    bound: u32,
) -> Result<(u32, Vec<Vec<usize>>)> {
    if f.rank() != c.rank() {
        return Err(Error::RankMismatch {
            expected: c.rank(),
            got: f.rank(),
        });
    }
    if !f.has_certified_inverse() {
        return Err(Error::NoCertifiedInverse);
    }
    let d = c.degree();
    let mut q: Vec<Perm> = c.perms().to_vec();
    for m in 1..=bound {
        let qi: Vec<Perm> = q.iter().map(Perm::inverse).collect();
        q = (1..=c.rank())
            .map(|g| eval_word(&q, &qi, f.image(g), d))
            .collect();
        let lifts = find_lifts_by_images(c, &q);
        if !lifts.is_empty() {
            return Ok((m, lifts));
        }
    }
    Err(Error::PowerBoundExceeded { bound })
}

// ---------------------------------------------------------------------------
// cover loops and intersection numbers
// ---------------------------------------------------------------------------

/// A closed edge path in the Schreier graph of a cover.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoverLoop {
    steps: Vec<Step>,
}

impl CoverLoop {
    /// Validates that consecutive steps chain and the path closes up.
    pub fn new(c: &PermCover, steps: Vec<Step>) -> Result<CoverLoop> {
        if steps.is_empty() {
            return Err(Error::InvalidInput("empty loop".into()));
        }
        for k in 0..steps.len() {
            let end = c.act_letter(steps[k].sheet, steps[k].letter);
            let next = steps[(k + 1) % steps.len()].sheet;
            if end != next {
                return Err(Error::InvalidInput(format!(
                    "path does not chain/close at step {k}"
                )));
            }
        }
        Ok(CoverLoop { steps })
    }

    /// Spells `w` from `start`; errors if the path does not close.
    pub fn from_word(c: &PermCover, start: usize, w: &FreeWord) -> Result<CoverLoop> {
        let (steps, end) = c.path_steps(start, w);
        if end != start {
            return Err(Error::InvalidInput(format!(
                "word does not close up: starts at sheet {start}, ends at {end}"
            )));
        }
        CoverLoop::new(c, steps)
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn start(&self) -> usize {
        self.steps[0].sheet
    }

    /// The raw letter sequence the loop projects to (not freely reduced:
    /// the path is the path).
    pub fn base_letters(&self) -> Vec<i32> {
        self.steps.iter().map(|s| s.letter).collect()
    }
}

/// Crossing cocycle of the left-pushed loop: for each passage through a
/// vertex, the darts crossed (counterclockwise from the arrival dart to the
/// departure dart, inclusive) contribute +1 at a positive dart and -1 at a
/// negative dart, keyed by edge id.
fn crossing_cocycle(c: &PermCover, lp: &CoverLoop) -> Vec<i64> {
    let darts = c.base().dart_order();
    let m = darts.len();
    let pos = |d: Dart| darts.iter().position(|&e| e == d).expect("dart present");
    let mut om = vec![0i64; c.rank() * c.degree()];
    let n = lp.len();
    for k in 0..n {
        let st = lp.steps()[k];
        let v = c.act_letter(st.sheet, st.letter); // intermediate vertex
        let next = lp.steps()[(k + 1) % n];
        // arrival dart: the end of the edge we came in on
        let arrive = if st.letter > 0 {
            Dart { gen: st.letter as usize, positive: false }
        } else {
            Dart { gen: (-st.letter) as usize, positive: true }
        };
        let depart = if next.letter > 0 {
            Dart { gen: next.letter as usize, positive: true }
        } else {
            Dart { gen: (-next.letter) as usize, positive: false }
        };
        let pu = pos(arrive);
        let pw = pos(depart);
        let cnt = (pw + m - pu) % m + 1;
        for i in 0..cnt {
            let d = darts[(pu + i) % m];
            if d.positive {
                om[(d.gen - 1) * c.degree() + v] += 1;
            } else {
                let u = c.inv_perms_apply(d.gen, v);
                om[(d.gen - 1) * c.degree() + u] -= 1;
            }
        }
    }
    om
}

impl PermCover {
    fn inv_perms_apply(&self, g: usize, s: usize) -> usize {
        self.inv_perms[g - 1].apply(s)
    }
}

/// Algebraic intersection number of two closed loops, via corner-crossing
/// counts in the lifted cyclic order (computed on the closed-up surface).
pub fn intersection_number(c: &PermCover, a: &CoverLoop, b: &CoverLoop) -> i64 {
    let om = crossing_cocycle(c, a);
    let vb = c.edge_vector(b.steps());
    om.iter().zip(&vb).map(|(o, v)| o * v).sum()
}

/// Intersection number extended bilinearly to 1-chains (lists of loops).
pub fn chain_intersection_number(c: &PermCover, a: &[CoverLoop], b: &[CoverLoop]) -> i64 {
    a.iter()
        .flat_map(|la| b.iter().map(move |lb| intersection_number(c, la, lb)))
        .sum()
}

// ---------------------------------------------------------------------------
// fiber products and transfers
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct FiberProduct {
    pub cover: PermCover,
    /// Sheet projections onto each factor.
    pub projections: Vec<Vec<usize>>,
}

/// Fiber product of covers over the same base: the orbit of the basepoint
/// tuple under the product representation.
pub fn fiber_product_many(factors: &[&PermCover]) -> Result<FiberProduct> {
    let first = factors
        .first()
        .ok_or_else(|| Error::InvalidInput("no factors".into()))?;
    for c in factors.iter().skip(1) {
        if c.base() != first.base() {
            return Err(Error::InvalidInput(
                "fiber product factors have different bases".into(),
            ));
        }
    }
    let rank = first.rank();
    let start: Vec<usize> = factors.iter().map(|c| c.basepoint()).collect();
    let mut index: std::collections::HashMap<Vec<usize>, usize> = Default::default();
    let mut order: Vec<Vec<usize>> = vec![start.clone()];
    index.insert(start.clone(), 0);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for g in 1..=rank {
            for sign in [1i32, -1] {
                let t: Vec<usize> = factors
                    .iter()
                    .zip(&s)
                    .map(|(c, &si)| c.act_letter(si, sign * g as i32))
                    .collect();
                if !index.contains_key(&t) {
                    index.insert(t.clone(), order.len());
                    order.push(t.clone());
                    queue.push_back(t);
                }
            }
        }
    }
    let d = order.len();
    let mut perms = Vec::with_capacity(rank);
    for g in 1..=rank {
        let images: Vec<usize> = order
            .iter()
            .map(|s| {
                let t: Vec<usize> = factors
                    .iter()
                    .zip(s)
                    .map(|(c, &si)| c.act_letter(si, g as i32))
                    .collect();
                index[&t]
            })
            .collect();
        perms.push(Perm::from_images(images)?);
    }
    let projections: Vec<Vec<usize>> = (0..factors.len())
        .map(|i| (0..d).map(|s| order[s][i]).collect())
        .collect();
    let cover = PermCover::build(first.base().clone(), perms, 0)?;
    Ok(FiberProduct { cover, projections })
}

pub fn fiber_product(c1: &PermCover, c2: &PermCover) -> Result<FiberProduct> {
    fiber_product_many(&[c1, c2])
}

/// Full preimage (transfer) of a loop on a factor cover: the list of closed
/// components over it in the fiber product.
pub fn transfer_loop(
    fp: &PermCover,
    projection: &[usize],
    lp: &CoverLoop,
) -> Result<Vec<CoverLoop>> {
    if projection.len() != fp.degree() {
        return Err(Error::DegreeMismatch {
            expected: fp.degree(),
            got: projection.len(),
        });
    }
    let letters = lp.base_letters();
    let s0 = lp.start();
    let mut components = Vec::new();
    let mut used = vec![false; fp.degree()];
    for s in 0..fp.degree() {
        if projection[s] != s0 || used[s] {
            continue;
        }
        let mut steps = Vec::new();
        let mut t = s;
        loop {
            used[t] = true;
            let (st, end) = fp.path_steps_letters(t, &letters);
            steps.extend(st);
            t = end;
            if t == s {
                break;
            }
        }
        components.push(CoverLoop::new(fp, steps)?);
    }
    Ok(components)
}

/// Pulls a loop back along the correspondence between a cover of the filled
/// surface (fewer punctures) and a cover of the unfilled surface whose
/// representation restricts to the same permutations on the shared
/// generators.
pub fn pullback_class(
    c_plus: &PermCover,
    alpha_plus: &CoverLoop,
    c: &PermCover,
) -> Result<CoverLoop> {
    if c_plus.degree() != c.degree() {
        return Err(Error::DegreeMismatch {
            expected: c_plus.degree(),
            got: c.degree(),
        });
    }
    // match shared generators by name
    for (gi, name) in c_plus.base().gen_names().iter().enumerate() {
        let ci = c
            .base()
            .gen_names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "covers do not correspond: generator \"{name}\" missing downstairs"
                ))
            })?;
        if c_plus.perms()[gi] != c.perms()[ci] {
            return Err(Error::InvalidInput(format!(
                "covers do not correspond: permutation of \"{name}\" differs"
            )));
        }
    }
    let remap: Vec<i32> = c_plus
        .base()
        .gen_names()
        .iter()
        .map(|name| {
            c.base()
                .gen_names()
                .iter()
                .position(|n| n == name)
                .unwrap() as i32
                + 1
        })
        .collect();
    let steps: Vec<Step> = alpha_plus
        .steps()
        .iter()
        .map(|st| Step {
            sheet: st.sheet,
            letter: st.letter.signum() * remap[st.letter.unsigned_abs() as usize - 1],
        })
        .collect();
    CoverLoop::new(c, steps)
}
