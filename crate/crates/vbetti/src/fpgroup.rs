//! Free groups, free-group automorphisms, finitely presented groups,
//! mapping-torus presentations and Reidemeister–Schreier subgroup
//! presentations.
//!
//! Words are stored freely reduced as signed generator indices (`+g`/`-g`,
//! `g` starting at 1). Composition of automorphisms is right-to-left: in
//! `compose(a, b)` the right factor `b` acts first.

use crate::error::{Error, Result};
use crate::exact::{smith_normal_form, IntMatrix, Perm};
use num_bigint::BigInt;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// free words
// ---------------------------------------------------------------------------

/// A freely reduced word in a free group.
#[derive(Clone, PartialEq, Eq, Debug, Hash, Default)]
pub struct FreeWord {
    letters: Vec<i32>,
}

impl FreeWord {
    pub fn empty() -> FreeWord {
        FreeWord::default()
    }

    pub fn generator(g: usize) -> FreeWord {
        FreeWord {
            letters: vec![g as i32],
        }
    }

    /// Builds a word from signed letters, freely reducing.
    pub fn from_letters(letters: &[i32]) -> FreeWord {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for &l in letters {
            assert!(l != 0, "letter 0 is not a generator");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord { letters: out }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut out = self.letters.clone();
        for &l in &other.letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord { letters: out }
    }

    pub fn repeat(&self, k: usize) -> FreeWord {
        let mut out = FreeWord::empty();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn max_generator(&self) -> usize {
        self.letters.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn exponent_sums(&self, rank: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::from(0); rank];
        for &l in &self.letters {
            let i = l.unsigned_abs() as usize - 1;
            if l > 0 {
                out[i] += 1;
            } else {
                out[i] -= 1;
            }
        }
        out
    }

    pub fn cyclically_reduced(&self) -> FreeWord {
        let mut w = self.letters.clone();
        while w.len() >= 2 && *w.first().unwrap() == -*w.last().unwrap() {
            w.pop();
            w.remove(0);
        }
        FreeWord { letters: w }
    }

    /// True if `self` is a cyclic rotation of `other` (both assumed
    /// cyclically reduced).
    pub fn is_rotation_of(&self, other: &FreeWord) -> bool {
        if self.len() != other.len() {
            return false;
        }
        if self.is_empty() {
            return true;
        }
        let n = self.len();
        (0..n).any(|k| (0..n).all(|i| self.letters[i] == other.letters[(i + k) % n]))
    }

    /// Parses a whitespace-separated word over named generators; a token
    /// whose first letter is uppercased denotes the inverse (`X` = x^-1,
    /// `Z1` = z1^-1). `"1"`, `"e"` and the empty string denote the identity.
    pub fn parse(s: &str, names: &[String]) -> Result<FreeWord> {
        let s = s.trim();
        if s.is_empty() || s == "1" || s == "e" {
            return Ok(FreeWord::empty());
        }
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if let Some(i) = names.iter().position(|n| n == tok) {
                letters.push(i as i32 + 1);
                continue;
            }
            let lowered: String = tok
                .chars()
                .enumerate()
                .map(|(i, c)| if i == 0 { c.to_ascii_lowercase() } else { c })
                .collect();
            if let Some(i) = names.iter().position(|n| *n == lowered) {
                letters.push(-(i as i32 + 1));
                continue;
            }
            return Err(Error::Parse(format!(
                "unknown generator token \"{tok}\" (alphabet: {})",
                names.join(" ")
            )));
        }
        Ok(FreeWord::from_letters(&letters))
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.is_empty() {
            return "1".into();
        }
        self.letters
            .iter()
            .map(|&l| {
                let name = &names[l.unsigned_abs() as usize - 1];
                if l > 0 {
                    name.clone()
                } else {
                    let mut cs = name.chars();
                    let first = cs.next().unwrap().to_ascii_uppercase();
                    std::iter::once(first).chain(cs).collect()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// The commutator `[x, y] = x y x^-1 y^-1` (boundary word of the
/// once-punctured torus).
pub fn commutator_xy() -> FreeWord {
    FreeWord::from_letters(&[1, 2, -1, -2])
}

/// Default generator names `x, y, z1 .. z{rank-2}`.
pub fn standard_names(rank: usize) -> Vec<String> {
    let mut out = vec!["x".to_string(), "y".to_string()];
    for i in 1..rank.saturating_sub(1) {
        out.push(format!("z{i}"));
    }
    out.truncate(rank);
    out
}

// ---------------------------------------------------------------------------
// free-group automorphisms
// ---------------------------------------------------------------------------

/// A free-group automorphism given by generator images, with an optional
/// certified inverse.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreeAut {
    rank: usize,
    images: Vec<FreeWord>,
    inverse_images: Option<Vec<FreeWord>>,
}

impl FreeAut {
    pub fn identity(rank: usize) -> FreeAut {
        let images: Vec<FreeWord> = (1..=rank).map(FreeWord::generator).collect();
        FreeAut {
            rank,
            images: images.clone(),
            inverse_images: Some(images),
        }
    }

    /// Constructs an endomorphism; when `inverse_images` is given, both
    /// compositions are verified to be the identity.
    pub fn new(images: Vec<FreeWord>, inverse_images: Option<Vec<FreeWord>>) -> Result<FreeAut> {
        let rank = images.len();
        for w in images.iter().chain(inverse_images.iter().flatten()) {
            if w.max_generator() > rank {
                return Err(Error::InvalidInput(format!(
                    "image word uses generator beyond rank {rank}"
                )));
            }
        }
        let a = FreeAut {
            rank,
            images,
            inverse_images,
        };
        if let Some(inv) = &a.inverse_images {
            if inv.len() != rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    got: inv.len(),
                });
            }
            let b = FreeAut {
                rank,
                images: inv.clone(),
                inverse_images: None,
            };
            for g in 1..=rank {
                let gw = FreeWord::generator(g);
                if a.apply(&b.apply(&gw)) != gw || b.apply(&a.apply(&gw)) != gw {
                    return Err(Error::NotAutomorphism(
                        "claimed inverse does not invert".into(),
                    ));
                }
            }
        }
        Ok(a)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn image(&self, g: usize) -> &FreeWord {
        &self.images[g - 1]
    }

    pub fn images(&self) -> &[FreeWord] {
        &self.images
    }

    pub fn has_certified_inverse(&self) -> bool {
        self.inverse_images.is_some()
    }

    pub fn inverse(&self) -> Result<FreeAut> {
        let inv = self
            .inverse_images
            .clone()
            .ok_or(Error::NoCertifiedInverse)?;
        Ok(FreeAut {
            rank: self.rank,
            images: inv,
            inverse_images: Some(self.images.clone()),
        })
    }

    /// Image of a word; homomorphic and freely reduced.
    pub fn apply(&self, w: &FreeWord) -> FreeWord {
        let mut out: Vec<i32> = Vec::new();
        for &l in w.letters() {
            let img = &self.images[l.unsigned_abs() as usize - 1];
            let push = |out: &mut Vec<i32>, m: i32| {
                if out.last() == Some(&-m) {
                    out.pop();
                } else {
                    out.push(m);
                }
            };
            if l > 0 {
                for &m in img.letters() {
                    push(&mut out, m);
                }
            } else {
                for &m in img.letters().iter().rev() {
                    push(&mut out, -m);
                }
            }
        }
        FreeWord::from_letters(&out)
    }

    /// `compose(a, b)`: `b` acts first; `apply(compose(a,b), w) =
    /// apply(a, apply(b, w))`.
    pub fn compose(&self, b: &FreeAut) -> Result<FreeAut> {
        if self.rank != b.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: b.rank,
            });
        }
        let images: Vec<FreeWord> = b.images.iter().map(|w| self.apply(w)).collect();
        let inverse_images = match (&self.inverse_images, &b.inverse_images) {
            (Some(_), Some(binv)) => {
                let bi = FreeAut {
                    rank: self.rank,
                    images: binv.clone(),
                    inverse_images: None,
                };
                let ai = FreeAut {
                    rank: self.rank,
                    images: self.inverse_images.clone().unwrap(),
                    inverse_images: None,
                };
                // (a b)^-1 = b^-1 a^-1
                Some(ai.images.iter().map(|w| bi.apply(w)).collect())
            }
            _ => None,
        };
        FreeAut::new(images, inverse_images)
    }

    pub fn pow(&self, e: i64) -> Result<FreeAut> {
        let base = if e < 0 {
            self.inverse()?
        } else {
            self.clone()
        };
        let mut out = FreeAut::identity(self.rank);
        for _ in 0..e.unsigned_abs() {
            out = out.compose(&base)?;
        }
        Ok(out)
    }

    /// `D_x`: x -> x, y -> y x (fixes z's and the boundary word exactly).
    pub fn dehn_twist_x(rank: usize) -> FreeAut {
        let mut images: Vec<FreeWord> = (1..=rank).map(FreeWord::generator).collect();
        let mut inv = images.clone();
        images[1] = FreeWord::from_letters(&[2, 1]);
        inv[1] = FreeWord::from_letters(&[2, -1]);
        FreeAut::new(images, Some(inv)).expect("twist is an automorphism")
    }

    /// `D_y`: x -> x y^-1, y -> y (fixes z's and the boundary word exactly).
    pub fn dehn_twist_y(rank: usize) -> FreeAut {
        let mut images: Vec<FreeWord> = (1..=rank).map(FreeWord::generator).collect();
        let mut inv = images.clone();
        images[0] = FreeWord::from_letters(&[1, -2]);
        inv[0] = FreeWord::from_letters(&[1, 2]);
        FreeAut::new(images, Some(inv)).expect("twist is an automorphism")
    }

    /// Parses a twist word such as `"Dx Dy^4 Dx^-1"` (also `"id"`); factors
    /// are applied right to left, matching the composition convention.
    pub fn parse_twist_word(s: &str, rank: usize) -> Result<FreeAut> {
        let s = s.trim();
        let mut out = FreeAut::identity(rank);
        if s.is_empty() || s == "id" {
            return Ok(out);
        }
        for tok in s.split_whitespace() {
            let (base, exp) = match tok.split_once('^') {
                Some((b, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad exponent in \"{tok}\"")))?;
                    (b, e)
                }
                None => (tok, 1),
            };
            let twist = match base {
                "Dx" => FreeAut::dehn_twist_x(rank),
                "Dy" => FreeAut::dehn_twist_y(rank),
                _ => {
                    return Err(Error::Parse(format!(
                        "unknown twist \"{base}\" (expected Dx or Dy)"
                    )))
                }
            };
            out = out.compose(&twist.pow(exp)?)?;
        }
        Ok(out)
    }

    /// Column `j` = exponent sums of the image of generator `j`.
    pub fn abelianized_matrix(&self) -> IntMatrix {
        let mut m = IntMatrix::zero(self.rank, self.rank);
        for (j, w) in self.images.iter().enumerate() {
            for (i, e) in w.exponent_sums(self.rank).into_iter().enumerate() {
                m.set(i, j, e);
            }
        }
        m
    }

    /// Text form per the external interface: one line per generator,
    /// `y -> y x`, uppercase = inverse.
    pub fn display(&self, names: &[String]) -> String {
        self.images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{} -> {}", names[i], w.display(names)))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Parses the text form emitted by [`FreeAut::display`]; the inverse is
    /// not certified (use [`FreeAut::new`] directly to supply one).
    pub fn parse_text(s: &str, names: &[String]) -> Result<FreeAut> {
        let mut images = vec![None; names.len()];
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("missing \"->\" in \"{line}\"")))?;
            let lhs = lhs.trim();
            let gi = names
                .iter()
                .position(|n| n == lhs)
                .ok_or_else(|| Error::Parse(format!("unknown generator \"{lhs}\"")))?;
            images[gi] = Some(FreeWord::parse(rhs, names)?);
        }
        let images: Result<Vec<FreeWord>> = images
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                w.ok_or_else(|| Error::Parse(format!("no image given for \"{}\"", names[i])))
            })
            .collect();
        FreeAut::new(images?, None)
    }
}

/// `apply_aut` free function mirroring the operation-level interface.
pub fn apply_aut(a: &FreeAut, w: &FreeWord) -> FreeWord {
    a.apply(w)
}

/// `compose_auts(a, b)`: right factor acts first.
pub fn compose_auts(a: &FreeAut, b: &FreeAut) -> Result<FreeAut> {
    a.compose(b)
}

// ---------------------------------------------------------------------------
// finitely presented groups
// ---------------------------------------------------------------------------

/// A finite presentation; relators are stored freely reduced and nonempty.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FPGroup {
    pub gens: Vec<String>,
    pub relators: Vec<FreeWord>,
}

impl FPGroup {
    pub fn free(gens: Vec<String>) -> FPGroup {
        FPGroup {
            gens,
            relators: Vec::new(),
        }
    }

    pub fn new(gens: Vec<String>, relators: Vec<FreeWord>) -> FPGroup {
        FPGroup {
            gens,
            relators: relators.into_iter().filter(|r| !r.is_empty()).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    /// Q-rank of the abelianization, via Smith normal form of the relator
    /// exponent matrix.
    pub fn abelianization_rank(&self) -> usize {
        if self.relators.is_empty() {
            return self.rank();
        }
        let mut m = IntMatrix::zero(self.relators.len(), self.rank());
        for (i, r) in self.relators.iter().enumerate() {
            for (j, e) in r.exponent_sums(self.rank()).into_iter().enumerate() {
                m.set(i, j, e);
            }
        }
        self.rank() - smith_normal_form(&m).rank
    }

    /// Elementary divisors of the abelianization (torsion report).
    pub fn abelianization_divisors(&self) -> Vec<BigInt> {
        if self.relators.is_empty() {
            return Vec::new();
        }
        let mut m = IntMatrix::zero(self.relators.len(), self.rank());
        for (i, r) in self.relators.iter().enumerate() {
            for (j, e) in r.exponent_sums(self.rank()).into_iter().enumerate() {
                m.set(i, j, e);
            }
        }
        smith_normal_form(&m).diagonal
    }

    /// Adds relators `g = 1` for the given generator indices (0-based) and
    /// erases those generators from all words, renumbering the rest.
    pub fn kill_generators(&self, idxs: &[usize]) -> FPGroup {
        let killed: Vec<bool> = (0..self.rank()).map(|i| idxs.contains(&i)).collect();
        let mut remap = vec![0i32; self.rank()];
        let mut new_gens = Vec::new();
        for i in 0..self.rank() {
            if !killed[i] {
                new_gens.push(self.gens[i].clone());
                remap[i] = new_gens.len() as i32;
            }
        }
        let rewrite = |w: &FreeWord| {
            let letters: Vec<i32> = w
                .letters()
                .iter()
                .filter(|l| !killed[l.unsigned_abs() as usize - 1])
                .map(|&l| l.signum() * remap[l.unsigned_abs() as usize - 1])
                .collect();
            FreeWord::from_letters(&letters)
        };
        FPGroup::new(new_gens, self.relators.iter().map(rewrite).collect())
    }

    pub fn display(&self) -> String {
        let rels = self
            .relators
            .iter()
            .map(|r| r.display(&self.gens))
            .collect::<Vec<_>>()
            .join(", ");
        format!("gens: {} ; rels: {}", self.gens.join(" "), rels)
    }

    /// Parses the `gens: x y t ; rels: t x T X, ...` format.
    pub fn parse(s: &str) -> Result<FPGroup> {
        let (g, r) = s
            .split_once(';')
            .ok_or_else(|| Error::Parse("expected \"gens: ... ; rels: ...\"".into()))?;
        let g = g.trim().strip_prefix("gens:").ok_or_else(|| {
            Error::Parse("presentation must start with \"gens:\"".into())
        })?;
        let r = r.trim().strip_prefix("rels:").ok_or_else(|| {
            Error::Parse("relator list must start with \"rels:\"".into())
        })?;
        let gens: Vec<String> = g.split_whitespace().map(str::to_string).collect();
        let mut relators = Vec::new();
        for part in r.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            relators.push(FreeWord::parse(part, &gens)?);
        }
        Ok(FPGroup::new(gens, relators))
    }
}

/// Mapping-torus presentation of `f` on the free group with generator
/// `names`, with cone relators given as (boundary word, order) pairs:
/// generators `names + t`, relators `t g t^-1 (f g)^-1` plus `w^order`.
pub fn mapping_torus_presentation_words(
    f: &FreeAut,
    names: &[String],
    cones: &[(FreeWord, u32)],
) -> Result<FPGroup> {
    let rank = f.rank();
    if names.len() != rank {
        return Err(Error::RankMismatch {
            expected: rank,
            got: names.len(),
        });
    }
    for (w, n) in cones {
        if *n < 2 {
            return Err(Error::InvalidInput(format!("cone order {n} < 2")));
        }
        if w.max_generator() > rank {
            return Err(Error::InvalidInput("cone word exceeds rank".into()));
        }
    }
    let mut gens: Vec<String> = names.to_vec();
    gens.push("t".to_string());
    let t = rank as i32 + 1;
    let mut relators = Vec::new();
    for g in 1..=rank {
        let conj = FreeWord::from_letters(&[t, g as i32, -t]);
        relators.push(conj.mul(&f.image(g).inverse()));
    }
    for (w, n) in cones {
        relators.push(w.repeat(*n as usize));
    }
    Ok(FPGroup::new(gens, relators))
}

/// Convenience signature: cone points given as generator indices (1-based)
/// whose generator is the boundary word.
pub fn mapping_torus_presentation(
    f: &FreeAut,
    names: &[String],
    cone_orders: &[(usize, u32)],
) -> Result<FPGroup> {
    let cones: Result<Vec<(FreeWord, u32)>> = cone_orders
        .iter()
        .map(|&(g, n)| {
            if g == 0 || g > f.rank() {
                Err(Error::InvalidInput(format!("cone index {g} out of range")))
            } else {
                Ok((FreeWord::generator(g), n))
            }
        })
        .collect();
    mapping_torus_presentation_words(f, names, &cones?)
}

/// The puncture-forgetting map theta_i: deletes every cone generator
/// `z_j` from the images of an automorphism of `F(x, y, z1..z_{k-1})` and
/// validates that the result is an automorphism of `F(x, y)` fixing the
/// boundary class.
///
/// `i` is the (1-based) index of the surviving cone point, `1 <= i <= k`
/// where `k = rank - 1`; the resulting rank-2 automorphism does not depend
/// on `i`, but the index is validated because the caller attaches the i-th
/// cone order to it.
pub fn theta(f: &FreeAut, i: usize) -> Result<FreeAut> {
    let rank = f.rank();
    if rank < 2 {
        return Err(Error::InvalidInput("theta needs rank >= 2".into()));
    }
    let k = rank - 1;
    if i == 0 || i > k {
        return Err(Error::InvalidInput(format!(
            "cone index {i} out of range 1..={k}"
        )));
    }
    let strip = |w: &FreeWord| {
        let letters: Vec<i32> = w
            .letters()
            .iter()
            .copied()
            .filter(|l| l.unsigned_abs() <= 2)
            .collect();
        FreeWord::from_letters(&letters)
    };
    let images: Vec<FreeWord> = f.images()[..2].iter().map(&strip).collect();
    let finv = f.inverse().map_err(|_| {
        Error::NotAutomorphism("theta requires a certified inverse".into())
    })?;
    let inv_images: Vec<FreeWord> = finv.images()[..2].iter().map(&strip).collect();
    let out = FreeAut::new(images, Some(inv_images)).map_err(|_| {
        Error::NotAutomorphism(
            "deleting cone generators did not yield an automorphism of F(x,y); \
             pass to a power of the monodromy first"
                .into(),
        )
    })?;
    // boundary class check: the image of [x,y] must be a cyclic rotation of
    // [x,y] or its inverse
    let comm = commutator_xy();
    let img = out.apply(&comm).cyclically_reduced();
    if !img.is_rotation_of(&comm) && !img.is_rotation_of(&comm.inverse()) {
        return Err(Error::NotAutomorphism(
            "theta image does not preserve the boundary class".into(),
        ));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Reidemeister–Schreier subgroup presentations
// ---------------------------------------------------------------------------

/// Presentation of the basepoint stabilizer of a transitive permutation
/// representation of `g`, via Reidemeister–Schreier rewriting along a BFS
/// Schreier tree.
pub fn subgroup_presentation(g: &FPGroup, rep: &[Perm], basepoint: usize) -> Result<FPGroup> {
    let rank = g.rank();
    if rep.len() != rank {
        return Err(Error::RankMismatch {
            expected: rank,
            got: rep.len(),
        });
    }
    let d = rep.first().map_or(1, Perm::degree);
    for p in rep {
        if p.degree() != d {
            return Err(Error::DegreeMismatch {
                expected: d,
                got: p.degree(),
            });
        }
    }
    if basepoint >= d {
        return Err(Error::InvalidInput("basepoint out of range".into()));
    }
    let inv: Vec<Perm> = rep.iter().map(Perm::inverse).collect();
    let act = |s: usize, l: i32| -> usize {
        if l > 0 {
            rep[l as usize - 1].apply(s)
        } else {
            inv[(-l) as usize - 1].apply(s)
        }
    };
    // relators must die in the representation
    for r in g.relators.iter() {
        let mut p = Perm::identity(d);
        for &l in r.letters() {
            let q = if l > 0 {
                rep[l as usize - 1].clone()
            } else {
                inv[(-l) as usize - 1].clone()
            };
            p = p.then(&q)?;
        }
        if !p.is_identity() {
            return Err(Error::RelatorNotSatisfied {
                relator: r.display(&g.gens),
            });
        }
    }
    // BFS tree
    let mut seen = vec![false; d];
    let mut tree: std::collections::HashSet<(usize, usize)> = Default::default();
    seen[basepoint] = true;
    let mut queue = std::collections::VecDeque::from([basepoint]);
    let mut order = vec![basepoint];
    while let Some(s) = queue.pop_front() {
        for gi in 1..=rank {
            for sign in [1i32, -1] {
                let t = act(s, sign * gi as i32);
                if !seen[t] {
                    seen[t] = true;
                    tree.insert(if sign > 0 { (s, gi) } else { (t, gi) });
                    queue.push_back(t);
                    order.push(t);
                }
            }
        }
    }
    if order.len() != d {
        let mut orbits = vec![order.clone()];
        let mut covered: Vec<bool> = seen.clone();
        for s0 in 0..d {
            if covered[s0] {
                continue;
            }
            let mut orbit = vec![s0];
            covered[s0] = true;
            let mut q2 = std::collections::VecDeque::from([s0]);
            while let Some(s) = q2.pop_front() {
                for gi in 1..=rank {
                    for sign in [1i32, -1] {
                        let t = act(s, sign * gi as i32);
                        if !covered[t] {
                            covered[t] = true;
                            orbit.push(t);
                            q2.push_back(t);
                        }
                    }
                }
            }
            orbits.push(orbit);
        }
        return Err(Error::NonTransitive { orbits });
    }
    // nontree edges = subgroup generators, in deterministic (gen, sheet) order
    let mut ntidx: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for gi in 1..=rank {
        for s in 0..d {
            if !tree.contains(&(s, gi)) {
                let n = ntidx.len();
                ntidx.insert((gi, s), n);
            }
        }
    }
    let sub_gens: Vec<String> = (1..=ntidx.len()).map(|i| format!("s{i}")).collect();
    // rewrite each base relator at each coset
    let rewrite = |start: usize, w: &FreeWord| -> (FreeWord, usize) {
        let mut out: Vec<i32> = Vec::new();
        let mut s = start;
        for &l in w.letters() {
            if l > 0 {
                if let Some(&e) = ntidx.get(&(l as usize, s)) {
                    out.push(e as i32 + 1);
                }
                s = act(s, l);
            } else {
                let t = act(s, l);
                if let Some(&e) = ntidx.get(&((-l) as usize, t)) {
                    out.push(-(e as i32 + 1));
                }
                s = t;
            }
        }
        (FreeWord::from_letters(&out), s)
    };
    let mut relators = Vec::new();
    for r in &g.relators {
        for &s in &order {
            let (w, end) = rewrite(s, r);
            debug_assert_eq!(end, s);
            relators.push(w);
        }
    }
    Ok(FPGroup::new(sub_gens, relators))
}
