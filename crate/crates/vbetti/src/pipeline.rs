//! End-to-end constructions: the Case 1 grid cover, the Case 2
//! triangle-quotient covers, the multi-puncture fiber-product construction,
//! and the cone-point reduction, each producing a self-verifying report.
//!
//! Composition convention everywhere: the right factor of a composition acts
//! first, and a twist word like `Dx Dy^4` denotes `compose(Dx, Dy^4)`.

use crate::cover::{
    build_cover, fiber_product_many, grid_cover, minimal_lifting_power, pullback_class,
    transfer_loop, CoverDescriptor, CoverLoop, FatSurface, GridCover, PermCover,
};
use crate::error::{Error, Result};
use crate::exact::{Perm, Rat};
use crate::fpgroup::{
    commutator_xy, mapping_torus_presentation_words, standard_names, theta, FreeAut, FreeWord,
};
use crate::homology::{
    betti_mapping_torus, betti_oracle, fixed_pair_search, fixed_subspace_dim_of_canonical_lifts,
    FixedPairJson, H1Basis,
};
use crate::triangle::{
    case2_certificates, case2_cover, dim_bound, find_triangle_quotient, Case2Data, QuotientJson,
};
use serde::Serialize;

/// Tunables shared by all pipeline runs.
#[derive(Clone, Copy, Debug)]
pub struct PipelineConfig {
    /// Bound for the power search "replace f by a power".
    pub power_bound: u32,
    /// Size cap for quotient group tables.
    pub quotient_cap: usize,
    /// Random candidates per prime in the quotient search.
    pub quotient_budget: u32,
    /// Seed for all randomized searches.
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            power_bound: 64,
            quotient_cap: 10_000,
            quotient_budget: 200,
            seed: 7,
        }
    }
}

/// Certificates embedded in a report.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ReportCertificates {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_pair: Option<FixedPairJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient: Option<QuotientJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case2: Option<Case2Data>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub joint_fixed_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim_bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub independent_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intersection_matrix: Option<Vec<Vec<i64>>>,
}

/// The output certificate of a pipeline run.
#[derive(Clone, Debug, Serialize)]
pub struct BettiReport {
    pub schema_version: u32,
    pub construction: String,
    pub monodromy: String,
    pub composition_convention: String,
    /// Power m actually lifted; b1 claims attach to the mapping torus of
    /// f^m.
    pub power: u32,
    pub cone_order: u32,
    pub covers: Vec<CoverDescriptor>,
    pub lifts_found: usize,
    pub fixed_dims_per_lift: Vec<usize>,
    pub max_fixed_dim: usize,
    pub base_betti: u64,
    pub cover_betti_formula: u64,
    pub cover_betti_oracle: u64,
    pub inequality_holds: bool,
    pub certificates: ReportCertificates,
}

impl BettiReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable rendering, derived from the same data as the JSON.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{} run for monodromy {} (power {}, cone order {})\n",
            self.construction, self.monodromy, self.power, self.cone_order
        ));
        for c in &self.covers {
            out.push_str(&format!(
                "  cover: degree {}, genus {}, {} punctures\n",
                c.degree,
                c.genus,
                c.punctures.len()
            ));
        }
        out.push_str(&format!(
            "  lifts: {}; fixed dims per lift: {:?} (max {})\n",
            self.lifts_found, self.fixed_dims_per_lift, self.max_fixed_dim
        ));
        out.push_str(&format!(
            "  b1(base mapping torus) = {}\n  b1(cover mapping torus) = {} (formula) = {} (oracle)\n",
            self.base_betti, self.cover_betti_formula, self.cover_betti_oracle
        ));
        out.push_str(&format!("  inequality holds: {}\n", self.inequality_holds));
        out
    }
}

/// The standard Case 1 grid cover: r = 4, sigma1 = sigma3 = (1 2 3 4),
/// sigma2 = sigma4 the inverse.
pub fn case1_grid() -> Result<GridCover> {
    let s = Perm::from_cycle(4, &[0, 1, 2, 3])?;
    grid_cover(4, [s.clone(), s.inverse(), s.clone(), s.inverse()])
}

/// b1 of the base mapping torus over `T(n)` (or the multi-cone base),
/// computed by both the formula and the oracle on the trivial cover.
fn base_betti(base: &FatSurface, f: &FreeAut, n: u32) -> Result<u64> {
    let triv = build_cover(base.clone(), vec![Perm::identity(1); base.rank()])?;
    let basis = H1Basis::new(&triv);
    let act = basis.action(f, &[0])?;
    let formula = betti_mapping_torus(&basis, &act, n)?;
    let oracle = betti_oracle(&triv, f, &[0], n)?;
    if formula != oracle {
        return Err(Error::CertificateViolation(format!(
            "base b1 formula {formula} != oracle {oracle}"
        )));
    }
    Ok(formula)
}

/// Per-lift fixed dimensions on boundary-killed homology; returns the dims
/// and the index of the first lift attaining the maximum.
fn lift_fixed_dims(
    basis: &H1Basis<'_>,
    f: &FreeAut,
    lifts: &[Vec<usize>],
) -> Result<(Vec<usize>, usize)> {
    let mut dims = Vec::with_capacity(lifts.len());
    for lam in lifts {
        let a = basis.killed_action(f, lam)?;
        dims.push(crate::homology::fixed_dim(&a));
    }
    let max = *dims.iter().max().expect("nonempty lift set");
    let argmax = dims.iter().position(|&d| d == max).unwrap();
    Ok((dims, argmax))
}

/// Case 1 (n = 2): the Figure-style 16-fold grid cover.
pub fn run_case1(f: &FreeAut, label: &str, cfg: &PipelineConfig) -> Result<BettiReport> {
    if f.rank() != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            got: f.rank(),
        });
    }
    let grid = case1_grid()?;
    let cover = grid.cover();
    let (m, lifts) = minimal_lifting_power(cover, f, cfg.power_bound)?;
    let fm = f.pow(m as i64)?;
    let base = base_betti(&FatSurface::punctured_torus(), &fm, 2)?;
    let basis = H1Basis::new(cover);
    let (dims, argmax) = lift_fixed_dims(&basis, &fm, &lifts)?;
    let max = dims[argmax];
    let act = basis.action(&fm, &lifts[argmax])?;
    if !act.preserves_form(&basis) {
        return Err(Error::CertificateViolation(
            "boundary-killed action is not symplectic".into(),
        ));
    }
    let formula = betti_mapping_torus(&basis, &act, 2)?;
    let oracle = betti_oracle(cover, &fm, &lifts[argmax], 2)?;
    if formula != oracle {
        return Err(Error::CertificateViolation(format!(
            "cover b1 formula {formula} != oracle {oracle}"
        )));
    }
    let pair = fixed_pair_search(&grid, &basis)?;
    if pair.joint_fixed_dim < 2 {
        return Err(Error::CertificateViolation(
            "joint fixed space has dimension < 2".into(),
        ));
    }
    let inequality_holds = formula > base;
    if !inequality_holds {
        return Err(Error::CertificateViolation(format!(
            "cover b1 {formula} does not exceed base b1 {base}"
        )));
    }
    Ok(BettiReport {
        schema_version: 1,
        construction: "case1".into(),
        monodromy: label.into(),
        composition_convention: "right factor acts first".into(),
        power: m,
        cone_order: 2,
        covers: vec![cover.descriptor()],
        lifts_found: lifts.len(),
        fixed_dims_per_lift: dims,
        max_fixed_dim: max,
        base_betti: base,
        cover_betti_formula: formula,
        cover_betti_oracle: oracle,
        inequality_holds,
        certificates: ReportCertificates {
            fixed_pair: Some(pair.to_json()),
            joint_fixed_dim: Some(pair.joint_fixed_dim),
            ..Default::default()
        },
    })
}

/// Case 2 (n >= 3): triangle-quotient grid cover with the dimension bound
/// `2 + N(1 - 2/n)`.
pub fn run_case2(n: u32, f: &FreeAut, label: &str, cfg: &PipelineConfig) -> Result<BettiReport> {
    if n < 3 {
        return Err(Error::InvalidInput("case 2 requires n >= 3".into()));
    }
    if f.rank() != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            got: f.rank(),
        });
    }
    let cert = find_triangle_quotient(n, cfg.quotient_cap, cfg.quotient_budget, cfg.seed)?;
    let case2 = case2_certificates(&cert)?;
    // left-regular cycle counting identity, asserted as a certificate
    let nn = cert.order;
    if case2.cycles_a != nn / (2 * n as usize)
        || case2.cycles_b != nn / (2 * n as usize)
        || case2.cycles_ab != nn / n as usize
    {
        return Err(Error::CertificateViolation(
            "left-regular cycle counts do not match N/order".into(),
        ));
    }
    let grid = case2_cover(&cert)?;
    let cover = grid.cover();
    cover.orbifold_fill(n)?;
    let (m, lifts) = minimal_lifting_power(cover, f, cfg.power_bound)?;
    let fm = f.pow(m as i64)?;
    let base = base_betti(&FatSurface::punctured_torus(), &fm, n)?;
    let basis = H1Basis::new(cover);
    let joint = fixed_subspace_dim_of_canonical_lifts(&grid, &basis)?;
    let bound: Rat = dim_bound(n, cert.order);
    let achieved = Rat::from_integer(joint.into());
    if achieved < bound {
        return Err(Error::CertificateViolation(format!(
            "achieved joint fixed dimension {joint} below bound {bound}"
        )));
    }
    let (dims, argmax) = lift_fixed_dims(&basis, &fm, &lifts)?;
    let max = dims[argmax];
    let act = basis.action(&fm, &lifts[argmax])?;
    if !act.preserves_form(&basis) {
        return Err(Error::CertificateViolation(
            "boundary-killed action is not symplectic".into(),
        ));
    }
    let formula = betti_mapping_torus(&basis, &act, n)?;
    let oracle = betti_oracle(cover, &fm, &lifts[argmax], n)?;
    if formula != oracle {
        return Err(Error::CertificateViolation(format!(
            "cover b1 formula {formula} != oracle {oracle}"
        )));
    }
    if formula < base {
        return Err(Error::CertificateViolation(format!(
            "cover b1 {formula} below base b1 {base}"
        )));
    }
    Ok(BettiReport {
        schema_version: 1,
        construction: "case2".into(),
        monodromy: label.into(),
        composition_convention: "right factor acts first".into(),
        power: m,
        cone_order: n,
        covers: vec![cover.descriptor()],
        lifts_found: lifts.len(),
        fixed_dims_per_lift: dims,
        max_fixed_dim: max,
        base_betti: base,
        cover_betti_formula: formula,
        cover_betti_oracle: oracle,
        inequality_holds: formula >= base,
        certificates: ReportCertificates {
            quotient: Some(cert.to_json()),
            case2: Some(case2),
            joint_fixed_dim: Some(joint),
            dim_bound: Some(bound.to_string()),
            ..Default::default()
        },
    })
}

/// The multi-puncture construction: one degree-16 cover per puncture,
/// fiber product, transferred fixed classes, and `b1 >= 2k + 1`.
pub fn run_multik(k: usize, f: &FreeAut, label: &str, cfg: &PipelineConfig) -> Result<BettiReport> {
    if k < 2 {
        return Err(Error::InvalidInput("multik requires k >= 2".into()));
    }
    let rank = k + 1;
    if f.rank() != rank {
        return Err(Error::RankMismatch {
            expected: rank,
            got: f.rank(),
        });
    }
    let base_k = FatSurface::k_punctured_torus(k);
    let grid = case1_grid()?;
    let gcover = grid.cover();
    let gbasis = H1Basis::new(gcover);
    let pair = fixed_pair_search(&grid, &gbasis)?;

    // the k covers of the k-punctured torus: x, y act as on the grid cover;
    // the surviving cone loop maps to the commutator, the rest die
    let comm = commutator_xy();
    let d16 = gcover.degree();
    let comm_perm = Perm::from_images((0..d16).map(|s| gcover.act_word(s, &comm)).collect())?;
    let mut factors: Vec<PermCover> = Vec::with_capacity(k);
    for i in 1..=k {
        let mut perms = vec![gcover.perms()[0].clone(), gcover.perms()[1].clone()];
        for j in 1..k {
            perms.push(if j == i {
                comm_perm.clone()
            } else {
                Perm::identity(d16)
            });
        }
        factors.push(build_cover(base_k.clone(), perms)?);
    }
    // pull the fixed pair back to each factor
    let mut pulled: Vec<(CoverLoop, CoverLoop)> = Vec::with_capacity(k);
    for fac in &factors {
        let d = pullback_class(gcover, &pair.delta, fac)?;
        let ds = pullback_class(gcover, &pair.delta_star, fac)?;
        pulled.push((d, ds));
    }
    let fp = fiber_product_many(&factors.iter().collect::<Vec<_>>())?;
    let cover = &fp.cover;
    cover.orbifold_fill(2)?;

    // transfer the 2k classes upstairs
    let mut chains: Vec<Vec<CoverLoop>> = Vec::with_capacity(2 * k);
    for (i, (d, ds)) in pulled.iter().enumerate() {
        chains.push(transfer_loop(cover, &fp.projections[i], d)?);
        chains.push(transfer_loop(cover, &fp.projections[i], ds)?);
    }
    let basis = H1Basis::new(cover);
    let classes: Vec<Vec<Rat>> = chains.iter().map(|ch| basis.chain_class(ch)).collect();
    let rank_matrix = crate::exact::RatMatrix::from_rows(&classes);
    let independent_rank = rank_matrix.rank();
    if independent_rank != 2 * k {
        return Err(Error::CertificateViolation(format!(
            "transferred classes have rank {independent_rank} < {}",
            2 * k
        )));
    }
    let imat = crate::homology::chain_intersection_matrix(cover, &chains);
    for i in 0..k {
        if imat[2 * i][2 * i + 1] == 0 {
            return Err(Error::CertificateViolation(format!(
                "transferred pair {} has zero intersection",
                i + 1
            )));
        }
        for j in 0..k {
            if i == j {
                continue;
            }
            for (r, c) in [
                (2 * i, 2 * j),
                (2 * i, 2 * j + 1),
                (2 * i + 1, 2 * j),
                (2 * i + 1, 2 * j + 1),
            ] {
                if imat[r][c] != 0 {
                    return Err(Error::CertificateViolation(
                        "cross-pair intersection is nonzero".into(),
                    ));
                }
            }
        }
    }

    let (m, lifts) = minimal_lifting_power(cover, f, cfg.power_bound)?;
    let fm = f.pow(m as i64)?;
    let base = base_betti(&base_k, &fm, 2)?;
    // one pass over the lifts: fixed dimension and class-fixing check share
    // the killed action
    let mut dims = Vec::with_capacity(lifts.len());
    let mut found_fixing_lift = false;
    for lam in &lifts {
        let a = basis.killed_action(&fm, lam)?;
        dims.push(crate::homology::fixed_dim(&a));
        if !found_fixing_lift && classes.iter().all(|cl| a.mul_vec(cl) == *cl) {
            found_fixing_lift = true;
        }
    }
    let max = *dims.iter().max().expect("nonempty lift set");
    let argmax = dims.iter().position(|&d| d == max).unwrap();
    if !found_fixing_lift {
        return Err(Error::CertificateViolation(
            "no lift fixes all transferred classes".into(),
        ));
    }
    let act = basis.action(&fm, &lifts[argmax])?;
    if !act.preserves_form(&basis) {
        return Err(Error::CertificateViolation(
            "boundary-killed action is not symplectic".into(),
        ));
    }
    let formula = betti_mapping_torus(&basis, &act, 2)?;
    let oracle = betti_oracle(cover, &fm, &lifts[argmax], 2)?;
    if formula != oracle {
        return Err(Error::CertificateViolation(format!(
            "cover b1 formula {formula} != oracle {oracle}"
        )));
    }
    let target = 2 * k as u64 + 1;
    if formula < target {
        return Err(Error::CertificateViolation(format!(
            "cover b1 {formula} below target {target}"
        )));
    }
    if formula < base {
        return Err(Error::CertificateViolation(format!(
            "cover b1 {formula} below base b1 {base}"
        )));
    }
    Ok(BettiReport {
        schema_version: 1,
        construction: "multik".into(),
        monodromy: label.into(),
        composition_convention: "right factor acts first".into(),
        power: m,
        cone_order: 2,
        covers: vec![cover.descriptor()],
        lifts_found: lifts.len(),
        fixed_dims_per_lift: dims,
        max_fixed_dim: max,
        base_betti: base,
        cover_betti_formula: formula,
        cover_betti_oracle: oracle,
        inequality_holds: formula >= target,
        certificates: ReportCertificates {
            fixed_pair: Some(pair.to_json()),
            independent_rank: Some(independent_rank),
            intersection_matrix: Some(imat),
            ..Default::default()
        },
    })
}

/// Report of a cone-point reduction run.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionReport {
    pub schema_version: u32,
    pub monodromy: String,
    pub surviving_cone: usize,
    pub cone_orders: Vec<u32>,
    pub power: u32,
    pub theta: String,
    pub b1_total: u64,
    pub b1_quotient: u64,
    pub b1_direct: u64,
    pub surjection_verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub downstream: Option<Box<BettiReport>>,
}

impl ReductionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn fixes_boundary_words(base: &FatSurface, f: &FreeAut) -> bool {
    base.boundary_words().iter().all(|bw| {
        let img = f.apply(bw).cyclically_reduced();
        let bw = bw.cyclically_reduced();
        img.is_rotation_of(&bw) || img.is_rotation_of(&bw.inverse())
    })
}

/// The reduction to a single cone point: builds the mapping-torus
/// presentation over `T(n_1..n_k)`, the kill-generators quotient keeping the
/// i-th cone, the direct presentation over `T(n_i)`, verifies
/// `b1(total) >= b1(quotient) = b1(direct)`, and optionally feeds the
/// reduced monodromy to `run_case1`/`run_case2`.
pub fn run_reduction(
    f: &FreeAut,
    i: usize,
    cone_orders: &[u32],
    label: &str,
    cfg: &PipelineConfig,
    downstream: bool,
) -> Result<ReductionReport> {
    let rank = f.rank();
    if rank < 2 {
        return Err(Error::InvalidInput("reduction needs rank >= 2".into()));
    }
    let k = rank - 1;
    if cone_orders.len() != k {
        return Err(Error::InvalidInput(format!(
            "expected {k} cone orders, got {}",
            cone_orders.len()
        )));
    }
    if cone_orders.iter().any(|&n| n < 2) {
        return Err(Error::InvalidInput("cone orders must be >= 2".into()));
    }
    if i == 0 || i > k {
        return Err(Error::InvalidInput(format!(
            "cone index {i} out of range 1..={k}"
        )));
    }
    let base = FatSurface::k_punctured_torus(k);
    let names = standard_names(rank);

    // power search: f^m must fix every boundary word up to rotation and
    // inversion and theta must validate
    let mut m = 0u32;
    let mut fm = FreeAut::identity(rank);
    let mut th = None;
    for cand in 1..=cfg.power_bound {
        fm = fm.compose(f)?;
        // twist-word powers can grow exponentially; give up rather than hang
        let total: usize = (1..=rank).map(|g| fm.image(g).letters().len()).sum();
        if total > 100_000 {
            break;
        }
        if fixes_boundary_words(&base, &fm) {
            if let Ok(t) = theta(&fm, i) {
                m = cand;
                th = Some(t);
                break;
            }
        }
    }
    let Some(th) = th else {
        return Err(Error::PowerBoundExceeded {
            bound: cfg.power_bound,
        });
    };

    let cones: Vec<(FreeWord, u32)> = base
        .boundary_words()
        .iter()
        .zip(cone_orders)
        .map(|(w, &n)| (w.clone(), n))
        .collect();
    let gamma = mapping_torus_presentation_words(&fm, &names, &cones)?;
    let b1_total = gamma.abelianization_rank() as u64;

    // quotient: kill every other cone loop (the last boundary word is not a
    // generator; killing it adds the word itself as a relator)
    let mut with_last = gamma.clone();
    if i < k {
        with_last
            .relators
            .push(base.boundary_words()[k - 1].clone());
    }
    let kill_idxs: Vec<usize> = (1..k).filter(|&j| j != i).map(|j| j + 1).collect();
    let delta_killed = with_last.kill_generators(&kill_idxs);
    let b1_quotient = delta_killed.abelianization_rank() as u64;

    // direct presentation of the reduced bundle over T(n_i)
    let n_i = cone_orders[i - 1];
    let delta_direct = mapping_torus_presentation_words(
        &th,
        &standard_names(2),
        &[(commutator_xy(), n_i)],
    )?;
    let b1_direct = delta_direct.abelianization_rank() as u64;

    if b1_quotient != b1_direct {
        return Err(Error::CertificateViolation(format!(
            "kill-generators quotient b1 {b1_quotient} != direct presentation b1 {b1_direct}"
        )));
    }
    if b1_total < b1_quotient {
        return Err(Error::CertificateViolation(format!(
            "b1 of the total space {b1_total} below its quotient {b1_quotient}"
        )));
    }

    let downstream_report = if downstream {
        let sub_label = format!("theta_{i}({label})^{m}");
        Some(Box::new(if n_i == 2 {
            run_case1(&th, &sub_label, cfg)?
        } else {
            run_case2(n_i, &th, &sub_label, cfg)?
        }))
    } else {
        None
    };

    Ok(ReductionReport {
        schema_version: 1,
        monodromy: label.into(),
        surviving_cone: i,
        cone_orders: cone_orders.to_vec(),
        power: m,
        theta: th.display(&standard_names(2)).replace('\n', "; "),
        b1_total,
        b1_quotient,
        b1_direct,
        surjection_verified: true,
        downstream: downstream_report,
    })
}
