//! Algebraic laws of the finite-depth dynamics, each checked exactly on one
//! randomly drawn case. `Ok(false)` means the case was vacuous.

use num_rational::BigRational;
use num_traits::One;
use rand::Rng;

use rank1lab::engine::{build_tower, LevelSet, ShiftPiece, Tower};
use rank1lab::presets::{preset, PresetId};

use super::*;

pub struct Lab {
    pub name: &'static str,
    pub tower: Tower,
    pub geo: Geo,
}

pub fn labs(depth: usize) -> Vec<Lab> {
    let mk = |name, id: PresetId, rule: Box<dyn Fn(usize, usize) -> Rule>| Lab {
        name,
        tower: build_tower(&preset(id).unwrap(), depth).unwrap(),
        geo: Geo::build(BigRational::one(), depth, rule),
    };
    vec![
        mk("chacon", PresetId::Chacon, Box::new(chacon())),
        mk("kakutani", PresetId::Kakutani, Box::new(kakutani())),
        mk("hajian_kakutani", PresetId::HajianKakutani, Box::new(hajian_kakutani())),
        mk("hk_plus1", PresetId::HkPlus1, Box::new(hk_plus1())),
        mk(
            "hk_plus1_lambda",
            PresetId::HkPlus1Lambda(q("1/2")),
            Box::new(hk_plus1_lambda(q("1/2"))),
        ),
        mk(
            "hk_plus1_lambda_2_3",
            PresetId::HkPlus1Lambda(q("2/3")),
            Box::new(hk_plus1_lambda(q("2/3"))),
        ),
        mk(
            "type_iii1",
            PresetId::TypeIii1(q("1/2"), q("1/3")),
            Box::new(type_iii1(q("1/2"), q("1/3"))),
        ),
    ]
}

pub type Law = Result<bool, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// A random nonempty set of up to `max_len` levels of `C_stage`.
pub fn random_set(rng: &mut impl Rng, t: &Tower, stage: usize, max_len: usize) -> LevelSet {
    let h = t.height(stage).unwrap();
    let n = rng.gen_range(1..=max_len);
    LevelSet::new(stage, (0..n).map(|_| rng.gen_range(0..h)).collect())
}

/// `μ` is unchanged by refinement, and refinement is transitive.
pub fn refinement_conservation(rng: &mut impl Rng, lab: &Lab) -> Law {
    let t = &lab.tower;
    let s = rng.gen_range(0..t.depth());
    let m = rng.gen_range(s..=t.depth());
    let mid = rng.gen_range(s..=m);
    let a = random_set(rng, t, s, 4);
    let direct = t.refine(&a, m).unwrap();
    let via = t.refine(&t.refine(&a, mid).unwrap(), m).unwrap();
    ensure(direct == via, || format!("{}: refine {a} via C_{mid} to C_{m}", lab.name))?;
    ensure(t.measure(&direct).unwrap() == t.measure(&a).unwrap(), || {
        format!("{}: μ({a}) changed refining to C_{m}", lab.name)
    })?;
    Ok(true)
}

fn piece_at<'a>(g: &Geo, pieces: &'a [ShiftPiece], x: &Q) -> Option<&'a ShiftPiece> {
    pieces
        .iter()
        .find(|p| g.level(p.stage, p.source).contains_point(x))
}

/// `ω_{i+j}(x) = ω_i(x) · ω_j(T^i x)` at a random rational point.
pub fn chain_rule(rng: &mut impl Rng, lab: &Lab) -> Law {
    let (t, g) = (&lab.tower, &lab.geo);
    let d = t.depth();
    let s = rng.gen_range(0..=2.min(d));
    let lvl = rng.gen_range(0..t.height(s).unwrap());
    let i: i64 = rng.gen_range(-40..=40);
    let j: i64 = rng.gen_range(-40..=40);
    let iv = g.level(s, lvl);
    let u = BigRational::new(rng.gen_range(1..1000).into(), 1000.into());
    let x = &iv.lo + u * iv.len();
    let a = LevelSet::level(s, lvl);
    let pi = t.shift_pieces(&a, i, d).unwrap();
    let pij = t.shift_pieces(&a, i + j, d).unwrap();
    let (Some(p1), Some(p12)) = (piece_at(g, &pi.pieces, &x), piece_at(g, &pij.pieces, &x)) else {
        return Ok(false);
    };
    let y = g.carry(p1.stage, p1.source, p1.target, &x);
    let ylvl = g.level_of(p1.stage, &y).unwrap();
    let pj = t
        .shift_pieces(&LevelSet::level(p1.stage, ylvl), j, d)
        .unwrap();
    let Some(p2) = piece_at(g, &pj.pieces, &y) else {
        return Ok(false);
    };
    let lhs = t.piece_omega(p12);
    let rhs = t.piece_omega(p1) * t.piece_omega(p2);
    ensure(lhs == rhs, || {
        format!("{}: ω_{} = {lhs} but ω_{i}·ω_{j} = {rhs}", lab.name, i + j)
    })?;
    let z = g.carry(p2.stage, p2.source, p2.target, &y);
    let z2 = g.carry(p12.stage, p12.source, p12.target, &x);
    ensure(z == z2, || format!("{}: T^{j} T^{i} x ≠ T^{} x", lab.name, i + j))?;
    Ok(true)
}

/// `R^i R^j = R^{i+j}`, `R^{h} = id`, `R^{-i} R^i = id`, cardinality kept.
pub fn cyclic_laws(rng: &mut impl Rng, lab: &Lab) -> Law {
    let t = &lab.tower;
    let n = rng.gen_range(0..=t.depth());
    let h = t.height(n).unwrap() as i64;
    let a = random_set(rng, t, n, 6);
    let i = rng.gen_range(-3 * h..=3 * h);
    let j = rng.gen_range(-3 * h..=3 * h);
    let r = |s: &LevelSet, k: i64| t.cyclic_shift(s, k).unwrap();
    ensure(r(&r(&a, j), i) == r(&a, i + j), || format!("{}: R^{i}R^{j} {a}", lab.name))?;
    ensure(r(&a, h) == a, || format!("{}: R^h {a}", lab.name))?;
    ensure(r(&r(&a, i), -i) == a, || format!("{}: R^-{i} R^{i} {a}", lab.name))?;
    ensure(r(&a, i).len() == a.len(), || format!("{}: |R^{i} {a}|", lab.name))?;
    Ok(true)
}

/// Pieces resolved inside `C_n` move like `R_n`; a fully resolved shift
/// agrees with the cyclic one, and a stabilised shift agrees with any fully
/// resolved deeper one.
pub fn shift_cyclic_agreement(rng: &mut impl Rng, lab: &Lab) -> Law {
    let t = &lab.tower;
    let n = rng.gen_range(0..t.depth());
    let h = t.height(n).unwrap();
    let a = random_set(rng, t, n, 4);
    let i = rng.gen_range(-(2 * h as i64)..=2 * h as i64);
    let pieces = t.shift_pieces(&a, i, n).unwrap();
    for p in pieces.pieces.iter().filter(|p| p.stage == n) {
        let expect = (p.source as i64 + i).rem_euclid(h as i64) as usize;
        ensure(p.target == expect, || {
            format!("{}: piece {p:?} vs R_{n}^{i}", lab.name)
        })?;
    }
    let r = t.shift(&a, i, n).unwrap();
    if r.is_resolved() {
        ensure(r.image == t.cyclic_shift(&a, i).unwrap(), || {
            format!("{}: T^{i} {a} ≠ R_{n}^{i} {a}", lab.name)
        })?;
    }
    let deep = t.shift(&a, i, t.depth()).unwrap();
    if let (Ok(st), true) = (t.stabilized_shift(&a, i), deep.is_resolved()) {
        ensure(t.same_set(&st, &deep.image).unwrap(), || {
            format!("{}: stabilised T^{i} {a} ≠ resolved image", lab.name)
        })?;
    }
    Ok(true)
}

/// `Σ ω μ(part) = μ(T^i A)` and `Σ μ(part) + unresolved = μ(A)`.
pub fn cocycle_conservation(rng: &mut impl Rng, lab: &Lab) -> Law {
    let t = &lab.tower;
    let s = rng.gen_range(0..t.depth());
    let a = random_set(rng, t, s, 4);
    let i = rng.gen_range(-50..=50);
    let m = rng.gen_range(s..=t.depth());
    let d = t.rn_derivative(&a, i, m).unwrap();
    let r = t.shift(&a, i, m).unwrap();
    let mut pushed = BigRational::from_integer(0.into());
    let mut covered = d.unresolved_measure.clone();
    for p in &d.parts {
        let mu = t.measure(&p.levels).unwrap();
        pushed += &p.omega.value * &mu;
        covered += mu;
    }
    ensure(pushed == t.measure(&r.image).unwrap(), || {
        format!("{}: ∫ω over {a} ≠ μ(T^{i} A)", lab.name)
    })?;
    ensure(covered == t.measure(&a).unwrap(), || {
        format!("{}: parts of {a} do not cover it", lab.name)
    })?;
    Ok(true)
}
