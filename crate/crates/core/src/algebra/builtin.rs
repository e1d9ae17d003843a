//! Hand-coded tables for the string algebra extended by the `b[m]`.
//!
//! ```text
//! [a_m, a_n] = m a_0 δ(m+n)         [H, a_m] = m a_m
//! [a_m, b_n] = m a_{m+n}            [H, b_m] = m b_m
//! [b_m, b_n] = (m-n) b_{m+n} + δ(m+n) (m^3 F + m G)
//! Δ(b_m)     = b_m ⊗ 1 + 1 ⊗ b_m + ε_m m (a_m ⊗ a_0 - a_0 ⊗ a_m)
//! ```
//!
//! The example profile fixes `F = α a_0 - ε²/3 a_0³`, `G = β a_0` with a
//! constant ε. The general profile uses `F = α a_0 + f/3 a_0³`,
//! `G = β a_0 + g/3 a_0³` and a mode-indexed ε.

use std::collections::{BTreeMap, BTreeSet};

use super::params::{IndexedTable, Params};
use super::poly::{Affine, Poly, Var};
use super::template::{BracketTable, GenTemplate, TemplateSum};
use super::{Algebra, Generator, Kind};
use crate::rational::{frac, q};

fn slot_letter(kind: Kind, form: Affine) -> TemplateSum {
    TemplateSum::letter(GenTemplate::new(kind, Some(form)))
}

fn a0_power(k: usize) -> TemplateSum {
    TemplateSum::word(vec![GenTemplate::fixed(Generator::a(0)); k])
}

fn m() -> Affine {
    Affine::slot(0)
}

fn n() -> Affine {
    Affine::slot(1)
}

fn m_plus_n() -> Affine {
    Affine { coef: [1, 1], constant: 0 }
}

fn mul(x: &TemplateSum, y: &TemplateSum) -> TemplateSum {
    x.mul(y).expect("arity-1 products")
}

fn add(x: &TemplateSum, y: &TemplateSum) -> TemplateSum {
    x.add(y).expect("equal arities")
}

fn string_rules(central_sector: TemplateSum) -> BracketTable {
    let mut table = BracketTable::default();
    let delta = TemplateSum::delta(m_plus_n());
    table.insert(
        Kind::OscA,
        Kind::OscA,
        mul(&delta, &a0_power(1)).scale(&Poly::mode(0)),
    );
    table.insert(Kind::Ham, Kind::OscA, slot_letter(Kind::OscA, n()).scale(&Poly::mode(1)));
    table.insert(
        Kind::OscA,
        Kind::YangB,
        slot_letter(Kind::OscA, m_plus_n()).scale(&Poly::mode(0)),
    );
    table.insert(Kind::Ham, Kind::YangB, slot_letter(Kind::YangB, n()).scale(&Poly::mode(1)));
    let witt = slot_letter(Kind::YangB, m_plus_n()).scale(&(&Poly::mode(0) - &Poly::mode(1)));
    table.insert(Kind::YangB, Kind::YangB, add(&witt, &mul(&delta, &central_sector)));
    table
}

/// `m^3 F + m G` with `F`, `G` given as (a_0 coefficient, a_0^3 coefficient).
fn central_sector(f: (Poly, Poly), g: (Poly, Poly)) -> TemplateSum {
    let cube = Poly::mode(0).pow(3);
    let linear = Poly::mode(0);
    let poly_in_a0 = |(c1, c3): (Poly, Poly)| add(&a0_power(1).scale(&c1), &a0_power(3).scale(&c3));
    add(&poly_in_a0(f).scale(&cube), &poly_in_a0(g).scale(&linear))
}

fn cotail(eps: Poly) -> TemplateSum {
    let mode_letter = TemplateSum::letter(GenTemplate::new(Kind::OscA, Some(m())));
    let a0 = a0_power(1);
    let diff = add(&mode_letter.tensor(&a0), &a0.tensor(&mode_letter).neg());
    diff.scale(&eps.mul(&Poly::mode(0)))
}

fn assemble(brackets: BracketTable, tail: TemplateSum, params: Params) -> Algebra {
    let central: BTreeSet<Generator> = [Generator::a(0)].into();
    let families: BTreeSet<Kind> = Kind::ALL.into();
    let mut cotails = BTreeMap::new();
    cotails.insert(Kind::YangB, tail.canonicalize(&central));
    Algebra::new(families, central.clone(), brackets.canonicalize(&central), cotails, params)
}

/// Constant ε, `F = α a_0 - ε²/3 a_0³`, `G = β a_0`; defaults ε = 1, α = β = 0.
pub fn example_algebra() -> Algebra {
    let eps_sq = Poly::param("eps").pow(2);
    let sector = central_sector(
        (Poly::param("alpha"), eps_sq.scale(&frac(-1, 3))),
        (Poly::param("beta"), Poly::zero()),
    );
    let mut params = Params::default();
    params.set_scalar("eps", q(1));
    params.set_scalar("alpha", q(0));
    params.set_scalar("beta", q(0));
    assemble(string_rules(sector), cotail(Poly::param("eps")), params)
}

/// Mode-indexed ε, `F = α a_0 + f/3 a_0³`, `G = β a_0 + g/3 a_0³`; defaults
/// ε ≡ 1, α = β = 0, f = -1, g = 0 (which reproduces the example profile).
pub fn general_algebra() -> Algebra {
    let third = frac(1, 3);
    let sector = central_sector(
        (Poly::param("alpha"), Poly::param("f").scale(&third)),
        (Poly::param("beta"), Poly::param("g").scale(&third)),
    );
    let mut params = Params::default();
    params.set_indexed("eps", IndexedTable::constant(q(1)));
    params.set_scalar("alpha", q(0));
    params.set_scalar("beta", q(0));
    params.set_scalar("f", q(-1));
    params.set_scalar("g", q(0));
    let eps = Poly::var(Var::Indexed("eps".into(), m()));
    assemble(string_rules(sector), cotail(eps), params)
}
