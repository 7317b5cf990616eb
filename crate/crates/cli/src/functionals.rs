//! Functional values of an instance file that grid refinement must preserve.

use cadlag_convex::duality::{conj_pointwise, eval_f, eval_fhat, interchange_det, interchange_stoch, support_ds, Side};
use cadlag_convex::finmodels::{bidask_support, obstacle_support};
use cadlag_convex::io::{Loaded, Model};
use cadlag_convex::polycone::cs_regularity_check;
use cadlag_convex::scenario::{expected_pairing, refine_slots};
use cadlag_convex::{Ext, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn show(r: Result<Ext>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

/// Labelled values; two files agree when these lists are equal.
pub fn functional_values(l: &Loaded) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for (a, y) in l.paths.iter().enumerate() {
        for (b, d) in l.duals.iter().enumerate() {
            let v = expected_pairing(&l.tree, y, &d.u, &d.ut).map(Ext::Fin);
            out.push((format!("pairing path {a} dual {b}"), show(v)));
        }
    }
    if let Ok(inst) = l.instance() {
        for (a, y) in l.paths.iter().enumerate() {
            out.push((format!("F path {a}"), show(eval_f(&inst, y))));
            out.push((format!("F^ path {a}"), show(eval_fhat(&inst, y))));
        }
        for (b, d) in l.duals.iter().enumerate() {
            out.push((format!("conjugate dual {b}"), show(conj_pointwise(&inst, d))));
            out.push((format!("support dual {b}"), show(support_ds(&inst, d))));
        }
        if let Ok(r) = interchange_stoch(&inst) {
            out.push(("inf F^".into(), r.lhs.to_string()));
            out.push(("E sum inf".into(), r.rhs.to_string()));
        }
        if inst.scenarios() == 1 {
            for (label, side) in [("D", Side::D), ("Dl", Side::Dl)] {
                if let Ok(r) = interchange_det(&inst, side) {
                    out.push((format!("inf over {label}"), r.lhs.to_string()));
                    out.push((format!("sum of inf {label}"), r.rhs.to_string()));
                }
            }
        }
    }
    match &l.model {
        Some(Model::Obstacle { b, .. }) => {
            for (k, d) in l.duals.iter().enumerate() {
                out.push((format!("obstacle support dual {k}"), show(obstacle_support(&l.tree, b, d))));
            }
        }
        Some(Model::BidAsk { b, a, .. }) => {
            for (k, d) in l.duals.iter().enumerate() {
                out.push((format!("bid-ask support dual {k}"), show(bidask_support(&l.tree, b, a, d))));
            }
        }
        Some(Model::Currency { model, duals }) => {
            out.push(("currency regular".into(), model.check().ok.to_string()));
            for (k, d) in duals.iter().enumerate() {
                out.push((format!("currency member {k}"), format!("{:?}", model.member(d))));
            }
        }
        Some(Model::Cs { g, gtilde }) => {
            let pass = cs_regularity_check(g, gtilde).map(|r| r.pass());
            out.push(("cs regular".into(), format!("{pass:?}")));
        }
        None => {}
    }
    out
}

/// Pairings of seeded currency selections with the model duals, the
/// selections extended constantly to the grid refined by `factor`.
pub fn currency_pairings(l: &Loaded, factor: usize, seed: u64) -> Vec<String> {
    let Some(Model::Currency { model, duals }) = &l.model else {
        return vec![];
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fine = model.refine(factor);
    let mut out = Vec::new();
    for _ in 0..5 {
        let Ok(y) = model.sample_selection(&mut rng) else {
            continue;
        };
        let yf: Vec<_> = y.iter().map(|row| refine_slots(row, factor, false)).collect();
        for d in duals {
            let coarse = model.expected_pairing(&y, d);
            let refined = fine.expected_pairing(&yf, &d.refine(factor));
            out.push(format!("{coarse} {refined}"));
        }
    }
    out
}
