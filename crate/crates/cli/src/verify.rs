//! Theorem checks run by `cadlag verify`.

use std::fmt;
use std::str::FromStr;

use cadlag_convex::duality::{
    conj_bruteforce, conj_pointwise, gap_bound, interchange_det, interchange_stoch, subdiff_check, support_ds,
    AssumptionCheck, DualPair, Instance, Side,
};
use cadlag_convex::finmodels::{bidask_support, obstacle_support};
use cadlag_convex::io::{Case, Loaded, Model, Report};
use cadlag_convex::polycone::cs_regularity_check;
use cadlag_convex::scenario::jensen_check;
use cadlag_convex::{q, Error, Ext, PLConvex, RandomPath, SetMap, Q};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    Involution,
    RecessionSupport,
    InterchangeDet,
    InterchangeStoch,
    Conjugate,
    Subdiff,
    SupportDs,
    Jensen,
    Michael,
    Projection,
    CsRegularity,
    Currency,
}

pub const THEOREMS: &[(&str, Theorem)] = &[
    ("involution", Theorem::Involution),
    ("recession-support", Theorem::RecessionSupport),
    ("interchange-det", Theorem::InterchangeDet),
    ("interchange-stoch", Theorem::InterchangeStoch),
    ("conjugate", Theorem::Conjugate),
    ("subdiff", Theorem::Subdiff),
    ("support-ds", Theorem::SupportDs),
    ("jensen", Theorem::Jensen),
    ("michael", Theorem::Michael),
    ("projection", Theorem::Projection),
    ("cs-regularity", Theorem::CsRegularity),
    ("currency", Theorem::Currency),
];

impl FromStr for Theorem {
    type Err = String;

    fn from_str(s: &str) -> Result<Theorem, String> {
        THEOREMS
            .iter()
            .find(|(id, _)| *id == s)
            .map(|(_, t)| *t)
            .ok_or_else(|| {
                let ids: Vec<&str> = THEOREMS.iter().map(|(id, _)| *id).collect();
                format!("unknown theorem `{s}` (expected one of {})", ids.join(", "))
            })
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let id = THEOREMS.iter().find(|(_, t)| t == self).map(|(id, _)| *id).unwrap_or("?");
        f.write_str(id)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOpts {
    pub theorem: Theorem,
    pub b: Option<Q>,
    pub delta: Q,
    /// Number of extra random seeds (`0..seeds`) mixed into the check.
    pub seeds: u64,
    pub samples: usize,
}

impl VerifyOpts {
    pub fn new(theorem: Theorem) -> VerifyOpts {
        VerifyOpts {
            theorem,
            b: None,
            delta: q(1, 100),
            seeds: 0,
            samples: 100,
        }
    }
}

/// Conditions that abort a run before a report exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Schema(String),
    Budget(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Schema(_) => 2,
            Failure::Budget(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Schema(m) => write!(f, "schema error: {m}"),
            Failure::Budget(m) => write!(f, "budget exceeded: {m}"),
        }
    }
}

/// Structural errors abort; everything else is recorded as a failing case.
fn triage(e: Error) -> Result<String, Failure> {
    match e {
        Error::Budget { .. } => Err(Failure::Budget(e.to_string())),
        Error::Schema(_)
        | Error::Parse(_)
        | Error::Malformed(_)
        | Error::Grid(_)
        | Error::Tree(_)
        | Error::Dimension { .. }
        | Error::EmptyInterval => Err(Failure::Schema(e.to_string())),
        other => Ok(other.to_string()),
    }
}

pub fn exit_code(report: &Report, strict: bool) -> i32 {
    if strict && report.assumptions.iter().any(|a| !a.holds) {
        4
    } else if report.pass {
        0
    } else {
        1
    }
}

struct Acc {
    cases: Vec<Case>,
    notes: Vec<String>,
    assumptions: Vec<AssumptionCheck>,
}

impl Acc {
    fn new() -> Acc {
        Acc {
            cases: vec![],
            notes: vec![],
            assumptions: vec![],
        }
    }

    fn fail(&mut self, label: String, e: Error) -> Result<(), Failure> {
        let msg = triage(e)?;
        self.notes.push(format!("{label}: {msg}"));
        self.cases.push(Case::flag(label, false));
        Ok(())
    }

    fn report(self, theorem: Theorem) -> Report {
        Report::from_cases(&theorem.to_string(), self.cases, self.assumptions, self.notes)
    }
}

fn need<'a>(file: Option<&'a Loaded>, what: &str) -> Result<&'a Loaded, Failure> {
    file.ok_or_else(|| Failure::Schema(format!("{what} needs an instance file")))
}

fn instance(file: Option<&Loaded>, what: &str) -> Result<Instance, Failure> {
    need(file, what)?.instance().map_err(|e| match triage(e) {
        Ok(m) => Failure::Schema(m),
        Err(f) => f,
    })
}

fn gap(lhs: &Ext, rhs: &Ext) -> Option<Ext> {
    lhs.checked_add(&-rhs.clone())
}

fn within(g: &Option<Ext>, bound: &Q) -> bool {
    match g {
        Some(Ext::Fin(v)) => v >= &Q::from_integer(0.into()) && v <= bound,
        _ => false,
    }
}

pub fn verify(file: Option<&Loaded>, opts: &VerifyOpts) -> Result<Report, Failure> {
    let mut acc = Acc::new();
    match opts.theorem {
        Theorem::Involution | Theorem::RecessionSupport => plconvex_identities(file, opts, &mut acc)?,
        Theorem::InterchangeDet => {
            let inst = instance(file, "interchange-det")?;
            for (label, side) in [("D", Side::D), ("Dl", Side::Dl)] {
                match interchange_det(&inst, side) {
                    Ok(r) => {
                        acc.cases.push(Case::new(label, &r.lhs, &r.rhs, r.gap.as_ref(), None, r.pass));
                        if !r.exact_mode {
                            acc.notes.push(format!(
                                "{label}: assumptions fail, gap reported (slots {:?})",
                                r.failing_slots
                            ));
                        }
                        acc.assumptions.extend(r.assumptions.checks);
                    }
                    Err(e) => acc.fail(label.into(), e)?,
                }
            }
        }
        Theorem::InterchangeStoch => {
            let inst = instance(file, "interchange-stoch")?;
            match interchange_stoch(&inst) {
                Ok(r) => {
                    acc.cases.push(Case::new("inf F^", &r.lhs, &r.rhs, r.gap.as_ref(), None, r.pass));
                    if let Some(w) = &r.witness {
                        acc.notes.push(format!("pasted witness value {w}"));
                    }
                    if !r.exact_mode {
                        acc.notes.push(format!("assumptions fail, gap reported (slots {:?})", r.failing_slots));
                    }
                    acc.assumptions = r.assumptions.checks;
                }
                Err(e) => acc.fail("inf F^".into(), e)?,
            }
        }
        Theorem::Conjugate => conjugate(file, opts, &mut acc)?,
        Theorem::Subdiff => {
            let l = need(file, "subdiff")?;
            let inst = instance(file, "subdiff")?;
            acc.assumptions = inst.assumptions().checks;
            if l.paths.is_empty() || l.duals.is_empty() {
                return Err(Failure::Schema("subdiff needs at least one path and one dual".into()));
            }
            for (a, y) in l.paths.iter().enumerate() {
                for (b, d) in l.duals.iter().enumerate() {
                    let label = format!("path {a} dual {b}");
                    match subdiff_check(&inst, y, d) {
                        Ok(r) => {
                            let lhs = r.primal.clone() + r.dual.clone();
                            let rhs = Ext::Fin(r.pairing.clone());
                            acc.cases
                                .push(Case::new(&label, &lhs, &rhs, Some(&r.fenchel_gap), None, r.equivalence));
                            if !r.all_inclusions {
                                acc.notes.push(format!("{label}: {} inclusion(s) violated", r.failures.len()));
                            }
                        }
                        Err(e) => acc.fail(label, e)?,
                    }
                }
            }
        }
        Theorem::SupportDs => support(file, opts, &mut acc)?,
        Theorem::Jensen => jensen(file, opts, &mut acc)?,
        Theorem::Michael => {
            let l = need(file, "michael")?;
            for (id, m) in setmaps(l)? {
                let r = m.michael_check();
                acc.cases.push(Case {
                    label: format!("S[{id}]"),
                    lhs: Some(format!("representation {}", r.representation_holds)),
                    rhs: Some(format!("right-isc {}", r.right_isc)),
                    gap: None,
                    bound: None,
                    pass: r.verdict_matches_right_isc,
                });
                if !r.failing_slots.is_empty() {
                    acc.notes.push(format!("S[{id}]: representation fails at slots {:?}", r.failing_slots));
                }
            }
        }
        Theorem::Projection => projection(file, opts, &mut acc)?,
        Theorem::CsRegularity => {
            let l = need(file, "cs-regularity")?;
            let Some(Model::Cs { g, gtilde }) = &l.model else {
                return Err(Failure::Schema("cs-regularity needs a `cs` model".into()));
            };
            match cs_regularity_check(g, gtilde) {
                Ok(r) => {
                    for s in &r.slots {
                        let ok = s.efficient_friction
                            && s.right_regular
                            && s.left_regular.unwrap_or(true)
                            && s.polar_right_isc
                            && s.polar_solid
                            && s.vec_polar_matches.unwrap_or(true)
                            && s.vec_polar_solid;
                        acc.cases.push(Case::flag(format!("slot {}", s.slot), ok));
                    }
                    if !r.pass() {
                        acc.notes.push(format!("hypotheses fail at slots {:?}", r.failing_slots()));
                    }
                }
                Err(e) => acc.fail("cs".into(), e)?,
            }
        }
        Theorem::Currency => {
            let l = need(file, "currency")?;
            let Some(Model::Currency { model, duals }) = &l.model else {
                return Err(Failure::Schema("currency needs a `currency` model".into()));
            };
            let c = model.check();
            acc.cases.push(Case::flag("S right-isc and solid", c.ok));
            if !c.ok {
                acc.notes.push(format!("regularity fails at slots {:?}", c.failing_slots));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for (k, d) in duals.iter().enumerate() {
                let label = format!("dual {k}");
                match model.certify(d, opts.samples, &mut rng) {
                    Ok(r) => {
                        let top = r.max_pairing.clone().map(Ext::Fin).unwrap_or(Ext::NegInf);
                        acc.cases.push(Case::new(
                            &label,
                            &top,
                            &Ext::zero(),
                            None,
                            None,
                            !r.member || r.nonpositive,
                        ));
                        if !r.member {
                            acc.notes.push(format!("{label}: not in the dual cone, pairing not constrained"));
                        }
                    }
                    Err(e) => acc.fail(label, e)?,
                }
            }
        }
    }
    if acc.cases.is_empty() {
        return Err(Failure::Schema(format!("nothing to check for {}", opts.theorem)));
    }
    let mut report = acc.report(opts.theorem);
    if matches!(opts.theorem, Theorem::Involution | Theorem::RecessionSupport) && report.pass {
        report.gap = Some("0".into());
    }
    Ok(report)
}

fn plconvex_identities(file: Option<&Loaded>, opts: &VerifyOpts, acc: &mut Acc) -> Result<(), Failure> {
    let mut fs: Vec<(String, PLConvex)> = Vec::new();
    if let Some(l) = file {
        for (k, f) in l.all_plconvex().into_iter().enumerate() {
            fs.push((format!("file #{k}"), f));
        }
    }
    for seed in 0..opts.seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        fs.push((format!("seed {seed}"), cadlag_convex::gen::plconvex(&mut rng)));
    }
    for (label, f) in fs {
        let ok = match opts.theorem {
            Theorem::Involution => f.conjugate().conjugate() == f,
            _ => PLConvex::support_fn(&f.conjugate().dom()).is_ok_and(|s| s == f.recession()),
        };
        acc.cases.push(Case::flag(label, ok));
    }
    Ok(())
}

fn extra_duals(inst: &Instance, opts: &VerifyOpts) -> Vec<DualPair> {
    (0..opts.seeds)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            cadlag_convex::gen::dual(&mut rng, &inst.tree, &inst.grid)
        })
        .collect()
}

fn conjugate(file: Option<&Loaded>, opts: &VerifyOpts, acc: &mut Acc) -> Result<(), Failure> {
    let l = need(file, "conjugate")?;
    let inst = instance(file, "conjugate")?;
    acc.assumptions = inst.assumptions().checks;
    let b = opts.b.clone().unwrap_or_else(|| inst.default_b());
    let mut duals = l.duals.clone();
    duals.extend(extra_duals(&inst, opts));
    if duals.is_empty() {
        duals.push(DualPair::zero(&inst));
    }
    acc.notes.push(format!("B = {b}, delta = {}", opts.delta));
    for (k, d) in duals.iter().enumerate() {
        let label = format!("dual {k}");
        let lhs = match conj_pointwise(&inst, d) {
            Ok(v) => v,
            Err(e) => {
                acc.fail(label, e)?;
                continue;
            }
        };
        let rhs = match conj_bruteforce(&inst, d, &b, &opts.delta) {
            Ok(v) => v,
            Err(e) => {
                acc.fail(label, e)?;
                continue;
            }
        };
        let bound = gap_bound(&inst, d, &opts.delta);
        let g = gap(&lhs, &rhs);
        if !lhs.is_finite() {
            acc.notes.push(format!("{label}: formula value {lhs}; the lattice value is only a lower bound"));
        }
        acc.cases.push(Case::new(&label, &lhs, &rhs, g.as_ref(), Some(&bound), within(&g, &bound)));
    }
    Ok(())
}

fn support(file: Option<&Loaded>, opts: &VerifyOpts, acc: &mut Acc) -> Result<(), Failure> {
    let l = need(file, "support-ds")?;
    let inst = instance(file, "support-ds")?.support_instance();
    const RELEVANT: &[&str] = &["S-optional", "Stilde-predictable", "michael", "Stilde-contains-vec-S", "nonempty"];
    acc.assumptions = inst
        .assumptions()
        .checks
        .into_iter()
        .filter(|c| RELEVANT.contains(&c.name.as_str()))
        .collect();
    let b = opts.b.clone().unwrap_or_else(|| inst.default_b());
    let mut duals = l.duals.clone();
    duals.extend(extra_duals(&inst, opts));
    if duals.is_empty() {
        duals.push(DualPair::zero(&inst));
    }
    for (k, d) in duals.iter().enumerate() {
        let label = format!("dual {k}");
        let value = match support_ds(&inst, d) {
            Ok(v) => v,
            Err(e) => {
                acc.fail(label, e)?;
                continue;
            }
        };
        let closed = match &l.model {
            Some(Model::Obstacle { b, .. }) => Some(obstacle_support(&inst.tree, b, d)),
            Some(Model::BidAsk { b, a, .. }) => Some(bidask_support(&inst.tree, b, a, d)),
            _ => None,
        };
        if let Some(c) = closed {
            match c {
                Ok(c) => {
                    let g = gap(&value, &c);
                    let ok = value == c;
                    acc.cases.push(Case::new(format!("{label} closed form"), &value, &c, g.as_ref(), None, ok));
                }
                Err(e) => acc.fail(format!("{label} closed form"), e)?,
            }
        }
        if value.is_finite() {
            match conj_bruteforce(&inst, d, &b, &opts.delta) {
                Ok(rhs) => {
                    let bound = gap_bound(&inst, d, &opts.delta);
                    let g = gap(&value, &rhs);
                    let ok = within(&g, &bound);
                    acc.cases.push(Case::new(format!("{label} lattice"), &value, &rhs, g.as_ref(), Some(&bound), ok));
                }
                Err(e) => acc.fail(format!("{label} lattice"), e)?,
            }
        } else {
            acc.notes.push(format!("{label}: support value {value}, lattice comparison skipped"));
        }
    }
    Ok(())
}

fn jensen(file: Option<&Loaded>, opts: &VerifyOpts, acc: &mut Acc) -> Result<(), Failure> {
    let l = need(file, "jensen")?;
    let inst = instance(file, "jensen")?;
    let mut paths: Vec<(String, RandomPath)> =
        l.paths.iter().enumerate().map(|(k, p)| (format!("path {k}"), p.clone())).collect();
    for seed in 0..opts.seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        paths.push((format!("seed {seed}"), cadlag_convex::gen::raw_path(&mut rng, &inst.tree, &inst.grid)));
    }
    let affine = (0..inst.scenarios()).all(|w| {
        inst.h.scenario(w).iter().all(|f| f.breakpoints().is_empty() && f.dom() == cadlag_convex::RInterval::real_line())
    });
    for (label, w) in paths {
        match jensen_check(&inst.tree, &inst.h, &inst.mu, &w) {
            Ok(r) => {
                let ok = r.ok && r.predictable.as_ref().is_none_or(|p| p.2) && (!affine || r.lhs == r.rhs);
                let g = gap(&r.lhs, &r.rhs);
                acc.cases.push(Case::new(label, &r.lhs, &r.rhs, g.as_ref(), None, ok));
            }
            Err(e) => acc.fail(label, e)?,
        }
    }
    Ok(())
}

fn setmaps(l: &Loaded) -> Result<Vec<(String, SetMap)>, Failure> {
    let maps = match &l.s {
        Some(s) => s.clone(),
        None => {
            let inst = l.instance().map_err(|e| Failure::Schema(e.to_string()))?;
            inst.s
        }
    };
    Ok(l.tree.ids().iter().cloned().zip(maps.maps().iter().cloned()).collect())
}

fn projection(file: Option<&Loaded>, opts: &VerifyOpts, acc: &mut Acc) -> Result<(), Failure> {
    let l = need(file, "projection")?;
    let mut anchors: Vec<Q> = [(-2, 1), (-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1), (2, 1)]
        .iter()
        .map(|&(n, d)| q(n, d))
        .collect();
    for seed in 0..opts.seeds {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        anchors.push(q(rng.gen_range(-12..=12), 4));
    }
    for (id, m) in setmaps(l)? {
        acc.assumptions.push(AssumptionCheck {
            name: format!("right-isc[{id}]"),
            holds: m.right_isc_check(),
            detail: m.first_right_isc_violation().map(|i| format!("slot {i}")).unwrap_or_default(),
        });
        for x in &anchors {
            let label = format!("S[{id}] x={x}");
            match m.projection_selection(x) {
                Ok(y) => acc.cases.push(Case::flag(label, projection_identities(&m, x, &y))),
                Err(e) => acc.fail(label, e)?,
            }
        }
    }
    Ok(())
}

/// Selection, distance minimality against the interval endpoints, and the
/// left-limit argmin identity.
pub fn projection_identities(m: &SetMap, x: &Q, y: &cadlag_convex::StepPath) -> bool {
    let abs = |z: Q| if z < Q::from_integer(0.into()) { -z } else { z };
    let selection = m.is_selection(y);
    let minimal = y.values().iter().enumerate().all(|(i, v)| {
        let c = m.attainable_at(i);
        let d = abs(v - x);
        let ends = [c.lo(), c.hi()];
        ends.iter().flatten().all(|e| match e {
            Ext::Fin(e) => abs(e - x) >= d,
            _ => true,
        }) && (!c.contains(x) || v == x)
    });
    selection && minimal && m.left_limit_identity(x, y)
}
