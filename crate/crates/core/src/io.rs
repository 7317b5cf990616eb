//! JSON instance files, grid refinement of whole files, and reports.
//!
//! Every number is a string holding an exact rational (`"3/4"`, `"-2"`) or
//! one of `"inf"` and `"-inf"`. Per-scenario data is an object keyed by
//! scenario id; the single key `"all"` broadcasts one value to every scenario.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::duality::{AssumptionCheck, DualPair, Instance};
use crate::error::{Error, Result};
use crate::ext::{fmt_q, parse_q, Ext, Q};
use crate::finmodels::{CurrencyModel, ScalarProcess, VecDual};
use crate::plconvex::{PLConvex, RInterval};
use crate::polycone::{ConeMap, PolyCone, Vector};
use crate::scenario::{Flag, RandomIntegrand, RandomMeasure, RandomPath, RandomSetMap, ScenarioTree};
use crate::setmaps::SetMap;
use crate::timegrid::{GridMeasure, StepPath, TimeGrid};

pub type PerScenario<T> = BTreeMap<String, T>;

const ALL: &str = "all";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlDto {
    pub dom: [String; 2],
    #[serde(default)]
    pub breakpoints: Vec<String>,
    pub slopes: Vec<String>,
    pub anchor: [String; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetMapDto {
    pub points: Vec<[String; 2]>,
    pub open: Vec<[String; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeDto {
    pub dim: usize,
    #[serde(default)]
    pub generators: Vec<Vec<String>>,
    #[serde(default)]
    pub halfspaces: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeMapDto {
    pub points: Vec<ConeDto>,
    pub open: Vec<ConeDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDto {
    pub probs: BTreeMap<String, String>,
    pub partitions: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DualDto {
    pub u: PerScenario<Vec<String>>,
    pub ut: PerScenario<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessDto {
    pub points: PerScenario<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open: Option<PerScenario<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<Flag>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VecDualDto {
    pub u: PerScenario<Vec<Vec<String>>>,
    pub ut: PerScenario<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelDto {
    Obstacle {
        b: ProcessDto,
        ycheck: PerScenario<Vec<String>>,
    },
    Bidask {
        b: ProcessDto,
        a: ProcessDto,
        ybar: PerScenario<Vec<String>>,
    },
    Currency {
        g: PerScenario<ConeMapDto>,
        #[serde(default)]
        duals: Vec<VecDualDto>,
    },
    Cs {
        g: ConeMapDto,
        gtilde: Vec<ConeDto>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub grid: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrand_h: Option<PerScenario<Vec<PlDto>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrand_htilde: Option<PerScenario<Vec<PlDto>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<PerScenario<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutilde: Option<PerScenario<Vec<String>>>,
    #[serde(rename = "setmap_S", default, skip_serializing_if = "Option::is_none")]
    pub setmap_s: Option<PerScenario<SetMapDto>>,
    #[serde(rename = "setmap_Stilde", default, skip_serializing_if = "Option::is_none")]
    pub setmap_stilde: Option<PerScenario<SetMapDto>>,
    #[serde(default)]
    pub duals: Vec<DualDto>,
    #[serde(default)]
    pub paths: Vec<PerScenario<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelDto>,
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn rat(s: &str) -> Result<Q> {
    parse_q(s).map_err(|_| schema(format!("`{s}` is not a rational")))
}

fn ext(s: &str) -> Result<Ext> {
    Ext::parse(s).map_err(|_| schema(format!("`{s}` is not an extended rational")))
}

fn rats(xs: &[String]) -> Result<Vec<Q>> {
    xs.iter().map(|x| rat(x)).collect()
}

fn strs(xs: &[Q]) -> Vec<String> {
    xs.iter().map(fmt_q).collect()
}

fn per_scenario<'a, T>(tree: &ScenarioTree, m: &'a PerScenario<T>, what: &str) -> Result<Vec<&'a T>> {
    if m.len() == 1 {
        if let Some(v) = m.get(ALL) {
            return Ok(vec![v; tree.len()]);
        }
    }
    if let Some(k) = m.keys().find(|k| tree.index_of(k).is_none()) {
        return Err(schema(format!("{what}: unknown scenario `{k}`")));
    }
    tree.ids()
        .iter()
        .map(|id| m.get(id).ok_or_else(|| schema(format!("{what}: missing scenario `{id}`"))))
        .collect()
}

fn collapse<T: PartialEq>(tree: &ScenarioTree, vals: Vec<T>) -> PerScenario<T> {
    let mut out = BTreeMap::new();
    if vals.windows(2).all(|w| w[0] == w[1]) {
        out.insert(ALL.to_string(), vals.into_iter().next().expect("nonempty"));
    } else {
        for (id, v) in tree.ids().iter().zip(vals) {
            out.insert(id.clone(), v);
        }
    }
    out
}

pub fn pl_from_dto(d: &PlDto) -> Result<PLConvex> {
    PLConvex::new(
        ext(&d.dom[0])?,
        ext(&d.dom[1])?,
        rats(&d.breakpoints)?,
        rats(&d.slopes)?,
        rat(&d.anchor[0])?,
        rat(&d.anchor[1])?,
    )
    .map_err(|e| schema(format!("integrand: {e}")))
}

pub fn pl_to_dto(f: &PLConvex) -> PlDto {
    let (x, v) = f.anchor();
    PlDto {
        dom: [f.dom_lo().to_string(), f.dom_hi().to_string()],
        breakpoints: strs(f.breakpoints()),
        slopes: strs(f.slopes()),
        anchor: [fmt_q(x), fmt_q(v)],
    }
}

fn interval(p: &[String; 2]) -> Result<RInterval> {
    RInterval::new(ext(&p[0])?, ext(&p[1])?).map_err(|e| schema(format!("interval: {e}")))
}

fn interval_dto(c: &RInterval) -> [String; 2] {
    match c {
        RInterval::Closed { lo, hi } => [lo.to_string(), hi.to_string()],
        RInterval::Empty => ["inf".into(), "-inf".into()],
    }
}

fn setmap_from(grid: &TimeGrid, d: &SetMapDto) -> Result<SetMap> {
    let points = d.points.iter().map(interval).collect::<Result<_>>()?;
    let open = d.open.iter().map(interval).collect::<Result<_>>()?;
    SetMap::new(grid.clone(), points, open).map_err(|e| schema(format!("set map: {e}")))
}

fn setmap_dto(m: &SetMap) -> SetMapDto {
    SetMapDto {
        points: m.point_vals().iter().map(interval_dto).collect(),
        open: m.open_vals().iter().map(interval_dto).collect(),
    }
}

fn vector(v: &[String]) -> Result<Vector> {
    rats(v)
}

pub fn cone_from_dto(d: &ConeDto) -> Result<PolyCone> {
    let gens = d.generators.iter().map(|v| vector(v)).collect::<Result<Vec<_>>>()?;
    let hs = d.halfspaces.iter().map(|v| vector(v)).collect::<Result<Vec<_>>>()?;
    if gens.is_empty() && hs.is_empty() {
        return PolyCone::from_generators(d.dim, vec![]).map_err(|e| schema(format!("cone: {e}")));
    }
    PolyCone::from_parts(d.dim, gens, hs).map_err(|e| schema(format!("cone: {e}")))
}

pub fn cone_to_dto(k: &PolyCone) -> ConeDto {
    ConeDto {
        dim: k.dim(),
        generators: k.generators().iter().map(|v| strs(v)).collect(),
        halfspaces: k.halfspaces().iter().map(|v| strs(v)).collect(),
    }
}

fn conemap_from(d: &ConeMapDto) -> Result<ConeMap> {
    let point = d.points.iter().map(cone_from_dto).collect::<Result<_>>()?;
    let open = d.open.iter().map(cone_from_dto).collect::<Result<_>>()?;
    ConeMap::new(point, open).map_err(|e| schema(format!("cone map: {e}")))
}

fn conemap_dto(m: &ConeMap) -> ConeMapDto {
    ConeMapDto {
        points: m.point.iter().map(cone_to_dto).collect(),
        open: m.open.iter().map(cone_to_dto).collect(),
    }
}

fn tree_from(d: &TreeDto) -> Result<ScenarioTree> {
    let ids: Vec<String> = d.probs.keys().cloned().collect();
    let probs = d.probs.values().map(|p| rat(p)).collect::<Result<_>>()?;
    let parts = d
        .partitions
        .iter()
        .map(|part| {
            part.iter()
                .map(|cell| {
                    cell.iter()
                        .map(|id| {
                            ids.iter()
                                .position(|x| x == id)
                                .ok_or_else(|| schema(format!("partition names unknown scenario `{id}`")))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ScenarioTree::new(ids, probs, parts).map_err(|e| schema(e.to_string()))
}

fn tree_dto(t: &ScenarioTree) -> TreeDto {
    TreeDto {
        probs: t.ids().iter().cloned().zip(strs(t.probs())).collect(),
        partitions: t
            .partitions()
            .iter()
            .map(|p| p.iter().map(|c| c.iter().map(|&s| t.ids()[s].clone()).collect()).collect())
            .collect(),
    }
}

fn rows<T>(tree: &ScenarioTree, m: &PerScenario<Vec<T>>, what: &str, len: usize) -> Result<Vec<Vec<T>>>
where
    T: Clone,
{
    let r = per_scenario(tree, m, what)?;
    if let Some(bad) = r.iter().find(|v| v.len() != len) {
        return Err(schema(format!("{what}: expected {len} entries, found {}", bad.len())));
    }
    Ok(r.into_iter().cloned().collect())
}

fn qrows(tree: &ScenarioTree, m: &PerScenario<Vec<String>>, what: &str, len: usize) -> Result<Vec<Vec<Q>>> {
    rows(tree, m, what, len)?.iter().map(|r| rats(r)).collect()
}

fn path_from(tree: &ScenarioTree, grid: &TimeGrid, m: &PerScenario<Vec<String>>, what: &str) -> Result<RandomPath> {
    RandomPath::from_values(grid, qrows(tree, m, what, grid.len())?).map_err(|e| schema(e.to_string()))
}

fn path_dto(tree: &ScenarioTree, y: &RandomPath) -> PerScenario<Vec<String>> {
    collapse(tree, y.paths().iter().map(|p| strs(p.values())).collect())
}

fn measure_from(
    tree: &ScenarioTree,
    grid: &TimeGrid,
    m: &PerScenario<Vec<String>>,
    what: &str,
) -> Result<RandomMeasure> {
    RandomMeasure::from_atoms(grid, qrows(tree, m, what, grid.len())?).map_err(|e| schema(e.to_string()))
}

fn measure_dto(tree: &ScenarioTree, m: &RandomMeasure) -> PerScenario<Vec<String>> {
    collapse(tree, m.measures().iter().map(|g| strs(g.atoms())).collect())
}

fn integrand_from(
    tree: &ScenarioTree,
    grid: &TimeGrid,
    m: &PerScenario<Vec<PlDto>>,
    what: &str,
    flag: Flag,
) -> Result<RandomIntegrand> {
    let slots = rows(tree, m, what, grid.len())?
        .iter()
        .map(|r| r.iter().map(pl_from_dto).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    RandomIntegrand::new(slots, flag).map_err(|e| schema(e.to_string()))
}

fn integrand_dto(tree: &ScenarioTree, h: &RandomIntegrand) -> PerScenario<Vec<PlDto>> {
    collapse(
        tree,
        (0..tree.len()).map(|s| h.scenario(s).iter().map(pl_to_dto).collect()).collect(),
    )
}

fn setmaps_from(tree: &ScenarioTree, grid: &TimeGrid, m: &PerScenario<SetMapDto>, what: &str) -> Result<RandomSetMap> {
    let maps = per_scenario(tree, m, what)?
        .into_iter()
        .map(|d| setmap_from(grid, d))
        .collect::<Result<Vec<_>>>()?;
    RandomSetMap::new(maps).map_err(|e| schema(e.to_string()))
}

fn setmaps_dto(tree: &ScenarioTree, m: &RandomSetMap) -> PerScenario<SetMapDto> {
    collapse(tree, m.maps().iter().map(setmap_dto).collect())
}

fn process_from(tree: &ScenarioTree, grid: &TimeGrid, d: &ProcessDto, what: &str) -> Result<ScalarProcess> {
    let points = qrows(tree, &d.points, what, grid.len())?;
    let flag = d.flag.unwrap_or(Flag::Optional);
    let r = match &d.open {
        Some(o) => ScalarProcess::new(grid.clone(), points, qrows(tree, o, what, grid.cells())?, flag),
        None => ScalarProcess::regular(grid.clone(), points, flag),
    };
    r.map_err(|e| schema(e.to_string()))
}

fn process_dto(tree: &ScenarioTree, p: &ScalarProcess) -> ProcessDto {
    let regular = p.points().iter().zip(p.open()).all(|(pt, o)| pt[..o.len()] == o[..]);
    ProcessDto {
        points: collapse(tree, p.points().iter().map(|r| strs(r)).collect()),
        open: (!regular).then(|| collapse(tree, p.open().iter().map(|r| strs(r)).collect())),
        flag: (p.flag() != Flag::Optional).then_some(p.flag()),
    }
}

fn vecrows(tree: &ScenarioTree, m: &PerScenario<Vec<Vec<String>>>, len: usize) -> Result<Vec<Vec<Vector>>> {
    rows(tree, m, "currency dual", len)?
        .iter()
        .map(|r| r.iter().map(|v| vector(v)).collect())
        .collect()
}

fn vecrows_dto(tree: &ScenarioTree, r: &[Vec<Vector>]) -> PerScenario<Vec<Vec<String>>> {
    collapse(tree, r.iter().map(|row| row.iter().map(|v| strs(v)).collect()).collect())
}

/// Financial preset carried by an instance file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Obstacle {
        b: ScalarProcess,
        ycheck: RandomPath,
    },
    BidAsk {
        b: ScalarProcess,
        a: ScalarProcess,
        ybar: RandomPath,
    },
    Currency {
        model: CurrencyModel,
        duals: Vec<VecDual>,
    },
    Cs {
        g: ConeMap,
        gtilde: Vec<PolyCone>,
    },
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Obstacle { .. } => "obstacle",
            Model::BidAsk { .. } => "bidask",
            Model::Currency { .. } => "currency",
            Model::Cs { .. } => "cs",
        }
    }

    fn refine(&self, factor: usize) -> Model {
        match self {
            Model::Obstacle { b, ycheck } => Model::Obstacle {
                b: b.refine(factor),
                ycheck: ycheck.refine(factor),
            },
            Model::BidAsk { b, a, ybar } => Model::BidAsk {
                b: b.refine(factor),
                a: a.refine(factor),
                ybar: ybar.refine(factor),
            },
            Model::Currency { model, duals } => Model::Currency {
                model: model.refine(factor),
                duals: duals.iter().map(|d| d.refine(factor)).collect(),
            },
            Model::Cs { g, gtilde } => {
                let mut gt = Vec::new();
                for (i, cell) in g.open.iter().enumerate() {
                    gt.push(gtilde[i].clone());
                    gt.extend(std::iter::repeat_n(cell.clone(), factor - 1));
                }
                gt.push(gtilde.last().expect("nonempty").clone());
                Model::Cs {
                    g: g.refine(factor),
                    gtilde: gt,
                }
            }
        }
    }
}

/// Parsed and validated contents of an instance file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Loaded {
    pub grid: TimeGrid,
    pub tree: ScenarioTree,
    pub h: Option<RandomIntegrand>,
    pub htilde: Option<RandomIntegrand>,
    pub mu: RandomMeasure,
    pub mutilde: RandomMeasure,
    pub s: Option<RandomSetMap>,
    pub stilde: Option<RandomSetMap>,
    pub duals: Vec<DualPair>,
    pub paths: Vec<RandomPath>,
    pub model: Option<Model>,
}

impl Loaded {
    pub fn from_file(f: &InstanceFile) -> Result<Loaded> {
        let grid = TimeGrid::new(rats(&f.grid)?).map_err(|e| schema(format!("grid: {e}")))?;
        let tree = match &f.tree {
            Some(t) => tree_from(t)?,
            None => ScenarioTree::deterministic(grid.len()),
        };
        if tree.slots() != grid.len() {
            return Err(schema(format!(
                "tree has {} partitions for {} grid times",
                tree.slots(),
                grid.len()
            )));
        }
        let h = f
            .integrand_h
            .as_ref()
            .map(|m| integrand_from(&tree, &grid, m, "integrand_h", Flag::Optional))
            .transpose()?;
        let htilde = f
            .integrand_htilde
            .as_ref()
            .map(|m| integrand_from(&tree, &grid, m, "integrand_htilde", Flag::Predictable))
            .transpose()?;
        let measure = |m: &Option<PerScenario<Vec<String>>>, what: &str| match m {
            Some(m) => measure_from(&tree, &grid, m, what),
            None => Ok(RandomMeasure::zero(&tree, &grid)),
        };
        let mu = measure(&f.mu, "mu")?;
        let mutilde = measure(&f.mutilde, "mutilde")?;
        let s = f
            .setmap_s
            .as_ref()
            .map(|m| setmaps_from(&tree, &grid, m, "setmap_S"))
            .transpose()?;
        let stilde = f
            .setmap_stilde
            .as_ref()
            .map(|m| setmaps_from(&tree, &grid, m, "setmap_Stilde"))
            .transpose()?;
        let duals = f
            .duals
            .iter()
            .map(|d| {
                Ok(DualPair::new(
                    measure_from(&tree, &grid, &d.u, "duals.u")?,
                    measure_from(&tree, &grid, &d.ut, "duals.ut")?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let paths = f
            .paths
            .iter()
            .map(|p| path_from(&tree, &grid, p, "paths"))
            .collect::<Result<Vec<_>>>()?;
        let model = f.model.as_ref().map(|m| model_from(&tree, &grid, m)).transpose()?;
        let loaded = Loaded {
            grid,
            tree,
            h,
            htilde,
            mu,
            mutilde,
            s,
            stilde,
            duals,
            paths,
            model,
        };
        if loaded.h.is_some() {
            loaded.instance()?;
        }
        Ok(loaded)
    }

    pub fn to_file(&self) -> InstanceFile {
        let tree = &self.tree;
        let trivial = *tree == ScenarioTree::deterministic(self.grid.len());
        InstanceFile {
            grid: strs(self.grid.times()),
            tree: (!trivial).then(|| tree_dto(tree)),
            integrand_h: self.h.as_ref().map(|h| integrand_dto(tree, h)),
            integrand_htilde: self.htilde.as_ref().map(|h| integrand_dto(tree, h)),
            mu: (!self.mu.is_zero()).then(|| measure_dto(tree, &self.mu)),
            mutilde: (!self.mutilde.is_zero()).then(|| measure_dto(tree, &self.mutilde)),
            setmap_s: self.s.as_ref().map(|m| setmaps_dto(tree, m)),
            setmap_stilde: self.stilde.as_ref().map(|m| setmaps_dto(tree, m)),
            duals: self
                .duals
                .iter()
                .map(|d| DualDto {
                    u: measure_dto(tree, &d.u),
                    ut: measure_dto(tree, &d.ut),
                })
                .collect(),
            paths: self.paths.iter().map(|p| path_dto(tree, p)).collect(),
            model: self.model.as_ref().map(|m| model_dto(tree, m)),
        }
    }

    /// The duality instance: explicit integrands when present, otherwise the
    /// constraint instance of an obstacle or bid-ask preset.
    pub fn instance(&self) -> Result<Instance> {
        if let Some(h) = &self.h {
            return Instance::new(
                self.tree.clone(),
                self.grid.clone(),
                h.clone(),
                self.htilde.clone(),
                self.mu.clone(),
                self.mutilde.clone(),
                self.s.clone(),
                self.stilde.clone(),
            )
            .map_err(|e| schema(format!("instance: {e}")));
        }
        match &self.model {
            Some(Model::Obstacle { b, ycheck }) => crate::finmodels::obstacle_model(&self.tree, b, ycheck),
            Some(Model::BidAsk { b, a, ybar }) => crate::finmodels::bidask_model(&self.tree, b, a, ybar),
            _ => Err(schema("file has no integrand_h and no obstacle or bid-ask model")),
        }
    }

    /// Every component extended to the grid with `factor − 1` new points per cell.
    pub fn refine(&self, factor: usize) -> Loaded {
        assert!(factor >= 1, "refinement factor must be positive");
        Loaded {
            grid: self.grid.refine(factor),
            tree: self.tree.refine(factor),
            h: self.h.as_ref().map(|h| h.refine_side(factor, false)),
            htilde: self.htilde.as_ref().map(|h| h.refine_side(factor, true)),
            mu: self.mu.refine(factor),
            mutilde: self.mutilde.refine(factor),
            s: self.s.as_ref().map(|m| m.refine(factor)),
            stilde: self.stilde.as_ref().map(|m| m.refine(factor)),
            duals: self.duals.iter().map(|d| d.refine(factor)).collect(),
            paths: self.paths.iter().map(|p| p.refine(factor)).collect(),
            model: self.model.as_ref().map(|m| m.refine(factor)),
        }
    }

    /// PL functions appearing anywhere in the file.
    pub fn all_plconvex(&self) -> Vec<PLConvex> {
        let mut out = Vec::new();
        for h in self.h.iter().chain(self.htilde.iter()) {
            for s in 0..h.count() {
                out.extend(h.scenario(s).iter().cloned());
            }
        }
        out
    }
}

fn model_from(tree: &ScenarioTree, grid: &TimeGrid, m: &ModelDto) -> Result<Model> {
    Ok(match m {
        ModelDto::Obstacle { b, ycheck } => Model::Obstacle {
            b: process_from(tree, grid, b, "model.b")?,
            ycheck: path_from(tree, grid, ycheck, "model.ycheck")?,
        },
        ModelDto::Bidask { b, a, ybar } => Model::BidAsk {
            b: process_from(tree, grid, b, "model.b")?,
            a: process_from(tree, grid, a, "model.a")?,
            ybar: path_from(tree, grid, ybar, "model.ybar")?,
        },
        ModelDto::Currency { g, duals } => {
            let maps = per_scenario(tree, g, "model.g")?
                .into_iter()
                .map(conemap_from)
                .collect::<Result<Vec<_>>>()?;
            let model = CurrencyModel::new(tree.clone(), maps).map_err(|e| schema(e.to_string()))?;
            let duals = duals
                .iter()
                .map(|d| {
                    Ok(VecDual {
                        u: vecrows(tree, &d.u, grid.len())?,
                        ut: vecrows(tree, &d.ut, grid.len())?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Model::Currency { model, duals }
        }
        ModelDto::Cs { g, gtilde } => {
            let g = conemap_from(g)?;
            if g.point.len() != grid.len() || gtilde.len() != grid.len() {
                return Err(schema("cs model does not match the grid"));
            }
            Model::Cs {
                g,
                gtilde: gtilde.iter().map(cone_from_dto).collect::<Result<_>>()?,
            }
        }
    })
}

fn model_dto(tree: &ScenarioTree, m: &Model) -> ModelDto {
    match m {
        Model::Obstacle { b, ycheck } => ModelDto::Obstacle {
            b: process_dto(tree, b),
            ycheck: path_dto(tree, ycheck),
        },
        Model::BidAsk { b, a, ybar } => ModelDto::Bidask {
            b: process_dto(tree, b),
            a: process_dto(tree, a),
            ybar: path_dto(tree, ybar),
        },
        Model::Currency { model, duals } => ModelDto::Currency {
            g: collapse(tree, model.g.iter().map(conemap_dto).collect()),
            duals: duals
                .iter()
                .map(|d| VecDualDto {
                    u: vecrows_dto(tree, &d.u),
                    ut: vecrows_dto(tree, &d.ut),
                })
                .collect(),
        },
        Model::Cs { g, gtilde } => ModelDto::Cs {
            g: conemap_dto(g),
            gtilde: gtilde.iter().map(cone_to_dto).collect(),
        },
    }
}

pub fn parse_str(text: &str) -> Result<Loaded> {
    let f: InstanceFile = serde_json::from_str(text).map_err(|e| schema(e.to_string()))?;
    Loaded::from_file(&f)
}

pub fn load(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).map_err(|e| schema(format!("{}: {e}", path.display())))?;
    parse_str(&text)
}

pub fn to_json(l: &Loaded) -> String {
    serde_json::to_string_pretty(&l.to_file()).expect("serializable") + "\n"
}

/// Refines a file by `factor` (at least 2) and returns the new document.
pub fn refine_file(f: &InstanceFile, factor: usize) -> Result<InstanceFile> {
    if factor < 2 {
        return Err(schema("refinement factor must be at least 2"));
    }
    Ok(Loaded::from_file(f)?.refine(factor).to_file())
}

/// One evaluated case inside a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Case {
    pub label: String,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub gap: Option<String>,
    pub bound: Option<String>,
    pub pass: bool,
}

impl Case {
    pub fn new(label: impl Into<String>, lhs: &Ext, rhs: &Ext, gap: Option<&Ext>, bound: Option<&Q>, pass: bool) -> Case {
        Case {
            label: label.into(),
            lhs: Some(lhs.to_string()),
            rhs: Some(rhs.to_string()),
            gap: gap.map(Ext::to_string),
            bound: bound.map(fmt_q),
            pass,
        }
    }

    pub fn flag(label: impl Into<String>, pass: bool) -> Case {
        Case {
            label: label.into(),
            lhs: None,
            rhs: None,
            gap: None,
            bound: None,
            pass,
        }
    }
}

/// Machine-readable outcome of one verification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub theorem: String,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
    pub gap: Option<String>,
    pub bound: Option<String>,
    pub assumptions: Vec<AssumptionCheck>,
    pub pass: bool,
    pub cases: Vec<Case>,
    pub notes: Vec<String>,
    pub timestamp: String,
}

impl Report {
    /// Headline numbers come from the first failing case, or the first case when all pass.
    pub fn from_cases(theorem: &str, cases: Vec<Case>, assumptions: Vec<AssumptionCheck>, notes: Vec<String>) -> Report {
        let pass = cases.iter().all(|c| c.pass);
        let head = cases.iter().find(|c| !c.pass).or(cases.first()).cloned();
        let (lhs, rhs, gap, bound) = match head {
            Some(c) => (c.lhs, c.rhs, c.gap, c.bound),
            None => (None, None, None, None),
        };
        Report {
            theorem: theorem.into(),
            lhs,
            rhs,
            gap,
            bound,
            assumptions,
            pass,
            cases,
            notes,
            timestamp: timestamp(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable") + "\n"
    }

    /// Tabular text rendering.
    pub fn to_text(&self) -> String {
        let dash = |o: &Option<String>| o.clone().unwrap_or_else(|| "-".into());
        let mut out = format!(
            "theorem {}: {}\n  lhs {}  rhs {}  gap {}  bound {}\n",
            self.theorem,
            if self.pass { "PASS" } else { "FAIL" },
            dash(&self.lhs),
            dash(&self.rhs),
            dash(&self.gap),
            dash(&self.bound)
        );
        for a in &self.assumptions {
            let mark = if a.holds { "ok" } else { "VIOLATED" };
            out += &format!("  assumption {:<24} {mark} {}\n", a.name, a.detail);
        }
        for c in &self.cases {
            out += &format!(
                "  {:<28} {:<5} lhs {} rhs {} gap {} bound {}\n",
                c.label,
                if c.pass { "pass" } else { "FAIL" },
                dash(&c.lhs),
                dash(&c.rhs),
                dash(&c.gap),
                dash(&c.bound)
            );
        }
        for n in &self.notes {
            out += &format!("  note: {n}\n");
        }
        out
    }
}

fn timestamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    secs.to_string()
}

/// Paths (JSON pointers) at which two reports differ, ignoring `timestamp`.
pub fn report_diff(a: &str, b: &str) -> Result<Vec<String>> {
    let mut va: serde_json::Value = serde_json::from_str(a).map_err(|e| schema(e.to_string()))?;
    let mut vb: serde_json::Value = serde_json::from_str(b).map_err(|e| schema(e.to_string()))?;
    for v in [&mut va, &mut vb] {
        if let Some(o) = v.as_object_mut() {
            o.remove("timestamp");
        }
    }
    let mut out = Vec::new();
    diff_values("", &va, &vb, &mut out);
    Ok(out)
}

fn diff_values(at: &str, a: &serde_json::Value, b: &serde_json::Value, out: &mut Vec<String>) {
    use serde_json::Value;
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            let keys: std::collections::BTreeSet<&String> = x.keys().chain(y.keys()).collect();
            for k in keys {
                let p = format!("{at}/{k}");
                match (x.get(k), y.get(k)) {
                    (Some(u), Some(v)) => diff_values(&p, u, v, out),
                    _ => out.push(p),
                }
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (i, (u, v)) in x.iter().zip(y).enumerate() {
                diff_values(&format!("{at}/{i}"), u, v, out);
            }
        }
        _ if a == b => {}
        _ => out.push(if at.is_empty() { "/".into() } else { at.into() }),
    }
}

/// Single-scenario file around a deterministic instance.
pub fn deterministic_file(grid: &TimeGrid, h: Vec<PLConvex>, mu: Vec<Q>) -> Result<Loaded> {
    let tree = ScenarioTree::deterministic(grid.len());
    Ok(Loaded {
        grid: grid.clone(),
        h: Some(RandomIntegrand::deterministic(&tree, h, Flag::Optional)),
        htilde: None,
        mu: RandomMeasure::deterministic(&tree, GridMeasure::new(grid.clone(), mu)?),
        mutilde: RandomMeasure::zero(&tree, grid),
        s: None,
        stilde: None,
        duals: vec![],
        paths: vec![RandomPath::deterministic(&tree, StepPath::constant(grid, Q::from_integer(0.into())))],
        model: None,
        tree,
    })
}
