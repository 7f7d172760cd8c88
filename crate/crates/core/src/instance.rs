//! The on-disk instance format: a strict JSON subset with groupoids,
//! bispaces, weight families, correspondences and cochains, all rationals
//! as `"num/den"` strings. Identifiers are ordered lexicographically at
//! load time; that order fixes orbit representatives and report order.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bispace::Bispace;
use crate::cohomology::ZeroCochain;
use crate::correspondence::{middle_data, Correspondence};
use crate::error::{Error, Result};
use crate::groupoid::{groupoid_from_names, GroupoidWithHaar};
use crate::measures::WeightFamily;
use crate::rat::{fmt_rat, parse_rat, Rat};

/// Hard caps enforced at load; exhaustive checks stay sub-second below
/// them.
pub const MAX_BISPACE_POINTS: usize = 12;
pub const MAX_GROUPOID_ARROWS: usize = 16;
/// Composite and tensor carriers above this size are refused by the suites.
pub const MAX_MODULE_DIM: usize = 24;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ArrowSpec {
    pub src: String,
    pub rng: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq, Default)]
pub struct GroupoidSpec {
    pub units: Vec<String>,
    pub arrows: BTreeMap<String, ArrowSpec>,
    pub compose: Vec<[String; 3]>,
    pub inverse: Vec<[String; 2]>,
    pub haar: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct BispaceSpec {
    pub left: String,
    pub right: String,
    pub points: Vec<String>,
    pub rho: BTreeMap<String, String>,
    pub sigma: BTreeMap<String, String>,
    /// Triples `[arrow, point, image]`.
    pub left_action: Vec<[String; 3]>,
    /// Triples `[point, arrow, image]`.
    pub right_action: Vec<[String; 3]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct WeightFamilySpec {
    pub bispace: String,
    pub weights: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CorrespondenceSpec {
    pub bispace: String,
    pub lambda: String,
}

/// A 0-cochain on the middle fibre product of two named correspondences;
/// keys are `"xpoint|ypoint"`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CochainSpec {
    pub left: String,
    pub right: String,
    pub values: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq, Default)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub groupoids: BTreeMap<String, GroupoidSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bispaces: BTreeMap<String, BispaceSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub weight_families: BTreeMap<String, WeightFamilySpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub correspondences: BTreeMap<String, CorrespondenceSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cochains: BTreeMap<String, CochainSpec>,
}

#[derive(Debug, Clone)]
pub struct LoadedCochain {
    pub left: String,
    pub right: String,
    pub values: BTreeMap<String, Rat>,
}

#[derive(Debug, Clone, Default)]
pub struct LoadedInstance {
    pub groupoids: BTreeMap<String, Arc<GroupoidWithHaar>>,
    pub correspondences: BTreeMap<String, Correspondence>,
    pub cochains: BTreeMap<String, LoadedCochain>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<InstanceFile> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: format!("line {}, column {}", e.line(), e.column()),
            msg: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization")
    }

    pub fn load(&self) -> Result<LoadedInstance> {
        let mut groupoids = BTreeMap::new();
        for (name, spec) in &self.groupoids {
            if spec.arrows.len() > MAX_GROUPOID_ARROWS {
                return Err(Error::CapExceeded(format!(
                    "groupoid {name:?} has {} arrows; the cap is {MAX_GROUPOID_ARROWS}",
                    spec.arrows.len()
                )));
            }
            let arrow_decls: BTreeMap<String, (String, String)> = spec
                .arrows
                .iter()
                .map(|(a, d)| (a.clone(), (d.src.clone(), d.rng.clone())))
                .collect();
            let compose: Vec<(String, String, String)> = spec
                .compose
                .iter()
                .map(|[a, b, c]| (a.clone(), b.clone(), c.clone()))
                .collect();
            let inverse: Vec<(String, String)> = spec
                .inverse
                .iter()
                .map(|[a, b]| (a.clone(), b.clone()))
                .collect();
            let mut haar = BTreeMap::new();
            for (arrow, text) in &spec.haar {
                let r = parse_rat(text).map_err(|msg| Error::Parse {
                    path: format!("groupoids.{name}.haar.{arrow}"),
                    msg,
                })?;
                haar.insert(arrow.clone(), r);
            }
            let gh = groupoid_from_names(name, spec.units.clone(), &arrow_decls, &compose, &inverse, &haar)?;
            groupoids.insert(name.clone(), gh);
        }

        let mut correspondences = BTreeMap::new();
        for (name, spec) in &self.correspondences {
            let bsp = self.bispaces.get(&spec.bispace).ok_or_else(|| {
                Error::Schema(format!(
                    "correspondences.{name}: unknown bispace {:?}",
                    spec.bispace
                ))
            })?;
            let fam = self.weight_families.get(&spec.lambda).ok_or_else(|| {
                Error::Schema(format!(
                    "correspondences.{name}: unknown weight family {:?}",
                    spec.lambda
                ))
            })?;
            if fam.bispace != spec.bispace {
                return Err(Error::Schema(format!(
                    "correspondences.{name}: weight family {:?} is over bispace {:?}",
                    spec.lambda, fam.bispace
                )));
            }
            let left = groupoids.get(&bsp.left).ok_or_else(|| {
                Error::Schema(format!("bispaces.{}: unknown groupoid {:?}", spec.bispace, bsp.left))
            })?;
            let right = groupoids.get(&bsp.right).ok_or_else(|| {
                Error::Schema(format!("bispaces.{}: unknown groupoid {:?}", spec.bispace, bsp.right))
            })?;
            let (bispace, lambda) = build_bispace(&spec.bispace, bsp, fam, left, right)?;
            let corr = Correspondence::new(name.clone(), left.clone(), right.clone(), bispace, lambda)?;
            correspondences.insert(name.clone(), corr);
        }

        let mut cochains = BTreeMap::new();
        for (name, spec) in &self.cochains {
            for side in [&spec.left, &spec.right] {
                if !self.correspondences.contains_key(side) {
                    return Err(Error::Schema(format!(
                        "cochains.{name}: unknown correspondence {side:?}"
                    )));
                }
            }
            let mut values = BTreeMap::new();
            for (key, text) in &spec.values {
                let r = parse_rat(text).map_err(|msg| Error::Parse {
                    path: format!("cochains.{name}.values.{key}"),
                    msg,
                })?;
                values.insert(key.clone(), r);
            }
            cochains.insert(
                name.clone(),
                LoadedCochain {
                    left: spec.left.clone(),
                    right: spec.right.clone(),
                    values,
                },
            );
        }
        Ok(LoadedInstance {
            groupoids,
            correspondences,
            cochains,
        })
    }
}

fn build_bispace(
    bname: &str,
    spec: &BispaceSpec,
    fam: &WeightFamilySpec,
    left: &Arc<GroupoidWithHaar>,
    right: &Arc<GroupoidWithHaar>,
) -> Result<(Bispace, WeightFamily)> {
    if spec.points.len() > MAX_BISPACE_POINTS {
        return Err(Error::CapExceeded(format!(
            "bispace {bname:?} has {} points; the cap is {MAX_BISPACE_POINTS}",
            spec.points.len()
        )));
    }
    let mut points = spec.points.clone();
    points.sort();
    points.dedup();
    if points.len() != spec.points.len() {
        return Err(Error::Schema(format!("bispace {bname:?} has duplicate points")));
    }
    let point_ix: BTreeMap<&str, u32> = points
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_str(), i as u32))
        .collect();
    let look_point = |p: &str| -> Result<u32> {
        point_ix
            .get(p)
            .copied()
            .ok_or_else(|| Error::Schema(format!("bispace {bname:?}: unknown point {p:?}")))
    };
    let unit_ix = |gh: &GroupoidWithHaar, u: &str| -> Result<u32> {
        gh.groupoid
            .units
            .iter()
            .position(|x| x == u)
            .map(|i| i as u32)
            .ok_or_else(|| Error::Schema(format!("bispace {bname:?}: unknown unit {u:?}")))
    };
    let arrow_ix = |gh: &GroupoidWithHaar, a: &str| -> Result<u32> {
        gh.groupoid
            .arrows
            .iter()
            .position(|x| x == a)
            .map(|i| i as u32)
            .ok_or_else(|| Error::Schema(format!("bispace {bname:?}: unknown arrow {a:?}")))
    };
    let n = points.len();
    let mut rho = vec![u32::MAX; n];
    let mut sigma = vec![u32::MAX; n];
    for (p, u) in &spec.rho {
        rho[look_point(p)? as usize] = unit_ix(left, u)?;
    }
    for (p, u) in &spec.sigma {
        sigma[look_point(p)? as usize] = unit_ix(right, u)?;
    }
    if rho.contains(&u32::MAX) || sigma.contains(&u32::MAX) {
        return Err(Error::Schema(format!("bispace {bname:?}: momentum maps are not total")));
    }
    let na_l = left.groupoid.n_arrows();
    let na_r = right.groupoid.n_arrows();
    let mut left_t = vec![None; na_l * n];
    for [arrow, point, image] in &spec.left_action {
        let a = arrow_ix(left, arrow)?;
        let p = look_point(point)?;
        left_t[a as usize * n + p as usize] = Some(look_point(image)?);
    }
    let mut right_t = vec![None; n * na_r];
    for [point, arrow, image] in &spec.right_action {
        let p = look_point(point)?;
        let a = arrow_ix(right, arrow)?;
        right_t[p as usize * na_r + a as usize] = Some(look_point(image)?);
    }
    let bispace = Bispace::new(points.clone(), rho, sigma, left_t, right_t, na_l, na_r)?;

    let mut weights = vec![None; n];
    for (p, text) in &fam.weights {
        let r = parse_rat(text).map_err(|msg| Error::Parse {
            path: format!("weight family over {bname:?}, point {p}"),
            msg,
        })?;
        weights[look_point(p)? as usize] = Some(r);
    }
    let weights: Vec<Rat> = weights
        .into_iter()
        .enumerate()
        .map(|(i, w)| w.ok_or_else(|| Error::Schema(format!("missing weight for point {:?}", points[i]))))
        .collect::<Result<_>>()?;
    let lambda = WeightFamily::new(bispace.sigma.clone(), right.groupoid.n_units(), weights)?;
    Ok((bispace, lambda))
}

impl LoadedInstance {
    /// Resolves a named cochain against the middle fibre product of the two
    /// correspondences it was declared for.
    pub fn resolve_cochain(&self, name: &str, x: &Correspondence, y: &Correspondence) -> Result<ZeroCochain> {
        let lc = self
            .cochains
            .get(name)
            .ok_or_else(|| Error::Schema(format!("unknown cochain {name:?}")))?;
        let (fp, _) = middle_data(x, y)?;
        let mut vals = Vec::with_capacity(fp.pairs.len());
        for (i, &(xi, yi)) in fp.pairs.iter().enumerate() {
            let key = format!("{}|{}", x.bispace.point_name(xi), y.bispace.point_name(yi));
            let v = lc.values.get(&key).ok_or_else(|| {
                Error::Schema(format!("cochain {name:?} is missing the pair {key:?}"))
            })?;
            vals.push(v.clone());
            let _ = i;
        }
        Ok(ZeroCochain(vals))
    }
}

/// Serializes loaded objects back into the canonical file form.
pub fn instance_of(correspondences: &[(String, Correspondence)]) -> Result<InstanceFile> {
    let mut file = InstanceFile::default();
    for (name, corr) in correspondences {
        for gh in [&corr.left, &corr.right] {
            let spec = groupoid_spec(gh);
            match file.groupoids.get(&gh.name) {
                Some(existing) if *existing != spec => {
                    return Err(Error::Schema(format!(
                        "two different groupoids share the name {:?}",
                        gh.name
                    )))
                }
                _ => {
                    file.groupoids.insert(gh.name.clone(), spec);
                }
            }
        }
        let bname = format!("{name}.X");
        let fname = format!("{name}.lambda");
        file.bispaces.insert(bname.clone(), bispace_spec(corr));
        file.weight_families.insert(
            fname.clone(),
            WeightFamilySpec {
                bispace: bname.clone(),
                weights: corr
                    .bispace
                    .points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (p.clone(), fmt_rat(&corr.lambda.w[i])))
                    .collect(),
            },
        );
        file.correspondences.insert(
            name.clone(),
            CorrespondenceSpec {
                bispace: bname,
                lambda: fname,
            },
        );
    }
    Ok(file)
}

fn groupoid_spec(gh: &GroupoidWithHaar) -> GroupoidSpec {
    let g = &gh.groupoid;
    let mut spec = GroupoidSpec {
        units: g.units.clone(),
        ..Default::default()
    };
    for a in 0..g.n_arrows() as u32 {
        spec.arrows.insert(
            g.arrow_name(a).to_string(),
            ArrowSpec {
                src: g.unit_name(g.src(a)).to_string(),
                rng: g.unit_name(g.rng(a)).to_string(),
            },
        );
        spec.haar
            .insert(g.arrow_name(a).to_string(), fmt_rat(gh.haar.weight(a)));
        if a <= g.inv(a) {
            spec.inverse
                .push([g.arrow_name(a).to_string(), g.arrow_name(g.inv(a)).to_string()]);
        }
    }
    for a in 0..g.n_arrows() as u32 {
        for b in 0..g.n_arrows() as u32 {
            if let Some(c) = g.compose(a, b) {
                spec.compose.push([
                    g.arrow_name(a).to_string(),
                    g.arrow_name(b).to_string(),
                    g.arrow_name(c).to_string(),
                ]);
            }
        }
    }
    spec
}

fn bispace_spec(corr: &Correspondence) -> BispaceSpec {
    let x = &corr.bispace;
    let g = &corr.left.groupoid;
    let h = &corr.right.groupoid;
    let mut spec = BispaceSpec {
        left: corr.left.name.clone(),
        right: corr.right.name.clone(),
        points: x.points.clone(),
        rho: BTreeMap::new(),
        sigma: BTreeMap::new(),
        left_action: Vec::new(),
        right_action: Vec::new(),
    };
    for p in 0..x.n_points() as u32 {
        spec.rho
            .insert(x.point_name(p).to_string(), g.unit_name(x.rho(p)).to_string());
        spec.sigma
            .insert(x.point_name(p).to_string(), h.unit_name(x.sigma(p)).to_string());
    }
    for a in 0..g.n_arrows() as u32 {
        for p in 0..x.n_points() as u32 {
            if let Some(ap) = x.left_act(a, p) {
                spec.left_action.push([
                    g.arrow_name(a).to_string(),
                    x.point_name(p).to_string(),
                    x.point_name(ap).to_string(),
                ]);
            }
        }
    }
    for p in 0..x.n_points() as u32 {
        for a in 0..h.n_arrows() as u32 {
            if let Some(pa) = x.right_act(p, a) {
                spec.right_action.push([
                    x.point_name(p).to_string(),
                    h.arrow_name(a).to_string(),
                    x.point_name(pa).to_string(),
                ]);
            }
        }
    }
    spec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    #[test]
    fn bundled_instances_round_trip() {
        let all = gen::bundled_correspondences();
        let file = instance_of(&all).unwrap();
        let text = file.to_json();
        let reparsed = InstanceFile::parse(&text).unwrap();
        assert_eq!(reparsed, file);
        let loaded = reparsed.load().unwrap();
        assert_eq!(loaded.correspondences.len(), all.len());
        // serialize(load(serialize)) is byte-identical
        let named: Vec<(String, Correspondence)> = loaded
            .correspondences
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let file2 = instance_of(&named).unwrap();
        assert_eq!(file2.to_json(), text);
        for (name, corr) in &loaded.correspondences {
            assert!(corr.validate().passed(), "{name}");
        }
    }

    #[test]
    fn malformed_rational_is_a_parse_error() {
        let all = gen::bundled_correspondences();
        let file = instance_of(&all[..1].to_vec()).unwrap();
        let text = file.to_json().replace("\"1/1\"", "\"1/0\"");
        let reparsed = InstanceFile::parse(&text).unwrap();
        match reparsed.load() {
            Err(Error::Parse { .. }) => {}
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_reference_is_a_schema_error() {
        let all = gen::bundled_correspondences();
        let mut file = instance_of(&all[..1].to_vec()).unwrap();
        let (name, mut spec) = file.correspondences.pop_first().unwrap();
        spec.lambda = "missing".into();
        file.correspondences.insert(name, spec);
        assert!(matches!(file.load(), Err(Error::Schema(_))));
    }

    #[test]
    fn caps_are_enforced() {
        let big = crate::correspondence::from_space_map(&vec![0; 13], 13, 1).unwrap();
        let file = instance_of(&[("big".into(), big)]).unwrap();
        assert!(matches!(file.load(), Err(Error::CapExceeded(_))));
    }
}
