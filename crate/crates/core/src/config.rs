//! JSON run configuration. Every value is validated before any computation;
//! failures are `Error::Config` (or a dimension/window error), never partial.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::deform::{Generator, GeneratorFamily, LocalRule, MeyerThresholds, PrefixSumFraction};
use crate::error::{Error, Result};
use crate::quadfield::QuadField;
use crate::scalar::Scalar;
use crate::scheme::{Cell, CutProjectScheme, HalfSpace, PhysBox, PointSample, Polytope, TorsionElem, WindowRegion, Xi};
use crate::substitution::SubstitutionSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

/// A number in the config: a JSON number or a string such as
/// `"1/2 + 1/2*sqrt(5)"`. Exact mode accepts only integer JSON numbers.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Literal {
    Number(f64),
    Text(String),
}

impl Literal {
    pub fn value<S: Scalar>(&self, d: u32) -> Result<S> {
        let v = match self {
            Literal::Number(x) => S::from_f64_literal(*x, d),
            Literal::Text(t) => S::parse_literal(t, d),
        };
        v.map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum CellSpec {
    /// `[lo, hi]`
    Interval(Literal, Literal),
    Polytope { halfspaces: Vec<HalfSpaceSpec> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfSpaceSpec {
    pub normal: Vec<Literal>,
    pub offset: Literal,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct XiSpec {
    #[serde(default)]
    pub internal: Vec<Literal>,
    #[serde(default)]
    pub torsion: String,
    #[serde(default)]
    pub phys: Vec<Literal>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub lo: Vec<Literal>,
    pub hi: Vec<Literal>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchSpec {
    /// Index of the anchor point in the generated sample.
    #[serde(default)]
    pub center: Option<usize>,
    /// Anchor at the sample point nearest this position (first coordinate).
    #[serde(default)]
    pub near: Option<Literal>,
    pub radius: Literal,
}

/// Deformation generator families available from the config.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// `F(x) = L sigma(x)`; `l` has `d` rows of length `n`.
    Linear { l: Vec<Vec<Literal>> },
    /// `F(x) = scale * (sum of displacements to points within radius)`.
    NeighborSum { radius: Literal, scale: Literal },
    /// Linear part plus a neighbour-sum local part.
    LinearPlusLocal { l: Vec<Vec<Literal>>, radius: Literal, scale: Literal },
    /// `F(x) = scale * frac(sum of the earlier sample points)`: not
    /// determined by any bounded patch.
    PrefixSumFraction { scale: Literal },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubstitutionSpec {
    pub alphabet: Vec<String>,
    pub rules: BTreeMap<String, String>,
    /// Tile lengths; natural (Perron-Frobenius) lengths when absent.
    #[serde(default)]
    pub lengths: Option<Vec<Literal>>,
    #[serde(default)]
    pub seed: Option<String>,
    #[serde(default)]
    pub markers: Option<Vec<String>>,
    #[serde(default)]
    pub generations: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: Mode,
    #[serde(default = "default_field", rename = "field_D")]
    pub field_d: u32,
    /// `"fibonacci"` fills `d`, `n`, `basis` and `window` when they are absent.
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub torsion: Vec<u32>,
    /// Generators of the lattice, internal coordinates first.
    #[serde(default)]
    pub basis: Option<Vec<Vec<Literal>>>,
    /// Torsion part of each generator, in the `"1,0"` form.
    #[serde(default)]
    pub torsion_labels: Option<Vec<String>>,
    /// Torsion element (`""` when `C` is trivial) to its cells.
    #[serde(default)]
    pub window: Option<BTreeMap<String, Vec<CellSpec>>>,
    #[serde(default)]
    pub xi: Option<XiSpec>,
    #[serde(default, rename = "box")]
    pub bbox: Option<BoxSpec>,
    #[serde(default)]
    pub radii: Option<Vec<Literal>>,
    #[serde(default)]
    pub patch: Option<PatchSpec>,
    /// Target interval `[lo, hi]` for localization.
    #[serde(default)]
    pub target: Option<(Literal, Literal)>,
    #[serde(default)]
    pub generator: Option<GeneratorSpec>,
    #[serde(default)]
    pub r_max: Option<Literal>,
    #[serde(default)]
    pub bound: Option<i64>,
    #[serde(default)]
    pub thresholds: Option<MeyerThresholds>,
    #[serde(default)]
    pub substitution: Option<SubstitutionSpec>,
}

fn default_field() -> u32 {
    5
}

fn missing(what: &str) -> Error {
    Error::Config(format!("missing field `{what}`"))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        QuadField::new(cfg.field_d as u64).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(p) = &cfg.preset {
            if p != "fibonacci" {
                return Err(Error::Config(format!("unknown preset {p:?}")));
            }
        }
        Ok(cfg)
    }

    fn is_fibonacci(&self) -> bool {
        self.preset.as_deref() == Some("fibonacci")
    }

    fn lit<S: Scalar>(&self, l: &Literal) -> Result<S> {
        l.value(self.field_d)
    }

    fn lits<S: Scalar>(&self, ls: &[Literal]) -> Result<Vec<S>> {
        ls.iter().map(|l| self.lit(l)).collect()
    }

    pub fn dims(&self) -> Result<(usize, usize)> {
        match (self.d, self.n, self.is_fibonacci()) {
            (Some(d), Some(n), _) => Ok((d, n)),
            (None, None, true) => Ok((1, 1)),
            (d, n, true) => Ok((d.unwrap_or(1), n.unwrap_or(1))),
            (None, _, false) => Err(missing("d")),
            (_, None, false) => Err(missing("n")),
        }
    }

    pub fn scheme<S: Scalar>(&self) -> Result<CutProjectScheme<S>> {
        let (d, n) = self.dims()?;
        let columns: Vec<Vec<S>> = match &self.basis {
            Some(b) => b.iter().map(|c| self.lits(c)).collect::<Result<_>>()?,
            None if self.is_fibonacci() => {
                if self.field_d != 5 {
                    return Err(Error::Config("the fibonacci preset needs field_D = 5".into()));
                }
                let t = |s: &str| S::parse_literal(s, 5).map_err(|e| Error::Internal(e.to_string()));
                vec![vec![t("1")?, t("1")?], vec![t("1/2 - 1/2*sqrt(5)")?, t("1/2 + 1/2*sqrt(5)")?]]
            }
            None => return Err(missing("basis")),
        };
        let labels = match &self.torsion_labels {
            Some(l) => Some(l.iter().map(|t| TorsionElem::parse(t, &self.torsion)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        CutProjectScheme::new(d, n, self.torsion.clone(), columns, labels)
    }

    pub fn window<S: Scalar>(&self) -> Result<WindowRegion<S>> {
        let (_, n) = self.dims()?;
        let spec = match &self.window {
            Some(w) => w.clone(),
            None if self.is_fibonacci() => {
                let mut m = BTreeMap::new();
                m.insert(
                    String::new(),
                    vec![CellSpec::Interval(Literal::Text("-1".into()), Literal::Text("-1/2 + 1/2*sqrt(5)".into()))],
                );
                m
            }
            None => return Err(missing("window")),
        };
        let mut comps = BTreeMap::new();
        for (key, cells) in &spec {
            let t = TorsionElem::parse(key, &self.torsion)?;
            let cells: Vec<Cell<S>> = cells
                .iter()
                .map(|c| match c {
                    CellSpec::Interval(lo, hi) => Ok(Cell::Interval { lo: self.lit(lo)?, hi: self.lit(hi)? }),
                    CellSpec::Polytope { halfspaces } => {
                        let hs = halfspaces
                            .iter()
                            .map(|h| Ok(HalfSpace { normal: self.lits(&h.normal)?, offset: self.lit(&h.offset)? }))
                            .collect::<Result<Vec<_>>>()?;
                        Ok(Cell::Polytope(Polytope::new(hs)?))
                    }
                })
                .collect::<Result<_>>()?;
            comps.insert(t, cells);
        }
        WindowRegion::new(n, &self.torsion, comps)
    }

    pub fn xi<S: Scalar>(&self, scheme: &CutProjectScheme<S>) -> Result<Xi<S>> {
        let Some(x) = &self.xi else { return Ok(Xi::zero(scheme)) };
        let zero = scheme.template().zero_like();
        let fill = |v: &[Literal], len: usize| -> Result<Vec<S>> {
            if v.is_empty() {
                Ok(vec![zero.clone(); len])
            } else {
                self.lits(v)
            }
        };
        Ok(Xi {
            internal: fill(&x.internal, scheme.n())?,
            torsion: TorsionElem::parse(&x.torsion, scheme.torsion_orders())?,
            phys: fill(&x.phys, scheme.d())?,
        })
    }

    pub fn bbox<S: Scalar>(&self) -> Result<PhysBox<S>> {
        let b = self.bbox.as_ref().ok_or_else(|| missing("box"))?;
        PhysBox::new(self.lits(&b.lo)?, self.lits(&b.hi)?)
    }

    pub fn radii<S: Scalar>(&self) -> Result<Vec<S>> {
        let r = self.radii.as_ref().ok_or_else(|| missing("radii"))?;
        let v: Vec<S> = self.lits(r)?;
        if v.is_empty() || v.windows(2).any(|w| w[0].cmp_s(&w[1]).is_ge()) || v[0].sign().is_le() {
            return Err(Error::Config("radii must be positive and strictly increasing".into()));
        }
        Ok(v)
    }

    pub fn patch_radius<S: Scalar>(&self) -> Result<S> {
        let p = self.patch.as_ref().ok_or_else(|| missing("patch"))?;
        let r: S = self.lit(&p.radius)?;
        if r.sign().is_lt() {
            return Err(Error::Config("patch radius must be non-negative".into()));
        }
        Ok(r)
    }

    /// Index of the patch anchor in `sample`.
    pub fn patch_center<S: Scalar>(&self, sample: &PointSample<S>) -> Result<usize> {
        let p = self.patch.as_ref().ok_or_else(|| missing("patch"))?;
        match (&p.center, &p.near) {
            (Some(i), None) if *i < sample.len() => Ok(*i),
            (Some(i), None) => Err(Error::Config(format!("patch center {i} outside a sample of {} points", sample.len()))),
            (None, Some(x)) => {
                let x: S = self.lit(x)?;
                let xf = x.to_f64();
                (0..sample.len())
                    .min_by(|&a, &b| {
                        (sample.positions_f64[a][0] - xf).abs().total_cmp(&(sample.positions_f64[b][0] - xf).abs())
                    })
                    .ok_or_else(|| Error::Precondition("empty sample".into()))
            }
            _ => Err(Error::Config("patch needs exactly one of `center` and `near`".into())),
        }
    }

    pub fn target<S: Scalar>(&self) -> Result<(S, S)> {
        let (lo, hi) = self.target.as_ref().ok_or_else(|| missing("target"))?;
        Ok((self.lit(lo)?, self.lit(hi)?))
    }

    pub fn r_max<S: Scalar>(&self) -> Result<S> {
        self.lit(self.r_max.as_ref().ok_or_else(|| missing("r_max"))?)
    }

    pub fn thresholds(&self) -> MeyerThresholds {
        self.thresholds.clone().unwrap_or_default()
    }

    pub fn generator<S: Scalar>(&self, scheme: &CutProjectScheme<S>) -> Result<GeneratorFamilySpec<S>> {
        let g = self.generator.as_ref().ok_or_else(|| missing("generator"))?;
        let linear = |l: &Vec<Vec<Literal>>| -> Result<Vec<Vec<S>>> {
            let m: Vec<Vec<S>> = l.iter().map(|r| self.lits(r)).collect::<Result<_>>()?;
            if m.len() != scheme.d() || m.iter().any(|r| r.len() != scheme.n()) {
                return Err(Error::Config(format!("linear map must be {} rows of {} entries", scheme.d(), scheme.n())));
            }
            Ok(m)
        };
        Ok(match g {
            GeneratorSpec::Linear { l } => GeneratorFamilySpec { linear: Some(linear(l)?), local: None, prefix: None },
            GeneratorSpec::NeighborSum { radius, scale } => {
                GeneratorFamilySpec { linear: None, local: Some((self.lit(radius)?, self.lit(scale)?)), prefix: None }
            }
            GeneratorSpec::LinearPlusLocal { l, radius, scale } => GeneratorFamilySpec {
                linear: Some(linear(l)?),
                local: Some((self.lit(radius)?, self.lit(scale)?)),
                prefix: None,
            },
            GeneratorSpec::PrefixSumFraction { scale } => {
                GeneratorFamilySpec { linear: None, local: None, prefix: Some(self.lit(scale)?) }
            }
        })
    }

    pub fn substitution(&self) -> Result<SubstitutionSystem> {
        let s = self.substitution.as_ref().ok_or_else(|| missing("substitution"))?;
        let mut rules: Vec<(String, String)> = s.rules.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
        rules.sort_by_key(|(a, _)| s.alphabet.iter().position(|x| x == a));
        SubstitutionSystem::new(s.alphabet.clone(), &rules)
    }

    pub fn substitution_spec(&self) -> Result<&SubstitutionSpec> {
        self.substitution.as_ref().ok_or_else(|| missing("substitution"))
    }

    /// Explicit tile lengths, if given.
    pub fn tile_lengths<S: Scalar>(&self) -> Result<Option<Vec<S>>> {
        match &self.substitution_spec()?.lengths {
            Some(l) => Ok(Some(self.lits(l)?)),
            None => Ok(None),
        }
    }
}

/// Generator built from the config; instantiated per sample so that the
/// local part is tabulated on the patches that sample actually has.
#[derive(Debug, Clone)]
pub struct GeneratorFamilySpec<S> {
    pub linear: Option<Vec<Vec<S>>>,
    /// `(radius, scale)` of the neighbour-sum local part.
    pub local: Option<(S, S)>,
    pub prefix: Option<S>,
}

impl<S: Scalar> GeneratorFamilySpec<S> {
    /// Radius of the local part; 0 for purely linear generators.
    pub fn rule_radius(&self) -> Option<S> {
        match (&self.local, &self.linear) {
            (Some((r, _)), _) => Some(r.clone()),
            (None, Some(l)) => Some(l[0][0].zero_like()),
            _ => None,
        }
    }
}

impl<S: Scalar> GeneratorFamily<S> for GeneratorFamilySpec<S> {
    fn instantiate(&self, sample: &PointSample<S>) -> Result<Generator<S>> {
        if let Some(scale) = &self.prefix {
            return PrefixSumFraction { scale: scale.clone() }.instantiate(sample);
        }
        let local = self.local.as_ref().map(|(radius, scale)| {
            let zero = radius.zero_like();
            Generator::LocalRule(LocalRule::from_fn(&[sample], radius.clone(), |pts| {
                let mut acc = vec![zero.clone(); sample.scheme.d()];
                for p in pts {
                    for (a, v) in acc.iter_mut().zip(p) {
                        *a = a.clone() + v.clone();
                    }
                }
                acc.into_iter().map(|a| a * scale.clone()).collect()
            }))
        });
        match (&self.linear, local) {
            (Some(l), None) => Ok(Generator::LinearInternal(l.clone())),
            (None, Some(g)) => Ok(g),
            (Some(l), Some(g)) => {
                let a = Generator::LinearInternal(l.clone()).evaluate_all(sample)?;
                let b = g.evaluate_all(sample)?;
                let sum: Vec<Option<Vec<S>>> = a
                    .into_iter()
                    .zip(b)
                    .map(|(x, y)| match (x, y) {
                        (Some(x), Some(y)) => Some(x.into_iter().zip(y).map(|(p, q)| p + q).collect()),
                        _ => None,
                    })
                    .collect();
                Generator::tabulate(sample, &sum)
            }
            (None, None) => Err(Error::Config("empty generator".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::QuadReal;

    #[test]
    fn fibonacci_preset() {
        let cfg = RunConfig::from_json(r#"{"preset": "fibonacci", "box": {"lo": [0], "hi": [50]}}"#).unwrap();
        let s: CutProjectScheme<QuadReal> = cfg.scheme().unwrap();
        assert_eq!(s.d(), 1);
        let w: WindowRegion<QuadReal> = cfg.window().unwrap();
        assert!(w.is_interval_window());
        let b: PhysBox<f64> = cfg.bbox().unwrap();
        assert_eq!(b.hi_f64(), vec![50.0]);
    }

    #[test]
    fn malformed_configs() {
        for bad in [
            "{",
            r#"{"mode": "approximate"}"#,
            r#"{"field_D": 4}"#,
            r#"{"preset": "penrose"}"#,
            r#"{"unknown_key": 1}"#,
        ] {
            let e = RunConfig::from_json(bad).unwrap_err();
            assert_eq!(e.kind(), crate::ErrorKind::Config, "{bad}");
        }
        let cfg = RunConfig::from_json(r#"{"d": 1, "n": 1, "basis": [["1", "1"], ["x", "2"]]}"#).unwrap();
        assert!(cfg.scheme::<QuadReal>().is_err());
        let cfg = RunConfig::from_json(r#"{"d": 1, "n": 1, "basis": [[0.5, 1], [1, 3]]}"#).unwrap();
        assert!(cfg.scheme::<QuadReal>().is_err());
        assert!(cfg.scheme::<f64>().is_ok());
    }

    #[test]
    fn windows_and_offsets() {
        let cfg = RunConfig::from_json(
            r#"{"d": 1, "n": 1, "torsion": [2], "basis": [["1", "1"], ["1/2 - 1/2*sqrt(5)", "1/2 + 1/2*sqrt(5)"]],
                "torsion_labels": ["1", "0"],
                "window": {"0": [["-1", "0"]], "1": [["0", "1"], ["2", "3"]]},
                "xi": {"internal": ["1/7"], "torsion": "1"}}"#,
        )
        .unwrap();
        let s: CutProjectScheme<QuadReal> = cfg.scheme().unwrap();
        let w: WindowRegion<QuadReal> = cfg.window().unwrap();
        assert_eq!(w.components().len(), 2);
        let xi = cfg.xi(&s).unwrap();
        assert_eq!(xi.torsion, TorsionElem(vec![1]));
        assert_eq!(xi.phys.len(), 1);
    }

    #[test]
    fn substitution_block() {
        let cfg = RunConfig::from_json(
            r#"{"substitution": {"alphabet": ["a", "b"], "rules": {"b": "a", "a": "ab"}, "seed": "a"}}"#,
        )
        .unwrap();
        let s = cfg.substitution().unwrap();
        assert_eq!(s.rule(0), &[0, 1]);
    }
}
