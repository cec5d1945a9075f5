use std::path::Path;

use modelset_core::acceptance::{
    acceptance_domain, extract_patch, localizing_patch, verify_acceptance, window_intervals, AcceptanceDomain,
    DomainRegion, Patch, Region,
};
use modelset_core::config::RunConfig;
use modelset_core::deform::{apply_generator, decompose_generator, meyer_report, nonslip_probe, GeneratorFamily};
use modelset_core::report::{domain_bars_svg, gap_decay_svg, points_text, tick_rows_svg, tiling_strip_svg};
use modelset_core::scalar::render;
use modelset_core::scheme::{
    enumerate_model_set, is_nonsingular, reproject, validate_scheme, CutProjectScheme, NonsingularVerdict,
    PointSample, WindowRegion, Xi,
};
use modelset_core::substitution::{section7_experiment, Section7Options, SubstitutionSystem};
use modelset_core::{Error, IntervalSet, QuadReal, Result, Scalar, TorsionElem};
use serde_json::{json, Value};

use crate::artifacts::Artifacts;

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn exact_and_float<S: Scalar>(v: &S) -> Value {
    json!({ "exact": render(v), "float": v.to_f64() })
}

fn vector<S: Scalar>(v: &[S]) -> Value {
    json!({ "exact": v.iter().map(render).collect::<Vec<_>>(), "float": v.iter().map(|x| x.to_f64()).collect::<Vec<_>>() })
}

fn interval_set<S: Scalar>(s: &IntervalSet<S>) -> Value {
    Value::Array(
        s.parts()
            .iter()
            .map(|p| {
                json!({
                    "lo": p.lo_value().map(render),
                    "hi": p.hi_value().map(render),
                    "lo_float": p.lo_value().map(|v| v.to_f64()),
                    "hi_float": p.hi_value().map(|v| v.to_f64()),
                })
            })
            .collect(),
    )
}

fn domain_json<S: Scalar>(d: &AcceptanceDomain<S>) -> Value {
    let components = match &d.region {
        DomainRegion::Intervals(m) => {
            m.iter().map(|(t, s)| (t.to_string(), interval_set(s))).collect::<serde_json::Map<_, _>>()
        }
        DomainRegion::Pieces(m) => m
            .iter()
            .map(|(t, p)| {
                let pieces: Vec<Value> = p
                    .positive
                    .iter()
                    .map(|poly| Value::Array(poly.vertices().iter().map(|v| vector(v)).collect()))
                    .collect();
                (t.to_string(), json!({ "positive_vertices": pieces, "excluded": p.excluded.len() }))
            })
            .collect(),
    };
    json!({
        "components": components,
        "measure": d.measure_f64(),
        "patch_displacements": d.patch_displacements,
        "complement_witnesses": d.complement_witnesses.len(),
    })
}

fn patch_json<S: Scalar>(p: &Patch<S>) -> Value {
    json!({
        "anchor": p.anchor,
        "points": p.points.iter().map(|v| vector(v)).collect::<Vec<_>>(),
    })
}

struct Setup<S> {
    scheme: CutProjectScheme<S>,
    window: WindowRegion<S>,
    xi: Xi<S>,
}

fn setup<S: Scalar>(cfg: &RunConfig) -> Result<Setup<S>> {
    let scheme = cfg.scheme::<S>()?;
    let window = cfg.window::<S>()?;
    let xi = cfg.xi(&scheme)?;
    Ok(Setup { scheme, window, xi })
}

fn sample<S: Scalar>(cfg: &RunConfig, s: &Setup<S>) -> Result<PointSample<S>> {
    enumerate_model_set(&s.scheme, &s.window, &s.xi, &cfg.bbox()?)
}

fn first_coords<S: Scalar>(points: &[Vec<S>]) -> Vec<f64> {
    points.iter().map(|p| p[0].to_f64()).collect()
}

pub fn scheme_validate<S: Scalar>(cfg: &RunConfig, out: &Path, art: &mut Artifacts) -> Result<()> {
    let scheme = cfg.scheme::<S>()?;
    let bound = cfg.bound.unwrap_or(1000);
    let diag = validate_scheme(&scheme, bound)?;
    let mut report = json!({ "diagnostics": to_json(&diag) });
    if cfg.window.is_some() || cfg.preset.is_some() {
        let window = cfg.window::<S>()?;
        let xi = cfg.xi(&scheme)?;
        let ns_bound = bound.min(200);
        report["offset"] = match is_nonsingular(&scheme, &window, &xi, ns_bound)? {
            NonsingularVerdict::VerifiedUpToBound(b) => json!({ "verdict": format!("nonsingular-up-to-bound {b}") }),
            NonsingularVerdict::Singular { coords, internal, torsion } => json!({
                "verdict": "singular",
                "coords": coords,
                "internal": vector(&internal),
                "torsion": torsion.to_string(),
            }),
        };
    }
    art.report(out, &report);
    Ok(())
}

pub fn generate<S: Scalar>(cfg: &RunConfig, out: &Path, art: &mut Artifacts) -> Result<()> {
    let s = setup::<S>(cfg)?;
    let sample = sample(cfg, &s)?;
    art.points(out, points_text(&sample.positions));
    art.report(
        out,
        &json!({
            "points": sample.len(),
            "min_separation": sample.min_separation(),
            "exact": S::EXACT,
        }),
    );
    if s.scheme.d() == 1 {
        art.svg(out, tick_rows_svg("projection set", &[("points".into(), first_coords(&sample.positions))]));
    }
    Ok(())
}

fn domain_svg<S: Scalar>(title: &str, s: &Setup<S>, domain: &AcceptanceDomain<S>, sample: &PointSample<S>) -> Option<String> {
    let t = TorsionElem::trivial(s.scheme.torsion_orders());
    let intervals = domain.intervals(&t)?;
    let window: Vec<(f64, f64)> = window_intervals(&s.window, &t).iter().map(|(a, b)| (a.to_f64(), b.to_f64())).collect();
    let dom: Vec<(f64, f64)> = intervals
        .parts()
        .iter()
        .filter_map(|p| Some((p.lo_value()?.to_f64(), p.hi_value()?.to_f64())))
        .collect();
    let ticks: Vec<f64> = (0..sample.len())
        .map(|i| sample.star(i))
        .filter(|st| st.torsion == t && intervals.contains(&st.value[0]))
        .map(|st| st.value[0].to_f64())
        .collect();
    Some(domain_bars_svg(title, &window, &dom, &ticks))
}

fn patch_and_domain<S: Scalar>(
    cfg: &RunConfig,
    s: &Setup<S>,
    sample: &PointSample<S>,
) -> Result<(Patch<S>, AcceptanceDomain<S>)> {
    let i = cfg.patch_center(sample)?;
    let patch = extract_patch(sample, i, Region::Ball(cfg.patch_radius()?))?;
    let domain = acceptance_domain(&s.scheme, &s.window, &patch)?;
    Ok((patch, domain))
}

pub fn acceptance<S: Scalar>(cfg: &RunConfig, out: &Path, art: &mut Artifacts) -> Result<()> {
    let s = setup::<S>(cfg)?;
    let sample = sample(cfg, &s)?;
    let (patch, domain) = patch_and_domain(cfg, &s, &sample)?;
    art.report(out, &json!({ "patch": patch_json(&patch), "domain": domain_json(&domain) }));
    if let Some(svg) = domain_svg("acceptance domain", &s, &domain, &sample) {
        art.svg(out, svg);
    }
    Ok(())
}

pub fn verify<S: Scalar>(cfg: &RunConfig, out: &Path, art: &mut Artifacts) -> Result<()> {
    let s = setup::<S>(cfg)?;
    let sample = sample(cfg, &s)?;
    let (patch, domain) = patch_and_domain(cfg, &s, &sample)?;
    let rep = verify_acceptance(&sample, &domain);
    art.report(
        out,
        &json!({ "patch": patch_json(&patch), "domain": domain_json(&domain), "verification": to_json(&rep) }),
    );
    Ok(())
}

pub fn localize<S: Scalar>(cfg: &RunConfig, out: &Path, art: &mut Artifacts) -> Result<()> {
    let s = setup::<S>(cfg)?;
    let sample = sample(cfg, &s)?;
    let (lo, hi) = cfg.target::<S>()?;
    let loc = localizing_patch(&s.scheme, &s.window, &sample, &lo, &hi)?;
    art.report(
        out,
        &json!({
            "target": [exact_and_float(&lo), exact_and_float(&hi)],
            "anchor": loc.anchor,
            "patch": patch_json(&loc.patch),
            "chosen": loc.chosen,
            "intersection": interval_set(&loc.intersection),
            "domain": domain_json(&loc.domain),
            "within_target": loc.domain.is_within(&lo, &hi),
        }),
    );
    if let Some(svg) = domain_svg("localized acceptance domain", &s, &loc.domain, &sample) {
        art.svg(out, svg);
    }
    Ok(())
}

pub fn reproject_cmd<S: Scalar>(cfg: &RunConfig, out: &Path, art: &mut Artifacts) -> Result<()> {
    let s = setup::<S>(cfg)?;
    let sample = sample(cfg, &s)?;
    let family = cfg.generator(&s.scheme)?;
    let (Some(l), None, None) = (&family.linear, &family.local, &family.prefix) else {
        return Err(Error::Config("reproject needs a generator of kind `linear`".into()));
    };
    let deformed = reproject(&sample, l)?;
    let positions = deformed.positions();
    art.points(out, points_text(&positions));
    art.report(out, &json!({ "points": positions.len(), "trimmed": deformed.trimmed }));
    Ok(())
}

pub fn deform<S: Scalar>(cfg: &RunConfig, out: &Path, art: &mut Artifacts) -> Result<()> {
    let s = setup::<S>(cfg)?;
    let sample = sample(cfg, &s)?;
    let g = cfg.generator(&s.scheme)?.instantiate(&sample)?;
    let deformed = apply_generator(&sample, &g)?;
    let positions = deformed.positions();
    art.points(out, points_text(&positions));
    art.report(out, &json!({ "points": positions.len(), "trimmed": deformed.trimmed }));
    if s.scheme.d() == 1 {
        art.svg(
            out,
            tick_rows_svg(
                "deformation",
                &[("original".into(), first_coords(&sample.positions)), ("deformed".into(), first_coords(&positions))],
            ),
        );
    }
    Ok(())
}

fn from_quad<S: Scalar>(q: &QuadReal) -> Result<S> {
    S::parse_literal(&q.to_string(), q.d()).map_err(|e| Error::Config(e.to_string()))
}

struct SubstSetup<S> {
    sys: SubstitutionSystem,
    lengths: Vec<S>,
    seed: usize,
    markers: Vec<usize>,
    generations: u32,
}

fn subst_setup<S: Scalar>(cfg: &RunConfig) -> Result<SubstSetup<S>> {
    let sys = cfg.substitution()?;
    let spec = cfg.substitution_spec()?;
    let lengths = match cfg.tile_lengths::<S>()? {
        Some(l) => l,
        None => sys.natural_lengths()?.iter().map(from_quad).collect::<Result<_>>()?,
    };
    let seed = sys.letter(spec.seed.as_deref().unwrap_or(&sys.alphabet()[0]))?;
    let markers = match &spec.markers {
        Some(m) => m.iter().map(|l| sys.letter(l)).collect::<Result<_>>()?,
        None => vec![seed],
    };
    Ok(SubstSetup { sys, lengths, seed, markers, generations: spec.generations.unwrap_or(8) })
}

pub fn meyer<S: Scalar>(cfg: &RunConfig, out: &Path, art: &mut Artifacts) -> Result<()> {
    let radii = cfg.radii::<S>()?;
    let points: Vec<Vec<S>> = if cfg.substitution.is_some() {
        let ss = subst_setup::<S>(cfg)?;
        ss.sys.realize(ss.seed, ss.generations, &ss.lengths, &ss.markers)?.positions()
    } else {
        let s = setup::<S>(cfg)?;
        let sample = sample(cfg, &s)?;
        match cfg.generator.is_some() {
            true => apply_generator(&sample, &cfg.generator(&s.scheme)?.instantiate(&sample)?)?.positions(),
            false => sample.positions.clone(),
        }
    };
    let rep = meyer_report(&points, &radii, None, &cfg.thresholds())?;
    let series: Vec<(f64, f64)> =
        rep.radii_f64.iter().zip(&rep.min_gap_f64).filter_map(|(&r, g)| g.map(|g| (r, g))).collect();
    art.svg(out, gap_decay_svg("min gap of the difference set vs radius", &[("min gap".into(), series)]));
    art.report(out, &to_json(&rep));
    Ok(())
}

pub fn nonslip<S: Scalar>(cfg: &RunConfig, out: &Path, art: &mut Artifacts) -> Result<()> {
    let s = setup::<S>(cfg)?;
    let family = cfg.generator(&s.scheme)?;
    let rep = nonslip_probe(&s.scheme, &s.window, &s.xi, &cfg.bbox()?, &family, &cfg.radii::<S>()?)?;
    art.report(out, &to_json(&rep));
    Ok(())
}

pub fn decompose<S: Scalar>(cfg: &RunConfig, out: &Path, art: &mut Artifacts) -> Result<()> {
    let s = setup::<S>(cfg)?;
    let sample = sample(cfg, &s)?;
    let g = cfg.generator(&s.scheme)?.instantiate(&sample)?;
    let res = decompose_generator(&sample, &g, &cfg.r_max::<S>()?)?;
    art.report(
        out,
        &json!({
            "l": res.l.iter().map(|r| vector(r)).collect::<Vec<_>>(),
            "psi_radius": res.psi_radius.as_ref().map(exact_and_float),
            "residual_linf": exact_and_float(&res.residual_linf),
            "fits": to_json(&res.fits),
            "psi_values": res.psi_values.iter().map(|(c, v)| json!({ "coords": c, "psi": vector(v) })).collect::<Vec<_>>(),
        }),
    );
    Ok(())
}

pub enum SubstCommand {
    Expand { letter: Option<String>, n: u32 },
    Matrix,
    Eigen,
    Realize,
}

pub fn subst<S: Scalar>(cfg: &RunConfig, cmd: &SubstCommand, out: &Path, art: &mut Artifacts) -> Result<()> {
    let sys = cfg.substitution()?;
    match cmd {
        SubstCommand::Expand { letter, n } => {
            let l = sys.letter(letter.as_deref().unwrap_or(&sys.alphabet()[0]))?;
            let word = sys.expand(l, *n);
            let population: Vec<String> = sys.population(l, *n).iter().map(|c| c.to_string()).collect();
            art.report(
                out,
                &json!({ "letter": sys.alphabet()[l], "n": n, "length": word.len(), "population": population, "word": sys.word_string(&word) }),
            );
        }
        SubstCommand::Matrix => {
            let poly: Vec<String> = sys.characteristic_polynomial().iter().map(|c| c.to_string()).collect();
            art.report(
                out,
                &json!({
                    "alphabet": sys.alphabet(),
                    "convention": "M[i][j] = occurrences of letter i in the image of letter j",
                    "matrix": sys.matrix(),
                    "characteristic_polynomial": poly,
                }),
            );
        }
        SubstCommand::Eigen => {
            let e = sys.eigen_system()?;
            let entries: Vec<Value> = e
                .entries
                .iter()
                .map(|x| {
                    json!({
                        "value": x.value.render(),
                        "value_float": x.value.to_f64(),
                        "modulus": x.value.modulus(),
                        "multiplicity": x.multiplicity,
                        "class": to_json(&x.class),
                        "left_vectors": x.left_vectors.iter().map(|v| json!({ "exact": v.render(), "float": v.to_f64() })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            art.report(out, &json!({ "eigenvalues": entries, "notice": e.notice }));
        }
        SubstCommand::Realize => {
            let ss = subst_setup::<S>(cfg)?;
            let real = ss.sys.realize(ss.seed, ss.generations, &ss.lengths, &ss.markers)?;
            art.points(out, points_text(&real.positions()));
            art.report(
                out,
                &json!({
                    "word_length": real.word_len,
                    "points": real.points.len(),
                    "total_length": exact_and_float(&real.total_length),
                    "lengths": vector(&ss.lengths),
                }),
            );
            let word = ss.sys.expand(ss.seed, ss.generations);
            let mut pos = 0.0;
            let tiles: Vec<(f64, f64, String)> = word
                .iter()
                .take(60)
                .map(|&l| {
                    let len = ss.lengths[l].to_f64();
                    let t = (pos, len, ss.sys.alphabet()[l].clone());
                    pos += len;
                    t
                })
                .collect();
            art.svg(out, tiling_strip_svg("substitution tiling (first tiles)", &tiles));
        }
    }
    Ok(())
}

pub fn section7(options: &Section7Options, out: &Path, art: &mut Artifacts) -> Result<()> {
    let rep = section7_experiment(options)?;
    let branch = |b: &modelset_core::substitution::BranchReport, label: &str| -> (String, Vec<(f64, f64)>) {
        let pts = b.meyer.abscissa.iter().zip(&b.meyer.min_gap_f64).filter_map(|(&x, g)| g.map(|g| (x, g))).collect();
        (label.to_string(), pts)
    };
    let exact_gaps: Vec<(f64, f64)> = rep.gap_table.iter().map(|g| (g.n as f64, g.gap_f64.abs())).collect();
    art.svg(
        out,
        gap_decay_svg(
            "log min gap vs generation",
            &[
                branch(&rep.reprojection, "reprojection branch, min gap"),
                branch(&rep.slipping, "slipping branch, min gap"),
                ("|A1^n| - |A2^n| (exact)".into(), exact_gaps),
            ],
        ),
    );
    art.report(out, &to_json(&rep));
    Ok(())
}

pub fn plot(input: &Path, out: &Path, art: &mut Artifacts) -> Result<()> {
    let text = std::fs::read_to_string(input).map_err(|e| Error::Config(format!("{}: {e}", input.display())))?;
    let name = input.to_string_lossy();
    let svg = if name.ends_with(".json") {
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        plot_json(&v)?
    } else {
        let pts = modelset_core::report::parse_points_text(&text).map_err(Error::Config)?;
        tick_rows_svg(&name, &[("points".into(), pts.iter().map(|p| p[0]).collect())])
    };
    art.add(out.to_path_buf(), svg);
    Ok(())
}

fn plot_json(v: &Value) -> Result<String> {
    let floats = |x: &Value| -> Vec<Option<f64>> {
        x.as_array().map(|a| a.iter().map(Value::as_f64).collect()).unwrap_or_default()
    };
    let meyer_series = |m: &Value, label: &str| -> (String, Vec<(f64, f64)>) {
        let xs = floats(&m["abscissa"]);
        let gs = floats(&m["min_gap_f64"]);
        (label.to_string(), xs.iter().zip(&gs).filter_map(|(x, g)| Some(((*x)?, (*g)?))).collect())
    };
    if v.get("slipping").is_some() {
        return Ok(gap_decay_svg(
            "log min gap vs generation",
            &[meyer_series(&v["reprojection"]["meyer"], "reprojection branch"), meyer_series(&v["slipping"]["meyer"], "slipping branch")],
        ));
    }
    if v.get("min_gap_f64").is_some() {
        let rs = floats(&v["radii_f64"]);
        let gs = floats(&v["min_gap_f64"]);
        let pts = rs.iter().zip(&gs).filter_map(|(x, g)| Some(((*x)?, (*g)?))).collect();
        return Ok(gap_decay_svg("min gap vs radius", &[("min gap".into(), pts)]));
    }
    if let Some(comps) = v["domain"]["components"].as_object() {
        let mut dom = Vec::new();
        for parts in comps.values().filter_map(Value::as_array) {
            for p in parts {
                if let (Some(a), Some(b)) = (p["lo_float"].as_f64(), p["hi_float"].as_f64()) {
                    dom.push((a, b));
                }
            }
        }
        if !dom.is_empty() {
            return Ok(domain_bars_svg("acceptance domain", &dom, &dom, &[]));
        }
    }
    Err(Error::Config("report kind not recognised for plotting".into()))
}
