//! Scenario file schema, validation, and resolution into runnable form.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use moebius_geom::congruence::{Section, RANK_SIGMA_DROP, RANK_SIGMA_KEEP};
use moebius_geom::gallery::{make_example, ExampleId, ExampleSpec};
use moebius_geom::hypersurface::{ImmersionPatch, MoebiusStep, MoebiusTransform};

pub const SCHEMA_VERSION: u32 = 1;

/// A scenario as read from disk.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub examples: Vec<ExampleEntry>,
    #[serde(default)]
    pub transform: Option<TransformSpec>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    pub checks: Vec<String>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub section: Option<SectionSpec>,
    #[serde(default)]
    pub finalkey_theta: Option<f64>,
    #[serde(default)]
    pub expected_rank: Option<usize>,
    #[serde(default)]
    pub expected_structure: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleEntry {
    pub id: String,
    #[serde(default)]
    pub theta: Option<f64>,
    #[serde(default)]
    pub n: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub windows: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub counts: Option<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub base: Vec<f64>,
    pub dir1: Vec<f64>,
    pub dir2: Vec<f64>,
    #[serde(default)]
    pub window: Option<[[f64; 2]; 2]>,
    #[serde(default)]
    pub counts: Option<[usize; 2]>,
}

/// Exactly one of the fields must be present.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSpec {
    #[serde(default)]
    pub steps: Option<Vec<StepSpec>>,
    #[serde(default)]
    pub random_similarity_inversion: Option<RandomTransformSpec>,
}

/// Exactly one of the fields must be present.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    #[serde(default)]
    pub scale: Option<f64>,
    #[serde(default)]
    pub translate: Option<Vec<f64>>,
    #[serde(default)]
    pub orthogonal: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub inversion: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomTransformSpec {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_spread")]
    pub spread: f64,
    #[serde(default = "default_true")]
    pub inversion: bool,
}

fn default_spread() -> f64 {
    2.0
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckKind {
    Invariants,
    Gauss,
    Codazzi,
    Blaschke2Route,
    CongruenceRank,
    SphereSurface,
    Theta,
    Wang,
    Splitting,
    Elliptic,
    FinalKey,
}

impl CheckKind {
    pub const ALL: [CheckKind; 11] = [
        CheckKind::Invariants,
        CheckKind::Gauss,
        CheckKind::Codazzi,
        CheckKind::Blaschke2Route,
        CheckKind::CongruenceRank,
        CheckKind::SphereSurface,
        CheckKind::Theta,
        CheckKind::Wang,
        CheckKind::Splitting,
        CheckKind::Elliptic,
        CheckKind::FinalKey,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckKind::Invariants => "invariants",
            CheckKind::Gauss => "gauss",
            CheckKind::Codazzi => "codazzi",
            CheckKind::Blaschke2Route => "blaschke2route",
            CheckKind::CongruenceRank => "congruence_rank",
            CheckKind::SphereSurface => "sphere_surface",
            CheckKind::Theta => "theta",
            CheckKind::Wang => "wang",
            CheckKind::Splitting => "splitting",
            CheckKind::Elliptic => "elliptic",
            CheckKind::FinalKey => "finalkey",
        }
    }

    pub fn parse(s: &str) -> Option<CheckKind> {
        CheckKind::ALL.iter().copied().find(|k| k.as_str() == s)
    }

    /// Checks that compare two immersions over the same chart.
    pub fn needs_pair(&self) -> bool {
        matches!(self, CheckKind::Theta | CheckKind::Wang | CheckKind::FinalKey)
    }
}

/// Expected kernel-distribution structure for the `elliptic` check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpectedStructure {
    SurfaceLike,
    Elliptic,
}

/// Tolerance table: name, default, and whether the named statistic must stay
/// below (upper) or above (lower) the tolerance.
pub const TOLERANCES: [(&str, f64, Bound); 19] = [
    ("trace", 1e-9, Bound::Upper),
    ("shape_norm", 1e-8, Bound::Upper),
    ("gauss", 1e-6, Bound::Upper),
    ("codazzi", 1e-6, Bound::Upper),
    ("blaschke2route", 1e-6, Bound::Upper),
    ("metric_gap", 1e-9, Bound::Upper),
    ("flatness", 1e-7, Bound::Upper),
    ("shape_gap_min", 0.1, Bound::Lower),
    ("nullity_min", 0.01, Bound::Lower),
    ("wang", 1e-7, Bound::Upper),
    ("sigma_keep", RANK_SIGMA_KEEP, Bound::Lower),
    ("sigma_drop", RANK_SIGMA_DROP, Bound::Upper),
    ("minimality", 1e-6, Bound::Upper),
    ("relmetr", 1e-8, Bound::Upper),
    ("splitting_conformal", 1e-7, Bound::Upper),
    ("elliptic_sym", 1e-7, Bound::Upper),
    ("j_defect", 1e-7, Bound::Upper),
    ("elliptic_b_min", 1e-3, Bound::Lower),
    ("finalkey", 1e-8, Bound::Upper),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    Upper,
    Lower,
}

impl Bound {
    pub fn as_str(&self) -> &'static str {
        match self {
            Bound::Upper => "upper",
            Bound::Lower => "lower",
        }
    }
}

/// Resolved tolerances; upper bounds already multiplied by the scale.
pub struct Tolerances {
    map: BTreeMap<&'static str, (f64, Bound)>,
}

impl Tolerances {
    fn resolve(overrides: &BTreeMap<String, f64>, scale: f64) -> Result<Tolerances, String> {
        let mut map = BTreeMap::new();
        for (name, default, bound) in TOLERANCES {
            map.insert(name, (default, bound));
        }
        for (name, value) in overrides {
            let Some(entry) = TOLERANCES.iter().find(|(n, _, _)| n == name) else {
                return Err(format!("unknown tolerance `{name}`"));
            };
            if !value.is_finite() || *value < 0.0 {
                return Err(format!("tolerance `{name}` must be a nonnegative number"));
            }
            map.insert(entry.0, (*value, entry.2));
        }
        for (_, (value, bound)) in map.iter_mut() {
            if *bound == Bound::Upper {
                *value *= scale;
            }
        }
        Ok(Tolerances { map })
    }

    pub fn get(&self, name: &str) -> (f64, Bound) {
        *self.map.get(name).unwrap_or_else(|| panic!("unknown tolerance `{name}`"))
    }
}

/// A scenario after validation: patches built, grids concrete, checks typed.
pub struct Resolved {
    pub specs: Vec<ExampleSpec>,
    pub patches: Vec<ImmersionPatch>,
    /// Base and partner for pair checks, when available.
    pub pair: Option<(ImmersionPatch, ImmersionPatch)>,
    pub windows: Vec<(f64, f64)>,
    pub counts: Vec<usize>,
    pub checks: Vec<CheckKind>,
    pub tol: Tolerances,
    pub section: Option<(Section, [[f64; 2]; 2], [usize; 2])>,
    pub finalkey_theta: Option<f64>,
    pub expected_rank: Option<usize>,
    pub expected_structure: Option<ExpectedStructure>,
    pub transform_label: Option<String>,
}

pub struct RunOptions {
    pub tol_scale: f64,
    pub seed: Option<u64>,
    pub with_time: bool,
}

impl Default for RunOptions {
    fn default() -> RunOptions {
        RunOptions { tol_scale: 1.0, seed: None, with_time: true }
    }
}

fn parse_example(e: &ExampleEntry) -> Result<ExampleSpec, String> {
    let id = ExampleId::parse(&e.id)
        .ok_or_else(|| format!("unknown example `{}`", e.id))?;
    let mut spec = ExampleSpec::new(id);
    if let Some(n) = e.n {
        if !(2..=6).contains(&n) {
            return Err(format!("example `{}`: dimension {n} outside 2..=6", e.id));
        }
        if id == ExampleId::CartanExample && n != 5 {
            return Err("cartan_example is only defined for n = 5".into());
        }
        if id == ExampleId::ConeCylinder && n < 3 {
            return Err("cone_cylinder needs n >= 3".into());
        }
        spec.n = n;
    }
    if let Some(theta) = e.theta {
        if id != ExampleId::MinimalCylinder {
            return Err(format!("example `{}` takes no theta parameter", e.id));
        }
        if !(0.0..2.0 * std::f64::consts::PI).contains(&theta) {
            return Err(format!("theta {theta} outside [0, 2 pi)"));
        }
        spec.theta = theta;
    }
    Ok(spec)
}

fn build_transform(
    spec: &TransformSpec,
    ambient: usize,
    seed_override: Option<u64>,
    patch: &ImmersionPatch,
    windows: &[(f64, f64)],
) -> Result<MoebiusTransform, String> {
    match (&spec.steps, &spec.random_similarity_inversion) {
        (Some(steps), None) => {
            let mut out = Vec::new();
            let mut inversions = 0usize;
            for s in steps {
                let fields = [
                    s.scale.is_some(),
                    s.translate.is_some(),
                    s.orthogonal.is_some(),
                    s.inversion.is_some(),
                ];
                if fields.iter().filter(|p| **p).count() != 1 {
                    return Err("each transform step must set exactly one of scale, translate, orthogonal, inversion".into());
                }
                if let Some(c) = s.scale {
                    if !(c.is_finite() && c > 0.0) {
                        return Err("scale step must be positive".into());
                    }
                    out.push(MoebiusStep::Scale(c));
                } else if let Some(t) = &s.translate {
                    if t.len() != ambient {
                        return Err(format!("translate step needs {ambient} components"));
                    }
                    out.push(MoebiusStep::Translate(DVector::from_row_slice(t)));
                } else if let Some(q) = &s.orthogonal {
                    if q.len() != ambient || q.iter().any(|r| r.len() != ambient) {
                        return Err(format!("orthogonal step needs a {ambient} x {ambient} matrix"));
                    }
                    let m = DMatrix::from_fn(ambient, ambient, |i, j| q[i][j]);
                    let defect = (m.transpose() * &m - DMatrix::identity(ambient, ambient)).amax();
                    if defect > 1e-10 {
                        return Err(format!("orthogonal step is not orthogonal (defect {defect:e})"));
                    }
                    out.push(MoebiusStep::Orthogonal(m));
                } else if let Some(c) = &s.inversion {
                    if c.len() != ambient {
                        return Err(format!("inversion step needs {ambient} components"));
                    }
                    inversions += 1;
                    if inversions > 1 {
                        return Err("at most one inversion step is supported".into());
                    }
                    out.push(MoebiusStep::Inversion(DVector::from_row_slice(c)));
                }
            }
            Ok(MoebiusTransform::new(ambient, out))
        }
        (None, Some(r)) => {
            let seed = seed_override.or(r.seed).unwrap_or(0);
            if !(r.spread.is_finite() && r.spread > 0.0) {
                return Err("random transform spread must be positive".into());
            }
            let similarity = MoebiusTransform::random_similarity(ambient, seed, r.spread);
            if !r.inversion {
                return Ok(similarity);
            }
            // Place the inversion center outside the image of the grid
            // window: past the bounding box of the transformed corners.
            let mut hi = DVector::from_element(ambient, f64::NEG_INFINITY);
            let corners = 1usize << windows.len().min(16);
            for mask in 0..corners {
                let u: Vec<f64> = windows
                    .iter()
                    .enumerate()
                    .map(|(k, (lo, hi))| if mask >> k & 1 == 0 { *lo } else { *hi })
                    .collect();
                let raw = patch
                    .value_at(&u)
                    .map_err(|e| format!("window corner failed: {e}"))?;
                let img = similarity
                    .apply_value(&raw)
                    .map_err(|e| format!("window corner failed: {e}"))?;
                for c in 0..ambient {
                    hi[c] = hi[c].max(img[c]);
                }
            }
            let center = hi.add_scalar(1.0 + r.spread);
            Ok(similarity.then_inversion(center))
        }
        _ => Err("transform must set exactly one of steps, random_similarity_inversion".into()),
    }
}

/// Validate a scenario and build everything the checks need.
pub fn resolve(sc: &Scenario, opts: &RunOptions) -> Result<Resolved, String> {
    if sc.schema != SCHEMA_VERSION {
        return Err(format!("unsupported schema {}, expected {SCHEMA_VERSION}", sc.schema));
    }
    if sc.examples.is_empty() || sc.examples.len() > 2 {
        return Err("scenario needs one or two examples".into());
    }
    if !(opts.tol_scale.is_finite() && opts.tol_scale > 0.0) {
        return Err("tol-scale must be positive".into());
    }

    let specs: Vec<ExampleSpec> = sc
        .examples
        .iter()
        .map(parse_example)
        .collect::<Result<_, _>>()?;
    let n = specs[0].n;
    if specs.iter().any(|s| s.n != n) {
        return Err("examples must share one dimension".into());
    }
    let patches: Vec<ImmersionPatch> = specs.iter().map(make_example).collect();

    let default_window = specs[0].default_window();
    let windows: Vec<(f64, f64)> = match sc.grid.as_ref().and_then(|g| g.windows.as_ref()) {
        Some(w) => {
            if w.len() != n {
                return Err(format!("grid windows need {n} axes"));
            }
            w.iter().map(|[lo, hi]| (*lo, *hi)).collect()
        }
        None => default_window,
    };
    for (k, (lo, hi)) in windows.iter().enumerate() {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(format!("grid window {k} is not an interval"));
        }
        for patch in &patches {
            let (dlo, dhi) = patch.domain()[k];
            if *lo <= dlo || *hi >= dhi {
                return Err(format!(
                    "grid window {k} = [{lo}, {hi}] leaves the chart domain ({dlo}, {dhi})"
                ));
            }
        }
    }
    let counts: Vec<usize> = match sc.grid.as_ref().and_then(|g| g.counts.as_ref()) {
        Some(c) => {
            if c.len() != n || c.iter().any(|k| *k == 0) {
                return Err(format!("grid counts need {n} positive entries"));
            }
            c.clone()
        }
        None => vec![3; n],
    };

    let mut checks = Vec::new();
    if sc.checks.is_empty() {
        return Err("scenario lists no checks".into());
    }
    for name in &sc.checks {
        let kind = CheckKind::parse(name).ok_or_else(|| format!("unknown check `{name}`"))?;
        if !checks.contains(&kind) {
            checks.push(kind);
        }
    }
    if n < 3 && checks.contains(&CheckKind::Blaschke2Route) {
        return Err("check `blaschke2route` needs n >= 3".into());
    }

    let transform = sc
        .transform
        .as_ref()
        .map(|t| build_transform(t, n + 1, opts.seed, &patches[0], &windows))
        .transpose()?;
    let transform_label = transform.as_ref().map(|t| {
        if t.has_inversion() {
            "with inversion".to_string()
        } else {
            "similarity".to_string()
        }
    });

    let pair = if patches.len() == 2 {
        if transform.is_some() {
            return Err("a transform cannot be combined with two examples".into());
        }
        Some((patches[0].clone(), patches[1].clone()))
    } else {
        transform.map(|t| (patches[0].clone(), patches[0].transformed(t)))
    };
    if pair.is_none() {
        if let Some(k) = checks.iter().find(|k| k.needs_pair()) {
            return Err(format!(
                "check `{}` compares two immersions: give two examples or a transform",
                k.as_str()
            ));
        }
    }

    let section = match &sc.section {
        Some(s) => {
            if s.base.len() != n || s.dir1.len() != n || s.dir2.len() != n {
                return Err(format!("section base and directions need {n} components"));
            }
            let window = s.window.unwrap_or([[-0.15, 0.15], [-0.15, 0.15]]);
            let counts = s.counts.unwrap_or([3, 3]);
            if counts.iter().any(|k| *k == 0) {
                return Err("section counts must be positive".into());
            }
            Some((
                Section {
                    base: s.base.clone(),
                    dir1: DVector::from_row_slice(&s.dir1),
                    dir2: DVector::from_row_slice(&s.dir2),
                },
                window,
                counts,
            ))
        }
        None => default_section(&specs[0]),
    };
    if checks.contains(&CheckKind::SphereSurface) && section.is_none() {
        return Err("check `sphere_surface` needs a section for this example".into());
    }

    let finalkey_theta = if checks.contains(&CheckKind::FinalKey) {
        let theta = match sc.finalkey_theta {
            Some(t) => t,
            None => {
                if specs.len() == 2
                    && specs.iter().all(|s| s.id == ExampleId::MinimalCylinder)
                {
                    specs[1].theta - specs[0].theta
                } else if sc.transform.is_some() {
                    0.0
                } else {
                    return Err(
                        "check `finalkey` needs finalkey_theta or a minimal_cylinder pair".into()
                    );
                }
            }
        };
        Some(theta)
    } else {
        None
    };

    let expected_structure = match sc.expected_structure.as_deref() {
        None => None,
        Some("surface_like") => Some(ExpectedStructure::SurfaceLike),
        Some("elliptic") => Some(ExpectedStructure::Elliptic),
        Some(other) => {
            return Err(format!(
                "unknown expected_structure `{other}` (surface_like or elliptic)"
            ))
        }
    };

    Ok(Resolved {
        specs,
        patches,
        pair,
        windows,
        counts,
        checks,
        tol: Tolerances::resolve(&sc.tolerances, opts.tol_scale)?,
        section,
        finalkey_theta,
        expected_rank: sc.expected_rank,
        expected_structure,
        transform_label,
    })
}

/// Built-in sections for the rank-two gallery entries, transversal to the
/// kernel distribution on the default windows.
fn default_section(spec: &ExampleSpec) -> Option<(Section, [[f64; 2]; 2], [usize; 2])> {
    if spec.n != 5 {
        return None;
    }
    let window = [[-0.15, 0.15], [-0.15, 0.15]];
    let counts = [3, 3];
    let axis = |k: usize| DVector::from_fn(5, |i, _| if i == k { 1.0 } else { 0.0 });
    match spec.id {
        ExampleId::MinimalCylinder => Some((
            Section { base: vec![0.2, -0.3, 0.1, 0.4, -0.2], dir1: axis(0), dir2: axis(1) },
            window,
            counts,
        )),
        ExampleId::ConeCylinder => Some((
            Section { base: vec![1.2, 0.6, 0.7, 0.2, -0.1], dir1: axis(1), dir2: axis(2) },
            window,
            counts,
        )),
        ExampleId::CartanExample => Some((
            Section { base: vec![1.0, 0.1, 0.8, 0.5, 0.45], dir1: axis(2), dir2: axis(3) },
            window,
            counts,
        )),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> Scenario {
        serde_json::from_str(json).expect("scenario parses")
    }

    fn resolve_default(json: &str) -> Result<Resolved, String> {
        resolve(&parse(json), &RunOptions::default())
    }

    fn config_error(json: &str) -> String {
        match resolve_default(json) {
            Err(e) => e,
            Ok(_) => panic!("expected a config error"),
        }
    }

    #[test]
    fn rejects_unknown_names() {
        let err = config_error(
            r#"{"schema": 1, "examples": [{"id": "torus"}], "checks": ["gauss"]}"#,
        );
        assert!(err.contains("unknown example"), "{err}");

        let err = config_error(
            r#"{"schema": 1, "examples": [{"id": "round_cylinder"}], "checks": ["spectral"]}"#,
        );
        assert!(err.contains("unknown check"), "{err}");

        let err = config_error(
            r#"{"schema": 1, "examples": [{"id": "round_cylinder"}],
                "checks": ["gauss"], "tolerances": {"gaus": 1e-5}}"#,
        );
        assert!(err.contains("unknown tolerance"), "{err}");

        let err = config_error(
            r#"{"schema": 3, "examples": [{"id": "round_cylinder"}], "checks": ["gauss"]}"#,
        );
        assert!(err.contains("unsupported schema"), "{err}");
    }

    #[test]
    fn pair_checks_need_a_partner() {
        let err = config_error(
            r#"{"schema": 1, "examples": [{"id": "cartan_example"}], "checks": ["theta"]}"#,
        );
        assert!(err.contains("compares two immersions"), "{err}");
    }

    #[test]
    fn windows_must_stay_inside_the_chart() {
        let err = config_error(
            r#"{"schema": 1, "examples": [{"id": "cone_cylinder"}],
                "grid": {"windows": [[0.0005, 1.0], [0.3, 1.0], [0.3, 1.0], [-1.0, 1.0], [-1.0, 1.0]]},
                "checks": ["gauss"]}"#,
        );
        assert!(err.contains("chart domain"), "{err}");
    }

    #[test]
    fn finalkey_theta_resolution() {
        let rz = resolve_default(
            r#"{"schema": 1,
                "examples": [{"id": "minimal_cylinder", "theta": 0.25},
                             {"id": "minimal_cylinder", "theta": 1.5}],
                "checks": ["finalkey"]}"#,
        )
        .unwrap();
        assert_eq!(rz.finalkey_theta, Some(1.25));

        let rz = resolve_default(
            r#"{"schema": 1, "examples": [{"id": "cartan_example"}],
                "transform": {"steps": [{"scale": 2.0}]},
                "checks": ["finalkey"]}"#,
        )
        .unwrap();
        assert_eq!(rz.finalkey_theta, Some(0.0));

        let err = config_error(
            r#"{"schema": 1,
                "examples": [{"id": "cartan_example"}, {"id": "cartan_example"}],
                "checks": ["finalkey"]}"#,
        );
        assert!(err.contains("finalkey_theta"), "{err}");
    }

    #[test]
    fn tol_scale_moves_upper_bounds_only() {
        let sc = parse(
            r#"{"schema": 1, "examples": [{"id": "round_cylinder"}],
                "checks": ["gauss"], "tolerances": {"codazzi": 2e-6}}"#,
        );
        let opts = RunOptions { tol_scale: 10.0, ..RunOptions::default() };
        let rz = resolve(&sc, &opts).unwrap();
        let near = |got: f64, want: f64| (got / want - 1.0).abs() < 1e-12;
        assert!(near(rz.tol.get("gauss").0, 1e-5));
        assert!(near(rz.tol.get("codazzi").0, 2e-5));
        assert_eq!(rz.tol.get("shape_gap_min").0, 0.1);
        assert_eq!(rz.tol.get("nullity_min").0, 0.01);
    }

    #[test]
    fn low_dimension_blocks_curvature_route() {
        let err = config_error(
            r#"{"schema": 1, "examples": [{"id": "round_cylinder", "n": 2}],
                "checks": ["blaschke2route"]}"#,
        );
        assert!(err.contains("n >= 3"), "{err}");
    }

    #[test]
    fn transform_steps_are_validated() {
        let err = config_error(
            r#"{"schema": 1, "examples": [{"id": "round_cylinder"}],
                "transform": {"steps": [{"scale": 2.0, "translate": [0,0,0,0,0,0]}]},
                "checks": ["wang"]}"#,
        );
        assert!(err.contains("exactly one of"), "{err}");

        let err = config_error(
            r#"{"schema": 1, "examples": [{"id": "round_cylinder"}],
                "transform": {"steps": [{"orthogonal": [[1,0],[0,1]]}]},
                "checks": ["wang"]}"#,
        );
        assert!(err.contains("6 x 6"), "{err}");

        let rz = resolve_default(
            r#"{"schema": 1, "examples": [{"id": "round_cylinder"}],
                "transform": {"steps": [{"translate": [1,2,3,4,5,6]}, {"inversion": [9,9,9,9,9,9]}]},
                "checks": ["wang"]}"#,
        )
        .unwrap();
        assert_eq!(rz.transform_label.as_deref(), Some("with inversion"));
        assert!(rz.pair.is_some());
    }

    #[test]
    fn default_sections_cover_rank_two_examples() {
        for id in ["minimal_cylinder", "cone_cylinder", "cartan_example"] {
            let rz = resolve_default(&format!(
                r#"{{"schema": 1, "examples": [{{"id": "{id}"}}], "checks": ["sphere_surface"]}}"#
            ))
            .unwrap();
            let (section, window, counts) = rz.section.expect("built-in section");
            assert_eq!(section.base.len(), 5);
            assert_eq!(window, [[-0.15, 0.15], [-0.15, 0.15]]);
            assert_eq!(counts, [3, 3]);
        }
    }
}
