//! Run configuration, read from a single TOML file.

use std::path::{Path, PathBuf};

use elastica2d::complex_analytic::{AnalyticExpr, Complex, Term};
use elastica2d::mesh_elasticity::{meshgen, TriangleMesh};
use serde::Deserialize;

use crate::error::CliError;

pub type Pair = [f64; 2];

fn cx(p: Pair) -> Complex {
    Complex::new(p[0], p[1])
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub weierstrass: Option<WeierstrassConfig>,
    pub solve: Option<SolveConfig>,
    pub annulus: Option<AnnulusConfig>,
    pub strip: Option<StripConfig>,
    pub meshgen: Option<MeshSpec>,
    pub verify: Option<VerifyConfig>,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub coeff: Pair,
    pub power: Option<i32>,
    pub center: Option<Pair>,
    pub rate: Option<Pair>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZeroConfig {
    pub at: Pair,
    #[serde(default = "one")]
    pub order: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum RegionConfig {
    Disk {
        #[serde(default)]
        center: Pair,
        radius: f64,
    },
    Rectangle {
        min: Pair,
        max: Pair,
    },
}

impl RegionConfig {
    pub fn contains(&self, z: Complex) -> bool {
        match *self {
            RegionConfig::Disk { center, radius } => {
                (z - cx(center)).norm() <= radius * (1.0 + 1e-12)
            }
            RegionConfig::Rectangle { min, max } => {
                z.re >= min[0] && z.re <= max[0] && z.im >= min[1] && z.im <= max[1]
            }
        }
    }

    /// Lower-left and upper-right corners of the bounding box.
    pub fn bounds(&self) -> (Complex, Complex) {
        match *self {
            RegionConfig::Disk { center, radius } => {
                let c = cx(center);
                (
                    c - Complex::new(radius, radius),
                    c + Complex::new(radius, radius),
                )
            }
            RegionConfig::Rectangle { min, max } => (cx(min), cx(max)),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeierstrassConfig {
    pub lambda: f64,
    pub h: Vec<TermConfig>,
    #[serde(default)]
    pub zeros: Vec<ZeroConfig>,
    /// Explicit compensator; the compensating one is used when absent.
    pub k: Option<Vec<TermConfig>>,
    pub region: RegionConfig,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_grid() -> usize {
    24
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeshSpec {
    Disk {
        radius: f64,
        resolution: usize,
    },
    Rectangle {
        width: f64,
        height: f64,
        nx: usize,
        ny: usize,
    },
    Annulus {
        r1: f64,
        r2: f64,
        resolution: usize,
    },
}

impl MeshSpec {
    pub fn build(&self) -> Result<TriangleMesh, CliError> {
        let mesh = match *self {
            MeshSpec::Disk { radius, resolution } => meshgen::disk(radius, resolution),
            MeshSpec::Rectangle {
                width,
                height,
                nx,
                ny,
            } => meshgen::rectangle(width, height, nx, ny),
            MeshSpec::Annulus { r1, r2, resolution } => meshgen::annulus(r1, r2, resolution),
        };
        mesh.map_err(|e| CliError::Config(format!("mesh: {e}")))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MeshSource {
    File(PathBuf),
    Generate(MeshSpec),
}

impl MeshSource {
    pub fn load(&self, base: &Path, refine: usize) -> Result<TriangleMesh, CliError> {
        let mut mesh = match self {
            MeshSource::File(p) => {
                let path = base.join(p);
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
                TriangleMesh::from_text(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            MeshSource::Generate(spec) => spec.build()?,
        };
        for _ in 0..refine {
            mesh = mesh.refine();
        }
        Ok(mesh)
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    #[default]
    Identity,
    /// Least-squares affine fit to the pinned targets.
    Affine,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum PerturbKind {
    #[default]
    Vertex,
    Smooth,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbConfig {
    /// Amplitude as a fraction of the mesh diameter.
    pub amplitude: f64,
    #[serde(default)]
    pub kind: PerturbKind,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Selection {
    Boundary,
    All,
    Indices(Vec<usize>),
    /// Vertices `z` with `⟨z − point, normal⟩ ≥ 0`.
    HalfPlane {
        point: Pair,
        normal: Pair,
    },
}

impl Selection {
    pub fn vertices(&self, mesh: &TriangleMesh) -> Result<Vec<usize>, CliError> {
        Ok(match self {
            Selection::Boundary => mesh.boundary_vertices().to_vec(),
            Selection::All => (0..mesh.vertex_count()).collect(),
            Selection::Indices(ix) => {
                if let Some(&bad) = ix.iter().find(|&&i| i >= mesh.vertex_count()) {
                    return Err(CliError::Config(format!(
                        "pin index {bad} out of range ({} vertices)",
                        mesh.vertex_count()
                    )));
                }
                ix.clone()
            }
            Selection::HalfPlane { point, normal } => {
                let (p, n) = (cx(*point), cx(*normal));
                let scale = mesh.diameter() * n.norm();
                (0..mesh.vertex_count())
                    .filter(|&i| ((mesh.vertices()[i] - p) * n.conj()).re >= -1e-12 * scale)
                    .collect()
            }
        })
    }
}

fn unit() -> Pair {
    [1.0, 0.0]
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Target {
    Identity,
    /// The map of the `[weierstrass]` section.
    Weierstrass,
    Affine {
        #[serde(default = "unit")]
        a: Pair,
        #[serde(default)]
        b: Pair,
        #[serde(default)]
        c: Pair,
    },
    /// Rotation by `angle` about `center` followed by `shift`.
    Rigid {
        #[serde(default)]
        center: Pair,
        #[serde(default)]
        angle: f64,
        #[serde(default)]
        shift: Pair,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PinConfig {
    pub select: Selection,
    pub target: Target,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    pub grad_tol: Option<f64>,
    pub max_iters: Option<usize>,
    pub history: Option<usize>,
    pub melting_tol: Option<f64>,
    pub branch_tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum Compare {
    Weierstrass,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub mesh: MeshSource,
    pub lambda: f64,
    #[serde(default = "one")]
    pub steps: usize,
    #[serde(default)]
    pub pins: Vec<PinConfig>,
    #[serde(default)]
    pub init: InitKind,
    pub perturb: Option<PerturbConfig>,
    pub compare: Option<Compare>,
    #[serde(default)]
    pub solver: SolverSettings,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnulusConfig {
    pub r1: f64,
    pub r2: f64,
    /// Half-integer winding parameter; the image winds `2n + 1` times.
    pub n: f64,
    pub lambda: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    256
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripConfig {
    pub n: u32,
    pub lambda: f64,
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub lambda: f64,
    pub mesh: MeshSource,
    #[serde(default = "default_states")]
    pub states: usize,
}

fn default_states() -> usize {
    5
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

fn finite(name: &str, p: Pair) -> Result<(), CliError> {
    if p.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be finite")))
    }
}

pub fn terms(list: &[TermConfig], what: &str) -> Result<AnalyticExpr, CliError> {
    let mut out = Vec::with_capacity(list.len());
    for (i, t) in list.iter().enumerate() {
        finite(what, t.coeff)?;
        let coeff = cx(t.coeff);
        let term = match (t.power, t.rate) {
            (Some(power), None) => {
                let center = t.center.unwrap_or([0.0, 0.0]);
                finite(what, center)?;
                Term::Monomial {
                    coeff,
                    center: cx(center),
                    power,
                }
            }
            (None, Some(rate)) if t.center.is_none() => {
                finite(what, rate)?;
                Term::Exp {
                    coeff,
                    rate: cx(rate),
                }
            }
            _ => {
                return Err(CliError::Config(format!(
                    "{what} term {i}: give either `power` (with optional `center`) or `rate`"
                )))
            }
        };
        out.push(term);
    }
    Ok(AnalyticExpr::new(out))
}

impl WeierstrassConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("weierstrass.lambda", self.lambda)?;
        if self.h.is_empty() {
            return Err(CliError::Config("weierstrass.h has no terms".into()));
        }
        if self.grid < 2 {
            return Err(CliError::Config(
                "weierstrass.grid must be at least 2".into(),
            ));
        }
        for z in &self.zeros {
            finite("zero location", z.at)?;
            if z.order == 0 {
                return Err(CliError::Config("zero order must be at least 1".into()));
            }
        }
        match self.region {
            RegionConfig::Disk { center, radius } => {
                finite("region.center", center)?;
                positive("region.radius", radius)?;
            }
            RegionConfig::Rectangle { min, max } => {
                finite("region.min", min)?;
                finite("region.max", max)?;
                if !(min[0] < max[0] && min[1] < max[1]) {
                    return Err(CliError::Config(
                        "region.min must lie below and left of region.max".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn zeros(&self) -> Vec<elastica2d::weierstrass::Zero> {
        self.zeros
            .iter()
            .map(|z| elastica2d::weierstrass::Zero::new(cx(z.at), z.order))
            .collect()
    }
}

impl SolveConfig {
    pub fn validate(&self, seed: Option<u64>) -> Result<(), CliError> {
        positive("solve.lambda", self.lambda)?;
        if self.steps == 0 {
            return Err(CliError::Config("solve.steps must be at least 1".into()));
        }
        if let Some(p) = &self.perturb {
            if !(p.amplitude >= 0.0 && p.amplitude.is_finite()) {
                return Err(CliError::Config(
                    "perturb.amplitude must be non-negative".into(),
                ));
            }
            if seed.is_none() {
                return Err(CliError::Config(
                    "a perturbed run needs `seed` (config or --seed)".into(),
                ));
            }
        }
        for (name, x) in [
            ("grad_tol", self.solver.grad_tol),
            ("melting_tol", self.solver.melting_tol),
            ("branch_tol", self.solver.branch_tol),
        ] {
            if let Some(x) = x {
                if !(x >= 0.0 && x.is_finite()) {
                    return Err(CliError::Config(format!(
                        "solver.{name} must be non-negative"
                    )));
                }
            }
        }
        for pin in &self.pins {
            match &pin.target {
                Target::Affine { a, b, c } => {
                    finite("affine target", *a)?;
                    finite("affine target", *b)?;
                    finite("affine target", *c)?;
                }
                Target::Rigid {
                    center,
                    angle,
                    shift,
                } => {
                    finite("rigid target", *center)?;
                    finite("rigid target", *shift)?;
                    if !angle.is_finite() {
                        return Err(CliError::Config("rigid target angle must be finite".into()));
                    }
                }
                Target::Identity | Target::Weierstrass => {}
            }
            if let Selection::HalfPlane { point, normal } = &pin.select {
                finite("half_plane.point", *point)?;
                finite("half_plane.normal", *normal)?;
                if normal[0] == 0.0 && normal[1] == 0.0 {
                    return Err(CliError::Config("half_plane.normal must be nonzero".into()));
                }
            }
        }
        Ok(())
    }
}

impl Target {
    /// Position at full load, or `None` when it comes from the analytic map.
    pub fn full(&self, z: Complex) -> Option<Complex> {
        match *self {
            Target::Identity => Some(z),
            Target::Weierstrass => None,
            Target::Affine { a, b, c } => Some(cx(a) * z + cx(b) * z.conj() + cx(c)),
            Target::Rigid { .. } => Some(self.at(z, z, 1.0)),
        }
    }

    /// Position at load fraction `s ∈ [0, 1]` for reference point `z` with
    /// full-load position `w`. Rigid targets turn through the angle; the
    /// others move along the straight segment and hit `w` exactly at `s = 1`.
    pub fn at(&self, z: Complex, w: Complex, s: f64) -> Complex {
        match *self {
            Target::Rigid {
                center,
                angle,
                shift,
            } => {
                let c0 = cx(center);
                c0 + cx(shift) * s + Complex::from_polar(1.0, angle * s) * (z - c0)
            }
            _ if s >= 1.0 => w,
            _ => z + (w - z) * s,
        }
    }
}

impl AnnulusConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("annulus.lambda", self.lambda)?;
        positive("annulus.r1", self.r1)?;
        positive("annulus.r2", self.r2)?;
        if self.r1 > self.r2 {
            return Err(CliError::Config(format!(
                "annulus radii must be ordered, got r1 = {} > r2 = {}",
                self.r1, self.r2
            )));
        }
        let twice = 2.0 * self.n;
        if !(self.n >= 0.0 && (twice - twice.round()).abs() < 1e-12) {
            return Err(CliError::Config(format!(
                "annulus.n must be a non-negative half-integer, got {}",
                self.n
            )));
        }
        if self.samples == 0 {
            return Err(CliError::Config("annulus.samples must be positive".into()));
        }
        Ok(())
    }
}

pub enum StripInput {
    Params { c: f64, alpha: f64 },
    Domain { x1: f64, x2: f64 },
}

impl StripConfig {
    pub fn validate(&self) -> Result<StripInput, CliError> {
        positive("strip.lambda", self.lambda)?;
        if self.n == 0 {
            return Err(CliError::Config("strip.n must be at least 1".into()));
        }
        if self.samples == 0 {
            return Err(CliError::Config("strip.samples must be positive".into()));
        }
        match (self.c, self.alpha, self.x1, self.x2) {
            (Some(c), Some(alpha), None, None) if c.is_finite() && alpha.is_finite() => {
                Ok(StripInput::Params { c, alpha })
            }
            (None, None, Some(x1), Some(x2)) if x1.is_finite() && x2.is_finite() => {
                if x1 > x2 {
                    return Err(CliError::Config(format!(
                        "strip bounds must be ordered, got x1 = {x1} > x2 = {x2}"
                    )));
                }
                Ok(StripInput::Domain { x1, x2 })
            }
            _ => Err(CliError::Config(
                "strip needs either finite `c` and `alpha` or finite `x1` and `x2`".into(),
            )),
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self, seed: Option<u64>) -> Result<(), CliError> {
        positive("verify.lambda", self.lambda)?;
        if self.states == 0 {
            return Err(CliError::Config("verify.states must be positive".into()));
        }
        if seed.is_none() {
            return Err(CliError::Config(
                "verify draws random states and needs `seed` (config or --seed)".into(),
            ));
        }
        Ok(())
    }
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut cfg: RunConfig =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = "[annulus]\nr1 = 1.0\nr2 = 2.0\nn = 1.0\nlambda = 1.0\nradius = 3.0\n";
        assert!(toml::from_str::<RunConfig>(bad).is_err());
        let bad_top = "speed = 3\n";
        assert!(toml::from_str::<RunConfig>(bad_top).is_err());
        let bad_shape = "[meshgen]\nshape = \"disk\"\nradius = 1.0\nresolution = 8\nholes = 2\n";
        assert!(toml::from_str::<RunConfig>(bad_shape).is_err());
    }

    #[test]
    fn solve_section_parses() {
        let text = r#"
            seed = 3
            [solve]
            mesh = { shape = "rectangle", width = 2.0, height = 1.0, nx = 4, ny = 2 }
            lambda = 1.0
            steps = 4
            pins = [
              { select = { half_plane = { point = [0.0, 0.0], normal = [0.0, -1.0] } }, target = "identity" },
              { select = { indices = [3, 4] }, target = { rigid = { angle = 1.0 } } },
              { select = "boundary", target = { affine = { c = [1.0, 0.0] } } },
            ]
            perturb = { amplitude = 0.01 }
        "#;
        let cfg: RunConfig = toml::from_str(text).unwrap();
        let solve = cfg.solve.unwrap();
        assert_eq!(solve.pins.len(), 3);
        assert!(solve.validate(cfg.seed).is_ok());
        assert!(solve.validate(None).is_err());
        assert!(matches!(
            solve.mesh,
            MeshSource::Generate(MeshSpec::Rectangle { nx: 4, .. })
        ));
    }

    #[test]
    fn term_lists() {
        let list = vec![
            TermConfig {
                coeff: [1.0, 0.0],
                power: Some(2),
                center: None,
                rate: None,
            },
            TermConfig {
                coeff: [0.0, 1.0],
                power: None,
                center: None,
                rate: Some([1.0, 0.0]),
            },
        ];
        let e = terms(&list, "h").unwrap();
        let z = Complex::new(0.3, 0.2);
        assert!((e.eval(z).unwrap() - (z * z + Complex::new(0.0, 1.0) * z.exp())).norm() < 1e-15);
        let both = vec![TermConfig {
            coeff: [1.0, 0.0],
            power: Some(1),
            center: None,
            rate: Some([1.0, 0.0]),
        }];
        assert!(terms(&both, "h").is_err());
    }

    #[test]
    fn annulus_validation() {
        let mut a = AnnulusConfig {
            r1: 1.0,
            r2: 2.0,
            n: 1.5,
            lambda: 1.0,
            samples: 16,
        };
        assert!(a.validate().is_ok());
        a.n = 0.3;
        assert!(a.validate().is_err());
        a.n = 1.0;
        a.r1 = 3.0;
        assert!(a.validate().is_err());
        a.r1 = 2.0;
        assert!(a.validate().is_ok());
    }
}
