//! Run configuration: a TOML document with defaults for every field.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use vortex_core::homotopy::HomotopyOptions;
use vortex_core::profile::{ProfileParams, ShapeKnobs};
use vortex_core::shooting::{BranchOptions, RootOptions, ScanOptions, ShootingOptions};
use vortex_core::sturm::SturmOptions;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum Command {
    ProfileBuild,
    BottomSpectrum,
    TraceBranch,
    Theorem11,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ProfileBuild => "profile-build",
            Command::BottomSpectrum => "bottom-spectrum",
            Command::TraceBranch => "trace-branch",
            Command::Theorem11 => "theorem11",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub profile: ProfileBlock,
    /// Saved profile document; replaces the `profile` block where a profile is read.
    pub profile_file: Option<PathBuf>,
    pub numerics: Numerics,
    pub spectrum: SpectrumBlock,
    pub branch: BranchBlock,
    pub theorem: TheoremBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: None,
            out: None,
            seed: 7,
            profile: ProfileBlock::default(),
            profile_file: None,
            numerics: Numerics::default(),
            spectrum: SpectrumBlock::default(),
            branch: BranchBlock::default(),
            theorem: TheoremBlock::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileBlock {
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub c0: f64,
    pub log_m1: f64,
    pub log_m: f64,
    pub well_strength: f64,
    pub knobs: ShapeKnobs,
}

impl Default for ProfileBlock {
    fn default() -> Self {
        let p = ProfileParams::baseline(1.0);
        Self {
            alpha: p.alpha,
            a: p.a,
            b: p.b,
            c0: p.c0,
            log_m1: p.log_m1,
            log_m: p.log_m,
            well_strength: p.well_strength,
            knobs: p.knobs,
        }
    }
}

impl ProfileBlock {
    pub fn params(&self) -> ProfileParams {
        ProfileParams {
            alpha: self.alpha,
            a: self.a,
            b: self.b,
            c0: self.c0,
            log_m1: self.log_m1,
            log_m: self.log_m,
            well_strength: self.well_strength,
            knobs: self.knobs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    /// Spacing of sampled eigenfunctions and of the profile table.
    pub grid_dt: f64,
    /// Fixed shooting half-window; chosen from the tail bound when absent.
    pub window: Option<f64>,
    pub root_tol: f64,
    /// Relative tolerance of the ODE integrator.
    pub rtol: f64,
    /// Lower edge of the exclusion contours; `1e-3 Omega(-inf)` when absent.
    pub delta_min: Option<f64>,
    /// Largest cell of the Sturm meshes.
    pub h_max: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        let s = ShootingOptions::default();
        Self {
            grid_dt: s.sample_dt,
            window: None,
            root_tol: s.root_tol,
            rtol: s.rtol,
            delta_min: None,
            h_max: SturmOptions::default().h_max,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumBlock {
    /// With a value, tabulate blends between the profile and its copy at this strength.
    pub blend_well_strength: Option<f64>,
    pub theta_samples: usize,
    /// Reported as met when `m_a >= target`.
    pub target: Option<f64>,
}

impl Default for SpectrumBlock {
    fn default() -> Self {
        Self {
            blend_well_strength: None,
            theta_samples: 11,
            target: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BranchBlock {
    pub n_steps: usize,
    pub m_min: Option<f64>,
    pub m_max: Option<f64>,
}

impl Default for BranchBlock {
    fn default() -> Self {
        Self {
            n_steps: BranchOptions::default().n_steps,
            m_min: None,
            m_max: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TheoremBlock {
    /// Azimuthal wavenumber; the smallest admissible one when absent.
    pub m: Option<usize>,
    pub theta_samples: usize,
    pub margin: f64,
    pub headroom: f64,
    pub max_well_strength: f64,
    pub multistart: usize,
}

impl Default for TheoremBlock {
    fn default() -> Self {
        let h = HomotopyOptions::default();
        Self {
            m: None,
            theta_samples: h.theta_samples,
            margin: h.margin,
            headroom: h.headroom,
            max_well_strength: h.max_well_strength,
            multistart: h.multistart,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        let alpha = self.profile.alpha;
        if !(alpha > 0.0 && alpha < 2.0) {
            return bad(format!("profile.alpha = {alpha} must lie in the open interval (0, 2)"));
        }
        let n = &self.numerics;
        for (name, v) in [
            ("numerics.grid_dt", Some(n.grid_dt)),
            ("numerics.root_tol", Some(n.root_tol)),
            ("numerics.rtol", Some(n.rtol)),
            ("numerics.h_max", Some(n.h_max)),
            ("numerics.window", n.window),
            ("numerics.delta_min", n.delta_min),
            ("theorem.headroom", Some(self.theorem.headroom)),
            ("theorem.max_well_strength", Some(self.theorem.max_well_strength)),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{name} = {v} must be positive"));
                }
            }
        }
        let t = &self.theorem;
        if !(t.margin > 0.0 && t.margin < 0.5) {
            return bad(format!("theorem.margin = {} must lie in (0, 0.5)", t.margin));
        }
        if t.theta_samples < 2 {
            return bad("theorem.theta_samples must be at least 2".into());
        }
        if t.multistart < 1 {
            return bad("theorem.multistart must be at least 1".into());
        }
        if let Some(m) = t.m {
            if m < 2 {
                return bad(format!("theorem.m = {m} must be at least 2"));
            }
        }
        if self.spectrum.theta_samples < 2 {
            return bad("spectrum.theta_samples must be at least 2".into());
        }
        if let Some(b) = self.spectrum.blend_well_strength {
            if !(b >= 0.0) {
                return bad(format!("spectrum.blend_well_strength = {b} must be non-negative"));
            }
        }
        if self.branch.n_steps < 1 {
            return bad("branch.n_steps must be at least 1".into());
        }
        if let (Some(lo), Some(hi)) = (self.branch.m_min, self.branch.m_max) {
            if !(lo < hi) {
                return bad(format!("branch.m_min = {lo} must be below branch.m_max = {hi}"));
            }
        }
        self.profile.params().validate().map_err(CliError::Core)
    }

    pub fn shooting(&self) -> ShootingOptions {
        let n = &self.numerics;
        ShootingOptions {
            rtol: n.rtol,
            root_tol: n.root_tol,
            sample_dt: n.grid_dt,
            t_minus: n.window,
            t_plus: n.window,
            ..ShootingOptions::default()
        }
    }

    pub fn sturm(&self) -> SturmOptions {
        SturmOptions {
            h_max: self.numerics.h_max,
            ..SturmOptions::default()
        }
    }

    pub fn root(&self) -> RootOptions {
        RootOptions {
            shooting: self.shooting(),
            ..RootOptions::default()
        }
    }

    pub fn branch_options(&self) -> BranchOptions {
        BranchOptions {
            n_steps: self.branch.n_steps,
            root: self.root(),
            ..BranchOptions::default()
        }
    }

    pub fn homotopy(&self) -> HomotopyOptions {
        let t = &self.theorem;
        HomotopyOptions {
            theta_samples: t.theta_samples,
            margin: t.margin,
            headroom: t.headroom,
            max_well_strength: t.max_well_strength,
            delta_min: self.numerics.delta_min,
            multistart: t.multistart,
            seed: self.seed,
            sturm: self.sturm(),
            branch: self.branch_options(),
            scan: ScanOptions {
                shooting: self.shooting(),
                ..ScanOptions::default()
            },
            ..HomotopyOptions::default()
        }
    }
}
