//! Job configuration: a flat, sectioned key-value file format.
//!
//! The format is deliberately small — sections in brackets, one
//! `key = value` per line, `#` comments — so that a config file is
//! byte-for-byte reproducible and every mistake can be reported with its
//! line number. Values are scalars, bare words, or whitespace-separated
//! lists; nothing is quoted or escaped.
//!
//! ```text
//! # harmonic ground state, semiclassical parameters
//! [potential]
//! kind = harmonic
//! k    = 1.0
//! mass = 1.0
//! hbar = 1.0
//!
//! [state]
//! n = 0
//!
//! [decomposition]
//! flux   = semiclassical     # or an explicit positive number
//! anchor = median            # or an explicit position
//! grid_points = 801
//! truncation_tail = 1e-10
//!
//! [trajectory]
//! starts   = -0.5 0.0 0.5
//! duration = 10.0
//! step     = 1e-3
//!
//! [scan]
//! flux_values   = 0.1591549 0.141 0.199
//! anchor_values = 0.0
//!
//! [output]
//! dir = out/ho_ground
//! ```
//!
//! Exactly one state selector must appear: `n` for a level index, or
//! `energy_window = lo hi` to bracket a single eigenvalue (its index is
//! recovered by Sturm node counting). Shot states — any Morse state,
//! and any energy-window selection — also need `domain = lo hi` in
//! `[state]` for the integration box.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::bipolar::{decompose_with, BipolarDecomposition, DecomposeOptions};
use crate::eigenstates::{
    harmonic_state, level_in_window, solve_bound_state, Eigenstate, ShootingSpec,
};
use crate::error::{Error, Result};
use crate::potentials::{morse_bound_count, morse_bound_energy, Potential};

/// Potential model selected by a config file.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialConfig {
    /// V = k x²/2.
    Harmonic { k: f64 },
    /// V = D(1 − e^{−α(x−x_e)})².
    Morse { depth: f64, alpha: f64, x_e: f64 },
}

/// How the config picks its stationary state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSelector {
    /// Level index (node count).
    Level(usize),
    /// An energy window bracketing exactly one eigenvalue.
    EnergyWindow(f64, f64),
}

/// How the config fixes the one-way flux F.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FluxMode {
    /// F = 1/T from the classical orbit (the semiclassical microstate).
    Semiclassical,
    /// An explicit positive value.
    Explicit(f64),
}

/// How the config fixes the phase anchor x₀.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorMode {
    /// The median-action point (snapped to a node for odd states).
    Median,
    /// An explicit position.
    Explicit(f64),
}

/// `[trajectory]` block: launch positions and integration horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryConfig {
    /// Launch positions on the positive sheet.
    pub starts: Vec<f64>,
    /// Propagation time.
    pub duration: f64,
    /// Base integrator step.
    pub step: f64,
}

/// `[scan]` block: microstate parameter lists.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    /// Flux values to scan (empty means: the config's flux mode).
    pub flux_values: Vec<f64>,
    /// Anchor values to scan (empty means: the config's anchor mode).
    pub anchor_values: Vec<f64>,
}

/// A fully parsed and validated job configuration.
#[derive(Debug, Clone)]
pub struct JobConfig {
    /// Potential model.
    pub potential: PotentialConfig,
    /// Particle mass m.
    pub mass: f64,
    /// Reduced Planck constant ħ.
    pub hbar: f64,
    /// State selector (exactly one form).
    pub state: StateSelector,
    /// Shooting box for numerically solved states.
    pub domain: Option<(f64, f64)>,
    /// Flux mode.
    pub flux: FluxMode,
    /// Anchor mode.
    pub anchor: AnchorMode,
    /// Output grid resolution for curve tables.
    pub grid_points: usize,
    /// Truncation tail threshold passed to the decomposition.
    pub truncation_tail: f64,
    /// Optional `[trajectory]` block.
    pub trajectory: Option<TrajectoryConfig>,
    /// Optional `[scan]` block.
    pub scan: Option<ScanConfig>,
    /// Optional output directory from `[output] dir`.
    pub out_dir: Option<PathBuf>,
}

impl JobConfig {
    /// Parses a config from text, reporting the first problem with its
    /// line number.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::scan(text)?;

        // --- [potential] -------------------------------------------------
        let potential = match raw.require_word("potential", "kind")?.as_str() {
            "harmonic" => PotentialConfig::Harmonic {
                k: raw.require_f64("potential", "k")?,
            },
            "morse" => PotentialConfig::Morse {
                depth: raw.require_f64("potential", "depth")?,
                alpha: raw.require_f64("potential", "alpha")?,
                x_e: raw.take_f64("potential", "x_e")?.unwrap_or(0.0),
            },
            other => {
                return Err(Error::Invalid(format!(
                    "[potential] kind must be 'harmonic' or 'morse', got '{other}'"
                )))
            }
        };
        let mass = raw.take_f64("potential", "mass")?.unwrap_or(1.0);
        let hbar = raw.take_f64("potential", "hbar")?.unwrap_or(1.0);

        // --- [state] -----------------------------------------------------
        let level = raw.take_usize("state", "n")?;
        let window = raw.take_pair("state", "energy_window")?;
        let state = match (level, window) {
            (Some(n), None) => StateSelector::Level(n),
            (None, Some((lo, hi))) => StateSelector::EnergyWindow(lo, hi),
            (Some(_), Some(_)) => {
                return Err(Error::Invalid(
                    "[state] must set exactly one of 'n' and 'energy_window', not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Invalid(
                    "[state] must set exactly one of 'n' and 'energy_window'".into(),
                ))
            }
        };
        let domain = raw.take_pair("state", "domain")?;

        // --- [decomposition] ----------------------------------------------
        let flux = match raw.take_value("decomposition", "flux")? {
            None => FluxMode::Semiclassical,
            Some((v, line)) if v == "semiclassical" => {
                let _ = line;
                FluxMode::Semiclassical
            }
            Some((v, line)) => FluxMode::Explicit(parse_f64(&v, line, "flux")?),
        };
        if let FluxMode::Explicit(f) = flux {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::Invalid(format!(
                    "[decomposition] flux must be positive, got {f}"
                )));
            }
        }
        let anchor = match raw.take_value("decomposition", "anchor")? {
            None => AnchorMode::Median,
            Some((v, _)) if v == "median" => AnchorMode::Median,
            Some((v, line)) => AnchorMode::Explicit(parse_f64(&v, line, "anchor")?),
        };
        let grid_points = raw.take_usize("decomposition", "grid_points")?.unwrap_or(801);
        if grid_points < 2 {
            return Err(Error::Invalid(format!(
                "[decomposition] grid_points must be at least 2, got {grid_points}"
            )));
        }
        let truncation_tail =
            raw.take_f64("decomposition", "truncation_tail")?.unwrap_or(1e-10);

        // --- [trajectory] ---------------------------------------------------
        let trajectory = if raw.has_section("trajectory") {
            Some(TrajectoryConfig {
                starts: raw.require_list("trajectory", "starts")?,
                duration: raw.require_f64("trajectory", "duration")?,
                step: raw.take_f64("trajectory", "step")?.unwrap_or(1e-3),
            })
        } else {
            None
        };

        // --- [scan] ---------------------------------------------------------
        let scan = if raw.has_section("scan") {
            let flux_values = raw.take_list("scan", "flux_values")?.unwrap_or_default();
            let anchor_values = raw.take_list("scan", "anchor_values")?.unwrap_or_default();
            Some(ScanConfig { flux_values, anchor_values })
        } else {
            None
        };

        // --- [output] ---------------------------------------------------------
        let out_dir = raw.take_value("output", "dir")?.map(|(v, _)| PathBuf::from(v));

        raw.finish()?;

        Ok(JobConfig {
            potential,
            mass,
            hbar,
            state,
            domain,
            flux,
            anchor,
            grid_points,
            truncation_tail,
            trajectory,
            scan,
            out_dir,
        })
    }

    /// Reads and parses a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Builds the potential model.
    pub fn build_potential(&self) -> Result<Potential> {
        match self.potential {
            PotentialConfig::Harmonic { k } => Potential::harmonic(k),
            PotentialConfig::Morse { depth, alpha, x_e } => Potential::morse(depth, alpha, x_e),
        }
    }

    /// Solves for the configured stationary state.
    ///
    /// Harmonic states selected by level use the closed Hermite form;
    /// everything else goes through the shooting solver, which needs the
    /// `[state] domain` box.
    pub fn build_state(&self) -> Result<Eigenstate> {
        let potential = self.build_potential()?;
        match (&self.potential, self.state) {
            (PotentialConfig::Harmonic { k }, StateSelector::Level(n)) => {
                harmonic_state(n, *k, self.mass, self.hbar)
            }
            (_, selector) => {
                let domain = self.domain.ok_or_else(|| {
                    Error::Invalid(
                        "[state] domain = lo hi is required for numerically solved states".into(),
                    )
                })?;
                let (n, energy_window) = match selector {
                    StateSelector::EnergyWindow(lo, hi) => {
                        let spec = ShootingSpec {
                            domain,
                            energy_window: (lo, hi),
                            ..ShootingSpec::default()
                        };
                        let n = level_in_window(&potential, self.mass, self.hbar, &spec)?;
                        (n, (lo, hi))
                    }
                    StateSelector::Level(n) => (n, self.level_window(n)?),
                };
                solve_bound_state(
                    &potential,
                    self.mass,
                    self.hbar,
                    n,
                    &ShootingSpec { domain, energy_window, ..ShootingSpec::default() },
                )
            }
        }
    }

    /// Decomposition options implied by the flux/anchor modes.
    pub fn decompose_options(&self) -> DecomposeOptions {
        DecomposeOptions {
            flux: match self.flux {
                FluxMode::Semiclassical => None,
                FluxMode::Explicit(f) => Some(f),
            },
            anchor: match self.anchor {
                AnchorMode::Median => None,
                AnchorMode::Explicit(x) => Some(x),
            },
            truncation_tail: self.truncation_tail,
        }
    }

    /// Solves the state and decomposes it in one step.
    pub fn build_decomposition(&self) -> Result<(Eigenstate, BipolarDecomposition)> {
        let state = self.build_state()?;
        let decomp = decompose_with(&state, &self.decompose_options())?;
        Ok((state, decomp))
    }

    /// An energy window bracketing level `n` of the configured potential.
    fn level_window(&self, n: usize) -> Result<(f64, f64)> {
        match self.potential {
            PotentialConfig::Harmonic { k } => {
                let omega = (k / self.mass).sqrt();
                let e = self.hbar * omega * (n as f64 + 0.5);
                Ok((e - 0.45 * self.hbar * omega, e + 0.45 * self.hbar * omega))
            }
            PotentialConfig::Morse { depth, alpha, .. } => {
                let count = morse_bound_count(depth, alpha, self.mass, self.hbar);
                if n >= count {
                    return Err(Error::Invalid(format!(
                        "Morse well holds {count} bound states; n = {n} does not exist"
                    )));
                }
                let e = morse_bound_energy(n, depth, alpha, self.mass, self.hbar);
                // Midpoints to the neighbors bracket the level cleanly.
                let below = if n == 0 {
                    0.0
                } else {
                    morse_bound_energy(n - 1, depth, alpha, self.mass, self.hbar)
                };
                let above = if n + 1 < count {
                    morse_bound_energy(n + 1, depth, alpha, self.mass, self.hbar)
                } else {
                    depth
                };
                Ok((0.5 * (below + e), 0.5 * (e + above)))
            }
        }
    }
}

/// Raw scanned config: every `key = value` with its section and line,
/// consumed by the typed getters so leftovers can be reported as unknown
/// keys.
struct RawConfig {
    entries: BTreeMap<(String, String), (String, usize)>,
    sections: Vec<String>,
}

const KNOWN_SECTIONS: [&str; 6] =
    ["potential", "state", "decomposition", "trajectory", "scan", "output"];

impl RawConfig {
    fn scan(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut sections: Vec<String> = Vec::new();
        let mut current: Option<String> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| {
                    Error::Invalid(format!("config line {line_no}: unterminated section header"))
                })?;
                if !KNOWN_SECTIONS.contains(&name) {
                    return Err(Error::Invalid(format!(
                        "config line {line_no}: unknown section [{name}]"
                    )));
                }
                if sections.iter().any(|s| s == name) {
                    return Err(Error::Invalid(format!(
                        "config line {line_no}: duplicate section [{name}]"
                    )));
                }
                sections.push(name.to_string());
                current = Some(name.to_string());
                continue;
            }
            let section = current.clone().ok_or_else(|| {
                Error::Invalid(format!(
                    "config line {line_no}: key outside any [section]"
                ))
            })?;
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Invalid(format!("config line {line_no}: expected key = value"))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(Error::Invalid(format!(
                    "config line {line_no}: empty key or value"
                )));
            }
            if entries.insert((section.clone(), key.clone()), (value, line_no)).is_some() {
                return Err(Error::Invalid(format!(
                    "config line {line_no}: duplicate key '{key}' in [{section}]"
                )));
            }
        }
        Ok(RawConfig { entries, sections })
    }

    fn has_section(&self, section: &str) -> bool {
        self.sections.iter().any(|s| s == section)
    }

    fn take_value(&mut self, section: &str, key: &str) -> Result<Option<(String, usize)>> {
        Ok(self.entries.remove(&(section.to_string(), key.to_string())))
    }

    fn require_word(&mut self, section: &str, key: &str) -> Result<String> {
        self.take_value(section, key)?
            .map(|(v, _)| v)
            .ok_or_else(|| Error::Invalid(format!("missing required key '{key}' in [{section}]")))
    }

    fn take_f64(&mut self, section: &str, key: &str) -> Result<Option<f64>> {
        self.take_value(section, key)?
            .map(|(v, line)| parse_f64(&v, line, key))
            .transpose()
    }

    fn require_f64(&mut self, section: &str, key: &str) -> Result<f64> {
        self.take_f64(section, key)?
            .ok_or_else(|| Error::Invalid(format!("missing required key '{key}' in [{section}]")))
    }

    fn take_usize(&mut self, section: &str, key: &str) -> Result<Option<usize>> {
        match self.take_value(section, key)? {
            None => Ok(None),
            Some((v, line)) => v.parse::<usize>().map(Some).map_err(|_| {
                Error::Invalid(format!(
                    "config line {line}: cannot parse '{v}' as a non-negative integer for '{key}'"
                ))
            }),
        }
    }

    fn take_pair(&mut self, section: &str, key: &str) -> Result<Option<(f64, f64)>> {
        match self.take_list(section, key)? {
            None => Ok(None),
            Some(list) if list.len() == 2 => Ok(Some((list[0], list[1]))),
            Some(list) => Err(Error::Invalid(format!(
                "key '{key}' in [{section}] needs exactly two numbers, got {}",
                list.len()
            ))),
        }
    }

    fn take_list(&mut self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        match self.take_value(section, key)? {
            None => Ok(None),
            Some((v, line)) => v
                .split_whitespace()
                .map(|tok| parse_f64(tok, line, key))
                .collect::<Result<Vec<f64>>>()
                .map(Some),
        }
    }

    fn require_list(&mut self, section: &str, key: &str) -> Result<Vec<f64>> {
        self.take_list(section, key)?
            .ok_or_else(|| Error::Invalid(format!("missing required key '{key}' in [{section}]")))
    }

    /// Rejects anything the typed extraction did not consume.
    fn finish(self) -> Result<()> {
        if let Some(((section, key), (_, line))) = self.entries.into_iter().next() {
            return Err(Error::Invalid(format!(
                "config line {line}: unknown key '{key}' in [{section}]"
            )));
        }
        Ok(())
    }
}

fn parse_f64(token: &str, line: usize, key: &str) -> Result<f64> {
    let v: f64 = token.parse().map_err(|_| {
        Error::Invalid(format!(
            "config line {line}: cannot parse '{token}' as a number for '{key}'"
        ))
    })?;
    if !v.is_finite() {
        return Err(Error::Invalid(format!(
            "config line {line}: '{key}' must be finite, got {token}"
        )));
    }
    Ok(v)
}
