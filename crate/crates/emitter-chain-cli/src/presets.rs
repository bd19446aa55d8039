//! Shipped configs covering every experiment.

pub struct Preset {
    pub name: &'static str,
    pub source: &'static str,
}

impl Preset {
    /// The first comment line of the file.
    pub fn description(&self) -> &'static str {
        self.source
            .lines()
            .find_map(|l| l.strip_prefix('#'))
            .map(str::trim)
            .unwrap_or("")
    }
}

macro_rules! presets {
    ($($name:literal),* $(,)?) => {
        &[$(Preset { name: $name, source: include_str!(concat!("../presets/", $name, ".toml")) }),*]
    };
}

pub const PRESETS: &[Preset] = presets![
    "dispersion-half-pi",
    "dispersion-pi",
    "ep-scan-n100",
    "edge-ep-scaling",
    "subradiance-uniform",
    "subradiance-alternating",
    "edge-state-localized",
    "edge-state-extended",
    "deformation-sweep",
    "walk-alternating",
    "walk-uniform",
    "winding-short-range",
    "winding-long-range",
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
