use serde::Serialize;
use stagplan::spso::PsoConfig;

/// Everything needed to reproduce the result files of one command. The
/// scenario is embedded verbatim so the manifest stands on its own.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub scenario: String,
    pub seeds: Vec<u64>,
    pub started_at: String,
    pub finished_at: String,
    /// Worker cap requested with --threads; absent means the default pool.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub parallel_build: bool,
    pub files: Vec<String>,
    pub config: ConfigSnapshot,
    pub scenario_text: String,
}

#[derive(Debug, Serialize)]
pub struct ConfigSnapshot {
    pub c0: f64,
    pub inertia_decay: f64,
    pub c1: f64,
    pub c2: f64,
    pub n_pop: usize,
    pub max_it: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    pub velocity_limit: f64,
    pub elevation_limit: f64,
    pub azimuth_half_width: f64,
    pub shared_draws: bool,
}

impl From<&PsoConfig> for ConfigSnapshot {
    fn from(c: &PsoConfig) -> Self {
        ConfigSnapshot {
            c0: c.c0,
            inertia_decay: c.inertia_decay,
            c1: c.c1,
            c2: c.c2,
            n_pop: c.n_pop,
            max_it: c.max_it,
            r_max: c.r_max,
            velocity_limit: c.velocity_limit,
            elevation_limit: c.elevation_limit,
            azimuth_half_width: c.azimuth_half_width,
            shared_draws: c.shared_draws,
        }
    }
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}
