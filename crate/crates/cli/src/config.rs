//! TOML protocol lists.
//!
//! ```toml
//! [defaults]            # optional; applies where an entry omits the key
//! p_phys = 1e-4
//! c_t = 1.0             # default 1
//! consumption = "half"  # "half" (default) or "full"
//!
//! [[protocol]]
//! family = "l2_15x20"
//! d = [9, 3, 3]         # level-1 dX, dZ, dm
//! d2 = [15, 7, 9]       # level-2 distances, two-level families only
//! n_l1 = 4              # level-1 blocks, not used by l2_15x15_small
//! p_phys = 1e-4
//! ```

use std::ops::Range;
use std::path::Path;

use msd_core::factory::{ConsumptionPrefactor, DistanceSet, FactoryConfig, Family};
use msd_core::noise::{Distances, PhysicalNoise};
use serde::Deserialize;
use toml::Spanned;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Defaults {
    p_phys: Option<f64>,
    c_t: Option<f64>,
    consumption: Option<ConsumptionPrefactor>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    family: Family,
    d: Spanned<[u32; 3]>,
    d2: Option<Spanned<[u32; 3]>>,
    n_l1: Option<Spanned<u32>>,
    p_phys: Option<Spanned<f64>>,
    c_t: Option<Spanned<f64>>,
    consumption: Option<ConsumptionPrefactor>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    defaults: Defaults,
    #[serde(default)]
    protocol: Vec<Spanned<Entry>>,
}

fn line_of(text: &str, span: Range<usize>) -> usize {
    text[..span.start.min(text.len())].matches('\n').count() + 1
}

pub fn load_config(path: &Path) -> Result<Vec<FactoryConfig>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text, &path.display().to_string())
}

/// Parses a config document; `origin` names it in diagnostics.
pub fn parse_config(text: &str, origin: &str) -> Result<Vec<FactoryConfig>, CliError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s)).unwrap_or(0);
        CliError::Config {
            origin: origin.to_string(),
            line,
            field: String::new(),
            message: e.message().to_string(),
        }
    })?;
    let fail = |span: Range<usize>, field: String, message: String| CliError::Config {
        origin: origin.to_string(),
        line: line_of(text, span),
        field,
        message,
    };
    let mut out = Vec::with_capacity(file.protocol.len());
    for (i, entry) in file.protocol.iter().enumerate() {
        let span = entry.span();
        let e = entry.get_ref();
        let field = |name: &str| format!("protocol[{i}].{name}");
        let distances = |s: &Spanned<[u32; 3]>, name: &str| {
            let [x, z, m] = *s.get_ref();
            Distances::new(x, z, m).map_err(|err| fail(s.span(), field(name), err.to_string()))
        };
        let d1 = distances(&e.d, "d")?;
        let set = match &e.d2 {
            Some(d2) => DistanceSet::two_level(d1, distances(d2, "d2")?, e.n_l1.as_ref().map(|n| *n.get_ref())),
            None => DistanceSet {
                n_l1: e.n_l1.as_ref().map(|n| *n.get_ref()),
                ..DistanceSet::level1(d1)
            },
        };
        let p_phys = match (&e.p_phys, file.defaults.p_phys) {
            (Some(p), _) => *p.get_ref(),
            (None, Some(p)) => p,
            (None, None) => return Err(fail(span, field("p_phys"), "missing and no default given".into())),
        };
        let c_t = e
            .c_t
            .as_ref()
            .map(|c| *c.get_ref())
            .or(file.defaults.c_t)
            .unwrap_or(1.0);
        let noise = PhysicalNoise::new(p_phys, c_t).map_err(|err| {
            let at = e.p_phys.as_ref().map(|p| p.span()).unwrap_or(span.clone());
            fail(at, field("p_phys/c_t"), err.to_string())
        })?;
        let config = FactoryConfig {
            family: e.family,
            distances: set,
            noise,
            consumption: e.consumption.or(file.defaults.consumption).unwrap_or_default(),
        };
        config.validate().map_err(|err| {
            let at = e.n_l1.as_ref().map(|n| n.span()).unwrap_or(span.clone());
            fail(at, field("family"), err.to_string())
        })?;
        out.push(config);
    }
    Ok(out)
}
