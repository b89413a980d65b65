//! Data catalog: series ids mapped to files, plus labour-force scenarios.
//!
//! ```toml
//! version = 1
//!
//! [[series]]
//! id = "cpi"
//! file = "cpi.csv"          # relative to the catalog file
//! frequency = "annual"
//! units = "rate per year"
//! source = "..."
//! vintage = "..."
//!
//! [[scenario]]
//! name = "middle fertility"
//! file = "scenarios/middle_fertility.csv"
//! source = "..."
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use laborcast_core::forecast::ForecastScenario;
use laborcast_core::{Frequency, Series};
use serde::Deserialize;

use crate::csvio::read_series;
use crate::error::{AppError, Result};

pub const CATALOG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesEntry {
    pub id: String,
    pub file: PathBuf,
    pub frequency: Frequency,
    #[serde(default)]
    pub units: String,
    #[serde(default)]
    pub source: String,
    #[serde(default)]
    pub vintage: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEntry {
    pub name: String,
    pub file: PathBuf,
    #[serde(default)]
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    version: u32,
    #[serde(default)]
    series: Vec<SeriesEntry>,
    #[serde(default)]
    scenario: Vec<ScenarioEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    pub dir: PathBuf,
    pub series: Vec<SeriesEntry>,
    pub scenarios: Vec<ScenarioEntry>,
    /// Per-id replacement files from the command line.
    pub overrides: BTreeMap<String, PathBuf>,
}

impl Catalog {
    pub fn parse(text: &str, dir: &Path) -> Result<Catalog> {
        let file: CatalogFile = toml::from_str(text).map_err(|e| AppError::config(format!("catalog: {e}")))?;
        if file.version != CATALOG_VERSION {
            return Err(AppError::config(format!(
                "catalog: unsupported version {} (expected {CATALOG_VERSION})",
                file.version
            )));
        }
        let mut ids = BTreeSet::new();
        for s in &file.series {
            if !ids.insert(s.id.as_str()) {
                return Err(AppError::config(format!("catalog: duplicate series id `{}`", s.id)));
            }
        }
        let mut names = BTreeSet::new();
        for s in &file.scenario {
            if !names.insert(s.name.as_str()) {
                return Err(AppError::config(format!("catalog: duplicate scenario `{}`", s.name)));
            }
        }
        Ok(Catalog { dir: dir.to_path_buf(), series: file.series, scenarios: file.scenario, overrides: BTreeMap::new() })
    }

    pub fn load(path: &Path) -> Result<Catalog> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Catalog::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn entry(&self, id: &str) -> Result<&SeriesEntry> {
        self.series
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| AppError::config(format!("series `{id}` is not in the catalog")))
    }

    pub fn set_override(&mut self, id: &str, file: PathBuf) -> Result<()> {
        self.entry(id)?;
        self.overrides.insert(id.to_string(), file);
        Ok(())
    }

    /// Path actually read for `id`.
    pub fn series_path(&self, id: &str) -> Result<PathBuf> {
        let entry = self.entry(id)?;
        Ok(match self.overrides.get(id) {
            Some(p) => p.clone(),
            None => self.dir.join(&entry.file),
        })
    }

    pub fn load_series(&self, id: &str) -> Result<Series> {
        let entry = self.entry(id)?;
        let s = read_series(&self.series_path(id)?, id)?;
        if s.frequency() != entry.frequency {
            return Err(AppError::data(format!(
                "series `{id}` is declared {:?} but the file holds {:?} periods",
                entry.frequency,
                s.frequency()
            )));
        }
        Ok(s.with_units(entry.units.clone()))
    }

    pub fn load_scenarios(&self) -> Result<Vec<ForecastScenario>> {
        self.scenarios
            .iter()
            .map(|e| {
                let s = read_series(&self.dir.join(&e.file), "lf")?;
                ForecastScenario::new(e.name.clone(), s).map_err(|err| AppError::from(err).context(&e.name))
            })
            .collect()
    }

    /// Every file the catalog resolves to, in a fixed order.
    pub fn files(&self) -> Result<Vec<PathBuf>> {
        let mut out = Vec::new();
        for s in &self.series {
            out.push(self.series_path(&s.id)?);
        }
        out.extend(self.scenarios.iter().map(|s| self.dir.join(&s.file)));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_versions() {
        let dup = "version = 1\n[[series]]\nid='a'\nfile='a.csv'\nfrequency='annual'\n[[series]]\nid='a'\nfile='b.csv'\nfrequency='annual'\n";
        assert!(Catalog::parse(dup, Path::new(".")).unwrap_err().message.contains("duplicate"));
        let v2 = "version = 2\n";
        assert_eq!(Catalog::parse(v2, Path::new(".")).unwrap_err().kind.exit_code(), 2);
        let unknown = "version = 1\n[[series]]\nid='a'\nfile='a.csv'\nfrequency='annual'\ncolour='red'\n";
        assert!(Catalog::parse(unknown, Path::new(".")).is_err());
    }

    #[test]
    fn override_must_name_a_known_series() {
        let mut c = Catalog::parse("version = 1\n[[series]]\nid='a'\nfile='a.csv'\nfrequency='annual'\n", Path::new("/d")).unwrap();
        assert!(c.set_override("b", "x.csv".into()).is_err());
        c.set_override("a", "x.csv".into()).unwrap();
        assert_eq!(c.series_path("a").unwrap(), PathBuf::from("x.csv"));
    }
}
