//! On-disk database of modular data: `order<N>/<group>/class_<vector>.json`
//! plus one `manifest.json` per group.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cohomology::{orbit_representatives, Cocycle3, CohomologyClasses, Orbit};
use crate::error::DbError;
use crate::group::{build_group, catalog, FiniteGroup};
use crate::modular::{class_label, verify_modular, ModularData, Strategy};

/// Orders processed without `allow_slow`.
pub const DEFAULT_MAX_ORDER: usize = 8;
/// Largest order with a group catalog.
pub const HARD_MAX_ORDER: usize = 12;
pub const MAX_ORDER_ENV: &str = "TQD_MAX_ORDER";
pub const MANIFEST: &str = "manifest.json";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// The order limit in force: the soft cap (overridable through
/// `TQD_MAX_ORDER`), or the hard cap with `allow_slow`.
pub fn order_limit(allow_slow: bool) -> usize {
    if allow_slow {
        return HARD_MAX_ORDER;
    }
    std::env::var(MAX_ORDER_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(DEFAULT_MAX_ORDER)
        .min(HARD_MAX_ORDER)
}

pub fn check_order(order: usize, allow_slow: bool) -> Result<(), DbError> {
    let limit = order_limit(allow_slow);
    if order > limit {
        let hint = if allow_slow || limit >= HARD_MAX_ORDER { "" } else { " (pass --allow-slow for orders up to 12)" };
        return Err(DbError::OrderBoundExceeded { order, limit, hint });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenerateOptions {
    pub strategy: Strategy,
    pub seed: u64,
    pub jobs: usize,
    pub allow_slow: bool,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        Self { strategy: Strategy::Auto, seed: 0, jobs: 1, allow_slow: false }
    }
}

/// Cohomology classes and orbit representatives of a group, within the
/// order limit.
pub fn group_orbits(group: &FiniteGroup, allow_slow: bool) -> Result<(CohomologyClasses, Vec<Orbit>), DbError> {
    check_order(group.order(), allow_slow)?;
    Ok(orbit_representatives(group, HARD_MAX_ORDER)?)
}

pub fn load_group(spec: &str, allow_slow: bool) -> Result<FiniteGroup, DbError> {
    let g = build_group(spec)?;
    check_order(g.order(), allow_slow)?;
    Ok(g)
}

/// Computes and verifies the data of one cocycle.
pub fn generate_one(omega: &Cocycle3, class_vector: Vec<u64>, strategy: Strategy, seed: u64) -> Result<ModularData, DbError> {
    let md = ModularData::compute(omega, class_vector, strategy, seed)?;
    let report = verify_modular(&md);
    match report.first_failure() {
        None => Ok(md),
        Some(c) => Err(DbError::Verification {
            path: md.id(),
            check: format!("{} at {}", c.name, c.witness.as_deref().unwrap_or("?")),
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub class_vector: Vec<u64>,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub group: String,
    pub order: usize,
    pub torsion: Vec<u64>,
    pub orbit_count: usize,
    pub files: Vec<String>,
    pub strategy: Strategy,
    pub seed: u64,
    pub tool_version: String,
    #[serde(default)]
    pub failures: Vec<Failure>,
}

/// Totals of a `generate_all` run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenerateSummary {
    pub groups: usize,
    pub files: usize,
    pub failures: usize,
}

pub struct Database {
    root: PathBuf,
}

impl Database {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn group_dir(&self, order: usize, group: &str) -> PathBuf {
        self.root.join(format!("order{order}")).join(group)
    }

    pub fn file_name(class_vector: &[u64]) -> String {
        format!("class_{}.json", class_label(class_vector))
    }

    pub fn write_dataset(&self, md: &ModularData) -> Result<PathBuf, DbError> {
        let path = self.group_dir(md.order, &md.group).join(Self::file_name(&md.class_vector));
        write_json_atomic(&path, md)?;
        Ok(path)
    }

    pub fn write_manifest(&self, m: &Manifest) -> Result<PathBuf, DbError> {
        let path = self.group_dir(m.order, &m.group).join(MANIFEST);
        write_json_atomic(&path, m)?;
        Ok(path)
    }

    /// Every manifest, sorted by order then group name.
    pub fn manifests(&self) -> Result<Vec<(PathBuf, Manifest)>, DbError> {
        let mut out = Vec::new();
        if !self.root.exists() {
            return Ok(out);
        }
        for order_dir in sorted_dirs(&self.root)? {
            for group_dir in sorted_dirs(&order_dir)? {
                let path = group_dir.join(MANIFEST);
                if path.exists() {
                    let m: Manifest = read_json(&path)?;
                    out.push((group_dir, m));
                }
            }
        }
        out.sort_by(|a, b| (a.1.order, &a.1.group).cmp(&(b.1.order, &b.1.group)));
        Ok(out)
    }

    /// Every dataset listed in a manifest, in manifest order.
    pub fn load_all(&self) -> Result<Vec<ModularData>, DbError> {
        let mut out = Vec::new();
        for (dir, m) in self.manifests()? {
            for f in &m.files {
                out.push(read_dataset(&dir.join(f))?);
            }
        }
        Ok(out)
    }

    /// Computes the whole catalog up to `max_order`.
    pub fn generate_all(&self, max_order: usize, opts: &GenerateOptions) -> Result<GenerateSummary, DbError> {
        check_order(max_order, opts.allow_slow)?;
        let mut groups = Vec::new();
        for n in 1..=max_order {
            for name in catalog(n).ok_or(DbError::NoCatalog(n))? {
                groups.push(Arc::new(build_group(name)?));
            }
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs.max(1))
            .build()
            .map_err(|e| DbError::Io { path: "thread pool".into(), source: std::io::Error::other(e) })?;
        let orbits: Vec<(CohomologyClasses, Vec<Orbit>)> =
            pool.install(|| groups.par_iter().map(|g| group_orbits(g, opts.allow_slow)).collect::<Result<_, _>>())?;
        let jobs: Vec<(usize, &Orbit)> =
            orbits.iter().enumerate().flat_map(|(gi, (_, os))| os.iter().map(move |o| (gi, o))).collect();
        let results: Vec<Result<PathBuf, String>> = pool.install(|| {
            jobs.par_iter()
                .map(|(_, o)| {
                    let md = generate_one(&o.cocycle, o.representative.clone(), opts.strategy, opts.seed).map_err(|e| e.to_string())?;
                    self.write_dataset(&md).map_err(|e| e.to_string())
                })
                .collect()
        });
        let mut summary = GenerateSummary { groups: groups.len(), ..Default::default() };
        for (gi, g) in groups.iter().enumerate() {
            let (classes, os) = &orbits[gi];
            let mut files = Vec::new();
            let mut failures = Vec::new();
            for ((_, o), r) in jobs.iter().zip(&results).filter(|((j, _), _)| *j == gi) {
                match r {
                    Ok(_) => files.push(Self::file_name(&o.representative)),
                    Err(e) => failures.push(Failure { class_vector: o.representative.clone(), error: e.clone() }),
                }
            }
            summary.files += files.len();
            summary.failures += failures.len();
            self.write_manifest(&Manifest {
                group: g.name().to_string(),
                order: g.order(),
                torsion: classes.torsion().to_vec(),
                orbit_count: os.len(),
                files,
                strategy: opts.strategy,
                seed: opts.seed,
                tool_version: TOOL_VERSION.to_string(),
                failures,
            })?;
        }
        if summary.failures > 0 {
            return Err(DbError::JobsFailed(summary.failures));
        }
        Ok(summary)
    }
}

fn sorted_dirs(dir: &Path) -> Result<Vec<PathBuf>, DbError> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    out.sort();
    Ok(out)
}

fn io_err(path: &Path, source: std::io::Error) -> DbError {
    DbError::Io { path: path.display().to_string(), source }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, DbError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| DbError::Parse { path: path.display().to_string(), message: e.to_string() })
}

pub fn read_dataset(path: &Path) -> Result<ModularData, DbError> {
    read_json(path)
}

/// Writes to a temporary sibling and renames it into place.
pub fn write_json_atomic<T: Serialize>(path: &Path, value: &T) -> Result<(), DbError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut text = serde_json::to_string(value).map_err(|e| DbError::Parse { path: path.display().to_string(), message: e.to_string() })?;
    text.push('\n');
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(dir, e))?;
    tmp.write_all(text.as_bytes()).map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(jobs: usize) -> GenerateOptions {
        GenerateOptions { jobs, ..Default::default() }
    }

    fn tree(root: &Path) -> Vec<(String, Vec<u8>)> {
        let mut out = Vec::new();
        let mut stack = vec![root.to_path_buf()];
        while let Some(d) = stack.pop() {
            for e in fs::read_dir(&d).unwrap() {
                let p = e.unwrap().path();
                if p.is_dir() {
                    stack.push(p);
                } else {
                    out.push((p.strip_prefix(root).unwrap().display().to_string(), fs::read(&p).unwrap()));
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn small_databases() {
        let dir = tempfile::tempdir().unwrap();
        let db = Database::new(dir.path());
        let s = db.generate_all(1, &opts(1)).unwrap();
        assert_eq!((s.groups, s.files), (1, 1));
        let s = db.generate_all(2, &opts(1)).unwrap();
        assert_eq!(s.files, 3);
        let d2: Vec<_> = db.load_all().unwrap().into_iter().filter(|d| d.order == 2).collect();
        assert_eq!(d2.len(), 2);
        let s = db.generate_all(4, &opts(2)).unwrap();
        let c4: usize = db.manifests().unwrap().iter().filter(|(_, m)| m.order == 4).map(|(_, m)| m.orbit_count).sum();
        assert_eq!(c4, 8);
        assert_eq!(s.files, 1 + 2 + 3 + 8);
        for (dir, m) in db.manifests().unwrap() {
            assert_eq!(m.orbit_count, m.files.len());
            for f in &m.files {
                let md = read_dataset(&dir.join(f)).unwrap();
                assert!(verify_modular(&md).all_passed());
                let text = fs::read_to_string(dir.join(f)).unwrap();
                assert_eq!(serde_json::to_string(&md).unwrap() + "\n", text);
            }
        }
    }

    #[test]
    fn job_count_does_not_change_output() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        Database::new(a.path()).generate_all(6, &opts(1)).unwrap();
        Database::new(b.path()).generate_all(6, &opts(8)).unwrap();
        assert_eq!(tree(a.path()), tree(b.path()));
    }

    #[test]
    fn order_caps() {
        assert!(check_order(8, false).is_ok());
        assert!(matches!(check_order(12, false), Err(DbError::OrderBoundExceeded { .. })));
        assert!(check_order(12, true).is_ok());
        assert!(matches!(check_order(13, true), Err(DbError::OrderBoundExceeded { limit: 12, .. })));
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            Database::new(dir.path()).generate_all(9, &opts(1)),
            Err(DbError::OrderBoundExceeded { .. })
        ));
        assert!(Database::new(dir.path().join("missing")).load_all().unwrap().is_empty());
    }
}
