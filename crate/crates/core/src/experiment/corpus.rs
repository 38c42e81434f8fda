use std::path::Path;

use crate::error::{Error, Result};

/// A domain with its problem files, as text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainSource {
    pub name: String,
    pub domain: String,
    pub problems: Vec<(String, String)>,
}

macro_rules! bundled_domain {
    ($name:literal, [$($p:literal),*]) => {
        (
            $name,
            include_str!(concat!("../../corpus/", $name, "/domain.pddl")),
            &[$(($p, include_str!(concat!("../../corpus/", $name, "/", $p, ".pddl")))),*],
        )
    };
}

type Bundled = (&'static str, &'static str, &'static [(&'static str, &'static str)]);

const BUNDLED: [Bundled; 4] = [
    bundled_domain!("blocksworld", ["p01", "p02", "p03"]),
    bundled_domain!("gripper", ["p01", "p02", "p03"]),
    bundled_domain!("miconic", ["p01", "p02"]),
    bundled_domain!("satellite", ["p01", "p02"]),
];

pub fn bundled_names() -> Vec<&'static str> {
    BUNDLED.iter().map(|b| b.0).collect()
}

pub fn bundled(name: &str) -> Result<DomainSource> {
    let (n, domain, problems) = BUNDLED
        .iter()
        .find(|b| b.0 == name)
        .ok_or_else(|| Error::Config(format!("no bundled domain `{name}`")))?;
    Ok(DomainSource {
        name: n.to_string(),
        domain: domain.to_string(),
        problems: problems.iter().map(|(p, t)| (p.to_string(), t.to_string())).collect(),
    })
}

/// `dir/name/domain.pddl` plus every other `.pddl` in that directory, by file name.
pub fn load_dir(dir: &Path, name: &str) -> Result<DomainSource> {
    let base = dir.join(name);
    let domain = read(&base.join("domain.pddl"))?;
    let mut problems = Vec::new();
    let entries = std::fs::read_dir(&base).map_err(|e| Error::Io(format!("{}: {e}", base.display())))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::Io(e.to_string()))?.path();
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        if path.extension().is_some_and(|e| e == "pddl") && stem != "domain" {
            problems.push((stem, read(&path)?));
        }
    }
    problems.sort();
    Ok(DomainSource { name: name.to_string(), domain, problems })
}

/// From `dir` when given, the bundled copy otherwise.
pub fn load(dir: Option<&Path>, name: &str) -> Result<DomainSource> {
    match dir {
        Some(d) => load_dir(d, name),
        None => bundled(name),
    }
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
