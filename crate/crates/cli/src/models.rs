//! Model lookup: a spec file on disk, or one of the bundled specs by name.

use std::path::Path;

use r2d_core::modelspec::ModelSpecFile;
use r2d_core::{Error, ModelHandle, Result};
use sha2::{Digest, Sha256};

pub const BUNDLED: [(&str, &str); 5] = [
    ("ledrappier", include_str!("../models/ledrappier.toml")),
    ("circle-2-3", include_str!("../models/circle-2-3.toml")),
    ("fullshift", include_str!("../models/fullshift.toml")),
    ("kgraph-2-3", include_str!("../models/kgraph-2-3.toml")),
    ("reducible-kgraph", include_str!("../models/reducible-kgraph.toml")),
];

#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub handle: ModelHandle,
    pub spec: ModelSpecFile,
    /// `bundled:<name>` or the path as given.
    pub source: String,
    /// SHA-256 of the spec text.
    pub fingerprint: String,
}

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// An existing file wins over a bundled name.
pub fn load(arg: &str) -> Result<LoadedModel> {
    let path = Path::new(arg);
    let (text, source) = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{arg}: {e}")))?;
        (text, arg.to_string())
    } else if let Some(t) = bundled(arg) {
        (t.to_string(), format!("bundled:{arg}"))
    } else {
        let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
        return Err(Error::Parse(format!(
            "{arg}: no such file, and not a bundled model ({})",
            names.join(", ")
        )));
    };
    let context = |e: Error| match e {
        Error::Parse(m) => Error::Parse(format!("{source}: {m}")),
        other => other,
    };
    let spec = ModelSpecFile::parse(&text).map_err(context)?;
    let handle = spec.build().map_err(context)?;
    Ok(LoadedModel {
        handle,
        spec,
        fingerprint: format!("sha256:{:x}", Sha256::digest(text.as_bytes())),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use r2d_core::ModelKind;

    #[test]
    fn every_bundled_model_builds() {
        for (name, _) in BUNDLED {
            let m = load(name).unwrap();
            assert_eq!(m.handle.name(), name);
        }
        assert_eq!(load("ledrappier").unwrap().handle.kind(), ModelKind::Sft);
        assert_eq!(load("circle-2-3").unwrap().handle.kind(), ModelKind::Circle);
    }

    #[test]
    fn unknown_name_lists_bundled() {
        let e = load("no-such-model").unwrap_err().to_string();
        assert!(e.contains("ledrappier"), "{e}");
    }
}
