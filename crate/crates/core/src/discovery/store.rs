//! Issuer-traceable credential stores.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::parser::{parse_policy, ParseError};
use crate::policy::{Credential, Entity, Policy};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("credential `{credential}` stored under `{issuer}` is not issued by it")]
    NotIssuer { issuer: Entity, credential: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("{}: file name `{name}` is not an entity name", path.display())]
    BadFileName { path: PathBuf, name: String },
}

/// Lookup from an issuer to every credential it issued.
///
/// `None` means the store knows nothing about the issuer, which is different
/// from an issuer that exists but issued nothing. Implementations must allow
/// concurrent read-only lookups.
pub trait CredentialStore {
    fn issued_by(&self, issuer: &Entity) -> Option<BTreeSet<Credential>>;

    fn issuers(&self) -> Vec<Entity>;

    /// All credentials held by the store, as one policy.
    fn union_policy(&self) -> Policy {
        self.issuers().iter().filter_map(|e| self.issued_by(e)).flatten().collect()
    }
}

/// In-memory stores, one entry per issuer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MemoryStore {
    entries: BTreeMap<Entity, BTreeSet<Credential>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Splits a policy by issuer. Every entity in `extra_issuers` gets an
    /// entry even when it issued nothing.
    pub fn from_policy<'a>(policy: &Policy, extra_issuers: impl IntoIterator<Item = &'a Entity>) -> Self {
        let mut store = Self::new();
        for e in extra_issuers {
            store.add_issuer(e.clone());
        }
        for c in policy.credentials() {
            store.entries.entry(c.head.owner.clone()).or_default().insert(c.clone());
        }
        store
    }

    /// Splits a policy by issuer and gives every entity of its universe an entry.
    pub fn complete(policy: &Policy) -> Self {
        Self::from_policy(policy, policy.universe())
    }

    pub fn add_issuer(&mut self, issuer: Entity) {
        self.entries.entry(issuer).or_default();
    }

    pub fn insert(
        &mut self,
        issuer: Entity,
        credentials: impl IntoIterator<Item = Credential>,
    ) -> Result<(), StoreError> {
        let entry = self.entries.entry(issuer.clone()).or_default();
        for c in credentials {
            if c.head.owner != issuer {
                return Err(StoreError::NotIssuer { issuer, credential: c.to_string() });
            }
            entry.insert(c);
        }
        Ok(())
    }
}

impl CredentialStore for MemoryStore {
    fn issued_by(&self, issuer: &Entity) -> Option<BTreeSet<Credential>> {
        self.entries.get(issuer).cloned()
    }

    fn issuers(&self) -> Vec<Entity> {
        self.entries.keys().cloned().collect()
    }
}

/// A directory holding one `<Entity>.rt` policy file per issuer. Files are
/// read and checked when the store is opened.
#[derive(Clone, Debug)]
pub struct DirectoryStore {
    root: PathBuf,
    inner: MemoryStore,
}

impl DirectoryStore {
    pub fn open(root: impl AsRef<Path>) -> Result<Self, StoreError> {
        let root = root.as_ref().to_path_buf();
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| StoreError::Io { path, source }
        };
        let mut paths = Vec::new();
        for entry in fs::read_dir(&root).map_err(io(&root))? {
            let path = entry.map_err(io(&root))?.path();
            if path.extension().is_some_and(|e| e == "rt") && path.is_file() {
                paths.push(path);
            }
        }
        paths.sort();
        let mut inner = MemoryStore::new();
        for path in paths {
            let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            let issuer = Entity::new(name.as_str());
            if !issuer.is_well_formed() {
                return Err(StoreError::BadFileName { path, name });
            }
            let text = fs::read_to_string(&path).map_err(io(&path))?;
            let policy = parse_policy(&text).map_err(|source| StoreError::Parse { path: path.clone(), source })?;
            inner.insert(issuer, policy.credentials().iter().cloned()).map_err(|e| match e {
                StoreError::NotIssuer { issuer, credential } => {
                    StoreError::NotIssuer { issuer, credential: format!("{credential} (in {})", path.display()) }
                }
                other => other,
            })?;
        }
        Ok(Self { root, inner })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }
}

impl CredentialStore for DirectoryStore {
    fn issued_by(&self, issuer: &Entity) -> Option<BTreeSet<Credential>> {
        self.inner.issued_by(issuer)
    }

    fn issuers(&self) -> Vec<Entity> {
        self.inner.issuers()
    }
}
