use std::collections::BTreeMap;

use crate::solver::VarId;

/// One version of an array: its slot variables. Slots untouched by a
/// constant-index write are shared with the previous version.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrayVersion {
    pub version: u32,
    /// Unique per version within one verification run; keys read caches.
    pub uid: u32,
    pub slots: Vec<VarId>,
}

/// Current SSA version of every identifier along one path.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SsaEnv {
    scalars: BTreeMap<String, (u32, VarId)>,
    arrays: BTreeMap<String, ArrayVersion>,
    next: BTreeMap<String, u32>,
}

impl SsaEnv {
    pub fn new() -> Self {
        SsaEnv::default()
    }

    pub fn scalar(&self, name: &str) -> Option<VarId> {
        self.scalars.get(name).map(|&(_, v)| v)
    }

    pub fn scalar_version(&self, name: &str) -> Option<u32> {
        self.scalars.get(name).map(|&(n, _)| n)
    }

    pub fn array(&self, name: &str) -> Option<&ArrayVersion> {
        self.arrays.get(name)
    }

    /// Reserve the next version number of `name`.
    pub fn next_version(&mut self, name: &str) -> u32 {
        let n = self.next.entry(name.to_string()).or_insert(0);
        let v = *n;
        *n += 1;
        v
    }

    pub fn bind_scalar(&mut self, name: &str, version: u32, v: VarId) {
        self.scalars.insert(name.to_string(), (version, v));
    }

    pub fn bind_array(&mut self, name: &str, a: ArrayVersion) {
        self.arrays.insert(name.to_string(), a);
    }

    pub fn scalars(&self) -> impl Iterator<Item = (&str, u32, VarId)> {
        self.scalars.iter().map(|(k, &(n, v))| (k.as_str(), n, v))
    }

    pub fn arrays(&self) -> impl Iterator<Item = (&str, &ArrayVersion)> {
        self.arrays.iter().map(|(k, a)| (k.as_str(), a))
    }
}
