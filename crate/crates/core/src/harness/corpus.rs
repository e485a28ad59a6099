//! The embedded benchmark programs.

use crate::engine::InstanceParams;

/// Expected outcome of a benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Verified,
    Counterexample,
}

impl Expected {
    pub fn label(self) -> &'static str {
        match self {
            Expected::Verified => "Verified",
            Expected::Counterexample => "Counterexample",
        }
    }
}

/// What the size of an instance controls.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Size {
    /// Nothing; one instance.
    Fixed,
    /// Length of an array parameter.
    Len(&'static str),
    /// Scalar parameter bounded to `0..=size`.
    Bound(&'static str),
}

#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub name: &'static str,
    /// File name under `corpus/`.
    pub file: &'static str,
    pub source: &'static str,
    /// Function verified; the first one in the file when `None`.
    pub entry: Option<&'static str>,
    pub expected: Expected,
    pub size: Size,
    /// Sizes run by default.
    pub sizes: &'static [usize],
}

impl Entry {
    /// Instance of the given size on top of `base`.
    pub fn instance(&self, size: Option<usize>, base: &InstanceParams) -> InstanceParams {
        let inst = base.clone();
        match (self.size, size) {
            (Size::Len(a), Some(n)) => inst.len(a, n),
            (Size::Bound(x), Some(n)) => inst.bound(x, 0, n as i64),
            _ => inst,
        }
    }
}

macro_rules! entry {
    ($name:literal, $file:literal, $entry:expr, $exp:ident, $size:expr, $sizes:expr) => {
        Entry {
            name: $name,
            file: $file,
            source: include_str!(concat!("../../corpus/", $file)),
            entry: $entry,
            expected: Expected::$exp,
            size: $size,
            sizes: $sizes,
        }
    };
}

pub const CORPUS: &[Entry] = &[
    entry!("tritype", "tritype.mimp", None, Verified, Size::Fixed, &[]),
    entry!("tritypeKO", "tritypeKO.mimp", None, Counterexample, Size::Fixed, &[]),
    entry!("binarySearch", "binarySearch.mimp", None, Verified, Size::Len("tab"), &[8, 16]),
    entry!(
        "binarySearchKO",
        "binarySearchKO.mimp",
        None,
        Counterexample,
        Size::Len("tab"),
        &[8, 16, 32, 64, 128]
    ),
    entry!("bubbleSortWithInit", "bubbleSortWithInit.mimp", None, Verified, Size::Len("tab"), &[8, 16]),
    entry!("squareSum", "squareSum.mimp", None, Verified, Size::Bound("n"), &[8, 16]),
    entry!("squareSumArray", "squareSumArray.mimp", None, Verified, Size::Len("t"), &[6]),
    entry!("selectionSort", "selectionSort.mimp", None, Verified, Size::Len("t"), &[40]),
    entry!("findMin", "findMin.mimp", None, Verified, Size::Len("t"), &[6]),
];

/// Short names used on the command line.
const ALIASES: &[(&str, &[&str])] = &[
    ("tritype", &["tritype", "tritypeKO"]),
    ("bsearch", &["binarySearch"]),
    ("bsearchKO", &["binarySearchKO"]),
    ("bubble", &["bubbleSortWithInit"]),
    ("selection", &["selectionSort", "findMin"]),
];

pub fn get(name: &str) -> Option<&'static Entry> {
    CORPUS.iter().find(|e| e.name.eq_ignore_ascii_case(name))
}

/// Entries selected by a suite name: `all`, an alias or a corpus name.
pub fn suite(name: &str) -> Option<Vec<&'static Entry>> {
    if name.eq_ignore_ascii_case("all") {
        return Some(CORPUS.iter().collect());
    }
    if let Some((_, names)) = ALIASES.iter().find(|(a, _)| a.eq_ignore_ascii_case(name)) {
        return Some(names.iter().filter_map(|n| get(n)).collect());
    }
    get(name).map(|e| vec![e])
}

/// Look up a corpus program by file name, with or without the extension.
pub fn by_file(path: &str) -> Option<&'static Entry> {
    let base = path.rsplit(['/', '\\']).next().unwrap_or(path);
    let stem = base.strip_suffix(".mimp").unwrap_or(base);
    if let Some(e) = CORPUS.iter().find(|e| e.file.eq_ignore_ascii_case(base)) {
        return Some(e);
    }
    match suite(stem) {
        Some(v) if v.len() == 1 => Some(v[0]),
        _ => get(stem),
    }
}
