use alloc::string::String;
use alloc::vec::Vec;

/// Outcome of one named verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

impl CheckEntry {
    pub fn from_result(name: &str, r: core::result::Result<(), String>) -> Self {
        match r {
            Ok(()) => CheckEntry { name: name.into(), passed: true, detail: None },
            Err(d) => CheckEntry { name: name.into(), passed: false, detail: Some(d) },
        }
    }

    pub fn pass(name: &str, detail: Option<String>) -> Self {
        CheckEntry { name: name.into(), passed: true, detail }
    }

    pub fn fail(name: &str, detail: String) -> Self {
        CheckEntry { name: name.into(), passed: false, detail: Some(detail) }
    }
}

pub fn all_passed(entries: &[CheckEntry]) -> bool {
    entries.iter().all(|e| e.passed)
}

pub fn failures(entries: &[CheckEntry]) -> Vec<&CheckEntry> {
    entries.iter().filter(|e| !e.passed).collect()
}
