//! Bundled reference data: the 33 surviving groups, the alternative
//! presentation of `G_{4,6}`, and the 333-plane witness code.
//!
//! Files are embedded at build time; setting `QCF_DATA_DIR` redirects all
//! lookups to `$QCF_DATA_DIR/groups/*.json` and `$QCF_DATA_DIR/code/*`.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// On-disk group format: name plus generator matrices as 0/1 row arrays.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abstract_type: Option<String>,
    pub generators: Vec<BitMatrix>,
}

impl GroupFile {
    pub fn from_json(text: &str) -> Result<GroupFile> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("group serializes") + "\n"
    }
}

macro_rules! bundled_groups {
    ($(($order:literal, $idx:literal, $file:literal)),* $(,)?) => {
        /// `(order, index)` pairs of the bundled surviving groups, in
        /// ascending group order.
        pub const BUNDLED_GROUP_IDS: &[(u64, u32)] = &[$(($order, $idx)),*];
        const BUNDLED_GROUP_FILES: &[((u64, u32), &str)] = &[
            $((($order, $idx), include_str!(concat!("../data/groups/", $file)))),*
        ];
    };
}

bundled_groups![
    (1, 1, "g_1_1.json"),
    (2, 1, "g_2_1.json"),
    (3, 1, "g_3_1.json"),
    (3, 2, "g_3_2.json"),
    (4, 1, "g_4_1.json"),
    (4, 2, "g_4_2.json"),
    (4, 3, "g_4_3.json"),
    (4, 4, "g_4_4.json"),
    (4, 5, "g_4_5.json"),
    (4, 6, "g_4_6.json"),
    (4, 7, "g_4_7.json"),
    (5, 1, "g_5_1.json"),
    (6, 1, "g_6_1.json"),
    (6, 2, "g_6_2.json"),
    (6, 3, "g_6_3.json"),
    (7, 1, "g_7_1.json"),
    (7, 2, "g_7_2.json"),
    (8, 1, "g_8_1.json"),
    (8, 2, "g_8_2.json"),
    (8, 3, "g_8_3.json"),
    (8, 4, "g_8_4.json"),
    (8, 5, "g_8_5.json"),
    (8, 6, "g_8_6.json"),
    (8, 7, "g_8_7.json"),
    (8, 8, "g_8_8.json"),
    (8, 9, "g_8_9.json"),
    (8, 10, "g_8_10.json"),
    (8, 11, "g_8_11.json"),
    (9, 1, "g_9_1.json"),
    (9, 2, "g_9_2.json"),
    (12, 1, "g_12_1.json"),
    (14, 1, "g_14_1.json"),
    (16, 1, "g_16_1.json"),
];

const G_4_6_ALT: &str = include_str!("../data/groups/g_4_6_alt.json");
const CODE_333: &str = include_str!("../data/code/code_333.txt");

fn data_dir_override() -> Option<PathBuf> {
    std::env::var_os("QCF_DATA_DIR").map(PathBuf::from)
}

fn read_override(rel: &str) -> Result<Option<String>> {
    match data_dir_override() {
        Some(dir) => {
            let path = dir.join(rel);
            Ok(Some(std::fs::read_to_string(&path).map_err(|e| {
                Error::UnknownData(format!("{}: {e}", path.display()))
            })?))
        }
        None => Ok(None),
    }
}

/// The raw text of the bundled 333-code file (orbit representatives of the
/// witness code, one 7-digit row per line).
pub fn code_333_text() -> Result<String> {
    if let Some(text) = read_override("code/code_333.txt")? {
        return Ok(text);
    }
    Ok(CODE_333.to_string())
}

/// Load a bundled group by `(order, index)`.
pub fn bundled_group(order: u64, idx: u32) -> Result<GroupFile> {
    let rel = format!("groups/g_{order}_{idx}.json");
    if let Some(text) = read_override(&rel)? {
        return GroupFile::from_json(&text);
    }
    let text = BUNDLED_GROUP_FILES
        .iter()
        .find(|((o, i), _)| *o == order && *i == idx)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::UnknownData(format!("G_{{{order},{idx}}}")))?;
    GroupFile::from_json(text)
}

/// The alternative presentation of `G_{4,6}` whose first generator is a
/// Frobenius normal form.
pub fn g_4_6_alt() -> Result<GroupFile> {
    if let Some(text) = read_override("groups/g_4_6_alt.json")? {
        return GroupFile::from_json(&text);
    }
    GroupFile::from_json(G_4_6_ALT)
}

/// Resolve a user-supplied group argument: a path to a JSON file, or the
/// name of a bundled group such as `G_{14,1}`, `G_14_1`, or `14,1`.
pub fn resolve_group(arg: &str) -> Result<GroupFile> {
    if std::path::Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg)?;
        return GroupFile::from_json(&text);
    }
    let norm: String = arg
        .chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .collect::<String>()
        .to_ascii_lowercase();
    if norm == "g46alt" || norm == "g46footnote" {
        return g_4_6_alt();
    }
    let digits = norm.strip_prefix('g').unwrap_or(&norm);
    for &(o, i) in BUNDLED_GROUP_IDS {
        if format!("{o}{i}") == digits {
            return bundled_group(o, i);
        }
    }
    Err(Error::UnknownData(arg.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{parse_code_text, CodeFormat};

    #[test]
    fn bundled_groups_load() {
        assert_eq!(BUNDLED_GROUP_IDS.len(), 33);
        for &(o, i) in BUNDLED_GROUP_IDS {
            let g = bundled_group(o, i).unwrap();
            assert_eq!(g.name, format!("G_{{{o},{i}}}"));
            assert_eq!(g.order, Some(o));
            assert!(!g.generators.is_empty());
            for m in &g.generators {
                assert_eq!((m.nrows(), m.ncols()), (7, 7));
                assert!(m.is_invertible(), "generator of {} is singular", g.name);
            }
        }
        let alt = g_4_6_alt().unwrap();
        assert_eq!(alt.generators.len(), 2);
    }

    #[test]
    fn bundled_code_has_103_representatives() {
        let text = code_333_text().unwrap();
        let reps = parse_code_text(&text, CodeFormat::Appendix).unwrap();
        assert_eq!(reps.len(), 9 + 26 + 68);
    }

    #[test]
    fn resolve_by_name() {
        assert_eq!(resolve_group("G_{14,1}").unwrap().order, Some(14));
        assert_eq!(resolve_group("g_16_1").unwrap().order, Some(16));
        assert!(resolve_group("G_{99,9}").is_err());
    }

    #[test]
    fn group_file_round_trip() {
        let g = bundled_group(4, 6).unwrap();
        let back = GroupFile::from_json(&g.to_json()).unwrap();
        assert_eq!(back.name, g.name);
        assert_eq!(back.generators, g.generators);
    }
}
