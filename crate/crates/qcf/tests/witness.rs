//! Structural invariants of the bundled 333-plane witness.

use qcf::data;
use qcf::geometry::{encode_appendix_row, parse_code_text, sub_subspaces, CodeFormat, Subspace};
use qcf::groups::{expand_orbits, orbits_of_words, MatrixGroup};
use std::collections::BTreeSet;

fn witness() -> (Vec<Subspace>, MatrixGroup) {
    let g46 = MatrixGroup::from_group_file(&data::bundled_group(4, 6).unwrap()).unwrap();
    let reps = parse_code_text(&data::code_333_text().unwrap(), CodeFormat::Appendix).unwrap();
    (reps, g46)
}

#[test]
fn every_representative_row_round_trips() {
    let text = data::code_333_text().unwrap();
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let decoded = qcf::geometry::decode_appendix_row(line).unwrap();
        assert_eq!(encode_appendix_row(&decoded).unwrap(), line);
    }
}

#[test]
fn per_section_orbit_sizes_match_the_headers() {
    let (_, g46) = witness();
    let text = data::code_333_text().unwrap();
    let mut expected = 0u64;
    for line in text.lines().map(str::trim) {
        if line.starts_with('#') {
            expected = if line.contains("length 2") {
                2
            } else if line.contains("length 4") {
                4
            } else {
                1
            };
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let rep = qcf::geometry::decode_appendix_row(line).unwrap();
        let (orbits, _) = orbits_of_words(std::slice::from_ref(&rep), &g46).unwrap();
        assert_eq!(orbits[0].len() as u64, expected, "row {line}");
    }
}

#[test]
fn two_subspaces_of_distinct_codewords_are_disjoint() {
    // distance >= 4 for k = 3 means no two codewords share a 2-subspace,
    // so the union over all codewords has exactly 333 * 7 members
    let (reps, g46) = witness();
    let code = expand_orbits(&reps, &g46).unwrap();
    assert_eq!(code.len(), 333);
    let mut all: BTreeSet<Subspace> = BTreeSet::new();
    let mut total = 0usize;
    for w in code.words() {
        for t in sub_subspaces(w, 2) {
            all.insert(t);
            total += 1;
        }
    }
    assert_eq!(total, 333 * 7);
    assert_eq!(all.len(), 2331);
}
