//! Line-oriented mapping file.
//!
//! ```text
//! #sensefold-mapping v1 level=reduced wn=<fingerprint>
//! <sense_key>\t<synset_id>\t<reduced_synset_id>
//! ...
//! #end count=<lines> checksum=<fingerprint of data lines>
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{CompressError, CompressionLevel, SenseMapping};
use crate::fingerprint;
use crate::wordnet::{SenseKey, SynsetId};

pub const MAPPING_VERSION: &str = "v1";
const MAGIC: &str = "#sensefold-mapping";

fn render_body(mapping: &SenseMapping) -> String {
    let mut body = String::new();
    for (key, synset) in &mapping.sense_synsets {
        let reduced = mapping.synset_map.get(synset).copied().unwrap_or(*synset);
        writeln!(body, "{key}\t{synset}\t{reduced}").unwrap();
    }
    body
}

/// Renders the full file contents.
pub fn render_mapping(mapping: &SenseMapping) -> String {
    let body = render_body(mapping);
    format!(
        "{MAGIC} {MAPPING_VERSION} level={} wn={}\n{body}#end count={} checksum={}\n",
        mapping.level,
        mapping.wordnet_fingerprint,
        mapping.sense_synsets.len(),
        fingerprint::of_bytes(body.as_bytes())
    )
}

pub fn write_mapping(mapping: &SenseMapping, path: impl AsRef<Path>) -> Result<(), CompressError> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    file.write_all(render_mapping(mapping).as_bytes())?;
    file.flush()?;
    Ok(())
}

pub fn read_mapping(path: impl AsRef<Path>) -> Result<SenseMapping, CompressError> {
    parse_mapping(BufReader::new(std::fs::File::open(path)?))
}

pub fn parse_mapping(reader: impl BufRead) -> Result<SenseMapping, CompressError> {
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.ok_or(CompressError::Malformed { line: 1, msg: "empty file".into() })?;
    let (level, wordnet_fingerprint) = parse_header(&header)?;

    let mut sense_synsets = BTreeMap::new();
    let mut synset_map = BTreeMap::new();
    let mut body = String::new();
    let mut trailer = None;
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        if trailer.is_some() {
            return Err(CompressError::Malformed { line: lineno, msg: "content after #end".into() });
        }
        if let Some(rest) = line.strip_prefix("#end ") {
            trailer = Some((lineno, rest.to_string()));
            continue;
        }
        let malformed = |msg: String| CompressError::Malformed { line: lineno, msg };
        let cols: Vec<&str> = line.split('\t').collect();
        let [key, synset, reduced] = cols[..] else {
            return Err(malformed(format!("expected 3 tab-separated columns, found {}", cols.len())));
        };
        let key = SenseKey::parse(key).map_err(malformed)?;
        let synset: SynsetId = synset.parse().map_err(malformed)?;
        let reduced: SynsetId = reduced.parse().map_err(malformed)?;
        if let Some(prev) = synset_map.insert(synset, reduced) {
            if prev != reduced {
                return Err(malformed(format!("synset {synset} mapped to both {prev} and {reduced}")));
            }
        }
        if sense_synsets.insert(key.clone(), synset).is_some() {
            return Err(malformed(format!("duplicate sense key {key}")));
        }
        body.push_str(&line);
        body.push('\n');
    }

    let Some((lineno, trailer)) = trailer else {
        return Err(CompressError::Malformed { line: 0, msg: "missing #end trailer (truncated file?)".into() });
    };
    let mut count = None;
    let mut checksum = None;
    for field in trailer.split_ascii_whitespace() {
        match field.split_once('=') {
            Some(("count", v)) => count = v.parse::<usize>().ok(),
            Some(("checksum", v)) => checksum = Some(v.to_string()),
            _ => {}
        }
    }
    let (Some(count), Some(expected)) = (count, checksum) else {
        return Err(CompressError::Malformed { line: lineno, msg: "bad #end trailer".into() });
    };
    if count != sense_synsets.len() {
        return Err(CompressError::Malformed {
            line: lineno,
            msg: format!("trailer announces {count} lines, found {}", sense_synsets.len()),
        });
    }
    let actual = fingerprint::of_bytes(body.as_bytes());
    if actual != expected {
        return Err(CompressError::Checksum { expected, actual });
    }

    let necessary = match level {
        CompressionLevel::Reduced => synset_map.values().copied().collect(),
        _ => BTreeSet::new(),
    };
    Ok(SenseMapping { level, necessary, synset_map, sense_synsets, wordnet_fingerprint })
}

fn parse_header(header: &str) -> Result<(CompressionLevel, String), CompressError> {
    let mut fields = header.split_ascii_whitespace();
    if fields.next() != Some(MAGIC) {
        return Err(CompressError::Malformed { line: 1, msg: "not a sensefold mapping file".into() });
    }
    let version = fields.next().unwrap_or("");
    if version != MAPPING_VERSION {
        return Err(CompressError::Version(version.to_string()));
    }
    let mut level = None;
    let mut wn = None;
    for field in fields {
        match field.split_once('=') {
            Some(("level", v)) => level = Some(v.parse().map_err(|msg| CompressError::Malformed { line: 1, msg })?),
            Some(("wn", v)) => wn = Some(v.to_string()),
            _ => {}
        }
    }
    match (level, wn) {
        (Some(l), Some(w)) => Ok((l, w)),
        _ => Err(CompressError::Malformed { line: 1, msg: "header needs level= and wn=".into() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compress::build_mapping;
    use crate::fixtures::Mwn1;

    #[test]
    fn round_trip_mwn1() {
        let f = Mwn1::build();
        for level in CompressionLevel::ALL {
            let m = build_mapping(&f.db, level);
            let text = render_mapping(&m);
            let back = parse_mapping(text.as_bytes()).unwrap();
            assert_eq!(back, m, "{level}");
            assert_eq!(render_mapping(&back), text);
        }
    }

    #[test]
    fn lines_sorted_by_sense_key() {
        let f = Mwn1::build();
        let text = render_mapping(&build_mapping(&f.db, CompressionLevel::Reduced));
        let keys: Vec<&str> =
            text.lines().filter(|l| !l.starts_with('#')).map(|l| l.split('\t').next().unwrap()).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(keys.len(), f.db.sense_count());
    }

    #[test]
    fn unknown_version_is_rejected() {
        let f = Mwn1::build();
        let text = render_mapping(&build_mapping(&f.db, CompressionLevel::Reduced)).replacen(" v1 ", " v9 ", 1);
        assert!(matches!(parse_mapping(text.as_bytes()), Err(CompressError::Version(v)) if v == "v9"));
    }

    #[test]
    fn tampered_body_fails_checksum() {
        let f = Mwn1::build();
        let m = build_mapping(&f.db, CompressionLevel::Reduced);
        let text = render_mapping(&m);
        let n5 = f.n(5).to_string();
        let n10 = f.n(10).to_string();
        // remap mouse#1 consistently so only the checksum can catch it
        let tampered = text.replace(&format!("\t{n5}\n"), &format!("\t{n10}\n"));
        assert_ne!(tampered, text);
        assert!(matches!(parse_mapping(tampered.as_bytes()), Err(CompressError::Checksum { .. })));
    }

    #[test]
    fn malformed_and_truncated() {
        let f = Mwn1::build();
        let text = render_mapping(&build_mapping(&f.db, CompressionLevel::Reduced));
        let broken = text.replacen('\t', " ", 1);
        assert!(matches!(parse_mapping(broken.as_bytes()), Err(CompressError::Malformed { line: 2, .. })));
        let truncated: String = text.lines().take(4).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_mapping(truncated.as_bytes()), Err(CompressError::Malformed { .. })));
    }
}
