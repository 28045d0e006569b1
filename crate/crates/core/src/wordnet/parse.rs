use std::collections::HashMap;
use std::path::PathBuf;

use super::{normalize_lemma, Pos, SenseKey, Synset, SynsetId, WordNetDb, WordNetError, WordSense, DICT_FILES};
use crate::fingerprint::Fingerprinter;

/// Builds a database from in-memory file contents keyed by file name.
///
/// Every name in [`DICT_FILES`] must be present.
pub fn load_from_sources(sources: &[(&str, &[u8])]) -> Result<WordNetDb, WordNetError> {
    let lookup = |name: &str| {
        sources
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, b)| *b)
            .ok_or_else(|| WordNetError::MissingFile(PathBuf::from(name)))
    };

    let mut fp = Fingerprinter::new();
    let mut synsets = Vec::new();
    for name in &DICT_FILES[..4] {
        let bytes = lookup(name)?;
        fp.add(name, bytes);
        parse_data_file(name, bytes, &mut synsets)?;
    }
    let index = lookup("index.sense")?;
    fp.add("index.sense", index);

    let by_id: HashMap<SynsetId, usize> = synsets.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
    if by_id.len() != synsets.len() {
        return Err(WordNetError::Inconsistent("duplicate synset offsets".into()));
    }

    let mut sense_index = HashMap::new();
    let mut word_senses: HashMap<(String, Pos), Vec<WordSense>> = HashMap::new();
    for (lineno, line) in lines("index.sense", index)? {
        let err = |msg: String| WordNetError::Parse { file: "index.sense".into(), line: lineno, msg };
        let mut fields = line.split_ascii_whitespace();
        let (Some(key), Some(offset), Some(sense_number)) = (fields.next(), fields.next(), fields.next()) else {
            return Err(err("expected `sense_key offset sense_number tag_cnt`".into()));
        };
        let key = SenseKey::parse(key).map_err(err)?;
        let offset: u32 = offset.parse().map_err(|_| err(format!("bad offset '{offset}'")))?;
        let sense_number: u32 = sense_number.parse().map_err(|_| err(format!("bad sense number '{sense_number}'")))?;
        let id = SynsetId::new(key.pos(), offset);
        let Some(&idx) = by_id.get(&id) else {
            return Err(err(format!("sense key {key} points to missing synset {id}")));
        };
        if !synsets[idx].lemmas.iter().any(|l| l == key.lemma()) {
            return Err(err(format!("lemma of {key} is not a member of synset {id}")));
        }
        if sense_index.insert(key.clone(), id).is_some() {
            return Err(err(format!("duplicate sense key {key}")));
        }
        word_senses.entry((key.lemma().to_string(), key.pos().word_class())).or_default().push(WordSense {
            key,
            synset: id,
            sense_number,
        });
    }
    for senses in word_senses.values_mut() {
        senses.sort_by(|a, b| a.sense_number.cmp(&b.sense_number).then_with(|| a.key.cmp(&b.key)));
    }

    let word_sense_pairs: usize = synsets.iter().map(|s| s.lemmas.len()).sum();
    if word_sense_pairs != sense_index.len() {
        return Err(WordNetError::Inconsistent(format!(
            "data files list {word_sense_pairs} word-sense pairs but index.sense has {} keys",
            sense_index.len()
        )));
    }

    Ok(WordNetDb::from_parts(synsets, sense_index, word_senses, fp.finish()))
}

/// Yields `(1-based line number, line)` for non-header lines, checking UTF-8.
fn lines<'a>(file: &'a str, bytes: &'a [u8]) -> Result<impl Iterator<Item = (usize, &'a str)> + 'a, WordNetError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()].iter().filter(|&&b| b == b'\n').count() + 1;
        WordNetError::Parse { file: file.into(), line, msg: "invalid UTF-8".into() }
    })?;
    Ok(text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.starts_with("  ") && !l.trim().is_empty()))
}

fn parse_data_file(name: &str, bytes: &[u8], out: &mut Vec<Synset>) -> Result<(), WordNetError> {
    let text = std::str::from_utf8(bytes).map_err(|_| WordNetError::Parse {
        file: name.into(),
        line: 0,
        msg: "invalid UTF-8".into(),
    })?;
    let mut byte_pos = 0usize;
    for (i, raw) in text.split_inclusive('\n').enumerate() {
        let start = byte_pos;
        byte_pos += raw.len();
        let line = raw.trim_end_matches(['\n', '\r']);
        if line.starts_with("  ") || line.trim().is_empty() {
            continue;
        }
        let synset =
            parse_data_line(line, start).map_err(|msg| WordNetError::Parse { file: name.into(), line: i + 1, msg })?;
        if synset.id.pos.data_file() != name {
            return Err(WordNetError::Parse {
                file: name.into(),
                line: i + 1,
                msg: format!("synset type '{}' does not belong in {name}", synset.id.pos),
            });
        }
        out.push(synset);
    }
    Ok(())
}

fn parse_data_line(line: &str, byte_offset: usize) -> Result<Synset, String> {
    let (body, gloss) = match line.split_once(" | ") {
        Some((b, g)) => (b, g.trim().to_string()),
        None => (line.trim_end_matches(" |"), String::new()),
    };
    let mut fields = body.split_ascii_whitespace();
    let mut next = |what: &str| fields.next().ok_or_else(|| format!("truncated line: missing {what}"));

    let offset_field = next("offset")?;
    let offset: u32 = offset_field.parse().map_err(|_| format!("bad offset '{offset_field}'"))?;
    if offset as usize != byte_offset {
        return Err(format!("offset {offset_field} does not match byte position {byte_offset}"));
    }
    next("lex_filenum")?;
    let ss_type = next("ss_type")?;
    let pos = ss_type.parse::<Pos>()?;
    let w_cnt_field = next("w_cnt")?;
    let w_cnt = usize::from_str_radix(w_cnt_field, 16).map_err(|_| format!("bad w_cnt '{w_cnt_field}'"))?;
    let mut lemmas = Vec::with_capacity(w_cnt);
    for _ in 0..w_cnt {
        let word = next("word")?;
        next("lex_id")?;
        let lemma = normalize_lemma(strip_adj_marker(word));
        // case variants such as `Mass`/`mass` collapse to one sense key
        if !lemmas.contains(&lemma) {
            lemmas.push(lemma);
        }
    }
    let p_cnt_field = next("p_cnt")?;
    let p_cnt: usize = p_cnt_field.parse().map_err(|_| format!("bad p_cnt '{p_cnt_field}'"))?;
    let mut hypernyms = Vec::new();
    let mut instance_of = Vec::new();
    let mut hyponym_count = 0;
    for _ in 0..p_cnt {
        let symbol = next("pointer symbol")?;
        let target = next("pointer offset")?;
        let target_pos = next("pointer pos")?;
        next("pointer source/target")?;
        match symbol {
            "@" | "@i" => {
                let offset = target.parse().map_err(|_| format!("bad pointer offset '{target}'"))?;
                let id = SynsetId::new(target_pos.parse()?, offset);
                if symbol == "@" {
                    hypernyms.push(id);
                } else {
                    instance_of.push(id);
                }
            }
            "~" | "~i" => hyponym_count += 1,
            _ => {}
        }
    }
    // verb frames and anything else before the gloss are skipped

    Ok(Synset { id: SynsetId::new(pos, offset), lemmas, gloss, hypernyms, instance_of, hyponym_count })
}

/// Drops the syntactic marker of adjectives, e.g. `galore(ip)`.
fn strip_adj_marker(word: &str) -> &str {
    for marker in ["(a)", "(p)", "(ip)"] {
        if let Some(stripped) = word.strip_suffix(marker) {
            return stripped;
        }
    }
    word
}

#[cfg(test)]
mod tests {
    use super::*;

    const NOUN_LINE: &str = "00000000 05 n 02 Mouse 0 shrew_mouse 1 003 @ 00000120 n 0000 ~ 00000200 n 0000 + 00000300 v 0101 | a small rodent";

    #[test]
    fn parses_data_line_fields() {
        let s = parse_data_line(NOUN_LINE, 0).unwrap();
        assert_eq!(s.id.to_string(), "n00000000");
        assert_eq!(s.lemmas, vec!["mouse", "shrew_mouse"]);
        assert_eq!(s.hypernyms, vec![SynsetId::new(Pos::Noun, 120)]);
        assert_eq!(s.hyponym_count, 1);
        assert_eq!(s.gloss, "a small rodent");
    }

    #[test]
    fn instance_links_are_kept_apart_from_hypernyms() {
        let line = "00000000 15 n 01 paris 0 002 @i 00000500 n 0000 @ 00000600 n 0000 | capital";
        let s = parse_data_line(line, 0).unwrap();
        assert_eq!(s.hypernyms, vec![SynsetId::new(Pos::Noun, 600)]);
        assert_eq!(s.instance_of, vec![SynsetId::new(Pos::Noun, 500)]);
    }

    #[test]
    fn verb_frames_are_skipped() {
        let line = "00000000 29 v 01 breathe 0 001 @ 00000200 v 0000 02 + 02 00 + 08 00 | draw air";
        let s = parse_data_line(line, 0).unwrap();
        assert_eq!(s.hypernyms, vec![SynsetId::new(Pos::Verb, 200)]);
        assert_eq!(s.gloss, "draw air");
    }

    #[test]
    fn adjective_markers_are_stripped() {
        let line = "00000000 00 s 01 galore(ip) 0 000 | abundant";
        let s = parse_data_line(line, 0).unwrap();
        assert_eq!(s.id.pos, Pos::AdjSat);
        assert_eq!(s.lemmas, vec!["galore"]);
    }

    #[test]
    fn offset_must_match_byte_position() {
        let err = parse_data_line(NOUN_LINE, 17).unwrap_err();
        assert!(err.contains("byte position 17"), "{err}");
    }

    #[test]
    fn truncated_line_is_an_error() {
        let err = parse_data_line("00000000 05 n 02 mouse 0", 0).unwrap_err();
        assert!(err.contains("truncated"), "{err}");
    }

    #[test]
    fn parse_errors_name_file_and_line() {
        let data = format!("  1 license header\n{NOUN_LINE}\n");
        let empty: &[u8] = b"";
        let sources = [
            ("data.noun", data.as_bytes()),
            ("data.verb", empty),
            ("data.adj", empty),
            ("data.adv", empty),
            ("index.sense", empty),
        ];
        match load_from_sources(&sources) {
            Err(WordNetError::Parse { file, line, .. }) => {
                assert_eq!(file, "data.noun");
                assert_eq!(line, 2);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn missing_index_is_reported() {
        let empty: &[u8] = b"";
        let sources = [("data.noun", empty), ("data.verb", empty), ("data.adj", empty), ("data.adv", empty)];
        match load_from_sources(&sources) {
            Err(WordNetError::MissingFile(p)) => assert_eq!(p, PathBuf::from("index.sense")),
            other => panic!("expected missing file, got {other:?}"),
        }
    }
}
