use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{load_from_sources, Pos, SynsetId, WordNetDb, WordNetError};

struct Entry {
    pos: Pos,
    lemmas: Vec<String>,
    hypernyms: Vec<usize>,
    instance_of: Vec<usize>,
    gloss: String,
}

/// Writes small dictionaries in genuine WordNet 3.0 file syntax.
///
/// Synsets are added with handles; offsets are assigned when rendering so
/// that every offset is the byte position of its line, as in the real files.
/// Sense numbers follow insertion order per `(lemma, word class)`.
#[derive(Default)]
pub struct DictBuilder {
    entries: Vec<Entry>,
}

/// Rendered dictionary files.
pub struct DictFiles {
    pub files: Vec<(&'static str, String)>,
    pub ids: Vec<SynsetId>,
}

impl DictBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a synset and returns its handle. Hypernym handles must already exist.
    pub fn synset(&mut self, pos: Pos, lemmas: &[&str], hypernyms: &[usize]) -> usize {
        assert!(!lemmas.is_empty(), "a synset needs at least one lemma");
        assert!(hypernyms.iter().all(|&h| h < self.entries.len()), "unknown hypernym handle");
        let gloss = format!("gloss of {}", lemmas.join(" "));
        self.entries.push(Entry {
            pos,
            lemmas: lemmas.iter().map(|l| l.to_lowercase()).collect(),
            hypernyms: hypernyms.to_vec(),
            instance_of: Vec::new(),
            gloss,
        });
        self.entries.len() - 1
    }

    /// Adds a hypernym edge after creation, allowing cycles and forward edges.
    pub fn add_hypernym(&mut self, child: usize, parent: usize) {
        self.entries[child].hypernyms.push(parent);
    }

    /// Adds an instance-hypernym (`@i`) edge.
    pub fn add_instance_of(&mut self, instance: usize, class: usize) {
        self.entries[instance].instance_of.push(class);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn render(&self) -> DictFiles {
        // ss_type -> pointer pos letter; satellites are listed as 's' in their own line
        let mut ids = vec![SynsetId::new(Pos::Noun, 0); self.entries.len()];
        let mut hyponyms: Vec<Vec<usize>> = vec![Vec::new(); self.entries.len()];
        for (i, e) in self.entries.iter().enumerate() {
            for &h in e.hypernyms.iter().chain(&e.instance_of) {
                hyponyms[h].push(i);
            }
        }

        // lex ids per (lemma, ss_type) in insertion order
        let mut lex_counter: HashMap<(String, u8), u32> = HashMap::new();
        let mut lex_ids: Vec<Vec<u32>> = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            lex_ids.push(
                e.lemmas
                    .iter()
                    .map(|l| {
                        let c = lex_counter.entry((l.clone(), e.pos.ss_type())).or_insert(0);
                        *c += 1;
                        *c - 1
                    })
                    .collect(),
            );
        }

        let files_order = ["data.noun", "data.verb", "data.adj", "data.adv"];
        // Lines have fixed width fields, so lengths do not depend on offset values.
        let mut offsets = vec![0u32; self.entries.len()];
        for file in files_order {
            let mut pos = 0u32;
            for (i, e) in self.entries.iter().enumerate() {
                if e.pos.data_file() == file {
                    offsets[i] = pos;
                    pos += self.line(i, &offsets, &hyponyms, &lex_ids).len() as u32;
                }
            }
        }
        for (i, e) in self.entries.iter().enumerate() {
            ids[i] = SynsetId::new(e.pos, offsets[i]);
        }

        let mut files = Vec::new();
        for file in files_order {
            let mut text = String::new();
            for (i, e) in self.entries.iter().enumerate() {
                if e.pos.data_file() == file {
                    text.push_str(&self.line(i, &offsets, &hyponyms, &lex_ids));
                }
            }
            files.push((file, text));
        }

        let mut index: Vec<(String, u32, u32)> = Vec::new();
        let mut sense_counter: HashMap<(String, Pos), u32> = HashMap::new();
        for (i, e) in self.entries.iter().enumerate() {
            for (j, lemma) in e.lemmas.iter().enumerate() {
                let n = sense_counter.entry((lemma.clone(), e.pos.word_class())).or_insert(0);
                *n += 1;
                let lex = lex_ids[i][j];
                let key = format!("{}%{}:{:02}:{:02}::", lemma, e.pos.ss_type(), lex / 16, lex % 16);
                index.push((key, offsets[i], *n));
            }
        }
        index.sort();
        let mut text = String::new();
        for (key, offset, n) in index {
            writeln!(text, "{key} {offset:08} {n} 0").unwrap();
        }
        files.push(("index.sense", text));

        DictFiles { files, ids }
    }

    fn line(&self, i: usize, offsets: &[u32], hyponyms: &[Vec<usize>], lex_ids: &[Vec<u32>]) -> String {
        let e = &self.entries[i];
        let mut line =
            format!("{:08} {:02} {} {:02x}", offsets[i], lex_ids[i][0] / 16, e.pos.as_char(), e.lemmas.len());
        for (lemma, lex) in e.lemmas.iter().zip(&lex_ids[i]) {
            write!(line, " {} {:x}", lemma, lex % 16).unwrap();
        }
        let n_ptrs = e.hypernyms.len() + e.instance_of.len() + hyponyms[i].len();
        write!(line, " {n_ptrs:03}").unwrap();
        for &h in &e.hypernyms {
            write!(line, " @ {:08} {} 0000", offsets[h], pointer_pos(self.entries[h].pos)).unwrap();
        }
        for &h in &e.instance_of {
            write!(line, " @i {:08} {} 0000", offsets[h], pointer_pos(self.entries[h].pos)).unwrap();
        }
        for &h in &hyponyms[i] {
            write!(line, " ~ {:08} {} 0000", offsets[h], pointer_pos(self.entries[h].pos)).unwrap();
        }
        writeln!(line, " | {}", e.gloss).unwrap();
        line
    }

    pub fn write_dir(&self, dir: &Path) -> std::io::Result<Vec<SynsetId>> {
        std::fs::create_dir_all(dir)?;
        let rendered = self.render();
        for (name, text) in &rendered.files {
            std::fs::write(dir.join(name), text)?;
        }
        Ok(rendered.ids)
    }

    /// Renders and loads the dictionary, returning handle ids alongside.
    pub fn build(&self) -> Result<(WordNetDb, Vec<SynsetId>), WordNetError> {
        let rendered = self.render();
        let sources: Vec<(&str, &[u8])> = rendered.files.iter().map(|(n, t)| (*n, t.as_bytes())).collect();
        Ok((load_from_sources(&sources)?, rendered.ids))
    }
}

fn pointer_pos(pos: Pos) -> char {
    match pos {
        Pos::AdjSat => 'a',
        p => p.as_char(),
    }
}
