//! Small hand-built dictionaries and corpora used by tests, benches and the
//! acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Sentence, Token};
use crate::wordnet::{DictBuilder, Pos, SynsetId, WordNetDb};

/// The 13-synset "mouse" taxonomy.
///
/// ```text
/// n1 entity <- n2 physical_entity <- n3 object <- n4 whole
///   n4 <- n5 living_thing <- n6 organism <- n7 placental <- n8 rodent <- n9 mouse (animal)
///   n4 <- n10 artifact <- n11 device <- n12 electronic_device <- n13 mouse (device)
/// ```
///
/// `mouse` has senses n9 (sense 1) and n13 (sense 2); every other synset
/// holds one monosemous lemma.
pub struct Mwn1 {
    pub db: WordNetDb,
    ids: Vec<SynsetId>,
}

impl Mwn1 {
    pub const LEMMAS: [&'static [&'static str]; 13] = [
        &["entity"],
        &["physical_entity"],
        &["object"],
        &["whole"],
        &["living_thing"],
        &["organism"],
        &["placental"],
        &["rodent"],
        &["mouse"],
        &["artifact"],
        &["device"],
        &["electronic_device"],
        &["mouse", "computer_mouse"],
    ];

    /// Builder with handles 0..13 standing for n1..n13.
    pub fn builder() -> DictBuilder {
        let parents: [Option<usize>; 13] = [
            None,
            Some(0),
            Some(1),
            Some(2),
            Some(3),
            Some(4),
            Some(5),
            Some(6),
            Some(7),
            Some(3),
            Some(9),
            Some(10),
            Some(11),
        ];
        let mut b = DictBuilder::new();
        for (lemmas, parent) in Self::LEMMAS.iter().zip(parents) {
            let hyper: Vec<usize> = parent.into_iter().collect();
            b.synset(Pos::Noun, lemmas, &hyper);
        }
        b
    }

    pub fn build() -> Self {
        let (db, ids) = Self::builder().build().expect("MWN-1 fixture is valid");
        Mwn1 { db, ids }
    }

    /// Id of synset `n<k>`, 1-based.
    pub fn n(&self, k: usize) -> SynsetId {
        self.ids[k - 1]
    }

    /// Sense key of the `sense`-th (1-based) noun sense of `lemma`.
    pub fn key(&self, lemma: &str, sense: usize) -> String {
        self.db.senses_of(lemma, Pos::Noun)[sense - 1].key.as_str().to_string()
    }

    pub fn ids(&self) -> &[SynsetId] {
        &self.ids
    }
}

/// Dictionaries designed to stress the marking rule.
pub fn adversarial_dicts() -> Vec<(&'static str, DictBuilder)> {
    let mut out = Vec::new();

    // a sense that is an ancestor of a sibling sense, twice nested
    let mut b = DictBuilder::new();
    let root = b.synset(Pos::Noun, &["thing"], &[]);
    let s1 = b.synset(Pos::Noun, &["bank"], &[root]);
    let mid = b.synset(Pos::Noun, &["depository"], &[s1]);
    let s2 = b.synset(Pos::Noun, &["bank", "savings_bank"], &[mid]);
    b.synset(Pos::Noun, &["bank", "piggy_bank"], &[s2]);
    b.synset(Pos::Noun, &["bank", "riverbank"], &[root]);
    out.push(("ancestor-senses", b));

    // senses that share the whole chain except themselves
    let mut b = DictBuilder::new();
    let root = b.synset(Pos::Noun, &["entity"], &[]);
    let a = b.synset(Pos::Noun, &["abstraction"], &[root]);
    let leaf1 = b.synset(Pos::Noun, &["key"], &[a]);
    let leaf2 = b.synset(Pos::Noun, &["key", "tonality"], &[a]);
    b.synset(Pos::Noun, &["key", "answer_key"], &[a]);
    b.synset(Pos::Noun, &["pitch"], &[leaf1]);
    b.synset(Pos::Noun, &["pitch", "tone"], &[leaf2]);
    out.push(("shared-chain", b));

    // multiple hypernyms, a hypernym cycle, and a verb hierarchy
    let mut b = DictBuilder::new();
    let r1 = b.synset(Pos::Noun, &["entity"], &[]);
    let r2 = b.synset(Pos::Noun, &["abstract_entity"], &[]);
    let x = b.synset(Pos::Noun, &["person"], &[r1, r2]);
    let y = b.synset(Pos::Noun, &["agent"], &[r2, r1]);
    // c1 and c2 are each other's first-listed hypernym
    let c1 = b.synset(Pos::Noun, &["cycler"], &[]);
    let c2 = b.synset(Pos::Noun, &["cycler", "loop"], &[c1]);
    b.add_hypernym(c1, c2);
    b.add_hypernym(c1, x);
    b.synset(Pos::Noun, &["cycler", "agent_of_change"], &[y]);
    let v_root = b.synset(Pos::Verb, &["think"], &[]);
    let v_mid = b.synset(Pos::Verb, &["reason"], &[v_root]);
    let v_a = b.synset(Pos::Verb, &["compute", "calculate"], &[v_mid]);
    b.synset(Pos::Verb, &["add", "calculate"], &[v_a]);
    b.synset(Pos::Verb, &["calculate", "count_on"], &[v_root]);
    b.synset(Pos::Adj, &["good"], &[]);
    b.synset(Pos::AdjSat, &["good", "well"], &[]);
    out.push(("dag-cycle-mixed-pos", b));

    out
}

/// Random noun forest with polysemous words, for property tests.
///
/// Each synset picks a random earlier synset as first hypernym (or is a
/// root), sometimes a second hypernym, and draws one or two lemmas from a
/// small pool so that words become polysemous.
pub fn random_dict(seed: u64, n_synsets: usize, pool: usize) -> DictBuilder {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = DictBuilder::new();
    let pool = pool.max(1);
    for i in 0..n_synsets {
        let mut hyper = Vec::new();
        if i > 0 && rng.gen_bool(0.85) {
            hyper.push(rng.gen_range(0..i));
            if i > 1 && rng.gen_bool(0.2) {
                let second = rng.gen_range(0..i);
                if second != hyper[0] {
                    hyper.push(second);
                }
            }
        }
        let first = format!("w{}", rng.gen_range(0..pool));
        let mut lemmas = vec![first];
        if rng.gen_bool(0.3) {
            let second = format!("w{}", rng.gen_range(0..pool));
            if !lemmas.contains(&second) {
                lemmas.push(second);
            }
        }
        let refs: Vec<&str> = lemmas.iter().map(String::as_str).collect();
        b.synset(Pos::Noun, &refs, &hyper);
    }
    b
}

const ANIMAL_WORDS: [&str; 12] =
    ["the", "cat", "chased", "a", "small", "grey", "in", "barn", "cheese", "tail", "squeaked", "field"];
const DEVICE_WORDS: [&str; 12] =
    ["click", "the", "left", "button", "of", "usb", "cursor", "screen", "scroll", "wheel", "laptop", "wireless"];

/// Seeded sense-annotated sentences over MWN-1. Each sentence is either about
/// animals or about computers; it holds one `mouse` in the matching sense, one
/// more annotated noun from the same branch, and unannotated context words.
/// Gold keys only; run a converter to obtain tags.
pub fn mouse_corpus(f: &Mwn1, n: usize, seed: u64) -> Vec<Sentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let animal = i % 2 == 0;
            let (words, sense, nouns): (&[&str], usize, [&str; 2]) = if animal {
                (&ANIMAL_WORDS, 1, ["rodent", "organism"])
            } else {
                (&DEVICE_WORDS, 2, ["device", "artifact"])
            };
            let len = rng.gen_range(3..=7);
            let mut tokens: Vec<Token> = (0..len).map(|_| Token::new(words[rng.gen_range(0..words.len())])).collect();
            let noun = nouns[rng.gen_range(0..2)];
            let at = rng.gen_range(0..=tokens.len());
            tokens.insert(at, Token::new(noun).with_annotation(noun, "NN", &[&f.key(noun, 1)]));
            let at = rng.gen_range(0..=tokens.len());
            tokens.insert(at, Token::new("mouse").with_annotation("mouse", "NN", &[&f.key("mouse", sense)]));
            Sentence::new(tokens)
        })
        .collect()
}

/// Evaluation sentences for [`mouse_corpus`] models: fresh mouse sentences
/// plus words whose tags only a compressed vocabulary covers.
pub fn mouse_eval_corpus(f: &Mwn1, n: usize, seed: u64) -> Vec<Sentence> {
    let mut sentences = mouse_corpus(f, n, seed);
    let extra = [("living_thing", "squeaked"), ("electronic_device", "usb"), ("placental", "barn")];
    for (i, (lemma, context)) in extra.into_iter().enumerate() {
        sentences.push(Sentence::new(vec![
            Token::new(context),
            Token::new(lemma).with_annotation(lemma, "NN", &[&f.key(lemma, 1)]),
        ]));
        if i == 0 {
            sentences.push(Sentence::new(vec![Token::new("gerbil").with_annotation(
                "gerbil",
                "NN",
                &["gerbil%1:05:00::"],
            )]));
        }
    }
    sentences
}
