use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use quick_xml::escape::escape;

use super::{
    Attrs, CorpusError, Division, Sentence, ATTR_CONVERTED, ATTR_LEMMA, ATTR_POS, ATTR_SENSE_KEY, ATTR_SURFACE,
};

/// Streaming corpus writer. Document and paragraph elements are opened and
/// closed as the divisions of consecutive sentences change.
pub struct CorpusWriter<W: Write> {
    out: W,
    document: Option<usize>,
    paragraph: Option<usize>,
}

fn write_attrs<W: Write>(out: &mut W, attrs: &[(String, String)]) -> io::Result<()> {
    for (k, v) in attrs {
        write!(out, " {}=\"{}\"", k, escape(v.as_str()))?;
    }
    Ok(())
}

impl<W: Write> CorpusWriter<W> {
    pub fn new(mut out: W, corpus_attrs: &Attrs) -> io::Result<Self> {
        out.write_all(b"<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<corpus")?;
        write_attrs(&mut out, corpus_attrs)?;
        out.write_all(b">\n")?;
        Ok(CorpusWriter { out, document: None, paragraph: None })
    }

    fn close_paragraph(&mut self) -> io::Result<()> {
        if self.paragraph.take().is_some() {
            self.out.write_all(b"</paragraph>\n")?;
        }
        Ok(())
    }

    fn close_document(&mut self) -> io::Result<()> {
        self.close_paragraph()?;
        if self.document.take().is_some() {
            self.out.write_all(b"</document>\n")?;
        }
        Ok(())
    }

    fn open(&mut self, name: &str, division: &Division) -> io::Result<()> {
        write!(self.out, "<{name}")?;
        write_attrs(&mut self.out, &division.attrs)?;
        self.out.write_all(b">\n")
    }

    pub fn write_sentence(&mut self, sentence: &Sentence) -> io::Result<()> {
        let doc = sentence.document.as_ref().map(|d| d.index);
        let para = sentence.paragraph.as_ref().map(|p| p.index);
        if doc != self.document {
            self.close_document()?;
            if let Some(d) = &sentence.document {
                self.open("document", d)?;
                self.document = doc;
            }
        }
        if para != self.paragraph {
            self.close_paragraph()?;
            if let Some(p) = &sentence.paragraph {
                self.open("paragraph", p)?;
                self.paragraph = para;
            }
        }

        self.out.write_all(b"<sentence")?;
        write_attrs(&mut self.out, &sentence.attrs)?;
        self.out.write_all(b">\n")?;
        for token in &sentence.tokens {
            write!(self.out, "<word {ATTR_SURFACE}=\"{}\"", escape(token.surface.as_str()))?;
            if let Some(lemma) = &token.lemma {
                write!(self.out, " {ATTR_LEMMA}=\"{}\"", escape(lemma.as_str()))?;
            }
            if let Some(pos) = &token.pos {
                write!(self.out, " {ATTR_POS}=\"{}\"", escape(pos.as_str()))?;
            }
            if !token.gold_keys.is_empty() {
                write!(self.out, " {ATTR_SENSE_KEY}=\"{}\"", escape(token.gold_keys.join(";").as_str()))?;
            }
            write_attrs(&mut self.out, &token.attrs)?;
            if !token.converted.is_empty() {
                write!(self.out, " {ATTR_CONVERTED}=\"{}\"", escape(token.converted.join(";").as_str()))?;
            }
            self.out.write_all(b"/>\n")?;
        }
        self.out.write_all(b"</sentence>\n")
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.close_document()?;
        self.out.write_all(b"</corpus>\n")?;
        self.out.flush()?;
        Ok(self.out)
    }
}

/// Writes a stream of sentences to `path`, returning the sentence count.
pub fn write_corpus<I>(sentences: I, corpus_attrs: &Attrs, path: impl AsRef<Path>) -> Result<usize, CorpusError>
where
    I: IntoIterator<Item = Result<Sentence, CorpusError>>,
{
    let mut writer = CorpusWriter::new(BufWriter::new(File::create(path)?), corpus_attrs)?;
    let mut n = 0;
    for sentence in sentences {
        writer.write_sentence(&sentence?)?;
        n += 1;
    }
    writer.finish()?;
    Ok(n)
}
