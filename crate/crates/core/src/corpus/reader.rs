use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::Arc;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::{
    Attrs, CorpusError, Division, Sentence, Token, ATTR_CONVERTED, ATTR_LEMMA, ATTR_POS, ATTR_SENSE_KEY, ATTR_SURFACE,
};

/// Streaming reader yielding one [`Sentence`] at a time.
pub struct CorpusReader<R: BufRead> {
    xml: Reader<R>,
    buf: Vec<u8>,
    corpus_attrs: Attrs,
    document: Option<Division>,
    paragraph: Option<Division>,
    n_documents: usize,
    n_paragraphs: usize,
    done: bool,
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<CorpusReader<BufReader<File>>, CorpusError> {
    CorpusReader::new(BufReader::new(File::open(path)?))
}

fn split_keys(value: &str) -> Vec<String> {
    value.split(';').map(str::trim).filter(|k| !k.is_empty()).map(str::to_string).collect()
}

impl<R: BufRead> CorpusReader<R> {
    /// Reads up to the `corpus` start tag.
    pub fn new(source: R) -> Result<Self, CorpusError> {
        let mut xml = Reader::from_reader(source);
        xml.config_mut().trim_text(true);
        let mut reader = CorpusReader {
            xml,
            buf: Vec::new(),
            corpus_attrs: Vec::new(),
            document: None,
            paragraph: None,
            n_documents: 0,
            n_paragraphs: 0,
            done: false,
        };
        loop {
            reader.buf.clear();
            match reader.xml.read_event_into(&mut reader.buf) {
                Ok(Event::Start(e)) if e.name().as_ref() == b"corpus" => {
                    let e = e.into_owned();
                    reader.corpus_attrs = reader.attributes(&e)?;
                    return Ok(reader);
                }
                Ok(Event::Empty(e)) if e.name().as_ref() == b"corpus" => {
                    let e = e.into_owned();
                    reader.corpus_attrs = reader.attributes(&e)?;
                    reader.done = true;
                    return Ok(reader);
                }
                Ok(Event::Decl(_) | Event::Comment(_) | Event::DocType(_) | Event::PI(_) | Event::Text(_)) => {}
                Ok(Event::Eof) => return Err(reader.error("no <corpus> element")),
                Ok(_) => return Err(reader.error("expected <corpus> root element")),
                Err(e) => return Err(reader.error(e)),
            }
        }
    }

    pub fn corpus_attrs(&self) -> &Attrs {
        &self.corpus_attrs
    }

    fn error(&self, msg: impl std::fmt::Display) -> CorpusError {
        CorpusError::Xml { offset: self.xml.buffer_position(), msg: msg.to_string() }
    }

    fn attributes(&self, e: &BytesStart<'_>) -> Result<Attrs, CorpusError> {
        let mut out = Vec::new();
        for attr in e.attributes() {
            let attr = attr.map_err(|err| self.error(err))?;
            let key = String::from_utf8_lossy(attr.key.as_ref()).into_owned();
            let value = attr.unescape_value().map_err(|err| self.error(err))?.into_owned();
            out.push((key, value));
        }
        Ok(out)
    }

    fn token(&self, e: &BytesStart<'_>) -> Result<Token, CorpusError> {
        let mut token = Token::default();
        let mut has_surface = false;
        for (key, value) in self.attributes(e)? {
            match key.as_str() {
                ATTR_SURFACE => {
                    token.surface = value;
                    has_surface = true;
                }
                ATTR_LEMMA => token.lemma = Some(value),
                ATTR_POS => token.pos = Some(value),
                ATTR_SENSE_KEY => token.gold_keys = split_keys(&value),
                ATTR_CONVERTED => token.converted = split_keys(&value),
                _ => token.attrs.push((key, value)),
            }
        }
        if !has_surface {
            return Err(self.error("<word> without surface_form"));
        }
        Ok(token)
    }

    fn next_sentence(&mut self) -> Result<Option<Sentence>, CorpusError> {
        let mut sentence: Option<Sentence> = None;
        loop {
            if self.done {
                return match sentence {
                    Some(_) => Err(self.error("unterminated <sentence>")),
                    None => Ok(None),
                };
            }
            self.buf.clear();
            let event = self
                .xml
                .read_event_into(&mut self.buf)
                .map_err(|e| CorpusError::Xml { offset: self.xml.error_position(), msg: e.to_string() })?;
            match event {
                Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"word" => {
                    let e = e.into_owned();
                    let token = self.token(&e)?;
                    match sentence.as_mut() {
                        Some(s) => s.tokens.push(token),
                        None => return Err(self.error("<word> outside of <sentence>")),
                    }
                }
                Event::End(e) if e.name().as_ref() == b"word" => {}
                Event::Start(e) => {
                    let e = e.into_owned();
                    self.open(&e, &mut sentence)?;
                }
                Event::Empty(e) => {
                    let e = e.into_owned();
                    self.open(&e, &mut sentence)?;
                    if let Some(s) = self.close(e.name().as_ref(), &mut sentence)? {
                        return Ok(Some(s));
                    }
                }
                Event::End(e) => {
                    let name = e.name().as_ref().to_vec();
                    if let Some(s) = self.close(&name, &mut sentence)? {
                        return Ok(Some(s));
                    }
                }
                Event::Eof => {
                    self.done = true;
                    if sentence.is_some() {
                        return Err(self.error("unexpected end of file inside <sentence>"));
                    }
                    return Err(self.error("unexpected end of file: missing </corpus>"));
                }
                _ => {}
            }
        }
    }

    fn open(&mut self, e: &BytesStart<'_>, sentence: &mut Option<Sentence>) -> Result<(), CorpusError> {
        match e.name().as_ref() {
            b"document" => {
                self.document = Some(Division { index: self.n_documents, attrs: Arc::new(self.attributes(e)?) });
                self.n_documents += 1;
            }
            b"paragraph" => {
                self.paragraph = Some(Division { index: self.n_paragraphs, attrs: Arc::new(self.attributes(e)?) });
                self.n_paragraphs += 1;
            }
            b"sentence" => {
                if sentence.is_some() {
                    return Err(self.error("nested <sentence>"));
                }
                *sentence = Some(Sentence {
                    tokens: Vec::new(),
                    attrs: self.attributes(e)?,
                    document: self.document.clone(),
                    paragraph: self.paragraph.clone(),
                });
            }
            b"corpus" => return Err(self.error("nested <corpus>")),
            _ => {}
        }
        Ok(())
    }

    fn close(&mut self, name: &[u8], sentence: &mut Option<Sentence>) -> Result<Option<Sentence>, CorpusError> {
        match name {
            b"sentence" => match sentence.take() {
                Some(s) => Ok(Some(s)),
                None => Err(self.error("</sentence> without <sentence>")),
            },
            b"paragraph" => {
                self.paragraph = None;
                Ok(None)
            }
            b"document" => {
                self.document = None;
                self.paragraph = None;
                Ok(None)
            }
            b"corpus" => {
                self.done = true;
                Ok(None)
            }
            _ => Ok(None),
        }
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = Result<Sentence, CorpusError>;

    fn next(&mut self) -> Option<Self::Item> {
        match self.next_sentence() {
            Ok(Some(s)) => Some(Ok(s)),
            Ok(None) => None,
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}
