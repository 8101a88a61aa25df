//! Line-oriented `key = value` configuration grammar.
//!
//! ```text
//! # comment
//! key = value        # trailing comments are allowed
//! [block]            # starts a new named block; blocks may repeat
//! key = value
//! ```
//!
//! Keys are case-sensitive identifiers (`[A-Za-z0-9_]+`). Values are the
//! trimmed remainder of the line. Entries before the first block header
//! belong to the unnamed root block.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

impl Entry {
    pub fn as_f64(&self) -> Result<f64> {
        self.value.parse::<f64>().map_err(|_| Error::Parse {
            line: self.line,
            message: format!("value for `{}` is not a number: `{}`", self.key, self.value),
        })
    }

    pub fn as_usize(&self) -> Result<usize> {
        self.value.parse::<usize>().map_err(|_| Error::Parse {
            line: self.line,
            message: format!(
                "value for `{}` is not a non-negative integer: `{}`",
                self.key, self.value
            ),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Block {
    /// `None` for the root block.
    pub name: Option<String>,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Block {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub blocks: Vec<Block>,
}

impl Document {
    pub fn root(&self) -> &Block {
        &self.blocks[0]
    }

    pub fn named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Block> + 'a {
        self.blocks
            .iter()
            .filter(move |b| b.name.as_deref() == Some(name))
    }
}

fn is_key(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse(text: &str) -> Result<Document> {
    let mut doc = Document {
        blocks: vec![Block::default()],
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').map(str::trim).ok_or(Error::Parse {
                line,
                message: format!("unterminated block header `{content}`"),
            })?;
            if !is_key(name) {
                return Err(Error::Parse {
                    line,
                    message: format!("invalid block name `{name}`"),
                });
            }
            doc.blocks.push(Block {
                name: Some(name.to_string()),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(Error::Parse {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if !is_key(key) {
            return Err(Error::Parse {
                line,
                message: format!("invalid key `{key}`"),
            });
        }
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                message: format!("missing value for `{key}`"),
            });
        }
        doc.blocks
            .last_mut()
            .expect("root block always present")
            .entries
            .push(Entry {
                key: key.to_string(),
                value: value.to_string(),
                line,
            });
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_and_repeated_blocks() {
        let doc = parse(
            "# header\nxi = 6.0  # spring\n\n[spring]\nxi = 1\nlabel = a b\n[spring]\nxi = 2\n",
        )
        .unwrap();
        assert_eq!(doc.root().get("xi").unwrap().as_f64().unwrap(), 6.0);
        let springs: Vec<_> = doc.named("spring").collect();
        assert_eq!(springs.len(), 2);
        assert_eq!(springs[0].get("label").unwrap().value, "a b");
        assert_eq!(springs[1].get("xi").unwrap().line, 8);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse("a = 1\nnot a pair\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse("\n\n[broken\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let doc = parse("x = abc").unwrap();
        match doc.root().get("x").unwrap().as_f64() {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_text_has_empty_root() {
        let doc = parse("").unwrap();
        assert!(doc.root().entries.is_empty());
    }
}
