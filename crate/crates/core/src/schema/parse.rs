use super::inventory::is_tag_char;
use super::{FeatureBundle, FeatureNode, FeatureTag, Inventory, SchemaError};

/// How unknown tags are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Unknown tags and misplaced children are errors.
    Strict,
    /// Unknown tags become atomic tags of the `Unknown` dimension.
    #[default]
    Lax,
}

/// Parses a feature string.
///
/// ```text
/// bundle := node (';' node)*
/// node   := TAG | TAG '(' inner ')'
/// inner  := node ((';' | ',') node)*
/// ```
///
/// Tags are case-insensitive and stored uppercase; whitespace around tags is
/// ignored.
pub fn parse_features(
    text: &str,
    inventory: &Inventory,
    mode: ParseMode,
) -> Result<FeatureBundle, SchemaError> {
    if text.trim().is_empty() {
        return Err(SchemaError::EmptyInput);
    }
    let mut parser = Parser {
        src: text,
        pos: 0,
        inventory,
        mode,
    };
    let nodes = parser.list(true)?;
    FeatureBundle::new(nodes)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    inventory: &'a Inventory,
    mode: ParseMode,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn list(&mut self, top: bool) -> Result<Vec<FeatureNode>, SchemaError> {
        let mut nodes = Vec::new();
        loop {
            nodes.push(self.node()?);
            self.skip_ws();
            match self.peek() {
                Some(';') => self.bump(),
                Some(',') if !top => self.bump(),
                Some(')') if !top => {
                    self.bump();
                    return Ok(nodes);
                }
                None if top => return Ok(nodes),
                Some(')') | None => {
                    return Err(SchemaError::UnbalancedParentheses { offset: self.pos })
                }
                Some(c) => {
                    return Err(SchemaError::InvalidCharacter {
                        character: c,
                        offset: self.pos,
                    })
                }
            }
        }
    }

    fn node(&mut self) -> Result<FeatureNode, SchemaError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if is_tag_char(c)) {
            self.bump();
        }
        if start == self.pos {
            return Err(match self.peek() {
                None | Some(';') | Some(',') | Some(')') | Some('(') => {
                    SchemaError::EmptyComponent { offset: self.pos }
                }
                Some(c) => SchemaError::InvalidCharacter {
                    character: c,
                    offset: self.pos,
                },
            });
        }
        let head = self.tag(&self.src[start..self.pos])?;
        self.skip_ws();
        if self.peek() != Some('(') {
            return Ok(FeatureNode::atom(head));
        }
        self.bump();
        self.skip_ws();
        if self.peek() == Some(')') {
            return Err(SchemaError::EmptyComponent { offset: self.pos });
        }
        if self.mode == ParseMode::Strict && !head.may_take_children() {
            return Err(SchemaError::CompositeHeadNotAllowed(
                head.text().to_string(),
            ));
        }
        let children = self.list(false)?;
        Ok(FeatureNode::composite(head, children))
    }

    fn tag(&self, text: &str) -> Result<FeatureTag, SchemaError> {
        match self.mode {
            ParseMode::Strict => self.inventory.require(text),
            ParseMode::Lax => self.inventory.lookup_or_unknown(text),
        }
    }
}
