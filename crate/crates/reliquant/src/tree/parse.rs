//! Line-oriented fault-tree file format.
//!
//! ```text
//! # comment
//! event <id> p=<decimal-or-scientific> ["label"]
//! gate <id> <and|or> <child-id> <child-id> [...]
//! top <id>
//! ```
//!
//! Declarations may appear in any order; references are resolved after the
//! whole document has been read.

use super::{BasicEvent, FaultTree, Gate, GateKind, TreeError};

struct Cursor<'a> {
    line: &'a str,
    lineno: usize,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.line[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn err(&self, message: impl Into<String>) -> TreeError {
        TreeError::Syntax { line: self.lineno, column: self.pos + 1, message: message.into() }
    }

    /// Next whitespace-delimited token, or None at end of line / comment.
    fn token(&mut self) -> Option<(&'a str, usize)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.line[start..];
        if rest.is_empty() || rest.starts_with('#') {
            return None;
        }
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        self.pos = start + end;
        Some((&rest[..end], start))
    }

    /// A double-quoted string with `\"` and `\\` escapes.
    fn quoted(&mut self) -> Result<Option<String>, TreeError> {
        self.skip_ws();
        let rest = &self.line[self.pos..];
        if rest.is_empty() || rest.starts_with('#') {
            return Ok(None);
        }
        if !rest.starts_with('"') {
            return Err(self.err("expected a quoted label"));
        }
        let mut out = String::new();
        let mut chars = rest[1..].char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.pos += 1 + i + 1;
                    return Ok(Some(out));
                }
                '\\' => match chars.next() {
                    Some((_, e @ ('"' | '\\'))) => out.push(e),
                    _ => return Err(self.err("invalid escape in label")),
                },
                _ => out.push(c),
            }
        }
        Err(self.err("unterminated label"))
    }

    fn end_of_line(&mut self) -> Result<(), TreeError> {
        match self.token() {
            None => Ok(()),
            Some((tok, col)) => Err(TreeError::Syntax {
                line: self.lineno,
                column: col + 1,
                message: format!("unexpected trailing token `{tok}`"),
            }),
        }
    }
}

fn check_id(id: &str, c: &Cursor, col: usize) -> Result<(), TreeError> {
    let ok = !id.is_empty()
        && id.chars().all(|ch| ch.is_ascii_alphanumeric() || ch == '_' || ch == '-' || ch == '.');
    if ok {
        Ok(())
    } else {
        Err(TreeError::Syntax {
            line: c.lineno,
            column: col + 1,
            message: format!("invalid identifier `{id}`"),
        })
    }
}

/// Parse and validate a fault-tree document.
pub fn parse_fault_tree(text: &str) -> Result<FaultTree, TreeError> {
    let mut events: Vec<BasicEvent> = Vec::new();
    let mut gates: Vec<Gate> = Vec::new();
    let mut top: Option<String> = None;
    let mut seen_ids: std::collections::BTreeSet<String> = Default::default();

    for (lineno, line) in text.lines().enumerate() {
        let mut c = Cursor { line, lineno: lineno + 1, pos: 0 };
        let Some((keyword, _)) = c.token() else { continue };
        match keyword {
            "event" => {
                let (id, idcol) =
                    c.token().ok_or_else(|| c.err("expected event id"))?;
                check_id(id, &c, idcol)?;
                let (ptok, pcol) =
                    c.token().ok_or_else(|| c.err("expected p=<probability>"))?;
                let Some(value) = ptok.strip_prefix("p=") else {
                    return Err(TreeError::Syntax {
                        line: c.lineno,
                        column: pcol + 1,
                        message: format!("expected p=<probability>, found `{ptok}`"),
                    });
                };
                let probability: f64 = value.parse().map_err(|_| TreeError::Syntax {
                    line: c.lineno,
                    column: pcol + 3,
                    message: format!("invalid probability `{value}`"),
                })?;
                if probability.is_nan() || !(0.0..=1.0).contains(&probability) {
                    return Err(TreeError::ProbabilityOutOfRange {
                        id: id.to_string(),
                        probability,
                    });
                }
                let label = c.quoted()?;
                c.end_of_line()?;
                if !seen_ids.insert(id.to_string()) {
                    return Err(TreeError::DuplicateId { id: id.to_string() });
                }
                events.push(BasicEvent { id: id.to_string(), probability, label });
            }
            "gate" => {
                let (id, idcol) = c.token().ok_or_else(|| c.err("expected gate id"))?;
                check_id(id, &c, idcol)?;
                let (kind_tok, kcol) =
                    c.token().ok_or_else(|| c.err("expected gate kind `and` or `or`"))?;
                let kind = match kind_tok {
                    "and" => GateKind::And,
                    "or" => GateKind::Or,
                    other => {
                        return Err(TreeError::Syntax {
                            line: c.lineno,
                            column: kcol + 1,
                            message: format!("unknown gate kind `{other}` (expected and/or)"),
                        })
                    }
                };
                let mut children = Vec::new();
                while let Some((child, ccol)) = c.token() {
                    check_id(child, &c, ccol)?;
                    children.push(child.to_string());
                }
                if !seen_ids.insert(id.to_string()) {
                    return Err(TreeError::DuplicateId { id: id.to_string() });
                }
                gates.push(Gate { id: id.to_string(), kind, children });
            }
            "top" => {
                let (id, idcol) = c.token().ok_or_else(|| c.err("expected top id"))?;
                check_id(id, &c, idcol)?;
                c.end_of_line()?;
                top = Some(id.to_string());
            }
            other => {
                return Err(TreeError::Syntax {
                    line: c.lineno,
                    column: 1,
                    message: format!("unknown directive `{other}`"),
                })
            }
        }
    }

    let top = top.ok_or(TreeError::MissingTop)?;
    FaultTree::new(events, gates, top)
}
