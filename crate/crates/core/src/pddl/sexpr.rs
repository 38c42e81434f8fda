use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

/// An s-expression with identifiers lowercased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom(String, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(s, _) => Some(s),
            SExpr::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    /// The leading atom of a list, e.g. `and` in `(and ...)`.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        let p = self.pos();
        Error::Parse { line: p.line, col: p.col, message: message.into() }
    }

    pub fn expect_atom(&self, what: &str) -> Result<&str> {
        self.as_atom().ok_or_else(|| self.error(format!("expected {what}")))
    }

    pub fn expect_list(&self, what: &str) -> Result<&[SExpr]> {
        self.as_list().ok_or_else(|| self.error(format!("expected {what}")))
    }
}

/// Parses every top-level s-expression in `text`. `;` starts a line comment.
pub fn parse_all(text: &str) -> Result<Vec<SExpr>> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.char_indices().peekable();
    let mut line = 1;
    let mut line_start = 0;
    while let Some(&(i, c)) = chars.peek() {
        let pos = Pos { line, col: text[line_start..i].chars().count() + 1 };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                line_start = i + 1;
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            ';' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                stack.push((Vec::new(), pos));
            }
            ')' => {
                chars.next();
                let (items, open) = stack.pop().ok_or(Error::Parse {
                    line: pos.line,
                    col: pos.col,
                    message: "unbalanced `)`".into(),
                })?;
                let e = SExpr::List(items, open);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(e),
                    None => top.push(e),
                }
            }
            _ => {
                let start = i;
                let mut end = i;
                while let Some(&(j, c)) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    end = j + c.len_utf8();
                    chars.next();
                }
                let e = SExpr::Atom(text[start..end].to_lowercase(), pos);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(e),
                    None => top.push(e),
                }
            }
        }
    }
    if let Some((_, open)) = stack.last() {
        return Err(Error::Parse {
            line: open.line,
            col: open.col,
            message: "unclosed `(`".into(),
        });
    }
    Ok(top)
}

/// Parses exactly one top-level expression.
pub fn parse_one(text: &str) -> Result<SExpr> {
    let mut all = parse_all(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(Error::Parse { line: 1, col: 1, message: "empty input".into() }),
        _ => {
            let p = all[1].pos();
            Err(Error::Parse {
                line: p.line,
                col: p.col,
                message: "trailing content after first expression".into(),
            })
        }
    }
}

/// Splits a typed list `a b - t c - u d` into `(name, type)` pairs; names
/// without a type get `default`.
pub fn typed_list(items: &[SExpr], default: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let tok = items[i].expect_atom("name")?;
        if tok == "-" {
            let ty = items
                .get(i + 1)
                .ok_or_else(|| items[i].error("missing type after `-`"))?;
            if ty.head() == Some("either") {
                return Err(Error::UnsupportedFeature("either".into()));
            }
            let ty = ty.expect_atom("type name")?;
            if pending.is_empty() {
                return Err(items[i].error("`-` without preceding names"));
            }
            out.extend(pending.drain(..).map(|n| (n, ty.to_string())));
            i += 2;
        } else {
            pending.push(tok.to_string());
            i += 1;
        }
    }
    out.extend(pending.into_iter().map(|n| (n, default.to_string())));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_case() {
        let e = parse_one("(Define\n  (Domain X))").unwrap();
        let items = e.as_list().unwrap();
        assert_eq!(items[0].as_atom(), Some("define"));
        assert_eq!(items[1].pos(), Pos { line: 2, col: 3 });
        assert_eq!(items[1].as_list().unwrap()[1].as_atom(), Some("x"));
    }

    #[test]
    fn comments_are_skipped() {
        let all = parse_all("; header\n(a) ; trailing\n(b)").unwrap();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn unbalanced_input_reports_position() {
        match parse_all("(a\n (b)") {
            Err(Error::Parse { line: 1, col: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_all("(a))") {
            Err(Error::Parse { line: 1, col: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn typed_lists() {
        let e = parse_one("(a b - t c)").unwrap();
        let got = typed_list(e.as_list().unwrap(), "object").unwrap();
        assert_eq!(
            got,
            vec![
                ("a".into(), "t".into()),
                ("b".into(), "t".into()),
                ("c".into(), "object".into())
            ]
        );
    }
}
