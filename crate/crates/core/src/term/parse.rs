use super::{Annotation, Term, TermBuilder, TermError, MAX_ANNOTATION_WIDTH};
use crate::label::Label;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: {source}")]
    Invalid {
        line: usize,
        col: usize,
        #[source]
        source: TermError,
    },
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Kind {
    Empty,
    Leaf,
    Oplus,
    Relab,
    Add,
}

struct Frame {
    kind: Kind,
    line: usize,
    col: usize,
    atoms: Vec<(String, usize, usize)>,
    children: usize,
}

impl Frame {
    fn max_atoms(&self) -> usize {
        match self.kind {
            Kind::Empty | Kind::Oplus => 0,
            Kind::Leaf | Kind::Relab | Kind::Add => 2,
        }
    }

    fn max_children(&self) -> usize {
        match self.kind {
            Kind::Empty | Kind::Leaf => 0,
            Kind::Relab | Kind::Add => 1,
            Kind::Oplus => 2,
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

enum Token {
    Open,
    Close,
    Atom(String),
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Option<(Token, usize, usize)> {
        loop {
            let c = *self.chars.peek()?;
            if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
        let (line, col) = (self.line, self.col);
        let c = self.bump();
        let tok = match c {
            '(' => Token::Open,
            ')' => Token::Close,
            _ => {
                let mut s = String::from(c);
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Token::Atom(s)
            }
        };
        Some((tok, line, col))
    }

    fn bump(&mut self) -> char {
        let c = self.chars.next().expect("bump past end");
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }
}

fn syntax(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, col, msg: msg.into() }
}

fn parse_label(s: &str, line: usize, col: usize) -> Result<Label, ParseError> {
    let v: i32 = s
        .parse()
        .map_err(|_| syntax(line, col, format!("expected a nonzero integer label, found {s:?}")))?;
    Label::new(v).map_err(|_| syntax(line, col, "label 0 is not allowed"))
}

fn parse_bits(s: &str, line: usize, col: usize) -> Result<Annotation, ParseError> {
    if s.len() > MAX_ANNOTATION_WIDTH || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(syntax(line, col, format!("expected a bitstring of at most 32 bits, found {s:?}")));
    }
    let flags: Vec<bool> = s.bytes().map(|b| b == b'1').collect();
    Ok(Annotation::from_bools(&flags))
}

/// Parses a term in S-expression syntax. Never recurses, so arbitrarily
/// deep terms are fine.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut lexer = Lexer { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut builder = TermBuilder::new();
    let mut stack: Vec<Frame> = Vec::new();
    let mut done = false;

    while let Some((tok, line, col)) = lexer.next() {
        if done {
            return Err(syntax(line, col, "trailing input after term"));
        }
        match tok {
            Token::Open => {
                if let Some(top) = stack.last_mut() {
                    let ready = top.atoms.len() == top.max_atoms();
                    if !ready || top.children >= top.max_children() {
                        return Err(syntax(line, col, "unexpected subterm"));
                    }
                    top.children += 1;
                }
                let (kw, kl, kc) = match lexer.next() {
                    Some((Token::Atom(s), l, c)) => (s, l, c),
                    _ => return Err(syntax(line, col, "expected an operator after '('")),
                };
                let kind = match kw.as_str() {
                    "empty" => Kind::Empty,
                    "leaf" => Kind::Leaf,
                    "oplus" => Kind::Oplus,
                    "relab" => Kind::Relab,
                    "add" => Kind::Add,
                    _ => return Err(syntax(kl, kc, format!("unknown operator {kw:?}"))),
                };
                stack.push(Frame { kind, line, col, atoms: Vec::new(), children: 0 });
            }
            Token::Atom(s) => {
                let Some(top) = stack.last_mut() else {
                    return Err(syntax(line, col, format!("expected '(', found {s:?}")));
                };
                if top.atoms.len() >= top.max_atoms() || top.children > 0 {
                    return Err(syntax(line, col, format!("unexpected argument {s:?}")));
                }
                top.atoms.push((s, line, col));
            }
            Token::Close => {
                let Some(frame) = stack.pop() else {
                    return Err(syntax(line, col, "unbalanced ')'"));
                };
                finish_frame(&mut builder, frame, line, col)?;
                if stack.is_empty() {
                    done = true;
                }
            }
        }
    }
    if let Some(frame) = stack.last() {
        return Err(syntax(frame.line, frame.col, "unterminated term"));
    }
    if !done {
        return Err(syntax(lexer.line, lexer.col, "empty input"));
    }
    let term = builder.finish();
    term.widths()?;
    Ok(term)
}

fn finish_frame(
    builder: &mut TermBuilder,
    frame: Frame,
    line: usize,
    col: usize,
) -> Result<(), ParseError> {
    let arity_err = |what: &str| syntax(frame.line, frame.col, what.to_string());
    match frame.kind {
        Kind::Empty => {
            builder.empty();
        }
        Kind::Leaf => {
            let (label, ann) = match frame.atoms.as_slice() {
                [(l, ll, lc)] => (parse_label(l, *ll, *lc)?, Annotation::EMPTY),
                [(l, ll, lc), (b, bl, bc)] => (parse_label(l, *ll, *lc)?, parse_bits(b, *bl, *bc)?),
                _ => return Err(arity_err("leaf takes a label and an optional bitstring")),
            };
            builder.leaf_annotated(label, ann);
        }
        Kind::Oplus => {
            if frame.children != 2 {
                return Err(syntax(line, col, "oplus takes exactly two subterms"));
            }
            builder.oplus();
        }
        Kind::Relab | Kind::Add => {
            if frame.atoms.len() != 2 || frame.children != 1 {
                return Err(arity_err("relab/add take two labels and one subterm"));
            }
            let (a, al, ac) = &frame.atoms[0];
            let (b, bl, bc) = &frame.atoms[1];
            let a = parse_label(a, *al, *ac)?;
            let b = parse_label(b, *bl, *bc)?;
            let res = if frame.kind == Kind::Relab { builder.relab(a, b) } else { builder.add(a, b) };
            res.map_err(|source| ParseError::Invalid { line: frame.line, col: frame.col, source })?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::Symbol;

    #[test]
    fn parses_basic_forms() {
        let t = parse_term("(add 1 -1 (oplus (leaf 1) (leaf -1)))").unwrap();
        assert_eq!(t.len(), 4);
        assert!(matches!(t.symbol(t.root()), Symbol::Add { .. }));
        assert_eq!(parse_term("  (empty)\n").unwrap(), Term::empty());
    }

    #[test]
    fn rejects_add_within_sort() {
        let err = parse_term("(add 1 2 (leaf 1))").unwrap_err();
        assert!(matches!(err, ParseError::Invalid { source: TermError::AddWithinSort { .. }, .. }));
    }

    #[test]
    fn rejects_relab_across_sorts() {
        assert!(parse_term("(relab 1 -1 (leaf 1))").is_err());
    }

    #[test]
    fn reports_line_and_column() {
        let err = parse_term("(oplus (leaf 1)\n  (laef 2))").unwrap_err();
        assert_eq!(err, ParseError::Syntax { line: 2, col: 4, msg: "unknown operator \"laef\"".into() });
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "(leaf 0)",
            "(leaf 1",
            "(leaf 1))",
            "(oplus (leaf 1))",
            "(leaf 1 012)",
            "(add 1 -1)",
            "(empty) (empty)",
            "(add 1 (leaf 1) -1)",
            "leaf",
        ] {
            assert!(parse_term(bad).is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn rejects_width_mismatch() {
        let err = parse_term("(oplus (leaf 1 1) (leaf 2 10))").unwrap_err();
        assert!(matches!(err, ParseError::Term(TermError::WidthMismatch { .. })));
    }
}
