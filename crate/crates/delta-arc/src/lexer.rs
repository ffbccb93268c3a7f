//! Tokeniser for the `.arc`, `.delta`, `.deltacfg` and `.types` surface
//! syntax. Keywords are contextual, so the lexer only distinguishes names,
//! literals and punctuation; `//` and `/* */` comments are skipped.

use std::sync::Arc;

use crate::diag::{Code, Diagnostic, Loc};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Name(String),
    Int(i64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Dot,
    Arrow,
    Assign,
    Bang,
    AndAnd,
    OrOr,
    Eof,
}

impl TokenKind {
    /// Human-readable token description for error messages.
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Name(n) => format!("`{n}`"),
            TokenKind::Int(i) => format!("`{i}`"),
            TokenKind::Str(_) => "string literal".to_string(),
            TokenKind::LBrace => "`{`".to_string(),
            TokenKind::RBrace => "`}`".to_string(),
            TokenKind::LParen => "`(`".to_string(),
            TokenKind::RParen => "`)`".to_string(),
            TokenKind::Comma => "`,`".to_string(),
            TokenKind::Semi => "`;`".to_string(),
            TokenKind::Dot => "`.`".to_string(),
            TokenKind::Arrow => "`->`".to_string(),
            TokenKind::Assign => "`=`".to_string(),
            TokenKind::Bang => "`!`".to_string(),
            TokenKind::AndAnd => "`&&`".to_string(),
            TokenKind::OrOr => "`||`".to_string(),
            TokenKind::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub loc: Loc,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    file: Arc<str>,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str, file: Arc<str>) -> Self {
        Lexer { chars: text.chars().peekable(), file, line: 1, column: 1 }
    }

    fn loc(&self) -> Loc {
        Loc { file: self.file.clone(), line: self.line, column: self.column }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn error(&self, loc: Loc, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(Code::ParseSyntax, loc, msg)
    }

    fn skip_trivia(&mut self) -> Result<(), Diagnostic> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') => {
                    let start = self.loc();
                    let mut clone = self.chars.clone();
                    clone.next();
                    match clone.peek() {
                        Some('/') => {
                            while let Some(c) = self.peek() {
                                if c == '\n' {
                                    break;
                                }
                                self.bump();
                            }
                        }
                        Some('*') => {
                            self.bump();
                            self.bump();
                            let mut closed = false;
                            while let Some(c) = self.bump() {
                                if c == '*' && self.peek() == Some('/') {
                                    self.bump();
                                    closed = true;
                                    break;
                                }
                            }
                            if !closed {
                                return Err(self.error(start, "unterminated block comment"));
                            }
                        }
                        _ => return Ok(()),
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<Token, Diagnostic> {
        self.skip_trivia()?;
        let loc = self.loc();
        let Some(c) = self.peek() else {
            return Ok(Token { kind: TokenKind::Eof, loc });
        };
        let kind = match c {
            '{' => {
                self.bump();
                TokenKind::LBrace
            }
            '}' => {
                self.bump();
                TokenKind::RBrace
            }
            '(' => {
                self.bump();
                TokenKind::LParen
            }
            ')' => {
                self.bump();
                TokenKind::RParen
            }
            ',' => {
                self.bump();
                TokenKind::Comma
            }
            ';' => {
                self.bump();
                TokenKind::Semi
            }
            '.' => {
                self.bump();
                TokenKind::Dot
            }
            '=' => {
                self.bump();
                TokenKind::Assign
            }
            '!' => {
                self.bump();
                TokenKind::Bang
            }
            '-' => {
                self.bump();
                if self.peek() == Some('>') {
                    self.bump();
                    TokenKind::Arrow
                } else {
                    return Err(self.error(loc, "expected `->`"));
                }
            }
            '&' => {
                self.bump();
                if self.peek() == Some('&') {
                    self.bump();
                    TokenKind::AndAnd
                } else {
                    return Err(self.error(loc, "expected `&&`"));
                }
            }
            '|' => {
                self.bump();
                if self.peek() == Some('|') {
                    self.bump();
                    TokenKind::OrOr
                } else {
                    return Err(self.error(loc, "expected `||`"));
                }
            }
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        Some('"') => break,
                        Some('\n') | None => {
                            return Err(self.error(loc, "unterminated string literal"))
                        }
                        Some(c) => s.push(c),
                    }
                }
                TokenKind::Str(s)
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                let value: i64 = s
                    .parse()
                    .map_err(|_| self.error(loc.clone(), format!("integer literal `{s}` out of range")))?;
                TokenKind::Int(value)
            }
            c if c.is_ascii_alphabetic() => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                TokenKind::Name(s)
            }
            other => return Err(self.error(loc, format!("unexpected character `{other}`"))),
        };
        Ok(Token { kind, loc })
    }
}

/// Tokenises `text`, attributing every token (and error) to `file`.
pub fn lex(text: &str, file: &Arc<str>) -> Result<Vec<Token>, Diagnostic> {
    let mut lx = Lexer::new(text, file.clone());
    let mut tokens = Vec::new();
    loop {
        let t = lx.next_token()?;
        let done = t.kind == TokenKind::Eof;
        tokens.push(t);
        if done {
            return Ok(tokens);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        lex(text, &Arc::from("t.arc")).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn punctuation_and_names_tokenise() {
        assert_eq!(
            kinds("connect a -> b.c;"),
            vec![
                TokenKind::Name("connect".into()),
                TokenKind::Name("a".into()),
                TokenKind::Arrow,
                TokenKind::Name("b".into()),
                TokenKind::Dot,
                TokenKind::Name("c".into()),
                TokenKind::Semi,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn comments_are_skipped_and_locations_tracked() {
        let toks = lex("// line\n/* block\nspanning */ x", &Arc::from("t.arc")).unwrap();
        assert_eq!(toks[0].kind, TokenKind::Name("x".into()));
        assert_eq!((toks[0].loc.line, toks[0].loc.column), (3, 13));
    }

    #[test]
    fn unterminated_block_comment_is_a_located_error() {
        let err = lex("x /* open", &Arc::from("t.arc")).unwrap_err();
        assert_eq!(err.code, Code::ParseSyntax);
        assert_eq!(err.loc.column, 3);
    }

    #[test]
    fn stray_characters_are_rejected() {
        assert!(lex("a # b", &Arc::from("t.arc")).is_err());
        assert!(lex("a - b", &Arc::from("t.arc")).is_err());
    }
}
