use std::rc::Rc;

use crate::error::{Error, Pos, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Number(f64),
    Str(Rc<str>),
    Ident(Rc<str>),
    Keyword(&'static str),
    Punct(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const KEYWORDS: &[&str] = &[
    "var",
    "function",
    "if",
    "else",
    "while",
    "return",
    "true",
    "false",
    "null",
    "undefined",
];

// Longest first so that maximal munch works by linear scan.
const PUNCTS: &[&str] = &[
    "===", "!==", "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "{", "}", "(", ")", "[", "]",
    ";", ",", ".", ":", "=", "+", "-", "*", "/", "<", ">", "!",
];

struct Lexer<'a> {
    src: &'a [u8],
    text: &'a str,
    i: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn peek(&self, off: usize) -> Option<u8> {
        self.src.get(self.i + off).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.text[self.i..].chars().next()?;
        self.i += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) -> Result<()> {
        loop {
            match (self.peek(0), self.peek(1)) {
                (Some(c), _) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                (Some(b'/'), Some(b'/')) => {
                    while !matches!(self.peek(0), None | Some(b'\n')) {
                        self.bump();
                    }
                }
                (Some(b'/'), Some(b'*')) => {
                    let start = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        match (self.peek(0), self.peek(1)) {
                            (Some(b'*'), Some(b'/')) => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            (None, _) => return Err(Error::syntax("unterminated comment", start)),
                            _ => {
                                self.bump();
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn number(&mut self) -> Result<Tok> {
        let start = self.i;
        let pos = self.pos();
        while self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if self.peek(0) == Some(b'.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            while self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
        }
        if matches!(self.peek(0), Some(b'e' | b'E')) {
            let sign = usize::from(matches!(self.peek(1), Some(b'+' | b'-')));
            if self.peek(1 + sign).is_some_and(|c| c.is_ascii_digit()) {
                for _ in 0..=sign {
                    self.bump();
                }
                while self.peek(0).is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                }
            }
        }
        self.text[start..self.i]
            .parse()
            .map(Tok::Number)
            .map_err(|_| Error::syntax("malformed number", pos))
    }

    fn string(&mut self, quote: char) -> Result<Tok> {
        let pos = self.pos();
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(Error::syntax("unterminated string", pos)),
                Some(c) if c == quote => break,
                Some('\\') => {
                    let esc_pos = self.pos();
                    match self.bump() {
                        Some('n') => out.push('\n'),
                        Some('t') => out.push('\t'),
                        Some('r') => out.push('\r'),
                        Some('0') => out.push('\0'),
                        Some(c @ ('\\' | '"' | '\'')) => out.push(c),
                        _ => return Err(Error::syntax("unknown escape sequence", esc_pos)),
                    }
                }
                Some(c) => out.push(c),
            }
        }
        Ok(Tok::Str(Rc::from(out)))
    }

    fn next(&mut self) -> Result<Token> {
        self.skip_trivia()?;
        let pos = self.pos();
        let Some(c) = self.peek(0) else {
            return Ok(Token { tok: Tok::Eof, pos });
        };
        let tok = if c.is_ascii_digit()
            || (c == b'.' && self.peek(1).is_some_and(|d| d.is_ascii_digit()))
        {
            self.number()?
        } else if c == b'"' || c == b'\'' {
            self.string(c as char)?
        } else if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
            let start = self.i;
            while self
                .peek(0)
                .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_' || c == b'$')
            {
                self.bump();
            }
            let word = &self.text[start..self.i];
            match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Keyword(k),
                None => Tok::Ident(Rc::from(word)),
            }
        } else {
            let rest = &self.src[self.i..];
            let Some(p) = PUNCTS.iter().find(|p| rest.starts_with(p.as_bytes())) else {
                let ch = self.text[self.i..].chars().next().unwrap_or('?');
                return Err(Error::syntax(format!("unexpected character '{ch}'"), pos));
            };
            for _ in 0..p.len() {
                self.bump();
            }
            Tok::Punct(p)
        };
        Ok(Token { tok, pos })
    }
}

pub fn tokenize(source: &str) -> Result<Vec<Token>> {
    let mut lexer = Lexer {
        src: source.as_bytes(),
        text: source,
        i: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        let t = lexer.next()?;
        let done = t.tok == Tok::Eof;
        out.push(t);
        if done {
            return Ok(out);
        }
    }
}
