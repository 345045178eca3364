//! Constant-expression evaluation for `#if`/`#elif` directives.
//!
//! Supports `defined(M)` and `defined M`, integer and character literals,
//! object-like macro substitution, unary `! - + ~`, the usual binary
//! arithmetic/shift/relational/logical/bitwise operators, and parentheses.
//! Unknown identifiers (and function-like macro names, which are never
//! expanded here) evaluate to 0. The right-hand side of a short-circuited
//! `&&`/`||` is parsed but not evaluated, so a division by zero there is
//! not an error, exactly like a real preprocessor.

use std::collections::{BTreeMap, BTreeSet};

/// An object-like macro body, or a function-like macro recorded only so
/// `defined` can see it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MacroDef {
    Object(String),
    FunctionLike,
}

/// Macro environment of one translation unit.
#[derive(Debug, Clone, Default)]
pub struct MacroTable {
    map: BTreeMap<String, MacroDef>,
}

impl MacroTable {
    /// Seeds the table from config definitions; a bare `NAME` behaves like
    /// `-DNAME`, i.e. `NAME=1`.
    pub fn from_config(defines: &BTreeMap<String, String>) -> Self {
        let map = defines
            .iter()
            .map(|(name, value)| (name.clone(), MacroDef::Object(value.clone())))
            .collect();
        MacroTable { map }
    }

    pub fn define(&mut self, name: impl Into<String>, def: MacroDef) {
        self.map.insert(name.into(), def);
    }

    pub fn undef(&mut self, name: &str) {
        self.map.remove(name);
    }

    pub fn is_defined(&self, name: &str) -> bool {
        self.map.contains_key(name)
    }

    fn get(&self, name: &str) -> Option<&MacroDef> {
        self.map.get(name)
    }
}

/// Evaluation failure, positioned by the caller.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprError {
    Lex(String),
    Parse(String),
    DivisionByZero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(i64),
    Ident(String),
    Defined,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Shl,
    Shr,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    Not,
    Tilde,
    BitAnd,
    BitOr,
    BitXor,
    AndAnd,
    OrOr,
}

fn lex(text: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' => i += 1,
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                tokens.push(lex_number(&text[start..i])?);
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let ident = &text[start..i];
                if ident == "defined" {
                    tokens.push(Token::Defined);
                } else {
                    tokens.push(Token::Ident(ident.to_owned()));
                }
            }
            b'\'' => {
                let (value, next) = lex_char_literal(text, i)?;
                tokens.push(Token::Int(value));
                i = next;
            }
            b'(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            b')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            b'+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            b'-' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            b'*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            b'/' => {
                tokens.push(Token::Slash);
                i += 1;
            }
            b'%' => {
                tokens.push(Token::Percent);
                i += 1;
            }
            b'~' => {
                tokens.push(Token::Tilde);
                i += 1;
            }
            b'^' => {
                tokens.push(Token::BitXor);
                i += 1;
            }
            b'!' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    tokens.push(Token::Ne);
                    i += 2;
                } else {
                    tokens.push(Token::Not);
                    i += 1;
                }
            }
            b'=' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    tokens.push(Token::EqEq);
                    i += 2;
                } else {
                    return Err(ExprError::Lex("stray `=`".into()));
                }
            }
            b'<' => match bytes.get(i + 1) {
                Some(&b'=') => {
                    tokens.push(Token::Le);
                    i += 2;
                }
                Some(&b'<') => {
                    tokens.push(Token::Shl);
                    i += 2;
                }
                _ => {
                    tokens.push(Token::Lt);
                    i += 1;
                }
            },
            b'>' => match bytes.get(i + 1) {
                Some(&b'=') => {
                    tokens.push(Token::Ge);
                    i += 2;
                }
                Some(&b'>') => {
                    tokens.push(Token::Shr);
                    i += 2;
                }
                _ => {
                    tokens.push(Token::Gt);
                    i += 1;
                }
            },
            b'&' => {
                if bytes.get(i + 1) == Some(&b'&') {
                    tokens.push(Token::AndAnd);
                    i += 2;
                } else {
                    tokens.push(Token::BitAnd);
                    i += 1;
                }
            }
            b'|' => {
                if bytes.get(i + 1) == Some(&b'|') {
                    tokens.push(Token::OrOr);
                    i += 2;
                } else {
                    tokens.push(Token::BitOr);
                    i += 1;
                }
            }
            other => {
                return Err(ExprError::Lex(format!(
                    "unexpected character `{}`",
                    other as char
                )))
            }
        }
    }
    Ok(tokens)
}

fn lex_number(word: &str) -> Result<Token, ExprError> {
    // Strip integer suffixes (u/U/l/L combinations).
    let digits = word.trim_end_matches(['u', 'U', 'l', 'L']);
    let parsed = if let Some(hex) = digits
        .strip_prefix("0x")
        .or_else(|| digits.strip_prefix("0X"))
    {
        i64::from_str_radix(hex, 16)
    } else if digits.len() > 1 && digits.starts_with('0') {
        i64::from_str_radix(&digits[1..], 8)
    } else {
        digits.parse::<i64>()
    };
    parsed
        .map(Token::Int)
        .map_err(|_| ExprError::Lex(format!("bad integer literal `{word}`")))
}

fn lex_char_literal(text: &str, start: usize) -> Result<(i64, usize), ExprError> {
    let rest = &text[start + 1..];
    let mut chars = rest.char_indices();
    let (value, consumed) = match chars.next() {
        Some((_, '\\')) => {
            let (idx, escaped) = chars
                .next()
                .ok_or_else(|| ExprError::Lex("unterminated character literal".into()))?;
            let value = match escaped {
                'n' => b'\n' as i64,
                't' => b'\t' as i64,
                'r' => b'\r' as i64,
                '0' => 0,
                '\\' => b'\\' as i64,
                '\'' => b'\'' as i64,
                other => other as i64,
            };
            (value, idx + escaped.len_utf8())
        }
        Some((_, '\'')) => return Err(ExprError::Lex("empty character literal".into())),
        Some((idx, c)) => (c as i64, idx + c.len_utf8()),
        None => return Err(ExprError::Lex("unterminated character literal".into())),
    };
    let close = start + 1 + consumed;
    if text[close..].starts_with('\'') {
        Ok((value, close + 1))
    } else {
        Err(ExprError::Lex("unterminated character literal".into()))
    }
}

/// Expands object-like macros, leaving `defined` operands untouched and
/// painting self-referential macros blue like a real preprocessor.
fn expand(
    tokens: &[Token],
    macros: &MacroTable,
    busy: &mut BTreeSet<String>,
) -> Result<Vec<Token>, ExprError> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        match &tokens[i] {
            Token::Defined => {
                // Copy `defined X` or `defined ( X )` verbatim.
                out.push(Token::Defined);
                if let Some(Token::Ident(_)) = tokens.get(i + 1) {
                    out.push(tokens[i + 1].clone());
                    i += 2;
                } else if tokens.get(i + 1) == Some(&Token::LParen)
                    && matches!(tokens.get(i + 2), Some(Token::Ident(_)))
                    && tokens.get(i + 3) == Some(&Token::RParen)
                {
                    out.extend_from_slice(&tokens[i + 1..i + 4]);
                    i += 4;
                } else {
                    i += 1;
                }
            }
            Token::Ident(name) if !busy.contains(name) => {
                match macros.get(name) {
                    Some(MacroDef::Object(body)) => {
                        let body_tokens = lex(body)?;
                        busy.insert(name.clone());
                        let expanded = expand(&body_tokens, macros, busy)?;
                        busy.remove(name);
                        out.extend(expanded);
                    }
                    // Function-like macros are not expanded in #if
                    // expressions; the bare name falls through to 0.
                    Some(MacroDef::FunctionLike) | None => out.push(tokens[i].clone()),
                }
                i += 1;
            }
            other => {
                out.push(other.clone());
                i += 1;
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    macros: &'a MacroTable,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    // Binary operator ladder, lowest precedence first. `live` is false on
    // short-circuited subtrees: they are parsed but arithmetic faults are
    // ignored.
    fn logical_or(&mut self, live: bool) -> Result<i64, ExprError> {
        let mut left = self.logical_and(live)?;
        while self.peek() == Some(&Token::OrOr) {
            self.bump();
            let right = self.logical_and(live && left == 0)?;
            left = i64::from(left != 0 || right != 0);
        }
        Ok(left)
    }

    fn logical_and(&mut self, live: bool) -> Result<i64, ExprError> {
        let mut left = self.bit_or(live)?;
        while self.peek() == Some(&Token::AndAnd) {
            self.bump();
            let right = self.bit_or(live && left != 0)?;
            left = i64::from(left != 0 && right != 0);
        }
        Ok(left)
    }

    fn bit_or(&mut self, live: bool) -> Result<i64, ExprError> {
        let mut left = self.bit_xor(live)?;
        while self.peek() == Some(&Token::BitOr) {
            self.bump();
            left |= self.bit_xor(live)?;
        }
        Ok(left)
    }

    fn bit_xor(&mut self, live: bool) -> Result<i64, ExprError> {
        let mut left = self.bit_and(live)?;
        while self.peek() == Some(&Token::BitXor) {
            self.bump();
            left ^= self.bit_and(live)?;
        }
        Ok(left)
    }

    fn bit_and(&mut self, live: bool) -> Result<i64, ExprError> {
        let mut left = self.equality(live)?;
        while self.peek() == Some(&Token::BitAnd) {
            self.bump();
            left &= self.equality(live)?;
        }
        Ok(left)
    }

    fn equality(&mut self, live: bool) -> Result<i64, ExprError> {
        let mut left = self.relational(live)?;
        loop {
            match self.peek() {
                Some(Token::EqEq) => {
                    self.bump();
                    left = i64::from(left == self.relational(live)?);
                }
                Some(Token::Ne) => {
                    self.bump();
                    left = i64::from(left != self.relational(live)?);
                }
                _ => return Ok(left),
            }
        }
    }

    fn relational(&mut self, live: bool) -> Result<i64, ExprError> {
        let mut left = self.shift(live)?;
        loop {
            match self.peek() {
                Some(Token::Lt) => {
                    self.bump();
                    left = i64::from(left < self.shift(live)?);
                }
                Some(Token::Le) => {
                    self.bump();
                    left = i64::from(left <= self.shift(live)?);
                }
                Some(Token::Gt) => {
                    self.bump();
                    left = i64::from(left > self.shift(live)?);
                }
                Some(Token::Ge) => {
                    self.bump();
                    left = i64::from(left >= self.shift(live)?);
                }
                _ => return Ok(left),
            }
        }
    }

    fn shift(&mut self, live: bool) -> Result<i64, ExprError> {
        let mut left = self.additive(live)?;
        loop {
            match self.peek() {
                Some(Token::Shl) => {
                    self.bump();
                    let right = self.additive(live)?;
                    left = shift_value(left, right, true);
                }
                Some(Token::Shr) => {
                    self.bump();
                    let right = self.additive(live)?;
                    left = shift_value(left, right, false);
                }
                _ => return Ok(left),
            }
        }
    }

    fn additive(&mut self, live: bool) -> Result<i64, ExprError> {
        let mut left = self.multiplicative(live)?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    left = left.wrapping_add(self.multiplicative(live)?);
                }
                Some(Token::Minus) => {
                    self.bump();
                    left = left.wrapping_sub(self.multiplicative(live)?);
                }
                _ => return Ok(left),
            }
        }
    }

    fn multiplicative(&mut self, live: bool) -> Result<i64, ExprError> {
        let mut left = self.unary(live)?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    left = left.wrapping_mul(self.unary(live)?);
                }
                Some(Token::Slash) => {
                    self.bump();
                    let right = self.unary(live)?;
                    if right == 0 {
                        if live {
                            return Err(ExprError::DivisionByZero);
                        }
                        left = 0;
                    } else {
                        left = left.wrapping_div(right);
                    }
                }
                Some(Token::Percent) => {
                    self.bump();
                    let right = self.unary(live)?;
                    if right == 0 {
                        if live {
                            return Err(ExprError::DivisionByZero);
                        }
                        left = 0;
                    } else {
                        left = left.wrapping_rem(right);
                    }
                }
                _ => return Ok(left),
            }
        }
    }

    fn unary(&mut self, live: bool) -> Result<i64, ExprError> {
        match self.peek() {
            Some(Token::Plus) => {
                self.bump();
                self.unary(live)
            }
            Some(Token::Minus) => {
                self.bump();
                Ok(self.unary(live)?.wrapping_neg())
            }
            Some(Token::Not) => {
                self.bump();
                Ok(i64::from(self.unary(live)? == 0))
            }
            Some(Token::Tilde) => {
                self.bump();
                Ok(!self.unary(live)?)
            }
            Some(Token::Defined) => {
                self.bump();
                self.defined_operand()
            }
            _ => self.primary(live),
        }
    }

    fn defined_operand(&mut self) -> Result<i64, ExprError> {
        let parenthesized = self.peek() == Some(&Token::LParen);
        if parenthesized {
            self.bump();
        }
        let name = match self.bump() {
            Some(Token::Ident(name)) => name.clone(),
            other => {
                return Err(ExprError::Parse(format!(
                    "`defined` needs a macro name, got {other:?}"
                )))
            }
        };
        if parenthesized && self.bump() != Some(&Token::RParen) {
            return Err(ExprError::Parse("missing `)` after defined(".into()));
        }
        Ok(i64::from(self.macros.is_defined(&name)))
    }

    fn primary(&mut self, live: bool) -> Result<i64, ExprError> {
        match self.bump() {
            Some(Token::Int(v)) => Ok(*v),
            // Unexpanded identifier: unknown or function-like → 0.
            Some(Token::Ident(_)) => Ok(0),
            Some(Token::LParen) => {
                let value = self.logical_or(live)?;
                if self.bump() != Some(&Token::RParen) {
                    return Err(ExprError::Parse("missing `)`".into()));
                }
                Ok(value)
            }
            other => Err(ExprError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

fn shift_value(left: i64, right: i64, is_left_shift: bool) -> i64 {
    // Out-of-range shift counts yield 0 instead of UB or a panic.
    if !(0..64).contains(&right) {
        return 0;
    }
    if is_left_shift {
        left.wrapping_shl(right as u32)
    } else {
        left.wrapping_shr(right as u32)
    }
}

/// Evaluates a `#if`/`#elif` controlling expression under a macro table.
pub fn evaluate(text: &str, macros: &MacroTable) -> Result<i64, ExprError> {
    let tokens = lex(text)?;
    let mut busy = BTreeSet::new();
    let expanded = expand(&tokens, macros, &mut busy)?;
    if expanded.is_empty() {
        return Err(ExprError::Parse("empty expression".into()));
    }
    let mut parser = Parser {
        tokens: &expanded,
        pos: 0,
        macros,
    };
    let value = parser.logical_or(true)?;
    if parser.pos != expanded.len() {
        return Err(ExprError::Parse(format!(
            "unexpected trailing token {:?}",
            expanded[parser.pos]
        )));
    }
    Ok(value)
}
