//! A deliberately naive reference interpreter for conditional compilation.
//!
//! Re-reads every file on every inclusion, performs no include-guard
//! short-circuiting (only `#pragma once` suppression), evaluates `#if`
//! expressions by shunting-yard to RPN, and marks lines with the same
//! attribution contract the scanner documents. Kept simple and separate so
//! it can serve as an independent oracle. Self-referential macro bodies
//! (`#define A A + 1`) are out of scope for the oracle and absent from the
//! corpora it checks.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Code,
    Comment,
    Blank,
    Directive,
}

pub struct NaiveConfig {
    pub defines: BTreeMap<String, String>,
    pub include_dirs: Vec<String>,
    pub units: Vec<String>,
}

struct State {
    macros: BTreeMap<String, Option<String>>, // None = function-like
    pragma_once: BTreeSet<String>,
    active: BTreeMap<String, BTreeSet<u32>>,
}

pub fn naive_used_lines(root: &Path, config: &NaiveConfig) -> BTreeSet<(String, u32)> {
    let mut used = BTreeSet::new();
    for unit in &config.units {
        let mut state = State {
            macros: config
                .defines
                .iter()
                .map(|(k, v)| (k.clone(), Some(v.clone())))
                .collect(),
            pragma_once: BTreeSet::new(),
            active: BTreeMap::new(),
        };
        walk(root, config, &mut state, unit, 0);
        for (file, lines) in &state.active {
            let classes = classify(&read_lines(root, file));
            for &line in lines {
                if matches!(classes[(line - 1) as usize], Class::Code | Class::Directive) {
                    used.insert((file.clone(), line));
                }
            }
        }
    }
    used
}

pub fn read_lines(root: &Path, rel: &str) -> Vec<String> {
    let text = std::fs::read_to_string(root.join(rel)).expect("readable fixture file");
    if text.is_empty() {
        return Vec::new();
    }
    let body = text.strip_suffix('\n').unwrap_or(&text);
    body.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_owned())
        .collect()
}

pub fn classify(lines: &[String]) -> Vec<Class> {
    let mut classes = Vec::new();
    let mut carried_block = false;
    for raw in lines {
        let chars: Vec<char> = raw.chars().collect();
        let starts_in_block = carried_block;
        let mut has_comment = starts_in_block && !raw.trim().is_empty();
        let mut has_code = false;
        let mut pos = 0;
        let mut in_string: Option<char> = None;
        while pos < chars.len() {
            if carried_block {
                if chars[pos] == '*' && chars.get(pos + 1) == Some(&'/') {
                    carried_block = false;
                    pos += 2;
                } else {
                    pos += 1;
                }
            } else if let Some(quote) = in_string {
                if chars[pos] == '\\' {
                    pos += 2;
                } else {
                    if chars[pos] == quote {
                        in_string = None;
                    }
                    pos += 1;
                }
            } else if chars[pos] == '/' && chars.get(pos + 1) == Some(&'/') {
                has_comment = true;
                break;
            } else if chars[pos] == '/' && chars.get(pos + 1) == Some(&'*') {
                has_comment = true;
                carried_block = true;
                pos += 2;
            } else if chars[pos] == '"' || chars[pos] == '\'' {
                has_code = true;
                in_string = Some(chars[pos]);
                pos += 1;
            } else {
                if !chars[pos].is_whitespace() {
                    has_code = true;
                }
                pos += 1;
            }
        }
        let class = if raw.trim().is_empty() {
            Class::Blank
        } else if !starts_in_block && raw.trim_start().starts_with('#') {
            Class::Directive
        } else if has_code {
            Class::Code
        } else if has_comment {
            Class::Comment
        } else {
            Class::Blank
        };
        classes.push(class);
    }
    assert!(!carried_block, "unterminated block comment in corpus");
    classes
}

fn drop_comments(line: &str) -> String {
    let chars: Vec<char> = line.chars().collect();
    let mut out = String::new();
    let mut pos = 0;
    while pos < chars.len() {
        if chars[pos] == '/' && chars.get(pos + 1) == Some(&'/') {
            break;
        }
        if chars[pos] == '/' && chars.get(pos + 1) == Some(&'*') {
            let mut end = pos + 2;
            while end < chars.len() && !(chars[end] == '*' && chars.get(end + 1) == Some(&'/')) {
                end += 1;
            }
            out.push(' ');
            pos = if end < chars.len() {
                end + 2
            } else {
                chars.len()
            };
            continue;
        }
        out.push(chars[pos]);
        pos += 1;
    }
    out
}

fn walk(root: &Path, config: &NaiveConfig, state: &mut State, rel: &str, depth: usize) {
    assert!(depth < 64, "include depth blown in naive interpreter");
    if state.pragma_once.contains(rel) {
        return;
    }
    let lines = read_lines(root, rel);
    let classes = classify(&lines);
    // (enclosing, any_branch_taken, branch_active, saw_else)
    let mut stack: Vec<(bool, bool, bool, bool)> = Vec::new();
    for (idx, class) in classes.iter().enumerate() {
        let line_no = idx as u32 + 1;
        let here_active = stack.iter().all(|f| f.2);
        if *class != Class::Directive {
            if here_active {
                state
                    .active
                    .entry(rel.to_owned())
                    .or_default()
                    .insert(line_no);
            }
            continue;
        }
        let stripped = drop_comments(&lines[idx]);
        let body = stripped.trim_start()[1..].trim_start().to_owned();
        let keyword: String = body
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
            .collect();
        let args = body[keyword.len()..].trim().to_owned();
        let mark = |state: &mut State| {
            state
                .active
                .entry(rel.to_owned())
                .or_default()
                .insert(line_no);
        };
        match keyword.as_str() {
            "if" | "ifdef" | "ifndef" => {
                if here_active {
                    mark(state);
                }
                let cond = here_active
                    && match keyword.as_str() {
                        "if" => truthy(&args, &state.macros),
                        "ifdef" => state.macros.contains_key(ident_prefix(&args)),
                        _ => !state.macros.contains_key(ident_prefix(&args)),
                    };
                stack.push((here_active, cond, here_active && cond, false));
            }
            "elif" => {
                let top = stack.last().copied().expect("balanced corpus");
                if top.0 {
                    mark(state);
                }
                let take = top.0 && !top.1 && truthy(&args, &state.macros);
                let top = stack.last_mut().unwrap();
                top.2 = take;
                if take {
                    top.1 = true;
                }
            }
            "else" => {
                let top = stack.last_mut().expect("balanced corpus");
                let enclosing = top.0;
                top.2 = enclosing && !top.1;
                top.1 = true;
                top.3 = true;
                if enclosing {
                    mark(state);
                }
            }
            "endif" => {
                let top = stack.pop().expect("balanced corpus");
                if top.0 {
                    mark(state);
                }
            }
            "define" => {
                if here_active {
                    mark(state);
                    let name = ident_prefix(&args).to_owned();
                    let rest = args[name.len()..].to_owned();
                    if rest.starts_with('(') {
                        state.macros.insert(name, None);
                    } else {
                        state.macros.insert(name, Some(rest.trim().to_owned()));
                    }
                }
            }
            "undef" => {
                if here_active {
                    mark(state);
                    state.macros.remove(ident_prefix(&args));
                }
            }
            "include" => {
                if here_active {
                    mark(state);
                    let resolved = resolve(root, config, rel, &args);
                    walk(root, config, state, &resolved, depth + 1);
                }
            }
            "pragma" => {
                if here_active {
                    mark(state);
                    if args == "once" {
                        state.pragma_once.insert(rel.to_owned());
                    }
                }
            }
            _ => {
                if here_active {
                    mark(state);
                }
            }
        }
    }
    assert!(stack.is_empty(), "unbalanced conditionals in {rel}");
}

fn ident_prefix(text: &str) -> &str {
    let end = text
        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .unwrap_or(text.len());
    &text[..end]
}

fn resolve(root: &Path, config: &NaiveConfig, from: &str, args: &str) -> String {
    let args = args.trim();
    let (name, quoted) = if let Some(rest) = args.strip_prefix('"') {
        (&rest[..rest.find('"').unwrap()], true)
    } else {
        let rest = args.strip_prefix('<').unwrap();
        (&rest[..rest.find('>').unwrap()], false)
    };
    let mut dirs: Vec<String> = Vec::new();
    if quoted {
        let parent = from.rsplit_once('/').map(|(d, _)| d).unwrap_or("");
        dirs.push(parent.to_owned());
    }
    dirs.extend(config.include_dirs.iter().cloned());
    for dir in dirs {
        let candidate = normalize(&dir, name);
        if root.join(&candidate).is_file() {
            return candidate;
        }
    }
    panic!("naive interpreter cannot resolve include `{name}` from {from}");
}

fn normalize(dir: &str, name: &str) -> String {
    let mut parts: Vec<&str> = Vec::new();
    for piece in dir.split('/').chain(name.split('/')) {
        match piece {
            "" | "." => {}
            ".." => {
                parts.pop().expect("no escapes in corpus");
            }
            other => parts.push(other),
        }
    }
    parts.join("/")
}

// Expression evaluation: tokens -> shunting-yard -> RPN.

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(i64),
    Name(String),
    Op(&'static str),
    LParen,
    RParen,
}

fn truthy(expr: &str, macros: &BTreeMap<String, Option<String>>) -> bool {
    eval_expression(expr, macros) != 0
}

fn eval_expression(expr: &str, macros: &BTreeMap<String, Option<String>>) -> i64 {
    let substituted = substitute_defined(expr, macros);
    let expanded = expand_macros(&substituted, macros);
    let tokens = tokenize(&expanded);
    let rpn = shunting_yard(tokens);
    eval_rpn(&rpn)
}

/// Replaces `defined(X)` / `defined X` with 0 or 1 before expansion.
fn substitute_defined(expr: &str, macros: &BTreeMap<String, Option<String>>) -> String {
    let mut out = String::new();
    let mut rest = expr;
    while let Some(at) = rest.find("defined") {
        let before = &rest[..at];
        // Must be a standalone word.
        let standalone = before
            .chars()
            .last()
            .map(|c| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(true);
        out.push_str(before);
        rest = &rest[at + "defined".len()..];
        if !standalone {
            out.push_str("defined");
            continue;
        }
        let trimmed = rest.trim_start();
        let (name, after) = if let Some(inner) = trimmed.strip_prefix('(') {
            let inner = inner.trim_start();
            let name = ident_prefix(inner);
            let after = inner[name.len()..].trim_start();
            (name.to_owned(), after.strip_prefix(')').unwrap_or(after))
        } else {
            let name = ident_prefix(trimmed);
            (name.to_owned(), &trimmed[name.len()..])
        };
        out.push_str(if macros.contains_key(&name) {
            " 1 "
        } else {
            " 0 "
        });
        rest = after;
    }
    out.push_str(rest);
    out
}

/// Iterative whole-text object-macro substitution to a fixpoint.
fn expand_macros(expr: &str, macros: &BTreeMap<String, Option<String>>) -> String {
    let mut current = expr.to_owned();
    for _ in 0..64 {
        let mut next = String::new();
        let mut changed = false;
        let chars: Vec<char> = current.chars().collect();
        let mut pos = 0;
        while pos < chars.len() {
            let c = chars[pos];
            if c.is_ascii_alphabetic() || c == '_' {
                let start = pos;
                while pos < chars.len() && (chars[pos].is_ascii_alphanumeric() || chars[pos] == '_')
                {
                    pos += 1;
                }
                let word: String = chars[start..pos].iter().collect();
                match macros.get(&word) {
                    // Plain token splice, no parenthesization: cpp object
                    // macros substitute tokens, not grouped values.
                    Some(Some(body)) if body.trim() != word => {
                        next.push(' ');
                        next.push_str(body);
                        next.push(' ');
                        changed = true;
                    }
                    _ => next.push_str(&word),
                }
            } else {
                next.push(c);
                pos += 1;
            }
        }
        current = next;
        if !changed {
            break;
        }
    }
    current
}

fn tokenize(expr: &str) -> Vec<Tok> {
    let chars: Vec<char> = expr.chars().collect();
    let mut tokens = Vec::new();
    let mut pos = 0;
    while pos < chars.len() {
        let c = chars[pos];
        if c.is_whitespace() {
            pos += 1;
        } else if c.is_ascii_digit() {
            let start = pos;
            while pos < chars.len() && chars[pos].is_ascii_alphanumeric() {
                pos += 1;
            }
            let word: String = chars[start..pos].iter().collect();
            let digits = word.trim_end_matches(['u', 'U', 'l', 'L']);
            let value = if let Some(hex) = digits.strip_prefix("0x").or(digits.strip_prefix("0X")) {
                i64::from_str_radix(hex, 16).unwrap()
            } else if digits.len() > 1 && digits.starts_with('0') {
                i64::from_str_radix(&digits[1..], 8).unwrap()
            } else {
                digits.parse().unwrap()
            };
            tokens.push(Tok::Num(value));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = pos;
            while pos < chars.len() && (chars[pos].is_ascii_alphanumeric() || chars[pos] == '_') {
                pos += 1;
            }
            tokens.push(Tok::Name(chars[start..pos].iter().collect()));
        } else if c == '(' {
            tokens.push(Tok::LParen);
            pos += 1;
        } else if c == ')' {
            tokens.push(Tok::RParen);
            pos += 1;
        } else {
            let two: String = chars[pos..(pos + 2).min(chars.len())].iter().collect();
            let op = match two.as_str() {
                "&&" | "||" | "==" | "!=" | "<=" | ">=" | "<<" | ">>" => {
                    pos += 2;
                    match two.as_str() {
                        "&&" => "&&",
                        "||" => "||",
                        "==" => "==",
                        "!=" => "!=",
                        "<=" => "<=",
                        ">=" => ">=",
                        "<<" => "<<",
                        _ => ">>",
                    }
                }
                _ => {
                    pos += 1;
                    match c {
                        '+' => "+",
                        '-' => "-",
                        '*' => "*",
                        '/' => "/",
                        '%' => "%",
                        '<' => "<",
                        '>' => ">",
                        '!' => "u!",
                        '~' => "u~",
                        '&' => "&",
                        '|' => "|",
                        '^' => "^",
                        other => panic!("naive tokenizer: unexpected `{other}`"),
                    }
                }
            };
            tokens.push(Tok::Op(op));
        }
    }
    // Mark unary +/- by context.
    let mut marked = Vec::with_capacity(tokens.len());
    for (idx, tok) in tokens.iter().enumerate() {
        let tok = match tok {
            Tok::Op(op @ ("+" | "-")) => {
                let prev = if idx == 0 { None } else { tokens.get(idx - 1) };
                let unary = !matches!(prev, Some(Tok::Num(_) | Tok::Name(_) | Tok::RParen));
                if unary {
                    Tok::Op(if *op == "-" { "u-" } else { "u+" })
                } else {
                    tok.clone()
                }
            }
            other => other.clone(),
        };
        marked.push(tok);
    }
    marked
}

fn precedence(op: &str) -> u8 {
    match op {
        "u!" | "u~" | "u-" | "u+" => 11,
        "*" | "/" | "%" => 10,
        "+" | "-" => 9,
        "<<" | ">>" => 8,
        "<" | "<=" | ">" | ">=" => 7,
        "==" | "!=" => 6,
        "&" => 5,
        "^" => 4,
        "|" => 3,
        "&&" => 2,
        "||" => 1,
        other => panic!("naive precedence: `{other}`"),
    }
}

fn is_unary(op: &str) -> bool {
    op.starts_with('u')
}

fn shunting_yard(tokens: Vec<Tok>) -> Vec<Tok> {
    let mut output = Vec::new();
    let mut ops: Vec<Tok> = Vec::new();
    for tok in tokens {
        match tok {
            Tok::Num(_) | Tok::Name(_) => output.push(tok),
            Tok::LParen => ops.push(tok),
            Tok::RParen => {
                while let Some(top) = ops.pop() {
                    if top == Tok::LParen {
                        break;
                    }
                    output.push(top);
                }
            }
            Tok::Op(op) => {
                while let Some(Tok::Op(top)) = ops.last() {
                    let should_pop = if is_unary(op) {
                        // Unary operators are right-associative.
                        precedence(top) > precedence(op)
                    } else {
                        precedence(top) >= precedence(op)
                    };
                    if should_pop {
                        output.push(ops.pop().unwrap());
                    } else {
                        break;
                    }
                }
                ops.push(Tok::Op(op));
            }
        }
    }
    while let Some(top) = ops.pop() {
        output.push(top);
    }
    output
}

fn eval_rpn(rpn: &[Tok]) -> i64 {
    let mut stack: Vec<i64> = Vec::new();
    for tok in rpn {
        match tok {
            Tok::Num(v) => stack.push(*v),
            Tok::Name(_) => stack.push(0), // unknown identifiers are 0
            Tok::Op(op) if is_unary(op) => {
                let v = stack.pop().expect("operand");
                stack.push(match *op {
                    "u!" => i64::from(v == 0),
                    "u~" => !v,
                    "u-" => v.wrapping_neg(),
                    _ => v,
                });
            }
            Tok::Op(op) => {
                let b = stack.pop().expect("rhs");
                let a = stack.pop().expect("lhs");
                let v = match *op {
                    "+" => a.wrapping_add(b),
                    "-" => a.wrapping_sub(b),
                    "*" => a.wrapping_mul(b),
                    "/" => {
                        assert!(b != 0, "division by zero in naive oracle");
                        a.wrapping_div(b)
                    }
                    "%" => {
                        assert!(b != 0, "modulo by zero in naive oracle");
                        a.wrapping_rem(b)
                    }
                    "<<" => {
                        if (0..64).contains(&b) {
                            a.wrapping_shl(b as u32)
                        } else {
                            0
                        }
                    }
                    ">>" => {
                        if (0..64).contains(&b) {
                            a.wrapping_shr(b as u32)
                        } else {
                            0
                        }
                    }
                    "<" => i64::from(a < b),
                    "<=" => i64::from(a <= b),
                    ">" => i64::from(a > b),
                    ">=" => i64::from(a >= b),
                    "==" => i64::from(a == b),
                    "!=" => i64::from(a != b),
                    "&" => a & b,
                    "|" => a | b,
                    "^" => a ^ b,
                    "&&" => i64::from(a != 0 && b != 0),
                    "||" => i64::from(a != 0 || b != 0),
                    other => panic!("naive eval: `{other}`"),
                };
                stack.push(v);
            }
            Tok::LParen | Tok::RParen => unreachable!("parens removed by shunting-yard"),
        }
    }
    stack.pop().expect("expression value")
}
