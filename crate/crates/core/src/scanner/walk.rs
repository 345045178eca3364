//! Directive walking: conditional evaluation, macro state, and includes.
//!
//! Each translation unit is walked with its own macro environment seeded
//! from the config, so units are independent and may be scanned in any
//! order or in parallel.
//!
//! Line attribution rules:
//! - a non-directive line is active when every enclosing conditional branch
//!   is active;
//! - the structure directives of a conditional (`#if`/`#ifdef`/`#ifndef`/
//!   `#elif`/`#else`/`#endif`) are active when the region *enclosing the
//!   whole construct* is active, whichever branch is taken — the
//!   preprocessor reads all of them;
//! - other directives (`#define`, `#undef`, `#include`, `#pragma`, unknown)
//!   are active only when their own branch is active, because that is when
//!   they are evaluated.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Component, Path, PathBuf};
use std::rc::Rc;

use super::classify::{classify_lines, split_lines, LineClass};
use super::expr::{evaluate, ExprError, MacroDef, MacroTable};
use super::{CompilationConfig, ScanError};

/// Nested includes deeper than this abort the scan; it is far beyond any
/// sane header chain and catches unguarded self-inclusion.
const MAX_INCLUDE_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum DirectiveKind {
    If,
    Ifdef,
    Ifndef,
    Elif,
    Else,
    Endif,
    Define,
    Undef,
    Include,
    PragmaOnce,
    Other,
}

#[derive(Debug, Clone)]
struct DirectiveLine {
    kind: DirectiveKind,
    /// Raw argument text, comment-stripped and trimmed. Parsed lazily so a
    /// malformed directive inside a skipped region is not an error.
    args: String,
}

/// A parsed file: its line classes and recognized directives, cached per
/// unit walk.
#[derive(Debug)]
pub(super) struct ParsedFile {
    pub(super) classes: Vec<LineClass>,
    directives: BTreeMap<u32, DirectiveLine>,
    /// Guard macro of the classic `#ifndef G ... #endif` whole-file pattern.
    guard: Option<String>,
}

/// Strips `//` and within-line `/* */` comments from directive text.
fn strip_directive_comments(line: &str) -> String {
    // Scanning bytes is safe: the ASCII delimiters never match inside
    // multi-byte UTF-8 sequences.
    let bytes = line.as_bytes();
    let mut out: Vec<u8> = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'/' && bytes.get(i + 1) == Some(&b'/') {
            break;
        }
        if bytes[i] == b'/' && bytes.get(i + 1) == Some(&b'*') {
            // Find the close; an unterminated block swallows the rest of
            // the line (classification carries it to following lines).
            let mut j = i + 2;
            while j < bytes.len() && !(bytes[j] == b'*' && bytes.get(j + 1) == Some(&b'/')) {
                j += 1;
            }
            out.push(b' ');
            i = if j < bytes.len() { j + 2 } else { bytes.len() };
            continue;
        }
        out.push(bytes[i]);
        i += 1;
    }
    String::from_utf8(out).expect("removed only ASCII-delimited spans")
}

fn parse_directive(line: &str) -> DirectiveLine {
    let stripped = strip_directive_comments(line);
    let body = stripped.trim_start().trim_start_matches('#').trim_start();
    let (keyword, rest) = match body.find(|c: char| c.is_whitespace() || c == '(') {
        Some(idx) if body.as_bytes()[idx] == b'(' => body.split_at(idx),
        Some(idx) => (&body[..idx], &body[idx + 1..]),
        None => (body, ""),
    };
    let kind = match keyword {
        "if" => DirectiveKind::If,
        "ifdef" => DirectiveKind::Ifdef,
        "ifndef" => DirectiveKind::Ifndef,
        "elif" => DirectiveKind::Elif,
        "else" => DirectiveKind::Else,
        "endif" => DirectiveKind::Endif,
        "define" => DirectiveKind::Define,
        "undef" => DirectiveKind::Undef,
        "include" => DirectiveKind::Include,
        "pragma" => {
            if rest.trim() == "once" {
                DirectiveKind::PragmaOnce
            } else {
                DirectiveKind::Other
            }
        }
        _ => DirectiveKind::Other,
    };
    DirectiveLine {
        kind,
        args: rest.trim().to_owned(),
    }
}

fn first_identifier(args: &str) -> Option<&str> {
    let trimmed = args.trim_start();
    let end = trimmed
        .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .unwrap_or(trimmed.len());
    if end == 0 {
        None
    } else {
        Some(&trimmed[..end])
    }
}

/// Detects the classic whole-file include-guard pattern: the first
/// significant line is `#ifndef G`, its matching `#endif` is the last
/// significant line.
fn detect_guard(
    classes: &[LineClass],
    directives: &BTreeMap<u32, DirectiveLine>,
) -> Option<String> {
    let mut significant = (1..=classes.len() as u32).filter(|l| {
        !matches!(
            classes[(*l - 1) as usize],
            LineClass::Comment | LineClass::Blank
        )
    });
    let first = significant.next()?;
    let opener = directives.get(&first)?;
    if opener.kind != DirectiveKind::Ifndef {
        return None;
    }
    let guard = first_identifier(&opener.args)?.to_owned();

    let mut depth = 0usize;
    let mut closing = None;
    for (line, directive) in directives.range(first..) {
        match directive.kind {
            DirectiveKind::If | DirectiveKind::Ifdef | DirectiveKind::Ifndef => depth += 1,
            DirectiveKind::Endif => {
                depth = depth.checked_sub(1)?;
                if depth == 0 {
                    closing = Some(*line);
                    break;
                }
            }
            _ => {}
        }
    }
    let closing = closing?;
    // Nothing significant may follow the guard's #endif.
    let trailing = ((closing + 1)..=classes.len() as u32).any(|l| {
        !matches!(
            classes[(l - 1) as usize],
            LineClass::Comment | LineClass::Blank
        )
    });
    if trailing {
        None
    } else {
        Some(guard)
    }
}

/// Include target forms.
#[derive(Debug, Clone, PartialEq, Eq)]
enum IncludeTarget {
    Quoted(String),
    Angled(String),
}

fn parse_include_target(args: &str, file: &str, line: u32) -> Result<IncludeTarget, ScanError> {
    let text = args.trim();
    if let Some(rest) = text.strip_prefix('"') {
        if let Some(end) = rest.find('"') {
            return Ok(IncludeTarget::Quoted(rest[..end].to_owned()));
        }
    } else if let Some(rest) = text.strip_prefix('<') {
        if let Some(end) = rest.find('>') {
            return Ok(IncludeTarget::Angled(rest[..end].to_owned()));
        }
    }
    Err(ScanError::DirectiveSyntax {
        file: file.to_owned(),
        line,
        message: format!("bad #include target `{text}`"),
    })
}

/// Lexically normalizes `base/relative`, rejecting escapes above the root.
/// Returns a root-relative path with `/` separators, or `None` on escape.
pub(super) fn normalize_under_root(base_rel: &str, relative: &str) -> Option<String> {
    let joined = if base_rel.is_empty() {
        PathBuf::from(relative)
    } else {
        Path::new(base_rel).join(relative)
    };
    let mut stack: Vec<String> = Vec::new();
    for component in joined.components() {
        match component {
            Component::Normal(part) => stack.push(part.to_string_lossy().into_owned()),
            Component::CurDir => {}
            Component::ParentDir => {
                stack.pop()?;
            }
            Component::RootDir | Component::Prefix(_) => return None,
        }
    }
    Some(stack.join("/"))
}

fn parent_dir(rel: &str) -> &str {
    match rel.rfind('/') {
        Some(idx) => &rel[..idx],
        None => "",
    }
}

/// Per-unit walking state. `active` collects, per reached file, the lines
/// the compiler would read under this configuration.
pub(super) struct UnitWalk<'a> {
    root: &'a Path,
    include_dirs: &'a [String],
    macros: MacroTable,
    pragma_once: BTreeSet<String>,
    processed: BTreeSet<String>,
    cache: &'a mut HashMap<String, Rc<ParsedFile>>,
    pub(super) active: BTreeMap<String, BTreeSet<u32>>,
    pub(super) reached: BTreeSet<String>,
}

struct Frame {
    enclosing: bool,
    taken: bool,
    active: bool,
    saw_else: bool,
    start_line: u32,
}

impl<'a> UnitWalk<'a> {
    pub(super) fn new(
        root: &'a Path,
        config: &CompilationConfig,
        include_dirs: &'a [String],
        cache: &'a mut HashMap<String, Rc<ParsedFile>>,
    ) -> Self {
        UnitWalk {
            root,
            include_dirs,
            macros: MacroTable::from_config(&config.defines),
            pragma_once: BTreeSet::new(),
            processed: BTreeSet::new(),
            cache,
            active: BTreeMap::new(),
            reached: BTreeSet::new(),
        }
    }

    pub(super) fn load(&mut self, rel: &str) -> Result<Rc<ParsedFile>, ScanError> {
        if let Some(parsed) = self.cache.get(rel) {
            return Ok(Rc::clone(parsed));
        }
        let path = self.root.join(rel);
        let bytes = std::fs::read(&path).map_err(|source| ScanError::Io {
            path: path.clone(),
            source,
        })?;
        let mut text = String::from_utf8(bytes).map_err(|_| ScanError::NonUtf8 { path })?;
        if text.starts_with('\u{feff}') {
            text.drain(..'\u{feff}'.len_utf8());
        }
        let classes = classify_lines(&text).map_err(|e| ScanError::UnterminatedComment {
            file: rel.to_owned(),
            line: e.start_line,
        })?;
        let mut directives = BTreeMap::new();
        for (idx, line) in split_lines(&text).iter().enumerate() {
            if classes[idx] == LineClass::Directive {
                directives.insert(idx as u32 + 1, parse_directive(line));
            }
        }
        let guard = detect_guard(&classes, &directives);
        let parsed = Rc::new(ParsedFile {
            classes,
            directives,
            guard,
        });
        self.cache.insert(rel.to_owned(), Rc::clone(&parsed));
        Ok(parsed)
    }

    pub(super) fn process_file(&mut self, rel: &str, depth: usize) -> Result<(), ScanError> {
        if self.pragma_once.contains(rel) {
            return Ok(());
        }
        let parsed = self.load(rel)?;
        // Guard skip is only legal once the file has been processed in this
        // unit; the first pass under an already-defined guard must still
        // mark the guard lines.
        if self.processed.contains(rel) {
            if let Some(guard) = &parsed.guard {
                if self.macros.is_defined(guard) {
                    return Ok(());
                }
            }
        }
        self.processed.insert(rel.to_owned());
        self.reached.insert(rel.to_owned());

        let mut frames: Vec<Frame> = Vec::new();
        let mut inactive_frames = 0usize;

        for (idx, class) in parsed.classes.iter().enumerate() {
            let line = idx as u32 + 1;
            let fully_active = inactive_frames == 0;
            if *class != LineClass::Directive {
                if fully_active {
                    self.mark(rel, line);
                }
                continue;
            }
            let directive = &parsed.directives[&line];
            match directive.kind {
                DirectiveKind::If | DirectiveKind::Ifdef | DirectiveKind::Ifndef => {
                    let enclosing = fully_active;
                    if enclosing {
                        self.mark(rel, line);
                    }
                    let condition = if enclosing {
                        self.eval_condition(directive, rel, line)?
                    } else {
                        false
                    };
                    frames.push(Frame {
                        enclosing,
                        taken: condition,
                        active: enclosing && condition,
                        saw_else: false,
                        start_line: line,
                    });
                    if !(enclosing && condition) {
                        inactive_frames += 1;
                    }
                }
                DirectiveKind::Elif => {
                    let frame =
                        frames
                            .last_mut()
                            .ok_or_else(|| ScanError::UnbalancedConditional {
                                file: rel.to_owned(),
                                line,
                                directive: "#elif".to_owned(),
                            })?;
                    if frame.saw_else {
                        return Err(ScanError::DirectiveSyntax {
                            file: rel.to_owned(),
                            line,
                            message: "#elif after #else".to_owned(),
                        });
                    }
                    if frame.active {
                        inactive_frames += 1;
                    }
                    frame.active = false;
                    if frame.enclosing {
                        self.mark(rel, line);
                        let needs_eval = !frames.last().expect("frame on stack").taken;
                        if needs_eval {
                            let condition = self.eval_expr(&directive.args, rel, line)?;
                            let frame = frames.last_mut().expect("frame still on stack");
                            if condition {
                                frame.taken = true;
                                frame.active = true;
                                inactive_frames -= 1;
                            }
                        }
                    }
                }
                DirectiveKind::Else => {
                    let frame =
                        frames
                            .last_mut()
                            .ok_or_else(|| ScanError::UnbalancedConditional {
                                file: rel.to_owned(),
                                line,
                                directive: "#else".to_owned(),
                            })?;
                    if frame.saw_else {
                        return Err(ScanError::DirectiveSyntax {
                            file: rel.to_owned(),
                            line,
                            message: "duplicate #else".to_owned(),
                        });
                    }
                    frame.saw_else = true;
                    let was_active = frame.active;
                    frame.active = frame.enclosing && !frame.taken;
                    frame.taken = true;
                    match (was_active, frame.active) {
                        (true, false) => inactive_frames += 1,
                        (false, true) => inactive_frames -= 1,
                        _ => {}
                    }
                    if frame.enclosing {
                        self.mark(rel, line);
                    }
                }
                DirectiveKind::Endif => {
                    let frame = frames
                        .pop()
                        .ok_or_else(|| ScanError::UnbalancedConditional {
                            file: rel.to_owned(),
                            line,
                            directive: "#endif".to_owned(),
                        })?;
                    if !frame.active {
                        inactive_frames -= 1;
                    }
                    if frame.enclosing {
                        self.mark(rel, line);
                    }
                }
                DirectiveKind::Define => {
                    if fully_active {
                        self.mark(rel, line);
                        self.eval_define(directive, rel, line)?;
                    }
                }
                DirectiveKind::Undef => {
                    if fully_active {
                        self.mark(rel, line);
                        let name = first_identifier(&directive.args).ok_or_else(|| {
                            ScanError::DirectiveSyntax {
                                file: rel.to_owned(),
                                line,
                                message: "#undef needs a macro name".to_owned(),
                            }
                        })?;
                        self.macros.undef(name);
                    }
                }
                DirectiveKind::Include => {
                    if fully_active {
                        self.mark(rel, line);
                        if depth + 1 > MAX_INCLUDE_DEPTH {
                            return Err(ScanError::IncludeDepthExceeded {
                                file: rel.to_owned(),
                                line,
                                limit: MAX_INCLUDE_DEPTH,
                            });
                        }
                        let target = parse_include_target(&directive.args, rel, line)?;
                        let resolved = self.resolve_include(rel, line, &target)?;
                        self.process_file(&resolved, depth + 1)?;
                    }
                }
                DirectiveKind::PragmaOnce => {
                    if fully_active {
                        self.mark(rel, line);
                        self.pragma_once.insert(rel.to_owned());
                    }
                }
                DirectiveKind::Other => {
                    if fully_active {
                        self.mark(rel, line);
                    }
                }
            }
        }

        if let Some(frame) = frames.last() {
            return Err(ScanError::MissingEndif {
                file: rel.to_owned(),
                line: frame.start_line,
            });
        }
        Ok(())
    }

    fn mark(&mut self, rel: &str, line: u32) {
        self.active.entry(rel.to_owned()).or_default().insert(line);
    }

    fn eval_condition(
        &mut self,
        directive: &DirectiveLine,
        file: &str,
        line: u32,
    ) -> Result<bool, ScanError> {
        match directive.kind {
            DirectiveKind::Ifdef | DirectiveKind::Ifndef => {
                let name = first_identifier(&directive.args).ok_or_else(|| {
                    ScanError::DirectiveSyntax {
                        file: file.to_owned(),
                        line,
                        message: "conditional needs a macro name".to_owned(),
                    }
                })?;
                let defined = self.macros.is_defined(name);
                Ok(if directive.kind == DirectiveKind::Ifdef {
                    defined
                } else {
                    !defined
                })
            }
            DirectiveKind::If => self.eval_expr(&directive.args, file, line),
            _ => unreachable!("eval_condition used on non-conditional"),
        }
    }

    fn eval_expr(&self, args: &str, file: &str, line: u32) -> Result<bool, ScanError> {
        match evaluate(args, &self.macros) {
            Ok(value) => Ok(value != 0),
            Err(ExprError::DivisionByZero) => Err(ScanError::DivisionByZero {
                file: file.to_owned(),
                line,
            }),
            Err(ExprError::Lex(message)) | Err(ExprError::Parse(message)) => Err(ScanError::Expr {
                file: file.to_owned(),
                line,
                message,
            }),
        }
    }

    fn eval_define(
        &mut self,
        directive: &DirectiveLine,
        file: &str,
        line: u32,
    ) -> Result<(), ScanError> {
        let args = directive.args.trim_start();
        let name = first_identifier(args).ok_or_else(|| ScanError::DirectiveSyntax {
            file: file.to_owned(),
            line,
            message: "#define needs a macro name".to_owned(),
        })?;
        let rest = &args[name.len()..];
        let def = if rest.starts_with('(') {
            // Function-like; recorded for defined() only.
            MacroDef::FunctionLike
        } else {
            MacroDef::Object(rest.trim().to_owned())
        };
        self.macros.define(name, def);
        Ok(())
    }

    fn resolve_include(
        &self,
        including: &str,
        line: u32,
        target: &IncludeTarget,
    ) -> Result<String, ScanError> {
        let (name, dirs): (&str, Vec<&str>) = match target {
            IncludeTarget::Quoted(name) => {
                let mut dirs = vec![parent_dir(including)];
                dirs.extend(self.include_dirs.iter().map(String::as_str));
                (name, dirs)
            }
            IncludeTarget::Angled(name) => {
                (name, self.include_dirs.iter().map(String::as_str).collect())
            }
        };
        let mut searched = Vec::new();
        for dir in dirs {
            if let Some(candidate) = normalize_under_root(dir, name) {
                if self.root.join(&candidate).is_file() {
                    return Ok(candidate);
                }
                searched.push(candidate);
            }
        }
        Err(ScanError::IncludeNotFound {
            file: including.to_owned(),
            line,
            target: name.to_owned(),
            searched,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directive_parsing_recognizes_kinds() {
        assert_eq!(parse_directive("#if FOO > 1").kind, DirectiveKind::If);
        assert_eq!(parse_directive("  #  ifdef X").kind, DirectiveKind::Ifdef);
        assert_eq!(
            parse_directive("#pragma once").kind,
            DirectiveKind::PragmaOnce
        );
        assert_eq!(
            parse_directive("#pragma omp parallel").kind,
            DirectiveKind::Other
        );
        assert_eq!(parse_directive("#error nope").kind, DirectiveKind::Other);
        assert_eq!(parse_directive("#").kind, DirectiveKind::Other);
        let d = parse_directive("#define MAX(a, b) ((a)>(b)?(a):(b))");
        assert_eq!(d.kind, DirectiveKind::Define);
        assert!(d.args.starts_with("MAX("));
    }

    #[test]
    fn directive_comments_stripped() {
        let d = parse_directive("#if FOO /* platform gate */ > 1 // trailing");
        assert_eq!(d.args, "FOO   > 1");
    }

    #[test]
    fn include_target_forms() {
        assert_eq!(
            parse_include_target("\"a/b.h\"", "f", 1).unwrap(),
            IncludeTarget::Quoted("a/b.h".into())
        );
        assert_eq!(
            parse_include_target("<sys.h>", "f", 1).unwrap(),
            IncludeTarget::Angled("sys.h".into())
        );
        assert!(parse_include_target("junk", "f", 1).is_err());
    }

    #[test]
    fn path_normalization_stays_under_root() {
        assert_eq!(
            normalize_under_root("src/kernels", "../common.h"),
            Some("src/common.h".into())
        );
        assert_eq!(normalize_under_root("", "a/./b.h"), Some("a/b.h".into()));
        assert_eq!(normalize_under_root("src", "../../escape.h"), None);
        assert_eq!(normalize_under_root("", "/abs/path.h"), None);
    }
}
