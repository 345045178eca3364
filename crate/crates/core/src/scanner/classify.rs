//! Physical-line classification for C-family sources.
//!
//! Every line gets exactly one class. Classification is config-independent:
//! it only tracks comments and string literals, never macro state.

use serde::Serialize;

/// Class of one physical source line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LineClass {
    /// Contains at least one token that is neither whitespace nor comment.
    Code,
    /// Contains comment content and nothing else significant.
    Comment,
    /// Whitespace only.
    Blank,
    /// Begins (after whitespace) with `#` outside any comment.
    Directive,
}

/// Unterminated block comment, reported with its opening line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnterminatedComment {
    pub start_line: u32,
}

/// Splits text into physical lines, accepting LF and CRLF delimiters.
pub(crate) fn split_lines(text: &str) -> Vec<&str> {
    if text.is_empty() {
        return Vec::new();
    }
    let body = text.strip_suffix('\n').unwrap_or(text);
    body.split('\n')
        .map(|line| line.strip_suffix('\r').unwrap_or(line))
        .collect()
}

/// Classifies every line of `text`.
///
/// Block comments may span lines; a `//` comment runs to end of line; string
/// and character literals hide comment openers. A line wholly inside a block
/// comment is `Comment` unless it is empty, which stays `Blank`. Directive
/// detection looks only at the first non-whitespace character of the line
/// and whether a block comment carried over onto it.
pub fn classify_lines(text: &str) -> Result<Vec<LineClass>, UnterminatedComment> {
    let lines = split_lines(text);
    let mut classes = Vec::with_capacity(lines.len());
    let mut in_block: Option<u32> = None;

    for (idx, raw) in lines.iter().enumerate() {
        let line_no = idx as u32 + 1;
        let mut saw_code = false;
        let mut saw_comment = in_block.is_some() && !raw.trim().is_empty();
        let is_directive = in_block.is_none() && raw.trim_start().starts_with('#');

        let bytes = raw.as_bytes();
        let mut i = 0;
        // Within-line lexing state; strings never cross lines here.
        #[derive(PartialEq)]
        enum Mode {
            Normal,
            Str,
            Chr,
        }
        let mut mode = Mode::Normal;
        let mut block = in_block.is_some();

        while i < bytes.len() {
            let c = bytes[i];
            if block {
                if c == b'*' && bytes.get(i + 1) == Some(&b'/') {
                    block = false;
                    in_block = None;
                    i += 2;
                } else {
                    i += 1;
                }
                continue;
            }
            match mode {
                Mode::Str => {
                    if c == b'\\' {
                        i += 2;
                    } else {
                        if c == b'"' {
                            mode = Mode::Normal;
                        }
                        i += 1;
                    }
                }
                Mode::Chr => {
                    if c == b'\\' {
                        i += 2;
                    } else {
                        if c == b'\'' {
                            mode = Mode::Normal;
                        }
                        i += 1;
                    }
                }
                Mode::Normal => {
                    if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
                        saw_comment = true;
                        break; // rest of line is comment
                    } else if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
                        saw_comment = true;
                        block = true;
                        in_block = Some(line_no);
                        i += 2;
                    } else if c == b'"' {
                        saw_code = true;
                        mode = Mode::Str;
                        i += 1;
                    } else if c == b'\'' {
                        saw_code = true;
                        mode = Mode::Chr;
                        i += 1;
                    } else {
                        if !c.is_ascii_whitespace() {
                            saw_code = true;
                        }
                        i += 1;
                    }
                }
            }
        }

        let class = if raw.trim().is_empty() {
            LineClass::Blank
        } else if is_directive {
            LineClass::Directive
        } else if saw_code {
            LineClass::Code
        } else if saw_comment {
            LineClass::Comment
        } else {
            // Non-empty, no code, no comment: whitespace variants only.
            LineClass::Blank
        };
        classes.push(class);
    }

    if let Some(start_line) = in_block {
        return Err(UnterminatedComment { start_line });
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use LineClass::*;

    #[test]
    fn hand_classified_mixture() {
        let text = "int x; // c\n\n/* b */\ny();";
        assert_eq!(
            classify_lines(text).unwrap(),
            vec![Code, Blank, Comment, Code]
        );
    }

    #[test]
    fn empty_file_has_no_lines() {
        assert_eq!(classify_lines("").unwrap(), Vec::<LineClass>::new());
    }

    #[test]
    fn trailing_code_after_comment_dominates() {
        assert_eq!(classify_lines("  /* a */ int y;").unwrap(), vec![Code]);
    }

    #[test]
    fn directives_detected_after_whitespace() {
        let text = "  #if FOO\nx;\n#endif";
        assert_eq!(
            classify_lines(text).unwrap(),
            vec![Directive, Code, Directive]
        );
    }

    #[test]
    fn block_comment_spans_lines() {
        let text = "/* start\nmiddle # not directive\n\nend */ code();";
        assert_eq!(
            classify_lines(text).unwrap(),
            vec![Comment, Comment, Blank, Code]
        );
    }

    #[test]
    fn comment_openers_inside_strings_ignored() {
        let text = "const char* s = \"/* no */\";\nconst char c = '\\'';";
        assert_eq!(classify_lines(text).unwrap(), vec![Code, Code]);
    }

    #[test]
    fn crlf_and_trailing_whitespace_insensitive() {
        let unix = "int a;\n\n// c\n";
        let dos = "int a;\r\n\r\n// c\r\n";
        let padded = "int a;   \n   \n// c   \n";
        assert_eq!(classify_lines(unix).unwrap(), classify_lines(dos).unwrap());
        assert_eq!(
            classify_lines(unix).unwrap(),
            classify_lines(padded).unwrap()
        );
    }

    #[test]
    fn unterminated_comment_reports_start_line() {
        let text = "x;\n/* open\nstill open";
        assert_eq!(
            classify_lines(text),
            Err(UnterminatedComment { start_line: 2 })
        );
    }

    #[test]
    fn line_comment_hides_block_opener() {
        let text = "// open? /*\nint x;";
        assert_eq!(classify_lines(text).unwrap(), vec![Comment, Code]);
    }

    #[test]
    fn directive_with_trailing_block_comment_keeps_state() {
        let text = "#if A /* spans\n*/\nx;\n#endif";
        assert_eq!(
            classify_lines(text).unwrap(),
            vec![Directive, Comment, Code, Directive]
        );
    }
}
