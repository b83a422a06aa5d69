//! Minimal YAML 1.2 subset: block/flow mappings and sequences plus plain or
//! quoted scalars. No anchors, aliases, tags, multi-line scalars, or
//! multi-document streams — document files do not need them, and the small
//! grammar keeps errors precise and the canonical form trivially stable.
//!
//! Mappings preserve key order (the canonical emitter relies on it) and
//! reject duplicate keys outright.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Number(f64),
    String(String),
    Sequence(Vec<Value>),
    Mapping(Vec<(String, Value)>),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Null => "null",
            Value::Bool(_) => "boolean",
            Value::Number(_) => "number",
            Value::String(_) => "string",
            Value::Sequence(_) => "sequence",
            Value::Mapping(_) => "mapping",
        }
    }

    /// Looks up a key in a mapping; `None` for other kinds.
    pub fn get(&self, key: &str) -> Option<&Value> {
        match self {
            Value::Mapping(entries) => entries.iter().find(|(k, _)| k == key).map(|(_, v)| v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl SyntaxError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        SyntaxError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Line {
    indent: usize,
    text: String,
    /// 1-based source line.
    line_no: usize,
    /// 1-based source column of the first character of `text`.
    col: usize,
}

fn is_dash_item(text: &str) -> bool {
    text == "-" || text.starts_with("- ")
}

/// Strips a trailing comment. `#` starts a comment at line start or after
/// whitespace, outside quotes.
fn strip_comment(raw: &str) -> &str {
    let bytes = raw.as_bytes();
    let mut in_single = false;
    let mut in_double = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate() {
        if in_double {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == b'"' {
                in_double = false;
            }
            continue;
        }
        if in_single {
            if b == b'\'' {
                in_single = false;
            }
            continue;
        }
        match b {
            b'"' => in_double = true,
            b'\'' => in_single = true,
            b'#' if i == 0 || bytes[i - 1].is_ascii_whitespace() => return &raw[..i],
            _ => {}
        }
    }
    raw
}

fn logical_lines(input: &str) -> Result<Vec<Line>, SyntaxError> {
    let mut lines = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line_no = i + 1;
        if let Some(tab) = raw.find('\t') {
            return Err(SyntaxError::new(
                line_no,
                tab + 1,
                "tabs are not allowed; indent with spaces",
            ));
        }
        let content = strip_comment(raw).trim_end();
        if content.trim().is_empty() {
            continue;
        }
        let indent = content.len() - content.trim_start().len();
        lines.push(Line {
            indent,
            text: content[indent..].to_string(),
            line_no,
            col: indent + 1,
        });
    }
    Ok(lines)
}

/// Parses one document. An input with no content yields `Value::Null`.
pub fn parse(input: &str) -> Result<Value, SyntaxError> {
    let lines = logical_lines(input)?;
    if lines.is_empty() {
        return Ok(Value::Null);
    }
    let mut parser = Parser { lines, pos: 0 };
    let root_indent = parser.lines[0].indent;
    let value = parser.parse_node(root_indent)?;
    if parser.pos < parser.lines.len() {
        let line = &parser.lines[parser.pos];
        return Err(SyntaxError::new(
            line.line_no,
            line.col,
            "content dedents below the document root",
        ));
    }
    Ok(value)
}

struct Parser {
    lines: Vec<Line>,
    pos: usize,
}

impl Parser {
    fn parse_node(&mut self, indent: usize) -> Result<Value, SyntaxError> {
        let line = &self.lines[self.pos];
        if is_dash_item(&line.text) {
            self.parse_sequence(indent)
        } else if line_is_mapping_entry(&line.text) {
            self.parse_mapping(indent)
        } else {
            // A lone scalar node (only legal as a whole document or a
            // sequence item continuation).
            let line = self.lines[self.pos].clone();
            self.pos += 1;
            parse_scalar_text(&line.text, line.line_no, line.col)
        }
    }

    fn parse_sequence(&mut self, indent: usize) -> Result<Value, SyntaxError> {
        let mut items = Vec::new();
        while self.pos < self.lines.len() {
            let line = self.lines[self.pos].clone();
            if line.indent < indent {
                break;
            }
            if line.indent > indent {
                return Err(SyntaxError::new(
                    line.line_no,
                    line.col,
                    "unexpected indentation",
                ));
            }
            if !is_dash_item(&line.text) {
                break; // sibling mapping key of the parent
            }
            if line.text == "-" {
                self.pos += 1;
                if self.pos < self.lines.len() && self.lines[self.pos].indent > indent {
                    let child_indent = self.lines[self.pos].indent;
                    items.push(self.parse_node(child_indent)?);
                } else {
                    items.push(Value::Null);
                }
                continue;
            }
            // Content on the dash line: re-enter the parser as if the item
            // started on its own line at the content's column.
            let rest = &line.text[1..];
            let trimmed = rest.trim_start();
            let offset = line.text.len() - trimmed.len();
            self.lines[self.pos] = Line {
                indent: indent + offset,
                text: trimmed.to_string(),
                line_no: line.line_no,
                col: line.col + offset,
            };
            items.push(self.parse_node(indent + offset)?);
        }
        Ok(Value::Sequence(items))
    }

    fn parse_mapping(&mut self, indent: usize) -> Result<Value, SyntaxError> {
        let mut entries: Vec<(String, Value)> = Vec::new();
        while self.pos < self.lines.len() {
            let line = self.lines[self.pos].clone();
            if line.indent < indent {
                break;
            }
            if line.indent > indent {
                return Err(SyntaxError::new(
                    line.line_no,
                    line.col,
                    "unexpected indentation",
                ));
            }
            if is_dash_item(&line.text) {
                return Err(SyntaxError::new(
                    line.line_no,
                    line.col,
                    "expected a mapping key, found a sequence item",
                ));
            }
            let (key, rest, rest_col) = split_key(&line)?;
            if entries.iter().any(|(k, _)| *k == key) {
                return Err(SyntaxError::new(
                    line.line_no,
                    line.col,
                    format!("duplicate key `{key}`"),
                ));
            }
            self.pos += 1;
            let value = if rest.is_empty() {
                self.parse_block_value(indent)?
            } else {
                parse_scalar_text(&rest, line.line_no, rest_col)?
            };
            entries.push((key, value));
        }
        Ok(Value::Mapping(entries))
    }

    /// Value of a `key:` line with nothing after the colon: an indented
    /// block, a sequence at the key's own indent, or null.
    fn parse_block_value(&mut self, indent: usize) -> Result<Value, SyntaxError> {
        if self.pos >= self.lines.len() {
            return Ok(Value::Null);
        }
        let next = &self.lines[self.pos];
        if next.indent > indent {
            let child_indent = next.indent;
            self.parse_node(child_indent)
        } else if next.indent == indent && is_dash_item(&next.text) {
            self.parse_sequence(indent)
        } else {
            Ok(Value::Null)
        }
    }
}

/// Does this line start a `key: value` or `key:` entry?
fn line_is_mapping_entry(text: &str) -> bool {
    find_key_colon(text).is_some()
}

/// Byte index of the colon ending the key, honoring a quoted key. The colon
/// must be followed by a space or end the line.
fn find_key_colon(text: &str) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut i = 0;
    match bytes.first() {
        Some(b'"') | Some(b'\'') => {
            let quote = bytes[0];
            i = 1;
            while i < bytes.len() {
                if bytes[i] == quote {
                    // Single-quote escaping ('') is not used in keys.
                    i += 1;
                    break;
                }
                if quote == b'"' && bytes[i] == b'\\' {
                    i += 1;
                }
                i += 1;
            }
        }
        Some(b'[') | Some(b'{') => return None,
        _ => {}
    }
    while i < bytes.len() {
        if bytes[i] == b':' && (i + 1 == bytes.len() || bytes[i + 1] == b' ') {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn split_key(line: &Line) -> Result<(String, String, usize), SyntaxError> {
    let colon = find_key_colon(&line.text).ok_or_else(|| {
        SyntaxError::new(line.line_no, line.col, "expected `key:` or `key: value`")
    })?;
    let raw_key = line.text[..colon].trim_end();
    if raw_key.is_empty() {
        return Err(SyntaxError::new(line.line_no, line.col, "empty mapping key"));
    }
    let key = if raw_key.starts_with('"') || raw_key.starts_with('\'') {
        match parse_scalar_text(raw_key, line.line_no, line.col)? {
            Value::String(s) => s,
            other => {
                return Err(SyntaxError::new(
                    line.line_no,
                    line.col,
                    format!("key must be a string, found {}", other.type_name()),
                ))
            }
        }
    } else {
        raw_key.to_string()
    };
    let rest = line.text[colon + 1..].trim_start();
    let rest_col = line.col + colon + 1 + (line.text.len() - colon - 1 - rest.len());
    Ok((key, rest.to_string(), rest_col))
}

/// Parses a scalar or one-line flow collection occupying `text` entirely.
fn parse_scalar_text(text: &str, line_no: usize, col: usize) -> Result<Value, SyntaxError> {
    let mut flow = FlowParser {
        text: text.as_bytes(),
        pos: 0,
        line_no,
        start_col: col,
    };
    match text.as_bytes().first() {
        Some(b'[') | Some(b'{') | Some(b'"') | Some(b'\'') => {
            let value = flow.parse_value()?;
            flow.skip_spaces();
            if flow.pos < flow.text.len() {
                return Err(SyntaxError::new(
                    line_no,
                    flow.col(),
                    "unexpected trailing content after value",
                ));
            }
            Ok(value)
        }
        _ => Ok(type_plain_scalar(text)),
    }
}

/// Classifies an unquoted scalar: boolean, null, number, or plain string.
fn type_plain_scalar(text: &str) -> Value {
    match text {
        "true" => return Value::Bool(true),
        "false" => return Value::Bool(false),
        "null" | "~" => return Value::Null,
        _ => {}
    }
    if looks_numeric(text) {
        if let Ok(x) = text.parse::<f64>() {
            return Value::Number(x);
        }
    }
    Value::String(text.to_string())
}

fn looks_numeric(text: &str) -> bool {
    !text.is_empty()
        && text
            .bytes()
            .all(|b| b.is_ascii_digit() || matches!(b, b'+' | b'-' | b'.' | b'e' | b'E'))
        && text.bytes().any(|b| b.is_ascii_digit())
}

struct FlowParser<'a> {
    text: &'a [u8],
    pos: usize,
    line_no: usize,
    start_col: usize,
}

impl FlowParser<'_> {
    fn col(&self) -> usize {
        self.start_col + self.pos
    }

    fn err(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError::new(self.line_no, self.col(), message)
    }

    fn skip_spaces(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos] == b' ' {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn parse_value(&mut self) -> Result<Value, SyntaxError> {
        self.skip_spaces();
        match self.peek() {
            Some(b'[') => self.parse_flow_sequence(),
            Some(b'{') => self.parse_flow_mapping(),
            Some(b'"') => self.parse_double_quoted(),
            Some(b'\'') => self.parse_single_quoted(),
            Some(_) => self.parse_flow_plain(),
            None => Err(self.err("expected a value")),
        }
    }

    fn parse_flow_sequence(&mut self) -> Result<Value, SyntaxError> {
        self.pos += 1; // '['
        let mut items = Vec::new();
        self.skip_spaces();
        if self.peek() == Some(b']') {
            self.pos += 1;
            return Ok(Value::Sequence(items));
        }
        loop {
            items.push(self.parse_value()?);
            self.skip_spaces();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b']') => {
                    self.pos += 1;
                    return Ok(Value::Sequence(items));
                }
                _ => return Err(self.err("expected `,` or `]` in flow sequence")),
            }
        }
    }

    fn parse_flow_mapping(&mut self) -> Result<Value, SyntaxError> {
        self.pos += 1; // '{'
        let mut entries: Vec<(String, Value)> = Vec::new();
        self.skip_spaces();
        if self.peek() == Some(b'}') {
            self.pos += 1;
            return Ok(Value::Mapping(entries));
        }
        loop {
            self.skip_spaces();
            let key = match self.peek() {
                Some(b'"') => match self.parse_double_quoted()? {
                    Value::String(s) => s,
                    _ => unreachable!(),
                },
                Some(b'\'') => match self.parse_single_quoted()? {
                    Value::String(s) => s,
                    _ => unreachable!(),
                },
                _ => {
                    let start = self.pos;
                    while let Some(b) = self.peek() {
                        if matches!(b, b':' | b',' | b'}') {
                            break;
                        }
                        self.pos += 1;
                    }
                    String::from_utf8_lossy(&self.text[start..self.pos])
                        .trim()
                        .to_string()
                }
            };
            if key.is_empty() {
                return Err(self.err("empty key in flow mapping"));
            }
            if entries.iter().any(|(k, _)| *k == key) {
                return Err(self.err(format!("duplicate key `{key}`")));
            }
            self.skip_spaces();
            if self.peek() != Some(b':') {
                return Err(self.err("expected `:` in flow mapping"));
            }
            self.pos += 1;
            let value = self.parse_value()?;
            entries.push((key, value));
            self.skip_spaces();
            match self.peek() {
                Some(b',') => {
                    self.pos += 1;
                }
                Some(b'}') => {
                    self.pos += 1;
                    return Ok(Value::Mapping(entries));
                }
                _ => return Err(self.err("expected `,` or `}` in flow mapping")),
            }
        }
    }

    fn parse_double_quoted(&mut self) -> Result<Value, SyntaxError> {
        self.pos += 1; // '"'
        let mut out = String::new();
        while let Some(b) = self.peek() {
            self.pos += 1;
            match b {
                b'"' => return Ok(Value::String(out)),
                b'\\' => {
                    let escape = self.peek().ok_or_else(|| self.err("unfinished escape"))?;
                    self.pos += 1;
                    out.push(match escape {
                        b'"' => '"',
                        b'\\' => '\\',
                        b'n' => '\n',
                        b't' => '\t',
                        b'r' => '\r',
                        other => {
                            return Err(self.err(format!(
                                "unsupported escape `\\{}`",
                                other as char
                            )))
                        }
                    });
                }
                _ => {
                    // Re-borrow as str to keep multi-byte characters intact.
                    let start = self.pos - 1;
                    let text = std::str::from_utf8(self.text)
                        .map_err(|_| self.err("invalid UTF-8"))?;
                    let ch = text[start..].chars().next().unwrap();
                    out.push(ch);
                    self.pos = start + ch.len_utf8();
                }
            }
        }
        Err(self.err("unterminated double-quoted string"))
    }

    fn parse_single_quoted(&mut self) -> Result<Value, SyntaxError> {
        self.pos += 1; // '\''
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return Err(self.err("unterminated single-quoted string")),
                Some(b'\'') => {
                    self.pos += 1;
                    if self.peek() == Some(b'\'') {
                        out.push('\'');
                        self.pos += 1;
                    } else {
                        return Ok(Value::String(out));
                    }
                }
                Some(_) => {
                    let start = self.pos;
                    let text = std::str::from_utf8(self.text)
                        .map_err(|_| self.err("invalid UTF-8"))?;
                    let ch = text[start..].chars().next().unwrap();
                    out.push(ch);
                    self.pos = start + ch.len_utf8();
                }
            }
        }
    }

    fn parse_flow_plain(&mut self) -> Result<Value, SyntaxError> {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if matches!(b, b',' | b']' | b'}' | b':') {
                break;
            }
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.text[start..self.pos])
            .map_err(|_| self.err("invalid UTF-8"))?
            .trim()
            .to_string();
        if text.is_empty() {
            return Err(self.err("empty flow scalar"));
        }
        Ok(type_plain_scalar(&text))
    }
}

// ---------------------------------------------------------------------------
// Canonical emission

/// Emits the canonical text form: two-space indentation, block style for all
/// non-empty collections, `[]`/`{}` for empty ones, minimal quoting, and
/// shortest round-tripping number formatting. Emitting is the inverse of
/// [`parse`] up to scalar normalization, and a fixpoint on its own output.
pub fn emit(value: &Value) -> String {
    let mut out = String::new();
    match value {
        Value::Mapping(e) if !e.is_empty() => emit_mapping(&mut out, e, 0, false),
        Value::Sequence(items) if !items.is_empty() => emit_sequence(&mut out, items, 0),
        other => {
            out.push_str(&scalar_text(other));
            out.push('\n');
        }
    }
    out
}

fn is_inline(value: &Value) -> bool {
    match value {
        Value::Null | Value::Bool(_) | Value::Number(_) | Value::String(_) => true,
        Value::Sequence(items) => items.is_empty(),
        Value::Mapping(entries) => entries.is_empty(),
    }
}

fn emit_mapping(out: &mut String, entries: &[(String, Value)], indent: usize, inline_first: bool) {
    for (i, (key, value)) in entries.iter().enumerate() {
        if !(inline_first && i == 0) {
            out.push_str(&" ".repeat(indent));
        }
        out.push_str(&quote_if_needed(key));
        out.push(':');
        if is_inline(value) {
            out.push(' ');
            out.push_str(&scalar_text(value));
            out.push('\n');
        } else {
            out.push('\n');
            emit_node(out, value, indent + 2);
        }
    }
}

fn emit_sequence(out: &mut String, items: &[Value], indent: usize) {
    for item in items {
        out.push_str(&" ".repeat(indent));
        if is_inline(item) {
            out.push_str("- ");
            out.push_str(&scalar_text(item));
            out.push('\n');
        } else {
            match item {
                Value::Mapping(entries) => {
                    out.push_str("- ");
                    emit_mapping(out, entries, indent + 2, true);
                }
                Value::Sequence(nested) => {
                    out.push_str("-\n");
                    emit_sequence(out, nested, indent + 2);
                }
                _ => unreachable!("inline handled above"),
            }
        }
    }
}

fn emit_node(out: &mut String, value: &Value, indent: usize) {
    match value {
        Value::Mapping(entries) => emit_mapping(out, entries, indent, false),
        Value::Sequence(items) => emit_sequence(out, items, indent),
        other => {
            out.push_str(&" ".repeat(indent));
            out.push_str(&scalar_text(other));
            out.push('\n');
        }
    }
}

fn scalar_text(value: &Value) -> String {
    match value {
        Value::Null => "null".to_string(),
        Value::Bool(true) => "true".to_string(),
        Value::Bool(false) => "false".to_string(),
        Value::Number(x) => format_number(*x),
        Value::String(s) => quote_if_needed(s),
        Value::Sequence(items) => {
            debug_assert!(items.is_empty());
            "[]".to_string()
        }
        Value::Mapping(entries) => {
            debug_assert!(entries.is_empty());
            "{}".to_string()
        }
    }
}

/// Shortest decimal text that parses back to exactly the same f64.
/// Negative zero is folded to zero so equal-comparing values emit equally.
pub fn format_number(x: f64) -> String {
    debug_assert!(x.is_finite(), "document numbers must be finite");
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x}")
}

fn quote_if_needed(s: &str) -> String {
    if needs_quoting(s) {
        let mut out = String::with_capacity(s.len() + 2);
        out.push('"');
        for ch in s.chars() {
            match ch {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                '\t' => out.push_str("\\t"),
                '\r' => out.push_str("\\r"),
                other => out.push(other),
            }
        }
        out.push('"');
        out
    } else {
        s.to_string()
    }
}

fn needs_quoting(s: &str) -> bool {
    if s.is_empty() || s.trim() != s {
        return true;
    }
    // Strings the parser would type as something other than a string.
    if matches!(s, "true" | "false" | "null" | "~") || (looks_numeric(s) && s.parse::<f64>().is_ok())
    {
        return true;
    }
    let first = s.chars().next().unwrap();
    if "-?:,[]{}#&*!|>'\"%@`".contains(first) {
        return true;
    }
    // A colon that ends the key span, a comment start, flow punctuation, or
    // control characters would change the parse.
    let bytes = s.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b':' if i + 1 == bytes.len() || bytes[i + 1] == b' ' => return true,
            b'#' if i > 0 && bytes[i - 1] == b' ' => return true,
            b'[' | b']' | b'{' | b'}' | b'"' | b'\'' => return true,
            0..=0x1f => return true,
            _ => {}
        }
    }
    false
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&emit(self))
    }
}
