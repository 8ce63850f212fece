//! Minimal INI reader that keeps line numbers for error messages.
//!
//! Syntax: `[section]` headers, `key = value` pairs, full-line comments
//! starting with `;` or `#`, and trailing comments introduced by whitespace
//! followed by `;` or `#`. Keys are case-sensitive. Duplicate sections and
//! duplicate keys within a section are errors.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IniEntry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IniSection {
    pub name: String,
    pub line: usize,
    pub entries: Vec<IniEntry>,
}

impl IniSection {
    pub fn get(&self, key: &str) -> Option<&IniEntry> {
        self.entries.iter().find(|e| e.key == key)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ini {
    pub sections: Vec<IniSection>,
}

impl Ini {
    pub fn section(&self, name: &str) -> Option<&IniSection> {
        self.sections.iter().find(|s| s.name == name)
    }
}

fn line_err(line: usize, msg: impl Into<String>) -> Error {
    Error::ConfigLine { line, msg: msg.into() }
}

fn strip_comment(s: &str) -> &str {
    let bytes = s.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b';' || bytes[i] == b'#') && bytes[i - 1].is_ascii_whitespace() {
            return &s[..i];
        }
    }
    s
}

pub fn parse_ini(text: &str) -> Result<Ini> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut ini = Ini::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with(';') || trimmed.starts_with('#') {
            continue;
        }
        let content = strip_comment(trimmed).trim_end();
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| line_err(line, "unterminated section header"))?.trim();
            if name.is_empty() || name.contains(['[', ']']) {
                return Err(line_err(line, format!("invalid section name '{name}'")));
            }
            if ini.section(name).is_some() {
                return Err(line_err(line, format!("duplicate section [{name}]")));
            }
            ini.sections.push(IniSection { name: name.to_string(), line, entries: Vec::new() });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| line_err(line, "expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(line_err(line, "empty key"));
        }
        let section = ini.sections.last_mut().ok_or_else(|| line_err(line, format!("key '{key}' outside any section")))?;
        if section.get(key).is_some() {
            return Err(line_err(line, format!("duplicate key '{key}' in [{}]", section.name)));
        }
        section.entries.push(IniEntry { key: key.to_string(), value: value.to_string(), line });
    }
    Ok(ini)
}
