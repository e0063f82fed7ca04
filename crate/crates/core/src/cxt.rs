//! Context file formats: Burmeister `.cxt` and a binary CSV table.

use std::path::Path;

use crate::attrs::{AttributeSet, AttributeUniverse};
use crate::context::FormalContext;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ContextFormat {
    Burmeister,
    CsvBinary,
}

impl ContextFormat {
    /// `.csv` files are read as binary CSV, everything else as Burmeister.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => ContextFormat::CsvBinary,
            _ => ContextFormat::Burmeister,
        }
    }
}

pub fn parse_context(input: &[u8], format: ContextFormat) -> Result<FormalContext> {
    match format {
        ContextFormat::Burmeister => parse_burmeister(input),
        ContextFormat::CsvBinary => parse_csv(input),
    }
}

pub fn write_context(ctx: &FormalContext, format: ContextFormat) -> Vec<u8> {
    match format {
        ContextFormat::Burmeister => write_burmeister(ctx).into_bytes(),
        ContextFormat::CsvBinary => write_csv(ctx),
    }
}

pub fn read_context_file(path: &Path) -> Result<FormalContext> {
    let bytes = std::fs::read(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    parse_context(&bytes, ContextFormat::from_path(path))
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Split<'a, char>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.split('\n').enumerate(),
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.inner.next() {
            Some((i, line)) => Ok((i + 1, line.strip_suffix('\r').unwrap_or(line))),
            None => Err(Error::parse(0, format!("unexpected end of file, expected {what}"))),
        }
    }
}

fn parse_burmeister(input: &[u8]) -> Result<FormalContext> {
    let text = std::str::from_utf8(input).map_err(|e| Error::parse(1, format!("not UTF-8: {e}")))?;
    let mut lines = Lines::new(text);

    let (n, magic) = lines.next("header")?;
    if magic != "B" {
        return Err(Error::parse(n, format!("expected \"B\", found {magic:?}")));
    }
    // Line 2 is conventionally empty; some tools store a context name there.
    lines.next("name line")?;
    let count = |lines: &mut Lines, what: &str| -> Result<usize> {
        let (n, s) = lines.next(what)?;
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::parse(n, format!("expected {what}, found {s:?}")))
    };
    let objects = count(&mut lines, "object count")?;
    let attributes = count(&mut lines, "attribute count")?;
    let (n, blank) = lines.next("blank line")?;
    if !blank.trim().is_empty() {
        return Err(Error::parse(n, format!("expected blank line, found {blank:?}")));
    }

    let mut object_names = Vec::with_capacity(objects);
    for _ in 0..objects {
        let (n, name) = lines.next("object name")?;
        if name.is_empty() {
            return Err(Error::parse(n, "empty object name"));
        }
        if object_names.iter().any(|o: &(usize, String)| o.1 == name) {
            return Err(Error::parse(n, format!("duplicate object name {name:?}")));
        }
        object_names.push((n, name.to_string()));
    }
    let mut attribute_names = Vec::with_capacity(attributes);
    for _ in 0..attributes {
        let (n, name) = lines.next("attribute name")?;
        if name.is_empty() {
            return Err(Error::parse(n, "empty attribute name"));
        }
        if attribute_names.iter().any(|a: &String| a == name) {
            return Err(Error::parse(n, format!("duplicate attribute name {name:?}")));
        }
        attribute_names.push(name.to_string());
    }
    let universe = AttributeUniverse::new(attribute_names).map_err(|e| Error::parse(0, e.to_string()))?;

    let mut rows = Vec::with_capacity(objects);
    for (_, name) in object_names {
        let (n, line) = lines.next("incidence row")?;
        let cells = line.as_bytes();
        if cells.len() != attributes {
            return Err(Error::parse(
                n,
                format!("row has {} cells, expected {attributes}", cells.len()),
            ));
        }
        let mut row = AttributeSet::empty(attributes);
        for (i, c) in cells.iter().enumerate() {
            match c {
                b'X' | b'x' => row.insert(i),
                b'.' => {}
                other => {
                    return Err(Error::parse(
                        n,
                        format!("unexpected cell {:?} in column {}", *other as char, i + 1),
                    ))
                }
            }
        }
        rows.push((name, row));
    }
    while let Ok((n, rest)) = lines.next("") {
        if !rest.trim().is_empty() {
            return Err(Error::parse(n, "trailing content after incidence rows"));
        }
    }
    FormalContext::new(universe, rows).map_err(|e| Error::parse(0, e.to_string()))
}

fn write_burmeister(ctx: &FormalContext) -> String {
    let mut out = String::new();
    out.push_str("B\n\n");
    out.push_str(&format!("{}\n{}\n\n", ctx.object_count(), ctx.attribute_count()));
    for name in ctx.object_names() {
        out.push_str(name);
        out.push('\n');
    }
    for name in ctx.universe().names() {
        out.push_str(name);
        out.push('\n');
    }
    for row in ctx.rows() {
        for i in 0..ctx.attribute_count() {
            out.push(if row.contains(i) { 'X' } else { '.' });
        }
        out.push('\n');
    }
    out
}

/// Header cell above the object label column.
const CSV_LABEL_HEADER: &str = "object";

fn parse_csv(input: &[u8]) -> Result<FormalContext> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();
    let header = match records.next() {
        Some(r) => r?,
        None => return Err(Error::parse(1, "missing header row")),
    };
    if header.is_empty() {
        return Err(Error::parse(1, "missing header row"));
    }
    let universe = AttributeUniverse::new(header.iter().skip(1).map(str::to_string))
        .map_err(|e| Error::parse(1, e.to_string()))?;
    let width = header.len();
    let mut objects = Vec::new();
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != width {
            return Err(Error::parse(
                line,
                format!("row has {} cells, expected {width}", record.len()),
            ));
        }
        let name = record[0].to_string();
        let mut row = AttributeSet::empty(universe.len());
        for (i, cell) in record.iter().skip(1).enumerate() {
            match cell.trim() {
                "1" => row.insert(i),
                "0" => {}
                other => return Err(Error::parse(line, format!("expected 0 or 1, found {other:?}"))),
            }
        }
        if objects.iter().any(|(o, _): &(String, AttributeSet)| *o == name) {
            return Err(Error::parse(line, format!("duplicate object name {name:?}")));
        }
        objects.push((name, row));
    }
    FormalContext::new(universe, objects).map_err(|e| Error::parse(0, e.to_string()))
}

fn write_csv(ctx: &FormalContext) -> Vec<u8> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut header = vec![CSV_LABEL_HEADER.to_string()];
    header.extend(ctx.universe().names().iter().cloned());
    writer.write_record(&header).expect("in-memory write");
    for (name, row) in ctx.object_names().iter().zip(ctx.rows()) {
        let mut record = vec![name.clone()];
        record.extend((0..ctx.attribute_count()).map(|i| if row.contains(i) { "1" } else { "0" }.to_string()));
        writer.write_record(&record).expect("in-memory write");
    }
    writer.into_inner().expect("in-memory flush")
}
