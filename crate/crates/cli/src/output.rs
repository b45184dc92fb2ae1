use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// Report line on standard output; a reader that went away (`| head`) is
/// not an error.
macro_rules! say {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}
pub(crate) use say;

/// Resolved configuration echoed as `# key = value` lines.
#[derive(Debug, Clone, Default)]
pub struct Header {
    entries: Vec<(String, String)>,
}

impl Header {
    pub fn new(subcommand: &str) -> Self {
        let mut h = Self::default();
        h.push("tool", format!("weakderiv {}", env!("CARGO_PKG_VERSION")));
        h.push("subcommand", subcommand);
        h
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    fn write(&self, w: &mut dyn Write) -> io::Result<()> {
        for (k, v) in &self.entries {
            writeln!(w, "# {k} = {v}")?;
        }
        Ok(())
    }
}

/// CSV table with a fixed column schema.
pub struct Table {
    columns: Vec<String>,
    rows: Vec<String>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns.len());
        self.rows.push(fields.join(","));
    }

    /// Write to `path`, or to standard output when `None`.
    pub fn emit(&self, header: &Header, path: Option<&Path>) -> io::Result<()> {
        match path {
            Some(p) => {
                let mut w = BufWriter::new(File::create(p)?);
                self.write(header, &mut w)?;
                w.flush()
            }
            None => {
                let stdout = io::stdout();
                let mut w = BufWriter::new(stdout.lock());
                match self.write(header, &mut w).and_then(|_| w.flush()) {
                    Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                    r => r,
                }
            }
        }
    }

    fn write(&self, header: &Header, w: &mut dyn Write) -> io::Result<()> {
        header.write(w)?;
        writeln!(w, "{}", self.columns.join(","))?;
        for r in &self.rows {
            writeln!(w, "{r}")?;
        }
        Ok(())
    }
}

/// Shortest round-trip representation; deterministic across runs.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

/// Quote a free-text CSV field.
pub fn text(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}
