//! Report writers. Floats in CSV use 17 significant digits so that repeated
//! runs are byte-identical.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn fmt_f64(x: f64) -> String {
    // adding 0.0 folds -0.0 into 0.0
    format!("{:.16e}", x + 0.0)
}

pub fn header_comment(config_hash: &str) -> String {
    format!("# disclosure v{VERSION} config-hash={config_hash}")
}

/// CSV table with a versioned comment line and fixed columns.
pub struct Csv {
    writer: csv::Writer<Vec<u8>>,
    columns: usize,
}

impl Csv {
    pub fn new(config_hash: &str, columns: &[&str]) -> Self {
        let mut buf = header_comment(config_hash).into_bytes();
        buf.push(b'\n');
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(buf);
        writer.write_record(columns).expect("in-memory csv write");
        Self { writer, columns: columns.len() }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        assert_eq!(cells.len(), self.columns, "csv row width");
        self.writer.write_record(cells.iter().map(Cell::render)).expect("in-memory csv write");
    }

    pub fn into_string(self) -> String {
        let bytes = self.writer.into_inner().expect("in-memory csv flush");
        String::from_utf8(bytes).expect("csv output is utf-8")
    }
}

pub enum Cell {
    F(f64),
    I(u64),
    S(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => fmt_f64(*x),
            Cell::I(n) => n.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

/// Writes `name` under `dir`, creating the directory if needed.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Minimal SVG 1.1 canvas with a data-to-pixel transform.
pub struct Svg {
    body: String,
    width: f64,
    height: f64,
    margin: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Svg {
    pub fn new(width: f64, height: f64, x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |r: (f64, f64)| if r.1 > r.0 { r } else { (r.0 - 0.5, r.0 + 0.5) };
        Self { body: String::new(), width, height, margin: 60.0, x: pad(x), y: pad(y) }
    }

    pub fn px(&self, x: f64) -> f64 {
        self.margin + (x - self.x.0) / (self.x.1 - self.x.0) * (self.width - 2.0 * self.margin)
    }

    pub fn py(&self, y: f64) -> f64 {
        self.height - self.margin - (y - self.y.0) / (self.y.1 - self.y.0) * (self.height - 2.0 * self.margin)
    }

    pub fn axes(&mut self, x_label: &str, y_label: &str) {
        let (x0, x1, y0, y1) = (self.px(self.x.0), self.px(self.x.1), self.py(self.y.0), self.py(self.y.1));
        let _ = writeln!(
            self.body,
            r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y0 - y1
        );
        for (v, anchor_x) in [(self.x.0, x0), (self.x.1, x1)] {
            let _ = writeln!(
                self.body,
                r#"<text x="{anchor_x:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
                y0 + 16.0,
                short(v)
            );
        }
        for (v, anchor_y) in [(self.y.0, y0), (self.y.1, y1)] {
            let _ = writeln!(
                self.body,
                r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="end">{}</text>"#,
                x0 - 6.0,
                anchor_y + 4.0,
                short(v)
            );
        }
        let _ = writeln!(
            self.body,
            r#"<text x="{:.2}" y="{:.2}" font-size="14" text-anchor="middle">{}</text>"#,
            0.5 * (x0 + x1),
            self.height - 15.0,
            escape(x_label)
        );
        let _ = writeln!(
            self.body,
            r#"<text x="15" y="{:.2}" font-size="14" text-anchor="middle" transform="rotate(-90 15 {:.2})">{}</text>"#,
            0.5 * (y0 + y1),
            0.5 * (y0 + y1),
            escape(y_label)
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64, dash: Option<&str>) {
        let pts: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y))).collect();
        let dash = dash.map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"{dash}/>"#,
            pts.join(" ")
        );
    }

    pub fn rect(&mut self, x: (f64, f64), y: (f64, f64), fill: &str) {
        let (x0, x1) = (self.px(x.0), self.px(x.1));
        let (y0, y1) = (self.py(y.1), self.py(y.0));
        let _ = writeln!(
            self.body,
            r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
            x1 - x0,
            y1 - y0
        );
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}"/>"#, self.px(x), self.py(y));
    }

    pub fn text(&mut self, x_px: f64, y_px: f64, size: u32, s: &str) {
        let _ = writeln!(self.body, r#"<text x="{x_px:.2}" y="{y_px:.2}" font-size="{size}">{}</text>"#, escape(s));
    }

    pub fn finish(self, title: &str) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<title>{t}</title>\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n{body}</svg>\n",
            w = self.width,
            h = self.height,
            t = escape(title),
            body = self.body
        )
    }
}

fn short(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
