//! Output files with a provenance header.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use re100::format::Document;
use re100::{Error, Result};

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Directory for output files.
    #[arg(long, default_value = ".", value_name = "DIR")]
    pub out: PathBuf,
    /// File name stem; defaults to the subcommand name.
    #[arg(long, value_name = "STEM")]
    pub name: Option<String>,
    /// Skip SVG plots.
    #[arg(long)]
    pub no_plot: bool,
}

/// Tool version and effective arguments of this invocation.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub version: String,
    pub args: Vec<String>,
}

impl Provenance {
    pub fn new(args: &[String]) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            args: args.iter().skip(1).cloned().collect(),
        }
    }
}

pub struct Output {
    dir: PathBuf,
    stem: String,
    plots: bool,
    header: Vec<String>,
}

fn quote(a: &str) -> String {
    if a.is_empty() || a.contains(char::is_whitespace) {
        format!("'{a}'")
    } else {
        a.to_string()
    }
}

impl Output {
    pub fn new(
        run: &Provenance,
        args: &OutputArgs,
        command: &str,
        inputs: &[String],
    ) -> Result<Self> {
        fs::create_dir_all(&args.out)
            .map_err(|e| Error::Io(format!("{}: {e}", args.out.display())))?;
        let mut header = vec![
            format!("re100 {}", run.version),
            format!(
                "args: {}",
                run.args
                    .iter()
                    .map(|a| quote(a))
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
        ];
        header.extend(inputs.iter().cloned());
        Ok(Self {
            dir: args.out.clone(),
            stem: args.name.clone().unwrap_or_else(|| command.to_string()),
            plots: !args.no_plot,
            header,
        })
    }

    pub fn plots(&self) -> bool {
        self.plots
    }

    fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}", self.stem))
    }

    fn write(&self, path: &Path, text: &str) -> Result<()> {
        fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(())
    }

    pub fn document(&self, suffix: &str, mut doc: Document) -> Result<()> {
        let mut comments = self.header.clone();
        comments.append(&mut doc.comments);
        doc.comments = comments;
        self.write(&self.path(suffix), &doc.render())
    }

    pub fn table(&self, suffix: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(columns).map_err(io)?;
        for r in rows {
            w.write_record(r).map_err(io)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?)
            .expect("csv output is utf-8");
        let mut text: String = self.header.iter().map(|h| format!("# {h}\n")).collect();
        text.push_str(&body);
        self.write(&self.path(suffix), &text)
    }

    pub fn text(&self, suffix: &str, body: &str) -> Result<()> {
        let mut text: String = self.header.iter().map(|h| format!("# {h}\n")).collect();
        text.push_str(body);
        self.write(&self.path(suffix), &text)
    }

    pub fn svg(&self, suffix: &str, svg: String) -> Result<()> {
        if !self.plots {
            return Ok(());
        }
        let escaped: Vec<String> = self.header.iter().map(|h| h.replace("--", "- -")).collect();
        let text = format!("<!--\n{}\n-->\n{svg}", escaped.join("\n"));
        self.write(&self.path(suffix), &text)
    }
}

/// Shortest exact text for a number in tables.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}
