use std::path::{Path, PathBuf};

use netsync_core::integrate::fmt17;
use netsync_core::Matrix;
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const OUT_ENV: &str = "NETSYNC_OUT";

/// `--out`, then the config's `out_dir`, then `$NETSYNC_OUT`, then the working directory.
pub fn resolve_out_dir(flag: Option<&Path>, config: Option<&Path>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.map(Path::to_path_buf))
        .or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Artifacts are buffered and written together once every computation has succeeded.
#[derive(Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn text(&mut self, name: impl Into<String>, body: String) {
        self.files.push((name.into(), body.into_bytes()));
    }

    pub fn bytes(&mut self, name: impl Into<String>, body: Vec<u8>) {
        self.files.push((name.into(), body));
    }

    pub fn json<T: Serialize>(&mut self, name: impl Into<String>, value: &T) {
        let mut body = serde_json::to_string_pretty(value).expect("artifact types serialize");
        body.push('\n');
        self.text(name, body);
    }

    /// Renders with a writer-based serializer (CSV emitters in the core crate).
    pub fn render<F>(&mut self, name: impl Into<String>, f: F)
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let mut buf = Vec::new();
        f(&mut buf).expect("writing to memory cannot fail");
        self.bytes(name, buf);
    }

    pub fn write_all(self, dir: &Path) -> CliResult<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, body) in self.files {
            let path = dir.join(&name);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
            }
            std::fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

pub fn matrix_csv(m: &Matrix) -> String {
    let mut out = (0..m.cols()).map(|c| format!("c{c}")).collect::<Vec<_>>().join(",");
    out.push('\n');
    for r in 0..m.rows() {
        let row: Vec<String> = m.row(r).iter().map(|v| fmt17(*v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Columns named in the header, first column as abscissa.
pub fn table_csv(header: &[String], columns: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    let rows = columns.first().map_or(0, Vec::len);
    for k in 0..rows {
        let row: Vec<String> = columns.iter().map(|c| fmt17(c[k])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// gnuplot script plotting columns `2..=n_series + 1` of a headed CSV against column 1.
pub fn gnuplot_script(csv: &str, title: &str, xlabel: &str, ylabel: &str, n_series: usize) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str(&format!("set title '{title}'\n"));
    s.push_str(&format!("set xlabel '{xlabel}'\nset ylabel '{ylabel}'\n"));
    s.push_str("set terminal pngcairo size 1000,600\n");
    s.push_str(&format!("set output '{}.png'\n", csv.trim_end_matches(".csv")));
    let series: Vec<String> = (0..n_series)
        .map(|i| format!("'{csv}' using 1:{} with lines", i + 2))
        .collect();
    s.push_str(&format!("plot {}\n", series.join(", \\\n     ")));
    s
}
