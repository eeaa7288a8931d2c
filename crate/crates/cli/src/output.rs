//! Matrix and ledger files. Values are decimal strings with enough digits to
//! reproduce the binary value at the stated precision, so every file parses
//! back to the same matrix and re-emits byte for byte.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sobspec_core::christoffel::ChristoffelLedger;
use sobspec_core::oracle::SquaredEntry;
use sobspec_core::real::{self, Real};
use sobspec_core::sobolev::SobolevLedger;
use sobspec_core::BandedMatrix;

use crate::config::{parse_number, Format};
use crate::error::CliError;

/// `(i, j, numerator, denominator, sign)` of a squared entry.
pub type ExactEntry = (usize, usize, String, String, i8);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub name: String,
    pub nrows: usize,
    pub ncols: usize,
    pub lower_bw: usize,
    pub upper_bw: usize,
    pub exact_size: usize,
    pub precision: u32,
    /// Band entries `[i, j, value]`, row-major.
    pub entries: Vec<(usize, usize, String)>,
    /// Exact entries `[i, j, num, den, sign]` of the squared value, where the
    /// rational oracle covers the spec. JSON only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<ExactEntry>>,
}

impl MatrixFile {
    pub fn from_banded(name: &str, m: &BandedMatrix) -> Self {
        MatrixFile {
            name: name.to_string(),
            nrows: m.nrows(),
            ncols: m.ncols(),
            lower_bw: m.lower_bw(),
            upper_bw: m.upper_bw(),
            exact_size: m.exact_size(),
            precision: m.prec(),
            entries: m.entries().map(|(i, j, v)| (i, j, real::to_decimal(v))).collect(),
            exact: None,
        }
    }

    /// Attaches the oracle block `exact[i][j]` for band positions inside it.
    pub fn with_exact(mut self, exact: &[Vec<SquaredEntry>]) -> Self {
        let k = exact.len();
        let list = self
            .entries
            .iter()
            .filter(|(i, j, _)| *i < k && *j < k)
            .map(|&(i, j, _)| {
                let e = &exact[i][j];
                (i, j, e.square.numer().to_string(), e.square.denom().to_string(), e.sign)
            })
            .collect();
        self.exact = Some(list);
        self
    }

    pub fn to_banded(&self) -> Result<BandedMatrix, CliError> {
        let mut m = BandedMatrix::zeros(
            self.nrows,
            self.ncols,
            self.lower_bw,
            self.upper_bw,
            self.exact_size,
            self.precision,
        );
        for (i, j, v) in &self.entries {
            if !m.in_band(*i, *j) {
                return Err(CliError::Invalid(format!("{}: entry ({i}, {j}) outside the band", self.name)));
            }
            m.set(*i, *j, parse_number(self.precision, &self.name, v)?);
        }
        Ok(m)
    }

    /// Pretty JSON with one entry per line.
    pub fn to_json(&self) -> String {
        let mut s = String::from("{\n");
        s += &format!("  \"name\": {},\n", compact(&self.name));
        for (k, v) in [
            ("nrows", self.nrows),
            ("ncols", self.ncols),
            ("lower_bw", self.lower_bw),
            ("upper_bw", self.upper_bw),
            ("exact_size", self.exact_size),
        ] {
            s += &format!("  \"{k}\": {v},\n");
        }
        s += &format!("  \"precision\": {},\n", self.precision);
        s += "  \"entries\": ";
        s += &rows(self.entries.iter().map(compact));
        if let Some(exact) = &self.exact {
            s += ",\n  \"exact\": ";
            s += &rows(exact.iter().map(compact));
        }
        s += "\n}\n";
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("malformed matrix file: {e}")))
    }

    /// `# key=value ...` metadata line, then `i,j,value` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# name={} nrows={} ncols={} lower_bw={} upper_bw={} exact_size={} precision={}\n",
            self.name, self.nrows, self.ncols, self.lower_bw, self.upper_bw, self.exact_size, self.precision
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["i", "j", "value"]).expect("in-memory write");
        for (i, j, v) in &self.entries {
            w.write_record([i.to_string(), j.to_string(), v.clone()]).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let bad = |msg: String| CliError::Invalid(format!("malformed matrix csv: {msg}"));
        let (meta, body) = text.split_once('\n').ok_or_else(|| bad("empty file".into()))?;
        let meta = meta.strip_prefix("# ").ok_or_else(|| bad("missing metadata line".into()))?;
        let mut file = MatrixFile {
            name: String::new(),
            nrows: 0,
            ncols: 0,
            lower_bw: 0,
            upper_bw: 0,
            exact_size: 0,
            precision: 0,
            entries: Vec::new(),
            exact: None,
        };
        for kv in meta.split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("bad metadata {kv:?}")))?;
            let num = || v.parse::<usize>().map_err(|e| bad(format!("{k}: {e}")));
            match k {
                "name" => file.name = v.to_string(),
                "nrows" => file.nrows = num()?,
                "ncols" => file.ncols = num()?,
                "lower_bw" => file.lower_bw = num()?,
                "upper_bw" => file.upper_bw = num()?,
                "exact_size" => file.exact_size = num()?,
                "precision" => file.precision = v.parse().map_err(|e| bad(format!("{k}: {e}")))?,
                other => return Err(bad(format!("unknown metadata key {other:?}"))),
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        for row in r.deserialize::<(usize, usize, String)>() {
            file.entries.push(row.map_err(|e| bad(e.to_string()))?);
        }
        Ok(file)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn parse(text: &str, format: Format) -> Result<Self, CliError> {
        match format {
            Format::Json => Self::from_json(text),
            Format::Csv => Self::from_csv(text),
        }
    }
}

fn compact<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

/// `[\n    a,\n    b\n  ]`
fn rows(items: impl Iterator<Item = String>) -> String {
    let body: Vec<String> = items.map(|r| format!("    {r}")).collect();
    if body.is_empty() {
        "[]".into()
    } else {
        format!("[\n{}\n  ]", body.join(",\n"))
    }
}

/// A named column of per-index scalars.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerFile {
    pub name: String,
    pub size: usize,
    pub columns: Vec<Column>,
}

impl LedgerFile {
    fn new(name: &str, size: usize, cols: Vec<(&str, &[Real])>) -> Self {
        let columns = cols
            .into_iter()
            .map(|(n, v)| Column {
                name: n.to_string(),
                values: v.iter().take(size).map(real::to_decimal).collect(),
            })
            .collect();
        LedgerFile {
            name: name.to_string(),
            size,
            columns,
        }
    }

    /// Indices `0..size`.
    pub fn christoffel(l: &ChristoffelLedger, size: usize) -> Self {
        LedgerFile::new(
            "christoffel",
            size,
            vec![
                ("p_n(c)", &l.pc),
                ("K_n(c,c)", &l.kcc),
                ("d", &l.d),
                ("d_kernel", &l.d_kernel),
                ("e", &l.e),
                ("e_kernel", &l.e_kernel),
                ("r2", &l.r2),
                ("kappa", &l.kappa),
                ("kappa_alt", &l.kappa_alt),
                ("tau", &l.tau),
                ("tau_kernel", &l.tau_kernel),
                ("norm2_sq", &l.norm2_sq),
            ],
        )
    }

    pub fn sobolev(l: &SobolevLedger, size: usize) -> Self {
        LedgerFile::new(
            "sobolev",
            size,
            vec![
                ("S_n(c)", &l.sc),
                ("S_n'(c)", &l.sdc),
                ("norm_sq", &l.norm_sq),
                ("t", &l.t),
                ("gamma_nn", &l.gamma_nn),
                ("gamma_n1", &l.gamma_n1),
                ("gamma_n2", &l.gamma_n2),
                ("a", &l.a),
                ("b", &l.b),
                ("c", &l.cdiag),
                ("alpha_n+1,n", &l.alpha1),
                ("alpha_n,n", &l.alpha0),
                ("xi_n,n", &l.xi0),
                ("xi_n-1,n", &l.xi1),
                ("xi_n-2,n", &l.xi2),
            ],
        )
    }

    /// Wide table: `n` then one column per scalar.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["n".to_string()];
        header.extend(self.columns.iter().map(|c| c.name.clone()));
        w.write_record(&header).expect("in-memory write");
        for n in 0..self.size {
            let mut row = vec![n.to_string()];
            row.extend(self.columns.iter().map(|c| c.values.get(n).cloned().unwrap_or_default()));
            w.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("plain data serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.to_csv(),
        }
    }
}

pub fn write(dir: &Path, stem: &str, format: Format, text: &str) -> Result<(), CliError> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
