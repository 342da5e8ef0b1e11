//! Reading and writing networks, labels, matrices and experiment results.
//!
//! Supported inputs:
//!
//! * a GML subset: `graph [ node [ id N value V ] edge [ source S target T ] ]`,
//!   read as an undirected simple 0/1 graph with node `value`s as ground truth;
//! * whitespace- or comma-separated weighted edge lists;
//! * label files with one 1-based integer label per line;
//! * dense matrix CSV with one row per line.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::distr::Distribution;
use rand_distr::Normal;

use crate::error::{Error, Result};
use crate::harness::{ExperimentRecord, SummaryRow};
use crate::model::{Labeling, WeightedAdjacency};
use crate::rng;

pub const RESULTS_HEADER: &str = "experiment,param_name,param_value,replicate,method,error";
pub const SUMMARY_HEADER: &str =
    "experiment,param_name,param_value,method,mean_error,stderr,replicates";

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkDataset {
    pub name: String,
    pub adjacency: WeightedAdjacency,
    pub truth: Option<Labeling>,
    /// Original node identifiers in file order.
    pub node_ids: Vec<i64>,
    /// Raw `value` attribute per node, when the file carries one.
    pub node_values: Option<Vec<String>>,
}

impl NetworkDataset {
    pub fn n(&self) -> usize {
        self.adjacency.n()
    }

    /// Keeps only the listed nodes (in the given order).
    pub fn subset(&self, keep: &[usize]) -> Result<Self> {
        let a = self.adjacency.matrix();
        let sub = DMatrix::from_fn(keep.len(), keep.len(), |i, j| a[(keep[i], keep[j])]);
        let node_values = self
            .node_values
            .as_ref()
            .map(|v| keep.iter().map(|&i| v[i].clone()).collect::<Vec<_>>());
        let truth = match &node_values {
            Some(v) => Some(labels_from_values(v)?),
            None => match &self.truth {
                Some(t) => {
                    let raw: Vec<usize> = keep.iter().map(|&i| t.labels()[i] + 1).collect();
                    Some(Labeling::from_one_based(&raw)?)
                }
                None => None,
            },
        };
        Ok(Self {
            name: self.name.clone(),
            adjacency: WeightedAdjacency::new(sub)?,
            truth,
            node_ids: keep.iter().map(|&i| self.node_ids[i]).collect(),
            node_values,
        })
    }

    /// Node indices of the largest connected component, in index order.
    /// Ties go to the component containing the lowest index.
    pub fn largest_component(&self) -> Vec<usize> {
        let n = self.n();
        let a = self.adjacency.matrix();
        let mut comp = vec![usize::MAX; n];
        let mut best: Vec<usize> = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut members = vec![start];
            comp[start] = start;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    if v != u && a[(u, v)] != 0.0 && comp[v] == usize::MAX {
                        comp[v] = start;
                        members.push(v);
                        queue.push_back(v);
                    }
                }
            }
            if members.len() > best.len() {
                best = members;
            }
        }
        best.sort_unstable();
        best
    }
}

/// Maps raw node values to 1-based labels: numeric order if every value is a
/// number, lexicographic otherwise.
fn labels_from_values(values: &[String]) -> Result<Labeling> {
    let numeric: Option<Vec<f64>> = values.iter().map(|v| v.parse::<f64>().ok()).collect();
    let index: BTreeMap<String, usize> = match &numeric {
        Some(nums) => {
            let mut distinct: Vec<(f64, &String)> = nums.iter().copied().zip(values).collect();
            distinct.sort_by(|a, b| a.0.total_cmp(&b.0));
            distinct.dedup_by(|a, b| a.0 == b.0);
            distinct
                .into_iter()
                .enumerate()
                .map(|(i, (_, s))| (s.clone(), i + 1))
                .collect()
        }
        None => values
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, s)| (s, i + 1))
            .collect(),
    };
    let labels: Vec<usize> = match &numeric {
        Some(nums) => {
            // equal numbers may be written differently ("1" vs "1.0")
            let by_num: Vec<(f64, usize)> = index
                .iter()
                .map(|(s, &l)| (s.parse::<f64>().unwrap(), l))
                .collect();
            nums.iter()
                .map(|x| by_num.iter().find(|(v, _)| v == x).unwrap().1)
                .collect()
        }
        None => values.iter().map(|v| index[v]).collect(),
    };
    Labeling::from_one_based(&labels)
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Open,
    Close,
    Key(String),
    Number(String),
    Str(String),
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
        } else if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
        } else if c == '[' || c == ']' {
            bump(&mut chars);
            out.push(Token {
                kind: if c == '[' { TokenKind::Open } else { TokenKind::Close },
                line: tl,
                column: tc,
            });
        } else if c == '"' {
            bump(&mut chars);
            let mut s = String::new();
            loop {
                match chars.peek() {
                    None => return Err(Error::parse(tl, tc, "unterminated string")),
                    Some('"') => {
                        bump(&mut chars);
                        break;
                    }
                    Some(_) => s.push(bump(&mut chars)),
                }
            }
            out.push(Token {
                kind: TokenKind::Str(s),
                line: tl,
                column: tc,
            });
        } else if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || matches!(c, '-' | '+' | '.') {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            if s.parse::<f64>().is_err() {
                return Err(Error::parse(tl, tc, format!("malformed number `{s}`")));
            }
            out.push(Token {
                kind: TokenKind::Number(s),
                line: tl,
                column: tc,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            out.push(Token {
                kind: TokenKind::Key(s),
                line: tl,
                column: tc,
            });
        } else {
            return Err(Error::parse(tl, tc, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum GmlValue {
    Scalar(String, usize, usize),
    List(Vec<(String, GmlValue)>),
}

struct GmlParser {
    tokens: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl GmlParser {
    fn list(&mut self, nested: bool) -> Result<Vec<(String, GmlValue)>> {
        let mut items = Vec::new();
        loop {
            let Some(tok) = self.tokens.get(self.pos).cloned() else {
                if nested {
                    return Err(Error::parse(self.end.0, self.end.1, "missing `]`"));
                }
                return Ok(items);
            };
            self.pos += 1;
            let key = match tok.kind {
                TokenKind::Close if nested => return Ok(items),
                TokenKind::Key(k) => k,
                other => {
                    return Err(Error::parse(
                        tok.line,
                        tok.column,
                        format!("expected a key, found {other:?}"),
                    ))
                }
            };
            let Some(val) = self.tokens.get(self.pos).cloned() else {
                return Err(Error::parse(tok.line, tok.column, format!("key `{key}` has no value")));
            };
            self.pos += 1;
            let value = match val.kind {
                TokenKind::Open => GmlValue::List(self.list(true)?),
                TokenKind::Number(s) | TokenKind::Str(s) => GmlValue::Scalar(s, val.line, val.column),
                other => {
                    return Err(Error::parse(
                        val.line,
                        val.column,
                        format!("expected a value for `{key}`, found {other:?}"),
                    ))
                }
            };
            items.push((key, value));
        }
    }
}

fn scalar_int(v: &GmlValue, what: &str, at: (usize, usize)) -> Result<i64> {
    match v {
        GmlValue::Scalar(s, line, col) => s
            .parse::<i64>()
            .or_else(|_| match s.parse::<f64>() {
                Ok(x) if x.fract() == 0.0 => Ok(x as i64),
                _ => Err(()),
            })
            .map_err(|_| Error::parse(*line, *col, format!("{what} must be an integer, found `{s}`"))),
        GmlValue::List(_) => Err(Error::parse(at.0, at.1, format!("{what} must be a scalar"))),
    }
}

/// Parses the GML subset into a 0/1 undirected simple graph.
///
/// Duplicate and reversed edges collapse to one, self-loops are dropped,
/// and node `value` attributes become the ground-truth labeling.
pub fn parse_gml(name: &str, bytes: &[u8]) -> Result<NetworkDataset> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::parse(1, 1, format!("invalid UTF-8: {e}")))?;
    let tokens = tokenize(text)?;
    let end = tokens.last().map_or((1, 1), |t| (t.line, t.column));
    let mut parser = GmlParser { tokens, pos: 0, end };
    let top = parser.list(false)?;
    let graph = top
        .iter()
        .find_map(|(k, v)| match (k.as_str(), v) {
            ("graph", GmlValue::List(items)) => Some(items),
            _ => None,
        })
        .ok_or_else(|| Error::parse(1, 1, "no `graph [ ... ]` block"))?;

    let mut node_ids = Vec::new();
    let mut values: Vec<Option<String>> = Vec::new();
    let mut index: HashMap<i64, usize> = HashMap::new();
    let mut edges = Vec::new();
    for (key, value) in graph {
        let GmlValue::List(attrs) = value else { continue };
        match key.as_str() {
            "node" => {
                let mut id = None;
                let mut val = None;
                for (k, v) in attrs {
                    match k.as_str() {
                        "id" => id = Some(scalar_int(v, "node id", end)?),
                        "value" => {
                            if let GmlValue::Scalar(s, _, _) = v {
                                val = Some(s.clone());
                            }
                        }
                        _ => {}
                    }
                }
                let id = id.ok_or_else(|| Error::parse(end.0, end.1, "node without `id`"))?;
                if index.insert(id, node_ids.len()).is_some() {
                    return Err(Error::parse(end.0, end.1, format!("duplicate node id {id}")));
                }
                node_ids.push(id);
                values.push(val);
            }
            "edge" => {
                let mut source = None;
                let mut target = None;
                for (k, v) in attrs {
                    match k.as_str() {
                        "source" => source = Some(scalar_int(v, "edge source", end)?),
                        "target" => target = Some(scalar_int(v, "edge target", end)?),
                        _ => {}
                    }
                }
                match (source, target) {
                    (Some(s), Some(t)) => edges.push((s, t)),
                    _ => return Err(Error::parse(end.0, end.1, "edge needs `source` and `target`")),
                }
            }
            _ => {}
        }
    }

    let n = node_ids.len();
    let mut a = DMatrix::zeros(n, n);
    for (s, t) in edges {
        let i = *index.get(&s).ok_or(Error::DanglingEdge(s))?;
        let j = *index.get(&t).ok_or(Error::DanglingEdge(t))?;
        if i != j {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
    }
    let node_values: Option<Vec<String>> = if n > 0 && values.iter().all(|v| v.is_some()) {
        Some(values.into_iter().map(Option::unwrap).collect())
    } else {
        None
    };
    let truth = match &node_values {
        Some(v) => Some(labels_from_values(v)?),
        None => None,
    };
    Ok(NetworkDataset {
        name: name.to_string(),
        adjacency: WeightedAdjacency::new(a)?,
        truth,
        node_ids,
        node_values,
    })
}

/// Serializes a dataset as GML. Reading the output with [`parse_gml`]
/// reproduces the dataset.
pub fn write_gml(ds: &NetworkDataset) -> String {
    let mut s = String::from("graph\n[\n  directed 0\n");
    for (i, id) in ds.node_ids.iter().enumerate() {
        let _ = write!(s, "  node\n  [\n    id {id}\n");
        if let Some(v) = &ds.node_values {
            let _ = writeln!(s, "    value \"{}\"", v[i]);
        }
        s.push_str("  ]\n");
    }
    let a = ds.adjacency.matrix();
    for i in 0..ds.n() {
        for j in (i + 1)..ds.n() {
            if a[(i, j)] != 0.0 {
                let _ = write!(
                    s,
                    "  edge\n  [\n    source {}\n    target {}\n  ]\n",
                    ds.node_ids[i], ds.node_ids[j]
                );
            }
        }
    }
    s.push_str("]\n");
    s
}

/// Reads a weighted edge list: `source target [weight]` per line, separated
/// by whitespace or commas, `#` comments allowed. Nodes are numbered in order
/// of first appearance; a repeated pair must repeat the same weight.
pub fn parse_edge_list(name: &str, bytes: &[u8]) -> Result<NetworkDataset> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::parse(1, 1, format!("invalid UTF-8: {e}")))?;
    let mut index: HashMap<i64, usize> = HashMap::new();
    let mut node_ids = Vec::new();
    let mut edges: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 2 && fields.len() != 3 {
            return Err(Error::parse(ln + 1, 1, "expected `source target [weight]`"));
        }
        let mut ends = [0usize; 2];
        for (slot, f) in ends.iter_mut().zip(&fields[..2]) {
            let id: i64 = f
                .parse()
                .map_err(|_| Error::parse(ln + 1, 1, format!("node id `{f}` is not an integer")))?;
            *slot = *index.entry(id).or_insert_with(|| {
                node_ids.push(id);
                node_ids.len() - 1
            });
        }
        let w = match fields.get(2) {
            Some(f) => f
                .parse::<f64>()
                .ok()
                .filter(|w| w.is_finite())
                .ok_or_else(|| Error::parse(ln + 1, 1, format!("weight `{f}` is not a finite number")))?,
            None => 1.0,
        };
        let key = (ends[0].min(ends[1]), ends[0].max(ends[1]));
        if let Some(&(prev, prev_line)) = edges.get(&key) {
            if prev != w {
                return Err(Error::parse(
                    ln + 1,
                    1,
                    format!("edge repeats line {prev_line} with a different weight"),
                ));
            }
        }
        edges.insert(key, (w, ln + 1));
    }
    if node_ids.is_empty() {
        return Err(Error::parse(1, 1, "edge list is empty"));
    }
    let n = node_ids.len();
    let mut a = DMatrix::zeros(n, n);
    for ((i, j), (w, _)) in edges {
        a[(i, j)] = w;
        a[(j, i)] = w;
    }
    Ok(NetworkDataset {
        name: name.to_string(),
        adjacency: WeightedAdjacency::new(a)?,
        truth: None,
        node_ids,
        node_values: None,
    })
}

/// Returns `A + W`, with `W` symmetric and its upper triangle (diagonal
/// included) i.i.d. `Normal(0, sigma2_w)`.
pub fn add_noise(a: &WeightedAdjacency, sigma2_w: f64, seed: u64) -> Result<WeightedAdjacency> {
    if !(sigma2_w >= 0.0 && sigma2_w.is_finite()) {
        return Err(Error::InvalidDistribution(format!(
            "noise variance must be non-negative, got {sigma2_w}"
        )));
    }
    if sigma2_w == 0.0 {
        return Ok(a.clone());
    }
    let normal = Normal::new(0.0, sigma2_w.sqrt()).unwrap();
    let mut rng = rng::stream(seed, &[]);
    let n = a.n();
    let mut out = a.matrix().clone();
    for i in 0..n {
        for j in i..n {
            let w = normal.sample(&mut rng);
            out[(i, j)] += w;
            if i != j {
                out[(j, i)] += w;
            }
        }
    }
    WeightedAdjacency::new(out)
}

/// Reads one 1-based integer label per line.
pub fn read_labels(bytes: &[u8]) -> Result<Labeling> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::parse(1, 1, format!("invalid UTF-8: {e}")))?;
    let lines: Vec<&str> = text.trim_end().lines().collect();
    if text.trim().is_empty() {
        return Err(Error::parse(1, 1, "label file is empty"));
    }
    let mut labels = Vec::with_capacity(lines.len());
    for (i, l) in lines.iter().enumerate() {
        let v: usize = l
            .trim()
            .parse()
            .map_err(|_| Error::parse(i + 1, 1, format!("`{}` is not a positive integer", l.trim())))?;
        if v == 0 {
            return Err(Error::parse(i + 1, 1, "labels are 1-based"));
        }
        labels.push(v);
    }
    let k = *labels.iter().max().unwrap();
    let present: BTreeSet<usize> = labels.iter().copied().collect();
    if present.len() != k {
        let missing: Vec<String> = (1..=k)
            .filter(|l| !present.contains(l))
            .map(|l| l.to_string())
            .collect();
        return Err(Error::NonContiguousLabels(format!(
            "labels go up to {k} but {} never occur",
            missing.join(",")
        )));
    }
    Labeling::from_one_based(&labels)
}

pub fn format_labels(labels: &Labeling) -> String {
    labels
        .to_one_based()
        .iter()
        .map(|l| format!("{l}\n"))
        .collect()
}

/// Dense CSV, one row per line, 17 significant digits.
pub fn format_matrix_csv(m: &DMatrix<f64>) -> String {
    let mut s = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    std::fs::write(path, format_matrix_csv(m))?;
    Ok(())
}

pub fn parse_matrix_csv(bytes: &[u8]) -> Result<DMatrix<f64>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::parse(1, 1, format!("invalid UTF-8: {e}")))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.trim_end().lines().enumerate() {
        let mut row = Vec::new();
        let mut col = 1;
        for cell in line.split(',') {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| Error::parse(i + 1, col, format!("`{}` is not a number", cell.trim())))?;
            row.push(v);
            col += cell.len() + 1;
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::parse(
                    i + 1,
                    1,
                    format!("row has {} columns, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if text.trim().is_empty() {
        return Err(Error::parse(1, 1, "matrix file is empty"));
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    parse_matrix_csv(&std::fs::read(path)?)
}

pub fn format_results_csv(records: &[ExperimentRecord]) -> String {
    let mut s = String::from(RESULTS_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.experiment, r.param_name, r.param_value, r.replicate, r.method, r.error
        );
    }
    s
}

pub fn write_results_csv(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(format_results_csv(records).as_bytes())?;
    Ok(())
}

pub fn format_summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from(SUMMARY_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.experiment, r.param_name, r.param_value, r.method, r.mean_error, r.stderr, r.replicates
        );
    }
    s
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    std::fs::write(path, format_summary_csv(rows))?;
    Ok(())
}

/// One dataset entry of a manifest file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetEntry {
    pub path: PathBuf,
    /// External 1-based label file overriding node values.
    pub labels: Option<PathBuf>,
    /// Raw node value rewrites applied before labels are assigned.
    pub merge: Vec<(String, String)>,
    /// Nodes whose raw value is listed here are removed.
    pub drop: Vec<String>,
    /// Restrict to the largest connected component.
    pub largest_component: bool,
}

/// `name=path` lines, plus optional `name.labels=`, `name.merge=a:b,c:d`,
/// `name.drop=v1,v2` and `name.lcc=true` modifiers. Relative paths resolve
/// against the manifest's directory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    pub entries: BTreeMap<String, DatasetEntry>,
}

impl Manifest {
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let mut entries: BTreeMap<String, DatasetEntry> = BTreeMap::new();
        let resolve = |p: &str| {
            let p = PathBuf::from(p);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(i + 1, 1, "expected key=value"))?;
            let (key, value) = (key.trim(), value.trim());
            let (name, modifier) = match key.split_once('.') {
                Some((n, m)) => (n, Some(m)),
                None => (key, None),
            };
            let e = entries.entry(name.to_string()).or_default();
            match modifier {
                None => e.path = resolve(value),
                Some("labels") => e.labels = Some(resolve(value)),
                Some("merge") => {
                    for pair in value.split(',').filter(|s| !s.trim().is_empty()) {
                        let (from, to) = pair.split_once(':').ok_or_else(|| {
                            Error::parse(i + 1, 1, format!("merge entry `{pair}` is not from:to"))
                        })?;
                        e.merge.push((from.trim().to_string(), to.trim().to_string()));
                    }
                }
                Some("drop") => e.drop.extend(
                    value
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty()),
                ),
                Some("lcc") => {
                    e.largest_component = value
                        .parse()
                        .map_err(|_| Error::parse(i + 1, 1, "lcc must be true or false"))?
                }
                Some(m) => return Err(Error::parse(i + 1, 1, format!("unknown modifier `{m}`"))),
            }
        }
        if let Some((name, _)) = entries.iter().find(|(_, e)| e.path.as_os_str().is_empty()) {
            return Err(Error::parse(1, 1, format!("dataset `{name}` has modifiers but no path")));
        }
        Ok(Self { entries })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Whether the dataset is listed and its network file exists.
    pub fn available(&self, name: &str) -> bool {
        self.entries.get(name).is_some_and(|e| e.path.is_file())
    }

    /// Loads and preprocesses a dataset.
    pub fn load(&self, name: &str) -> Result<NetworkDataset> {
        let e = self.entries.get(name).ok_or_else(|| {
            Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("dataset `{name}` is not in the manifest"),
            ))
        })?;
        let bytes = std::fs::read(&e.path)?;
        let is_gml = e
            .path
            .extension()
            .is_some_and(|x| x.eq_ignore_ascii_case("gml"));
        let mut ds = if is_gml {
            parse_gml(name, &bytes)?
        } else {
            parse_edge_list(name, &bytes)?
        };
        if let Some(lp) = &e.labels {
            let truth = read_labels(&std::fs::read(lp)?)?;
            if truth.n() != ds.n() {
                return Err(Error::DimensionMismatch(format!(
                    "label file has {} entries for {} nodes",
                    truth.n(),
                    ds.n()
                )));
            }
            ds.node_values = Some(truth.to_one_based().iter().map(|l| l.to_string()).collect());
            ds.truth = Some(truth);
        }
        if !e.merge.is_empty() || !e.drop.is_empty() {
            let values = ds.node_values.clone().ok_or_else(|| {
                Error::MissingGroundTruth(format!("{name} (merge/drop need node values)"))
            })?;
            let mapped: Vec<String> = values
                .into_iter()
                .map(|v| {
                    e.merge
                        .iter()
                        .find(|(from, _)| *from == v)
                        .map_or(v, |(_, to)| to.clone())
                })
                .collect();
            ds.node_values = Some(mapped.clone());
            let keep: Vec<usize> = (0..ds.n()).filter(|&i| !e.drop.contains(&mapped[i])).collect();
            ds = ds.subset(&keep)?;
        }
        if e.largest_component {
            let keep = ds.largest_component();
            ds = ds.subset(&keep)?;
        }
        Ok(ds)
    }
}
