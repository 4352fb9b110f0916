//! File formats: operator and group-action JSON, CSV tables, run configs,
//! and JSON rendering with 17 significant digits.

use std::cmp::Ordering;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::born::{BornError, Channel};
use crate::contrast::{qubit_basis_change, Density, DirectionPair, GridPrior, PriorError};
use crate::hilbert::{ComplexMatrix, HermitianOperator, HilbertError, Interval};
use crate::symmetry::{FiniteGroupAction, FiniteSpace, ParameterFunction, SymmetryError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("CSV line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Born(#[from] BornError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Prior(#[from] PriorError),
}

impl IoError {
    fn json(e: serde_json::Error) -> Self {
        IoError::Json(e.to_string())
    }
}

pub fn read_to_string(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Parses JSON, rejecting trailing content.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(IoError::json)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    from_json(&read_to_string(path)?)
}

/// `x` with 17 significant digits, positional for moderate exponents and
/// scientific otherwise. Every finite double survives the round trip.
pub fn fmt17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0" } else { "0.0" }.to_string();
    }
    let sci = format!("{:.16e}", x.abs());
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if x < 0.0 { "-" } else { "" };
    if !(-5..17).contains(&exp) {
        return format!("{sign}{mantissa}e{exp}");
    }
    if exp >= 0 {
        let split = exp as usize + 1;
        let frac = &digits[split..];
        format!(
            "{sign}{}.{}",
            &digits[..split],
            if frac.is_empty() { "0" } else { frac }
        )
    } else {
        format!("{sign}0.{}{digits}", "0".repeat((-exp - 1) as usize))
    }
}

/// Pretty JSON whose floats are written by [`fmt17`].
struct Sig17<'a>(serde_json::ser::PrettyFormatter<'a>);

impl serde_json::ser::Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(fmt17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` as indented JSON with 17-significant-digit floats.
/// Non-finite floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut out,
        Sig17(serde_json::ser::PrettyFormatter::with_indent(b"  ")),
    );
    value
        .serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// `{"dim": n, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    /// Omitted means a real matrix.
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl OperatorJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let a = m.as_matrix();
        let n = m.dim();
        Self {
            dim: n,
            re: (0..n).map(|r| (0..n).map(|c| a[(r, c)].re).collect()).collect(),
            im: Some((0..n).map(|r| (0..n).map(|c| a[(r, c)].im).collect()).collect()),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, IoError> {
        let check = |rows: &[Vec<f64>], key: &str| -> Result<(), IoError> {
            if rows.len() != self.dim || rows.iter().any(|r| r.len() != self.dim) {
                return Err(IoError::Config(format!(
                    "`{key}` must be a {0}x{0} array to match `dim`",
                    self.dim
                )));
            }
            Ok(())
        };
        check(&self.re, "re")?;
        let zeros;
        let im = match &self.im {
            Some(im) => {
                check(im, "im")?;
                im
            }
            None => {
                zeros = vec![vec![0.0; self.dim]; self.dim];
                &zeros
            }
        };
        Ok(ComplexMatrix::from_parts(&self.re, im)?)
    }

    pub fn to_hermitian(&self) -> Result<HermitianOperator, IoError> {
        Ok(HermitianOperator::new(self.to_matrix()?)?)
    }
}

pub fn read_operator(path: &Path) -> Result<ComplexMatrix, IoError> {
    read_json::<OperatorJson>(path)?.to_matrix()
}

/// A point label given as a JSON number or string.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Number(f64),
    Text(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Number(x) => write!(f, "{x}"),
            Label::Text(s) => f.write_str(s),
        }
    }
}

// Numbers sort before text; numbers by total order.
impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Label::Number(a), Label::Number(b)) => a.total_cmp(b),
            (Label::Number(_), Label::Text(_)) => Ordering::Less,
            (Label::Text(_), Label::Number(_)) => Ordering::Greater,
            (Label::Text(a), Label::Text(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Label {}

/// `{"points": [...], "elements": [[permutation as index array], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionJson {
    pub points: Vec<Label>,
    pub elements: Vec<Vec<usize>>,
}

impl ActionJson {
    pub fn space(&self) -> Result<FiniteSpace, IoError> {
        Ok(FiniteSpace::new(self.points.iter().map(Label::to_string))?)
    }

    /// Validates the element list as a group acting on `points`.
    pub fn to_action(&self) -> Result<FiniteGroupAction, IoError> {
        Ok(FiniteGroupAction::new(self.space()?, self.elements.clone())?)
    }
}

/// `{"values": [...]}`: the value of a parameter function at each point,
/// in the order of the action's `points`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterJson {
    pub values: Vec<Label>,
}

impl ParameterJson {
    pub fn to_function(&self, domain: &FiniteSpace) -> Result<ParameterFunction, IoError> {
        if self.values.len() != domain.len() {
            return Err(SymmetryError::DomainMismatch(format!(
                "{} values for {} points",
                self.values.len(),
                domain.len()
            ))
            .into());
        }
        Ok(ParameterFunction::from_values(domain.clone(), |i| {
            self.values[i].clone()
        }))
    }
}

/// A numeric CSV table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    /// Splits off the response column; the remaining columns form the
    /// feature matrix in header order.
    pub fn split_response(
        &self,
        response: &str,
    ) -> Result<(Vec<String>, DMatrix<f64>, DVector<f64>), IoError> {
        let col = self.column_index(response).ok_or_else(|| IoError::Csv {
            line: 1,
            message: format!("no column named {response:?}"),
        })?;
        let features: Vec<usize> = (0..self.headers.len()).filter(|&c| c != col).collect();
        let names = features.iter().map(|&c| self.headers[c].clone()).collect();
        let x = DMatrix::from_fn(self.rows.len(), features.len(), |r, c| self.rows[r][features[c]]);
        let y = DVector::from_fn(self.rows.len(), |r, _| self.rows[r][col]);
        Ok((names, x, y))
    }
}

fn csv_error(e: csv::Error) -> IoError {
    let line = e.position().map_or(0, |p| p.line());
    let message = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => format!("expected {expected_len} fields, found {len}"),
        _ => e.to_string(),
    };
    IoError::Csv { line, message }
}

/// Reads a CSV table whose fields, after the header row, are all numbers.
pub fn read_table<R: Read>(reader: R) -> Result<Table, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(IoError::Csv {
            line: 1,
            message: "missing header row".into(),
        });
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let row = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| IoError::Csv {
                        line,
                        message: format!("column {:?}: {field:?} is not a finite number", headers[c]),
                    })
            })
            .collect::<Result<Vec<f64>, IoError>>()?;
        rows.push(row);
    }
    Ok(Table { headers, rows })
}

pub fn read_table_file(path: &Path) -> Result<Table, IoError> {
    read_table(read_to_string(path)?.as_bytes())
}

fn numeric_headers(table: &Table) -> Result<Vec<f64>, IoError> {
    table
        .headers
        .iter()
        .map(|h| {
            h.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| IoError::Csv {
                line: 1,
                message: format!("header {h:?} is not a numeric value label"),
            })
        })
        .collect()
}

/// Channel table: the header lists the data values `z_k`, row `i` is `q(. | u_i)`.
pub fn channel_from_table(table: &Table) -> Result<Channel, IoError> {
    Ok(Channel::new(numeric_headers(table)?, table.rows.clone())?)
}

/// Distribution table: the header lists the values, one row of probabilities.
pub fn distribution_from_table(table: &Table) -> Result<(Vec<f64>, Vec<f64>), IoError> {
    let values = numeric_headers(table)?;
    if table.rows.len() != 1 {
        return Err(IoError::Csv {
            line: 2,
            message: format!("expected one row of probabilities, found {}", table.rows.len()),
        });
    }
    Ok((values, table.rows[0].clone()))
}

/// `{"z": [...], "rows": [[...]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub z: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

/// `{"values": [...], "p": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionJson {
    pub values: Vec<f64>,
    pub p: Vec<f64>,
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

/// Reads a channel from `.json` or CSV.
pub fn read_channel(path: &Path) -> Result<Channel, IoError> {
    if is_json(path) {
        let c: ChannelJson = read_json(path)?;
        Ok(Channel::new(c.z, c.rows)?)
    } else {
        channel_from_table(&read_table_file(path)?)
    }
}

/// Reads `(values, probabilities)` from `.json` or CSV.
pub fn read_distribution(path: &Path) -> Result<(Vec<f64>, Vec<f64>), IoError> {
    if is_json(path) {
        let d: DistributionJson = read_json(path)?;
        if d.values.len() != d.p.len() {
            return Err(IoError::Config(format!(
                "`values` has {} entries but `p` has {}",
                d.values.len(),
                d.p.len()
            )));
        }
        Ok((d.values, d.p))
    } else {
        distribution_from_table(&read_table_file(path)?)
    }
}

/// Monte Carlo config for the Bayesian reference prior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BayesConfig {
    pub cov: [[f64; 2]; 2],
    pub n: u64,
    pub seed: u64,
}

/// Grid either from `lo`, `hi`, `n` (cell midpoints) or explicit `values`;
/// weights either explicit or from the config's `density`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub n: Option<usize>,
    pub values: Option<Vec<f64>>,
    pub weights: Option<Vec<f64>>,
}

/// `{"grid": {...}, "density": "normal:0,1", "B": [[lo, hi], ...], "W": "identity"}`.
/// A `null` interval end is infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPriorConfig {
    pub grid: GridSpec,
    #[serde(default)]
    pub density: Option<String>,
    #[serde(rename = "B")]
    pub sets: Vec<[Option<f64>; 2]>,
    #[serde(rename = "W", default)]
    pub basis: Option<String>,
}

/// The unitary relating the two eigenbases.
#[derive(Debug, Clone, PartialEq)]
pub enum BasisSpec {
    Identity,
    Qubit(DirectionPair),
}

impl BasisSpec {
    /// `identity`, `qubit` (the treatment-contrast directions) or
    /// `qubit:ax,ay,az;bx,by,bz` (normalized on parse).
    pub fn parse(s: &str) -> Result<Self, IoError> {
        let s = s.trim();
        if s == "identity" {
            return Ok(BasisSpec::Identity);
        }
        if s == "qubit" {
            return Ok(BasisSpec::Qubit(DirectionPair::treatment_example()));
        }
        let bad = || {
            IoError::Config(format!(
                "`W` must be \"identity\", \"qubit\" or \"qubit:ax,ay,az;bx,by,bz\", got {s:?}"
            ))
        };
        let body = s.strip_prefix("qubit:").ok_or_else(bad)?;
        let (a, b) = body.split_once(';').ok_or_else(bad)?;
        let vec3 = |t: &str| -> Result<[f64; 3], IoError> {
            let v: Vec<f64> = t
                .split(',')
                .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?;
            <[f64; 3]>::try_from(v).map_err(|_| bad())
        };
        let pair = DirectionPair::normalized(vec3(a)?, vec3(b)?).map_err(|_| bad())?;
        Ok(BasisSpec::Qubit(pair))
    }

    pub fn matrix(&self) -> Result<Option<ComplexMatrix>, IoError> {
        match self {
            BasisSpec::Identity => Ok(None),
            BasisSpec::Qubit(d) => Ok(Some(qubit_basis_change(d)?)),
        }
    }
}

impl GridPriorConfig {
    pub fn intervals(&self) -> Vec<Interval> {
        self.sets
            .iter()
            .map(|[lo, hi]| {
                Interval::new(lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY))
            })
            .collect()
    }

    pub fn basis_spec(&self) -> Result<BasisSpec, IoError> {
        BasisSpec::parse(self.basis.as_deref().unwrap_or("identity"))
    }

    pub fn build(&self) -> Result<GridPrior, IoError> {
        let basis = self.basis_spec()?.matrix()?;
        let density = self
            .density
            .as_deref()
            .map(|d| Density::parse(d).map_err(|e| IoError::Config(format!("`density`: {e}"))))
            .transpose()?;
        let g = &self.grid;
        if let Some(values) = &g.values {
            if g.lo.is_some() || g.hi.is_some() || g.n.is_some() {
                return Err(IoError::Config(
                    "`grid` takes either `values` or `lo`/`hi`/`n`, not both".into(),
                ));
            }
            let weights = match (&g.weights, &density) {
                (Some(w), None) => w.clone(),
                (None, Some(d)) => {
                    let raw: Vec<f64> = values.iter().map(|&x| d.eval(x)).collect();
                    let total: f64 = raw.iter().sum();
                    if !(total > 0.0 && total.is_finite()) {
                        return Err(IoError::Config("`density` has zero mass on `grid.values`".into()));
                    }
                    raw.iter().map(|w| w / total).collect()
                }
                (Some(_), Some(_)) => {
                    return Err(IoError::Config(
                        "give either `grid.weights` or `density`, not both".into(),
                    ))
                }
                (None, None) => {
                    return Err(IoError::Config("missing `grid.weights` or `density`".into()))
                }
            };
            return Ok(GridPrior::new(values.clone(), weights, basis)?);
        }
        if g.weights.is_some() {
            return Err(IoError::Config("`grid.weights` requires `grid.values`".into()));
        }
        let lo = g.lo.ok_or_else(|| IoError::Config("missing `grid.lo`".into()))?;
        let hi = g.hi.ok_or_else(|| IoError::Config("missing `grid.hi`".into()))?;
        let n = g.n.ok_or_else(|| IoError::Config("missing `grid.n`".into()))?;
        let density = density.ok_or_else(|| IoError::Config("missing `density`".into()))?;
        Ok(GridPrior::discretize(lo, hi, n, &density, basis)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt17_renders_and_round_trips() {
        assert_eq!(fmt17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(fmt17(0.5), "0.50000000000000000");
        assert_eq!(fmt17(-2.0), "-2.0000000000000000");
        assert_eq!(fmt17(1e20), "1.0000000000000000e20");
        assert_eq!(fmt17(1.5e-7), "1.4999999999999999e-7");
        assert_eq!(fmt17(0.0), "0.0");
        for x in [1.0 / 3.0, 1e-300, 123456.789, f64::MAX, f64::MIN_POSITIVE, -7e-6, 12345678901234567.0] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap().to_bits(), x.to_bits(), "{x}");
        }
    }

    #[test]
    fn json_output_uses_sig17() {
        let s = to_json(&serde_json::json!({"p": 0.1, "n": 3, "bad": f64::NAN}));
        assert!(s.contains("0.10000000000000001"), "{s}");
        assert!(s.contains("\"n\": 3"), "{s}");
        assert!(s.contains("null"), "{s}");
    }

    #[test]
    fn operator_json_round_trip() {
        let m = ComplexMatrix::from_parts(
            &[vec![1.0 / 3.0, 0.1], vec![0.1, 2.0]],
            &[vec![0.0, -1e-17], vec![1e-17, 0.0]],
        )
        .unwrap();
        let text = to_json(&OperatorJson::from_matrix(&m));
        let back = from_json::<OperatorJson>(&text).unwrap().to_matrix().unwrap();
        for (a, b) in m.as_matrix().iter().zip(back.as_matrix().iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn operator_json_rejects_shape_and_keys() {
        let e = from_json::<OperatorJson>(r#"{"dim": 2, "re": [[1]], "im": [[0]]}"#)
            .unwrap()
            .to_matrix()
            .unwrap_err();
        assert!(e.to_string().contains("`re`"), "{e}");
        let e = from_json::<OperatorJson>(r#"{"dim": 1, "re": [[1]], "imag": [[0]]}"#).unwrap_err();
        assert!(e.to_string().contains("imag"), "{e}");
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let e = read_table("a,b\n1,2\n3,x\n".as_bytes()).unwrap_err();
        assert!(matches!(e, IoError::Csv { line: 3, .. }), "{e}");
        let e = read_table("a,b\n1,2\n3\n".as_bytes()).unwrap_err();
        assert!(matches!(e, IoError::Csv { line: 3, .. }), "{e}");
        let t = read_table("x1, x2 ,y\n1,2,3\n4,5,6\n".as_bytes()).unwrap();
        let (names, x, y) = t.split_response("y").unwrap();
        assert_eq!(names, vec!["x1", "x2"]);
        assert_eq!(x[(1, 1)], 5.0);
        assert_eq!(y[1], 6.0);
        assert!(t.split_response("z").is_err());
    }

    #[test]
    fn channel_and_distribution_tables() {
        let t = read_table("0,1\n0.9,0.1\n0.2,0.8\n".as_bytes()).unwrap();
        let c = channel_from_table(&t).unwrap();
        assert_eq!(c.z_values(), &[0.0, 1.0]);
        assert_eq!(c.n_inputs(), 2);
        let t = read_table("-1,1\n0.25,0.75\n".as_bytes()).unwrap();
        assert_eq!(distribution_from_table(&t).unwrap(), (vec![-1.0, 1.0], vec![0.25, 0.75]));
        let t = read_table("lo,1\n0.25,0.75\n".as_bytes()).unwrap();
        assert!(matches!(distribution_from_table(&t), Err(IoError::Csv { line: 1, .. })));
    }

    #[test]
    fn action_and_parameter_json() {
        let a: ActionJson =
            from_json(r#"{"points": [-2, -1, 1, 2], "elements": [[0,1,2,3],[3,2,1,0]]}"#).unwrap();
        let g = a.to_action().unwrap();
        assert_eq!(g.order(), 2);
        let z: ParameterJson = from_json(r#"{"values": [4, 1, 1, 4]}"#).unwrap();
        let zeta = z.to_function(g.space()).unwrap();
        assert_eq!(zeta.codomain().labels(), &["1".to_string(), "4".to_string()]);
        let bad: ActionJson = from_json(r#"{"points": [0, 1, 2], "elements": [[1,2,0]]}"#).unwrap();
        assert!(matches!(bad.to_action(), Err(IoError::Symmetry(SymmetryError::NotAGroup(_)))));
    }

    #[test]
    fn grid_config_variants() {
        let c: GridPriorConfig = from_json(
            r#"{"grid": {"lo": -3, "hi": 3, "n": 6}, "density": "normal:0,1", "B": [[0, null]], "W": "identity"}"#,
        )
        .unwrap();
        let p = c.build().unwrap();
        assert_eq!(p.grid().len(), 6);
        assert_eq!(c.intervals()[0].hi, f64::INFINITY);

        let c: GridPriorConfig = from_json(
            r#"{"grid": {"values": [-1, 1], "weights": [0, 1]}, "B": [[0, null]], "W": "qubit"}"#,
        )
        .unwrap();
        assert!(c.build().unwrap().basis_change().is_some());

        let e = from_json::<GridPriorConfig>(r#"{"grid": {}, "B": [], "rho": 1}"#).unwrap_err();
        assert!(e.to_string().contains("rho"), "{e}");
        let c: GridPriorConfig = from_json(r#"{"grid": {"lo": 0, "hi": 1}, "density": "normal:0,1", "B": []}"#).unwrap();
        assert!(c.build().unwrap_err().to_string().contains("grid.n"));
        assert!(BasisSpec::parse("qubit:1,1,1;1,-1,-1").is_ok());
        assert!(BasisSpec::parse("rotate").is_err());
    }
}
