//! On-disk formats: circle-set and count-series CSV files, each with a JSON
//! sidecar at `<file>.json` carrying provenance and digests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::counting::{CountSeries, SeriesMetadata};
use crate::error::{Error, Result};
use crate::mobius::{Circle, CircleKind, Rational, Scalar};
use crate::packing::{Backend, CircleSet, Provenance};

pub const CIRCLE_HEADER: [&str; 5] = ["kind", "b", "bbar", "wx", "wy"];
pub const SERIES_HEADER: [&str; 3] = ["param", "value", "count"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: String,
    /// SHA-256 of the data file's bytes.
    pub content_sha256: String,
    /// SHA-256 of the resolved run configuration, including input digests.
    pub input_digest: String,
    pub config: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<SeriesMetadata>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest of a configuration map; keys are already ordered.
pub fn config_digest(config: &BTreeMap<String, String>) -> String {
    let mut text = String::new();
    for (k, v) in config {
        text.push_str(k);
        text.push('=');
        text.push_str(v);
        text.push('\n');
    }
    sha256_hex(text.as_bytes())
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn circle_csv<S: Scalar>(circles: &[Circle<S>]) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(CIRCLE_HEADER).map_err(csv_err)?;
    for c in circles {
        let kind = match c.kind() {
            CircleKind::Circle => "circle",
            CircleKind::Line => "line",
        };
        w.write_record([kind.to_string(), c.b().format(), c.bbar().format(), c.wx().format(), c.wy().format()])
            .map_err(csv_err)?;
    }
    finish(w)
}

fn reader<'a>(text: &'a str, header: &[&str]) -> Result<csv::Reader<&'a [u8]>> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let got: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if got != header {
        return Err(Error::Parse(format!("expected header {}, got {}", header.join(","), got.join(","))));
    }
    Ok(r)
}

pub fn parse_circle_csv<S: Scalar>(text: &str) -> Result<Vec<Circle<S>>> {
    let mut r = reader(text, &CIRCLE_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 5 {
            return Err(Error::Parse(format!("row {}: expected 5 fields", i + 1)));
        }
        let f = |k: usize| S::parse(&rec[k]);
        let c = Circle::from_coords(f(2)?, f(1)?, f(3)?, f(4)?)?;
        let kind = match c.kind() {
            CircleKind::Circle => "circle",
            CircleKind::Line => "line",
        };
        if kind != &rec[0] {
            return Err(Error::Parse(format!("row {}: kind {:?} does not match b = {}", i + 1, &rec[0], &rec[1])));
        }
        out.push(c);
    }
    Ok(out)
}

pub fn series_csv(series: &CountSeries) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(SERIES_HEADER).map_err(csv_err)?;
    for (v, c) in series.points() {
        w.write_record([series.param.clone(), v.to_string(), c.to_string()]).map_err(csv_err)?;
    }
    finish(w)
}

pub fn parse_series_csv(text: &str, metadata: SeriesMetadata) -> Result<CountSeries> {
    let mut r = reader(text, &SERIES_HEADER)?;
    let mut param = None::<String>;
    let (mut ladder, mut counts) = (Vec::new(), Vec::new());
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != 3 {
            return Err(Error::Parse("count rows need 3 fields".into()));
        }
        match &param {
            Some(p) if p != &rec[0] => return Err(Error::Parse("mixed parameters in one series".into())),
            _ => param = Some(rec[0].to_string()),
        }
        ladder.push(rec[1].parse::<f64>().map_err(|e| Error::Parse(format!("{:?}: {e}", &rec[1])))?);
        counts.push(rec[2].parse::<u64>().map_err(|e| Error::Parse(format!("{:?}: {e}", &rec[2])))?);
    }
    let param = param.ok_or_else(|| Error::Parse("empty count series".into()))?;
    Ok(CountSeries { param, ladder, counts, metadata })
}

/// Writes `content` to `path` and its sidecar next to it.
pub fn write_with_sidecar(path: &Path, content: &str, mut sidecar: Sidecar) -> Result<Sidecar> {
    sidecar.content_sha256 = sha256_hex(content.as_bytes());
    fs::write(path, content)?;
    let mut json = serde_json::to_string_pretty(&sidecar)?;
    json.push('\n');
    fs::write(sidecar_path(path), json)?;
    Ok(sidecar)
}

/// Reads a data file and its sidecar, refusing if the content digest differs.
pub fn read_with_sidecar(path: &Path) -> Result<(String, Sidecar)> {
    let content = fs::read_to_string(path)?;
    let side_path = sidecar_path(path);
    let side: Sidecar = serde_json::from_str(&fs::read_to_string(&side_path).map_err(|e| {
        Error::InvalidArgument(format!("cannot read sidecar {}: {e}", side_path.display()))
    })?)?;
    let digest = sha256_hex(content.as_bytes());
    if digest != side.content_sha256 {
        return Err(Error::InvalidArgument(format!(
            "{} does not match its sidecar digest ({digest} vs {})",
            path.display(),
            side.content_sha256
        )));
    }
    Ok((content, side))
}

/// A circle set of either backend.
#[derive(Clone, Debug)]
pub enum AnySet {
    Exact(CircleSet<Rational>),
    Float(CircleSet<f64>),
}

impl AnySet {
    pub fn provenance(&self) -> &Provenance {
        match self {
            AnySet::Exact(s) => &s.provenance,
            AnySet::Float(s) => &s.provenance,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            AnySet::Exact(s) => s.len(),
            AnySet::Float(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn load_circle_set(path: &Path) -> Result<(AnySet, Sidecar)> {
    let (content, side) = read_with_sidecar(path)?;
    let provenance = side
        .provenance
        .clone()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no provenance in its sidecar", path.display())))?;
    let set = match provenance.backend {
        Backend::Exact => AnySet::Exact(CircleSet { circles: parse_circle_csv(&content)?, provenance }),
        Backend::Float => AnySet::Float(CircleSet { circles: parse_circle_csv(&content)?, provenance }),
    };
    Ok((set, side))
}

pub fn load_series(path: &Path) -> Result<(CountSeries, Sidecar)> {
    let (content, side) = read_with_sidecar(path)?;
    let metadata = side
        .metadata
        .clone()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no series metadata in its sidecar", path.display())))?;
    Ok((parse_series_csv(&content, metadata)?, side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::Region;
    use crate::packing::{enumerate_orbit, strip_apollonian_spec, EnumConfig};

    #[test]
    fn circle_csv_round_trips_both_backends() {
        let spec = strip_apollonian_spec::<Rational>().unwrap();
        let set = enumerate_orbit(&spec, &EnumConfig::new(30.0, Region::rect(-1.0, 0.0, 1.0, 2.0).unwrap())).unwrap();
        let text = circle_csv(&set.circles).unwrap();
        assert!(text.starts_with("kind,b,bbar,wx,wy\n"));
        assert!(text.contains("line,0/1,"));
        assert_eq!(parse_circle_csv::<Rational>(&text).unwrap(), set.circles);
        let float = set.to_float();
        let text = circle_csv(&float.circles).unwrap();
        assert_eq!(parse_circle_csv::<f64>(&text).unwrap(), float.circles);
    }

    #[test]
    fn sidecar_digest_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let meta = SeriesMetadata { quantity: "curvature".into(), region: None, packing: "x".into(), digest: None };
        let series = CountSeries { param: "T".into(), ladder: vec![2.0, 4.0], counts: vec![1, 3], metadata: meta.clone() };
        let side = Sidecar {
            format: "count-series/1".into(),
            content_sha256: String::new(),
            input_digest: "abc".into(),
            config: BTreeMap::new(),
            provenance: None,
            metadata: Some(meta),
        };
        write_with_sidecar(&path, &series_csv(&series).unwrap(), side).unwrap();
        let (back, _) = load_series(&path).unwrap();
        assert_eq!(back, series);
        fs::write(&path, "param,value,count\nT,2,1\n").unwrap();
        assert!(load_series(&path).is_err());
    }
}
