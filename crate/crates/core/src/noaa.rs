//! NOAA GSOD (Global Summary of the Day) ingestion.
//!
//! Each GSOD yearly file holds one station's daily summaries. We keep the
//! mean temperature `TEMP` (°F, as published) on a 365-day axis: day 366 of
//! a leap year is dropped so the time axis is exactly the 365-node path graph.
//! Stations below the coverage gate are dropped; interior gaps of the rest are
//! filled linearly and leading/trailing gaps take the nearest observed value.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{Datelike, NaiveDate};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::geo::{read_stations_csv, write_stations_csv, StationCoord};
use crate::transform::{format_f64, ProductSignal};
use crate::{Error, Execution, Result};

pub const DAYS: usize = 365;
/// GSOD sentinel for a missing mean temperature.
pub const TEMP_MISSING: f64 = 9999.9;
pub const DEFAULT_MIN_COVERAGE: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct StationRecord {
    pub station_id: String,
    pub coord: StationCoord,
    /// One slot per day of year; `None` where nothing was observed.
    pub temps: Vec<Option<f64>>,
}

impl StationRecord {
    pub fn present(&self) -> Vec<bool> {
        self.temps.iter().map(Option::is_some).collect()
    }

    /// Fraction of days with an observation.
    pub fn coverage(&self) -> f64 {
        self.temps.iter().filter(|t| t.is_some()).count() as f64 / DAYS as f64
    }

    /// Linear interpolation of interior gaps, nearest-value extension at the ends.
    /// `None` if the record has no observation at all.
    pub fn filled(&self) -> Option<Vec<f64>> {
        let known: Vec<(usize, f64)> = self.temps.iter().enumerate().filter_map(|(d, t)| t.map(|v| (d, v))).collect();
        let (&(first_day, first), &(last_day, last)) = (known.first()?, known.last()?);
        let mut out = vec![0.0; self.temps.len()];
        out[..=first_day].fill(first);
        out[last_day..].fill(last);
        for pair in known.windows(2) {
            let ((d0, v0), (d1, v1)) = (pair[0], pair[1]);
            out[d0] = v0;
            for (d, slot) in out.iter_mut().enumerate().take(d1).skip(d0 + 1) {
                let t = (d - d0) as f64 / (d1 - d0) as f64;
                *slot = v0 + t * (v1 - v0);
            }
        }
        Some(out)
    }
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim().eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::Parse { line: 1, message: format!("missing column {name}") })
}

/// Parses one GSOD yearly CSV.
///
/// Rows dated on day 366 are ignored. If a date appears twice the first row wins.
pub fn parse_gsod_csv(bytes: &[u8]) -> Result<StationRecord> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let headers = rdr.headers().map_err(|e| Error::Parse { line: 1, message: e.to_string() })?.clone();
    if headers.is_empty() {
        return Err(Error::Parse { line: 1, message: "empty file".into() });
    }
    let (c_station, c_date, c_lat, c_lon, c_temp) = (
        column(&headers, "STATION")?,
        column(&headers, "DATE")?,
        column(&headers, "LATITUDE")?,
        column(&headers, "LONGITUDE")?,
        column(&headers, "TEMP")?,
    );
    let mut station_id: Option<String> = None;
    let mut latlon: Option<(f64, f64)> = None;
    let mut year: Option<i32> = None;
    let mut temps = vec![None; DAYS];
    let mut rows = 0;
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::Parse { line, message: e.to_string() })?;
        let field = |c: usize| rec.get(c).ok_or_else(|| Error::Parse { line, message: "row is too short".into() });
        rows += 1;

        let id = field(c_station)?;
        match &station_id {
            None => station_id = Some(id.to_string()),
            Some(s) if s != id => {
                return Err(Error::Parse { line, message: format!("station changes from {s} to {id}") });
            }
            _ => {}
        }
        let date = NaiveDate::parse_from_str(field(c_date)?, "%Y-%m-%d")
            .map_err(|e| Error::Parse { line, message: format!("bad DATE: {e}") })?;
        match year {
            None => year = Some(date.year()),
            Some(y) if y != date.year() => {
                return Err(Error::Parse { line, message: format!("file mixes years {y} and {}", date.year()) });
            }
            _ => {}
        }
        if latlon.is_none() {
            let (lat, lon) = (field(c_lat)?, field(c_lon)?);
            if !lat.is_empty() && !lon.is_empty() {
                let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse { line, message: format!("bad coordinate `{s}`") });
                latlon = Some((parse(lat)?, parse(lon)?));
            }
        }
        let temp_text = field(c_temp)?;
        let temp: f64 = temp_text
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("bad TEMP `{temp_text}`") })?;
        let day = date.ordinal0() as usize;
        if day < DAYS && temps[day].is_none() && temp != TEMP_MISSING {
            temps[day] = Some(temp);
        }
    }
    if rows == 0 {
        return Err(Error::Parse { line: 2, message: "no data rows".into() });
    }
    let station_id = station_id.unwrap_or_default();
    let (lat, lon) = latlon.ok_or_else(|| Error::StationRejected {
        id: station_id.clone(),
        reason: "no LATITUDE/LONGITUDE".into(),
    })?;
    let coord = StationCoord::from_degrees(station_id.clone(), lat, lon)
        .map_err(|e| Error::StationRejected { id: station_id.clone(), reason: e.to_string() })?;
    Ok(StationRecord { station_id, coord, temps })
}

/// Outcome of reading a directory of GSOD files.
#[derive(Debug)]
pub struct LoadedDir {
    /// Parsed records, in file-name order.
    pub records: Vec<StationRecord>,
    /// Files whose station was rejected (e.g. no coordinates), with the reason.
    pub rejected: Vec<(PathBuf, String)>,
}

/// Parses every `*.csv` in `dir` (in parallel when enabled). Malformed files
/// abort the load; rejected stations are reported and skipped.
pub fn load_gsod_dir(dir: &Path, exec: Execution) -> Result<LoadedDir> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("csv")))
        .collect();
    paths.sort();
    let parsed = exec.map_range(paths.len(), |i| {
        let bytes = fs::read(&paths[i]).map_err(|e| Error::io(&paths[i], e))?;
        parse_gsod_csv(&bytes)
    });
    let mut out = LoadedDir { records: Vec::new(), rejected: Vec::new() };
    for (path, result) in paths.into_iter().zip(parsed) {
        match result {
            Ok(r) => out.records.push(r),
            Err(Error::StationRejected { reason, .. }) => out.rejected.push((path, reason)),
            Err(Error::Parse { line, message }) => {
                return Err(Error::Parse { line, message: format!("{}: {message}", path.display()) });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// A station × day temperature signal.
#[derive(Debug, Clone)]
pub struct TemperatureDataset {
    stations: Vec<StationRecord>,
    signal: ProductSignal,
    dropped: Vec<String>,
}

impl TemperatureDataset {
    /// Retained stations, sorted by id (the row order of the signal).
    pub fn stations(&self) -> &[StationRecord] {
        &self.stations
    }

    pub fn coords(&self) -> Vec<StationCoord> {
        self.stations.iter().map(|s| s.coord.clone()).collect()
    }

    pub fn station_ids(&self) -> Vec<String> {
        self.stations.iter().map(|s| s.station_id.clone()).collect()
    }

    /// Gap-filled signal with dims `(stations, 365)`.
    pub fn signal(&self) -> &ProductSignal {
        &self.signal
    }

    /// Ids removed by the coverage gate.
    pub fn dropped(&self) -> &[String] {
        &self.dropped
    }
}

/// Applies the coverage gate, fills gaps and stacks the rows, sorted by station id.
pub fn assemble_dataset(records: Vec<StationRecord>, min_coverage: f64) -> Result<TemperatureDataset> {
    if !(0.0..=1.0).contains(&min_coverage) {
        return Err(Error::param(format!("min_coverage {min_coverage} outside [0, 1]")));
    }
    let mut records = records;
    records.sort_by(|a, b| a.station_id.cmp(&b.station_id));
    if let Some(w) = records.windows(2).find(|w| w[0].station_id == w[1].station_id) {
        return Err(Error::param(format!("station {} appears twice", w[0].station_id)));
    }
    if let Some(r) = records.iter().find(|r| r.temps.len() != DAYS) {
        return Err(Error::shape(format!("station {} has {} days, expected {DAYS}", r.station_id, r.temps.len())));
    }
    let (kept, dropped): (Vec<_>, Vec<_>) =
        records.into_iter().partition(|r| r.coverage() >= min_coverage && r.coverage() > 0.0);
    if kept.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} station(s) meet the {:.0}% coverage gate; at least 2 are needed",
            kept.len(),
            min_coverage * 100.0
        )));
    }
    let mut values = Array2::<f64>::zeros((kept.len(), DAYS));
    for (i, r) in kept.iter().enumerate() {
        let row = r.filled().expect("coverage > 0 guarantees an observation");
        values.row_mut(i).assign(&ndarray::Array1::from(row));
    }
    Ok(TemperatureDataset {
        stations: kept,
        signal: ProductSignal::from_real(values.into_dyn())?,
        dropped: dropped.into_iter().map(|r| r.station_id).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub stations: usize,
    pub days: usize,
    pub min_coverage: f64,
    pub station_ids: Vec<String>,
    pub dropped: Vec<String>,
    pub temperatures: String,
    pub coordinates: String,
}

const MANIFEST: &str = "manifest.json";
const TEMPERATURES: &str = "temperatures.csv";
const COORDINATES: &str = "stations.csv";

/// Writes `manifest.json`, `temperatures.csv` (`station_id,day1..day365`) and
/// `stations.csv` (`id,lat_deg,lon_deg`) into `dir`.
pub fn write_bundle(dir: &Path, ds: &TemperatureDataset, min_coverage: f64) -> Result<BundleManifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest = BundleManifest {
        stations: ds.stations.len(),
        days: DAYS,
        min_coverage,
        station_ids: ds.station_ids(),
        dropped: ds.dropped.clone(),
        temperatures: TEMPERATURES.into(),
        coordinates: COORDINATES.into(),
    };
    let path = dir.join(TEMPERATURES);
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header = vec!["station_id".to_string()];
    header.extend((1..=DAYS).map(|d| format!("day{d}")));
    w.write_record(&header)?;
    let values = ds.signal.real_part();
    for (id, row) in manifest.station_ids.iter().zip(values.outer_iter()) {
        let mut rec = vec![id.clone()];
        rec.extend(row.iter().map(|&v| format_f64(v)));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = dir.join(COORDINATES);
    let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    write_stations_csv(file, &ds.coords())?;

    let path = dir.join(MANIFEST);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Reads a bundle written by [`write_bundle`]. The returned records carry the
/// gap-filled values, so every day is present.
pub fn read_bundle(dir: &Path) -> Result<(BundleManifest, TemperatureDataset)> {
    let path = dir.join(MANIFEST);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: BundleManifest = serde_json::from_str(&text)?;

    let path = dir.join(&manifest.coordinates);
    let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    let coords = read_stations_csv(file)?;

    let path = dir.join(&manifest.temperatures);
    let file = fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let mut ids = Vec::new();
    let mut values = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec?;
        if rec.len() != DAYS + 1 {
            return Err(Error::Parse { line, message: format!("expected {} fields, found {}", DAYS + 1, rec.len()) });
        }
        ids.push(rec[0].to_string());
        for f in rec.iter().skip(1) {
            values.push(f.parse::<f64>().map_err(|_| Error::Parse { line, message: format!("bad value `{f}`") })?);
        }
    }
    if ids != manifest.station_ids || coords.iter().map(StationCoord::id).ne(ids.iter().map(String::as_str)) {
        return Err(Error::param("bundle files disagree on the station list"));
    }
    let signal = ProductSignal::from_flat(&[ids.len(), DAYS], values.clone())?;
    let stations = ids
        .into_iter()
        .zip(coords)
        .zip(values.chunks(DAYS))
        .map(|((station_id, coord), row)| StationRecord { station_id, coord, temps: row.iter().map(|&v| Some(v)).collect() })
        .collect();
    Ok((manifest.clone(), TemperatureDataset { stations, signal, dropped: manifest.dropped }))
}
