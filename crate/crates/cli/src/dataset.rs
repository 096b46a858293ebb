//! Flight datasets: a directory with `waypoints.csv` (`id,lat,lon`),
//! `segments.csv` (`tail,head`), `levels.csv` (`level,alt_m`), `tfrs.txt`
//! and `od.csv` (`origin,destination`). The optimal level is the highest.

use std::fs;
use std::path::{Path, PathBuf};

use lcsp_flight::{parse_tfrs, write_tfrs, LatLon, LevelTable, ProjectedNetwork, Tfr};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{}:{line}: {message}", path.display())]
    Invalid { path: PathBuf, line: u64, message: String },
    #[error("{}: {source}", path.display())]
    Tfr { path: PathBuf, source: lcsp_flight::TfrParseError },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlightDataset {
    pub network: ProjectedNetwork,
    pub levels: LevelTable,
    pub tfrs: Vec<Tfr>,
    pub od_pairs: Vec<(String, String)>,
}

fn rows(dir: &Path, name: &str, header: &[&str]) -> Result<Vec<(u64, Vec<String>)>, DatasetError> {
    let path = dir.join(name);
    let csv_err = |source| DatasetError::Csv { path: path.clone(), source };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(&path)
        .map_err(csv_err)?;
    let got: Vec<String> = reader.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if got != header {
        return Err(DatasetError::Invalid {
            path: path.clone(),
            line: 1,
            message: format!("expected header {}", header.join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line());
        out.push((line, rec.iter().map(str::to_string).collect()));
    }
    Ok(out)
}

fn number<T: std::str::FromStr>(path: &Path, line: u64, field: &str, what: &str) -> Result<T, DatasetError> {
    field.parse().map_err(|_| DatasetError::Invalid {
        path: path.to_path_buf(),
        line,
        message: format!("invalid {what} {field:?}"),
    })
}

impl FlightDataset {
    pub fn load(dir: &Path) -> Result<FlightDataset, DatasetError> {
        let invalid = |name: &str, line: u64, message: String| DatasetError::Invalid {
            path: dir.join(name),
            line,
            message,
        };
        let mut network = ProjectedNetwork::new();
        let wp = dir.join("waypoints.csv");
        for (line, r) in rows(dir, "waypoints.csv", &["id", "lat", "lon"])? {
            let lat = number(&wp, line, &r[1], "latitude")?;
            let lon = number(&wp, line, &r[2], "longitude")?;
            network
                .add_waypoint(r[0].clone(), LatLon::new(lat, lon))
                .map_err(|e| invalid("waypoints.csv", line, e.to_string()))?;
        }
        for (line, r) in rows(dir, "segments.csv", &["tail", "head"])? {
            network
                .add_segment(&r[0], &r[1])
                .map_err(|e| invalid("segments.csv", line, e.to_string()))?;
        }
        let lv = dir.join("levels.csv");
        let mut altitudes = Vec::new();
        for (line, r) in rows(dir, "levels.csv", &["level", "alt_m"])? {
            let level: usize = number(&lv, line, &r[0], "level")?;
            if level != altitudes.len() + 1 {
                return Err(invalid("levels.csv", line, format!("expected level {}", altitudes.len() + 1)));
            }
            altitudes.push(number(&lv, line, &r[1], "altitude")?);
        }
        let top = altitudes.len() as u16;
        let levels = LevelTable::new(altitudes, top).map_err(|e| invalid("levels.csv", 1, e.to_string()))?;
        let tp = dir.join("tfrs.txt");
        let text = fs::read_to_string(&tp).map_err(|source| DatasetError::Io { path: tp.clone(), source })?;
        let tfrs = parse_tfrs(&text).map_err(|source| DatasetError::Tfr { path: tp, source })?;
        let mut od_pairs = Vec::new();
        for (line, r) in rows(dir, "od.csv", &["origin", "destination"])? {
            for id in &r {
                if network.waypoint_index(id).is_none() {
                    return Err(invalid("od.csv", line, format!("unknown airport {id:?}")));
                }
            }
            od_pairs.push((r[0].clone(), r[1].clone()));
        }
        Ok(FlightDataset {
            network,
            levels,
            tfrs,
            od_pairs,
        })
    }

    pub fn save(&self, dir: &Path) -> Result<(), DatasetError> {
        fs::create_dir_all(dir).map_err(|source| DatasetError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let net = &self.network;
        let waypoints: Vec<Vec<String>> = net
            .waypoints()
            .iter()
            .map(|w| vec![w.id.clone(), w.position.lat.to_string(), w.position.lon.to_string()])
            .collect();
        write_csv(dir, "waypoints.csv", &["id", "lat", "lon"], &waypoints)?;
        let segments: Vec<Vec<String>> = net
            .segments()
            .iter()
            .map(|s| vec![net.waypoint(s.tail).id.clone(), net.waypoint(s.head).id.clone()])
            .collect();
        write_csv(dir, "segments.csv", &["tail", "head"], &segments)?;
        let levels: Vec<Vec<String>> = self
            .levels
            .levels()
            .map(|l| vec![l.to_string(), self.levels.altitude(l).to_string()])
            .collect();
        write_csv(dir, "levels.csv", &["level", "alt_m"], &levels)?;
        let tp = dir.join("tfrs.txt");
        fs::write(&tp, write_tfrs(&self.tfrs)).map_err(|source| DatasetError::Io { path: tp, source })?;
        let od: Vec<Vec<String>> = self.od_pairs.iter().map(|(o, d)| vec![o.clone(), d.clone()]).collect();
        write_csv(dir, "od.csv", &["origin", "destination"], &od)
    }
}

fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<(), DatasetError> {
    let path = dir.join(name);
    let csv_err = |source| DatasetError::Csv { path: path.clone(), source };
    let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush().map_err(|source| DatasetError::Io { path: path.clone(), source })
}
