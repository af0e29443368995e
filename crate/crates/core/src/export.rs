//! CSV and JSON emission. Floats are written with 17 significant digits so that
//! every exported value reads back bit-for-bit.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GeometryCurves;
use crate::params::SolitonParams;
use crate::profile::{ProfileStatus, RadialProfile, SolverSettings};

pub const PROFILE_HEADER: [&str; 3] = ["r", "v", "dv"];
pub const GEOMETRY_HEADER: [&str; 7] = ["r", "v", "w", "R", "K0", "K1", "psi_s"];

/// 17 significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_rows<W: Write>(out: W, header: &[&str], columns: &[&[f64]]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(header)?;
    let len = columns.first().map_or(0, |c| c.len());
    for i in 0..len {
        wtr.write_record(columns.iter().map(|c| fmt_float(c[i])))?;
    }
    wtr.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn read_columns<R: Read>(input: R, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::Reader::from_reader(input);
    let found: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if found != header {
        return Err(Error::InvalidArgument(format!(
            "unexpected CSV header {found:?}, expected {header:?}"
        )));
    }
    let mut cols = vec![Vec::new(); header.len()];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (j, field) in rec.iter().enumerate() {
            let x: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("row {}: '{field}' is not a number", line + 1)))?;
            cols[j].push(x);
        }
    }
    Ok(cols)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

/// Serde adapter for floats that may be NaN or infinite: written as `null`, read
/// back as NaN.
pub mod nullable_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

pub fn write_profile_csv_to<W: Write>(profile: &RadialProfile, out: W) -> Result<()> {
    csv_rows(out, &PROFILE_HEADER, &[&profile.r, &profile.v, &profile.dv])
}

pub fn write_profile_csv(profile: &RadialProfile, path: &Path) -> Result<()> {
    write_profile_csv_to(profile, create(path)?)
}

/// Everything needed besides the samples to rebuild a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub params: SolitonParams,
    pub status: ProfileStatus,
    pub settings: SolverSettings,
    pub grid_points: usize,
}

impl ProfileMeta {
    pub fn of(profile: &RadialProfile) -> Self {
        Self {
            params: profile.params,
            status: profile.status.clone(),
            settings: profile.settings,
            grid_points: profile.len(),
        }
    }
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    Ok(serde_json::from_reader(std::io::BufReader::new(open(path)?))?)
}

/// Profile CSV plus its JSON sidecar.
pub fn read_profile(csv_path: &Path, meta_path: &Path) -> Result<RadialProfile> {
    let meta: ProfileMeta = read_json(meta_path)?;
    read_profile_with(open(csv_path)?, meta)
}

pub fn read_profile_with<R: Read>(input: R, meta: ProfileMeta) -> Result<RadialProfile> {
    let mut cols = read_columns(input, &PROFILE_HEADER)?.into_iter();
    let (r, v, dv) = (cols.next().unwrap(), cols.next().unwrap(), cols.next().unwrap());
    if r.len() != meta.grid_points {
        return Err(Error::InvalidArgument(format!(
            "sidecar announces {} points, CSV has {}",
            meta.grid_points,
            r.len()
        )));
    }
    RadialProfile::from_samples(meta.params, r, v, dv, meta.status, meta.settings)
}

/// The exported geometry columns.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryTable {
    pub r: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub scalar: Vec<f64>,
    pub k0: Vec<f64>,
    pub k1: Vec<f64>,
    pub psi_s: Vec<f64>,
}

impl From<&GeometryCurves> for GeometryTable {
    fn from(c: &GeometryCurves) -> Self {
        Self {
            r: c.r.clone(),
            v: c.v.clone(),
            w: c.w.clone(),
            scalar: c.scalar.clone(),
            k0: c.k0.clone(),
            k1: c.k1.clone(),
            psi_s: c.psi_s.clone(),
        }
    }
}

impl GeometryTable {
    fn columns(&self) -> [&[f64]; 7] {
        [&self.r, &self.v, &self.w, &self.scalar, &self.k0, &self.k1, &self.psi_s]
    }

    /// Largest relative difference over all columns.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        let mut worst = 0f64;
        for (a, b) in self.columns().iter().zip(other.columns()) {
            if a.len() != b.len() {
                return f64::INFINITY;
            }
            for (x, y) in a.iter().zip(b) {
                let d = (x - y).abs();
                if d > 0.0 {
                    worst = worst.max(d / x.abs().max(y.abs()));
                }
            }
        }
        worst
    }
}

pub fn write_geometry_csv_to<W: Write>(curves: &GeometryCurves, out: W) -> Result<()> {
    let t = GeometryTable::from(curves);
    csv_rows(out, &GEOMETRY_HEADER, &t.columns())
}

pub fn write_geometry_csv(curves: &GeometryCurves, path: &Path) -> Result<()> {
    write_geometry_csv_to(curves, create(path)?)
}

pub fn read_geometry_csv(path: &Path) -> Result<GeometryTable> {
    read_geometry_csv_from(open(path)?)
}

pub fn read_geometry_csv_from<R: Read>(input: R) -> Result<GeometryTable> {
    let mut c = read_columns(input, &GEOMETRY_HEADER)?.into_iter();
    let mut next = || c.next().unwrap();
    Ok(GeometryTable {
        r: next(),
        v: next(),
        w: next(),
        scalar: next(),
        k0: next(),
        k1: next(),
        psi_s: next(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry;
    use crate::profile::solve_profile;

    #[test]
    fn float_format_round_trips() {
        for x in [
            1.0,
            -0.1,
            1e-300,
            6.02214076e23,
            std::f64::consts::PI,
            f64::MIN_POSITIVE,
        ] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn profile_and_geometry_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = SolitonParams::soliton(3, 1.0, 1.0, 1.0);
        let prof = solve_profile(&p, 50.0, &SolverSettings::default()).unwrap();
        let csv = dir.path().join("profile.csv");
        let meta = dir.path().join("profile.json");
        write_profile_csv(&prof, &csv).unwrap();
        write_json(&ProfileMeta::of(&prof), &meta).unwrap();
        let back = read_profile(&csv, &meta).unwrap();
        assert_eq!(back, prof);

        let geo = dir.path().join("sub/geometry.csv");
        write_geometry_csv(&geometry::geometry(&prof).unwrap(), &geo).unwrap();
        let exported = read_geometry_csv(&geo).unwrap();
        let recomputed = GeometryTable::from(&geometry::geometry(&back).unwrap());
        assert!(exported.max_rel_diff(&recomputed) < 1e-12);
    }

    #[test]
    fn bad_header_rejected() {
        let err = read_geometry_csv_from("r,v,w\n1,2,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
        let err = read_geometry_csv_from(&b"r,v,w,R,K0,K1,psi_s\n1,2,x,4,5,6,7\n"[..]).unwrap_err();
        assert!(err.to_string().contains("not a number"));
    }

    #[test]
    fn non_finite_fields_read_back_as_nan() {
        #[derive(Serialize, Deserialize)]
        struct T {
            #[serde(with = "nullable_f64")]
            x: f64,
        }
        let text = serde_json::to_string(&T { x: f64::NAN }).unwrap();
        assert_eq!(text, r#"{"x":null}"#);
        assert!(serde_json::from_str::<T>(&text).unwrap().x.is_nan());
        assert_eq!(serde_json::from_str::<T>(r#"{"x":1.5}"#).unwrap().x, 1.5);
    }
}
