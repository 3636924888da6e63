//! CSV and binary persistence for [`CountTable`].
//!
//! Binary layout: magic `GJT1`, one version byte, then records of
//! `n: u32 LE, g: u32 LE, len: u32 LE, magnitude: [u8; len] LE`.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;

use super::count_table::{max_genus, CountTable};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"GJT1";
pub const VERSION: u8 = 1;

fn records(table: &CountTable) -> impl Iterator<Item = (usize, usize, &BigUint)> {
    (0..(table.n_max() + 1) as usize).flat_map(move |n| {
            table
                .row(n)
                .unwrap()
                .iter()
                .enumerate()
                .map(move |(g, t)| (n, g, t))
        })
}

pub fn write_csv<W: Write>(table: &CountTable, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["n", "g", "tau"])?;
    for (n, g, t) in records(table) {
        out.write_record([n.to_string(), g.to_string(), t.to_str_radix(10)])?;
    }
    out.flush()?;
    Ok(())
}

fn infer_cap(rows: &[Vec<BigUint>]) -> Result<Option<usize>> {
    let full = rows.iter().enumerate().all(|(n, r)| r.len() == max_genus(n) + 1);
    if full {
        return Ok(None);
    }
    let cap = rows.iter().map(|r| r.len()).max().unwrap_or(1) - 1;
    Ok(Some(cap))
}

fn assemble(entries: Vec<(usize, usize, BigUint)>) -> Result<CountTable> {
    let mut rows: Vec<Vec<BigUint>> = Vec::new();
    for (n, g, t) in entries {
        if n == rows.len() {
            rows.push(Vec::new());
        }
        if n + 1 != rows.len() || g != rows[n].len() {
            return Err(Error::Format(format!("record ({n},{g}) out of order")));
        }
        rows[n].push(t);
    }
    let cap = infer_cap(&rows)?;
    let mut table = CountTable::from_tau_rows(rows, cap)?;
    table.set_persisted(true);
    Ok(table)
}

pub fn read_csv<R: Read>(r: R) -> Result<CountTable> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["n", "g", "tau"] {
        return Err(Error::Format("CSV header must be n,g,tau".into()));
    }
    let mut entries = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let bad = |what: &str| Error::Format(format!("bad {what} in {rec:?}"));
        let n = rec[0].parse().map_err(|_| bad("n"))?;
        let g = rec[1].parse().map_err(|_| bad("g"))?;
        let t = BigUint::parse_bytes(rec[2].as_bytes(), 10).ok_or_else(|| bad("tau"))?;
        entries.push((n, g, t));
    }
    assemble(entries)
}

pub fn write_binary<W: Write>(table: &CountTable, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION])?;
    for (n, g, t) in records(table) {
        let bytes = t.to_bytes_le();
        w.write_all(&(n as u32).to_le_bytes())?;
        w.write_all(&(g as u32).to_le_bytes())?;
        w.write_all(&(bytes.len() as u32).to_le_bytes())?;
        w.write_all(&bytes)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<CountTable> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    if buf.len() < 5 || &buf[..4] != MAGIC {
        return Err(Error::Format("missing GJT1 magic".into()));
    }
    if buf[4] != VERSION {
        return Err(Error::Format(format!("unsupported version {}", buf[4])));
    }
    let mut pos = 5;
    let word = |pos: &mut usize| -> Result<u32> {
        let b = buf
            .get(*pos..*pos + 4)
            .ok_or_else(|| Error::Format("truncated record".into()))?;
        *pos += 4;
        Ok(u32::from_le_bytes(b.try_into().unwrap()))
    };
    let mut entries = Vec::new();
    while pos < buf.len() {
        let n = word(&mut pos)? as usize;
        let g = word(&mut pos)? as usize;
        let len = word(&mut pos)? as usize;
        let mag = buf
            .get(pos..pos + len)
            .ok_or_else(|| Error::Format("truncated magnitude".into()))?;
        pos += len;
        entries.push((n, g, BigUint::from_bytes_le(mag)));
    }
    assemble(entries)
}

pub fn cache_path(dir: &Path, genus_cap: Option<usize>) -> PathBuf {
    match genus_cap {
        Some(c) => dir.join(format!("gj_cap{c}.gjt")),
        None => dir.join("gj_full.gjt"),
    }
}

/// Loads the cached table for this genus cap, extends it to `n_max` if
/// needed and writes it back.
pub fn load_or_build(dir: &Path, n_max: usize, genus_cap: Option<usize>) -> Result<CountTable> {
    let path = cache_path(dir, genus_cap);
    let mut table = match fs::File::open(&path) {
        Ok(f) => {
            let t = read_binary(std::io::BufReader::new(f))?;
            // A short capped table looks uncapped; the file name decides.
            let rows = (0..=t.n_max())
                .filter(|&n| n >= 0)
                .map(|n| t.row(n as usize).unwrap().to_vec())
                .collect();
            CountTable::from_tau_rows(rows, genus_cap)?
        }
        Err(_) => match genus_cap {
            Some(c) => CountTable::with_genus_cap(c),
            None => CountTable::new(),
        },
    };
    if table.n_max() < n_max as i64 {
        table.extend(n_max)?;
        fs::create_dir_all(dir)?;
        let tmp = path.with_extension("tmp");
        write_binary(&table, std::io::BufWriter::new(fs::File::create(&tmp)?))?;
        fs::rename(&tmp, &path)?;
    }
    table.set_persisted(true);
    Ok(table)
}
