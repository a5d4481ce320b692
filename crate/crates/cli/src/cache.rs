//! On-disk cache of coefficient tables.
//!
//! File layout, all integers little-endian:
//!
//! ```text
//! magic   8 bytes  "OTTRLAB\0"
//! version u32
//! kind    u8       1 = height ladder, 2 = diameter table
//! n_max   u64
//! h_max   u64
//! count   u64      number of series that follow
//! series  count times: order u64, then order + 1 integers
//! integer sign u8 (0 zero, 1 positive, 2 negative), len u32, len bytes magnitude
//! ```
//!
//! A height ladder stores its levels followed by `y`; a diameter table
//! stores `u_1 .. u_{n_max-1}` followed by `u`.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, Sign};
use otterlab_core::{DiameterTable, HeightLadder, TruncatedIntSeries};
use tempfile::NamedTempFile;

pub const MAGIC: &[u8; 8] = b"OTTRLAB\0";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    HeightLadder = 1,
    DiameterTable = 2,
}

impl TableKind {
    fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(TableKind::HeightLadder),
            2 => Some(TableKind::DiameterTable),
            _ => None,
        }
    }

    fn slug(self) -> &'static str {
        match self {
            TableKind::HeightLadder => "height",
            TableKind::DiameterTable => "diameter",
        }
    }
}

/// Identifies one cache file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CacheKey {
    pub kind: TableKind,
    pub n_max: usize,
    pub h_max: usize,
    pub version: u32,
}

impl CacheKey {
    pub fn new(kind: TableKind, n_max: usize, h_max: usize) -> Self {
        CacheKey { kind, n_max, h_max, version: FORMAT_VERSION }
    }

    pub fn file_name(&self) -> String {
        format!("{}-n{}-h{}.v{}.bin", self.kind.slug(), self.n_max, self.h_max, self.version)
    }
}

/// Decoded cache contents.
#[derive(Clone, Debug, PartialEq)]
pub struct CacheEntry {
    pub key: CacheKey,
    pub payload: Vec<TruncatedIntSeries>,
}

fn bad(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

fn write_u32(w: &mut impl Write, v: u32) -> io::Result<()> {
    w.write_all(&v.to_le_bytes())
}

fn write_u64(w: &mut impl Write, v: usize) -> io::Result<()> {
    w.write_all(&(v as u64).to_le_bytes())
}

fn read_array<const N: usize>(r: &mut impl Read) -> io::Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

fn read_u32(r: &mut impl Read) -> io::Result<u32> {
    Ok(u32::from_le_bytes(read_array(r)?))
}

fn read_u64(r: &mut impl Read) -> io::Result<usize> {
    let v = u64::from_le_bytes(read_array(r)?);
    usize::try_from(v).map_err(|_| bad("length does not fit in usize"))
}

pub fn write_bigint(w: &mut impl Write, x: &BigInt) -> io::Result<()> {
    let (sign, bytes) = x.to_bytes_le();
    let tag = match sign {
        Sign::NoSign => 0u8,
        Sign::Plus => 1,
        Sign::Minus => 2,
    };
    let bytes = if tag == 0 { Vec::new() } else { bytes };
    w.write_all(&[tag])?;
    write_u32(w, u32::try_from(bytes.len()).map_err(|_| bad("integer too large"))?)?;
    w.write_all(&bytes)
}

pub fn read_bigint(r: &mut impl Read) -> io::Result<BigInt> {
    let [tag] = read_array::<1>(r)?;
    let len = read_u32(r)? as usize;
    let mut bytes = vec![0u8; len];
    r.read_exact(&mut bytes)?;
    let sign = match tag {
        0 if len == 0 => return Ok(BigInt::from(0)),
        1 => Sign::Plus,
        2 => Sign::Minus,
        _ => return Err(bad(format!("bad sign byte {tag}"))),
    };
    Ok(BigInt::from_bytes_le(sign, &bytes))
}

pub fn encode(entry: &CacheEntry, w: &mut impl Write) -> io::Result<()> {
    w.write_all(MAGIC)?;
    write_u32(w, entry.key.version)?;
    w.write_all(&[entry.key.kind as u8])?;
    write_u64(w, entry.key.n_max)?;
    write_u64(w, entry.key.h_max)?;
    write_u64(w, entry.payload.len())?;
    for s in &entry.payload {
        write_u64(w, s.trunc_order())?;
        for c in s.coeffs() {
            write_bigint(w, c)?;
        }
    }
    Ok(())
}

/// Decodes an entry. A version other than [`FORMAT_VERSION`] is an error,
/// never a reinterpretation.
pub fn decode(r: &mut impl Read) -> io::Result<CacheEntry> {
    if &read_array::<8>(r)? != MAGIC {
        return Err(bad("not an otterlab cache file"));
    }
    let version = read_u32(r)?;
    if version != FORMAT_VERSION {
        return Err(bad(format!("cache format version {version}, expected {FORMAT_VERSION}")));
    }
    let [kind] = read_array::<1>(r)?;
    let kind = TableKind::from_byte(kind).ok_or_else(|| bad(format!("unknown table kind {kind}")))?;
    let n_max = read_u64(r)?;
    let h_max = read_u64(r)?;
    let count = read_u64(r)?;
    if count > n_max + 2 {
        return Err(bad("implausible series count"));
    }
    let mut payload = Vec::with_capacity(count);
    for _ in 0..count {
        let order = read_u64(r)?;
        if order != n_max {
            return Err(bad("series order does not match header"));
        }
        let coeffs = (0..=order).map(|_| read_bigint(r)).collect::<io::Result<Vec<_>>>()?;
        payload.push(TruncatedIntSeries::from_coeffs(coeffs));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(bad("trailing bytes after payload"));
    }
    Ok(CacheEntry { key: CacheKey { kind, n_max, h_max, version }, payload })
}

impl CacheEntry {
    pub fn from_ladder(ladder: &HeightLadder) -> Self {
        let mut payload = ladder.stored_levels().to_vec();
        payload.push(ladder.total().clone());
        CacheEntry { key: CacheKey::new(TableKind::HeightLadder, ladder.n_max(), ladder.h_max()), payload }
    }

    pub fn from_diameter_table(table: &DiameterTable, h_max: usize) -> Self {
        let mut payload = table.all_series().to_vec();
        payload.push(table.unrooted().clone());
        CacheEntry { key: CacheKey::new(TableKind::DiameterTable, table.n_max(), h_max), payload }
    }

    pub fn into_ladder(self) -> io::Result<HeightLadder> {
        if self.key.kind != TableKind::HeightLadder {
            return Err(bad("entry is not a height ladder"));
        }
        let mut levels = self.payload;
        let total = levels.pop().ok_or_else(|| bad("empty ladder payload"))?;
        HeightLadder::from_parts(self.key.n_max, self.key.h_max, levels, total).map_err(|e| bad(e.to_string()))
    }

    pub fn into_diameter_table(self) -> io::Result<DiameterTable> {
        if self.key.kind != TableKind::DiameterTable {
            return Err(bad("entry is not a diameter table"));
        }
        let mut series = self.payload;
        let unrooted = series.pop().ok_or_else(|| bad("empty diameter payload"))?;
        DiameterTable::from_parts(series, unrooted).map_err(|e| bad(e.to_string()))
    }
}

/// Cache directory: `OTTERLAB_CACHE` if set, else the platform cache dir.
pub fn default_dir() -> Option<PathBuf> {
    match std::env::var_os("OTTERLAB_CACHE") {
        Some(p) if !p.is_empty() => Some(PathBuf::from(p)),
        _ => dirs::cache_dir().map(|d| d.join("otterlab")),
    }
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    /// `Ok(None)` when absent. Entries whose header disagrees with the key
    /// are rejected.
    pub fn load(&self, key: &CacheKey) -> io::Result<Option<CacheEntry>> {
        let path = self.path_for(key);
        let file = match File::open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e),
        };
        let entry = decode(&mut BufReader::new(file))?;
        if entry.key != *key {
            return Err(bad(format!("{} holds a different table", path.display())));
        }
        Ok(Some(entry))
    }

    /// Writes to a temporary file in the cache directory, then renames it
    /// into place.
    pub fn store(&self, entry: &CacheEntry) -> io::Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let tmp = NamedTempFile::new_in(&self.dir)?;
        {
            let mut w = BufWriter::new(tmp.as_file());
            encode(entry, &mut w)?;
            w.flush()?;
        }
        tmp.as_file().sync_all()?;
        let path = self.path_for(&entry.key);
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use otterlab_core::trees::height_ladder;
    use proptest::prelude::*;

    fn round_trip(entry: &CacheEntry) -> CacheEntry {
        let mut buf = Vec::new();
        encode(entry, &mut buf).unwrap();
        decode(&mut buf.as_slice()).unwrap()
    }

    #[test]
    fn ladder_round_trip_is_exact() {
        let ladder = height_ladder(60, 20).unwrap();
        let entry = CacheEntry::from_ladder(&ladder);
        let back = round_trip(&entry);
        assert_eq!(back, entry);
        assert_eq!(back.into_ladder().unwrap(), ladder);
    }

    #[test]
    fn diameter_round_trip_is_exact() {
        let ladder = height_ladder(30, 15).unwrap();
        let table = DiameterTable::new(&ladder).unwrap();
        let back = round_trip(&CacheEntry::from_diameter_table(&table, 15));
        assert_eq!(back.into_diameter_table().unwrap(), table);
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let entry = CacheEntry::from_ladder(&height_ladder(8, 8).unwrap());
        let mut buf = Vec::new();
        encode(&entry, &mut buf).unwrap();
        buf[8..12].copy_from_slice(&(FORMAT_VERSION + 1).to_le_bytes());
        let err = decode(&mut buf.as_slice()).unwrap_err();
        assert!(err.to_string().contains("version"));
    }

    #[test]
    fn truncated_and_corrupt_files_are_rejected() {
        let entry = CacheEntry::from_ladder(&height_ladder(12, 12).unwrap());
        let mut buf = Vec::new();
        encode(&entry, &mut buf).unwrap();
        assert!(decode(&mut &buf[..buf.len() - 1]).is_err());
        let mut longer = buf.clone();
        longer.push(0);
        assert!(decode(&mut longer.as_slice()).is_err());
        let mut wrong = buf.clone();
        wrong[0] = b'X';
        assert!(decode(&mut wrong.as_slice()).is_err());
    }

    #[test]
    fn store_and_load_through_directory() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let ladder = height_ladder(25, 10).unwrap();
        let entry = CacheEntry::from_ladder(&ladder);
        assert!(cache.load(&entry.key).unwrap().is_none());
        let path = cache.store(&entry).unwrap();
        assert!(path.ends_with("height-n25-h10.v1.bin"));
        assert_eq!(cache.load(&entry.key).unwrap().unwrap(), entry);
        // no temporaries left behind
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn ladder_parts_are_validated_on_load() {
        let ladder = height_ladder(10, 5).unwrap();
        let mut entry = CacheEntry::from_ladder(&ladder);
        entry.payload.swap(1, 2);
        assert!(entry.into_ladder().is_err());
    }

    proptest! {
        #[test]
        fn bigint_round_trip(bytes in prop::collection::vec(any::<u8>(), 0..64), neg in any::<bool>()) {
            let sign = if neg { Sign::Minus } else { Sign::Plus };
            let x = BigInt::from_bytes_le(sign, &bytes);
            let mut buf = Vec::new();
            write_bigint(&mut buf, &x).unwrap();
            prop_assert_eq!(read_bigint(&mut buf.as_slice()).unwrap(), x);
        }
    }
}
