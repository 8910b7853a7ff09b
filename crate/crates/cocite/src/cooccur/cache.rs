//! Binary persistence for [`IntervalCounts`].
//!
//! Layout: a file prelude (magic, version, window, provenance digests),
//! then one section per (kind, interval, level) cell holding sorted
//! little-endian u64 entries, then the citing-paper lists, then the id
//! table as a UTF-8 string section.
//!
//! On write the id table is canonicalized to lexicographic string order and
//! every key is remapped accordingly, so semantically identical counts
//! serialize to byte-identical files no matter how they were built.

use std::io::{Read, Write};

use crate::corpus::{Interval, WindowSpec};
use crate::error::{Error, Result};

use super::{CountTable, Interner, IntervalCounts, Level, pack_pair, unpack_pair};

const MAGIC: &[u8; 4] = b"CCL1";
const FORMAT_VERSION: u16 = 1;

const KIND_PAIR: u8 = 0;
const KIND_ELEM: u8 = 1;

/// Who produced a cache and from what inputs. Stored verbatim in the file
/// prelude; byte-stable as long as tool version and digests are.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CacheProvenance {
    pub tool_version: String,
    pub config_digest: [u8; 32],
    pub input_digest: [u8; 32],
}

fn write_all(w: &mut impl Write, bytes: &[u8]) -> Result<()> {
    w.write_all(bytes)
        .map_err(|e| Error::io("writing counts cache", e))
}

fn read_exact(r: &mut impl Read, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf)
        .map_err(|e| Error::CacheFormat(format!("truncated file: {e}")))
}

fn read_u16(r: &mut impl Read) -> Result<u16> {
    let mut b = [0u8; 2];
    read_exact(r, &mut b)?;
    Ok(u16::from_le_bytes(b))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_i32(r: &mut impl Read) -> Result<i32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(i32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// Permutation from current interner ids to canonical (lexicographic) ids,
/// plus the canonical string order.
fn canonical_order(interner: &Interner) -> (Vec<u32>, Vec<&str>) {
    let mut sorted: Vec<(&str, u32)> = interner
        .strings()
        .enumerate()
        .map(|(id, s)| (s, id as u32))
        .collect();
    sorted.sort_unstable_by(|a, b| a.0.cmp(b.0));
    let mut remap = vec![0u32; sorted.len()];
    let mut strings = Vec::with_capacity(sorted.len());
    for (new_id, (s, old_id)) in sorted.into_iter().enumerate() {
        remap[old_id as usize] = new_id as u32;
        strings.push(s);
    }
    (remap, strings)
}

/// Serialize counts with a canonical id table.
pub fn write_cache(
    counts: &IntervalCounts,
    provenance: &CacheProvenance,
    w: &mut impl Write,
) -> Result<()> {
    let (remap, strings) = canonical_order(counts.interner());

    write_all(w, MAGIC)?;
    write_all(w, &FORMAT_VERSION.to_le_bytes())?;
    write_all(w, &0u16.to_le_bytes())?;
    let window = counts.window();
    write_all(w, &window.t0_start.to_le_bytes())?;
    write_all(w, &window.t0_end.to_le_bytes())?;
    write_all(w, &window.past_len.to_le_bytes())?;
    write_all(w, &window.future_len.to_le_bytes())?;
    write_all(w, &provenance.config_digest)?;
    write_all(w, &provenance.input_digest)?;
    let version_bytes = provenance.tool_version.as_bytes();
    write_all(w, &(version_bytes.len() as u16).to_le_bytes())?;
    write_all(w, version_bytes)?;

    let n_sections = 2u32 * 3 * 3;
    write_all(w, &n_sections.to_le_bytes())?;

    for interval in Interval::ALL {
        for level in Level::ALL {
            let table = counts.table(interval, level);

            let mut pairs: Vec<(u64, u64, u64)> = table
                .pairs
                .iter()
                .map(|(&key, &freq)| {
                    let (a, b) = unpack_pair(key);
                    let (a, b) = (remap[a as usize], remap[b as usize]);
                    let (a, b) = if a <= b { (a, b) } else { (b, a) };
                    (a as u64, b as u64, freq)
                })
                .collect();
            pairs.sort_unstable();
            write_section_header(w, KIND_PAIR, interval, level, pairs.len() as u64)?;
            for (a, b, freq) in pairs {
                write_all(w, &a.to_le_bytes())?;
                write_all(w, &b.to_le_bytes())?;
                write_all(w, &freq.to_le_bytes())?;
            }

            let mut elems: Vec<(u64, u64)> = table
                .elems
                .iter()
                .map(|(&elem, &count)| (remap[elem as usize] as u64, count))
                .collect();
            elems.sort_unstable();
            write_section_header(w, KIND_ELEM, interval, level, elems.len() as u64)?;
            for (elem, count) in elems {
                write_all(w, &elem.to_le_bytes())?;
                write_all(w, &count.to_le_bytes())?;
            }
        }
    }

    for interval in Interval::ALL {
        let mut ids: Vec<u32> = counts.citing[interval.index()]
            .iter()
            .map(|&id| remap[id as usize])
            .collect();
        ids.sort_unstable();
        write_all(w, &(ids.len() as u64).to_le_bytes())?;
        for id in ids {
            write_all(w, &id.to_le_bytes())?;
        }
    }

    write_all(w, &(strings.len() as u64).to_le_bytes())?;
    for s in strings {
        write_all(w, &(s.len() as u32).to_le_bytes())?;
        write_all(w, s.as_bytes())?;
    }
    Ok(())
}

fn write_section_header(
    w: &mut impl Write,
    kind: u8,
    interval: Interval,
    level: Level,
    entry_count: u64,
) -> Result<()> {
    write_all(w, MAGIC)?;
    write_all(w, &[kind, interval.index() as u8, level.index() as u8, 0])?;
    write_all(w, &entry_count.to_le_bytes())
}

/// Read just the prelude: window and provenance. Enough to validate a cache
/// against a run configuration without loading the tables.
pub fn read_cache_header(r: &mut impl Read) -> Result<(WindowSpec, CacheProvenance)> {
    let mut magic = [0u8; 4];
    read_exact(r, &mut magic)?;
    if &magic != MAGIC {
        return Err(Error::CacheFormat(format!(
            "bad magic {magic:?}, expected {MAGIC:?}"
        )));
    }
    let version = read_u16(r)?;
    if version != FORMAT_VERSION {
        return Err(Error::CacheFormat(format!(
            "unsupported format version {version}"
        )));
    }
    let _reserved = read_u16(r)?;
    let window = WindowSpec::new(read_i32(r)?, read_i32(r)?, read_u32(r)?, read_u32(r)?)
        .map_err(|e| Error::CacheFormat(format!("invalid window in cache: {e}")))?;
    let mut config_digest = [0u8; 32];
    read_exact(r, &mut config_digest)?;
    let mut input_digest = [0u8; 32];
    read_exact(r, &mut input_digest)?;
    let version_len = read_u16(r)? as usize;
    let mut version_bytes = vec![0u8; version_len];
    read_exact(r, &mut version_bytes)?;
    let tool_version = String::from_utf8(version_bytes)
        .map_err(|_| Error::CacheFormat("tool version is not UTF-8".into()))?;
    Ok((
        window,
        CacheProvenance {
            tool_version,
            config_digest,
            input_digest,
        },
    ))
}

/// Deserialize a full counts file.
pub fn read_cache(r: &mut impl Read) -> Result<(IntervalCounts, CacheProvenance)> {
    let (window, provenance) = read_cache_header(r)?;

    let n_sections = read_u32(r)?;
    let mut tables: [[CountTable; 3]; 3] = Default::default();
    for _ in 0..n_sections {
        let mut magic = [0u8; 4];
        read_exact(r, &mut magic)?;
        if &magic != MAGIC {
            return Err(Error::CacheFormat("bad section magic".into()));
        }
        let mut head = [0u8; 4];
        read_exact(r, &mut head)?;
        let (kind, interval_idx, level_idx) = (head[0], head[1] as usize, head[2] as usize);
        let interval = Interval::from_index(interval_idx)
            .ok_or_else(|| Error::CacheFormat(format!("bad interval index {interval_idx}")))?;
        let level = Level::from_index(level_idx)
            .ok_or_else(|| Error::CacheFormat(format!("bad level index {level_idx}")))?;
        let entry_count = read_u64(r)?;
        let table = &mut tables[interval.index()][level.index()];
        match kind {
            KIND_PAIR => {
                table.pairs.reserve(entry_count as usize);
                for _ in 0..entry_count {
                    let a = read_u64(r)?;
                    let b = read_u64(r)?;
                    let freq = read_u64(r)?;
                    let (a, b) = (
                        u32::try_from(a)
                            .map_err(|_| Error::CacheFormat("pair key out of range".into()))?,
                        u32::try_from(b)
                            .map_err(|_| Error::CacheFormat("pair key out of range".into()))?,
                    );
                    table.pairs.insert(pack_pair(a, b), freq);
                }
            }
            KIND_ELEM => {
                table.elems.reserve(entry_count as usize);
                for _ in 0..entry_count {
                    let elem = u32::try_from(read_u64(r)?)
                        .map_err(|_| Error::CacheFormat("element key out of range".into()))?;
                    let count = read_u64(r)?;
                    table.elems.insert(elem, count);
                }
            }
            other => {
                return Err(Error::CacheFormat(format!("unknown section kind {other}")));
            }
        }
    }

    let mut citing: [Vec<u32>; 3] = Default::default();
    for slot in citing.iter_mut() {
        let count = read_u64(r)?;
        let mut ids = Vec::with_capacity(count as usize);
        for _ in 0..count {
            ids.push(read_u32(r)?);
        }
        *slot = ids;
    }

    let string_count = read_u64(r)?;
    let mut interner = Interner::new();
    for i in 0..string_count {
        let len = read_u32(r)? as usize;
        let mut bytes = vec![0u8; len];
        read_exact(r, &mut bytes)?;
        let s = String::from_utf8(bytes)
            .map_err(|_| Error::CacheFormat(format!("id table entry {i} is not UTF-8")))?;
        interner.intern(&s);
    }

    // Every key must be a valid id table index.
    let n = interner.len() as u32;
    let check = |id: u32| -> Result<()> {
        if id < n {
            Ok(())
        } else {
            Err(Error::CacheFormat(format!(
                "key {id} exceeds id table size {n}"
            )))
        }
    };
    for row in &tables {
        for table in row {
            for &key in table.pairs.keys() {
                let (a, b) = unpack_pair(key);
                check(a)?;
                check(b)?;
            }
            for &elem in table.elems.keys() {
                check(elem)?;
            }
        }
    }
    for ids in &citing {
        for &id in ids {
            check(id)?;
        }
    }

    Ok((
        IntervalCounts {
            window,
            tables,
            interner,
            citing,
        },
        provenance,
    ))
}
