//! Binary snapshots.
//!
//! Layout, all little-endian:
//!
//! ```text
//! "MFL1"
//! u32 kind          0 free, 1 confined, 2 product, 3 many-body
//! u32 particles     1 for grid functions
//! u32 space         0 position, 1 spectral
//! u32 d_f, u32 d_c
//! u32 points[d_f], u32 points[d_c]
//! f64 extent[d_f], f64 lower[d_c], f64 upper[d_c]
//! f64 epsilon       1.0 when there are no confined axes
//! f64 t
//! u64 count
//! (f64 re, f64 im)[count], row-major, particle 1 slowest
//! ```

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::{ConfinedDomain, Domain, FreeDomain, GridDomain, GridFunction, Space};
use crate::manybody::ManyBodyState;
use crate::spectral::C64;

pub const MAGIC: &[u8; 4] = b"MFL1";

const FREE: u32 = 0;
const CONFINED: u32 = 1;
const PRODUCT: u32 = 2;
const MANY: u32 = 3;

struct Header {
    kind: u32,
    particles: u32,
    space: Space,
    free: Option<FreeDomain>,
    confined: Option<ConfinedDomain>,
    t: f64,
}

fn put_u32(w: &mut impl Write, v: u32) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn put_f64(w: &mut impl Write, v: f64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn get_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(u32::from_le_bytes(b))
}

fn get_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(truncated)?;
    Ok(f64::from_le_bytes(b))
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Container("unexpected end of data".into())
    } else {
        e.into()
    }
}

fn write_header(w: &mut impl Write, h: &Header) -> Result<()> {
    w.write_all(MAGIC)?;
    put_u32(w, h.kind)?;
    put_u32(w, h.particles)?;
    put_u32(w, matches!(h.space, Space::Spectral) as u32)?;
    let df = h.free.as_ref().map_or(0, |f| f.dim());
    let dc = h.confined.as_ref().map_or(0, |c| c.dim());
    put_u32(w, df as u32)?;
    put_u32(w, dc as u32)?;
    if let Some(f) = &h.free {
        for &p in &f.points {
            put_u32(w, p as u32)?;
        }
    }
    if let Some(c) = &h.confined {
        for &p in &c.points {
            put_u32(w, p as u32)?;
        }
    }
    if let Some(f) = &h.free {
        for &e in &f.extent {
            put_f64(w, e)?;
        }
    }
    if let Some(c) = &h.confined {
        for &v in c.lower.iter().chain(&c.upper) {
            put_f64(w, v)?;
        }
    }
    put_f64(w, h.confined.as_ref().map_or(1.0, |c| c.epsilon))?;
    put_f64(w, h.t)
}

fn read_header(r: &mut impl Read) -> Result<Header> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MAGIC {
        return Err(Error::Container(format!("bad magic {magic:?}")));
    }
    let kind = get_u32(r)?;
    if kind > MANY {
        return Err(Error::Container(format!("unknown kind {kind}")));
    }
    let particles = get_u32(r)?;
    let space = match get_u32(r)? {
        0 => Space::Position,
        1 => Space::Spectral,
        s => return Err(Error::Container(format!("unknown space tag {s}"))),
    };
    let df = get_u32(r)? as usize;
    let dc = get_u32(r)? as usize;
    if df > 8 || dc > 8 {
        return Err(Error::Container(format!("implausible dimensions {df} + {dc}")));
    }
    let fp: Vec<usize> = (0..df).map(|_| get_u32(r).map(|v| v as usize)).collect::<Result<_>>()?;
    let cp: Vec<usize> = (0..dc).map(|_| get_u32(r).map(|v| v as usize)).collect::<Result<_>>()?;
    let extent: Vec<f64> = (0..df).map(|_| get_f64(r)).collect::<Result<_>>()?;
    let lower: Vec<f64> = (0..dc).map(|_| get_f64(r)).collect::<Result<_>>()?;
    let upper: Vec<f64> = (0..dc).map(|_| get_f64(r)).collect::<Result<_>>()?;
    let epsilon = get_f64(r)?;
    let t = get_f64(r)?;
    let free = (df > 0).then(|| FreeDomain::new(extent, fp)).transpose()?;
    let confined = (dc > 0).then(|| ConfinedDomain::new(lower, upper, cp, epsilon)).transpose()?;
    Ok(Header { kind, particles, space, free, confined, t })
}

fn write_samples(w: &mut impl Write, values: &[C64]) -> Result<()> {
    w.write_all(&(values.len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(values.len() * 16);
    for v in values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    Ok(w.write_all(&buf)?)
}

fn read_samples(r: &mut impl Read, expected: usize) -> Result<Vec<C64>> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(truncated)?;
    let count = u64::from_le_bytes(b);
    if count != expected as u64 {
        return Err(Error::Container(format!("{count} samples for a grid of {expected}")));
    }
    let mut buf = vec![0u8; expected * 16];
    r.read_exact(&mut buf).map_err(truncated)?;
    Ok(buf
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            C64::new(re, im)
        })
        .collect())
}

/// Writes a grid function; `t` is stored alongside.
pub fn write_grid_function(w: &mut impl Write, f: &GridFunction, t: f64) -> Result<()> {
    let (kind, free, confined) = match &f.domain {
        GridDomain::Free(d) => (FREE, Some(d.clone()), None),
        GridDomain::Confined(c) => (CONFINED, None, Some(c.clone())),
        GridDomain::Product(p) => (PRODUCT, Some(p.free.clone()), Some(p.confined.clone())),
    };
    write_header(w, &Header { kind, particles: 1, space: f.space, free, confined, t })?;
    write_samples(w, &f.values)
}

/// Reads a grid function and its time stamp.
pub fn read_grid_function(r: &mut impl Read) -> Result<(GridFunction, f64)> {
    let h = read_header(r)?;
    let domain = match (h.kind, h.free, h.confined) {
        (FREE, Some(f), None) => GridDomain::Free(f),
        (CONFINED, None, Some(c)) => GridDomain::Confined(c),
        (PRODUCT, Some(f), Some(c)) => GridDomain::Product(Domain::new(f, c)?),
        (MANY, ..) => return Err(Error::Container("this is a many-body snapshot".into())),
        _ => return Err(Error::Container("kind and dimensions disagree".into())),
    };
    let values = read_samples(r, domain.len())?;
    Ok((GridFunction { domain, values, space: h.space }, h.t))
}

pub fn write_manybody(w: &mut impl Write, psi: &ManyBodyState) -> Result<()> {
    write_header(
        w,
        &Header {
            kind: MANY,
            particles: psi.n as u32,
            space: Space::Position,
            free: Some(psi.domain.free.clone()),
            confined: Some(psi.domain.confined.clone()),
            t: psi.t,
        },
    )?;
    write_samples(w, &psi.values)
}

pub fn read_manybody(r: &mut impl Read) -> Result<ManyBodyState> {
    let h = read_header(r)?;
    if h.kind != MANY {
        return Err(Error::Container("not a many-body snapshot".into()));
    }
    let (Some(free), Some(confined)) = (h.free, h.confined) else {
        return Err(Error::Container("many-body snapshots need both axis groups".into()));
    };
    let domain = Domain::new(free, confined)?;
    let n = h.particles as usize;
    if n == 0 {
        return Err(Error::Container("zero particles".into()));
    }
    let len = domain
        .len()
        .checked_pow(n as u32)
        .ok_or_else(|| Error::Container("tensor size overflows".into()))?;
    let values = read_samples(r, len)?;
    Ok(ManyBodyState { n, domain, values, t: h.t })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn domain() -> Domain {
        Domain::new(
            FreeDomain::new(vec![4.0, 6.0], vec![8, 16]).unwrap(),
            ConfinedDomain::cube(1, -0.5, 0.5, 4, 0.25).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn grid_function_round_trip() {
        let d = domain();
        let g = GridFunction::from_free_fn(&d.free, |x| C64::new(x[0], -x[1]));
        let mut buf = Vec::new();
        write_grid_function(&mut buf, &g, 0.75).unwrap();
        assert_eq!(&buf[..4], MAGIC);
        let (back, t) = read_grid_function(&mut buf.as_slice()).unwrap();
        assert_eq!(back, g);
        assert_eq!(t, 0.75);

        let prod = GridFunction::zeros(GridDomain::Product(d.clone())).to_spectral();
        let mut buf = Vec::new();
        write_grid_function(&mut buf, &prod, 0.0).unwrap();
        assert_eq!(read_grid_function(&mut buf.as_slice()).unwrap().0, prod);
    }

    #[test]
    fn manybody_round_trip() {
        let d = domain();
        let m = d.len();
        let psi = ManyBodyState {
            n: 2,
            domain: d,
            values: (0..m * m).map(|i| C64::new(i as f64, 1.0 / (1.0 + i as f64))).collect(),
            t: 1.5,
        };
        let mut buf = Vec::new();
        write_manybody(&mut buf, &psi).unwrap();
        assert_eq!(read_manybody(&mut buf.as_slice()).unwrap(), psi);
        assert!(read_grid_function(&mut buf.as_slice()).is_err());
    }

    #[test]
    fn malformed_input_is_rejected() {
        let d = domain();
        let g = GridFunction::zeros(GridDomain::Free(d.free));
        let mut buf = Vec::new();
        write_grid_function(&mut buf, &g, 0.0).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_grid_function(&mut bad.as_slice()), Err(Error::Container(_))));
        let cut = &buf[..buf.len() - 3];
        assert!(matches!(read_grid_function(&mut &cut[..]), Err(Error::Container(_))));
    }
}
