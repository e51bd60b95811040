use std::io::Write;

use crate::analysis::{ErrorRecord, Slopes};
use crate::error::Result;
use crate::scalar::Real;

pub const HEADER: &str = "level,h,n_dofs,err_l2,err_linf,err_h1,eoc_l2,eoc_linf,eoc_h1";

fn cell<T: Real>(v: Option<T>) -> String {
    v.map(|x| x.as_f64().to_string()).unwrap_or_default()
}

pub fn write_header<W: Write>(mut w: W) -> Result<()> {
    writeln!(w, "{HEADER}")?;
    w.flush()?;
    Ok(())
}

/// One row; floats use the shortest representation that round-trips.
pub fn write_row<T: Real, W: Write>(r: &ErrorRecord<T>, mut w: W) -> Result<()> {
    writeln!(
        w,
        "{},{},{},{},{},{},{},{},{}",
        r.level,
        r.h.as_f64(),
        r.n_dofs,
        r.err_l2.as_f64(),
        r.err_linf.as_f64(),
        r.err_h1.as_f64(),
        cell(r.eoc_l2),
        cell(r.eoc_linf),
        cell(r.eoc_h1)
    )?;
    w.flush()?;
    Ok(())
}

pub fn write_slopes<T: Real, W: Write>(s: &Slopes<T>, mut w: W) -> Result<()> {
    writeln!(w, "# slope_l2={}, slope_linf={}, slope_h1={}", s.l2.as_f64(), s.linf.as_f64(), s.h1.as_f64())?;
    w.flush()?;
    Ok(())
}

pub fn write_table<T: Real, W: Write>(records: &[ErrorRecord<T>], slopes: Option<&Slopes<T>>, mut w: W) -> Result<()> {
    write_header(&mut w)?;
    for r in records {
        write_row(r, &mut w)?;
    }
    if let Some(s) = slopes {
        write_slopes(s, &mut w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_row_has_empty_eoc() {
        let r = ErrorRecord { level: 0, h: 0.5, n_dofs: 12, err_l2: 0.1, err_linf: 0.2, err_h1: 0.3, eoc_l2: None, eoc_linf: None, eoc_h1: None };
        let mut buf = Vec::new();
        write_table(&[r], None, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, format!("{HEADER}\n0,0.5,12,0.1,0.2,0.3,,,\n"));
    }
}
