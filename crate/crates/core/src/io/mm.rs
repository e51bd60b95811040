use std::io::Write;

use crate::error::Result;
use crate::scalar::Real;
use crate::sparse::SparseMatrix;

/// Matrix Market coordinate real general, 1-based indices.
pub fn write_matrix_market<T: Real, W: Write>(m: &SparseMatrix<T>, mut w: W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.iter() {
        writeln!(w, "{} {} {:.17e}", i + 1, j + 1, v.as_f64())?;
    }
    w.flush()?;
    Ok(())
}

/// One value per line.
pub fn write_vector<T: Real, W: Write>(v: &[T], mut w: W) -> Result<()> {
    for x in v {
        writeln!(w, "{:.17e}", x.as_f64())?;
    }
    w.flush()?;
    Ok(())
}
