//! Quote files: CSV with header
//! `maturity_years,iv_put_d25,iv_call_d25,iv_call_d50`.

use std::io::Read;
use std::path::Path;

use invvol_core::market::{validate_quotes, QuoteRow};

use crate::error::{Error, Result};

pub const HEADER: [&str; 4] = ["maturity_years", "iv_put_d25", "iv_call_d25", "iv_call_d50"];

pub fn load_quotes(path: impl AsRef<Path>) -> Result<Vec<QuoteRow>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_quotes(file)
}

/// Parses and validates quote rows; rows come back sorted by maturity.
pub fn parse_quotes<R: Read>(reader: R) -> Result<Vec<QuoteRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    if header.is_empty() || header.iter().all(str::is_empty) {
        return Err(Error::Parse {
            row: 1,
            message: "empty file".into(),
        });
    }
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(Error::Parse {
            row: 1,
            message: format!(
                "expected header {:?}, found {:?}",
                HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize::<QuoteRow>().enumerate() {
        // header is row 1
        let row = i + 2;
        rows.push(rec.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            row: 2,
            message: "no quote rows".into(),
        });
    }
    Ok(validate_quotes(rows)?)
}
