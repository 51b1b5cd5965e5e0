use std::path::Path;

use tsf_core::{catalog_load, parse_origami, parse_polygon, parse_sheets, parse_surface, unfold, CatalogItem, Error, Result};
use tsf_core::{AffineSubspaceSpec, TranslationSurface};

/// Input name and raw bytes, as hashed into the run manifest.
pub type Source = (String, Vec<u8>);

/// A loaded input together with the raw bytes that went into it.
pub struct Loaded {
    pub item: CatalogItem,
    pub source: Source,
}

/// Reads a file (format detected from its header) or, when no such file
/// exists, a catalog name.
pub fn load(arg: &str) -> Result<Loaded> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Ok(item) = catalog_load(arg) {
            return Ok(Loaded { item, source: (format!("catalog:{arg}"), Vec::new()) });
        }
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!("{arg}: no such file or catalog entry"),
        )));
    }
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8_lossy(&bytes).into_owned();
    let item = parse_any(&text)?;
    Ok(Loaded { item, source: (arg.to_string(), bytes) })
}

fn header_kind(text: &str) -> Option<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .and_then(|l| {
            let toks: Vec<&str> = l.split_whitespace().collect();
            (toks.len() == 3 && toks[0] == "format").then(|| toks[1].to_string())
        })
}

pub fn parse_any(text: &str) -> Result<CatalogItem> {
    match header_kind(text).as_deref() {
        Some("tsf") => Ok(CatalogItem::Surface(parse_surface(text)?)),
        Some("origami") => Ok(CatalogItem::Origami(parse_origami(text)?)),
        Some("poly") => Ok(CatalogItem::Polygon(parse_polygon(text)?)),
        Some("sheet") => {
            let mut sheets = parse_sheets(text)?;
            if sheets.len() != 1 {
                return Err(Error::Invalid(format!("expected a single sheet, found {}", sheets.len())));
            }
            Ok(CatalogItem::Sheet(sheets.remove(0)))
        }
        _ => Err(Error::Syntax { line: 1, msg: "unrecognized format header".into() }),
    }
}

pub fn surface_of(loaded: &Loaded) -> Result<TranslationSurface> {
    match &loaded.item {
        CatalogItem::Polygon(q) => unfold(q),
        other => other.surface()?.ok_or_else(|| Error::Invalid(format!("{} is not a surface", loaded.source.0))),
    }
}

/// Sheets from a catalog file with any number of blocks, or a catalog name.
pub fn load_sheets(arg: &str) -> Result<(Vec<AffineSubspaceSpec>, Source)> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Ok(CatalogItem::Sheet(s)) = catalog_load(arg) {
            return Ok((vec![s], (format!("catalog:{arg}"), Vec::new())));
        }
        return Err(Error::Io(std::io::Error::new(std::io::ErrorKind::NotFound, format!("{arg}: no such sheet catalog"))));
    }
    let bytes = std::fs::read(path)?;
    let sheets = parse_sheets(&String::from_utf8_lossy(&bytes))?;
    Ok((sheets, (arg.to_string(), bytes)))
}
