use tsf_core::catalog::zero_rel_sheet;
use tsf_core::{
    area, catalog_load, parse_origami, parse_polygon, parse_sheets, parse_surface, periods, write_origami, write_polygon,
    write_sheet, write_surface, CatalogItem, Error, CATALOG_NAMES,
};

#[test]
fn catalog_items_round_trip() {
    for name in CATALOG_NAMES {
        match catalog_load(name).unwrap() {
            CatalogItem::Surface(s) => {
                let back = parse_surface(&write_surface(&s)).unwrap();
                assert_eq!(back.gluings(), s.gluings(), "{name}");
                assert!((area(&back) - area(&s)).abs() < 1e-12);
                assert_eq!(periods(&back).unwrap().basis_tag, periods(&s).unwrap().basis_tag);
            }
            CatalogItem::Origami(o) => {
                let back = parse_origami(&write_origami(&o)).unwrap();
                assert_eq!(back, o, "{name}");
            }
            CatalogItem::Polygon(q) => {
                let back = parse_polygon(&write_polygon(&q)).unwrap();
                assert_eq!(back.angle_fractions(), q.angle_fractions(), "{name}");
                assert!((back.area() - q.area()).abs() < 1e-12);
            }
            CatalogItem::Sheet(sh) => {
                let back = parse_sheets(&write_sheet(&sh)).unwrap();
                assert_eq!(back.len(), 1);
                assert_eq!(back[0].equations, sh.equations, "{name}");
                assert_eq!(back[0].basis_tag, sh.basis_tag);
            }
        }
    }
}

#[test]
fn multi_block_sheet_catalogs() {
    let sh = zero_rel_sheet().unwrap();
    let text = format!("{}\n# second copy\n{}", write_sheet(&sh), write_sheet(&sh));
    assert_eq!(parse_sheets(&text).unwrap().len(), 2);
}

#[test]
fn malformed_surfaces_report_lines() {
    let missing_header = "polygon a 0 0 1 0 1 1 0 1\n";
    assert!(matches!(parse_surface(missing_header), Err(Error::Syntax { line: 1, .. })));
    let bad_number = "format tsf 1\npolygon a 0 0 1 x 1 1 0 1\n";
    assert!(matches!(parse_surface(bad_number), Err(Error::Syntax { line: 2, .. })));
    let dangling = "format tsf 1\npolygon a 0 0 1 0 1 1 0 1\nglue a.e0 b.e2\nglue a.e1 a.e3\n";
    assert!(matches!(parse_surface(dangling), Err(Error::DanglingEdge(_))));
    let reused = "format tsf 1\npolygon a 0 0 1 0 1 1 0 1\nglue a.e0 a.e2\nglue a.e0 a.e2\n";
    assert!(parse_surface(reused).is_err());
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let text = "# a torus\nformat tsf 1\n\nlabel t # trailing\npolygon a 0 0 1 0 1 1 0 1\nglue a.e0 a.e2\nglue a.e1 a.e3\n";
    let s = parse_surface(text).unwrap();
    assert!((area(&s) - 1.0).abs() < 1e-15);
}
