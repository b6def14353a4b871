use std::collections::HashSet;

use fracperc::boxcount::{box_count, default_window};
use fracperc::gallery::{
    carpet, carpet_section, horizontal_section, koch, product_with_interval, regular_set, section_height, triangle,
    RegularSetSpec, Selection,
};
use fracperc::gridset::GridSet;
use fracperc::reference::{reference_dimension, ReferenceSet};
use fracperc::{CellIndex, Error};
use proptest::prelude::*;

fn slope(set: &GridSet) -> f64 {
    let (a, b) = default_window(set.level);
    box_count(set, a, b).unwrap().slope.unwrap()
}

fn cells_xy(set: &GridSet) -> HashSet<(u64, u64)> {
    set.cells().iter().map(|c| (c.x, c.y)).collect()
}

#[test]
fn carpet_counts_and_digits() {
    assert_eq!(carpet(0).len(), 1);
    assert_eq!(carpet(1).len(), 8);
    for k in 0..=5 {
        assert_eq!(carpet(k).len(), 8usize.pow(k));
    }
    let set = carpet(4);
    let side = 81u64;
    for y in 0..side {
        for x in 0..side {
            let (mut a, mut b, mut keep) = (x, y, true);
            for _ in 0..4 {
                keep &= !(a % 3 == 1 && b % 3 == 1);
                a /= 3;
                b /= 3;
            }
            assert_eq!(set.contains(&CellIndex::new2(4, x, y)), keep, "({x},{y})");
        }
    }
}

#[test]
fn triangle_matches_pascal_mod_two() {
    let depth = 6;
    let side = 64usize;
    let mut row = vec![1u8];
    let mut odd = HashSet::new();
    for n in 0..2 * side {
        for (k, &v) in row.iter().enumerate() {
            let (x, y) = (k, n - k);
            if v == 1 && x < side && y < side {
                odd.insert((x as u64, y as u64));
            }
        }
        let mut next = vec![1u8; row.len() + 1];
        for k in 1..row.len() {
            next[k] = (row[k - 1] + row[k]) % 2;
        }
        row = next;
    }
    let set = triangle(depth);
    assert_eq!(set.len(), 3usize.pow(depth));
    assert_eq!(cells_xy(&set), odd);
}

#[test]
fn self_similar_recount() {
    for k in 0..5 {
        assert_eq!(carpet(k + 1).len(), 8 * carpet(k).len());
        assert_eq!(triangle(k + 1).len(), 3 * triangle(k).len());
        let spec = |d| RegularSetSpec { l: 3, n: 5, depth: d, selection: Selection::Seeded(4) };
        assert_eq!(regular_set(&spec(k + 1)).unwrap().len(), 3 * regular_set(&spec(k)).unwrap().len());
    }
}

#[test]
fn generators_are_deterministic() {
    assert_eq!(carpet(4), carpet(4));
    assert_eq!(triangle(5), triangle(5));
    assert_eq!(koch(4), koch(4));
    let spec = RegularSetSpec { l: 2, n: 5, depth: 5, selection: Selection::Seeded(9) };
    assert_eq!(regular_set(&spec).unwrap(), regular_set(&spec).unwrap());
}

#[test]
fn carpet_has_full_dihedral_symmetry() {
    let set = cells_xy(&carpet(4));
    let m = 80u64;
    type Map = fn(u64, u64, u64) -> (u64, u64);
    let maps: [Map; 7] = [
        |x, y, m| (m - x, y),
        |x, y, m| (x, m - y),
        |x, y, _| (y, x),
        |x, y, m| (m - y, m - x),
        |x, y, m| (m - x, m - y),
        |x, y, m| (y, m - x),
        |x, y, m| (m - y, x),
    ];
    for f in maps {
        let image: HashSet<(u64, u64)> = set.iter().map(|&(x, y)| f(x, y, m)).collect();
        assert_eq!(image, set);
    }
}

#[test]
fn triangle_is_symmetric_in_the_diagonal() {
    let set = cells_xy(&triangle(6));
    let image: HashSet<(u64, u64)> = set.iter().map(|&(x, y)| (y, x)).collect();
    assert_eq!(image, set);
}

#[test]
fn koch_segments_and_slope() {
    let k0 = koch(0);
    assert_eq!(k0.segment_count(), 1);
    assert_eq!(k0.polyline, vec![(0.0, 0.0), (1.0, 0.0)]);
    for d in 0..6 {
        assert_eq!(koch(d).segment_count(), 4usize.pow(d));
    }
    let k = koch(6);
    let last = *k.polyline.last().unwrap();
    assert!((last.0 - 1.0).abs() < 1e-12 && last.1.abs() < 1e-12);
    let s = slope(&k.raster);
    assert!((s - 4f64.ln() / 3f64.ln()).abs() <= 0.05, "koch slope {s}");
}

#[test]
fn regular_set_examples() {
    let full = regular_set(&RegularSetSpec { l: 4, n: 4, depth: 3, selection: Selection::First }).unwrap();
    assert_eq!(full, GridSet::full(4, 3, 1));
    let r = regular_set(&RegularSetSpec { l: 3, n: 5, depth: 4, selection: Selection::First }).unwrap();
    assert_eq!(r.len(), 81);
    assert_eq!((r.n, r.level), (5, 4));
    let cantor = regular_set(&RegularSetSpec::cantor(8)).unwrap();
    assert!(cantor.cells().iter().all(|c| {
        let mut x = c.x;
        (0..8).all(|_| {
            let d = x % 3;
            x /= 3;
            d != 1
        })
    }));
    assert!((slope(&cantor) - 2f64.ln() / 3f64.ln()).abs() <= 0.03);
    let bad = RegularSetSpec { l: 4, n: 3, depth: 2, selection: Selection::First };
    assert!(matches!(regular_set(&bad), Err(Error::Usage(_))));
    let bad = RegularSetSpec { l: 2, n: 3, depth: 2, selection: Selection::Children(vec![0, 0]) };
    assert!(regular_set(&bad).is_err());
}

#[test]
fn seeded_selection_keeps_l_children_everywhere() {
    let spec = RegularSetSpec { l: 2, n: 5, depth: 4, selection: Selection::Seeded(1) };
    let set = regular_set(&spec).unwrap();
    for j in 0..4 {
        let coarse = set.coarsen(j);
        let fine = set.coarsen(j + 1);
        for c in coarse.cells() {
            assert_eq!(c.children(5, 1).iter().filter(|ch| fine.contains(ch)).count(), 2);
        }
    }
}

#[test]
fn product_examples() {
    let full = product_with_interval(&GridSet::full(3, 3, 1)).unwrap();
    assert_eq!(full, GridSet::full(3, 3, 2));
    let cantor = regular_set(&RegularSetSpec::cantor(6)).unwrap();
    let prod = product_with_interval(&cantor).unwrap();
    assert_eq!(prod.len(), cantor.len() * 729);
    assert!((slope(&prod) - (1.0 + 2f64.ln() / 3f64.ln())).abs() <= 0.05);
    assert!(product_with_interval(&carpet(2)).is_err());
}

#[test]
fn carpet_section_matches_raster_row() {
    assert_eq!(section_height(1, 2).unwrap(), 0.5);
    for j in 1..=6 {
        let s = carpet_section(1, 2, j).unwrap();
        assert_eq!(s.len(), 2usize.pow(j));
        let raster = carpet(j);
        assert_eq!(horizontal_section(&raster, 0.5).unwrap().cells(), s.cells());
    }
    for (level, i) in [(1, 1), (1, 3), (2, 4), (2, 5), (3, 14)] {
        let depth = 5;
        let s = carpet_section(level, i, depth).unwrap();
        let h = section_height(level, i).unwrap();
        let row = (h * 243.0).floor() as u64;
        let expect: Vec<CellIndex> =
            carpet(depth).cells().iter().filter(|c| c.y == row).map(|c| CellIndex::new1(depth, c.x)).collect();
        assert_eq!(s.cells(), &expect[..], "line {level}/{i}");
    }
    assert!((slope(&carpet_section(1, 2, 6).unwrap()) - 2f64.ln() / 3f64.ln()).abs() <= 0.05);
    assert!(matches!(carpet_section(1, 0, 3), Err(Error::Usage(_))));
    assert!(matches!(carpet_section(1, 4, 3), Err(Error::Usage(_))));
}

#[test]
fn section_of_full_square_is_full() {
    for j in 1..=5 {
        let s = horizontal_section(&GridSet::full(3, j, 2), 0.5).unwrap();
        assert_eq!(s.len() as u64, 3u64.pow(j));
    }
}

#[test]
fn reference_rows() {
    let c = reference_dimension(ReferenceSet::Carpet).unwrap();
    assert!((c.dim_th.point() - 6f64.ln() / 3f64.ln()).abs() < 1e-12);
    assert!((c.dim_th.point() - 1.6309).abs() < 1e-4);
    assert_eq!(reference_dimension(ReferenceSet::Triangle).unwrap().dim_th.value, Some(1.0));
    let k = reference_dimension(ReferenceSet::Koch).unwrap();
    assert_eq!((k.dim_t.value, k.dim_th.value), (Some(1.0), Some(1.0)));
    let p = reference_dimension(ReferenceSet::Product { l: 2, n: 3 }).unwrap();
    assert_eq!(p.dim_th.value, p.dim_h.value);
    assert!(ReferenceSet::parse("mandelbrot").is_err());
}

fn arb_gridset() -> impl Strategy<Value = GridSet> {
    (2u32..5, 0u32..4, 1u8..=2).prop_flat_map(|(n, level, dim)| {
        let side = u64::from(n).pow(level);
        let ys = if dim == 1 { 1 } else { side };
        proptest::collection::vec((0..side, 0..ys), 0..40).prop_map(move |pts| {
            GridSet::from_cells(n, level, dim, pts.into_iter().map(|(x, y)| CellIndex::new2(level, x, y)))
                .with_provenance(["seed 1".to_string(), "params {}".to_string()])
        })
    })
}

proptest! {
    #[test]
    fn gridset_text_round_trip(set in arb_gridset()) {
        let parsed = GridSet::from_text(&set.to_text()).unwrap();
        prop_assert_eq!(&parsed, &set);
        prop_assert_eq!(parsed.to_text(), set.to_text());
    }
}

#[test]
fn gridset_parse_errors_carry_line_numbers() {
    for (text, line) in [
        ("", 1),
        ("GRIDSET 3\n", 1),
        ("GRIDSET 3 1\nR 0 0 1\n", 2),
        ("GRIDSET 3 1\nDIM 2\nR 0 2 5\n", 3),
        ("GRIDSET 3 1\nDIM 2\nR 1 0 1\nR 0 0 1\n", 4),
        ("GRIDSET 3 1\nDIM 3\n", 2),
    ] {
        match GridSet::from_text(text) {
            Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
            other => panic!("{text:?} parsed as {other:?}"),
        }
    }
}
