mod common;

use std::collections::BTreeSet;

use rand::Rng;

use common::{boundary_set, minkowski, random_blob, random_image, rng};
use ringtraj::contour::{dilate, find_contours, largest_contour, orient_ccw, KernelShape, Orientation, StructuringElement};
use ringtraj::image::BinaryImage;

fn eight_connected(a: (usize, usize), b: (usize, usize)) -> bool {
    let dx = (a.0 as i64 - b.0 as i64).abs();
    let dy = (a.1 as i64 - b.1 as i64).abs();
    dx <= 1 && dy <= 1 && (dx, dy) != (0, 0)
}

#[test]
fn dilation_is_minkowski_sum() {
    let mut r = rng(11);
    for i in 0..100 {
        let density = r.gen_range(0.005..0.1);
        let img = random_image(&mut r, 64, density);
        let shape = if i % 3 == 0 { KernelShape::Square } else { KernelShape::Disk };
        let se = StructuringElement::new(shape, r.gen_range(1..=6)).unwrap();
        assert_eq!(dilate(&img, &se), minkowski(&img, &se), "case {i}");
    }
}

#[test]
fn dilation_contains_input_and_is_monotone() {
    let mut r = rng(12);
    for _ in 0..30 {
        let img = random_image(&mut r, 40, 0.05);
        let small = dilate(&img, &StructuringElement::disk(2).unwrap());
        let big = dilate(&img, &StructuringElement::disk(4).unwrap());
        assert!(img.is_subset_of(&small));
        assert!(small.is_subset_of(&big));
    }
}

#[test]
fn blob_contour_is_its_boundary() {
    let mut r = rng(13);
    for i in 0..200 {
        let blob = random_blob(&mut r, 64);
        let cs = find_contours(&blob);
        assert_eq!(cs.len(), 1, "case {i}");
        let (c, orientation) = orient_ccw(&cs[0]);
        let points: BTreeSet<_> = c.points.iter().copied().collect();
        assert_eq!(points, boundary_set(&blob), "case {i}");
        assert!(c.closed);
        if c.len() > 1 {
            for k in 0..c.len() {
                assert!(eight_connected(c.points[k], c.points[(k + 1) % c.len()]), "case {i} step {k}");
            }
        }
        if orientation != Orientation::Degenerate {
            assert!(c.signed_area2() > 0);
        }
    }
}

#[test]
fn separate_components_and_largest() {
    let img = BinaryImage::from_ascii(&[
        "##......",
        "##..####",
        "....####",
        "....####",
        "#.......",
    ]);
    let cs = find_contours(&img);
    assert_eq!(cs.len(), 3);
    let big = largest_contour(&cs).unwrap();
    assert!(big.points.contains(&(4, 1)) && big.points.contains(&(7, 3)));
    assert!(largest_contour(&[]).is_err());
}

#[test]
fn hole_borders_are_not_returned() {
    let img = BinaryImage::from_ascii(&["#####", "#...#", "#...#", "#####"]);
    let cs = find_contours(&img);
    assert_eq!(cs.len(), 1);
    assert_eq!(cs[0].len(), 14);
}
