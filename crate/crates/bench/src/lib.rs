//! Shared fixtures for the benchmarks.

use modelset_core::scheme::enumerate_model_set;
use modelset_core::{CutProjectScheme, PhysBox, PointSample, QuadField, QuadReal, WindowRegion, Xi};

pub fn fibonacci_window() -> WindowRegion<QuadReal> {
    let f = QuadField::GOLDEN;
    WindowRegion::interval(f.int(-1), &f.phi() - &f.one()).expect("window is a proper interval")
}

/// Exact Fibonacci sample on `[0, len]` at the generic offset `1/7`.
pub fn fibonacci_sample(len: i64) -> PointSample<QuadReal> {
    let f = QuadField::GOLDEN;
    let s = CutProjectScheme::fibonacci();
    let xi = Xi::new(vec![f.ratio(1, 7)], vec![f.zero()]);
    let b = PhysBox::interval(f.zero(), f.int(len)).expect("non-empty box");
    enumerate_model_set(&s, &fibonacci_window(), &xi, &b).expect("1/7 is a regular offset")
}

pub fn radii(values: &[i64]) -> Vec<QuadReal> {
    values.iter().map(|&r| QuadField::GOLDEN.int(r)).collect()
}
