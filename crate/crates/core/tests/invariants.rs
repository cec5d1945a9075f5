use proptest::prelude::*;

use modelset_core::acceptance::{acceptance_domain, extract_patch, verify_acceptance, Region};
use modelset_core::deform::{meyer_report, MeyerThresholds};
use modelset_core::scheme::enumerate_model_set;
use modelset_core::{CutProjectScheme, PhysBox, QuadField, QuadReal, SubstitutionSystem, WindowRegion, Xi};

type Q = QuadReal;

fn f() -> QuadField {
    QuadField::GOLDEN
}

fn window() -> WindowRegion<Q> {
    WindowRegion::interval(f().int(-1), &f().phi() - &f().one()).unwrap()
}

/// Non-integral rationals: never in `Z[phi]`, so never singular.
fn offset() -> impl Strategy<Value = Q> {
    (1i64..60, 61i64..127).prop_map(|(p, q)| f().ratio(p, q))
}

fn sample(xi: &Q, lo: i64, hi: i64) -> modelset_core::PointSample<Q> {
    let s = CutProjectScheme::fibonacci();
    let b = PhysBox::interval(f().int(lo), f().int(hi)).unwrap();
    enumerate_model_set(&s, &window(), &Xi::new(vec![xi.clone()], vec![f().zero()]), &b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // every lattice point (m, n) with m + n phi in the box and
    // m + n (1 - phi) + xi in W is found, and nothing else
    #[test]
    fn enumeration_is_complete(xi in offset(), lo in -60i64..60, len in 5i64..80) {
        let got = sample(&xi, lo, lo + len);
        let (phi, w_lo, w_hi) = (f().phi(), f().int(-1), &f().phi() - &f().one());
        let mut expected = Vec::new();
        for n in -80i64..=80 {
            for m in -200i64..=200 {
                let x = &f().int(m) + &(&f().int(n) * &phi);
                let h = &(&f().int(m + n) - &(&f().int(n) * &phi)) + &xi;
                if x >= f().int(lo) && x <= f().int(lo + len) && h >= w_lo && h <= w_hi {
                    expected.push(x);
                }
            }
        }
        expected.sort();
        let positions: Vec<Q> = got.positions.iter().map(|p| p[0].clone()).collect();
        prop_assert_eq!(positions, expected);
    }

    #[test]
    fn star_map_is_additive(a in -500i64..500, b in -500i64..500, c in -500i64..500, d in -500i64..500) {
        let s = CutProjectScheme::<Q>::fibonacci();
        let lhs = s.internal_of(&[a + c, b + d]);
        let rhs = &s.internal_of(&[a, b])[0] + &s.internal_of(&[c, d])[0];
        prop_assert_eq!(&lhs[0], &rhs);
        let phys = &s.physical_of(&[a, b])[0] + &s.physical_of(&[c, d])[0];
        prop_assert_eq!(&s.physical_of(&[a + c, b + d])[0], &phys);
    }

    // translating by a lattice vector moves the offset by its star
    #[test]
    fn lattice_translation_equivariance(xi in offset(), m in -20i64..20, n in -20i64..20) {
        let s = CutProjectScheme::fibonacci();
        let t = s.physical_of(&[m, n])[0].clone();
        let t_star = s.internal_of(&[m, n])[0].clone();
        let base = sample(&xi, 0, 60);
        let b = PhysBox::interval(t.clone(), &t + &f().int(60)).unwrap();
        let shifted_xi = Xi::new(vec![&xi - &t_star], vec![f().zero()]);
        let moved = enumerate_model_set(&s, &window(), &shifted_xi, &b).unwrap();
        let back: Vec<Q> = moved.positions.iter().map(|p| &p[0] - &t).collect();
        let orig: Vec<Q> = base.positions.iter().map(|p| p[0].clone()).collect();
        prop_assert_eq!(back, orig);
    }

    #[test]
    fn physical_offset_translates(xi in offset(), shift in -40i64..40) {
        let s = CutProjectScheme::fibonacci();
        let base = sample(&xi, 0, 50);
        let t = f().ratio(shift, 7);
        let b = PhysBox::interval(t.clone(), &t + &f().int(50)).unwrap();
        let moved = enumerate_model_set(&s, &window(), &Xi::new(vec![xi.clone()], vec![t.clone()]), &b).unwrap();
        let back: Vec<Q> = moved.positions.iter().map(|p| &p[0] - &t).collect();
        let orig: Vec<Q> = base.positions.iter().map(|p| p[0].clone()).collect();
        prop_assert_eq!(back, orig);
    }

    #[test]
    fn acceptance_characterizes_occurrence(xi in offset(), anchor in 20usize..120, tenths in 5i64..50) {
        let s = sample(&xi, 0, 250);
        let patch = extract_patch(&s, anchor, Region::Ball(f().ratio(tenths, 10))).unwrap();
        let dom = acceptance_domain(&CutProjectScheme::fibonacci(), &window(), &patch).unwrap();
        let rep = verify_acceptance(&s, &dom);
        prop_assert_eq!(rep.misses, 0);
        prop_assert!(rep.hits >= 1);
    }

    #[test]
    fn min_gap_is_non_increasing(xi in offset()) {
        let s = sample(&xi, 0, 300);
        let radii: Vec<Q> = [4, 8, 16, 32, 64, 128].iter().map(|&r| f().int(r)).collect();
        let rep = meyer_report(&s.positions, &radii, None, &MeyerThresholds::default()).unwrap();
        let gaps: Vec<f64> = rep.min_gap_f64.iter().flatten().copied().collect();
        prop_assert!(gaps.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn population_counts_letters(letter in 0usize..4, n in 0u32..10) {
        let sys = SubstitutionSystem::doubled_fibonacci();
        let word = sys.expand(letter, n);
        let pop = sys.population(letter, n);
        for (i, c) in pop.iter().enumerate() {
            prop_assert_eq!(c, &word.iter().filter(|&&l| l == i).count().into());
        }
    }

    // |A_j^n| = lambda_PF^n l_j + eps lambda^n v_j for lengths l + eps v
    #[test]
    fn eigen_deformations_scale(letter in 0usize..4, n in 0u32..16, p in 1i64..20, q in 20i64..90, which in 0usize..2) {
        use modelset_core::substitution::EigenClass;
        let sys = SubstitutionSystem::doubled_fibonacci();
        let natural = sys.natural_lengths().unwrap();
        let class = [EigenClass::PfConjugate, EigenClass::ContractingNonConjugate][which];
        let (lambda, v) = sys.exact_direction(class).unwrap();
        let eps = f().ratio(p, q);
        let Ok(lengths) = sys.deformed_lengths(&natural, &eps, &v) else { return Ok(()) };
        let pf = &f().phi() * &f().phi();
        let expected = &(&pf.pow(n as i32) * &natural[letter]) + &(&(&eps * &lambda.pow(n as i32)) * &v[letter]);
        prop_assert_eq!(sys.supertile_length(&lengths, letter, n).unwrap(), expected);
    }

    #[test]
    fn realization_adds_tile_lengths(n in 0u32..9, mask in 1usize..16) {
        let sys = SubstitutionSystem::doubled_fibonacci();
        let natural = sys.natural_lengths().unwrap();
        let full = sys.realize(0, n, &natural, &[0, 1, 2, 3]).unwrap();
        prop_assert_eq!(&full.total_length, &sys.supertile_length(&natural, 0, n).unwrap());
        let word = sys.expand(0, n);
        prop_assert_eq!(full.points.len(), word.len());
        for (k, pair) in full.points.windows(2).enumerate() {
            prop_assert_eq!(&pair[1].position - &pair[0].position, natural[word[k]].clone());
        }
        // marking a subset of letters keeps exactly their tiles
        let markers: Vec<usize> = (0..4).filter(|b| mask >> b & 1 == 1).collect();
        let part = sys.realize(0, n, &natural, &markers).unwrap();
        let kept: Vec<Q> = full.points.iter().filter(|p| markers.contains(&p.letter)).map(|p| p.position.clone()).collect();
        let got: Vec<Q> = part.points.iter().map(|p| p.position.clone()).collect();
        prop_assert_eq!(got, kept);
    }

    #[test]
    fn self_starting_words_are_prefixes(n in 0u32..10) {
        let sys = SubstitutionSystem::doubled_fibonacci();
        let (a, b) = (sys.expand(0, n), sys.expand(0, n + 1));
        prop_assert!(b.starts_with(&a));
    }
}

#[test]
fn first_generation_markers() {
    let sys = SubstitutionSystem::doubled_fibonacci();
    let natural = sys.natural_lengths().unwrap();
    let r = sys.realize(0, 1, &natural, &[0, 2]).unwrap();
    assert_eq!(r.positions(), vec![vec![f().zero()], vec![&f().phi() + &f().one()]]);
}
