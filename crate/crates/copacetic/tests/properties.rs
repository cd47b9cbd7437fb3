//! Property tests for the spec-level invariants: forest geometry, closure
//! operator laws, coloring algorithm contracts, independence relation
//! axioms, and serialization round-trips.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use copacetic::axioms::{check_c4_coloring, check_closed, verify_copacetic, is_connected};
use copacetic::closure::closure_of;
use copacetic::coloring::{brute_force_colorings, extend_coloring, interpolate_colorings};
use copacetic::construct::{add_closure_image, complete_budgeted, introduce_parameter};
use copacetic::format::{parse_structure, serialize_structure};
use copacetic::generate::{random_c4_coloring, random_instance, GenProfile};
use copacetic::independence::{independent, same_type_over, Element};
use copacetic::structure::{StructureBuilder, SubsetHandle};
use copacetic::{Distance, Structure, TheoryVariant, VertexId};
use copacetic_testkit::{random_handle, random_subtree};

fn variant_for(i: u64) -> TheoryVariant {
    if i % 2 == 0 {
        TheoryVariant::standard()
    } else {
        TheoryVariant::triple()
    }
}

fn small_instance(seed: u64, vertices: usize, params: usize) -> Structure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_instance(
        &mut rng,
        &GenProfile::new(variant_for(seed), vertices, params),
    )
}

proptest! {
    /// Triangle equality along the unique path: d(u,w) <= d(u,v) + d(v,w),
    /// with equality exactly when v lies on the path from u to w.
    #[test]
    fn distance_triangle(seed in 0u64..500) {
        let s = small_instance(seed, 12, 0);
        let f = s.forest();
        let vs: Vec<&VertexId> = f.vertices().collect();
        for u in &vs {
            for v in &vs {
                for w in &vs {
                    let (duw, duv, dvw) = (
                        f.tree_distance(u, w).unwrap(),
                        f.tree_distance(u, v).unwrap(),
                        f.tree_distance(v, w).unwrap(),
                    );
                    if let (Distance::Finite(a), Distance::Finite(b), Distance::Finite(c)) =
                        (duw, duv, dvw)
                    {
                        prop_assert!(a <= b + c);
                        let on_path = f
                            .unique_path(u, w)
                            .unwrap()
                            .unwrap()
                            .contains(v);
                        prop_assert_eq!(a == b + c, on_path);
                    }
                }
            }
        }
    }

    /// Unique paths have pairwise-distinct vertices and consecutive edges.
    #[test]
    fn unique_path_shape(seed in 0u64..500) {
        let s = small_instance(seed, 14, 0);
        let f = s.forest();
        let vs: Vec<&VertexId> = f.vertices().collect();
        for u in &vs {
            for v in &vs {
                if let Some(path) = f.unique_path(u, v).unwrap() {
                    let set: BTreeSet<&VertexId> = path.iter().collect();
                    prop_assert_eq!(set.len(), path.len());
                    for pair in path.windows(2) {
                        prop_assert!(f.edge_color(&pair[0], &pair[1]).unwrap().is_some());
                    }
                }
            }
        }
    }

    /// A valid total coloring installed as a fresh param's row never breaks
    /// copaceticity.
    #[test]
    fn valid_row_installs_cleanly(seed in 0u64..300) {
        let s = small_instance(seed, 10, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabcd);
        let row = random_c4_coloring(s.forest(), s.variant(), &mut rng);
        prop_assert!(check_c4_coloring(s.forest(), &row, s.variant()).unwrap().is_empty());
        // Rebuild with the row installed on a fresh param.
        let mut b = StructureBuilder::new(s.variant().clone());
        for v in s.forest().vertices() {
            b = b.vertex(v.as_str()).unwrap();
        }
        for (u, v, c) in s.forest().edges() {
            b = b.edge(c.get(), u.as_str(), v.as_str()).unwrap();
        }
        for p in s.params() {
            b = b.param(p.as_str()).unwrap();
            for (v, c) in s.rho_row(p).unwrap() {
                b = b.rho(c.get(), p.as_str(), v.as_str()).unwrap();
            }
        }
        b = b.param("fresh").unwrap();
        for (v, c) in row.iter() {
            b = b.rho(c.get(), "fresh", v.as_str()).unwrap();
        }
        let installed = b.build().unwrap();
        prop_assert!(verify_copacetic(&installed).is_empty());
    }

    /// Closure is extensive, monotone, and idempotent; a larger param
    /// filter gives a pointwise larger closure.
    #[test]
    fn closure_operator_laws(seed in 0u64..300) {
        let s = small_instance(seed, 12, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x77);
        let small = random_handle(&mut rng, &s, 0.25);
        let big = small.union(&random_handle(&mut rng, &s, 0.25));
        let cl_small = closure_of(&s, &small, None).unwrap();
        let cl_big = closure_of(&s, &big, None).unwrap();
        prop_assert!(small.is_subset_of(&cl_small));
        prop_assert!(cl_small.o_part.is_subset(&cl_big.o_part));
        let cl_again = closure_of(&s, &cl_small, None).unwrap();
        prop_assert_eq!(&cl_again, &cl_small);
        // Filter monotonicity.
        let all = s.params().clone();
        let half: BTreeSet<_> = all.iter().take(all.len() / 2).cloned().collect();
        let cl_half = closure_of(&s, &small, Some(&half)).unwrap();
        let cl_all = closure_of(&s, &small, Some(&all)).unwrap();
        prop_assert!(cl_half.o_part.is_subset(&cl_all.o_part));
    }

    /// The closedness check composes: a part closed inside a closed part is
    /// closed in the whole.
    #[test]
    fn closedness_composes(seed in 0u64..200) {
        let s = small_instance(seed, 12, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3141);
        let mid = closure_of(&s, &random_handle(&mut rng, &s, 0.3), None).unwrap();
        prop_assert!(check_closed(&mid, &s).unwrap().is_empty());
        let mid_struct = s.induced(&mid).unwrap();
        let inner_seed = random_handle(&mut rng, &mid_struct, 0.4);
        let inner = closure_of(&mid_struct, &inner_seed, None).unwrap();
        prop_assert!(check_closed(&inner, &mid_struct).unwrap().is_empty());
        prop_assert!(check_closed(&inner, &s).unwrap().is_empty());
    }

    /// Coloring extension restricts exactly, satisfies the neighbor
    /// property, stays valid, and lands in the brute-force extension set.
    #[test]
    fn extension_contract(seed in 0u64..300) {
        let s = small_instance(seed, 11, 0);
        let f = s.forest();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x99);
        let domain = random_subtree(&mut rng, f, 5);
        let total = random_c4_coloring(f, s.variant(), &mut rng);
        let col = total.restrict(&domain);
        let out = extend_coloring(f, &domain, &col, s.variant()).unwrap();
        prop_assert_eq!(out.domain().len(), f.vertex_count());
        prop_assert!(out.extends(&col));
        prop_assert!(check_c4_coloring(f, &out, s.variant()).unwrap().is_empty());
        for v in f.vertices() {
            if domain.contains(v) {
                continue;
            }
            for (w, ec) in f.neighbors(v).unwrap() {
                if domain.contains(w) {
                    prop_assert_ne!(out.get(v), Some(*ec));
                }
            }
        }
        let all = brute_force_colorings(f, &col, s.variant()).unwrap();
        prop_assert!(all.contains(&out));
    }

    /// Independence is symmetric, monotone, and trivial over the base.
    #[test]
    fn independence_axioms(seed in 0u64..150) {
        let s = small_instance(seed, 10, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5555);
        let base = random_handle(&mut rng, &s, 0.2);
        let left = random_handle(&mut rng, &s, 0.3);
        let right = random_handle(&mut rng, &s, 0.3);
        let budget = (seed % 2) as usize;
        let (ab, _) = independent(&s, &base, &left, &right, budget).unwrap();
        let (ba, _) = independent(&s, &base, &right, &left, budget).unwrap();
        prop_assert_eq!(ab, ba);
        let (bb, _) = independent(&s, &base, &left, &base, budget).unwrap();
        prop_assert!(bb);
        if ab {
            let sub_left = SubsetHandle {
                o_part: left.o_part.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect(),
                p_part: left.p_part.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect(),
            };
            let sub_right = SubsetHandle {
                o_part: right.o_part.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect(),
                p_part: right.p_part.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect(),
            };
            let (sub, _) = independent(&s, &base, &sub_left, &sub_right, budget).unwrap();
            prop_assert!(sub);
        }
    }

    /// qf-type equality is an equivalence relation on single vertices over
    /// a common base.
    #[test]
    fn type_equality_is_an_equivalence(seed in 0u64..150) {
        let s = small_instance(seed, 9, 1);
        if s.vertex_count() < 3 {
            return Ok(());
        }
        let vs: Vec<VertexId> = s.forest().vertices().cloned().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1234);
        let base = SubsetHandle::vertices(
            vs.iter().filter(|_| rng.gen_bool(0.2)).cloned().collect::<Vec<_>>(),
        );
        let pick = |rng: &mut ChaCha8Rng| vec![Element::Vertex(vs[rng.gen_range(0..vs.len())].clone())];
        let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        prop_assert!(same_type_over(&s, &base, &x, &x).unwrap());
        let xy = same_type_over(&s, &base, &x, &y).unwrap();
        let yx = same_type_over(&s, &base, &y, &x).unwrap();
        prop_assert_eq!(xy, yx);
        let yz = same_type_over(&s, &base, &y, &z).unwrap();
        let xz = same_type_over(&s, &base, &x, &z).unwrap();
        if xy && yz {
            prop_assert!(xz);
        }
    }

    /// Serialization round-trips: parse of a serialization is the identity,
    /// serialization of a parse canonicalizes.
    #[test]
    fn serialization_round_trip(seed in 0u64..500) {
        let s = small_instance(seed, 20, 3);
        let text = serialize_structure(&s);
        let back = parse_structure(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(serialize_structure(&back), text);
    }
}

#[test]
fn interpolation_never_fires_the_halving_assertion() {
    // Three and four distant sets on spiders; the internal bound must never
    // fire when the entry precondition holds.
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..60 {
        let variant = variant_for(case);
        let n_sets = 3 + (case % 2) as usize;
        let threshold = 2u64.pow(n_sets as u32) as usize;
        let (f, legs) = copacetic_testkit::spider(
            &mut rng,
            variant.color_count(),
            n_sets,
            threshold + 2,
            2 * threshold,
        );
        let total = random_c4_coloring(&f, &variant, &mut rng);
        let sets: Vec<(BTreeSet<VertexId>, copacetic::C4Coloring)> = legs
            .iter()
            .map(|leg| {
                let tip: BTreeSet<VertexId> = leg[leg.len() - 2..].iter().cloned().collect();
                (tip.clone(), total.restrict(&tip))
            })
            .collect();
        let (merged_set, merged) = interpolate_colorings(&f, &sets, &variant).unwrap();
        assert!(check_c4_coloring(&f, &merged, &variant).unwrap().is_empty());
        for (set, col) in &sets {
            assert!(set.is_subset(&merged_set));
            assert!(merged.extends(col));
        }
        assert!(is_connected(&f, &merged_set).unwrap());
    }
}

#[test]
fn constructors_preserve_copaceticity() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0u64..40 {
        let s = small_instance(case, 8, 2);
        // Closure-image addition wherever capacity allows.
        'outer: for p in s.params().clone() {
            for v in s.forest().vertex_set() {
                for color in s.variant().colors() {
                    if let Ok((grown, _)) = add_closure_image(&s, &p, &v, color) {
                        assert!(verify_copacetic(&grown).is_empty());
                        continue 'outer;
                    }
                }
            }
        }
        let completed = complete_budgeted(&s, 1).unwrap();
        assert!(verify_copacetic(&completed).is_empty());
        // Parameter introduction with a random singleton target.
        let vs: Vec<VertexId> = s.forest().vertices().cloned().collect();
        if !vs.is_empty() {
            let v = vs[rng.gen_range(0..vs.len())].clone();
            let color = copacetic::Color::new(rng.gen_range(1..=s.variant().color_count())).unwrap();
            let target = (
                BTreeSet::from([v.clone()]),
                [(v, color)].into_iter().collect(),
            );
            let (grown, p) = introduce_parameter(&s, &[target.clone()]).unwrap();
            assert!(verify_copacetic(&grown).is_empty());
            // The target is induced exactly.
            let (set, col) = &target;
            for v in set {
                assert_eq!(grown.rho(&p, v).unwrap(), col.get(v).unwrap());
            }
        }
    }
}
