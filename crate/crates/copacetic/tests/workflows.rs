//! Cross-module workflows: the two-sided closure computation on generated
//! independent pairs, the three-way amalgam, and certificates flowing
//! through the text format.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use copacetic::closure::pair_structure;
use copacetic::construct::{triple_amalgam, PairData};
use copacetic::format::{parse_certificate, parse_structure, serialize_certificate};
use copacetic::independence::{existence_failure_certificate, verify_certificate};
use copacetic::structure::StructureBuilder;
use copacetic::{Embedding, TheoryVariant, VertexId};
use copacetic_testkit::{lemma_pair_instance, triple_instance};

#[test]
fn pair_structure_on_generated_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for i in 0..30 {
        let variant = if i % 2 == 0 {
            TheoryVariant::standard()
        } else {
            TheoryVariant::triple()
        };
        let pair = lemma_pair_instance(&mut rng, &variant);
        let (left_star, right_star, report) = pair_structure(
            &pair.structure,
            &pair.base,
            &pair.left,
            &pair.right,
        )
        .unwrap_or_else(|e| panic!("instance {i}: {e}"));
        assert!(pair.left.is_subset_of(&left_star));
        assert!(pair.right.is_subset_of(&right_star));
        assert!(
            report.all_green(),
            "instance {i}: union={} disconnected={:?} left:\n{}right:\n{}",
            report.union_closure_matches,
            report.disconnected_new_vertices,
            report.left_closed_in_star,
            report.right_closed_in_star,
        );
    }
}

#[test]
fn pair_structure_rejects_dependent_sides() {
    // Two adjacent vertices with no base: flagrantly dependent.
    let s = StructureBuilder::new(TheoryVariant::standard())
        .vertex("a")
        .unwrap()
        .vertex("b")
        .unwrap()
        .edge(1, "a", "b")
        .unwrap()
        .build()
        .unwrap();
    let base = copacetic::SubsetHandle::empty();
    let left = copacetic::SubsetHandle::vertices([VertexId::new("a")]);
    let right = copacetic::SubsetHandle::vertices([VertexId::new("b")]);
    assert!(matches!(
        pair_structure(&s, &base, &left, &right),
        Err(copacetic::closure::ClosureError::Dependent { .. })
    ));
}

#[test]
fn triple_amalgam_on_generated_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(57);
    for i in 0..8 {
        let variant = if i % 2 == 0 {
            TheoryVariant::standard()
        } else {
            TheoryVariant::triple()
        };
        let rename = i % 3 == 0;
        let inst = triple_instance(&mut rng, &variant, rename);
        let out = triple_amalgam(&inst.base, &inst.ab, &inst.ac, &inst.bc, &inst.iso, 1)
            .unwrap_or_else(|e| panic!("instance {i}: {e}"));
        assert!(
            out.report.all_green(),
            "instance {i}: {}",
            out.report.summary()
        );
        assert!(out
            .a_embedding
            .verify(&inst.ab.structure, &out.structure)
            .is_ok());
    }
}

#[test]
fn triple_amalgam_detached_parts() {
    // The b- and c-parts live in distinct base components; one param in the
    // a-part with an image-free row. Budgeted completion still leaves every
    // claim green.
    let s = StructureBuilder::new(TheoryVariant::standard())
        .vertex("m0")
        .unwrap()
        .vertex("m1")
        .unwrap()
        .vertex("m2")
        .unwrap()
        .vertex("a0")
        .unwrap()
        .vertex("b0")
        .unwrap()
        .vertex("c0")
        .unwrap()
        .param("pa")
        .unwrap()
        .edge(1, "m0", "a0")
        .unwrap()
        .edge(1, "m1", "b0")
        .unwrap()
        .edge(1, "m2", "c0")
        .unwrap()
        .rho(2, "pa", "m0")
        .unwrap()
        .rho(2, "pa", "m1")
        .unwrap()
        .rho(2, "pa", "m2")
        .unwrap()
        .rho(2, "pa", "a0")
        .unwrap()
        .rho(2, "pa", "b0")
        .unwrap()
        .rho(2, "pa", "c0")
        .unwrap()
        .build()
        .unwrap();
    let m_ids = || [VertexId::new("m0"), VertexId::new("m1"), VertexId::new("m2")];
    let m = s
        .induced(&copacetic::SubsetHandle::vertices(m_ids()))
        .unwrap();
    let part = |extra: &str, with_param: bool| copacetic::SubsetHandle::new(
        m_ids().into_iter().chain([VertexId::new(extra)]),
        if with_param {
            vec![copacetic::ParamId::new("pa")]
        } else {
            vec![]
        },
    );
    let a = part("a0", true);
    let b = part("b0", false);
    let c = part("c0", false);
    let ab = PairData {
        structure: s.clone(),
        left: a.clone(),
        right: b.clone(),
    };
    let ac = PairData {
        structure: s.clone(),
        left: a.clone(),
        right: c.clone(),
    };
    let bc = PairData {
        structure: s,
        left: b,
        right: c,
    };
    let out = triple_amalgam(&m, &ab, &ac, &bc, &Embedding::identity(&a), 1).unwrap();
    assert!(out.report.all_green(), "{}", out.report.summary());
    // Completion ran: the param received fresh witnesses.
    assert!(out.structure.vertex_count() > 6);
}

#[test]
fn triple_amalgam_degenerate_base() {
    // All parts equal to the base: the amalgam is the base itself.
    let m = StructureBuilder::new(TheoryVariant::standard())
        .vertex("m0")
        .unwrap()
        .vertex("m1")
        .unwrap()
        .edge(1, "m0", "m1")
        .unwrap()
        .build()
        .unwrap();
    let full = m.full_handle();
    let pd = PairData {
        structure: m.clone(),
        left: full.clone(),
        right: full.clone(),
    };
    let out = triple_amalgam(
        &m,
        &pd,
        &pd,
        &pd,
        &Embedding::identity(&full),
        0,
    )
    .unwrap();
    assert!(out.structure.same_content(&m));
    assert!(out.report.all_green());
}

#[test]
fn triple_amalgam_gates_dependent_inputs() {
    // A pair whose two parts are joined by a base-avoiding edge must be
    // rejected with the offending step named.
    let s = StructureBuilder::new(TheoryVariant::standard())
        .vertex("m0")
        .unwrap()
        .vertex("a0")
        .unwrap()
        .vertex("b0")
        .unwrap()
        .edge(1, "a0", "b0")
        .unwrap()
        .build()
        .unwrap();
    let m = s
        .induced(&copacetic::SubsetHandle::vertices([VertexId::new("m0")]))
        .unwrap();
    let left = copacetic::SubsetHandle::vertices([VertexId::new("m0"), VertexId::new("a0")]);
    let right = copacetic::SubsetHandle::vertices([VertexId::new("m0"), VertexId::new("b0")]);
    let pd = PairData {
        structure: s,
        left: left.clone(),
        right,
    };
    let err = triple_amalgam(&m, &pd, &pd, &pd, &Embedding::identity(&left), 0).unwrap_err();
    match err {
        copacetic::construct::ConstructError::Hypothesis { step, .. } => {
            assert!(step == "independence" || step == "parts" || step == "identification");
        }
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn certificate_survives_the_text_format() {
    let gadget = "\
variant k=2 cap=1,2
vertex o
vertex o2
vertex u
vertex v
vertex w1
vertex w2
edge 1 o u
edge 1 o2 u
edge 2 o v
edge 2 v w1
edge 2 v w2
";
    let s = parse_structure(gadget).unwrap();
    let cert = existence_failure_certificate(&s, &VertexId::new("o"), 2).unwrap();
    let text = serialize_certificate(&cert);
    let parsed = parse_certificate(&text).unwrap();
    verify_certificate(&s, &parsed, 14).unwrap();
}
