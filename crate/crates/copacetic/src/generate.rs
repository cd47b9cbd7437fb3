//! Seeded random instance generation. Instances are copacetic by
//! construction: rows are built by admissible-color choices along a rooted
//! traversal, the randomized counterpart of the deterministic coloring
//! extension.

use rand::Rng;

use crate::forest::{Forest, VertexId};
use crate::structure::{C4Coloring, ParamId, Structure, StructureBuilder};
use crate::variant::{Color, TheoryVariant};

pub const MAX_VERTICES: usize = 200;
pub const MAX_PARAMS: usize = 8;

/// Generation profile. Caps apply: at most 200 vertices and 8 params.
#[derive(Clone, Debug)]
pub struct GenProfile {
    pub variant: TheoryVariant,
    pub vertices: usize,
    pub params: usize,
    /// Probability that a new vertex attaches to an earlier one; the rest
    /// start fresh components.
    pub attach_probability: f64,
}

impl GenProfile {
    pub fn new(variant: TheoryVariant, vertices: usize, params: usize) -> GenProfile {
        GenProfile {
            variant,
            vertices: vertices.min(MAX_VERTICES),
            params: params.min(MAX_PARAMS),
            attach_probability: 0.85,
        }
    }
}

/// A uniformly random valid total coloring: per component, the root gets a
/// uniform color and every other vertex a uniform color distinct from the
/// edge to its parent. Any such assignment satisfies the capacity bounds.
pub fn random_c4_coloring(
    f: &Forest,
    variant: &TheoryVariant,
    rng: &mut impl Rng,
) -> C4Coloring {
    let k = variant.color_count();
    let mut col = C4Coloring::new();
    let uniform = |rng: &mut dyn rand::RngCore| Color::new(rng.gen_range(1..=k)).unwrap();
    for comp in f.components() {
        let root = comp.iter().next().unwrap().clone();
        col.set(root.clone(), uniform(rng));
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for (y, ec) in f.neighbors(&x).unwrap() {
                if col.get(y).is_some() || !comp.contains(y) {
                    continue;
                }
                let mut c = uniform(rng);
                while c == *ec {
                    c = uniform(rng);
                }
                col.set(y.clone(), c);
                stack.push(y.clone());
            }
        }
    }
    col
}

/// Random copacetic structure: a random forest, then one valid random row
/// per param.
pub fn random_instance(rng: &mut impl Rng, profile: &GenProfile) -> Structure {
    let mut builder = StructureBuilder::new(profile.variant.clone());
    let mut forest = Forest::new(profile.variant.color_count());
    let names: Vec<VertexId> = (0..profile.vertices)
        .map(|i| VertexId::new(format!("v{i}")))
        .collect();
    for (i, v) in names.iter().enumerate() {
        forest.add_vertex(v.clone()).unwrap();
        builder = builder.vertex(v.as_str()).unwrap();
        if i > 0 && rng.gen_bool(profile.attach_probability) {
            let parent = &names[rng.gen_range(0..i)];
            let color = rng.gen_range(1..=profile.variant.color_count());
            forest
                .add_edge(Color::new(color).unwrap(), parent, v)
                .unwrap();
            builder = builder.edge(color, parent.as_str(), v.as_str()).unwrap();
        }
    }
    for j in 0..profile.params {
        let p = ParamId::new(format!("q{j}"));
        builder = builder.param(p.as_str()).unwrap();
        let row = random_c4_coloring(&forest, &profile.variant, rng);
        for (v, c) in row.iter() {
            builder = builder.rho(c.get(), p.as_str(), v.as_str()).unwrap();
        }
    }
    builder.build().expect("generated instances are copacetic")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{check_c4_coloring, verify_copacetic};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_profile() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_instance(
            &mut rng,
            &GenProfile::new(TheoryVariant::standard(), 0, 0),
        );
        assert_eq!(s.vertex_count(), 0);
    }

    #[test]
    fn reproducible() {
        let profile = GenProfile::new(TheoryVariant::standard(), 30, 3);
        let a = random_instance(&mut ChaCha8Rng::seed_from_u64(9), &profile);
        let b = random_instance(&mut ChaCha8Rng::seed_from_u64(9), &profile);
        assert_eq!(a, b);
    }

    #[test]
    fn instances_are_copacetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..50 {
            let variant = if i % 2 == 0 {
                TheoryVariant::standard()
            } else {
                TheoryVariant::triple()
            };
            let s = random_instance(&mut rng, &GenProfile::new(variant, 25, 3));
            assert!(verify_copacetic(&s).is_empty());
        }
    }

    #[test]
    fn random_rows_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let profile = GenProfile::new(TheoryVariant::triple(), 40, 0);
        let s = random_instance(&mut rng, &profile);
        for _ in 0..20 {
            let col = random_c4_coloring(s.forest(), s.variant(), &mut rng);
            assert!(check_c4_coloring(s.forest(), &col, s.variant())
                .unwrap()
                .is_empty());
        }
    }
}
