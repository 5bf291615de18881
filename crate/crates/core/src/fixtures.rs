//! Small named models used by the tests, the acceptance gate and the CLI goldens.

use std::collections::BTreeMap;

use crate::structures::{BlockSeq, ChainModel, FiniteStructure, LevelFamily, Linkage, Presentation, Vocabulary};

fn order(n: usize, pairs: &[(usize, usize)]) -> FiniteStructure {
    let mut m = FiniteStructure::new(Vocabulary::order("<"), n);
    for &(x, y) in pairs {
        m.add("<", vec![x, y]);
    }
    m
}

/// Twelve `{<}`-structures with at most four elements: chains, antichains,
/// small partial orders and two structures that are not orders at all.
pub fn order_catalog() -> Vec<(String, FiniteStructure)> {
    vec![
        ("chain1".into(), FiniteStructure::chain(1)),
        ("chain2".into(), FiniteStructure::chain(2)),
        ("chain3".into(), FiniteStructure::chain(3)),
        ("chain4".into(), FiniteStructure::chain(4)),
        ("antichain2".into(), order(2, &[])),
        ("antichain3".into(), order(3, &[])),
        ("wedge".into(), order(3, &[(0, 1), (0, 2)])),
        ("vee".into(), order(3, &[(1, 0), (2, 0)])),
        ("chain2+1".into(), order(3, &[(0, 1)])),
        ("diamond".into(), order(4, &[(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)])),
        ("loop".into(), order(1, &[(0, 0)])),
        ("cycle2".into(), order(2, &[(0, 1), (1, 0)])),
    ]
}

/// One-point blocks ordered as ω*.
pub fn example_presentation() -> Presentation {
    Presentation::omega_star()
}

/// Prefix `n+1` plus every block's single point: level 0 is the whole of ω*.
pub fn example_a() -> ChainModel {
    let pres = example_presentation();
    let levels = LevelFamily::diagonal(&pres, "a");
    ChainModel::new(pres, levels)
}

/// Prefix `n+1` only: every level is finite.
pub fn example_b() -> ChainModel {
    ChainModel::new(example_presentation(), LevelFamily::affine(1, 1))
}

/// ω with finite initial segments as levels.
pub fn omega_chain() -> ChainModel {
    ChainModel::new(Presentation::omega(), LevelFamily::affine(1, 1))
}

/// ω* with finite final segments as levels.
pub fn omega_star_chain() -> ChainModel {
    example_b()
}

/// Two blocks without `P`, then a cycle of one block whose point satisfies `P`.
pub fn deep_chain() -> ChainModel {
    let vocab = Vocabulary::new(&[("<", 2), ("P", 1)]);
    let plain = FiniteStructure::new(vocab.clone(), 1);
    let mut marked = FiniteStructure::new(vocab.clone(), 1);
    marked.add("P", vec![0]);
    let pres = Presentation {
        vocab,
        templates: vec![plain, marked],
        block_seq: BlockSeq { preamble: vec![0, 0], cycle: vec![1] },
        linkage: BTreeMap::from([("<".to_string(), Linkage::AllIncreasing), ("P".to_string(), Linkage::None)]),
    };
    ChainModel::new(pres, LevelFamily::affine(1, 1))
}

fn graph_presentation(template: FiniteStructure, mode: Linkage) -> Presentation {
    Presentation::periodic(template, mode)
}

/// Graph presentations whose enumerated decompositions are compared for
/// clique omission: disjoint triangles, a countable clique, a perfect
/// matching, and a finite 4-cycle beside a triangle.
pub fn graph_presentations() -> Vec<(String, Presentation)> {
    let triangle = FiniteStructure::graph(3, &[(0, 1), (1, 2), (0, 2)]);
    let edge = FiniteStructure::graph(2, &[(0, 1)]);
    let point = FiniteStructure::graph(1, &[]);
    let square = FiniteStructure::graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    let empty = FiniteStructure::graph(0, &[]);
    let finite = Presentation {
        vocab: square.vocab.clone(),
        templates: vec![square, triangle.clone(), empty],
        block_seq: BlockSeq { preamble: vec![0, 1], cycle: vec![2] },
        linkage: BTreeMap::from([("E".to_string(), Linkage::None)]),
    };
    vec![
        ("triangles".into(), graph_presentation(triangle, Linkage::None)),
        ("clique".into(), graph_presentation(point, Linkage::Complete)),
        ("matching".into(), graph_presentation(edge, Linkage::None)),
        ("square+triangle".into(), finite),
    ]
}
