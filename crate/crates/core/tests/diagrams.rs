use proptest::prelude::*;

use bqdim::diagrams::*;
use bqdim::qoperators::equal_on_window;
use bqdim::repsoq::{rep_table, RepSpec};
use bqdim::weylb::Word;

const Q: f64 = 0.5;

/// Counts paths by trying every sequence of intermediate nodes.
fn brute_force_count(d: &Diagram, l: usize, k: usize) -> usize {
    let nodes = 2 * d.n + 1;
    let nl = d.layers.len();
    if nl == 0 {
        return usize::from(l == k);
    }
    let inner = nl - 1;
    let mut count = 0;
    let total = nodes.pow(inner as u32);
    for code in 0..total {
        let mut seq = vec![l];
        let mut c = code;
        for _ in 0..inner {
            seq.push(c % nodes + 1);
            c /= nodes;
        }
        seq.push(k);
        let ok = (0..nl).all(|j| {
            d.layers[j]
                .edges
                .iter()
                .any(|e| e.left == seq[j] && e.right == seq[j + 1])
        });
        count += usize::from(ok);
    }
    count
}

fn diagram(n: usize, letters: &[usize]) -> Diagram {
    Diagram::for_word(n, &Word(letters.to_vec())).unwrap()
}

#[test]
fn elementary_layer_shape() {
    let l = layer(LayerKind::Elementary(1), 2).unwrap();
    assert_eq!(l.signature().len(), 1);
    // Every node on each side carries at least one edge.
    for i in 1..=5 {
        assert!(l.edges.iter().any(|e| e.left == i));
        assert!(l.edges.iter().any(|e| e.right == i));
    }
    assert!(layer(LayerKind::Elementary(3), 2).is_err());
    assert!(layer(LayerKind::Elementary(1), 0).is_err());
}

#[test]
fn path_counts_for_palindromic_word() {
    let d = diagram(3, &[1, 2, 3, 2, 1]);
    for l in 1..=7 {
        for k in 1..=7 {
            assert_eq!(paths(&d, l, k).unwrap().len(), brute_force_count(&d, l, k), "{l}->{k}");
        }
    }
    let ps = paths(&d, 1, 7).unwrap();
    assert_eq!(ps.len(), 1);
    assert_eq!(paths(&d, 1, 3).unwrap().len(), 2);
    assert!(paths(&d, 0, 1).is_err());
    assert!(paths(&d, 1, 8).is_err());
}

#[test]
fn path_sums_reproduce_tables() {
    for (n, w) in [(2, vec![1, 2]), (2, vec![2, 1, 2]), (3, vec![1, 2, 3, 2, 1])] {
        let d = diagram(n, &w);
        let t = rep_table(&RepSpec::new(n, Word(w.clone()))).unwrap();
        let dim = 2 * n + 1;
        for l in 1..=dim {
            for k in 1..=dim {
                let s = path_sum(&d, l, k).unwrap();
                assert!(equal_on_window(&s, t.get(l, k), 3, Q, 1e-12).unwrap(), "{w:?} {l}->{k}");
            }
        }
    }
}

#[test]
fn concatenation_matches_word_concatenation() {
    let a = diagram(2, &[1, 2]);
    let b = diagram(2, &[1]);
    let c = concatenate(&a, &b).unwrap();
    assert_eq!(c, diagram(2, &[1, 2, 1]));
    assert!(concatenate(&a, &diagram(3, &[1])).is_err());
}

#[test]
fn dot_rendering() {
    let d = diagram(2, &[1, 2]);
    let s = render_dot(&d);
    assert!(s.starts_with("digraph"));
    assert!(s.trim_end().ends_with('}'));
    for i in 1..=5 {
        assert!(s.contains(&format!("L{i}")) && s.contains(&format!("R{i}")));
    }
    assert_eq!(s, render_dot(&d));
}

#[test]
fn empty_diagram_is_identity() {
    let d = Diagram::empty(2);
    for l in 1..=5 {
        for k in 1..=5 {
            assert_eq!(paths(&d, l, k).unwrap().len(), usize::from(l == k));
        }
    }
}

#[test]
fn embeddings_are_verified() {
    for (n, w) in [(2, vec![1, 2, 1, 2]), (3, vec![3, 2, 3])] {
        let sp = bqdim::weylb::SignedPermutation::from_word(n, &Word(w)).unwrap();
        let parts = bqdim::weylb::parts(&sp);
        let maps = embeddings_to_top(&parts).unwrap();
        assert_eq!(maps.len(), parts.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn enumeration_matches_brute_force(w in prop::collection::vec(1usize..=2, 0..5), l in 1usize..=5, k in 1usize..=5) {
        let d = diagram(2, &w);
        prop_assert_eq!(paths(&d, l, k).unwrap().len(), brute_force_count(&d, l, k));
    }
}
